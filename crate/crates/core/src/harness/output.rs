use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{ExperimentResult, HarnessError, SummaryRow};

pub const RUNS_HEADER: &str = "algo,setting,epsilon,v,rep,t,cum_regret";
pub const SUMMARY_HEADER: &str = "algo,setting,epsilon,v,t,mean,std,n_reps";

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvPaths {
    pub runs: PathBuf,
    pub summary: PathBuf,
    pub meta: PathBuf,
}

impl CsvPaths {
    pub fn for_base(base: &Path) -> Self {
        let with = |suffix: &str| {
            let mut s = base.as_os_str().to_owned();
            s.push(suffix);
            PathBuf::from(s)
        };
        Self {
            runs: with(".runs.csv"),
            summary: with(".summary.csv"),
            meta: with(".meta"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub algo: String,
    pub setting: String,
    pub epsilon: f64,
    pub v: f64,
    pub rep: u64,
    pub t: u64,
    pub cum_regret: f64,
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), HarnessError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

/// Writes `<base>.runs.csv`, `<base>.summary.csv` and `<base>.meta`.
pub fn write_csv(result: &ExperimentResult, base: &Path) -> Result<CsvPaths, HarnessError> {
    let paths = CsvPaths::for_base(base);
    if let Some(dir) = paths.runs.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let cfg = &result.config;
    let prefix = format!(
        "{},{},{},{}",
        cfg.algorithm,
        cfg.setting.label(),
        format_float(cfg.eps),
        format_float(cfg.v)
    );

    write_file(&paths.runs, |w| {
        writeln!(w, "{RUNS_HEADER}")?;
        for out in &result.outcomes {
            for &(t, r) in &out.trace.points {
                writeln!(w, "{prefix},{},{t},{}", out.rep, format_float(r))?;
            }
        }
        Ok(())
    })?;

    write_file(&paths.summary, |w| {
        writeln!(w, "{SUMMARY_HEADER}")?;
        for row in &result.summary.rows {
            writeln!(
                w,
                "{prefix},{},{},{},{}",
                row.t,
                format_float(row.mean),
                format_float(row.std),
                row.n_reps
            )?;
        }
        Ok(())
    })?;

    write_file(&paths.meta, |w| {
        writeln!(w, "library_version={}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "algo={}", cfg.algorithm)?;
        writeln!(w, "setting={}", cfg.setting.label())?;
        writeln!(w, "epsilon={}", format_float(cfg.eps))?;
        writeln!(w, "v={}", format_float(cfg.v))?;
        writeln!(w, "horizon={}", cfg.horizon)?;
        writeln!(w, "reps={}", cfg.repetitions)?;
        writeln!(w, "base_seed={}", cfg.base_seed)?;
        writeln!(w, "checkpoints={}", cfg.checkpoints)?;
        writeln!(w, "beta={}", format_float(cfg.beta()))?;
        writeln!(w, "noise={}", cfg.noise.name())?;
        writeln!(
            w,
            "partial_explore_fraction={}",
            format_float(cfg.partial_explore_fraction)
        )?;
        for line in result.instance.to_kv().lines() {
            writeln!(w, "instance.{line}")?;
        }
        Ok(())
    })?;
    Ok(paths)
}

fn read_rows(path: &Path, header: &str) -> Result<Vec<Vec<String>>, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(HarnessError::Parse(format!("{}: unexpected header", path.display())));
    }
    let width = header.split(',').count();
    lines
        .enumerate()
        .map(|(i, line)| {
            let cells: Vec<String> = line.split(',').map(str::to_owned).collect();
            if cells.len() == width {
                Ok(cells)
            } else {
                Err(HarnessError::Parse(format!(
                    "{}:{}: expected {width} fields",
                    path.display(),
                    i + 2
                )))
            }
        })
        .collect()
}

fn num<T: std::str::FromStr>(cell: &str) -> Result<T, HarnessError> {
    cell.parse()
        .map_err(|_| HarnessError::Parse(format!("bad number {cell:?}")))
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRow>, HarnessError> {
    read_rows(path, RUNS_HEADER)?
        .into_iter()
        .map(|c| {
            Ok(RunRow {
                algo: c[0].clone(),
                setting: c[1].clone(),
                epsilon: num(&c[2])?,
                v: num(&c[3])?,
                rep: num(&c[4])?,
                t: num(&c[5])?,
                cum_regret: num(&c[6])?,
            })
        })
        .collect()
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>, HarnessError> {
    read_rows(path, SUMMARY_HEADER)?
        .into_iter()
        .map(|c| {
            Ok(SummaryRow {
                t: num(&c[4])?,
                mean: num(&c[5])?,
                std: num(&c[6])?,
                n_reps: num(&c[7])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, 1.0 / 3.0, 1e-300, 123456.789, f64::MAX, -2.5e-7] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn paths_append_suffixes() {
        let p = CsvPaths::for_base(Path::new("out/run.v1"));
        assert_eq!(p.runs, PathBuf::from("out/run.v1.runs.csv"));
        assert_eq!(p.summary, PathBuf::from("out/run.v1.summary.csv"));
        assert_eq!(p.meta, PathBuf::from("out/run.v1.meta"));
    }
}
