use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Parser;

use privbandit::harness::{run_experiment, write_csv, Algorithm, Checkpoints, ExperimentConfig, Setting};
use privbandit::mechanisms::NoiseMode;

/// Run private heavy-tailed bandit experiments and write regret curves as CSV.
///
/// Comma-separated values for --algo, --setting, --v and --eps expand into a
/// grid; each cell gets its own output files.
#[derive(Debug, Parser)]
#[command(name = "privbandit", version)]
struct Args {
    /// dprucb, dprse, ldprse or rucb
    #[arg(long, value_delimiter = ',', required = true)]
    algo: Vec<Algorithm>,

    /// s1, s2, s3, two_arm_hard or k_arm_hard
    #[arg(long, value_delimiter = ',', required = true)]
    setting: Vec<Setting>,

    /// Moment order parameter in (0, 1]
    #[arg(long, value_delimiter = ',', default_value = "0.9")]
    v: Vec<f64>,

    /// Privacy budget
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    eps: Vec<f64>,

    #[arg(long, default_value_t = 100_000)]
    horizon: u64,

    #[arg(long, default_value_t = 90)]
    reps: u64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output path prefix; files are <out>.runs.csv, <out>.summary.csv and <out>.meta
    #[arg(long)]
    out: PathBuf,

    /// N for N geometric checkpoints, or every:S for a fixed stride
    #[arg(long, default_value = "200")]
    checkpoints: Checkpoints,

    /// Confidence level of the elimination policies (default 1/T)
    #[arg(long)]
    beta: Option<f64>,

    /// Replace every Laplace draw by zero
    #[cfg(feature = "noise-hooks")]
    #[arg(long)]
    zero_noise: bool,
}

impl Args {
    fn noise(&self) -> NoiseMode {
        #[cfg(feature = "noise-hooks")]
        if self.zero_noise {
            return NoiseMode::Zero;
        }
        NoiseMode::Laplace
    }

    fn grid(&self) -> Vec<ExperimentConfig> {
        let mut out = Vec::new();
        for &algo in &self.algo {
            for setting in &self.setting {
                for &v in &self.v {
                    for &eps in &self.eps {
                        let mut cfg = ExperimentConfig::new(algo, setting.clone(), v, eps, self.horizon)
                            .with_reps(self.reps)
                            .with_seed(self.seed)
                            .with_checkpoints(self.checkpoints)
                            .with_noise(self.noise());
                        cfg.beta = self.beta;
                        out.push(cfg);
                    }
                }
            }
        }
        out
    }
}

fn cell_path(base: &Path, cfg: &ExperimentConfig) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(format!(
        "-{}-{}-eps{}-v{}",
        cfg.algorithm,
        cfg.setting.label(),
        cfg.eps,
        cfg.v
    ));
    PathBuf::from(s)
}

fn main() -> Result<()> {
    let args = Args::parse();
    let grid = args.grid();
    let single = grid.len() == 1;
    for cfg in &grid {
        let label = format!("{} {} eps={} v={}", cfg.algorithm, cfg.setting.label(), cfg.eps, cfg.v);
        let result = run_experiment(cfg).with_context(|| format!("running {label}"))?;
        let base = if single {
            args.out.clone()
        } else {
            cell_path(&args.out, cfg)
        };
        let paths = write_csv(&result, &base).with_context(|| format!("writing {label}"))?;
        match result.summary.rows.last() {
            Some(r) => println!(
                "{label}: final regret {:.3} (std {:.3}) -> {}",
                r.mean,
                r.std,
                paths.runs.display()
            ),
            None => println!("{label}: no checkpoints -> {}", paths.runs.display()),
        }
    }
    Ok(())
}
