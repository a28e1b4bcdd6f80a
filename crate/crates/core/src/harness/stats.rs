use super::{HarnessError, RegretTrace};

/// Neumaier-compensated sum, evaluated in slice order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = (compensated_sum(values) / n as f64).clamp(lo, hi);
    if n == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, (compensated_sum(&sq) / (n - 1) as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub t: u64,
    pub mean: f64,
    pub std: f64,
    pub n_reps: usize,
}

/// Per-checkpoint mean and standard deviation of cumulative pseudo-regret.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SummaryStats {
    pub rows: Vec<SummaryRow>,
}

impl SummaryStats {
    /// Aggregates traces taken at identical checkpoints, in trace order.
    pub fn from_traces(traces: &[RegretTrace]) -> Result<Self, HarnessError> {
        let Some(first) = traces.first() else {
            return Ok(Self::default());
        };
        let rounds: Vec<u64> = first.points.iter().map(|p| p.0).collect();
        for (i, tr) in traces.iter().enumerate() {
            if tr.points.len() != rounds.len() || tr.points.iter().zip(&rounds).any(|(p, &t)| p.0 != t) {
                return Err(HarnessError::Parse(format!("trace {i} has different checkpoints")));
            }
        }
        let rows = rounds
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                let column: Vec<f64> = traces.iter().map(|tr| tr.points[j].1).collect();
                let (mean, std) = mean_std(&column);
                SummaryRow {
                    t,
                    mean,
                    std,
                    n_reps: traces.len(),
                }
            })
            .collect();
        Ok(Self { rows })
    }

    pub fn final_mean(&self) -> Option<f64> {
        self.rows.last().map(|r| r.mean)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        let mut xs = vec![1e16];
        xs.extend(std::iter::repeat_n(1.0, 1000));
        xs.push(-1e16);
        assert_eq!(compensated_sum(&xs), 1000.0);
    }

    #[test]
    fn single_value_has_zero_std() {
        assert_eq!(mean_std(&[3.5]), (3.5, 0.0));
    }

    #[test]
    fn constant_column() {
        let (m, s) = mean_std(&[0.1; 30]);
        assert_eq!(m, 0.1);
        assert_eq!(s, 0.0);
    }

    #[test]
    fn known_values() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mismatched_checkpoints_rejected() {
        let a = RegretTrace {
            points: vec![(1, 0.0), (2, 1.0)],
        };
        let b = RegretTrace {
            points: vec![(1, 0.0), (3, 1.0)],
        };
        assert!(SummaryStats::from_traces(&[a, b]).is_err());
    }
}
