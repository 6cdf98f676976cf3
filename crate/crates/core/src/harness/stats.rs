use serde::Serialize;

/// Running summary of per-trial costs, accumulated with Welford's update so
/// that millions of trials do not lose precision to cancellation.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TrialStats {
    pub trials: u64,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub min: u64,
    pub max: u64,
    pub mean_move: f64,
    pub mean_rearrange: f64,
}

#[derive(Clone, Debug, Default)]
pub struct StatsAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
    min: u64,
    max: u64,
    move_mean: f64,
    rearrange_mean: f64,
}

impl StatsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, move_cost: u64, rearrange_cost: u64) {
        let total = move_cost + rearrange_cost;
        self.count += 1;
        if self.count == 1 {
            self.min = total;
            self.max = total;
        } else {
            self.min = self.min.min(total);
            self.max = self.max.max(total);
        }
        let n = self.count as f64;
        let x = total as f64;
        let delta = x - self.mean;
        self.mean += delta / n;
        self.m2 += delta * (x - self.mean);
        self.move_mean += (move_cost as f64 - self.move_mean) / n;
        self.rearrange_mean += (rearrange_cost as f64 - self.rearrange_mean) / n;
    }

    pub fn finish(&self) -> TrialStats {
        let variance = if self.count > 1 {
            self.m2 / (self.count - 1) as f64
        } else {
            0.0
        };
        let std_error = if self.count > 0 {
            (variance / self.count as f64).sqrt()
        } else {
            0.0
        };
        TrialStats {
            trials: self.count,
            mean: self.mean,
            variance,
            std_error,
            min: self.min,
            max: self.max,
            mean_move: self.move_mean,
            mean_rearrange: self.rearrange_mean,
        }
    }
}

impl TrialStats {
    pub fn from_costs(costs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut acc = StatsAccumulator::new();
        for (m, r) in costs {
            acc.push(m, r);
        }
        acc.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_two_pass_formulas() {
        let data = [(3, 1), (0, 0), (7, 2), (5, 5), (1, 0)];
        let s = TrialStats::from_costs(data);
        let totals: Vec<f64> = data.iter().map(|&(m, r)| (m + r) as f64).collect();
        let mean = totals.iter().sum::<f64>() / 5.0;
        let var = totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((s.mean - mean).abs() < 1e-12);
        assert!((s.variance - var).abs() < 1e-12);
        assert!((s.std_error - (var / 5.0).sqrt()).abs() < 1e-12);
        assert_eq!((s.min, s.max), (0, 10));
        assert!((s.mean_move - 3.2).abs() < 1e-12);
        assert!((s.mean_rearrange - 1.6).abs() < 1e-12);
    }

    #[test]
    fn single_trial_has_zero_spread() {
        let s = TrialStats::from_costs([(4, 0)]);
        assert_eq!((s.mean, s.variance, s.std_error), (4.0, 0.0, 0.0));
        assert_eq!((s.min, s.max), (4, 4));
    }

    #[test]
    fn stable_with_large_offset() {
        let big = 1_000_000_000u64;
        let s = TrialStats::from_costs((0..1000).map(|i| (big + i % 2, 0)));
        assert!((s.variance - 0.25 * 1000.0 / 999.0).abs() < 1e-6);
    }
}
