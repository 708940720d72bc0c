//! Loss quantiles, accuracy, and bootstrap comparisons.

use diffwitness_core::random::rng_from_seed;
use rand::Rng;

use super::RunRecord;

/// Loss threshold below which a task counts as converged.
pub const ACC_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct MetricSummary {
    /// Median final loss (lower interpolation).
    pub d5: f64,
    /// Ninth decile of final loss (lower interpolation).
    pub d9: f64,
    /// Fraction of tasks with final loss below `ACC_THRESHOLD`.
    pub acc: f64,
    pub n_tasks: usize,
}

/// Lower-interpolation quantile: `sorted[floor(q·(n−1))]`.
pub fn quantile_lower(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let idx = (q * (sorted.len() - 1) as f64).floor() as usize;
    sorted[idx.min(sorted.len() - 1)]
}

pub fn summarize(records: &[RunRecord]) -> MetricSummary {
    assert!(!records.is_empty(), "summarize needs at least one record");
    let mut losses: Vec<f64> = records.iter().map(|r| r.final_loss).collect();
    losses.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let acc = records.iter().filter(|r| r.final_loss < ACC_THRESHOLD).count() as f64
        / records.len() as f64;
    MetricSummary {
        d5: quantile_lower(&losses, 0.5),
        d9: quantile_lower(&losses, 0.9),
        acc,
        n_tasks: records.len(),
    }
}

/// Bootstrap quantile of `acc(a) − acc(b)` over paired resamples of the two
/// final-loss populations. `quantile(…, 0.05) > 0` certifies `acc(a) >
/// acc(b)` at the 95% level.
pub fn bootstrap_acc_diff_quantile(
    a: &[f64],
    b: &[f64],
    q: f64,
    seed: u64,
    resamples: usize,
) -> f64 {
    let mut rng = rng_from_seed(seed);
    let acc_of = |losses: &[f64], rng: &mut diffwitness_core::random::SeedRng| {
        let n = losses.len();
        let hits = (0..n)
            .filter(|_| losses[rng.gen_range(0..n)] < ACC_THRESHOLD)
            .count();
        hits as f64 / n as f64
    };
    let mut diffs: Vec<f64> = (0..resamples)
        .map(|_| acc_of(a, &mut rng) - acc_of(b, &mut rng))
        .collect();
    diffs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    quantile_lower(&diffs, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(loss: f64) -> RunRecord {
        RunRecord {
            task_id: 0,
            method: "ours",
            final_loss: loss,
            trace: Vec::new(),
            iterations: 0,
            fwd_nanos: 0,
            bwd_nanos: 0,
            converged: loss < ACC_THRESHOLD,
            forward_failures: 0,
        }
    }

    #[test]
    fn all_zero_losses() {
        let records: Vec<_> = (0..8).map(|_| record(0.0)).collect();
        let s = summarize(&records);
        assert_eq!(s.d5, 0.0);
        assert_eq!(s.d9, 0.0);
        assert_eq!(s.acc, 1.0);
    }

    #[test]
    fn hand_counted_decile() {
        // Nine small losses and one large: d5 = d9 = 1e-8, acc = 0.9.
        let mut records: Vec<_> = (0..9).map(|_| record(1e-8)).collect();
        records.push(record(1.0));
        let s = summarize(&records);
        assert_eq!(s.d5, 1e-8);
        assert_eq!(s.d9, 1e-8);
        assert!((s.acc - 0.9).abs() < 1e-12);
    }

    #[test]
    fn quantiles_match_sort_oracle() {
        let mut rng = rng_from_seed(5);
        let records: Vec<_> = (0..10_000)
            .map(|_| record(rng.gen_range(0.0..1.0)))
            .collect();
        let s = summarize(&records);
        let mut sorted: Vec<f64> = records.iter().map(|r| r.final_loss).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(s.d5, sorted[(0.5 * 9999.0) as usize]);
        assert_eq!(s.d9, sorted[(0.9 * 9999.0) as usize]);
        assert!(s.d5 <= s.d9);
    }

    #[test]
    fn bootstrap_detects_clear_ordering() {
        let good: Vec<f64> = (0..200).map(|i| if i < 180 { 1e-9 } else { 1.0 }).collect();
        let bad: Vec<f64> = (0..200).map(|i| if i < 60 { 1e-9 } else { 1.0 }).collect();
        let lo = bootstrap_acc_diff_quantile(&good, &bad, 0.05, 7, 1000);
        assert!(lo > 0.0, "5% quantile {lo}");
        let hi = bootstrap_acc_diff_quantile(&bad, &good, 0.95, 7, 1000);
        assert!(hi < 0.0, "95% quantile {hi}");
    }
}
