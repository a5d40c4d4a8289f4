use std::collections::BTreeMap;

use crate::bench::{median, ExperimentRecord};

/// Smallest `d ≥ 0` with `g · 2^d ≥ f`, i.e. `⌈log₂(f/g)⌉` floored at 0.
/// Returns `None` when either count is zero.
pub fn required_delta(f_steps: u64, g_steps: u64) -> Option<u32> {
    if f_steps == 0 || g_steps == 0 {
        return None;
    }
    let (f, mut g) = (f_steps as u128, g_steps as u128);
    let mut d = 0;
    while g < f {
        g <<= 1;
        d += 1;
    }
    Some(d)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BoundRow {
    pub n: usize,
    /// Median solver steps.
    pub f_steps: u64,
    /// Median verifier steps.
    pub g_steps: u64,
    pub speedup: f64,
    /// Verifier certificate bits minus solver certificate bits.
    pub delta_bits: i64,
    pub required_bits: u32,
    pub slack: i64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
    /// Sizes present in only one of the two record sets.
    pub unmatched: Vec<usize>,
    pub tolerance: i64,
    /// `slack ≥ -tolerance` on every row.
    pub pass: bool,
}

fn by_n(records: &[ExperimentRecord]) -> BTreeMap<usize, (Vec<u64>, u32)> {
    let mut out: BTreeMap<usize, (Vec<u64>, u32)> = BTreeMap::new();
    for r in records {
        let e = out.entry(r.n).or_default();
        e.0.push(r.steps);
        e.1 = e.1.max(r.cert_bits);
    }
    out
}

/// Pairs solver and verifier medians per `n`.
pub fn build_bound_report(
    solver: &[ExperimentRecord],
    verifier: &[ExperimentRecord],
    tolerance: i64,
) -> BoundReport {
    let s = by_n(solver);
    let v = by_n(verifier);
    let mut rows = Vec::new();
    let mut unmatched = Vec::new();
    for (&n, (f_all, f_bits)) in &s {
        let Some((g_all, g_bits)) = v.get(&n) else {
            unmatched.push(n);
            continue;
        };
        let f = median(f_all).max(1);
        let g = median(g_all).max(1);
        let required = required_delta(f, g).expect("medians are positive");
        let delta = *g_bits as i64 - *f_bits as i64;
        rows.push(BoundRow {
            n,
            f_steps: f,
            g_steps: g,
            speedup: f as f64 / g as f64,
            delta_bits: delta,
            required_bits: required,
            slack: delta - required as i64,
        });
    }
    unmatched.extend(v.keys().filter(|n| !s.contains_key(n)));
    unmatched.sort_unstable();
    let pass = rows.iter().all(|r| r.slack >= -tolerance);
    BoundReport {
        rows,
        unmatched,
        tolerance,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_delta_examples() {
        assert_eq!(required_delta(1024, 1), Some(10));
        assert_eq!(required_delta(77, 77), Some(0));
        assert_eq!(required_delta(4096 * 4096, 4096), Some(12));
        assert_eq!(required_delta(5, 9), Some(0));
        assert_eq!(required_delta(1025, 1), Some(11));
        assert_eq!(required_delta(0, 3), None);
        assert_eq!(required_delta(3, 0), None);
    }

    #[test]
    fn required_delta_matches_float_log() {
        for f in 1..300u64 {
            for g in 1..40u64 {
                let expect = ((f as f64 / g as f64).log2().ceil()).max(0.0) as u32;
                assert_eq!(required_delta(f, g), Some(expect), "f={f} g={g}");
            }
        }
    }
}
