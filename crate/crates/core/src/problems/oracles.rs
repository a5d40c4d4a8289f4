//! Host-level reference deciders.

use rayon::prelude::*;

use super::CnfFormula;

/// KMP failure function: `fail[i]` is the length of the longest proper
/// border of `x[..i]`.
pub fn failure_function(x: &[u8]) -> Vec<usize> {
    let mut fail = vec![0; x.len() + 1];
    let mut k = 0;
    for i in 1..x.len() {
        while k > 0 && x[i] != x[k] {
            k = fail[k];
        }
        if x[i] == x[k] {
            k += 1;
        }
        fail[i + 1] = k;
    }
    fail
}

/// Whether `x = p^k` for some non-empty `p` and `k ≥ 2`, with the smallest
/// such `|p|`.
pub fn periodic_oracle(x: &str) -> (bool, Option<usize>) {
    let b = x.as_bytes();
    let n = b.len();
    if n < 2 {
        return (false, None);
    }
    let p = n - failure_function(b)[n];
    if n.is_multiple_of(p) && p <= n / 2 {
        (true, Some(p))
    } else {
        (false, None)
    }
}

/// Whether `b = a[k..] + a[..k]` for some `0 ≤ k < |a|`, with the smallest
/// such `k`.
pub fn rotation_oracle(a: &str, b: &str) -> (bool, Option<usize>) {
    if a.len() != b.len() || a.is_empty() {
        return (false, None);
    }
    let doubled = format!("{a}{a}");
    match doubled.find(b) {
        Some(k) => (true, Some(k)),
        None => (false, None),
    }
}

/// Per-literal truth masks over 64 consecutive assignments. Assignment
/// index `a` sets variable `i+1` to bit `n-1-i` of `a`, so the first
/// variable is the most significant bit (certificate order).
fn literal_mask(lit: i32, n: usize, block: u64) -> u64 {
    const LOW: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    let bit = n - lit.unsigned_abs() as usize;
    let m = if bit < 6 {
        LOW[bit]
    } else if block >> (bit - 6) & 1 == 1 {
        u64::MAX
    } else {
        0
    };
    if lit > 0 {
        m
    } else {
        !m
    }
}

/// Largest variable count the exhaustive oracle accepts.
pub const SAT3_ORACLE_MAX_VARS: usize = 26;

fn count_block(f: &CnfFormula, block: u64) -> u64 {
    let n = f.num_vars;
    let mut sat = if n >= 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
    for c in &f.clauses {
        let m = literal_mask(c[0], n, block) | literal_mask(c[1], n, block) | literal_mask(c[2], n, block);
        sat &= m;
        if sat == 0 {
            break;
        }
    }
    sat.count_ones() as u64
}

/// Exhaustive satisfiability and model count.
///
/// # Panics
/// If the formula has more than [`SAT3_ORACLE_MAX_VARS`] variables.
pub fn sat3_oracle(f: &CnfFormula) -> (bool, u64) {
    assert!(
        f.num_vars <= SAT3_ORACLE_MAX_VARS,
        "sat3_oracle is limited to {SAT3_ORACLE_MAX_VARS} variables"
    );
    let blocks = if f.num_vars >= 6 {
        1u64 << (f.num_vars - 6)
    } else {
        1
    };
    let count: u64 = if blocks >= 256 {
        (0..blocks).into_par_iter().map(|b| count_block(f, b)).sum()
    } else {
        (0..blocks).map(|b| count_block(f, b)).sum()
    };
    (count > 0, count)
}

/// The lexicographically first satisfying assignment in certificate order.
pub fn sat3_first_model(f: &CnfFormula) -> Option<Vec<bool>> {
    assert!(f.num_vars <= SAT3_ORACLE_MAX_VARS);
    let n = f.num_vars;
    let blocks = if n >= 6 { 1u64 << (n - 6) } else { 1 };
    for block in 0..blocks {
        let mut sat = if n >= 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
        for c in &f.clauses {
            sat &= literal_mask(c[0], n, block) | literal_mask(c[1], n, block) | literal_mask(c[2], n, block);
        }
        if sat != 0 {
            let a = block * 64 + sat.trailing_zeros() as u64;
            return Some((0..n).map(|i| a >> (n - 1 - i) & 1 == 1).collect());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_function_example() {
        assert_eq!(failure_function(b"aabaab"), [0, 0, 1, 0, 1, 2, 3]);
    }

    #[test]
    fn periodic_examples() {
        assert_eq!(periodic_oracle("abcabc"), (true, Some(3)));
        assert_eq!(periodic_oracle("aabaab"), (true, Some(3)));
        assert_eq!(periodic_oracle(""), (false, None));
        assert_eq!(periodic_oracle("a"), (false, None));
        assert_eq!(periodic_oracle("aa"), (true, Some(1)));
        assert_eq!(periodic_oracle("abab"), (true, Some(2)));
        assert_eq!(periodic_oracle("aaaaaaab"), (false, None));
        assert_eq!(periodic_oracle("abaab"), (false, None));
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(rotation_oracle("abcde", "cdeab"), (true, Some(2)));
        assert_eq!(rotation_oracle("", ""), (false, None));
        assert_eq!(rotation_oracle("aaaa", "aaaa"), (true, Some(0)));
        assert_eq!(rotation_oracle("ab", "ba"), (true, Some(1)));
        assert_eq!(rotation_oracle("a", "b"), (false, None));
        assert_eq!(rotation_oracle("ab", "abc"), (false, None));
    }

    #[test]
    fn sat3_small_counts() {
        let empty = CnfFormula::new(3, vec![]).unwrap();
        assert_eq!(sat3_oracle(&empty), (true, 8));
        let forced = CnfFormula::new(3, vec![[1, 2, 3], [1, -2, 3], [1, 2, -3], [1, -2, -3]]).unwrap();
        assert_eq!(sat3_oracle(&forced), (true, 4));
        assert_eq!(sat3_first_model(&forced), Some(vec![true, false, false]));
        assert_eq!(sat3_first_model(&empty), Some(vec![false, false, false]));
    }
}
