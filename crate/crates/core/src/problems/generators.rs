//! Seeded instance generators. All randomness comes from `ChaCha8Rng`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracles::{periodic_oracle, rotation_oracle};
use super::{CnfFormula, GeneratorError};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_ab(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n).map(|_| if rng.gen() { 'a' } else { 'b' }).collect()
}

/// A random `p` of length `l` over `{a,b}` repeated `n / l` times.
pub fn gen_periodic(n: usize, l: usize, seed: u64) -> Result<String, GeneratorError> {
    if l == 0 || !n.is_multiple_of(l) || l > n / 2 {
        return Err(GeneratorError(format!(
            "need 1 <= l <= n/2 and l | n, got n={n}, l={l}"
        )));
    }
    let p = random_ab(&mut rng(seed), l);
    Ok(p.repeat(n / l))
}

/// `a^(n-1) b`.
pub fn gen_worst_aperiodic(n: usize) -> Result<String, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError("n must be positive".into()));
    }
    Ok(format!("{}b", "a".repeat(n - 1)))
}

/// A uniformly random non-periodic string over `{a,b}` (rejection sampling).
pub fn gen_random_aperiodic(n: usize, seed: u64) -> Result<String, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError("n must be at least 2".into()));
    }
    let mut r = rng(seed);
    loop {
        let x = random_ab(&mut r, n);
        if !periodic_oracle(&x).0 {
            return Ok(x);
        }
    }
}

/// A random `A` over `{a,b}` and `B = A[k..] + A[..k]`.
pub fn gen_rotation(n: usize, k: usize, seed: u64) -> Result<(String, String), GeneratorError> {
    if k >= n {
        return Err(GeneratorError(format!("need k < n, got n={n}, k={k}")));
    }
    let a = random_ab(&mut rng(seed), n);
    let b = format!("{}{}", &a[k..], &a[..k]);
    Ok((a, b))
}

/// `(a^n, a^(n-1) b)`.
pub fn gen_worst_nonrotation(n: usize) -> Result<(String, String), GeneratorError> {
    Ok(("a".repeat(n), gen_worst_aperiodic(n)?))
}

/// Random equal-length `(A, B)` over `{a,b}` with `B` not a rotation of `A`.
pub fn gen_random_nonrotation(n: usize, seed: u64) -> Result<(String, String), GeneratorError> {
    if n < 1 {
        return Err(GeneratorError("n must be positive".into()));
    }
    let mut r = rng(seed);
    loop {
        let a = random_ab(&mut r, n);
        let b = random_ab(&mut r, n);
        if !rotation_oracle(&a, &b).0 {
            return Ok((a, b));
        }
    }
}

/// `m` clauses drawn independently: three distinct variables uniformly at
/// random, each negated with probability 1/2.
pub fn gen_random_3sat(n: usize, m: usize, seed: u64) -> Result<CnfFormula, GeneratorError> {
    if n < 3 || m < 1 {
        return Err(GeneratorError(format!(
            "need n >= 3 and m >= 1, got n={n}, m={m}"
        )));
    }
    let mut r = rng(seed);
    let clauses = (0..m)
        .map(|_| {
            let vars = sample(&mut r, n, 3);
            let mut c = [0i32; 3];
            for (slot, v) in c.iter_mut().zip(vars.iter()) {
                let lit = v as i32 + 1;
                *slot = if r.gen() { lit } else { -lit };
            }
            c
        })
        .collect();
    Ok(CnfFormula::new(n, clauses).expect("generator emits distinct in-range variables"))
}
