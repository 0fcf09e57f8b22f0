//! Seeded generators for step functions. Every case gets its own ChaCha
//! stream, so results do not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::stepfn::StepFunction;

/// Independent generator for case `case` of a run seeded with `seed`.
pub fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

/// 1 to 8 pieces with widths in `(0.05, 2)` and log-normal values; about
/// one piece in seven is zero and about one in four repeats an earlier
/// value, so ties and gaps both occur.
pub fn random_step(rng: &mut impl Rng) -> StepFunction {
    let values = LogNormal::new(0.0, 1.0).expect("valid parameters");
    loop {
        let n = rng.random_range(1..=8);
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
        let mut t = 0.0;
        for i in 0..n {
            t += rng.random_range(0.05..2.0);
            let v = if rng.random_bool(0.15) {
                0.0
            } else if i > 0 && rng.random_bool(0.25) {
                pairs[rng.random_range(0..i)].1
            } else {
                values.sample(rng)
            };
            pairs.push((t, v));
        }
        let f = StepFunction::from_pairs(&pairs).expect("generated pairs are valid");
        if !f.is_zero() {
            return f;
        }
    }
}

/// Like [`random_step`] but on the grid of multiples of `1/64` with values
/// in multiples of `1/16`, so sums, maxima and rearrangements are exact.
pub fn random_dyadic_step(rng: &mut impl Rng) -> StepFunction {
    loop {
        let n = rng.random_range(1..=8);
        let mut pairs = Vec::with_capacity(n);
        let mut t = 0u32;
        for _ in 0..n {
            t += rng.random_range(1..=128);
            let v = rng.random_range(0..=64u32);
            pairs.push((t as f64 / 64.0, v as f64 / 16.0));
        }
        let f = StepFunction::from_pairs(&pairs).expect("generated pairs are valid");
        if !f.is_zero() {
            return f;
        }
    }
}

/// `cases` nonzero step functions from [`random_step`].
pub fn random_steps(seed: u64, cases: usize) -> Vec<StepFunction> {
    (0..cases).map(|i| random_step(&mut case_rng(seed, i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_case() {
        let a = random_steps(7, 20);
        let b = random_steps(7, 20);
        assert_eq!(a, b);
        assert_ne!(random_steps(8, 20), a);
        assert!(a.iter().all(|f| !f.is_zero()));
    }

    #[test]
    fn dyadic_values_on_grid() {
        let mut rng = case_rng(1, 0);
        for _ in 0..50 {
            let f = random_dyadic_step(&mut rng);
            assert!(f.ends().iter().all(|t| (t * 64.0).fract() == 0.0));
            assert!(f.values().iter().all(|v| (v * 16.0).fract() == 0.0));
        }
    }
}
