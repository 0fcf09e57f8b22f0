//! Independent two-dimensional evaluation of the distribution functions of
//! `Φ_q f`, `Ψ_p f` and `Θ_{p,q} f`, viewed as `f(s)·θ(t)` on `ℝ₊ × ℝ₊`.

use crate::stepfn::StepFunction;

/// The profile `θ` in `f(s)·θ(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `t^{-1/q}` on `(0, 1)`.
    PhiQ { q: f64 },
    /// `t^{-1/p}` on `[1, ∞)`.
    PsiP { p: f64 },
    /// Both of the above.
    Theta { p: f64, q: f64 },
}

/// `λ{t ∈ (0,1) : t^{-1/q} > c}`.
fn lower_profile_measure(q: f64, c: f64) -> f64 {
    if q.is_infinite() {
        return if c < 1.0 { 1.0 } else { 0.0 };
    }
    if c <= 1.0 {
        1.0
    } else {
        c.powf(-q)
    }
}

/// `λ{t >= 1 : t^{-1/p} > c} = c^{-p} - 1` for `c < 1`.
fn upper_profile_measure(p: f64, c: f64) -> f64 {
    if c >= 1.0 {
        0.0
    } else {
        (-p * c.ln()).exp_m1()
    }
}

/// `λ⊗λ{(s, t) : f(s) θ(t) > v}` summed piece by piece.
pub fn product_measure_distribution(f: &StepFunction, profile: Profile, v: f64) -> f64 {
    f.pieces()
        .filter(|piece| piece.value > 0.0)
        .map(|piece| {
            let c = v / piece.value;
            let m = match profile {
                Profile::PhiQ { q } => lower_profile_measure(q, c),
                Profile::PsiP { p } => upper_profile_measure(p, c),
                Profile::Theta { p, q } => lower_profile_measure(q, c) + upper_profile_measure(p, c),
            };
            piece.len() * m
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_values() {
        let f = StepFunction::indicator(1.0).unwrap();
        let theta = Profile::Theta { p: 1.0, q: 2.0 };
        assert!((product_measure_distribution(&f, theta, 0.5) - 2.0).abs() < 1e-15);
        assert_eq!(product_measure_distribution(&f, theta, 2.0), 0.25);
        assert_eq!(product_measure_distribution(&f, Profile::PsiP { p: 1.0 }, 2.0), 0.0);
    }
}
