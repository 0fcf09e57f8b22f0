//! Randomized and per-matrix checks of rearrangement inequalities.

use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::partition::{pinch, Partition};
use super::{
    distribution_nc, random, singular_step, singular_step_with, spectral_projection, CMatrix, MatrixObservable, Side,
    C64, RANK_CUTOFF,
};
use crate::error::{Error, Result};
use crate::par;
use crate::report::{eq, eq_scaled, le, le_scaled, SuiteReport, Violation};
use crate::sample::case_rng;
use crate::spaces::{IndexGrid, SpaceSpec};

/// Tolerance on singular values, relative to the size of the matrices.
pub const SPECTRAL_TOL: f64 = 1e-8;

/// The anti-boundedness constant `2^{1/p}` of `L^p`, `p < 1`.
pub const ANTI_BOUNDED_CONSTANT: fn(f64) -> f64 = |p| 2f64.powf(1.0 / p);

/// `μ_t` of decreasing singular values `s`.
fn mu_at(s: &[f64], t: f64) -> f64 {
    s.get(t.floor() as usize).copied().unwrap_or(0.0)
}

/// `d(u; z) <= k` is `σ_{k+1}(z) <= u`; the latter gives a margin.
fn count_le(case: usize, quantity: String, s: &[f64], u: f64, k: usize, scale: f64) -> Option<Violation> {
    le_scaled(case, quantity, s.get(k).copied().unwrap_or(0.0), u, scale)
}

fn levels(s: &[f64]) -> Vec<f64> {
    let mut ls: Vec<f64> = s.to_vec();
    ls.extend(s.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    ls.push(0.0);
    ls.push(1.1 * s[0]);
    ls.sort_by(f64::total_cmp);
    ls.dedup();
    ls
}

fn rearrangement_case(seed: u64, case: usize) -> Vec<Violation> {
    let mut rng = case_rng(seed, case);
    let n = random::dimension(&mut rng);
    let x = random::gaussian(&mut rng, n);
    let mut y = random::gaussian(&mut rng, n);
    if rng.random_bool(0.2) {
        y = y.mul(&random::projection(&mut rng, n));
    }
    let sx = x.singular_values_cut(RANK_CUTOFF);
    let sy = y.singular_values_cut(RANK_CUTOFF);
    let scale = sx[0].max(sy[0]);
    let mut out = Vec::new();

    // d(v; x) = d(v; μ(x))
    let mu_x = singular_step(&x);
    for v in levels(&sx) {
        let d = distribution_nc(&x, v).expect("v >= 0") as f64;
        out.extend(eq(
            case,
            format!("a:d(v={v:.4e})"),
            d,
            mu_x.distribution(v).expect("v >= 0"),
        ));
    }

    // d(v + w; x + y) <= d(v; x) + d(w; y)
    let sxy = x.add(&y).singular_values_cut(RANK_CUTOFF);
    for v in levels(&sx) {
        for w in levels(&sy) {
            let k = distribution_nc(&x, v).expect("v >= 0") + distribution_nc(&y, w).expect("w >= 0");
            out.extend(count_le(
                case,
                format!("b:d(x+y)@({v:.4e},{w:.4e})"),
                &sxy,
                v + w,
                k,
                scale,
            ));
        }
    }

    // |a| <= |b| on a common eigenbasis
    let u = random::unitary(&mut rng, n);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for _ in 0..n {
        let ai: f64 = rng.random_range(0.0..2.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        a.push(sign * ai);
        b.push(ai + rng.random_range(0.0..1.0));
    }
    let conj = |d: &[f64]| {
        let diag = DVector::from_iterator(n, d.iter().map(|&v| C64::new(v, 0.0)));
        MatrixObservable::wrap_hermitian(u.entries() * CMatrix::from_diagonal(&diag) * u.entries().adjoint())
    };
    let (xa, yb) = (conj(&a), conj(&b));
    let (sa, sb) = (xa.singular_values_cut(RANK_CUTOFF), yb.singular_values_cut(RANK_CUTOFF));
    let s_ab = sb[0];
    for v in levels(&sb) {
        let k = distribution_nc(&yb, v).expect("v >= 0");
        out.extend(count_le(case, format!("c:d(|x|<=|y|)@{v:.4e}"), &sa, v, k, s_ab));
    }
    for k in 0..n {
        out.extend(le_scaled(case, format!("c:mu_{k}(|x|<=|y|)"), sa[k], sb[k], s_ab));
    }

    // μ_{s+t}(x + y) <= μ_s(x) + μ_t(y), μ(λx) = |λ| μ(x)
    let halves: Vec<f64> = (0..=2 * n).map(|i| i as f64 / 2.0).collect();
    for &s in &halves {
        for &t in &halves {
            out.extend(le_scaled(
                case,
                format!("d:mu_(s+t)(x+y)@({s},{t})"),
                mu_at(&sxy, s + t),
                mu_at(&sx, s) + mu_at(&sy, t),
                scale,
            ));
        }
    }
    let lambda = C64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    let sl = x.scale(lambda).singular_values_cut(RANK_CUTOFF);
    for k in 0..n {
        let want = lambda.norm() * sx[k];
        out.extend(eq_scaled(
            case,
            format!("e:mu_{k}(lambda x)"),
            sl[k],
            want,
            lambda.norm() * scale,
        ));
    }

    // μ_t(u x v) <= ‖u‖ μ_t(x) ‖v‖, with equality for unitaries
    let (g1, g2) = (random::gaussian(&mut rng, n), random::gaussian(&mut rng, n));
    let (n1, n2) = (g1.op_norm(), g2.op_norm());
    let sg = g1.mul(&x).mul(&g2).singular_values_cut(RANK_CUTOFF);
    let (w1, w2) = (random::unitary(&mut rng, n), random::unitary(&mut rng, n));
    let sw = w1.mul(&x).mul(&w2).singular_values_cut(RANK_CUTOFF);
    for k in 0..n {
        out.extend(le_scaled(
            case,
            format!("f:mu_{k}(uxv)"),
            sg[k],
            n1 * sx[k] * n2,
            n1 * n2 * scale,
        ));
        out.extend(eq_scaled(case, format!("f:mu_{k}(wxw')"), sw[k], sx[k], scale));
    }

    // μ(|x|^s) = μ(x)^s
    let abs_x = x.abs();
    for s in [0.5, 2.0, 3.0] {
        let sp = abs_x
            .map_spectrum(|l| l.max(0.0).powf(s))
            .expect("|x| is hermitian")
            .singular_values_cut(RANK_CUTOFF);
        for k in 0..n {
            out.extend(eq_scaled(
                case,
                format!("g:mu_{k}(|x|^{s})"),
                sp[k],
                sx[k].powf(s),
                scale.powf(s),
            ));
        }
    }

    // e = e^{|x|}(v, ∞): μ(|x|e) = μ(x)χ_[0,τ(e)), μ_t(|x|e^⊥) = μ_{t+τ(e)}(x)
    let mut cuts: Vec<f64> = sx
        .windows(2)
        .filter(|w| w[0] - w[1] > SPECTRAL_TOL * scale)
        .map(|w| 0.5 * (w[0] + w[1]))
        .collect();
    cuts.push(1.1 * sx[0]);
    for v in cuts {
        let e = spectral_projection(&abs_x, v, Side::Above).expect("|x| is positive");
        let rank = e.trace().re.round() as usize;
        let s_e = abs_x.mul(&e).singular_values_cut(RANK_CUTOFF);
        let s_perp = abs_x
            .mul(&MatrixObservable::identity(n).sub(&e))
            .singular_values_cut(RANK_CUTOFF);
        for k in 0..n {
            let want_e = if k < rank { sx[k] } else { 0.0 };
            out.extend(eq_scaled(
                case,
                format!("e':mu_{k}(|x|e)@{v:.4e}"),
                s_e[k],
                want_e,
                scale,
            ));
            let want_perp = sx.get(k + rank).copied().unwrap_or(0.0);
            out.extend(eq_scaled(
                case,
                format!("f':mu_{k}(|x|e_perp)@{v:.4e}"),
                s_perp[k],
                want_perp,
                scale,
            ));
        }
    }
    out
}

/// Randomized check of the distribution and rearrangement properties on
/// complex Gaussian matrices of size 2 to 8. Margins of singular-value
/// comparisons are measured relative to the largest singular value
/// involved; those above `tol` are violations.
pub fn check_rearrangement_properties(seed: u64, cases: usize, tol: f64) -> SuiteReport {
    let start = Instant::now();
    let ids: Vec<usize> = (0..cases).collect();
    let found = par::map(&ids, |_, &case| rearrangement_case(seed, case));
    let mut report = SuiteReport::new("rearrangement-props", seed, cases, tol);
    report.constants.insert("rank_cutoff".into(), RANK_CUTOFF);
    for v in found {
        report.extend(v);
    }
    report.runtime_ms = start.elapsed().as_millis() as u64;
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDomination {
    pub holds: bool,
    /// Smallest eigenvalue of `2(exe + e^⊥xe^⊥) - x`.
    pub min_eigenvalue: f64,
}

/// `x <= 2(exe + e^⊥ x e^⊥)`, holding when the smallest eigenvalue of the
/// difference is at least `-1e-10 ‖x‖`.
pub fn projection_domination_check(x: &MatrixObservable, e: &MatrixObservable) -> Result<ProjectionDomination> {
    if !x.is_hermitian() || !e.is_hermitian() {
        return Err(Error::Matrix("x and e must be hermitian".into()));
    }
    let perp = MatrixObservable::identity(x.n()).sub(e);
    let pinched = e.mul(x).mul(e).add(&perp.mul(x).mul(&perp));
    let diff = MatrixObservable::wrap_hermitian(pinched.scale(C64::new(2.0, 0.0)).sub(x).entries().clone());
    let min_eigenvalue = diff.min_eigenvalue()?;
    Ok(ProjectionDomination {
        holds: min_eigenvalue >= -1e-10 * x.op_norm(),
        min_eigenvalue,
    })
}

/// The splitting step for `T = E_P` and `e_v = e^x[0, v]`:
/// `d(2v; Tx) <= d(2v; T(2x e_v)) + d(2v; T(2x e_v^⊥))`, returned as
/// `(σ_{k+1}(Tx), 2v)` with `k` the right side, so it holds iff the first
/// entry is at most the second.
pub fn splitting_check(x: &MatrixObservable, partition: &Partition, v: f64) -> Result<(f64, f64)> {
    let e = spectral_projection(x, v, Side::AtOrBelow)?;
    let perp = MatrixObservable::identity(x.n()).sub(&e);
    let two = C64::new(2.0, 0.0);
    let low = pinch(&x.mul(&e).scale(two), partition)?;
    let high = pinch(&x.mul(&perp).scale(two), partition)?;
    let k = distribution_nc(&low, 2.0 * v)? + distribution_nc(&high, 2.0 * v)?;
    let s = pinch(x, partition)?.singular_values_cut(RANK_CUTOFF);
    Ok((s.get(k).copied().unwrap_or(0.0), 2.0 * v))
}

/// `(d(v; x), v^{-q} ‖x‖_q^q)`.
pub fn chebyshev_check(x: &MatrixObservable, q: f64, v: f64) -> Result<(f64, f64)> {
    crate::error::check(q > 0.0 && q.is_finite(), "exponent q", "in (0, ∞)", q)?;
    crate::error::check(v > 0.0, "level v", "> 0", v)?;
    let d = distribution_nc(x, v)? as f64;
    let moment: f64 = x.singular_values_cut(RANK_CUTOFF).iter().map(|s| s.powf(q)).sum();
    Ok((d, moment / v.powf(q)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntiBoundedReport {
    pub space: String,
    /// Largest `‖x‖_E / ‖E(x)‖_E`, traces normalized.
    pub max_ratio: f64,
    pub used: usize,
    /// Samples with `E(x) = 0`.
    pub skipped: usize,
    pub violations: Vec<Violation>,
}

/// Records `‖x‖_E / ‖E_P(x)‖_E` under the normalized trace `Tr / n`; on
/// `L^p` targets ratios above `2^{1/p}` are listed as violations.
pub fn anti_bounded_check(
    space: &SpaceSpec,
    partition: &Partition,
    samples: &[MatrixObservable],
) -> Result<AntiBoundedReport> {
    let idx = space.boyd_indices(&IndexGrid::default());
    if !(idx.upper < 1.0) {
        return Err(Error::Window(format!("q_E < 1, got q_E = {}", idx.upper)));
    }
    let bound = space.lebesgue_exponent().map(ANTI_BOUNDED_CONSTANT);
    let ratios = par::map(samples, |_, x| -> Result<Option<f64>> {
        let w = 1.0 / x.n() as f64;
        let ex = pinch(x, partition)?;
        let den = space.norm(&singular_step_with(&ex, RANK_CUTOFF, w));
        if !(den > 0.0) {
            return Ok(None);
        }
        Ok(Some(space.norm(&singular_step_with(x, RANK_CUTOFF, w)) / den))
    });
    let mut report = AntiBoundedReport {
        space: space.to_string(),
        max_ratio: 0.0,
        used: 0,
        skipped: 0,
        violations: Vec::new(),
    };
    for (i, r) in ratios.into_iter().enumerate() {
        match r? {
            None => report.skipped += 1,
            Some(r) => {
                report.used += 1;
                report.max_ratio = report.max_ratio.max(r);
                if let Some(b) = bound {
                    report.violations.extend(le(i, "anti-bounded", r, b));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rearrangement_suite_small() {
        let r = check_rearrangement_properties(9, 40, SPECTRAL_TOL);
        assert!(r.passes(), "{:?}", r.violations.first());
    }

    #[test]
    fn equal_diagonal_subadditivity() {
        let x = MatrixObservable::diag(&[2.0, 1.0]).unwrap();
        let s2 = x.add(&x).singular_values();
        // d(v + w; 2x) = d(v; x) + d(w; x) fails only at the boundary v = w = 1
        let k = distribution_nc(&x, 1.0).unwrap() * 2;
        assert_eq!(k, 2);
        assert!(s2.get(k).copied().unwrap_or(0.0) <= 2.0);
        let k = distribution_nc(&x, 0.5).unwrap() * 2;
        assert_eq!(k, 4);
        assert_eq!(distribution_nc(&x.add(&x), 1.0).unwrap(), 2);
    }

    #[test]
    fn projection_domination_examples() {
        let x = MatrixObservable::from_real(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let e = MatrixObservable::diag(&[1.0, 0.0]).unwrap();
        let r = projection_domination_check(&x, &e).unwrap();
        assert!(r.holds && r.min_eigenvalue.abs() < 1e-14);
        let d = MatrixObservable::diag(&[3.0, 1.0, 2.0]).unwrap();
        let r = projection_domination_check(&d, &MatrixObservable::diag(&[0.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!(r.holds && (r.min_eigenvalue - 1.0).abs() < 1e-14);
        let mut rng = case_rng(10, 0);
        for _ in 0..50 {
            let n = random::dimension(&mut rng);
            let r = projection_domination_check(&random::psd(&mut rng, n), &random::projection(&mut rng, n)).unwrap();
            assert!(r.holds);
        }
    }

    #[test]
    fn splitting_and_chebyshev() {
        let mut rng = case_rng(11, 0);
        for _ in 0..50 {
            let n = 4;
            let x = random::psd(&mut rng, n);
            let p = Partition::consecutive(n, 2).unwrap();
            for v in x.singular_values().into_iter().filter(|&v| v > 1e-8) {
                let (lhs, rhs) = splitting_check(&x, &p, 0.7 * v).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-12));
                let (d, bound) = chebyshev_check(&x, 3.0, 0.9 * v).unwrap();
                assert!(d <= bound);
            }
        }
    }

    #[test]
    fn anti_bounded() {
        let mut rng = case_rng(12, 0);
        let half = SpaceSpec::lp(0.5).unwrap();
        let p = Partition::consecutive(4, 2).unwrap();
        let samples: Vec<_> = (0..100).map(|_| random::psd(&mut rng, 4)).collect();
        let r = anti_bounded_check(&half, &p, &samples).unwrap();
        assert!(r.max_ratio <= 1.0 + 1e-12 && r.violations.is_empty());
        let blocky = pinch(&samples[0], &p).unwrap();
        let r = anti_bounded_check(
            &half,
            &p,
            &[
                blocky,
                MatrixObservable::from_real(&[vec![0.0, 0.0, 1.0, 0.0], vec![0.0; 4], vec![0.0; 4], vec![0.0; 4]])
                    .unwrap(),
            ],
        )
        .unwrap();
        assert!((r.max_ratio - 1.0).abs() < 1e-12 && r.skipped == 1);
        assert!(anti_bounded_check(&SpaceSpec::lp(2.0).unwrap(), &p, &samples).is_err());
    }
}
