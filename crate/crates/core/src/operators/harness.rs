//! Checks of weak-type estimates and of the Boyd-type theorems on concrete
//! operators and sample functions.

use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::operators::calderon::{calderon, calderon_curve};
use crate::operators::curve::geometric;
use crate::operators::handle::{Image, OperatorHandle};
use crate::operators::theta::theta_distribution;
use crate::par;
use crate::report::{le, Violation};
use crate::spaces::{delta2_check, matuszewska_indices, theta_norm_lr, IndexGrid, OrliczSpec, SpaceSpec};
use crate::stepfn::StepFunction;

/// Geometric points added to every level grid.
pub const GEOMETRIC_POINTS: usize = 64;

/// Union of the given levels, their midpoints, and a geometric grid over
/// `[min/10, max·10]`.
pub fn v_grid(levels: &[f64]) -> Vec<f64> {
    let mut ls: Vec<f64> = levels.iter().copied().filter(|v| v.is_finite() && *v > 0.0).collect();
    ls.sort_by(f64::total_cmp);
    ls.dedup();
    let (Some(&lo), Some(&hi)) = (ls.first(), ls.last()) else {
        return Vec::new();
    };
    let mut grid = ls.clone();
    grid.extend(ls.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    grid.extend(geometric(lo / 10.0, hi * 10.0, GEOMETRIC_POINTS));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn lr_norm(f: &StepFunction, r: f64) -> f64 {
    if r.is_infinite() {
        f.max_value()
    } else {
        f.integrate_power(r).expect("r > 0").powf(1.0 / r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub sample: usize,
    pub v: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeCertificate {
    pub operator: String,
    pub r: f64,
    /// Largest observed `v d(v; Tf)^{1/r} / ‖f‖_r`, a lower bound for `C_r`.
    pub constant: f64,
    /// Closed-form upper bound for `C_r`, when known.
    pub known: Option<f64>,
    /// `max(constant, known)`, the value used by the transfer checks.
    pub certified: f64,
    pub witnesses: Vec<Witness>,
    pub sample_count: usize,
}

const KEPT_WITNESSES: usize = 8;

/// Weak type `(r, r)` constant of `op` over the samples. Each ratio is
/// also taken with `d(v^-)` so jumps at the values of `Tf` are attained.
pub fn weak_type_certificate(op: &OperatorHandle, r: f64, samples: &[StepFunction]) -> Result<WeakTypeCertificate> {
    check(r > 0.0, "weak-type exponent r", "in (0, ∞]", r)?;
    let per_sample: Vec<Option<Witness>> = par::map(samples, |i, f| {
        let norm = lr_norm(f, r);
        if !(norm > 0.0) {
            return None;
        }
        let img = op.apply(f).ok()?;
        if r.is_infinite() {
            return Some(Witness {
                sample: i,
                v: img.sup(),
                ratio: img.sup() / norm,
            });
        }
        let mut levels = img.levels();
        if let Image::Curve(_) = img {
            // the power tail matters far below the smallest knot
            if let Some(&lo) = levels.first() {
                levels.push(lo * 1e-3);
            }
        }
        v_grid(&levels)
            .into_iter()
            .flat_map(|v| {
                let right = v * img.distribution(v).powf(1.0 / r) / norm;
                let left = v * img.distribution_left(v).powf(1.0 / r) / norm;
                [(v, right), (v, left)]
            })
            .filter(|(_, ratio)| ratio.is_finite())
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(v, ratio)| Witness { sample: i, v, ratio })
    });
    let sample_count = per_sample.iter().filter(|w| w.is_some()).count();
    let mut witnesses: Vec<Witness> = per_sample.into_iter().flatten().collect();
    witnesses.sort_by(|a, b| b.ratio.total_cmp(&a.ratio).then(a.sample.cmp(&b.sample)));
    let constant = witnesses.first().map_or(0.0, |w| w.ratio);
    witnesses.truncate(KEPT_WITNESSES);
    let known = op.known_weak_constant(r);
    Ok(WeakTypeCertificate {
        operator: op.to_string(),
        r,
        constant,
        known,
        certified: known.map_or(constant, |k| k.max(constant)),
        witnesses,
        sample_count,
    })
}

fn check_window(p: f64, q: f64, lower: f64, upper: f64, what: &str) -> Result<()> {
    let ok = p < lower && (q.is_infinite() || upper < q);
    if ok {
        Ok(())
    } else {
        Err(Error::Window(format!(
            "p < p_{what} <= q_{what} < q (or q = ∞), got p={p}, q={q}, indices ({lower}, {upper})"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoydReport {
    pub operator: String,
    pub space: String,
    pub p: f64,
    pub q: f64,
    /// `max{C_p, C_q}`.
    pub constant: f64,
    /// `‖Θ_{p,q}‖_{E→E}` when `E = L^r`.
    pub theta_bound: Option<f64>,
    /// Largest `‖Tf‖_E / ‖f‖_E`.
    pub max_ratio: f64,
    /// Largest `‖Θ_{p,q} f‖_E / ‖f‖_E`.
    pub max_theta_ratio: f64,
    /// `‖Tf‖_E / ‖f‖_E` per sample, 0 for the zero function.
    pub ratios: Vec<f64>,
    pub samples: usize,
    pub grid_points: usize,
    pub violations: Vec<Violation>,
}

/// Checks, for every sample, the level-set transfer
/// `d(2Cv; Tf) <= d(v; Θ_{p,q} f)` on the level grid and the norm chain
/// `‖Tf‖_E <= 2C ‖Θ_{p,q} μ(f)‖_E`. On `L^r` targets also
/// `‖Tf‖_{L^r} <= 2C ‖Θ_{p,q}‖ ‖f‖_{L^r}` with the closed-form operator norm.
pub fn verify_boyd_commutative(
    op: &OperatorHandle,
    p: f64,
    q: f64,
    space: &SpaceSpec,
    samples: &[StepFunction],
    c_p: f64,
    c_q: f64,
) -> Result<BoydReport> {
    let idx = space.boyd_indices(&IndexGrid::default());
    check_window(p, q, idx.lower, idx.upper, "E")?;
    let c = c_p.max(c_q);
    let theta_bound = space.lebesgue_exponent().map(|r| theta_norm_lr(p, q, r)).transpose()?;
    struct Case {
        violations: Vec<Violation>,
        ratio: f64,
        theta_ratio: f64,
        grid_points: usize,
    }
    let cases: Vec<Result<Case>> = par::map(samples, |i, f| {
        if f.is_zero() {
            return Ok(Case {
                violations: Vec::new(),
                ratio: 0.0,
                theta_ratio: 0.0,
                grid_points: 0,
            });
        }
        let img = op.apply(f)?;
        let dist = theta_distribution(f, p, q)?;
        let mut levels = f.distinct_values();
        levels.extend(img.levels().into_iter().map(|v| v / (2.0 * c)));
        let grid = v_grid(&levels);
        let mut violations: Vec<Violation> = grid
            .iter()
            .filter_map(|&v| {
                le(
                    i,
                    format!("transfer@v={v:.6e}"),
                    img.distribution(2.0 * c * v),
                    dist.eval(v),
                )
            })
            .collect();
        let norm_t = img.norm(space);
        let norm_f = space.norm(f);
        let theta_mu = theta_distribution(&f.rearrangement(), p, q)?.norm(space);
        violations.extend(le(i, "norm-chain", norm_t, 2.0 * c * theta_mu));
        if let Some(bound) = theta_bound {
            violations.extend(le(i, "theta-lr-bound", theta_mu, bound * norm_f * (1.0 + 1e-12)));
            violations.extend(le(i, "boyd-lr-bound", norm_t, 2.0 * c * bound * norm_f));
        }
        Ok(Case {
            violations,
            ratio: norm_t / norm_f,
            theta_ratio: theta_mu / norm_f,
            grid_points: grid.len(),
        })
    });
    let mut report = BoydReport {
        operator: op.to_string(),
        space: space.to_string(),
        p,
        q,
        constant: c,
        theta_bound,
        max_ratio: 0.0,
        max_theta_ratio: 0.0,
        ratios: Vec::with_capacity(samples.len()),
        samples: samples.len(),
        grid_points: 0,
        violations: Vec::new(),
    };
    for case in cases {
        let case = case?;
        report.max_ratio = report.max_ratio.max(case.ratio);
        report.ratios.push(case.ratio);
        report.max_theta_ratio = report.max_theta_ratio.max(case.theta_ratio);
        report.grid_points += case.grid_points;
        report.violations.extend(case.violations);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiMomentReport {
    pub operator: String,
    pub phi: String,
    /// Largest `∫Φ(Tf) / ∫Φ(f)`, the empirical moment constant.
    pub max_ratio: f64,
    /// Largest `∫Φ(Θ_{p,q} f) / ∫Φ(f)`.
    pub max_theta_ratio: f64,
    /// `∫Φ(Tf) / ∫Φ(f)` per sample, 0 for the zero function.
    pub ratios: Vec<f64>,
    pub samples: usize,
    pub violations: Vec<Violation>,
}

/// Records `∫Φ(Tf)/∫Φ(f)` and checks `∫Φ(Tf / 2C) <= ∫Φ(Θ_{p,q} f)`, which
/// the level-set transfer implies by integrating against `dΦ`.
pub fn verify_phi_moment(
    op: &OperatorHandle,
    p: f64,
    q: f64,
    phi: &OrliczSpec,
    samples: &[StepFunction],
    c_p: f64,
    c_q: f64,
) -> Result<PhiMomentReport> {
    let grid = IndexGrid::default();
    if !delta2_check(phi, &grid).holds {
        return Err(Error::Contract(format!("Φ = {phi} fails the global Δ₂ condition")));
    }
    let idx = matuszewska_indices(phi, &grid);
    check_window(p, q, idx.lower, idx.upper, "Φ")?;
    let c = c_p.max(c_q);
    let cases: Vec<Result<(f64, f64, Option<Violation>)>> = par::map(samples, |i, f| {
        let base = phi.moment(f);
        if !(base > 0.0) {
            return Ok((0.0, 0.0, None));
        }
        let img = op.apply(f)?;
        let theta = theta_distribution(f, p, q)?.moment(phi);
        let violation = le(i, "moment-transfer", img.moment(phi, 2.0 * c), theta);
        Ok((img.moment(phi, 1.0) / base, theta / base, violation))
    });
    let mut report = PhiMomentReport {
        operator: op.to_string(),
        phi: phi.to_string(),
        max_ratio: 0.0,
        max_theta_ratio: 0.0,
        ratios: Vec::with_capacity(samples.len()),
        samples: samples.len(),
        violations: Vec::new(),
    };
    for case in cases {
        let (ratio, theta_ratio, violation) = case?;
        report.max_ratio = report.max_ratio.max(ratio);
        report.ratios.push(ratio);
        report.max_theta_ratio = report.max_theta_ratio.max(theta_ratio);
        report.violations.extend(violation);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub operator: String,
    pub p: f64,
    pub q: f64,
    /// Largest `μ_t(Tf) / S_{p,q} μ(f)(t)`.
    pub constant: f64,
    pub samples: usize,
    pub violations: Vec<Violation>,
}

/// Times at which `μ(Tf)` is compared with `S_{p,q} μ(f)`: for step images
/// the start, middle and end (as a left limit) of each constant stretch,
/// for curves the piece ends, their midpoints and a geometric grid.
fn domination_points(img: &Image) -> Vec<(f64, f64)> {
    match img {
        Image::Step(g) => g
            .rearrangement()
            .pieces()
            .flat_map(|pc| [pc.start, 0.5 * (pc.start + pc.end), pc.end].map(|t| (t, pc.value)))
            .filter(|&(t, _)| t > 0.0)
            .collect(),
        Image::Curve(c) => {
            let mut ts: Vec<f64> = c
                .pieces
                .iter()
                .flat_map(|pc| [pc.end, 0.5 * (pc.start + pc.end)])
                .collect();
            let lo = c.pieces.first().map_or(c.tail.start, |pc| pc.end) * 1e-3;
            ts.extend(geometric(lo, c.tail.start.max(lo) * 100.0, 48));
            ts.into_iter()
                .filter(|&t| t > 0.0)
                .map(|t| (t, img.rearrangement_at(t)))
                .collect()
        }
    }
}

/// Records `μ_t(Tf) / S_{p,q} μ(f)(t)` over the samples; when `bound` is
/// given, ratios above it are violations.
pub fn calderon_domination_check(
    op: &OperatorHandle,
    p: f64,
    q: f64,
    samples: &[StepFunction],
    bound: Option<f64>,
) -> Result<DominationReport> {
    calderon(&StepFunction::indicator(1.0)?, p, q, 1.0)?;
    let cases: Vec<Result<(f64, Vec<Violation>)>> = par::map(samples, |i, f| {
        if f.is_zero() {
            return Ok((0.0, Vec::new()));
        }
        let img = op.apply(f)?;
        let mu = f.rearrangement();
        let mut worst = 0.0f64;
        let mut violations = Vec::new();
        for (t, mu_t) in domination_points(&img) {
            let s = calderon(&mu, p, q, t)?;
            let ratio = mu_t / s;
            worst = worst.max(ratio);
            if let Some(b) = bound {
                violations.extend(le(i, format!("domination@t={t:.6e}"), ratio, b));
            }
        }
        Ok((worst, violations))
    });
    let mut report = DominationReport {
        operator: op.to_string(),
        p,
        q,
        constant: 0.0,
        samples: samples.len(),
        violations: Vec::new(),
    };
    for case in cases {
        let (worst, violations) = case?;
        report.constant = report.constant.max(worst);
        report.violations.extend(violations);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub space: String,
    pub p: f64,
    pub q: f64,
    pub inside_window: bool,
    /// `sup ‖S_{p,q} f‖_E / ‖f‖_E` over the samples.
    pub sup_ratio: f64,
    /// At the `L^p` boundary: `(k, ‖(S_{p,q} f_k) χ_[0,1)‖ / ‖f_k‖)` for
    /// `f_k = χ_[0, 2^{-k})`. The full norms are infinite there.
    pub divergence: Vec<(u32, f64)>,
    pub strictly_increasing: Option<bool>,
}

/// Largest `k` in the divergence family.
pub const DIVERGENCE_STEPS: u32 = 20;

/// Boundedness of `S_{p,q}` on `E`: inside the Boyd window the sample
/// ratios; on `E = L^p` the windowed ratios along `χ_[0, 2^{-k})`, which
/// grow like `k ln 2`.
pub fn calderon_boundedness_probe(space: &SpaceSpec, p: f64, q: f64, samples: &[StepFunction]) -> Result<ProbeReport> {
    calderon(&StepFunction::indicator(1.0)?, p, q, 1.0)?;
    let idx = space.boyd_indices(&IndexGrid::default());
    let inside_window = p < idx.lower && (q.is_infinite() || idx.upper < q);
    let ratios: Vec<Result<f64>> = par::map(samples, |_, f| {
        if f.is_zero() {
            return Ok(0.0);
        }
        Ok(calderon_curve(f, p, q)?.norm(space) / space.norm(f))
    });
    let mut sup_ratio = 0.0f64;
    for r in ratios {
        sup_ratio = sup_ratio.max(r?);
    }
    let at_boundary = space.lebesgue_exponent() == Some(p);
    let mut divergence = Vec::new();
    if at_boundary {
        for k in 0..=DIVERGENCE_STEPS {
            let f = StepFunction::indicator(2f64.powi(-(k as i32)))?;
            let windowed = calderon_curve(&f, p, q)?.truncate(1.0).norm(space);
            divergence.push((k, windowed / space.norm(&f)));
        }
    }
    let strictly_increasing = at_boundary.then(|| divergence.windows(2).all(|w| w[1].1 > w[0].1));
    Ok(ProbeReport {
        space: space.to_string(),
        p,
        q,
        inside_window,
        sup_ratio,
        divergence,
        strictly_increasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::random_steps;

    fn chi(a: f64) -> StepFunction {
        StepFunction::indicator(a).unwrap()
    }

    #[test]
    fn grid_contains_levels_and_midpoints() {
        let g = v_grid(&[1.0, 3.0, 3.0]);
        assert!(g.contains(&1.0) && g.contains(&3.0) && g.contains(&2.0));
        assert!(g.len() >= GEOMETRIC_POINTS);
        assert!((g[0] - 0.1).abs() < 1e-15 && (g[g.len() - 1] - 30.0).abs() < 1e-12);
        assert!(v_grid(&[]).is_empty());
    }

    #[test]
    fn certificates_of_trivial_operators() {
        let samples = random_steps(3, 40);
        for op in [OperatorHandle::Identity, OperatorHandle::Rearrange] {
            for r in [0.5, 1.0, 2.0, f64::INFINITY] {
                let cert = weak_type_certificate(&op, r, &samples).unwrap();
                assert!(cert.constant <= 1.0 + 1e-12, "{op} {r} {}", cert.constant);
                assert!((cert.certified - 1.0).abs() < 1e-12);
            }
            let cert = weak_type_certificate(&op, 2.0, &[chi(3.0)]).unwrap();
            assert!((cert.constant - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn hardy_weak_one_one() {
        let cert = weak_type_certificate(&OperatorHandle::Hardy, 1.0, &[chi(1.0), chi(0.25)]).unwrap();
        assert!((cert.constant - 1.0).abs() < 1e-12, "{}", cert.constant);
        let cert = weak_type_certificate(&OperatorHandle::Hardy, f64::INFINITY, &random_steps(5, 30)).unwrap();
        assert!(cert.constant <= 1.0 + 1e-12);
    }

    #[test]
    fn boyd_harness_examples() {
        let samples = random_steps(11, 30);
        let lorentz = SpaceSpec::lorentz(2.0, 2.0).unwrap();
        let rep =
            verify_boyd_commutative(&OperatorHandle::Hardy, 1.0, f64::INFINITY, &lorentz, &samples, 1.0, 1.0).unwrap();
        assert!(rep.violations.iter().all(|v| v.margin < 1e-12));
        // Hardy's inequality: ‖Af‖_2 <= 2 ‖f‖_2
        assert!(rep.max_ratio <= 2.0 && rep.max_ratio > 1.0);
        let id = verify_boyd_commutative(&OperatorHandle::Identity, 1.0, 4.0, &lorentz, &samples, 1.0, 1.0).unwrap();
        assert!(id.violations.iter().all(|v| v.margin < 1e-12));
        assert!((id.max_ratio - 1.0).abs() < 1e-12);
        let err = verify_boyd_commutative(&OperatorHandle::Hardy, 2.0, 4.0, &lorentz, &samples, 1.0, 1.0);
        assert!(matches!(err, Err(Error::Window(_))));
    }

    #[test]
    fn phi_moment_reduces_to_lr() {
        let samples = random_steps(12, 20);
        let r = 2.0;
        let rep = verify_phi_moment(
            &OperatorHandle::Hardy,
            1.0,
            f64::INFINITY,
            &OrliczSpec::power(r).unwrap(),
            &samples,
            1.0,
            1.0,
        )
        .unwrap();
        let lr = verify_boyd_commutative(
            &OperatorHandle::Hardy,
            1.0,
            f64::INFINITY,
            &SpaceSpec::lp(r).unwrap(),
            &samples,
            1.0,
            1.0,
        )
        .unwrap();
        assert!(rep.violations.iter().all(|v| v.margin < 1e-9));
        assert!((rep.max_ratio - lr.max_ratio.powf(r)).abs() < 1e-10 * rep.max_ratio);
        assert!(verify_phi_moment(&OperatorHandle::Hardy, 1.0, 4.0, &OrliczSpec::Exp, &samples, 1.0, 1.0).is_err());
    }

    #[test]
    fn domination_by_average() {
        let samples = random_steps(13, 30);
        for op in [OperatorHandle::Identity, OperatorHandle::Rearrange] {
            let rep = calderon_domination_check(&op, 1.0, f64::INFINITY, &samples, Some(1.0)).unwrap();
            assert!(rep.violations.iter().all(|v| v.margin < 1e-12), "{op}");
            assert!((rep.constant - 1.0).abs() < 1e-12);
        }
        let rep = calderon_domination_check(&OperatorHandle::Hardy, 1.0, f64::INFINITY, &samples, None).unwrap();
        assert!(rep.constant.is_finite() && rep.constant > 0.0);
    }

    #[test]
    fn probe_divergence_at_l1() {
        let samples = random_steps(14, 5);
        let q = 2.0;
        let rep = calderon_boundedness_probe(&SpaceSpec::lp(1.0).unwrap(), 1.0, q, &samples).unwrap();
        assert!(!rep.inside_window);
        assert_eq!(rep.strictly_increasing, Some(true));
        for &(k, ratio) in &rep.divergence {
            let want = 1.0 + q / (q - 1.0) + k as f64 * 2f64.ln();
            assert!((ratio - want).abs() < 1e-10 * want, "{k}: {ratio} vs {want}");
        }
        let inside = calderon_boundedness_probe(&SpaceSpec::lp(2.0).unwrap(), 1.0, 4.0, &samples).unwrap();
        assert!(inside.inside_window && inside.sup_ratio.is_finite());
        assert!(inside.divergence.is_empty());
    }
}
