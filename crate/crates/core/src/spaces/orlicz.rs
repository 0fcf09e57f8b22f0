//! Young functions from a small parametric family, the Luxemburg norm, and
//! grid estimates of the Matuszewska-Orlicz indices and the Δ₂ condition.

use std::f64::consts::E;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::stepfn::StepFunction;

/// Relative tolerance of the Luxemburg bisection.
pub const LUXEMBURG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum OrliczSpec {
    /// `Φ(t) = t^p`; convex for `p >= 1`.
    Power { p: f64 },
    /// `Φ(t) = t^p log(e + t)^a`; convex for `p >= 1`, `a >= 0`.
    PowerLog { p: f64, a: f64 },
    /// `Φ(t) = max(t^p, t^q)`; convex when both exponents are `>= 1`.
    MaxPower { p: f64, q: f64 },
    /// `Φ(t) = e^t - 1`; convex, fails Δ₂.
    Exp,
}

impl OrliczSpec {
    pub fn power(p: f64) -> Result<Self> {
        check(p > 0.0 && p.is_finite(), "Orlicz exponent p", "> 0", p)?;
        Ok(Self::Power { p })
    }

    pub fn power_log(p: f64, a: f64) -> Result<Self> {
        check(p > 0.0 && p.is_finite(), "Orlicz exponent p", "> 0", p)?;
        check(a >= 0.0 && a.is_finite(), "log exponent a", ">= 0", a)?;
        Ok(Self::PowerLog { p, a })
    }

    pub fn max_power(p: f64, q: f64) -> Result<Self> {
        check(p > 0.0 && p.is_finite(), "Orlicz exponent p", "> 0", p)?;
        check(q > 0.0 && q.is_finite(), "Orlicz exponent q", "> 0", q)?;
        Ok(Self::MaxPower { p, q })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Power { p } => Self::power(p).map(drop),
            Self::PowerLog { p, a } => Self::power_log(p, a).map(drop),
            Self::MaxPower { p, q } => Self::max_power(p, q).map(drop),
            Self::Exp => Ok(()),
        }
    }

    pub fn is_convex(&self) -> bool {
        match *self {
            Self::Power { p } => p >= 1.0,
            Self::PowerLog { p, a } => p >= 1.0 && a >= 0.0,
            Self::MaxPower { p, q } => p.min(q) >= 1.0,
            Self::Exp => true,
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            Self::Power { p } => t.powf(p),
            Self::PowerLog { p, a } => t.powf(p) * (E + t).ln().powf(a),
            Self::MaxPower { p, q } => t.powf(p).max(t.powf(q)),
            Self::Exp => t.exp_m1(),
        }
    }

    /// `Φ'(t)`; the right derivative at the kink of `MaxPower`.
    pub fn dphi(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return match *self {
                Self::Exp => 1.0,
                _ => 0.0,
            };
        }
        match *self {
            Self::Power { p } => p * t.powf(p - 1.0),
            Self::PowerLog { p, a } => {
                let l = (E + t).ln();
                p * t.powf(p - 1.0) * l.powf(a) + a * t.powf(p) * l.powf(a - 1.0) / (E + t)
            }
            Self::MaxPower { p, q } => {
                let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
                if t < 1.0 {
                    lo * t.powf(lo - 1.0)
                } else {
                    hi * t.powf(hi - 1.0)
                }
            }
            Self::Exp => t.exp(),
        }
    }

    /// `ln Φ(t)` without overflow.
    pub fn ln_phi(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let lt = t.ln();
        match *self {
            Self::Power { p } => p * lt,
            Self::PowerLog { p, a } => p * lt + a * (E + t).ln().ln(),
            Self::MaxPower { p, q } => (p * lt).max(q * lt),
            Self::Exp => {
                if t < 30.0 {
                    t.exp_m1().ln()
                } else {
                    t + (-(-t).exp()).ln_1p()
                }
            }
        }
    }

    /// `ln(t Φ'(t) / Φ(t))` without overflow.
    pub fn ln_elasticity(&self, t: f64) -> f64 {
        match *self {
            Self::Exp if t >= 30.0 => t.ln() + t - self.ln_phi(t),
            _ => (t * self.dphi(t) / self.phi(t)).ln(),
        }
    }

    /// Power-law growth exponents of `Φ` at `0` and at `∞`; `Exp` grows
    /// faster than any power at infinity.
    pub fn growth_exponents(&self) -> (f64, f64) {
        match *self {
            Self::Power { p } | Self::PowerLog { p, .. } => (p, p),
            Self::MaxPower { p, q } => (p.min(q), p.max(q)),
            Self::Exp => (1.0, f64::INFINITY),
        }
    }

    /// `∫ Φ(f)`, the exact finite sum `Σ Φ(v_i) |I_i|`.
    pub fn moment(&self, f: &StepFunction) -> f64 {
        f.pieces()
            .filter(|piece| piece.value > 0.0)
            .map(|piece| self.phi(piece.value) * piece.len())
            .sum()
    }

    /// `inf{k > 0 : ∫ Φ(f/k) <= 1}` by bracketed bisection in `ln k`.
    pub fn luxemburg_norm(&self, f: &StepFunction) -> Result<f64> {
        if f.is_zero() {
            return Ok(0.0);
        }
        let modular = |k: f64| -> f64 {
            f.pieces()
                .filter(|piece| piece.value > 0.0)
                .map(|piece| self.phi(piece.value / k) * piece.len())
                .sum()
        };
        luxemburg_solve(modular, f.max_value())
    }
}

/// Solves `modular(k) = 1` for a nonincreasing modular, starting the
/// bracket search at `k0`.
pub(crate) fn luxemburg_solve(modular: impl Fn(f64) -> f64, k0: f64) -> Result<f64> {
    let mut lo = k0;
    let mut hi = k0;
    let mut guard = 0;
    while modular(hi) > 1.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 || !hi.is_finite() {
            return Err(Error::Numerical(
                "Luxemburg bracket expansion failed: modular never drops to 1".into(),
            ));
        }
    }
    guard = 0;
    while modular(lo) <= 1.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 2000 || lo == 0.0 {
            return Err(Error::Numerical(
                "Luxemburg bracket expansion failed: modular never exceeds 1".into(),
            ));
        }
    }
    // modular(lo) > 1 >= modular(hi)
    while hi - lo > LUXEMBURG_TOL * hi * 0.25 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

impl fmt::Display for OrliczSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Power { p } => write!(f, "power:{p}"),
            Self::PowerLog { p, a } => write!(f, "powerlog:{p},{a}"),
            Self::MaxPower { p, q } => write!(f, "maxpower:{p},{q}"),
            Self::Exp => write!(f, "exp"),
        }
    }
}

/// Log-spaced grid used by the index and Δ₂ estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexGrid {
    pub s_lo: f64,
    pub s_hi: f64,
    pub s_points: usize,
    pub lower_window: (f64, f64),
    pub upper_window: (f64, f64),
    pub window_points: usize,
}

impl Default for IndexGrid {
    fn default() -> Self {
        Self {
            s_lo: 1e-6,
            s_hi: 1e6,
            s_points: 241,
            lower_window: (1e-6, 1e-3),
            upper_window: (1e3, 1e6),
            window_points: 31,
        }
    }
}

impl IndexGrid {
    /// Overrides the `s` grid from `"lo,hi,points"`.
    pub fn with_s_grid(mut self, spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        let bad = |token: &str, reason: &str| Error::Parse {
            token: token.to_string(),
            reason: reason.to_string(),
        };
        if parts.len() != 3 {
            return Err(bad(spec, "expected lo,hi,points"));
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad(parts[0], "not a number"))?;
        let hi: f64 = parts[1].parse().map_err(|_| bad(parts[1], "not a number"))?;
        let n: usize = parts[2].parse().map_err(|_| bad(parts[2], "not an integer"))?;
        if !(lo > 0.0 && hi > lo && n >= 2) {
            return Err(bad(spec, "need 0 < lo < hi and points >= 2"));
        }
        self.s_lo = lo;
        self.s_hi = hi;
        self.s_points = n;
        Ok(self)
    }

    pub fn s_values(&self) -> Vec<f64> {
        log_space(self.s_lo, self.s_hi, self.s_points)
    }
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `ln M_Φ(t)` with `M_Φ(t) = sup_s Φ(ts)/Φ(s)` over the grid.
pub fn ln_dilation_function(phi: &OrliczSpec, t: f64, s_grid: &[f64]) -> f64 {
    s_grid
        .iter()
        .map(|&s| phi.ln_phi(t * s) - phi.ln_phi(s))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatuszewskaEstimate {
    pub lower: f64,
    /// `+∞` when `M_Φ` overflowed on the upper window.
    pub upper: f64,
    pub lower_residual: f64,
    pub upper_residual: f64,
}

/// Least-squares slope of `ln M_Φ(t)` against `ln t` on each window.
pub fn matuszewska_indices(phi: &OrliczSpec, grid: &IndexGrid) -> MatuszewskaEstimate {
    let s = grid.s_values();
    let fit = |window: (f64, f64)| -> (f64, f64) {
        let ts = log_space(window.0, window.1, grid.window_points);
        let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| ln_dilation_function(phi, t, &s)).collect();
        if ys.iter().any(|&y| !y.is_finite() || y > f64::MAX.ln()) {
            return (f64::INFINITY, f64::INFINITY);
        }
        least_squares_slope(&xs, &ys)
    };
    let (lower, lower_residual) = fit(grid.lower_window);
    let (upper, upper_residual) = fit(grid.upper_window);
    MatuszewskaEstimate {
        lower,
        upper,
        lower_residual,
        upper_residual,
    }
}

/// Slope and RMS residual of the least-squares line through `(x, y)`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    (slope, (rss / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delta2Report {
    pub holds: bool,
    /// `sup Φ(2t)/Φ(t)` over the grid (`+∞` on overflow).
    pub constant: f64,
    /// `sup tΦ'(t)/Φ(t)` over the grid (`+∞` on overflow).
    pub derivative_sup: f64,
}

/// Grid check of `sup Φ(2t)/Φ(t) < ∞` and `sup tΦ'(t)/Φ(t) < ∞`. A
/// supremum counts as unbounded when its maximum over the first or last
/// decade of the grid exceeds the maximum over the rest of the grid.
pub fn delta2_check(phi: &OrliczSpec, grid: &IndexGrid) -> Delta2Report {
    let ts = grid.s_values();
    let doubling: Vec<f64> = ts
        .iter()
        .map(|&t| (phi.ln_phi(2.0 * t) - phi.ln_phi(t)).exp())
        .collect();
    let elasticity: Vec<f64> = ts.iter().map(|&t| phi.ln_elasticity(t).exp()).collect();
    let (c_bounded, constant) = bounded_on_grid(&ts, &doubling);
    let (d_bounded, derivative_sup) = bounded_on_grid(&ts, &elasticity);
    Delta2Report {
        holds: c_bounded && d_bounded,
        constant,
        derivative_sup,
    }
}

fn bounded_on_grid(ts: &[f64], ys: &[f64]) -> (bool, f64) {
    let sup = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !sup.is_finite() {
        return (false, f64::INFINITY);
    }
    let lo_edge = ts[0] * 10.0;
    let hi_edge = ts[ts.len() - 1] / 10.0;
    let mut interior = f64::NEG_INFINITY;
    let mut edges = f64::NEG_INFINITY;
    for (&t, &y) in ts.iter().zip(ys) {
        if t < lo_edge || t > hi_edge {
            edges = edges.max(y);
        } else {
            interior = interior.max(y);
        }
    }
    let bounded = edges <= interior * (1.0 + 1e-9);
    (bounded, sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luxemburg_examples() {
        let chi4 = StepFunction::indicator(4.0).unwrap();
        let n = OrliczSpec::power(2.0).unwrap().luxemburg_norm(&chi4).unwrap();
        assert!((n - 2.0).abs() < 1e-11);
        let f = StepFunction::constant(3.0, 5.0).unwrap();
        let n = OrliczSpec::power(1.0).unwrap().luxemburg_norm(&f).unwrap();
        assert!((n - 15.0).abs() < 1e-10);
        // (e^{1/k} - 1) = 1  ⇒  k = 1/ln 2
        let chi1 = StepFunction::indicator(1.0).unwrap();
        let n = OrliczSpec::Exp.luxemburg_norm(&chi1).unwrap();
        assert!((n - 1.0 / 2f64.ln()).abs() < 1e-11, "{n}");
        assert_eq!(OrliczSpec::Exp.luxemburg_norm(&StepFunction::zero()).unwrap(), 0.0);
    }

    #[test]
    fn moment_examples() {
        let f = StepFunction::constant(2.0, 3.0).unwrap();
        assert_eq!(OrliczSpec::power(2.0).unwrap().moment(&f), 12.0);
        let chi1 = StepFunction::indicator(1.0).unwrap();
        assert!((OrliczSpec::Exp.moment(&chi1) - (E - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let families = [
            OrliczSpec::power(2.5).unwrap(),
            OrliczSpec::power_log(1.5, 2.0).unwrap(),
            OrliczSpec::max_power(1.0, 3.0).unwrap(),
            OrliczSpec::Exp,
        ];
        for phi in families {
            for t in [0.3, 0.7, 2.0, 5.0] {
                let h = 1e-6 * t;
                let fd = (phi.phi(t + h) - phi.phi(t - h)) / (2.0 * h);
                assert!((fd - phi.dphi(t)).abs() < 1e-6 * fd.abs().max(1.0), "{phi} at {t}");
                assert!((phi.ln_phi(t) - phi.phi(t).ln()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matuszewska_power_family() {
        for p in [0.5, 1.0, 2.0, 4.0] {
            let est = matuszewska_indices(&OrliczSpec::power(p).unwrap(), &IndexGrid::default());
            assert!((est.lower - p).abs() < 1e-9 && (est.upper - p).abs() < 1e-9, "{est:?}");
            assert!(est.lower_residual < 1e-9 && est.upper_residual < 1e-9);
        }
    }

    #[test]
    fn matuszewska_exp_is_infinite() {
        let est = matuszewska_indices(&OrliczSpec::Exp, &IndexGrid::default());
        assert!(est.upper.is_infinite());
        assert!((est.lower - 1.0).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn delta2_examples() {
        let grid = IndexGrid::default();
        let r = delta2_check(&OrliczSpec::power(3.0).unwrap(), &grid);
        assert!(r.holds);
        assert!((r.constant - 8.0).abs() < 1e-9 && (r.derivative_sup - 3.0).abs() < 1e-9);
        let r = delta2_check(&OrliczSpec::Exp, &grid);
        assert!(!r.holds);
        let r = delta2_check(&OrliczSpec::power_log(1.0, 1.0).unwrap(), &grid);
        assert!(r.holds, "{r:?}");
        let direct = grid
            .s_values()
            .iter()
            .map(|&t| 2.0 * (E + 2.0 * t).ln() / (E + t).ln())
            .fold(0.0, f64::max);
        assert!((r.constant - direct).abs() < 1e-12 * direct, "{r:?}");
        assert!(r.derivative_sup.is_finite() && r.derivative_sup < 2.0);
    }

    #[test]
    fn grid_override() {
        let g = IndexGrid::default().with_s_grid("1e-3, 1e3, 61").unwrap();
        assert_eq!(g.s_values().len(), 61);
        assert!(IndexGrid::default().with_s_grid("1,0.5,3").is_err());
        assert!(IndexGrid::default().with_s_grid("a,b").is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(OrliczSpec::power(0.0).is_err());
        assert!(OrliczSpec::power_log(2.0, -1.0).is_err());
        assert!(OrliczSpec::max_power(1.0, f64::NAN).is_err());
    }
}
