//! Concrete symmetric (quasi-)Banach function spaces on the half line and
//! their Boyd indices.

mod orlicz;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[allow(unused_imports)]
pub(crate) use orlicz::luxemburg_solve;
pub use orlicz::{
    delta2_check, least_squares_slope, ln_dilation_function, log_space, matuszewska_indices, Delta2Report, IndexGrid,
    MatuszewskaEstimate, OrliczSpec, LUXEMBURG_TOL,
};

use crate::error::{check, Error, Result};
use crate::stepfn::StepFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "kebab-case")]
pub enum SpaceSpec {
    Lp {
        p: f64,
    },
    /// `q = ∞` selects the supremum form, which coincides with weak `L^p`.
    Lorentz {
        p: f64,
        q: f64,
    },
    WeakLp {
        p: f64,
    },
    Orlicz {
        phi: OrliczSpec,
    },
}

impl SpaceSpec {
    pub fn lp(p: f64) -> Result<Self> {
        check(p > 0.0 && p.is_finite(), "Lebesgue exponent p", "> 0", p)?;
        Ok(Self::Lp { p })
    }

    pub fn lorentz(p: f64, q: f64) -> Result<Self> {
        check(p > 0.0 && p.is_finite(), "Lorentz exponent p", "> 0", p)?;
        check(q > 0.0, "Lorentz exponent q", "in (0, ∞]", q)?;
        Ok(Self::Lorentz { p, q })
    }

    pub fn weak_lp(p: f64) -> Result<Self> {
        check(p > 0.0 && p.is_finite(), "weak-L^p exponent p", "> 0", p)?;
        Ok(Self::WeakLp { p })
    }

    pub fn orlicz(phi: OrliczSpec) -> Result<Self> {
        phi.validate()?;
        Ok(Self::Orlicz { phi })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Lp { p } => Self::lp(p).map(drop),
            Self::Lorentz { p, q } => Self::lorentz(p, q).map(drop),
            Self::WeakLp { p } => Self::weak_lp(p).map(drop),
            Self::Orlicz { phi } => phi.validate(),
        }
    }

    /// Whether the formula used here is a genuine norm (triangle inequality
    /// with constant 1).
    pub fn is_banach(&self) -> bool {
        match *self {
            Self::Lp { p } => p >= 1.0,
            Self::Lorentz { p, q } => q >= 1.0 && q <= p,
            Self::WeakLp { .. } => false,
            Self::Orlicz { phi } => phi.is_convex(),
        }
    }

    /// The `L^r` exponent when the space is `L^r` (including `L^{r,r}`).
    pub fn lebesgue_exponent(&self) -> Option<f64> {
        match *self {
            Self::Lp { p } => Some(p),
            Self::Lorentz { p, q } if p == q => Some(p),
            Self::Orlicz {
                phi: OrliczSpec::Power { p },
            } if p >= 1.0 => None,
            _ => None,
        }
    }

    /// `‖f‖_E` for a step function.
    pub fn norm(&self, f: &StepFunction) -> f64 {
        if f.is_zero() {
            return 0.0;
        }
        match *self {
            Self::Lp { p } => lp_norm(f, p),
            Self::Lorentz { p, q } if q.is_infinite() => weak_norm(f, p),
            Self::Lorentz { p, q } => lorentz_norm(f, p, q),
            Self::WeakLp { p } => weak_norm(f, p),
            Self::Orlicz { phi } => phi
                .luxemburg_norm(f)
                .expect("modular of a nonzero step function crosses 1"),
        }
    }

    pub fn boyd_indices(&self, grid: &IndexGrid) -> BoydIndices {
        match *self {
            Self::Lp { p } | Self::Lorentz { p, .. } | Self::WeakLp { p } => BoydIndices {
                lower: p,
                upper: p,
                method: IndexMethod::Analytic,
            },
            Self::Orlicz { phi } => {
                let est = matuszewska_indices(&phi, grid);
                BoydIndices {
                    lower: est.lower,
                    upper: est.upper,
                    method: IndexMethod::MatuszewskaFit {
                        lower_residual: est.lower_residual,
                        upper_residual: est.upper_residual,
                    },
                }
            }
        }
    }

    /// Indices of the `r`-concavification `E_(r)` or `r`-convexification
    /// `E^(r)`.
    pub fn convexified_indices(&self, r: f64, direction: Convexity, grid: &IndexGrid) -> Result<(f64, f64)> {
        check(r >= 1.0 && r.is_finite(), "r", ">= 1", r)?;
        let b = self.boyd_indices(grid);
        Ok(match direction {
            Convexity::Concavify => (b.lower / r, b.upper / r),
            Convexity::Convexify => (b.lower * r, b.upper * r),
        })
    }

    /// `max_f ‖D_a f‖_E / ‖f‖_E` over the samples, a lower bound for
    /// `‖D_a‖_{E→E}`.
    pub fn dilation_norm_bound(&self, a: f64, samples: &[StepFunction]) -> Result<f64> {
        check(a > 0.0 && a.is_finite(), "dilation factor a", "> 0", a)?;
        let mut best: Option<f64> = None;
        for f in samples.iter().filter(|f| !f.is_zero()) {
            let ratio = self.norm(&f.dilate(a)?) / self.norm(f);
            best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
        }
        best.ok_or(Error::ZeroFunction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convexity {
    Concavify,
    Convexify,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum IndexMethod {
    Analytic,
    MatuszewskaFit { lower_residual: f64, upper_residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoydIndices {
    pub lower: f64,
    pub upper: f64,
    pub method: IndexMethod,
}

impl fmt::Display for BoydIndices {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.method {
            IndexMethod::Analytic => write!(f, "({}, {}) analytic", self.lower, self.upper),
            IndexMethod::MatuszewskaFit {
                lower_residual,
                upper_residual,
            } => write!(
                f,
                "({:.6}, {:.6}) matuszewska-fit ± ({:.2e}, {:.2e})",
                self.lower, self.upper, lower_residual, upper_residual
            ),
        }
    }
}

/// `‖Θ_{p,q}‖_{L^r→L^r} = (p/(r-p) + q/(q-r))^{1/r}` for `0 < p < r < q <= ∞`.
pub fn theta_norm_lr(p: f64, q: f64, r: f64) -> Result<f64> {
    if !(p > 0.0 && p < r && r < q && r.is_finite()) {
        return Err(Error::Window(format!("0 < p < r < q, got p={p}, r={r}, q={q}")));
    }
    let upper = if q.is_infinite() { 1.0 } else { q / (q - r) };
    Ok((p / (r - p) + upper).powf(1.0 / r))
}

fn lp_norm(f: &StepFunction, p: f64) -> f64 {
    f.integrate_power(p).expect("p > 0").powf(1.0 / p)
}

/// `(∫ t^{q/p-1} μ_t^q dt)^{1/q}`, integrated in closed form on each
/// constant interval of `μ(f)`.
fn lorentz_norm(f: &StepFunction, p: f64, q: f64) -> f64 {
    let e = q / p;
    let sum: f64 = f
        .rearrangement()
        .pieces()
        .map(|piece| piece.value.powf(q) * (piece.end.powf(e) - piece.start.powf(e)) / e)
        .sum();
    sum.powf(1.0 / q)
}

/// `sup_t t^{1/p} μ_t(f)`, attained in the limit at right endpoints.
fn weak_norm(f: &StepFunction, p: f64) -> f64 {
    f.rearrangement()
        .pieces()
        .map(|piece| piece.end.powf(1.0 / p) * piece.value)
        .fold(0.0, f64::max)
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Lp { p } => write!(f, "lp:{p}"),
            Self::Lorentz { p, q } if q.is_infinite() => write!(f, "lorentz:{p},inf"),
            Self::Lorentz { p, q } => write!(f, "lorentz:{p},{q}"),
            Self::WeakLp { p } => write!(f, "weak-lp:{p}"),
            Self::Orlicz { phi } => write!(f, "orlicz:{phi}"),
        }
    }
}

fn parse_number(token: &str) -> Result<f64> {
    let t = token.trim();
    match t {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        _ => t.parse().map_err(|_| Error::Parse {
            token: t.to_string(),
            reason: "expected a number".into(),
        }),
    }
}

fn parse_args<const N: usize>(args: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = args.split(',').collect();
    if parts.len() != N {
        return Err(Error::Parse {
            token: args.to_string(),
            reason: format!("expected {N} comma-separated parameter(s)"),
        });
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = parse_number(part)?;
    }
    Ok(out)
}

impl FromStr for OrliczSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, args) = s.split_once(':').unwrap_or((s, ""));
        match family.trim() {
            "power" => {
                let [p] = parse_args(args)?;
                Self::power(p)
            }
            "powerlog" => {
                let [p, a] = parse_args(args)?;
                Self::power_log(p, a)
            }
            "maxpower" => {
                let [p, q] = parse_args(args)?;
                Self::max_power(p, q)
            }
            "exp" if args.is_empty() => Ok(Self::Exp),
            other => Err(Error::Parse {
                token: other.to_string(),
                reason: "unknown Orlicz family (power, powerlog, maxpower, exp)".into(),
            }),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').ok_or_else(|| Error::Parse {
            token: s.to_string(),
            reason: "expected <kind>:<parameters>".into(),
        })?;
        match kind.trim() {
            "lp" => {
                let [p] = parse_args(args)?;
                Self::lp(p)
            }
            "lorentz" => {
                let [p, q] = parse_args(args)?;
                Self::lorentz(p, q)
            }
            "weak-lp" => {
                let [p] = parse_args(args)?;
                Self::weak_lp(p)
            }
            "orlicz" => Self::orlicz(args.parse()?),
            other => Err(Error::Parse {
                token: other.to_string(),
                reason: "unknown space (lp, lorentz, weak-lp, orlicz)".into(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(len: f64) -> StepFunction {
        StepFunction::indicator(len).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(SpaceSpec::lp(2.0).unwrap().norm(&chi(4.0)), 2.0);
        // ∫_0^4 t^{-1/2} dt = 4
        assert!((SpaceSpec::lorentz(2.0, 1.0).unwrap().norm(&chi(4.0)) - 4.0).abs() < 1e-14);
        assert_eq!(SpaceSpec::weak_lp(2.0).unwrap().norm(&chi(4.0)), 2.0);
        let orlicz = SpaceSpec::orlicz(OrliczSpec::power(2.0).unwrap()).unwrap();
        assert!((orlicz.norm(&chi(4.0)) - 2.0).abs() < 1e-11);
    }

    #[test]
    fn lorentz_indicator_formula() {
        for (p, q, a) in [(2.0f64, 1.0f64, 3.0f64), (3.0, 0.5, 0.25), (1.5, 4.0, 7.0)] {
            let expected = (p / q).powf(1.0 / q) * a.powf(1.0 / p);
            let got = SpaceSpec::lorentz(p, q).unwrap().norm(&chi(a));
            assert!((got - expected).abs() < 1e-13 * expected, "{p} {q} {a}");
        }
    }

    #[test]
    fn indices_examples() {
        let g = IndexGrid::default();
        let b = SpaceSpec::lorentz(3.0, 1.0).unwrap().boyd_indices(&g);
        assert_eq!((b.lower, b.upper, b.method), (3.0, 3.0, IndexMethod::Analytic));
        let b = SpaceSpec::lp(2.0).unwrap().boyd_indices(&g);
        assert_eq!((b.lower, b.upper), (2.0, 2.0));
        for p in [1.0, 2.5] {
            let b = SpaceSpec::orlicz(OrliczSpec::power(p).unwrap())
                .unwrap()
                .boyd_indices(&g);
            assert!((b.lower - p).abs() < 0.05 && (b.upper - p).abs() < 0.05);
        }
    }

    #[test]
    fn theta_norm_lr_examples() {
        assert!((theta_norm_lr(1.0, 4.0, 2.0).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!((theta_norm_lr(1.0, 3.0, 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(theta_norm_lr(1.0, 4.0, 1.0).is_err());
        assert!(theta_norm_lr(1.0, 4.0, 4.0).is_err());
        assert!((theta_norm_lr(1.0, f64::INFINITY, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn convexification_examples() {
        let g = IndexGrid::default();
        let lp2 = SpaceSpec::lp(2.0).unwrap();
        assert_eq!(
            lp2.convexified_indices(2.0, Convexity::Concavify, &g).unwrap(),
            (1.0, 1.0)
        );
        let lor = SpaceSpec::lorentz(4.0, 2.0).unwrap();
        assert_eq!(
            lor.convexified_indices(2.0, Convexity::Concavify, &g).unwrap(),
            (2.0, 2.0)
        );
        assert_eq!(
            lor.convexified_indices(1.0, Convexity::Convexify, &g).unwrap(),
            (4.0, 4.0)
        );
        assert_eq!(
            lp2.convexified_indices(3.0, Convexity::Convexify, &g).unwrap(),
            (6.0, 6.0)
        );
        assert!(lp2.convexified_indices(0.5, Convexity::Convexify, &g).is_err());
    }

    #[test]
    fn dilation_bound_examples() {
        let samples = vec![chi(1.0), StepFunction::from_pairs(&[(1.0, 3.0), (2.5, 1.0)]).unwrap()];
        for (p, a) in [(2.0, 3.0), (1.0, 0.5), (0.5, 7.0)] {
            let got = SpaceSpec::lp(p).unwrap().dilation_norm_bound(a, &samples).unwrap();
            assert!((got - a.powf(-1.0 / p)).abs() < 1e-14);
        }
        let lor = SpaceSpec::lorentz(3.0, 1.5).unwrap();
        let got = lor.dilation_norm_bound(2.0, &[chi(1.0), chi(5.0)]).unwrap();
        assert!((got - 2f64.powf(-1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(lor.dilation_norm_bound(1.0, &samples).unwrap(), 1.0);
        assert!(lor.dilation_norm_bound(2.0, &[StepFunction::zero()]).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "lp:2",
            "lorentz:2,1",
            "lorentz:3,inf",
            "weak-lp:3",
            "orlicz:power:2",
            "orlicz:powerlog:2,1",
            "orlicz:maxpower:1,2",
            "orlicz:exp",
        ] {
            let space: SpaceSpec = s.parse().unwrap();
            assert_eq!(space.to_string(), s);
        }
        for bad in ["lp", "lp:x", "lp:-1", "lorentz:2", "orlicz:cosh", "banach:1"] {
            assert!(bad.parse::<SpaceSpec>().is_err(), "{bad}");
        }
        match "lp:abc".parse::<SpaceSpec>() {
            Err(Error::Parse { token, .. }) => assert_eq!(token, "abc"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weak_norm_equals_level_form() {
        // sup_v v d(v; f)^{1/p} over the left limits at each value
        let f = StepFunction::from_pairs(&[(1.0, 1.0), (1.5, 4.0), (4.0, 2.0)]).unwrap();
        let p = 1.7;
        let level_form = f
            .distinct_values()
            .into_iter()
            .map(|v| v * f.distribution_left(v).powf(1.0 / p))
            .fold(0.0, f64::max);
        let got = SpaceSpec::weak_lp(p).unwrap().norm(&f);
        assert!((got - level_form).abs() < 1e-14 * got);
    }
}
