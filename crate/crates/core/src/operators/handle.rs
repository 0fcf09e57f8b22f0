//! Built-in test operators selectable by name.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::operators::calderon::{calderon_curve, hardy_curve};
use crate::operators::curve::Curve;
use crate::spaces::{OrliczSpec, SpaceSpec};
use crate::stepfn::StepFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operator", rename_all = "kebab-case")]
pub enum OperatorHandle {
    Identity,
    Rearrange,
    /// `A f(t) = t^{-1} ∫_0^t f`.
    Hardy,
    Calderon {
        p: f64,
        q: f64,
    },
    /// `½ (f + D_a f)`.
    DilateAvg {
        a: f64,
    },
}

/// The image of a step function: another step function or a power-law
/// curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum Image {
    Step(StepFunction),
    Curve(Curve),
}

impl OperatorHandle {
    pub fn apply(&self, f: &StepFunction) -> Result<Image> {
        Ok(match *self {
            Self::Identity => Image::Step(f.clone()),
            Self::Rearrange => Image::Step(f.rearrangement()),
            Self::Hardy => Image::Curve(hardy_curve(f)),
            Self::Calderon { p, q } => Image::Curve(calderon_curve(f, p, q)?),
            Self::DilateAvg { a } => Image::Step(f.add(&f.dilate(a)?).scale(0.5)?),
        })
    }

    /// A known upper bound for the weak type `(r, r)` constant, when one is
    /// available in closed form.
    pub fn known_weak_constant(&self, r: f64) -> Option<f64> {
        match *self {
            Self::Identity | Self::Rearrange => Some(1.0),
            Self::Hardy
            | Self::Calderon {
                p: 1.0,
                q: f64::INFINITY,
            } => {
                if r == 1.0 || r.is_infinite() {
                    Some(1.0)
                } else if r > 1.0 {
                    // strong type with Hardy's constant r'
                    Some(r / (r - 1.0))
                } else {
                    None
                }
            }
            Self::Calderon { .. } => None,
            Self::DilateAvg { a } => {
                if r.is_infinite() {
                    Some(1.0)
                } else {
                    // d(v; ½(f + D_a f)) <= d(v; f) + d(v; D_a f) = (1 + 1/a) d(v; f)
                    let weak = (1.0 + 1.0 / a).powf(1.0 / r);
                    if r >= 1.0 {
                        Some(weak.min(0.5 * (1.0 + a.powf(-1.0 / r))))
                    } else {
                        Some(weak)
                    }
                }
            }
        }
    }
}

impl Image {
    pub fn distribution(&self, v: f64) -> f64 {
        match self {
            Self::Step(f) => f.distribution(v.max(0.0)).expect("level is nonnegative"),
            Self::Curve(c) => c.distribution(v),
        }
    }

    pub fn distribution_left(&self, v: f64) -> f64 {
        match self {
            Self::Step(f) => f.distribution_left(v),
            Self::Curve(c) => c.distribution_left(v),
        }
    }

    pub fn rearrangement_at(&self, t: f64) -> f64 {
        match self {
            Self::Step(f) => f.rearrangement_at(t),
            Self::Curve(c) => c.rearrangement_at(t),
        }
    }

    pub fn sup(&self) -> f64 {
        match self {
            Self::Step(f) => f.max_value(),
            Self::Curve(c) => c.sup(),
        }
    }

    /// Values where the distribution function changes character.
    pub fn levels(&self) -> Vec<f64> {
        match self {
            Self::Step(f) => f.distinct_values(),
            Self::Curve(c) => c.knots(),
        }
    }

    pub fn norm(&self, space: &SpaceSpec) -> f64 {
        match self {
            Self::Step(f) => space.norm(f),
            Self::Curve(c) => c.norm(space),
        }
    }

    /// `∫ Φ(g / k)`.
    pub fn moment(&self, phi: &OrliczSpec, k: f64) -> f64 {
        match self {
            Self::Step(f) => f
                .pieces()
                .filter(|piece| piece.value > 0.0)
                .map(|piece| phi.phi(piece.value / k) * piece.len())
                .sum(),
            Self::Curve(c) => c.orlicz_modular(phi, k),
        }
    }
}

impl fmt::Display for OperatorHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Identity => write!(f, "identity"),
            Self::Rearrange => write!(f, "rearrange"),
            Self::Hardy => write!(f, "hardy"),
            Self::Calderon { p, q } if q.is_infinite() => write!(f, "calderon:{p},inf"),
            Self::Calderon { p, q } => write!(f, "calderon:{p},{q}"),
            Self::DilateAvg { a } => write!(f, "dilate-avg:{a}"),
        }
    }
}

impl FromStr for OperatorHandle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let numbers = || -> Result<Vec<f64>> {
            args.split(',')
                .map(|tok| {
                    let tok = tok.trim();
                    match tok {
                        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
                        _ => tok.parse().map_err(|_| Error::Parse {
                            token: tok.to_string(),
                            reason: "expected a number".into(),
                        }),
                    }
                })
                .collect()
        };
        let bad_arity = || Error::Parse {
            token: s.to_string(),
            reason: "wrong number of operator parameters".into(),
        };
        match (name.trim(), args.is_empty()) {
            ("identity", true) => Ok(Self::Identity),
            ("rearrange", true) => Ok(Self::Rearrange),
            ("hardy", true) => Ok(Self::Hardy),
            ("calderon", false) => match numbers()?[..] {
                [p, q] => {
                    check(p > 0.0 && p.is_finite(), "exponent p", "> 0", p)?;
                    if !(q > p) {
                        return Err(Error::Window(format!("p < q <= ∞, got p={p}, q={q}")));
                    }
                    Ok(Self::Calderon { p, q })
                }
                _ => Err(bad_arity()),
            },
            ("dilate-avg", false) => match numbers()?[..] {
                [a] => {
                    check(a > 0.0 && a.is_finite(), "dilation factor a", "> 0", a)?;
                    Ok(Self::DilateAvg { a })
                }
                _ => Err(bad_arity()),
            },
            (other, _) => Err(Error::Parse {
                token: other.to_string(),
                reason: "unknown operator (identity, rearrange, hardy, calderon:p,q, dilate-avg:a)".into(),
            }),
        }
    }
}
