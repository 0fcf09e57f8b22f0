//! Piecewise power-law curves on `ℝ₊`, the images of step functions under
//! the Hardy and Calderón operators.
//!
//! Each piece has the form `c + Σ a_k t^{-e_k}` with at most two terms, so
//! it has at most one critical point and splits into two monotone segments.
//! Beyond the last piece the curve is `C t^{-e}`.

use serde::{Deserialize, Serialize};

use crate::quad;
use crate::spaces::{luxemburg_solve, OrliczSpec, SpaceSpec};

const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePiece {
    pub start: f64,
    pub end: f64,
    pub c: f64,
    /// `(a_k, e_k)` with `e_k > 0`; unused slots have `a_k = 0`.
    pub terms: [(f64, f64); 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTail {
    pub start: f64,
    pub coef: f64,
    pub exp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub pieces: Vec<CurvePiece>,
    pub tail: PowerTail,
}

impl CurvePiece {
    fn active_terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.terms.iter().copied().filter(|&(a, _)| a != 0.0)
    }

    /// Value at `t`, with the limit taken at `t = 0`.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return match self.active_terms().max_by(|x, y| x.1.total_cmp(&y.1)) {
                Some((a, _)) if a > 0.0 => f64::INFINITY,
                Some(_) => 0.0,
                None => self.c.max(0.0),
            };
        }
        let v = self.c + self.active_terms().map(|(a, e)| a * t.powf(-e)).sum::<f64>();
        v.max(0.0)
    }

    fn is_constant(&self) -> bool {
        self.active_terms().next().is_none()
    }

    /// Interior critical point of `c + a1 t^{-e1} + a2 t^{-e2}`, if any.
    fn critical_point(&self) -> Option<f64> {
        let [(a1, e1), (a2, e2)] = self.terms;
        if a1 == 0.0 || a2 == 0.0 || e1 == e2 {
            return None;
        }
        let ratio = -(e1 * a1) / (e2 * a2);
        if !(ratio > 0.0) {
            return None;
        }
        let t = ratio.powf(1.0 / (e1 - e2));
        (t > self.start && t < self.end).then_some(t)
    }

    fn segments(&self) -> Vec<(f64, f64)> {
        match self.critical_point() {
            Some(t) => vec![(self.start, t), (t, self.end)],
            None => vec![(self.start, self.end)],
        }
    }

    /// `λ{t ∈ [start, end) : g(t) > v}` (or `>= v` when `inclusive`).
    fn level_measure(&self, v: f64, inclusive: bool) -> f64 {
        if self.is_constant() {
            let hit = if inclusive { self.c >= v } else { self.c > v };
            return if hit { self.end - self.start } else { 0.0 };
        }
        let g = |t: f64| self.value(t);
        self.segments()
            .into_iter()
            .map(|(a, b)| {
                let (ga, gb) = (g(a), g(b));
                if ga >= gb {
                    if ga <= v {
                        0.0
                    } else if gb > v {
                        b - a
                    } else {
                        quad::bisect_decreasing(g, a, b, v) - a
                    }
                } else if gb <= v {
                    0.0
                } else if ga > v {
                    b - a
                } else {
                    b - quad::bisect_decreasing(|t| -g(t), a, b, -v)
                }
            })
            .sum()
    }

    fn sup(&self) -> f64 {
        let mut best = self.value(self.start).max(self.value(self.end));
        if let Some(t) = self.critical_point() {
            best = best.max(self.value(t));
        }
        best
    }

    /// Largest exponent carrying a positive coefficient, when the piece
    /// starts at `0` and blows up there.
    fn singular_exponent(&self) -> Option<f64> {
        if self.start > 0.0 {
            return None;
        }
        self.active_terms()
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .filter(|&(a, _)| a > 0.0)
            .map(|(_, e)| e)
    }
}

impl PowerTail {
    fn value(&self, t: f64) -> f64 {
        if self.coef <= 0.0 {
            0.0
        } else {
            self.coef * t.powf(-self.exp)
        }
    }

    /// `λ{t >= end : C t^{-e} > v}`.
    #[cfg(test)]
    pub(crate) fn level_measure_beyond(&self, v: f64, end: f64) -> f64 {
        if self.coef <= 0.0 {
            return 0.0;
        }
        let reach = ((self.coef.ln() - v.ln()) / self.exp).exp();
        (reach - end.max(self.start)).max(0.0)
    }

    fn level_measure(&self, v: f64) -> f64 {
        if self.coef <= 0.0 || v <= 0.0 {
            return if self.coef > 0.0 { f64::INFINITY } else { 0.0 };
        }
        let reach = ((self.coef.ln() - v.ln()) / self.exp).exp();
        (reach - self.start).max(0.0)
    }
}

impl Curve {
    pub fn eval(&self, t: f64) -> f64 {
        if t >= self.tail.start {
            return self.tail.value(t);
        }
        let idx = self.pieces.partition_point(|pc| pc.end <= t);
        self.pieces[idx].value(t)
    }

    /// `λ{g > v}`.
    pub fn distribution(&self, v: f64) -> f64 {
        self.level_measure(v, false)
    }

    /// `λ{g >= v}`.
    pub fn distribution_left(&self, v: f64) -> f64 {
        self.level_measure(v, true)
    }

    fn level_measure(&self, v: f64, inclusive: bool) -> f64 {
        self.pieces.iter().map(|pc| pc.level_measure(v, inclusive)).sum::<f64>() + self.tail.level_measure(v)
    }

    pub fn sup(&self) -> f64 {
        self.pieces
            .iter()
            .map(CurvePiece::sup)
            .fold(self.tail.value(self.tail.start), f64::max)
    }

    /// Values at piece ends and critical points: the levels at which the
    /// distribution function can change character.
    pub fn knots(&self) -> Vec<f64> {
        let mut ks: Vec<f64> = Vec::new();
        for pc in &self.pieces {
            ks.push(pc.value(pc.start));
            ks.push(pc.value(pc.end));
            if let Some(t) = pc.critical_point() {
                ks.push(pc.value(t));
            }
        }
        ks.push(self.tail.value(self.tail.start));
        ks.retain(|v| v.is_finite() && *v > 0.0);
        ks.sort_by(f64::total_cmp);
        ks.dedup();
        ks
    }

    /// The exponent `e` of a blow-up `~ t^{-e}` at the origin.
    fn singular_exponent(&self) -> Option<f64> {
        self.pieces.first().and_then(CurvePiece::singular_exponent)
    }

    fn has_tail(&self) -> bool {
        self.tail.coef > 0.0
    }

    /// `μ_t = inf{v : d(v) <= t}`.
    pub fn rearrangement_at(&self, t: f64) -> f64 {
        let sup = self.sup();
        if !(t > 0.0) {
            return sup;
        }
        let hi = if sup.is_finite() {
            sup
        } else {
            let mut h = self.knots().last().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
            while self.distribution(h) > t {
                h *= 2.0;
            }
            h
        };
        quad::bisect_decreasing(|v| self.distribution(v), 0.0, hi, t)
    }

    /// `∫ φ(g)` for an increasing `φ` with power growth `(at_zero, at_inf)`;
    /// `+∞` when the tail or the singularity at the origin is not integrable.
    pub fn moment_with(&self, phi: impl Fn(f64) -> f64, growth: (f64, f64)) -> f64 {
        let (at_zero, at_inf) = growth;
        if let Some(e) = self.singular_exponent() {
            if !(at_inf * e < 1.0) {
                return f64::INFINITY;
            }
        }
        if self.has_tail() && !(at_zero * self.tail.exp > 1.0) {
            return f64::INFINITY;
        }
        let mut sum: f64 = self
            .pieces
            .iter()
            .map(|pc| quad::integrate(|t| phi(pc.value(t)), pc.start, pc.end, QUAD_TOL))
            .sum();
        if self.has_tail() {
            sum += quad::integrate(|t| phi(self.tail.value(t)), self.tail.start, f64::INFINITY, QUAD_TOL);
        }
        sum
    }

    pub fn lp_norm(&self, r: f64) -> f64 {
        self.moment_with(|y| y.powf(r), (r, r)).powf(1.0 / r)
    }

    /// `∫ Φ(g / k)`.
    pub fn orlicz_modular(&self, phi: &OrliczSpec, k: f64) -> f64 {
        self.moment_with(|y| phi.phi(y / k), phi.growth_exponents())
    }

    pub fn orlicz_norm(&self, phi: &OrliczSpec) -> f64 {
        if self.orlicz_modular(phi, 1.0).is_infinite() {
            return f64::INFINITY;
        }
        let k0 = self.knots().last().copied().unwrap_or(1.0);
        luxemburg_solve(|k| self.orlicz_modular(phi, k), k0).unwrap_or(f64::INFINITY)
    }

    /// Level intervals between consecutive knots, plus the unbounded
    /// ends where the curve has a tail or a singularity.
    fn level_breaks(&self) -> Vec<f64> {
        let mut breaks = vec![0.0];
        for k in self.knots() {
            if k > breaks[breaks.len() - 1] * (1.0 + 1e-13) {
                breaks.push(k);
            }
        }
        if !self.sup().is_finite() {
            breaks.push(f64::INFINITY);
        }
        breaks
    }

    /// Lorentz `L^{s,u}` norm by layer cake, `s ∫ v^{u-1} d(v)^{u/s} dv`.
    pub fn lorentz_norm(&self, s: f64, u: f64) -> f64 {
        if self.has_tail() && !(self.tail.exp * s > 1.0) {
            return f64::INFINITY;
        }
        if let Some(e) = self.singular_exponent() {
            if !(e * s < 1.0) {
                return f64::INFINITY;
            }
        }
        let breaks = self.level_breaks();
        let sum: f64 = breaks
            .windows(2)
            .map(|w| {
                quad::integrate(
                    |v| v.powf(u - 1.0) * self.distribution(v).powf(u / s),
                    w[0],
                    w[1],
                    QUAD_TOL,
                )
            })
            .sum();
        (s * sum).powf(1.0 / u)
    }

    /// `sup_v v d(v)^{1/s}`, by a geometric scan of each knot interval
    /// refined with golden-section search around the best sample.
    pub fn weak_norm(&self, s: f64) -> f64 {
        if self.has_tail() && self.tail.exp * s < 1.0 {
            return f64::INFINITY;
        }
        if let Some(e) = self.singular_exponent() {
            if e * s > 1.0 {
                return f64::INFINITY;
            }
        }
        let h = |v: f64| {
            if v <= 0.0 {
                0.0
            } else {
                v * self.distribution(v).powf(1.0 / s)
            }
        };
        let h_left = |v: f64| v * self.distribution_left(v).powf(1.0 / s);
        let knots = self.knots();
        let (first, last) = match (knots.first(), knots.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return 0.0,
        };
        let mut edges = vec![first * 1e-6];
        edges.extend(&knots);
        if !self.sup().is_finite() {
            edges.push(last * 1e6);
        }
        let mut best = knots.iter().map(|&v| h(v).max(h_left(v))).fold(0.0, f64::max);
        for w in edges.windows(2) {
            let grid = geometric(w[0], w[1], 64);
            let (i, _) = grid
                .iter()
                .enumerate()
                .map(|(i, &v)| (i, h(v)))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            let lo = grid[i.saturating_sub(1)];
            let hi = grid[(i + 1).min(grid.len() - 1)];
            best = best.max(golden_max(&h, lo, hi));
        }
        best
    }

    pub fn norm(&self, space: &SpaceSpec) -> f64 {
        match *space {
            SpaceSpec::Lp { p } => self.lp_norm(p),
            SpaceSpec::Lorentz { p, q } if p == q => self.lp_norm(p),
            SpaceSpec::Lorentz { p, q } if q.is_infinite() => self.weak_norm(p),
            SpaceSpec::Lorentz { p, q } => self.lorentz_norm(p, q),
            SpaceSpec::WeakLp { p } => self.weak_norm(p),
            SpaceSpec::Orlicz { phi } => self.orlicz_norm(&phi),
        }
    }

    /// The curve times `χ_[0, end)`.
    pub fn truncate(&self, end: f64) -> Curve {
        let mut pieces: Vec<CurvePiece> = self
            .pieces
            .iter()
            .filter(|pc| pc.start < end)
            .map(|pc| CurvePiece {
                end: pc.end.min(end),
                ..*pc
            })
            .collect();
        if end > self.tail.start {
            pieces.push(CurvePiece {
                start: self.tail.start,
                end,
                c: 0.0,
                terms: [(self.tail.coef, self.tail.exp), (0.0, 0.0)],
            });
        }
        let start = pieces.last().map_or(end, |pc| pc.end);
        Curve {
            pieces,
            tail: PowerTail {
                start,
                coef: 0.0,
                exp: 1.0,
            },
        }
    }
}

pub(crate) fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn golden_max(h: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = h(a).max(h(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (h(x1), h(x2));
    for _ in 0..80 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = h(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = h(x1);
        }
        best = best.max(f1).max(f2);
    }
    best
}
