//! Exact calculus for nonnegative step functions on the half line.
//!
//! A [`StepFunction`] takes the value `values[i]` on `[ends[i-1], ends[i])`
//! (with `ends[-1] = 0`) and vanishes beyond the last breakpoint. Every
//! constructor and operation returns the canonical form: adjacent intervals
//! with equal values are merged and trailing zero intervals are dropped, so
//! two functions are equal exactly when their fields are equal.
//!
//! Breakpoints are compared exactly; nothing is snapped.

use std::fmt;
use std::io::Read;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check, Error, Result};

/// Relative slack used when comparing cumulative integrals in
/// [`StepFunction::submajorizes`]. The integrals are sums of products and are
/// not exact in floating point even when the inputs are.
pub const MAJORIZATION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepFunction {
    ends: Vec<f64>,
    values: Vec<f64>,
}

/// One constant interval `[start, end)` of a step function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

impl Piece {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

impl StepFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a function from `(right_breakpoint, value)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let (ends, values): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        Self::from_parts(ends, values)
    }

    pub fn from_parts(ends: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if ends.len() != values.len() {
            return Err(Error::Contract(format!(
                "{} breakpoints but {} values",
                ends.len(),
                values.len()
            )));
        }
        let mut prev = 0.0;
        for (i, &t) in ends.iter().enumerate() {
            if !(t.is_finite() && t > prev) {
                return Err(Error::BadBreakpoints { index: i });
            }
            prev = t;
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::BadValue { index: i, value: v });
            }
        }
        Ok(Self::canonical(ends, values))
    }

    /// `c` times the indicator of `[0, len)`.
    pub fn constant(c: f64, len: f64) -> Result<Self> {
        Self::from_pairs(&[(len, c)])
    }

    /// Indicator of `[0, len)`.
    pub fn indicator(len: f64) -> Result<Self> {
        Self::constant(1.0, len)
    }

    /// `c` on `[a, b)`, zero elsewhere.
    pub fn interval(a: f64, b: f64, c: f64) -> Result<Self> {
        check(a >= 0.0 && a.is_finite(), "interval start", ">= 0", a)?;
        if a == 0.0 {
            return Self::from_pairs(&[(b, c)]);
        }
        Self::from_pairs(&[(a, 0.0), (b, c)])
    }

    /// Consecutive intervals of common width carrying `values` in order.
    pub fn uniform(values: &[f64], width: f64) -> Result<Self> {
        check(width > 0.0 && width.is_finite(), "width", "> 0", width)?;
        let ends = (1..=values.len()).map(|k| k as f64 * width).collect();
        Self::from_parts(ends, values.to_vec())
    }

    fn canonical(ends: Vec<f64>, values: Vec<f64>) -> Self {
        let mut out_ends: Vec<f64> = Vec::with_capacity(ends.len());
        let mut out_values: Vec<f64> = Vec::with_capacity(values.len());
        for (t, v) in ends.into_iter().zip(values) {
            match out_values.last() {
                Some(&last) if last == v => *out_ends.last_mut().unwrap() = t,
                _ => {
                    out_ends.push(t);
                    out_values.push(v);
                }
            }
        }
        while out_values.last() == Some(&0.0) {
            out_values.pop();
            out_ends.pop();
        }
        Self {
            ends: out_ends,
            values: out_values,
        }
    }

    pub fn ends(&self) -> &[f64] {
        &self.ends
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_pieces(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn pieces(&self) -> impl Iterator<Item = Piece> + '_ {
        let starts = std::iter::once(0.0).chain(self.ends.iter().copied());
        starts
            .zip(self.ends.iter().zip(&self.values))
            .map(|(start, (&end, &value))| Piece { start, end, value })
    }

    /// Right endpoint of the support, `0` for the zero function.
    pub fn support_end(&self) -> f64 {
        self.ends.last().copied().unwrap_or(0.0)
    }

    /// Lebesgue measure of `{f > 0}`.
    pub fn support_measure(&self) -> f64 {
        self.pieces().filter(|p| p.value > 0.0).map(|p| p.len()).sum()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest strictly positive value, if any.
    pub fn min_positive_value(&self) -> Option<f64> {
        self.values
            .iter()
            .copied()
            .filter(|&v| v > 0.0)
            .min_by(|a, b| a.total_cmp(b))
    }

    /// Sorted distinct positive values.
    pub fn distinct_values(&self) -> Vec<f64> {
        let mut vs: Vec<f64> = self.values.iter().copied().filter(|&v| v > 0.0).collect();
        vs.sort_by(f64::total_cmp);
        vs.dedup();
        vs
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let idx = self.ends.partition_point(|&e| e <= t);
        self.values.get(idx).copied().unwrap_or(0.0)
    }

    /// `d(v; f) = λ{f > v}`.
    pub fn distribution(&self, v: f64) -> Result<f64> {
        check(v >= 0.0, "level v", ">= 0", v)?;
        Ok(self.pieces().filter(|p| p.value > v).map(|p| p.len()).sum())
    }

    /// `λ{f >= v}`, the left limit of the distribution function at `v > 0`.
    pub fn distribution_left(&self, v: f64) -> f64 {
        self.pieces()
            .filter(|p| p.value >= v && p.value > 0.0)
            .map(|p| p.len())
            .sum()
    }

    /// The decreasing rearrangement `μ(f)`.
    pub fn rearrangement(&self) -> StepFunction {
        let mut blocks: Vec<(f64, f64)> = self
            .pieces()
            .filter(|p| p.value > 0.0)
            .map(|p| (p.value, p.len()))
            .collect();
        blocks.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut ends = Vec::with_capacity(blocks.len());
        let mut values = Vec::with_capacity(blocks.len());
        let mut t = 0.0;
        for (value, len) in blocks {
            t += len;
            ends.push(t);
            values.push(value);
        }
        Self::canonical(ends, values)
    }

    /// `μ_t(f) = inf{v : d(v; f) <= t}`.
    pub fn rearrangement_at(&self, t: f64) -> f64 {
        self.rearrangement().eval(t)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// `(D_a f)(s) = f(a s)`.
    pub fn dilate(&self, a: f64) -> Result<Self> {
        check(a > 0.0 && a.is_finite(), "dilation factor a", "> 0", a)?;
        if a == 1.0 {
            return Ok(self.clone());
        }
        let ends: Vec<f64> = self.ends.iter().map(|&t| t / a).collect();
        Self::from_parts(ends, self.values.clone())
    }

    /// `∫ f^p`, computed as the finite sum `Σ v_i^p |I_i|`.
    pub fn integrate_power(&self, p: f64) -> Result<f64> {
        check(p > 0.0 && p.is_finite(), "exponent p", "> 0", p)?;
        Ok(self
            .pieces()
            .filter(|piece| piece.value > 0.0)
            .map(|piece| piece.value.powf(p) * piece.len())
            .sum())
    }

    /// `∫_{{f > v}} f^p` and `∫_{{f <= v}} f^p` together.
    pub fn split_power_integrals(&self, v: f64, p: f64) -> (f64, f64) {
        let mut high = 0.0;
        let mut low = 0.0;
        for piece in self.pieces().filter(|piece| piece.value > 0.0) {
            let w = piece.value.powf(p) * piece.len();
            if piece.value > v {
                high += w;
            } else {
                low += w;
            }
        }
        (high, low)
    }

    /// Returns `(f·χ{f > v}, f·χ{f <= v})`.
    pub fn split_at_level(&self, v: f64) -> Result<(Self, Self)> {
        check(v >= 0.0, "level v", ">= 0", v)?;
        let high = self.values.iter().map(|&x| if x > v { x } else { 0.0 }).collect();
        let low = self.values.iter().map(|&x| if x > v { 0.0 } else { x }).collect();
        Ok((
            Self::canonical(self.ends.clone(), high),
            Self::canonical(self.ends.clone(), low),
        ))
    }

    /// Applies `op` on the union breakpoint grid of `self` and `other`.
    fn combine(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let mut ends = Vec::with_capacity(self.ends.len() + other.ends.len());
        let mut values = Vec::with_capacity(ends.capacity());
        let (mut i, mut j) = (0, 0);
        while i < self.ends.len() || j < other.ends.len() {
            let a = self.ends.get(i).copied().unwrap_or(f64::INFINITY);
            let b = other.ends.get(j).copied().unwrap_or(f64::INFINITY);
            let x = self.values.get(i).copied().unwrap_or(0.0);
            let y = other.values.get(j).copied().unwrap_or(0.0);
            let end = a.min(b);
            ends.push(end);
            values.push(op(x, y));
            if a <= b {
                i += 1;
            }
            if b <= a {
                j += 1;
            }
        }
        Self::canonical(ends, values)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |x, y| x + y)
    }

    pub fn max(&self, other: &Self) -> Self {
        self.combine(other, f64::max)
    }

    pub fn min(&self, other: &Self) -> Self {
        self.combine(other, f64::min)
    }

    /// `true` when `self <= other` at every point.
    pub fn le_pointwise(&self, other: &Self) -> bool {
        self.combine(other, |x, y| if x <= y { 0.0 } else { 1.0 }).is_zero()
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        check(c >= 0.0 && c.is_finite(), "scale factor", ">= 0", c)?;
        Ok(Self::canonical(
            self.ends.clone(),
            self.values.iter().map(|&v| c * v).collect(),
        ))
    }

    /// Applies `phi` to every value; `phi(0)` must be `0`.
    pub fn map_values(&self, phi: impl Fn(f64) -> f64) -> Result<Self> {
        let zero = phi(0.0);
        if zero != 0.0 {
            return Err(Error::Contract(format!("map must fix 0, got phi(0) = {zero}")));
        }
        Self::from_parts(self.ends.clone(), self.values.iter().map(|&v| phi(v)).collect())
    }

    /// Breakpoints `0 = s_0 < s_1 < ...` of `μ(f)` and the cumulative
    /// integrals `∫_0^{s_k} μ`.
    fn cumulative_rearrangement(&self) -> (Vec<f64>, Vec<f64>) {
        let mu = self.rearrangement();
        let mut ts = vec![0.0];
        let mut cum = vec![0.0];
        let mut acc = 0.0;
        for piece in mu.pieces() {
            acc += piece.value * piece.len();
            ts.push(piece.end);
            cum.push(acc);
        }
        (ts, cum)
    }

    /// `∫_0^t μ_s(f) ds`.
    pub fn cumulative_at(&self, t: f64) -> f64 {
        let (ts, cum) = self.cumulative_rearrangement();
        interpolate_cumulative(&ts, &cum, &self.rearrangement(), t)
    }

    /// `true` when `other ≺≺ self`, i.e. `∫_0^t μ(other) <= ∫_0^t μ(self)`
    /// for every `t`. Both sides are piecewise linear in `t`, so comparing on
    /// the union of their breakpoints decides the inequality.
    pub fn submajorizes(&self, other: &Self) -> bool {
        let mu_g = self.rearrangement();
        let mu_f = other.rearrangement();
        let (tg, cg) = self.cumulative_rearrangement();
        let (tf, cf) = other.cumulative_rearrangement();
        let mut grid: Vec<f64> = tg.iter().chain(&tf).copied().collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid.into_iter().all(|t| {
            let lhs = interpolate_cumulative(&tf, &cf, &mu_f, t);
            let rhs = interpolate_cumulative(&tg, &cg, &mu_g, t);
            lhs <= rhs + MAJORIZATION_SLACK * rhs.abs().max(lhs.abs())
        })
    }

    /// Parses the two-column CSV form `right_breakpoint,value` (no header).
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut pairs = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Parse {
                token: format!("line {}", line + 1),
                reason: e.to_string(),
            })?;
            if record.len() != 2 {
                return Err(Error::Parse {
                    token: format!("line {}", line + 1),
                    reason: format!("expected 2 columns, found {}", record.len()),
                });
            }
            let field = |k: usize| -> Result<f64> {
                record[k].parse().map_err(|_| Error::Parse {
                    token: record[k].to_string(),
                    reason: "not a number".into(),
                })
            };
            pairs.push((field(0)?, field(1)?));
        }
        Self::from_pairs(&pairs)
    }

    pub fn to_csv(&self) -> String {
        self.ends
            .iter()
            .zip(&self.values)
            .map(|(t, v)| format!("{t},{v}\n"))
            .collect()
    }
}

fn interpolate_cumulative(ts: &[f64], cum: &[f64], mu: &StepFunction, t: f64) -> f64 {
    let idx = ts.partition_point(|&s| s <= t);
    if idx >= ts.len() {
        return *cum.last().unwrap();
    }
    // ts[idx - 1] <= t < ts[idx]; μ is constant on that interval.
    let base = ts[idx - 1];
    cum[idx - 1] + mu.eval(base) * (t - base)
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .pieces()
            .filter(|p| p.value != 0.0)
            .map(|p| format!("{}·χ[{}, {})", p.value, p.start, p.end))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for StepFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.ends.iter().zip(&self.values).map(|(&t, &v)| [t, v]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        let pairs: Vec<(f64, f64)> = pairs.into_iter().map(|[t, v]| (t, v)).collect();
        StepFunction::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}
