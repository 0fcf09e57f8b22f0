//! Machine-readable results of verification suites.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One failed inequality or equality. `margin` is the relative excess of
/// `lhs` over `rhs` (or the relative difference, for equalities).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub case_id: usize,
    pub quantity: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Name of the constant holding the largest margin seen.
pub const MAX_MARGIN: &str = "max_margin";

/// At most this many violations are listed; `violation_count` has the total.
pub const MAX_LISTED_VIOLATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    /// Margins above this are violations.
    pub tol: f64,
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    pub max_violation: f64,
    pub constants: BTreeMap<String, f64>,
    pub runtime_ms: u64,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, cases: usize, tol: f64) -> Self {
        Self {
            suite: suite.to_string(),
            seed,
            cases,
            tol,
            violations: Vec::new(),
            violation_count: 0,
            max_violation: 0.0,
            constants: BTreeMap::new(),
            runtime_ms: 0,
        }
    }

    /// Records entries with a margin above `tol`, in order. The largest
    /// margin seen, violation or not, is kept as the constant `max_margin`.
    pub fn extend(&mut self, found: impl IntoIterator<Item = Violation>) {
        for v in found {
            let m = if v.margin.is_nan() { f64::INFINITY } else { v.margin };
            if m > 0.0 {
                self.constant(MAX_MARGIN, m);
            }
            if !(m > self.tol) {
                continue;
            }
            self.max_violation = self.max_violation.max(m);
            self.violation_count += 1;
            if self.violations.len() < MAX_LISTED_VIOLATIONS {
                self.violations.push(v);
            }
        }
    }

    /// Records a named constant, keeping the larger value on repeats.
    pub fn constant(&mut self, name: &str, value: f64) {
        let slot = self.constants.entry(name.to_string()).or_insert(value);
        *slot = slot.max(value);
    }

    pub fn passes(&self) -> bool {
        self.max_violation <= self.tol
    }

    /// The report as pretty JSON with `runtime_ms` zeroed, for
    /// reproducibility comparisons.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.runtime_ms = 0;
        serde_json::to_string_pretty(&copy).expect("report serializes")
    }
}

/// `(lhs - rhs) / |rhs|`, the relative excess in `lhs <= rhs`; an exact
/// zero right side makes any positive `lhs` an absolute violation.
pub fn excess(lhs: f64, rhs: f64) -> f64 {
    if lhs <= rhs {
        return 0.0;
    }
    if rhs == 0.0 {
        return lhs;
    }
    (lhs - rhs) / rhs.abs()
}

/// `|lhs - rhs| / max(|lhs|, |rhs|)`, zero when both vanish.
pub fn relative_gap(lhs: f64, rhs: f64) -> f64 {
    if lhs == rhs {
        return 0.0;
    }
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs())
}

pub(crate) fn le(case_id: usize, quantity: impl Into<String>, lhs: f64, rhs: f64) -> Option<Violation> {
    let margin = excess(lhs, rhs);
    (margin > 0.0 || margin.is_nan() || lhs.is_nan()).then(|| Violation {
        case_id,
        quantity: quantity.into(),
        lhs,
        rhs,
        margin: if lhs.is_nan() { f64::INFINITY } else { margin },
    })
}

pub(crate) fn eq(case_id: usize, quantity: impl Into<String>, lhs: f64, rhs: f64) -> Option<Violation> {
    let margin = relative_gap(lhs, rhs);
    (margin > 0.0 || margin.is_nan()).then(|| Violation {
        case_id,
        quantity: quantity.into(),
        lhs,
        rhs,
        margin: if margin.is_nan() { f64::INFINITY } else { margin },
    })
}

/// `lhs <= rhs` with the excess measured in units of `scale`, for
/// quantities such as singular values whose natural size is set by the
/// matrix rather than by `rhs`.
pub(crate) fn le_scaled(
    case_id: usize,
    quantity: impl Into<String>,
    lhs: f64,
    rhs: f64,
    scale: f64,
) -> Option<Violation> {
    let margin = if lhs <= rhs { 0.0 } else { (lhs - rhs) / scale };
    (margin > 0.0 || margin.is_nan()).then(|| Violation {
        case_id,
        quantity: quantity.into(),
        lhs,
        rhs,
        margin: if margin.is_nan() { f64::INFINITY } else { margin },
    })
}

/// `|lhs - rhs| / scale`.
pub(crate) fn eq_scaled(
    case_id: usize,
    quantity: impl Into<String>,
    lhs: f64,
    rhs: f64,
    scale: f64,
) -> Option<Violation> {
    let margin = (lhs - rhs).abs() / scale;
    (margin > 0.0 || margin.is_nan()).then(|| Violation {
        case_id,
        quantity: quantity.into(),
        lhs,
        rhs,
        margin: if margin.is_nan() { f64::INFINITY } else { margin },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins() {
        assert_eq!(excess(1.0, 2.0), 0.0);
        assert_eq!(excess(3.0, 2.0), 0.5);
        assert_eq!(excess(1e-3, 0.0), 1e-3);
        assert_eq!(relative_gap(0.0, 0.0), 0.0);
        assert_eq!(relative_gap(1.0, 2.0), 0.5);
    }

    #[test]
    fn report_tracks_max_and_count() {
        let mut r = SuiteReport::new("x", 1, 3, 0.05);
        let found = [
            le(0, "a", 1.0, 2.0),
            le(1, "b", 2.2, 2.0),
            le(2, "c", 1.01, 1.0),
            eq(3, "d", 1.0, 1.0),
        ];
        r.extend(found.into_iter().flatten());
        assert_eq!(r.violation_count, 1);
        assert!((r.max_violation - 0.1).abs() < 1e-15 && r.constants[MAX_MARGIN] == r.max_violation);
        assert!(!r.passes());
        let mut quiet = SuiteReport::new("x", 1, 1, 0.05);
        quiet.extend(le(0, "c", 1.01, 1.0));
        assert!(quiet.passes() && quiet.violations.is_empty());
        assert!((quiet.constants[MAX_MARGIN] - 0.01).abs() < 1e-15);
        r.constant("k", 1.0);
        r.constant("k", 0.5);
        assert_eq!(r.constants["k"], 1.0);
    }
}
