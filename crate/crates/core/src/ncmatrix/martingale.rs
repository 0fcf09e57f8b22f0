//! Martingales along pinching filtrations and the square-function terms.

use serde::{Deserialize, Serialize};

use super::partition::Filtration;
use super::{matrix_norm, singular_step, MatrixObservable, RANK_CUTOFF};
use crate::error::{Error, Result};
use crate::spaces::SpaceSpec;
use crate::stepfn::StepFunction;

/// Tolerance, relative to the largest entry, for the adaptedness and
/// difference checks.
const MARTINGALE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleData {
    differences: Vec<MatrixObservable>,
    filtration: Filtration,
}

impl MartingaleData {
    /// Checks `E_k x_k = x_k` and `E_{k-1} x_k = 0`.
    pub fn new(differences: Vec<MatrixObservable>, filtration: Filtration) -> Result<Self> {
        if differences.is_empty() {
            return Err(Error::Contract("a martingale needs at least one difference".into()));
        }
        if differences.len() != filtration.len() {
            return Err(Error::Contract(format!(
                "{} differences for a filtration of length {}",
                differences.len(),
                filtration.len()
            )));
        }
        let scale = differences.iter().map(MatrixObservable::max_abs).fold(0.0, f64::max);
        let tol = MARTINGALE_TOL * scale;
        for (i, x) in differences.iter().enumerate() {
            let k = i + 1;
            let adapted = filtration.expectation(k, x)?;
            let prev = filtration.expectation(k - 1, x)?;
            if (adapted.entries() - x.entries()).iter().any(|z| z.norm() > tol) {
                return Err(Error::Contract(format!("x_{k} is not measurable for E_{k}")));
            }
            if prev.max_abs() > tol {
                return Err(Error::Contract(format!("E_{}(x_{k}) != 0", k - 1)));
            }
        }
        Ok(Self {
            differences,
            filtration,
        })
    }

    pub fn differences(&self) -> &[MatrixObservable] {
        &self.differences
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn sum(&self) -> MatrixObservable {
        let n = self.filtration.n();
        self.differences
            .iter()
            .fold(MatrixObservable::zero(n), |acc, x| acc.add(x))
    }
}

/// `y_k = E_k y`, `y_0 = (Tr y / n) id`, `x_k = y_k - y_{k-1}`.
pub fn martingale_from_endpoint(y: &MatrixObservable, filtration: &Filtration) -> Result<MartingaleData> {
    let mut prev = filtration.expectation(0, y)?;
    let mut differences = Vec::with_capacity(filtration.len());
    for k in 1..=filtration.len() {
        let yk = filtration.expectation(k, y)?;
        differences.push(yk.sub(&prev));
        prev = yk;
    }
    MartingaleData::new(differences, filtration.clone())
}

fn norm_ratio(space: &SpaceSpec, num: &MatrixObservable, den: &MatrixObservable) -> Result<f64> {
    let d = matrix_norm(space, den);
    if !(d > 0.0) {
        return Err(Error::ZeroFunction);
    }
    Ok(matrix_norm(space, num) / d)
}

fn check_psd(xs: &[MatrixObservable]) -> Result<()> {
    for (k, x) in xs.iter().enumerate() {
        let top = x.op_norm();
        if !x.is_hermitian() || x.min_eigenvalue()? < -1e-10 * top {
            return Err(Error::Contract(format!("x_{} is not positive semidefinite", k + 1)));
        }
    }
    Ok(())
}

/// `‖Σ E_k x_k‖_E / ‖Σ x_k‖_E` for positive `x_k`.
pub fn dual_doob_ratio(space: &SpaceSpec, filtration: &Filtration, xs: &[MatrixObservable]) -> Result<f64> {
    if xs.is_empty() || xs.len() > filtration.len() {
        return Err(Error::Contract(format!(
            "need 1..={} terms, got {}",
            filtration.len(),
            xs.len()
        )));
    }
    check_psd(xs)?;
    let n = filtration.n();
    let mut num = MatrixObservable::zero(n);
    let mut den = MatrixObservable::zero(n);
    for (i, x) in xs.iter().enumerate() {
        num = num.add(&filtration.expectation(i + 1, x)?);
        den = den.add(x);
    }
    norm_ratio(space, &num, &den)
}

/// `(Σ y_k* y_k)^{1/2}`.
fn column_square_function(ys: &[MatrixObservable]) -> Result<MatrixObservable> {
    let n = ys[0].n();
    let sum = ys
        .iter()
        .fold(MatrixObservable::zero(n), |acc, y| acc.add(&y.adjoint().mul(y)));
    MatrixObservable::wrap_hermitian(sum.entries().clone()).psd_sqrt()
}

/// `‖(Σ |E_k x_k|²)^{1/2}‖_E / ‖(Σ |x_k|²)^{1/2}‖_E`.
pub fn stein_ratio(space: &SpaceSpec, filtration: &Filtration, xs: &[MatrixObservable]) -> Result<f64> {
    if xs.is_empty() || xs.len() > filtration.len() {
        return Err(Error::Contract(format!(
            "need 1..={} terms, got {}",
            filtration.len(),
            xs.len()
        )));
    }
    let exs = xs
        .iter()
        .enumerate()
        .map(|(i, x)| filtration.expectation(i + 1, x))
        .collect::<Result<Vec<_>>>()?;
    norm_ratio(space, &column_square_function(&exs)?, &column_square_function(xs)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrTerms {
    /// `‖Σ x_k‖_E`.
    pub s_norm: f64,
    /// Norm of the block-diagonal matrix `diag(x_1, …, x_m)`.
    pub diag_term: f64,
    /// `‖(Σ E_{k-1}(x_k* x_k))^{1/2}‖_E`.
    pub col_term: f64,
    /// `‖(Σ E_{k-1}(x_k x_k*))^{1/2}‖_E`.
    pub row_term: f64,
    pub max_term: f64,
    /// `max_term / s_norm`, undefined when `s_norm = 0`.
    pub max_over_s: Option<f64>,
    /// `s_norm / max_term`, undefined when `max_term = 0`.
    pub s_over_max: Option<f64>,
}

/// The four quantities of the Burkholder-Rosenthal comparison.
pub fn burkholder_rosenthal_terms(space: &SpaceSpec, m: &MartingaleData) -> Result<BrTerms> {
    let f = m.filtration();
    let xs = m.differences();
    let s_norm = matrix_norm(space, &m.sum());

    let mut all: Vec<f64> = xs.iter().flat_map(|x| x.singular_values_cut(RANK_CUTOFF)).collect();
    all.sort_by(|a, b| b.total_cmp(a));
    let diag_term = space.norm(&StepFunction::uniform(&all, 1.0)?);

    let n = f.n();
    let mut col = MatrixObservable::zero(n);
    let mut row = MatrixObservable::zero(n);
    for (i, x) in xs.iter().enumerate() {
        col = col.add(&f.expectation(i, &x.adjoint().mul(x))?);
        row = row.add(&f.expectation(i, &x.mul(&x.adjoint()))?);
    }
    let sq = |s: MatrixObservable| -> Result<f64> {
        let root = MatrixObservable::wrap_hermitian(s.entries().clone()).psd_sqrt()?;
        Ok(space.norm(&singular_step(&root)))
    };
    let col_term = sq(col)?;
    let row_term = sq(row)?;
    let max_term = diag_term.max(col_term).max(row_term);
    Ok(BrTerms {
        s_norm,
        diag_term,
        col_term,
        row_term,
        max_term,
        max_over_s: (s_norm > 0.0).then(|| max_term / s_norm),
        s_over_max: (max_term > 0.0).then(|| s_norm / max_term),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncmatrix::partition::Partition;
    use crate::ncmatrix::random;
    use crate::sample::case_rng;

    #[test]
    fn endpoint_martingales() {
        let mut rng = case_rng(4, 0);
        let y = random::gaussian(&mut rng, 4);
        let full = Filtration::new(vec![Partition::trivial(4)]).unwrap();
        let m = martingale_from_endpoint(&y, &full).unwrap();
        let want = y.sub(&MatrixObservable::identity(4).scale(y.trace() / 4.0));
        assert!((m.differences()[0].entries() - want.entries())
            .iter()
            .all(|z| z.norm() < 1e-14));

        let p = Partition::consecutive(4, 2).unwrap();
        let blocky = crate::ncmatrix::pinch(&y, &p).unwrap();
        let same = Filtration::new(vec![p.clone(), p.clone(), p]).unwrap();
        let m = martingale_from_endpoint(&blocky, &same).unwrap();
        assert!(m.differences()[1..].iter().all(|x| x.max_abs() == 0.0));

        let dy = Filtration::dyadic(4, 3).unwrap();
        let m = martingale_from_endpoint(&y, &dy).unwrap();
        for k in 2..=3 {
            assert!(dy.expectation(k - 1, &m.differences()[k - 1]).unwrap().max_abs() < 1e-14);
        }
        let centered = y.sub(&dy.expectation(0, &y).unwrap());
        assert!((m.sum().entries() - centered.entries())
            .iter()
            .all(|z| z.norm() < 1e-12));
        let broken = vec![y.clone(), y.clone(), y];
        assert!(MartingaleData::new(broken, dy).is_err());
    }

    #[test]
    fn doob_and_stein_basics() {
        let mut rng = case_rng(5, 0);
        let lp1 = SpaceSpec::lp(1.0).unwrap();
        let lp2 = SpaceSpec::lp(2.0).unwrap();
        let f = Filtration::dyadic(8, 3).unwrap();
        let xs: Vec<_> = (0..3).map(|_| random::psd(&mut rng, 8)).collect();
        assert!((dual_doob_ratio(&lp1, &f, &xs).unwrap() - 1.0).abs() < 1e-12);
        let full = Filtration::new(vec![Partition::trivial(8)]).unwrap();
        assert!((dual_doob_ratio(&lp2, &full, &xs[..1]).unwrap() - 1.0).abs() < 1e-12);
        assert!((stein_ratio(&lp2, &full, &xs[..1]).unwrap() - 1.0).abs() < 1e-12);
        let gs: Vec<_> = (0..3).map(|_| random::gaussian(&mut rng, 8)).collect();
        assert!(stein_ratio(&lp2, &f, &gs).unwrap() <= 1.0 + 1e-12);
        assert!(dual_doob_ratio(&lp2, &f, &gs).is_err());
        let zeros = vec![MatrixObservable::zero(8)];
        assert!(matches!(dual_doob_ratio(&lp2, &f, &zeros), Err(Error::ZeroFunction)));
    }

    #[test]
    fn br_terms() {
        let mut rng = case_rng(6, 0);
        let lp2 = SpaceSpec::lp(2.0).unwrap();
        let f = Filtration::dyadic(8, 3).unwrap();
        let m = martingale_from_endpoint(&random::gaussian(&mut rng, 8), &f).unwrap();
        let t = burkholder_rosenthal_terms(&lp2, &m).unwrap();
        let pyth: f64 = m.differences().iter().map(MatrixObservable::hilbert_schmidt_sq).sum();
        assert!((t.s_norm.powi(2) - pyth).abs() < 1e-10 * pyth);
        assert!((t.diag_term.powi(2) - pyth).abs() < 1e-10 * pyth);

        // a single difference sees E_0 as the normalized trace
        let lp3 = SpaceSpec::lp(3.0).unwrap();
        let one = Filtration::new(vec![Partition::trivial(4)]).unwrap();
        let m = martingale_from_endpoint(&random::gaussian(&mut rng, 4), &one).unwrap();
        let x = &m.differences()[0];
        let t = burkholder_rosenthal_terms(&lp3, &m).unwrap();
        let c = (x.hilbert_schmidt_sq() / 4.0).sqrt();
        let want = c * 4f64.powf(1.0 / 3.0);
        assert!((t.col_term - want).abs() < 1e-12 * want && (t.row_term - want).abs() < 1e-12 * want);

        let zero = martingale_from_endpoint(&MatrixObservable::zero(4), &one).unwrap();
        let t = burkholder_rosenthal_terms(&lp3, &zero).unwrap();
        assert_eq!((t.s_norm, t.diag_term, t.col_term, t.row_term), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(t.max_over_s, None);
        assert!(MartingaleData::new(Vec::new(), one).is_err());
    }
}
