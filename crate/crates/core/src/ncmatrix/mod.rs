//! Finite matrices under the standard trace: singular-value
//! rearrangements, spectral projections, pinchings and martingales.

mod checks;
mod martingale;
mod partition;
pub mod random;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::SpaceSpec;
use crate::stepfn::StepFunction;

pub use checks::{
    anti_bounded_check, chebyshev_check, check_rearrangement_properties, projection_domination_check, splitting_check,
    AntiBoundedReport, ProjectionDomination, ANTI_BOUNDED_CONSTANT, SPECTRAL_TOL,
};
pub use martingale::{
    burkholder_rosenthal_terms, dual_doob_ratio, martingale_from_endpoint, stein_ratio, BrTerms, MartingaleData,
};
pub use partition::{pinch, Filtration, Partition};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-12;
/// Relative tolerance of the hermitian flag.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct MatrixObservable {
    entries: CMatrix,
    hermitian: bool,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for MatrixObservable {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self> {
        let n = m.n;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&m.re) || !(m.im.is_empty() || shape_ok(&m.im)) {
            return Err(Error::Matrix(format!("`re`/`im` must be {n}×{n} arrays")));
        }
        let entries = CMatrix::from_fn(n, n, |i, j| C64::new(m.re[i][j], m.im.get(i).map_or(0.0, |r| r[j])));
        let x = Self::new(entries)?;
        let herm = x.hermitian_defect() <= HERMITIAN_TOL * x.max_abs();
        Ok(Self { hermitian: herm, ..x })
    }
}

impl From<MatrixObservable> for MatrixJson {
    fn from(x: MatrixObservable) -> Self {
        let n = x.n();
        let rows = |f: fn(&C64) -> f64| {
            (0..n)
                .map(|i| (0..n).map(|j| f(&x.entries[(i, j)])).collect())
                .collect()
        };
        MatrixJson {
            n,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl MatrixObservable {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(Error::Matrix(format!(
                "expected a nonempty square matrix, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Matrix("entries must be finite".into()));
        }
        Ok(Self {
            entries,
            hermitian: false,
        })
    }

    /// Validates `max|x - x*| <= 1e-12 max|x|`.
    pub fn hermitian(entries: CMatrix) -> Result<Self> {
        let x = Self::new(entries)?;
        let defect = x.hermitian_defect();
        if defect > HERMITIAN_TOL * x.max_abs() {
            return Err(Error::Matrix(format!("not hermitian: max|x - x*| = {defect:e}")));
        }
        Ok(Self { hermitian: true, ..x })
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Matrix("rows must form a square array".into()));
        }
        let json = MatrixJson {
            n,
            re: rows.to_vec(),
            im: Vec::new(),
        };
        json.try_into()
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0)));
        Self::hermitian(CMatrix::from_diagonal(&d))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: CMatrix::identity(n, n),
            hermitian: true,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            entries: CMatrix::zeros(n, n),
            hermitian: true,
        }
    }

    /// Wraps an internally produced matrix, resetting the hermitian flag
    /// from the data.
    pub(crate) fn wrap(entries: CMatrix) -> Self {
        let mut x = Self {
            entries,
            hermitian: false,
        };
        x.hermitian = x.hermitian_defect() <= HERMITIAN_TOL * x.max_abs().max(f64::MIN_POSITIVE);
        x
    }

    /// Wraps a matrix known to be hermitian, symmetrizing away rounding.
    pub(crate) fn wrap_hermitian(entries: CMatrix) -> Self {
        let sym = (&entries + entries.adjoint()).scale(0.5);
        Self {
            entries: sym,
            hermitian: true,
        }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn hermitian_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::wrap(&self.entries + &other.entries)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::wrap(&self.entries - &other.entries)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::wrap(&self.entries * &other.entries)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::wrap(self.entries.map(|z| z * c))
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// `‖x‖₂² = Tr x*x`.
    pub fn hilbert_schmidt_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Singular values in decreasing order, without cutoff.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .entries
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Singular values with those below `cutoff · max` set to zero.
    pub fn singular_values_cut(&self, cutoff: f64) -> Vec<f64> {
        let mut s = self.singular_values();
        let floor = cutoff * s[0];
        for v in &mut s {
            if *v <= floor {
                *v = 0.0;
            }
        }
        s
    }

    pub fn op_norm(&self) -> f64 {
        self.singular_values()[0]
    }

    /// Eigenvalues (increasing) and orthonormal eigenvectors of a
    /// hermitian matrix.
    pub fn eigh(&self) -> Result<(Vec<f64>, CMatrix)> {
        if !self.hermitian {
            return Err(Error::Matrix("eigendecomposition needs a hermitian matrix".into()));
        }
        let eig = self.entries.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(self.n(), self.n(), |r, c| eig.eigenvectors[(r, order[c])]);
        Ok((values, vectors))
    }

    /// `φ(x)` for hermitian `x` by the spectral theorem.
    pub fn map_spectrum(&self, phi: impl Fn(f64) -> f64) -> Result<Self> {
        let (values, u) = self.eigh()?;
        let d = DVector::from_iterator(values.len(), values.iter().map(|&l| C64::new(phi(l), 0.0)));
        Ok(Self::wrap_hermitian(&u * CMatrix::from_diagonal(&d) * u.adjoint()))
    }

    /// `(x*x)^{1/2}`.
    pub fn abs(&self) -> Self {
        Self::wrap_hermitian(self.entries.adjoint() * &self.entries)
            .map_spectrum(|l| l.max(0.0).sqrt())
            .expect("x*x is hermitian")
    }

    /// `x^{1/2}` of a positive semidefinite matrix, negative rounding clipped.
    pub fn psd_sqrt(&self) -> Result<Self> {
        self.map_spectrum(|l| l.max(0.0).sqrt())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigh()?.0[0])
    }
}

/// `μ(x)`: the `k`-th largest singular value on `[k-1, k)`, with the rank
/// cutoff applied.
pub fn singular_step(x: &MatrixObservable) -> StepFunction {
    singular_step_with(x, RANK_CUTOFF, 1.0)
}

/// `μ(x)` for the trace scaled so that each rank-one projection has
/// measure `width`.
pub fn singular_step_with(x: &MatrixObservable, cutoff: f64, width: f64) -> StepFunction {
    let s = x.singular_values_cut(cutoff);
    StepFunction::uniform(&s, width).expect("singular values are finite and nonnegative")
}

/// Number of singular values strictly greater than `v`.
pub fn distribution_nc(x: &MatrixObservable, v: f64) -> Result<usize> {
    crate::error::check(v >= 0.0, "level v", ">= 0", v)?;
    Ok(x.singular_values_cut(RANK_CUTOFF).iter().filter(|&&s| s > v).count())
}

/// The norm of `x` in `space`, computed on `μ(x)`.
pub fn matrix_norm(space: &SpaceSpec, x: &MatrixObservable) -> f64 {
    space.norm(&singular_step(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Above,
    AtOrBelow,
}

/// Spectral projection of a positive semidefinite `x` onto eigenvalues
/// `> cutoff` or `<= cutoff`.
pub fn spectral_projection(x: &MatrixObservable, cutoff: f64, side: Side) -> Result<MatrixObservable> {
    let (values, u) = x.eigh()?;
    let top = values.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    if values[0] < -1e-10 * top {
        return Err(Error::Matrix(format!(
            "not positive semidefinite: eigenvalue {}",
            values[0]
        )));
    }
    let keep: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|&(_, &l)| (l.max(0.0) > cutoff) == (side == Side::Above))
        .map(|(i, _)| i)
        .collect();
    let n = x.n();
    let mut p = CMatrix::zeros(n, n);
    for &i in &keep {
        let col = u.column(i);
        p += col * col.adjoint();
    }
    Ok(MatrixObservable::wrap_hermitian(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &MatrixObservable, b: &MatrixObservable, tol: f64) -> bool {
        (a.entries() - b.entries()).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn singular_steps() {
        let x = MatrixObservable::diag(&[3.0, 1.0, 2.0]).unwrap();
        let mu = singular_step(&x);
        assert_eq!(mu.ends(), &[1.0, 2.0, 3.0]);
        assert!(mu
            .values()
            .iter()
            .zip([3.0, 2.0, 1.0])
            .all(|(a, b)| (a - b).abs() < 1e-14));
        assert!(singular_step(&MatrixObservable::zero(3)).is_zero());
        let nil = MatrixObservable::from_real(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let mu = singular_step(&nil);
        assert_eq!(mu.num_pieces(), 1);
        assert!((mu.values()[0] - 2.0).abs() < 1e-14 && mu.ends()[0] == 1.0);
        assert!((mu.integrate_power(1.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn distribution_counts() {
        let x = MatrixObservable::diag(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(distribution_nc(&x, 1.5).unwrap(), 2);
        assert_eq!(distribution_nc(&x, 3.0).unwrap(), 0);
        assert_eq!(distribution_nc(&x, 0.0).unwrap(), 3);
        let rank_one = MatrixObservable::from_real(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(distribution_nc(&rank_one, 0.0).unwrap(), 1);
        assert!(distribution_nc(&x, -1.0).is_err());
        for v in [0.0, 0.5, 1.0, 2.5, 4.0] {
            let d = singular_step(&x).distribution(v).unwrap();
            assert_eq!(d, distribution_nc(&x, v).unwrap() as f64);
        }
    }

    #[test]
    fn projections() {
        let x = MatrixObservable::diag(&[3.0, 1.0, 2.0]).unwrap();
        let above = spectral_projection(&x, 1.5, Side::Above).unwrap();
        assert!(close(&above, &MatrixObservable::diag(&[1.0, 0.0, 1.0]).unwrap(), 1e-14));
        let below = spectral_projection(&x, 1.5, Side::AtOrBelow).unwrap();
        assert!(close(&above.add(&below), &MatrixObservable::identity(3), 1e-14));
        assert!(close(
            &spectral_projection(&x, 3.0, Side::Above).unwrap(),
            &MatrixObservable::zero(3),
            0.0
        ));
        let nh = MatrixObservable::from_real(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        assert!(spectral_projection(&nh, 1.0, Side::Above).is_err());
        let psd = MatrixObservable::from_real(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = spectral_projection(&psd, 2.0, Side::Above).unwrap();
        assert!(close(&e.mul(&e), &e, 1e-12) && e.is_hermitian());
        assert!((e.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let x: MatrixObservable = serde_json::from_str(r#"{"n":2,"re":[[1,2],[2,1]],"im":[[0,1],[-1,0]]}"#).unwrap();
        assert!(x.is_hermitian());
        let back: MatrixObservable = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        assert_eq!(x, back);
        let real: MatrixObservable = serde_json::from_str(r#"{"n":2,"re":[[0,2],[0,0]]}"#).unwrap();
        assert!(!real.is_hermitian());
        assert!(serde_json::from_str::<MatrixObservable>(r#"{"n":3,"re":[[1]]}"#).is_err());
        assert!(MatrixObservable::hermitian(CMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn abs_and_trace_norm() {
        let x = MatrixObservable::from_real(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let tr_abs = x.abs().trace().re;
        let s: f64 = x.singular_values().iter().sum();
        assert!((tr_abs - s).abs() < 1e-12 * s);
        let lp1 = SpaceSpec::lp(1.0).unwrap();
        assert!((matrix_norm(&lp1, &MatrixObservable::diag(&[3.0, 1.0, 2.0]).unwrap()) - 6.0).abs() < 1e-14);
    }
}
