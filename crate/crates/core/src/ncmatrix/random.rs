//! Seeded random matrices with complex Gaussian entries.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{CMatrix, MatrixObservable, C64};

fn gaussian_entries(rng: &mut impl Rng, n: usize) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    })
}

/// Entries i.i.d. standard complex Gaussian.
pub fn gaussian(rng: &mut impl Rng, n: usize) -> MatrixObservable {
    MatrixObservable::wrap(gaussian_entries(rng, n))
}

/// `(g + g*) / 2`.
pub fn hermitian(rng: &mut impl Rng, n: usize) -> MatrixObservable {
    MatrixObservable::wrap_hermitian(gaussian_entries(rng, n))
}

/// `g g* / n`; rank deficient with probability about one in five.
pub fn psd(rng: &mut impl Rng, n: usize) -> MatrixObservable {
    let rank = if rng.random_bool(0.2) {
        rng.random_range(1..=n)
    } else {
        n
    };
    let g = CMatrix::from_fn(n, rank, {
        let full = gaussian_entries(rng, n);
        move |i, j| full[(i, j)]
    });
    MatrixObservable::wrap_hermitian(&g * g.adjoint() / C64::new(n as f64, 0.0))
}

/// Haar-distributed unitary: the `Q` factor of a Gaussian matrix with the
/// phases of `R`'s diagonal absorbed.
pub fn unitary(rng: &mut impl Rng, n: usize) -> MatrixObservable {
    let qr = gaussian_entries(rng, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DVector::from_fn(n, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        }
    });
    MatrixObservable::wrap(q * CMatrix::from_diagonal(&phases))
}

/// `u diag(ε) u*` with a Haar unitary `u` and random 0/1 entries `ε`.
pub fn projection(rng: &mut impl Rng, n: usize) -> MatrixObservable {
    let u = unitary(rng, n);
    let d = DVector::from_fn(n, |_, _| C64::new(if rng.random_bool(0.5) { 1.0 } else { 0.0 }, 0.0));
    let u = u.entries();
    MatrixObservable::wrap_hermitian(u * CMatrix::from_diagonal(&d) * u.adjoint())
}

/// Dimension in `2..=8`.
pub fn dimension(rng: &mut impl Rng) -> usize {
    rng.random_range(2..=8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::case_rng;

    #[test]
    fn generators_have_their_shapes() {
        let mut rng = case_rng(3, 0);
        for n in 2..=8 {
            let u = unitary(&mut rng, n);
            let uu = u.adjoint().mul(&u);
            assert!((uu.entries() - CMatrix::identity(n, n))
                .iter()
                .all(|z| z.norm() < 1e-12));
            let p = psd(&mut rng, n);
            assert!(p.is_hermitian() && p.min_eigenvalue().unwrap() > -1e-12 * p.op_norm());
            let e = projection(&mut rng, n);
            assert!((e.mul(&e).entries() - e.entries()).iter().all(|z| z.norm() < 1e-12));
            assert!(hermitian(&mut rng, n).is_hermitian());
        }
    }
}
