//! Block partitions of `{0, …, n-1}`, pinchings, and filtrations of block
//! algebras.

use serde::{Deserialize, Serialize};

use super::{CMatrix, MatrixObservable, C64};
use crate::error::{Error, Result};

/// A partition of `{0, …, n-1}` into blocks. Its block algebra is the set
/// of matrices with `x[i][j] = 0` whenever `i` and `j` lie in different
/// blocks; coarser partitions have larger algebras.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    label: Vec<usize>,
}

impl TryFrom<Vec<Vec<usize>>> for Partition {
    type Error = Error;

    fn try_from(blocks: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(blocks)
    }
}

impl From<Partition> for Vec<Vec<usize>> {
    fn from(p: Partition) -> Self {
        p.blocks
    }
}

impl Partition {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        if n == 0 {
            return Err(Error::Partition("no indices".into()));
        }
        let mut label = vec![usize::MAX; n];
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        for (k, b) in blocks.iter().enumerate() {
            for &i in b {
                if i >= n {
                    return Err(Error::Partition(format!("index {i} outside 0..{n}")));
                }
                if label[i] != usize::MAX {
                    return Err(Error::Partition(format!("index {i} appears twice")));
                }
                label[i] = k;
            }
        }
        Ok(Self { blocks, label })
    }

    /// One block: the block algebra is all of `M_n`.
    pub fn trivial(n: usize) -> Self {
        Self::new(vec![(0..n).collect()]).expect("n >= 1")
    }

    /// Singletons: the diagonal algebra.
    pub fn discrete(n: usize) -> Self {
        Self::new((0..n).map(|i| vec![i]).collect()).expect("n >= 1")
    }

    /// Consecutive blocks of `size` indices; `size` must divide `n`.
    pub fn consecutive(n: usize, size: usize) -> Result<Self> {
        if size == 0 || !n.is_multiple_of(size) {
            return Err(Error::Partition(format!("block size {size} does not divide {n}")));
        }
        Self::new((0..n / size).map(|b| (b * size..(b + 1) * size).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.label.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.label[i] == self.label[j]
    }

    /// Every block of `self` lies inside a block of `other`, i.e. the
    /// block algebra of `self` is contained in that of `other`.
    pub fn finer_than(&self, other: &Self) -> bool {
        self.n() == other.n()
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&i| other.label[i] == other.label[b[0]]))
    }

    /// Whether `x` lies in the block algebra, up to `tol` per entry.
    pub fn contains(&self, x: &MatrixObservable, tol: f64) -> bool {
        let e = x.entries();
        (0..self.n()).all(|i| (0..self.n()).all(|j| self.same_block(i, j) || e[(i, j)].norm() <= tol))
    }
}

/// Block-diagonal compression: entries across blocks are zeroed.
pub fn pinch(x: &MatrixObservable, partition: &Partition) -> Result<MatrixObservable> {
    if x.n() != partition.n() {
        return Err(Error::Partition(format!(
            "partition of {} indices applied to a {}×{} matrix",
            partition.n(),
            x.n(),
            x.n()
        )));
    }
    let e = x.entries();
    let out = CMatrix::from_fn(x.n(), x.n(), |i, j| {
        if partition.same_block(i, j) {
            e[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(if x.is_hermitian() {
        MatrixObservable::wrap_hermitian(out)
    } else {
        MatrixObservable::wrap(out)
    })
}

/// Increasing block algebras `A(P_1) ⊆ … ⊆ A(P_m)`, so the partitions get
/// coarser. `E_0` is the normalized trace onto `ℂ·id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Partition>", into = "Vec<Partition>")]
pub struct Filtration {
    partitions: Vec<Partition>,
}

impl TryFrom<Vec<Partition>> for Filtration {
    type Error = Error;

    fn try_from(p: Vec<Partition>) -> Result<Self> {
        Self::new(p)
    }
}

impl From<Filtration> for Vec<Partition> {
    fn from(f: Filtration) -> Self {
        f.partitions
    }
}

impl Filtration {
    /// Accepts the partitions coarsening (algebras increasing). A list
    /// given finest-last is reversed.
    pub fn new(mut partitions: Vec<Partition>) -> Result<Self> {
        let Some(first) = partitions.first() else {
            return Err(Error::Partition("empty filtration".into()));
        };
        let n = first.n();
        if partitions.iter().any(|p| p.n() != n) {
            return Err(Error::Partition("partitions cover different index sets".into()));
        }
        let increasing = |ps: &[Partition]| ps.windows(2).all(|w| w[0].finer_than(&w[1]));
        if !increasing(&partitions) {
            partitions.reverse();
            if !increasing(&partitions) {
                return Err(Error::Partition("block algebras are not nested".into()));
            }
        }
        Ok(Self { partitions })
    }

    /// `steps` partitions of `n` into consecutive blocks of sizes
    /// `n/2^{steps-1}, …, n/2, n`.
    pub fn dyadic(n: usize, steps: u32) -> Result<Self> {
        if steps == 0 || !n.is_multiple_of(1usize << (steps - 1)) {
            return Err(Error::Partition(format!(
                "{n} is not divisible by 2^{}",
                steps.saturating_sub(1)
            )));
        }
        let parts = (0..steps)
            .map(|k| Partition::consecutive(n, n >> (steps - 1 - k)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }

    pub fn n(&self) -> usize {
        self.partitions[0].n()
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// `E_k`, with `E_0(x) = (Tr x / n) id`.
    pub fn expectation(&self, k: usize, x: &MatrixObservable) -> Result<MatrixObservable> {
        match k {
            0 => {
                if x.n() != self.n() {
                    return Err(Error::Partition("dimension mismatch".into()));
                }
                Ok(normalized_trace(x))
            }
            k if k <= self.len() => pinch(x, &self.partitions[k - 1]),
            k => Err(Error::Partition(format!(
                "E_{k} undefined for a filtration of length {}",
                self.len()
            ))),
        }
    }
}

pub(crate) fn normalized_trace(x: &MatrixObservable) -> MatrixObservable {
    let c = x.trace() / x.n() as f64;
    MatrixObservable::identity(x.n()).scale(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncmatrix::random;
    use crate::sample::case_rng;

    fn close(a: &MatrixObservable, b: &MatrixObservable, tol: f64) -> bool {
        (a.entries() - b.entries()).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn pinch_examples() {
        let x = MatrixObservable::from_real(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let d = pinch(&x, &Partition::discrete(2)).unwrap();
        assert_eq!(d, MatrixObservable::diag(&[1.0, 4.0]).unwrap());
        assert_eq!(pinch(&x, &Partition::trivial(2)).unwrap().entries(), x.entries());
        assert!(pinch(&x, &Partition::trivial(3)).is_err());
    }

    #[test]
    fn malformed_partitions() {
        assert!(Partition::new(vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::new(vec![vec![0, 3]]).is_err());
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::consecutive(6, 4).is_err());
        let p: Partition = serde_json::from_str("[[2,0],[1]]").unwrap();
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1]]);
    }

    #[test]
    fn conditional_expectation_axioms() {
        let mut rng = case_rng(1, 0);
        let p = Partition::new(vec![vec![0, 3], vec![1], vec![2, 4, 5]]).unwrap();
        for _ in 0..20 {
            let x = random::gaussian(&mut rng, 6);
            let psd = random::psd(&mut rng, 6);
            let ex = pinch(&x, &p).unwrap();
            assert!((ex.trace() - x.trace()).norm() < 1e-12 * x.max_abs() * 6.0);
            assert!(close(&pinch(&ex, &p).unwrap(), &ex, 0.0));
            assert!(pinch(&psd, &p).unwrap().min_eigenvalue().unwrap() >= -1e-12 * psd.op_norm());
            let id = MatrixObservable::identity(6);
            assert!(close(&pinch(&id, &p).unwrap(), &id, 0.0));
            // bimodule property for a, b in the block algebra
            let a = pinch(&random::gaussian(&mut rng, 6), &p).unwrap();
            let b = pinch(&random::gaussian(&mut rng, 6), &p).unwrap();
            let lhs = pinch(&a.mul(&x).mul(&b), &p).unwrap();
            let rhs = a.mul(&ex).mul(&b);
            assert!(close(&lhs, &rhs, 1e-10 * lhs.max_abs().max(1.0)));
        }
    }

    #[test]
    fn filtration_order_and_tower() {
        let json = "[[[0,1,2,3]],[[0,1],[2,3]],[[0],[1],[2],[3]]]";
        let f: Filtration = serde_json::from_str(json).unwrap();
        assert_eq!(f.partitions()[0], Partition::discrete(4));
        assert_eq!(f, Filtration::dyadic(4, 3).unwrap());
        let bad = vec![
            Partition::new(vec![vec![0, 1], vec![2, 3]]).unwrap(),
            Partition::new(vec![vec![0, 2], vec![1, 3]]).unwrap(),
        ];
        assert!(Filtration::new(bad).is_err());
        assert!(Filtration::dyadic(6, 3).is_err());

        let f = Filtration::dyadic(8, 3).unwrap();
        let sizes: Vec<usize> = f.partitions().iter().map(|p| p.blocks()[0].len()).collect();
        assert_eq!(sizes, [2, 4, 8]);
        let mut rng = case_rng(2, 0);
        let x = random::gaussian(&mut rng, 8);
        for j in 0..=3 {
            for k in 0..=3 {
                let jk = f.expectation(j, &f.expectation(k, &x).unwrap()).unwrap();
                let min = f.expectation(j.min(k), &x).unwrap();
                assert!(close(&jk, &min, 1e-12 * x.max_abs()), "E_{j} E_{k}");
            }
        }
        assert!(f.expectation(4, &x).is_err());
    }
}
