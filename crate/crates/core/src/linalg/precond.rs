use super::SparseOperator;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub trait Preconditioner<T> {
    /// `z = M^-1 r`.
    fn apply(&self, r: &[T], z: &mut [T]);
}

/// Identity preconditioner.
pub struct Identity;

impl<T: Real> Preconditioner<T> for Identity {
    fn apply(&self, r: &[T], z: &mut [T]) {
        z.copy_from_slice(r);
    }
}

/// Diagonal-based incomplete factorisation `M = (D + L) D^-1 (D + U)` where
/// `L`, `U` are the strict triangles of the operator and `D` is the modified
/// diagonal `d_c = a_cc - sum_{j<c} a_cj a_jc / d_j` over the lower
/// neighbours.
///
/// On the 5-point pattern with natural ordering the zero-fill incomplete
/// Cholesky factor only alters the diagonal, so for a symmetric operator
/// this is exactly IC(0); for a nonsymmetric one it is the diagonal ILU.
pub struct DiagonalIncompleteFactor<'a, T> {
    op: &'a SparseOperator<T>,
    rdiag: Vec<T>,
}

impl<'a, T: Real> DiagonalIncompleteFactor<'a, T> {
    pub fn new(op: &'a SparseOperator<T>) -> Result<Self> {
        let (nx, nz) = (op.nx, op.nz);
        let mut d = op.diag.clone();
        for k in 0..nz {
            for i in 0..nx {
                let c = i + nx * k;
                let mut dc = d[c];
                if i > 0 {
                    dc = dc - op.west[c] * op.east[c - 1] / d[c - 1];
                }
                if k > 0 {
                    dc = dc - op.south[c] * op.north[c - nx] / d[c - nx];
                }
                let bad = if op.symmetric { !(dc > T::zero()) } else { dc == T::zero() || !dc.is_finite() };
                if bad {
                    return Err(Error::solver(
                        "incomplete factorisation",
                        format!("pivot {dc} in row {c}"),
                    ));
                }
                d[c] = dc;
            }
        }
        Ok(Self { op, rdiag: d.into_iter().map(|v| v.recip()).collect() })
    }
}

impl<T: Real> Preconditioner<T> for DiagonalIncompleteFactor<'_, T> {
    fn apply(&self, r: &[T], z: &mut [T]) {
        let op = self.op;
        let (nx, nz) = (op.nx, op.nz);
        for k in 0..nz {
            for i in 0..nx {
                let c = i + nx * k;
                let mut s = r[c];
                if i > 0 {
                    s = s - op.west[c] * z[c - 1];
                }
                if k > 0 {
                    s = s - op.south[c] * z[c - nx];
                }
                z[c] = s * self.rdiag[c];
            }
        }
        for k in (0..nz).rev() {
            for i in (0..nx).rev() {
                let c = i + nx * k;
                let mut s = T::zero();
                if i + 1 < nx {
                    s = s + op.east[c] * z[c + 1];
                }
                if k + 1 < nz {
                    s = s + op.north[c] * z[c + nx];
                }
                z[c] = z[c] - s * self.rdiag[c];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::assemble_helmholtz;
    use crate::mesh::{BoundarySpec, FaceField, Grid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_op(seed: u64) -> SparseOperator<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::new(5, 4, 1.0, 1.0, 0.0, 0.0).unwrap();
        let d: Vec<f64> = (0..20).map(|_| rng.gen_range(0.5..2.0)).collect();
        let mut f = FaceField::zeros(&g);
        f.x.iter_mut().chain(f.z.iter_mut()).for_each(|v| *v = rng.gen_range(0.0..1.5));
        assemble_helmholtz(&d, &f, &g, &BoundarySpec::zero_gradient()).unwrap().0
    }

    #[test]
    fn application_is_linear() {
        let op = random_op(3);
        let m = DiagonalIncompleteFactor::new(&op).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (a, b) = (0.7, -2.3);
        let comb: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let (mut px, mut py, mut pc) = (vec![0.0; 20], vec![0.0; 20], vec![0.0; 20]);
        m.apply(&x, &mut px);
        m.apply(&y, &mut py);
        m.apply(&comb, &mut pc);
        for i in 0..20 {
            assert!((pc[i] - (a * px[i] + b * py[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_on_a_single_row_tridiagonal() {
        // with one row of cells there is no dropped fill, so M == A
        let g = Grid::new(6, 2, 1.0, 1.0, 0.0, 0.0).unwrap();
        let mut f = FaceField::filled(&g, 1.0);
        f.z.iter_mut().for_each(|v| *v = 0.0);
        let (op, _) = assemble_helmholtz(&[1.0; 12], &f, &g, &BoundarySpec::zero_gradient()).unwrap();
        let m = DiagonalIncompleteFactor::new(&op).unwrap();
        let b: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let mut z = vec![0.0; 12];
        m.apply(&b, &mut z);
        let back = op.mul(&z);
        for i in 0..12 {
            assert!((back[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_positive_pivot() {
        let op = SparseOperator::diagonal(2, 2, vec![1.0, -1.0, 1.0, 1.0]);
        assert!(DiagonalIncompleteFactor::new(&op).is_err());
    }
}
