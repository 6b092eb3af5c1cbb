//! Five-point stencil operators on the grid and the preconditioned Krylov
//! solvers used for the pressure, enthalpy and filter systems.

mod krylov;
mod precond;

pub use krylov::{bicgstab_solve, cg_solve, SolverConfig, SolverReport};
pub use precond::{DiagonalIncompleteFactor, Identity, Preconditioner};

use crate::error::{Error, Result};
use crate::mesh::{FaceField, Grid, WallCondition};
use crate::scalar::{lit, Real};

/// Sparse matrix with the 5-point pattern of a [`Grid`].
///
/// Row `c` reads `diag[c] x[c] + west[c] x[c-1] + east[c] x[c+1]
/// + south[c] x[c-nx] + north[c] x[c+nx]`; couplings across walls are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator<T> {
    pub nx: usize,
    pub nz: usize,
    pub diag: Vec<T>,
    pub west: Vec<T>,
    pub east: Vec<T>,
    pub south: Vec<T>,
    pub north: Vec<T>,
    pub symmetric: bool,
}

impl<T: Real> SparseOperator<T> {
    pub fn zeros(nx: usize, nz: usize, symmetric: bool) -> Self {
        let n = nx * nz;
        Self {
            nx,
            nz,
            diag: vec![T::zero(); n],
            west: vec![T::zero(); n],
            east: vec![T::zero(); n],
            south: vec![T::zero(); n],
            north: vec![T::zero(); n],
            symmetric,
        }
    }

    /// Diagonal operator `diag(d)`.
    pub fn diagonal(nx: usize, nz: usize, d: Vec<T>) -> Self {
        let mut op = Self::zeros(nx, nz, true);
        op.diag = d;
        op
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[T], y: &mut [T]) {
        let (nx, nz) = (self.nx, self.nz);
        debug_assert_eq!(x.len(), nx * nz);
        for k in 0..nz {
            for i in 0..nx {
                let c = i + nx * k;
                let mut s = self.diag[c] * x[c];
                if i > 0 {
                    s = s + self.west[c] * x[c - 1];
                }
                if i + 1 < nx {
                    s = s + self.east[c] * x[c + 1];
                }
                if k > 0 {
                    s = s + self.south[c] * x[c - nx];
                }
                if k + 1 < nz {
                    s = s + self.north[c] * x[c + nx];
                }
                y[c] = s;
            }
        }
    }

    pub fn mul(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); x.len()];
        self.apply(x, &mut y);
        y
    }

    /// `r = b - A x`.
    pub fn residual(&self, x: &[T], b: &[T]) -> Vec<T> {
        let mut r = self.mul(x);
        r.iter_mut().zip(b).for_each(|(ri, &bi)| *ri = bi - *ri);
        r
    }

    /// Row-major dense copy (small systems and tests only).
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let (nx, nz) = (self.nx, self.nz);
        let n = nx * nz;
        let mut a = vec![vec![T::zero(); n]; n];
        for k in 0..nz {
            for i in 0..nx {
                let c = i + nx * k;
                a[c][c] = self.diag[c];
                if i > 0 {
                    a[c][c - 1] = self.west[c];
                }
                if i + 1 < nx {
                    a[c][c + 1] = self.east[c];
                }
                if k > 0 {
                    a[c][c - nx] = self.south[c];
                }
                if k + 1 < nz {
                    a[c][c + nx] = self.north[c];
                }
            }
        }
        a
    }
}

/// Assembles the per-volume Helmholtz operator
/// `x_i -> diag_i x_i - (1/|cell|) sum_j coeff_j (x_N - x_i) / dist_j * area_j`
/// together with the right-hand side contribution of fixed-value walls.
///
/// Zero-gradient walls contribute nothing. A fixed-value wall adds
/// `coeff * area / (d/2 * |cell|)` to the diagonal and the same factor times
/// the wall value to the returned source vector.
pub fn assemble_helmholtz<T: Real>(
    diag_field: &[T],
    diff_coeff: &FaceField<T>,
    grid: &Grid<T>,
    bc: &crate::mesh::BoundarySpec<T>,
) -> Result<(SparseOperator<T>, Vec<T>)> {
    grid.check_len("diagonal field", diag_field.len())?;
    diff_coeff.check(grid)?;
    if let Some(c) = diag_field.iter().position(|&d| !(d >= T::zero())) {
        return Err(Error::Assembly(format!("negative diagonal {} in cell {c}", diag_field[c])));
    }
    if diff_coeff.x.iter().chain(&diff_coeff.z).any(|&d| !(d >= T::zero())) {
        return Err(Error::Assembly("negative diffusion coefficient on a face".into()));
    }
    let (nx, nz) = (grid.nx, grid.nz);
    let vol = grid.cell_volume();
    // coeff * area / (dist * vol)
    let fx = grid.area_x() / (grid.dx * vol);
    let fz = grid.area_z() / (grid.dz * vol);
    let two = lit::<T>(2.0);
    let mut op = SparseOperator::zeros(nx, nz, true);
    let mut source = vec![T::zero(); grid.n_cells()];
    op.diag.copy_from_slice(diag_field);
    let mut wall = |c: usize, cond: WallCondition<T>, coeff: T, f: T, op: &mut SparseOperator<T>| {
        if let WallCondition::FixedValue(b) = cond {
            let w = coeff * f * two;
            op.diag[c] = op.diag[c] + w;
            source[c] = source[c] + w * b;
        }
    };
    for k in 0..nz {
        for i in 0..nx {
            let c = i + nx * k;
            let cw = diff_coeff.x[diff_coeff.xi(i, k)] * fx;
            let ce = diff_coeff.x[diff_coeff.xi(i + 1, k)] * fx;
            let cs = diff_coeff.z[diff_coeff.zi(i, k)] * fz;
            let cn = diff_coeff.z[diff_coeff.zi(i, k + 1)] * fz;
            if i > 0 {
                op.west[c] = -cw;
                op.diag[c] = op.diag[c] + cw;
            } else {
                wall(c, bc.west, diff_coeff.x[diff_coeff.xi(i, k)], fx, &mut op);
            }
            if i + 1 < nx {
                op.east[c] = -ce;
                op.diag[c] = op.diag[c] + ce;
            } else {
                wall(c, bc.east, diff_coeff.x[diff_coeff.xi(i + 1, k)], fx, &mut op);
            }
            if k > 0 {
                op.south[c] = -cs;
                op.diag[c] = op.diag[c] + cs;
            } else {
                wall(c, bc.bottom, diff_coeff.z[diff_coeff.zi(i, k)], fz, &mut op);
            }
            if k + 1 < nz {
                op.north[c] = -cn;
                op.diag[c] = op.diag[c] + cn;
            } else {
                wall(c, bc.top, diff_coeff.z[diff_coeff.zi(i, k + 1)], fz, &mut op);
            }
        }
    }
    Ok((op, source))
}
