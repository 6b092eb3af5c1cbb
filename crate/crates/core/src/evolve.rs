//! The evolve step: explicit density, momentum/pressure coupling without a
//! momentum predictor, and an implicit enthalpy solve.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{
    assemble_helmholtz, bicgstab_solve, cg_solve, DiagonalIncompleteFactor, SolverConfig, SparseOperator,
};
use crate::mesh::{divergence_of_flux, gauss_gradient, Axis, BoundarySpec, FaceField, Grid, VectorField};
use crate::scalar::{lit, Real};
use crate::thermo::{kinetic_energy_density, Constants, State};

/// Face interpolation of convected quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvectionScheme {
    /// Upwind cell value plus the upwind cell gradient times the offset.
    #[default]
    LinearUpwind,
    Central,
}

impl ConvectionScheme {
    pub fn name(self) -> &'static str {
        match self {
            ConvectionScheme::LinearUpwind => "linear_upwind",
            ConvectionScheme::Central => "central",
        }
    }
}

impl fmt::Display for ConvectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConvectionScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear_upwind" => Ok(ConvectionScheme::LinearUpwind),
            "central" => Ok(ConvectionScheme::Central),
            other => Err(Error::config(
                "convection_scheme",
                format!("unknown scheme `{other}` (expected linear_upwind or central)"),
            )),
        }
    }
}

/// Output of the evolve step, before filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct IntermediateState<T> {
    /// Density at the new time level.
    pub rho: Vec<T>,
    pub v: VectorField<T>,
    pub l: Vec<T>,
    pub k_v: Vec<T>,
    pub q: Vec<T>,
    pub q_prime: Vec<T>,
    pub t_l: Vec<T>,
    /// Mass flux through every face [kg/s], zero on walls.
    pub face_flux: FaceField<T>,
    pub pressure_iterations: usize,
    pub enthalpy_iterations: usize,
}

/// Result of [`Evolver::momentum_pressure_step`].
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumPressure<T> {
    pub rho: Vec<T>,
    pub v: VectorField<T>,
    pub q: Vec<T>,
    pub q_prime: Vec<T>,
    /// Pressure increment `q - p^n`.
    pub dq: Vec<T>,
    pub face_flux: FaceField<T>,
    /// Momentum diagonal per unit volume.
    pub a_diag: Vec<T>,
    /// Explicit momentum sources per unit volume (time level n and neighbours).
    pub h: VectorField<T>,
    /// Pressure and buoyancy force per unit volume at cell centres.
    pub force: VectorField<T>,
    pub iterations: usize,
}

/// Free-slip wall conditions of one velocity component.
pub fn velocity_bc<T: Real>(axis: Axis) -> BoundarySpec<T> {
    BoundarySpec::free_slip(axis)
}

/// `rho^n - dt div(flux)`; fails on the first non-positive density.
pub fn advance_density<T: Real>(rho_n: &[T], flux: &FaceField<T>, dt: T, grid: &Grid<T>) -> Result<Vec<T>> {
    grid.check_len("density", rho_n.len())?;
    let div = divergence_of_flux(flux, grid)?;
    let rho: Vec<T> = rho_n.iter().zip(&div).map(|(&r, &d)| r - dt * d).collect();
    if let Some(c) = rho.iter().position(|&r| !(r > T::zero())) {
        return Err(Error::Unphysical(format!(
            "density {} in cell ({}, {})",
            rho[c],
            c % grid.nx,
            c / grid.nx
        )));
    }
    Ok(rho)
}

/// Fixed settings of the evolve step for one run.
#[derive(Debug, Clone)]
pub struct Evolver<T> {
    pub grid: Grid<T>,
    pub constants: Constants<T>,
    pub dt: T,
    pub scheme: ConvectionScheme,
    pub solver: SolverConfig<T>,
    z: Vec<T>,
    balance: FaceField<T>,
}

impl<T: Real> Evolver<T> {
    pub fn new(
        grid: Grid<T>,
        constants: Constants<T>,
        dt: T,
        scheme: ConvectionScheme,
        solver: SolverConfig<T>,
    ) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::config("dt", "time step must be positive"));
        }
        let z = grid.cell_heights();
        let balance = FaceField::zeros(&grid);
        Ok(Self { grid, constants, dt, scheme, solver, z, balance })
    }

    /// Subtracts the discrete face force of `reference` (an atmosphere at
    /// rest) from every subsequent force evaluation, so that the reference
    /// is an exact steady state of the scheme.
    pub fn with_reference(mut self, reference: &State<T>) -> Result<Self> {
        self.grid.check_len("reference density", reference.rho.len())?;
        let r = self.constants.r;
        let p: Vec<T> = reference.rho.iter().zip(&reference.t).map(|(&rho, &t)| rho * r * t).collect();
        self.balance = FaceField::zeros(&self.grid);
        self.balance = self.face_force(&p, &reference.rho);
        Ok(self)
    }

    pub fn heights(&self) -> &[T] {
        &self.z
    }

    /// Whole evolve step from `state` with the previous end-of-step flux.
    pub fn step(&self, state: &State<T>, flux_n: &FaceField<T>) -> Result<IntermediateState<T>> {
        let rho_pred = advance_density(&state.rho, flux_n, self.dt, &self.grid)?;
        let mp = self.momentum_pressure_step(state, flux_n, &rho_pred)?;
        let (l, k_v, t_l, enthalpy_iterations) = self.enthalpy_step(state, &mp)?;
        Ok(IntermediateState {
            rho: mp.rho,
            v: mp.v,
            l,
            k_v,
            q: mp.q,
            q_prime: mp.q_prime,
            t_l,
            face_flux: mp.face_flux,
            pressure_iterations: mp.iterations,
            enthalpy_iterations,
        })
    }

    /// Pressure gradient plus buoyancy on interior faces, minus the
    /// reference balance; zero on walls.
    pub fn face_force(&self, q: &[T], rho: &[T]) -> FaceField<T> {
        let g = &self.grid;
        let (nx, nz) = (g.nx, g.nz);
        let (rdx, rdz) = (g.dx.recip(), g.dz.recip());
        let half_g = lit::<T>(0.5) * self.constants.g;
        let mut f = FaceField::zeros(g);
        for k in 0..nz {
            for i in 1..nx {
                let c = i + nx * k;
                let fi = f.xi(i, k);
                f.x[fi] = (q[c] - q[c - 1]) * rdx - self.balance.x[fi];
            }
        }
        for k in 1..nz {
            for i in 0..nx {
                let c = i + nx * k;
                let fi = f.zi(i, k);
                f.z[fi] = (q[c] - q[c - nx]) * rdz + half_g * (rho[c] + rho[c - nx]) - self.balance.z[fi];
            }
        }
        f
    }

    /// Momentum/pressure coupling. `flux_n` convects the old velocity and
    /// `rho_pred` is the density advanced with that flux.
    pub fn momentum_pressure_step(
        &self,
        state: &State<T>,
        flux_n: &FaceField<T>,
        rho_pred: &[T],
    ) -> Result<MomentumPressure<T>> {
        let g = &self.grid;
        let (nx, nz, n) = (g.nx, g.nz, g.n_cells());
        let dt = self.dt;
        let rdt = dt.recip();
        let rvol = g.cell_volume().recip();
        let half = lit::<T>(0.5);
        for (name, len) in [("state", state.rho.len()), ("predicted density", rho_pred.len())] {
            g.check_len(name, len)?;
        }
        flux_n.check(g)?;

        // a' v = H' - force, with the upwind part of the convection implicit
        // in the diagonal and the remainder lagged
        let outflow = upwind_outflow(flux_n, g);
        let a_diag: Vec<T> = (0..n).map(|c| rho_pred[c] * rdt + outflow[c] * rvol).collect();
        let mut h = VectorField::zeros(n);
        for axis in [Axis::X, Axis::Z] {
            let u = state.u.component(axis);
            let bc = velocity_bc(axis);
            let inflow = upwind_inflow(flux_n, u, g);
            let dc = divergence_of_flux(&self.deferred_correction(u, flux_n, &bc)?, g)?;
            let out = if axis == Axis::X { &mut h.x } else { &mut h.z };
            for c in 0..n {
                out[c] = state.rho[c] * u[c] * rdt + inflow[c] * rvol - dc[c];
            }
        }
        let hbya = VectorField {
            x: h.x.iter().zip(&a_diag).map(|(&a, &b)| a / b).collect(),
            z: h.z.iter().zip(&a_diag).map(|(&a, &b)| a / b).collect(),
        };
        let ra: Vec<T> = rho_pred.iter().zip(&a_diag).map(|(&r, &a)| r / a).collect();

        // predicted flux with the old pressure
        let force0 = self.face_force(&state.p, rho_pred);
        let (ax, az) = (g.area_x(), g.area_z());
        let mut flux = FaceField::zeros(g);
        let mut diff = FaceField::zeros(g);
        for k in 0..nz {
            for i in 1..nx {
                let (c, fi) = (i + nx * k, flux.xi(i, k));
                let rho_f = half * (rho_pred[c] + rho_pred[c - 1]);
                let d = half * (ra[c] + ra[c - 1]);
                diff.x[fi] = d;
                flux.x[fi] = (rho_f * half * (hbya.x[c] + hbya.x[c - 1]) - d * force0.x[fi]) * ax;
            }
        }
        for k in 1..nz {
            for i in 0..nx {
                let (c, fi) = (i + nx * k, flux.zi(i, k));
                let rho_f = half * (rho_pred[c] + rho_pred[c - nx]);
                let d = half * (ra[c] + ra[c - nx]);
                diff.z[fi] = d;
                flux.z[fi] = (rho_f * half * (hbya.z[c] + hbya.z[c - nx]) - d * force0.z[fi]) * az;
            }
        }

        // psi dq / dt - div(D grad dq) = -div(flux*), psi = cv / (cp R T^n)
        let gamma = self.constants.cp / self.constants.cv;
        let psi_dt: Vec<T> = state.t.iter().map(|&t| (gamma * self.constants.r * t * dt).recip()).collect();
        let (op, _) = assemble_helmholtz(&psi_dt, &diff, g, &BoundarySpec::zero_gradient())?;
        let rhs: Vec<T> = divergence_of_flux(&flux, g)?.into_iter().map(|d| -d).collect();
        let mut dq = vec![T::zero(); n];
        let pre = DiagonalIncompleteFactor::new(&op)?;
        let report = cg_solve(&op, &rhs, &mut dq, &pre, &self.solver)?;

        // corrected flux and total force
        let mut force = force0;
        for k in 0..nz {
            for i in 1..nx {
                let (c, fi) = (i + nx * k, flux.xi(i, k));
                let grad = (dq[c] - dq[c - 1]) / g.dx;
                force.x[fi] = force.x[fi] + grad;
                flux.x[fi] = flux.x[fi] - diff.x[fi] * grad * ax;
            }
        }
        for k in 1..nz {
            for i in 0..nx {
                let (c, fi) = (i + nx * k, flux.zi(i, k));
                let grad = (dq[c] - dq[c - nx]) / g.dz;
                force.z[fi] = force.z[fi] + grad;
                flux.z[fi] = flux.z[fi] - diff.z[fi] * grad * az;
            }
        }

        // cell velocity from the face forces; on a wall face the force is
        // the one that makes the wall-normal velocity vanish
        let mut cell_force = VectorField::zeros(n);
        for k in 0..nz {
            for i in 0..nx {
                let c = i + nx * k;
                let w = if i == 0 { a_diag[c] * hbya.x[c] } else { force.x[force.xi(i, k)] };
                let e = if i + 1 == nx { a_diag[c] * hbya.x[c] } else { force.x[force.xi(i + 1, k)] };
                let s = if k == 0 { a_diag[c] * hbya.z[c] } else { force.z[force.zi(i, k)] };
                let t = if k + 1 == nz { a_diag[c] * hbya.z[c] } else { force.z[force.zi(i, k + 1)] };
                cell_force.x[c] = half * (w + e);
                cell_force.z[c] = half * (s + t);
            }
        }
        let v = VectorField {
            x: (0..n).map(|c| hbya.x[c] - cell_force.x[c] / a_diag[c]).collect(),
            z: (0..n).map(|c| hbya.z[c] - cell_force.z[c] / a_diag[c]).collect(),
        };
        if v.x.iter().chain(&v.z).any(|x| !x.is_finite()) {
            return Err(Error::Unphysical("non-finite velocity after the pressure correction".into()));
        }

        let rho = advance_density(&state.rho, &flux, dt, g)?;
        let q: Vec<T> = state.p.iter().zip(&dq).map(|(&p, &d)| p + d).collect();
        let gz = self.constants.g;
        let q_prime = (0..n).map(|c| q[c] - rho[c] * gz * self.z[c]).collect();
        Ok(MomentumPressure {
            rho,
            v,
            q,
            q_prime,
            dq,
            face_flux: flux,
            a_diag,
            h,
            force: cell_force,
            iterations: report.iterations,
        })
    }

    /// Implicit enthalpy solve; returns `(l, K_v, T_l, iterations)`.
    ///
    /// Convection is upwind-implicit in `l` with a lagged correction built
    /// from `s = h + g z`, which is uniform in a neutral atmosphere. The
    /// pressure transient is taken with the end-of-step pressure
    /// `rho R T_l`, so that `rho (c_v T + K + g z)` is conserved.
    pub fn enthalpy_step(&self, state: &State<T>, mp: &MomentumPressure<T>) -> Result<(Vec<T>, Vec<T>, Vec<T>, usize)> {
        let g = &self.grid;
        let (nx, nz, n) = (g.nx, g.nz, g.n_cells());
        let rdt = self.dt.recip();
        let rvol = g.cell_volume().recip();
        let grav = self.constants.g;
        let half_dz = lit::<T>(0.5) * g.dz;
        let flux = &mp.face_flux;
        let zg = BoundarySpec::zero_gradient();

        // the pressure transient uses the end-of-step pressure rho R T_l, whose
        // dependence on l goes into the diagonal
        let kappa = self.constants.kappa();
        let mut op = upwind_operator(flux, &mp.rho, rdt, g);
        for c in 0..n {
            op.diag[c] = op.diag[c] - kappa * mp.rho[c] * rdt;
        }

        let s: Vec<T> = state.h.iter().zip(&self.z).map(|(&h, &z)| h + grav * z).collect();
        let mut dc = self.deferred_correction(&s, flux, &zg)?;
        // potential-energy part of the correction, g F (z_upwind - z_face)
        for fi in 0..dc.z.len() {
            dc.z[fi] = dc.z[fi] - grav * flux.z[fi].abs() * half_dz;
        }
        let dc = divergence_of_flux(&dc, g)?;

        let k_v = kinetic_energy_density(&mp.v);
        let k_faces = self.face_values(&k_v, flux, &zg)?;
        let k_conv = divergence_of_flux(&product(flux, &k_faces), g)?;

        // work of gravity, g sum_f F_out (z_f - z_P) / |cell|
        let mut work = vec![T::zero(); n];
        for k in 0..nz {
            for i in 0..nx {
                let c = i + nx * k;
                let f = flux.z[flux.zi(i, k)] + flux.z[flux.zi(i, k + 1)];
                work[c] = grav * f * half_dz * rvol;
            }
        }

        let b: Vec<T> = (0..n)
            .map(|c| {
                state.rho[c] * state.h[c] * rdt
                    - dc[c]
                    - ((mp.rho[c] * k_v[c] - state.rho[c] * state.k[c]) * rdt + k_conv[c])
                    + (mp.rho[c] * (self.constants.r * state.t[c] - kappa * state.h[c]) - state.p[c]) * rdt
                    - work[c]
            })
            .collect();
        let mut l = state.h.clone();
        let pre = DiagonalIncompleteFactor::new(&op)?;
        let report = bicgstab_solve(&op, &b, &mut l, &pre, &self.solver)?;

        let cp = self.constants.cp;
        let t_l: Vec<T> = (0..n).map(|c| state.t[c] + (l[c] - state.h[c]) / cp).collect();
        if let Some(c) = t_l.iter().position(|&t| !(t > T::zero())) {
            return Err(Error::Unphysical(format!(
                "temperature {} in cell ({}, {}) after the enthalpy solve",
                t_l[c],
                c % nx,
                c / nx
            )));
        }
        Ok((l, k_v, t_l, report.iterations))
    }

    /// Face values of `phi` convected by `flux` under the configured scheme.
    /// Wall faces carry no flux and are left at zero.
    pub fn face_values(&self, phi: &[T], flux: &FaceField<T>, bc: &BoundarySpec<T>) -> Result<FaceField<T>> {
        let g = &self.grid;
        let (nx, nz) = (g.nx, g.nz);
        let half = lit::<T>(0.5);
        let mut out = FaceField::zeros(g);
        match self.scheme {
            ConvectionScheme::Central => {
                for k in 0..nz {
                    for i in 1..nx {
                        let c = i + nx * k;
                        let fi = out.xi(i, k);
                        out.x[fi] = half * (phi[c] + phi[c - 1]);
                    }
                }
                for k in 1..nz {
                    for i in 0..nx {
                        let c = i + nx * k;
                        let fi = out.zi(i, k);
                        out.z[fi] = half * (phi[c] + phi[c - nx]);
                    }
                }
            }
            ConvectionScheme::LinearUpwind => {
                let grad = gauss_gradient(phi, g, bc)?;
                let (hx, hz) = (half * g.dx, half * g.dz);
                for k in 0..nz {
                    for i in 1..nx {
                        let c = i + nx * k;
                        let fi = out.xi(i, k);
                        out.x[fi] = if flux.x[fi] >= T::zero() {
                            phi[c - 1] + hx * grad.x[c - 1]
                        } else {
                            phi[c] - hx * grad.x[c]
                        };
                    }
                }
                for k in 1..nz {
                    for i in 0..nx {
                        let c = i + nx * k;
                        let fi = out.zi(i, k);
                        out.z[fi] = if flux.z[fi] >= T::zero() {
                            phi[c - nx] + hz * grad.z[c - nx]
                        } else {
                            phi[c] - hz * grad.z[c]
                        };
                    }
                }
            }
        }
        Ok(out)
    }

    /// `flux * (scheme face value - upwind cell value)` on every face.
    pub fn deferred_correction(&self, phi: &[T], flux: &FaceField<T>, bc: &BoundarySpec<T>) -> Result<FaceField<T>> {
        let g = &self.grid;
        let (nx, nz) = (g.nx, g.nz);
        let mut out = self.face_values(phi, flux, bc)?;
        for k in 0..nz {
            for i in 0..=nx {
                let fi = out.xi(i, k);
                let f = flux.x[fi];
                out.x[fi] = if i == 0 || i == nx {
                    T::zero()
                } else {
                    let c = i + nx * k;
                    let up = if f >= T::zero() { phi[c - 1] } else { phi[c] };
                    f * (out.x[fi] - up)
                };
            }
        }
        for k in 0..=nz {
            for i in 0..nx {
                let fi = out.zi(i, k);
                let f = flux.z[fi];
                out.z[fi] = if k == 0 || k == nz {
                    T::zero()
                } else {
                    let c = i + nx * k;
                    let up = if f >= T::zero() { phi[c - nx] } else { phi[c] };
                    f * (out.z[fi] - up)
                };
            }
        }
        Ok(out)
    }
}

fn product<T: Real>(a: &FaceField<T>, b: &FaceField<T>) -> FaceField<T> {
    FaceField {
        nx: a.nx,
        nz: a.nz,
        x: a.x.iter().zip(&b.x).map(|(&p, &q)| p * q).collect(),
        z: a.z.iter().zip(&b.z).map(|(&p, &q)| p * q).collect(),
    }
}

/// Per cell: total outgoing flux through interior faces.
fn upwind_outflow<T: Real>(flux: &FaceField<T>, g: &Grid<T>) -> Vec<T> {
    let (nx, nz) = (g.nx, g.nz);
    let mut out = vec![T::zero(); g.n_cells()];
    let mut add = |lo: usize, hi: usize, f: T| {
        if f >= T::zero() {
            out[lo] = out[lo] + f;
        } else {
            out[hi] = out[hi] - f;
        }
    };
    for k in 0..nz {
        for i in 1..nx {
            let c = i + nx * k;
            add(c - 1, c, flux.x[flux.xi(i, k)]);
        }
    }
    for k in 1..nz {
        for i in 0..nx {
            let c = i + nx * k;
            add(c - nx, c, flux.z[flux.zi(i, k)]);
        }
    }
    out
}

/// Per cell: `sum over inflow faces of |F| phi_upwind`.
fn upwind_inflow<T: Real>(flux: &FaceField<T>, phi: &[T], g: &Grid<T>) -> Vec<T> {
    let (nx, nz) = (g.nx, g.nz);
    let mut inn = vec![T::zero(); g.n_cells()];
    for k in 0..nz {
        for i in 1..nx {
            let c = i + nx * k;
            let f = flux.x[flux.xi(i, k)];
            if f >= T::zero() {
                inn[c] = inn[c] + f * phi[c - 1];
            } else {
                inn[c - 1] = inn[c - 1] - f * phi[c];
            }
        }
    }
    for k in 1..nz {
        for i in 0..nx {
            let c = i + nx * k;
            let f = flux.z[flux.zi(i, k)];
            if f >= T::zero() {
                inn[c] = inn[c] + f * phi[c - nx];
            } else {
                inn[c - nx] = inn[c - nx] - f * phi[c];
            }
        }
    }
    inn
}

/// `rho / dt + upwind convection` per unit volume.
fn upwind_operator<T: Real>(flux: &FaceField<T>, rho: &[T], rdt: T, g: &Grid<T>) -> SparseOperator<T> {
    let (nx, nz) = (g.nx, g.nz);
    let rvol = g.cell_volume().recip();
    let mut op = SparseOperator::zeros(nx, nz, false);
    for c in 0..g.n_cells() {
        op.diag[c] = rho[c] * rdt;
    }
    for k in 0..nz {
        for i in 1..nx {
            let c = i + nx * k;
            let f = flux.x[flux.xi(i, k)] * rvol;
            if f >= T::zero() {
                op.diag[c - 1] = op.diag[c - 1] + f;
                op.west[c] = op.west[c] - f;
            } else {
                op.diag[c] = op.diag[c] - f;
                op.east[c - 1] = op.east[c - 1] + f;
            }
        }
    }
    for k in 1..nz {
        for i in 0..nx {
            let c = i + nx * k;
            let f = flux.z[flux.zi(i, k)] * rvol;
            if f >= T::zero() {
                op.diag[c - nx] = op.diag[c - nx] + f;
                op.south[c] = op.south[c] - f;
            } else {
                op.diag[c] = op.diag[c] - f;
                op.north[c - nx] = op.north[c - nx] + f;
            }
        }
    }
    op
}
