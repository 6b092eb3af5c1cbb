//! Relaxation of the intermediate towards the filtered solution and the
//! end-of-step thermodynamic update.

use crate::error::{Error, Result};
use crate::evolve::IntermediateState;
use crate::mesh::{Grid, VectorField};
use crate::scalar::Real;
use crate::thermo::{kinetic_energy_density, Constants, State};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxParams<T> {
    /// Velocity relaxation.
    pub chi: T,
    /// Enthalpy relaxation.
    pub xi: T,
}

impl<T: Real> RelaxParams<T> {
    pub fn new(chi: T, xi: T) -> Result<Self> {
        let unit = |v: T| v >= T::zero() && v <= T::one();
        if !unit(chi) {
            return Err(Error::config("relax.chi", format!("{chi} is outside [0, 1]")));
        }
        if !unit(xi) {
            return Err(Error::config("relax.xi", format!("{xi} is outside [0, 1]")));
        }
        Ok(Self { chi, xi })
    }
}

impl<T: Real> Default for RelaxParams<T> {
    fn default() -> Self {
        Self { chi: T::one(), xi: T::one() }
    }
}

fn blend<T: Real>(a: &[T], b: &[T], w: T) -> Vec<T> {
    // exact at both ends of the weight range
    if w == T::zero() {
        return a.to_vec();
    }
    if w == T::one() {
        return b.to_vec();
    }
    a.iter().zip(b).map(|(&x, &y)| (x + w * (y - x)).max(x.min(y)).min(x.max(y))).collect()
}

/// Builds the state at the new time level from the evolve output and the
/// filtered velocity and enthalpy.
pub fn relax_and_update<T: Real>(
    inter: &IntermediateState<T>,
    v_bar: &VectorField<T>,
    l_bar: &[T],
    state_n: &State<T>,
    params: &RelaxParams<T>,
    c: &Constants<T>,
    grid: &Grid<T>,
) -> Result<State<T>> {
    for (name, len) in [
        ("filtered u", v_bar.x.len()),
        ("filtered w", v_bar.z.len()),
        ("filtered enthalpy", l_bar.len()),
        ("intermediate state", inter.l.len()),
        ("previous state", state_n.h.len()),
    ] {
        grid.check_len(name, len)?;
    }
    RelaxParams::new(params.chi, params.xi)?;
    let u = VectorField { x: blend(&inter.v.x, &v_bar.x, params.chi), z: blend(&inter.v.z, &v_bar.z, params.chi) };
    let h = blend(&inter.l, l_bar, params.xi);
    let rho = inter.rho.clone();
    let n = grid.n_cells();
    let t: Vec<T> = (0..n).map(|i| state_n.t[i] + (h[i] - state_n.h[i]) / c.cp).collect();
    if let Some(i) = t.iter().position(|&v| !(v > T::zero())) {
        return Err(Error::Unphysical(format!(
            "temperature {} in cell ({}, {}) after relaxation",
            t[i],
            i % grid.nx,
            i / grid.nx
        )));
    }
    let p: Vec<T> = (0..n).map(|i| rho[i] * c.r * t[i]).collect();
    let z = grid.cell_heights();
    let p_prime = (0..n).map(|i| p[i] - rho[i] * c.g * z[i]).collect();
    let k = kinetic_energy_density(&u);
    Ok(State { rho, u, p, p_prime, h, k, t })
}
