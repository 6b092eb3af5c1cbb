//! Dry-air thermodynamics: constants, equation of state, the hydrostatic
//! pressure split and potential temperature.

use crate::error::{Error, Result};
use crate::mesh::VectorField;
use crate::scalar::{lit, Real};

/// Physical constants of dry air. `cp` is always `r + cv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants<T> {
    pub r: T,
    pub cv: T,
    pub cp: T,
    pub g: T,
    pub p0: T,
}

impl<T: Real> Constants<T> {
    pub fn new(r: T, cv: T, g: T, p0: T) -> Result<Self> {
        if !(r > T::zero() && cv > T::zero()) {
            return Err(Error::config("R", "gas constants must be positive"));
        }
        if !(g >= T::zero()) {
            return Err(Error::config("gravity", "gravity must be non-negative"));
        }
        Ok(Self { r, cv, cp: r + cv, g, p0 })
    }

    /// `R / cp`, the Exner exponent.
    pub fn kappa(&self) -> T {
        self.r / self.cp
    }
}

impl<T: Real> Default for Constants<T> {
    fn default() -> Self {
        let r = lit(287.0);
        let cv = lit(715.5);
        Self { r, cv, cp: r + cv, g: lit(9.81), p0: lit(1.0e5) }
    }
}

/// Cell fields at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T> {
    pub rho: Vec<T>,
    pub u: VectorField<T>,
    pub p: Vec<T>,
    pub p_prime: Vec<T>,
    pub h: Vec<T>,
    pub k: Vec<T>,
    pub t: Vec<T>,
}

impl<T: Real> State<T> {
    pub fn n_cells(&self) -> usize {
        self.rho.len()
    }

    /// Potential temperature of every cell.
    pub fn theta(&self, c: &Constants<T>) -> Result<Vec<T>> {
        self.t
            .iter()
            .zip(&self.p)
            .map(|(&t, &p)| exner_and_theta(t, p, c).map(|(_, th)| th))
            .collect()
    }

    /// Potential temperature deviation from a uniform background.
    pub fn theta_prime(&self, c: &Constants<T>, theta0: T) -> Result<Vec<T>> {
        Ok(theta_perturbation(&self.theta(c)?, theta0))
    }

    /// Checks the pointwise positivity invariants; reports the first bad cell.
    pub fn check_positive(&self) -> Result<()> {
        for (name, f) in [("density", &self.rho), ("temperature", &self.t), ("pressure", &self.p)] {
            if let Some(c) = f.iter().position(|&v| !(v > T::zero())) {
                return Err(Error::Unphysical(format!("non-positive {name} {} in cell {c}", f[c])));
            }
        }
        Ok(())
    }
}

/// Temperature from the ideal-gas law `p = rho R T`.
pub fn eos_temperature<T: Real>(p: T, rho: T, c: &Constants<T>) -> Result<T> {
    if !(p > T::zero() && rho > T::zero()) {
        return Err(Error::Domain(format!("ideal gas law needs p > 0 and rho > 0 (p = {p}, rho = {rho})")));
    }
    Ok(p / (rho * c.r))
}

/// `K = |u|^2 / 2` per cell.
pub fn kinetic_energy_density<T: Real>(u: &VectorField<T>) -> Vec<T> {
    let half = lit::<T>(0.5);
    u.x.iter().zip(&u.z).map(|(&a, &b)| half * (a * a + b * b)).collect()
}

/// Exner function `(p / p0)^(R/cp)` and potential temperature `T / exner`.
pub fn exner_and_theta<T: Real>(t: T, p: T, c: &Constants<T>) -> Result<(T, T)> {
    if !(t > T::zero() && p > T::zero()) {
        return Err(Error::Domain(format!("potential temperature needs T > 0 and p > 0 (T = {t}, p = {p})")));
    }
    let pi = (p / c.p0).powf(c.kappa());
    Ok((pi, t / pi))
}

pub fn theta_perturbation<T: Real>(theta: &[T], theta0: T) -> Vec<T> {
    theta.iter().map(|&th| th - theta0).collect()
}

/// `p' = p - rho g z`.
pub fn split_pressure<T: Real>(p: &[T], rho: &[T], z: &[T], c: &Constants<T>) -> Result<Vec<T>> {
    conformal(&[p.len(), rho.len(), z.len()])?;
    Ok(p.iter().zip(rho).zip(z).map(|((&p, &r), &z)| p - r * c.g * z).collect())
}

/// Inverse of [`split_pressure`].
pub fn recombine_pressure<T: Real>(p_prime: &[T], rho: &[T], z: &[T], c: &Constants<T>) -> Result<Vec<T>> {
    conformal(&[p_prime.len(), rho.len(), z.len()])?;
    Ok(p_prime.iter().zip(rho).zip(z).map(|((&q, &r), &z)| q + r * c.g * z).collect())
}

fn conformal(lens: &[usize]) -> Result<()> {
    if lens.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Contract(format!("fields are not conformal: lengths {lens:?}")));
    }
    Ok(())
}
