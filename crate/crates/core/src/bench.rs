//! Benchmark initial conditions and the scalar diagnostics reported for them.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::{Grid, VectorField};
use crate::scalar::{lit, Real};
use crate::thermo::{Constants, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    RisingBubble,
    DensityCurrent,
}

impl Benchmark {
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::RisingBubble => "rising_bubble",
            Benchmark::DensityCurrent => "density_current",
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rising_bubble" => Ok(Benchmark::RisingBubble),
            "density_current" => Ok(Benchmark::DensityCurrent),
            other => Err(Error::config(
                "benchmark",
                format!("unknown benchmark `{other}` (expected rising_bubble or density_current)"),
            )),
        }
    }
}

/// Geometry and perturbation of one benchmark.
///
/// The perturbation is a function of the normalised radius
/// `r = |((x - xc) / rx, (z - zc) / rz)|` and vanishes for `r > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkSpec<T> {
    pub benchmark: Benchmark,
    pub x_extent: [T; 2],
    pub z_extent: [T; 2],
    pub t_final: T,
    /// Uniform background potential temperature [K].
    pub theta0: T,
    pub center: (T, T),
    pub radii: (T, T),
    /// Peak potential temperature perturbation [K]; 0 gives the rest state.
    pub amplitude: T,
}

impl<T: Real> BenchmarkSpec<T> {
    pub fn rising_bubble() -> Self {
        Self {
            benchmark: Benchmark::RisingBubble,
            x_extent: [T::zero(), lit(10000.0)],
            z_extent: [T::zero(), lit(10000.0)],
            t_final: lit(1020.0),
            theta0: lit(300.0),
            center: (lit(5000.0), lit(2000.0)),
            radii: (lit(2000.0), lit(2000.0)),
            amplitude: lit(2.0),
        }
    }

    pub fn density_current() -> Self {
        Self {
            benchmark: Benchmark::DensityCurrent,
            x_extent: [T::zero(), lit(25600.0)],
            z_extent: [T::zero(), lit(6400.0)],
            t_final: lit(900.0),
            theta0: lit(300.0),
            center: (T::zero(), lit(3000.0)),
            radii: (lit(4000.0), lit(2000.0)),
            amplitude: lit(-15.0),
        }
    }

    pub fn of(benchmark: Benchmark) -> Self {
        match benchmark {
            Benchmark::RisingBubble => Self::rising_bubble(),
            Benchmark::DensityCurrent => Self::density_current(),
        }
    }

    /// Same atmosphere without the perturbation.
    pub fn unperturbed(&self) -> Self {
        Self { amplitude: T::zero(), ..*self }
    }

    pub fn build_grid(&self, h: T) -> Result<Grid<T>> {
        Grid::build(self.x_extent, self.z_extent, h)
    }

    /// Initial potential temperature at `(x, z)`.
    pub fn theta_initial(&self, x: T, z: T) -> T {
        let dx = (x - self.center.0) / self.radii.0;
        let dz = (z - self.center.1) / self.radii.1;
        let r = (dx * dx + dz * dz).sqrt();
        if r > T::one() {
            return self.theta0;
        }
        let bump = match self.benchmark {
            Benchmark::RisingBubble => T::one() - r,
            Benchmark::DensityCurrent => lit::<T>(0.5) * (T::one() + (T::PI() * r).cos()),
        };
        self.theta0 + self.amplitude * bump
    }

    /// Initial state sampled at the cell centroids: neutral hydrostatic
    /// pressure with the local potential temperature, and a density that
    /// satisfies the equation of state, `rho = p / (R T)`.
    pub fn initial_state(&self, grid: &Grid<T>, c: &Constants<T>) -> Result<State<T>> {
        let n = grid.n_cells();
        let mut s = State {
            rho: vec![T::zero(); n],
            u: VectorField::zeros(n),
            p: vec![T::zero(); n],
            p_prime: vec![T::zero(); n],
            h: vec![T::zero(); n],
            k: vec![T::zero(); n],
            t: vec![T::zero(); n],
        };
        let rho_exp = c.cv / c.cp;
        let kappa = c.kappa();
        for cell in 0..n {
            let (x, z) = grid.centroid(cell);
            let theta = self.theta_initial(x, z);
            let p = hydrostatic_pressure(z, theta, c)?;
            let ratio = p / c.p0;
            let exner = ratio.powf(kappa);
            s.rho[cell] = c.p0 / (c.r * theta) * ratio.powf(rho_exp);
            s.p[cell] = p;
            s.t[cell] = theta * exner;
            s.h[cell] = c.cp * theta * exner;
            s.p_prime[cell] = p - s.rho[cell] * c.g * z;
        }
        Ok(s)
    }
}

/// `p0 (1 - g z / (cp theta))^(cp / R)`: pressure of a neutral atmosphere
/// with potential temperature `theta` at height `z`.
pub fn hydrostatic_pressure<T: Real>(z: T, theta: T, c: &Constants<T>) -> Result<T> {
    let base = T::one() - c.g * z / (c.cp * theta);
    if !(base > T::zero()) {
        return Err(Error::Domain(format!(
            "height {z} m is above the top of a neutral atmosphere with theta = {theta} K"
        )));
    }
    Ok(c.p0 * base.powf(c.cp / c.r))
}

pub fn init_rising_bubble<T: Real>(grid: &Grid<T>, c: &Constants<T>) -> Result<State<T>> {
    BenchmarkSpec::rising_bubble().initial_state(grid, c)
}

pub fn init_density_current<T: Real>(grid: &Grid<T>, c: &Constants<T>) -> Result<State<T>> {
    BenchmarkSpec::density_current().initial_state(grid, c)
}

/// Rightmost `x` where `theta_prime` crosses -1 K, interpolated linearly
/// between neighbouring samples. `None` if there is no crossing.
pub fn front_location<T: Real>(theta_prime: &[T], x: &[T]) -> Option<T> {
    let level = -T::one();
    let n = theta_prime.len().min(x.len());
    for i in (1..n).rev() {
        let (a, b) = (theta_prime[i - 1], theta_prime[i]);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo <= level && level <= hi && a != b {
            let s = (level - a) / (b - a);
            return Some(x[i - 1] + s * (x[i] - x[i - 1]));
        }
    }
    None
}

/// `(min, max)` of a field.
pub fn field_extrema<T: Real>(phi: &[T]) -> Result<(T, T)> {
    let (&first, rest) = phi.split_first().ok_or_else(|| Error::Contract("extrema of an empty field".into()))?;
    Ok(rest.iter().fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v))))
}

/// Volume average of the artificial viscosity.
pub fn average_viscosity<T: Real>(mu_bar: &[T], grid: &Grid<T>) -> Result<T> {
    grid.check_len("mu_bar", mu_bar.len())?;
    // uniform cells: the volume weights cancel
    let sum: T = mu_bar.iter().copied().sum();
    Ok(sum / lit::<T>(mu_bar.len() as f64))
}
