//! Indicator functions, artificial viscosity and the Helmholtz filter.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{assemble_helmholtz, cg_solve, DiagonalIncompleteFactor, SolverConfig};
use crate::mesh::{gauss_gradient, interpolate_to_faces, Axis, BoundarySpec, FaceField, Grid, VectorField};
use crate::scalar::{lit, Real};

/// Cell field in `[0, 1]` selecting where the filter acts.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorField<T> {
    pub a: Vec<T>,
}

impl<T: Real> IndicatorField<T> {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Fraction of cells with `a > threshold` (cells have equal volume).
    pub fn fraction_above(&self, threshold: T) -> T {
        if self.a.is_empty() {
            return T::zero();
        }
        let count = self.a.iter().filter(|&&v| v > threshold).count();
        lit::<T>(count as f64) / lit::<T>(self.a.len() as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterKind {
    #[default]
    Linear,
    Smagorinsky,
    Deconvolution,
}

impl FilterKind {
    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Linear => "linear",
            FilterKind::Smagorinsky => "smagorinsky",
            FilterKind::Deconvolution => "deconvolution",
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(FilterKind::Linear),
            "smagorinsky" => Ok(FilterKind::Smagorinsky),
            "deconvolution" => Ok(FilterKind::Deconvolution),
            other => Err(Error::config(
                "filter.kind",
                format!("unknown filter `{other}` (expected linear, smagorinsky or deconvolution)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig<T> {
    pub kind: FilterKind,
    /// Filtering radius [m].
    pub alpha: T,
    /// Below this the indicator is zero everywhere.
    pub eps_grad: T,
    /// Radius of the inner linear filter of the deconvolution indicator [m].
    pub deconv_alpha: T,
}

impl<T: Real> FilterConfig<T> {
    pub fn new(kind: FilterKind, alpha: T, deconv_alpha: T) -> Result<Self> {
        let cfg = Self { kind, alpha, eps_grad: lit(1e-12), deconv_alpha };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= T::zero()) {
            return Err(Error::config("filter.alpha", "filtering radius must be non-negative"));
        }
        if !(self.eps_grad > T::zero()) {
            return Err(Error::config("filter.eps_grad", "gradient floor must be positive"));
        }
        if self.kind == FilterKind::Deconvolution && !(self.deconv_alpha > T::zero()) {
            return Err(Error::config("filter.deconv_alpha", "inner filter radius must be positive"));
        }
        Ok(())
    }

    /// Indicator of the configured kind for the velocity `v`.
    pub fn indicator(&self, v: &VectorField<T>, grid: &Grid<T>, lin: &SolverConfig<T>) -> Result<IndicatorField<T>> {
        match self.kind {
            FilterKind::Linear => Ok(indicator_linear(v.len())),
            FilterKind::Smagorinsky => indicator_smagorinsky(v, grid, self.eps_grad),
            FilterKind::Deconvolution => indicator_deconvolution(v, self.deconv_alpha, grid, lin, self.eps_grad),
        }
    }
}

pub fn indicator_linear<T: Real>(n: usize) -> IndicatorField<T> {
    IndicatorField { a: vec![T::one(); n] }
}

/// Frobenius norm of the Gauss velocity gradient at every cell.
pub fn velocity_gradient_norm<T: Real>(v: &VectorField<T>, grid: &Grid<T>) -> Result<Vec<T>> {
    let gu = gauss_gradient(&v.x, grid, &BoundarySpec::free_slip(Axis::X))?;
    let gw = gauss_gradient(&v.z, grid, &BoundarySpec::free_slip(Axis::Z))?;
    Ok((0..grid.n_cells())
        .map(|c| (gu.x[c] * gu.x[c] + gu.z[c] * gu.z[c] + gw.x[c] * gw.x[c] + gw.z[c] * gw.z[c]).sqrt())
        .collect())
}

/// `|grad v| / max |grad v|`, or zero if the maximum is below `eps_grad`.
pub fn indicator_smagorinsky<T: Real>(v: &VectorField<T>, grid: &Grid<T>, eps_grad: T) -> Result<IndicatorField<T>> {
    Ok(normalized(velocity_gradient_norm(v, grid)?, eps_grad))
}

/// `|v - F v|` normalised by its maximum, with `F` the linear Helmholtz
/// filter of radius `deconv_alpha`.
pub fn indicator_deconvolution<T: Real>(
    v: &VectorField<T>,
    deconv_alpha: T,
    grid: &Grid<T>,
    lin: &SolverConfig<T>,
    floor: T,
) -> Result<IndicatorField<T>> {
    if !(deconv_alpha > T::zero()) {
        return Err(Error::config("filter.deconv_alpha", "inner filter radius must be positive"));
    }
    let n = grid.n_cells();
    let ones = vec![T::one(); n];
    let delta = FaceField::filled(grid, deconv_alpha * deconv_alpha);
    let zg = BoundarySpec::zero_gradient();
    let (op, _) = assemble_helmholtz(&ones, &delta, grid, &zg)?;
    let pre = DiagonalIncompleteFactor::new(&op)?;
    let mut raw = vec![T::zero(); n];
    for comp in [&v.x, &v.z] {
        let mut fv = comp.clone();
        cg_solve(&op, comp, &mut fv, &pre, lin)?;
        for c in 0..n {
            let d = comp[c] - fv[c];
            raw[c] = raw[c] + d * d;
        }
    }
    raw.iter_mut().for_each(|r| *r = r.sqrt());
    Ok(normalized(raw, floor))
}

fn normalized<T: Real>(mut a: Vec<T>, floor: T) -> IndicatorField<T> {
    let max = a.iter().fold(T::zero(), |m, &x| m.max(x));
    if max < floor {
        a.iter_mut().for_each(|x| *x = T::zero());
    } else {
        // clamp guards the ulp above 1 from the division
        a.iter_mut().for_each(|x| *x = (*x / max).min(T::one()));
    }
    IndicatorField { a }
}

/// `mu = rho alpha^2 a / dt` [Pa s].
pub fn artificial_viscosity<T: Real>(rho: &[T], a: &IndicatorField<T>, alpha: T, dt: T) -> Result<Vec<T>> {
    if rho.len() != a.len() {
        return Err(Error::Contract(format!(
            "density has {} cells, indicator has {}",
            rho.len(),
            a.len()
        )));
    }
    let s = alpha * alpha / dt;
    Ok(rho.iter().zip(&a.a).map(|(&r, &ai)| r * s * ai).collect())
}

/// Solves `(rho / dt)(x - phi) - div(mu grad x) = 0`.
///
/// Returns the input unchanged (bitwise) when `mu` vanishes everywhere,
/// together with the iteration count of the solve.
pub fn helmholtz_filter<T: Real>(
    phi: &[T],
    mu_bar: &[T],
    rho: &[T],
    dt: T,
    grid: &Grid<T>,
    bc: &BoundarySpec<T>,
    lin: &SolverConfig<T>,
) -> Result<(Vec<T>, usize)> {
    for (name, len) in [("phi", phi.len()), ("mu_bar", mu_bar.len()), ("rho", rho.len())] {
        grid.check_len(name, len)?;
    }
    if mu_bar.iter().all(|&m| m == T::zero()) {
        return Ok((phi.to_vec(), 0));
    }
    let diag: Vec<T> = rho.iter().map(|&r| r / dt).collect();
    let mu_f = interpolate_to_faces(mu_bar, grid, &BoundarySpec::zero_gradient())?;
    let (op, src) = assemble_helmholtz(&diag, &mu_f, grid, bc)?;
    let b: Vec<T> = (0..phi.len()).map(|c| diag[c] * phi[c] + src[c]).collect();
    let mut x = phi.to_vec();
    let pre = DiagonalIncompleteFactor::new(&op)?;
    let rep = cg_solve(&op, &b, &mut x, &pre, lin)?;
    Ok((x, rep.iterations))
}

/// Filtering radius that makes the Smagorinsky indicator reproduce a
/// Smagorinsky viscosity: `cs * delta * sqrt(dt * grad_max)`.
pub fn smagorinsky_alpha_hint<T: Real>(cs: T, delta: T, dt: T, grad_max: T) -> T {
    cs * delta * (dt * grad_max).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize, h: f64) -> Grid<f64> {
        Grid::new(n, n, h, h, 0.0, 0.0).unwrap()
    }

    #[test]
    fn linear_indicator_is_one() {
        let a = indicator_linear::<f64>(7);
        assert_eq!(a.a, vec![1.0; 7]);
        assert_eq!(a.fraction_above(0.25), 1.0);
    }

    #[test]
    fn smagorinsky_of_uniform_flow_is_zero() {
        let g = grid(4, 1.0);
        // tangential components only, so the free-slip walls see no jump
        let v = VectorField { x: vec![0.0; 16], z: vec![0.0; 16] };
        assert!(indicator_smagorinsky(&v, &g, 1e-12).unwrap().a.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn smagorinsky_of_shear_is_one_inside() {
        let g = grid(6, 1.0);
        let gamma = 0.3;
        let u: Vec<f64> = g.cell_heights().iter().map(|&z| gamma * z).collect();
        let v = VectorField { x: u, z: vec![0.0; 36] };
        let norms = velocity_gradient_norm(&v, &g).unwrap();
        let a = indicator_smagorinsky(&v, &g, 1e-12).unwrap();
        for k in 1..5 {
            for i in 1..5 {
                let c = i + 6 * k;
                assert_relative_eq!(norms[c], gamma, max_relative = 1e-12);
                assert!(a.a[c] > 0.0 && a.a[c] <= 1.0);
            }
        }
    }

    #[test]
    fn normalisation_divides_by_max() {
        let a = normalized(vec![0.5, 1.0, 0.25], 1e-12);
        assert_eq!(a.a, vec![0.5, 1.0, 0.25]);
        assert_eq!(normalized(vec![1e-14, 0.0], 1e-12).a, vec![0.0, 0.0]);
    }

    #[test]
    fn viscosity_from_radius() {
        let mu = artificial_viscosity(&[0.4155f64], &indicator_linear(1), 1.9, 0.1).unwrap();
        assert!((mu[0] - 15.0).abs() < 0.01);
        let zero = artificial_viscosity(&[1.0, 2.0], &indicator_linear(2), 0.0, 0.1).unwrap();
        assert_eq!(zero, vec![0.0, 0.0]);
        let off = artificial_viscosity(&[1.0, 2.0], &IndicatorField { a: vec![0.0; 2] }, 3.0, 0.1).unwrap();
        assert_eq!(off, vec![0.0, 0.0]);
    }

    #[test]
    fn alpha_hint() {
        assert_eq!(smagorinsky_alpha_hint(0.094, 31.25, 0.1, 0.0), 0.0);
        let a: f64 = smagorinsky_alpha_hint(0.094, 31.25, 0.1, 0.1);
        assert!((a - 0.294).abs() < 5e-4);
        assert_relative_eq!(smagorinsky_alpha_hint(0.094, 62.5, 0.1, 0.1), 2.0 * a, max_relative = 1e-15);
    }

    #[test]
    fn zero_viscosity_is_identity() {
        let g = grid(4, 1.0);
        let phi: Vec<f64> = (0..16).map(|i| (i as f64).sin()).collect();
        let (out, it) =
            helmholtz_filter(&phi, &[0.0; 16], &[1.0; 16], 0.1, &g, &BoundarySpec::zero_gradient(), &SolverConfig::default())
                .unwrap();
        assert_eq!(out, phi);
        assert_eq!(it, 0);
    }

    #[test]
    fn deconvolution_indicator_of_constant_is_zero() {
        let g = grid(5, 1.0);
        let v = VectorField { x: vec![2.0; 25], z: vec![-1.0; 25] };
        let a = indicator_deconvolution(&v, 1.0, &g, &SolverConfig::default(), 1e-12).unwrap();
        assert!(a.a.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn kind_names() {
        for k in [FilterKind::Linear, FilterKind::Smagorinsky, FilterKind::Deconvolution] {
            assert_eq!(k.name().parse::<FilterKind>().unwrap(), k);
        }
        assert!("les".parse::<FilterKind>().is_err());
        assert!(FilterConfig::new(FilterKind::Deconvolution, 1.0, 0.0).is_err());
        assert!(FilterConfig::new(FilterKind::Linear, -1.0, 0.0).is_err());
    }
}
