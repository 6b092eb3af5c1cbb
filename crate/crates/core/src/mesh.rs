//! Uniform orthogonal 2D finite-volume grid in the xz-plane and its
//! second-order discrete operators.
//!
//! Cells are numbered row-major with `i` (x) fastest: `c = i + nx * k`.
//! Face values are stored per axis and oriented along the positive axis
//! direction: x-face `(i, k)` sits at `x0 + i * dx` between cells `i - 1`
//! and `i`; z-face `(i, k)` sits at `z0 + k * dz` between rows `k - 1` and
//! `k`. Faces with `i == 0`, `i == nx` (x) or `k == 0`, `k == nz` (z) are
//! walls. The domain has unit depth in y, so a face area is the length of
//! the face.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    pub nx: usize,
    pub nz: usize,
    pub dx: T,
    pub dz: T,
    pub x0: T,
    pub z0: T,
}

impl<T: Real> Grid<T> {
    pub fn new(nx: usize, nz: usize, dx: T, dz: T, x0: T, z0: T) -> Result<Self> {
        if nx < 2 || nz < 2 {
            return Err(Error::config(
                "h",
                format!("grid needs at least 2 cells per axis, got {nx} x {nz}"),
            ));
        }
        if !(dx > T::zero() && dz > T::zero()) {
            return Err(Error::config("h", "cell sizes must be positive"));
        }
        Ok(Self { nx, nz, dx, dz, x0, z0 })
    }

    /// Square-celled grid covering `x_extent` x `z_extent` with spacing `h`.
    pub fn build(x_extent: [T; 2], z_extent: [T; 2], h: T) -> Result<Self> {
        if !(h > T::zero()) {
            return Err(Error::config("h", "mesh size must be positive"));
        }
        let nx = cells_along("x", x_extent, h)?;
        let nz = cells_along("z", z_extent, h)?;
        Self::new(nx, nz, h, h, x_extent[0], z_extent[0])
    }

    #[inline(always)]
    pub fn n_cells(&self) -> usize {
        self.nx * self.nz
    }

    #[inline(always)]
    pub fn idx(&self, i: usize, k: usize) -> usize {
        i + self.nx * k
    }

    #[inline(always)]
    pub fn cell_volume(&self) -> T {
        self.dx * self.dz
    }

    #[inline(always)]
    pub fn x_center(&self, i: usize) -> T {
        self.x0 + (lit::<T>(i as f64) + lit(0.5)) * self.dx
    }

    #[inline(always)]
    pub fn z_center(&self, k: usize) -> T {
        self.z0 + (lit::<T>(k as f64) + lit(0.5)) * self.dz
    }

    /// Height of z-face row `k` (wall rows included).
    #[inline(always)]
    pub fn z_face(&self, k: usize) -> T {
        self.z0 + lit::<T>(k as f64) * self.dz
    }

    pub fn centroid(&self, c: usize) -> (T, T) {
        (self.x_center(c % self.nx), self.z_center(c / self.nx))
    }

    /// Centroid height of every cell.
    pub fn cell_heights(&self) -> Vec<T> {
        (0..self.n_cells()).map(|c| self.z_center(c / self.nx)).collect()
    }

    /// Centroid abscissa of every cell.
    pub fn cell_abscissae(&self) -> Vec<T> {
        (0..self.n_cells()).map(|c| self.x_center(c % self.nx)).collect()
    }

    pub fn n_x_faces(&self) -> usize {
        (self.nx + 1) * self.nz
    }

    pub fn n_z_faces(&self) -> usize {
        self.nx * (self.nz + 1)
    }

    /// Area of an x-face (normal along x).
    #[inline(always)]
    pub fn area_x(&self) -> T {
        self.dz
    }

    /// Area of a z-face (normal along z).
    #[inline(always)]
    pub fn area_z(&self) -> T {
        self.dx
    }

    pub fn check_len(&self, what: &str, len: usize) -> Result<()> {
        if len != self.n_cells() {
            return Err(Error::Contract(format!(
                "{what} has {len} values, grid has {} cells",
                self.n_cells()
            )));
        }
        Ok(())
    }
}

fn cells_along<T: Real>(axis: &str, extent: [T; 2], h: T) -> Result<usize> {
    let len = extent[1] - extent[0];
    if !(len > T::zero()) {
        return Err(Error::config(
            "h",
            format!("{axis} extent [{}, {}] is not strictly ordered", extent[0], extent[1]),
        ));
    }
    let ratio = (len / h).as_f64();
    let n = ratio.round();
    if n < 1.0 || ((ratio - n) / n).abs() > 1e-9 {
        return Err(Error::config(
            "h",
            format!("{axis} extent {len} is not an integer multiple of h = {h}"),
        ));
    }
    Ok(n as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wall {
    West,
    East,
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallCondition<T> {
    /// Zero normal gradient (scalars, tangential velocity).
    ZeroGradient,
    /// Prescribed wall value (zero for the wall-normal velocity).
    FixedValue(T),
}

/// Velocity component along a grid axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec<T> {
    pub west: WallCondition<T>,
    pub east: WallCondition<T>,
    pub bottom: WallCondition<T>,
    pub top: WallCondition<T>,
}

impl<T: Real> BoundarySpec<T> {
    pub fn zero_gradient() -> Self {
        Self {
            west: WallCondition::ZeroGradient,
            east: WallCondition::ZeroGradient,
            bottom: WallCondition::ZeroGradient,
            top: WallCondition::ZeroGradient,
        }
    }

    pub fn fixed(value: T) -> Self {
        let f = WallCondition::FixedValue(value);
        Self { west: f, east: f, bottom: f, top: f }
    }

    /// Free-slip, impenetrable walls for one velocity component: the
    /// component vanishes on the walls it is normal to and has zero
    /// gradient on the others.
    pub fn free_slip(component: Axis) -> Self {
        let zero = WallCondition::FixedValue(T::zero());
        let zg = WallCondition::ZeroGradient;
        match component {
            Axis::X => Self { west: zero, east: zero, bottom: zg, top: zg },
            Axis::Z => Self { west: zg, east: zg, bottom: zero, top: zero },
        }
    }

    pub fn wall(&self, wall: Wall) -> WallCondition<T> {
        match wall {
            Wall::West => self.west,
            Wall::East => self.east,
            Wall::Bottom => self.bottom,
            Wall::Top => self.top,
        }
    }
}

/// Values on every face of a grid, oriented along the positive axes.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField<T> {
    pub nx: usize,
    pub nz: usize,
    /// x-faces, `(nx + 1) * nz` values, index `i + (nx + 1) * k`.
    pub x: Vec<T>,
    /// z-faces, `nx * (nz + 1)` values, index `i + nx * k`.
    pub z: Vec<T>,
}

impl<T: Real> FaceField<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        Self {
            nx: grid.nx,
            nz: grid.nz,
            x: vec![T::zero(); grid.n_x_faces()],
            z: vec![T::zero(); grid.n_z_faces()],
        }
    }

    pub fn filled(grid: &Grid<T>, value: T) -> Self {
        Self {
            nx: grid.nx,
            nz: grid.nz,
            x: vec![value; grid.n_x_faces()],
            z: vec![value; grid.n_z_faces()],
        }
    }

    #[inline(always)]
    pub fn xi(&self, i: usize, k: usize) -> usize {
        i + (self.nx + 1) * k
    }

    #[inline(always)]
    pub fn zi(&self, i: usize, k: usize) -> usize {
        i + self.nx * k
    }

    pub fn x_at(&self, i: usize, k: usize) -> T {
        self.x[self.xi(i, k)]
    }

    pub fn z_at(&self, i: usize, k: usize) -> T {
        self.z[self.zi(i, k)]
    }

    /// Elementwise map over both face sets.
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            nx: self.nx,
            nz: self.nz,
            x: self.x.iter().map(|&v| f(v)).collect(),
            z: self.z.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Zeroes the wall faces.
    pub fn clear_walls(&mut self) {
        let (nx, nz) = (self.nx, self.nz);
        for k in 0..nz {
            let w = self.xi(0, k);
            let e = self.xi(nx, k);
            self.x[w] = T::zero();
            self.x[e] = T::zero();
        }
        for i in 0..nx {
            let b = self.zi(i, 0);
            let t = self.zi(i, nz);
            self.z[b] = T::zero();
            self.z[t] = T::zero();
        }
    }

    pub(crate) fn check(&self, grid: &Grid<T>) -> Result<()> {
        if self.nx != grid.nx
            || self.nz != grid.nz
            || self.x.len() != grid.n_x_faces()
            || self.z.len() != grid.n_z_faces()
        {
            return Err(Error::Contract(format!(
                "face field sized for {}x{} does not match grid {}x{}",
                self.nx, self.nz, grid.nx, grid.nz
            )));
        }
        Ok(())
    }
}

/// Cell-centred vector field with x and z components.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VectorField<T> {
    pub x: Vec<T>,
    pub z: Vec<T>,
}

impl<T: Real> VectorField<T> {
    pub fn zeros(n: usize) -> Self {
        Self { x: vec![T::zero(); n], z: vec![T::zero(); n] }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn component(&self, axis: Axis) -> &[T] {
        match axis {
            Axis::X => &self.x,
            Axis::Z => &self.z,
        }
    }

    /// Pointwise magnitude.
    pub fn magnitude(&self) -> Vec<T> {
        self.x.iter().zip(&self.z).map(|(&a, &b)| (a * a + b * b).sqrt()).collect()
    }
}

#[inline(always)]
fn boundary_value<T: Real>(cond: WallCondition<T>, inner: T) -> T {
    match cond {
        WallCondition::ZeroGradient => inner,
        WallCondition::FixedValue(v) => v,
    }
}

/// Face value of `phi` on every face: arithmetic mean inside, boundary
/// condition on the walls.
pub fn interpolate_to_faces<T: Real>(
    phi: &[T],
    grid: &Grid<T>,
    bc: &BoundarySpec<T>,
) -> Result<FaceField<T>> {
    grid.check_len("phi", phi.len())?;
    let (nx, nz) = (grid.nx, grid.nz);
    let half = lit::<T>(0.5);
    let mut out = FaceField::zeros(grid);
    for k in 0..nz {
        let row = &phi[nx * k..nx * (k + 1)];
        let base = (nx + 1) * k;
        out.x[base] = boundary_value(bc.west, row[0]);
        for i in 1..nx {
            out.x[base + i] = half * (row[i - 1] + row[i]);
        }
        out.x[base + nx] = boundary_value(bc.east, row[nx - 1]);
    }
    for i in 0..nx {
        out.z[i] = boundary_value(bc.bottom, phi[i]);
        out.z[i + nx * nz] = boundary_value(bc.top, phi[i + nx * (nz - 1)]);
    }
    for k in 1..nz {
        for i in 0..nx {
            out.z[i + nx * k] = half * (phi[i + nx * (k - 1)] + phi[i + nx * k]);
        }
    }
    Ok(out)
}

/// Gradient along the positive axis on every face. Central difference
/// between neighbouring centroids inside; zero on zero-gradient walls and a
/// half-cell one-sided difference on fixed-value walls.
pub fn face_normal_gradient<T: Real>(
    phi: &[T],
    grid: &Grid<T>,
    bc: &BoundarySpec<T>,
) -> Result<FaceField<T>> {
    grid.check_len("phi", phi.len())?;
    let (nx, nz) = (grid.nx, grid.nz);
    let two = lit::<T>(2.0);
    let (rdx, rdz) = (grid.dx.recip(), grid.dz.recip());
    let one_sided = |cond: WallCondition<T>, inner: T, rd: T, outward: T| match cond {
        WallCondition::ZeroGradient => T::zero(),
        // outward gradient (phi_b - phi_P)/(d/2), flipped to the +axis orientation
        WallCondition::FixedValue(b) => outward * (b - inner) * two * rd,
    };
    let mut out = FaceField::zeros(grid);
    for k in 0..nz {
        let row = &phi[nx * k..nx * (k + 1)];
        let base = (nx + 1) * k;
        out.x[base] = one_sided(bc.west, row[0], rdx, -T::one());
        for i in 1..nx {
            out.x[base + i] = (row[i] - row[i - 1]) * rdx;
        }
        out.x[base + nx] = one_sided(bc.east, row[nx - 1], rdx, T::one());
    }
    for i in 0..nx {
        out.z[i] = one_sided(bc.bottom, phi[i], rdz, -T::one());
        out.z[i + nx * nz] = one_sided(bc.top, phi[i + nx * (nz - 1)], rdz, T::one());
    }
    for k in 1..nz {
        for i in 0..nx {
            out.z[i + nx * k] = (phi[i + nx * k] - phi[i + nx * (k - 1)]) * rdz;
        }
    }
    Ok(out)
}

/// Cell gradient by the Gauss theorem with linearly interpolated face values.
pub fn gauss_gradient<T: Real>(
    phi: &[T],
    grid: &Grid<T>,
    bc: &BoundarySpec<T>,
) -> Result<VectorField<T>> {
    let faces = interpolate_to_faces(phi, grid, bc)?;
    Ok(face_difference(&faces, grid))
}

/// Per-cell `(east - west) / dx`, `(top - bottom) / dz` of a face field.
pub(crate) fn face_difference<T: Real>(faces: &FaceField<T>, grid: &Grid<T>) -> VectorField<T> {
    let (nx, nz) = (grid.nx, grid.nz);
    let (rdx, rdz) = (grid.dx.recip(), grid.dz.recip());
    let mut g = VectorField::zeros(grid.n_cells());
    for k in 0..nz {
        for i in 0..nx {
            let c = i + nx * k;
            g.x[c] = (faces.x[faces.xi(i + 1, k)] - faces.x[faces.xi(i, k)]) * rdx;
            g.z[c] = (faces.z[faces.zi(i, k + 1)] - faces.z[faces.zi(i, k)]) * rdz;
        }
    }
    g
}

/// Divergence of an integrated face flux (per unit volume).
pub fn divergence_of_flux<T: Real>(flux: &FaceField<T>, grid: &Grid<T>) -> Result<Vec<T>> {
    flux.check(grid)?;
    let (nx, nz) = (grid.nx, grid.nz);
    let rvol = grid.cell_volume().recip();
    let mut div = vec![T::zero(); grid.n_cells()];
    for k in 0..nz {
        for i in 0..nx {
            let net = flux.x[flux.xi(i + 1, k)] - flux.x[flux.xi(i, k)] + flux.z[flux.zi(i, k + 1)]
                - flux.z[flux.zi(i, k)];
            div[i + nx * k] = net * rvol;
        }
    }
    Ok(div)
}

/// Net outflow through the walls: the right-hand side of the discrete Gauss
/// identity `sum_i |cell| div_i = boundary outflow`.
pub fn boundary_outflow<T: Real>(flux: &FaceField<T>) -> T {
    let (nx, nz) = (flux.nx, flux.nz);
    let mut s = T::zero();
    for k in 0..nz {
        s = s + flux.x[flux.xi(nx, k)] - flux.x[flux.xi(0, k)];
    }
    for i in 0..nx {
        s = s + flux.z[flux.zi(i, nz)] - flux.z[flux.zi(i, 0)];
    }
    s
}

/// Converts a face-normal gradient into an integrated diffusive flux
/// `coeff * grad * area`.
pub fn scale_by_area<T: Real>(grad: &FaceField<T>, coeff: &FaceField<T>, grid: &Grid<T>) -> FaceField<T> {
    let (ax, az) = (grid.area_x(), grid.area_z());
    FaceField {
        nx: grad.nx,
        nz: grad.nz,
        x: grad.x.iter().zip(&coeff.x).map(|(&g, &c)| g * c * ax).collect(),
        z: grad.z.iter().zip(&coeff.z).map(|(&g, &c)| g * c * az).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_grid(nx: usize, nz: usize, d: f64) -> Grid<f64> {
        Grid::new(nx, nz, d, d, 0.0, 0.0).unwrap()
    }

    #[test]
    fn build_density_current_grid() {
        let g = Grid::build([0.0, 25600.0], [0.0, 6400.0], 200.0).unwrap();
        assert_eq!((g.nx, g.nz), (128, 32));
        assert_eq!(g.dx, 200.0);
    }

    #[test]
    fn build_square_grid() {
        let g = Grid::build([0.0, 10000.0], [0.0, 10000.0], 125.0).unwrap();
        assert_eq!((g.nx, g.nz), (80, 80));
    }

    #[test]
    fn build_rejects_degenerate_and_non_divisible() {
        assert!(Grid::build([0.0, 1.0], [0.0, 1.0], 1.0).is_err());
        let err = Grid::build([0.0, 1000.0], [0.0, 1050.0], 100.0).unwrap_err();
        assert!(err.to_string().contains("z extent"), "{err}");
        assert!(Grid::build([10.0, 0.0], [0.0, 100.0], 10.0).is_err());
    }

    #[test]
    fn centroids() {
        let g = Grid::new(4, 3, 2.0, 3.0, 10.0, -1.0).unwrap();
        assert_eq!(g.centroid(g.idx(1, 2)), (13.0, 6.5));
    }

    #[test]
    fn face_gradient_of_constant_is_zero() {
        let g = unit_grid(5, 4, 1.0);
        let fg = face_normal_gradient(&vec![3.5; 20], &g, &BoundarySpec::zero_gradient()).unwrap();
        assert!(fg.x.iter().chain(&fg.z).all(|&v| v == 0.0));
    }

    #[test]
    fn face_gradient_of_x() {
        let g = unit_grid(4, 3, 1.0);
        let phi = g.cell_abscissae();
        let fg = face_normal_gradient(&phi, &g, &BoundarySpec::zero_gradient()).unwrap();
        for k in 0..3 {
            assert_eq!(fg.x_at(0, k), 0.0);
            assert_eq!(fg.x_at(4, k), 0.0);
            for i in 1..4 {
                assert_eq!(fg.x_at(i, k), 1.0);
            }
        }
        assert!(fg.z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn face_gradient_of_z_on_coarse_cells() {
        let g = unit_grid(3, 4, 2.0);
        let fg = face_normal_gradient(&g.cell_heights(), &g, &BoundarySpec::zero_gradient()).unwrap();
        for k in 1..4 {
            for i in 0..3 {
                assert_eq!(fg.z_at(i, k), 1.0);
            }
        }
        // scaled field: z/2 on dz = 2 cells
        let half: Vec<f64> = g.cell_heights().iter().map(|z| 0.5 * z).collect();
        let fg = face_normal_gradient(&half, &g, &BoundarySpec::zero_gradient()).unwrap();
        assert_eq!(fg.z_at(1, 2), 0.5);
    }

    #[test]
    fn fixed_value_wall_gradient() {
        let g = unit_grid(2, 2, 1.0);
        let phi = vec![1.0, 2.0, 3.0, 4.0];
        let fg = face_normal_gradient(&phi, &g, &BoundarySpec::fixed(0.0)).unwrap();
        // west wall: +x oriented gradient (phi_P - 0) / 0.5
        assert_eq!(fg.x_at(0, 0), 2.0);
        // east wall: (0 - phi_P) / 0.5
        assert_eq!(fg.x_at(2, 0), -4.0);
        assert_eq!(fg.z_at(0, 0), 2.0);
        assert_eq!(fg.z_at(1, 2), -8.0);
    }

    #[test]
    fn gauss_gradient_exact_for_linear_fields() {
        let g = unit_grid(4, 4, 1.0);
        let bc = BoundarySpec::zero_gradient();
        let phi: Vec<f64> = g.cell_abscissae().iter().map(|x| 2.0 * x).collect();
        let gr = gauss_gradient(&phi, &g, &bc).unwrap();
        let c = g.idx(1, 2);
        assert_relative_eq!(gr.x[c], 2.0, max_relative = 1e-12);
        assert_eq!(gr.z[c], 0.0);
        let phi: Vec<f64> = g.cell_heights().iter().map(|z| 3.0 * z).collect();
        let gr = gauss_gradient(&phi, &g, &bc).unwrap();
        assert_eq!(gr.x[c], 0.0);
        assert_relative_eq!(gr.z[c], 3.0, max_relative = 1e-12);
        let gr = gauss_gradient(&vec![7.0; 16], &g, &bc).unwrap();
        assert!(gr.x.iter().chain(&gr.z).all(|&v| v == 0.0));
    }

    #[test]
    fn divergence_sign_convention() {
        let g = unit_grid(2, 2, 1.0);
        let mut f = FaceField::zeros(&g);
        let face = f.xi(1, 0);
        f.x[face] = 1.0;
        let div = divergence_of_flux(&f, &g).unwrap();
        assert_eq!(div, vec![1.0, -1.0, 0.0, 0.0]);
        assert_eq!(divergence_of_flux(&FaceField::zeros(&g), &g).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn uniform_flux_has_zero_interior_divergence() {
        let g = unit_grid(5, 3, 1.0);
        let mut f = FaceField::zeros(&g);
        f.x.iter_mut().for_each(|v| *v = 2.5);
        let div = divergence_of_flux(&f, &g).unwrap();
        assert!(div.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn interpolation_midpoint_and_linear() {
        let g = unit_grid(2, 2, 1.0);
        let f = interpolate_to_faces(&[1.0, 3.0, 1.0, 3.0], &g, &BoundarySpec::zero_gradient()).unwrap();
        assert_eq!(f.x_at(1, 0), 2.0);
        let g = unit_grid(4, 2, 0.5);
        let f = interpolate_to_faces(&g.cell_abscissae(), &g, &BoundarySpec::zero_gradient()).unwrap();
        for i in 1..4 {
            assert_eq!(f.x_at(i, 1), 0.5 * i as f64);
        }
        let f = interpolate_to_faces(&[4.0; 8], &g, &BoundarySpec::zero_gradient()).unwrap();
        assert!(f.x.iter().chain(&f.z).all(|&v| v == 4.0));
    }

    #[test]
    fn size_mismatch_is_contract_violation() {
        let g = unit_grid(3, 3, 1.0);
        let err = gauss_gradient(&[1.0; 4], &g, &BoundarySpec::zero_gradient()).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn works_in_single_precision() {
        let g = Grid::<f32>::build([0.0, 8.0], [0.0, 4.0], 1.0).unwrap();
        let phi: Vec<f32> = g.cell_abscissae();
        let gr = gauss_gradient(&phi, &g, &BoundarySpec::zero_gradient()).unwrap();
        assert_eq!(gr.x[g.idx(3, 1)], 1.0);
    }
}
