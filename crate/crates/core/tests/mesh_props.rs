mod common;

use common::{random_faces, random_field, rng};
use efr_core::mesh::{
    boundary_outflow, divergence_of_flux, face_normal_gradient, gauss_gradient, interpolate_to_faces, scale_by_area,
    BoundarySpec, Grid,
};
use proptest::prelude::*;
use rand::Rng;

fn grid_strategy() -> impl Strategy<Value = Grid<f64>> {
    (2usize..=12, 2usize..=12, 0.1f64..50.0, 0.1f64..50.0, -100.0f64..100.0, -100.0f64..100.0)
        .prop_map(|(nx, nz, dx, dz, x0, z0)| Grid::new(nx, nz, dx, dz, x0, z0).unwrap())
}

proptest! {
    #[test]
    fn gauss_identity_for_diffusive_fluxes(g in grid_strategy(), seed in any::<u64>(), wall in -5.0f64..5.0) {
        let mut r = rng(seed);
        let phi = random_field(&mut r, g.n_cells(), -10.0, 10.0);
        let coeff = random_faces(&mut r, &g, 0.0, 3.0);
        for bc in [BoundarySpec::zero_gradient(), BoundarySpec::fixed(wall)] {
            let flux = scale_by_area(&face_normal_gradient(&phi, &g, &bc).unwrap(), &coeff, &g);
            let div = divergence_of_flux(&flux, &g).unwrap();
            let total: f64 = div.iter().map(|d| d * g.cell_volume()).sum();
            let boundary = boundary_outflow(&flux);
            let scale = flux.x.iter().chain(&flux.z).map(|f| f.abs()).sum::<f64>().max(1e-300);
            prop_assert!((total - boundary).abs() <= 1e-12 * scale, "{} vs {}", total, boundary);
        }
    }

    #[test]
    fn gauss_gradient_exact_for_affine_fields(g in grid_strategy(), a in -5.0f64..5.0, b in -5.0f64..5.0, c in -50.0f64..50.0) {
        let phi: Vec<f64> = (0..g.n_cells()).map(|i| { let (x, z) = g.centroid(i); c + a * x + b * z }).collect();
        let grad = gauss_gradient(&phi, &g, &BoundarySpec::zero_gradient()).unwrap();
        let scale = a.abs().max(b.abs()) + (c.abs() + 100.0 * (a.abs() + b.abs())) / g.dx.min(g.dz);
        for k in 1..g.nz - 1 {
            for i in 1..g.nx - 1 {
                let cell = g.idx(i, k);
                prop_assert!((grad.x[cell] - a).abs() <= 1e-12 * scale);
                prop_assert!((grad.z[cell] - b).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn face_gradient_is_antisymmetric(g in grid_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let phi = random_field(&mut r, g.n_cells(), -10.0, 10.0);
        let (nx, nz) = (g.nx, g.nz);
        let mirror: Vec<f64> = (0..g.n_cells()).map(|c| phi[(nx - 1 - c % nx) + nx * (c / nx)]).collect();
        let bc = BoundarySpec::zero_gradient();
        let f = face_normal_gradient(&phi, &g, &bc).unwrap();
        let m = face_normal_gradient(&mirror, &g, &bc).unwrap();
        for k in 0..nz {
            for i in 0..=nx {
                prop_assert_eq!(f.x[f.xi(i, k)], -m.x[m.xi(nx - i, k)]);
            }
        }
    }

    #[test]
    fn interpolation_is_exact_for_linear_x(g in grid_strategy(), a in -5.0f64..5.0) {
        let phi: Vec<f64> = (0..g.n_cells()).map(|i| a * g.centroid(i).0).collect();
        let f = interpolate_to_faces(&phi, &g, &BoundarySpec::zero_gradient()).unwrap();
        for k in 0..g.nz {
            for i in 1..g.nx {
                let x = g.x0 + i as f64 * g.dx;
                prop_assert!((f.x[f.xi(i, k)] - a * x).abs() <= 1e-12 * (a.abs() * (x.abs() + g.dx)).max(1e-300));
            }
        }
    }
}

#[test]
fn telescoping_on_random_fluxes() {
    let mut r = rng(11);
    let g = Grid::new(9, 7, 3.0, 2.0, 0.0, 0.0).unwrap();
    let mut flux = random_faces(&mut r, &g, -1.0, 1.0);
    flux.x[0] = r.gen_range(-1.0..1.0);
    let div = divergence_of_flux(&flux, &g).unwrap();
    let total: f64 = div.iter().map(|d| d * g.cell_volume()).sum();
    assert!((total - boundary_outflow(&flux)).abs() < 1e-12);
}
