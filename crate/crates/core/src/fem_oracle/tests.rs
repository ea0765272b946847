use std::f64::consts::PI;

use num_complex::Complex64;

use super::*;
use crate::conformal::{ConformalMap, DensityField};
use crate::youngfn::YoungFunction;

const J11: f64 = 1.8411837813406595;

fn pp(c: f64, k: u32) -> ConformalMap {
    ConformalMap::perturbed_power(Complex64::new(c, 0.0), k).unwrap()
}

#[test]
fn bessel_values() {
    // J₀(1), J₁(1) reference values
    assert!((bessel_j0(1.0) - 0.7651976865579666).abs() < 1e-15);
    assert!((bessel_j1(1.0) - 0.44005058574493355).abs() < 1e-15);
    let j = j1_prime_first_zero();
    assert!((j - J11).abs() < 1e-12);
    assert!(bessel_j1_prime(j).abs() < 1e-12);
    assert!((mu_disk_reference() - 3.3899577166718897).abs() < 1e-11);
}

#[test]
fn mesh_topology_and_area() {
    let id = ConformalMap::identity();
    for level in 1..=5 {
        let mesh = mesh_from_map(&id, level).unwrap();
        let r = 1usize << level;
        assert_eq!(mesh.triangles().len(), 6 * r * r);
        assert_eq!(mesh.euler_characteristic(), 1, "level {level}");
        assert_eq!(mesh.boundary().iter().filter(|b| **b).count(), 6 * r);
    }
    let m3 = mesh_from_map(&id, 3).unwrap();
    assert!((m3.total_area() - PI).abs() < 1e-2);
    let m4 = mesh_from_map(&pp(0.5, 2), 4).unwrap();
    assert!((m4.total_area() - 1.125 * PI).abs() < 5e-3);
    assert!(mesh_from_map(&id, 0).is_err());
    assert!(mesh_from_map(&id, 9).is_err());
}

#[test]
fn mesh_size_halves_and_area_converges_quadratically() {
    let m = pp(0.5, 2);
    let exact = 1.125 * PI;
    let errs: Vec<f64> = (2..=5).map(|l| exact - mesh_from_map(&m, l).unwrap().total_area()).collect();
    for w in errs.windows(2) {
        let f = w[0] / w[1];
        assert!(f > 3.5 && f < 4.5, "area error ratio {f}");
    }
    let h: Vec<f64> = (3..=5).map(|l| mesh_from_map(&m, l).unwrap().mesh_size()).collect();
    assert!((h[0] / h[1] - 2.0).abs() < 0.3 && (h[1] / h[2] - 2.0).abs() < 0.3);
}

#[test]
fn mesh_dump_has_header_and_listing() {
    let mesh = mesh_from_map(&ConformalMap::identity(), 2).unwrap();
    let dump = mesh.dump();
    let mut lines = dump.lines();
    assert_eq!(lines.next().unwrap(), "trimesh 1 vertices=61 triangles=96 map=Identity level=2");
    assert_eq!(dump.lines().filter(|l| l.starts_with("v ")).count(), 61);
    assert_eq!(dump.lines().filter(|l| l.starts_with("t ")).count(), 96);
}

#[test]
fn unit_square_stencil() {
    // two triangles on [0,1]², checked through the sparse type directly
    let tri = [[0usize, 1, 2], [0, 2, 3]];
    let p = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let mut t = Vec::new();
    for tr in tri {
        let q = tr.map(|v| p[v]);
        let area = 0.5 * ((q[1][0] - q[0][0]) * (q[2][1] - q[0][1]) - (q[2][0] - q[0][0]) * (q[1][1] - q[0][1]));
        let b = [q[1][1] - q[2][1], q[2][1] - q[0][1], q[0][1] - q[1][1]];
        let c = [q[2][0] - q[1][0], q[0][0] - q[2][0], q[1][0] - q[0][0]];
        for i in 0..3 {
            for j in 0..3 {
                t.push((tr[i], tr[j], (b[i] * b[j] + c[i] * c[j]) / (4.0 * area)));
            }
        }
    }
    let a = SparseSymmetricMatrix::from_triplets(4, t);
    let expect = [[1.0, -0.5, 0.0, -0.5], [-0.5, 1.0, -0.5, 0.0], [0.0, -0.5, 1.0, -0.5], [-0.5, 0.0, -0.5, 1.0]];
    for i in 0..4 {
        for j in 0..4 {
            assert!((a.get(i, j) - expect[i][j]).abs() < 1e-15);
        }
        assert!(a.mul_vec(&[1.0; 4])[i].abs() < 1e-15);
    }
}

#[test]
fn assembly_properties() {
    let mesh = mesh_from_map(&pp(0.3, 3), 4).unwrap();
    let (a, m) = assemble(&mesh, &DensityField::Constant(1.0)).unwrap();
    assert!(a.asymmetry() < 1e-12 && m.asymmetry() < 1e-12);
    let n = a.dim();
    assert!(a.mul_vec(&vec![1.0; n]).iter().all(|v| v.abs() < 1e-10));
    assert!((m.sum() - mesh.total_area()).abs() < 1e-12);
    let gauss = assemble(&mesh, &DensityField::Gaussian { n: 2.0 }).unwrap().1;
    assert!(gauss.sum() < m.sum());
    assert!(matches!(assemble(&mesh, &DensityField::Constant(0.0)), Err(crate::Error::Density(_))));
}

#[test]
fn rayleigh_quotient_of_x() {
    let mesh = mesh_from_map(&ConformalMap::identity(), 5).unwrap();
    let (a, m) = assemble(&mesh, &DensityField::Constant(1.0)).unwrap();
    let x: Vec<f64> = mesh.vertices().iter().map(|v| v[0]).collect();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let rq = dot(&x, &a.mul_vec(&x)) / dot(&x, &m.mul_vec(&x));
    assert!((rq - 4.0).abs() < 2e-2, "{rq}");
    assert!(rq >= mu_disk_reference());
}

#[test]
fn skyline_cholesky_solves() {
    let mesh = mesh_from_map(&pp(0.5, 2), 3).unwrap();
    let (a, m) = assemble(&mesh, &DensityField::Constant(1.0)).unwrap();
    let k = a.add_scaled(1.0, &m);
    let fac = SkylineCholesky::factor(&k).unwrap();
    let b: Vec<f64> = (0..k.dim()).map(|i| (i as f64).sin()).collect();
    let x = fac.solve(&b);
    let r = k.mul_vec(&x);
    assert!(r.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-10));
    assert!(SkylineCholesky::factor(&k.scaled(-1.0)).is_err());
}

#[test]
fn dense_and_iterative_solvers_agree() {
    let mesh = mesh_from_map(&pp(0.5, 2), 4).unwrap();
    let (a, m) = assemble(&mesh, &DensityField::Gaussian { n: 1.0 }).unwrap();
    let d = first_nonzero_neumann(&a, &m).unwrap();
    assert_eq!(d.method, EigenMethod::Dense);
    let s = super::eigen::subspace(&a, &m).unwrap();
    assert!((d.mu - s.mu).abs() < 1e-9 * d.mu, "{} vs {}", d.mu, s.mu);
    assert!(d.residual < 1e-8 && s.residual < 1e-8);
}

#[test]
fn eigenvector_is_mass_orthogonal_to_constants() {
    let mesh = mesh_from_map(&pp(0.3, 3), 4).unwrap();
    let (a, m) = assemble(&mesh, &DensityField::Gaussian { n: 4.0 }).unwrap();
    let e = first_nonzero_neumann(&a, &m).unwrap();
    let n = a.dim();
    let m1 = m.mul_vec(&vec![1.0; n]);
    let proj: f64 = e.vector.iter().zip(&m1).map(|(u, w)| u * w).sum();
    assert!(proj.abs() <= 1e-8 * (n as f64).sqrt());
}

#[test]
fn density_scaling_scales_eigenvalue() {
    let mesh = mesh_from_map(&pp(0.5, 2), 4).unwrap();
    let rho = DensityField::Gaussian { n: 1.0 };
    let (a, m) = assemble(&mesh, &rho).unwrap();
    let (_, m3) = assemble(&mesh, &rho.clone().scaled(3.0)).unwrap();
    let e1 = first_nonzero_neumann(&a, &m).unwrap().mu;
    let e3 = first_nonzero_neumann(&a, &m3).unwrap().mu;
    assert!((e1 / e3 - 3.0).abs() < 1e-9);
}

#[test]
fn disk_reference_by_extrapolation() {
    let r = fem_reference(&ConformalMap::identity(), &DensityField::Constant(1.0), &[4, 5, 6]).unwrap();
    let exact = mu_disk_reference();
    assert!((r.extrapolated - exact).abs() < 5e-3 * exact, "{} vs {exact}", r.extrapolated);
    let f = r.convergence_factors()[0];
    assert!((3.0..=5.0).contains(&f), "convergence factor {f}");
    assert!(r.residuals.iter().all(|&x| x < 1e-8));
}

#[test]
fn richardson_is_exact_for_quadratic_error() {
    let (mu, c) = (2.0, 0.7);
    assert!((richardson(mu + c * 0.04, mu + c * 0.01) - mu).abs() < 1e-15);
}

#[test]
fn b_m2_trial_estimates() {
    let y = YoungFunction::exp_square();
    let e8 = b_m2_disk_estimate(8, &y).unwrap();
    let e12 = b_m2_disk_estimate(12, &y).unwrap();
    assert!(e8.value > 0.0 && e8.value.is_finite());
    assert!(e12.value >= e8.value);
    assert_eq!(e12.ratios.len(), 12);
    assert_eq!(&e12.ratios[..8], &e8.ratios[..]);
    assert!(b_m2_disk_estimate(7, &y).is_err());
    // x on the disk has median 0: ratio = ‖x‖_M / √π
    let quad = crate::conformal::DiskQuadrature::new(12, 32).unwrap();
    let x = crate::orlicz::SampledFunction::new(quad.nodes().iter().map(|z| z.re).collect(), quad.measure().clone())
        .unwrap();
    assert_eq!(crate::orlicz::weighted_median(&x), 0.0);
    let direct = crate::orlicz::luxemburg_norm(&x, &y).unwrap() / PI.sqrt();
    assert_eq!(e8.ratios[0], ("x".to_string(), direct));
}
