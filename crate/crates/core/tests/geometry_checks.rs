use std::sync::Arc;

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use soliton_core::ckgeom::*;
use soliton_core::families::*;
use soliton_core::toric::{solve_singular_ivp, ToricInitialData};
use soliton_core::verify::*;
use soliton_core::{Error, Execution};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn cao_residual_both_halves() {
    let cao = make_cao(2, 1.0).unwrap();
    let grid = GridSpec::square(2, 1.2, 3).unwrap();
    let r = check_soliton_residual(&cao, &grid, 1e-7, &CheckOptions::default()).unwrap();
    assert!(r.pass(), "{:?} {:?}", r.monge_ampere.max_dev, r.y_invariance.max_dev);
}

#[test]
fn product_conservation_mean() {
    let p = make_product(&[2.0, 2.0], &[1.0, 2.0]).unwrap();
    let grid = GridSpec::square(2, 1.0, 3).unwrap();
    let r = check_conservation(&p, &grid, 1e-6, &CheckOptions::default()).unwrap();
    assert!(r.pass);
    assert_abs_diff_eq!(r.mean_value, 3.0, epsilon = 1e-7);
}

#[test]
fn flat_metric_has_zero_constant() {
    let flat = make_cigar(2.0, 0.0).unwrap();
    let r = check_conservation(&flat, &GridSpec::segment(1, 2.0, 11).unwrap(), 1e-9, &CheckOptions::default()).unwrap();
    assert!(r.pass && r.mean_value.abs() < 1e-9);
    let lie = check_lie_derivative(&flat, &GridSpec::segment(1, 2.0, 11).unwrap(), 1e-4, 1e-9, &CheckOptions::default()).unwrap();
    assert!(lie.pass);
}

#[test]
fn product_lie_derivative() {
    let p = make_product(&[2.0, 2.0], &[1.0, 2.0]).unwrap();
    let grid = GridSpec::square(2, 1.0, 3).unwrap();
    let r = check_lie_derivative(&p, &grid, 1e-4, 1e-5, &CheckOptions::default()).unwrap();
    assert!(r.pass, "{}", r.max_dev);
}

#[test]
fn sequential_and_parallel_reports_agree() {
    let cao = make_cao(2, 0.7).unwrap();
    let grid = GridSpec::segment(2, 1.0, 4).unwrap();
    let seq = CheckOptions { exec: Execution::Sequential, ..Default::default() };
    let par = CheckOptions { exec: Execution::Parallel, ..Default::default() };
    assert_eq!(check_conservation(&cao, &grid, 1e-6, &seq).unwrap(), check_conservation(&cao, &grid, 1e-6, &par).unwrap());
}

#[test]
fn laplacian_of_exp_f() {
    // Tracing Ric = ∇²f and using the conservation law gives Δe^f = 2h e^f.
    let fam = make_cigar(2.0, 1.0).unwrap();
    let f = fam.clone();
    let ef = PotentialField::new(1, move |z| f.ricci_potential(z).unwrap().exp());
    for &z in &[c(0.0, 0.0), c(0.7, -0.2), c(1.5, 1.1)] {
        let lap = laplacian(&ef, &fam, &[z], &FDScheme::default()).unwrap();
        let target = 2.0 * fam.ricci_potential(&[z]).unwrap().exp();
        assert!((lap - target).abs() < 1e-6, "{lap} vs {target}");
    }
}

#[test]
fn numeric_z_matches_linear_field() {
    let cao = make_cao(3, 1.3).unwrap();
    let z = [c(0.3, 0.2), c(-0.4, 0.1), c(0.2, -0.5)];
    let zf = associated_z(&cao, &z, &FDScheme::default()).unwrap();
    for (a, b) in zf.components.iter().zip(cao.z_field(&z)) {
        assert!((a - b).norm() < 1e-8);
    }
}

#[test]
fn exact_product_ricci_matches_fd() {
    let p = make_product(&[1.5, 3.0], &[0.8, -0.4]).unwrap();
    let z = [c(0.6, -0.3), c(1.1, 0.9)];
    let fd = ricci_from_metric(&p, &z, &FDScheme::default()).unwrap().ricci;
    assert!(fd.max_abs_diff(&p.ricci_exact(&z).unwrap().unwrap()) < 1e-8);
}

#[test]
fn cao_negative_h_domain() {
    let p = make_cao(2, -1.0).unwrap();
    let r_max = CaoProfile::new(2, -1.0).unwrap().r_max();
    assert_abs_diff_eq!(r_max, 2.0 * 2f64.sqrt(), epsilon = 1e-14);
    assert!(matches!(p.metric_at(&[c(1.7, 0.0), c(0.0, 0.0)]), Err(Error::OutOfDomain(_))));
    assert!(p.metric_at(&[c(1.6, 0.0), c(0.0, 0.0)]).unwrap().is_positive_definite());
}

#[test]
fn series_model_checks() {
    let init = ToricInitialData::zero(vec![1.0], 24).unwrap();
    let u = solve_singular_ivp(&init, 24).unwrap();
    let model = SeriesModel::new(u, vec![1.0], 0.5).unwrap();
    let grid = GridSpec::square(1, 0.3, 5).unwrap();
    let opts = CheckOptions::default();
    assert!(check_soliton_residual(&model, &grid, 1e-6, &opts).unwrap().pass());
    assert!(check_conservation(&model, &grid, 1e-6, &opts).unwrap().pass);
    let bad = Perturbed::new(&model, Perturbation::QuarticPotential);
    assert!(!check_soliton_residual(&bad, &grid, 1e-6, &opts).unwrap().pass());
}

#[test]
fn domain_errors_surface() {
    let fam = make_cigar(2.0, -1.0).unwrap();
    let grid = GridSpec::segment(1, 1.5, 5).unwrap();
    let r = check_conservation(&fam, &grid, 1e-6, &CheckOptions::default());
    assert!(matches!(r, Err(Error::DomainTooSmall(_)) | Err(Error::SingularMetric(_))), "{r:?}");
}

#[test]
fn custom_potential_domain() {
    let disc = Domain::Predicate(Arc::new(|z: &[Complex64]| z[0].norm() < 1.0));
    let phi = PotentialField::new(1, |z| -(1.0 - z[0].norm_sqr()).ln()).with_domain(disc);
    let g = metric_from_potential(&phi, &[c(0.5, 0.0)], &FDScheme::default()).unwrap();
    assert_abs_diff_eq!(g.get(0, 0).re, 1.0 / 0.5625, epsilon = 1e-8);
    assert!(metric_from_potential(&phi, &[c(0.99999, 0.0)], &FDScheme::default()).is_err());
}

proptest! {
    #[test]
    fn hermitian_matrices_are_symmetrized(entries in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 9)) {
        let m = DMatrix::from_iterator(3, 3, entries.iter().map(|&(a, b)| c(a, b)));
        let h = HermitianMatrix::from_matrix(m);
        for i in 0..3 {
            prop_assert_eq!(h.get(i, i).im, 0.0);
            for j in 0..3 {
                prop_assert_eq!(h.get(i, j), h.get(j, i).conj());
            }
        }
    }

    #[test]
    fn family_metrics_are_hermitian_positive(x in -1.0f64..1.0, y in -1.0f64..1.0, u in -1.0f64..1.0, v in -1.0f64..1.0) {
        let z = [c(x, y), c(u, v)];
        for fam in [make_cao(2, 0.9).unwrap(), make_product(&[2.0, 1.0], &[1.0, 3.0]).unwrap()] {
            let g = fam.metric_at(&z).unwrap();
            prop_assert!(g.is_positive_definite());
            prop_assert_eq!(g.get(0, 1), g.get(1, 0).conj());
        }
    }

    #[test]
    fn flow_pullback_agrees(t in -1.0f64..2.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let r = cigar_flow_pullback(2.0, 1.0, t, c(x, y)).unwrap();
        prop_assert!((r.evolved - r.pulled_back).abs() <= 1e-12);
    }
}
