#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use soliton_core::families::make_product;
use soliton_core::toric::*;
use soliton_core::Error;

fn solve(v: TruncatedSeries, h: Vec<f64>, d: usize) -> TruncatedSeries {
    solve_singular_ivp(&ToricInitialData::new(v, h).unwrap(), d).unwrap()
}

#[test]
fn dilog_oracle_through_degree_8() {
    let u = solve_singular_ivp(&ToricInitialData::zero(vec![1.0], 8).unwrap(), 8).unwrap();
    let oracle = TruncatedSeries::univariate(&dilog_cigar_coeffs(8), 8).unwrap();
    assert!(max_diff(&u, &oracle) <= 1e-10);
    assert!(ma_residual(&u, &[1.0]).unwrap().max_abs_coeff() <= 1e-11);
}

#[test]
fn product_oracle() {
    let v = TruncatedSeries::univariate(&dilog_cigar_coeffs(8), 8).unwrap();
    let u = solve(v, vec![1.0, 1.0], 8);
    assert!(max_diff(&u, &sum_series_2d(&dilog_cigar_coeffs(8), 8)) <= 1e-10);
    assert_eq!(u.coeff(&[1, 1]), 0.0);
    assert!((u.coeff(&[0, 2]) + 0.125).abs() < 1e-15);
    assert!(ma_residual(&u, &[1.0, 1.0]).unwrap().max_abs_coeff() <= 1e-11);
}

#[test]
fn cao_oracle() {
    let p = cao_potential_coeffs(2, 1.0, 8);
    assert!((p[1] - 1.0).abs() < 1e-15);
    assert!((p[2] + 1.0 / 12.0).abs() < 1e-15);
    let u = solve(TruncatedSeries::univariate(&p, 8).unwrap(), vec![1.0, 1.0], 8);
    assert!((u.coeff(&[1, 1]) + 1.0 / 6.0).abs() < 1e-12);
    assert!(max_diff(&u, &radial_series_2d(&p, 8)) <= 1e-10);
    assert!(ma_residual(&u, &[1.0, 1.0]).unwrap().max_abs_coeff() <= 1e-11);
}

#[test]
fn cao_oracle_in_one_dimension_is_dilog() {
    let p = cao_potential_coeffs(1, 1.0, 8);
    for (a, b) in p.iter().zip(dilog_cigar_coeffs(8)) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn closed_form_series_solve_the_equation() {
    let d = 8;
    let prod = sum_series_2d(&dilog_cigar_coeffs(d), d);
    assert!(ma_residual(&prod, &[1.0, 1.0]).unwrap().max_abs_coeff() <= 1e-13);
    let cao = radial_series_2d(&cao_potential_coeffs(2, 1.0, d), d);
    assert!(ma_residual(&cao, &[1.0, 1.0]).unwrap().max_abs_coeff() <= 1e-13);
}

fn random_initial_data(rng: &mut StdRng, n: usize, d: usize) -> ToricInitialData {
    let h: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let mut v = TruncatedSeries::zero(n - 1, d).unwrap();
    let monomials: Vec<Vec<u16>> = v.terms().map(|(e, _)| e.to_vec()).collect();
    for e in monomials {
        let deg: u16 = e.iter().sum();
        let c = match deg {
            0 => 0.0,
            1 => rng.random_range(0.5..2.0),
            // Geometric decay: convergence radius about 2, like the closed forms.
            _ => rng.random_range(-0.5..0.5) * 0.5f64.powi(deg as i32),
        };
        v.set(&e, c).unwrap();
    }
    ToricInitialData::new(v, h).unwrap()
}

#[test]
fn randomized_initial_data_give_exact_solutions() {
    let mut rng = StdRng::seed_from_u64(7);
    for case in 0..50 {
        let n = 2 + case % 3;
        let d = if n == 4 { 6 } else { 8 };
        let init = random_initial_data(&mut rng, n, d);
        let u = solve_singular_ivp(&init, d).unwrap();
        // Generic data give coefficients up to ~1e6 by degree 8, so the
        // roundoff floor scales with the solution.
        let scale = u.max_abs_coeff().max(1.0);
        let res = ma_residual(&u, init.h()).unwrap().max_abs_coeff();
        assert!(res <= 1e-11 * scale, "case {case}: residual {res}, max coeff {}, h {:?}", u.max_abs_coeff(), init.h());
        // u restricted to t = 0 is v.
        let v_back = u.last_var_coefficient(0).unwrap();
        assert!(max_diff(&v_back, init.v()) == 0.0);
    }
}

#[test]
fn solution_is_unique_and_depends_on_v() {
    let mut rng = StdRng::seed_from_u64(11);
    let init = random_initial_data(&mut rng, 3, 7);
    let a = solve_singular_ivp(&init, 7).unwrap();
    let b = solve_singular_ivp(&init, 7).unwrap();
    assert_eq!(a, b);
    let mut v = init.v().clone();
    let c = v.coeff(&[1, 1]);
    v.set(&[1, 1], c + 1e-3).unwrap();
    let moved = solve(v, init.h().to_vec(), 7);
    assert!(max_diff(&a, &moved) > 1e-4);
}

#[test]
fn degenerate_data() {
    let v = TruncatedSeries::from_terms(1, 4, [(&[2u16][..], 1.0)]).unwrap();
    let init = ToricInitialData::new(v, vec![1.0, 1.0]).unwrap();
    assert!(matches!(solve_singular_ivp(&init, 4), Err(Error::DegenerateInitialData(_))));
}

#[test]
fn series_product_reproduces_log() {
    // r · u'(r) = 2 ln(1 + r/2) for the dilog cigar.
    let d = 6;
    let u = TruncatedSeries::univariate(&dilog_cigar_coeffs(d), d).unwrap();
    let r = TruncatedSeries::variable(1, d, 0).unwrap();
    let ru = r.mul(&u.partial(0)).unwrap();
    for k in 1..=d {
        let expect = 2.0 * (-1f64).powi(k as i32 + 1) * 0.5f64.powi(k as i32) / k as f64;
        assert!((ru.coeff(&[k as u16]) - expect).abs() < 1e-15);
    }
}

#[test]
fn toric_eval_matches_closed_form_and_fd() {
    use num_complex::Complex64;
    use soliton_core::ckgeom::{metric_from_potential, FDScheme, PotentialField};
    let d = 24;
    let v = TruncatedSeries::univariate(&dilog_cigar_coeffs(d), d).unwrap();
    let u = solve(v, vec![1.0, 1.0], d);
    let z = [Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.4)];
    let e = toric_eval(&u, &[1.0, 1.0], &z, DEFAULT_TRUST).unwrap();
    let exact = make_product(&[2.0, 2.0], &[1.0, 1.0]).unwrap().metric_at(&z).unwrap();
    assert!(e.g.max_abs_diff(&exact) < 1e-9);

    let uu = u.clone();
    let phi = PotentialField::new(2, move |z| uu.eval(&[z[0].norm_sqr(), z[1].norm_sqr()]).unwrap());
    for k in 0..10 {
        let t = k as f64 / 10.0;
        let z = [Complex64::new(0.4 * t, -0.2), Complex64::new(0.1, 0.5 - 0.3 * t)];
        let g = toric_eval(&u, &[1.0, 1.0], &z, DEFAULT_TRUST).unwrap().g;
        let fd = metric_from_potential(&phi, &z, &FDScheme::default()).unwrap();
        assert!(g.max_abs_diff(&fd) < 1e-7, "{k}");
    }
}

#[test]
fn series_file_round_trip() {
    let u = solve_singular_ivp(&ToricInitialData::flat(vec![1.0, 2.0, 0.5], 6).unwrap(), 6).unwrap();
    let back = read_series(&write_series(&u)).unwrap();
    assert_eq!(u, back);
    assert_eq!(u.eval(&[0.1, 0.2, 0.3]).unwrap().to_bits(), back.eval(&[0.1, 0.2, 0.3]).unwrap().to_bits());
}

proptest! {
    #[test]
    fn euler_operator_scales_exponents(e0 in 0u16..4, e1 in 0u16..4, c in -10.0f64..10.0) {
        let s = TruncatedSeries::from_terms(2, 8, [(&[e0, e1][..], c)]).unwrap();
        prop_assert_eq!(s.euler(0).coeff(&[e0, e1]), c * e0 as f64);
        prop_assert_eq!(s.euler(1).coeff(&[e0, e1]), c * e1 as f64);
    }

    #[test]
    fn multiplication_commutes(a in proptest::collection::vec(-1.0f64..1.0, 10), b in proptest::collection::vec(-1.0f64..1.0, 10)) {
        let sa = TruncatedSeries::univariate(&a, 9).unwrap();
        let sb = TruncatedSeries::univariate(&b, 9).unwrap();
        prop_assert!(max_diff(&sa.mul(&sb).unwrap(), &sb.mul(&sa).unwrap()) < 1e-15);
    }
}
