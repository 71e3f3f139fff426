mod common;

use common::oracles;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};
use tshape_core::eval::paired_t_test;
use tshape_core::eval::stats::{ln_gamma, regularized_incomplete_beta, student_t_two_sided};

fn reference_p(t: f64, df: usize) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df as f64).unwrap();
    2.0 * (1.0 - dist.cdf(t.abs()))
}

#[test]
fn worked_example() {
    let r = paired_t_test(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0], 0.05).unwrap();
    assert!((r.t_statistic - 3f64.sqrt()).abs() < 1e-12);
    assert_eq!(r.degrees_of_freedom, 2);
    // df = 2 has the closed form p = 1 - t / sqrt(t^2 + 2).
    let closed = 1.0 - 3f64.sqrt() / 5f64.sqrt();
    assert!((r.p_value - closed).abs() < 1e-12);
    assert_eq!(format!("{:.4}", r.p_value), "0.2254");
    assert!(!r.significant);
}

#[test]
fn degenerate_differences() {
    let a = [0.25, 0.75, 0.125];
    let same = paired_t_test(&a, &a, 0.05).unwrap();
    assert!(same.degenerate && !same.significant && same.t_statistic.is_nan());
    let shifted: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
    let r = paired_t_test(&shifted, &a, 0.05).unwrap();
    assert!(r.degenerate && !r.significant);
}

#[test]
fn bad_lengths_error() {
    assert!(paired_t_test(&[1.0, 2.0], &[1.0], 0.05).is_err());
    assert!(paired_t_test(&[1.0], &[2.0], 0.05).is_err());
}

#[test]
fn ln_gamma_known_values() {
    assert!(ln_gamma(1.0f64).abs() < 1e-12);
    assert!(ln_gamma(2.0f64).abs() < 1e-12);
    assert!((ln_gamma(0.5f64) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
    assert!((ln_gamma(10.0f64) - 362880f64.ln()).abs() < 1e-10);
}

#[test]
fn incomplete_beta_edges() {
    assert_eq!(regularized_incomplete_beta(2.0f64, 3.0, 0.0).unwrap(), 0.0);
    assert_eq!(regularized_incomplete_beta(2.0f64, 3.0, 1.0).unwrap(), 1.0);
    // I_x(1, 1) = x
    assert!((regularized_incomplete_beta(1.0f64, 1.0, 0.3).unwrap() - 0.3).abs() < 1e-12);
    assert!(regularized_incomplete_beta(1.0f64, 1.0, 1.5).is_err());
}

proptest! {
    #[test]
    fn p_value_matches_reference(t in -30.0f64..30.0, df in 1usize..200) {
        let p: f64 = student_t_two_sided(t, df).unwrap();
        prop_assert!((p - reference_p(t, df)).abs() < 1e-9, "t={} df={} p={} ref={}", t, df, p, reference_p(t, df));
    }

    #[test]
    fn statistic_matches_direct_formula(
        pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..40),
    ) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let r = paired_t_test(&a, &b, 0.05).unwrap();
        prop_assume!(!r.degenerate);
        let (t, df) = oracles::paired_t(&a, &b);
        prop_assert!((r.t_statistic - t).abs() <= 1e-9 * t.abs().max(1.0));
        prop_assert_eq!(r.degrees_of_freedom, df);
        prop_assert!((r.p_value - reference_p(t, df)).abs() < 1e-9);
        prop_assert_eq!(r.significant, r.p_value < 0.05);
        let flipped = paired_t_test(&b, &a, 0.05).unwrap();
        prop_assert_eq!(flipped.t_statistic, -r.t_statistic);
    }
}
