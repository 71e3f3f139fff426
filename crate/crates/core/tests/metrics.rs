mod common;

use std::collections::BTreeMap;

use common::oracles;
use proptest::prelude::*;
use tshape_core::corpus::UserId;
use tshape_core::eval::metrics::{err_at, mrr_at, ndcg_at, ndcg_with_ideal, reciprocal_rank_at};
use tshape_core::eval::Ranking;

fn grades() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..=2, 1..=200)
}

fn cutoff() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![1usize, 5, 10, 100])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn metrics_match_direct_formulas(g in grades(), r in cutoff()) {
        let ndcg: f64 = ndcg_at(&g, r).unwrap();
        let err: f64 = err_at(&g, r).unwrap();
        let rr: f64 = reciprocal_rank_at(&g, r, 2).unwrap();
        prop_assert!((ndcg - oracles::ndcg(&g, r)).abs() <= 1e-12);
        prop_assert!((err - oracles::err(&g, r)).abs() <= 1e-12);
        prop_assert!((rr - oracles::reciprocal_rank(&g, r, 2)).abs() <= 1e-12);
        for v in [ndcg, err, rr] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn mrr_is_mean_reciprocal_rank(qs in prop::collection::vec(grades(), 1..8), r in cutoff(), min in 1u8..=2) {
        let got: f64 = mrr_at(&qs, r, min).unwrap();
        prop_assert!((got - oracles::mrr(&qs, r, min)).abs() <= 1e-12);
    }

    #[test]
    fn ideal_dcg_is_best_permutation(g in prop::collection::vec(0u8..=2, 1..=7), r in 1usize..=7) {
        prop_assert!((oracles::idcg(&g, r) - oracles::idcg_exhaustive(&g, r)).abs() <= 1e-12);
    }

    #[test]
    fn err_grows_with_cutoff(g in grades()) {
        let mut last = 0.0;
        for r in 1..=g.len() {
            let v: f64 = err_at(&g, r).unwrap();
            prop_assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn sorted_grades_score_one(mut g in grades(), r in cutoff()) {
        g.sort_unstable_by(|a, b| b.cmp(a));
        let v: f64 = ndcg_at(&g, r).unwrap();
        prop_assert!(g[0] == 0 || (v - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn monotone_score_transform_keeps_metrics(
        scores in prop::collection::vec(-5.0f64..5.0, 1..60),
        seed in any::<u64>(),
    ) {
        let rel: BTreeMap<UserId, u8> = (0..scores.len())
            .map(|i| (UserId(i as i64), ((seed >> (i % 60)) % 3) as u8))
            .collect();
        let entries = |f: &dyn Fn(f64) -> f64| {
            scores.iter().enumerate().map(|(i, &s)| (UserId(i as i64), f(s))).collect::<Vec<_>>()
        };
        let a = Ranking::new("q", entries(&|s| s), rel.clone()).unwrap();
        let b = Ranking::new("q", entries(&|s| (s * 0.5).exp() + 3.0), rel).unwrap();
        for r in [1, 5, 10] {
            prop_assert_eq!(a.ndcg::<f64>(r).unwrap(), b.ndcg::<f64>(r).unwrap());
            prop_assert_eq!(a.err::<f64>(r).unwrap(), b.err::<f64>(r).unwrap());
            prop_assert_eq!(a.reciprocal_rank::<f64>(r, 2).unwrap(), b.reciprocal_rank::<f64>(r, 2).unwrap());
        }
    }
}

#[test]
fn worked_values() {
    let ndcg: f64 = ndcg_at(&[2, 0, 1], 3).unwrap();
    assert_eq!(format!("{ndcg:.5}"), "0.96394");
    assert!((ndcg - 3.5 / oracles::idcg_exhaustive(&[2, 0, 1], 3)).abs() < 1e-15);
    assert_eq!(err_at::<f64>(&[2], 1).unwrap(), 0.75);
    assert_eq!(err_at::<f64>(&[2, 1], 2).unwrap(), 0.78125);
    assert_eq!(ndcg_at::<f64>(&[2, 1, 0], 3).unwrap(), 1.0);
    assert_eq!(ndcg_at::<f64>(&[0, 0, 0], 3).unwrap(), 0.0);
    assert_eq!(err_at::<f64>(&[0, 0], 2).unwrap(), 0.0);
    assert_eq!(reciprocal_rank_at::<f64>(&[0, 1, 0, 2], 10, 2).unwrap(), 0.25);
    assert_eq!(reciprocal_rank_at::<f64>(&[0, 1, 0, 2], 3, 2).unwrap(), 0.0);
}

#[test]
fn f32_agrees_with_f64() {
    let g = [2, 0, 1, 1, 0, 2, 0];
    let a: f32 = ndcg_at(&g, 5).unwrap();
    let b: f64 = ndcg_at(&g, 5).unwrap();
    assert!((f64::from(a) - b).abs() < 1e-6);
}

#[test]
fn ideal_pool_counts_unranked_relevant_users() {
    // A relevant user missing from the ranking lowers NDCG.
    let v: f64 = ndcg_with_ideal(&[2, 0], &[2, 0, 2], 2).unwrap();
    assert!((v - oracles::dcg(&[2, 0], 2) / oracles::dcg(&[2, 2], 2)).abs() < 1e-15);
}

#[test]
fn bad_inputs_error() {
    assert!(ndcg_at::<f64>(&[1], 0).is_err());
    assert!(err_at::<f64>(&[1], 0).is_err());
    assert!(mrr_at::<f64, Vec<u8>>(&[], 5, 2).is_err());
}

#[test]
fn ranking_ties_break_by_user_id() {
    let r = Ranking::new(
        "q",
        vec![(UserId(7), 0.5), (UserId(3), 0.5), (UserId(9), 0.9)],
        BTreeMap::new(),
    )
    .unwrap();
    let order: Vec<i64> = r.entries.iter().map(|e| e.0 .0).collect();
    assert_eq!(order, vec![9, 3, 7]);
}
