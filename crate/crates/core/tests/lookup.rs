use std::collections::BTreeMap;

use chrono::{Duration, TimeZone, Utc};
use proptest::prelude::*;
use tshape_core::corpus::{Corpus, Post, PostId, UserId};
use tshape_core::embedding::DocVector;
use tshape_core::nn::{build_embedding_matrix, candidate_matrix, EmbeddingMatrix};

fn case() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (1usize..=20, 1usize..=6).prop_flat_map(|(n, m_d)| (Just(n), Just(m_d), prop::collection::vec(0i64..50, 0..=2 * n)))
}

fn zero_rows_from<T: tshape_core::Real>(e: &EmbeddingMatrix<T>, start: usize) -> bool {
    (start..e.rows()).all(|j| e.row(j).iter().all(|x| x.is_zero()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matrix_stacks_then_pads((n, m_d, minutes) in case()) {
        let docs: Vec<Vec<f64>> = (0..minutes.len())
            .map(|i| (0..m_d).map(|k| (i * m_d + k + 1) as f64).collect())
            .collect();
        let e = build_embedding_matrix::<f64, _>(&docs, n, m_d).unwrap();
        prop_assert_eq!((e.rows(), e.cols()), (n, m_d));
        let filled = docs.len().min(n);
        for j in 0..filled {
            prop_assert_eq!(e.row(j), docs[j].as_slice());
        }
        prop_assert!(zero_rows_from(&e, filled));
    }

    #[test]
    fn candidate_rows_are_oldest_answers((n, m_d, minutes) in case()) {
        let t0 = Utc.with_ymd_and_hms(2022, 6, 1, 0, 0, 0).unwrap();
        let user = UserId(5);
        let mut posts = vec![Post::question(PostId(1), Some(UserId(9)), ["t".to_string()], "q", t0)];
        let mut vectors = BTreeMap::new();
        let mut expected: Vec<(i64, i64)> = Vec::new();
        for (i, &m) in minutes.iter().enumerate() {
            let id = 100 + i as i64;
            posts.push(Post::answer(PostId(id), PostId(1), Some(user), "a", t0 + Duration::minutes(m), false));
            vectors.insert(PostId(id), DocVector::from_raw(vec![id as f64; m_d]));
            expected.push((m, id));
        }
        let corpus = Corpus::build(posts).unwrap().0;
        expected.sort_unstable();
        let e = candidate_matrix::<f64>(&corpus, user, &vectors, n, m_d).unwrap();
        prop_assert_eq!((e.rows(), e.cols()), (n, m_d));
        let filled = expected.len().min(n);
        for (j, &(_, id)) in expected.iter().take(n).enumerate() {
            prop_assert!(e.row(j).iter().all(|&x| x == id as f64));
        }
        prop_assert!(zero_rows_from(&e, filled));
    }
}

#[test]
fn wrong_width_is_a_shape_error() {
    let docs = vec![vec![0.5, 0.5], vec![1.0]];
    assert!(build_embedding_matrix::<f32, _>(&docs, 3, 2).is_err());
}

#[test]
fn missing_vector_errors() {
    let t0 = Utc.with_ymd_and_hms(2022, 6, 1, 0, 0, 0).unwrap();
    let posts = vec![
        Post::question(PostId(1), None, ["t".to_string()], "q", t0),
        Post::answer(PostId(2), PostId(1), Some(UserId(1)), "a", t0, false),
    ];
    let corpus = Corpus::build(posts).unwrap().0;
    assert!(candidate_matrix::<f64>(&corpus, UserId(1), &BTreeMap::new(), 2, 2).is_err());
}

#[test]
fn unknown_user_gives_all_zero_matrix() {
    let corpus = Corpus::empty();
    let e = candidate_matrix::<f32>(&corpus, UserId(1), &BTreeMap::new(), 4, 3).unwrap();
    assert!(zero_rows_from(&e, 0));
}
