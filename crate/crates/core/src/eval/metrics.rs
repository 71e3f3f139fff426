//! Graded-relevance ranking metrics over grades listed in rank order.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Highest grade in use; fixes the ERR stop-probability denominator.
pub const MAX_GRADE: u8 = 2;

fn check_cutoff(r: usize) -> Result<()> {
    if r < 1 {
        return Err(Error::invalid("cutoff R must be >= 1"));
    }
    Ok(())
}

fn gain<T: Real>(g: u8) -> T {
    T::of(2.0).powi(i32::from(g)) - T::one()
}

fn dcg<T: Real>(grades: &[u8], r: usize) -> T {
    grades
        .iter()
        .take(r)
        .enumerate()
        .map(|(i, &g)| gain::<T>(g) / T::of_usize(i + 2).log2())
        .sum()
}

/// `DCG@R / IDCG@R` with exponential gain; the ideal ordering sorts
/// `ideal_pool` by grade. Zero when no item is relevant.
pub fn ndcg_with_ideal<T: Real>(grades: &[u8], ideal_pool: &[u8], r: usize) -> Result<T> {
    check_cutoff(r)?;
    let mut ideal = ideal_pool.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: T = dcg(&ideal, r);
    if idcg == T::zero() {
        return Ok(T::zero());
    }
    Ok(dcg::<T>(grades, r) / idcg)
}

pub fn ndcg_at<T: Real>(grades: &[u8], r: usize) -> Result<T> {
    ndcg_with_ideal(grades, grades, r)
}

/// Expected reciprocal rank under the cascade model.
pub fn err_at<T: Real>(grades: &[u8], r: usize) -> Result<T> {
    check_cutoff(r)?;
    let denom = T::of(2.0).powi(i32::from(MAX_GRADE));
    let mut not_stopped = T::one();
    let mut total = T::zero();
    for (i, &g) in grades.iter().take(r).enumerate() {
        let stop = gain::<T>(g) / denom;
        total = total + not_stopped * stop / T::of_usize(i + 1);
        not_stopped = not_stopped * (T::one() - stop);
    }
    Ok(total)
}

/// `1 / rank` of the first entry with grade `>= min_grade` in the top `r`.
pub fn reciprocal_rank_at<T: Real>(grades: &[u8], r: usize, min_grade: u8) -> Result<T> {
    check_cutoff(r)?;
    Ok(grades
        .iter()
        .take(r)
        .position(|&g| g >= min_grade)
        .map_or(T::zero(), |i| T::one() / T::of_usize(i + 1)))
}

/// Mean reciprocal rank over queries.
pub fn mrr_at<T: Real, G: AsRef<[u8]>>(queries: &[G], r: usize, min_grade: u8) -> Result<T> {
    if queries.is_empty() {
        return Err(Error::invalid("MRR needs at least one ranking"));
    }
    let total = queries
        .iter()
        .map(|g| reciprocal_rank_at::<T>(g.as_ref(), r, min_grade))
        .sum::<Result<T>>()?;
    Ok(total / T::of_usize(queries.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ndcg_examples() {
        assert_eq!(ndcg_at::<f64>(&[2, 1, 0], 3).unwrap(), 1.0);
        let v: f64 = ndcg_at(&[2, 0, 1], 3).unwrap();
        assert!((v - 3.5 / (3.0 + 1.0 / 3f64.log2())).abs() < 1e-15);
        assert!((v - 0.96394).abs() < 5e-6);
        assert_eq!(ndcg_at::<f64>(&[0, 0, 0], 3).unwrap(), 0.0);
        assert!(ndcg_at::<f64>(&[1], 0).is_err());
    }

    #[test]
    fn err_examples() {
        assert_eq!(err_at::<f64>(&[2], 1).unwrap(), 0.75);
        assert_eq!(err_at::<f64>(&[2, 1], 2).unwrap(), 0.78125);
        assert_eq!(err_at::<f64>(&[0, 0], 2).unwrap(), 0.0);
    }

    #[test]
    fn mrr_examples() {
        assert_eq!(mrr_at::<f64, _>(&[vec![2, 0]], 5, 2).unwrap(), 1.0);
        assert_eq!(mrr_at::<f64, _>(&[vec![0, 1, 0, 2]], 4, 2).unwrap(), 0.25);
        assert_eq!(mrr_at::<f64, _>(&[vec![0, 1, 0, 2]], 3, 2).unwrap(), 0.0);
        assert_eq!(mrr_at::<f64, _>(&[vec![0, 1, 0, 2]], 3, 1).unwrap(), 0.5);
        assert!(mrr_at::<f64, Vec<u8>>(&[], 3, 2).is_err());
    }

    #[test]
    fn f32_agrees() {
        let g = [2, 0, 1, 1, 0, 2];
        let a: f32 = ndcg_at(&g, 5).unwrap();
        let b: f64 = ndcg_at(&g, 5).unwrap();
        assert!((f64::from(a) - b).abs() < 1e-6);
    }
}
