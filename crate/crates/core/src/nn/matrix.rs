use crate::error::{Error, Result};
use crate::scalar::Real;

/// `n × m_d` look-up embedding matrix, row-major. Row `j` holds the
/// embedding of the `j`-th document; rows past the document count are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> EmbeddingMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        EmbeddingMatrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(EmbeddingMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub(crate) fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Rows `start..start + len` as one contiguous slice.
    pub(crate) fn window(&self, start: usize, len: usize) -> &[T] {
        &self.data[start * self.cols..(start + len) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

/// Stacks the first `n` document vectors (in the given order) and zero-pads
/// the rest.
pub fn build_embedding_matrix<T: Real, V: AsRef<[f64]>>(
    docs: &[V],
    n: usize,
    m_d: usize,
) -> Result<EmbeddingMatrix<T>> {
    if let Some((i, d)) = docs.iter().enumerate().find(|(_, d)| d.as_ref().len() != m_d) {
        return Err(Error::Shape(format!(
            "document {i} has length {}, expected {m_d}",
            d.as_ref().len()
        )));
    }
    let mut e = EmbeddingMatrix::zeros(n, m_d);
    for (j, doc) in docs.iter().take(n).enumerate() {
        for (dst, &src) in e.row_mut(j).iter_mut().zip(doc.as_ref()) {
            *dst = T::of(src);
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pads_with_zero_rows() {
        let docs = vec![vec![0.2, 0.3, 0.5], vec![1.0, 0.0, 0.0]];
        let e: EmbeddingMatrix<f64> = build_embedding_matrix(&docs, 4, 3).unwrap();
        assert_eq!((e.rows(), e.cols()), (4, 3));
        assert_eq!(e.row(0), &[0.2, 0.3, 0.5]);
        assert_eq!(e.row(2), &[0.0; 3]);
        assert_eq!(e.row(3), &[0.0; 3]);
    }

    #[test]
    fn empty_is_all_zero() {
        let docs: Vec<Vec<f64>> = vec![];
        let e: EmbeddingMatrix<f32> = build_embedding_matrix(&docs, 3, 2).unwrap();
        assert!(e.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn truncates_to_first_n() {
        let docs: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let e: EmbeddingMatrix<f64> = build_embedding_matrix(&docs, 3, 1).unwrap();
        assert_eq!(e.as_slice(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn inconsistent_lengths() {
        let docs = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(build_embedding_matrix::<f64, _>(&docs, 3, 2).is_err());
    }
}
