use super::{Activation, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Valid convolution over rows: `k` filters of `f × m_d` (flattened
/// row-major, concatenated), producing pre-activations and activations, each
/// `k × (n - f + 1)` row-major.
pub(crate) fn conv_raw<T: Real>(
    e: &EmbeddingMatrix<T>,
    filters: &[T],
    biases: &[T],
    f: usize,
    activation: Activation,
) -> Result<(Vec<T>, Vec<T>)> {
    let n = e.rows();
    if f == 0 || n < f {
        return Err(Error::Shape(format!("filter rows {f} exceed matrix rows {n}")));
    }
    let width = f * e.cols();
    let k = biases.len();
    if filters.len() != k * width {
        return Err(Error::Shape(format!(
            "expected {} filter weights, got {}",
            k * width,
            filters.len()
        )));
    }
    let len = n - f + 1;
    let mut z = vec![T::zero(); k * len];
    let mut h = vec![T::zero(); k * len];
    for j in 0..k {
        let w = &filters[j * width..(j + 1) * width];
        for r in 0..len {
            let x = e.window(r, f);
            let s = w.iter().zip(x).fold(biases[j], |acc, (&a, &b)| acc + a * b);
            z[j * len + r] = s;
            h[j * len + r] = activation.apply(s);
        }
    }
    Ok((z, h))
}

/// Feature maps `act(<F_j, E[r..r+f, :]> + b_j)`, one per filter.
pub fn conv_forward<T: Real>(
    e: &EmbeddingMatrix<T>,
    filters: &[T],
    biases: &[T],
    f: usize,
    activation: Activation,
) -> Result<Vec<Vec<T>>> {
    let (_, h) = conv_raw(e, filters, biases, f, activation)?;
    let len = e.rows() - f + 1;
    Ok(h.chunks(len).map(<[T]>::to_vec).collect())
}

/// Max over non-overlapping windows; `argmax` indexes into the input map.
#[derive(Debug, Clone, PartialEq)]
pub struct Pooled<T> {
    pub values: Vec<T>,
    pub argmax: Vec<usize>,
}

/// Non-overlapping max pooling with window `p`; the last window may be short.
/// Ties keep the earliest position.
pub fn maxpool<T: Real>(map: &[T], p: usize) -> Result<Pooled<T>> {
    if p < 1 {
        return Err(Error::invalid("pooling window must be >= 1"));
    }
    if map.is_empty() {
        return Err(Error::invalid("cannot pool an empty feature map"));
    }
    let mut values = Vec::with_capacity(map.len().div_ceil(p));
    let mut argmax = Vec::with_capacity(values.capacity());
    for (w, chunk) in map.chunks(p).enumerate() {
        let mut best = 0;
        for (i, &x) in chunk.iter().enumerate() {
            if x > chunk[best] {
                best = i;
            }
        }
        values.push(chunk[best]);
        argmax.push(w * p + best);
    }
    Ok(Pooled { values, argmax })
}
