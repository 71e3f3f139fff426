//! Plain collapsed Gibbs sampler used as a reference for the topic model.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Document-topic proportions `(n_dk + α) / (N_d + Kα)` after `iterations`
/// sweeps.
pub fn reference_lda(
    docs: &[Vec<String>],
    k: usize,
    alpha: f64,
    beta: f64,
    iterations: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let words: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| {
            d.iter()
                .map(|w| {
                    let next = ids.len();
                    *ids.entry(w.as_str()).or_insert(next)
                })
                .collect()
        })
        .collect();
    let v = ids.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut ndk = vec![vec![0usize; k]; docs.len()];
    let mut nkw = vec![vec![0usize; v]; k];
    let mut nk = vec![0usize; k];
    let mut z: Vec<Vec<usize>> = words
        .iter()
        .enumerate()
        .map(|(d, ws)| {
            ws.iter()
                .map(|&w| {
                    let t = rng.gen_range(0..k);
                    ndk[d][t] += 1;
                    nkw[t][w] += 1;
                    nk[t] += 1;
                    t
                })
                .collect()
        })
        .collect();
    let mut p = vec![0.0; k];
    for _ in 0..iterations {
        for (d, ws) in words.iter().enumerate() {
            for (i, &w) in ws.iter().enumerate() {
                let old = z[d][i];
                ndk[d][old] -= 1;
                nkw[old][w] -= 1;
                nk[old] -= 1;
                for t in 0..k {
                    p[t] = (ndk[d][t] as f64 + alpha) * (nkw[t][w] as f64 + beta) / (nk[t] as f64 + v as f64 * beta);
                }
                let mut u = rng.gen::<f64>() * p.iter().sum::<f64>();
                let mut new = k - 1;
                for (t, &pt) in p.iter().enumerate() {
                    if u < pt {
                        new = t;
                        break;
                    }
                    u -= pt;
                }
                z[d][i] = new;
                ndk[d][new] += 1;
                nkw[new][w] += 1;
                nk[new] += 1;
            }
        }
    }
    ndk.iter()
        .zip(&words)
        .map(|(counts, ws)| {
            let denom = ws.len() as f64 + k as f64 * alpha;
            counts.iter().map(|&c| (c as f64 + alpha) / denom).collect()
        })
        .collect()
}
