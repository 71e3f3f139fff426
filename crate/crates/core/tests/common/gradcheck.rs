use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tshape_core::nn::{Activation, DualCnn, EmbeddingMatrix, ModelConfig, TENSOR_NAMES};

pub const H: f64 = 1e-4;
pub const TOLERANCE: f64 = 1e-4;
/// Denominator floor for the relative error, so that gradients that are zero
/// up to rounding are compared absolutely.
pub const FLOOR: f64 = 1e-6;

pub fn small_config(seed: u64, activation: Activation) -> ModelConfig {
    ModelConfig {
        n: 6,
        m_d: 4,
        k: 2,
        f: 2,
        p: 2,
        m_c: 3,
        m_q: 3,
        activation,
        seed,
    }
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> EmbeddingMatrix<f64> {
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(0.0..1.0)).collect())
        .collect();
    EmbeddingMatrix::from_rows(&data).unwrap()
}

#[allow(dead_code)]
#[derive(Debug, Clone)]
pub struct Mismatch {
    pub tensor: &'static str,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
}

/// Central differences for every parameter; returns the worst relative
/// error and every entry above tolerance.
pub fn check(seed: u64, activation: Activation) -> (f64, Vec<Mismatch>) {
    let cfg = small_config(seed, activation);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
    let ec = random_matrix(&mut rng, cfg.n, cfg.m_d);
    let eq = random_matrix(&mut rng, cfg.n, cfg.m_d);
    let target = [1.0, 0.0, -1.0][(seed % 3) as usize];
    let mut model = DualCnn::<f64>::new(cfg).unwrap();
    // Fresh models have zero biases, which can park a relu exactly on its
    // kink; random parameters avoid evaluating at a non-differentiable point.
    for t in model.params_mut().tensors_mut() {
        t.iter_mut().for_each(|x| *x = rng.gen_range(-0.5..0.5));
    }
    let (_, grad) = model.loss_and_gradient(&ec, &eq, target).unwrap();

    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for (ti, name) in TENSOR_NAMES.iter().enumerate() {
        let len = model.params().tensors()[ti].len();
        for i in 0..len {
            let orig = model.params().tensors()[ti][i];
            model.params_mut().tensors_mut()[ti][i] = orig + H;
            let up = model.loss(&ec, &eq, target).unwrap();
            model.params_mut().tensors_mut()[ti][i] = orig - H;
            let down = model.loss(&ec, &eq, target).unwrap();
            model.params_mut().tensors_mut()[ti][i] = orig;
            let numeric = (up - down) / (2.0 * H);
            let analytic = grad.tensors()[ti][i];
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(FLOOR);
            worst = worst.max(rel);
            if rel >= TOLERANCE {
                bad.push(Mismatch {
                    tensor: name,
                    index: i,
                    analytic,
                    numeric,
                    rel_error: rel,
                });
            }
        }
    }
    (worst, bad)
}
