use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply<T: Real>(self, z: T) -> T {
        match self {
            Activation::Relu => z.max(T::zero()),
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative given the pre-activation `z` and output `y = act(z)`.
    pub fn derivative<T: Real>(self, z: T, y: T) -> T {
        match self {
            Activation::Relu => {
                if z > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Tanh => T::one() - y * y,
            Activation::Identity => T::one(),
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::Tanh => 1,
            Activation::Identity => 2,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(Activation::Relu),
            1 => Some(Activation::Tanh),
            2 => Some(Activation::Identity),
            _ => None,
        }
    }
}

/// Shape of the two-branch model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    /// Documents per side (rows of the embedding matrix).
    pub n: usize,
    /// Document embedding width.
    pub m_d: usize,
    /// Convolution filters per branch.
    pub k: usize,
    /// Rows covered by each filter.
    pub f: usize,
    /// Max-pooling window.
    pub p: usize,
    /// Candidate latent size.
    pub m_c: usize,
    /// Query latent size; must equal `m_c`.
    pub m_q: usize,
    /// Hidden activation for the convolution and the `o1`/`o2` neurons.
    pub activation: Activation,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            n: 2000,
            m_d: 100,
            k: 2,
            f: 2,
            p: 2,
            m_c: 32,
            m_q: 32,
            activation: Activation::Relu,
            seed: 7,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::invalid(m));
        if self.f < 1 {
            return fail("f must be >= 1".into());
        }
        if self.n < self.f {
            return fail(format!("n ({}) must be >= f ({})", self.n, self.f));
        }
        if self.p < 1 {
            return fail("p must be >= 1".into());
        }
        if self.k < 1 || self.m_d < 1 || self.m_c < 1 {
            return fail("k, m_d and m_c must be >= 1".into());
        }
        if self.m_c != self.m_q {
            return fail(format!("m_c ({}) must equal m_q ({})", self.m_c, self.m_q));
        }
        Ok(())
    }

    /// Length of each convolution feature map.
    pub fn conv_len(&self) -> usize {
        self.n - self.f + 1
    }

    /// Length of each pooled map: `ceil((n - f + 1) / p)`.
    pub fn pooled_len(&self) -> usize {
        self.conv_len().div_ceil(self.p)
    }

    /// Input width of the fully connected layer.
    pub fn fc_inputs(&self) -> usize {
        self.k * self.pooled_len()
    }

    pub fn latent(&self) -> usize {
        self.m_c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    /// Squared error on `o3`, averaged over the batch.
    #[default]
    Mse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub loss: Loss,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    /// Independent initialisations tried by `fit`; the lowest validation
    /// loss wins.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            epochs: 200,
            batch_size: 32,
            loss: Loss::Mse,
            patience: 10,
            restarts: 1,
            seed: 11,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid("learning_rate must be > 0"));
        }
        if self.epochs < 1 {
            return Err(Error::invalid("epochs must be >= 1"));
        }
        if self.batch_size < 1 {
            return Err(Error::invalid("batch_size must be >= 1"));
        }
        if self.restarts < 1 {
            return Err(Error::invalid("restarts must be >= 1"));
        }
        Ok(())
    }
}
