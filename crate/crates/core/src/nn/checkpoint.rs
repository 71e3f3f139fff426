use std::fs;
use std::path::Path;

use super::params::TENSOR_NAMES;
use super::{Activation, DualCnn, ModelConfig, Params};
use crate::embedding::persist::{put_u64, Cursor};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const CNN_MAGIC: &str = "ESM-CNN-v1";

/// Serialises config and every parameter tensor as little-endian `f64`.
pub fn encode_model<T: Real>(model: &DualCnn<T>) -> Vec<u8> {
    let c = model.config();
    let mut buf = Vec::new();
    buf.extend_from_slice(CNN_MAGIC.as_bytes());
    buf.push(b'\n');
    for v in [c.n, c.m_d, c.k, c.f, c.p, c.m_c, c.m_q] {
        put_u64(&mut buf, v as u64);
    }
    buf.push(c.activation.code());
    put_u64(&mut buf, c.seed);
    for t in model.params().tensors() {
        put_u64(&mut buf, t.len() as u64);
        for x in t {
            buf.extend_from_slice(&x.to_f64_lossy().to_le_bytes());
        }
    }
    buf
}

pub fn decode_model<T: Real>(bytes: &[u8]) -> Result<DualCnn<T>> {
    let mut c = Cursor::new(bytes);
    c.header(CNN_MAGIC)?;
    let mut dims = [0usize; 7];
    for d in &mut dims {
        *d = c.u64()? as usize;
    }
    let code = c.u8()?;
    let activation =
        Activation::from_code(code).ok_or_else(|| Error::Corrupt(format!("unknown activation code {code}")))?;
    let config = ModelConfig {
        n: dims[0],
        m_d: dims[1],
        k: dims[2],
        f: dims[3],
        p: dims[4],
        m_c: dims[5],
        m_q: dims[6],
        activation,
        seed: c.u64()?,
    };
    config
        .validate()
        .map_err(|e| Error::Corrupt(format!("stored config is invalid: {e}")))?;
    let mut params = Params::<T>::zeros(&config);
    for (name, t) in TENSOR_NAMES.iter().zip(params.tensors_mut()) {
        let len = c.u64()? as usize;
        if len != t.len() {
            return Err(Error::Corrupt(format!(
                "{name}: stored {len} values, config implies {}",
                t.len()
            )));
        }
        for x in t.iter_mut() {
            *x = T::of(c.f64()?);
        }
    }
    if !c.at_end() {
        return Err(Error::Corrupt("trailing bytes after parameters".into()));
    }
    DualCnn::from_params(config, params)
}

pub fn save_model<T: Real>(model: &DualCnn<T>, path: &Path) -> Result<()> {
    fs::write(path, encode_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model<T: Real>(path: &Path) -> Result<DualCnn<T>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes)
}
