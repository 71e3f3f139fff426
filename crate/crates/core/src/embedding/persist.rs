use std::fs;
use std::path::Path;

use super::{TopicModel, Vocabulary};
use crate::error::{Error, Result};

pub const LDA_MAGIC: &str = "ESM-LDA-v1";

/// Writes the `ESM-LDA-v1` binary: a header line, then little-endian
/// fields (topics, priors, seed, sweeps, vocabulary, counts).
pub fn save_topic_model(model: &TopicModel, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(LDA_MAGIC.as_bytes());
    buf.push(b'\n');
    buf.push(model.trained as u8);
    put_u64(&mut buf, model.num_topics as u64);
    buf.extend_from_slice(&model.alpha.to_le_bytes());
    buf.extend_from_slice(&model.beta.to_le_bytes());
    put_u64(&mut buf, model.seed);
    put_u64(&mut buf, model.fold_in_sweeps as u64);
    put_u64(&mut buf, model.vocab.len() as u64);
    for (tok, df) in model.vocab.tokens().iter().zip(model.vocab.doc_freqs()) {
        put_u64(&mut buf, tok.len() as u64);
        buf.extend_from_slice(tok.as_bytes());
        put_u64(&mut buf, *df);
    }
    for &c in &model.topic_word_counts {
        put_u64(&mut buf, c);
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_topic_model(path: &Path) -> Result<TopicModel> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

pub(crate) fn put_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

pub(crate) struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Cursor { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Corrupt(format!("truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub(crate) fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos == self.bytes.len()
    }

    /// Reads the `\n`-terminated header and checks it against `expected`.
    pub(crate) fn header(&mut self, expected: &str) -> Result<()> {
        let limit = self.bytes.len().min(64);
        let nl = self.bytes[..limit].iter().position(|&b| b == b'\n');
        let found = match nl {
            Some(i) => String::from_utf8_lossy(&self.bytes[..i]).into_owned(),
            None => String::from_utf8_lossy(&self.bytes[..limit.min(16)]).into_owned(),
        };
        if nl.is_none() || found != expected {
            return Err(Error::Version {
                expected: expected.to_string(),
                found,
            });
        }
        self.pos = nl.unwrap() + 1;
        Ok(())
    }
}

fn decode(bytes: &[u8]) -> Result<TopicModel> {
    let mut c = Cursor::new(bytes);
    c.header(LDA_MAGIC)?;
    let trained = c.u8()? != 0;
    let k = c.u64()? as usize;
    let alpha = c.f64()?;
    let beta = c.f64()?;
    let seed = c.u64()?;
    let sweeps = c.u64()? as usize;
    let v = c.u64()? as usize;
    let mut tokens = Vec::with_capacity(v.min(1 << 24));
    let mut dfs = Vec::with_capacity(v.min(1 << 24));
    for _ in 0..v {
        let len = c.u64()? as usize;
        let tok = std::str::from_utf8(c.take(len)?).map_err(|_| Error::Corrupt("token is not UTF-8".into()))?;
        tokens.push(tok.to_owned());
        dfs.push(c.u64()?);
    }
    let n = k
        .checked_mul(v)
        .ok_or_else(|| Error::Corrupt("count matrix too large".into()))?;
    let mut counts = Vec::with_capacity(n.min(1 << 28));
    for _ in 0..n {
        counts.push(c.u64()?);
    }
    if !c.at_end() {
        return Err(Error::Corrupt("trailing bytes after count matrix".into()));
    }
    let vocab = Vocabulary::from_parts(tokens, dfs);
    let mut model = TopicModel::from_counts(vocab, k, alpha, beta, counts, seed, sweeps);
    model.trained = trained;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{fit_lda, LdaConfig};

    fn model() -> TopicModel {
        let docs: Vec<Vec<String>> = vec![
            "alpha beta gamma".split(' ').map(String::from).collect(),
            "delta epsilon alpha".split(' ').map(String::from).collect(),
        ];
        fit_lda(
            &docs,
            LdaConfig {
                num_topics: 2,
                iterations: 5,
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("lda.bin");
        let m = model();
        save_topic_model(&m, &p).unwrap();
        let back = load_topic_model(&p).unwrap();
        assert_eq!(back, m);
        let toks = vec!["alpha".to_string(), "beta".into()];
        assert_eq!(back.infer(&toks, 5).unwrap(), m.infer(&toks, 5).unwrap());
    }

    #[test]
    fn truncated_and_wrong_version() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("lda.bin");
        save_topic_model(&model(), &p).unwrap();
        let bytes = fs::read(&p).unwrap();
        fs::write(&p, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(load_topic_model(&p), Err(Error::Corrupt(_))));
        let mut wrong = b"ESM-LDA-v2\n".to_vec();
        wrong.extend_from_slice(&bytes[11..]);
        fs::write(&p, wrong).unwrap();
        match load_topic_model(&p) {
            Err(Error::Version { expected, found }) => {
                assert_eq!(expected, "ESM-LDA-v1");
                assert_eq!(found, "ESM-LDA-v2");
            }
            other => panic!("{other:?}"),
        }
    }
}
