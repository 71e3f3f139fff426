use std::collections::{BTreeMap, HashMap};

/// Token ↔ dense index map with document frequencies. Indices follow the
/// lexicographic token order so the mapping does not depend on document order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    tokens: Vec<String>,
    doc_freq: Vec<u64>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn build<D: AsRef<[String]>>(docs: &[D]) -> Vocabulary {
        let mut df: BTreeMap<&str, u64> = BTreeMap::new();
        for doc in docs {
            let mut seen: Vec<&str> = doc.as_ref().iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for t in seen {
                *df.entry(t).or_default() += 1;
            }
        }
        let (tokens, doc_freq): (Vec<String>, Vec<u64>) = df.into_iter().map(|(t, c)| (t.to_owned(), c)).unzip();
        Vocabulary::from_parts(tokens, doc_freq)
    }

    pub(crate) fn from_parts(tokens: Vec<String>, doc_freq: Vec<u64>) -> Vocabulary {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary {
            tokens,
            doc_freq,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn doc_freq(&self, id: usize) -> u64 {
        self.doc_freq[id]
    }

    pub(crate) fn doc_freqs(&self) -> &[u64] {
        &self.doc_freq
    }

    /// Known token ids of a document; unknown tokens are skipped.
    pub fn encode(&self, doc: &[String]) -> Vec<u32> {
        doc.iter().filter_map(|t| self.id(t)).map(|i| i as u32).collect()
    }
}
