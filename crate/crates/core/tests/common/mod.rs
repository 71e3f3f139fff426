#![allow(dead_code)]

pub mod corpora;
pub mod gradcheck;
pub mod lda_ref;
pub mod oracles;
