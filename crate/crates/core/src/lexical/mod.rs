//! Lexical metrics computed natively: BLEU, BLEU*, ROUGE-1/2/L and length
//! deviation.

pub mod bleu;
pub mod length;
pub mod rouge;
pub mod tokenize;

pub use bleu::{bleu_star, corpus_bleu, BleuScore, BleuStats, DEFAULT_MAX_N};
pub use length::{length_deviation, LengthRecord};
pub use rouge::{lcs_len, rouge_l, rouge_n, RougeScore};
pub use tokenize::{tokenize, Scheme, TokenSeq};
