//! Pluggable text generation: a deterministic n-gram model with nucleus
//! sampling, mask infilling, prompt continuation, and paraphrasing stubs.

pub mod ngram;
pub mod paraphrase;
pub mod rng;
pub mod sample;

pub use ngram::{NGramModel, END, START};
pub use paraphrase::{IdentityParaphraser, Paraphraser, SynonymParaphraser};
pub use rng::{hash64, RngState};
pub use sample::{
    fill_mask, nucleus_filter, sample_sequence, GenerationStep, Infiller, NGramGenerator,
    Regenerator,
};
