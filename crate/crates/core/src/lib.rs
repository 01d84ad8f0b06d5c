//! Claim verification against long evidence documents.
//!
//! The crate is organised around the stages of a verification pipeline:
//!
//! * [`corpus`]: claims, subclaims, evidence documents, gold annotations,
//!   JSONL persistence and multi-annotator aggregation.
//! * [`textproc`]: deterministic tokenization, sentence segmentation,
//!   token-bounded chunking and bigram overlap.
//! * [`scorer`]: pluggable three-way entailment scorers (lexical baseline,
//!   remote HTTP service, replay) and a persistent score cache.
//! * [`entail`]: document-level strategies (MAX over partitions, subclaim
//!   aggregation, trivially-entailed filtering).
//! * [`retrieval`]: supporting-sentence retrieval, threshold tuning, top-k
//!   selection and retrieve-then-predict premises.
//! * [`decompose`]: few-shot claim decomposition through a completion client.
//! * [`evalkit`]: classification, ranking and retrieval metrics plus the
//!   paired bootstrap test.
//! * [`oracle`]: oracle-retrieval chunk construction.

pub mod corpus;
pub mod decompose;
pub mod entail;
pub mod evalkit;
pub mod oracle;
pub mod retrieval;
pub mod rng;
pub mod scorer;
pub mod textproc;

pub use corpus::{
    Claim, Corpus, EntailmentLabel, EvidenceDocument, EvidenceSet, GoldAnnotation, Sentence,
    SentenceRef, Subclaim, WorkerAnnotation,
};
pub use scorer::{ScoreDistribution, ScoreRequest, ScorerBackend};
