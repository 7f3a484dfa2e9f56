//! Corpus loading, random inputs and term generation for the property suites.

mod corpus;
mod gen;
mod suites;
mod values;

pub use corpus::{corpus_def, corpus_defs, CorpusDef, CORPUS, REJECTED};
pub use gen::{gen_term, random_sample, random_samples, Sample};
pub use suites::{run_all, run_suite, SuiteConfig, SuiteReport, SUITES, TM_CORPUS};
pub use values::{all_lists, inhabitants, random_value};
