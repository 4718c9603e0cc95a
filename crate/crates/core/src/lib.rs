//! Generalization bounds built on inverting the hypergeometric tail, the
//! classical bounds they are compared against, and the ghost-sample-size
//! search that tunes them.

pub mod binomial;
pub mod bounds;
pub mod error;
pub mod exactref;
pub mod growth;
pub mod hypergeom;
pub mod logprob;
pub mod mprime;
pub mod special;
pub mod sweep;

pub use binomial::{bin_tail_inv, bin_tail_log};
pub use bounds::{
    catoni_bound, evaluate, hti_epsilon, hti_hoeffding_relaxed, hti_lower_epsilon, hti_rd_epsilon,
    hti_realizable_relaxed, langford_test_bound, lugosi_bound, lugosi_vp_crossover, margin_epsilon,
    sc_bound, vp_bound, vrd_bound, BoundQuery, BoundResult, Crossover, Method,
};
pub use error::{HtiError, Result};
pub use exactref::{exact_binom, exact_hyp_tail, exact_hyp_tail_inv, Oracle};
pub use growth::GrowthModel;
pub use hypergeom::{
    hyp_pmf_log, hyp_tail_berkopec_log, hyp_tail_inv_bisect, hyp_tail_inv_linear, hyp_tail_log,
    hyp_tail_lower_inv, hyp_tail_lower_inv_complement, hyp_upper_tail_log, HypParams,
};
pub use logprob::LogProb;
pub use mprime::{
    gain_study, heuristic_mprime, optimize_mprime, optimize_mprime_with_threads, GainGrid,
    GainOptions, GainRow, GainStudyReport, GainSummary, MprimeResult, MprimeScan,
};
pub use special::log_binom;
pub use sweep::{
    parse_grid, run_sweep, ErrorSpec, GrowthSpec, MethodSpec, MprimeChoice, SweepSpec, SweepTable,
    Vary,
};
