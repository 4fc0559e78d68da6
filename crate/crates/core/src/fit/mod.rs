//! Parameter estimation from samples: GB2 maximum likelihood, the Hill
//! tail-index estimator and outlier cuts.

mod cuts;
mod hill;
mod mle;

pub use cuts::{apply_cuts, CutOutcome, CutPolicy};
pub use hill::{default_hill_k, hill_estimator, hill_estimator_weighted, lower_tail_index};
pub use mle::{fit_gb2_mle, fit_gb2_mle_with, FitOptions, FitResult, MIN_FIT_SAMPLES};
