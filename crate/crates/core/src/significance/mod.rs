//! Significance testing: Zou intervals, PERM-BOTH, Bonferroni and the
//! paired bootstrap.

pub mod bootstrap;
pub mod matrix;
pub mod perm;
pub mod zou;

pub use bootstrap::{dagger, paired_bootstrap, paired_bootstrap_keyed, DEFAULT_BOOTSTRAP};
pub use matrix::{
    bonferroni, pair_seed, segment_sig_matrix, system_sig_matrix, SigCell, SigLevel, SigMatrix, Statistic,
    DEFAULT_ALPHA,
};
pub use perm::{aligned_vectors, perm_both, perm_both_vectors, PermutationOutcome, DEFAULT_PERMUTATIONS};
pub use zou::{fisher_interval, normal_critical, zou_ci, CIResult, DEFAULT_LEVEL};
