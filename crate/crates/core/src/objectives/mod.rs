//! Loss kernels with analytic gradients: contrastive, cross-entropy, and
//! unlikelihood objectives, representation pooling with an optional MLP
//! head, finite-difference verification, and a separation demo.

pub mod combined;
pub mod contrastive;
pub mod demo;
pub mod gradcheck;
pub mod pool;
pub mod tokenloss;

pub use combined::{combined_loss, GradNorms, LossBreakdown, LossConfig, LossGrads, LossMode};
pub use contrastive::{
    contrastive_loss, contrastive_loss_with, ContrastiveResult, PairNormalization,
};
pub use demo::{demo_separate, SeparationStep};
pub use gradcheck::{grad_check, gradient_battery, GradCheckReport};
pub use pool::{
    pool, pool_forward, MlpGrads, MlpParams, PoolForward, PoolKind, PoolingSpec, RepMatrix,
};
pub use tokenloss::{
    cross_entropy, cross_entropy_with_grad, unlikelihood_loss, unlikelihood_with_grad,
};
