//! One-dimensional quadrature plumbing shared by every module: Gauss rules,
//! globally adaptive Gauss-Kronrod integration, improper-tail integration with
//! a convergence verdict, and deterministic pairwise summation.

pub mod adaptive;
pub mod gauss;
pub mod sum;
pub mod tail;

pub use adaptive::{integrate, AdaptiveOptions, Estimate};
pub use gauss::{gauss_legendre, gauss_symmetric_jacobi, GaussRule};
pub use sum::{pairwise_sum, pairwise_sum_by};
pub use tail::{integrate_doubling, integrate_tail, TailEstimate, TailOptions, TailPanel, TailVerdict};
