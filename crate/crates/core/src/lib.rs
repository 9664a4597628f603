//! Principal eigenvalue of the discrete weighted p-Laplacian on a finite path.
//!
//! A [`Problem`] fixes the exponent `p`, the boundary case and the weights
//! `μ` (on sites) and `ν` (on edges). Three solvers are provided:
//!
//! * [`run_approximation`] iterates the operator II and brackets `λ_p`
//!   between monotone bounds,
//! * [`run_inverse_iteration`] runs inverse iteration with a decreasing
//!   Rayleigh sequence,
//! * [`principal_eigenvalue_bruteforce`] and [`linear_principal_eigenvalue`]
//!   are reference oracles for small chains.
//!
//! ```
//! use plap_eig::{default_initial, run_inverse_iteration, BoundaryCase, Problem, StopRule};
//!
//! let pb = Problem::from_weights(BoundaryCase::ND, 2.0, 1, |_| 1.0, |_| 1.0).unwrap();
//! let r = run_inverse_iteration(&pb, &default_initial(&pb), &StopRule::default()).unwrap();
//! assert!((r.lambda - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-6);
//! ```

pub mod approx;
pub mod chain;
pub mod config;
pub mod error;
pub mod expr;
pub mod inverse;
pub mod operator;
pub mod oracle;
pub mod report;
pub mod stop;

pub use approx::{
    bound_triple, run_approximation, truncated_family_bounds, truncated_family_bounds_with, ApproxState,
    BoundTriple, PairRange, TruncatedBounds,
};
pub use chain::{conjugate_exponent, BoundaryCase, EigenResult, GridFn, Problem};
pub use config::{parse_config, RunConfig};
pub use error::{Error, Result};
pub use expr::eval_weight_expr;
pub use inverse::{inverse_step, flux_residual, residual_norm, run_inverse_iteration, InverseState};
pub use operator::{
    default_initial, iterate_step, operator_ii, solve_poisson, solve_poisson_with_differences, IIResult, PoissonSolution,
};
pub use oracle::{linear_principal_eigenvalue, principal_eigenvalue_bruteforce};
pub use stop::StopRule;
