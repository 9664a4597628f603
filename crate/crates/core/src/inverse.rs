//! Inverse iteration for the principal eigenpair.
//!
//! Each step solves `-Ω_p w = μ v^{p-1}` with the previous normalized
//! iterate `v` as source and renormalizes. `z_n = D_p(v^(n))` decreases to
//! λ_p and interlaces with `ξ_{n-1} = ‖w^(n)‖^{1-p}`:
//! `z_{n+1} ≤ ξ_n ≤ z_n ≤ ξ_{n-1}`.

use crate::chain::{prefix_sums, signed_pow, suffix_sums, BoundaryCase, EigenResult, GridFn, Problem};
use crate::error::Result;
use crate::operator::solve_poisson_with_differences;
use crate::stop::StopRule;

#[derive(Debug, Clone)]
pub struct InverseState {
    pub n: usize,
    /// `v^(n)`, unit `L^p(μ)` norm.
    pub v: GridFn,
    /// `z_n = D_p(v^(n))`.
    pub z: f64,
    /// Edge differences of `v^(n)`.
    pub dv: Vec<f64>,
    /// `ξ_{n-1}` (ND) or `ς_{n-1}` (DN); `None` before the first step.
    pub xi: Option<f64>,
    /// `ln ‖w^(n)‖` of the unnormalized chain `w^(n) = solve(w^(n-1))`.
    pub w_log_norm: f64,
    pub z_history: Vec<f64>,
    pub xi_history: Vec<f64>,
}

impl InverseState {
    /// Starts from `w^(0) = initial`, `v^(0) = w^(0)/‖w^(0)‖`.
    pub fn new(problem: &Problem, initial: &GridFn) -> Result<Self> {
        initial.ensure_positive()?;
        let norm = problem.lp_norm_mu(initial);
        let v = initial.scaled(1.0 / norm);
        let dv = problem.differences(&v);
        let z = problem.d_p_energy_from_differences(&dv);
        Ok(InverseState {
            n: 0,
            v,
            z,
            dv,
            xi: None,
            w_log_norm: norm.ln(),
            z_history: vec![z],
            xi_history: Vec::new(),
        })
    }

    pub fn advance(&mut self, problem: &Problem) -> Result<()> {
        let w = solve_poisson_with_differences(problem, &self.v)?;
        let norm = problem.lp_norm_mu(&w.values);
        let p = problem.p();
        // solve_poisson is 1-homogeneous, so the unnormalized chain has
        // ‖w^(n)‖ = ‖w^(n-1)‖·‖solve(v^(n-1))‖.
        let prev_log = self.w_log_norm;
        let log_norm = prev_log + norm.ln();
        let xi = match problem.case() {
            BoundaryCase::ND => norm.powf(1.0 - p),
            BoundaryCase::DN => ((1.0 - p) * log_norm + (p - 1.0) * prev_log).exp(),
        };
        let w = w.scaled(1.0 / norm);
        self.z = problem.d_p_energy_from_differences(&w.differences);
        self.v = w.values;
        self.dv = w.differences;
        self.n += 1;
        self.xi = Some(xi);
        self.w_log_norm = log_norm;
        self.z_history.push(self.z);
        self.xi_history.push(xi);
        Ok(())
    }
}

/// One inverse-iteration step.
pub fn inverse_step(problem: &Problem, mut state: InverseState) -> Result<InverseState> {
    state.advance(problem)?;
    Ok(state)
}

/// `max_k |Ω_p v(k) + λ μ_k v_k^{p-1}| / (λ μ_k v_k^{p-1})`.
pub fn residual_norm(problem: &Problem, v: &[f64], lambda: f64) -> f64 {
    let om = problem.apply_omega(v);
    let q = problem.p() - 1.0;
    om.iter()
        .zip(v)
        .zip(problem.mu())
        .map(|((o, vk), m)| {
            let rhs = lambda * m * signed_pow(*vk, q);
            (o + rhs).abs() / rhs.abs()
        })
        .fold(0.0, f64::max)
}

/// The eigen equation summed from the Neumann end: on every edge the flux
/// `-ν_k ψ(∂_k v)` must equal `λ M_k`, with `M_k` the mass of `μ v^{p-1}`
/// on the Neumann side. Returns `max_k |-ν_k ψ(∂_k v) - λ M_k| / (λ M_k)`
/// with `dv` the edge differences of `v`.
///
/// Equivalent to [`residual_norm`] being zero, but each side is a sum of
/// like-signed terms, so it stays accurate when the weights are strongly
/// graded and `Ω_p v` is a small difference of large fluxes.
pub fn flux_residual(problem: &Problem, v: &[f64], dv: &[f64], lambda: f64) -> f64 {
    let q = problem.p() - 1.0;
    let terms: Vec<f64> = v.iter().zip(problem.mu()).map(|(vk, m)| m * signed_pow(*vk, q)).collect();
    let mass = match problem.case() {
        BoundaryCase::ND => prefix_sums(&terms),
        BoundaryCase::DN => suffix_sums(&terms),
    };
    dv.iter()
        .zip(problem.nu())
        .zip(&mass)
        .map(|((d, w), m)| {
            let rhs = lambda * m;
            (-w * signed_pow(*d, q) - rhs).abs() / rhs
        })
        .fold(0.0, f64::max)
}

/// Runs inverse iteration until `z` stabilizes under `stop` and the
/// [`flux_residual`] of the eigen equation drops below `stop.residual_tol`.
pub fn run_inverse_iteration(problem: &Problem, initial: &GridFn, stop: &StopRule) -> Result<EigenResult> {
    stop.validate()?;
    let mut state = InverseState::new(problem, initial)?;
    let mut residual = f64::INFINITY;
    let converged = loop {
        if let [.., prev, cur] = state.z_history[..] {
            if stop.agree(prev, cur, cur) {
                residual = flux_residual(problem, &state.v, &state.dv, cur);
                if residual <= stop.residual_tol {
                    break true;
                }
            }
        } else if problem.len() == 1 {
            // one site: v^(0) is already the eigenfunction
            residual = flux_residual(problem, &state.v, &state.dv, state.z);
            if residual <= stop.residual_tol {
                break true;
            }
        }
        if state.n >= stop.max_iter {
            break false;
        }
        state.advance(problem)?;
    };
    if !converged {
        residual = flux_residual(problem, &state.v, &state.dv, state.z);
    }
    Ok(EigenResult {
        lambda: state.z,
        eigenfunction: state.v,
        residual,
        lower_history: Vec::new(),
        upper_history: state.z_history.clone(),
        estimate_history: state.z_history,
        iterations: state.n,
        converged,
    })
}
