//! Monotone approximation of `1/λ_p` through the operator II.
//!
//! Starting from a positive `f^(1)`, the iterates `f^(n+1) = f^(n) II(f^(n))^{p*-1}`
//! give three sequences
//!
//! * `δ_n = sup_i II_i(f^(n))`, nonincreasing,
//! * `δ'_n = inf_i II_i(f^(n))`, nondecreasing,
//! * `δ̄_n = μ(f^(n)^p) / D_p(f^(n))`, nondecreasing,
//!
//! with `1/δ_n ≤ λ_p ≤ 1/δ̄_{n+1} ≤ 1/δ'_n`. All three converge to `1/λ_p`.

use crate::chain::{BoundaryCase, EigenResult, GridFn, Problem};
use crate::error::{Error, Result};
use crate::inverse::flux_residual;
use crate::operator::{ii_from_profile, poisson_profile, PoissonSolution};
use crate::stop::StopRule;

/// Largest N accepted by [`truncated_family_bounds`].
pub const ENUMERATION_BUDGET: usize = 512;

/// `(δ, δ', δ̄)` for one function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTriple {
    pub delta: f64,
    pub delta_prime: f64,
    pub delta_bar: f64,
}

impl BoundTriple {
    /// `1/δ`, a lower bound for λ_p.
    pub fn lower(&self) -> f64 {
        1.0 / self.delta
    }

    /// `1/δ'`, an upper bound for λ_p.
    pub fn upper(&self) -> f64 {
        1.0 / self.delta_prime
    }

    /// `1/δ̄`, the Rayleigh quotient.
    pub fn estimate(&self) -> f64 {
        1.0 / self.delta_bar
    }
}

fn rayleigh_ratio(problem: &Problem, f: &[f64], diffs: &[f64]) -> Result<f64> {
    let energy = problem.d_p_energy_from_differences(diffs);
    if !(energy > 0.0) {
        return Err(Error::ZeroEnergy);
    }
    Ok(problem.mu_moment(f) / energy)
}

fn triple_and_profile(problem: &Problem, f: &GridFn, diffs: &[f64]) -> Result<(BoundTriple, PoissonSolution)> {
    f.ensure_positive()?;
    let g = poisson_profile(problem, f);
    let ii = ii_from_profile(problem, f, &g.values);
    let triple = BoundTriple {
        delta: ii.sup(),
        delta_prime: ii.inf(),
        delta_bar: rayleigh_ratio(problem, f, diffs)?,
    };
    Ok((triple, g))
}

/// `(sup II(f), inf II(f), μ(f^p)/D_p(f))`.
pub fn bound_triple(problem: &Problem, f: &GridFn) -> Result<BoundTriple> {
    triple_and_profile(problem, f, &problem.differences(f)).map(|(t, _)| t)
}

/// State of the approximation procedure after computing `f^(n)`.
#[derive(Debug, Clone)]
pub struct ApproxState {
    pub n: usize,
    /// `f^(n)`, rescaled to unit maximum.
    pub f: GridFn,
    pub bounds: BoundTriple,
    /// `bounds` of `f^(1) .. f^(n)`.
    pub history: Vec<BoundTriple>,
    /// Edge differences of `f`.
    diffs: Vec<f64>,
    next: PoissonSolution,
}

impl ApproxState {
    pub fn new(problem: &Problem, initial: &GridFn) -> Result<Self> {
        initial.ensure_positive()?;
        let f = initial.scaled(1.0 / initial.max());
        let diffs = problem.differences(&f);
        let (bounds, next) = triple_and_profile(problem, &f, &diffs)?;
        Ok(ApproxState {
            n: 1,
            f,
            bounds,
            history: vec![bounds],
            diffs,
            next,
        })
    }

    /// Moves to `f^(n+1)`.
    pub fn advance(&mut self, problem: &Problem) -> Result<()> {
        let g = self.next.scaled(1.0 / self.next.values.max());
        let (bounds, next) = triple_and_profile(problem, &g.values, &g.differences)?;
        self.n += 1;
        self.f = g.values;
        self.diffs = g.differences;
        self.bounds = bounds;
        self.history.push(bounds);
        self.next = next;
        Ok(())
    }
}

/// Iterates until `1/δ_n` and `1/δ'_n` agree under `stop`, or the
/// iteration budget runs out (reported through `converged`).
///
/// The reported eigenvalue is `1/δ̄_n` of the last iterate.
pub fn run_approximation(problem: &Problem, initial: &GridFn, stop: &StopRule) -> Result<EigenResult> {
    stop.validate()?;
    let mut state = ApproxState::new(problem, initial)?;
    let converged = loop {
        let b = state.bounds;
        if stop.agree(b.lower(), b.upper(), b.estimate()) {
            break true;
        }
        if state.n >= stop.max_iter {
            break false;
        }
        state.advance(problem)?;
    };

    let lambda = state.bounds.estimate();
    let norm = problem.lp_norm_mu(&state.f);
    let eigenfunction = state.f.scaled(1.0 / norm);
    let diffs: Vec<f64> = state.diffs.iter().map(|d| d / norm).collect();
    let residual = flux_residual(problem, &eigenfunction, &diffs, lambda);
    Ok(EigenResult {
        lambda,
        eigenfunction,
        residual,
        lower_history: state.history.iter().map(BoundTriple::lower).collect(),
        upper_history: state.history.iter().map(BoundTriple::upper).collect(),
        estimate_history: state.history.iter().map(BoundTriple::estimate).collect(),
        iterations: state.n,
        converged,
    })
}

/// Which `(ℓ, m)` pairs make up the ND truncated family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairRange {
    /// `0 ≤ ℓ < m ≤ N`.
    #[default]
    Strict,
    /// `0 ≤ ℓ ≤ m ≤ N`. The diagonal members `ν̂_m 1_{≤m}` make
    /// `δ'_1 ≥ σ_p` hold.
    Inclusive,
}

/// `(δ'_n, δ̄_n)` of the truncated family at step `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedBounds {
    pub n: usize,
    pub delta_prime: f64,
    pub delta_bar: f64,
}

/// Truncated-family bounds for `n = 1..=n_steps` over the strict pair range.
pub fn truncated_family_bounds(problem: &Problem, n_steps: usize) -> Result<Vec<TruncatedBounds>> {
    truncated_family_bounds_with(problem, n_steps, PairRange::Strict)
}

/// Truncated-family bounds.
///
/// ND members start from `ν̂[·∨ℓ, m] 1_{≤m}` and are cut back to `{0..m}`
/// after every step; their II minimum runs over `i ≤ m` only. DN members
/// start from `ν̂[1, ·∧m]` and advance with `II` evaluated at `·∧m`. Both
/// δ' and δ̄ are suprema over the family. `range` only affects ND.
pub fn truncated_family_bounds_with(
    problem: &Problem,
    n_steps: usize,
    range: PairRange,
) -> Result<Vec<TruncatedBounds>> {
    if n_steps < 1 {
        return Err(Error::InvalidStopRule("n_steps must be at least 1".into()));
    }
    let n_max = problem.n_max();
    if n_max > ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget {
            n: n_max,
            budget: ENUMERATION_BUDGET,
        });
    }
    let mut best = vec![(f64::NEG_INFINITY, f64::NEG_INFINITY); n_steps];
    let mut fold = |trace: Vec<(f64, f64)>| {
        for (slot, (dp, db)) in best.iter_mut().zip(trace) {
            slot.0 = slot.0.max(dp);
            slot.1 = slot.1.max(db);
        }
    };
    match problem.case() {
        BoundaryCase::ND => {
            let mut members = 0usize;
            for m in 0..=n_max {
                let top = match range {
                    PairRange::Strict => m,
                    PairRange::Inclusive => m + 1,
                };
                for l in 0..top {
                    fold(nd_member(problem, l, m, n_steps)?);
                    members += 1;
                }
            }
            if members == 0 {
                return Err(Error::EmptyFamily(n_max));
            }
        }
        BoundaryCase::DN => {
            for m in 0..problem.len() {
                fold(dn_member(problem, m, n_steps)?);
            }
        }
    }
    Ok(best
        .into_iter()
        .enumerate()
        .map(|(i, (delta_prime, delta_bar))| TruncatedBounds {
            n: i + 1,
            delta_prime,
            delta_bar,
        })
        .collect())
}

fn nd_member(problem: &Problem, l: usize, m: usize, n_steps: usize) -> Result<Vec<(f64, f64)>> {
    let nu_hat = problem.nu_hats();
    let mut f = vec![0.0; problem.len()];
    let mut acc = 0.0;
    for i in (0..=m).rev() {
        if i >= l {
            acc += nu_hat[i];
        }
        f[i] = acc;
    }
    let q = problem.p() - 1.0;
    let mut out = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        let g = poisson_profile(problem, &f).values.into_values();
        let dp = (0..=m)
            .map(|i| (g[i] / f[i]).powf(q))
            .fold(f64::INFINITY, f64::min);
        out.push((dp, rayleigh_ratio(problem, &f, &problem.differences(&f))?));
        let scale = g[..=m].iter().copied().fold(0.0, f64::max);
        for i in 0..f.len() {
            f[i] = if i <= m { g[i] / scale } else { 0.0 };
        }
    }
    Ok(out)
}

/// `m` is the position of the clamp point (grid index `m + 1`).
fn dn_member(problem: &Problem, m: usize, n_steps: usize) -> Result<Vec<(f64, f64)>> {
    let nu_hat = problem.nu_hats();
    let mut f = vec![0.0; problem.len()];
    let mut acc = 0.0;
    for i in 0..f.len() {
        if i <= m {
            acc += nu_hat[i];
        }
        f[i] = acc;
    }
    let r = problem.p_star() - 1.0;
    let mut out = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        let g = poisson_profile(problem, &f).values.into_values();
        let ii = ii_from_profile(problem, &f, &g);
        out.push((ii.inf(), rayleigh_ratio(problem, &f, &problem.differences(&f))?));
        let ii = ii.values();
        for i in 0..f.len() {
            f[i] *= ii[i.min(m)].powf(r);
        }
        let scale = f.iter().copied().fold(0.0, f64::max);
        f.iter_mut().for_each(|v| *v /= scale);
    }
    Ok(out)
}
