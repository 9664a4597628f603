//! The operator II and the explicit solver of `-Ω_p g = μ f^{p-1}`.
//!
//! For ND the solution is a tail sum of `ν̂_i S_i^{p*-1}`, where `S_i` is
//! the prefix mass `Σ_{j≤i} μ_j f_j^{p-1}`. For DN the roles flip: `S_i` is
//! a suffix mass and the solution accumulates from the Dirichlet end at 0.
//! `II_i(f) = (g_i / f_i)^{p-1}`, so both share one O(N) pass.

use crate::chain::{BoundaryCase, GridFn, Problem};
use crate::error::Result;

/// The values `II_i(f)` on the active index set.
#[derive(Debug, Clone, PartialEq)]
pub struct IIResult(Vec<f64>);

impl IIResult {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `sup_i II_i`.
    pub fn sup(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `inf_i II_i`.
    pub fn inf(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// A solution of `-Ω_p g = μ f^{p-1}` together with its edge differences
/// (in the convention of [`Problem::differences`]).
///
/// The differences come straight from the flux, so they keep full relative
/// precision even where `g` varies over many orders of magnitude and
/// differencing `g` itself would cancel.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    pub values: GridFn,
    pub differences: Vec<f64>,
}

impl PoissonSolution {
    pub fn scaled(&self, c: f64) -> PoissonSolution {
        PoissonSolution {
            values: self.values.scaled(c),
            differences: self.differences.iter().map(|d| d * c).collect(),
        }
    }

    /// `‖Ω_p g + μ f^{p-1}‖_∞ / ‖μ f^{p-1}‖_∞`, with `Ω_p g` taken from
    /// the stored differences.
    pub fn residual(&self, problem: &Problem, f: &[f64]) -> f64 {
        let om = problem.omega_from_differences(&self.differences);
        let q = problem.p() - 1.0;
        let (mut err, mut scale) = (0.0f64, 0.0f64);
        for ((o, fi), m) in om.iter().zip(f).zip(problem.mu()) {
            let rhs = m * fi.powf(q);
            err = err.max((o + rhs).abs());
            scale = scale.max(rhs);
        }
        err / scale
    }
}

/// Poisson solution for a nonnegative source `f` (zeros allowed).
pub(crate) fn poisson_profile(problem: &Problem, f: &[f64]) -> PoissonSolution {
    let len = problem.len();
    assert_eq!(f.len(), len, "function length does not match the problem");
    let q = problem.p() - 1.0;
    let r = problem.p_star() - 1.0;
    let mu = problem.mu();
    let nu_hat = problem.nu_hats();
    let mut g = vec![0.0; len];
    let mut flux = vec![0.0; len];
    let mut mass = 0.0;
    match problem.case() {
        BoundaryCase::ND => {
            for i in 0..len {
                mass += mu[i] * f[i].powf(q);
                flux[i] = nu_hat[i] * mass.powf(r);
            }
            let mut acc = 0.0;
            for i in (0..len).rev() {
                acc += flux[i];
                g[i] = acc;
            }
        }
        BoundaryCase::DN => {
            for i in (0..len).rev() {
                mass += mu[i] * f[i].powf(q);
                flux[i] = nu_hat[i] * mass.powf(r);
            }
            let mut acc = 0.0;
            for i in 0..len {
                acc += flux[i];
                g[i] = acc;
            }
        }
    }
    // both conventions orient the difference against the flux
    flux.iter_mut().for_each(|v| *v = -*v);
    PoissonSolution {
        values: GridFn::from_raw(g),
        differences: flux,
    }
}

/// `II(f)` for a strictly positive `f`.
pub fn operator_ii(problem: &Problem, f: &GridFn) -> Result<IIResult> {
    f.ensure_positive()?;
    let g = poisson_profile(problem, f);
    Ok(ii_from_profile(problem, f, &g.values))
}

pub(crate) fn ii_from_profile(problem: &Problem, f: &[f64], g: &[f64]) -> IIResult {
    let q = problem.p() - 1.0;
    IIResult(f.iter().zip(g).map(|(fi, gi)| (gi / fi).powf(q)).collect())
}

/// The unique solution `g` of `-Ω_p g = μ f^{p-1}` under the problem's
/// boundary conditions. Equals `f·II(f)^{p*-1}` componentwise.
pub fn solve_poisson(problem: &Problem, f: &GridFn) -> Result<GridFn> {
    solve_poisson_with_differences(problem, f).map(|s| s.values)
}

/// [`solve_poisson`], keeping the edge differences.
pub fn solve_poisson_with_differences(problem: &Problem, f: &GridFn) -> Result<PoissonSolution> {
    f.ensure_positive()?;
    Ok(poisson_profile(problem, f))
}

/// `f^(1) = ν̂[·, N]^{1/p*}` (ND) or `ν̂[1, ·]^{1/p*}` (DN).
pub fn default_initial(problem: &Problem) -> GridFn {
    let e = 1.0 / problem.p_star();
    let nu_hat = problem.nu_hats();
    let sums = match problem.case() {
        BoundaryCase::ND => crate::chain::suffix_sums(nu_hat),
        BoundaryCase::DN => crate::chain::prefix_sums(nu_hat),
    };
    GridFn::from_raw(sums.into_iter().map(|s| s.powf(e)).collect())
}

/// One step `f ↦ f·II(f)^{p*-1}`, optionally rescaled to unit maximum.
pub fn iterate_step(problem: &Problem, f: &GridFn, normalize: bool) -> Result<GridFn> {
    let g = solve_poisson(problem, f)?;
    if normalize {
        let m = g.max();
        Ok(g.scaled(1.0 / m))
    } else {
        Ok(g)
    }
}
