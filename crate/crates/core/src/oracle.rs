//! Brute-force reference values for λ_p, independent of the operator II.
//!
//! * [`principal_eigenvalue_bruteforce`] shoots the eigen equation from the
//!   Neumann end and bisects on the far Dirichlet value.
//! * [`linear_principal_eigenvalue`] handles `p = 2` as a symmetric
//!   tridiagonal eigenproblem solved by Sturm-sequence bisection.

use crate::chain::{signed_pow, BoundaryCase, Problem};
use crate::error::{Error, Result};

/// Largest N the shooting oracle accepts.
pub const ORACLE_LIMIT: usize = 64;

const SCAN_FACTOR: f64 = 1.05;

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingTrace {
    pub lambda: f64,
    /// Shot values over `0..=N+1` (ND) or `0..=N` (DN), boundary included.
    pub g: Vec<f64>,
    /// Value at the Dirichlet end; zero exactly at an eigenvalue.
    pub terminal: f64,
}

/// Shoots `-Ω_p g = λ μ |g|^{p-2} g` from `g = 1` at the Neumann end.
///
/// The flux `T_k = ν_k ψ(g_{k+1} - g_k)` obeys `T_k = T_{k-1} - λ μ_k ψ(g_k)`
/// with `T_{-1} = 0` (ND); DN runs the mirrored recurrence from `N` down.
pub fn shoot(problem: &Problem, lambda: f64) -> ShootingTrace {
    let q = problem.p() - 1.0;
    let r = problem.p_star() - 1.0;
    let mu = problem.mu();
    let nu = problem.nu();
    let len = problem.len();
    let mut g = vec![0.0; len + 1];
    let mut flux = 0.0;
    match problem.case() {
        BoundaryCase::ND => {
            g[0] = 1.0;
            for k in 0..len {
                flux -= lambda * mu[k] * signed_pow(g[k], q);
                g[k + 1] = g[k] + signed_pow(flux / nu[k], r);
            }
            let terminal = g[len];
            ShootingTrace { lambda, g, terminal }
        }
        BoundaryCase::DN => {
            // g[i] holds grid index i; g[len] = g_N
            g[len] = 1.0;
            for k in (1..=len).rev() {
                flux -= lambda * mu[k - 1] * signed_pow(g[k], q);
                g[k - 1] = g[k] + signed_pow(flux / nu[k - 1], r);
            }
            let terminal = g[0];
            ShootingTrace { lambda, g, terminal }
        }
    }
}

/// Smallest λ with a vanishing shot, to relative width `tol`.
///
/// The scan starts below the classical lower estimate
/// `1/(p·p*^{p-1}·σ_p)` and climbs geometrically until the far value
/// changes sign, then bisects.
pub fn principal_eigenvalue_bruteforce(problem: &Problem, tol: f64) -> Result<f64> {
    if problem.n_max() > ORACLE_LIMIT {
        return Err(Error::OracleSize {
            n: problem.n_max(),
            limit: ORACLE_LIMIT,
        });
    }
    if !(tol > 0.0) {
        return Err(Error::OracleFailure(format!("tolerance must be positive (got {tol})")));
    }
    let p = problem.p();
    let upper = 1.0 / problem.sigma_p();
    let k_p = p * problem.p_star().powf(p - 1.0);
    let mut lo = upper / k_p.max(4.0) * 0.5;
    let mut guard = 0;
    while shoot(problem, lo).terminal <= 0.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 200 {
            return Err(Error::OracleFailure("no positive shot below the scan start".into()));
        }
    }
    let cap = upper * 1e3;
    let mut hi = lo;
    loop {
        hi *= SCAN_FACTOR;
        if hi > cap {
            return Err(Error::OracleFailure(format!("no sign change below λ = {cap:e}")));
        }
        if shoot(problem, hi).terminal <= 0.0 {
            break;
        }
        lo = hi;
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if shoot(problem, mid).terminal > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest eigenvalue of `f ↦ -Ω_2 f / μ` for `p = 2`.
pub fn linear_principal_eigenvalue(problem: &Problem) -> Result<f64> {
    if problem.p() != 2.0 {
        return Err(Error::NotLinear(problem.p()));
    }
    let (diag, off) = symmetric_tridiagonal(problem);
    Ok(smallest_eigenvalue(&diag, &off, 1e-13))
}

/// `M^{-1/2} L M^{-1/2}` with `L` the matrix of `-Ω_2`.
fn symmetric_tridiagonal(problem: &Problem) -> (Vec<f64>, Vec<f64>) {
    let mu = problem.mu();
    let nu = problem.nu();
    let len = problem.len();
    let (diag, edge): (Vec<f64>, Vec<f64>) = match problem.case() {
        // L_kk = ν_k + ν_{k-1}, L_{k,k+1} = -ν_k
        BoundaryCase::ND => (
            (0..len).map(|i| nu[i] + if i > 0 { nu[i - 1] } else { 0.0 }).collect(),
            (0..len.saturating_sub(1)).map(|i| nu[i]).collect(),
        ),
        // L_kk = ν_k + ν_{k+1}, L_{k,k+1} = -ν_{k+1}
        BoundaryCase::DN => (
            (0..len).map(|i| nu[i] + nu.get(i + 1).copied().unwrap_or(0.0)).collect(),
            (0..len.saturating_sub(1)).map(|i| nu[i + 1]).collect(),
        ),
    };
    let a = diag.iter().zip(mu).map(|(d, m)| d / m).collect();
    let b = edge
        .iter()
        .enumerate()
        .map(|(i, e)| -e / (mu[i] * mu[i + 1]).sqrt())
        .collect();
    (a, b)
}

/// Number of eigenvalues below `x`.
fn sturm_count(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..a.len() {
        let coupling = if i == 0 { 0.0 } else { b[i - 1] * b[i - 1] / q };
        q = a[i] - x - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (a[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn smallest_eigenvalue(a: &[f64], b: &[f64], rel_tol: f64) -> f64 {
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..a.len() {
        let r = if i > 0 { b[i - 1].abs() } else { 0.0 } + b.get(i).map_or(0.0, |v| v.abs());
        lo = lo.min(a[i] - r);
        hi = hi.max(a[i] + r);
    }
    while hi - lo > rel_tol * hi.abs().max(lo.abs()) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(a, b, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
