//! Exact coefficients `g_{j,k}` of the Laurent expansion of the `j`-th zero
//!
//! ```text
//! x_j(q) = -q^{-j} + (-1)^j q^{j(j-1)/2} (g_{j,0} + g_{j,1} q + g_{j,2} q^2 + ...)
//! ```
//!
//! obtained by substituting the ansatz into `θ(q, x) = Σ_ν Ψ_ν`, with
//! `Ψ_ν = q^{ν(ν+1)/2} x^ν`, and forcing the coefficient of `q^{j+s}` to
//! vanish for `s = 0, 1, 2, ...` in turn. Every power of the ansatz is
//! expanded in full, so nonlinear contributions are included wherever they
//! fall inside the window.

use crate::series::{laurent_add, laurent_coeff, laurent_pow, Coef, LaurentSeries, PowerSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("zero index j = {0} is not supported; the expansion is computed for j >= 2 only")]
    UnsupportedIndex(i64),
    #[error("pivot for g_{{{j},{step}}} is {pivot}, expected +1 or -1")]
    PivotAssertionFailed { j: i64, step: usize, pivot: Coef },
    #[error("residual coefficient of q^{exponent} is {value}, expected 0 before solving for g_{{{j},{step}}}")]
    ConsistencyError { j: i64, step: usize, exponent: i64, value: Coef },
    #[error("g_{{{j},{step}}} = {value} is not an integer")]
    NonIntegral { j: i64, step: usize, value: Coef },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// The solved expansion of the `j`-th zero, `g[k] = g_{j,k}` for `k <= N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroSeries {
    j: i64,
    g: Vec<Coef>,
}

impl ZeroSeries {
    /// Wraps externally supplied coefficients, e.g. a partially solved
    /// prefix. `g` must be non-empty.
    pub fn from_coeffs(j: i64, g: Vec<Coef>) -> Result<Self, SolveError> {
        if j < 2 {
            return Err(SolveError::UnsupportedIndex(j));
        }
        assert!(!g.is_empty(), "at least g_{{j,0}} is required");
        Ok(ZeroSeries { j, g })
    }

    pub fn j(&self) -> i64 {
        self.j
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.g.len() - 1
    }

    pub fn coeffs(&self) -> &[Coef] {
        &self.g
    }

    pub fn g(&self, k: usize) -> Option<&Coef> {
        self.g.get(k)
    }

    /// The zero `-ξ_j` as a Laurent series with valuation `-j`, known
    /// through `q^{j(j-1)/2 + N}`.
    pub fn zero_laurent(&self) -> LaurentSeries {
        let j = self.j;
        let offset = (j * (j + 1) / 2) as usize;
        let mut body = vec![Coef::zero(); offset + self.g.len()];
        body[0] = Coef::from(-1);
        let sign = if j % 2 == 0 { Coef::one() } else { Coef::from(-1) };
        for (k, gk) in self.g.iter().enumerate() {
            body[offset + k] = &sign * gk;
        }
        LaurentSeries::new(-j, PowerSeries::from_coeffs(body))
    }
}

/// `λ_ν = ν(ν+1)/2 - jν`, the valuation of `Ψ_ν`.
pub fn lambda_valuation(j: i64, nu: u64) -> i64 {
    let nu = nu as i64;
    nu * (nu + 1) / 2 - j * nu
}

/// Which `Ψ_ν` can reach exponents up to `j + order`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaTermBudget {
    pub j: i64,
    pub order: usize,
    pub nu_max: u64,
}

pub fn term_budget(j: i64, order: usize) -> ThetaTermBudget {
    assert!(j >= 2, "term budget is defined for j >= 2");
    let top = j + order as i64;
    // λ_ν dips to -j(j-1)/2 around ν = j and increases strictly from there.
    let mut nu = j as u64;
    while lambda_valuation(j, nu + 1) <= top {
        nu += 1;
    }
    ThetaTermBudget { j, order, nu_max: nu }
}

/// `Ψ_ν = q^{ν(ν+1)/2} x^ν`, valid through `q^max_exponent`.
///
/// `x` is truncated to the relative precision that can still reach the
/// window before powering; if `x` itself carries less precision the result
/// does too.
pub fn psi_term(j: i64, nu: u64, x: &LaurentSeries, max_exponent: i64) -> LaurentSeries {
    let lambda = lambda_valuation(j, nu);
    if lambda > max_exponent {
        return LaurentSeries::vanishing_through(max_exponent);
    }
    if nu == 0 {
        return LaurentSeries::new(0, PowerSeries::one(max_exponent as usize));
    }
    let shift = (nu * (nu + 1) / 2) as i64;
    let relative = (max_exponent - lambda) as usize;
    let base = match (x.valuation(), x.body()) {
        (Some(v), Some(body)) => LaurentSeries::new(v, body.truncate(relative)),
        _ => x.clone(),
    };
    laurent_pow(&base, nu as u32).shift(shift).truncate(max_exponent)
}

/// `θ(q, x_j) = Σ_{ν=0}^{nu_max} Ψ_ν`, truncated at `q^{j+window}`.
pub fn theta_residual(j: i64, zs: &ZeroSeries, window: usize) -> LaurentSeries {
    theta_residual_with_budget(j, zs, window, term_budget(j, window).nu_max)
}

/// [`theta_residual`] with an explicit cutoff on `ν`.
pub fn theta_residual_with_budget(j: i64, zs: &ZeroSeries, window: usize, nu_max: u64) -> LaurentSeries {
    let top = j + window as i64;
    let x = zs.zero_laurent();
    let mut acc = LaurentSeries::zero();
    for nu in 0..=nu_max {
        acc = laurent_add(&acc, &psi_term(j, nu, &x, top));
    }
    acc.truncate(top)
}

/// Solves for `g_{j,0..=N}` order by order.
///
/// Step `s` fixes `g_{j,s}` from the coefficient of `q^{j+s}`, which is
/// affine in `g_{j,s}`: it is probed at `g_{j,s} = 0` and `g_{j,s} = 1` to
/// read off the constant and the pivot.
pub fn solve_zero_series(j: i64, n: usize) -> Result<ZeroSeries, SolveError> {
    if j < 2 {
        return Err(SolveError::UnsupportedIndex(j));
    }
    let mut g: Vec<Coef> = Vec::with_capacity(n + 1);
    for step in 0..=n {
        let exponent = j + step as i64;
        g.push(Coef::zero());
        let at_zero = theta_residual(j, &ZeroSeries { j, g: g.clone() }, step);
        if let Some(v) = at_zero.valuation() {
            if v < exponent {
                let value = laurent_coeff(&at_zero, v)?;
                return Err(SolveError::ConsistencyError { j, step, exponent: v, value });
            }
        }
        let r0 = laurent_coeff(&at_zero, exponent)?;

        g[step] = Coef::one();
        let at_one = theta_residual(j, &ZeroSeries { j, g: g.clone() }, step);
        let r1 = laurent_coeff(&at_one, exponent)?;

        let pivot = &r1 - &r0;
        if pivot.to_i64().is_none_or(|p| p.abs() != 1) {
            return Err(SolveError::PivotAssertionFailed { j, step, pivot });
        }
        let value = -(&r0 / &pivot);
        if !value.is_integer() {
            return Err(SolveError::NonIntegral { j, step, value });
        }
        g[step] = value;
    }
    Ok(ZeroSeries { j, g })
}

/// Lower bound `j(j+1-ν) + ν(ν+1)/2` on the `q`-degree of the terms of
/// `Ψ_ν` that are nonlinear in the `g_{j,k}`.
pub fn nonlinear_floor(j: i64, nu: i64) -> i64 {
    j * (j + 1 - nu) + nu * (nu + 1) / 2
}

/// Minimum of [`nonlinear_floor`] over the `ν >= 2` that carry nonlinear
/// terms; equals `j(j+3)/2` for `j >= 2`.
pub fn min_nonlinear_floor(j: i64) -> i64 {
    (2..=2 * j + 2).map(|nu| nonlinear_floor(j, nu)).min().expect("non-empty range")
}
