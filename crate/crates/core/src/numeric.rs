//! Floating-point cross-check of the zero expansions.
//!
//! For a fixed `q` with `|q| <= 0.108` the zeros of `θ(q, ·)` inside a
//! search radius are found as roots of a truncation of the series (Aberth
//! iteration in MPFR precision, then Newton polishing on a deeper
//! truncation) and matched to `j` by magnitude, since the `j`-th zero is
//! close to `-q^{-j}`.

use std::cmp::Ordering;

use rug::float::Round;
use rug::ops::{CompleteRound, Pow};
use rug::{Complex, Float};

use crate::series::Coef;
use crate::zero_series::ZeroSeries;

/// Largest `|q|` accepted; inside this disk the zeros are distinct.
pub const CERTIFIED_RADIUS: f64 = 0.108;
pub const DEFAULT_PRECISION_BITS: u32 = 256;
pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-12;
/// Extra degree used when polishing and when checking residuals.
pub const POLISH_EXTRA_DEGREE: usize = 20;
const MAX_ITERATIONS: usize = 500;
/// Consecutive zeros closer than this magnitude ratio cannot be indexed.
const AMBIGUOUS_RATIO: f64 = 1.1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("invalid numeric configuration: {0}")]
    Config(String),
    #[error("root iteration did not converge within {0} sweeps")]
    RootFindingFailure(usize),
    #[error("cannot match zeros to indices: {0}")]
    MatchingFailure(String),
}

/// Parses `"a"`, `"bi"`, `"a+bi"` or `"a-bi"` into a complex number at the
/// given precision. Each decimal part is rounded to nearest.
pub fn parse_complex(text: &str, precision_bits: u32) -> Result<Complex, NumericError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || NumericError::Config(format!("cannot parse complex number {text:?}"));
    let real = |t: &str| -> Result<Float, NumericError> {
        let parsed = Float::parse(t).map_err(|_| bad())?;
        Ok(parsed.complete_round(precision_bits, Round::Nearest).0)
    };
    let imag = |t: &str| -> Result<Float, NumericError> {
        match t {
            "" | "+" => Ok(Float::with_val(precision_bits, 1)),
            "-" => Ok(Float::with_val(precision_bits, -1)),
            _ => real(t),
        }
    };
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return Ok(Complex::with_val(precision_bits, (real(&s)?, 0)));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => Ok(Complex::with_val(precision_bits, (real(&body[..i])?, imag(&body[i..])?))),
        None => Ok(Complex::with_val(precision_bits, (0, imag(body)?))),
    }
}

#[derive(Debug, Clone)]
pub struct NumericConfig {
    pub q: Complex,
    /// Highest zero index the search radius must contain.
    pub j_max: u32,
    pub truncation_degree: usize,
    pub root_tolerance: f64,
    pub precision_bits: u32,
}

impl NumericConfig {
    /// Validates `q` and picks the smallest truncation degree `D > j_max`
    /// for which `|q|^{D(D+1)/2} R^D` is below both the root tolerance and
    /// the working precision, `R = 1.1 |q|^{-(j_max+1)}` being the search
    /// radius.
    pub fn new(q: Complex, j_max: u32, precision_bits: u32, root_tolerance: f64) -> Result<Self, NumericError> {
        if precision_bits < 64 {
            return Err(NumericError::Config(format!("precision of {precision_bits} bits is below the 64-bit minimum")));
        }
        if root_tolerance.is_nan() || root_tolerance <= 0.0 {
            return Err(NumericError::Config("root tolerance must be positive".into()));
        }
        if j_max == 0 {
            return Err(NumericError::Config("j_max must be at least 1".into()));
        }
        let q = Complex::with_val(precision_bits, q);
        let abs_q = abs(&q);
        if abs_q.is_zero() {
            return Err(NumericError::Config("q must be nonzero".into()));
        }
        let limit = Float::with_val(precision_bits, Float::parse(CERTIFIED_RADIUS.to_string()).expect("literal"));
        if abs_q > limit {
            return Err(NumericError::Config(format!(
                "|q| = {} lies outside the region |q| <= {CERTIFIED_RADIUS} where the zeros are known to be distinct",
                abs_q.to_f64()
            )));
        }
        let log_q = abs_q.to_f64().ln();
        let log_r = 1.1f64.ln() - (j_max as f64 + 1.0) * log_q;
        let target = root_tolerance.ln().min(-(precision_bits as f64) * std::f64::consts::LN_2);
        let tail = |d: usize| (d * (d + 1) / 2) as f64 * log_q + d as f64 * log_r;
        let mut degree = j_max as usize + 2;
        while tail(degree) >= target {
            degree += 1;
        }
        Ok(NumericConfig { q, j_max, truncation_degree: degree, root_tolerance, precision_bits })
    }

    pub fn search_radius(&self) -> Float {
        let abs_q = abs(&self.q);
        let inv = Float::with_val(self.precision_bits, 1) / abs_q;
        inv.pow(self.j_max + 1) * 1.1f64
    }
}

fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// `q^{i(i+1)/2}` for `i = 0..=degree`.
fn theta_coefficients(q: &Complex, degree: usize) -> Vec<Complex> {
    let prec = q.prec().0;
    let mut out = Vec::with_capacity(degree + 1);
    let mut c = Complex::with_val(prec, 1);
    let mut qi = Complex::with_val(prec, 1);
    out.push(c.clone());
    for _ in 1..=degree {
        qi *= q;
        c *= &qi;
        out.push(c.clone());
    }
    out
}

/// Value and derivative of a polynomial by Horner's rule.
fn horner(coeffs: &[Complex], x: &Complex) -> (Complex, Complex) {
    let prec = x.prec().0;
    let mut p = Complex::with_val(prec, 0);
    let mut dp = Complex::with_val(prec, 0);
    for c in coeffs.iter().rev() {
        dp *= x;
        dp += &p;
        p *= x;
        p += c;
    }
    (p, dp)
}

/// `Σ_{i=0}^{D} q^{i(i+1)/2} x^i`.
pub fn theta_eval(q: &Complex, x: &Complex, degree: usize) -> Complex {
    let prec = q.prec().0.max(x.prec().0);
    // nested form 1 + q x (1 + q^2 x (1 + ...))
    let mut acc = Complex::with_val(prec, 1);
    let mut powers = Vec::with_capacity(degree);
    let mut qi = Complex::with_val(prec, 1);
    for _ in 0..degree {
        qi *= q;
        powers.push(qi.clone());
    }
    for qi in powers.iter().rev() {
        acc *= qi;
        acc *= x;
        acc += 1;
    }
    acc
}

#[derive(Debug, Clone)]
pub struct NumericZeroSet {
    /// Zeros inside the search radius, by increasing magnitude.
    pub zeros: Vec<Complex>,
    /// `|θ(q, z)|` at truncation degree `D + 20`.
    pub residuals: Vec<f64>,
    /// Index `j` of each zero; the first `j_max` zeros map onto `1..=j_max`.
    pub matched_j: Vec<Option<u32>>,
}

impl NumericZeroSet {
    pub fn zero_for(&self, j: u32) -> Option<&Complex> {
        self.matched_j.iter().position(|m| *m == Some(j)).map(|i| &self.zeros[i])
    }

    pub fn residual_for(&self, j: u32) -> Option<f64> {
        self.matched_j.iter().position(|m| *m == Some(j)).map(|i| self.residuals[i])
    }

    /// Smallest `|z_a - z_b|` over distinct zeros in the radius.
    pub fn min_separation(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (a, za) in self.zeros.iter().enumerate() {
            for zb in &self.zeros[a + 1..] {
                let d = abs(&Complex::with_val(za.prec().0, za - zb)).to_f64();
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best
    }
}

/// Locates the first `j_max` zeros of `θ(q, ·)`.
pub fn find_zeros(cfg: &NumericConfig, j_max: u32) -> Result<NumericZeroSet, NumericError> {
    if j_max > cfg.j_max {
        return Err(NumericError::Config(format!("j_max {j_max} exceeds the configured {}", cfg.j_max)));
    }
    let prec = cfg.precision_bits;
    let degree = cfg.truncation_degree;
    let coeffs = theta_coefficients(&cfg.q, degree);
    let mut roots = aberth(&cfg.q, &coeffs, prec)?;

    let deep = theta_coefficients(&cfg.q, degree + POLISH_EXTRA_DEGREE);
    for z in roots.iter_mut() {
        newton_polish(&deep, z, prec);
    }

    let radius = cfg.search_radius();
    let mut inside: Vec<(Float, Complex)> =
        roots.into_iter().map(|z| (abs(&z), z)).filter(|(m, _)| *m <= radius).collect();
    inside.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));

    for w in inside.windows(2) {
        let ratio = Float::with_val(prec, &w[1].0 / &w[0].0).to_f64();
        if ratio < AMBIGUOUS_RATIO {
            return Err(NumericError::MatchingFailure(format!(
                "two zeros with magnitudes {:.6e} and {:.6e} are too close to index",
                w[0].0.to_f64(),
                w[1].0.to_f64()
            )));
        }
    }
    if inside.len() < j_max as usize {
        return Err(NumericError::MatchingFailure(format!(
            "found {} zeros inside the search radius, need {j_max}",
            inside.len()
        )));
    }
    let zeros: Vec<Complex> = inside.into_iter().map(|(_, z)| z).collect();
    let residuals = zeros.iter().map(|z| abs(&horner(&deep, z).0).to_f64()).collect();
    let matched_j = (0..zeros.len()).map(|i| (i < j_max as usize).then_some(i as u32 + 1)).collect();
    Ok(NumericZeroSet { zeros, residuals, matched_j })
}

/// Simultaneous Aberth–Ehrlich iteration started from `-q^{-i}` with a
/// small rotation to break symmetry.
fn aberth(q: &Complex, coeffs: &[Complex], prec: u32) -> Result<Vec<Complex>, NumericError> {
    let degree = coeffs.len() - 1;
    let inv_q = Complex::with_val(prec, 1) / q;
    let mut roots: Vec<Complex> = Vec::with_capacity(degree);
    let mut power = Complex::with_val(prec, 1);
    for i in 1..=degree {
        power *= &inv_q;
        let angle = 0.4 + 0.37 * i as f64;
        let nudge = Complex::with_val(prec, (1.0 + 1e-3 * angle.cos(), 1e-3 * angle.sin()));
        roots.push(-(Complex::with_val(prec, &power * &nudge)));
    }
    let tol = Float::with_val(prec, Float::i_exp(1, -((prec * 3 / 4) as i32)));
    for _ in 0..MAX_ITERATIONS {
        let mut converged = true;
        for k in 0..degree {
            let (p, dp) = horner(coeffs, &roots[k]);
            if p.is_zero() {
                continue;
            }
            let ratio = Complex::with_val(prec, &p / &dp);
            let mut repulsion = Complex::with_val(prec, 0);
            for (l, zl) in roots.iter().enumerate() {
                if l != k {
                    let diff = Complex::with_val(prec, &roots[k] - zl);
                    repulsion += diff.recip();
                }
            }
            let denom = Complex::with_val(prec, 1) - Complex::with_val(prec, &ratio * &repulsion);
            let step = ratio / denom;
            if abs(&step) > Float::with_val(prec, &tol * abs(&roots[k])) {
                converged = false;
            }
            roots[k] -= step;
        }
        if converged {
            return Ok(roots);
        }
    }
    Err(NumericError::RootFindingFailure(MAX_ITERATIONS))
}

fn newton_polish(coeffs: &[Complex], z: &mut Complex, prec: u32) {
    let tol = Float::with_val(prec, Float::i_exp(1, 8 - prec as i32));
    for _ in 0..8 {
        let (p, dp) = horner(coeffs, z);
        if dp.is_zero() {
            return;
        }
        let step = p / dp;
        let small = abs(&step) <= Float::with_val(prec, &tol * abs(z));
        *z -= step;
        if small {
            return;
        }
    }
}

fn coef_to_float(c: &Coef, prec: u32) -> Float {
    Float::with_val(prec, c.to_rational())
}

/// The truncated expansion `-q^{-j} + (-1)^j q^{j(j-1)/2} Σ_{k<=N} g_{j,k} q^k`
/// evaluated at `q`.
pub fn evaluate_zero_series(q: &Complex, zs: &ZeroSeries) -> Complex {
    let prec = q.prec().0;
    let j = zs.j();
    let mut sum = Complex::with_val(prec, 0);
    for g in zs.coeffs().iter().rev() {
        sum *= q;
        sum += coef_to_float(g, prec);
    }
    let lead = q.clone().pow(-(j as i32));
    let scale = q.clone().pow((j * (j - 1) / 2) as i32);
    let tail = if j % 2 == 0 { sum * scale } else { -(sum * scale) };
    tail - lead
}

/// `|z_numeric - z_series| / |z_numeric|` for the matched zero of index `j`.
pub fn relative_error(zeros: &NumericZeroSet, q: &Complex, zs: &ZeroSeries) -> Result<f64, NumericError> {
    let j = zs.j() as u32;
    let numeric = zeros
        .zero_for(j)
        .ok_or_else(|| NumericError::MatchingFailure(format!("no numeric zero matched to j = {j}")))?;
    let predicted = evaluate_zero_series(q, zs);
    let diff = Complex::with_val(numeric.prec().0, numeric - &predicted);
    Ok(Float::with_val(numeric.prec().0, abs(&diff) / abs(numeric)).to_f64())
}

/// Finds the zeros and compares the expansion with the matched one.
pub fn compare_to_series(cfg: &NumericConfig, zs: &ZeroSeries) -> Result<f64, NumericError> {
    let j = u32::try_from(zs.j()).map_err(|_| NumericError::Config("negative j".into()))?;
    let zeros = find_zeros(cfg, j)?;
    relative_error(&zeros, &cfg.q, zs)
}

/// Upper bound on the relative error of the order-`N` expansion.
///
/// Assumes `|g_{j,k}| <= 4^k` (observed growth is close to `3^k`), which
/// gives a geometric tail `2 |q|^{j(j+1)/2} (4|q|)^{N+1} / (1 - 4|q|)`, plus a
/// floor for the working precision.
pub fn series_error_ceiling(cfg: &NumericConfig, j: i64, n: usize) -> f64 {
    let a = abs(&cfg.q).to_f64();
    let tail = 2.0 * a.powi((j * (j + 1) / 2) as i32) * (4.0 * a).powi(n as i32 + 1) / (1.0 - 4.0 * a);
    tail + 2f64.powi(24 - cfg.precision_bits as i32)
}
