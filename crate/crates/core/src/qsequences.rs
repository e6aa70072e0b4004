//! The sequence `r_k` of partitions into parts of three kinds and the
//! corrected series `(H_{m,j})`.
//!
//! `r_k` is generated by the pentagonal-style recurrence
//! `r_k = Σ_{ν≥1} (-1)^{ν-1} (2ν+1) r_{k-ν(ν+1)/2}` with `r_0 = 1`, and is
//! independently counted by a dynamic program over `Π_{n≥1} (1-q^n)^{-3}`.

use rug::Integer;

use crate::series::{ps_mul, Coef, PowerSeries};

/// `r_0, ..., r_K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RSequence {
    values: Vec<Coef>,
}

impl RSequence {
    pub fn values(&self) -> &[Coef] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<&Coef> {
        self.values.get(k)
    }

    /// The sequence as the power series `Σ r_k q^k` of order `K`.
    pub fn to_series(&self) -> PowerSeries {
        PowerSeries::from_coeffs(self.values.clone())
    }

    /// Checks the defining recurrence at index `k` against the stored
    /// prefix.
    pub fn satisfies_recurrence(&self, k: usize) -> bool {
        if k == 0 {
            return self.values[0].is_one();
        }
        recurrence_term(&self.values, k) == self.values[k]
    }
}

fn recurrence_term(prefix: &[Coef], k: usize) -> Coef {
    let mut acc = Coef::zero();
    let mut nu = 1usize;
    loop {
        let tri = nu * (nu + 1) / 2;
        if tri > k {
            break;
        }
        let weight = Coef::from((2 * nu + 1) as i64);
        let term = &weight * &prefix[k - tri];
        if nu % 2 == 1 {
            acc += &term;
        } else {
            acc -= &term;
        }
        nu += 1;
    }
    acc
}

/// `r_0..=r_K` from the recurrence; terms with `ν(ν+1)/2 > k` reference
/// negative indices and vanish.
pub fn r_sequence(k_max: usize) -> RSequence {
    let mut values = Vec::with_capacity(k_max + 1);
    values.push(Coef::one());
    for k in 1..=k_max {
        let next = recurrence_term(&values, k);
        values.push(next);
    }
    RSequence { values }
}

/// Number of partitions of `k` into parts of three kinds, counted by the
/// coin-change style DP for `Π_{n=1}^{k} (1-q^n)^{-3}`.
pub fn r_oracle_partitions(k: usize) -> Coef {
    let mut ways = vec![Integer::ZERO; k + 1];
    ways[0] = Integer::from(1);
    for part in 1..=k {
        for _kind in 0..3 {
            for total in part..=k {
                let (lo, hi) = ways.split_at_mut(total);
                hi[0] += &lo[total - part];
            }
        }
    }
    Coef::from(std::mem::take(&mut ways[k]))
}

/// `Σ_{t=0}^{m-1} (-1)^t q^{tj + t(t+1)/2}`, with order equal to its degree.
pub fn truncating_polynomial(m: u64, j: u64) -> PowerSeries {
    assert!(m >= 1, "m must be positive");
    let exponent = |t: u64| (t * j + t * (t + 1) / 2) as usize;
    let degree = exponent(m - 1);
    let mut coeffs = vec![Coef::zero(); degree + 1];
    for t in 0..m {
        coeffs[exponent(t)] = if t % 2 == 0 { Coef::one() } else { Coef::from(-1) };
    }
    PowerSeries::from_coeffs(coeffs)
}

/// `(H_{m,j})` truncated at order `K`: the coefficients `r̃_{k;m,j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HSeries {
    pub m: u64,
    pub j: u64,
    pub coeffs: PowerSeries,
}

impl HSeries {
    pub fn coeff(&self, k: usize) -> Option<&Coef> {
        self.coeffs.coeff(k)
    }
}

pub fn h_series(m: u64, j: u64, k_max: usize) -> HSeries {
    h_series_from(&r_sequence(k_max), m, j, k_max)
}

/// Same as [`h_series`] but reusing an already computed `r` prefix, which
/// must reach at least `k_max`.
pub fn h_series_from(r: &RSequence, m: u64, j: u64, k_max: usize) -> HSeries {
    assert!(r.len() > k_max, "r prefix too short");
    let rs = PowerSeries::from_coeffs(r.values()[..=k_max].to_vec());
    let poly = truncating_polynomial(m, j);
    let poly = PowerSeries::with_order(poly.into_coeffs(), k_max);
    HSeries { m, j, coeffs: ps_mul(&rs, &poly) }
}
