//! Spectral moments: empirical, Marchenko-Pastur main term, error bound.

use std::f64::consts::{E, PI};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::codes::LinearCode;
use crate::combinatorics::binomial;
use crate::ensemble::{gram, sample_rows, GramMatrix};
use crate::error::{bail, Result};
use crate::spectra::{eigenvalues, mp_moment, mp_moment_exact, to_f64};

/// Highest moment order accepted by [`empirical_moments`].
pub const MAX_ORDER: u32 = 64;

/// A_l = (1/p) tr(G^l) for l = 0..=l_max.
///
/// A_0 = 1 and A_1 = tr(G)/p are read off the matrix; higher orders are
/// power sums of the eigenvalues.
pub fn empirical_moments(g: &GramMatrix, l_max: u32) -> Result<Vec<f64>> {
    if l_max > MAX_ORDER {
        bail!(Range, "moment order {l_max} exceeds {MAX_ORDER}");
    }
    let p = g.dim() as f64;
    let mut out = vec![1.0];
    if l_max >= 1 {
        out.push(g.trace() / p);
    }
    if l_max >= 2 {
        let spectrum = eigenvalues(g, None)?;
        for l in 2..=l_max {
            let s: f64 = spectrum.eigenvalues().iter().map(|v| v.powi(l as i32)).sum();
            if !s.is_finite() {
                bail!(Range, "power sum of order {l} overflowed");
            }
            out.push(s / p);
        }
    }
    Ok(out)
}

pub fn empirical_moment(g: &GramMatrix, l: u32) -> Result<f64> {
    Ok(empirical_moments(g, l)?[l as usize])
}

/// Main term of E A_l: the l-th Marchenko-Pastur moment.
pub fn moment_main_term(y: f64, l: u32) -> Result<f64> {
    if l < 2 {
        bail!(Usage, "main term is stated for l >= 2, got {l}");
    }
    Ok(mp_moment(y, l))
}

/// C_A = 3 + 2 sqrt(2A/(q-1) + 1/4).
pub fn c_a(a: u64, q: u64) -> f64 {
    3.0 + 2.0 * (2.0 * a as f64 / (q as f64 - 1.0) + 0.25).sqrt()
}

/// Bound on |E_l|: (C_A + 1) l^(l+1) / n.
pub fn el_bound(l: u32, n: u64, a: u64, q: u64) -> f64 {
    (c_a(a, q) + 1.0) * (l as f64).powi(l as i32 + 1) / n as f64
}

/// b_l = E (X - 1)^l for X ~ MP(y), expanded binomially over exact moments.
pub fn mp_centered_moment(y: f64, l: u32) -> f64 {
    let mut acc = BigRational::zero();
    for t in 0..=l {
        let c = BigRational::from_integer(BigInt::from(binomial(l as u64, t as u64)));
        let term = c * mp_moment_exact(y, t);
        if (l - t).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    to_f64(&acc)
}

/// l^3 (8 e^2)^l y / (8 pi).
pub fn centered_moment_bound(y: f64, l: u32) -> f64 {
    (l as f64).powi(3) * (8.0 * E * E).powi(l as i32) * y / (8.0 * PI)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub l: u32,
    pub empirical_mean: f64,
    /// Standard error of the mean; `None` for a single trial.
    pub std_error: Option<f64>,
    pub trials: usize,
    pub main_term: f64,
    pub error_bound: f64,
    pub exact_expectation: Option<f64>,
    /// Whether 2 <= l < sqrt(p) holds.
    pub in_theorem_range: bool,
}

/// Seed of trial `index` derived from a master seed: the index-th u64 of
/// `ChaCha8Rng::seed_from_u64(master)`.
pub fn trial_seeds(master: u64, trials: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..trials).map(|_| rng.random()).collect()
}

/// Monte Carlo estimates of E A_l for l = 2..=l_max, with the main term and
/// the error bound for the code's weight-4 dual count (when known).
pub fn monte_carlo_moments(
    code: &LinearCode,
    p: usize,
    l_max: u32,
    trials: usize,
    seed: u64,
) -> Result<Vec<MomentReport>> {
    if l_max < 2 {
        bail!(Usage, "l_max must be at least 2");
    }
    if trials == 0 {
        bail!(Usage, "trials must be at least 1");
    }
    let n = code.len();
    let per_trial: Vec<Vec<f64>> = trial_seeds(seed, trials)
        .into_par_iter()
        .map(|s| empirical_moments(&gram(&sample_rows(code, p, s)?), l_max))
        .collect::<Result<_>>()?;
    let y = p as f64 / n as f64;
    let a = code.count_weight4_dual().ok();
    Ok((2..=l_max)
        .map(|l| {
            let values = per_trial.iter().map(|m| m[l as usize]);
            let mean = values.clone().sum::<f64>() / trials as f64;
            let std_error = (trials > 1).then(|| {
                let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
                (var / trials as f64).sqrt()
            });
            MomentReport {
                l,
                empirical_mean: mean,
                std_error,
                trials,
                main_term: mp_moment(y, l),
                error_bound: a.map_or(f64::NAN, |a| el_bound(l, n as u64, a, code.field_size())),
                exact_expectation: None,
                in_theorem_range: ((l as f64) < (p as f64).sqrt()),
            }
        })
        .collect())
}
