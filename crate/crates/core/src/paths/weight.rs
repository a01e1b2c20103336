//! Solution counts W of closed paths and the exact expected moment.
//!
//! W counts tuples (t_0, ..., t_{l-1}) in [n]^l with
//! sum_{u in I_a} (h_{t_u} - h_{t_{u-1}}) = 0 for every block I_a, where
//! h_t is row t of the generator matrix and indices are cyclic. Step j puts
//! +h_{t_j} on the block of j and -h_{t_j} on the block of j + 1.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::{enumerate_path_classes, reduce, PathClass, ReductionStep};
use crate::codes::LinearCode;
use crate::combinatorics::falling_factorial;
use crate::error::{bail, Result};
use crate::gf::FieldCtx;
use crate::moments::c_a;
use crate::spectra::to_f64;

/// Largest n^l a brute-force count may range over.
pub const W_BUDGET: u64 = 100_000_000;

/// Which blocks become fully determined once variable j is assigned.
fn closing_blocks(labels: &[u8]) -> Vec<Vec<usize>> {
    let l = labels.len();
    let v = labels.iter().max().map_or(0, |&m| m as usize + 1);
    let mut last = vec![0usize; v];
    for j in 0..l {
        last[labels[j] as usize] = last[labels[j] as usize].max(j);
        let next = labels[(j + 1) % l] as usize;
        last[next] = last[next].max(j);
    }
    let mut out = vec![Vec::new(); l];
    for (a, &j) in last.iter().enumerate() {
        out[j].push(a);
    }
    out
}

fn check_budget(n: usize, l: usize) -> Result<()> {
    let total = (n as f64).powi(l as i32);
    if total > W_BUDGET as f64 {
        bail!(Resource, "n^l = {n}^{l} exceeds the brute-force budget of {W_BUDGET}");
    }
    Ok(())
}

/// Exact W by depth-first search over t_0, t_1, ..., pruning as soon as a
/// block's equation is complete and fails.
pub fn brute_force_w(path: &PathClass, code: &LinearCode) -> Result<u64> {
    let (n, l) = (code.len(), path.len());
    check_budget(n, l)?;
    let labels = path.labels();
    let closing = closing_blocks(labels);
    let v = path.vertex_count();
    if let Some(rows) = code.packed_rows() {
        let mut sums = vec![0u64; v];
        return Ok(dfs_binary(rows, labels, &closing, 0, &mut sums));
    }
    let k = code.dimension();
    let rows: Vec<&[u32]> = code.rows().collect();
    let negated: Vec<Vec<u32>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| code.ctx().neg(x)).collect())
        .collect();
    let mut search = FieldSearch {
        ctx: code.ctx(),
        rows: &rows,
        negated: &negated,
        labels,
        closing: &closing,
        sums: vec![vec![0u32; k]; v],
    };
    Ok(search.dfs(0))
}

fn dfs_binary(rows: &[u64], labels: &[u8], closing: &[Vec<usize>], j: usize, sums: &mut [u64]) -> u64 {
    let l = labels.len();
    let (a, b) = (labels[j] as usize, labels[(j + 1) % l] as usize);
    let mut count = 0;
    for &h in rows {
        sums[a] ^= h;
        sums[b] ^= h;
        if closing[j].iter().all(|&c| sums[c] == 0) {
            count += if j + 1 == l {
                1
            } else {
                dfs_binary(rows, labels, closing, j + 1, sums)
            };
        }
        sums[a] ^= h;
        sums[b] ^= h;
    }
    count
}

struct FieldSearch<'a> {
    ctx: &'a FieldCtx,
    rows: &'a [&'a [u32]],
    negated: &'a [Vec<u32>],
    labels: &'a [u8],
    closing: &'a [Vec<usize>],
    sums: Vec<Vec<u32>>,
}

impl FieldSearch<'_> {
    fn shift(&mut self, block: usize, by: &[u32]) {
        for (s, &x) in self.sums[block].iter_mut().zip(by) {
            *s = self.ctx.add(*s, x);
        }
    }

    fn dfs(&mut self, j: usize) -> u64 {
        let l = self.labels.len();
        let (a, b) = (self.labels[j] as usize, self.labels[(j + 1) % l] as usize);
        let mut count = 0;
        for t in 0..self.rows.len() {
            let (h, minus_h) = (self.rows[t], self.negated[t].as_slice());
            self.shift(a, h);
            self.shift(b, minus_h);
            let ok = self.closing[j].iter().all(|&c| self.sums[c].iter().all(|&x| x == 0));
            if ok {
                count += if j + 1 == l { 1 } else { self.dfs(j + 1) };
            }
            self.shift(a, minus_h);
            self.shift(b, h);
        }
        count
    }
}

/// E A_l = (1/(p n^l)) sum over classes of p!/(p-v)! W, as an exact rational.
pub fn exact_expected_moment_rational(code: &LinearCode, p: usize, l: usize) -> Result<BigRational> {
    if p == 0 {
        bail!(Usage, "p must be positive");
    }
    let n = code.len();
    check_budget(n, l)?;
    let classes: Vec<PathClass> = enumerate_path_classes(l)?.collect();
    let terms: Vec<BigUint> = classes
        .par_iter()
        .map(|c| {
            let fall = falling_factorial(p as u64, c.vertex_count() as u64);
            if fall == BigUint::ZERO {
                return Ok(fall);
            }
            Ok(fall * brute_force_w(c, code)?)
        })
        .collect::<Result<_>>()?;
    let numer: BigUint = terms.into_iter().sum();
    let denom = BigUint::from(p) * BigUint::from(n).pow(l as u32);
    Ok(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
}

pub fn exact_expected_moment(code: &LinearCode, p: usize, l: usize) -> Result<f64> {
    Ok(to_f64(&exact_expected_moment_rational(code, p, l)?))
}

/// Per-class verification record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub l: usize,
    pub v: usize,
    pub blocks: Vec<Vec<usize>>,
    pub trace: Vec<ReductionStep>,
    pub in_gamma: bool,
    /// `None` when n^l is beyond the brute-force budget.
    pub w: Option<u64>,
    /// n^(l-v+1) for classes in Gamma.
    pub predicted: Option<u64>,
    /// c_A n^(l-v) for classes outside Gamma.
    pub bound: Option<f64>,
    pub pass: Option<bool>,
}

/// Checks W against the Gamma dichotomy, with A the weight-4 dual count.
pub fn verify_class(path: &PathClass, code: &LinearCode, a: u64) -> Result<ClassReport> {
    let (l, v, n) = (path.len(), path.vertex_count(), code.len() as u64);
    let trace = reduce(path);
    let in_gamma = trace.terminal().in_gamma();
    let w = match brute_force_w(path, code) {
        Ok(w) => Some(w),
        Err(crate::Error::Resource(_)) => None,
        Err(e) => return Err(e),
    };
    let (predicted, bound) = if in_gamma {
        let exp = (l + 1 - v) as u32;
        (n.checked_pow(exp), None)
    } else {
        (None, Some(c_a(a, code.field_size()) * (n as f64).powi((l - v) as i32)))
    };
    let pass = w.map(|w| match (predicted, bound) {
        (Some(exact), _) => w == exact,
        (None, Some(b)) => (w as f64) <= b,
        (None, None) => false,
    });
    Ok(ClassReport {
        l,
        v,
        blocks: path.blocks(),
        trace: trace.steps,
        in_gamma,
        w,
        predicted,
        bound,
        pass,
    })
}
