//! Linear block codes over GF(q).
//!
//! A code is stored through its n x k generator matrix H: the codeword of a
//! message x in GF(q)^k is c(x) = H x^T, so row t of H is the linear form
//! producing coordinate t. Weight data (both enumerators, d, the dual
//! distance and the number of weight-4 dual words) is computed once on first
//! use, by enumerating whichever of the code and its dual is smaller and
//! transforming the other side with the MacWilliams identity.

mod builtin;
mod io;
mod macwilliams;

use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{bail, Error, Result};
use crate::gf::FieldCtx;

pub use builtin::{double_trace_code, gold_code, hamming_code, repetition_code, simplex_code};
pub use io::{parse_generator, read_generator_file, write_generator};
pub use macwilliams::{krawtchouk_column, macwilliams_transform};

/// Largest number of codewords enumerated exhaustively.
pub const ENUMERATION_BUDGET: u64 = 1 << 24;

/// Largest dual generator matrix (in entries) materialized by [`LinearCode::dual`].
pub const DUAL_MATRIX_BUDGET: usize = 1 << 22;

/// Exact weight data of a code and its dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightData {
    pub weights: Vec<BigUint>,
    pub dual_weights: Vec<BigUint>,
    /// Minimum distance.
    pub d: usize,
    /// Dual distance.
    pub d_dual: usize,
    /// Number of weight-4 codewords in the dual code.
    pub dual_weight4: BigUint,
}

pub struct LinearCode {
    ctx: Arc<FieldCtx>,
    name: String,
    n: usize,
    k: usize,
    /// Row-major n x k generator entries.
    gen: Vec<u32>,
    /// Binary rows packed into words when q = 2 and k <= 64.
    packed: Option<Vec<u64>>,
    rows_distinct_nonzero: bool,
    weight_data: OnceLock<std::result::Result<WeightData, String>>,
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LinearCode({}, [{}, {}] over GF({}))",
            self.name,
            self.n,
            self.k,
            self.ctx.size()
        )
    }
}

/// Rank of a row-major `rows x cols` matrix over the field.
pub fn rank(ctx: &FieldCtx, entries: &[u32], rows: usize, cols: usize) -> usize {
    row_echelon(ctx, entries.to_vec(), rows, cols).1.len()
}

/// Reduced row echelon form; returns the matrix and its pivot columns.
fn row_echelon(ctx: &FieldCtx, mut a: Vec<u32>, rows: usize, cols: usize) -> (Vec<u32>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        for j in 0..cols {
            a.swap(r * cols + j, p * cols + j);
        }
        let inv = ctx.inv(a[r * cols + c]).expect("pivot is nonzero");
        for j in 0..cols {
            a[r * cols + j] = ctx.mul(a[r * cols + j], inv);
        }
        for i in 0..rows {
            let f = a[i * cols + c];
            if i != r && f != 0 {
                for j in 0..cols {
                    let t = ctx.mul(f, a[r * cols + j]);
                    a[i * cols + j] = ctx.sub(a[i * cols + j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

fn checked_pow(q: u64, e: usize) -> Option<u64> {
    q.checked_pow(u32::try_from(e).ok()?)
}

impl LinearCode {
    /// Builds a code from the rows of its n x k generator matrix.
    ///
    /// Requires n > k >= 1 and rank k. Repeated or zero rows are accepted
    /// but recorded (see [`LinearCode::rows_distinct_nonzero`]).
    pub fn from_rows(ctx: &Arc<FieldCtx>, rows: &[Vec<u32>], name: impl Into<String>) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if k == 0 {
            bail!(Usage, "code dimension must be at least 1");
        }
        if n <= k {
            bail!(Usage, "code length n = {n} must exceed dimension k = {k}");
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
            bail!(Usage, "row {i} has {} entries, expected {k}", r.len());
        }
        if rows.iter().flatten().any(|&e| !ctx.contains(e)) {
            bail!(Usage, "generator entries must be elements of GF({})", ctx.size());
        }
        let gen: Vec<u32> = rows.iter().flatten().copied().collect();
        let r = rank(ctx, &gen, n, k);
        if r < k {
            bail!(Construction, "generator matrix has rank {r} < k = {k}");
        }
        let mut seen = HashSet::new();
        let rows_distinct_nonzero = rows.iter().all(|r| r.iter().any(|&e| e != 0) && seen.insert(r.clone()));
        let packed = (ctx.size() == 2 && k <= 64).then(|| {
            rows.iter()
                .map(|r| r.iter().enumerate().fold(0u64, |acc, (j, &e)| acc | ((e as u64) << j)))
                .collect()
        });
        Ok(LinearCode {
            ctx: Arc::clone(ctx),
            name: name.into(),
            n,
            k,
            gen,
            packed,
            rows_distinct_nonzero,
            weight_data: OnceLock::new(),
        })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    pub fn field_size(&self) -> u64 {
        self.ctx.size() as u64
    }

    /// Row t of the generator matrix.
    pub fn row(&self, t: usize) -> &[u32] {
        &self.gen[t * self.k..(t + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.gen.chunks(self.k)
    }

    /// Packed binary rows (bit j = entry j), available for q = 2, k <= 64.
    pub fn packed_rows(&self) -> Option<&[u64]> {
        self.packed.as_deref()
    }

    /// Whether the rows of H are pairwise distinct and nonzero, i.e. whether
    /// the dual distance is at least 3.
    pub fn rows_distinct_nonzero(&self) -> bool {
        self.rows_distinct_nonzero
    }

    /// Number of codewords q^k, if it fits in a u64.
    pub fn size(&self) -> Option<u64> {
        checked_pow(self.field_size(), self.k)
    }

    /// c(x) = H x^T.
    pub fn encode(&self, message: &[u32]) -> Result<Vec<u32>> {
        if message.len() != self.k || message.iter().any(|&e| !self.ctx.contains(e)) {
            bail!(Usage, "message must be a vector in GF({})^{}", self.ctx.size(), self.k);
        }
        Ok(self
            .rows()
            .map(|row| {
                row.iter()
                    .zip(message)
                    .fold(0u32, |acc, (&h, &x)| self.ctx.add(acc, self.ctx.mul(h, x)))
            })
            .collect())
    }

    /// All q^k codewords in lexicographic order of the message (last
    /// coordinate fastest).
    pub fn codewords(&self) -> Result<Codewords<'_>> {
        match self.size() {
            Some(size) if size <= ENUMERATION_BUDGET => Ok(Codewords {
                code: self,
                message: vec![0; self.k],
                word: vec![0; self.n],
                started: false,
                done: false,
            }),
            _ => bail!(
                Resource,
                "{} has q^k = {}^{} codewords, above the enumeration budget 2^24; use sampling instead",
                self.name,
                self.field_size(),
                self.k
            ),
        }
    }

    /// Generator matrix (n x (n - k)) of the dual code, from a basis of the
    /// null space of H^T.
    pub fn dual(&self) -> Result<LinearCode> {
        let (n, k) = (self.n, self.k);
        if n * (n - k) > DUAL_MATRIX_BUDGET {
            bail!(
                Resource,
                "dual generator of {} would have {n} x {} entries",
                self.name,
                n - k
            );
        }
        // H^T is k x n
        let mut ht = vec![0u32; k * n];
        for t in 0..n {
            for j in 0..k {
                ht[j * n + t] = self.gen[t * k + j];
            }
        }
        let (rref, pivots) = row_echelon(&self.ctx, ht, k, n);
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut rows = vec![vec![0u32; free.len()]; n];
        for (b, &f) in free.iter().enumerate() {
            rows[f][b] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                rows[pc][b] = self.ctx.neg(rref[r * n + f]);
            }
        }
        LinearCode::from_rows(&self.ctx, &rows, format!("dual of {}", self.name))
    }

    /// Exact weight distribution A_0..A_n by enumeration (no MacWilliams).
    pub fn enumerate_weights(&self) -> Result<Vec<BigUint>> {
        let size = match self.size() {
            Some(s) if s <= ENUMERATION_BUDGET => s,
            _ => bail!(
                Resource,
                "cannot enumerate {}: q^k = {}^{} exceeds 2^24",
                self.name,
                self.field_size(),
                self.k
            ),
        };
        let mut counts = vec![0u64; self.n + 1];
        if self.ctx.size() == 2 {
            // Gray-code walk over messages with column bitsets.
            let words = self.n.div_ceil(64);
            let mut cols = vec![0u64; self.k * words];
            for t in 0..self.n {
                for j in 0..self.k {
                    if self.gen[t * self.k + j] == 1 {
                        cols[j * words + t / 64] |= 1 << (t % 64);
                    }
                }
            }
            let mut word = vec![0u64; words];
            counts[0] += 1;
            for i in 1..size {
                let j = i.trailing_zeros() as usize;
                for (w, c) in word.iter_mut().zip(&cols[j * words..(j + 1) * words]) {
                    *w ^= c;
                }
                let wt: u32 = word.iter().map(|w| w.count_ones()).sum();
                counts[wt as usize] += 1;
            }
        } else {
            for c in self.codewords()? {
                counts[c.iter().filter(|&&e| e != 0).count()] += 1;
            }
        }
        Ok(counts.into_iter().map(BigUint::from).collect())
    }

    fn compute_weight_data(&self) -> Result<WeightData> {
        let q = self.field_size();
        let (n, k) = (self.n, self.k);
        let direct = checked_pow(q, k).is_some_and(|s| s <= ENUMERATION_BUDGET);
        let via_dual = checked_pow(q, n - k).is_some_and(|s| s <= ENUMERATION_BUDGET);
        let (weights, dual_weights) = if direct && (k <= n - k || !via_dual) {
            let w = self.enumerate_weights()?;
            let dw = macwilliams_transform(&w, n, k, q)?;
            (w, dw)
        } else if via_dual {
            let dw = self.dual()?.enumerate_weights()?;
            let w = macwilliams_transform(&dw, n, n - k, q)?;
            (w, dw)
        } else {
            bail!(
                Resource,
                "weight data unavailable for {}: both q^k and q^(n-k) exceed 2^24",
                self.name
            );
        };
        let first_nonzero = |v: &[BigUint]| (1..v.len()).find(|&w| !v[w].is_zero());
        Ok(WeightData {
            d: first_nonzero(&weights).unwrap_or(0),
            d_dual: first_nonzero(&dual_weights).unwrap_or(0),
            dual_weight4: dual_weights.get(4).cloned().unwrap_or_default(),
            weights,
            dual_weights,
        })
    }

    /// Cached exact weight data; a resource error when both the code and its
    /// dual are beyond the enumeration budget.
    pub fn weight_data(&self) -> Result<&WeightData> {
        self.weight_data
            .get_or_init(|| self.compute_weight_data().map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::Resource(e.clone()))
    }

    pub fn weight_distribution(&self) -> Result<&[BigUint]> {
        Ok(&self.weight_data()?.weights)
    }

    pub fn dual_weight_distribution(&self) -> Result<&[BigUint]> {
        Ok(&self.weight_data()?.dual_weights)
    }

    pub fn min_distance(&self) -> Result<usize> {
        Ok(self.weight_data()?.d)
    }

    pub fn dual_distance(&self) -> Result<usize> {
        Ok(self.weight_data()?.d_dual)
    }

    /// A = number of weight-4 codewords of the dual code.
    pub fn count_weight4_dual(&self) -> Result<u64> {
        self.weight_data()?
            .dual_weight4
            .to_u64()
            .ok_or_else(|| Error::Range("weight-4 dual count exceeds u64".into()))
    }

    /// Checks d_dual >= 5 for binary codes without enumerating: rows must be
    /// distinct and nonzero, no row may be the sum of two others, and no two
    /// disjoint row pairs may share a sum.
    pub fn binary_dual_distance_at_least_5(&self) -> Result<bool> {
        let Some(rows) = self.packed_rows() else {
            bail!(Usage, "pairwise check needs a binary code with k <= 64");
        };
        if !self.rows_distinct_nonzero {
            return Ok(false);
        }
        // distinct rows: equal pair sums always come from disjoint pairs
        if self.k <= 32 {
            let words = (1usize << self.k).div_ceil(64);
            let mut row_bits = vec![0u64; words];
            for &r in rows {
                row_bits[(r >> 6) as usize] |= 1 << (r & 63);
            }
            let mut sum_bits = vec![0u64; words];
            for a in 0..self.n {
                for b in a + 1..self.n {
                    let s = rows[a] ^ rows[b];
                    let (w, bit) = ((s >> 6) as usize, 1u64 << (s & 63));
                    if row_bits[w] & bit != 0 || sum_bits[w] & bit != 0 {
                        return Ok(false);
                    }
                    sum_bits[w] |= bit;
                }
            }
        } else {
            let row_set: HashSet<u64> = rows.iter().copied().collect();
            let mut sums = HashSet::new();
            for a in 0..self.n {
                for b in a + 1..self.n {
                    let s = rows[a] ^ rows[b];
                    if row_set.contains(&s) || !sums.insert(s) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Iterator over codewords; see [`LinearCode::codewords`].
pub struct Codewords<'a> {
    code: &'a LinearCode,
    message: Vec<u32>,
    word: Vec<u32>,
    started: bool,
    done: bool,
}

impl Iterator for Codewords<'_> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.word.clone());
        }
        let ctx = &self.code.ctx;
        let (k, q) = (self.code.k, ctx.size());
        // odometer increment, updating the codeword column by column
        for j in (0..k).rev() {
            let old = self.message[j];
            let new = if old + 1 == q { 0 } else { old + 1 };
            let delta = ctx.sub(new, old);
            for (t, w) in self.word.iter_mut().enumerate() {
                let h = self.code.gen[t * k + j];
                if h != 0 {
                    *w = ctx.add(*w, ctx.mul(h, delta));
                }
            }
            self.message[j] = new;
            if new != 0 {
                return Some(self.word.clone());
            }
        }
        self.done = true;
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn identity_generator_rejected() {
        let f = FieldCtx::new(2, 1).unwrap();
        let rows = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert!(matches!(LinearCode::from_rows(&f, &rows, "id"), Err(Error::Usage(_))));
    }

    #[test]
    fn rank_deficient_rejected() {
        let f = FieldCtx::new(2, 1).unwrap();
        let rows = vec![vec![1, 1], vec![1, 1], vec![0, 0]];
        assert!(matches!(
            LinearCode::from_rows(&f, &rows, "x"),
            Err(Error::Construction(_))
        ));
    }

    #[test]
    fn empty_dimension_rejected() {
        let f = FieldCtx::new(2, 1).unwrap();
        let rows: Vec<Vec<u32>> = vec![vec![], vec![]];
        assert!(LinearCode::from_rows(&f, &rows, "k0").is_err());
    }

    #[test]
    fn repetition_codewords() {
        let c = repetition_code(3).unwrap();
        let words: Vec<_> = c.codewords().unwrap().collect();
        assert_eq!(words, vec![vec![0, 0, 0], vec![1, 1, 1]]);
        assert_eq!(c.weight_distribution().unwrap(), big(&[1, 0, 0, 1]).as_slice());
        assert!(!c.rows_distinct_nonzero());
    }

    #[test]
    fn codeword_order_is_lexicographic() {
        let f = FieldCtx::new(3, 1).unwrap();
        let c = LinearCode::from_rows(&f, &[vec![1, 0], vec![0, 1], vec![1, 2]], "t").unwrap();
        let words: Vec<_> = c.codewords().unwrap().collect();
        assert_eq!(words.len(), 9);
        let mut i = 0;
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(words[i], c.encode(&[a, b]).unwrap());
                i += 1;
            }
        }
    }

    #[test]
    fn simplex3_is_constant_weight() {
        let c = simplex_code(3).unwrap();
        let words: Vec<_> = c.codewords().unwrap().collect();
        assert_eq!(words.len(), 8);
        for w in &words[1..] {
            assert_eq!(w.iter().filter(|&&e| e == 1).count(), 4);
        }
    }

    #[test]
    fn hamming74_distribution() {
        let c = hamming_code(3).unwrap();
        assert_eq!((c.len(), c.dimension()), (7, 4));
        assert_eq!(
            c.weight_distribution().unwrap(),
            big(&[1, 0, 0, 7, 7, 0, 0, 1]).as_slice()
        );
        assert_eq!(c.min_distance().unwrap(), 3);
        assert_eq!(c.dual_distance().unwrap(), 4);
        assert_eq!(c.count_weight4_dual().unwrap(), 7);
    }

    #[test]
    fn simplex_dual_distance_is_three() {
        for m in 2..=6 {
            assert_eq!(simplex_code(m).unwrap().dual_distance().unwrap(), 3, "m={m}");
        }
    }

    #[test]
    fn dual_of_dual_spans_the_code() {
        let c = gold_code(5).unwrap();
        let dd = c.dual().unwrap().dual().unwrap();
        assert_eq!(dd.dimension(), c.dimension());
        // every generator column of dd lies in the original code: the stacked
        // matrix [H | H''] keeps rank k
        let stacked: Vec<u32> = (0..c.len())
            .flat_map(|t| c.row(t).iter().chain(dd.row(t)).copied().collect::<Vec<_>>())
            .collect();
        assert_eq!(rank(c.ctx(), &stacked, c.len(), 2 * c.dimension()), c.dimension());
    }

    #[test]
    fn enumeration_budget_enforced() {
        let c = simplex_code(16).unwrap();
        assert!(c.codewords().is_ok());
        assert!(matches!(c.dual(), Err(Error::Resource(_))));
        assert!(matches!(hamming_code(10).unwrap().codewords(), Err(Error::Resource(_))));
    }

    #[test]
    fn weight_data_uses_dual_when_code_is_large() {
        // [15, 11] Hamming: enumerate the 16-word simplex dual instead
        let c = hamming_code(4).unwrap();
        let w = c.weight_distribution().unwrap();
        assert_eq!(w.iter().sum::<BigUint>(), BigUint::from(1u32 << 11));
        assert_eq!(c.min_distance().unwrap(), 3);
        assert_eq!(w, c.enumerate_weights().unwrap().as_slice());
    }

    #[test]
    fn pairwise_dual_check_agrees_with_enumeration() {
        for c in [
            gold_code(3).unwrap(),
            gold_code(5).unwrap(),
            double_trace_code(4, 3).unwrap(),
        ] {
            assert!(c.binary_dual_distance_at_least_5().unwrap());
            assert!(c.dual_distance().unwrap() >= 5);
        }
        for c in [simplex_code(4).unwrap(), hamming_code(3).unwrap()] {
            assert!(!c.binary_dual_distance_at_least_5().unwrap());
            assert!(c.dual_distance().unwrap() < 5);
        }
    }

    #[test]
    fn ternary_code_weights() {
        let f = FieldCtx::new(3, 1).unwrap();
        let c = LinearCode::from_rows(&f, &[vec![1], vec![1], vec![1]], "rep3").unwrap();
        assert_eq!(c.weight_distribution().unwrap(), big(&[1, 0, 0, 2]).as_slice());
        assert_eq!(c.dual_weight_distribution().unwrap(), big(&[1, 0, 6, 2]).as_slice());
        assert_eq!(c.dual().unwrap().enumerate_weights().unwrap(), big(&[1, 0, 6, 2]));
    }
}
