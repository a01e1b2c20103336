//! The code-based random matrix ensemble.
//!
//! Rows of a sampled matrix are images under the componentwise additive
//! character of codewords drawn independently and uniformly (with
//! replacement). Entries are kept as trace residues r in [0, l): the
//! matrix entry is exp(2 pi i r / l), so every entry is exactly unit
//! modulus and Gram entries are computed from exact residue counts.
//!
//! Seeding: row i of a matrix with seed s draws its message from
//! `ChaCha8Rng::seed_from_u64(s)` on stream i, one `random_range(0..q)`
//! per message coordinate, in coordinate order.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codes::LinearCode;
use crate::error::{bail, Result};
use crate::gf::FieldCtx;

/// Componentwise character image of a vector over GF(q).
pub fn embed(ctx: &FieldCtx, codeword: &[u32]) -> Vec<Complex64> {
    codeword.iter().map(|&c| ctx.character(c)).collect()
}

/// A p x n matrix of unit-modulus entries drawn from a code.
#[derive(Debug, Clone)]
pub struct SampledMatrix {
    ctx: Arc<FieldCtx>,
    p: usize,
    n: usize,
    /// Row-major trace residues.
    phases: Vec<u32>,
    /// Row-major messages (p x k) the rows were encoded from.
    messages: Vec<u32>,
    seed: u64,
    code_id: String,
}

/// Per-row generator of the documented stream-split rule.
pub fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

/// Samples p rows for the spectral ensemble, which requires 1 <= p < n.
pub fn sample_matrix(code: &LinearCode, p: usize, seed: u64) -> Result<SampledMatrix> {
    let n = code.len();
    if p == 0 || p >= n {
        bail!(Usage, "need 1 <= p < n, got p = {p}, n = {n}");
    }
    sample_rows(code, p, seed)
}

/// Same draw as [`sample_matrix`] for any p >= 1. Moment expectations are
/// defined for every p, so their estimators use this entry point.
pub fn sample_rows(code: &LinearCode, p: usize, seed: u64) -> Result<SampledMatrix> {
    let n = code.len();
    if p == 0 {
        bail!(Usage, "need p >= 1");
    }
    let ctx = code.ctx();
    let q = ctx.size();
    let k = code.dimension();
    let rows: Vec<(Vec<u32>, Vec<u32>)> = (0..p)
        .into_par_iter()
        .map(|i| {
            let mut rng = row_rng(seed, i);
            let message: Vec<u32> = (0..k).map(|_| rng.random_range(0..q)).collect();
            let phases = match code.packed_rows() {
                Some(packed) => {
                    let x = message
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j));
                    packed.iter().map(|r| (r & x).count_ones() & 1).collect()
                }
                None => code
                    .encode(&message)
                    .expect("message drawn in range")
                    .into_iter()
                    .map(|c| ctx.trace(c))
                    .collect(),
            };
            (message, phases)
        })
        .collect();
    let mut phases = Vec::with_capacity(p * n);
    let mut messages = Vec::with_capacity(p * k);
    for (m, ph) in rows {
        messages.extend(m);
        phases.extend(ph);
    }
    Ok(SampledMatrix {
        ctx: Arc::clone(ctx),
        p,
        n,
        phases,
        messages,
        seed,
        code_id: code.name().to_string(),
    })
}

impl SampledMatrix {
    pub fn rows(&self) -> usize {
        self.p
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// Aspect ratio y = p / n.
    pub fn aspect_ratio(&self) -> f64 {
        self.p as f64 / self.n as f64
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn code_id(&self) -> &str {
        &self.code_id
    }

    /// Entries are real (+-1) in characteristic 2.
    pub fn is_real(&self) -> bool {
        self.ctx.characteristic() == 2
    }

    pub fn entry(&self, i: usize, t: usize) -> Complex64 {
        self.ctx.root_of_unity(self.phases[i * self.n + t])
    }

    pub fn row(&self, i: usize) -> Vec<Complex64> {
        (0..self.n).map(|t| self.entry(i, t)).collect()
    }

    /// Message (element of GF(q)^k) encoded in row i.
    pub fn message(&self, i: usize) -> &[u32] {
        let k = self.messages.len() / self.p;
        &self.messages[i * k..(i + 1) * k]
    }

    /// Row-major CSV; real matrices write "re" per entry, others "re,im".
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.p {
            let cells: Vec<String> = (0..self.n)
                .map(|t| {
                    let z = self.entry(i, t);
                    if self.is_real() {
                        format!("{}", z.re)
                    } else {
                        format!("{},{}", z.re, z.im)
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
enum GramData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// Normalized Gram matrix G = (1/n) Phi Phi^*, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    p: usize,
    n: usize,
    data: GramData,
}

pub fn gram(mat: &SampledMatrix) -> GramMatrix {
    let (p, n) = (mat.p, mat.n);
    let nf = n as f64;
    if mat.is_real() {
        let words = n.div_ceil(64);
        let packed: Vec<u64> = (0..p)
            .flat_map(|i| {
                let row = &mat.phases[i * n..(i + 1) * n];
                (0..words).map(move |w| {
                    row[w * 64..((w + 1) * 64).min(n)]
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (b, &r)| acc | ((r as u64) << b))
                })
            })
            .collect();
        let upper: Vec<Vec<f64>> = (0..p)
            .into_par_iter()
            .map(|i| {
                let ri = &packed[i * words..(i + 1) * words];
                (i..p)
                    .map(|j| {
                        let rj = &packed[j * words..(j + 1) * words];
                        let diff: u32 = ri.iter().zip(rj).map(|(a, b)| (a ^ b).count_ones()).sum();
                        (n as i64 - 2 * diff as i64) as f64 / nf
                    })
                    .collect()
            })
            .collect();
        let mut data = vec![0.0; p * p];
        for (i, row) in upper.into_iter().enumerate() {
            for (off, v) in row.into_iter().enumerate() {
                data[i * p + i + off] = v;
                data[(i + off) * p + i] = v;
            }
        }
        GramMatrix {
            p,
            n,
            data: GramData::Real(data),
        }
    } else {
        let l = mat.ctx.characteristic();
        let upper: Vec<Vec<Complex64>> = (0..p)
            .into_par_iter()
            .map(|i| {
                let ri = &mat.phases[i * n..(i + 1) * n];
                (i..p)
                    .map(|j| {
                        let rj = &mat.phases[j * n..(j + 1) * n];
                        let mut counts = vec![0u64; l as usize];
                        for (&a, &b) in ri.iter().zip(rj) {
                            counts[((a + l - b) % l) as usize] += 1;
                        }
                        let sum: Complex64 = counts
                            .iter()
                            .enumerate()
                            .map(|(r, &c)| mat.ctx.root_of_unity(r as u32) * c as f64)
                            .sum();
                        sum / nf
                    })
                    .collect()
            })
            .collect();
        let mut data = vec![Complex64::new(0.0, 0.0); p * p];
        for (i, row) in upper.into_iter().enumerate() {
            for (off, v) in row.into_iter().enumerate() {
                data[i * p + i + off] = v;
                data[(i + off) * p + i] = v.conj();
            }
            // counts put all n terms on residue 0
            data[i * p + i] = Complex64::new(1.0, 0.0);
        }
        GramMatrix {
            p,
            n,
            data: GramData::Complex(data),
        }
    }
}

impl GramMatrix {
    /// Real symmetric Gram matrix from row-major entries; `n` is the length
    /// of the underlying rows.
    pub fn from_real(p: usize, n: usize, entries: Vec<f64>) -> Result<Self> {
        let g = GramMatrix {
            p,
            n,
            data: GramData::Real(entries),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_complex(p: usize, n: usize, entries: Vec<Complex64>) -> Result<Self> {
        let g = GramMatrix {
            p,
            n,
            data: GramData::Complex(entries),
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let p = self.p;
        let len = match &self.data {
            GramData::Real(v) => v.len(),
            GramData::Complex(v) => v.len(),
        };
        if p == 0 || len != p * p {
            bail!(Usage, "Gram matrix needs p*p entries with p >= 1");
        }
        for i in 0..p {
            if self.get(i, i) != Complex64::new(1.0, 0.0) {
                bail!(Usage, "diagonal entry ({i},{i}) is not 1");
            }
            for j in i + 1..p {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > 1e-12 {
                    bail!(Usage, "matrix is not Hermitian at ({i},{j})");
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    /// Length n of the rows the matrix was formed from.
    pub fn row_length(&self) -> usize {
        self.n
    }

    pub fn is_real(&self) -> bool {
        matches!(self.data, GramData::Real(_))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match &self.data {
            GramData::Real(v) => Complex64::new(v[i * self.p + j], 0.0),
            GramData::Complex(v) => v[i * self.p + j],
        }
    }

    pub fn real_entries(&self) -> Option<&[f64]> {
        match &self.data {
            GramData::Real(v) => Some(v),
            GramData::Complex(_) => None,
        }
    }

    pub fn complex_entries(&self) -> Vec<Complex64> {
        match &self.data {
            GramData::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            GramData::Complex(v) => v.clone(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.p).map(|i| self.get(i, i).re).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{gold_code, repetition_code, LinearCode};

    #[test]
    fn embed_examples() {
        let f2 = FieldCtx::new(2, 1).unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(embed(&f2, &[0, 0, 0]), vec![one; 3]);
        assert_eq!(embed(&f2, &[1, 0, 1]), vec![-one, one, -one]);
        let f3 = FieldCtx::new(3, 1).unwrap();
        let e = embed(&f3, &[1, 2]);
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!((e[0] - w).norm() < 1e-15);
        assert!((e[1] - w * w).norm() < 1e-15);
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = gold_code(5).unwrap();
        let a = sample_matrix(&g, 15, 42).unwrap();
        let b = sample_matrix(&g, 15, 42).unwrap();
        assert_eq!(a.phases, b.phases);
        assert_eq!(a.to_csv(), b.to_csv());
        let c = sample_matrix(&g, 15, 43).unwrap();
        assert_ne!(a.phases, c.phases);
    }

    #[test]
    fn gold_sample_shape() {
        let g = gold_code(5).unwrap();
        let s = sample_matrix(&g, 15, 7).unwrap();
        assert_eq!((s.rows(), s.cols()), (15, 31));
        for i in 0..15 {
            assert_eq!(s.row(i), embed(g.ctx(), &g.encode(s.message(i)).unwrap()));
            assert!(s.row(i).iter().all(|z| z.im == 0.0 && z.re.abs() == 1.0));
        }
    }

    #[test]
    fn rejects_p_not_below_n() {
        let c = repetition_code(3).unwrap();
        assert!(sample_matrix(&c, 3, 0).is_err());
        assert!(sample_matrix(&c, 0, 0).is_err());
    }

    #[test]
    fn repetition_rows_chi_square() {
        // each row is +(1,1,1) or -(1,1,1) with probability 1/2
        let c = repetition_code(3).unwrap();
        let (mut plus, total) = (0u64, 10_000u64);
        for seed in 0..total / 2 {
            let s = sample_matrix(&c, 2, seed).unwrap();
            for i in 0..2 {
                let row = s.row(i);
                assert!(row.iter().all(|&z| z == row[0]));
                if row[0].re > 0.0 {
                    plus += 1;
                }
            }
        }
        let e = total as f64 / 2.0;
        let chi2 = ((plus as f64 - e).powi(2) + ((total - plus) as f64 - e).powi(2)) / e;
        // chi-square(1) critical value at alpha = 0.001
        assert!(chi2 < 10.828, "chi2 = {chi2}");
    }

    #[test]
    fn gram_examples() {
        let c = gold_code(5).unwrap();
        let s = sample_matrix(&c, 1, 3).unwrap();
        let g = gram(&s);
        assert_eq!(g.get(0, 0), Complex64::new(1.0, 0.0));
        let s = sample_matrix(&c, 20, 3).unwrap();
        let g = gram(&s);
        assert_eq!(g.trace(), 20.0);
        let corner: Vec<f64> = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&(i, j)| g.get(i, j).re)
            .collect();
        assert!(GramMatrix::from_real(2, 3, corner).is_ok());
    }

    #[test]
    fn complex_gram_is_hermitian() {
        let f = FieldCtx::new(3, 2).unwrap();
        let rows: Vec<Vec<u32>> = (1..9)
            .flat_map(|a| [vec![a, 0], vec![0, a], vec![a, a]])
            .take(20)
            .collect();
        let c = LinearCode::from_rows(&f, &rows, "t").unwrap();
        let s = sample_matrix(&c, 10, 5).unwrap();
        let g = gram(&s);
        assert!(!g.is_real());
        for i in 0..10 {
            assert_eq!(g.get(i, i), Complex64::new(1.0, 0.0));
            for j in 0..10 {
                assert_eq!(g.get(i, j), g.get(j, i).conj());
                let direct: Complex64 = s
                    .row(i)
                    .iter()
                    .zip(s.row(j))
                    .map(|(a, b)| a * b.conj())
                    .sum::<Complex64>()
                    / 20.0;
                assert!((direct - g.get(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_invalid_gram() {
        assert!(GramMatrix::from_real(2, 3, vec![1.0, 0.5, 0.4, 1.0]).is_err());
        assert!(GramMatrix::from_real(2, 3, vec![2.0, 0.0, 0.0, 1.0]).is_err());
        assert!(GramMatrix::from_real(2, 3, vec![1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn codeword_frequencies_uniform() {
        // [7,3] simplex: 8 codewords, 10^5 draws
        let c = crate::codes::simplex_code(3).unwrap();
        let mut counts = [0u64; 8];
        let draws = 100_000;
        let p = 5;
        for seed in 0..(draws / p) as u64 {
            let s = sample_matrix(&c, p, seed).unwrap();
            for i in 0..p {
                let m = s.message(i);
                counts[(m[0] + 2 * m[1] + 4 * m[2]) as usize] += 1;
            }
        }
        let expect = draws as f64 / 8.0;
        let sd = (draws as f64 * (1.0 / 8.0) * (7.0 / 8.0)).sqrt();
        for c in counts {
            assert!((c as f64 - expect).abs() < 4.0 * sd, "{counts:?}");
        }
    }
}
