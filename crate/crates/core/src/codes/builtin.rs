use std::collections::BTreeSet;

use num_traits::Zero;

use super::LinearCode;
use crate::error::{bail, Result};
use crate::gf::FieldCtx;

/// Binary [n, 1] repetition code.
pub fn repetition_code(n: usize) -> Result<LinearCode> {
    if n < 2 {
        bail!(Usage, "repetition code needs n >= 2");
    }
    let f = FieldCtx::new(2, 1)?;
    LinearCode::from_rows(&f, &vec![vec![1]; n], format!("repetition(n={n})"))
}

/// Binary [2^m - 1, m] simplex code: the rows of H are all nonzero vectors
/// of GF(2)^m.
pub fn simplex_code(m: u32) -> Result<LinearCode> {
    if !(2..=16).contains(&m) {
        bail!(Usage, "simplex code supports 2 <= m <= 16, got {m}");
    }
    let f = FieldCtx::new(2, 1)?;
    let rows: Vec<Vec<u32>> = (1u32..1 << m).map(|v| (0..m).map(|j| (v >> j) & 1).collect()).collect();
    LinearCode::from_rows(&f, &rows, format!("simplex(m={m})"))
}

/// Binary [2^m - 1, 2^m - 1 - m] Hamming code, the dual of the simplex code.
pub fn hamming_code(m: u32) -> Result<LinearCode> {
    // the generator is n x (n - m); m = 10 is already a 1023 x 1013 matrix
    if !(2..=10).contains(&m) {
        bail!(Usage, "hamming code supports 2 <= m <= 10, got {m}");
    }
    let dual = simplex_code(m)?.dual()?;
    let rows: Vec<Vec<u32>> = dual.rows().map(<[u32]>::to_vec).collect();
    LinearCode::from_rows(dual.ctx(), &rows, format!("hamming(m={m})"))
}

/// Binary code of length 2^m - 1 with codewords
/// c_t(a, b) = tr(a alpha^t) + tr(b alpha^(d t)), a, b in GF(2^m),
/// alpha the pinned primitive element. Coordinates of a and b are taken in
/// the polynomial basis 1, alpha, ..., alpha^(m-1), so
/// H[t][j] = tr(alpha^(j + t)) and H[t][m + j] = tr(alpha^(j + d t)).
pub fn double_trace_code(m: u32, d: u64) -> Result<LinearCode> {
    if !(2..=16).contains(&m) {
        bail!(Usage, "trace code supports 2 <= m <= 16, got {m}");
    }
    let big = FieldCtx::new(2, m)?;
    let n = (1u64 << m) - 1;
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|t| {
            let first = (0..m as u64).map(|j| big.trace(big.exp(j + t)));
            let second = (0..m as u64).map(|j| big.trace(big.exp(j + d * t)));
            first.chain(second).collect()
        })
        .collect();
    let f = FieldCtx::new(2, 1)?;
    LinearCode::from_rows(&f, &rows, format!("trace(m={m},d={d})"))
}

/// Binary Gold code [2^m - 1, 2m] from the preferred pair (u, u[3]), m odd.
///
/// Construction checks that the dual distance is at least 5, exactly via the
/// weight enumerators when they are within budget and through the pairwise
/// row-sum test otherwise.
pub fn gold_code(m: u32) -> Result<LinearCode> {
    if m.is_multiple_of(2) {
        bail!(Usage, "Gold codes from decimation 3 need odd m, got {m}");
    }
    if !(3..=13).contains(&m) {
        bail!(Usage, "gold code supports odd 3 <= m <= 13, got {m}");
    }
    let base = double_trace_code(m, 3)?;
    let rows: Vec<Vec<u32>> = base.rows().map(<[u32]>::to_vec).collect();
    let code = LinearCode::from_rows(base.ctx(), &rows, format!("gold(m={m})"))?;
    let ok = match code.weight_data() {
        Ok(wd) => {
            let nonzero: BTreeSet<usize> = (1..wd.weights.len()).filter(|&w| !wd.weights[w].is_zero()).collect();
            wd.d_dual >= 5 && nonzero.len() == 3
        }
        Err(_) => code.binary_dual_distance_at_least_5()?,
    };
    if !ok {
        bail!(
            Construction,
            "gold(m={m}) failed verification; check the pinned primitive polynomial"
        );
    }
    Ok(code)
}
