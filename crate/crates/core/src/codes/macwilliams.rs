use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{bail, Result};

/// Krawtchouk values K_j(x) for j = 0..=n, via the three-term recurrence
/// (j+1) K_{j+1}(x) = (j + (q-1)(n-j) - q x) K_j(x) - (q-1)(n-j+1) K_{j-1}(x).
pub fn krawtchouk_column(n: u64, q: u64, x: u64) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut prev = BigInt::zero();
    let mut cur = BigInt::from(1);
    out.push(cur.clone());
    let (qi, ni, xi) = (q as i128, n as i128, x as i128);
    for j in 0..n as i128 {
        let a = BigInt::from(j + (qi - 1) * (ni - j) - qi * xi);
        let b = BigInt::from((qi - 1) * (ni - j + 1));
        let next = (&a * &cur - &b * &prev) / BigInt::from(j + 1);
        prev = cur;
        cur = next;
        out.push(cur.clone());
    }
    out
}

/// Weight distribution of the dual of an [n, k] code over GF(q) with the
/// given weight distribution.
///
/// Fails when the input cannot be a weight enumerator: wrong length, wrong
/// total, or a dual count that comes out negative or fractional.
pub fn macwilliams_transform(weights: &[BigUint], n: usize, k: usize, q: u64) -> Result<Vec<BigUint>> {
    if weights.len() != n + 1 {
        bail!(
            Usage,
            "weight vector has length {}, expected n + 1 = {}",
            weights.len(),
            n + 1
        );
    }
    if q < 2 {
        bail!(Usage, "field size must be at least 2");
    }
    let size = BigUint::from(q).pow(k as u32);
    let total: BigUint = weights.iter().sum();
    if total != size {
        bail!(Domain, "weights sum to {total}, expected q^k = {size}");
    }
    let mut acc = vec![BigInt::zero(); n + 1];
    for (i, a) in weights.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let a = BigInt::from_biguint(Sign::Plus, a.clone());
        for (slot, kv) in acc.iter_mut().zip(krawtchouk_column(n as u64, q, i as u64)) {
            *slot += &a * kv;
        }
    }
    let size = BigInt::from_biguint(Sign::Plus, size);
    acc.into_iter()
        .enumerate()
        .map(|(j, v)| {
            let (quot, rem) = v.div_rem(&size);
            if !rem.is_zero() || quot.is_negative() {
                bail!(
                    Domain,
                    "dual weight count A_{j} = {v}/{size} is not a nonnegative integer; input is not a weight enumerator"
                );
            }
            Ok(quot.to_biguint().expect("nonnegative"))
        })
        .collect()
}
