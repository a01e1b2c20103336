//! Exact integer helpers shared by the moment and path modules.

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Narayana number N(l, v) = (1/v) C(l, v-1) C(l-1, v-1); zero outside 1 <= v <= l.
pub fn narayana(l: u64, v: u64) -> BigUint {
    if v == 0 || v > l {
        return BigUint::zero();
    }
    binomial(l, v - 1) * binomial(l - 1, v - 1) / v
}

pub fn catalan(l: u64) -> BigUint {
    binomial(2 * l, l) / (l + 1)
}

/// p! / (p - v)!, zero when v > p.
pub fn falling_factorial(p: u64, v: u64) -> BigUint {
    if v > p {
        return BigUint::zero();
    }
    (0..v).fold(BigUint::one(), |acc, i| acc * (p - i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binomial(7, 3), BigUint::from(35u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(narayana(4, 2), BigUint::from(6u32));
        assert_eq!(catalan(4), BigUint::from(14u32));
        assert_eq!(falling_factorial(5, 2), BigUint::from(20u32));
        assert_eq!(falling_factorial(2, 3), BigUint::zero());
    }

    #[test]
    fn narayana_rows_sum_to_catalan() {
        for l in 1..=30u64 {
            let row: BigUint = (1..=l).map(|v| narayana(l, v)).sum();
            assert_eq!(row, catalan(l), "l={l}");
        }
    }
}
