//! Independent oracles shared by the integration tests.

use num_bigint::BigInt;
use num_traits::{One, Zero};

fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Rational plane curves of degree `d` through `3d - 1` general points.
pub fn kontsevich(max_d: usize) -> Vec<BigInt> {
    let mut n = vec![BigInt::zero(), BigInt::one()];
    for d in 2..=max_d as i64 {
        let mut total = BigInt::zero();
        for a in 1..d {
            let b = d - a;
            let weight = BigInt::from(a * a * b)
                * (BigInt::from(b) * binomial(3 * d - 4, 3 * a - 2)
                    - BigInt::from(a) * binomial(3 * d - 4, 3 * a - 1));
            total += &n[a as usize] * &n[b as usize] * weight;
        }
        n.push(total);
    }
    n
}
