use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Geometry;
use crate::exact_algebra::{format_rational, ratio, Rational};

/// Height bound for sampled numerators and denominators.
pub const SAMPLE_HEIGHT: i64 = 97;

/// A rational evaluation point: one `q` per curve-lattice coordinate (so
/// `q^beta = prod q_i^{beta_i}`) and one `x` per basis class. Only the `x` of
/// non-divisor, non-unit classes are used; divisor directions live in `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterPoint {
    pub q: Vec<Rational>,
    pub x: Vec<Rational>,
}

impl ParameterPoint {
    pub fn small(g: &Geometry, q: Vec<Rational>) -> Self {
        assert_eq!(q.len(), g.curve_rank());
        ParameterPoint {
            q,
            x: vec![Rational::default(); g.basis_len()],
        }
    }

    pub fn classical(g: &Geometry) -> Self {
        Self::small(g, vec![Rational::default(); g.curve_rank()])
    }

    pub fn is_small(&self) -> bool {
        self.x.iter().all(|v| *v == Rational::default())
    }

    /// Nonzero small-height `q`, `x = 0`.
    pub fn sample(g: &Geometry, rng: &mut ChaCha8Rng) -> Self {
        let q = (0..g.curve_rank()).map(|_| sample_nonzero(rng)).collect();
        Self::small(g, q)
    }

    /// [`Self::sample`] from a fresh generator seeded with `seed`.
    pub fn sample_seeded(g: &Geometry, seed: u64) -> Self {
        Self::sample(g, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let fmt = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
        serde_json::json!({ "q": fmt(&self.q), "x": fmt(&self.x) })
    }
}

pub fn sample_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(
        rng.gen_range(-SAMPLE_HEIGHT..=SAMPLE_HEIGHT),
        rng.gen_range(1..=SAMPLE_HEIGHT),
    )
}

pub fn sample_nonzero(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let v = sample_rational(rng);
        if v != Rational::default() {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic_and_nonzero() {
        let g = Geometry::blown_up_projective_space(2, 2).unwrap();
        let a = ParameterPoint::sample(&g, &mut ChaCha8Rng::seed_from_u64(7));
        let b = ParameterPoint::sample(&g, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert_eq!(a.q.len(), 3);
        assert!(a.q.iter().all(|v| *v != Rational::default()));
        assert!(a.is_small());
        for v in &a.q {
            assert!(v.numer().magnitude() <= &97u32.into());
            assert!(v.denom().magnitude() <= &97u32.into());
        }
    }
}
