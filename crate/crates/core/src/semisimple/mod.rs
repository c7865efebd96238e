//! Generic semisimplicity of small quantum cohomology, decided by sampling:
//! one rational point where a generic multiplication operator has a
//! squarefree characteristic polynomial witnesses an étale generic fibre.

mod theorem;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exact_algebra::{format_rational, squarefree, Matrix, Rational};
use crate::frobenius::{FrobeniusError, QuantumAlgebra, SymbolicProduct};
use crate::geometry::{sample_rational, ParameterPoint};
use crate::gw_engine::InvariantTable;

pub use theorem::{blowup_theorem_run, FibreStage, Stage, TheoremReport};

pub const DEFAULT_SAMPLES: usize = 5;
pub const ELEMENT_RESAMPLES: usize = 3;

pub const NILPOTENT_NOTE: &str =
    "all q = 0: the product is the cup product, every element without a unit component is nilpotent, so no sample can be squarefree";

/// Matrix of `(sum_i coeffs_i Δ_i) ∘ (-)`.
pub fn generic_multiplication_operator(a: &QuantumAlgebra, coeffs: &[Rational]) -> Matrix {
    a.algebra().multiplication_matrix(coeffs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    GenericallySemisimple,
    Inconclusive,
}

impl Conclusion {
    pub fn as_str(self) -> &'static str {
        match self {
            Conclusion::GenericallySemisimple => "generically-semisimple",
            Conclusion::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub point: serde_json::Value,
    pub element: Vec<String>,
    /// Coefficients in increasing degree.
    pub charpoly: Vec<String>,
    pub squarefree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub geometry: String,
    pub seed: u64,
    pub samples: Vec<Sample>,
    pub conclusion: Conclusion,
    pub witness: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub witness_point: Option<ParameterPoint>,
}

impl Verdict {
    pub fn is_semisimple(&self) -> bool {
        self.conclusion == Conclusion::GenericallySemisimple
    }

    /// Pretty JSON with fields in declaration order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerdictOptions {
    pub samples: usize,
    pub element_resamples: usize,
    pub seed: u64,
    /// Force `q = 0` at every sample.
    pub classical: bool,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions {
            samples: DEFAULT_SAMPLES,
            element_resamples: ELEMENT_RESAMPLES,
            seed: 0,
            classical: false,
        }
    }
}

/// Random coefficients on every basis class but the unit.
pub fn sample_element(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    (0..dim)
        .map(|i| {
            if i == 0 {
                Rational::zero()
            } else {
                sample_rational(rng)
            }
        })
        .collect()
}

/// Samples points and elements until one characteristic polynomial is
/// squarefree at a point with nondegenerate pairing.
pub fn semisimple_verdict(
    table: &InvariantTable,
    opts: &VerdictOptions,
) -> Result<Verdict, FrobeniusError> {
    let g = table.geometry();
    let product = SymbolicProduct::new(table)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut samples = Vec::new();
    let mut witness_point = None;
    'points: for _ in 0..opts.samples {
        let pt = if opts.classical {
            ParameterPoint::classical(g)
        } else {
            ParameterPoint::sample(g, &mut rng)
        };
        let algebra = product.evaluate(&pt)?;
        let nondegenerate = !algebra.pairing().determinant()?.is_zero();
        for _ in 0..opts.element_resamples {
            let element = sample_element(g.basis_len(), &mut rng);
            let charpoly = generic_multiplication_operator(&algebra, &element).char_poly()?;
            let sf = squarefree(&charpoly)?;
            samples.push(Sample {
                point: pt.to_json(),
                element: element.iter().map(format_rational).collect(),
                charpoly: charpoly.coeffs().iter().map(format_rational).collect(),
                squarefree: sf,
            });
            if sf && nondegenerate {
                witness_point = Some(pt);
                break 'points;
            }
        }
    }
    let conclusion = if witness_point.is_some() {
        Conclusion::GenericallySemisimple
    } else {
        Conclusion::Inconclusive
    };
    Ok(Verdict {
        geometry: g.id().to_string(),
        seed: opts.seed,
        samples,
        conclusion,
        witness: witness_point.as_ref().map(ParameterPoint::to_json),
        note: (opts.classical && witness_point.is_none()).then(|| NILPOTENT_NOTE.to_string()),
        witness_point,
    })
}
