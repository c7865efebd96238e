use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{sample_element, semisimple_verdict, Verdict, VerdictOptions, ELEMENT_RESAMPLES};
use crate::exact_algebra::{format_rational, squarefree};
use crate::frobenius::{fibre_algebra, limit_check, split_check, FrobeniusError, SymbolicProduct};
use crate::geometry::Geometry;
use crate::gw_engine::Engine;

/// Fibre of a blow-up stage, built over the parent algebra at the parent's
/// witness point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibreStage {
    pub split_passed: bool,
    pub failures: Vec<String>,
    pub exceptional_charpoly: Vec<String>,
    pub isomorphism_witness: Option<String>,
    pub element: Vec<String>,
    pub fibre_charpoly: Vec<String>,
    pub fibre_squarefree: bool,
    pub element_attempts: usize,
    pub limit_failures: Vec<String>,
}

impl FibreStage {
    pub fn passed(&self) -> bool {
        self.split_passed && self.fibre_squarefree && self.limit_failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub geometry: String,
    pub verdict: Verdict,
    pub fibre: Option<FibreStage>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub base: String,
    pub points: usize,
    pub stages: Vec<Stage>,
}

impl TheoremReport {
    pub fn all_semisimple(&self) -> bool {
        self.stages.iter().all(|s| s.verdict.is_semisimple())
    }

    pub fn passed(&self) -> bool {
        self.all_semisimple()
            && self
                .stages
                .iter()
                .skip(1)
                .all(|s| s.fibre.as_ref().is_some_and(FibreStage::passed))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Blows up `x` at `points` points one at a time. Every stage gets a verdict;
/// every blow-up stage whose parent has a witness also gets its fibre algebra,
/// the split check, a squarefree test of a generic fibre element and the
/// comparison with the `Z -> 0` limit of the stage's own product.
pub fn blowup_theorem_run(
    engine: &mut Engine,
    x: &Arc<Geometry>,
    points: usize,
    opts: &VerdictOptions,
) -> Result<TheoremReport, FrobeniusError> {
    let mut stages = Vec::new();
    let mut current = Arc::clone(x);
    let base_table = engine.table(&current)?;
    let mut parent_verdict = semisimple_verdict(&base_table, opts)?;
    stages.push(Stage {
        geometry: current.id().to_string(),
        verdict: parent_verdict.clone(),
        fibre: None,
    });
    for step in 1..=points {
        let parent = Arc::clone(&current);
        current = Arc::new(Geometry::blow_up_point(&parent)?);
        let table = engine.table(&current)?;
        let verdict = semisimple_verdict(&table, opts)?;
        let fibre = match &parent_verdict.witness_point {
            Some(pt) => {
                let parent_algebra =
                    SymbolicProduct::new(&*engine.table(&parent)?)?.evaluate(pt)?;
                let fibre = fibre_algebra(current.dim(), &parent_algebra)?;
                let split = split_check(&fibre);
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(step as u64));
                let mut attempt = (Vec::new(), Vec::new(), false);
                let mut attempts = 0;
                while attempts < ELEMENT_RESAMPLES && !attempt.2 {
                    attempts += 1;
                    let element = sample_element(fibre.algebra().dim(), &mut rng);
                    let cp = fibre
                        .algebra()
                        .multiplication_matrix(&element)
                        .char_poly()?;
                    attempt = (element, cp.coeffs().to_vec(), squarefree(&cp)?);
                }
                let limit_failures = limit_check(&SymbolicProduct::new(&table)?, &pt.q, &fibre)?;
                let mut failures = split.table_failures.clone();
                failures.extend(split.failures.iter().cloned());
                Some(FibreStage {
                    split_passed: split.passed(),
                    failures,
                    exceptional_charpoly: split
                        .exceptional_charpoly
                        .coeffs()
                        .iter()
                        .map(format_rational)
                        .collect(),
                    isomorphism_witness: split.isomorphism_witness.clone(),
                    element: attempt.0.iter().map(format_rational).collect(),
                    fibre_charpoly: attempt.1.iter().map(format_rational).collect(),
                    fibre_squarefree: attempt.2,
                    element_attempts: attempts,
                    limit_failures,
                })
            }
            None => None,
        };
        stages.push(Stage {
            geometry: current.id().to_string(),
            verdict: verdict.clone(),
            fibre,
        });
        parent_verdict = verdict;
    }
    Ok(TheoremReport {
        base: x.id().to_string(),
        points,
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::parse_geometry;
    use crate::gw_engine::EngineOptions;

    #[test]
    fn two_points_on_the_plane() {
        let mut engine = Engine::new(EngineOptions::default());
        let x = parse_geometry("P2").unwrap();
        let report = blowup_theorem_run(&mut engine, &x, 2, &VerdictOptions::default()).unwrap();
        assert_eq!(report.stages.len(), 3);
        assert_eq!(report.stages[2].geometry, "Bl2(P2)");
        assert!(report.passed(), "{}", report.to_json());
    }

    #[test]
    fn one_point_on_p3() {
        let mut engine = Engine::new(EngineOptions::default());
        let x = parse_geometry("P3").unwrap();
        let report = blowup_theorem_run(&mut engine, &x, 1, &VerdictOptions::default()).unwrap();
        assert!(report.passed(), "{}", report.to_json());
        assert!(report.stages[1]
            .fibre
            .as_ref()
            .unwrap()
            .isomorphism_witness
            .is_none());
    }
}
