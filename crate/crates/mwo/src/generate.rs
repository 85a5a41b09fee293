//! Seeded synthetic instance generation.
//!
//! Instances are feasible by construction: every concept appears in at least
//! one material and in at least one student's requirement set, prerequisite
//! edges only point from easier to harder materials (so the relation is
//! acyclic), and time windows are wide enough that a selection satisfying
//! them exists.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{
    AcsInstance, ConceptGraph, LearningMaterial, PrerequisiteEdge, StudentProfile,
};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("student, material and concept counts must all be at least 1")]
    EmptySize,
}

/// Default penalty factors: small redundancy penalty, large missing-concept
/// penalty, fixed time-violation penalty.
pub const DEFAULT_PENALTIES: [f64; 3] = [1.0, 1e8, 1000.0];
/// Default objective weights.
pub const DEFAULT_WEIGHTS: [f64; 3] = [0.25, 0.25, 0.25];
/// Default per-class sequence caps (high, medium, challenging).
pub const DEFAULT_PRIORITY_LIMITS: [usize; 3] = [3, 6, 1];

fn draw_concept_set(rng: &mut ChaCha8Rng, t_c: usize, count: usize) -> BTreeSet<usize> {
    let mut pool: Vec<usize> = (0..t_c).collect();
    pool.shuffle(rng);
    pool.into_iter().take(count).collect()
}

/// Generates a deterministic synthetic instance from a seed.
///
/// The returned instance always passes [`crate::model::validate_instance`].
pub fn generate_synthetic_instance(
    seed: u64,
    t_s: usize,
    t_m: usize,
    t_c: usize,
) -> Result<AcsInstance, GenerateError> {
    if t_s == 0 || t_m == 0 || t_c == 0 {
        return Err(GenerateError::EmptySize);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Materials: concept-rich, so that small selections can still cover a
    // student's requirements.
    let max_concepts = (2 * t_c / 5).clamp(1, t_c);
    let mut materials: Vec<LearningMaterial> = (0..t_m)
        .map(|id| {
            let count = rng.gen_range(1..=max_concepts);
            LearningMaterial {
                id,
                concepts: draw_concept_set(&mut rng, t_c, count),
                difficulty: rng.gen_range(0.0..1.0),
                duration: rng.gen_range(0.5..3.0),
                style: std::array::from_fn(|_| rng.gen_range(0.0..1.0)),
            }
        })
        .collect();
    // Every concept must be covered by at least one material.
    for c in 0..t_c {
        if !materials.iter().any(|m| m.concepts.contains(&c)) {
            materials[c % t_m].concepts.insert(c);
        }
    }

    // Prerequisite edges run from easier to harder materials only, which
    // keeps the relation acyclic. Ties are broken by id, making the order
    // strict.
    let mut order: Vec<usize> = (0..t_m).collect();
    order.sort_by(|&a, &b| {
        materials[a]
            .difficulty
            .partial_cmp(&materials[b].difficulty)
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut prerequisites = Vec::new();
    for pos in 1..t_m {
        if rng.gen_bool(0.25) {
            let edges = rng.gen_range(1..=2.min(pos));
            let mut sources = BTreeSet::new();
            for _ in 0..edges {
                sources.insert(rng.gen_range(0..pos));
            }
            for src in sources {
                prerequisites.push(PrerequisiteEdge {
                    from: order[src],
                    to: order[pos],
                    strength: rng.gen_range(0.0_f64..1.0).max(f64::MIN_POSITIVE).min(1.0),
                });
            }
        }
    }

    // Importance grows with concept richness, plus jitter to break ties.
    let importance = materials
        .iter()
        .map(|m| (m.id, m.concepts.len() as f64 + rng.gen_range(0.0..1.0)))
        .collect();

    // Students: small requirement sets and fairly high abilities.
    let req_max = 2.min(t_c);
    let mut students: Vec<StudentProfile> = (0..t_s)
        .map(|id| {
            let count = rng.gen_range(1..=req_max);
            let lower = rng.gen_range(1.0..3.0);
            StudentProfile {
                id,
                required_concepts: draw_concept_set(&mut rng, t_c, count),
                ability: rng.gen_range(0.6..0.95),
                time_lower: lower,
                time_upper: lower + rng.gen_range(10.0..20.0),
                style: std::array::from_fn(|_| rng.gen_range(0.0..1.0)),
            }
        })
        .collect();
    // Every concept must be required by at least one student.
    for c in 0..t_c {
        if !students.iter().any(|s| s.required_concepts.contains(&c)) {
            students[c % t_s].required_concepts.insert(c);
        }
    }

    Ok(AcsInstance {
        students,
        materials,
        graph: ConceptGraph {
            concept_count: t_c,
            prerequisites,
            importance,
        },
        penalties: DEFAULT_PENALTIES,
        weights: DEFAULT_WEIGHTS,
        priority_limits: DEFAULT_PRIORITY_LIMITS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;

    #[test]
    fn paper_scale_instance() {
        let instance = generate_synthetic_instance(42, 30, 150, 20).unwrap();
        assert_eq!(instance.students.len(), 30);
        assert_eq!(instance.materials.len(), 150);
        assert_eq!(instance.graph.concept_count, 20);
        assert!(validate_instance(&instance).is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_synthetic_instance(42, 30, 150, 20).unwrap();
        let b = generate_synthetic_instance(42, 30, 150, 20).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_concept_covered_and_required() {
        let instance = generate_synthetic_instance(7, 2, 4, 2).unwrap();
        for c in 0..2 {
            assert!(
                instance.materials.iter().any(|m| m.concepts.contains(&c)),
                "concept {c} covered by no material"
            );
            assert!(
                instance
                    .students
                    .iter()
                    .any(|s| s.required_concepts.contains(&c)),
                "concept {c} required by no student"
            );
        }
    }

    #[test]
    fn generated_instances_always_validate() {
        for seed in 0..20 {
            let instance = generate_synthetic_instance(seed, 3, 8, 4).unwrap();
            assert!(validate_instance(&instance).is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn zero_sizes_rejected() {
        assert!(generate_synthetic_instance(1, 0, 5, 3).is_err());
        assert!(generate_synthetic_instance(1, 5, 0, 3).is_err());
        assert!(generate_synthetic_instance(1, 5, 5, 0).is_err());
    }
}
