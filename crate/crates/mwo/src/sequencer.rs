//! Turns an optimized selection into per-student learning sequences and
//! scores their quality.
//!
//! Retained materials are capped per priority class, ranked by a combined
//! score of material priority, difficulty/time balance and challenge level,
//! and ordered so that a material never precedes one of its in-sequence
//! prerequisites.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{classify_materials, AcsInstance, ModelError, PriorityClass, SelectionMatrix};

#[derive(Debug, Error)]
pub enum SequenceError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("alpha weights must sum to 1 (got {0})")]
    BadAlpha(f64),
    #[error("lambda must lie in [0,1]")]
    BadLambda,
    #[error("t_max_time must be positive")]
    BadTimeScale,
    #[error("sequence position k must satisfy 1 <= k <= K, K >= 1")]
    BadPosition,
    #[error("unknown material id {0}")]
    UnknownMaterial(usize),
}

/// Which total the prerequisite-count term of the challenge score is
/// normalized by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChallengeNorm {
    /// Catalog size (default).
    Catalog,
    /// Number of materials selected for the student.
    Selected,
}

/// Scoring and metric parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceParams {
    /// Difficulty/time balance of the medium score.
    pub lambda: f64,
    /// Combination weights for (priority, medium, challenge); must sum to 1.
    pub alpha: [f64; 3],
    /// Slack allowed in the difficulty-progression metric.
    pub progression_tolerance: f64,
    /// Margin added to ability in the difficulty-alignment metric.
    pub alignment_margin: f64,
    pub challenge_norm: ChallengeNorm,
}

impl Default for SequenceParams {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            alpha: [0.5, 0.3, 0.2],
            progression_tolerance: 0.05,
            alignment_margin: 0.0,
            challenge_norm: ChallengeNorm::Catalog,
        }
    }
}

impl SequenceParams {
    pub fn validate(&self) -> Result<(), SequenceError> {
        let sum: f64 = self.alpha.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SequenceError::BadAlpha(sum));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(SequenceError::BadLambda);
        }
        Ok(())
    }
}

/// Score components attached to one sequence position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionScores {
    pub priority: f64,
    pub medium: f64,
    pub challenge: f64,
    pub combined: f64,
}

/// Ordered learning path for one student.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningSequence {
    pub student: usize,
    pub materials: Vec<usize>,
    pub scores: Vec<PositionScores>,
}

/// Quality metrics of a sequence; all percentages in [0, 100].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceMetrics {
    pub coverage_rate: f64,
    pub difficulty_progression: f64,
    pub difficulty_alignment: f64,
    pub time_satisfaction: bool,
    pub prerequisite_compliance: f64,
}

/// Importance-weighted prerequisite score. The strength sum over an empty
/// prerequisite set is taken as 1 so that root materials keep their
/// importance ordering.
pub fn priority_score(instance: &AcsInstance, material: usize) -> Result<f64, SequenceError> {
    if material >= instance.material_count() {
        return Err(SequenceError::UnknownMaterial(material));
    }
    let strength_sum: f64 = instance
        .graph
        .prerequisites_of(material)
        .map(|e| e.strength)
        .sum();
    let factor = if instance.graph.prerequisites_of(material).count() == 0 {
        1.0
    } else {
        strength_sum
    };
    Ok(instance.graph.importance_of(material) * factor)
}

/// Difficulty/time balance score.
pub fn medium_score(
    instance: &AcsInstance,
    material: usize,
    params: &SequenceParams,
    t_max_time: f64,
) -> Result<f64, SequenceError> {
    if material >= instance.material_count() {
        return Err(SequenceError::UnknownMaterial(material));
    }
    if t_max_time <= 0.0 {
        return Err(SequenceError::BadTimeScale);
    }
    params.validate()?;
    let m = &instance.materials[material];
    Ok(params.lambda * m.difficulty + (1.0 - params.lambda) * m.duration / t_max_time)
}

/// Challenge score at sequence position `k` of `seq_len`: difficulty
/// dominates early, the prerequisite share dominates late.
pub fn challenge_score(
    instance: &AcsInstance,
    material: usize,
    k: usize,
    seq_len: usize,
    norm_total: usize,
) -> Result<f64, SequenceError> {
    if material >= instance.material_count() {
        return Err(SequenceError::UnknownMaterial(material));
    }
    if seq_len == 0 || k == 0 || k > seq_len {
        return Err(SequenceError::BadPosition);
    }
    let beta = (-(k as f64) / seq_len as f64).exp();
    let prereq_count = instance.graph.prerequisites_of(material).count() as f64;
    let share = if norm_total == 0 {
        0.0
    } else {
        prereq_count / norm_total as f64
    };
    Ok(beta * instance.materials[material].difficulty + (1.0 - beta) * share)
}

/// Weighted combination of the three scores.
pub fn combined_score(
    priority: f64,
    medium: f64,
    challenge: f64,
    params: &SequenceParams,
) -> Result<f64, SequenceError> {
    params.validate()?;
    let [a1, a2, a3] = params.alpha;
    Ok(a1 * priority + a2 * medium + a3 * challenge)
}

/// Builds the learning sequence for one student from a selection matrix.
///
/// Materials selected for the student are capped per priority class (high,
/// medium, challenging), keeping the highest combined scores within each
/// class, then ordered by descending combined score subject to in-sequence
/// prerequisite precedence. Ties break by ascending material id. The
/// ranking score evaluates the challenge term at the final position
/// (`k = K`); stored per-position scores use each material's actual slot.
pub fn build_sequence(
    selection: &SelectionMatrix,
    instance: &AcsInstance,
    params: &SequenceParams,
    student_index: usize,
) -> Result<LearningSequence, SequenceError> {
    params.validate()?;
    if selection.students != instance.student_count()
        || selection.materials != instance.material_count()
    {
        return Err(ModelError::DimensionMismatch {
            got: selection.students * selection.materials,
            students: instance.student_count(),
            materials: instance.material_count(),
        }
        .into());
    }
    let classes = classify_materials(instance, student_index)?;
    let selected = selection.selected_for(student_index);
    let t_max_time = instance
        .materials
        .iter()
        .map(|m| m.duration)
        .fold(f64::MIN, f64::max)
        .max(f64::MIN_POSITIVE);

    let norm_total = match params.challenge_norm {
        ChallengeNorm::Catalog => instance.material_count(),
        ChallengeNorm::Selected => selected.len(),
    };

    let seq_len = selected.len().max(1);
    let rank_score = |material: usize| -> Result<f64, SequenceError> {
        let p = priority_score(instance, material)?;
        let m = medium_score(instance, material, params, t_max_time)?;
        let c = challenge_score(instance, material, seq_len, seq_len, norm_total)?;
        combined_score(p, m, c, params)
    };

    // Cap per class, keeping the largest ranking scores.
    let mut retained: Vec<(usize, f64)> = Vec::new();
    for (class, cap) in [
        (PriorityClass::High, instance.priority_limits[0]),
        (PriorityClass::Medium, instance.priority_limits[1]),
        (PriorityClass::Challenging, instance.priority_limits[2]),
    ] {
        let mut members: Vec<(usize, f64)> = selected
            .iter()
            .filter(|&&j| {
                classes
                    .iter()
                    .find(|c| c.material == j)
                    .map(|c| c.class == class)
                    .unwrap_or(false)
            })
            .map(|&j| Ok((j, rank_score(j)?)))
            .collect::<Result<_, SequenceError>>()?;
        members.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        retained.extend(members.into_iter().take(cap));
    }

    // Order by descending score, never placing a material before an
    // in-sequence prerequisite (Kahn-style greedy).
    let in_set: Vec<usize> = retained.iter().map(|&(j, _)| j).collect();
    let score_of = |j: usize| retained.iter().find(|&&(m, _)| m == j).unwrap().1;
    let mut placed: Vec<usize> = Vec::with_capacity(in_set.len());
    let mut remaining = in_set.clone();
    while !remaining.is_empty() {
        let mut ready: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&j| {
                instance
                    .graph
                    .prerequisites_of(j)
                    .all(|e| !remaining.contains(&e.from) || e.from == j)
            })
            .collect();
        // Cycles are rejected at instance validation; an acyclic relation
        // always leaves at least one ready material.
        assert!(!ready.is_empty(), "prerequisite cycle in sequence build");
        ready.sort_by(|&a, &b| {
            score_of(b)
                .partial_cmp(&score_of(a))
                .unwrap()
                .then(a.cmp(&b))
        });
        let next = ready[0];
        placed.push(next);
        remaining.retain(|&j| j != next);
    }

    let final_len = placed.len().max(1);
    let scores = placed
        .iter()
        .enumerate()
        .map(|(idx, &j)| {
            let p = priority_score(instance, j)?;
            let m = medium_score(instance, j, params, t_max_time)?;
            let c = challenge_score(instance, j, idx + 1, final_len, norm_total)?;
            Ok(PositionScores {
                priority: p,
                medium: m,
                challenge: c,
                combined: combined_score(p, m, c, params)?,
            })
        })
        .collect::<Result<Vec<_>, SequenceError>>()?;

    Ok(LearningSequence {
        student: student_index,
        materials: placed,
        scores,
    })
}

/// Computes the quality metrics of a sequence for one student.
pub fn evaluate_sequence(
    sequence: &LearningSequence,
    instance: &AcsInstance,
    params: &SequenceParams,
    student_index: usize,
) -> Result<SequenceMetrics, SequenceError> {
    let student = instance
        .students
        .get(student_index)
        .ok_or(ModelError::StudentOutOfRange(student_index))?;
    let materials = &sequence.materials;

    let covered: std::collections::BTreeSet<usize> = materials
        .iter()
        .flat_map(|&j| instance.materials[j].concepts.iter().copied())
        .collect();
    let required = &student.required_concepts;
    let coverage_rate = if required.is_empty() {
        100.0
    } else {
        100.0 * covered.intersection(required).count() as f64 / required.len() as f64
    };

    let difficulty_progression = if materials.len() < 2 {
        100.0
    } else {
        let ok = materials
            .windows(2)
            .filter(|w| {
                instance.materials[w[1]].difficulty
                    >= instance.materials[w[0]].difficulty - params.progression_tolerance
            })
            .count();
        100.0 * ok as f64 / (materials.len() - 1) as f64
    };

    let difficulty_alignment = if materials.is_empty() {
        100.0
    } else {
        let ok = materials
            .iter()
            .filter(|&&j| {
                instance.materials[j].difficulty <= student.ability + params.alignment_margin
            })
            .count();
        100.0 * ok as f64 / materials.len() as f64
    };

    let total: f64 = materials.iter().map(|&j| instance.materials[j].duration).sum();
    let time_satisfaction = total >= student.time_lower && total <= student.time_upper;

    let mut pairs = 0usize;
    let mut ordered = 0usize;
    for e in &instance.graph.prerequisites {
        let from_pos = materials.iter().position(|&j| j == e.from);
        let to_pos = materials.iter().position(|&j| j == e.to);
        if let (Some(f), Some(t)) = (from_pos, to_pos) {
            pairs += 1;
            if f < t {
                ordered += 1;
            }
        }
    }
    let prerequisite_compliance = if pairs == 0 {
        100.0
    } else {
        100.0 * ordered as f64 / pairs as f64
    };

    Ok(SequenceMetrics {
        coverage_rate,
        difficulty_progression,
        difficulty_alignment,
        time_satisfaction,
        prerequisite_compliance,
    })
}
