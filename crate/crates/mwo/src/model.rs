//! Domain model for the curriculum sequencing problem: students, learning
//! materials, the concept graph with prerequisite relations, and the binary
//! selection matrix decoded from a continuous optimizer position.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("position length {got} does not match {students} students x {materials} materials")]
    DimensionMismatch {
        got: usize,
        students: usize,
        materials: usize,
    },
    #[error("student index {0} out of range")]
    StudentOutOfRange(usize),
    #[error("instance sizes must all be at least 1")]
    EmptyInstance,
}

/// A student: required concepts, ability, acceptable time window and a
/// four-dimensional learning-style vector (processing, perception, input,
/// understanding).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudentProfile {
    pub id: usize,
    pub required_concepts: BTreeSet<usize>,
    pub ability: f64,
    pub time_lower: f64,
    pub time_upper: f64,
    pub style: [f64; 4],
}

/// A learning material: the concepts it covers, its difficulty, the time it
/// takes, and the learning style it is recommended for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningMaterial {
    pub id: usize,
    pub concepts: BTreeSet<usize>,
    pub difficulty: f64,
    pub duration: f64,
    pub style: [f64; 4],
}

/// Directed prerequisite edge between two materials: `from` must be learned
/// before `to`, with a relation strength in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrerequisiteEdge {
    pub from: usize,
    pub to: usize,
    pub strength: f64,
}

/// Prerequisite structure over materials plus per-material importance weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptGraph {
    pub concept_count: usize,
    pub prerequisites: Vec<PrerequisiteEdge>,
    pub importance: BTreeMap<usize, f64>,
}

impl ConceptGraph {
    /// Incoming prerequisite edges of a material.
    pub fn prerequisites_of(&self, material: usize) -> impl Iterator<Item = &PrerequisiteEdge> {
        self.prerequisites.iter().filter(move |e| e.to == material)
    }

    pub fn importance_of(&self, material: usize) -> f64 {
        self.importance.get(&material).copied().unwrap_or(0.0)
    }

    /// True if the prerequisite relation contains a cycle.
    pub fn has_cycle(&self, material_count: usize) -> bool {
        // Kahn's algorithm over the edge list.
        let mut indegree = vec![0usize; material_count];
        for e in &self.prerequisites {
            if e.to < material_count {
                indegree[e.to] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..material_count).filter(|&i| indegree[i] == 0).collect();
        let mut seen = 0;
        while let Some(n) = queue.pop() {
            seen += 1;
            for e in self.prerequisites.iter().filter(|e| e.from == n) {
                if e.to < material_count {
                    indegree[e.to] -= 1;
                    if indegree[e.to] == 0 {
                        queue.push(e.to);
                    }
                }
            }
        }
        seen < material_count
    }
}

/// The full problem definition.
///
/// `penalties` holds the three penalty factors (redundant concept, missing
/// concept, time violation); `weights` the three objective weights;
/// `priority_limits` the per-class sequence caps (high, medium, challenging).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcsInstance {
    pub students: Vec<StudentProfile>,
    pub materials: Vec<LearningMaterial>,
    pub graph: ConceptGraph,
    pub penalties: [f64; 3],
    pub weights: [f64; 3],
    pub priority_limits: [usize; 3],
}

impl AcsInstance {
    pub fn student_count(&self) -> usize {
        self.students.len()
    }

    pub fn material_count(&self) -> usize {
        self.materials.len()
    }

    /// Problem dimensionality: one decision variable per (student, material).
    pub fn dim(&self) -> usize {
        self.students.len() * self.materials.len()
    }
}

/// Binary student-by-material decision matrix, stored row-major
/// (student-major): entry `(i, j)` lives at index `i * materials + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionMatrix {
    pub students: usize,
    pub materials: usize,
    entries: Vec<bool>,
}

impl SelectionMatrix {
    pub fn new(students: usize, materials: usize, entries: Vec<bool>) -> Self {
        assert_eq!(entries.len(), students * materials);
        Self {
            students,
            materials,
            entries,
        }
    }

    pub fn get(&self, student: usize, material: usize) -> bool {
        self.entries[student * self.materials + material]
    }

    pub fn set(&mut self, student: usize, material: usize, value: bool) {
        self.entries[student * self.materials + material] = value;
    }

    /// Material ids selected for one student, ascending.
    pub fn selected_for(&self, student: usize) -> Vec<usize> {
        (0..self.materials)
            .filter(|&j| self.get(student, j))
            .collect()
    }

    /// True if any student selects the material.
    pub fn selected_by_any(&self, material: usize) -> bool {
        (0..self.students).any(|i| self.get(i, material))
    }

    pub fn entries(&self) -> &[bool] {
        &self.entries
    }
}

/// Three-tier priority class of a material for a particular student.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PriorityClass {
    High,
    Medium,
    Challenging,
}

/// Classification of one material for one student.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub material: usize,
    pub class: PriorityClass,
    /// True when the material on its own covers the student's full
    /// concept requirement.
    pub full_coverage: bool,
}

/// A single rule violation found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl Violation {
    fn new(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            rule: rule.into(),
        }
    }
}

/// Checks every structural invariant of an instance and reports all
/// violations. An empty report means the instance is valid.
pub fn validate_instance(instance: &AcsInstance) -> Vec<Violation> {
    let mut report = Vec::new();
    let t_c = instance.graph.concept_count;
    let t_m = instance.materials.len();

    if instance.students.is_empty() || instance.materials.is_empty() {
        report.push(Violation::new("instance", "students and materials must be nonempty"));
    }

    for s in &instance.students {
        let field = format!("students[{}]", s.id);
        if s.required_concepts.is_empty() {
            report.push(Violation::new(&field, "required concept set is empty"));
        }
        if s.required_concepts.iter().any(|&c| c >= t_c) {
            report.push(Violation::new(&field, "required concept outside concept set"));
        }
        if s.time_lower > s.time_upper {
            report.push(Violation::new(&field, "time range inverted"));
        }
        if !(0.0..=1.0).contains(&s.ability) {
            report.push(Violation::new(&field, "ability outside [0,1]"));
        }
        if s.style.iter().any(|v| !(0.0..=1.0).contains(v)) {
            report.push(Violation::new(&field, "style entry outside [0,1]"));
        }
    }

    for m in &instance.materials {
        let field = format!("materials[{}]", m.id);
        if m.concepts.is_empty() {
            report.push(Violation::new(&field, "concept set is empty"));
        }
        if m.concepts.iter().any(|&c| c >= t_c) {
            report.push(Violation::new(&field, "concept outside concept set"));
        }
        if !(0.0..=1.0).contains(&m.difficulty) {
            report.push(Violation::new(&field, "difficulty outside [0,1]"));
        }
        if m.duration <= 0.0 {
            report.push(Violation::new(&field, "duration must be positive"));
        }
        if m.style.iter().any(|v| !(0.0..=1.0).contains(v)) {
            report.push(Violation::new(&field, "style entry outside [0,1]"));
        }
    }

    for e in &instance.graph.prerequisites {
        let field = format!("graph.prerequisites[{}->{}]", e.from, e.to);
        if e.from >= t_m || e.to >= t_m {
            report.push(Violation::new(&field, "edge endpoint is not a material id"));
        }
        if !(e.strength > 0.0 && e.strength <= 1.0) {
            report.push(Violation::new(&field, "strength outside (0,1]"));
        }
    }
    if instance.graph.has_cycle(t_m) {
        report.push(Violation::new("graph.prerequisites", "prerequisite cycle"));
    }
    if instance.graph.importance.values().any(|&w| w < 0.0) {
        report.push(Violation::new("graph.importance", "importance must be nonnegative"));
    }

    let [psi1, psi2, psi3] = instance.priority_limits;
    if !(psi2 > psi1 && psi1 > psi3) {
        report.push(Violation::new(
            "priority_limits",
            "must satisfy psi2 > psi1 > psi3",
        ));
    }
    if instance.weights.iter().any(|&w| w < 0.0) {
        report.push(Violation::new("weights", "weights must be nonnegative"));
    }

    report
}

/// Decodes a continuous position in `[0,1]^dim` into a selection matrix.
///
/// An entry is selected iff its position value is strictly greater than 0.5.
/// Layout is row-major (student-major).
pub fn binarize(
    position: &[f64],
    students: usize,
    materials: usize,
) -> Result<SelectionMatrix, ModelError> {
    if position.len() != students * materials {
        return Err(ModelError::DimensionMismatch {
            got: position.len(),
            students,
            materials,
        });
    }
    let entries = position.iter().map(|&v| v > 0.5).collect();
    Ok(SelectionMatrix::new(students, materials, entries))
}

/// Classifies every material for one student into the three-tier priority
/// scheme, sorted ascending by difficulty (ties keep ascending id order).
///
/// High: difficulty within ability and full concept coverage. Medium:
/// difficulty within ability, partial coverage. Challenging: difficulty
/// above ability.
pub fn classify_materials(
    instance: &AcsInstance,
    student_index: usize,
) -> Result<Vec<Classification>, ModelError> {
    let student = instance
        .students
        .get(student_index)
        .ok_or(ModelError::StudentOutOfRange(student_index))?;

    let mut out: Vec<Classification> = instance
        .materials
        .iter()
        .map(|m| {
            let full_coverage = student
                .required_concepts
                .iter()
                .all(|c| m.concepts.contains(c));
            let class = if m.difficulty > student.ability {
                PriorityClass::Challenging
            } else if full_coverage {
                PriorityClass::High
            } else {
                PriorityClass::Medium
            };
            Classification {
                material: m.id,
                class,
                full_coverage,
            }
        })
        .collect();
    // Stable sort keeps ascending id order on equal difficulty.
    out.sort_by(|a, b| {
        instance.materials[a.material]
            .difficulty
            .partial_cmp(&instance.materials[b.material].difficulty)
            .unwrap()
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_synthetic_instance;

    fn tiny_instance() -> AcsInstance {
        AcsInstance {
            students: vec![StudentProfile {
                id: 0,
                required_concepts: [0].into(),
                ability: 0.5,
                time_lower: 0.5,
                time_upper: 4.0,
                style: [0.5; 4],
            }],
            materials: vec![
                LearningMaterial {
                    id: 0,
                    concepts: [0].into(),
                    difficulty: 0.3,
                    duration: 1.0,
                    style: [0.5; 4],
                },
                LearningMaterial {
                    id: 1,
                    concepts: [1].into(),
                    difficulty: 0.7,
                    duration: 1.0,
                    style: [0.5; 4],
                },
            ],
            graph: ConceptGraph {
                concept_count: 2,
                prerequisites: vec![PrerequisiteEdge {
                    from: 0,
                    to: 1,
                    strength: 0.5,
                }],
                importance: [(0, 1.0), (1, 1.0)].into(),
            },
            penalties: [1.0, 1e8, 1000.0],
            weights: [0.25, 0.25, 0.25],
            priority_limits: [3, 6, 1],
        }
    }

    #[test]
    fn valid_priority_limits_pass() {
        let instance = tiny_instance();
        assert_eq!(instance.priority_limits, [3, 6, 1]);
        assert!(validate_instance(&instance).is_empty());
    }

    #[test]
    fn inverted_time_range_is_reported() {
        let mut instance = tiny_instance();
        instance.students[0].time_lower = 5.0;
        instance.students[0].time_upper = 2.0;
        let report = validate_instance(&instance);
        assert!(report.iter().any(|v| v.rule == "time range inverted"));
    }

    #[test]
    fn smallest_cycle_is_reported() {
        let mut instance = tiny_instance();
        instance.graph.prerequisites = vec![
            PrerequisiteEdge {
                from: 0,
                to: 1,
                strength: 0.5,
            },
            PrerequisiteEdge {
                from: 1,
                to: 0,
                strength: 0.5,
            },
        ];
        let report = validate_instance(&instance);
        assert!(report.iter().any(|v| v.rule == "prerequisite cycle"));
    }

    #[test]
    fn bad_priority_ordering_is_reported() {
        let mut instance = tiny_instance();
        instance.priority_limits = [6, 3, 1];
        let report = validate_instance(&instance);
        assert!(report.iter().any(|v| v.field == "priority_limits"));
    }

    #[test]
    fn binarize_thresholds_at_half() {
        let m = binarize(&[0.7, 0.2, 0.5, 0.9], 2, 2).unwrap();
        assert!(m.get(0, 0));
        assert!(!m.get(0, 1));
        assert!(!m.get(1, 0)); // exactly 0.5 maps to 0
        assert!(m.get(1, 1));
    }

    #[test]
    fn binarize_all_zeros() {
        let m = binarize(&[0.0; 6], 2, 3).unwrap();
        assert!(m.entries().iter().all(|&b| !b));
    }

    #[test]
    fn binarize_dimension_mismatch() {
        assert!(binarize(&[0.0; 5], 2, 3).is_err());
    }

    #[test]
    fn binarize_matches_elementwise_oracle() {
        let position = [0.91, 0.13, 0.5001, 0.4999, 0.0, 1.0];
        let m = binarize(&position, 2, 3).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), position[i * 3 + j] > 0.5);
            }
        }
    }

    #[test]
    fn binarize_is_idempotent_on_binary_vectors() {
        let position = [1.0, 0.0, 0.0, 1.0, 1.0, 0.0];
        let m = binarize(&position, 2, 3).unwrap();
        let as_real: Vec<f64> = m.entries().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let m2 = binarize(&as_real, 2, 3).unwrap();
        assert_eq!(m, m2);
    }

    #[test]
    fn classify_high_medium_challenging() {
        let mut instance = tiny_instance();
        instance.students[0].required_concepts = [0].into();
        // material 0: Df=0.3 <= A=0.5, covers {0} fully -> High
        // material 1: Df=0.7 > A -> Challenging
        let classes = classify_materials(&instance, 0).unwrap();
        let of = |id: usize| classes.iter().find(|c| c.material == id).unwrap().class;
        assert_eq!(of(0), PriorityClass::High);
        assert_eq!(of(1), PriorityClass::Challenging);

        // Partial coverage at Df <= A -> Medium
        instance.students[0].required_concepts = [0, 1].into();
        instance.materials[1].difficulty = 0.4;
        let classes = classify_materials(&instance, 0).unwrap();
        let of = |id: usize| classes.iter().find(|c| c.material == id).unwrap().class;
        assert_eq!(of(0), PriorityClass::Medium);
        assert_eq!(of(1), PriorityClass::Medium);
    }

    #[test]
    fn classify_tie_on_ability_is_not_challenging() {
        let mut instance = tiny_instance();
        instance.materials[0].difficulty = 0.5; // equals ability
        let classes = classify_materials(&instance, 0).unwrap();
        let c = classes.iter().find(|c| c.material == 0).unwrap();
        assert_ne!(c.class, PriorityClass::Challenging);
    }

    #[test]
    fn classify_sorts_by_difficulty_then_id() {
        let instance = generate_synthetic_instance(11, 3, 12, 4).unwrap();
        let classes = classify_materials(&instance, 0).unwrap();
        assert_eq!(classes.len(), 12);
        for w in classes.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let da = instance.materials[a.material].difficulty;
            let db = instance.materials[b.material].difficulty;
            assert!(da < db || (da == db && a.material < b.material));
        }
    }

    #[test]
    fn classify_partitions_materials() {
        let instance = generate_synthetic_instance(3, 4, 9, 5).unwrap();
        for s in 0..4 {
            let classes = classify_materials(&instance, s).unwrap();
            let mut ids: Vec<usize> = classes.iter().map(|c| c.material).collect();
            ids.sort_unstable();
            assert_eq!(ids, (0..9).collect::<Vec<_>>());
        }
    }

    #[test]
    fn classify_out_of_range() {
        let instance = tiny_instance();
        assert!(classify_materials(&instance, 7).is_err());
    }

    #[test]
    fn instance_json_round_trip() {
        let instance = tiny_instance();
        let json = serde_json::to_string_pretty(&instance).unwrap();
        let back: AcsInstance = serde_json::from_str(&json).unwrap();
        assert_eq!(instance, back);
    }
}
