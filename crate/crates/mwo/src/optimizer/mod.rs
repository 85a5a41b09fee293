//! The memetic walrus optimizer: a population metaheuristic combining
//! expert-guided updates with an aging mechanism, a nonlinear danger signal
//! that triggers migration, a sigmoid safety signal that gates role-based
//! position updates, and best/second-best exploitation.
//!
//! One run is sequential; independent runs with different seeds share no
//! state. The RNG draw order per iteration is: danger perturbation, the
//! safety factor and the role-update branch (per individual, in index
//! order) with clamping draws for out-of-bounds entries as encountered,
//! then the expert-or-migration branch (per individual) and a final
//! clamping pass. Bitwise reproducibility is promised for a fixed seed
//! within this implementation.

pub mod halton;
pub mod signals;

pub use halton::{first_primes, halton_point, radical_inverse};
pub use signals::{danger_amplitude, danger_signal, safety_signal};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error("population size must be at least 4")]
    PopulationTooSmall,
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error("aging rate must be positive")]
    BadAgingRate,
    #[error("role fractions must lie in [0,1] and sum to 1")]
    BadRoleFractions,
    #[error("bounds are empty or have lower > upper at dimension {0}")]
    BadBounds(usize),
    #[error("objective returned a non-finite value")]
    NonFiniteFitness,
}

/// How the expert/migration branch composes with the role-based updates
/// within one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateComposition {
    /// Role updates first, then expert/migration refinement (default).
    /// Running refinement last lets its contraction reach the evaluated
    /// candidates, which is what produces the deep late-stage convergence.
    Sequential,
    /// Only the expert/migration branch runs each iteration.
    Exclusive,
}

/// Full optimizer configuration, including the ablation switches that turn
/// the memetic additions off to recover the plain walrus baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    pub aging_rate: f64,
    pub max_age_fraction: f64,
    pub male_fraction: f64,
    pub female_fraction: f64,
    pub child_fraction: f64,
    pub expert_guidance_enabled: bool,
    pub nonlinear_danger_enabled: bool,
    pub update_composition: UpdateComposition,
    pub seed: u64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl OptimizerConfig {
    /// Defaults: population 30, 500 iterations, aging rate 0.1, age cap at
    /// 20% of the horizon, role split 45/45/10.
    pub fn new(seed: u64, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self {
            population_size: 30,
            max_iterations: 500,
            aging_rate: 0.1,
            max_age_fraction: 0.2,
            male_fraction: 0.45,
            female_fraction: 0.45,
            child_fraction: 0.10,
            expert_guidance_enabled: true,
            nonlinear_danger_enabled: true,
            update_composition: UpdateComposition::Sequential,
            seed,
            lower,
            upper,
        }
    }

    /// Uniform box bounds.
    pub fn uniform(seed: u64, lower: f64, upper: f64, dim: usize) -> Self {
        Self::new(seed, vec![lower; dim], vec![upper; dim])
    }

    /// The `[0,1]^dim` cube used for binary-encoded problems.
    pub fn unit_cube(seed: u64, dim: usize) -> Self {
        Self::uniform(seed, 0.0, 1.0, dim)
    }

    /// Plain walrus baseline: expert guidance off, linear danger decay.
    pub fn ablation_wo(mut self) -> Self {
        self.expert_guidance_enabled = false;
        self.nonlinear_danger_enabled = false;
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        if self.population_size < 4 {
            return Err(OptimizerError::PopulationTooSmall);
        }
        if self.max_iterations < 1 {
            return Err(OptimizerError::NoIterations);
        }
        if !(self.aging_rate > 0.0) {
            return Err(OptimizerError::BadAgingRate);
        }
        let fractions = [
            self.male_fraction,
            self.female_fraction,
            self.child_fraction,
        ];
        if fractions.iter().any(|f| !(0.0..=1.0).contains(f))
            || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(OptimizerError::BadRoleFractions);
        }
        if self.lower.is_empty() || self.lower.len() != self.upper.len() {
            return Err(OptimizerError::BadBounds(0));
        }
        for (d, (lo, hi)) in self.lower.iter().zip(self.upper.iter()).enumerate() {
            if lo > hi {
                return Err(OptimizerError::BadBounds(d));
            }
        }
        Ok(())
    }
}

/// Result of one optimizer run: the unit of statistical aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub config: OptimizerConfig,
    /// Best-so-far fitness recorded once per iteration; non-increasing.
    pub convergence_trace: Vec<f64>,
    pub best_fitness: f64,
    pub best_position: Vec<f64>,
    pub evaluation_count: u64,
    pub iteration_of_last_improvement: usize,
}

/// Influence weight of an expert at a given age: exponential decay, zero
/// past the maximum allowed age.
pub fn influence_weight(age: u32, aging_rate: f64, max_age: f64) -> f64 {
    if age as f64 > max_age {
        0.0
    } else {
        (-aging_rate * age as f64).exp()
    }
}

/// Picks an expert for individual `i` among strictly better individuals,
/// with probability proportional to influence weight. Returns `None` when
/// there is no better individual or all candidate weights are zero.
pub fn select_expert<R: Rng>(
    fitnesses: &[f64],
    weights: &[f64],
    i: usize,
    rng: &mut R,
) -> Option<usize> {
    let candidates: Vec<usize> = (0..fitnesses.len())
        .filter(|&k| fitnesses[k] < fitnesses[i])
        .collect();
    let total: f64 = candidates.iter().map(|&k| weights[k]).sum();
    if candidates.is_empty() || total <= 0.0 {
        return None;
    }
    let mut target = rng.gen_range(0.0..total);
    for &k in &candidates {
        target -= weights[k];
        if target < 0.0 {
            return Some(k);
        }
    }
    candidates.last().copied()
}

/// Expert-guided position update: a step toward the expert scaled by its
/// influence weight, with the random contraction factor `I` in {1, 2}.
pub fn expert_guided_update<R: Rng>(
    position: &[f64],
    expert: &[f64],
    expert_weight: f64,
    rng: &mut R,
) -> Vec<f64> {
    let step = rng.gen_range(0.0..1.0);
    let contraction = if rng.gen_bool(0.5) { 1.0 } else { 2.0 };
    position
        .iter()
        .zip(expert.iter())
        .map(|(&xi, &xk)| xi + step * expert_weight * (xk - contraction * xi))
        .collect()
}

/// Resamples out-of-bounds entries uniformly inside the box; in-bounds
/// entries are untouched.
pub fn clamp_to_bounds<R: Rng>(position: &mut [f64], lower: &[f64], upper: &[f64], rng: &mut R) {
    for (d, v) in position.iter_mut().enumerate() {
        if *v < lower[d] || *v > upper[d] {
            *v = lower[d] + rng.gen_range(0.0..1.0) * (upper[d] - lower[d]);
        }
    }
}

fn tan_angle<R: Rng>(rng: &mut R) -> f64 {
    // tan(theta * pi) blows up at theta = 0.5; resample inside a 1e-6 guard.
    loop {
        let theta: f64 = rng.gen_range(0.0..1.0);
        if (theta - 0.5).abs() >= 1e-6 {
            return theta;
        }
    }
}

/// In-progress optimizer state. Exposed so invariants (ages, weights,
/// bounds, elitism) can be checked per iteration; most callers use
/// [`optimize`].
pub struct MwoState {
    pub config: OptimizerConfig,
    pub positions: Vec<Vec<f64>>,
    pub fitnesses: Vec<f64>,
    pub ages: Vec<u32>,
    pub weights: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub second_position: Vec<f64>,
    pub second_fitness: f64,
    /// Indices that produced a new best or second-best in the latest
    /// evaluation pass.
    pub improved_last_pass: Vec<bool>,
    iteration: usize,
    evaluation_count: u64,
    trace: Vec<f64>,
    last_improvement: usize,
    rng: ChaCha8Rng,
    halton_index: Vec<u64>,
    halton_bases: Vec<u64>,
}

impl MwoState {
    /// Initializes the population uniformly inside the bounds and runs the
    /// first evaluation pass. All ages start at zero.
    pub fn new<F>(objective: F, config: &OptimizerConfig) -> Result<Self, OptimizerError>
    where
        F: Fn(&[f64]) -> f64,
    {
        config.validate()?;
        let n = config.population_size;
        let dim = config.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let positions: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..dim)
                    .map(|d| {
                        config.lower[d]
                            + rng.gen_range(0.0..1.0) * (config.upper[d] - config.lower[d])
                    })
                    .collect()
            })
            .collect();
        let mut state = Self {
            config: config.clone(),
            positions,
            fitnesses: vec![f64::INFINITY; n],
            ages: vec![0; n],
            weights: vec![1.0; n],
            best_position: vec![0.0; dim],
            best_fitness: f64::INFINITY,
            second_position: vec![0.0; dim],
            second_fitness: f64::INFINITY,
            improved_last_pass: vec![false; n],
            iteration: 0,
            evaluation_count: 0,
            trace: Vec::new(),
            last_improvement: 0,
            rng,
            halton_index: vec![1; n],
            halton_bases: first_primes(dim),
        };
        state.evaluate_all(&objective)?;
        // Initialization fixes all ages at zero regardless of which
        // individuals set the incumbents.
        state.ages.iter_mut().for_each(|a| *a = 0);
        Ok(state)
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn evaluation_count(&self) -> u64 {
        self.evaluation_count
    }

    pub fn trace(&self) -> &[f64] {
        &self.trace
    }

    fn evaluate_all<F>(&mut self, objective: &F) -> Result<(), OptimizerError>
    where
        F: Fn(&[f64]) -> f64,
    {
        self.improved_last_pass.iter_mut().for_each(|b| *b = false);
        for i in 0..self.positions.len() {
            let f = objective(&self.positions[i]);
            if f.is_nan() {
                return Err(OptimizerError::NonFiniteFitness);
            }
            self.fitnesses[i] = f;
            self.evaluation_count += 1;
            if f < self.best_fitness {
                // The dethroned best becomes the second-best snapshot, so
                // the two incumbents always come from distinct recordings.
                self.second_fitness = self.best_fitness;
                std::mem::swap(&mut self.second_position, &mut self.best_position);
                self.best_fitness = f;
                self.best_position = self.positions[i].clone();
                self.improved_last_pass[i] = true;
            } else if f < self.second_fitness {
                self.second_fitness = f;
                self.second_position = self.positions[i].clone();
                self.improved_last_pass[i] = true;
            }
        }
        Ok(())
    }

    fn refresh_weights(&mut self) {
        let max_age = self.config.max_age_fraction * self.config.max_iterations as f64;
        for i in 0..self.ages.len() {
            self.weights[i] = influence_weight(self.ages[i], self.config.aging_rate, max_age);
        }
    }

    fn clamp_all(&mut self) {
        for i in 0..self.positions.len() {
            clamp_to_bounds(
                &mut self.positions[i],
                &self.config.lower,
                &self.config.upper,
                &mut self.rng,
            );
        }
    }

    /// Advances the optimizer by one iteration: position updates followed by
    /// one evaluation pass with best/second and age bookkeeping.
    pub fn step<F>(&mut self, objective: F) -> Result<(), OptimizerError>
    where
        F: Fn(&[f64]) -> f64,
    {
        let t = self.iteration + 1;
        let t_max = self.config.max_iterations;
        let n = self.positions.len();

        self.refresh_weights();

        let e1 = danger_amplitude(t, t_max, self.config.nonlinear_danger_enabled);
        let e0: f64 = self.rng.gen_range(-1.0..1.0);
        let danger = e1 * e0;
        let beta = safety_signal(t, t_max);

        // Signal-keyed population updates run first so the expert-guided
        // refinement below acts on (and survives into) the evaluated
        // candidates.
        if self.config.update_composition == UpdateComposition::Sequential {
            let r2: f64 = self.rng.gen_range(0.0..1.0);
            let safety = beta * r2;
            if safety >= 0.5 {
                self.roles_update(t, t_max);
            } else if danger.abs() >= 0.5 {
                self.fleeing_update();
            } else {
                self.dual_anchor_update(beta);
            }
            self.clamp_all();
        }

        if danger.abs() >= 0.5 {
            // Migration: displacement along the difference of two distinct
            // random individuals, scaled by the safety signal.
            let snapshot = self.positions.clone();
            for i in 0..n {
                let a = self.rng.gen_range(0..n);
                let b = loop {
                    let b = self.rng.gen_range(0..n);
                    if b != a {
                        break b;
                    }
                };
                let r3: f64 = self.rng.gen_range(0.0..1.0);
                let scale = beta * r3 * r3;
                for d in 0..self.config.dim() {
                    self.positions[i][d] += scale * (snapshot[a][d] - snapshot[b][d]);
                }
            }
        } else if self.config.expert_guidance_enabled {
            let snapshot = self.positions.clone();
            for i in 0..n {
                if let Some(k) = select_expert(&self.fitnesses, &self.weights, i, &mut self.rng) {
                    self.positions[i] = expert_guided_update(
                        &snapshot[i],
                        &snapshot[k],
                        self.weights[k],
                        &mut self.rng,
                    );
                }
            }
        }
        // The ablation keeps candidate positions unchanged in this branch.
        self.clamp_all();

        self.evaluate_all(&objective)?;
        let mut best_improved = false;
        for i in 0..n {
            if self.improved_last_pass[i] {
                self.ages[i] = 0;
                best_improved = true;
            } else {
                self.ages[i] += 1;
            }
        }
        if best_improved {
            self.last_improvement = t;
        }
        self.trace.push(self.best_fitness);
        self.iteration = t;
        Ok(())
    }

    /// Safe-phase role updates: males resample from the Halton sequence,
    /// females blend between their paired male and the incumbent best, and
    /// children overshoot toward the best.
    fn roles_update(&mut self, t: usize, t_max: usize) {
        let n = self.positions.len();
        let dim = self.config.dim();
        let mut ranked: Vec<usize> = (0..n).collect();
        ranked.sort_by(|&a, &b| {
            self.fitnesses[a]
                .partial_cmp(&self.fitnesses[b])
                .unwrap()
                .then(a.cmp(&b))
        });
        let n_male = ((self.config.male_fraction * n as f64).round() as usize).min(n);
        let n_female =
            ((self.config.female_fraction * n as f64).round() as usize).min(n - n_male);

        let males = &ranked[..n_male];
        for &i in males {
            let point = halton_point(&self.halton_bases, self.halton_index[i]);
            self.halton_index[i] += 1;
            for d in 0..dim {
                self.positions[i][d] = self.config.lower[d]
                    + point[d] * (self.config.upper[d] - self.config.lower[d]);
            }
        }

        let alpha = 1.0 - t as f64 / t_max as f64;
        for (offset, &i) in ranked[n_male..n_male + n_female].iter().enumerate() {
            if n_male == 0 {
                break;
            }
            let male = ranked[offset % n_male];
            let partner = self.positions[male].clone();
            for d in 0..dim {
                let xf = self.positions[i][d];
                self.positions[i][d] =
                    xf + alpha * (partner[d] - xf) + (1.0 - alpha) * (self.best_position[d] - xf);
            }
        }

        for &i in &ranked[n_male + n_female..] {
            let r: f64 = self.rng.gen_range(0.0..1.0);
            for d in 0..dim {
                let xc = self.positions[i][d];
                self.positions[i][d] =
                    self.best_position[d] + r * (self.best_position[d] - xc);
            }
        }
    }

    /// High-danger flight: contract by a random sign factor and retreat from
    /// the incumbent best.
    fn fleeing_update(&mut self) {
        let dim = self.config.dim();
        for i in 0..self.positions.len() {
            let r1: f64 = self.rng.gen_range(0.0..1.0);
            let r4: f64 = self.rng.gen_range(0.0..1.0);
            let reflect = 2.0 * r1 - 1.0;
            for d in 0..dim {
                let xi = self.positions[i][d];
                self.positions[i][d] =
                    xi * reflect - (self.best_position[d] - xi).abs() * r4 * r4;
            }
        }
    }

    /// Calm-phase exploitation anchored on the best and second-best
    /// incumbents.
    fn dual_anchor_update(&mut self, beta: f64) {
        let dim = self.config.dim();
        for i in 0..self.positions.len() {
            let a1 = beta * self.rng.gen_range(0.0..1.0);
            let a2 = beta * self.rng.gen_range(0.0..1.0);
            let t1 = (tan_angle(&mut self.rng) * std::f64::consts::PI).tan();
            let t2 = (tan_angle(&mut self.rng) * std::f64::consts::PI).tan();
            for d in 0..dim {
                let xi = self.positions[i][d];
                let x1 = self.best_position[d] - a1 * t1 * (self.best_position[d] - xi).abs();
                let x2 =
                    self.second_position[d] - a2 * t2 * (self.second_position[d] - xi).abs();
                self.positions[i][d] = 0.5 * (x1 + x2);
            }
        }
    }

    /// Finishes the run and packages the record.
    pub fn into_record(self) -> RunRecord {
        RunRecord {
            seed: self.config.seed,
            best_fitness: self.best_fitness,
            best_position: self.best_position,
            convergence_trace: self.trace,
            evaluation_count: self.evaluation_count,
            iteration_of_last_improvement: self.last_improvement,
            config: self.config,
        }
    }
}

/// Runs the full optimization loop and returns the run record.
///
/// The evaluation budget is exactly `N * (max_iterations + 1)`: one initial
/// pass plus one pass per iteration.
pub fn optimize<F>(objective: F, config: &OptimizerConfig) -> Result<RunRecord, OptimizerError>
where
    F: Fn(&[f64]) -> f64,
{
    let mut state = MwoState::new(&objective, config)?;
    for _ in 0..config.max_iterations {
        state.step(&objective)?;
    }
    Ok(state.into_record())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn initialization_is_in_bounds_with_zero_ages() {
        let config = OptimizerConfig::uniform(3, -2.0, 7.0, 5);
        let state = MwoState::new(sphere, &config).unwrap();
        for p in &state.positions {
            for &v in p {
                assert!((-2.0..=7.0).contains(&v));
            }
        }
        assert!(state.ages.iter().all(|&a| a == 0));
    }

    #[test]
    fn initialization_is_deterministic() {
        let config = OptimizerConfig::uniform(9, 0.0, 1.0, 4);
        let a = MwoState::new(sphere, &config).unwrap();
        let b = MwoState::new(sphere, &config).unwrap();
        assert_eq!(a.positions, b.positions);
    }

    #[test]
    fn invalid_bounds_rejected() {
        let config = OptimizerConfig::new(0, vec![1.0, 0.0], vec![0.0, 1.0]);
        assert!(matches!(
            config.validate(),
            Err(OptimizerError::BadBounds(0))
        ));
    }

    #[test]
    fn clamp_keeps_feasible_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let lower = [0.0; 3];
        let upper = [1.0; 3];
        let mut p = [0.4, 1.7, -0.2];
        clamp_to_bounds(&mut p, &lower, &upper, &mut rng);
        assert_eq!(p[0], 0.4);
        assert!((0.0..=1.0).contains(&p[1]));
        assert!((0.0..=1.0).contains(&p[2]));

        let mut q = [0.1, 0.5, 0.9];
        let before = q;
        clamp_to_bounds(&mut q, &lower, &upper, &mut rng);
        assert_eq!(q, before);
    }

    #[test]
    fn influence_weight_law() {
        assert_eq!(influence_weight(0, 0.1, 100.0), 1.0);
        assert!((influence_weight(10, 0.1, 100.0) - (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(influence_weight(101, 0.1, 100.0), 0.0);
    }

    #[test]
    fn expert_selection_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // best individual has no expert
        let fit = [1.0, 2.0, 3.0];
        let w = [1.0, 1.0, 1.0];
        assert_eq!(select_expert(&fit, &w, 0, &mut rng), None);
        // single candidate is always chosen
        for _ in 0..100 {
            assert_eq!(select_expert(&fit, &w, 1, &mut rng), Some(0));
        }
        // all-zero weights yield none
        let w0 = [0.0, 0.0, 0.0];
        assert_eq!(select_expert(&fit, &w0, 2, &mut rng), None);
    }

    #[test]
    fn expert_selection_frequency_follows_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let fit = [1.0, 2.0, 9.0];
        let w = [2.0, 1.0, 1.0];
        let draws = 100_000;
        let mut count_a = 0;
        for _ in 0..draws {
            if select_expert(&fit, &w, 2, &mut rng) == Some(0) {
                count_a += 1;
            }
        }
        let freq = count_a as f64 / draws as f64;
        assert!((freq - 2.0 / 3.0).abs() < 0.01, "freq {freq}");
    }

    #[test]
    fn expert_update_scalar_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // zero weight leaves the position unchanged
        let out = expert_guided_update(&[0.3, 0.8], &[0.9, 0.1], 0.0, &mut rng);
        assert_eq!(out, vec![0.3, 0.8]);
        // fixed rand = 1, w = 1, I = 2: 0.4 + (0.9 - 0.8) = 0.5
        let xi = 0.4_f64;
        let xk = 0.9_f64;
        assert!((xi + 1.0 * 1.0 * (xk - 2.0 * xi) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constant_objective_settles_immediately() {
        let config = OptimizerConfig {
            max_iterations: 10,
            ..OptimizerConfig::uniform(5, 0.0, 1.0, 3)
        };
        let record = optimize(|_| 42.0, &config).unwrap();
        assert_eq!(record.best_fitness, 42.0);
        assert!(record.convergence_trace.iter().all(|&f| f == 42.0));
    }

    #[test]
    fn sphere_run_properties() {
        let config = OptimizerConfig {
            max_iterations: 100,
            ..OptimizerConfig::uniform(7, -100.0, 100.0, 10)
        };
        let record = optimize(sphere, &config).unwrap();
        assert_eq!(record.convergence_trace.len(), 100);
        for w in record.convergence_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(record.best_fitness <= record.convergence_trace[0]);
        assert_eq!(record.evaluation_count, 30 * 101);
    }

    #[test]
    fn runs_are_deterministic() {
        let config = OptimizerConfig {
            max_iterations: 50,
            ..OptimizerConfig::uniform(11, -5.0, 5.0, 6)
        };
        let a = optimize(sphere, &config).unwrap();
        let b = optimize(sphere, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_evaluated_position_is_in_bounds() {
        use std::cell::Cell;
        let violations = Cell::new(0usize);
        let config = OptimizerConfig {
            max_iterations: 120,
            ..OptimizerConfig::uniform(13, -3.0, 3.0, 8)
        };
        let objective = |x: &[f64]| {
            if x.iter().any(|&v| !(-3.0..=3.0).contains(&v)) {
                violations.set(violations.get() + 1);
            }
            sphere(x)
        };
        optimize(objective, &config).unwrap();
        assert_eq!(violations.get(), 0);
    }

    #[test]
    fn age_bookkeeping_per_iteration() {
        let config = OptimizerConfig {
            max_iterations: 40,
            ..OptimizerConfig::uniform(17, -10.0, 10.0, 4)
        };
        let mut state = MwoState::new(sphere, &config).unwrap();
        let mut expected_ages = state.ages.clone();
        for _ in 0..40 {
            state.step(sphere).unwrap();
            for i in 0..expected_ages.len() {
                if state.improved_last_pass[i] {
                    expected_ages[i] = 0;
                } else {
                    expected_ages[i] += 1;
                }
            }
            assert_eq!(state.ages, expected_ages);
        }
    }

    #[test]
    fn weight_law_holds_each_iteration() {
        let config = OptimizerConfig {
            max_iterations: 30,
            ..OptimizerConfig::uniform(19, -10.0, 10.0, 4)
        };
        let mut state = MwoState::new(sphere, &config).unwrap();
        let max_age = config.max_age_fraction * config.max_iterations as f64;
        for _ in 0..30 {
            state.step(sphere).unwrap();
            state.refresh_weights();
            for i in 0..state.ages.len() {
                let expected = if state.ages[i] as f64 > max_age {
                    0.0
                } else {
                    (-config.aging_rate * state.ages[i] as f64).exp()
                };
                assert_eq!(state.weights[i], expected);
            }
        }
    }

    #[test]
    fn ablation_differs_from_full_configuration() {
        let base = OptimizerConfig {
            max_iterations: 80,
            ..OptimizerConfig::uniform(23, -50.0, 50.0, 10)
        };
        let full = optimize(sphere, &base).unwrap();
        let ablated = optimize(sphere, &base.clone().ablation_wo()).unwrap();
        assert_eq!(ablated.evaluation_count, full.evaluation_count);
        for w in ablated.convergence_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert_ne!(full.convergence_trace, ablated.convergence_trace);
    }

    #[test]
    fn exclusive_composition_still_converges_monotonically() {
        let config = OptimizerConfig {
            max_iterations: 60,
            update_composition: UpdateComposition::Exclusive,
            ..OptimizerConfig::uniform(29, -5.0, 5.0, 5)
        };
        let record = optimize(sphere, &config).unwrap();
        for w in record.convergence_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }
}
