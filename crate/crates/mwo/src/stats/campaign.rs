//! Multi-run campaigns over seeds, descriptive statistics, pairwise
//! significance comparisons and plot-ready CSV export.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchmarks::{self, BenchmarkId};
use crate::model::validate_instance;
use crate::model::AcsInstance;
use crate::objective::AcsObjective;
use crate::optimizer::{optimize, OptimizerConfig, OptimizerError, RunRecord, UpdateComposition};
use crate::stats::wilcoxon::{wilcoxon_rank_sum, StatsError, Verdict};

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("run_count must be at least 1")]
    NoRuns,
    #[error("campaign needs at least one algorithm")]
    NoAlgorithms,
    #[error("algorithm names must be unique (duplicate '{0}')")]
    DuplicateAlgorithm(String),
    #[error("could not load instance {path}: {reason}")]
    BadInstance { path: PathBuf, reason: String },
    #[error("group '{0}' has no records")]
    EmptyGroup(String),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// What a campaign optimizes: a benchmark function or an ACS instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProblemSpec {
    Benchmark {
        id: BenchmarkId,
    },
    Instance {
        path: PathBuf,
        #[serde(default)]
        per_student_coverage: bool,
    },
}

impl ProblemSpec {
    /// Short identifier used in file names and comparison rows.
    pub fn label(&self) -> String {
        match self {
            ProblemSpec::Benchmark { id } => id.to_string(),
            ProblemSpec::Instance { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "instance".to_string()),
        }
    }
}

fn default_population() -> usize {
    30
}

fn default_iterations() -> usize {
    500
}

fn default_true() -> bool {
    true
}

fn default_composition() -> UpdateComposition {
    UpdateComposition::Sequential
}

/// One named algorithm variant inside a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub name: String,
    #[serde(default = "default_population")]
    pub population_size: usize,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_true")]
    pub expert_guidance: bool,
    #[serde(default = "default_true")]
    pub nonlinear_danger: bool,
    #[serde(default = "default_composition")]
    pub composition: UpdateComposition,
}

impl AlgorithmSpec {
    /// Full memetic configuration under the given name.
    pub fn mwo(name: &str) -> Self {
        Self {
            name: name.to_string(),
            population_size: default_population(),
            max_iterations: default_iterations(),
            expert_guidance: true,
            nonlinear_danger: true,
            composition: UpdateComposition::Sequential,
        }
    }

    /// Plain walrus ablation: no expert guidance, linear danger decay.
    pub fn wo_ablation(name: &str) -> Self {
        Self {
            expert_guidance: false,
            nonlinear_danger: false,
            ..Self::mwo(name)
        }
    }
}

fn default_run_count() -> usize {
    30
}

/// A full experiment description; serializable as a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub problem: ProblemSpec,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default = "default_run_count")]
    pub run_count: usize,
    pub base_seed: u64,
    pub out: PathBuf,
}

impl Campaign {
    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.run_count < 1 {
            return Err(CampaignError::NoRuns);
        }
        if self.algorithms.is_empty() {
            return Err(CampaignError::NoAlgorithms);
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if self.algorithms[..i].iter().any(|b| b.name == a.name) {
                return Err(CampaignError::DuplicateAlgorithm(a.name.clone()));
            }
        }
        Ok(())
    }
}

/// All runs of one algorithm, in seed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmGroup {
    pub name: String,
    pub records: Vec<RunRecord>,
}

/// Descriptive statistics of one algorithm's final fitness values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub algorithm: String,
    pub runs: usize,
    pub mean: f64,
    pub std: f64,
}

/// One pairwise significance comparison; verdict is from A's perspective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub problem: String,
    pub algorithm_a: String,
    pub algorithm_b: String,
    pub mean_a: f64,
    pub std_a: f64,
    pub mean_b: f64,
    pub std_b: f64,
    pub p_value: f64,
    pub verdict: Verdict,
}

fn load_instance(path: &Path) -> Result<AcsInstance, CampaignError> {
    let bad = |reason: String| CampaignError::BadInstance {
        path: path.to_path_buf(),
        reason,
    };
    let text = fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let instance: AcsInstance = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let violations = validate_instance(&instance);
    if let Some(v) = violations.first() {
        return Err(bad(format!("{}: {}", v.field, v.rule)));
    }
    Ok(instance)
}

fn config_for(
    algorithm: &AlgorithmSpec,
    seed: u64,
    dim: usize,
    lower: f64,
    upper: f64,
) -> OptimizerConfig {
    let mut config = OptimizerConfig::uniform(seed, lower, upper, dim);
    config.population_size = algorithm.population_size;
    config.max_iterations = algorithm.max_iterations;
    config.expert_guidance_enabled = algorithm.expert_guidance;
    config.nonlinear_danger_enabled = algorithm.nonlinear_danger;
    config.update_composition = algorithm.composition;
    config
}

/// Executes every (algorithm, seed) cell of the campaign and persists each
/// record as JSON under `out/runs/`. Seeds are `base_seed + run index`, so
/// algorithms are compared on paired seeds.
pub fn run_campaign(campaign: &Campaign) -> Result<Vec<AlgorithmGroup>, CampaignError> {
    campaign.validate()?;
    let runs_dir = campaign.out.join("runs");
    fs::create_dir_all(&runs_dir)?;

    enum Problem {
        Benchmark(BenchmarkId, usize, f64, f64),
        Instance(Box<AcsInstance>, bool),
    }
    let problem = match &campaign.problem {
        ProblemSpec::Benchmark { id } => {
            let meta = benchmarks::metadata(*id);
            Problem::Benchmark(*id, meta.dim, meta.lower, meta.upper)
        }
        ProblemSpec::Instance {
            path,
            per_student_coverage,
        } => Problem::Instance(Box::new(load_instance(path)?), *per_student_coverage),
    };

    let mut groups = Vec::with_capacity(campaign.algorithms.len());
    for algorithm in &campaign.algorithms {
        let mut records = Vec::with_capacity(campaign.run_count);
        for run in 0..campaign.run_count {
            let seed = campaign.base_seed + run as u64;
            let record = match &problem {
                Problem::Benchmark(id, dim, lower, upper) => {
                    let config = config_for(algorithm, seed, *dim, *lower, *upper);
                    let id = *id;
                    optimize(move |x| benchmarks::evaluate(id, x).unwrap(), &config)?
                }
                Problem::Instance(instance, per_student) => {
                    let config = config_for(algorithm, seed, instance.dim(), 0.0, 1.0);
                    let objective =
                        AcsObjective::new(instance).with_per_student_coverage(*per_student);
                    optimize(|x| objective.evaluate(x), &config)?
                }
            };
            let file = runs_dir.join(format!("{}_{:04}.json", algorithm.name, seed));
            fs::write(&file, serde_json::to_string_pretty(&record)?)?;
            records.push(record);
        }
        groups.push(AlgorithmGroup {
            name: algorithm.name.clone(),
            records,
        });
    }
    Ok(groups)
}

/// Arithmetic mean and sample standard deviation (n − 1 denominator) of the
/// final fitness per algorithm; a single run yields std 0 by convention.
pub fn summarize(groups: &[AlgorithmGroup]) -> Result<Vec<Summary>, CampaignError> {
    groups
        .iter()
        .map(|g| {
            if g.records.is_empty() {
                return Err(CampaignError::EmptyGroup(g.name.clone()));
            }
            let finals: Vec<f64> = g.records.iter().map(|r| r.best_fitness).collect();
            let n = finals.len() as f64;
            let mean = finals.iter().sum::<f64>() / n;
            let std = if finals.len() < 2 {
                0.0
            } else {
                (finals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            };
            Ok(Summary {
                algorithm: g.name.clone(),
                runs: finals.len(),
                mean,
                std,
            })
        })
        .collect()
}

/// All unordered pairwise comparisons between algorithm groups, in input
/// order, tagged with the problem label.
pub fn compare_groups(
    problem: &str,
    groups: &[AlgorithmGroup],
) -> Result<Vec<ComparisonRow>, CampaignError> {
    let summaries = summarize(groups)?;
    let mut rows = Vec::new();
    for i in 0..groups.len() {
        for j in (i + 1)..groups.len() {
            let a: Vec<f64> = groups[i].records.iter().map(|r| r.best_fitness).collect();
            let b: Vec<f64> = groups[j].records.iter().map(|r| r.best_fitness).collect();
            let (p_value, verdict) = wilcoxon_rank_sum(&a, &b)?;
            rows.push(ComparisonRow {
                problem: problem.to_string(),
                algorithm_a: groups[i].name.clone(),
                algorithm_b: groups[j].name.clone(),
                mean_a: summaries[i].mean,
                std_a: summaries[i].std,
                mean_b: summaries[j].mean,
                std_b: summaries[j].std,
                p_value,
                verdict,
            });
        }
    }
    Ok(rows)
}

/// Writes the plot-ready artifact set:
///
/// - `results.csv` — one row per run (algorithm, seed, final fitness,
///   iterations, evaluations), full-precision decimals;
/// - `summary.csv` — mean/std per algorithm;
/// - `wilcoxon.csv` — comparison rows, p in 3-significant-digit scientific
///   notation;
/// - `traces/<algorithm>_<seed>.csv` — (iteration, best_fitness) pairs.
pub fn export_results(
    groups: &[AlgorithmGroup],
    comparisons: &[ComparisonRow],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CampaignError> {
    fs::create_dir_all(out_dir.join("traces"))?;
    let mut written = Vec::new();

    let results = out_dir.join("results.csv");
    {
        let mut f = fs::File::create(&results)?;
        writeln!(
            f,
            "algorithm,seed,best_fitness,iterations,evaluations,last_improvement"
        )?;
        for g in groups {
            for r in &g.records {
                writeln!(
                    f,
                    "{},{},{},{},{},{}",
                    g.name,
                    r.seed,
                    r.best_fitness,
                    r.config.max_iterations,
                    r.evaluation_count,
                    r.iteration_of_last_improvement
                )?;
            }
        }
    }
    written.push(results);

    let summary = out_dir.join("summary.csv");
    {
        let mut f = fs::File::create(&summary)?;
        writeln!(f, "algorithm,runs,mean,std")?;
        for s in summarize(groups)? {
            writeln!(f, "{},{},{},{}", s.algorithm, s.runs, s.mean, s.std)?;
        }
    }
    written.push(summary);

    let wilcoxon = out_dir.join("wilcoxon.csv");
    {
        let mut f = fs::File::create(&wilcoxon)?;
        writeln!(
            f,
            "problem,algorithm_a,algorithm_b,mean_a,std_a,mean_b,std_b,p_value,verdict"
        )?;
        for c in comparisons {
            writeln!(
                f,
                "{},{},{},{},{},{},{},{:.2e},{}",
                c.problem,
                c.algorithm_a,
                c.algorithm_b,
                c.mean_a,
                c.std_a,
                c.mean_b,
                c.std_b,
                c.p_value,
                c.verdict
            )?;
        }
    }
    written.push(wilcoxon);

    for g in groups {
        for r in &g.records {
            let path = out_dir
                .join("traces")
                .join(format!("{}_{:04}.csv", g.name, r.seed));
            let mut f = fs::File::create(&path)?;
            writeln!(f, "iteration,best_fitness")?;
            for (t, v) in r.convergence_trace.iter().enumerate() {
                writeln!(f, "{},{}", t + 1, v)?;
            }
            written.push(path);
        }
    }
    Ok(written)
}

/// Reloads persisted run records from `out/runs/` into algorithm groups,
/// ordered by algorithm name then seed.
pub fn load_groups(out_dir: &Path) -> Result<Vec<AlgorithmGroup>, CampaignError> {
    let runs_dir = out_dir.join("runs");
    let mut files: Vec<PathBuf> = fs::read_dir(&runs_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
        .collect();
    files.sort();
    let mut groups: Vec<AlgorithmGroup> = Vec::new();
    for file in files {
        let record: RunRecord = serde_json::from_str(&fs::read_to_string(&file)?)?;
        let stem = file.file_stem().unwrap().to_string_lossy();
        let name = stem
            .rsplit_once('_')
            .map(|(n, _)| n.to_string())
            .unwrap_or_else(|| stem.into_owned());
        match groups.iter_mut().find(|g| g.name == name) {
            Some(g) => g.records.push(record),
            None => groups.push(AlgorithmGroup {
                name,
                records: vec![record],
            }),
        }
    }
    for g in &mut groups {
        g.records.sort_by_key(|r| r.seed);
    }
    Ok(groups)
}
