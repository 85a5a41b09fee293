use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mwo::benchmarks::{self, BenchmarkId};
use mwo::generate::generate_synthetic_instance;
use mwo::model::{binarize, validate_instance, AcsInstance};
use mwo::objective::AcsObjective;
use mwo::optimizer::{optimize, OptimizerConfig, RunRecord};
use mwo::sequencer::{build_sequence, evaluate_sequence, SequenceParams};
use mwo::stats::{compare_groups, export_results, load_groups, run_campaign, Campaign};

#[derive(Parser)]
#[command(
    name = "mwo",
    about = "Memetic walrus optimization for adaptive curriculum sequencing",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Work with curriculum instances.
    #[command(subcommand)]
    Instance(InstanceCommand),
    /// Run the optimizer on a benchmark function or an instance.
    Optimize(OptimizeArgs),
    /// Inspect and evaluate the benchmark functions.
    #[command(subcommand)]
    Benchmark(BenchmarkCommand),
    /// Build learning sequences from a finished run.
    Sequence(SequenceArgs),
    /// Multi-run experiment campaigns.
    #[command(subcommand)]
    Campaign(CampaignCommand),
}

#[derive(Subcommand)]
enum InstanceCommand {
    /// Generate a seeded synthetic instance.
    Gen(InstanceGenArgs),
}

#[derive(Args)]
struct InstanceGenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    students: usize,
    #[arg(long)]
    materials: usize,
    #[arg(long)]
    concepts: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Problem id: "acs" (requires --instance) or a benchmark id like "tf1".
    #[arg(long)]
    problem: String,
    /// Instance file, required when --problem acs.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, default_value_t = 30)]
    pop: usize,
    /// Ablation variant; only "wo" (plain walrus) is recognized.
    #[arg(long)]
    ablation: Option<String>,
    /// Score coverage per student instead of over the global union.
    #[arg(long, default_value_t = false)]
    per_student_coverage: bool,
    /// Where to write the run record JSON; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchmarkCommand {
    /// Print the benchmark catalog.
    List,
    /// Evaluate one function at a point read from a JSON array file.
    Eval(BenchmarkEvalArgs),
}

#[derive(Args)]
struct BenchmarkEvalArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    point: PathBuf,
}

#[derive(Args)]
struct SequenceArgs {
    /// Run record JSON produced by `optimize` or `campaign run`.
    #[arg(long)]
    run: PathBuf,
    #[arg(long)]
    instance: PathBuf,
    /// Report JSON path; a plot-ready `<out>.csv` of (position, difficulty)
    /// rows is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum CampaignCommand {
    /// Execute a campaign described by a JSON config file.
    Run(CampaignRunArgs),
    /// Recompute statistics and comparisons from persisted runs.
    Compare(CampaignCompareArgs),
}

#[derive(Args)]
struct CampaignRunArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct CampaignCompareArgs {
    #[arg(long)]
    dir: PathBuf,
}

fn load_instance(path: &PathBuf) -> Result<AcsInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let instance: AcsInstance =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let violations = validate_instance(&instance);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("invalid instance: {}: {}", v.field, v.rule);
        }
        bail!("{} validation error(s) in {}", violations.len(), path.display());
    }
    Ok(instance)
}

fn cmd_instance_gen(args: InstanceGenArgs) -> Result<()> {
    let instance =
        generate_synthetic_instance(args.seed, args.students, args.materials, args.concepts)?;
    fs::write(&args.out, serde_json::to_string_pretty(&instance)?)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote instance with {} students, {} materials, {} concepts to {}",
        args.students,
        args.materials,
        args.concepts,
        args.out.display()
    );
    Ok(())
}

fn cmd_optimize(args: OptimizeArgs) -> Result<()> {
    match args.ablation.as_deref() {
        None | Some("wo") => {}
        Some(other) => bail!("unknown ablation '{other}' (expected 'wo')"),
    }
    let ablation = args.ablation.is_some();

    let record = if args.problem == "acs" {
        let path = args
            .instance
            .as_ref()
            .context("--problem acs requires --instance FILE")?;
        let instance = load_instance(path)?;
        let mut config = OptimizerConfig::unit_cube(args.seed, instance.dim());
        config.population_size = args.pop;
        config.max_iterations = args.iters;
        if ablation {
            config = config.ablation_wo();
        }
        let objective = AcsObjective::new(&instance)
            .with_per_student_coverage(args.per_student_coverage);
        optimize(|x| objective.evaluate(x), &config)?
    } else {
        let id: BenchmarkId = args
            .problem
            .parse()
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let meta = benchmarks::metadata(id);
        let mut config = OptimizerConfig::uniform(args.seed, meta.lower, meta.upper, meta.dim);
        config.population_size = args.pop;
        config.max_iterations = args.iters;
        if ablation {
            config = config.ablation_wo();
        }
        optimize(move |x| benchmarks::evaluate(id, x).unwrap(), &config)?
    };

    let json = serde_json::to_string_pretty(&record)?;
    match &args.out {
        Some(path) => {
            fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
            println!(
                "best fitness {:e} after {} evaluations -> {}",
                record.best_fitness,
                record.evaluation_count,
                path.display()
            );
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_benchmark_list() {
    println!("id    dim  lower      upper      known_optimum");
    for f in benchmarks::catalog() {
        println!(
            "{:<5} {:<4} {:<10} {:<10} {}",
            f.id.to_string(),
            f.dim,
            f.lower,
            f.upper,
            f.known_optimum
        );
    }
}

fn cmd_benchmark_eval(args: BenchmarkEvalArgs) -> Result<()> {
    let id: BenchmarkId = args.function.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
    let text = fs::read_to_string(&args.point)
        .with_context(|| format!("reading {}", args.point.display()))?;
    let point: Vec<f64> =
        serde_json::from_str(&text).context("point file must be a JSON array of numbers")?;
    let eval = benchmarks::evaluate_checked(id, &point)?;
    println!("{}", eval.value);
    if eval.out_of_bounds {
        eprintln!("note: point lies outside the standard search box");
    }
    Ok(())
}

fn cmd_sequence(args: SequenceArgs) -> Result<()> {
    let record: RunRecord = serde_json::from_str(
        &fs::read_to_string(&args.run).with_context(|| format!("reading {}", args.run.display()))?,
    )
    .context("run file must be a RunRecord JSON")?;
    let instance = load_instance(&args.instance)?;
    let selection = binarize(
        &record.best_position,
        instance.student_count(),
        instance.material_count(),
    )?;
    let params = SequenceParams::default();

    #[derive(serde::Serialize)]
    struct StudentReport {
        student: usize,
        sequence: Vec<usize>,
        metrics: mwo::sequencer::SequenceMetrics,
    }
    let mut reports = Vec::new();
    let mut csv = String::from("student,position,material,difficulty\n");
    for s in 0..instance.student_count() {
        let seq = build_sequence(&selection, &instance, &params, s)?;
        let metrics = evaluate_sequence(&seq, &instance, &params, s)?;
        for (pos, &material) in seq.materials.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                s,
                pos + 1,
                material,
                instance.materials[material].difficulty
            ));
        }
        reports.push(StudentReport {
            student: s,
            sequence: seq.materials,
            metrics,
        });
    }
    fs::write(&args.out, serde_json::to_string_pretty(&reports)?)
        .with_context(|| format!("writing {}", args.out.display()))?;
    let csv_path = args.out.with_extension("csv");
    fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))?;
    println!(
        "wrote {} sequences to {} (plot data: {})",
        reports.len(),
        args.out.display(),
        csv_path.display()
    );
    Ok(())
}

fn cmd_campaign_run(args: CampaignRunArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut campaign: Campaign = serde_json::from_str(&text).context("parsing campaign config")?;
    if let Ok(dir) = std::env::var("MWO_OUT_DIR") {
        campaign.out = PathBuf::from(dir);
    }
    let groups = run_campaign(&campaign)?;
    let comparisons = compare_groups(&campaign.problem.label(), &groups)?;
    let files = export_results(&groups, &comparisons, &campaign.out)?;
    println!(
        "campaign complete: {} algorithms x {} runs, {} files under {}",
        groups.len(),
        campaign.run_count,
        files.len(),
        campaign.out.display()
    );
    Ok(())
}

fn cmd_campaign_compare(args: CampaignCompareArgs) -> Result<()> {
    let groups = load_groups(&args.dir)?;
    if groups.is_empty() {
        bail!("no persisted runs under {}/runs", args.dir.display());
    }
    let comparisons = compare_groups("campaign", &groups)?;
    export_results(&groups, &comparisons, &args.dir)?;
    for c in &comparisons {
        println!(
            "{} vs {}: p = {:.2e} ({})",
            c.algorithm_a, c.algorithm_b, c.p_value, c.verdict
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Instance(InstanceCommand::Gen(args)) => cmd_instance_gen(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Benchmark(BenchmarkCommand::List) => {
            cmd_benchmark_list();
            Ok(())
        }
        Command::Benchmark(BenchmarkCommand::Eval(args)) => cmd_benchmark_eval(args),
        Command::Sequence(args) => cmd_sequence(args),
        Command::Campaign(CampaignCommand::Run(args)) => cmd_campaign_run(args),
        Command::Campaign(CampaignCommand::Compare(args)) => cmd_campaign_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
