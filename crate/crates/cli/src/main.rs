use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use arena_core::aiger::{emit_ascii, emit_binary, parse, Aig};
use arena_core::bench::{default_plan, load_index, populate_repo, write_index, PlanEntry, INDEX_FILE};
use arena_core::harness::{
    self, load_tools, report, run_all, select_benchmarks, witness_path_for, Job, Limits, Mode, QualityConfig, Rules,
    SizeKind,
};
use arena_core::synth::{encode_counter_strategy, encode_solution, encode_witness};
use arena_core::verify::{verify_solution, Budget};
use arena_core::{Game, RunRecord, Status};

#[derive(Parser)]
#[command(name = "arena", version, about = "Safety-game synthesis and solver competition harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the benchmark repository.
    Gen(GenArgs),
    /// Select a stratified subset of an index.
    Select(SelectArgs),
    /// Run tool configurations on benchmarks.
    Run(RunArgs),
    /// Verify a solution against its specification.
    Verify(VerifyArgs),
    /// Adjudicate and score run records.
    Score(ScoreArgs),
    /// Solve a specification: prints REALIZABLE or UNREALIZABLE.
    Solve(SolveArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Repository root.
    #[arg(long)]
    out: PathBuf,
    /// JSON list of {family, from, to, category}; the built-in corpus otherwise.
    #[arg(long)]
    plan: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    /// Repository root containing index.json.
    #[arg(long)]
    bench: PathBuf,
    #[arg(long, default_value_t = 10)]
    quota: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the selection (an index); stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Tool list (TOML `[[tool]]` tables, or a JSON array).
    #[arg(long)]
    tools: PathBuf,
    /// Repository root.
    #[arg(long)]
    bench: PathBuf,
    /// Selection file; the whole index otherwise.
    #[arg(long)]
    selection: Option<PathBuf>,
    /// `seq` or `par`; overrides the tools' configured modes.
    #[arg(long)]
    mode: Option<Mode>,
    /// Seconds of CPU (sequential) or wall time (parallel).
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Memory ceiling per job in MiB; 0 disables it.
    #[arg(long, default_value_t = 4096)]
    mem: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output directory for records.json, results.csv and solutions/.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    solution: PathBuf,
    #[arg(long)]
    witness: Option<PathBuf>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Model-checking time limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Args)]
struct ScoreArgs {
    /// records.json written by `run`.
    #[arg(long)]
    records: PathBuf,
    /// Repository root; statuses in its index rule adjudication.
    #[arg(long)]
    bench: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10.0)]
    scale_base: f64,
    /// full, controller or gate-equivalents.
    #[arg(long, default_value = "full")]
    size_kind: SizeKind,
    #[arg(long)]
    disqualify: bool,
    /// JSON map of benchmark file to reference size.
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    spec: PathBuf,
    /// Write a solution circuit here when realizable.
    #[arg(long)]
    synth: Option<PathBuf>,
    /// With --synth, also write the winning region (to the given path, or
    /// next to the solution as <name>.winregion.aag).
    #[arg(long, num_args = 0..=1)]
    witness: Option<Option<PathBuf>>,
    /// Write the environment's counter-strategy here when unrealizable.
    #[arg(long)]
    counterstrategy: Option<PathBuf>,
    /// Emit binary AIGER.
    #[arg(long)]
    binary: bool,
}

fn read_aig(path: &Path) -> Result<Aig> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn write_aig(path: &Path, aig: &Aig, binary: bool) -> Result<()> {
    let bytes = if binary { emit_binary(aig)? } else { emit_ascii(aig) };
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let spec = read_aig(&args.spec)?;
    let mut game = Game::from_spec(&spec)?;
    let result = game.solve();
    info!("{} iterations", result.iterations);
    if result.realizable {
        if let Some(out) = &args.synth {
            let strategy = game.extract_strategy(&result)?;
            let solution = encode_solution(&spec, &game, &strategy)?;
            write_aig(out, &solution.circuit, args.binary)?;
            if let Some(w) = &args.witness {
                let path = w.clone().unwrap_or_else(|| witness_path_for(out));
                let witness = encode_witness(&game, result.winning_region)?;
                write_aig(&path, &witness.circuit, args.binary)?;
            }
        }
        println!("REALIZABLE");
    } else {
        if let Some(out) = &args.counterstrategy {
            let cs = game.extract_counter_strategy(&result)?;
            let circuit = encode_counter_strategy(&spec, &game, &cs)?;
            write_aig(out, &circuit.circuit, args.binary)?;
        }
        println!("UNREALIZABLE");
    }
    Ok(ExitCode::SUCCESS)
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let plan: Vec<PlanEntry> = match &args.plan {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
        None => default_plan(),
    };
    let instances = populate_repo(&args.out, &plan)?;
    println!("wrote {} instances to {}", instances.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn select(args: SelectArgs) -> Result<ExitCode> {
    let index = load_index(&args.bench.join(INDEX_FILE))?;
    let selected = select_benchmarks(&index, args.quota, args.seed)?;
    match &args.out {
        Some(out) => {
            write_index(out, &selected)?;
            println!("selected {} of {} instances", selected.len(), index.len());
        }
        None => println!("{}", serde_json::to_string_pretty(&selected)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let tools = load_tools(&args.tools)?;
    let benchmarks = match &args.selection {
        Some(p) => load_index(p)?,
        None => load_index(&args.bench.join(INDEX_FILE))?,
    };
    let jobs: Vec<Job> = tools
        .iter()
        .flat_map(|t| {
            benchmarks.iter().map(|b| Job {
                tool: t.clone(),
                benchmark: b.clone(),
            })
        })
        .collect();
    let limits = Limits {
        timeout: args.timeout,
        memory_bytes: (args.mem > 0).then_some(args.mem << 20),
        mode: args.mode,
    };
    fs::create_dir_all(&args.out)?;
    let scratch = harness::workdir();
    let records = run_all(&jobs, &args.bench, &limits, args.jobs, &scratch, Some(&args.out.join("solutions")))?;
    if std::env::var_os("ARENA_WORKDIR").is_none() {
        let _ = fs::remove_dir_all(&scratch);
    }
    let mut json = serde_json::to_string_pretty(&records)?;
    json.push('\n');
    fs::write(args.out.join("records.json"), json)?;
    harness::write_results_csv(fs::File::create(args.out.join("results.csv"))?, &records)?;
    println!("{} runs recorded in {}", records.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let spec = read_aig(&args.spec)?;
    let sol = read_aig(&args.solution)?;
    let witness = args.witness.as_deref().map(read_aig).transpose()?;
    let budget = Budget {
        max_steps: args.max_steps,
        time_limit: args.timeout.map(Duration::from_secs_f64),
    };
    let report = verify_solution(&spec, &sol, witness.as_ref(), budget);
    if let Some(w) = &report.witness_verdict {
        if !w.is_verified() {
            println!("witness: {}", w.detail);
        }
    }
    print!("{}", report.verdict);
    println!("{}", report.verdict.detail);
    if report.fallback_used {
        println!("fallback: model checking");
    }
    Ok(if report.verdict.is_verified() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn score(args: ScoreArgs) -> Result<ExitCode> {
    let records: Vec<RunRecord> = serde_json::from_str(&fs::read_to_string(&args.records)?)?;
    let mut known = BTreeMap::new();
    if let Some(root) = &args.bench {
        for inst in load_index(&root.join(INDEX_FILE))? {
            if inst.status != Status::Unknown {
                known.insert(inst.file, inst.status);
            }
        }
    }
    if args.scale_base.is_nan() || args.scale_base <= 1.0 {
        bail!("--scale-base must exceed 1");
    }
    let reference: BTreeMap<String, u64> = match &args.reference {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
        None => BTreeMap::new(),
    };
    let rules = Rules {
        disqualify: args.disqualify,
        quality: QualityConfig {
            scale_base: args.scale_base,
            size_kind: args.size_kind,
            reference,
        },
    };
    let board = harness::score(&records, &known, &rules);
    report(&board, &records, &args.out)?;
    print!("{}", harness::ranking_table(&board));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let outcome = match Cli::parse().command {
        Command::Gen(a) => gen(a),
        Command::Select(a) => select(a),
        Command::Run(a) => run(a),
        Command::Verify(a) => verify(a),
        Command::Score(a) => score(a),
        Command::Solve(a) => solve(a),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("arena: {e:#}");
        ExitCode::from(2)
    })
}
