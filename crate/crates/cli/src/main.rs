//! `gdft`: compute, verify and benchmark Fourier transforms over finite groups.

mod bench;
mod input;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gdft::catalog::catalog;
use gdft::dft::naive_dft;
use gdft::group::GroupSpec;
use gdft::planner::{execute_plan, execute_plan_traced, Plan, PlanConfig, PlanSpec, Planner, Strategy};
use gdft::repr::IrrepOptions;
use gdft::{GdftError, GroupAlgebraElement, OpCounter};

use crate::bench::{bench_group, BenchOptions, HEADER};
use crate::input::{load_alpha, load_group};

#[derive(Parser)]
#[command(name = "gdft", version, about = "Fourier transforms over finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transform one element and write its blocks as JSON.
    Dft(DftArgs),
    /// Compare strategies against the naive transform on random inputs.
    Verify(VerifyArgs),
    /// Count operations for a catalog or a list of groups and write CSV.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct PlanArgs {
    /// Orders at or below this are transformed directly.
    #[arg(long, default_value_t = 24)]
    base_order: usize,
    /// Subgroup-size exponent slack.
    #[arg(long, default_value_t = 0.3)]
    epsilon: f64,
    /// Seed for the numeric irrep construction.
    #[arg(long)]
    irrep_seed: Option<u64>,
}

impl PlanArgs {
    fn planner(&self, strategy: Strategy) -> Planner {
        let mut irreps = IrrepOptions::from_env();
        if let Some(seed) = self.irrep_seed {
            irreps.seed = seed;
        }
        Planner::new(PlanConfig {
            base_order: self.base_order,
            epsilon: self.epsilon,
            strategy,
            irreps,
        })
    }
}

#[derive(Args)]
struct DftArgs {
    /// `family:n[*family:n...]` or a JSON group spec file.
    #[arg(long)]
    group: String,
    /// `random:SEED` or a CSV/JSON coefficient file in element order.
    #[arg(long)]
    alpha: String,
    #[arg(long, default_value = "auto")]
    strategy: Strategy,
    /// Execute this plan JSON instead of planning.
    #[arg(long, conflicts_with = "strategy")]
    plan: Option<PathBuf>,
    #[command(flatten)]
    plan_args: PlanArgs,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the plan tree as JSON.
    #[arg(long)]
    dump_plan: Option<PathBuf>,
    /// Write per-node trace events as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    group: String,
    /// Strategies to check; all applicable ones when absent.
    #[arg(long, value_delimiter = ',')]
    strategy: Vec<Strategy>,
    /// Number of random inputs.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    /// First input seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest accepted per-block residual.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Print the residual of every block.
    #[arg(long)]
    per_block: bool,
    #[command(flatten)]
    plan_args: PlanArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Named catalog (smoke, cyclic2k, small, acceptance, empty).
    #[arg(long, conflicts_with = "groups")]
    catalog: Option<String>,
    /// Group specs, used when no catalog is given.
    groups: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "auto")]
    strategy: Vec<Strategy>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the residual check against the naive output.
    #[arg(long)]
    no_verify: bool,
    #[command(flatten)]
    plan_args: PlanArgs,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write trace events as JSON lines, one per group and strategy.
    #[arg(long)]
    trace: Option<PathBuf>,
}

/// A failure carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<GdftError> for Failure {
    fn from(e: GdftError) -> Self {
        let code = match e.root() {
            GdftError::Parse(_)
            | GdftError::UnknownFamily(_)
            | GdftError::BadParameter { .. }
            | GdftError::InvalidPermutation(_)
            | GdftError::DimensionMismatch(_)
            | GdftError::GroupMismatch(_)
            | GdftError::Json(_)
            | GdftError::Io(_) => 2,
            GdftError::GroupTooLarge { .. } | GdftError::NotApplicable { .. } | GdftError::NoTriple { .. } => 3,
            _ => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        GdftError::from(e).into()
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dft(a) => cmd_dft(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn writer(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> CmdResult {
    let mut w = writer(path)?;
    serde_json::to_writer(&mut w, value).map_err(GdftError::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn cmd_dft(a: DftArgs) -> CmdResult {
    let g = load_group(&a.group)?;
    let alpha = load_alpha(&a.alpha, &g)?;
    let planner = a.plan_args.planner(a.strategy);
    let plan = match &a.plan {
        Some(p) => {
            let spec = PlanSpec::from_json(&std::fs::read_to_string(p)?)?;
            planner.plan_from_spec(&g, &spec)?
        }
        None => planner.plan(&g)?,
    };
    if let Some(p) = &a.dump_plan {
        std::fs::write(p, plan.to_json()?)?;
    }
    let ops = OpCounter::new();
    let start = Instant::now();
    let (out, events) = execute_plan_traced(&plan, &alpha, &ops)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(p) = &a.trace {
        write_json(Some(p), &events)?;
    }
    write_json(a.out.as_deref(), &out.to_json(&g))?;
    eprintln!(
        "{}: order {}, strategy {}, cmul {}, cadd {}, {:.3} ms",
        g.label(),
        g.order(),
        plan.strategy(),
        ops.mults(),
        ops.adds(),
        ms
    );
    Ok(())
}

struct Worst {
    strategy: Strategy,
    seed: u64,
    block: usize,
    residual: f64,
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let g = load_group(&a.group)?;
    let planner = a.plan_args.planner(Strategy::Auto);
    let irreps = planner.irreps(&g)?;
    let explicit = !a.strategy.is_empty();
    let strategies = if explicit {
        a.strategy.clone()
    } else {
        vec![Strategy::Auto, Strategy::Naive, Strategy::Single, Strategy::Prime, Strategy::Triple]
    };
    let inputs: Vec<GroupAlgebraElement> = (a.seed..a.seed + a.seeds).map(|s| GroupAlgebraElement::random(&g, s)).collect();
    let oracles = inputs
        .iter()
        .map(|x| naive_dft(x, &irreps, &OpCounter::new()))
        .collect::<Result<Vec<_>, _>>()?;

    println!("{} (order {}, {} irreps), {} seeds from {}", g.label(), g.order(), irreps.len(), a.seeds, a.seed);
    let mut worst: Option<Worst> = None;
    for &strategy in &strategies {
        let plan: Plan = match planner.with_strategy(strategy).plan_for(&irreps) {
            Ok(p) => p,
            Err(e) if !explicit && matches!(e.root(), GdftError::NotApplicable { .. } | GdftError::NoTriple { .. }) => {
                println!("{:<8} skipped: {e}", strategy.name());
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let mut per_block = vec![0.0f64; irreps.len()];
        let mut arg_seed = vec![a.seed; irreps.len()];
        for (i, (x, oracle)) in inputs.iter().zip(&oracles).enumerate() {
            let out = execute_plan(&plan, x, &OpCounter::new())?;
            for (b, (p, q)) in out.blocks.iter().zip(&oracle.blocks).enumerate() {
                let r = (p - q).norm();
                if r > per_block[b] || !r.is_finite() {
                    per_block[b] = r;
                    arg_seed[b] = a.seed + i as u64;
                }
            }
        }
        let (block, &residual) = per_block
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .unwrap_or((0, &0.0));
        let status = if residual <= a.tol { "ok" } else { "FAIL" };
        println!(
            "{:<8} plan {:<6} max residual {:.3e} (block {}, seed {}) {}",
            strategy.name(),
            plan.strategy().name(),
            residual,
            block,
            arg_seed[block],
            status
        );
        if a.per_block {
            for (b, r) in per_block.iter().enumerate() {
                println!("    block {b:>3} dim {:>3} residual {r:.3e}", irreps.get(b).dim());
            }
        }
        if worst.as_ref().map_or(true, |w| residual > w.residual || residual.is_nan()) {
            worst = Some(Worst {
                strategy,
                seed: arg_seed[block],
                block,
                residual,
            });
        }
    }
    match worst {
        Some(w) if !(w.residual <= a.tol) => Err(Failure {
            code: 1,
            message: format!(
                "residual {:.3e} exceeds {:.1e}: strategy {}, block {}, seed {}",
                w.residual,
                a.tol,
                w.strategy.name(),
                w.block,
                w.seed
            ),
        }),
        _ => {
            println!("pass");
            Ok(())
        }
    }
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    let entries: Vec<(String, Option<GroupSpec>)> = match &a.catalog {
        Some(name) => catalog(name)?.into_iter().map(|e| (e.name, Some(e.spec))).collect(),
        None => a.groups.iter().map(|s| (s.clone(), None)).collect(),
    };
    let planner = a.plan_args.planner(Strategy::Auto);
    let mut trace = a.trace.as_deref().map(File::create).transpose()?.map(BufWriter::new);
    let mut out = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer(a.out.as_deref())?);
    out.write_record(HEADER).map_err(csv_err)?;
    for (name, spec) in entries {
        let group = match spec {
            Some(spec) => spec.build().map(Arc::new),
            None => load_group(&name),
        };
        let mut opts = BenchOptions {
            strategies: &a.strategy,
            seed: a.seed,
            verify: !a.no_verify,
            trace: trace.as_mut().map(|w| w as &mut dyn Write),
        };
        for row in bench_group(&planner, &name, group, &mut opts) {
            if let Some(e) = &row.error {
                log::warn!("{name} ({}): {e}", row.strategy);
            }
            out.serialize(row).map_err(csv_err)?;
        }
        out.flush()?;
    }
    if let Some(w) = trace.as_mut() {
        w.flush()?;
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}
