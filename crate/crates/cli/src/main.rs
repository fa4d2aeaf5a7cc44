//! `hk`: colengths, HK estimates, prime sweeps and HN polygon tools.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hk_core::colength::{colength_frobenius, FrobeniusPowerIdeal, GradedQuotient};
use hk_core::estimator::{fit_quadratic_constant, hk_estimates, LengthSequence};
use hk_core::hn::{
    invert_plane_curve, polygon_area, polygon_contains, polygon_from_hn, HnData, Inversion,
};
use hk_core::sweep::{
    classify_residues, emit, emit_to_path, run_sweep, EMax, OutputFormat, PrimeSet,
    SweepConfig, SweepRecord,
};
use hk_core::{parse_poly, parse_vars, reduce_coeffs_mod_p, ExactRational, IntPoly, ModPoly, PrimeModulus};

#[derive(Parser)]
#[command(name = "hk", version, about = "Hilbert-Kunz multiplicities of plane curves over prime fields")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    curve: String,
    #[arg(long, default_value = "x,y,z")]
    vars: String,
    /// Comma-separated ideal generators (default: the variables).
    #[arg(long)]
    ideal: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Colength of R/I^[q].
    Colength {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        q: u64,
    },
    /// Colengths for q = p..p^emax and the fitted multiplicity.
    Estimate {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, default_value_t = 2)]
        emax: u32,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Per-prime sweep from a JSON config or flags.
    Sweep(SweepArgs),
    /// HN polygon of JSON HN data.
    Polygon {
        #[arg(long)]
        hn: PathBuf,
        #[arg(long)]
        area: bool,
        /// Test whether the polygon contains this one.
        #[arg(long)]
        contains: Option<PathBuf>,
    },
    /// Destabilization data (l, s) reproducing a multiplicity.
    Invert {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        hkm: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, conflicts_with_all = ["curve", "primes"])]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    curve: Option<String>,
    #[arg(long, default_value = "x,y,z")]
    vars: String,
    #[arg(long)]
    ideal: Option<String>,
    #[arg(long, required_unless_present = "config", value_delimiter = ',')]
    primes: Vec<u64>,
    /// A number, or `budget`.
    #[arg(long)]
    emax: Option<String>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long = "mod")]
    modulus: Option<u64>,
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const EXIT_INPUT: u8 = 2;
const EXIT_NOT_STABILIZED: u8 = 3;
const EXIT_ASSERTION: u8 = 4;

fn input_error<E: Into<anyhow::Error>>(error: E) -> Failure {
    Failure {
        code: EXIT_INPUT,
        error: error.into(),
    }
}

type CliResult = Result<(), Failure>;

fn split_list(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

struct Reduced {
    ring: GradedQuotient,
    gens: Vec<ModPoly>,
}

fn reduce_input(args: &CurveArgs) -> Result<Reduced, Failure> {
    let p = PrimeModulus::new(args.p).map_err(input_error)?;
    let vars = parse_vars(&args.vars);
    let parse = |text: &str| -> Result<IntPoly, Failure> {
        parse_poly(text, &vars).map_err(|e| input_error(anyhow!("{text:?}: {e}")))
    };
    let curve = parse(&args.curve)?;
    let reduced = reduce_coeffs_mod_p(&curve, p);
    if reduced.degree_dropped {
        return Err(input_error(anyhow!("curve degree drops modulo {p}")));
    }
    let ring = GradedQuotient::new(&reduced.poly).map_err(input_error)?;
    let gens = match &args.ideal {
        Some(text) => split_list(text)
            .iter()
            .map(|g| parse(g).map(|g| g.reduce_mod_p(p)))
            .collect::<Result<Vec<_>, _>>()?,
        None => vars
            .iter()
            .map(|v| parse(v).map(|g| g.reduce_mod_p(p)))
            .collect::<Result<Vec<_>, _>>()?,
    };
    Ok(Reduced { ring, gens })
}

fn colength(args: &CurveArgs, q: u64) -> Result<u64, Failure> {
    let input = reduce_input(args)?;
    let ideal = FrobeniusPowerIdeal::new(input.gens, q).map_err(input_error)?;
    colength_frobenius(&input.ring, &ideal).map_err(input_error)
}

fn run_colength(args: CurveArgs, q: u64) -> CliResult {
    println!("{}", colength(&args, q)?);
    Ok(())
}

fn run_estimate(args: CurveArgs, emax: u32, cache: Option<PathBuf>) -> CliResult {
    if emax == 0 {
        return Err(input_error(anyhow!("--emax must be at least 1")));
    }
    let mut cfg = SweepConfig::new(args.curve.clone(), PrimeSet::List(vec![args.p]));
    cfg.vars = args.vars.clone();
    cfg.ideal = args.ideal.as_deref().map(split_list);
    cfg.e_max = EMax::Fixed(emax);
    cfg.row_budget = None;
    cfg.cache_path = cache;
    // validates the inputs with the plain error messages of `colength`
    reduce_input(&args)?;
    let records = run_sweep(&cfg).map_err(input_error)?;
    let record = &records[0];
    if let Some(reason) = &record.skipped {
        return Err(input_error(anyhow!("p = {}: {reason}", args.p)));
    }
    let p = PrimeModulus::new(args.p).map_err(input_error)?;
    let seq = LengthSequence::new(p, record.colengths.clone()).map_err(input_error)?;
    println!("e\tq\tcolength\testimate");
    for (entry, (_, est)) in seq.entries().iter().zip(hk_estimates(&seq)) {
        println!("{}\t{}\t{}\t{}", entry.e, entry.q, entry.colength, est);
    }
    let fit = match fit_quadratic_constant(&seq) {
        Ok(fit) => fit,
        Err(e) => {
            return Err(Failure {
                code: EXIT_NOT_STABILIZED,
                error: anyhow!("{e}; not stabilized, increase e"),
            });
        }
    };
    println!("alpha\t{}", fit.alpha);
    println!("beta\t{}", fit.beta);
    println!("consistent\t{}", fit.consistent);
    println!("smooth\t{}", record.smooth);
    if let Some(gap) = &record.gap {
        println!("gap\t{gap}");
    }
    if record.violates_lower_bound() && record.smooth && fit.consistent {
        return Err(Failure {
            code: EXIT_ASSERTION,
            error: anyhow!("estimate {} lies below the characteristic-0 value", fit.alpha),
        });
    }
    if !fit.consistent {
        return Err(Failure {
            code: EXIT_NOT_STABILIZED,
            error: anyhow!("not stabilized; increase e"),
        });
    }
    Ok(())
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(input_error)?;
            SweepConfig::from_json(&text).map_err(input_error)?
        }
        None => {
            let curve = args.curve.clone().expect("clap requires --curve");
            let mut cfg = SweepConfig::new(curve, PrimeSet::List(args.primes.clone()));
            cfg.vars = args.vars.clone();
            cfg.ideal = args.ideal.as_deref().map(split_list);
            cfg
        }
    };
    if let Some(emax) = &args.emax {
        cfg.e_max = match emax.as_str() {
            "budget" => EMax::Budget,
            n => EMax::Fixed(n.parse().map_err(|_| input_error(anyhow!("bad --emax {n:?}")))?),
        };
    }
    if let Some(budget) = args.budget {
        cfg.row_budget = Some(budget);
    }
    if let Some(m) = args.modulus {
        cfg.residue_modulus = m;
    }
    if let Some(cache) = &args.cache {
        cfg.cache_path = Some(cache.clone());
    }
    if let Some(format) = args.format {
        cfg.format = match format {
            Format::Csv => OutputFormat::Csv,
            Format::Jsonl => OutputFormat::Jsonl,
        };
    }
    Ok(cfg)
}

fn print_summary(records: &[SweepRecord], m: u64) {
    let Ok(groups) = classify_residues(records, m) else {
        return;
    };
    let show = |v: &Option<ExactRational>| v.as_ref().map_or("-".to_string(), |v| v.to_string());
    for group in groups {
        let residues: Vec<String> = group.residues.iter().map(|r| r.to_string()).collect();
        eprintln!("p = {} (mod {m})", residues.join(", "));
        for e in &group.entries {
            eprintln!(
                "  p={:<6} gap={:<14} 4*gap*p^2={:<10} 4*gap*p^4={}",
                e.p,
                show(&e.gap),
                show(&e.scaled_p2),
                show(&e.scaled_p4)
            );
        }
    }
}

fn run_sweep_command(args: SweepArgs) -> CliResult {
    let cfg = sweep_config(&args)?;
    let records = run_sweep(&cfg).map_err(input_error)?;
    match &args.out {
        Some(path) => emit_to_path(&records, cfg.format, path).map_err(input_error)?,
        None => emit(&records, cfg.format, io::stdout().lock()).map_err(input_error)?,
    }
    print_summary(&records, cfg.residue_modulus);
    let violations: Vec<String> = records
        .iter()
        .filter(|r| r.smooth && r.consistent && r.violates_lower_bound())
        .map(|r| r.p.to_string())
        .collect();
    if !violations.is_empty() {
        return Err(Failure {
            code: EXIT_ASSERTION,
            error: anyhow!("estimates below the characteristic-0 value at p = {}", violations.join(", ")),
        });
    }
    Ok(())
}

fn read_hn(path: &PathBuf) -> Result<HnData, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(input_error)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(input_error)
}

fn point(p: &(ExactRational, ExactRational)) -> String {
    format!("({}, {})", p.0, p.1)
}

fn run_polygon(hn: PathBuf, area: bool, contains: Option<PathBuf>) -> CliResult {
    let outer = polygon_from_hn(&read_hn(&hn)?).map_err(input_error)?;
    let vertices: Vec<String> = outer.vertices().iter().map(point).collect();
    println!("vertices\t{}", vertices.join(" "));
    if area {
        println!("area\t{}", polygon_area(&outer));
    }
    if let Some(other) = contains {
        let inner = polygon_from_hn(&read_hn(&other)?).map_err(input_error)?;
        println!("contains\t{}", polygon_contains(&outer, &inner).map_err(input_error)?);
    }
    Ok(())
}

fn run_invert(d: u32, p: u64, hkm: String) -> CliResult {
    PrimeModulus::new(p).map_err(input_error)?;
    let hkm: ExactRational = hkm.parse().map_err(input_error)?;
    match invert_plane_curve(d, p, &hkm).map_err(input_error)? {
        Inversion::SemistableForever => println!("semistable"),
        Inversion::Destabilized { pairs } => {
            let (l, s) = pairs[0];
            println!("l={l} s={s}");
            if pairs.len() > 1 {
                let all: Vec<String> = pairs.iter().map(|(l, s)| format!("({l}, {s})")).collect();
                println!("all {}", all.join(" "));
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(input_error)?;
    }
    match cli.command {
        Command::Colength { curve, q } => run_colength(curve, q),
        Command::Estimate { curve, emax, cache } => run_estimate(curve, emax, cache),
        Command::Sweep(args) => run_sweep_command(args),
        Command::Polygon { hn, area, contains } => run_polygon(hn, area, contains),
        Command::Invert { d, p, hkm } => run_invert(d, p, hkm),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            let _ = writeln!(io::stderr(), "error: {error:#}");
            ExitCode::from(code)
        }
    }
}
