use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use bohemian::cardinality::{binomial_identity_check, evaluate, FORMULAS};
use bohemian::characterize::{dispatch, InverseSpec};
use bohemian::classify::{
    class_membership, gws_detect, rank2_class3_detail, rank_one_factorize, uw_decompose,
};
use bohemian::enumerate::{
    brute_force_count, brute_force_inverses, count_json, family_count, materialize_family,
    to_int, EnumOptions, Enumeration, PenroseSpec, Population,
};
use bohemian::verify::{run_suite, Suite};
use bohemian::{exact_rank, parse_matrix, Error, TernaryMatrix};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Exact generalized inverses of Bohemian matrices over {-1, 0, 1}.
#[derive(Parser)]
#[command(name = "bohemian", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the structural class report of a matrix as JSON.
    Classify { file: PathBuf },
    /// Print the rank-one, block and row-class decompositions that apply.
    Decompose { file: PathBuf },
    /// Enumerate inverses by brute force or from the matching characterization.
    Inverses(InversesArgs),
    /// Evaluate a closed-form count.
    Count(CountArgs),
    /// Evaluate both sides of the split binomial identity.
    Identity {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        #[arg(long)]
        json: bool,
    },
    /// Cross-check families and formulas against the oracle.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 9)]
        budget: usize,
        /// Do not fail on discrepancies listed as known gaps.
        #[arg(long)]
        allow_known_gaps: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Core,
    Inner,
    Outer,
    Counts,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Oracle,
    Theorem,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpecArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "12")]
    OneTwo,
}

#[derive(Clone, Copy, ValueEnum)]
enum StreamFormat {
    Text,
    Json,
}

#[derive(clap::Args)]
struct InversesArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    spec: SpecArg,
    #[arg(long, value_enum, default_value = "oracle")]
    mode: Mode,
    /// Keep only members of this rank.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    count_only: bool,
    /// Comma-separated entries, e.g. `0,1`.
    #[arg(long, allow_hyphen_values = true)]
    population: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: StreamFormat,
    /// Cell budget for brute force; defaults to $BOHEMIAN_BUDGET or 16.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// In theorem mode, print the family description instead of members.
    #[arg(long)]
    describe: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountFormat {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct CountArgs {
    #[arg(long, required_unless_present = "list")]
    formula: Option<String>,
    /// List the known formulas.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    m: Option<i64>,
    #[arg(long)]
    n: Option<i64>,
    #[arg(long)]
    n1: Option<i64>,
    #[arg(long)]
    n2: Option<i64>,
    #[arg(long)]
    n3: Option<i64>,
    #[arg(long)]
    n4: Option<i64>,
    #[arg(long)]
    m1: Option<i64>,
    #[arg(long)]
    m2: Option<i64>,
    #[arg(long)]
    m3: Option<i64>,
    #[arg(long)]
    m4: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<i64>,
    #[arg(long)]
    include_zero: bool,
    #[arg(long)]
    zero_in_pop: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: CountFormat,
}

enum Failure {
    Lib(Error),
    Io(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse { .. } | Error::Shape(_) | Error::Domain(_) => 2,
                Error::Unsupported(_) => 3,
                Error::Budget { .. } => 4,
            })
        }
    }
}

fn read_matrix(path: &PathBuf) -> Result<TernaryMatrix, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_matrix(&text)?)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify { file } => {
            let a = read_matrix(&file)?;
            print_json(&serde_json::to_value(class_membership(&a)).expect("json"));
        }
        Command::Decompose { file } => {
            let a = read_matrix(&file)?;
            let report = class_membership(&a);
            let rank_one = rank_one_factorize(&a).ok();
            let s = if report.is_class_III {
                rank2_class3_detail(&a)?
            } else {
                None
            };
            print_json(&json!({
                "rank": report.rank,
                "rank_one": rank_one,
                "generalized_well_settled": gws_detect(&a),
                "row_classes": uw_decompose(&a).ok(),
                "s_structure": s,
            }));
        }
        Command::Inverses(args) => inverses(args)?,
        Command::Count(args) => count(args)?,
        Command::Identity { m, n1, n2, json } => {
            for (name, v) in [("m", m), ("n1", n1), ("n2", n2)] {
                if v == 0 {
                    return Err(Error::Domain(format!("--{name} must be at least 1")).into());
                }
            }
            let c = binomial_identity_check(m, n1, n2);
            if json {
                print_json(&serde_json::to_value(&c).expect("json"));
            } else {
                let verdict = if c.equal { "equal" } else { "not-equal" };
                println!("{} {} {verdict}", c.lhs, c.rhs);
            }
        }
        Command::Verify { suite, budget, allow_known_gaps, threads } => {
            let suite = match suite {
                SuiteArg::Core => Suite::Core,
                SuiteArg::Inner => Suite::Inner,
                SuiteArg::Outer => Suite::Outer,
                SuiteArg::Counts => Suite::Counts,
                SuiteArg::All => Suite::All,
            };
            let outcome = run_suite(suite, budget, threads);
            print_json(&serde_json::to_value(&outcome).expect("json"));
            if !outcome.success(allow_known_gaps) {
                return Err(Failure::Verify);
            }
        }
    }
    Ok(())
}

fn inverses(args: InversesArgs) -> Result<(), Failure> {
    let a = read_matrix(&args.file)?;
    let population = match &args.population {
        Some(p) => p.parse::<Population>()?,
        None => Population::ternary(),
    };
    let mut options = EnumOptions::from_env();
    if let Some(b) = args.budget {
        options.budget = b;
    }
    options.threads = args.threads;
    let spec = match args.spec {
        SpecArg::One => PenroseSpec::One,
        SpecArg::Two => PenroseSpec::Two,
        SpecArg::OneTwo => PenroseSpec::OneTwo,
    };
    match args.mode {
        Mode::Oracle => {
            if args.count_only {
                let c = brute_force_count(&a, spec, &population, args.rank, &options)?;
                emit_count(args.format, &count_json(&c), None);
            } else {
                let e = brute_force_inverses(&a, spec, &population, args.rank, &options)?;
                emit_stream(args.format, &e, None);
            }
        }
        Mode::Theorem => {
            let family = dispatch(
                &a,
                match spec {
                    PenroseSpec::One => InverseSpec::Inner,
                    PenroseSpec::Two => InverseSpec::Outer,
                    PenroseSpec::OneTwo => InverseSpec::Reflexive,
                },
            )?;
            let id = family.theorem_id.clone();
            if args.describe {
                print_json(&family.to_json());
                return Ok(());
            }
            if args.count_only && args.rank.is_none() {
                let c = family_count(&family, &population, &options)?;
                emit_count(args.format, &count_json(&c), Some(&id));
                return Ok(());
            }
            let mut e = materialize_family(&family, &population, &options)?;
            if let Some(r) = args.rank {
                e.matrices.retain(|x| exact_rank(&to_int(x)) == r);
                e.count = e.matrices.len().into();
            }
            if args.count_only {
                emit_count(args.format, &count_json(&e.count), Some(&id));
            } else {
                emit_stream(args.format, &e, Some(&id));
            }
        }
    }
    Ok(())
}

fn emit_count(format: StreamFormat, count: &Value, theorem_id: Option<&str>) {
    match format {
        StreamFormat::Text => {
            if let Some(id) = theorem_id {
                println!("# theorem_id: {id}");
            }
            println!("count: {count}");
        }
        StreamFormat::Json => {
            let mut v = json!({ "count": count });
            if let Some(id) = theorem_id {
                v["theorem_id"] = json!(id);
            }
            println!("{v}");
        }
    }
}

fn emit_stream(format: StreamFormat, e: &Enumeration, theorem_id: Option<&str>) {
    match format {
        StreamFormat::Text => {
            if let Some(id) = theorem_id {
                println!("# theorem_id: {id}");
            }
            print!("{}", e.to_text());
        }
        StreamFormat::Json => {
            let mut v = e.to_json();
            if let (Some(id), Some(last)) = (theorem_id, v.as_array_mut().and_then(|a| a.last_mut())) {
                last["theorem_id"] = json!(id);
            }
            println!("{v}");
        }
    }
}

fn count(args: CountArgs) -> Result<(), Failure> {
    if args.list {
        for f in FORMULAS {
            let mut params: Vec<String> = f.required.iter().map(|p| format!("--{p}")).collect();
            params.extend(f.optional.iter().map(|p| format!("[--{}]", p.replace('_', "-"))));
            println!("{:<16} {:<40} {}", f.id, params.join(" "), f.summary);
        }
        return Ok(());
    }
    let formula = args.formula.as_deref().expect("required by clap");
    let mut params: BTreeMap<String, i64> = BTreeMap::new();
    for (name, v) in [
        ("m", args.m),
        ("n", args.n),
        ("n1", args.n1),
        ("n2", args.n2),
        ("n3", args.n3),
        ("n4", args.n4),
        ("m1", args.m1),
        ("m2", args.m2),
        ("m3", args.m3),
        ("m4", args.m4),
        ("t", args.t),
    ] {
        if let Some(v) = v {
            params.insert(name.to_string(), v);
        }
    }
    if args.include_zero {
        params.insert("include_zero".into(), 1);
    }
    if args.zero_in_pop {
        params.insert("zero_in_pop".into(), 1);
    }
    let report = evaluate(formula, &params)?;
    match args.format {
        CountFormat::Csv => {
            println!("{}", report.csv_header());
            println!("{}", report.csv_row());
        }
        CountFormat::Json => print_json(&report.to_json()),
    }
    Ok(())
}
