use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use valuform::commands::{parse_order, run, JobSpec, Options};
use valuform::corpus::run_all_with;
use valuform::error::{CliError, EXIT_CERTIFICATE, EXIT_OK};
use valuform_core::Limits;

#[derive(Parser)]
#[command(name = "valuform", version, about = "Blowup towers, semistable subdivisions and their certificates")]
struct Cli {
    /// Monomial order for `gb` (grevlex, lex).
    #[arg(long, global = true, default_value = "grevlex")]
    order: String,
    /// S-polynomial reductions per Gröbner basis.
    #[arg(long, global = true)]
    max_steps: Option<u64>,
    /// Largest total degree of an intermediate basis element.
    #[arg(long, global = true)]
    max_degree: Option<u32>,
    /// Largest exponent tried by annihilator lifting and saturation.
    #[arg(long, global = true)]
    max_ann_exponent: Option<u32>,
    /// Stellar subdivision rounds.
    #[arg(long, global = true)]
    max_subdiv_iters: Option<u64>,
    /// Seed for random instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Single-line JSON output.
    #[arg(long, global = true)]
    compact: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Input {
    /// JSON input document; stdin when omitted or `-`.
    file: Option<PathBuf>,
}

#[derive(Args)]
struct Mrl {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    l: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum IdealOp {
    Quotient,
    Saturate,
    Eliminate,
    Dim,
    Relate,
}

#[derive(Clone, Copy, ValueEnum)]
enum MonoidOp {
    Invariants,
    Admissible,
    Saturate,
    Algebra,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValOp {
    Value,
    Height,
    Decompose,
    Center,
    Lift,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduced Gröbner basis.
    Gb(Input),
    /// Quotient, saturation, elimination, dimension or comparison.
    Ideal {
        #[arg(value_enum)]
        op: IdealOp,
        #[command(flatten)]
        input: Input,
    },
    /// One chart of a blowup.
    Blowup(Input),
    StrictTransform(Input),
    Annlift(Input),
    Keylemma(Input),
    Monoid {
        #[arg(value_enum)]
        op: MonoidOp,
        #[command(flatten)]
        input: Input,
    },
    /// The model T(m, r, l) as the v-chart of its blowup.
    ToricChart(Mrl),
    ToricVerify(Mrl),
    Subdivide(Input),
    VerifyFan(Input),
    ChartMonoid(Input),
    Logsmooth(Input),
    SemistableCheck(Input),
    Val {
        #[arg(value_enum)]
        op: ValOp,
        #[command(flatten)]
        input: Input,
    },
    /// Height induction on a scheme chart.
    Uniformize(Input),
    FormalKey(Input),
    /// Height induction on a model chart, ending semistable.
    FormalUniformize(Input),
    /// Re-execute a tower document and re-check its certificate.
    Replay(Input),
    /// Run the acceptance corpus.
    Corpus {
        /// Print the reports as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn read_input(i: &Input) -> Result<Value, CliError> {
    let text = match &i.file {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)?,
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    Ok(serde_json::from_str(&text)?)
}

fn op_name<T: ValueEnum>(t: T) -> String {
    t.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn job(cmd: &Cmd) -> Result<(String, Option<String>, Value), CliError> {
    let plain = |name: &str, i: &Input| -> Result<_, CliError> { Ok((name.to_string(), None, read_input(i)?)) };
    let mrl = |name: &str, a: &Mrl| (name.to_string(), None, json!({ "m": a.m, "r": a.r, "l": a.l }));
    Ok(match cmd {
        Cmd::Gb(i) => plain("gb", i)?,
        Cmd::Ideal { op, input } => ("ideal".into(), Some(op_name(*op)), read_input(input)?),
        Cmd::Blowup(i) => plain("blowup", i)?,
        Cmd::StrictTransform(i) => plain("strict-transform", i)?,
        Cmd::Annlift(i) => plain("annlift", i)?,
        Cmd::Keylemma(i) => plain("keylemma", i)?,
        Cmd::Monoid { op, input } => ("monoid".into(), Some(op_name(*op)), read_input(input)?),
        Cmd::ToricChart(a) => mrl("toric-chart", a),
        Cmd::ToricVerify(a) => mrl("toric-verify", a),
        Cmd::Subdivide(i) => plain("subdivide", i)?,
        Cmd::VerifyFan(i) => plain("verify-fan", i)?,
        Cmd::ChartMonoid(i) => plain("chart-monoid", i)?,
        Cmd::Logsmooth(i) => plain("logsmooth", i)?,
        Cmd::SemistableCheck(i) => plain("semistable-check", i)?,
        Cmd::Val { op, input } => ("val".into(), Some(op_name(*op)), read_input(input)?),
        Cmd::Uniformize(i) => plain("uniformize", i)?,
        Cmd::FormalKey(i) => plain("formal-key", i)?,
        Cmd::FormalUniformize(i) => plain("formal-uniformize", i)?,
        Cmd::Replay(i) => plain("replay", i)?,
        Cmd::Corpus { .. } => ("corpus".into(), None, Value::Null),
    })
}

fn options(cli: &Cli) -> Result<Options, CliError> {
    let mut limits = Limits::default();
    if let Some(x) = cli.max_steps {
        limits.max_steps = x;
    }
    if let Some(x) = cli.max_degree {
        limits.max_degree = x;
    }
    if let Some(x) = cli.max_ann_exponent {
        limits.max_ann_exponent = x;
    }
    if let Some(x) = cli.max_subdiv_iters {
        limits.max_subdiv_iters = x;
    }
    Ok(Options { order: parse_order(&cli.order)?, limits, seed: cli.seed })
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let options = options(cli)?;
    if let Cmd::Corpus { json } = cli.cmd {
        let reports = run_all_with(&options, &mut |r| {
            if !json {
                println!("{}", r.line());
            }
        })?;
        if json {
            println!("{}", serde_json::to_string_pretty(&reports)?);
        }
        return Ok(if reports.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_CERTIFICATE });
    }
    let (command, op, input) = job(&cli.cmd)?;
    let out = run(&JobSpec { command, op, input, options })?;
    let text =
        if cli.compact { serde_json::to_string(&out.output)? } else { serde_json::to_string_pretty(&out.output)? };
    println!("{text}");
    Ok(if out.passed { EXIT_OK } else { EXIT_CERTIFICATE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let doc = json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{doc}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
