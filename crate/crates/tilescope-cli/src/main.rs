use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tilescope_core::asymptotics::{
    calibration_check, convergence_table, hole_correlations, omega_asymptotic, omega_finite, omega_r_finite,
    parse_hole, Which,
};
use tilescope_core::exactalg::real::DEFAULT_DIGITS;
use tilescope_core::formulas;
use tilescope_core::oracle::DEFAULT_CELL_CAP;
use tilescope_core::region::RegionSpec;
use tilescope_core::verify::{
    check_reconstruction, emit_report, exit_code, run_suite, run_suite_cached, Format, Method, ParamRange, SweepSpec,
};

/// Writes a line to stdout, treating a closed pipe as a normal end of output.
macro_rules! emit {
    ($($arg:tt)*) => {{
        let line = format!("{}\n", format_args!($($arg)*));
        match std::io::stdout().lock().write_all(line.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
            _ => {}
        }
    }};
}

/// Exact and asymptotic enumeration of lozenge tilings of holey hexagons.
#[derive(Parser)]
#[command(name = "tilescope", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count the tilings of one region.
    Count(CountArgs),
    /// Run a cross-method sweep and emit a report.
    Verify(VerifyArgs),
    /// Reconstruct the count as a polynomial in the core side.
    Interp(InterpArgs),
    /// Evaluate correlations and their large-gap behaviour.
    Asymptotics(AsymptoticsArgs),
}

/// Region given inline or through a JSON file.
#[derive(Args)]
struct RegionArgs {
    /// JSON file `{"variant": ..., "params": {...}}`.
    #[arg(long)]
    spec_file: Option<PathBuf>,
    /// Region family: hexagon, s, sprime, sgeneral, triad, shamrock, dented-trapezoid.
    #[arg(long)]
    variant: Option<String>,
    /// Integer parameters as `name=value`, repeatable.
    #[arg(long = "param", short = 'p', value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    n: Option<i64>,
    #[arg(long)]
    a: Option<i64>,
    #[arg(long)]
    b: Option<i64>,
    #[arg(long)]
    k: Option<i64>,
}

impl RegionArgs {
    fn spec(&self) -> Result<Option<RegionSpec>> {
        if let Some(path) = &self.spec_file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            return Ok(Some(RegionSpec::from_json(&v)?));
        }
        let Some(variant) = &self.variant else { return Ok(None) };
        let mut params = serde_json::Map::new();
        for (name, v) in [("n", self.n), ("a", self.a), ("b", self.b), ("k", self.k)] {
            if let Some(v) = v {
                params.insert(name.into(), json!(v));
            }
        }
        for p in &self.params {
            let (name, v) = p.split_once('=').with_context(|| format!("parameter {p:?} is not name=value"))?;
            let v: i64 = v.trim().parse().with_context(|| format!("parameter {p:?} is not an integer"))?;
            params.insert(name.trim().into(), json!(v));
        }
        Ok(Some(RegionSpec::from_json(&json!({ "variant": variant, "params": params }))?))
    }
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    region: RegionArgs,
    /// oracle, det, gelfand, evenb, oddb, evenodd, reduced, cored, factorized, or formula.
    #[arg(long, default_value = "oracle")]
    method: String,
    /// Formula for `--method formula`: macmahon, mr, newtheo, shamrock, triad, conjectured.
    #[arg(long)]
    formula: Option<String>,
    /// Positional formula arguments, comma separated; overrides the region.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    args: Vec<i64>,
    #[arg(long, default_value_t = DEFAULT_CELL_CAP)]
    cell_cap: usize,
    /// Count only tilings invariant under rotation by 120 degrees.
    #[arg(long)]
    invariant: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Preset suite name; ignored when --spec-file is given.
    #[arg(long)]
    suite: Option<String>,
    /// Sweep description as JSON.
    #[arg(long)]
    spec_file: Option<PathBuf>,
    /// Range overrides such as `n=0..4`, `a=0..6:2` or `k=1`.
    #[arg(long = "range", short = 'r')]
    ranges: Vec<String>,
    /// Methods to compare, comma separated.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    #[arg(long)]
    cell_cap: Option<usize>,
    /// Seconds after which remaining tuples are skipped.
    #[arg(long)]
    time_budget: Option<u64>,
    /// JSON-lines cache of earlier records.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
    /// Drop the wall-time column so identical sweeps give identical reports.
    #[arg(long)]
    no_timing: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// List the preset suites and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

impl OutFormat {
    fn core(self) -> Format {
        match self {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Args)]
struct InterpArgs {
    /// Half side of the region.
    #[arg(long)]
    n: i64,
    /// Satellite side (even).
    #[arg(long)]
    b: i64,
    #[arg(long)]
    k: i64,
    /// evenodd or reduced.
    #[arg(long, default_value = "evenodd")]
    method: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Omega,
    OmegaR,
    Hole,
    Calibration,
    Convergence,
}

#[derive(Args)]
struct AsymptoticsArgs {
    #[arg(long, value_enum)]
    what: What,
    #[arg(long, default_value_t = 0)]
    a: i64,
    #[arg(long, default_value_t = 0)]
    b: i64,
    /// Gap values, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    k: Vec<i64>,
    /// Hole shape such as `triangle:2`, `bowtie:1,2` or `fern:1,2,1`.
    #[arg(long)]
    hole: Option<String>,
    /// Significant digits; defaults to TILESCOPE_PRECISION or 64.
    #[arg(long)]
    digits: Option<u32>,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Count(args) => count(args),
        Command::Verify(args) => verify(args),
        Command::Interp(args) => interp(args),
        Command::Asymptotics(args) => asymptotics(args),
    }
}

fn count(args: CountArgs) -> Result<u8> {
    let spec = args.region.spec()?;
    if args.method == "formula" {
        let name = args.formula.as_deref().context("--method formula needs --formula NAME")?;
        let result = match (&spec, args.args.is_empty()) {
            (_, false) => formulas::evaluate(name, &args.args)?.to_json(),
            (Some(spec), true) if matches!(name, "shamrock" | "triad") => {
                let values: Vec<i64> = spec.params().into_iter().map(|(_, v)| v).collect();
                formulas::evaluate(name, &values)?.to_json()
            }
            (Some(spec), true) => {
                let method: Method = name.parse()?;
                let v = method.evaluate(spec, args.cell_cap)?;
                json!({ "value": v.value, "status": v.status, "formula_id": name })
            }
            (None, true) => bail!("give a region (--variant or --spec-file) or --args"),
        };
        emit!("{result}");
        return Ok(0);
    }
    let spec = spec.context("give a region with --variant or --spec-file")?;
    let method: Method = match (args.method.as_str(), args.invariant) {
        ("oracle", true) => Method::OracleInvariant,
        ("factorized", true) => Method::FactorizedInvariant,
        (_, true) => bail!("--invariant is supported by the oracle and factorized methods"),
        (m, false) => m.parse()?,
    };
    emit!("{}", method.evaluate(&spec, args.cell_cap)?.value);
    Ok(0)
}

fn write_output(out: &OutputArgs, text: &str) -> Result<()> {
    match &out.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            emit!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn verify(args: VerifyArgs) -> Result<u8> {
    if args.list {
        for name in SweepSpec::PRESETS {
            emit!("{name}");
        }
        return Ok(0);
    }
    let mut spec = match (&args.spec_file, &args.suite) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<SweepSpec>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, Some(name)) => SweepSpec::preset(name)?,
        (None, None) => bail!("give --suite NAME or --spec-file FILE (see --list)"),
    };
    let ranges = args.ranges.iter().map(|r| r.parse::<ParamRange>()).collect::<Result<Vec<_>, _>>()?;
    spec.override_ranges(ranges);
    if !args.methods.is_empty() {
        spec.methods = args.methods.iter().map(|m| m.parse()).collect::<Result<_, _>>()?;
    }
    if let Some(cap) = args.cell_cap {
        spec.cell_cap = cap;
    }
    if args.time_budget.is_some() {
        spec.time_budget_secs = args.time_budget;
    }
    let records = match &args.cache {
        Some(path) => run_suite_cached(&spec, args.jobs, path)?,
        None => run_suite(&spec, args.jobs)?,
    };
    write_output(&args.output, &emit_report(&records, args.output.format.core(), !args.no_timing)?)?;
    let code = exit_code(&records);
    eprintln!(
        "{}: {} tuples, {} agree, exit {code}",
        spec.suite,
        records.len(),
        records.iter().filter(|r| r.agree).count()
    );
    Ok(code as u8)
}

fn interp(args: InterpArgs) -> Result<u8> {
    let method: Method = args.method.parse()?;
    let c = check_reconstruction(args.n, args.b, args.k, method)?;
    let v = json!({
        "n": args.n,
        "b": args.b,
        "k": args.k,
        "degree": c.degree,
        "leading": c.leading.to_string(),
        "expected_degree": c.expected_degree,
        "expected_leading": c.expected_leading.to_string(),
        "holds": c.holds(),
    });
    emit!("{}", serde_json::to_string_pretty(&v)?);
    Ok(if c.holds() { 0 } else { 2 })
}

fn precision(flag: Option<u32>) -> Result<u32> {
    if let Some(d) = flag {
        return Ok(d);
    }
    match std::env::var("TILESCOPE_PRECISION") {
        Ok(s) => s.trim().parse().with_context(|| format!("TILESCOPE_PRECISION={s:?} is not a digit count")),
        Err(_) => Ok(DEFAULT_DIGITS),
    }
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn asymptotics(args: AsymptoticsArgs) -> Result<u8> {
    let digits = precision(args.digits)?;
    let sig = digits as usize;
    let csv = matches!(args.output.format, OutFormat::Csv);
    let text = match args.what {
        What::Omega | What::OmegaR | What::Convergence => {
            let which = if args.what == What::OmegaR { Which::OmegaR } else { Which::Omega };
            let mut rows = Vec::new();
            let mut objs = Vec::new();
            if args.what == What::Convergence {
                for row in convergence_table(args.a, args.b, &args.k, digits)? {
                    rows.push(vec![
                        row.k.to_string(),
                        row.finite.to_sci_string(sig),
                        row.ratio.to_sci_string(sig),
                    ]);
                    objs.push(json!({
                        "k": row.k,
                        "value": row.finite.to_sci_string(sig),
                        "asymptotic": row.asymptotic.to_sci_string(sig),
                        "ratio": row.ratio.to_sci_string(sig),
                    }));
                }
            } else {
                for &k in &args.k {
                    let finite = match which {
                        Which::Omega => omega_finite(args.a, args.b, k, digits)?,
                        Which::OmegaR => omega_r_finite(args.a, args.b, k, digits)?,
                    };
                    let value = finite.value.to_real(digits);
                    let ratio = &value / &omega_asymptotic(args.a, args.b, k, which, digits)?;
                    rows.push(vec![k.to_string(), value.to_sci_string(sig), ratio.to_sci_string(sig)]);
                    let mut obj = finite.to_json(digits);
                    obj["ratio"] = json!(ratio.to_sci_string(sig));
                    objs.push(obj);
                }
            }
            if csv {
                csv_text(&["k", "value", "ratio"], &rows)
            } else {
                serde_json::to_string_pretty(&objs)?
            }
        }
        What::Hole => {
            let hole = args.hole.as_deref().context("--what hole needs --hole SHAPE")?;
            let value = hole_correlations(&parse_hole(hole)?, digits)?.to_sci_string(sig);
            if csv {
                csv_text(&["hole", "value"], &[vec![format!("\"{hole}\""), value]])
            } else {
                serde_json::to_string_pretty(&json!({ "hole": hole, "value": value }))?
            }
        }
        What::Calibration => {
            let report = calibration_check(digits)?;
            let v = report.to_json();
            if csv {
                let obj = v.as_object().context("calibration report is an object")?;
                let rows: Vec<Vec<String>> = obj
                    .iter()
                    .map(|(k, v)| vec![k.clone(), v.as_str().map_or_else(|| v.to_string(), str::to_string)])
                    .collect();
                csv_text(&["quantity", "value"], &rows)
            } else {
                serde_json::to_string_pretty(&v)?
            }
        }
    };
    write_output(&args.output, &text)?;
    Ok(0)
}
