//! `sqfactor` command line.
//!
//! Exit status: 0 on a found factorization, a generated semiprime or a
//! finished study; 1 on usage or input errors; 2 when the modulus has no
//! nontrivial factor; 3 when the iteration or time budget ran out. In the
//! budget case the resumable checkpoint line is the only thing written to
//! stderr, so `2> state.txt` captures it for `--resume state.txt`.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::Pow;
use serde_json::{json, Value};

use crate::bench::{self, BenchCase, Fixture, StudyConfig};
use crate::engine::{
    normalize_input, resume_fermat, resume_xscan, Budget, Checkpoint, FactorOutcome, Method,
    Normalized, DEFAULT_CLI_MAX_ITERATIONS,
};
use crate::engine::{init_search, init_xscan};
use crate::error::Error;
use crate::lab::{generate, SemiprimeSpec};
use crate::numeric::Modulus;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_FACTOR: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sqfactor", version, about = "Difference-of-squares factorization of semiprimes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Factor N by walking y = ceil(sqrt(N)) + k until y^2 - N is a square.
    Factor(FactorArgs),
    /// Factor N by scanning x = 0, 1, ... until N + x^2 is a square.
    Xscan(FactorArgs),
    /// Generate semiprimes with a bounded gap between the factors.
    Generate(GenerateArgs),
    /// Measure iterations and time across a ladder of prime gaps.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Iteration budget for this run [default: 100000000]
    #[arg(long, value_name = "M", conflicts_with = "no_limit")]
    max_iterations: Option<u64>,
    /// Wall-clock budget in seconds.
    #[arg(long, value_name = "S", value_parser = parse_seconds)]
    max_seconds: Option<Duration>,
    /// Drop the default iteration budget.
    #[arg(long)]
    no_limit: bool,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        let iterations = match (self.max_iterations, self.no_limit) {
            (Some(m), _) => Some(m),
            (None, true) => None,
            (None, false) => Some(DEFAULT_CLI_MAX_ITERATIONS),
        };
        Budget {
            max_iterations: iterations,
            max_elapsed: self.max_seconds,
        }
    }
}

#[derive(Debug, Args)]
struct FactorArgs {
    /// Modulus, decimal or 0x-prefixed hexadecimal.
    #[arg(value_name = "N", required_unless_present = "resume")]
    modulus: Option<String>,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Emit a single JSON object.
    #[arg(long)]
    json: bool,
    /// Continue from a checkpoint file written by an exhausted run.
    #[arg(long, value_name = "FILE")]
    resume: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_name = "B")]
    bits: u32,
    #[arg(long, value_name = "G", value_parser = parse_natural)]
    max_gap: BigUint,
    #[arg(long, value_name = "S")]
    seed: u64,
    /// Number of semiprimes; the i-th uses seed S + i.
    #[arg(long, value_name = "C", default_value_t = 1)]
    count: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_name = "B", required_unless_present_any = ["modulus", "fixture"])]
    bits: Option<u32>,
    /// Ascending gap bounds, e.g. 16,256,0x1000,2^16.
    #[arg(long, value_name = "G1,G2,...", value_delimiter = ',', value_parser = parse_natural,
          required_unless_present_any = ["modulus", "fixture"], conflicts_with_all = ["modulus", "fixture"])]
    gaps: Vec<BigUint>,
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "M,...", value_delimiter = ',', default_value = "fermat")]
    methods: Vec<Method>,
    /// Gap ladders to draw.
    #[arg(long, value_name = "R", default_value_t = 1)]
    samples: u32,
    /// Measure this modulus instead of a generated ladder.
    #[arg(long, value_name = "N", conflicts_with = "fixture")]
    modulus: Option<String>,
    /// Measure the modulus in a fixture file (n = ..., optional p, q).
    #[arg(long, value_name = "FILE")]
    fixture: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
    /// JSON Lines output, one record per factorization.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Also write the scaling summary as CSV.
    #[arg(long, value_name = "FILE")]
    summary_csv: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn parse_seconds(s: &str) -> Result<Duration, String> {
    let secs: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Duration::try_from_secs_f64(secs).map_err(|e| format!("{e}"))
}

/// Decimal, `0x` hex, or `2^k`.
fn parse_natural(s: &str) -> Result<BigUint, String> {
    if let Some((base, exp)) = s.split_once('^') {
        let base: BigUint = base.parse::<Modulus>().map_err(|e| e.to_string())?.value;
        let exp: u32 = exp.parse().map_err(|e| format!("bad exponent {exp:?}: {e}"))?;
        return Ok(base.pow(exp));
    }
    s.parse::<Modulus>().map(|m| m.value).map_err(|e| e.to_string())
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    json: bool,
}

impl Io<'_> {
    fn fail(&mut self, message: &str) -> i32 {
        if self.json {
            let _ = writeln!(self.out, "{}", json!({ "error": message }));
        } else {
            let _ = writeln!(self.err, "error: {message}");
        }
        EXIT_USAGE
    }
}

/// Parses `args` (program name first) and runs the subcommand, writing to
/// the given streams. Returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json = args.iter().any(|a| a == "--json");
    let mut io = Io {
        out: stdout,
        err: stderr,
        json,
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(io.out, "{e}");
                return EXIT_OK;
            }
            if json {
                let message = e.to_string();
                return io.fail(message.lines().next().unwrap_or("invalid arguments"));
            }
            let _ = write!(io.err, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Factor(a) => factor(&a, Method::Fermat, &mut io),
        Command::Xscan(a) => factor(&a, Method::Xscan, &mut io),
        Command::Generate(a) => run_generate(&a, &mut io),
        Command::Bench(a) => run_bench(&a, &mut io),
    };
    match result {
        Ok(code) => code,
        Err(e) => io.fail(&e.to_string()),
    }
}

fn read_checkpoint(path: &PathBuf) -> Result<Checkpoint, Error> {
    let text = fs::read_to_string(path)?;
    let line = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Checkpoint(format!("{} is empty", path.display())))?;
    line.parse()
}

fn factors_text(factors: &[BigUint]) -> String {
    factors
        .iter()
        .map(BigUint::to_string)
        .collect::<Vec<_>>()
        .join(" × ")
}

fn factor(args: &FactorArgs, method: Method, io: &mut Io<'_>) -> Result<i32, Error> {
    let modulus = args
        .modulus
        .as_deref()
        .map(str::parse::<Modulus>)
        .transpose()?;
    let checkpoint = args.resume.as_ref().map(read_checkpoint).transpose()?;

    let (n, twos, residual) = match (&modulus, &checkpoint) {
        (Some(m), _) => match normalize_input(&m.value)? {
            Normalized::Complete { twos } => (m.value.clone(), twos, None),
            Normalized::Odd { twos, residual } => (m.value.clone(), twos, Some(residual)),
        },
        (None, Some(c)) => (c.n().clone(), 0, Some(c.n().clone())),
        (None, None) => unreachable!("clap requires N or --resume"),
    };
    if let (Some(c), Some(residual)) = (&checkpoint, &residual) {
        if c.n() != residual {
            return Err(Error::Checkpoint(format!(
                "checkpoint is for n = {}, but the odd part of the modulus is {residual}",
                c.n()
            )));
        }
    }
    if let (Some(_), None) = (&checkpoint, &residual) {
        return Err(Error::Checkpoint("a power of two needs no checkpoint".into()));
    }

    let mut factors: Vec<BigUint> = vec![BigUint::from(2u32); twos as usize];
    let mut report = json!({
        "method": method.as_str(),
        "n": n.to_string(),
        "twos": twos,
    });

    let Some(residual) = residual else {
        // n = 2^twos.
        return Ok(finish_power_of_two(&n, twos, factors, report, io));
    };
    report["residual"] = residual.to_string().into();

    let budget = args.budget.budget();
    let outcome: FactorOutcome<Checkpoint> = match (method, checkpoint) {
        (Method::Fermat, None) => resume_fermat(init_search(&residual)?, &budget).map_resume(Checkpoint::Fermat),
        (Method::Fermat, Some(Checkpoint::Fermat(s))) => resume_fermat(s, &budget).map_resume(Checkpoint::Fermat),
        (Method::Xscan, None) => resume_xscan(init_xscan(&residual)?, &budget).map_resume(Checkpoint::Xscan),
        (Method::Xscan, Some(Checkpoint::Xscan(s))) => resume_xscan(s, &budget).map_resume(Checkpoint::Xscan),
        (m, Some(_)) => {
            return Err(Error::Checkpoint(format!(
                "checkpoint was written by the other method, not {}",
                m.as_str()
            )))
        }
    };

    report["outcome"] = outcome.kind().as_str().into();
    report["iterations"] = outcome.iterations().into();
    let code = match outcome {
        FactorOutcome::Found { p, q, k, iterations } => {
            factors.push(p.clone());
            factors.push(q.clone());
            report["p"] = p.to_string().into();
            report["q"] = q.to_string().into();
            report["k"] = k.into();
            report["factors"] = factors.iter().map(|f| Value::from(f.to_string())).collect();
            if !io.json {
                if twos == 0 {
                    writeln!(io.out, "p={p} q={q} k={k} iterations={iterations}")?;
                } else {
                    writeln!(io.out, "{}", factors_text(&factors))?;
                }
            }
            EXIT_OK
        }
        FactorOutcome::NoNontrivialFactor { iterations } => {
            factors.push(residual.clone());
            report["factors"] = factors.iter().map(|f| Value::from(f.to_string())).collect();
            if twos > 0 {
                // 2^t · (odd prime) is still a nontrivial split.
                report["outcome"] = "found".into();
                if !io.json {
                    writeln!(io.out, "{}", factors_text(&factors))?;
                }
                EXIT_OK
            } else {
                if !io.json {
                    writeln!(io.out, "no nontrivial factor: n={residual} iterations={iterations}")?;
                }
                EXIT_NO_FACTOR
            }
        }
        FactorOutcome::BudgetExhausted { iterations, resume } => {
            report["checkpoint"] = resume.to_string().into();
            if !io.json {
                writeln!(io.out, "budget exhausted: n={residual} iterations={iterations}")?;
            }
            writeln!(io.err, "{resume}")?;
            EXIT_BUDGET
        }
    };
    if io.json {
        writeln!(io.out, "{report}")?;
    }
    Ok(code)
}

fn finish_power_of_two(
    n: &BigUint,
    twos: u32,
    factors: Vec<BigUint>,
    mut report: Value,
    io: &mut Io<'_>,
) -> i32 {
    let prime = twos == 1;
    report["outcome"] = if prime { "no_factor" } else { "found" }.into();
    report["iterations"] = 0.into();
    report["factors"] = factors.iter().map(|f| Value::from(f.to_string())).collect();
    if !prime {
        report["p"] = "2".into();
        report["q"] = (n >> 1u32).to_string().into();
    }
    let _ = if io.json {
        writeln!(io.out, "{report}")
    } else if prime {
        writeln!(io.out, "no nontrivial factor: n=2 iterations=0")
    } else {
        writeln!(io.out, "{}", factors_text(&factors))
    };
    if prime {
        EXIT_NO_FACTOR
    } else {
        EXIT_OK
    }
}

fn run_generate(args: &GenerateArgs, io: &mut Io<'_>) -> Result<i32, Error> {
    if args.count == 0 {
        return Err(Error::InvalidSpec("--count must be at least 1".into()));
    }
    let generated = (0..args.count)
        .map(|i| {
            generate(&SemiprimeSpec {
                bits: args.bits,
                max_gap: args.max_gap.clone(),
                seed: args.seed.wrapping_add(u64::from(i)),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if io.json {
        let doc = if generated.len() == 1 {
            serde_json::to_value(&generated[0])?
        } else {
            serde_json::to_value(&generated)?
        };
        writeln!(io.out, "{doc}")?;
    } else {
        for g in &generated {
            writeln!(io.out, "{g}")?;
        }
    }
    Ok(EXIT_OK)
}

fn run_bench(args: &BenchArgs, io: &mut Io<'_>) -> Result<i32, Error> {
    let budget = args.budget.budget();
    let methods: BTreeSet<Method> = args.methods.iter().copied().collect();
    let mut out = BufWriter::new(fs::File::create(&args.out)?);
    let mut sink = |r: &bench::BenchRecord| bench::write_record(&mut out, r);

    let (records, failures) = if let Some(case) = single_case(args)? {
        let mut records = Vec::new();
        for &method in &methods {
            let record = bench::measure(&case, method, &budget)?;
            sink(&record)?;
            records.push(record);
        }
        (records, Vec::new())
    } else {
        let config = StudyConfig {
            bits: args.bits.expect("clap requires --bits with --gaps"),
            gaps: args.gaps.clone(),
            seed: args.seed,
            budget,
            methods,
            samples: args.samples,
        };
        let report = bench::run_study(&config, &mut sink)?;
        (report.records, report.failures)
    };

    for f in &failures {
        writeln!(io.err, "gap bound {} (seed {}): {}", f.gap_bound, f.seed, f.error)?;
    }
    let summary = bench::scaling_summary(&records);
    if let (Ok(s), Some(path)) = (&summary, &args.summary_csv) {
        fs::write(path, s.to_csv())?;
    }
    if io.json {
        let rows: Option<Vec<Value>> = summary.as_ref().ok().map(|s| {
            s.rows
                .iter()
                .map(|r| {
                    json!({
                        "gap": r.gap.to_string(),
                        "n_bits": r.n_bits,
                        "runs": r.runs,
                        "median_iterations": r.median_iterations,
                        "analytic_iterations": r.analytic_iterations,
                        "ratio": if r.ratio.is_nan() { Value::Null } else { r.ratio.into() },
                        "median_elapsed_ns": r.median_elapsed_ns,
                    })
                })
                .collect()
        });
        let doc = json!({
            "records": records.len(),
            "out": args.out.display().to_string(),
            "failures": failures.iter().map(|f| json!({
                "gap_bound": f.gap_bound.to_string(),
                "seed": f.seed.to_string(),
                "error": f.error.to_string(),
            })).collect::<Vec<_>>(),
            "summary": rows,
            "summary_error": summary.as_ref().err().map(ToString::to_string),
        });
        writeln!(io.out, "{doc}")?;
    } else {
        writeln!(io.out, "wrote {} records to {}", records.len(), args.out.display())?;
        match &summary {
            Ok(s) => write!(io.out, "{s}")?,
            Err(e) => writeln!(io.err, "no summary: {e}")?,
        }
    }
    Ok(EXIT_OK)
}

fn single_case(args: &BenchArgs) -> Result<Option<BenchCase>, Error> {
    if let Some(m) = &args.modulus {
        return Ok(Some(BenchCase {
            n: m.parse::<Modulus>()?.value,
            factors: None,
            seed: args.seed,
        }));
    }
    if let Some(path) = &args.fixture {
        let fixture: Fixture = fs::read_to_string(path)?.parse()?;
        return Ok(Some(fixture.into_case(args.seed)));
    }
    Ok(None)
}
