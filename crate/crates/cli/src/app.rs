use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use rayon::prelude::*;
use s1data::fpdata::{FixedPoint, FixedPointData};
use s1data::generators::{connected_sum, Family, GeneratorLabel};
use s1data::reducer::{check_certificate, reduce_to_empty, ReduceError};
use s1data::sampler::{fuzz_iteration, SampleConfig};
use s1data::validator::validate_all;

use crate::cert::{certificate_from_json, certificate_to_json};
use crate::format::{parse_data, parse_point, print_data};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_REALIZABLE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 66;

#[derive(Parser, Debug)]
#[command(
    name = "s1data",
    version,
    about = "Validate, generate and reduce fixed point data of circle actions on 6-manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the necessary-condition checks on a data file
    Validate {
        /// Data file, or `-` for standard input
        file: String,
        /// Print the report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Reduce data to the empty set and emit a certificate
    Reduce {
        file: String,
        /// Write the certificate here instead of standard output
        #[arg(long, value_name = "OUT")]
        cert: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
    /// Replay a certificate
    Verify {
        /// Certificate file, or `-` for standard input
        certfile: String,
    },
    /// Print the data of a model manifold
    #[command(subcommand)]
    Gen(GenCommand),
    /// Equivariant connected sum of two data files at matching points
    Connect {
        file1: String,
        file2: String,
        /// A point of FILE1 and a point of FILE2, e.g. "+3 2 1=-3 2 1"
        #[arg(long = "pair", required = true, value_name = "P=Q", allow_hyphen_values = true)]
        pairs: Vec<String>,
        #[arg(short = 'o', long = "output", value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Reduce and replay random connected sums of model manifolds
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        iterations: u64,
        #[arg(long, default_value_t = 12)]
        max_summands: usize,
        #[arg(long, default_value_t = 10)]
        max_param: u32,
    },
}

#[derive(Args, Debug)]
struct GenOutput {
    /// Reverse the orientation
    #[arg(long)]
    reverse: bool,
    #[arg(short = 'o', long = "output", value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// S^6 with weights a, b, c
    S6 {
        a: BigInt,
        b: BigInt,
        c: BigInt,
        #[command(flatten)]
        out: GenOutput,
    },
    /// CP^3 with 0 < a < b < c
    Cp3 {
        a: BigInt,
        b: BigInt,
        c: BigInt,
        #[command(flatten)]
        out: GenOutput,
    },
    /// Z_n(a, b, c); only n = 1, 2 take part in reductions
    Zn {
        n: BigInt,
        a: BigInt,
        b: BigInt,
        c: BigInt,
        #[command(flatten)]
        out: GenOutput,
    },
    /// Z_2(a,e,e) # -Z_2(a,a-e,a-e) with 0 < 2e < a
    Z2sum {
        a: BigInt,
        e: BigInt,
        #[command(flatten)]
        out: GenOutput,
    },
}

/// An outcome other than success, with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<i32, Failure>;

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String, Failure> {
        if path == "-" {
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| Failure::new(EXIT_IO, format!("standard input: {e}")))?;
            Ok(s)
        } else {
            fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{path}: {e}")))
        }
    }

    fn print(&mut self, text: &str) -> Result<(), Failure> {
        self.stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_IO, format!("standard output: {e}")))
    }

    fn emit(&mut self, text: &str, path: Option<&Path>) -> Result<(), Failure> {
        match path {
            Some(p) => fs::write(p, text)
                .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", p.display()))),
            None => self.print(text),
        }
    }

    fn read_data(&mut self, path: &str) -> Result<FixedPointData, Failure> {
        let text = self.read(path)?;
        parse_data(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("{path}: {e}")))
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code. Diagnostics go to `stderr`.
pub fn run<I, T>(
    argv: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let mut io = Io { stdin, stdout };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, io: &mut Io) -> Outcome {
    match command {
        Command::Validate { file, json } => validate(io, &file, json),
        Command::Reduce { file, cert, quiet } => reduce(io, &file, cert.as_deref(), quiet),
        Command::Verify { certfile } => verify(io, &certfile),
        Command::Gen(g) => generate(io, g),
        Command::Connect {
            file1,
            file2,
            pairs,
            output,
        } => connect(io, &file1, &file2, &pairs, output.as_deref()),
        Command::Fuzz {
            seed,
            iterations,
            max_summands,
            max_param,
        } => fuzz(
            io,
            seed,
            iterations,
            &SampleConfig {
                max_summands,
                max_param,
            },
        ),
    }
}

fn validate(io: &mut Io, file: &str, json: bool) -> Outcome {
    let data = io.read_data(file)?;
    let report = validate_all(&data);
    let text = if json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        format!("{report}\n")
    };
    io.print(&text)?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAIL })
}

fn reduce(io: &mut Io, file: &str, cert_path: Option<&Path>, quiet: bool) -> Outcome {
    let data = io.read_data(file)?;
    let cert = reduce_to_empty(&data).map_err(|e| {
        let code = match e {
            ReduceError::InvalidInput(_) => EXIT_FAIL,
            _ => EXIT_NOT_REALIZABLE,
        };
        Failure::new(code, e.to_string())
    })?;
    let json = certificate_to_json(&cert);
    match cert_path {
        Some(path) => {
            io.emit(&json, Some(path))?;
            if !quiet {
                let mut summary = format!(
                    "reduced {} points to the empty set in {} steps\n",
                    data.len(),
                    cert.steps.len()
                );
                for (i, s) in cert.steps.iter().enumerate() {
                    summary.push_str(&format!("{:>4}. {s}\n", i + 1));
                }
                io.print(&summary)?;
            }
        }
        None if !quiet => io.print(&json)?,
        None => {}
    }
    Ok(EXIT_OK)
}

fn verify(io: &mut Io, path: &str) -> Outcome {
    let text = io.read(path)?;
    let cert = certificate_from_json(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{path}: {e}")))?;
    match check_certificate(&cert) {
        Ok(()) => {
            io.print(&format!("certificate verified: {} steps\n", cert.steps.len()))?;
            Ok(EXIT_OK)
        }
        Err(why) => {
            io.print(&format!("certificate rejected: {why}\n"))?;
            Ok(EXIT_FAIL)
        }
    }
}

fn generate(io: &mut Io, g: GenCommand) -> Outcome {
    let (label, out) = match g {
        GenCommand::S6 { a, b, c, out } => (GeneratorLabel::new(Family::S6, vec![a, b, c], false), out),
        GenCommand::Cp3 { a, b, c, out } => (GeneratorLabel::new(Family::Cp3, vec![a, b, c], false), out),
        GenCommand::Zn { n, a, b, c, out } => {
            let data = s1data::generators::gen_zn(n, a, b, c)
                .map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?;
            return write_generated(io, data, &out);
        }
        GenCommand::Z2sum { a, e, out } => (GeneratorLabel::new(Family::Z2Sum, vec![a, e], false), out),
    };
    let data = label.data().map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?;
    write_generated(io, data, &out)
}

fn write_generated(io: &mut Io, data: FixedPointData, out: &GenOutput) -> Outcome {
    let data = if out.reverse {
        data.reverse_orientation()
    } else {
        data
    };
    io.emit(&print_data(&data), out.output.as_deref())?;
    Ok(EXIT_OK)
}

fn parse_pair(text: &str) -> Result<(FixedPoint, FixedPoint), Failure> {
    let usage = |why: String| Failure::new(EXIT_USAGE, format!("--pair `{text}`: {why}"));
    let (l, r) = text
        .split_once('=')
        .ok_or_else(|| usage("expected two points separated by `=`".into()))?;
    Ok((parse_point(l).map_err(usage)?, parse_point(r).map_err(usage)?))
}

fn connect(io: &mut Io, f1: &str, f2: &str, pairs: &[String], output: Option<&Path>) -> Outcome {
    let pairs: Vec<_> = pairs.iter().map(|p| parse_pair(p)).collect::<Result<_, _>>()?;
    let m = io.read_data(f1)?;
    let n = io.read_data(f2)?;
    let sum = connected_sum(&m, &n, &pairs).map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?;
    io.emit(&print_data(&sum), output)?;
    Ok(EXIT_OK)
}

fn fuzz(io: &mut Io, seed: u64, iterations: u64, cfg: &SampleConfig) -> Outcome {
    if cfg.max_summands == 0 || cfg.max_param == 0 {
        return Err(Failure::new(
            EXIT_USAGE,
            "--max-summands and --max-param must be positive",
        ));
    }
    let outcomes: Vec<_> = (0..iterations)
        .into_par_iter()
        .map(|i| fuzz_iteration(seed, i, cfg))
        .collect();
    let mut report = String::new();
    let mut failures = 0;
    let mut steps = 0;
    for o in &outcomes {
        match &o.result {
            Ok(n) => steps += n,
            Err(why) => {
                failures += 1;
                let labels: Vec<String> = o.summands.iter().map(|g| g.to_string()).collect();
                report.push_str(&format!(
                    "iteration {} FAILED: {why}\n  summands: {}\n  data: {}\n",
                    o.index,
                    labels.join(" # "),
                    o.data
                ));
            }
        }
    }
    report.push_str(&format!(
        "fuzz seed {seed}: {} iterations, {} passed, {failures} failed, {steps} steps in total\n",
        iterations,
        iterations - failures
    ));
    io.print(&report)?;
    Ok(if failures == 0 { EXIT_OK } else { EXIT_FAIL })
}
