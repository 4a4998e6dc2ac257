//! The `powcirc` command line.
//!
//! Exit codes: 0 success, 1 I/O error, 2 usage error, 3 unsupported
//! parameters, 4 invalid circuit file, 5 algorithm or verification failure.
//! Diagnostics go to the error stream; regular output is byte-stable.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;

use super::{parse_circuit, CircuitDoc, OracleHandle};
use crate::error::Error;
use crate::field::{FpElem, PrimeField};
use crate::hitting::{min_field_prime, pit_test, HittingSet, Verdict};
use crate::reconstruct::{reconstruct_multivariate_with_report, reconstruct_univariate, Profile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_INVALID_INPUT: i32 = 4;
pub const EXIT_FAILURE: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "powcirc", version, about = "Identity testing and reconstruction for sums of powers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the circuit in a file computes the zero polynomial.
    Pit {
        file: PathBuf,
        /// Hitting-set parameter as a/b with 0 < a/b <= 1/2.
        #[arg(long, value_parser = parse_ratio, default_value = "1/2")]
        eps: Ratio<u64>,
    },
    /// Recover a circuit using only evaluations of the one in a file.
    Reconstruct {
        file: PathBuf,
        /// Write the recovered circuit here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `expand` compares full expansions, `sample:<k>` compares values
        /// at k fixed points, `none` skips the check.
        #[arg(long, value_parser = parse_verify, default_value = "expand")]
        verify: Verify,
        #[arg(long, value_enum, default_value_t = ProfileArg::Fast)]
        profile: ProfileArg,
        /// Worker threads; defaults to POWCIRC_JOBS or 1.
        #[arg(long)]
        jobs: Option<usize>,
        /// Also require the recovered term list to equal the file's.
        #[arg(long)]
        cheat_verify: bool,
    },
    /// Write the hitting set for the given parameters.
    HittingSet {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long, value_parser = parse_ratio, default_value = "1/2")]
        eps: Ratio<u64>,
        /// Field modulus; defaults to the smallest valid prime.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a small built-in suite of end-to-end checks.
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Fast,
    Theorem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Verify {
    Expand,
    Sample(usize),
    None,
}

fn parse_ratio(s: &str) -> Result<Ratio<u64>, String> {
    let (a, b) = s.split_once('/').ok_or_else(|| format!("expected a/b, got `{s}`"))?;
    let a: u64 = a.parse().map_err(|_| format!("bad numerator `{a}`"))?;
    let b: u64 = b.parse().map_err(|_| format!("bad denominator `{b}`"))?;
    if b == 0 {
        return Err("zero denominator".into());
    }
    Ok(Ratio::new(a, b))
}

fn parse_verify(s: &str) -> Result<Verify, String> {
    match s {
        "expand" => Ok(Verify::Expand),
        "none" => Ok(Verify::None),
        _ => {
            let k = s
                .strip_prefix("sample:")
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| format!("expected expand, none or sample:<k>, got `{s}`"))?;
            Ok(Verify::Sample(k))
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsupportedParameters(_) | Error::UnsupportedField { .. } => EXIT_UNSUPPORTED,
        _ => EXIT_FAILURE,
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure { code: EXIT_IO, message: format!("writing output: {e}") })
}

fn read_doc(path: &Path) -> Result<CircuitDoc, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    parse_circuit(&text).map_err(|e| Failure {
        code: EXIT_INVALID_INPUT,
        message: format!("{}:{e}", path.display()),
    })
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Pit { file, eps } => run_pit(&file, eps, out),
        Command::Reconstruct { file, out: target, verify, profile, jobs, cheat_verify } => {
            let profile = match profile {
                ProfileArg::Fast => Profile::Fast,
                ProfileArg::Theorem => Profile::Theorem,
            };
            run_reconstruct(&file, target.as_deref(), verify, profile, jobs, cheat_verify, out)
        }
        Command::HittingSet { n, r, s, d, delta, eps, p, out: target } => {
            run_hitting_set(n, r, s, d, delta, eps, p, target.as_deref(), out)
        }
        Command::Selftest => run_selftest(out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn format_point(pt: &[FpElem]) -> String {
    let parts: Vec<String> = pt.iter().map(|x| x.value().to_string()).collect();
    format!("({})", parts.join(","))
}

fn run_pit(file: &Path, eps: Ratio<u64>, out: &mut dyn Write) -> Result<(), Failure> {
    let doc = read_doc(file)?;
    let (r, s, delta) = doc.bounds();
    let hs = HittingSet::build(doc.field, doc.n, r, s, doc.d, delta, eps)?;
    let oracle = OracleHandle::from_circuit(doc.to_circuit());
    let line = match pit_test(&hs, |pt| oracle.eval(pt))? {
        Verdict::Zero => "ZERO\n".to_string(),
        Verdict::NonZero { point, value } => format!("NONZERO at={} value={}\n", format_point(&point), value),
    };
    write_out(out, &line)
}

fn jobs_from_env(jobs: Option<usize>) -> Result<usize, Failure> {
    let n = match jobs {
        Some(n) => n,
        None => match std::env::var("POWCIRC_JOBS") {
            Ok(v) => v.trim().parse().map_err(|_| Failure {
                code: EXIT_USAGE,
                message: format!("POWCIRC_JOBS must be a positive integer, got `{v}`"),
            })?,
            Err(_) => 1,
        },
    };
    if n == 0 {
        return Err(Failure { code: EXIT_USAGE, message: "jobs must be positive".into() });
    }
    Ok(n)
}

/// Deterministic sample points for `--verify sample:<k>`.
fn sample_points(field: PrimeField, n: usize, k: usize) -> Vec<Vec<FpElem>> {
    let mut state = 0x5eed_u64;
    let mut next = || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    (0..k).map(|_| (0..n).map(|_| field.elem(next() % field.modulus())).collect()).collect()
}

#[allow(clippy::too_many_arguments)]
fn run_reconstruct(
    file: &Path,
    target: Option<&Path>,
    verify: Verify,
    profile: Profile,
    jobs: Option<usize>,
    cheat_verify: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let doc = read_doc(file)?;
    let (r, s, delta) = doc.bounds();
    let jobs = jobs_from_env(jobs)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure { code: EXIT_FAILURE, message: format!("thread pool: {e}") })?;
    let planted = doc.to_circuit();
    let oracle = OracleHandle::from_circuit(planted.clone());
    let (field, n, d) = (doc.field, doc.n, doc.d);
    let recovered = pool.install(|| {
        reconstruct_multivariate_with_report(field, &|pt: &[FpElem]| oracle.eval(pt), n, r, s, delta, d, profile)
    })?;
    let (circuit, _) = recovered;
    let calls = oracle.calls();

    match verify {
        Verify::Expand => {
            if circuit.expand() != planted.expand() {
                return Err(Failure { code: EXIT_FAILURE, message: "verification failed: expansions differ".into() });
            }
        }
        Verify::Sample(k) => {
            for pt in sample_points(field, n, k) {
                if circuit.eval(&pt)? != planted.eval(&pt)? {
                    return Err(Failure {
                        code: EXIT_FAILURE,
                        message: format!("verification failed at {}", format_point(&pt)),
                    });
                }
            }
        }
        Verify::None => {}
    }
    if cheat_verify && circuit != planted {
        return Err(Failure { code: EXIT_FAILURE, message: "cheat verification failed: term lists differ".into() });
    }

    let result = CircuitDoc::from_circuit(&circuit, doc.r, doc.s, doc.delta).serialize();
    let summary = format!("OK terms={} oracle_calls={calls}\n", circuit.len());
    match target {
        Some(path) => {
            std::fs::write(path, result).map_err(|e| io_failure(path, e))?;
            write_out(out, &summary)
        }
        None => {
            write_out(out, &summary)?;
            write_out(out, &result)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_hitting_set(
    n: usize,
    r: usize,
    s: usize,
    d: usize,
    delta: usize,
    eps: Ratio<u64>,
    p: Option<u64>,
    target: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let p = match p {
        Some(p) => p,
        None => min_field_prime(n, r, s, d, delta, eps)?,
    };
    let field = PrimeField::new(p)?;
    let hs = HittingSet::build(field, n, r, s, d, delta, eps)?;
    let mut buf = Vec::new();
    hs.write_to(&mut buf).expect("writing to memory");
    match target {
        Some(path) => std::fs::write(path, buf).map_err(|e| io_failure(path, e)),
        None => out
            .write_all(&buf)
            .map_err(|e| Failure { code: EXIT_IO, message: format!("writing output: {e}") }),
    }
}

fn run_selftest(out: &mut dyn Write) -> Result<(), Failure> {
    let checks: [(&str, fn() -> Result<bool, Error>); 4] = [
        ("univariate two-term round trip", selftest_univariate),
        ("multivariate two-term round trip", selftest_multivariate),
        ("identity test on zero and nonzero circuits", selftest_pit),
        ("circuit file round trip", selftest_format),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let ok = check().unwrap_or(false);
        if !ok {
            failed += 1;
        }
        write_out(out, &format!("{} {name}\n", if ok { "ok  " } else { "FAIL" }))?;
    }
    if failed > 0 {
        return Err(Failure { code: EXIT_FAILURE, message: format!("{failed} selftest check(s) failed") });
    }
    write_out(out, "selftest passed\n")
}

const SELFTEST_DOC: &str = "field p=1481\nparams n=2 d=82 r=2 s=2 delta=1\nterm coeff=2 poly=1*x1+1*x2\nterm coeff=3 poly=1*x1+2*x2\n";

fn selftest_univariate() -> Result<bool, Error> {
    use crate::poly::UniPoly;
    let f = PrimeField::new(331)?;
    let g = &UniPoly::x(f).pow(82).scale(f.elem(2)) + &UniPoly::linear(f, 1).pow(82).scale(f.elem(3));
    Ok(reconstruct_univariate(&g, 2, 82, 1)?.expand() == g)
}

fn selftest_multivariate() -> Result<bool, Error> {
    let doc = parse_circuit(SELFTEST_DOC).map_err(|e| Error::Parameter(e.to_string()))?;
    let planted = doc.to_circuit();
    let oracle = |pt: &[FpElem]| planted.eval(pt);
    let (c, _) = reconstruct_multivariate_with_report(doc.field, &oracle, 2, 2, 2, 1, 82, Profile::Fast)?;
    Ok(c == planted)
}

fn selftest_pit() -> Result<bool, Error> {
    let eps = Ratio::new(1, 2);
    let p = min_field_prime(2, 2, 2, 3, 1, eps)?;
    let field = PrimeField::new(p)?;
    let hs = HittingSet::build(field, 2, 2, 2, 3, 1, eps)?;
    let zero = pit_test(&hs, |_| Ok(field.zero()))? == Verdict::Zero;
    let nonzero = matches!(pit_test(&hs, |pt| Ok(pt[0] + pt[1]))?, Verdict::NonZero { .. });
    Ok(zero && nonzero)
}

fn selftest_format() -> Result<bool, Error> {
    let doc = parse_circuit(SELFTEST_DOC).map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(doc.serialize() == SELFTEST_DOC && doc.canonical() == doc)
}
