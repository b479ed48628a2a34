//! qjones: exact colored Jones values for the figure-eight knot and its
//! (r,2)-cables, annihilator certificates, and the supporting probe suites.
//! Reports are byte-stable JSON/CSV; exit codes: 0 pass, 1 a mathematical
//! check failed, 2 usage error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use qjones::apoly::{self, ApolyError};
use qjones::jones::{self, JonesError, JonesSequence};
use qjones::laurent::LaurentPoly1;
use qjones::probes::{self, ProbeError};
use qjones::recurrence::{self, RecurrenceError};
use qjones::serial;

#[derive(Parser)]
#[command(
    name = "qjones",
    version,
    about = "Exact colored Jones computations for the figure-eight knot and its (r,2)-cables"
)]
struct Cli {
    /// Worker threads for parallel checks (default: all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Also write the report to this file
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Accepted for script compatibility; the demo sequences are always available
    #[arg(long, global = true, hide = true)]
    seed_demo: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print one colored Jones value as polynomial JSON
    Jones {
        /// Color n (any integer; J(-n) = -J(n) and J(0) = 0)
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        /// Evaluate the (r,2)-cable for this odd framing instead of the knot itself
        #[arg(
            long,
            value_name = "R",
            allow_negative_numbers = true,
            conflicts_with = "odd"
        )]
        cable: Option<i64>,
        /// Evaluate the odd subsequence J_E(2n+1)
        #[arg(long)]
        odd: bool,
    },
    /// Build the annihilator S for cable(r) and compare eps(S) with the A-polynomial
    CheckAj {
        /// Cable framing (odd)
        #[arg(long, allow_negative_numbers = true)]
        r: i64,
        /// Verify S annihilates the cable for n = 1..=n-check
        #[arg(long, default_value_t = 12)]
        n_check: i64,
    },
    /// Run a named invariant suite
    Verify {
        #[arg(long, value_enum)]
        which: Suite,
        /// Cable framing for the cable-step and symmetry suites
        #[arg(long, default_value_t = 9, allow_negative_numbers = true)]
        r: i64,
        /// Upper end of the n range (suite-specific default)
        #[arg(long, value_name = "N")]
        n_max: Option<i64>,
        /// Framings for the degrees sweep
        #[arg(
            long,
            value_name = "R,R,...",
            allow_hyphen_values = true,
            default_value = "5,-5,7,-7,9,-9,11,-11,13,-13"
        )]
        r_list: String,
    },
    /// Search for annihilating operators within explicit bounds
    Guess {
        /// Sequence: fig8, odd-fig8, qint, const, demo-exp, or cable:R
        #[arg(long)]
        seq: String,
        /// Maximum L-degree
        #[arg(long)]
        ldeg: i64,
        /// M-exponent window "lo:hi"
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        /// Sample range "lo:hi"
        #[arg(long, allow_hyphen_values = true)]
        n: String,
    },
    /// Floating-point and combinatorial probes
    #[command(subcommand)]
    Probe(Probe),
}

#[derive(Subcommand)]
enum Probe {
    /// Melvin-Morton limit: J_E(n)/[n] at u = z^(1/n) versus 1/Delta_E(z)
    Mm {
        /// Complex z, e.g. "0.5", "2", "0.5+0.5i" (0 and +-1 excluded)
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Colors to sample
        #[arg(long, value_name = "N,N,...")]
        n: String,
    },
    /// Quadratic breadth fit: prints "a,b,c" with br = a n^2 + b n + c
    Breadth {
        /// Sequence: fig8, odd-fig8, qint, const, demo-exp, or cable:R
        #[arg(long)]
        seq: String,
        /// Sample range "lo:hi"
        #[arg(long, allow_hyphen_values = true)]
        n: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Cm,
    Factorization,
    CableStep,
    Symmetry,
    Degrees,
    Breadth,
}

struct Outcome {
    text: String,
    pass: bool,
}

enum Failure {
    /// exit 1
    Math(String),
    /// exit 2
    Usage(String),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl From<JonesError> for Failure {
    fn from(e: JonesError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<RecurrenceError> for Failure {
    fn from(e: RecurrenceError) -> Self {
        match &e {
            RecurrenceError::EvenR
            | RecurrenceError::InsufficientSamples { .. }
            | RecurrenceError::Jones(_) => Failure::Usage(e.to_string()),
            _ => Failure::Math(e.to_string()),
        }
    }
}

impl From<ApolyError> for Failure {
    fn from(e: ApolyError) -> Self {
        match e {
            ApolyError::EvenR => Failure::Usage(e.to_string()),
            ApolyError::Recurrence(inner) => inner.into(),
            other => Failure::Math(other.to_string()),
        }
    }
}

impl From<ProbeError> for Failure {
    fn from(e: ProbeError) -> Self {
        match &e {
            ProbeError::ExcludedZ(_) | ProbeError::TooFewPoints { .. } | ProbeError::Jones(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Math(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        // one pool per process; a second build_global is a no-op error
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if let Some(path) = &cli.output {
                if let Err(e) = fs::write(path, &out.text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Jones { n, cable, odd } => cmd_jones(*n, *cable, *odd),
        Command::CheckAj { r, n_check } => cmd_check_aj(*r, *n_check),
        Command::Verify {
            which,
            r,
            n_max,
            r_list,
        } => cmd_verify(*which, *r, *n_max, r_list),
        Command::Guess {
            seq,
            ldeg,
            window,
            n,
        } => cmd_guess(seq, *ldeg, window, n),
        Command::Probe(Probe::Mm { z, n }) => cmd_probe_mm(z, n),
        Command::Probe(Probe::Breadth { seq, n }) => cmd_probe_breadth(seq, n),
    }
}

fn stable(v: &Value, pass: bool) -> Outcome {
    Outcome {
        text: serial::to_stable_string(v),
        pass,
    }
}

fn cmd_jones(n: i64, cable: Option<i64>, odd: bool) -> Result<Outcome, Failure> {
    let poly = match cable {
        Some(r) => (*JonesSequence::cable(r)?.eval(n)).clone(),
        None if odd => jones::odd_jones(n),
        None => jones::jones_fig8(n),
    };
    Ok(stable(&serial::poly1_to_json(&poly), true))
}

fn cmd_check_aj(r: i64, n_check: i64) -> Result<Outcome, Failure> {
    if r % 2 == 0 {
        return Err(usage("cable framing r must be odd"));
    }
    if n_check < 1 {
        return Err(usage("--n-check must be at least 1"));
    }
    let cert = recurrence::build_s(r, n_check)?;
    let report = apoly::report_for_certificate(&cert)?;
    let pass = report.proportional && report.failures.is_empty();
    let mut doc = serial::aj_report_to_json(&report);
    // build_s already verified annihilation on the checked range
    doc["certificate"] = serial::certificate_to_json(&cert, true);
    Ok(stable(&doc, pass))
}

fn cmd_verify(which: Suite, r: i64, n_max: Option<i64>, r_list: &str) -> Result<Outcome, Failure> {
    match which {
        Suite::Cm => suite_cm(),
        Suite::Factorization => suite_factorization(),
        Suite::CableStep => suite_cable_step(r, n_max.unwrap_or(10)),
        Suite::Symmetry => suite_symmetry(r, n_max.unwrap_or(10)),
        Suite::Degrees => suite_degrees(r_list, n_max.unwrap_or(8)),
        Suite::Breadth => suite_breadth(n_max.unwrap_or(10)),
    }
}

fn suite_cm() -> Result<Outcome, Failure> {
    let fig8 = JonesSequence::fig8();
    let cm = recurrence::cm_operator();
    let fit = recurrence::fit_inhomogeneous(&cm, &fig8, (-10, 10), 3, 5)?;
    // rho/den at M = 1 must equal 2(t^-2 - t^2), cross-multiplied to stay exact
    let expected = &LaurentPoly1::from_terms([(-2, 2), (2, -2)]) * &fit.den;
    let rho_ok = fit.rho.spec_m(0) == expected;
    let doc = json!({
        "suite": "cm",
        "fit": serial::fit_to_json(&fit),
        "rho_at_m_one_matches": rho_ok,
        "pass": rho_ok,
    });
    Ok(stable(&doc, rho_ok))
}

fn suite_factorization() -> Result<Outcome, Failure> {
    let (pass, detail) = match recurrence::build_q() {
        Ok(_) => (true, Value::Null),
        Err(RecurrenceError::FactorizationMismatch(d)) => (false, Value::String(d)),
        Err(e) => return Err(e.into()),
    };
    let doc = json!({
        "suite": "factorization",
        "detail": detail,
        "pass": pass,
    });
    Ok(stable(&doc, pass))
}

fn suite_cable_step(r: i64, n_max: i64) -> Result<Outcome, Failure> {
    let base = JonesSequence::fig8();
    let mut failures = Vec::new();
    for n in 1..=n_max {
        let direct = jones::cable_jones(r, n + 1, &base)?;
        let step = jones::cable_step(r, n, &base)?;
        if direct != step {
            failures.push(n);
        }
    }
    let pass = failures.is_empty();
    let doc = json!({
        "suite": "cable-step",
        "r": r,
        "checked": (1..=n_max).collect::<Vec<i64>>(),
        "failures": failures,
        "pass": pass,
    });
    Ok(stable(&doc, pass))
}

fn suite_symmetry(r: i64, n_max: i64) -> Result<Outcome, Failure> {
    let mut failures: Vec<String> = Vec::new();
    for n in 0..=n_max {
        if jones::jones_fig8(-n) != -&jones::jones_fig8(n) {
            failures.push(format!("fig8 n={n}"));
        }
    }
    // the odd-subsequence image of J(-n) = -J(n): J_E(2n-1) + J_E(1-2n) = 0
    for n in -5..=5 {
        if !(&jones::odd_jones(n - 1) + &jones::odd_jones(-n)).is_zero() {
            failures.push(format!("odd-fig8 n={n}"));
        }
    }
    let cable = JonesSequence::cable(r)?;
    for n in 0..=n_max.min(6) {
        if *cable.eval(-n) != -&*cable.eval(n) {
            failures.push(format!("cable({r}) n={n}"));
        }
    }
    let pass = failures.is_empty();
    let doc = json!({
        "suite": "symmetry",
        "r": r,
        "failures": failures,
        "pass": pass,
    });
    Ok(stable(&doc, pass))
}

fn suite_degrees(r_list: &str, n_max: i64) -> Result<Outcome, Failure> {
    let rs = parse_comma_i64(r_list, "--r-list")?;
    if rs.is_empty() {
        return Err(usage("--r-list must name at least one framing"));
    }
    let rows = probes::degree_sweep(&rs, n_max)?;
    let pass = rows.iter().all(|row| row.matches);
    Ok(Outcome {
        text: serial::sweep_to_csv(&rows),
        pass,
    })
}

fn suite_breadth(n_max: i64) -> Result<Outcome, Failure> {
    let ns: Vec<i64> = (1..=n_max).collect();
    let odd = probes::breadth_fit(&JonesSequence::odd_fig8(), &ns)?;
    let fig = probes::breadth_fit(&JonesSequence::fig8(), &ns)?;
    let konst = probes::breadth_fit(&const_seq(), &(1..=6).collect::<Vec<i64>>())?;
    let pass = odd == (32, 24, 0) && fig == (8, -4, -4) && konst == (0, 0, 0);
    let doc = json!({
        "suite": "breadth",
        "odd_fig8": {"fit": [odd.0, odd.1, odd.2], "expected": [32, 24, 0]},
        "fig8": {"fit": [fig.0, fig.1, fig.2], "expected": [8, -4, -4]},
        "const": {"fit": [konst.0, konst.1, konst.2], "expected": [0, 0, 0]},
        "pass": pass,
    });
    Ok(stable(&doc, pass))
}

fn cmd_guess(seq_desc: &str, ldeg: i64, window: &str, n: &str) -> Result<Outcome, Failure> {
    if ldeg < 0 {
        return Err(usage("--ldeg must be nonnegative"));
    }
    let seq = parse_seq(seq_desc)?;
    let (wlo, whi) = parse_range(window, "--window")?;
    let (nlo, nhi) = parse_range(n, "--n")?;
    let samples: Vec<i64> = (nlo..=nhi).collect();
    let outcome = recurrence::guess_with_outcome(&seq, ldeg, (wlo, whi), &samples)?;
    let candidates: Vec<Value> = outcome
        .candidates
        .iter()
        .map(serial::operator_to_json)
        .collect();
    let doc = json!({
        "seq": seq.descriptor(),
        "bounds": {
            "l_degree": outcome.l_degree,
            "window": [outcome.window.0, outcome.window.1],
            "samples": [nlo, nhi],
        },
        "unknowns": outcome.unknowns,
        "holdout": [outcome.holdout.first(), outcome.holdout.last()],
        "method": outcome.method.label(),
        "result": if candidates.is_empty() { "none" } else { "candidates" },
        "candidates": candidates,
    });
    // absence of candidates is a result, not an error
    Ok(stable(&doc, true))
}

fn cmd_probe_mm(z_str: &str, n_str: &str) -> Result<Outcome, Failure> {
    let z = parse_complex(z_str)
        .ok_or_else(|| usage(format!("--z: cannot parse {z_str:?} as a complex number")))?;
    let ns = parse_comma_i64(n_str, "--n")?;
    let res = probes::mm_probe(z, &ns)?;
    Ok(stable(&serial::mm_probe_to_json(&res), true))
}

fn cmd_probe_breadth(seq_desc: &str, n: &str) -> Result<Outcome, Failure> {
    let seq = parse_seq(seq_desc)?;
    let (lo, hi) = parse_range(n, "--n")?;
    let ns: Vec<i64> = (lo..=hi).collect();
    let (a, b, c) = probes::breadth_fit(&seq, &ns)?;
    Ok(Outcome {
        text: format!("{a},{b},{c}\n"),
        pass: true,
    })
}

fn const_seq() -> JonesSequence {
    JonesSequence::custom("const", |_| LaurentPoly1::one())
}

fn demo_exp() -> JonesSequence {
    // t^(n^2+n), annihilated by L - t^2 M
    JonesSequence::custom("demo-exp", |n| LaurentPoly1::monomial(n * n + n))
}

fn parse_seq(desc: &str) -> Result<JonesSequence, Failure> {
    match desc {
        "fig8" => Ok(JonesSequence::fig8()),
        "odd-fig8" => Ok(JonesSequence::odd_fig8()),
        "qint" => Ok(JonesSequence::quantum_integer()),
        "const" => Ok(const_seq()),
        "demo-exp" => Ok(demo_exp()),
        _ => match desc.strip_prefix("cable:") {
            Some(rs) => {
                let r: i64 = rs
                    .parse()
                    .map_err(|_| usage(format!("bad framing in sequence {desc:?}")))?;
                Ok(JonesSequence::cable(r)?)
            }
            None => Err(usage(format!(
                "unknown sequence {desc:?}; expected fig8, odd-fig8, qint, const, demo-exp, or cable:R"
            ))),
        },
    }
}

fn parse_range(s: &str, flag: &str) -> Result<(i64, i64), Failure> {
    let Some((lo, hi)) = s.split_once(':') else {
        return Err(usage(format!("{flag} expects lo:hi, got {s:?}")));
    };
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|_| usage(format!("{flag}: bad integer in {s:?}")))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|_| usage(format!("{flag}: bad integer in {s:?}")))?;
    if hi < lo {
        return Err(usage(format!("{flag}: empty range {s:?}")));
    }
    Ok((lo, hi))
}

fn parse_comma_i64(s: &str, flag: &str) -> Result<Vec<i64>, Failure> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| usage(format!("{flag}: bad integer {p:?}")))
        })
        .collect()
}

/// "a", "bi", "a+bi", "a-bi", with bare "i"/"-i" for unit imaginary parts.
fn parse_complex(s: &str) -> Option<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix(['i', 'I']) else {
        return s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().ok()?;
            let im = parse_signed_unit(&body[k..])?;
            Some(Complex64::new(re, im))
        }
        None => Some(Complex64::new(0.0, parse_signed_unit(body)?)),
    }
}

fn parse_signed_unit(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => s.parse().ok(),
    }
}
