//! The `polytc` command line.
//!
//! Exit codes: 0 success, 1 verification failure or failed certificate,
//! 2 usage or domain error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::certifier::{
    build_witness, certify_lower, check_vanishing, evaluate_witness_with,
    replay_certificate, zdcl, Certificate, VanishingOptions, VanishingReport, DEFAULT_SEED,
    EXHAUSTIVE_MAX_N, RANDOM_MAX_N,
};
use crate::error::{Error, Result};
use crate::oracle::{cross_check, ORACLE_MAX_N};
use crate::parity::{
    binom_mod2, decompose, normalize_length, valid_pairs, verify_bclem, verify_techlem, Length,
    ParamDecomp, ProofCase,
};
use crate::ring::{CohomologyRing, Functional, FunctionalKind};

/// Graded dimensions are only computed up to this `n` in reports.
pub const DIMS_MAX_N: u32 = 14;

const CSV_HEADER: &str = "n,k,t,k0,B,D,C,case,zdcl,tc_lower,tc_upper,evaluation";

#[derive(Parser, Debug)]
#[command(
    name = "polytc",
    version,
    about = "Certified topological complexity bounds for planar polygon spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decomposition, witness certificate and TC bounds for one space.
    Report(ReportArgs),
    /// One row per valid (n, k) up to --n-max.
    Sweep {
        #[arg(long)]
        n_max: u32,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run a property suite; exit 0 iff everything passes.
    Verify(VerifyArgs),
    /// Zero-divisor cup length with certificate and vanishing report files.
    Zdcl {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Where the certificate and vanishing report are written.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Certificate tools.
    Certificate {
        #[command(subcommand)]
        action: CertificateAction,
    },
}

#[derive(Subcommand, Debug)]
enum CertificateAction {
    /// Replay a certificate file.
    Verify { file: PathBuf },
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, conflicts_with = "r", required_unless_present = "r")]
    k: Option<u32>,
    /// Length of the long side, instead of --k.
    #[arg(long)]
    r: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Also evaluate the plain (PHI1, PHI2) pairing; informational only.
    #[arg(long)]
    experimental_phi12: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Oracle comparisons per pair.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    force: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Functionals,
    Lemmas,
    Oracle,
    Vanishing,
    All,
}

enum Failure {
    Verification(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let result = match cli.command {
        Command::Report(a) => report(a, out),
        Command::Sweep { n_max, format } => sweep(n_max, format, out),
        Command::Verify(a) => verify(a, out, err),
        Command::Zdcl {
            n,
            k,
            samples,
            seed,
            out_dir,
            force,
        } => zdcl_cmd(n, k, samples, seed, force, out_dir, out, err),
        Command::Certificate {
            action: CertificateAction::Verify { file },
        } => certificate_verify(file, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(err, "FAILED: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

#[derive(Serialize)]
struct Report {
    params: ParamDecomp,
    #[serde(skip_serializing_if = "Option::is_none")]
    dims: Option<Vec<usize>>,
    certificate: Certificate,
    certificate_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    experimental_phi1_phi2: Option<u8>,
}

fn csv_row(p: &ParamDecomp, c: &Certificate) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        p.n, p.k, p.t, p.k0, p.b, p.d, p.c, p.case, c.zdcl_lower, c.tc_lower, c.tc_upper,
        c.evaluation
    )
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    writeln!(out, "{text}")
}

fn report(a: ReportArgs, out: &mut dyn Write) -> CliResult {
    let k = match (a.k, &a.r) {
        (Some(k), _) => k,
        (None, Some(r)) => normalize_length(a.n, Length::Decimal(r))?,
        (None, None) => unreachable!("clap requires --k or --r"),
    };
    let p = decompose(a.n, k)?;
    let certificate = certify_lower(a.n, k)?;
    let dims = (a.n <= DIMS_MAX_N).then(|| CohomologyRing::new(a.n, k).map(|r| r.dims()));
    let dims = dims.transpose()?;
    let experimental = if a.experimental_phi12 {
        let w = build_witness(&p);
        let v = evaluate_witness_with(&w, (FunctionalKind::Phi1, FunctionalKind::Phi2))?;
        Some(v.value as u8)
    } else {
        None
    };
    let r = Report {
        certificate_id: certificate.id(),
        params: p,
        dims,
        certificate,
        experimental_phi1_phi2: experimental,
    };
    match a.format {
        Format::Json => json_line(out, &r)?,
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            writeln!(out, "{}", csv_row(&r.params, &r.certificate))?;
        }
        Format::Table => write_report_table(out, &r)?,
    }
    if r.certificate.passed() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "witness for n={} k={} evaluates to 0",
            r.params.n, r.params.k
        )))
    }
}

fn write_report_table(out: &mut dyn Write, r: &Report) -> std::io::Result<()> {
    let p = &r.params;
    let c = &r.certificate;
    writeln!(out, "space        M(n={}, k={})  dimension {}", p.n, p.k, p.n - 3)?;
    write!(
        out,
        "decomposition t={} k0={} B={} D={} C={}",
        p.t, p.k0, p.b, p.d, p.c
    )?;
    for (name, v) in [("ell", p.ell), ("A", p.a), ("gamma", p.gamma), ("m", p.m)] {
        if let Some(v) = v {
            write!(out, " {name}={v}")?;
        }
    }
    writeln!(out)?;
    writeln!(out, "case         {}", p.case)?;
    if let Some(d) = &r.dims {
        let d: Vec<String> = d.iter().map(|x| x.to_string()).collect();
        writeln!(out, "dims         [{}]", d.join(", "))?;
    }
    let factors: Vec<String> = c
        .factors
        .iter()
        .map(|(g, i, e)| {
            let name = if g == "R" { "R".to_string() } else { format!("V{i}") };
            format!("({name}x1+1x{name})^{e}")
        })
        .collect();
    writeln!(out, "witness      {}", factors.join(" "))?;
    writeln!(
        out,
        "functionals  {} x {}  evaluation {}",
        c.functionals[0], c.functionals[1], c.evaluation
    )?;
    if let Some(v) = r.experimental_phi1_phi2 {
        writeln!(out, "experimental PHI1 x PHI2 evaluation {v}")?;
    }
    writeln!(out, "zdcl         >= {}", c.zdcl_lower)?;
    writeln!(out, "TC           {} <= TC <= {}", c.tc_lower, c.tc_upper)?;
    writeln!(out, "certificate  {} ({})", r.certificate_id, if c.passed() { "PASS" } else { "FAILED" })
}

#[derive(Serialize)]
struct SweepRow {
    n: u32,
    k: u32,
    t: u32,
    k0: u32,
    #[serde(rename = "B")]
    b: u32,
    #[serde(rename = "D")]
    d: u32,
    #[serde(rename = "C")]
    c: u32,
    case: ProofCase,
    zdcl: u32,
    tc_lower: u32,
    tc_upper: u32,
    evaluation: u8,
}

fn sweep(n_max: u32, format: Format, out: &mut dyn Write) -> CliResult {
    let rows = valid_pairs(n_max)
        .into_par_iter()
        .map(|(n, k)| {
            let p = decompose(n, k)?;
            let c = certify_lower(n, k)?;
            Ok((p, c))
        })
        .collect::<Result<Vec<_>>>()?;
    match format {
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for (p, c) in &rows {
                writeln!(out, "{}", csv_row(p, c))?;
            }
        }
        Format::Json => {
            let json_rows: Vec<SweepRow> = rows
                .iter()
                .map(|(p, c)| SweepRow {
                    n: p.n,
                    k: p.k,
                    t: p.t,
                    k0: p.k0,
                    b: p.b,
                    d: p.d,
                    c: p.c,
                    case: p.case,
                    zdcl: c.zdcl_lower,
                    tc_lower: c.tc_lower,
                    tc_upper: c.tc_upper,
                    evaluation: c.evaluation,
                })
                .collect();
            json_line(out, &json_rows)?;
        }
        Format::Table => {
            writeln!(
                out,
                "{:>4} {:>4} {:<15} {:>5} {:>8} {:>8} {:>4}",
                "n", "k", "case", "zdcl", "tc_lower", "tc_upper", "eval"
            )?;
            for (p, c) in &rows {
                writeln!(
                    out,
                    "{:>4} {:>4} {:<15} {:>5} {:>8} {:>8} {:>4}",
                    p.n,
                    p.k,
                    p.case.as_str(),
                    c.zdcl_lower,
                    c.tc_lower,
                    c.tc_upper,
                    c.evaluation
                )?;
            }
        }
    }
    let failed: Vec<String> = rows
        .iter()
        .filter(|(_, c)| !c.passed())
        .map(|(p, _)| format!("({}, {})", p.n, p.k))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "witness evaluates to 0 at {}",
            failed.join(", ")
        )))
    }
}

#[derive(Serialize)]
struct SuiteOutcome {
    suite: &'static str,
    checks: u64,
    passed: bool,
    failures: Vec<String>,
}

impl SuiteOutcome {
    fn new(suite: &'static str) -> Self {
        SuiteOutcome {
            suite,
            checks: 0,
            passed: true,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.passed = false;
            self.failures.push(what());
        }
    }
}

fn guarded_limit(
    suite: &str,
    requested: Option<u32>,
    default: u32,
    guard: u32,
    force: bool,
    explicit: bool,
    err: &mut dyn Write,
) -> std::result::Result<u32, Failure> {
    let n_max = match requested {
        // under `all` a shared --n-max only caps each suite's default range
        Some(n) if !explicit => n.min(default),
        Some(n) => n,
        None => default,
    };
    if n_max > guard {
        if !force {
            return Err(Failure::Usage(
                Error::Budget(format!("{suite} suite is limited to n <= {guard}, got {n_max}"))
                    .to_string(),
            ));
        }
        let _ = writeln!(
            err,
            "warning: {suite} suite forced beyond its n <= {guard} budget (n_max = {n_max})"
        );
    }
    Ok(n_max)
}

fn suite_functionals(n_max: u32) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("functionals");
    for (n, k) in valid_pairs(n_max) {
        let p = decompose(n, k).expect("valid pair");
        let mut kinds = vec![FunctionalKind::Phi1, FunctionalKind::Phi2];
        if p.case == ProofCase::BEvenDZero {
            kinds.push(FunctionalKind::Phi3);
        }
        for kind in kinds {
            let check = Functional::new(kind, &p).expect("kind fits case").check();
            s.record(check.passed, || {
                format!("n={n} k={k} {kind}: relation of size {:?} not killed", check.failing_size)
            });
        }
    }
    s
}

fn suite_lemmas(n_max: u32) -> SuiteOutcome {
    let mut s = SuiteOutcome::new("lemmas");
    for r in [verify_techlem(n_max), verify_bclem(4, 16)] {
        s.checks += r.cases_checked;
        if !r.passed {
            s.passed = false;
            s.failures.push(format!("{}: {}", r.name, r.counterexample.unwrap_or_default()));
        }
    }
    for n in 6..=n_max.max(6) as i64 {
        s.record(!binom_mod2(2 * n - 6, n - 3), || {
            format!("C({}, {}) is odd", 2 * n - 6, n - 3)
        });
    }
    s
}

fn suite_oracle(n_max: u32, trials: usize, seed: u64, force: bool) -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("oracle");
    let reports = valid_pairs(n_max)
        .into_par_iter()
        .map(|(n, k)| cross_check(n, k, trials, seed, force))
        .collect::<Result<Vec<_>>>()?;
    for r in reports {
        s.record(r.passed(), || {
            format!("n={} k={}: {}", r.n, r.k, r.mismatch.clone().unwrap_or_default())
        });
    }
    Ok(s)
}

fn vanishing_options(n: u32, samples: usize, seed: u64, force: bool) -> VanishingOptions {
    let mut o = VanishingOptions::auto(n, samples, seed);
    o.force = force;
    o
}

fn suite_vanishing(n_max: u32, samples: usize, seed: u64, force: bool) -> Result<SuiteOutcome> {
    let mut s = SuiteOutcome::new("vanishing");
    for (n, k) in valid_pairs(n_max) {
        let r = check_vanishing(n, k, &vanishing_options(n, samples, seed, force))?;
        s.record(r.all_vanished, || {
            format!("n={n} k={k}: nonzero product {:?}", r.counterexample)
        });
    }
    Ok(s)
}

fn verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let all = a.suite == Suite::All;
    let wants = |s: Suite| all || a.suite == s;
    let mut outcomes = Vec::new();
    if wants(Suite::Functionals) {
        let n_max = a.n_max.map_or(20, |n| if all { n.min(20) } else { n });
        outcomes.push(suite_functionals(n_max));
    }
    if wants(Suite::Lemmas) {
        let n_max = a.n_max.map_or(64, |n| if all { n.min(64) } else { n });
        outcomes.push(suite_lemmas(n_max));
    }
    if wants(Suite::Oracle) {
        let n_max = guarded_limit("oracle", a.n_max, ORACLE_MAX_N, ORACLE_MAX_N, a.force, !all, err)?;
        outcomes.push(suite_oracle(n_max, a.trials, a.seed, a.force)?);
    }
    if wants(Suite::Vanishing) {
        let n_max = guarded_limit("vanishing", a.n_max, 12, RANDOM_MAX_N, a.force, !all, err)?;
        outcomes.push(suite_vanishing(n_max, a.samples, a.seed, a.force)?);
    }
    match a.format {
        Format::Json => json_line(out, &outcomes)?,
        _ => {
            for o in &outcomes {
                writeln!(
                    out,
                    "{:<12} {} ({} checks)",
                    o.suite,
                    if o.passed { "PASS" } else { "FAIL" },
                    o.checks
                )?;
                for f in &o.failures {
                    writeln!(out, "  {f}")?;
                }
            }
        }
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.suite).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("suites failed: {}", failed.join(", "))))
    }
}

#[allow(clippy::too_many_arguments)]
fn zdcl_cmd(
    n: u32,
    k: u32,
    samples: usize,
    seed: u64,
    force: bool,
    out_dir: PathBuf,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let opts = vanishing_options(n, samples, seed, force);
    if force && n > EXHAUSTIVE_MAX_N.max(RANDOM_MAX_N) {
        let _ = writeln!(err, "warning: vanishing check forced beyond n <= {RANDOM_MAX_N}");
    }
    let mut r = zdcl(n, k, &opts)?;
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    r.certificate.verified_at = Some(now);
    fs::create_dir_all(&out_dir)?;
    let cert_path = out_dir.join(format!("certificate-n{n}-k{k}.json"));
    let van_path = out_dir.join(format!("vanishing-n{n}-k{k}.json"));
    fs::write(&cert_path, r.certificate.to_json_pretty() + "\n")?;
    fs::write(&van_path, vanishing_json(&r.vanishing) + "\n")?;
    writeln!(out, "{}", r.zdcl)?;
    writeln!(out, "certificate {}", cert_path.display())?;
    writeln!(out, "vanishing   {}", van_path.display())?;
    if r.defect {
        Err(Failure::Verification(format!(
            "zdcl defect at n={n} k={k}: certificate {}, vanishing {}",
            if r.certificate.passed() { "PASS" } else { "FAILED" },
            if r.vanishing.all_vanished { "PASS" } else { "FAILED" }
        )))
    } else {
        Ok(())
    }
}

fn vanishing_json(r: &VanishingReport) -> String {
    serde_json::to_string_pretty(r).expect("report serializes")
}

fn certificate_verify(file: PathBuf, out: &mut dyn Write) -> CliResult {
    let text = fs::read_to_string(&file)?;
    let cert: Certificate = serde_json::from_str(&text).map_err(Error::from)?;
    let outcome = replay_certificate(&cert);
    let body = json!({
        "file": file.display().to_string(),
        "n": cert.n,
        "k": cert.k,
        "ok": outcome.ok,
        "recomputed_evaluation": outcome.recomputed_evaluation,
        "mismatches": outcome.mismatches,
    });
    json_line(out, &body)?;
    if !outcome.ok {
        return Err(Failure::Verification(format!(
            "certificate {} does not replay",
            file.display()
        )));
    }
    if !cert.passed() {
        return Err(Failure::Verification("certificate records a FAILED evaluation".into()));
    }
    Ok(())
}
