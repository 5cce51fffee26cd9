//! Command-line front end and file formats.
//!
//! Distribution files are JSON objects:
//!
//! ```json
//! { "protocol": "four-state", "basis_probs": "uniform",
//!   "probs": { "x,+1,x,+1": 0.125, "x,+1,x,-1": 0.0, ... } }
//! ```
//!
//! Keys are `"<basisA>,<a>,<basisB>,<b>"`; every basis pair of the protocol
//! must be present. `simulate` additionally writes `qber` and `qber_by_basis`,
//! which are ignored on load.
//!
//! Exit codes: 0 success or Detected, 3 NotDetected, 2 input error,
//! 4 numeric failure, 1 I/O failure on output.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::channels::{apply_to_bob, depolarizing_channel, intercept_resend, rotation_channel, Channel};
use crate::error::{Error, Result};
use crate::information::{
    conditional_mutual_information, intrinsic_info_upper_bound, mutual_information, separable_extension,
    TripartiteTable,
};
use crate::measurements::{
    joint_distribution, observed_pauli_table, qber, qber_basis, Basis, JointDistribution, Outcome, ProbTable, Protocol,
    ProtocolKind,
};
use crate::par;
use crate::qlinalg::Pauli;
use crate::states::{is_ppt, maximally_mixed, standard_state, Bell, PptVerdict, StandardState, TwoQubitState};
use crate::witnesses::{
    detect_4state, detect_6state, grid_search_family, pseudo_mixture, reconstruct_state, DetectionResult, Verdict,
    Witness, WitnessClass,
};
use crate::VERDICT_TOL;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_DETECTED: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "qkd-witness",
    version,
    about = "Entanglement verification for 4-state and 6-state QKD data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the exact joint outcome table of a protocol run.
    Simulate(SimulateArgs),
    /// Decide from a distribution file whether the data proves entanglement.
    Detect(DetectArgs),
    /// Reconstruct the state from 6-state data.
    Tomo(TomoArgs),
    /// Sweep the rotation channel angle and tabulate error rates and verdicts.
    Scan(ScanArgs),
    /// Mutual and conditional mutual information of tripartite tables.
    Info(InfoArgs),
}

#[derive(clap::Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, default_value = "four-state")]
    pub protocol: String,
    /// Source state: phi-plus, phi-minus, psi-plus, psi-minus, mixed, werner:<p>.
    #[arg(long, default_value = "phi-plus")]
    pub state: String,
    /// identity, rotation:<angle>[:deg], depolarizing:<p>.
    #[arg(long, default_value = "identity")]
    pub channel: String,
    /// intercept-resend:<bases>, e.g. intercept-resend:xz.
    #[arg(long)]
    pub attack: Option<String>,
    /// Also write Eve's separable extension (needs --attack).
    #[arg(long)]
    pub tripartite: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Ω test for 4-state data, PPT test for 6-state data.
    Auto,
    Omega,
    Grid,
    Ppt,
}

#[derive(clap::Args, Debug)]
pub struct DetectArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: Method,
    #[arg(long, default_value_t = VERDICT_TOL)]
    pub tol: f64,
    /// Grid points per angle for `--method grid`.
    #[arg(long, default_value_t = 32)]
    pub resolution: usize,
    #[arg(long)]
    pub emit_pseudo_mixture: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct TomoArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = VERDICT_TOL)]
    pub tol: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct ScanArgs {
    #[arg(long, default_value = "0")]
    pub start: String,
    /// Defaults to π/2.
    #[arg(long)]
    pub stop: Option<String>,
    /// Angle increment; overrides --points.
    #[arg(long)]
    pub step: Option<String>,
    #[arg(long, default_value_t = 181)]
    pub points: usize,
    #[arg(long, default_value_t = VERDICT_TOL)]
    pub tol: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct InfoArgs {
    /// One or more candidate extensions of the same P(A,B).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Restrict to rounds where both parties used this basis.
    #[arg(long)]
    pub sift: Option<String>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Parses arguments and runs; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            EXIT_IO
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Numeric(_) => EXIT_NUMERIC,
                _ => EXIT_INPUT,
            }
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub fn run(cli: &Cli) -> std::result::Result<i32, CliError> {
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Tomo(a) => cmd_tomo(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Info(a) => cmd_info(a),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> std::result::Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::usage(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::numeric(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

// ---------------------------------------------------------------------------
// Argument parsing

/// Angle in radians, or degrees with a `:deg` suffix.
pub fn parse_angle(s: &str) -> Result<f64> {
    let (num, deg) = match s.strip_suffix(":deg") {
        Some(n) => (n, true),
        None => (s, false),
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::usage(format!("invalid angle '{s}'")))?;
    if !v.is_finite() {
        return Err(Error::usage(format!("invalid angle '{s}'")));
    }
    Ok(if deg { v.to_radians() } else { v })
}

fn parse_unit_interval(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::usage(format!("invalid {what} '{s}'")))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::usage(format!("{what} {v} outside [0, 1]")));
    }
    Ok(v)
}

pub fn parse_channel(s: &str) -> Result<Channel> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    match kind {
        "identity" if rest.is_empty() => Ok(Channel::identity()),
        "rotation" if !rest.is_empty() => Ok(rotation_channel(parse_angle(rest)?)),
        "depolarizing" if !rest.is_empty() => {
            depolarizing_channel(parse_unit_interval(rest, "depolarizing probability")?)
        }
        _ => Err(Error::usage(format!(
            "invalid channel '{s}' (expected identity, rotation:<angle>[:deg] or depolarizing:<p>)"
        ))),
    }
}

pub fn parse_state(s: &str) -> Result<TwoQubitState> {
    match s {
        "phi-plus" => standard_state(StandardState::Bell(Bell::PhiPlus)),
        "phi-minus" => standard_state(StandardState::Bell(Bell::PhiMinus)),
        "psi-plus" => standard_state(StandardState::Bell(Bell::PsiPlus)),
        "psi-minus" => standard_state(StandardState::Bell(Bell::PsiMinus)),
        "mixed" => Ok(maximally_mixed()),
        _ => match s.strip_prefix("werner:") {
            Some(p) => standard_state(StandardState::Werner(parse_unit_interval(p, "Werner weight")?)),
            None => Err(Error::usage(format!("unknown state '{s}'"))),
        },
    }
}

pub fn parse_attack(s: &str) -> Result<Vec<Basis>> {
    let bases = s
        .strip_prefix("intercept-resend:")
        .ok_or_else(|| Error::usage(format!("unknown attack '{s}' (expected intercept-resend:<bases>)")))?;
    if bases.is_empty() {
        return Err(Error::usage("intercept-resend needs at least one basis"));
    }
    bases.chars().map(|c| c.to_string().parse::<Basis>()).collect()
}

fn parse_basis_in(s: &str, protocol: &Protocol) -> Result<Basis> {
    let b: Basis = s.parse()?;
    if !protocol.uses(b) {
        return Err(Error::usage(format!(
            "basis {b} is not part of the {} protocol",
            protocol.kind().name()
        )));
    }
    Ok(b)
}

// ---------------------------------------------------------------------------
// Distribution files

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub protocol: String,
    pub basis_probs: String,
    pub probs: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qber: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qber_by_basis: Option<BTreeMap<String, f64>>,
}

fn prob_key(i: Basis, a: Outcome, j: Basis, b: Outcome) -> String {
    format!("{},{},{},{}", i.label(), a.label(), j.label(), b.label())
}

impl DistributionFile {
    pub fn from_distribution(dist: &JointDistribution) -> Self {
        let protocol = dist.protocol();
        let mut probs = BTreeMap::new();
        for (i, a, j, b, p) in dist.entries() {
            if protocol.uses(i) && protocol.uses(j) {
                probs.insert(prob_key(i, a, j, b), p);
            }
        }
        let qber_by_basis = protocol
            .bases()
            .iter()
            .filter_map(|&b| qber_basis(dist, b).ok().map(|q| (b.label().to_string(), q)))
            .collect();
        DistributionFile {
            protocol: protocol.kind().name().to_string(),
            basis_probs: "uniform".to_string(),
            probs,
            qber: qber(dist).ok(),
            qber_by_basis: Some(qber_by_basis),
        }
    }

    pub fn to_distribution(&self) -> Result<JointDistribution> {
        let kind: ProtocolKind = self.protocol.parse()?;
        let protocol = Protocol::new(kind);
        if self.basis_probs != "uniform" {
            return Err(Error::validation(format!(
                "unsupported basis_probs '{}' (only \"uniform\")",
                self.basis_probs
            )));
        }
        let mut table: ProbTable = [[[[0.0; 2]; 3]; 2]; 3];
        let mut seen = 0usize;
        for (key, &p) in &self.probs {
            let parts: Vec<&str> = key.split(',').collect();
            let parsed = if parts.len() == 4 {
                (|| -> Result<_> {
                    Ok((
                        parts[0].parse::<Basis>()?,
                        parts[1].parse::<Outcome>()?,
                        parts[2].parse::<Basis>()?,
                        parts[3].parse::<Outcome>()?,
                    ))
                })()
                .ok()
                .filter(|(_, a, _, b)| parts[1] == a.label() && parts[3] == b.label())
            } else {
                None
            };
            let (i, a, j, b) = parsed.ok_or_else(|| Error::validation(format!("malformed probability key '{key}'")))?;
            if !protocol.uses(i) || !protocol.uses(j) {
                return Err(Error::validation(format!(
                    "key '{key}' uses a basis outside the {} protocol",
                    kind.name()
                )));
            }
            table[i.index()][a.index()][j.index()][b.index()] = p;
            seen += 1;
        }
        let n = protocol.bases().len();
        if seen != 4 * n * n {
            return Err(Error::validation(format!(
                "expected {} probability entries, found {seen}",
                4 * n * n
            )));
        }
        JointDistribution::new(protocol, table)
    }
}

pub fn read_distribution(path: &Path) -> Result<JointDistribution> {
    let text = read_input(path)?;
    let file: DistributionFile =
        serde_json::from_str(&text).map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
    file.to_distribution()
}

pub fn distribution_json(dist: &JointDistribution) -> Result<String> {
    to_json(&DistributionFile::from_distribution(dist))
}

// ---------------------------------------------------------------------------
// simulate

/// The state Bob and Alice end up sharing for a simulate configuration,
/// plus Eve's separable extension when an attack is requested.
pub fn simulate(
    protocol: &Protocol,
    state: &TwoQubitState,
    channel: &Channel,
    attack: Option<&[Basis]>,
) -> Result<(JointDistribution, Option<TripartiteTable>)> {
    let after_channel = apply_to_bob(channel, state)?;
    match attack {
        None => Ok((joint_distribution(&after_channel, protocol), None)),
        Some(bases) => {
            let rec = intercept_resend(bases, &after_channel, protocol)?;
            let ext = separable_extension(&rec.separable_mixture(), protocol)?;
            Ok((joint_distribution(&rec.post_state, protocol), Some(ext)))
        }
    }
}

fn cmd_simulate(a: &SimulateArgs) -> std::result::Result<i32, CliError> {
    let protocol = Protocol::new(a.protocol.parse()?);
    let state = parse_state(&a.state)?;
    let channel = parse_channel(&a.channel)?;
    let attack = a.attack.as_deref().map(parse_attack).transpose()?;
    if a.tripartite.is_some() && attack.is_none() {
        return Err(Error::usage("--tripartite requires --attack").into());
    }
    let (dist, ext) = simulate(&protocol, &state, &channel, attack.as_deref())?;
    if let (Some(path), Some(ext)) = (&a.tripartite, &ext) {
        write_output(Some(path), &to_json(ext)?)?;
    }
    write_output(a.output.as_deref(), &distribution_json(&dist)?)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// detect

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub class: String,
    /// `c_ij` keyed `"<i><j>"` with i, j ∈ {0, x, y, z}.
    pub coefficients: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<Vec<[f64; 2]>>,
}

impl WitnessReport {
    pub fn from_witness(w: &Witness) -> Self {
        let mut coefficients = BTreeMap::new();
        for i in Pauli::ALL {
            for j in Pauli::ALL {
                coefficients.insert(format!("{}{}", i.label(), j.label()), w.c(i, j));
            }
        }
        WitnessReport {
            class: w.class().name().to_string(),
            coefficients,
            generator: w.generator().map(|g| g.iter().map(|z| [z.re, z.im]).collect()),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct PseudoMixtureTerm {
    pub coefficient: f64,
    pub alice: String,
    pub bob: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub protocol: String,
    pub method: String,
    pub verdict: String,
    pub value: f64,
    pub margin: f64,
    pub tol: f64,
    pub qber: Option<f64>,
    pub witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pseudo_mixture: Option<Vec<PseudoMixtureTerm>>,
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Auto => "auto",
        Method::Omega => "omega",
        Method::Grid => "grid",
        Method::Ppt => "ppt",
    }
}

/// Runs the chosen detection method; `Auto` resolves by protocol.
pub fn detect(
    dist: &JointDistribution,
    method: Method,
    resolution: usize,
    tol: f64,
) -> Result<(Method, DetectionResult)> {
    let method = match method {
        Method::Auto => match dist.protocol().kind() {
            ProtocolKind::FourState => Method::Omega,
            ProtocolKind::SixState => Method::Ppt,
        },
        m => m,
    };
    let r = match method {
        Method::Omega => detect_4state(dist, tol)?,
        Method::Grid => grid_search_family(dist, resolution, tol)?,
        _ => detect_6state(dist, tol)?,
    };
    Ok((method, r))
}

pub fn detection_report(
    dist: &JointDistribution,
    method: Method,
    result: &DetectionResult,
    tol: f64,
    with_pseudo_mixture: bool,
) -> Result<DetectionReport> {
    let pseudo = match (&result.witness, with_pseudo_mixture) {
        (Some(w), true) if w.class() == WitnessClass::EW4 => Some(
            pseudo_mixture(w)?
                .terms
                .iter()
                .map(|(c, a, b)| PseudoMixtureTerm {
                    coefficient: *c,
                    alice: format!("{},{}", a.basis.label(), a.outcome.label()),
                    bob: format!("{},{}", b.basis.label(), b.outcome.label()),
                })
                .collect(),
        ),
        _ => None,
    };
    Ok(DetectionReport {
        protocol: dist.protocol().kind().name().to_string(),
        method: method_name(method).to_string(),
        verdict: result.verdict.name().to_string(),
        value: result.value,
        margin: result.margin,
        tol,
        qber: qber(dist).ok(),
        witness: result.witness.as_ref().map(WitnessReport::from_witness),
        pseudo_mixture: pseudo,
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::usage(format!("tolerance {tol} must be finite and nonnegative")));
    }
    Ok(())
}

fn cmd_detect(a: &DetectArgs) -> std::result::Result<i32, CliError> {
    check_tol(a.tol)?;
    let dist = read_distribution(&a.input)?;
    let (method, result) = detect(&dist, a.method, a.resolution, a.tol)?;
    if a.emit_pseudo_mixture && result.witness.as_ref().is_some_and(|w| w.class() != WitnessClass::EW4) {
        eprintln!("note: pseudo-mixture over x/z projectors is only available for EW4 witnesses");
    }
    let report = detection_report(&dist, method, &result, a.tol, a.emit_pseudo_mixture)?;
    write_output(a.output.as_deref(), &to_json(&report)?)?;
    Ok(match result.verdict {
        Verdict::Detected => EXIT_OK,
        Verdict::NotDetected => EXIT_NOT_DETECTED,
    })
}

// ---------------------------------------------------------------------------
// tomo

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct TomographyReport {
    pub rho_re: [[f64; 4]; 4],
    pub rho_im: [[f64; 4]; 4],
    pub pauli: BTreeMap<String, f64>,
    pub ppt: String,
    pub min_pt_eigenvalue: f64,
}

fn cmd_tomo(a: &TomoArgs) -> std::result::Result<i32, CliError> {
    check_tol(a.tol)?;
    let dist = read_distribution(&a.input)?;
    let full = observed_pauli_table(&dist)
        .to_full()
        .ok_or_else(|| Error::usage("tomography needs six-state data"))?;
    let rho = reconstruct_state(&full, a.tol)?;
    let ppt = is_ppt(&rho, a.tol);
    let m = &rho.rho().0;
    let mut pauli = BTreeMap::new();
    for i in Pauli::ALL {
        for j in Pauli::ALL {
            pauli.insert(format!("{}{}", i.label(), j.label()), rho.t(i, j));
        }
    }
    let report = TomographyReport {
        rho_re: m.map(|row| row.map(|z| z.re)),
        rho_im: m.map(|row| row.map(|z| z.im)),
        pauli,
        ppt: match ppt.verdict {
            PptVerdict::Ppt => "PPT",
            PptVerdict::Npt => "NPT",
        }
        .to_string(),
        min_pt_eigenvalue: ppt.min_eigenvalue,
    };
    write_output(a.output.as_deref(), &to_json(&report)?)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// scan

pub const SCAN_HEADER: &str =
    "theta,qber_4state,qber_6state,witness_value_4state,detected_4state,min_pt_eigenvalue_6state,detected_6state";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub theta: f64,
    pub qber_4state: f64,
    pub qber_6state: f64,
    pub witness_value_4state: f64,
    pub detected_4state: bool,
    pub min_pt_eigenvalue_6state: f64,
    pub detected_6state: bool,
}

impl ScanRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.theta,
            self.qber_4state,
            self.qber_6state,
            self.witness_value_4state,
            self.detected_4state,
            self.min_pt_eigenvalue_6state,
            self.detected_6state
        )
    }
}

/// `points` equally spaced angles from `start` to `stop` inclusive.
pub fn theta_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::usage("invalid θ range"));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    let last = points - 1;
    Ok((0..points)
        .map(|k| {
            if k == last {
                stop
            } else {
                start + (stop - start) * k as f64 / last as f64
            }
        })
        .collect())
}

/// Angles `start, start + step, …` not exceeding `stop`.
pub fn theta_steps(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::usage("invalid θ range or step"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if n > 10_000_000 {
        return Err(Error::usage("θ step too small"));
    }
    Ok((0..n).map(|k| start + step * k as f64).collect())
}

/// One scan row: Φ⁺ through the rotation channel, both protocols.
pub fn scan_row(theta: f64, tol: f64) -> Result<ScanRow> {
    let phi = standard_state(StandardState::Bell(Bell::PhiPlus))?;
    let st = apply_to_bob(&rotation_channel(theta), &phi)?;
    let d4 = joint_distribution(&st, &Protocol::four_state());
    let d6 = joint_distribution(&st, &Protocol::six_state());
    let r4 = detect_4state(&d4, tol)?;
    let r6 = detect_6state(&d6, tol)?;
    let full = observed_pauli_table(&d6)
        .to_full()
        .ok_or_else(|| Error::numeric("six-state table incomplete"))?;
    let min_pt = is_ppt(&reconstruct_state(&full, tol)?, tol).min_eigenvalue;
    Ok(ScanRow {
        theta,
        qber_4state: qber(&d4)?,
        qber_6state: qber(&d6)?,
        witness_value_4state: r4.value,
        detected_4state: r4.verdict.is_detected(),
        min_pt_eigenvalue_6state: min_pt,
        detected_6state: r6.verdict.is_detected(),
    })
}

/// Rows are computed in parallel (with the `parallel` feature) and returned in θ order.
pub fn scan(thetas: &[f64], tol: f64) -> Result<Vec<ScanRow>> {
    par::map(thetas, |&t| scan_row(t, tol)).into_iter().collect()
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(SCAN_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.csv());
    }
    s
}

fn cmd_scan(a: &ScanArgs) -> std::result::Result<i32, CliError> {
    check_tol(a.tol)?;
    let start = parse_angle(&a.start)?;
    let stop = match &a.stop {
        Some(s) => parse_angle(s)?,
        None => PI / 2.0,
    };
    let thetas = match &a.step {
        Some(s) => theta_steps(start, stop, parse_angle(s)?)?,
        None => theta_grid(start, stop, a.points)?,
    };
    let rows = scan(&thetas, a.tol)?;
    write_output(a.output.as_deref(), &scan_csv(&rows))?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// info

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct InfoReport {
    pub tables: usize,
    pub mutual_information_ab: f64,
    pub conditional_mutual_information: Vec<f64>,
    pub intrinsic_information_upper_bound: f64,
}

pub fn read_tripartite(path: &Path) -> Result<TripartiteTable> {
    let text = read_input(path)?;
    let t: TripartiteTable =
        serde_json::from_str(&text).map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
    t.validate()?;
    Ok(t)
}

pub fn info_report(tables: &[TripartiteTable]) -> Result<InfoReport> {
    let first = tables.first().ok_or_else(|| Error::usage("no tables given"))?;
    let bound = intrinsic_info_upper_bound(tables)?;
    Ok(InfoReport {
        tables: tables.len(),
        mutual_information_ab: mutual_information(&first.marginal_ab())?,
        conditional_mutual_information: tables.iter().map(conditional_mutual_information).collect(),
        intrinsic_information_upper_bound: bound,
    })
}

fn cmd_info(a: &InfoArgs) -> std::result::Result<i32, CliError> {
    let sift = a
        .sift
        .as_deref()
        .map(|s| parse_basis_in(s, &Protocol::six_state()))
        .transpose()?;
    let mut tables = Vec::with_capacity(a.inputs.len());
    for p in &a.inputs {
        let t = read_tripartite(p)?;
        tables.push(match sift {
            Some(b) => t.sifted(b)?,
            None => t,
        });
    }
    write_output(a.output.as_deref(), &to_json(&info_report(&tables)?)?)?;
    Ok(EXIT_OK)
}
