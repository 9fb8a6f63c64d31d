mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use gatesim_core::budget::{self, SquidCoupling};
use gatesim_core::config::Config;
use gatesim_core::dj::{run_dj, DjResult, OracleVariant};
use gatesim_core::hamiltonians::{DeviceParams, PerQubit};
use gatesim_core::primitives::Mode;
use gatesim_core::sequencer::{
    computational_basis, control_plus_minus_basis, cp3_sequence, ncp_sequence, ntcnot_sequence,
    sequence_truth_table, toffoli_sequence, IdleCouplings, PulseSequence, StepRecord,
};
use gatesim_core::verification::{audit_cross_check, phase_audit, report_with, GateReport, PhaseAudit, ReportOptions};
use gatesim_core::Error;

use crate::output::{csv_float, emit, to_json};

const CPW: &str = include_str!("../../../presets/cpw.json");
const SQUID: &str = include_str!("../../../presets/squid.json");

/// Default entrywise tolerance, overridden by `GATESIM_TOL`.
const DEFAULT_TOL: f64 = 1e-10;
/// Default minimum process fidelity in the simulated modes.
const DEFAULT_MIN_FIDELITY: f64 = 0.99;

#[derive(Parser)]
#[command(name = "gatesim", version, about = "Cavity-QED multiqubit gate simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    Cpw,
    Squid,
}

#[derive(clap::Args)]
struct ParamsArgs {
    /// JSON configuration file.
    #[arg(long, conflicts_with = "preset")]
    params: Option<PathBuf>,
    /// Built-in configuration; `cpw` when neither this nor --params is given.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
}

impl ParamsArgs {
    fn load(&self) -> Result<Config, CliError> {
        let cfg = match (&self.params, self.preset) {
            (Some(path), _) => Config::load(path),
            (None, Some(Preset::Squid)) => Config::parse(SQUID),
            (None, _) => Config::parse(CPW),
        };
        cfg.map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GateName {
    Cp3,
    Ncp,
    Ntcnot,
    Toffoli,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ModeArg {
    Analytic,
    SimulatedEffective,
    SimulatedFull,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Analytic => Mode::Analytic,
            ModeArg::SimulatedEffective => Mode::SimulatedEffective,
            ModeArg::SimulatedFull => Mode::SimulatedFull,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum IdleArg {
    Off,
    Targets,
    All,
}

impl From<IdleArg> for IdleCouplings {
    fn from(i: IdleArg) -> Self {
        match i {
            IdleArg::Off => IdleCouplings::Off,
            IdleArg::Targets => IdleCouplings::Targets,
            IdleArg::All => IdleCouplings::All,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SweepParam {
    DeltaRatio,
    OmegaRatio,
    QFactor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Observable {
    FidelityFull,
    Leakage3,
    TauCp3,
    TauNtcnot,
    KappaInv,
}

#[derive(clap::Args)]
struct GateArgs {
    #[arg(value_enum)]
    gate: GateName,
    /// Number of qubits (ncp, ntcnot; 3 for the others).
    #[arg(short = 'n', long)]
    n: Option<usize>,
    /// Cavity Fock-space truncation; overrides the configuration.
    #[arg(long)]
    cavity_dim: Option<usize>,
}

impl GateArgs {
    fn build(&self, cfg: &Config) -> Result<PulseSequence, CliError> {
        let p = &cfg.device;
        let seq = match self.gate {
            GateName::Cp3 | GateName::Toffoli => {
                if let Some(n) = self.n.filter(|&n| n != 3) {
                    return Err(CliError::Usage(format!("{:?} acts on 3 qubits, got -n {n}", self.gate)));
                }
                if self.gate == GateName::Cp3 {
                    cp3_sequence(p)
                } else {
                    toffoli_sequence(p)
                }
            }
            GateName::Ncp => ncp_sequence(self.n.unwrap_or(3), p),
            GateName::Ntcnot => ntcnot_sequence(self.n.unwrap_or(3), p),
        };
        let seq = seq.map_err(CliError::from_core)?;
        seq.with_cavity_dim(self.cavity_dim.unwrap_or(cfg.cavity_dim)).map_err(CliError::from_core)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compose a gate's pulse sequence and compare it with the ideal gate.
    Verify {
        #[command(flatten)]
        gate: GateArgs,
        #[arg(long, value_enum, default_value = "analytic")]
        mode: ModeArg,
        #[command(flatten)]
        params: ParamsArgs,
        /// Idle couplings in the simulated modes (default: targets in full
        /// mode, off in effective mode).
        #[arg(long, value_enum)]
        idle: Option<IdleArg>,
        /// Minimum process fidelity (default 1 - tolerance in analytic mode,
        /// 0.99 in the simulated modes).
        #[arg(long)]
        min_fidelity: Option<f64>,
        /// Include the step list in the report.
        #[arg(long)]
        dump_sequence: bool,
        /// Include the audit of dispersive phases on idle qubits.
        #[arg(long)]
        phase_audit: bool,
        /// Also write the truth table as CSV.
        #[arg(long)]
        truth_table: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Gate times, cavity lifetime, feasibility ratios and step counts.
    Budget {
        #[command(flatten)]
        params: ParamsArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Tabulate an observable over a parameter range as CSV.
    Sweep {
        #[arg(value_enum)]
        param: SweepParam,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, value_enum)]
        observable: Observable,
        /// Gate for the fidelity and leakage observables.
        #[arg(long, value_enum, default_value = "cp3")]
        gate: GateName,
        #[arg(short = 'n', long)]
        n: Option<usize>,
        #[command(flatten)]
        params: ParamsArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Two-qubit Deutsch-Jozsa with one of the four oracles (all if omitted).
    Dj {
        #[arg(long)]
        variant: Option<u8>,
        #[arg(long, value_enum, default_value = "analytic")]
        mode: ModeArg,
        #[command(flatten)]
        params: ParamsArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// rf-SQUID to cavity coupling constant with intermediate quantities.
    SquidG {
        /// Configuration with a `squid` section; the squid preset by default.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    /// Bad arguments or configuration: exit 2.
    Usage(String),
    /// The computation itself failed: exit 1.
    Failure(String),
}

impl CliError {
    fn from_core(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::Json(_)
            | Error::Io(_)
            | Error::InvalidParams(_)
            | Error::InvalidQubitCount { .. }
            | Error::InvalidVariant(_)
            | Error::MissingFrequency { .. }
            | Error::InvalidDimensions(_)
            | Error::TooLarge(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }

    fn io(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(format!("serialization: {e}"))
    }
}

fn tolerance() -> Result<f64, CliError> {
    match std::env::var("GATESIM_TOL") {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(CliError::Usage(format!("GATESIM_TOL must be a positive number, got {s:?}"))),
        },
        Err(_) => Ok(DEFAULT_TOL),
    }
}

#[derive(Serialize)]
struct VerifyOutput {
    report: GateReport,
    tolerance: f64,
    min_fidelity: f64,
    pass: bool,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sequence: Option<Vec<StepRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase_audit: Option<AuditOutput>,
}

#[derive(Serialize)]
struct AuditOutput {
    #[serde(flatten)]
    audit: PhaseAudit,
    /// Largest difference between the audited phases and phases measured by
    /// propagation with all idle couplings on.
    cross_check: f64,
}

/// Flags of `verify` beyond gate, mode and parameters.
struct VerifyFlags<'a> {
    idle: Option<IdleArg>,
    min_fidelity: Option<f64>,
    dump_sequence: bool,
    phase_audit: bool,
    truth_table: Option<&'a Path>,
    output: Option<&'a Path>,
}

fn verify(gate: &GateArgs, mode: Mode, params: &ParamsArgs, flags: VerifyFlags) -> Result<bool, CliError> {
    let VerifyFlags {
        idle,
        min_fidelity,
        dump_sequence,
        phase_audit: audit,
        truth_table,
        output,
    } = flags;
    let tol = tolerance()?;
    let cfg = params.load()?;
    let seq = gate.build(&cfg)?;
    let mut opts = ReportOptions::for_mode(mode);
    opts.tolerance = tol;
    opts.compose.idle_couplings = idle.map(Into::into);
    let report = report_with(&seq, mode, &opts).map_err(CliError::from_core)?;
    let min_fidelity = min_fidelity.unwrap_or(if mode.is_simulated() { DEFAULT_MIN_FIDELITY } else { 1.0 - tol });
    let pass = report.process_fidelity >= min_fidelity && (mode.is_simulated() || report.exact_phase_match);
    if let Some(path) = truth_table {
        let basis = match gate.gate {
            GateName::Ntcnot => control_plus_minus_basis(seq.layout()),
            _ => computational_basis(seq.layout()),
        }
        .map_err(CliError::from_core)?;
        let table = sequence_truth_table(&seq, mode, &opts.compose, &basis).map_err(CliError::from_core)?;
        emit(&table.to_csv(csv_float), Some(path)).map_err(CliError::io)?;
    }
    let phase_audit = if audit {
        let a = phase_audit(&seq).map_err(CliError::from_core)?;
        let cross_check = audit_cross_check(&seq, &a).map_err(CliError::from_core)?;
        Some(AuditOutput { audit: a, cross_check })
    } else {
        None
    };
    let out = VerifyOutput {
        report,
        tolerance: tol,
        min_fidelity,
        pass,
        warnings: seq.warnings().to_vec(),
        sequence: dump_sequence.then(|| seq.records()),
        phase_audit,
    };
    emit(&to_json(&out)?, output).map_err(CliError::io)?;
    Ok(pass)
}

fn budget_cmd(params: &ParamsArgs, output: Option<&Path>) -> Result<bool, CliError> {
    let cfg = params.load()?;
    let report = cfg.budget().map_err(CliError::from_core)?;
    emit(&to_json(&report)?, output).map_err(CliError::io)?;
    Ok(report.pass)
}

/// Device parameters with one swept quantity replaced. Ratios are taken
/// against each qubit's own coupling, and against the largest coupling for
/// the shared detuning and Rabi frequency.
fn with_param(base: &DeviceParams, n_qubits: usize, param: SweepParam, value: f64) -> Result<DeviceParams, CliError> {
    let mut p = base.clone();
    let gs: Vec<f64> = (0..n_qubits).map(|k| base.g(k)).collect::<Result<_, _>>().map_err(CliError::from_core)?;
    let gmax = gs.iter().copied().fold(0.0, f64::max);
    match param {
        SweepParam::DeltaRatio => {
            p.delta_c = value * gmax;
            p.delta_ck = PerQubit::PerSlot(gs.iter().map(|g| value * g).collect());
        }
        SweepParam::OmegaRatio => p.omega_resonant = value * gmax,
        SweepParam::QFactor => p.quality_q = value,
    }
    p.validate(n_qubits).map_err(CliError::from_core)?;
    Ok(p)
}

fn observe(cfg: &Config, gate: &GateArgs, observable: Observable) -> Result<f64, CliError> {
    let p = &cfg.device;
    let value = match observable {
        Observable::TauCp3 => budget::time_cp3(p),
        Observable::TauNtcnot => budget::time_ntcnot(p),
        Observable::KappaInv => budget::cavity_lifetime(p.quality_q, p.nu_c),
        Observable::FidelityFull | Observable::Leakage3 => {
            let seq = gate.build(cfg)?;
            let mode = Mode::SimulatedFull;
            let r = report_with(&seq, mode, &ReportOptions::for_mode(mode)).map_err(CliError::from_core)?;
            Ok(if observable == Observable::FidelityFull {
                r.process_fidelity
            } else {
                r.max_level3_population
            })
        }
    };
    value.map_err(CliError::from_core)
}

fn observable_name(o: Observable) -> &'static str {
    match o {
        Observable::FidelityFull => "fidelity_full",
        Observable::Leakage3 => "leakage3",
        Observable::TauCp3 => "tau_cp3",
        Observable::TauNtcnot => "tau_ntcnot",
        Observable::KappaInv => "kappa_inv",
    }
}

fn param_name(p: SweepParam) -> &'static str {
    match p {
        SweepParam::DeltaRatio => "delta_ratio",
        SweepParam::OmegaRatio => "omega_ratio",
        SweepParam::QFactor => "q_factor",
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    param: SweepParam,
    from: f64,
    to: f64,
    points: usize,
    observable: Observable,
    gate: GateArgs,
    params: &ParamsArgs,
    output: Option<&Path>,
) -> Result<bool, CliError> {
    if points == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    if !(from.is_finite() && to.is_finite()) || (points > 1 && from >= to) {
        return Err(CliError::Usage(format!("sweep range must be increasing, got {from} to {to}")));
    }
    let cfg = params.load()?;
    let n_qubits = match gate.gate {
        GateName::Ncp | GateName::Ntcnot => gate.n.unwrap_or(3),
        _ => 3,
    };
    let values: Vec<f64> = (0..points)
        .map(|k| if points == 1 { from } else { from + (to - from) * k as f64 / (points - 1) as f64 })
        .collect();
    let rows: Vec<Result<(f64, f64), CliError>> = values
        .par_iter()
        .map(|&v| {
            let device = with_param(&cfg.device, n_qubits, param, v)?;
            let point = Config { device, ..cfg.clone() };
            Ok((v, observe(&point, &gate, observable)?))
        })
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Failure(format!("csv: {e}"));
    w.write_record([param_name(param), observable_name(observable)]).map_err(csv_err)?;
    for row in rows {
        let (v, o) = row?;
        w.write_record([csv_float(v), csv_float(o)]).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Failure(format!("csv: {e}")))?;
    emit(&String::from_utf8_lossy(&bytes), output).map_err(CliError::io)?;
    Ok(true)
}

fn dj(variant: Option<u8>, mode: Mode, params: &ParamsArgs, output: Option<&Path>) -> Result<bool, CliError> {
    let cfg = params.load()?;
    let variants = match variant {
        Some(id) => vec![OracleVariant::new(id).map_err(CliError::from_core)?],
        None => OracleVariant::all().to_vec(),
    };
    let results: Vec<DjResult> = variants
        .into_iter()
        .map(|v| run_dj(v, &cfg.device, mode))
        .collect::<Result<_, _>>()
        .map_err(CliError::from_core)?;
    let pass = results.iter().all(|r| r.correct);
    let text = if results.len() == 1 { to_json(&results[0])? } else { to_json(&results)? };
    emit(&text, output).map_err(CliError::io)?;
    Ok(pass)
}

fn squid_g(params: Option<&Path>, output: Option<&Path>) -> Result<bool, CliError> {
    let cfg = match params {
        Some(p) => Config::load(p),
        None => Config::parse(SQUID),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let sq = cfg
        .squid
        .as_ref()
        .ok_or_else(|| CliError::Usage("configuration has no `squid` section".into()))?;
    let detail: SquidCoupling = budget::squid_coupling_detail(sq).map_err(CliError::from_core)?;
    emit(&to_json(&detail)?, output).map_err(CliError::io)?;
    Ok(true)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Verify {
            gate,
            mode,
            params,
            idle,
            min_fidelity,
            dump_sequence,
            phase_audit,
            truth_table,
            output,
        } => verify(
            &gate,
            mode.into(),
            &params,
            VerifyFlags {
                idle,
                min_fidelity,
                dump_sequence,
                phase_audit,
                truth_table: truth_table.as_deref(),
                output: output.as_deref(),
            },
        ),
        Command::Budget { params, output } => budget_cmd(&params, output.as_deref()),
        Command::Sweep {
            param,
            from,
            to,
            points,
            observable,
            gate,
            n,
            params,
            output,
        } => sweep(
            param,
            from,
            to,
            points,
            observable,
            GateArgs {
                gate,
                n,
                cavity_dim: None,
            },
            &params,
            output.as_deref(),
        ),
        Command::Dj {
            variant,
            mode,
            params,
            output,
        } => dj(variant, mode.into(), &params, output.as_deref()),
        Command::SquidG { params, output } => squid_g(params.as_deref(), output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
