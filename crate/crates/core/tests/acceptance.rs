//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use gatesim_core::budget::{
    cavity_lifetime, squid_coupling, step_counts, time_cp3, time_ntcnot, time_ntcnot_n, Convention, Scheme,
};
use gatesim_core::config::Config;
use gatesim_core::dj::{run_dj, OracleVariant};
use gatesim_core::hamiltonians::DeviceParams;
use gatesim_core::primitives::Mode;
use gatesim_core::quantum::{process_fidelity, C64};
use gatesim_core::sequencer::{
    compose, compose_steps, computational_basis, control_plus_minus_basis, cp3_sequence, ncp_sequence,
    ntcnot_sequence, sequence_truth_table, toffoli_sequence, ComposeOptions, TruthTable,
};
use gatesim_core::verification::{
    audit_cross_check, ideal_ntcnot, phase_audit, raman_swap_check, report, report_with, ReportOptions,
};

const CPW: &str = include_str!("../../../presets/cpw.json");
const SQUID: &str = include_str!("../../../presets/squid.json");

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    ((value - target) / target).abs() <= rel
}

fn err(e: gatesim_core::Error) -> String {
    e.to_string()
}

fn unit() -> DeviceParams {
    DeviceParams::uniform(1.0, 10.0, 10.0)
}

/// Expected table for a map sending each labelled input to one labelled
/// output with the given sign.
fn permutation_table(labels: &[String], image: impl Fn(&str) -> (String, f64)) -> Vec<Vec<C64>> {
    labels
        .iter()
        .map(|input| {
            let (out, sign) = image(input);
            labels
                .iter()
                .map(|l| if *l == out { C64::new(sign, 0.0) } else { C64::new(0.0, 0.0) })
                .collect()
        })
        .collect()
}

fn check_table(table: &TruthTable, expected: &[Vec<C64>], tol: f64) -> Result<f64, String> {
    let dev = table.max_deviation(expected);
    ensure(dev <= tol, format!("max deviation {dev:e} > {tol:e}"))?;
    ensure(table.max_leakage() <= tol, format!("leakage {:e}", table.max_leakage()))?;
    Ok(dev)
}

fn cp3_truth_table() -> Outcome {
    let seq = cp3_sequence(&unit()).map_err(err)?;
    let basis = computational_basis(seq.layout()).map_err(err)?;
    let table = sequence_truth_table(&seq, Mode::Analytic, &ComposeOptions::default(), &basis).map_err(err)?;
    let expected = permutation_table(&table.labels, |l| (l.to_string(), if l == "111" { -1.0 } else { 1.0 }));
    let dev = check_table(&table, &expected, 1e-10)?;
    let r = report(&seq, Mode::Analytic).map_err(err)?;
    ensure(r.residual_photon <= 1e-10, format!("photon left in cavity: {:e}", r.residual_photon))?;
    ensure(r.leakage <= 1e-10, format!("population outside levels 0,1: {:e}", r.leakage))?;
    Ok(format!("diag(1,1,1,1,1,1,1,-1), max deviation {dev:.1e}, cavity restored"))
}

fn ntcnot_truth_table() -> Outcome {
    let seq = ntcnot_sequence(3, &unit()).map_err(err)?;
    let basis = control_plus_minus_basis(seq.layout()).map_err(err)?;
    let table = sequence_truth_table(&seq, Mode::Analytic, &ComposeOptions::default(), &basis).map_err(err)?;
    let flip = |l: &str| {
        if l.starts_with('1') {
            let t: String = l.chars().map(|c| match c {
                '+' => '-',
                '-' => '+',
                c => c,
            }).collect();
            (t, 1.0)
        } else {
            (l.to_string(), 1.0)
        }
    };
    let expected = permutation_table(&table.labels, flip);
    let dev = check_table(&table, &expected, 1e-10)?;
    let t3 = seq.total_duration();
    for n in 2..=5 {
        let s = ntcnot_sequence(n, &unit()).map_err(err)?;
        ensure(s.total_duration() == t3, format!("n={n}: duration {} != {t3}", s.total_duration()))?;
        let u = compose(&s, Mode::Analytic).map_err(err)?;
        let comp = s.layout().computational_indices();
        let sub = restrict(&u, &comp);
        let f = process_fidelity(&sub, &ideal_ntcnot(n).map_err(err)?, &(0..comp.len()).collect::<Vec<_>>())
            .map_err(err)?;
        ensure((f - 1.0).abs() <= 1e-10, format!("n={n}: fidelity {f}"))?;
    }
    Ok(format!("8 rows in the |0/1>|+/-> basis, max deviation {dev:.1e}; n=2..5 fidelity 1, equal durations"))
}

/// The block of `u` on the listed indices, as a unitary on qubits.
fn restrict(u: &gatesim_core::quantum::UnitaryMatrix, idx: &[usize]) -> gatesim_core::quantum::UnitaryMatrix {
    let n = idx.len().trailing_zeros() as usize;
    let mut m = gatesim_core::quantum::CMatrix::zeros(idx.len(), idx.len());
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            m[(r, c)] = u.entry(i, j);
        }
    }
    let space = gatesim_core::quantum::HilbertSpace::qubits(n).expect("qubit space");
    gatesim_core::quantum::UnitaryMatrix::new(space, m).expect("block of a gate is unitary")
}

fn ncp4() -> Outcome {
    let seq = ncp_sequence(4, &unit()).map_err(err)?;
    ensure(seq.layout().space().total_dim() == 512, "space is not 4^4 x 2")?;
    let basis = computational_basis(seq.layout()).map_err(err)?;
    let table = sequence_truth_table(&seq, Mode::Analytic, &ComposeOptions::default(), &basis).map_err(err)?;
    let expected = permutation_table(&table.labels, |l| (l.to_string(), if l == "1111" { -1.0 } else { 1.0 }));
    let dev = check_table(&table, &expected, 1e-10)?;
    Ok(format!("16 inputs, single -1 at |1111>, max deviation {dev:.1e}"))
}

fn adiabatic_elimination() -> Outcome {
    let mut checks = Vec::new();
    for ratio in [10.0, 20.0, 50.0] {
        let p = DeviceParams::uniform(1.0, ratio, 10.0);
        checks.push(raman_swap_check(&p, 3, 64).map_err(err)?);
    }
    ensure(checks[0].fidelity >= 0.95, format!("fidelity {} at 10g", checks[0].fidelity))?;
    ensure(checks[0].peak_level3 <= 0.05, format!("peak |3> {} at 10g", checks[0].peak_level3))?;
    ensure(
        checks.windows(2).all(|w| w[1].fidelity > w[0].fidelity),
        "fidelity not increasing in detuning",
    )?;
    let f: Vec<String> = checks.iter().map(|c| format!("{:.6}", c.fidelity)).collect();
    Ok(format!("F = {} at 10/20/50 g, peak |3> {:.4} at 10g", f.join("/"), checks[0].peak_level3))
}

fn timing() -> Outcome {
    let g = 2.7;
    let p = DeviceParams::uniform(g, 10.0, 10.0);
    let cp3 = time_cp3(&p).map_err(err)? / (PI / g);
    let nt = time_ntcnot(&p).map_err(err)? / (PI / g);
    ensure((cp3 - 30.2).abs() <= 1e-12, format!("tau_cp3 = {cp3} pi/g"))?;
    ensure((nt - 20.1).abs() <= 1e-12, format!("tau_ntcnot = {nt} pi/g"))?;
    let seq = cp3_sequence(&p).map_err(err)?;
    ensure(
        (seq.total_duration() - time_cp3(&p).map_err(err)?).abs() <= 1e-15 * seq.total_duration(),
        "cp3 sequence duration differs from the formula",
    )?;
    let cpw = Config::parse(CPW).map_err(err)?.device;
    let squid = Config::parse(SQUID).map_err(err)?.device;
    let rows = [
        ("cpw tau_cp3", time_cp3(&cpw).map_err(err)?, 0.068e-6),
        ("cpw tau_ntcnot", time_ntcnot(&cpw).map_err(err)?, 0.045e-6),
        ("squid tau_cp3", time_cp3(&squid).map_err(err)?, 0.219e-6),
        ("squid tau_ntcnot", time_ntcnot(&squid).map_err(err)?, 0.146e-6),
    ];
    for (name, v, target) in rows {
        ensure(within(v, target, 0.02), format!("{name} = {v:e}, quoted {target:e}"))?;
    }
    ensure(
        (2..=10).all(|n| time_ntcnot_n(&cpw, n).ok() == time_ntcnot(&cpw).ok()),
        "tau_ntcnot depends on n",
    )?;
    Ok(format!(
        "30.2 pi/g, 20.1 pi/g; {:.4} / {:.4} / {:.4} / {:.4} us",
        rows[0].1 * 1e6,
        rows[1].1 * 1e6,
        rows[2].1 * 1e6,
        rows[3].1 * 1e6
    ))
}

fn lifetimes() -> Outcome {
    let a = cavity_lifetime(1e5, 3e9).map_err(err)?;
    let b = cavity_lifetime(1e5, 3.6e9).map_err(err)?;
    ensure(within(a, 5.3e-6, 0.02), format!("{a:e}"))?;
    ensure(within(b, 4.42e-6, 0.02), format!("{b:e}"))?;
    Ok(format!("{:.4} us, {:.4} us", a * 1e6, b * 1e6))
}

fn squid() -> Outcome {
    let cfg = Config::parse(SQUID).map_err(err)?;
    let sq = cfg.squid.as_ref().ok_or("preset has no squid section")?;
    let g = squid_coupling(sq).map_err(err)?;
    ensure(within(g, 4.3e8, 0.05), format!("g = {g:e}"))?;
    Ok(format!("g = {g:.4e} s^-1 ({:+.2}% from 4.3e8)", (g / 4.3e8 - 1.0) * 100.0))
}

fn steps() -> Outcome {
    let p = unit();
    let count = |s, n, c| step_counts(s, n, c).map_err(err);
    ensure(cp3_sequence(&p).map_err(err)?.step_count() == 7, "cp3 sequence")?;
    ensure(toffoli_sequence(&p).map_err(err)?.step_count() == 9, "toffoli sequence")?;
    ensure(count(Scheme::Toffoli, 3, Convention::Stepwise)?.steps == 9, "toffoli count")?;
    ensure(count(Scheme::Toffoli, 3, Convention::Stepwise)?.conventional == Some(28), "toffoli comparator")?;
    for n in 2..=8 {
        ensure(ntcnot_sequence(n, &p).map_err(err)?.step_count() == 5, format!("ntcnot n={n}"))?;
        ensure(count(Scheme::Ntcnot, n, Convention::Grouped)?.steps == 5, "ntcnot count")?;
    }
    for n in 3..=7 {
        let stepwise = count(Scheme::Ncp, n, Convention::Stepwise)?.steps;
        let grouped = count(Scheme::Ncp, n, Convention::Grouped)?.steps;
        ensure(stepwise == 4 * n - 5 && grouped == 2 * n + 1, format!("ncp n={n}"))?;
        ensure(ncp_sequence(n, &p).map_err(err)?.step_count() == grouped, format!("ncp n={n} built"))?;
    }
    ensure(count(Scheme::Ncp, 3, Convention::Stepwise)?.steps == 7, "ncp n=3")?;
    Ok("cp3 7, toffoli 9 vs 28, ntcnot 5; ncp 4n-5 and 2n+1 agree at n=3".into())
}

fn deutsch_jozsa() -> Outcome {
    for mode in [Mode::Analytic, Mode::SimulatedEffective] {
        for v in OracleVariant::all() {
            let r = run_dj(v, &unit(), mode).map_err(err)?;
            ensure(r.correct, format!("variant {} misclassified in {mode:?}", v.id()))?;
            ensure((r.probability - 1.0).abs() <= 1e-10, format!("variant {}: p = {}", v.id(), r.probability))?;
            ensure(r.oracle_queries == 1, "more than one oracle query")?;
            ensure((r.query_purity - 1.0).abs() <= 1e-10, "auxiliary entangled with query")?;
        }
    }
    Ok("4 variants x 2 modes, p = 1, one query each".into())
}

fn properties() -> Outcome {
    let p = unit();
    let seqs = [
        cp3_sequence(&p).map_err(err)?,
        ntcnot_sequence(3, &p).map_err(err)?,
        toffoli_sequence(&p).map_err(err)?,
        ncp_sequence(4, &p).map_err(err)?,
    ];
    let opts = ComposeOptions::default();
    for seq in &seqs {
        for mode in [Mode::Analytic, Mode::SimulatedEffective, Mode::SimulatedFull] {
            let u = compose(seq, mode).map_err(err)?;
            ensure(u.unitarity_error() <= 1e-9, format!("{} {mode:?}: not unitary", seq.name()))?;
        }
        let whole = compose(seq, Mode::Analytic).map_err(err)?;
        let k = seq.step_count() / 2;
        let first = compose_steps(seq, 0..k, Mode::Analytic, &opts).map_err(err)?;
        let second = compose_steps(seq, k..seq.step_count(), Mode::Analytic, &opts).map_err(err)?;
        let joined = second.then_after(&first).map_err(err)?;
        let diff = (whole.matrix() - joined.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        ensure(diff <= 1e-12, format!("{}: split composition differs by {diff:e}", seq.name()))?;
        let r = report(seq, Mode::Analytic).map_err(err)?;
        ensure(r.exact_phase_match, format!("{}: phases", seq.name()))?;
        ensure(r.residual_photon <= 1e-12, format!("{}: cavity not restored", seq.name()))?;
        ensure(r.max_level3_population <= 1e-12, format!("{}: |3> populated", seq.name()))?;
    }
    let infidelity = |ratio: f64| -> Result<f64, String> {
        let seq = cp3_sequence(&DeviceParams::uniform(1.0, ratio, 10.0)).map_err(err)?;
        let r = report_with(&seq, Mode::SimulatedFull, &ReportOptions::for_mode(Mode::SimulatedFull)).map_err(err)?;
        Ok(1.0 - r.process_fidelity)
    };
    let (i10, i20) = (infidelity(10.0)?, infidelity(20.0)?);
    ensure(i20 <= i10, format!("cp3 infidelity {i20:e} at 20g above {i10:e} at 10g"))?;
    let mut worst: f64 = 0.0;
    for seq in &seqs[..2] {
        let audit = phase_audit(seq).map_err(err)?;
        worst = worst.max(audit_cross_check(seq, &audit).map_err(err)?);
    }
    ensure(worst <= 1e-8, format!("phase audit differs by {worst:e}"))?;
    Ok(format!(
        "unitarity, composition, cavity, |3>; cp3 full infidelity {i10:.2e} -> {i20:.2e}; audit {worst:.1e}"
    ))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        ("CP3 truth table", cp3_truth_table, Duration::from_secs(1)),
        ("NTCNOT truth table", ntcnot_truth_table, Duration::from_secs(5)),
        ("4-qubit controlled phase", ncp4, Duration::from_secs(10)),
        ("adiabatic elimination", adiabatic_elimination, Duration::from_secs(30)),
        ("gate times", timing, Duration::from_secs(1)),
        ("cavity lifetimes", lifetimes, Duration::from_secs(1)),
        ("SQUID coupling", squid, Duration::from_secs(1)),
        ("step counts", steps, Duration::from_secs(1)),
        ("Deutsch-Jozsa", deutsch_jozsa, Duration::from_secs(5)),
        ("property suites", properties, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > *limit => Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}")),
            o => o,
        };
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} ({elapsed:.2?})", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} ({elapsed:.2?})", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
