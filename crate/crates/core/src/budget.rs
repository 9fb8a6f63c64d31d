//! Feasibility arithmetic: gate durations against decoherence times, the
//! rf-SQUID–cavity coupling constant, step counts and level orderings.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::DeviceParams;
use crate::primitives::{duration, PrimitiveKind};

/// CODATA 2018 values, SI units.
pub mod constants {
    /// Vacuum permeability, N/A^2.
    pub const MU0: f64 = 1.256_637_062_12e-6;
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = 1.054_571_817e-34;
    /// Planck constant, J s.
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Elementary charge, C.
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Flux quantum `h / 2e`, Wb.
    pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::InvalidParams(format!("{name} must be positive and finite, got {x}")))
    }
}

fn raman_time(p: &DeviceParams, slot: usize) -> Result<f64> {
    duration(PrimitiveKind::G1, slot, p)
}

fn dispersive_time(p: &DeviceParams, slot: usize) -> Result<f64> {
    duration(PrimitiveKind::GPi, slot, p)
}

fn resonant_time(p: &DeviceParams) -> f64 {
    PI / (2.0 * p.omega_resonant)
}

/// Three-qubit controlled phase: two emitter swaps, two absorber swaps, one
/// dispersive phase on qubit 3 and four resonant-pulse slots.
pub fn time_cp3(p: &DeviceParams) -> Result<f64> {
    Ok(2.0 * raman_time(p, 0)? + 2.0 * raman_time(p, 1)? + dispersive_time(p, 2)? + 4.0 * resonant_time(p))
}

/// Multi-target CNOT with the dispersive time of qubit 2. With identical
/// targets this is the duration for every n.
pub fn time_ntcnot(p: &DeviceParams) -> Result<f64> {
    time_ntcnot_n(p, 2)
}

/// Multi-target CNOT on `n` qubits; the simultaneous phase step lasts as long
/// as the slowest target.
pub fn time_ntcnot_n(p: &DeviceParams, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidQubitCount {
            scheme: "multi-target CNOT",
            n,
            min: 2,
        });
    }
    let mut phase: f64 = 0.0;
    for k in 1..n {
        phase = phase.max(dispersive_time(p, k)?);
    }
    Ok(2.0 * raman_time(p, 0)? + 2.0 * resonant_time(p) + phase)
}

/// Cavity photon lifetime `Q / (2 pi nu_c)`.
pub fn cavity_lifetime(q: f64, nu_c: f64) -> Result<f64> {
    Ok(positive("quality factor", q)? / (2.0 * PI * positive("cavity frequency", nu_c)?))
}

/// rf-SQUID and standing-wave cavity parameters, SI units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquidParams {
    pub junction_capacitance: f64,
    pub loop_inductance: f64,
    pub damping_resistance: f64,
    pub beta_l: f64,
    /// External flux bias in units of the flux quantum.
    pub external_flux: f64,
    /// Dimensionless flux matrix element between levels |2> and |3>.
    pub coupling_matrix_element: f64,
    pub loop_area: f64,
    pub cavity_volume: f64,
    /// Hz.
    pub cavity_frequency: f64,
    /// `cos(kz)` at the SQUID position.
    pub antinode_factor: f64,
}

impl SquidParams {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("junction_capacitance", self.junction_capacitance),
            ("loop_inductance", self.loop_inductance),
            ("damping_resistance", self.damping_resistance),
            ("beta_l", self.beta_l),
            ("external_flux", self.external_flux),
            ("coupling_matrix_element", self.coupling_matrix_element),
            ("loop_area", self.loop_area),
            ("cavity_volume", self.cavity_volume),
            ("cavity_frequency", self.cavity_frequency),
            ("antinode_factor", self.antinode_factor),
        ] {
            positive(name, x)?;
        }
        if self.antinode_factor > 1.0 {
            return Err(Error::InvalidParams(format!(
                "antinode_factor must be <= 1, got {}",
                self.antinode_factor
            )));
        }
        Ok(())
    }
}

/// Intermediate quantities of the coupling integral.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SquidCoupling {
    pub omega_c: f64,
    /// `sqrt(omega_c / (2 mu0 hbar))`.
    pub zero_point_factor: f64,
    /// `mu0 sqrt(2/V) cos(kz)`, the cavity field at the loop.
    pub field_per_mode: f64,
    /// Field times loop area.
    pub mode_flux: f64,
    pub g: f64,
}

/// `g = (1/L) sqrt(omega_c / (2 mu0 hbar)) phi32 phi0 * int_S B_c . dS` with
/// the standing-wave field uniform over the loop.
pub fn squid_coupling_detail(sq: &SquidParams) -> Result<SquidCoupling> {
    sq.validate()?;
    let omega_c = 2.0 * PI * sq.cavity_frequency;
    let zero_point_factor = (omega_c / (2.0 * constants::MU0 * constants::HBAR)).sqrt();
    let field_per_mode = constants::MU0 * (2.0 / sq.cavity_volume).sqrt() * sq.antinode_factor;
    let mode_flux = field_per_mode * sq.loop_area;
    let g = zero_point_factor * sq.coupling_matrix_element * constants::FLUX_QUANTUM * mode_flux / sq.loop_inductance;
    Ok(SquidCoupling {
        omega_c,
        zero_point_factor,
        field_per_mode,
        mode_flux,
        g,
    })
}

/// Coupling of the |2> <-> |3> transition to the cavity, s^-1.
pub fn squid_coupling(sq: &SquidParams) -> Result<f64> {
    Ok(squid_coupling_detail(sq)?.g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Ncp,
    Ntcnot,
    Toffoli,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// One step per group of the three-qubit presentation, extrapolated as
    /// `4n - 5` for controlled phase.
    Stepwise,
    /// One step per pulse group actually built: `2n + 1` for controlled phase.
    Grouped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StepCount {
    pub scheme: Scheme,
    pub n: usize,
    pub convention: Convention,
    pub steps: usize,
    /// Steps of a decomposition into conventional one- and two-qubit gates,
    /// where a comparison figure exists. For controlled phase this is the
    /// quoted `22n - 75`, which is negative for n <= 3 and kept as is.
    pub conventional: Option<i64>,
}

pub fn step_counts(scheme: Scheme, n: usize, convention: Convention) -> Result<StepCount> {
    let (steps, conventional) = match scheme {
        Scheme::Ncp => {
            if n < 3 {
                return Err(Error::InvalidQubitCount {
                    scheme: "n-qubit controlled phase",
                    n,
                    min: 3,
                });
            }
            let steps = match convention {
                Convention::Stepwise => 4 * n - 5,
                Convention::Grouped => 2 * n + 1,
            };
            (steps, Some(22 * n as i64 - 75))
        }
        Scheme::Ntcnot => {
            if n < 2 {
                return Err(Error::InvalidQubitCount {
                    scheme: "multi-target CNOT",
                    n,
                    min: 2,
                });
            }
            (5, None)
        }
        Scheme::Toffoli => {
            if n != 3 {
                return Err(Error::InvalidParams(format!("the Toffoli gate has 3 qubits, got {n}")));
            }
            (9, Some(28))
        }
    };
    Ok(StepCount {
        scheme,
        n,
        convention,
        steps,
        conventional,
    })
}

/// Default bound on gate time over the shortest decoherence time.
pub const FEASIBILITY_THRESHOLD: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateBudget {
    pub duration: f64,
    pub ratio_gamma2: f64,
    pub ratio_kappa: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Feasibility {
    pub gamma2_inv: f64,
    pub kappa_inv: f64,
    pub threshold: f64,
    pub cp3: GateBudget,
    pub ntcnot: GateBudget,
    pub pass: bool,
}

fn gate_budget(duration: f64, gamma2_inv: f64, kappa_inv: f64, threshold: f64) -> GateBudget {
    let ratio_gamma2 = duration / gamma2_inv;
    let ratio_kappa = duration / kappa_inv;
    GateBudget {
        duration,
        ratio_gamma2,
        ratio_kappa,
        pass: ratio_gamma2 < threshold && ratio_kappa < threshold,
    }
}

/// Both gate times against `gamma2_inv` and the cavity lifetime.
pub fn feasibility(p: &DeviceParams, threshold: f64) -> Result<Feasibility> {
    positive("threshold", threshold)?;
    let gamma2_inv = positive("gamma2_inv", p.gamma2_inv)?;
    let kappa_inv = cavity_lifetime(p.quality_q, p.nu_c)?;
    let cp3 = gate_budget(time_cp3(p)?, gamma2_inv, kappa_inv, threshold);
    let ntcnot = gate_budget(time_ntcnot(p)?, gamma2_inv, kappa_inv, threshold);
    Ok(Feasibility {
        gamma2_inv,
        kappa_inv,
        threshold,
        pass: cp3.pass && ntcnot.pass,
        cp3,
        ntcnot,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitType {
    Charge,
    Phase,
    Flux,
    Squid,
}

impl QubitType {
    fn name(self) -> &'static str {
        match self {
            QubitType::Charge => "charge",
            QubitType::Phase => "phase",
            QubitType::Flux => "flux",
            QubitType::Squid => "squid",
        }
    }
}

/// Transition frequencies `nu_ij` between levels i > j, Hz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelStructure {
    pub qubit_type: QubitType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu10: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu21: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu32: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu20: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu30: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu31: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelCheck {
    pub qubit_type: QubitType,
    pub pass: bool,
    /// Predicates that do not hold, e.g. `nu10>nu21`.
    pub violated: Vec<String>,
}

/// Checks the level ordering each qubit type needs for the protocols: a
/// cavity-coupled |2> <-> |3> transition kept apart from the others.
pub fn validate_levels(ls: &LevelStructure) -> Result<LevelCheck> {
    let get = |field: &'static str, v: Option<f64>| {
        v.ok_or(Error::MissingFrequency {
            qubit_type: ls.qubit_type.name(),
            field,
        })
    };
    let mut preds: Vec<(&str, f64, &str, f64)> = Vec::new();
    match ls.qubit_type {
        QubitType::Charge | QubitType::Phase | QubitType::Flux => {
            let n10 = get("nu10", ls.nu10)?;
            let n21 = get("nu21", ls.nu21)?;
            let n32 = get("nu32", ls.nu32)?;
            match ls.qubit_type {
                QubitType::Charge => {
                    preds.push(("nu21", n21, "nu10", n10));
                    preds.push(("nu21", n21, "nu32", n32));
                    preds.push(("nu10", n10, "nu32", n32));
                }
                QubitType::Phase => {
                    preds.push(("nu10", n10, "nu21", n21));
                    preds.push(("nu21", n21, "nu32", n32));
                }
                _ => {
                    preds.push(("nu21", n21, "nu10", n10));
                    preds.push(("nu21", n21, "nu32", n32));
                    preds.push(("nu32", n32, "nu10", n10));
                }
            }
        }
        QubitType::Squid => {
            let chain = [
                ("nu32", get("nu32", ls.nu32)?),
                ("nu21", get("nu21", ls.nu21)?),
                ("nu20", get("nu20", ls.nu20)?),
                ("nu31", get("nu31", ls.nu31)?),
                ("nu30", get("nu30", ls.nu30)?),
            ];
            for w in chain.windows(2) {
                preds.push((w[1].0, w[1].1, w[0].0, w[0].1));
            }
        }
    }
    let violated: Vec<String> = preds
        .into_iter()
        .filter(|(_, a, _, b)| a.partial_cmp(b) != Some(std::cmp::Ordering::Greater))
        .map(|(na, _, nb, _)| format!("{na}>{nb}"))
        .collect();
    Ok(LevelCheck {
        qubit_type: ls.qubit_type,
        pass: violated.is_empty(),
        violated,
    })
}

/// Quantities a reference value can be attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    TauCp3,
    TauNtcnot,
    KappaInv,
    SquidCoupling,
}

/// A quoted figure to compare a computed one against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceValue {
    pub quantity: Quantity,
    /// Same units as the computed quantity (s or s^-1).
    pub value: f64,
    /// Relative tolerance band.
    pub rel_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub quantity: Quantity,
    pub computed: f64,
    pub reference: f64,
    pub rel_error: f64,
    pub rel_tol: f64,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BudgetReport {
    pub tau_cp3: f64,
    pub tau_ntcnot: f64,
    /// Gate times in units of `pi / g` of qubit 1.
    pub tau_cp3_pi_over_g: f64,
    pub tau_ntcnot_pi_over_g: f64,
    pub kappa_inv: f64,
    pub feasibility: Feasibility,
    pub step_counts: Vec<StepCount>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub squid: Option<SquidCoupling>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<LevelCheck>,
    pub references: Vec<ReferenceRow>,
    /// Feasibility, level ordering and every reference row pass.
    pub pass: bool,
}

/// Step counts reported alongside every budget: CP3 and Toffoli, the
/// multi-target CNOT, and controlled phase up to six qubits in both
/// conventions.
pub fn standard_step_counts() -> Vec<StepCount> {
    let mut out = Vec::new();
    for n in 3..=6 {
        for c in [Convention::Stepwise, Convention::Grouped] {
            out.push(step_counts(Scheme::Ncp, n, c).expect("n >= 3"));
        }
    }
    out.push(step_counts(Scheme::Toffoli, 3, Convention::Stepwise).expect("n = 3"));
    out.push(step_counts(Scheme::Ntcnot, 2, Convention::Stepwise).expect("n = 2"));
    out
}

pub fn budget_report(
    p: &DeviceParams,
    squid: Option<&SquidParams>,
    levels: Option<&LevelStructure>,
    references: &[ReferenceValue],
    threshold: f64,
) -> Result<BudgetReport> {
    let feasibility = feasibility(p, threshold)?;
    let pi_over_g = PI / p.g(0)?;
    let squid = squid.map(squid_coupling_detail).transpose()?;
    let levels = levels.map(validate_levels).transpose()?;
    let mut rows = Vec::new();
    for r in references {
        let computed = match r.quantity {
            Quantity::TauCp3 => feasibility.cp3.duration,
            Quantity::TauNtcnot => feasibility.ntcnot.duration,
            Quantity::KappaInv => feasibility.kappa_inv,
            Quantity::SquidCoupling => match &squid {
                Some(s) => s.g,
                None => {
                    return Err(Error::Config(
                        "a squid_coupling reference needs a squid section".into(),
                    ))
                }
            },
        };
        positive("reference value", r.value)?;
        let rel_error = (computed - r.value) / r.value;
        rows.push(ReferenceRow {
            quantity: r.quantity,
            computed,
            reference: r.value,
            rel_error,
            rel_tol: r.rel_tol,
            within: rel_error.abs() <= r.rel_tol,
        });
    }
    let pass = feasibility.pass && levels.as_ref().is_none_or(|l| l.pass) && rows.iter().all(|r| r.within);
    Ok(BudgetReport {
        tau_cp3: feasibility.cp3.duration,
        tau_ntcnot: feasibility.ntcnot.duration,
        tau_cp3_pi_over_g: feasibility.cp3.duration / pi_over_g,
        tau_ntcnot_pi_over_g: feasibility.ntcnot.duration / pi_over_g,
        kappa_inv: feasibility.kappa_inv,
        step_counts: standard_step_counts(),
        squid,
        levels,
        references: rows,
        pass,
        feasibility,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cp3_time_in_units_of_pi_over_g() {
        let g = 3.7e8;
        let p = DeviceParams::uniform(g, 10.0, 10.0);
        assert!((time_cp3(&p).unwrap() * g / PI - 30.2).abs() < 1e-12);
        assert!((time_ntcnot(&p).unwrap() * g / PI - 20.1).abs() < 1e-12);
        for n in 2..=6 {
            assert_eq!(time_ntcnot_n(&p, n).unwrap(), time_ntcnot(&p).unwrap());
        }
    }

    #[test]
    fn lifetime() {
        assert!((cavity_lifetime(1e5, 3e9).unwrap() - 1e5 / (6e9 * PI)).abs() < 1e-18);
        assert!(cavity_lifetime(0.0, 3e9).is_err());
    }

    #[test]
    fn flux_quantum() {
        assert!((constants::FLUX_QUANTUM - 2.067_833_848e-15).abs() < 1e-23);
    }

    #[test]
    fn step_count_table() {
        let c = |s, n, k| step_counts(s, n, k).unwrap();
        assert_eq!(c(Scheme::Ncp, 3, Convention::Stepwise).steps, 7);
        assert_eq!(c(Scheme::Ncp, 3, Convention::Grouped).steps, 7);
        assert_eq!(c(Scheme::Ncp, 5, Convention::Stepwise).steps, 15);
        assert_eq!(c(Scheme::Ncp, 5, Convention::Grouped).steps, 11);
        assert_eq!(c(Scheme::Ncp, 3, Convention::Stepwise).conventional, Some(-9));
        assert_eq!(c(Scheme::Toffoli, 3, Convention::Stepwise).conventional, Some(28));
        assert_eq!(c(Scheme::Ntcnot, 9, Convention::Grouped).steps, 5);
        assert!(step_counts(Scheme::Ncp, 2, Convention::Stepwise).is_err());
        assert!(step_counts(Scheme::Toffoli, 4, Convention::Stepwise).is_err());
    }

    #[test]
    fn level_orderings() {
        let mut ls = LevelStructure {
            qubit_type: QubitType::Phase,
            nu10: Some(5e9),
            nu21: Some(6e9),
            nu32: Some(4e9),
            nu20: None,
            nu30: None,
            nu31: None,
        };
        let r = validate_levels(&ls).unwrap();
        assert_eq!(r.violated, vec!["nu10>nu21".to_string()]);
        ls.qubit_type = QubitType::Charge;
        assert!(validate_levels(&ls).unwrap().pass);
        ls.qubit_type = QubitType::Squid;
        assert!(matches!(validate_levels(&ls), Err(Error::MissingFrequency { field: "nu20", .. })));
    }

    #[test]
    fn feasibility_fails_for_short_relaxation() {
        let mut p = DeviceParams::uniform(PI * 4.4e8, 10.0, 10.0);
        assert!(feasibility(&p, FEASIBILITY_THRESHOLD).unwrap().pass);
        p.gamma2_inv = 10e-9;
        let f = feasibility(&p, FEASIBILITY_THRESHOLD).unwrap();
        assert!(!f.pass && !f.cp3.pass && !f.ntcnot.pass);
    }
}
