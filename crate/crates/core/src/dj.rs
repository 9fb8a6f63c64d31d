//! Two-qubit Deutsch–Jozsa on the n = 2 multi-target CNOT.
//!
//! Qubit 1 is the query, qubit 2 the auxiliary target. The auxiliary starts in
//! |1> = (|+> - |->)/sqrt(2), so a CNOT in the |+>/|-> basis kicks the phase
//! back onto the query.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonians::DeviceParams;
use crate::primitives::{Mode, PrimitiveKind};
use crate::quantum::{CMatrix, CVector, StateVector, C64};
use crate::sequencer::{
    ntcnot_layout, ntcnot_specs, propagate, ComposeOptions, PulseSequence, StepSpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Constant,
    Balanced,
}

/// One of the four functions f: {0,1} -> {0,1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OracleVariant {
    id: u8,
}

impl OracleVariant {
    pub fn new(id: u8) -> Result<Self> {
        if (1..=4).contains(&id) {
            Ok(Self { id })
        } else {
            Err(Error::InvalidVariant(id))
        }
    }

    pub fn all() -> [Self; 4] {
        [1, 2, 3, 4].map(|id| Self { id })
    }

    pub fn id(self) -> u8 {
        self.id
    }

    /// `(f(0), f(1))`.
    pub fn values(self) -> (u8, u8) {
        match self.id {
            1 => (0, 0),
            2 => (1, 1),
            3 => (0, 1),
            _ => (1, 0),
        }
    }

    pub fn classification(self) -> Classification {
        let (a, b) = self.values();
        if a == b {
            Classification::Constant
        } else {
            Classification::Balanced
        }
    }

    /// Pulse groups of `U_f`. Rotations act on the query only.
    fn specs(self) -> Vec<StepSpec> {
        let rot = |k| StepSpec::single(k, 0);
        let cnot = ntcnot_specs(2);
        match self.id {
            1 => Vec::new(),
            2 => [
                cnot.clone(),
                vec![rot(PrimitiveKind::YRotation)],
                cnot,
                vec![rot(PrimitiveKind::YRotationDagger)],
            ]
            .concat(),
            3 => cnot,
            _ => [
                vec![rot(PrimitiveKind::YRotation)],
                cnot,
                vec![rot(PrimitiveKind::YRotationDagger)],
            ]
            .concat(),
        }
    }
}

/// The oracle `U_f` as a pulse sequence on (query, auxiliary, cavity).
pub fn oracle_sequence(variant: OracleVariant, params: &DeviceParams) -> Result<PulseSequence> {
    PulseSequence::new(
        format!("oracle{}", variant.id),
        params.clone(),
        ntcnot_layout(2)?,
        variant.specs(),
    )
}

/// `(|0> + |1>)/sqrt(2)` on the query, |1> on the auxiliary, cavity in vacuum.
pub fn prepared_state(seq: &PulseSequence) -> Result<StateVector> {
    let layout = seq.layout();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut query = CVector::zeros(4);
    query[0] = C64::new(s, 0.0);
    query[1] = C64::new(s, 0.0);
    let mut aux = CVector::zeros(4);
    aux[1] = C64::new(1.0, 0.0);
    let mut cavity = CVector::zeros(layout.cavity_dim());
    cavity[0] = C64::new(1.0, 0.0);
    StateVector::product(layout.space(), &[query, aux, cavity])
}

/// Applies `U_f` once to `state`.
pub fn uf_apply(variant: OracleVariant, state: &StateVector, params: &DeviceParams, mode: Mode) -> Result<StateVector> {
    let seq = oracle_sequence(variant, params)?;
    if state.space() != seq.layout().space() {
        return Err(Error::SpaceMismatch);
    }
    let cols = CMatrix::from_column_slice(state.space().total_dim(), 1, state.amplitudes().as_slice());
    let out = propagate(&seq, mode, &ComposeOptions::default(), &cols)?.outputs;
    StateVector::new(state.space().clone(), CVector::from_column_slice(out.as_slice()))
}

/// The stages of one run; the oracle appears exactly once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Prepare,
    Oracle,
    HadamardQuery,
    MeasureQuery,
}

pub const CIRCUIT: [Stage; 4] = [Stage::Prepare, Stage::Oracle, Stage::HadamardQuery, Stage::MeasureQuery];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DjResult {
    pub variant: u8,
    pub f0: u8,
    pub f1: u8,
    pub mode: Mode,
    pub classification: Classification,
    /// Probability of the query outcome that gave the classification.
    pub probability: f64,
    pub correct: bool,
    pub oracle_queries: usize,
    /// Purity of the query's reduced state after the oracle; one when the
    /// auxiliary is left unentangled.
    pub query_purity: f64,
}

/// `Tr(rho^2)` of the reduced state of `slot`.
pub fn reduced_purity(state: &StateVector, slot: usize) -> Result<f64> {
    let space = state.space();
    space.check_slot(slot)?;
    let d = space.dim(slot);
    let stride = space.stride(slot);
    let amps = state.amplitudes();
    let mut rho = CMatrix::zeros(d, d);
    for i in 0..space.total_dim() {
        if space.digit(i, slot) != 0 {
            continue;
        }
        for a in 0..d {
            for b in 0..d {
                rho[(a, b)] += amps[i + a * stride] * amps[i + b * stride].conj();
            }
        }
    }
    Ok((&rho * &rho).trace().re)
}

/// Prepare, query once, Hadamard on the query, read the query's level
/// populations. Measurement is a projection probability, not a sample.
pub fn run_dj(variant: OracleVariant, params: &DeviceParams, mode: Mode) -> Result<DjResult> {
    let seq = oracle_sequence(variant, params)?;
    let mut state = prepared_state(&seq)?;
    let mut oracle_queries = 0;
    let mut query_purity = 1.0;
    for stage in CIRCUIT {
        match stage {
            Stage::Prepare => {}
            Stage::Oracle => {
                state = uf_apply(variant, &state, params, mode)?;
                oracle_queries += 1;
                query_purity = reduced_purity(&state, 0)?;
            }
            Stage::HadamardQuery => {
                let h = crate::primitives::hadamard(0, seq.layout())?;
                state = h.apply(&state)?;
            }
            Stage::MeasureQuery => {}
        }
    }
    let p0 = state.level_population(0, 0);
    let p1 = state.level_population(0, 1);
    let (classification, probability) = if p0 >= p1 {
        (Classification::Constant, p0)
    } else {
        (Classification::Balanced, p1)
    };
    let (f0, f1) = variant.values();
    Ok(DjResult {
        variant: variant.id,
        f0,
        f1,
        mode,
        classification,
        probability,
        correct: classification == variant.classification(),
        oracle_queries,
        query_purity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> DeviceParams {
        DeviceParams::uniform(1.0, 10.0, 10.0)
    }

    /// Amplitudes of |q, 1, 0> for q = 0, 1.
    fn branches(state: &StateVector) -> (C64, C64) {
        (state.amplitude(&[0, 1, 0]).unwrap(), state.amplitude(&[1, 1, 0]).unwrap())
    }

    #[test]
    fn variants_are_a_bijection() {
        let vals: Vec<(u8, u8)> = OracleVariant::all().iter().map(|v| v.values()).collect();
        assert_eq!(vals, vec![(0, 0), (1, 1), (0, 1), (1, 0)]);
        assert!(matches!(OracleVariant::new(5), Err(Error::InvalidVariant(5))));
        assert!(OracleVariant::new(0).is_err());
    }

    #[test]
    fn oracle_signs() {
        let p = params();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for v in OracleVariant::all() {
            let seq = oracle_sequence(v, &p).unwrap();
            let psi = prepared_state(&seq).unwrap();
            let out = uf_apply(v, &psi, &p, Mode::Analytic).unwrap();
            let (f0, f1) = v.values();
            let sign = |f: u8| if f == 0 { s } else { -s };
            let (a, b) = branches(&out);
            assert!((a - C64::new(sign(f0), 0.0)).norm() < 1e-12, "variant {}", v.id());
            assert!((b - C64::new(sign(f1), 0.0)).norm() < 1e-12, "variant {}", v.id());
        }
    }

    #[test]
    fn classification_is_deterministic() {
        for mode in [Mode::Analytic, Mode::SimulatedEffective] {
            for v in OracleVariant::all() {
                let r = run_dj(v, &params(), mode).unwrap();
                assert!(r.correct);
                assert!((r.probability - 1.0).abs() < 1e-10);
                assert_eq!(r.oracle_queries, 1);
                assert!((r.query_purity - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn purity_detects_entanglement() {
        let seq = oracle_sequence(OracleVariant::new(1).unwrap(), &params()).unwrap();
        let space = seq.layout().space();
        let mut v = CVector::zeros(space.total_dim());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        v[space.index_of(&[0, 0, 0]).unwrap()] = C64::new(s, 0.0);
        v[space.index_of(&[1, 1, 0]).unwrap()] = C64::new(s, 0.0);
        let bell = StateVector::new(space.clone(), v).unwrap();
        assert!((reduced_purity(&bell, 0).unwrap() - 0.5).abs() < 1e-12);
    }
}
