//! Rotating-frame Hamiltonians for the three qubit–cavity–pulse interactions.
//!
//! Every builder has a `*_local` form returning a [`LocalOperator`] on
//! `(qubit slot, cavity)` or on the qubit slot alone, and a global form that
//! embeds it into a [`HilbertSpace`] whose last subsystem is the cavity.
//! Local index convention on `(qubit, cavity)` is `level * cavity_dim + n`.
//!
//! Frame: the cavity rotates at `omega_c` and the Raman drive frequency is
//! chosen so that both one-photon detunings equal `delta_c`. The excited level
//! |3> then sits at `+delta_c` and the Hamiltonian is time independent.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{CMatrix, HermitianOperator, HilbertSpace, LocalOperator, C64, QUDIT_DIM};

/// A per-qubit quantity, either shared by every qubit or listed by slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerQubit {
    Uniform(f64),
    PerSlot(Vec<f64>),
}

impl PerQubit {
    pub fn get(&self, slot: usize) -> Result<f64> {
        match self {
            PerQubit::Uniform(x) => Ok(*x),
            PerQubit::PerSlot(v) => v.get(slot).copied().ok_or_else(|| {
                Error::InvalidParams(format!(
                    "per-qubit list has {} entries, qubit slot {slot} requested",
                    v.len()
                ))
            }),
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            PerQubit::Uniform(x) => vec![*x],
            PerQubit::PerSlot(v) => v.clone(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            PerQubit::Uniform(x) => PerQubit::Uniform(x * factor),
            PerQubit::PerSlot(v) => PerQubit::PerSlot(v.iter().map(|x| x * factor).collect()),
        }
    }
}

impl From<f64> for PerQubit {
    fn from(x: f64) -> Self {
        PerQubit::Uniform(x)
    }
}

fn default_raman_phase() -> f64 {
    PI
}

/// Physical parameters of the device.
///
/// Angular frequencies are in rad/s, times in s, `nu_c` in Hz. The pulse
/// detuning of the Raman drive is not stored: it always equals `delta_c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParams {
    /// Qubit–cavity coupling on the |2> <-> |3> transition, per qubit.
    pub g: PerQubit,
    /// Raman detuning `omega_32 - omega_c`.
    pub delta_c: f64,
    /// Dispersive detuning of each target qubit.
    pub delta_ck: PerQubit,
    /// Raman pulse Rabi frequency (|1>-|3> for qubit 1, |0>-|3> for qubit 2).
    /// Defaults to `g` of the same qubit, the condition for a clean swap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_raman: Option<PerQubit>,
    /// Rabi frequency of the resonant |j> <-> |2> pulses.
    pub omega_resonant: f64,
    /// Phase of the Raman pulse relative to the cavity field. The default `pi`
    /// makes the Raman swap map |j,0> -> +|2,1>.
    #[serde(default = "default_raman_phase")]
    pub raman_phase: f64,
    /// Energy relaxation time of level |2>.
    pub gamma2_inv: f64,
    /// Loaded quality factor of the cavity.
    pub quality_q: f64,
    /// Cavity frequency.
    pub nu_c: f64,
}

impl DeviceParams {
    /// Identical qubits: `delta_c = delta_ck = delta_ratio * g`,
    /// `omega_resonant = omega_ratio * g`, Raman Rabi frequency equal to `g`.
    pub fn uniform(g: f64, delta_ratio: f64, omega_ratio: f64) -> Self {
        Self {
            g: g.into(),
            delta_c: delta_ratio * g,
            delta_ck: (delta_ratio * g).into(),
            omega_raman: None,
            omega_resonant: omega_ratio * g,
            raman_phase: PI,
            gamma2_inv: 1e-6,
            quality_q: 1e5,
            nu_c: 3e9,
        }
    }

    pub fn g(&self, slot: usize) -> Result<f64> {
        self.g.get(slot)
    }

    pub fn delta_ck(&self, slot: usize) -> Result<f64> {
        self.delta_ck.get(slot)
    }

    pub fn omega_raman(&self, slot: usize) -> Result<f64> {
        match &self.omega_raman {
            Some(o) => o.get(slot),
            None => self.g(slot),
        }
    }

    /// Checks positivity and finiteness; returns warnings for qubits outside
    /// the dispersive regime (`delta >= 10 g`).
    pub fn validate(&self, n_qubits: usize) -> Result<Vec<String>> {
        let positive = |name: &str, x: f64| -> Result<()> {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} must be positive and finite, got {x}")))
            }
        };
        positive("delta_c", self.delta_c)?;
        positive("omega_resonant", self.omega_resonant)?;
        positive("gamma2_inv", self.gamma2_inv)?;
        positive("quality_q", self.quality_q)?;
        positive("nu_c", self.nu_c)?;
        if !self.raman_phase.is_finite() {
            return Err(Error::InvalidParams("raman_phase must be finite".into()));
        }
        for x in self.g.values() {
            positive("g", x)?;
        }
        for x in self.delta_ck.values() {
            positive("delta_ck", x)?;
        }
        if let Some(o) = &self.omega_raman {
            for x in o.values() {
                positive("omega_raman", x)?;
            }
        }
        let mut warnings = Vec::new();
        for slot in 0..n_qubits {
            let g = self.g(slot)?;
            let dk = self.delta_ck(slot)?;
            self.omega_raman(slot)?;
            if self.delta_c < 10.0 * g {
                warnings.push(format!(
                    "qubit {}: delta_c/g = {:.3} is below the dispersive regime (>= 10)",
                    slot + 1,
                    self.delta_c / g
                ));
            }
            if dk < 10.0 * g {
                warnings.push(format!(
                    "qubit {}: delta_ck/g = {:.3} is below the dispersive regime (>= 10)",
                    slot + 1,
                    dk / g
                ));
            }
        }
        Ok(warnings)
    }

    /// Like [`validate`](Self::validate) but treats dispersive-regime warnings
    /// as errors.
    pub fn validate_strict(&self, n_qubits: usize) -> Result<()> {
        let warnings = self.validate(n_qubits)?;
        if warnings.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(warnings.join("; ")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitRole {
    /// Qubit 1: Raman pair |1> <-> |2>, emits the photon.
    RamanEmitter,
    /// Qubit 2 (and further controls): Raman pair |0> <-> |2>, absorbs it.
    RamanAbsorber,
    /// Qubit k: phase shift of |2> conditioned on the photon.
    DispersiveTarget,
}

impl QubitRole {
    /// Ground level `j` paired with |2> by both the Raman process and the
    /// resonant pulses.
    pub fn raman_level(self) -> usize {
        match self {
            QubitRole::RamanEmitter | QubitRole::DispersiveTarget => 1,
            QubitRole::RamanAbsorber => 0,
        }
    }

    pub fn is_raman(self) -> bool {
        !matches!(self, QubitRole::DispersiveTarget)
    }
}

/// Qubit roles plus the composite space (qubits in order, cavity last).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Layout {
    roles: Vec<QubitRole>,
    space: HilbertSpace,
}

impl Layout {
    pub fn new(roles: Vec<QubitRole>, cavity_dim: usize) -> Result<Self> {
        let space = HilbertSpace::qudits_with_cavity(roles.len(), cavity_dim)?;
        Ok(Self { roles, space })
    }

    pub fn roles(&self) -> &[QubitRole] {
        &self.roles
    }

    pub fn role(&self, slot: usize) -> Result<QubitRole> {
        self.roles.get(slot).copied().ok_or(Error::SlotOutOfRange {
            slot,
            len: self.roles.len(),
        })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn num_qubits(&self) -> usize {
        self.roles.len()
    }

    pub fn cavity_slot(&self) -> usize {
        self.roles.len()
    }

    pub fn cavity_dim(&self) -> usize {
        self.space.dim(self.cavity_slot())
    }

    /// Global indices of `|b_1 ... b_n>|0>_c` for `b` in binary order with
    /// qubit 1 most significant.
    pub fn computational_indices(&self) -> Vec<usize> {
        let n = self.num_qubits();
        (0..1usize << n)
            .map(|b| {
                (0..n)
                    .map(|q| ((b >> (n - 1 - q)) & 1) * self.space.stride(q))
                    .sum()
            })
            .collect()
    }
}

// Local operators built here are addressed by (qubit slot, cavity); the cavity
// slot is only known once a space is chosen, so builders use a sentinel that
// `on_space` replaces.
pub(crate) const CAVITY: usize = usize::MAX;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn local_index(level: usize, n: usize, cavity_dim: usize) -> usize {
    level * cavity_dim + n
}

fn check_raman(role: QubitRole, slot: usize) -> Result<usize> {
    if role.is_raman() {
        Ok(role.raman_level())
    } else {
        Err(Error::WrongRole {
            slot,
            expected: "a Raman emitter or absorber",
            found: role,
        })
    }
}

/// Adds `g (a^dagger |2><3| + a |3><2|)`.
fn add_cavity_exchange(m: &mut CMatrix, g: f64, cavity_dim: usize) {
    for n in 0..cavity_dim - 1 {
        let amp = c(g * ((n + 1) as f64).sqrt());
        let upper = local_index(3, n, cavity_dim);
        let lower = local_index(2, n + 1, cavity_dim);
        m[(lower, upper)] += amp;
        m[(upper, lower)] += amp;
    }
}

/// Full three-level Raman Hamiltonian on `(slot, cavity)`:
/// `delta_c |3><3| + g (a^dagger |2><3| + h.c.) + omega (e^{i phi} |j><3| + h.c.)`.
pub fn raman_full_local(
    params: &DeviceParams,
    slot: usize,
    role: QubitRole,
    cavity_dim: usize,
) -> Result<LocalOperator> {
    let j = check_raman(role, slot)?;
    let g = params.g(slot)?;
    let omega = params.omega_raman(slot)?;
    let drive = C64::from_polar(omega, params.raman_phase);
    let d = QUDIT_DIM * cavity_dim;
    let mut m = CMatrix::zeros(d, d);
    for n in 0..cavity_dim {
        m[(local_index(3, n, cavity_dim), local_index(3, n, cavity_dim))] += c(params.delta_c);
        m[(local_index(j, n, cavity_dim), local_index(3, n, cavity_dim))] += drive;
        m[(local_index(3, n, cavity_dim), local_index(j, n, cavity_dim))] += drive.conj();
    }
    add_cavity_exchange(&mut m, g, cavity_dim);
    Ok(LocalOperator::new(vec![slot, CAVITY], m))
}

/// Replaces the cavity sentinel with the real cavity slot of `space`.
pub(crate) fn on_space(op: LocalOperator, space: &HilbertSpace) -> LocalOperator {
    let cavity = space.num_subsystems() - 1;
    let slots = op
        .slots()
        .iter()
        .map(|&s| if s == CAVITY { cavity } else { s })
        .collect();
    LocalOperator::new(slots, op.matrix().clone())
}

/// Adiabatically eliminated Raman Hamiltonian on `(slot, cavity)`:
/// `-[(omega^2/delta_c)|j><j| + (g^2/delta_c) a^dagger a |2><2|
///    + (omega g/delta_c)(e^{-i phi} a^dagger |2><j| + h.c.)]`.
pub fn raman_effective_local(
    params: &DeviceParams,
    slot: usize,
    role: QubitRole,
    cavity_dim: usize,
) -> Result<LocalOperator> {
    let j = check_raman(role, slot)?;
    let g = params.g(slot)?;
    let omega = params.omega_raman(slot)?;
    let dc = params.delta_c;
    let coupling = C64::from_polar(omega * g / dc, -params.raman_phase);
    let d = QUDIT_DIM * cavity_dim;
    let mut m = CMatrix::zeros(d, d);
    for n in 0..cavity_dim {
        let jn = local_index(j, n, cavity_dim);
        m[(jn, jn)] -= c(omega * omega / dc);
        let two_n = local_index(2, n, cavity_dim);
        m[(two_n, two_n)] -= c(g * g / dc * n as f64);
        if n + 1 < cavity_dim {
            let amp = coupling * ((n + 1) as f64).sqrt();
            let two_up = local_index(2, n + 1, cavity_dim);
            m[(two_up, jn)] -= amp;
            m[(jn, two_up)] -= amp.conj();
        }
    }
    Ok(LocalOperator::new(vec![slot, CAVITY], m))
}

/// Dispersive Hamiltonian `(g_k^2/delta_ck)(|3><3| - |2><2|) a^dagger a`.
pub fn dispersive_local(params: &DeviceParams, slot: usize, cavity_dim: usize) -> Result<LocalOperator> {
    let g = params.g(slot)?;
    let chi = g * g / params.delta_ck(slot)?;
    let d = QUDIT_DIM * cavity_dim;
    let mut m = CMatrix::zeros(d, d);
    for n in 0..cavity_dim {
        let three = local_index(3, n, cavity_dim);
        let two = local_index(2, n, cavity_dim);
        m[(three, three)] = c(chi * n as f64);
        m[(two, two)] = c(-chi * n as f64);
    }
    Ok(LocalOperator::new(vec![slot, CAVITY], m))
}

/// Resonant pulse `omega (e^{-i phi} |2><j| + e^{i phi} |j><2|)` on the qubit alone.
pub fn resonant_drive_local(omega: f64, phi: f64, j: usize, slot: usize) -> Result<LocalOperator> {
    if j > 1 {
        return Err(Error::InvalidDriveLevel(j));
    }
    let mut m = CMatrix::zeros(QUDIT_DIM, QUDIT_DIM);
    m[(2, j)] = C64::from_polar(omega, -phi);
    m[(j, 2)] = C64::from_polar(omega, phi);
    Ok(LocalOperator::new(vec![slot], m))
}

/// Undriven cavity coupling of a Raman qubit, full form:
/// `delta_c |3><3| + g (a^dagger |2><3| + h.c.)`.
pub fn cavity_coupling_full_local(params: &DeviceParams, slot: usize, cavity_dim: usize) -> Result<LocalOperator> {
    let g = params.g(slot)?;
    let d = QUDIT_DIM * cavity_dim;
    let mut m = CMatrix::zeros(d, d);
    for n in 0..cavity_dim {
        m[(local_index(3, n, cavity_dim), local_index(3, n, cavity_dim))] = c(params.delta_c);
    }
    add_cavity_exchange(&mut m, g, cavity_dim);
    Ok(LocalOperator::new(vec![slot, CAVITY], m))
}

/// Undriven cavity coupling of a Raman qubit after eliminating |3>:
/// `-(g^2/delta_c) a^dagger a |2><2|`.
pub fn cavity_shift_effective_local(params: &DeviceParams, slot: usize, cavity_dim: usize) -> Result<LocalOperator> {
    let g = params.g(slot)?;
    let d = QUDIT_DIM * cavity_dim;
    let mut m = CMatrix::zeros(d, d);
    for n in 0..cavity_dim {
        let two = local_index(2, n, cavity_dim);
        m[(two, two)] = c(-g * g / params.delta_c * n as f64);
    }
    Ok(LocalOperator::new(vec![slot, CAVITY], m))
}

fn embed(op: LocalOperator, space: &HilbertSpace) -> Result<HermitianOperator> {
    let op = on_space(op, space);
    HermitianOperator::embed(op.matrix(), space, op.slots())
}

fn qubit_cavity_dim(space: &HilbertSpace, slot: usize) -> Result<usize> {
    let cavity = space.num_subsystems() - 1;
    if slot >= cavity {
        return Err(Error::SlotOutOfRange { slot, len: cavity });
    }
    if space.dim(slot) != QUDIT_DIM {
        return Err(Error::DimensionMismatch {
            expected: QUDIT_DIM,
            found: space.dim(slot),
        });
    }
    Ok(space.dim(cavity))
}

pub fn raman_full(params: &DeviceParams, slot: usize, role: QubitRole, space: &HilbertSpace) -> Result<HermitianOperator> {
    let n = qubit_cavity_dim(space, slot)?;
    embed(raman_full_local(params, slot, role, n)?, space)
}

pub fn raman_effective(
    params: &DeviceParams,
    slot: usize,
    role: QubitRole,
    space: &HilbertSpace,
) -> Result<HermitianOperator> {
    let n = qubit_cavity_dim(space, slot)?;
    embed(raman_effective_local(params, slot, role, n)?, space)
}

pub fn dispersive(params: &DeviceParams, slot: usize, space: &HilbertSpace) -> Result<HermitianOperator> {
    let n = qubit_cavity_dim(space, slot)?;
    embed(dispersive_local(params, slot, n)?, space)
}

pub fn resonant_drive(omega: f64, phi: f64, j: usize, slot: usize, space: &HilbertSpace) -> Result<HermitianOperator> {
    qubit_cavity_dim(space, slot)?;
    embed(resonant_drive_local(omega, phi, j, slot)?, space)
}
