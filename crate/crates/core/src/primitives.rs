//! Named pulse transformations as unitaries, in closed form or by propagating
//! the corresponding Hamiltonian for the pulse duration.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{
    dispersive_local, on_space, raman_effective_local, raman_full_local, resonant_drive_local,
    DeviceParams, Layout, QubitRole, CAVITY,
};
use crate::quantum::{CMatrix, LocalOperator, Spectrum, StateVector, UnitaryMatrix, C64, ONE, QUDIT_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrimitiveKind {
    /// Raman swap |1>|0>_c <-> |2>|1>_c on the emitter.
    G1,
    /// Raman swap |0>|0>_c <-> |2>|1>_c on an absorber.
    G2,
    /// Dispersive pi phase on |2>, |3> per cavity photon.
    #[serde(rename = "Gpi")]
    GPi,
    /// Resonant pulse |2> -> |j>, |j> -> -|2>.
    R,
    /// Resonant pulse |2> -> -|j>, |j> -> |2>.
    #[serde(rename = "Rdagger")]
    RDagger,
    /// Idealized Hadamard on levels {0, 1}.
    Hadamard,
    /// Idealized rotation |0> -> |1>, |1> -> -|0>.
    #[serde(rename = "Y")]
    YRotation,
    /// Idealized rotation |0> -> -|1>, |1> -> |0>.
    #[serde(rename = "Ydagger")]
    YRotationDagger,
}

impl PrimitiveKind {
    pub fn name(self) -> &'static str {
        match self {
            PrimitiveKind::G1 => "G1",
            PrimitiveKind::G2 => "G2",
            PrimitiveKind::GPi => "Gpi",
            PrimitiveKind::R => "R",
            PrimitiveKind::RDagger => "Rdagger",
            PrimitiveKind::Hadamard => "Hadamard",
            PrimitiveKind::YRotation => "Y",
            PrimitiveKind::YRotationDagger => "Ydagger",
        }
    }

    pub fn touches_cavity(self) -> bool {
        matches!(self, PrimitiveKind::G1 | PrimitiveKind::G2 | PrimitiveKind::GPi)
    }

    /// Changes the photon number (as opposed to a photon-number-diagonal phase).
    pub fn exchanges_photon(self) -> bool {
        matches!(self, PrimitiveKind::G1 | PrimitiveKind::G2)
    }

    /// Zero-duration bookkeeping gates with no pulse recipe.
    pub fn is_idealized(self) -> bool {
        matches!(
            self,
            PrimitiveKind::Hadamard | PrimitiveKind::YRotation | PrimitiveKind::YRotationDagger
        )
    }

    fn required_role(self) -> Option<(QubitRole, &'static str)> {
        match self {
            PrimitiveKind::G1 => Some((QubitRole::RamanEmitter, "the Raman emitter role")),
            PrimitiveKind::G2 => Some((QubitRole::RamanAbsorber, "the Raman absorber role")),
            PrimitiveKind::GPi => Some((QubitRole::DispersiveTarget, "the dispersive target role")),
            _ => None,
        }
    }
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Closed-form maps.
    Analytic,
    /// Propagation under the adiabatically eliminated Hamiltonians.
    SimulatedEffective,
    /// Propagation with the excited level |3> of the Raman qubits kept.
    SimulatedFull,
}

impl Mode {
    pub fn is_simulated(self) -> bool {
        !matches!(self, Mode::Analytic)
    }
}

/// One primitive applied to one qubit, with its physical duration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Primitive {
    pub kind: PrimitiveKind,
    pub slot: usize,
    /// Seconds.
    pub duration: f64,
    pub mode: Mode,
}

/// Duration of `kind` on `slot`: `pi delta_c / (2 g^2)` for the Raman swaps,
/// `pi delta_ck / g^2` for the dispersive phase, `pi / (2 omega)` for resonant
/// pulses, zero for idealized gates.
pub fn duration(kind: PrimitiveKind, slot: usize, params: &DeviceParams) -> Result<f64> {
    Ok(match kind {
        PrimitiveKind::G1 | PrimitiveKind::G2 => {
            let coupling = params.omega_raman(slot)? * params.g(slot)? / params.delta_c;
            PI / (2.0 * coupling)
        }
        PrimitiveKind::GPi => {
            let g = params.g(slot)?;
            PI * params.delta_ck(slot)? / (g * g)
        }
        PrimitiveKind::R | PrimitiveKind::RDagger => PI / (2.0 * params.omega_resonant),
        _ => 0.0,
    })
}

pub(crate) fn check_role(kind: PrimitiveKind, slot: usize, layout: &Layout) -> Result<QubitRole> {
    let role = layout.role(slot)?;
    if let Some((required, expected)) = kind.required_role() {
        if role != required {
            return Err(Error::WrongRole {
                slot,
                expected,
                found: role,
            });
        }
    }
    Ok(role)
}

fn identity_with(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

fn qc(level: usize, n: usize, cavity_dim: usize) -> usize {
    level * cavity_dim + n
}

/// Closed-form local unitary. Raman swaps and the dispersive phase act on
/// `(slot, cavity)`; everything else on the qubit alone.
pub(crate) fn analytic_local(
    kind: PrimitiveKind,
    slot: usize,
    role: QubitRole,
    cavity_dim: usize,
) -> LocalOperator {
    let j = role.raman_level();
    match kind {
        PrimitiveKind::G1 | PrimitiveKind::G2 => {
            let d = QUDIT_DIM * cavity_dim;
            let mut m = identity_with(d);
            let a = qc(j, 0, cavity_dim);
            let b = qc(2, 1, cavity_dim);
            m[(a, a)] = C64::new(0.0, 0.0);
            m[(b, b)] = C64::new(0.0, 0.0);
            m[(b, a)] = ONE;
            m[(a, b)] = ONE;
            LocalOperator::new(vec![slot, CAVITY], m)
        }
        PrimitiveKind::GPi => {
            let d = QUDIT_DIM * cavity_dim;
            let mut m = identity_with(d);
            for level in [2, 3] {
                for n in (1..cavity_dim).step_by(2) {
                    let i = qc(level, n, cavity_dim);
                    m[(i, i)] = -ONE;
                }
            }
            LocalOperator::new(vec![slot, CAVITY], m)
        }
        PrimitiveKind::R | PrimitiveKind::RDagger => {
            // R: |2> -> |j>, |j> -> -|2>;  R^dagger: |2> -> -|j>, |j> -> |2>.
            let sign = if kind == PrimitiveKind::R { ONE } else { -ONE };
            let mut m = identity_with(QUDIT_DIM);
            m[(j, j)] = C64::new(0.0, 0.0);
            m[(2, 2)] = C64::new(0.0, 0.0);
            m[(j, 2)] = sign;
            m[(2, j)] = -sign;
            LocalOperator::new(vec![slot], m)
        }
        PrimitiveKind::Hadamard => {
            let h = C64::new(FRAC_1_SQRT_2, 0.0);
            let mut m = identity_with(QUDIT_DIM);
            m[(0, 0)] = h;
            m[(0, 1)] = h;
            m[(1, 0)] = h;
            m[(1, 1)] = -h;
            LocalOperator::new(vec![slot], m)
        }
        PrimitiveKind::YRotation | PrimitiveKind::YRotationDagger => {
            let sign = if kind == PrimitiveKind::YRotation { ONE } else { -ONE };
            let mut m = identity_with(QUDIT_DIM);
            m[(0, 0)] = C64::new(0.0, 0.0);
            m[(1, 1)] = C64::new(0.0, 0.0);
            m[(1, 0)] = sign;
            m[(0, 1)] = -sign;
            LocalOperator::new(vec![slot], m)
        }
    }
}

/// Hamiltonian generating `kind` (cavity slot still the sentinel), or `None`
/// for idealized gates.
pub(crate) fn hamiltonian_local(
    kind: PrimitiveKind,
    slot: usize,
    role: QubitRole,
    params: &DeviceParams,
    cavity_dim: usize,
    mode: Mode,
) -> Result<Option<LocalOperator>> {
    Ok(match kind {
        PrimitiveKind::G1 | PrimitiveKind::G2 => Some(match mode {
            Mode::SimulatedFull => raman_full_local(params, slot, role, cavity_dim)?,
            _ => raman_effective_local(params, slot, role, cavity_dim)?,
        }),
        PrimitiveKind::GPi => Some(dispersive_local(params, slot, cavity_dim)?),
        PrimitiveKind::R => Some(resonant_drive_local(
            params.omega_resonant,
            PI / 2.0,
            role.raman_level(),
            slot,
        )?),
        PrimitiveKind::RDagger => Some(resonant_drive_local(
            params.omega_resonant,
            -PI / 2.0,
            role.raman_level(),
            slot,
        )?),
        _ => None,
    })
}

pub(crate) fn exponentiate(h: &LocalOperator, t: f64) -> Result<LocalOperator> {
    let spectrum = Spectrum::of_matrix(h.matrix())?;
    Ok(LocalOperator::new(h.slots().to_vec(), spectrum.propagator_matrix(t)?))
}

impl Primitive {
    pub fn new(kind: PrimitiveKind, slot: usize, params: &DeviceParams, layout: &Layout, mode: Mode) -> Result<Self> {
        check_role(kind, slot, layout)?;
        Ok(Self {
            kind,
            slot,
            duration: duration(kind, slot, params)?,
            mode,
        })
    }

    /// Compact unitary with the cavity slot resolved for `layout`.
    pub fn local_unitary(&self, params: &DeviceParams, layout: &Layout) -> Result<LocalOperator> {
        let role = check_role(self.kind, self.slot, layout)?;
        let n = layout.cavity_dim();
        let op = if self.mode.is_simulated() {
            match hamiltonian_local(self.kind, self.slot, role, params, n, self.mode)? {
                Some(h) => exponentiate(&h, self.duration)?,
                None => analytic_local(self.kind, self.slot, role, n),
            }
        } else {
            analytic_local(self.kind, self.slot, role, n)
        };
        Ok(on_space(op, layout.space()))
    }

    pub fn unitary(&self, params: &DeviceParams, layout: &Layout) -> Result<UnitaryMatrix> {
        let op = self.local_unitary(params, layout)?;
        UnitaryMatrix::embed(op.matrix(), layout.space(), op.slots())
    }

    /// Population of `state` on inputs where the closed-form Raman swap is an
    /// idealization (`|j>|n>=1>` and `|2>|n>=2>` of this qubit). Always zero for
    /// other kinds.
    pub fn undefined_domain_population(&self, state: &StateVector, layout: &Layout) -> Result<f64> {
        if !self.kind.exchanges_photon() {
            return Ok(0.0);
        }
        let j = layout.role(self.slot)?.raman_level();
        let cavity = layout.cavity_slot();
        let slot = self.slot;
        Ok(state.population(|d| {
            (d[slot] == j && d[cavity] >= 1) || (d[slot] == 2 && d[cavity] >= 2)
        }))
    }
}

fn build(kind: PrimitiveKind, params: &DeviceParams, slot: usize, layout: &Layout, mode: Mode) -> Result<UnitaryMatrix> {
    Primitive::new(kind, slot, params, layout, mode)?.unitary(params, layout)
}

/// Raman photon emission/absorption on the emitter qubit.
pub fn g1(params: &DeviceParams, slot: usize, layout: &Layout, mode: Mode) -> Result<UnitaryMatrix> {
    build(PrimitiveKind::G1, params, slot, layout, mode)
}

/// Raman photon absorption/emission on an absorber qubit.
pub fn g2(params: &DeviceParams, slot: usize, layout: &Layout, mode: Mode) -> Result<UnitaryMatrix> {
    build(PrimitiveKind::G2, params, slot, layout, mode)
}

/// Photon-conditioned pi phase on |2> and |3> of a target qubit.
pub fn g_pi(params: &DeviceParams, slot: usize, layout: &Layout, mode: Mode) -> Result<UnitaryMatrix> {
    build(PrimitiveKind::GPi, params, slot, layout, mode)
}

pub fn r_pulse(params: &DeviceParams, slot: usize, layout: &Layout, dagger: bool, mode: Mode) -> Result<UnitaryMatrix> {
    let kind = if dagger {
        PrimitiveKind::RDagger
    } else {
        PrimitiveKind::R
    };
    build(kind, params, slot, layout, mode)
}

pub fn hadamard(slot: usize, layout: &Layout) -> Result<UnitaryMatrix> {
    let role = layout.role(slot)?;
    let op = on_space(
        analytic_local(PrimitiveKind::Hadamard, slot, role, layout.cavity_dim()),
        layout.space(),
    );
    UnitaryMatrix::embed(op.matrix(), layout.space(), op.slots())
}
