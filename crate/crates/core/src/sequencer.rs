//! Pulse sequences for the multiqubit gates and their composition into
//! unitaries.
//!
//! A sequence is a list of groups. Members of a simultaneous group act on
//! distinct qubits and start together; the group lasts as long as its longest
//! member. An ordered group runs its members back to back. In the simulated
//! modes a group is evolved piecewise: the Hamiltonian changes only when a
//! member ends, and within each piece the qubit–cavity terms are split into
//! commuting clusters that are exponentiated separately.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{
    cavity_coupling_full_local, cavity_shift_effective_local, dispersive_local, on_space,
    DeviceParams, Layout, QubitRole,
};
use crate::primitives::{
    analytic_local, check_role, duration, exponentiate, hamiltonian_local, Mode, PrimitiveKind,
};
use crate::quantum::{
    CMatrix, CVector, LocalOperator, Spectrum, StateVector, UnitaryMatrix, C64, ZERO,
};

/// Population tolerated on inputs where a closed-form Raman swap is only an
/// idealization before analytic composition refuses to continue.
pub const DOMAIN_TOL: f64 = 1e-10;

/// One primitive in a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PulseOp {
    pub kind: PrimitiveKind,
    pub slot: usize,
    pub duration: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PulseStep {
    members: Vec<PulseOp>,
    ordered: bool,
}

impl PulseStep {
    pub fn members(&self) -> &[PulseOp] {
        &self.members
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    pub fn duration(&self) -> f64 {
        if self.ordered {
            self.members.iter().map(|m| m.duration).sum()
        } else {
            self.members.iter().map(|m| m.duration).fold(0.0, f64::max)
        }
    }

    fn contains(&self, kind: PrimitiveKind) -> bool {
        self.members.iter().any(|m| m.kind == kind)
    }

    /// Qubits taking part in a cavity primitive during this step.
    fn cavity_slots(&self) -> Vec<usize> {
        self.members
            .iter()
            .filter(|m| m.kind.touches_cavity())
            .map(|m| m.slot)
            .collect()
    }
}

/// Members of one group, before durations are attached.
#[derive(Clone, Debug, PartialEq)]
pub struct StepSpec {
    pub members: Vec<(PrimitiveKind, usize)>,
    pub ordered: bool,
}

impl StepSpec {
    pub fn simultaneous(members: Vec<(PrimitiveKind, usize)>) -> Self {
        Self {
            members,
            ordered: false,
        }
    }

    pub fn ordered(members: Vec<(PrimitiveKind, usize)>) -> Self {
        Self {
            members,
            ordered: true,
        }
    }

    pub fn single(kind: PrimitiveKind, slot: usize) -> Self {
        Self::simultaneous(vec![(kind, slot)])
    }
}

/// One row of the JSON step list.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub group: usize,
    pub kind: PrimitiveKind,
    pub slot: usize,
    pub duration: f64,
    pub ordered: bool,
}

/// Ideal gate a built-in sequence implements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "gate")]
pub enum Gate {
    ControlledPhase { n: usize },
    Ntcnot { n: usize },
    Toffoli,
}

#[derive(Clone, Debug)]
pub struct PulseSequence {
    name: String,
    gate: Option<Gate>,
    steps: Vec<PulseStep>,
    params: DeviceParams,
    layout: Layout,
    warnings: Vec<String>,
}

impl PulseSequence {
    pub fn new(name: impl Into<String>, params: DeviceParams, layout: Layout, specs: Vec<StepSpec>) -> Result<Self> {
        let warnings = params.validate(layout.num_qubits())?;
        let mut steps = Vec::with_capacity(specs.len());
        for (index, spec) in specs.into_iter().enumerate() {
            steps.push(build_step(index, spec, &params, &layout)?);
        }
        Ok(Self {
            name: name.into(),
            gate: None,
            steps,
            params,
            layout,
            warnings,
        })
    }

    /// Same sequence on a cavity truncated at `cavity_dim` Fock states.
    pub fn with_cavity_dim(mut self, cavity_dim: usize) -> Result<Self> {
        self.layout = Layout::new(self.layout.roles().to_vec(), cavity_dim)?;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gate(&self) -> Option<Gate> {
        self.gate
    }

    fn implementing(mut self, gate: Gate) -> Self {
        self.gate = Some(gate);
        self
    }

    pub fn steps(&self) -> &[PulseStep] {
        &self.steps
    }

    pub fn params(&self) -> &DeviceParams {
        &self.params
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Messages about parameters outside the dispersive regime.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn total_duration(&self) -> f64 {
        self.steps.iter().map(PulseStep::duration).sum()
    }

    /// Oracle-style count of how many groups contain `kind`.
    pub fn count_groups_with(&self, kind: PrimitiveKind) -> usize {
        self.steps.iter().filter(|s| s.contains(kind)).count()
    }

    pub fn records(&self) -> Vec<StepRecord> {
        self.steps
            .iter()
            .enumerate()
            .flat_map(|(group, step)| {
                step.members.iter().map(move |m| StepRecord {
                    group,
                    kind: m.kind,
                    slot: m.slot,
                    duration: m.duration,
                    ordered: step.ordered,
                })
            })
            .collect()
    }

    /// Step ranges strictly between consecutive pairs of G1 groups (photon
    /// emitted, photon reabsorbed), during which the cavity may hold a photon.
    pub fn photon_windows(&self) -> Vec<Range<usize>> {
        let g1: Vec<usize> = self
            .steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(PrimitiveKind::G1))
            .map(|(i, _)| i)
            .collect();
        g1.chunks_exact(2).map(|p| p[0] + 1..p[1]).collect()
    }

    pub fn photon_possible(&self, step: usize) -> bool {
        self.photon_windows().iter().any(|w| w.contains(&step))
    }

    /// Qubits that see an idle cavity coupling during `step`: every qubit not
    /// undergoing a cavity primitive, while a photon may be present.
    pub fn idle_qubits(&self, step: usize) -> Vec<usize> {
        if !self.photon_possible(step) {
            return Vec::new();
        }
        let busy = self.steps[step].cavity_slots();
        (0..self.layout.num_qubits())
            .filter(|q| !busy.contains(q))
            .collect()
    }
}

fn build_step(index: usize, spec: StepSpec, params: &DeviceParams, layout: &Layout) -> Result<PulseStep> {
    let invalid = |reason: String| Error::InvalidStep { step: index, reason };
    if spec.members.is_empty() {
        return Err(invalid("empty group".into()));
    }
    let mut members = Vec::with_capacity(spec.members.len());
    for &(kind, slot) in &spec.members {
        if slot >= layout.num_qubits() {
            return Err(invalid(format!(
                "qubit slot {slot} out of range for {} qubits",
                layout.num_qubits()
            )));
        }
        check_role(kind, slot, layout)?;
        members.push(PulseOp {
            kind,
            slot,
            duration: duration(kind, slot, params)?,
        });
    }
    if !spec.ordered {
        for (i, m) in members.iter().enumerate() {
            if members[..i].iter().any(|o| o.slot == m.slot) {
                return Err(invalid(format!("qubit {} appears twice in a simultaneous group", m.slot)));
            }
        }
        let exchanging = members.iter().filter(|m| m.kind.exchanges_photon()).count();
        let cavity = members.iter().filter(|m| m.kind.touches_cavity()).count();
        if exchanging > 1 || (exchanging == 1 && cavity > 1) {
            return Err(invalid(
                "a photon-exchanging primitive cannot share its group with another cavity primitive".into(),
            ));
        }
    }
    Ok(PulseStep {
        members,
        ordered: spec.ordered,
    })
}

fn check_n(scheme: &'static str, n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::InvalidQubitCount { scheme, n, min })
    } else {
        Ok(())
    }
}

/// Default cavity truncation: the protocols never hold more than one photon.
pub const DEFAULT_CAVITY_DIM: usize = 2;

fn ncp_specs(n: usize) -> Vec<StepSpec> {
    use PrimitiveKind::*;
    let absorbers: Vec<usize> = (1..n - 1).collect();
    let target = n - 1;
    let mut specs = vec![StepSpec::single(G1, 0)];
    let mut first = vec![(R, 0)];
    first.extend(absorbers.iter().map(|&a| (RDagger, a)));
    specs.push(StepSpec::simultaneous(first));
    specs.extend(absorbers.iter().map(|&a| StepSpec::single(G2, a)));
    specs.push(StepSpec::ordered(vec![(RDagger, target), (GPi, target), (R, target)]));
    specs.extend(absorbers.iter().rev().map(|&a| StepSpec::single(G2, a)));
    let mut last = vec![(RDagger, 0)];
    last.extend(absorbers.iter().map(|&a| (R, a)));
    specs.push(StepSpec::simultaneous(last));
    specs.push(StepSpec::single(G1, 0));
    specs
}

fn ncp_layout(n: usize) -> Result<Layout> {
    let mut roles = vec![QubitRole::RamanEmitter];
    roles.extend(std::iter::repeat_n(QubitRole::RamanAbsorber, n - 2));
    roles.push(QubitRole::DispersiveTarget);
    Layout::new(roles, DEFAULT_CAVITY_DIM)
}

/// n-qubit controlled phase: qubit 1 emits the photon, qubits 2..n-1 absorb it
/// in turn, qubit n picks up the conditional sign.
pub fn ncp_sequence(n: usize, params: &DeviceParams) -> Result<PulseSequence> {
    check_n("n-qubit controlled phase", n, 3)?;
    Ok(PulseSequence::new(format!("ncp{n}"), params.clone(), ncp_layout(n)?, ncp_specs(n))?
        .implementing(Gate::ControlledPhase { n }))
}

/// Three-qubit controlled phase in seven groups.
pub fn cp3_sequence(params: &DeviceParams) -> Result<PulseSequence> {
    Ok(PulseSequence::new("cp3", params.clone(), ncp_layout(3)?, ncp_specs(3))?
        .implementing(Gate::ControlledPhase { n: 3 }))
}

/// Controlled phase conjugated by Hadamards on the target.
pub fn toffoli_sequence(params: &DeviceParams) -> Result<PulseSequence> {
    let mut specs = vec![StepSpec::single(PrimitiveKind::Hadamard, 2)];
    specs.extend(ncp_specs(3));
    specs.push(StepSpec::single(PrimitiveKind::Hadamard, 2));
    Ok(PulseSequence::new("toffoli", params.clone(), ncp_layout(3)?, specs)?.implementing(Gate::Toffoli))
}

pub(crate) fn ntcnot_layout(n: usize) -> Result<Layout> {
    let mut roles = vec![QubitRole::RamanEmitter];
    roles.extend(std::iter::repeat_n(QubitRole::DispersiveTarget, n - 1));
    Layout::new(roles, DEFAULT_CAVITY_DIM)
}

pub(crate) fn ntcnot_specs(n: usize) -> Vec<StepSpec> {
    use PrimitiveKind::*;
    let targets: Vec<usize> = (1..n).collect();
    let with = |first: PrimitiveKind, rest: PrimitiveKind| {
        let mut v = vec![(first, 0)];
        v.extend(targets.iter().map(|&t| (rest, t)));
        StepSpec::simultaneous(v)
    };
    vec![
        StepSpec::single(G1, 0),
        with(R, RDagger),
        StepSpec::simultaneous(targets.iter().map(|&t| (GPi, t)).collect()),
        with(RDagger, R),
        StepSpec::single(G1, 0),
    ]
}

/// One control (qubit 1) flipping n-1 targets in the |+>/|-> basis.
pub fn ntcnot_sequence(n: usize, params: &DeviceParams) -> Result<PulseSequence> {
    check_n("multi-target CNOT", n, 2)?;
    Ok(PulseSequence::new(format!("ntcnot{n}"), params.clone(), ntcnot_layout(n)?, ntcnot_specs(n))?
        .implementing(Gate::Ntcnot { n }))
}

/// Which qubits outside the active cavity primitives keep their cavity
/// coupling while a photon may be present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdleCouplings {
    Off,
    /// Dispersive coupling of the target qubits.
    Targets,
    /// Targets plus the |2> <-> |3> cavity coupling of the Raman qubits.
    All,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComposeOptions {
    /// `None` means [`IdleCouplings::Targets`] for [`Mode::SimulatedFull`] and
    /// [`IdleCouplings::Off`] otherwise; never used in [`Mode::Analytic`].
    pub idle_couplings: Option<IdleCouplings>,
    /// Evaluation points inside each piecewise-constant segment, used for
    /// peak populations. Zero evaluates segment ends only.
    pub samples_per_segment: usize,
}

impl ComposeOptions {
    pub fn with_idle(idle: IdleCouplings) -> Self {
        Self {
            idle_couplings: Some(idle),
            ..Self::default()
        }
    }

    pub fn idle_for(&self, mode: Mode) -> IdleCouplings {
        match mode {
            Mode::Analytic => IdleCouplings::Off,
            Mode::SimulatedEffective => self.idle_couplings.unwrap_or(IdleCouplings::Off),
            Mode::SimulatedFull => self.idle_couplings.unwrap_or(IdleCouplings::Targets),
        }
    }
}

struct Term {
    op: LocalOperator,
    /// Acts on the cavity only through the photon number.
    number_diagonal: bool,
}

struct Engine<'a> {
    seq: &'a PulseSequence,
    mode: Mode,
    idle: IdleCouplings,
    samples: usize,
    check_domain: bool,
}

type Observer<'o> = dyn FnMut(usize, &CMatrix) + 'o;

impl Engine<'_> {
    fn layout(&self) -> &Layout {
        self.seq.layout()
    }

    fn run(&self, steps: Range<usize>, mut cols: CMatrix, obs: &mut Observer<'_>) -> Result<CMatrix> {
        for index in steps {
            let step = &self.seq.steps[index];
            cols = if self.mode.is_simulated() {
                self.simulate_step(index, step, cols, obs)?
            } else {
                self.analytic_step(index, step, cols, obs)?
            };
        }
        Ok(cols)
    }

    fn analytic_op(&self, m: &PulseOp) -> Result<LocalOperator> {
        let layout = self.layout();
        let role = layout.role(m.slot)?;
        Ok(on_space(
            analytic_local(m.kind, m.slot, role, layout.cavity_dim()),
            layout.space(),
        ))
    }

    fn check_domain(&self, index: usize, m: &PulseOp, cols: &CMatrix) -> Result<()> {
        if !self.check_domain || !m.kind.exchanges_photon() {
            return Ok(());
        }
        let layout = self.layout();
        let space = layout.space();
        let j = layout.role(m.slot)?.raman_level();
        let cavity = layout.cavity_slot();
        let mut worst: f64 = 0.0;
        for col in cols.column_iter() {
            let mut p = 0.0;
            for (i, a) in col.iter().enumerate() {
                let level = space.digit(i, m.slot);
                let n = space.digit(i, cavity);
                if (level == j && n >= 1) || (level == 2 && n >= 2) {
                    p += a.norm_sqr();
                }
            }
            worst = worst.max(p);
        }
        if worst > DOMAIN_TOL {
            return Err(Error::UndefinedDomain {
                step: index,
                kind: m.kind.name(),
                slot: m.slot,
                population: worst,
            });
        }
        Ok(())
    }

    fn analytic_step(&self, index: usize, step: &PulseStep, mut cols: CMatrix, obs: &mut Observer<'_>) -> Result<CMatrix> {
        let space = self.layout().space();
        if !step.ordered {
            for m in &step.members {
                self.check_domain(index, m, &cols)?;
            }
        }
        for m in &step.members {
            if step.ordered {
                self.check_domain(index, m, &cols)?;
            }
            cols = self.analytic_op(m)?.apply_to_matrix(space, &cols)?;
            obs(index, &cols);
        }
        Ok(cols)
    }

    fn member_term(&self, m: &PulseOp) -> Result<Option<Term>> {
        let layout = self.layout();
        let role = layout.role(m.slot)?;
        let h = hamiltonian_local(m.kind, m.slot, role, self.seq.params(), layout.cavity_dim(), self.mode)?;
        Ok(h.map(|op| Term {
            op: on_space(op, layout.space()),
            number_diagonal: !m.kind.exchanges_photon(),
        }))
    }

    fn idle_terms(&self, index: usize) -> Result<Vec<Term>> {
        let layout = self.layout();
        let params = self.seq.params();
        let n = layout.cavity_dim();
        let keep = |q: &usize| match self.idle {
            IdleCouplings::Off => false,
            IdleCouplings::Targets => layout.roles()[*q] == QubitRole::DispersiveTarget,
            IdleCouplings::All => true,
        };
        self.seq
            .idle_qubits(index)
            .into_iter()
            .filter(keep)
            .map(|q| {
                let (op, number_diagonal) = match layout.role(q)? {
                    QubitRole::DispersiveTarget => (dispersive_local(params, q, n)?, true),
                    _ if self.mode == Mode::SimulatedFull => (cavity_coupling_full_local(params, q, n)?, false),
                    _ => (cavity_shift_effective_local(params, q, n)?, true),
                };
                Ok(Term {
                    op: on_space(op, layout.space()),
                    number_diagonal,
                })
            })
            .collect()
    }

    /// Sums terms into clusters that commute with one another. Terms sharing
    /// a qubit are merged; terms sharing only the cavity are merged unless both
    /// act on it through the photon number alone.
    fn clusters(&self, terms: &[Term]) -> Result<Vec<LocalOperator>> {
        let cavity = self.layout().cavity_slot();
        let mut parent: Vec<usize> = (0..terms.len()).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                let (a, b) = (&terms[i], &terms[j]);
                let shared: Vec<usize> = a
                    .op
                    .slots()
                    .iter()
                    .copied()
                    .filter(|s| b.op.slots().contains(s))
                    .collect();
                let merge = shared.iter().any(|&s| s != cavity)
                    || (!shared.is_empty() && !(a.number_diagonal && b.number_diagonal));
                if merge {
                    let (ra, rb) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ra] = rb;
                }
            }
        }
        let space = self.layout().space();
        let mut roots: Vec<usize> = Vec::new();
        for i in 0..terms.len() {
            let r = find(&mut parent, i);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        roots
            .into_iter()
            .map(|r| {
                let members: Vec<&Term> = (0..terms.len())
                    .filter(|&i| find(&mut parent, i) == r)
                    .map(|i| &terms[i])
                    .collect();
                let mut slots: Vec<usize> = members.iter().flat_map(|t| t.op.slots().to_vec()).collect();
                slots.sort_unstable();
                slots.dedup();
                let mut sum: Option<CMatrix> = None;
                for t in members {
                    let m = t.op.widen(space, &slots)?;
                    sum = Some(match sum {
                        Some(s) => s + m,
                        None => m,
                    });
                }
                Ok(LocalOperator::new(slots, sum.expect("cluster has a member")))
            })
            .collect()
    }

    fn segment(&self, index: usize, active: &[PulseOp], idle: &[Term], dt: f64, cols: CMatrix, obs: &mut Observer<'_>) -> Result<CMatrix> {
        let mut terms = Vec::new();
        for m in active {
            if let Some(t) = self.member_term(m)? {
                terms.push(t);
            }
        }
        terms.extend(idle.iter().map(|t| Term {
            op: t.op.clone(),
            number_diagonal: t.number_diagonal,
        }));
        if terms.is_empty() || dt == 0.0 {
            return Ok(cols);
        }
        let space = self.layout().space();
        let clusters = self.clusters(&terms)?;
        let spectra = clusters
            .iter()
            .map(|c| Spectrum::of_matrix(c.matrix()).map(|s| (c.slots().to_vec(), s)))
            .collect::<Result<Vec<_>>>()?;
        let evolve = |t: f64, start: &CMatrix| -> Result<CMatrix> {
            let mut out = start.clone();
            for (slots, s) in &spectra {
                let u = LocalOperator::new(slots.clone(), s.propagator_matrix(t)?);
                out = u.apply_to_matrix(space, &out)?;
            }
            Ok(out)
        };
        let samples = self.samples.max(1);
        let mut last = None;
        for k in 1..=samples {
            let out = evolve(dt * k as f64 / samples as f64, &cols)?;
            obs(index, &out);
            last = Some(out);
        }
        Ok(last.expect("at least one sample"))
    }

    fn simulate_step(&self, index: usize, step: &PulseStep, mut cols: CMatrix, obs: &mut Observer<'_>) -> Result<CMatrix> {
        let space = self.layout().space();
        let idle = self.idle_terms(index)?;
        if step.ordered {
            for m in &step.members {
                if m.kind.is_idealized() {
                    cols = self.analytic_op(m)?.apply_to_matrix(space, &cols)?;
                    obs(index, &cols);
                } else {
                    cols = self.segment(index, std::slice::from_ref(m), &idle, m.duration, cols, obs)?;
                }
            }
            return Ok(cols);
        }
        for m in step.members.iter().filter(|m| m.kind.is_idealized()) {
            cols = self.analytic_op(m)?.apply_to_matrix(space, &cols)?;
            obs(index, &cols);
        }
        let timed: Vec<PulseOp> = step.members.iter().filter(|m| !m.kind.is_idealized()).copied().collect();
        let mut ends: Vec<f64> = timed.iter().map(|m| m.duration).collect();
        ends.sort_by(f64::total_cmp);
        ends.dedup();
        let mut start = 0.0;
        for end in ends {
            let active: Vec<PulseOp> = timed.iter().filter(|m| m.duration > start).copied().collect();
            cols = self.segment(index, &active, &idle, end - start, cols, obs)?;
            start = end;
        }
        Ok(cols)
    }
}

fn engine<'a>(seq: &'a PulseSequence, mode: Mode, opts: &ComposeOptions, check_domain: bool) -> Engine<'a> {
    Engine {
        seq,
        mode,
        idle: opts.idle_for(mode),
        samples: opts.samples_per_segment,
        check_domain: check_domain && !mode.is_simulated(),
    }
}

/// Ordered product of the step unitaries.
pub fn compose(seq: &PulseSequence, mode: Mode) -> Result<UnitaryMatrix> {
    compose_with(seq, mode, &ComposeOptions::default())
}

pub fn compose_with(seq: &PulseSequence, mode: Mode, opts: &ComposeOptions) -> Result<UnitaryMatrix> {
    compose_steps(seq, 0..seq.step_count(), mode, opts)
}

/// Product of the unitaries of `steps` only.
pub fn compose_steps(seq: &PulseSequence, steps: Range<usize>, mode: Mode, opts: &ComposeOptions) -> Result<UnitaryMatrix> {
    if steps.end > seq.step_count() || steps.start > steps.end {
        return Err(Error::InvalidStep {
            step: steps.end,
            reason: format!("step range beyond {} steps", seq.step_count()),
        });
    }
    let space = seq.layout().space();
    let dim = space.total_dim();
    let cols = engine(seq, mode, opts, false).run(steps, CMatrix::identity(dim, dim), &mut |_, _| {})?;
    Ok(UnitaryMatrix::from_parts(space.clone(), cols))
}

/// Propagates columns through `steps` without domain checks.
pub(crate) fn propagate_steps(
    seq: &PulseSequence,
    steps: Range<usize>,
    mode: Mode,
    opts: &ComposeOptions,
    cols: CMatrix,
) -> Result<CMatrix> {
    engine(seq, mode, opts, false).run(steps, cols, &mut |_, _| {})
}

/// Images of a block of input states, with the largest population on level
/// |3> of any qubit seen at any evaluation point.
#[derive(Clone, Debug)]
pub struct Propagation {
    pub outputs: CMatrix,
    pub max_level3: f64,
}

/// Population on level |3> of any qubit, per column.
pub(crate) fn level3_mask(layout: &Layout) -> Vec<bool> {
    let space = layout.space();
    (0..space.total_dim())
        .map(|i| (0..layout.num_qubits()).any(|q| space.digit(i, q) == 3))
        .collect()
}

pub(crate) fn masked_max(cols: &CMatrix, mask: &[bool]) -> f64 {
    cols.column_iter()
        .map(|c| {
            c.iter()
                .zip(mask)
                .filter(|(_, &m)| m)
                .map(|(a, _)| a.norm_sqr())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Propagates each column of `inputs` through the sequence. In analytic mode
/// this fails if an input reaches a Raman swap outside its defined domain.
pub fn propagate(seq: &PulseSequence, mode: Mode, opts: &ComposeOptions, inputs: &CMatrix) -> Result<Propagation> {
    let dim = seq.layout().space().total_dim();
    if inputs.nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: inputs.nrows(),
        });
    }
    let mask = level3_mask(seq.layout());
    let mut peak = masked_max(inputs, &mask);
    let outputs = engine(seq, mode, opts, true).run(0..seq.step_count(), inputs.clone(), &mut |_, c| {
        peak = peak.max(masked_max(c, &mask));
    })?;
    Ok(Propagation {
        outputs,
        max_level3: peak,
    })
}

/// A state followed through a sequence.
#[derive(Clone, Debug)]
pub struct Trace {
    /// `states[0]` is the input, `states[k]` the state after step `k - 1`.
    pub states: Vec<StateVector>,
    /// Largest level-|3> population seen during each step.
    pub peak_level3: Vec<f64>,
}

impl Trace {
    pub fn max_level3(&self) -> f64 {
        self.peak_level3.iter().copied().fold(0.0, f64::max)
    }
}

pub fn trace(seq: &PulseSequence, state: &StateVector, mode: Mode, opts: &ComposeOptions) -> Result<Trace> {
    if state.space() != seq.layout().space() {
        return Err(Error::SpaceMismatch);
    }
    let space = seq.layout().space();
    let mask = level3_mask(seq.layout());
    let eng = engine(seq, mode, opts, true);
    let mut cols = CMatrix::from_column_slice(space.total_dim(), 1, state.amplitudes().as_slice());
    let mut states = vec![state.clone()];
    let mut peaks = Vec::with_capacity(seq.step_count());
    for index in 0..seq.step_count() {
        let mut peak = masked_max(&cols, &mask);
        cols = eng.run(index..index + 1, cols, &mut |_, c| peak = peak.max(masked_max(c, &mask)))?;
        peaks.push(peak);
        states.push(StateVector::from_parts(space.clone(), CVector::from_column_slice(cols.as_slice())));
    }
    Ok(Trace {
        states,
        peak_level3: peaks,
    })
}

/// Unitary of a single primitive evolved for its own duration, ignoring idle
/// couplings. Exposed for checks against the closed forms.
pub fn primitive_propagator(seq: &PulseSequence, op: &PulseOp, mode: Mode) -> Result<LocalOperator> {
    let layout = seq.layout();
    let role = layout.role(op.slot)?;
    let local = match hamiltonian_local(op.kind, op.slot, role, seq.params(), layout.cavity_dim(), mode)? {
        Some(h) if mode.is_simulated() => exponentiate(&h, op.duration)?,
        _ => analytic_local(op.kind, op.slot, role, layout.cavity_dim()),
    };
    Ok(on_space(local, layout.space()))
}

#[derive(Clone, Debug)]
pub struct LabeledState {
    pub label: String,
    pub state: StateVector,
}

/// Computational basis states with the cavity in vacuum, labelled by their
/// bit strings (qubit 1 first).
pub fn computational_basis(layout: &Layout) -> Result<Vec<LabeledState>> {
    let n = layout.num_qubits();
    (0..1usize << n)
        .map(|k| {
            let mut digits: Vec<usize> = (0..n).map(|q| (k >> (n - 1 - q)) & 1).collect();
            let label = digits.iter().map(|d| d.to_string()).collect();
            digits.push(0);
            Ok(LabeledState {
                label,
                state: StateVector::basis(layout.space(), &digits)?,
            })
        })
        .collect()
}

/// Qubit 1 in |0>/|1>, every other qubit in |+>/|->, cavity in vacuum.
pub fn control_plus_minus_basis(layout: &Layout) -> Result<Vec<LabeledState>> {
    let n = layout.num_qubits();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let level = |k: usize| {
        let mut v = CVector::zeros(crate::quantum::QUDIT_DIM);
        v[k] = C64::new(1.0, 0.0);
        v
    };
    let pm = |sign: f64| {
        let mut v = CVector::zeros(crate::quantum::QUDIT_DIM);
        v[0] = C64::new(s, 0.0);
        v[1] = C64::new(sign * s, 0.0);
        v
    };
    let mut vacuum = CVector::zeros(layout.cavity_dim());
    vacuum[0] = C64::new(1.0, 0.0);
    (0..1usize << n)
        .map(|k| {
            let bits: Vec<usize> = (0..n).map(|q| (k >> (n - 1 - q)) & 1).collect();
            let mut label = bits[0].to_string();
            let mut factors = vec![level(bits[0])];
            for &b in &bits[1..] {
                label.push(if b == 0 { '+' } else { '-' });
                factors.push(pm(if b == 0 { 1.0 } else { -1.0 }));
            }
            factors.push(vacuum.clone());
            Ok(LabeledState {
                label,
                state: StateVector::product(layout.space(), &factors)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruthRow {
    pub input: String,
    /// Amplitude on each labelled basis state, in table label order.
    pub amplitudes: Vec<C64>,
    /// Probability outside the labelled states.
    pub leakage: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruthTable {
    pub labels: Vec<String>,
    pub rows: Vec<TruthRow>,
}

impl TruthTable {
    fn from_outputs(basis: &[LabeledState], outputs: &CMatrix) -> Self {
        let rows = basis
            .iter()
            .enumerate()
            .map(|(k, input)| {
                let out = outputs.column(k);
                let amplitudes: Vec<C64> = basis
                    .iter()
                    .map(|b| b.state.amplitudes().iter().zip(out.iter()).map(|(x, y)| x.conj() * y).sum())
                    .collect();
                let kept: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
                TruthRow {
                    input: input.label.clone(),
                    amplitudes,
                    leakage: (out.norm_squared() - kept).max(0.0),
                }
            })
            .collect();
        Self {
            labels: basis.iter().map(|b| b.label.clone()).collect(),
            rows,
        }
    }

    /// Largest entrywise difference from a table of expected amplitudes.
    pub fn max_deviation(&self, expected: &[Vec<C64>]) -> f64 {
        self.rows
            .iter()
            .zip(expected)
            .flat_map(|(r, e)| r.amplitudes.iter().zip(e).map(|(a, b)| (a - b).norm()))
            .fold(0.0, f64::max)
    }

    pub fn max_leakage(&self) -> f64 {
        self.rows.iter().map(|r| r.leakage).fold(0.0, f64::max)
    }

    /// `input,re(<label>),im(<label>),...,leakage` with one row per input.
    pub fn to_csv(&self, format: impl Fn(f64) -> String) -> String {
        let mut out = String::from("input");
        for l in &self.labels {
            out.push_str(&format!(",re({l}),im({l})"));
        }
        out.push_str(",leakage\n");
        for r in &self.rows {
            out.push_str(&r.input);
            for a in &r.amplitudes {
                out.push(',');
                out.push_str(&format(a.re));
                out.push(',');
                out.push_str(&format(a.im));
            }
            out.push(',');
            out.push_str(&format(r.leakage));
            out.push('\n');
        }
        out
    }
}

fn stack(basis: &[LabeledState]) -> Result<CMatrix> {
    let first = basis.first().ok_or(Error::EmptySubspace)?;
    let dim = first.state.space().total_dim();
    let mut cols = CMatrix::from_element(dim, basis.len(), ZERO);
    for (k, b) in basis.iter().enumerate() {
        if b.state.space() != first.state.space() {
            return Err(Error::SpaceMismatch);
        }
        cols.set_column(k, b.state.amplitudes());
    }
    Ok(cols)
}

/// Output amplitudes of `u` over the labelled basis for each labelled input.
pub fn truth_table(u: &UnitaryMatrix, basis: &[LabeledState]) -> Result<TruthTable> {
    let cols = stack(basis)?;
    if cols.nrows() != u.space().total_dim() {
        return Err(Error::SpaceMismatch);
    }
    Ok(TruthTable::from_outputs(basis, &(u.matrix() * cols)))
}

/// Truth table of a sequence, propagating only the listed inputs.
pub fn sequence_truth_table(seq: &PulseSequence, mode: Mode, opts: &ComposeOptions, basis: &[LabeledState]) -> Result<TruthTable> {
    let cols = stack(basis)?;
    let p = propagate(seq, mode, opts, &cols)?;
    Ok(TruthTable::from_outputs(basis, &p.outputs))
}
