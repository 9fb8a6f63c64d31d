use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::space::HilbertSpace;
use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const UNITARITY_TOL: f64 = 1e-10;
pub const HERMITICITY_TOL: f64 = 1e-12;
pub const NORM_TOL: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Index bookkeeping for acting on a subset of subsystems.
///
/// For global basis index `i`, `local[i]` is the index within the tensor
/// product of the selected slots and `rest[i]` is `i` with those digits zeroed.
/// `offsets[a]` is the global offset contributed by local index `a`.
#[derive(Clone, Debug)]
pub(crate) struct SlotMap {
    local: Vec<usize>,
    rest: Vec<usize>,
    offsets: Vec<usize>,
}

impl SlotMap {
    pub(crate) fn new(space: &HilbertSpace, slots: &[usize]) -> Result<Self> {
        for (k, &s) in slots.iter().enumerate() {
            space.check_slot(s)?;
            if slots[..k].contains(&s) {
                return Err(Error::DuplicateSlot(s));
            }
        }
        let local_dims: Vec<usize> = slots.iter().map(|&s| space.dim(s)).collect();
        let local_dim: usize = local_dims.iter().product();
        let mut local_strides = vec![1; slots.len()];
        for k in (0..slots.len().saturating_sub(1)).rev() {
            local_strides[k] = local_strides[k + 1] * local_dims[k + 1];
        }
        let offsets = (0..local_dim)
            .map(|a| {
                slots
                    .iter()
                    .enumerate()
                    .map(|(k, &s)| ((a / local_strides[k]) % local_dims[k]) * space.stride(s))
                    .sum()
            })
            .collect::<Vec<usize>>();
        let n = space.total_dim();
        let mut local = vec![0; n];
        let mut rest = vec![0; n];
        for i in 0..n {
            let a: usize = slots
                .iter()
                .enumerate()
                .map(|(k, &s)| space.digit(i, s) * local_strides[k])
                .sum();
            local[i] = a;
            rest[i] = i - offsets[a];
        }
        Ok(Self {
            local,
            rest,
            offsets,
        })
    }

    pub(crate) fn local_dim(&self) -> usize {
        self.offsets.len()
    }

    fn check(&self, op: &CMatrix) -> Result<()> {
        if op.nrows() != self.local_dim() || op.ncols() != self.local_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.local_dim(),
                found: op.nrows().max(op.ncols()),
            });
        }
        Ok(())
    }

    fn embed(&self, op: &CMatrix) -> CMatrix {
        let n = self.local.len();
        let d = self.local_dim();
        let mut out = CMatrix::zeros(n, n);
        for j in 0..n {
            let b = self.local[j];
            let base = self.rest[j];
            for a in 0..d {
                let x = op[(a, b)];
                if x != ZERO {
                    out[(base + self.offsets[a], j)] = x;
                }
            }
        }
        out
    }

    /// `out = (op ⊗ I) v`, reusing `scratch` for the gathered local block.
    fn apply_into(&self, op: &CMatrix, v: &[C64], out: &mut [C64], scratch: &mut Vec<C64>) {
        let d = self.local_dim();
        scratch.resize(d, ZERO);
        let n = v.len();
        let mut seen = vec![false; n];
        for i in 0..n {
            let base = self.rest[i];
            if seen[base] {
                continue;
            }
            seen[base] = true;
            for (b, slot) in scratch.iter_mut().enumerate() {
                *slot = v[base + self.offsets[b]];
            }
            for a in 0..d {
                let mut acc = ZERO;
                for (b, &x) in scratch.iter().enumerate() {
                    acc += op[(a, b)] * x;
                }
                out[base + self.offsets[a]] = acc;
            }
        }
    }
}

/// Returns the global operator acting as `local_op` on `slots` (in the listed
/// order) and as the identity on every other subsystem.
pub fn tensor_embed(local_op: &CMatrix, space: &HilbertSpace, slots: &[usize]) -> Result<CMatrix> {
    let map = SlotMap::new(space, slots)?;
    map.check(local_op)?;
    Ok(map.embed(local_op))
}

/// An operator on an ordered subset of a space's subsystems, kept in its
/// compact form until it has to be applied.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    slots: Vec<usize>,
    matrix: CMatrix,
}

impl LocalOperator {
    pub fn new(slots: Vec<usize>, matrix: CMatrix) -> Self {
        Self { slots, matrix }
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn embed(&self, space: &HilbertSpace) -> Result<CMatrix> {
        tensor_embed(&self.matrix, space, &self.slots)
    }

    /// Re-expresses the operator on a larger ordered slot list.
    pub fn widen(&self, space: &HilbertSpace, slots: &[usize]) -> Result<CMatrix> {
        let sub = space.subspace(slots)?;
        let positions = self
            .slots
            .iter()
            .map(|s| {
                slots.iter().position(|t| t == s).ok_or(Error::SlotOutOfRange {
                    slot: *s,
                    len: slots.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        tensor_embed(&self.matrix, &sub, &positions)
    }

    pub(crate) fn apply_to_vector(&self, space: &HilbertSpace, v: &CVector) -> Result<CVector> {
        let map = SlotMap::new(space, &self.slots)?;
        map.check(&self.matrix)?;
        let mut out = CVector::zeros(v.len());
        let mut scratch = Vec::new();
        map.apply_into(&self.matrix, v.as_slice(), out.as_mut_slice(), &mut scratch);
        Ok(out)
    }

    /// `(op ⊗ I) · m`, column by column.
    pub(crate) fn apply_to_matrix(&self, space: &HilbertSpace, m: &CMatrix) -> Result<CMatrix> {
        let map = SlotMap::new(space, &self.slots)?;
        map.check(&self.matrix)?;
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        let mut scratch = Vec::new();
        for j in 0..m.ncols() {
            let col: Vec<C64> = m.column(j).iter().copied().collect();
            let mut res = vec![ZERO; col.len()];
            map.apply_into(&self.matrix, &col, &mut res, &mut scratch);
            out.column_mut(j).copy_from_slice(&res);
        }
        Ok(out)
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn unitarity_deviation(m: &CMatrix) -> f64 {
    let prod = m.adjoint() * m;
    let n = m.nrows();
    (prod - CMatrix::identity(n, n)).norm()
}

/// Complex amplitudes over a [`HilbertSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(space: HilbertSpace, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { space, amplitudes })
    }

    pub fn basis(space: &HilbertSpace, digits: &[usize]) -> Result<Self> {
        let index = space.index_of(digits)?;
        let mut amplitudes = CVector::zeros(space.total_dim());
        amplitudes[index] = ONE;
        Ok(Self {
            space: space.clone(),
            amplitudes,
        })
    }

    /// Tensor product of per-subsystem states, one vector per subsystem.
    pub fn product(space: &HilbertSpace, factors: &[CVector]) -> Result<Self> {
        if factors.len() != space.num_subsystems() {
            return Err(Error::DimensionMismatch {
                expected: space.num_subsystems(),
                found: factors.len(),
            });
        }
        for (slot, f) in factors.iter().enumerate() {
            if f.len() != space.dim(slot) {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(slot),
                    found: f.len(),
                });
            }
        }
        let amplitudes = CVector::from_fn(space.total_dim(), |i, _| {
            factors
                .iter()
                .enumerate()
                .map(|(slot, f)| f[space.digit(i, slot)])
                .product()
        });
        Ok(Self {
            space: space.clone(),
            amplitudes,
        })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<C64> {
        Ok(self.amplitudes[self.space.index_of(digits)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Total probability of the basis states whose digits satisfy `pred`.
    pub fn population<F: Fn(&[usize]) -> bool>(&self, pred: F) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| pred(&self.space.digits_of(*i)))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Probability of finding `slot` in `level`.
    pub fn level_population(&self, slot: usize, level: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.digit(*i, slot) == level)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn apply_local(&self, op: &LocalOperator) -> Result<Self> {
        Ok(Self {
            space: self.space.clone(),
            amplitudes: op.apply_to_vector(&self.space, &self.amplitudes)?,
        })
    }

    pub(crate) fn from_parts(space: HilbertSpace, amplitudes: CVector) -> Self {
        debug_assert_eq!(space.total_dim(), amplitudes.len());
        Self { space, amplitudes }
    }
}

/// Dense unitary on a [`HilbertSpace`].
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    space: HilbertSpace,
    entries: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(space: HilbertSpace, entries: CMatrix) -> Result<Self> {
        let n = space.total_dim();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.nrows().max(entries.ncols()),
            });
        }
        let deviation = unitarity_deviation(&entries);
        if deviation.is_nan() || deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { space, entries })
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let n = space.total_dim();
        Self {
            space: space.clone(),
            entries: CMatrix::identity(n, n),
        }
    }

    pub fn embed(local_op: &CMatrix, space: &HilbertSpace, slots: &[usize]) -> Result<Self> {
        Self::new(space.clone(), tensor_embed(local_op, space, slots)?)
    }

    pub(crate) fn from_parts(space: HilbertSpace, entries: CMatrix) -> Self {
        Self { space, entries }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            entries: self.entries.adjoint(),
        }
    }

    /// `self · other`: `other` acts first.
    pub fn then_after(&self, other: &UnitaryMatrix) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self {
            space: self.space.clone(),
            entries: &self.entries * &other.entries,
        })
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.space != state.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(StateVector::from_parts(
            self.space.clone(),
            &self.entries * &state.amplitudes,
        ))
    }

    /// Applies `op ⊗ I` after this unitary.
    pub fn left_apply_local(&self, op: &LocalOperator) -> Result<Self> {
        Ok(Self {
            space: self.space.clone(),
            entries: op.apply_to_matrix(&self.space, &self.entries)?,
        })
    }

    /// Frobenius norm of `U^dagger U - I`.
    pub fn unitarity_error(&self) -> f64 {
        unitarity_deviation(&self.entries)
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }
}

/// Hermitian operator in angular-frequency units (rad/s).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    space: HilbertSpace,
    entries: CMatrix,
}

impl HermitianOperator {
    /// Checks `H = H^dagger` to [`HERMITICITY_TOL`] relative to the largest entry.
    pub fn new(space: HilbertSpace, entries: CMatrix) -> Result<Self> {
        let n = space.total_dim();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.nrows().max(entries.ncols()),
            });
        }
        check_hermitian(&entries)?;
        Ok(Self { space, entries })
    }

    pub fn zero(space: &HilbertSpace) -> Self {
        let n = space.total_dim();
        Self {
            space: space.clone(),
            entries: CMatrix::zeros(n, n),
        }
    }

    pub fn embed(local_op: &CMatrix, space: &HilbertSpace, slots: &[usize]) -> Result<Self> {
        Self::new(space.clone(), tensor_embed(local_op, space, slots)?)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn element(&self, bra: &[usize], ket: &[usize]) -> Result<C64> {
        Ok(self.entries[(self.space.index_of(bra)?, self.space.index_of(ket)?)])
    }

    pub fn plus(&self, other: &HermitianOperator) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self {
            space: self.space.clone(),
            entries: &self.entries + &other.entries,
        })
    }

    pub fn commutator_norm(&self, other: &HermitianOperator) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let ab = &self.entries * &other.entries;
        let ba = &other.entries * &self.entries;
        Ok((ab - ba).norm())
    }
}

pub(crate) fn check_hermitian(m: &CMatrix) -> Result<()> {
    let deviation = hermiticity_deviation(m);
    if deviation.is_nan() || deviation > HERMITICITY_TOL * max_abs(m).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}
