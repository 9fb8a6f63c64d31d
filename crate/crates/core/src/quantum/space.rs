use serde::Serialize;

use crate::error::{Error, Result};

/// Number of levels carried by every qubit system: |0>, |1> (logical) plus the
/// auxiliary |2> and |3>.
pub const QUDIT_DIM: usize = 4;

/// Ordered tensor product of subsystems.
///
/// Basis states are indexed as a mixed-radix number with the *last* subsystem
/// least significant. The factories in this crate always put the qubit systems
/// first (qubit 1, qubit 2, ...) and the cavity last.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HilbertSpace {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl HilbertSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDimensions("no subsystems".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidDimensions(format!("subsystem of dimension {d}")));
        }
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len() - 1).rev() {
            strides[i] = strides[i + 1]
                .checked_mul(dims[i + 1])
                .ok_or_else(|| Error::InvalidDimensions("total dimension overflows".into()))?;
        }
        let total = strides[0]
            .checked_mul(dims[0])
            .ok_or_else(|| Error::InvalidDimensions("total dimension overflows".into()))?;
        Ok(Self {
            dims,
            strides,
            total,
        })
    }

    /// `n_qudits` four-level systems followed by a cavity truncated at
    /// `cavity_dim` Fock states.
    pub fn qudits_with_cavity(n_qudits: usize, cavity_dim: usize) -> Result<Self> {
        if n_qudits == 0 {
            return Err(Error::InvalidDimensions("at least one qudit required".into()));
        }
        if cavity_dim < 2 {
            return Err(Error::InvalidDimensions(format!(
                "cavity truncation must be >= 2, got {cavity_dim}"
            )));
        }
        let mut dims = vec![QUDIT_DIM; n_qudits];
        dims.push(cavity_dim);
        Self::new(dims)
    }

    /// `n` two-level systems; the home of ideal gate matrices.
    pub fn qubits(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimensions("at least one qubit required".into()));
        }
        Self::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, slot: usize) -> usize {
        self.dims[slot]
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn stride(&self, slot: usize) -> usize {
        self.strides[slot]
    }

    pub fn check_slot(&self, slot: usize) -> Result<()> {
        if slot >= self.dims.len() {
            Err(Error::SlotOutOfRange {
                slot,
                len: self.dims.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                found: digits.len(),
            });
        }
        let mut index = 0;
        for (slot, (&d, &dim)) in digits.iter().zip(&self.dims).enumerate() {
            if d >= dim {
                return Err(Error::IndexOutOfRange { index: d, dim });
            }
            index += d * self.strides[slot];
        }
        Ok(index)
    }

    pub fn digits_of(&self, index: usize) -> Vec<usize> {
        self.dims
            .iter()
            .zip(&self.strides)
            .map(|(&dim, &stride)| (index / stride) % dim)
            .collect()
    }

    /// Level of `slot` in basis state `index`.
    pub fn digit(&self, index: usize, slot: usize) -> usize {
        (index / self.strides[slot]) % self.dims[slot]
    }

    /// Space spanned by a subset of this space's subsystems, in the given order.
    pub fn subspace(&self, slots: &[usize]) -> Result<Self> {
        let dims = slots
            .iter()
            .map(|&s| {
                self.check_slot(s)?;
                Ok(self.dims[s])
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_dim_is_product() {
        let space = HilbertSpace::new(vec![4, 4, 3]).unwrap();
        assert_eq!(space.total_dim(), 48);
        assert_eq!(space.stride(0), 12);
        assert_eq!(space.stride(2), 1);
    }

    #[test]
    fn cavity_is_least_significant() {
        let space = HilbertSpace::qudits_with_cavity(2, 2).unwrap();
        assert_eq!(space.index_of(&[0, 0, 1]).unwrap(), 1);
        assert_eq!(space.index_of(&[1, 0, 0]).unwrap(), 8);
        assert_eq!(space.digits_of(space.index_of(&[3, 2, 1]).unwrap()), vec![3, 2, 1]);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(HilbertSpace::new(vec![]).is_err());
        assert!(HilbertSpace::new(vec![4, 0]).is_err());
        assert!(HilbertSpace::qudits_with_cavity(3, 1).is_err());
        assert!(HilbertSpace::qudits_with_cavity(0, 2).is_err());
    }

    #[test]
    fn digits_round_trip() {
        let space = HilbertSpace::new(vec![4, 4, 4, 3]).unwrap();
        for i in 0..space.total_dim() {
            assert_eq!(space.index_of(&space.digits_of(i)).unwrap(), i);
        }
    }
}
