//! Exact propagation under time-independent Hamiltonians by spectral
//! decomposition: `exp(-iHt) = V exp(-i Λ t) V^dagger`.

use nalgebra::DVector;

use super::operators::{
    check_hermitian, CMatrix, CVector, HermitianOperator, StateVector, UnitaryMatrix, C64, ZERO,
};
use crate::error::{Error, Result};

/// Dense eigendecompositions of a block beyond this size are refused rather
/// than left to run for minutes.
pub const MAX_DENSE_DIM: usize = 2048;

/// Eigendecomposition of a Hermitian matrix, reusable across evolution times.
///
/// The matrix is first split into the connected components of its sparsity
/// graph; each block is diagonalized on its own. The Hamiltonians here
/// conserve an excitation number, so blocks are small even when the space is
/// not.
#[derive(Clone, Debug)]
pub struct Spectrum {
    dim: usize,
    blocks: Vec<Block>,
}

#[derive(Clone, Debug)]
struct Block {
    indices: Vec<usize>,
    values: DVector<f64>,
    vectors: CMatrix,
}

impl Block {
    fn phases(&self, t: f64) -> Vec<C64> {
        self.values
            .iter()
            .map(|&l| C64::from_polar(1.0, -l * t))
            .collect()
    }

    /// `V exp(-i Λ t) V^dagger` on this block.
    fn propagator(&self, t: f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, p) in self.phases(t).iter().enumerate() {
            for x in scaled.column_mut(j).iter_mut() {
                *x *= p;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Connected components of the graph with an edge wherever `m[(i, j)] != 0`.
fn components(m: &CMatrix) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for seed in 0..n {
        if label[seed] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![seed];
        label[seed] = id;
        let mut k = 0;
        while k < members.len() {
            let i = members[k];
            for j in 0..n {
                if label[j] == usize::MAX && (m[(i, j)] != ZERO || m[(j, i)] != ZERO) {
                    label[j] = id;
                    members.push(j);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

impl Spectrum {
    pub fn of(h: &HermitianOperator) -> Result<Self> {
        Self::of_matrix(h.matrix())
    }

    pub(crate) fn of_matrix(m: &CMatrix) -> Result<Self> {
        check_hermitian(m)?;
        // Symmetrize so that rounding in the builders cannot leak an
        // anti-Hermitian part into the eigensolver.
        let sym = (m + m.adjoint()).scale(0.5);
        let blocks = components(&sym)
            .into_iter()
            .map(|indices| {
                if indices.len() > MAX_DENSE_DIM {
                    return Err(Error::TooLarge(indices.len()));
                }
                let b = indices.len();
                let sub = CMatrix::from_fn(b, b, |r, c| sym[(indices[r], indices[c])]);
                let eig = sub.symmetric_eigen();
                Ok(Block {
                    indices,
                    values: eig.eigenvalues,
                    vectors: eig.eigenvectors,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim: m.nrows(),
            blocks,
        })
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> DVector<f64> {
        let mut v: Vec<f64> = self.blocks.iter().flat_map(|b| b.values.iter().copied()).collect();
        v.sort_by(f64::total_cmp);
        DVector::from_vec(v)
    }

    /// Dense `exp(-iHt)`; `t` may be negative.
    pub fn propagator_matrix(&self, t: f64) -> Result<CMatrix> {
        check_time(t)?;
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let u = b.propagator(t);
            for (r, &i) in b.indices.iter().enumerate() {
                for (c, &j) in b.indices.iter().enumerate() {
                    out[(i, j)] = u[(r, c)];
                }
            }
        }
        Ok(out)
    }

    /// `exp(-iHt) v` without forming the propagator.
    pub fn evolve_vector(&self, v: &CVector, t: f64) -> Result<CVector> {
        check_time(t)?;
        let mut out = CVector::zeros(self.dim);
        for b in &self.blocks {
            let sub = CVector::from_iterator(b.indices.len(), b.indices.iter().map(|&i| v[i]));
            let mut coeffs = b.vectors.adjoint() * sub;
            for (c, p) in coeffs.iter_mut().zip(b.phases(t)) {
                *c *= p;
            }
            let res = &b.vectors * coeffs;
            for (r, &i) in b.indices.iter().enumerate() {
                out[i] = res[r];
            }
        }
        Ok(out)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteTime(t))
    }
}

/// `exp(-iHt)` as a [`UnitaryMatrix`]. Negative `t` gives the inverse evolution.
pub fn propagator(h: &HermitianOperator, t: f64) -> Result<UnitaryMatrix> {
    check_time(t)?;
    if t == 0.0 {
        check_hermitian(h.matrix())?;
        return Ok(UnitaryMatrix::identity(h.space()));
    }
    let spectrum = Spectrum::of(h)?;
    Ok(UnitaryMatrix::from_parts(
        h.space().clone(),
        spectrum.propagator_matrix(t)?,
    ))
}

/// `exp(-iHt) |state>` for `t >= 0`.
pub fn evolve(state: &StateVector, h: &HermitianOperator, t: f64) -> Result<StateVector> {
    check_time(t)?;
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if state.space() != h.space() {
        return Err(Error::SpaceMismatch);
    }
    if t == 0.0 {
        check_hermitian(h.matrix())?;
        return Ok(state.clone());
    }
    let spectrum = Spectrum::of(h)?;
    let out = spectrum.evolve_vector(state.amplitudes(), t)?;
    Ok(StateVector::from_parts(state.space().clone(), out))
}
