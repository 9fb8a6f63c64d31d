use super::operators::{CMatrix, UnitaryMatrix, C64};
use crate::error::{Error, Result};

fn check_subspace(u: &UnitaryMatrix, v: &UnitaryMatrix, subspace: &[usize]) -> Result<()> {
    if u.space() != v.space() {
        return Err(Error::SpaceMismatch);
    }
    if subspace.is_empty() {
        return Err(Error::EmptySubspace);
    }
    let dim = u.space().total_dim();
    if let Some(&index) = subspace.iter().find(|&&i| i >= dim) {
        return Err(Error::IndexOutOfRange { index, dim });
    }
    Ok(())
}

/// `|Tr(P u^dagger v P)|^2 / d^2` for the projector `P` onto the listed basis
/// states. Equals one iff `u` and `v` agree on the subspace up to a global
/// phase; population that `v` leaks out of the subspace lowers it.
pub fn process_fidelity(u: &UnitaryMatrix, v: &UnitaryMatrix, subspace: &[usize]) -> Result<f64> {
    check_subspace(u, v, subspace)?;
    let dim = u.space().total_dim();
    let mut trace = C64::new(0.0, 0.0);
    for &i in subspace {
        for k in 0..dim {
            trace += u.entry(k, i).conj() * v.entry(k, i);
        }
    }
    let d = subspace.len() as f64;
    Ok((trace.norm_sqr() / (d * d)).min(1.0))
}

/// Largest entrywise difference between the columns of `u` and `v` selected by
/// `subspace`, phases included.
pub fn max_column_deviation(u: &UnitaryMatrix, v: &UnitaryMatrix, subspace: &[usize]) -> Result<f64> {
    check_subspace(u, v, subspace)?;
    let dim = u.space().total_dim();
    let mut dev: f64 = 0.0;
    for &j in subspace {
        for i in 0..dim {
            dev = dev.max((u.entry(i, j) - v.entry(i, j)).norm());
        }
    }
    Ok(dev)
}

/// Entrywise agreement (including phase) on the columns selected by `subspace`.
pub fn exact_match(u: &UnitaryMatrix, v: &UnitaryMatrix, subspace: &[usize], tol: f64) -> Result<bool> {
    Ok(max_column_deviation(u, v, subspace)? <= tol)
}

/// Process fidelity from the images of `d` input states: column `i` of
/// `actual` and `ideal` holds the output for input `i`.
pub fn column_fidelity(actual: &CMatrix, ideal: &CMatrix) -> Result<f64> {
    if actual.shape() != ideal.shape() {
        return Err(Error::DimensionMismatch {
            expected: ideal.nrows() * ideal.ncols(),
            found: actual.nrows() * actual.ncols(),
        });
    }
    if actual.ncols() == 0 {
        return Err(Error::EmptySubspace);
    }
    let trace: C64 = ideal.iter().zip(actual.iter()).map(|(a, b)| a.conj() * b).sum();
    let d = actual.ncols() as f64;
    Ok((trace.norm_sqr() / (d * d)).min(1.0))
}
