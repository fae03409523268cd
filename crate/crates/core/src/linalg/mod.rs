//! Dense symmetric eigendecomposition, eigenbasis rotation and curve fits.

mod fit;

pub use fit::{
    fit_exponential_decay, fit_gaussian_mixture, fit_line, DecayFit, LineFit, MixtureFit,
};

use std::sync::atomic::{AtomicUsize, Ordering};

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::models::SymmetricOperator;

static EIGH_CALLS: AtomicUsize = AtomicUsize::new(0);

/// Number of full eigendecompositions performed by this process.
pub fn eigh_call_count() -> usize {
    EIGH_CALLS.load(Ordering::Relaxed)
}

/// Ascending eigenvalues and orthonormal eigenvectors (column `k` ↔ `evals[k]`).
#[derive(Debug, Clone)]
pub struct Spectrum {
    evals: Vec<f64>,
    evecs: Mat<f64>,
}

impl Spectrum {
    /// Assembles a spectrum from precomputed parts, e.g. a cache.
    pub fn from_parts(evals: Vec<f64>, evecs: Mat<f64>) -> Result<Self> {
        let n = evals.len();
        if evecs.nrows() != n || evecs.ncols() != n {
            return Err(Error::Argument(format!(
                "{} eigenvalues with a {}x{} eigenvector matrix",
                n,
                evecs.nrows(),
                evecs.ncols()
            )));
        }
        if evals.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Argument("eigenvalues must be ascending".into()));
        }
        Ok(Self { evals, evecs })
    }

    pub fn dim(&self) -> usize {
        self.evals.len()
    }

    pub fn evals(&self) -> &[f64] {
        &self.evals
    }

    pub fn evecs(&self) -> &Mat<f64> {
        &self.evecs
    }

    /// Eigenvector `k` as an owned vector.
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.evecs.col(k).iter().copied().collect()
    }
}

fn check_finite(a: &Mat<f64>, label: &str) -> Result<()> {
    if a.nrows() == 0 || a.nrows() != a.ncols() {
        return Err(Error::Argument(format!("'{label}' is not a non-empty square matrix")));
    }
    for j in 0..a.ncols() {
        if a.col(j).iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("'{label}' has non-finite entries")));
        }
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric operator.
///
/// Eigenvectors are normalized so their largest-magnitude component is
/// positive.
pub fn eigh(a: &SymmetricOperator) -> Result<Spectrum> {
    eigh_matrix(a.matrix(), a.label())
}

/// [`eigh`] on a raw matrix; only the lower triangle is read.
pub fn eigh_matrix(a: &Mat<f64>, label: &str) -> Result<Spectrum> {
    check_finite(a, label)?;
    EIGH_CALLS.fetch_add(1, Ordering::Relaxed);
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Computation {
        label: label.to_string(),
        reason: format!("eigensolver did not converge: {e:?}"),
    })?;
    let n = a.nrows();
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].total_cmp(&s[j]));

    let evals: Vec<f64> = order.iter().map(|&k| s[k]).collect();
    let mut evecs = Mat::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = u.col(src);
        let mut pivot = 0.0f64;
        for v in col.iter() {
            if v.abs() > pivot.abs() {
                pivot = *v;
            }
        }
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            evecs[(i, dst)] = sign * col[i];
        }
    }
    Ok(Spectrum { evals, evecs })
}

/// Ascending eigenvalues only.
pub fn eigvalsh(a: &Mat<f64>, label: &str) -> Result<Vec<f64>> {
    check_finite(a, label)?;
    let mut ev = a.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Computation {
        label: label.to_string(),
        reason: format!("eigensolver did not converge: {e:?}"),
    })?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// An observable expressed in the energy eigenbasis, co-indexed with the
/// energies it was rotated by.
#[derive(Debug, Clone)]
pub struct EigenbasisObservable {
    matrix: Mat<f64>,
    evals: Vec<f64>,
    label: String,
}

impl EigenbasisObservable {
    /// Wraps an already-rotated matrix. Used for synthetic ensembles.
    pub fn from_parts(matrix: Mat<f64>, evals: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let n = evals.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Argument(format!(
                "{}x{} matrix with {} energies",
                matrix.nrows(),
                matrix.ncols(),
                n
            )));
        }
        Ok(Self { matrix, evals, label: label.into() })
    }

    pub fn dim(&self) -> usize {
        self.evals.len()
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn evals(&self) -> &[f64] {
        &self.evals
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).collect()
    }

    pub fn get(&self, alpha: usize, beta: usize) -> f64 {
        self.matrix[(alpha, beta)]
    }
}

/// `evecsᵀ · Z · evecs`, symmetrized exactly by averaging with its transpose.
pub fn to_eigenbasis(z: &SymmetricOperator, spectrum: &Spectrum) -> Result<EigenbasisObservable> {
    if z.dim() != spectrum.dim() {
        return Err(Error::Argument(format!(
            "observable '{}' has dim {}, spectrum has dim {}",
            z.label(),
            z.dim(),
            spectrum.dim()
        )));
    }
    let u = spectrum.evecs();
    let zu = z.matrix() * u;
    let mut r = u.transpose() * &zu;
    drop(zu);
    let n = r.nrows();
    for j in 0..n {
        for i in j + 1..n {
            let avg = 0.5 * (r[(i, j)] + r[(j, i)]);
            r[(i, j)] = avg;
            r[(j, i)] = avg;
        }
    }
    Ok(EigenbasisObservable {
        matrix: r,
        evals: spectrum.evals().to_vec(),
        label: z.label().to_string(),
    })
}
