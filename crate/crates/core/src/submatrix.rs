//! Contiguous principal blocks of an observable in the energy eigenbasis.

use faer::Mat;

use crate::entanglement::{mean_entropy_curve, mid_spectrum_indices, EntropyCurve};
use crate::error::{Error, Result};
use crate::linalg::{eigh_matrix, eigvalsh, EigenbasisObservable};
use crate::spectral::{histogram, sff, spacing_ratios, unfold, HistogramData, SffCurve, DEFAULT_NNSD_RANGE};

/// Principal blocks `Z[α₀..α₀+M) × [α₀..α₀+M)`, one per entry of `alpha0s`.
#[derive(Debug, Clone)]
pub struct BlockEnsemble {
    pub blocks: Vec<Mat<f64>>,
    pub block_size: usize,
    pub alpha0s: Vec<usize>,
    pub trim: usize,
    /// Consecutive blocks share eigenstates.
    pub overlapping: bool,
    pub label: String,
}

impl BlockEnsemble {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

fn copy_block(z: &EigenbasisObservable, alpha0: usize, size: usize) -> Mat<f64> {
    let m = z.matrix();
    Mat::from_fn(size, size, |i, j| m[(alpha0 + i, alpha0 + j)])
}

/// Default edge exclusion: 3% of the spectrum per side.
pub fn default_trim(dim: usize) -> usize {
    (0.03 * dim as f64).round() as usize
}

/// Default eigenvalues dropped per block end: 1, or 2% of large blocks.
pub fn default_edge_drop(block_size: usize) -> usize {
    ((0.02 * block_size as f64).round() as usize).max(1)
}

/// Start indices of `count` blocks of size `block_size` spread uniformly over
/// `[trim, dim − trim)`; a single block is centered.
pub fn block_offsets(dim: usize, block_size: usize, count: usize, trim: usize) -> Result<Vec<usize>> {
    if block_size == 0 || count == 0 {
        return Err(Error::Argument("block size and count must be positive".into()));
    }
    if 2 * trim + block_size > dim {
        return Err(Error::Argument(format!(
            "block of {block_size} does not fit in dim {dim} with {trim} trimmed per edge (maximum feasible count 0)"
        )));
    }
    if count == 1 {
        return Ok(vec![(dim - block_size) / 2]);
    }
    let room = dim - 2 * trim - block_size;
    let stride = room / (count - 1);
    if stride == 0 {
        return Err(Error::Argument(format!(
            "{count} blocks of {block_size} do not fit in dim {dim} with {trim} trimmed per edge \
             (maximum feasible count {})",
            room + 1
        )));
    }
    Ok((0..count).map(|k| trim + k * stride).collect())
}

pub fn extract_blocks(z: &EigenbasisObservable, block_size: usize, count: usize, trim: usize) -> Result<BlockEnsemble> {
    let alpha0s = block_offsets(z.dim(), block_size, count, trim)?;
    let overlapping = alpha0s.windows(2).any(|w| w[1] - w[0] < block_size);
    let blocks = alpha0s.iter().map(|&a| copy_block(z, a, block_size)).collect();
    Ok(BlockEnsemble { blocks, block_size, alpha0s, trim, overlapping, label: z.label().to_string() })
}

fn sample_variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// `Var(diagonal) / Var(upper triangle)`; `None` when the off-diagonal
/// variance vanishes.
pub fn variance_ratio(block: &Mat<f64>) -> Result<Option<f64>> {
    let m = block.nrows();
    if m < 3 || block.ncols() != m {
        return Err(Error::Argument(format!("variance ratio needs a square block of size >= 3, got {m}")));
    }
    let diag = (0..m).map(|i| block[(i, i)]);
    let upper = (0..m).flat_map(|j| (0..j).map(move |i| (i, j))).map(|(i, j)| block[(i, j)]);
    let off = sample_variance(upper);
    if off < 1e-30 {
        return Ok(None);
    }
    Ok(Some(sample_variance(diag) / off))
}

fn per_block<T: Send>(ens: &BlockEnsemble, f: impl Fn(usize, &Mat<f64>) -> T + Sync) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ens.blocks.par_iter().enumerate().map(|(k, b)| f(k, b)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ens.blocks.iter().enumerate().map(|(k, b)| f(k, b)).collect()
    }
}

/// Spacing ratios of all blocks, pooled in block order.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioPool {
    pub ratios: Vec<f64>,
    /// Blocks whose retained eigenvalues all coincide.
    pub degenerate_blocks: Vec<usize>,
}

pub fn ensemble_spacing_ratios(ens: &BlockEnsemble, edge_drop: usize) -> Result<RatioPool> {
    let m = ens.block_size;
    if m < 2 * edge_drop + 4 {
        return Err(Error::Argument(format!(
            "dropping {edge_drop} eigenvalues per edge leaves fewer than 4 of {m}"
        )));
    }
    let per: Vec<Result<(Vec<f64>, bool)>> = per_block(ens, |k, b| {
        let ev = eigvalsh(b, &format!("{}[{k}]", ens.label))?;
        let kept = &ev[edge_drop..m - edge_drop];
        let scale = kept.iter().fold(1.0f64, |s, e| s.max(e.abs()));
        let degenerate = kept[kept.len() - 1] - kept[0] <= 1e-12 * scale;
        let ratios = if degenerate { vec![0.0; kept.len() - 2] } else { spacing_ratios(kept)? };
        Ok((ratios, degenerate))
    });
    let mut pool = RatioPool { ratios: Vec::new(), degenerate_blocks: Vec::new() };
    for (k, r) in per.into_iter().enumerate() {
        let (ratios, degenerate) = r?;
        pool.ratios.extend(ratios);
        if degenerate {
            pool.degenerate_blocks.push(k);
        }
    }
    Ok(pool)
}

/// Per-block unfolding settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockUnfolding {
    pub poly_degree: usize,
    pub trim_frac: f64,
}

/// Unfolded block spectra; blocks that fail to unfold are listed, not fatal.
fn unfolded_blocks(ens: &BlockEnsemble, cfg: BlockUnfolding) -> Result<(Vec<Vec<f64>>, Vec<(usize, Error)>)> {
    let per: Vec<Result<Vec<f64>>> = per_block(ens, |k, b| {
        let ev = eigvalsh(b, &format!("{}[{k}]", ens.label))?;
        Ok(unfold(&ev, cfg.poly_degree, cfg.trim_frac)?.into_values())
    });
    let (mut ok, mut skipped) = (Vec::new(), Vec::new());
    for (k, r) in per.into_iter().enumerate() {
        match r {
            Ok(v) => ok.push(v),
            Err(e @ (Error::Unfolding(_) | Error::InsufficientData(_))) => skipped.push((k, e)),
            Err(e) => return Err(e),
        }
    }
    if ok.is_empty() {
        return Err(Error::Unfolding(format!("no block of '{}' could be unfolded", ens.label)));
    }
    Ok((ok, skipped))
}

/// Pooled nearest-neighbour spacing histogram of the unfolded blocks.
pub fn ensemble_nnsd(ens: &BlockEnsemble, cfg: BlockUnfolding, bins: usize) -> Result<(HistogramData, Vec<(usize, Error)>)> {
    if ens.block_size < 256 {
        return Err(Error::Argument(format!("block NNSD needs blocks of >= 256, got {}", ens.block_size)));
    }
    let (spectra, skipped) = unfolded_blocks(ens, cfg)?;
    let spacings: Vec<f64> = spectra.iter().flat_map(|u| u.windows(2).map(|w| w[1] - w[0])).collect();
    Ok((histogram(&spacings, 0.0, DEFAULT_NNSD_RANGE, bins)?, skipped))
}

/// Spectral form factor with the unfolded blocks as the ensemble.
pub fn ensemble_sff(ens: &BlockEnsemble, cfg: BlockUnfolding, times: &[f64]) -> Result<(SffCurve, Vec<(usize, Error)>)> {
    if ens.block_size < 128 {
        return Err(Error::Argument(format!("block SFF needs blocks of >= 128, got {}", ens.block_size)));
    }
    let (spectra, skipped) = unfolded_blocks(ens, cfg)?;
    Ok((sff(&spectra, times)?, skipped))
}

/// `|Z_ij|` of one block, row-major.
pub fn block_magnitude_dump(ens: &BlockEnsemble, index: usize) -> Result<Vec<Vec<f64>>> {
    let b = ens
        .blocks
        .get(index)
        .ok_or_else(|| Error::Argument(format!("block {index} out of range 0..{}", ens.len())))?;
    Ok((0..b.nrows()).map(|i| (0..b.ncols()).map(|j| b[(i, j)].abs()).collect()).collect())
}

/// Treats a `2^k` block as a Hamiltonian of `k` fictitious spins and averages
/// the entanglement of `state_count` mid-spectrum eigenstates.
pub fn block_as_hamiltonian(block: &Mat<f64>, state_count: usize, label: &str) -> Result<EntropyCurve> {
    let m = block.nrows();
    if !m.is_power_of_two() || m < 2 || block.ncols() != m {
        return Err(Error::Argument(format!("block size {m} is not a power of two")));
    }
    let spectrum = eigh_matrix(block, label)?;
    let states: Vec<Vec<f64>> = mid_spectrum_indices(m, state_count)?.map(|k| spectrum.eigenvector(k)).collect();
    mean_entropy_curve(&states, m.trailing_zeros() as usize)
}
