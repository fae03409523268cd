//! WebAssembly bindings for the browser demo in `www/`.
//!
//! A [`Chain`] holds one diagonalized XXZ chain; the page calls its three
//! operations as the user moves the controls. All arrays cross the boundary
//! as flat `Float64Array`s with the layout documented on each method.

use ethspec::basis::spin_basis;
use ethspec::entanglement::{mean_entropy_curve, mid_spectrum_indices, page_curve};
use ethspec::linalg::{eigh, to_eigenbasis, EigenbasisObservable, Spectrum};
use ethspec::models::{build_obs_o, build_obs_t, build_xxz, XxzParams};
use ethspec::spectral::{histogram, mean, spacing_ratios, ReferenceCurve};
use ethspec::submatrix::{
    block_magnitude_dump, default_edge_drop, default_trim, ensemble_spacing_ratios, extract_blocks,
};
use wasm_bindgen::prelude::*;

/// Largest chain the page offers; 2^10 levels diagonalize in a few seconds.
pub const MAX_SITES: usize = 10;
const BULK_TRIM: f64 = 0.05;

pub struct ChainCore {
    sites: usize,
    spectrum: Spectrum,
    t: EigenbasisObservable,
    o: EigenbasisObservable,
}

impl ChainCore {
    pub fn new(sites: usize, field: f64) -> ethspec::Result<Self> {
        if !(4..=MAX_SITES).contains(&sites) || sites % 2 != 0 {
            return Err(ethspec::Error::Argument(format!("demo chains have an even length in 4..={MAX_SITES}, got {sites}")));
        }
        let basis = spin_basis(sites)?;
        let spectrum = eigh(&build_xxz(&XxzParams::standard(sites, field), &basis)?)?;
        let t = to_eigenbasis(&build_obs_t(&basis)?, &spectrum)?;
        let o = to_eigenbasis(&build_obs_o(&basis)?, &spectrum)?;
        Ok(Self { sites, spectrum, t, o })
    }

    fn observable(&self, name: &str) -> ethspec::Result<&EigenbasisObservable> {
        match name {
            "T" => Ok(&self.t),
            "O" => Ok(&self.o),
            _ => Err(ethspec::Error::Argument(format!("unknown observable {name:?}, expected T or O"))),
        }
    }

    /// `[⟨r⟩, density_1 .. density_bins]` of the bulk spacing ratios.
    pub fn level_ratios(&self, bins: usize) -> ethspec::Result<Vec<f64>> {
        let e = self.spectrum.evals();
        let cut = (BULK_TRIM * e.len() as f64) as usize;
        let r = spacing_ratios(&e[cut..e.len() - cut])?;
        let h = histogram(&r, 0.0, 1.0, bins)?;
        Ok(std::iter::once(mean(&r)).chain(h.densities).collect())
    }

    /// `[⟨r⟩ of the pooled blocks, block count, |Z_ij| of the central block row-major]`.
    pub fn submatrix(&self, observable: &str, block_size: usize) -> ethspec::Result<Vec<f64>> {
        let z = self.observable(observable)?;
        let trim = default_trim(z.dim());
        let room = z.dim().saturating_sub(2 * trim + block_size);
        // non-overlapping tiling when possible, otherwise as many as fit with stride 1
        let count = (room / block_size + 1).max(2).min(room + 1);
        let ens = extract_blocks(z, block_size, count, trim)?;
        let pool = ensemble_spacing_ratios(&ens, default_edge_drop(block_size))?;
        let central = extract_blocks(z, block_size, 1, 0)?;
        let grid = block_magnitude_dump(&central, 0)?;
        let mut out = vec![mean(&pool.ratios), ens.len() as f64];
        out.extend(grid.into_iter().flatten());
        Ok(out)
    }

    /// `[S(L_A)/((L/2) ln 2) for L_A = 0..=L, then the Page values on the same scale]`.
    pub fn entropy(&self, states: usize) -> ethspec::Result<Vec<f64>> {
        let picked: Vec<Vec<f64>> = mid_spectrum_indices(self.spectrum.dim(), states)?
            .map(|k| self.spectrum.eigenvector(k))
            .collect();
        let curve = mean_entropy_curve(&picked, self.sites)?;
        let page = (0..=self.sites).map(|a| page_curve(a, self.sites).max(0.0) / curve.normalization);
        Ok(curve.normalized().into_iter().chain(page).collect())
    }
}

#[wasm_bindgen]
pub struct Chain {
    core: ChainCore,
}

fn js(e: ethspec::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
impl Chain {
    /// Builds and fully diagonalizes the chain with a local field `field`.
    #[wasm_bindgen(constructor)]
    pub fn new(sites: usize, field: f64) -> Result<Chain, JsError> {
        Ok(Chain { core: ChainCore::new(sites, field).map_err(js)? })
    }

    pub fn dim(&self) -> usize {
        self.core.spectrum.dim()
    }

    #[wasm_bindgen(js_name = levelRatios)]
    pub fn level_ratios(&self, bins: usize) -> Result<Vec<f64>, JsError> {
        self.core.level_ratios(bins).map_err(js)
    }

    pub fn submatrix(&self, observable: &str, block_size: usize) -> Result<Vec<f64>, JsError> {
        self.core.submatrix(observable, block_size).map_err(js)
    }

    pub fn entropy(&self, states: usize) -> Result<Vec<f64>, JsError> {
        self.core.entropy(states).map_err(js)
    }
}

/// Poisson then GOE spacing-ratio densities on `points` equally spaced r in [0, 1].
#[wasm_bindgen(js_name = ratioReferences)]
pub fn ratio_references(points: usize) -> Vec<f64> {
    let grid = (0..points).map(|k| k as f64 / (points.max(2) - 1) as f64);
    [ReferenceCurve::RatioPoisson, ReferenceCurve::RatioGoe]
        .iter()
        .flat_map(|c| grid.clone().map(|r| c.eval(r)).collect::<Vec<_>>())
        .collect()
}
