//! Dense real-symmetric Hamiltonians and observables.
//!
//! Spin operators are `S = σ/2` with ħ = 1. Every term is written into both
//! `(i, j)` and `(j, i)` from a single computed value, so outputs are exactly
//! symmetric without a symmetrization pass.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::{BosonBasis, SpinBasis};
use crate::error::{Error, Result};

/// Dense real symmetric matrix with a provenance label.
#[derive(Debug, Clone)]
pub struct SymmetricOperator {
    matrix: Mat<f64>,
    label: String,
}

impl SymmetricOperator {
    /// Wraps `matrix`, rejecting non-square, non-finite or asymmetric input.
    pub fn new(matrix: Mat<f64>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        let n = matrix.nrows();
        if matrix.ncols() != n || n == 0 {
            return Err(Error::Argument(format!(
                "operator '{label}' must be square and non-empty, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        for j in 0..n {
            for i in 0..n {
                let v = matrix[(i, j)];
                if !v.is_finite() {
                    return Err(Error::Argument(format!("operator '{label}' has non-finite entry at ({i}, {j})")));
                }
                if i > j && v != matrix[(j, i)] {
                    return Err(Error::Argument(format!("operator '{label}' is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { matrix, label })
    }

    fn from_parts(matrix: Mat<f64>, label: String) -> Self {
        Self { matrix, label }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<f64> {
        self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }
}

// Writes `value` at (i, j) and (j, i), accumulating.
fn add_pair(m: &mut Mat<f64>, i: usize, j: usize, value: f64) {
    m[(i, j)] += value;
    if i != j {
        m[(j, i)] += value;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XxzParams {
    pub sites: usize,
    pub coupling: f64,
    pub anisotropy: f64,
    /// Strength of the `h (S^z + S^x)` field on one site.
    pub field: f64,
}

impl XxzParams {
    /// Couplings used throughout the crossover study: J = 1, Δ = π/4.
    pub fn standard(sites: usize, field: f64) -> Self {
        Self { sites, coupling: 1.0, anisotropy: std::f64::consts::FRAC_PI_4, field }
    }

    /// 1-based site carrying the local field, `L/2 - 1`.
    pub fn perturbed_site(&self) -> usize {
        (self.sites / 2).saturating_sub(1)
    }

    fn validate(&self) -> Result<()> {
        if self.sites % 2 != 0 {
            return Err(Error::Config(format!("XXZ chain length must be even, got {}", self.sites)));
        }
        if ![self.coupling, self.anisotropy, self.field].iter().all(|v| v.is_finite()) {
            return Err(Error::Config("XXZ parameters must be finite".into()));
        }
        if self.field != 0.0 && self.perturbed_site() == 0 {
            return Err(Error::Config(format!(
                "chain of {} sites has no site L/2 - 1 for the local field",
                self.sites
            )));
        }
        Ok(())
    }
}

fn check_spin_basis(sites: usize, basis: &SpinBasis) -> Result<()> {
    if basis.sites() != sites {
        return Err(Error::Argument(format!(
            "basis has {} sites, parameters expect {sites}",
            basis.sites()
        )));
    }
    Ok(())
}

#[inline]
fn sz(index: usize, bit: usize) -> f64 {
    if index >> bit & 1 == 1 {
        0.5
    } else {
        -0.5
    }
}

/// Open XXZ chain with a local `h (S^z + S^x)` field at site `L/2 - 1`.
pub fn build_xxz(params: &XxzParams, basis: &SpinBasis) -> Result<SymmetricOperator> {
    params.validate()?;
    check_spin_basis(params.sites, basis)?;
    let l = params.sites;
    let dim = basis.dim();
    let mut h = Mat::<f64>::zeros(dim, dim);
    let field_bit = params.perturbed_site().checked_sub(1);

    for s in 0..dim {
        let mut diag = 0.0;
        for b in 0..l - 1 {
            diag += params.coupling * params.anisotropy * sz(s, b) * sz(s, b + 1);
            let pair = 0b11 << b;
            let t = s ^ pair;
            // flip-flop (S+S- + S-S+)/2 on antiparallel pairs, once per unordered pair
            if (s >> b & 1) != (s >> (b + 1) & 1) && t > s {
                add_pair(&mut h, s, t, 0.5 * params.coupling);
            }
        }
        if let Some(fb) = field_bit {
            diag += params.field * sz(s, fb);
            let t = s ^ (1 << fb);
            if t > s {
                add_pair(&mut h, s, t, 0.5 * params.field);
            }
        }
        h[(s, s)] += diag;
    }
    let label = format!(
        "H_xxz L={} J={} Delta={} h={}",
        l, params.coupling, params.anisotropy, params.field
    );
    Ok(SymmetricOperator::from_parts(h, label))
}

// (1/L) Σ_i (S^x_i S^x_{i+d} + S^y_i S^y_{i+d}), 1/(2L) per flippable pair.
fn exchange_observable(basis: &SpinBasis, distance: usize, label: &str) -> SymmetricOperator {
    let l = basis.sites();
    let dim = basis.dim();
    let amp = 0.5 / l as f64;
    let mut m = Mat::<f64>::zeros(dim, dim);
    for s in 0..dim {
        for b in 0..l - distance {
            if (s >> b & 1) != (s >> (b + distance) & 1) {
                let t = s ^ (1 << b | 1 << (b + distance));
                if t > s {
                    add_pair(&mut m, s, t, amp);
                }
            }
        }
    }
    SymmetricOperator::from_parts(m, format!("{label} L={l}"))
}

/// Nearest-neighbour transverse exchange, averaged over the chain.
pub fn build_obs_t(basis: &SpinBasis) -> Result<SymmetricOperator> {
    if basis.sites() < 2 {
        return Err(Error::Config("observable T needs at least 2 sites".into()));
    }
    Ok(exchange_observable(basis, 1, "T"))
}

/// Next-nearest-neighbour transverse exchange, averaged over the chain.
pub fn build_obs_o(basis: &SpinBasis) -> Result<SymmetricOperator> {
    if basis.sites() < 3 {
        return Err(Error::Config("observable O needs at least 3 sites".into()));
    }
    Ok(exchange_observable(basis, 2, "O"))
}

/// Total `S^z`, diagonal in the configuration basis.
pub fn total_sz(basis: &SpinBasis) -> Vec<f64> {
    (0..basis.dim())
        .map(|s| (0..basis.sites()).map(|b| sz(s, b)).sum())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoseHubbardParams {
    pub sites: usize,
    pub particles: usize,
    pub hopping: f64,
    pub interaction: f64,
    /// On-site energies are drawn from `(-disorder_bound, disorder_bound)`.
    pub disorder_bound: f64,
    pub seed: u64,
}

impl BoseHubbardParams {
    pub fn new(sites: usize, particles: usize, hopping: f64, interaction: f64, seed: u64) -> Self {
        Self { sites, particles, hopping, interaction, disorder_bound: 0.05, seed }
    }

    /// Site energies for this seed, strictly inside the disorder bound.
    pub fn site_energies(&self) -> Vec<f64> {
        let w = self.disorder_bound;
        if w == 0.0 {
            return vec![0.0; self.sites];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.sites)
            .map(|_| loop {
                let e: f64 = rng.random_range(-w..w);
                if e > -w {
                    break e;
                }
            })
            .collect()
    }
}

/// Open-chain disordered Bose–Hubbard Hamiltonian.
pub fn build_bose_hubbard(params: &BoseHubbardParams, basis: &BosonBasis) -> Result<SymmetricOperator> {
    build_bose_hubbard_with_energies(params, &params.site_energies(), basis)
}

/// As [`build_bose_hubbard`] with explicit on-site energies.
pub fn build_bose_hubbard_with_energies(
    params: &BoseHubbardParams,
    energies: &[f64],
    basis: &BosonBasis,
) -> Result<SymmetricOperator> {
    if basis.sites() != params.sites || basis.particles() != params.particles {
        return Err(Error::Argument(format!(
            "basis (L={}, N={}) does not match parameters (L={}, N={})",
            basis.sites(),
            basis.particles(),
            params.sites,
            params.particles
        )));
    }
    if energies.len() != params.sites {
        return Err(Error::Argument(format!("{} site energies for {} sites", energies.len(), params.sites)));
    }
    if !(params.disorder_bound >= 0.0) || !params.hopping.is_finite() || !params.interaction.is_finite() {
        return Err(Error::Config("Bose-Hubbard parameters must be finite with non-negative disorder".into()));
    }
    let dim = basis.dim();
    let mut h = Mat::<f64>::zeros(dim, dim);
    let mut work = vec![0u8; params.sites];
    for (s, occ) in basis.states().iter().enumerate() {
        let mut diag = 0.0;
        for (i, &n) in occ.iter().enumerate() {
            let n = f64::from(n);
            diag += 0.5 * params.interaction * n * (n - 1.0) + energies[i] * n;
        }
        h[(s, s)] = diag;
        // b†_i b_j and b†_j b_i for each bond; emit only when target rank > s
        for i in 0..params.sites - 1 {
            for (to, from) in [(i, i + 1), (i + 1, i)] {
                if occ[from] == 0 {
                    continue;
                }
                work.copy_from_slice(occ);
                work[from] -= 1;
                work[to] += 1;
                let t = basis.index_of(&work).expect("hop stays in sector");
                if t > s {
                    let amp = (f64::from(occ[to] + 1) * f64::from(occ[from])).sqrt();
                    add_pair(&mut h, s, t, -params.hopping * amp);
                }
            }
        }
    }
    let label = format!(
        "H_bh L={} N={} J={} U={} seed={}",
        params.sites, params.particles, params.hopping, params.interaction, params.seed
    );
    Ok(SymmetricOperator::from_parts(h, label))
}

/// Diagonal occupation observables of the boson chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OccupationObservable {
    /// Σ_i n_i over the whole chain.
    Total,
    /// Σ_{i ≤ L/2} n_i.
    HalfChain,
    /// n_i at a 1-based site.
    Site(usize),
}

pub fn build_obs_bh(basis: &BosonBasis, variant: OccupationObservable) -> Result<SymmetricOperator> {
    let l = basis.sites();
    let (range, label) = match variant {
        OccupationObservable::Total => (0..l, "N_total".to_string()),
        OccupationObservable::HalfChain => (0..l / 2, "N_left".to_string()),
        OccupationObservable::Site(i) => {
            if i == 0 || i > l {
                return Err(Error::Argument(format!("site {i} outside 1..={l}")));
            }
            (i - 1..i, format!("n_{i}"))
        }
    };
    let dim = basis.dim();
    let mut m = Mat::<f64>::zeros(dim, dim);
    for (s, occ) in basis.states().iter().enumerate() {
        m[(s, s)] = occ[range.clone()].iter().map(|&n| f64::from(n)).sum();
    }
    Ok(SymmetricOperator::from_parts(m, format!("{label} L={l} N={}", basis.particles())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{boson_basis, spin_basis};

    fn max_asym(m: &Mat<f64>) -> f64 {
        let n = m.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        worst
    }

    #[test]
    fn two_site_xxz_spectrum() {
        let p = XxzParams::standard(2, 0.0);
        let h = build_xxz(&p, &spin_basis(2).unwrap()).unwrap();
        let mut ev: Vec<f64> = h.matrix().self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        ev.sort_by(f64::total_cmp);
        let d = p.anisotropy;
        let mut expect = vec![d / 4.0, d / 4.0, -d / 4.0 + 0.5, -d / 4.0 - 0.5];
        expect.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12, "{ev:?} vs {expect:?}");
        }
    }

    #[test]
    fn xxz_traceless_and_symmetric() {
        for &h in &[0.0, 0.3, 0.7] {
            let op = build_xxz(&XxzParams::standard(8, h), &spin_basis(8).unwrap()).unwrap();
            assert!(op.trace().abs() < 1e-12);
            assert_eq!(max_asym(op.matrix()), 0.0);
        }
    }

    #[test]
    fn xxz_conserves_sz_without_field() {
        let b = spin_basis(6).unwrap();
        let op = build_xxz(&XxzParams::standard(6, 0.0), &b).unwrap();
        let sz = total_sz(&b);
        let m = op.matrix();
        // [H, Sz]_{ij} = H_ij (sz_j - sz_i)
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                assert_eq!(m[(i, j)] * (sz[j] - sz[i]), 0.0);
            }
        }
        let with_field = build_xxz(&XxzParams::standard(6, 0.2), &b).unwrap();
        let leaks = (0..b.dim())
            .flat_map(|i| (0..b.dim()).map(move |j| (i, j)))
            .any(|(i, j)| with_field.matrix()[(i, j)] * (sz[j] - sz[i]) != 0.0);
        assert!(leaks);
    }

    #[test]
    fn xxz_rejects_odd_chains() {
        assert!(matches!(build_xxz(&XxzParams::standard(5, 0.1), &spin_basis(5).unwrap()), Err(Error::Config(_))));
        assert!(build_xxz(&XxzParams::standard(4, 0.1), &spin_basis(6).unwrap()).is_err());
    }

    #[test]
    fn exchange_observable_elements() {
        let b2 = spin_basis(2).unwrap();
        let t = build_obs_t(&b2).unwrap();
        let up_down = b2.index_of("10").unwrap();
        let down_up = b2.index_of("01").unwrap();
        assert_eq!(t.matrix()[(up_down, down_up)], 0.25);
        assert_eq!(t.trace(), 0.0);

        let b3 = spin_basis(3).unwrap();
        let o = build_obs_o(&b3).unwrap();
        for mid in ['0', '1'] {
            let a = b3.index_of(&format!("1{mid}0")).unwrap();
            let c = b3.index_of(&format!("0{mid}1")).unwrap();
            assert!((o.matrix()[(a, c)] - 1.0 / 6.0).abs() < 1e-15);
        }
        assert_eq!(o.trace(), 0.0);
        assert!(build_obs_o(&spin_basis(2).unwrap()).is_err());
    }

    #[test]
    fn exchange_annihilates_polarized_state() {
        let b = spin_basis(6).unwrap();
        let all_up = b.dim() - 1;
        for op in [build_obs_t(&b).unwrap(), build_obs_o(&b).unwrap()] {
            assert!((0..b.dim()).all(|i| op.matrix()[(i, all_up)] == 0.0));
        }
    }

    #[test]
    fn bose_hubbard_elements() {
        let b = boson_basis(2, 2).unwrap();
        let p = BoseHubbardParams { disorder_bound: 0.0, ..BoseHubbardParams::new(2, 2, 1.0, 3.0, 0) };
        let h = build_bose_hubbard(&p, &b).unwrap();
        let s20 = b.index_of(&[2, 0]).unwrap();
        let s11 = b.index_of(&[1, 1]).unwrap();
        assert_eq!(h.matrix()[(s20, s20)], 3.0);
        assert!((h.matrix()[(s11, s20)] + 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(max_asym(h.matrix()), 0.0);
    }

    #[test]
    fn bose_hubbard_atomic_limit() {
        let b = boson_basis(3, 4).unwrap();
        let p = BoseHubbardParams { disorder_bound: 0.0, ..BoseHubbardParams::new(3, 4, 0.0, 1.5, 0) };
        let h = build_bose_hubbard(&p, &b).unwrap();
        for (s, occ) in b.states().iter().enumerate() {
            let e: f64 = occ.iter().map(|&n| 0.75 * f64::from(n) * (f64::from(n) - 1.0)).sum();
            assert_eq!(h.matrix()[(s, s)], e);
            assert!((0..b.dim()).filter(|&t| t != s).all(|t| h.matrix()[(s, t)] == 0.0));
        }
    }

    #[test]
    fn disorder_is_bounded_and_seeded() {
        let p = BoseHubbardParams::new(64, 1, 1.0, 1.0, 42);
        let e = p.site_energies();
        assert!(e.iter().all(|&x| x > -0.05 && x < 0.05));
        assert_eq!(e, p.site_energies());
        assert_ne!(e, BoseHubbardParams { seed: 43, ..p }.site_energies());
    }

    #[test]
    fn bose_hubbard_basis_mismatch() {
        let p = BoseHubbardParams::new(3, 3, 1.0, 1.0, 0);
        assert!(matches!(build_bose_hubbard(&p, &boson_basis(3, 2).unwrap()), Err(Error::Argument(_))));
    }

    #[test]
    fn occupation_observables() {
        let b = boson_basis(8, 8).unwrap();
        let total = build_obs_bh(&b, OccupationObservable::Total).unwrap();
        assert!((0..b.dim()).all(|s| total.matrix()[(s, s)] == 8.0));
        let half = build_obs_bh(&b, OccupationObservable::HalfChain).unwrap();
        let first = b.index_of(&[8, 0, 0, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(half.matrix()[(first, first)], 8.0);
        let site1 = build_obs_bh(&b, OccupationObservable::Site(1)).unwrap();
        let s = b.index_of(&[0, 8, 0, 0, 0, 0, 0, 0]).unwrap();
        assert_eq!(site1.matrix()[(s, s)], 0.0);
        assert!(build_obs_bh(&b, OccupationObservable::Site(9)).is_err());
        assert!(build_obs_bh(&b, OccupationObservable::Site(0)).is_err());
    }

    #[test]
    fn new_rejects_bad_matrices() {
        let m = Mat::from_fn(2, 2, |i, j| (i * 2 + j) as f64);
        assert!(SymmetricOperator::new(m, "asym").is_err());
        let m = Mat::from_fn(2, 2, |_, _| f64::NAN);
        assert!(SymmetricOperator::new(m, "nan").is_err());
        assert!(SymmetricOperator::new(Mat::identity(3, 3), "id").is_ok());
    }
}
