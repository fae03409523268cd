//! Brute-force model constructions sharing no code with the library: tensor
//! products for spins, a truncated Fock space for bosons.
#![allow(dead_code)]

use ethspec::basis::BosonBasis;
use faer::Mat;

pub fn kron(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

fn eye(n: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
}

fn local(rows: [[f64; 2]; 2]) -> Mat<f64> {
    Mat::from_fn(2, 2, |i, j| rows[i][j])
}

// Local basis index 0 = down, 1 = up.
fn sz() -> Mat<f64> {
    local([[-0.5, 0.0], [0.0, 0.5]])
}
fn sx() -> Mat<f64> {
    local([[0.0, 0.5], [0.5, 0.0]])
}
// i·S^y, real; S^y ⊗ S^y = −(iS^y ⊗ iS^y).
fn isy() -> Mat<f64> {
    local([[0.0, 0.5], [-0.5, 0.0]])
}

/// Embeds single-site operators at 1-based sites; site L is the leftmost factor.
fn embed(sites: usize, ops: &[(usize, Mat<f64>)]) -> Mat<f64> {
    let mut out = Mat::from_fn(1, 1, |_, _| 1.0);
    for site in (1..=sites).rev() {
        let factor = ops.iter().find(|(s, _)| *s == site).map_or_else(|| eye(2), |(_, m)| m.clone());
        out = kron(&out, &factor);
    }
    out
}

fn two_site(sites: usize, i: usize, j: usize, a: Mat<f64>, b: Mat<f64>) -> Mat<f64> {
    embed(sites, &[(i, a), (j, b)])
}

pub fn xxz_oracle(l: usize, j: f64, delta: f64, h: f64) -> Mat<f64> {
    let dim = 1 << l;
    let mut out = Mat::<f64>::zeros(dim, dim);
    for i in 1..l {
        let xx = two_site(l, i, i + 1, sx(), sx());
        let yy = two_site(l, i, i + 1, isy(), isy());
        let zz = two_site(l, i, i + 1, sz(), sz());
        out = out + (&xx - &yy) * faer::Scale(j) + zz * faer::Scale(j * delta);
    }
    if h != 0.0 {
        let k = l / 2 - 1;
        out = out + (embed(l, &[(k, sz())]) + embed(l, &[(k, sx())])) * faer::Scale(h);
    }
    out
}

/// `(1/L) Σ (S^x S^x + S^y S^y)` over pairs at distance `d`.
pub fn exchange_oracle(l: usize, d: usize) -> Mat<f64> {
    let dim = 1 << l;
    let mut out = Mat::<f64>::zeros(dim, dim);
    for i in 1..=l - d {
        out = out + two_site(l, i, i + d, sx(), sx()) - two_site(l, i, i + d, isy(), isy());
    }
    out * faer::Scale(1.0 / l as f64)
}

pub fn max_diff(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    m
}

pub fn popcount_sector(m: &Mat<f64>, l: usize, up: u32) -> Mat<f64> {
    let idx: Vec<usize> = (0..1usize << l).filter(|s| s.count_ones() == up).collect();
    Mat::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

/// Operators on the Fock space with at most `cutoff` bosons per site;
/// digits base (cutoff + 1), site 1 most significant.
struct Fock {
    sites: usize,
    cutoff: usize,
}

impl Fock {
    fn dim(&self) -> usize {
        (self.cutoff + 1).pow(self.sites as u32)
    }

    fn annihilate(&self, site: usize) -> Mat<f64> {
        let n = self.cutoff + 1;
        let b = Mat::from_fn(n, n, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 });
        let mut out = Mat::from_fn(1, 1, |_, _| 1.0);
        for s in 1..=self.sites {
            out = kron(&out, &if s == site { b.clone() } else { eye(n) });
        }
        out
    }

    fn index(&self, occ: &[u8]) -> usize {
        occ.iter().fold(0, |acc, &n| acc * (self.cutoff + 1) + n as usize)
    }

    fn project(&self, m: &Mat<f64>, basis: &BosonBasis) -> Mat<f64> {
        let map: Vec<usize> = basis.states().iter().map(|occ| self.index(occ)).collect();
        Mat::from_fn(basis.dim(), basis.dim(), |a, c| m[(map[a], map[c])])
    }
}

/// Bose-Hubbard Hamiltonian and half-chain occupation, projected onto `basis`.
pub fn bose_hubbard_oracle(basis: &BosonBasis, hop: f64, u: f64, energies: &[f64]) -> (Mat<f64>, Mat<f64>) {
    let l = basis.sites();
    let fock = Fock { sites: l, cutoff: basis.particles() };
    let b: Vec<Mat<f64>> = (1..=l).map(|s| fock.annihilate(s)).collect();
    let dim = fock.dim();
    let mut h = Mat::<f64>::zeros(dim, dim);
    for i in 0..l {
        let num = b[i].transpose() * &b[i];
        let pair = &num * &num - &num;
        h = h + pair * faer::Scale(0.5 * u) + num * faer::Scale(energies[i]);
        if i + 1 < l {
            let hop_term = b[i].transpose() * &b[i + 1] + b[i + 1].transpose() * &b[i];
            h = h - hop_term * faer::Scale(hop);
        }
    }
    let mut left = Mat::<f64>::zeros(dim, dim);
    for bi in &b[..l / 2] {
        left = left + bi.transpose() * bi;
    }
    (fock.project(&h, basis), fock.project(&left, basis))
}
