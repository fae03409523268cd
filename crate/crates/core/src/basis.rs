//! Many-body configuration bases.
//!
//! Spin-1/2 states are bit-encoded: site `i` (1-based) lives in bit `i - 1`,
//! a set bit is spin up. Rendered bitstrings put the highest site first, so
//! the string of state `k` is the ordinary binary numeral of `k`.
//!
//! Bosonic states are occupation vectors at fixed particle number, stored in
//! descending lexicographic order and ranked combinatorially.

use crate::error::{Error, Result};

/// Largest spin chain accepted for dense work.
pub const MAX_SPIN_SITES: usize = 20;
/// Largest fixed-N boson sector accepted for dense work.
pub const MAX_BOSON_DIM: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinBasis {
    sites: usize,
}

/// Full spin-1/2 basis on `sites` sites.
pub fn spin_basis(sites: usize) -> Result<SpinBasis> {
    if sites == 0 || sites > MAX_SPIN_SITES {
        return Err(Error::Config(format!(
            "spin chain length {sites} outside supported range 1..={MAX_SPIN_SITES}"
        )));
    }
    Ok(SpinBasis { sites })
}

impl SpinBasis {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// Spin at 1-based `site` of state `index`: `true` for up.
    pub fn spin_up(&self, index: usize, site: usize) -> bool {
        debug_assert!(site >= 1 && site <= self.sites);
        index >> (site - 1) & 1 == 1
    }

    /// Binary numeral of the state, highest site first.
    pub fn bitstring(&self, index: usize) -> String {
        (0..self.sites)
            .rev()
            .map(|b| if index >> b & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn index_of(&self, bits: &str) -> Result<usize> {
        if bits.len() != self.sites {
            return Err(Error::Argument(format!(
                "bitstring '{bits}' has length {}, expected {}",
                bits.len(),
                self.sites
            )));
        }
        bits.chars().try_fold(0usize, |acc, c| match c {
            '0' => Ok(acc << 1),
            '1' => Ok(acc << 1 | 1),
            _ => Err(Error::Argument(format!("invalid character '{c}' in bitstring"))),
        })
    }
}

/// Split of a spin chain into subsystem A (the leading `left_sites` bits of the
/// rendered bitstring) and its complement B.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bipartition {
    left_sites: usize,
    right_sites: usize,
}

pub fn bipartition(basis: &SpinBasis, left_sites: usize) -> Result<Bipartition> {
    Bipartition::new(basis.sites(), left_sites)
}

impl Bipartition {
    pub fn new(sites: usize, left_sites: usize) -> Result<Self> {
        if left_sites > sites {
            return Err(Error::Argument(format!(
                "subsystem size {left_sites} exceeds chain length {sites}"
            )));
        }
        Ok(Self { left_sites, right_sites: sites - left_sites })
    }

    pub fn left_sites(&self) -> usize {
        self.left_sites
    }

    pub fn right_sites(&self) -> usize {
        self.right_sites
    }

    pub fn left_dim(&self) -> usize {
        1 << self.left_sites
    }

    pub fn right_dim(&self) -> usize {
        1 << self.right_sites
    }

    /// `(row, col)` with `row * right_dim + col == index`.
    pub fn split(&self, index: usize) -> (usize, usize) {
        (index >> self.right_sites, index & (self.right_dim() - 1))
    }

    pub fn join(&self, row: usize, col: usize) -> usize {
        row << self.right_sites | col
    }
}

/// Fixed particle-number sector of `sites` bosonic modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BosonBasis {
    sites: usize,
    particles: usize,
    states: Vec<Vec<u8>>,
    // ways[r][s]: number of ways to put r bosons on s sites.
    ways: Vec<Vec<usize>>,
}

/// Number of ways to distribute `particles` bosons over `sites` sites.
pub fn boson_sector_dim(sites: usize, particles: usize) -> u128 {
    if sites == 0 {
        return u128::from(particles == 0);
    }
    // binomial(particles + sites - 1, sites - 1), exact in u128 for our ranges
    let n = (particles + sites - 1) as u128;
    let k = (sites - 1).min(particles) as u128;
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

pub fn boson_basis(sites: usize, particles: usize) -> Result<BosonBasis> {
    if sites == 0 {
        return Err(Error::Config("boson chain needs at least one site".into()));
    }
    if particles > u8::MAX as usize {
        return Err(Error::Config(format!("{particles} bosons exceed the occupation storage")));
    }
    let dim = boson_sector_dim(sites, particles);
    if dim > MAX_BOSON_DIM as u128 {
        return Err(Error::Config(format!(
            "boson sector dimension {dim} (L={sites}, N={particles}) exceeds limit {MAX_BOSON_DIM}"
        )));
    }

    let mut ways = vec![vec![0usize; sites + 1]; particles + 1];
    for (r, row) in ways.iter_mut().enumerate() {
        for (s, w) in row.iter_mut().enumerate() {
            *w = boson_sector_dim(s, r) as usize;
        }
    }

    let mut states = Vec::with_capacity(dim as usize);
    let mut current = vec![0u8; sites];
    current[0] = particles as u8;
    loop {
        states.push(current.clone());
        if !next_descending(&mut current) {
            break;
        }
    }
    debug_assert_eq!(states.len() as u128, dim);
    Ok(BosonBasis { sites, particles, states, ways })
}

// Advance to the next occupation vector in descending lexicographic order.
fn next_descending(occ: &mut [u8]) -> bool {
    let l = occ.len();
    // rightmost site (excluding the last) that can give up a boson
    let Some(k) = (0..l.saturating_sub(1)).rev().find(|&k| occ[k] > 0) else {
        return false;
    };
    occ[k] -= 1;
    let rest: u8 = occ[k + 1..].iter().sum::<u8>() + 1;
    occ[k + 1..].iter_mut().for_each(|n| *n = 0);
    occ[k + 1] = rest;
    true
}

impl BosonBasis {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    pub fn state(&self, index: usize) -> &[u8] {
        &self.states[index]
    }

    /// Rank of an occupation vector, or `None` if it is not in the sector.
    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        if occ.len() != self.sites || occ.iter().map(|&n| n as usize).sum::<usize>() != self.particles {
            return None;
        }
        let mut remaining = self.particles;
        let mut rank = 0;
        for (k, &n) in occ.iter().enumerate() {
            let n = n as usize;
            let after = self.sites - k - 1;
            // states with more bosons on site k come first
            rank += (n + 1..=remaining).map(|m| self.ways[remaining - m][after]).sum::<usize>();
            remaining -= n;
        }
        Some(rank)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spin_dims() {
        assert_eq!(spin_basis(1).unwrap().dim(), 2);
        assert_eq!(spin_basis(14).unwrap().dim(), 16384);
        assert!(matches!(spin_basis(0), Err(Error::Config(_))));
        let err = spin_basis(21).unwrap_err().to_string();
        assert!(err.contains("20"), "{err}");
    }

    #[test]
    fn two_site_order() {
        let b = spin_basis(2).unwrap();
        let s: Vec<_> = (0..4).map(|k| b.bitstring(k)).collect();
        assert_eq!(s, ["00", "01", "10", "11"]);
        assert!(b.spin_up(1, 1) && !b.spin_up(1, 2));
    }

    #[test]
    fn round_trip_small_chains() {
        for l in 1..=12 {
            let b = spin_basis(l).unwrap();
            for k in 0..b.dim() {
                assert_eq!(b.index_of(&b.bitstring(k)).unwrap(), k);
            }
        }
    }

    #[test]
    fn bipartition_examples() {
        let b = spin_basis(2).unwrap();
        let p = bipartition(&b, 1).unwrap();
        assert_eq!(p.split(b.index_of("10").unwrap()), (1, 0));

        let b4 = spin_basis(4).unwrap();
        let empty = bipartition(&b4, 0).unwrap();
        assert!((0..16).all(|k| empty.split(k).0 == 0));
        assert!(bipartition(&b4, 5).is_err());
    }

    #[test]
    fn product_vector_factorizes() {
        let p = Bipartition::new(4, 2).unwrap();
        let left = [0.1, -0.7, 0.3, 0.5];
        let right = [0.9, 0.2, -0.4, 0.05];
        let psi: Vec<f64> = (0..16)
            .map(|k| {
                let (r, c) = p.split(k);
                left[r] * right[c]
            })
            .collect();
        // rank-one reshape: every 2x2 minor vanishes
        for r1 in 0..4 {
            for r2 in 0..4 {
                for c1 in 0..4 {
                    for c2 in 0..4 {
                        let m = psi[p.join(r1, c1)] * psi[p.join(r2, c2)]
                            - psi[p.join(r1, c2)] * psi[p.join(r2, c1)];
                        assert!(m.abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn boson_examples() {
        let b = boson_basis(1, 3).unwrap();
        assert_eq!(b.states(), [vec![3u8]]);
        let b = boson_basis(2, 1).unwrap();
        assert_eq!(b.states(), [vec![1u8, 0], vec![0, 1]]);
        assert_eq!(boson_basis(8, 8).unwrap().dim(), 6435);
        assert!(matches!(boson_basis(12, 12), Err(Error::Config(_))));
    }

    fn brute_force(sites: usize, particles: usize) -> Vec<Vec<u8>> {
        fn rec(prefix: &mut Vec<u8>, sites: usize, left: usize, out: &mut Vec<Vec<u8>>) {
            if prefix.len() + 1 == sites {
                prefix.push(left as u8);
                out.push(prefix.clone());
                prefix.pop();
                return;
            }
            for n in (0..=left).rev() {
                prefix.push(n as u8);
                rec(prefix, sites, left - n, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), sites, particles, &mut out);
        out
    }

    #[test]
    fn boson_matches_brute_force() {
        for sites in 1..=6 {
            for particles in 0..=6 {
                if boson_sector_dim(sites, particles) > 100 {
                    continue;
                }
                let b = boson_basis(sites, particles).unwrap();
                assert_eq!(b.states(), brute_force(sites, particles).as_slice());
            }
        }
    }

    proptest! {
        #[test]
        fn bipartition_index_factorization(l in 1usize..=12, la_frac in 0.0f64..=1.0, k in any::<usize>()) {
            let la = ((l as f64) * la_frac).round() as usize;
            let p = Bipartition::new(l, la).unwrap();
            let idx = k % (1 << l);
            let (r, c) = p.split(idx);
            prop_assert!(r < p.left_dim() && c < p.right_dim());
            prop_assert_eq!(r * p.right_dim() + c, idx);
        }

        #[test]
        fn boson_rank_inverts_enumeration(sites in 1usize..=6, particles in 0usize..=7) {
            let b = boson_basis(sites, particles).unwrap();
            prop_assert_eq!(b.dim() as u128, boson_sector_dim(sites, particles));
            for (k, s) in b.states().iter().enumerate() {
                prop_assert_eq!(s.iter().map(|&n| n as usize).sum::<usize>(), particles);
                prop_assert_eq!(b.index_of(s), Some(k));
            }
        }
    }
}
