//! Bipartite entanglement of real pure states and the random-state reference.

use std::f64::consts::LN_2;

use faer::Mat;

use crate::basis::Bipartition;
use crate::error::{Error, Result};

/// Squared singular values below this floor contribute nothing.
const SINGULAR_FLOOR: f64 = 1e-14;
const NORM_TOLERANCE: f64 = 1e-9;

/// Mean entropy per subsystem size `0..=sites`, in nats.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurve {
    pub sites: usize,
    pub mean_entropy: Vec<f64>,
    /// `(sites / 2) ln 2`
    pub normalization: f64,
    pub states_averaged: usize,
}

impl EntropyCurve {
    pub fn subsystem_sizes(&self) -> Vec<usize> {
        (0..=self.sites).collect()
    }

    pub fn normalized(&self) -> Vec<f64> {
        self.mean_entropy.iter().map(|s| s / self.normalization).collect()
    }
}

fn check_state(psi: &[f64], sites: usize) -> Result<()> {
    if sites == 0 || sites > usize::BITS as usize - 1 || psi.len() != 1usize << sites {
        return Err(Error::Argument(format!("state of length {} is not a {sites}-site state", psi.len())));
    }
    let norm = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
        return Err(Error::Argument(format!("state norm {norm} differs from 1")));
    }
    Ok(())
}

fn entropy_unchecked(psi: &[f64], sites: usize, left_sites: usize) -> Result<f64> {
    if left_sites == 0 || left_sites == sites {
        return Ok(0.0);
    }
    let cut = Bipartition::new(sites, left_sites)?;
    let schmidt = Mat::from_fn(cut.left_dim(), cut.right_dim(), |r, c| psi[cut.join(r, c)]);
    let singular = schmidt
        .singular_values()
        .map_err(|e| Error::Computation { label: "schmidt".into(), reason: format!("{e:?}") })?;
    Ok(singular
        .iter()
        .map(|s| s * s)
        .filter(|&p| p > SINGULAR_FLOOR)
        .map(|p| -p * p.ln())
        .sum())
}

/// Von Neumann entropy of the first `left_sites` sites of `psi`.
pub fn eigenstate_entropy(psi: &[f64], sites: usize, left_sites: usize) -> Result<f64> {
    check_state(psi, sites)?;
    if left_sites > sites {
        return Err(Error::Argument(format!("subsystem of {left_sites} sites exceeds {sites}")));
    }
    entropy_unchecked(psi, sites, left_sites)
}

/// Mean entanglement of a random pure state, reflected above half the chain.
pub fn page_curve(left_sites: usize, sites: usize) -> f64 {
    let a = left_sites.min(sites.saturating_sub(left_sites)) as f64;
    a * LN_2 - 0.5 * (2.0 * a - sites as f64).exp2()
}

/// Entropy curve averaged over `states`, summed in list order.
pub fn mean_entropy_curve(states: &[Vec<f64>], sites: usize) -> Result<EntropyCurve> {
    if states.is_empty() {
        return Err(Error::Argument("no states to average".into()));
    }
    for psi in states {
        check_state(psi, sites)?;
    }
    let per_state = |psi: &Vec<f64>| -> Result<Vec<f64>> {
        (0..=sites).map(|a| entropy_unchecked(psi, sites, a)).collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        states.par_iter().map(per_state).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = states.iter().map(per_state).collect::<Result<_>>()?;

    let mut mean = vec![0.0; sites + 1];
    for row in &rows {
        mean.iter_mut().zip(row).for_each(|(m, s)| *m += s);
    }
    mean.iter_mut().for_each(|m| *m /= rows.len() as f64);
    Ok(EntropyCurve {
        sites,
        mean_entropy: mean,
        normalization: 0.5 * sites as f64 * LN_2,
        states_averaged: states.len(),
    })
}

/// `count` contiguous indices centered on `dim / 2`.
pub fn mid_spectrum_indices(dim: usize, count: usize) -> Result<std::ops::Range<usize>> {
    if count == 0 || count > dim {
        return Err(Error::Argument(format!("cannot select {count} of {dim} states")));
    }
    let start = (dim / 2).saturating_sub(count / 2).min(dim - count);
    Ok(start..start + count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_orthogonal, random_state};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_state_is_unentangled() {
        let mut psi = vec![0.0; 64];
        psi[63] = 1.0;
        for a in 0..=6 {
            assert!(eigenstate_entropy(&psi, 6, a).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn bell_pair() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [0.0, h, h, 0.0];
        assert!((eigenstate_entropy(&psi, 2, 1).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized_and_bad_sizes() {
        assert!(eigenstate_entropy(&[1.0, 1.0], 1, 0).is_err());
        assert!(eigenstate_entropy(&[1.0, 0.0, 0.0], 2, 1).is_err());
        assert!(eigenstate_entropy(&[1.0, 0.0], 1, 2).is_err());
        assert!(mean_entropy_curve(&[], 2).is_err());
    }

    #[test]
    fn page_values() {
        assert!((page_curve(7, 14) - (7.0 * LN_2 - 0.5)).abs() < 1e-15);
        assert!((page_curve(5, 10) - (5.0 * LN_2 - 0.5)).abs() < 1e-15);
        assert!(page_curve(0, 14).abs() < 1e-4);
        assert_eq!(page_curve(3, 10), page_curve(7, 10));
    }

    #[test]
    fn random_states_follow_page() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let states: Vec<Vec<f64>> = (0..50).map(|_| random_state(1 << 12, &mut rng)).collect();
        let curve = mean_entropy_curve(&states, 12).unwrap();
        let target = 6.0 * LN_2 - 0.5;
        assert!((curve.mean_entropy[6] - target).abs() < 0.02 * target, "{}", curve.mean_entropy[6]);
        assert_eq!(curve.mean_entropy[0], 0.0);
        assert_eq!(curve.mean_entropy[12], 0.0);
        for a in 0..=12 {
            assert!((curve.mean_entropy[a] - curve.mean_entropy[12 - a]).abs() < 0.01 * target);
            assert!(curve.mean_entropy[a] <= a.min(12 - a) as f64 * LN_2 + 1e-9);
        }
    }

    #[test]
    fn local_rotation_leaves_entropy_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (sites, left) = (8, 3);
        let psi = random_state(1 << sites, &mut rng);
        let cut = Bipartition::new(sites, left).unwrap();
        let o = random_orthogonal(cut.left_dim(), &mut rng);
        let mut rotated = vec![0.0; psi.len()];
        for r in 0..cut.left_dim() {
            for c in 0..cut.right_dim() {
                rotated[cut.join(r, c)] = (0..cut.left_dim()).map(|k| o[(r, k)] * psi[cut.join(k, c)]).sum();
            }
        }
        let before = eigenstate_entropy(&psi, sites, left).unwrap();
        let after = eigenstate_entropy(&rotated, sites, left).unwrap();
        assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn mid_spectrum_window() {
        assert_eq!(mid_spectrum_indices(1024, 20).unwrap(), 502..522);
        assert_eq!(mid_spectrum_indices(5, 5).unwrap(), 0..5);
        assert!(mid_spectrum_indices(5, 6).is_err());
    }

    fn spectrum_entropy(ev: &[f64]) -> f64 {
        ev.iter().filter(|&&p| p > SINGULAR_FLOOR).map(|p| -p * p.ln()).sum()
    }

    proptest! {
        #[test]
        fn schmidt_symmetry(seed in any::<u64>(), sites in 2usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = random_state(1 << sites, &mut rng);
            for a in 0..=sites {
                let s = eigenstate_entropy(&psi, sites, a).unwrap();
                prop_assert!(s >= -1e-12 && s <= a.min(sites - a) as f64 * LN_2 + 1e-9);
                if a == 0 || a == sites {
                    continue;
                }
                // reduced density matrices of the subsystem and its complement
                let cut = Bipartition::new(sites, a).unwrap();
                let m = Mat::from_fn(cut.left_dim(), cut.right_dim(), |r, c| psi[cut.join(r, c)]);
                let rho_a = &m * m.transpose();
                let rho_b = m.transpose() * &m;
                let sa = spectrum_entropy(&rho_a.self_adjoint_eigenvalues(faer::Side::Lower).unwrap());
                let sb = spectrum_entropy(&rho_b.self_adjoint_eigenvalues(faer::Side::Lower).unwrap());
                prop_assert!((s - sa).abs() < 1e-9 && (s - sb).abs() < 1e-9);
            }
        }
    }
}
