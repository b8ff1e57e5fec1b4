//! Exact diagonalization of the interior-projected Hamiltonian, used as an
//! independent check on every perturbative number.
//!
//! The projected matrix `P·H·P` (P onto `n_a + n_b ≤ N_cut − 2`) is split
//! into the connected components of its nonzero pattern; each component
//! is diagonalized on its own. The decomposition is exact: entries between
//! components are zero by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{BasisState, FockSpace};
use crate::model::{build_full, ModelParams};
use crate::numerics::{eigh, ComplexMatrix, EigenDecomposition};

/// Default finite-difference steps, in units of the dimensionless strength `a·m·c`.
pub const DEFAULT_ALPHA_STEPS: [f64; 2] = [1e-5, 2e-5];

const BLOCK_EIGH_TOL: f64 = 1e-12;

/// Interior projection of `h` together with the flat indices it keeps.
pub fn project_interior(space: &FockSpace, h: &ComplexMatrix) -> (ComplexMatrix, Vec<usize>) {
    let idx = space.interior_indices();
    (h.submatrix(&idx), idx)
}

/// Connected components of the nonzero pattern of `mats` (taken together),
/// each sorted ascending, ordered by smallest member.
pub fn block_partition(mats: &[&ComplexMatrix]) -> Vec<Vec<usize>> {
    let n = mats[0].dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for m in mats {
        for i in 0..n {
            for (j, z) in m.row(i).iter().enumerate().skip(i + 1) {
                if z.re != 0.0 || z.im != 0.0 {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

fn diagonalize_blocks(h: &ComplexMatrix, blocks: &[Vec<usize>]) -> Result<Vec<EigenDecomposition>> {
    blocks
        .iter()
        .map(|b| eigh(&h.submatrix(b), BLOCK_EIGH_TOL))
        .collect()
}

/// Ascending spectrum of the interior-projected `H₀ + H′`.
pub fn interior_spectrum(space: &FockSpace, params: &ModelParams) -> Result<Vec<f64>> {
    let (h, _) = project_interior(space, &build_full(space, params)?);
    let blocks = block_partition(&[&h]);
    let mut vals: Vec<f64> = diagonalize_blocks(&h, &blocks)?
        .into_iter()
        .flat_map(|d| d.eigenvalues)
        .collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Exact interior spectra at each GUP parameter in `gup_steps` (values of
/// `a`, ascending, starting at 0).
pub fn exact_oracle(
    space: &FockSpace,
    params: &ModelParams,
    gup_steps: &[f64],
) -> Result<Vec<(f64, Vec<f64>)>> {
    if gup_steps.first() != Some(&0.0) {
        return Err(Error::Usage("gup_steps must start at 0".into()));
    }
    if gup_steps.windows(2).any(|w| !(w[0] <= w[1])) || gup_steps.iter().any(|&a| a < 0.0) {
        return Err(Error::Usage(
            "gup_steps must be nonnegative and ascending".into(),
        ));
    }
    gup_steps
        .iter()
        .map(|&a| Ok((a, interior_spectrum(space, &params.with_gup_a(a))?)))
        .collect()
}

/// One exact eigenvalue followed as the GUP parameter varies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeTrack {
    /// Largest-weight basis state of the unperturbed eigenvector.
    pub dominant: BasisState,
    pub energy: f64,
    /// `dE/da` at `a = 0`, natural units.
    pub slope: f64,
}

/// Finite-difference slopes `dE/da|₀` for every interior eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSlopes {
    pub alpha_steps: [f64; 2],
    pub tracks: Vec<SlopeTrack>,
    /// Estimated rounding error of a slope, natural units.
    pub noise: f64,
}

impl OracleSlopes {
    /// Central differences at `±h₁, ±h₂` (`h = α/(mc)`), combined by one
    /// Richardson step. `H(a)` is linear in `a`, so the only error left is
    /// the `O(h⁴)` remainder and rounding.
    pub fn compute(space: &FockSpace, params: &ModelParams, alpha_steps: [f64; 2]) -> Result<Self> {
        let [s1, s2] = alpha_steps;
        if !(s1 > 0.0 && s2 > s1) {
            return Err(Error::Usage(format!(
                "finite-difference steps must satisfy 0 < h1 < h2, got {s1}, {s2}"
            )));
        }
        let mc = params.mass * params.light_speed;
        let (h1, h2) = (s1 / mc, s2 / mc);

        let project = |a: f64| -> Result<ComplexMatrix> {
            Ok(project_interior(space, &build_full(space, &params.with_gup_a(a))?).0)
        };
        let (h0, idx) = project_interior(space, &build_full(space, &params.with_gup_a(0.0))?);
        let plus2 = project(h2)?;
        let blocks = block_partition(&[&h0, &plus2]);

        let base = diagonalize_blocks(&h0, &blocks)?;
        let shifted = [
            diagonalize_blocks(&project(h1)?, &blocks)?,
            diagonalize_blocks(&project(-h1)?, &blocks)?,
            diagonalize_blocks(&plus2, &blocks)?,
            diagonalize_blocks(&project(-h2)?, &blocks)?,
        ];

        let r2 = (h2 / h1).powi(2);
        let mut tracks = Vec::new();
        let mut scale: f64 = 0.0;
        for (b, block) in blocks.iter().enumerate() {
            let dec = &base[b];
            for k in 0..dec.dim() {
                let v = dec.vector(k);
                let best = v.iter().enumerate().fold((0, 0.0), |acc, (i, z)| {
                    if z.norm() > acc.1 * (1.0 + 1e-12) {
                        (i, z.norm())
                    } else {
                        acc
                    }
                });
                let e = |which: usize| shifted[which][b].eigenvalues[k];
                let d1 = (e(0) - e(1)) / (2.0 * h1);
                let d2 = (e(2) - e(3)) / (2.0 * h2);
                scale = scale.max(dec.eigenvalues[k].abs());
                tracks.push(SlopeTrack {
                    dominant: space.state(idx[block[best.0]]),
                    energy: dec.eigenvalues[k],
                    slope: (r2 * d1 - d2) / (r2 - 1.0),
                });
            }
        }
        tracks.sort_by(|x, y| {
            x.energy
                .total_cmp(&y.energy)
                .then(x.dominant.cmp(&y.dominant))
        });
        Ok(Self {
            alpha_steps,
            tracks,
            noise: 64.0 * f64::EPSILON * scale.max(params.rest_energy()) / h1,
        })
    }

    pub fn slope_for(&self, state: BasisState) -> Option<f64> {
        self.tracks
            .iter()
            .find(|t| t.dominant == state)
            .map(|t| t.slope)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_h0, landau_level, Branch};

    #[test]
    fn projected_h0_matches_full_dense_solve_on_small_space() {
        let space = FockSpace::new(6, true).unwrap();
        let p = ModelParams::natural(0.4, 0.2, 3e-3).unwrap();
        let (h, _) = project_interior(&space, &build_full(&space, &p).unwrap());
        let mut dense = eigh(&h, 1e-12).unwrap().eigenvalues;
        dense.sort_by(f64::total_cmp);
        let blocked = interior_spectrum(&space, &p).unwrap();
        assert_eq!(dense.len(), blocked.len());
        for (x, y) in dense.iter().zip(&blocked) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn blocks_really_decouple() {
        let space = FockSpace::new(7, true).unwrap();
        let p = ModelParams::natural(1.0, 1.0, 1e-2).unwrap();
        let (h, _) = project_interior(&space, &build_full(&space, &p).unwrap());
        let blocks = block_partition(&[&h]);
        assert!(blocks.len() > 1);
        let mut owner = vec![0; h.dim()];
        for (b, blk) in blocks.iter().enumerate() {
            for &i in blk {
                owner[i] = b;
            }
        }
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                if owner[i] != owner[j] {
                    assert_eq!(h[(i, j)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn oracle_at_zero_matches_h0() {
        let space = FockSpace::new(6, true).unwrap();
        let p = ModelParams::natural(1.0, 1.0, 0.0).unwrap();
        let out = exact_oracle(&space, &p, &[0.0, 1e-3]).unwrap();
        let (h0, _) = project_interior(&space, &build_h0(&space, &p).unwrap());
        let mut direct = eigh(&h0, 1e-12).unwrap().eigenvalues;
        direct.sort_by(f64::total_cmp);
        for (x, y) in out[0].1.iter().zip(&direct) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(exact_oracle(&space, &p, &[1e-3]).is_err());
        assert!(exact_oracle(&space, &p, &[0.0, 2e-3, 1e-3]).is_err());
    }

    #[test]
    fn ground_slope_is_minus_one_unit() {
        let space = FockSpace::new(8, true).unwrap();
        let p = ModelParams::natural(1.0, 1.0, 1e-4).unwrap();
        let oracle = OracleSlopes::compute(&space, &p, DEFAULT_ALPHA_STEPS).unwrap();
        let ground = BasisState {
            n_a: 0,
            n_b: 0,
            spin: crate::fock::Spin::Up,
        };
        let slope = oracle.slope_for(ground).unwrap();
        let unit = p.light_speed * p.mass * p.hbar * p.omega_tilde();
        assert!((slope / unit + 1.0).abs() < 1e-6, "{slope}");
        let e0 = landau_level(&p, 0, Branch::Plus).unwrap();
        assert!(oracle.tracks.iter().any(|t| (t.energy - e0).abs() < 1e-12));
    }

    #[test]
    fn weyl_bound_on_eigenvalue_motion() {
        let space = FockSpace::new(6, true).unwrap();
        let p = ModelParams::natural(1.0, 0.5, 0.0).unwrap();
        let out = exact_oracle(&space, &p, &[0.0, 1e-4, 1e-3]).unwrap();
        let hp = crate::model::build_h_prime(&space, &p.with_gup_a(1e-3)).unwrap();
        let (hp, _) = project_interior(&space, &hp);
        let norm = eigh(&hp, 1e-12)
            .unwrap()
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        for (_, spec) in &out[1..] {
            for (x, y) in spec.iter().zip(&out[0].1) {
                assert!(x.is_finite());
                assert!((x - y).abs() <= norm * (1.0 + 1e-12));
            }
        }
    }
}
