use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::oracle::{OracleSlopes, DEFAULT_ALPHA_STEPS};
use crate::error::{Error, Result};
use crate::fock::{angular_momentum, ladder_a, position_ops, BasisState, FockSpace, Spin};
use crate::model::{build_h_prime, level_energy, spinor_level, Branch, ModelParams, SpinorLevel};
use crate::numerics::{adjoint, eigh, inner, mat_mul, ComplexMatrix};

/// Unit of every `shifts` entry.
pub const SHIFT_UNITS: &str = "a·c·m·ħ·ω̃";

/// Relative tolerance binding perturbative shifts to oracle slopes.
pub const PT_ORACLE_REL_TOL: f64 = 1e-6;

/// Unperturbed levels closer than this (× mc²) count as degenerate.
pub const UNPERTURBED_WINDOW: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Nondegenerate,
    Degenerate,
}

/// Level `n` on a branch with spectator quantum number `spectator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterState {
    pub n: usize,
    pub branch: Branch,
    pub spectator: usize,
}

impl ClusterState {
    pub fn new(n: usize, branch: Branch, spectator: usize) -> Self {
        Self {
            n,
            branch,
            spectator,
        }
    }
}

/// The first `size` spectator states of level `n`.
pub fn landau_cluster(n: usize, branch: Branch, size: usize) -> Vec<ClusterState> {
    (0..size).map(|k| ClusterState::new(n, branch, k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub n_a: usize,
    pub n_b: usize,
    pub spin: Spin,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDescriptor {
    pub n: usize,
    pub branch: Branch,
    pub spectator: usize,
    pub c_n: f64,
    pub d_n: f64,
    pub components: Vec<Component>,
}

/// The three pieces of `⟨4 p_z p_z̄⟩` from the ladder decomposition, in
/// units of `m·ħ·|ω̃|`: `2(a†a + aa†)`, `−(m|ω̃|/ħ) z z̄` and `2 L_z/ħ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P2Breakdown {
    pub ladder: f64,
    pub zzbar: f64,
    pub lz: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PTReport {
    pub cluster_label: String,
    pub unperturbed_energy: Option<f64>,
    pub method: Method,
    pub subspace_basis: Vec<BasisDescriptor>,
    /// `⟨i|H′|j⟩` in units of [`SHIFT_UNITS`].
    pub subspace_matrix: ComplexMatrix,
    /// Ascending, in units of [`SHIFT_UNITS`].
    pub shifts: Vec<f64>,
    /// Same shifts in natural energy units.
    pub shifts_natural: Vec<f64>,
    pub shift_units: String,
    /// Columns pair with `shifts`; expressed in the cluster basis.
    pub eigenvectors: Option<ComplexMatrix>,
    pub breakdown: Option<P2Breakdown>,
    /// Finite-difference `dE/da / (c m ħ ω̃)`, ascending.
    pub oracle_slopes: Vec<f64>,
    pub discrepancy_flags: Vec<String>,
}

impl PTReport {
    /// Worst relative gap between shifts and oracle slopes.
    pub fn oracle_gap(&self) -> Option<f64> {
        if self.oracle_slopes.len() != self.shifts.len() || self.shifts.is_empty() {
            return None;
        }
        Some(
            self.shifts
                .iter()
                .zip(&self.oracle_slopes)
                .map(|(s, o)| (s - o).abs() / s.abs().max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max),
        )
    }
}

/// Verifies that `psi` has no `H′` matrix element to any partner state
/// sharing its unperturbed energy. Returns the largest coupling found.
pub fn check_nondegenerate(
    label: &str,
    h_prime: &ComplexMatrix,
    psi: &[C64],
    partners: &[Vec<C64>],
    tol: f64,
) -> Result<f64> {
    let h_psi = h_prime.mat_vec(psi);
    let coupling = partners
        .iter()
        .map(|p| inner(p, &h_psi).norm())
        .fold(0.0, f64::max);
    if coupling > tol {
        return Err(Error::DegenerateLevel {
            label: label.to_string(),
            coupling,
        });
    }
    Ok(coupling)
}

/// Holds `H′` for one parameter set so several reports can share it.
pub struct Perturbation {
    space: FockSpace,
    params: ModelParams,
    h_prime: ComplexMatrix,
}

impl Perturbation {
    pub fn new(space: &FockSpace, params: &ModelParams) -> Result<Self> {
        if params.omega_tilde() == 0.0 {
            return Err(Error::CriticalField);
        }
        Ok(Self {
            space: *space,
            params: *params,
            h_prime: build_h_prime(space, params)?,
        })
    }

    pub fn h_prime(&self) -> &ComplexMatrix {
        &self.h_prime
    }

    fn unit(&self) -> f64 {
        self.params.shift_unit()
    }

    fn state(&self, s: ClusterState) -> Result<(SpinorLevel, Vec<C64>, BasisDescriptor)> {
        let level = spinor_level(&self.params, s.n, s.branch)?;
        let comps = level.components(&self.params, s.spectator);
        for (b, _) in &comps {
            if !self.space.is_interior(*b) {
                return Err(Error::OutsideInterior {
                    descriptor: b.to_string(),
                    cutoff: self.space.cutoff(),
                });
            }
        }
        let psi = level.embed(&self.space, &self.params, s.spectator)?;
        let descriptor = BasisDescriptor {
            n: s.n,
            branch: s.branch,
            spectator: s.spectator,
            c_n: level.c_n,
            d_n: level.d_n,
            components: comps
                .iter()
                .map(|(b, z)| Component {
                    n_a: b.n_a,
                    n_b: b.n_b,
                    spin: b.spin,
                    re: z.re,
                    im: z.im,
                })
                .collect(),
        };
        Ok((level, psi, descriptor))
    }

    /// Every other state whose unperturbed energy lies within the window of
    /// `target`'s and fits in the truncated space.
    fn partners(&self, target: ClusterState, energy: f64) -> Vec<Vec<C64>> {
        let window = UNPERTURBED_WINDOW * self.params.rest_energy();
        let n_max = self.space.cutoff();
        let mut out = Vec::new();
        for n in 0..=n_max {
            for branch in [Branch::Plus, Branch::Minus] {
                let Ok(level) = spinor_level(&self.params, n, branch) else {
                    continue;
                };
                if (level.energy - energy).abs() > window {
                    continue;
                }
                for k in 0..=n_max {
                    let s = ClusterState::new(n, branch, k);
                    if s == target {
                        continue;
                    }
                    if let Ok(v) = level.embed(&self.space, &self.params, k) {
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    /// Non-degenerate first-order shift `⟨ψ|H′|ψ⟩`.
    pub fn first_order(
        &self,
        target: ClusterState,
        oracle: Option<&OracleSlopes>,
    ) -> Result<PTReport> {
        let (level, psi, descriptor) = self.state(target)?;
        let label = format!(
            "n={}, branch {}, k={}",
            target.n, target.branch, target.spectator
        );
        let unit = self.unit();
        let partners = self.partners(target, level.energy);
        check_nondegenerate(&label, &self.h_prime, &psi, &partners, 1e-12 * unit.abs())?;

        let shift = self.h_prime.sandwich(&psi, &psi).re;
        let breakdown = p2_breakdown(
            &self.params,
            &level.components(&self.params, target.spectator),
        )?;

        let mut report = PTReport {
            cluster_label: label,
            unperturbed_energy: Some(level.energy),
            method: Method::Nondegenerate,
            subspace_basis: vec![descriptor],
            subspace_matrix: ComplexMatrix::from_diagonal(&[shift / unit]),
            shifts: vec![shift / unit],
            shifts_natural: vec![shift],
            shift_units: SHIFT_UNITS.to_string(),
            eigenvectors: None,
            breakdown: Some(breakdown),
            oracle_slopes: Vec::new(),
            discrepancy_flags: Vec::new(),
        };
        if let Some(o) = oracle {
            self.attach_oracle(&mut report, &[target], o)?;
        }
        Ok(report)
    }

    /// Degenerate first-order theory: diagonalize `H′` on the cluster.
    pub fn degenerate(
        &self,
        cluster: &[ClusterState],
        oracle: Option<&OracleSlopes>,
    ) -> Result<PTReport> {
        if cluster.is_empty() {
            return Err(Error::Usage("empty cluster".into()));
        }
        let mut states = Vec::with_capacity(cluster.len());
        let mut basis = Vec::with_capacity(cluster.len());
        let mut energies = Vec::with_capacity(cluster.len());
        for &s in cluster {
            let (level, psi, desc) = self.state(s)?;
            energies.push(level.energy);
            states.push(psi);
            basis.push(desc);
        }
        let lo = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tolerance = UNPERTURBED_WINDOW * self.params.rest_energy();
        if hi - lo > tolerance {
            return Err(Error::NotDegenerate {
                spread: hi - lo,
                tolerance,
            });
        }

        let unit = self.unit();
        let m = states.len();
        let images: Vec<Vec<C64>> = states.iter().map(|v| self.h_prime.mat_vec(v)).collect();
        let mut sub = ComplexMatrix::zeros(m);
        for i in 0..m {
            for j in 0..m {
                sub[(i, j)] = inner(&states[i], &images[j]) / unit;
            }
        }
        let label = format!(
            "n={}, branch {}, {} states",
            cluster[0].n,
            cluster[0].branch,
            cluster.len()
        );
        let mut report = diagonalize_subspace(label, Some(lo), basis, sub)?;
        report.shifts_natural = report.shifts.iter().map(|s| s * unit).collect();
        if let Some(o) = oracle {
            self.attach_oracle(&mut report, cluster, o)?;
        }
        Ok(report)
    }

    fn attach_oracle(
        &self,
        report: &mut PTReport,
        cluster: &[ClusterState],
        oracle: &OracleSlopes,
    ) -> Result<()> {
        let unit_rate = self.params.light_speed
            * self.params.mass
            * self.params.hbar
            * self.params.omega_tilde();
        let mut slopes = Vec::with_capacity(cluster.len());
        for &s in cluster {
            let level = spinor_level(&self.params, s.n, s.branch)?;
            let comps = level.components(&self.params, s.spectator);
            let dominant = dominant_component(&comps);
            match oracle.slope_for(dominant) {
                Some(slope) => slopes.push(slope / unit_rate),
                None => {
                    report
                        .discrepancy_flags
                        .push(format!("no oracle eigenvalue tracks {dominant}"));
                    return Ok(());
                }
            }
        }
        slopes.sort_by(f64::total_cmp);
        let allowance = oracle.noise / unit_rate.abs();
        for (s, o) in report.shifts.iter().zip(&slopes) {
            let gap = (s - o).abs();
            if gap > PT_ORACLE_REL_TOL * s.abs() + allowance {
                report
                    .discrepancy_flags
                    .push(format!("oracle mismatch: shift {s:.12e} vs slope {o:.12e}"));
            }
        }
        report.oracle_slopes = slopes;
        Ok(())
    }
}

fn dominant_component(comps: &[(BasisState, C64)]) -> BasisState {
    let mut best = comps[0];
    for &c in &comps[1..] {
        if c.1.norm() > best.1.norm() * (1.0 + 1e-12) {
            best = c;
        }
    }
    best.0
}

/// Breakdown of `⟨4 p_z p_z̄⟩` over a spinor state. The spin-diagonal
/// operators only see each component's own occupation numbers, so the
/// operators are built on a small space just large enough to hold them.
fn p2_breakdown(params: &ModelParams, comps: &[(BasisState, C64)]) -> Result<P2Breakdown> {
    let occ = comps
        .iter()
        .map(|(b, _)| b.n_a.max(b.n_b))
        .max()
        .unwrap_or(0);
    let small = FockSpace::new(occ + 2, false)?;
    let osc = params.osc();
    let unit = osc.momentum_sq_unit()?;
    let w = params.omega_tilde().abs();
    let a = ladder_a(&small);
    let a_dag = adjoint(&a);
    let mut ladder = mat_mul(&a_dag, &a)?;
    ladder.add_scaled(&mat_mul(&a, &a_dag)?, C64::new(1.0, 0.0))?;
    let (z, zbar) = position_ops(&small, &osc)?;
    let zz = mat_mul(&z, &zbar)?;
    let lz = angular_momentum(&small, params.hbar);

    let mut out = P2Breakdown {
        ladder: 0.0,
        zzbar: 0.0,
        lz: 0.0,
        total: 0.0,
    };
    for (b, amp) in comps {
        let i = small.index(BasisState {
            spin: Spin::Up,
            ..*b
        });
        let wgt = amp.norm_sqr();
        out.ladder += wgt * 2.0 * params.mass * w * params.hbar * ladder[(i, i)].re / unit;
        out.zzbar -= wgt * (params.mass * w).powi(2) * zz[(i, i)].re / unit;
        out.lz += wgt * 2.0 * params.mass * w * lz[(i, i)].re / unit;
    }
    out.total = out.ladder + out.zzbar + out.lz;
    Ok(out)
}

fn diagonalize_subspace(
    label: String,
    energy: Option<f64>,
    basis: Vec<BasisDescriptor>,
    sub: ComplexMatrix,
) -> Result<PTReport> {
    let dec = eigh(&sub, 1e-12)?;
    Ok(PTReport {
        cluster_label: label,
        unperturbed_energy: energy,
        method: Method::Degenerate,
        subspace_basis: basis,
        subspace_matrix: sub,
        shifts: dec.eigenvalues.clone(),
        shifts_natural: Vec::new(),
        shift_units: SHIFT_UNITS.to_string(),
        eigenvectors: Some(dec.eigenvectors),
        breakdown: None,
        oracle_slopes: Vec::new(),
        discrepancy_flags: Vec::new(),
    })
}

/// Degenerate analysis of a subspace matrix given directly in units of
/// [`SHIFT_UNITS`] (no basis, no oracle).
pub fn degenerate_shift_from_matrix(label: &str, matrix: &ComplexMatrix) -> Result<PTReport> {
    matrix.check_finite()?;
    diagonalize_subspace(label.to_string(), None, Vec::new(), matrix.clone())
}

/// First-order shift of `level` (spectator 0), with oracle slopes.
pub fn first_order_shift(
    space: &FockSpace,
    params: &ModelParams,
    level: &SpinorLevel,
) -> Result<PTReport> {
    let pt = Perturbation::new(space, params)?;
    let oracle = OracleSlopes::compute(space, params, DEFAULT_ALPHA_STEPS)?;
    pt.first_order(ClusterState::new(level.n, level.branch, 0), Some(&oracle))
}

/// Degenerate first-order shifts of `cluster`, with oracle slopes.
pub fn degenerate_shift(
    space: &FockSpace,
    params: &ModelParams,
    cluster: &[ClusterState],
) -> Result<PTReport> {
    let pt = Perturbation::new(space, params)?;
    let oracle = OracleSlopes::compute(space, params, DEFAULT_ALPHA_STEPS)?;
    pt.degenerate(cluster, Some(&oracle))
}

/// `E_n` on `branch` for the given parameters (the value H₀ actually has).
pub fn cluster_energy(params: &ModelParams, n: usize, branch: Branch) -> f64 {
    level_energy(params, n, branch)
}
