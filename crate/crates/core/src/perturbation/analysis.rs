use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oracle::{block_partition, project_interior};
use super::pt::{landau_cluster, ClusterState, Perturbation};
use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::model::{build_h0, level_energy, spinor_level, Branch, ModelParams};
use crate::numerics::{eigvalsh, mat_add, ComplexMatrix};

/// Default clustering window, in units of mc².
pub const DEFAULT_ENERGY_WINDOW: f64 = 1e-9;

/// Windows below this (× mc²) cannot separate levels from rounding.
pub const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelCluster {
    pub energy: f64,
    pub multiplicity: usize,
}

/// Groups ascending values into runs whose neighbours differ by at most
/// `window`. The reported energy is the run's mean.
pub fn cluster_values(sorted: &[f64], window: f64) -> Vec<LevelCluster> {
    let mut out: Vec<LevelCluster> = Vec::new();
    let mut sum = 0.0;
    let mut last = f64::NEG_INFINITY;
    for &v in sorted {
        match out.last_mut() {
            Some(c) if v - last <= window => {
                c.multiplicity += 1;
                sum += v;
                c.energy = sum / c.multiplicity as f64;
            }
            _ => {
                out.push(LevelCluster {
                    energy: v,
                    multiplicity: 1,
                });
                sum = v;
            }
        }
        last = v;
    }
    out
}

fn histogram(clusters: &[LevelCluster]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for c in clusters {
        *h.entry(c.multiplicity).or_insert(0) += 1;
    }
    h
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyAnalysis {
    pub window: f64,
    /// Multiplicity → number of clusters with that multiplicity.
    pub before: BTreeMap<usize, usize>,
    pub after: BTreeMap<usize, usize>,
    pub lll_energy: f64,
    /// Size of the unperturbed cluster holding the zero-mode level.
    pub lll_multiplicity_before: usize,
    /// Largest cluster left inside the zero-mode band after perturbation.
    pub lll_multiplicity_after: usize,
}

impl DegeneracyAnalysis {
    pub fn lll_split(&self) -> bool {
        self.lll_multiplicity_after < self.lll_multiplicity_before
    }
}

fn interior_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut vals = Vec::with_capacity(h.dim());
    for block in block_partition(&[h]) {
        vals.extend(eigvalsh(&h.submatrix(&block), 1e-12)?);
    }
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

fn lll_energy(params: &ModelParams) -> f64 {
    match spinor_level(params, 0, Branch::Plus) {
        Ok(level) => level.energy,
        Err(_) => -params.rest_energy(),
    }
}

fn analyse(
    params: &ModelParams,
    h0: &ComplexMatrix,
    h_prime: &ComplexMatrix,
    window: f64,
) -> Result<DegeneracyAnalysis> {
    let mc2 = params.rest_energy();
    if !(window >= NOISE_FLOOR * mc2) {
        return Err(Error::Usage(format!(
            "energy window {window:e} is below the noise floor {:e}",
            NOISE_FLOOR * mc2
        )));
    }
    let before = cluster_values(&interior_eigenvalues(h0)?, window);
    let after = cluster_values(&interior_eigenvalues(&mat_add(h0, h_prime)?)?, window);

    let e_lll = lll_energy(params);
    // Half the distance to the first excited level bounds the zero-mode band.
    let band = (0.5 * (level_energy(params, 1, Branch::Plus) - mc2)).max(window);
    let nearest = |cs: &[LevelCluster]| {
        cs.iter()
            .filter(|c| (c.energy - e_lll).abs() <= window)
            .map(|c| c.multiplicity)
            .max()
            .unwrap_or(0)
    };
    let lll_before = nearest(&before);
    let lll_after = after
        .iter()
        .filter(|c| (c.energy - e_lll).abs() <= band)
        .map(|c| c.multiplicity)
        .max()
        .unwrap_or(0);
    Ok(DegeneracyAnalysis {
        window,
        before: histogram(&before),
        after: histogram(&after),
        lll_energy: e_lll,
        lll_multiplicity_before: lll_before,
        lll_multiplicity_after: lll_after,
    })
}

/// Clusters the interior spectra of `H₀` and `H₀ + H′` with `window`.
pub fn degeneracy_analysis(
    space: &FockSpace,
    params: &ModelParams,
    window: f64,
) -> Result<DegeneracyAnalysis> {
    params.validate()?;
    let (h0, _) = project_interior(space, &build_h0(space, params)?);
    let hp = crate::model::build_h_prime(space, params)?;
    let (hp, _) = project_interior(space, &hp);
    analyse(params, &h0, &hp, window)
}

/// Field at which `ω̃` vanishes: `2ωmc/|e|`.
pub fn critical_field(params: &ModelParams) -> f64 {
    2.0 * params.omega * params.mass * params.light_speed / params.charge
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    #[serde(rename = "B")]
    pub field: f64,
    pub omega_tilde: f64,
    /// Natural units.
    pub ground_shift: Option<f64>,
    pub first_shift: Option<f64>,
    pub n2_shifts: Option<[f64; 4]>,
    pub degeneracy_counts_before: Option<usize>,
    pub degeneracy_counts_after: Option<usize>,
    pub flags: Vec<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
    #[serde(rename = "critical_B")]
    pub critical_field: Option<f64>,
}

fn scan_point(space: &FockSpace, base: &ModelParams, field: f64, window: f64) -> ScanPoint {
    let params = base.with_field(field);
    let mut point = ScanPoint {
        field,
        omega_tilde: params.omega_tilde(),
        ground_shift: None,
        first_shift: None,
        n2_shifts: None,
        degeneracy_counts_before: None,
        degeneracy_counts_after: None,
        flags: Vec::new(),
        error: None,
    };
    if let Err(e) = fill_point(space, &params, window, &mut point) {
        point.error = Some(e.to_string());
    }
    point
}

fn fill_point(
    space: &FockSpace,
    params: &ModelParams,
    window: f64,
    point: &mut ScanPoint,
) -> Result<()> {
    params.validate()?;
    let (h0, _) = project_interior(space, &build_h0(space, params)?);
    if params.omega_tilde() == 0.0 {
        point.flags.push("critical field: H' vanishes".into());
        point.ground_shift = Some(0.0);
        point.first_shift = Some(0.0);
        point.n2_shifts = Some([0.0; 4]);
        let zero = ComplexMatrix::zeros(h0.dim());
        let d = analyse(params, &h0, &zero, window * params.rest_energy())?;
        point.degeneracy_counts_before = Some(d.lll_multiplicity_before);
        point.degeneracy_counts_after = Some(d.lll_multiplicity_after);
        return Ok(());
    }
    if params.omega_tilde() < 0.0 {
        point.flags.push("over-critical field".into());
    }
    let pt = Perturbation::new(space, params)?;
    let zero_branch = if params.omega_tilde() > 0.0 {
        Branch::Plus
    } else {
        Branch::Minus
    };
    point.ground_shift = Some(
        pt.first_order(ClusterState::new(0, zero_branch, 0), None)?
            .shifts_natural[0],
    );
    point.first_shift = Some(
        pt.first_order(ClusterState::new(1, Branch::Plus, 0), None)?
            .shifts_natural[0],
    );
    let n2 = pt.degenerate(&landau_cluster(2, Branch::Plus, 4), None)?;
    point.n2_shifts = Some([
        n2.shifts_natural[0],
        n2.shifts_natural[1],
        n2.shifts_natural[2],
        n2.shifts_natural[3],
    ]);
    let (hp, _) = project_interior(space, pt.h_prime());
    drop(pt);
    let d = analyse(params, &h0, &hp, window * params.rest_energy())?;
    point.degeneracy_counts_before = Some(d.lll_multiplicity_before);
    point.degeneracy_counts_after = Some(d.lll_multiplicity_after);
    Ok(())
}

/// Evaluates every field in `fields` (ascending) independently; per-point
/// failures are recorded in that point.
pub fn field_scan(space: &FockSpace, base: &ModelParams, fields: &[f64]) -> Result<ScanResult> {
    field_scan_with_window(space, base, fields, DEFAULT_ENERGY_WINDOW)
}

/// [`field_scan`] with a clustering window other than the default (× mc²).
pub fn field_scan_with_window(
    space: &FockSpace,
    base: &ModelParams,
    fields: &[f64],
    window: f64,
) -> Result<ScanResult> {
    if fields.iter().any(|b| !b.is_finite()) {
        return Err(Error::Usage("scan fields must be finite".into()));
    }
    if fields.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Usage("scan fields must be sorted ascending".into()));
    }
    let points: Vec<ScanPoint> = fields
        .par_iter()
        .map(|&b| scan_point(space, base, b, window))
        .collect();
    let b_c = critical_field(base);
    let crosses = match (fields.first(), fields.last()) {
        (Some(&lo), Some(&hi)) => lo <= b_c && b_c <= hi,
        _ => false,
    };
    Ok(ScanResult {
        points,
        critical_field: crosses.then_some(b_c),
    })
}
