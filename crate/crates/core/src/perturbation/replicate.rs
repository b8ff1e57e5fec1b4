use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::analysis::critical_field;
use super::oracle::{interior_spectrum, OracleSlopes, DEFAULT_ALPHA_STEPS};
use super::pt::{
    degenerate_shift_from_matrix, landau_cluster, ClusterState, PTReport, Perturbation,
    PT_ORACLE_REL_TOL,
};
use crate::error::Result;
use crate::fock::FockSpace;
use crate::model::{landau_level, spinor_level, Branch, ModelParams};
use crate::numerics::{eigh, vec_norm, ComplexMatrix};
use crate::C64;

/// Reference eigenvalues of the 4×4 block, units a·c·m·ħ·ω̃.
pub const PRINTED_EIGENVALUES: [f64; 4] = [-8.7308, -8.0, -7.3192, 2.05];

/// Quoted eigenvectors, one row per entry of [`PRINTED_EIGENVALUES`].
pub const PRINTED_EIGENVECTORS: [[f64; 4]; 4] = [
    [2.36839, 2.36839, -6.42909, 1.0],
    [-1.0, 1.0, 0.0, 0.0],
    [-0.468884, -0.468884, -0.189917, 1.0],
    [0.900498, 0.900498, 0.819005, 1.0],
];

/// Value quoted for the first excited level, units a·c·m·ħ·ω̃.
pub const PRINTED_E1_SHIFT: f64 = -2.5;

/// Quoted `⟨4 p_z p_z̄⟩` for the first excited level without the `L_z`
/// part, units m·ħ·ω̃.
pub const PRINTED_E1_P2: f64 = -2.5;

/// The reference degenerate block, units a·c·m·ħ·ω̃.
pub fn printed_block() -> ComplexMatrix {
    let rows = [
        [11.0, -5.0, -5.0, -5.0],
        [-5.0, 11.0, -5.0, -5.0],
        [-5.0, -5.0, 13.0, -5.0],
        [-5.0, -5.0, -5.0, 9.0],
    ];
    ComplexMatrix::from_real_rows(
        &rows
            .iter()
            .map(|r| r.iter().map(|x| -0.5 * x).collect())
            .collect::<Vec<_>>(),
    )
    .expect("finite constant block")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowStatus {
    Match,
    Discrepancy(String),
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Match => write!(f, "MATCH"),
            RowStatus::Discrepancy(d) => write!(f, "DISCREPANCY({d})"),
        }
    }
}

impl Serialize for RowStatus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RowStatus {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "MATCH" {
            return Ok(RowStatus::Match);
        }
        s.strip_prefix("DISCREPANCY(")
            .and_then(|r| r.strip_suffix(')'))
            .map(|d| RowStatus::Discrepancy(d.to_string()))
            .ok_or_else(|| serde::de::Error::custom(format!("bad status {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRow {
    pub group: u8,
    pub id: String,
    pub computed: Vec<f64>,
    pub reference: Vec<f64>,
    pub units: String,
    pub tolerance: f64,
    pub status: RowStatus,
    /// Known disagreement with the quoted value; does not fail validation.
    pub allowlisted: bool,
}

impl ReplicationRow {
    fn compare(
        group: u8,
        id: &str,
        computed: Vec<f64>,
        reference: Vec<f64>,
        units: &str,
        tolerance: f64,
        relative: bool,
    ) -> Self {
        let worst = computed
            .iter()
            .zip(&reference)
            .map(|(c, r)| {
                let d = (c - r).abs();
                if relative {
                    d / r.abs().max(f64::MIN_POSITIVE)
                } else {
                    d
                }
            })
            .fold(0.0, f64::max);
        let status = if computed.len() == reference.len() && worst <= tolerance {
            RowStatus::Match
        } else {
            RowStatus::Discrepancy(format!("deviation {worst:.3e} exceeds {tolerance:.1e}"))
        };
        Self {
            group,
            id: id.to_string(),
            computed,
            reference,
            units: units.to_string(),
            tolerance,
            status,
            allowlisted: false,
        }
    }

    fn failed(group: u8, id: &str, units: &str, detail: String) -> Self {
        Self {
            group,
            id: id.to_string(),
            computed: Vec::new(),
            reference: Vec::new(),
            units: units.to_string(),
            tolerance: 0.0,
            status: RowStatus::Discrepancy(detail),
            allowlisted: false,
        }
    }

    fn allowlist(mut self, detail: &str) -> Self {
        if let RowStatus::Discrepancy(d) = &self.status {
            self.status = RowStatus::Discrepancy(format!("{detail}; {d}"));
            self.allowlisted = true;
        }
        self
    }

    pub fn is_match(&self) -> bool {
        self.status == RowStatus::Match
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    pub rows: Vec<ReplicationRow>,
    pub ground: Option<PTReport>,
    pub first_excited: Option<PTReport>,
    pub n2_artifact: Option<PTReport>,
    pub n2_printed: Option<PTReport>,
}

impl ReplicationReport {
    /// Rows that disagree and are not on the allowlist.
    pub fn unexpected_discrepancies(&self) -> Vec<&ReplicationRow> {
        self.rows
            .iter()
            .filter(|r| !r.is_match() && !r.allowlisted)
            .collect()
    }

    pub fn row(&self, id: &str) -> Option<&ReplicationRow> {
        self.rows.iter().find(|r| r.id == id)
    }
}

const NATURAL: &str = "natural";
const SHIFT: &str = "a·c·m·ħ·ω̃";

fn oracle_row(group: u8, id: &str, report: &PTReport) -> ReplicationRow {
    let mut row = ReplicationRow::compare(
        group,
        id,
        report.shifts.clone(),
        report.oracle_slopes.clone(),
        SHIFT,
        PT_ORACLE_REL_TOL,
        true,
    );
    if report.discrepancy_flags.is_empty() && report.oracle_slopes.len() == report.shifts.len() {
        // The noise allowance was already applied when the flags were set.
        row.status = RowStatus::Match;
    } else if !report.discrepancy_flags.is_empty() {
        row.status = RowStatus::Discrepancy(report.discrepancy_flags.join("; "));
    }
    row
}

fn spectrum_rows(space: &FockSpace, params: &ModelParams, rows: &mut Vec<ReplicationRow>) {
    let spectrum = match interior_spectrum(space, &params.with_gup_a(0.0)) {
        Ok(s) => s,
        Err(e) => {
            rows.push(ReplicationRow::failed(1, "E_n", NATURAL, e.to_string()));
            return;
        }
    };
    for n in 0..=4 {
        for branch in [Branch::Plus, Branch::Minus] {
            let id = format!("E{n}{branch}");
            match landau_level(params, n, branch) {
                Ok(target) => {
                    let nearest = spectrum
                        .iter()
                        .cloned()
                        .min_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()))
                        .unwrap_or(f64::NAN);
                    rows.push(ReplicationRow::compare(
                        1,
                        &id,
                        vec![nearest],
                        vec![target],
                        NATURAL,
                        1e-8,
                        true,
                    ));
                }
                Err(e) => rows.push(ReplicationRow::failed(1, &id, NATURAL, e.to_string())),
            }
        }
    }
}

fn eigenvector_rows(printed: &ComplexMatrix, rows: &mut Vec<ReplicationRow>) {
    let residual = |v: &[f64], lambda: f64| {
        let v: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
        let mv = printed.mat_vec(&v);
        let r: Vec<C64> = mv.iter().zip(&v).map(|(a, b)| a - b * lambda).collect();
        vec_norm(&r) / vec_norm(&v)
    };
    rows.push(ReplicationRow::compare(
        5,
        "eigvec (-1,1,0,0)",
        vec![residual(&[-1.0, 1.0, 0.0, 0.0], -8.0)],
        vec![0.0],
        SHIFT,
        1e-12,
        false,
    ));
    let residuals = PRINTED_EIGENVECTORS
        .iter()
        .zip(PRINTED_EIGENVALUES)
        .map(|(v, l)| residual(v, l))
        .collect::<Vec<_>>();
    rows.push(ReplicationRow::compare(
        5,
        "eigvec table",
        residuals,
        vec![0.0; 4],
        SHIFT,
        1e-3,
        false,
    ));
}

/// Builds the fixed comparison table between computed quantities and the
/// quoted ones. Failures become rows, never errors.
pub fn replicate_paper(space: &FockSpace, params: &ModelParams) -> ReplicationReport {
    let mut rows = Vec::new();
    let mut report = ReplicationReport {
        rows: Vec::new(),
        ground: None,
        first_excited: None,
        n2_artifact: None,
        n2_printed: None,
    };

    spectrum_rows(space, params, &mut rows);

    let pt_part = (|| -> Result<(Perturbation, OracleSlopes)> {
        Ok((
            Perturbation::new(space, params)?,
            OracleSlopes::compute(space, params, DEFAULT_ALPHA_STEPS)?,
        ))
    })();
    match pt_part {
        Err(e) => {
            for (g, id) in [(2, "E0'"), (3, "E1'"), (4, "n2 artifact oracle")] {
                rows.push(ReplicationRow::failed(g, id, SHIFT, e.to_string()));
            }
        }
        Ok((pt, oracle)) => {
            let zero_branch = if params.omega_tilde() > 0.0 {
                Branch::Plus
            } else {
                Branch::Minus
            };
            match pt.first_order(ClusterState::new(0, zero_branch, 0), Some(&oracle)) {
                Ok(r) => {
                    let mut row = ReplicationRow::compare(
                        2,
                        "E0'",
                        r.shifts.clone(),
                        vec![-1.0],
                        SHIFT,
                        1e-10,
                        false,
                    );
                    if !r.discrepancy_flags.is_empty() {
                        row.status = RowStatus::Discrepancy(r.discrepancy_flags.join("; "));
                    }
                    rows.push(row);
                    rows.push(oracle_row(2, "E0' oracle", &r));
                    report.ground = Some(r);
                }
                Err(e) => rows.push(ReplicationRow::failed(2, "E0'", SHIFT, e.to_string())),
            }

            match pt.first_order(ClusterState::new(1, Branch::Plus, 0), Some(&oracle)) {
                Ok(r) => {
                    let c1 = spinor_level(params, 1, Branch::Plus)
                        .map(|l| l.c_n)
                        .unwrap_or(f64::NAN);
                    rows.push(
                        ReplicationRow::compare(
                            3,
                            "E1'",
                            r.shifts.clone(),
                            vec![PRINTED_E1_SHIFT],
                            SHIFT,
                            1e-10,
                            false,
                        )
                        .allowlist(&format!(
                            "computed -(1 + c1^2) with c1 = {c1:.12}, quoted -5/2"
                        )),
                    );
                    rows.push(oracle_row(3, "E1' oracle", &r));
                    if let Some(b) = r.breakdown {
                        rows.push(
                            ReplicationRow::compare(
                                3,
                                "E1' <4 pz pzbar> without Lz",
                                vec![b.ladder + b.zzbar],
                                vec![PRINTED_E1_P2],
                                "m·ħ·|ω̃|",
                                1e-10,
                                false,
                            )
                            .allowlist(
                                "quoted value is negative for a positive semidefinite operator",
                            ),
                        );
                    }
                    report.first_excited = Some(r);
                }
                Err(e) => rows.push(ReplicationRow::failed(3, "E1'", SHIFT, e.to_string())),
            }
            match pt.first_order(ClusterState::new(1, Branch::Minus, 0), Some(&oracle)) {
                Ok(r) => rows.push(oracle_row(3, "E1'(-) oracle", &r)),
                Err(e) => rows.push(ReplicationRow::failed(
                    3,
                    "E1'(-) oracle",
                    SHIFT,
                    e.to_string(),
                )),
            }

            match pt.degenerate(&landau_cluster(2, Branch::Plus, 4), Some(&oracle)) {
                Ok(r) => {
                    rows.push(oracle_row(4, "n2 artifact oracle", &r));
                    rows.push(
                        ReplicationRow::compare(
                            4,
                            "n2 artifact vs printed",
                            r.shifts.clone(),
                            PRINTED_EIGENVALUES.to_vec(),
                            SHIFT,
                            5e-4,
                            false,
                        )
                        .allowlist("computed cluster block is diagonal in angular momentum, printed block is not"),
                    );
                    report.n2_artifact = Some(r);
                }
                Err(e) => rows.push(ReplicationRow::failed(
                    4,
                    "n2 artifact oracle",
                    SHIFT,
                    e.to_string(),
                )),
            }
        }
    }

    let printed = printed_block();
    match degenerate_shift_from_matrix("printed n=2 block", &printed) {
        Ok(r) => {
            rows.push(ReplicationRow::compare(
                4,
                "n2 printed eigenvalues",
                r.shifts.clone(),
                PRINTED_EIGENVALUES.to_vec(),
                SHIFT,
                5e-4,
                false,
            ));
            rows.push(ReplicationRow::compare(
                4,
                "n2 printed trace",
                vec![r.shifts.iter().sum()],
                vec![r.subspace_matrix.trace().re],
                SHIFT,
                1e-12,
                false,
            ));
            report.n2_printed = Some(r);
        }
        Err(e) => rows.push(ReplicationRow::failed(
            4,
            "n2 printed eigenvalues",
            SHIFT,
            e.to_string(),
        )),
    }
    eigenvector_rows(&printed, &mut rows);

    let b_c = critical_field(params);
    let at_c = params.with_field(b_c);
    rows.push(ReplicationRow::compare(
        6,
        "critical field",
        vec![b_c, at_c.omega_tilde(), at_c.shift_unit()],
        vec![
            2.0 * params.omega * params.mass * params.light_speed / params.charge,
            0.0,
            0.0,
        ],
        NATURAL,
        1e-14,
        false,
    ));

    report.rows = rows;
    report
}

/// Eigenvalues of the reference block, ascending.
pub fn printed_block_eigenvalues() -> Result<Vec<f64>> {
    Ok(eigh(&printed_block(), 1e-12)?.eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_round_trips() {
        for s in [RowStatus::Match, RowStatus::Discrepancy("x (y)".into())] {
            let j = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<RowStatus>(&j).unwrap(), s);
        }
    }

    #[test]
    fn printed_block_checks() {
        let vals = printed_block_eigenvalues().unwrap();
        for (v, p) in vals.iter().zip(PRINTED_EIGENVALUES) {
            assert!((v - p).abs() < 5e-4);
        }
        assert!((vals.iter().sum::<f64>() + 22.0).abs() < 1e-12);
    }

    #[test]
    fn replication_on_small_space() {
        let space = FockSpace::new(10, true).unwrap();
        let p = ModelParams::natural(1.0, 1.0, 1e-4).unwrap();
        let r = replicate_paper(&space, &p);
        assert!(r.row("E0'").unwrap().is_match());
        assert!(r.row("eigvec (-1,1,0,0)").unwrap().is_match());
        assert!(r.row("E1'").unwrap().allowlisted);
        let bad: Vec<_> = r.unexpected_discrepancies();
        assert!(bad.is_empty(), "{bad:#?}");
    }
}
