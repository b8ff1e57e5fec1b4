//! First-order perturbation theory for the GUP term, the exact
//! diagonalization oracle, degeneracy analysis, field scans and the
//! replication table.

mod analysis;
mod oracle;
mod pt;
mod replicate;

pub use analysis::{
    cluster_values, critical_field, degeneracy_analysis, field_scan, field_scan_with_window,
    DegeneracyAnalysis, LevelCluster, ScanPoint, ScanResult, DEFAULT_ENERGY_WINDOW, NOISE_FLOOR,
};
pub use oracle::{
    block_partition, exact_oracle, interior_spectrum, project_interior, OracleSlopes, SlopeTrack,
    DEFAULT_ALPHA_STEPS,
};
pub use pt::{
    check_nondegenerate, cluster_energy, degenerate_shift, degenerate_shift_from_matrix,
    first_order_shift, landau_cluster, BasisDescriptor, ClusterState, Component, Method,
    P2Breakdown, PTReport, Perturbation, PT_ORACLE_REL_TOL, SHIFT_UNITS, UNPERTURBED_WINDOW,
};
pub use replicate::{
    printed_block, printed_block_eigenvalues, replicate_paper, ReplicationReport, ReplicationRow,
    RowStatus, PRINTED_E1_P2, PRINTED_E1_SHIFT, PRINTED_EIGENVALUES, PRINTED_EIGENVECTORS,
};
