use gup_dosc::cli::to_json;
use gup_dosc::fock::{
    cartesian_x, interior_max_diff, ladder_a, ladder_b, momentum_ops, p_squared,
    p_squared_via_ladder, position_ops, printed_ladder_pair, FockSpace,
};
use gup_dosc::model::{build_h0, build_h_prime, spinor_level, Branch, ModelParams};
use gup_dosc::numerics::{adjoint, commutator, eigh, eigvalsh, mat_mul, ComplexMatrix};
use gup_dosc::perturbation::{
    block_partition, field_scan, interior_spectrum, landau_cluster, project_interior, ClusterState,
    OracleSlopes, PTReport, Perturbation, ScanResult, DEFAULT_ALPHA_STEPS, PT_ORACLE_REL_TOL,
};
use gup_dosc::C64;
use proptest::prelude::*;

fn params(omega: f64, field: f64, mass: f64, hbar: f64) -> ModelParams {
    ModelParams {
        mass,
        hbar,
        omega,
        field,
        gup_a: 1e-4,
        ..ModelParams::default()
    }
}

/// Reduced frequency kept away from the critical field.
fn sub_critical() -> impl Strategy<Value = (f64, f64)> {
    (0.2f64..3.0, 0.0f64..0.8).prop_map(|(w, frac)| (w, 2.0 * w * frac))
}

fn random_hermitian(n: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(n);
    let mut it = entries.iter().cycle();
    for i in 0..n {
        a[(i, i)] = C64::new(it.next().unwrap().0, 0.0);
        for j in 0..i {
            let &(re, im) = it.next().unwrap();
            a[(i, j)] = C64::new(re, im);
            a[(j, i)] = C64::new(re, -im);
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_commutators(cutoff in 2usize..14) {
        let s = FockSpace::new(cutoff, false).unwrap();
        let id = ComplexMatrix::identity(s.dim());
        let a = ladder_a(&s);
        let b = ladder_b(&s);
        for op in [&a, &b] {
            let c = commutator(op, &adjoint(op)).unwrap();
            prop_assert!(interior_max_diff(&s, &c, &id) <= 1e-13);
        }
        let zeros = ComplexMatrix::zeros(s.dim());
        prop_assert!(interior_max_diff(&s, &commutator(&a, &b).unwrap(), &zeros) <= 1e-13);
        prop_assert!(interior_max_diff(&s, &commutator(&a, &adjoint(&b)).unwrap(), &zeros) <= 1e-13);
    }

    #[test]
    fn ladder_identity_for_p_squared(
        cutoff in 3usize..12,
        (w, b) in (0.1f64..3.0, -2.0f64..6.0),
        mass in 0.5f64..3.0,
        hbar in 0.5f64..2.0,
    ) {
        let p = params(w, b, mass, hbar);
        prop_assume!(p.omega_tilde().abs() > 1e-3);
        let s = FockSpace::new(cutoff, false).unwrap();
        let osc = p.osc();
        let scale = osc.momentum_sq_unit().unwrap();
        let gap = interior_max_diff(&s, &p_squared(&s, &osc).unwrap(), &p_squared_via_ladder(&s, &osc).unwrap());
        prop_assert!(gap <= 1e-10 * scale, "gap {gap:e}");
    }

    #[test]
    fn position_momentum_commutators(cutoff in 2usize..12, (w, b) in sub_critical(), hbar in 0.5f64..2.0) {
        let p = params(w, b, 1.0, hbar);
        let s = FockSpace::new(cutoff, false).unwrap();
        let osc = p.osc();
        let (z, zbar) = position_ops(&s, &osc).unwrap();
        let (pz, pzbar) = momentum_ops(&s, &osc).unwrap();
        let i_hbar = ComplexMatrix::identity(s.dim()).scale(C64::new(0.0, hbar));
        let zeros = ComplexMatrix::zeros(s.dim());
        prop_assert!(interior_max_diff(&s, &commutator(&z, &pz).unwrap(), &i_hbar) <= 1e-12);
        prop_assert!(interior_max_diff(&s, &commutator(&zbar, &pzbar).unwrap(), &i_hbar) <= 1e-12);
        prop_assert!(interior_max_diff(&s, &commutator(&z, &pzbar).unwrap(), &zeros) <= 1e-12);
        prop_assert!(interior_max_diff(&s, &commutator(&z, &zbar).unwrap(), &zeros) <= 1e-12);
    }

    #[test]
    fn printed_ladder_pair_is_rotated_mode_pair(cutoff in 2usize..10, (w, b) in sub_critical(), mass in 0.5f64..2.0) {
        let p = params(w, b, mass, 1.0);
        let s = FockSpace::new(cutoff, false).unwrap();
        let (lower, upper) = printed_ladder_pair(&s, &p.osc()).unwrap();
        let minus_i = C64::new(0.0, -1.0);
        prop_assert!(interior_max_diff(&s, &lower, &ladder_a(&s).scale(minus_i)) <= 1e-13);
        prop_assert!(interior_max_diff(&s, &upper, &ladder_b(&s).scale(minus_i)) <= 1e-13);
    }

    #[test]
    fn deformed_commutator_to_first_order(cutoff in 4usize..12, a in 1e-5f64..1e-2) {
        let p = params(1.0, 1.0, 1.0, 1.0);
        let s = FockSpace::new(cutoff, false).unwrap();
        let (x, px) = cartesian_x(&s, &p.osc()).unwrap();
        let px2 = mat_mul(&px, &px).unwrap();
        let id = ComplexMatrix::identity(s.dim());
        let deviation = |a: f64| {
            let mut pg = px.clone();
            pg.add_scaled(&px2, C64::new(-a, 0.0)).unwrap();
            let lhs = commutator(&x, &pg).unwrap();
            let mut rhs = id.clone();
            rhs.add_scaled(&px, C64::new(-2.0 * a, 0.0)).unwrap();
            let residual = interior_max_diff(&s, &lhs, &rhs.scale(C64::new(0.0, 1.0)));
            (residual, interior_max_diff(&s, &lhs, &id.scale(C64::new(0.0, 1.0))))
        };
        let (r1, d1) = deviation(a);
        let (r2, d2) = deviation(2.0 * a);
        prop_assert!(r1 <= 1e-11 && r2 <= 1e-11);
        prop_assert!((d2 / d1 - 2.0).abs() <= 1e-8, "{d1} {d2}");
    }

    #[test]
    fn p_squared_is_positive_on_interior(cutoff in 2usize..12, (w, b) in sub_critical()) {
        let p = params(w, b, 1.0, 1.0);
        let s = FockSpace::new(cutoff, false).unwrap();
        let p2 = p_squared(&s, &p.osc()).unwrap();
        let scale = p.osc().momentum_sq_unit().unwrap();
        let (proj, _) = project_interior(&s, &p2);
        prop_assert!(proj.is_hermitian(1e-12 * scale));
        for block in block_partition(&[&proj]) {
            for v in eigvalsh(&proj.submatrix(&block), 1e-12).unwrap() {
                prop_assert!(v >= -1e-10 * scale);
            }
        }
    }

    #[test]
    fn eigh_contract(n in 1usize..40, entries in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..64)) {
        let a = random_hermitian(n, &entries);
        let scale = a.max_norm().max(f64::MIN_POSITIVE);
        let dec = eigh(&a, 1e-10).unwrap();
        prop_assert!(dec.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let v = &dec.eigenvectors;
        let av = mat_mul(&a, v).unwrap();
        let vv = mat_mul(&adjoint(v), v).unwrap();
        for i in 0..n {
            for k in 0..n {
                prop_assert!((av[(i, k)] - v[(i, k)] * dec.eigenvalues[k]).norm() <= 1e-10 * scale * n as f64);
                let want = if i == k { 1.0 } else { 0.0 };
                prop_assert!((vv[(i, k)] - want).norm() <= 1e-10);
            }
        }
        let trace_gap = (dec.eigenvalues.iter().sum::<f64>() - a.trace().re).abs();
        prop_assert!(trace_gap <= 1e-10 * n as f64 * scale);
        // Fixed algorithm: identical input, identical output.
        prop_assert_eq!(eigh(&a, 1e-10).unwrap().eigenvectors, dec.eigenvectors);
    }

    #[test]
    fn spinor_coefficients_normalized(n in 0usize..30, (w, b) in (0.05f64..3.0, -3.0f64..8.0)) {
        let p = params(w, b, 1.0, 1.0);
        prop_assume!(p.omega_tilde() != 0.0);
        for branch in [Branch::Plus, Branch::Minus] {
            if let Ok(l) = spinor_level(&p, n, branch) {
                prop_assert!((l.c_n * l.c_n + l.d_n * l.d_n - 1.0).abs() <= 1e-12);
                match branch {
                    Branch::Plus => prop_assert!(l.energy >= p.rest_energy()),
                    Branch::Minus => prop_assert!(l.energy <= -p.rest_energy()),
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn unperturbed_spectrum_is_charge_symmetric(cutoff in 3usize..9, (w, b) in (0.1f64..2.0, -1.0f64..5.0)) {
        let p = params(w, b, 1.0, 1.0).with_gup_a(0.0);
        let spec = interior_spectrum(&FockSpace::new(cutoff, true).unwrap(), &p).unwrap();
        for (lo, hi) in spec.iter().zip(spec.iter().rev()) {
            prop_assert!((lo + hi).abs() <= 1e-10 * p.rest_energy());
        }
    }

    #[test]
    fn shifts_agree_with_oracle((w, b) in (0.3f64..2.0, -1.0f64..6.0)) {
        let p = params(w, b, 1.0, 1.0);
        prop_assume!(p.omega_tilde().abs() > 0.05);
        let s = FockSpace::new(9, true).unwrap();
        let pt = Perturbation::new(&s, &p).unwrap();
        let oracle = OracleSlopes::compute(&s, &p, DEFAULT_ALPHA_STEPS).unwrap();
        let zero_branch = if p.omega_tilde() > 0.0 { Branch::Plus } else { Branch::Minus };
        let reports = [
            pt.first_order(ClusterState::new(0, zero_branch, 0), Some(&oracle)).unwrap(),
            pt.first_order(ClusterState::new(1, Branch::Plus, 0), Some(&oracle)).unwrap(),
            pt.first_order(ClusterState::new(1, Branch::Minus, 0), Some(&oracle)).unwrap(),
            pt.degenerate(&landau_cluster(2, Branch::Plus, 4), Some(&oracle)).unwrap(),
            pt.degenerate(&landau_cluster(3, Branch::Minus, 3), Some(&oracle)).unwrap(),
        ];
        for r in &reports {
            prop_assert!(r.discrepancy_flags.is_empty(), "{}: {:?}", r.cluster_label, r.discrepancy_flags);
            prop_assert_eq!(r.oracle_slopes.len(), r.shifts.len());
            prop_assert!(r.oracle_gap().unwrap() <= PT_ORACLE_REL_TOL);
            prop_assert!(r.shifts.windows(2).all(|w| w[0] <= w[1]));
            let scale = r.subspace_matrix.max_norm();
            prop_assert!(r.subspace_matrix.is_hermitian(1e-12 * scale));
            let trace = r.subspace_matrix.trace().re;
            prop_assert!((r.shifts.iter().sum::<f64>() - trace).abs() <= 1e-12 * scale.max(1.0) * r.shifts.len() as f64);
            if let Some(v) = &r.eigenvectors {
                let vv = mat_mul(&adjoint(v), v).unwrap();
                for i in 0..v.dim() {
                    for j in 0..v.dim() {
                        let want = if i == j { 1.0 } else { 0.0 };
                        prop_assert!((vv[(i, j)] - want).norm() <= 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn shifts_are_linear_and_unit_covariant((w, b) in sub_critical(), factor in 1.5f64..4.0) {
        let s = FockSpace::new(8, true).unwrap();
        let shifts = |p: &ModelParams| -> Vec<f64> {
            let pt = Perturbation::new(&s, p).unwrap();
            let mut out = pt.first_order(ClusterState::new(1, Branch::Plus, 0), None).unwrap().shifts;
            out.extend(pt.degenerate(&landau_cluster(2, Branch::Plus, 4), None).unwrap().shifts);
            out
        };
        let natural = |p: &ModelParams| -> Vec<f64> {
            Perturbation::new(&s, p).unwrap()
                .degenerate(&landau_cluster(2, Branch::Plus, 4), None).unwrap().shifts_natural
        };
        let base = params(w, b, 1.0, 1.0);
        for (x, y) in natural(&base).iter().zip(natural(&base.with_gup_a(2.0 * base.gup_a))) {
            prop_assert!((y - 2.0 * x).abs() <= 1e-12 * x.abs());
        }
        // Same λ with m rescaled: shifts in units of a·c·m·ħ·ω̃ do not move.
        let heavy = ModelParams { mass: factor, omega: w * factor, field: b * factor * factor, ..base };
        prop_assert!((heavy.lambda() - base.lambda()).abs() <= 1e-12);
        for (x, y) in shifts(&base).iter().zip(shifts(&heavy)) {
            prop_assert!((x - y).abs() <= 1e-10 * x.abs(), "{x} vs {y}");
        }
    }
}

#[test]
fn h_prime_is_hermitian_and_negative() {
    let s = FockSpace::new(8, true).unwrap();
    let p = params(1.0, 1.0, 1.0, 1.0);
    let hp = build_h_prime(&s, &p).unwrap();
    assert!(hp.is_hermitian(1e-14));
    let (proj, _) = project_interior(&s, &hp);
    for block in block_partition(&[&proj]) {
        for v in eigvalsh(&proj.submatrix(&block), 1e-12).unwrap() {
            assert!(v <= 1e-14);
        }
    }
    let h0 = build_h0(&s, &p).unwrap();
    assert!(h0.is_hermitian(1e-12 * p.rest_energy()));
}

#[test]
fn scan_keeps_failed_points() {
    // Cutoff 4 cannot hold the n = 2 cluster; every non-critical point errors.
    let s = FockSpace::new(4, true).unwrap();
    let p = params(1.0, 0.0, 1.0, 1.0);
    let fields = [0.0, 0.5, 1.0, 2.0, 2.5];
    let r = field_scan(&s, &p, &fields).unwrap();
    assert_eq!(r.points.len(), fields.len());
    assert!(r.points.iter().filter(|p| p.error.is_some()).count() >= 4);
    assert!(r.points.windows(2).all(|w| w[0].field <= w[1].field));
    assert_eq!(r.critical_field, Some(2.0));
    let json = to_json(&r);
    assert_eq!(serde_json::from_str::<ScanResult>(&json).unwrap(), r);
}

#[test]
fn reports_round_trip_through_json() {
    let s = FockSpace::new(8, true).unwrap();
    let p = params(1.0, 1.0, 1.0, 1.0);
    let pt = Perturbation::new(&s, &p).unwrap();
    let oracle = OracleSlopes::compute(&s, &p, DEFAULT_ALPHA_STEPS).unwrap();
    for r in [
        pt.first_order(ClusterState::new(1, Branch::Plus, 0), Some(&oracle))
            .unwrap(),
        pt.degenerate(&landau_cluster(2, Branch::Plus, 4), Some(&oracle))
            .unwrap(),
    ] {
        let json = to_json(&r);
        let back: PTReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(to_json(&back), json);
    }
}
