//! Randomized invariants over univalent maps.
//!
//! Maps with `Σ k|a_k| < 1` are univalent on `|w| > 1`, so every strategy
//! below stays inside the valid input space.

use npannulus::assembly::{build_np_matrix, build_reduced_b, mode_index, mode_of_index};
use npannulus::geometry::{AnnulusGeometry, ConformalMap, Curve};
use npannulus::gershgorin::{check_containment, entry_disks, Region};
use npannulus::grunsky::{
    check_strong_grunsky, compute_table, eval_polynomial, faber_coefficients, ScaledGrunskyTable,
};
use npannulus::spectral::{eigenvalues, hausdorff_to_interval, realize, twin_defect};
use npannulus::Complex64;
use proptest::prelude::*;

fn univalent_map() -> impl Strategy<Value = ConformalMap> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6).prop_map(|raw| {
        let budget = 0.8;
        let weight: f64 = raw
            .iter()
            .enumerate()
            .map(|(i, (re, im))| (i + 1) as f64 * re.hypot(*im))
            .sum::<f64>()
            .max(1e-12);
        let scale = budget / weight;
        let coeffs: Vec<(usize, Complex64)> = raw
            .iter()
            .enumerate()
            .map(|(i, (re, im))| (i + 1, Complex64::new(re * scale, im * scale)))
            .collect();
        ConformalMap::new(Complex64::new(0.0, 0.0), &coeffs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grunsky_symmetry(map in univalent_map()) {
        let table = compute_table(&map, 100).unwrap();
        prop_assert!(table.symmetry_defect() < 1e-10);
    }

    #[test]
    fn strong_grunsky_inequality(map in univalent_map(), radius in 1.0f64..1.5) {
        let table = compute_table(&map, 40).unwrap();
        let report = check_strong_grunsky(&table, radius);
        prop_assert!(report.holds(), "max row sum {}", report.max_row_sum());
    }

    #[test]
    fn faber_grunsky_identity(map in univalent_map(), theta in 0.0f64..std::f64::consts::TAU) {
        let order = 60;
        let table = compute_table(&map, order).unwrap();
        let w = Complex64::from_polar(1.3, theta);
        let z = map.eval(w).unwrap();
        for n in 1..=8 {
            let faber = faber_coefficients(&map, n, n).unwrap();
            let tail: Complex64 = (1..=order).map(|m| table.get(n, m) * w.powi(-(m as i32))).sum();
            let residual = (eval_polynomial(&faber, z) - w.powi(n as i32) - tail).norm();
            prop_assert!(residual < 1e-8, "n = {n}: residual {residual}");
        }
    }

    #[test]
    fn mode_index_round_trips(order in 1usize..300, raw in 0usize..10_000) {
        let index = raw % (2 * (2 * order + 1));
        let (mode, curve) = mode_of_index(index, order).unwrap();
        prop_assert_eq!(mode_index(mode, curve, order).unwrap(), index);
        prop_assert!(mode_index(order as i64 + 1, Curve::Inner, order).is_err());
    }

    #[test]
    fn spectrum_is_real_twin_and_contained(map in univalent_map(), ratio in 0.5f64..0.95) {
        let geom = AnnulusGeometry::with_ratio(map, 1.2, ratio).unwrap();
        let table = compute_table(&geom.map, 30).unwrap();
        let k = build_np_matrix(&geom, &table, 30).unwrap();
        let realized = realize(&eigenvalues(k.entries()).unwrap(), 1e-8).unwrap();
        prop_assert!(twin_defect(&realized.values) < 1e-8);
        prop_assert!(realized.values[0] <= 0.5 + 1e-8);
        prop_assert!(*realized.values.last().unwrap() >= -0.5 - 1e-8);
        let d = hausdorff_to_interval(&realized.values, -0.5, 0.5).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn entry_disks_contain_reduced_spectrum(map in univalent_map(), ratio in 0.5f64..0.95) {
        let geom = AnnulusGeometry::with_ratio(map, 1.2, ratio).unwrap();
        let scaled = ScaledGrunskyTable::new(compute_table(&geom.map, 30).unwrap(), 1.2).unwrap();
        let b = build_reduced_b(&geom, &scaled, 30).unwrap();
        let regions: Vec<Region> = entry_disks(&b).iter().map(Region::from).collect();
        let report = check_containment(&eigenvalues(b.entries()).unwrap(), &regions).unwrap();
        prop_assert!(report.contained(), "worst margin {}", report.worst_margin);
    }

    #[test]
    fn squared_spectrum_matches_reduced_matrix(map in univalent_map(), ratio in 0.6f64..0.95) {
        let order = 20;
        let geom = AnnulusGeometry::with_ratio(map, 1.2, ratio).unwrap();
        let table = compute_table(&geom.map, order).unwrap();
        let k = build_np_matrix(&geom, &table, order).unwrap();
        let lambdas = realize(&eigenvalues(k.entries()).unwrap(), 1e-8).unwrap().values;
        let scaled = ScaledGrunskyTable::new(table, 1.2).unwrap();
        let mu = eigenvalues(build_reduced_b(&geom, &scaled, order).unwrap().entries()).unwrap();
        for l in lambdas.iter().filter(|l| l.abs() < 0.5 - 1e-6) {
            let sq = Complex64::new(l * l, 0.0);
            let gap = mu.iter().map(|m| (m - sq).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(gap < 1e-8, "λ² = {} unmatched (gap {gap})", l * l);
        }
    }
}
