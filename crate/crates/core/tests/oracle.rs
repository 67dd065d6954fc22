use npannulus::geometry::{AnnulusGeometry, ConformalMap};
use npannulus::nystrom::oracle_spectrum;
use npannulus::spectral::{np_spectrum, symmetric_top_gap, DEFAULT_IMAG_TOL};

fn paper() -> AnnulusGeometry {
    AnnulusGeometry::new(ConformalMap::paper_example(), 1.1, 1.15).unwrap()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn quadrature_agrees_with_grunsky_matrix() {
    let geom = paper();
    let grunsky = np_spectrum(&geom, 100, DEFAULT_IMAG_TOL).unwrap();
    let oracle = oracle_spectrum(&geom, 512, DEFAULT_IMAG_TOL).unwrap();
    let gap = symmetric_top_gap(&grunsky.realized, &oracle.realized, 20);
    assert!(gap < 1e-6, "gap {gap}");
}

#[test]
fn quadrature_agrees_on_concentric_circles() {
    let geom = AnnulusGeometry::new(ConformalMap::identity(), 1.0, 2.0).unwrap();
    let grunsky = np_spectrum(&geom, 100, DEFAULT_IMAG_TOL).unwrap();
    let oracle = oracle_spectrum(&geom, 512, DEFAULT_IMAG_TOL).unwrap();
    let gap = symmetric_top_gap(&grunsky.realized, &oracle.realized, 20);
    assert!(gap < 1e-10, "gap {gap}");
}

#[test]
fn doubling_nodes_changes_top_ten_little() {
    let geom = paper();
    let a = oracle_spectrum(&geom, 512, DEFAULT_IMAG_TOL).unwrap();
    let b = oracle_spectrum(&geom, 1024, DEFAULT_IMAG_TOL).unwrap();
    let gap = symmetric_top_gap(&a.realized, &b.realized, 10);
    assert!(gap < 1e-8, "gap {gap}");
}

#[test]
fn error_decays_faster_than_any_power() {
    let geom = paper();
    let exact = np_spectrum(&geom, 150, DEFAULT_IMAG_TOL)
        .unwrap()
        .largest_magnitude(10);
    let errors: Vec<f64> = [64, 128, 256, 512]
        .iter()
        .map(|&n| {
            let top = oracle_spectrum(&geom, n, 1e-6)
                .unwrap()
                .largest_magnitude(10);
            max_gap(&top, &exact)
        })
        .collect();
    // Under algebraic convergence log2(e_n / e_2n) is constant; here it grows.
    let rates: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(rates.windows(2).all(|w| w[1] > w[0]), "{rates:?}");
}
