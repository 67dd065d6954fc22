//! Eigenvalue extraction and post-processing: realization, comparison with
//! the circular annulus, and Hausdorff distance to `[-1/2, 1/2]`.

use num_complex::Complex64;

use crate::assembly::build_np_matrix;
use crate::error::{Error, Result};
use crate::geometry::{AnnulusGeometry, ConformalMap};
use crate::grunsky::compute_table;
use crate::{CMat, RMat};

/// Default bound on discarded imaginary parts.
pub const DEFAULT_IMAG_TOL: f64 = 1e-8;

/// Slack allowed outside `[-1/2, 1/2]` before a spectrum is rejected.
pub const CONTAINMENT_SLACK: f64 = 1e-6;

/// All eigenvalues (with multiplicity, unordered) of a dense complex matrix.
pub fn eigenvalues(matrix: &CMat) -> Result<Vec<Complex64>> {
    check_square(matrix.nrows(), matrix.ncols())?;
    if matrix.nrows() == 0 {
        return Ok(Vec::new());
    }
    matrix
        .eigenvalues()
        .map_err(|e| Error::Solver(format!("{e:?}")))
}

/// All eigenvalues of a dense real matrix.
pub fn eigenvalues_real(matrix: &RMat) -> Result<Vec<Complex64>> {
    check_square(matrix.nrows(), matrix.ncols())?;
    if matrix.nrows() == 0 {
        return Ok(Vec::new());
    }
    matrix
        .eigenvalues()
        .map_err(|e| Error::Solver(format!("{e:?}")))
}

fn check_square(rows: usize, cols: usize) -> Result<()> {
    if rows != cols {
        return Err(Error::Argument(format!(
            "matrix is {rows}x{cols}, not square"
        )));
    }
    Ok(())
}

/// Real parts sorted descending, plus the largest discarded `|Im|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Realized {
    pub values: Vec<f64>,
    pub max_imag: f64,
}

pub fn realize(raw: &[Complex64], imag_tol: f64) -> Result<Realized> {
    if !(imag_tol > 0.0) {
        return Err(Error::Argument(format!(
            "imag_tol must be positive, got {imag_tol}"
        )));
    }
    let max_imag = raw.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if max_imag > imag_tol || raw.iter().any(|z| !z.re.is_finite()) {
        return Err(Error::SpectralRealization {
            max_imag,
            tol: imag_tol,
        });
    }
    let mut values: Vec<f64> = raw.iter().map(|z| z.re).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(Realized { values, max_imag })
}

/// Spectrum of one discretization of the annulus NP operator.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub raw: Vec<Complex64>,
    /// Real eigenvalues sorted descending.
    pub realized: Vec<f64>,
    pub max_imag: f64,
    /// Truncation order `N` (Grunsky) or nodes per curve (Nyström).
    pub truncation: usize,
    /// `r = r_i / r_e`.
    pub ratio: f64,
}

impl SpectrumReport {
    /// Realizes `raw` and checks containment in `[-1/2, 1/2]` up to
    /// [`CONTAINMENT_SLACK`].
    pub fn from_raw(
        raw: Vec<Complex64>,
        imag_tol: f64,
        truncation: usize,
        ratio: f64,
    ) -> Result<Self> {
        let report = Self::unchecked(raw, imag_tol, truncation, ratio)?;
        if let (Some(hi), Some(lo)) = (report.realized.first(), report.realized.last()) {
            if *hi > 0.5 + CONTAINMENT_SLACK || *lo < -0.5 - CONTAINMENT_SLACK {
                return Err(Error::Invariant(format!(
                    "spectrum [{lo}, {hi}] leaves [-1/2, 1/2]"
                )));
            }
        }
        Ok(report)
    }

    /// Realizes `raw` without the containment check. Quadrature
    /// discretizations may overshoot `±1/2` by their discretization error.
    pub fn unchecked(
        raw: Vec<Complex64>,
        imag_tol: f64,
        truncation: usize,
        ratio: f64,
    ) -> Result<Self> {
        let Realized { values, max_imag } = realize(&raw, imag_tol)?;
        Ok(Self {
            raw,
            realized: values,
            max_imag,
            truncation,
            ratio,
        })
    }

    /// `max_i |λ_i + λ_{n-1-i}|` over the descending list; zero for an
    /// exactly twin-symmetric spectrum.
    pub fn twin_defect(&self) -> f64 {
        twin_defect(&self.realized)
    }

    /// The `count` eigenvalues of largest modulus, sorted descending by value.
    pub fn largest_magnitude(&self, count: usize) -> Vec<f64> {
        largest_magnitude(&self.realized, count)
    }
}

pub fn twin_defect(descending: &[f64]) -> f64 {
    let n = descending.len();
    (0..n)
        .map(|i| (descending[i] + descending[n - 1 - i]).abs())
        .fold(0.0, f64::max)
}

/// The `count` values of largest `|λ|`, returned sorted descending by value.
pub fn largest_magnitude(values: &[f64], count: usize) -> Vec<f64> {
    let mut by_mag = values.to_vec();
    by_mag.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
    by_mag.truncate(count);
    by_mag.sort_by(|a, b| b.total_cmp(a));
    by_mag
}

/// For each of the `count` largest-`|λ|` values of `a` (descending by
/// value), the nearest value anywhere in `b`. Robust to ties at the cutoff,
/// where rank pairing would split a degenerate group.
pub fn nearest_matches(a: &[f64], b: &[f64], count: usize) -> Vec<(f64, f64)> {
    largest_magnitude(a, count)
        .into_iter()
        .map(|x| {
            let near = b
                .iter()
                .copied()
                .min_by(|p, q| (p - x).abs().total_cmp(&(q - x).abs()))
                .unwrap_or(f64::NAN);
            (x, near)
        })
        .collect()
}

/// Largest nearest-match distance between the top `count` values of either
/// list and the other list.
pub fn symmetric_top_gap(a: &[f64], b: &[f64], count: usize) -> f64 {
    nearest_matches(a, b, count)
        .into_iter()
        .chain(nearest_matches(b, a, count))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Grunsky-matrix spectrum of the annulus at truncation order `order`.
pub fn np_spectrum(geom: &AnnulusGeometry, order: usize, imag_tol: f64) -> Result<SpectrumReport> {
    let table = compute_table(&geom.map, order)?;
    let matrix = build_np_matrix(geom, &table, order)?;
    let raw = eigenvalues(matrix.entries())?;
    SpectrumReport::from_raw(raw, imag_tol, order, geom.ratio())
}

/// `{±r^m/2 : m = 0..=max_mode}` sorted descending.
pub fn reference_annulus_spectrum(r: f64, max_mode: usize) -> Vec<f64> {
    let half: Vec<f64> = (0..=max_mode).map(|m| 0.5 * r.powi(m as i32)).collect();
    let mut all: Vec<f64> = half
        .iter()
        .copied()
        .chain(half.iter().map(|v| -v))
        .collect();
    all.sort_by(|a, b| b.total_cmp(a));
    all
}

/// Spectrum of the circular annulus matrix truncated at `order`, with
/// multiplicity: `±1/2` once each and `±r^m/2` twice (modes `±m`) for
/// `m = 1..=order`. Sorted descending, `2(2·order + 1)` values.
pub fn truncated_annulus_spectrum(r: f64, order: usize) -> Vec<f64> {
    let mut all = vec![0.5, -0.5];
    for m in 1..=order {
        let v = 0.5 * r.powi(m as i32);
        all.extend([v, v, -v, -v]);
    }
    all.sort_by(|a, b| b.total_cmp(a));
    all
}

/// Default reference size: `matrix_size / 2 − 1` modes, so both lists have
/// `matrix_size` entries.
pub fn default_reference_modes(matrix_size: usize) -> usize {
    (matrix_size / 2).saturating_sub(1)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferencePair {
    /// 1-based rank in the descending order.
    pub index: usize,
    pub computed: f64,
    pub reference: f64,
    /// `(computed − reference) / reference`.
    pub rel_diff: f64,
}

/// Rank-paired comparison against the circular-annulus spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceComparison {
    pub pairs: Vec<ReferencePair>,
}

impl ReferenceComparison {
    pub fn max_abs_rel_diff(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.rel_diff.abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|rel_diff|` among the `count` pairs whose reference value has
    /// the smallest (`smallest = true`) or largest magnitude.
    pub fn max_abs_rel_diff_by_magnitude(&self, count: usize, smallest: bool) -> f64 {
        let mut pairs = self.pairs.clone();
        pairs.sort_by(|a, b| a.reference.abs().total_cmp(&b.reference.abs()));
        if !smallest {
            pairs.reverse();
        }
        pairs
            .iter()
            .take(count)
            .map(|p| p.rel_diff.abs())
            .fold(0.0, f64::max)
    }
}

pub fn compare_to_reference(computed: &[f64], reference: &[f64]) -> Result<ReferenceComparison> {
    if computed.len() != reference.len() {
        return Err(Error::Argument(format!(
            "cannot pair {} computed eigenvalues with {} reference values",
            computed.len(),
            reference.len()
        )));
    }
    let mut a = computed.to_vec();
    let mut b = reference.to_vec();
    a.sort_by(|x, y| y.total_cmp(x));
    b.sort_by(|x, y| y.total_cmp(x));
    let pairs = a
        .into_iter()
        .zip(b)
        .enumerate()
        .map(|(i, (computed, reference))| ReferencePair {
            index: i + 1,
            computed,
            reference,
            rel_diff: (computed - reference) / reference,
        })
        .collect();
    Ok(ReferenceComparison { pairs })
}

/// Hausdorff distance between a finite set `S ⊆ [lo, hi]` and `[lo, hi]`,
/// i.e. `sup_{x ∈ [lo,hi]} dist(x, S)`. Points up to `1e-6` outside the
/// interval are clamped onto it.
pub fn hausdorff_to_interval(points: &[f64], lo: f64, hi: f64) -> Result<f64> {
    const CLAMP: f64 = 1e-6;
    if points.is_empty() {
        return Err(Error::Argument("Hausdorff distance of an empty set".into()));
    }
    if !(lo < hi) {
        return Err(Error::Argument(format!("empty interval [{lo}, {hi}]")));
    }
    let mut s = Vec::with_capacity(points.len());
    for &p in points {
        if !(p >= lo - CLAMP && p <= hi + CLAMP) {
            return Err(Error::Argument(format!(
                "point {p} lies outside [{lo}, {hi}]"
            )));
        }
        s.push(p.clamp(lo, hi));
    }
    s.sort_by(f64::total_cmp);
    let mut d = (s[0] - lo).max(hi - s[s.len() - 1]);
    for w in s.windows(2) {
        d = d.max(0.5 * (w[1] - w[0]));
    }
    Ok(d)
}

/// One entry of [`sweep_hausdorff`].
#[derive(Debug)]
pub struct SweepPoint {
    pub ratio: f64,
    pub hausdorff: Result<f64>,
}

/// Hausdorff distance from the truncated spectrum to `[-1/2, 1/2]` for each
/// ratio `r`, keeping the inner curve fixed (`r_e = r_inner / r`).
///
/// Failures are recorded per ratio and do not stop the sweep.
pub fn sweep_hausdorff(
    map: &ConformalMap,
    r_inner: f64,
    ratios: &[f64],
    order: usize,
) -> Vec<SweepPoint> {
    ratios
        .iter()
        .map(|&ratio| SweepPoint {
            ratio,
            hausdorff: sweep_one(map, r_inner, ratio, order),
        })
        .collect()
}

fn sweep_one(map: &ConformalMap, r_inner: f64, ratio: f64, order: usize) -> Result<f64> {
    let geom = AnnulusGeometry::with_ratio(map.clone(), r_inner, ratio)?;
    let report = geom.validate(512);
    if !report.passes() {
        return Err(Error::GeometryDegenerate(format!(
            "ratio {ratio}: geometry fails validation ({report:?})"
        )));
    }
    let spectrum = np_spectrum(&geom, order, DEFAULT_IMAG_TOL)?;
    hausdorff_to_interval(&spectrum.realized, -0.5, 0.5)
}
