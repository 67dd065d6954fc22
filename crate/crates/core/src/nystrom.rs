//! Direct boundary-integral discretization of the annulus NP operator.
//!
//! Independent of the Grunsky machinery: the double-layer adjoint kernel
//! `(1/2π)⟨x−y, ν_x⟩/|x−y|²` is sampled on both curves with the periodic
//! trapezoidal rule, and the four blocks are combined as
//! `[[−K*_i, −∂S_e/∂ν_i], [∂S_i/∂ν_e, K*_e]]`, where `ν` is each curve's own
//! outward normal (pointing into the annulus on the inner curve).

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{AnnulusGeometry, Curve, CurveSample};
use crate::spectral::{eigenvalues_real, SpectrumReport};
use crate::RMat;

/// Equispaced trapezoidal grid on one boundary curve.
#[derive(Clone, Debug)]
pub struct CurveGrid {
    pub curve: Curve,
    pub points: Vec<Complex64>,
    /// Unit outward normals of the region bounded by the curve.
    pub normals: Vec<Complex64>,
    pub speeds: Vec<f64>,
    /// Signed curvature, positive where the curve bends toward its interior.
    pub curvatures: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CurveGrid {
    pub fn new(geom: &AnnulusGeometry, curve: Curve, n_q: usize) -> Result<Self> {
        let samples = geom.sample_curve(curve, n_q)?;
        let h = TAU / n_q as f64;
        let pick = |f: fn(&CurveSample) -> f64| samples.iter().map(f).collect::<Vec<_>>();
        Ok(Self {
            curve,
            points: samples.iter().map(|s| s.point).collect(),
            normals: samples.iter().map(|s| s.normal).collect(),
            speeds: pick(|s| s.speed),
            curvatures: pick(|s| s.curvature),
            weights: samples.iter().map(|s| s.speed * h).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Trapezoidal arc length.
    pub fn length(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Largest distance between consecutive nodes.
    pub fn max_spacing(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|j| (self.points[(j + 1) % n] - self.points[j]).norm())
            .fold(0.0, f64::max)
    }
}

/// Both curve grids of an annulus.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub inner: CurveGrid,
    pub outer: CurveGrid,
}

impl QuadratureGrid {
    pub fn new(geom: &AnnulusGeometry, n_q: usize) -> Result<Self> {
        check_nodes(n_q)?;
        let grid = Self {
            inner: CurveGrid::new(geom, Curve::Inner, n_q)?,
            outer: CurveGrid::new(geom, Curve::Outer, n_q)?,
        };
        if grid
            .inner
            .weights
            .iter()
            .chain(&grid.outer.weights)
            .any(|w| !(*w > 0.0 && w.is_finite()))
        {
            return Err(Error::GeometryDegenerate(
                "non-positive quadrature weight".into(),
            ));
        }
        Ok(grid)
    }

    pub fn nodes_per_curve(&self) -> usize {
        self.inner.len()
    }

    /// Smallest distance between an inner and an outer node.
    pub fn min_cross_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for &x in &self.inner.points {
            for &y in &self.outer.points {
                best = best.min((x - y).norm());
            }
        }
        best
    }

    pub fn max_spacing(&self) -> f64 {
        self.inner.max_spacing().max(self.outer.max_spacing())
    }
}

fn check_nodes(n_q: usize) -> Result<()> {
    if n_q < 16 || n_q % 2 != 0 {
        return Err(Error::Argument(format!(
            "n_q must be even and at least 16, got {n_q}"
        )));
    }
    Ok(())
}

/// Arc length from a polygonal approximation with `n` and `2n` vertices,
/// Richardson-extrapolated. Independent of the trapezoidal weights.
pub fn polygon_length(geom: &AnnulusGeometry, curve: Curve, n: usize) -> Result<f64> {
    let perimeter = |n: usize| -> Result<f64> {
        let pts: Vec<Complex64> = geom
            .sample_curve(curve, n)?
            .iter()
            .map(|s| s.point)
            .collect();
        Ok((0..n).map(|j| (pts[(j + 1) % n] - pts[j]).norm()).sum())
    };
    let coarse = perimeter(n)?;
    let fine = perimeter(2 * n)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `(1/2π) ⟨x−y, ν⟩ / |x−y|²`.
fn kernel(x: Complex64, nu: Complex64, y: Complex64) -> f64 {
    let d = x - y;
    (d.re * nu.re + d.im * nu.im) / (TAU * d.norm_sqr())
}

/// One block `D^{1/2} K D^{1/2}` (targets on `target`, sources on `source`)
/// written into `out` at `(row0, col0)` with the given sign. Same-curve
/// diagonals use the limit `κ/(4π)`.
fn fill_block(
    out: &mut RMat,
    row0: usize,
    col0: usize,
    target: &CurveGrid,
    source: &CurveGrid,
    sign: f64,
) {
    let same = target.curve == source.curve;
    for i in 0..target.len() {
        let (x, nu) = (target.points[i], target.normals[i]);
        let wi = target.weights[i].sqrt();
        for j in 0..source.len() {
            let k = if same && i == j {
                target.curvatures[i] / (4.0 * PI)
            } else {
                kernel(x, nu, source.points[j])
            };
            out[(row0 + i, col0 + j)] = sign * wi * k * source.weights[j].sqrt();
        }
    }
}

/// Single closed curve `K*` block in the weight-symmetric convention.
pub fn single_curve_block(grid: &CurveGrid) -> RMat {
    let n = grid.len();
    let mut out = RMat::zeros(n, n);
    fill_block(&mut out, 0, 0, grid, grid, 1.0);
    out
}

/// The assembled `2n_q × 2n_q` oracle matrix plus resolution diagnostics.
#[derive(Clone, Debug)]
pub struct OracleMatrix {
    pub matrix: RMat,
    pub nodes_per_curve: usize,
    pub min_cross_distance: f64,
    pub max_spacing: f64,
}

impl OracleMatrix {
    /// The curves are closer than twice the node spacing; the smooth
    /// cross-curve kernel is then under-resolved.
    pub fn resolution_warning(&self) -> bool {
        self.min_cross_distance < 2.0 * self.max_spacing
    }
}

/// Assembles the oracle matrix. Rows and columns `0..n_q` belong to the
/// inner curve, `n_q..2n_q` to the outer one.
pub fn assemble_oracle(geom: &AnnulusGeometry, n_q: usize) -> Result<OracleMatrix> {
    let grid = QuadratureGrid::new(geom, n_q)?;
    let n = grid.nodes_per_curve();
    let mut out = RMat::zeros(2 * n, 2 * n);
    // The inner curve's own outward normal is −ν_A there, hence the minus
    // signs on the first block row.
    fill_block(&mut out, 0, 0, &grid.inner, &grid.inner, -1.0);
    fill_block(&mut out, 0, n, &grid.inner, &grid.outer, -1.0);
    fill_block(&mut out, n, 0, &grid.outer, &grid.inner, 1.0);
    fill_block(&mut out, n, n, &grid.outer, &grid.outer, 1.0);
    Ok(OracleMatrix {
        matrix: out,
        nodes_per_curve: n,
        min_cross_distance: grid.min_cross_distance(),
        max_spacing: grid.max_spacing(),
    })
}

/// Oracle eigenvalues. No containment check: the largest eigenvalue can
/// exceed `1/2` by the quadrature error on thin, coarse grids.
pub fn oracle_spectrum(
    geom: &AnnulusGeometry,
    n_q: usize,
    imag_tol: f64,
) -> Result<SpectrumReport> {
    let oracle = assemble_oracle(geom, n_q)?;
    let raw = eigenvalues_real(&oracle.matrix)?;
    SpectrumReport::unchecked(raw, imag_tol, n_q, geom.ratio())
}
