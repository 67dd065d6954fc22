//! Exterior conformal maps `Ψ(w) = w + a₀ + Σ a_k w^{-k}` and the two
//! level curves `Γ_i = Ψ(|w| = r_i)`, `Γ_e = Ψ(|w| = r_e)` that bound a
//! distorted annulus.

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Laurent-series exterior map, normalized so that `Ψ(w) ~ w` at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMap {
    a0: Complex64,
    /// `tail[k - 1] = a_k`; trailing zeros are trimmed.
    tail: Vec<Complex64>,
}

impl ConformalMap {
    /// Builds a map from the constant term and `(k, a_k)` pairs, `k >= 1`.
    pub fn new(a0: Complex64, coeffs: &[(usize, Complex64)]) -> Result<Self> {
        let top = coeffs.iter().map(|&(k, _)| k).max().unwrap_or(0);
        let mut tail = vec![Complex64::new(0.0, 0.0); top];
        let mut seen = vec![false; top];
        for &(k, a) in coeffs {
            if k == 0 {
                return Err(Error::Argument(
                    "coefficient index must be >= 1 (use a0 for the constant term)".into(),
                ));
            }
            if seen[k - 1] {
                return Err(Error::Argument(format!("duplicate coefficient index {k}")));
            }
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::Argument(format!("coefficient a_{k} is not finite")));
            }
            seen[k - 1] = true;
            tail[k - 1] = a;
        }
        while tail.last().is_some_and(|a| *a == Complex64::new(0.0, 0.0)) {
            tail.pop();
        }
        Ok(Self { a0, tail })
    }

    /// `Ψ(w) = w`.
    pub fn identity() -> Self {
        Self {
            a0: Complex64::new(0.0, 0.0),
            tail: Vec::new(),
        }
    }

    /// Joukowski-type map `w + a/w`.
    pub fn joukowski(a: Complex64) -> Self {
        Self::new(Complex64::new(0.0, 0.0), &[(1, a)]).expect("single coefficient")
    }

    /// The map used for the thin-annulus experiment:
    /// `w + (0.3+0.5i)/w − (0.2+0.1i)/w³ + 0.1i/w⁵ + 0.05i/w⁶ + 0.01i/w⁷`.
    pub fn paper_example() -> Self {
        let c = Complex64::new;
        Self::new(
            c(0.0, 0.0),
            &[
                (1, c(0.3, 0.5)),
                (3, c(-0.2, -0.1)),
                (5, c(0.0, 0.1)),
                (6, c(0.0, 0.05)),
                (7, c(0.0, 0.01)),
            ],
        )
        .expect("static coefficients")
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    /// `a_k` for `k >= 1`; zero beyond the stored tail.
    pub fn coeff(&self, k: usize) -> Complex64 {
        if k == 0 {
            return self.a0;
        }
        self.tail.get(k - 1).copied().unwrap_or_default()
    }

    /// Highest `k` with `a_k != 0` (0 for `w + a₀`).
    pub fn degree(&self) -> usize {
        self.tail.len()
    }

    /// Nonzero `(k, a_k)` pairs in increasing `k`.
    pub fn nonzero_coeffs(&self) -> Vec<(usize, Complex64)> {
        self.tail
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != Complex64::new(0.0, 0.0))
            .map(|(i, a)| (i + 1, *a))
            .collect()
    }

    fn check_point(w: Complex64) -> Result<Complex64> {
        if w.norm() == 0.0 || !w.norm().is_finite() {
            return Err(Error::Domain(format!("map evaluated at w = {w}")));
        }
        Ok(w.inv())
    }

    /// `Ψ(w)`.
    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        let winv = Self::check_point(w)?;
        // Horner in 1/w over the tail.
        let mut acc = Complex64::new(0.0, 0.0);
        for a in self.tail.iter().rev() {
            acc = (acc + a) * winv;
        }
        Ok(w + self.a0 + acc)
    }

    /// `(Ψ′(w), Ψ″(w))`.
    pub fn derivatives(&self, w: Complex64) -> Result<(Complex64, Complex64)> {
        let winv = Self::check_point(w)?;
        let mut d1 = Complex64::new(1.0, 0.0);
        let mut d2 = Complex64::new(0.0, 0.0);
        let mut pow = winv * winv; // w^{-(k+1)}
        for (i, a) in self.tail.iter().enumerate() {
            let k = (i + 1) as f64;
            d1 -= a * pow * k;
            d2 += a * pow * winv * (k * (k + 1.0));
            pow *= winv;
        }
        Ok((d1, d2))
    }
}

/// Which boundary curve of the annulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Curve {
    Inner,
    Outer,
}

/// A conformal map together with the radii `r_i < r_e` of the two circles
/// whose images bound the annulus.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusGeometry {
    pub map: ConformalMap,
    r_inner: f64,
    r_outer: f64,
}

impl AnnulusGeometry {
    pub fn new(map: ConformalMap, r_inner: f64, r_outer: f64) -> Result<Self> {
        if !(r_inner.is_finite() && r_outer.is_finite() && r_inner > 0.0 && r_inner < r_outer) {
            return Err(Error::Argument(format!(
                "radii must satisfy 0 < r_i < r_e, got r_i = {r_inner}, r_e = {r_outer}"
            )));
        }
        Ok(Self {
            map,
            r_inner,
            r_outer,
        })
    }

    /// Geometry with inner radius `r_inner` and outer radius `r_inner / ratio`.
    pub fn with_ratio(map: ConformalMap, r_inner: f64, ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Argument(format!(
                "ratio must lie in (0, 1), got {ratio}"
            )));
        }
        Self::new(map, r_inner, r_inner / ratio)
    }

    pub fn r_inner(&self) -> f64 {
        self.r_inner
    }

    pub fn r_outer(&self) -> f64 {
        self.r_outer
    }

    /// `r = r_i / r_e`.
    pub fn ratio(&self) -> f64 {
        self.r_inner / self.r_outer
    }

    /// Radius of the preimage circle of `curve`.
    pub fn radius(&self, curve: Curve) -> f64 {
        match curve {
            Curve::Inner => self.r_inner,
            Curve::Outer => self.r_outer,
        }
    }

    /// Jacobian `h(ρ, θ) = e^ρ |Ψ′(e^{ρ+iθ})|` of the polar coordinates.
    pub fn jacobian_h(&self, rho: f64, theta: f64) -> Result<f64> {
        let radius = rho.exp();
        if radius < self.r_inner * (1.0 - 1e-12) {
            return Err(Error::Argument(format!(
                "e^rho = {radius} lies inside the inner circle r_i = {}",
                self.r_inner
            )));
        }
        let (d1, _) = self.map.derivatives(Complex64::from_polar(radius, theta))?;
        let h = radius * d1.norm();
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::GeometryDegenerate(format!(
                "Jacobian h({rho}, {theta}) = {h}"
            )));
        }
        Ok(h)
    }

    /// Samples `curve` at `n_points` equispaced parameters `θ_j = 2πj/n`.
    pub fn sample_curve(&self, curve: Curve, n_points: usize) -> Result<Vec<CurveSample>> {
        if n_points < 4 {
            return Err(Error::Argument(format!(
                "need at least 4 curve samples, got {n_points}"
            )));
        }
        let radius = self.radius(curve);
        (0..n_points)
            .map(|j| self.sample_at(radius, theta_node(j, n_points)))
            .collect()
    }

    fn sample_at(&self, radius: f64, theta: f64) -> Result<CurveSample> {
        let w = Complex64::from_polar(radius, theta);
        let point = self.map.eval(w)?;
        let (d1, d2) = self.map.derivatives(w)?;
        // γ(θ) = Ψ(r e^{iθ}):  γ′ = i w Ψ′,  γ″ = −w Ψ′ − w² Ψ″.
        let iw = Complex64::i() * w;
        let dg = iw * d1;
        let ddg = -w * d1 - w * w * d2;
        let speed = dg.norm();
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::GeometryDegenerate(format!(
                "zero speed at theta = {theta} on |w| = {radius}"
            )));
        }
        let tangent = dg / speed;
        let curvature = (dg.conj() * ddg).im / speed.powi(3);
        Ok(CurveSample {
            theta,
            point,
            tangent,
            // Clockwise rotation of the tangent of a positively oriented curve.
            normal: Complex64::new(tangent.im, -tangent.re),
            speed,
            curvature,
        })
    }

    /// Heuristic univalence and nesting diagnostics for the two curves.
    pub fn validate(&self, n_probe: usize) -> GeometryReport {
        let n = n_probe.max(8);
        let probe = |curve: Curve| -> CurveDiagnostics {
            let radius = self.radius(curve);
            let mut min_abs_derivative = f64::INFINITY;
            let mut points = Vec::with_capacity(n);
            let mut derivs = Vec::with_capacity(n);
            for j in 0..n {
                let w = Complex64::from_polar(radius, theta_node(j, n));
                match (self.map.eval(w), self.map.derivatives(w)) {
                    (Ok(z), Ok((d1, _))) => {
                        min_abs_derivative = min_abs_derivative.min(d1.norm());
                        points.push(z);
                        derivs.push(d1);
                    }
                    _ => {
                        min_abs_derivative = 0.0;
                    }
                }
            }
            CurveDiagnostics {
                min_abs_derivative,
                self_intersects: polygon_self_intersects(&points),
                signed_area: signed_area(&points),
                derivative_winding: winding_about_origin(&derivs),
                points,
            }
        };
        let inner = probe(Curve::Inner);
        let outer = probe(Curve::Outer);
        let curves_cross = polygons_cross(&inner.points, &outer.points);
        let inner_inside_outer = !curves_cross
            && inner
                .points
                .iter()
                .all(|&p| winding_number(&outer.points, p) != 0);
        GeometryReport {
            inner: inner.summary(),
            outer: outer.summary(),
            curves_cross,
            inner_inside_outer,
        }
    }
}

/// `θ_j = 2πj/n`; the same expression for all `n` keeps shared nodes
/// bit-identical under grid doubling.
pub fn theta_node(j: usize, n: usize) -> f64 {
    TAU * j as f64 / n as f64
}

/// One node of a sampled boundary curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    pub theta: f64,
    pub point: Complex64,
    /// Unit tangent in the direction of increasing `θ`.
    pub tangent: Complex64,
    /// Unit normal pointing away from the region the curve encloses.
    pub normal: Complex64,
    /// `|dγ/dθ|`.
    pub speed: f64,
    /// Signed curvature, positive for a counter-clockwise circle.
    pub curvature: f64,
}

struct CurveDiagnostics {
    min_abs_derivative: f64,
    self_intersects: bool,
    signed_area: f64,
    derivative_winding: i64,
    points: Vec<Complex64>,
}

impl CurveDiagnostics {
    fn summary(&self) -> CurveReport {
        CurveReport {
            min_abs_derivative: self.min_abs_derivative,
            self_intersects: self.self_intersects,
            positively_oriented: self.signed_area > 0.0,
            critical_points_outside: -self.derivative_winding,
        }
    }
}

/// Diagnostics for one boundary curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveReport {
    /// `min |Ψ′|` over the probe nodes of the preimage circle.
    pub min_abs_derivative: f64,
    pub self_intersects: bool,
    /// Counter-clockwise traversal for increasing `θ`.
    pub positively_oriented: bool,
    /// Zeros of `Ψ′` outside the preimage circle, counted by the argument
    /// principle (minus the winding number of `Ψ′` along the circle).
    pub critical_points_outside: i64,
}

impl CurveReport {
    pub fn passes(&self) -> bool {
        self.min_abs_derivative > 0.0
            && !self.self_intersects
            && self.positively_oriented
            && self.critical_points_outside == 0
    }
}

/// Output of [`AnnulusGeometry::validate`]. Purely diagnostic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryReport {
    pub inner: CurveReport,
    pub outer: CurveReport,
    pub curves_cross: bool,
    pub inner_inside_outer: bool,
}

impl GeometryReport {
    pub fn passes(&self) -> bool {
        self.inner.passes() && self.outer.passes() && !self.curves_cross && self.inner_inside_outer
    }
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_intersect(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0
}

fn bbox_disjoint(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    p1.re.max(p2.re) < q1.re.min(q2.re)
        || q1.re.max(q2.re) < p1.re.min(p2.re)
        || p1.im.max(p2.im) < q1.im.min(q2.im)
        || q1.im.max(q2.im) < p1.im.min(p2.im)
}

/// Brute-force crossing scan over all non-adjacent edge pairs of a closed polygon.
pub(crate) fn polygon_self_intersects(points: &[Complex64]) -> bool {
    let n = points.len();
    if n < 4 {
        return false;
    }
    for i in 0..n {
        let (p1, p2) = (points[i], points[(i + 1) % n]);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (q1, q2) = (points[j], points[(j + 1) % n]);
            if !bbox_disjoint(p1, p2, q1, q2) && segments_intersect(p1, p2, q1, q2) {
                return true;
            }
        }
    }
    false
}

fn polygons_cross(a: &[Complex64], b: &[Complex64]) -> bool {
    let (na, nb) = (a.len(), b.len());
    for i in 0..na {
        let (p1, p2) = (a[i], a[(i + 1) % na]);
        for j in 0..nb {
            let (q1, q2) = (b[j], b[(j + 1) % nb]);
            if !bbox_disjoint(p1, p2, q1, q2) && segments_intersect(p1, p2, q1, q2) {
                return true;
            }
        }
    }
    false
}

fn signed_area(points: &[Complex64]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| cross(points[i], points[(i + 1) % n]))
        .sum::<f64>()
        / 2.0
}

/// Winding number of a closed polygon about `p`.
fn winding_number(polygon: &[Complex64], p: Complex64) -> i64 {
    let shifted: Vec<Complex64> = polygon.iter().map(|z| z - p).collect();
    winding_about_origin(&shifted)
}

fn winding_about_origin(values: &[Complex64]) -> i64 {
    let n = values.len();
    if n == 0 {
        return 0;
    }
    let total: f64 = (0..n)
        .map(|i| (values[(i + 1) % n] / values[i]).arg())
        .sum();
    (total / TAU).round() as i64
}

/// On-disk geometry description:
/// `{"a0": [re, im], "coeffs": [[k, re, im], ...], "ri": r_i, "re": r_e}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub a0: [f64; 2],
    pub coeffs: Vec<[f64; 3]>,
    pub ri: f64,
    pub re: f64,
}

impl MapFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("map file: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_geometry(geom: &AnnulusGeometry) -> Self {
        let a0 = geom.map.a0();
        Self {
            a0: [a0.re, a0.im],
            coeffs: geom
                .map
                .nonzero_coeffs()
                .into_iter()
                .map(|(k, a)| [k as f64, a.re, a.im])
                .collect(),
            ri: geom.r_inner(),
            re: geom.r_outer(),
        }
    }

    pub fn conformal_map(&self) -> Result<ConformalMap> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&[k, re, im]| {
                if k.fract() != 0.0 || k < 1.0 {
                    return Err(Error::Parse(format!(
                        "coefficient index must be a positive integer, got {k}"
                    )));
                }
                Ok((k as usize, Complex64::new(re, im)))
            })
            .collect::<Result<Vec<_>>>()?;
        ConformalMap::new(Complex64::new(self.a0[0], self.a0[1]), &coeffs)
    }

    pub fn geometry(&self) -> Result<AnnulusGeometry> {
        AnnulusGeometry::new(self.conformal_map()?, self.ri, self.re)
    }
}
