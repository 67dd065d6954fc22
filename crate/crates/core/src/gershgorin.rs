//! Gershgorin localization of the squared NP eigenvalues.
//!
//! Two families of disks are provided: the entrywise disks of a truncated
//! reduced matrix `𝓑` (centers on the diagonal, radius the larger of the
//! off-diagonal row and column sums) and the analytic disks
//! `B(m, r) = {μ : |μ − r^{2m}/4| ≤ √m ρ^m (1 − r²) M(m, r)}`, which only
//! need the decay rate `ρ` of the scaled Grunsky coefficients.

use num_complex::Complex64;
use serde::Serialize;

use crate::assembly::ReducedMatrixB;
use crate::error::{Error, Result};

/// Default cutoff for the series defining `M(m, r)`.
pub const DEFAULT_TAIL_TOL: f64 = 1e-14;

/// Eigenvalues further than this outside every region count as violations.
pub const CONTAINMENT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnalyticDisk {
    pub m: usize,
    pub center: f64,
    pub radius: f64,
    pub m1_row: f64,
    pub m1_col: f64,
    pub m2_row: f64,
    pub m2_col: f64,
}

impl AnalyticDisk {
    /// `M(m, r)`, the largest of the four bounds.
    pub fn m_value(&self) -> f64 {
        self.m1_row
            .max(self.m1_col)
            .max(self.m2_row)
            .max(self.m2_col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntryDisk {
    /// Zero-based row of the matrix.
    pub row: usize,
    pub center: Complex64,
    pub radius: f64,
}

/// `Σ_{n>n0} √n ρⁿ`, bounded above by a geometric series with ratio
/// `√((n0+2)/(n0+1)) ρ`. Infinite when that ratio is not below 1.
fn sqrt_geometric_tail(rho: f64, n0: usize) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let first = ((n0 + 1) as f64).sqrt() * rho.powi((n0 + 1) as i32);
    let q = (((n0 + 2) as f64) / ((n0 + 1) as f64)).sqrt() * rho;
    if q >= 1.0 {
        f64::INFINITY
    } else {
        first / (1.0 - q)
    }
}

/// Sums `term(n)` for `n ≥ 1`, where `|term(n)| ≤ scale · √n ρⁿ`. Stops
/// once the majorant of the next term drops below `tail_tol` and adds the
/// majorant of the remainder.
fn sum_series(term: impl Fn(usize) -> f64, rho: f64, scale: f64, tail_tol: f64) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut n = 0usize;
    loop {
        n += 1;
        total += term(n);
        let next_bound = scale * ((n + 1) as f64).sqrt() * rho.powi((n + 1) as i32);
        let q = (((n + 2) as f64) / ((n + 1) as f64)).sqrt() * rho;
        if (next_bound < tail_tol && q < 1.0) || next_bound == 0.0 {
            return total + scale * sqrt_geometric_tail(rho, n);
        }
    }
}

/// The m-independent pieces of the bounds for a given `(r, ρ)`.
struct SeriesConstants {
    r2: f64,
    rho: f64,
    /// `Σ_n √n ρⁿ`.
    s_half: f64,
    /// `Σ_k ρ^k (1 − r^{2k})`, summed in closed form.
    k_sum: f64,
    m1_row: f64,
    m2_row: f64,
}

impl SeriesConstants {
    fn new(r: f64, rho: f64, tail_tol: f64) -> Self {
        let r2 = r * r;
        let k_sum = rho / (1.0 - rho) - rho * r2 / (1.0 - rho * r2);
        let s_half = sum_series(
            |n| (n as f64).sqrt() * rho.powi(n as i32),
            rho,
            1.0,
            tail_tol,
        );
        let m1_row = rho / (4.0 * (1.0 - rho) * (1.0 - rho * r2));
        let m2_row_scale = (1.0 + k_sum) / (1.0 - r2);
        let m2_row = 0.25
            * sum_series(
                |n| m2_row_term(n, r2, rho, k_sum),
                rho,
                m2_row_scale,
                tail_tol / 0.25,
            );
        Self {
            r2,
            rho,
            s_half,
            k_sum,
            m1_row,
            m2_row,
        }
    }

    fn disk(&self, m: usize) -> AnalyticDisk {
        let (r2, rho) = (self.r2, self.rho);
        let mf = m as f64;
        let r2m = r2.powi(m as i32);
        let damp = (1.0 - r2m) / (1.0 - r2);
        let m1_col = damp * r2m * self.s_half / (4.0 * mf.sqrt());
        let m2_col =
            0.25 * damp * self.s_half * (mf.sqrt().recip() + rho.powi(m as i32) * self.k_sum);
        let big_m = self.m1_row.max(m1_col).max(self.m2_row).max(m2_col);
        AnalyticDisk {
            m,
            center: r2m / 4.0,
            radius: mf.sqrt() * rho.powi(m as i32) * (1.0 - r2) * big_m,
            m1_row: self.m1_row,
            m1_col,
            m2_row: self.m2_row,
            m2_col,
        }
    }
}

fn m2_row_term(n: usize, r2: f64, rho: f64, k_sum: f64) -> f64 {
    let r2n = r2.powi(n as i32);
    let rn = rho.powi(n as i32);
    rn * (1.0 - r2n) / (1.0 - r2) * (r2n + (n as f64).sqrt() * rn * k_sum)
}

fn check_parameters(r: f64, rho: f64, tail_tol: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Argument(format!(
            "ratio r must lie in (0, 1), got {r}"
        )));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Argument(format!(
            "rho must lie in [0, 1), got {rho}"
        )));
    }
    if !(tail_tol > 0.0) {
        return Err(Error::Argument(format!(
            "tail_tol must be positive, got {tail_tol}"
        )));
    }
    Ok(())
}

/// Analytic disks `B(m, r)` for `m = 1..=m_max`.
pub fn analytic_disks(r: f64, rho: f64, m_max: usize, tail_tol: f64) -> Result<Vec<AnalyticDisk>> {
    check_parameters(r, rho, tail_tol)?;
    let constants = SeriesConstants::new(r, rho, tail_tol);
    Ok((1..=m_max).map(|m| constants.disk(m)).collect())
}

/// The interval `[0, r^{2(m_max+1)}/4 + R(m_max+1, r)]` standing in for all
/// disks beyond `m_max` (their centers accumulate at 0).
pub fn tail_interval(r: f64, rho: f64, m_max: usize, tail_tol: f64) -> Result<Region> {
    check_parameters(r, rho, tail_tol)?;
    let next = SeriesConstants::new(r, rho, tail_tol).disk(m_max + 1);
    Ok(Region::Interval {
        lo: 0.0,
        hi: next.center + next.radius,
    })
}

/// Entrywise disks, one per row of `b`.
pub fn entry_disks(b: &ReducedMatrixB) -> Vec<EntryDisk> {
    let m = b.entries();
    let n = m.nrows();
    let mut row_sums = vec![0.0; n];
    let mut col_sums = vec![0.0; n];
    for j in 0..n {
        for i in 0..n {
            if i != j {
                let a = m[(i, j)].norm();
                row_sums[i] += a;
                col_sums[j] += a;
            }
        }
    }
    (0..n)
        .map(|i| EntryDisk {
            row: i,
            center: m[(i, i)],
            radius: row_sums[i].max(col_sums[i]),
        })
        .collect()
}

/// A closed region of the complex plane used for containment checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Region {
    Disk {
        center: Complex64,
        radius: f64,
    },
    /// Real segment `[lo, hi]`.
    Interval {
        lo: f64,
        hi: f64,
    },
}

impl Region {
    /// Signed clearance: positive inside, minus the distance outside.
    pub fn margin(&self, z: Complex64) -> f64 {
        match *self {
            Region::Disk { center, radius } => radius - (z - center).norm(),
            Region::Interval { lo, hi } => {
                let x = z.re.clamp(lo, hi);
                -(z - Complex64::new(x, 0.0)).norm()
            }
        }
    }
}

impl From<&AnalyticDisk> for Region {
    fn from(d: &AnalyticDisk) -> Self {
        Region::Disk {
            center: Complex64::new(d.center, 0.0),
            radius: d.radius,
        }
    }
}

impl From<&EntryDisk> for Region {
    fn from(d: &EntryDisk) -> Self {
        Region::Disk {
            center: d.center,
            radius: d.radius,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContainmentEntry {
    pub value: Complex64,
    /// Index of the region with the largest margin.
    pub region: usize,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContainmentReport {
    pub entries: Vec<ContainmentEntry>,
    /// Indices into `entries` with margin below `-CONTAINMENT_TOL`.
    pub violations: Vec<usize>,
    /// Smallest margin over all eigenvalues.
    pub worst_margin: f64,
}

impl ContainmentReport {
    pub fn contained(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_containment(eigs: &[Complex64], regions: &[Region]) -> Result<ContainmentReport> {
    if regions.is_empty() {
        return Err(Error::Argument(
            "containment check needs at least one region".into(),
        ));
    }
    let entries: Vec<ContainmentEntry> = eigs
        .iter()
        .map(|&value| {
            let (region, margin) = regions
                .iter()
                .map(|reg| reg.margin(value))
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, m)| {
                    if m > best.1 {
                        (i, m)
                    } else {
                        best
                    }
                });
            ContainmentEntry {
                value,
                region,
                margin,
            }
        })
        .collect();
    let violations = entries
        .iter()
        .enumerate()
        .filter(|(_, e)| e.margin < -CONTAINMENT_TOL)
        .map(|(i, _)| i)
        .collect();
    let worst_margin = entries
        .iter()
        .map(|e| e.margin)
        .fold(f64::INFINITY, f64::min);
    Ok(ContainmentReport {
        entries,
        violations,
        worst_margin,
    })
}

/// Outcome of [`disjointness_threshold`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Disjointness {
    /// Every disk with `m ≥ m0` is disjoint from all other computed disks.
    Threshold { m0: usize },
    /// `r ≤ √((1+ρ)/2)`: the separation argument does not apply.
    OutsideRegime { min_ratio: f64 },
    /// The regime applies but even the last computed disk overlaps another.
    NotFound,
}

impl Disjointness {
    pub fn m0(&self) -> Option<usize> {
        match self {
            Disjointness::Threshold { m0 } => Some(*m0),
            _ => None,
        }
    }
}

/// Smallest `m0` such that every computed disk `B(m, r)`, `m ≥ m0`, is
/// disjoint from every other computed disk.
pub fn disjointness_threshold(r: f64, rho: f64, disks: &[AnalyticDisk]) -> Disjointness {
    let min_ratio = ((1.0 + rho) / 2.0).sqrt();
    if !(r > min_ratio) {
        return Disjointness::OutsideRegime { min_ratio };
    }
    let apart =
        |a: &AnalyticDisk, b: &AnalyticDisk| (a.center - b.center).abs() > a.radius + b.radius;
    let n = disks.len();
    // Consecutive neighbours first; the full scan below settles the rest.
    let isolated: Vec<bool> = (0..n)
        .map(|i| {
            let near = (i == 0 || apart(&disks[i], &disks[i - 1]))
                && (i + 1 == n || apart(&disks[i], &disks[i + 1]));
            near && (0..n).all(|j| j == i || apart(&disks[i], &disks[j]))
        })
        .collect();
    match isolated.iter().rposition(|ok| !ok) {
        None if n > 0 => Disjointness::Threshold { m0: disks[0].m },
        None => Disjointness::NotFound,
        Some(last_bad) if last_bad + 1 < n => Disjointness::Threshold {
            m0: disks[last_bad + 1].m,
        },
        Some(_) => Disjointness::NotFound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CMat;
    use approx::assert_relative_eq;

    fn partial_sum(term: impl Fn(usize) -> f64, n_terms: usize) -> f64 {
        (1..=n_terms).map(term).sum()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_disks_have_zero_radius() {
        let disks = analytic_disks(0.7, 0.0, 20, DEFAULT_TAIL_TOL).unwrap();
        for d in &disks {
            assert_eq!(d.radius, 0.0);
            assert_eq!(d.m1_row, 0.0);
            assert_eq!(d.m1_col, 0.0);
            assert_eq!(d.m2_row, 0.0);
            assert_eq!(d.m2_col, 0.0);
            assert_relative_eq!(
                d.center,
                0.49f64.powi(d.m as i32) / 4.0,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn m1_row_closed_form() {
        let d = analytic_disks(0.9, 0.5, 1, DEFAULT_TAIL_TOL).unwrap()[0];
        let expected = 0.5 / (4.0 * 0.5 * (1.0 - 0.5 * 0.81));
        assert_relative_eq!(d.m1_row, expected, max_relative = 1e-15);
        assert_relative_eq!(d.m1_row, 0.420_168_067_226_890_76, max_relative = 1e-14);
    }

    #[test]
    fn m1_row_matches_its_series() {
        // ρ/(4(1−ρ)(1−ρr²)) = ¼ Σ ρⁿ (1−r^{2n}) / (1−r²).
        let (r, rho): (f64, f64) = (0.8, 0.6);
        let series: f64 = (1..2000)
            .map(|n| rho.powi(n) * (1.0 - r.powi(2 * n)) / (1.0 - r * r))
            .sum::<f64>()
            / 4.0;
        let d = analytic_disks(r, rho, 1, DEFAULT_TAIL_TOL).unwrap()[0];
        assert_relative_eq!(d.m1_row, series, max_relative = 1e-12);
    }

    #[test]
    fn series_cutoff_is_stable_under_doubling() {
        let tol = 1e-12;
        for (r, rho) in [(0.9, 0.5), (0.95, 0.8), (0.5, 0.3)] {
            let constants = SeriesConstants::new(r, rho, tol);
            // Terms needed before the majorant of √n ρⁿ drops under tol.
            let mut n = 1usize;
            while ((n + 1) as f64).sqrt() * rho.powi((n + 1) as i32) >= tol {
                n += 1;
            }
            let term = |k: usize| (k as f64).sqrt() * rho.powi(k as i32);
            let once = partial_sum(term, n);
            let twice = partial_sum(term, 2 * n);
            assert!((twice - once).abs() < tol * 10.0);
            assert!((constants.s_half - twice).abs() < tol * 10.0);
            let r2 = r * r;
            let k_sum = constants.k_sum;
            let m2 = |k: usize| m2_row_term(k, r2, rho, k_sum);
            let twice = 0.25 * partial_sum(m2, 4 * n);
            assert!((constants.m2_row - twice).abs() < 4.0 * tol * (1.0 + k_sum) / (1.0 - r2));
        }
    }

    #[test]
    fn rejects_bad_rho() {
        assert!(analytic_disks(0.9, 1.0, 5, DEFAULT_TAIL_TOL).is_err());
        assert!(analytic_disks(0.9, -0.1, 5, DEFAULT_TAIL_TOL).is_err());
        assert!(analytic_disks(1.2, 0.5, 5, DEFAULT_TAIL_TOL).is_err());
    }

    #[test]
    fn entry_disk_examples() {
        let diag = CMat::from_fn(4, 4, |i, j| {
            if i == j {
                c(i as f64, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let disks = entry_disks(&ReducedMatrixB::from_entries(diag).unwrap());
        for (i, d) in disks.iter().enumerate() {
            assert_eq!(d.radius, 0.0);
            assert_eq!(d.center, c(i as f64, 0.0));
        }
        let m = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(1.0, 0.0),
            (0, 1) => c(0.1, 0.0),
            (1, 0) => c(0.2, 0.0),
            _ => c(2.0, 0.0),
        });
        let disks = entry_disks(&ReducedMatrixB::from_entries(m).unwrap());
        assert_eq!((disks[0].center, disks[0].radius), (c(1.0, 0.0), 0.2));
        assert_eq!((disks[1].center, disks[1].radius), (c(2.0, 0.0), 0.2));
    }

    #[test]
    fn containment_examples() {
        let disk = Region::Disk {
            center: c(0.25, 0.0),
            radius: 0.0,
        };
        let report = check_containment(&[c(0.25, 0.0)], &[disk]).unwrap();
        assert!(report.contained());

        let disk = Region::Disk {
            center: c(0.25, 0.0),
            radius: 0.01,
        };
        let report = check_containment(&[c(0.3, 0.0)], &[disk]).unwrap();
        assert_eq!(report.violations, vec![0]);
        assert!((report.worst_margin + 0.04).abs() < 1e-15);

        let interval = Region::Interval { lo: 0.0, hi: 0.1 };
        let report = check_containment(&[c(0.05, 0.0), c(0.3, 0.0)], &[interval, disk]).unwrap();
        assert_eq!(report.entries[0].region, 0);
        assert_eq!(report.entries[1].region, 1);
        assert!(check_containment(&[c(0.0, 0.0)], &[]).is_err());
    }

    #[test]
    fn disjointness_examples() {
        let disks = analytic_disks(0.9, 0.0, 30, DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(
            disjointness_threshold(0.9, 0.0, &disks),
            Disjointness::Threshold { m0: 1 }
        );
        let disks = analytic_disks(0.8, 0.5, 30, DEFAULT_TAIL_TOL).unwrap();
        assert!(matches!(
            disjointness_threshold(0.8, 0.5, &disks),
            Disjointness::OutsideRegime { .. }
        ));
    }

    #[test]
    fn threshold_is_the_first_fully_isolated_tail() {
        let (r, rho) = (0.95, 0.6);
        let disks = analytic_disks(r, rho, 300, DEFAULT_TAIL_TOL).unwrap();
        let m0 = disjointness_threshold(r, rho, &disks)
            .m0()
            .expect("regime applies");
        for a in disks.iter().filter(|d| d.m >= m0) {
            for b in disks.iter().filter(|d| d.m != a.m) {
                assert!((a.center - b.center).abs() > a.radius + b.radius);
            }
        }
        if m0 > 1 {
            let prev = &disks[m0 - 2];
            assert!(
                disks
                    .iter()
                    .any(|b| b.m != prev.m
                        && (prev.center - b.center).abs() <= prev.radius + b.radius)
            );
        }
    }

    #[test]
    fn radius_follows_sqrt_m_rho_m_trend() {
        let (r, rho) = (0.95, 0.7);
        let disks = analytic_disks(r, rho, 200, DEFAULT_TAIL_TOL).unwrap();
        let cst = disks
            .iter()
            .map(|d| d.radius / ((d.m as f64).sqrt() * rho.powi(d.m as i32)))
            .fold(0.0, f64::max);
        for d in &disks {
            assert!(d.radius <= cst * (d.m as f64).sqrt() * rho.powi(d.m as i32) * (1.0 + 1e-12));
        }
        // M(m, r) stays bounded.
        let m_values: Vec<f64> = disks.iter().map(|d| d.m_value()).collect();
        let bound = m_values.iter().copied().fold(0.0, f64::max);
        assert!(bound.is_finite() && bound < 1e3);
    }

    #[test]
    fn tail_interval_covers_later_centers() {
        let (r, rho) = (0.9, 0.5);
        let tail = tail_interval(r, rho, 50, DEFAULT_TAIL_TOL).unwrap();
        for m in 51..400 {
            let center = (r * r).powi(m) / 4.0;
            assert!(tail.margin(c(center, 0.0)) >= 0.0);
        }
    }
}
