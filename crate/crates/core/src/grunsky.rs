//! Faber polynomials and Grunsky coefficients of an exterior conformal map.
//!
//! The Grunsky coefficients `c_{nm}` are defined by
//! `F_n(Ψ(w)) = wⁿ + Σ_{m≥1} c_{nm} w^{-m}`, where `F_n` is the `n`-th Faber
//! polynomial of `Ψ`. They satisfy `m c_{nm} = n c_{mn}` and the recursion
//!
//! ```text
//! c_{n,m+1} = c_{n+1,m} − a_{n+m} + Σ_{s=1}^{n−1} a_{n−s} c_{sm} − Σ_{s=1}^{m−1} a_{m−s} c_{ns}
//! ```
//!
//! seeded by `c_{1m} = a_m`, `c_{m1} = m a_m`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::ConformalMap;
use crate::CMat;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// The `N × N` block of Grunsky coefficients.
#[derive(Clone, Debug)]
pub struct GrunskyTable {
    order: usize,
    /// `c[(n-1, m-1)] = c_{nm}`.
    c: CMat,
}

impl GrunskyTable {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `c_{nm}` with 1-based indices.
    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.c[(n - 1, m - 1)]
    }

    /// Zero-based matrix view (`[(n-1, m-1)] = c_{nm}`).
    pub fn matrix(&self) -> &CMat {
        &self.c
    }

    /// Leading `order × order` corner.
    pub fn truncated(&self, order: usize) -> Result<Self> {
        if order == 0 || order > self.order {
            return Err(Error::Argument(format!(
                "cannot truncate a table of order {} to {order}",
                self.order
            )));
        }
        Ok(Self {
            order,
            c: CMat::from_fn(order, order, |i, j| self.c[(i, j)]),
        })
    }

    /// `max |m c_{nm} − n c_{mn}| / (1 + m |c_{nm}|)` over the table.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 1..=self.order {
            for m in 1..=self.order {
                let lhs = self.get(n, m) * m as f64;
                let rhs = self.get(m, n) * n as f64;
                worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
            }
        }
        worst
    }
}

/// Grunsky coefficients `c_{nm}`, `1 ≤ n, m ≤ order`.
///
/// Entries are produced anti-diagonal by anti-diagonal. Reaching `(n, m)`
/// needs `c_{n+1, m-1}`, so the working table is the full triangle
/// `n + m ≤ 2·order`, of which the square corner is returned.
pub fn compute_table(map: &ConformalMap, order: usize) -> Result<GrunskyTable> {
    if order == 0 {
        return Err(Error::Argument("Grunsky table order must be >= 1".into()));
    }
    let span = 2 * order;
    let a: Vec<Complex64> = (0..=span).map(|k| map.coeff(k)).collect();
    // w[n][m], 1-based, only n + m <= span is populated.
    let mut w = vec![vec![ZERO; span + 1]; span + 1];
    for m in 1..span {
        w[1][m] = a[m];
        w[m][1] = a[m] * m as f64;
    }
    for diag in 3..=span {
        for col in 2..diag {
            let n = diag - col;
            if n == 1 {
                continue;
            }
            let m = col - 1;
            let mut value = w[n + 1][m] - a[n + m];
            for s in 1..n {
                value += a[n - s] * w[s][m];
            }
            for s in 1..m {
                value -= a[m - s] * w[n][s];
            }
            w[n][col] = value;
        }
    }
    Ok(GrunskyTable {
        order,
        c: CMat::from_fn(order, order, |i, j| w[i + 1][j + 1]),
    })
}

/// Truncated Laurent series `Σ_{i=0}^{len-1} coeffs[i] · w^{top - i}`.
#[derive(Clone, Debug)]
struct Laurent {
    top: i64,
    coeffs: Vec<Complex64>,
}

impl Laurent {
    fn one(depth: usize) -> Self {
        let mut coeffs = vec![ZERO; depth + 1];
        coeffs[0] = Complex64::new(1.0, 0.0);
        Self { top: 0, coeffs }
    }

    /// `Ψ(w) = w + a₀ + a₁/w + …`, keeping `depth + 1` terms.
    fn of_map(map: &ConformalMap, depth: usize) -> Self {
        let mut coeffs = vec![ZERO; depth + 1];
        coeffs[0] = Complex64::new(1.0, 0.0);
        for (i, c) in coeffs.iter_mut().enumerate().skip(1) {
            *c = map.coeff(i - 1);
        }
        Self { top: 1, coeffs }
    }

    /// Product keeping the same number of terms below the new top exponent.
    fn mul(&self, other: &Self) -> Self {
        let len = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![ZERO; len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] += a * b;
            }
        }
        Self {
            top: self.top + other.top,
            coeffs,
        }
    }

    /// Coefficient of `w^exponent` (zero if truncated or above the top).
    fn at(&self, exponent: i64) -> Complex64 {
        let idx = self.top - exponent;
        if idx < 0 {
            return ZERO;
        }
        self.coeffs.get(idx as usize).copied().unwrap_or(ZERO)
    }
}

/// Coefficients `b_0, …, b_n` (ascending powers of `z`) of the Faber
/// polynomial `F_n`, found by cancelling the `w⁰ … w^{n−1}` terms of
/// `Σ_j b_j Ψ(w)^j`. Each power of `Ψ` is expanded to `depth + 1` terms.
pub fn faber_coefficients(map: &ConformalMap, n: usize, depth: usize) -> Result<Vec<Complex64>> {
    if depth < n {
        return Err(Error::Argument(format!(
            "Laurent depth {depth} is smaller than the Faber degree {n}"
        )));
    }
    let psi = Laurent::of_map(map, depth);
    let mut powers = Vec::with_capacity(n + 1);
    powers.push(Laurent::one(depth));
    for j in 1..=n {
        let next = powers[j - 1].mul(&psi);
        powers.push(next);
    }
    let mut b = vec![ZERO; n + 1];
    b[n] = Complex64::new(1.0, 0.0);
    for k in (0..n).rev() {
        let mut acc = ZERO;
        for j in (k + 1)..=n {
            acc += b[j] * powers[j].at(k as i64);
        }
        b[k] = -acc;
    }
    Ok(b)
}

/// Horner evaluation of a polynomial with ascending coefficients.
pub fn eval_polynomial(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

/// Per-row values of the strong Grunsky inequality specialized to unit
/// vectors: `Σ_n (n/m) |c_{mn}|² / radius^{2(m+n)} ≤ 1`.
#[derive(Clone, Debug)]
pub struct StrongGrunskyReport {
    pub radius: f64,
    /// `row_sums[m-1]` belongs to row `m`.
    pub row_sums: Vec<f64>,
    /// Rows whose sum exceeds `1 + 1e-9`.
    pub flagged: Vec<usize>,
}

impl StrongGrunskyReport {
    pub fn holds(&self) -> bool {
        self.flagged.is_empty()
    }

    pub fn max_row_sum(&self) -> f64 {
        self.row_sums.iter().copied().fold(0.0, f64::max)
    }
}

pub fn check_strong_grunsky(table: &GrunskyTable, radius: f64) -> StrongGrunskyReport {
    let order = table.order();
    let inv = radius.recip();
    let row_sums: Vec<f64> = (1..=order)
        .map(|m| {
            (1..=order)
                .map(|n| {
                    let scaled = table.get(m, n).norm() * inv.powi((m + n) as i32);
                    n as f64 / m as f64 * scaled * scaled
                })
                .sum()
        })
        .collect();
    let flagged = row_sums
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 1.0 + 1e-9)
        .map(|(i, _)| i + 1)
        .collect();
    StrongGrunskyReport {
        radius,
        row_sums,
        flagged,
    }
}

/// Smallest `ρ` with `|g_{mn}| ≤ √m ρ^{m+n}` on every entry of `g`
/// (row index `m`, 1-based). Zero for an all-zero table.
pub fn fit_decay_rho(g: &CMat) -> Result<f64> {
    if g.nrows() == 0 || g.ncols() == 0 {
        return Err(Error::Argument(
            "cannot fit decay rate of an empty table".into(),
        ));
    }
    let mut rho = 0.0f64;
    for i in 0..g.nrows() {
        let m = (i + 1) as f64;
        for j in 0..g.ncols() {
            let abs = g[(i, j)].norm();
            if abs > 0.0 {
                let exponent = ((i + 1) + (j + 1)) as f64;
                rho = rho.max((abs / m.sqrt()).powf(exponent.recip()));
            }
        }
    }
    if !(rho < 1.0) {
        return Err(Error::DecayViolation { rho });
    }
    Ok(rho)
}

/// `g_{mn} = c_{mn} / r_i^{m+n}` together with a decay rate `ρ`.
#[derive(Clone, Debug)]
pub struct ScaledGrunskyTable {
    base: GrunskyTable,
    r_inner: f64,
    g: CMat,
    rho: f64,
}

impl ScaledGrunskyTable {
    /// Scales `base` by `r_inner` and fits `ρ` from the scaled entries.
    pub fn new(base: GrunskyTable, r_inner: f64) -> Result<Self> {
        let g = scale(&base, r_inner)?;
        let rho = fit_decay_rho(&g)?;
        Ok(Self {
            base,
            r_inner,
            g,
            rho,
        })
    }

    /// Like [`ScaledGrunskyTable::new`] but with a caller-chosen `ρ`.
    pub fn with_rho(base: GrunskyTable, r_inner: f64, rho: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::Argument(format!(
                "rho must lie in [0, 1), got {rho}"
            )));
        }
        let g = scale(&base, r_inner)?;
        Ok(Self {
            base,
            r_inner,
            g,
            rho,
        })
    }

    pub fn base(&self) -> &GrunskyTable {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.base.order()
    }

    pub fn r_inner(&self) -> f64 {
        self.r_inner
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `g_{mn}` with 1-based indices.
    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.g[(m - 1, n - 1)]
    }

    pub fn matrix(&self) -> &CMat {
        &self.g
    }

    /// Largest `|g_{mn}| / (√m ρ^{m+n})`; at most 1 when `ρ` is a valid rate.
    pub fn bound_ratio(&self) -> f64 {
        let order = self.order();
        let mut worst = 0.0f64;
        for m in 1..=order {
            for n in 1..=order {
                let abs = self.get(m, n).norm();
                if abs == 0.0 {
                    continue;
                }
                let bound = (m as f64).sqrt() * self.rho.powi((m + n) as i32);
                worst = worst.max(if bound > 0.0 {
                    abs / bound
                } else {
                    f64::INFINITY
                });
            }
        }
        worst
    }
}

fn scale(base: &GrunskyTable, r_inner: f64) -> Result<CMat> {
    if !(r_inner > 0.0 && r_inner.is_finite()) {
        return Err(Error::Argument(format!(
            "inner radius must be positive, got {r_inner}"
        )));
    }
    let inv = r_inner.recip();
    let pow: Vec<f64> = (0..=base.order()).map(|k| inv.powi(k as i32)).collect();
    let g = CMat::from_fn(base.order(), base.order(), |i, j| {
        base.c[(i, j)] * pow[i + 1] * pow[j + 1]
    });
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let v = g[(i, j)];
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::GeometryDegenerate(format!(
                    "scaled Grunsky coefficient g_({},{}) overflows at r_i = {r_inner}",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(g)
}
