//! Truncated matrix representations of the annulus NP operator.
//!
//! On each curve `Γ_α` the basis densities are `φ_n^α = e^{inθ}/h(ρ_α, θ)`,
//! `|n| ≤ N`. The operator acts on coefficient vectors ordered
//! `(Γ_i: −N..N, Γ_e: −N..N)` through
//!
//! ```text
//!        ⎡ −𝓖          r^|ℤ| − 𝓖 r^|ℤ|   ⎤
//! ½ ·    ⎣ r^|ℤ| + r^|ℤ| 𝓖   r^|ℤ| 𝓖 r^|ℤ| ⎦ ,   𝓖 = 𝓡_i⁻¹ 𝓒 𝓡_i⁻¹,
//! ```
//!
//! where `𝓒` has `c_{mn}` at (row −m, col n), `conj(c_{mn})` at
//! (row m, col −n), and 1 at (0, 0).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{AnnulusGeometry, Curve};
use crate::grunsky::{GrunskyTable, ScaledGrunskyTable};
use crate::CMat;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Flat row/column index of mode `n` on `curve` in a truncation of order `order`.
pub fn mode_index(n: i64, curve: Curve, order: usize) -> Result<usize> {
    let big_n = order as i64;
    if n.abs() > big_n {
        return Err(Error::Argument(format!(
            "mode {n} outside [-{order}, {order}]"
        )));
    }
    let offset = match curve {
        Curve::Inner => 0,
        Curve::Outer => 2 * order + 1,
    };
    Ok(offset + (n + big_n) as usize)
}

/// Inverse of [`mode_index`].
pub fn mode_of_index(index: usize, order: usize) -> Result<(i64, Curve)> {
    let block = 2 * order + 1;
    if index >= 2 * block {
        return Err(Error::Argument(format!(
            "index {index} outside a matrix of size {}",
            2 * block
        )));
    }
    let curve = if index < block {
        Curve::Inner
    } else {
        Curve::Outer
    };
    Ok(((index % block) as i64 - order as i64, curve))
}

/// Dense truncation of the annulus NP operator, size `2(2N+1)`.
#[derive(Clone, Debug)]
pub struct NpBlockMatrix {
    order: usize,
    entries: CMat,
}

impl NpBlockMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    /// Entry at `(row mode, row curve) × (col mode, col curve)`.
    pub fn at(&self, row: (i64, Curve), col: (i64, Curve)) -> Result<Complex64> {
        let i = mode_index(row.0, row.1, self.order)?;
        let j = mode_index(col.0, col.1, self.order)?;
        Ok(self.entries[(i, j)])
    }
}

/// `𝓒` restricted to modes `|p|, |q| ≤ N`, given `g(m, n) = c_{mn}·scale`.
fn script_c(p: i64, q: i64, c: impl Fn(usize, usize) -> Complex64) -> Complex64 {
    match (p.signum(), q.signum()) {
        (0, 0) => Complex64::new(1.0, 0.0),
        (-1, 1) => c((-p) as usize, q as usize),
        (1, -1) => c(p as usize, (-q) as usize).conj(),
        _ => ZERO,
    }
}

/// Assembles `[𝕂*_{∂A}]` truncated to modes `|n| ≤ order`.
pub fn build_np_matrix(
    geom: &AnnulusGeometry,
    table: &GrunskyTable,
    order: usize,
) -> Result<NpBlockMatrix> {
    if order == 0 {
        return Err(Error::Argument("truncation order must be >= 1".into()));
    }
    if order > table.order() {
        return Err(Error::Argument(format!(
            "truncation order {order} exceeds Grunsky table order {}",
            table.order()
        )));
    }
    let (ri, re) = (geom.r_inner(), geom.r_outer());
    let pow = |base: f64, k: i64| base.powi(k.unsigned_abs() as i32);
    let c = |m: usize, n: usize| table.get(m, n);
    let big_n = order as i64;
    let size = 2 * (2 * order + 1);
    let mut k = CMat::zeros(size, size);
    for p in -big_n..=big_n {
        for q in -big_n..=big_n {
            let cpq = script_c(p, q, c);
            let diag = if p == q {
                (ri / re).powi(p.unsigned_abs() as i32)
            } else {
                0.0
            };
            let (pi, pe) = (
                mode_index(p, Curve::Inner, order)?,
                mode_index(p, Curve::Outer, order)?,
            );
            let (qi, qe) = (
                mode_index(q, Curve::Inner, order)?,
                mode_index(q, Curve::Outer, order)?,
            );
            // 𝓡_a⁻¹ 𝓒 𝓡_b⁻¹ entries.
            let c_ii = cpq / (pow(ri, p) * pow(ri, q));
            let c_ie = cpq / (pow(ri, p) * pow(re, q));
            let c_ei = cpq / (pow(re, p) * pow(ri, q));
            let c_ee = cpq / (pow(re, p) * pow(re, q));
            k[(pi, qi)] = -0.5 * c_ii;
            k[(pi, qe)] = 0.5 * (Complex64::from(diag) - c_ie);
            k[(pe, qi)] = 0.5 * (Complex64::from(diag) + c_ei);
            k[(pe, qe)] = 0.5 * c_ee;
        }
    }
    check_finite(&k, "NP matrix")?;
    Ok(NpBlockMatrix { order, entries: k })
}

/// Half-size matrix `𝓑` (size `2N`) whose eigenvalues are the squares of
/// the NP eigenvalues other than `±1/2`.
#[derive(Clone, Debug)]
pub struct ReducedMatrixB {
    order: usize,
    entries: CMat,
}

impl ReducedMatrixB {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    /// Wraps an arbitrary square matrix (used for Gershgorin tests).
    pub fn from_entries(entries: CMat) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() % 2 != 0 {
            return Err(Error::Argument(
                "reduced matrix must be square of even size".into(),
            ));
        }
        Ok(Self {
            order: entries.nrows() / 2,
            entries,
        })
    }
}

/// Assembles
///
/// ```text
/// 𝓑 = ¼ ⎡ D              −G(I−D)          ⎤ ,  D = diag(r^{2m}),
///       ⎣ −Ḡ(I−D)D     D + Ḡ(I−D)G(I−D)  ⎦
/// ```
///
/// with every block truncated to `order × order`.
pub fn build_reduced_b(
    geom: &AnnulusGeometry,
    scaled: &ScaledGrunskyTable,
    order: usize,
) -> Result<ReducedMatrixB> {
    if order == 0 || order > scaled.order() {
        return Err(Error::Argument(format!(
            "truncation order {order} must be in 1..={}",
            scaled.order()
        )));
    }
    if (scaled.r_inner() - geom.r_inner()).abs() > 1e-14 * geom.r_inner() {
        return Err(Error::Argument(format!(
            "table scaled with r_i = {} but geometry has r_i = {}",
            scaled.r_inner(),
            geom.r_inner()
        )));
    }
    let r2 = geom.ratio() * geom.ratio();
    let d: Vec<f64> = (1..=order).map(|m| r2.powi(m as i32)).collect();
    // G(I − D) and Ḡ(I − D), truncated.
    let g_damped = CMat::from_fn(order, order, |i, j| scaled.matrix()[(i, j)] * (1.0 - d[j]));
    let gbar_damped = CMat::from_fn(order, order, |i, j| {
        scaled.matrix()[(i, j)].conj() * (1.0 - d[j])
    });
    let product = &gbar_damped * &g_damped;

    let mut b = CMat::zeros(2 * order, 2 * order);
    for i in 0..order {
        b[(i, i)] = Complex64::from(0.25 * d[i]);
        for j in 0..order {
            b[(i, order + j)] = -0.25 * g_damped[(i, j)];
            b[(order + i, j)] = -0.25 * gbar_damped[(i, j)] * d[j];
            b[(order + i, order + j)] = 0.25 * product[(i, j)];
        }
        b[(order + i, order + i)] += 0.25 * d[i];
    }
    check_finite(&b, "reduced matrix")?;
    Ok(ReducedMatrixB { order, entries: b })
}

fn check_finite(m: &CMat, what: &str) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::GeometryDegenerate(format!(
                    "{what} has a non-finite entry at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}
