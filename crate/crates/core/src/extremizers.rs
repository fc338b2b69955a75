//! Predicates for the named element families and classification of
//! candidate extremizers by the row of the extremizer table containing `(1/p, 1/q)`.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, C64};
use crate::error::{Error, Result};
use crate::inequalities::{recip, BOUNDARY_EPS};
use crate::models::{PlanarModel, Side};
use crate::transform::conv;

pub const CLASSIFY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    TraceOneProjection,
    BishiftOfBiprojection,
    ExtremalElement,
    Anything,
    FTOfTraceOneProjection,
    ExtremalUnitary,
    Unitary,
    FTOfUnitary,
    Biunitary,
    NoFamily,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::TraceOneProjection => "TraceOneProjection",
            Family::BishiftOfBiprojection => "BishiftOfBiprojection",
            Family::ExtremalElement => "ExtremalElement",
            Family::Anything => "Anything",
            Family::FTOfTraceOneProjection => "FTOfTraceOneProjection",
            Family::ExtremalUnitary => "ExtremalUnitary",
            Family::Unitary => "Unitary",
            Family::FTOfUnitary => "FTOfUnitary",
            Family::Biunitary => "Biunitary",
            Family::NoFamily => "NoFamily",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        TABLE.iter().map(|r| r.family).chain([Family::NoFamily]).find(|f| f.as_str() == s)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    /// 1-based row number.
    pub index: u8,
    pub condition: &'static str,
    pub family: Family,
}

pub const TABLE: [TableRow; 9] = [
    TableRow { index: 1, condition: "1/p+1/q>1, 1/p>1/2", family: Family::TraceOneProjection },
    TableRow { index: 2, condition: "1/p+1/q=1, 1/2<1/p<1", family: Family::BishiftOfBiprojection },
    TableRow { index: 3, condition: "1/p=1, 1/q=0", family: Family::ExtremalElement },
    TableRow { index: 4, condition: "1/p=1/2, 1/q=1/2", family: Family::Anything },
    TableRow { index: 5, condition: "1/p+1/q<1, 0<1/q<1/2", family: Family::FTOfTraceOneProjection },
    TableRow { index: 6, condition: "1/q=0, 0<=1/p<1", family: Family::ExtremalUnitary },
    TableRow { index: 7, condition: "1/q=1/2, 0<=1/p<1/2", family: Family::Unitary },
    TableRow { index: 8, condition: "1/q>1/2, 1/p=1/2", family: Family::FTOfUnitary },
    TableRow { index: 9, condition: "1/q>1/2, 1/p<1/2", family: Family::Biunitary },
];

/// The row whose region contains `(1/p, 1/q)`; `None` outside the closed positive quadrant.
pub fn table_row(inv_p: f64, inv_q: f64) -> Option<&'static TableRow> {
    let e = BOUNDARY_EPS;
    if !(inv_p >= -e && inv_q >= -e) || !inv_p.is_finite() || !inv_q.is_finite() {
        return None;
    }
    let eq = |a: f64, b: f64| (a - b).abs() <= e;
    let s = inv_p + inv_q;
    let row = if eq(inv_p, 0.5) && eq(inv_q, 0.5) {
        4
    } else if eq(inv_p, 1.0) && eq(inv_q, 0.0) {
        3
    } else if eq(inv_q, 0.0) && inv_p < 1.0 {
        6
    } else if eq(inv_q, 0.5) && inv_p < 0.5 {
        7
    } else if eq(inv_p, 0.5) && inv_q > 0.5 {
        8
    } else if eq(s, 1.0) && inv_p > 0.5 && inv_p < 1.0 {
        2
    } else if s > 1.0 && inv_p > 0.5 {
        1
    } else if s < 1.0 && inv_q > 0.0 && inv_q < 0.5 {
        5
    } else if inv_q > 0.5 && inv_p < 0.5 {
        9
    } else {
        return None;
    };
    Some(&TABLE[row - 1])
}

/// Classification outcome: the family of the row containing the point if `x`
/// passes its predicate, otherwise `NoFamily`; `matched_rows` lists every row
/// whose family predicate accepts `x`, regardless of location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyLabel {
    pub family: Family,
    pub row: Option<u8>,
    pub matched_rows: Vec<u8>,
}

impl FamilyLabel {
    pub fn descriptor(&self) -> String {
        let row = self.row.map(|r| TABLE[r as usize - 1].condition).unwrap_or("outside table");
        let rows: Vec<String> = self.matched_rows.iter().map(|r| r.to_string()).collect();
        format!("{} [{}; matches {}]", self.family, row, if rows.is_empty() { "none".into() } else { rows.join(",") })
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family.as_str())
    }
}

fn scale_of(x: &Element) -> f64 {
    1.0 + x.max_entry()
}

pub fn is_projection(x: &Element, tol: f64) -> bool {
    let Ok(xx) = x.mul(x) else { return false };
    let s = scale_of(x);
    xx.max_abs_diff(x) <= tol * s && x.max_abs_diff(&x.adjoint()) <= tol * s
}

/// `x* x = 1` within `tol`.
pub fn is_unitary(x: &Element, tol: f64) -> bool {
    x.abs_squared().max_abs_diff(&Element::identity(x.algebra())) <= tol
}

pub fn is_trace_one_projection(x: &Element, tol: f64) -> bool {
    is_projection(x, tol) && (x.trace() - C64::new(1.0, 0.0)).norm() <= tol
}

/// Projection whose transform is a multiple of a projection.
pub fn is_biprojection(model: &PlanarModel, x: &Element, tol: f64) -> bool {
    if x.is_zero() || !is_projection(x, tol) {
        return false;
    }
    let Ok(fx) = model.fourier(x) else { return false };
    let m = fx.norm_inf();
    m > 0.0 && is_projection(&fx.scale_real(1.0 / m), tol)
}

/// `tr(x) = tr(B)` and `x*B = (tr(B)/δ) x` (left) or `B*x = (tr(B)/δ) x` (right).
pub fn is_shift(model: &PlanarModel, x: &Element, b: &Element, side: Side, tol: f64) -> Result<bool> {
    if !is_biprojection(model, b, tol) {
        return Err(Error::NotABiprojection);
    }
    let tb = b.trace();
    if (x.trace() - tb).norm() > tol * (1.0 + tb.norm()) {
        return Ok(false);
    }
    let c = match side {
        Side::Left => conv(model, x, b)?,
        Side::Right => conv(model, b, x)?,
    };
    let target = x.scale(tb / model.delta());
    Ok(c.max_abs_diff(&target) <= tol * scale_of(x))
}

/// Bishift test through equality in `S(x)·S(F x) ≥ δ²`.
pub fn is_bishift_via_ds(model: &PlanarModel, x: &Element, tol: f64) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let d2 = model.delta() * model.delta();
    let fx = model.fourier(x)?;
    Ok((x.support() * fx.support() - d2).abs() <= tol * d2)
}

pub fn is_biunitary(model: &PlanarModel, x: &Element, tol: f64) -> bool {
    is_unitary(x, tol) && model.fourier(x).map(|f| is_unitary(&f, tol)).unwrap_or(false)
}

/// `‖F x‖_∞ = δ^{-1}‖x‖_1`.
pub fn is_extremal(model: &PlanarModel, x: &Element, tol: f64) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let fx = model.fourier(x)?;
    let target = x.singular_spectrum().pnorm(1.0) / model.delta();
    Ok((fx.norm_inf() - target).abs() <= tol * target)
}

/// `x` rescaled so that a multiple of a projection becomes that projection.
fn normalize_projection(x: &Element) -> Option<Element> {
    let t = x.trace();
    (t.norm() > 0.0).then(|| x.scale(C64::new(x.support(), 0.0) / t))
}

fn normalize_unitary(x: &Element) -> Option<Element> {
    let m = x.norm_inf();
    (m > 0.0).then(|| x.scale_real(1.0 / m))
}

fn trace_one_multiple(x: &Element, tol: f64) -> bool {
    normalize_projection(x).is_some_and(|y| is_trace_one_projection(&y, tol))
}

fn unitary_multiple(x: &Element, tol: f64) -> bool {
    normalize_unitary(x).is_some_and(|y| is_unitary(&y, tol))
}

/// Whether `x` belongs, up to scale, to the given family.
pub fn in_family(model: &PlanarModel, x: &Element, family: Family, tol: f64) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    Ok(match family {
        Family::TraceOneProjection => trace_one_multiple(x, tol),
        Family::BishiftOfBiprojection => is_bishift_via_ds(model, x, tol)?,
        Family::ExtremalElement => is_extremal(model, x, tol)?,
        Family::Anything => true,
        Family::FTOfTraceOneProjection => trace_one_multiple(&model.fourier_inverse(x)?, tol),
        Family::ExtremalUnitary => unitary_multiple(x, tol) && is_extremal(model, x, tol)?,
        Family::Unitary => unitary_multiple(x, tol),
        Family::FTOfUnitary => unitary_multiple(&model.fourier_inverse(x)?, tol),
        Family::Biunitary => normalize_unitary(x).is_some_and(|y| is_biunitary(model, &y, tol)),
        Family::NoFamily => false,
    })
}

pub fn classify(model: &PlanarModel, x: &Element, p: f64, q: f64, tol: f64) -> Result<FamilyLabel> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let mut matched_rows = Vec::new();
    for row in TABLE.iter().filter(|r| r.family != Family::Anything) {
        if in_family(model, x, row.family, tol)? {
            matched_rows.push(row.index);
        }
    }
    let row = table_row(recip(p), recip(q));
    let family = match row {
        Some(r) if r.family == Family::Anything || matched_rows.contains(&r.index) => r.family,
        _ => Family::NoFamily,
    };
    Ok(FamilyLabel { family, row: row.map(|r| r.index), matched_rows })
}

/// Spectral projection of `|w|` onto singular values within `1e-9` relative of `‖w‖_∞`.
pub fn top_spectral_projection(w: &Element) -> Result<Element> {
    let a = w.abs();
    let spec = a.spectral()?;
    let top = w.norm_inf();
    let cut = top * (1.0 - 1e-9);
    let blocks = spec
        .blocks
        .iter()
        .map(|b| {
            let d = b.eigenvalues.len();
            let mut q = DMatrix::<C64>::zeros(d, d);
            for (i, &l) in b.eigenvalues.iter().enumerate() {
                if top > 0.0 && l >= cut {
                    let v = b.eigenvectors.column(i);
                    q += &v * v.adjoint();
                }
            }
            q
        })
        .collect();
    Element::from_blocks(w.algebra(), blocks)
}

/// For `w` whose inverse transform is extremal, `wQ` (with `Q` the top
/// spectral projection of `|w|`) should be a bishift of a biprojection.
pub fn maxex_is_bishift(model: &PlanarModel, w: &Element, tol: f64) -> Result<bool> {
    let q = top_spectral_projection(w)?;
    is_bishift_via_ds(model, &w.mul(&q)?, tol)
}
