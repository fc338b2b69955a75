#![allow(dead_code)]

use ncfa_core::{abelian_model, cyclic_model, s3_model, tl_model, PlanarModel};

/// The standard model roster: cyclic 2..8, Z2xZ2, S3 and three Temperley-Lieb indices.
pub fn roster() -> Vec<PlanarModel> {
    let mut out: Vec<PlanarModel> = (2..=8).map(|n| cyclic_model(n).unwrap()).collect();
    out.push(abelian_model(&[2, 2]).unwrap());
    out.push(s3_model());
    for d in [2f64.sqrt(), (1.0 + 5f64.sqrt()) / 2.0, 2.0] {
        out.push(tl_model(d).unwrap());
    }
    out
}

/// Reciprocal-exponent grid used throughout.
pub const GRID: [f64; 6] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25];

pub fn inv(x: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}
