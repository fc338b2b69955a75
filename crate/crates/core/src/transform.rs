//! String Fourier transform, its inverse, and convolution.
//!
//! `Backward` is the linear inverse of `Forward`. Convolution on `P_{2,+}` of a
//! group model is the normalized group convolution; everywhere else it is
//! transported through the exchange identity `F(x*y) = F(x)·F(y)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, RandomKind, C64};
use crate::error::{Error, Result};
use crate::models::{PlanarModel, Sector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `P_{2,+} → P_{2,-}`
    Forward,
    /// `P_{2,-} → P_{2,+}`
    Backward,
}

impl Direction {
    pub fn source(self) -> Sector {
        match self {
            Direction::Forward => Sector::Plus,
            Direction::Backward => Sector::Minus,
        }
    }

    pub fn target(self) -> Sector {
        match self {
            Direction::Forward => Sector::Minus,
            Direction::Backward => Sector::Plus,
        }
    }

    /// Direction leaving `sector`.
    pub fn from_sector(sector: Sector) -> Self {
        match sector {
            Sector::Plus => Direction::Forward,
            Sector::Minus => Direction::Backward,
        }
    }
}

fn require_sector(model: &PlanarModel, x: &Element, sector: Sector) -> Result<()> {
    let expected = model.algebra(sector);
    if x.algebra().same_as(expected) {
        Ok(())
    } else {
        Err(Error::AlgebraMismatch { left: x.algebra().id().to_string(), right: expected.id().to_string() })
    }
}

fn apply(model: &PlanarModel, x: &Element, dir: Direction) -> Result<Element> {
    let matrix = match dir {
        Direction::Forward => model.forward_matrix(),
        Direction::Backward => model.backward_matrix(),
    };
    let y = matrix * x.to_flat();
    Element::from_flat(model.algebra(dir.target()), y.as_slice())
}

pub fn sft(model: &PlanarModel, x: &Element, dir: Direction) -> Result<Element> {
    require_sector(model, x, dir.source())?;
    apply(model, x, dir)
}

/// Inverse of `sft(·, dir)`: takes `y` in the target of `dir` back to its source.
pub fn sft_inverse(model: &PlanarModel, y: &Element, dir: Direction) -> Result<Element> {
    require_sector(model, y, dir.target())?;
    let back = match dir {
        Direction::Forward => Direction::Backward,
        Direction::Backward => Direction::Forward,
    };
    apply(model, y, back)
}

impl PlanarModel {
    /// The transform leaving whichever algebra `x` belongs to.
    pub fn fourier(&self, x: &Element) -> Result<Element> {
        let sector = self.sector_of(x).ok_or_else(|| Error::AlgebraMismatch {
            left: x.algebra().id().to_string(),
            right: self.id().to_string(),
        })?;
        apply(self, x, Direction::from_sector(sector))
    }

    /// Preimage of `y` under the transform that lands in `y`'s algebra.
    pub fn fourier_inverse(&self, y: &Element) -> Result<Element> {
        let sector = self.sector_of(y).ok_or_else(|| Error::AlgebraMismatch {
            left: y.algebra().id().to_string(),
            right: self.id().to_string(),
        })?;
        // The map into Plus is Backward, whose inverse is Forward, and vice versa.
        apply(self, y, Direction::from_sector(sector))
    }
}

/// Convolution `x * y` within one 2-box algebra.
pub fn conv(model: &PlanarModel, x: &Element, y: &Element) -> Result<Element> {
    if !x.algebra().same_as(y.algebra()) {
        return Err(Error::AlgebraMismatch {
            left: x.algebra().id().to_string(),
            right: y.algebra().id().to_string(),
        });
    }
    let sector = model.sector_of(x).ok_or_else(|| Error::AlgebraMismatch {
        left: x.algebra().id().to_string(),
        right: model.id().to_string(),
    })?;
    if let (Sector::Plus, Some(table)) = (sector, model.group()) {
        let n = table.order();
        let (xv, yv) = (x.values(), y.values());
        let scale = 1.0 / model.delta();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for h in 0..n {
            if xv[h] == C64::new(0.0, 0.0) {
                continue;
            }
            let hinv = table.inverse(h);
            for (g, slot) in out.iter_mut().enumerate() {
                *slot += xv[h] * yv[table.mul(hinv, g)];
            }
        }
        let out: Vec<C64> = out.into_iter().map(|z| z * scale).collect();
        return Element::from_values(model.a_plus(), &out);
    }
    let dir = Direction::from_sector(sector);
    let prod = apply(model, x, dir)?.mul(&apply(model, y, dir)?)?;
    sft_inverse(model, &prod, dir)
}

/// Largest deviations seen while checking the transform axioms on random samples.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub model: String,
    pub samples: usize,
    pub seed: u64,
    /// `max |‖F x‖_2 − ‖x‖_2|`
    pub plancherel: f64,
    /// `max ‖F^{-1}F x − x‖` entrywise
    pub inverse: f64,
    /// `max ‖F(x*y) − F(x)F(y)‖` entrywise
    pub exchange: f64,
    /// `max (‖x*y‖_r − δ^{-1}‖x‖_p‖y‖_q) / scale`, clipped below at 0
    pub young: f64,
    /// `max ‖F(αx+βy) − αF x − βF y‖` entrywise
    pub linearity: f64,
}

impl ValidationReport {
    pub fn max_deviation(&self) -> f64 {
        [self.plancherel, self.inverse, self.exchange, self.young, self.linearity]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Exponent triples `(p, q, r)` with `1/r + 1 = 1/p + 1/q` and `1 ≤ p, q, r ≤ ∞`.
pub fn young_triples() -> Vec<(f64, f64, f64)> {
    let inv = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut out = Vec::new();
    for &a in &inv {
        for &b in &inv {
            let c = a + b - 1.0;
            if (0.0..=1.0).contains(&c) {
                out.push((recip(a), recip(b), recip(c)));
            }
        }
    }
    out
}

fn recip(v: f64) -> f64 {
    if v == 0.0 {
        f64::INFINITY
    } else {
        1.0 / v
    }
}

pub fn validate_model(model: &PlanarModel, samples: usize, seed: u64) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ValidationReport { model: model.id().to_string(), samples, seed, ..Default::default() };
    let triples = young_triples();
    let delta = model.delta();
    for i in 0..samples {
        let sector = if i % 2 == 0 { Sector::Plus } else { Sector::Minus };
        let alg = model.algebra(sector);
        let x = Element::random_with(alg, RandomKind::Generic, &mut rng);
        let y = Element::random_with(alg, RandomKind::Generic, &mut rng);
        let fx = model.fourier(&x).expect("sector matches");
        let fy = model.fourier(&y).expect("sector matches");
        let nx = x.pnorm(2.0).expect("p = 2");
        report.plancherel = report.plancherel.max((fx.pnorm(2.0).expect("p = 2") - nx).abs());
        let back = model.fourier_inverse(&fx).expect("sector matches");
        report.inverse = report.inverse.max(back.max_abs_diff(&x));
        let xy = conv(model, &x, &y).expect("same algebra");
        let lhs = model.fourier(&xy).expect("sector matches");
        let rhs = fx.mul(&fy).expect("same algebra");
        report.exchange = report.exchange.max(lhs.max_abs_diff(&rhs));
        let (alpha, beta) = (C64::new(0.3, -1.2), C64::new(-0.7, 0.4));
        let comb = x.scale(alpha).add(&y.scale(beta)).expect("same algebra");
        let lin_rhs = fx.scale(alpha).add(&fy.scale(beta)).expect("same algebra");
        report.linearity = report.linearity.max(model.fourier(&comb).expect("sector").max_abs_diff(&lin_rhs));
        let (sx, sy, sxy) = (x.singular_spectrum(), y.singular_spectrum(), xy.singular_spectrum());
        for &(p, q, r) in &triples {
            let l = sxy.pnorm(r);
            let rr = sx.pnorm(p) * sy.pnorm(q) / delta;
            report.young = report.young.max((l - rr) / (1.0 + l + rr));
        }
    }
    report
}
