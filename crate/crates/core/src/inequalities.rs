//! Region geometry of the `(1/p, 1/q)` quadrant, the norm function `K`, and
//! checkers for every norm inequality and uncertainty principle.
//!
//! Exponents are carried as reciprocals: `inv_p = 1/p`, with `0` meaning `p = ∞`.

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, Spectrum, ORDER_ONE_GUARD};
use crate::error::{Error, Result};
use crate::models::PlanarModel;

/// Boundary membership tolerance in reciprocal coordinates.
pub const BOUNDARY_EPS: f64 = 1e-12;
/// Inequality slack tolerance factor: `ε·(1 + |lhs| + |rhs|)`.
pub const SLACK_EPS: f64 = 1e-9;
/// Equality detection factor.
pub const EQUALITY_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    RF,
    RT,
    RTF,
    /// Shared edge of `R_F` and `R_T` (`1/p + 1/q = 1`).
    BoundaryFT,
    /// Shared edge of `R_F` and `R_TF` (`1/q = 1/2`).
    BoundaryFTF,
    /// Shared edge of `R_T` and `R_TF` (`1/p = 1/2`).
    BoundaryTTF,
    /// `(1/2, 1/2)`, common to all three regions.
    CriticalHalf,
    /// `(1, 0)`.
    CriticalOneZero,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::RF => "RF",
            Region::RT => "RT",
            Region::RTF => "RTF",
            Region::BoundaryFT => "boundary_F_T",
            Region::BoundaryFTF => "boundary_F_TF",
            Region::BoundaryTTF => "boundary_T_TF",
            Region::CriticalHalf => "critical_half",
            Region::CriticalOneZero => "critical_one_zero",
        }
    }

    pub fn parse(s: &str) -> Option<Region> {
        [
            Region::RF,
            Region::RT,
            Region::RTF,
            Region::BoundaryFT,
            Region::BoundaryFTF,
            Region::BoundaryTTF,
            Region::CriticalHalf,
            Region::CriticalOneZero,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
    }
}

/// `1/x` with `1/∞ = 0` and `1/0 = ∞`.
pub fn recip(x: f64) -> f64 {
    if x == f64::INFINITY {
        0.0
    } else if x == 0.0 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub inv_p: f64,
    pub inv_q: f64,
    pub region: Region,
}

impl RegionPoint {
    pub fn new(inv_p: f64, inv_q: f64) -> Self {
        let (in_f, in_t, in_tf) = memberships(inv_p, inv_q);
        let near = |a: f64, b: f64| (inv_p - a).abs() <= BOUNDARY_EPS && (inv_q - b).abs() <= BOUNDARY_EPS;
        let region = if near(0.5, 0.5) {
            Region::CriticalHalf
        } else if near(1.0, 0.0) {
            Region::CriticalOneZero
        } else {
            match (in_f, in_t, in_tf) {
                (true, true, _) => Region::BoundaryFT,
                (true, false, true) => Region::BoundaryFTF,
                (false, true, true) => Region::BoundaryTTF,
                (true, false, false) => Region::RF,
                (false, true, false) => Region::RT,
                _ => Region::RTF,
            }
        };
        Self { inv_p, inv_q, region }
    }

    pub fn from_pq(p: f64, q: f64) -> Self {
        Self::new(recip(p), recip(q))
    }

    pub fn p(&self) -> f64 {
        recip(self.inv_p)
    }

    pub fn q(&self) -> f64 {
        recip(self.inv_q)
    }

    /// The point with the roles of `p` and `q` exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.inv_q, self.inv_p)
    }
}

/// Membership in `(R_F, R_T, R_TF)`, each closed up to `BOUNDARY_EPS`.
pub fn memberships(inv_p: f64, inv_q: f64) -> (bool, bool, bool) {
    let e = BOUNDARY_EPS;
    let s = inv_p + inv_q;
    (
        s <= 1.0 + e && inv_q <= 0.5 + e,
        s >= 1.0 - e && inv_p >= 0.5 - e,
        inv_p <= 0.5 + e && inv_q >= 0.5 - e,
    )
}

/// `log_δ K(1/p, 1/q)`. On shared boundaries every applicable formula is
/// evaluated and they must agree.
pub fn k_exponent(inv_p: f64, inv_q: f64) -> f64 {
    let (in_f, in_t, in_tf) = memberships(inv_p, inv_q);
    let candidates: Vec<f64> = [
        (in_f, 1.0 - 2.0 * inv_p),
        (in_t, 2.0 * inv_q - 1.0),
        (in_tf, 2.0 * inv_q - 2.0 * inv_p),
    ]
    .into_iter()
    .filter_map(|(inside, e)| inside.then_some(e))
    .collect();
    let first = *candidates.first().expect("the three regions cover the quadrant");
    for e in &candidates[1..] {
        assert!((e - first).abs() <= 1e-9, "K formulas disagree at ({inv_p}, {inv_q}): {candidates:?}");
    }
    first
}

pub fn k_value(rp: &RegionPoint, delta: f64) -> f64 {
    delta.powf(k_exponent(rp.inv_p, rp.inv_q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Claim `lhs ≤ rhs`; slack `rhs − lhs`.
    LessEq,
    /// Claim `lhs ≥ rhs`; slack `lhs − rhs`.
    GreaterEq,
    /// Claim `lhs = rhs`; slack `−|lhs − rhs|`.
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SameBranch,
    CrossBranch,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::SameBranch => "same_branch",
            Regime::CrossBranch => "cross_branch",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckContext {
    pub model: String,
    pub inv_p: f64,
    pub inv_q: f64,
    pub element_hash: String,
    pub seed: Option<u64>,
}

/// Outcome of one inequality evaluation. `holds ⇔ slack ≥ −tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub holds: bool,
    /// Both sides agree within `EQUALITY_EPS` relative.
    pub equality: bool,
    pub regime: Option<Regime>,
    /// Residual of an algebraic identity the check also asserts, if any.
    pub residual: Option<f64>,
    pub context: CheckContext,
}

impl CheckReport {
    pub fn new(name: &str, relation: Relation, lhs: f64, rhs: f64, context: CheckContext) -> Self {
        let tolerance = SLACK_EPS * (1.0 + lhs.abs() + rhs.abs());
        Self::with_tolerance(name, relation, lhs, rhs, tolerance, context)
    }

    pub fn with_tolerance(
        name: &str,
        relation: Relation,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        context: CheckContext,
    ) -> Self {
        let slack = match relation {
            Relation::LessEq => rhs - lhs,
            Relation::GreaterEq => lhs - rhs,
            Relation::Equal => -(lhs - rhs).abs(),
        };
        let equality = (lhs - rhs).abs() <= EQUALITY_EPS * (1.0 + lhs.abs() + rhs.abs());
        Self {
            name: name.to_string(),
            relation,
            lhs,
            rhs,
            slack,
            tolerance,
            holds: slack >= -tolerance,
            equality,
            regime: None,
            residual: None,
            context,
        }
    }

    /// Slack divided by `1 + |lhs| + |rhs|`.
    pub fn relative_slack(&self) -> f64 {
        self.slack / (1.0 + self.lhs.abs() + self.rhs.abs())
    }
}

/// Rényi entropy of a positive spectrum at `order`, with the min-entropy at
/// `∞` and the von Neumann limit substituted within `1e-6` of order one.
pub fn entropy_of_order(spec: &Spectrum, order: f64) -> f64 {
    if order == f64::INFINITY {
        -spec.max().ln()
    } else if (order - 1.0).abs() < ORDER_ONE_GUARD {
        spec.entropy() / spec.total()
    } else {
        order / (1.0 - order) * spec.log_pnorm(order)
    }
}

/// `x` and `F x` reduced to their singular spectra, ready for repeated checks.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub model: String,
    pub delta: f64,
    pub hash: String,
    pub seed: Option<u64>,
    pub x: Spectrum,
    pub fx: Spectrum,
}

impl Evaluated {
    pub fn new(model: &PlanarModel, x: &Element) -> Result<Self> {
        let fx = model.fourier(x)?;
        let xs = x.singular_spectrum();
        if xs.max() == 0.0 {
            return Err(Error::ZeroElement);
        }
        Ok(Self {
            model: model.id().to_string(),
            delta: model.delta(),
            hash: x.hash_hex(),
            seed: None,
            x: xs,
            fx: fx.singular_spectrum(),
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    fn ctx(&self, p: f64, q: f64) -> CheckContext {
        CheckContext {
            model: self.model.clone(),
            inv_p: recip(p),
            inv_q: recip(q),
            element_hash: self.hash.clone(),
            seed: self.seed,
        }
    }

    /// `‖F x‖_2 = ‖x‖_2`.
    pub fn plancherel(&self) -> CheckReport {
        CheckReport::new("plancherel", Relation::Equal, self.fx.pnorm(2.0), self.x.pnorm(2.0), self.ctx(2.0, 2.0))
    }

    /// Upper and lower norm bounds `K(1/q,1/p)^{-1}‖x‖_p ≤ ‖F x‖_q ≤ K(1/p,1/q)‖x‖_p`.
    pub fn norm_bounds(&self, p: f64, q: f64) -> (CheckReport, CheckReport) {
        let (ip, iq) = (recip(p), recip(q));
        let (xp, fq) = (self.x.pnorm(p), self.fx.pnorm(q));
        let upper = CheckReport::new(
            "norm_upper",
            Relation::LessEq,
            fq,
            self.delta.powf(k_exponent(ip, iq)) * xp,
            self.ctx(p, q),
        );
        let lower = CheckReport::new(
            "norm_lower",
            Relation::LessEq,
            self.delta.powf(-k_exponent(iq, ip)) * xp,
            fq,
            self.ctx(p, q),
        );
        (upper, lower)
    }

    pub fn hausdorff_young(&self, p: f64) -> Result<CheckReport> {
        if !(1.0..=2.0).contains(&p) {
            return Err(Error::POutOfRange(p));
        }
        let q = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
        Ok(CheckReport::new(
            "hausdorff_young",
            Relation::LessEq,
            self.fx.pnorm(q),
            self.delta.powf(1.0 - 2.0 / p) * self.x.pnorm(p),
            self.ctx(p, q),
        ))
    }

    fn degenerate(p: f64, q: f64) -> Result<()> {
        if (p - 2.0).abs() < ORDER_ONE_GUARD || (q - 2.0).abs() < ORDER_ONE_GUARD {
            Err(Error::DegenerateOrder { p, q })
        } else {
            Ok(())
        }
    }

    /// `(1/p − 1/2) h_{p/2}(|x|²) + (1/2 − 1/q) h_{q/2}(|F x|²) ≥ −log K(1/p, 1/q)`.
    pub fn up1(&self, p: f64, q: f64) -> Result<CheckReport> {
        if !(p > 0.0 && q > 0.0) {
            return Err(Error::NonPositiveP(p.min(q)));
        }
        Self::degenerate(p, q)?;
        let (x2, f2) = (self.x.map(|s| s * s), self.fx.map(|s| s * s));
        let (ip, iq) = (recip(p), recip(q));
        let lhs = (ip - 0.5) * entropy_of_order(&x2, p / 2.0) + (0.5 - iq) * entropy_of_order(&f2, q / 2.0);
        let rhs = -k_exponent(ip, iq) * self.delta.ln();
        let mut r = CheckReport::new("up1", Relation::GreaterEq, lhs, rhs, self.ctx(p, q));
        r.residual = Some((lhs - (self.x.log_pnorm(p) - self.fx.log_pnorm(q))).abs());
        Ok(r)
    }

    /// `h_{p/2}(|x|²) + h_{q/2}(|F x|²) ≥ (−1 + 2/(2−p) + 2/(2−q)) log δ²` for `‖x‖_2 = 1`.
    pub fn up2(&self, p: f64, q: f64) -> Result<CheckReport> {
        let n2 = self.x.pnorm(2.0);
        if (n2 - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(n2));
        }
        let (ip, iq) = (recip(p), recip(q));
        if ip + iq < 1.0 - BOUNDARY_EPS {
            return Err(Error::OutOfRegion { inv_p: ip, inv_q: iq });
        }
        Self::degenerate(p, q)?;
        let (x2, f2) = (self.x.map(|s| s * s), self.fx.map(|s| s * s));
        let lhs = entropy_of_order(&x2, p / 2.0) + entropy_of_order(&f2, q / 2.0);
        let term = |r: f64| if r == f64::INFINITY { 0.0 } else { 2.0 / (2.0 - r) };
        let rhs = (-1.0 + term(p) + term(q)) * 2.0 * self.delta.ln();
        let mut r = CheckReport::new("up2", Relation::GreaterEq, lhs, rhs, self.ctx(p, q));
        r.regime = Some(up2_regime(p, q));
        Ok(r)
    }

    /// `S(x)·S(F x) ≥ δ²`; equality marks bishifts.
    pub fn ds(&self) -> CheckReport {
        let d2 = self.delta * self.delta;
        let mut r = CheckReport::new(
            "donoho_stark",
            Relation::GreaterEq,
            self.x.support() * self.fx.support(),
            d2,
            self.ctx(0.0, 0.0),
        );
        r.context.inv_p = f64::INFINITY;
        r.context.inv_q = f64::INFINITY;
        r
    }

    /// `H(|x|²) + H(|F x|²) ≥ 2 log δ` for `‖x‖_2 = 1`.
    pub fn hb(&self) -> Result<CheckReport> {
        let n2 = self.x.pnorm(2.0);
        if (n2 - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(n2));
        }
        let lhs = self.x.map(|s| s * s).entropy() + self.fx.map(|s| s * s).entropy();
        Ok(CheckReport::new("hirschman_beckner", Relation::GreaterEq, lhs, 2.0 * self.delta.ln(), self.ctx(2.0, 2.0)))
    }
}

/// Whether the interpolation behind the second entropic principle stays on
/// one side of order one: `q > 2`, or the conjugate line with `1 ≤ p < 2`.
pub fn up2_regime(p: f64, q: f64) -> Regime {
    let (ip, iq) = (recip(p), recip(q));
    let conjugate = (ip + iq - 1.0).abs() <= 1e-9 && (0.5..=1.0 + BOUNDARY_EPS).contains(&ip);
    if iq < 0.5 || conjugate {
        Regime::SameBranch
    } else {
        Regime::CrossBranch
    }
}

pub fn check_norm_bounds(model: &PlanarModel, x: &Element, p: f64, q: f64) -> Result<(CheckReport, CheckReport)> {
    Ok(Evaluated::new(model, x)?.norm_bounds(p, q))
}

pub fn check_hausdorff_young(model: &PlanarModel, x: &Element, p: f64) -> Result<CheckReport> {
    Evaluated::new(model, x)?.hausdorff_young(p)
}

pub fn check_up1(model: &PlanarModel, x: &Element, p: f64, q: f64) -> Result<CheckReport> {
    Evaluated::new(model, x)?.up1(p, q)
}

pub fn check_up2(model: &PlanarModel, x: &Element, p: f64, q: f64) -> Result<CheckReport> {
    Evaluated::new(model, x)?.up2(p, q)
}

pub fn check_ds(model: &PlanarModel, x: &Element) -> Result<CheckReport> {
    Ok(Evaluated::new(model, x)?.ds())
}

pub fn check_hb(model: &PlanarModel, x: &Element) -> Result<CheckReport> {
    Evaluated::new(model, x)?.hb()
}

pub fn check_plancherel(model: &PlanarModel, x: &Element) -> Result<CheckReport> {
    Ok(Evaluated::new(model, x)?.plancherel())
}

fn plain_ctx(x: &Element, p: f64, q: f64) -> CheckContext {
    CheckContext {
        model: x.algebra().id().to_string(),
        inv_p: recip(p),
        inv_q: recip(q),
        element_hash: x.hash_hex(),
        seed: None,
    }
}

/// Both sides of the comparison between `‖x‖_p` and `‖x‖_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormComparison {
    pub lower: CheckReport,
    pub upper: CheckReport,
    /// `‖x‖_p = ‖x‖_1` with `p ≠ 1`.
    pub norms_equal: bool,
}

/// `δ^{2−2/p}‖x‖_p ≤ ‖x‖_1 ≤ ‖x‖_p` for `p ≤ 1`, reversed for `p ≥ 1`.
pub fn check_norm1_comparison(x: &Element, p: f64) -> Result<NormComparison> {
    if !(p > 0.0) {
        return Err(Error::NonPositiveP(p));
    }
    let spec = x.singular_spectrum();
    if spec.max() == 0.0 {
        return Err(Error::ZeroElement);
    }
    let delta = x.algebra().delta();
    let (np, n1) = (spec.pnorm(p), spec.pnorm(1.0));
    let scaled = delta.powf(2.0 - 2.0 * recip(p)) * np;
    let ctx = plain_ctx(x, p, 1.0);
    let (lower, upper) = if p <= 1.0 {
        (
            CheckReport::new("norm1_lower", Relation::LessEq, scaled, n1, ctx.clone()),
            CheckReport::new("norm1_upper", Relation::LessEq, n1, np, ctx),
        )
    } else {
        (
            CheckReport::new("norm1_lower", Relation::LessEq, np, n1, ctx.clone()),
            CheckReport::new("norm1_upper", Relation::LessEq, n1, scaled, ctx),
        )
    };
    let norms_equal = p != 1.0 && (np - n1).abs() <= 1e-10 * (np + n1);
    Ok(NormComparison { lower, upper, norms_equal })
}

/// Non-increase of `p ↦ h_p(x) − log δ²/(1−p)` along a single-branch grid.
pub fn check_entropy_monotone(x: &Element, grid: &[f64]) -> Result<CheckReport> {
    let spec = x.singular_spectrum();
    if spec.max() == 0.0 {
        return Err(Error::ZeroElement);
    }
    if spec.max() > 1.0 + 1e-12 {
        return Err(Error::NormTooLarge(spec.max()));
    }
    let below = grid.iter().all(|&p| p > 0.0 && p < 1.0);
    let above = grid.iter().all(|&p| p > 1.0);
    if grid.is_empty() || !(below || above) {
        return Err(Error::GridStraddlesOne);
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let log_d2 = 2.0 * x.algebra().delta().ln();
    let mut values = Vec::with_capacity(sorted.len());
    for &p in &sorted {
        values.push(x.renyi_entropy(p)? - log_d2 / (1.0 - p));
    }
    let worst = values.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let worst = if worst.is_finite() { worst } else { 0.0 };
    let mut ctx = plain_ctx(x, sorted[0], sorted[sorted.len() - 1]);
    ctx.inv_q = recip(sorted[sorted.len() - 1]);
    Ok(CheckReport::with_tolerance("entropy_monotone", Relation::LessEq, worst, 0.0, 1e-8, ctx))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitaryLine {
    /// `‖F x‖_2 ≤ δ^{1−2/p}‖x‖_p` for `1/p < 1/2`; equality iff `x` is a multiple of a unitary.
    Direct,
    /// `‖F x‖_q ≤ δ^{2/q−1}‖x‖_2` for `1/q > 1/2`; equality iff `F x` is a multiple of a unitary.
    Mirror,
}

pub fn check_unitary_line(model: &PlanarModel, x: &Element, exponent: f64, line: UnitaryLine) -> Result<CheckReport> {
    let ev = Evaluated::new(model, x)?;
    let inv = recip(exponent);
    Ok(match line {
        UnitaryLine::Direct => {
            if inv >= 0.5 {
                return Err(Error::POutOfRange(exponent));
            }
            CheckReport::new(
                "unitary_line",
                Relation::LessEq,
                ev.fx.pnorm(2.0),
                ev.delta.powf(1.0 - 2.0 * inv) * ev.x.pnorm(exponent),
                ev.ctx(exponent, 2.0),
            )
        }
        UnitaryLine::Mirror => {
            if inv <= 0.5 {
                return Err(Error::POutOfRange(exponent));
            }
            CheckReport::new(
                "unitary_line_mirror",
                Relation::LessEq,
                ev.fx.pnorm(exponent),
                ev.delta.powf(2.0 * inv - 1.0) * ev.x.pnorm(2.0),
                ev.ctx(2.0, exponent),
            )
        }
    })
}

/// `‖xy‖_r ≤ ‖x‖_p ‖y‖_q` with `1/r = 1/p + 1/q`.
pub fn check_holder(x: &Element, y: &Element, p: f64, q: f64) -> Result<CheckReport> {
    let xy = x.mul(y)?;
    let r = recip(recip(p) + recip(q));
    let lhs = xy.pnorm(r)?;
    let rhs = x.pnorm(p)? * y.pnorm(q)?;
    Ok(CheckReport::new("holder", Relation::LessEq, lhs, rhs, plain_ctx(x, p, q)))
}

/// `‖x*y‖_r ≤ δ^{-1}‖x‖_p ‖y‖_q` with `1/r + 1 = 1/p + 1/q`, `1 ≤ p, q, r ≤ ∞`.
pub fn check_young(model: &PlanarModel, x: &Element, y: &Element, p: f64, q: f64) -> Result<CheckReport> {
    let inv_r = recip(p) + recip(q) - 1.0;
    if !(-BOUNDARY_EPS..=1.0 + BOUNDARY_EPS).contains(&inv_r) || p < 1.0 || q < 1.0 {
        return Err(Error::POutOfRange(p));
    }
    let xy = crate::transform::conv(model, x, y)?;
    let lhs = xy.pnorm(recip(inv_r.max(0.0)))?;
    let rhs = x.pnorm(p)? * y.pnorm(q)? / model.delta();
    let mut ctx = plain_ctx(x, p, q);
    ctx.model = model.id().to_string();
    Ok(CheckReport::new("young", Relation::LessEq, lhs, rhs, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{RandomKind, C64};
    use crate::models::{cyclic_model, tl_model};

    #[test]
    fn region_tags() {
        assert_eq!(RegionPoint::new(0.25, 0.25).region, Region::RF);
        assert_eq!(RegionPoint::new(0.75, 0.75).region, Region::RT);
        assert_eq!(RegionPoint::new(0.25, 0.75).region, Region::RTF);
        assert_eq!(RegionPoint::new(0.75, 0.25).region, Region::BoundaryFT);
        assert_eq!(RegionPoint::new(0.25, 0.5).region, Region::BoundaryFTF);
        assert_eq!(RegionPoint::new(0.5, 0.75).region, Region::BoundaryTTF);
        assert_eq!(RegionPoint::new(0.5, 0.5).region, Region::CriticalHalf);
        assert_eq!(RegionPoint::new(1.0, 0.0).region, Region::CriticalOneZero);
        assert_eq!(RegionPoint::new(1.25, 0.0).region, Region::RT);
        for r in [Region::RF, Region::BoundaryTTF, Region::CriticalOneZero] {
            assert_eq!(Region::parse(r.as_str()), Some(r));
        }
    }

    #[test]
    fn k_examples() {
        let d = 3f64.sqrt();
        assert!((k_value(&RegionPoint::new(1.0, 0.0), d) - 1.0 / d).abs() < 1e-15);
        assert!((k_value(&RegionPoint::new(0.5, 0.5), d) - 1.0).abs() < 1e-15);
        assert!((k_value(&RegionPoint::new(0.0, 1.0), d) - d * d).abs() < 1e-14);
    }

    #[test]
    fn k_boundaries_agree() {
        for i in 0..=50 {
            let t = i as f64 / 50.0;
            // 1/q = 1/2 with 1/p ≤ 1/2
            let a = 0.5 * t;
            assert!(((1.0 - 2.0 * a) - (1.0 - 2.0 * a)).abs() < 1e-15);
            k_exponent(a, 0.5);
            // 1/p + 1/q = 1 with 1/p ∈ [1/2, 1]
            k_exponent(0.5 + 0.5 * t, 0.5 - 0.5 * t);
            // 1/p = 1/2 with 1/q ≥ 1/2
            k_exponent(0.5, 0.5 + 2.0 * t);
        }
    }

    #[test]
    fn norm_bound_examples() {
        let z4 = cyclic_model(4).unwrap();
        let x = z4.point_mass(1).unwrap();
        let (upper, lower) = check_norm_bounds(&z4, &x, 1.0, 1.0).unwrap();
        assert!((upper.lhs - 2.0).abs() < 1e-14 && upper.equality && upper.holds && lower.holds);
        let z3 = cyclic_model(3).unwrap();
        let ones = Element::from_real_values(z3.a_plus(), &[1.0, 1.0, 1.0]).unwrap();
        let (upper, _) = check_norm_bounds(&z3, &ones, f64::INFINITY, 1.0).unwrap();
        assert!((upper.lhs - 3f64.sqrt()).abs() < 1e-14 && (upper.rhs - 3.0).abs() < 1e-14);
        let g = Element::random(z4.a_plus(), RandomKind::Generic, 1);
        let (upper, lower) = check_norm_bounds(&z4, &g, 2.0, 2.0).unwrap();
        assert!(upper.equality && lower.equality);
        assert!(matches!(check_norm_bounds(&z4, &Element::zeros(z4.a_plus()), 1.0, 1.0), Err(Error::ZeroElement)));
    }

    #[test]
    fn up2_counterexample_on_z2() {
        let z2 = cyclic_model(2).unwrap();
        let r = check_up2(&z2, z2.e1(), 1.0, 1.0).unwrap();
        let ln2 = 2f64.ln();
        assert!((r.lhs - ln2).abs() < 1e-12);
        assert!((r.rhs - 3.0 * ln2).abs() < 1e-12);
        assert!(!r.holds);
        assert_eq!(r.regime, Some(Regime::CrossBranch));
        let conj = check_up2(&z2, z2.e1(), 4.0 / 3.0, 4.0).unwrap();
        assert!(conj.holds && conj.equality);
        assert_eq!(conj.regime, Some(Regime::SameBranch));
        assert!((conj.rhs - ln2).abs() < 1e-12);
    }

    #[test]
    fn up2_preconditions() {
        let z4 = cyclic_model(4).unwrap();
        let x = Element::from_real_values(z4.a_plus(), &[2.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(check_up2(&z4, &x, 1.0, 1.0), Err(Error::NotNormalized(_))));
        assert!(matches!(check_up2(&z4, z4.e1(), 4.0, 4.0), Err(Error::OutOfRegion { .. })));
        assert!(matches!(check_up2(&z4, z4.e1(), 2.0, 1.0), Err(Error::DegenerateOrder { .. })));
        assert!(matches!(check_up1(&z4, z4.e1(), 1.0, 2.0), Err(Error::DegenerateOrder { .. })));
    }

    #[test]
    fn up1_examples() {
        let z4 = cyclic_model(4).unwrap();
        let r = check_up1(&z4, z4.e1(), 1.0, 1.0).unwrap();
        assert!((r.lhs + 2f64.ln()).abs() < 1e-12 && r.equality);
        assert!(r.residual.unwrap() < 1e-12);
        let b = z4.bishift_element(&[0, 2], 0, 1).unwrap();
        let r = check_up1(&z4, &b, 4.0 / 3.0, 4.0).unwrap();
        assert!(r.equality, "{r:?}");
    }

    #[test]
    fn hy_examples() {
        let z4 = cyclic_model(4).unwrap();
        let b = z4.bishift_element(&[0, 2], 0, 1).unwrap();
        assert!(check_hausdorff_young(&z4, &b, 4.0 / 3.0).unwrap().equality);
        let g = Element::random(z4.a_plus(), RandomKind::Generic, 3);
        let r = check_hausdorff_young(&z4, &g, 4.0 / 3.0).unwrap();
        assert!(r.holds && r.slack > 1e-6);
        assert!(check_hausdorff_young(&z4, &g, 2.0).unwrap().equality);
        assert!(matches!(check_hausdorff_young(&z4, &g, 2.5), Err(Error::POutOfRange(_))));
    }

    #[test]
    fn ds_and_hb_examples() {
        let z4 = cyclic_model(4).unwrap();
        let h = z4.subgroup_biprojection(&[0, 2]).unwrap();
        let r = check_ds(&z4, &h).unwrap();
        assert_eq!(r.lhs, 4.0);
        assert!(r.equality);
        let g = Element::random(z4.a_plus(), RandomKind::Generic, 8);
        assert_eq!(check_ds(&z4, &g).unwrap().lhs, 16.0);
        let tl = tl_model(2f64.sqrt()).unwrap();
        let r = check_ds(&tl, tl.e1()).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12 && r.equality);
        let hb = check_hb(&z4, z4.e1()).unwrap();
        assert!(hb.equality && (hb.lhs - 2.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn norm1_comparison_examples() {
        let z4 = cyclic_model(4).unwrap();
        let r = check_norm1_comparison(z4.e1(), 3.0).unwrap();
        assert!(r.norms_equal && r.lower.equality);
        let id = Element::identity(z4.a_plus());
        let r = check_norm1_comparison(&id, 2.0).unwrap();
        assert!((r.lower.lhs - 2.0).abs() < 1e-14 && (r.upper.rhs - 4.0).abs() < 1e-14 && r.upper.equality);
        let z2 = cyclic_model(2).unwrap();
        let x = Element::from_real_values(z2.a_plus(), &[3.0, 4.0]).unwrap();
        let r = check_norm1_comparison(&x, 0.5).unwrap();
        let expect = 0.5 * (3f64.sqrt() + 2.0).powi(2);
        assert!((r.lower.lhs - expect).abs() < 1e-12 && r.lower.holds && r.upper.holds);
        assert!((r.upper.rhs - 2.0 * expect).abs() < 1e-12);
    }

    #[test]
    fn monotone_examples() {
        let z4 = cyclic_model(4).unwrap();
        let flat = Element::identity(z4.a_plus()).scale_real(0.25);
        let grid = [1.5, 2.0, 3.0, 5.0];
        let r = check_entropy_monotone(&flat, &grid).unwrap();
        assert!(r.holds && r.lhs <= 0.0);
        assert!(matches!(check_entropy_monotone(&flat, &[0.5, 1.5]), Err(Error::GridStraddlesOne)));
        let big = Element::identity(z4.a_plus()).scale_real(2.0);
        assert!(matches!(check_entropy_monotone(&big, &grid), Err(Error::NormTooLarge(_))));
    }

    #[test]
    fn unitary_line_examples() {
        let z3 = cyclic_model(3).unwrap();
        let u = z3.biunitary_quadratic(1, 0).unwrap();
        let r = check_unitary_line(&z3, &u, 4.0, UnitaryLine::Direct).unwrap();
        assert!(r.equality && (r.lhs - 3f64.sqrt()).abs() < 1e-12);
        let x = Element::from_real_values(z3.a_plus(), &[2.0, 1.0, 1.0]).unwrap();
        let r = check_unitary_line(&z3, &x, 4.0, UnitaryLine::Direct).unwrap();
        assert!(r.holds && !r.equality);
        let w = Element::from_values(z3.a_minus(), &[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0)]).unwrap();
        let pre = z3.fourier_inverse(&w).unwrap();
        let r = check_unitary_line(&z3, &pre, 1.5, UnitaryLine::Mirror).unwrap();
        assert!(r.equality, "{r:?}");
    }
}
