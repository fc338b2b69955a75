//! Finite-dimensional C*-algebras with unnormalized Markov traces.
//!
//! An algebra is a direct sum of full matrix blocks `M_{d_k}(C)`, each carrying
//! a positive trace weight `w_k`. The trace of `x` is `Σ_k w_k Tr(x_k)` and the
//! trace of the identity equals `δ²`. Schatten-type p-(quasi)norms, support
//! sizes and Rényi/von Neumann entropies are all computed from the weighted
//! singular spectrum of an element.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative singular-value cutoff for range projections and supports.
pub const RANK_EPS: f64 = 1e-9;
/// Default relative tolerance for equality checks.
pub const EQ_EPS: f64 = 1e-9;
/// Rényi orders closer than this to 1 are rejected.
pub const ORDER_ONE_GUARD: f64 = 1e-6;

/// `|a − b| ≤ eps·(1 + |a| + |b|)`.
pub fn approx_eq(a: f64, b: f64, eps: f64) -> bool {
    (a - b).abs() <= eps * (1.0 + a.abs() + b.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub dim: usize,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct MarkovAlgebra {
    id: String,
    blocks: Vec<BlockSpec>,
    delta: f64,
}

impl MarkovAlgebra {
    pub fn new(id: impl Into<String>, blocks: Vec<BlockSpec>, delta: f64) -> Result<Arc<Self>> {
        if blocks.is_empty() {
            return Err(Error::EmptyBlocks);
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::BadDelta(delta));
        }
        for (index, b) in blocks.iter().enumerate() {
            if b.dim == 0 {
                return Err(Error::ZeroDimension { index });
            }
            // Minimal projections must have trace at least one.
            if !(b.weight >= 1.0 - 1e-12) || !b.weight.is_finite() {
                return Err(Error::WeightBelowOne { index, weight: b.weight });
            }
        }
        let sum: f64 = blocks.iter().map(|b| b.weight * b.dim as f64).sum();
        let expected = delta * delta;
        if (sum - expected).abs() > 1e-9 * expected {
            return Err(Error::TraceMismatch { sum, expected });
        }
        Ok(Arc::new(Self { id: id.into(), blocks, delta }))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Complex dimension `Σ_k d_k²`.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|b| b.dim == 1)
    }

    pub fn same_as(&self, other: &MarkovAlgebra) -> bool {
        std::ptr::eq(self, other) || (self.id == other.id && self.blocks == other.blocks)
    }
}

/// Builds an anonymous algebra from `(dim, weight)` pairs.
pub fn make_algebra(blocks: &[(usize, f64)], delta: f64) -> Result<Arc<MarkovAlgebra>> {
    let specs = blocks.iter().map(|&(dim, weight)| BlockSpec { dim, weight }).collect();
    MarkovAlgebra::new("custom", specs, delta)
}

/// Weighted spectrum: a multiset of `(weight, value)` pairs.
///
/// For an element `x` the singular spectrum lists every singular value of every
/// block together with that block's trace weight, so `tr(f(|x|)) = Σ w·f(σ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    entries: Vec<(f64, f64)>,
    max: f64,
}

impl Spectrum {
    pub fn new(entries: Vec<(f64, f64)>) -> Self {
        let max = entries.iter().map(|e| e.1).fold(0.0, f64::max);
        Self { entries, max }
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    /// Spectrum of `f(|x|)` for the spectrum of `|x|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.entries.iter().map(|&(w, s)| (w, f(s))).collect())
    }

    /// `(Σ w σ^p)^{1/p}`, or the largest value for `p = ∞`.
    pub fn pnorm(&self, p: f64) -> f64 {
        if p == f64::INFINITY {
            return self.max;
        }
        if self.max == 0.0 {
            return 0.0;
        }
        // Factor out the largest value so large p cannot overflow.
        let sum: f64 = self
            .entries
            .iter()
            .filter(|e| e.1 > 0.0)
            .map(|&(w, s)| w * (s / self.max).powf(p))
            .sum();
        self.max * sum.powf(1.0 / p)
    }

    /// `log ‖·‖_p`, accurate for tiny and huge values.
    pub fn log_pnorm(&self, p: f64) -> f64 {
        if p == f64::INFINITY {
            return self.max.ln();
        }
        if self.max == 0.0 {
            return f64::NEG_INFINITY;
        }
        let sum: f64 = self
            .entries
            .iter()
            .filter(|e| e.1 > 0.0)
            .map(|&(w, s)| w * (s / self.max).powf(p))
            .sum();
        self.max.ln() + sum.ln() / p
    }

    /// Weighted count of values above `RANK_EPS·max`.
    pub fn support(&self) -> f64 {
        let cut = RANK_EPS * self.max;
        self.entries.iter().filter(|e| e.1 > cut && e.1 > 0.0).map(|e| e.0).sum()
    }

    /// `Σ w λ` over values.
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|&(w, s)| w * s).sum()
    }

    /// `−Σ w λ log λ` with `0·log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        -self
            .entries
            .iter()
            .filter(|e| e.1 > 0.0)
            .map(|&(w, s)| w * s * s.ln())
            .sum::<f64>()
    }
}

/// Eigen-decomposition of a self-adjoint element, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub blocks: Vec<SpectralBlock>,
}

#[derive(Debug, Clone)]
pub struct SpectralBlock {
    pub eigenvectors: DMatrix<C64>,
    pub eigenvalues: Vec<f64>,
}

impl SpectralData {
    pub fn reconstruct(&self, algebra: &Arc<MarkovAlgebra>) -> Element {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let d = DMatrix::from_diagonal(&DVector::from_iterator(
                    b.eigenvalues.len(),
                    b.eigenvalues.iter().map(|&l| C64::new(l, 0.0)),
                ));
                &b.eigenvectors * d * b.eigenvectors.adjoint()
            })
            .collect();
        Element { algebra: algebra.clone(), blocks }
    }

    /// All eigenvalues across blocks, weighted by block weight.
    pub fn spectrum(&self, algebra: &MarkovAlgebra) -> Spectrum {
        let mut entries = Vec::new();
        for (b, spec) in self.blocks.iter().zip(algebra.blocks()) {
            entries.extend(b.eigenvalues.iter().map(|&l| (spec.weight, l)));
        }
        Spectrum::new(entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyLimit {
    /// `p → 0`: `log S(x)`.
    MaxEntropy,
    /// `p → 1`: `−tr(|x| log |x|)/‖x‖_1`.
    VnLimit,
    /// `p → ∞`: `−log ‖x‖_∞`.
    MinEntropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    Generic,
    SelfAdjoint,
    Unitary,
    Projection,
    Positive,
}

#[derive(Debug, Clone)]
pub struct Element {
    algebra: Arc<MarkovAlgebra>,
    blocks: Vec<DMatrix<C64>>,
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.algebra.id())?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            if b.nrows() == 1 {
                let z = b[(0, 0)];
                write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
            } else {
                write!(f, "{}x{} block", b.nrows(), b.ncols())?;
            }
        }
        write!(f, "]")
    }
}

fn block_singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 1 {
        vec![m[(0, 0)].norm()]
    } else {
        m.clone().singular_values().iter().copied().collect()
    }
}

fn hermitian_eigen(m: &DMatrix<C64>) -> (DMatrix<C64>, Vec<f64>) {
    if m.nrows() == 1 {
        return (DMatrix::identity(1, 1), vec![m[(0, 0)].re]);
    }
    let eig = SymmetricEigen::new(m.clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vectors, values)
}

impl Element {
    pub fn from_blocks(algebra: &Arc<MarkovAlgebra>, blocks: Vec<DMatrix<C64>>) -> Result<Self> {
        if blocks.len() != algebra.blocks().len() {
            return Err(Error::ShapeMismatch {
                algebra: algebra.id().to_string(),
                detail: format!("expected {} blocks, got {}", algebra.blocks().len(), blocks.len()),
            });
        }
        for (k, (b, spec)) in blocks.iter().zip(algebra.blocks()).enumerate() {
            if b.nrows() != spec.dim || b.ncols() != spec.dim {
                return Err(Error::ShapeMismatch {
                    algebra: algebra.id().to_string(),
                    detail: format!(
                        "block {k} is {}x{}, expected {}x{}",
                        b.nrows(),
                        b.ncols(),
                        spec.dim,
                        spec.dim
                    ),
                });
            }
        }
        if blocks.iter().any(|b| b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(Self { algebra: algebra.clone(), blocks })
    }

    /// Element of a commutative algebra from its block values.
    pub fn from_values(algebra: &Arc<MarkovAlgebra>, values: &[C64]) -> Result<Self> {
        let blocks = values.iter().map(|&z| DMatrix::from_element(1, 1, z)).collect();
        Self::from_blocks(algebra, blocks)
    }

    pub fn from_real_values(algebra: &Arc<MarkovAlgebra>, values: &[f64]) -> Result<Self> {
        let v: Vec<C64> = values.iter().map(|&r| C64::new(r, 0.0)).collect();
        Self::from_values(algebra, &v)
    }

    pub fn zeros(algebra: &Arc<MarkovAlgebra>) -> Self {
        let blocks = algebra.blocks().iter().map(|b| DMatrix::zeros(b.dim, b.dim)).collect();
        Self { algebra: algebra.clone(), blocks }
    }

    pub fn identity(algebra: &Arc<MarkovAlgebra>) -> Self {
        let blocks = algebra.blocks().iter().map(|b| DMatrix::identity(b.dim, b.dim)).collect();
        Self { algebra: algebra.clone(), blocks }
    }

    /// Identity of block `k`, zero elsewhere.
    pub fn block_unit(algebra: &Arc<MarkovAlgebra>, k: usize) -> Self {
        let mut x = Self::zeros(algebra);
        let d = algebra.blocks()[k].dim;
        x.blocks[k] = DMatrix::identity(d, d);
        x
    }

    /// Matrix unit `E_{ij}` inside block `k`.
    pub fn matrix_unit(algebra: &Arc<MarkovAlgebra>, k: usize, i: usize, j: usize) -> Self {
        let mut x = Self::zeros(algebra);
        x.blocks[k][(i, j)] = C64::new(1.0, 0.0);
        x
    }

    pub fn algebra(&self) -> &Arc<MarkovAlgebra> {
        &self.algebra
    }

    pub fn blocks(&self) -> &[DMatrix<C64>] {
        &self.blocks
    }

    /// Block values of an element of a commutative algebra.
    pub fn values(&self) -> Vec<C64> {
        self.blocks.iter().map(|b| b[(0, 0)]).collect()
    }

    /// Row-major concatenation of all block entries.
    pub fn to_flat(&self) -> DVector<C64> {
        let mut out = Vec::with_capacity(self.algebra.dimension());
        for b in &self.blocks {
            for r in 0..b.nrows() {
                for c in 0..b.ncols() {
                    out.push(b[(r, c)]);
                }
            }
        }
        DVector::from_vec(out)
    }

    pub fn from_flat(algebra: &Arc<MarkovAlgebra>, flat: &[C64]) -> Result<Self> {
        if flat.len() != algebra.dimension() {
            return Err(Error::ShapeMismatch {
                algebra: algebra.id().to_string(),
                detail: format!("flat length {} != {}", flat.len(), algebra.dimension()),
            });
        }
        let mut offset = 0;
        let mut blocks = Vec::with_capacity(algebra.blocks().len());
        for spec in algebra.blocks() {
            let d = spec.dim;
            blocks.push(DMatrix::from_row_slice(d, d, &flat[offset..offset + d * d]));
            offset += d * d;
        }
        Self::from_blocks(algebra, blocks)
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if self.algebra.same_as(&other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch {
                left: self.algebra.id().to_string(),
                right: other.algebra.id().to_string(),
            })
        }
    }

    fn zip_with(
        &self,
        other: &Element,
        f: impl Fn(&DMatrix<C64>, &DMatrix<C64>) -> DMatrix<C64>,
    ) -> Result<Element> {
        self.check_same(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Ok(Element { algebra: self.algebra.clone(), blocks })
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: C64) -> Element {
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Element {
        self.scale(C64::new(c, 0.0))
    }

    pub fn adjoint(&self) -> Element {
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// `x* x`, i.e. `|x|²`.
    pub fn abs_squared(&self) -> Element {
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint() * b).collect(),
        }
    }

    /// `|x| = (x* x)^{1/2}`.
    pub fn abs(&self) -> Element {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                if b.nrows() == 1 {
                    return DMatrix::from_element(1, 1, C64::new(b[(0, 0)].norm(), 0.0));
                }
                let (v, l) = hermitian_eigen(&(b.adjoint() * b));
                let d = DMatrix::from_diagonal(&DVector::from_iterator(
                    l.len(),
                    l.iter().map(|&x| C64::new(x.max(0.0).sqrt(), 0.0)),
                ));
                &v * d * v.adjoint()
            })
            .collect();
        Element { algebra: self.algebra.clone(), blocks }
    }

    /// Markov trace `Σ_k w_k Tr(x_k)`.
    pub fn trace(&self) -> C64 {
        self.blocks
            .iter()
            .zip(self.algebra.blocks())
            .map(|(b, s)| b.trace() * s.weight)
            .sum()
    }

    /// Weighted singular spectrum, i.e. the spectrum of `|x|`.
    pub fn singular_spectrum(&self) -> Spectrum {
        let mut entries = Vec::with_capacity(self.algebra.dimension());
        for (b, s) in self.blocks.iter().zip(self.algebra.blocks()) {
            entries.extend(block_singular_values(b).into_iter().map(|v| (s.weight, v)));
        }
        Spectrum::new(entries)
    }

    /// `‖x‖_p = tr(|x|^p)^{1/p}`; quasi-norm for `p < 1`; `p = ∞` is the operator norm.
    pub fn pnorm(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::NonPositiveP(p));
        }
        Ok(self.singular_spectrum().pnorm(p))
    }

    pub fn norm_inf(&self) -> f64 {
        self.singular_spectrum().max()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|z| *z == C64::new(0.0, 0.0)))
    }

    /// Largest entrywise modulus.
    pub fn max_entry(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Element) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    pub fn self_adjoint_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint()) / (1.0 + self.max_entry())
    }

    pub fn spectral(&self) -> Result<SpectralData> {
        let dev = self.self_adjoint_deviation();
        if dev > 1e-10 {
            return Err(Error::NotSelfAdjoint(dev));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let h = (b + b.adjoint()) * C64::new(0.5, 0.0);
                let (eigenvectors, eigenvalues) = hermitian_eigen(&h);
                SpectralBlock { eigenvectors, eigenvalues }
            })
            .collect();
        Ok(SpectralData { blocks })
    }

    /// Projection onto the span of left singular vectors with `σ > RANK_EPS·σ_max`.
    pub fn range_projection(&self) -> Element {
        let smax = self.norm_inf();
        let cut = RANK_EPS * smax;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let d = b.nrows();
                if smax == 0.0 {
                    return DMatrix::zeros(d, d);
                }
                if d == 1 {
                    let v = if b[(0, 0)].norm() > cut { 1.0 } else { 0.0 };
                    return DMatrix::from_element(1, 1, C64::new(v, 0.0));
                }
                let svd = b.clone().svd(true, false);
                let u = svd.u.expect("left singular vectors requested");
                let mut proj = DMatrix::zeros(d, d);
                for (i, &s) in svd.singular_values.iter().enumerate() {
                    if s > cut {
                        let col = u.column(i);
                        proj += &col * col.adjoint();
                    }
                }
                proj
            })
            .collect();
        Element { algebra: self.algebra.clone(), blocks }
    }

    /// `S(x) = tr(R(x))`.
    pub fn support(&self) -> f64 {
        self.singular_spectrum().support()
    }

    /// `h_p(x) = p/(1−p)·log ‖x‖_p`.
    pub fn renyi_entropy(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::NonPositiveP(p));
        }
        if (p - 1.0).abs() <= ORDER_ONE_GUARD {
            return Err(Error::PTooCloseToOne(p));
        }
        let spec = self.singular_spectrum();
        if spec.max() == 0.0 {
            return Err(Error::ZeroElement);
        }
        if p == f64::INFINITY {
            return Ok(-spec.max().ln());
        }
        Ok(p / (1.0 - p) * spec.log_pnorm(p))
    }

    /// `H(x) = −tr(x log x)` for positive semidefinite `x`.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        let sd = self.spectral().map_err(|e| match e {
            Error::NotSelfAdjoint(d) => Error::NotPositive(-d),
            other => other,
        })?;
        let spec = sd.spectrum(&self.algebra);
        let min = spec.entries().iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
        let scale = spec.entries().iter().map(|e| e.1.abs()).fold(0.0, f64::max);
        if min < -1e-10 * (1.0 + scale) {
            return Err(Error::NotPositive(min));
        }
        Ok(spec.map(|l| l.max(0.0)).entropy())
    }

    pub fn entropy_limit(&self, which: EntropyLimit) -> Result<f64> {
        let spec = self.singular_spectrum();
        if spec.max() == 0.0 {
            return Err(Error::ZeroElement);
        }
        Ok(match which {
            EntropyLimit::MaxEntropy => spec.support().ln(),
            EntropyLimit::VnLimit => spec.entropy() / spec.total(),
            EntropyLimit::MinEntropy => -spec.max().ln(),
        })
    }

    /// Deterministic random element of the requested kind.
    pub fn random(algebra: &Arc<MarkovAlgebra>, kind: RandomKind, seed: u64) -> Element {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(algebra, kind, &mut rng)
    }

    pub fn random_with<R: rand::Rng + ?Sized>(
        algebra: &Arc<MarkovAlgebra>,
        kind: RandomKind,
        rng: &mut R,
    ) -> Element {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut gauss = |d: usize| {
            DMatrix::from_fn(d, d, |_, _| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re * s, im * s)
            })
        };
        let generic: Vec<DMatrix<C64>> = algebra.blocks().iter().map(|b| gauss(b.dim)).collect();
        let blocks = match kind {
            RandomKind::Generic => generic,
            RandomKind::SelfAdjoint => generic
                .into_iter()
                .map(|g| (&g + g.adjoint()) * C64::new(0.5, 0.0))
                .collect(),
            RandomKind::Positive => generic.into_iter().map(|g| g.adjoint() * &g).collect(),
            RandomKind::Unitary => generic
                .into_iter()
                .map(|g| {
                    let d = g.nrows();
                    if d == 1 {
                        let z = g[(0, 0)];
                        return DMatrix::from_element(1, 1, z / z.norm());
                    }
                    let qr = g.qr();
                    let (q, r) = (qr.q(), qr.r());
                    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
                        d,
                        (0..d).map(|i| {
                            let z = r[(i, i)];
                            if z.norm() > 0.0 {
                                z / z.norm()
                            } else {
                                C64::new(1.0, 0.0)
                            }
                        }),
                    ));
                    q * phases
                })
                .collect(),
            RandomKind::Projection => {
                let herm: Vec<DMatrix<C64>> = generic
                    .into_iter()
                    .map(|g| (&g + g.adjoint()) * C64::new(0.5, 0.0))
                    .collect();
                let eigs: Vec<_> = herm.iter().map(hermitian_eigen).collect();
                let mut all: Vec<f64> = eigs.iter().flat_map(|e| e.1.iter().copied()).collect();
                all.sort_by(f64::total_cmp);
                let median = all[all.len() / 2];
                eigs.iter()
                    .map(|(v, l)| {
                        let d = l.len();
                        let mut proj = DMatrix::zeros(d, d);
                        for (i, &li) in l.iter().enumerate() {
                            if li >= median {
                                let col = v.column(i);
                                proj += &col * col.adjoint();
                            }
                        }
                        proj
                    })
                    .collect()
            }
        };
        Element { algebra: algebra.clone(), blocks }
    }

    pub fn to_doc(&self) -> ElementDoc {
        ElementDoc {
            algebra_id: self.algebra.id().to_string(),
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    (0..b.nrows())
                        .map(|r| (0..b.ncols()).map(|c| [b[(r, c)].re, b[(r, c)].im]).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &ElementDoc, algebra: &Arc<MarkovAlgebra>) -> Result<Element> {
        if doc.algebra_id != algebra.id() {
            return Err(Error::AlgebraMismatch {
                left: doc.algebra_id.clone(),
                right: algebra.id().to_string(),
            });
        }
        let mut blocks = Vec::with_capacity(doc.blocks.len());
        for (k, rows) in doc.blocks.iter().enumerate() {
            let d = rows.len();
            if rows.iter().any(|r| r.len() != d) {
                return Err(Error::ShapeMismatch {
                    algebra: algebra.id().to_string(),
                    detail: format!("block {k} is not square"),
                });
            }
            blocks.push(DMatrix::from_fn(d, d, |r, c| C64::new(rows[r][c][0], rows[r][c][1])));
        }
        Element::from_blocks(algebra, blocks)
    }

    /// Short stable fingerprint of the algebra id and entries.
    pub fn hash_hex(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.algebra.id().as_bytes());
        for b in &self.blocks {
            for z in b.iter() {
                h.update(z.re.to_le_bytes());
                h.update(z.im.to_le_bytes());
            }
        }
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Text form of an element: algebra id plus row-major blocks of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementDoc {
    pub algebra_id: String,
    pub blocks: Vec<Vec<Vec<[f64; 2]>>>,
}

impl ElementDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("element document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l_inf(n: usize) -> Arc<MarkovAlgebra> {
        let blocks = vec![BlockSpec { dim: 1, weight: 1.0 }; n];
        MarkovAlgebra::new(format!("linf{n}"), blocks, (n as f64).sqrt()).unwrap()
    }

    fn s3_dual() -> Arc<MarkovAlgebra> {
        make_algebra(&[(1, 1.0), (1, 1.0), (2, 2.0)], 6f64.sqrt()).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn make_algebra_validation() {
        assert!(make_algebra(&[(1, 1.0), (1, 1.0)], 2f64.sqrt()).is_ok());
        assert!(make_algebra(&[(1, 1.0), (1, 1.0), (2, 2.0)], 6f64.sqrt()).is_ok());
        assert!(matches!(
            make_algebra(&[(1, 1.0), (1, 0.5)], 1.5f64.sqrt()),
            Err(Error::WeightBelowOne { index: 1, .. })
        ));
        assert!(matches!(make_algebra(&[(1, 1.0), (1, 1.0)], 2.0), Err(Error::TraceMismatch { .. })));
        assert_eq!(make_algebra(&[], 1.0).unwrap_err(), Error::EmptyBlocks);
    }

    #[test]
    fn traces() {
        let a = l_inf(3);
        let x = Element::from_real_values(&a, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x.trace(), c(6.0, 0.0));
        let b = s3_dual();
        assert!((Element::identity(&b).trace().re - 6.0).abs() < 1e-14);
    }

    #[test]
    fn arithmetic_and_abs() {
        let a = l_inf(2);
        let x = Element::from_real_values(&a, &[-3.0, 4.0]).unwrap();
        assert_eq!(x.abs().values(), vec![c(3.0, 0.0), c(4.0, 0.0)]);
        let b = s3_dual();
        let y = Element::random(&b, RandomKind::Generic, 3);
        assert_eq!(y.adjoint().adjoint().max_abs_diff(&y), 0.0);
        let u = Element::random(&b, RandomKind::Unitary, 4);
        assert!(u.abs().max_abs_diff(&Element::identity(&b)) < 1e-12);
        let ay = y.abs();
        assert!((ay.pnorm(2.0).unwrap() - y.pnorm(2.0).unwrap()).abs() < 1e-12);
        let other = l_inf(4);
        assert!(matches!(x.add(&Element::identity(&other)), Err(Error::AlgebraMismatch { .. })));
    }

    #[test]
    fn pnorm_values() {
        let a = l_inf(2);
        let x = Element::from_real_values(&a, &[3.0, 4.0]).unwrap();
        assert!((x.pnorm(2.0).unwrap() - 5.0).abs() < 1e-14);
        assert!((x.pnorm(1.0).unwrap() - 7.0).abs() < 1e-14);
        assert_eq!(x.pnorm(f64::INFINITY).unwrap(), 4.0);
        let h = Element::from_real_values(&a, &[0.5, 0.5]).unwrap();
        assert!((h.pnorm(0.5).unwrap() - 2.0).abs() < 1e-14);
        assert!(matches!(x.pnorm(0.0), Err(Error::NonPositiveP(_))));
        let b = s3_dual();
        for p in [0.5, 1.0, 3.0] {
            let expect = 6f64.powf(1.0 / p);
            assert!((Element::identity(&b).pnorm(p).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_examples() {
        let a = make_algebra(&[(2, 1.0)], 2f64.sqrt()).unwrap();
        let d = Element::from_blocks(
            &a,
            vec![DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])],
        )
        .unwrap();
        assert_eq!(d.spectral().unwrap().blocks[0].eigenvalues, vec![2.0, 1.0]);
        let swap = Element::from_blocks(
            &a,
            vec![DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])],
        )
        .unwrap();
        let ev = &swap.spectral().unwrap().blocks[0].eigenvalues;
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] + 1.0).abs() < 1e-14);
        let x = Element::from_real_values(&l_inf(2), &[3.0, -4.0]).unwrap();
        let sd = x.abs().spectral().unwrap();
        let mut all: Vec<f64> = sd.blocks.iter().flat_map(|b| b.eigenvalues.clone()).collect();
        all.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(all, vec![4.0, 3.0]);
        let g = Element::random(&a, RandomKind::Generic, 1);
        assert!(matches!(g.spectral(), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn spectral_reconstruction_and_unitarity() {
        let b = s3_dual();
        for seed in 0..20 {
            let x = Element::random(&b, RandomKind::SelfAdjoint, seed);
            let sd = x.spectral().unwrap();
            let back = sd.reconstruct(&b);
            assert!(back.max_abs_diff(&x) <= 1e-10 * (1.0 + x.max_entry()));
            for blk in &sd.blocks {
                let v = &blk.eigenvectors;
                let err = (v.adjoint() * v - DMatrix::identity(v.nrows(), v.ncols())).norm();
                assert!(err < 1e-10);
            }
        }
    }

    #[test]
    fn range_projection_and_support() {
        let a = l_inf(2);
        let x = Element::from_real_values(&a, &[0.5, 0.0]).unwrap();
        assert_eq!(x.range_projection().values(), vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(Element::zeros(&a).range_projection().values(), vec![c(0.0, 0.0); 2]);
        assert_eq!(Element::zeros(&a).support(), 0.0);
        let four = l_inf(4);
        let ind = Element::from_real_values(&four, &[1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(ind.support(), 2.0);
        let b = s3_dual();
        assert!((Element::identity(&b).support() - 6.0).abs() < 1e-12);
        let g = Element::random(&b, RandomKind::Generic, 5);
        assert!(g.range_projection().max_abs_diff(&Element::identity(&b)) < 1e-10);
        let p = Element::random(&b, RandomKind::Projection, 6);
        let r = p.range_projection();
        assert!(r.max_abs_diff(&p) < 1e-10);
        assert!(r.mul(&r).unwrap().max_abs_diff(&r) < 1e-10);
    }

    #[test]
    fn entropies() {
        let a = l_inf(2);
        let half = Element::from_real_values(&a, &[0.5, 0.5]).unwrap();
        let ln2 = 2f64.ln();
        assert!((half.renyi_entropy(2.0).unwrap() - ln2).abs() < 1e-14);
        assert!((half.von_neumann_entropy().unwrap() - ln2).abs() < 1e-14);
        assert!((half.entropy_limit(EntropyLimit::MaxEntropy).unwrap() - ln2).abs() < 1e-14);
        assert!((half.entropy_limit(EntropyLimit::VnLimit).unwrap() - ln2).abs() < 1e-14);
        let proj = Element::from_real_values(&a, &[1.0, 0.0]).unwrap();
        assert_eq!(proj.von_neumann_entropy().unwrap(), 0.0);
        for p in [0.3, 0.7, 1.5, 4.0] {
            assert!(proj.renyi_entropy(p).unwrap().abs() < 1e-14);
        }
        let b = s3_dual();
        let delta = b.delta();
        let flat = Element::identity(&b).scale_real(delta.powi(-2));
        for p in [0.25, 0.5, 2.0, 3.0] {
            assert!((flat.renyi_entropy(p).unwrap() - 2.0 * delta.ln()).abs() < 1e-12);
        }
        assert!((flat.von_neumann_entropy().unwrap() - 2.0 * delta.ln()).abs() < 1e-12);
        let u = Element::random(&b, RandomKind::Unitary, 2);
        assert!(u.entropy_limit(EntropyLimit::MinEntropy).unwrap().abs() < 1e-12);
        assert!(matches!(half.renyi_entropy(1.0 + 1e-7), Err(Error::PTooCloseToOne(_))));
        assert!(matches!(Element::zeros(&a).renyi_entropy(2.0), Err(Error::ZeroElement)));
        let neg = Element::from_real_values(&a, &[-0.5, 0.5]).unwrap();
        assert!(matches!(neg.von_neumann_entropy(), Err(Error::NotPositive(_))));
    }

    #[test]
    fn random_kinds() {
        let b = s3_dual();
        for kind in [
            RandomKind::Generic,
            RandomKind::SelfAdjoint,
            RandomKind::Unitary,
            RandomKind::Projection,
            RandomKind::Positive,
        ] {
            let x = Element::random(&b, kind, 42);
            let y = Element::random(&b, kind, 42);
            assert_eq!(x.to_flat(), y.to_flat());
        }
        let p = Element::random(&b, RandomKind::Projection, 9);
        assert!(p.mul(&p).unwrap().max_abs_diff(&p) < 1e-10);
        let u = Element::random(&b, RandomKind::Unitary, 9);
        assert!(u.abs().max_abs_diff(&Element::identity(&b)) < 1e-10);
    }

    #[test]
    fn doc_round_trip_and_shape_errors() {
        let b = s3_dual();
        let x = Element::random(&b, RandomKind::Generic, 11);
        let doc = ElementDoc::from_json(&x.to_doc().to_json()).unwrap();
        let back = Element::from_doc(&doc, &b).unwrap();
        assert_eq!(back.to_flat(), x.to_flat());
        let mut bad = doc.clone();
        bad.blocks.pop();
        assert!(matches!(Element::from_doc(&bad, &b), Err(Error::ShapeMismatch { .. })));
    }
}
