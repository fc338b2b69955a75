//! Numerical estimation of `C_{p,q} = sup ‖F x‖_q / ‖x‖_p`, grid sweeps,
//! the Young constant, and an empirical audit of the second entropic principle.
//!
//! The optimizer works on the flattened complex coordinates of an element,
//! treated as real and imaginary parts with the Euclidean metric.

use std::collections::HashSet;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, MarkovAlgebra, RandomKind, C64};
use crate::error::{Error, Result};
use crate::extremizers::{classify, FamilyLabel, CLASSIFY_TOL, TABLE};
use crate::inequalities::{k_exponent, recip, up2_regime, Evaluated, RegionPoint};
use crate::models::{coprime, ModelKind, PlanarModel, Sector, Side};
use crate::records::{SweepRow, ValidityRow};
use crate::transform::conv;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub initial_step: f64,
    /// Relative objective change regarded as converged...
    pub rel_tol: f64,
    /// ...when sustained over this many iterations.
    pub window: usize,
    pub eps_smooth: f64,
    pub polish_sweeps: usize,
    pub seed: u64,
    pub sector: Sector,
    pub use_candidates: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_iters: 2000,
            initial_step: 0.1,
            rel_tol: 1e-10,
            window: 10,
            eps_smooth: 1e-12,
            polish_sweeps: 50,
            seed: 0,
            sector: Sector::Plus,
            use_candidates: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::ConfigInvalid(m.to_string()));
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if self.max_iters == 0 || self.window == 0 {
            return bad("max_iters and window must be positive");
        }
        if !(self.initial_step > 0.0 && self.rel_tol > 0.0 && self.eps_smooth >= 0.0) {
            return bad("step, tolerance and smoothing must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartTrace {
    pub iterations: usize,
    pub converged: bool,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub point: RegionPoint,
    pub best_ratio: f64,
    /// Normalized to `‖x‖_p = 1`.
    pub best_element: Element,
    pub classification: FamilyLabel,
    pub k_reference: f64,
    pub gap: f64,
    pub from_candidate: bool,
    pub restarts: Vec<RestartTrace>,
}

impl SearchResult {
    pub fn converged_count(&self) -> usize {
        self.restarts.iter().filter(|r| r.converged).count()
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for restart `b` of grid point `a` under base seed `seed`.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    splitmix(seed ^ splitmix(a.wrapping_mul(0x1000_0001) ^ splitmix(b)))
}

fn layout(alg: &MarkovAlgebra) -> Vec<(usize, f64, usize)> {
    let mut off = 0;
    alg.blocks()
        .iter()
        .map(|b| {
            let e = (b.dim, b.weight, off);
            off += b.dim * b.dim;
            e
        })
        .collect()
}

fn block_of(flat: &DVector<C64>, d: usize, off: usize) -> DMatrix<C64> {
    DMatrix::from_row_slice(d, d, &flat.as_slice()[off..off + d * d])
}

fn write_block(out: &mut DVector<C64>, m: &DMatrix<C64>, off: usize) {
    let d = m.nrows();
    for r in 0..d {
        for c in 0..d {
            out[off + r * d + c] = m[(r, c)];
        }
    }
}

/// Smoothed `log ‖X‖_p` and its gradient in real coordinates, packed as a
/// complex vector `∂/∂Re + i ∂/∂Im`.
fn log_norm_grad(lay: &[(usize, f64, usize)], flat: &DVector<C64>, p: f64, eps: f64) -> (f64, DVector<C64>) {
    let mut grad = DVector::zeros(flat.len());
    if p == f64::INFINITY {
        let mut triples = Vec::new();
        let mut smax = 0.0f64;
        for &(d, _, off) in lay {
            if d == 1 {
                let z = flat[off];
                smax = smax.max(z.norm());
                triples.push((off, z.norm(), None));
            } else {
                let svd = block_of(flat, d, off).svd(true, true);
                let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
                for (i, &s) in svd.singular_values.iter().enumerate() {
                    smax = smax.max(s);
                    triples.push((off, s, Some(u.column(i) * vt.row(i))));
                }
            }
        }
        if smax == 0.0 {
            return (f64::NEG_INFINITY, grad);
        }
        let top: Vec<_> = triples.into_iter().filter(|t| t.1 >= smax * (1.0 - 1e-9)).collect();
        let w = 1.0 / (top.len() as f64 * smax);
        for (off, _, outer) in top {
            match outer {
                None => {
                    let z = flat[off];
                    grad[off] += z / z.norm() * w;
                }
                Some(m) => {
                    let d = m.nrows();
                    for r in 0..d {
                        for c in 0..d {
                            grad[off + r * d + c] += m[(r, c)] * w;
                        }
                    }
                }
            }
        }
        return (smax.ln(), grad);
    }
    let mut total = 0.0;
    for &(d, w, off) in lay {
        if d == 1 {
            let z = flat[off];
            let t = z.norm_sqr() + eps;
            total += w * t.powf(p / 2.0);
            grad[off] = z * (w * t.powf(p / 2.0 - 1.0));
        } else {
            let svd = block_of(flat, d, off).svd(true, true);
            let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
            let mut g = DMatrix::<C64>::zeros(d, d);
            for (i, &s) in svd.singular_values.iter().enumerate() {
                let t = s * s + eps;
                total += w * t.powf(p / 2.0);
                let coef = w * s * t.powf(p / 2.0 - 1.0);
                g += u.column(i) * vt.row(i) * C64::new(coef, 0.0);
            }
            write_block(&mut grad, &g, off);
        }
    }
    if total == 0.0 {
        return (f64::NEG_INFINITY, grad);
    }
    grad /= C64::new(total, 0.0);
    (total.ln() / p, grad)
}

/// `x ↦ log ‖M x‖_q − log ‖x‖_p` between two algebras.
#[derive(Debug, Clone)]
pub struct RatioProblem {
    src: Arc<MarkovAlgebra>,
    dst: Arc<MarkovAlgebra>,
    src_layout: Vec<(usize, f64, usize)>,
    dst_layout: Vec<(usize, f64, usize)>,
    m: DMatrix<C64>,
    mh: DMatrix<C64>,
    p: f64,
    q: f64,
    eps: f64,
}

impl RatioProblem {
    pub fn new(src: &Arc<MarkovAlgebra>, dst: &Arc<MarkovAlgebra>, m: DMatrix<C64>, p: f64, q: f64, eps: f64) -> Self {
        Self {
            src_layout: layout(src),
            dst_layout: layout(dst),
            src: src.clone(),
            dst: dst.clone(),
            mh: m.adjoint(),
            m,
            p,
            q,
            eps,
        }
    }

    /// The transform leaving `sector` of `model`.
    pub fn for_model(model: &PlanarModel, sector: Sector, p: f64, q: f64, eps: f64) -> Self {
        let (m, other) = match sector {
            Sector::Plus => (model.forward_matrix().clone(), Sector::Minus),
            Sector::Minus => (model.backward_matrix().clone(), Sector::Plus),
        };
        Self::new(model.algebra(sector), model.algebra(other), m, p, q, eps)
    }

    pub fn dimension(&self) -> usize {
        self.m.ncols()
    }

    pub fn smoothed(&self, x: &DVector<C64>) -> f64 {
        self.smoothed_grad(x).0
    }

    pub fn smoothed_grad(&self, x: &DVector<C64>) -> (f64, DVector<C64>) {
        let y = &self.m * x;
        let (fy, gy) = log_norm_grad(&self.dst_layout, &y, self.q, self.eps);
        let (fx, gx) = log_norm_grad(&self.src_layout, x, self.p, self.eps);
        (fy - fx, &self.mh * gy - gx)
    }

    /// Unsmoothed ratio `‖M x‖_q / ‖x‖_p`.
    pub fn exact_ratio(&self, x: &DVector<C64>) -> f64 {
        let ex = Element::from_flat(&self.src, x.as_slice()).expect("layout matches");
        let ey = Element::from_flat(&self.dst, (&self.m * x).as_slice()).expect("layout matches");
        let num = ey.singular_spectrum().log_pnorm(self.q);
        let den = ex.singular_spectrum().log_pnorm(self.p);
        (num - den).exp()
    }

    fn exact_log(&self, x: &DVector<C64>) -> f64 {
        self.exact_ratio(x).ln()
    }

    /// Gradient ascent with backtracking, then a coordinate pattern polish on
    /// the unsmoothed objective.
    pub fn ascend(&self, x0: &DVector<C64>, cfg: &SearchConfig) -> (DVector<C64>, RestartTrace) {
        let mut x = x0.normalize();
        let (mut f, mut g) = self.smoothed_grad(&x);
        let mut step = cfg.initial_step;
        let mut history = vec![f];
        let mut converged = false;
        let mut iterations = 0;
        while iterations < cfg.max_iters {
            iterations += 1;
            let gn2 = g.norm_squared();
            if !(gn2 > 0.0) || !f.is_finite() {
                converged = true;
                break;
            }
            let mut accepted = None;
            while step > 1e-14 {
                let trial = (&x + &g * C64::new(step, 0.0)).normalize();
                let ft = self.smoothed(&trial);
                if ft >= f + 1e-4 * step * gn2 {
                    accepted = Some(trial);
                    break;
                }
                step *= 0.5;
            }
            let Some(next) = accepted else {
                converged = true;
                break;
            };
            x = next;
            let (nf, ng) = self.smoothed_grad(&x);
            f = nf;
            g = ng;
            step = (step * 2.0).min(1e3);
            history.push(f);
            let n = history.len();
            if n > cfg.window && (f - history[n - 1 - cfg.window]).abs() <= cfg.rel_tol * f.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        let x = self.polish(x, cfg.polish_sweeps);
        let ratio = self.exact_ratio(&x);
        (x, RestartTrace { iterations, converged, ratio })
    }

    fn polish(&self, mut x: DVector<C64>, sweeps: usize) -> DVector<C64> {
        let mut f = self.exact_log(&x);
        let mut h = 1e-3;
        for _ in 0..sweeps {
            let mut improved = false;
            for i in 0..x.len() {
                for dir in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
                    let mut t = x.clone();
                    t[i] += dir * h;
                    let t = t.normalize();
                    let ft = self.exact_log(&t);
                    if ft > f {
                        x = t;
                        f = ft;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                h *= 0.25;
                if h < 1e-12 {
                    break;
                }
            }
        }
        x
    }
}

fn random_start(alg: &Arc<MarkovAlgebra>, restart: usize, rng: &mut ChaCha8Rng) -> DVector<C64> {
    let kind = match restart % 4 {
        0 | 1 => RandomKind::Generic,
        2 => RandomKind::Unitary,
        _ => RandomKind::Positive,
    };
    let mut v = Element::random_with(alg, kind, rng).to_flat();
    if restart % 4 == 1 {
        // sparse start
        let keep: Vec<bool> = (0..v.len()).map(|_| rng.random_bool(0.5)).collect();
        if keep.iter().any(|&k| k) {
            for (z, k) in v.iter_mut().zip(keep) {
                if !k {
                    *z = C64::new(0.0, 0.0);
                }
            }
        }
    }
    v
}

fn push_unique(out: &mut Vec<Element>, seen: &mut HashSet<String>, x: Element) {
    if !x.is_zero() && seen.insert(x.hash_hex()) {
        out.push(x);
    }
}

/// Constructible members of every named family, in both sectors.
pub fn family_elements(model: &PlanarModel) -> Vec<Element> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for sector in [Sector::Plus, Sector::Minus] {
        let alg = model.algebra(sector);
        for (k, b) in alg.blocks().iter().enumerate() {
            for i in 0..b.dim {
                push_unique(&mut out, &mut seen, Element::matrix_unit(alg, k, i, i));
            }
            push_unique(&mut out, &mut seen, Element::block_unit(alg, k));
        }
        push_unique(&mut out, &mut seen, Element::identity(alg));
    }
    push_unique(&mut out, &mut seen, model.e1().clone());
    if let Some(table) = model.group().cloned() {
        let n = table.order();
        for g in 0..n {
            if let Ok(x) = model.point_mass(g) {
                push_unique(&mut out, &mut seen, x);
            }
        }
        let subgroups = table.subgroups();
        if model.is_abelian_group() {
            for j in 0..n {
                if let Ok(x) = model.character(j) {
                    push_unique(&mut out, &mut seen, x);
                }
            }
            for h in &subgroups {
                for g in 0..n {
                    for chi in 0..n {
                        if let Ok(x) = model.bishift_element(h, g, chi) {
                            push_unique(&mut out, &mut seen, x);
                        }
                    }
                }
            }
        } else {
            for (k, rep) in table.irreps.iter().enumerate() {
                for a in 0..rep.dim {
                    for b in 0..rep.dim {
                        if let Ok(x) = model.matrix_coefficient(k, a, b) {
                            push_unique(&mut out, &mut seen, x);
                        }
                    }
                }
            }
            for h in &subgroups {
                for g in 0..n {
                    for side in [Side::Left, Side::Right] {
                        if let Ok(x) = model.coset_shift(h, g, side) {
                            push_unique(&mut out, &mut seen, x);
                        }
                    }
                }
            }
        }
        if let ModelKind::Cyclic { n } = *model.kind() {
            for lambda in 1..(n as i64) {
                if !coprime(lambda as usize, n) {
                    continue;
                }
                for mu in 0..(n as i64) {
                    if let Ok(x) = model.biunitary_quadratic(lambda, mu) {
                        push_unique(&mut out, &mut seen, x);
                    }
                }
            }
        }
    }
    if model.is_tl() {
        for s in [1, -1] {
            if let Ok(x) = model.tl_biunitary(s) {
                push_unique(&mut out, &mut seen, x);
            }
        }
    }
    let images: Vec<Element> = out.iter().filter_map(|x| model.fourier(x).ok()).collect();
    for y in images {
        push_unique(&mut out, &mut seen, y);
    }
    out
}

/// Family members living in `sector`, including transforms of members of the
/// other sector. The candidate set does not depend on `(p, q)`.
pub fn structured_candidates(model: &PlanarModel, sector: Sector) -> Vec<Element> {
    family_elements(model).into_iter().filter(|x| model.sector_of(x) == Some(sector)).collect()
}

fn best_candidate(problem: &RatioProblem, candidates: &[Element]) -> Option<(f64, DVector<C64>)> {
    let mut best: Option<(f64, DVector<C64>)> = None;
    for c in candidates {
        let v = c.to_flat();
        let r = problem.exact_ratio(&v);
        if r.is_finite() && best.as_ref().is_none_or(|b| r > b.0) {
            best = Some((r, v));
        }
    }
    best
}

pub fn maximize_ratio(model: &PlanarModel, p: f64, q: f64, cfg: &SearchConfig) -> Result<SearchResult> {
    maximize_ratio_at(model, p, q, cfg, 0)
}

fn maximize_ratio_at(model: &PlanarModel, p: f64, q: f64, cfg: &SearchConfig, grid_index: u64) -> Result<SearchResult> {
    cfg.validate()?;
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::ConfigInvalid(format!("exponents must be positive, got p={p}, q={q}")));
    }
    let problem = RatioProblem::for_model(model, cfg.sector, p, q, cfg.eps_smooth);
    let alg = model.algebra(cfg.sector).clone();
    let runs: Vec<(DVector<C64>, RestartTrace)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, grid_index, r as u64));
            let x0 = random_start(&alg, r, &mut rng);
            problem.ascend(&x0, cfg)
        })
        .collect();
    let mut best_i = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.1.ratio > runs[best_i].1.ratio {
            best_i = i;
        }
    }
    let (mut best_ratio, mut best_x) = (runs[best_i].1.ratio, runs[best_i].0.clone());
    let mut from_candidate = false;
    if cfg.use_candidates {
        let cands = structured_candidates(model, cfg.sector);
        if let Some((r, v)) = best_candidate(&problem, &cands) {
            if r >= best_ratio * (1.0 - 1e-9) {
                best_ratio = r;
                best_x = v;
                from_candidate = true;
            }
        }
    }
    let mut elem = Element::from_flat(&alg, best_x.as_slice())?;
    let np = elem.pnorm(p)?;
    elem = elem.scale_real(1.0 / np);
    let point = RegionPoint::from_pq(p, q);
    let k = model.delta().powf(k_exponent(point.inv_p, point.inv_q));
    let classification = classify(model, &elem, p, q, CLASSIFY_TOL)?;
    Ok(SearchResult {
        point,
        best_ratio,
        best_element: elem,
        classification,
        k_reference: k,
        gap: k - best_ratio,
        from_candidate,
        restarts: runs.into_iter().map(|r| r.1).collect(),
    })
}

impl SearchResult {
    pub fn to_row(&self, seed: u64) -> SweepRow {
        let expected = self.classification.row.map(|r| TABLE[r as usize - 1].family);
        SweepRow {
            inv_p: self.point.inv_p,
            inv_q: self.point.inv_q,
            region: self.point.region.as_str().to_string(),
            k: self.k_reference,
            empirical_c: self.best_ratio,
            gap: self.gap,
            family: self.classification.family.as_str().to_string(),
            matched: expected == Some(self.classification.family),
            restarts: self.restarts.len(),
            converged_count: self.converged_count(),
            seed,
        }
    }

    /// `best_ratio ≤ K + 1e-6`.
    pub fn sound(&self) -> bool {
        self.best_ratio <= self.k_reference + 1e-6
    }
}

/// One optimization per grid point; rows come back in grid order.
pub fn sweep_grid(model: &PlanarModel, grid: &[RegionPoint], cfg: &SearchConfig) -> Result<Vec<SearchResult>> {
    if grid.is_empty() {
        return Err(Error::ConfigInvalid("grid is empty".into()));
    }
    cfg.validate()?;
    grid.par_iter()
        .enumerate()
        .map(|(i, pt)| maximize_ratio_at(model, pt.p(), pt.q(), cfg, i as u64))
        .collect()
}

pub fn sweep_rows(results: &[SearchResult], seed: u64) -> Vec<SweepRow> {
    results.iter().map(|r| r.to_row(seed)).collect()
}

/// The grid `{start, start+step, …, stop}` in both reciprocal coordinates.
pub fn square_grid(axis: &[f64]) -> Vec<RegionPoint> {
    axis.iter().flat_map(|&a| axis.iter().map(move |&b| RegionPoint::new(a, b))).collect()
}

#[derive(Debug, Clone)]
pub struct YoungResult {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub best_value: f64,
    pub best_x: Element,
    pub best_y: Element,
    /// `δ^{-1}` when Young's inequality applies to `(p, q, r)`.
    pub bound: Option<f64>,
    pub from_candidates: bool,
    pub restarts: usize,
}

fn conv_matrix(model: &PlanarModel, fixed: &Element, fixed_on_right: bool) -> Result<DMatrix<C64>> {
    let alg = fixed.algebra().clone();
    let n = alg.dimension();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[j] = C64::new(1.0, 0.0);
        let ej = Element::from_flat(&alg, &e)?;
        let col = if fixed_on_right { conv(model, &ej, fixed)? } else { conv(model, fixed, &ej)? };
        m.set_column(j, &col.to_flat());
    }
    Ok(m)
}

fn young_value(model: &PlanarModel, x: &Element, y: &Element, p: f64, q: f64, r: f64) -> Result<f64> {
    let c = conv(model, x, y)?;
    Ok(c.pnorm(r)? / (x.pnorm(p)? * y.pnorm(q)?))
}

/// Alternating maximization of `‖x*y‖_r / (‖x‖_p ‖y‖_q)` on `P_{2,+}`.
pub fn estimate_young_constant(model: &PlanarModel, p: f64, q: f64, r: f64, cfg: &SearchConfig) -> Result<YoungResult> {
    cfg.validate()?;
    if !(p > 0.0 && q > 0.0 && r > 0.0) {
        return Err(Error::ConfigInvalid("exponents must be positive".into()));
    }
    let alg = model.algebra(cfg.sector).clone();
    let young_applies = p >= 1.0 && q >= 1.0 && r >= 1.0 && (recip(r) + 1.0 - recip(p) - recip(q)).abs() <= 1e-12;
    let inner = SearchConfig { max_iters: (cfg.max_iters / 10).max(20), polish_sweeps: cfg.polish_sweeps.min(10), ..cfg.clone() };
    let runs: Vec<Result<(f64, Element, Element)>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, u64::MAX, k as u64));
            let mut x = Element::from_flat(&alg, random_start(&alg, k, &mut rng).as_slice())?;
            let mut y = Element::from_flat(&alg, random_start(&alg, k + 1, &mut rng).as_slice())?;
            let mut value = young_value(model, &x, &y, p, q, r)?;
            for _ in 0..6 {
                let lx = RatioProblem::new(&alg, &alg, conv_matrix(model, &y, true)?, p, r, cfg.eps_smooth);
                let (nx, _) = lx.ascend(&x.to_flat(), &inner);
                let cx = Element::from_flat(&alg, nx.as_slice())?;
                if young_value(model, &cx, &y, p, q, r)? > value {
                    x = cx;
                }
                let ly = RatioProblem::new(&alg, &alg, conv_matrix(model, &x, false)?, q, r, cfg.eps_smooth);
                let (ny, _) = ly.ascend(&y.to_flat(), &inner);
                let cy = Element::from_flat(&alg, ny.as_slice())?;
                if young_value(model, &x, &cy, p, q, r)? > value {
                    y = cy;
                }
                let next = young_value(model, &x, &y, p, q, r)?;
                let done = next - value <= 1e-12 * next.abs();
                value = value.max(next);
                if done {
                    break;
                }
            }
            Ok((value, x, y))
        })
        .collect();
    let mut best: Option<(f64, Element, Element)> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.0 > b.0) {
            best = Some(run);
        }
    }
    let (mut best_value, mut best_x, mut best_y) = best.expect("at least one restart");
    let mut from_candidates = false;
    if cfg.use_candidates {
        let basic: Vec<Element> = structured_candidates(model, cfg.sector)
            .into_iter()
            .filter(|c| crate::extremizers::is_projection(c, 1e-10))
            .take(64)
            .collect();
        let mut cand: Option<(f64, &Element, &Element)> = None;
        for a in &basic {
            for b in &basic {
                let v = young_value(model, a, b, p, q, r)?;
                if cand.is_none_or(|c| v > c.0) {
                    cand = Some((v, a, b));
                }
            }
        }
        if let Some((v, a, b)) = cand {
            if v >= best_value * (1.0 - 1e-12) {
                best_value = v;
                best_x = a.clone();
                best_y = b.clone();
                from_candidates = true;
            }
        }
    }
    Ok(YoungResult {
        p,
        q,
        r,
        best_value,
        best_x,
        best_y,
        bound: young_applies.then(|| 1.0 / model.delta()),
        from_candidates,
        restarts: cfg.restarts,
    })
}

/// Points of `grid` at which the second entropic principle is stated and not degenerate.
pub fn up2_admissible(pt: &RegionPoint) -> bool {
    let (p, q) = (pt.p(), pt.q());
    pt.inv_p + pt.inv_q >= 1.0 - 1e-12 && (p - 2.0).abs() >= 1e-6 && (q - 2.0).abs() >= 1e-6
}

#[derive(Debug, Clone)]
pub struct ValidityPoint {
    pub point: RegionPoint,
    pub min_slack: f64,
    pub witness: Element,
    pub evaluated: usize,
    pub violated: bool,
}

impl ValidityPoint {
    pub fn to_row(&self) -> ValidityRow {
        ValidityRow {
            inv_p: self.point.inv_p,
            inv_q: self.point.inv_q,
            region: self.point.region.as_str().to_string(),
            min_slack: self.min_slack,
            witness_hash: self.witness.hash_hex(),
            regime: up2_regime(self.point.p(), self.point.q()).as_str().to_string(),
            evaluated: self.evaluated,
            violated: self.violated,
        }
    }
}

/// Minimum slack of the second entropic principle over structured candidates
/// and random samples (both sectors, normalized to `‖x‖_2 = 1`). Points
/// outside `1/p + 1/q ≥ 1` or with `p` or `q` equal to 2 are skipped.
pub fn up2_validity_map(model: &PlanarModel, grid: &[RegionPoint], samples: usize, seed: u64) -> Result<Vec<ValidityPoint>> {
    let points: Vec<RegionPoint> = grid.iter().copied().filter(up2_admissible).collect();
    if points.is_empty() {
        return Err(Error::ConfigInvalid("no admissible grid points".into()));
    }
    let mut pool = family_elements(model);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..samples {
        let sector = if i % 2 == 0 { Sector::Plus } else { Sector::Minus };
        let kind = [RandomKind::Generic, RandomKind::Positive, RandomKind::Projection, RandomKind::Unitary][(i / 2) % 4];
        pool.push(Element::random_with(model.algebra(sector), kind, &mut rng));
    }
    let evaluated: Vec<(Element, Evaluated)> = pool
        .into_iter()
        .filter(|x| !x.is_zero())
        .map(|x| {
            let n = x.pnorm(2.0)?;
            let x = x.scale_real(1.0 / n);
            let ev = Evaluated::new(model, &x)?;
            Ok((x, ev))
        })
        .collect::<Result<_>>()?;
    points
        .par_iter()
        .map(|pt| {
            let (mut min_slack, mut witness, mut violated) = (f64::INFINITY, 0usize, false);
            for (i, (_, ev)) in evaluated.iter().enumerate() {
                let rep = ev.up2(pt.p(), pt.q())?;
                if rep.slack < min_slack - 1e-12 {
                    min_slack = rep.slack;
                    witness = i;
                }
                violated |= !rep.holds;
            }
            Ok(ValidityPoint {
                point: *pt,
                min_slack,
                witness: evaluated[witness].0.clone(),
                evaluated: evaluated.len(),
                violated,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientCheckReport {
    pub model: String,
    pub p: f64,
    pub q: f64,
    pub samples: usize,
    pub coordinates: usize,
    pub passed: usize,
    pub max_rel_error: f64,
}

impl GradientCheckReport {
    pub fn fraction(&self) -> f64 {
        self.passed as f64 / self.coordinates.max(1) as f64
    }

    pub fn ok(&self) -> bool {
        self.fraction() >= 0.95
    }
}

fn min_gap(spec: &crate::algebra::Spectrum) -> f64 {
    let mut v: Vec<f64> = spec.entries().iter().map(|e| e.1).collect();
    v.sort_by(f64::total_cmp);
    let mut gap = v.first().copied().unwrap_or(0.0);
    for w in v.windows(2) {
        gap = gap.min(w[1] - w[0]);
    }
    gap
}

/// Analytic gradient of the smoothed objective against central differences
/// with `h = 1e-6`; a coordinate passes at relative error `≤ 1e-5`.
pub fn gradient_check(model: &PlanarModel, p: f64, q: f64, samples: usize, seed: u64) -> Result<GradientCheckReport> {
    if !(p.is_finite() && q.is_finite() && p > 1.0 && q > 1.0) {
        return Err(Error::ConfigInvalid("gradient check needs finite p, q > 1".into()));
    }
    let problem = RatioProblem::for_model(model, Sector::Plus, p, q, SearchConfig::default().eps_smooth);
    let alg = model.a_plus().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-6;
    let (mut coords, mut passed, mut worst) = (0, 0, 0.0f64);
    for _ in 0..samples {
        let x = loop {
            let x = Element::random_with(&alg, RandomKind::Generic, &mut rng);
            let fx = model.fourier(&x)?;
            if min_gap(&x.singular_spectrum()) > 1e-3 && min_gap(&fx.singular_spectrum()) > 1e-3 {
                break x.to_flat();
            }
        };
        let (_, g) = problem.smoothed_grad(&x);
        for i in 0..x.len() {
            for (unit, analytic) in [(C64::new(1.0, 0.0), g[i].re), (C64::new(0.0, 1.0), g[i].im)] {
                let mut plus = x.clone();
                let mut minus = x.clone();
                plus[i] += unit * h;
                minus[i] -= unit * h;
                let numeric = (problem.smoothed(&plus) - problem.smoothed(&minus)) / (2.0 * h);
                let scale = analytic.abs().max(numeric.abs());
                let err = if scale < 1e-12 { 0.0 } else { (analytic - numeric).abs() / scale };
                coords += 1;
                if err <= 1e-5 {
                    passed += 1;
                }
                worst = worst.max(err);
            }
        }
    }
    Ok(GradientCheckReport {
        model: model.id().to_string(),
        p,
        q,
        samples,
        coordinates: coords,
        passed,
        max_rel_error: worst,
    })
}
