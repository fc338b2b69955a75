//! Concrete 2-box models: finite groups (abelian via characters, non-abelian via
//! unitary irrep tables) and Temperley-Lieb, plus constructors for the named
//! element families.
//!
//! Every model stores its Fourier transform as a pair of dense matrices acting
//! on the row-major flattening of elements. For group models
//! `F(f)_π = δ^{-1} Σ_g f(g) π(g)` and
//! `F^{-1}(a)(g) = δ^{-1} Σ_π d_π Tr(π(g^{-1}) a_π)`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{BlockSpec, Element, MarkovAlgebra, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Irrep {
    pub dim: usize,
    /// `π(g)` for every group element, indexed like the multiplication table.
    pub matrices: Vec<DMatrix<C64>>,
}

impl Irrep {
    pub fn character(&self, g: usize) -> C64 {
        self.matrices[g].trace()
    }
}

/// Finite group with a complete set of unitary irreducible representations.
///
/// Element 0 is the identity; `mult[g][h]` is the index of `g·h`.
#[derive(Debug, Clone)]
pub struct IrrepTable {
    pub name: String,
    pub labels: Vec<String>,
    pub mult: Vec<Vec<usize>>,
    pub irreps: Vec<Irrep>,
    inverses: Vec<usize>,
}

impl IrrepTable {
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        mult: Vec<Vec<usize>>,
        irreps: Vec<Irrep>,
    ) -> Result<Self> {
        let bad = |m: String| Error::InvalidIrrepTable(m);
        let n = mult.len();
        if n == 0 {
            return Err(bad("empty multiplication table".into()));
        }
        if labels.len() != n {
            return Err(bad(format!("{} labels for order {n}", labels.len())));
        }
        for (g, row) in mult.iter().enumerate() {
            if row.len() != n {
                return Err(bad(format!("row {g} has length {}", row.len())));
            }
            let seen: BTreeSet<usize> = row.iter().copied().collect();
            if seen.len() != n || row.iter().any(|&h| h >= n) {
                return Err(bad(format!("row {g} is not a permutation")));
            }
        }
        for g in 0..n {
            if mult[0][g] != g || mult[g][0] != g {
                return Err(bad("element 0 is not the identity".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return Err(bad(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        let inverses: Vec<usize> = (0..n)
            .map(|g| (0..n).find(|&h| mult[g][h] == 0).expect("latin square has inverses"))
            .collect();
        let table = Self { name: name.into(), labels, mult, irreps, inverses };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Error::InvalidIrrepTable(m);
        let n = self.order();
        let sum_sq: usize = self.irreps.iter().map(|r| r.dim * r.dim).sum();
        if sum_sq != n {
            return Err(bad(format!("sum of squared irrep dimensions {sum_sq} != order {n}")));
        }
        for (k, rep) in self.irreps.iter().enumerate() {
            if rep.matrices.len() != n {
                return Err(bad(format!("irrep {k} has {} matrices", rep.matrices.len())));
            }
            let id = DMatrix::<C64>::identity(rep.dim, rep.dim);
            for (g, m) in rep.matrices.iter().enumerate() {
                if m.nrows() != rep.dim || m.ncols() != rep.dim {
                    return Err(bad(format!("irrep {k} matrix {g} has wrong shape")));
                }
                if (m.adjoint() * m - &id).camax() > 1e-10 {
                    return Err(bad(format!("irrep {k} is not unitary at element {g}")));
                }
            }
            for g in 0..n {
                for h in 0..n {
                    let lhs = &rep.matrices[g] * &rep.matrices[h];
                    if (lhs - &rep.matrices[self.mult[g][h]]).camax() > 1e-10 {
                        return Err(bad(format!("irrep {k} is not a homomorphism at ({g},{h})")));
                    }
                }
            }
        }
        for g in 0..n {
            let s: C64 = self.irreps.iter().map(|r| r.character(g) * r.dim as f64).sum();
            let expect = if g == 0 { n as f64 } else { 0.0 };
            if (s - C64::new(expect, 0.0)).norm() > 1e-8 {
                return Err(bad(format!("character orthogonality fails at element {g}")));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mult[g][h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|r| r.dim).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|g| (0..self.order()).all(|h| self.mult[g][h] == self.mult[h][g]))
    }

    /// Checks closure of `subset` under products and inverses.
    pub fn check_subgroup(&self, subset: &[usize]) -> Result<BTreeSet<usize>> {
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        if let Some(&g) = set.iter().find(|&&g| g >= self.order()) {
            return Err(Error::BadGroupElement { index: g, order: self.order() });
        }
        if !set.contains(&0) {
            return Err(Error::NotASubgroup("missing identity".into()));
        }
        for &a in &set {
            if !set.contains(&self.inverse(a)) {
                return Err(Error::NotASubgroup(format!("inverse of {a} missing")));
            }
            for &b in &set {
                if !set.contains(&self.mul(a, b)) {
                    return Err(Error::NotASubgroup(format!("product of {a} and {b} missing")));
                }
            }
        }
        Ok(set)
    }

    fn closure(&self, gens: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = gens.clone();
        set.insert(0);
        loop {
            let mut next = set.clone();
            for &a in &set {
                for &b in &set {
                    next.insert(self.mul(a, b));
                }
            }
            if next.len() == set.len() {
                return set;
            }
            set = next;
        }
    }

    /// Every subgroup, as sorted element lists, ordered by size then content.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<BTreeSet<usize>> = (0..self.order())
            .map(|g| self.closure(&BTreeSet::from([g])))
            .collect();
        loop {
            let current: Vec<_> = found.iter().cloned().collect();
            let mut grew = false;
            for a in &current {
                for b in &current {
                    let joined = self.closure(&a.union(b).copied().collect());
                    grew |= found.insert(joined);
                }
            }
            if !grew {
                break;
            }
        }
        let mut out: Vec<Vec<usize>> = found.into_iter().map(|s| s.into_iter().collect()).collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// `Z_{n_1} × … × Z_{n_k}` with mixed-radix indexing (first factor most significant).
    pub fn abelian(factors: &[usize]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::BadOrder(0));
        }
        if let Some(&f) = factors.iter().find(|&&f| f < 2) {
            return Err(Error::BadOrder(f));
        }
        let n: usize = factors.iter().product();
        let digits = |mut g: usize| {
            let mut d = vec![0; factors.len()];
            for i in (0..factors.len()).rev() {
                d[i] = g % factors[i];
                g /= factors[i];
            }
            d
        };
        let index = |d: &[usize]| d.iter().zip(factors).fold(0, |acc, (&x, &f)| acc * f + x);
        let mult = (0..n)
            .map(|g| {
                let dg = digits(g);
                (0..n)
                    .map(|h| {
                        let dh = digits(h);
                        let s: Vec<usize> =
                            dg.iter().zip(&dh).zip(factors).map(|((a, b), f)| (a + b) % f).collect();
                        index(&s)
                    })
                    .collect()
            })
            .collect();
        let irreps = (0..n)
            .map(|j| {
                let dj = digits(j);
                let matrices = (0..n)
                    .map(|k| {
                        let dk = digits(k);
                        let phase: f64 = dj
                            .iter()
                            .zip(&dk)
                            .zip(factors)
                            .map(|((&a, &b), &f)| ((a * b) % f) as f64 / f as f64)
                            .sum();
                        DMatrix::from_element(1, 1, C64::from_polar(1.0, 2.0 * PI * phase))
                    })
                    .collect();
                Irrep { dim: 1, matrices }
            })
            .collect();
        let labels = (0..n)
            .map(|g| digits(g).iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        let name = format!("Z{}", factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("xZ"));
        Self::new(name, labels, mult, irreps)
    }

    pub fn to_doc(&self) -> IrrepTableDoc {
        IrrepTableDoc {
            name: self.name.clone(),
            order: self.order(),
            labels: Some(self.labels.clone()),
            multiplication: self.mult.clone(),
            irreps: self
                .irreps
                .iter()
                .map(|r| {
                    r.matrices
                        .iter()
                        .map(|m| {
                            (0..m.nrows())
                                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &IrrepTableDoc) -> Result<Self> {
        if doc.multiplication.len() != doc.order {
            return Err(Error::InvalidIrrepTable(format!(
                "order {} but {} table rows",
                doc.order,
                doc.multiplication.len()
            )));
        }
        let labels = doc
            .labels
            .clone()
            .unwrap_or_else(|| (0..doc.order).map(|g| g.to_string()).collect());
        let mut irreps = Vec::with_capacity(doc.irreps.len());
        for (k, mats) in doc.irreps.iter().enumerate() {
            let dim = mats.first().map(|m| m.len()).unwrap_or(0);
            let mut matrices = Vec::with_capacity(mats.len());
            for m in mats {
                if m.len() != dim || m.iter().any(|r| r.len() != dim) {
                    return Err(Error::InvalidIrrepTable(format!("irrep {k} has ragged matrices")));
                }
                matrices.push(DMatrix::from_fn(dim, dim, |i, j| C64::new(m[i][j][0], m[i][j][1])));
            }
            irreps.push(Irrep { dim, matrices });
        }
        Self::new(doc.name.clone(), labels, doc.multiplication.clone(), irreps)
    }
}

/// File form of an irrep table; matrices are row-major lists of `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrrepTableDoc {
    #[serde(default)]
    pub name: String,
    pub order: usize,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    pub multiplication: Vec<Vec<usize>>,
    pub irreps: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
}

/// The symmetric group on three letters with trivial, sign and standard irreps.
///
/// Elements are `r^a s^b` at index `a + 3b`, with `r` a 3-cycle and `s` a
/// transposition satisfying `s r = r^{-1} s`.
pub fn s3() -> IrrepTable {
    let idx = |a: usize, b: usize| a % 3 + 3 * (b % 2);
    let parts = |g: usize| (g % 3, g / 3);
    let mult = (0..6)
        .map(|g| {
            let (a, b) = parts(g);
            (0..6)
                .map(|h| {
                    let (c, d) = parts(h);
                    // r^a s^b r^c s^d = r^{a ± c} s^{b+d}
                    let rot = if b == 0 { a + c } else { a + 3 - c };
                    idx(rot, b + d)
                })
                .collect()
        })
        .collect();
    let (c, s) = ((2.0 * PI / 3.0).cos(), (2.0 * PI / 3.0).sin());
    let r = DMatrix::from_row_slice(2, 2, &[C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)]);
    let f = DMatrix::from_row_slice(
        2,
        2,
        &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
    );
    let one = |v: f64| DMatrix::from_element(1, 1, C64::new(v, 0.0));
    let trivial = Irrep { dim: 1, matrices: (0..6).map(|_| one(1.0)).collect() };
    let sign = Irrep { dim: 1, matrices: (0..6).map(|g| one(if g < 3 { 1.0 } else { -1.0 })).collect() };
    let standard = Irrep {
        dim: 2,
        matrices: (0..6)
            .map(|g| {
                let (a, b) = parts(g);
                let mut m = DMatrix::<C64>::identity(2, 2);
                for _ in 0..a {
                    m = &m * &r;
                }
                if b == 1 {
                    m = &m * &f;
                }
                m
            })
            .collect(),
    };
    let labels = ["e", "r", "r2", "s", "rs", "r2s"].iter().map(|s| s.to_string()).collect();
    IrrepTable::new("S3", labels, mult, vec![trivial, sign, standard])
        .expect("built-in S3 table is valid")
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Cyclic { n: usize },
    Abelian { factors: Vec<usize> },
    NonAbelian { name: String },
    TemperleyLieb { delta: f64 },
}

impl ModelKind {
    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::Cyclic { .. } => "cyclic",
            ModelKind::Abelian { .. } => "abelian",
            ModelKind::NonAbelian { .. } => "nonabelian",
            ModelKind::TemperleyLieb { .. } => "tl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Which of the two 2-box algebras an element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Plus,
    Minus,
}

/// Paired 2-box algebras with the string Fourier transform between them.
#[derive(Debug, Clone)]
pub struct PlanarModel {
    id: String,
    kind: ModelKind,
    a_plus: Arc<MarkovAlgebra>,
    a_minus: Arc<MarkovAlgebra>,
    delta: f64,
    e1: Element,
    forward: DMatrix<C64>,
    backward: DMatrix<C64>,
    group: Option<Arc<IrrepTable>>,
}

fn group_model(id: String, kind: ModelKind, table: IrrepTable) -> Result<PlanarModel> {
    let n = table.order();
    if n < 2 {
        return Err(Error::BadOrder(n));
    }
    let delta = (n as f64).sqrt();
    let a_plus = MarkovAlgebra::new(
        format!("{id}/+"),
        vec![BlockSpec { dim: 1, weight: 1.0 }; n],
        delta,
    )?;
    let a_minus = MarkovAlgebra::new(
        format!("{id}/-"),
        table.irreps.iter().map(|r| BlockSpec { dim: r.dim, weight: r.dim as f64 }).collect(),
        delta,
    )?;
    let m = a_minus.dimension();
    let mut forward = DMatrix::zeros(m, n);
    let mut backward = DMatrix::zeros(n, m);
    for g in 0..n {
        let ginv = table.inverse(g);
        let mut offset = 0;
        for rep in &table.irreps {
            let d = rep.dim;
            for i in 0..d {
                for j in 0..d {
                    forward[(offset + i * d + j, g)] = rep.matrices[g][(i, j)] / delta;
                    // Tr(π(g^{-1}) a) = Σ_{ij} π(g^{-1})_{ji} a_{ij}
                    backward[(g, offset + i * d + j)] =
                        rep.matrices[ginv][(j, i)] * (d as f64 / delta);
                }
            }
            offset += d * d;
        }
    }
    let mut e1_vals = vec![C64::new(0.0, 0.0); n];
    e1_vals[0] = C64::new(1.0, 0.0);
    let e1 = Element::from_values(&a_plus, &e1_vals)?;
    Ok(PlanarModel {
        id,
        kind,
        a_plus,
        a_minus,
        delta,
        e1,
        forward,
        backward,
        group: Some(Arc::new(table)),
    })
}

/// Functions on `Z_n` with the unitary DFT `F(f)(j) = n^{-1/2} Σ_k f(k) e^{2πi jk/n}`.
pub fn cyclic_model(n: usize) -> Result<PlanarModel> {
    if n < 2 {
        return Err(Error::BadOrder(n));
    }
    group_model(format!("cyclic:{n}"), ModelKind::Cyclic { n }, IrrepTable::abelian(&[n])?)
}

pub fn abelian_model(factors: &[usize]) -> Result<PlanarModel> {
    let table = IrrepTable::abelian(factors)?;
    let id = format!("abelian:{}", factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("x"));
    group_model(id, ModelKind::Abelian { factors: factors.to_vec() }, table)
}

pub fn nonabelian_model(table: IrrepTable) -> Result<PlanarModel> {
    let id = format!("group:{}", table.name);
    group_model(id, ModelKind::NonAbelian { name: table.name.clone() }, table)
}

pub fn s3_model() -> PlanarModel {
    nonabelian_model(s3()).expect("S3 model builds")
}

/// Whether `δ` is a realizable Temperley-Lieb index value: `δ ≥ 2` or
/// `δ = 2cos(π/m)` for some `m ≤ 1000`.
pub fn is_genuine_tl_index(delta: f64) -> bool {
    delta >= 2.0 - 1e-9 || (3..=1000).any(|m| (delta - 2.0 * (PI / m as f64).cos()).abs() <= 1e-9)
}

/// Temperley-Lieb 2-boxes: blocks `(e_1, weight 1)` and `(1 − e_1, weight δ² − 1)`.
///
/// With `x = a·1 + b·e_1`, `F(x) = (b/δ)·1 + (aδ)·e_1`; this map is an involution.
pub fn tl_model(delta: f64) -> Result<PlanarModel> {
    if !(delta.is_finite() && delta >= 2f64.sqrt() - 1e-12) {
        return Err(Error::DeltaTooSmall(delta));
    }
    let id = format!("tl:{delta}");
    let blocks = vec![
        BlockSpec { dim: 1, weight: 1.0 },
        BlockSpec { dim: 1, weight: (delta * delta - 1.0).max(1.0) },
    ];
    let a_plus = MarkovAlgebra::new(format!("{id}/+"), blocks.clone(), delta)?;
    let a_minus = MarkovAlgebra::new(format!("{id}/-"), blocks, delta)?;
    // Block values (v0, v1) = (a + b, a).
    let c = |v: f64| C64::new(v, 0.0);
    let forward = DMatrix::from_row_slice(
        2,
        2,
        &[c(1.0 / delta), c(delta - 1.0 / delta), c(1.0 / delta), c(-1.0 / delta)],
    );
    let e1 = Element::from_real_values(&a_plus, &[1.0, 0.0])?;
    Ok(PlanarModel {
        id,
        kind: ModelKind::TemperleyLieb { delta },
        a_plus,
        a_minus,
        delta,
        e1,
        backward: forward.clone(),
        forward,
        group: None,
    })
}

impl PlanarModel {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn a_plus(&self) -> &Arc<MarkovAlgebra> {
        &self.a_plus
    }

    pub fn a_minus(&self) -> &Arc<MarkovAlgebra> {
        &self.a_minus
    }

    pub fn algebra(&self, sector: Sector) -> &Arc<MarkovAlgebra> {
        match sector {
            Sector::Plus => &self.a_plus,
            Sector::Minus => &self.a_minus,
        }
    }

    /// Jones projection in `P_{2,+}`.
    pub fn e1(&self) -> &Element {
        &self.e1
    }

    /// Matrix of the transform `P_{2,+} → P_{2,-}` on flattened coordinates.
    pub fn forward_matrix(&self) -> &DMatrix<C64> {
        &self.forward
    }

    /// Matrix of the inverse transform `P_{2,-} → P_{2,+}`.
    pub fn backward_matrix(&self) -> &DMatrix<C64> {
        &self.backward
    }

    pub fn group(&self) -> Option<&Arc<IrrepTable>> {
        self.group.as_ref()
    }

    pub fn is_abelian_group(&self) -> bool {
        matches!(self.kind, ModelKind::Cyclic { .. } | ModelKind::Abelian { .. })
    }

    pub fn is_tl(&self) -> bool {
        matches!(self.kind, ModelKind::TemperleyLieb { .. })
    }

    /// Sector of an element, if it belongs to this model.
    pub fn sector_of(&self, x: &Element) -> Option<Sector> {
        if x.algebra().same_as(&self.a_plus) {
            Some(Sector::Plus)
        } else if x.algebra().same_as(&self.a_minus) {
            Some(Sector::Minus)
        } else {
            None
        }
    }

    fn require_group(&self) -> Result<&Arc<IrrepTable>> {
        self.group.as_ref().ok_or_else(|| Error::WrongModelKind {
            expected: "group",
            actual: self.kind.label().to_string(),
        })
    }

    fn require_abelian(&self) -> Result<&Arc<IrrepTable>> {
        if !self.is_abelian_group() {
            return Err(Error::WrongModelKind { expected: "abelian group", actual: self.kind.label().into() });
        }
        self.require_group()
    }

    /// Function on the group as an element of `P_{2,+}`.
    pub fn function(&self, values: &[C64]) -> Result<Element> {
        self.require_group()?;
        Element::from_values(&self.a_plus, values)
    }

    pub fn indicator(&self, set: &[usize]) -> Result<Element> {
        let table = self.require_group()?;
        let n = table.order();
        let mut v = vec![C64::new(0.0, 0.0); n];
        for &g in set {
            if g >= n {
                return Err(Error::BadGroupElement { index: g, order: n });
            }
            v[g] = C64::new(1.0, 0.0);
        }
        Element::from_values(&self.a_plus, &v)
    }

    /// Point mass `δ_g`, a trace-one projection.
    pub fn point_mass(&self, g: usize) -> Result<Element> {
        self.indicator(&[g])
    }

    /// The character `χ_j` of an abelian group as a function in `P_{2,+}`.
    pub fn character(&self, j: usize) -> Result<Element> {
        let table = self.require_abelian()?;
        if j >= table.irreps.len() {
            return Err(Error::BadGroupElement { index: j, order: table.irreps.len() });
        }
        let v: Vec<C64> = table.irreps[j].matrices.iter().map(|m| m[(0, 0)]).collect();
        Element::from_values(&self.a_plus, &v)
    }

    /// Matrix coefficient `g ↦ π(g)_{ab}` of an irrep, for any group model.
    pub fn matrix_coefficient(&self, irrep: usize, a: usize, b: usize) -> Result<Element> {
        let table = self.require_group()?;
        let rep = table
            .irreps
            .get(irrep)
            .ok_or(Error::BadGroupElement { index: irrep, order: table.irreps.len() })?;
        let v: Vec<C64> = rep.matrices.iter().map(|m| m[(a, b)]).collect();
        Element::from_values(&self.a_plus, &v)
    }

    /// Indicator of a subgroup; a biprojection.
    pub fn subgroup_biprojection(&self, subgroup: &[usize]) -> Result<Element> {
        let table = self.require_group()?;
        let set = table.check_subgroup(subgroup)?;
        self.indicator(&set.into_iter().collect::<Vec<_>>())
    }

    /// Indicator of the coset `gH` (left shift) or `Hg` (right shift).
    pub fn coset_shift(&self, subgroup: &[usize], g: usize, side: Side) -> Result<Element> {
        let table = self.require_group()?;
        let set = table.check_subgroup(subgroup)?;
        if g >= table.order() {
            return Err(Error::BadGroupElement { index: g, order: table.order() });
        }
        let coset: Vec<usize> = set
            .iter()
            .map(|&h| match side {
                Side::Left => table.mul(g, h),
                Side::Right => table.mul(h, g),
            })
            .collect();
        self.indicator(&coset)
    }

    /// `x(k) = χ_j(k)·1_{H+g}(k)` on an abelian group.
    pub fn bishift_element(&self, subgroup: &[usize], g: usize, chi: usize) -> Result<Element> {
        self.require_abelian()?;
        let coset = self.coset_shift(subgroup, g, Side::Left)?;
        let character = self.character(chi)?;
        coset.mul(&character)
    }

    /// Quadratic-phase biunimodular function on `Z_n`.
    pub fn biunitary_quadratic(&self, lambda: i64, mu: i64) -> Result<Element> {
        let n = match self.kind {
            ModelKind::Cyclic { n } => n,
            _ => return Err(Error::WrongModelKind { expected: "cyclic", actual: self.kind.label().into() }),
        };
        if gcd(lambda.rem_euclid(n as i64) as usize, n) != 1 {
            return Err(Error::LambdaNotCoprime { lambda, n });
        }
        let (l, m, nn) = (lambda.rem_euclid(2 * n as i64), mu.rem_euclid(n as i64), n as i64);
        let v: Vec<C64> = (0..nn)
            .map(|k| {
                // Exponent numerators reduced modulo 2n to keep angles small.
                let num = if n % 2 == 1 {
                    (2 * (l * k * k + m * k)).rem_euclid(2 * nn)
                } else {
                    (l * k * k + 2 * m * k).rem_euclid(2 * nn)
                };
                C64::from_polar(1.0, PI * num as f64 / nn as f64)
            })
            .collect();
        Element::from_values(&self.a_plus, &v)
    }

    /// `x = 1 − e_1 + (1 − δ²/2 ± iδ√(4−δ²)/2)·e_1` in Temperley-Lieb.
    pub fn tl_biunitary(&self, sign: i8) -> Result<Element> {
        let delta = match self.kind {
            ModelKind::TemperleyLieb { delta } => delta,
            _ => return Err(Error::WrongModelKind { expected: "tl", actual: self.kind.label().into() }),
        };
        if !(delta >= 2f64.sqrt() - 1e-12 && delta <= 2.0 + 1e-12) {
            return Err(Error::DeltaOutOfRange(delta));
        }
        let s = if sign >= 0 { 1.0 } else { -1.0 };
        let coeff = C64::new(1.0 - delta * delta / 2.0, s * delta * (4.0 - delta * delta).max(0.0).sqrt() / 2.0);
        Element::from_values(&self.a_plus, &[coeff, C64::new(1.0, 0.0)])
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn coprime(a: usize, b: usize) -> bool {
    gcd(a, b) == 1
}

/// Model description as read from a config file or an inline `kind:arg` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Cyclic { n: usize },
    Abelian { factors: Vec<usize> },
    Nonabelian { irrep_table_path: PathBuf },
    S3,
    Tl { delta: f64 },
}

impl ModelSpec {
    /// Parses `cyclic:6`, `abelian:2x2`, `s3`, `nonabelian:<path>` or `tl:<delta>`.
    pub fn parse_inline(text: &str) -> Result<Self> {
        let (kind, arg) = text.split_once(':').unwrap_or((text, ""));
        let bad = || Error::Parse(format!("invalid model spec '{text}'"));
        match kind.trim() {
            "cyclic" => Ok(ModelSpec::Cyclic { n: arg.trim().parse().map_err(|_| bad())? }),
            "abelian" => {
                let factors = arg
                    .split(|c| c == 'x' || c == ',')
                    .map(|f| f.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                Ok(ModelSpec::Abelian { factors })
            }
            "s3" => Ok(ModelSpec::S3),
            "nonabelian" | "group" if arg == "s3" || arg == "S3" => Ok(ModelSpec::S3),
            "nonabelian" | "group" if !arg.is_empty() => {
                Ok(ModelSpec::Nonabelian { irrep_table_path: PathBuf::from(arg) })
            }
            "tl" => Ok(ModelSpec::Tl { delta: parse_real(arg).ok_or_else(bad)? }),
            _ => Err(bad()),
        }
    }

    pub fn build(&self) -> Result<PlanarModel> {
        match self {
            ModelSpec::Cyclic { n } => cyclic_model(*n),
            ModelSpec::Abelian { factors } => abelian_model(factors),
            ModelSpec::S3 => Ok(s3_model()),
            ModelSpec::Tl { delta } => tl_model(*delta),
            ModelSpec::Nonabelian { irrep_table_path } => {
                let text = std::fs::read_to_string(irrep_table_path)
                    .map_err(|e| Error::Parse(format!("{}: {e}", irrep_table_path.display())))?;
                let doc: IrrepTableDoc =
                    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
                nonabelian_model(IrrepTable::from_doc(&doc)?)
            }
        }
    }
}

/// Parses a real number, also accepting `sqrt(x)`, `a/b` and `inf`.
pub fn parse_real(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        return parse_real(inner).map(f64::sqrt);
    }
    if matches!(t, "inf" | "infinity" | "∞") {
        return Some(f64::INFINITY);
    }
    if let Some((a, b)) = t.split_once('/') {
        return Some(parse_real(a)? / parse_real(b)?);
    }
    t.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{sft, Direction};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn s3_table() {
        let t = s3();
        assert_eq!(t.order(), 6);
        assert_eq!(t.dims(), vec![1, 1, 2]);
        assert_eq!(t.dims().iter().map(|d| d * d).sum::<usize>(), 6);
        assert!(!t.is_abelian());
        assert_eq!(t.subgroups().len(), 6);
    }

    #[test]
    fn invalid_tables_are_rejected() {
        let mut doc = s3().to_doc();
        doc.irreps[2][1][0][0] = [2.0, 0.0];
        assert!(matches!(IrrepTable::from_doc(&doc), Err(Error::InvalidIrrepTable(_))));
        let mut doc = s3().to_doc();
        doc.irreps.pop();
        assert!(matches!(IrrepTable::from_doc(&doc), Err(Error::InvalidIrrepTable(_))));
        let doc = s3().to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let back: IrrepTableDoc = serde_json::from_str(&json).unwrap();
        assert!(IrrepTable::from_doc(&back).is_ok());
    }

    #[test]
    fn model_traces() {
        let models = vec![
            cyclic_model(5).unwrap(),
            abelian_model(&[2, 3]).unwrap(),
            s3_model(),
            tl_model(2f64.sqrt()).unwrap(),
            tl_model(2.5).unwrap(),
        ];
        for m in &models {
            let d2 = m.delta() * m.delta();
            assert!((Element::identity(m.a_plus()).trace().re - d2).abs() < 1e-10);
            assert!((Element::identity(m.a_minus()).trace().re - d2).abs() < 1e-10);
            assert!((m.e1().trace().re - 1.0).abs() < 1e-10);
        }
        assert_eq!(abelian_model(&[2, 2]).unwrap().delta(), 2.0);
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(cyclic_model(1).unwrap_err(), Error::BadOrder(1));
        assert!(matches!(abelian_model(&[2, 1]), Err(Error::BadOrder(1))));
        assert!(matches!(tl_model(1.3), Err(Error::DeltaTooSmall(_))));
        let z4 = cyclic_model(4).unwrap();
        assert!(matches!(z4.subgroup_biprojection(&[0, 1]), Err(Error::NotASubgroup(_))));
        assert!(matches!(z4.biunitary_quadratic(2, 0), Err(Error::LambdaNotCoprime { .. })));
        assert!(matches!(z4.tl_biunitary(1), Err(Error::WrongModelKind { .. })));
        let tl = tl_model(2.5).unwrap();
        assert!(matches!(tl.tl_biunitary(1), Err(Error::DeltaOutOfRange(_))));
        assert!(matches!(tl.point_mass(0), Err(Error::WrongModelKind { .. })));
        assert!(matches!(s3_model().bishift_element(&[0], 0, 0), Err(Error::WrongModelKind { .. })));
        assert!(matches!(s3_model().biunitary_quadratic(1, 0), Err(Error::WrongModelKind { .. })));
    }

    #[test]
    fn family_constructors() {
        let z4 = cyclic_model(4).unwrap();
        assert_eq!(z4.subgroup_biprojection(&[0, 2]).unwrap().values(), vec![c(1., 0.), c(0., 0.), c(1., 0.), c(0., 0.)]);
        assert_eq!(z4.subgroup_biprojection(&[0]).unwrap().values(), z4.e1().values());
        assert_eq!(z4.coset_shift(&[0, 2], 1, Side::Left).unwrap().values(), vec![c(0., 0.), c(1., 0.), c(0., 0.), c(1., 0.)]);
        assert_eq!(z4.coset_shift(&[0, 2], 0, Side::Right).unwrap().values(), z4.subgroup_biprojection(&[0, 2]).unwrap().values());
        let b = z4.bishift_element(&[0, 2], 0, 1).unwrap();
        let expect = [c(1., 0.), c(0., 0.), c(-1., 0.), c(0., 0.)];
        for (got, want) in b.values().iter().zip(expect) {
            assert!((got - want).norm() < 1e-15);
        }
        let z3 = cyclic_model(3).unwrap();
        let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let u = z3.biunitary_quadratic(1, 0).unwrap().values();
        for (got, want) in u.iter().zip([c(1., 0.), w, w]) {
            assert!((got - want).norm() < 1e-15);
        }
        let z2 = cyclic_model(2).unwrap();
        let u = z2.biunitary_quadratic(1, 0).unwrap().values();
        assert!((u[0] - c(1., 0.)).norm() < 1e-15 && (u[1] - c(0., 1.)).norm() < 1e-15);
        let tl = tl_model(2f64.sqrt()).unwrap();
        let x = tl.tl_biunitary(1).unwrap().values();
        assert!((x[0] - c(0., 1.)).norm() < 1e-15 && x[1] == c(1., 0.));
        let tl2 = tl_model(2.0).unwrap();
        assert!((tl2.tl_biunitary(-1).unwrap().values()[0] - c(-1., 0.)).norm() < 1e-15);
    }

    #[test]
    fn cyclic_and_abelian_transforms() {
        let z2 = cyclic_model(2).unwrap();
        let y = sft(&z2, z2.e1(), Direction::Forward).unwrap().values();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((y[0] - c(r, 0.)).norm() < 1e-15 && (y[1] - c(r, 0.)).norm() < 1e-15);
        let z4 = cyclic_model(4).unwrap();
        let h = z4.subgroup_biprojection(&[0, 2]).unwrap();
        let fy = sft(&z4, &h, Direction::Forward).unwrap().values();
        for (got, want) in fy.iter().zip([1.0, 0.0, 1.0, 0.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-14);
        }
        let a2 = abelian_model(&[2]).unwrap();
        assert_eq!(a2.forward_matrix(), z2.forward_matrix());
    }

    #[test]
    fn abelian_product_matches_cyclic_under_crt() {
        let z6 = cyclic_model(6).unwrap();
        let a = abelian_model(&[2, 3]).unwrap();
        // Element k of Z_6 corresponds to (k mod 2, k mod 3), index 3·(k mod 2) + (k mod 3).
        let crt = |k: usize| 3 * (k % 2) + k % 3;
        let fz = z6.forward_matrix();
        let fa = a.forward_matrix();
        for j in 0..6 {
            let row: Vec<C64> = (0..6).map(|k| fz[(j, k)]).collect();
            let matched = (0..6).any(|ja| (0..6).all(|k| (fa[(ja, crt(k))] - row[k]).norm() < 1e-12));
            assert!(matched, "character {j} of Z6 has no CRT partner");
        }
    }

    #[test]
    fn tl_genuine_index() {
        assert!(is_genuine_tl_index(2f64.sqrt()));
        assert!(is_genuine_tl_index((1.0 + 5f64.sqrt()) / 2.0));
        assert!(is_genuine_tl_index(2.0));
        assert!(is_genuine_tl_index(3.3));
        assert!(!is_genuine_tl_index(1.7));
    }

    #[test]
    fn model_spec_parsing() {
        assert_eq!(ModelSpec::parse_inline("cyclic:6").unwrap(), ModelSpec::Cyclic { n: 6 });
        assert_eq!(ModelSpec::parse_inline("abelian:2x2").unwrap(), ModelSpec::Abelian { factors: vec![2, 2] });
        assert_eq!(ModelSpec::parse_inline("s3").unwrap(), ModelSpec::S3);
        assert_eq!(ModelSpec::parse_inline("tl:sqrt(2)").unwrap(), ModelSpec::Tl { delta: 2f64.sqrt() });
        assert!(ModelSpec::parse_inline("cyclic:x").is_err());
        assert!(matches!(ModelSpec::parse_inline("cyclic:0").unwrap().build(), Err(Error::BadOrder(0))));
        let spec: ModelSpec = serde_json::from_str(r#"{"kind":"tl","delta":1.5}"#).unwrap();
        assert_eq!(spec, ModelSpec::Tl { delta: 1.5 });
    }
}
