use std::path::PathBuf;

use ncfa_core::inequalities::check_entropy_monotone;
use ncfa_core::search::{derive_seed, family_elements, sweep_rows};
use ncfa_core::{
    check_holder, check_norm1_comparison, check_young, classify, k_value, maximize_ratio, sweep_grid, up2_validity_map, validate_model, CheckReport, CheckRow, ClassifyRow, Element, ElementDoc,
    Evaluated, PlanarModel, RandomKind, Regime, RegionPoint, SearchConfig, Sector, CLASSIFY_TOL,
};
use rayon::prelude::*;

use crate::config::{load_model, real, CliError, CliResult, GridArgs};
use crate::output::{emit, render, Format};

pub const ALL_CHECKS: [&str; 11] = ["plancherel", "hy", "holder", "young", "norm_bounds", "ds", "hb", "up1", "up2", "norm1", "entropy_monotone"];
const ALIASES: [(&str, &str); 2] = [("lemma37", "norm1"), ("lemma43", "entropy_monotone")];

const SAMPLE_KINDS: [RandomKind; 5] = [RandomKind::Generic, RandomKind::Positive, RandomKind::Projection, RandomKind::Unitary, RandomKind::SelfAdjoint];
const LEMMA43_GRIDS: [&[f64]; 2] = [&[0.2, 0.4, 0.6, 0.8], &[1.25, 1.5, 2.0, 3.0, 4.0]];

pub struct Global {
    pub model: String,
    pub seed: u64,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Exit status of a command that ran to completion.
pub enum Outcome {
    Ok,
    Violation,
}

fn holds(r: &CheckReport, tol: Option<f64>) -> bool {
    match tol {
        Some(t) => r.slack >= -t * (1.0 + r.lhs.abs() + r.rhs.abs()),
        None => r.holds,
    }
}

fn parse_checks(list: &str) -> CliResult<Vec<&'static str>> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let name = ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, c)| c);
        let Some(&known) = ALL_CHECKS.iter().find(|c| **c == name) else {
            return Err(CliError::config(format!("--checks: unknown check '{name}' (expected any of {})", ALL_CHECKS.join(","))));
        };
        if !out.contains(&known) {
            out.push(known);
        }
    }
    if out.is_empty() {
        return Err(CliError::config("--checks: no checks selected"));
    }
    Ok(out)
}

fn unit_l2(x: Element) -> CliResult<Option<Element>> {
    if x.is_zero() {
        return Ok(None);
    }
    let n = x.pnorm(2.0)?;
    Ok(Some(x.scale_real(1.0 / n)))
}

/// Skips exponent combinations outside a checker's domain; other errors propagate.
fn admissible(res: ncfa_core::Result<CheckReport>) -> CliResult<Option<CheckReport>> {
    use ncfa_core::Error as E;
    match res {
        Ok(r) => Ok(Some(r)),
        Err(E::DegenerateOrder { .. } | E::OutOfRegion { .. } | E::POutOfRange(_) | E::NonPositiveP(_) | E::PTooCloseToOne(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

struct Subject {
    x: Element,
    partner: Element,
    seed: Option<u64>,
}

fn subjects(model: &PlanarModel, samples: usize, seed: u64) -> CliResult<Vec<Subject>> {
    let mut out = Vec::new();
    for (i, x) in family_elements(model).into_iter().enumerate() {
        let alg = x.algebra().clone();
        if let Some(x) = unit_l2(x)? {
            let partner = Element::random(&alg, RandomKind::Generic, derive_seed(seed, u64::MAX, i as u64));
            out.push(Subject { x, partner, seed: None });
        }
    }
    for i in 0..samples {
        let sector = if i % 2 == 0 { Sector::Plus } else { Sector::Minus };
        let alg = model.algebra(sector);
        let s = derive_seed(seed, i as u64, 0);
        let x = Element::random(alg, SAMPLE_KINDS[(i / 2) % SAMPLE_KINDS.len()], s);
        if let Some(x) = unit_l2(x)? {
            let partner = Element::random(alg, RandomKind::Generic, derive_seed(seed, i as u64, 1));
            out.push(Subject { x, partner, seed: Some(s) });
        }
    }
    Ok(out)
}

fn distinct(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()) || (a.is_infinite() && a == b));
    v
}

fn keep(r: CliResult<Option<CheckReport>>, reports: &mut Vec<CheckReport>, skipped: &mut usize) -> CliResult<()> {
    match r? {
        Some(r) => reports.push(r),
        None => *skipped += 1,
    }
    Ok(())
}

fn run_checks(model: &PlanarModel, s: &Subject, checks: &[&str], points: &[RegionPoint]) -> CliResult<(Vec<CheckReport>, usize)> {
    let mut ev = Evaluated::new(model, &s.x)?;
    if let Some(seed) = s.seed {
        ev = ev.with_seed(seed);
    }
    let ps = distinct(points.iter().map(|pt| pt.p()));
    let mut reports = Vec::new();
    let mut skipped = 0;
    for &check in checks {
        match check {
            "plancherel" => reports.push(ev.plancherel()),
            "ds" => reports.push(ev.ds()),
            "hb" => keep(admissible(ev.hb()), &mut reports, &mut skipped)?,
            "hy" => {
                for &p in &ps {
                    keep(admissible(ev.hausdorff_young(p)), &mut reports, &mut skipped)?;
                }
            }
            "norm_bounds" => {
                for pt in points {
                    let (upper, lower) = ev.norm_bounds(pt.p(), pt.q());
                    reports.push(upper);
                    reports.push(lower);
                }
            }
            "up1" => {
                for pt in points {
                    keep(admissible(ev.up1(pt.p(), pt.q())), &mut reports, &mut skipped)?;
                }
            }
            "up2" => {
                for pt in points {
                    keep(admissible(ev.up2(pt.p(), pt.q())), &mut reports, &mut skipped)?;
                }
            }
            "holder" => {
                for pt in points {
                    keep(admissible(check_holder(&s.x, &s.partner, pt.p(), pt.q())), &mut reports, &mut skipped)?;
                }
            }
            "young" => {
                for pt in points {
                    keep(admissible(check_young(model, &s.x, &s.partner, pt.p(), pt.q())), &mut reports, &mut skipped)?;
                }
            }
            "norm1" => {
                for &p in &ps {
                    match check_norm1_comparison(&s.x, p) {
                        Ok(c) => {
                            reports.push(c.lower);
                            reports.push(c.upper);
                        }
                        Err(ncfa_core::Error::NonPositiveP(_)) => skipped += 1,
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            "entropy_monotone" => {
                let y = s.x.scale_real(1.0 / s.x.norm_inf());
                for grid in LEMMA43_GRIDS {
                    reports.push(check_entropy_monotone(&y, grid)?);
                }
            }
            other => unreachable!("unvalidated check {other}"),
        }
    }
    Ok((reports, skipped))
}

pub fn verify(g: &Global, checks: &str, samples: usize, grid: &GridArgs) -> CliResult<Outcome> {
    let checks = parse_checks(checks)?;
    let points = grid.points("0:1:0.25")?;
    let model = load_model(&g.model)?;
    let subjects = subjects(&model, samples, g.seed)?;
    let results: Vec<(Vec<CheckReport>, usize)> = subjects.par_iter().map(|s| run_checks(&model, s, &checks, &points)).collect::<CliResult<_>>()?;

    let (mut rows, mut unexpected, mut warnings, mut skipped) = (Vec::new(), 0usize, 0usize, 0usize);
    for (reports, skip) in &results {
        skipped += skip;
        for r in reports {
            if !holds(r, g.tol) {
                if r.name == "up2" && r.regime == Some(Regime::CrossBranch) {
                    warnings += 1;
                } else {
                    unexpected += 1;
                }
            }
            rows.push(CheckRow::from(r));
        }
    }
    let bytes = render(&rows, g.format)?;
    emit(&bytes, g.out.as_ref())?;
    eprintln!(
        "verify {}: {} checks over {} elements, {unexpected} unexpected failures, {warnings} cross-branch up2 warnings, {skipped} skipped outside domain",
        model.id(),
        rows.len(),
        subjects.len()
    );
    Ok(if unexpected == 0 { Outcome::Ok } else { Outcome::Violation })
}

pub struct SearchOpts {
    pub restarts: usize,
    pub max_iters: usize,
    pub sector: Sector,
    pub no_candidates: bool,
}

impl SearchOpts {
    fn config(&self, seed: u64) -> CliResult<SearchConfig> {
        let cfg = SearchConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            seed,
            sector: self.sector,
            use_candidates: !self.no_candidates,
            ..SearchConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn sound(ratio: f64, k: f64, tol: Option<f64>) -> bool {
    ratio <= k + tol.unwrap_or(1e-6) * k.max(1.0)
}

pub fn sweep(g: &Global, grid: &GridArgs, opts: &SearchOpts) -> CliResult<Outcome> {
    let cfg = opts.config(g.seed)?;
    let points = grid.points("0:1:0.25")?;
    let model = load_model(&g.model)?;
    let results = sweep_grid(&model, &points, &cfg)?;
    let rows = sweep_rows(&results, g.seed);
    let bytes = render(&rows, g.format)?;
    emit(&bytes, g.out.as_ref())?;
    let bad: Vec<&ncfa_core::SweepRow> = rows.iter().filter(|r| !sound(r.empirical_c, r.k, g.tol)).collect();
    let matched = rows.iter().filter(|r| r.matched).count();
    eprintln!("sweep {}: {} points, {matched} matched their table family, {} soundness violations", model.id(), rows.len(), bad.len());
    for r in &bad {
        eprintln!("  violation at (1/p, 1/q) = ({}, {}): C = {} > K = {}", r.inv_p, r.inv_q, r.empirical_c, r.k);
    }
    Ok(if bad.is_empty() { Outcome::Ok } else { Outcome::Violation })
}

pub fn search(g: &Global, p: &str, q: &str, opts: &SearchOpts, save: Option<&PathBuf>) -> CliResult<Outcome> {
    let (p, q) = (real("--p", p)?, real("--q", q)?);
    if !(p > 0.0 && q > 0.0) {
        return Err(CliError::config("--p and --q must be positive"));
    }
    let cfg = opts.config(g.seed)?;
    let model = load_model(&g.model)?;
    let result = maximize_ratio(&model, p, q, &cfg)?;
    let row = result.to_row(g.seed);
    let bytes = render(std::slice::from_ref(&row), g.format)?;
    if let Some(path) = save {
        let doc = result.best_element.to_doc().to_json();
        std::fs::write(path, doc).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    emit(&bytes, g.out.as_ref())?;
    eprintln!("search {}: C = {:.6}, K = {:.6}, {}", model.id(), row.empirical_c, row.k, result.classification.descriptor());
    Ok(if sound(row.empirical_c, row.k, g.tol) { Outcome::Ok } else { Outcome::Violation })
}

fn element_in_model(model: &PlanarModel, doc: &ElementDoc) -> CliResult<Element> {
    for sector in [Sector::Plus, Sector::Minus] {
        let alg = model.algebra(sector);
        if alg.id() == doc.algebra_id {
            return Ok(Element::from_doc(doc, alg)?);
        }
    }
    Err(CliError::config(format!(
        "element algebra '{}' is neither '{}' nor '{}'",
        doc.algebra_id,
        model.a_plus().id(),
        model.a_minus().id()
    )))
}

pub fn classify_cmd(g: &Global, element: &PathBuf, p: &str, q: &str) -> CliResult<Outcome> {
    let (p, q) = (real("--p", p)?, real("--q", q)?);
    if !(p > 0.0 && q > 0.0) {
        return Err(CliError::config("--p and --q must be positive"));
    }
    let model = load_model(&g.model)?;
    let text = std::fs::read_to_string(element).map_err(|source| CliError::Io { path: element.display().to_string(), source })?;
    let doc = ElementDoc::from_json(&text)?;
    let x = element_in_model(&model, &doc)?;
    if x.is_zero() {
        return Err(ncfa_core::Error::ZeroElement.into());
    }
    let label = classify(&model, &x, p, q, g.tol.unwrap_or(CLASSIFY_TOL))?;
    let fx = model.fourier(&x)?;
    let (norm_p, norm_q) = (x.pnorm(p)?, fx.pnorm(q)?);
    let ratio = norm_q / norm_p;
    let k = k_value(&RegionPoint::from_pq(p, q), model.delta());
    let row = ClassifyRow {
        family: label.family.as_str().to_string(),
        matched_rows: label.matched_rows.iter().map(u8::to_string).collect::<Vec<_>>().join(" "),
        norm_p,
        norm_q,
        ratio,
        k,
        gap: k - ratio,
    };
    let relation = if (k - ratio).abs() <= 1e-8 * k.max(1.0) { "=" } else if ratio < k { "<" } else { ">" };
    println!("{label}, ratio={ratio:.6}, K={k:.6}");
    println!("{}; ratio{relation}K", label.descriptor());
    if let Some(out) = &g.out {
        emit(&render(std::slice::from_ref(&row), g.format)?, Some(out))?;
    }
    Ok(Outcome::Ok)
}

pub fn anomaly(g: &Global, grid: &GridArgs, samples: usize) -> CliResult<Outcome> {
    let points = grid.points("0.5:1:0.125")?;
    let model = load_model(&g.model)?;
    let map = up2_validity_map(&model, &points, samples, g.seed)?;
    let rows: Vec<_> = map.iter().map(|v| v.to_row()).collect();
    emit(&render(&rows, g.format)?, g.out.as_ref())?;
    let negative = rows.iter().filter(|r| r.violated).count();
    eprintln!("anomaly {}: {} admissible points, {negative} with a violating witness", model.id(), rows.len());
    Ok(Outcome::Ok)
}

pub fn validate(g: &Global, samples: usize) -> CliResult<Outcome> {
    let model = load_model(&g.model)?;
    let report = validate_model(&model, samples, g.seed);
    let tol = g.tol.unwrap_or(1e-9);
    emit(&render(std::slice::from_ref(&report), g.format)?, g.out.as_ref())?;
    let worst = report.max_deviation();
    eprintln!("validate-model {}: max deviation {worst:e} (tolerance {tol:e})", model.id());
    Ok(if worst <= tol { Outcome::Ok } else { Outcome::Violation })
}
