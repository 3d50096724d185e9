use std::error::Error as StdError;
use std::fs;
use std::path::Path;

use clap::Args;
use lierem_core::algebras::{affine_generators, projective_generators, AlgebraKind, AlgebraSpec};
use lierem_core::analysis::{self, LocusOptions, Parametrization, PdeSystem};
use lierem_core::catalog::{self, CatalogEntry};
use lierem_core::sample::Sampler;
use lierem_core::syntax::{parse_coord, parse_field, parse_fields, parse_solved, parse_system};
use lierem_core::vfield;
use lierem_core::{algebra_dims, JetSpec};
use serde_json::{json, Value};

use crate::report::{paint, Report};
use crate::{SampleArgs, SpecArgs};

type Result<T> = std::result::Result<T, Box<dyn StdError>>;

/// A catalog entry or a system file with an optional chart.
#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// Catalog name, e.g. strong222 or det_hessian(3).
    #[arg(long, conflicts_with = "system", required_unless_present = "system")]
    pub catalog: Option<String>,
    /// File with one equation per line.
    #[arg(long)]
    pub system: Option<String>,
    /// Solved-form chart for the system file ("coord = expr" per line).
    #[arg(long, requires = "system")]
    pub param: Option<String>,
    #[command(flatten)]
    pub spec: SpecArgs,
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}").into())
}

/// Spec from flags, checked against (or defaulted from) a fixed one.
fn resolve_spec(a: SpecArgs, fixed: Option<JetSpec>) -> Result<JetSpec> {
    if let Some(f) = fixed {
        for (flag, given, want) in [("--n", a.n, f.n), ("--m", a.m, f.m), ("--r", a.r, f.r)] {
            if given.is_some_and(|g| g != want) {
                return Err(format!("{flag} {} conflicts with the entry's value {want}", given.unwrap_or(0)).into());
            }
        }
        return Ok(f);
    }
    match (a.n, a.m, a.r) {
        (Some(n), Some(m), Some(r)) => Ok(JetSpec::new(n, m, r)?),
        _ => Err("--n, --m and --r are required here".into()),
    }
}

fn load_algebra(arg: &str, n: usize, m: usize) -> Result<AlgebraSpec> {
    Ok(match arg {
        "affine" => affine_generators(n, m)?,
        "projective" => projective_generators(n, m)?,
        path => {
            let gens = parse_fields(&read(path)?, &JetSpec::new(n, m, 1)?)?;
            AlgebraSpec::custom(n, m, gens)?
        }
    })
}

fn system_from_files(spec: JetSpec, system: &str, param: Option<&str>) -> Result<PdeSystem> {
    let name = Path::new(system).file_stem().map_or_else(|| system.to_string(), |s| s.to_string_lossy().into_owned());
    let sys = PdeSystem::new(spec, parse_system(&read(system)?, &spec)?)?.with_name(name);
    Ok(match param {
        Some(p) => sys.with_param(Parametrization::new(&spec, parse_solved(&read(p)?, &spec)?, vec![])?)?,
        None => sys,
    })
}

fn load_target(t: &SystemArgs) -> Result<(PdeSystem, Option<CatalogEntry>)> {
    if let Some(name) = &t.catalog {
        let e = catalog::get(name)?;
        resolve_spec(t.spec, Some(*e.system.spec()))?;
        return Ok((e.system.clone(), Some(e)));
    }
    let path = t.system.as_deref().ok_or("one of --catalog or --system is required")?;
    let spec = resolve_spec(t.spec, None)?;
    Ok((system_from_files(spec, path, t.param.as_deref())?, None))
}

fn sys_name(sys: &PdeSystem) -> String {
    sys.name().unwrap_or("system").to_string()
}

fn expected_applies(e: &CatalogEntry, alg: &AlgebraSpec) -> bool {
    e.expected.algebra == alg.kind() && alg.kind() != AlgebraKind::Custom
}

pub fn dim(a: SpecArgs) -> Result<Report> {
    let spec = resolve_spec(a, None)?;
    let (aff, proj) = algebra_dims(spec.n, spec.m);
    let jet = spec.dimension();
    let mut rep = Report::new("dim", Some(spec));
    rep.result = json!({"jet_dim": jet, "affine_dim": aff, "projective_dim": proj});
    rep.line(format!("jet_dim        {jet}"));
    rep.line(format!("affine_dim     {aff}"));
    rep.line(format!("projective_dim {proj}"));
    Ok(rep)
}

pub fn prolong(a: SpecArgs, file: Option<String>, expr: Option<String>, coord: Option<String>) -> Result<Report> {
    let spec = resolve_spec(a, None)?;
    let text = match (&file, &expr) {
        (Some(f), _) => read(f)?
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .collect::<Vec<_>>()
            .join("; "),
        (None, Some(e)) => e.clone(),
        (None, None) => return Err("give --field FILE or -e TEXT".into()),
    };
    let v = parse_field(&text, &spec)?;
    let p = vfield::prolong(&v, spec.r)?;
    let mut rep = Report::new("prolong", Some(spec));
    rep.input("field", v.to_string());
    let coords = match &coord {
        Some(c) => {
            rep.input("coord", c.clone());
            vec![parse_coord(c, &spec)?]
        }
        None => spec.coords(),
    };
    let mut coeffs = Vec::new();
    for c in coords {
        let e = p.coeff(c).ok_or_else(|| format!("{c} is outside the jet space"))?;
        if coord.is_some() || !e.is_zero() {
            coeffs.push(json!({"coord": c.to_string(), "coeff": e.to_string()}));
            rep.line(format!("{c}: {e}"));
        }
    }
    if coord.is_none() {
        rep.line("(omitted coefficients are zero)");
    }
    rep.result = json!({"coefficients": coeffs});
    Ok(rep)
}

pub fn check(t: &SystemArgs, algebra: &str) -> Result<Report> {
    let (sys, entry) = load_target(t)?;
    let spec = *sys.spec();
    let alg = load_algebra(algebra, spec.n, spec.m)?;
    let mut rep = Report::new("check", Some(spec));
    rep.input("system", sys_name(&sys));
    rep.input("algebra", algebra);
    let mut rejected = Vec::new();
    for (k, g) in alg.generators().iter().enumerate() {
        if !analysis::is_admitted(&sys, g)? {
            rejected.push(json!({"index": k, "field": g.to_string()}));
            rep.line(format!("generator {k} not admitted: {g}"));
        }
    }
    let all = rejected.is_empty();
    rep.line(format!(
        "{}: {} of {} {} generators admitted",
        sys_name(&sys),
        alg.dim() - rejected.len(),
        alg.dim(),
        alg.kind()
    ));
    let mut result = json!({
        "algebra_kind": alg.kind().to_string(),
        "algebra_dim": alg.dim(),
        "all_admitted": all,
        "not_admitted": rejected,
    });
    if let Some(e) = &entry {
        rep.warnings.extend(e.warnings.iter().cloned());
        if e.expected.admits.contains(&alg.kind()) {
            result["expected_all_admitted"] = json!(true);
            rep.mismatch |= !all;
        }
    }
    rep.result = result;
    Ok(rep)
}

fn on_target(a: SpecArgs, on: &str, param: Option<&str>) -> Result<(PdeSystem, Option<CatalogEntry>)> {
    match catalog::get(on) {
        Ok(e) => {
            if param.is_some() {
                return Err("--param only applies to system files".into());
            }
            resolve_spec(a, Some(*e.system.spec()))?;
            Ok((e.system.clone(), Some(e)))
        }
        Err(_) if Path::new(on).exists() => Ok((system_from_files(resolve_spec(a, None)?, on, param)?, None)),
        Err(e) => Err(format!("{e}, and no file named {on} exists").into()),
    }
}

pub fn rank(a: SpecArgs, algebra: &str, on: Option<String>, param: Option<String>, s: SampleArgs) -> Result<Report> {
    let (target, spec) = match &on {
        Some(name) => {
            let (sys, e) = on_target(a, name, param.as_deref())?;
            let spec = *sys.spec();
            (Some((sys, e)), spec)
        }
        None => (None, resolve_spec(a, None)?),
    };
    let alg = load_algebra(algebra, spec.n, spec.m)?;
    let mut rep = Report::new("rank", Some(spec));
    rep.input("algebra", algebra);
    rep.input("samples", s.samples);
    rep.input("seed", s.seed);
    let Some((sys, entry)) = target else {
        let r = analysis::generic_rank(&alg, spec.r, s.samples, s.seed)?;
        rep.line(format!("generic rank {} (jet_dim {}, algebra_dim {})", r.generic_rank, r.jet_dim, r.algebra_dim));
        rep.result = json!({"generic_rank": r.generic_rank, "jet_dim": r.jet_dim, "algebra_dim": r.algebra_dim});
        rep.samples = r.per_sample;
        return Ok(rep);
    };
    rep.input("on", sys_name(&sys));
    let r = analysis::rank_on_manifold(&alg, &sys, s.samples, s.seed)?;
    let on_rank = r.on_manifold_rank.unwrap_or(0);
    rep.line(format!("generic rank     {}", r.generic_rank));
    rep.line(format!("on {:<13} {on_rank}", sys_name(&sys)));
    rep.line(format!("equation_dim     {}", sys.equation_dim()));
    let mut result = json!({
        "generic_rank": r.generic_rank,
        "on_manifold_rank": on_rank,
        "equation_dim": sys.equation_dim(),
        "jet_dim": r.jet_dim,
        "algebra_dim": r.algebra_dim,
        "on_manifold_samples": r.on_manifold_per_sample.iter().map(|x| json!({"seed_index": x.seed_index, "rank": x.rank})).collect::<Vec<_>>(),
    });
    if sys.param().is_none() {
        rep.warnings
            .push("no chart: on-manifold points are algebraic points of the equation over a number field".into());
    }
    if let Some(e) = entry {
        rep.warnings.extend(e.warnings.iter().cloned());
        if expected_applies(&e, &alg) {
            let ok = r.generic_rank == e.expected.generic_rank && on_rank == e.expected.on_manifold_rank;
            result["expected"] =
                json!({"generic_rank": e.expected.generic_rank, "on_manifold_rank": e.expected.on_manifold_rank});
            result["matches_expected"] = json!(ok);
            rep.mismatch |= !ok;
            rep.line(format!(
                "reference        {} / {} {}",
                e.expected.generic_rank,
                e.expected.on_manifold_rank,
                if ok { paint("ok", "32") } else { paint("differs", "31") }
            ));
        }
    }
    rep.result = result;
    rep.samples = r.per_sample;
    Ok(rep)
}

pub fn locus(a: SpecArgs, algebra: &str, verify: Option<String>, max_terms: usize, s: SampleArgs) -> Result<Report> {
    let entry = verify.as_deref().map(catalog::get).transpose()?;
    let spec = resolve_spec(a, entry.as_ref().map(|e| *e.system.spec()))?;
    let alg = load_algebra(algebra, spec.n, spec.m)?;
    let mut rep = Report::new("locus", Some(spec));
    rep.input("algebra", algebra);
    rep.input("seed", s.seed);
    let Some(e) = entry else {
        rep.input("max_terms", max_terms);
        let l = analysis::rank_drop_locus(&alg, spec.r, &LocusOptions { max_terms, samples: 3, seed: s.seed })?;
        rep.line(format!("generic rank {}", l.generic_rank));
        for f in &l.factors {
            rep.line(format!("rank {} on: {} = 0", f.rank_on, f.factor));
        }
        if l.factors.is_empty() {
            rep.line("no rank-drop hypersurface");
        }
        rep.result = json!({
            "generic_rank": l.generic_rank,
            "factors": l.factors.iter().map(|f| json!({"factor": f.factor.to_string(), "terms": f.factor.len(), "rank_on": f.rank_on})).collect::<Vec<_>>(),
            "rejected": l.rejected.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        });
        return Ok(rep);
    };
    rep.input("verify", e.name.clone());
    rep.input("samples", s.samples);
    rep.warnings.extend(e.warnings.iter().cloned());
    let g = analysis::generic_rank(&alg, spec.r, s.samples, s.seed)?;
    let points = if let Some(chart) = e.system.param() {
        (0..s.samples)
            .map(|k| chart.sample_point(&mut Sampler::new(s.seed, k as u64)))
            .collect::<lierem_core::Result<Vec<_>>>()?
    } else if e.name == "mov3" {
        (0..s.samples)
            .map(|k| {
                let mut sm = Sampler::new(s.seed, k as u64);
                let (a, t) = (sm.rational(), sm.rational());
                catalog::mov_point_family(&a, &t, &mut sm)
            })
            .collect::<lierem_core::Result<Vec<_>>>()?
    } else {
        return Err(format!("{} has no chart or point family to verify on", e.name).into());
    };
    let ranks = analysis::rank_at_points(&alg, spec.r, &points)?;
    let on = ranks.iter().copied().max().unwrap_or(0);
    rep.line(format!("generic rank {}", g.generic_rank));
    rep.line(format!("ranks on {}: {ranks:?}", e.name));
    let mut result = json!({"generic_rank": g.generic_rank, "ranks_on": ranks, "max_rank_on": on});
    if expected_applies(&e, &alg) {
        let ok = g.generic_rank == e.expected.generic_rank && on <= e.expected.on_manifold_rank;
        result["expected"] =
            json!({"generic_rank": e.expected.generic_rank, "max_rank_on": e.expected.on_manifold_rank});
        result["verified"] = json!(ok);
        rep.mismatch |= !ok;
        rep.line(if ok { paint("rank drop confirmed", "32") } else { paint("rank drop not confirmed", "31") });
    }
    rep.result = result;
    rep.samples = g.per_sample;
    Ok(rep)
}

pub fn verdict(t: &SystemArgs, algebra: &str, locus: Option<usize>, s: SampleArgs) -> Result<Report> {
    let (sys, entry) = load_target(t)?;
    let spec = *sys.spec();
    let alg = load_algebra(algebra, spec.n, spec.m)?;
    let opts = locus.map(|max_terms| LocusOptions { max_terms, samples: 3, seed: s.seed });
    let v = analysis::verdict(&alg, &sys, s.samples, s.seed, opts.as_ref())?;
    let mut rep = Report::new("verdict", Some(spec));
    rep.input("system", sys_name(&sys));
    rep.input("algebra", algebra);
    rep.input("samples", s.samples);
    rep.input("seed", s.seed);
    rep.input("locus", locus.is_some());
    let mut result = json!({
        "conclusion": v.conclusion.to_string(),
        "evidence": v.evidence.map(|e| e.to_string()),
        "equation_dim": v.equation_dim,
        "algebra_dim": v.algebra_dim,
        "jet_dim": v.jet_dim,
        "necessary_strong": v.necessary_strong,
        "necessary_weak": v.necessary_weak,
        "not_admitted": v.not_admitted,
        "generic_rank": v.generic_rank,
        "on_manifold_rank": v.on_manifold_rank,
        "rank_off_manifold_exceeds_dim": v.rank_off_manifold_exceeds_dim,
        "rank_on_manifold_equals_dim": v.rank_on_manifold_equals_dim,
    });
    rep.line(format!(
        "{}: {} with respect to the {} algebra",
        sys_name(&sys),
        paint(&v.conclusion.to_string(), "1"),
        alg.kind()
    ));
    if let Some(ev) = v.evidence {
        rep.line(format!("off-manifold rank condition {ev}"));
    }
    rep.line(format!(
        "equation_dim {}, algebra_dim {}, generic rank {}, on-manifold rank {}",
        v.equation_dim,
        v.algebra_dim,
        opt(v.generic_rank),
        opt(v.on_manifold_rank)
    ));
    if !v.not_admitted.is_empty() {
        rep.line(format!("generators not admitted: {:?}", v.not_admitted));
    }
    if let Some(e) = entry {
        rep.warnings.extend(e.warnings.iter().cloned());
        if expected_applies(&e, &alg) && v.on_manifold_rank.is_some() {
            let ok = v.generic_rank == Some(e.expected.generic_rank)
                && v.on_manifold_rank == Some(e.expected.on_manifold_rank);
            result["matches_expected"] = json!(ok);
            rep.mismatch |= !ok;
        }
    }
    rep.result = result;
    Ok(rep)
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

pub fn hierarchy(n: usize, m: usize) -> Result<Report> {
    let sys = catalog::strongnm2_system(n, m)?;
    let mut rep = Report::new("hierarchy", Some(*sys.spec()));
    rep.input("n", n);
    rep.input("m", m);
    rep.warnings = catalog::hierarchy_warnings(&sys);
    let eqs: Vec<String> = sys.deltas().iter().map(|d| d.to_string()).collect();
    rep.line(format!(
        "# {} equations, equation_dim {} in jet_dim {}",
        eqs.len(),
        sys.equation_dim(),
        sys.spec().dimension()
    ));
    rep.lines.extend(eqs.iter().cloned());
    rep.result = json!({
        "equations": eqs,
        "count": sys.deltas().len(),
        "equation_dim": sys.equation_dim(),
        "jet_dim": sys.spec().dimension(),
        "formula_dim": catalog::hierarchy_dim_formula(n, m),
    });
    Ok(rep)
}

fn entry_json(e: &CatalogEntry) -> Value {
    let s = e.system.spec();
    json!({
        "name": e.name,
        "n": s.n, "m": s.m, "r": s.r,
        "equations": e.system.deltas().len(),
        "equation_dim": e.system.equation_dim(),
        "chart": e.system.param().is_some(),
        "algebra": e.expected.algebra.to_string(),
        "generic_rank": e.expected.generic_rank,
        "on_manifold_rank": e.expected.on_manifold_rank,
        "admits": e.expected.admits.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
    })
}

pub fn catalog_list() -> Result<Report> {
    let mut rep = Report::new("catalog", None);
    rep.input("action", "list");
    let mut entries = Vec::new();
    rep.line(format!(
        "{:<16} {:>2} {:>2} {:>2} {:>4} {:>4}  {:<10} {}",
        "name", "n", "m", "r", "eqs", "dim", "algebra", "ranks"
    ));
    for name in catalog::NAMES {
        let e = catalog::get(if name == "det_hessian(n)" { "det_hessian(3)" } else { name })?;
        let s = e.system.spec();
        rep.line(format!(
            "{:<16} {:>2} {:>2} {:>2} {:>4} {:>4}  {:<10} {}/{}",
            e.name,
            s.n,
            s.m,
            s.r,
            e.system.deltas().len(),
            e.system.equation_dim(),
            e.expected.algebra.to_string(),
            e.expected.generic_rank,
            e.expected.on_manifold_rank
        ));
        entries.push(entry_json(&e));
    }
    rep.line("det_hessian(N) accepts any N >= 2");
    rep.result = json!({"entries": entries});
    Ok(rep)
}

pub fn catalog_show(name: &str) -> Result<Report> {
    let e = catalog::get(name)?;
    let mut rep = Report::new("catalog", Some(*e.system.spec()));
    rep.input("action", "show");
    rep.input("name", name);
    rep.warnings = e.warnings.clone();
    let eqs: Vec<String> = e.system.deltas().iter().map(|d| d.to_string()).collect();
    rep.lines.extend(eqs.iter().cloned());
    let mut result = entry_json(&e);
    result["deltas"] = json!(eqs);
    if let Some(chart) = e.system.param() {
        let solved: Vec<String> = chart.solved().iter().map(|(c, v)| format!("{c} = {v}")).collect();
        rep.line("# chart");
        rep.lines.extend(solved.iter().map(|l| format!("# {l}")));
        result["chart"] = json!(solved);
    }
    rep.result = result;
    Ok(rep)
}
