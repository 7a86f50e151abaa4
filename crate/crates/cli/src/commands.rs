use std::collections::BTreeSet;
use std::fs;

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};
use ttgeo::abgroup::{epi_exists, oracle_epi_exists, p_groups_up_to};
use ttgeo::family::{check_predicate, ExtensionalTable, Predicate, PredicateOutcome};
use ttgeo::repcore::{chi_decompose, realize, ComplexFixture, EpiCategory, RankWindow};
use ttgeo::spectrum::{cb_rank, is_isolated, point_space, space_description, Decision};
use ttgeo::ttsupport::{
    classify_ideals, defining_stage, format_expr, hsupp, ideal_of, krull_chain, parse_expr, random_expr, vi_class,
    ObjectExpr, Support,
};
use ttgeo::{Error, Family, FamilySpec, FinAbGroup, Result};

use crate::cache::StageCache;
use crate::config::{Command, Format, RunConfig, Sweep};
use crate::poset::export_poset;

/// Outcome of a subcommand before rendering.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub dot: Option<String>,
    /// A refutation or failed check: exit status 1.
    pub refuted: bool,
}

impl Report {
    fn new(json: Value, text: impl Into<String>) -> Self {
        Self {
            json,
            text: text.into(),
            dot: None,
            refuted: false,
        }
    }
}

/// Reads `--family` as inline JSON (starting with `{`) or as a path.
pub fn load_family(arg: &str) -> Result<Family> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return Family::from_json(trimmed);
    }
    let text = fs::read_to_string(arg)
        .map_err(|e| Error::InvalidSpec(format!("cannot read family file {arg}: {e}")))?;
    Family::from_json(&text)
}

fn require_family(cfg: &RunConfig) -> Result<Family> {
    let arg = cfg
        .family
        .as_deref()
        .ok_or_else(|| Error::InvalidSpec("this subcommand needs --family".into()))?;
    load_family(arg)
}

fn warm_stage(f: &Family, n: u64) -> Result<()> {
    match StageCache::from_env() {
        Some(cache) => cache.stage(f, n).map(drop),
        None => f.stage(n).map(drop),
    }
}

pub fn dispatch(cfg: &RunConfig) -> Result<Report> {
    match &cfg.command {
        Command::Spectrum {
            dot,
            stage: at,
            with_limits,
        } => spectrum(cfg, *dot || cfg.format == Format::Dot, *at, *with_limits),
        Command::CbRank {} => cb(cfg),
        Command::Hsupp { expr } => support(cfg, expr),
        Command::Ideal {
            gens,
            member,
            leq,
            classify,
        } => ideal(cfg, gens, member, leq, *classify),
        Command::ViClassify { expr, p, window } => vi(cfg, expr, *p, *window),
        Command::Chain { p, length } => chain(cfg, *p, *length),
        Command::Oracle {
            sweep,
            primes,
            group,
            count,
            depth,
        } => oracle(cfg, *sweep, primes, group, *count, *depth),
        Command::CheckPredicate { predicate } => predicate_check(cfg, predicate),
    }
}

fn spectrum(cfg: &RunConfig, dot: bool, at: Option<u64>, with_limits: bool) -> Result<Report> {
    let f = require_family(cfg)?;
    let ascii = cfg.ascii;
    if dot {
        let n = at.unwrap_or(cfg.stage_cap);
        warm_stage(&f, n)?;
        let text = export_poset(&f, n, with_limits, ascii)?;
        let mut r = Report::new(json!({ "dot": text }), text.clone());
        r.dot = Some(text);
        return Ok(r);
    }
    if f.has_finite_stages() {
        warm_stage(&f, cfg.stage_cap)?;
    }
    let points = point_space(&f, cfg.stage_cap)?;
    let desc = space_description(&f)?;
    let rank = cb_rank(&desc);
    let finite: Vec<String> = points.finite.iter().map(|m| m.label()).collect();
    let symbolic: Vec<String> = points.symbolic.iter().map(|x| x.label(true)).collect();
    let accumulation: Vec<String> = points
        .finite
        .iter()
        .cloned()
        .map(ttgeo::spectrum::ProfinitePoint::Stabilizing)
        .chain(points.symbolic.iter().cloned())
        .filter(|x| matches!(is_isolated(&f, x), Ok(false)))
        .map(|x| x.label(true))
        .collect();
    let mut json = json!({
        "family": f.name(),
        "stage_cap": points.stage_cap,
        "points_finite": finite,
        "points_symbolic": symbolic,
        "accumulation_points": accumulation,
        "space": desc.render(ascii),
    });
    if let Some(extra) = &points.extra_closed_point {
        json["extra_closed_point"] = json!(extra);
    }
    match &rank {
        Ok(r) => json["cb_rank"] = json!(r),
        Err(e) => json["cb_rank_unavailable"] = json!(e.to_string()),
    }
    let mut text = format!(
        "{}: {}\nfinite points at stage {}: {}\nlimit points: {}\n",
        f.name(),
        desc.render(ascii),
        points.stage_cap,
        finite.join(", "),
        if symbolic.is_empty() { "none".into() } else { symbolic.join(", ") },
    );
    if let Some(extra) = &points.extra_closed_point {
        text.push_str(&format!("closed point: {extra}\n"));
    }
    match rank {
        Ok(r) => text.push_str(&format!("Cantor-Bendixson rank: {}\n", r.render(ascii))),
        Err(e) => text.push_str(&format!("Cantor-Bendixson rank: {e}\n")),
    }
    Ok(Report::new(json, text))
}

fn cb(cfg: &RunConfig) -> Result<Report> {
    let f = require_family(cfg)?;
    let desc = space_description(&f)?;
    let rank = cb_rank(&desc)?;
    Ok(Report::new(
        json!({ "family": f.name(), "space": desc.render(cfg.ascii), "cb_rank": rank }),
        format!("{}\n", rank.render(cfg.ascii)),
    ))
}

fn support(cfg: &RunConfig, expr: &str) -> Result<Report> {
    let f = require_family(cfg)?;
    let x = parse_expr(&f, expr)?;
    let s = hsupp(&f, &x)?;
    let mut json = json!({
        "family": f.name(),
        "expr": format_expr(&f, &x),
        "support": s.render(cfg.ascii),
    });
    if f.has_finite_stages() {
        json["defining_stage"] = json!(defining_stage(&f, &x)?);
    }
    let mut text = format!("hsupp({}) = {}\n", format_expr(&f, &x), s.render(cfg.ascii));
    let mut refuted = false;
    if let (Some(t), Support::Clopen(c)) = (f.table(), &s) {
        if t.require_groups().is_ok() {
            let cat = EpiCategory::new(&f)?;
            let oracle = realize(&cat, &x)?.hsupp_oracle();
            let names: BTreeSet<String> = oracle.iter().map(|&k| cat.names()[k].clone()).collect();
            let calculus: BTreeSet<String> = c.members().iter().map(|m| m.label()).collect();
            refuted = names != calculus;
            json["oracle_support"] = json!(names);
            json["oracle_agrees"] = json!(!refuted);
            text.push_str(&format!(
                "homology support: {{{}}}{}\n",
                names.into_iter().collect::<Vec<_>>().join(", "),
                if refuted { " (MISMATCH)" } else { "" }
            ));
        }
    }
    let mut r = Report::new(json, text);
    r.refuted = refuted;
    Ok(r)
}

fn ideal(cfg: &RunConfig, gens: &[String], members: &[String], leq: &[String], classify: bool) -> Result<Report> {
    let f = require_family(cfg)?;
    let ascii = cfg.ascii;
    let mut json = json!({ "family": f.name() });
    let mut text = String::new();
    if classify {
        let c = classify_ideals(&f)?;
        text.push_str(&format!(
            "space: {}\nthick ideals: {}\nfinitely generated: {}\n",
            c.space, c.lattice, c.finitely_generated
        ));
        if let Some(n) = &c.note {
            text.push_str(&format!("note: {n}\n"));
        }
        json["classification"] = serde_json::to_value(&c).expect("serializable");
    }
    if !gens.is_empty() || !members.is_empty() || !leq.is_empty() {
        let gens: Vec<ObjectExpr> = gens.iter().map(|s| parse_expr(&f, s)).collect::<Result<_>>()?;
        let i = ideal_of(&f, &gens)?;
        let budget = cfg.stage_cap;
        json["generators"] = json!(gens.iter().map(|x| format_expr(&f, x)).collect::<Vec<_>>());
        json["support"] = json!(i.render(ascii));
        text.push_str(&format!("ideal support: {}\n", i.render(ascii)));
        let mut tests = Vec::new();
        for m in members {
            let x = parse_expr(&f, m)?;
            let d = i.contains(&x, budget)?;
            text.push_str(&format!("{} in ideal: {}\n", format_expr(&f, &x), d.as_str()));
            tests.push(json!({ "expr": format_expr(&f, &x), "member": d }));
        }
        json["members"] = json!(tests);
        if !leq.is_empty() {
            let other: Vec<ObjectExpr> = leq.iter().map(|s| parse_expr(&f, s)).collect::<Result<_>>()?;
            let j = ideal_of(&f, &other)?;
            let d: Decision = i.leq(&j, budget)?;
            text.push_str(&format!("ideal <= <{}>: {}\n", leq.join(", "), d.as_str()));
            json["leq"] = json!({
                "generators": other.iter().map(|x| format_expr(&f, x)).collect::<Vec<_>>(),
                "result": d,
            });
        }
    } else if !classify {
        return Err(Error::InvalidSpec("ideal needs --gen, --member, --leq or --classify".into()));
    }
    Ok(Report::new(json, text))
}

fn vi(cfg: &RunConfig, expr: &str, p: u64, window: usize) -> Result<Report> {
    let f = Family::new(FamilySpec::ElementaryAbelian { p })?;
    let x = parse_expr(&f, expr)?;
    let class = vi_class(&f, &x)?;
    let w = RankWindow::new(&f, window)?;
    let homology: BTreeSet<u64> = w.support(&x)?;
    let predicted: BTreeSet<u64> = (0..=window as u64).filter(|&n| class.contains(n)).collect();
    let agrees = homology == predicted;
    let rendered = class.render(cfg.ascii);
    let json = json!({
        "p": p,
        "expr": format_expr(&f, &x),
        "class": rendered,
        "cofinite": class.is_cofinite(),
        "window": window,
        "homology_support": homology,
        "homology_agrees": agrees,
    });
    let mut text = format!("{rendered}\n");
    if !agrees {
        text.push_str(&format!("homology support up to rank {window}: {homology:?} (MISMATCH)\n"));
    }
    let mut r = Report::new(json, text);
    r.refuted = !agrees;
    Ok(r)
}

fn chain(cfg: &RunConfig, p: u64, length: u32) -> Result<Report> {
    let f = Family::new(FamilySpec::AbelianP { p })?;
    let links = krull_chain(&f, length)?;
    let ascii = cfg.ascii;
    let mut text = String::from(if ascii { "p_1" } else { "𝔭_1" });
    let mut rows = Vec::new();
    for l in &links {
        text.push_str(if ascii { " > " } else { " ⊋ " });
        text.push_str(&l.label(ascii));
        rows.push(json!({
            "level": l.level,
            "prime": l.label(ascii),
            "witness": format_expr(&f, &l.witness),
            "witness_in_previous": l.witness_in_previous,
            "witness_in_prime": l.witness_in_prime,
            "strict": l.is_strict(),
        }));
    }
    text.push('\n');
    for l in &links {
        text.push_str(&format!(
            "  {}: witness {} ({} previous, {} this prime)\n",
            l.label(ascii),
            format_expr(&f, &l.witness),
            if l.witness_in_previous { "in" } else { "not in" },
            if l.witness_in_prime { "in" } else { "not in" },
        ));
    }
    let strict = links.iter().all(|l| l.is_strict());
    let mut r = Report::new(json!({ "family": f.name(), "links": rows, "strict": strict }), text);
    r.refuted = !strict;
    Ok(r)
}

fn epi_sweep(primes: &[u64], order_cap: u64) -> Result<Value> {
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for &p in primes {
        let groups = p_groups_up_to(p, order_cap as u128);
        for g in &groups {
            for h in &groups {
                let rule = epi_exists(g, h);
                let oracle = oracle_epi_exists(g, h, g.order() * h.order())?;
                checked += 1;
                if rule != oracle {
                    failures.push(json!({ "source": g, "target": h, "rule": rule, "oracle": oracle }));
                }
            }
        }
    }
    Ok(json!({ "name": "epi", "checked": checked, "failures": failures }))
}

fn support_sweep(group: &str, count: usize, depth: usize, seed: u64) -> Result<Value> {
    let g: FinAbGroup = group.parse()?;
    let f = Family::new(FamilySpec::Extensional(ExtensionalTable::from_quotients_of(&g)))?;
    let cat = EpiCategory::new(&f)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut peeled = 0usize;
    for _ in 0..count {
        let x = random_expr(&f, &mut rng, depth, 8)?;
        let c = realize(&cat, &x)?;
        let oracle: BTreeSet<String> = c.hsupp_oracle().iter().map(|&k| cat.names()[k].clone()).collect();
        let Support::Clopen(s) = hsupp(&f, &x)? else {
            unreachable!("extensional supports are clopen")
        };
        let calculus: BTreeSet<String> = s.members().iter().map(|m| m.label()).collect();
        let trace = chi_decompose(&cat, &c);
        let trace_ok = matches!(&trace, Ok(t) if t.is_valid() && t.steps.len() == oracle.len());
        peeled += trace.as_ref().map_or(0, |t| t.steps.len());
        if oracle != calculus || !trace_ok {
            failures.push(json!({
                "expr": format_expr(&f, &x),
                "calculus": calculus,
                "oracle": oracle,
                "peeling": match &trace {
                    Ok(t) => serde_json::to_value(t).expect("serializable"),
                    Err(e) => json!(e.to_string()),
                },
                "complex": serde_json::to_value(ComplexFixture::from_complex(&cat, &c)?).expect("serializable"),
            }));
        }
    }
    Ok(json!({
        "name": "support",
        "family": f.name(),
        "checked": count,
        "peeling_steps": peeled,
        "failures": failures,
    }))
}

fn oracle(cfg: &RunConfig, sweep: Sweep, primes: &[u64], group: &str, count: usize, depth: usize) -> Result<Report> {
    let mut sweeps = Vec::new();
    if matches!(sweep, Sweep::All | Sweep::Epi) {
        sweeps.push(epi_sweep(primes, cfg.order_cap)?);
    }
    if matches!(sweep, Sweep::All | Sweep::Support) {
        sweeps.push(support_sweep(group, count, depth, cfg.seed)?);
    }
    let mut text = String::new();
    let mut passed = true;
    for s in &sweeps {
        let failures = s["failures"].as_array().map_or(0, Vec::len);
        passed &= failures == 0;
        text.push_str(&format!(
            "{}: {} checked, {} failures: {}\n",
            s["name"].as_str().unwrap_or_default(),
            s["checked"],
            failures,
            if failures == 0 { "PASS" } else { "FAIL" }
        ));
        for fail in s["failures"].as_array().into_iter().flatten() {
            text.push_str(&format!("  counterexample: {fail}\n"));
        }
    }
    let mut r = Report::new(json!({ "passed": passed, "sweeps": sweeps }), text);
    r.refuted = !passed;
    Ok(r)
}

fn predicate_check(cfg: &RunConfig, predicate: &str) -> Result<Report> {
    let f = require_family(cfg)?;
    let pred: Predicate = predicate.parse()?;
    let outcome = check_predicate(&f, pred, cfg.order_cap as u128)?;
    let text = match &outcome {
        PredicateOutcome::Certified { basis, checked } => {
            format!("certified ({basis}; {checked} cases checked)\n")
        }
        PredicateOutcome::Refuted { witness, reason } => {
            let w: Vec<String> = witness.iter().map(|m| m.label()).collect();
            format!("refuted by ({}): {reason}\n", w.join(", "))
        }
        PredicateOutcome::UnknownAtCap { reason } => format!("unknown at cap {}: {reason}\n", cfg.order_cap),
    };
    let refuted = matches!(outcome, PredicateOutcome::Refuted { .. });
    let mut outcome_json = serde_json::to_value(&outcome).expect("serializable");
    if let PredicateOutcome::Refuted { witness, .. } = &outcome {
        outcome_json["witness"] = json!(witness.iter().map(|m| m.label()).collect::<Vec<_>>());
    }
    let mut r = Report::new(
        json!({ "family": f.name(), "predicate": pred.to_string(), "outcome": outcome_json }),
        text,
    );
    r.refuted = refuted;
    Ok(r)
}
