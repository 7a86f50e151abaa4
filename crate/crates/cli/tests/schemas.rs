//! Keeps `schemas/` in step with the serialized types.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use serde_json::Value;
use ttgeo::family::{ExtensionalTable, FamilySpec};
use ttgeo::repcore::{realize, ComplexFixture, EpiCategory};
use ttgeo::ttsupport::parse_expr;
use ttgeo::Family;
use ttgeo_cli::{run_args, Command, RunConfig};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn schema(name: &str) -> Value {
    let path = root().join("schemas").join(name);
    serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap()
}

fn keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

/// The `const` of `field` in every `oneOf` branch, resolving local `$ref`s.
fn branch_consts(s: &Value, branches: &Value, field: &str) -> BTreeSet<String> {
    branches
        .as_array()
        .unwrap()
        .iter()
        .map(|b| {
            let b = match b["$ref"].as_str() {
                Some(r) => s.pointer(r.trim_start_matches('#')).unwrap(),
                None => b,
            };
            b["properties"][field]["const"].as_str().unwrap().to_string()
        })
        .collect()
}

/// Checks that `value` only uses properties declared by `branch` and has the required ones.
fn conforms(value: &Value, branch: &Value) -> bool {
    let declared = keys(&branch["properties"]);
    let required: BTreeSet<String> = branch["required"]
        .as_array()
        .map(|r| r.iter().map(|x| x.as_str().unwrap().to_string()).collect())
        .unwrap_or_default();
    let present = keys(value);
    present.is_subset(&declared) && required.is_subset(&present)
}

fn family_branch<'a>(s: &'a Value, kind: &str) -> &'a Value {
    &s["$defs"][kind]
}

#[test]
fn family_schema_covers_every_kind() {
    let s = schema("family.schema.json");
    let specs = [
        FamilySpec::ElementaryAbelian { p: 2 },
        FamilySpec::CyclicP { p: 3 },
        FamilySpec::CyclicPrimeOrder,
        FamilySpec::CyclicAll { max_prime: Some(5) },
        FamilySpec::AbelianPRank { p: 2, r: 2 },
        FamilySpec::AbelianRank { r: 2, max_prime: None },
        FamilySpec::AbelianPExponent { p: 2, l: 3 },
        FamilySpec::AbelianP { p: 5 },
        FamilySpec::Extensional(ExtensionalTable::from_quotients_of(&"2:[2,1]".parse().unwrap())),
    ];
    let mut seen = BTreeSet::new();
    for spec in &specs {
        let v = serde_json::to_value(spec).unwrap();
        let kind = v["kind"].as_str().unwrap().to_string();
        assert!(conforms(&v, family_branch(&s, &kind)), "{kind}: {v}");
        seen.insert(kind);
    }
    assert_eq!(seen, branch_consts(&s, &s["oneOf"], "kind"));
}

#[test]
fn run_config_schema_covers_every_command() {
    let s = schema("run-config.schema.json");
    let branches = &s["$defs"]["command"]["oneOf"];
    let examples = [
        vec!["spectrum", "--stage", "3"],
        vec!["cb-rank"],
        vec!["hsupp", "--expr", "e[2]"],
        vec!["ideal", "--gen", "e[2]", "--classify"],
        vec!["vi-classify", "--expr", "aug[2]"],
        vec!["chain"],
        vec!["oracle"],
        vec!["check-predicate", "--predicate", "unital"],
    ];
    let mut seen = BTreeSet::new();
    for args in examples {
        let cfg = <RunConfig as clap::Parser>::try_parse_from(std::iter::once("ttgeo").chain(args)).unwrap();
        let v = serde_json::to_value(&cfg).unwrap();
        assert!(conforms(&v, &s), "{v}");
        let name = v["command"]["name"].as_str().unwrap().to_string();
        let branch = branches
            .as_array()
            .unwrap()
            .iter()
            .find(|b| b["properties"]["name"]["const"] == name.as_str())
            .unwrap_or_else(|| panic!("no schema branch for {name}"));
        assert!(conforms(&v["command"], branch), "{name}: {}", v["command"]);
        let back: RunConfig = serde_json::from_value(v).unwrap();
        assert_eq!(back, cfg);
        seen.insert(name);
    }
    assert_eq!(seen, branch_consts(&s, branches, "name"));
    // Exhaustiveness: a new subcommand must be added above.
    let _ = |c: Command| match c {
        Command::Spectrum { .. }
        | Command::CbRank {}
        | Command::Hsupp { .. }
        | Command::Ideal { .. }
        | Command::ViClassify { .. }
        | Command::Chain { .. }
        | Command::Oracle { .. }
        | Command::CheckPredicate { .. } => (),
    };
}

#[test]
fn fixtures_match_schema() {
    let s = schema("complex-fixture.schema.json");
    let f = Family::new(FamilySpec::Extensional(ExtensionalTable::from_quotients_of(
        &"2:[1,1]".parse().unwrap(),
    )))
    .unwrap();
    let cat = EpiCategory::new(&f).unwrap();
    let x = parse_expr(&f, "aug[C2] (x) e[C2xC2] (+) e[1]").unwrap();
    let v = serde_json::to_value(ComplexFixture::from_complex(&cat, &realize(&cat, &x).unwrap()).unwrap()).unwrap();
    assert!(conforms(&v, &s));
    let term = &s["$defs"]["term"];
    let mut differentials = 0;
    for t in v["terms"].as_array().unwrap() {
        assert!(conforms(t, term), "{t}");
        differentials += usize::from(t.get("differential").is_some());
        for r in t["restrictions"].as_array().unwrap() {
            assert!(conforms(r, &term["properties"]["restrictions"]["items"]));
        }
    }
    assert!(differentials > 0);
}

#[test]
fn gallery_spectra_match_schema() {
    let s = schema("spectrum-report.schema.json");
    let mut checked = 0;
    for entry in fs::read_dir(root().join("gallery")).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.starts_with("spectrum_") && name.ends_with(".json") {
            let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
            assert!(conforms(&v, &s), "{name}");
            checked += 1;
        }
    }
    assert!(checked >= 5);
    let unavailable = run_args(["ttgeo", "spectrum", "--family", r#"{"kind":"cyclic_all"}"#]);
    let v: Value = serde_json::from_str(&unavailable.stdout).unwrap();
    assert!(conforms(&v, &s), "{v}");
}

#[test]
fn cache_entries_match_schema() {
    let s = schema("stage-cache.schema.json");
    let dir = std::env::temp_dir().join(format!("ttgeo-schema-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    let cache = ttgeo_cli::cache::StageCache::new(&dir);
    let f = Family::new(FamilySpec::AbelianPRank { p: 3, r: 2 }).unwrap();
    cache.stage(&f, 9).unwrap();
    let file = fs::read_dir(&dir).unwrap().next().unwrap().unwrap().path();
    let v: Value = serde_json::from_str(&fs::read_to_string(file).unwrap()).unwrap();
    assert!(conforms(&v, &s));
    assert!(conforms(&v["stage"], &s["properties"]["stage"]));
    assert!(conforms(&v["spec"], family_branch(&schema("family.schema.json"), "abelian_p_rank")));
}
