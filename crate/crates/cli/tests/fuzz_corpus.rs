//! Feeds the checked-in fuzz seeds through the same parsers the fuzz
//! targets exercise. Every seed is a valid input, so each must parse.

use std::fs;
use std::path::PathBuf;

use thresholdlab::cover::CoverFamily;
use thresholdlab::graph::GraphSpec;
use thresholdlab::random::Digraph;
use thresholdlab::{Certificate, FamilySpec, FractionalCertificate, Graph};
use thresholdlab_cli::config::ExperimentConfig;
use thresholdlab_cli::manifest::RunManifest;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("seed-"))
        .map(|p| (p.display().to_string(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn check(target: &str, parse: impl Fn(&str) -> Result<(), String>) {
    for (path, text) in seeds(target) {
        if let Err(e) = parse(&text) {
            panic!("{path}: {e}");
        }
    }
}

fn ok<T, E: ToString>(r: Result<T, E>) -> Result<(), String> {
    r.map(|_| ()).map_err(|e| e.to_string())
}

#[test]
fn seeds_parse() {
    check("family_json", |s| ok(FamilySpec::parse(s).and_then(|f| f.build())));
    check("graph_json", |s| ok(Graph::from_json(s)));
    check("edge_list", |s| ok(Graph::parse_edge_list(s)));
    check("digraph_json", |s| ok(Digraph::from_json(s)));
    check("certificate_json", |s| ok(Certificate::from_json(s)));
    check("fractional_json", |s| ok(FractionalCertificate::from_json(s)));
    check("cover_json", |s| ok(CoverFamily::from_json(s)));
    check("graph_spec", |s| ok(s.parse::<GraphSpec>().and_then(|g| g.build(64))));
    check("experiment_config", |s| ok(ExperimentConfig::from_json(s).and_then(|c| c.plan())));
    check("manifest", |s| ok(RunManifest::parse(s)));
}
