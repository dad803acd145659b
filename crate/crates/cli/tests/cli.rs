use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn corrcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corrcalc")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Dir {
        Dir(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn fixture(&self, name: &str, extra: &[&str]) -> String {
        let mut args = vec!["fixture", name];
        args.extend_from_slice(extra);
        let o = corrcalc(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let file = self.path(&format!("{name}{}.json", extra.join("").replace(['-', ','], "")));
        fs::write(&file, &o.stdout).unwrap();
        file.to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, v: &Value) -> String {
        let file = self.path(name);
        fs::write(&file, serde_json::to_string_pretty(v).unwrap()).unwrap();
        file.to_string_lossy().into_owned()
    }
}

fn raw(path: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn point_is_a_category() {
    let d = Dir::new();
    let one = d.fixture("one", &[]);
    let o = corrcalc(&["check-category", "--input", &one]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["check"], "category-laws");
    assert_eq!(r["report"]["objects"], 1);
}

#[test]
fn malformed_and_unlawful_inputs() {
    let d = Dir::new();
    let bad = d.path("bad.json");
    fs::write(&bad, "{\"objects\": [").unwrap();
    assert_eq!(code(&corrcalc(&["check-category", "--input", bad.to_str().unwrap()])), 2);
    // a composite that breaks the identity law
    let mut arrow = raw(&d.fixture("arrow", &[]));
    for t in arrow["compose"].as_array_mut().unwrap() {
        if t[0] == "id_1" && t[1] == "a" {
            t[2] = json!("id_0");
        }
    }
    let file = d.write("unlawful.json", &arrow);
    let o = corrcalc(&["check-category", "--input", &file]);
    assert_eq!(code(&o), 1);
    assert!(report(&o)["report"]["violation"].is_string());
    let extra = d.write("extra.json", &json!({"objects": [], "morphisms": [], "identities": {}, "compose": [], "x": 1}));
    assert_eq!(code(&corrcalc(&["check-category", "--input", &extra])), 2);
    assert_eq!(code(&corrcalc(&["check-category", "--input", &extra, "--bogus"])), 2);
    assert_eq!(code(&corrcalc(&["check-category", "--input", &extra, "--cap", "0"])), 2);
}

#[test]
fn marking_must_be_closed() {
    let d = Dir::new();
    let mut fs2 = raw(&d.fixture("chain3", &[]));
    fs2["marked"] = json!(["0->1", "1->2"]);
    let open = d.write("open.json", &fs2);
    let o = corrcalc(&["check-marking", "--input", &open]);
    assert_eq!(code(&o), 1);
    fs2["marked"] = json!(["0->1", "1->2", "0->2"]);
    let closed = d.write("closed.json", &fs2);
    assert_eq!(code(&corrcalc(&["check-marking", "--input", &closed])), 0);
    fs2["marked"] = json!(["nope"]);
    let unknown = d.write("unknown.json", &fs2);
    assert_eq!(code(&corrcalc(&["check-marking", "--input", &unknown])), 2);
}

#[test]
fn base_change_fails_on_fs4() {
    let d = Dir::new();
    let fs4 = d.fixture("fs4", &["--marked", "all"]);
    let o = corrcalc(&["check-base-change", "--input", &fs4]);
    assert_eq!(code(&o), 1);
    let ce = &report(&o)["report"]["counterexample"];
    assert_eq!(ce["marked"], "2->1:[0,0]");
    assert_eq!(ce["along"], "3->1:[0,0,0]");
    assert!(ce["reason"].as_str().unwrap().contains("2 -> 1 <- 3"));
    let p2 = d.fixture("p2", &["--marked", "all"]);
    assert_eq!(code(&corrcalc(&["check-base-change", "--input", &p2])), 0);
}

#[test]
fn composing_codiagonal_roofs_in_fs4() {
    let d = Dir::new();
    let fs4 = d.fixture("fs4", &["--marked", "all"]);
    let roof = "2->1:[0,0]/2->1:[0,0]";
    let o = corrcalc(&["compose-spans", "--input", &fs4, "--first", roof, "--second", roof]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["report"]["kernel"], "4");
}

#[test]
fn build_then_yoneda_pipeline() {
    let d = Dir::new();
    let arrow = d.fixture("arrow", &["--mark", "a"]);
    let corr = d.path("corr.json");
    let o = corrcalc(&["build-corr", "--input", &arrow, "--out", corr.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["report"]["objects"], 2);
    let stored: Value = serde_json::from_str(&fs::read_to_string(&corr).unwrap()).unwrap();
    assert_eq!(stored["format"], "bicat-v1");
    let o = corrcalc(&["yoneda-check", "--input", &arrow, "--corr", corr.to_str().unwrap(), "--at", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(&o);
    assert_eq!(r["check"], "bivariant-yoneda");
    assert!(r["report"]["witness"].is_null());
    // a stored bicategory for another category is rejected
    let p2 = d.fixture("p2", &["--marked", "all"]);
    let o = corrcalc(&["yoneda-check", "--input", &p2, "--corr", corr.to_str().unwrap(), "--at", "{1}"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn right_adjoint_of_picking_the_bottom() {
    let d = Dir::new();
    let one = raw(&d.fixture("one", &[]));
    let arrow = raw(&d.fixture("arrow", &[]));
    let pick = |o: &str| json!({"source": one, "target": arrow, "ob_map": {"*": o}, "mor_map": {}});
    let bottom = d.write("bottom.json", &pick("0"));
    let o = corrcalc(&["find-adjoint", "--input", &bottom]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["report"]["ob_map"], json!({"0": "*", "1": "*"}));
    let top = d.write("top.json", &pick("1"));
    assert_eq!(code(&corrcalc(&["find-adjoint", "--input", &top])), 1);
    assert_eq!(code(&corrcalc(&["find-adjoint", "--input", &top, "--side", "left"])), 0);
    assert_eq!(code(&corrcalc(&["find-adjoint", "--input", &bottom, "--side", "left"])), 1);
}

fn square(bottom: Value) -> Value {
    let one = fixture_raw("one");
    let arrow = fixture_raw("arrow");
    let pick0 = json!({"source": "pt", "target": "ar", "ob_map": {"*": "0"}, "mor_map": {}});
    json!({
        "categories": {"pt": one, "ar": arrow},
        "top": pick0,
        "left": pick0,
        "right": {"source": "ar", "target": "ar", "ob_map": {"0": "0", "1": "1"}, "mor_map": {"a": "a"}},
        "bottom": bottom,
        "filler": {"*": "id_0"},
    })
}

fn fixture_raw(name: &str) -> Value {
    serde_json::from_slice(&corrcalc(&["fixture", name]).stdout).unwrap()
}

#[test]
fn beck_chevalley_squares_of_functors() {
    let d = Dir::new();
    let identity = json!({"source": "ar", "target": "ar", "ob_map": {"0": "0", "1": "1"}, "mor_map": {"a": "a"}});
    let constant = json!({"source": "ar", "target": "ar", "ob_map": {"0": "0", "1": "0"}, "mor_map": {"a": "id_0"}});
    let failing = d.write("failing.json", &square(identity));
    let o = corrcalc(&["check-bc", "--input", &failing]);
    assert_eq!(code(&o), 1);
    assert_eq!(report(&o)["report"]["mate"], json!({"0": "id_0", "1": "a"}));
    assert_eq!(code(&corrcalc(&["mate", "--input", &failing])), 0);
    let passing = d.write("passing.json", &square(constant));
    assert_eq!(code(&corrcalc(&["check-bc", "--input", &passing])), 0);
}

fn family(marked: &[&str], along: Value) -> Value {
    let mut base = fixture_raw("arrow");
    base["marked"] = json!(marked);
    json!({
        "base": base,
        "variance": "covariant",
        "categories": {"pt": fixture_raw("one"), "ar": fixture_raw("arrow")},
        "objects": {"0": "pt", "1": "ar"},
        "functors": {"a": along},
    })
}

#[test]
fn integrating_a_family() {
    let d = Dir::new();
    let f = d.write("family.json", &family(&["a"], json!({"ob_map": {"*": "0"}, "mor_map": {}})));
    let o = corrcalc(&["grothendieck", "--input", &f]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["report"]["total"]["objects"].as_array().unwrap().len(), 3);
    let missing = d.write("missing.json", &json!({"base": fixture_raw("arrow"), "variance": "covariant",
        "categories": {"pt": fixture_raw("one")}, "objects": {"0": "pt", "1": "pt"}, "functors": {}}));
    assert_eq!(code(&corrcalc(&["grothendieck", "--input", &missing])), 2);
}

#[test]
fn bivariance_of_families() {
    let d = Dir::new();
    let arrow = d.fixture("arrow", &["--mark", "a"]);
    assert_eq!(code(&corrcalc(&["check-bivariant", "--input", &arrow])), 0);
    let bottom = d.write("bottom.json", &family(&["a"], json!({"ob_map": {"*": "0"}, "mor_map": {}})));
    assert_eq!(code(&corrcalc(&["check-bivariant", "--input", &arrow, "--family", &bottom])), 0);
    let top = d.write("top.json", &family(&["a"], json!({"ob_map": {"*": "1"}, "mor_map": {}})));
    let o = corrcalc(&["check-bivariant", "--input", &arrow, "--family", &top]);
    assert_eq!(code(&o), 1);
    assert!(report(&o)["report"]["failure"].as_str().unwrap().contains("no right adjoint") || !report(&o)["holds"].as_bool().unwrap());
    let p2 = d.fixture("p2", &["--marked", "all"]);
    assert_eq!(code(&corrcalc(&["check-bivariant", "--input", &p2, "--family", &bottom])), 2);
}

#[test]
fn span_extension_and_twisted_projection() {
    let d = Dir::new();
    for (name, extra) in [("arrow", vec!["--mark", "a"]), ("p2", vec!["--marked", "all"])] {
        let file = d.fixture(name, &extra);
        let o = corrcalc(&["spex", "--input", &file]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
        assert_eq!(code(&corrcalc(&["check-twisted", "--input", &file])), 0);
    }
}

#[test]
fn fibration_lifts_of_a_projection() {
    let d = Dir::new();
    let arrow = fixture_raw("arrow");
    let one = fixture_raw("one");
    let bang = d.write("bang.json", &json!({"source": arrow, "target": one, "ob_map": {"0": "*", "1": "*"}, "mor_map": {"a": "id_*"}}));
    assert_eq!(code(&corrcalc(&["check-fibration", "--input", &bang])), 0);
    let discrete = fixture_raw("discrete2");
    let names: Vec<String> = discrete["objects"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    let pick = d.write("pick.json", &json!({"source": discrete, "target": arrow,
        "ob_map": {names[0].clone(): "0", names[1].clone(): "0"}, "mor_map": {}}));
    let o = corrcalc(&["check-fibration", "--input", &pick, "--variance", "covariant"]);
    assert_eq!(code(&o), 1);
    assert_eq!(report(&o)["report"]["missing"]["morphism"], "a");
}

#[test]
fn monoidal_examples() {
    let d = Dir::new();
    let p2 = d.fixture("p2", &["--marked", "all"]);
    assert_eq!(code(&corrcalc(&["self-dual", "--input", &p2, "--at", "{1}"])), 0);
    let o = corrcalc(&["cartesian-monoidal", "--input", &p2, "--size", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["report"]["formula_matches"], true);
    let discrete = d.fixture("discrete2", &[]);
    assert_eq!(code(&corrcalc(&["cartesian-monoidal", "--input", &discrete])), 1);
    assert_eq!(code(&corrcalc(&["self-dual", "--input", &p2, "--at", "nowhere"])), 2);
}

#[test]
fn universality_for_the_marked_arrow() {
    let d = Dir::new();
    let arrow = d.fixture("arrow", &["--mark", "a"]);
    let o = corrcalc(&["universality", "--input", &arrow]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["report"]["bivariant_classes"], 3);
}

#[test]
fn dot_output() {
    let d = Dir::new();
    let one = d.fixture("one", &[]);
    let o = corrcalc(&["dot", "--input", &one]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.matches("[label=").count(), 1);
    let arrow = d.fixture("arrow", &["--mark", "a"]);
    let roof = String::from_utf8(corrcalc(&["dot", "--input", &arrow, "--span", "id_0/a"]).stdout).unwrap();
    assert_eq!(roof.matches("->").count(), 2);
    assert_eq!(roof.matches("bold").count(), 1);
    let spans = corrcalc(&["dot", "--input", &arrow, "--spans"]);
    let again = corrcalc(&["dot", "--input", &arrow, "--spans"]);
    assert_eq!(spans.stdout, again.stdout);
    let out = d.path("arrow.dot");
    assert_eq!(code(&corrcalc(&["dot", "--input", &arrow, "--out", out.to_str().unwrap()])), 0);
    assert!(fs::read_to_string(&out).unwrap().starts_with("digraph"));
}

#[test]
fn text_format_and_report_file() {
    let d = Dir::new();
    let one = d.fixture("one", &[]);
    let o = corrcalc(&["check-category", "--input", &one, "--format", "text"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("check: category-laws\nholds: true\n"));
    let out = d.path("report.json");
    assert_eq!(code(&corrcalc(&["check-category", "--input", &one, "--out", out.to_str().unwrap()])), 0);
    assert!(Path::new(&out).exists());
}

#[test]
fn reports_do_not_depend_on_threads() {
    let d = Dir::new();
    let p2 = d.fixture("p2", &["--marked", "all"]);
    for cmd in ["spex", "check-bivariant", "check-twisted", "build-corr"] {
        let one = corrcalc(&[cmd, "--input", &p2, "--threads", "1"]);
        let many = corrcalc(&[cmd, "--input", &p2, "--threads", "4"]);
        assert_eq!(code(&one), 0, "{cmd}");
        assert_eq!(one.stdout, many.stdout, "{cmd}");
    }
}
