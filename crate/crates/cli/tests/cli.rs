use std::path::{Path, PathBuf};

use circorder::fixtures;
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["circorder".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = circorder_cli::run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.push("--json");
    let (code, out, err) = run(&a);
    let text = if code == 0 { out } else { err };
    (code, serde_json::from_str(&text).unwrap())
}

/// Splits a shell line on whitespace, honouring double quotes.
fn shell_words(line: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut cur = String::new();
    let (mut quoted, mut any) = (false, false);
    for ch in line.chars() {
        match ch {
            '"' => {
                quoted = !quoted;
                any = true;
            }
            c if c.is_whitespace() && !quoted => {
                if any {
                    words.push(std::mem::take(&mut cur));
                    any = false;
                }
            }
            c => {
                cur.push(c);
                any = true;
            }
        }
    }
    if any {
        words.push(cur);
    }
    words
}

#[test]
fn documented_examples() {
    assert_eq!(json(&["count", "fixtures:dinf"]).1["total"], 2);
    assert_eq!(json(&["brute-cyclic", "5"]).1["count"], 4);
    let (code, v) = json(&["check", "fixtures:ex414"]);
    assert_eq!(code, 0);
    assert_eq!(v["consistent"], true);
}

#[test]
fn readme_examples_exit_zero_with_stable_json() {
    let readme = std::fs::read_to_string(root().join("README.md")).unwrap();
    let tmp = std::env::temp_dir().join(format!("circorder-readme-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let mut ran = 0;
    for line in readme.lines().filter(|l| l.starts_with("circorder ")) {
        let mut words = shell_words(line);
        for w in words.iter_mut() {
            if w.starts_with("data/") {
                *w = root().join(&*w).to_string_lossy().into_owned();
            } else if w.ends_with(".tsv") {
                *w = tmp.join(&*w).to_string_lossy().into_owned();
            }
        }
        let args: Vec<&str> = words[1..].iter().map(String::as_str).collect();
        let (code, out, err) = run(&args);
        assert_eq!(code, 0, "{line}: {err}");
        if args.contains(&"--json") {
            let (_, again, _) = run(&args);
            assert_eq!(out, again, "{line}");
            let v: Value = serde_json::from_str(&out).unwrap();
            assert_eq!(v["schema"], 1);
        }
        ran += 1;
    }
    assert!(ran >= 10);
    let points = std::fs::read_to_string(tmp.join("points.tsv")).unwrap();
    assert!(points.lines().all(|l| l.split('\t').count() == 2));
    std::fs::remove_dir_all(&tmp).unwrap();
}

#[test]
fn enumerate_matches_count() {
    for name in fixtures::SPEC_NAMES {
        let spec = format!("fixtures:{name}");
        let (_, count) = json(&["count", &spec]);
        let (code, e) = json(&["enumerate", &spec, "--ball-radius", "3"]);
        if name == "zz4" {
            // twists by λ(z) = 1 coincide with a change of positive generator
            assert_eq!((code, e["error"].as_str()), (1, Some("DistinctnessFailure")));
            assert_eq!(count["total"], 16);
            continue;
        }
        assert_eq!(code, 0, "{name}: {e}");
        assert_eq!(e["total"], count["total"], "{name}");
        assert_eq!(e["orders"].as_array().unwrap().len() as u64, count["total"].as_u64().unwrap());
    }
}

#[test]
fn every_command_takes_json() {
    let prufer = root().join("data/prufer2.toml");
    let prufer = prufer.to_str().unwrap();
    let cases: [&[&str]; 8] = [
        &["check", "fixtures:z"],
        &["count", "fixtures:k2"],
        &["enumerate", "fixtures:k2"],
        &["brute-cyclic", "3"],
        &["brute-ball", "fixtures:z", "--radius", "2"],
        &["realize", "fixtures:k2", "--ball", "3", "--iters", "50"],
        &["perturb", "--mode", "prufer", "--input", prufer, "--agree-on", "1/2"],
        &["fixtures", "zz4"],
    ];
    for args in cases {
        let (code, v) = json(args);
        assert_eq!(code, 0, "{args:?}: {v}");
        assert_eq!(v["schema"], 1);
        assert_eq!(v["command"], args[0]);
    }
}

#[test]
fn text_output_mirrors_json() {
    let (_, text, _) = run(&["count", "fixtures:ex414"]);
    assert!(text.contains("total: 8"));
    assert!(text.contains("k_rot: 2"));
    assert!(text.contains("schema: 1"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["count", "fixtures:dinf", "--bogus"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["brute-cyclic", "x"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
    let odd = root().join("data/odd.toml");
    let (code, v) = json(&["count", odd.to_str().unwrap()]);
    assert_eq!((code, v["error"].as_str()), (1, Some("ConstraintError")));
    assert_eq!(json(&["count", "fixtures:nope"]).1["error"], "UnknownFixture");
    assert_eq!(json(&["count", "/no/such/file.toml"]).1["error"], "IoError");
    assert_eq!(json(&["count", "fixtures:z"]).0, 0);
    assert_eq!(json(&["realize", "fixtures:dinf", "--order", "7"]).1["error"], "OutOfRange");
    assert_eq!(json(&["brute-ball", "fixtures:promislow"]).1["error"], "Unclassified");
    assert_eq!(json(&["perturb", "--mode", "nontorsion"]).1["error"], "MissingInput");
    assert_eq!(json(&["perturb", "--mode", "phi", "--k", "2", "--agree-on", "1/x"]).1["error"], "BadElement");
}

#[test]
fn malformed_spec_reports_position() {
    let tmp = std::env::temp_dir().join(format!("circorder-bad-{}.toml", std::process::id()));
    std::fs::write(&tmp, "[group]\nrank = 2\nn = 0\n[conj]\n\"0,1\" = \"a1^-1 b\"\n").unwrap();
    let (code, v) = json(&["check", tmp.to_str().unwrap()]);
    std::fs::remove_file(&tmp).unwrap();
    assert_eq!((code, v["error"].as_str()), (1, Some("ParseError")));
}

#[test]
fn promislow_check_is_a_rejection() {
    let (code, v) = json(&["check", "fixtures:promislow"]);
    assert_eq!(code, 0);
    assert_eq!(v["tararin"]["verdict"], "reject");
    assert_eq!(v["tararin"]["reason"], "NotIndicable");
    assert_eq!(v["tararin"]["depth"], 0);
}

#[test]
fn perturbation_reports() {
    let rank2 = root().join("data/rank2.toml");
    let (code, v) =
        json(&["perturb", "--mode", "nontorsion", "--input", rank2.to_str().unwrap(), "--agree-on", "g0, g1"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["witness"][0], "0");
    let (code, v) = json(&["perturb", "--mode", "phi", "--k", "3", "--h0", "0", "--agree-on", "-2,-1,0,1,2"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["ok"], true);
    assert_eq!(v["images"].as_array().unwrap().len(), 15);
    let prufer = root().join("data/prufer2.toml");
    let (_, v) = json(&["perturb", "--mode", "prufer", "--input", prufer.to_str().unwrap(), "--agree-on", "1/16"]);
    assert_eq!(v["error"], "NotApplicable");
}
