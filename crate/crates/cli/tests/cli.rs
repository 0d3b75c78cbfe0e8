use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn dadcf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dadcf"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let o = dadcf(dir, args);
    assert_eq!(
        code(&o),
        0,
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn json(p: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

#[test]
fn design_writes_artifacts_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &["design", "--family", "rdadcf", "--size", "8", "--out", "a"],
    );
    ok(
        d,
        &["design", "--family", "rdadcf", "--size", "8", "--out", "b"],
    );
    for name in [
        "rdadcf_8_analysis.csv",
        "subbands.json",
        "rdst_8.csv",
        "rdst_givens_8.json",
        "manifest.json",
    ] {
        assert!(d.join("a").join(name).is_file(), "{name}");
    }
    let sb = json(d.join("a/subbands.json"));
    assert_eq!(sb["subbands"].as_array().unwrap().len(), 128);
    assert_eq!(sb["directional_count"], 72);
    let givens = json(d.join("a/rdst_givens_8.json"));
    assert_eq!(givens["rotations"].as_array().unwrap().len(), 6);

    let a = files(&d.join("a"));
    assert_eq!(a.len(), files(&d.join("b")).len());
    for p in a.iter().filter(|p| !p.ends_with("manifest.json")) {
        let q = d.join("b").join(p.file_name().unwrap());
        assert_eq!(
            fs::read(p).unwrap(),
            fs::read(q).unwrap(),
            "{}",
            p.display()
        );
    }
}

#[test]
fn design_rejects_bad_size() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&dadcf(tmp.path(), &["design", "--size", "6"])), 2);
    assert_eq!(code(&dadcf(tmp.path(), &["design", "--family", "nope"])), 2);
    assert_eq!(code(&dadcf(tmp.path(), &["design", "--bogus"])), 2);
}

#[test]
fn verify_reports_and_detects_corruption() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let o = ok(d, &["verify", "--family", "rdadcf", "--size", "8"]);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["pass"], true);
    let checks = report["checks"].as_array().unwrap();
    let get = |n: &str| {
        checks
            .iter()
            .find(|c| c["name"] == n)
            .unwrap_or_else(|| panic!("{n}"))
    };
    assert_eq!(get("directional_count")["measured"], 72.0);
    for c in checks
        .iter()
        .filter(|c| c["relation"] == "le" && c["bound"].as_f64().unwrap() <= 1e-10)
    {
        assert!(c["measured"].as_f64().unwrap() < 1e-10, "{c}");
    }

    ok(
        d,
        &["design", "--family", "rdadcf", "--size", "8", "--out", "m"],
    );
    let path = d.join("m/rdadcf_8_analysis.csv");
    ok(
        d,
        &[
            "verify",
            "--family",
            "rdadcf",
            "--size",
            "8",
            "--analysis",
            path.to_str().unwrap(),
        ],
    );
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut row: Vec<f64> = lines[5].split(',').map(|t| t.parse().unwrap()).collect();
    row[3] += 1e-3;
    lines[5] = row
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",");
    fs::write(d.join("bad.csv"), lines.join("\n")).unwrap();
    let o = dadcf(
        d,
        &[
            "verify",
            "--family",
            "rdadcf",
            "--size",
            "8",
            "--analysis",
            "bad.csv",
            "--out",
            "r.json",
        ],
    );
    assert_eq!(code(&o), 1);
    let r = json(d.join("r.json"));
    assert!(r["failed"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f == "parseval"));
    assert_eq!(code(&dadcf(d, &["verify", "--analysis", "missing.csv"])), 3);
}

#[test]
fn decompose_leakage_bookkeeping() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "synth",
            "--kind",
            "zoneplate",
            "--size",
            "64",
            "--out",
            "zp.pgm",
        ],
    );
    ok(
        d,
        &[
            "decompose",
            "--image",
            "zp.pgm",
            "--family",
            "dadcf",
            "--out",
            "plain",
        ],
    );
    ok(
        d,
        &[
            "decompose",
            "--image",
            "zp.pgm",
            "--family",
            "pyramid",
            "--out",
            "pyr",
        ],
    );
    let plain = json(d.join("plain/energy.json"));
    assert!(plain["leakage_subband_fraction"].as_f64().unwrap() > 0.01);
    let pyr = json(d.join("pyr/energy.json"));
    assert!(pyr["dc_leakage_relative"].as_f64().unwrap() < 1e-6);
    assert_eq!(files(&d.join("plain/planes")).len(), 128);
    assert!(d.join("plain/mosaic.pgm").is_file());

    let mut pgm = b"P5\n32 32\n255\n".to_vec();
    pgm.extend(std::iter::repeat(77u8).take(32 * 32));
    fs::write(d.join("flat.pgm"), pgm).unwrap();
    ok(
        d,
        &[
            "decompose",
            "--image",
            "flat.pgm",
            "--family",
            "rdadcf",
            "--out",
            "flat",
        ],
    );
    assert!(
        json(d.join("flat/energy.json"))["nonzero_planes"]
            .as_u64()
            .unwrap()
            <= 2
    );

    let mut odd = b"P5\n20 20\n255\n".to_vec();
    odd.extend(std::iter::repeat(0u8).take(400));
    fs::write(d.join("odd.pgm"), odd).unwrap();
    assert_eq!(
        code(&dadcf(
            d,
            &["decompose", "--image", "odd.pgm", "--out", "x"]
        )),
        2
    );
}

fn pipeline(dir: &Path, problem: &str, family: &str, out: &str) -> Value {
    ok(
        dir,
        &[
            "recover",
            "--obs",
            "obs.bin",
            "--truth",
            "img.pgm",
            "--epsilon-oracle",
            "--family",
            family,
            "--problem",
            problem,
            "--out",
            out,
        ],
    );
    json(dir.join(format!("{out}.report.json")))
}

fn sense_smooth(dir: &Path) {
    ok(
        dir,
        &[
            "synth", "--kind", "smooth", "--size", "64", "--out", "img.pgm",
        ],
    );
    ok(
        dir,
        &[
            "sense", "--image", "img.pgm", "--rate", "0.5", "--sigma", "0.1", "--seed", "4",
            "--out", "obs.bin",
        ],
    );
}

#[test]
fn sense_recover_is_deterministic_and_replayable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        sense_smooth(d);
        pipeline(d, "1", "rdadcf", "rec.pgm");
    }
    for name in ["obs.bin", "rec.pgm", "rec.pgm.convergence.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
    let before = fs::read(a.path().join("rec.pgm")).unwrap();
    fs::remove_file(a.path().join("rec.pgm")).unwrap();
    let manifest = a.path().join("rec.pgm.manifest.json");
    let m = json(&manifest);
    assert_eq!(m["command"], "recover");
    assert_eq!(m["seeds"]["seed"], 4);
    ok(
        b.path(),
        &["replay", "--manifest", manifest.to_str().unwrap()],
    );
    assert_eq!(fs::read(a.path().join("rec.pgm")).unwrap(), before);
}

#[test]
fn recover_reports_gain_and_problem_two_on_smooth_image() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    sense_smooth(d);
    let p1 = pipeline(d, "1", "rdadcf", "p1.pgm");
    let p2 = pipeline(d, "2", "rdadcf", "p2.pgm");
    let q1 = p1["psnr"].as_f64().unwrap();
    let q2 = p2["psnr"].as_f64().unwrap();
    assert!(q1 > p1["pinv_psnr"].as_f64().unwrap() + 5.0, "{q1}");
    assert!(q2 >= q1 - 0.5, "{q2} vs {q1}");

    let o = ok(d, &["report", "--inputs", ".", "--out", "table.csv"]);
    let csv = String::from_utf8(o.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "image,problem,rate,pseudo_inverse,rdadcf_M8,runs"
    );
    assert!(lines.next().unwrap().starts_with("img,1,0.500,"));
    assert!(lines.next().unwrap().starts_with("img,2,0.500,"));
}

#[test]
fn exit_codes_for_bad_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    sense_smooth(d);
    assert_eq!(
        code(&dadcf(d, &["sense", "--image", "img.pgm", "--rate", "1.5"])),
        2
    );
    assert_eq!(
        code(&dadcf(d, &["sense", "--image", "img.pgm", "--rate", "0"])),
        2
    );
    assert_eq!(
        code(&dadcf(
            d,
            &["sense", "--image", "nope.pgm", "--rate", "0.5"]
        )),
        3
    );
    assert_eq!(
        code(&dadcf(
            d,
            &["recover", "--obs", "obs.bin", "--problem", "3"]
        )),
        2
    );
    fs::write(d.join("cfg.json"), r#"{"gamma1": 1.0, "gamma2": 1.0}"#).unwrap();
    assert_eq!(
        code(&dadcf(
            d,
            &["recover", "--obs", "obs.bin", "--config", "cfg.json"]
        )),
        4
    );
    fs::write(d.join("junk.bin"), b"garbage").unwrap();
    assert_eq!(code(&dadcf(d, &["recover", "--obs", "junk.bin"])), 3);
    assert_eq!(code(&dadcf(d, &["--help"])), 0);
}
