//! End-to-end tests of the `decoprobe` binary: the output contract
//! (headers, hashes, byte-identical reruns), the exit-code contract, and
//! a few physics spot checks through the full pipeline.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_decoprobe"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success for {args:?}, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_code(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().expect("binary runs");
    let code = out.status.code().expect("no signal");
    (code, String::from_utf8_lossy(&out.stderr).into_owned())
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).expect("config written");
    path
}

/// Data rows of a written CSV (header and comment lines stripped).
fn data_rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).expect("csv readable");
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const SWEEP_CONFIG: &str = "model = \"ssh\"\ndelta = 0.1\n[grid]\nsizes = [60]\n[time]\nt_max = 20.0\nsteps = 40\n[scan]\nparameter = \"phi\"\nrange = [-0.5, 0.5]\npoints = 21\n";

#[test]
fn sweep_flags_the_transition_and_stamps_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "sweep.toml", SWEEP_CONFIG);
    let out = dir.path().join("sweep");
    run_ok(&["sweep", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);

    let csv = fs::read_to_string(out.with_extension("csv")).unwrap();
    let hash_line = csv
        .lines()
        .find(|l| l.starts_with("# config "))
        .expect("config hash in the header");
    let hash = hash_line.trim_start_matches("# config ");
    assert_eq!(hash.len(), 16, "hash is 16 hex chars, got {hash:?}");
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()), "{hash:?}");
    assert!(csv.lines().any(|l| l == "# columns phi,diagnostic,is_cusp"), "{csv}");

    let rows = data_rows(&out.with_extension("csv"));
    assert_eq!(rows.len(), 21);
    let cusps: Vec<&Vec<String>> = rows.iter().filter(|r| r[2] == "1").collect();
    assert_eq!(cusps.len(), 1, "one transition in the swept range: {cusps:?}");
    let at: f64 = cusps[0][0].parse().unwrap();
    assert!(
        at.abs() < 0.05 + 1e-12,
        "cusp should sit at the transition, got phi = {at}"
    );
}

#[test]
fn reruns_are_byte_identical_for_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "sweep.toml", SWEEP_CONFIG);
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    for out in [&first, &second] {
        run_ok(&[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--format",
            "json",
        ]);
    }
    let csv_a = fs::read(first.with_extension("csv")).unwrap();
    let csv_b = fs::read(second.with_extension("csv")).unwrap();
    assert_eq!(csv_a, csv_b, "CSV bytes must not depend on the run");
    let json_a = fs::read(first.with_extension("json")).unwrap();
    let json_b = fs::read(second.with_extension("json")).unwrap();
    assert_eq!(json_a, json_b, "JSON bytes must not depend on the run");
}

#[test]
fn thread_count_does_not_change_the_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "sweep.toml", SWEEP_CONFIG);
    let serial = dir.path().join("serial");
    let threaded = dir.path().join("threaded");
    run_ok(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        serial.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    run_ok(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        threaded.to_str().unwrap(),
        "--threads",
        "3",
    ]);
    assert_eq!(
        fs::read(serial.with_extension("csv")).unwrap(),
        fs::read(threaded.with_extension("csv")).unwrap(),
        "worker count must not leak into the numbers"
    );
}

#[test]
fn the_manifest_echoes_the_config_and_alone_carries_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "sweep.toml", SWEEP_CONFIG);
    let out = dir.path().join("run");
    run_ok(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--format",
        "json",
    ]);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run.manifest.json")).unwrap())
            .unwrap();
    assert!(manifest["wall_time_ms"].is_number(), "{manifest}");
    assert_eq!(manifest["config"]["model"], "ssh");
    assert_eq!(manifest["config"]["scan"]["points"], 21);
    let hash = manifest["config_hash"].as_str().unwrap();

    let csv = fs::read_to_string(out.with_extension("csv")).unwrap();
    assert!(csv.contains(&format!("# config {hash}")), "data and manifest share the hash");
    assert!(!csv.contains("wall"), "timing would break byte-identical reruns");
    let mirror = fs::read_to_string(out.with_extension("json")).unwrap();
    assert!(!mirror.contains("wall"), "timing belongs to the manifest only");
}

#[test]
fn missing_delta_exits_2_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "bad.toml", "model = \"qwz\"\n[params]\nm = -2.0\n");
    let (code, stderr) =
        run_code(&["kmap", "--config", config.to_str().unwrap(), "--out", "x"]);
    assert_eq!(code, 2, "configuration errors exit with 2: {stderr}");
    assert!(stderr.contains("delta"), "diagnostic names the field: {stderr}");
}

#[test]
fn unknown_keys_exit_2_and_are_named() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.toml",
        "model = \"ssh\"\ndelta = 0.1\nmystery = 1\n",
    );
    let (code, stderr) =
        run_code(&["series", "--config", config.to_str().unwrap(), "--out", "x"]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("mystery"), "{stderr}");
}

#[test]
fn unknown_preset_exits_2_and_lists_what_exists() {
    let (code, stderr) = run_code(&["sweep", "--preset", "fig99", "--out", "x"]);
    assert_eq!(code, 2, "{stderr}");
    for name in ["fig1", "fig3", "fig5b", "fig6d", "fig7"] {
        assert!(stderr.contains(name), "listing should offer {name}: {stderr}");
    }
}

#[test]
fn missing_output_stem_exits_2_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "sweep.toml", SWEEP_CONFIG);
    let (code, stderr) = run_code(&["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(code, 2, "{stderr}");
    assert!(stderr.contains("output.path"), "{stderr}");
}

#[test]
fn invariant_at_a_gap_closing_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "gapless.toml",
        "model = \"qwz\"\ndelta = 0.1\n[params]\nm = -2.0\n",
    );
    let (code, stderr) =
        run_code(&["topo", "--config", config.to_str().unwrap(), "--out", "x"]);
    assert_eq!(code, 3, "numeric failures exit with 3: {stderr}");
    assert!(stderr.contains("gapless"), "{stderr}");
}

#[test]
fn list_models_names_every_model_and_preset() {
    let out = run_ok(&["list-models"]);
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    for id in ["ssh", "ssh-open", "qwz", "qwz-strip", "km-ribbon", "weyl"] {
        assert!(text.contains(id), "missing model {id}:\n{text}");
    }
    for name in [
        "fig1", "fig2", "fig3", "fig4", "fig5a", "fig5b", "fig5c", "fig5d", "fig6a", "fig6b",
        "fig6c", "fig6d", "fig7",
    ] {
        assert!(text.contains(name), "missing preset {name}:\n{text}");
    }
}

#[test]
fn kmap_minima_sit_at_the_gap_closing_momenta() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "kmap.toml",
        "model = \"qwz\"\ndelta = 0.1\n[params]\nm = -2.0\n[grid]\nsizes = [20, 20]\n[time]\nt_max = 20.0\nsteps = 1\n",
    );
    let out = dir.path().join("kmap");
    run_ok(&["kmap", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);

    let rows = data_rows(&out.with_extension("csv"));
    assert_eq!(rows.len(), 400, "long form: one row per grid point");
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for r in &rows {
        let (kx, ky, lk2): (f64, f64, f64) =
            (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap());
        if lk2 < best.0 {
            best = (lk2, kx, ky);
        }
    }
    let pi = std::f64::consts::PI;
    let fold = |k: f64| (k % (2.0 * pi)).min(2.0 * pi - (k % (2.0 * pi)));
    let near_x_node = fold(best.1 - pi) < 0.4 && fold(best.2) < 0.4;
    let near_y_node = fold(best.1) < 0.4 && fold(best.2 - pi) < 0.4;
    assert!(
        near_x_node || near_y_node,
        "deepest overlap {:?} should sit by a zone-edge touching",
        best
    );
}

#[test]
fn a_preset_run_lands_under_its_own_name_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["spectrum", "--preset", "fig5b"])
        .current_dir(dir.path())
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("fig5b.csv").is_file());
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("fig5b.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["config"]["params"]["b3"], 1.8);

    // The split touchings sit on the vertical axis: the middle bands must
    // come within a hair of each other away from the zone center.
    let rows = data_rows(&dir.path().join("fig5b.csv"));
    let mut min_gap = f64::INFINITY;
    let mut at_s = 0.0;
    let mut upper: Option<(f64, f64)> = None;
    for r in &rows {
        let (s, band, e): (f64, i64, f64) =
            (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap());
        match band {
            1 => upper = Some((s, e)),
            2 => {
                let (s1, e1) = upper.expect("bands interleave per sample");
                assert_eq!(s1, s);
                if e - e1 < min_gap {
                    min_gap = e - e1;
                    at_s = s;
                }
            }
            _ => {}
        }
    }
    // The touching falls between samples; at this sampling (pi/200 per
    // step) the steep linear crossing still leaves a gap below 0.1.
    let pi = std::f64::consts::PI;
    assert!(min_gap < 0.1, "split nodes close the middle gap, got {min_gap}");
    assert!(
        (at_s - pi).abs() > 0.3,
        "the touching is shifted away from the zone center, got s = {at_s}"
    );
}
