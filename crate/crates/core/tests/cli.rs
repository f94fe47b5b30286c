mod common;

use std::fs;

use common::run;

const PLAN: &str = r#"{"site": {"name":"Gillot","latitude":-20.89,"longitude":55.53,"altitude":8.0,"utc_offset":4.0},
 "variables": ["dry_bulb_temp","rel_humidity","wind_speed","global_rad","clearness_index"],
 "start": "2010-08-01T00:00:00", "duration": 62, "cadence": "daily",
 "criteria": {"months": [8]}, "seed": 5}"#;

fn s(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn describe_counts_rows() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("three.csv");
    fs::write(
        &data,
        "timestamp,dry_bulb_temp\n2001-08-01T00:00:00,21.5\n2001-08-01T01:00:00,22.0\n2001-08-01T02:00:00,23.5\n",
    )
    .unwrap();
    let (code, out, _) = run(&["describe", s(&data), "--var", "dry_bulb_temp"]);
    assert_eq!(code, 0);
    assert!(out.contains("count: 3"), "{out}");
    assert!(out.contains("mean: 22.3333"), "{out}");
}

#[test]
fn fit_stores_then_replaces() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("world.csv");
    let reg = dir.path().join("reg");
    assert_eq!(
        run(&["world", "--out", s(&data), "--years", "1", "--seed", "3"]).0,
        0
    );
    let fit = [
        "--registry",
        s(&reg),
        "fit",
        "arma",
        s(&data),
        "--var",
        "wind_speed",
        "--months",
        "8",
    ];
    let (code, out, err) = run(&fit);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("stored"), "{out}");
    assert_eq!(fs::read_dir(&reg).unwrap().count(), 1);
    let (code, out, _) = run(&fit);
    assert_eq!(code, 0);
    assert!(out.contains("replaced"), "{out}");
    assert_eq!(fs::read_dir(&reg).unwrap().count(), 1);

    let (_, listing, _) = run(&["--registry", s(&reg), "models", "list"]);
    assert!(listing.starts_with("wind_speed.m08.arma."), "{listing}");
}

#[test]
fn generate_without_models_names_the_fix() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    fs::write(&plan, PLAN).unwrap();
    let reg = dir.path().join("empty");
    let (code, _, err) = run(&[
        "--registry",
        s(&reg),
        "generate",
        "--plan",
        s(&plan),
        "--out",
        s(&dir.path().join("g.csv")),
    ]);
    assert_eq!(code, 2);
    assert!(
        err.contains("missing wind_speed (m08): weathergen fit arma"),
        "{err}"
    );
    assert!(err.contains("missing dry_bulb_temp (m08)"), "{err}");

    // each suggestion parses once the data file is filled in
    let data = dir.path().join("world.csv");
    assert_eq!(run(&["world", "--out", s(&data), "--years", "1"]).0, 0);
    for line in err.lines().filter(|l| l.contains("missing")) {
        let cmd = line
            .split_once(": ")
            .unwrap()
            .1
            .replace("<measured.csv>", s(&data));
        let mut args: Vec<&str> = vec!["--registry", s(&reg)];
        args.extend(cmd.split_whitespace().skip(1));
        let (code, _, e) = run(&args);
        assert_ne!(code, 1, "{cmd}: {e}");
    }
}

#[test]
fn full_pipeline_and_validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let reg = p("reg");
    let data = p("measured.csv");
    assert_eq!(run(&["world", "--out", s(&data), "--seed", "11"]).0, 0);
    for args in [
        vec!["fit", "arma", s(&data), "--var", "wind_speed"],
        vec![
            "fit",
            "dist",
            s(&data),
            "--var",
            "clearness_index",
            "--law",
            "saunier",
        ],
        vec![
            "fit",
            "nn",
            s(&data),
            "--var",
            "dry_bulb_temp",
            "--inputs",
            "global_rad,wind_speed",
        ],
        vec![
            "fit",
            "nn",
            s(&data),
            "--var",
            "rel_humidity",
            "--inputs",
            "dry_bulb_temp",
        ],
    ] {
        let mut full = vec!["--registry", s(&reg)];
        full.extend(args);
        let (code, _, err) = run(&full);
        assert_eq!(code, 0, "{err}");
    }
    fs::write(p("plan.json"), PLAN).unwrap();
    let (code, out, err) = run(&[
        "--registry",
        s(&reg),
        "generate",
        "--plan",
        s(&p("plan.json")),
        "--out",
        s(&p("gen.csv")),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("seed: 5"), "{out}");

    let (code, out, _) = run(&[
        "validate",
        "--generated",
        s(&p("gen.csv")),
        "--reference",
        s(&p("gen.csv")),
    ]);
    assert_eq!(code, 0, "{out}");

    // a reference 8 degrees warmer cannot pass
    let text = fs::read_to_string(p("gen.csv")).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "dry_bulb_temp").unwrap();
    let mut shifted = header.join(",") + "\n";
    for l in lines {
        let mut cells: Vec<String> = l.split(',').map(String::from).collect();
        cells[col] = (cells[col].parse::<f64>().unwrap() + 8.0).to_string();
        shifted += &(cells.join(",") + "\n");
    }
    fs::write(p("warm.csv"), shifted).unwrap();
    let (code, out, _) = run(&[
        "validate",
        "--generated",
        s(&p("gen.csv")),
        "--reference",
        s(&p("warm.csv")),
    ]);
    assert_eq!(code, 3, "{out}");
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(run(&["fit", "arma"]).0, 1);
    assert_eq!(run(&["no-such-command"]).0, 1);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("generate"));
    let (code, out, _) = run(&["templates"]);
    assert_eq!(code, 0);
    assert!(out.contains("poly1"));
}
