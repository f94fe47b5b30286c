//! The whole command-line workflow on the built-in synthetic climate:
//! write measured data, fit every model, generate, validate.

use std::io;

fn cli(args: &[&str]) -> i32 {
    let mut full = vec!["weathergen"];
    full.extend_from_slice(args);
    println!("$ weathergen {}", args.join(" "));
    weathergen::cli::run(full, &mut io::stdout(), &mut io::stderr())
}

fn main() {
    let dir = std::env::temp_dir().join("weathergen-synthetic");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).expect("temp dir");
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let (reg, measured, truth, plan, out) = (
        p("registry"),
        p("measured.csv"),
        p("truth.csv"),
        p("plan.json"),
        p("generated.csv"),
    );

    cli(&["world", "--out", &measured, "--years", "3", "--seed", "1"]);
    cli(&[
        "world",
        "--out",
        &truth,
        "--first-year",
        "2030",
        "--years",
        "10",
        "--months",
        "8",
        "--seed",
        "2",
    ]);
    for fit in [
        vec!["fit", "arma", &measured, "--var", "wind_speed"],
        vec![
            "fit",
            "dist",
            &measured,
            "--var",
            "clearness_index",
            "--law",
            "saunier",
        ],
        vec![
            "fit",
            "nn",
            &measured,
            "--var",
            "dry_bulb_temp",
            "--inputs",
            "global_rad,wind_speed",
        ],
        vec![
            "fit",
            "nn",
            &measured,
            "--var",
            "rel_humidity",
            "--inputs",
            "dry_bulb_temp",
        ],
    ] {
        let mut args = vec!["--registry", reg.as_str()];
        args.extend(fit);
        cli(&args);
    }

    let site = serde_json::to_string(&weathergen::climdata::SiteMeta::gillot()).unwrap();
    std::fs::write(
        &plan,
        format!(
            r#"{{"site": {site}, "variables": ["dry_bulb_temp", "wet_bulb_temp", "rel_humidity", "wind_speed",
 "global_rad", "clearness_index"], "start": "2040-08-01T00:00:00", "duration": 93, "cadence": "daily",
 "criteria": {{"months": [8]}}, "seed": 7}}"#
        ),
    )
    .expect("write plan");
    cli(&[
        "--registry",
        &reg,
        "generate",
        "--plan",
        &plan,
        "--out",
        &out,
    ]);
    let code = cli(&["validate", "--generated", &out, "--reference", &truth]);
    println!("validate exit code {code}");
}
