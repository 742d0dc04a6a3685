//! End-to-end exercises of the command-line pipeline at toy scale.

use std::path::Path;
use std::process::{Command, Output};

use sabrcal::market::{
    price_cap, CapFloorQuoteSurface, CapQuoteRow, CapSchedule, DiscountCurve,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sabrcal"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn missing_input_gives_io_exit_and_no_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_model = dir.path().join("model.json");
    let status = bin()
        .args(["train", "--subset", "1", "--data"])
        .arg(dir.path().join("nope.csv"))
        .arg("--out")
        .arg(&out_model)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    assert!(!out_model.exists());
}

#[test]
fn invalid_subset_gives_usage_exit() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["gen", "--subset", "9", "--out"])
        .arg(dir.path().join("x.csv"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn malformed_corpus_gives_format_exit() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "only,two\n1,2\n").unwrap();
    let status = bin()
        .args(["train", "--subset", "1", "--data"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("m.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));
}

#[test]
fn gen_output_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for (path, workers) in [(&a, "1"), (&b, "2")] {
        run_ok(
            bin()
                .args(["gen", "--subset", "1", "--surfaces", "2", "--paths", "8192", "--out"])
                .arg(path)
                .env("SABRCAL_WORKERS", workers),
        );
    }
    let bytes_a = std::fs::read(&a).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, std::fs::read(&b).unwrap());
    assert!(a.with_extension("json").exists(), "dataset manifest");
    assert!(dir.path().join("a.csv.manifest.json").exists(), "run manifest");
}

#[test]
fn gen_train_eval_calibrate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.csv");
    run_ok(bin().args(["gen", "--subset", "1", "--surfaces", "4", "--paths", "4096", "--out"]).arg(&corpus));

    // Subset mismatch against the dataset manifest is refused.
    let status = bin()
        .args(["train", "--subset", "2", "--data"])
        .arg(&corpus)
        .arg("--out")
        .arg(dir.path().join("wrong.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    let model = dir.path().join("model.json");
    let out = run_ok(
        bin()
            .args(["train", "--subset", "1", "--epochs", "3", "--batch", "64", "--data"])
            .arg(&corpus)
            .arg("--out")
            .arg(&model),
    );
    assert!(model.exists());
    assert!(dir.path().join("model.json.manifest.json").exists());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["validation"]["rmse"].as_f64().unwrap().is_finite());

    let scatter = dir.path().join("scatter.csv");
    let out = run_ok(
        bin()
            .args(["eval", "--model"])
            .arg(&model)
            .arg("--data")
            .arg(&corpus)
            .arg("--scatter-out")
            .arg(&scatter),
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["rmse"].as_f64().unwrap().is_finite());
    let scatter_text = std::fs::read_to_string(&scatter).unwrap();
    assert!(scatter_text.starts_with("t,k_hat,target,prediction"));

    // Calibration with the Hagan pricer needs no model files.
    let smiles = dir.path().join("smiles.csv");
    let params = sabrcal::model::SabrParams {
        f0: 0.025,
        lambda: 0.03,
        alpha: 0.05,
        beta: 0.5,
        rho: -0.2,
        nu: 0.4,
    };
    let strikes = vec![-0.005, 0.005, 0.015, 0.025, 0.04];
    let pricer = sabrcal::calib::HaganPricer;
    let vols = sabrcal::calib::SmilePricer::vols(&pricer, &params, 1.0, &strikes).unwrap();
    sabrcal::calib::write_smiles_csv(
        &smiles,
        &[sabrcal::calib::MarketSmile {
            t: 1.0,
            f0: params.f0,
            lambda: params.lambda,
            strikes,
            vols_sln: vols,
        }],
    )
    .unwrap();
    let outdir = dir.path().join("calib");
    run_ok(
        bin()
            .args(["calibrate", "--pricer", "hagan", "--starts", "6", "--surface"])
            .arg(&smiles)
            .arg("--out")
            .arg(&outdir),
    );
    assert!(outdir.join("smile_00.json").exists());
    assert!(outdir.join("manifest.json").exists());
    let ts = std::fs::read_to_string(outdir.join("term_structure.csv")).unwrap();
    assert_eq!(ts.lines().count(), 2, "header plus one pillar: {ts}");

    // The calibrated pillar prices a caplet inside its span.
    let out = run_ok(
        bin()
            .args(["price", "--t", "1.0", "--strike", "0.02", "--omega", "cap", "--term-structure"])
            .arg(outdir.join("term_structure.csv")),
    );
    let priced: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(priced["price"].as_f64().unwrap() > 0.0);
}

fn write_quote_fixture(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let curve = DiscountCurve::flat(0.02, 4.0).unwrap();
    let curve_path = dir.join("curve.csv");
    curve.write_csv(&curve_path).unwrap();
    let (fwd, lambda, sigma) = (0.025, 0.03, 0.2);
    let strikes = [0.0, 0.05];
    let omegas = [-1i8, 1];
    let rows = [1.5, 2.5]
        .iter()
        .map(|&m| {
            let sched = CapSchedule::standard(6, m).unwrap();
            let n = sched.periods().len();
            let premium = |k: f64, o: i8| {
                price_cap(&sched, k, &vec![sigma; n], &vec![fwd; n], &curve, lambda, o).unwrap()
            };
            CapQuoteRow {
                maturity: m,
                tenor_months: 6,
                atm_strike: fwd,
                atm_premium: Some(premium(fwd, 1)),
                premiums: strikes
                    .iter()
                    .zip(&omegas)
                    .map(|(&k, &o)| Some(premium(k, o)))
                    .collect(),
            }
        })
        .collect();
    let quotes = CapFloorQuoteSurface {
        strikes: strikes.to_vec(),
        omegas: omegas.to_vec(),
        rows,
    }
    .validated()
    .unwrap();
    let quotes_path = dir.join("quotes.csv");
    quotes.write_csv(&quotes_path).unwrap();
    (quotes_path, curve_path)
}

#[test]
fn strip_recovers_flat_vols() {
    let dir = tempfile::tempdir().unwrap();
    let (quotes, curve) = write_quote_fixture(dir.path());
    let out = dir.path().join("stripped.csv");
    run_ok(
        bin()
            .args(["strip", "--quotes"])
            .arg(&quotes)
            .arg("--curve")
            .arg(&curve)
            .arg("--out")
            .arg(&out),
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let mut n_rows = 0;
    for line in text.lines().skip(1) {
        let vol: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((vol - 0.2).abs() < 1e-6, "stripped vol {vol}");
        n_rows += 1;
    }
    // 4 semiannual fixings (0.5..2.0) x (2 strikes + ATM).
    assert_eq!(n_rows, 12);
    assert!(dir.path().join("stripped.csv.manifest.json").exists());
}

#[test]
fn benchmark_same_seed_reproduces_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        run_ok(
            bin()
                .args(["benchmark", "--paths", "4096", "--seed", "9", "--table", "black", "--out"])
                .arg(out),
        );
    }
    let bytes = std::fs::read(a.join("black_limit.csv")).unwrap();
    assert!(!bytes.is_empty());
    assert_eq!(bytes, std::fs::read(b.join("black_limit.csv")).unwrap());
    assert!(a.join("manifest.json").exists());
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "[benchmark]\npaths = 2048\n").unwrap();
    let out = dir.path().join("bench");
    run_ok(
        bin()
            .args(["--config"])
            .arg(&cfg)
            .args(["benchmark", "--seed", "3", "--table", "black", "--out"])
            .arg(&out),
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["paths"].as_u64(), Some(2048));
}

#[test]
fn diagnose_emits_grids() {
    let dir = tempfile::tempdir().unwrap();
    let ts = dir.path().join("term_structure.csv");
    std::fs::write(
        &ts,
        "t,f0,lambda,alpha,beta,rho,nu,objective,converged\n\
         1.0,0.025,0.03,0.05,0.5,-0.2,0.4,0.0,true\n",
    )
    .unwrap();
    let out = dir.path().join("diag");
    run_ok(
        bin()
            .args(["diagnose", "--pricer", "hagan", "--paths", "2048", "--term-structure"])
            .arg(&ts)
            .arg("--out")
            .arg(&out),
    );
    let rmsd = std::fs::read_to_string(out.join("rmsd.csv")).unwrap();
    assert!(rmsd.lines().count() >= 2, "rmsd rows: {rmsd}");
    let ard = std::fs::read_to_string(out.join("ard.csv")).unwrap();
    assert!(ard.lines().count() >= 2, "ard rows: {ard}");
    assert!(out.join("manifest.json").exists());
}
