use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/../core/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn btg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_btg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn validate_exit_codes() {
    let ok = btg(&["validate", &data("tables/odometer.json")]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(report(&ok)["valid"], true);

    for (file, kind) in [
        ("fixtures/overlapping.json", "OverlappingCells"),
        ("fixtures/deficit.json", "MeasureDeficit"),
        ("fixtures/signature_mismatch.json", "SignatureMismatch"),
    ] {
        let out = btg(&["validate", &data(file)]);
        assert_eq!(out.status.code(), Some(2), "{file}");
        assert_eq!(report(&out)["error"], kind);
    }
    let missing = btg(&["validate", &data("no_such_file.json")]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(report(&missing)["error"], "Io");
}

#[test]
fn anchor_check_flagship_run() {
    let out = btg(&["anchor-check", "--spec", &data("iota.json"), "--n", "500", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["elements"], 500);
    assert_eq!(r["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn reports_are_byte_identical() {
    let runs: [&[&str]; 3] = [
        &["anchor-check", "--spec", &data("iota.json"), "--n", "100", "--seed", "3"],
        &["rho", "--spec", &data("iota.json"), "--point", "[1(01),(0)]", "--depth", "6", "--seed", "5"],
        &["ball", "--gens", &data("v2_swaps.json"), "--radius", "2"],
    ];
    for args in runs {
        let a = btg(args);
        let b = btg(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn table_operations() {
    let swap = data("tables/swap.json");
    let inv = btg(&["invert", &swap]);
    assert_eq!(inv.status.code(), Some(0));
    let text = String::from_utf8(inv.stdout.clone()).unwrap();
    assert!(text.find("signature").unwrap() < text.find("rows").unwrap());

    let r = report(&btg(&["rsupp", &swap]));
    assert_eq!(r["rsupp"], "{ [0] }");
    assert_eq!(r["columns_agree"], true);

    let r = report(&btg(&["commutes", &swap, &data("tables/swap_right.json")]));
    assert_eq!(r["commutes"], true);

    let r = report(&btg(&["apply", &data("tables/x0.json"), "--point", "[1(0)]"]));
    assert_eq!(r["image"], "[01(0)]");

    let loc = btg(&["localize", &data("tables/x0.json"), "--cylinder", "[1]"]);
    assert_eq!(loc.status.code(), Some(0));
}

#[test]
fn embedding_commands() {
    let spec = data("iota.json");
    let pushed = report(&btg(&["push", "--spec", &spec, &data("tables/swap.json")]));
    assert_eq!(pushed["signature"], serde_json::json!([2, 2]));

    let rho = btg(&["rho", "--spec", &spec, "--point", "[(0),(1)]", "--depth", "3"]);
    assert_eq!(rho.status.code(), Some(0));
    assert_eq!(report(&rho)["prefix"], "[000]");

    let bad = btg(&["rho", "--spec", &spec, "--point", "[(0),(1)]", "--depth", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(report(&bad)["error"], "InvalidBound");

    let w = btg(&[
        "density-witness",
        "--spec",
        &spec,
        "--point",
        "[(0),(1)]",
        "--clopen",
        "{ [00,] }",
    ]);
    assert_eq!(w.status.code(), Some(0));
    assert_eq!(report(&w)["pushed_rsupp"], "{ [00,] }");

    let none = btg(&[
        "density-witness",
        "--spec",
        &spec,
        "--point",
        "[(1),(1)]",
        "--clopen",
        "{ [00,] }",
    ]);
    assert_eq!(none.status.code(), Some(1));

    let fs = btg(&["full-support", "--spec", &spec, "--gens", &data("v2_swaps.json")]);
    assert_eq!(fs.status.code(), Some(0));
}

#[test]
fn lr_check_with_probe_file() {
    let out = btg(&[
        "lr-check",
        "--spec",
        &data("iota.json"),
        "--gamma",
        &data("tables/swap.json"),
        "--probes",
        &data("v2_swaps.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["passed"], true);
}

#[test]
fn out_flag_and_selftest() {
    let dir = std::env::temp_dir().join(format!("btg-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("selftest.json");
    let out = btg(&["selftest", "--n", "20", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["passed"], true);
    std::fs::remove_dir_all(&dir).unwrap();
}
