use std::path::{Path, PathBuf};
use std::process::Command;

use axum::body::Body;
use axum::http::{header, Request};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use mddconf_server::api::{router, ApiConfig, AppState};
use mddconf_server::cli::run;

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/models")
}

fn mddconf(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["mddconf"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn compiled(dir: &Path, model: &str) -> String {
    let out = dir.join(format!("{model}.mdd.json"));
    let src = models().join(model);
    let (code, _, err) = mddconf(&["compile", src.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    out.to_str().unwrap().to_string()
}

#[test]
fn compile_prints_stats() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.mdd");
    let src = models().join("tshirt.json");
    let (code, stdout, _) = mddconf(&["compile", src.to_str().unwrap(), "-o", out.to_str().unwrap(), "--stats"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("|V_M| 7\n|E_M| 13\n"), "{stdout}");
    assert!(stdout.ends_with("solutions 11\n"));
    assert!(out.exists());
}

#[test]
fn compile_bool10() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.mdd");
    let src = models().join("bool10.json");
    let (code, stdout, _) = mddconf(&["compile", src.to_str().unwrap(), "-o", out.to_str().unwrap(), "--stats"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("|V_M| 11\n|E_M| 20\n"), "{stdout}");
    assert!(stdout.contains("solutions 1024"));
}

#[test]
fn compile_errors() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "this is not a model").unwrap();
    let out = dir.path().join("o");
    let (code, _, err) = mddconf(&["compile", garbage.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(code, 1, "{err}");
    let src = models().join("tshirt.json");
    let (code, _, _) =
        mddconf(&["compile", src.to_str().unwrap(), "-o", out.to_str().unwrap(), "--node-limit", "3"]);
    assert_eq!(code, 2);
    let (code, _, _) = mddconf(&["compile"]);
    assert_eq!(code, 1);
}

#[test]
fn query_domains() {
    let dir = tempfile::tempdir().unwrap();
    let mdd = compiled(dir.path(), "tshirt.json");
    let (code, out, _) = mddconf(&["query", &mdd, "--assign", "x2=small"]);
    assert_eq!(code, 0);
    assert_eq!(out, "x1:{black} x3:{MIB}\n");

    let (_, out, _) = mddconf(&["query", &mdd, "--cost", "price", "--max", "0"]);
    assert_eq!(out, "x1:{black} x2:{small} x3:{MIB}\n");

    let (_, out, _) = mddconf(&["query", &mdd, "--cost", "price", "--max", "3", "--reduced"]);
    assert_eq!(out, "x1:{black,white} x2:{small,medium,large} x3:{MIB,STW}\n");

    let (code, out, _) =
        mddconf(&["query", &mdd, "--cost", "price", "--max", "6", "--cost", "quality", "--max", "5", "--frontier"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("(0, 5)\n(1, 4)\n(2, 3)\n(3, 2)\n(4, 1)\n(6, 0)\n"), "{out}");
}

#[test]
fn query_marginals() {
    let dir = tempfile::tempdir().unwrap();
    let mdd = compiled(dir.path(), "tshirt.json");
    let (code, out, _) = mddconf(&["query", &mdd, "--marginals", "count"]);
    assert_eq!(code, 0);
    assert!(out.contains("x1=black:5\n"), "{out}");
    assert!(out.ends_with("total 11\n"));
    let (_, out, _) = mddconf(&["query", &mdd, "--cost", "price", "--max", "inf", "--marginals", "min-cost"]);
    assert!(out.contains("x1=blue:5\n") && out.ends_with("total 0\n"), "{out}");
}

#[test]
fn query_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mdd = compiled(dir.path(), "tshirt.json");
    for args in [
        vec!["query", mdd.as_str(), "--assign", "x9=small"],
        vec!["query", mdd.as_str(), "--assign", "x2=tiny"],
        vec!["query", mdd.as_str(), "--cost", "weight", "--max", "1"],
        vec!["query", mdd.as_str(), "--cost", "price"],
    ] {
        let (code, _, _) = mddconf(&args);
        assert_eq!(code, 3, "{args:?}");
    }
    let (code, _, _) = mddconf(&["query", models().join("tshirt.json").to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn catalogue_compiles() {
    let dir = tempfile::tempdir().unwrap();
    let mdd = compiled(dir.path(), "tshirt.csv");
    let (_, out, _) = mddconf(&["query", &mdd, "--assign", "x2=small"]);
    assert_eq!(out, "x1:{black} x3:{MIB}\n");
    let (_, out, _) = mddconf(&["query", &mdd, "--cost", "price", "--max", "0"]);
    assert_eq!(out, "x1:{black} x2:{small} x3:{MIB}\n");
}

#[test]
fn verify_and_mutation() {
    let src = models().join("tshirt.json");
    let (code, out, _) = mddconf(&["verify", src.to_str().unwrap(), "--seeds", "30"]);
    assert_eq!(code, 0, "{out}");
    let (code, _, _) = mddconf(&["verify", src.to_str().unwrap(), "--seeds", "30", "--mutate"]);
    assert_ne!(code, 0);
}

#[test]
fn bench_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let (code, _, err) =
        mddconf(&["bench", "--sizes", "2e3,4e3", "--costs", "2", "--repeats", "1", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("phase,size,avg_ms,max_ms\n"));
    assert_eq!(text.lines().count(), 7);
    let (code, _, _) = mddconf(&["bench", "--costs", "3"]);
    assert_eq!(code, 1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_mddconf");
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("g.json");
    std::fs::write(&garbage, "[").unwrap();
    let status = Command::new(bin)
        .args(["compile", garbage.to_str().unwrap(), "-o", dir.path().join("o").to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let mdd = compiled(dir.path(), "tshirt.json");
    let output = Command::new(bin).args(["query", &mdd, "--assign", "x2=small"]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&output.stdout), "x1:{black} x3:{MIB}\n");
}

/// The CLI and the HTTP API give the same domains for the same inputs.
#[tokio::test]
async fn cli_matches_api() {
    let dir = tempfile::tempdir().unwrap();
    let mdd = compiled(dir.path(), "tshirt.json");
    let app = router(AppState::new(ApiConfig::default()));
    let doc = std::fs::read_to_string(models().join("tshirt.json")).unwrap();
    let post = |uri: String, body: String| {
        let app = app.clone();
        async move {
            let req = Request::post(uri)
                .header(header::CONTENT_TYPE, "application/json")
                .body(Body::from(body))
                .unwrap();
            let resp = app.oneshot(req).await.unwrap();
            let bytes = resp.into_body().collect().await.unwrap().to_bytes();
            serde_json::from_slice::<Value>(&bytes).unwrap()
        }
    };
    let model = post("/models".into(), doc).await;
    let cases: [(&[&str], &[(&str, &str)]); 4] = [
        (&[], &[("x2", "small")]),
        (&["price", "3"], &[("x1", "white")]),
        (&["price", "2"], &[]),
        (&["quality", "1"], &[("x3", "STW")]),
    ];
    for (cost, assign) in cases {
        let mut args = vec!["query", mdd.as_str(), "--json"];
        let pairs: Vec<String> = assign.iter().map(|(v, a)| format!("{v}={a}")).collect();
        for p in &pairs {
            args.extend(["--assign", p]);
        }
        if let [name, max] = cost {
            args.extend(["--cost", name, "--max", max]);
        }
        let (code, out, _) = mddconf(&args);
        assert_eq!(code, 0);
        let mut from_cli: Value = serde_json::from_str(&out).unwrap();

        let body = match cost {
            [name, max] => json!({"model": model["id"], "mode": "single", "costs": [name], "bounds": [max.parse::<f64>().unwrap()]}),
            _ => json!({"model": model["id"]}),
        };
        let created = post("/sessions".into(), body.to_string()).await;
        let id = created["id"].as_str().unwrap();
        let mut from_api = created["snapshot"].clone();
        for (v, a) in assign {
            from_api = post(format!("/sessions/{id}/assign"), json!({"var": v, "value": a}).to_string()).await;
        }
        from_cli.as_object_mut().unwrap().remove("elapsed_ms");
        from_api.as_object_mut().unwrap().remove("elapsed_ms");
        assert_eq!(from_cli, from_api, "{cost:?} {assign:?}");
    }
}
