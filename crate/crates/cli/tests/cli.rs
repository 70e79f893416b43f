use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value as Json};
use skizze_cli::record::Record;
use skizze_core::poset::{build_poset, enumerate_generic, parse_catalog};
use skizze_core::tracer::classify;

const Z2_MINUS_1: &str = "1:0,0:0,-1:0";

fn skizze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skizze")).args(args).output().unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = skizze(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Sends request lines to `skizze serve` on standard streams.
fn serve(requests: &[Json]) -> Vec<Json> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_skizze"))
        .arg("serve")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let mut stdin = child.stdin.take().unwrap();
        for r in requests {
            writeln!(stdin, "{r}").unwrap();
        }
    }
    let out = child.wait_with_output().unwrap();
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn classify_prints_the_tracer_code() {
    let r = Record::parse(&stdout_of(&["classify", "--poly", Z2_MINUS_1])).unwrap();
    let (_, code) = classify(&Z2_MINUS_1.parse().unwrap()).unwrap();
    assert_eq!(r.get_str("code"), Some(code.as_str()));
    assert_eq!(r.get_str("codim"), Some("1"));
}

#[test]
fn enumerate_generic_lists_sorted_codes() {
    let r = Record::parse(&stdout_of(&["enumerate-generic", "--n", "2"])).unwrap();
    assert_eq!(r.get_str("count"), Some("4"));
    let listed: Vec<Json> = r.to_json()["codes"].as_array().unwrap().clone();
    let expect: Vec<Json> = enumerate_generic(2).into_iter().map(|c| json!(c.0)).collect();
    assert_eq!(listed, expect);
}

#[test]
fn render_draws_both_axes_and_the_hyperbola() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.svg");
    stdout_of(&["render", "--poly", Z2_MINUS_1, "--out", file.to_str().unwrap()]);
    let svg = std::fs::read_to_string(&file).unwrap();
    assert_eq!(svg.matches("class=\"curve red\"").count(), 2);
    assert_eq!(svg.matches("class=\"curve blue\"").count(), 2);
    assert_eq!(svg.matches("class=\"leaf\"").count(), 8);
    assert_eq!(svg.matches("class=\"root\"").count(), 2);
    for f in ["A", "B", "C", "D"] {
        assert!(svg.contains(&format!("class=\"face-{f}\"")));
    }
}

#[test]
fn exit_statuses() {
    assert_eq!(skizze(&["classify", "--poly", "1:0,x"]).status.code(), Some(2));
    assert_eq!(skizze(&["classify"]).status.code(), Some(2));
    assert_eq!(skizze(&["frobenius", "--poly", "1:0,0:0,0:0,0:0"]).status.code(), Some(3));
    assert_eq!(skizze(&["poset", "--n", "5"]).status.code(), Some(4));
    assert_eq!(skizze(&["classify", "--poly", "1:0,0:0,0:0,-1:0", "--cap", "2"]).status.code(), Some(4));
}

#[test]
fn catalog_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p2.tsv");
    stdout_of(&["poset", "--n", "2", "--catalog", file.to_str().unwrap()]);
    let entries = parse_catalog(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let poset = build_poset(2).unwrap();
    assert_eq!(entries.len(), poset.nodes.len());
    for e in &entries {
        assert!(poset.nodes.contains(&e.code));
        assert_eq!(e.parents, poset.parents(&e.code));
    }
    let again = dir.path().join("again.tsv");
    stdout_of(&["poset", "--n", "2", "--catalog", again.to_str().unwrap()]);
    assert_eq!(std::fs::read(&file).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn cli_and_service_payloads_agree() {
    let cases: Vec<(Vec<&str>, Json)> = vec![
        (vec!["classify", "--poly", Z2_MINUS_1], json!({"method": "classify", "params": {"poly": Z2_MINUS_1}})),
        (vec!["trace", "--poly", "1:0,0.3:0.2,-1:0.5"], json!({"method": "trace", "params": {"poly": "1:0,0.3:0.2,-1:0.5"}})),
        (vec!["roots", "--poly", "1:0,0:0,-4:0"], json!({"method": "roots", "params": {"poly": "1:0,0:0,-4:0"}})),
        (vec!["enumerate-generic", "--n", "3"], json!({"method": "enumerate", "params": {"n": 3}})),
        (vec!["frobenius", "--poly", "1:0,0:0,-3:0,1:0"], json!({"method": "frobenius", "params": {"poly": "1:0,0:0,-3:0,1:0"}})),
    ];
    let requests: Vec<Json> = cases
        .iter()
        .enumerate()
        .map(|(i, (_, r))| {
            let mut r = r.clone();
            r["id"] = json!(i);
            r
        })
        .collect();
    let responses = serve(&requests);
    assert_eq!(responses.len(), cases.len());
    for ((args, _), resp) in cases.iter().zip(&responses) {
        let cli = Record::parse(&stdout_of(args)).unwrap().to_json();
        assert_eq!(cli.to_string(), resp["result"].to_string(), "{args:?}");
    }
    let code = responses[0]["result"]["code"].as_str().unwrap().to_owned();
    let cli = Record::parse(&stdout_of(&["poset", "--n", "2", "--neighbors", &code])).unwrap();
    let resp = serve(&[json!({"id": 9, "method": "poset.neighbors", "params": {"code": code}})]);
    assert_eq!(cli.to_json(), resp[0]["result"]);
    assert!(!resp[0]["result"]["parents"].as_array().unwrap().is_empty());
}

#[test]
fn service_errors_keep_the_stream_open() {
    let responses = serve(&[
        json!({"id": 1, "method": "frobnicate"}),
        json!("not an object"),
        json!({"id": 3, "method": "classify", "params": {"poly": "2:0,1:0"}}),
        json!({"id": 4, "method": "classify", "params": {"poly": Z2_MINUS_1}}),
    ]);
    assert_eq!(responses.len(), 4);
    assert_eq!(responses[0]["id"], 1);
    assert_eq!(responses[0]["error"]["kind"], "unknown-method");
    assert_eq!(responses[1]["error"]["kind"], "invalid-request");
    assert_eq!(responses[2]["id"], 3);
    assert_eq!(responses[2]["error"]["kind"], "parse");
    assert!(responses[3]["result"]["code"].is_string());
}

#[test]
fn replayed_session_matches_the_deform_run() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("path.rec");
    let path = "1:0,0:0,-0.7071067811865476:-0.7071067811865476..1:0,0:0,0.7071067811865476:-0.7071067811865476";
    let direct = stdout_of(&["deform", "--path", path, "--export", file.to_str().unwrap()]);
    let from_file = stdout_of(&["deform", "--path-file", file.to_str().unwrap()]);
    assert_eq!(direct, from_file);
    let timeline = Record::parse(&direct).unwrap().to_json();
    let events = timeline["events"].as_array().unwrap();
    assert_eq!(events.len(), 1);
    assert_eq!(events[0]["kind"], "critical-value-imaginary");

    let spec = Record::parse(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let mut requests = vec![json!({
        "id": 0,
        "method": "deform.start",
        "params": {"path": spec.get_str("path"), "mode": spec.get_str("mode"), "samples": spec.get_str("samples")}
    })];
    for k in 1..=9 {
        requests.push(json!({"id": k, "method": "deform.step", "params": {"session": 0, "dt": 0.125}}));
    }
    let responses = serve(&requests);
    let segments = timeline["segments"].as_array().unwrap();
    assert_eq!(responses[0]["result"]["code"], segments[0]["code"]);
    let replayed: Vec<Json> = responses[1..9]
        .iter()
        .flat_map(|r| r["result"]["events"].as_array().unwrap().clone())
        .collect();
    assert_eq!(&replayed, events);
    assert_eq!(responses[8]["result"]["code"], segments[1]["code"]);
    assert_eq!(responses[9]["error"]["kind"], "path-exhausted");
}

#[test]
fn tcp_service_answers() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_skizze"))
        .args(["serve", "--listen", "127.0.0.1:0"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on ").unwrap().to_owned();
    let ask = |req: Json| -> Json {
        let mut s = TcpStream::connect(&addr).unwrap();
        writeln!(s, "{req}").unwrap();
        let mut resp = String::new();
        BufReader::new(s).read_line(&mut resp).unwrap();
        serde_json::from_str(&resp).unwrap()
    };
    let a = ask(json!({"id": 1, "method": "classify", "params": {"poly": Z2_MINUS_1}}));
    let b = ask(json!({"id": 2, "method": "nope"}));
    child.kill().unwrap();
    let _ = child.wait();
    assert_eq!(a["id"], 1);
    assert!(a["result"]["code"].as_str().unwrap().starts_with("n2|"));
    assert_eq!(b["error"]["kind"], "unknown-method");
}

#[test]
fn double_then_forget() {
    let r = Record::parse(&stdout_of(&["double", "--config", "a=0:0,b=1:-1", "--label", "b", "--dir", "0:1", "--eps", "0.25"]))
        .unwrap();
    let doubled = r.get_str("config").unwrap().to_owned();
    assert_eq!(doubled, "a=0:0,b=1:-1,b'=1:-0.75");
    let back = Record::parse(&stdout_of(&["forget", "--config", &doubled, "--label", "b'"])).unwrap();
    assert_eq!(back.get_str("config"), Some("a=0:0,b=1:-1"));
    let c = Record::parse(&stdout_of(&[
        "compose", "--base", "p=0:0,q=10:0", "--part", "a=-1:0,b=1:0", "--part", "c=0:0", "--eps", "0.1", "--verify",
    ]))
    .unwrap();
    assert_eq!(c.to_json()["verify"]["passed"], "true");
}
