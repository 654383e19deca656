use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use esp_core::catalog::connected_graphs;
use esp_core::generators::{complete, cycle, path};
use esp_core::Graph;
use serde_json::Value;

fn esp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esp")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

fn write_graph(dir: &Path, name: &str, g: &Graph) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, g.to_edge_list()).unwrap();
    p
}

#[test]
fn readme_examples() {
    let dir = tmp();
    let p4 = write_graph(dir.path(), "p4.txt", &path(4));
    let p4 = p4.to_str().unwrap();

    let out = esp(&["solve", p4, "--method", "oracle", "--ell", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["feasible"], true);
    assert_eq!(r["certificate"], serde_json::json!([0, 1, 2, 3]));
    assert!(r.get("timings").is_none());

    let r = json(&esp(&["verify-path", p4, "--path", "0,1", "--ell", "2"]));
    assert_eq!(r["feasible"], true);
    let out = esp(&["verify-path", p4, "--path", "0,1", "--ell", "1"]);
    assert_eq!(out.status.code(), Some(1));

    let k2 = write_graph(dir.path(), "k2.txt", &complete(2));
    let h = dir.path().join("h.txt");
    let out = esp(&["gen-hard", k2.to_str().unwrap(), "--k", "1", "--out", h.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&h).unwrap();
    assert!(text.starts_with("14 "));
    assert!(dir.path().join("h.json").exists());
}

#[test]
fn exit_codes() {
    let dir = tmp();
    let c4 = write_graph(dir.path(), "c4.txt", &cycle(4));
    let c4 = c4.to_str().unwrap();
    assert_eq!(esp(&["solve", c4, "--method", "fvs", "--ell", "0"]).status.code(), Some(1));
    assert_eq!(esp(&["solve", c4, "--ell", "1", "--set", "9"]).status.code(), Some(2));
    assert_eq!(esp(&["solve", c4, "--ell", "1", "--set", ""]).status.code(), Some(2));
    assert_eq!(esp(&["solve", c4, "--method", "dpd", "--ell", "1", "--set", "0,2"]).status.code(), Some(0));
    let out = esp(&["solve", c4, "--ell", "1", "--method", "fvs", "--set", "0", "--budget", "0"]);
    assert_eq!(out.status.code(), Some(4));
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "2 1\n0 5\n").unwrap();
    assert_eq!(esp(&["stats", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(esp(&["solve", "/nonexistent", "--ell", "1"]).status.code(), Some(2));
    assert_eq!(esp(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn invalid_deletion_set() {
    let dir = tmp();
    let c5 = write_graph(dir.path(), "c5.txt", &cycle(5));
    let out = esp(&["solve", c5.to_str().unwrap(), "--ell", "1", "--method", "fvs", "--set", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 1)]).unwrap();
    let f = write_graph(dir.path(), "g.txt", &g);
    let out = esp(&["solve", f.to_str().unwrap(), "--ell", "1", "--method", "fvs", "--set", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid deletion set"));
}

#[test]
fn stdin_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_esp"))
        .args(["optimum", "-", "--method", "oracle"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(cycle(6).to_edge_list().as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(json(&out)["ell"], 1);
}

#[test]
fn methods_agree_and_certificates_round_trip() {
    let dir = tmp();
    let mut checked = 0;
    for (i, g) in connected_graphs(5).into_iter().enumerate().step_by(3) {
        let f = write_graph(dir.path(), &format!("g{i}.txt"), &g);
        let f = f.to_str().unwrap();
        let diam = esp_core::graph::all_pairs_distances(&g).diameter();
        for ell in 0..=diam {
            let ell_s = ell.to_string();
            let mut bits = Vec::new();
            for m in ["oracle", "fvs", "dpd", "svd"] {
                let out = esp(&["solve", f, "--method", m, "--ell", &ell_s, "--svd-threshold", "0"]);
                let r = json(&out);
                bits.push(r["feasible"].as_bool().unwrap());
                if let Some(cert) = r["certificate"].as_array() {
                    let list: Vec<String> = cert.iter().map(|v| v.to_string()).collect();
                    let back = esp(&["verify-path", f, "--path", &list.join(","), "--ell", &ell_s]);
                    assert_eq!(json(&back)["feasible"], true, "{m} on {g:?} ell={ell}");
                }
            }
            assert!(bits.iter().all(|&b| b == bits[0]), "{bits:?} on {g:?} ell={ell}");
            checked += 1;
        }
    }
    assert!(checked > 10);
}

#[test]
fn gen_random_is_seeded() {
    let a = esp(&["gen-random", "--n", "9", "--seed", "7"]);
    let b = esp(&["gen-random", "--n", "9", "--seed", "7"]);
    let c = esp(&["gen-random", "--n", "9", "--seed", "8"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let g = Graph::parse_edge_list(&String::from_utf8(a.stdout).unwrap()).unwrap();
    assert!(g.is_connected());
}

#[test]
fn timings_only_on_request() {
    let dir = tmp();
    let f = write_graph(dir.path(), "c6.txt", &cycle(6));
    let r = json(&esp(&["--timings", "approx", f.to_str().unwrap(), "--eps", "0.5"]));
    assert!(r["timings"]["total_seconds"].is_number());
    assert_eq!(r["ell"], 1);
}
