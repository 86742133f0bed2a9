use std::path::Path;
use std::process::{Command, Output};

use gdft::dft::{naive_dft, BlockDiagonalJson};
use gdft::planner::{PlanConfig, Planner};
use gdft::{BlockDiagonal, GroupAlgebraElement, OpCounter};

fn gdft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdft"))
        .args(args)
        .env_remove("GDFT_CACHE_DIR")
        .output()
        .expect("failed to run gdft")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("terminated by signal")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_blocks(path: &Path) -> BlockDiagonalJson {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn dft_of_identity_is_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    let alpha = dir.path().join("alpha.csv");
    let out = dir.path().join("out.json");
    std::fs::write(&alpha, "1\n0\n0\n0\n").unwrap();
    let o = gdft(&["dft", "--group", "cyclic:4", "--alpha", p(&alpha), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let j = read_blocks(&out);
    assert_eq!(j.order, 4);
    assert_eq!(j.blocks.len(), 4);
    for b in &j.blocks {
        assert_eq!(b.dim, 1);
        assert_eq!(b.data, vec![[1.0, 0.0]]);
    }
}

#[test]
fn dft_json_alpha_matches_csv_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let json = dir.path().join("a.json");
    std::fs::write(&csv, "re,im\n1,0\n0.5,-1\n0,0\n2,0.25\n0,0\n0,0\n").unwrap();
    std::fs::write(&json, "[1, [0.5, -1], 0, [2, 0.25], 0, 0]").unwrap();
    let (o1, o2) = (dir.path().join("1.json"), dir.path().join("2.json"));
    for (a, o) in [(&csv, &o1), (&json, &o2)] {
        let r = gdft(&["dft", "--group", "symmetric:3", "--alpha", p(a), "--out", p(o)]);
        assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    }
    assert_eq!(std::fs::read(&o1).unwrap(), std::fs::read(&o2).unwrap());
}

#[test]
fn dft_dihedral_random_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d6.json");
    let o = gdft(&["dft", "--group", "dihedral:6", "--alpha", "random:7", "--strategy", "single", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let got = BlockDiagonal::from_json(&read_blocks(&out)).unwrap();

    let planner = Planner::new(PlanConfig::default());
    let g = std::sync::Arc::new(gdft::group::GroupSpec::parse_short("dihedral:6").unwrap().build().unwrap());
    let irreps = planner.irreps(&g).unwrap();
    let want = naive_dft(&GroupAlgebraElement::random(&g, 7), &irreps, &OpCounter::new()).unwrap();
    assert!(got.max_block_residual(&want) <= 1e-6);

    let v = gdft(&["verify", "--group", "dihedral:6", "--seed", "7", "--seeds", "1"]);
    assert_eq!(code(&v), 0, "{}", stdout(&v));
}

#[test]
fn dft_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = gdft(&["dft", "--group", "alternating:5", "--alpha", "random:3", "--out", p(out)]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn plan_dump_and_reload_agree() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let o = gdft(&["dft", "--group", "alternating:5", "--alpha", "random:1", "--strategy", "triple", "--dump-plan", p(&plan), "--out", p(&a)]);
    assert_eq!(code(&o), 0);
    let o = gdft(&["dft", "--group", "alternating:5", "--alpha", "random:1", "--plan", p(&plan), "--out", p(&b)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn dft_trace_lists_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    let out = dir.path().join("out.json");
    let o = gdft(&["dft", "--group", "cyclic:64", "--alpha", "random:2", "--trace", p(&trace), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let events: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(events.len() > 1);
    assert_eq!(events.last().unwrap()["path"], "root");
}

#[test]
fn malformed_group_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("g.json");
    std::fs::write(&spec, r#"{"type": "named", "family": "#).unwrap();
    let o = gdft(&["dft", "--group", p(&spec), "--alpha", "random:0"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
}

#[test]
fn bad_inputs_exit_2() {
    assert_eq!(code(&gdft(&["dft", "--group", "nosuch:3", "--alpha", "random:0"])), 2);
    assert_eq!(code(&gdft(&["dft", "--group", "cyclic:4", "--alpha", "random:x"])), 2);
    assert_eq!(code(&gdft(&["dft", "--group", "cyclic:4", "--alpha", "/nonexistent/a.csv"])), 2);
    assert_eq!(code(&gdft(&["dft", "--group", "cyclic:4"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let alpha = dir.path().join("short.csv");
    std::fs::write(&alpha, "1\n2\n").unwrap();
    assert_eq!(code(&gdft(&["dft", "--group", "cyclic:4", "--alpha", p(&alpha)])), 2);
}

#[test]
fn oversized_group_exits_3() {
    let o = gdft(&["dft", "--group", "symmetric:5*alternating:5", "--alpha", "random:0"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_a5_triple_passes() {
    let o = gdft(&["verify", "--group", "alternating:5", "--strategy", "triple", "--seeds", "5"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("triple   plan triple"));
}

#[test]
fn verify_s3_all_strategies_pass() {
    let o = gdft(&["verify", "--group", "symmetric:3", "--per-block"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let s = stdout(&o);
    for name in ["auto", "naive", "single", "prime", "triple"] {
        assert!(s.lines().any(|l| l.starts_with(name) && l.ends_with("ok")), "{name} missing in\n{s}");
    }
    assert_eq!(s.matches("block   2 dim   2").count(), 5);
}

#[test]
fn verify_forced_triple_without_triple_exits_3() {
    let o = gdft(&["verify", "--group", "cyclic:8", "--strategy", "triple"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not applicable"));
}

#[test]
fn verify_reports_worst_offender() {
    let o = gdft(&["verify", "--group", "alternating:5", "--strategy", "triple", "--seeds", "2", "--tol", "0"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("strategy triple") && err.contains("block") && err.contains("seed"), "{err}");
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(
        r.headers().unwrap(),
        vec!["group", "label", "order", "strategy", "cmul", "cadd", "ms", "residual", "error"]
    );
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn bench_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("smoke.csv");
    let start = std::time::Instant::now();
    let o = gdft(&["bench", "--catalog", "smoke", "--strategy", "auto,single,prime,triple", "--out", p(&out)]);
    assert!(start.elapsed().as_secs_f64() < 10.0);
    assert_eq!(code(&o), 0);
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 3 * 5);
    for group in rows.chunks(5) {
        assert_eq!(&group[0][3], "naive");
        for r in group {
            assert_eq!(&r[8], "");
            assert!(r[7].parse::<f64>().unwrap() <= 1e-6);
        }
    }
}

#[test]
fn bench_cyclic2k_planner_beats_naive() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c2k.csv");
    let o = gdft(&["bench", "--catalog", "cyclic2k", "--no-verify", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 10);
    for pair in rows.chunks(2) {
        let (naive, auto) = (&pair[0], &pair[1]);
        assert_eq!((&naive[3], &auto[3]), ("naive", "auto"));
        assert_eq!(&auto[7], "");
        if auto[2].parse::<usize>().unwrap() >= 64 {
            assert!(auto[4].parse::<u64>().unwrap() < naive[4].parse::<u64>().unwrap());
        }
    }
}

#[test]
fn bench_empty_catalog_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.csv");
    let o = gdft(&["bench", "--catalog", "empty", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        "group,label,order,strategy,cmul,cadd,ms,residual,error\n"
    );
}

#[test]
fn bench_records_failures_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mixed.csv");
    let o = gdft(&["bench", "cyclic:8", "nosuch:2", "quaternion8:8", "--strategy", "triple", "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    let rows = read_csv(&out);
    let groups: Vec<&str> = rows.iter().map(|r| &r[0]).collect();
    assert_eq!(groups, ["cyclic:8", "cyclic:8", "nosuch:2", "quaternion8:8", "quaternion8:8"]);
    assert!(!rows[1][8].is_empty() && rows[1][4].is_empty());
    assert!(!rows[2][8].is_empty());
    assert_eq!(&rows[4][8], "");
}

#[test]
fn bench_unknown_catalog_exits_2() {
    assert_eq!(code(&gdft(&["bench", "--catalog", "nosuch"])), 2);
}

#[test]
fn bench_trace_has_one_line_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let (out, trace) = (dir.path().join("b.csv"), dir.path().join("t.jsonl"));
    let o = gdft(&["bench", "--catalog", "smoke", "--strategy", "single", "--out", p(&out), "--trace", p(&trace)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&trace).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l["strategy"] == "single" && l["events"].as_array().is_some_and(|e| !e.is_empty())));
}
