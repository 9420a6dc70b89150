use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wsnb(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsnb")).args(args).current_dir(dir).output().expect("spawn wsnb")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn default_generate_hits_target_degree_and_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&wsnb(&["generate", "-o", "a.txt"], dir.path()));
    let d_avg: f64 = stdout.trim().rsplit("d_avg=").next().unwrap().parse().unwrap();
    assert!((11.0..=13.0).contains(&d_avg), "{stdout}");
    ok(&wsnb(&["generate", "-o", "b.txt"], dir.path()));
    assert_eq!(fs::read(dir.path().join("a.txt")).unwrap(), fs::read(dir.path().join("b.txt")).unwrap());
}

#[test]
fn json_graph_output_round_trips_through_classify() {
    let dir = tempfile::tempdir().unwrap();
    ok(&wsnb(&["generate", "--width", "8", "--height", "8", "--hole-preset", "none", "-o", "g.json"], dir.path()));
    let g: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("g.json")).unwrap()).unwrap();
    let n = g["n"].as_u64().unwrap() as usize;
    let v: Value = serde_json::from_str(&ok(&wsnb(&["classify", "g.json", "--alg", "ecbr"], dir.path()))).unwrap();
    assert_eq!(v["verdicts"].as_object().unwrap().len(), n);
}

#[test]
fn malformed_config_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.json"), r#"{"network": {"target_avg_degree": "twelve"}}"#).unwrap();
    let out = wsnb(&["generate", "--config", "c.json", "-o", "g.txt"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("network.target_avg_degree"));

    fs::write(dir.path().join("c.json"), r#"{"ecbr": {"gama": 0.5}}"#).unwrap();
    let out = wsnb(&["evaluate", "--config", "c.json"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ecbr.gama"));
}

#[test]
fn ecbr_on_a_path_marks_everything() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.txt"), "5 4\n- -\n- -\n- -\n- -\n- -\n0 1\n1 2\n2 3\n3 4\n").unwrap();
    let v: Value =
        serde_json::from_str(&ok(&wsnb(&["classify", "p.txt", "--alg", "ecbr", "--emit-lengths"], dir.path())))
            .unwrap();
    let verdicts = v["verdicts"].as_object().unwrap();
    assert_eq!(verdicts.len(), 5);
    assert!(verdicts.values().all(|x| x == "boundary"));
    assert!(v["circle_lengths"].as_object().unwrap().values().all(|l| l == 0));
}

#[test]
fn usage_and_runtime_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.txt"), "3 2\n- -\n- -\n- -\n0 1\n1 2\n").unwrap();
    assert_eq!(code(&wsnb(&["classify", "p.txt", "--alg", "dvhop"], dir.path())), 2);
    assert_eq!(code(&wsnb(&["classify", "p.txt", "--alg", "mdsbr", "--alpha-min", "400"], dir.path())), 2);
    // OPT needs positions
    let out = wsnb(&["classify", "p.txt", "--alg", "mdsbr", "--variant", "OPT"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("positions"));
    assert_eq!(code(&wsnb(&["classify", "missing.txt", "--alg", "ecbr"], dir.path())), 1);
}

#[test]
fn mdsbr_refine_on_default_layout_matches_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    ok(&wsnb(&["generate", "-o", "g.txt", "--truth", "gt.json"], dir.path()));
    let v: Value =
        serde_json::from_str(&ok(&wsnb(&["classify", "g.txt", "--alg", "mdsbr", "--refine"], dir.path()))).unwrap();
    let boundary: Vec<u64> = v["verdicts"]
        .as_object()
        .unwrap()
        .iter()
        .filter(|(_, x)| *x == "boundary")
        .map(|(k, _)| k.parse().unwrap())
        .collect();

    let golden: Value =
        serde_json::from_str(include_str!("fixtures/default_mdsbr_refine.json")).unwrap();
    let expected: Vec<u64> = golden["boundary"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(v["verdicts"].as_object().unwrap().len() as u64, golden["nodes"].as_u64().unwrap());
    assert_eq!(boundary, expected);

    // thin band: few nodes, almost none of them interior
    let gt: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("gt.json")).unwrap()).unwrap();
    let labels = gt["labels"].as_object().unwrap();
    let interior = boundary.iter().filter(|id| labels[&id.to_string()] == "interior").count();
    assert!(boundary.len() * 5 < labels.len());
    assert!(interior * 50 < boundary.len());
}

#[test]
fn evaluate_csv_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.json"),
        r#"{"network": {"area_width": 12, "area_height": 12, "hole_preset": "cross"},
            "experiment": {"trials": 3, "base_seed": 7, "algorithms": ["EC-BR", "MDS-BR-Ref"]},
            "output": {"json_path": "report.json"}}"#,
    )
    .unwrap();
    let run = |threads: &str, csv: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_wsnb"));
        cmd.args(["evaluate", "--config", "c.json", "--csv", csv]).env("WSNB_THREADS", threads);
        ok(&cmd.current_dir(dir.path()).output().unwrap());
        fs::read_to_string(dir.path().join(csv)).unwrap()
    };
    let one = run("1", "one.csv");
    let many = run("4", "many.csv");
    assert_eq!(one, many);
    let mut lines = one.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,algorithm,refined,mandatory_fn_pct,optional_interior_pct,interior_fp_pct,nodes,edges,d_avg_measured"
    );
    assert_eq!(lines.count(), 6);
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report.as_array().unwrap().len(), 2);
    assert_eq!(report[0]["algorithm"], "EC-BR");
}

#[test]
fn render_three_nodes_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.txt"), "3 2\n0 0\n1 0\n0.5 0.5\n0 1 W\n1 2 W\n").unwrap();
    let a = ok(&wsnb(&["render", "t.txt", "--color", "plain"], dir.path()));
    let b = ok(&wsnb(&["render", "t.txt", "--color", "plain"], dir.path()));
    assert_eq!(a, b);
    assert_eq!(a.matches("<circle").count(), 3);

    ok(&wsnb(&["classify", "t.txt", "--alg", "ecbr", "-o", "v.json"], dir.path()));
    let svg = ok(&wsnb(&["render", "t.txt", "--color", "verdicts", "--verdicts", "v.json"], dir.path()));
    assert_eq!(svg.matches("<circle").count(), 3);
    assert_eq!(code(&wsnb(&["render", "t.txt", "--color", "verdicts"], dir.path())), 2);
}

#[test]
fn truth_render_has_optional_halo() {
    let dir = tempfile::tempdir().unwrap();
    ok(&wsnb(&["generate", "--width", "14", "--height", "14", "-o", "g.txt"], dir.path()));
    let svg = ok(&wsnb(&["render", "g.txt", "--no-edges"], dir.path()));
    // mandatory red, optional orange, interior grey
    for color in ["#d62728", "#ff9f1c", "#9e9e9e"] {
        assert!(svg.contains(color), "missing {color}");
    }
    assert!(!svg.contains("<line"));
}

#[test]
fn ecbr_cycles_trace_hole_and_border() {
    let dir = tempfile::tempdir().unwrap();
    ok(&wsnb(&["generate", "-o", "g.txt"], dir.path()));
    let v: Value =
        serde_json::from_str(&ok(&wsnb(&["classify", "g.txt", "--alg", "ecbr", "--cycles"], dir.path()))).unwrap();
    assert_eq!(v["cycles"].as_array().unwrap().len(), 2, "{}", v["cycles"]);
}

#[test]
fn hist_counts_every_node() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&wsnb(&["generate", "--width", "8", "--height", "8", "-o", "g.txt"], dir.path()));
    let n: u64 = stdout.split_whitespace().next().unwrap().trim_start_matches("n=").parse().unwrap();
    let csv = ok(&wsnb(&["hist", "g.txt"], dir.path()));
    let total: u64 = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, n);
}
