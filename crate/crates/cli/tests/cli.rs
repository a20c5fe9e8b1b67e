use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_with_threads(args, None)
}

fn run_with_threads(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_siegel-capture"));
    cmd.args(args).env_remove("SIEGEL_CAPTURE_THREADS");
    if let Some(n) = threads {
        cmd.env("SIEGEL_CAPTURE_THREADS", n);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("json file")).expect("valid json")
}

fn point(value: &Value) -> (f64, f64) {
    (value[0].as_f64().unwrap(), value[1].as_f64().unwrap())
}

#[test]
fn centers_prints_counts_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("centers.csv");
    let out = run(&["centers", "--theta", "golden", "--max-level", "3", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "counts 1 3 9"), "{text}");
    assert!(text.lines().any(|l| l == "1 3.000000+0.000000i"), "{text}");
    let rows: Vec<String> = std::fs::read_to_string(&csv).unwrap().lines().map(String::from).collect();
    assert_eq!(rows[0], "level,re,im,residual,derivative_magnitude");
    assert_eq!(rows.len(), 1 + 13);
    let level_one: Vec<f64> = rows[1].split(',').skip(1).take(2).map(|f| f.parse().unwrap()).collect();
    assert!((level_one[0] - 3.0).abs() < 1e-10 && level_one[1].abs() < 1e-10);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["centers", "--max-level", "7"])), 2);
    assert_eq!(code(&run(&["render", "param-c", "--res", "0", "--out", "x.ppm"])), 2);
    assert_eq!(code(&run(&["render", "param-c", "--out", "x.bmp"])), 2);
    assert_eq!(code(&run(&["centers", "--theta", "[0;(0)]"])), 2);
    assert_eq!(code(&run(&["render", "dyn", "--c", "1+", "--out", "x.ppm"])), 2);
    assert_eq!(code(&run(&["bogus"])), 2);
}

#[test]
fn io_failure_exits_one() {
    let out = run(&["render", "param-c", "--res", "4", "--width", "8", "--out", "/nonexistent/dir/x.ppm"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn param_render_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let render = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = run_with_threads(
            &["render", "param-c", "--center", "0+0i", "--width", "8", "--res", "40", "--out", path.to_str().unwrap()],
            Some(threads),
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        path
    };
    let one = render("one.ppm", "1");
    let three = render("three.ppm", "3");
    let bytes = std::fs::read(&one).unwrap();
    assert!(bytes.starts_with(b"P6\n40 40\n255\n"));
    assert_eq!(bytes, std::fs::read(&three).unwrap());
    let sidecar = read_json(&dir.path().join("three.ppm.json"));
    assert_eq!(sidecar["job"]["threads"], 3);
    let total: u64 = ["capture", "cycle", "escape", "unresolved"].iter().map(|k| sidecar["histogram"][k].as_u64().unwrap()).sum();
    assert_eq!(total, 40 * 40);
}

#[test]
fn dynamical_render_writes_png_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dyn3.png");
    let out = run(&["render", "dyn", "--theta", "golden", "--c", "3+0i", "--width", "4", "--res", "32", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(&std::fs::read(&path).unwrap()[1..4], b"PNG");
    let sidecar = read_json(&dir.path().join("dyn3.png.json"));
    assert_eq!(sidecar["job"]["plane"]["kind"], "dynamical");
    assert!(sidecar["histogram"]["capture"].as_u64().unwrap() > 0);
}

#[test]
fn param_a_render_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.ppm");
    let out = run(&["render", "param-a", "--width", "6", "--res", "16", "--rotate", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read(&path).unwrap().starts_with(b"P6\n16 16\n255\n"));
}

#[test]
fn verify_census_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("census.json");
    let out = run(&["verify", "census", "--max-level", "4", "--report", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let value = read_json(&report);
    assert_eq!(value["pass"], true);
    assert_eq!(value["counts"], serde_json::json!([1, 3, 9, 27]));
}

#[test]
fn verify_census_detects_a_perturbed_tower() {
    let out = run(&["verify", "census", "--max-level", "3", "--perturb-level", "2", "--perturb-eps", "1e-3"]);
    assert_eq!(code(&out), 1);
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["pass"], false);
}

#[test]
fn verify_linearization_passes() {
    let out = run(&["verify", "linearization"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["parameters"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_symmetry_small_sample() {
    let out = run(&["verify", "symmetry", "--samples", "20", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(value["report"]["agreement"].as_f64().unwrap() >= 0.99);
    assert_eq!(value["report"]["seed"], 7);
}

#[test]
fn trace_siegel_puts_one_on_the_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("siegel.json");
    let out = run(&["trace", "siegel", "--c", "3+0i", "--terms", "256", "--samples", "512", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let value = read_json(&path);
    assert_eq!(value["points"].as_array().unwrap().len(), 512);
    assert_eq!(value["verdict"]["verdict"], "on_boundary_one");
    let nearest = value["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(point)
        .map(|(x, y)| ((x - 1.0).powi(2) + y * y).sqrt())
        .fold(f64::INFINITY, f64::min);
    assert!(nearest < 0.05 * value["diameter"].as_f64().unwrap(), "nearest sample {nearest}");
}

#[test]
fn trace_zakeri_contains_plus_and_minus_one() {
    let out = run(&["trace", "zakeri", "--samples", "32"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(value["distance_to_plus_one"].as_f64().unwrap() < 5e-3);
    assert!(value["distance_to_minus_one"].as_f64().unwrap() < 5e-3);
}

#[test]
fn trace_ray_lands_near_the_boundary() {
    let out = run(&["trace", "ray", "--center", "3+0i", "--level", "1", "--angle", "0.25"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(value["path"].as_array().unwrap().len() > 3);
    let (x, y) = point(&value["landing"]);
    assert!(((x - 3.0).powi(2) + y * y).sqrt() > 0.1);
}

#[test]
fn trace_component_closes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("component.json");
    let out = run(&["trace", "component", "--theta", "golden", "--center", "3+0i", "--level", "1", "--rays", "64", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let value = read_json(&path);
    assert!(value["relative_gap"].as_f64().unwrap() < 1e-3);
    assert_eq!(value["angles"].as_array().unwrap().len(), 64);
}
