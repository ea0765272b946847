use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const DISK: &str = "\
[scenario]
id = disk
methods = esssup, lp_kq, orlicz
b_m_eps = 0.7
fem.level = 3
norms = k_esssup, luxemburg:exp_square, luxemburg:log_linear, k_q
";

const TWO: &str = "\
# two domains
[scenario]
id = pp
map = perturbed_power
map.c = 0.3
map.k = 2
methods = esssup, lp_kq, quasidisc
fem.level = 3

[scenario]
id = gauss
density = gaussian
density.n = 4
methods = esssup, gaussian_sweep
sweep.n = 10, 100, 1000
fem.level = 3
";

fn write(dir: &TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn densbound(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_densbound")).args(args).arg("--config").arg(config).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn records(csv_text: &str) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv_text.as_bytes());
    let h = r.headers().unwrap().clone();
    (h, r.records().map(|x| x.unwrap()).collect())
}

fn column(h: &csv::StringRecord, name: &str) -> usize {
    h.iter().position(|c| c == name).unwrap()
}

#[test]
fn bound_csv_has_provenance_and_full_precision() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "disk.conf", DISK);
    let o = densbound(&["bound"], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# densbound "));
    assert_eq!(lines[1], "# command bound");
    assert_eq!(lines[2], format!("# config-sha256 {}", densbound_cli::run::config_hash(DISK)));
    let (h, rows) = records(&text);
    assert_eq!(rows.len(), 3);
    let b = column(&h, "bound");
    let mu = densbound::fem_oracle::mu_disk_reference();
    let esssup: f64 = rows[0][b].parse().unwrap();
    assert!((esssup - mu).abs() < 1e-12 * mu);
    // 17 significant digits: one leading digit and 16 after the point
    let mantissa = rows[0][b].split('e').next().unwrap();
    assert_eq!(mantissa.len(), 18, "{mantissa}");
    assert!(rows[2][column(&h, "flags")].contains("ConstantConventionConservative"));
    assert!(!rows[2][column(&h, "flags")].contains("TrialEstimateB"));
}

#[test]
fn out_file_matches_stdout_and_jobs_do_not_change_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "two.conf", TWO);
    let serial = densbound(&["bound", "--jobs", "1"], &cfg);
    let out = dir.path().join("out.csv");
    let parallel = densbound(&["bound", "--jobs", "4", "--out", out.to_str().unwrap()], &cfg);
    assert_eq!(parallel.status.code(), Some(0));
    assert!(parallel.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out).unwrap(), stdout(&serial));
}

#[test]
fn gaussian_sweep_rows_and_slope_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "two.conf", TWO);
    let text = stdout(&densbound(&["bound"], &cfg));
    let (h, rows) = records(&text);
    let m = column(&h, "method");
    assert_eq!(rows.iter().filter(|r| &r[m] == "gaussian_sweep").count(), 3);
    let slope = rows.iter().find(|r| &r[m] == "gaussian_sweep_slope").unwrap();
    let im = &slope[column(&h, "intermediates")];
    let value: f64 = im.split(';').find_map(|kv| kv.strip_prefix("slope=")).unwrap().parse().unwrap();
    assert!((value - 0.2).abs() < 0.01, "{im}");

    let sweep = stdout(&densbound(&["sweep"], &cfg));
    let (h, rows) = records(&sweep);
    let n = column(&h, "n");
    assert_eq!(rows.iter().filter(|r| &r[n] == "all").count(), 2);
    assert_eq!(rows.len(), (4 + 1) + (3 + 1));
}

#[test]
fn verify_is_sound_and_detects_a_corrupted_constant() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "two.conf", TWO);
    let o = densbound(&["verify", "--jobs", "2"], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let (h, rows) = records(&stdout(&o));
    let sound = column(&h, "sound");
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| &r[sound] == "true"));

    let bad = densbound(&["verify", "--corrupt-factor", "10"], &cfg);
    assert_eq!(bad.status.code(), Some(1));
    let (h, rows) = records(&stdout(&bad));
    let flagged: Vec<_> =
        rows.iter().filter(|r| &r[column(&h, "sound")] == "false").map(|r| r[1].to_string()).collect();
    assert!(flagged.contains(&"esssup".to_string()), "{flagged:?}");
}

#[test]
fn fem_level_flag_overrides_the_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "disk.conf", DISK);
    let o = densbound(&["verify", "--fem-level", "4", "--tol", "0"], &cfg);
    let (h, rows) = records(&stdout(&o));
    let mu: f64 = rows[0][column(&h, "mu_fem")].parse().unwrap();
    let fem = densbound::fem_oracle::fem_reference(
        &densbound::ConformalMap::identity(),
        &densbound::DensityField::Constant(1.0),
        &[3, 4],
    )
    .unwrap();
    assert_eq!(mu, fem.extrapolated);
    assert!(stdout(&o).contains("# tolerance 0.0000000000000000e0"));
}

#[test]
fn norms_command() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "disk.conf", DISK);
    let (h, rows) = records(&stdout(&densbound(&["norms"], &cfg)));
    let v = column(&h, "value");
    assert_eq!(&rows[0][column(&h, "quantity")], "k_esssup");
    assert_eq!(rows[0][v].parse::<f64>().unwrap(), 1.0);
    // e^{1/λ²} − 1 = 1/π on the unit disk
    let lux: f64 = rows[1][v].parse().unwrap();
    let expect = 1.0 / (1.0 + 1.0 / std::f64::consts::PI).ln().sqrt();
    assert!((lux - expect).abs() < 1e-9, "{lux} vs {expect}");

    // u log(u + e) = 1/π at u ≈ 0.2891
    let ll: f64 = rows[2][v].parse().unwrap();
    assert!((ll - 3.459).abs() < 5e-4, "{ll}");
    let kq: f64 = rows[3][v].parse().unwrap();
    assert!((kq - std::f64::consts::PI.sqrt()).abs() < 1e-12);

    let none = write(&dir, "none.conf", "[scenario]\nmethods = esssup\n");
    let o = densbound(&["norms"], &none);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_and_config_errors_exit_2_with_line_numbers() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("[scenario]\nmethods = esssup\nradius = 2\n", "line 3", "unknown key"),
        ("[scenario]\nmethods = esssup, nonsense\n", "line 2", "unknown method"),
        ("[scenario]\np = 1.5\nq = 6\nmethods = lp_kq\n", "line 4", "2 < q < 2p/(2-p)"),
        ("[scenario]\np = 2.5\nmethods = esssup\n", "line 1", "p must lie"),
        ("[scenario]\nid = a\n", "line 1", "empty methods"),
        ("id = a\n", "line 1", "outside"),
        ("[domain]\n", "line 1", "unknown section"),
        ("[scenario]\nid = a\nmethods = esssup\n[scenario]\nid = a\nmethods = esssup\n", "line 4", "already used"),
        ("[scenario]\nmethods = esssup\nmethods = lp_kq\n", "line 3", "duplicate"),
        ("[scenario]\nmethods = esssup\nmap = moebius\nmap.a = 0.95\n", "line 3", ""),
    ];
    for (i, (text, line, msg)) in cases.iter().enumerate() {
        let cfg = write(&dir, &format!("c{i}.conf"), text);
        let o = densbound(&["bound"], &cfg);
        let err = stderr(&o);
        assert_eq!(o.status.code(), Some(2), "case {i}: {err}");
        assert!(err.contains(line) && err.contains(msg), "case {i}: {err}");
    }
    let missing = dir.path().join("missing.conf");
    assert_eq!(densbound(&["bound"], &missing).status.code(), Some(2));
    let cfg = write(&dir, "ok.conf", DISK);
    assert_eq!(densbound(&["bound", "--jobs", "x"], &cfg).status.code(), Some(2));
    assert_eq!(densbound(&["bound", "--tol", "-1"], &cfg).status.code(), Some(2));
    assert_eq!(densbound(&["bound", "--fem-level", "1"], &cfg).status.code(), Some(2));
}

#[test]
fn numeric_failures_are_row_flags() {
    let dir = TempDir::new().unwrap();
    // the off-centre Gaussian peak is not resolved by the sweep rule
    let text = "[scenario]\nmap = moebius\nmap.a = 0.3,0.2\nmethods = esssup, gaussian_sweep\n";
    let cfg = write(&dir, "m.conf", text);
    let o = densbound(&["bound"], &cfg);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = records(&stdout(&o));
    let failed = rows.iter().find(|r| &r[column(&h, "method")] == "gaussian_sweep").unwrap();
    assert_eq!(&failed[column(&h, "flags")], "Error");
    assert!(!failed[column(&h, "error")].is_empty());
}
