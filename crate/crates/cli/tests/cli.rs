use std::path::Path;
use std::process::{Command, Output};

use chopstick_core::MechanismParams;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chopstick"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn z0() -> String {
    MechanismParams::<f64>::default().zero_pose_z().to_string()
}

#[test]
fn ik_at_zero_pose() {
    let o = run(&["ik", "--x", "0", "--y", "0", "--z", &z0()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    for key in ["pitch_deg", "yaw_deg", "travel_mm"] {
        assert!(v[key].as_f64().unwrap().abs() < 1e-9, "{key}: {v}");
    }
}

#[test]
fn ik_out_of_reach() {
    let o = run(&["ik", "--x", "200", "--y", "0", "--z", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("out of reach"));

    let o = run(&["--json-errors", "ik", "--x", "200", "--y", "0", "--z", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"], "out_of_reach");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["ik", "--x", "0"]).status.code(), Some(2));
    assert_eq!(
        run(&["ik", "--x", "0", "--y", "0", "--z", "1", "--bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["teleport"]).status.code(), Some(2));
    assert_eq!(
        run(&["ik", "--x", "abc", "--y", "0", "--z", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn fk_inverts_ik() {
    let z = (MechanismParams::<f64>::default().zero_pose_z() + 12.0).to_string();
    let ik = json(&run(&["ik", "--x", "-7.5", "--y", "11", "--z", &z]));
    let f = |k: &str| ik[k].as_f64().unwrap().to_string();
    let o = run(&[
        "fk",
        "--pitch",
        &f("pitch_deg"),
        "--yaw",
        &f("yaw_deg"),
        "--travel",
        &f("travel_mm"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let pose = json(&o);
    let got = [
        pose["x"].as_f64().unwrap(),
        pose["y"].as_f64().unwrap(),
        pose["z"].as_f64().unwrap(),
    ];
    let want = [-7.5, 11.0, z.parse::<f64>().unwrap()];
    for i in 0..3 {
        assert!((got[i] - want[i]).abs() < 1e-6, "{got:?}");
    }
    assert_eq!(
        run(&["fk", "--pitch", "500", "--yaw", "0", "--travel", "0"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn workspace_hull_validate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (s, pairs, mesh) = (
        p(dir.path(), "s.csv"),
        p(dir.path(), "p.csv"),
        p(dir.path(), "m.obj"),
    );
    let o = run(&[
        "workspace",
        "--n",
        "1000",
        "--seed",
        "7",
        "--out",
        &s,
        "--pairs",
        &pairs,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&s).unwrap();
    assert!(text.starts_with("x,y,z,reachable,failure\n"));
    assert_eq!(text.lines().count(), 1001);

    let o = run(&["hull", "--input", &s, "--out", &mesh]);
    assert_eq!(o.status.code(), Some(0));
    let h = json(&o);
    assert!(h["volume_mm3"].as_f64().unwrap() > 0.0);
    let m = chopstick_core::workspace::read_mesh(std::io::BufReader::new(
        std::fs::File::open(&mesh).unwrap(),
    ))
    .unwrap();
    assert_eq!(m.faces.len() as u64, h["faces"].as_u64().unwrap());

    let o = run(&["validate", "--input", &pairs, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert!(r["slope"].as_f64().unwrap() > 0.0, "{r}");
    assert_eq!(r["n"].as_u64().unwrap(), h["points"].as_u64().unwrap());

    let o = run(&["validate", "--input", &pairs]);
    assert!(stdout(&o).contains("reference (hardware)"));
    let o = run(&["validate", "--input", &pairs, "--format", "csv"]);
    assert!(stdout(&o)
        .lines()
        .last()
        .unwrap()
        .starts_with("reference,,2.93,"));
}

#[test]
fn identical_argv_identical_bytes() {
    let cases: Vec<Vec<String>> = vec![
        vec!["workspace".into(), "--n".into(), "300".into()],
        vec![
            "workspace".into(),
            "--n".into(),
            "300".into(),
            "--seed".into(),
            "9".into(),
        ],
        vec![
            "ft-sim".into(),
            "--material".into(),
            "A-83".into(),
            "--cycles".into(),
            "2".into(),
        ],
        vec!["grasp-sim".into(), "--format".into(), "json".into()],
        vec![
            "bus-demo".into(),
            "--x".into(),
            "2".into(),
            "--y".into(),
            "-1".into(),
            "--z".into(),
            z0(),
        ],
    ];
    for args in cases {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let (x, y) = (run(&a), run(&a));
        assert_eq!(x.status.code(), Some(0), "{a:?}");
        assert!(!x.stdout.is_empty());
        assert_eq!(x.stdout, y.stdout, "{a:?}");
    }
    // the default seed is 0
    let implicit = run(&["workspace", "--n", "50"]);
    let explicit = run(&["workspace", "--n", "50", "--seed", "0"]);
    assert_eq!(implicit.stdout, explicit.stdout);
    assert_ne!(
        implicit.stdout,
        run(&["workspace", "--n", "50", "--seed", "1"]).stdout
    );
}

#[test]
fn hull_to_stdout_and_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let s = p(dir.path(), "s.csv");
    run(&["workspace", "--n", "200", "--out", &s]);
    let o = run(&["hull", "--input", &s]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("# convex hull:"));

    let missing = p(dir.path(), "nope.csv");
    let o = run(&["--json-errors", "hull", "--input", &missing]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"], "io");

    let flat = p(dir.path(), "flat.csv");
    std::fs::write(
        &flat,
        "x,y,z,reachable,failure\n0,0,170,1,\n1,0,170,1,\n0,1,170,1,\n1,1,170,1,\n",
    )
    .unwrap();
    let o = run(&["--json-errors", "hull", "--input", &flat]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"], "degenerate_hull");

    let bad = p(dir.path(), "bad.csv");
    std::fs::write(&bad, "cx,cy,cz,ox,oy\n1,2,3,4,5\n").unwrap();
    assert_eq!(run(&["validate", "--input", &bad]).status.code(), Some(1));
    assert_eq!(run(&["workspace", "--n", "0"]).status.code(), Some(1));
}

#[test]
fn ft_sim_then_stiffness() {
    let dir = tempfile::tempdir().unwrap();
    let mut ks = Vec::new();
    for m in ["00-40", "00-50", "A-95"] {
        let (s, c) = (
            p(dir.path(), &format!("{m}.csv")),
            p(dir.path(), &format!("{m}-c.csv")),
        );
        let o = run(&[
            "ft-sim",
            "--material",
            m,
            "--out",
            &s,
            "--closure-out",
            &c,
            "--seed",
            "4",
        ]);
        assert_eq!(o.status.code(), Some(0));
        let o = run(&["stiffness", "--input", &s, "--closure", &c]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        let v = json(&o);
        assert_eq!(v["events"].as_u64(), Some(8));
        ks.push(v["k_hat"].as_f64().unwrap());

        let per = json(&run(&[
            "stiffness",
            "--input",
            &s,
            "--closure",
            &c,
            "--per-event",
        ]));
        assert_eq!(per.as_array().unwrap().len(), 8);
    }
    assert!(ks.windows(2).all(|w| w[0] < w[1]), "{ks:?}");
    assert_eq!(
        run(&["ft-sim", "--material", "granite"]).status.code(),
        Some(1)
    );
}

#[test]
fn grasp_sim_reports_every_item() {
    let o = run(&["grasp-sim"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("name,mass_g,width_mm,grip_n,rot,lin,limiting_phase,margin_n,error\n"));
    assert_eq!(text.lines().count(), 13);
    let rows = json(&run(&["grasp-sim", "--format", "json"]));
    assert_eq!(rows.as_array().unwrap().len(), 12);
    assert_eq!(run(&["grasp-sim", "--accel", "0"]).status.code(), Some(1));
    // a firmer grip never loses a verdict
    let weak = json(&run(&["grasp-sim", "--format", "json", "--grip", "0.5"]));
    let strong = json(&run(&["grasp-sim", "--format", "json", "--grip", "4"]));
    for (w, s) in weak
        .as_array()
        .unwrap()
        .iter()
        .zip(strong.as_array().unwrap())
    {
        for k in ["rot", "lin"] {
            assert!(!w[k].as_bool().unwrap() || s[k].as_bool().unwrap());
        }
    }
}

#[test]
fn bus_demo_settles() {
    let o = run(&["bus-demo", "--x", "1", "--y", "2", "--z", &z0()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let frames = chopstick_core::bus::parse_hex_dump(&text).unwrap();
    assert_eq!(frames.len(), 15);
    assert!(text.contains("within_bound true"));

    let r = json(&run(&[
        "bus-demo",
        "--x",
        "1",
        "--y",
        "2",
        "--z",
        &z0(),
        "--json",
    ]));
    assert!(r["error_left"].as_f64().unwrap() <= r["bound"].as_f64().unwrap());
    assert_eq!(
        run(&["bus-demo", "--x", "200", "--y", "0", "--z", "0"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn config_file_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = p(dir.path(), "c.toml");
    std::fs::write(&cfg, "chopstick_length = 150.0\n").unwrap();
    let o = run(&["--config", &cfg, "ik", "--x", "0", "--y", "0", "--z", "150"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["travel_mm"].as_f64().unwrap().abs() < 1e-9);
    std::fs::write(&cfg, "wheel_count = 4\n").unwrap();
    let o = run(&[
        "--json-errors",
        "--config",
        &cfg,
        "ik",
        "--x",
        "0",
        "--y",
        "0",
        "--z",
        "150",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"], "config");
}
