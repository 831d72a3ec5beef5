use std::process::{Command, Output};

fn gasurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gasurf")).args(args).output().expect("spawn gasurf")
}

fn ok_csv(args: &[&str]) -> Vec<Vec<String>> {
    let out = gasurf(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let idx = rows[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[idx].parse().unwrap()).collect()
}

#[test]
fn tangent_cylinder_balanced_converges() {
    let rows = ok_csv(&["tangent", "--surface", "cylinder(rho=1)", "--schwarz", "n=m", "--m", "4:256"]);
    assert_eq!(rows.len(), 8);
    let e = column(&rows, "balanced_error");
    assert!(*e.last().unwrap() <= 1e-3);
    let expect = std::f64::consts::PI.powi(2) / (6.0 * 256.0 * 256.0);
    assert!((e.last().unwrap() - expect).abs() < 1e-3 * expect);
}

#[test]
fn tangent_flat_is_exact() {
    for regime in ["n=m", "n=m^2", "n=m^3"] {
        let rows = ok_csv(&["tangent", "--surface", "flat", "--schwarz", regime, "--m", "4:64"]);
        assert!(column(&rows, "balanced_error").iter().all(|e| *e <= 1e-12));
    }
}

#[test]
fn tangent_naive_cube_regime_grows_linearly() {
    let rows = ok_csv(&["tangent", "--schwarz", "n=m^3", "--m", "16:256"]);
    let c = column(&rows, "naive_e12");
    for w in c.windows(2) {
        assert!((w[1] / w[0] - 2.0).abs() < 0.02);
    }
}

#[test]
fn tangent_shrink_family_on_graph() {
    let rows = ok_csv(&["tangent", "--surface", "graph(sin(u)*v)", "--family", "shrink", "--at", "0.3,0.2"]);
    let e = column(&rows, "balanced_error");
    assert!(e.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn area_cylinder_quarter() {
    let rows = ok_csv(&["area", "--rect", "0,0,1.5707963267948966,1", "--levels", "6"]);
    assert_eq!(rows.len(), 8);
    let e = column(&rows, "balanced_error");
    assert!(e.windows(2).all(|w| w[1] < w[0]));
    assert!(*e.last().unwrap() <= 1e-3);
    let oracle = column(&rows, "oracle");
    assert!((oracle[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn area_lantern_separates_estimators() {
    let rows = ok_csv(&["area", "--lantern", "m=16,n=4096"]);
    let reference = 2.0 * std::f64::consts::PI;
    let naive = column(&rows, "naive")[0];
    let bal = column(&rows, "balanced")[0];
    assert!(naive >= 2.0 * reference);
    assert!((bal - reference).abs() <= 0.01 * reference);
}

#[test]
fn area_flat_is_exact() {
    let rows = ok_csv(&["area", "--surface", "flat", "--polygon", "0,0;2,0;2,1;1,2;0,1", "--levels", "2"]);
    for name in ["balanced_error", "naive_error"] {
        assert!(column(&rows, name).iter().all(|e| *e <= 1e-12));
    }
}

#[test]
fn area_writes_partition_and_out_file() {
    let dir = std::env::temp_dir().join(format!("gasurf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (csv, part) = (dir.join("area.csv"), dir.join("part.csv"));
    let out = gasurf(&[
        "area",
        "--rect",
        "0,0,1,1",
        "--levels",
        "1",
        "--out",
        csv.to_str().unwrap(),
        "--partition-out",
        part.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 3);
    let p = std::fs::read_to_string(&part).unwrap();
    assert!(p.starts_with("tri_id,ax,ay,bx,by,cx,cy\n"));
    assert_eq!(p.lines().count(), 9);

    let v = gasurf(&["validate", "--rect", "0,0,1,1", "--partition", part.to_str().unwrap()]);
    assert!(v.status.success());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn jacobian_examples() {
    let rows = ok_csv(&["jacobian", "--transform", "custom(2*u + v, u - 3*v)", "--at", "0.4,-0.2"]);
    assert!(column(&rows, "abs_error").iter().all(|e| *e <= 1e-12));
    assert!(rows[1..].iter().all(|r| r.last().unwrap() == "exact"));

    let rows = ok_csv(&["jacobian", "--transform", "custom(u*u, v)", "--at", "1,0"]);
    let est = column(&rows, "det");
    assert!((est.last().unwrap() - 2.0).abs() < 2e-3);
    let order = column(&rows, "observed_order")[0];
    assert!((order - 1.0).abs() < 0.05);
}

#[test]
fn validate_reports() {
    let rows = ok_csv(&["validate", "--polygon", "0,0;1,0;1,1;0,1", "--levels", "2"]);
    assert_eq!(rows[0], ["check", "passed", "detail"]);
    assert!(rows[1..].iter().all(|r| r[1] == "true"));
    let rows = ok_csv(&["validate", "--lantern", "m=6,n=5,h=2"]);
    assert!(rows[1..].iter().all(|r| r[1] == "true"));
}

#[test]
fn validate_rejects_overlap() {
    let dir = std::env::temp_dir().join(format!("gasurf-overlap-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.csv");
    std::fs::write(&path, "tri_id,ax,ay,bx,by,cx,cy\n0,0,0,1,0,0,1\n1,0,0,1,0,0,1\n").unwrap();
    let out = gasurf(&["validate", "--rect", "0,0,1,1", "--partition", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("non_overlapping,false"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    for args in [
        &["tangent", "--surface", "sphere(r=1)"][..],
        &["tangent", "--schwarz", "n=m^5"],
        &["tangent", "--m", "0:4"],
        &["area"],
        &["area", "--rect", "0,0,1"],
        &["area", "--polygon", "0,0;1,1;1,0;0,1"],
        &["jacobian", "--transform", "custom(u+,v)"],
        &["tangent", "--unknown-flag"],
        &["--threads", "0", "schwarz-demo"],
    ] {
        assert_eq!(gasurf(args).status.code(), Some(2), "{args:?}");
    }
    // log(u) is undefined on part of the rectangle
    let out = gasurf(&["area", "--surface", "graph(log(u))", "--rect", "-1,0.5,1,1", "--levels", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn demo_is_long_format() {
    let rows = ok_csv(&["schwarz-demo"]);
    assert_eq!(rows[0], ["experiment", "m", "n", "quantity", "value"]);
    assert!(rows[1..].iter().all(|r| r.len() == 5));
    for exp in ["tangent_n=m", "tangent_n=m^2", "tangent_n=m^3", "fourth_point", "lantern"] {
        assert!(rows.iter().any(|r| r[0] == exp), "{exp}");
    }
}
