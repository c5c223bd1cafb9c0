use std::net::UdpSocket;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

fn abekit(home: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abekit"))
        .args(args)
        .env("ABE_HOME", home)
        .output()
        .expect("spawn abekit")
}

fn ok(home: &Path, args: &[&str]) -> String {
    let out = abekit(home, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fails(home: &Path, args: &[&str], code: i32, class: &str) {
    let out = abekit(home, args);
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {err}");
    assert_eq!(err.lines().count(), 1, "one-line error expected: {err}");
    assert!(err.starts_with(&format!("error[{class}]: ")), "{err}");
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn cp_round_trip_and_refusal() {
    let t = TempDir::new().unwrap();
    let home = t.path().join("keys");
    let payload: Vec<u8> = (0..5000u32).map(|i| (i * 7 % 251) as u8).collect();
    std::fs::write(t.path().join("plain"), &payload).unwrap();

    ok(&home, &["setup", "--scheme", "cp", "--level", "80", "--seed", "7"]);
    assert!(home.join("cp80.pub").exists() && home.join("cp80.msk").exists());
    fails(&home, &["setup", "--scheme", "cp", "--level", "80"], 1, "Key");

    ok(&home, &["keygen", "--attrs", "Doctor, Cardiology, Age=42", "--out", &p(&t, "doc.key")]);
    ok(&home, &["keygen", "--attrs", "Nurse", "--out", &p(&t, "nurse.key")]);
    ok(&home, &["encrypt", "--policy", "Doctor and (Cardiology or Age >= 65)", "--in", &p(&t, "plain"), "--out", &p(&t, "ct")]);
    ok(&home, &["decrypt", "--key", &p(&t, "doc.key"), "--in", &p(&t, "ct"), "--out", &p(&t, "back")]);
    assert_eq!(std::fs::read(t.path().join("back")).unwrap(), payload);

    fails(&home, &["decrypt", "--key", &p(&t, "nurse.key"), "--in", &p(&t, "ct"), "--out", &p(&t, "nope")], 1, "PolicyNotSatisfied");
    assert!(!t.path().join("nope").exists());

    let mut ct = std::fs::read(t.path().join("ct")).unwrap();
    let last = ct.len() - 1;
    ct[last] ^= 1;
    std::fs::write(t.path().join("ct.bad"), &ct).unwrap();
    fails(&home, &["decrypt", "--key", &p(&t, "doc.key"), "--in", &p(&t, "ct.bad"), "--out", &p(&t, "nope")], 1, "AuthenticationFailure");
    assert!(!t.path().join("nope").exists());
}

#[test]
fn kp_round_trip_registers_policy_leaves() {
    let t = TempDir::new().unwrap();
    let home = t.path().join("keys");
    std::fs::write(t.path().join("plain"), b"ward 3 vitals").unwrap();

    ok(&home, &["setup", "--scheme", "kp", "--level", "112", "--attrs", "Dev_type=Sensor"]);
    ok(
        &home,
        &["keygen", "--scheme", "kp", "--level", "112", "--policy", "Dev_type=Sensor and Location=Ward_3", "--out", &p(&t, "k")],
    );
    ok(
        &home,
        &[
            "encrypt", "--scheme", "kp", "--level", "112", "--attrs", "Dev_type=Sensor, Location=Ward_3", "--in",
            &p(&t, "plain"), "--out", &p(&t, "ct"),
        ],
    );
    ok(&home, &["decrypt", "--key", &p(&t, "k"), "--in", &p(&t, "ct"), "--out", &p(&t, "back")]);
    assert_eq!(std::fs::read(t.path().join("back")).unwrap(), b"ward 3 vitals");

    ok(
        &home,
        &["encrypt", "--scheme", "kp", "--level", "112", "--attrs", "Dev_type=Sensor", "--in", &p(&t, "plain"), "--out", &p(&t, "ct2")],
    );
    fails(&home, &["decrypt", "--key", &p(&t, "k"), "--in", &p(&t, "ct2"), "--out", &p(&t, "x")], 1, "PolicyNotSatisfied");
    fails(
        &home,
        &["encrypt", "--scheme", "kp", "--level", "112", "--attrs", "Unseen", "--in", &p(&t, "plain"), "--out", &p(&t, "x")],
        1,
        "UnknownAttribute",
    );
}

#[test]
fn seed_makes_output_reproducible() {
    let t = TempDir::new().unwrap();
    let run = |name: &str| {
        let home = t.path().join(name);
        ok(&home, &["setup", "--seed", "11"]);
        ok(&home, &["keygen", "--attrs", "A, B", "--seed", "12", "--out", &p(&t, &format!("{name}.key"))]);
        std::fs::write(t.path().join("plain"), b"x").unwrap();
        ok(&home, &["encrypt", "--policy", "A and B", "--seed", "13", "--in", &p(&t, "plain"), "--out", &p(&t, &format!("{name}.ct"))]);
        (std::fs::read(home.join("cp80.pub")).unwrap(), std::fs::read(t.path().join(format!("{name}.ct"))).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn explain_reports_tree_shape() {
    let t = TempDir::new().unwrap();
    let out = ok(t.path(), &["policy", "--explain", "A < 32768"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("A < 32768"));
    let stats = lines.next().unwrap();
    assert!(stats.starts_with("3 leaves, 1 AND gate,"), "{stats}");

    let out = ok(t.path(), &["policy", "doctor AND (a OR b)", "--attrs", "doctor, b"]);
    assert!(out.starts_with("(doctor and (a or b))"), "{out}");
    fails(t.path(), &["policy", "doctor and a", "--attrs", "doctor"], 1, "PolicyNotSatisfied");
}

#[test]
fn usage_errors_exit_2_without_touching_keys() {
    let t = TempDir::new().unwrap();
    let home = t.path().join("keys");
    fails(&home, &["encrypt", "--bogus"], 2, "Usage");
    fails(&home, &["setup", "--level", "96"], 2, "Usage");
    fails(&home, &["keygen", "--out", "k"], 2, "Usage");
    fails(&home, &["keygen", "--attrs", "A", "--policy", "A", "--out", "k"], 2, "Usage");
    fails(&home, &["bench", "--attrs", "0..3"], 2, "Usage");
    fails(&home, &["encrypt", "--policy", "A and", "--in", "x", "--out", "y"], 1, "Policy");
    assert!(!home.exists());
    // valid request, missing keys
    std::fs::write(t.path().join("plain"), b"x").unwrap();
    fails(&home, &["encrypt", "--policy", "A", "--in", &p(&t, "plain"), "--out", &p(&t, "ct")], 1, "Key");
}

#[test]
fn bench_writes_csv() {
    let t = TempDir::new().unwrap();
    let csv = p(&t, "out.csv");
    let out = ok(t.path(), &["bench", "--scheme", "cp,kp", "--levels", "80", "--attrs", "1..2", "--trials", "3", "--csv", &csv, "--plots"]);
    assert!(out.contains("wrote"), "{out}");
    let body = std::fs::read_to_string(&csv).unwrap();
    // 2 schemes x 2 ops x 2 counts x 3 trials
    assert_eq!(body.lines().count(), 1 + 24);
    assert!(body.starts_with("scheme,op,level,n_attrs,trial,"));
}

#[test]
fn sim_send_to_sim_collect() {
    let t = TempDir::new().unwrap();
    let home = t.path().join("keys");
    ok(&home, &["setup"]);
    ok(&home, &["keygen", "--attrs", "Doctor, Cardiology, Hospital_A, ICU, Shift_Day", "--out", &p(&t, "icu.key")]);
    let port = UdpSocket::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let addr = format!("127.0.0.1:{port}");
    let collect_csv = p(&t, "collect.csv");
    let collector = Command::new(env!("CARGO_BIN_EXE_abekit"))
        .args(["sim-collect", "--bind", &addr, "--key", &p(&t, "icu.key"), "--duration", "4", "--csv", &collect_csv])
        .env("ABE_HOME", &home)
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    std::thread::sleep(std::time::Duration::from_millis(300));
    let send_csv = p(&t, "send.csv");
    let sent = ok(
        &home,
        &["sim-send", "--server", &addr, "--duration", "2", "--verify", "--dir", &p(&t, "spool"), "--csv", &send_csv],
    );
    // three streams per cycle plus the body-temperature sample at t = 0
    assert!(sent.contains("sent 7 "), "{sent}");
    let out = collector.wait_with_output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("delivered 7, verified 7,"), "{report}");
    assert_eq!(std::fs::read_to_string(&collect_csv).unwrap().lines().count(), 8);
    assert_eq!(std::fs::read_dir(t.path().join("spool")).unwrap().count(), 0);
}
