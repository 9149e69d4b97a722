use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn combridge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combridge"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn combridge")
}

fn combridge_env(dir: &Path, args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combridge"))
        .args(args)
        .current_dir(dir)
        .env(key, value)
        .output()
        .expect("spawn combridge")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

/// G1 = {I1, I2, I3}, G2 = {I1, I2} over items I1..I5.
fn two_group_fixture(dir: &Path) {
    write(
        dir,
        "items.csv",
        "Item_PK,name\nI1,alpha\nI2,beta\nI3,gamma\nI4,delta\nI5,epsilon\n",
    );
    write(dir, "bridge.csv", "Group_PK,Item_PK\nG1,I1\nG1,I2\nG1,I3\nG2,I1\nG2,I2\n");
}

fn compress_fixture(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "compress", "--items", "items.csv", "--bridge", "bridge.csv", "--out-universe", "u.txt",
        "--out", "c.csv",
    ];
    args.extend_from_slice(extra);
    combridge(dir, &args)
}

#[test]
fn compress_two_groups_to_two_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    let out = compress_fixture(dir, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(read(dir, "c.csv"), "Group_PK,groupRank\nG1,1:3\nG2,1:2\n");
    assert_eq!(read(dir, "u.txt"), "n=5\nI1\nI2\nI3\nI4\nI5\n");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("classic_rows=5\n"));
    assert!(stdout.contains("compressed_rows=2\n"));
    assert!(stdout.contains("row_ratio=5/2\n"));
}

#[test]
fn direct_mode_writes_sidecar_and_verifies() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    let out = compress_fixture(dir, &["--mode", "direct", "--out-sidecar", "s.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(read(dir, "c.csv"), "groupRank\n1:2\n1:3\n");
    assert_eq!(read(dir, "s.csv"), "Group_PK,groupRank\nG1,1:3\nG2,1:2\n");
    let verify = combridge(
        dir,
        &[
            "verify", "--items", "items.csv", "--bridge", "bridge.csv", "--compressed", "c.csv",
            "--sidecar", "s.csv", "--universe", "u.txt",
        ],
    );
    assert_eq!(verify.status.code(), Some(0), "{}", stderr(&verify));
}

#[test]
fn empty_bridge_is_a_validation_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    write(dir, "bridge.csv", "Group_PK,Item_PK\n");
    let out = compress_fixture(dir, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("empty-universe or empty bridge"), "{}", stderr(&out));

    write(dir, "items.csv", "Item_PK,name\n");
    let out = compress_fixture(dir, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("empty universe"));
}

#[test]
fn ragged_csv_is_a_format_error_with_line() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    write(dir, "bridge.csv", "Group_PK,Item_PK\nG1,I1\nG1\n");
    let out = compress_fixture(dir, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bridge.csv:3:"), "{}", stderr(&out));

    let out = combridge(dir, &["verify", "--items", "missing.csv", "--bridge", "bridge.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn duplicate_bridge_row_key_violation() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    write(dir, "items.csv", "Item_PK,name\nI1,a\nI1,b\n");
    let out = compress_fixture(dir, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("items.csv:3:"), "{}", stderr(&out));
}

#[test]
fn unknown_items_strict_and_permissive() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    write(dir, "bridge.csv", "Group_PK,Item_PK\nG1,I1\nG1,I9\nG2,I2\n");
    let out = compress_fixture(dir, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown item I9"));
    let out = compress_fixture(dir, &["--permissive"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(read(dir, "c.csv"), "Group_PK,groupRank\nG1,1:1\nG2,2:1\n");
}

#[test]
fn expand_first_three_combination() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write(dir, "u.txt", "n=5\n10\n20\n30\n40\n50\n");
    write(dir, "c.csv", "groupRank\n1:3\n");
    let out = combridge(dir, &["expand", "--compressed", "c.csv", "--universe", "u.txt", "--out", "e.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(read(dir, "e.csv"), "groupRank,Item_PK\n1:3,10\n1:3,20\n1:3,30\n");

    write(dir, "c.csv", "");
    let out = combridge(dir, &["expand", "--compressed", "c.csv", "--universe", "u.txt", "--out", "e.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(read(dir, "e.csv"), "groupRank,Item_PK\n");

    write(dir, "c.csv", "groupRank\n11:2\n");
    let out = combridge(dir, &["expand", "--compressed", "c.csv", "--universe", "u.txt", "--out", "e.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("corrupt group key 11:2"));

    write(dir, "c.csv", "groupRank\n007:2\n");
    let out = combridge(dir, &["expand", "--compressed", "c.csv", "--universe", "u.txt", "--out", "e.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("c.csv:2:"), "{}", stderr(&out));
}

#[test]
fn join_two_groups_gives_five_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    assert_eq!(compress_fixture(dir, &[]).status.code(), Some(0));
    let out = combridge(
        dir,
        &["join", "--groups", "c.csv", "--items", "items.csv", "--universe", "u.txt", "--out", "j.csv"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        read(dir, "j.csv"),
        "Group_PK,groupRank,Item_PK,name\n\
         G1,1:3,I1,alpha\nG1,1:3,I2,beta\nG1,1:3,I3,gamma\n\
         G2,1:2,I1,alpha\nG2,1:2,I2,beta\n"
    );

    assert_eq!(
        compress_fixture(dir, &["--mode", "direct"]).status.code(),
        Some(0)
    );
    let out = combridge(
        dir,
        &[
            "join", "--groups", "c.csv", "--items", "items.csv", "--universe", "u.txt", "--mode",
            "direct", "--out", "j.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(read(dir, "j.csv").lines().count(), 6);
}

#[test]
fn join_rejects_name_collision() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    assert_eq!(compress_fixture(dir, &[]).status.code(), Some(0));
    write(dir, "g.csv", "Group_PK,groupRank,name\nG1,1:3,first\n");
    let out = combridge(
        dir,
        &["join", "--groups", "g.csv", "--items", "items.csv", "--universe", "u.txt", "--out", "j.csv"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("name collision: name"), "{}", stderr(&out));
}

#[test]
fn join_detects_stale_universe() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    assert_eq!(compress_fixture(dir, &[]).status.code(), Some(0));
    write(dir, "items2.csv", "Item_PK,name\nI0,zero\nI1,alpha\nI2,beta\nI3,gamma\nI4,delta\nI5,epsilon\n");
    let out = combridge(
        dir,
        &["join", "--groups", "c.csv", "--items", "items2.csv", "--universe", "u.txt", "--out", "j.csv"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("stale universe"));
}

#[test]
fn stats_from_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    assert_eq!(compress_fixture(dir, &[]).status.code(), Some(0));
    let out = combridge(dir, &["stats", "--bridge", "bridge.csv", "--compressed", "c.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for line in ["classic_rows=5", "compressed_rows=2", "avg_group_width=5/2", "row_ratio=5/2", "classic_bytes=40", "compressed_bytes=16"] {
        assert!(stdout.lines().any(|l| l == line), "missing {line} in\n{stdout}");
    }
}

#[test]
fn verify_fixture_and_corruption() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    let out = combridge(dir, &["verify", "--items", "items.csv", "--bridge", "bridge.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    assert_eq!(compress_fixture(dir, &[]).status.code(), Some(0));
    write(dir, "bad.csv", "Group_PK,groupRank\nG1,1:3\nG2,2:2\n");
    let out = combridge(
        dir,
        &["verify", "--items", "items.csv", "--bridge", "bridge.csv", "--compressed", "bad.csv"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("first divergence: group G2: expected items {I1, I2}, decoded {I1, I3}"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn universe_size_guard() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    let args = [
        "compress", "--items", "items.csv", "--bridge", "bridge.csv", "--out-universe", "u.txt",
        "--out", "c.csv",
    ];
    let out = combridge_env(dir, &args, "COMBRIDGE_MAX_N", "4");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("exceeds limit 4"));
    let out = combridge_env(dir, &args, "COMBRIDGE_MAX_N", "5");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn commands_are_idempotent_and_leave_inputs_alone() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    two_group_fixture(dir);
    let before = (read(dir, "items.csv"), read(dir, "bridge.csv"));
    assert_eq!(compress_fixture(dir, &[]).status.code(), Some(0));
    let first = (read(dir, "c.csv"), read(dir, "u.txt"));
    assert_eq!(compress_fixture(dir, &[]).status.code(), Some(0));
    assert_eq!((read(dir, "c.csv"), read(dir, "u.txt")), first);
    assert_eq!((read(dir, "items.csv"), read(dir, "bridge.csv")), before);
}

#[test]
fn random_fixtures_verify() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for round in 0..100 {
        let n = rng.gen_range(1..=20usize);
        let mut items = String::from("Item_PK,name\n");
        for j in 1..=n {
            items.push_str(&format!("{},n{j}\n", 500 + j * 11));
        }
        let mut bridge = String::from("Group_PK,Item_PK\n");
        for g in 1..=rng.gen_range(1..=15) {
            let k = rng.gen_range(1..=n);
            for j in sample(&mut rng, n, k) {
                bridge.push_str(&format!("{g},{}\n", 500 + (j + 1) * 11));
            }
        }
        write(dir, "items.csv", &items);
        write(dir, "bridge.csv", &bridge);
        let out = combridge(dir, &["verify", "--items", "items.csv", "--bridge", "bridge.csv"]);
        assert_eq!(out.status.code(), Some(0), "round {round}: {}", stderr(&out));
    }
}
