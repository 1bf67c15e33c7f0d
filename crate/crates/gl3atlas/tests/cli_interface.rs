//! The command-line surface: exit codes, file formats, cache behavior.
//! Everything runs in-process through `cli::run`; heavy levels are avoided
//! so this target stays fast.

use gl3atlas::cli::{cache, fixtures, run, EXIT_FAILURE, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE};
use gl3atlas::hecke::{shared_hecke, Convention, HeckeKind};

fn run_cmd(words: &[&str]) -> i32 {
    let argv: Vec<String> = words.iter().map(|s| s.to_string()).collect();
    run(&argv)
}

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("gl3atlas-cli-{}-{}", tag, std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn exit_codes_for_usage_errors() {
    assert_eq!(run_cmd(&[]), EXIT_USAGE);
    assert_eq!(run_cmd(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(run_cmd(&["dim"]), EXIT_USAGE);
    assert_eq!(run_cmd(&["hecke", "--level", "11"]), EXIT_USAGE);
    assert_eq!(run_cmd(&["count", "--a", "2", "--prime", "9"]), EXIT_USAGE);
    assert_eq!(run_cmd(&["help"]), EXIT_OK);
}

#[test]
fn dim_and_hecke_drive() {
    assert_eq!(run_cmd(&["dim", "--level", "1"]), EXIT_OK);
    assert_eq!(run_cmd(&["dim", "--level", "11", "--json"]), EXIT_OK);
    assert_eq!(run_cmd(&["hecke", "--level", "11", "--prime", "3"]), EXIT_OK);
    assert_eq!(run_cmd(&["spectrum", "--level", "11", "--prime", "2", "--json"]), EXIT_OK);
    // a prime dividing the level is a computational failure, not a crash
    assert_eq!(run_cmd(&["hecke", "--level", "35", "--prime", "5"]), EXIT_FAILURE);
}

#[test]
fn count_fit_and_hodge_drive() {
    assert_eq!(run_cmd(&["count", "--a", "2", "--prime", "3"]), EXIT_OK);
    assert_eq!(run_cmd(&["count", "--a", "2", "--prime", "3", "--twist", "7"]), EXIT_USAGE);
    assert_eq!(run_cmd(&["fit", "--a", "2", "--prime", "3"]), EXIT_OK);
    // degenerate reduction reported as failure
    assert_eq!(run_cmd(&["count", "--a", "1/16", "--prime", "5"]), EXIT_FAILURE);
    assert_eq!(run_cmd(&["hodge-check", "--samples", "60", "--seed", "3"]), EXIT_OK);
}

#[test]
fn lift_drive_level_35() {
    assert_eq!(run_cmd(&["lift", "--level", "35", "--pmax", "3"]), EXIT_OK);
}

#[test]
fn cache_is_used_and_survives_roundtrip() {
    let dir = temp_dir("cache");
    let dirs = dir.to_str().unwrap();
    assert_eq!(
        run_cmd(&["hecke", "--level", "11", "--prime", "2", "--cache", dirs]),
        EXIT_OK
    );
    let path = cache::cache_path(&dir, 11, 2, "E", "std");
    assert!(path.exists(), "cache file written");
    // reading back gives the installed matrix
    let entry = cache::read_entry(&dir, 11, 2, "E", "std").unwrap();
    let decoded = cache::decode_hecke(&entry).unwrap();
    let fresh = shared_hecke(11, 2, HeckeKind::E, Convention::Standard).unwrap();
    assert_eq!(decoded.mat, fresh.mat);
    // a second drive through the cache path also succeeds
    assert_eq!(
        run_cmd(&["hecke", "--level", "11", "--prime", "2", "--cache", dirs]),
        EXIT_OK
    );
    // corrupt the payload: the file is rejected and the command recomputes
    let text = std::fs::read_to_string(&path).unwrap();
    let broken = text.replacen("den", "dex", 1);
    std::fs::write(&path, broken).unwrap();
    assert!(matches!(
        cache::read_entry(&dir, 11, 2, "E", "std"),
        Err(cache::CacheError::Format(_)) | Err(cache::CacheError::Corrupted)
    ));
    assert_eq!(
        run_cmd(&["hecke", "--level", "11", "--prime", "2", "--cache", dirs]),
        EXIT_OK
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn fixture_file_errors_map_to_exit_codes() {
    let dir = temp_dir("fixtures");
    // schema violation: usage error
    let bad_schema = dir.join("bad_schema.json");
    std::fs::write(&bad_schema, "{\"schema\": 7}").unwrap();
    assert_eq!(
        run_cmd(&["check-table", "--level", "128", "--fixtures", bad_schema.to_str().unwrap()]),
        EXIT_USAGE
    );
    // integrity violation: computational failure
    let bad_data = dir.join("bad_data.json");
    std::fs::write(
        &bad_data,
        r#"{"schema":1,"level":128,"field":"Q(i)","bad":[2],"ap":{"3":[999,0]}}"#,
    )
    .unwrap();
    assert_eq!(
        run_cmd(&["check-table", "--level", "128", "--fixtures", bad_data.to_str().unwrap()]),
        EXIT_FAILURE
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn corrupted_fixture_detected_as_mismatch() {
    // a wrong (but Weil-legal) trace at level 35 drives the mismatch exit:
    // level 35 keeps this test cheap, and the eigenvalue check is exact
    let dir = temp_dir("mismatch");
    let path = dir.join("corrupt35.json");
    std::fs::write(
        &path,
        r#"{"schema":1,"level":35,"field":"Q","bad":[5,7],"ap":{"3":[2,0]}}"#,
    )
    .unwrap();
    // eigenvalues of E_3 at level 35 are lifts of integral weight-2 traces;
    // the value 2 = 3*a+1 would need a = 1/3, so it cannot appear
    assert_eq!(
        run_cmd(&["check-table", "--level", "35", "--fixtures", path.to_str().unwrap(), "--pmax", "3"]),
        EXIT_MISMATCH
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn compare_drive_small_prime() {
    // full compare at level 128 restricted to p <= 3 stays quick
    assert_eq!(run_cmd(&["compare", "--level", "128", "--pmax", "3"]), EXIT_OK);
}

#[test]
fn fixture_loading_from_disk_matches_builtin() {
    let dir = temp_dir("roundtrip");
    let path = dir.join("levels.json");
    std::fs::write(&path, include_str!("../fixtures/levels.json")).unwrap();
    let from_disk = fixtures::load_fixtures(path.to_str().unwrap()).unwrap();
    let builtin = fixtures::builtin_fixtures();
    assert_eq!(from_disk.len(), builtin.len());
    for (a, b) in from_disk.iter().zip(&builtin) {
        assert_eq!(a.level, b.level);
        assert_eq!(a.ap, b.ap);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn threads_flag_is_deterministic() {
    // same dimension regardless of the worker cap
    assert_eq!(run_cmd(&["dim", "--level", "12", "--threads", "1"]), EXIT_OK);
    let d1 = gl3atlas::homology::dimension(12);
    gl3atlas::set_max_threads(4);
    // the registry caches; force a fresh small level for the comparison
    let d2 = gl3atlas::homology::dimension(13);
    gl3atlas::set_max_threads(1);
    let sys = gl3atlas::homology::relation_system(13);
    let d2_single = gl3atlas::homology::kernel_basis(&sys).unwrap().dim();
    assert_eq!(d2, d2_single);
    gl3atlas::set_max_threads(0);
    let _ = d1;
}
