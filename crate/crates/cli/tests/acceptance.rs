//! Pipeline-level check: the full command-line surface over the bundled
//! fixture is byte-deterministic. Prints one PASS/FAIL line, matching the
//! per-criterion reporting of the core suite.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;

fn criterion<F>(number: u32, description: &str, body: F)
where
    F: FnOnce() + UnwindSafe,
{
    let outcome = catch_unwind(body);
    println!(
        "{} criterion {number} — {description}",
        if outcome.is_ok() { "PASS" } else { "FAIL" },
    );
    if let Err(payload) = outcome {
        resume_unwind(payload);
    }
}

fn workspace_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn run_all(out_dir: &Path) {
    for cmd in ["sweep", "surface", "energy", "texel", "digitize"] {
        let output = Command::new(env!("CARGO_BIN_EXE_memgate"))
            .arg(cmd)
            .arg("--config")
            .arg(workspace_file("fixtures/paper.json"))
            .arg("--out")
            .arg(out_dir)
            .arg("--svg")
            .output()
            .expect("binary is runnable");
        assert!(
            output.status.success(),
            "{cmd} failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut map = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        assert!(
            entry.file_type().unwrap().is_file(),
            "commands write flat output trees"
        );
        let name = entry.file_name().into_string().unwrap();
        map.insert(name, std::fs::read(entry.path()).unwrap());
    }
    map
}

#[test]
fn criterion_10_pipeline_is_byte_deterministic() {
    criterion(
        10,
        "two consecutive full runs over the bundled fixture produce byte-identical output trees",
        || {
            let first = tempfile::tempdir().unwrap();
            let second = tempfile::tempdir().unwrap();
            run_all(first.path());
            run_all(second.path());
            let a = tree(first.path());
            let b = tree(second.path());
            assert!(!a.is_empty(), "the fixture run produced no files");
            let a_names: Vec<&String> = a.keys().collect();
            let b_names: Vec<&String> = b.keys().collect();
            assert_eq!(a_names, b_names, "the two runs wrote different file sets");
            for (name, bytes) in &a {
                assert_eq!(
                    bytes, &b[name],
                    "{name} differs between two identical runs"
                );
            }
        },
    );
}
