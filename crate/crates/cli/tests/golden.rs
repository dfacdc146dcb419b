//! Reference datasets must regenerate byte for byte from the committed configs.
//! Set `HSCALER_BLESS=1` to rewrite the golden files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use sha2::{Digest, Sha256};

const PROTOCOL_CONFIGS: [&str; 7] = [
    "fig1_momentum_5",
    "fig1_momentum_2",
    "fig1_momentum_1_2",
    "fig1_momentum_1_5",
    "fig1_momentum_mirror",
    "fig1_position_minus_1_2",
    "fig1_position_minus_2",
];
const WIGNER_CONFIGS: [&str; 2] = ["fig2_momentum_1_5", "fig2_position_minus_1_2"];

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn bless() -> bool {
    std::env::var_os("HSCALER_BLESS").is_some()
}

fn run(command: &str, config: &str, out: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_hscaler"))
        .args([command, "--quiet", "--config"])
        .arg(repo().join("configs").join(format!("{config}.json")))
        .arg("--out")
        .arg(out)
        .status()
        .unwrap();
    assert!(status.success(), "{command} {config}: {status}");
}

fn files(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn manifest(root: &Path) -> String {
    files(root).iter().map(|(rel, bytes)| format!("{:x}  {rel}\n", Sha256::digest(bytes))).collect()
}

#[test]
fn protocol_curves_match_golden() {
    let tmp = tempfile::tempdir().unwrap();
    for name in PROTOCOL_CONFIGS {
        let out = tmp.path().join(name);
        run("design", name, &out);
        for file in ["protocol.csv", "protocol.csv.meta.json"] {
            let got = std::fs::read(out.join(file)).unwrap();
            let path = golden().join(name).join(file);
            if bless() {
                std::fs::create_dir_all(path.parent().unwrap()).unwrap();
                std::fs::write(&path, &got).unwrap();
            }
            let want = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert!(got == want, "{name}/{file} differs from golden");
        }
    }
}

#[test]
fn wigner_snapshots_match_golden_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    for name in WIGNER_CONFIGS {
        let out = tmp.path().join(name);
        run("wigner", name, &out);
        let got = manifest(&out);
        assert_eq!(got.lines().count(), 2 * 13 + 1, "13 grids with sidecars plus a summary");
        let path = golden().join(format!("{name}.sha256"));
        if bless() {
            std::fs::write(&path, &got).unwrap();
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(got, want, "{name} manifest differs from golden");
    }
}

#[test]
fn seeded_ensemble_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run("csim", "csim_mirror", &a);
    run("csim", "csim_mirror", &b);
    let (fa, fb) = (files(&a), files(&b));
    assert!(fa.contains_key("csim_moments.csv"));
    assert_eq!(fa, fb);
}
