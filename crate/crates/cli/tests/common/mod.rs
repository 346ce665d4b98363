//! Fixture runs written to disk for driving the `dsi` binary.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn dsi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsi"))
        .args(args)
        .env_remove("DSI_WORDNET_DIR")
        .output()
        .expect("spawn dsi")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Taxonomy with one root, two family nodes and `n` leaves `leaf<k>`; the
/// first half of the leaves hang under `fam_a`, the rest under `fam_b`.
pub fn two_family_taxonomy_json(n: usize) -> String {
    let mut entries = vec![
        r#""root": []"#.to_string(),
        r#""fam_a": ["root"]"#.to_string(),
        r#""fam_b": ["root"]"#.to_string(),
    ];
    for k in 0..n {
        let fam = if k < n / 2 { "fam_a" } else { "fam_b" };
        entries.push(format!(r#""leaf{k}": ["{fam}"]"#));
    }
    format!("{{{}}}\n", entries.join(",\n"))
}

pub fn matrix_csv(rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:e}")).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

pub struct ToyRun {
    pub manifest: PathBuf,
    pub taxonomy: PathBuf,
}

pub struct ToyOptions<'a> {
    pub classes: usize,
    pub dim: usize,
    pub epochs: &'a [u64],
    pub templates: bool,
    pub synsets: bool,
    pub seed: u64,
}

impl Default for ToyOptions<'_> {
    fn default() -> Self {
        Self {
            classes: 6,
            dim: 5,
            epochs: &[0, 1],
            templates: true,
            synsets: true,
            seed: 7,
        }
    }
}

/// Random weights, templates and diagonal-heavy confusion counts per epoch,
/// plus the matching two-family taxonomy.
pub fn write_toy_run(dir: &Path, opts: &ToyOptions) -> ToyRun {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.classes;
    let taxonomy = dir.join("taxonomy.json");
    fs::write(&taxonomy, two_family_taxonomy_json(n)).unwrap();

    let classes: Vec<String> = (0..n)
        .map(|k| {
            if opts.synsets || k != 1 {
                format!(r#"{{"index": {k}, "name": "class{k}", "synset_id": "leaf{k}"}}"#)
            } else {
                format!(r#"{{"index": {k}, "name": "class{k}"}}"#)
            }
        })
        .collect();
    let mut epochs = Vec::new();
    for &e in opts.epochs {
        let sub = dir.join(format!("e{e}"));
        fs::create_dir_all(&sub).unwrap();
        let weights: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..opts.dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let confusion: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            rng.gen_range(5..15) as f64
                        } else {
                            rng.gen_range(0..4) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        fs::write(sub.join("w.csv"), matrix_csv(&weights)).unwrap();
        fs::write(sub.join("cm.csv"), matrix_csv(&confusion)).unwrap();
        let templates = if opts.templates {
            let t: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..opts.dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            fs::write(sub.join("t.csv"), matrix_csv(&t)).unwrap();
            format!(r#""e{e}/t.csv""#)
        } else {
            "null".to_string()
        };
        epochs.push(format!(
            r#"{{"epoch": {e}, "weights": "e{e}/w.csv", "confusion": "e{e}/cm.csv", "templates": {templates}}}"#
        ));
    }
    let manifest = dir.join("manifest.json");
    fs::write(
        &manifest,
        format!(
            "{{\"run_id\": \"toy\",\n \"classes\": [{}],\n \"epochs\": [{}]}}\n",
            classes.join(",\n  "),
            epochs.join(",\n  ")
        ),
    )
    .unwrap();
    ToyRun { manifest, taxonomy }
}

/// Relative path → SHA-256 of every file under `root`, sorted by path.
pub fn tree_digest(root: &Path) -> Vec<(String, String)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(String, String)>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                let digest = Sha256::digest(fs::read(&path).unwrap());
                let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
                out.push((rel, hex));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort();
    out
}

pub fn relative_files(root: &Path) -> Vec<String> {
    tree_digest(root).into_iter().map(|(p, _)| p).collect()
}
