#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn ok(self) -> Run {
        assert_eq!(self.code, 0, "stdout:\n{}\nstderr:\n{}", self.stdout, self.stderr);
        self
    }
}

impl From<Output> for Run {
    fn from(o: Output) -> Self {
        Run {
            code: o.status.code().unwrap_or(-1),
            stdout: String::from_utf8_lossy(&o.stdout).into_owned(),
            stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
        }
    }
}

pub fn pdqubo(out: &Path, args: &[&str]) -> Run {
    Command::new(env!("CARGO_BIN_EXE_pdqubo"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("PDQUBO_OUT")
        .output()
        .expect("binary runs")
        .into()
}

pub fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

pub fn json(path: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_str(&read(path)).unwrap()
}

/// Distinct configuration keys among feasible records of a sample file.
pub fn feasible_configs(samples: &serde_json::Value) -> std::collections::BTreeSet<String> {
    samples["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["feasible"] == true)
        .filter_map(|r| r["config"].as_str().map(String::from))
        .collect()
}

/// Every regular file below `dir`, relative path to contents.
pub fn snapshot(dir: &Path) -> std::collections::BTreeMap<PathBuf, Vec<u8>> {
    let mut out = std::collections::BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_file() {
            out.insert(
                path.strip_prefix(dir).unwrap().to_path_buf(),
                std::fs::read(&path).unwrap(),
            );
        }
    }
    out
}
