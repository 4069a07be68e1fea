//! Writing tables and their run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

/// Provenance record written beside every output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: &'static str,
    pub parameters: Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub threads: usize,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &'static str, parameters: Value, seed: Option<u64>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            parameters,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            threads: rayon::current_num_threads(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Writes `body` to `out` (or stdout) and the manifest to the sidecar (or
/// stderr).
pub fn emit(out: Option<&Path>, body: &str, manifest: &RunManifest) -> Result<(), Failure> {
    let man = serde_json::to_string_pretty(manifest).map_err(|e| Failure::Data(e.to_string()))?;
    match out {
        Some(path) => {
            fs::write(path, body).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            let mp = manifest_path(path);
            fs::write(&mp, man + "\n").map_err(|e| Failure::Data(format!("{}: {e}", mp.display())))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Data(e.to_string()))?;
            eprintln!("{man}");
        }
    }
    Ok(())
}

/// Shortest round-tripping decimal, in exponent form outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// CSV with a header line; every cell is already formatted.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

pub fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Data(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [0.0, 1.5, -2.25e-7, 3.0e300, 1e-300, 12345.678] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1e-300), "1e-300");
        assert_eq!(num(0.5), "0.5");
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            manifest_path(Path::new("/tmp/a.csv")),
            PathBuf::from("/tmp/a.csv.manifest.json")
        );
    }
}
