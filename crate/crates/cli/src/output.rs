use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// 17 significant digits, enough to round-trip any double.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Writes `rows` under `header` as CSV to `path`, or to standard output.
pub fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut buf = csv::Writer::from_writer(Vec::new());
    buf.write_record(header)?;
    for row in rows {
        buf.write_record(row)?;
    }
    let bytes = buf.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    match path {
        Some(p) => {
            fs::write(p, bytes).map_err(|e| anyhow::anyhow!("cannot write {}: {e}", p.display()))
        }
        None => Ok(std::io::stdout().write_all(&bytes)?),
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

#[derive(Serialize)]
pub struct Manifest<'a, T: Serialize> {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub timestamp_unix: u64,
    pub outputs: Vec<String>,
    #[serde(flatten)]
    pub body: &'a T,
}

pub fn write_manifest<T: Serialize>(
    out: &Path,
    command: &'static str,
    body: &T,
) -> anyhow::Result<PathBuf> {
    let manifest = Manifest {
        artifact: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        timestamp_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        outputs: vec![out.display().to_string()],
        body,
    };
    let path = manifest_path(out);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            12345.678901234567,
            f64::MIN_POSITIVE,
        ] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(opt(None), "");
        assert_eq!(
            manifest_path(Path::new("a/b.csv")),
            PathBuf::from("a/b.csv.manifest.json")
        );
    }
}
