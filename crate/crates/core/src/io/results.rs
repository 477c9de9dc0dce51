//! CSV result tables and the JSON run manifest.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::IoError;

/// Serializes `rows` with a header naming every field.
pub fn results_to_string<T: Serialize>(rows: &[T]) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_results<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), IoError> {
    std::fs::write(path, results_to_string(rows)?)?;
    Ok(())
}

pub fn read_results<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// What produced a set of result files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// The parsed configuration of the run.
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value, seeds: Vec<u64>) -> Self {
        Manifest {
            tool: "perculab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            seeds,
        }
    }
}

pub fn write_manifest(path: &Path, m: &Manifest) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(m)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Manifest, IoError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{DecayRow, Horizon, ScalingRow};

    #[test]
    fn header_names_the_fields() {
        let rows = vec![ScalingRow {
            delta: 0.125,
            n: Horizon::Fixation,
            seed: 3,
            steps: 9,
            curves_initial: 4,
            curves_final: 2,
            hausdorff: 0.1,
            stable_edge_coverage: 0.5,
            runtime_ms: 1,
        }];
        let text = results_to_string(&rows).unwrap();
        let mut l = text.lines();
        assert_eq!(
            l.next().unwrap(),
            "delta,n,seed,steps,curves_initial,curves_final,hausdorff,stable_edge_coverage,runtime_ms"
        );
        assert_eq!(l.next().unwrap(), "0.125,fixation,3,9,4,2,0.1,0.5,1");
        let d = results_to_string(&[DecayRow { m: 5.0, trials: 1, failures: 0, frequency: 0.0, rate_estimate: 0.0 }]).unwrap();
        assert!(d.starts_with("M,trials,failures,frequency,rate_estimate\n"));
    }

    #[test]
    fn tables_and_manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            DecayRow { m: 5.0, trials: 10, failures: 3, frequency: 0.3, rate_estimate: 0.1 / 3.0 },
            DecayRow { m: 10.0, trials: 7, failures: 0, frequency: 0.0, rate_estimate: f64::INFINITY },
        ];
        let p = dir.path().join("decay.csv");
        write_results(&p, &rows).unwrap();
        assert_eq!(read_results::<DecayRow>(&p).unwrap(), rows);

        let m = Manifest::new("experiment decay", serde_json::json!({"radius": 64, "lambda": 0.5}), vec![1, 2]);
        let p = dir.path().join("manifest.json");
        write_manifest(&p, &m).unwrap();
        assert_eq!(read_manifest(&p).unwrap(), m);
        std::fs::write(&p, "{\"tool\": 1}").unwrap();
        assert!(read_manifest(&p).unwrap_err().is_format());
    }
}
