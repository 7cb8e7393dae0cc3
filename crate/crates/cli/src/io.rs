//! File formats and atomic output.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use entpoly::linalg::CMatrix;
use entpoly::{Complex64, CountRecord, DensityMatrix, DetectorModel, MeasurementSetting};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::Failure;

/// Significant digits kept in reports.
pub const REPORT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", REPORT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

fn to_value<T: Serialize>(value: &T) -> Result<Value, Failure> {
    serde_json::to_value(value).map_err(|e| Failure::Serialize(e.to_string()))
}

/// Pretty JSON with sorted keys; floats rounded to [`REPORT_DIGITS`]
/// significant digits when `round` is set.
pub fn canonical_json<T: Serialize>(value: &T, round: bool) -> Result<String, Failure> {
    let mut v = to_value(value)?;
    if round {
        v = round_value(v);
    }
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Failure::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Hex SHA-256 of the compact sorted-key JSON of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> Result<String, Failure> {
    let compact = serde_json::to_string(&to_value(value)?).map_err(|e| Failure::Serialize(e.to_string()))?;
    Ok(Sha256::digest(compact.as_bytes()).iter().map(|b| format!("{b:02x}")).collect())
}

/// Number formatting for CSV cells, matching the JSON reports.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r.is_finite() {
        format!("{r}")
    } else {
        String::new()
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let io_err = |source| Failure::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Artifacts staged in memory and written together; if any write fails the
/// ones already written are removed.
#[derive(Debug, Default)]
pub struct Bundle {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Bundle {
    pub fn add(&mut self, path: PathBuf, bytes: impl Into<Vec<u8>>) {
        self.files.push((path, bytes.into()));
    }

    pub fn commit(self) -> Result<Vec<PathBuf>, Failure> {
        let mut done = Vec::with_capacity(self.files.len());
        for (path, bytes) in self.files {
            if let Err(e) = write_atomic(&path, &bytes) {
                for p in &done {
                    let _ = fs::remove_file(p);
                }
                return Err(e);
            }
            done.push(path);
        }
        Ok(done)
    }
}

pub fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input { path: path.to_path_buf(), message: e.to_string() })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| Failure::Input { path: path.to_path_buf(), message: e.to_string() })
}

/// Density matrix on disk: row-major `[re, im]` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFile {
    pub num_qubits: usize,
    pub entries: Vec<[f64; 2]>,
}

impl DensityFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let d = rho.dim();
        let entries = (0..d).flat_map(|r| (0..d).map(move |c| [m[(r, c)].re, m[(r, c)].im])).collect();
        Self { num_qubits: rho.num_qubits(), entries }
    }

    pub fn to_density(&self) -> Result<DensityMatrix, Failure> {
        let d = 1usize
            .checked_shl(self.num_qubits as u32)
            .filter(|_| self.num_qubits <= entpoly::linalg::MAX_QUBITS)
            .ok_or_else(|| Failure::Config(format!("{} qubits is outside the supported range", self.num_qubits)))?;
        if self.entries.len() != d * d {
            return crate::config_error(format!("expected {} entries for {} qubits, got {}", d * d, self.num_qubits, self.entries.len()));
        }
        let m = CMatrix::from_fn(d, d, |r, c| {
            let [re, im] = self.entries[r * d + c];
            Complex64::new(re, im)
        });
        Ok(DensityMatrix::new(m)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CountRow {
    setting_id: String,
    outcome: String,
    count: u64,
}

pub fn counts_to_csv(records: &[CountRecord]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        for (k, n) in r.counts.iter().enumerate() {
            w.serialize(CountRow { setting_id: r.setting.id(), outcome: r.setting.outcome_label(k), count: *n })
                .map_err(|e| Failure::Serialize(e.to_string()))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Failure::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Serialize(e.to_string()))
}

/// Reads counts grouped by setting in order of first appearance; outcomes
/// missing from the file count as zero.
pub fn counts_from_csv(path: &Path) -> Result<Vec<CountRecord>, Failure> {
    let bad = |message: String| Failure::Input { path: path.to_path_buf(), message };
    let text = read_text(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut order: Vec<String> = Vec::new();
    let mut table: BTreeMap<String, (MeasurementSetting, Vec<Option<u64>>)> = BTreeMap::new();
    for (line, row) in reader.deserialize::<CountRow>().enumerate() {
        let row = row.map_err(|e| bad(format!("row {}: {e}", line + 1)))?;
        if !table.contains_key(&row.setting_id) {
            let setting = MeasurementSetting::parse_id(&row.setting_id).map_err(|e| bad(e.to_string()))?;
            let slots = vec![None; setting.num_outcomes()];
            order.push(row.setting_id.clone());
            table.insert(row.setting_id.clone(), (setting, slots));
        }
        let (setting, slots) = table.get_mut(&row.setting_id).expect("inserted above");
        let k = setting.parse_outcome(&row.outcome).map_err(|e| bad(e.to_string()))?;
        if slots[k].replace(row.count).is_some() {
            return Err(bad(format!("duplicate outcome {} for setting {}", row.outcome, row.setting_id)));
        }
    }
    if order.is_empty() {
        return Err(bad("no count rows".into()));
    }
    order
        .into_iter()
        .map(|id| {
            let (setting, slots) = table.remove(&id).expect("listed setting");
            let counts = slots.into_iter().map(|n| n.unwrap_or(0)).collect();
            CountRecord::new(setting, counts, None, DetectorModel::default()).map_err(Failure::from)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use entpoly::{canonical_three_qubit, local_tomography_plan, simulate_plan, ThreeQubitClass};

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.123456789012345), 0.123456789012);
        assert_eq!(round_sig(-2.0 / 3.0), -0.666666666667);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(fmt_num(0.5), "0.5");
    }

    #[test]
    fn canonical_json_sorts_keys() {
        #[derive(Serialize)]
        struct S {
            zeta: f64,
            alpha: u32,
        }
        let s = canonical_json(&S { zeta: 1.0 / 3.0, alpha: 2 }, true).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
        assert!(s.contains("0.333333333333"));
        assert!(!s.contains("0.3333333333333"));
    }

    #[test]
    fn density_round_trip() {
        let rho = canonical_three_qubit(ThreeQubitClass::W).projector();
        let back = DensityFile::from_density(&rho).to_density().unwrap();
        assert_eq!(back.matrix(), rho.matrix());
        let bad = DensityFile { num_qubits: 2, entries: vec![[0.0, 0.0]; 3] };
        assert!(bad.to_density().is_err());
    }

    #[test]
    fn counts_csv_round_trip() {
        let rho = canonical_three_qubit(ThreeQubitClass::Ghz).projector();
        let recs = simulate_plan(&rho, &local_tomography_plan(3).unwrap(), &DetectorModel::default(), 3).unwrap();
        let text = counts_to_csv(&recs).unwrap();
        assert!(text.starts_with("setting_id,outcome,count\n"));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        write_atomic(&path, text.as_bytes()).unwrap();
        let back = counts_from_csv(&path).unwrap();
        assert_eq!(back.len(), recs.len());
        for (a, b) in back.iter().zip(&recs) {
            assert_eq!(a.setting, b.setting);
            assert_eq!(a.counts, b.counts);
        }
    }

    #[test]
    fn duplicate_rows_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        fs::write(&path, "setting_id,outcome,count\n0H,0,5\n0H,0,6\n").unwrap();
        assert!(matches!(counts_from_csv(&path), Err(Failure::Input { .. })));
    }
}
