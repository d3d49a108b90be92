use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::csv_io::{parse_acc_csv, parse_breath_csv, parse_meta_csv};
use super::{DataError, Dataset, SensorLocation, SubjectRecord};

/// Minimum supine rest duration in seconds.
pub const MIN_REST_SECONDS: f64 = 1800.0;

/// Every file a subject directory must contain.
pub fn subject_file_names() -> Vec<String> {
    let mut names = vec!["meta.csv".to_string()];
    names.extend(SensorLocation::ALL.iter().map(|l| format!("acc_{l}.csv")));
    names.push("rest.csv".into());
    names.push("adl.csv".into());
    names
}

fn read(path: &Path) -> Result<String, DataError> {
    if !path.is_file() {
        return Err(DataError::MissingFile(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn in_file<T>(path: &Path, r: Result<T, DataError>) -> Result<T, DataError> {
    r.map_err(|e| DataError::InFile {
        path: path.to_path_buf(),
        source: Box::new(e),
    })
}

/// Loads one subject directory.
pub fn load_subject(dir: &Path) -> Result<SubjectRecord, DataError> {
    // Check presence of everything first so the error names the first missing file.
    for name in subject_file_names() {
        let p = dir.join(&name);
        if !p.is_file() {
            return Err(DataError::MissingFile(p));
        }
    }
    let meta_path = dir.join("meta.csv");
    let meta = in_file(&meta_path, parse_meta_csv(&read(&meta_path)?))?;
    let mut acc = BTreeMap::new();
    for loc in SensorLocation::ALL {
        let p = dir.join(format!("acc_{loc}.csv"));
        acc.insert(loc, in_file(&p, parse_acc_csv(&read(&p)?))?);
    }
    let rest_path = dir.join("rest.csv");
    let rest = in_file(&rest_path, parse_breath_csv(&read(&rest_path)?))?;
    let adl_path = dir.join("adl.csv");
    let adl = in_file(&adl_path, parse_breath_csv(&read(&adl_path)?))?;
    SubjectRecord::new(meta, acc, rest, adl)
}

/// Loads `root/<subject>/...` for every subdirectory of `root`; subjects are
/// returned sorted by id regardless of directory listing order.
pub fn load_dataset(root: &Path) -> Result<Dataset, DataError> {
    let io = |source| DataError::Io {
        path: root.to_path_buf(),
        source,
    };
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .map_err(io)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io)?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    let subjects = dirs
        .iter()
        .map(|d| load_subject(d))
        .collect::<Result<Vec<_>, _>>()?;
    Dataset::new(subjects)
}
