//! Scenario files: `key value` header lines (`source`, `offset`,
//! `ego_velocity`, `lead_velocity`, and for falsified scenarios optionally
//! `robustness` and `iteration`), followed by one leader acceleration per
//! line. Blank lines and `#` comments are ignored.

use std::path::{Path, PathBuf};

use frarl_core::mtl::Robustness;
use frarl_core::sim::{Scenario, ScenarioSource, SimConfig};
use frarl_core::train::PoolEntry;

use super::{read_to_string, write_string, FormatError};

/// Extension of scenario files inside a scenario-set directory.
pub const EXTENSION: &str = "scn";

/// A parsed scenario plus the optional falsification annotations.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    pub robustness: Option<Robustness>,
    pub iteration: Option<u64>,
}

impl From<&PoolEntry> for ScenarioFile {
    fn from(e: &PoolEntry) -> Self {
        ScenarioFile { scenario: e.scenario.clone(), robustness: Some(e.robustness), iteration: Some(e.iteration) }
    }
}

impl ScenarioFile {
    pub fn into_pool_entry(self) -> Option<PoolEntry> {
        Some(PoolEntry { scenario: self.scenario, robustness: self.robustness?, iteration: self.iteration? })
    }
}

pub fn format_scenario(file: &ScenarioFile) -> String {
    let s = &file.scenario;
    let mut out = format!(
        "source {}\noffset {}\nego_velocity {}\nlead_velocity {}\n",
        s.source.as_str(),
        s.offset,
        s.ego_velocity,
        s.lead_velocity
    );
    if let Some(r) = file.robustness {
        out.push_str(&format!("robustness {}\n", r.to_f64()));
    }
    if let Some(i) = file.iteration {
        out.push_str(&format!("iteration {i}\n"));
    }
    for a in &s.lead_accel {
        out.push_str(&format!("{a}\n"));
    }
    out
}

pub fn parse_scenario(text: &str, cfg: &SimConfig) -> Result<ScenarioFile, FormatError> {
    let mut source = None;
    let mut offset = None;
    let mut ego_velocity = None;
    let mut lead_velocity = None;
    let mut robustness = None;
    let mut iteration = None;
    let mut accel = Vec::with_capacity(cfg.max_steps);
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let first = parts.next().unwrap_or_default();
        let Some(value) = parts.next() else {
            let a = first
                .parse::<f64>()
                .ok()
                .filter(|a| a.is_finite())
                .ok_or_else(|| FormatError::at(line, format!("{first:?} is not a finite acceleration")))?;
            accel.push(a);
            continue;
        };
        if !accel.is_empty() {
            return Err(FormatError::at(line, "header line after the acceleration values"));
        }
        if parts.next().is_some() {
            return Err(FormatError::at(line, "expected `key value`"));
        }
        let number = |what: &str| {
            value.parse::<f64>().ok().filter(|v| !v.is_nan()).ok_or_else(|| FormatError::at(line, format!("{what} {value:?} is not a number")))
        };
        match first {
            "source" => {
                source = Some(
                    value.parse::<ScenarioSource>().map_err(|_| FormatError::at(line, format!("unknown source {value:?}")))?,
                )
            }
            "offset" => offset = Some(number("offset")?),
            "ego_velocity" => ego_velocity = Some(number("ego_velocity")?),
            "lead_velocity" => lead_velocity = Some(number("lead_velocity")?),
            "robustness" => robustness = Some(Robustness::from(number("robustness")?)),
            "iteration" => {
                iteration = Some(value.parse::<u64>().map_err(|_| FormatError::at(line, format!("iteration {value:?} is not an integer")))?)
            }
            other => return Err(FormatError::at(line, format!("unknown header key {other:?}"))),
        }
    }
    let last = text.lines().count();
    let missing = |key: &str| FormatError::at(last, format!("missing header key {key:?}"));
    let source = source.ok_or_else(|| missing("source"))?;
    let offset = offset.ok_or_else(|| missing("offset"))?;
    let ego_velocity = ego_velocity.ok_or_else(|| missing("ego_velocity"))?;
    let lead_velocity = lead_velocity.ok_or_else(|| missing("lead_velocity"))?;
    let scenario = Scenario::new(source, offset, ego_velocity, lead_velocity, accel, cfg)
        .map_err(|e| FormatError::at(last, e.to_string()))?;
    Ok(ScenarioFile { scenario, robustness, iteration })
}

pub fn read_scenario(path: &Path, cfg: &SimConfig) -> Result<ScenarioFile, FormatError> {
    parse_scenario(&read_to_string(path)?, cfg).map_err(|e| e.in_file(path))
}

pub fn write_scenario(path: &Path, file: &ScenarioFile) -> Result<(), FormatError> {
    write_string(path, &format_scenario(file))
}

/// Scenario files of a directory, sorted by file name.
pub fn scenario_paths(dir: &Path) -> Result<Vec<PathBuf>, FormatError> {
    let io = |source| FormatError::Io { path: dir.to_path_buf(), source };
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().is_some_and(|e| e == EXTENSION) {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// All scenarios of a scenario-set directory in file-name order.
pub fn read_scenario_dir(dir: &Path, cfg: &SimConfig) -> Result<Vec<ScenarioFile>, FormatError> {
    scenario_paths(dir)?.iter().map(|p| read_scenario(p, cfg)).collect()
}

/// Writes `files` as `00000.scn`, `00001.scn`, ... into `dir`.
pub fn write_scenario_dir(dir: &Path, files: &[ScenarioFile]) -> Result<(), FormatError> {
    std::fs::create_dir_all(dir).map_err(|source| FormatError::Io { path: dir.to_path_buf(), source })?;
    for (i, f) in files.iter().enumerate() {
        write_scenario(&dir.join(format!("{i:05}.{EXTENSION}")), f)?;
    }
    Ok(())
}
