//! Recorded trajectories: delimited text with a header row and the columns
//! `vehicle_id, frame, lane_id, x, v, a` (positions in m, velocities in m/s,
//! accelerations in m/s², 25 Hz frames).

use std::path::Path;

use frarl_core::sim::TrajectoryRow;

use super::{read_to_string, write_string, FormatError};

pub const COLUMNS: [&str; 6] = ["vehicle_id", "frame", "lane_id", "x", "v", "a"];

pub fn parse_trajectories(text: &str) -> Result<Vec<TrajectoryRow>, FormatError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| FormatError::at(1, e.to_string()))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Ok(Vec::new());
    }
    let found: Vec<&str> = header.iter().collect();
    if found != COLUMNS {
        return Err(FormatError::at(1, format!("expected header {}, found {}", COLUMNS.join(","), found.join(","))));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| FormatError::at(line, e.to_string()))?;
        if record.len() != COLUMNS.len() {
            return Err(FormatError::at(line, format!("expected {} fields, found {}", COLUMNS.len(), record.len())));
        }
        let field = |k: usize| &record[k];
        let int = |k: usize| {
            field(k)
                .parse::<u64>()
                .map_err(|_| FormatError::at_column(line, COLUMNS[k], format!("{:?} is not a non-negative integer", field(k))))
        };
        let float = |k: usize| {
            field(k)
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| FormatError::at_column(line, COLUMNS[k], format!("{:?} is not a finite number", field(k))))
        };
        let lane_id = field(2)
            .parse::<i64>()
            .map_err(|_| FormatError::at_column(line, COLUMNS[2], format!("{:?} is not an integer", field(2))))?;
        rows.push(TrajectoryRow {
            vehicle_id: int(0)?,
            frame: int(1)?,
            lane_id,
            x: float(3)?,
            v: float(4)?,
            a: float(5)?,
        });
    }
    Ok(rows)
}

pub fn format_trajectories(rows: &[TrajectoryRow]) -> String {
    let mut out = COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{},{},{}\n", r.vehicle_id, r.frame, r.lane_id, r.x, r.v, r.a));
    }
    out
}

pub fn read_trajectories(path: &Path) -> Result<Vec<TrajectoryRow>, FormatError> {
    parse_trajectories(&read_to_string(path)?).map_err(|e| e.in_file(path))
}

pub fn write_trajectories(path: &Path, rows: &[TrajectoryRow]) -> Result<(), FormatError> {
    write_string(path, &format_trajectories(rows))
}
