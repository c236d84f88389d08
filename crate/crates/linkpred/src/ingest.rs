//! Parsing of raw check-in records from tab-separated files.
//!
//! A check-in line carries six semantic fields (user, venue, category,
//! latitude, longitude, time); [`Schema`] maps each field to a column index
//! so the same parser handles any dump layout. The default schema matches
//! the common eight-column check-in TSV export, see [`Schema::default`].

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::DateTime;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One timestamped user-at-venue event with venue metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckIn {
    pub user_id: String,
    pub venue_id: String,
    /// Venue type label, e.g. "Bar".
    pub category: String,
    /// Degrees in [-90, 90].
    pub latitude: f64,
    /// Degrees in [-180, 180].
    pub longitude: f64,
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
}

/// Column indices of the six semantic fields within a tab-separated line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Schema {
    pub user: usize,
    pub venue: usize,
    pub category: usize,
    pub latitude: usize,
    pub longitude: usize,
    pub time: usize,
}

impl Default for Schema {
    /// Layout of the common check-in dump: user, venue, category-id,
    /// category-name, lat, lon, tz-offset, UTC-time. The category-id and
    /// tz-offset columns are ignored; times are interpreted as UTC.
    fn default() -> Self {
        Schema {
            user: 0,
            venue: 1,
            category: 3,
            latitude: 4,
            longitude: 5,
            time: 7,
        }
    }
}

impl Schema {
    /// Six-column layout with fields in declaration order:
    /// user, venue, category, lat, lon, time.
    pub fn identity() -> Self {
        Schema {
            user: 0,
            venue: 1,
            category: 2,
            latitude: 3,
            longitude: 4,
            time: 5,
        }
    }

    /// Number of columns a line must have at minimum.
    pub fn min_columns(&self) -> usize {
        1 + [
            self.user,
            self.venue,
            self.category,
            self.latitude,
            self.longitude,
            self.time,
        ]
        .into_iter()
        .max()
        .unwrap()
    }

    /// Parse overrides of the form `user=0,venue=1,category=3,lat=4,lon=5,time=7`.
    pub fn parse_overrides(&self, spec: &str) -> Result<Schema, String> {
        let mut schema = self.clone();
        for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=index, got {part:?}"))?;
            let idx: usize = value
                .trim()
                .parse()
                .map_err(|_| format!("bad column index {value:?} for {key:?}"))?;
            match key.trim() {
                "user" => schema.user = idx,
                "venue" => schema.venue = idx,
                "category" => schema.category = idx,
                "lat" | "latitude" => schema.latitude = idx,
                "lon" | "longitude" => schema.longitude = idx,
                "time" => schema.time = idx,
                other => return Err(format!("unknown schema field {other:?}")),
            }
        }
        Ok(schema)
    }
}

/// Dataset-level counts computed while loading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n_checkins: u64,
    pub n_users: u64,
    pub n_venues: u64,
    pub time_min: Option<i64>,
    pub time_max: Option<i64>,
}

impl DatasetStats {
    pub fn compute(checkins: &[CheckIn]) -> Self {
        let mut users = HashSet::new();
        let mut venues = HashSet::new();
        let mut time_min = None;
        let mut time_max = None;
        for c in checkins {
            users.insert(c.user_id.as_str());
            venues.insert(c.venue_id.as_str());
            time_min = Some(time_min.map_or(c.timestamp, |t: i64| t.min(c.timestamp)));
            time_max = Some(time_max.map_or(c.timestamp, |t: i64| t.max(c.timestamp)));
        }
        DatasetStats {
            n_checkins: checkins.len() as u64,
            n_users: users.len() as u64,
            n_venues: venues.len() as u64,
            time_min,
            time_max,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed line: expected at least {expected} columns, got {got}")]
    MalformedLine { expected: usize, got: usize },
    #[error("empty {field} id")]
    EmptyId { field: &'static str },
    #[error("bad coordinate {field}={value:?} (out of range or unparseable)")]
    BadCoordinate { field: &'static str, value: String },
    #[error("bad timestamp {value:?}")]
    BadTimestamp { value: String },
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("io error reading dataset")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {source}")]
    Parse { line: u64, source: ParseError },
}

/// Malformed-line policy for [`load_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnError {
    /// Count and drop malformed lines.
    Skip,
    /// Fail on the first malformed line, reporting its number.
    Abort,
}

impl fmt::Display for OnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OnError::Skip => write!(f, "skip"),
            OnError::Abort => write!(f, "abort"),
        }
    }
}

/// Result of loading a dataset file.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    /// Parsed check-ins in file order.
    pub checkins: Vec<CheckIn>,
    pub stats: DatasetStats,
    /// Lines dropped in skip mode (zero in abort mode).
    pub skipped_lines: u64,
}

/// Parse one tab-separated record into a validated [`CheckIn`].
///
/// The timestamp column accepts epoch seconds, the textual dump format
/// (`Tue Apr 03 18:00:06 +0000 2012`) or RFC 3339; all are resolved to UTC.
pub fn parse_checkin_line(line: &str, schema: &Schema) -> Result<CheckIn, ParseError> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() < schema.min_columns() {
        return Err(ParseError::MalformedLine {
            expected: schema.min_columns(),
            got: fields.len(),
        });
    }
    let user_id = fields[schema.user].trim();
    if user_id.is_empty() {
        return Err(ParseError::EmptyId { field: "user" });
    }
    let venue_id = fields[schema.venue].trim();
    if venue_id.is_empty() {
        return Err(ParseError::EmptyId { field: "venue" });
    }
    let latitude = parse_coordinate(fields[schema.latitude], "latitude", 90.0)?;
    let longitude = parse_coordinate(fields[schema.longitude], "longitude", 180.0)?;
    let timestamp = parse_timestamp(fields[schema.time])?;
    Ok(CheckIn {
        user_id: user_id.to_string(),
        venue_id: venue_id.to_string(),
        category: fields[schema.category].trim().to_string(),
        latitude,
        longitude,
        timestamp,
    })
}

fn parse_coordinate(raw: &str, field: &'static str, bound: f64) -> Result<f64, ParseError> {
    let value: f64 = raw.trim().parse().map_err(|_| ParseError::BadCoordinate {
        field,
        value: raw.to_string(),
    })?;
    // NaN fails the range check as well.
    if !(-bound..=bound).contains(&value) {
        return Err(ParseError::BadCoordinate {
            field,
            value: raw.to_string(),
        });
    }
    Ok(value)
}

fn parse_timestamp(raw: &str) -> Result<i64, ParseError> {
    let raw = raw.trim();
    let bad = || ParseError::BadTimestamp {
        value: raw.to_string(),
    };
    let secs = if let Ok(secs) = raw.parse::<i64>() {
        secs
    } else if let Ok(dt) = DateTime::parse_from_str(raw, "%a %b %d %H:%M:%S %z %Y") {
        dt.timestamp()
    } else if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        dt.timestamp()
    } else {
        return Err(bad());
    };
    if secs < 0 {
        return Err(bad());
    }
    Ok(secs)
}

/// Render a check-in back into the given schema layout. Columns the schema
/// does not address are filled with `-`; the timestamp is written as epoch
/// seconds. Re-parsing the result yields the original value.
pub fn format_checkin_line(checkin: &CheckIn, schema: &Schema) -> String {
    let mut columns = vec!["-".to_string(); schema.min_columns()];
    columns[schema.user] = checkin.user_id.clone();
    columns[schema.venue] = checkin.venue_id.clone();
    columns[schema.category] = checkin.category.clone();
    columns[schema.latitude] = checkin.latitude.to_string();
    columns[schema.longitude] = checkin.longitude.to_string();
    columns[schema.time] = checkin.timestamp.to_string();
    columns.join("\t")
}

/// Load a dataset from any buffered reader. Blank lines are ignored.
pub fn load_checkins<R: BufRead>(
    reader: R,
    schema: &Schema,
    on_error: OnError,
) -> Result<LoadedDataset, LoadError> {
    let mut checkins = Vec::new();
    let mut skipped = 0u64;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_checkin_line(&line, schema) {
            Ok(c) => checkins.push(c),
            Err(source) => match on_error {
                OnError::Skip => skipped += 1,
                OnError::Abort => {
                    return Err(LoadError::Parse {
                        line: idx as u64 + 1,
                        source,
                    })
                }
            },
        }
    }
    let stats = DatasetStats::compute(&checkins);
    Ok(LoadedDataset {
        checkins,
        stats,
        skipped_lines: skipped,
    })
}

/// Load a dataset from a file path. See [`load_checkins`].
pub fn load_dataset(
    path: impl AsRef<Path>,
    schema: &Schema,
    on_error: OnError,
) -> Result<LoadedDataset, LoadError> {
    let file = File::open(path)?;
    load_checkins(BufReader::new(file), schema, on_error)
}
