use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::{Cadence, ClimateSeries, SiteMeta, Variable};
use crate::{Error, Result};

/// Timestamp layout written by exports and accepted first on input.
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

const SITE_PREFIX: &str = "# site:";

/// How CSV columns map onto variables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvSchema {
    pub timestamp_column: String,
    /// Column name to variable. Empty means every non-timestamp header
    /// must be a variable name.
    #[serde(default)]
    pub columns: BTreeMap<String, Variable>,
    /// Numeric marker read as missing.
    pub missing_sentinel: f64,
    /// Overrides the `# site:` comment line when present.
    #[serde(default)]
    pub site: Option<SiteMeta>,
    /// Overrides cadence detection.
    #[serde(default)]
    pub cadence: Option<Cadence>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            timestamp_column: "timestamp".into(),
            columns: BTreeMap::new(),
            missing_sentinel: -999.0,
            site: None,
            cadence: None,
        }
    }
}

/// Result of reading a measured database.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub site: Option<SiteMeta>,
    pub series: Vec<ClimateSeries>,
    /// Cells that parsed but fell outside the variable's physical range.
    pub out_of_range: usize,
}

impl Dataset {
    pub fn get(&self, v: Variable) -> Option<&ClimateSeries> {
        self.series.iter().find(|s| s.variable() == v)
    }

    pub fn require(&self, v: Variable) -> Result<&ClimateSeries> {
        self.get(v)
            .ok_or_else(|| Error::invalid(format!("dataset has no {v} column")))
    }
}

/// Reads a weather CSV file.
///
/// Lines starting with `#` are comments; a `# site: {json}` line carries
/// the site metadata. Empty or unparseable cells and the sentinel become
/// missing values.
pub fn ingest_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    ingest_reader(file, schema)
}

pub fn ingest_reader(reader: impl Read, schema: &CsvSchema) -> Result<Dataset> {
    let mut site = None;
    let mut body = String::new();
    for line in BufReader::new(reader).lines() {
        let line = line.map_err(|e| Error::io("<csv>", e))?;
        if let Some(rest) = line.strip_prefix(SITE_PREFIX) {
            site = Some(serde_json::from_str::<SiteMeta>(rest.trim())?);
        } else if !line.trim_start().starts_with('#') && !line.trim().is_empty() {
            body.push_str(&line);
            body.push('\n');
        }
    }
    if let Some(s) = &schema.site {
        site = Some(s.clone());
    }
    if let Some(s) = &site {
        s.validate()?;
    }

    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let headers = rdr.headers()?.clone();
    let ts_col = headers
        .iter()
        .position(|h| h == schema.timestamp_column)
        .ok_or_else(|| Error::invalid(format!("no '{}' column", schema.timestamp_column)))?;

    let mut mapped: Vec<(usize, Variable)> = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        if i == ts_col {
            continue;
        }
        let var = if schema.columns.is_empty() {
            Some(h.parse::<Variable>()?)
        } else {
            schema.columns.get(h).copied()
        };
        if let Some(v) = var {
            mapped.push((i, v));
        }
    }
    for name in schema.columns.keys() {
        if !headers.iter().any(|h| h == name) {
            return Err(Error::invalid(format!(
                "schema column '{name}' not in header"
            )));
        }
    }
    if mapped.is_empty() {
        return Err(Error::invalid("no variable column mapped"));
    }

    let mut timestamps = Vec::new();
    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::new(); mapped.len()];
    let mut out_of_range = 0;
    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 1;
        let record = record?;
        let raw_ts = record.get(ts_col).unwrap_or("");
        let t = parse_timestamp(raw_ts).ok_or_else(|| Error::Parse {
            row,
            message: format!("bad timestamp '{raw_ts}'"),
        })?;
        if let Some(prev) = timestamps.last() {
            if t <= *prev {
                return Err(Error::NonMonotone { row });
            }
        }
        timestamps.push(t);
        for (col, (i, var)) in columns.iter_mut().zip(&mapped) {
            let cell = record.get(*i).unwrap_or("");
            let value = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v != schema.missing_sentinel);
            let value = match value {
                Some(v) if !var.admits(v) => {
                    out_of_range += 1;
                    None
                }
                other => other,
            };
            col.push(value);
        }
    }

    let cadence = match schema.cadence {
        Some(c) => c,
        None => detect_cadence(&timestamps)?,
    };
    let series = mapped
        .iter()
        .zip(columns)
        .map(|((_, v), values)| {
            ClimateSeries::from_parts_unchecked(*v, cadence, timestamps.clone(), values)
        })
        .collect();
    Ok(Dataset {
        site,
        series,
        out_of_range,
    })
}

pub(crate) fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    const FORMATS: [&str; 4] = [
        TIMESTAMP_FORMAT,
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%d %H:%M",
    ];
    let s = s.trim();
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .or_else(|| {
            NaiveDate::parse_from_str(s, "%Y-%m-%d")
                .ok()
                .and_then(|d| d.and_hms_opt(0, 0, 0))
        })
}

/// Cadence from the median gap between consecutive timestamps.
fn detect_cadence(timestamps: &[NaiveDateTime]) -> Result<Cadence> {
    if timestamps.len() < 2 {
        return Err(Error::invalid(
            "cannot detect cadence from fewer than two rows; set it in the schema",
        ));
    }
    let mut gaps: Vec<i64> = timestamps
        .windows(2)
        .map(|w| (w[1] - w[0]).num_seconds())
        .collect();
    gaps.sort_unstable();
    match gaps[gaps.len() / 2] {
        3600 => Ok(Cadence::Hourly),
        86400 => Ok(Cadence::Daily),
        g => Err(Error::invalid(format!(
            "median step of {g} s is neither hourly nor daily"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_rows_with_a_missing_cell() {
        let csv = "timestamp,dry_bulb_temp\n2001-08-01T00:00:00,20.0\n2001-08-01T01:00:00,21.0\n2001-08-01T02:00:00,\n";
        let ds = ingest_reader(csv.as_bytes(), &CsvSchema::default()).unwrap();
        let s = ds.require(Variable::DryBulbTemp).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.missing_count(), 1);
        assert_eq!(s.cadence(), Cadence::Hourly);
    }

    #[test]
    fn out_of_order_rows_name_row_two() {
        let csv = "timestamp,dry_bulb_temp\n2001-08-01T01:00:00,20.0\n2001-08-01T00:00:00,21.0\n";
        match ingest_reader(csv.as_bytes(), &CsvSchema::default()) {
            Err(Error::NonMonotone { row }) => assert_eq!(row, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_column_is_rejected() {
        let csv = "timestamp,temperature\n2001-08-01T00:00:00,20.0\n";
        assert!(matches!(
            ingest_reader(csv.as_bytes(), &CsvSchema::default()),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn hourly_cadence_from_gap_median() {
        // Oracle: the median of 23 one-hour gaps, one of them doubled by a
        // dropped row, is 3600 s.
        let start = NaiveDate::from_ymd_opt(2001, 8, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        let mut csv = String::from("timestamp,wind_speed\n");
        for h in (0..25).filter(|h| *h != 7) {
            let t = start + chrono::Duration::hours(h);
            csv.push_str(&format!("{},{h}\n", t.format(TIMESTAMP_FORMAT)));
        }
        let ds = ingest_reader(csv.as_bytes(), &CsvSchema::default()).unwrap();
        let s = ds.require(Variable::WindSpeed).unwrap();
        assert_eq!(s.cadence(), Cadence::Hourly);
        assert_eq!(s.len(), 24);
    }

    #[test]
    fn sentinel_and_site_comment() {
        let csv = "# site: {\"name\":\"x\",\"latitude\":-21.0,\"longitude\":55.5,\"altitude\":8.0,\"utc_offset\":4.0}\n# free comment\ntimestamp,wind_speed,rel_humidity\n2001-08-01,-999,50\n2001-08-02,3.5,130\n";
        let ds = ingest_reader(csv.as_bytes(), &CsvSchema::default()).unwrap();
        assert_eq!(ds.site.as_ref().unwrap().name, "x");
        assert_eq!(
            ds.require(Variable::WindSpeed).unwrap().values(),
            &[None, Some(3.5)]
        );
        assert_eq!(
            ds.require(Variable::RelHumidity).unwrap().values(),
            &[Some(50.0), None]
        );
        assert_eq!(ds.out_of_range, 1);
        assert_eq!(ds.series[0].cadence(), Cadence::Daily);
    }

    #[test]
    fn explicit_column_mapping() {
        let csv = "date,T,ignored\n2001-08-01,20,x\n2001-08-02,21,y\n";
        let mut schema = CsvSchema {
            timestamp_column: "date".into(),
            ..CsvSchema::default()
        };
        schema.columns.insert("T".into(), Variable::DryBulbTemp);
        let ds = ingest_reader(csv.as_bytes(), &schema).unwrap();
        assert_eq!(ds.series.len(), 1);
        assert_eq!(ds.series[0].present(), vec![20.0, 21.0]);
    }
}
