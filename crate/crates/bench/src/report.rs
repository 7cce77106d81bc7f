//! Benchmark records and their CSV/JSON rendering.
//!
//! The wide layout has one row per `(dataset, k)` with a column group per
//! algorithm, followed by an `Average` row over successful entries.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use spca::baselines::Baseline;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Greedy,
    LocalSearch,
    Chan,
    LowRank,
    /// CGAL followed by randomized rounding.
    Ra,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Greedy,
        Algorithm::LocalSearch,
        Algorithm::Chan,
        Algorithm::LowRank,
        Algorithm::Ra,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ra => "ra",
            other => other.baseline().expect("baseline").name(),
        }
    }

    pub fn baseline(self) -> Option<Baseline> {
        match self {
            Algorithm::Greedy => Some(Baseline::Greedy),
            Algorithm::LocalSearch => Some(Baseline::LocalSearch),
            Algorithm::Chan => Some(Baseline::Chan),
            Algorithm::LowRank => Some(Baseline::LowRank),
            Algorithm::Ra => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ra" | "rounding" => Ok(Algorithm::Ra),
            other => {
                let b: Baseline = other
                    .parse()
                    .map_err(|_| BenchError::Config(format!("unknown algorithm {other:?}")))?;
                Ok(match b {
                    Baseline::Greedy => Algorithm::Greedy,
                    Baseline::LocalSearch => Algorithm::LocalSearch,
                    Baseline::Chan => Algorithm::Chan,
                    Baseline::LowRank => Algorithm::LowRank,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaExtras {
    pub sdp_objective: f64,
    pub c0: f64,
    pub cgal_seconds: f64,
    /// CGAL plus rounding.
    pub total_seconds: f64,
}

/// One algorithm run on one `(dataset, k)`. For `Ra`, `elapsed_seconds` is the
/// rounding time alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub dataset: String,
    pub d: usize,
    pub k: usize,
    pub algorithm: Algorithm,
    pub objective: Option<f64>,
    pub elapsed_seconds: f64,
    pub extras: Option<RaExtras>,
    pub error: Option<String>,
}

impl BenchRecord {
    pub fn succeeded(&self) -> bool {
        self.error.is_none() && self.objective.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(BenchError::Config(format!(
                "unknown report format {other:?}"
            ))),
        }
    }
}

pub const AVERAGE_LABEL: &str = "Average";

pub const HEADER: [&str; 18] = [
    "Dataset",
    "d",
    "k",
    "Greedy Obj",
    "Greedy Time",
    "Local Search Obj",
    "Local Search Time",
    "Chan's Obj",
    "Chan's Time",
    "Low Rank Obj",
    "Low Rank Time",
    "CGAL Time",
    "CGAL SDP Obj",
    "CGAL c0",
    "RA Obj",
    "RA Time",
    "RA Total Time",
    "Errors",
];

#[derive(Clone, Copy)]
enum Field {
    Obj,
    Time,
    CgalTime,
    SdpObj,
    C0,
    Total,
}

/// Numeric columns in header order, after the three key columns.
const NUMERIC: [(Algorithm, Field); 14] = [
    (Algorithm::Greedy, Field::Obj),
    (Algorithm::Greedy, Field::Time),
    (Algorithm::LocalSearch, Field::Obj),
    (Algorithm::LocalSearch, Field::Time),
    (Algorithm::Chan, Field::Obj),
    (Algorithm::Chan, Field::Time),
    (Algorithm::LowRank, Field::Obj),
    (Algorithm::LowRank, Field::Time),
    (Algorithm::Ra, Field::CgalTime),
    (Algorithm::Ra, Field::SdpObj),
    (Algorithm::Ra, Field::C0),
    (Algorithm::Ra, Field::Obj),
    (Algorithm::Ra, Field::Time),
    (Algorithm::Ra, Field::Total),
];

const ERRORS_COL: usize = 17;

fn field_value(r: &BenchRecord, f: Field) -> Option<f64> {
    match f {
        Field::Obj => r.objective,
        Field::Time => Some(r.elapsed_seconds),
        Field::CgalTime => r.extras.map(|e| e.cgal_seconds),
        Field::SdpObj => r.extras.map(|e| e.sdp_objective),
        Field::C0 => r.extras.map(|e| e.c0),
        Field::Total => r.extras.map(|e| e.total_seconds),
    }
}

/// Shortest representation that parses back to the same `f64`.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn sanitize(reason: &str) -> String {
    reason.replace(['|', '\n', '\r'], " ")
}

type Cells = Vec<Option<String>>;

struct Group<'a> {
    dataset: &'a str,
    d: usize,
    k: usize,
    by_algo: [Option<&'a BenchRecord>; 5],
}

fn algo_index(a: Algorithm) -> usize {
    Algorithm::ALL.iter().position(|&x| x == a).expect("listed")
}

fn group(records: &[BenchRecord]) -> Result<Vec<Group<'_>>> {
    let mut groups: Vec<Group<'_>> = Vec::new();
    let mut index: HashMap<(&str, usize), usize> = HashMap::new();
    for r in records {
        if let Some(x) = r.objective {
            if !x.is_finite() {
                return Err(BenchError::Report(format!(
                    "non-finite objective for {} on {}",
                    r.algorithm, r.dataset
                )));
            }
        }
        if !(r.elapsed_seconds >= 0.0) {
            return Err(BenchError::Report(format!(
                "negative elapsed time for {} on {}",
                r.algorithm, r.dataset
            )));
        }
        let gi = *index.entry((r.dataset.as_str(), r.k)).or_insert_with(|| {
            groups.push(Group {
                dataset: &r.dataset,
                d: r.d,
                k: r.k,
                by_algo: [None; 5],
            });
            groups.len() - 1
        });
        let slot = &mut groups[gi].by_algo[algo_index(r.algorithm)];
        if slot.is_some() {
            return Err(BenchError::Report(format!(
                "duplicate {} record for {} k={}",
                r.algorithm, r.dataset, r.k
            )));
        }
        *slot = Some(r);
    }
    Ok(groups)
}

/// Header-less table rows, including the trailing average row.
fn table(records: &[BenchRecord]) -> Result<Vec<Cells>> {
    if records.is_empty() {
        return Err(BenchError::Report("no records".into()));
    }
    let groups = group(records)?;
    let mut rows = Vec::with_capacity(groups.len() + 1);
    let mut sums = [(0.0f64, 0usize); 14];
    for g in &groups {
        let mut row: Cells = vec![
            Some(g.dataset.to_owned()),
            Some(g.d.to_string()),
            Some(g.k.to_string()),
        ];
        for (col, &(algo, field)) in NUMERIC.iter().enumerate() {
            let rec = g.by_algo[algo_index(algo)];
            let v = rec.and_then(|r| field_value(r, field));
            if let (Some(r), Some(x)) = (rec, v) {
                if r.succeeded() {
                    sums[col].0 += x;
                    sums[col].1 += 1;
                }
            }
            row.push(v.map(fmt_f64));
        }
        let errors: Vec<String> = g
            .by_algo
            .iter()
            .flatten()
            .filter_map(|r| {
                r.error
                    .as_ref()
                    .map(|e| format!("{}={}", r.algorithm, sanitize(e)))
            })
            .collect();
        row.push((!errors.is_empty()).then(|| errors.join("|")));
        rows.push(row);
    }
    let mut avg: Cells = vec![Some(AVERAGE_LABEL.to_owned()), None, None];
    avg.extend(
        sums.iter()
            .map(|&(s, n)| (n > 0).then(|| fmt_f64(s / n as f64))),
    );
    avg.push(None);
    rows.push(avg);
    Ok(rows)
}

pub fn render_csv(records: &[BenchRecord]) -> Result<String> {
    let rows = table(records)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.iter().map(|c| c.as_deref().unwrap_or("")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| BenchError::Report(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render_json(records: &[BenchRecord]) -> Result<String> {
    let rows = table(records)?;
    let objects: Vec<Value> = rows
        .into_iter()
        .map(|row| {
            let mut obj = Map::new();
            for (i, (name, cell)) in HEADER.iter().zip(row).enumerate() {
                let v = match cell {
                    None => Value::Null,
                    Some(s) if i == 0 || i == ERRORS_COL => Value::String(s),
                    Some(s) if i <= 2 => Value::from(s.parse::<u64>().expect("integer cell")),
                    Some(s) => Value::from(s.parse::<f64>().expect("numeric cell")),
                };
                obj.insert((*name).to_owned(), v);
            }
            Value::Object(obj)
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&objects)?;
    out.push('\n');
    Ok(out)
}

pub fn render(records: &[BenchRecord], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => render_csv(records),
        ReportFormat::Json => render_json(records),
    }
}

pub fn emit_report(records: &[BenchRecord], format: ReportFormat, path: &Path) -> Result<()> {
    let text = render(records, format)?;
    std::fs::write(path, text).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn cell_f64(cell: &Option<String>, col: &str) -> Result<Option<f64>> {
    cell.as_deref()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| BenchError::Report(format!("column {col:?}: not a number {s:?}")))
        })
        .transpose()
}

fn cell_usize(cell: &Option<String>, col: &str) -> Result<usize> {
    let s = cell
        .as_deref()
        .ok_or_else(|| BenchError::Report(format!("column {col:?} is empty")))?;
    s.parse()
        .map_err(|_| BenchError::Report(format!("column {col:?}: not an integer {s:?}")))
}

fn records_from_rows(rows: Vec<Cells>) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    for row in rows {
        if row.len() != HEADER.len() {
            return Err(BenchError::Report(format!(
                "expected {} columns, found {}",
                HEADER.len(),
                row.len()
            )));
        }
        let dataset = row[0].clone().unwrap_or_default();
        if dataset == AVERAGE_LABEL && row[1].is_none() {
            continue;
        }
        let d = cell_usize(&row[1], HEADER[1])?;
        let k = cell_usize(&row[2], HEADER[2])?;
        let mut errors: HashMap<Algorithm, String> = HashMap::new();
        if let Some(e) = &row[ERRORS_COL] {
            for part in e.split('|') {
                let (name, reason) = part
                    .split_once('=')
                    .ok_or_else(|| BenchError::Report(format!("malformed error entry {part:?}")))?;
                errors.insert(name.parse()?, reason.to_owned());
            }
        }
        let mut values: HashMap<(Algorithm, usize), f64> = HashMap::new();
        for (col, &(algo, field)) in NUMERIC.iter().enumerate() {
            if let Some(x) = cell_f64(&row[col + 3], HEADER[col + 3])? {
                values.insert((algo, field as usize), x);
            }
        }
        let get = |a: Algorithm, f: Field| values.get(&(a, f as usize)).copied();
        for algo in Algorithm::ALL {
            let Some(elapsed_seconds) = get(algo, Field::Time) else {
                if errors.contains_key(&algo) {
                    return Err(BenchError::Report(format!(
                        "{algo} has an error but no time"
                    )));
                }
                continue;
            };
            let extras = match (
                get(algo, Field::SdpObj),
                get(algo, Field::C0),
                get(algo, Field::CgalTime),
                get(algo, Field::Total),
            ) {
                (Some(sdp_objective), Some(c0), Some(cgal_seconds), Some(total_seconds)) => {
                    Some(RaExtras {
                        sdp_objective,
                        c0,
                        cgal_seconds,
                        total_seconds,
                    })
                }
                _ => None,
            };
            out.push(BenchRecord {
                dataset: dataset.clone(),
                d,
                k,
                algorithm: algo,
                objective: get(algo, Field::Obj),
                elapsed_seconds,
                extras,
                error: errors.remove(&algo),
            });
        }
        if let Some(algo) = errors.keys().next() {
            return Err(BenchError::Report(format!(
                "error listed for {algo} which has no columns"
            )));
        }
    }
    Ok(out)
}

/// Rebuilds records from a CSV report, in canonical order.
pub fn parse_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if !header.iter().eq(HEADER.iter().copied()) {
        return Err(BenchError::Report("unexpected header".into()));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        rows.push(
            rec.iter()
                .map(|s| (!s.is_empty()).then(|| s.to_owned()))
                .collect(),
        );
    }
    records_from_rows(rows)
}

pub fn parse_json(text: &str) -> Result<Vec<BenchRecord>> {
    let objects: Vec<Map<String, Value>> = serde_json::from_str(text)?;
    let rows = objects
        .into_iter()
        .map(|obj| {
            HEADER
                .iter()
                .map(|name| match obj.get(*name) {
                    None | Some(Value::Null) => Ok(None),
                    Some(Value::String(s)) => Ok(Some(s.clone())),
                    Some(Value::Number(n)) => Ok(Some(n.to_string())),
                    Some(other) => Err(BenchError::Report(format!(
                        "column {name:?}: unexpected value {other}"
                    ))),
                })
                .collect::<Result<Cells>>()
        })
        .collect::<Result<Vec<_>>>()?;
    records_from_rows(rows)
}

pub fn parse_report(text: &str, format: ReportFormat) -> Result<Vec<BenchRecord>> {
    match format {
        ReportFormat::Csv => parse_csv(text),
        ReportFormat::Json => parse_json(text),
    }
}

/// Zeroes every wall-clock field so reports can be compared byte for byte.
pub fn strip_timing(records: &[BenchRecord]) -> Vec<BenchRecord> {
    records
        .iter()
        .map(|r| BenchRecord {
            elapsed_seconds: 0.0,
            extras: r.extras.map(|e| RaExtras {
                cgal_seconds: 0.0,
                total_seconds: 0.0,
                ..e
            }),
            ..r.clone()
        })
        .collect()
}

/// Renders `records` with timing columns zeroed.
pub fn render_without_timing(records: &[BenchRecord], format: ReportFormat) -> Result<String> {
    render(&strip_timing(records), format)
}

/// Percentage improvement of `obj` over the Chan baseline.
pub fn chan_gap(obj: f64, obj_chan: f64) -> Result<f64> {
    if !(obj_chan > 0.0) || !obj_chan.is_finite() {
        return Err(BenchError::NonPositiveBaseline(obj_chan));
    }
    Ok((obj - obj_chan) / obj_chan * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub dataset: String,
    pub k: usize,
    pub algorithm: Algorithm,
    pub gap_percent: f64,
    pub elapsed_seconds: f64,
}

/// Chan-normalized gaps of every successful non-Chan record whose
/// `(dataset, k)` also has a successful Chan record.
pub fn gap_table(records: &[BenchRecord]) -> Result<Vec<GapRow>> {
    let mut out = Vec::new();
    for g in group(records)? {
        let Some(chan) = g.by_algo[algo_index(Algorithm::Chan)].filter(|r| r.succeeded()) else {
            continue;
        };
        let base = chan.objective.expect("succeeded");
        for r in g.by_algo.iter().flatten() {
            if r.algorithm == Algorithm::Chan || !r.succeeded() {
                continue;
            }
            out.push(GapRow {
                dataset: g.dataset.to_owned(),
                k: g.k,
                algorithm: r.algorithm,
                gap_percent: chan_gap(r.objective.expect("succeeded"), base)?,
                elapsed_seconds: r.extras.map_or(r.elapsed_seconds, |e| e.total_seconds),
            });
        }
    }
    Ok(out)
}

pub fn render_gap_csv(rows: &[GapRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["Dataset", "k", "Algorithm", "Chan Gap (%)", "Time"])?;
    for r in rows {
        w.write_record([
            r.dataset.clone(),
            r.k.to_string(),
            r.algorithm.to_string(),
            fmt_f64(r.gap_percent),
            fmt_f64(r.elapsed_seconds),
        ])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| BenchError::Report(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
