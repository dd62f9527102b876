//! On-disk formats: the sampled series, field snapshots, midline
//! cross-sections and run reports.
//!
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces the values bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::diagnostics::{RunReport, Sample};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::stepper::{Event, Observer, SimState};

pub const SERIES_FILE: &str = "series.csv";
pub const REPORT_TEXT_FILE: &str = "report.txt";
pub const REPORT_JSON_FILE: &str = "report.json";

/// Column name of the `p`-norm.
pub fn lp_column(p: f64) -> String {
    format!("L{p}")
}

pub fn series_header(p_norms: &[f64]) -> String {
    let mut cols = vec!["t".to_string(), "max_u".into(), "min_u".into(), "mass".into(), "linf_diff".into()];
    cols.extend(p_norms.iter().map(|&p| lp_column(p)));
    cols.join(",")
}

pub fn series_csv(series: &[Sample], p_norms: &[f64]) -> String {
    let mut out = series_header(p_norms);
    out.push('\n');
    for s in series {
        let _ = write!(out, "{:?},{:?},{:?},{:?},{:?}", s.t, s.max_u, s.min_u, s.mass, s.linf_diff);
        for x in &s.lp {
            let _ = write!(out, ",{x:?}");
        }
        out.push('\n');
    }
    out
}

/// One row of a series file: `t, max_u, min_u, mass, linf_diff, L_p...`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub max_u: f64,
    pub min_u: f64,
    pub mass: f64,
    pub linf_diff: f64,
    pub lp: Vec<f64>,
}

fn parse_floats(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Csv(format!("line {lineno}: bad number `{t}`"))))
        .collect()
}

/// Parses a series file, returning the `p` values of its norm columns and the rows.
pub fn parse_series_csv(text: &str) -> Result<(Vec<f64>, Vec<SeriesRow>)> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Csv("empty series file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 5 || cols[..5] != ["t", "max_u", "min_u", "mass", "linf_diff"] {
        return Err(Error::Csv(format!("unexpected series header `{header}`")));
    }
    let p_norms = cols[5..]
        .iter()
        .map(|c| {
            c.strip_prefix('L')
                .and_then(|p| p.parse::<f64>().ok())
                .ok_or_else(|| Error::Csv(format!("unexpected norm column `{c}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let v = parse_floats(line, n + 2)?;
        if v.len() != cols.len() {
            return Err(Error::Csv(format!("line {}: expected {} columns, got {}", n + 2, cols.len(), v.len())));
        }
        rows.push(SeriesRow { t: v[0], max_u: v[1], min_u: v[2], mass: v[3], linf_diff: v[4], lp: v[5..].to_vec() });
    }
    Ok((p_norms, rows))
}

fn grid_header(g: &Grid) -> String {
    format!(
        "nx={} ny={} x_min={:?} x_max={:?} y_min={:?} y_max={:?}",
        g.nx(),
        g.ny(),
        g.x_min(),
        g.x_max(),
        g.y_min(),
        g.y_max()
    )
}

/// Snapshot file contents: a metadata line, a column line, then one row per
/// cell in row-major order (`i` fastest).
pub fn snapshot_csv(field: &Field, name: &str, t: f64, step: u64) -> String {
    let g = field.grid();
    let mut out = String::with_capacity(g.len() * 48);
    let _ = writeln!(out, "# field={name} t={t:?} step={step} {}", grid_header(g));
    let _ = writeln!(out, "i,j,x,y,{name}");
    for j in 0..g.ny() {
        let y = g.y_center(j);
        for i in 0..g.nx() {
            let _ = writeln!(out, "{i},{j},{:?},{y:?},{:?}", g.x_center(i), field.get(i, j));
        }
    }
    out
}

/// A snapshot read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub name: String,
    pub t: f64,
    pub step: u64,
    pub field: Field,
}

fn header_value<'a>(header: &'a str, key: &str) -> Result<&'a str> {
    header
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| Error::Csv(format!("snapshot header lacks `{key}`")))
}

fn header_num<T: std::str::FromStr>(header: &str, key: &str) -> Result<T> {
    header_value(header, key)?.parse().map_err(|_| Error::Csv(format!("snapshot header: bad `{key}`")))
}

pub fn parse_snapshot_csv(text: &str) -> Result<Snapshot> {
    let mut lines = text.lines();
    let meta = lines.next().and_then(|l| l.strip_prefix('#')).ok_or_else(|| Error::Csv("missing metadata line".into()))?;
    let name = header_value(meta, "field")?.to_string();
    let grid = Grid::new(
        header_num(meta, "nx")?,
        header_num(meta, "ny")?,
        header_num(meta, "x_min")?,
        header_num(meta, "x_max")?,
        header_num(meta, "y_min")?,
        header_num(meta, "y_max")?,
    )?;
    let t = header_num(meta, "t")?;
    let step = header_num(meta, "step")?;
    let cols = lines.next().ok_or_else(|| Error::Csv("missing column line".into()))?;
    if cols != format!("i,j,x,y,{name}") {
        return Err(Error::Csv(format!("unexpected columns `{cols}`")));
    }
    let mut field = Field::zeros(grid);
    let mut count = 0;
    for (n, line) in lines.enumerate() {
        let mut parts = line.split(',');
        let mut next = || parts.next().ok_or_else(|| Error::Csv(format!("line {}: too few columns", n + 3)));
        let bad = |what: &str| Error::Csv(format!("line {}: bad {what}", n + 3));
        let i: usize = next()?.parse().map_err(|_| bad("i"))?;
        let j: usize = next()?.parse().map_err(|_| bad("j"))?;
        let _x = next()?;
        let _y = next()?;
        let v: f64 = next()?.parse().map_err(|_| bad("value"))?;
        if i >= grid.nx() || j >= grid.ny() {
            return Err(bad("cell index"));
        }
        field.set(i, j, v);
        count += 1;
    }
    if count != grid.len() {
        return Err(Error::Csv(format!("expected {} cells, got {count}", grid.len())));
    }
    Ok(Snapshot { name, t, step, field })
}

/// Row of cells nearest `y = 0` (exactly on it for odd `ny`).
pub fn midline_row(g: &Grid) -> usize {
    g.ny() / 2
}

/// `x, u, v, w` along the midline row.
pub fn midline_csv(state: &SimState) -> String {
    let g = state.grid();
    let j = midline_row(g);
    let mut out = String::new();
    let _ = writeln!(out, "# midline t={:?} step={} j={j} y={:?} {}", state.t, state.step, g.y_center(j), grid_header(g));
    out.push_str("x,u,v,w\n");
    for i in 0..g.nx() {
        let _ = writeln!(out, "{:?},{:?},{:?},{:?}", g.x_center(i), state.u.get(i, j), state.v.get(i, j), state.w.get(i, j));
    }
    out
}

/// File stem for a snapshot at time `t`.
pub fn snapshot_stem(t: f64) -> String {
    format!("{t:?}")
}

/// Writes `u_<t>.csv`, `v_<t>.csv`, `w_<t>.csv` and `mid_<t>.csv` into `dir`.
pub fn write_snapshot_set(dir: &Path, state: &SimState) -> Result<Vec<PathBuf>> {
    let stem = snapshot_stem(state.t);
    let mut written = Vec::new();
    for (name, f) in [("u", &state.u), ("v", &state.v), ("w", &state.w)] {
        let path = dir.join(format!("{name}_{stem}.csv"));
        fs::write(&path, snapshot_csv(f, name, state.t, state.step))?;
        written.push(path);
    }
    let path = dir.join(format!("mid_{stem}.csv"));
    fs::write(&path, midline_csv(state))?;
    written.push(path);
    Ok(written)
}

/// Observer writing a snapshot set at every mark and at a terminal event
/// before `t_end`. The first I/O failure is kept and later writes skipped.
#[derive(Debug)]
pub struct SnapshotWriter {
    dir: PathBuf,
    on_event: bool,
    last_step: Option<u64>,
    pub written: Vec<PathBuf>,
    pub error: Option<Error>,
}

impl SnapshotWriter {
    /// `on_event`: also snapshot the final state of runs ending in an event.
    pub fn new(dir: impl Into<PathBuf>, on_event: bool) -> Self {
        Self { dir: dir.into(), on_event, last_step: None, written: Vec::new(), error: None }
    }

    fn write(&mut self, state: &SimState) {
        if self.error.is_some() || self.last_step == Some(state.step) {
            return;
        }
        match write_snapshot_set(&self.dir, state) {
            Ok(paths) => self.written.extend(paths),
            Err(e) => self.error = Some(e),
        }
        self.last_step = Some(state.step);
    }

    pub fn into_result(self) -> Result<Vec<PathBuf>> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.written),
        }
    }
}

impl Observer for SnapshotWriter {
    fn observe(&mut self, _state: &SimState) {}

    fn at_mark(&mut self, state: &SimState, _index: usize) {
        self.write(state);
    }

    fn finish(&mut self, state: &SimState, event: &Event) {
        if self.on_event && !event.kind.is_regular() && state.is_finite() {
            self.write(state);
        }
    }
}

pub fn report_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report is serializable");
    s.push('\n');
    s
}

/// Writes `series.csv`, `report.txt` and `report.json` into `dir`.
pub fn write_report_files(dir: &Path, report: &RunReport) -> Result<()> {
    fs::write(dir.join(SERIES_FILE), series_csv(&report.series, &report.p_norms))?;
    fs::write(dir.join(REPORT_TEXT_FILE), report.to_text())?;
    fs::write(dir.join(REPORT_JSON_FILE), report_json(report))?;
    Ok(())
}
