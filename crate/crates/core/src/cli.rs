//! Sweeps and reports behind the `xxchain` binary: grid scans, derivative
//! peaks at the critical field, entanglement onset search, oracle
//! validation suites and CSV/JSON emission.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::ed_oracle::{self, FiniteChainSpec};
use crate::error::{Error, Result};
use crate::format::significant;
use crate::free_fermion::ModelParams;
use crate::measures::{
    self, all_measures, coherence_bruteforce, discord_bruteforce, AngularGrid, CorrelationReport,
};
use crate::wick;

pub const TOOL_NAME: &str = "xxchain";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Significant digits in CSV/JSON output.
pub const OUTPUT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Measure {
    Concurrence,
    MutualInfo,
    Cc,
    Qd,
    Qc,
}

impl Measure {
    /// Column order of the CSV schema.
    pub const ALL: [Measure; 5] = [
        Measure::Concurrence,
        Measure::MutualInfo,
        Measure::Cc,
        Measure::Qd,
        Measure::Qc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Concurrence => "concurrence",
            Measure::MutualInfo => "mutual_info",
            Measure::Cc => "cc",
            Measure::Qd => "qd",
            Measure::Qc => "qc",
        }
    }

    pub fn of(self, report: &CorrelationReport) -> f64 {
        match self {
            Measure::Concurrence => report.concurrence,
            Measure::MutualInfo => report.mutual_information,
            Measure::Cc => report.classical_correlations,
            Measure::Qd => report.quantum_discord,
            Measure::Qc => report.quantum_coherence,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "concurrence" | "c" => Ok(Measure::Concurrence),
            "mutual_info" | "mi" => Ok(Measure::MutualInfo),
            "cc" => Ok(Measure::Cc),
            "qd" => Ok(Measure::Qd),
            "qc" => Ok(Measure::Qc),
            other => Err(Error::InvalidGrid(format!("unknown measure '{other}'"))),
        }
    }
}

/// Parses a comma-separated measure list, keeping schema order.
pub fn parse_measures(list: &str) -> Result<Vec<Measure>> {
    let wanted = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(Measure::from_str)
        .collect::<Result<Vec<_>>>()?;
    let ordered: Vec<Measure> = Measure::ALL.into_iter().filter(|m| wanted.contains(m)).collect();
    if ordered.is_empty() {
        return Err(Error::InvalidGrid("no measures requested".to_string()));
    }
    Ok(ordered)
}

pub fn parse_separations(list: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in list.split(',').filter(|s| !s.trim().is_empty()) {
        let m: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::InvalidGrid(format!("bad separation '{part}'")))?;
        if !(1..=4).contains(&m) {
            return Err(Error::UnsupportedSeparation(m));
        }
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidGrid("no separations requested".to_string()));
    }
    out.sort_unstable();
    Ok(out)
}

/// `start:stop:steps`, endpoints included. A single value is a one-point axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl AxisRange {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::InvalidGrid(format!("non-finite range {start}:{stop}")));
        }
        match steps {
            0 => Err(Error::InvalidGrid("axis needs at least one step".to_string())),
            1 if start != stop => Err(Error::InvalidGrid(format!(
                "swept axis {start}:{stop} needs >= 2 steps"
            ))),
            _ => Ok(Self { start, stop, steps }),
        }
    }

    pub fn single(value: f64) -> Result<Self> {
        Self::new(value, value, 1)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let t = i as f64 / last;
                self.start + (self.stop - self.start) * t
            })
            .collect()
    }
}

impl FromStr for AxisRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |p: &str| {
            p.parse::<f64>()
                .map_err(|_| Error::InvalidGrid(format!("bad number '{p}' in range '{s}'")))
        };
        match parts.as_slice() {
            [v] => Self::single(num(v)?),
            [a, b, n] => {
                let steps = n
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidGrid(format!("bad step count '{n}' in range '{s}'")))?;
                Self::new(num(a)?, num(b)?, steps)
            }
            _ => Err(Error::InvalidGrid(format!("range '{s}' is not start:stop:steps"))),
        }
    }
}

impl fmt::Display for AxisRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub coupling: f64,
    pub fields: AxisRange,
    pub temperatures: AxisRange,
    pub separations: Vec<usize>,
    pub measures: Vec<Measure>,
}

impl ScanGrid {
    pub fn new(
        coupling: f64,
        fields: AxisRange,
        temperatures: AxisRange,
        separations: Vec<usize>,
        measures: Vec<Measure>,
    ) -> Result<Self> {
        if temperatures.start < 0.0 || temperatures.stop < 0.0 {
            return Err(Error::InvalidGrid("temperatures must be >= 0".to_string()));
        }
        if separations.is_empty() || measures.is_empty() {
            return Err(Error::InvalidGrid("empty separation or measure list".to_string()));
        }
        if let Some(&m) = separations.iter().find(|m| !(1..=4).contains(*m)) {
            return Err(Error::UnsupportedSeparation(m));
        }
        ModelParams::new(coupling, 0.0, 0.0)?;
        Ok(Self {
            coupling,
            fields,
            temperatures,
            separations,
            measures,
        })
    }

    pub fn len(&self) -> usize {
        self.fields.steps * self.temperatures.steps * self.separations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub temperature: f64,
    pub field: f64,
    pub separation: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub coupling: f64,
    pub h_range: String,
    pub t_range: String,
    pub separations: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub measures: Vec<Measure>,
    pub rows: Vec<ScanRow>,
    pub meta: Provenance,
}

impl ScanTable {
    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["T", "h", "m"];
        h.extend(self.measures.iter().map(|m| m.name()));
        h
    }
}

fn at_point(temperature: f64, field: f64, separation: usize) -> impl FnOnce(Error) -> Error {
    move |e| Error::AtPoint {
        temperature,
        field,
        separation,
        source: Box::new(e),
    }
}

fn evaluate(coupling: f64, temperature: f64, field: f64, m: usize) -> Result<CorrelationReport> {
    let params = ModelParams::new(coupling, field, temperature)?;
    all_measures(&params, m).map_err(at_point(temperature, field, m))
}

/// Evaluates every grid point on the current rayon pool. Rows come out
/// ordered by (T, h, m) index regardless of scheduling.
pub fn scan(grid: &ScanGrid, seed: u64) -> Result<ScanTable> {
    let temperatures = grid.temperatures.values();
    let fields = grid.fields.values();
    let points: Vec<(f64, f64, usize)> = temperatures
        .iter()
        .flat_map(|&t| {
            fields
                .iter()
                .flat_map(move |&h| grid.separations.iter().map(move |&m| (t, h, m)))
        })
        .collect();

    let rows = points
        .par_iter()
        .map(|&(t, h, m)| {
            let report = evaluate(grid.coupling, t, h, m)?;
            let values: Vec<f64> = grid.measures.iter().map(|x| x.of(&report)).collect();
            if values.iter().any(|v| !v.is_finite()) {
                return Err(at_point(t, h, m)(Error::Inconsistent("non-finite measure".to_string())));
            }
            Ok(ScanRow {
                temperature: t,
                field: h,
                separation: m,
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScanTable {
        measures: grid.measures.clone(),
        rows,
        meta: Provenance {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            seed,
            coupling: grid.coupling,
            h_range: grid.fields.to_string(),
            t_range: grid.temperatures.to_string(),
            separations: grid.separations.clone(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidGrid(format!("unknown format '{other}'"))),
        }
    }
}

fn number(x: f64) -> String {
    significant(x, OUTPUT_DIGITS)
}

/// CSV (header line, LF endings) or a JSON object with `meta` and `rows`.
pub fn emit<W: Write>(table: &ScanTable, format: OutputFormat, mut out: W) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{}", table.header().join(","))?;
            for row in &table.rows {
                let mut cells = vec![number(row.temperature), number(row.field), row.separation.to_string()];
                cells.extend(row.values.iter().map(|&v| number(v)));
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    obj.insert("T".into(), json!(row.temperature));
                    obj.insert("h".into(), json!(row.field));
                    obj.insert("m".into(), json!(row.separation));
                    for (m, v) in table.measures.iter().zip(&row.values) {
                        obj.insert(m.name().into(), json!(v));
                    }
                    Value::Object(obj)
                })
                .collect();
            let doc = json!({
                "meta": {
                    "tool": table.meta.tool,
                    "version": table.meta.version,
                    "seed": table.meta.seed,
                    "J": table.meta.coupling,
                    "h_range": table.meta.h_range,
                    "T_range": table.meta.t_range,
                    "separations": table.meta.separations,
                    "columns": table.header(),
                },
                "rows": rows,
            });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
    }
    out.flush()
}

/// Measure and its finite-difference derivative along `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct QptProfile {
    pub measure: Measure,
    pub separation: usize,
    pub temperature: f64,
    pub fields: Vec<f64>,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
    pub peak_field: f64,
    pub peak_derivative: f64,
}

impl QptProfile {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "h,{},derivative", self.measure.name())?;
        for ((h, v), d) in self.fields.iter().zip(&self.values).zip(&self.derivative) {
            writeln!(out, "{},{},{}", number(*h), number(*v), number(*d))?;
        }
        out.flush()
    }
}

/// Central differences inside, one-sided at the two ends.
pub fn finite_difference(values: &[f64], step: f64) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (values[1] - values[0]) / step
            } else if i == n - 1 {
                (values[n - 1] - values[n - 2]) / step
            } else {
                (values[i + 1] - values[i - 1]) / (2.0 * step)
            }
        })
        .collect()
}

/// Locates the peak of `|d(measure)/dh|` on an `h` grid of spacing `dh`.
pub fn qpt_locate(
    coupling: f64,
    temperature: f64,
    h_start: f64,
    h_stop: f64,
    dh: f64,
    measure: Measure,
    m: usize,
) -> Result<QptProfile> {
    if dh.is_nan() || dh <= 0.0 || h_stop.is_nan() || h_stop <= h_start {
        return Err(Error::InvalidGrid(format!(
            "need dh > 0 and start < stop (got {h_start}:{h_stop}, dh = {dh})"
        )));
    }
    let count = ((h_stop - h_start) / dh).round() as usize + 1;
    let interior = count.saturating_sub(2);
    if interior < 5 {
        return Err(Error::DegenerateRange(interior));
    }
    let fields: Vec<f64> = (0..count).map(|i| h_start + i as f64 * dh).collect();
    let values = fields
        .par_iter()
        .map(|&h| evaluate(coupling, temperature, h, m).map(|r| measure.of(&r)))
        .collect::<Result<Vec<_>>>()?;
    let derivative = finite_difference(&values, dh);
    let (peak, &peak_derivative) = derivative
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("non-empty profile");
    Ok(QptProfile {
        measure,
        separation: m,
        temperature,
        peak_field: fields[peak],
        peak_derivative,
        fields,
        values,
        derivative,
    })
}

/// Default threshold for "measure is non-zero".
pub const ONSET_THRESHOLD: f64 = 1e-9;

/// Smallest `h` in `[h_start, h_stop]` where `measure > threshold`, to
/// within `resolution`. A coarse sweep brackets the first crossing, then
/// bisection narrows it; the returned field is on the positive side.
#[allow(clippy::too_many_arguments)]
pub fn onset_locate(
    coupling: f64,
    temperature: f64,
    measure: Measure,
    m: usize,
    h_start: f64,
    h_stop: f64,
    resolution: f64,
    threshold: f64,
) -> Result<f64> {
    if resolution.is_nan() || resolution <= 0.0 || h_stop.is_nan() || h_stop <= h_start {
        return Err(Error::InvalidGrid(format!(
            "need resolution > 0 and start < stop (got {h_start}:{h_stop}, resolution = {resolution})"
        )));
    }
    let above = |h: f64| -> Result<bool> {
        Ok(measure.of(&evaluate(coupling, temperature, h, m)?) > threshold)
    };
    if above(h_start)? {
        return Ok(h_start);
    }
    let coarse = 400usize;
    let step = (h_stop - h_start) / coarse as f64;
    let flags = (1..=coarse)
        .into_par_iter()
        .map(|i| above(h_start + i as f64 * step))
        .collect::<Result<Vec<_>>>()?;
    let first = flags.iter().position(|&b| b).ok_or_else(|| {
        Error::NotFound(format!(
            "{measure} never exceeds {threshold} for h in [{h_start}, {h_stop}] (T = {temperature}, m = {m})"
        ))
    })?;
    let mut lo = h_start + first as f64 * step;
    let mut hi = h_start + (first + 1) as f64 * step;
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Wick,
    Discord,
    Coherence,
    Spectrum,
    FiniteSize,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Wick,
        Suite::Discord,
        Suite::Coherence,
        Suite::Spectrum,
        Suite::FiniteSize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Wick => "wick",
            Suite::Discord => "discord",
            Suite::Coherence => "coherence",
            Suite::Spectrum => "spectrum",
            Suite::FiniteSize => "finite_size",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s.trim())
            .ok_or_else(|| Error::InvalidGrid(format!("unknown validation suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn below(label: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Self {
            label: label.into(),
            deviation,
            tolerance,
            passed: deviation < tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {} {}: deviation {:.3e} (tolerance {:.0e})",
                if c.passed { "PASS" } else { "FAIL" },
                self.suite.name(),
                c.label,
                c.deviation,
                c.tolerance
            )?;
        }
        write!(
            f,
            "{} {}",
            self.suite.name(),
            if self.passed() { "passed" } else { "FAILED" }
        )
    }
}

/// `(T, h)` grid shared by the discord and coherence suites:
/// 20 × 20 points over `[0.05, 2] × [0, 1.5]`.
pub fn oracle_grid() -> Vec<(f64, f64)> {
    let temperatures = AxisRange::new(0.05, 2.0, 20).expect("static range").values();
    let fields = AxisRange::new(0.0, 1.5, 20).expect("static range").values();
    temperatures
        .iter()
        .flat_map(|&t| fields.iter().map(move |&h| (t, h)))
        .collect()
}

fn max_over_grid<F>(m: usize, f: F) -> Result<f64>
where
    F: Fn(&crate::rdm::TwoSiteRDM) -> Result<f64> + Sync,
{
    let devs = oracle_grid()
        .par_iter()
        .map(|&(t, h)| {
            let rdm = measures::two_site_state(&ModelParams::unit_coupling(h, t)?, m)
                .map_err(at_point(t, h, m))?;
            f(&rdm).map_err(at_point(t, h, m))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

/// Element-wise deviation between the thermal ring and the infinite chain.
pub fn finite_size_deviation(sites: usize, temperature: f64, field: f64, m: usize) -> Result<f64> {
    let params = ModelParams::unit_coupling(field, temperature)?;
    let ring = ed_oracle::thermal_two_site_rdm(&FiniteChainSpec::new(sites, params)?, m)?;
    let bulk = measures::two_site_state(&params, m)?;
    let (a, b) = (ring.elements(), bulk.elements());
    Ok([
        a.x_plus - b.x_plus,
        a.x_minus - b.x_minus,
        a.y_plus - b.y_plus,
        a.y_minus - b.y_minus,
        a.z - b.z,
    ]
    .into_iter()
    .map(f64::abs)
    .fold(0.0, f64::max))
}

pub fn validate(suite: Suite, seed: u64) -> Result<ValidationReport> {
    let checks = match suite {
        Suite::Wick => (2..=4)
            .map(|m| Ok(Check::below(format!("m={m}"), wick::wick_identity_check(m, 100, seed)?, 1e-12)))
            .collect::<Result<Vec<_>>>()?,
        Suite::Discord => (2..=4)
            .map(|m| {
                let dev = max_over_grid(m, |rdm| {
                    let qd = measures::quantum_discord(rdm)?;
                    Ok((qd - discord_bruteforce(rdm, AngularGrid::default())).abs())
                })?;
                Ok(Check::below(format!("m={m} closed form vs measurement scan"), dev, 1e-6))
            })
            .collect::<Result<Vec<_>>>()?,
        Suite::Coherence => (2..=4)
            .map(|m| {
                let dev = max_over_grid(m, |rdm| {
                    Ok((measures::quantum_coherence(rdm)? - coherence_bruteforce(rdm)).abs())
                })?;
                Ok(Check::below(format!("m={m} explicit vs dense JSD"), dev, 1e-10))
            })
            .collect::<Result<Vec<_>>>()?,
        Suite::Spectrum => {
            let mut checks = Vec::new();
            for n in 2..=12 {
                let mut worst = 0.0f64;
                for h in [0.0, 0.5, 1.0, 1.5] {
                    let spec = FiniteChainSpec::new(n, ModelParams::unit_coupling(h, 0.0)?)?;
                    worst = worst.max(ed_oracle::spectrum_match(&spec)?.max_abs_deviation);
                }
                checks.push(Check::below(format!("N={n} spin vs fermion"), worst, 1e-9));
            }
            checks
        }
        Suite::FiniteSize => {
            let dev8 = finite_size_deviation(8, 1.0, 0.5, 2)?;
            let dev12 = finite_size_deviation(12, 1.0, 0.5, 2)?;
            vec![
                Check::below("N=12 vs infinite chain (T=1, h=0.5, m=2)", dev12, 0.05),
                Check {
                    label: format!("N=12 closer than N=8 (N=8 deviation {dev8:.3e})"),
                    deviation: dev12,
                    tolerance: dev8,
                    passed: dev12 < dev8,
                },
            ]
        }
    };
    Ok(ValidationReport { suite, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(h: &str, t: &str, ms: &[usize]) -> ScanGrid {
        ScanGrid::new(1.0, h.parse().unwrap(), t.parse().unwrap(), ms.to_vec(), Measure::ALL.to_vec()).unwrap()
    }

    #[test]
    fn axis_parsing() {
        let a: AxisRange = "0:1:3".parse().unwrap();
        assert_eq!(a.values(), vec![0.0, 0.5, 1.0]);
        let b: AxisRange = "-1:1:5".parse().unwrap();
        assert_eq!(b.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!("0.3".parse::<AxisRange>().unwrap().values(), vec![0.3]);
        assert!("0:1:1".parse::<AxisRange>().is_err());
        assert!("0:1".parse::<AxisRange>().is_err());
        assert!("a:1:3".parse::<AxisRange>().is_err());
        assert!("0:inf:3".parse::<AxisRange>().is_err());
    }

    #[test]
    fn grid_validation() {
        let h: AxisRange = "0:1:3".parse().unwrap();
        assert!(ScanGrid::new(1.0, h, "-1:1:3".parse().unwrap(), vec![2], vec![Measure::Qd]).is_err());
        assert!(ScanGrid::new(1.0, h, "0:1:3".parse().unwrap(), vec![5], vec![Measure::Qd]).is_err());
        assert!(ScanGrid::new(1.0, h, "0:1:3".parse().unwrap(), vec![], vec![Measure::Qd]).is_err());
        assert!(ScanGrid::new(0.0, h, "0:1:3".parse().unwrap(), vec![2], vec![Measure::Qd]).is_err());
    }

    #[test]
    fn measure_and_separation_lists() {
        assert_eq!(parse_measures("qc,concurrence").unwrap(), vec![Measure::Concurrence, Measure::Qc]);
        assert!(parse_measures("entropy").is_err());
        assert_eq!(parse_separations("4,2,2").unwrap(), vec![2, 4]);
        assert!(parse_separations("0").is_err());
    }

    #[test]
    fn single_hot_point() {
        let table = scan(&grid("0", "1000", &[2]), 42).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!(table.rows[0].values.iter().all(|v| v.abs() < 1e-5));
    }

    #[test]
    fn cardinality() {
        let table = scan(&grid("0:1:3", "0:1:3", &[2]), 42).unwrap();
        assert_eq!(table.rows.len(), 9);
        let table = scan(&grid("0:1.5:4", "0.01:1:3", &[2, 3, 4]), 42).unwrap();
        assert_eq!(table.rows.len(), 36);
        // rows ordered by (T, h, m)
        let keys: Vec<(f64, f64, usize)> =
            table.rows.iter().map(|r| (r.temperature, r.field, r.separation)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
        assert_eq!(keys, sorted);
    }

    #[test]
    fn csv_and_json_shapes() {
        let table = scan(&grid("0:1:3", "0:1:3", &[2]), 7).unwrap();
        let mut csv = Vec::new();
        emit(&table, OutputFormat::Csv, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(!text.contains('\r'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[0], "T,h,m,concurrence,mutual_info,cc,qd,qc");

        let mut js = Vec::new();
        emit(&table, OutputFormat::Json, &mut js).unwrap();
        let v: Value = serde_json::from_slice(&js).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 9);
        assert_eq!(v["meta"]["seed"], 7);

        let empty = ScanTable {
            rows: Vec::new(),
            ..table
        };
        let mut csv = Vec::new();
        emit(&empty, OutputFormat::Csv, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "T,h,m,concurrence,mutual_info,cc,qd,qc\n");
    }

    #[test]
    fn selected_columns_only() {
        let g = ScanGrid::new(1.0, "0:1:2".parse().unwrap(), "0.5".parse().unwrap(), vec![3], vec![Measure::Qd])
            .unwrap();
        let table = scan(&g, 1).unwrap();
        assert_eq!(table.header(), vec!["T", "h", "m", "qd"]);
        assert_eq!(table.rows[0].values.len(), 1);
    }

    #[test]
    fn finite_differences() {
        let v: Vec<f64> = (0..6).map(|i| (i * i) as f64).collect();
        let d = finite_difference(&v, 1.0);
        assert_eq!(d, vec![1.0, 2.0, 4.0, 6.0, 8.0, 9.0]);
    }

    #[test]
    fn qpt_needs_interior_points() {
        assert!(matches!(
            qpt_locate(1.0, 0.0, 0.9, 1.1, 0.05, Measure::Qd, 2),
            Err(Error::DegenerateRange(3))
        ));
        assert!(qpt_locate(1.0, 0.0, 1.1, 0.9, 0.01, Measure::Qd, 2).is_err());
    }

    #[test]
    fn qpt_peak_at_saturation_field() {
        let p = qpt_locate(1.0, 0.0, 0.8, 1.2, 2e-3, Measure::Qd, 2).unwrap();
        assert!((p.peak_field - 1.0).abs() <= 2e-3 + 1e-12, "{}", p.peak_field);
        let fine = qpt_locate(1.0, 0.0, 0.8, 1.2, 1e-3, Measure::Qd, 2).unwrap();
        assert!((fine.peak_field - 1.0).abs() <= 2e-3 + 1e-12);
    }

    #[test]
    fn onset_not_found_in_product_phase() {
        let r = onset_locate(1.0, 0.0, Measure::Concurrence, 2, 1.1, 2.0, 1e-4, ONSET_THRESHOLD);
        assert!(matches!(r, Err(Error::NotFound(_))));
    }

    #[test]
    fn second_neighbour_onset() {
        let h = onset_locate(1.0, 0.0, Measure::Concurrence, 2, 0.0, 1.5, 1e-5, ONSET_THRESHOLD).unwrap();
        assert!((h - 0.5).abs() < 0.01, "{h}");
    }

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn wick_suite_passes() {
        let r = validate(Suite::Wick, 42).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.checks.len(), 3);
    }
}
