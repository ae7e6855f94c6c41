//! Argument types, resolved run configuration and table generation for the
//! `telewig` binary.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use telewig_core::channel::{
    build_map, compensating_params, origin_squeezed_fock1, origin_symmetric, threshold_unconditional, InputState,
};
use telewig_core::conditional::{
    optimal_conditional_gain, origin_disk_attenuated, origin_pointlimit_attenuated, success_prob_disk_attenuated,
    DiskRegion, CONDITIONAL_GAIN_BRACKET,
};
use telewig_core::gain::{minimize_numeric, optimal_gain, optimal_gain_for, ralph_gain};
use telewig_core::noisy::{
    density_attenuated, origin_point_attenuated, origin_square_fock1, success_prob_square, threshold_point,
    threshold_square, SquareRegion,
};
use telewig_core::num_complex::Complex64;
use telewig_core::phase_space::{
    noise_excess_db, noise_from_db, r_from_db, squeeze_db, vsq_from_r, NoisyEprSpec, SqueezeSpec,
};
use telewig_core::verify::{run_verification, VerificationReport, VerifyConfig};
use telewig_core::Error as CoreError;

/// Failure categories, mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad or inconsistent arguments (exit 2).
    Usage(String),
    /// A computation failed (exit 1).
    Compute(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(m) => write!(f, "computation failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. } | CoreError::NoThreshold { .. } | CoreError::Unphysical(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Compute(e.to_string()),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn parse_f64(s: &str, what: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("invalid {what} '{s}'"))
}

/// `a:b:step` or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn single(v: f64) -> Self {
        Self {
            start: v,
            stop: v,
            step: 1.0,
        }
    }

    /// Grid points from `start` towards `stop`, inclusive up to rounding.
    pub fn points(&self) -> Vec<f64> {
        if self.start == self.stop {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        if self.step == 0.0 || span.signum() != self.step.signum() {
            return vec![];
        }
        let n = (span / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(Range::single(parse_f64(v, "value")?)),
            [a, b, step] => Ok(Range {
                start: parse_f64(a, "range start")?,
                stop: parse_f64(b, "range stop")?,
                step: parse_f64(step, "range step")?,
            }),
            _ => Err(format!("expected 'a:b:step' or a single value, got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSel {
    Fock1,
    /// Squeezed single photon `S(t)|1⟩`, teleported with the compensating protocol.
    Sqfock1 {
        t: f64,
    },
    Attenuated {
        eta: f64,
    },
}

impl FromStr for StateSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "fock1" => Ok(StateSel::Fock1),
            Some(("sqfock1", t)) => Ok(StateSel::Sqfock1 {
                t: parse_f64(t, "squeezing t")?,
            }),
            Some(("attenuated", e)) => {
                let eta = parse_f64(e, "eta")?;
                if !(0.0..=1.0).contains(&eta) {
                    return Err(format!("eta must lie in [0, 1], got {eta}"));
                }
                Ok(StateSel::Attenuated { eta })
            }
            _ => Err(format!("unknown state '{s}' (fock1 | sqfock1:<t> | attenuated:<eta>)")),
        }
    }
}

impl StateSel {
    fn input(&self) -> InputState {
        match *self {
            StateSel::Attenuated { eta } => InputState::Attenuated { eta },
            _ => InputState::Fock1,
        }
    }

    fn eta(&self) -> f64 {
        self.input().eta()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum GainMode {
    Unity,
    Optimal,
    Fixed {
        g: f64,
    },
    /// `G = coth 2r`.
    Ralph,
}

impl FromStr for GainMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unity" => Ok(GainMode::Unity),
            "optimal" => Ok(GainMode::Optimal),
            "ralph" => Ok(GainMode::Ralph),
            _ => match s.split_once('=') {
                Some(("G" | "g", v)) => {
                    let g = parse_f64(v, "gain")?;
                    if g < 0.0 {
                        return Err(format!("gain must be non-negative, got {g}"));
                    }
                    Ok(GainMode::Fixed { g })
                }
                _ => Err(format!("unknown gain '{s}' (unity | optimal | G=<x> | ralph)")),
            },
        }
    }
}

impl GainMode {
    fn label(&self) -> &'static str {
        match self {
            GainMode::Unity => "unity",
            GainMode::Optimal => "optimal",
            GainMode::Fixed { .. } => "fixed",
            GainMode::Ralph => "ralph",
        }
    }

    /// Gain for the non-optimizing modes.
    fn fixed_value(&self, r: f64) -> Result<Option<f64>, CliError> {
        Ok(match *self {
            GainMode::Unity => Some(1.0),
            GainMode::Fixed { g } => Some(g),
            GainMode::Ralph => Some(ralph_gain(r)?),
            GainMode::Optimal => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionSel {
    None,
    Disk { k: f64 },
    Point,
    Square { a: f64 },
}

impl FromStr for RegionSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let positive = |v: &str, what: &str| {
            let x = parse_f64(v, what)?;
            if x > 0.0 {
                Ok(x)
            } else {
                Err(format!("{what} must be positive, got {x}"))
            }
        };
        match s.split_once(':') {
            None if s == "point" => Ok(RegionSel::Point),
            None if s == "none" => Ok(RegionSel::None),
            Some(("disk", k)) => Ok(RegionSel::Disk {
                k: positive(k, "disk radius")?,
            }),
            Some(("square", a)) => Ok(RegionSel::Square {
                a: positive(a, "square half-side")?,
            }),
            _ => Err(format!("unknown region '{s}' (disk:<K> | point | square:<a>)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table {
    Table1,
    Table2,
    Fig6,
}

impl FromStr for Table {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table1" => Ok(Table::Table1),
            "table2" => Ok(Table::Table2),
            "fig6" => Ok(Table::Fig6),
            _ => Err(format!("unknown table '{s}' (table1 | table2 | fig6)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (csv | json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Sweep,
    Threshold,
    Conditional,
    Noisy,
    Verify,
}

/// Squeezing axis: decibels or the squeezing parameter `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "unit", rename_all = "snake_case")]
pub enum SqueezeAxis {
    Db(Range),
    R(Range),
}

impl SqueezeAxis {
    /// `(dB, r)` pairs in grid order.
    fn points(&self) -> Vec<(f64, f64)> {
        match self {
            SqueezeAxis::Db(rg) => rg.points().into_iter().map(|db| (db, r_from_db(db) + 0.0)).collect(),
            SqueezeAxis::R(rg) => rg
                .points()
                .into_iter()
                .map(|r| (squeeze_db(vsq_from_r(r)).unwrap_or(f64::NAN), r))
                .collect(),
        }
    }
}

/// Noise excess axis: decibels or `N = 2 V_sq V_an`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "unit", rename_all = "snake_case")]
pub enum NoiseAxis {
    Db(Range),
    N(Range),
}

impl NoiseAxis {
    /// `(dB, N)` pairs in grid order.
    fn points(&self) -> Vec<(f64, f64)> {
        match self {
            NoiseAxis::Db(rg) => rg.points().into_iter().map(|db| (db, noise_from_db(db))).collect(),
            NoiseAxis::N(rg) => rg
                .points()
                .into_iter()
                .map(|n| (noise_excess_db(n).unwrap_or(f64::NAN), n))
                .collect(),
        }
    }
}

/// Fully resolved configuration; echoed in JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub state: StateSel,
    pub squeeze: SqueezeAxis,
    pub noise: NoiseAxis,
    pub gains: Vec<GainMode>,
    pub region: RegionSel,
    pub eta: Range,
    pub table: Option<Table>,
    pub format: Format,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub slow: bool,
    pub perturb: f64,
}

impl RunConfig {
    /// Defaults for a command, before any flags are applied.
    pub fn defaults(command: CommandKind) -> Self {
        let noise_default = match command {
            CommandKind::Noisy => Range::single(2.0),
            _ => Range {
                start: 0.0,
                stop: 5.0,
                step: 1.0,
            },
        };
        Self {
            command,
            state: StateSel::Fock1,
            squeeze: SqueezeAxis::Db(Range {
                start: -15.0,
                stop: -0.5,
                step: 0.5,
            }),
            noise: NoiseAxis::Db(noise_default),
            gains: vec![GainMode::Optimal],
            region: RegionSel::None,
            eta: Range::single(1.0),
            table: None,
            format: Format::Csv,
            seed: VerifyConfig::default().seed,
            samples: VerifyConfig::default().mc_samples,
            tolerance: VerifyConfig::default().tolerance,
            slow: false,
            perturb: 0.0,
        }
    }

    fn single_eta(&self) -> Result<f64, CliError> {
        let pts = self.eta.points();
        match pts.as_slice() {
            [e] if (0.0..=1.0).contains(e) => Ok(*e),
            [e] => usage(format!("eta must lie in [0, 1], got {e}")),
            _ => usage("this command takes a single --eta value"),
        }
    }
}

/// One output cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
    Int(u64),
    Bool(bool),
}

impl Cell {
    /// Ten significant digits, dot decimal separator.
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(v) if v.is_nan() => "NaN".into(),
            // `+ 0.0` folds −0 into 0.
            Cell::Num(v) => format!("{:.9e}", v + 0.0),
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

fn num(v: f64) -> Cell {
    Cell::Num(v)
}

fn text(s: &str) -> Cell {
    Cell::Text(s.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableOut {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Set when a verification suite failed.
    pub failed: bool,
    pub report: Option<VerificationReport>,
}

impl TableOut {
    fn new(columns: Vec<&'static str>, rows: Vec<Vec<Cell>>) -> Self {
        Self {
            columns,
            rows,
            failed: false,
            report: None,
        }
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self, config: &RunConfig) -> Result<String, CliError> {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| {
                        (
                            c.to_string(),
                            serde_json::to_value(v).unwrap_or(serde_json::Value::Null),
                        )
                    })
                    .collect()
            })
            .collect();
        let mut doc = serde_json::json!({ "config": config, "columns": self.columns, "rows": rows });
        if let Some(report) = &self.report {
            doc["passed"] = serde_json::Value::Bool(report.passed());
        }
        serde_json::to_string_pretty(&doc)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Evaluate rows in parallel, keeping grid order.
fn par_rows<T: Sync, F>(items: &[T], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(&T) -> Result<Vec<Vec<Cell>>, CliError> + Sync + Send,
{
    let chunks = items.par_iter().map(f).collect::<Result<Vec<_>, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn nonempty<T>(v: Vec<T>, what: &str) -> Result<Vec<T>, CliError> {
    if v.is_empty() {
        usage(format!("empty {what} range"))
    } else {
        Ok(v)
    }
}

/// Unconditional origin value and the gain used, `NaN` when the optimizer has no interior minimum.
fn unconditional(state: StateSel, r: f64, mode: GainMode) -> Result<(f64, f64), CliError> {
    let gain = match mode.fixed_value(r)? {
        Some(g) => g,
        None => match state {
            // No entanglement: the cubic is undefined, fall back to a bounded search.
            _ if r == 0.0 => minimize_numeric(
                |g| origin_symmetric(0.0, g, state.input()),
                CONDITIONAL_GAIN_BRACKET.0,
                CONDITIONAL_GAIN_BRACKET.1,
            )
            .map(|m| m.arg),
            StateSel::Fock1 | StateSel::Sqfock1 { .. } => optimal_gain(r).map(|o| o.gain),
            StateSel::Attenuated { .. } => optimal_gain_for(r, state.input()).map(|m| m.arg),
        }
        .or_else(|e| match e {
            CoreError::NoBracket { arg, .. } => Ok(arg),
            e => Err(e),
        })?,
    };
    let w = match state {
        StateSel::Sqfock1 { t } => {
            let map = build_map(&compensating_params(SqueezeSpec::new(r)?, t, gain)?);
            origin_squeezed_fock1(&map, t)
        }
        _ => origin_symmetric(r, gain, state.input()),
    };
    Ok((gain, w))
}

/// Conditional disk result `(gain, P, W)` with the gain chosen by `mode`.
fn conditional_disk(lambda: f64, r: f64, k: f64, eta: f64, mode: GainMode) -> Result<(f64, f64, f64), CliError> {
    let region = DiskRegion::new(k)?;
    match mode.fixed_value(r)? {
        Some(g) => Ok((
            g,
            success_prob_disk_attenuated(lambda, region, eta),
            origin_disk_attenuated(lambda, g, region, eta),
        )),
        None => match optimal_conditional_gain(lambda, region, eta) {
            Ok(o) => Ok((o.gain, o.success, o.origin)),
            // No interior minimum: report the best boundary point.
            Err(CoreError::NoBracket { arg, value }) => {
                Ok((arg, success_prob_disk_attenuated(lambda, region, eta), value))
            }
            Err(e) => Err(e.into()),
        },
    }
}

fn cmd_sweep(cfg: &RunConfig) -> Result<TableOut, CliError> {
    let pts = nonempty(cfg.squeeze.points(), "squeezing")?;
    if matches!(cfg.state, StateSel::Sqfock1 { .. }) && cfg.region != RegionSel::None {
        return usage("conditional rows are only available for fock1 and attenuated inputs");
    }
    if matches!(cfg.region, RegionSel::Square { .. }) {
        return usage("square regions belong to the noisy command");
    }
    let eta = cfg.state.eta();
    let rows = par_rows(&pts, |&(db, r)| {
        let mut out = Vec::new();
        for mode in &cfg.gains {
            let (g, w) = unconditional(cfg.state, r, *mode)?;
            out.push(vec![num(db), num(r), text(mode.label()), num(g), num(w), num(1.0)]);
        }
        let lambda = r.tanh();
        match cfg.region {
            RegionSel::Disk { k } => {
                let (g, p, w) = conditional_disk(lambda, r, k, eta, GainMode::Optimal)?;
                out.push(vec![num(db), num(r), text("conditional"), num(g), num(w), num(p)]);
            }
            RegionSel::Point => {
                let w = origin_pointlimit_attenuated(lambda, eta);
                out.push(vec![
                    num(db),
                    num(r),
                    text("conditional-point"),
                    num(f64::NAN),
                    num(w),
                    num(0.0),
                ]);
            }
            _ => {}
        }
        Ok(out)
    })?;
    Ok(TableOut::new(
        vec!["vsq_db", "r", "protocol", "gain", "w_origin", "p_success"],
        rows,
    ))
}

fn cmd_conditional(cfg: &RunConfig) -> Result<TableOut, CliError> {
    let pts = nonempty(cfg.squeeze.points(), "squeezing")?;
    let eta = match cfg.state {
        StateSel::Sqfock1 { .. } => return usage("conditional teleportation takes fock1 or attenuated inputs"),
        s => s.eta(),
    };
    let region = match cfg.region {
        RegionSel::None => RegionSel::Disk { k: 0.3 },
        RegionSel::Square { .. } => return usage("square regions belong to the noisy command"),
        r => r,
    };
    let rows = par_rows(&pts, |&(db, r)| {
        let lambda = r.tanh();
        let mut out = Vec::new();
        for mode in &cfg.gains {
            let (g, p, w) = match region {
                RegionSel::Disk { k } => conditional_disk(lambda, r, k, eta, *mode)?,
                _ => (f64::NAN, 0.0, origin_pointlimit_attenuated(lambda, eta)),
            };
            out.push(vec![num(db), num(r), text(mode.label()), num(g), num(p), num(w)]);
        }
        Ok(out)
    })?;
    Ok(TableOut::new(
        vec!["vsq_db", "r", "gain_mode", "gain", "p_success", "w_origin"],
        rows,
    ))
}

fn cmd_noisy(cfg: &RunConfig) -> Result<TableOut, CliError> {
    let pts = nonempty(cfg.squeeze.points(), "squeezing")?;
    let noise = nonempty(cfg.noise.points(), "noise excess")?;
    let eta = cfg.single_eta()?;
    let region = match cfg.region {
        RegionSel::None => RegionSel::Point,
        RegionSel::Disk { .. } => return usage("the noisy command supports point and square regions"),
        r => r,
    };
    if matches!(region, RegionSel::Square { .. }) && eta != 1.0 {
        return usage("the square region is available for the single-photon input only (eta = 1)");
    }
    let gain = match cfg.gains.as_slice() {
        [GainMode::Unity] | [GainMode::Optimal] => 1.0,
        [GainMode::Fixed { g }] => *g,
        _ => return usage("the noisy command takes --gain unity or --gain G=<x>"),
    };
    let grid: Vec<((f64, f64), (f64, f64))> = pts.iter().flat_map(|&s| noise.iter().map(move |&n| (s, n))).collect();
    let rows = par_rows(&grid, |&((db, r), (n_db, n))| {
        let spec = NoisyEprSpec::from_noise(vsq_from_r(r), n)?;
        let (p, w) = match region {
            RegionSel::Square { a } => {
                let sq = SquareRegion::new(a)?;
                (
                    success_prob_square(sq, spec.mean_photons()),
                    origin_square_fock1(&spec, gain, sq),
                )
            }
            _ => (
                density_attenuated(Complex64::new(0.0, 0.0), spec.mean_photons(), eta),
                origin_point_attenuated(&spec, eta).unwrap_or(f64::NAN),
            ),
        };
        Ok(vec![vec![num(db), num(n_db), num(gain), num(p), num(w)]])
    })?;
    Ok(TableOut::new(
        vec!["vsq_db", "noise_db", "gain", "probability", "w_origin"],
        rows,
    ))
}

fn cmd_threshold(cfg: &RunConfig) -> Result<TableOut, CliError> {
    match cfg.table {
        Some(Table::Table1) => {
            let eta = cfg.single_eta()?;
            let noise = nonempty(cfg.noise.points(), "noise excess")?;
            let rows = noise
                .iter()
                .map(|&(n_db, n)| {
                    let th = threshold_point(eta, n)?;
                    Ok(vec![num(n_db), num(th.v_th), num(th.db()), num(th.db_inf())])
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(TableOut::new(vec!["noise_db", "vth", "vth_db", "vth_inf_db"], rows))
        }
        Some(Table::Table2) => {
            let a = match cfg.region {
                RegionSel::None => 0.3,
                RegionSel::Square { a } => a,
                _ => return usage("table2 uses a square region (--region square:<a>)"),
            };
            let gain = match cfg.gains.as_slice() {
                [GainMode::Unity] | [GainMode::Optimal] => 1.0,
                [GainMode::Fixed { g }] => *g,
                _ => return usage("table2 takes --gain unity or --gain G=<x>"),
            };
            let region = SquareRegion::new(a)?;
            let noise = nonempty(cfg.noise.points(), "noise excess")?;
            let rows = par_rows(&noise, |&(n_db, n)| {
                let v = threshold_square(n, gain, region)?;
                Ok(vec![vec![num(n_db), num(gain), num(v), num(squeeze_db(v)?)]])
            })?;
            Ok(TableOut::new(vec!["noise_db", "gain", "vth", "vth_db"], rows))
        }
        Some(Table::Fig6) => {
            let etas = nonempty(cfg.eta.points(), "eta")?;
            let rows = par_rows(&etas, |&eta| {
                let th = threshold_unconditional(eta)?;
                Ok(vec![vec![
                    num(eta),
                    num(th.db_gain()),
                    num(th.db_unity()),
                    num(th.db_gain() - th.db_unity()),
                ]])
            })?;
            Ok(TableOut::new(
                vec!["eta", "vth_gain_db", "vth_unity_db", "difference_db"],
                rows,
            ))
        }
        None => {
            let eta = cfg.single_eta()?;
            let th = threshold_unconditional(eta)?;
            let mut rows = vec![
                vec![text("unconditional-optimal"), num(th.r_gain), num(th.db_gain())],
                vec![text("unconditional-unity"), num(th.r_unity), num(th.db_unity())],
            ];
            if let RegionSel::Disk { k } = cfg.region {
                let db = telewig_core::conditional::threshold_disk_attenuated(eta, DiskRegion::new(k)?, -20.0, -0.5)?;
                rows.push(vec![text("conditional-optimal"), num(r_from_db(db)), num(db)]);
            }
            Ok(TableOut::new(vec!["protocol", "r_th", "vth_db"], rows))
        }
    }
}

fn cmd_verify(cfg: &RunConfig) -> Result<TableOut, CliError> {
    let vc = VerifyConfig {
        mc_samples: cfg.samples,
        seed: cfg.seed,
        perturbation: cfg.perturb,
        slow: cfg.slow,
        tolerance: cfg.tolerance,
    };
    if vc.mc_samples < telewig_core::oracle::mc::MIN_SAMPLES {
        return usage(format!(
            "--samples must be at least {}",
            telewig_core::oracle::mc::MIN_SAMPLES
        ));
    }
    let report = run_verification(&vc);
    let rows = report
        .suites
        .iter()
        .map(|s| {
            vec![
                text(&s.name),
                Cell::Int(s.points as u64),
                num(s.max_deviation),
                num(s.tolerance),
                text(match s.unit {
                    telewig_core::verify::DeviationUnit::Absolute => "absolute",
                    telewig_core::verify::DeviationUnit::Sigma => "sigma",
                }),
                Cell::Bool(s.passed),
            ]
        })
        .collect();
    let mut out = TableOut::new(
        vec!["suite", "points", "max_deviation", "tolerance", "unit", "passed"],
        rows,
    );
    out.failed = !report.passed();
    out.report = Some(report);
    Ok(out)
}

pub fn run(cfg: &RunConfig) -> Result<TableOut, CliError> {
    match cfg.command {
        CommandKind::Sweep => cmd_sweep(cfg),
        CommandKind::Threshold => cmd_threshold(cfg),
        CommandKind::Conditional => cmd_conditional(cfg),
        CommandKind::Noisy => cmd_noisy(cfg),
        CommandKind::Verify => cmd_verify(cfg),
    }
}

/// Render in the configured format.
pub fn render(cfg: &RunConfig, out: &TableOut) -> Result<String, CliError> {
    match cfg.format {
        Format::Csv => out.to_csv(),
        Format::Json => out.to_json(cfg),
    }
}
