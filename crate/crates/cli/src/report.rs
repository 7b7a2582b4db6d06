use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use gconvex_core::{ChebyshevSystem, Sampling, Tolerances};

use crate::args::Common;

/// Version tag of the structured document.
pub const SCHEMA: &str = "gconvex-report/1";

pub const DISCLAIMER: &str =
    "note: checked on the sampled grid only; a pass is necessary evidence, not a proof on the whole interval";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// A violated certificate, a failed sign pattern or a non-Chebyshev system.
    Failed,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed => 2,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SystemInfo {
    pub name: String,
    pub interval: String,
    pub basis: Vec<String>,
}

impl From<&ChebyshevSystem> for SystemInfo {
    fn from(s: &ChebyshevSystem) -> Self {
        SystemInfo {
            name: s.name().to_string(),
            interval: s.interval().to_string(),
            basis: s.basis().iter().map(|b| b.to_string()).collect(),
        }
    }
}

/// Everything needed to rerun the command.
#[derive(Debug, Serialize)]
pub struct Config {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    pub seed: u64,
    pub budget: usize,
    pub atol: f64,
    pub rtol: f64,
}

impl Config {
    pub fn new(common: &Common) -> Self {
        Config {
            system: None,
            f: None,
            grid: None,
            grid_points: None,
            seed: common.seed,
            budget: common.budget,
            atol: common.atol,
            rtol: common.rtol,
        }
    }

    pub fn sampling(&self) -> Sampling {
        Sampling {
            budget: self.budget,
            seed: self.seed,
        }
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            atol: self.atol,
            rtol: self.rtol,
        }
    }
}

pub struct Report {
    pub command: &'static str,
    pub config: Config,
    pub status: Status,
    pub result: Value,
    pub human: String,
    pub columns: Option<Vec<ColumnRow>>,
}

#[derive(Serialize)]
struct Document<'a> {
    schema: &'static str,
    command: &'static str,
    status: Status,
    exit_code: u8,
    config: &'a Config,
    result: &'a Value,
}

impl Report {
    pub fn structured(&self) -> String {
        let doc = Document {
            schema: SCHEMA,
            command: self.command,
            status: self.status,
            exit_code: self.status.exit_code(),
            config: &self.config,
            result: &self.result,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn human(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        writeln!(s, "command: {}", self.command).unwrap();
        if let Some(sys) = &c.system {
            writeln!(s, "system: {} on {} ({})", sys.name, sys.interval, sys.basis.join(", ")).unwrap();
        }
        if let Some(f) = &c.f {
            writeln!(s, "f: {f}").unwrap();
        }
        if let (Some(g), Some(m)) = (&c.grid, c.grid_points) {
            writeln!(s, "grid: {g} ({m} points)").unwrap();
        }
        writeln!(
            s,
            "seed: {}  budget: {}  atol: {:e}  rtol: {:e}",
            c.seed, c.budget, c.atol, c.rtol
        )
        .unwrap();
        s.push_str(&self.human);
        if !s.ends_with('\n') {
            s.push('\n');
        }
        writeln!(
            s,
            "status: {}",
            match self.status {
                Status::Ok => "ok",
                Status::Failed => "failed",
            }
        )
        .unwrap();
        s
    }
}

/// One line of plot-ready output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnRow {
    pub x: f64,
    pub f: f64,
    pub omega: f64,
    pub segment: usize,
}

pub const COLUMN_HEADER: &str = "x\tf\tomega\tf_minus_omega\tsegment";

/// Plot-ready columns. The leading `#` line records the run settings.
pub fn emit_columns(config: &Config, rows: &[ColumnRow]) -> String {
    let mut s = String::with_capacity(32 * (rows.len() + 2));
    writeln!(
        s,
        "# seed={} budget={} atol={:e} rtol={:e}",
        config.seed, config.budget, config.atol, config.rtol
    )
    .unwrap();
    s.push_str(COLUMN_HEADER);
    s.push('\n');
    for r in rows {
        writeln!(s, "{}\t{}\t{}\t{}\t{}", r.x, r.f, r.omega, r.f - r.omega, r.segment).unwrap();
    }
    s
}
