//! CSV outputs of a mission.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::dubins::Pose;
use crate::environment::{FieldGrid, Standardizer};
use crate::gp::Point;

use super::metrics::MetricRecord;

/// Header comment shared by every CSV the mission writes.
pub const LOG_VERSION: &str = "#pareto-mcts-log v1";

/// One replanning round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-based replanning round.
    pub round: usize,
    /// Samples collected so far, including this round's.
    pub samples: usize,
    /// Pose after executing the action.
    pub pose: Pose,
    /// Fan index of the executed primitive.
    pub action: usize,
    pub metrics: MetricRecord,
    /// Seconds spent on the round; kept out of `mission.csv`.
    pub wall_time: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MissionLog {
    pub records: Vec<RoundRecord>,
}

impl MissionLog {
    pub fn last(&self) -> Option<&RoundRecord> {
        self.records.last()
    }

    /// Latest record with at most `samples` samples.
    pub fn at_samples(&self, samples: usize) -> Option<&RoundRecord> {
        self.records.iter().take_while(|r| r.samples <= samples).last()
    }
}

const MISSION_COLUMNS: &str =
    "round,samples,x,y,heading,action,rmse,mae,hotspot_rmse,hotspot_mae,hotspot_pct";

/// Appends rounds to `mission.csv`, flushing after each one.
pub struct MissionWriter<W: Write> {
    out: W,
}

impl MissionWriter<BufWriter<File>> {
    pub fn create(path: &Path, standardizer: &Standardizer, raw_range: (f64, f64)) -> io::Result<Self> {
        Self::new(BufWriter::new(File::create(path)?), standardizer, raw_range)
    }
}

impl<W: Write> MissionWriter<W> {
    pub fn new(mut out: W, standardizer: &Standardizer, raw_range: (f64, f64)) -> io::Result<Self> {
        writeln!(out, "{LOG_VERSION}")?;
        writeln!(
            out,
            "#units=standardized raw_mean={} raw_std={} raw_min={} raw_max={}",
            standardizer.mean, standardizer.std, raw_range.0, raw_range.1
        )?;
        writeln!(out, "{MISSION_COLUMNS}")?;
        out.flush()?;
        Ok(Self { out })
    }

    pub fn append(&mut self, r: &RoundRecord) -> io::Result<()> {
        let m = &r.metrics;
        writeln!(
            self.out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.round,
            r.samples,
            r.pose.x,
            r.pose.y,
            r.pose.heading,
            r.action,
            m.rmse,
            m.mae,
            m.hotspot_rmse,
            m.hotspot_mae,
            m.hotspot_pct
        )?;
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Per-round wall time, separate so that `mission.csv` stays reproducible.
pub fn write_timing<W: Write>(mut out: W, log: &MissionLog) -> io::Result<()> {
    writeln!(out, "{LOG_VERSION}")?;
    writeln!(out, "round,wall_time_s")?;
    for r in &log.records {
        writeln!(out, "{},{}", r.round, r.wall_time)?;
    }
    out.flush()
}

/// `x,y,value` rows of raw observations.
pub fn write_samples<W: Write>(mut out: W, locations: &[Point], values: &[f64]) -> io::Result<()> {
    writeln!(out, "{LOG_VERSION}")?;
    writeln!(out, "x,y,value")?;
    for (p, v) in locations.iter().zip(values) {
        writeln!(out, "{},{},{v}", p[0], p[1])?;
    }
    out.flush()
}

/// Prediction grid in the grid file format, preceded by the version line.
pub fn write_prediction<W: Write>(mut out: W, grid: &FieldGrid) -> io::Result<()> {
    writeln!(out, "{LOG_VERSION}")?;
    grid.write_to(out)
}
