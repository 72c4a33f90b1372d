//! Per-run metrics log and its CSV form.
//!
//! Columns, in order: `global_step, record_kind, episode_return,
//! episode_steps, memory_used, p_ec, q_sum_rl, ec_table_size, score_rl,
//! score_ec`. Empty cells mean "not applicable": a `state` row has no
//! return or memory, eval rows have no step count, and a score is empty
//! until its memory has finished an episode.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::replay::MemoryKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    /// One finished training episode.
    Train,
    /// Mean return of the greedy evaluation episodes at a checkpoint.
    Eval,
    /// Snapshot of the agent with no episode attached.
    State,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub global_step: u64,
    pub record_kind: RecordKind,
    pub episode_return: Option<f64>,
    pub episode_steps: Option<u64>,
    pub memory_used: Option<MemoryKind>,
    pub p_ec: f64,
    pub q_sum_rl: f64,
    pub ec_table_size: usize,
    pub score_rl: Option<f64>,
    pub score_ec: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunMetrics {
    pub rows: Vec<MetricsRow>,
}

impl RunMetrics {
    pub fn push(&mut self, row: MetricsRow) {
        debug_assert!(self
            .rows
            .last()
            .is_none_or(|last| last.global_step <= row.global_step));
        self.rows.push(row);
    }

    pub fn evals(&self) -> impl Iterator<Item = &MetricsRow> {
        self.rows
            .iter()
            .filter(|r| r.record_kind == RecordKind::Eval)
    }

    pub fn checkpoints(&self) -> Vec<u64> {
        self.evals().map(|r| r.global_step).collect()
    }

    pub fn write_to<W: Write>(&self, writer: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        for row in &self.rows {
            w.serialize(row)?;
        }
        if self.rows.is_empty() {
            w.write_record(HEADER)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(reader: R) -> std::result::Result<Self, csv::Error> {
        let mut r = csv::Reader::from_reader(reader);
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<MetricsRow>, _>>()?;
        Ok(Self { rows })
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(std::io::BufWriter::new(file))
            .map_err(|source| Error::Csv {
                path: path.to_path_buf(),
                source,
            })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(std::io::BufReader::new(file)).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })
    }
}

pub const HEADER: [&str; 10] = [
    "global_step",
    "record_kind",
    "episode_return",
    "episode_steps",
    "memory_used",
    "p_ec",
    "q_sum_rl",
    "ec_table_size",
    "score_rl",
    "score_ec",
];
