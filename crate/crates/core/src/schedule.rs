//! Episode-level probability of acting with the episodic memory.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Decayed,
    Constant,
    Increased,
}

/// Exponential interpolation from `p_start` toward `p_end`:
/// `p(i) = p_end + (p_start - p_end) * exp(-i / temperature)`,
/// where `i` counts environment steps taken so far.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub p_start: f64,
    pub p_end: f64,
    pub temperature: f64,
}

impl Schedule {
    pub fn new(p_start: f64, p_end: f64, temperature: f64) -> Result<Self> {
        let s = Self {
            p_start,
            p_end,
            temperature,
        };
        s.validate()?;
        Ok(s)
    }

    /// Temperature defaulting to a fifth of the training budget, which leaves
    /// about 0.7% of the gap at the end of training.
    pub fn for_budget(p_start: f64, p_end: f64, total_steps: u64) -> Result<Self> {
        Self::new(
            p_start,
            p_end,
            (total_steps as f64 / 5.0).max(f64::MIN_POSITIVE),
        )
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_start", self.p_start), ("p_end", self.p_end)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is not a probability")));
            }
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::Config(format!(
                "temperature = {} must be positive",
                self.temperature
            )));
        }
        Ok(())
    }

    pub fn kind(&self) -> ScheduleKind {
        if self.p_start > self.p_end {
            ScheduleKind::Decayed
        } else if self.p_start < self.p_end {
            ScheduleKind::Increased
        } else {
            ScheduleKind::Constant
        }
    }

    pub fn p_ec(&self, steps_taken: u64) -> f64 {
        let p = self.p_end
            + (self.p_start - self.p_end) * (-(steps_taken as f64) / self.temperature).exp();
        // rounding can overshoot the interval by an ulp
        p.clamp(self.p_start.min(self.p_end), self.p_start.max(self.p_end))
    }
}
