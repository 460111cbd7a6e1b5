use serde::{Deserialize, Serialize};

use crate::error::{KqiError, Result};

/// How many nodes arrive at each step `t = 1..=T`.
///
/// Rate schedules are rounded cumulatively: step `t` receives
/// `round(N(t)) - round(N(t-1))`, so rounding residue is carried forward and
/// cumulative counts are exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArrivalSchedule {
    /// Cumulative `N(t) = ((k t + b) m)^(m+1) / (m+1)`.
    Standard { k: f64, b: f64 },
    /// Per-step rate `scale * t^exponent`.
    Accelerated { scale: f64, exponent: f64 },
    /// Per-step rate `scale * t^-exponent`; `exponent = 0` is a constant rate.
    Decelerated { scale: f64, exponent: f64 },
    /// Explicit per-step counts; steps past the end receive nothing.
    Custom { arrivals: Vec<u64> },
}

impl ArrivalSchedule {
    /// Standard schedule with `b = 0` whose cumulative count reaches about
    /// `total` nodes at step `steps`.
    pub fn standard_with_total(m: usize, steps: u32, total: f64) -> Self {
        let p = (m + 1) as f64;
        let k = (total * p).powf(1.0 / p) / m as f64 / steps as f64;
        ArrivalSchedule::Standard { k, b: 0.0 }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ArrivalSchedule::Standard { .. } => "standard",
            ArrivalSchedule::Accelerated { .. } => "accelerated",
            ArrivalSchedule::Decelerated { .. } => "decelerated",
            ArrivalSchedule::Custom { .. } => "custom",
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        let good = match self {
            ArrivalSchedule::Standard { k, b } => ok(*k) && ok(*b),
            ArrivalSchedule::Accelerated { scale, exponent }
            | ArrivalSchedule::Decelerated { scale, exponent } => ok(*scale) && ok(*exponent),
            ArrivalSchedule::Custom { .. } => true,
        };
        if good {
            Ok(())
        } else {
            Err(KqiError::InvalidConfig(format!(
                "{} schedule parameters must be finite and nonnegative",
                self.kind()
            )))
        }
    }

    /// Arrival counts for steps `1..=steps`.
    pub fn arrivals(&self, m: usize, steps: u32) -> Result<Vec<u64>> {
        self.validate()?;
        if let ArrivalSchedule::Custom { arrivals } = self {
            return Ok((0..steps as usize)
                .map(|i| arrivals.get(i).copied().unwrap_or(0))
                .collect());
        }
        let mut out = Vec::with_capacity(steps as usize);
        let mut cumulative = 0.0;
        let mut emitted = 0u64;
        for t in 1..=steps {
            let tf = t as f64;
            cumulative = match self {
                ArrivalSchedule::Standard { k, b } => {
                    let p = (m + 1) as f64;
                    ((k * tf + b) * m as f64).powf(p) / p
                }
                ArrivalSchedule::Accelerated { scale, exponent } => {
                    cumulative + scale * tf.powf(*exponent)
                }
                ArrivalSchedule::Decelerated { scale, exponent } => {
                    cumulative + scale * tf.powf(-exponent)
                }
                ArrivalSchedule::Custom { .. } => unreachable!(),
            };
            if !(cumulative.is_finite() && cumulative < u32::MAX as f64) {
                return Err(KqiError::InvalidConfig(format!(
                    "schedule exceeds {} nodes by step {t}",
                    u32::MAX
                )));
            }
            let target = (cumulative.round() as u64).max(emitted);
            out.push(target - emitted);
            emitted = target;
        }
        Ok(out)
    }
}
