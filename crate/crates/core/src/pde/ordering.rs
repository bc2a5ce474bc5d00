use serde::Serialize;

use super::field::Field;
use crate::error::{Error, Result};

pub const ORDERING_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct OrderingReport {
    /// max(u − v) over nodes per recorded time.
    pub per_time: Vec<(f64, f64)>,
    pub max_violation: f64,
    pub slack: f64,
    pub passed: bool,
}

/// Checks u ≤ v + slack at every node and recorded time.
pub fn ordering_check(u: &Field, v: &Field, slack: f64) -> Result<OrderingReport> {
    if !u.grid.same_layout(&v.grid) || u.times != v.times {
        return Err(Error::Grid("ordering check needs fields on the same grid and times".into()));
    }
    let mut per_time = Vec::with_capacity(u.times.len());
    let mut worst = f64::NEG_INFINITY;
    for (ti, &t) in u.times.iter().enumerate() {
        let m = u.values[ti].iter().zip(&v.values[ti]).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
        per_time.push((t, m));
        worst = worst.max(m);
    }
    Ok(OrderingReport { per_time, max_violation: worst.max(0.0), slack, passed: worst <= slack })
}
