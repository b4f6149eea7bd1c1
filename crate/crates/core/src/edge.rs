//! Running-average edge detection over ranking extremes.
//!
//! Walking inward from an extreme of the position profile, step `k` takes
//! the mean cover percentage of the `k` most extreme positions:
//!
//! ```text
//! H(k) = (1/k) * sum of the k extreme positions' cover percentages
//! ```
//!
//! computed incrementally as `H(k+1) = (k*H(k) + x) / (k+1)`. On the top
//! side the profit of a cover bet is `H - break_even`; on the bottom side a
//! bet against the spread wins when the group fails to cover, so the profit
//! is `(100 - break_even) - H`. The walk stops at the first step whose
//! profit is not positive; that failing step is not reported.

use serde::Serialize;
use thiserror::Error;

use crate::profile::PositionProfile;

/// Break-even win percentage implied by the published profit tables
/// (equivalently 47.60 on the no-cover side).
pub const BREAK_EVEN_TABLES: f64 = 52.40;
/// True break-even of a flat bettor at -110 pricing: 11/21.
pub const BREAK_EVEN_TRUE_110: f64 = 100.0 * 11.0 / 21.0;
/// Break-even implied by quoting the house edge as 2.54%.
pub const BREAK_EVEN_HOUSE_254: f64 = 52.54;

#[derive(Debug, Error, PartialEq)]
pub enum EdgeError {
    #[error("profile has no positions")]
    EmptyProfile,
    #[error("break-even {0} out of the supported (50, 60) percent range")]
    InvalidBreakEven(f64),
    #[error("position group is empty")]
    EmptyGroup,
}

/// Which extreme the walk starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeSide {
    /// Bet cover on the most winning teams, walking downward.
    CoverTop,
    /// Bet against the most losing teams, walking upward.
    NocoverBottom,
}

impl EdgeSide {
    /// Profit in percentage points of a one-unit flat bet at the given
    /// running average of the group's *cover* percentage.
    pub fn profit(self, running_avg_pct: f64, break_even_pct: f64) -> f64 {
        match self {
            EdgeSide::CoverTop => running_avg_pct - break_even_pct,
            EdgeSide::NocoverBottom => (100.0 - break_even_pct) - running_avg_pct,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EdgeSide::CoverTop => "cover_top",
            EdgeSide::NocoverBottom => "nocover_bottom",
        }
    }
}

/// One retained step of the walk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeStep {
    /// Group size `k`: the k most extreme positions.
    pub group_size: usize,
    /// Mean cover percentage (0-100) of the group.
    pub running_avg: f64,
    /// Percentage points above break-even for this group's bet.
    pub profit: f64,
}

/// Result of one side's walk: all steps that beat break-even, in order.
#[derive(Debug, Clone, Serialize)]
pub struct EdgeReport {
    pub side: EdgeSide,
    pub break_even: f64,
    pub steps: Vec<EdgeStep>,
    /// Largest group size whose every prefix step beats break-even.
    pub stop_k: usize,
    /// Sum of the retained steps' profits, in percentage points.
    pub cumulative_profit: f64,
}

impl EdgeReport {
    /// Builds a report from already-computed running averages of the cover
    /// percentage (walk order, percent units). Used for published-table
    /// arithmetic where the averages are given rather than derived.
    pub fn from_running_averages(
        side: EdgeSide,
        break_even: f64,
        running_avgs: &[f64],
    ) -> EdgeReport {
        let mut steps = Vec::new();
        let mut cumulative = 0.0;
        for (i, &avg) in running_avgs.iter().enumerate() {
            let profit = side.profit(avg, break_even);
            if profit <= 0.0 {
                break;
            }
            cumulative += profit;
            steps.push(EdgeStep {
                group_size: i + 1,
                running_avg: avg,
                profit,
            });
        }
        let stop_k = steps.len();
        EdgeReport {
            side,
            break_even,
            steps,
            stop_k,
            cumulative_profit: cumulative,
        }
    }
}

/// Prefix means of a value sequence via the incremental recurrence
/// `H(k+1) = H(k) + (x - H(k))/(k+1)`. Every walk and every backtest row
/// goes through this one implementation so train/test comparisons are
/// bit-exact.
pub fn prefix_means(values: &[f64]) -> Vec<f64> {
    let mut means = Vec::with_capacity(values.len());
    let mut running = 0.0;
    for (i, &x) in values.iter().enumerate() {
        running += (x - running) / (i + 1) as f64;
        means.push(running);
    }
    means
}

/// Runs the walk over cover percentages already laid out in walk order
/// (most extreme position first), in percent units.
pub fn running_average_walk(
    cover_pcts: &[f64],
    side: EdgeSide,
    break_even: f64,
) -> Result<EdgeReport, EdgeError> {
    if cover_pcts.is_empty() {
        return Err(EdgeError::EmptyProfile);
    }
    if !(50.0 < break_even && break_even < 60.0) {
        return Err(EdgeError::InvalidBreakEven(break_even));
    }

    let mut steps = Vec::new();
    let mut cumulative = 0.0;
    for (i, &running) in prefix_means(cover_pcts).iter().enumerate() {
        let profit = side.profit(running, break_even);
        if profit <= 0.0 {
            break;
        }
        cumulative += profit;
        steps.push(EdgeStep {
            group_size: i + 1,
            running_avg: running,
            profit,
        });
    }
    let stop_k = steps.len();
    Ok(EdgeReport {
        side,
        break_even,
        steps,
        stop_k,
        cumulative_profit: cumulative,
    })
}

/// Runs the walk over a position profile, starting from the side's extreme.
pub fn running_average(
    profile: &PositionProfile,
    side: EdgeSide,
    break_even: f64,
) -> Result<EdgeReport, EdgeError> {
    let walk = match side {
        EdgeSide::CoverTop => profile.cover_pct_from_top(),
        EdgeSide::NocoverBottom => profile.cover_pct_from_bottom(),
    };
    running_average_walk(&walk, side, break_even)
}

/// Over/under tendency of the weak and strong team groups, in percentage
/// points away from 50.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverTendency {
    /// How much more often than 50% the low group goes over.
    pub low_over_bias: f64,
    /// How much more often than 50% the high group goes under.
    pub high_under_bias: f64,
}

/// Measures the totals tendency of the low and high winning-percentage
/// groups, given position partitions from `group_cutoffs`.
pub fn over_tendency(
    profile: &PositionProfile,
    low_positions: &[usize],
    high_positions: &[usize],
) -> Result<OverTendency, EdgeError> {
    let mean_o = |positions: &[usize]| -> Result<f64, EdgeError> {
        if positions.is_empty() {
            return Err(EdgeError::EmptyGroup);
        }
        let sum: f64 = positions
            .iter()
            .map(|&p| profile.per_position[p - 1].mean_o_pct * 100.0)
            .sum();
        Ok(sum / positions.len() as f64)
    };
    Ok(OverTendency {
        low_over_bias: mean_o(low_positions)? - 50.0,
        high_under_bias: 50.0 - mean_o(high_positions)?,
    })
}
