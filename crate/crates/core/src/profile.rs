//! Position profiles: the win/cover/over percentages at each
//! winning-percentage ranking position, averaged across the seasons of an
//! era subgroup.
//!
//! Positions are matched by rank, not by franchise: position 1 always means
//! "that season's worst record", whichever team held it. This is the pivot
//! that lets betting variables be read as a function of standings position.

use serde::Serialize;
use thiserror::Error;

use crate::ingest::Dataset;
use crate::model::{EraSubgroup, SeasonId, TeamId};
use crate::season_stats::{rank_by_win_pct, team_season_stats, StatsError};

/// House edge on a standard -110 line, in percentage points around 50%.
pub const HOUSE_EDGE_PCT: f64 = 2.54;

/// Default low/high winning-percentage cutoffs separating weak, mediocre,
/// and strong team groups.
pub const DEFAULT_LOW_CUT: f64 = 0.3450;
pub const DEFAULT_HIGH_CUT: f64 = 0.6400;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("season {0} missing from dataset")]
    MissingSeason(SeasonId),
    #[error("season {season} has {found} teams, era {era} expects {expected}")]
    WrongTeamCount {
        season: SeasonId,
        era: String,
        found: usize,
        expected: usize,
    },
    #[error("team {team} has no resolved {what} bets in season {season}")]
    NoResolvedGames {
        team: TeamId,
        season: SeasonId,
        what: &'static str,
    },
    #[error("profile has no positions")]
    EmptyProfile,
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// How per-position percentages are combined across seasons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AverageMode {
    /// Arithmetic mean of each season's percentage (every season weighs the
    /// same regardless of schedule length).
    #[default]
    MeanOfPercentages,
    /// Pool the raw counts across seasons, then divide once. Exposed for
    /// sensitivity analysis.
    PooledCounts,
}

/// Averages for one ranking position across an era's seasons.
#[derive(Debug, Clone, Serialize)]
pub struct PositionAverages {
    /// 1-based; position 1 is the lowest winning percentage.
    pub position: usize,
    pub mean_w_pct: f64,
    pub mean_c_pct: f64,
    pub mean_o_pct: f64,
    pub season_count: usize,
}

/// Per-position averages for one era subgroup.
#[derive(Debug, Clone, Serialize)]
pub struct PositionProfile {
    pub era: EraSubgroup,
    pub per_position: Vec<PositionAverages>,
    /// Display band (low, high) in percent, e.g. (47.46, 52.54).
    pub house_edge_band: (f64, f64),
}

impl PositionProfile {
    /// Builds a profile directly from per-position means. Used by reports
    /// and table-arithmetic tests; `rows` are
    /// `(mean_w_pct, mean_c_pct, mean_o_pct)` ascending by position.
    pub fn from_position_means(
        era: EraSubgroup,
        rows: &[(f64, f64, f64)],
        season_count: usize,
    ) -> Result<PositionProfile, ProfileError> {
        if rows.is_empty() {
            return Err(ProfileError::EmptyProfile);
        }
        if rows.len() != era.team_count {
            return Err(ProfileError::WrongTeamCount {
                season: era.first,
                era: era.name,
                found: rows.len(),
                expected: era.team_count,
            });
        }
        let per_position = rows
            .iter()
            .enumerate()
            .map(|(i, &(w, c, o))| PositionAverages {
                position: i + 1,
                mean_w_pct: w,
                mean_c_pct: c,
                mean_o_pct: o,
                season_count,
            })
            .collect();
        Ok(PositionProfile {
            era,
            per_position,
            house_edge_band: default_band(),
        })
    }

    pub fn team_count(&self) -> usize {
        self.per_position.len()
    }

    /// Cover percentages (0-100) walking from the highest-w_pct position
    /// inward, i.e. position N, N-1, ...
    pub fn cover_pct_from_top(&self) -> Vec<f64> {
        self.per_position
            .iter()
            .rev()
            .map(|p| p.mean_c_pct * 100.0)
            .collect()
    }

    /// Cover percentages (0-100) walking from the lowest-w_pct position
    /// inward, i.e. position 1, 2, ...
    pub fn cover_pct_from_bottom(&self) -> Vec<f64> {
        self.per_position
            .iter()
            .map(|p| p.mean_c_pct * 100.0)
            .collect()
    }
}

pub fn default_band() -> (f64, f64) {
    (50.0 - HOUSE_EDGE_PCT, 50.0 + HOUSE_EDGE_PCT)
}

/// Builds the era's position profile with the default mean-of-percentages
/// averaging.
pub fn build_profile(ds: &Dataset, era: &EraSubgroup) -> Result<PositionProfile, ProfileError> {
    build_profile_with_mode(ds, era, AverageMode::MeanOfPercentages)
}

pub fn build_profile_with_mode(
    ds: &Dataset,
    era: &EraSubgroup,
    mode: AverageMode,
) -> Result<PositionProfile, ProfileError> {
    let n = era.team_count;
    let season_count = era.season_count();

    // per position: (sum_w, sum_c, sum_o) for MeanOfPercentages, or pooled
    // numerators/denominators for PooledCounts.
    let mut mean_acc = vec![(0.0f64, 0.0f64, 0.0f64); n];
    let mut pooled_w = vec![(0u64, 0u64); n];
    let mut pooled_c = vec![(0u64, 0u64); n];
    let mut pooled_o = vec![(0u64, 0u64); n];

    for season in era.seasons() {
        if !ds.seasons().contains(&season) {
            return Err(ProfileError::MissingSeason(season));
        }
        let ranking = rank_by_win_pct(team_season_stats(ds, season)?)?;
        if ranking.team_count() != n {
            return Err(ProfileError::WrongTeamCount {
                season,
                era: era.name.clone(),
                found: ranking.team_count(),
                expected: n,
            });
        }
        for (position, stats) in ranking.iter() {
            let c = stats.c_pct().ok_or(ProfileError::NoResolvedGames {
                team: stats.team.clone(),
                season,
                what: "spread",
            })?;
            let o = stats.o_pct().ok_or(ProfileError::NoResolvedGames {
                team: stats.team.clone(),
                season,
                what: "total",
            })?;
            let idx = position - 1;
            mean_acc[idx].0 += stats.w_pct();
            mean_acc[idx].1 += c;
            mean_acc[idx].2 += o;
            pooled_w[idx].0 += stats.wins as u64;
            pooled_w[idx].1 += stats.games() as u64;
            pooled_c[idx].0 += stats.covers as u64;
            pooled_c[idx].1 += (stats.covers + stats.no_covers) as u64;
            pooled_o[idx].0 += stats.overs as u64;
            pooled_o[idx].1 += (stats.overs + stats.unders) as u64;
        }
    }

    let per_position = (0..n)
        .map(|idx| {
            let (w, c, o) = match mode {
                AverageMode::MeanOfPercentages => {
                    let k = season_count as f64;
                    (
                        mean_acc[idx].0 / k,
                        mean_acc[idx].1 / k,
                        mean_acc[idx].2 / k,
                    )
                }
                AverageMode::PooledCounts => {
                    let ratio = |(num, den): (u64, u64)| num as f64 / den as f64;
                    (
                        ratio(pooled_w[idx]),
                        ratio(pooled_c[idx]),
                        ratio(pooled_o[idx]),
                    )
                }
            };
            PositionAverages {
                position: idx + 1,
                mean_w_pct: w,
                mean_c_pct: c,
                mean_o_pct: o,
                season_count,
            }
        })
        .collect();

    Ok(PositionProfile {
        era: era.clone(),
        per_position,
        house_edge_band: default_band(),
    })
}

/// Positions partitioned into low / mid / high winning-percentage groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupCutoffs {
    pub low: Vec<usize>,
    pub mid: Vec<usize>,
    pub high: Vec<usize>,
}

/// Splits positions by their mean winning percentage: strictly below
/// `low_cut` is low, strictly above `high_cut` is high, the rest mid.
///
/// Requires `0 <= low_cut < high_cut <= 1`.
pub fn group_cutoffs(profile: &PositionProfile, low_cut: f64, high_cut: f64) -> GroupCutoffs {
    assert!(
        (0.0..=1.0).contains(&low_cut) && (0.0..=1.0).contains(&high_cut) && low_cut < high_cut,
        "cutoffs must satisfy 0 <= low_cut < high_cut <= 1, got {low_cut} and {high_cut}"
    );
    let mut groups = GroupCutoffs {
        low: Vec::new(),
        mid: Vec::new(),
        high: Vec::new(),
    };
    for p in &profile.per_position {
        if p.mean_w_pct < low_cut {
            groups.low.push(p.position);
        } else if p.mean_w_pct > high_cut {
            groups.high.push(p.position);
        } else {
            groups.mid.push(p.position);
        }
    }
    groups
}
