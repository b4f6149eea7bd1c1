//! Per-team per-season aggregation and winning-percentage ranking.
//!
//! Pushes are excluded from the cover and over denominators ("no action"),
//! so `c_pct + n_pct = 1` holds exactly on the resolved bets. Winning
//! percentages are compared as exact integer fractions when ranking, and
//! only rendered as decimals for display.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::Dataset;
use crate::model::{derive_outcome, AtsResult, ModelError, OuResult, SeasonId, TeamId};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("season {0} not present in dataset")]
    UnknownSeason(SeasonId),
    #[error("duplicate team {0} in ranking input")]
    DuplicateTeam(TeamId),
    #[error("ranking input is empty")]
    EmptyInput,
    #[error("ranking input mixes seasons {0} and {1}")]
    MixedSeasons(SeasonId, SeasonId),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One team's season totals. Percentages are derived from the counts on
/// demand; cover/over percentages are `None` when the team had no resolved
/// bets of that kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TeamSeasonStats {
    pub team: TeamId,
    pub season: SeasonId,
    pub wins: u32,
    pub losses: u32,
    pub covers: u32,
    pub no_covers: u32,
    pub ats_pushes: u32,
    pub overs: u32,
    pub unders: u32,
    pub ou_pushes: u32,
    pub games_with_spread: u32,
    pub games_with_total: u32,
    /// Cumulative points scored minus points allowed; ranking tie-breaker.
    pub point_diff: i64,
}

impl TeamSeasonStats {
    /// A bare W-L record; betting counts zeroed. Handy for standings-table
    /// arithmetic where only winning percentages matter.
    pub fn from_record(team: TeamId, season: SeasonId, wins: u32, losses: u32) -> Self {
        TeamSeasonStats {
            team,
            season,
            wins,
            losses,
            covers: 0,
            no_covers: 0,
            ats_pushes: 0,
            overs: 0,
            unders: 0,
            ou_pushes: 0,
            games_with_spread: 0,
            games_with_total: 0,
            point_diff: 0,
        }
    }

    pub fn games(&self) -> u32 {
        self.wins + self.losses
    }

    pub fn w_pct(&self) -> f64 {
        self.wins as f64 / self.games() as f64
    }

    pub fn c_pct(&self) -> Option<f64> {
        let resolved = self.covers + self.no_covers;
        (resolved > 0).then(|| self.covers as f64 / resolved as f64)
    }

    pub fn n_pct(&self) -> Option<f64> {
        let resolved = self.covers + self.no_covers;
        (resolved > 0).then(|| self.no_covers as f64 / resolved as f64)
    }

    pub fn o_pct(&self) -> Option<f64> {
        let resolved = self.overs + self.unders;
        (resolved > 0).then(|| self.overs as f64 / resolved as f64)
    }

    /// Exact winning-percentage comparison via cross multiplication;
    /// no floating-point rounding can reorder equal fractions.
    fn cmp_w_pct(&self, other: &TeamSeasonStats) -> std::cmp::Ordering {
        let lhs = self.wins as u64 * other.games() as u64;
        let rhs = other.wins as u64 * self.games() as u64;
        lhs.cmp(&rhs)
    }
}

/// Teams of one season ordered ascending by winning percentage;
/// position 1 is the lowest percentage.
#[derive(Debug, Clone, Serialize)]
pub struct SeasonRanking {
    pub season: SeasonId,
    positions: Vec<TeamSeasonStats>,
}

impl SeasonRanking {
    pub fn team_count(&self) -> usize {
        self.positions.len()
    }

    /// Stats of the team occupying a 1-based position.
    pub fn at(&self, position: usize) -> &TeamSeasonStats {
        &self.positions[position - 1]
    }

    /// `(position, stats)` pairs, position ascending from 1.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &TeamSeasonStats)> {
        self.positions.iter().enumerate().map(|(i, s)| (i + 1, s))
    }

    pub fn into_positions(self) -> Vec<TeamSeasonStats> {
        self.positions
    }
}

/// Aggregates every game of a season into per-team stats, one entry per
/// team, sorted by team name.
pub fn team_season_stats(
    ds: &Dataset,
    season: SeasonId,
) -> Result<Vec<TeamSeasonStats>, StatsError> {
    if !ds.seasons().contains(&season) {
        return Err(StatsError::UnknownSeason(season));
    }

    let mut by_team: BTreeMap<TeamId, TeamSeasonStats> = BTreeMap::new();
    for game in ds.season_games(season) {
        let outcome = derive_outcome(game)?;
        for (team, scored, allowed) in [
            (&game.home, game.home_score, game.away_score),
            (&game.away, game.away_score, game.home_score),
        ] {
            let stats = by_team
                .entry(team.clone())
                .or_insert_with(|| TeamSeasonStats::from_record(team.clone(), season, 0, 0));
            if outcome.winner == *team {
                stats.wins += 1;
            } else {
                stats.losses += 1;
            }
            stats.point_diff += scored as i64 - allowed as i64;
            if let Some(ats) = outcome.ats_result(team) {
                stats.games_with_spread += 1;
                match ats {
                    AtsResult::Cover => stats.covers += 1,
                    AtsResult::NoCover => stats.no_covers += 1,
                    AtsResult::Push => stats.ats_pushes += 1,
                }
            }
            if let Some(ou) = outcome.ou_result() {
                stats.games_with_total += 1;
                match ou {
                    OuResult::Over => stats.overs += 1,
                    OuResult::Under => stats.unders += 1,
                    OuResult::Push => stats.ou_pushes += 1,
                }
            }
        }
    }

    Ok(by_team.into_values().collect())
}

/// Sorts team stats ascending by winning percentage. Ties break by
/// ascending point differential, then ascending team name, so the ranking
/// is deterministic regardless of input order.
pub fn rank_by_win_pct(stats: Vec<TeamSeasonStats>) -> Result<SeasonRanking, StatsError> {
    let season = match stats.first() {
        Some(s) => s.season,
        None => return Err(StatsError::EmptyInput),
    };
    let mut seen = std::collections::BTreeSet::new();
    for s in &stats {
        if s.season != season {
            return Err(StatsError::MixedSeasons(season, s.season));
        }
        if !seen.insert(s.team.clone()) {
            return Err(StatsError::DuplicateTeam(s.team.clone()));
        }
    }

    let mut positions = stats;
    positions.sort_by(|a, b| {
        a.cmp_w_pct(b)
            .then_with(|| a.point_diff.cmp(&b.point_diff))
            .then_with(|| a.team.name().cmp(b.team.name()))
    });
    Ok(SeasonRanking { season, positions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_games_from_str;

    fn team(name: &str) -> TeamId {
        TeamId::new(name).unwrap()
    }

    fn season() -> SeasonId {
        SeasonId::new(2010).unwrap()
    }

    /// Formats a winning percentage the way standings tables print it.
    fn pct4(p: f64) -> String {
        format!("{p:.4}")
    }

    #[test]
    fn printed_percentages_match_known_records() {
        let minnesota = TeamSeasonStats::from_record(team("Minnesota"), season(), 17, 65);
        assert_eq!(pct4(minnesota.w_pct()), "0.2073");
        let chicago = TeamSeasonStats::from_record(team("Chicago"), season(), 62, 20);
        assert_eq!(pct4(chicago.w_pct()), "0.7561");
    }

    #[test]
    fn pushes_leave_cover_percentage_symmetric() {
        let mut s = TeamSeasonStats::from_record(team("X"), season(), 41, 41);
        s.covers = 40;
        s.no_covers = 40;
        s.ats_pushes = 2;
        s.games_with_spread = 82;
        assert_eq!(s.c_pct(), Some(0.5));
        assert_eq!(s.n_pct(), Some(0.5));
        assert_eq!(s.games_with_spread, 82);
    }

    #[test]
    fn c_pct_none_without_resolved_bets() {
        let s = TeamSeasonStats::from_record(team("X"), season(), 1, 0);
        assert_eq!(s.c_pct(), None);
        assert_eq!(s.o_pct(), None);
    }

    #[test]
    fn ranking_is_ascending_and_deterministic() {
        let mut stats = vec![
            TeamSeasonStats::from_record(team("Chicago"), season(), 62, 20),
            TeamSeasonStats::from_record(team("Minnesota"), season(), 17, 65),
            TeamSeasonStats::from_record(team("Boston"), season(), 56, 26),
        ];
        let ranking = rank_by_win_pct(stats.clone()).unwrap();
        assert_eq!(ranking.at(1).team, team("Minnesota"));
        assert_eq!(ranking.at(3).team, team("Chicago"));

        stats.reverse();
        let ranking2 = rank_by_win_pct(stats).unwrap();
        let order: Vec<&str> = ranking2.iter().map(|(_, s)| s.team.name()).collect();
        assert_eq!(order, vec!["Minnesota", "Boston", "Chicago"]);
    }

    #[test]
    fn ties_break_by_point_diff_then_name() {
        let mut a = TeamSeasonStats::from_record(team("Beta"), season(), 41, 41);
        a.point_diff = 10;
        let mut b = TeamSeasonStats::from_record(team("Alpha"), season(), 41, 41);
        b.point_diff = 10;
        let mut c = TeamSeasonStats::from_record(team("Gamma"), season(), 41, 41);
        c.point_diff = -5;
        let ranking = rank_by_win_pct(vec![a, b, c]).unwrap();
        let order: Vec<&str> = ranking.iter().map(|(_, s)| s.team.name()).collect();
        assert_eq!(order, vec!["Gamma", "Alpha", "Beta"]);
    }

    #[test]
    fn equal_fractions_tie_even_across_denominators() {
        // 2-4 and 1-2 are the same exact fraction: must tie, then name-break.
        let a = TeamSeasonStats::from_record(team("B"), season(), 2, 4);
        let b = TeamSeasonStats::from_record(team("A"), season(), 1, 2);
        let ranking = rank_by_win_pct(vec![a, b]).unwrap();
        let order: Vec<&str> = ranking.iter().map(|(_, s)| s.team.name()).collect();
        assert_eq!(order, vec!["A", "B"]);
    }

    #[test]
    fn duplicate_team_is_rejected() {
        let a = TeamSeasonStats::from_record(team("A"), season(), 1, 0);
        let b = TeamSeasonStats::from_record(team("A"), season(), 0, 1);
        assert!(matches!(
            rank_by_win_pct(vec![a, b]),
            Err(StatsError::DuplicateTeam(_))
        ));
    }

    #[test]
    fn stats_agree_with_outcome_derivation() {
        let text = "date,season,home,away,home_score,away_score,favorite,spread,total_line\n\
             2010-11-01,2010-2011,A,B,100,90,A,5.5,185.5\n\
             2010-11-02,2010-2011,B,A,100,95,B,5,195\n\
             2010-11-03,2010-2011,A,B,90,100,A,3.5,190.5\n";
        let ds = parse_games_from_str(text, "test").unwrap();
        let stats = team_season_stats(&ds, SeasonId::new(2010).unwrap()).unwrap();
        let a = stats.iter().find(|s| s.team == team("A")).unwrap();
        let b = stats.iter().find(|s| s.team == team("B")).unwrap();

        // game 1: A wins by 10, covers 5.5, over. game 2: B wins by 5,
        // push on both spread and total. game 3: B wins by 10 against
        // favored A, covering; total 190 stays under 190.5.
        assert_eq!((a.wins, a.losses), (1, 2));
        assert_eq!((b.wins, b.losses), (2, 1));
        assert_eq!((a.covers, a.no_covers, a.ats_pushes), (1, 1, 1));
        assert_eq!((b.covers, b.no_covers, b.ats_pushes), (1, 1, 1));
        assert_eq!((a.overs, a.unders, a.ou_pushes), (1, 1, 1));
        assert_eq!(a.point_diff, -(b.point_diff));

        // conservation: every game contributes one win and one loss
        let total_wins: u32 = stats.iter().map(|s| s.wins).sum();
        let total_losses: u32 = stats.iter().map(|s| s.losses).sum();
        assert_eq!(total_wins, 3);
        assert_eq!(total_losses, 3);
        let covers: u32 = stats.iter().map(|s| s.covers).sum();
        let no_covers: u32 = stats.iter().map(|s| s.no_covers).sum();
        assert_eq!(covers, no_covers);
    }

    #[test]
    fn unknown_season_errors() {
        let text = "date,season,home,away,home_score,away_score,favorite,spread,total_line\n\
             2010-11-01,2010-2011,A,B,100,90,,,\n";
        let ds = parse_games_from_str(text, "test").unwrap();
        assert!(matches!(
            team_season_stats(&ds, SeasonId::new(1999).unwrap()),
            Err(StatsError::UnknownSeason(_))
        ));
    }
}
