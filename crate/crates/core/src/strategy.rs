//! Train/test evaluation of the position-extremes betting strategy, plus
//! the win-cover / win-over association measures.
//!
//! Training pools seasons with different league sizes by aligning positions
//! on their distance from the extremes: "the k-th most winning team" is
//! well defined whether a season has 27, 29, or 30 teams. The walk then
//! runs over those aligned cover curves, and the strategy keeps the largest
//! prefix of group sizes whose every step clears the profit threshold.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::edge::{prefix_means, running_average_walk, EdgeError, EdgeReport, EdgeSide};
use crate::ingest::Dataset;
use crate::model::SeasonId;
use crate::profile::ProfileError;
use crate::season_stats::{rank_by_win_pct, team_season_stats, SeasonRanking, StatsError};

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("need at least 2 seasons, got {0}")]
    InsufficientSeasons(usize),
    #[error("cover and no-cover position sets overlap in a {0}-team season")]
    OverlappingPositions(usize),
    #[error("variance of {0} is zero; correlation undefined")]
    DegenerateVariance(&'static str),
    #[error("team {team} has no resolved {what} bets in season {season}")]
    NoResolvedGames {
        team: String,
        season: SeasonId,
        what: &'static str,
    },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Edge(#[from] EdgeError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Positions to bet, counted from each extreme of the standings.
#[derive(Debug, Clone, Serialize)]
pub struct StrategySpec {
    /// Bet cover on the k-th most winning teams, for each k in the set.
    pub cover_positions: BTreeSet<usize>,
    /// Bet against the spread of the k-th most losing teams.
    pub nocover_positions: BTreeSet<usize>,
    pub profit_min: f64,
    pub break_even: f64,
    pub trained_on: Vec<SeasonId>,
}

/// Per-season cover/over percentages aligned by distance from the extremes
/// and averaged across seasons. Values are percent (0-100); index 0 is the
/// most extreme position.
#[derive(Debug, Clone)]
pub struct ExtremeCurves {
    pub cover_from_top: Vec<f64>,
    pub cover_from_bottom: Vec<f64>,
    pub over_from_top: Vec<f64>,
    pub over_from_bottom: Vec<f64>,
    pub season_count: usize,
}

fn season_rankings(
    ds: &Dataset,
    seasons: &[SeasonId],
) -> Result<Vec<SeasonRanking>, StrategyError> {
    seasons
        .iter()
        .map(|&season| Ok(rank_by_win_pct(team_season_stats(ds, season)?)?))
        .collect()
}

/// Builds the extreme-aligned cover/over curves over the given seasons.
pub fn extreme_cover_curves(
    ds: &Dataset,
    seasons: &[SeasonId],
) -> Result<ExtremeCurves, StrategyError> {
    let rankings = season_rankings(ds, seasons)?;
    let depth = rankings.iter().map(|r| r.team_count()).min().unwrap_or(0);

    let mut curves = ExtremeCurves {
        cover_from_top: vec![0.0; depth],
        cover_from_bottom: vec![0.0; depth],
        over_from_top: vec![0.0; depth],
        over_from_bottom: vec![0.0; depth],
        season_count: rankings.len(),
    };
    let betting_pcts = |stats: &crate::season_stats::TeamSeasonStats| {
        let c = stats
            .c_pct()
            .ok_or_else(|| StrategyError::NoResolvedGames {
                team: stats.team.name().to_string(),
                season: stats.season,
                what: "spread",
            })?;
        let o = stats
            .o_pct()
            .ok_or_else(|| StrategyError::NoResolvedGames {
                team: stats.team.name().to_string(),
                season: stats.season,
                what: "total",
            })?;
        Ok::<(f64, f64), StrategyError>((c * 100.0, o * 100.0))
    };
    for ranking in &rankings {
        let n = ranking.team_count();
        for k in 1..=depth {
            let (c, o) = betting_pcts(ranking.at(n + 1 - k))?; // k-th from the top
            curves.cover_from_top[k - 1] += c;
            curves.over_from_top[k - 1] += o;
            let (c, o) = betting_pcts(ranking.at(k))?; // k-th from the bottom
            curves.cover_from_bottom[k - 1] += c;
            curves.over_from_bottom[k - 1] += o;
        }
    }
    let k = rankings.len() as f64;
    for v in [
        &mut curves.cover_from_top,
        &mut curves.cover_from_bottom,
        &mut curves.over_from_top,
        &mut curves.over_from_bottom,
    ] {
        for x in v.iter_mut() {
            *x /= k;
        }
    }
    Ok(curves)
}

/// Both sides' running-average walks over the pooled training curves.
pub fn training_reports(
    ds: &Dataset,
    seasons: &[SeasonId],
    break_even: f64,
) -> Result<(EdgeReport, EdgeReport), StrategyError> {
    let curves = extreme_cover_curves(ds, seasons)?;
    let cover = running_average_walk(&curves.cover_from_top, EdgeSide::CoverTop, break_even)?;
    let nocover = running_average_walk(
        &curves.cover_from_bottom,
        EdgeSide::NocoverBottom,
        break_even,
    )?;
    Ok((cover, nocover))
}

/// The largest prefix of a walk's group sizes whose every step's profit
/// exceeds `profit_min`.
pub fn select_prefix(report: &EdgeReport, profit_min: f64) -> BTreeSet<usize> {
    let mut selected = BTreeSet::new();
    for step in &report.steps {
        if step.profit > profit_min {
            selected.insert(step.group_size);
        } else {
            break;
        }
    }
    selected
}

/// Trains a strategy: pools the training seasons into extreme-aligned cover
/// curves, walks both sides, and keeps the positions whose running-average
/// profit clears `profit_min`.
pub fn train(
    ds: &Dataset,
    train_seasons: &[SeasonId],
    profit_min: f64,
    break_even: f64,
) -> Result<StrategySpec, StrategyError> {
    if train_seasons.len() < 2 {
        return Err(StrategyError::InsufficientSeasons(train_seasons.len()));
    }
    let (cover_report, nocover_report) = training_reports(ds, train_seasons, break_even)?;
    let spec = StrategySpec {
        cover_positions: select_prefix(&cover_report, profit_min),
        nocover_positions: select_prefix(&nocover_report, profit_min),
        profit_min,
        break_even,
        trained_on: train_seasons.to_vec(),
    };
    check_disjoint(&spec, ds, train_seasons)?;
    Ok(spec)
}

fn check_disjoint(
    spec: &StrategySpec,
    ds: &Dataset,
    seasons: &[SeasonId],
) -> Result<(), StrategyError> {
    let deepest_cover = spec.cover_positions.iter().max().copied().unwrap_or(0);
    let deepest_nocover = spec.nocover_positions.iter().max().copied().unwrap_or(0);
    for &season in seasons {
        let n = ds.teams_in_season(season).len();
        if n > 0 && deepest_cover + deepest_nocover > n {
            return Err(StrategyError::OverlappingPositions(n));
        }
    }
    Ok(())
}

/// One evaluated position of a backtest.
#[derive(Debug, Clone, Serialize)]
pub struct BacktestRow {
    /// Group size k: the k most extreme positions on this side.
    pub position: usize,
    pub side: EdgeSide,
    /// Running average of the group's cover percentage over the test seasons.
    pub running_avg: f64,
    pub profit: f64,
    /// Return on turnover, in percent, of flat one-unit bets at -110
    /// pricing. Percentage points above break-even do not translate
    /// one-to-one into return, so both are reported.
    pub roi_flat_110: f64,
}

/// Return on turnover of flat one-unit bets at -110 given the bet's win
/// rate in percent: a winner pays 10/11, a loser costs the unit.
pub fn roi_flat_110(win_rate_pct: f64) -> f64 {
    let p = win_rate_pct / 100.0;
    (p * (21.0 / 11.0) - 1.0) * 100.0
}

/// Out-of-sample performance of a trained strategy.
#[derive(Debug, Clone, Serialize)]
pub struct BacktestReport {
    pub per_position: Vec<BacktestRow>,
    pub cumulative_cover: f64,
    pub cumulative_nocover: f64,
    pub seasons: Vec<SeasonId>,
    /// Spread bets implied by the strategy over the test seasons; pushes
    /// are not counted.
    pub bets_counted: u64,
    pub warnings: Vec<String>,
}

/// Evaluates a trained strategy on (ideally held-out) seasons: recomputes
/// the running averages of the selected groups over the test data.
pub fn evaluate(
    ds: &Dataset,
    spec: &StrategySpec,
    test_seasons: &[SeasonId],
) -> Result<BacktestReport, StrategyError> {
    let mut warnings = Vec::new();
    let overlap: Vec<String> = test_seasons
        .iter()
        .filter(|s| spec.trained_on.contains(s))
        .map(|s| s.to_string())
        .collect();
    if !overlap.is_empty() {
        warnings.push(format!(
            "test seasons overlap training seasons: {}",
            overlap.join(", ")
        ));
    }
    check_disjoint(spec, ds, test_seasons)?;

    let curves = extreme_cover_curves(ds, test_seasons)?;
    let top_means = prefix_means(&curves.cover_from_top);
    let bottom_means = prefix_means(&curves.cover_from_bottom);

    let mut per_position = Vec::new();
    let mut cumulative_cover = 0.0;
    let mut cumulative_nocover = 0.0;
    let mut skipped: Vec<(EdgeSide, usize)> = Vec::new();
    let mut walk_side =
        |positions: &BTreeSet<usize>, side: EdgeSide, means: &[f64], cumulative: &mut f64| {
            for &k in positions {
                if k == 0 || k > means.len() {
                    skipped.push((side, k));
                    continue;
                }
                let running_avg = means[k - 1];
                let profit = side.profit(running_avg, spec.break_even);
                let win_rate = match side {
                    EdgeSide::CoverTop => running_avg,
                    EdgeSide::NocoverBottom => 100.0 - running_avg,
                };
                *cumulative += profit;
                per_position.push(BacktestRow {
                    position: k,
                    side,
                    running_avg,
                    profit,
                    roi_flat_110: roi_flat_110(win_rate),
                });
            }
        };
    walk_side(
        &spec.cover_positions,
        EdgeSide::CoverTop,
        &top_means,
        &mut cumulative_cover,
    );
    walk_side(
        &spec.nocover_positions,
        EdgeSide::NocoverBottom,
        &bottom_means,
        &mut cumulative_nocover,
    );
    for (side, k) in skipped {
        warnings.push(format!(
            "selected {} position {k} exceeds the test seasons' league size; skipped",
            side.label()
        ));
    }

    // count the actual bets the position sets imply, pushes excluded
    let mut bets_counted = 0u64;
    for ranking in season_rankings(ds, test_seasons)? {
        let n = ranking.team_count();
        for &k in &spec.cover_positions {
            if k <= n {
                let s = ranking.at(n + 1 - k);
                bets_counted += (s.covers + s.no_covers) as u64;
            }
        }
        for &k in &spec.nocover_positions {
            if k <= n {
                let s = ranking.at(k);
                bets_counted += (s.covers + s.no_covers) as u64;
            }
        }
    }

    Ok(BacktestReport {
        per_position,
        cumulative_cover,
        cumulative_nocover,
        seasons: test_seasons.to_vec(),
        bets_counted,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Association measures
// ---------------------------------------------------------------------------

/// Pearson correlations between a team-season's winning percentage and its
/// betting percentages.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Association {
    pub win_cover: f64,
    pub win_over: f64,
}

/// Pearson product-moment correlation of two equally long samples.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StrategyError> {
    assert_eq!(xs.len(), ys.len(), "pearson inputs must pair up");
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        cov += (x - mean_x) * (y - mean_y);
        var_x += (x - mean_x) * (x - mean_x);
        var_y += (y - mean_y) * (y - mean_y);
    }
    if var_x < 1e-18 {
        return Err(StrategyError::DegenerateVariance("first variable"));
    }
    if var_y < 1e-18 {
        return Err(StrategyError::DegenerateVariance("second variable"));
    }
    Ok(cov / (var_x.sqrt() * var_y.sqrt()))
}

/// Correlates winning percentage with cover and over percentages across all
/// team-season pairs of the given seasons.
pub fn association(ds: &Dataset, seasons: &[SeasonId]) -> Result<Association, StrategyError> {
    if seasons.len() < 2 {
        return Err(StrategyError::InsufficientSeasons(seasons.len()));
    }
    let mut w = Vec::new();
    let mut c = Vec::new();
    let mut o = Vec::new();
    for &season in seasons {
        for stats in team_season_stats(ds, season)? {
            let (Some(cp), Some(op)) = (stats.c_pct(), stats.o_pct()) else {
                continue; // team with no resolved bets contributes nothing
            };
            w.push(stats.w_pct());
            c.push(cp);
            o.push(op);
        }
    }
    Ok(Association {
        win_cover: pearson(&w, &c)?,
        win_over: pearson(&w, &o)?,
    })
}

/// Share of ranking positions the running-average walks classify as
/// outliers, signed by the direction of the association. This is a
/// diagnostic defined by this artifact, not a standard coefficient: it
/// answers "how much of the standings table behaves unusually", with
/// win-over negated because strong teams tend under.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OutlierShares {
    pub win_cover: f64,
    pub win_over: f64,
}

pub fn outlier_shares(
    ds: &Dataset,
    seasons: &[SeasonId],
    break_even: f64,
) -> Result<OutlierShares, StrategyError> {
    let curves = extreme_cover_curves(ds, seasons)?;
    let depth = curves.cover_from_top.len().max(1);

    let cover_top = running_average_walk(&curves.cover_from_top, EdgeSide::CoverTop, break_even)?;
    let nocover_bottom = running_average_walk(
        &curves.cover_from_bottom,
        EdgeSide::NocoverBottom,
        break_even,
    )?;

    // strong teams betting under, weak teams betting over
    let under_top: Vec<f64> = curves.over_from_top.iter().map(|o| 100.0 - o).collect();
    let under_walk = running_average_walk(&under_top, EdgeSide::CoverTop, break_even)?;
    let over_walk = running_average_walk(&curves.over_from_bottom, EdgeSide::CoverTop, break_even)?;

    let share = |a: usize, b: usize| (a + b) as f64 / (2 * depth) as f64;
    Ok(OutlierShares {
        win_cover: share(cover_top.stop_k, nocover_bottom.stop_k),
        win_over: -share(under_walk.stop_k, over_walk.stop_k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::{EdgeReport, BREAK_EVEN_TABLES};
    use crate::ingest::parse_games_from_str;

    /// Running averages of the published 24-season training tables.
    const TRAIN_TOP: [f64; 12] = [
        55.48, 55.27, 54.23, 53.96, 53.62, 53.23, 53.08, 52.86, 52.85, 52.57, 52.59, 52.41,
    ];
    const TRAIN_BOTTOM: [f64; 12] = [
        44.68, 44.76, 45.34, 45.95, 45.88, 46.19, 46.42, 46.86, 47.22, 47.13, 47.31, 47.54,
    ];

    #[test]
    fn profit_threshold_selects_three_bottom_and_two_top() {
        let top =
            EdgeReport::from_running_averages(EdgeSide::CoverTop, BREAK_EVEN_TABLES, &TRAIN_TOP);
        let bottom = EdgeReport::from_running_averages(
            EdgeSide::NocoverBottom,
            BREAK_EVEN_TABLES,
            &TRAIN_BOTTOM,
        );
        assert_eq!(select_prefix(&top, 2.0), BTreeSet::from([1, 2]));
        assert_eq!(select_prefix(&bottom, 2.0), BTreeSet::from([1, 2, 3]));
    }

    #[test]
    fn infinite_threshold_selects_nothing() {
        let top =
            EdgeReport::from_running_averages(EdgeSide::CoverTop, BREAK_EVEN_TABLES, &TRAIN_TOP);
        assert!(select_prefix(&top, f64::INFINITY).is_empty());
    }

    #[test]
    fn one_biased_extreme_selects_only_itself() {
        // position 1 covers 58%, everything behind it is fair
        let mut walk = vec![50.0; 10];
        walk[0] = 58.0;
        let report = running_average_walk(&walk, EdgeSide::CoverTop, BREAK_EVEN_TABLES).unwrap();
        assert_eq!(select_prefix(&report, 2.0), BTreeSet::from([1]));
    }

    /// Round-robin where the posted spread is zero and the favorite is the
    /// home team: covering is exactly winning, so c_pct == w_pct. The team
    /// with the lower index always wins, giving a strict ladder of records;
    /// totals alternate over/under so o_pct is not degenerate either.
    fn cover_equals_win_csv() -> String {
        let mut text = String::from(
            "date,season,home,away,home_score,away_score,favorite,spread,total_line\n",
        );
        let teams = ["A", "B", "C", "D"];
        for year in [2000, 2001] {
            let mut day = 1;
            for i in 0..4 {
                for j in 0..4 {
                    if i == j {
                        continue;
                    }
                    let home_wins = i < j;
                    let (w, l) = if i % 2 == 0 { (100, 95) } else { (94, 92) };
                    let (hs, as_) = if home_wins { (w, l) } else { (l, w) };
                    text.push_str(&format!(
                        "{year}-11-{day:02},{year}-{},{},{},{hs},{as_},{},0,190.5\n",
                        year + 1,
                        teams[i],
                        teams[j],
                        teams[i],
                    ));
                    day += 1;
                }
            }
        }
        text
    }

    #[test]
    fn identical_cover_and_win_percentages_correlate_perfectly() {
        let ds = parse_games_from_str(&cover_equals_win_csv(), "test").unwrap();
        let seasons = [SeasonId::new(2000).unwrap(), SeasonId::new(2001).unwrap()];
        let a = association(&ds, &seasons).unwrap();
        assert!(
            (a.win_cover - 1.0).abs() < 1e-12,
            "win_cover {}",
            a.win_cover
        );
    }

    #[test]
    fn anti_correlated_construction_gives_minus_one() {
        // favorite is the eventual winner laying 50 points: the favorite
        // never covers, so covers == losses and c_pct == 1 - w_pct.
        let mut text = String::from(
            "date,season,home,away,home_score,away_score,favorite,spread,total_line\n",
        );
        let teams = ["A", "B", "C", "D"];
        for year in [2000, 2001] {
            let mut day = 1;
            for i in 0..4 {
                for j in 0..4 {
                    if i == j {
                        continue;
                    }
                    let home_wins = i < j;
                    let (w, l) = if i % 2 == 0 { (100, 95) } else { (94, 92) };
                    let (hs, as_, fav) = if home_wins {
                        (w, l, teams[i])
                    } else {
                        (l, w, teams[j])
                    };
                    text.push_str(&format!(
                        "{year}-11-{day:02},{year}-{},{},{},{hs},{as_},{fav},50,190.5\n",
                        year + 1,
                        teams[i],
                        teams[j],
                    ));
                    day += 1;
                }
            }
        }
        let ds = parse_games_from_str(&text, "test").unwrap();
        let seasons = [SeasonId::new(2000).unwrap(), SeasonId::new(2001).unwrap()];
        let a = association(&ds, &seasons).unwrap();
        assert!(
            (a.win_cover + 1.0).abs() < 1e-12,
            "win_cover {}",
            a.win_cover
        );
    }

    #[test]
    fn association_requires_two_seasons() {
        let ds = parse_games_from_str(&cover_equals_win_csv(), "test").unwrap();
        assert!(matches!(
            association(&ds, &[SeasonId::new(2000).unwrap()]),
            Err(StrategyError::InsufficientSeasons(1))
        ));
    }

    #[test]
    fn constant_variable_is_degenerate() {
        assert!(matches!(
            pearson(&[0.5, 0.5, 0.5], &[0.1, 0.2, 0.3]),
            Err(StrategyError::DegenerateVariance(_))
        ));
    }

    #[test]
    fn flat_bet_roi_is_zero_at_true_break_even() {
        // 11/21 is the exact -110 break-even
        assert!(roi_flat_110(100.0 * 11.0 / 21.0).abs() < 1e-12);
        assert!(roi_flat_110(55.0) > 0.0);
        assert!(roi_flat_110(50.0) < 0.0);
        // a sure thing returns the 10/11 payout
        assert!((roi_flat_110(100.0) - 100.0 * 10.0 / 11.0).abs() < 1e-9);
    }

    #[test]
    fn pearson_bounds_hold() {
        let xs = [0.1, 0.4, 0.2, 0.9, 0.6];
        let ys = [0.3, 0.1, 0.8, 0.5, 0.2];
        let r = pearson(&xs, &ys).unwrap();
        assert!((-1.0..=1.0).contains(&r));
        assert!((pearson(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn train_requires_two_seasons() {
        let ds = parse_games_from_str(&cover_equals_win_csv(), "test").unwrap();
        assert!(matches!(
            train(&ds, &[SeasonId::new(2000).unwrap()], 2.0, BREAK_EVEN_TABLES),
            Err(StrategyError::InsufficientSeasons(1))
        ));
    }

    #[test]
    fn evaluating_on_training_seasons_reproduces_training_profits() {
        use crate::synth::{generate, BandBias, RankBand, SynthConfig};
        let config = SynthConfig {
            team_count: 12,
            games_per_team: 30,
            seasons: 4,
            seed: 31,
            line_bias: vec![
                BandBias {
                    band: RankBand::Top(3),
                    offset: 0.08,
                },
                BandBias {
                    band: RankBand::Bottom(3),
                    offset: -0.08,
                },
            ],
            ..SynthConfig::default()
        };
        let ds = generate(&config).unwrap();
        let seasons: Vec<SeasonId> = config.era().seasons().collect();
        let spec = train(&ds, &seasons, 2.0, BREAK_EVEN_TABLES).unwrap();
        assert!(
            !spec.cover_positions.is_empty() || !spec.nocover_positions.is_empty(),
            "injected bias should select something"
        );

        let (cover_report, nocover_report) =
            training_reports(&ds, &seasons, BREAK_EVEN_TABLES).unwrap();
        let back = evaluate(&ds, &spec, &seasons).unwrap();
        assert!(!back.warnings.is_empty(), "overlap must be flagged");
        for row in &back.per_position {
            let train_step = match row.side {
                EdgeSide::CoverTop => &cover_report.steps[row.position - 1],
                EdgeSide::NocoverBottom => &nocover_report.steps[row.position - 1],
            };
            assert_eq!(
                row.running_avg, train_step.running_avg,
                "bit-exact reproduction"
            );
            assert_eq!(row.profit, train_step.profit);
        }
        assert!(back.bets_counted > 0);
    }

    #[test]
    fn evaluate_ignores_game_order() {
        use crate::synth::{generate, SynthConfig};
        let config = SynthConfig {
            team_count: 8,
            games_per_team: 14,
            seasons: 4,
            seed: 41,
            ..SynthConfig::default()
        };
        let ds = generate(&config).unwrap();
        let seasons: Vec<SeasonId> = config.era().seasons().collect();
        let (train_seasons, test_seasons) = seasons.split_at(2);

        let mut lines: Vec<&str> = Vec::new();
        let csv = ds.to_csv();
        for l in csv.lines().skip(1) {
            lines.push(l);
        }
        lines.reverse();
        let shuffled = format!(
            "date,season,home,away,home_score,away_score,favorite,spread,total_line\n{}\n",
            lines.join("\n")
        );
        let ds2 = parse_games_from_str(&shuffled, "shuffled").unwrap();

        let spec = StrategySpec {
            cover_positions: BTreeSet::from([1, 2]),
            nocover_positions: BTreeSet::from([1]),
            profit_min: 0.0,
            break_even: BREAK_EVEN_TABLES,
            trained_on: train_seasons.to_vec(),
        };
        let a = evaluate(&ds, &spec, test_seasons).unwrap();
        let b = evaluate(&ds2, &spec, test_seasons).unwrap();
        assert_eq!(a.bets_counted, b.bets_counted);
        for (x, y) in a.per_position.iter().zip(&b.per_position) {
            assert_eq!(x.running_avg, y.running_avg);
            assert_eq!(x.profit, y.profit);
        }
    }

    #[test]
    fn evaluating_unknown_seasons_errors() {
        let ds = parse_games_from_str(&cover_equals_win_csv(), "test").unwrap();
        let spec = StrategySpec {
            cover_positions: BTreeSet::from([1]),
            nocover_positions: BTreeSet::new(),
            profit_min: 0.0,
            break_even: BREAK_EVEN_TABLES,
            trained_on: vec![],
        };
        let missing = [SeasonId::new(1980).unwrap()];
        assert!(matches!(
            evaluate(&ds, &spec, &missing),
            Err(StrategyError::Stats(StatsError::UnknownSeason(_)))
        ));
    }

    #[test]
    fn overlapping_position_sets_are_rejected() {
        let ds = parse_games_from_str(&cover_equals_win_csv(), "test").unwrap();
        let seasons = [SeasonId::new(2000).unwrap(), SeasonId::new(2001).unwrap()];
        let spec = StrategySpec {
            cover_positions: BTreeSet::from([1, 2, 3]),
            nocover_positions: BTreeSet::from([1, 2]),
            profit_min: 0.0,
            break_even: BREAK_EVEN_TABLES,
            trained_on: vec![],
        };
        assert!(matches!(
            evaluate(&ds, &spec, &seasons),
            Err(StrategyError::OverlappingPositions(4))
        ));
    }
}
