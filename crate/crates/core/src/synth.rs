//! Deterministic synthetic season generation and Monte Carlo null models.
//!
//! Games are built so that the analytical null is exact: the home margin is
//! drawn from latent team strengths first, and the spread is then set to
//! `margin - xi` with `xi` symmetric around zero on the half-point grid.
//! The margin minus the spread is therefore symmetric noise, every team's
//! cover outcome is the sign of `xi` — a fair coin independent of
//! strength and of who won — and rank-band cover-probability offsets can be
//! injected exactly by biasing that coin. Totals work the same way around a
//! base combined score.
//!
//! Everything is driven by one explicitly seeded generator; identical
//! configs produce byte-identical datasets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::edge::{running_average, EdgeSide, BREAK_EVEN_TABLES};
use crate::ingest::{Dataset, IngestError};
use crate::model::{EraSubgroup, GameRecord, Points, SeasonId, TeamId};
use crate::profile::build_profile;

/// Half the span of each of the two uniform integer margin-noise draws.
const MARGIN_NOISE: i64 = 12;
/// Half the span of each of the two uniform integer total-noise draws.
const TOTAL_NOISE: i64 = 9;
/// Base combined score around which totals are drawn.
const BASE_TOTAL: i64 = 199;
/// Number of half-point magnitudes for line noise (0.5 .. 7.5).
const LINE_MAGNITUDES: i64 = 8;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Profile(#[from] crate::profile::ProfileError),
    #[error(transparent)]
    Edge(#[from] crate::edge::EdgeError),
}

/// A band of teams identified by latent-strength rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankBand {
    /// The `n` strongest teams.
    Top(usize),
    /// The `n` weakest teams.
    Bottom(usize),
}

/// A probability offset applied to one rank band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandBias {
    pub band: RankBand,
    /// Added to the band's cover (or over) probability, e.g. 0.06.
    pub offset: f64,
}

/// Configuration for the synthetic generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub team_count: usize,
    pub games_per_team: usize,
    pub seasons: usize,
    pub first_season: SeasonId,
    /// Latent strength gap in points between the strongest and weakest team.
    pub strength_spread: f64,
    /// Cover-probability offsets by strength-rank band.
    pub line_bias: Vec<BandBias>,
    /// Over-probability offsets by strength-rank band.
    pub ou_bias: Vec<BandBias>,
    /// Fair lines when set; otherwise lines are shaded one point against
    /// the favorite.
    pub vig_free: bool,
    /// Integer line noise when set, so pushes can occur; half-point lines
    /// (push-free) otherwise.
    pub allow_pushes: bool,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            team_count: 30,
            games_per_team: 82,
            seasons: 10,
            first_season: SeasonId::new(1990).expect("default season"),
            strength_spread: 12.0,
            line_bias: Vec::new(),
            ou_bias: Vec::new(),
            vig_free: true,
            allow_pushes: false,
            seed: 7,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::InvalidConfig(msg));
        if self.team_count < 4 {
            return bad(format!("team_count {} < 4", self.team_count));
        }
        if self.games_per_team == 0 {
            return bad("games_per_team is zero".into());
        }
        if self.team_count % 2 == 1 && self.games_per_team % 2 == 1 {
            return bad(format!(
                "odd team_count {} requires an even games_per_team, got {}",
                self.team_count, self.games_per_team
            ));
        }
        if self.seasons == 0 {
            return bad("seasons is zero".into());
        }
        let last = self.first_season.start_year() + self.seasons as i32 - 1;
        if SeasonId::new(last).is_err() {
            return bad(format!(
                "season range runs past supported years (last {last})"
            ));
        }
        if !(0.0..=60.0).contains(&self.strength_spread) {
            return bad(format!(
                "strength_spread {} outside 0..=60",
                self.strength_spread
            ));
        }
        for (name, biases) in [("line_bias", &self.line_bias), ("ou_bias", &self.ou_bias)] {
            for b in biases.iter() {
                let width = match b.band {
                    RankBand::Top(n) | RankBand::Bottom(n) => n,
                };
                if width == 0 || width > self.team_count {
                    return bad(format!("{name} band width {width} out of range"));
                }
            }
        }
        let cover = per_team_offsets(&self.line_bias, self.team_count);
        let max = cover.iter().cloned().fold(f64::MIN, f64::max);
        let min = cover.iter().cloned().fold(f64::MAX, f64::min);
        if 0.5 + (max - min) > 0.98 {
            return bad("line_bias offsets push cover probability out of (0,1)".into());
        }
        let over = per_team_offsets(&self.ou_bias, self.team_count);
        let span = over.iter().cloned().fold(f64::MIN, f64::max).abs()
            + over.iter().cloned().fold(f64::MAX, f64::min).abs();
        if 0.5 + span > 0.98 {
            return bad("ou_bias offsets push over probability out of (0,1)".into());
        }
        Ok(())
    }

    pub fn last_season(&self) -> SeasonId {
        SeasonId::new(self.first_season.start_year() + self.seasons as i32 - 1)
            .expect("validated season range")
    }

    /// Era subgroup spanning every generated season.
    pub fn era(&self) -> EraSubgroup {
        EraSubgroup::new(
            "SYNTH",
            self.first_season,
            self.last_season(),
            self.team_count,
        )
        .expect("validated config")
    }
}

fn per_team_offsets(biases: &[BandBias], n: usize) -> Vec<f64> {
    let mut offsets = vec![0.0; n];
    for b in biases {
        match b.band {
            RankBand::Bottom(k) => {
                for o in offsets.iter_mut().take(k.min(n)) {
                    *o += b.offset;
                }
            }
            RankBand::Top(k) => {
                for o in offsets.iter_mut().skip(n - k.min(n)) {
                    *o += b.offset;
                }
            }
        }
    }
    offsets
}

/// Pairings for one scheduling slot. Even team counts use the circle
/// method's perfect matchings (one game per team per slot); odd counts use
/// circulant classes `{i, i+j}` (two games per team per slot).
fn schedule(n: usize, games_per_team: usize) -> Vec<Vec<(usize, usize)>> {
    let mut slots = Vec::new();
    if n.is_multiple_of(2) {
        let rounds = n - 1;
        for r in 0..games_per_team {
            let m = r % rounds;
            let mut pairs = Vec::with_capacity(n / 2);
            pairs.push((n - 1, m));
            for k in 1..n / 2 {
                pairs.push(((m + k) % rounds, (m + rounds - k) % rounds));
            }
            let flip = (r / rounds) % 2 == 1;
            if flip {
                for p in pairs.iter_mut() {
                    *p = (p.1, p.0);
                }
            }
            slots.push(pairs);
        }
    } else {
        let classes = (n - 1) / 2;
        for c in 0..games_per_team / 2 {
            let j = 1 + (c % classes);
            let flip = (c / classes) % 2 == 1;
            let mut pairs = Vec::with_capacity(n);
            for i in 0..n {
                let a = i;
                let b = (i + j) % n;
                pairs.push(if flip { (b, a) } else { (a, b) });
            }
            slots.push(pairs);
        }
    }
    slots
}

/// Generates a deterministic synthetic dataset.
pub fn generate(config: &SynthConfig) -> Result<Dataset, SynthError> {
    config.validate()?;
    let n = config.team_count;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let width = if n >= 100 { 3 } else { 2 };
    let teams: Vec<TeamId> = (0..n)
        .map(|i| TeamId::new(&format!("T{:0width$}", i + 1)).expect("synth team name"))
        .collect();
    // Evenly spaced latent strengths; team index equals strength rank.
    let strengths: Vec<f64> = (0..n)
        .map(|i| config.strength_spread * (i as f64 / (n - 1) as f64 - 0.5))
        .collect();
    let cover_offsets = per_team_offsets(&config.line_bias, n);
    let over_offsets = per_team_offsets(&config.ou_bias, n);

    let slots = schedule(n, config.games_per_team);
    let mut games = Vec::with_capacity(config.seasons * n * config.games_per_team / 2);

    for s in 0..config.seasons {
        let season = SeasonId::new(config.first_season.start_year() + s as i32)
            .expect("validated season range");
        let opening = chrono::NaiveDate::from_ymd_opt(season.start_year(), 11, 1)
            .expect("November 1st exists");
        for (slot_idx, pairs) in slots.iter().enumerate() {
            let date = opening + chrono::Duration::days(slot_idx as i64);
            for &(home, away) in pairs {
                let game = generate_game(
                    &mut rng,
                    config,
                    &teams,
                    &strengths,
                    &cover_offsets,
                    &over_offsets,
                    season,
                    date,
                    home,
                    away,
                );
                games.push(game);
            }
        }
    }

    Ok(Dataset::from_games(
        games,
        &format!("synth:seed={}", config.seed),
    )?)
}

#[allow(clippy::too_many_arguments)]
fn generate_game(
    rng: &mut ChaCha8Rng,
    config: &SynthConfig,
    teams: &[TeamId],
    strengths: &[f64],
    cover_offsets: &[f64],
    over_offsets: &[f64],
    season: SeasonId,
    date: chrono::NaiveDate,
    home: usize,
    away: usize,
) -> GameRecord {
    // Home margin: strength gap plus triangular integer noise, never zero.
    let mu = strengths[home] - strengths[away];
    let eta =
        rng.gen_range(-MARGIN_NOISE..=MARGIN_NOISE) + rng.gen_range(-MARGIN_NOISE..=MARGIN_NOISE);
    let mut margin = mu.round() as i64 + eta;
    if margin == 0 {
        margin = if rng.gen::<bool>() { 1 } else { -1 };
    }

    // Spread: line = margin - xi, so the home side covers iff xi > 0.
    let p_cover_home = (0.5 + cover_offsets[home] - cover_offsets[away]).clamp(0.02, 0.98);
    let xi_quarters = line_noise_quarters(rng, config.allow_pushes, p_cover_home);
    let mut raw_quarters = margin * 4 - xi_quarters;
    if raw_quarters == 0 {
        // push mode with xi = margin: keep the favorite on the winner
        raw_quarters = margin.signum() * 4;
    }
    let favorite_idx = if raw_quarters > 0 { home } else { away };
    let mut spread_quarters = raw_quarters.abs();
    if !config.vig_free {
        spread_quarters += 4; // shade one point against the favorite
    }

    // Total: base plus symmetric noise, parity-matched to the margin so the
    // implied scores are integers.
    let tau = rng.gen_range(-TOTAL_NOISE..=TOTAL_NOISE) + rng.gen_range(-TOTAL_NOISE..=TOTAL_NOISE);
    let mut total = BASE_TOTAL + tau;
    if (total - margin) % 2 != 0 {
        total += if rng.gen::<bool>() { 1 } else { -1 };
    }
    let p_over = (0.5 + over_offsets[home] + over_offsets[away]).clamp(0.02, 0.98);
    let omega_quarters = line_noise_quarters(rng, config.allow_pushes, p_over);
    let total_line_quarters = total * 4 - omega_quarters;

    let home_score = ((total + margin) / 2) as u32;
    let away_score = ((total - margin) / 2) as u32;
    debug_assert!(total_line_quarters >= 0);

    GameRecord {
        date,
        season,
        home: teams[home].clone(),
        away: teams[away].clone(),
        home_score,
        away_score,
        favorite: Some(teams[favorite_idx].clone()),
        spread: Some(Points::from_quarters(spread_quarters)),
        total_line: Some(Points::from_quarters(total_line_quarters)),
    }
}

/// Draws the signed line noise in quarter-points. Positive sign with
/// probability `p_positive`; half-point magnitudes by default, integer
/// magnitudes (including a possible zero, i.e. a push) in push mode.
fn line_noise_quarters(rng: &mut ChaCha8Rng, allow_pushes: bool, p_positive: f64) -> i64 {
    if allow_pushes {
        // one in (2m+1) outcomes lands exactly on the line
        if rng.gen_range(0..(2 * LINE_MAGNITUDES + 1)) == 0 {
            return 0;
        }
        let magnitude = rng.gen_range(1..=LINE_MAGNITUDES) * 4;
        let positive = rng.gen::<f64>() < p_positive;
        if positive {
            magnitude
        } else {
            -magnitude
        }
    } else {
        let magnitude = rng.gen_range(0..LINE_MAGNITUDES) * 4 + 2;
        let positive = rng.gen::<f64>() < p_positive;
        if positive {
            magnitude
        } else {
            -magnitude
        }
    }
}

// ---------------------------------------------------------------------------
// Null distribution
// ---------------------------------------------------------------------------

/// One side's stopping behaviour across replications.
#[derive(Debug, Clone)]
pub struct NullSide {
    pub stop_k: Vec<usize>,
    pub cumulative_profit: Vec<f64>,
}

impl NullSide {
    pub fn mean_stop(&self) -> f64 {
        self.stop_k.iter().sum::<usize>() as f64 / self.stop_k.len() as f64
    }

    pub fn max_stop(&self) -> usize {
        self.stop_k.iter().copied().max().unwrap_or(0)
    }

    pub fn frac_stop_at_least(&self, k: usize) -> f64 {
        let hits = self.stop_k.iter().filter(|&&s| s >= k).count();
        hits as f64 / self.stop_k.len() as f64
    }
}

/// Empirical distribution of the running-average walk under the null
/// (no injected bias): how deep the walk runs and how much spurious
/// profit it reports, per side.
#[derive(Debug, Clone)]
pub struct NullDistribution {
    pub replications: usize,
    pub cover_top: NullSide,
    pub nocover_bottom: NullSide,
}

impl NullDistribution {
    /// Probability that either side's walk reaches at least `k`, with its
    /// Monte Carlo standard error.
    pub fn prob_either_stop_at_least(&self, k: usize) -> (f64, f64) {
        let n = self.replications;
        let hits = self
            .cover_top
            .stop_k
            .iter()
            .zip(&self.nocover_bottom.stop_k)
            .filter(|&(&a, &b)| a >= k || b >= k)
            .count();
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        (p, se)
    }
}

/// Replays the full generate -> profile -> walk pipeline `replications`
/// times under the null. Replication `r` uses seed `config.seed + r`.
pub fn null_distribution(
    config: &SynthConfig,
    replications: usize,
) -> Result<NullDistribution, SynthError> {
    config.validate()?;
    if !config.line_bias.is_empty() {
        return Err(SynthError::InvalidConfig(
            "null_distribution requires line_bias to be empty".into(),
        ));
    }
    if replications == 0 {
        return Err(SynthError::InvalidConfig("replications is zero".into()));
    }

    let mut cover_top = NullSide {
        stop_k: Vec::new(),
        cumulative_profit: Vec::new(),
    };
    let mut nocover_bottom = NullSide {
        stop_k: Vec::new(),
        cumulative_profit: Vec::new(),
    };
    let era = config.era();
    for r in 0..replications {
        let rep_config = SynthConfig {
            seed: config.seed.wrapping_add(r as u64),
            ..config.clone()
        };
        let ds = generate(&rep_config)?;
        let profile = build_profile(&ds, &era)?;
        let top = running_average(&profile, EdgeSide::CoverTop, BREAK_EVEN_TABLES)?;
        let bottom = running_average(&profile, EdgeSide::NocoverBottom, BREAK_EVEN_TABLES)?;
        cover_top.stop_k.push(top.stop_k);
        cover_top.cumulative_profit.push(top.cumulative_profit);
        nocover_bottom.stop_k.push(bottom.stop_k);
        nocover_bottom
            .cumulative_profit
            .push(bottom.cumulative_profit);
    }
    Ok(NullDistribution {
        replications,
        cover_top,
        nocover_bottom,
    })
}
