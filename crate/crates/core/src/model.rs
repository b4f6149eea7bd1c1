//! Domain types for game records and the pure derivation of betting outcomes.
//!
//! Lines live on a quarter-point grid and are stored as exact integer
//! quarter-points ([`Points`]), never binary floating point, so push
//! detection is exact. Spreads are kept as a non-negative number of points
//! laid by an explicit favorite; a pick-em game is a favorite laying zero.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("team name is empty")]
    EmptyTeamName,
    #[error("season start year {0} outside supported range 1946..=2100")]
    SeasonOutOfRange(i32),
    #[error("bad season label `{0}`: expected `YYYY-YYYY` with consecutive years")]
    BadSeasonLabel(String),
    #[error("`{0}` is not a points value on the quarter-point grid")]
    BadPoints(String),
    #[error("line value {0} is negative")]
    NegativeLine(Points),
    #[error("home and away are both `{0}`")]
    SameTeam(String),
    #[error("favorite `{favorite}` is neither `{home}` nor `{away}`")]
    InconsistentLine {
        favorite: String,
        home: String,
        away: String,
    },
    #[error("spread and favorite must be present together")]
    HalfSpecifiedSpread,
    #[error("tied final score {0}-{0}")]
    TiedScore(u32),
    #[error("era `{0}` has first season after last season")]
    EmptyEra(String),
    #[error("era team count {0} too small (need at least 4)")]
    TinyEra(usize),
}

// ---------------------------------------------------------------------------
// Points on the quarter-point grid
// ---------------------------------------------------------------------------

/// A signed points quantity stored as integer quarter-points.
///
/// Used for betting lines (spread, total) and for the derived deltas, so
/// that comparisons like "margin equals spread" are exact.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Points {
    quarters: i64,
}

impl Points {
    pub const ZERO: Points = Points { quarters: 0 };

    pub fn from_quarters(quarters: i64) -> Points {
        Points { quarters }
    }

    /// Whole points, e.g. a final-score margin.
    pub fn from_int(points: i64) -> Points {
        Points {
            quarters: points * 4,
        }
    }

    pub fn quarters(self) -> i64 {
        self.quarters
    }

    pub fn as_f64(self) -> f64 {
        self.quarters as f64 / 4.0
    }

    pub fn is_zero(self) -> bool {
        self.quarters == 0
    }

    pub fn is_positive(self) -> bool {
        self.quarters > 0
    }

    pub fn is_negative(self) -> bool {
        self.quarters < 0
    }

    pub fn abs(self) -> Points {
        Points {
            quarters: self.quarters.abs(),
        }
    }
}

impl Add for Points {
    type Output = Points;
    fn add(self, rhs: Points) -> Points {
        Points {
            quarters: self.quarters + rhs.quarters,
        }
    }
}

impl Sub for Points {
    type Output = Points;
    fn sub(self, rhs: Points) -> Points {
        Points {
            quarters: self.quarters - rhs.quarters,
        }
    }
}

impl Neg for Points {
    type Output = Points;
    fn neg(self) -> Points {
        Points {
            quarters: -self.quarters,
        }
    }
}

impl fmt::Display for Points {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.quarters < 0 { "-" } else { "" };
        let q = self.quarters.abs();
        let frac = match q % 4 {
            0 => "",
            1 => ".25",
            2 => ".5",
            _ => ".75",
        };
        write!(f, "{}{}{}", sign, q / 4, frac)
    }
}

impl fmt::Debug for Points {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Points({})", self)
    }
}

impl FromStr for Points {
    type Err = ModelError;

    /// Parses decimal text like `7`, `3.5`, `5.25`, `-1.75`.
    /// Anything off the quarter-point grid is rejected.
    fn from_str(s: &str) -> Result<Points, ModelError> {
        let bad = || ModelError::BadPoints(s.to_string());
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1i64, s),
        };
        if body.is_empty() {
            return Err(bad());
        }
        let (int_part, frac_part) = match body.split_once('.') {
            Some((_, "")) => return Err(bad()), // trailing dot
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: i64 = int_part.parse().map_err(|_| bad())?;
        let frac_quarters = match frac_part {
            "" | "0" | "00" => 0,
            "25" => 1,
            "5" | "50" => 2,
            "75" => 3,
            _ => return Err(bad()),
        };
        Ok(Points {
            quarters: sign * (whole * 4 + frac_quarters),
        })
    }
}

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

/// Canonical team label. Equality is byte equality of the trimmed name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct TeamId(String);

impl TeamId {
    pub fn new(name: &str) -> Result<TeamId, ModelError> {
        let trimmed = name.trim();
        if trimmed.is_empty() {
            return Err(ModelError::EmptyTeamName);
        }
        Ok(TeamId(trimmed.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TeamId({})", self.0)
    }
}

/// A season identified by its start year; displayed as `YYYY-YYYY`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "String")]
pub struct SeasonId {
    start_year: i32,
}

impl SeasonId {
    pub fn new(start_year: i32) -> Result<SeasonId, ModelError> {
        if !(1946..=2100).contains(&start_year) {
            return Err(ModelError::SeasonOutOfRange(start_year));
        }
        Ok(SeasonId { start_year })
    }

    pub fn start_year(self) -> i32 {
        self.start_year
    }

    pub fn label(self) -> String {
        format!("{}-{}", self.start_year, self.start_year + 1)
    }

    pub fn next(self) -> Result<SeasonId, ModelError> {
        SeasonId::new(self.start_year + 1)
    }
}

impl From<SeasonId> for String {
    fn from(s: SeasonId) -> String {
        s.label()
    }
}

impl fmt::Display for SeasonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start_year, self.start_year + 1)
    }
}

impl fmt::Debug for SeasonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeasonId({})", self)
    }
}

impl FromStr for SeasonId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<SeasonId, ModelError> {
        let bad = || ModelError::BadSeasonLabel(s.to_string());
        let (first, second) = s.split_once('-').ok_or_else(bad)?;
        let first: i32 = first.parse().map_err(|_| bad())?;
        let second: i32 = second.parse().map_err(|_| bad())?;
        if second != first + 1 {
            return Err(bad());
        }
        SeasonId::new(first)
    }
}

/// A block of consecutive seasons sharing one league team count.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct EraSubgroup {
    pub name: String,
    pub first: SeasonId,
    pub last: SeasonId,
    pub team_count: usize,
}

impl EraSubgroup {
    pub fn new(
        name: &str,
        first: SeasonId,
        last: SeasonId,
        team_count: usize,
    ) -> Result<EraSubgroup, ModelError> {
        if first > last {
            return Err(ModelError::EmptyEra(name.to_string()));
        }
        if team_count < 4 {
            return Err(ModelError::TinyEra(team_count));
        }
        Ok(EraSubgroup {
            name: name.to_string(),
            first,
            last,
            team_count,
        })
    }

    /// The default NBA era subgroups: 27 teams 1990-91..1994-95, 29 teams
    /// 1995-96..2003-04, 30 teams 2004-05..2013-14.
    pub fn nba_defaults() -> Vec<EraSubgroup> {
        let era = |name: &str, a: i32, b: i32, n: usize| {
            EraSubgroup::new(
                name,
                SeasonId::new(a).expect("default era start"),
                SeasonId::new(b).expect("default era end"),
                n,
            )
            .expect("default era")
        };
        vec![
            era("ERA27", 1990, 1994, 27),
            era("ERA29", 1995, 2003, 29),
            era("ERA30", 2004, 2013, 30),
        ]
    }

    pub fn seasons(&self) -> impl Iterator<Item = SeasonId> + '_ {
        (self.first.start_year..=self.last.start_year)
            .map(|y| SeasonId::new(y).expect("season within validated era range"))
    }

    pub fn season_count(&self) -> usize {
        (self.last.start_year - self.first.start_year) as usize + 1
    }

    pub fn contains(&self, season: SeasonId) -> bool {
        season >= self.first && season <= self.last
    }
}

// ---------------------------------------------------------------------------
// Game records
// ---------------------------------------------------------------------------

/// One historical game: final score plus the bookmaker lines, if known.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GameRecord {
    pub date: NaiveDate,
    pub season: SeasonId,
    pub home: TeamId,
    pub away: TeamId,
    pub home_score: u32,
    pub away_score: u32,
    /// The team laying points; equals `home` or `away`. Present iff `spread` is.
    pub favorite: Option<TeamId>,
    /// Non-negative points laid by the favorite, quarter-point grid.
    pub spread: Option<Points>,
    /// Non-negative combined-score line, quarter-point grid.
    pub total_line: Option<Points>,
}

impl GameRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        date: NaiveDate,
        season: SeasonId,
        home: TeamId,
        away: TeamId,
        home_score: u32,
        away_score: u32,
        favorite: Option<TeamId>,
        spread: Option<Points>,
        total_line: Option<Points>,
    ) -> Result<GameRecord, ModelError> {
        let game = GameRecord {
            date,
            season,
            home,
            away,
            home_score,
            away_score,
            favorite,
            spread,
            total_line,
        };
        game.validate()?;
        Ok(game)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.home == self.away {
            return Err(ModelError::SameTeam(self.home.name().to_string()));
        }
        if self.favorite.is_some() != self.spread.is_some() {
            return Err(ModelError::HalfSpecifiedSpread);
        }
        if let Some(fav) = &self.favorite {
            if fav != &self.home && fav != &self.away {
                return Err(ModelError::InconsistentLine {
                    favorite: fav.name().to_string(),
                    home: self.home.name().to_string(),
                    away: self.away.name().to_string(),
                });
            }
        }
        if let Some(spread) = self.spread {
            if spread.is_negative() {
                return Err(ModelError::NegativeLine(spread));
            }
        }
        if let Some(total) = self.total_line {
            if total.is_negative() {
                return Err(ModelError::NegativeLine(total));
            }
        }
        Ok(())
    }

    pub fn total_points(&self) -> u32 {
        self.home_score + self.away_score
    }
}

// ---------------------------------------------------------------------------
// Derived betting outcomes
// ---------------------------------------------------------------------------

/// A team's result against the spread.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum AtsResult {
    Cover,
    NoCover,
    Push,
}

/// Game result against the total points line.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum OuResult {
    Over,
    Under,
    Push,
}

/// Spread settlement for one game.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpreadOutcome {
    pub favorite: TeamId,
    pub underdog: TeamId,
    pub favorite_result: AtsResult,
    /// Favorite's margin minus the spread (error in points w.r.t. the favorite).
    pub delta_c: Points,
}

impl SpreadOutcome {
    pub fn underdog_result(&self) -> AtsResult {
        match self.favorite_result {
            AtsResult::Cover => AtsResult::NoCover,
            AtsResult::NoCover => AtsResult::Cover,
            AtsResult::Push => AtsResult::Push,
        }
    }
}

/// Totals settlement for one game.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TotalOutcome {
    pub result: OuResult,
    /// Combined score minus the total line.
    pub delta_o: Points,
}

/// Betting outcomes derived from a single game record.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GameOutcome {
    pub winner: TeamId,
    pub loser: TeamId,
    /// Winning margin in points; always positive.
    pub delta_w: Points,
    /// Absent when the game carried no spread.
    pub spread: Option<SpreadOutcome>,
    /// Absent when the game carried no total line.
    pub total: Option<TotalOutcome>,
}

impl GameOutcome {
    /// ATS result for one of the participants; `None` when there was no
    /// spread or the team did not play in this game.
    pub fn ats_result(&self, team: &TeamId) -> Option<AtsResult> {
        let spread = self.spread.as_ref()?;
        if team == &spread.favorite {
            Some(spread.favorite_result)
        } else if team == &spread.underdog {
            Some(spread.underdog_result())
        } else {
            None
        }
    }

    pub fn ou_result(&self) -> Option<OuResult> {
        self.total.map(|t| t.result)
    }

    pub fn delta_c(&self) -> Option<Points> {
        self.spread.as_ref().map(|s| s.delta_c)
    }

    pub fn delta_o(&self) -> Option<Points> {
        self.total.map(|t| t.delta_o)
    }
}

/// Derives win/loss, against-the-spread, and over/under outcomes for a game.
///
/// The favorite covers iff its margin exceeds the spread, pushes iff the
/// margin equals the spread exactly, and otherwise the underdog covers.
/// Over/under settles the combined score against the total line the same way.
/// Tied final scores are rejected; overtime resolves ties in basketball.
pub fn derive_outcome(game: &GameRecord) -> Result<GameOutcome, ModelError> {
    game.validate()?;
    if game.home_score == game.away_score {
        return Err(ModelError::TiedScore(game.home_score));
    }

    let home_won = game.home_score > game.away_score;
    let (winner, loser) = if home_won {
        (game.home.clone(), game.away.clone())
    } else {
        (game.away.clone(), game.home.clone())
    };
    let delta_w = Points::from_int((game.home_score as i64 - game.away_score as i64).abs());

    let spread = match (&game.favorite, game.spread) {
        (Some(favorite), Some(spread)) => {
            let (fav_score, dog_score, underdog) = if favorite == &game.home {
                (game.home_score, game.away_score, game.away.clone())
            } else {
                (game.away_score, game.home_score, game.home.clone())
            };
            let margin = Points::from_int(fav_score as i64 - dog_score as i64);
            let delta_c = margin - spread;
            let favorite_result = if delta_c.is_positive() {
                AtsResult::Cover
            } else if delta_c.is_zero() {
                AtsResult::Push
            } else {
                AtsResult::NoCover
            };
            Some(SpreadOutcome {
                favorite: favorite.clone(),
                underdog,
                favorite_result,
                delta_c,
            })
        }
        _ => None,
    };

    let total = game.total_line.map(|line| {
        let delta_o = Points::from_int(game.total_points() as i64) - line;
        let result = if delta_o.is_positive() {
            OuResult::Over
        } else if delta_o.is_zero() {
            OuResult::Push
        } else {
            OuResult::Under
        };
        TotalOutcome { result, delta_o }
    });

    Ok(GameOutcome {
        winner,
        loser,
        delta_w,
        spread,
        total,
    })
}
