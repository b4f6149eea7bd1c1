//! Flat-file ingestion: CSV parsing, season validation, canonical
//! serialization, and dataset digests.
//!
//! Canonical column order is
//! `date,season,home,away,home_score,away_score,favorite,spread,total_line`.
//! Empty `favorite`/`spread` cells mean no spread was posted (both must be
//! empty together); an empty `total_line` means no total. Dates are
//! ISO-8601. A file is rejected whole if any row is malformed, so every
//! downstream analysis is reproducible from a single artifact.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{GameRecord, ModelError, Points, SeasonId, TeamId};

pub const CSV_HEADER: &str =
    "date,season,home,away,home_score,away_score,favorite,spread,total_line";

/// Fraction of games allowed to lack a line before validation warns.
pub const MISSING_LINE_WARN_FRACTION: f64 = 0.05;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} rejected: {} problem row(s), first: {}", .1.len(), .1[0])]
    Rejected(String, Vec<RowIssue>),
    #[error("season {0} not present in dataset")]
    UnknownSeason(SeasonId),
}

/// A problem found on one input row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowIssue {
    Malformed { line: u64, reason: String },
    DuplicateGame { line: u64, key: String },
}

impl fmt::Display for RowIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowIssue::Malformed { line, reason } => {
                write!(f, "line {line}: {reason}")
            }
            RowIssue::DuplicateGame { line, key } => {
                write!(f, "line {line}: duplicate game {key}")
            }
        }
    }
}

/// Where a dataset came from and what it hashes to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    /// SHA-256 of the canonical CSV serialization, hex encoded.
    pub digest: String,
    pub row_count: usize,
    pub source: String,
}

/// An immutable, canonically ordered collection of game records.
///
/// Games are sorted by (season, date, home name) and the
/// (season, date, home, away) key is unique.
#[derive(Debug, Clone)]
pub struct Dataset {
    games: Vec<GameRecord>,
    seasons: BTreeSet<SeasonId>,
    provenance: Provenance,
}

impl Dataset {
    /// Builds a dataset from records gathered in any order: validates each
    /// record, sorts canonically, rejects duplicates and tied scores, and
    /// computes the digest.
    pub fn from_games(mut games: Vec<GameRecord>, source: &str) -> Result<Dataset, IngestError> {
        let mut issues = Vec::new();
        for (i, game) in games.iter().enumerate() {
            let line = (i + 2) as u64; // pretend 1 header + 1-based rows
            if let Err(e) = game.validate() {
                issues.push(RowIssue::Malformed {
                    line,
                    reason: e.to_string(),
                });
            } else if game.home_score == game.away_score {
                issues.push(RowIssue::Malformed {
                    line,
                    reason: ModelError::TiedScore(game.home_score).to_string(),
                });
            }
        }
        if !issues.is_empty() {
            return Err(IngestError::Rejected(source.to_string(), issues));
        }

        games.sort_by(|a, b| {
            (a.season, a.date, a.home.name(), a.away.name()).cmp(&(
                b.season,
                b.date,
                b.home.name(),
                b.away.name(),
            ))
        });
        for pair in games.windows(2) {
            if pair[0].season == pair[1].season
                && pair[0].date == pair[1].date
                && pair[0].home == pair[1].home
                && pair[0].away == pair[1].away
            {
                issues.push(RowIssue::DuplicateGame {
                    line: 0,
                    key: format!(
                        "({}, {}, {}, {})",
                        pair[1].season, pair[1].date, pair[1].home, pair[1].away
                    ),
                });
            }
        }
        if !issues.is_empty() {
            return Err(IngestError::Rejected(source.to_string(), issues));
        }

        let seasons: BTreeSet<SeasonId> = games.iter().map(|g| g.season).collect();
        let mut ds = Dataset {
            games,
            seasons,
            provenance: Provenance {
                digest: String::new(),
                row_count: 0,
                source: source.to_string(),
            },
        };
        ds.provenance.row_count = ds.games.len();
        ds.provenance.digest = sha256_hex(ds.to_csv().as_bytes());
        Ok(ds)
    }

    pub fn games(&self) -> &[GameRecord] {
        &self.games
    }

    pub fn seasons(&self) -> &BTreeSet<SeasonId> {
        &self.seasons
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn digest(&self) -> &str {
        &self.provenance.digest
    }

    pub fn season_games(&self, season: SeasonId) -> impl Iterator<Item = &GameRecord> {
        self.games.iter().filter(move |g| g.season == season)
    }

    pub fn teams_in_season(&self, season: SeasonId) -> BTreeSet<TeamId> {
        let mut teams = BTreeSet::new();
        for g in self.season_games(season) {
            teams.insert(g.home.clone());
            teams.insert(g.away.clone());
        }
        teams
    }

    /// Canonical CSV serialization; `parse_games_from_str` of this text
    /// reproduces the dataset exactly.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER.split(',')).expect("write header");
        for g in &self.games {
            w.write_record([
                g.date.format("%Y-%m-%d").to_string(),
                g.season.label(),
                g.home.name().to_string(),
                g.away.name().to_string(),
                g.home_score.to_string(),
                g.away_score.to_string(),
                g.favorite
                    .as_ref()
                    .map(|t| t.name().to_string())
                    .unwrap_or_default(),
                g.spread.map(|p| p.to_string()).unwrap_or_default(),
                g.total_line.map(|p| p.to_string()).unwrap_or_default(),
            ])
            .expect("write row");
        }
        String::from_utf8(w.into_inner().expect("flush csv")).expect("utf8 csv")
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Parses a dataset from a CSV file. The whole file is rejected if any row
/// is malformed or duplicated; all problems are reported with line numbers.
pub fn parse_games(path: &Path) -> Result<Dataset, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_games_from_str(&text, &path.display().to_string())
}

/// Same as [`parse_games`] but from in-memory text.
pub fn parse_games_from_str(text: &str, source: &str) -> Result<Dataset, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());

    let mut issues: Vec<RowIssue> = Vec::new();
    {
        let headers = reader.headers().map_err(|e| {
            IngestError::Rejected(
                source.to_string(),
                vec![RowIssue::Malformed {
                    line: 1,
                    reason: format!("bad header: {e}"),
                }],
            )
        })?;
        let expected: Vec<&str> = CSV_HEADER.split(',').collect();
        let got: Vec<&str> = headers.iter().collect();
        if got != expected {
            return Err(IngestError::Rejected(
                source.to_string(),
                vec![RowIssue::Malformed {
                    line: 1,
                    reason: format!(
                        "header mismatch: expected `{CSV_HEADER}`, got `{}`",
                        got.join(",")
                    ),
                }],
            ));
        }
    }

    let mut games = Vec::new();
    let mut keys: BTreeSet<(SeasonId, NaiveDate, String, String)> = BTreeSet::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                issues.push(RowIssue::Malformed {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        match parse_row(&record) {
            Ok(game) => {
                let key = (
                    game.season,
                    game.date,
                    game.home.name().to_string(),
                    game.away.name().to_string(),
                );
                if !keys.insert(key.clone()) {
                    issues.push(RowIssue::DuplicateGame {
                        line,
                        key: format!("({}, {}, {}, {})", key.0, key.1, key.2, key.3),
                    });
                } else {
                    games.push(game);
                }
            }
            Err(reason) => issues.push(RowIssue::Malformed { line, reason }),
        }
    }

    if !issues.is_empty() {
        return Err(IngestError::Rejected(source.to_string(), issues));
    }
    Dataset::from_games(games, source)
}

fn parse_row(record: &csv::StringRecord) -> Result<GameRecord, String> {
    if record.len() != 9 {
        return Err(format!("expected 9 fields, found {}", record.len()));
    }
    let field = |i: usize| record.get(i).unwrap_or("").trim();

    let date = NaiveDate::parse_from_str(field(0), "%Y-%m-%d")
        .map_err(|_| format!("bad date `{}` (expected YYYY-MM-DD)", field(0)))?;
    let season: SeasonId = field(1).parse().map_err(|e: ModelError| e.to_string())?;
    let home = TeamId::new(field(2)).map_err(|e| format!("home: {e}"))?;
    let away = TeamId::new(field(3)).map_err(|e| format!("away: {e}"))?;
    let home_score: u32 = field(4)
        .parse()
        .map_err(|_| format!("bad home_score `{}`", field(4)))?;
    let away_score: u32 = field(5)
        .parse()
        .map_err(|_| format!("bad away_score `{}`", field(5)))?;
    if home_score == away_score {
        return Err(ModelError::TiedScore(home_score).to_string());
    }

    let favorite = match field(6) {
        "" => None,
        name => Some(TeamId::new(name).map_err(|e| format!("favorite: {e}"))?),
    };
    let spread = parse_optional_points(field(7), "spread")?;
    let total_line = parse_optional_points(field(8), "total_line")?;

    GameRecord::new(
        date, season, home, away, home_score, away_score, favorite, spread, total_line,
    )
    .map_err(|e| e.to_string())
}

fn parse_optional_points(text: &str, what: &str) -> Result<Option<Points>, String> {
    if text.is_empty() {
        return Ok(None);
    }
    let p: Points = text
        .parse()
        .map_err(|e: ModelError| format!("{what}: {e}"))?;
    if p.is_negative() {
        return Err(format!("{what}: negative line {p}"));
    }
    Ok(Some(p))
}

// ---------------------------------------------------------------------------
// Season validation
// ---------------------------------------------------------------------------

/// Outcome of checking one season's completeness.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub season: SeasonId,
    pub teams_found: usize,
    pub games_per_team: std::collections::BTreeMap<TeamId, usize>,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Checks that a season has the expected number of teams; unequal per-team
/// game counts (lockout-length seasons) and sparsely lined games produce
/// warnings, not errors.
pub fn validate_season(
    ds: &Dataset,
    season: SeasonId,
    expected_teams: usize,
) -> Result<ValidationReport, IngestError> {
    if !ds.seasons().contains(&season) {
        return Err(IngestError::UnknownSeason(season));
    }

    let mut games_per_team: std::collections::BTreeMap<TeamId, usize> = Default::default();
    let mut total_games = 0usize;
    let mut missing_spread = 0usize;
    let mut missing_total = 0usize;
    for g in ds.season_games(season) {
        *games_per_team.entry(g.home.clone()).or_insert(0) += 1;
        *games_per_team.entry(g.away.clone()).or_insert(0) += 1;
        total_games += 1;
        if g.spread.is_none() {
            missing_spread += 1;
        }
        if g.total_line.is_none() {
            missing_total += 1;
        }
    }

    let teams_found = games_per_team.len();
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    if teams_found != expected_teams {
        errors.push(format!(
            "{teams_found} teams found, expected {expected_teams}"
        ));
    }

    let min_games = games_per_team.values().copied().min().unwrap_or(0);
    let max_games = games_per_team.values().copied().max().unwrap_or(0);
    if min_games != max_games {
        warnings.push(format!("unequal games per team: {min_games}..{max_games}"));
    }

    let frac = |n: usize| n as f64 / total_games.max(1) as f64;
    if frac(missing_spread) > MISSING_LINE_WARN_FRACTION {
        warnings.push(format!(
            "spread missing for {missing_spread} of {total_games} games"
        ));
    }
    if frac(missing_total) > MISSING_LINE_WARN_FRACTION {
        warnings.push(format!(
            "total_line missing for {missing_total} of {total_games} games"
        ));
    }

    Ok(ValidationReport {
        season,
        teams_found,
        games_per_team,
        warnings,
        errors,
    })
}
