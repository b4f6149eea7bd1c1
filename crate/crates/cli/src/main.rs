//! Command-line interface for the coverline analytics pipeline.
//!
//! Subcommands mirror the pipeline stages: `ingest` and `validate` check
//! datasets, `stats` prints season standings, `profile` and `edge` analyze
//! ranking positions, `backtest` trains and evaluates the betting strategy,
//! `simulate` writes synthetic datasets, and `report` emits the whole
//! bundle. Files only ever appear under `--out` (or `$COVERLINE_OUT`), are
//! written via temp-and-rename, and are byte-deterministic for identical
//! inputs, flags, and seeds.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use coverline_core::edge::{running_average, EdgeReport, EdgeSide, BREAK_EVEN_TABLES};
use coverline_core::ingest::{parse_games, validate_season, Dataset, ValidationReport};
use coverline_core::model::{EraSubgroup, SeasonId};
use coverline_core::profile::{
    build_profile, build_profile_with_mode, group_cutoffs, AverageMode, PositionProfile,
    DEFAULT_HIGH_CUT, DEFAULT_LOW_CUT,
};
use coverline_core::report::{
    emit_backtest_table, emit_edge_table, emit_profile_figure, emit_profile_table,
    emit_stats_table, emit_win_figure, ReportBundle, ReportMeta, SCHEMA_VERSION,
};
use coverline_core::season_stats::{rank_by_win_pct, team_season_stats};
use coverline_core::strategy::{
    association, evaluate, outlier_shares, train, training_reports, StrategySpec,
};
use coverline_core::synth::{generate, BandBias, RankBand, SynthConfig};

#[derive(Parser)]
#[command(
    name = "coverline",
    version,
    about = "Point-spread analytics: standings profiles, running-average edges, and strategy backtests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a dataset, report its digest, and optionally write the
    /// canonical form
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check one season for completeness
    Validate {
        #[arg(long)]
        input: PathBuf,
        /// Season start year, e.g. 2010 for 2010-2011
        #[arg(long)]
        season: i32,
        /// Expected team count; inferred from era config when omitted
        #[arg(long)]
        expected_teams: Option<usize>,
        #[arg(long)]
        eras: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Standings-with-betting-percentages table per season
    Stats {
        #[arg(long)]
        input: PathBuf,
        /// Season start year; all seasons when omitted (requires --out)
        #[arg(long)]
        season: Option<i32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Per-position win/cover/over averages for an era
    Profile {
        #[arg(long)]
        input: PathBuf,
        /// Named era from --eras or the built-in NBA defaults
        #[arg(long)]
        era: Option<String>,
        /// Inclusive start-year range, e.g. 2004:2013
        #[arg(long)]
        seasons: Option<String>,
        #[arg(long)]
        eras: Option<PathBuf>,
        /// pooled: pool counts across seasons instead of averaging
        /// percentages
        #[arg(long)]
        pooled: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Running-average walks from both standings extremes
    Edge {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        era: Option<String>,
        #[arg(long)]
        seasons: Option<String>,
        #[arg(long)]
        eras: Option<PathBuf>,
        #[arg(long, default_value_t = BREAK_EVEN_TABLES)]
        break_even: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Train on one season range, evaluate on another
    Backtest {
        #[arg(long)]
        input: PathBuf,
        /// Training range, e.g. 1990:2013
        #[arg(long)]
        train: String,
        /// Test range, e.g. 2014:2015
        #[arg(long)]
        test: String,
        #[arg(long, default_value_t = 2.0)]
        profit_min: f64,
        #[arg(long, default_value_t = BREAK_EVEN_TABLES)]
        break_even: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Generate a synthetic dataset in the ingest CSV format
    Simulate {
        #[arg(long, default_value_t = 30)]
        teams: usize,
        #[arg(long, default_value_t = 82)]
        games_per_team: usize,
        #[arg(long, default_value_t = 10)]
        seasons: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Start year of the first generated season
        #[arg(long, default_value_t = 1990)]
        first_season: i32,
        #[arg(long, default_value_t = 12.0)]
        strength_spread: f64,
        /// Cover-probability offset for the strongest band, e.g. 0.06
        #[arg(long, allow_negative_numbers = true)]
        top_cover_bias: Option<f64>,
        /// Cover-probability offset for the weakest band, e.g. -0.06
        #[arg(long, allow_negative_numbers = true)]
        bottom_cover_bias: Option<f64>,
        /// Over-probability offset for the strongest band
        #[arg(long, allow_negative_numbers = true)]
        top_ou_bias: Option<f64>,
        /// Over-probability offset for the weakest band
        #[arg(long, allow_negative_numbers = true)]
        bottom_ou_bias: Option<f64>,
        /// How many teams each biased band spans
        #[arg(long, default_value_t = 6)]
        band_size: usize,
        /// Integer lines so pushes can occur
        #[arg(long)]
        allow_pushes: bool,
        /// Shade lines one point against the favorite
        #[arg(long)]
        shaded_lines: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Emit the full analysis bundle for every era in the dataset
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eras: Option<PathBuf>,
        #[arg(long, default_value_t = BREAK_EVEN_TABLES)]
        break_even: f64,
        #[arg(long, default_value_t = DEFAULT_LOW_CUT)]
        low_cut: f64,
        #[arg(long, default_value_t = DEFAULT_HIGH_CUT)]
        high_cut: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

/// Flag problems exit 2, everything else that fails exits 1.
enum CliError {
    Flags(String),
    Run(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Run(e.into())
    }
}

fn flags(msg: impl Into<String>) -> CliError {
    CliError::Flags(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Flags(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ingest { input, out, format } => cmd_ingest(&input, out, format),
        Command::Validate {
            input,
            season,
            expected_teams,
            eras,
            format,
        } => cmd_validate(&input, season, expected_teams, eras.as_deref(), format),
        Command::Stats {
            input,
            season,
            out,
            format,
        } => cmd_stats(&input, season, out, format),
        Command::Profile {
            input,
            era,
            seasons,
            eras,
            pooled,
            out,
            format,
        } => cmd_profile(&input, era, seasons, eras.as_deref(), pooled, out, format),
        Command::Edge {
            input,
            era,
            seasons,
            eras,
            break_even,
            out,
            format,
        } => cmd_edge(
            &input,
            era,
            seasons,
            eras.as_deref(),
            break_even,
            out,
            format,
        ),
        Command::Backtest {
            input,
            train,
            test,
            profit_min,
            break_even,
            out,
            format,
        } => cmd_backtest(&input, &train, &test, profit_min, break_even, out, format),
        Command::Simulate {
            teams,
            games_per_team,
            seasons,
            seed,
            first_season,
            strength_spread,
            top_cover_bias,
            bottom_cover_bias,
            top_ou_bias,
            bottom_ou_bias,
            band_size,
            allow_pushes,
            shaded_lines,
            out,
            format,
        } => cmd_simulate(SimulateArgs {
            teams,
            games_per_team,
            seasons,
            seed,
            first_season,
            strength_spread,
            top_cover_bias,
            bottom_cover_bias,
            top_ou_bias,
            bottom_ou_bias,
            band_size,
            allow_pushes,
            shaded_lines,
            out,
            format,
        }),
        Command::Report {
            input,
            eras,
            break_even,
            low_cut,
            high_cut,
            out,
            format,
        } => cmd_report(
            &input,
            eras.as_deref(),
            break_even,
            low_cut,
            high_cut,
            out,
            format,
        ),
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

/// Out dir from the flag, falling back to $COVERLINE_OUT.
fn resolve_out(out: Option<PathBuf>) -> Option<PathBuf> {
    out.or_else(|| std::env::var_os("COVERLINE_OUT").map(PathBuf::from))
}

/// Writes via a sibling temp file and rename, so a crash never leaves a
/// partial artifact behind.
fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = path
        .parent()
        .ok_or_else(|| flags("output path has no parent"))?;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

struct Emitter {
    out: Option<PathBuf>,
    written: Vec<String>,
}

impl Emitter {
    fn new(out: Option<PathBuf>) -> Emitter {
        Emitter {
            out: resolve_out(out),
            written: Vec::new(),
        }
    }

    fn write(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        if let Some(dir) = &self.out {
            write_atomic(&dir.join(name), content)?;
            self.written.push(name.to_string());
        }
        Ok(())
    }

    fn summary(&self) -> String {
        match &self.out {
            Some(dir) if !self.written.is_empty() => {
                let mut s = String::new();
                for name in &self.written {
                    let _ = writeln!(s, "wrote {}", dir.join(name).display());
                }
                s
            }
            _ => String::new(),
        }
    }
}

fn load_dataset(input: &Path) -> Result<Dataset, CliError> {
    parse_games(input).map_err(|e| CliError::Run(anyhow!("{e}")))
}

fn parse_season_year(year: i32) -> Result<SeasonId, CliError> {
    SeasonId::new(year).map_err(|e| flags(e.to_string()))
}

/// `1990:2013` -> the inclusive list of seasons starting in those years.
fn parse_season_range(text: &str) -> Result<Vec<SeasonId>, CliError> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| flags(format!("bad season range `{text}`: expected START:END")))?;
    let a: i32 = a
        .trim()
        .parse()
        .map_err(|_| flags(format!("bad start year `{a}` in `{text}`")))?;
    let b: i32 = b
        .trim()
        .parse()
        .map_err(|_| flags(format!("bad end year `{b}` in `{text}`")))?;
    if b < a {
        return Err(flags(format!("season range `{text}` runs backwards")));
    }
    (a..=b).map(parse_season_year).collect()
}

#[derive(Deserialize)]
struct EraFile {
    #[serde(default)]
    era: Vec<EraEntry>,
}

#[derive(Deserialize)]
struct EraEntry {
    name: String,
    first: i32,
    last: i32,
    teams: usize,
}

fn load_eras(path: &Path) -> Result<Vec<EraSubgroup>, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading era config {}", path.display()))?;
    let file: EraFile =
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if file.era.is_empty() {
        return Err(flags(format!(
            "{} defines no [[era]] entries",
            path.display()
        )));
    }
    file.era
        .into_iter()
        .map(|e| {
            EraSubgroup::new(
                &e.name,
                SeasonId::new(e.first).map_err(|err| flags(err.to_string()))?,
                SeasonId::new(e.last).map_err(|err| flags(err.to_string()))?,
                e.teams,
            )
            .map_err(|err| flags(err.to_string()))
        })
        .collect()
}

/// Groups the dataset's consecutive seasons by team count.
fn auto_eras(ds: &Dataset) -> Vec<EraSubgroup> {
    let mut eras: Vec<EraSubgroup> = Vec::new();
    let mut runs: Vec<(SeasonId, SeasonId, usize)> = Vec::new();
    for &season in ds.seasons() {
        let teams = ds.teams_in_season(season).len();
        match runs.last_mut() {
            Some((_, last, count))
                if *count == teams && last.start_year() + 1 == season.start_year() =>
            {
                *last = season;
            }
            _ => runs.push((season, season, teams)),
        }
    }
    for (first, last, teams) in runs {
        if teams < 4 {
            continue;
        }
        let name = format!("T{teams}-{}-{}", first.start_year(), last.start_year());
        if let Ok(era) = EraSubgroup::new(&name, first, last, teams) {
            eras.push(era);
        }
    }
    eras
}

/// Resolves the era to analyze from `--era`, `--seasons`, or the dataset.
fn resolve_era(
    ds: &Dataset,
    era_name: Option<String>,
    seasons: Option<String>,
    eras_file: Option<&Path>,
) -> Result<EraSubgroup, CliError> {
    match (era_name, seasons) {
        (Some(_), Some(_)) => Err(flags("give either --era or --seasons, not both")),
        (Some(name), None) => {
            let mut known = match eras_file {
                Some(path) => load_eras(path)?,
                None => EraSubgroup::nba_defaults(),
            };
            known.extend(auto_eras(ds));
            known
                .into_iter()
                .find(|e| e.name == name)
                .ok_or_else(|| flags(format!("unknown era `{name}`")))
        }
        (None, Some(range)) => {
            let seasons = parse_season_range(&range)?;
            let first = *seasons.first().expect("non-empty validated range");
            let last = *seasons.last().expect("non-empty validated range");
            let mut counts: Vec<usize> = Vec::new();
            for &s in &seasons {
                if !ds.seasons().contains(&s) {
                    return Err(CliError::Run(anyhow!("season {s} not in dataset")));
                }
                counts.push(ds.teams_in_season(s).len());
            }
            let n = counts[0];
            if counts.iter().any(|&c| c != n) {
                return Err(CliError::Run(anyhow!(
                    "season range {range} mixes team counts {counts:?}; analyze eras separately"
                )));
            }
            EraSubgroup::new(
                &format!("T{n}-{}-{}", first.start_year(), last.start_year()),
                first,
                last,
                n,
            )
            .map_err(|e| flags(e.to_string()))
        }
        (None, None) => Err(flags("need --era NAME or --seasons START:END")),
    }
}

fn check_break_even(break_even: f64) -> Result<(), CliError> {
    if !(50.0 < break_even && break_even < 60.0) {
        return Err(flags(format!(
            "--break-even {break_even} outside the supported (50, 60) percent range"
        )));
    }
    Ok(())
}

fn check_cutoffs(low: f64, high: f64) -> Result<(), CliError> {
    if !((0.0..=1.0).contains(&low) && (0.0..=1.0).contains(&high) && low < high) {
        return Err(flags(format!(
            "cutoffs must satisfy 0 <= low < high <= 1, got {low} and {high}"
        )));
    }
    Ok(())
}

fn meta_with(digest: &str, echo: &[(&str, String)]) -> ReportMeta {
    let mut meta = ReportMeta::new(digest);
    for (k, v) in echo {
        meta.config_echo.insert((*k).to_string(), v.clone());
    }
    meta
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).context("serializing json")?;
    s.push('\n');
    Ok(s)
}

fn print_payload(payload: &str) {
    print!("{payload}");
    if !payload.ends_with('\n') {
        println!();
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct IngestSummary {
    schema_version: u32,
    digest: String,
    row_count: usize,
    seasons: Vec<String>,
    source: String,
}

fn cmd_ingest(input: &Path, out: Option<PathBuf>, format: Format) -> Result<(), CliError> {
    let ds = load_dataset(input)?;
    let summary = IngestSummary {
        schema_version: SCHEMA_VERSION,
        digest: ds.digest().to_string(),
        row_count: ds.provenance().row_count,
        seasons: ds.seasons().iter().map(|s| s.label()).collect(),
        source: ds.provenance().source.clone(),
    };
    let mut emitter = Emitter::new(out);
    emitter.write("dataset.csv", &ds.to_csv())?;
    emitter.write("manifest.json", &to_json(&summary)?)?;

    match format {
        Format::Csv => print_payload(&ds.to_csv()),
        Format::Json => print_payload(&to_json(&summary)?),
        Format::Svg => return Err(flags("ingest has no svg output")),
    }
    eprint!("{}", emitter.summary());
    Ok(())
}

fn expected_teams_for(
    season: SeasonId,
    expected: Option<usize>,
    eras_file: Option<&Path>,
) -> Result<usize, CliError> {
    if let Some(n) = expected {
        return Ok(n);
    }
    let eras = match eras_file {
        Some(path) => load_eras(path)?,
        None => EraSubgroup::nba_defaults(),
    };
    eras.iter()
        .find(|e| e.contains(season))
        .map(|e| e.team_count)
        .ok_or_else(|| {
            flags(format!(
                "season {season} is outside every configured era; give --expected-teams"
            ))
        })
}

fn cmd_validate(
    input: &Path,
    season: i32,
    expected_teams: Option<usize>,
    eras_file: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let season = parse_season_year(season)?;
    let expected = expected_teams_for(season, expected_teams, eras_file)?;
    let ds = load_dataset(input)?;
    let report: ValidationReport =
        validate_season(&ds, season, expected).map_err(|e| CliError::Run(anyhow!("{e}")))?;

    match format {
        Format::Json => print_payload(&to_json(&report)?),
        Format::Csv => {
            let mut csv = String::from("team,games\n");
            for (team, games) in &report.games_per_team {
                let _ = writeln!(csv, "{},{games}", team.name());
            }
            print_payload(&csv);
        }
        Format::Svg => return Err(flags("validate has no svg output")),
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for e in &report.errors {
        eprintln!("error: {e}");
    }
    if !report.accepted() {
        return Err(CliError::Run(anyhow!(
            "season {season} failed validation with {} error(s)",
            report.errors.len()
        )));
    }
    Ok(())
}

fn cmd_stats(
    input: &Path,
    season: Option<i32>,
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    let ds = load_dataset(input)?;
    let seasons: Vec<SeasonId> = match season {
        Some(y) => vec![parse_season_year(y)?],
        None => ds.seasons().iter().copied().collect(),
    };
    let mut emitter = Emitter::new(out);
    if season.is_none() && emitter.out.is_none() {
        return Err(flags(
            "stats over all seasons needs --out (or give --season)",
        ));
    }

    let mut single_payload = None;
    let mut single_ranking = None;
    for s in &seasons {
        let ranking =
            rank_by_win_pct(team_season_stats(&ds, *s).map_err(|e| CliError::Run(anyhow!("{e}")))?)
                .map_err(|e| CliError::Run(anyhow!("{e}")))?;
        let table = emit_stats_table(&ranking);
        emitter.write(&format!("stats_{}.csv", s.label()), &table)?;
        if season.is_some() {
            single_payload = Some(table);
            single_ranking = Some(ranking);
        }
    }

    match (format, single_payload) {
        (Format::Csv, Some(table)) => print_payload(&table),
        (Format::Json, Some(_)) => {
            #[derive(Serialize)]
            struct StatsSummary {
                meta: ReportMeta,
                ranking: coverline_core::season_stats::SeasonRanking,
            }
            let summary = StatsSummary {
                meta: meta_with(ds.digest(), &[("subcommand", "stats".to_string())]),
                ranking: single_ranking.expect("ranking accompanies payload"),
            };
            print_payload(&to_json(&summary)?);
        }
        (Format::Svg, _) => return Err(flags("stats has no svg output")),
        // all-seasons mode: the files are the product
        (_, None) => print_payload(&emitter.summary()),
    }
    eprint!("{}", emitter.summary());
    Ok(())
}

fn cmd_profile(
    input: &Path,
    era: Option<String>,
    seasons: Option<String>,
    eras_file: Option<&Path>,
    pooled: bool,
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    let ds = load_dataset(input)?;
    let era = resolve_era(&ds, era, seasons, eras_file)?;
    let mode = if pooled {
        AverageMode::PooledCounts
    } else {
        AverageMode::MeanOfPercentages
    };
    let profile =
        build_profile_with_mode(&ds, &era, mode).map_err(|e| CliError::Run(anyhow!("{e}")))?;

    let table = emit_profile_table(&profile);
    let figure = emit_profile_figure(&profile).map_err(|e| CliError::Run(anyhow!("{e}")))?;
    let win_figure = emit_win_figure(&profile).map_err(|e| CliError::Run(anyhow!("{e}")))?;

    let mut emitter = Emitter::new(out);
    emitter.write(&format!("profile_{}.csv", era.name), &table)?;
    emitter.write(&format!("profile_{}.svg", era.name), &figure)?;
    emitter.write(&format!("win_{}.svg", era.name), &win_figure)?;

    match format {
        Format::Csv => print_payload(&table),
        Format::Json => {
            #[derive(Serialize)]
            struct ProfileSummary {
                meta: ReportMeta,
                profile: PositionProfile,
            }
            let summary = ProfileSummary {
                meta: meta_with(
                    ds.digest(),
                    &[
                        ("subcommand", "profile".to_string()),
                        ("era", profile.era.name.clone()),
                        ("pooled", pooled.to_string()),
                    ],
                ),
                profile,
            };
            print_payload(&to_json(&summary)?);
        }
        Format::Svg => print_payload(&figure),
    }
    eprint!("{}", emitter.summary());
    Ok(())
}

#[derive(Serialize)]
struct EdgeSummary {
    meta: ReportMeta,
    era: EraSubgroup,
    cover: EdgeReport,
    nocover: EdgeReport,
}

fn cmd_edge(
    input: &Path,
    era: Option<String>,
    seasons: Option<String>,
    eras_file: Option<&Path>,
    break_even: f64,
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    check_break_even(break_even)?;
    let ds = load_dataset(input)?;
    let era = resolve_era(&ds, era, seasons, eras_file)?;
    let profile = build_profile(&ds, &era).map_err(|e| CliError::Run(anyhow!("{e}")))?;
    let cover = running_average(&profile, EdgeSide::CoverTop, break_even)
        .map_err(|e| CliError::Run(anyhow!("{e}")))?;
    let nocover = running_average(&profile, EdgeSide::NocoverBottom, break_even)
        .map_err(|e| CliError::Run(anyhow!("{e}")))?;

    let cover_table = emit_edge_table(&cover);
    let nocover_table = emit_edge_table(&nocover);
    let figure = coverline_core::report::emit_edge_figure(&profile, &cover, &nocover)
        .map_err(|e| CliError::Run(anyhow!("{e}")))?;
    let summary = EdgeSummary {
        meta: meta_with(
            ds.digest(),
            &[
                ("subcommand", "edge".to_string()),
                ("break_even", format!("{break_even}")),
                ("era", era.name.clone()),
            ],
        ),
        era: era.clone(),
        cover,
        nocover,
    };

    let mut emitter = Emitter::new(out);
    emitter.write(&format!("edge_cover_{}.csv", era.name), &cover_table)?;
    emitter.write(&format!("edge_nocover_{}.csv", era.name), &nocover_table)?;
    emitter.write(&format!("edge_{}.svg", era.name), &figure)?;
    emitter.write(&format!("edge_{}.json", era.name), &to_json(&summary)?)?;

    match format {
        Format::Csv => {
            let mut both = String::new();
            for (name, table) in [("cover", &cover_table), ("nocover", &nocover_table)] {
                let _ = writeln!(both, "# table: {name}");
                both.push_str(table);
            }
            print_payload(&both);
        }
        Format::Json => print_payload(&to_json(&summary)?),
        Format::Svg => print_payload(&figure),
    }
    eprint!("{}", emitter.summary());
    Ok(())
}

#[derive(Serialize)]
struct BacktestSummary {
    meta: ReportMeta,
    spec: StrategySpec,
    train_cover: EdgeReport,
    train_nocover: EdgeReport,
    test: coverline_core::strategy::BacktestReport,
    association: coverline_core::strategy::Association,
    outlier_shares: coverline_core::strategy::OutlierShares,
}

fn cmd_backtest(
    input: &Path,
    train_range: &str,
    test_range: &str,
    profit_min: f64,
    break_even: f64,
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    check_break_even(break_even)?;
    if profit_min < 0.0 {
        return Err(flags(format!(
            "--profit-min {profit_min} must be non-negative"
        )));
    }
    let train_seasons = parse_season_range(train_range)?;
    let test_seasons = parse_season_range(test_range)?;
    let ds = load_dataset(input)?;

    let spec = train(&ds, &train_seasons, profit_min, break_even)
        .map_err(|e| CliError::Run(anyhow!("{e}")))?;
    let (train_cover, train_nocover) = training_reports(&ds, &train_seasons, break_even)
        .map_err(|e| CliError::Run(anyhow!("{e}")))?;
    let test = evaluate(&ds, &spec, &test_seasons).map_err(|e| CliError::Run(anyhow!("{e}")))?;
    for w in &test.warnings {
        eprintln!("warning: {w}");
    }
    let assoc = association(&ds, &train_seasons).map_err(|e| CliError::Run(anyhow!("{e}")))?;
    let shares = outlier_shares(&ds, &train_seasons, break_even)
        .map_err(|e| CliError::Run(anyhow!("{e}")))?;

    let summary = BacktestSummary {
        meta: meta_with(
            ds.digest(),
            &[
                ("subcommand", "backtest".to_string()),
                ("train", train_range.to_string()),
                ("test", test_range.to_string()),
                ("profit_min", format!("{profit_min}")),
                ("break_even", format!("{break_even}")),
            ],
        ),
        spec,
        train_cover,
        train_nocover,
        test,
        association: assoc,
        outlier_shares: shares,
    };

    let train_cover_table = emit_edge_table(&summary.train_cover);
    let train_nocover_table = emit_edge_table(&summary.train_nocover);
    let test_cover_table = emit_backtest_table(&summary.test, EdgeSide::CoverTop);
    let test_nocover_table = emit_backtest_table(&summary.test, EdgeSide::NocoverBottom);

    let mut emitter = Emitter::new(out);
    emitter.write("train_cover.csv", &train_cover_table)?;
    emitter.write("train_nocover.csv", &train_nocover_table)?;
    emitter.write("test_cover.csv", &test_cover_table)?;
    emitter.write("test_nocover.csv", &test_nocover_table)?;
    emitter.write("backtest.json", &to_json(&summary)?)?;

    match format {
        Format::Json => print_payload(&to_json(&summary)?),
        Format::Csv => {
            let mut all = String::new();
            for (name, table) in [
                ("train_cover", &train_cover_table),
                ("train_nocover", &train_nocover_table),
                ("test_cover", &test_cover_table),
                ("test_nocover", &test_nocover_table),
            ] {
                let _ = writeln!(all, "# table: {name}");
                all.push_str(table);
            }
            print_payload(&all);
        }
        Format::Svg => return Err(flags("backtest has no svg output")),
    }
    eprint!("{}", emitter.summary());
    Ok(())
}

struct SimulateArgs {
    teams: usize,
    games_per_team: usize,
    seasons: usize,
    seed: u64,
    first_season: i32,
    strength_spread: f64,
    top_cover_bias: Option<f64>,
    bottom_cover_bias: Option<f64>,
    top_ou_bias: Option<f64>,
    bottom_ou_bias: Option<f64>,
    band_size: usize,
    allow_pushes: bool,
    shaded_lines: bool,
    out: Option<PathBuf>,
    format: Format,
}

#[derive(Serialize)]
struct SimulateManifest {
    schema_version: u32,
    digest: String,
    row_count: usize,
    seed: u64,
    config_echo: BTreeMap<String, String>,
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let mut line_bias = Vec::new();
    let mut ou_bias = Vec::new();
    if let Some(offset) = args.top_cover_bias {
        line_bias.push(BandBias {
            band: RankBand::Top(args.band_size),
            offset,
        });
    }
    if let Some(offset) = args.bottom_cover_bias {
        line_bias.push(BandBias {
            band: RankBand::Bottom(args.band_size),
            offset,
        });
    }
    if let Some(offset) = args.top_ou_bias {
        ou_bias.push(BandBias {
            band: RankBand::Top(args.band_size),
            offset,
        });
    }
    if let Some(offset) = args.bottom_ou_bias {
        ou_bias.push(BandBias {
            band: RankBand::Bottom(args.band_size),
            offset,
        });
    }

    let config = SynthConfig {
        team_count: args.teams,
        games_per_team: args.games_per_team,
        seasons: args.seasons,
        first_season: SeasonId::new(args.first_season).map_err(|e| flags(e.to_string()))?,
        strength_spread: args.strength_spread,
        line_bias,
        ou_bias,
        vig_free: !args.shaded_lines,
        allow_pushes: args.allow_pushes,
        seed: args.seed,
    };
    let ds = generate(&config).map_err(|e| match e {
        coverline_core::synth::SynthError::InvalidConfig(msg) => flags(msg),
        other => CliError::Run(anyhow!("{other}")),
    })?;

    let mut echo = BTreeMap::new();
    echo.insert("teams".into(), args.teams.to_string());
    echo.insert("games_per_team".into(), args.games_per_team.to_string());
    echo.insert("seasons".into(), args.seasons.to_string());
    echo.insert("first_season".into(), args.first_season.to_string());
    echo.insert(
        "strength_spread".into(),
        format!("{}", args.strength_spread),
    );
    echo.insert("allow_pushes".into(), args.allow_pushes.to_string());
    echo.insert("shaded_lines".into(), args.shaded_lines.to_string());
    echo.insert("band_size".into(), args.band_size.to_string());
    for (key, value) in [
        ("top_cover_bias", args.top_cover_bias),
        ("bottom_cover_bias", args.bottom_cover_bias),
        ("top_ou_bias", args.top_ou_bias),
        ("bottom_ou_bias", args.bottom_ou_bias),
    ] {
        if let Some(v) = value {
            echo.insert(key.into(), format!("{v}"));
        }
    }
    let manifest = SimulateManifest {
        schema_version: SCHEMA_VERSION,
        digest: ds.digest().to_string(),
        row_count: ds.provenance().row_count,
        seed: args.seed,
        config_echo: echo,
    };

    let mut emitter = Emitter::new(args.out);
    emitter.write("games.csv", &ds.to_csv())?;
    emitter.write("manifest.json", &to_json(&manifest)?)?;

    match args.format {
        Format::Csv => print_payload(&ds.to_csv()),
        Format::Json => print_payload(&to_json(&manifest)?),
        Format::Svg => return Err(flags("simulate has no svg output")),
    }
    eprint!("{}", emitter.summary());
    Ok(())
}

#[derive(Serialize)]
struct EraSection {
    era: EraSubgroup,
    cover: EdgeReport,
    nocover: EdgeReport,
    low_positions: Vec<usize>,
    high_positions: Vec<usize>,
    over_tendency: coverline_core::edge::OverTendency,
}

#[derive(Serialize)]
struct FullReport {
    meta: ReportMeta,
    eras: Vec<EraSection>,
    association: Option<coverline_core::strategy::Association>,
    outlier_shares: Option<coverline_core::strategy::OutlierShares>,
    artifacts: Vec<String>,
}

fn cmd_report(
    input: &Path,
    eras_file: Option<&Path>,
    break_even: f64,
    low_cut: f64,
    high_cut: f64,
    out: Option<PathBuf>,
    format: Format,
) -> Result<(), CliError> {
    check_break_even(break_even)?;
    check_cutoffs(low_cut, high_cut)?;
    let ds = load_dataset(input)?;

    let eras = match eras_file {
        Some(path) => load_eras(path)?,
        None => {
            // NBA defaults when they line up with the data, otherwise group
            // the dataset's seasons by team count
            let defaults: Vec<EraSubgroup> = EraSubgroup::nba_defaults()
                .into_iter()
                .filter(|e| {
                    e.seasons().all(|s| {
                        ds.seasons().contains(&s) && ds.teams_in_season(s).len() == e.team_count
                    })
                })
                .collect();
            if defaults.is_empty() {
                auto_eras(&ds)
            } else {
                defaults
            }
        }
    };
    if eras.is_empty() {
        return Err(CliError::Run(anyhow!("no analyzable eras in dataset")));
    }

    let meta = meta_with(
        ds.digest(),
        &[
            ("subcommand", "report".to_string()),
            ("break_even", format!("{break_even}")),
            ("low_cut", format!("{low_cut}")),
            ("high_cut", format!("{high_cut}")),
        ],
    );
    let mut bundle = ReportBundle::new(meta.clone());
    let mut sections = Vec::new();
    for era in &eras {
        let profile: PositionProfile =
            build_profile(&ds, era).map_err(|e| CliError::Run(anyhow!("{e}")))?;
        let cover = running_average(&profile, EdgeSide::CoverTop, break_even)
            .map_err(|e| CliError::Run(anyhow!("{e}")))?;
        let nocover = running_average(&profile, EdgeSide::NocoverBottom, break_even)
            .map_err(|e| CliError::Run(anyhow!("{e}")))?;
        let groups = group_cutoffs(&profile, low_cut, high_cut);
        let tendency = coverline_core::edge::over_tendency(&profile, &groups.low, &groups.high)
            .map_err(|e| CliError::Run(anyhow!("{e}")))?;

        bundle.add_table(
            &format!("profile_{}.csv", era.name),
            emit_profile_table(&profile),
        );
        bundle.add_table(
            &format!("edge_cover_{}.csv", era.name),
            emit_edge_table(&cover),
        );
        bundle.add_table(
            &format!("edge_nocover_{}.csv", era.name),
            emit_edge_table(&nocover),
        );
        bundle.add_figure(
            &format!("profile_{}.svg", era.name),
            emit_profile_figure(&profile).map_err(|e| CliError::Run(anyhow!("{e}")))?,
        );
        bundle.add_figure(
            &format!("win_{}.svg", era.name),
            emit_win_figure(&profile).map_err(|e| CliError::Run(anyhow!("{e}")))?,
        );
        bundle.add_figure(
            &format!("edge_{}.svg", era.name),
            coverline_core::report::emit_edge_figure(&profile, &cover, &nocover)
                .map_err(|e| CliError::Run(anyhow!("{e}")))?,
        );

        sections.push(EraSection {
            era: era.clone(),
            cover,
            nocover,
            low_positions: groups.low,
            high_positions: groups.high,
            over_tendency: tendency,
        });
    }

    // association over every season in the dataset, when there are enough
    let all_seasons: Vec<SeasonId> = ds.seasons().iter().copied().collect();
    let (assoc, shares) = if all_seasons.len() >= 2 {
        (
            Some(association(&ds, &all_seasons).map_err(|e| CliError::Run(anyhow!("{e}")))?),
            Some(
                outlier_shares(&ds, &all_seasons, break_even)
                    .map_err(|e| CliError::Run(anyhow!("{e}")))?,
            ),
        )
    } else {
        (None, None)
    };

    let mut emitter = Emitter::new(out);
    for payload in bundle.tables.iter().chain(&bundle.figures) {
        emitter.write(&payload.name, &payload.content)?;
    }
    let mut summary = FullReport {
        meta,
        eras: sections,
        association: assoc,
        outlier_shares: shares,
        artifacts: bundle
            .tables
            .iter()
            .chain(&bundle.figures)
            .map(|p| p.name.clone())
            .collect(),
    };
    summary.artifacts.push("summary.json".to_string());
    emitter.write("summary.json", &to_json(&summary)?)?;

    match format {
        Format::Json => print_payload(&to_json(&summary)?),
        Format::Csv | Format::Svg => {
            let listing = if emitter.summary().is_empty() {
                "no files written; give --out DIR\n".to_string()
            } else {
                emitter.summary()
            };
            print_payload(&listing);
        }
    }
    Ok(())
}
