//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line and enforcing its runtime budget.
//!
//! The published-table criteria check table arithmetic (the historical
//! betting data itself is not redistributable); the statistical criteria
//! run the seeded synthetic oracles end to end; the determinism criterion
//! drives the installed binary twice and byte-compares the output trees.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coverline_core::edge::{
    prefix_means, running_average_walk, EdgeReport, EdgeSide, BREAK_EVEN_TABLES,
};
use coverline_core::ingest::parse_games_from_str;
use coverline_core::model::{derive_outcome, AtsResult, GameRecord, Points, SeasonId, TeamId};
use coverline_core::profile::build_profile;
use coverline_core::report::{emit_edge_table, parse_edge_table};
use coverline_core::season_stats::{rank_by_win_pct, TeamSeasonStats};
use coverline_core::strategy::{association, evaluate, train, training_reports};
use coverline_core::synth::{generate, BandBias, RankBand, SynthConfig};

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    started: Instant,
}

impl Criterion {
    fn start(id: u32, name: &'static str, budget_secs: u64) -> Criterion {
        Criterion {
            id,
            name,
            budget: Duration::from_secs(budget_secs),
            started: Instant::now(),
        }
    }

    fn check(&self, pass: bool, detail: &str) {
        if !pass {
            println!("acceptance {:02} [{}]: FAIL — {detail}", self.id, self.name);
            panic!("acceptance {} [{}] failed: {detail}", self.id, self.name);
        }
    }

    fn finish(self) {
        let elapsed = self.started.elapsed();
        let within = elapsed <= self.budget;
        println!(
            "acceptance {:02} [{}]: {} ({elapsed:.2?} of {:?} budget)",
            self.id,
            self.name,
            if within { "PASS" } else { "FAIL" },
            self.budget
        );
        assert!(
            within,
            "acceptance {} [{}] exceeded its runtime budget: {elapsed:?} > {:?}",
            self.id, self.name, self.budget
        );
    }
}

fn team(name: &str) -> TeamId {
    TeamId::new(name).unwrap()
}

/// The 2010-2011 standings: (team, wins, losses, printed percentage).
/// One loss column entry is reconciled against the 82-game schedule and the
/// printed percentage.
const STANDINGS: [(&str, u32, u32, &str); 30] = [
    ("Minnesota", 17, 65, "0.2073"),
    ("Cleveland", 19, 63, "0.2317"),
    ("Toronto", 22, 60, "0.2683"),
    ("Washington", 23, 59, "0.2805"),
    ("Sacramento", 24, 58, "0.2927"),
    ("New Jersey", 24, 58, "0.2927"),
    ("Detroit", 30, 52, "0.3659"),
    ("LA Clippers", 32, 50, "0.3902"),
    ("Charlotte", 34, 48, "0.4146"),
    ("Milwaukee", 35, 47, "0.4268"),
    ("Golden State", 36, 46, "0.4390"),
    ("Indiana", 37, 45, "0.4512"),
    ("Utah", 39, 43, "0.4756"),
    ("Phoenix", 40, 42, "0.4878"),
    ("Philadelphia", 41, 41, "0.5000"),
    ("New York", 42, 40, "0.5122"),
    ("Houston", 43, 39, "0.5244"),
    ("Atlanta", 44, 38, "0.5366"),
    ("Vancouver", 46, 36, "0.5610"),
    ("New Orleans", 46, 36, "0.5610"),
    ("Portland", 48, 34, "0.5854"),
    ("Denver", 50, 32, "0.6098"),
    ("Orlando", 52, 30, "0.6341"),
    ("Oklahoma City", 55, 27, "0.6707"),
    ("Boston", 56, 26, "0.6829"),
    ("Dallas", 57, 25, "0.6951"),
    ("LA Lakers", 57, 25, "0.6951"),
    ("Miami", 58, 24, "0.7073"),
    ("San Antonio", 61, 21, "0.7439"),
    ("Chicago", 62, 20, "0.7561"),
];

#[test]
fn criterion_01_standings_percentage_arithmetic() {
    let c = Criterion::start(1, "standings percentage arithmetic", 1);
    let season = SeasonId::new(2010).unwrap();
    let stats: Vec<TeamSeasonStats> = STANDINGS
        .iter()
        .map(|&(name, w, l, _)| TeamSeasonStats::from_record(team(name), season, w, l))
        .collect();

    for (s, &(name, _, _, printed)) in stats.iter().zip(&STANDINGS) {
        let formatted = format!("{:.4}", s.w_pct());
        c.check(
            formatted == printed,
            &format!("{name}: computed {formatted}, printed {printed}"),
        );
    }

    let ranking = rank_by_win_pct(stats).unwrap();
    c.check(
        ranking.at(1).team == team("Minnesota"),
        "position 1 must be Minnesota",
    );
    c.check(
        ranking.at(30).team == team("Chicago"),
        "position 30 must be Chicago",
    );
    c.finish();
}

/// Published running averages and profits: (H, profit) per group size.
const TRAIN_COVER: [(f64, f64); 12] = [
    (55.48, 3.08),
    (55.27, 2.87),
    (54.23, 1.83),
    (53.96, 1.56),
    (53.62, 1.22),
    (53.23, 0.83),
    (53.08, 0.68),
    (52.86, 0.46),
    (52.85, 0.45),
    (52.57, 0.17),
    (52.59, 0.19),
    (52.41, 0.01),
];
const TRAIN_NOCOVER: [(f64, f64); 12] = [
    (44.68, 2.92),
    (44.76, 2.84),
    (45.34, 2.26),
    (45.95, 1.65),
    (45.88, 1.72),
    (46.19, 1.41),
    (46.42, 1.18),
    (46.86, 0.74),
    (47.22, 0.38),
    (47.13, 0.47),
    (47.31, 0.29),
    (47.54, 0.06),
];
const TEST_NOCOVER: [(f64, f64); 3] = [(44.44, 3.16), (43.64, 3.96), (45.25, 2.35)];
const TEST_COVER: [(f64, f64); 2] = [(57.14, 4.74), (57.61, 5.21)];

type TableCase = (&'static str, EdgeSide, &'static [(f64, f64)], &'static str);

#[test]
fn criterion_02_edge_table_arithmetic() {
    let c = Criterion::start(2, "edge table arithmetic", 1);
    let cases: [TableCase; 4] = [
        ("train cover", EdgeSide::CoverTop, &TRAIN_COVER, "13.35"),
        (
            "train nocover",
            EdgeSide::NocoverBottom,
            &TRAIN_NOCOVER,
            "15.92",
        ),
        (
            "test nocover",
            EdgeSide::NocoverBottom,
            &TEST_NOCOVER,
            "9.47",
        ),
        ("test cover", EdgeSide::CoverTop, &TEST_COVER, "9.95"),
    ];
    for (label, side, rows, printed_sigma) in cases {
        let averages: Vec<f64> = rows.iter().map(|&(h, _)| h).collect();
        let report = EdgeReport::from_running_averages(side, BREAK_EVEN_TABLES, &averages);
        c.check(
            report.steps.len() == rows.len(),
            &format!("{label}: every row beats break-even"),
        );
        for (step, &(h, printed_profit)) in report.steps.iter().zip(rows) {
            let formatted = format!("{:.2}", step.profit);
            let expected = format!("{printed_profit:.2}");
            c.check(
                formatted == expected,
                &format!("{label} H={h}: computed profit {formatted}, printed {expected}"),
            );
        }
        let sigma = format!("{:.2}", report.cumulative_profit);
        c.check(
            sigma == printed_sigma,
            &format!("{label}: cumulative {sigma}, printed {printed_sigma}"),
        );
    }
    c.finish();
}

#[test]
fn criterion_03_prefix_mean_equivalence() {
    let c = Criterion::start(3, "prefix-mean equivalence", 5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let size = rng.gen_range(4..=30usize);
        let values: Vec<f64> = (0..size).map(|_| rng.gen_range(38.0..62.0)).collect();
        let means = prefix_means(&values);
        for (i, &mean) in means.iter().enumerate() {
            let direct: f64 = values[..=i].iter().sum::<f64>() / (i + 1) as f64;
            c.check(
                (mean - direct).abs() < 1e-12,
                &format!("k={}: incremental {mean} vs direct {direct}", i + 1),
            );
        }
        for side in [EdgeSide::CoverTop, EdgeSide::NocoverBottom] {
            let report = running_average_walk(&values, side, BREAK_EVEN_TABLES).unwrap();
            for step in &report.steps {
                let direct: f64 =
                    values[..step.group_size].iter().sum::<f64>() / step.group_size as f64;
                c.check(
                    (step.running_avg - direct).abs() < 1e-12,
                    &format!("walk {side:?} k={}", step.group_size),
                );
            }
        }
    }
    c.finish();
}

#[test]
fn criterion_04_outcome_trichotomy_grid() {
    let c = Criterion::start(4, "outcome trichotomy grid", 10);
    let date = chrono::NaiveDate::from_ymd_opt(2010, 11, 1).unwrap();
    let season = SeasonId::new(2010).unwrap();
    let spreads = ["0", "1", "3.5", "5", "7", "10.5"];
    let mut cells = 0u64;
    for spread_text in spreads {
        let spread: Points = spread_text.parse().unwrap();
        for home in 80..=130u32 {
            for away in 80..=130u32 {
                let game = GameRecord {
                    date,
                    season,
                    home: team("Home"),
                    away: team("Away"),
                    home_score: home,
                    away_score: away,
                    favorite: Some(team("Home")),
                    spread: Some(spread),
                    total_line: None,
                };
                if home == away {
                    c.check(
                        derive_outcome(&game).is_err(),
                        &format!("tied {home}-{away} must be rejected"),
                    );
                    continue;
                }
                let outcome = derive_outcome(&game).unwrap();
                // brute-force oracle straight from the inequality definitions
                let err = (home as f64 - away as f64) - spread.as_f64();
                let expected = if err > 0.0 {
                    AtsResult::Cover
                } else if err == 0.0 {
                    AtsResult::Push
                } else {
                    AtsResult::NoCover
                };
                let fav = outcome.ats_result(&team("Home")).unwrap();
                let dog = outcome.ats_result(&team("Away")).unwrap();
                c.check(
                    fav == expected,
                    &format!(
                        "home {home} away {away} spread {spread_text}: {fav:?} vs {expected:?}"
                    ),
                );
                let mirrored = match fav {
                    AtsResult::Cover => dog == AtsResult::NoCover,
                    AtsResult::NoCover => dog == AtsResult::Cover,
                    AtsResult::Push => dog == AtsResult::Push,
                };
                c.check(mirrored, "exactly one side covers unless both push");
                if err == 0.0 {
                    c.check(
                        fav == AtsResult::Push && outcome.delta_c() == Some(Points::ZERO),
                        "exactly-equal margins yield PUSH",
                    );
                }
                cells += 1;
            }
        }
    }
    c.check(cells == 6 * (51 * 51 - 51), &format!("grid size {cells}"));
    c.finish();
}

#[test]
fn criterion_05_null_model_sanity() {
    let c = Criterion::start(5, "null-model sanity", 30);
    let config = SynthConfig {
        team_count: 30,
        games_per_team: 82,
        seasons: 24,
        seed: 7,
        ..SynthConfig::default()
    };
    let ds = generate(&config).unwrap();
    let profile = build_profile(&ds, &config.era()).unwrap();
    for p in &profile.per_position {
        c.check(
            (0.46..=0.54).contains(&p.mean_c_pct),
            &format!("position {} mean_c_pct {}", p.position, p.mean_c_pct),
        );
    }
    let seasons: Vec<SeasonId> = config.era().seasons().collect();
    let assoc = association(&ds, &seasons).unwrap();
    c.check(
        assoc.win_cover.abs() < 0.1,
        &format!("win-cover correlation {}", assoc.win_cover),
    );
    c.finish();
}

#[test]
fn criterion_06_injected_edge_recovery() {
    let c = Criterion::start(6, "injected-edge recovery", 30);
    let config = SynthConfig {
        team_count: 30,
        games_per_team: 82,
        seasons: 10,
        seed: 22,
        line_bias: vec![
            BandBias {
                band: RankBand::Top(6),
                offset: 0.06,
            },
            BandBias {
                band: RankBand::Bottom(6),
                offset: -0.06,
            },
        ],
        ..SynthConfig::default()
    };
    let ds = generate(&config).unwrap();
    let seasons: Vec<SeasonId> = config.era().seasons().collect();

    let spec = train(&ds, &seasons, 2.0, BREAK_EVEN_TABLES).unwrap();
    c.check(
        !spec.cover_positions.is_empty(),
        "cover side selects a group",
    );
    c.check(
        !spec.nocover_positions.is_empty(),
        "no-cover side selects a group",
    );

    let (cover, nocover) = training_reports(&ds, &seasons, BREAK_EVEN_TABLES).unwrap();
    let injected = 56.0 - BREAK_EVEN_TABLES;
    for (label, report) in [("cover", &cover), ("nocover", &nocover)] {
        let step1 = report
            .steps
            .first()
            .map(|s| s.profit)
            .unwrap_or(f64::NEG_INFINITY);
        c.check(
            (step1 - injected).abs() <= 1.0,
            &format!("{label} step-1 profit {step1:.2} vs injected {injected:.2} +/- 1.0"),
        );
    }
    c.finish();
}

#[test]
fn criterion_07_train_test_self_consistency() {
    let c = Criterion::start(7, "train/test self-consistency", 5);
    let config = SynthConfig {
        team_count: 30,
        games_per_team: 82,
        seasons: 6,
        seed: 22,
        line_bias: vec![
            BandBias {
                band: RankBand::Top(6),
                offset: 0.06,
            },
            BandBias {
                band: RankBand::Bottom(6),
                offset: -0.06,
            },
        ],
        ..SynthConfig::default()
    };
    let ds = generate(&config).unwrap();
    let seasons: Vec<SeasonId> = config.era().seasons().collect();
    let spec = train(&ds, &seasons, 2.0, BREAK_EVEN_TABLES).unwrap();
    c.check(
        !spec.cover_positions.is_empty() || !spec.nocover_positions.is_empty(),
        "training selects something to re-evaluate",
    );
    let (cover, nocover) = training_reports(&ds, &seasons, BREAK_EVEN_TABLES).unwrap();
    let back = evaluate(&ds, &spec, &seasons).unwrap();
    for row in &back.per_position {
        let step = match row.side {
            EdgeSide::CoverTop => &cover.steps[row.position - 1],
            EdgeSide::NocoverBottom => &nocover.steps[row.position - 1],
        };
        c.check(
            row.running_avg == step.running_avg && row.profit == step.profit,
            &format!(
                "position {} {:?}: test ({}, {}) vs training ({}, {})",
                row.position, row.side, row.running_avg, row.profit, step.running_avg, step.profit
            ),
        );
    }
    c.finish();
}

fn coverline() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coverline"))
}

fn run_ok(cmd: &mut Command, what: &str) {
    let output = cmd
        .output()
        .unwrap_or_else(|e| panic!("spawning {what}: {e}"));
    assert!(
        output.status.success(),
        "{what} failed with {:?}\nstderr: {}",
        output.status,
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Recursively collects (relative path, bytes) of every file under a root.
fn tree_bytes(root: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(dir: &Path, root: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for path in entries {
            if path.is_dir() {
                walk(&path, root, out);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out
}

fn run_full_pipeline(root: &Path) {
    let sim = root.join("sim");
    run_ok(
        coverline()
            .args([
                "simulate",
                "--teams",
                "30",
                "--games-per-team",
                "82",
                "--seasons",
                "10",
            ])
            .args([
                "--seed",
                "77",
                "--top-cover-bias",
                "0.06",
                "--bottom-cover-bias",
                "-0.06",
            ])
            .arg("--out")
            .arg(&sim),
        "simulate",
    );
    let games = sim.join("games.csv");
    run_ok(
        coverline()
            .arg("stats")
            .arg("--input")
            .arg(&games)
            .args(["--season", "1990"])
            .arg("--out")
            .arg(root.join("stats")),
        "stats",
    );
    run_ok(
        coverline()
            .arg("profile")
            .arg("--input")
            .arg(&games)
            .args(["--seasons", "1990:1999"])
            .arg("--out")
            .arg(root.join("profile")),
        "profile",
    );
    run_ok(
        coverline()
            .arg("edge")
            .arg("--input")
            .arg(&games)
            .args(["--seasons", "1990:1999"])
            .arg("--out")
            .arg(root.join("edge")),
        "edge",
    );
    run_ok(
        coverline()
            .arg("backtest")
            .arg("--input")
            .arg(&games)
            .args(["--train", "1990:1997", "--test", "1998:1999"])
            .arg("--out")
            .arg(root.join("backtest")),
        "backtest",
    );
    run_ok(
        coverline()
            .arg("report")
            .arg("--input")
            .arg(&games)
            .arg("--out")
            .arg(root.join("report")),
        "report",
    );
}

#[test]
fn criterion_08_pipeline_determinism() {
    let c = Criterion::start(8, "pipeline determinism", 60);
    let base = std::env::temp_dir().join(format!("coverline-accept-{}", std::process::id()));
    let run_a = base.join("a");
    let run_b = base.join("b");
    for dir in [&run_a, &run_b] {
        if dir.exists() {
            std::fs::remove_dir_all(dir).unwrap();
        }
        std::fs::create_dir_all(dir).unwrap();
    }

    run_full_pipeline(&run_a);
    run_full_pipeline(&run_b);

    let tree_a = tree_bytes(&run_a);
    let tree_b = tree_bytes(&run_b);
    c.check(!tree_a.is_empty(), "pipeline must produce output files");
    c.check(
        tree_a.len() == tree_b.len(),
        &format!("file counts differ: {} vs {}", tree_a.len(), tree_b.len()),
    );
    for ((name_a, bytes_a), (name_b, bytes_b)) in tree_a.iter().zip(&tree_b) {
        c.check(
            name_a == name_b,
            &format!("tree layout differs: {name_a} vs {name_b}"),
        );
        c.check(
            bytes_a == bytes_b,
            &format!("{name_a}: byte content differs between identical runs"),
        );
    }

    std::fs::remove_dir_all(&base).ok();
    c.finish();
}

#[test]
fn criterion_09_round_trips() {
    let c = Criterion::start(9, "round trips", 5);

    // dataset CSV round-trip, quarter-point lines included
    let config = SynthConfig {
        team_count: 10,
        games_per_team: 12,
        seasons: 2,
        seed: 9,
        ..SynthConfig::default()
    };
    let ds = generate(&config).unwrap();
    let text = ds.to_csv();
    let back = parse_games_from_str(&text, "round-trip").unwrap();
    c.check(
        ds.games() == back.games(),
        "parse(serialize(ds)) reproduces every game",
    );
    c.check(
        ds.digest() == back.digest(),
        "digest survives the round trip",
    );

    let hand_rows = "date,season,home,away,home_score,away_score,favorite,spread,total_line\n\
        2010-11-01,2010-2011,Alpha,Beta,101,95,Alpha,5.25,190.75\n\
        2010-11-02,2010-2011,Beta,Alpha,88,90,Beta,0.5,180.5\n";
    let hand = parse_games_from_str(hand_rows, "hand").unwrap();
    let hand_back = parse_games_from_str(&hand.to_csv(), "hand2").unwrap();
    c.check(
        hand.games() == hand_back.games(),
        "quarter-point lines survive byte-exactly",
    );

    // edge report CSV round-trip at the printed 2-decimal precision
    let averages: Vec<f64> = TRAIN_COVER.iter().map(|&(h, _)| h).collect();
    let report =
        EdgeReport::from_running_averages(EdgeSide::CoverTop, BREAK_EVEN_TABLES, &averages);
    let when_printed = emit_edge_table(&report);
    let (steps, cumulative) = parse_edge_table(&when_printed).unwrap();
    c.check(steps.len() == report.steps.len(), "all rows recovered");
    for (parsed, original) in steps.iter().zip(&report.steps) {
        c.check(
            parsed.group_size == original.group_size
                && (parsed.running_avg - original.running_avg).abs() < 0.005
                && (parsed.profit - original.profit).abs() < 0.005,
            &format!("row {} reparses at printed precision", original.group_size),
        );
    }
    c.check(
        (cumulative.unwrap() - report.cumulative_profit).abs() < 0.005,
        "cumulative reparses at printed precision",
    );

    // selection arithmetic implied by the published tables
    let spec_positions: BTreeSet<usize> = coverline_core::strategy::select_prefix(&report, 2.0);
    c.check(
        spec_positions == BTreeSet::from([1, 2]),
        "profit > 2 keeps the top two rows",
    );

    c.finish();
}
