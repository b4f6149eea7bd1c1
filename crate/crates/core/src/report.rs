//! CSV tables, SVG figures, and report metadata.
//!
//! Every emitter is a pure function of its inputs: identical inputs produce
//! byte-identical output, which keeps golden tests and whole-tree
//! determinism checks meaningful. Percentages print at the same precision
//! the published tables use: 4 decimals for winning percentages, 2 for
//! running averages and profits.

use serde::Serialize;
use thiserror::Error;

use crate::edge::{EdgeReport, EdgeSide, EdgeStep};
use crate::profile::PositionProfile;
use crate::season_stats::SeasonRanking;
use crate::strategy::BacktestReport;

/// Version of the JSON summary schema.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("profile has no positions")]
    EmptyProfile,
    #[error("bad table at line {line}: {reason}")]
    BadTable { line: usize, reason: String },
}

/// Metadata stamped into every emitted bundle.
#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub schema_version: u32,
    pub tool_version: String,
    pub dataset_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config_echo: std::collections::BTreeMap<String, String>,
}

impl ReportMeta {
    pub fn new(dataset_digest: &str) -> ReportMeta {
        ReportMeta {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            dataset_digest: dataset_digest.to_string(),
            seed: None,
            config_echo: Default::default(),
        }
    }
}

/// A named emitted artifact.
#[derive(Debug, Clone, Serialize)]
pub struct NamedPayload {
    pub name: String,
    pub content: String,
}

/// Everything one command run produced.
#[derive(Debug, Clone, Serialize)]
pub struct ReportBundle {
    pub meta: ReportMeta,
    pub tables: Vec<NamedPayload>,
    pub figures: Vec<NamedPayload>,
}

impl ReportBundle {
    pub fn new(meta: ReportMeta) -> ReportBundle {
        ReportBundle {
            meta,
            tables: Vec::new(),
            figures: Vec::new(),
        }
    }

    pub fn add_table(&mut self, name: &str, content: String) {
        self.tables.push(NamedPayload {
            name: name.to_string(),
            content,
        });
    }

    pub fn add_figure(&mut self, name: &str, content: String) {
        self.figures.push(NamedPayload {
            name: name.to_string(),
            content,
        });
    }
}

fn fmt2(x: f64) -> String {
    format!("{x:.2}")
}

fn fmt4(x: f64) -> String {
    format!("{x:.4}")
}

// ---------------------------------------------------------------------------
// CSV tables
// ---------------------------------------------------------------------------

/// Standings-shaped table: one row per ranking position, ascending.
pub fn emit_stats_table(ranking: &SeasonRanking) -> String {
    let mut out = String::from(
        "position,team,wins,losses,w_pct,covers,no_covers,ats_pushes,c_pct,overs,unders,ou_pushes,o_pct\n",
    );
    for (position, s) in ranking.iter() {
        let opt4 = |v: Option<f64>| v.map(fmt4).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            position,
            csv_escape(s.team.name()),
            s.wins,
            s.losses,
            fmt4(s.w_pct()),
            s.covers,
            s.no_covers,
            s.ats_pushes,
            opt4(s.c_pct()),
            s.overs,
            s.unders,
            s.ou_pushes,
            opt4(s.o_pct()),
        ));
    }
    out
}

/// Per-position era averages.
pub fn emit_profile_table(profile: &PositionProfile) -> String {
    let mut out = String::from("position,mean_w_pct,mean_c_pct,mean_o_pct,season_count\n");
    for p in &profile.per_position {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.position,
            fmt4(p.mean_w_pct),
            fmt4(p.mean_c_pct),
            fmt4(p.mean_o_pct),
            p.season_count,
        ));
    }
    out
}

/// One walk's table: group size, running average, profit, and the
/// cumulative sum on the final retained row only.
pub fn emit_edge_table(report: &EdgeReport) -> String {
    let mut out = String::from("group_size,running_avg,profit,cumulative\n");
    for (i, step) in report.steps.iter().enumerate() {
        let last = i + 1 == report.steps.len();
        out.push_str(&format!(
            "{},{},{},{}\n",
            step.group_size,
            fmt2(step.running_avg),
            fmt2(step.profit),
            if last {
                fmt2(report.cumulative_profit)
            } else {
                String::new()
            },
        ));
    }
    out
}

/// Both sides' tables; reports must share one break-even.
pub fn emit_edge_tables(cover: &EdgeReport, nocover: &EdgeReport) -> (String, String) {
    assert_eq!(
        cover.break_even, nocover.break_even,
        "edge tables must come from the same break-even"
    );
    (emit_edge_table(cover), emit_edge_table(nocover))
}

/// Backtest rows for one side, shaped like the edge tables plus the
/// supplementary flat-bet return column.
pub fn emit_backtest_table(report: &BacktestReport, side: EdgeSide) -> String {
    let mut out = String::from("group_size,running_avg,profit,roi_flat_110,cumulative\n");
    let rows: Vec<_> = report
        .per_position
        .iter()
        .filter(|r| r.side == side)
        .collect();
    let cumulative = match side {
        EdgeSide::CoverTop => report.cumulative_cover,
        EdgeSide::NocoverBottom => report.cumulative_nocover,
    };
    for (i, row) in rows.iter().enumerate() {
        let last = i + 1 == rows.len();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.position,
            fmt2(row.running_avg),
            fmt2(row.profit),
            fmt2(row.roi_flat_110),
            if last {
                fmt2(cumulative)
            } else {
                String::new()
            },
        ));
    }
    out
}

/// Parses a table emitted by [`emit_edge_table`] back into steps (and the
/// printed cumulative, if any row carried one).
pub fn parse_edge_table(text: &str) -> Result<(Vec<EdgeStep>, Option<f64>), ReportError> {
    let mut steps = Vec::new();
    let mut cumulative = None;
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "group_size,running_avg,profit,cumulative" {
                return Err(ReportError::BadTable {
                    line: 1,
                    reason: format!("unexpected header `{line}`"),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(ReportError::BadTable {
                line: i + 1,
                reason: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let parse = |s: &str, what: &str| {
            s.parse::<f64>().map_err(|_| ReportError::BadTable {
                line: i + 1,
                reason: format!("bad {what} `{s}`"),
            })
        };
        steps.push(EdgeStep {
            group_size: fields[0].parse().map_err(|_| ReportError::BadTable {
                line: i + 1,
                reason: format!("bad group_size `{}`", fields[0]),
            })?,
            running_avg: parse(fields[1], "running_avg")?,
            profit: parse(fields[2], "profit")?,
        });
        if !fields[3].is_empty() {
            cumulative = Some(parse(fields[3], "cumulative")?);
        }
    }
    Ok((steps, cumulative))
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

// ---------------------------------------------------------------------------
// SVG figures
// ---------------------------------------------------------------------------

const SVG_W: f64 = 800.0;
const SVG_H: f64 = 420.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 40.0;

struct Chart {
    y_min: f64,
    y_max: f64,
    positions: usize,
}

impl Chart {
    fn x(&self, position: usize) -> f64 {
        let plot_w = SVG_W - MARGIN_L - MARGIN_R;
        if self.positions == 1 {
            return MARGIN_L + plot_w / 2.0;
        }
        MARGIN_L + (position - 1) as f64 * plot_w / (self.positions - 1) as f64
    }

    fn y(&self, value: f64) -> f64 {
        let plot_h = SVG_H - MARGIN_T - MARGIN_B;
        let clamped = value.clamp(self.y_min, self.y_max);
        MARGIN_T + (self.y_max - clamped) / (self.y_max - self.y_min) * plot_h
    }

    fn polyline(&self, values: &[f64], class: &str, color: &str) -> String {
        let mut points = String::new();
        for (i, &v) in values.iter().enumerate() {
            if i > 0 {
                points.push(' ');
            }
            points.push_str(&format!("{:.2},{:.2}", self.x(i + 1), self.y(v)));
        }
        let mut out = format!(
            "  <polyline class=\"{class}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{points}\"/>\n"
        );
        for (i, &v) in values.iter().enumerate() {
            out.push_str(&format!(
                "  <circle class=\"pt-{class}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>\n",
                self.x(i + 1),
                self.y(v)
            ));
        }
        out
    }

    fn frame(&self, title: &str, y_label: &str) -> String {
        let x0 = MARGIN_L;
        let x1 = SVG_W - MARGIN_R;
        let y0 = MARGIN_T;
        let y1 = SVG_H - MARGIN_B;
        let mut out = String::new();
        out.push_str(&format!(
            "  <rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n",
            x1 - x0,
            y1 - y0
        ));
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">{title}</text>\n",
            (x0 + x1) / 2.0,
            y0 - 6.0
        ));
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">winning-percentage position</text>\n",
            (x0 + x1) / 2.0,
            SVG_H - 10.0
        ));
        out.push_str(&format!(
            "  <text x=\"14\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.2})\">{y_label}</text>\n",
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0
        ));
        // y tick labels at min, mid, max
        for v in [self.y_min, (self.y_min + self.y_max) / 2.0, self.y_max] {
            out.push_str(&format!(
                "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"end\">{:.1}</text>\n",
                x0 - 4.0,
                self.y(v) + 3.0,
                v
            ));
        }
        // x tick labels at first and last position
        for p in [1, self.positions] {
            out.push_str(&format!(
                "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"middle\">{p}</text>\n",
                self.x(p),
                y1 + 14.0
            ));
        }
        out
    }

    fn band(&self, low: f64, high: f64) -> String {
        let y_high = self.y(high);
        let y_low = self.y(low);
        format!(
            "  <rect class=\"house-edge\" x=\"{:.2}\" y=\"{y_high:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#cccccc\" opacity=\"0.5\"/>\n",
            MARGIN_L,
            SVG_W - MARGIN_L - MARGIN_R,
            y_low - y_high
        )
    }
}

fn svg_open() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SVG_W} {SVG_H}\" width=\"{SVG_W}\" height=\"{SVG_H}\">\n"
    )
}

/// Cover and over percentage curves by position with the shaded house-edge
/// band. One data-point circle per position per series.
pub fn emit_profile_figure(profile: &PositionProfile) -> Result<String, ReportError> {
    if profile.per_position.is_empty() {
        return Err(ReportError::EmptyProfile);
    }
    let chart = Chart {
        y_min: 35.0,
        y_max: 65.0,
        positions: profile.team_count(),
    };
    let covers: Vec<f64> = profile
        .per_position
        .iter()
        .map(|p| p.mean_c_pct * 100.0)
        .collect();
    let overs: Vec<f64> = profile
        .per_position
        .iter()
        .map(|p| p.mean_o_pct * 100.0)
        .collect();

    let mut svg = svg_open();
    svg.push_str(&chart.band(profile.house_edge_band.0, profile.house_edge_band.1));
    svg.push_str(&chart.frame(
        &format!(
            "cover and over percentages by position ({})",
            profile.era.name
        ),
        "percent",
    ));
    svg.push_str(&chart.polyline(&covers, "cover", "#1f77b4"));
    svg.push_str(&chart.polyline(&overs, "over", "#d62728"));
    svg.push_str(
        "  <text x=\"70\" y=\"34\" font-size=\"11\" fill=\"#1f77b4\">cover</text>\n  <text x=\"110\" y=\"34\" font-size=\"11\" fill=\"#d62728\">over</text>\n",
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Winning-percentage curve by position.
pub fn emit_win_figure(profile: &PositionProfile) -> Result<String, ReportError> {
    if profile.per_position.is_empty() {
        return Err(ReportError::EmptyProfile);
    }
    let chart = Chart {
        y_min: 0.0,
        y_max: 100.0,
        positions: profile.team_count(),
    };
    let wins: Vec<f64> = profile
        .per_position
        .iter()
        .map(|p| p.mean_w_pct * 100.0)
        .collect();
    let mut svg = svg_open();
    svg.push_str(&chart.frame(
        &format!("winning percentage by position ({})", profile.era.name),
        "percent",
    ));
    svg.push_str(&chart.polyline(&wins, "win", "#2ca02c"));
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Cover curve with both running-average walks overlaid: the top walk drawn
/// at the positions it has absorbed so far, the bottom walk likewise.
pub fn emit_edge_figure(
    profile: &PositionProfile,
    cover: &EdgeReport,
    nocover: &EdgeReport,
) -> Result<String, ReportError> {
    if profile.per_position.is_empty() {
        return Err(ReportError::EmptyProfile);
    }
    let n = profile.team_count();
    let chart = Chart {
        y_min: 35.0,
        y_max: 65.0,
        positions: n,
    };
    let covers: Vec<f64> = profile
        .per_position
        .iter()
        .map(|p| p.mean_c_pct * 100.0)
        .collect();

    let mut svg = svg_open();
    svg.push_str(&chart.band(profile.house_edge_band.0, profile.house_edge_band.1));
    svg.push_str(&chart.frame(
        &format!(
            "running-average walks over cover percentage ({})",
            profile.era.name
        ),
        "percent",
    ));
    svg.push_str(&chart.polyline(&covers, "cover", "#9f9f9f"));

    // top walk: step k sits at position n+1-k
    let top: Vec<f64> = cover.steps.iter().map(|s| s.running_avg).collect();
    let mut out = String::new();
    for (i, &v) in top.iter().enumerate() {
        let pos = n - i;
        out.push_str(&format!(
            "  <circle class=\"pt-walk-top\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#1f77b4\"/>\n",
            chart.x(pos),
            chart.y(v)
        ));
    }
    // bottom walk: step k sits at position k
    let bottom: Vec<f64> = nocover.steps.iter().map(|s| s.running_avg).collect();
    for (i, &v) in bottom.iter().enumerate() {
        out.push_str(&format!(
            "  <circle class=\"pt-walk-bottom\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#d62728\"/>\n",
            chart.x(i + 1),
            chart.y(v)
        ));
    }
    svg.push_str(&out);
    svg.push_str("</svg>\n");
    Ok(svg)
}
