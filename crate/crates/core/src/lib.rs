//! Betting analytics for point-spread and totals markets in basketball.
//!
//! The pipeline runs in stages: game records are ingested from CSV
//! ([`ingest`]), reduced to per-team season stats and ranked by winning
//! percentage ([`season_stats`]), averaged by ranking position across the
//! seasons of an era ([`profile`]), scanned for exploitable extremes with a
//! running-average walk ([`edge`]), and finally turned into a train/test
//! betting strategy ([`strategy`]). A seeded synthetic generator ([`synth`])
//! provides null and injected-edge datasets for calibration, and [`report`]
//! renders everything as CSV tables and SVG figures.

pub mod edge;
pub mod ingest;
pub mod model;
pub mod profile;
pub mod report;
pub mod season_stats;
pub mod strategy;
pub mod synth;

pub use model::{derive_outcome, EraSubgroup, GameOutcome, GameRecord, Points, SeasonId, TeamId};
