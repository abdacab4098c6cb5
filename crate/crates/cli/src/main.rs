//! `pte`: prospect-theory parameter elicitation pipeline.
//!
//! Verbs mirror the three experiment stages plus offline re-analysis:
//! `stage1` (baseline battery), `stage2` (marker sweep), `round` (marker
//! substitution), `fit` (re-fit persisted counts), `report` (summaries),
//! `simulate` (full synthetic pipeline).

mod agents;
mod config;
mod files;
mod llm;
mod pipeline;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use pte_core::design::{Round, MARKERS};

use config::{AgentConfig, RunConfig, DEFAULT_REPLICATES, DEFAULT_SAMPLES};

#[derive(Parser)]
#[command(
    name = "pte",
    version,
    about = "Prospect-theory parameter elicitation from binary-choice agents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the per-lottery sample count.
    #[arg(long)]
    samples: Option<u32>,
    /// Override the bootstrap replicate count.
    #[arg(long)]
    replicates: Option<u32>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut c = RunConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            c.master_seed = seed;
        }
        if let Some(samples) = self.samples {
            c.n_samples = samples;
        }
        if let Some(replicates) = self.replicates {
            c.bootstrap_replicates = replicates;
        }
        if let Some(out) = &self.out {
            c.output_dir = out.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Baseline battery: passes, counts, fit, bootstrap.
    Stage1(ConfigArgs),
    /// Marker sweep: implied probability per epistemic marker.
    Stage2(ConfigArgs),
    /// One marker-substitution round (round1..round4).
    Round {
        #[command(flatten)]
        config: ConfigArgs,
        /// Which round scheme to run.
        #[arg(long)]
        round: String,
        /// Marker map JSON; defaults to <out>/stage2/marker_map.json.
        #[arg(long)]
        marker_map: Option<PathBuf>,
    },
    /// Re-fit persisted counts; no agent needed.
    Fit {
        /// Counts CSV from a prior run.
        counts: PathBuf,
        /// Probability sidecar JSON from the same run.
        probs: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REPLICATES)]
        replicates: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Summarize a run directory into summary.txt, rounds.csv, markers.csv.
    Report { run_dir: PathBuf },
    /// Full synthetic pipeline with planted parameters.
    Simulate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: u32,
        #[arg(long, default_value_t = DEFAULT_REPLICATES)]
        replicates: u32,
        #[arg(long, default_value_t = 0.670)]
        sigma: f64,
        #[arg(long, default_value_t = 2.630)]
        lambda: f64,
        #[arg(long, default_value_t = 0.685)]
        gamma: f64,
        /// Marker choice sharpness per percentage point.
        #[arg(long, default_value_t = 0.5)]
        sharpness: f64,
    },
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Stage1(args) => {
            let config = args.load()?;
            let report = pipeline::cmd_stage1(&config)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Stage2(args) => {
            let config = args.load()?;
            let file = pipeline::cmd_stage2(&config)?;
            println!("{}", serde_json::to_string_pretty(&file)?);
        }
        Command::Round {
            config,
            round,
            marker_map,
        } => {
            let c = config.load()?;
            let round = Round::from_str_opt(&round)
                .with_context(|| format!("unknown round {round:?} (use round1..round4)"))?;
            let map =
                marker_map.unwrap_or_else(|| c.output_dir.join("stage2").join("marker_map.json"));
            let report = pipeline::cmd_round(&c, round, &map)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Fit {
            counts,
            probs,
            replicates,
            seed,
        } => {
            let report = pipeline::cmd_fit(&counts, &probs, replicates, seed)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Report { run_dir } => {
            let summary = pipeline::cmd_report(&run_dir)?;
            print!("{summary}");
        }
        Command::Simulate {
            out,
            seed,
            samples,
            replicates,
            sigma,
            lambda,
            gamma,
            sharpness,
        } => {
            let marker_probs: BTreeMap<String, f64> = MARKERS
                .iter()
                .map(|m| (m.text.to_string(), m.human_probability))
                .collect();
            let config = RunConfig {
                agent: AgentConfig::Synthetic {
                    sigma,
                    lambda,
                    gamma,
                    marker_probs,
                    sharpness,
                },
                n_samples: samples,
                bootstrap_replicates: replicates,
                master_seed: seed,
                output_dir: out,
            };
            config.validate()?;
            let summary = pipeline::cmd_simulate(&config)?;
            print!("{summary}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let payload = serde_json::json!({
                "error": format!("{e:#}"),
            });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}
