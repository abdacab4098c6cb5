//! Stage orchestration: run passes, aggregate, fit, persist.
//!
//! Layout under the output directory:
//!   manifest.json
//!   stage1/{counts.csv, probs.json, report.json, transcripts/passes.jsonl}
//!   stage2/{marker_map.json, transcripts/sweeps.jsonl}
//!   round1..round4/{counts.csv, probs.json, report.json, transcripts/}
//!
//! Per-pass seeds are hash(master_seed, round name, pass index); bootstrap
//! replicate seeds are hash(master_seed, "boot", replicate index). Both are
//! stable across runs and platforms.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};

use pte_core::agent::{run_battery_pass, ChoiceAgent, PassResult, TranscriptRecord};
use pte_core::design::{Round, MARKERS};
use pte_core::estimate::{fit_with_ci, ChoiceTable, EstimationReport};
use pte_core::mapping::{
    assign_pairs, effective_battery, interpolate_mapping, run_sweep, MarkerAssignment,
};
use pte_core::seed::derive_seed;

use crate::agents::build_agent;
use crate::config::RunConfig;
use crate::files::{
    assignment_by_slot_name, load_choice_table, marker_map_entry, marker_map_from_file, read_json,
    write_counts_csv, write_csv_rows, write_json, write_probs_json, write_transcripts_jsonl,
    Manifest, MarkerMapFile, MarkerSummaryRow, ReportFile, RoundSummaryRow, StageEntry,
    FORMAT_VERSION,
};

fn stage_dir(config: &RunConfig, name: &str) -> PathBuf {
    config.output_dir.join(name)
}

fn record_stage(
    config: &RunConfig,
    name: &str,
    artifacts: Vec<PathBuf>,
    started: Instant,
    parse_failures: u64,
) -> Result<()> {
    let manifest_path = config.output_dir.join("manifest.json");
    let mut manifest = Manifest::load_or_new(&manifest_path)?;
    manifest.config = Some(serde_json::to_value(config)?);
    for artifact in &artifacts {
        if !artifact.exists() {
            bail!(
                "stage {name} claims missing artifact {}",
                artifact.display()
            );
        }
    }
    manifest.stages.insert(
        name.to_string(),
        StageEntry {
            artifacts,
            wall_seconds: started.elapsed().as_secs_f64(),
            parse_failures,
            completed_utc: chrono::Utc::now().to_rfc3339(),
        },
    );
    write_json(&manifest_path, &manifest)
}

/// Run `n_samples` battery passes under one round and its assignment.
pub fn run_passes(
    agent: &mut dyn ChoiceAgent,
    round: Round,
    assignment: &MarkerAssignment,
    n_samples: u32,
    master_seed: u64,
) -> Result<Vec<PassResult>> {
    let mut passes = Vec::with_capacity(n_samples as usize);
    for pass in 0..n_samples {
        let seed = derive_seed(master_seed, round.as_str(), pass as u64);
        passes.push(run_battery_pass(
            agent, round, assignment, pass, seed, true,
        )?);
    }
    Ok(passes)
}

fn persist_round(
    config: &RunConfig,
    name: &str,
    round: Round,
    assignment: &MarkerAssignment,
    passes: &[PassResult],
) -> Result<(EstimationReport, Vec<PathBuf>, u64)> {
    let dir = stage_dir(config, name);
    let effective = effective_battery(round, assignment)?;
    let table = ChoiceTable::from_passes(round, &effective, passes)?;
    let report = fit_with_ci(&table, config.bootstrap_replicates, config.master_seed)?;
    let parse_failures: u64 = passes.iter().map(|p| p.parse_failures as u64).sum();

    let counts_path = dir.join("counts.csv");
    let probs_path = dir.join("probs.json");
    let report_path = dir.join("report.json");
    let transcripts_path = dir.join("transcripts").join("passes.jsonl");
    write_counts_csv(&counts_path, &table)?;
    write_probs_json(&probs_path, &table)?;
    write_json(
        &report_path,
        &ReportFile {
            version: FORMAT_VERSION,
            round: round.as_str().to_string(),
            master_seed: config.master_seed,
            n_samples: config.n_samples,
            report: report.clone(),
            chosen_pairs: assignment_by_slot_name(assignment),
            parse_failures,
        },
    )?;
    let transcript: Vec<TranscriptRecord> = passes
        .iter()
        .flat_map(|p| p.transcript.iter().cloned())
        .collect();
    write_transcripts_jsonl(&transcripts_path, &transcript)?;
    Ok((
        report,
        vec![counts_path, probs_path, report_path, transcripts_path],
        parse_failures,
    ))
}

/// Baseline battery run: passes, counts, fit, bootstrap, artifacts.
pub fn cmd_stage1(config: &RunConfig) -> Result<EstimationReport> {
    let started = Instant::now();
    let mut agent = build_agent(&config.agent)?;
    let passes = run_passes(
        agent.as_mut(),
        Round::Baseline,
        &MarkerAssignment::new(),
        config.n_samples,
        config.master_seed,
    )?;
    let (report, artifacts, parse_failures) = persist_round(
        config,
        "stage1",
        Round::Baseline,
        &MarkerAssignment::new(),
        &passes,
    )?;
    record_stage(config, "stage1", artifacts, started, parse_failures)?;
    Ok(report)
}

/// Sweep all 14 markers and persist the marker map. Per-marker failures are
/// recorded and the run continues.
pub fn cmd_stage2(config: &RunConfig) -> Result<MarkerMapFile> {
    let started = Instant::now();
    let mut agent = build_agent(&config.agent)?;
    let sweep_master = derive_seed(config.master_seed, "stage2", 0);
    let mut file = MarkerMapFile {
        version: FORMAT_VERSION,
        master_seed: config.master_seed,
        n_samples: config.n_samples,
        markers: Default::default(),
        failed: Default::default(),
    };
    let mut transcript = Vec::new();
    let mut parse_failures = 0u64;
    for marker in MARKERS {
        match run_sweep(agent.as_mut(), &marker, config.n_samples, sweep_master) {
            Ok((sweep, records)) => {
                let mapping = interpolate_mapping(&sweep, config.n_samples);
                parse_failures += records.iter().map(|r| (r.attempts - 1) as u64).sum::<u64>();
                transcript.extend(records);
                file.markers
                    .insert(marker.text.to_string(), marker_map_entry(&sweep, &mapping));
            }
            Err(e) => {
                file.failed.insert(marker.text.to_string(), e.to_string());
            }
        }
    }
    let dir = stage_dir(config, "stage2");
    let map_path = dir.join("marker_map.json");
    let transcripts_path = dir.join("transcripts").join("sweeps.jsonl");
    write_json(&map_path, &file)?;
    write_transcripts_jsonl(&transcripts_path, &transcript)?;
    record_stage(
        config,
        "stage2",
        vec![map_path, transcripts_path],
        started,
        parse_failures,
    )?;
    Ok(file)
}

/// One substitution round: select pairs from the marker map, run passes with
/// marker-substituted prompts, fit with effective probabilities.
pub fn cmd_round(config: &RunConfig, round: Round, marker_map: &Path) -> Result<EstimationReport> {
    if round == Round::Baseline {
        bail!("the baseline is stage1, not a substitution round");
    }
    let started = Instant::now();
    let file: MarkerMapFile = read_json(marker_map)?;
    let map = marker_map_from_file(&file);
    let assignment = assign_pairs(&map, round)
        .with_context(|| format!("selecting marker pairs from {}", marker_map.display()))?;
    let mut agent = build_agent(&config.agent)?;
    let passes = run_passes(
        agent.as_mut(),
        round,
        &assignment,
        config.n_samples,
        config.master_seed,
    )?;
    let name = round.as_str();
    let (report, artifacts, parse_failures) =
        persist_round(config, name, round, &assignment, &passes)?;
    record_stage(config, name, artifacts, started, parse_failures)?;
    Ok(report)
}

/// Estimation-only entry point over persisted counts; no agent involved.
pub fn cmd_fit(
    counts_path: &Path,
    probs_path: &Path,
    replicates: u32,
    master_seed: u64,
) -> Result<EstimationReport> {
    let table = load_choice_table(counts_path, probs_path)?;
    Ok(fit_with_ci(&table, replicates, master_seed)?)
}

fn param_line(name: &str, value: f64, ci: (f64, f64), on_boundary: bool) -> String {
    let flag = if on_boundary {
        "  [AT BOX BOUNDARY]"
    } else {
        ""
    };
    format!("  {name:<7} {value:>7.4}  [{:.4}, {:.4}]{flag}", ci.0, ci.1)
}

/// Summarize a run directory: text summary plus plot-data CSVs.
pub fn cmd_report(run_dir: &Path) -> Result<String> {
    let mut summary = String::new();
    let mut round_rows = Vec::new();
    for round in Round::ALL {
        let name = if round == Round::Baseline {
            "stage1"
        } else {
            round.as_str()
        };
        let path = run_dir.join(name).join("report.json");
        if !path.exists() {
            continue;
        }
        let rf: ReportFile = read_json(&path)?;
        let r = &rf.report;
        let p = r.params.as_array();
        summary.push_str(&format!(
            "{} (n = {} per lottery, {} bootstrap replicates)\n",
            round.as_str(),
            rf.n_samples,
            r.bootstrap_replicates
        ));
        for (i, pname) in ["sigma", "lambda", "gamma"].iter().enumerate() {
            summary.push_str(&param_line(pname, p[i], r.ci[i], r.boundary_flags[i]));
            summary.push('\n');
        }
        summary.push_str(&format!(
            "  MAE {:.4}  McFadden R2 {:.4}  {}\n",
            r.mae,
            r.mcfadden_r2,
            if r.reliable {
                "reliable"
            } else {
                "NOT RELIABLE"
            }
        ));
        if !rf.chosen_pairs.is_empty() {
            for (slot, pair) in &rf.chosen_pairs {
                summary.push_str(&format!(
                    "  {slot}: \"{}\" / \"{}\" -> ({:.3}, {:.3})\n",
                    pair.marker_low, pair.marker_high, pair.p_low_norm, pair.p_high_norm
                ));
            }
        }
        summary.push('\n');
        round_rows.push(RoundSummaryRow {
            round: round.as_str().to_string(),
            sigma: p[0],
            lambda: p[1],
            gamma: p[2],
            sigma_lo: r.ci[0].0,
            sigma_hi: r.ci[0].1,
            lambda_lo: r.ci[1].0,
            lambda_hi: r.ci[1].1,
            gamma_lo: r.ci[2].0,
            gamma_hi: r.ci[2].1,
            mae: r.mae,
            r2: r.mcfadden_r2,
            reliable: r.reliable,
        });
    }
    if round_rows.is_empty() {
        bail!("no report.json found under {}", run_dir.display());
    }
    write_csv_rows(&run_dir.join("rounds.csv"), &round_rows)?;

    let map_path = run_dir.join("stage2").join("marker_map.json");
    if map_path.exists() {
        let file: MarkerMapFile = read_json(&map_path)?;
        let mut marker_rows: Vec<MarkerSummaryRow> = file
            .markers
            .iter()
            .map(|(text, e)| MarkerSummaryRow {
                marker: text.clone(),
                p_mapping: e.p_mapping,
                diagnostic: format!("{:?}", e.diagnostic),
                human_probability: e.human_probability,
            })
            .collect();
        // descending implied probability; unmapped markers sink to the end
        marker_rows.sort_by(|a, b| {
            b.p_mapping
                .unwrap_or(f64::NEG_INFINITY)
                .total_cmp(&a.p_mapping.unwrap_or(f64::NEG_INFINITY))
                .then_with(|| a.marker.cmp(&b.marker))
        });
        write_csv_rows(&run_dir.join("markers.csv"), &marker_rows)?;
        summary.push_str("markers by implied probability:\n");
        for row in &marker_rows {
            match row.p_mapping {
                Some(p) => summary.push_str(&format!("  {:<18} {p:6.2}%\n", row.marker)),
                None => summary.push_str(&format!(
                    "  {:<18}   none ({})\n",
                    row.marker, row.diagnostic
                )),
            }
        }
        if !file.failed.is_empty() {
            summary.push_str("failed sweeps:\n");
            for (marker, err) in &file.failed {
                summary.push_str(&format!("  {marker}: {err}\n"));
            }
        }
    }
    let summary_path = run_dir.join("summary.txt");
    crate::files::atomic_write(&summary_path, summary.as_bytes())?;
    Ok(summary)
}

/// Convenience wrapper: full synthetic pipeline (stage1, stage2, all four
/// rounds, report) in one call.
pub fn cmd_simulate(config: &RunConfig) -> Result<String> {
    cmd_stage1(config)?;
    cmd_stage2(config)?;
    let map_path = config.output_dir.join("stage2").join("marker_map.json");
    for round in [Round::R1, Round::R2, Round::R3, Round::R4] {
        cmd_round(config, round, &map_path)?;
    }
    cmd_report(&config.output_dir)
}
