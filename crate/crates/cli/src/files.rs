//! File formats and atomic persistence.
//!
//! Counts are CSV, everything else JSON/JSONL. All writes go through a
//! temporary file in the target directory followed by a rename, so readers
//! never observe partial artifacts. Reports carry no timestamps; wall-clock
//! data lives only in the manifest, keeping re-runs byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use pte_core::agent::TranscriptRecord;
use pte_core::design::{LotteryId, Round, Series};
use pte_core::estimate::{ChoiceTable, EstimationReport, TableRow};
use pte_core::mapping::{
    MappingResult, MarkerAssignment, MarkerMap, NormalizedPair, SweepDiagnostic, SweepResult,
};
use pte_core::pt::Prospect;

pub const FORMAT_VERSION: u32 = 1;

/// Write via tmp file + rename in the same directory.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().context("target path has no parent")?;
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name()
            .and_then(|n| n.to_str())
            .context("bad file name")?
    ));
    {
        let mut f =
            fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

// --- counts CSV ---

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsRow {
    pub series: String,
    pub index: u32,
    pub k_count: u32,
    pub n_samples: u32,
}

pub fn write_counts_csv(path: &Path, table: &ChoiceTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in table.rows() {
        w.serialize(CountsRow {
            series: row.id.series.as_str().to_string(),
            index: row.id.index,
            k_count: row.k_count,
            n_samples: row.n_samples,
        })?;
    }
    atomic_write(path, &w.into_inner()?)
}

pub fn read_counts_csv(path: &Path) -> Result<Vec<(LotteryId, u32, u32)>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, rec) in r.deserialize::<CountsRow>().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        let series = Series::from_str_opt(&rec.series).with_context(|| {
            format!(
                "{}: row {}: unknown series {:?}",
                path.display(),
                i + 2,
                rec.series
            )
        })?;
        if rec.k_count > rec.n_samples {
            bail!(
                "{}: row {}: k_count {} exceeds n_samples {}",
                path.display(),
                i + 2,
                rec.k_count,
                rec.n_samples
            );
        }
        out.push((
            LotteryId {
                series,
                index: rec.index,
            },
            rec.k_count,
            rec.n_samples,
        ));
    }
    Ok(out)
}

// --- effective probability sidecar ---

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProspectSpec {
    pub x: f64,
    pub p: f64,
    pub y: f64,
    pub q: f64,
}

impl From<&Prospect> for ProspectSpec {
    fn from(pr: &Prospect) -> Self {
        Self {
            x: pr.x(),
            p: pr.p(),
            y: pr.y(),
            q: pr.q(),
        }
    }
}

impl ProspectSpec {
    pub fn to_prospect(self) -> Result<Prospect> {
        Ok(Prospect::new(self.x, self.p, self.y, self.q)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbsRow {
    pub series: String,
    pub index: u32,
    pub option_k: ProspectSpec,
    pub option_u: ProspectSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbsFile {
    pub version: u32,
    pub round: String,
    pub rows: Vec<ProbsRow>,
}

pub fn write_probs_json(path: &Path, table: &ChoiceTable) -> Result<()> {
    let rows = table
        .rows()
        .iter()
        .map(|r| ProbsRow {
            series: r.id.series.as_str().to_string(),
            index: r.id.index,
            option_k: (&r.option_k).into(),
            option_u: (&r.option_u).into(),
        })
        .collect();
    write_json(
        path,
        &ProbsFile {
            version: FORMAT_VERSION,
            round: table.round.as_str().to_string(),
            rows,
        },
    )
}

/// Rebuild a [`ChoiceTable`] from a counts CSV and its probability sidecar.
/// Every counts row must have a matching sidecar row; for a full-battery
/// table the missing lottery is named.
pub fn load_choice_table(counts_path: &Path, probs_path: &Path) -> Result<ChoiceTable> {
    let counts = read_counts_csv(counts_path)?;
    let probs: ProbsFile = read_json(probs_path)?;
    let round = Round::from_str_opt(&probs.round)
        .with_context(|| format!("{}: unknown round {:?}", probs_path.display(), probs.round))?;
    let mut by_id: BTreeMap<LotteryId, &ProbsRow> = BTreeMap::new();
    for row in &probs.rows {
        let series = Series::from_str_opt(&row.series).with_context(|| {
            format!("{}: unknown series {:?}", probs_path.display(), row.series)
        })?;
        by_id.insert(
            LotteryId {
                series,
                index: row.index,
            },
            row,
        );
    }
    let expected: Vec<LotteryId> = pte_core::design::battery().iter().map(|l| l.id).collect();
    if counts.len() == expected.len() - 1 {
        let present: std::collections::BTreeSet<_> = counts.iter().map(|(id, _, _)| *id).collect();
        if let Some(missing) = expected.iter().find(|id| !present.contains(id)) {
            bail!("{}: missing lottery {missing}", counts_path.display());
        }
    }
    let rows = counts
        .into_iter()
        .map(|(id, k, n)| {
            let pr = by_id.get(&id).with_context(|| {
                format!("{}: no probability row for {id}", probs_path.display())
            })?;
            Ok(TableRow {
                id,
                k_count: k,
                n_samples: n,
                option_k: pr.option_k.to_prospect()?,
                option_u: pr.option_u.to_prospect()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChoiceTable::new(round, rows)?)
}

// --- reports ---

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub version: u32,
    pub round: String,
    pub master_seed: u64,
    pub n_samples: u32,
    pub report: EstimationReport,
    /// Slot name -> chosen marker pair; empty for baseline.
    pub chosen_pairs: BTreeMap<String, NormalizedPair>,
    pub parse_failures: u64,
}

pub fn assignment_by_slot_name(assignment: &MarkerAssignment) -> BTreeMap<String, NormalizedPair> {
    assignment
        .iter()
        .map(|(slot, pair)| (slot.to_string(), pair.clone()))
        .collect()
}

// --- marker map ---

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerMapEntry {
    pub p_mapping: Option<f64>,
    pub diagnostic: SweepDiagnostic,
    pub crossing_used: Option<usize>,
    /// (grid percent, K-count, samples) per grid point.
    pub counts: Vec<(u32, u32, u32)>,
    pub monotone: bool,
    pub human_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerMapFile {
    pub version: u32,
    pub master_seed: u64,
    pub n_samples: u32,
    pub markers: BTreeMap<String, MarkerMapEntry>,
    /// Marker text -> error message for sweeps that failed outright; the
    /// run continues past them.
    #[serde(default)]
    pub failed: BTreeMap<String, String>,
}

pub fn marker_map_entry(sweep: &SweepResult, mapping: &MappingResult) -> MarkerMapEntry {
    MarkerMapEntry {
        p_mapping: mapping.p_mapping,
        diagnostic: mapping.diagnostic,
        crossing_used: mapping.crossing_used,
        counts: sweep.counts.clone(),
        monotone: sweep.monotone,
        human_probability: sweep.marker.human_probability,
    }
}

/// The core-side map reconstructed from a persisted file.
pub fn marker_map_from_file(file: &MarkerMapFile) -> MarkerMap {
    file.markers
        .iter()
        .map(|(text, entry)| {
            (
                text.clone(),
                MappingResult {
                    marker: text.clone(),
                    p_mapping: entry.p_mapping,
                    diagnostic: entry.diagnostic,
                    crossing_used: entry.crossing_used,
                },
            )
        })
        .collect()
}

// --- transcripts ---

pub fn write_transcripts_jsonl(path: &Path, records: &[TranscriptRecord]) -> Result<()> {
    let mut bytes = Vec::new();
    for rec in records {
        serde_json::to_writer(&mut bytes, rec)?;
        bytes.push(b'\n');
    }
    atomic_write(path, &bytes)
}

// --- manifest ---

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageEntry {
    pub artifacts: Vec<PathBuf>,
    pub wall_seconds: f64,
    pub parse_failures: u64,
    pub completed_utc: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub tool_version: String,
    pub config: Option<serde_json::Value>,
    pub stages: BTreeMap<String, StageEntry>,
}

impl Manifest {
    pub fn load_or_new(path: &Path) -> Result<Self> {
        if path.exists() {
            read_json(path)
        } else {
            Ok(Self {
                version: FORMAT_VERSION,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                config: None,
                stages: BTreeMap::new(),
            })
        }
    }
}

// --- summary CSVs ---

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkerSummaryRow {
    pub marker: String,
    pub p_mapping: Option<f64>,
    pub diagnostic: String,
    pub human_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundSummaryRow {
    pub round: String,
    pub sigma: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub mae: f64,
    pub r2: f64,
    pub reliable: bool,
}

pub fn write_csv_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    atomic_write(path, &w.into_inner()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pte_core::design::Round;
    use pte_core::estimate::synthetic_table;
    use pte_core::mapping::effective_battery;
    use pte_core::pt::PtParams;

    fn sample_table() -> ChoiceTable {
        let eff = effective_battery(Round::Baseline, &MarkerAssignment::new()).unwrap();
        synthetic_table(&eff, Round::Baseline, &PtParams::identity(), 16, 1).unwrap()
    }

    #[test]
    fn counts_and_probs_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let counts = dir.path().join("counts.csv");
        let probs = dir.path().join("probs.json");
        let table = sample_table();
        write_counts_csv(&counts, &table).unwrap();
        write_probs_json(&probs, &table).unwrap();
        let loaded = load_choice_table(&counts, &probs).unwrap();
        assert_eq!(loaded, table);
    }

    #[test]
    fn missing_lottery_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let counts = dir.path().join("counts.csv");
        let probs = dir.path().join("probs.json");
        let table = sample_table();
        write_probs_json(&probs, &table).unwrap();
        let text = std::fs::read_to_string({
            write_counts_csv(&counts, &table).unwrap();
            &counts
        })
        .unwrap();
        // drop the S2-3 row
        let truncated: Vec<&str> = text.lines().filter(|l| !l.starts_with("S2,3,")).collect();
        std::fs::write(&counts, truncated.join("\n")).unwrap();
        let err = load_choice_table(&counts, &probs).unwrap_err();
        assert!(err.to_string().contains("S2-3"), "{err}");
    }

    #[test]
    fn bad_counts_name_the_row() {
        let dir = tempfile::tempdir().unwrap();
        let counts = dir.path().join("counts.csv");
        std::fs::write(&counts, "series,index,k_count,n_samples\nS1,1,20,16\n").unwrap();
        let err = read_counts_csv(&counts).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        atomic_write(&p, b"one").unwrap();
        atomic_write(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
