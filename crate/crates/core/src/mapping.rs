//! Epistemic-marker probability mapping: the switching-point sweep,
//! linear interpolation of the 50% crossing, marker-pair selection with
//! normalization, and substitution of marker-implied probabilities into the
//! battery.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{
    AgentError, ChoiceAgent, ChoicePayload, ChoiceRequest, Label, SessionState, TranscriptRecord,
};
use crate::design::{battery, Lottery, MarkerSpec, Round, Slot};
use crate::prompt::{render_mapping_prompt, shuffled};
use crate::pt::{Prospect, PtError};
use crate::seed::derive_seed;

/// The probability grid swept for each marker, in percent.
pub const SWEEP_GRID: [u32; 10] = [5, 15, 25, 35, 45, 55, 65, 75, 85, 95];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MappingError {
    #[error("n_samples must be even and >= 2, got {0}")]
    BadSampleCount(u32),
    #[error("fewer than 2 markers with a usable mapping; pair selection needs at least 2")]
    TooFewMappedMarkers,
    #[error("no marker pair assigned for slot {0}")]
    MissingAssignment(String),
    #[error("target probabilities {0} + {1} do not sum to 1")]
    BadTarget(f64, f64),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Prospect(#[from] PtError),
}

/// Raw sweep counts for one marker: K-selections per grid probability.
/// Write-only output; not read back, so no deserialization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub marker: MarkerSpec,
    /// (grid percent, K-count, samples), ascending in percent.
    pub counts: Vec<(u32, u32, u32)>,
    /// Indices i where the K-count ascends through half the samples between
    /// grid point i and i+1.
    pub crossings: Vec<usize>,
    pub monotone: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepDiagnostic {
    Clean,
    MultipleCrossings,
    /// K preferred at every grid point: the count never drops below half.
    NoCrossingAllK,
    /// U preferred at every grid point.
    NoCrossingAllU,
}

/// The interpolated switching point for one marker, if it exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingResult {
    pub marker: String,
    /// Implied probability in percent, within [5, 95].
    pub p_mapping: Option<f64>,
    pub diagnostic: SweepDiagnostic,
    /// Index into `SweepResult::crossings` of the crossing used.
    pub crossing_used: Option<usize>,
}

/// Marker text -> mapping outcome; the Stage 2 deliverable.
pub type MarkerMap = BTreeMap<String, MappingResult>;

/// A selected marker pair normalized so the two implied probabilities sum
/// to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPair {
    pub marker_low: String,
    pub marker_high: String,
    pub p_low_norm: f64,
    pub p_high_norm: f64,
    /// The (low, high) probabilities this pair substitutes for.
    pub target: (f64, f64),
    /// |normalized low - target low|.
    pub distance: f64,
}

/// Per-slot pair assignment used when rendering and fitting a round.
pub type MarkerAssignment = BTreeMap<Slot, NormalizedPair>;

/// Sweep one marker: each of `n_samples` passes presents the full grid in
/// session order (history maintained, same mechanics as battery passes) and
/// K-selections are tallied per grid point.
pub fn run_sweep(
    agent: &mut dyn ChoiceAgent,
    marker: &MarkerSpec,
    n_samples: u32,
    master_seed: u64,
) -> Result<(SweepResult, Vec<TranscriptRecord>), MappingError> {
    if n_samples < 2 || !n_samples.is_multiple_of(2) {
        return Err(MappingError::BadSampleCount(n_samples));
    }
    let mut k_counts = [0u32; 10];
    let mut transcript = Vec::new();
    for pass in 0..n_samples {
        let pass_seed = derive_seed(master_seed, marker.text, pass as u64);
        let mut session = SessionState::new(pass_seed);
        let order = shuffled(&SWEEP_GRID, derive_seed(pass_seed, "order", 0));
        for (i, grid_p) in order.iter().enumerate() {
            let prompt = render_mapping_prompt(i + 1, *grid_p, marker.text);
            let request = ChoiceRequest {
                prompt: &prompt,
                payload: ChoicePayload::Mapping {
                    numeric_p: *grid_p as f64 / 100.0,
                    marker: marker.text,
                },
            };
            let outcome = session.decide_with_resample(agent, &request)?;
            if outcome.label == Label::K {
                let slot = SWEEP_GRID.iter().position(|g| g == grid_p).unwrap();
                k_counts[slot] += 1;
            }
            transcript.push(TranscriptRecord {
                pass_id: pass,
                seed: pass_seed,
                series: None,
                index: *grid_p,
                prompt: prompt.clone(),
                raw_reply: outcome.raw_reply.clone(),
                label: outcome.label,
                attempts: outcome.attempts,
            });
        }
    }
    let counts: Vec<(u32, u32, u32)> = SWEEP_GRID
        .iter()
        .zip(k_counts.iter())
        .map(|(p, k)| (*p, *k, n_samples))
        .collect();
    Ok((build_sweep_result(*marker, counts, n_samples), transcript))
}

/// Assemble a [`SweepResult`] from raw counts, computing crossings and the
/// monotonicity flag.
pub fn build_sweep_result(
    marker: MarkerSpec,
    counts: Vec<(u32, u32, u32)>,
    n_samples: u32,
) -> SweepResult {
    let n0 = n_samples as f64 / 2.0;
    let crossings = ascending_crossings(&counts, n0);
    let monotone = counts.windows(2).all(|w| w[0].1 <= w[1].1);
    SweepResult {
        marker,
        counts,
        crossings,
        monotone,
    }
}

fn ascending_crossings(counts: &[(u32, u32, u32)], n0: f64) -> Vec<usize> {
    counts
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0].1 as f64) < n0 && n0 <= w[1].1 as f64)
        .map(|(i, _)| i)
        .collect()
}

/// Locate the 50% switching point by linear interpolation between the two
/// nearest grid points.
///
/// With `n0 = 0.5 * n_samples` and a crossing pair `(p_x, cnt_x)`,
/// `(p_y, cnt_y)` satisfying `cnt_x < n0 <= cnt_y`:
/// `p_mapping = ((n0 - cnt_x) * p_y + (cnt_y - n0) * p_x) / (cnt_y - cnt_x)`.
/// Under non-monotone counts the first ascending crossing is used and the
/// diagnostic surfaces the ambiguity.
pub fn interpolate_mapping(sweep: &SweepResult, n_samples: u32) -> MappingResult {
    let n0 = n_samples as f64 / 2.0;
    let marker = sweep.marker.text.to_string();
    if sweep.crossings.is_empty() {
        let all_at_or_above = sweep.counts.iter().all(|(_, k, _)| *k as f64 >= n0);
        let diagnostic = if all_at_or_above {
            SweepDiagnostic::NoCrossingAllK
        } else {
            SweepDiagnostic::NoCrossingAllU
        };
        return MappingResult {
            marker,
            p_mapping: None,
            diagnostic,
            crossing_used: None,
        };
    }
    let i = sweep.crossings[0];
    let (p_x, cnt_x, _) = sweep.counts[i];
    let (p_y, cnt_y, _) = sweep.counts[i + 1];
    let (p_x, cnt_x, p_y, cnt_y) = (p_x as f64, cnt_x as f64, p_y as f64, cnt_y as f64);
    let p_mapping = ((n0 - cnt_x) * p_y + (cnt_y - n0) * p_x) / (cnt_y - cnt_x);
    let diagnostic = if sweep.crossings.len() == 1 {
        SweepDiagnostic::Clean
    } else {
        SweepDiagnostic::MultipleCrossings
    };
    MappingResult {
        marker,
        p_mapping: Some(p_mapping),
        diagnostic,
        crossing_used: Some(0),
    }
}

/// Pick, over all ordered pairs of distinct mapped markers with
/// `p_a < p_b`, the pair whose normalized low probability
/// `p_a / (p_a + p_b)` is closest to the target's low side. Ties break by
/// smaller raw distance `|p_a - 100 * target_low|`, then lexicographic
/// marker text.
///
/// Markers without a usable `p_mapping` (no-crossing diagnostics) are not
/// candidates.
pub fn select_pair(map: &MarkerMap, target: (f64, f64)) -> Result<NormalizedPair, MappingError> {
    if (target.0 + target.1 - 1.0).abs() > 1e-9 {
        return Err(MappingError::BadTarget(target.0, target.1));
    }
    let target_low = target.0.min(target.1);
    let target_high = target.0.max(target.1);
    let mapped: Vec<(&String, f64)> = map
        .iter()
        .filter_map(|(text, res)| res.p_mapping.map(|p| (text, p)))
        .collect();
    if mapped.len() < 2 {
        return Err(MappingError::TooFewMappedMarkers);
    }
    // candidates carry (normalized distance, raw low-side distance, names)
    // as the sort key; p_mapping values are in percent
    let mut candidates: Vec<(NormalizedPair, f64)> = Vec::new();
    for (text_a, p_a) in &mapped {
        for (text_b, p_b) in &mapped {
            // distinct markers, low side first; equal values pair up once
            if text_a == text_b || p_a > p_b || (p_a == p_b && text_a >= text_b) {
                continue;
            }
            let p_low_norm = p_a / (p_a + p_b);
            candidates.push((
                NormalizedPair {
                    marker_low: (*text_a).clone(),
                    marker_high: (*text_b).clone(),
                    p_low_norm,
                    p_high_norm: 1.0 - p_low_norm,
                    target: (target_low, target_high),
                    distance: (p_low_norm - target_low).abs(),
                },
                (*p_a - 100.0 * target_low).abs(),
            ));
        }
    }
    candidates.sort_by(|(a, raw_a), (b, raw_b)| {
        a.distance
            .total_cmp(&b.distance)
            .then(raw_a.total_cmp(raw_b))
            .then_with(|| {
                (a.marker_low.as_str(), a.marker_high.as_str())
                    .cmp(&(b.marker_low.as_str(), b.marker_high.as_str()))
            })
    });
    Ok(candidates.swap_remove(0).0)
}

/// Build the per-slot assignment a round needs: one pair per marked slot,
/// selected independently against that slot's target probabilities.
pub fn assign_pairs(map: &MarkerMap, round: Round) -> Result<MarkerAssignment, MappingError> {
    let mut out = MarkerAssignment::new();
    for slot in round.marked_slots() {
        let (tx, ty) = slot.target_probabilities();
        let pair = select_pair(map, (tx.min(ty), tx.max(ty)))?;
        out.insert(slot, pair);
    }
    Ok(out)
}

/// A battery lottery together with the prospects actually in force for a
/// round: marked slots carry the pair's normalized probabilities, aligned so
/// the branch with the larger original probability receives the higher one;
/// unmarked slots keep the table values.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveLottery {
    pub lottery: Lottery,
    pub option_k: Prospect,
    pub option_u: Prospect,
}

/// Apply a round's marker assignment to the full battery.
pub fn effective_battery(
    round: Round,
    assignment: &MarkerAssignment,
) -> Result<Vec<EffectiveLottery>, MappingError> {
    battery()
        .into_iter()
        .map(|lottery| {
            let option_k =
                effective_prospect(&lottery, crate::design::OptionLabel::K, round, assignment)?;
            let option_u =
                effective_prospect(&lottery, crate::design::OptionLabel::U, round, assignment)?;
            Ok(EffectiveLottery {
                lottery,
                option_k,
                option_u,
            })
        })
        .collect()
}

fn effective_prospect(
    lottery: &Lottery,
    option: crate::design::OptionLabel,
    round: Round,
    assignment: &MarkerAssignment,
) -> Result<Prospect, MappingError> {
    let slot = Slot::new(lottery.id.series, option);
    let prospect = match option {
        crate::design::OptionLabel::K => lottery.option_k,
        crate::design::OptionLabel::U => lottery.option_u,
    };
    if !round.marks(slot.series, slot.option) {
        return Ok(prospect);
    }
    let pair = assignment
        .get(&slot)
        .ok_or_else(|| MappingError::MissingAssignment(slot.to_string()))?;
    // higher original probability -> p_high_norm; ties give x the high side
    let (p, q) = if prospect.p() >= prospect.q() {
        (pair.p_high_norm, pair.p_low_norm)
    } else {
        (pair.p_low_norm, pair.p_high_norm)
    };
    Ok(prospect.with_probabilities(p, q)?)
}
