//! Choice-making agents and session machinery.
//!
//! An agent receives a rendered prompt plus the structured trial payload and
//! returns a K/U choice. Synthetic agents live here and drive the estimation
//! and mapping oracles; the HTTP chat agent lives in the std companion crate
//! and implements the same [`ChoiceAgent`] trait.
//!
//! One session is one battery (or sweep) pass: a seeded RNG stream, a rolling
//! history of at most 15 exchanges, and a transcript. History resets between
//! passes.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::{LotteryId, Round, Series};
use crate::mapping::{effective_battery, MappingError, MarkerAssignment};
use crate::prompt::{render_decision_prompt, session_order, PromptError};
use crate::pt::{choice_probability, sigmoid, Prospect, PtParams};
use crate::seed::derive_seed;

/// Rolling history capacity: at most this many (prompt, reply) exchanges are
/// carried into the next trial of a session.
pub const HISTORY_CAPACITY: usize = 15;

/// How many fresh draws replace a persistently unparseable one before the
/// pass is abandoned.
pub const RESAMPLE_LIMIT: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    K,
    U,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::K => "K",
            Label::U => "U",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error("transport failure after {attempts} attempts: {message}")]
    Transport { message: String, attempts: u32 },
    #[error("no recognizable label after {attempts} attempts; last reply: {reply:?}")]
    UnparseableReply { reply: String, attempts: u32 },
    #[error("agent does not handle this trial type")]
    UnsupportedPayload,
    #[error("no probability configured for marker {0:?}")]
    MissingMarkerProbability(String),
}

/// A parsed choice together with the raw reply and how many attempts it
/// took.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceOutcome {
    pub label: Label,
    pub raw_reply: String,
    pub attempts: u32,
}

/// One raw exchange, persisted as a JSONL line by the companion crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub pass_id: u32,
    pub seed: u64,
    /// `None` for sweep trials, where `index` holds the grid percent.
    pub series: Option<Series>,
    pub index: u32,
    pub prompt: String,
    pub raw_reply: String,
    pub label: Label,
    pub attempts: u32,
}

/// The structured trial alongside the rendered prompt. Synthetic agents act
/// on the payload; the HTTP agent acts on the prompt text.
#[derive(Debug, Clone, PartialEq)]
pub enum ChoicePayload<'a> {
    /// Prospects carry the probabilities actually in force (marker-implied
    /// in substitution rounds).
    Battery {
        option_k: Prospect,
        option_u: Prospect,
    },
    Mapping {
        numeric_p: f64,
        marker: &'a str,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceRequest<'a> {
    pub prompt: &'a str,
    pub payload: ChoicePayload<'a>,
}

/// Per-pass state: seeded RNG stream and the rolling exchange history.
pub struct SessionState {
    seed: u64,
    history: VecDeque<(String, String)>,
    rng: ChaCha12Rng,
    parse_failures: u32,
}

impl SessionState {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            history: VecDeque::with_capacity(HISTORY_CAPACITY),
            rng: ChaCha12Rng::seed_from_u64(seed),
            parse_failures: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Oldest-first view of the retained exchanges.
    pub fn history(&self) -> impl Iterator<Item = &(String, String)> {
        self.history.iter()
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    pub fn rng(&mut self) -> &mut ChaCha12Rng {
        &mut self.rng
    }

    pub fn parse_failures(&self) -> u32 {
        self.parse_failures
    }

    fn record_exchange(&mut self, prompt: &str, reply: &str) {
        if self.history.len() == HISTORY_CAPACITY {
            self.history.pop_front();
        }
        self.history
            .push_back((prompt.to_string(), reply.to_string()));
    }

    /// Run one decision, discarding and redrawing on persistent parse
    /// failures (tallied, bounded by [`RESAMPLE_LIMIT`]). The exchange is
    /// appended to the history on success.
    pub fn decide_with_resample(
        &mut self,
        agent: &mut dyn ChoiceAgent,
        request: &ChoiceRequest<'_>,
    ) -> Result<ChoiceOutcome, AgentError> {
        let mut last_err = None;
        for _ in 0..RESAMPLE_LIMIT {
            match agent.decide(self, request) {
                Ok(outcome) => {
                    self.record_exchange(request.prompt, &outcome.raw_reply);
                    return Ok(outcome);
                }
                Err(e @ AgentError::UnparseableReply { .. }) => {
                    self.parse_failures += 1;
                    last_err = Some(e);
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_err.expect("resample loop ran"))
    }
}

/// A binary-choice agent. Implementations read the session (history, RNG)
/// but must not write history; the session records exchanges itself.
pub trait ChoiceAgent {
    fn decide(
        &mut self,
        session: &mut SessionState,
        request: &ChoiceRequest<'_>,
    ) -> Result<ChoiceOutcome, AgentError>;
}

/// Extract a K/U label from a reply.
///
/// Priority: a bracketed `[K]`/`[U]` anywhere (a reply containing both is
/// ambiguous and fails); otherwise the first alphabetic token, when it is a
/// standalone `K`/`U` in either case.
pub fn parse_label(reply: &str) -> Option<Label> {
    let lower = reply.to_lowercase();
    let has_k = lower.contains("[k]");
    let has_u = lower.contains("[u]");
    match (has_k, has_u) {
        (true, true) => return None,
        (true, false) => return Some(Label::K),
        (false, true) => return Some(Label::U),
        (false, false) => {}
    }
    let first_token: String = lower
        .chars()
        .skip_while(|c| !c.is_alphabetic())
        .take_while(|c| c.is_alphabetic())
        .collect();
    match first_token.as_str() {
        "k" => Some(Label::K),
        "u" => Some(Label::U),
        _ => None,
    }
}

fn bernoulli_choice(rng: &mut ChaCha12Rng, p_choose_k: f64) -> ChoiceOutcome {
    let label = if rng.gen::<f64>() < p_choose_k {
        Label::K
    } else {
        Label::U
    };
    let raw_reply = match label {
        Label::K => "[K]".to_string(),
        Label::U => "[U]".to_string(),
    };
    ChoiceOutcome {
        label,
        raw_reply,
        attempts: 1,
    }
}

/// Synthetic agent with planted PT parameters: chooses K with the model's
/// own predicted probability. The estimation oracle.
#[derive(Debug, Clone)]
pub struct SyntheticPtAgent {
    pub params: PtParams,
}

impl SyntheticPtAgent {
    pub fn new(params: PtParams) -> Self {
        Self { params }
    }
}

impl ChoiceAgent for SyntheticPtAgent {
    fn decide(
        &mut self,
        session: &mut SessionState,
        request: &ChoiceRequest<'_>,
    ) -> Result<ChoiceOutcome, AgentError> {
        match &request.payload {
            ChoicePayload::Battery { option_k, option_u } => {
                let p = choice_probability(option_k, option_u, &self.params);
                Ok(bernoulli_choice(session.rng(), p))
            }
            ChoicePayload::Mapping { .. } => Err(AgentError::UnsupportedPayload),
        }
    }
}

/// Synthetic agent with planted marker probabilities: treats a marker as
/// probability q, values both options linearly, and chooses K with
/// probability `sigmoid(sharpness * (p - q) * 100)`. Its 50% crossing sits
/// exactly at p = q, making it the mapping-recovery oracle. `sharpness` is
/// per percentage point of probability difference.
#[derive(Debug, Clone)]
pub struct SyntheticMarkerAgent {
    pub marker_probs: BTreeMap<String, f64>,
    pub sharpness: f64,
}

impl SyntheticMarkerAgent {
    pub fn new(marker_probs: BTreeMap<String, f64>, sharpness: f64) -> Self {
        Self {
            marker_probs,
            sharpness,
        }
    }
}

impl ChoiceAgent for SyntheticMarkerAgent {
    fn decide(
        &mut self,
        session: &mut SessionState,
        request: &ChoiceRequest<'_>,
    ) -> Result<ChoiceOutcome, AgentError> {
        match &request.payload {
            ChoicePayload::Mapping { numeric_p, marker } => {
                let q = *self
                    .marker_probs
                    .get(*marker)
                    .ok_or_else(|| AgentError::MissingMarkerProbability(marker.to_string()))?;
                let p = sigmoid(self.sharpness * (numeric_p - q) * 100.0);
                Ok(bernoulli_choice(session.rng(), p))
            }
            ChoicePayload::Battery { .. } => Err(AgentError::UnsupportedPayload),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error("lottery {id}: {source}")]
    Agent { id: LotteryId, source: AgentError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassRecord {
    pub id: LotteryId,
    pub outcome: ChoiceOutcome,
}

/// Everything produced by one battery pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PassResult {
    pub pass_id: u32,
    pub seed: u64,
    /// In presentation order.
    pub records: Vec<PassRecord>,
    pub parse_failures: u32,
    pub transcript: Vec<TranscriptRecord>,
}

/// Present all 35 lotteries in session order, maintaining history, and
/// return one outcome per lottery. Marker-implied probabilities are in force
/// both in the rendered prompts and in the payloads handed to synthetic
/// agents.
pub fn run_battery_pass(
    agent: &mut dyn ChoiceAgent,
    round: Round,
    assignment: &MarkerAssignment,
    pass_id: u32,
    seed: u64,
    k_first: bool,
) -> Result<PassResult, ExperimentError> {
    let effective = effective_battery(round, assignment)?;
    let order = session_order(derive_seed(seed, "order", 0));
    let mut session = SessionState::new(seed);
    let mut records = Vec::with_capacity(order.len());
    let mut transcript = Vec::with_capacity(order.len());
    for (i, id) in order.iter().enumerate() {
        let eff = effective
            .iter()
            .find(|e| e.lottery.id == *id)
            .expect("session order covers the battery");
        let prompt = render_decision_prompt(&eff.lottery, i + 1, round, assignment, k_first)?;
        let request = ChoiceRequest {
            prompt: &prompt,
            payload: ChoicePayload::Battery {
                option_k: eff.option_k,
                option_u: eff.option_u,
            },
        };
        let outcome = session
            .decide_with_resample(agent, &request)
            .map_err(|source| ExperimentError::Agent { id: *id, source })?;
        debug_assert!(session.history_len() <= HISTORY_CAPACITY);
        transcript.push(TranscriptRecord {
            pass_id,
            seed,
            series: Some(id.series),
            index: id.index,
            prompt,
            raw_reply: outcome.raw_reply.clone(),
            label: outcome.label,
            attempts: outcome.attempts,
        });
        records.push(PassRecord { id: *id, outcome });
    }
    Ok(PassResult {
        pass_id,
        seed,
        records,
        parse_failures: session.parse_failures(),
        transcript,
    })
}

/// Per-lottery (K-count, trials) over a set of passes. A pure fold:
/// replaying persisted transcripts through this reproduces identical counts.
pub fn aggregate_counts(passes: &[PassResult]) -> BTreeMap<LotteryId, (u32, u32)> {
    let mut out: BTreeMap<LotteryId, (u32, u32)> = BTreeMap::new();
    for pass in passes {
        for rec in &pass.records {
            let entry = out.entry(rec.id).or_insert((0, 0));
            if rec.outcome.label == Label::K {
                entry.0 += 1;
            }
            entry.1 += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::battery;
    use crate::pt::PtParams;

    #[test]
    fn parse_label_cases() {
        assert_eq!(parse_label("[K]"), Some(Label::K));
        assert_eq!(parse_label("[U]"), Some(Label::U));
        assert_eq!(parse_label("Sure! The answer is: [U]"), Some(Label::U));
        assert_eq!(parse_label("k"), Some(Label::K));
        assert_eq!(parse_label("  U."), Some(Label::U));
        assert_eq!(parse_label("[K] or [U]"), None);
        assert_eq!(parse_label("neither"), None);
        assert_eq!(parse_label(""), None);
    }

    #[test]
    fn synthetic_pt_is_fair_at_equal_utilities() {
        // identical options: p = 0.5; frequency within 2.5 binomial sigma
        let l = battery()[0];
        let mut agent = SyntheticPtAgent::new(PtParams::identity());
        let mut session = SessionState::new(99);
        let request = ChoiceRequest {
            prompt: "p",
            payload: ChoicePayload::Battery {
                option_k: l.option_k,
                option_u: l.option_k,
            },
        };
        let mut k = 0;
        for _ in 0..1024 {
            let o = agent.decide(&mut session, &request).unwrap();
            if o.label == Label::K {
                k += 1;
            }
        }
        let rate = k as f64 / 1024.0;
        assert!((rate - 0.5).abs() < 0.04, "rate {rate}");
    }

    #[test]
    fn history_is_bounded_and_rolls() {
        let mut s = SessionState::new(1);
        for i in 0..40 {
            s.record_exchange(&alloc::format!("p{i}"), "r");
        }
        assert_eq!(s.history_len(), HISTORY_CAPACITY);
        assert_eq!(s.history().next().unwrap().0, "p25");
    }

    #[test]
    fn battery_pass_is_deterministic() {
        let mut a = SyntheticPtAgent::new(PtParams::new(0.67, 2.63, 0.685).unwrap());
        let assignment = MarkerAssignment::new();
        let r1 = run_battery_pass(&mut a, Round::Baseline, &assignment, 0, 1234, true).unwrap();
        let mut a2 = SyntheticPtAgent::new(PtParams::new(0.67, 2.63, 0.685).unwrap());
        let r2 = run_battery_pass(&mut a2, Round::Baseline, &assignment, 0, 1234, true).unwrap();
        assert_eq!(r1.records, r2.records);
        assert_eq!(r1.records.len(), 35);
        assert_eq!(r1.parse_failures, 0);
    }

    #[test]
    fn dominated_lottery_rarely_chosen() {
        // S1 lottery 14: U has EV 175 vs K's 19; at identity params
        // sigmoid(19 - 175) is numerically zero
        let mut passes = Vec::new();
        for pass in 0..256u32 {
            let mut a = SyntheticPtAgent::new(PtParams::identity());
            passes.push(
                run_battery_pass(
                    &mut a,
                    Round::Baseline,
                    &MarkerAssignment::new(),
                    pass,
                    pass as u64,
                    true,
                )
                .unwrap(),
            );
        }
        let counts = aggregate_counts(&passes);
        let id = LotteryId {
            series: Series::S1,
            index: 14,
        };
        let (k, n) = counts[&id];
        assert_eq!(n, 256);
        assert!((k as f64 / n as f64) < 0.01, "k = {k}");
    }

    #[test]
    fn synthetic_choices_converge_to_model_probabilities() {
        let params = PtParams::new(0.67, 2.63, 0.685).unwrap();
        let m = 512u32;
        let mut passes = Vec::new();
        for pass in 0..m {
            let mut a = SyntheticPtAgent::new(params);
            passes.push(
                run_battery_pass(
                    &mut a,
                    Round::Baseline,
                    &MarkerAssignment::new(),
                    pass,
                    derive_seed(5, "conv", pass as u64),
                    true,
                )
                .unwrap(),
            );
        }
        let counts = aggregate_counts(&passes);
        for l in battery() {
            let p = choice_probability(&l.option_k, &l.option_u, &params);
            let (k, n) = counts[&l.id];
            let rate = k as f64 / n as f64;
            let slack = 4.0 * libm::sqrt(p * (1.0 - p) / m as f64);
            assert!(
                (rate - p).abs() <= slack.max(1e-9),
                "{}: rate {rate} vs p {p}",
                l.id
            );
        }
    }
}
