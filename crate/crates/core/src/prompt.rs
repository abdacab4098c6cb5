//! Prompt rendering for decision and mapping trials, plus session ordering.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::design::{battery, Lottery, LotteryId, OptionLabel, Round, Slot};
use crate::mapping::{MarkerAssignment, NormalizedPair};
use crate::pt::Prospect;

/// Opening instruction sent once at the start of every session.
pub const INTRO: &str = "You are invited to participate in an experiment. \
Your task is to choose between option K and option U for each of the following lotteries.";

/// Fixed closing instruction demanding a direct answer.
pub const OUTRO: &str = "Please DO NOT REASON and DIRECTLY output your choice, \
by ONLY returning one of the following two labels: \"[K]\", \"[U]\".\nThe answer is:";

pub const LABEL_K: &str = "[K]";
pub const LABEL_U: &str = "[U]";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PromptError {
    #[error("round marks slot {0} but no marker pair was supplied")]
    MissingMarkerPair(Slot),
}

fn format_amount(v: f64) -> String {
    let a = v.abs();
    if a == libm::trunc(a) {
        format!("{}", a as i64)
    } else {
        format!("{a}")
    }
}

fn win_or_lose(v: f64) -> &'static str {
    if v < 0.0 {
        "lose"
    } else {
        "win"
    }
}

/// One branch line: "30% probability to win $40", or with the probability
/// replaced by a marker phrase: "likely to win $40". Losses render with
/// positive magnitudes.
fn branch_line(outcome: f64, prob: f64, marker: Option<&str>) -> String {
    match marker {
        None => format!(
            "{}% probability to {} ${}",
            libm::round(prob * 100.0) as i64,
            win_or_lose(outcome),
            format_amount(outcome)
        ),
        Some(m) => format!(
            "{} to {} ${}",
            m,
            win_or_lose(outcome),
            format_amount(outcome)
        ),
    }
}

/// Marker texts for the (x, y) branches of a marked option: the branch with
/// the larger original probability carries the higher-probability marker;
/// ties give the x branch the high side.
fn branch_markers<'a>(prospect: &Prospect, pair: &'a NormalizedPair) -> (&'a str, &'a str) {
    if prospect.p() >= prospect.q() {
        (&pair.marker_high, &pair.marker_low)
    } else {
        (&pair.marker_low, &pair.marker_high)
    }
}

fn option_block(label: OptionLabel, prospect: &Prospect, pair: Option<&NormalizedPair>) -> String {
    let (mx, my) = match pair {
        Some(p) => {
            let (a, b) = branch_markers(prospect, p);
            (Some(a), Some(b))
        }
        None => (None, None),
    };
    format!(
        "For option {}:\n{}\n{}",
        label,
        branch_line(prospect.x(), prospect.p(), mx),
        branch_line(prospect.y(), prospect.q(), my),
    )
}

/// Render one decision trial. `index_label` is the session-local position
/// ("Here is lottery {i}:"). Marked slots must have a pair in `assignment`.
pub fn render_decision_prompt(
    lottery: &Lottery,
    index_label: usize,
    round: Round,
    assignment: &MarkerAssignment,
    k_first: bool,
) -> Result<String, PromptError> {
    let mut pairs = [None, None]; // K, U
    for (i, option) in [OptionLabel::K, OptionLabel::U].iter().enumerate() {
        if round.marks(lottery.id.series, *option) {
            let slot = Slot::new(lottery.id.series, *option);
            pairs[i] = Some(
                assignment
                    .get(&slot)
                    .ok_or(PromptError::MissingMarkerPair(slot))?,
            );
        }
    }
    let k = option_block(OptionLabel::K, &lottery.option_k, pairs[0]);
    let u = option_block(OptionLabel::U, &lottery.option_u, pairs[1]);
    let (first, second) = if k_first { (k, u) } else { (u, k) };
    Ok(format!(
        "Here is lottery {index_label}:\n{first}\n{second}\n{OUTRO}"
    ))
}

/// Render one mapping trial: numeric option K at `grid_percent` against the
/// marker-described option U, both over winning $100.
pub fn render_mapping_prompt(index_label: usize, grid_percent: u32, marker: &str) -> String {
    format!(
        "Here is lottery {index_label}:\n\
         For option K:\n{grid_percent}% probability to win $100.\n\
         For option U:\n{marker} to win $100.\n{OUTRO}"
    )
}

/// Deterministic uniformly random permutation of a slice.
pub fn shuffled<T: Clone>(items: &[T], seed: u64) -> Vec<T> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out: Vec<T> = items.into();
    out.shuffle(&mut rng);
    out
}

/// The presentation order of the 35 battery lotteries for one session.
pub fn session_order(seed: u64) -> Vec<LotteryId> {
    let ids: Vec<LotteryId> = battery().iter().map(|l| l.id).collect();
    shuffled(&ids, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::Series;
    use crate::mapping::MarkerAssignment;
    use alloc::collections::BTreeSet;
    use alloc::string::ToString;

    fn pair(low: &str, high: &str, p_low: f64) -> NormalizedPair {
        NormalizedPair {
            marker_low: low.to_string(),
            marker_high: high.to_string(),
            p_low_norm: p_low,
            p_high_norm: 1.0 - p_low,
            target: (p_low, 1.0 - p_low),
            distance: 0.0,
        }
    }

    #[test]
    fn baseline_prompt_contains_table_values() {
        let b = battery();
        let prompt =
            render_decision_prompt(&b[0], 1, Round::Baseline, &MarkerAssignment::new(), true)
                .unwrap();
        assert!(prompt.contains("Here is lottery 1:"));
        assert!(prompt.contains("30% probability to win $40"));
        assert!(prompt.contains("70% probability to win $10"));
        assert!(prompt.contains("10% probability to win $68"));
        assert!(prompt.contains("90% probability to win $5"));
        assert!(prompt.contains(OUTRO));
        // K before U by default
        assert!(prompt.find("For option K:").unwrap() < prompt.find("For option U:").unwrap());
    }

    #[test]
    fn k_first_flag_swaps_order() {
        let b = battery();
        let prompt =
            render_decision_prompt(&b[0], 1, Round::Baseline, &MarkerAssignment::new(), false)
                .unwrap();
        assert!(prompt.find("For option U:").unwrap() < prompt.find("For option K:").unwrap());
    }

    #[test]
    fn losses_render_with_lose_and_positive_magnitude() {
        let b = battery();
        let s3 = b.iter().find(|l| l.id.series == Series::S3).unwrap();
        let prompt =
            render_decision_prompt(s3, 3, Round::Baseline, &MarkerAssignment::new(), true).unwrap();
        assert!(prompt.contains("50% probability to lose $4"));
        assert!(prompt.contains("50% probability to win $25"));
        assert!(!prompt.contains("-"));
    }

    #[test]
    fn golden_baseline_prompts_cover_all_table_values() {
        // every numeric value of the three design tables appears verbatim
        let assignment = MarkerAssignment::new();
        for (i, l) in battery().iter().enumerate() {
            let prompt =
                render_decision_prompt(l, i + 1, Round::Baseline, &assignment, true).unwrap();
            for opt in [&l.option_k, &l.option_u] {
                for (outcome, prob) in [(opt.x(), opt.p()), (opt.y(), opt.q())] {
                    let line = branch_line(outcome, prob, None);
                    assert!(prompt.contains(&line), "{}: missing {line}", l.id);
                }
            }
        }
    }

    #[test]
    fn marked_options_substitute_markers_for_percentages() {
        let b = battery();
        let mut assignment = MarkerAssignment::new();
        for slot in Round::R4.marked_slots() {
            assignment.insert(slot, pair("unlikely", "likely", 0.3));
        }
        let prompt = render_decision_prompt(&b[0], 1, Round::R4, &assignment, true).unwrap();
        // S1 K = (40, 0.3; 10, 0.7): low branch x gets the low marker
        assert!(prompt.contains("unlikely to win $40"));
        assert!(prompt.contains("likely to win $10"));
        assert!(!prompt.contains("% probability"));
    }

    #[test]
    fn missing_pair_is_a_configuration_error() {
        let b = battery();
        let err = render_decision_prompt(&b[0], 1, Round::R1, &MarkerAssignment::new(), true);
        assert!(matches!(err, Err(PromptError::MissingMarkerPair(_))));
    }

    #[test]
    fn mapping_prompt_matches_template() {
        let p = render_mapping_prompt(2, 15, "almost certain");
        assert!(p.contains("15% probability to win $100."));
        assert!(p.contains("almost certain to win $100."));
        assert!(p.contains(OUTRO));
    }

    #[test]
    fn session_order_is_a_deterministic_permutation() {
        let a = session_order(7);
        let b = session_order(7);
        assert_eq!(a, b);
        assert_eq!(a.len(), 35);
        let unique: BTreeSet<_> = a.iter().collect();
        assert_eq!(unique.len(), 35);
    }

    #[test]
    fn session_orders_distinct_across_seeds() {
        let orders: BTreeSet<_> = (0..100u64).map(session_order).collect();
        assert_eq!(orders.len(), 100);
    }
}
