//! Static experiment designs: the three lottery series, the 14-marker
//! table, and the round substitution schemes.
//!
//! Table values are embedded as constants: they are the fixed instrument and
//! must be bit-exact.

use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

use crate::pt::Prospect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Series {
    S1,
    S2,
    S3,
}

impl Series {
    pub const ALL: [Series; 3] = [Series::S1, Series::S2, Series::S3];

    pub fn as_str(&self) -> &'static str {
        match self {
            Series::S1 => "S1",
            Series::S2 => "S2",
            Series::S3 => "S3",
        }
    }

    pub fn from_str_opt(s: &str) -> Option<Series> {
        match s {
            "S1" => Some(Series::S1),
            "S2" => Some(Series::S2),
            "S3" => Some(Series::S3),
            _ => None,
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Identifies a lottery by series and 1-based index within the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LotteryId {
    pub series: Series,
    pub index: u32,
}

impl fmt::Display for LotteryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.series, self.index)
    }
}

/// One battery item: the safer option K and the riskier option U.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lottery {
    pub id: LotteryId,
    pub option_k: Prospect,
    pub option_u: Prospect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OptionLabel {
    K,
    U,
}

impl OptionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            OptionLabel::K => "K",
            OptionLabel::U => "U",
        }
    }
}

impl fmt::Display for OptionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Series 1: K = (40, 0.3; 10, 0.7) fixed, U = (z, 0.1; 5, 0.9).
const S1_U_HIGH: [f64; 14] = [
    68.0, 75.0, 83.0, 93.0, 106.0, 125.0, 150.0, 185.0, 220.0, 300.0, 400.0, 600.0, 1000.0, 1700.0,
];

/// Series 2: K = (40, 0.9; 30, 0.1) fixed, U = (z, 0.7; 5, 0.3).
const S2_U_HIGH: [f64; 14] = [
    54.0, 56.0, 58.0, 60.0, 62.0, 65.0, 68.0, 72.0, 77.0, 83.0, 90.0, 100.0, 110.0, 130.0,
];

/// Series 3, all probabilities 0.5: (K win, K lose, U win, U lose).
const S3_OUTCOMES: [(f64, f64, f64, f64); 7] = [
    (25.0, 4.0, 30.0, 21.0),
    (4.0, 4.0, 30.0, 21.0),
    (1.0, 4.0, 30.0, 21.0),
    (1.0, 4.0, 30.0, 16.0),
    (1.0, 8.0, 30.0, 16.0),
    (1.0, 8.0, 30.0, 14.0),
    (1.0, 8.0, 30.0, 11.0),
];

/// The full 35-lottery battery in series order, canonically ordered
/// prospects throughout.
pub fn battery() -> Vec<Lottery> {
    let mut out = Vec::with_capacity(35);
    for (i, z) in S1_U_HIGH.iter().enumerate() {
        out.push(Lottery {
            id: LotteryId {
                series: Series::S1,
                index: i as u32 + 1,
            },
            option_k: Prospect::new(40.0, 0.3, 10.0, 0.7).unwrap(),
            option_u: Prospect::new(*z, 0.1, 5.0, 0.9).unwrap(),
        });
    }
    for (i, z) in S2_U_HIGH.iter().enumerate() {
        out.push(Lottery {
            id: LotteryId {
                series: Series::S2,
                index: i as u32 + 1,
            },
            option_k: Prospect::new(40.0, 0.9, 30.0, 0.1).unwrap(),
            option_u: Prospect::new(*z, 0.7, 5.0, 0.3).unwrap(),
        });
    }
    for (i, (kw, kl, uw, ul)) in S3_OUTCOMES.iter().enumerate() {
        out.push(Lottery {
            id: LotteryId {
                series: Series::S3,
                index: i as u32 + 1,
            },
            option_k: Prospect::new(*kw, 0.5, -*kl, 0.5).unwrap(),
            option_u: Prospect::new(*uw, 0.5, -*ul, 0.5).unwrap(),
        });
    }
    out
}

/// Look up one battery lottery.
pub fn lottery(id: LotteryId) -> Option<Lottery> {
    battery().into_iter().find(|l| l.id == id)
}

/// An epistemic marker phrase with its human-survey probability (reference
/// only; agents produce their own mapping).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkerSpec {
    pub text: &'static str,
    pub human_probability: f64,
}

/// The 14 markers used in the sweep, with human probability mappings.
pub const MARKERS: [MarkerSpec; 14] = [
    MarkerSpec {
        text: "almost certain",
        human_probability: 0.95,
    },
    MarkerSpec {
        text: "highly likely",
        human_probability: 0.90,
    },
    MarkerSpec {
        text: "very likely",
        human_probability: 0.90,
    },
    MarkerSpec {
        text: "likely",
        human_probability: 0.80,
    },
    MarkerSpec {
        text: "probable",
        human_probability: 0.70,
    },
    MarkerSpec {
        text: "somewhat likely",
        human_probability: 0.70,
    },
    MarkerSpec {
        text: "possible",
        human_probability: 0.60,
    },
    MarkerSpec {
        text: "uncertain",
        human_probability: 0.50,
    },
    MarkerSpec {
        text: "somewhat unlikely",
        human_probability: 0.30,
    },
    MarkerSpec {
        text: "unlikely",
        human_probability: 0.25,
    },
    MarkerSpec {
        text: "not likely",
        human_probability: 0.20,
    },
    MarkerSpec {
        text: "doubtful",
        human_probability: 0.20,
    },
    MarkerSpec {
        text: "very unlikely",
        human_probability: 0.10,
    },
    MarkerSpec {
        text: "highly unlikely",
        human_probability: 0.10,
    },
];

/// A (series, option) slot that can receive marker substitution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub series: Series,
    pub option: OptionLabel,
}

impl Slot {
    pub const fn new(series: Series, option: OptionLabel) -> Self {
        Self { series, option }
    }

    /// The original (x-branch, y-branch) probabilities of every lottery in
    /// this slot; constant within a (series, option) pair by design.
    pub fn target_probabilities(&self) -> (f64, f64) {
        match (self.series, self.option) {
            (Series::S1, OptionLabel::K) => (0.3, 0.7),
            (Series::S1, OptionLabel::U) => (0.1, 0.9),
            (Series::S2, OptionLabel::K) => (0.9, 0.1),
            (Series::S2, OptionLabel::U) => (0.7, 0.3),
            (Series::S3, _) => (0.5, 0.5),
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.series, self.option)
    }
}

/// Which slots receive marker substitution in each experimental round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Round {
    Baseline,
    R1,
    R2,
    R3,
    R4,
}

impl Round {
    pub const ALL: [Round; 5] = [Round::Baseline, Round::R1, Round::R2, Round::R3, Round::R4];

    pub fn marked_slots(&self) -> Vec<Slot> {
        use OptionLabel::{K, U};
        use Series::{S1, S2, S3};
        match self {
            Round::Baseline => Vec::new(),
            Round::R1 => [Slot::new(S1, K), Slot::new(S2, K)].into(),
            Round::R2 => [Slot::new(S1, K), Slot::new(S2, K), Slot::new(S3, K)].into(),
            Round::R3 => [Slot::new(S1, U), Slot::new(S2, U), Slot::new(S3, U)].into(),
            Round::R4 => Series::ALL
                .iter()
                .flat_map(|s| [Slot::new(*s, K), Slot::new(*s, U)])
                .collect(),
        }
    }

    pub fn marks(&self, series: Series, option: OptionLabel) -> bool {
        self.marked_slots().contains(&Slot::new(series, option))
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Round::Baseline => "baseline",
            Round::R1 => "round1",
            Round::R2 => "round2",
            Round::R3 => "round3",
            Round::R4 => "round4",
        }
    }

    pub fn from_str_opt(s: &str) -> Option<Round> {
        match s {
            "baseline" => Some(Round::Baseline),
            "round1" | "r1" | "1" => Some(Round::R1),
            "round2" | "r2" | "2" => Some(Round::R2),
            "round3" | "r3" | "3" => Some(Round::R3),
            "round4" | "r4" | "4" => Some(Round::R4),
            _ => None,
        }
    }
}

impl fmt::Display for Round {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
