//! Core machinery for eliciting prospect-theory risk parameters from
//! binary-choice agents and for mapping epistemic markers to implied
//! probabilities.
//!
//! The crate is `no_std` + `alloc`: everything here is pure computation
//! (closed-form PT math, static lottery designs, synthetic agents driven by
//! seeded RNG streams, maximum-likelihood fitting, and the switching-point
//! sweep). IO, HTTP transport, and file formats live in the companion `pte`
//! crate.
//!
//! Layout:
//! - [`pt`] — value function, probability weighting, binary-prospect utility,
//!   logistic choice probability.
//! - [`design`] — the 35-lottery battery, the 14-marker table, round
//!   substitution schemes.
//! - [`prompt`] — prompt rendering and session ordering.
//! - [`agent`] — the [`agent::ChoiceAgent`] trait, synthetic agents, session
//!   state, battery passes.
//! - [`estimate`] — negative log-likelihood, bounded simplex MLE, parametric
//!   bootstrap CIs, fit statistics.
//! - [`mapping`] — marker sweep, switching-point interpolation, pair
//!   selection and normalization, effective probabilities.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod agent;
pub mod design;
pub mod estimate;
pub mod mapping;
pub mod optim;
pub mod prompt;
pub mod pt;
pub mod seed;
