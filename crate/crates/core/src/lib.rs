//! Exact-arithmetic toolkit for two-player Stackelberg extensive-form games.
//!
//! The crate computes strong Stackelberg equilibria of trembling-hand
//! perturbed games by branch-and-bound over a perturbed correlated-equilibrium
//! linear program, all in arbitrary-precision rational arithmetic. Driving the
//! perturbation magnitude toward zero yields approximate quasi-perfect
//! Stackelberg equilibria.
//!
//! Everything here is `no_std + alloc`; file formats, the command-line driver
//! and all IO live in the companion `sefg-cli` crate.
//!
//! Module map:
//!
//! * [`numeric`] — arbitrary-precision rationals and sparse ε-polynomials.
//! * [`game`] — extensive-form game trees, validation, behavioral strategies.
//! * [`seqform`] — sequence-form compilation: constraint/payoff matrices,
//!   realization plans, relevance structure.
//! * [`lp`] — exact rational simplex with primal and dual certificates.
//! * [`perturb`] — ε-perturbation schemes, instantiation, probability caps.
//! * [`best_response`] — follower best-response programs and the structural
//!   checks certifying sequential rationality.
//! * [`sefce`] — the perturbed correlated-equilibrium LP, branch-and-bound
//!   search, equilibrium extraction, anytime ε-schedules.
//! * [`games`] — benchmark game generators.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod best_response;
pub mod game;
pub mod games;
pub mod lp;
pub mod numeric;
pub mod perturb;
pub mod sefce;
pub mod seqform;

#[cfg(feature = "oracle")]
pub mod oracle;

pub use game::{GameDescription, GameError, GameTree, NodeId, PlayerId};
pub use numeric::{EpsPoly, Rational};
pub use seqform::{RealizationPlan, RelevanceMap, SequenceForm, SequenceId};
