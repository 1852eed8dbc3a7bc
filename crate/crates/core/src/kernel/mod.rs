//! The proof checker: logical axioms, inference rules, theories and
//! proof-script replay.

pub mod axioms;
pub mod proof;
pub mod rules;
pub mod taut;
pub mod theory;

pub use axioms::{check_axiom, generate, instantiate, instantiate_schema};
pub use proof::{check_proof, expand_script, is_primitive, replay, replay_rule, Replay, TraceLine};
pub use rules::{rule_alpha, rule_beta, rule_gamma, rule_gamma_prime, rule_mp, rule_subst};
pub use taut::{is_tautology, valid, BinOp, Prop, Skeleton};
pub use theory::{Options, Report, Status, TheoremRecord, Theory, Verdict};
