//! Modelling and verification toolkit for ReCiPe systems: agents with finite
//! local state that interact only through guarded message passing, with
//! reconfigurable broadcast and multicast semantics.
//!
//! The crate is organised around a pipeline:
//!
//! * [`frontend`] parses the `.rcp` modelling DSL into a [`model::SystemDef`]
//!   and LTOL properties,
//! * [`model`] holds the static system description and validates the
//!   well-formedness conditions the semantics relies on,
//! * [`expr`] evaluates assertions and enumerates satisfying assignments,
//! * [`semantics`] computes the induced transition system (two independent
//!   implementations) and explores the reachable state space,
//! * [`ltol`] is the temporal logic with observation descriptors, including a
//!   direct lasso evaluator,
//! * [`automata`] translates formulas to alternating Büchi automata and then
//!   to nondeterministic ones,
//! * [`checker`] runs model checking and bounded-vocabulary satisfiability,
//!   producing lasso counterexamples.

pub mod automata;
pub mod checker;
pub mod expr;
pub mod frontend;
pub mod gen;
pub mod ltol;
pub mod model;
pub mod semantics;
