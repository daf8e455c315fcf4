//! A tabled resolution engine for constraint logic programs whose
//! unresolved constraints flow through memoized subproofs.
//!
//! The engine proves goals against a clause program under a [`policy::Policy`]
//! that controls three things:
//!
//! * **memoization** — which literals are solved through lemma tables rather
//!   than by direct clause resolution ([`policy::Policy::memo`]);
//! * **delays** — which literals are constraints that must not be selected
//!   while designated argument positions are still unbound
//!   ([`policy::DelayGuard`]); delayed literals accumulate in clause bodies
//!   and travel in and out of memoized subproofs as residual constraints;
//! * **abstraction** — how memoized goals are generalized before table lookup
//!   so that related calls share one table
//!   ([`policy::AbstractionTemplate`]).
//!
//! Proofs are driven by an agenda of items ([`engine::run`]). Each item is a
//! clause with provenance; a lemma table stores the solution items proved for
//! its goal and the suspended parent items waiting for them. A *solution* is
//! a clause whose body consists entirely of delayed literals — the residual
//! constraints under which its head holds. The answers to a query are the
//! solutions of its root table ([`engine::ProofResult::answers`]).
//!
//! The crate is `no_std` (with `alloc`). Everything IO-flavored lives in the
//! companion command-line crate; this crate still bundles example program
//! *sources* ([`grammars::ASSETS`]), including a Dutch verb-cluster
//! categorial grammar whose lexical categories are constructed by delayed
//! constraints.
//!
//! Two independent reference provers ([`oracle`]) exist solely to
//! cross-check the engine: a bounded depth-first resolution prover and a
//! bottom-up fixpoint evaluator for function-free programs.

#![no_std]
#![deny(missing_docs)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod engine;
pub mod grammars;
pub mod oracle;
pub mod parser;
pub mod policy;
pub mod printer;
pub mod program;
pub mod term;
