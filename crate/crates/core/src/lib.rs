//! Finite, fully decidable models of the combinatorics behind the fan
//! theorem and its weakenings.
//!
//! Everything infinite in the classical picture is truncated at explicit
//! bounds: paths through the binary tree stop at a depth `d`, "standard"
//! objects live below a cutoff `s < d`, and quantifiers over conditions or
//! terms range over enumerated finite universes. Within those bounds every
//! notion here — bar-hood, uniformity, forcing, Kripke truth — is computed
//! exactly, and the lemma suites check the expected order-theoretic laws by
//! exhaustive enumeration.
//!
//! Module map:
//!
//! * [`bars`] — finite binary sequences and the bar taxonomy (decidable,
//!   c-style, pi01-style, weakly uniform bars).
//! * [`formula`] — the first-order language of membership and equality,
//!   with a small concrete syntax.
//! * [`conditions`] — labeled-tree forcing conditions, the shadow
//!   projection, weakening orders, canonical meets, dense sets, and
//!   pseudo-generic labeling samplers.
//! * [`heyting`] — finite Heyting algebras as downset lattices of finite
//!   posets; connectedness and the decidability collapse.
//! * [`terms`] — truth-value gated terms, node contexts, interpretation,
//!   and the negative-literal restriction maps.
//! * [`kripke`] — finite Kripke frames, intuitionistic evaluation,
//!   persistence checking, internal bar-property checkers, and the four
//!   model presets.
//! * [`starforce`] — the three bounded star-forcing evaluators and their
//!   exhaustive lemma suites.

pub mod bars;
pub mod conditions;
pub mod formula;
pub mod heyting;
pub mod kripke;
pub mod starforce;
pub mod terms;

pub use bars::{BinarySeq, FiniteBarSet};
pub use conditions::{Condition, FullLabeling, Label, Variant};
pub use formula::{Formula, Identifier, TermExpr};
pub use terms::{ExtVal, Term, TruthValue};
