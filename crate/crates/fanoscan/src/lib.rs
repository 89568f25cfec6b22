//! Exact-arithmetic search and verification suite for the index bound of
//! canonical weak Fano 3-folds.
//!
//! A canonical weak Fano 3-fold `X` carries a basket of virtual orbifold
//! points and an index `q` with `-K_X ~ qA` for an ample Weil divisor class
//! `A`. Two Chern-number identities pin the numerics down:
//!
//! ```text
//! c2 * c1    = 24 chi(O)  - sum (r - 1/r)           (> 0)
//! chi(-K)    = c1^3 / 2 + 3 chi(O) - sum b(r-b)/(2r)  (integer >= 0)
//! ```
//!
//! together with a slope inequality `c1^3 <= b * c2*c1` for a small set of
//! admissible coefficients `b`. This crate enumerates every basket shape
//! compatible with those constraints, assigns indices and weights, and
//! recovers the short table of large-index candidates — with exact rational
//! arithmetic throughout, so every comparison is an equality or a proved
//! strict inequality, never a float approximation.
//!
//! Modules:
//!
//! * [`rational`] — arbitrary-precision rationals in reduced form;
//! * [`basket`] — orbifold points, order multisets, baskets, and their
//!   elementary invariants (Gorenstein index, defect and half-point sums);
//! * [`riemann_roch`] — orbifold correction terms, section counts `h^0(sA)`,
//!   feasible local-index assignments, and the torsion-witness scan;
//! * [`search`] — the three-step candidate search, the slope-bound context,
//!   and the worst-case postfilter;
//! * [`verify`] — self-contained re-checks of the frozen claims, each
//!   reported as an exact expected/computed comparison;
//! * [`report`] — CSV/JSON/markdown emission and re-parsing of result
//!   tables.
//!
//! The `fanoscan` binary exposes the search (`fanoscan search ...`) and the
//! checks (`fanoscan verify ...`) on the command line.

pub mod basket;
pub mod error;
pub mod rational;
pub mod report;
pub mod riemann_roch;
pub mod search;
pub mod verify;

pub use error::Error;
pub use rational::Rational;
