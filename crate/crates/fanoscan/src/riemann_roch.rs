//! Orbifold Riemann-Roch evaluations over a basket.
//!
//! For a cyclic quotient point `(r, b)` and a Weil divisor class with local
//! index `i` (meaning the class is locally `i * K` near the point, `0 <= i`),
//! the point's correction to `chi` is
//!
//! ```text
//! c(r, b, i) = -i (r^2 - 1) / (12 r)
//!              + sum_{j=0}^{i-1} bar(j b) (r - bar(j b)) / (2 r),
//! ```
//!
//! where `bar(.)` is the smallest nonnegative residue mod `r` and the empty
//! sum (`i = 0`) is 0. The term is periodic in `i` with period `r`, and the
//! step between consecutive indices is
//!
//! ```text
//! c(r, b, i) - c(r, b, i+1) = (r^2 - 1) / (12 r)
//!                             - bar(i b) (r - bar(i b)) / (2 r).
//! ```
//!
//! On a 3-fold of Fano index `q` with `-K = qA`, the sections of `sA`
//! (`0 < s < q`) count as
//!
//! ```text
//! h^0(sA) = s^2 c1^3 / (2 q^2) + 2
//!           - sum_points bar(s x) (r - bar(s x)) / (2 r),
//! ```
//!
//! where `x` is the residue of `b * i_1` at the point and `i_1` is the local
//! index of `A` itself. Multiplying local indices linearly by `s` is exactly
//! the content of the Gorenstein-along-crepant-centers hypothesis, which the
//! machine cannot check; callers assert it explicitly on every evaluation.
//!
//! `h^0` evaluations are returned as raw rationals. For an actual variety
//! they are nonnegative integers, so a fractional or negative value is how
//! a hypothetical numerical candidate is refuted; the filtering layers
//! ([`feasible_assignments`], [`H0Table`]) interpret that, not this module.

use std::collections::BTreeMap;
use std::fmt;

use crate::basket::{residue_u64, Basket, OrbifoldPoint};
use crate::error::Error;
use crate::rational::Rational;

/// One residue `x` in `[0, r)` per basket point, listed in basket order.
///
/// `x` stands for the smallest residue of `i_1 * b` modulo `r`, where `i_1`
/// is the local index of the ample generator `A` at that point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalIndexAssignment(Vec<u64>);

impl LocalIndexAssignment {
    /// Validates residues against the basket: one residue per point, each in
    /// `[0, r)`.
    pub fn new(residues: Vec<u64>, basket: &Basket) -> Result<Self, Error> {
        if residues.len() != basket.len() {
            return Err(Error::InvalidAssignment(format!(
                "{} residues for a basket of {} points",
                residues.len(),
                basket.len()
            )));
        }
        for (x, p) in residues.iter().zip(basket.points()) {
            if *x >= p.order() {
                return Err(Error::InvalidAssignment(format!(
                    "residue {} out of range [0, {}) at point {}",
                    x,
                    p.order(),
                    p
                )));
            }
        }
        Ok(LocalIndexAssignment(residues))
    }

    /// Residues in basket order.
    pub fn residues(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for LocalIndexAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Correction term `c(r, b, i)` of one orbifold point (formula above),
/// evaluated by direct summation.
pub fn orbifold_contribution(point: &OrbifoldPoint, i: i64) -> Result<Rational, Error> {
    if i < 0 {
        return Err(Error::InvalidLocalIndex(i));
    }
    let (r, b) = (point.order(), point.weight());
    let linear = Rational::new(i * (r as i64 * r as i64 - 1), 12 * r as i64);
    let mut sum = Rational::zero();
    for j in 0..i as u64 {
        sum = sum + half_term(r, residue_u64(j * b, r));
    }
    Ok(sum - linear)
}

/// Step `c(r, b, i) - c(r, b, i+1)` between consecutive local indices.
pub fn contribution_difference(point: &OrbifoldPoint, i: i64) -> Result<Rational, Error> {
    if i < 0 {
        return Err(Error::InvalidLocalIndex(i));
    }
    let (r, b) = (point.order(), point.weight());
    let bar = residue_u64(i as u64 * b, r);
    Ok(Rational::new(r as i64 * r as i64 - 1, 12 * r as i64) - half_term(r, bar))
}

/// `bar * (r - bar) / (2 r)` for a residue `bar` in `[0, r)`.
fn half_term(r: u64, bar: u64) -> Rational {
    Rational::new((bar * (r - bar)) as i64, 2 * r as i64)
}

/// Riemann-Roch count of sections of `sA` on an index-`q` candidate with
/// anticanonical degree `c1_cubed` and local residues `assignment`.
///
/// Returns the raw rational value; see the module docs for why it is not
/// rounded or checked here. Errors: `s` outside `(0, q)`, non-positive
/// `c1_cubed` or zero `q`, an assignment that does not fit the basket, or
/// `gorenstein_along_crepant_centers == false` (the linear scaling of local
/// indices by `s` is unjustified without that hypothesis, so the evaluation
/// is refused rather than silently wrong).
pub fn h0_sa(
    q: u64,
    c1_cubed: &Rational,
    basket: &Basket,
    assignment: &LocalIndexAssignment,
    s: u64,
    gorenstein_along_crepant_centers: bool,
) -> Result<Rational, Error> {
    if !gorenstein_along_crepant_centers {
        return Err(Error::HypothesisNotAsserted);
    }
    if q == 0 {
        return Err(Error::InvalidConfig("index q must be positive".into()));
    }
    if !c1_cubed.is_positive() {
        return Err(Error::InvalidConfig(format!(
            "c1^3 must be positive, got {c1_cubed}"
        )));
    }
    if s == 0 || s >= q {
        return Err(Error::MultipleOutOfRange { s, q });
    }
    if assignment.residues().len() != basket.len() {
        return Err(Error::InvalidAssignment(format!(
            "{} residues for a basket of {} points",
            assignment.residues().len(),
            basket.len()
        )));
    }

    let s2 = Rational::from(s) * Rational::from(s);
    let q2 = Rational::from(q) * Rational::from(q);
    let mut value = s2 * c1_cubed.clone() / (Rational::from_integer(2) * q2)
        + Rational::from_integer(2);
    for (p, &x) in basket.points().iter().zip(assignment.residues()) {
        let r = p.order();
        if x >= r {
            return Err(Error::InvalidAssignment(format!(
                "residue {x} out of range [0, {r}) at point {p}"
            )));
        }
        value = value - half_term(r, residue_u64(s * x, r));
    }
    Ok(value)
}

/// All local-index assignments under which `h^0(sA)` is a nonnegative
/// integer for *every* `s` in `s_range`, in lexicographic order.
///
/// The Gorenstein-along-crepant-centers hypothesis is asserted internally:
/// this filter exists precisely for workloads where the hypothesis is part
/// of the case assumptions.
pub fn feasible_assignments(
    q: u64,
    c1_cubed: &Rational,
    basket: &Basket,
    s_range: &[u64],
) -> Result<Vec<LocalIndexAssignment>, Error> {
    if s_range.is_empty() {
        return Err(Error::InvalidConfig("s range must be nonempty".into()));
    }
    let mut s_values: Vec<u64> = s_range.to_vec();
    s_values.sort_unstable();
    s_values.dedup();
    for &s in &s_values {
        if s == 0 || s >= q {
            return Err(Error::MultipleOutOfRange { s, q });
        }
    }

    let mut feasible = Vec::new();
    for_each_residue_tuple(basket, |residues| {
        let assignment = LocalIndexAssignment(residues.to_vec());
        let ok = s_values.iter().all(|&s| {
            h0_sa(q, c1_cubed, basket, &assignment, s, true)
                .map(|v| v.is_nonnegative_integer())
                .unwrap_or(false)
        });
        if ok {
            feasible.push(assignment);
        }
        true
    });
    Ok(feasible)
}

/// Searches for a residue tuple witnessing a torsion-divisor section count,
/// i.e. a solution of
///
/// ```text
/// 2 = sum_points bar(i b) (r - bar(i b)) / (2 r) + geometric_term / 2.
/// ```
///
/// The tuple is scanned in the residue convention of
/// [`LocalIndexAssignment`] (components `x = bar(i b)` in `[0, r)`); since
/// `gcd(b, r) = 1`, this covers exactly the sums reachable by local indices
/// `i`. Returns the lexicographically first witness, or `None` if no tuple
/// solves the equation — `None` is what rules the torsion divisor out.
pub fn torsion_obstruction(
    basket: &Basket,
    geometric_term: &Rational,
) -> Option<LocalIndexAssignment> {
    let target = Rational::from_integer(2)
        - Rational::new(1, 2) * geometric_term.clone();
    let mut witness = None;
    for_each_residue_tuple(basket, |residues| {
        let sum = basket
            .points()
            .iter()
            .zip(residues)
            .fold(Rational::zero(), |acc, (p, &x)| {
                acc + half_term(p.order(), x)
            });
        if sum == target {
            witness = Some(LocalIndexAssignment(residues.to_vec()));
            false // stop at the lexicographically first solution
        } else {
            true
        }
    });
    witness
}

/// Walks the product space `prod [0, r_j)` in lexicographic order, calling
/// `visit` on each tuple until it returns `false` or the space is exhausted.
fn for_each_residue_tuple<F: FnMut(&[u64]) -> bool>(basket: &Basket, mut visit: F) {
    let orders: Vec<u64> = basket.points().iter().map(|p| p.order()).collect();
    let mut tuple = vec![0u64; orders.len()];
    loop {
        if !visit(&tuple) {
            return;
        }
        // Advance the odometer, most significant component first in the
        // lexicographic sense (last component varies fastest).
        let mut j = orders.len();
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            tuple[j] += 1;
            if tuple[j] < orders[j] {
                break;
            }
            tuple[j] = 0;
        }
    }
}

/// A table of verified section counts `s -> h^0(sA)`.
///
/// Built only from evaluations that came out as nonnegative integers;
/// anything else aborts construction with [`Error::InfeasibleH0`], so a
/// stored table never contains a rounded or negative value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H0Table {
    entries: BTreeMap<u64, u64>,
}

impl H0Table {
    /// Evaluates `h^0(sA)` for every `s` in `s_values` and records the
    /// results, failing on the first non-integral or negative value.
    pub fn compute(
        q: u64,
        c1_cubed: &Rational,
        basket: &Basket,
        assignment: &LocalIndexAssignment,
        s_values: &[u64],
    ) -> Result<Self, Error> {
        let mut entries = BTreeMap::new();
        for &s in s_values {
            let value = h0_sa(q, c1_cubed, basket, assignment, s, true)?;
            match value.to_u64_exact() {
                Some(h) => {
                    entries.insert(s, h);
                }
                None => {
                    return Err(Error::InfeasibleH0 {
                        s,
                        value: value.to_string(),
                    })
                }
            }
        }
        Ok(H0Table { entries })
    }

    pub fn get(&self, s: u64) -> Option<u64> {
        self.entries.get(&s).copied()
    }

    pub fn entries(&self) -> &BTreeMap<u64, u64> {
        &self.entries
    }
}

impl fmt::Display for H0Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (s, h)) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "s={s}:{h}")?;
        }
        write!(f, "}}")
    }
}
