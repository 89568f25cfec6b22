//! Singularity baskets and their elementary invariants.
//!
//! A canonical 3-fold with isolated singularities carries a *basket*: a
//! finite multiset of orbifold points `(r, b)`, each standing for a cyclic
//! quotient singularity of type `1/r (1, -1, b)` with `gcd(r, b) = 1` and
//! `0 < b <= r/2`. Two projections of the basket drive everything else in
//! this crate:
//!
//! * the multiset `R` of local orders `r` (weights `b` forgotten), whose
//!   least common multiple is the Gorenstein index `r_X`, and whose *defect
//!   sum* `sum(r - 1/r)` enters the degree-2 Chern-number identity
//!   `c2*c1 + sum(r - 1/r) = 24 * chi(O)`;
//! * the weighted *half-point sum* `sum(b*(r-b) / (2r))`, the orbifold
//!   correction in the degree-3 identity
//!   `c1^3/2 + 3*chi(O) - sum(b*(r-b)/(2r)) = chi(-K)`.
//!
//! All sums are exact [`Rational`]s. Multisets are kept sorted so that any
//! two structurally equal baskets compare and print identically.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::Error;
use crate::rational::Rational;

/// Smallest nonnegative residue of `x` modulo `modulus`.
///
/// Works for negative `x` (the result is always in `[0, modulus)`).
pub fn residue(x: i64, modulus: i64) -> Result<u64, Error> {
    if modulus <= 0 {
        return Err(Error::InvalidModulus(modulus));
    }
    Ok(x.rem_euclid(modulus) as u64)
}

/// Internal fast path for nonnegative operands.
pub(crate) fn residue_u64(x: u64, modulus: u64) -> u64 {
    debug_assert!(modulus >= 1);
    x % modulus
}

/// One orbifold point `(r, b)` of type `1/r (1, -1, b)`.
///
/// Constructor-enforced constraints: `r >= 2`, `b >= 1`, `gcd(r, b) = 1`,
/// `2b <= r`. The last one is a normalization, not a restriction: the types
/// `1/r (1, -1, b)` and `1/r (1, -1, r-b)` are isomorphic, so every point has
/// a representative with `b <= r/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbifoldPoint {
    r: u64,
    b: u64,
}

impl OrbifoldPoint {
    /// Validates and builds a point; the error names the violated constraint.
    pub fn new(r: u64, b: u64) -> Result<Self, Error> {
        if r < 2 {
            return Err(Error::InvalidOrbifoldPoint { r, b, constraint: "r >= 2" });
        }
        if b < 1 {
            return Err(Error::InvalidOrbifoldPoint { r, b, constraint: "b >= 1" });
        }
        if r.gcd(&b) != 1 {
            return Err(Error::InvalidOrbifoldPoint { r, b, constraint: "gcd(r, b) = 1" });
        }
        if 2 * b > r {
            return Err(Error::InvalidOrbifoldPoint { r, b, constraint: "2b <= r" });
        }
        Ok(OrbifoldPoint { r, b })
    }

    /// Local order `r` (the local Gorenstein index of the point).
    pub fn order(&self) -> u64 {
        self.r
    }

    /// Normalized weight `b`.
    pub fn weight(&self) -> u64 {
        self.b
    }
}

impl fmt::Display for OrbifoldPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.b)
    }
}

/// A multiset of local orders `r >= 2`, kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RMultiset(Vec<u64>);

impl RMultiset {
    /// Validates entries (`r >= 2`), sorts, and builds the multiset.
    pub fn new(mut entries: Vec<u64>) -> Result<Self, Error> {
        if let Some(&bad) = entries.iter().find(|&&r| r < 2) {
            return Err(Error::InvalidOrder(bad));
        }
        entries.sort_unstable();
        Ok(RMultiset(entries))
    }

    /// The empty multiset (smooth / Gorenstein case).
    pub fn empty() -> Self {
        RMultiset(Vec::new())
    }

    /// Sorted entries.
    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiplicity-aware sub-multiset test: every entry of `other` must
    /// occur in `self` at least as often as it occurs in `other`.
    pub fn contains_submultiset(&self, other: &RMultiset) -> bool {
        // Both sides are sorted, so a single merge pass suffices.
        let mut it = self.0.iter();
        'outer: for needed in &other.0 {
            for have in it.by_ref() {
                if have == needed {
                    continue 'outer;
                }
                if have > needed {
                    return false;
                }
            }
            return false;
        }
        true
    }
}

impl fmt::Display for RMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, r) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

/// Parses `[r,r,...]`; entries may appear in any order and are canonicalized.
impl FromStr for RMultiset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let inner = strip_brackets(s)?;
        if inner.is_empty() {
            return Ok(RMultiset::empty());
        }
        let entries = inner
            .split(',')
            .map(parse_u64)
            .collect::<Result<Vec<_>, _>>()?;
        RMultiset::new(entries)
    }
}

/// A basket: a multiset of orbifold points, kept sorted by `(r, b)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Basket(Vec<OrbifoldPoint>);

impl Basket {
    /// Sorts and builds; points are already validated by construction.
    pub fn new(mut points: Vec<OrbifoldPoint>) -> Self {
        points.sort_unstable();
        Basket(points)
    }

    /// Convenience constructor from raw `(r, b)` pairs.
    pub fn from_pairs(pairs: &[(u64, u64)]) -> Result<Self, Error> {
        let points = pairs
            .iter()
            .map(|&(r, b)| OrbifoldPoint::new(r, b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Basket::new(points))
    }

    /// The empty basket.
    pub fn empty() -> Self {
        Basket(Vec::new())
    }

    /// Sorted points.
    pub fn points(&self) -> &[OrbifoldPoint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Forgets the weights, keeping the multiset of local orders.
    pub fn r_multiset(&self) -> RMultiset {
        // Orders of a valid basket are >= 2 and arrive sorted, so the
        // validating constructor cannot fail.
        RMultiset::new(self.0.iter().map(|p| p.order()).collect())
            .expect("orders of a valid basket are >= 2")
    }
}

impl fmt::Display for Basket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// Parses `[(r,b),(r,b),...]`; pairs may appear in any order and are
/// canonicalized. Invariant violations surface the failing constraint.
impl FromStr for Basket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let inner = strip_brackets(s)?;
        if inner.is_empty() {
            return Ok(Basket::empty());
        }
        let body = inner
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected '(r,b)' pairs in '{s}'")))?;
        let mut points = Vec::new();
        for pair in body.split("),(") {
            let (r, b) = pair
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected 'r,b' in '({pair})'")))?;
            points.push(OrbifoldPoint::new(parse_u64(r)?, parse_u64(b)?)?);
        }
        Ok(Basket::new(points))
    }
}

fn strip_brackets(s: &str) -> Result<String, Error> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    compact
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .map(str::to_owned)
        .ok_or_else(|| Error::Parse(format!("expected '[...]', got '{s}'")))
}

fn parse_u64(s: &str) -> Result<u64, Error> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| Error::Parse(format!("invalid integer literal '{s}'")))
}

/// Least common multiple of the local orders; 1 for the empty multiset.
///
/// Computed in 128-bit arithmetic; the degree-2 budget keeps realistic lcm's
/// far below `u64::MAX`, and the function panics rather than wrap if an
/// artificial input ever exceeds it.
pub fn gorenstein_index(orders: &RMultiset) -> u64 {
    let mut acc: u128 = 1;
    for &r in orders.entries() {
        acc = acc.lcm(&u128::from(r));
        assert!(acc <= u128::from(u64::MAX), "Gorenstein index overflows u64");
    }
    acc as u64
}

/// Defect sum `sum(r - 1/r)` over the local orders.
///
/// Each entry contributes at least `3/2`, so the sum strictly grows with
/// every added point; the empty multiset contributes 0.
pub fn defect_sum(orders: &RMultiset) -> Rational {
    let mut sum = Rational::zero();
    for &r in orders.entries() {
        let r = r as i64;
        sum = sum + Rational::new(r * r - 1, r);
    }
    sum
}

/// Half-point sum `sum(b*(r-b) / (2r))` over the basket.
///
/// A single point contributes a value in `(0, r/8]`, with the maximum `r/8`
/// attained exactly by `(2,1)` (contribution `1/4`).
pub fn half_point_sum(basket: &Basket) -> Rational {
    let mut sum = Rational::zero();
    for p in basket.points() {
        let (r, b) = (p.order() as i64, p.weight() as i64);
        sum = sum + Rational::new(b * (r - b), 2 * r);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn residue_handles_signs_and_rejects_bad_modulus() {
        assert_eq!(residue(7, 5).unwrap(), 2);
        assert_eq!(residue(-3, 5).unwrap(), 2);
        assert_eq!(residue(0, 1).unwrap(), 0);
        assert_eq!(residue(10, 5).unwrap(), 0);
        assert_eq!(residue(5, 0), Err(Error::InvalidModulus(0)));
        assert_eq!(residue(5, -2), Err(Error::InvalidModulus(-2)));
    }

    #[test]
    fn orbifold_point_constraints_are_named() {
        assert!(OrbifoldPoint::new(5, 2).is_ok());
        assert!(OrbifoldPoint::new(2, 1).is_ok());
        let err = |r, b| OrbifoldPoint::new(r, b).unwrap_err().to_string();
        assert!(err(1, 1).contains("r >= 2"));
        assert!(err(3, 0).contains("b >= 1"));
        assert!(err(4, 2).contains("gcd(r, b) = 1"));
        assert!(err(5, 3).contains("2b <= r"));
    }

    #[test]
    fn gorenstein_index_is_lcm() {
        let orders = RMultiset::new(vec![2, 3, 5, 11]).unwrap();
        assert_eq!(gorenstein_index(&orders), 330);
        let orders = RMultiset::new(vec![4, 5, 5, 7]).unwrap();
        assert_eq!(gorenstein_index(&orders), 140);
        assert_eq!(gorenstein_index(&RMultiset::empty()), 1);
    }

    #[test]
    fn defect_sum_reference_values() {
        let orders = RMultiset::new(vec![2, 3, 5, 11]).unwrap();
        assert_eq!(defect_sum(&orders), Rational::new(6559, 330));
        assert_eq!(defect_sum(&RMultiset::empty()), Rational::zero());
        let two = RMultiset::new(vec![2]).unwrap();
        assert_eq!(defect_sum(&two), Rational::new(3, 2));
        let orders = RMultiset::new(vec![4, 5, 5, 7]).unwrap();
        assert_eq!(defect_sum(&orders), Rational::new(2829, 140));
    }

    #[test]
    fn half_point_sum_reference_values() {
        let basket = Basket::from_pairs(&[(2, 1), (3, 1), (5, 2), (11, 1)]).unwrap();
        assert_eq!(half_point_sum(&basket), Rational::new(1081, 660));
        let basket = Basket::from_pairs(&[(4, 1), (5, 1), (5, 2), (7, 3)]).unwrap();
        assert_eq!(half_point_sum(&basket), Rational::new(625, 280));
        assert_eq!(half_point_sum(&Basket::empty()), Rational::zero());
    }

    #[test]
    fn single_point_half_sum_is_bounded_by_r_over_8() {
        // Exhaustive over all valid points with r <= 60: the contribution
        // lies in (0, r/8], and equals 1/4 exactly for (2,1).
        for r in 2..=60u64 {
            for b in 1..=r / 2 {
                if r.gcd(&b) != 1 {
                    continue;
                }
                let p = OrbifoldPoint::new(r, b).unwrap();
                let v = half_point_sum(&Basket::new(vec![p]));
                assert!(v.is_positive());
                assert!(v <= Rational::new(r as i64, 8));
                assert_eq!(v == Rational::new(1, 4), (r, b) == (2, 1));
            }
        }
    }

    #[test]
    fn multiset_and_basket_text_round_trips() {
        let orders = RMultiset::new(vec![11, 2, 5, 3]).unwrap();
        assert_eq!(orders.to_string(), "[2,3,5,11]");
        assert_eq!("[2,3,5,11]".parse::<RMultiset>().unwrap(), orders);
        assert_eq!("[ 11, 2,5 ,3]".parse::<RMultiset>().unwrap(), orders);
        assert_eq!("[]".parse::<RMultiset>().unwrap(), RMultiset::empty());

        let basket = Basket::from_pairs(&[(11, 1), (2, 1), (5, 2), (3, 1)]).unwrap();
        assert_eq!(basket.to_string(), "[(2,1),(3,1),(5,2),(11,1)]");
        assert_eq!(
            "[(2,1),(3,1),(5,2),(11,1)]".parse::<Basket>().unwrap(),
            basket
        );
        assert_eq!(
            "[ (5,2), (2,1), (11,1), (3,1) ]".parse::<Basket>().unwrap(),
            basket
        );
        assert_eq!("[]".parse::<Basket>().unwrap(), Basket::empty());
    }

    #[test]
    fn parsers_reject_invariant_violations_by_name() {
        let e = "[(4,2)]".parse::<Basket>().unwrap_err().to_string();
        assert!(e.contains("gcd(r, b) = 1"), "{e}");
        let e = "[(5,3)]".parse::<Basket>().unwrap_err().to_string();
        assert!(e.contains("2b <= r"), "{e}");
        let e = "[1,2]".parse::<RMultiset>().unwrap_err().to_string();
        assert!(e.contains("r >= 2"), "{e}");
        assert!("[2,3".parse::<RMultiset>().is_err());
        assert!("2,3]".parse::<RMultiset>().is_err());
        assert!("[(2,1),(3)]".parse::<Basket>().is_err());
        assert!("[2,1]".parse::<Basket>().is_err());
    }

    #[test]
    fn submultiset_test_respects_multiplicity() {
        let m = |v: &[u64]| RMultiset::new(v.to_vec()).unwrap();
        assert!(m(&[2, 2, 3, 5]).contains_submultiset(&m(&[2, 2])));
        assert!(!m(&[2, 3, 5]).contains_submultiset(&m(&[2, 2])));
        assert!(m(&[4, 5, 5, 7]).contains_submultiset(&m(&[5, 5])));
        assert!(m(&[2, 3, 6]).contains_submultiset(&m(&[2, 3, 6])));
        assert!(!m(&[2, 3]).contains_submultiset(&m(&[2, 3, 6])));
        assert!(m(&[2]).contains_submultiset(&RMultiset::empty()));
    }

    // ----- independent brute-force cross-check ------------------------------
    //
    // The oracle below re-computes every invariant with plain (num, den)
    // integer pairs and naive loops, sharing no code with the main
    // implementation. Agreement is checked on every order multiset with
    // entries <= 7 inside the degree-2 budget, and on every basket over
    // those multisets.

    #[derive(Clone, Copy)]
    struct Frac(i128, i128);

    impl Frac {
        fn add(self, other: Frac) -> Frac {
            Frac(self.0 * other.1 + other.0 * self.1, self.1 * other.1)
        }

        fn equals_rational(self, r: &Rational) -> bool {
            // Cross-multiply; the oracle fraction is unreduced on purpose.
            r.numer() * BigInt::from(self.1) == BigInt::from(self.0) * r.denom()
        }
    }

    fn oracle_defect(entries: &[u64]) -> Frac {
        let mut acc = Frac(0, 1);
        for &r in entries {
            let r = r as i128;
            acc = acc.add(Frac(r * r - 1, r));
        }
        acc
    }

    fn oracle_lcm(entries: &[u64]) -> u64 {
        let mut acc: u64 = 1;
        for &r in entries {
            let mut m = acc;
            while !m.is_multiple_of(r) {
                m += acc;
            }
            acc = m;
        }
        acc
    }

    fn oracle_half_sum(pairs: &[(u64, u64)]) -> Frac {
        let mut acc = Frac(0, 1);
        for &(r, b) in pairs {
            let (r, b) = (r as i128, b as i128);
            acc = acc.add(Frac(b * (r - b), 2 * r));
        }
        acc
    }

    /// All nondecreasing order tuples with entries in [2, 7] and defect
    /// sum < 24.
    fn small_order_multisets() -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut stack = vec![Vec::<u64>::new()];
        while let Some(cur) = stack.pop() {
            out.push(cur.clone());
            let lo = cur.last().copied().unwrap_or(2);
            for r in lo..=7 {
                let mut next = cur.clone();
                next.push(r);
                let d = oracle_defect(&next);
                // d < 24 with positive denominators.
                if d.0 < 24 * d.1 {
                    stack.push(next);
                }
            }
        }
        out
    }

    #[test]
    fn agrees_with_bruteforce_on_small_instances() {
        let multisets = small_order_multisets();
        assert!(multisets.len() > 100, "oracle enumeration looks too small");
        for entries in &multisets {
            let orders = RMultiset::new(entries.clone()).unwrap();
            assert!(oracle_defect(entries).equals_rational(&defect_sum(&orders)));
            assert_eq!(oracle_lcm(entries), gorenstein_index(&orders));

            // Every weight assignment over this order multiset, walked with
            // a plain odometer.
            let choices: Vec<Vec<u64>> = entries
                .iter()
                .map(|&r| (1..=r / 2).filter(|b| r.gcd(b) == 1).collect())
                .collect();
            let mut idx = vec![0usize; entries.len()];
            'assignments: loop {
                let pairs: Vec<(u64, u64)> = entries
                    .iter()
                    .enumerate()
                    .map(|(j, &r)| (r, choices[j][idx[j]]))
                    .collect();
                let basket = Basket::from_pairs(&pairs).unwrap();
                assert!(oracle_half_sum(&pairs).equals_rational(&half_point_sum(&basket)));

                // Advance the odometer.
                for j in (0..idx.len()).rev() {
                    idx[j] += 1;
                    if idx[j] < choices[j].len() {
                        continue 'assignments;
                    }
                    idx[j] = 0;
                }
                break;
            }
        }
    }

    #[test]
    fn residue_matches_euclidean_definition() {
        for x in -50i64..=50 {
            for r in 1i64..=12 {
                let got = residue(x, r).unwrap() as i64;
                assert!((0..r).contains(&got));
                assert_eq!((x - got) % r, 0);
            }
        }
    }
}
