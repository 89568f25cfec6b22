//! Enumeration of numerical candidates for large-index canonical weak Fano
//! 3-folds.
//!
//! The pipeline has three pruning steps, all in exact arithmetic:
//!
//! 1. enumerate every order multiset `R` inside the degree-2 budget
//!    `sum(r - 1/r) < 24 * chi`, pairing it with
//!    `c2*c1 = 24 * chi - sum(r - 1/r) > 0`;
//! 2. for each `R`, admit index/degree pairs `(q, n)` with `q >= q_min` and
//!    `q^2 <= r_X * c1^3 = n * q^2 <= b * r_X * c2*c1`, where `b` is a slope
//!    coefficient from the Kawamata-Miyaoka-type inequality
//!    `c1^3 <= b * c2*c1` (one of the exact values 3, 16/5, 4);
//! 3. assign weights `b` to the orders of `R` and keep only baskets for
//!    which `c1^3/2 + 3*chi - sum(b(r-b)/(2r))` is a nonnegative integer
//!    (it computes `chi(-K)`).
//!
//! An optional postfilter re-tests survivors against the sharpest slope
//! coefficient available at their own index,
//! `c1^3 / (c2*c1) <= 4 q^2 / (q^2 + 2q - 4)`, the worst case of the
//! three-step filtration bound.
//!
//! Everything is deterministic: multisets stream in lexicographic order,
//! records sort on `(R, q, n, basket)`, and parallel runs produce the same
//! bytes as sequential ones.

use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;

use crate::basket::{defect_sum, gorenstein_index, half_point_sum, Basket, OrbifoldPoint, RMultiset};
use crate::error::Error;
use crate::rational::Rational;

// ---------------------------------------------------------------------------
// Slope coefficients from the filtration case analysis
// ---------------------------------------------------------------------------

/// Shape of the Harder-Narasimhan filtration of the tangent sheaf that
/// produces a slope inequality `c1^3 <= coeff * c2*c1`. The `(l, r1)` pair
/// is (filtration length, rank of the first graded piece).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KmCase {
    /// `(1, 3)`: semistable tangent sheaf; coefficient 3.
    Semistable,
    /// `(2, 1)`: two steps, rank-1 destabilizer; coefficient 16/5.
    TwoStepRank1,
    /// `(2, 2)`: two steps, rank-2 destabilizer; coefficient
    /// `4q^2 / (p(4q - 3p))` with `2q/3 < p <= q - 1`.
    TwoStepRank2,
    /// `(3, 1)`: full-length filtration; coefficient
    /// `4q^2 / (-4p^2 + 6pq - q^2)` with `p = q1 + q2`,
    /// `2 <= q2 <= q1 - 1 <= q/2 - 1`, and `p > 2q/3`.
    ThreeStep,
}

impl KmCase {
    /// Maps a raw `(l, r1)` pair to its case, if it is one of the four.
    pub fn from_pair(l: u32, r1: u32) -> Option<Self> {
        match (l, r1) {
            (1, 3) => Some(KmCase::Semistable),
            (2, 1) => Some(KmCase::TwoStepRank1),
            (2, 2) => Some(KmCase::TwoStepRank2),
            (3, 1) => Some(KmCase::ThreeStep),
            _ => None,
        }
    }

    /// The `(l, r1)` pair of this case.
    pub fn as_pair(&self) -> (u32, u32) {
        match self {
            KmCase::Semistable => (1, 3),
            KmCase::TwoStepRank1 => (2, 1),
            KmCase::TwoStepRank2 => (2, 2),
            KmCase::ThreeStep => (3, 1),
        }
    }
}

impl fmt::Display for KmCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r1) = self.as_pair();
        write!(f, "({l},{r1})")
    }
}

/// Parameters of one slope-inequality evaluation: the case, the Fano index
/// `q`, and — for the two cases whose coefficient depends on it — the slope
/// numerator `p` of the destabilizing piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KmContext {
    pub case: KmCase,
    pub q: u64,
    pub p: Option<u64>,
}

impl KmContext {
    pub fn new(case: KmCase, q: u64) -> Self {
        KmContext { case, q, p: None }
    }

    pub fn with_p(case: KmCase, q: u64, p: u64) -> Self {
        KmContext { case, q, p: Some(p) }
    }
}

/// Slope coefficient `b` with `c1^3 <= b * c2*c1` for the given context.
///
/// Validates the context: the parameter-dependent cases require `p`, with
/// `2q/3 < p <= q - 1` for `(2,2)` and, for `(3,1)`, additionally a
/// realizable split `p = q1 + q2`, `2 <= q2 <= q1 - 1 <= q/2 - 1`.
pub fn km_bound(ctx: &KmContext) -> Result<Rational, Error> {
    if ctx.q == 0 {
        return Err(Error::InvalidKmContext("q must be positive".into()));
    }
    let q = ctx.q as i64;
    match ctx.case {
        KmCase::Semistable => Ok(Rational::from_integer(3)),
        KmCase::TwoStepRank1 => Ok(Rational::new(16, 5)),
        KmCase::TwoStepRank2 => {
            let p = require_p(ctx)? as i64;
            // 2q/3 < p <= q - 1, checked exactly (3p > 2q).
            if 3 * p <= 2 * q || p > q - 1 {
                return Err(Error::InvalidKmContext(format!(
                    "case (2,2) requires 2q/3 < p <= q-1, got p = {p}, q = {q}"
                )));
            }
            Ok(Rational::new(4 * q * q, p * (4 * q - 3 * p)))
        }
        KmCase::ThreeStep => {
            let p = require_p(ctx)? as i64;
            if 3 * p <= 2 * q {
                return Err(Error::InvalidKmContext(format!(
                    "case (3,1) requires p > 2q/3, got p = {p}, q = {q}"
                )));
            }
            // p = q1 + q2 with 2 <= q2 <= q1 - 1 and 2*q1 <= q must be
            // realizable by integers: q1 ranges over (p/2, min(q/2, p-2)].
            let q1_min = p / 2 + 1;
            let q1_max = (q / 2).min(p - 2);
            if q1_min > q1_max {
                return Err(Error::InvalidKmContext(format!(
                    "case (3,1) admits no split p = q1 + q2 with \
                     2 <= q2 <= q1 - 1 <= q/2 - 1 for p = {p}, q = {q}"
                )));
            }
            let den = -4 * p * p + 6 * p * q - q * q;
            debug_assert!(den > 0);
            Ok(Rational::new(4 * q * q, den))
        }
    }
}

fn require_p(ctx: &KmContext) -> Result<u64, Error> {
    ctx.p.ok_or_else(|| {
        Error::InvalidKmContext(format!("case {} requires the slope parameter p", ctx.case))
    })
}

// ---------------------------------------------------------------------------
// Search configuration and records
// ---------------------------------------------------------------------------

/// Configuration of one search run.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Euler characteristic `chi(O)`; 1 for weak Fano 3-folds.
    pub chi: u64,
    /// Slope coefficient `b`; exactly one of 3, 16/5, 4.
    pub slope_coeff: Rational,
    /// Smallest index admitted in step 2.
    pub q_min: u64,
    /// If nonempty, step 1 admits only multisets containing at least one of
    /// these as a sub-multiset (multiplicity-aware).
    pub required_subsets: Vec<RMultiset>,
    /// Re-test survivors against the index-dependent worst-case coefficient.
    pub apply_km_postfilter: bool,
    /// Which slope-bound case `slope_coeff` came from; metadata only,
    /// never consulted by the pipeline.
    pub km_case: Option<KmCase>,
}

impl SearchConfig {
    /// A run over all multisets with `chi = 1` and no postfilter.
    pub fn new(slope_coeff: Rational, q_min: u64) -> Self {
        SearchConfig {
            chi: 1,
            slope_coeff,
            q_min,
            required_subsets: Vec::new(),
            apply_km_postfilter: false,
            km_case: None,
        }
    }

    /// Rejects configurations outside the documented domain.
    pub fn validate(&self) -> Result<(), Error> {
        let allowed = [
            Rational::from_integer(3),
            Rational::new(16, 5),
            Rational::from_integer(4),
        ];
        if !allowed.contains(&self.slope_coeff) {
            return Err(Error::InvalidConfig(format!(
                "slope coefficient must be one of 3, 16/5, 4; got {}",
                self.slope_coeff
            )));
        }
        if self.q_min < 1 {
            return Err(Error::InvalidConfig("q_min must be >= 1".into()));
        }
        if self.chi < 1 {
            return Err(Error::InvalidConfig("chi must be >= 1".into()));
        }
        Ok(())
    }

    fn admits(&self, orders: &RMultiset) -> bool {
        self.required_subsets.is_empty()
            || self
                .required_subsets
                .iter()
                .any(|sub| orders.contains_submultiset(sub))
    }
}

/// One numerical candidate surviving the pipeline (through step 2 when
/// `basket` is `None`, through step 3 otherwise).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateRecord {
    pub r_multiset: RMultiset,
    pub basket: Option<Basket>,
    /// `c2*c1 = 24*chi - sum(r - 1/r)`; strictly positive.
    pub c2c1: Rational,
    /// `c1^3 = n * q^2 / r_X`.
    pub c1_cubed: Rational,
    pub q: u64,
    /// Gorenstein index `r_X = lcm(R)`.
    pub r_x: u64,
    /// The integer `n = r_X * c1^3 / q^2 >= 1`.
    pub n: u64,
    /// `chi(-K)`, once a basket is assigned.
    pub chi_minus_k: Option<u64>,
}

impl CandidateRecord {
    /// Canonical sort key; also groups the dedup key `(basket, c1^3, q)`.
    fn sort_key(&self) -> (&RMultiset, u64, u64, &Option<Basket>) {
        (&self.r_multiset, self.q, self.n, &self.basket)
    }

    /// `r_X * c1^3` (an integer, equal to `n * q^2`).
    pub fn rx_c1_cubed(&self) -> u64 {
        self.n * self.q * self.q
    }

    /// `r_X * c2*c1` (an integer, since `r | r_X` for every order `r`).
    pub fn rx_c2c1(&self) -> u64 {
        (Rational::from(self.r_x) * self.c2c1.clone())
            .to_u64_exact()
            .expect("r_X * c2c1 is an integer by construction")
    }

    /// Re-checks every record invariant from scratch. Used by tests and
    /// verifiers so that emitted records are validated, not trusted.
    pub fn validate(&self, config: &SearchConfig) -> Result<(), String> {
        if gorenstein_index(&self.r_multiset) != self.r_x {
            return Err(format!("r_X != lcm(R) in {self:?}"));
        }
        let budget = Rational::from(24 * config.chi);
        let c2c1 = &budget - &defect_sum(&self.r_multiset);
        if c2c1 != self.c2c1 || !c2c1.is_positive() {
            return Err(format!("c2*c1 mismatch in {self:?}"));
        }
        if self.n < 1 {
            return Err(format!("n must be >= 1 in {self:?}"));
        }
        let rx_c1 = Rational::from(self.r_x) * self.c1_cubed.clone();
        if rx_c1 != Rational::from(self.n * self.q * self.q) {
            return Err(format!("r_X * c1^3 != n * q^2 in {self:?}"));
        }
        if self.q < config.q_min {
            return Err(format!("q below q_min in {self:?}"));
        }
        let cap = config.slope_coeff.clone() * Rational::from(self.r_x) * self.c2c1.clone();
        if Rational::from(self.q * self.q) > rx_c1 || rx_c1 > cap {
            return Err(format!("q^2 <= r_X*c1^3 <= b*r_X*c2c1 violated in {self:?}"));
        }
        if let Some(basket) = &self.basket {
            if basket.r_multiset() != self.r_multiset {
                return Err(format!("basket orders disagree with R in {self:?}"));
            }
            let chi_mk = chi_of_minus_k(&self.c1_cubed, config.chi, basket);
            if chi_mk.to_u64_exact() != self.chi_minus_k {
                return Err(format!("chi(-K) mismatch in {self:?}"));
            }
            if self.chi_minus_k.is_none() {
                return Err(format!("assigned basket lacks integral chi(-K) in {self:?}"));
            }
        } else if self.chi_minus_k.is_some() {
            return Err(format!("chi(-K) present without a basket in {self:?}"));
        }
        Ok(())
    }
}

/// `chi(-K) = c1^3/2 + 3*chi - sum(b(r-b)/(2r))`, returned raw.
///
/// For an actual variety this is a nonnegative integer; step 3 keeps exactly
/// the weight assignments for which it is.
pub fn chi_of_minus_k(c1_cubed: &Rational, chi: u64, basket: &Basket) -> Rational {
    c1_cubed.clone() / Rational::from_integer(2) + Rational::from(3 * chi)
        - half_point_sum(basket)
}

// ---------------------------------------------------------------------------
// Step 1: order multisets inside the degree-2 budget
// ---------------------------------------------------------------------------

/// Streams every order multiset with `sum(r - 1/r) < 24 * chi`, paired with
/// the resulting `c2*c1`, in lexicographic order of the sorted entries.
///
/// Each entry contributes at least 3/2 to the budget and is at most
/// `24 * chi`, so the stream is finite. Panics if `chi == 0`.
pub fn enumerate_r_multisets(chi: u64) -> RMultisetStream {
    assert!(chi >= 1, "chi must be positive");
    let budget = Rational::from(24 * chi);
    RMultisetStream {
        budget,
        // Depth-first pre-order: a node is emitted before its extensions, so
        // the pop order below is exactly lexicographic.
        stack: vec![(Vec::new(), Rational::zero())],
    }
}

/// Iterator behind [`enumerate_r_multisets`].
pub struct RMultisetStream {
    budget: Rational,
    stack: Vec<(Vec<u64>, Rational)>,
}

impl Iterator for RMultisetStream {
    type Item = (RMultiset, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        let (entries, defect) = self.stack.pop()?;
        // Children extend by one order r >= last entry while the budget
        // stays strict; pushed in reverse so the smallest r pops first.
        let lo = entries.last().copied().unwrap_or(2);
        let mut children = Vec::new();
        let mut r = lo;
        loop {
            let extended = &defect + &Rational::new((r * r - 1) as i64, r as i64);
            if extended >= self.budget {
                break; // contributions grow with r, so no larger r fits
            }
            let mut next = entries.clone();
            next.push(r);
            children.push((next, extended));
            r += 1;
        }
        self.stack.extend(children.into_iter().rev());

        let c2c1 = &self.budget - &defect;
        let orders = RMultiset::new(entries).expect("stream entries are >= 2");
        Some((orders, c2c1))
    }
}

// ---------------------------------------------------------------------------
// Step 2: index/degree pairs
// ---------------------------------------------------------------------------

/// Runs steps 1-2, producing basket-less records ordered by `(R, q, n)`.
pub fn step2_candidates(config: &SearchConfig) -> Result<Vec<CandidateRecord>, Error> {
    config.validate()?;
    let mut out = Vec::new();
    for (orders, c2c1) in enumerate_r_multisets(config.chi) {
        if !config.admits(&orders) {
            continue;
        }
        step2_for_orders(config, &orders, &c2c1, &mut out);
    }
    Ok(out)
}

/// Expands one step-1 pair into its `(q, n)` records.
fn step2_for_orders(
    config: &SearchConfig,
    orders: &RMultiset,
    c2c1: &Rational,
    out: &mut Vec<CandidateRecord>,
) {
    let r_x = gorenstein_index(orders);
    // cap = b * r_X * c2*c1 bounds n * q^2 from above.
    let cap = config.slope_coeff.clone() * Rational::from(r_x) * c2c1.clone();
    // Largest q with q^2 <= cap; q^2 is an integer, so flooring cap first
    // is exact.
    let q_max = match cap.floor_u64() {
        Some(f) => f.isqrt(),
        None => return,
    };
    for q in config.q_min..=q_max {
        let q2 = Rational::from(q) * Rational::from(q);
        let n_max = (&cap / &q2)
            .floor_u64()
            .expect("cap/q^2 >= 1 within the q loop");
        for n in 1..=n_max {
            let c1_cubed = Rational::from(n) * q2.clone() / Rational::from(r_x);
            out.push(CandidateRecord {
                r_multiset: orders.clone(),
                basket: None,
                c2c1: c2c1.clone(),
                c1_cubed,
                q,
                r_x,
                n,
                chi_minus_k: None,
            });
        }
    }
}

// ---------------------------------------------------------------------------
// Step 3: weight assignment
// ---------------------------------------------------------------------------

/// All baskets over the record's order multiset for which `chi(-K)` is a
/// nonnegative integer, in canonical order.
///
/// Weights run over `1 <= b <= r/2` with `gcd(r, b) = 1`; within a run of
/// equal orders they are taken nondecreasing, so each basket (a multiset!)
/// appears exactly once.
pub fn step3_assign_baskets(record: &CandidateRecord, chi: u64) -> Vec<Basket> {
    let entries = record.r_multiset.entries();
    let choices: Vec<Vec<u64>> = entries
        .iter()
        .map(|&r| (1..=r / 2).filter(|b| r.gcd(b) == 1).collect())
        .collect();

    let mut out = Vec::new();
    let mut weights: Vec<u64> = Vec::with_capacity(entries.len());
    assign_weights(record, chi, entries, &choices, &mut weights, &mut out);
    out
}

fn assign_weights(
    record: &CandidateRecord,
    chi: u64,
    entries: &[u64],
    choices: &[Vec<u64>],
    weights: &mut Vec<u64>,
    out: &mut Vec<Basket>,
) {
    let j = weights.len();
    if j == entries.len() {
        let points: Vec<OrbifoldPoint> = entries
            .iter()
            .zip(weights.iter())
            .map(|(&r, &b)| OrbifoldPoint::new(r, b).expect("choices are valid weights"))
            .collect();
        let basket = Basket::new(points);
        if chi_of_minus_k(&record.c1_cubed, chi, &basket).is_nonnegative_integer() {
            out.push(basket);
        }
        return;
    }
    // Equal orders must carry nondecreasing weights (multiset dedup).
    let floor = if j > 0 && entries[j] == entries[j - 1] {
        weights[j - 1]
    } else {
        0
    };
    for &b in &choices[j] {
        if b < floor {
            continue;
        }
        weights.push(b);
        assign_weights(record, chi, entries, choices, weights, out);
        weights.pop();
    }
}

// ---------------------------------------------------------------------------
// Postfilter and full pipeline
// ---------------------------------------------------------------------------

/// Keeps the records satisfying
/// `c1^3 / (c2*c1) <= 4 q^2 / (q^2 + 2q - 4)`,
/// the weakest slope coefficient any filtration case allows at index `q`.
/// Requires `q >= 2` on every record (the bound's denominator is positive
/// from there on).
pub fn km_postfilter(records: Vec<CandidateRecord>) -> Vec<CandidateRecord> {
    records
        .into_iter()
        .filter(|rec| {
            assert!(rec.q >= 2, "postfilter requires q >= 2");
            let q = Rational::from(rec.q);
            let q2 = &q * &q;
            let den = &q2 + &(Rational::from_integer(2) * q) - Rational::from_integer(4);
            // c1^3 * (q^2 + 2q - 4) <= 4 q^2 * c2*c1, cross-multiplied form.
            rec.c1_cubed.clone() * den
                <= Rational::from_integer(4) * q2 * rec.c2c1.clone()
        })
        .collect()
}

/// Intermediate counts of one search run, for auditing the pruning
/// structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    /// Multisets produced by step 1 before the required-subset filter.
    pub step1_multisets: usize,
    /// Multisets admitted into step 2.
    pub step1_admitted: usize,
    /// `(R, q, n)` records produced by step 2.
    pub step2_records: usize,
    /// Records with baskets produced by step 3 (after dedup).
    pub step3_records: usize,
    /// Records returned (equals `step3_records` unless the postfilter ran).
    pub emitted: usize,
}

///// Result of a full search run: the records plus stage counts.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub records: Vec<CandidateRecord>,
    pub stats: SearchStats,
}

/// Runs steps 1-3 (and the postfilter if configured), returning one record
/// per `(basket, c1^3, q)` in canonical order.
///
/// Step 2-3 expansion of distinct records is independent, so it runs on the
/// current rayon thread pool; the final sort makes the output identical for
/// every pool size.
pub fn run_full_search(config: &SearchConfig) -> Result<SearchOutcome, Error> {
    config.validate()?;

    let mut step1_multisets = 0usize;
    let admitted: Vec<(RMultiset, Rational)> = enumerate_r_multisets(config.chi)
        .inspect(|_| step1_multisets += 1)
        .filter(|(orders, _)| config.admits(orders))
        .collect();
    let step1_admitted = admitted.len();

    let mut step2 = Vec::new();
    for (orders, c2c1) in &admitted {
        step2_for_orders(config, orders, c2c1, &mut step2);
    }
    let step2_records = step2.len();

    let chi = config.chi;
    let mut expanded: Vec<CandidateRecord> = step2
        .par_iter()
        .flat_map_iter(|rec| {
            step3_assign_baskets(rec, chi).into_iter().map(|basket| {
                let chi_mk = chi_of_minus_k(&rec.c1_cubed, chi, &basket)
                    .to_u64_exact()
                    .expect("step 3 admitted only integral chi(-K)");
                CandidateRecord {
                    basket: Some(basket),
                    chi_minus_k: Some(chi_mk),
                    ..rec.clone()
                }
            })
        })
        .collect();

    expanded.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    expanded.dedup_by(|a, b| a.basket == b.basket && a.c1_cubed == b.c1_cubed && a.q == b.q);
    let step3_records = expanded.len();

    let records = if config.apply_km_postfilter {
        km_postfilter(expanded)
    } else {
        expanded
    };

    let stats = SearchStats {
        step1_multisets,
        step1_admitted,
        step2_records,
        step3_records,
        emitted: records.len(),
    };
    Ok(SearchOutcome { records, stats })
}

/// The order multisets forced by a non-Gorenstein point whose index-1 cover
/// analysis applies: any admissible `R` must contain one of these.
pub fn kawakita_subsets() -> Vec<RMultiset> {
    [
        vec![2, 2, 2, 2],
        vec![3, 3, 3],
        vec![2, 4, 4],
        vec![5, 5],
        vec![2, 3, 6],
    ]
    .into_iter()
    .map(|v| RMultiset::new(v).expect("static subsets are valid"))
    .collect()
}

/// Search restricted to multisets containing a forced sub-multiset, with the
/// widest slope coefficient 4 and no postfilter; the non-Gorenstein workload.
pub fn non_gorenstein_search(q_min: u64) -> Result<SearchOutcome, Error> {
    let mut config = SearchConfig::new(Rational::from_integer(4), q_min);
    config.required_subsets = kawakita_subsets();
    run_full_search(&config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orders(v: &[u64]) -> RMultiset {
        RMultiset::new(v.to_vec()).unwrap()
    }

    // ----- slope coefficients ------------------------------------------------

    #[test]
    fn km_bound_fixed_cases() {
        let b = km_bound(&KmContext::new(KmCase::Semistable, 61)).unwrap();
        assert_eq!(b, Rational::from_integer(3));
        let b = km_bound(&KmContext::new(KmCase::TwoStepRank1, 61)).unwrap();
        assert_eq!(b, Rational::new(16, 5));
    }

    #[test]
    fn km_bound_parameter_cases_at_p_eq_q_minus_1() {
        // q = 10, p = 9: (2,2) gives 4q^2/((q-1)(q+3)), (3,1) gives
        // 4q^2/(q^2 + 2q - 4); both denominators expanded by hand.
        let b = km_bound(&KmContext::with_p(KmCase::TwoStepRank2, 10, 9)).unwrap();
        assert_eq!(b, Rational::new(400, 117));
        let b = km_bound(&KmContext::with_p(KmCase::ThreeStep, 10, 9)).unwrap();
        assert_eq!(b, Rational::new(400, 116));
    }

    #[test]
    fn km_bound_rejects_bad_contexts() {
        assert!(KmCase::from_pair(2, 3).is_none());
        assert_eq!(KmCase::from_pair(3, 1), Some(KmCase::ThreeStep));

        let missing = km_bound(&KmContext::new(KmCase::TwoStepRank2, 10));
        assert!(matches!(missing, Err(Error::InvalidKmContext(_))));

        // p at or below 2q/3, or at q, is out of range for (2,2).
        assert!(km_bound(&KmContext::with_p(KmCase::TwoStepRank2, 9, 6)).is_err());
        assert!(km_bound(&KmContext::with_p(KmCase::TwoStepRank2, 9, 9)).is_err());
        assert!(km_bound(&KmContext::with_p(KmCase::TwoStepRank2, 9, 7)).is_ok());

        // (3,1) with odd q cannot realize p = q - 1: q1 would exceed q/2.
        assert!(km_bound(&KmContext::with_p(KmCase::ThreeStep, 11, 10)).is_err());
        assert!(km_bound(&KmContext::with_p(KmCase::ThreeStep, 11, 9)).is_ok());
    }

    #[test]
    fn km_bound_maximal_at_largest_admissible_p() {
        // Over every admissible p the coefficient peaks at the p used by the
        // postfilter bound; exhaustive for q in [4, 200].
        for q in 4..=200u64 {
            let worst22 = Rational::new(
                4 * (q * q) as i64,
                (q * q + 2 * q - 3) as i64,
            );
            for p in 1..q {
                if let Ok(b) = km_bound(&KmContext::with_p(KmCase::TwoStepRank2, q, p)) {
                    assert!(b <= worst22, "q={q} p={p}");
                }
            }
            let worst31 = Rational::new(
                4 * (q * q) as i64,
                (q * q + 2 * q - 4) as i64,
            );
            for p in 1..q {
                if let Ok(b) = km_bound(&KmContext::with_p(KmCase::ThreeStep, q, p)) {
                    assert!(b <= worst31, "q={q} p={p}");
                }
            }
        }
    }

    // ----- configuration -----------------------------------------------------

    #[test]
    fn config_validation() {
        assert!(SearchConfig::new(Rational::from_integer(3), 61).validate().is_ok());
        assert!(SearchConfig::new(Rational::new(16, 5), 61).validate().is_ok());
        let bad = SearchConfig::new(Rational::new(7, 2), 61);
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = SearchConfig::new(Rational::from_integer(4), 0);
        assert!(bad.validate().is_err());
        let mut bad = SearchConfig::new(Rational::from_integer(4), 61);
        bad.chi = 0;
        assert!(bad.validate().is_err());
    }

    // ----- step 1 --------------------------------------------------------------

    #[test]
    fn stream_starts_lexicographically() {
        let first: Vec<RMultiset> = enumerate_r_multisets(1)
            .map(|(orders, _)| orders)
            .take(4)
            .collect();
        assert_eq!(
            first,
            vec![
                RMultiset::empty(),
                orders(&[2]),
                orders(&[2, 2]),
                orders(&[2, 2, 2]),
            ]
        );
    }

    #[test]
    fn stream_respects_strict_budget() {
        let all: Vec<(RMultiset, Rational)> = enumerate_r_multisets(1).collect();
        // 15 twos give defect 45/2 < 24; 16 twos would hit 24 exactly and
        // must be excluded.
        assert!(all.iter().any(|(o, _)| o.entries() == vec![2; 15]));
        assert!(!all.iter().any(|(o, _)| o.len() >= 16));
        for (o, c2c1) in &all {
            assert!(c2c1.is_positive(), "budget violated at {o}");
            assert_eq!(
                c2c1,
                &(Rational::from_integer(24) - defect_sum(o)),
                "c2c1 mismatch at {o}"
            );
            assert!(o.entries().iter().all(|&r| r <= 24));
        }
        // Lexicographic order and uniqueness in one pass.
        for w in all.windows(2) {
            assert!(w[0].0.entries() < w[1].0.entries());
        }
        // The reference multiset is present.
        assert!(all.iter().any(|(o, _)| o == &orders(&[2, 3, 5, 11])));
    }

    // ----- steps 2 and 3 ---------------------------------------------------------

    #[test]
    fn step2_on_the_reference_orders() {
        let config = SearchConfig::new(Rational::from_integer(4), 61);
        let records = step2_candidates(&config).unwrap();
        let hits: Vec<&CandidateRecord> = records
            .iter()
            .filter(|rec| rec.r_multiset == orders(&[2, 3, 5, 11]))
            .collect();
        // n * q^2 <= 4 * 1361 = 5444 admits exactly q in 61..=73 at n = 1.
        assert_eq!(
            hits.iter().map(|rec| (rec.q, rec.n)).collect::<Vec<_>>(),
            (61..=73).map(|q| (q, 1)).collect::<Vec<_>>()
        );
        for rec in hits {
            assert_eq!(rec.r_x, 330);
            assert_eq!(rec.rx_c2c1(), 1361);
            assert_eq!(rec.basket, None);
            rec.validate(&config).unwrap();
        }
    }

    #[test]
    fn step2_is_ordered_and_valid() {
        let config = SearchConfig::new(Rational::from_integer(4), 61);
        let records = step2_candidates(&config).unwrap();
        assert!(!records.is_empty());
        for w in records.windows(2) {
            assert!(w[0].sort_key() <= w[1].sort_key());
        }
        for rec in &records {
            rec.validate(&config).unwrap();
        }
    }

    #[test]
    fn step3_selects_the_unique_weight_assignment() {
        let config = SearchConfig::new(Rational::from_integer(4), 61);
        let records = step2_candidates(&config).unwrap();
        let at = |q: u64| {
            records
                .iter()
                .find(|rec| rec.r_multiset == orders(&[2, 3, 5, 11]) && rec.q == q)
                .unwrap()
        };
        let baskets = step3_assign_baskets(at(61), 1);
        assert_eq!(
            baskets,
            vec![Basket::from_pairs(&[(2, 1), (3, 1), (5, 2), (11, 1)]).unwrap()]
        );
        // Neighboring indices admit no integral chi(-K) at all.
        assert!(step3_assign_baskets(at(62), 1).is_empty());
        assert!(step3_assign_baskets(at(66), 1).is_empty());
        let baskets = step3_assign_baskets(at(67), 1);
        assert_eq!(
            baskets,
            vec![Basket::from_pairs(&[(2, 1), (3, 1), (5, 1), (11, 2)]).unwrap()]
        );
    }

    #[test]
    fn chi_of_minus_k_reference_values() {
        let basket = Basket::from_pairs(&[(2, 1), (3, 1), (5, 1), (11, 2)]).unwrap();
        let v = chi_of_minus_k(&Rational::new(4489, 330), 1, &basket);
        assert_eq!(v, Rational::from_integer(8));
        let basket = Basket::from_pairs(&[(4, 1), (5, 1), (5, 2), (7, 3)]).unwrap();
        let v = chi_of_minus_k(&Rational::new(2025, 140), 1, &basket);
        assert_eq!(v, Rational::from_integer(8));
    }

    // ----- full pipeline ---------------------------------------------------------

    #[test]
    fn full_search_with_coefficient_4_reproduces_the_reference_table() {
        let config = SearchConfig::new(Rational::from_integer(4), 61);
        let outcome = run_full_search(&config).unwrap();
        let summary: Vec<(String, u64, u64, u64, u64)> = outcome
            .records
            .iter()
            .map(|rec| {
                (
                    rec.basket.as_ref().unwrap().to_string(),
                    rec.r_x,
                    rec.rx_c1_cubed(),
                    rec.rx_c2c1(),
                    rec.q,
                )
            })
            .collect();
        assert_eq!(
            summary,
            vec![
                ("[(2,1),(3,1),(5,2),(11,1)]".into(), 330, 3721, 1361, 61),
                ("[(2,1),(3,1),(5,1),(11,2)]".into(), 330, 4489, 1361, 67),
                ("[(2,1),(3,1),(5,2),(11,1)]".into(), 330, 5041, 1361, 71),
                ("[(2,1),(3,1),(5,1),(11,3)]".into(), 330, 5329, 1361, 73),
            ]
        );
        for rec in &outcome.records {
            rec.validate(&config).unwrap();
        }
        assert_eq!(outcome.stats.step3_records, 4);
        assert_eq!(outcome.stats.emitted, 4);
        assert!(outcome.stats.step1_multisets >= outcome.stats.step1_admitted);
    }

    #[test]
    fn postfilter_removes_exactly_the_top_index_row() {
        let mut config = SearchConfig::new(Rational::from_integer(4), 61);
        config.apply_km_postfilter = true;
        let outcome = run_full_search(&config).unwrap();
        let qs: Vec<u64> = outcome.records.iter().map(|rec| rec.q).collect();
        assert_eq!(qs, vec![61, 67, 71]);
        // 5329/1361 > 21316/5471 is why q = 73 is gone (cross-multiplied:
        // 5329 * 5471 = 29154959 > 29011076 = 21316 * 1361).
        assert_eq!(outcome.stats.step3_records, 4);
        assert_eq!(outcome.stats.emitted, 3);
    }

    #[test]
    fn tighter_coefficients_leave_single_rows() {
        let outcome =
            run_full_search(&SearchConfig::new(Rational::from_integer(3), 61)).unwrap();
        assert_eq!(outcome.records.len(), 1);
        let rec = &outcome.records[0];
        assert_eq!(rec.q, 61);
        assert_eq!(rec.rx_c1_cubed(), 3721);
        assert_eq!(
            rec.basket,
            Some(Basket::from_pairs(&[(2, 1), (3, 1), (5, 2), (11, 1)]).unwrap())
        );

        let outcome =
            run_full_search(&SearchConfig::new(Rational::new(16, 5), 61)).unwrap();
        assert_eq!(outcome.records.len(), 1);
        assert_eq!(outcome.records[0].q, 61);
    }

    #[test]
    fn non_gorenstein_extremal_record() {
        let outcome = non_gorenstein_search(33).unwrap();
        assert!(!outcome.records.is_empty());
        let q_max = outcome.records.iter().map(|rec| rec.q).max().unwrap();
        assert_eq!(q_max, 45);
        let extremal: Vec<&CandidateRecord> = outcome
            .records
            .iter()
            .filter(|rec| rec.q == 45)
            .collect();
        for rec in &extremal {
            assert_eq!(
                rec.basket,
                Some(Basket::from_pairs(&[(4, 1), (5, 1), (5, 2), (7, 3)]).unwrap())
            );
            assert_eq!(rec.r_x, 140);
            assert_eq!(rec.rx_c2c1(), 531);
            assert_eq!(rec.rx_c1_cubed(), 2025);
            assert_eq!(rec.chi_minus_k, Some(8));
        }
        assert_eq!(extremal.len(), 1);
        // Every record's orders contain a forced sub-multiset.
        let subsets = kawakita_subsets();
        for rec in &outcome.records {
            assert!(subsets.iter().any(|s| rec.r_multiset.contains_submultiset(s)));
        }
    }

    #[test]
    fn dedup_key_is_basket_degree_index() {
        // The pipeline cannot produce two records with equal
        // (basket, c1^3, q); this pins the dedup key down.
        let config = SearchConfig::new(Rational::from_integer(4), 61);
        let outcome = run_full_search(&config).unwrap();
        let mut keys: Vec<(String, String, u64)> = outcome
            .records
            .iter()
            .map(|rec| {
                (
                    rec.basket.as_ref().unwrap().to_string(),
                    rec.c1_cubed.to_string(),
                    rec.q,
                )
            })
            .collect();
        let before = keys.len();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), before);
    }
}
