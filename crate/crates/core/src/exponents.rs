//! Exact rational calculus for Lebesgue exponent vectors.
//!
//! Exponents are stored as reciprocals, so `p = ∞` is the ordinary rational
//! `0` and conjugation is `recip ↦ 1 − recip`. All arithmetic is exact; no
//! operation here touches floating point.

use num::{BigRational, One, Signed, Zero};
use std::fmt;

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the exponent calculus.
pub type Rat = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}

/// A Lebesgue exponent `p ∈ (0, ∞]` stored as its reciprocal `1/p ∈ [0, ∞)`.
///
/// Entries of [`ExpVector`] and [`RVector`] additionally satisfy `p ≥ 1`
/// (reciprocal in `[0, 1]`), but Hölder sums of such entries may drop below
/// one, so the scalar type itself only requires a nonnegative reciprocal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exp {
    recip: Rat,
}

impl Exp {
    pub fn from_recip(recip: Rat) -> Result<Self> {
        if recip.is_negative() {
            return Err(Error::Domain(format!("exponent reciprocal {recip} < 0")));
        }
        Ok(Exp { recip })
    }

    /// Exponent with value `num/den`.
    pub fn from_frac(num: i64, den: i64) -> Result<Self> {
        if num <= 0 || den <= 0 {
            return Err(Error::Domain(format!("exponent {num}/{den} must be positive")));
        }
        Exp::from_recip(rat(den, num))
    }

    pub fn from_int(p: i64) -> Result<Self> {
        Exp::from_frac(p, 1)
    }

    pub fn infinity() -> Self {
        Exp { recip: Rat::zero() }
    }

    pub fn one() -> Self {
        Exp { recip: Rat::one() }
    }

    pub fn recip(&self) -> &Rat {
        &self.recip
    }

    /// The exponent value itself; `None` for `p = ∞`.
    pub fn value(&self) -> Option<Rat> {
        if self.recip.is_zero() {
            None
        } else {
            Some(self.recip.recip())
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.recip.is_zero()
    }

    /// True when `p ≥ 1`, i.e. the reciprocal lies in `[0, 1]`.
    pub fn is_lebesgue(&self) -> bool {
        self.recip <= Rat::one()
    }

    /// Conjugate exponent `p'` with `1/p' = 1 − 1/p`. Requires `p ≥ 1`.
    pub fn conjugate(&self) -> Result<Exp> {
        if !self.is_lebesgue() {
            return Err(Error::Domain(format!(
                "conjugate undefined for exponent below one (recip {})",
                self.recip
            )));
        }
        Ok(Exp { recip: Rat::one() - &self.recip })
    }
}

impl fmt::Debug for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exp({self})")
    }
}

impl fmt::Display for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "inf"),
            Some(v) => write!(f, "{v}"),
        }
    }
}

/// An exponent vector `p⃗ = (p_1, …, p_m)` with `1 ≤ p_i ≤ ∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpVector {
    entries: Vec<Exp>,
}

impl ExpVector {
    pub fn new(entries: Vec<Exp>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Dimension("exponent vector must be nonempty".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            if !e.is_lebesgue() {
                return Err(Error::Domain(format!("entry {i} has exponent below one")));
            }
        }
        Ok(ExpVector { entries })
    }

    pub fn from_ints(ps: &[i64]) -> Result<Self> {
        ExpVector::new(ps.iter().map(|&p| Exp::from_int(p)).collect::<Result<_>>()?)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Exp] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &Exp {
        &self.entries[i]
    }

    /// The Hölder sum `1/p = Σ 1/p_i` as an exponent (may fall below one).
    pub fn holder_sum(&self) -> Exp {
        Exp { recip: self.sum_recip() }
    }

    pub fn sum_recip(&self) -> Rat {
        self.entries.iter().map(|e| e.recip.clone()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.entries.iter().all(|e| !e.is_infinite())
    }
}

/// A limiting vector `r⃗ = (r_1, …, r_{m+1})` with `1 ≤ r_i < ∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RVector {
    entries: Vec<Exp>,
}

impl RVector {
    pub fn new(entries: Vec<Exp>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::Dimension("limiting vector needs at least two entries".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            if e.is_infinite() || !e.is_lebesgue() {
                return Err(Error::Domain(format!("limiting entry {i} must lie in [1, inf)")));
            }
        }
        Ok(RVector { entries })
    }

    pub fn from_ints(rs: &[i64]) -> Result<Self> {
        RVector::new(rs.iter().map(|&r| Exp::from_int(r)).collect::<Result<_>>()?)
    }

    /// Number of weight slots `m` (the vector has `m + 1` entries).
    pub fn arity(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entries(&self) -> &[Exp] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &Exp {
        &self.entries[i]
    }

    pub fn last(&self) -> &Exp {
        self.entries.last().expect("nonempty")
    }

    /// `1/r = Σ_{i=1}^{m+1} 1/r_i`, computed exactly.
    pub fn sum_recip(&self) -> Rat {
        self.entries.iter().map(|e| e.recip.clone()).sum()
    }

    /// Componentwise strict comparison against another limiting vector of the
    /// same length: `r_i < s_i` in the first `m` slots and `r_{m+1} ≤ s_{m+1}`.
    pub fn tightens(&self, s: &RVector) -> Result<bool> {
        if self.entries.len() != s.entries.len() {
            return Err(Error::Dimension(format!(
                "limiting vectors have lengths {} and {}",
                self.entries.len(),
                s.entries.len()
            )));
        }
        let m = self.arity();
        let leading = (0..m).all(|i| self.entries[i].recip > s.entries[i].recip);
        Ok(leading && self.entries[m].recip >= s.entries[m].recip)
    }
}

fn check_lengths(r: &RVector, p: &ExpVector) -> Result<()> {
    if r.entries.len() != p.len() + 1 {
        return Err(Error::Dimension(format!(
            "limiting vector has {} entries, expected {}",
            r.entries.len(),
            p.len() + 1
        )));
    }
    Ok(())
}

/// `r⃗ ≼ p⃗`: `r_i ≤ p_i` for `i = 1..m` and `r'_{m+1} ≥ p`, all exact.
pub fn preceq(r: &RVector, p: &ExpVector) -> Result<bool> {
    check_lengths(r, p)?;
    let m = p.len();
    let slots = (0..m).all(|i| r.entries[i].recip >= p.entries[i].recip);
    // r'_{m+1} >= p  <=>  1 - 1/r_{m+1} <= 1/p
    let conj = Rat::one() - &r.entries[m].recip <= p.sum_recip();
    Ok(slots && conj)
}

/// `r⃗ ≺ p⃗`: every inequality of [`preceq`] strict.
pub fn prec(r: &RVector, p: &ExpVector) -> Result<bool> {
    check_lengths(r, p)?;
    let m = p.len();
    let slots = (0..m).all(|i| r.entries[i].recip > p.entries[i].recip);
    let conj = Rat::one() - &r.entries[m].recip < p.sum_recip();
    Ok(slots && conj)
}

/// Derived exponents of an admissible pair `(p⃗, r⃗)`, stored as exact
/// reciprocals; a zero reciprocal is the `∞` sentinel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedExponents {
    /// `1/p_{m+1} = 1 − 1/p`; may be negative when `p < 1`.
    pub p_last_recip: Rat,
    /// `1/δ_i = 1/r_i − 1/p_i` for `i = 1..m+1` (slot `m+1` uses `p_{m+1}`).
    pub delta_recip: Vec<Rat>,
    /// `1/θ_i = 1/r − 1 − 1/δ_i` for `i = 1..m`.
    pub theta_recip: Vec<Rat>,
    /// `1/r = Σ 1/r_i`.
    pub r_recip: Rat,
}

impl DerivedExponents {
    /// `1/r − 1 = Σ_j 1/δ_j`, nonnegative for admissible pairs.
    pub fn r_recip_minus_one(&self) -> Rat {
        &self.r_recip - Rat::one()
    }

    /// `1/θ_{m+1} := Σ_{j≤m} 1/δ_j`, the product-slot counterpart of `θ_i`.
    pub fn product_theta_recip(&self) -> Rat {
        self.r_recip_minus_one() - &self.delta_recip[self.delta_recip.len() - 1]
    }
}

/// Computes `p_{m+1}`, `δ_i`, `θ_i` for an admissible pair. Errors when
/// `r⃗ ≼ p⃗` fails.
pub fn derived_exponents(p: &ExpVector, r: &RVector) -> Result<DerivedExponents> {
    if !preceq(r, p)? {
        return Err(Error::Domain("derived exponents need r ≼ p".into()));
    }
    let m = p.len();
    let p_last_recip = Rat::one() - p.sum_recip();
    let mut delta_recip = Vec::with_capacity(m + 1);
    for i in 0..m {
        delta_recip.push(&r.entries[i].recip - &p.entries[i].recip);
    }
    delta_recip.push(&r.entries[m].recip - &p_last_recip);
    let r_recip = r.sum_recip();
    let total = &r_recip - Rat::one();
    debug_assert_eq!(delta_recip.iter().sum::<Rat>(), total);
    let theta_recip: Vec<Rat> = (0..m).map(|i| &total - &delta_recip[i]).collect();
    debug_assert!(delta_recip.iter().all(|d| !d.is_negative()));
    debug_assert!(theta_recip.iter().all(|t| !t.is_negative()));
    Ok(DerivedExponents { p_last_recip, delta_recip, theta_recip, r_recip })
}

/// Which weight a reduced classical condition constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionSlot {
    /// The `i`-th factor weight `w_i` (zero-based).
    Factor(usize),
    /// The product weight `w = Π w_i`.
    Product,
}

/// One classical `A_q` condition from the reduction of a multilinear class.
///
/// The condition is `v^ρ ∈ A_q` where `ρ = 1/power_recip` and
/// `q = (power_recip + upper_recip) / power_recip`. Degenerate slots carry a
/// zero reciprocal: `power_recip = 0` is the esssup-form condition (infinite
/// power), `upper_recip = 0` makes the index exactly `A_1`.
///
/// For a power weight `|x|^a` on `ℝ^n` the condition is equivalent to the
/// interval test used by [`crate::power_weights`]:
/// `a > −n·power_recip` (or `a ≥ 0` when `power_recip = 0`) and
/// `a < n·upper_recip` (or `a ≤ 0` when `upper_recip = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCondition {
    pub slot: ConditionSlot,
    pub power_recip: Rat,
    pub upper_recip: Rat,
}

impl ClassicalCondition {
    /// The power `ρ` applied to the weight; `None` in the esssup form.
    pub fn weight_power(&self) -> Option<Rat> {
        if self.power_recip.is_zero() {
            None
        } else {
            Some(self.power_recip.recip())
        }
    }

    /// The classical index `q = (1/r − 1)·ρ ≥ 1`; `None` in the esssup form.
    pub fn ap_index(&self) -> Option<Rat> {
        if self.power_recip.is_zero() {
            None
        } else {
            Some((&self.power_recip + &self.upper_recip) / &self.power_recip)
        }
    }

    /// True when the integral term degenerates to an essential supremum.
    pub fn is_esssup_form(&self) -> bool {
        self.power_recip.is_zero()
    }

    /// True when the index collapses to `A_1`.
    pub fn is_a1_form(&self) -> bool {
        self.upper_recip.is_zero()
    }
}

/// Reduces membership in the multilinear class of the pair `(p⃗, r⃗)` to
/// `m + 1` classical conditions: `w^{δ_{m+1}} ∈ A_{(1/r−1)δ_{m+1}}` for the
/// product weight and `w_i^{θ_i} ∈ A_{(1/r−1)θ_i}` for each factor.
pub fn apr_characterization(p: &ExpVector, r: &RVector) -> Result<Vec<ClassicalCondition>> {
    let d = derived_exponents(p, r)?;
    let m = p.len();
    let mut conds = Vec::with_capacity(m + 1);
    conds.push(ClassicalCondition {
        slot: ConditionSlot::Product,
        power_recip: d.delta_recip[m].clone(),
        upper_recip: d.product_theta_recip(),
    });
    for i in 0..m {
        conds.push(ClassicalCondition {
            slot: ConditionSlot::Factor(i),
            power_recip: d.theta_recip[i].clone(),
            upper_recip: d.delta_recip[i].clone(),
        });
    }
    Ok(conds)
}

/// Builds the limiting vector `r⃗ = (1, …, 1, r_{m+1})` with
/// `1/r'_{m+1} = 1/p − 1/q`, reducing the two-index class `A_{p⃗,q}` to the
/// general vector-indexed class.
pub fn apq_reduction(p: &ExpVector, q: &Exp) -> Result<RVector> {
    let p_recip = p.sum_recip();
    if q.recip.is_zero() {
        return Err(Error::Domain("target exponent q must be finite".into()));
    }
    if q.recip > p_recip {
        return Err(Error::Domain(format!("need q ≥ p, got 1/q = {} > 1/p = {}", q.recip, p_recip)));
    }
    let last_recip = Rat::one() - (&p_recip - &q.recip);
    if !last_recip.is_positive() {
        return Err(Error::Domain(format!(
            "gap 1/p − 1/q = {} is ≥ 1, no finite r_{{m+1}} exists",
            &p_recip - &q.recip
        )));
    }
    let mut entries = vec![Exp::one(); p.len()];
    entries.push(Exp { recip: last_recip });
    RVector::new(entries)
}

/// Scales the first `m` entries of a limiting vector by `t > 1`, keeping the
/// last entry.
pub fn gamma_t(r: &RVector, t: &Rat) -> Result<RVector> {
    if t <= &Rat::one() {
        return Err(Error::Domain(format!("scale factor t = {t} must exceed one")));
    }
    let m = r.arity();
    let mut entries = Vec::with_capacity(m + 1);
    for i in 0..m {
        entries.push(Exp { recip: &r.entries[i].recip / t });
    }
    entries.push(r.entries[m].clone());
    RVector::new(entries)
}
