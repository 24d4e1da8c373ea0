//! Trace sets: the psi- and s-images of `Q^{!=0} a - span(S)`, computed
//! symbolically from the uncancellable part of `a` over the submodel.
//!
//! Writing `U` for the positions of `a` that no span element can cancel and
//! `p1 = min U`, the reachable psi/s values are `s0`, the successors of
//! submodel positions below `p1`, and possibly the successor of `p1` itself.
//! Whether that last value is reachable depends on the blocked coefficient
//! residue `W` (the sum of the uncancellable coefficient parts) and on
//! whether the submodel has positions above `p1` to absorb a correction.
//! Every value reported carries a re-evaluable witness pair `(q, gamma)`.

use crate::couple::Model;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::extensions::submodel::Submodel;
use crate::psi_order::{PsiPosition, SCut};
use crate::scalar::Scalar;
use num::rational::BigRational;
use num::{One, Zero};
use std::fmt;

/// A downward closed subset of the submodel's Psi set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DownSet {
    /// The interval from s0 up to (and including) the member at `0`.
    UpTo(PsiPosition),
    /// Everything below the submodel-relative s-cut.
    BelowCut(SCut),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceCase {
    /// Bounded interval inside the submodel's Psi set.
    Bounded,
    /// A proper s-cut's lower set, nothing external.
    CutOnly,
    /// A cut's lower set plus one external element realizing the cut.
    CutWithExternal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Psi,
    Succ,
}

/// A pair `(q, gamma)` with `psi(q a - gamma) = v` or `s(q a - gamma) = v`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub kind: WitnessKind,
    pub q: BigRational,
    pub gamma: Element,
}

#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub value: PsiPosition,
    pub psi_witness: Option<Witness>,
    pub s_witness: Option<Witness>,
}

#[derive(Debug, Clone)]
pub struct TraceResult {
    pub submodel: Submodel,
    pub down: DownSet,
    pub psi_external: Option<PsiPosition>,
    pub s_external: Option<PsiPosition>,
    pub listing: Vec<TraceEntry>,
}

impl TraceResult {
    pub fn case(&self) -> TraceCase {
        match (&self.down, self.external()) {
            (DownSet::UpTo(_), _) => TraceCase::Bounded,
            (DownSet::BelowCut(_), Some(_)) => TraceCase::CutWithExternal,
            (DownSet::BelowCut(_), None) => TraceCase::CutOnly,
        }
    }

    /// The single element outside the submodel's Psi set, if any.
    pub fn external(&self) -> Option<&PsiPosition> {
        self.psi_external.as_ref().or(self.s_external.as_ref())
    }

    fn down_contains(&self, ambient: &Model, pos: &PsiPosition) -> Result<bool> {
        if !self.submodel.contains_position(pos) {
            return Ok(false);
        }
        match &self.down {
            DownSet::UpTo(top) => {
                Ok(ambient.order().cmp_pos(pos, top)? != std::cmp::Ordering::Greater)
            }
            DownSet::BelowCut(cut) => Ok(match pos.copy_id() {
                None => true,
                Some(id) => {
                    let rank_in_sub = self
                        .submodel
                        .copies()
                        .iter()
                        .position(|c| c == id)
                        .ok_or_else(|| Error::UnknownCopy(id.0.clone()))?;
                    rank_in_sub < cut.tail_from
                }
            }),
        }
    }

    /// Membership of the Psi member at `pos` in the psi-part.
    pub fn psi_part_contains(&self, ambient: &Model, pos: &PsiPosition) -> Result<bool> {
        Ok(self.down_contains(ambient, pos)? || self.psi_external.as_ref() == Some(pos))
    }

    /// Membership of the Psi member at `pos` in the s-part.
    pub fn s_part_contains(&self, ambient: &Model, pos: &PsiPosition) -> Result<bool> {
        Ok(self.down_contains(ambient, pos)? || self.s_external.as_ref() == Some(pos))
    }

    pub fn contains(&self, ambient: &Model, pos: &PsiPosition) -> Result<bool> {
        Ok(self.psi_part_contains(ambient, pos)? || self.s_part_contains(ambient, pos)?)
    }

    /// Renders the trace as a set expression, e.g. `{s0, s^2 0, s^3 0}`.
    pub fn render_set(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        let mut truncated = false;
        match &self.down {
            DownSet::UpTo(top) => match top {
                PsiPosition::Omega(n) if *n <= 8 => {
                    for i in 0..=*n {
                        parts.push(crate::element::psi_member_name(&PsiPosition::Omega(i)));
                    }
                }
                _ => {
                    parts.push("s0".into());
                    truncated = true;
                    parts.push(format!("..<= {}", crate::element::psi_member_name(top)));
                }
            },
            DownSet::BelowCut(cut) => {
                parts.push("s0".into());
                truncated = true;
                if cut.tail_from == self.submodel.copies().len() {
                    parts.push("..all of sub-Psi".into());
                } else {
                    parts.push(format!(
                        "..below copy {}",
                        self.submodel.copies()[cut.tail_from]
                    ));
                }
            }
        }
        if let Some(e) = self.external() {
            parts.push(crate::element::psi_member_name(e));
        }
        let _ = truncated;
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Display for TraceResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let case = match self.case() {
            TraceCase::Bounded => 1,
            TraceCase::CutOnly => 2,
            TraceCase::CutWithExternal => 3,
        };
        write!(f, "case {case}: {}", self.render_set())
    }
}

/// Internal analysis shared by the trace and the classifier.
pub(crate) struct ResidueAnalysis {
    pub uncancellable: Vec<PsiPosition>,
    pub min_pos: PsiPosition,
    pub min_in_submodel: bool,
    /// Sum of the blocked coefficient parts over the uncancellable positions.
    pub blocked_sum: Scalar,
    /// Whether any submodel position lies strictly above `min_pos`.
    pub has_room: bool,
    /// Whether span corrections can reach the blocked residue at all
    /// (always true over a full subfield; over the rationals it requires the
    /// irrational residue to cancel).
    pub gate: bool,
}

pub(crate) fn analyze(ambient: &Model, sub: &Submodel, alpha: &Element) -> Result<ResidueAnalysis> {
    ambient.admit(alpha)?;
    let uncancellable = sub.uncancellable_positions(alpha)?;
    if uncancellable.is_empty() {
        return Err(Error::InSpan);
    }
    let min_pos = uncancellable[0].clone();
    let min_in_submodel = sub.contains_position(&min_pos);
    let full_subfield = !sub.rational_only() || ambient.field().radicand().is_none();
    let mut blocked_sum = Scalar::zero();
    for p in &uncancellable {
        let c = alpha.coeff_at(p).expect("uncancellable position has a coefficient");
        let blocked = if sub.contains_position(p) {
            // only the irrational part is out of reach
            c.sub(&Scalar::from_rational(c.rational_part().clone()))?
        } else {
            c.clone()
        };
        blocked_sum = blocked_sum.add(&blocked)?;
    }
    let gate = full_subfield || blocked_sum.irrational_part().is_zero();
    let has_room = match &min_pos {
        PsiPosition::Omega(_) => true,
        PsiPosition::Copy(id, _) => {
            if sub.contains_copy(id) {
                true
            } else {
                let rank = ambient.order().copy_rank(id)?;
                sub.copies()
                    .iter()
                    .any(|c| ambient.order().copy_rank(c).unwrap() > rank)
            }
        }
    };
    Ok(ResidueAnalysis { uncancellable, min_pos, min_in_submodel, blocked_sum, has_room, gate })
}

/// Computes the trace of `alpha` over the span of `sub` inside `ambient`.
pub fn trace_set(ambient: &Model, sub: &Submodel, alpha: &Element) -> Result<TraceResult> {
    trace_set_windowed(ambient, sub, alpha, 6)
}

pub fn trace_set_windowed(
    ambient: &Model,
    sub: &Submodel,
    alpha: &Element,
    window: usize,
) -> Result<TraceResult> {
    let a = analyze(ambient, sub, alpha)?;
    let (down, psi_external, s_external) = classify_parts(ambient, sub, &a)?;
    let mut result = TraceResult {
        submodel: sub.clone(),
        down,
        psi_external,
        s_external,
        listing: Vec::new(),
    };
    build_listing(ambient, sub, alpha, &a, &mut result, window)?;
    verify_listing(ambient, alpha, &result)?;
    Ok(result)
}

fn classify_parts(
    ambient: &Model,
    sub: &Submodel,
    a: &ResidueAnalysis,
) -> Result<(DownSet, Option<PsiPosition>, Option<PsiPosition>)> {
    if !a.gate {
        // the irrational residue forces a nonzero coefficient sum everywhere
        return Ok((DownSet::UpTo(PsiPosition::Omega(0)), None, None));
    }
    if a.min_in_submodel {
        let top = ambient.order().succ(&a.min_pos);
        return Ok((DownSet::UpTo(top), None, None));
    }
    let cut = sub.cut_below(ambient, &a.min_pos)?;
    let external = ambient.order().succ(&a.min_pos);
    let w = &a.blocked_sum;
    let (psi_ext, s_ext) = if a.has_room {
        (true, true)
    } else {
        let w_rational = w.irrational_part().is_zero();
        (w.is_zero(), w_rational && !w.is_zero())
    };
    Ok((
        DownSet::BelowCut(cut),
        psi_ext.then(|| external.clone()),
        s_ext.then_some(external),
    ))
}

/// Builds a witness `(q, gamma)` making `q*alpha - gamma` have minimum
/// support `min_pos` and coefficient sum `target`. Assumes the calling
/// analysis has established reachability.
fn build_witness(
    ambient: &Model,
    sub: &Submodel,
    alpha: &Element,
    min_pos: &PsiPosition,
    target: &Scalar,
    q: &BigRational,
) -> Result<Element> {
    let order = ambient.order();
    let scaled = alpha.scale_rational(q);
    let mut gamma_terms: Vec<(PsiPosition, Scalar)> = Vec::new();
    // cancel every admissible coefficient below min_pos
    for (p, c) in scaled.terms()? {
        if order.cmp_pos(p, min_pos)? == std::cmp::Ordering::Less {
            gamma_terms.push((p.clone(), c.clone()));
        }
    }
    // pin a nonzero coefficient at min_pos when the span can touch it
    if sub.contains_position(min_pos) {
        let c = scaled.coeff_at(min_pos).cloned().unwrap_or_else(Scalar::zero);
        let adjust = if sub.admits_scalar(&c) {
            c.sub(&Scalar::one())? // leaves exactly 1 behind
        } else {
            // leave the irrational residue plus 1
            Scalar::from_rational(c.rational_part().clone()).sub(&Scalar::one())?
        };
        if !adjust.is_zero() {
            gamma_terms.push((min_pos.clone(), adjust));
        }
    }
    let gamma_partial = Element::from_terms(order, gamma_terms)?;
    let current = ambient.sub(&scaled, &gamma_partial)?;
    let fix = current.coeff_sum()?.sub(target)?;
    if fix.is_zero() {
        return Ok(gamma_partial);
    }
    // place the correction at a submodel position above min_pos
    let spot = if sub.contains_position(min_pos) {
        order.succ(min_pos)
    } else {
        let rank = order.copy_rank(min_pos.copy_id().expect("non-submodel position is on a copy"))?;
        let above = sub
            .copies()
            .iter()
            .find(|c| order.copy_rank(c).unwrap() > rank)
            .ok_or_else(|| Error::Internal("no room for a sum correction".into()))?;
        PsiPosition::copy(above, 0)
    };
    let fix_term = Element::from_terms(order, vec![(spot, fix)])?;
    ambient.add(&gamma_partial, &fix_term)
}

fn witness_for_value(
    ambient: &Model,
    sub: &Submodel,
    alpha: &Element,
    value: &PsiPosition,
    kind: WitnessKind,
    a: &ResidueAnalysis,
) -> Result<Witness> {
    let order = ambient.order();
    let target = match kind {
        WitnessKind::Psi => Scalar::zero(),
        WitnessKind::Succ => Scalar::one(),
    };
    // s0 arises from any combination whose coefficient sum avoids the target
    if value.is_min() {
        let sum = alpha.coeff_sum()?;
        let avoid = match kind {
            WitnessKind::Psi => sum.is_zero(),
            WitnessKind::Succ => sum.is_one(),
        };
        let gamma = if avoid {
            Element::unit(PsiPosition::Omega(0))
        } else {
            Element::zero()
        };
        return Ok(Witness { kind, q: BigRational::one(), gamma });
    }
    let min_pos = order
        .pred(value)
        .ok_or_else(|| Error::Internal("value above s0 has a predecessor".into()))?;
    // external s-part witness without room: scale so the blocked sum is 1
    if !a.min_in_submodel && min_pos == a.min_pos && kind == WitnessKind::Succ && !a.has_room {
        let w = a
            .blocked_sum
            .as_rational()
            .ok_or_else(|| Error::Internal("irrational residue has no s-witness".into()))?
            .clone();
        let q = w.recip();
        let gamma = build_witness(ambient, sub, alpha, &min_pos, &target, &q)?;
        return Ok(Witness { kind, q, gamma });
    }
    let q = BigRational::one();
    let gamma = build_witness(ambient, sub, alpha, &min_pos, &target, &q)?;
    Ok(Witness { kind, q, gamma })
}

fn build_listing(
    ambient: &Model,
    sub: &Submodel,
    alpha: &Element,
    a: &ResidueAnalysis,
    result: &mut TraceResult,
    window: usize,
) -> Result<()> {
    let mut values: Vec<PsiPosition> = Vec::new();
    match &result.down {
        DownSet::UpTo(top) => match top {
            PsiPosition::Omega(n) => {
                for i in 0..=(*n).min(window as u32) {
                    values.push(PsiPosition::Omega(i));
                }
                if *n > window as u32 {
                    values.push(top.clone());
                }
            }
            PsiPosition::Copy(_, _) => {
                for i in 0..window as u32 {
                    values.push(PsiPosition::Omega(i));
                }
                if let Some(prev) = ambient.order().pred(top) {
                    if result.submodel.contains_position(&prev) && !values.contains(&prev) {
                        values.push(prev);
                    }
                }
                values.push(top.clone());
            }
        },
        DownSet::BelowCut(cut) => {
            for i in 0..window as u32 {
                values.push(PsiPosition::Omega(i));
            }
            for c in result.submodel.copies().iter().take(cut.tail_from) {
                for k in -1..=1 {
                    values.push(PsiPosition::copy(c, k));
                }
            }
        }
    }
    for v in values {
        let psi_witness = Some(witness_for_value(ambient, sub, alpha, &v, WitnessKind::Psi, a)?);
        let s_witness = Some(witness_for_value(ambient, sub, alpha, &v, WitnessKind::Succ, a)?);
        result.listing.push(TraceEntry { value: v, psi_witness, s_witness });
    }
    if let Some(e) = result.psi_external.clone() {
        let w = witness_for_value(ambient, sub, alpha, &e, WitnessKind::Psi, a)?;
        result.listing.push(TraceEntry { value: e, psi_witness: Some(w), s_witness: None });
    }
    if let Some(e) = result.s_external.clone() {
        let w = witness_for_value(ambient, sub, alpha, &e, WitnessKind::Succ, a)?;
        match result.listing.iter_mut().find(|t| t.value == e) {
            Some(entry) => entry.s_witness = Some(w),
            None => result.listing.push(TraceEntry { value: e, psi_witness: None, s_witness: Some(w) }),
        }
    }
    Ok(())
}

/// Every witness must re-evaluate to its claimed value, and every witness
/// element must come from the span.
fn verify_listing(ambient: &Model, alpha: &Element, result: &TraceResult) -> Result<()> {
    for entry in &result.listing {
        for w in [&entry.psi_witness, &entry.s_witness].into_iter().flatten() {
            if !result.submodel.contains(&w.gamma)? {
                return Err(Error::Internal(format!(
                    "witness gamma {} escapes the span",
                    w.gamma
                )));
            }
            let x = ambient.sub(&alpha.scale_rational(&w.q), &w.gamma)?;
            let got = match w.kind {
                WitnessKind::Psi => ambient.psi(&x),
                WitnessKind::Succ => ambient.s(&x)?,
            };
            if got != Element::unit(entry.value.clone()) {
                return Err(Error::Internal(format!(
                    "witness for {} evaluates to {} instead",
                    entry.value, got
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi_order::{CopyId, PsiOrder};
    use crate::scalar::Field;

    fn quad_prime() -> Model {
        Model::new(PsiOrder::prime(), Field::Quadratic(2))
    }

    #[test]
    fn sqrt2_e2_over_rational_prime() {
        // the motivating computation: trace is exactly {s0, s^2 0, s^3 0}
        let m = quad_prime();
        let s = Submodel::prime(true);
        let alpha = m.parse_element("sqrt(2)*e2").unwrap();
        let t = trace_set(&m, &s, &alpha).unwrap();
        assert_eq!(t.case(), TraceCase::Bounded);
        assert_eq!(t.down, DownSet::UpTo(PsiPosition::Omega(2)));
        assert_eq!(t.psi_external, None);
        assert_eq!(t.s_external, None);
        assert_eq!(t.render_set(), "{s0, s^2 0, s^3 0}");
    }

    #[test]
    fn copy_unit_over_prime_span() {
        // a copy generator over the prime span: the whole omega Psi-part
        // plus the external successor on the copy
        let m = Model::new(PsiOrder::with_copies(&["c0"]).unwrap(), Field::Rational);
        let s = Submodel::prime(false);
        let c0 = CopyId::new("c0");
        let alpha = m.parse_element("b[c0,0]").unwrap();
        let t = trace_set(&m, &s, &alpha).unwrap();
        assert_eq!(t.case(), TraceCase::CutWithExternal);
        assert_eq!(t.down, DownSet::BelowCut(SCut::new(0)));
        assert_eq!(t.psi_external, None, "no room and blocked sum 1 != 0");
        assert_eq!(t.s_external, Some(PsiPosition::copy(&c0, 1)));
    }

    #[test]
    fn balanced_copy_combination_gets_psi_external() {
        // blocked sum zero: the psi part reaches the external element too
        let m = Model::new(PsiOrder::with_copies(&["c0"]).unwrap(), Field::Rational);
        let s = Submodel::prime(false);
        let c0 = CopyId::new("c0");
        let alpha = m.parse_element("b[c0,1] - b[c0,0]").unwrap();
        let t = trace_set(&m, &s, &alpha).unwrap();
        assert_eq!(t.case(), TraceCase::CutWithExternal);
        assert_eq!(t.psi_external, Some(PsiPosition::copy(&c0, 1)));
        // the s side misses it: the coefficient sum is 0 for every q and
        // there is no room above to fix it, a legal one-element difference
        assert_eq!(t.s_external, None);
    }

    #[test]
    fn irrational_residue_collapses_to_s0() {
        // sqrt(2)*w2 over the rational prime: only s0 is reachable
        let m = quad_prime();
        let s = Submodel::prime(true);
        let alpha = m.parse_element("sqrt(2)*w2").unwrap();
        let t = trace_set(&m, &s, &alpha).unwrap();
        assert_eq!(t.case(), TraceCase::Bounded);
        assert_eq!(t.down, DownSet::UpTo(PsiPosition::Omega(0)));
    }

    #[test]
    fn quadratic_ambient_full_subfield_cut_only() {
        // sqrt(2)*b0 over the full-field prime span: neither side reaches
        // the external element, a genuine cut-only trace
        let m = Model::new(PsiOrder::with_copies(&["c0"]).unwrap(), Field::Quadratic(2));
        let s = Submodel::prime(false);
        let alpha = m.parse_element("sqrt(2)*b[c0,0]").unwrap();
        let t = trace_set(&m, &s, &alpha).unwrap();
        assert_eq!(t.case(), TraceCase::CutOnly);
        assert_eq!(t.down, DownSet::BelowCut(SCut::new(0)));
    }

    #[test]
    fn in_span_rejected() {
        let m = quad_prime();
        let s = Submodel::prime(false);
        let alpha = m.parse_element("sqrt(2)*e2").unwrap();
        assert_eq!(trace_set(&m, &s, &alpha).unwrap_err(), Error::InSpan);
    }

    #[test]
    fn trace_with_room_above() {
        // alpha on copy c0 while the submodel holds c1: room above exists,
        // both parts reach the external element
        let m = Model::new(PsiOrder::with_copies(&["c0", "c1"]).unwrap(), Field::Rational);
        let c0 = CopyId::new("c0");
        let c1 = CopyId::new("c1");
        let s = Submodel::new(&m, &[c1.clone()], false).unwrap();
        let alpha = m.parse_element("3*b[c0,2]").unwrap();
        let t = trace_set(&m, &s, &alpha).unwrap();
        assert_eq!(t.case(), TraceCase::CutWithExternal);
        assert_eq!(t.down, DownSet::BelowCut(SCut::new(0)));
        assert_eq!(t.psi_external, Some(PsiPosition::copy(&c0, 3)));
        assert_eq!(t.s_external, Some(PsiPosition::copy(&c0, 3)));
        // membership queries against the ambient
        assert!(t.contains(&m, &PsiPosition::Omega(10)).unwrap());
        assert!(!t.contains(&m, &PsiPosition::copy(&c1, 0)).unwrap());
        assert!(t.contains(&m, &PsiPosition::copy(&c0, 3)).unwrap());
        assert!(!t.contains(&m, &PsiPosition::copy(&c0, 2)).unwrap());
    }
}
