//! Pseudocauchy sequences and the structure adjoining a pseudolimit.
//!
//! A pseudolimit query `psi(q*L - gamma)` resolves by walking the sequence
//! until the approximant difference drops below the prescribed increment
//! `v_N = psi(L - a_N)`; from there the finite-support part dominates and
//! the ambient model answers. Traces over a submodel reduce to the traces
//! of the approximants, which is what drives the omega-length case of the
//! extension classifier.

use crate::couple::Model;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::extensions::classify::{ExtensionReport, ExtensionStep, Terminal};
use crate::extensions::submodel::Submodel;
use crate::extensions::trace::{trace_set, DownSet, TraceCase, TraceResult};
use crate::psi_order::{CopyId, PsiPosition, SClass, SCut};
use crate::scalar::Scalar;
use num::rational::BigRational;
use num::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

type TermFn = Box<dyn Fn(usize) -> Option<Element>>;
type IncrementFn = Box<dyn Fn(usize) -> Option<PsiPosition>>;
type SignFn = Box<dyn Fn(usize) -> i32>;

/// Generator data of a pc-sequence with prescribed pseudolimit behaviour:
/// the terms `a_N`, the increments `v_N = psi(L - a_N)` (strictly
/// increasing Psi members), and the signs of `L - a_N`.
pub struct PseudolimitSpec {
    pub terms: TermFn,
    pub increments: IncrementFn,
    pub signs: SignFn,
    pub max_index: usize,
}

impl fmt::Debug for PseudolimitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PseudolimitSpec(max_index {})", self.max_index)
    }
}

impl PseudolimitSpec {
    /// The harmonic family `a_N = sum_{i<=N} e_i/(1+i)` with increments
    /// walking up the omega ladder.
    pub fn harmonic(max_index: usize) -> PseudolimitSpec {
        PseudolimitSpec {
            terms: Box::new(|n| {
                let coords: Vec<Scalar> = (0..=n)
                    .map(|i| Scalar::ratio(1, (1 + i) as i64))
                    .collect();
                Some(Element::from_omega_vector(&coords).expect("omega vector"))
            }),
            increments: Box::new(|n| Some(PsiPosition::Omega(n as u32 + 1))),
            signs: Box::new(|_| 1),
            max_index,
        }
    }

    /// The copy-ladder family `a_n = sum_{j<=n} (b[c_j,1] - b[c_j,0])` over
    /// the listed copies, with increments `v_n = b[c_{n+1},1]`.
    pub fn copy_ladder(copies: Vec<CopyId>) -> PseudolimitSpec {
        let for_terms = copies.clone();
        let for_incr = copies.clone();
        let max_index = copies.len().saturating_sub(2);
        PseudolimitSpec {
            terms: Box::new(move |n| {
                if n >= for_terms.len() {
                    return None;
                }
                let mut terms = Vec::new();
                for c in for_terms.iter().take(n + 1) {
                    terms.push((PsiPosition::copy(c, 0), Scalar::one().neg()));
                    terms.push((PsiPosition::copy(c, 1), Scalar::one()));
                }
                Some(Element::Fin(terms))
            }),
            increments: Box::new(move |n| {
                for_incr.get(n + 1).map(|c| PsiPosition::copy(c, 1))
            }),
            signs: Box::new(|_| 1),
            max_index,
        }
    }
}

/// Report of a pc-sequence validation over an index prefix.
#[derive(Debug, Clone)]
pub struct PcReport {
    pub checked_upto: usize,
    pub violations: Vec<String>,
    /// All mutual values `psi(a_r - a_s)` for `r < s` in the prefix.
    pub values: Vec<(usize, usize, PsiPosition)>,
}

impl PcReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Validates the defining pc inequality and the increment prescription on
/// the first `upto + 1` terms.
pub fn pc_check(ambient: &Model, spec: &PseudolimitSpec, upto: usize) -> Result<PcReport> {
    let upto = upto.min(spec.max_index);
    let mut terms: Vec<Element> = Vec::new();
    for n in 0..=upto {
        match (spec.terms)(n) {
            Some(t) => {
                ambient.admit(&t)?;
                terms.push(t);
            }
            None => break,
        }
    }
    let mut violations = Vec::new();
    let mut values = Vec::new();
    for r in 0..terms.len() {
        for s in (r + 1)..terms.len() {
            let d = ambient.sub(&terms[r], &terms[s])?;
            if d.is_zero() {
                violations.push(format!("terms {r} and {s} coincide"));
                continue;
            }
            let v = ambient.psi(&d);
            let pos = v.as_psi_member().expect("psi of nonzero").clone();
            if s == r + 1 {
                if let Some(expect) = (spec.increments)(r) {
                    if pos != expect {
                        violations.push(format!(
                            "psi(a_{r} - a_{s}) = {pos} but the prescribed increment is {expect}"
                        ));
                    }
                }
            }
            values.push((r, s, pos));
        }
    }
    // psi(a_r - a_s) < psi(a_s - a_t) for r < s < t
    for r in 0..terms.len() {
        for s in (r + 1)..terms.len() {
            for t in (s + 1)..terms.len() {
                let d1 = ambient.sub(&terms[r], &terms[s])?;
                let d2 = ambient.sub(&terms[s], &terms[t])?;
                let v1 = ambient.psi(&d1);
                let v2 = ambient.psi(&d2);
                if ambient.cmp_elems(&v1, &v2)? != Ordering::Less {
                    violations.push(format!(
                        "pc inequality fails at {r} < {s} < {t}: {v1} !< {v2}"
                    ));
                }
            }
        }
    }
    Ok(PcReport { checked_upto: upto, violations, values })
}

/// The extension adjoining a pseudolimit of the sequence to the ambient
/// model. Supports exact sign and psi queries for `q*L - gamma`.
pub struct Pseudolimit {
    ambient: Model,
    spec: PseudolimitSpec,
}

impl Pseudolimit {
    pub fn adjoin(ambient: &Model, spec: PseudolimitSpec) -> Result<Pseudolimit> {
        let prefix = pc_check(ambient, &spec, spec.max_index.min(4))?;
        if !prefix.ok() {
            return Err(Error::BadPseudolimit(prefix.violations.join("; ")));
        }
        Ok(Pseudolimit { ambient: ambient.clone(), spec })
    }

    pub fn ambient(&self) -> &Model {
        &self.ambient
    }

    pub fn spec(&self) -> &PseudolimitSpec {
        &self.spec
    }

    fn term(&self, n: usize) -> Result<Element> {
        (self.spec.terms)(n).ok_or(Error::Unstabilized)
    }

    fn increment(&self, n: usize) -> Result<PsiPosition> {
        (self.spec.increments)(n).ok_or(Error::Unstabilized)
    }

    /// `psi(q*L - gamma)`, resolved by stabilization; the optional bound
    /// caps how far the sequence is walked.
    pub fn psi_of(&self, q: &BigRational, gamma: &Element) -> Result<Element> {
        self.psi_of_bounded(q, gamma, self.spec.max_index)
    }

    pub fn psi_of_bounded(
        &self,
        q: &BigRational,
        gamma: &Element,
        bound: usize,
    ) -> Result<Element> {
        if q.is_zero() {
            return Ok(self.ambient.psi(&gamma.neg()));
        }
        let target = gamma.scale_rational(&q.recip());
        for n in 0..=bound.min(self.spec.max_index) {
            let a = self.term(n)?;
            let d = self.ambient.sub(&a, &target)?;
            let v = Element::unit(self.increment(n)?);
            if d.is_zero() {
                return Ok(v);
            }
            let t = self.ambient.psi(&d);
            if self.ambient.cmp_elems(&t, &v)? == Ordering::Less {
                return Ok(t);
            }
        }
        Err(Error::Unstabilized)
    }

    /// Sign of `q*L - gamma`.
    pub fn sign_of(&self, q: &BigRational, gamma: &Element) -> Result<i32> {
        if q.is_zero() {
            return gamma.neg().sign();
        }
        let qsign = if num::Signed::is_positive(q) { 1 } else { -1 };
        let target = gamma.scale_rational(&q.recip());
        for n in 0..=self.spec.max_index {
            let a = self.term(n)?;
            let d = self.ambient.sub(&a, &target)?;
            if d.is_zero() {
                return Ok(qsign * (self.spec.signs)(n));
            }
            let v = Element::unit(self.increment(n)?);
            let t = self.ambient.psi(&d);
            if self.ambient.cmp_elems(&t, &v)? == Ordering::Less {
                // the approximant difference dominates the limit tail
                return Ok(qsign * d.sign()?);
            }
        }
        Err(Error::Unstabilized)
    }

    /// Trace of the pseudolimit over a submodel span, derived from the
    /// approximant traces. The listing is left empty; pseudolimit values
    /// are checked by direct sampling rather than stored witnesses.
    pub fn trace_over(&self, sub: &Submodel) -> Result<TraceResult> {
        let mut last_internal: Option<(usize, PsiPosition)> = None;
        for n in 0..=self.spec.max_index {
            let a = match (self.spec.terms)(n) {
                Some(a) => a,
                None => break,
            };
            let v = match (self.spec.increments)(n) {
                Some(v) => v,
                None => break,
            };
            if sub.contains(&a)? {
                if sub.contains_position(&v) {
                    last_internal = Some((n, v));
                    continue;
                }
                // the increment itself escapes: external element v
                let cut = sub.cut_below(&self.ambient, &v)?;
                return Ok(TraceResult {
                    submodel: sub.clone(),
                    down: DownSet::BelowCut(cut),
                    psi_external: Some(v.clone()),
                    s_external: Some(v),
                    listing: Vec::new(),
                });
            }
            // approximant out of span: its trace is the limit's trace once
            // its reach falls below the increment
            let t = trace_set(&self.ambient, sub, &a)?;
            let reach = match (&t.down, t.external()) {
                (_, Some(e)) => e.clone(),
                (DownSet::UpTo(p), None) => p.clone(),
                (DownSet::BelowCut(_), None) => {
                    return Err(Error::BadPseudolimit(
                        "approximant trace has no reachable top".into(),
                    ))
                }
            };
            if self.ambient.order().cmp_pos(&reach, &v)? == Ordering::Less {
                return Ok(t);
            }
        }
        // every term stayed in the span with internal increments: the trace
        // closes downward under the settled class of the increments
        let (n_last, v_last) = last_internal.ok_or(Error::Unstabilized)?;
        let class = SClass::of(&v_last);
        // require the class to have settled over a confirmation window
        let window = 3usize;
        for k in 0..window {
            if let Some(m) = n_last.checked_sub(k) {
                if let Some(v) = (self.spec.increments)(m) {
                    if SClass::of(&v) != class {
                        return Err(Error::BadPseudolimit(
                            "increment class still moving at the index bound".into(),
                        ));
                    }
                }
            }
        }
        let cut = match &class {
            SClass::OmegaPart => SCut::new(0),
            SClass::Copy(id) => {
                let r = self.ambient.order().copy_rank(id)?;
                let mut n = 0;
                for c in sub.copies() {
                    if self.ambient.order().copy_rank(c)? <= r {
                        n += 1;
                    }
                }
                SCut::new(n)
            }
        };
        Ok(TraceResult {
            submodel: sub.clone(),
            down: DownSet::BelowCut(cut),
            psi_external: None,
            s_external: None,
            listing: Vec::new(),
        })
    }

    /// Classifies the simple extension generated by the pseudolimit over a
    /// submodel: outward steps adjoin whole copies, and exhausting the
    /// generator data signals the omega-length case.
    pub fn classify_over(&self, sub: &Submodel) -> Result<ExtensionReport> {
        let mut current = sub.clone();
        let mut steps: Vec<ExtensionStep> = Vec::new();
        for _ in 0..=self.ambient.order().copy_count() {
            let trace = match self.trace_over(&current) {
                Ok(t) => t,
                Err(Error::Unstabilized) | Err(Error::BadPseudolimit(_)) => {
                    return Ok(ExtensionReport {
                        steps,
                        terminal: Terminal::OmegaLimit,
                        final_submodel: current,
                    });
                }
                Err(e) => return Err(e),
            };
            match trace.case() {
                TraceCase::Bounded | TraceCase::CutOnly => {
                    return Ok(ExtensionReport {
                        steps,
                        terminal: Terminal::SpanPlusQAlpha,
                        final_submodel: current,
                    });
                }
                TraceCase::CutWithExternal => {
                    let external = trace.external().expect("external case").clone();
                    let copy = external
                        .copy_id()
                        .ok_or_else(|| Error::Internal("external off the omega part".into()))?
                        .clone();
                    let base_cut = sub.cut_below(&self.ambient, &external)?;
                    current = current.with_copy(&self.ambient, &copy)?;
                    steps.push(ExtensionStep { external, copy, base_cut });
                }
            }
        }
        Ok(ExtensionReport { steps, terminal: Terminal::OmegaLimit, final_submodel: current })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi_order::PsiOrder;
    use crate::scalar::Field;

    #[test]
    fn harmonic_mutual_values() {
        // psi(a_0 - a_1) = e0 + e1 exactly
        let m = Model::prime();
        let spec = PseudolimitSpec::harmonic(24);
        let a0 = (spec.terms)(0).unwrap();
        let a1 = (spec.terms)(1).unwrap();
        let d = m.sub(&a0, &a1).unwrap();
        assert_eq!(m.psi(&d), m.parse_element("e0 + e1").unwrap());
        let report = pc_check(&m, &spec, 8).unwrap();
        assert!(report.ok(), "{:?}", report.violations);
    }

    #[test]
    fn harmonic_limit_values() {
        let m = Model::prime();
        let lim = Pseudolimit::adjoin(&m, PseudolimitSpec::harmonic(24)).unwrap();
        // psi(L - a_N) is the prescribed increment
        for n in 0..8usize {
            let a = (lim.spec().terms)(n).unwrap();
            let one = BigRational::one();
            let v = lim.psi_of(&one, &a).unwrap();
            assert_eq!(v, Element::unit(PsiPosition::Omega(n as u32 + 1)));
        }
        // random-ish gamma: values stay inside the prime Psi set
        let gamma = m.parse_element("3*e0 - 1/2*e2 + e5").unwrap();
        let v = lim.psi_of(&BigRational::one(), &gamma).unwrap();
        assert!(v.as_psi_member().is_some());
        // the limit sits above every approximant
        let sign = lim.sign_of(&BigRational::one(), &(lim.spec().terms)(3).unwrap()).unwrap();
        assert_eq!(sign, 1);
    }

    #[test]
    fn harmonic_trace_is_the_whole_psi_set() {
        let m = Model::prime();
        let lim = Pseudolimit::adjoin(&m, PseudolimitSpec::harmonic(24)).unwrap();
        let sub = Submodel::prime(false);
        let t = lim.trace_over(&sub).unwrap();
        assert_eq!(t.case(), TraceCase::CutOnly);
        assert_eq!(t.down, DownSet::BelowCut(SCut::new(0)));
        let r = lim.classify_over(&sub).unwrap();
        assert!(r.steps.is_empty());
        assert_eq!(r.terminal, Terminal::SpanPlusQAlpha);
    }

    #[test]
    fn copy_ladder_steps_through_every_copy() {
        let names: Vec<String> = (0..4).map(|i| format!("c{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let m = Model::new(PsiOrder::with_copies(&refs).unwrap(), Field::Rational);
        let copies: Vec<CopyId> = m.order().copies().to_vec();
        let spec = PseudolimitSpec::copy_ladder(copies.clone());
        let report = pc_check(&m, &spec, 2).unwrap();
        assert!(report.ok(), "{:?}", report.violations);
        let lim = Pseudolimit::adjoin(&m, spec).unwrap();
        let r = lim.classify_over(&Submodel::prime(false)).unwrap();
        assert_eq!(r.terminal, Terminal::OmegaLimit);
        assert_eq!(r.steps.len(), 4, "every copy adjoined: {r}");
        for (i, s) in r.steps.iter().enumerate() {
            assert_eq!(s.copy, copies[i]);
            assert_eq!(s.base_cut, SCut::new(0));
        }
    }
}
