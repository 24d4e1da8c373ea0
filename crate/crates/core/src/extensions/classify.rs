//! The simple-extension classifier: iterates the trace computation, each
//! time adjoining the whole copy of Z that the external trace element lives
//! on, until the generator falls into the span or the trace closes up.

use crate::couple::Model;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::extensions::submodel::Submodel;
use crate::extensions::trace::{trace_set, TraceCase};
use crate::psi_order::{CopyId, PsiPosition, SCut};

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    /// The generator lies in the final span.
    InSpan,
    /// The final span plus rational multiples of the generator is closed.
    SpanPlusQAlpha,
    /// Bounded pseudolimit data ran out while the trace still pointed
    /// outward; the true extension continues through infinitely many cuts.
    OmegaLimit,
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Terminal::InSpan => write!(f, "in-span"),
            Terminal::SpanPlusQAlpha => write!(f, "span-plus-q-alpha"),
            Terminal::OmegaLimit => write!(f, "omega-limit"),
        }
    }
}

/// One classifier step: the external element seen, and the copy adjoined
/// with its s-cut over the original submodel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionStep {
    pub external: PsiPosition,
    pub copy: CopyId,
    pub base_cut: SCut,
}

#[derive(Debug, Clone)]
pub struct ExtensionReport {
    pub steps: Vec<ExtensionStep>,
    pub terminal: Terminal,
    pub final_submodel: Submodel,
}

impl ExtensionReport {
    pub fn cut_list(&self) -> Vec<SCut> {
        self.steps.iter().map(|s| s.base_cut).collect()
    }
}

impl fmt::Display for ExtensionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "adjoined")?;
        if self.steps.is_empty() {
            write!(f, " nothing")?;
        }
        for s in &self.steps {
            write!(f, " {}@{}", s.copy, s.base_cut)?;
        }
        write!(f, "; terminal {}", self.terminal)
    }
}

/// Classifies the extension generated by `alpha` over the span of `sub`.
pub fn classify_simple_extension(
    ambient: &Model,
    sub: &Submodel,
    alpha: &Element,
) -> Result<ExtensionReport> {
    let mut current = sub.clone();
    let mut steps: Vec<ExtensionStep> = Vec::new();
    // each outward step consumes a fresh ambient copy, so this terminates
    for _ in 0..=ambient.order().copy_count() {
        if current.contains(alpha)? {
            return Ok(ExtensionReport { steps, terminal: Terminal::InSpan, final_submodel: current });
        }
        let trace = trace_set(ambient, &current, alpha)?;
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
                    .ok_or_else(|| Error::Internal("external element off the omega part".into()))?
                    .clone();
                let base_cut = sub.cut_below(ambient, &external)?;
                if let Some(last) = steps.last() {
                    if base_cut < last.base_cut {
                        return Err(Error::Internal("classifier cuts decreased".into()));
                    }
                }
                current = current.with_copy(ambient, &copy)?;
                steps.push(ExtensionStep { external, copy, base_cut });
            }
        }
    }
    Err(Error::Internal("classifier failed to terminate".into()))
}

/// Recovers the copies touched by a primitive element `alpha = gamma + sum
/// of per-copy combinations`, by repeatedly exposing the least copy through
/// the s and psi formulas and stripping its contribution.
pub fn primitive_strip(ambient: &Model, sub: &Submodel, alpha: &Element) -> Result<Vec<CopyId>> {
    if sub.contains(alpha)? {
        return Err(Error::InSpan);
    }
    for p in sub.uncancellable_positions(alpha)? {
        let on_outside_copy = p.copy_id().map(|c| !sub.contains_copy(c)).unwrap_or(false);
        if !on_outside_copy {
            return Err(Error::BadElement(
                "not of the form: span element plus combinations of outside copies".into(),
            ));
        }
    }
    let mut copies = Vec::new();
    // the base part never matters: replace alpha with alpha - gamma
    let mut residue = ambient.sub(alpha, &sub.truncate(ambient, alpha)?)?;
    while !residue.is_zero() {
        let q = residue.coeff_sum()?;
        let exposed = if q.is_zero() {
            ambient.psi(&residue)
        } else {
            let normalized = residue.scale(&q.inverse()?)?;
            ambient.s(&normalized)?
        };
        let pos = exposed
            .as_psi_member()
            .ok_or_else(|| Error::Internal("exposed value is not a Psi member".into()))?;
        let copy = pos
            .copy_id()
            .ok_or_else(|| Error::Internal("exposed value not on a copy".into()))?
            .clone();
        copies.push(copy.clone());
        residue = residue.filter_terms(|p| p.copy_id() != Some(&copy));
    }
    // sanity: the submodel plus the recovered copies spans alpha
    let mut span = sub.clone();
    for c in &copies {
        span = span.with_copy(ambient, c)?;
    }
    if !span.contains(alpha)? {
        return Err(Error::Internal("stripped copies do not span the element".into()));
    }
    Ok(copies)
}

/// The algebraic closure of `span(sub) + x`: the classifier's final span,
/// together with a flag recording whether rational multiples of `x` had to
/// be adjoined on top of it.
#[derive(Debug, Clone)]
pub struct AclResult {
    pub submodel: Submodel,
    pub generator: Option<Element>,
}

impl AclResult {
    /// Membership in the closure.
    pub fn contains(&self, ambient: &Model, y: &Element) -> Result<bool> {
        if self.submodel.contains(y)? {
            return Ok(true);
        }
        let x = match &self.generator {
            Some(x) => x,
            None => return Ok(false),
        };
        // y = gamma + q x demands the coefficient ratio at any uncancellable
        // position of x, and that ratio must be rational
        let res_x = ambient.sub(x, &self.submodel.truncate(ambient, x)?)?;
        let res_y = ambient.sub(y, &self.submodel.truncate(ambient, y)?)?;
        let p = match res_x.min_position() {
            Some(p) => p.clone(),
            None => return Ok(false),
        };
        let cx = res_x.coeff_at(&p).expect("min position has a coefficient");
        let cy = match res_y.coeff_at(&p) {
            Some(c) => c,
            None => return Ok(false),
        };
        let ratio = cy.div(cx)?;
        let q = match ratio.as_rational() {
            Some(q) => q.clone(),
            None => return Ok(false),
        };
        let diff = ambient.sub(y, &x.scale_rational(&q))?;
        self.submodel.contains(&diff)
    }
}

pub fn acl_generate(ambient: &Model, sub: &Submodel, x: &Element) -> Result<AclResult> {
    if sub.contains(x)? {
        return Ok(AclResult { submodel: sub.clone(), generator: None });
    }
    let report = classify_simple_extension(ambient, sub, x)?;
    let generator = match report.terminal {
        Terminal::InSpan => None,
        _ => Some(x.clone()),
    };
    Ok(AclResult { submodel: report.final_submodel, generator })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi_order::PsiOrder;
    use crate::scalar::Field;

    fn two_copy() -> Model {
        Model::new(PsiOrder::with_copies(&["c0", "c1"]).unwrap(), Field::Rational)
    }

    #[test]
    fn sqrt2_e2_is_already_group_closed() {
        let m = Model::new(PsiOrder::prime(), Field::Quadratic(2));
        let s = Submodel::prime(true);
        let alpha = m.parse_element("sqrt(2)*e2").unwrap();
        let r = classify_simple_extension(&m, &s, &alpha).unwrap();
        assert!(r.steps.is_empty());
        assert_eq!(r.terminal, Terminal::SpanPlusQAlpha);
    }

    #[test]
    fn copy_difference_needs_one_copy() {
        let m = two_copy();
        let s = Submodel::prime(false);
        let alpha = m.parse_element("b[c0,1] - b[c0,0]").unwrap();
        let r = classify_simple_extension(&m, &s, &alpha).unwrap();
        assert_eq!(r.terminal, Terminal::InSpan);
        assert_eq!(r.steps.len(), 1);
        assert_eq!(r.steps[0].copy, CopyId::new("c0"));
        assert_eq!(r.steps[0].base_cut, SCut::new(0));
    }

    #[test]
    fn primitive_strip_examples() {
        let m = two_copy();
        let s = Submodel::prime(false);
        // both copies touched, in order
        let alpha = m.parse_element("b[c0,1] - b[c0,0] + b[c1,1] - b[c1,0]").unwrap();
        assert_eq!(
            primitive_strip(&m, &s, &alpha).unwrap(),
            vec![CopyId::new("c0"), CopyId::new("c1")]
        );
        // a single unit
        let beta = m.parse_element("b[c0,0]").unwrap();
        assert_eq!(primitive_strip(&m, &s, &beta).unwrap(), vec![CopyId::new("c0")]);
        // base part ignored
        let mixed = m.parse_element("5*e3 + b[c1,2]").unwrap();
        assert_eq!(primitive_strip(&m, &s, &mixed).unwrap(), vec![CopyId::new("c1")]);
    }

    #[test]
    fn steinitz_exchange_fails() {
        let m = two_copy();
        let s = Submodel::prime(false);
        let a = m.parse_element("b[c0,0]").unwrap();
        let b = m.parse_element("b[c0,0] + b[c1,0]").unwrap();
        let acl_b = acl_generate(&m, &s, &b).unwrap();
        let acl_a = acl_generate(&m, &s, &a).unwrap();
        assert!(acl_b.contains(&m, &a).unwrap(), "a recoverable from b");
        assert!(!acl_a.contains(&m, &b).unwrap(), "b not recoverable from a");
    }

    #[test]
    fn acl_adjoins_both_copies_for_the_sum() {
        let m = two_copy();
        let s = Submodel::prime(false);
        let b = m.parse_element("b[c0,0] + b[c1,0]").unwrap();
        let acl_b = acl_generate(&m, &s, &b).unwrap();
        assert_eq!(acl_b.submodel.copies(), &[CopyId::new("c0"), CopyId::new("c1")]);
        assert!(acl_b.generator.is_none());
    }
}
