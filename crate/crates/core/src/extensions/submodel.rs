//! Finite descriptions of submodels of an ambient model: the omega part is
//! always included, copies are taken whole, and the coefficient field may be
//! restricted to the rationals inside a quadratic ambient. This guarantees
//! closure under s, p, psi and division, so a span is itself a model.

use crate::couple::Model;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::psi_order::{CopyId, PsiOrder, PsiPosition, SCut};
use crate::scalar::Field;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Submodel {
    /// Selected copies, in ambient order.
    copies: Vec<CopyId>,
    /// Restrict coefficients to the rationals inside a quadratic ambient.
    rational_only: bool,
}

impl Submodel {
    pub fn new(ambient: &Model, copies: &[CopyId], rational_only: bool) -> Result<Submodel> {
        let mut ranked: Vec<(usize, CopyId)> = Vec::new();
        for c in copies {
            let r = ambient.order().copy_rank(c)?;
            if ranked.iter().any(|(_, d)| d == c) {
                return Err(Error::DuplicateCopy(c.0.clone()));
            }
            ranked.push((r, c.clone()));
        }
        ranked.sort_by_key(|(r, _)| *r);
        Ok(Submodel { copies: ranked.into_iter().map(|(_, c)| c).collect(), rational_only })
    }

    /// The prime submodel: omega part only, optionally rationals-only.
    pub fn prime(rational_only: bool) -> Submodel {
        Submodel { copies: Vec::new(), rational_only }
    }

    pub fn copies(&self) -> &[CopyId] {
        &self.copies
    }

    pub fn rational_only(&self) -> bool {
        self.rational_only
    }

    pub fn contains_copy(&self, id: &CopyId) -> bool {
        self.copies.contains(id)
    }

    pub fn contains_position(&self, pos: &PsiPosition) -> bool {
        match pos {
            PsiPosition::Omega(_) => true,
            PsiPosition::Copy(id, _) => self.contains_copy(id),
        }
    }

    /// Whether a coefficient is expressible inside the submodel's field.
    pub fn admits_scalar(&self, s: &crate::scalar::Scalar) -> bool {
        !self.rational_only || s.is_rational()
    }

    /// Span membership: support inside the selected positions with
    /// admissible coefficients.
    pub fn contains(&self, x: &Element) -> Result<bool> {
        let terms = x.terms()?;
        Ok(terms
            .iter()
            .all(|(p, s)| self.contains_position(p) && self.admits_scalar(s)))
    }

    /// The span as a model in its own right. Psi positions keep their
    /// ambient identities.
    pub fn as_model(&self, ambient: &Model) -> Result<Model> {
        let mut copies = Vec::new();
        for c in ambient.order().copies() {
            if self.contains_copy(c) {
                copies.push(c.0.as_str());
            }
        }
        let order = PsiOrder::with_copies(
            &copies.iter().map(|s| &**s).collect::<Vec<_>>(),
        )?;
        let field = if self.rational_only { Field::Rational } else { ambient.field() };
        Ok(Model::new(order, field))
    }

    /// The part of an element reachable from the submodel: coefficients at
    /// selected positions, restricted to the rational part when the subfield
    /// is rational. Subtracting it from the element leaves exactly the
    /// uncancellable residue.
    pub fn truncate(&self, ambient: &Model, x: &Element) -> Result<Element> {
        let terms = x.terms()?;
        let mut kept = Vec::new();
        for (p, s) in terms {
            if !self.contains_position(p) {
                continue;
            }
            if self.admits_scalar(s) {
                kept.push((p.clone(), s.clone()));
            } else {
                let rat = crate::scalar::Scalar::from_rational(s.rational_part().clone());
                if !rat.is_zero() {
                    kept.push((p.clone(), rat));
                }
            }
        }
        Element::from_terms(ambient.order(), kept)
    }

    /// Positions of the support that no span element can cancel: positions
    /// outside the submodel, plus positions with an irrational coefficient
    /// under a rational subfield.
    pub fn uncancellable_positions(&self, x: &Element) -> Result<Vec<PsiPosition>> {
        let terms = x.terms()?;
        Ok(terms
            .iter()
            .filter(|(p, s)| !self.contains_position(p) || !self.admits_scalar(s))
            .map(|(p, _)| p.clone())
            .collect())
    }

    /// Number of selected copies lying strictly below the given ambient
    /// position, i.e. the submodel-relative s-cut determined by it.
    pub fn cut_below(&self, ambient: &Model, pos: &PsiPosition) -> Result<SCut> {
        let mut n = 0;
        for c in &self.copies {
            let probe = PsiPosition::copy(c, 0);
            match ambient.order().s_class_relation(&probe, pos)? {
                crate::psi_order::SClassRelation::MuchBelow => n += 1,
                _ => break,
            }
        }
        Ok(SCut::new(n))
    }

    /// Extends the submodel by one ambient copy.
    pub fn with_copy(&self, ambient: &Model, id: &CopyId) -> Result<Submodel> {
        let mut copies = self.copies.clone();
        copies.push(id.clone());
        Submodel::new(ambient, &copies, self.rational_only)
    }
}

impl fmt::Display for Submodel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "submodel(copies")?;
        for c in &self.copies {
            write!(f, " {c}")?;
        }
        if self.rational_only {
            write!(f, ", rational only")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi_order::PsiOrder;

    fn ambient() -> Model {
        Model::new(PsiOrder::with_copies(&["c0", "c1"]).unwrap(), Field::Quadratic(2))
    }

    #[test]
    fn membership_examples() {
        let m = ambient();
        let s = Submodel::prime(true);
        let e5 = m.parse_element("e5").unwrap();
        assert!(s.contains(&e5).unwrap());
        let irr = m.parse_element("sqrt(2)*e2").unwrap();
        assert!(!s.contains(&irr).unwrap());
        let full = Submodel::prime(false);
        assert!(full.contains(&irr).unwrap());
        let b = m.parse_element("b[c0,0]").unwrap();
        assert!(!s.contains(&b).unwrap());
    }

    #[test]
    fn truncation_splits_off_residue() {
        let m = ambient();
        let s = Submodel::prime(true);
        let x = m.parse_element("(1+sqrt(2))*e0 + b[c0,0] - 3*e2").unwrap();
        let t = s.truncate(&m, &x).unwrap();
        assert!(s.contains(&t).unwrap());
        let residue = m.sub(&x, &t).unwrap();
        let un = s.uncancellable_positions(&x).unwrap();
        for (p, _) in residue.terms().unwrap() {
            assert!(un.contains(p));
        }
    }

    #[test]
    fn cut_below_counts_lower_copies() {
        let m = ambient();
        let c0 = CopyId::new("c0");
        let c1 = CopyId::new("c1");
        let s = Submodel::new(&m, &[c0.clone(), c1.clone()], false).unwrap();
        assert_eq!(s.cut_below(&m, &PsiPosition::Omega(3)).unwrap(), SCut::new(0));
        assert_eq!(s.cut_below(&m, &PsiPosition::copy(&c1, -5)).unwrap(), SCut::new(1));
        let only_c1 = Submodel::new(&m, &[c1.clone()], false).unwrap();
        assert_eq!(only_c1.cut_below(&m, &PsiPosition::copy(&c0, 0)).unwrap(), SCut::new(0));
    }

    #[test]
    fn span_as_model() {
        let m = ambient();
        let c1 = CopyId::new("c1");
        let s = Submodel::new(&m, &[c1.clone()], true).unwrap();
        let span = s.as_model(&m).unwrap();
        assert_eq!(span.field(), Field::Rational);
        assert_eq!(span.order().copies(), &[c1]);
    }
}
