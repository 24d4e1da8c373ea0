//! A finitely presented model of the theory of the asymptotic couple of
//! logarithmic transseries: the group of finitely supported vectors over a
//! [`PsiOrder`] together with the maps psi, s, p, the integral, the
//! contraction, and the archimedean class comparison.
//!
//! The closed forms follow from the summation rule: for support
//! `a_1 < ... < a_n` in Psi with coefficients `q_j` and `Q = sum q_j`,
//!
//! * `psi(x) = s0` when `Q != 0`, and `s(a_1)` when `Q = 0`;
//! * `s(x) = s(a_1)` when `Q = 1`, and `s0` otherwise,
//!
//! where `s` on a Psi member is the immediate successor of its position.

use crate::element::Element;
use crate::error::{Error, Result};
use crate::psi_order::{PsiOrder, PsiPosition};
use crate::scalar::{Field, Scalar};
use num::rational::BigRational;
use num::BigInt;
use std::cmp::Ordering;
use std::fmt;

/// A finitely presented model: the Psi index order plus the coefficient field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    order: PsiOrder,
    field: Field,
}

impl Model {
    pub fn new(order: PsiOrder, field: Field) -> Model {
        Model { order, field }
    }

    /// The prime model: omega-type Psi set over the rationals.
    pub fn prime() -> Model {
        Model::new(PsiOrder::prime(), Field::Rational)
    }

    pub fn order(&self) -> &PsiOrder {
        &self.order
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Checks that an element belongs to this model: known positions and
    /// coefficients from the model's field.
    pub fn admit(&self, x: &Element) -> Result<()> {
        if let Ok(terms) = x.terms() {
            for (p, s) in terms {
                self.order.validate(p)?;
                if !self.field.admits(s) {
                    return Err(Error::FieldMismatch);
                }
            }
        }
        Ok(())
    }

    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let x = crate::element::parse_element(text, &self.order)?;
        self.admit(&x)?;
        Ok(x)
    }

    // ---- group operations (infinity absorbs) ----

    pub fn add(&self, x: &Element, y: &Element) -> Result<Element> {
        x.add_in(y, &self.order)
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Result<Element> {
        x.sub_in(y, &self.order)
    }

    pub fn neg(&self, x: &Element) -> Element {
        x.neg()
    }

    pub fn scale(&self, s: &Scalar, x: &Element) -> Result<Element> {
        if !self.field.admits(s) {
            return Err(Error::FieldMismatch);
        }
        x.scale(s)
    }

    pub fn scale_rational(&self, q: &BigRational, x: &Element) -> Element {
        x.scale_rational(q)
    }

    /// Division by a positive natural, the interpretation of `delta_n`.
    pub fn div_nat(&self, n: u32, x: &Element) -> Result<Element> {
        if n == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(x.scale_rational(&BigRational::new(BigInt::from(1), BigInt::from(n))))
    }

    // ---- order ----

    pub fn sign(&self, x: &Element) -> Result<i32> {
        x.sign()
    }

    pub fn cmp_elems(&self, x: &Element, y: &Element) -> Result<Ordering> {
        let d = self.sub(x, y)?;
        Ok(crate::scalar::sign_to_ordering(d.sign()?))
    }

    pub fn is_positive(&self, x: &Element) -> Result<bool> {
        Ok(self.sign(x)? > 0)
    }

    // ---- the psi map and its companions ----

    /// `s^{n+1} 0` as an element.
    pub fn s_zero(&self) -> Element {
        Element::unit(PsiPosition::Omega(0))
    }

    /// Total psi map with the infinity default: `psi(0) = psi(inf) = inf`.
    pub fn psi(&self, x: &Element) -> Element {
        let terms = match x.terms() {
            Err(_) => return Element::Inf,
            Ok(t) if t.is_empty() => return Element::Inf,
            Ok(t) => t,
        };
        let q: Scalar = x.coeff_sum().expect("mixed fields inside an element");
        if q.sign() != 0 {
            self.s_zero()
        } else {
            Element::unit(self.order.succ(&terms[0].0))
        }
    }

    /// Successor function `s(x) = psi(int x)`; undefined on infinity.
    pub fn s(&self, x: &Element) -> Result<Element> {
        let terms = x.terms()?;
        if terms.is_empty() {
            return Ok(self.s_zero());
        }
        let q = x.coeff_sum()?;
        if q.is_one() {
            Ok(Element::unit(self.order.succ(&terms[0].0)))
        } else {
            Ok(self.s_zero())
        }
    }

    /// Inverse of `s` on `Psi^{> s0}`, with the infinity default elsewhere.
    pub fn p(&self, x: &Element) -> Element {
        match x.as_psi_member() {
            Some(pos) if !pos.is_min() => match self.order.pred(pos) {
                Some(prev) => Element::unit(prev),
                None => Element::Inf,
            },
            _ => Element::Inf,
        }
    }

    /// `int x = x - s(x)`, the inverse of the map `y -> y + psi(y)`.
    pub fn integral(&self, x: &Element) -> Element {
        match self.s(x) {
            Err(_) => Element::Inf,
            Ok(sx) => self.sub(x, &sx).expect("finite subtraction"),
        }
    }

    /// Contraction `chi(x) = int psi(x)` on the negatives; infinity elsewhere.
    pub fn chi(&self, x: &Element) -> Element {
        match x.sign() {
            Ok(s) if s < 0 => self.integral(&self.psi(x)),
            _ => Element::Inf,
        }
    }

    /// `x dagger = psi(x)`.
    pub fn dagger(&self, x: &Element) -> Element {
        self.psi(x)
    }

    /// `x prime = x + psi(x)`; infinity absorbs (so `0' = inf`).
    pub fn prime_of(&self, x: &Element) -> Element {
        self.add(x, &self.psi(x)).expect("infinity absorbs")
    }

    /// Archimedean class comparison, decided through psi: `[x] < [y]` iff
    /// `psi(x) > psi(y)`, with `[0]` below every nonzero class. In these
    /// models psi separates classes, so this order is total.
    pub fn class_cmp(&self, x: &Element, y: &Element) -> Result<Ordering> {
        if x.is_infinite() || y.is_infinite() {
            return Err(Error::InfiniteOperand);
        }
        Ok(match (x.is_zero(), y.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => {
                let px = self.psi(x);
                let py = self.psi(y);
                let a = px.as_psi_member().expect("psi of nonzero is a Psi member");
                let b = py.as_psi_member().expect("psi of nonzero is a Psi member");
                self.order.cmp_pos(a, b)?.reverse()
            }
        })
    }

    /// Membership in `(Gamma^>)' = Gamma^{> Psi}`, decided by the sign of the
    /// integral.
    pub fn in_positive_integrals(&self, x: &Element) -> Result<bool> {
        self.integral(x).sign().map(|s| s > 0)
    }

    /// The e-basis vector `e_n = unit(Omega(n)) - unit(Omega(n-1))`.
    pub fn e_basis(&self, n: u32) -> Element {
        if n == 0 {
            Element::unit(PsiPosition::Omega(0))
        } else {
            let mut terms = vec![
                (PsiPosition::Omega(n), Scalar::one()),
                (PsiPosition::Omega(n - 1), Scalar::one().neg()),
            ];
            terms.sort_by_key(|(p, _)| match p {
                PsiPosition::Omega(m) => *m,
                _ => unreachable!(),
            });
            Element::Fin(terms)
        }
    }

    /// The Psi member `s^{n+1} 0 = unit(Omega(n))`.
    pub fn omega_psi(&self, n: u32) -> Element {
        Element::unit(PsiPosition::Omega(n))
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model(field {}, copies", self.field)?;
        for c in self.order.copies() {
            write!(f, " {c}")?;
        }
        write!(f, ")")
    }
}

/// Common view of a couple: the base model or a shifted variant. The derived
/// maps `int`, `chi`, `dagger` and `prime` are definable from `psi` and `s`
/// and shared here.
pub trait CoupleOps {
    fn ambient(&self) -> &Model;
    fn psi_of(&self, x: &Element) -> Element;
    fn s_of(&self, x: &Element) -> Result<Element>;
    fn p_of(&self, x: &Element) -> Element;

    fn int_of(&self, x: &Element) -> Element {
        match self.s_of(x) {
            Err(_) => Element::Inf,
            Ok(sx) => self.ambient().sub(x, &sx).expect("finite subtraction"),
        }
    }

    fn chi_of(&self, x: &Element) -> Element {
        match x.sign() {
            Ok(s) if s < 0 => self.int_of(&self.psi_of(x)),
            _ => Element::Inf,
        }
    }

    fn prime_of(&self, x: &Element) -> Element {
        self.ambient().add(x, &self.psi_of(x)).expect("infinity absorbs")
    }

    fn s_zero_of(&self) -> Element {
        self.s_of(&Element::zero()).expect("s(0) is defined")
    }

    /// The Psi member indexed by a position; `unit(pos)` in a base model,
    /// shifted variants override.
    fn psi_member_value(&self, pos: &PsiPosition) -> Element {
        Element::unit(pos.clone())
    }

    /// Recognizes a Psi member of this couple, returning its index position.
    fn psi_index_of(&self, x: &Element) -> Option<PsiPosition> {
        x.as_psi_member().cloned()
    }
}

impl CoupleOps for Model {
    fn ambient(&self) -> &Model {
        self
    }

    fn psi_of(&self, x: &Element) -> Element {
        self.psi(x)
    }

    fn s_of(&self, x: &Element) -> Result<Element> {
        self.s(x)
    }

    fn p_of(&self, x: &Element) -> Element {
        self.p(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi_order::CopyId;

    fn model_c0() -> Model {
        Model::new(PsiOrder::with_copies(&["c0"]).unwrap(), Field::Rational)
    }

    fn quad_prime() -> Model {
        Model::new(PsiOrder::prime(), Field::Quadratic(2))
    }

    #[test]
    fn delta_two_halves_e0() {
        let m = Model::prime();
        let e0 = m.e_basis(0);
        let half = m.div_nat(2, &e0).unwrap();
        assert_eq!(half, Element::unit(PsiPosition::Omega(0)).scale_rational(&crate::element::rational_from_parts(1, 2)));
    }

    #[test]
    fn additive_inverse() {
        let m = Model::prime();
        let x = m.parse_element("e2 - 3*e5").unwrap();
        assert!(m.add(&x, &m.neg(&x)).unwrap().is_zero());
    }

    #[test]
    fn psi_of_sqrt2_e2() {
        // psi((0,0,sqrt 2,0,...)) = (1,1,1,0,...)
        let m = quad_prime();
        let x = m.parse_element("sqrt(2)*e2").unwrap();
        let expect = Element::from_omega_vector(&[Scalar::one(), Scalar::one(), Scalar::one()]).unwrap();
        assert_eq!(m.psi(&x), expect);
    }

    #[test]
    fn psi_defaults() {
        let m = Model::prime();
        assert!(m.psi(&Element::zero()).is_infinite());
        assert!(m.psi(&Element::Inf).is_infinite());
    }

    #[test]
    fn psi_on_copy_difference() {
        // psi(b3 - b0) = b1, the successor of the lower generator
        let m = model_c0();
        let x = m.parse_element("b[c0,3] - b[c0,0]").unwrap();
        let c0 = CopyId::new("c0");
        assert_eq!(m.psi(&x), Element::unit(PsiPosition::copy(&c0, 1)));
    }

    #[test]
    fn successor_closed_forms() {
        let m = Model::prime();
        // s(0) = (1,0,...)
        assert_eq!(m.s(&Element::zero()).unwrap(), m.s_zero());
        // s((1,1,1/2,0,...)) = (1,1,1,0,...): unique entry differing from 1
        let x = Element::from_omega_vector(&[Scalar::one(), Scalar::one(), Scalar::ratio(1, 2)]).unwrap();
        let expect = Element::from_omega_vector(&[Scalar::one(), Scalar::one(), Scalar::one()]).unwrap();
        assert_eq!(m.s(&x).unwrap(), expect);
        // copies step within their class
        let mc = model_c0();
        let c0 = CopyId::new("c0");
        let b0 = Element::unit(PsiPosition::copy(&c0, 0));
        assert_eq!(mc.s(&b0).unwrap(), Element::unit(PsiPosition::copy(&c0, 1)));
    }

    #[test]
    fn defining_identity_of_s() {
        // psi(x - s(x)) = s(x) on a grid
        let m = model_c0();
        for text in ["0", "e0", "2*e1 - e3", "b[c0,0]", "b[c0,2] - 5*e1", "1/2*e0 + 1/2*e4"] {
            let x = m.parse_element(text).unwrap();
            let sx = m.s(&x).unwrap();
            let d = m.sub(&x, &sx).unwrap();
            assert_eq!(m.psi(&d), sx, "x = {text}");
        }
    }

    #[test]
    fn p_inverts_s_on_psi() {
        let m = Model::prime();
        let w1 = Element::unit(PsiPosition::Omega(1));
        assert_eq!(m.p(&w1), Element::unit(PsiPosition::Omega(0)));
        // p(e0) = p(s0) = inf, below the domain
        assert!(m.p(&m.e_basis(0)).is_infinite());
        // e1 is not a Psi member
        assert!(m.p(&m.e_basis(1)).is_infinite());
        // non-unit coefficient is not a Psi member
        let two_w1 = w1.scale_rational(&crate::element::rational_from_parts(2, 1));
        assert!(m.p(&two_w1).is_infinite());
    }

    #[test]
    fn integral_examples() {
        let m = Model::prime();
        // int 0 = (-1, 0, ...)
        let expect = Element::from_omega_vector(&[Scalar::from_int(-1)]).unwrap();
        assert_eq!(m.integral(&Element::zero()), expect);
        // (int x)' = x
        let x = m.parse_element("e2 - 3*e5").unwrap();
        let ix = m.integral(&x);
        assert_eq!(m.prime_of(&ix), x);
    }

    #[test]
    fn contraction_example() {
        let m = Model::prime();
        // chi((-1,0,...)) = (0,-1,0,...)
        let x = Element::from_omega_vector(&[Scalar::from_int(-1)]).unwrap();
        let expect = Element::from_omega_vector(&[Scalar::zero(), Scalar::from_int(-1)]).unwrap();
        assert_eq!(m.chi(&x), expect);
        // chi outside the negatives defaults to infinity
        assert!(m.chi(&m.e_basis(0)).is_infinite());
        assert!(m.chi(&Element::zero()).is_infinite());
    }

    #[test]
    fn class_comparison() {
        let m = Model::prime();
        let e0 = m.e_basis(0);
        let e1 = m.e_basis(1);
        assert_eq!(m.class_cmp(&e1, &e0).unwrap(), Ordering::Less);
        let x = m.parse_element("e2 - 3*e5").unwrap();
        let two_x = m.scale_rational(&crate::element::rational_from_parts(2, 1), &x);
        assert_eq!(m.class_cmp(&x, &two_x).unwrap(), Ordering::Equal);
    }

    #[test]
    fn positive_integrals_membership() {
        let m = Model::prime();
        for n in 0..5u32 {
            let sn = m.omega_psi(n);
            assert!(!m.in_positive_integrals(&sn).unwrap(), "s^{}0 is below the cut", n + 1);
        }
        let two_e0 = m.parse_element("2*e0").unwrap();
        assert!(m.in_positive_integrals(&two_e0).unwrap());
        // (e0)' = 2 e0
        assert_eq!(m.prime_of(&m.e_basis(0)), two_e0);
    }

    #[test]
    fn copy_unit_sign_squeeze() {
        // s^n 0 < b[c0,0] < (1+q) e0: both differences are positive
        let m = model_c0();
        let b = m.parse_element("b[c0,0]").unwrap();
        let s5 = m.parse_element("w4").unwrap(); // s^5 0
        assert_eq!(m.sign(&m.sub(&b, &s5).unwrap()).unwrap(), 1);
        let bound = m.parse_element("8/7*e0").unwrap();
        assert_eq!(m.sign(&m.sub(&bound, &b).unwrap()).unwrap(), 1);
    }

    #[test]
    fn field_mismatch_rejected() {
        let m = Model::prime();
        assert!(matches!(m.parse_element("sqrt(2)*e0"), Err(Error::FieldMismatch)));
    }
}
