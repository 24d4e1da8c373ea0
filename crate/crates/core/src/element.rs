//! Group elements of a finitely presented model: finitely supported scalar
//! vectors over Psi positions, plus the distinguished value infinity.
//!
//! The unit vector at `Omega(n)` denotes `s^{n+1} 0`; the unit vector at
//! `Copy(c, k)` denotes the k-th generator of copy `c`. The basis vector
//! `e_n` of the lexicographic presentation is recovered as
//! `unit(Omega(n)) - unit(Omega(n-1))`.
//!
//! Support is kept sorted in the owning order with no zero coefficients.
//! Copy ids are stable under extension, so an element stays canonically
//! sorted in every extension of its model.

use crate::error::{Error, Result};
use crate::lex::{Tok, Tokens};
use crate::psi_order::{CopyId, PsiOrder, PsiPosition};
use crate::scalar::{fmt_rat, parse_scalar, Scalar};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::Zero;
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    /// The default value adjoined to the group.
    Inf,
    /// Finitely supported vector; positions strictly ascending, scalars nonzero.
    Fin(Vec<(PsiPosition, Scalar)>),
}

impl Element {
    pub fn infinity() -> Element {
        Element::Inf
    }

    pub fn zero() -> Element {
        Element::Fin(Vec::new())
    }

    pub fn unit(pos: PsiPosition) -> Element {
        Element::Fin(vec![(pos, Scalar::one())])
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Element::Inf)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Element::Fin(t) if t.is_empty())
    }

    pub fn terms(&self) -> Result<&[(PsiPosition, Scalar)]> {
        match self {
            Element::Inf => Err(Error::InfiniteOperand),
            Element::Fin(t) => Ok(t),
        }
    }

    /// Builds an element from arbitrary terms: sorts, merges duplicates and
    /// drops zero coefficients. Positions must exist in `order`.
    pub fn from_terms(order: &PsiOrder, terms: Vec<(PsiPosition, Scalar)>) -> Result<Element> {
        let mut terms = terms;
        for (p, _) in &terms {
            order.validate(p)?;
        }
        let mut err = None;
        terms.sort_by(|a, b| match order.cmp_pos(&a.0, &b.0) {
            Ok(o) => o,
            Err(e) => {
                err = Some(e);
                Ordering::Equal
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let mut out: Vec<(PsiPosition, Scalar)> = Vec::with_capacity(terms.len());
        for (p, s) in terms {
            match out.last_mut() {
                Some((q, acc)) if *q == p => *acc = acc.add(&s)?,
                _ => out.push((p, s)),
            }
        }
        out.retain(|(_, s)| !s.is_zero());
        Ok(Element::Fin(out))
    }

    pub fn coeff_at(&self, pos: &PsiPosition) -> Option<&Scalar> {
        match self {
            Element::Inf => None,
            Element::Fin(t) => t.iter().find(|(p, _)| p == pos).map(|(_, s)| s),
        }
    }

    pub fn min_position(&self) -> Option<&PsiPosition> {
        match self {
            Element::Inf => None,
            Element::Fin(t) => t.first().map(|(p, _)| p),
        }
    }

    pub fn max_position(&self) -> Option<&PsiPosition> {
        match self {
            Element::Inf => None,
            Element::Fin(t) => t.last().map(|(p, _)| p),
        }
    }

    /// Sum of all coefficients; the quantity driving the psi and s formulas.
    pub fn coeff_sum(&self) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for (_, s) in self.terms()? {
            acc = acc.add(s)?;
        }
        Ok(acc)
    }

    /// Keeps the terms whose position satisfies the predicate.
    pub fn filter_terms(&self, mut keep: impl FnMut(&PsiPosition) -> bool) -> Element {
        match self {
            Element::Inf => Element::Inf,
            Element::Fin(t) => {
                Element::Fin(t.iter().filter(|(p, _)| keep(p)).cloned().collect())
            }
        }
    }

    /// Whether the element is the length-one vector with coefficient one,
    /// i.e. an actual member of the Psi set.
    pub fn as_psi_member(&self) -> Option<&PsiPosition> {
        match self {
            Element::Fin(t) if t.len() == 1 && t[0].1.is_one() => Some(&t[0].0),
            _ => None,
        }
    }

    /// Sign by the summation rule: with ascending support and coefficient
    /// sum Q, the sign is sign(Q) when Q is nonzero and minus the sign of
    /// the lowest coefficient otherwise.
    pub fn sign(&self) -> Result<i32> {
        let terms = self.terms()?;
        if terms.is_empty() {
            return Ok(0);
        }
        let mut q = Scalar::zero();
        for (_, s) in terms {
            q = q.add(s)?;
        }
        let sq = q.sign();
        if sq != 0 {
            Ok(sq)
        } else {
            Ok(-terms[0].1.sign())
        }
    }

    pub fn scale(&self, s: &Scalar) -> Result<Element> {
        match self {
            Element::Inf => Ok(Element::Inf),
            Element::Fin(t) => {
                if s.is_zero() {
                    return Ok(Element::zero());
                }
                let mut out = Vec::with_capacity(t.len());
                for (p, c) in t {
                    out.push((p.clone(), c.mul(s)?));
                }
                Ok(Element::Fin(out))
            }
        }
    }

    pub fn scale_rational(&self, q: &BigRational) -> Element {
        match self {
            Element::Inf => Element::Inf,
            Element::Fin(t) => {
                if q.is_zero() {
                    return Element::zero();
                }
                Element::Fin(t.iter().map(|(p, c)| (p.clone(), c.mul_rational(q))).collect())
            }
        }
    }

    pub fn neg(&self) -> Element {
        match self {
            Element::Inf => Element::Inf,
            Element::Fin(t) => Element::Fin(t.iter().map(|(p, c)| (p.clone(), c.neg())).collect()),
        }
    }

    /// Merge-add respecting the given order; infinity absorbs.
    pub fn add_in(&self, other: &Element, order: &PsiOrder) -> Result<Element> {
        let (a, b) = match (self, other) {
            (Element::Inf, _) | (_, Element::Inf) => return Ok(Element::Inf),
            (Element::Fin(a), Element::Fin(b)) => (a, b),
        };
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match order.cmp_pos(&a[i].0, &b[j].0)? {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let s = a[i].1.add(&b[j].1)?;
                    if !s.is_zero() {
                        out.push((a[i].0.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(Element::Fin(out))
    }

    pub fn sub_in(&self, other: &Element, order: &PsiOrder) -> Result<Element> {
        self.add_in(&other.neg(), order)
    }

    /// The omega-part vector form `(r_0, r_1, ...)`; fails when a copy
    /// position is in the support. Inverse of [`Element::from_omega_vector`].
    pub fn omega_vector(&self) -> Result<Vec<Scalar>> {
        let terms = self.terms()?;
        let mut top = 0u32;
        for (p, _) in terms {
            match p {
                PsiPosition::Omega(n) => top = top.max(*n),
                PsiPosition::Copy(_, _) => return Err(Error::NotOmegaSupported),
            }
        }
        if terms.is_empty() {
            return Ok(Vec::new());
        }
        // r_i is the tail sum of position coefficients at or above Omega(i)
        let mut out = vec![Scalar::zero(); top as usize + 1];
        let mut tail = Scalar::zero();
        for i in (0..=top).rev() {
            if let Some(c) = self.coeff_at(&PsiPosition::Omega(i)) {
                tail = tail.add(c)?;
            }
            out[i as usize] = tail.clone();
        }
        Ok(out)
    }

    /// Element denoted by the omega-part vector `(r_0, r_1, ...)`.
    pub fn from_omega_vector(coords: &[Scalar]) -> Result<Element> {
        let mut terms = Vec::new();
        for (i, r) in coords.iter().enumerate() {
            let next = coords.get(i + 1).cloned().unwrap_or_else(Scalar::zero);
            let c = r.sub(&next)?;
            if !c.is_zero() {
                terms.push((PsiPosition::Omega(i as u32), c));
            }
        }
        Ok(Element::Fin(terms))
    }
}

fn coeff_prefix(s: &Scalar) -> String {
    if s.is_one() {
        String::new()
    } else if s.neg().is_one() {
        "-".to_string()
    } else if s.is_rational() || s.rational_part().is_zero() {
        format!("{s}*")
    } else {
        format!("({s})*")
    }
}

impl fmt::Display for Element {
    /// Canonical form: omega support printed in the `e` basis, copy support
    /// as `b[id,k]` units, e.g. `3/2*e0 - e3 + 2*b[c0,1]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = match self {
            Element::Inf => return write!(f, "inf"),
            Element::Fin(t) => t,
        };
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut rendered: Vec<String> = Vec::new();
        // omega part via tail sums, in e-basis
        let omega: Vec<(u32, &Scalar)> = terms
            .iter()
            .filter_map(|(p, s)| match p {
                PsiPosition::Omega(n) => Some((*n, s)),
                _ => None,
            })
            .collect();
        if !omega.is_empty() {
            let top = omega.iter().map(|(n, _)| *n).max().unwrap();
            let mut tail = Scalar::zero();
            let mut coords = vec![Scalar::zero(); top as usize + 1];
            for i in (0..=top).rev() {
                if let Some((_, c)) = omega.iter().find(|(n, _)| *n == i) {
                    tail = tail.add(c).expect("field mismatch in display");
                }
                coords[i as usize] = tail.clone();
            }
            for (i, c) in coords.iter().enumerate() {
                if !c.is_zero() {
                    rendered.push(format!("{}e{}", coeff_prefix(c), i));
                }
            }
        }
        for (p, s) in terms {
            if let PsiPosition::Copy(_, _) = p {
                rendered.push(format!("{}{}", coeff_prefix(s), p));
            }
        }
        let mut out = String::new();
        for (i, term) in rendered.iter().enumerate() {
            if i == 0 {
                out.push_str(term);
            } else if let Some(stripped) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(term);
            }
        }
        write!(f, "{out}")
    }
}

/// One basis reference in the literal syntax.
enum BasisRef {
    E(u32),
    W(u32),
    B(CopyId, i64),
}

fn parse_basis_ref(toks: &mut Tokens) -> Result<Option<BasisRef>> {
    let mark = toks.mark();
    let at = toks.offset();
    match toks.next_tok() {
        Some(Tok::Ident(id)) => {
            if let Some(rest) = id.strip_prefix('e') {
                if let Ok(n) = rest.parse::<u32>() {
                    return Ok(Some(BasisRef::E(n)));
                }
            }
            if let Some(rest) = id.strip_prefix('w') {
                if let Ok(n) = rest.parse::<u32>() {
                    return Ok(Some(BasisRef::W(n)));
                }
            }
            if id == "b" && toks.peek() == Some(&Tok::Sym('[')) {
                toks.expect_sym('[')?;
                let name = match toks.next_tok() {
                    Some(Tok::Ident(s)) => s,
                    Some(Tok::Nat(n)) => n.to_string(),
                    _ => return Err(Error::parse(at, "expected copy id")),
                };
                toks.expect_sym(',')?;
                let k = toks.int_i64()?;
                toks.expect_sym(']')?;
                return Ok(Some(BasisRef::B(CopyId::new(name), k)));
            }
            toks.reset(mark);
            Ok(None)
        }
        _ => {
            toks.reset(mark);
            Ok(None)
        }
    }
}

/// Parses a scalar coefficient in literal position. Accepts `3`, `3/2`,
/// `sqrt(2)`, `sqrt2`, `3/2*sqrt(2)` and a parenthesized full scalar
/// `(1+1/2*sqrt(2))`.
fn parse_coefficient(toks: &mut Tokens) -> Result<Option<Scalar>> {
    let mark = toks.mark();
    if toks.eat_sym('(') {
        // parenthesized scalar expression, captured textually
        let mut depth = 1;
        let mut text = String::new();
        loop {
            match toks.next_tok() {
                Some(Tok::Sym('(')) => {
                    depth += 1;
                    text.push('(');
                }
                Some(Tok::Sym(')')) => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                    text.push(')');
                }
                Some(Tok::Sym(c)) => text.push(c),
                Some(Tok::Nat(n)) => text.push_str(&format!(" {n} ")),
                Some(Tok::Ident(s)) => text.push_str(&format!(" {s} ")),
                None => return Err(Error::parse(toks.offset(), "unterminated `(`")),
            }
        }
        if !toks.eat_sym('*') {
            return Err(Error::parse(toks.offset(), "expected `*` after coefficient"));
        }
        return Ok(Some(parse_scalar(&text)?));
    }
    let root = |toks: &mut Tokens| -> Result<Option<u32>> {
        let mark = toks.mark();
        if let Some(Tok::Ident(id)) = toks.peek() {
            if id == "sqrt" {
                toks.next_tok();
                toks.expect_sym('(')?;
                let d = toks.nat_u32()?;
                toks.expect_sym(')')?;
                return Ok(Some(d));
            }
            if let Some(rest) = id.strip_prefix("sqrt") {
                if let Ok(d) = rest.parse::<u32>() {
                    toks.next_tok();
                    return Ok(Some(d));
                }
            }
        }
        toks.reset(mark);
        Ok(None)
    };
    if let Some(d) = root(toks)? {
        let s = Scalar::sqrt_of(d)?;
        if !toks.eat_sym('*') {
            return Err(Error::parse(toks.offset(), "expected `*` after coefficient"));
        }
        return Ok(Some(s));
    }
    if let Some(Tok::Nat(_)) = toks.peek() {
        let n = match toks.next_tok() {
            Some(Tok::Nat(n)) => n,
            _ => unreachable!(),
        };
        let mut q = BigRational::from_integer(n);
        if toks.peek() == Some(&Tok::Sym('/')) {
            toks.next_tok();
            match toks.next_tok() {
                Some(Tok::Nat(d)) if !d.is_zero() => q /= BigRational::from_integer(d),
                _ => return Err(Error::parse(toks.offset(), "bad denominator")),
            }
        }
        if !toks.eat_sym('*') {
            toks.reset(mark);
            return Ok(None);
        }
        // `q * sqrt(d) * basis` or `q * basis`
        if let Some(d) = root(toks)? {
            let s = Scalar::sqrt_of(d)?.mul_rational(&q);
            if !toks.eat_sym('*') {
                return Err(Error::parse(toks.offset(), "expected `*` after coefficient"));
            }
            return Ok(Some(s));
        }
        return Ok(Some(Scalar::from_rational(q)));
    }
    toks.reset(mark);
    Ok(None)
}

/// Parses one element literal from a token stream. The caller supplies the
/// order for position validation and sorting.
pub fn parse_element_tokens(toks: &mut Tokens, order: &PsiOrder) -> Result<Element> {
    if toks.eat_ident("inf") {
        return Ok(Element::Inf);
    }
    let mut terms: Vec<(PsiPosition, Scalar)> = Vec::new();
    let mut first = true;
    loop {
        let sign = if toks.eat_sym('-') {
            -1
        } else if toks.eat_sym('+') {
            if first {
                return Err(Error::parse(toks.offset(), "unexpected leading `+`"));
            }
            1
        } else if first {
            1
        } else {
            break;
        };
        let at = toks.offset();
        // bare zero term
        if let Some(Tok::Nat(n)) = toks.peek() {
            if n.is_zero() && !matches!(toks.peek2(), Some(Tok::Sym('/')) | Some(Tok::Sym('*'))) {
                toks.next_tok();
                first = false;
                continue;
            }
        }
        let coeff = parse_coefficient(toks)?.unwrap_or_else(Scalar::one);
        let basis = parse_basis_ref(toks)?
            .ok_or_else(|| Error::parse(at, "expected basis reference (eN, wN or b[id,k])"))?;
        let coeff = if sign < 0 { coeff.neg() } else { coeff };
        match basis {
            BasisRef::W(n) => terms.push((PsiPosition::Omega(n), coeff)),
            BasisRef::E(n) => {
                terms.push((PsiPosition::Omega(n), coeff.clone()));
                if n > 0 {
                    terms.push((PsiPosition::Omega(n - 1), coeff.neg()));
                }
            }
            BasisRef::B(id, k) => {
                order.copy_rank(&id)?;
                terms.push((PsiPosition::Copy(id, k), coeff));
            }
        }
        first = false;
        if !matches!(toks.peek(), Some(Tok::Sym('+')) | Some(Tok::Sym('-'))) {
            break;
        }
    }
    Element::from_terms(order, terms)
}

pub fn parse_element(text: &str, order: &PsiOrder) -> Result<Element> {
    let mut toks = Tokens::lex(text)?;
    let e = parse_element_tokens(&mut toks, order)?;
    toks.expect_end()?;
    Ok(e)
}

/// Display helper for Psi members: `s0`, `s^2 0`, copy units as `b[id,k]`.
pub fn psi_member_name(pos: &PsiPosition) -> String {
    match pos {
        PsiPosition::Omega(0) => "s0".to_string(),
        PsiPosition::Omega(n) => format!("s^{} 0", n + 1),
        PsiPosition::Copy(_, _) => pos.to_string(),
    }
}

pub(crate) fn rational_from_parts(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn fmt_rational(q: &BigRational) -> String {
    fmt_rat(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime() -> PsiOrder {
        PsiOrder::prime()
    }

    #[test]
    fn zero_and_units() {
        assert!(Element::zero().is_zero());
        let u = Element::unit(PsiPosition::Omega(3));
        assert_eq!(u.as_psi_member(), Some(&PsiPosition::Omega(3)));
        assert_eq!(u.sign().unwrap(), 1);
    }

    #[test]
    fn sign_lex_rule_on_omega_part() {
        // vector (0,1,0,...) = e1 is positive
        let e1 = Element::from_omega_vector(&[Scalar::zero(), Scalar::one()]).unwrap();
        assert_eq!(e1.sign().unwrap(), 1);
        // x - x = 0
        let order = prime();
        let d = e1.sub_in(&e1, &order).unwrap();
        assert_eq!(d.sign().unwrap(), 0);
    }

    #[test]
    fn omega_vector_round_trip() {
        let coords = vec![Scalar::zero(), Scalar::from_int(-5), Scalar::ratio(1, 3)];
        let x = Element::from_omega_vector(&coords).unwrap();
        let back = x.omega_vector().unwrap();
        assert_eq!(back, coords);
    }

    #[test]
    fn omega_vector_rejects_copy_support() {
        let order = PsiOrder::with_copies(&["c0"]).unwrap();
        let c0 = CopyId::new("c0");
        let x = Element::from_terms(&order, vec![(PsiPosition::copy(&c0, 0), Scalar::one())]).unwrap();
        assert_eq!(x.omega_vector().unwrap_err(), Error::NotOmegaSupported);
    }

    #[test]
    fn e_basis_telescopes() {
        // e1 in positions: unit(Omega(1)) - unit(Omega(0))
        let order = prime();
        let e1 = parse_element("e1", &order).unwrap();
        let w1 = Element::unit(PsiPosition::Omega(1));
        let w0 = Element::unit(PsiPosition::Omega(0));
        assert_eq!(e1, w1.sub_in(&w0, &order).unwrap());
        // (1,1,0,...) corresponds to unit(Omega(1))
        let v = Element::from_omega_vector(&[Scalar::one(), Scalar::one()]).unwrap();
        assert_eq!(v, w1);
    }

    #[test]
    fn literal_parse_and_display() {
        let order = PsiOrder::with_copies(&["c0"]).unwrap();
        let x = parse_element("3/2*e0 - e3 + 2*b[c0,1] + w4", &order).unwrap();
        let text = x.to_string();
        let y = parse_element(&text, &order).unwrap();
        assert_eq!(x, y, "round trip through `{text}`");
        assert_eq!(parse_element("inf", &order).unwrap(), Element::Inf);
        assert_eq!(parse_element("0", &order).unwrap(), Element::zero());
    }

    #[test]
    fn literal_with_quadratic_coefficients() {
        let order = prime();
        let x = parse_element("sqrt(2)*e2", &order).unwrap();
        let y = parse_element("sqrt2*e2", &order).unwrap();
        assert_eq!(x, y);
        let z = parse_element("(1+sqrt(2))*e0 - 1/2*sqrt(2)*e1", &order).unwrap();
        let back = parse_element(&z.to_string(), &order).unwrap();
        assert_eq!(z, back);
    }

    #[test]
    fn unknown_copy_in_literal() {
        let order = prime();
        assert!(matches!(parse_element("b[c9,0]", &order), Err(Error::UnknownCopy(_))));
    }

    #[test]
    fn infinity_absorbs() {
        let order = prime();
        let x = Element::unit(PsiPosition::Omega(0));
        assert!(x.add_in(&Element::Inf, &order).unwrap().is_infinite());
        assert!(Element::Inf.neg().is_infinite());
        assert!(Element::Inf.scale(&Scalar::from_int(2)).unwrap().is_infinite());
    }
}
