//! Randomized and grid-based verification suites for the couple axioms and
//! the lemma-level properties of the maps psi, s, p, int and chi.
//!
//! Every suite is driven by a seeded ChaCha stream, so a report is a pure
//! function of (target, samples, seed). Checks walk a small canonical grid
//! of elements before drawing random samples; the grid makes single-point
//! mutations of psi or s detectable deterministically.

use crate::couple::{CoupleOps, Model};
use crate::element::Element;
use crate::error::Result;
use crate::psi_order::{PsiPosition, SCut};
use crate::scalar::Scalar;
use num::rational::BigRational;
use num::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::fmt;

const MAX_WITNESSES: usize = 3;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub samples: u64,
    pub failures: u64,
    pub witnesses: Vec<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub suite: String,
    pub target: String,
    pub seed: u64,
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed())
    }

    pub fn failing(&self) -> Vec<&CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed()).collect()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} on {} (seed {})", self.suite, self.target, self.seed)?;
        for o in &self.outcomes {
            if o.passed() {
                writeln!(f, "  {}: ok ({} samples)", o.name, o.samples)?;
            } else {
                writeln!(f, "  {}: FAIL ({}/{} samples)", o.name, o.failures, o.samples)?;
                for w in &o.witnesses {
                    writeln!(f, "    witness: {w}")?;
                }
            }
        }
        write!(f, "result: {}", if self.all_passed() { "PASS" } else { "FAIL" })
    }
}

/// Random element source for a model. All draws are bounded so coefficients
/// stay small and supports stay short.
pub struct ElementGen<'a> {
    model: &'a Model,
    rng: ChaCha8Rng,
}

impl<'a> ElementGen<'a> {
    pub fn new(model: &'a Model, seed: u64) -> ElementGen<'a> {
        ElementGen { model, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn rational(&mut self) -> BigRational {
        let n = self.rng.gen_range(-9i64..=9);
        let d = self.rng.gen_range(1i64..=9);
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    pub fn rational_nonzero(&mut self) -> BigRational {
        loop {
            let q = self.rational();
            if !num::Zero::is_zero(&q) {
                return q;
            }
        }
    }

    pub fn scalar(&mut self) -> Scalar {
        match self.model.field().radicand() {
            Some(d) if self.rng.gen_bool(0.4) => {
                Scalar::quadratic(self.rational(), self.rational(), d).unwrap()
            }
            _ => Scalar::from_rational(self.rational()),
        }
    }

    pub fn scalar_nonzero(&mut self) -> Scalar {
        loop {
            let s = self.scalar();
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn position(&mut self) -> PsiPosition {
        let copies = self.model.order().copies();
        if copies.is_empty() || self.rng.gen_bool(0.5) {
            PsiPosition::Omega(self.rng.gen_range(0..16))
        } else {
            let c = &copies[self.rng.gen_range(0..copies.len())];
            PsiPosition::copy(c, self.rng.gen_range(-8i64..=8))
        }
    }

    /// Any element, possibly zero.
    pub fn element(&mut self) -> Element {
        let n = self.rng.gen_range(0..=4);
        let mut terms = Vec::with_capacity(n);
        for _ in 0..n {
            terms.push((self.position(), self.scalar()));
        }
        Element::from_terms(self.model.order(), terms).unwrap()
    }

    pub fn nonzero(&mut self) -> Element {
        loop {
            let x = self.element();
            if !x.is_zero() {
                return x;
            }
        }
    }

    pub fn positive(&mut self) -> Element {
        loop {
            let x = self.nonzero();
            match x.sign().unwrap() {
                1 => return x,
                _ => return x.neg(),
            }
        }
    }

    pub fn negative(&mut self) -> Element {
        self.positive().neg()
    }

    /// A combination of distinct Psi members with nonzero coefficients,
    /// optionally constrained to a prescribed coefficient sum.
    pub fn psi_combination(&mut self, max_terms: usize, forced_sum: Option<Scalar>) -> Element {
        loop {
            let n = self.rng.gen_range(1..=max_terms.max(1));
            let mut positions: Vec<PsiPosition> = Vec::new();
            while positions.len() < n {
                let p = self.position();
                if !positions.contains(&p) {
                    positions.push(p);
                }
            }
            let mut terms: Vec<(PsiPosition, Scalar)> = Vec::new();
            for p in &positions {
                terms.push((p.clone(), self.scalar_nonzero()));
            }
            if let Some(target) = &forced_sum {
                let mut partial = Scalar::zero();
                for (_, s) in terms.iter().take(terms.len() - 1) {
                    partial = partial.add(s).unwrap();
                }
                let last = target.sub(&partial).unwrap();
                if last.is_zero() {
                    continue;
                }
                let idx = terms.len() - 1;
                terms[idx].1 = last;
            }
            return Element::from_terms(self.model.order(), terms).unwrap();
        }
    }
}

/// Fixed elements exercised by every check before random sampling.
pub fn canonical_grid(model: &Model) -> Vec<Element> {
    let mut out = vec![
        Element::unit(PsiPosition::Omega(0)),
        Element::unit(PsiPosition::Omega(1)),
        Element::unit(PsiPosition::Omega(2)),
        model.e_basis(1),
        model.e_basis(2),
        model.e_basis(0).neg(),
        model.e_basis(1).neg(),
        model.parse_element("2*e0").unwrap(),
        model.parse_element("1/2*e0 - e1").unwrap(),
    ];
    for c in model.order().copies() {
        out.push(Element::unit(PsiPosition::copy(c, 0)));
        out.push(Element::unit(PsiPosition::copy(c, -1)).neg());
        let diff = Element::from_terms(
            model.order(),
            vec![
                (PsiPosition::copy(c, 1), Scalar::one()),
                (PsiPosition::copy(c, 0), Scalar::one().neg()),
            ],
        )
        .unwrap();
        out.push(diff);
    }
    out
}

struct Harness<'a> {
    couple: &'a dyn CoupleOps,
    grid: Vec<Element>,
    outcomes: Vec<CheckOutcome>,
}

impl<'a> Harness<'a> {
    fn model(&self) -> &Model {
        self.couple.ambient()
    }

    /// Runs one named check: `body` receives a sample index and an element
    /// generator, returning a failure witness if the property is violated.
    fn check(
        &mut self,
        name: &str,
        samples: u64,
        seed: u64,
        mut body: impl FnMut(&dyn CoupleOps, &mut ElementGen, Option<&Element>) -> Option<String>,
    ) {
        let mut gen = ElementGen::new(self.couple.ambient(), seed ^ fxhash(name));
        let mut failures = 0u64;
        let mut witnesses = Vec::new();
        let grid = self.grid.clone();
        let total = samples.max(grid.len() as u64);
        for i in 0..total {
            let pinned = grid.get(i as usize);
            if let Some(w) = body(self.couple, &mut gen, pinned) {
                failures += 1;
                if witnesses.len() < MAX_WITNESSES {
                    witnesses.push(w);
                }
            }
        }
        self.outcomes.push(CheckOutcome { name: name.to_string(), samples: total, failures, witnesses });
    }
}

fn fxhash(s: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn cmp_vals(m: &Model, x: &Element, y: &Element) -> Ordering {
    // total comparison with infinity on top
    match (x.is_infinite(), y.is_infinite()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => m.cmp_elems(x, y).unwrap(),
    }
}

/// The couple axioms AC1, AC2, AC3, HC plus the valuation property and
/// asymptotic integration, run against any [`CoupleOps`] view.
pub fn axiom_suite(c: &dyn CoupleOps, samples: u64, seed: u64) -> CheckReport {
    let mut h = Harness { couple: c, grid: canonical_grid(c.ambient()), outcomes: Vec::new() };

    h.check("ac1-ultrametric", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.nonzero());
        let y = g.nonzero();
        let sum = m.add(&x, &y).unwrap();
        if sum.is_zero() {
            return None;
        }
        let lhs = c.psi_of(&sum);
        let min = match cmp_vals(m, &c.psi_of(&x), &c.psi_of(&y)) {
            Ordering::Less | Ordering::Equal => c.psi_of(&x),
            Ordering::Greater => c.psi_of(&y),
        };
        if cmp_vals(m, &lhs, &min) == Ordering::Less {
            Some(format!("psi({x} + {y}) = {lhs} < min = {min}"))
        } else {
            None
        }
    });

    h.check("ac2-integer-scaling", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.nonzero());
        if x.is_zero() {
            return None;
        }
        for n in (-10i64..=10).filter(|n| *n != 0) {
            let nx = m.scale_rational(&BigRational::from_integer(BigInt::from(n)), &x);
            if c.psi_of(&nx) != c.psi_of(&x) {
                return Some(format!("psi({n}*({x})) != psi({x})"));
            }
        }
        None
    });

    h.check("ac3-gap", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = match pinned {
            Some(p) if p.sign().unwrap() > 0 => p.clone(),
            Some(_) => return None,
            None => g.positive(),
        };
        let y = g.nonzero();
        let xp = c.prime_of(&x);
        if cmp_vals(m, &xp, &c.psi_of(&y)) != Ordering::Greater {
            Some(format!("({x})' = {xp} not above psi({y})"))
        } else {
            None
        }
    });

    h.check("hc-antitone", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = match pinned {
            Some(p) if p.sign().unwrap() > 0 => p.clone(),
            Some(_) => return None,
            None => g.positive(),
        };
        let mut y = g.positive();
        if m.cmp_elems(&x, &y).unwrap() == Ordering::Greater {
            y = m.add(&x, &y).unwrap();
        }
        // now 0 < x <= y
        if cmp_vals(m, &c.psi_of(&x), &c.psi_of(&y)) == Ordering::Less {
            Some(format!("psi not antitone at 0 < {x} <= {y}"))
        } else {
            None
        }
    });

    h.check("valuation-min", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.nonzero());
        let y = g.nonzero();
        if x.is_zero() {
            return None;
        }
        let (px, py) = (c.psi_of(&x), c.psi_of(&y));
        if cmp_vals(m, &px, &py) == Ordering::Less {
            let sum = m.add(&x, &y).unwrap();
            if c.psi_of(&sum) != px {
                return Some(format!("psi({x}+{y}) != psi({x}) despite psi({x}) < psi({y})"));
            }
        }
        None
    });

    h.check("prime-strictly-increasing", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.nonzero());
        let y = g.nonzero();
        if x.is_zero() || x == y {
            return None;
        }
        let ord_before = m.cmp_elems(&x, &y).unwrap();
        let ord_after = cmp_vals(m, &c.prime_of(&x), &c.prime_of(&y));
        if ord_before != ord_after {
            Some(format!("x -> x' not strictly increasing at {x}, {y}"))
        } else {
            None
        }
    });

    h.check("asymptotic-integration", samples, seed, |c, g, pinned| {
        let x = pinned.cloned().unwrap_or_else(|| g.element());
        let ix = c.int_of(&x);
        if ix.is_zero() || ix.is_infinite() {
            return Some(format!("int({x}) degenerate"));
        }
        let back = c.prime_of(&ix);
        if back != x {
            Some(format!("(int {x})' = {back} != {x}"))
        } else {
            None
        }
    });

    CheckReport { suite: "axioms".into(), target: c.ambient().to_string(), seed, outcomes: h.outcomes }
}

/// Lemma-level properties of int, s and chi, the psi/s closed forms on Psi
/// combinations, the successor-difference rule, far-out agreement of s and
/// psi, and the five defining clauses of the base theory.
pub fn function_suite(c: &dyn CoupleOps, samples: u64, seed: u64) -> CheckReport {
    let mut h = Harness { couple: c, grid: canonical_grid(c.ambient()), outcomes: Vec::new() };

    h.check("fn-int-is-x-minus-sx", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.element());
        let lhs = c.int_of(&x);
        let rhs = m.sub(&x, &c.s_of(&x).unwrap()).unwrap();
        (lhs != rhs).then(|| format!("int {x} != x - s x"))
    });

    h.check("fn-below-cut-grows", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.element());
        let ix = c.int_of(&x);
        if ix.sign().unwrap() < 0 {
            let sx = c.s_of(&x).unwrap();
            if m.cmp_elems(&x, &sx).unwrap() != Ordering::Less {
                return Some(format!("{x} in (G^<)' but not below s x"));
            }
        }
        None
    });

    h.check("fn-above-cut-shrinks", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.element());
        let ix = c.int_of(&x);
        if ix.sign().unwrap() > 0 {
            let sx = c.s_of(&x).unwrap();
            if m.cmp_elems(&x, &sx).unwrap() != Ordering::Greater {
                return Some(format!("{x} in (G^>)' but not above s x"));
            }
        }
        None
    });

    h.check("fn-s-monotone-below", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.element());
        let y = g.element();
        let below = |z: &Element| c.int_of(z).sign().unwrap() < 0;
        if below(&x) && below(&y) {
            let (lo, hi) = match m.cmp_elems(&x, &y).unwrap() {
                Ordering::Less => (&x, &y),
                _ => (&y, &x),
            };
            let (slo, shi) = (c.s_of(lo).unwrap(), c.s_of(hi).unwrap());
            if cmp_vals(m, &slo, &shi) == Ordering::Greater {
                return Some(format!("s not monotone below the cut at {lo}, {hi}"));
            }
        }
        None
    });

    h.check("fn-s-antitone-above", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.element());
        let y = g.element();
        let above = |z: &Element| c.int_of(z).sign().unwrap() > 0;
        if above(&x) && above(&y) {
            let (lo, hi) = match m.cmp_elems(&x, &y).unwrap() {
                Ordering::Less => (&x, &y),
                _ => (&y, &x),
            };
            let (slo, shi) = (c.s_of(lo).unwrap(), c.s_of(hi).unwrap());
            if cmp_vals(m, &slo, &shi) == Ordering::Less {
                return Some(format!("s not antitone above the cut at {lo}, {hi}"));
            }
        }
        None
    });

    h.check("fn-s-defining-identity", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.element());
        let sx = c.s_of(&x).unwrap();
        let d = m.sub(&x, &sx).unwrap();
        if c.psi_of(&d) != sx {
            return Some(format!("psi(x - s x) != s x at x = {x}"));
        }
        // and no other candidate from psi-values satisfies it
        let probe = g.nonzero();
        let beta = c.psi_of(&probe);
        if beta != sx {
            let d2 = m.sub(&x, &beta).unwrap();
            if c.psi_of(&d2) == beta {
                return Some(format!("beta = {beta} also solves beta = psi(x - beta) at x = {x}"));
            }
        }
        None
    });

    h.check("fn-chi-monotone", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = match pinned {
            Some(p) if p.sign().unwrap() < 0 => p.clone(),
            Some(_) => return None,
            None => g.negative(),
        };
        let y = g.negative();
        let (lo, hi) = match m.cmp_elems(&x, &y).unwrap() {
            Ordering::Less => (&x, &y),
            _ => (&y, &x),
        };
        if lo == hi {
            return None;
        }
        let (clo, chi_) = (c.chi_of(lo), c.chi_of(hi));
        if cmp_vals(m, &clo, &chi_) == Ordering::Greater {
            Some(format!("chi not monotone at {lo} < {hi} < 0"))
        } else {
            None
        }
    });

    h.check("fn-chi-class-drop", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = match pinned {
            Some(p) if p.sign().unwrap() < 0 => p.clone(),
            Some(_) => return None,
            None => g.negative(),
        };
        let cx = c.chi_of(&x);
        if m.class_cmp(&x, &cx).unwrap() != Ordering::Greater {
            Some(format!("[x] <= [chi x] at x = {x}"))
        } else {
            None
        }
    });

    h.check("fn-chi-psi-identity", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = match pinned {
            Some(p) if p.sign().unwrap() < 0 => p.clone(),
            Some(_) => return None,
            None => g.negative(),
        };
        let cx = c.chi_of(&x);
        let lhs = m.add(&cx, &c.psi_of(&cx)).unwrap();
        if lhs != c.psi_of(&x) {
            Some(format!("chi x + psi(chi x) != psi x at x = {x}"))
        } else {
            None
        }
    });

    h.check("psi-formula-balanced", samples, seed, |c, g, _| {
        // sum of coefficients zero: psi lands on the successor of the least position
        let x = g.psi_combination(8, Some(Scalar::zero()));
        if x.is_zero() {
            return None;
        }
        let min = x.min_position().unwrap().clone();
        let expect = c.psi_member_value(&c.ambient().order().succ(&min));
        let got = c.psi_of(&x);
        (got != expect).then(|| format!("psi({x}) = {got}, expected {expect}"))
    });

    h.check("psi-formula-unbalanced", samples, seed, |c, g, _| {
        let x = g.psi_combination(8, None);
        let q = x.coeff_sum().unwrap();
        if q.is_zero() {
            return None;
        }
        let expect = c.psi_member_value(&PsiPosition::Omega(0));
        let got = c.psi_of(&x);
        (got != expect).then(|| format!("psi({x}) = {got}, expected s0"))
    });

    h.check("s-formula-balanced", samples, seed, |c, g, _| {
        let x = g.psi_combination(8, Some(Scalar::one()));
        let min = x.min_position().unwrap().clone();
        let expect = c.psi_member_value(&c.ambient().order().succ(&min));
        let got = c.s_of(&x).unwrap();
        (got != expect).then(|| format!("s({x}) = {got}, expected {expect}"))
    });

    h.check("s-formula-unbalanced", samples, seed, |c, g, _| {
        let x = g.psi_combination(8, None);
        let q = x.coeff_sum().unwrap();
        if q.is_one() {
            return None;
        }
        let expect = c.psi_member_value(&PsiPosition::Omega(0));
        let got = c.s_of(&x).unwrap();
        (got != expect).then(|| format!("s({x}) = {got}, expected s0"))
    });

    h.check("successor-difference", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.element());
        let y = g.element();
        let (sx, sy) = (c.s_of(&x).unwrap(), c.s_of(&y).unwrap());
        if cmp_vals(m, &sx, &sy) == Ordering::Less {
            let d = m.sub(&y, &x).unwrap();
            if c.psi_of(&d) != sx {
                return Some(format!("psi({y} - {x}) != s({x}) despite s(x) < s(y)"));
            }
        }
        None
    });

    h.check("s-psi-agreement-far-out", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let s0 = c.s_zero_of();
        for q in [BigRational::new(BigInt::from(1), BigInt::from(2)), BigRational::from_integer(BigInt::from(1)), BigRational::from_integer(BigInt::from(7))] {
            let x = pinned.cloned().unwrap_or_else(|| g.nonzero());
            if x.is_zero() {
                continue;
            }
            let abs = if x.sign().unwrap() > 0 { x.clone() } else { x.neg() };
            let bound = s0.scale_rational(&(BigRational::from_integer(BigInt::from(1)) + &q));
            let babs = if bound.sign().unwrap() > 0 { bound } else { bound.neg() };
            if m.cmp_elems(&abs, &babs).unwrap() == Ordering::Greater
                && c.s_of(&x).unwrap() != c.psi_of(&x)
            {
                return Some(format!("s != psi at far-out x = {x} (q = {q})"));
            }
        }
        // boundary: s and psi disagree at s0 itself
        let s_at = c.s_of(&s0).unwrap();
        let psi_at = c.psi_of(&s0);
        if s_at == psi_at {
            return Some("s(s0) = psi(s0), boundary should separate".into());
        }
        None
    });

    h.check("t0-least-element", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let s0 = c.s_zero_of();
        let x = pinned.cloned().unwrap_or_else(|| g.nonzero());
        if x.is_zero() {
            return None;
        }
        let v = c.psi_of(&x);
        if cmp_vals(m, &v, &s0) == Ordering::Less {
            Some(format!("psi({x}) = {v} below s0"))
        } else {
            None
        }
    });

    h.check("t0-s0-positive", 1, seed, |c, _, _| {
        let s0 = c.s_zero_of();
        (s0.sign().unwrap() != 1).then(|| format!("least element is {s0}, not positive"))
    });

    h.check("t0-successor-set", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.nonzero());
        if x.is_zero() {
            return None;
        }
        let v = c.psi_of(&x);
        let sv = c.s_of(&v).unwrap();
        if cmp_vals(m, &v, &sv) != Ordering::Less {
            return Some(format!("s({v}) not above the Psi member"));
        }
        // nothing of Psi strictly in between
        let probe = c.psi_of(&g.nonzero());
        if cmp_vals(m, &v, &probe) == Ordering::Less && cmp_vals(m, &probe, &sv) == Ordering::Less {
            return Some(format!("{probe} lies strictly between {v} and its successor"));
        }
        None
    });

    h.check("t0-immediate-successor", samples, seed, |c, g, pinned| {
        // the successor of a Psi member is its immediate neighbour by index
        let x = pinned.cloned().unwrap_or_else(|| g.nonzero());
        if x.is_zero() {
            return None;
        }
        let pos = match c.psi_index_of(&c.psi_of(&x)) {
            Some(p) => p,
            None => return Some(format!("psi({x}) not recognized as a Psi member")),
        };
        let expect = c.psi_member_value(&c.ambient().order().succ(&pos));
        let got = c.s_of(&c.psi_of(&x)).unwrap();
        (got != expect).then(|| format!("s at Psi index {pos} is {got}, expected {expect}"))
    });

    h.check("t0-s-bijection", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let s0 = c.s_zero_of();
        let x = pinned.cloned().unwrap_or_else(|| g.nonzero());
        let y = g.nonzero();
        if x.is_zero() || y.is_zero() {
            return None;
        }
        let (u, v) = (c.psi_of(&x), c.psi_of(&y));
        let (su, sv) = (c.s_of(&u).unwrap(), c.s_of(&v).unwrap());
        if u != v && su == sv {
            return Some(format!("s not injective on Psi at {u}, {v}"));
        }
        if cmp_vals(m, &su, &s0) != Ordering::Greater {
            return Some(format!("s({u}) not above s0"));
        }
        // surjectivity onto Psi^{> s0}: p recovers a preimage
        if cmp_vals(m, &u, &s0) == Ordering::Greater {
            let pu = c.p_of(&u);
            if pu.is_infinite() || c.s_of(&pu).unwrap() != u {
                return Some(format!("p does not invert s at {u}"));
            }
        }
        None
    });

    CheckReport { suite: "functions".into(), target: c.ambient().to_string(), seed, outcomes: h.outcomes }
}

/// Order-side checks on a base model: the summation sign rule induces a
/// translation-invariant total order which agrees with the lexicographic
/// rule on omega-supported elements.
pub fn order_suite(model: &Model, samples: u64, seed: u64) -> CheckReport {
    let mut h = Harness { couple: model, grid: canonical_grid(model), outcomes: Vec::new() };

    h.check("order-total", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.element());
        let y = g.element();
        let z = g.element();
        let xy = m.cmp_elems(&x, &y).unwrap();
        let yx = m.cmp_elems(&y, &x).unwrap();
        if xy != yx.reverse() {
            return Some(format!("antisymmetry fails at {x}, {y}"));
        }
        let yz = m.cmp_elems(&y, &z).unwrap();
        if xy == yz && m.cmp_elems(&x, &z).unwrap() != xy {
            return Some(format!("transitivity fails at {x}, {y}, {z}"));
        }
        None
    });

    h.check("order-translation-invariant", samples, seed, |c, g, pinned| {
        let m = c.ambient();
        let x = pinned.cloned().unwrap_or_else(|| g.element());
        let y = g.element();
        let t = g.element();
        let before = m.cmp_elems(&x, &y).unwrap();
        let after = m.cmp_elems(&m.add(&x, &t).unwrap(), &m.add(&y, &t).unwrap()).unwrap();
        (before != after).then(|| format!("translation by {t} changes order of {x}, {y}"))
    });

    h.check("order-lex-agreement", samples, seed, |c, g, _| {
        let m = c.ambient();
        // random omega-supported element, checked against the lexicographic rule
        let n = g.rng().gen_range(0..=6usize);
        let mut coords = Vec::new();
        for _ in 0..n {
            coords.push(g.scalar());
        }
        let x = Element::from_omega_vector(&coords).unwrap();
        let lex = coords.iter().map(|s| s.sign()).find(|s| *s != 0).unwrap_or(0);
        let got = m.sign(&x).unwrap();
        (got != lex).then(|| format!("sign({x}) = {got}, lex rule gives {lex}"))
    });

    CheckReport { suite: "order".into(), target: model.to_string(), seed, outcomes: h.outcomes }
}

/// Cross-validation of s against psi in a one-copy extension: with a fresh
/// copy of Z on top of Psi and any of its generators g, `s(x) = psi*(x - g)`
/// computed in the extension.
pub fn external_successor_suite(model: &Model, samples: u64, seed: u64) -> CheckReport {
    let ext = model
        .order()
        .insert_copies(&[SCut::new(model.order().copy_count())], "xv")
        .expect("top cut insertion");
    let big = Model::new(ext.order.clone(), model.field());
    let gamma_star = Element::unit(PsiPosition::copy(&ext.new_copies[0], 0));

    let mut h = Harness { couple: model, grid: canonical_grid(model), outcomes: Vec::new() };
    h.check("s-via-external-psi", samples, seed, |c, g, pinned| {
        let x = pinned.cloned().unwrap_or_else(|| g.element());
        let lhs = c.s_of(&x).unwrap();
        let rhs = big.psi(&big.sub(&x, &gamma_star).unwrap());
        (lhs != rhs).then(|| format!("s({x}) != psi*({x} - g) in the extension"))
    });
    CheckReport { suite: "external-successor".into(), target: model.to_string(), seed, outcomes: h.outcomes }
}

/// The full per-model verification used by `axiom_check`: axioms, function
/// lemmas, order checks and the external-successor cross-check.
pub fn axiom_check(model: &Model, samples: u64, seed: u64) -> Vec<CheckReport> {
    vec![
        axiom_suite(model, samples, seed),
        function_suite(model, samples, seed),
        order_suite(model, samples, seed),
        external_successor_suite(model, samples, seed),
    ]
}

/// Couple with the psi values at two chosen points swapped; used to verify
/// that the suites detect a single-point fault.
pub struct MutatedPsi<'a> {
    pub inner: &'a dyn CoupleOps,
    pub a: Element,
    pub b: Element,
}

impl<'a> CoupleOps for MutatedPsi<'a> {
    fn ambient(&self) -> &Model {
        self.inner.ambient()
    }

    fn psi_of(&self, x: &Element) -> Element {
        if *x == self.a {
            self.inner.psi_of(&self.b)
        } else if *x == self.b {
            self.inner.psi_of(&self.a)
        } else {
            self.inner.psi_of(x)
        }
    }

    fn s_of(&self, x: &Element) -> Result<Element> {
        self.inner.s_of(x)
    }

    fn p_of(&self, x: &Element) -> Element {
        self.inner.p_of(x)
    }
}

/// Couple with the s values at two chosen points swapped.
pub struct MutatedSucc<'a> {
    pub inner: &'a dyn CoupleOps,
    pub a: Element,
    pub b: Element,
}

impl<'a> CoupleOps for MutatedSucc<'a> {
    fn ambient(&self) -> &Model {
        self.inner.ambient()
    }

    fn psi_of(&self, x: &Element) -> Element {
        self.inner.psi_of(x)
    }

    fn s_of(&self, x: &Element) -> Result<Element> {
        if *x == self.a {
            self.inner.s_of(&self.b)
        } else if *x == self.b {
            self.inner.s_of(&self.a)
        } else {
            self.inner.s_of(x)
        }
    }

    fn p_of(&self, x: &Element) -> Element {
        self.inner.p_of(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi_order::PsiOrder;
    use crate::scalar::Field;

    fn models() -> Vec<Model> {
        vec![
            Model::prime(),
            Model::new(PsiOrder::with_copies(&["c0"]).unwrap(), Field::Rational),
            Model::new(PsiOrder::with_copies(&["c0", "c1", "c2"]).unwrap(), Field::Quadratic(2)),
        ]
    }

    #[test]
    fn suites_pass_on_models() {
        for m in models() {
            for report in axiom_check(&m, 300, 7) {
                assert!(report.all_passed(), "\n{report}");
            }
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let m = Model::prime();
        let a = axiom_suite(&m, 200, 42).to_string();
        let b = axiom_suite(&m, 200, 42).to_string();
        assert_eq!(a, b);
    }

    #[test]
    fn psi_mutation_detected() {
        let m = Model::prime();
        let fault = MutatedPsi {
            inner: &m,
            a: m.parse_element("e1").unwrap(),
            b: m.parse_element("e2").unwrap(),
        };
        let bad = axiom_suite(&fault, 200, 3);
        assert!(!bad.all_passed(), "mutated psi slipped through:\n{bad}");
    }

    #[test]
    fn succ_mutation_detected() {
        let m = Model::prime();
        // s(e0) = s^2 0 while s(2*e0) = s0, so the swap is a real fault
        let fault = MutatedSucc {
            inner: &m,
            a: m.parse_element("e0").unwrap(),
            b: m.parse_element("2*e0").unwrap(),
        };
        let bad = function_suite(&fault, 200, 3);
        assert!(!bad.all_passed(), "mutated s slipped through:\n{bad}");
    }
}
