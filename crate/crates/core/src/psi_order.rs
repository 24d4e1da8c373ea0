//! The index set of the Psi set of a finitely presented model: order type
//! omega followed by finitely many copies of Z.
//!
//! `Omega(n)` names the n-th element of the initial omega ladder (as a group
//! element it is `s^{n+1} 0`), `Copy(c, k)` names the k-th element of the
//! copy of Z labelled `c`. Copies carry stable opaque identifiers so that
//! inserting new copies never renumbers existing positions; the order of the
//! copies is a separate sequence held by [`PsiOrder`].

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::fmt;

/// Stable identifier of one copy of Z.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CopyId(pub String);

impl CopyId {
    pub fn new(name: impl Into<String>) -> CopyId {
        CopyId(name.into())
    }
}

impl fmt::Display for CopyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point of the Psi index set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PsiPosition {
    /// n-th rung of the initial omega ladder; denotes `s^{n+1} 0`.
    Omega(u32),
    /// k-th element of the copy labelled by the id.
    Copy(CopyId, i64),
}

impl PsiPosition {
    pub fn omega(n: u32) -> PsiPosition {
        PsiPosition::Omega(n)
    }

    pub fn copy(id: &CopyId, k: i64) -> PsiPosition {
        PsiPosition::Copy(id.clone(), k)
    }

    pub fn copy_id(&self) -> Option<&CopyId> {
        match self {
            PsiPosition::Omega(_) => None,
            PsiPosition::Copy(id, _) => Some(id),
        }
    }

    pub fn is_min(&self) -> bool {
        matches!(self, PsiPosition::Omega(0))
    }
}

impl fmt::Display for PsiPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiPosition::Omega(n) => write!(f, "w{n}"),
            PsiPosition::Copy(id, k) => write!(f, "b[{id},{k}]"),
        }
    }
}

/// The s-class a position lives on: the initial omega ladder or one copy.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SClass {
    OmegaPart,
    Copy(CopyId),
}

impl SClass {
    pub fn of(pos: &PsiPosition) -> SClass {
        match pos {
            PsiPosition::Omega(_) => SClass::OmegaPart,
            PsiPosition::Copy(id, _) => SClass::Copy(id.clone()),
        }
    }
}

impl fmt::Display for SClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SClass::OmegaPart => write!(f, "omega"),
            SClass::Copy(id) => write!(f, "copy {id}"),
        }
    }
}

/// Relation between the s-classes of two positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SClassRelation {
    Same,
    /// Left position is infinitely below: `s^n a < b` for all n.
    MuchBelow,
    MuchAbove,
}

/// An s-cut: an upward closed subset of Psi whose complement is closed under
/// the successor. Over a finitely presented order these are exactly the tails
/// of the copy sequence, so a cut is the index of the first selected copy.
/// `tail_from = m` (all copies skipped) is the empty cut at the top of Psi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SCut {
    pub tail_from: usize,
}

impl SCut {
    pub fn new(tail_from: usize) -> SCut {
        SCut { tail_from }
    }
}

impl fmt::Display for SCut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cut {}", self.tail_from)
    }
}

/// Finite descriptor of an arbitrary cut realizable over the order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutDescriptor {
    AtPosition(PsiPosition, Side),
    BetweenOmegaAndCopies,
    /// Between two adjacent copies, named by their ids.
    BetweenCopies(CopyId, CopyId),
    AboveAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Canonical form of a cut: immediately below a position, or in the gap
/// after a whole s-class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonicalCut {
    Below(PsiPosition),
    AfterClass(SClass),
}

/// The whole successor-ordered index set: omega ladder followed by the
/// listed copies, in sequence order. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiOrder {
    copies: Vec<CopyId>,
}

impl PsiOrder {
    pub fn prime() -> PsiOrder {
        PsiOrder { copies: Vec::new() }
    }

    pub fn with_copies(names: &[&str]) -> Result<PsiOrder> {
        let mut copies = Vec::new();
        for n in names {
            let id = CopyId::new(*n);
            if copies.contains(&id) {
                return Err(Error::DuplicateCopy(id.0));
            }
            copies.push(id);
        }
        Ok(PsiOrder { copies })
    }

    pub fn copies(&self) -> &[CopyId] {
        &self.copies
    }

    pub fn copy_count(&self) -> usize {
        self.copies.len()
    }

    pub fn copy_rank(&self, id: &CopyId) -> Result<usize> {
        self.copies
            .iter()
            .position(|c| c == id)
            .ok_or_else(|| Error::UnknownCopy(id.0.clone()))
    }

    pub fn validate(&self, pos: &PsiPosition) -> Result<()> {
        match pos {
            PsiPosition::Omega(_) => Ok(()),
            PsiPosition::Copy(id, _) => self.copy_rank(id).map(|_| ()),
        }
    }

    /// Total order on positions: the omega ladder first, then the copies in
    /// sequence order, each ordered by its integer index.
    pub fn cmp_pos(&self, a: &PsiPosition, b: &PsiPosition) -> Result<Ordering> {
        Ok(match (a, b) {
            (PsiPosition::Omega(n), PsiPosition::Omega(m)) => n.cmp(m),
            (PsiPosition::Omega(_), PsiPosition::Copy(id, _)) => {
                self.copy_rank(id)?;
                Ordering::Less
            }
            (PsiPosition::Copy(id, _), PsiPosition::Omega(_)) => {
                self.copy_rank(id)?;
                Ordering::Greater
            }
            (PsiPosition::Copy(i, k), PsiPosition::Copy(j, l)) => {
                let ri = self.copy_rank(i)?;
                let rj = self.copy_rank(j)?;
                ri.cmp(&rj).then(k.cmp(l))
            }
        })
    }

    /// Immediate successor; stays on the same s-class.
    pub fn succ(&self, pos: &PsiPosition) -> PsiPosition {
        match pos {
            PsiPosition::Omega(n) => PsiPosition::Omega(n + 1),
            PsiPosition::Copy(id, k) => PsiPosition::Copy(id.clone(), k + 1),
        }
    }

    /// Immediate predecessor; undefined at the minimum `Omega(0)`.
    pub fn pred(&self, pos: &PsiPosition) -> Option<PsiPosition> {
        match pos {
            PsiPosition::Omega(0) => None,
            PsiPosition::Omega(n) => Some(PsiPosition::Omega(n - 1)),
            PsiPosition::Copy(id, k) => Some(PsiPosition::Copy(id.clone(), k - 1)),
        }
    }

    pub fn s_class_relation(&self, a: &PsiPosition, b: &PsiPosition) -> Result<SClassRelation> {
        self.validate(a)?;
        self.validate(b)?;
        let rank = |p: &PsiPosition| -> Result<usize> {
            Ok(match p {
                PsiPosition::Omega(_) => 0,
                PsiPosition::Copy(id, _) => self.copy_rank(id)? + 1,
            })
        };
        let ra = rank(a)?;
        let rb = rank(b)?;
        Ok(match ra.cmp(&rb) {
            Ordering::Equal => SClassRelation::Same,
            Ordering::Less => SClassRelation::MuchBelow,
            Ordering::Greater => SClassRelation::MuchAbove,
        })
    }

    /// All s-cuts in ascending sded order; the full-Psi cut is excluded.
    pub fn scut_list(&self) -> Vec<SCut> {
        (0..=self.copies.len()).map(SCut::new).collect()
    }

    pub fn validate_cut(&self, cut: SCut) -> Result<()> {
        if cut.tail_from <= self.copies.len() {
            Ok(())
        } else {
            Err(Error::InvalidCut(cut.tail_from, self.copies.len()))
        }
    }

    /// Whether the position lies in the upward closed set selected by `cut`.
    pub fn pos_in_cut(&self, pos: &PsiPosition, cut: SCut) -> Result<bool> {
        self.validate_cut(cut)?;
        Ok(match pos {
            PsiPosition::Omega(_) => false,
            PsiPosition::Copy(id, _) => self.copy_rank(id)? >= cut.tail_from,
        })
    }

    /// Membership of a position in the order (used by submodels which reuse
    /// ambient ids).
    pub fn contains_copy(&self, id: &CopyId) -> bool {
        self.copies.contains(id)
    }

    /// Inserts fresh copies of Z at the s-cuts listed in `cuts`, which must be
    /// nondecreasing. Copies sharing a cut are placed left to right in list
    /// order; existing positions keep their identity. Returns the extended
    /// order together with the ids of the new copies, in list order.
    pub fn insert_copies(&self, cuts: &[SCut], prefix: &str) -> Result<InsertResult> {
        for w in cuts.windows(2) {
            if w[0].tail_from > w[1].tail_from {
                return Err(Error::DecreasingCuts);
            }
        }
        for &c in cuts {
            self.validate_cut(c)?;
        }
        let mut fresh = Vec::new();
        let mut n = 0usize;
        for _ in cuts {
            let id = loop {
                let candidate = CopyId::new(format!("{prefix}{n}"));
                n += 1;
                if !self.contains_copy(&candidate) && !fresh.contains(&candidate) {
                    break candidate;
                }
            };
            fresh.push(id);
        }
        let mut copies = Vec::with_capacity(self.copies.len() + cuts.len());
        let mut new_iter = cuts.iter().zip(fresh.iter()).peekable();
        for (rank, old) in self.copies.iter().enumerate() {
            while let Some((cut, _)) = new_iter.peek() {
                if cut.tail_from <= rank {
                    let (_, id) = new_iter.next().unwrap();
                    copies.push(id.clone());
                } else {
                    break;
                }
            }
            copies.push(old.clone());
        }
        for (_, id) in new_iter {
            copies.push(id.clone());
        }
        Ok(InsertResult {
            order: PsiOrder { copies },
            new_copies: fresh,
            cuts: cuts.to_vec(),
        })
    }

    /// Canonicalizes an arbitrary cut descriptor.
    pub fn canonical_cut(&self, cut: &CutDescriptor) -> Result<CanonicalCut> {
        Ok(match cut {
            CutDescriptor::AtPosition(pos, Side::Left) => {
                self.validate(pos)?;
                CanonicalCut::Below(pos.clone())
            }
            CutDescriptor::AtPosition(pos, Side::Right) => {
                self.validate(pos)?;
                CanonicalCut::Below(self.succ(pos))
            }
            CutDescriptor::BetweenOmegaAndCopies => CanonicalCut::AfterClass(SClass::OmegaPart),
            CutDescriptor::BetweenCopies(lo, hi) => {
                let rl = self.copy_rank(lo)?;
                let rh = self.copy_rank(hi)?;
                if rh != rl + 1 {
                    return Err(Error::BadElement(format!("copies {lo} and {hi} are not adjacent")));
                }
                CanonicalCut::AfterClass(SClass::Copy(lo.clone()))
            }
            CutDescriptor::AboveAll => match self.copies.last() {
                Some(last) => CanonicalCut::AfterClass(SClass::Copy(last.clone())),
                None => CanonicalCut::AfterClass(SClass::OmegaPart),
            },
        })
    }

    /// Positions strictly below / above-or-at a canonical cut, for checks.
    pub fn pos_below_cut(&self, pos: &PsiPosition, cut: &CanonicalCut) -> Result<bool> {
        Ok(match cut {
            CanonicalCut::Below(b) => self.cmp_pos(pos, b)? == Ordering::Less,
            CanonicalCut::AfterClass(SClass::OmegaPart) => matches!(pos, PsiPosition::Omega(_)),
            CanonicalCut::AfterClass(SClass::Copy(id)) => {
                let r = self.copy_rank(id)?;
                match pos {
                    PsiPosition::Omega(_) => true,
                    PsiPosition::Copy(c, _) => self.copy_rank(c)? <= r,
                }
            }
        })
    }
}

/// Result of a copy insertion. Old positions embed unchanged (ids are
/// stable), so the embedding of the base order is the identity on positions.
#[derive(Debug, Clone)]
pub struct InsertResult {
    pub order: PsiOrder,
    pub new_copies: Vec<CopyId>,
    pub cuts: Vec<SCut>,
}

impl InsertResult {
    /// The embedding of base positions into the extended order.
    pub fn embed_position(&self, pos: &PsiPosition) -> Result<PsiPosition> {
        self.order.validate(pos)?;
        Ok(pos.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order2() -> PsiOrder {
        PsiOrder::with_copies(&["c0", "c1"]).unwrap()
    }

    #[test]
    fn omega_part_order() {
        let p = PsiOrder::prime();
        assert_eq!(p.cmp_pos(&PsiPosition::Omega(0), &PsiPosition::Omega(3)).unwrap(), Ordering::Less);
    }

    #[test]
    fn omega_below_every_copy() {
        let p = order2();
        let c0 = CopyId::new("c0");
        assert_eq!(
            p.cmp_pos(&PsiPosition::Omega(100), &PsiPosition::copy(&c0, -50)).unwrap(),
            Ordering::Less
        );
    }

    #[test]
    fn copies_ordered_by_sequence() {
        let p = order2();
        let c0 = CopyId::new("c0");
        let c1 = CopyId::new("c1");
        assert_eq!(
            p.cmp_pos(&PsiPosition::copy(&c0, 5), &PsiPosition::copy(&c1, -9)).unwrap(),
            Ordering::Less
        );
    }

    #[test]
    fn unknown_copy_rejected() {
        let p = PsiOrder::prime();
        let c = CopyId::new("nope");
        assert!(matches!(
            p.cmp_pos(&PsiPosition::copy(&c, 0), &PsiPosition::Omega(0)),
            Err(Error::UnknownCopy(_))
        ));
    }

    #[test]
    fn successor_and_predecessor() {
        let p = order2();
        let c0 = CopyId::new("c0");
        assert_eq!(p.succ(&PsiPosition::Omega(2)), PsiPosition::Omega(3));
        assert_eq!(p.succ(&PsiPosition::copy(&c0, -1)), PsiPosition::copy(&c0, 0));
        assert_eq!(p.pred(&PsiPosition::Omega(0)), None);
        assert_eq!(p.pred(&PsiPosition::copy(&c0, 0)), Some(PsiPosition::copy(&c0, -1)));
    }

    #[test]
    fn scut_lists() {
        assert_eq!(PsiOrder::prime().scut_list(), vec![SCut::new(0)]);
        assert_eq!(order2().scut_list(), vec![SCut::new(0), SCut::new(1), SCut::new(2)]);
        assert!(SCut::new(0) <= SCut::new(1));
    }

    #[test]
    fn s_class_relations() {
        let p = order2();
        let c0 = CopyId::new("c0");
        let c1 = CopyId::new("c1");
        assert_eq!(
            p.s_class_relation(&PsiPosition::Omega(3), &PsiPosition::Omega(7)).unwrap(),
            SClassRelation::Same
        );
        assert_eq!(
            p.s_class_relation(&PsiPosition::Omega(9), &PsiPosition::copy(&c0, 0)).unwrap(),
            SClassRelation::MuchBelow
        );
        assert_eq!(
            p.s_class_relation(&PsiPosition::copy(&c1, 2), &PsiPosition::copy(&c0, 2)).unwrap(),
            SClassRelation::MuchAbove
        );
    }

    #[test]
    fn insert_two_copies_in_empty_cut() {
        let p = PsiOrder::prime();
        let r = p.insert_copies(&[SCut::new(0), SCut::new(0)], "d").unwrap();
        assert_eq!(r.new_copies.len(), 2);
        // first list entry lands to the left of the second
        assert_eq!(r.order.copies(), &[r.new_copies[0].clone(), r.new_copies[1].clone()]);
    }

    #[test]
    fn insert_between_omega_and_copy() {
        let p = PsiOrder::with_copies(&["c0"]).unwrap();
        let r = p.insert_copies(&[SCut::new(0)], "d").unwrap();
        assert_eq!(r.order.copies(), &[r.new_copies[0].clone(), CopyId::new("c0")]);
        // old positions unchanged
        let c0 = CopyId::new("c0");
        assert_eq!(r.embed_position(&PsiPosition::copy(&c0, 3)).unwrap(), PsiPosition::copy(&c0, 3));
    }

    #[test]
    fn decreasing_cuts_rejected() {
        let p = order2();
        assert_eq!(
            p.insert_copies(&[SCut::new(1), SCut::new(0)], "d").unwrap_err(),
            Error::DecreasingCuts
        );
    }

    #[test]
    fn cut_canonicalization() {
        let p = order2();
        let c0 = CopyId::new("c0");
        let c1 = CopyId::new("c1");
        assert_eq!(
            p.canonical_cut(&CutDescriptor::AtPosition(PsiPosition::copy(&c0, 1), Side::Right)).unwrap(),
            CanonicalCut::Below(PsiPosition::copy(&c0, 2))
        );
        assert_eq!(
            p.canonical_cut(&CutDescriptor::BetweenCopies(c0.clone(), c1.clone())).unwrap(),
            CanonicalCut::AfterClass(SClass::Copy(c0.clone()))
        );
        assert_eq!(
            p.canonical_cut(&CutDescriptor::AboveAll).unwrap(),
            CanonicalCut::AfterClass(SClass::Copy(c1))
        );
    }

    #[test]
    fn insertion_preserves_order_and_successors() {
        let p = order2();
        let r = p.insert_copies(&[SCut::new(1)], "d").unwrap();
        let q = &r.order;
        let c0 = CopyId::new("c0");
        let c1 = CopyId::new("c1");
        let d0 = &r.new_copies[0];
        assert_eq!(q.copies(), &[c0.clone(), d0.clone(), c1.clone()]);
        // new copy realizes its cut: above everything below copy rank 1, below the tail
        for k in -16..=16i64 {
            assert_eq!(q.cmp_pos(&PsiPosition::copy(&c0, k), &PsiPosition::copy(d0, 0)).unwrap(), Ordering::Less);
            assert_eq!(q.cmp_pos(&PsiPosition::copy(d0, k), &PsiPosition::copy(&c1, -16)).unwrap(), Ordering::Less);
            let pos = PsiPosition::copy(d0, k);
            assert_eq!(q.pred(&q.succ(&pos)).unwrap(), pos);
        }
    }
}
