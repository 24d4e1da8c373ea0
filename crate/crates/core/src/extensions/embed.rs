//! The unique embedding of a copy-insertion extension determined by an
//! anchored family of target copies: each new copy of Z must land strictly
//! inside the image of its s-cut, families must stay in order, and the
//! successor structure rides along automatically because whole copies map
//! to whole copies with a fixed offset.

use crate::couple::Model;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::psi_order::{CopyId, InsertResult, PsiPosition};
use std::collections::BTreeMap;

/// Assignment of one inserted copy to a target copy, shifted by `offset`:
/// the k-th generator maps to the (k + offset)-th generator of the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyImage {
    pub source: CopyId,
    pub target: CopyId,
    pub offset: i64,
}

/// A verified embedding of the extended order into a target model.
#[derive(Debug, Clone)]
pub struct Embedding {
    base_map: BTreeMap<CopyId, CopyId>,
    images: BTreeMap<CopyId, (CopyId, i64)>,
}

impl Embedding {
    pub fn apply_position(&self, pos: &PsiPosition) -> Result<PsiPosition> {
        Ok(match pos {
            PsiPosition::Omega(n) => PsiPosition::Omega(*n),
            PsiPosition::Copy(id, k) => {
                if let Some(t) = self.base_map.get(id) {
                    PsiPosition::copy(t, *k)
                } else if let Some((t, off)) = self.images.get(id) {
                    PsiPosition::copy(t, k + off)
                } else {
                    return Err(Error::UnknownCopy(id.0.clone()));
                }
            }
        })
    }

    pub fn apply(&self, target: &Model, x: &Element) -> Result<Element> {
        match x {
            Element::Inf => Ok(Element::Inf),
            Element::Fin(terms) => {
                let mut mapped = Vec::with_capacity(terms.len());
                for (p, s) in terms {
                    mapped.push((self.apply_position(p)?, s.clone()));
                }
                Element::from_terms(target.order(), mapped)
            }
        }
    }
}

/// Builds the embedding determined by `family`, checking the cut,
/// ordering and distinctness constraints; the failing clause is reported.
pub fn embed_universal(
    base: &Model,
    insertion: &InsertResult,
    target: &Model,
    base_map: &[(CopyId, CopyId)],
    family: &[CopyImage],
) -> Result<Embedding> {
    let t_order = target.order();
    // base copies must map injectively and order-preservingly
    let mut bmap: BTreeMap<CopyId, CopyId> = BTreeMap::new();
    let mut last_rank: Option<usize> = None;
    for c in base.order().copies() {
        let img = base_map
            .iter()
            .find(|(s, _)| s == c)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| Error::EmbeddingConstraint(format!("base copy {c} has no image")))?;
        let r = t_order.copy_rank(&img)?;
        if let Some(prev) = last_rank {
            if r <= prev {
                return Err(Error::EmbeddingConstraint(format!(
                    "base image order broken at copy {c}"
                )));
            }
        }
        last_rank = Some(r);
        if bmap.values().any(|v| *v == img) {
            return Err(Error::EmbeddingConstraint(format!("base image {img} reused")));
        }
        bmap.insert(c.clone(), img);
    }
    if insertion.new_copies.len() != insertion.cuts.len() {
        return Err(Error::Internal("insertion data out of sync".into()));
    }
    let mut images: BTreeMap<CopyId, (CopyId, i64)> = BTreeMap::new();
    let mut prev_family_rank: Option<usize> = None;
    for (idx, fresh) in insertion.new_copies.iter().enumerate() {
        let img = family
            .iter()
            .find(|f| &f.source == fresh)
            .ok_or_else(|| Error::EmbeddingConstraint(format!("new copy {fresh} unanchored")))?;
        let rank = t_order.copy_rank(&img.target)?;
        if bmap.values().any(|v| *v == img.target)
            || images.values().any(|(t, _)| *t == img.target)
        {
            return Err(Error::EmbeddingConstraint(format!(
                "target copy {} reused",
                img.target
            )));
        }
        // the image must realize the source cut against the mapped base:
        // strictly above every base copy below the cut, strictly below the
        // cut's tail
        let cut = insertion.cuts[idx];
        for (i, b) in base.order().copies().iter().enumerate() {
            let br = t_order.copy_rank(&bmap[b])?;
            if i < cut.tail_from && br >= rank {
                return Err(Error::EmbeddingConstraint(format!(
                    "image of {fresh} sits below the mapped copy {b} outside its cut"
                )));
            }
            if i >= cut.tail_from && br <= rank {
                return Err(Error::EmbeddingConstraint(format!(
                    "image of {fresh} sits above the mapped copy {b} inside its cut"
                )));
            }
        }
        // families stay in their listed order
        if let Some(prev) = prev_family_rank {
            if rank <= prev {
                return Err(Error::EmbeddingConstraint(format!(
                    "family images out of order at {fresh}"
                )));
            }
        }
        prev_family_rank = Some(rank);
        images.insert(fresh.clone(), (img.target.clone(), img.offset));
    }
    let emb = Embedding { base_map: bmap, images };
    // spot-check the defining inequalities on a window of generators
    let source_model = Model::new(insertion.order.clone(), base.field());
    for fresh in &insertion.new_copies {
        for k in [-16i64, -1, 0, 1, 16] {
            let pos = PsiPosition::copy(fresh, k);
            let img = emb.apply_position(&pos)?;
            let succ_img = emb.apply_position(&source_model.order().succ(&pos))?;
            if t_order.succ(&img) != succ_img {
                return Err(Error::EmbeddingConstraint(format!(
                    "successor not preserved at {pos}"
                )));
            }
        }
    }
    Ok(emb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi_order::{PsiOrder, SCut};
    use crate::scalar::Field;

    fn base() -> Model {
        Model::new(PsiOrder::with_copies(&["c0"]).unwrap(), Field::Rational)
    }

    fn ids(names: &[&str]) -> Vec<CopyId> {
        names.iter().map(|n| CopyId::new(*n)).collect()
    }

    #[test]
    fn valid_family_embeds_and_preserves_order() {
        let b = base();
        // insert one copy below c0
        let ins = b.order().insert_copies(&[SCut::new(0)], "d").unwrap();
        let source = Model::new(ins.order.clone(), Field::Rational);
        // target: three copies, the middle one free for the image
        let t = Model::new(PsiOrder::with_copies(&["t0", "t1", "t2"]).unwrap(), Field::Rational);
        let bm = vec![(CopyId::new("c0"), CopyId::new("t2"))];
        let fam = vec![CopyImage { source: ins.new_copies[0].clone(), target: CopyId::new("t1"), offset: 0 }];
        let emb = embed_universal(&b, &ins, &t, &bm, &fam).unwrap();
        // order and psi preserved on a few elements
        let xs = [
            source.parse_element("e0 - 2*e3").unwrap(),
            source.parse_element(&format!("b[{},0] - b[c0,5]", ins.new_copies[0])).unwrap(),
            source.parse_element(&format!("3*b[{},{}]", ins.new_copies[0], -2)).unwrap(),
        ];
        for x in &xs {
            for y in &xs {
                let hx = emb.apply(&t, x).unwrap();
                let hy = emb.apply(&t, y).unwrap();
                assert_eq!(
                    source.cmp_elems(x, y).unwrap(),
                    t.cmp_elems(&hx, &hy).unwrap(),
                    "order preserved"
                );
            }
            let hx = emb.apply(&t, x).unwrap();
            assert_eq!(emb.apply(&t, &source.psi(x)).unwrap(), t.psi(&hx), "psi preserved");
        }
    }

    #[test]
    fn cut_mismatch_rejected() {
        let b = base();
        let ins = b.order().insert_copies(&[SCut::new(0)], "d").unwrap();
        let t = Model::new(PsiOrder::with_copies(&["t0", "t1"]).unwrap(), Field::Rational);
        // base c0 -> t0, new copy must land BELOW it, but we aim above
        let bm = vec![(CopyId::new("c0"), CopyId::new("t0"))];
        let fam = vec![CopyImage { source: ins.new_copies[0].clone(), target: CopyId::new("t1"), offset: 0 }];
        assert!(matches!(
            embed_universal(&b, &ins, &t, &bm, &fam),
            Err(Error::EmbeddingConstraint(_))
        ));
    }

    #[test]
    fn shifted_anchor_gives_a_different_embedding() {
        let b = Model::prime();
        let ins = b.order().insert_copies(&[SCut::new(0)], "d").unwrap();
        let t = Model::new(PsiOrder::with_copies(&["t0"]).unwrap(), Field::Rational);
        let fam0 = vec![CopyImage { source: ins.new_copies[0].clone(), target: CopyId::new("t0"), offset: 0 }];
        let fam3 = vec![CopyImage { source: ins.new_copies[0].clone(), target: CopyId::new("t0"), offset: 3 }];
        let e0 = embed_universal(&b, &ins, &t, &[], &fam0).unwrap();
        let e3 = embed_universal(&b, &ins, &t, &[], &fam3).unwrap();
        let source = Model::new(ins.order.clone(), Field::Rational);
        let x = source.parse_element(&format!("b[{},1]", ins.new_copies[0])).unwrap();
        let y0 = e0.apply(&t, &x).unwrap();
        let y3 = e3.apply(&t, &x).unwrap();
        assert_ne!(y0, y3);
        assert_eq!(y3, t.parse_element("b[t0,4]").unwrap());
        let _ = ids(&[]);
    }
}
