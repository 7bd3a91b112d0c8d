//! Shapes and shape projection.
//!
//! A shape is a planted diagram without 1-arcs, stacks and isolated
//! vertices. Projection works on the planted diagram and protects the
//! rainbows: a rainbow is always the outermost arc of its stack, so
//! collapsing keeps it, and it is never removed as a 1-arc.

use std::ops::Deref;

use serde::Serialize;

use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::fatgraph::genus_of;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape(Diagram);

impl Shape {
    /// Validates `d` against the shape predicate and marks it planted.
    pub fn new(d: Diagram) -> Result<Shape> {
        if let Some(reason) = shape_violation(&d) {
            return Err(Error::Precondition(format!("not a shape: {reason}")));
        }
        Ok(Shape(d.mark_planted()?))
    }

    pub(crate) fn new_unchecked(d: Diagram) -> Shape {
        debug_assert!(is_shape(&d), "{d}");
        Shape(d.mark_planted().expect("shape without rainbows"))
    }

    pub fn diagram(&self) -> &Diagram {
        &self.0
    }

    pub fn into_diagram(self) -> Diagram {
        self.0
    }

    pub fn genus(&self) -> i64 {
        genus_of(&self.0)
    }

    /// Arcs that are not rainbows.
    pub fn inner_arc_count(&self) -> usize {
        self.0.arc_count() - self.0.backbone_count()
    }
}

impl Deref for Shape {
    type Target = Diagram;

    fn deref(&self) -> &Diagram {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ShapeClass {
    A,
    B,
}

/// First reason `d` fails the shape predicate, if any.
fn shape_violation(d: &Diagram) -> Option<String> {
    let partner = d.partner_table();
    if let Some(v) = partner.iter().position(Option::is_none) {
        return Some(format!("vertex {} is isolated", v + 1));
    }
    for k in 0..d.backbone_count() {
        let (first, last) = d.backbone_span(k);
        if d.partner(first) != Some(last) {
            return Some(format!("backbone {} has no rainbow", k + 1));
        }
    }
    let ids = d.backbone_ids();
    for i in 0..partner.len() {
        let j = partner[i].unwrap();
        if j == i + 1 && ids[i] == ids[j] {
            return Some(format!("1-arc {}-{}", i + 1, j + 1));
        }
        if j > i + 2 && partner[i + 1] == Some(j - 1) {
            return Some(format!("stack {}-{} over {}-{}", i + 1, j + 1, i + 2, j));
        }
    }
    None
}

pub fn is_shape(d: &Diagram) -> bool {
    shape_violation(d).is_none()
}

/// Result of [`project_shape`]. `diagram` is planted; `empty` flags a
/// projection in which only the rainbows survived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub diagram: Diagram,
    pub empty: bool,
}

impl Projection {
    /// The projected diagram as a shape, unless some backbone kept nothing
    /// but its rainbow.
    pub fn shape(&self) -> Option<Shape> {
        is_shape(&self.diagram).then(|| Shape::new_unchecked(self.diagram.clone()))
    }
}

/// Order of the two reduction steps within one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) enum StepOrder {
    CollapseFirst,
    DeleteFirst,
}

struct Work {
    lengths: Vec<usize>,
    partner: Vec<Option<usize>>,
}

impl Work {
    fn ids(&self) -> Vec<usize> {
        self.lengths
            .iter()
            .enumerate()
            .flat_map(|(k, &len)| std::iter::repeat_n(k, len))
            .collect()
    }

    /// Drops unpaired vertices; reports whether any were dropped.
    fn compact(&mut self) -> bool {
        let ids = self.ids();
        let mut relabel = vec![None; self.partner.len()];
        let mut next = 0;
        for (v, slot) in relabel.iter_mut().enumerate() {
            if self.partner[v].is_some() {
                *slot = Some(next);
                next += 1;
            }
        }
        if next == self.partner.len() {
            return false;
        }
        let mut partner = vec![None; next];
        let mut lengths = vec![0; self.lengths.len()];
        for (v, p) in self.partner.iter().enumerate() {
            if let (Some(nv), Some(p)) = (relabel[v], p) {
                partner[nv] = relabel[*p];
                lengths[ids[v]] += 1;
            }
        }
        self.partner = partner;
        self.lengths = lengths;
        true
    }

    /// Keeps the outermost arc of every maximal stack.
    fn collapse_stacks(&mut self) -> bool {
        let n = self.partner.len();
        let inner: Vec<usize> = (1..n)
            .filter(|&i| match self.partner[i] {
                Some(j) => j > i && j + 1 < n && self.partner[i - 1] == Some(j + 1),
                None => false,
            })
            .collect();
        for &i in &inner {
            let j = self.partner[i].take().unwrap();
            self.partner[j] = None;
        }
        let removed = !inner.is_empty();
        self.compact() || removed
    }

    /// Removes 1-arcs inside a backbone, rainbows excepted, and isolated
    /// vertices.
    fn delete_one_arcs(&mut self) -> bool {
        let ids = self.ids();
        let mut starts = Vec::with_capacity(self.lengths.len());
        let mut s = 0;
        for &len in &self.lengths {
            starts.push(s);
            s += len;
        }
        let n = self.partner.len();
        let hairpins: Vec<usize> = (0..n.saturating_sub(1))
            .filter(|&i| {
                let rainbow = starts[ids[i]] == i && self.lengths[ids[i]] == 2;
                self.partner[i] == Some(i + 1) && ids[i] == ids[i + 1] && !rainbow
            })
            .collect();
        for &i in &hairpins {
            self.partner[i] = None;
            self.partner[i + 1] = None;
        }
        let removed = !hairpins.is_empty();
        self.compact() || removed
    }
}

pub(crate) fn project_with(d: &Diagram, order: StepOrder) -> Projection {
    let planted = if d.is_planted() {
        d.clone()
    } else {
        d.plant().expect("unplanted diagram")
    };
    let mut work = Work {
        lengths: planted.backbone_lengths().to_vec(),
        partner: planted.partner_table().to_vec(),
    };
    work.compact();
    loop {
        let changed = match order {
            StepOrder::CollapseFirst => work.collapse_stacks() | work.delete_one_arcs(),
            StepOrder::DeleteFirst => work.delete_one_arcs() | work.collapse_stacks(),
        };
        if !changed {
            break;
        }
    }
    let empty = work.lengths.iter().all(|&len| len == 2);
    let diagram = Diagram::from_partner(work.lengths, work.partner, false)
        .mark_planted()
        .expect("rainbows survive projection");
    Projection { diagram, empty }
}

/// Iterates stack collapse and removal of 1-arcs and isolated vertices to a
/// fixpoint, starting from the planted diagram. Accepts planted or
/// unplanted input.
pub fn project_shape(d: &Diagram) -> Projection {
    project_with(d, StepOrder::CollapseFirst)
}

/// A/B class of a one-backbone shape: A iff the vertex right after the
/// partner of the first inner vertex is paired with the last inner vertex.
pub fn shape_class(s: &Shape) -> Result<ShapeClass> {
    if s.backbone_count() != 1 {
        return Err(Error::Precondition("A/B classes are defined for one backbone only".into()));
    }
    if s.inner_arc_count() == 0 {
        return Err(Error::Precondition("rainbow-only shape has no A/B class".into()));
    }
    let last_inner = s.vertex_count() - 1;
    let after = s.partner(2).expect("shape vertices are paired") + 1;
    if after < last_inner && s.partner(after) == Some(last_inner) {
        Ok(ShapeClass::A)
    } else {
        Ok(ShapeClass::B)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fatgraph::genus_of;

    fn d(lengths: &[usize], arcs: &[(usize, usize)]) -> Diagram {
        Diagram::new(lengths.to_vec(), arcs).unwrap()
    }

    fn shape(lengths: &[usize], arcs: &[(usize, usize)]) -> Shape {
        Shape::new(d(lengths, arcs)).unwrap()
    }

    #[test]
    fn stem_loop_projects_to_rainbow() {
        let p = project_shape(&d(&[6], &[(1, 6), (2, 5), (3, 4)]));
        assert!(p.empty);
        assert_eq!(p.diagram.arcs(), vec![(1, 2)]);
        assert_eq!(genus_of(&p.diagram), 0);
        assert!(p.shape().is_none());
    }

    #[test]
    fn crossing_pair_is_fixed() {
        let p = project_shape(&d(&[4], &[(1, 3), (2, 4)]));
        assert!(!p.empty);
        let s = p.shape().unwrap();
        assert_eq!(s.arcs(), vec![(1, 6), (2, 4), (3, 5)]);
        assert_eq!(s.genus(), 1);
    }

    #[test]
    fn gap_arc_survives() {
        let p = project_shape(&d(&[1, 1], &[(1, 2)]));
        let s = p.shape().unwrap();
        assert_eq!(s.backbone_lengths(), &[3, 3]);
        assert_eq!(s.arc_count(), 3);
        assert_eq!(s.genus(), 0);
    }

    #[test]
    fn stack_under_rainbow_collapses() {
        let p = project_shape(&d(&[6], &[(1, 6), (2, 4), (3, 5)]));
        assert_eq!(p.diagram.arcs(), vec![(1, 6), (2, 4), (3, 5)]);
    }

    #[test]
    fn iterated_projection() {
        // hairpin removal exposes a stack, whose collapse exposes a 1-arc
        let x = d(&[10], &[(1, 5), (2, 3), (4, 8), (6, 9), (7, 10)]);
        let p = project_shape(&x);
        assert_eq!(genus_of(&p.diagram), genus_of(&x.plant().unwrap()));
        assert!(is_shape(&p.diagram));
    }

    #[test]
    fn shape_predicate() {
        assert!(is_shape(&d(&[4], &[(1, 3), (2, 4)]).plant().unwrap()));
        assert!(!is_shape(&d(&[4], &[(1, 4), (2, 3)]).plant().unwrap()));
        assert!(!is_shape(&d(&[5], &[(1, 3), (2, 4)]).plant().unwrap()));
        assert!(!is_shape(&d(&[4], &[(1, 3), (2, 4)])));
    }

    #[test]
    fn classes() {
        let a = shape(&[8], &[(1, 8), (2, 4), (3, 6), (5, 7)]);
        assert_eq!(shape_class(&a).unwrap(), ShapeClass::A);
        let b = shape(&[6], &[(1, 6), (2, 4), (3, 5)]);
        assert_eq!(shape_class(&b).unwrap(), ShapeClass::B);
        let two = shape(&[3, 3], &[(1, 3), (4, 6), (2, 5)]);
        assert!(shape_class(&two).is_err());
    }

    #[test]
    fn confluence_on_small_cases() {
        let x = d(&[12], &[(1, 12), (2, 11), (3, 5), (4, 9), (6, 8), (7, 10)]);
        assert_eq!(
            project_with(&x, StepOrder::CollapseFirst),
            project_with(&x, StepOrder::DeleteFirst)
        );
    }

    mod props {
        use super::*;
        use crate::diagram::tests::props::arb_diagram;
        use crate::fatgraph::genus_of;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn step_order_does_not_matter(x in arb_diagram()) {
                prop_assert_eq!(project_with(&x, StepOrder::CollapseFirst), project_with(&x, StepOrder::DeleteFirst));
            }

            #[test]
            fn projection_is_idempotent(x in arb_diagram()) {
                let once = project_shape(&x);
                prop_assert_eq!(project_shape(&once.diagram), once.clone());
                prop_assert_eq!(genus_of(&once.diagram), genus_of(&x));
                let bare_rainbow = once.diagram.backbone_lengths().contains(&2);
                prop_assert_eq!(once.shape().is_some(), !bare_rainbow);
            }
        }
    }
}
