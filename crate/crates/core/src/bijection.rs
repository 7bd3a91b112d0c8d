//! Shape surgeries relating one- and two-backbone shapes.
//!
//! `theta` pairs A-shapes with `n + 2` arcs and B-shapes with `n + 1` arcs
//! of the same genus. `eta` glues the two backbones of a (possibly
//! disconnected) two-backbone shape of genus `g` into a one-backbone
//! A-shape of genus `g + 1`; the old rainbows become the arcs `(1, a(1))`
//! and `(a(1) + 1, 2n)`, counting inner vertices only.

use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::shape::{shape_class, Shape, ShapeClass};

fn require(s: &Shape, class: ShapeClass) -> Result<()> {
    let found = shape_class(s)?;
    if found != class {
        return Err(Error::Precondition(format!("expected a {class:?}-shape, found a {found:?}-shape")));
    }
    Ok(())
}

/// Removes the arc joining the vertex after the partner of the first inner
/// vertex and the last inner vertex.
pub fn theta(a: &Shape) -> Result<Shape> {
    require(a, ShapeClass::A)?;
    let n = a.vertex_count();
    let partner = a.partner_table();
    // 0-based: inner vertices are 1..n-1
    let cut = partner[1].unwrap() + 1;
    let last = n - 2;
    let relabel = |v: usize| v - usize::from(v > cut) - usize::from(v > last);
    let mut out = vec![None; n - 2];
    for (v, p) in partner.iter().enumerate() {
        if v != cut && v != last {
            out[relabel(v)] = p.map(relabel);
        }
    }
    Ok(Shape::new_unchecked(Diagram::from_partner(vec![n - 2], out, false)))
}

/// Inserts an arc from the interval right after the partner of the first
/// inner vertex to the interval right before the closing rainbow vertex.
pub fn theta_inv(b: &Shape) -> Result<Shape> {
    require(b, ShapeClass::B)?;
    let n = b.vertex_count();
    let partner = b.partner_table();
    let anchor = partner[1].unwrap();
    let last = n - 2;
    // new vertices sit at anchor + 1 and last + 2 in the result
    let relabel = |v: usize| v + usize::from(v > anchor) + usize::from(v > last);
    let mut out = vec![None; n + 2];
    for (v, p) in partner.iter().enumerate() {
        out[relabel(v)] = p.map(relabel);
    }
    out[anchor + 1] = Some(last + 2);
    out[last + 2] = Some(anchor + 1);
    Ok(Shape::new_unchecked(Diagram::from_partner(vec![n + 2], out, false)))
}

/// Glues the two backbones and plants the result.
pub fn eta(q: &Shape) -> Result<Shape> {
    if q.backbone_count() != 2 {
        return Err(Error::Precondition("eta needs a two-backbone shape".into()));
    }
    let glued = q.merge_backbones().plant()?;
    let out = Shape::new_unchecked(glued);
    debug_assert_eq!(shape_class(&out).ok(), Some(ShapeClass::A));
    Ok(out)
}

/// Removes the rainbow and cuts the backbone after the partner of the first
/// vertex. The result may be disconnected.
pub fn eta_inv(a: &Shape) -> Result<Shape> {
    require(a, ShapeClass::A)?;
    let stripped = a.strip_plants()?;
    let cut = stripped.partner(1).unwrap();
    let split = stripped.with_backbone_lengths(vec![cut, stripped.vertex_count() - cut]);
    Shape::new(split).map_err(|e| Error::Internal(format!("eta inverse left the shape domain: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fatgraph::{classify_loops, genus_of};

    fn shape(lengths: &[usize], arcs: &[(usize, usize)]) -> Shape {
        Shape::new(Diagram::new(lengths.to_vec(), arcs).unwrap()).unwrap()
    }

    #[test]
    fn theta_example() {
        let a = shape(&[8], &[(1, 8), (2, 4), (3, 6), (5, 7)]);
        let b = theta(&a).unwrap();
        assert_eq!(b.arcs(), vec![(1, 6), (2, 4), (3, 5)]);
        assert_eq!(b.genus(), 1);
        assert_eq!(theta_inv(&b).unwrap(), a);
        assert!(theta(&b).is_err());
        assert!(theta_inv(&a).is_err());
    }

    #[test]
    fn eta_example() {
        let q = shape(&[3, 3], &[(1, 3), (4, 6), (2, 5)]);
        let a = eta(&q).unwrap();
        assert_eq!(a.backbone_lengths(), &[8]);
        let mut arcs = a.arcs();
        arcs.sort();
        assert_eq!(arcs, vec![(1, 8), (2, 4), (3, 6), (5, 7)]);
        assert_eq!(a.genus(), 1);
        assert_eq!(shape_class(&a).unwrap(), ShapeClass::A);
        assert_eq!(eta_inv(&a).unwrap(), q);
        assert_eq!(classify_loops(&a).multi, classify_loops(&q).multi + 1);
    }

    #[test]
    fn eta_of_disconnected_pair() {
        // two planted crossing pairs, formal genus 1 + 1 - 1
        let q = shape(&[6, 6], &[(1, 6), (2, 4), (3, 5), (7, 12), (8, 10), (9, 11)]);
        assert!(!q.is_connected());
        assert_eq!(genus_of(&q), 1);
        let a = eta(&q).unwrap();
        assert_eq!(a.genus(), 2);
        assert_eq!(eta_inv(&a).unwrap(), q);
    }

    #[test]
    fn rejects_wrong_backbone_count() {
        let one = shape(&[6], &[(1, 6), (2, 4), (3, 5)]);
        assert!(eta(&one).is_err());
        let two = shape(&[3, 3], &[(1, 3), (4, 6), (2, 5)]);
        assert!(theta(&two).is_err());
        assert!(eta_inv(&two).is_err());
    }
}
