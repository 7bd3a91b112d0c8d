//! Boundary cycles of the polygonal fat graph.
//!
//! Every backbone is collapsed to one vertex whose half-edges are the paired
//! vertices of that backbone in left-to-right order. With `sigma` the
//! rotation at each collapsed vertex and `alpha` the arc involution, the
//! boundary cycles are the cycles of `phi = sigma . alpha`, i.e.
//! `phi(h) = sigma(alpha(h))`. A backbone without any paired vertex still
//! bounds one (empty) face.
//!
//! Genus follows from `2 - 2g - r = b - n` and is applied as is to
//! disconnected diagrams, which gives the formal genus
//! `sum(g_i) - (c - 1)` over `c` components.

use serde::Serialize;

use crate::diagram::Diagram;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryDecomposition {
    /// Boundary cycles as sequences of 1-based half-edges (paired vertices),
    /// each starting at its smallest half-edge, ordered by that half-edge.
    /// Faces of arc-less backbones come last as empty sequences.
    pub cycles: Vec<Vec<usize>>,
    pub r: usize,
    pub genus: i64,
    pub per_component_genera: Vec<i64>,
}

/// Successor table of `sigma` over a 0-based partner table; `None` for
/// unpaired vertices. Returns the number of backbones without half-edges.
fn rotation(lengths: &[usize], partner: &[Option<usize>], next: &mut Vec<usize>) -> usize {
    next.clear();
    next.resize(partner.len(), usize::MAX);
    let mut empty = 0;
    let mut start = 0;
    for &len in lengths {
        let mut first = None;
        let mut prev: Option<usize> = None;
        for v in start..start + len {
            if partner[v].is_some() {
                match prev {
                    Some(p) => next[p] = v,
                    None => first = Some(v),
                }
                prev = Some(v);
            }
        }
        match (first, prev) {
            (Some(f), Some(l)) => next[l] = f,
            _ => empty += 1,
        }
        start += len;
    }
    empty
}

/// Reusable scratch space for counting faces in hot loops.
#[derive(Default)]
pub(crate) struct FaceCounter {
    next: Vec<usize>,
    seen: Vec<bool>,
}

impl FaceCounter {
    /// Number of boundary cycles, empty faces included.
    pub(crate) fn count(&mut self, lengths: &[usize], partner: &[Option<usize>]) -> usize {
        let mut r = rotation(lengths, partner, &mut self.next);
        self.seen.clear();
        self.seen.resize(partner.len(), false);
        for h in 0..partner.len() {
            if partner[h].is_none() || self.seen[h] {
                continue;
            }
            r += 1;
            let mut x = h;
            while !self.seen[x] {
                self.seen[x] = true;
                x = self.next[partner[x].unwrap()];
            }
        }
        r
    }

    pub(crate) fn genus(&mut self, lengths: &[usize], partner: &[Option<usize>]) -> i64 {
        let r = self.count(lengths, partner);
        let n = partner.iter().flatten().count() / 2;
        euler_genus(lengths.len(), n, r)
    }
}

/// Solves `2 - 2g - r = b - n` for `g`.
pub(crate) fn euler_genus(backbones: usize, arcs: usize, r: usize) -> i64 {
    let twice = 2 - r as i64 - backbones as i64 + arcs as i64;
    debug_assert!(twice % 2 == 0, "odd Euler characteristic");
    twice / 2
}

fn cycles_of(d: &Diagram) -> (Vec<Vec<usize>>, usize) {
    let partner = d.partner_table();
    let mut next = Vec::new();
    let empty = rotation(d.backbone_lengths(), partner, &mut next);
    let mut seen = vec![false; partner.len()];
    let mut cycles = Vec::new();
    for h in 0..partner.len() {
        if partner[h].is_none() || seen[h] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = h;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x + 1);
            x = next[partner[x].unwrap()];
        }
        cycles.push(cycle);
    }
    (cycles, empty)
}

pub fn boundary_components(d: &Diagram) -> BoundaryDecomposition {
    let (mut cycles, empty) = cycles_of(d);
    cycles.extend(std::iter::repeat_n(Vec::new(), empty));
    let r = cycles.len();
    let genus = euler_genus(d.backbone_count(), d.arc_count(), r);
    let per_component_genera = if d.is_connected() {
        vec![genus]
    } else {
        d.components().iter().map(genus_of).collect()
    };
    BoundaryDecomposition {
        cycles,
        r,
        genus,
        per_component_genera,
    }
}

/// Formal genus; negative values are possible for disconnected diagrams.
pub fn genus_of(d: &Diagram) -> i64 {
    FaceCounter::default().genus(d.backbone_lengths(), d.partner_table())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopKind {
    /// Passes through the 5'/3' ends of a backbone. For planted diagrams
    /// these are exactly the length-1 plant boundaries.
    Plant,
    /// Face of a backbone without paired vertices.
    Empty,
    Hairpin,
    Interior,
    Multi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopSide {
    /// Every arc it traverses lies within one backbone.
    Alpha,
    Beta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Loop {
    pub length: usize,
    pub kind: LoopKind,
    pub pseudoknot: bool,
    pub side: LoopSide,
}

/// Loop census of a diagram. `alpha` and `beta` count hairpin, interior
/// and multi-loops only.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LoopProfile {
    pub hairpin: usize,
    pub interior: usize,
    pub multi: usize,
    pub pseudoknot: usize,
    pub plant: usize,
    pub empty: usize,
    pub alpha: usize,
    pub beta: usize,
    pub loops: Vec<Loop>,
}

fn crossing(a: (usize, usize), b: (usize, usize)) -> bool {
    let (x, y) = if a.0 < b.0 { (a, b) } else { (b, a) };
    x.0 < y.0 && y.0 < x.1 && x.1 < y.1
}

pub fn classify_loops(d: &Diagram) -> LoopProfile {
    let (cycles, empty) = cycles_of(d);
    let ids = d.backbone_ids();
    let partner = d.partner_table();
    let mut exterior = vec![false; d.vertex_count()];
    let mut start = 0;
    for &len in d.backbone_lengths() {
        if let Some(first) = (start..start + len).find(|&v| partner[v].is_some()) {
            exterior[first] = true;
        }
        start += len;
    }

    let mut profile = LoopProfile {
        empty,
        ..LoopProfile::default()
    };
    for cycle in &cycles {
        let arcs: Vec<(usize, usize)> = {
            let mut arcs: Vec<(usize, usize)> = cycle
                .iter()
                .map(|&h| {
                    let p = partner[h - 1].unwrap() + 1;
                    (h.min(p), h.max(p))
                })
                .collect();
            arcs.sort_unstable();
            arcs.dedup();
            arcs
        };
        let side = if arcs.iter().all(|&(i, j)| ids[i - 1] == ids[j - 1]) {
            LoopSide::Alpha
        } else {
            LoopSide::Beta
        };
        let kind = if cycle.iter().any(|&h| exterior[h - 1]) {
            LoopKind::Plant
        } else {
            match cycle.len() {
                1 => LoopKind::Hairpin,
                2 => LoopKind::Interior,
                _ => LoopKind::Multi,
            }
        };
        let pseudoknot = kind == LoopKind::Multi
            && arcs
                .iter()
                .enumerate()
                .any(|(k, &a)| arcs[k + 1..].iter().any(|&b| crossing(a, b)));
        match kind {
            LoopKind::Plant => profile.plant += 1,
            LoopKind::Hairpin => profile.hairpin += 1,
            LoopKind::Interior => profile.interior += 1,
            LoopKind::Multi => profile.multi += 1,
            LoopKind::Empty => unreachable!(),
        }
        if pseudoknot {
            profile.pseudoknot += 1;
        }
        if kind != LoopKind::Plant {
            match side {
                LoopSide::Alpha => profile.alpha += 1,
                LoopSide::Beta => profile.beta += 1,
            }
        }
        profile.loops.push(Loop {
            length: cycle.len(),
            kind,
            pseudoknot,
            side,
        });
    }
    profile.loops.extend(std::iter::repeat_n(Loop {
        length: 0,
        kind: LoopKind::Empty,
        pseudoknot: false,
        side: LoopSide::Alpha,
    }, empty));
    profile
}
