//! Brute-force enumeration of matchings and shapes.
//!
//! Left-to-right backtracking: the leftmost free vertex is paired with
//! every free vertex to its right in turn. Inserting an arc never lowers
//! the formal genus, so a partial diagram above the genus cap is cut. In
//! shape mode the rainbows are placed up front and 1-arcs and stacks are
//! rejected as soon as both arcs involved exist.

use std::ops::RangeInclusive;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::fatgraph::FaceCounter;
use crate::shape::{project_shape, Shape};

pub const DEFAULT_NODE_LIMIT: u64 = 50_000_000_000;

/// Largest number of non-rainbow vertices searched without opting in to
/// best-effort runs.
pub const GUARANTEED_INNER_VERTICES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Splits {
    /// Every composition of the vertex count into `backbones` positive parts.
    All,
    /// Only these backbone lengths (excluding rainbow vertices).
    Fixed(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct EnumSpec {
    pub backbones: usize,
    /// Arc counts of the visited diagrams. In shape mode rainbows count.
    pub arcs: RangeInclusive<usize>,
    pub genus_cap: Option<i64>,
    /// Keep only diagrams whose genus equals the cap.
    pub exact_genus: bool,
    /// Visit planted shapes instead of plain matchings.
    pub shapes_only: bool,
    pub connected_only: bool,
    pub splits: Splits,
    pub node_limit: u64,
}

impl EnumSpec {
    /// Perfect matchings over `backbones` backbones with exactly `arcs` arcs.
    pub fn matchings(backbones: usize, arcs: usize) -> Self {
        EnumSpec {
            backbones,
            arcs: arcs..=arcs,
            genus_cap: None,
            exact_genus: false,
            shapes_only: false,
            connected_only: false,
            splits: Splits::All,
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }

    pub fn with_genus(mut self, genus: i64) -> Self {
        self.genus_cap = Some(genus);
        self.exact_genus = true;
        self
    }

    pub fn connected(mut self) -> Self {
        self.connected_only = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.backbones == 0 {
            return Err(Error::Precondition("at least one backbone is required".into()));
        }
        if self.exact_genus && self.genus_cap.is_none() {
            return Err(Error::Precondition("exact genus needs a genus cap".into()));
        }
        if let Some(g) = self.genus_cap {
            if g < 0 {
                return Err(Error::Precondition("genus cap must be non-negative".into()));
            }
        }
        if let Splits::Fixed(lengths) = &self.splits {
            if lengths.len() != self.backbones || lengths.contains(&0) {
                return Err(Error::Precondition(format!(
                    "split {lengths:?} does not describe {} non-empty backbones",
                    self.backbones
                )));
            }
        }
        Ok(())
    }

    /// Backbone layouts (rainbow vertices included in shape mode) for a
    /// given arc count, in lexicographic order.
    fn layouts(&self, arcs: usize) -> Vec<Vec<usize>> {
        let b = self.backbones;
        let inner_arcs = if self.shapes_only {
            match arcs.checked_sub(b) {
                Some(l) => l,
                None => return Vec::new(),
            }
        } else {
            arcs
        };
        let vertices = 2 * inner_arcs;
        let splits = match &self.splits {
            Splits::All => compositions(vertices, b),
            Splits::Fixed(lengths) if lengths.iter().sum::<usize>() == vertices => vec![lengths.clone()],
            Splits::Fixed(_) => Vec::new(),
        };
        let pad = if self.shapes_only { 2 } else { 0 };
        splits
            .into_iter()
            .map(|s| s.into_iter().map(|len| len + pad).collect())
            .collect()
    }
}

/// Compositions of `total` into `parts` positive parts, lexicographic.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(left: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            if left >= 1 {
                prefix.push(left);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for first in 1..left {
            prefix.push(first);
            go(left - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, &mut Vec::new(), &mut out);
    out
}

struct Budget {
    used: AtomicU64,
    limit: u64,
}

impl Budget {
    fn tick(&self) -> Result<()> {
        if self.used.fetch_add(1, Ordering::Relaxed) >= self.limit {
            return Err(Error::Infeasible(format!("node budget of {} exhausted", self.limit)));
        }
        Ok(())
    }
}

/// One backtracking run over a fixed backbone layout.
struct Search<'a> {
    lengths: Vec<usize>,
    ids: Vec<usize>,
    partner: Vec<Option<usize>>,
    spec: &'a EnumSpec,
    faces: FaceCounter,
    budget: &'a Budget,
}

impl<'a> Search<'a> {
    fn new(lengths: Vec<usize>, spec: &'a EnumSpec, budget: &'a Budget) -> Self {
        let ids: Vec<usize> = lengths
            .iter()
            .enumerate()
            .flat_map(|(k, &len)| std::iter::repeat_n(k, len))
            .collect();
        let mut partner = vec![None; ids.len()];
        if spec.shapes_only {
            let mut start = 0;
            for &len in &lengths {
                partner[start] = Some(start + len - 1);
                partner[start + len - 1] = Some(start);
                start += len;
            }
        }
        Search {
            lengths,
            ids,
            partner,
            spec,
            faces: FaceCounter::default(),
            budget,
        }
    }

    fn admissible(&self, i: usize, j: usize) -> bool {
        if !self.spec.shapes_only {
            return true;
        }
        if j == i + 1 && self.ids[i] == self.ids[j] {
            return false;
        }
        let n = self.partner.len();
        if i > 0 && j + 1 < n && self.partner[i - 1] == Some(j + 1) {
            return false;
        }
        if j > i + 2 && self.partner[i + 1] == Some(j - 1) {
            return false;
        }
        true
    }

    fn place(&mut self, i: usize, j: usize) -> Result<bool> {
        self.budget.tick()?;
        if !self.admissible(i, j) {
            return Ok(false);
        }
        self.partner[i] = Some(j);
        self.partner[j] = Some(i);
        if let Some(cap) = self.spec.genus_cap {
            if self.faces.genus(&self.lengths, &self.partner) > cap {
                self.partner[i] = None;
                self.partner[j] = None;
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn unplace(&mut self, i: usize, j: usize) {
        self.partner[i] = None;
        self.partner[j] = None;
    }

    fn leaf(&mut self, visit: &mut dyn FnMut(Diagram)) {
        if self.spec.exact_genus {
            let g = self.faces.genus(&self.lengths, &self.partner);
            if Some(g) != self.spec.genus_cap {
                return;
            }
        }
        let d = Diagram::from_partner(self.lengths.clone(), self.partner.clone(), false);
        if self.spec.connected_only && !d.is_connected() {
            return;
        }
        visit(d);
    }

    fn run(&mut self, from: usize, visit: &mut dyn FnMut(Diagram)) -> Result<()> {
        let n = self.partner.len();
        let Some(i) = (from..n).find(|&v| self.partner[v].is_none()) else {
            self.leaf(visit);
            return Ok(());
        };
        for j in i + 1..n {
            if self.partner[j].is_some() || !self.place(i, j)? {
                continue;
            }
            let result = self.run(i + 1, visit);
            self.unplace(i, j);
            result?;
        }
        Ok(())
    }

    /// Runs only the subtree in which the first free vertex is paired with `j`.
    fn run_rooted(&mut self, j: usize, visit: &mut dyn FnMut(Diagram)) -> Result<()> {
        let n = self.partner.len();
        let Some(i) = (0..n).find(|&v| self.partner[v].is_none()) else {
            return Ok(());
        };
        if j <= i || self.partner[j].is_some() || !self.place(i, j)? {
            return Ok(());
        }
        let result = self.run(i + 1, visit);
        self.unplace(i, j);
        result
    }
}

fn finish(d: Diagram, shapes_only: bool) -> Diagram {
    if shapes_only {
        d.mark_planted().expect("layout carries rainbows")
    } else {
        d
    }
}

/// Visits every diagram described by `spec` exactly once, in a fixed order:
/// by arc count, then backbone split, then backtracking order. Returns the
/// number of visited diagrams.
pub fn enumerate_matchings(spec: &EnumSpec, mut visit: impl FnMut(&Diagram)) -> Result<u64> {
    spec.validate()?;
    let budget = Budget {
        used: AtomicU64::new(0),
        limit: spec.node_limit,
    };
    let mut count = 0u64;
    for arcs in spec.arcs.clone() {
        for layout in spec.layouts(arcs) {
            let mut search = Search::new(layout, spec, &budget);
            search.run(0, &mut |d| {
                count += 1;
                visit(&finish(d, spec.shapes_only));
            })?;
        }
    }
    Ok(count)
}

/// Parallel version of [`enumerate_matchings`] that collects the visited
/// diagrams. The result order is the sequential visit order.
pub fn collect_matchings(spec: &EnumSpec) -> Result<Vec<Diagram>> {
    spec.validate()?;
    let budget = Budget {
        used: AtomicU64::new(0),
        limit: spec.node_limit,
    };
    let roots: Vec<(Vec<usize>, usize)> = spec
        .arcs
        .clone()
        .flat_map(|arcs| spec.layouts(arcs))
        .flat_map(|layout| {
            let n: usize = layout.iter().sum();
            (0..n).map(move |j| (layout.clone(), j))
        })
        .collect();
    let parts: Vec<Vec<Diagram>> = roots
        .into_par_iter()
        .map(|(layout, j)| {
            let mut found = Vec::new();
            Search::new(layout, spec, &budget).run_rooted(j, &mut |d| found.push(finish(d, spec.shapes_only)))?;
            Ok(found)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

#[derive(Clone, Debug)]
pub struct ShapeEnumOptions {
    /// Include two-backbone shapes whose backbones are not connected.
    pub include_disconnected: bool,
    /// Permit searches beyond [`GUARANTEED_INNER_VERTICES`].
    pub best_effort: bool,
    pub node_limit: u64,
}

impl Default for ShapeEnumOptions {
    fn default() -> Self {
        ShapeEnumOptions {
            include_disconnected: false,
            best_effort: false,
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

/// Range of total arc counts (rainbows included) a shape over `b`
/// backbones of genus `g` can have: at most `6(g + b - 1) - 1`.
pub fn shape_arc_range(b: usize, g: usize) -> RangeInclusive<usize> {
    let upper = 6 * (g + b - 1) - 1;
    let lower = if b == 1 { 2 * g + 1 } else { b + 1 };
    lower..=upper
}

pub fn enumerate_shapes(b: usize, g: usize) -> Result<Vec<Shape>> {
    enumerate_shapes_with(b, g, &ShapeEnumOptions::default())
}

/// All shapes over `b` backbones of (formal) genus `g`, sorted by
/// [`Diagram::canonical_key`]. Two-backbone results are connected unless
/// requested otherwise.
pub fn enumerate_shapes_with(b: usize, g: usize, options: &ShapeEnumOptions) -> Result<Vec<Shape>> {
    if !(1..=2).contains(&b) {
        return Err(Error::Precondition("shapes are enumerated over one or two backbones".into()));
    }
    if b == 1 && g == 0 {
        return Ok(Vec::new());
    }
    let arcs = shape_arc_range(b, g);
    let inner_vertices = 2 * (arcs.end() - b);
    if inner_vertices > GUARANTEED_INNER_VERTICES && !options.best_effort {
        return Err(Error::Infeasible(format!(
            "shapes over {b} backbone(s) of genus {g} need up to {inner_vertices} vertices; \
             exhaustive search is only guaranteed up to {GUARANTEED_INNER_VERTICES}"
        )));
    }
    let spec = EnumSpec {
        backbones: b,
        arcs,
        genus_cap: Some(g as i64),
        exact_genus: true,
        shapes_only: true,
        connected_only: !options.include_disconnected,
        splits: Splits::All,
        node_limit: options.node_limit,
    };
    let mut shapes: Vec<Shape> = collect_matchings(&spec)?
        .into_iter()
        .map(Shape::new_unchecked)
        .collect();
    shapes.sort_by_cached_key(|s| s.canonical_key());
    let before = shapes.len();
    shapes.dedup();
    if shapes.len() != before {
        return Err(Error::Internal("enumeration produced duplicate shapes".into()));
    }
    Ok(shapes)
}

/// Number of connected two-backbone matchings with `arcs` arcs whose shape
/// is `s`, summed over all backbone splits.
pub fn count_fiber(s: &Shape, arcs: usize) -> Result<u64> {
    if s.backbone_count() != 2 {
        return Err(Error::Precondition("fibers are counted for two-backbone shapes".into()));
    }
    if arcs > 9 {
        return Err(Error::Infeasible(format!("fiber counts are limited to 9 arcs, got {arcs}")));
    }
    let genus = s.genus();
    if genus < 0 {
        return Err(Error::Precondition("shape must be connected".into()));
    }
    let target = s.canonical_code();
    let spec = EnumSpec::matchings(2, arcs).with_genus(genus).connected();
    let mut hits = 0;
    enumerate_matchings(&spec, |d| {
        if project_shape(d).diagram.canonical_code() == target {
            hits += 1;
        }
    })?;
    Ok(hits)
}
