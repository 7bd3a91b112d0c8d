//! Diagrams over one or more backbones.
//!
//! Vertices carry global 1-based indices running through the backbones in
//! order, so a diagram over backbones of lengths `[3, 2]` has vertices
//! `1 2 3 | 4 5`. Arcs are written `(i, j)` with `i < j`. Vertices may stay
//! unpaired.
//!
//! A planted diagram has a rainbow over every backbone: the arc joining the
//! backbone's first and last vertex.
//!
//! Text format, one diagram per record:
//!
//! ```text
//! # comment
//! 2 2          backbone lengths
//! 1-4 2-3      arcs, may be left empty
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classification of the length-1 interval `[i, i+1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntervalKind {
    /// `i` is the last vertex of a backbone.
    Gap,
    /// Lies between two consecutive arcs of a stack.
    PInterval,
    SigmaInterval,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagram {
    lengths: Vec<usize>,
    /// 0-based partner table.
    partner: Vec<Option<usize>>,
    planted: bool,
}

impl Diagram {
    /// Builds a diagram from backbone lengths and 1-based arcs.
    pub fn new(backbone_lengths: Vec<usize>, arcs: &[(usize, usize)]) -> Result<Self> {
        if backbone_lengths.is_empty() {
            return Err(Error::InvalidDiagram("at least one backbone is required".into()));
        }
        if let Some(k) = backbone_lengths.iter().position(|&len| len == 0) {
            return Err(Error::InvalidDiagram(format!("backbone {} has length 0", k + 1)));
        }
        let n: usize = backbone_lengths.iter().sum();
        let mut partner = vec![None; n];
        for &(a, b) in arcs {
            let (i, j) = if a <= b { (a, b) } else { (b, a) };
            if i == j {
                return Err(Error::InvalidDiagram(format!("vertex {i} is paired with itself")));
            }
            if i == 0 || j > n {
                return Err(Error::InvalidDiagram(format!(
                    "arc {i}-{j} has an endpoint outside 1..{n}"
                )));
            }
            for v in [i, j] {
                if partner[v - 1].is_some() {
                    return Err(Error::InvalidDiagram(format!("vertex {v} is paired twice")));
                }
            }
            partner[i - 1] = Some(j - 1);
            partner[j - 1] = Some(i - 1);
        }
        Ok(Diagram {
            lengths: backbone_lengths,
            partner,
            planted: false,
        })
    }

    /// Internal constructor from a 0-based partner table that is already
    /// known to be a valid involution.
    pub(crate) fn from_partner(lengths: Vec<usize>, partner: Vec<Option<usize>>, planted: bool) -> Self {
        debug_assert_eq!(lengths.iter().sum::<usize>(), partner.len());
        debug_assert!(partner
            .iter()
            .enumerate()
            .all(|(v, p)| p.is_none_or(|p| p != v && partner[p] == Some(v))));
        Diagram {
            lengths,
            partner,
            planted,
        }
    }

    pub(crate) fn partner_table(&self) -> &[Option<usize>] {
        &self.partner
    }

    pub fn backbone_lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn backbone_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.partner.len()
    }

    pub fn arc_count(&self) -> usize {
        self.partner.iter().flatten().count() / 2
    }

    /// Arcs as 1-based pairs `(i, j)`, `i < j`, sorted by left endpoint.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.partner
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.filter(|&p| p > v).map(|p| (v + 1, p + 1)))
            .collect()
    }

    /// Partner of the 1-based vertex `v`.
    pub fn partner(&self, v: usize) -> Option<usize> {
        self.partner.get(v.checked_sub(1)?).copied().flatten().map(|p| p + 1)
    }

    pub fn is_planted(&self) -> bool {
        self.planted
    }

    /// True when every vertex is paired.
    pub fn is_matching(&self) -> bool {
        self.partner.iter().all(Option::is_some)
    }

    /// 1-based `(first, last)` vertex of backbone `k` (0-based).
    pub fn backbone_span(&self, k: usize) -> (usize, usize) {
        let start: usize = self.lengths[..k].iter().sum();
        (start + 1, start + self.lengths[k])
    }

    /// 0-based backbone index of every vertex.
    pub(crate) fn backbone_ids(&self) -> Vec<usize> {
        self.lengths
            .iter()
            .enumerate()
            .flat_map(|(k, &len)| std::iter::repeat_n(k, len))
            .collect()
    }

    /// 0-based backbone containing the 1-based vertex `v`.
    pub fn backbone_of(&self, v: usize) -> usize {
        let mut end = 0;
        for (k, &len) in self.lengths.iter().enumerate() {
            end += len;
            if v <= end {
                return k;
            }
        }
        panic!("vertex {v} out of range");
    }

    fn has_rainbows(&self) -> bool {
        (0..self.backbone_count()).all(|k| {
            let (first, last) = self.backbone_span(k);
            first < last && self.partner(first) == Some(last)
        })
    }

    /// Declares the first-last arc of every backbone to be its rainbow.
    pub fn mark_planted(mut self) -> Result<Self> {
        if !self.has_rainbows() {
            return Err(Error::InvalidDiagram(
                "every backbone needs an arc joining its first and last vertex".into(),
            ));
        }
        self.planted = true;
        Ok(self)
    }

    /// Adds a new first and last vertex to every backbone, joined by a
    /// rainbow arc.
    pub fn plant(&self) -> Result<Diagram> {
        if self.planted {
            return Err(Error::Precondition("diagram is already planted".into()));
        }
        let b = self.backbone_count();
        let lengths: Vec<usize> = self.lengths.iter().map(|len| len + 2).collect();
        let ids = self.backbone_ids();
        // old vertex v moves right by one slot per earlier plant vertex
        let shift = |v: usize| v + 2 * ids[v] + 1;
        let mut partner = vec![None; self.vertex_count() + 2 * b];
        for (v, p) in self.partner.iter().enumerate() {
            partner[shift(v)] = p.map(shift);
        }
        let mut start = 0;
        for &len in &lengths {
            partner[start] = Some(start + len - 1);
            partner[start + len - 1] = Some(start);
            start += len;
        }
        Ok(Diagram::from_partner(lengths, partner, true))
    }

    /// Inverse of [`Diagram::plant`].
    pub fn strip_plants(&self) -> Result<Diagram> {
        if !self.planted {
            return Err(Error::Precondition("diagram is not planted".into()));
        }
        if self.lengths.iter().any(|&len| len < 3) {
            return Err(Error::Precondition(
                "stripping the rainbow would leave an empty backbone".into(),
            ));
        }
        let lengths: Vec<usize> = self.lengths.iter().map(|len| len - 2).collect();
        let mut keep = vec![None; self.vertex_count()];
        let mut next = 0;
        let mut start = 0;
        for &len in &self.lengths {
            for slot in &mut keep[start + 1..start + len - 1] {
                *slot = Some(next);
                next += 1;
            }
            start += len;
        }
        let mut partner = vec![None; next];
        for (v, p) in self.partner.iter().enumerate() {
            if let Some(nv) = keep[v] {
                partner[nv] = p.and_then(|p| keep[p]);
            }
        }
        Ok(Diagram::from_partner(lengths, partner, false))
    }

    /// Backbone-level connectivity: union-find over backbones joined by arcs.
    fn backbone_roots(&self) -> Vec<usize> {
        let ids = self.backbone_ids();
        let mut parent: Vec<usize> = (0..self.backbone_count()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (v, p) in self.partner.iter().enumerate() {
            if let Some(p) = *p {
                let a = find(&mut parent, ids[v]);
                let b = find(&mut parent, ids[p]);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..parent.len()).map(|k| find(&mut parent, k)).collect()
    }

    /// True iff backbone edges plus arcs form a connected graph.
    pub fn is_connected(&self) -> bool {
        self.backbone_roots().iter().all(|&r| r == 0)
    }

    /// Splits the diagram into its connected components, in order of their
    /// leftmost backbone. Backbones and vertices keep their relative order.
    pub fn components(&self) -> Vec<Diagram> {
        let roots = self.backbone_roots();
        let mut groups: Vec<usize> = roots.clone();
        groups.sort_unstable();
        groups.dedup();
        let ids = self.backbone_ids();
        groups
            .into_iter()
            .map(|root| {
                let backbones: Vec<usize> = (0..roots.len()).filter(|&k| roots[k] == root).collect();
                let lengths: Vec<usize> = backbones.iter().map(|&k| self.lengths[k]).collect();
                let mut relabel = vec![None; self.vertex_count()];
                let mut next = 0;
                for (v, slot) in relabel.iter_mut().enumerate() {
                    if roots[ids[v]] == root {
                        *slot = Some(next);
                        next += 1;
                    }
                }
                let mut partner = vec![None; next];
                for (v, p) in self.partner.iter().enumerate() {
                    if let Some(nv) = relabel[v] {
                        partner[nv] = p.and_then(|p| relabel[p]);
                    }
                }
                Diagram::from_partner(lengths, partner, self.planted)
            })
            .collect()
    }

    /// Single-line key identifying the backbone lengths and arc set.
    pub fn canonical_code(&self) -> String {
        let lengths: Vec<String> = self.lengths.iter().map(usize::to_string).collect();
        let arcs: Vec<String> = self.arcs().iter().map(|(i, j)| format!("{i}-{j}")).collect();
        format!("{}:{}", lengths.join(","), arcs.join(","))
    }

    /// Inverse of [`Diagram::canonical_code`].
    pub fn from_canonical_code(code: &str) -> Result<Diagram> {
        let (lengths, arcs) = code
            .split_once(':')
            .ok_or_else(|| Error::parse(1, 1, "canonical code needs a ':' separator"))?;
        let text = format!("{}\n{}", lengths.replace(',', " "), arcs.replace(',', " "));
        text.parse()
    }

    /// Total order used for every canonically sorted list of diagrams:
    /// arc count, then backbone lengths, then the sorted arc list.
    pub fn canonical_key(&self) -> (usize, Vec<usize>, Vec<(usize, usize)>) {
        (self.arc_count(), self.lengths.clone(), self.arcs())
    }

    /// Kind of every interval `[i, i+1]`, `i = 1..n-1`.
    pub fn interval_kinds(&self) -> Vec<IntervalKind> {
        let n = self.vertex_count();
        let ids = self.backbone_ids();
        (0..n.saturating_sub(1))
            .map(|x| {
                if ids[x] != ids[x + 1] {
                    return IntervalKind::Gap;
                }
                match (self.partner[x], self.partner[x + 1]) {
                    // consecutive arcs (x, y), (x+1, y-1) or (w+1, x), (w, x+1)
                    (Some(p), Some(q)) if p != x + 1 && p == q + 1 => IntervalKind::PInterval,
                    _ => IntervalKind::SigmaInterval,
                }
            })
            .collect()
    }

    /// Concatenates all backbones into a single one; arcs are kept.
    pub(crate) fn merge_backbones(&self) -> Diagram {
        Diagram::from_partner(vec![self.vertex_count()], self.partner.clone(), false)
    }

    /// Re-partitions the vertices into backbones of the given lengths.
    pub(crate) fn with_backbone_lengths(&self, lengths: Vec<usize>) -> Diagram {
        Diagram::from_partner(lengths, self.partner.clone(), false)
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lengths: Vec<String> = self.lengths.iter().map(usize::to_string).collect();
        let arcs: Vec<String> = self.arcs().iter().map(|(i, j)| format!("{i}-{j}")).collect();
        write!(f, "{}\n{}", lengths.join(" "), arcs.join(" "))
    }
}

impl FromStr for Diagram {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_diagram(text)
    }
}

/// Whitespace-separated tokens of a line with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.split_whitespace()
        .map(move |tok| (tok.as_ptr() as usize - line.as_ptr() as usize + 1, tok))
}

/// Parses one diagram in the text format. Line and column numbers in
/// errors are 1-based and refer to `text`.
pub fn parse_diagram(text: &str) -> Result<Diagram> {
    let mut content = text
        .lines()
        .enumerate()
        .map(|(k, line)| (k + 1, line.split('#').next().unwrap_or("")))
        .filter(|(_, line)| !line.trim().is_empty());

    let (len_line, lengths_text) = content
        .next()
        .ok_or_else(|| Error::parse(1, 1, "missing backbone length line"))?;
    let mut lengths = Vec::new();
    for (col, tok) in tokens(lengths_text) {
        match tok.parse::<usize>() {
            Ok(0) => return Err(Error::parse(len_line, col, "backbone length must be positive")),
            Ok(len) => lengths.push(len),
            Err(_) => return Err(Error::parse(len_line, col, format!("expected a backbone length, found '{tok}'"))),
        }
    }
    let n: usize = lengths.iter().sum();

    let mut arcs = Vec::new();
    let mut partner = vec![None; n + 1];
    if let Some((arc_line, arcs_text)) = content.next() {
        for (col, tok) in tokens(arcs_text) {
            let endpoints = tok
                .split_once('-')
                .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)));
            let Some((a, b)) = endpoints else {
                return Err(Error::parse(arc_line, col, format!("expected an arc 'i-j', found '{tok}'")));
            };
            if a == b {
                return Err(Error::parse(arc_line, col, format!("self-pairing of vertex {a}")));
            }
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(Error::parse(arc_line, col, format!("endpoint {v} outside 1..{n}")));
                }
                if partner[v].is_some() {
                    return Err(Error::parse(arc_line, col, format!("vertex {v} is paired twice")));
                }
            }
            partner[a] = Some(b);
            partner[b] = Some(a);
            arcs.push((a, b));
        }
    }
    if let Some((extra, _)) = content.next() {
        return Err(Error::parse(extra, 1, "unexpected content after the arc line"));
    }
    Diagram::new(lengths, &arcs)
}

/// Splits a batch file into paragraphs separated by blank lines and parses
/// each one. Line numbers in errors refer to the whole batch.
pub fn parse_batch(text: &str) -> Result<Vec<Diagram>> {
    let mut diagrams = Vec::new();
    let mut block: Vec<&str> = Vec::new();
    let mut block_start = 1;
    let flush = |block: &mut Vec<&str>, start: usize, out: &mut Vec<Diagram>| -> Result<()> {
        let has_content = block.iter().any(|l| !l.split('#').next().unwrap_or("").trim().is_empty());
        if has_content {
            let d = parse_diagram(&block.join("\n")).map_err(|e| match e {
                Error::Parse { line, column, message } => Error::Parse {
                    line: line + start - 1,
                    column,
                    message,
                },
                other => other,
            })?;
            out.push(d);
        }
        block.clear();
        Ok(())
    };
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            flush(&mut block, block_start, &mut diagrams)?;
            block_start = k + 2;
        } else {
            if block.is_empty() {
                block_start = k + 1;
            }
            block.push(line);
        }
    }
    flush(&mut block, block_start, &mut diagrams)?;
    Ok(diagrams)
}
