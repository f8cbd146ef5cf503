//! Combinatorial Morse analysis of the one-vertex presentation complex
//! under a height map sending every generator to 1.
//!
//! Each 2-cell contributes a height profile along its boundary. Links at the
//! vertex are graphs on the direction tokens `g+` (the edge leaves upward)
//! and `g-` (it leaves downward); every corner of every relator joins two
//! tokens. When the ascending and descending links are trees the kernel of
//! the height map is free, with one basis element per interior level arc.

use std::fmt;

use thiserror::Error;

use crate::presentations::Presentation;
use crate::words::{CyclicWord, Generator, Letter, WeightMap, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorseError {
    #[error("unsupported height map: generator `{gen}` has weight {weight} (every weight must be 1)")]
    UnsupportedWeight { gen: Generator, weight: i64 },
    #[error("relator {relator} has exponent sum {sum} under the height map")]
    NotClosed { relator: CyclicWord, sum: i64 },
    #[error("relator {relator}: boundary vertex {vertex} turns at interior level {level}")]
    NotStaircase { relator: CyclicWord, vertex: usize, level: i64 },
    #[error("{which} link is not a tree")]
    LinkNotTree { which: &'static str },
    #[error(transparent)]
    Word(#[from] WordError),
}

fn check_weights(w: &WeightMap) -> Result<(), MorseError> {
    match w.iter().find(|&(_, x)| x != 1) {
        Some((gen, weight)) => Err(MorseError::UnsupportedWeight { gen, weight }),
        None => Ok(()),
    }
}

/// Heights of the boundary vertices of one 2-cell, starting at 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CellHeights {
    pub boundary: CyclicWord,
    /// `heights[i]` is the height before letter `i`.
    pub heights: Vec<i64>,
    pub min: i64,
    pub max: i64,
}

pub fn heights(relator: &CyclicWord, w: &WeightMap) -> Result<CellHeights, MorseError> {
    check_weights(w)?;
    let sum = w.exponent_sum_letters(relator.letters())?;
    if sum != 0 {
        return Err(MorseError::NotClosed { relator: relator.clone(), sum });
    }
    let mut h = 0;
    let mut out = Vec::with_capacity(relator.len());
    for l in relator.letters() {
        out.push(h);
        h += w.exponent_sum_letters(std::slice::from_ref(l))?;
    }
    let min = out.iter().copied().min().unwrap_or(0);
    let max = out.iter().copied().max().unwrap_or(0);
    Ok(CellHeights { boundary: relator.clone(), heights: out, min, max })
}

/// Level-arc count: half the number of boundary vertices at each level
/// strictly between the extremes. Only the extremes may be turning points.
pub fn cell_area(c: &CellHeights) -> Result<u64, MorseError> {
    let n = c.heights.len();
    let mut area = 0;
    for (i, &h) in c.heights.iter().enumerate() {
        if h <= c.min || h >= c.max {
            continue;
        }
        let before = c.heights[(i + n - 1) % n];
        let after = c.heights[(i + 1) % n];
        if (before < h) == (after < h) {
            return Err(MorseError::NotStaircase { relator: c.boundary.clone(), vertex: i, level: h });
        }
        area += 1;
    }
    Ok(area / 2)
}

/// `g+` or `g-`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Direction {
    pub gen: Generator,
    pub up: bool,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.gen, if self.up { '+' } else { '-' })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CornerKind {
    Ascending,
    Descending,
    Mixed,
}

/// Directions seen from the corner between `x` and `y`.
pub fn corner(x: Letter, y: Letter) -> (Direction, Direction) {
    (Direction { gen: x.gen, up: x.inverse }, Direction { gen: y.gen, up: !y.inverse })
}

pub fn corner_kind(x: Letter, y: Letter) -> CornerKind {
    match corner(x, y) {
        (a, b) if a.up && b.up => CornerKind::Ascending,
        (a, b) if !a.up && !b.up => CornerKind::Descending,
        _ => CornerKind::Mixed,
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinkEdge {
    pub ends: (Direction, Direction),
    pub relator: usize,
    /// Corner between letters `corner` and `corner + 1`.
    pub corner: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinkGraph {
    pub vertices: Vec<Direction>,
    pub edges: Vec<LinkEdge>,
}

impl LinkGraph {
    /// Connected with one fewer edge than vertices (edges counted with
    /// multiplicity).
    pub fn is_tree(&self) -> bool {
        if self.vertices.is_empty() || self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        let idx = |d: Direction| self.vertices.iter().position(|&v| v == d);
        let mut seen = vec![false; self.vertices.len()];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                let (Some(a), Some(b)) = (idx(e.ends.0), idx(e.ends.1)) else { return false };
                for (p, q) in [(a, b), (b, a)] {
                    if p == v && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

impl fmt::Display for LinkGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(Direction::to_string).collect();
        writeln!(f, "vertices: {}", vs.join(" "))?;
        for e in &self.edges {
            writeln!(f, "{} -- {} (relator {} corner {})", e.ends.0, e.ends.1, e.relator, e.corner)?;
        }
        Ok(())
    }
}

fn link(p: &Presentation, w: &WeightMap, up: bool) -> Result<LinkGraph, MorseError> {
    for r in p.relators() {
        heights(r, w)?;
    }
    let vertices = p.alphabet().generators().iter().map(|&gen| Direction { gen, up }).collect();
    let want = if up { CornerKind::Ascending } else { CornerKind::Descending };
    let mut edges = Vec::new();
    for (ri, r) in p.relators().iter().enumerate() {
        let ls = r.letters();
        for i in 0..ls.len() {
            let (x, y) = (ls[i], ls[(i + 1) % ls.len()]);
            if corner_kind(x, y) == want {
                edges.push(LinkEdge { ends: corner(x, y), relator: ri, corner: i });
            }
        }
    }
    Ok(LinkGraph { vertices, edges })
}

pub fn ascending_link(p: &Presentation, w: &WeightMap) -> Result<LinkGraph, MorseError> {
    link(p, w, true)
}

pub fn descending_link(p: &Presentation, w: &WeightMap) -> Result<LinkGraph, MorseError> {
    link(p, w, false)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KernelCertificate {
    pub cells: Vec<CellHeights>,
    pub areas: Vec<u64>,
    pub ascending: LinkGraph,
    pub descending: LinkGraph,
    /// Sum of the cell areas: the rank of the free kernel.
    pub rank: u64,
}

impl KernelCertificate {
    pub fn conclusion(&self) -> String {
        format!(
            "ascending and descending links are trees, so the level set carries the homotopy type of \
             the kernel; it is a rose with {} petals, so the kernel is free of rank {}",
            self.rank, self.rank
        )
    }
}

/// A certificate that the kernel of `w` is free of the returned rank. An
/// error means no certificate, not a disproof.
pub fn kernel_rank(p: &Presentation, w: &WeightMap) -> Result<KernelCertificate, MorseError> {
    check_weights(w)?;
    let cells = p.relators().iter().map(|r| heights(r, w)).collect::<Result<Vec<_>, _>>()?;
    let ascending = ascending_link(p, w)?;
    if !ascending.is_tree() {
        return Err(MorseError::LinkNotTree { which: "ascending" });
    }
    let descending = descending_link(p, w)?;
    if !descending.is_tree() {
        return Err(MorseError::LinkNotTree { which: "descending" });
    }
    let areas = cells.iter().map(cell_area).collect::<Result<Vec<_>, _>>()?;
    let rank = areas.iter().sum();
    Ok(KernelCertificate { cells, areas, ascending, descending, rank })
}

/// `s + 4 + (8+s)(s+1)/2`.
pub fn gs_kernel_rank_formula(s: i64) -> i64 {
    s + 4 + (8 + s) * (s + 1) / 2
}
