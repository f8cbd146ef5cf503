//! Stallings graphs of finitely generated subgroups of free groups.
//!
//! A graph is built as a wedge of loops spelling the generators at the
//! basepoint, folded until no vertex has two outgoing (or two incoming)
//! edges with the same label, then trimmed to its core. Folded graphs are
//! renumbered canonically (breadth first from the basepoint, generators in
//! alphabet order, outgoing before incoming) so isomorphic graphs compare
//! equal.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::presentations::FreeEndo;
use crate::words::{Alphabet, Generator, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StallingsError {
    #[error("graph is not folded")]
    NotFolded,
    #[error("graph is not connected")]
    Disconnected,
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("certificate refused: {0}")]
    Refused(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Edge {
    pub from: usize,
    pub label: Generator,
    pub to: usize,
}

/// Vertex 0 is the basepoint.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubgroupGraph {
    alphabet: Alphabet,
    vertices: usize,
    edges: Vec<Edge>,
    folded: bool,
}

impl SubgroupGraph {
    /// Unfolded wedge of loops, one per nontrivial generator word.
    pub fn wedge(gens: &[Word], alphabet: &Alphabet) -> Result<Self, StallingsError> {
        let mut vertices = 1;
        let mut edges = Vec::new();
        for w in gens {
            alphabet.check(w)?;
            let n = w.len();
            for (i, l) in w.letters().iter().enumerate() {
                let u = if i == 0 { 0 } else { vertices + i - 1 };
                let v = if i + 1 == n { 0 } else { vertices + i };
                let (from, to) = if l.inverse { (v, u) } else { (u, v) };
                edges.push(Edge { from, label: l.gen, to });
            }
            vertices += n.saturating_sub(1);
        }
        Ok(SubgroupGraph { alphabet: alphabet.clone(), vertices, edges, folded: false })
    }

    /// Stallings graph of `⟨gens⟩`.
    pub fn from_generators(gens: &[Word], alphabet: &Alphabet) -> Result<Self, StallingsError> {
        let mut g = Self::wedge(gens, alphabet)?;
        g.fold();
        Ok(g)
    }

    /// The one-vertex rose: the whole free group on `alphabet`.
    pub fn rose(alphabet: &Alphabet) -> Self {
        let gens: Vec<Word> = alphabet.generators().iter().map(|g| g.word()).collect();
        Self::from_generators(&gens, alphabet).expect("generators lie in their alphabet")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_folded(&self) -> bool {
        self.folded
    }

    pub fn fold(&mut self) {
        self.fold_with(|_| 0);
    }

    /// Folds, letting `pick(n)` choose which of the `n` pending
    /// identifications to perform next. The result does not depend on the
    /// choices.
    pub fn fold_with<F: FnMut(usize) -> usize>(&mut self, mut pick: F) {
        self.dedup();
        loop {
            let conflicts = self.conflicts();
            if conflicts.is_empty() {
                break;
            }
            let (keep, drop) = conflicts[pick(conflicts.len()) % conflicts.len()];
            for e in &mut self.edges {
                if e.from == drop {
                    e.from = keep;
                }
                if e.to == drop {
                    e.to = keep;
                }
            }
            self.dedup();
        }
        self.trim();
        self.canonicalize();
        self.folded = true;
    }

    fn dedup(&mut self) {
        self.edges.sort();
        self.edges.dedup();
    }

    /// Vertex pairs that must be identified, `(keep, drop)` with `keep < drop`.
    fn conflicts(&self) -> Vec<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (i, a) in self.edges.iter().enumerate() {
            for b in &self.edges[i + 1..] {
                if a.label != b.label {
                    continue;
                }
                if a.from == b.from && a.to != b.to {
                    out.insert((a.to.min(b.to), a.to.max(b.to)));
                }
                if a.to == b.to && a.from != b.from {
                    out.insert((a.from.min(b.from), a.from.max(b.from)));
                }
            }
        }
        // basepoint 0 always survives as `keep`
        out.into_iter().collect()
    }

    /// Removes degree-one vertices other than the basepoint, repeatedly.
    fn trim(&mut self) {
        loop {
            let mut degree = vec![0usize; self.vertices];
            for e in &self.edges {
                degree[e.from] += 1;
                degree[e.to] += 1;
            }
            let leaves: BTreeSet<usize> =
                (1..self.vertices).filter(|&v| degree[v] == 1).collect();
            if leaves.is_empty() {
                break;
            }
            self.edges.retain(|e| !leaves.contains(&e.from) && !leaves.contains(&e.to));
        }
    }

    /// Breadth-first renumbering from the basepoint; drops isolated vertices
    /// other than the basepoint.
    fn canonicalize(&mut self) {
        let mut label = vec![usize::MAX; self.vertices];
        label[0] = 0;
        let mut next = 1;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &g in self.alphabet.generators() {
                let out = self.edges.iter().filter(|e| e.from == v && e.label == g).map(|e| e.to);
                let inc = self.edges.iter().filter(|e| e.to == v && e.label == g).map(|e| e.from);
                let nbrs: Vec<usize> = out.chain(inc).collect();
                for w in nbrs {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        next += 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        // unreachable vertices keep a stable order after the reachable ones
        let mut used: BTreeSet<usize> = BTreeSet::new();
        for e in &self.edges {
            used.insert(e.from);
            used.insert(e.to);
        }
        for v in used {
            if label[v] == usize::MAX {
                label[v] = next;
                next += 1;
            }
        }
        for e in &mut self.edges {
            e.from = label[e.from];
            e.to = label[e.to];
        }
        self.vertices = next;
        self.edges.sort_by_key(|e| (e.from, self.alphabet.rank_of(e.label), e.to));
    }

    fn step(&self, v: usize, g: Generator, inverse: bool) -> Option<usize> {
        self.edges.iter().find_map(|e| match inverse {
            false if e.from == v && e.label == g => Some(e.to),
            true if e.to == v && e.label == g => Some(e.from),
            _ => None,
        })
    }

    /// Membership: `w` reads a closed path at the basepoint.
    pub fn contains(&self, w: &Word) -> Result<bool, StallingsError> {
        if !self.folded {
            return Err(StallingsError::NotFolded);
        }
        let mut v = 0;
        for l in w.letters() {
            match self.step(v, l.gen, l.inverse) {
                Some(next) => v = next,
                None => return Ok(false),
            }
        }
        Ok(v == 0)
    }

    pub fn contains_all(&self, ws: &[Word]) -> Result<bool, StallingsError> {
        for w in ws {
            if !self.contains(w)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [(e.from, e.to), (e.to, e.from)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Rank of the subgroup: `E − V + 1`.
    pub fn rank(&self) -> Result<usize, StallingsError> {
        if !self.folded {
            return Err(StallingsError::NotFolded);
        }
        if !self.is_connected() {
            return Err(StallingsError::Disconnected);
        }
        Ok(self.edges.len() + 1 - self.vertices)
    }

    /// Index one: the folded graph is the full rose.
    pub fn is_whole_group(&self) -> bool {
        self.folded && self.vertices == 1 && self.edges.len() == self.alphabet.len()
    }

    /// `v0 -a-> v1` lines in canonical order.
    pub fn dump(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SubgroupGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.edges {
            writeln!(f, "v{} -{}-> v{}", e.from, e.label, e.to)?;
        }
        Ok(())
    }
}

/// Image analysis of a free-group endomorphism.
#[derive(Clone, Debug)]
pub struct EndoReport {
    pub domain_rank: usize,
    pub image_rank: usize,
    pub injective: bool,
    pub proper: bool,
    /// First generator (alphabet order) missing from the image.
    pub missing_generator: Option<Word>,
    pub image: SubgroupGraph,
    pub justification: String,
}

pub fn analyze_endomorphism(e: &FreeEndo) -> Result<EndoReport, StallingsError> {
    let alphabet = e.alphabet();
    let image = SubgroupGraph::from_generators(&e.images(), alphabet)?;
    let image_rank = image.rank()?;
    let domain_rank = alphabet.len();
    let mut missing_generator = None;
    for g in alphabet.generators() {
        if !image.contains(&g.word())? {
            missing_generator = Some(g.word());
            break;
        }
    }
    let injective = image_rank == domain_rank;
    let proper = missing_generator.is_some();
    let justification = if injective {
        format!(
            "image has rank {image_rank} = rank of the domain; the endomorphism maps F_{domain_rank} onto a free group \
             of the same rank, so it is injective (free groups of finite rank are Hopfian)"
        )
    } else {
        format!("image has rank {image_rank} < {domain_rank}; not injective")
    };
    Ok(EndoReport { domain_rank, image_rank, injective, proper, missing_generator, image, justification })
}

/// Witness that `L1 = ⟨base⟩` is properly contained in its conjugate
/// `t L1 t⁻¹`, which rules out subgroup separability.
#[derive(Clone, Debug)]
pub struct SeparabilityWitness {
    /// `L1`, the base rose.
    pub inner: SubgroupGraph,
    /// `t⁻¹ L1 t = endo(L1)`.
    pub image: SubgroupGraph,
    pub conjugator: Word,
    /// Base element not in `endo(L1)`.
    pub missing: Word,
    /// `t · missing · t⁻¹ ∈ t L1 t⁻¹ ∖ L1`.
    pub outside_element: Word,
    pub justification: String,
}

/// Individual replayable facts behind a [`SeparabilityWitness`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct WitnessChecks {
    /// Every `t⁻¹ g t = endo(g)` lies in `L1`, hence `L1 ⊆ t L1 t⁻¹`.
    pub conjugate_contains_inner: bool,
    /// `missing ∉ endo(L1)`, hence `t·missing·t⁻¹ ∉ L1`.
    pub missing_outside_image: bool,
    /// The outside element does not read a loop in the `L1` graph.
    pub outside_not_traced: bool,
    /// `outside_element = missing^(t⁻¹)`.
    pub outside_is_conjugate: bool,
}

impl WitnessChecks {
    pub fn all(&self) -> bool {
        self.conjugate_contains_inner
            && self.missing_outside_image
            && self.outside_not_traced
            && self.outside_is_conjugate
    }
}

pub fn separability_witness(e: &FreeEndo, stable: Generator) -> Result<SeparabilityWitness, StallingsError> {
    if e.alphabet().contains(stable) {
        return Err(StallingsError::Refused(format!("stable letter `{stable}` lies in the base alphabet")));
    }
    let report = analyze_endomorphism(e)?;
    if !report.injective {
        return Err(StallingsError::Refused("endomorphism is not injective".into()));
    }
    let Some(missing) = report.missing_generator.clone() else {
        return Err(StallingsError::Refused("endomorphism is surjective (not proper)".into()));
    };
    let conjugator = stable.word();
    let outside_element = missing.conjugate(&conjugator.inverse());
    let justification = format!(
        "L1 = <{base}> and L2 = {t} L1 {t}^-1 are conjugate; L1 is a proper subgroup of L2 since \
         {out} lies in L2 but not in L1. In any finite quotient the images of L1 and L2 are conjugate, \
         hence of equal order, hence equal, so L1 cannot be separated from {out}.",
        base = e.alphabet(),
        t = stable,
        out = outside_element,
    );
    Ok(SeparabilityWitness {
        inner: SubgroupGraph::rose(e.alphabet()),
        image: report.image,
        conjugator,
        missing,
        outside_element,
        justification,
    })
}

impl SeparabilityWitness {
    pub fn replay(&self, e: &FreeEndo) -> Result<WitnessChecks, StallingsError> {
        Ok(WitnessChecks {
            conjugate_contains_inner: self.inner.contains_all(&e.images())?,
            missing_outside_image: !self.image.contains(&self.missing)?,
            outside_not_traced: !self.inner.contains(&self.outside_element)?,
            outside_is_conjugate: self.outside_element
                == self.missing.conjugate(&self.conjugator.inverse()),
        })
    }
}
