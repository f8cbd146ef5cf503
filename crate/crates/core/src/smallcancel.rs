//! Pieces of symmetrized relator sets and the metric condition `C'(λ)`.
//!
//! A piece is a word that is a prefix of two distinct elements of the
//! symmetrized set, or that occurs at two distinct rotational positions of
//! one element (only possible for proper powers, where it is capped at one
//! less than the element length).

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::words::{Alphabet, CyclicWord, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmallCancelError {
    #[error("relator {0} is trivial")]
    TrivialRelator(usize),
    #[error("lambda {0} is not in (0, 1)")]
    BadLambda(Ratio<i64>),
    #[error("s = {0} is below 3")]
    SOutOfRange(i64),
}

/// All rotations of all relators and their inverses, sorted and
/// de-duplicated.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymmetrizedSet {
    alphabet: Alphabet,
    elements: Vec<Word>,
    /// Input relator indices each element comes from.
    sources: Vec<Vec<usize>>,
    relator_lengths: Vec<usize>,
}

pub fn symmetrize(alphabet: &Alphabet, relators: &[CyclicWord]) -> Result<SymmetrizedSet, SmallCancelError> {
    let mut tagged: Vec<(Word, usize)> = Vec::new();
    for (i, r) in relators.iter().enumerate() {
        if r.is_empty() {
            return Err(SmallCancelError::TrivialRelator(i));
        }
        for rot in r.rotations().into_iter().chain(r.inverse(alphabet).rotations()) {
            tagged.push((rot, i));
        }
    }
    tagged.sort_by(|a, b| alphabet.cmp_words(&a.0, &b.0).then(a.1.cmp(&b.1)));
    let mut elements: Vec<Word> = Vec::new();
    let mut sources: Vec<Vec<usize>> = Vec::new();
    for (w, i) in tagged {
        if elements.last() == Some(&w) {
            let src = sources.last_mut().unwrap();
            if src.last() != Some(&i) {
                src.push(i);
            }
        } else {
            elements.push(w);
            sources.push(vec![i]);
        }
    }
    Ok(SymmetrizedSet {
        alphabet: alphabet.clone(),
        elements,
        sources,
        relator_lengths: relators.iter().map(CyclicWord::len).collect(),
    })
}

impl SymmetrizedSet {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn sources(&self, element: usize) -> &[usize] {
        &self.sources[element]
    }

    pub fn relator_lengths(&self) -> &[usize] {
        &self.relator_lengths
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.elements.binary_search_by(|e| self.alphabet.cmp_words(e, w)).is_ok()
    }
}

/// An occurrence of a piece: it starts at `offset` of element `element`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Occurrence {
    pub element: usize,
    pub offset: usize,
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "element {} offset {}", self.element, self.offset)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PieceWitness {
    pub piece: Word,
    pub first: Occurrence,
    pub second: Occurrence,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PieceReport {
    pub element_count: usize,
    pub max_piece_length: usize,
    /// Lexicographically least longest piece, then least occurrence pair.
    /// `None` when there are no pieces.
    pub witness: Option<PieceWitness>,
    /// Longest piece involving an element of each input relator's orbit.
    pub per_relator_max: Vec<usize>,
}

fn lcp(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Smallest positive rotation fixing `u`, if any below `|u|`.
fn period(u: &[Letter]) -> Option<usize> {
    let n = u.len();
    (1..n).find(|&d| n.is_multiple_of(d) && (0..n).all(|i| u[i] == u[(i + d) % n]))
}

/// Longest piece through each element, by adjacent common prefixes in the
/// sorted element list.
fn element_maxima(sym: &SymmetrizedSet) -> Vec<usize> {
    let e = &sym.elements;
    let mut best: Vec<usize> =
        e.iter().map(|u| if period(u.letters()).is_some() { u.len() - 1 } else { 0 }).collect();
    for i in 1..e.len() {
        let l = lcp(e[i - 1].letters(), e[i].letters());
        best[i - 1] = best[i - 1].max(l);
        best[i] = best[i].max(l);
    }
    best
}

/// Quadratic check over all element pairs and all offsets within each element.
fn element_maxima_brute_force(sym: &SymmetrizedSet) -> Vec<usize> {
    let e = &sym.elements;
    let mut best = vec![0; e.len()];
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let l = lcp(e[i].letters(), e[j].letters());
            best[i] = best[i].max(l);
            best[j] = best[j].max(l);
        }
        // a prefix of `u` read again from offset `b`
        let u = e[i].letters();
        let n = u.len();
        for b in 1..n {
            let l = (0..n - 1).take_while(|&k| u[k] == u[(b + k) % n]).count();
            best[i] = best[i].max(l);
        }
    }
    best
}

fn report(sym: &SymmetrizedSet, maxima: Vec<usize>) -> PieceReport {
    let max_piece_length = maxima.iter().copied().max().unwrap_or(0);
    let mut per_relator_max = vec![0; sym.relator_lengths.len()];
    for (m, src) in maxima.iter().zip(&sym.sources) {
        for &r in src {
            per_relator_max[r] = per_relator_max[r].max(*m);
        }
    }
    let witness = if max_piece_length == 0 { None } else { witness(sym, &maxima, max_piece_length) };
    PieceReport { element_count: sym.len(), max_piece_length, witness, per_relator_max }
}

fn witness(sym: &SymmetrizedSet, maxima: &[usize], m: usize) -> Option<PieceWitness> {
    // elements are sorted, so the first element carrying a longest piece
    // starts with the lexicographically least one
    let i = maxima.iter().position(|&x| x == m)?;
    let u = &sym.elements[i];
    let piece = Word::from_letters(u.letters()[..m].iter().copied());
    let first = Occurrence { element: i, offset: 0 };
    let second = match period(u.letters()) {
        Some(d) if m + 1 == u.len() => Occurrence { element: i, offset: d },
        _ => Occurrence { element: i + 1, offset: 0 },
    };
    Some(PieceWitness { piece, first, second })
}

pub fn max_piece(sym: &SymmetrizedSet) -> PieceReport {
    report(sym, element_maxima(sym))
}

/// Same result as [`max_piece`] by exhaustive comparison.
pub fn max_piece_brute_force(sym: &SymmetrizedSet) -> PieceReport {
    report(sym, element_maxima_brute_force(sym))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MetricReport {
    pub lambda: Ratio<i64>,
    pub pieces: PieceReport,
    /// `λ·|r|` for each relator.
    pub thresholds: Vec<Ratio<i64>>,
    /// Every piece `p` in the orbit of `r` has `|p| < λ·|r|`.
    pub holds: bool,
}

impl MetricReport {
    /// Smallest slack `λ·|r| − max piece` over the relators.
    pub fn margin(&self) -> Option<Ratio<i64>> {
        self.thresholds
            .iter()
            .zip(&self.pieces.per_relator_max)
            .map(|(t, &m)| t - Ratio::from_integer(m as i64))
            .min()
    }
}

pub fn check_metric(
    alphabet: &Alphabet,
    relators: &[CyclicWord],
    lambda: Ratio<i64>,
    brute_force: bool,
) -> Result<MetricReport, SmallCancelError> {
    if lambda <= Ratio::from_integer(0) || lambda >= Ratio::from_integer(1) {
        return Err(SmallCancelError::BadLambda(lambda));
    }
    let sym = symmetrize(alphabet, relators)?;
    let pieces = if brute_force { max_piece_brute_force(&sym) } else { max_piece(&sym) };
    let thresholds: Vec<Ratio<i64>> =
        relators.iter().map(|r| lambda * Ratio::from_integer(r.len() as i64)).collect();
    let holds = thresholds
        .iter()
        .zip(&pieces.per_relator_max)
        .all(|(t, &m)| Ratio::from_integer(m as i64).cmp(t) == Ordering::Less);
    Ok(MetricReport { lambda, pieces, thresholds, holds })
}

/// The sufficient inequality `2s + 15 ≤ (8 + (14+s)(s+1)) / 7`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GsBound {
    pub s: i64,
    pub lhs: Ratio<i64>,
    pub rhs: Ratio<i64>,
    pub satisfied: bool,
}

pub fn gs_bound_check(s: i64) -> Result<GsBound, SmallCancelError> {
    if s < 3 {
        return Err(SmallCancelError::SOutOfRange(s));
    }
    let lhs = Ratio::from_integer(2 * s + 15);
    let rhs = Ratio::new(8 + (14 + s) * (s + 1), 7);
    Ok(GsBound { s, lhs, rhs, satisfied: lhs <= rhs })
}

/// Renders `p/q`, or `p` for integers.
pub fn fmt_ratio(r: &Ratio<i64>) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{make_gs, make_prop1, one_relator_form};
    use crate::words::Generator;

    fn cyc(alpha: &Alphabet, s: &str) -> CyclicWord {
        alpha.cyclic(&Word::parse(s).unwrap())
    }

    fn ab() -> Alphabet {
        Alphabet::parse("a b").unwrap()
    }

    fn one_relator(s: Option<i64>) -> (Alphabet, Vec<CyclicWord>) {
        let t = Generator::new('t').unwrap();
        let p = match s {
            Some(s) => make_gs(s).unwrap(),
            None => make_prop1(),
        };
        let q = one_relator_form(&p, t).unwrap();
        (q.alphabet().clone(), q.relators().to_vec())
    }

    #[test]
    fn symmetrize_sizes() {
        let a = ab();
        assert_eq!(symmetrize(&a, &[cyc(&a, "aaaa")]).unwrap().len(), 2);
        assert_eq!(symmetrize(&a, &[cyc(&a, "abAB")]).unwrap().len(), 8);
        let (a9, r9) = one_relator(Some(9));
        assert_eq!(symmetrize(&a9, &r9).unwrap().len(), 476);
        assert_eq!(
            symmetrize(&a, &[cyc(&a, "ab"), a.cyclic(&Word::identity())]),
            Err(SmallCancelError::TrivialRelator(1))
        );
    }

    #[test]
    fn symmetrize_is_idempotent_and_inverse_closed() {
        let a = ab();
        let sym = symmetrize(&a, &[cyc(&a, "aabAB"), cyc(&a, "abbb")]).unwrap();
        let again: Vec<CyclicWord> = sym.elements().iter().map(|w| a.cyclic(w)).collect();
        assert_eq!(symmetrize(&a, &again).unwrap().elements(), sym.elements());
        for w in sym.elements() {
            assert!(sym.contains(&w.inverse()));
        }
    }

    #[test]
    fn commutator_and_power() {
        let a = ab();
        let r = max_piece(&symmetrize(&a, &[cyc(&a, "abAB")]).unwrap());
        assert_eq!(r.max_piece_length, 1);
        let w = r.witness.unwrap();
        assert_eq!(w.piece.to_string(), "a");
        assert_eq!((w.first, w.second), (Occurrence { element: 0, offset: 0 }, Occurrence { element: 1, offset: 0 }));

        let sym = symmetrize(&a, &[cyc(&a, "aaaa")]).unwrap();
        let r = max_piece(&sym);
        assert_eq!(r.max_piece_length, 3);
        let w = r.witness.clone().unwrap();
        assert_eq!(w.piece.to_string(), "aaa");
        assert_eq!(w.second, Occurrence { element: 0, offset: 1 });
        assert_eq!(max_piece_brute_force(&sym), r);
    }

    #[test]
    fn metric_examples() {
        let seventh = Ratio::new(1, 7);
        let (a9, r9) = one_relator(Some(9));
        let m = check_metric(&a9, &r9, seventh, false).unwrap();
        assert!(m.holds);
        assert_eq!(m.thresholds, vec![Ratio::from_integer(34)]);
        assert!(m.pieces.max_piece_length <= 32);

        let a = ab();
        let c = check_metric(&a, &[cyc(&a, "abAB")], seventh, false).unwrap();
        assert!(!c.holds);
        assert_eq!(c.thresholds, vec![Ratio::new(4, 7)]);

        let (a1, r1) = one_relator(None);
        let p = check_metric(&a1, &r1, seventh, false).unwrap();
        assert!(!p.holds && p.pieces.max_piece_length >= 2);

        assert!(check_metric(&a, &[cyc(&a, "ab")], Ratio::from_integer(1), false).is_err());
    }

    #[test]
    fn bound_check_examples() {
        let b9 = gs_bound_check(9).unwrap();
        assert_eq!((b9.lhs, b9.rhs, b9.satisfied), (Ratio::from_integer(33), Ratio::from_integer(34), true));
        let b8 = gs_bound_check(8).unwrap();
        assert_eq!((b8.rhs, b8.satisfied), (Ratio::new(206, 7), false));
        let b3 = gs_bound_check(3).unwrap();
        assert_eq!((b3.lhs, b3.rhs, b3.satisfied), (Ratio::from_integer(21), Ratio::new(76, 7), false));
        assert!(gs_bound_check(2).is_err());
        assert_eq!(fmt_ratio(&b8.rhs), "206/7");
    }

    #[test]
    fn per_relator_thresholds() {
        // a piece short enough for the long relator but not the short one
        let a = ab();
        let rels = [cyc(&a, "aab"), cyc(&a, "aabbabbbabbbbabbbbb")];
        let m = check_metric(&a, &rels, Ratio::new(1, 2), false).unwrap();
        assert!(m.pieces.per_relator_max[0] >= 2);
        assert!(!m.holds);
    }
}
