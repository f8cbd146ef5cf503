//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use fbcyclic::presentations::IntegerMatrix;
use fbcyclic::{Alphabet, Generator, Letter, Word};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn gen(c: char) -> Generator {
    Generator::new(c).unwrap()
}

pub fn cancels(x: Letter, y: Letter) -> bool {
    x.gen == y.gen && x.inverse != y.inverse
}

/// Free reduction by repeatedly deleting the leftmost cancelling pair.
pub fn naive_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut v = letters.to_vec();
    while let Some(i) = (0..v.len().saturating_sub(1)).find(|&i| cancels(v[i], v[i + 1])) {
        v.drain(i..i + 2);
    }
    v
}

/// Free reduction deleting a uniformly random cancelling pair each step.
pub fn random_order_reduce(letters: &[Letter], rng: &mut ChaCha8Rng) -> Vec<Letter> {
    let mut v = letters.to_vec();
    loop {
        let spots: Vec<usize> = (0..v.len().saturating_sub(1)).filter(|&i| cancels(v[i], v[i + 1])).collect();
        if spots.is_empty() {
            return v;
        }
        let i = spots[rng.gen_range(0..spots.len())];
        v.drain(i..i + 2);
    }
}

pub fn random_letters(alphabet: &Alphabet, len: usize, rng: &mut ChaCha8Rng) -> Vec<Letter> {
    let gens = alphabet.generators();
    (0..len)
        .map(|_| {
            let g = gens[rng.gen_range(0..gens.len())];
            if rng.gen_bool(0.5) { g.inv() } else { g.pos() }
        })
        .collect()
}

/// Cyclic reduction by trimming, then compare all rotations.
pub fn cyclically_equal(u: &Word, v: &Word) -> bool {
    let trim = |w: &Word| {
        let mut l = naive_reduce(w.letters());
        while l.len() >= 2 && cancels(l[0], l[l.len() - 1]) {
            l.remove(l.len() - 1);
            l.remove(0);
        }
        l
    };
    let (a, b) = (trim(u), trim(v));
    a.len() == b.len() && (a.is_empty() || (0..a.len()).any(|k| (0..a.len()).all(|i| a[(i + k) % a.len()] == b[i])))
}

/// Longest piece, by counting places. A place is a (cyclic word, start)
/// pair over the distinct cyclic words among the relators and their
/// inverses; a word is a piece when it can be read at two places, and
/// readings inside a single cyclic word are limited to one less than its
/// length.
pub fn piece_oracle(alphabet: &Alphabet, relators: &[Word]) -> usize {
    let mut cyclics: Vec<Vec<Letter>> = Vec::new();
    for r in relators {
        for w in [r.clone(), r.inverse()] {
            let c = alphabet.cyclic(&w).letters().to_vec();
            if !cyclics.contains(&c) {
                cyclics.push(c);
            }
        }
    }
    let mut best = 0;
    for k in 1.. {
        let mut seen: HashMap<Vec<Letter>, Vec<usize>> = HashMap::new();
        for (ci, c) in cyclics.iter().enumerate() {
            let n = c.len();
            if k > n {
                continue;
            }
            for start in 0..n {
                let word: Vec<Letter> = (0..k).map(|i| c[(start + i) % n]).collect();
                seen.entry(word).or_default().push(ci);
            }
        }
        let found = seen.values().any(|places| {
            places.len() >= 2
                && (places.iter().any(|&c| c != places[0]) || k < cyclics[places[0]].len())
        });
        if !found {
            break;
        }
        best = k;
    }
    best
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> IntegerMatrix {
    let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect()).collect();
    IntegerMatrix::from_rows(&data)
}

/// Cofactor expansion, fine for the small sizes used here.
pub fn det_cofactor(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> =
                m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det_cofactor(&minor)
        })
        .sum()
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// Product of the invariant factors up to `k`: gcd of all k×k minors.
pub fn determinantal_divisor(m: &[Vec<i64>], k: usize) -> i64 {
    let (r, c) = (m.len(), m.first().map_or(0, Vec::len));
    let mut g = 0;
    for rows in subsets(r, k) {
        for cols in subsets(c, k) {
            let minor: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect();
            g = gcd(g, det_cofactor(&minor));
        }
    }
    g
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// All cyclically reduced words over `alphabet` of each length up to `max_len`.
pub fn all_cyclically_reduced(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
    let letters: Vec<Letter> = alphabet.generators().iter().flat_map(|g| [g.pos(), g.inv()]).collect();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last().is_some_and(|&x| cancels(x, l)) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        for w in &next {
            if !cancels(w[0], w[w.len() - 1]) || w.len() == 1 {
                out.push(Word::from_letters(w.iter().copied()));
            }
        }
        layer = next;
    }
    out
}
