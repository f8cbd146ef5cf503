//! Freely reduced and cyclically reduced words over a small alphabet of
//! single-letter generators.
//!
//! Text form: a lowercase letter is a generator, the matching uppercase
//! letter its inverse, so `TatB` is t⁻¹ a t b⁻¹. The identity renders as `1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid character {0:?} in word (expected ASCII letters)")]
    InvalidChar(char),
    #[error("generator `{0}` is not in the alphabet")]
    UnknownGenerator(Generator),
    #[error("generator `{0}` listed more than once")]
    DuplicateGenerator(Generator),
    #[error("no image given for generator `{0}`")]
    MissingImage(Generator),
    #[error("no weight given for generator `{0}`")]
    MissingWeight(Generator),
    #[error("malformed weight entry {0:?} (expected g=INT)")]
    BadWeight(String),
    #[error("malformed generator image {0:?} (expected g=WORD)")]
    BadImage(String),
    #[error("W(x,y) is defined for s >= 3, got s = {0}")]
    OutOfRange(i64),
    #[error("W(x,y) needs two distinct generators")]
    SameGenerator,
}

/// A generator: one lowercase ASCII letter.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Generator(char);

impl Generator {
    pub fn new(name: char) -> Result<Self, WordError> {
        if name.is_ascii_lowercase() {
            Ok(Generator(name))
        } else {
            Err(WordError::InvalidChar(name))
        }
    }

    pub fn name(self) -> char {
        self.0
    }

    pub fn pos(self) -> Letter {
        Letter { gen: self, inverse: false }
    }

    pub fn inv(self) -> Letter {
        Letter { gen: self, inverse: true }
    }

    /// The one-letter word `g`.
    pub fn word(self) -> Word {
        Word(vec![self.pos()])
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A generator or its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    pub gen: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn from_char(c: char) -> Result<Self, WordError> {
        if c.is_ascii_lowercase() {
            Ok(Generator(c).pos())
        } else if c.is_ascii_uppercase() {
            Ok(Generator(c.to_ascii_lowercase()).inv())
        } else {
            Err(WordError::InvalidChar(c))
        }
    }

    pub fn to_char(self) -> char {
        if self.inverse {
            self.gen.0.to_ascii_uppercase()
        } else {
            self.gen.0
        }
    }

    pub fn inv(self) -> Letter {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    /// +1 or -1.
    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// Free reduction of an arbitrary letter sequence.
pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for l in raw {
        match out.last() {
            Some(&top) if top.cancels(l) => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    Word(out)
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Reduces the given letters.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        reduce(raw)
    }

    /// Parses the compact text form; `1` and the empty string give the identity.
    pub fn parse(text: &str) -> Result<Self, WordError> {
        let text = text.trim();
        if text == "1" {
            return Ok(Word::identity());
        }
        let letters = text.chars().map(Letter::from_char).collect::<Result<Vec<_>, _>>()?;
        Ok(reduce(letters))
    }

    /// Parses and reports whether the input was already freely reduced.
    pub fn parse_raw(text: &str) -> Result<(Self, bool), WordError> {
        let text = text.trim();
        if text == "1" {
            return Ok((Word::identity(), true));
        }
        let letters = text.chars().map(Letter::from_char).collect::<Result<Vec<_>, _>>()?;
        let n = letters.len();
        let w = reduce(letters);
        let was_reduced = w.len() == n;
        Ok((w, was_reduced))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn multiply(&self, other: &Word) -> Word {
        // only the junction can cancel
        let mut out = self.0.clone();
        let mut rest = other.0.iter().peekable();
        while let (Some(&top), Some(&&next)) = (out.last(), rest.peek()) {
            if top.cancels(next) {
                out.pop();
                rest.next();
            } else {
                break;
            }
        }
        out.extend(rest);
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// `self^y = y⁻¹ · self · y`.
    pub fn conjugate(&self, y: &Word) -> Word {
        y.inverse().multiply(self).multiply(y)
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.multiply(&base);
        }
        out
    }

    /// Homomorphic image under `g ↦ images[g]`.
    pub fn substitute(&self, images: &BTreeMap<Generator, Word>) -> Result<Word, WordError> {
        let mut out = Vec::with_capacity(self.len());
        for l in &self.0 {
            let img = images.get(&l.gen).ok_or(WordError::MissingImage(l.gen))?;
            if l.inverse {
                out.extend(img.0.iter().rev().map(|x| x.inv()));
            } else {
                out.extend(img.0.iter().copied());
            }
        }
        Ok(reduce(out))
    }

    /// Number of occurrences of `g` or its inverse.
    pub fn occurrences(&self, g: Generator) -> usize {
        self.0.iter().filter(|l| l.gen == g).count()
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        self.0.iter().map(|l| l.gen)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => self.len() == 1 || !a.cancels(b),
            _ => true,
        }
    }

    /// Cyclic rotation starting at `offset`.
    pub fn rotate(&self, offset: usize) -> Word {
        let n = self.len();
        if n == 0 {
            return Word::identity();
        }
        let k = offset % n;
        let mut v = Vec::with_capacity(n);
        v.extend_from_slice(&self.0[k..]);
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }
}

impl Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        self.multiply(rhs)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// An ordered list of distinct generators. The order drives canonical
/// cyclic forms and every deterministic tie-break in the crate.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Alphabet(Vec<Generator>);

impl Alphabet {
    pub fn new<I: IntoIterator<Item = Generator>>(gens: I) -> Result<Self, WordError> {
        let mut v: Vec<Generator> = Vec::new();
        for g in gens {
            if v.contains(&g) {
                return Err(WordError::DuplicateGenerator(g));
            }
            v.push(g);
        }
        Ok(Alphabet(v))
    }

    /// `"a b t"` or `"abt"`.
    pub fn parse(text: &str) -> Result<Self, WordError> {
        let gens = text
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(Generator::new)
            .collect::<Result<Vec<_>, _>>()?;
        Alphabet::new(gens)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rank_of(&self, g: Generator) -> Option<usize> {
        self.0.iter().position(|&x| x == g)
    }

    pub fn contains(&self, g: Generator) -> bool {
        self.0.contains(&g)
    }

    pub fn check(&self, w: &Word) -> Result<(), WordError> {
        match w.generators().find(|g| !self.contains(*g)) {
            Some(g) => Err(WordError::UnknownGenerator(g)),
            None => Ok(()),
        }
    }

    /// Free reduction restricted to this alphabet.
    pub fn reduce(&self, raw: &[Letter]) -> Result<Word, WordError> {
        if let Some(l) = raw.iter().find(|l| !self.contains(l.gen)) {
            return Err(WordError::UnknownGenerator(l.gen));
        }
        Ok(reduce(raw.iter().copied()))
    }

    /// Sort key of a letter: alphabet position, then `g` before `g⁻¹`.
    /// Letters outside the alphabet sort after all others, by name.
    pub fn letter_key(&self, l: Letter) -> (usize, char, bool) {
        match self.rank_of(l.gen) {
            Some(r) => (r, ' ', l.inverse),
            None => (usize::MAX, l.gen.0, l.inverse),
        }
    }

    pub fn cmp_letters(&self, a: &[Letter], b: &[Letter]) -> Ordering {
        for (x, y) in a.iter().zip(b) {
            match self.letter_key(*x).cmp(&self.letter_key(*y)) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        a.len().cmp(&b.len())
    }

    pub fn cmp_words(&self, a: &Word, b: &Word) -> Ordering {
        self.cmp_letters(a.letters(), b.letters())
    }

    /// Cyclic reduction with canonical rotation. Returns `(core, c)` with
    /// `u = c⁻¹ · core · c` in the free group.
    pub fn cyclic_reduce(&self, u: &Word) -> (CyclicWord, Word) {
        let letters = u.letters();
        let n = letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && letters[k].cancels(letters[n - 1 - k]) {
            k += 1;
        }
        let prefix = Word(letters[..k].to_vec());
        let core = &letters[k..n - k];
        let shift = self.least_rotation(core);
        let alpha = Word(core[..shift].to_vec());
        let mut canon = core[shift..].to_vec();
        canon.extend_from_slice(&core[..shift]);
        // u = p·α·canon·α⁻¹·p⁻¹
        let conjugator = prefix.multiply(&alpha).inverse();
        (CyclicWord(canon), conjugator)
    }

    /// The canonical cyclic word of `u`'s conjugacy class.
    pub fn cyclic(&self, u: &Word) -> CyclicWord {
        self.cyclic_reduce(u).0
    }

    fn least_rotation(&self, s: &[Letter]) -> usize {
        let n = s.len();
        if n == 0 {
            return 0;
        }
        let key = |i: usize| self.letter_key(s[i % n]);
        let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
        while i < n && j < n && k < n {
            let (a, b) = (key(i + k), key(j + k));
            if a == b {
                k += 1;
                continue;
            }
            if a > b {
                i += k + 1;
            } else {
                j += k + 1;
            }
            if i == j {
                j += 1;
            }
            k = 0;
        }
        i.min(j)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", names.join(" "))
    }
}

/// A cyclically reduced word stored in its least rotation (for the alphabet
/// it was built with), so structural equality is equality of conjugacy
/// classes. Build one with [`Alphabet::cyclic`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The canonical rotation as a linear word.
    pub fn to_word(&self) -> Word {
        Word(self.0.clone())
    }

    pub fn inverse(&self, alphabet: &Alphabet) -> CyclicWord {
        alphabet.cyclic(&self.to_word().inverse())
    }

    pub fn rotations(&self) -> Vec<Word> {
        let w = self.to_word();
        (0..self.len()).map(|k| w.rotate(k)).collect()
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_word().fmt(f)
    }
}

/// Integer weight per generator, total over an alphabet. Defines the
/// homomorphism to ℤ sending each generator to its weight.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightMap(BTreeMap<Generator, i64>);

impl WeightMap {
    pub fn new<I>(alphabet: &Alphabet, weights: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = (Generator, i64)>,
    {
        let mut map = BTreeMap::new();
        for (g, w) in weights {
            if !alphabet.contains(g) {
                return Err(WordError::UnknownGenerator(g));
            }
            if map.insert(g, w).is_some() {
                return Err(WordError::DuplicateGenerator(g));
            }
        }
        if let Some(&g) = alphabet.generators().iter().find(|g| !map.contains_key(g)) {
            return Err(WordError::MissingWeight(g));
        }
        Ok(WeightMap(map))
    }

    pub fn uniform(alphabet: &Alphabet, weight: i64) -> Self {
        WeightMap(alphabet.generators().iter().map(|&g| (g, weight)).collect())
    }

    /// `"a=1 b=0 t=1"`.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self, WordError> {
        let mut entries = Vec::new();
        for item in text.split(|c: char| c.is_whitespace() || c == ',' || c == ';') {
            if item.is_empty() {
                continue;
            }
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| WordError::BadWeight(item.to_string()))?;
            let mut chars = name.trim().chars();
            let g = match (chars.next(), chars.next()) {
                (Some(c), None) => Generator::new(c)?,
                _ => return Err(WordError::BadWeight(item.to_string())),
            };
            let w: i64 = value
                .trim()
                .parse()
                .map_err(|_| WordError::BadWeight(item.to_string()))?;
            entries.push((g, w));
        }
        WeightMap::new(alphabet, entries)
    }

    pub fn weight(&self, g: Generator) -> Option<i64> {
        self.0.get(&g).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Generator, i64)> + '_ {
        self.0.iter().map(|(&g, &w)| (g, w))
    }

    /// Image of `u` under the homomorphism to ℤ.
    pub fn exponent_sum(&self, u: &Word) -> Result<i64, WordError> {
        self.exponent_sum_letters(u.letters())
    }

    pub fn exponent_sum_letters(&self, letters: &[Letter]) -> Result<i64, WordError> {
        letters.iter().try_fold(0i64, |acc, l| {
            let w = self.weight(l.gen).ok_or(WordError::UnknownGenerator(l.gen))?;
            Ok(acc + l.sign() * w)
        })
    }
}

impl fmt::Display for WeightMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(g, w)| format!("{g}={w}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `W(x,y) = x y⁴ x y⁵ x ⋯ x y^{4+s} x`.
pub fn build_w(s: i64, x: Generator, y: Generator) -> Result<Word, WordError> {
    if s < 3 {
        return Err(WordError::OutOfRange(s));
    }
    if x == y {
        return Err(WordError::SameGenerator);
    }
    let mut letters = vec![x.pos()];
    for e in 4..=4 + s {
        letters.extend(std::iter::repeat_n(y.pos(), e as usize));
        letters.push(x.pos());
    }
    Ok(Word(letters))
}

/// Closed form for `|W(x,y)|`: `(s+2) + (s+1)(s+8)/2`.
pub fn w_length(s: i64) -> i64 {
    (s + 2) + (s + 1) * (s + 8) / 2
}
