//! Finite presentations: the line-oriented file format, the stock group
//! constructors, and the machinery built on top of them (endomorphisms,
//! Tietze scripts, abelianization, ascending HNN recognition).

mod abelian;
mod endo;
mod hnn;
mod tietze;

pub use abelian::{
    abelianization, abelianized_endo, direct_limit, smith_normal_form, Abelianization,
    DirectLimit, IntegerMatrix, SmithForm,
};
pub use endo::{AutoError, FreeAuto, FreeEndo, SemidirectElement};
pub use hnn::{one_relator_form, recognize_ascending_hnn, HnnError, HnnStructure};
pub use tietze::{apply_tietze, replay_tietze, TietzeError, TietzeMove, TietzeScript};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::words::{build_w, Alphabet, CyclicWord, Generator, WeightMap, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("relator {0} is trivial")]
    TrivialRelator(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A finite presentation. Relators are kept as canonical cyclic words, in
/// order (Tietze moves address them by index). Equality ignores relator
/// order but not the generator order.
#[derive(Clone, Debug)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<CyclicWord>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: &[Word]) -> Result<Self, PresentationError> {
        let mut cyclic = Vec::with_capacity(relators.len());
        for (i, r) in relators.iter().enumerate() {
            alphabet.check(r)?;
            let c = alphabet.cyclic(r);
            if c.is_empty() {
                return Err(PresentationError::TrivialRelator(i));
            }
            cyclic.push(c);
        }
        Ok(Presentation { alphabet, relators: cyclic })
    }

    /// Unchecked: relators must already be canonical for `alphabet`.
    /// Trivial relators are allowed (Tietze intermediates).
    pub(crate) fn from_parts(alphabet: Alphabet, relators: Vec<CyclicWord>) -> Self {
        Presentation { alphabet, relators }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[CyclicWord] {
        &self.relators
    }

    pub fn relator_words(&self) -> Vec<Word> {
        self.relators.iter().map(CyclicWord::to_word).collect()
    }

    pub fn contains_relator(&self, r: &Word) -> bool {
        let c = self.alphabet.cyclic(r);
        self.relators.contains(&c)
    }

    /// 1 − #generators + #relators for the one-vertex presentation complex.
    pub fn euler_characteristic(&self) -> i64 {
        1 - self.alphabet.len() as i64 + self.relators.len() as i64
    }

    fn sorted_relators(&self) -> Vec<&CyclicWord> {
        let mut v: Vec<&CyclicWord> = self.relators.iter().collect();
        v.sort_by(|a, b| self.alphabet.cmp_letters(a.letters(), b.letters()));
        v
    }
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.sorted_relators() == other.sorted_relators()
    }
}

impl Eq for Presentation {}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gens: {}", self.alphabet)?;
        for r in &self.relators {
            writeln!(f, "rel: {r}")?;
        }
        Ok(())
    }
}

/// Result of parsing a presentation file.
#[derive(Clone, Debug)]
pub struct PresentationFile {
    pub presentation: Presentation,
    /// Named homomorphisms to ℤ declared with `hom:` / `weight:`.
    pub homs: BTreeMap<String, WeightMap>,
    pub warnings: Vec<String>,
}

impl PresentationFile {
    pub fn hom(&self, name: &str) -> Option<&WeightMap> {
        self.homs.get(name)
    }
}

/// Parses the presentation file format:
///
/// ```text
/// gens: a b t        # ordered alphabet
/// rel: TatB          # relator, uppercase = inverse
/// eq: b^t = abA      # t⁻¹·b·t·(abA)⁻¹
/// hom: psi
/// weight: a=1 b=1 t=1
/// ```
pub fn parse(text: &str) -> Result<PresentationFile, ParseError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut relators: Vec<(Word, usize, usize)> = Vec::new();
    let mut homs = BTreeMap::new();
    let mut pending_hom: Option<(String, usize)> = None;
    let mut warnings = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let err = |column: usize, message: String| ParseError { line: line_no, column, message };
        let colon = line
            .find(':')
            .ok_or_else(|| err(1, "expected `key: value`".to_string()))?;
        let key = line[..colon].trim();
        let value_col = colon + 2;
        let value = &line[colon + 1..];

        match key {
            "gens" => {
                if alphabet.is_some() {
                    return Err(err(1, "duplicate `gens:` line".into()));
                }
                let a = Alphabet::parse(value).map_err(|e| err(value_col, e.to_string()))?;
                if a.is_empty() {
                    return Err(err(value_col, "empty generator list".into()));
                }
                alphabet = Some(a);
            }
            "rel" | "eq" | "weight" if alphabet.is_none() => {
                return Err(err(1, format!("`{key}:` before `gens:`")));
            }
            "rel" => {
                let a = alphabet.as_ref().unwrap();
                let (w, col) = parse_side(value, value_col, a).map_err(|(c, m)| err(c, m))?;
                let raw_len = value.trim().chars().count();
                if w.len() != raw_len && value.trim() != "1" {
                    warnings.push(format!(
                        "line {line_no}: relator was not freely reduced ({raw_len} -> {} letters)",
                        w.len()
                    ));
                }
                relators.push((w, line_no, col));
            }
            "eq" => {
                let a = alphabet.as_ref().unwrap();
                let eq = value
                    .find('=')
                    .ok_or_else(|| err(value_col, "expected `lhs = rhs`".into()))?;
                let (lhs, _) = parse_side(&value[..eq], value_col, a).map_err(|(c, m)| err(c, m))?;
                let (rhs, _) = parse_side(&value[eq + 1..], value_col + eq + 1, a)
                    .map_err(|(c, m)| err(c, m))?;
                relators.push((lhs.multiply(&rhs.inverse()), line_no, value_col));
            }
            "hom" => {
                let name = value.trim();
                if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(err(value_col, format!("bad hom name {name:?}")));
                }
                pending_hom = Some((name.to_string(), line_no));
            }
            "weight" => {
                let a = alphabet.as_ref().unwrap();
                let (name, _) = pending_hom
                    .take()
                    .ok_or_else(|| err(1, "`weight:` without a preceding `hom:`".into()))?;
                let wm = WeightMap::parse(a, value).map_err(|e| err(value_col, e.to_string()))?;
                homs.insert(name, wm);
            }
            other => return Err(err(1, format!("unknown key `{other}`"))),
        }
    }

    if let Some((name, line)) = pending_hom {
        return Err(ParseError { line, column: 1, message: format!("hom `{name}` has no weights") });
    }
    let alphabet = alphabet.ok_or(ParseError { line: 1, column: 1, message: "missing `gens:`".into() })?;
    let mut cyclic = Vec::with_capacity(relators.len());
    for (w, line, column) in relators {
        let c = alphabet.cyclic(&w);
        if c.is_empty() {
            return Err(ParseError { line, column, message: "trivial relator".into() });
        }
        if c.len() != w.len() {
            warnings.push(format!("relator {w} was not cyclically reduced; stored as {c}"));
        }
        cyclic.push(c);
    }
    Ok(PresentationFile {
        presentation: Presentation::from_parts(alphabet, cyclic),
        homs,
        warnings,
    })
}

/// `word` or `word^word`; returns the element and the column of the side.
fn parse_side(text: &str, col0: usize, a: &Alphabet) -> Result<(Word, usize), (usize, String)> {
    let lead = text.len() - text.trim_start().len();
    let col = col0 + lead;
    let body = text.trim();
    if body.is_empty() {
        return Err((col, "expected a word".into()));
    }
    let (base, conj) = match body.split_once('^') {
        Some((b, c)) => (b.trim(), Some(c.trim())),
        None => (body, None),
    };
    let word = |s: &str, c: usize| -> Result<Word, (usize, String)> {
        if s.is_empty() {
            return Err((c, "expected a word".into()));
        }
        let w = Word::parse(s).map_err(|e| (c, e.to_string()))?;
        a.check(&w).map_err(|e| (c, e.to_string()))?;
        Ok(w)
    };
    let b = word(base, col)?;
    match conj {
        None => Ok((b, col)),
        Some(c) => {
            let caret = col + body.find('^').unwrap() + 1;
            let y = word(c, caret)?;
            Ok((b.conjugate(&y), col))
        }
    }
}

fn gen(c: char) -> Generator {
    Generator::new(c).expect("static generator name")
}

/// `⟨a, b, t | aᵗ = b, bᵗ = a b a⁻¹⟩`.
pub fn make_prop1() -> Presentation {
    let (a, b, t) = (gen('a'), gen('b'), gen('t'));
    let alphabet = Alphabet::new([a, b, t]).unwrap();
    let tw = t.word();
    let r0 = a.word().conjugate(&tw).multiply(&b.word().inverse());
    let rhs = Word::parse("abA").unwrap();
    let r1 = b.word().conjugate(&tw).multiply(&rhs.inverse());
    Presentation::new(alphabet, &[r0, r1]).unwrap()
}

/// `G_s = ⟨a, b, t | aᵗ = b, bᵗ = W(b,a)·b·W(a,b)⁻¹⟩`, `s ≥ 3`.
pub fn make_gs(s: i64) -> Result<Presentation, WordError> {
    let (a, b, t) = (gen('a'), gen('b'), gen('t'));
    let alphabet = Alphabet::new([a, b, t]).unwrap();
    let tw = t.word();
    let w_ba = build_w(s, b, a)?;
    let w_ab = build_w(s, a, b)?;
    let rhs = w_ba.multiply(&b.word()).multiply(&w_ab.inverse());
    let r0 = a.word().conjugate(&tw).multiply(&b.word().inverse());
    let r1 = b.word().conjugate(&tw).multiply(&rhs.inverse());
    Ok(Presentation::new(alphabet, &[r0, r1]).unwrap())
}

/// The base endomorphism of `G_s`: `a ↦ b`, `b ↦ W(b,a)·b·W(a,b)⁻¹`.
pub fn gs_endo(s: i64) -> Result<FreeEndo, WordError> {
    let (a, b) = (gen('a'), gen('b'));
    let img = build_w(s, b, a)?.multiply(&b.word()).multiply(&build_w(s, a, b)?.inverse());
    FreeEndo::new(Alphabet::new([a, b])?, [(a, b.word()), (b, img)])
}

/// `a ↦ b`, `b ↦ a b a⁻¹`.
pub fn prop1_endo() -> FreeEndo {
    FreeEndo::parse("a=b;b=abA").unwrap()
}

/// `⟨x, y, z, t | xᵗ = y, yᵗ = z, zᵗ = y² x⁻¹⟩`.
pub fn make_prop2_target() -> Presentation {
    let (x, y, z, t) = (gen('x'), gen('y'), gen('z'), gen('t'));
    let alphabet = Alphabet::new([x, y, z, t]).unwrap();
    let tw = t.word();
    let rel = |lhs: Generator, rhs: &str| {
        lhs.word().conjugate(&tw).multiply(&Word::parse(rhs).unwrap().inverse())
    };
    Presentation::new(alphabet, &[rel(x, "y"), rel(y, "z"), rel(z, "yyX")]).unwrap()
}

/// θ: `x ↦ y, y ↦ z, z ↦ y² x⁻¹`.
pub fn theta() -> FreeEndo {
    FreeEndo::parse("x=y;y=z;z=yyX").unwrap()
}

/// θ⁻¹: `x ↦ z⁻¹ x², y ↦ x, z ↦ y`.
pub fn theta_inverse() -> FreeEndo {
    FreeEndo::parse("x=Zxx;y=x;z=y").unwrap()
}

/// The Tietze script taking [`make_prop1`] to [`make_prop2_target`].
pub const PROP2_SCRIPT: &str = include_str!("../../fixtures/prop2.tietze");

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn parse_prop1_sugar() {
        let f = parse("gens: a b t\neq: a^t = b\neq: b^t = abA\n").unwrap();
        let p = f.presentation;
        assert_eq!(p, make_prop1());
        assert!(p.contains_relator(&w("TatB")));
        assert!(p.contains_relator(&w("TbtaBA")));
        assert!(f.warnings.is_empty());
    }

    #[test]
    fn parse_power_relator() {
        let p = parse("gens: a\nrel: aaaa").unwrap().presentation;
        assert_eq!(p.relators().len(), 1);
        assert_eq!(p.relators()[0].to_word(), w("aaaa"));
    }

    #[test]
    fn parse_errors() {
        let e = parse("gens: a b t\neq: a^ = b\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("expected a word"), "{e}");
        assert_eq!(e.column, 7);

        let e = parse("gens: a b\nrel: aXb\n").unwrap_err();
        assert!(e.message.contains("`x`"), "{e}");

        assert!(parse("rel: ab\n").is_err());
        assert!(parse("gens: a a\n").is_err());
        assert!(parse("gens: a\nbogus: 1\n").is_err());
        assert!(parse("gens: a\nweight: a=1\n").is_err());
    }

    #[test]
    fn parse_unreduced_warns() {
        let f = parse("gens: a b\nrel: abBBAb\n").unwrap();
        assert_eq!(f.presentation.relators()[0].to_word(), w("aBAb"));
        assert_eq!(f.warnings.len(), 1);
    }

    #[test]
    fn parse_homs() {
        let f = parse("gens: a b t\nrel: TatB\nhom: psi\nweight: a=1 b=1 t=1\nhom: phi\nweight: a=0 b=0 t=1\n")
            .unwrap();
        assert_eq!(f.hom("psi").unwrap().exponent_sum(&w("at")).unwrap(), 2);
        assert_eq!(f.hom("phi").unwrap().exponent_sum(&w("at")).unwrap(), 1);
    }

    #[test]
    fn constructors() {
        let p1 = make_prop1();
        assert_eq!((p1.alphabet().len(), p1.relators().len()), (3, 2));
        let g3 = make_gs(3).unwrap();
        assert_eq!(g3.relators()[1].len(), 58);
        assert!(make_gs(2).is_err());
        let t = make_prop2_target();
        assert_eq!((t.alphabet().len(), t.relators().len()), (4, 3));
        assert!(t.contains_relator(&w("TztxYY")));
        assert!(t.contains_relator(&w("ztxYYT")));
    }

    #[test]
    fn euler_characteristic_zero() {
        assert_eq!(make_prop1().euler_characteristic(), 0);
        assert_eq!(make_gs(9).unwrap().euler_characteristic(), 0);
    }

    #[test]
    fn display_round_trip() {
        for p in [make_prop1(), make_gs(4).unwrap(), make_prop2_target()] {
            let back = parse(&p.to_string()).unwrap().presentation;
            assert_eq!(back, p);
            assert_eq!(back.to_string(), p.to_string());
        }
    }
}
