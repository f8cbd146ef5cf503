use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::words::{Alphabet, Generator, Word, WordError};

/// Endomorphism of the free group on `alphabet`, given by generator images.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreeEndo {
    alphabet: Alphabet,
    images: BTreeMap<Generator, Word>,
}

impl FreeEndo {
    pub fn new<I>(alphabet: Alphabet, images: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = (Generator, Word)>,
    {
        let mut map = BTreeMap::new();
        for (g, w) in images {
            if !alphabet.contains(g) {
                return Err(WordError::UnknownGenerator(g));
            }
            alphabet.check(&w)?;
            if map.insert(g, w).is_some() {
                return Err(WordError::DuplicateGenerator(g));
            }
        }
        if let Some(&g) = alphabet.generators().iter().find(|g| !map.contains_key(g)) {
            return Err(WordError::MissingImage(g));
        }
        Ok(FreeEndo { alphabet, images: map })
    }

    /// `"a=b;b=abA"`; the alphabet is the left-hand sides in order.
    pub fn parse(text: &str) -> Result<Self, WordError> {
        let mut gens = Vec::new();
        let mut images = Vec::new();
        for item in text.split([';', ',']) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (lhs, rhs) = item
                .split_once('=')
                .ok_or_else(|| WordError::BadImage(item.to_string()))?;
            let mut chars = lhs.trim().chars();
            let g = match (chars.next(), chars.next()) {
                (Some(c), None) => Generator::new(c)?,
                _ => return Err(WordError::BadImage(item.to_string())),
            };
            gens.push(g);
            images.push((g, Word::parse(rhs)?));
        }
        FreeEndo::new(Alphabet::new(gens)?, images)
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        let images = alphabet.generators().iter().map(|&g| (g, g.word())).collect();
        FreeEndo { alphabet: alphabet.clone(), images }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn image(&self, g: Generator) -> Option<&Word> {
        self.images.get(&g)
    }

    /// Images in alphabet order.
    pub fn images(&self) -> Vec<Word> {
        self.alphabet.generators().iter().map(|g| self.images[g].clone()).collect()
    }

    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        w.substitute(&self.images)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FreeEndo) -> Result<FreeEndo, WordError> {
        let images = other
            .images
            .iter()
            .map(|(&g, w)| Ok((g, self.apply(w)?)))
            .collect::<Result<Vec<_>, WordError>>()?;
        FreeEndo::new(other.alphabet.clone(), images)
    }

    pub fn power(&self, n: u32) -> FreeEndo {
        let mut out = FreeEndo::identity(&self.alphabet);
        for _ in 0..n {
            out = self.compose(&out).expect("same alphabet");
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().all(|(g, w)| *w == g.word())
    }
}

impl fmt::Display for FreeEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .alphabet
            .generators()
            .iter()
            .map(|g| format!("{g}={}", self.images[g]))
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutoError {
    #[error("forward and backward maps act on different alphabets")]
    AlphabetMismatch,
    #[error("{order} sends `{generator}` to {image}, residue {residue}")]
    NotInverse {
        order: &'static str,
        generator: Generator,
        image: Word,
        residue: Word,
    },
    #[error(transparent)]
    Word(#[from] WordError),
}

/// An endomorphism paired with a checked two-sided inverse.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreeAuto {
    forward: FreeEndo,
    backward: FreeEndo,
}

impl FreeAuto {
    /// Succeeds iff both composites fix every generator.
    pub fn verify(forward: FreeEndo, backward: FreeEndo) -> Result<FreeAuto, AutoError> {
        if forward.alphabet != backward.alphabet {
            return Err(AutoError::AlphabetMismatch);
        }
        for (order, outer, inner) in [
            ("forward∘backward", &forward, &backward),
            ("backward∘forward", &backward, &forward),
        ] {
            for &g in forward.alphabet.generators() {
                let image = outer.apply(&inner.images[&g])?;
                if image != g.word() {
                    let residue = image.multiply(&g.word().inverse());
                    return Err(AutoError::NotInverse { order, generator: g, image, residue });
                }
            }
        }
        Ok(FreeAuto { forward, backward })
    }

    pub fn forward(&self) -> &FreeEndo {
        &self.forward
    }

    pub fn backward(&self) -> &FreeEndo {
        &self.backward
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.forward.alphabet
    }

    /// `θᵏ(w)`, negative `k` using the inverse.
    pub fn apply_power(&self, w: &Word, k: i64) -> Result<Word, WordError> {
        let map = if k >= 0 { &self.forward } else { &self.backward };
        let mut out = w.clone();
        for _ in 0..k.unsigned_abs() {
            out = map.apply(&out)?;
        }
        Ok(out)
    }
}

/// Element `tᵏ·w` of `F ⋊_θ ⟨t⟩`, where `t⁻¹ w t = θ(w)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SemidirectElement {
    pub k: i64,
    pub w: Word,
}

impl SemidirectElement {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0 && self.w.is_empty()
    }

    /// `(tᵃ u)(tᵇ v) = tᵃ⁺ᵇ θᵇ(u) v`.
    pub fn multiply(&self, other: &Self, auto: &FreeAuto) -> Result<Self, WordError> {
        let shifted = auto.apply_power(&self.w, other.k)?;
        Ok(SemidirectElement { k: self.k + other.k, w: shifted.multiply(&other.w) })
    }

    /// Evaluates a word over the fiber alphabet plus `stable`.
    pub fn eval(expr: &Word, stable: Generator, auto: &FreeAuto) -> Result<Self, WordError> {
        let mut acc = SemidirectElement::identity();
        for l in expr.letters() {
            let factor = if l.gen == stable {
                SemidirectElement { k: l.sign(), w: Word::identity() }
            } else if auto.alphabet().contains(l.gen) {
                SemidirectElement { k: 0, w: Word::from_letters([*l]) }
            } else {
                return Err(WordError::UnknownGenerator(l.gen));
            };
            acc = acc.multiply(&factor, auto)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for SemidirectElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(t^{}, {})", self.k, self.w)
    }
}
