use thiserror::Error;

use super::tietze::{apply_move, TietzeMove};
use super::{FreeEndo, Presentation};
use crate::words::{Alphabet, Generator, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HnnError {
    #[error("stable letter `{0}` is not a generator")]
    UnknownStable(Generator),
    #[error("relator {index} ({relator}) is not of the form t⁻¹·x·t·w⁻¹: {reason}")]
    Shape { index: usize, relator: Word, reason: String },
    #[error("base generator `{0}` is defined by more than one relator")]
    Repeated(Generator),
    #[error("base generator `{0}` has no defining relator")]
    Undefined(Generator),
    #[error("no relator defines a base generator as a conjugate of another")]
    NothingToEliminate,
    #[error("elimination left {0} relators")]
    NotOneRelator(usize),
    #[error("{0}")]
    Tietze(String),
}

/// `⟨base, t | t⁻¹ x t = endo(x)⟩`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HnnStructure {
    pub base: Alphabet,
    pub stable: Generator,
    pub endo: FreeEndo,
    /// For each base generator (alphabet order), the index of its relator.
    pub defining_relators: Vec<usize>,
}

impl HnnStructure {
    /// Rebuilds the relators `t⁻¹·x·t·endo(x)⁻¹`.
    pub fn relators(&self) -> Vec<Word> {
        let t = self.stable.word();
        self.base
            .generators()
            .iter()
            .map(|&x| x.word().conjugate(&t).multiply(&self.endo.image(x).unwrap().inverse()))
            .collect()
    }
}

pub fn recognize_ascending_hnn(p: &Presentation, stable: Generator) -> Result<HnnStructure, HnnError> {
    let alphabet = p.alphabet();
    if !alphabet.contains(stable) {
        return Err(HnnError::UnknownStable(stable));
    }
    let base = Alphabet::new(alphabet.generators().iter().copied().filter(|&g| g != stable))
        .expect("subset of an alphabet");
    let mut defs: Vec<Option<(Word, usize)>> = vec![None; base.len()];

    for (index, rel) in p.relators().iter().enumerate() {
        let r = rel.to_word();
        let shape = |reason: &str| HnnError::Shape { index, relator: r.clone(), reason: reason.into() };
        let t_letters: Vec<usize> =
            r.letters().iter().enumerate().filter(|(_, l)| l.gen == stable).map(|(i, _)| i).collect();
        if t_letters.len() != 2 {
            return Err(shape("stable letter must occur exactly twice"));
        }
        let open = t_letters
            .iter()
            .copied()
            .find(|&i| r.letters()[i].inverse)
            .ok_or_else(|| shape("stable letter occurs with the same sign twice"))?;
        if t_letters.iter().all(|&i| r.letters()[i].inverse) {
            return Err(shape("stable letter occurs with the same sign twice"));
        }
        // rot = t⁻¹ · u · t · v
        let rot = r.rotate(open);
        let close = rot.letters().iter().rposition(|l| l.gen == stable).unwrap();
        let u = Word::from_letters(rot.letters()[1..close].iter().copied());
        let v = Word::from_letters(rot.letters()[close + 1..].iter().copied());
        if u.len() != 1 {
            return Err(shape("conjugated part must be a single base generator"));
        }
        let x = u.letters()[0];
        // t⁻¹ x t v: endo(x) = v⁻¹; t⁻¹ x⁻¹ t v: inverting gives t⁻¹ x t v⁻¹, endo(x) = v
        let image = if x.inverse { v } else { v.inverse() };
        let slot = base.rank_of(x.gen).unwrap();
        if defs[slot].is_some() {
            return Err(HnnError::Repeated(x.gen));
        }
        defs[slot] = Some((image, index));
    }

    let mut images = Vec::with_capacity(base.len());
    let mut defining = Vec::with_capacity(base.len());
    for (&g, d) in base.generators().iter().zip(defs) {
        let (w, idx) = d.ok_or(HnnError::Undefined(g))?;
        images.push((g, w));
        defining.push(idx);
    }
    let endo = FreeEndo::new(base.clone(), images).expect("images are base words");
    Ok(HnnStructure { base, stable, endo, defining_relators: defining })
}

/// Eliminates a base generator `y` defined by `y = t⁻¹ x t`, leaving one relator.
pub fn one_relator_form(p: &Presentation, stable: Generator) -> Result<Presentation, HnnError> {
    let hnn = recognize_ascending_hnn(p, stable)?;
    let (slot, target) = hnn
        .base
        .generators()
        .iter()
        .enumerate()
        .find_map(|(i, &x)| {
            let img = hnn.endo.image(x)?;
            match img.letters() {
                [l] if !l.inverse && l.gen != x => Some((i, l.gen)),
                _ => None,
            }
        })
        .ok_or(HnnError::NothingToEliminate)?;
    let mv = TietzeMove::RemoveGen { gen: target, relator: hnn.defining_relators[slot] };
    let q = apply_move(p, &mv).map_err(HnnError::Tietze)?;
    if q.relators().len() != 1 {
        return Err(HnnError::NotOneRelator(q.relators().len()));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{gs_endo, make_gs, make_prop1, parse, prop1_endo};
    use crate::words::w_length;

    fn t() -> Generator {
        Generator::new('t').unwrap()
    }

    #[test]
    fn prop1_is_ascending_hnn() {
        let h = recognize_ascending_hnn(&make_prop1(), t()).unwrap();
        assert_eq!(h.endo, prop1_endo());
        assert_eq!(h.base.to_string(), "a b");
    }

    #[test]
    fn gs_is_ascending_hnn() {
        let h = recognize_ascending_hnn(&make_gs(9).unwrap(), t()).unwrap();
        assert_eq!(h.endo, gs_endo(9).unwrap());
    }

    #[test]
    fn square_conjugate_rejected() {
        let p = parse("gens: a t\nrel: TaatA\n").unwrap().presentation;
        assert!(matches!(recognize_ascending_hnn(&p, t()), Err(HnnError::Shape { .. })));
    }

    #[test]
    fn descending_form_accepted_as_inverse() {
        // relators given as inverses of the usual form
        let p = parse("gens: a b t\neq: a^t = b\neq: b^t = abA\n").unwrap().presentation;
        let inverted = Presentation::new(
            p.alphabet().clone(),
            &p.relator_words().iter().map(Word::inverse).collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(recognize_ascending_hnn(&inverted, t()).unwrap().endo, prop1_endo());
    }

    #[test]
    fn one_relator_lengths() {
        let q = one_relator_form(&make_prop1(), t()).unwrap();
        assert_eq!(q.relators()[0].len(), 10);
        for s in 3..=12 {
            let q = one_relator_form(&make_gs(s).unwrap(), t()).unwrap();
            assert_eq!(q.relators()[0].len() as i64, 8 + (14 + s) * (s + 1), "s = {s}");
            assert_eq!(build_check(s), w_length(s));
        }
        assert_eq!(one_relator_form(&make_gs(9).unwrap(), t()).unwrap().relators()[0].len(), 238);
    }

    fn build_check(s: i64) -> i64 {
        let a = Generator::new('a').unwrap();
        let b = Generator::new('b').unwrap();
        crate::words::build_w(s, a, b).unwrap().len() as i64
    }

    #[test]
    fn nothing_to_eliminate() {
        let p = parse("gens: a b t\neq: a^t = ab\neq: b^t = b\n").unwrap().presentation;
        assert_eq!(one_relator_form(&p, t()), Err(HnnError::NothingToEliminate));
    }
}
