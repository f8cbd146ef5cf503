//! Certificate-checkable Tietze moves and replayable scripts.
//!
//! Script file format, one move per line, `#` comments:
//!
//! ```text
//! ADDGEN x aT                 # new generator x, relator x·(aT)⁻¹
//! RMGEN b 0                   # eliminate b using relator 0
//! MULT 1 0 conj=T sign=-1     # r1 ← r1 · c⁻¹ r0⁻¹ c
//! INVERT 1                    # r1 ← r1⁻¹
//! GENS x y z t                # reorder the alphabet
//! RELS 2 0 1                  # reorder relators (new k = old perm[k])
//! RMTRIV                      # drop trivial relators
//! ```

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::Presentation;
use crate::words::{Alphabet, CyclicWord, Generator, Word, WordError};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TietzeMove {
    AddGen { gen: Generator, word: Word },
    RemoveGen { gen: Generator, relator: usize },
    MultRelator { target: usize, source: usize, conj: Word, sign: i8 },
    InvertRelator(usize),
    PermuteGens(Vec<Generator>),
    PermuteRelators(Vec<usize>),
    RemoveTrivial,
}

impl fmt::Display for TietzeMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TietzeMove::AddGen { gen, word } => write!(f, "ADDGEN {gen} {word}"),
            TietzeMove::RemoveGen { gen, relator } => write!(f, "RMGEN {gen} {relator}"),
            TietzeMove::MultRelator { target, source, conj, sign } => {
                write!(f, "MULT {target} {source} conj={conj} sign={sign}")
            }
            TietzeMove::InvertRelator(i) => write!(f, "INVERT {i}"),
            TietzeMove::PermuteGens(g) => {
                let names: Vec<String> = g.iter().map(|g| g.to_string()).collect();
                write!(f, "GENS {}", names.join(" "))
            }
            TietzeMove::PermuteRelators(p) => {
                let idx: Vec<String> = p.iter().map(|i| i.to_string()).collect();
                write!(f, "RELS {}", idx.join(" "))
            }
            TietzeMove::RemoveTrivial => write!(f, "RMTRIV"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TietzeScript {
    pub moves: Vec<TietzeMove>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TietzeError {
    #[error("script line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("move {index} ({mv}): {reason}")]
    Invalid { index: usize, mv: String, reason: String },
}

impl TietzeError {
    /// Index of the failing move, for validation failures.
    pub fn move_index(&self) -> Option<usize> {
        match self {
            TietzeError::Invalid { index, .. } => Some(*index),
            TietzeError::Syntax { .. } => None,
        }
    }
}

impl TietzeScript {
    pub fn new(moves: Vec<TietzeMove>) -> Self {
        TietzeScript { moves }
    }

    pub fn parse(text: &str) -> Result<Self, TietzeError> {
        let mut moves = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| TietzeError::Syntax { line: idx + 1, message };
            let mut parts = line.split_whitespace();
            let op = parts.next().unwrap();
            let args: Vec<&str> = parts.collect();
            let gen = |s: &str| -> Result<Generator, TietzeError> {
                let mut c = s.chars();
                match (c.next(), c.next()) {
                    (Some(ch), None) => Generator::new(ch).map_err(|e| syntax(e.to_string())),
                    _ => Err(syntax(format!("expected a generator, got {s:?}"))),
                }
            };
            let index = |s: &str| -> Result<usize, TietzeError> {
                s.parse().map_err(|_| syntax(format!("expected a relator index, got {s:?}")))
            };
            let word = |s: &str| Word::parse(s).map_err(|e| syntax(e.to_string()));
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(syntax(format!("{op} takes {n} arguments, got {}", args.len())))
                }
            };
            let mv = match op {
                "ADDGEN" => {
                    arity(2)?;
                    TietzeMove::AddGen { gen: gen(args[0])?, word: word(args[1])? }
                }
                "RMGEN" => {
                    arity(2)?;
                    TietzeMove::RemoveGen { gen: gen(args[0])?, relator: index(args[1])? }
                }
                "MULT" => {
                    if args.len() < 2 || args.len() > 4 {
                        return Err(syntax("MULT takes i j [conj=W] [sign=±1]".into()));
                    }
                    let mut conj = Word::identity();
                    let mut sign = 1i8;
                    for opt in &args[2..] {
                        match opt.split_once('=') {
                            Some(("conj", w)) => conj = word(w)?,
                            Some(("sign", "1" | "+1")) => sign = 1,
                            Some(("sign", "-1")) => sign = -1,
                            _ => return Err(syntax(format!("bad MULT option {opt:?}"))),
                        }
                    }
                    TietzeMove::MultRelator {
                        target: index(args[0])?,
                        source: index(args[1])?,
                        conj,
                        sign,
                    }
                }
                "INVERT" => {
                    arity(1)?;
                    TietzeMove::InvertRelator(index(args[0])?)
                }
                "GENS" => TietzeMove::PermuteGens(args.iter().map(|s| gen(s)).collect::<Result<_, _>>()?),
                "RELS" => {
                    TietzeMove::PermuteRelators(args.iter().map(|s| index(s)).collect::<Result<_, _>>()?)
                }
                "RMTRIV" => {
                    arity(0)?;
                    TietzeMove::RemoveTrivial
                }
                other => return Err(syntax(format!("unknown move {other:?}"))),
            };
            moves.push(mv);
        }
        Ok(TietzeScript { moves })
    }
}

impl fmt::Display for TietzeScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.moves {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

fn recanonicalize(alphabet: &Alphabet, relators: impl IntoIterator<Item = Word>) -> Vec<CyclicWord> {
    relators.into_iter().map(|w| alphabet.cyclic(&w)).collect()
}

/// Applies a single move, validating it against `p`.
pub fn apply_move(p: &Presentation, mv: &TietzeMove) -> Result<Presentation, String> {
    let alphabet = p.alphabet();
    let rels = p.relator_words();
    let in_range = |i: usize| {
        if i < rels.len() {
            Ok(())
        } else {
            Err(format!("relator index {i} out of range (have {})", rels.len()))
        }
    };
    let werr = |e: WordError| e.to_string();

    match mv {
        TietzeMove::AddGen { gen, word } => {
            if alphabet.contains(*gen) {
                return Err(format!("generator `{gen}` is not fresh"));
            }
            alphabet.check(word).map_err(werr)?;
            let mut gens = alphabet.generators().to_vec();
            gens.push(*gen);
            let new_alpha = Alphabet::new(gens).map_err(werr)?;
            let mut words = rels;
            words.push(gen.word().multiply(&word.inverse()));
            Ok(Presentation::from_parts(new_alpha.clone(), recanonicalize(&new_alpha, words)))
        }
        TietzeMove::RemoveGen { gen, relator } => {
            if !alphabet.contains(*gen) {
                return Err(format!("generator `{gen}` is not in the alphabet"));
            }
            in_range(*relator)?;
            let r = &rels[*relator];
            if r.occurrences(*gen) != 1 {
                return Err(format!(
                    "relator {relator} = {r} must contain `{gen}` exactly once, found {}",
                    r.occurrences(*gen)
                ));
            }
            let pos = r.letters().iter().position(|l| l.gen == *gen).unwrap();
            let rot = r.rotate(pos);
            // rot = g·u (g = u⁻¹) or g⁻¹·u (g = u)
            let rest = Word::from_letters(rot.letters()[1..].iter().copied());
            let value = if rot.letters()[0].inverse { rest } else { rest.inverse() };
            let mut images: BTreeMap<Generator, Word> =
                alphabet.generators().iter().map(|&g| (g, g.word())).collect();
            images.insert(*gen, value);
            let gens: Vec<Generator> =
                alphabet.generators().iter().copied().filter(|g| g != gen).collect();
            let new_alpha = Alphabet::new(gens).map_err(werr)?;
            let words = rels
                .iter()
                .enumerate()
                .filter(|(i, _)| i != relator)
                .map(|(_, w)| w.substitute(&images))
                .collect::<Result<Vec<_>, _>>()
                .map_err(werr)?;
            Ok(Presentation::from_parts(new_alpha.clone(), recanonicalize(&new_alpha, words)))
        }
        TietzeMove::MultRelator { target, source, conj, sign } => {
            in_range(*target)?;
            in_range(*source)?;
            if target == source {
                return Err("a relator cannot be multiplied by a conjugate of itself".into());
            }
            if *sign != 1 && *sign != -1 {
                return Err(format!("sign must be ±1, got {sign}"));
            }
            alphabet.check(conj).map_err(werr)?;
            let factor = rels[*source].pow(*sign as i64).conjugate(conj);
            let mut words = rels;
            words[*target] = words[*target].multiply(&factor);
            Ok(Presentation::from_parts(alphabet.clone(), recanonicalize(alphabet, words)))
        }
        TietzeMove::InvertRelator(i) => {
            in_range(*i)?;
            let mut words = rels;
            words[*i] = words[*i].inverse();
            Ok(Presentation::from_parts(alphabet.clone(), recanonicalize(alphabet, words)))
        }
        TietzeMove::PermuteGens(order) => {
            let new_alpha = Alphabet::new(order.iter().copied()).map_err(werr)?;
            let same_set = new_alpha.len() == alphabet.len()
                && alphabet.generators().iter().all(|g| new_alpha.contains(*g));
            if !same_set {
                return Err(format!("`{new_alpha}` is not a permutation of `{alphabet}`"));
            }
            Ok(Presentation::from_parts(new_alpha.clone(), recanonicalize(&new_alpha, rels)))
        }
        TietzeMove::PermuteRelators(perm) => {
            let mut seen = vec![false; rels.len()];
            if perm.len() != rels.len() {
                return Err(format!("permutation has {} entries, need {}", perm.len(), rels.len()));
            }
            for &i in perm {
                in_range(i)?;
                if std::mem::replace(&mut seen[i], true) {
                    return Err(format!("index {i} repeated"));
                }
            }
            let relators = perm.iter().map(|&i| p.relators()[i].clone()).collect();
            Ok(Presentation::from_parts(alphabet.clone(), relators))
        }
        TietzeMove::RemoveTrivial => {
            let relators = p.relators().iter().filter(|r| !r.is_empty()).cloned().collect();
            Ok(Presentation::from_parts(alphabet.clone(), relators))
        }
    }
}

/// Replays `script` on `p`, returning every state (the input first).
pub fn replay_tietze(p: &Presentation, script: &TietzeScript) -> Result<Vec<Presentation>, TietzeError> {
    let mut states = vec![p.clone()];
    for (index, mv) in script.moves.iter().enumerate() {
        let next = apply_move(states.last().unwrap(), mv).map_err(|reason| TietzeError::Invalid {
            index,
            mv: mv.to_string(),
            reason,
        })?;
        states.push(next);
    }
    Ok(states)
}

pub fn apply_tietze(p: &Presentation, script: &TietzeScript) -> Result<Presentation, TietzeError> {
    Ok(replay_tietze(p, script)?.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{make_prop1, make_prop2_target, parse, PROP2_SCRIPT};

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn g(c: char) -> Generator {
        Generator::new(c).unwrap()
    }

    #[test]
    fn eliminate_b() {
        let p = make_prop1();
        // relator 0 is the one defining b
        let idx = p.relator_words().iter().position(|r| r.len() == 4).unwrap();
        let script = TietzeScript::new(vec![TietzeMove::RemoveGen { gen: g('b'), relator: idx }]);
        let q = apply_tietze(&p, &script).unwrap();
        assert_eq!(q.alphabet().to_string(), "a t");
        assert_eq!(q.relators().len(), 1);
        assert!(q.contains_relator(&w("TTattaTAtA")));
        assert_eq!(q.relators()[0].len(), 10);
    }

    #[test]
    fn substitute_a_equals_xt() {
        let p = parse("gens: a t\nrel: TTattaTAtA\n").unwrap().presentation;
        let script = TietzeScript::parse("ADDGEN x aT\nRMGEN a 1\n").unwrap();
        let q = apply_tietze(&p, &script).unwrap();
        assert_eq!(q.alphabet().to_string(), "t x");
        assert!(q.contains_relator(&w("TTxtttxTXX")));
    }

    #[test]
    fn prop2_fixture_reaches_target() {
        let script = TietzeScript::parse(PROP2_SCRIPT).unwrap();
        let states = replay_tietze(&make_prop1(), &script).unwrap();
        assert_eq!(states.last().unwrap(), &make_prop2_target());
        assert!(states.iter().any(|s| s.relators().len() == 1 && s.contains_relator(&w("TTattaTAtA"))));
        assert!(states.iter().any(|s| s.contains_relator(&w("TTxtttxTXX"))));
        assert!(states.iter().any(|s| s.contains_relator(&w("ztxYYT"))));
    }

    #[test]
    fn validation_failures_name_the_move() {
        let p = make_prop1();
        let bad = TietzeScript::parse("ADDGEN a b\n").unwrap();
        assert_eq!(apply_tietze(&p, &bad).unwrap_err().move_index(), Some(0));
        let bad = TietzeScript::parse("INVERT 0\nRMGEN t 0\n").unwrap();
        assert_eq!(apply_tietze(&p, &bad).unwrap_err().move_index(), Some(1));
        let bad = TietzeScript::parse("MULT 0 0\n").unwrap();
        assert_eq!(apply_tietze(&p, &bad).unwrap_err().move_index(), Some(0));
        let bad = TietzeScript::parse("RELS 0 0\n").unwrap();
        assert!(apply_tietze(&p, &bad).is_err());
        let bad = TietzeScript::parse("GENS a b\n").unwrap();
        assert!(apply_tietze(&p, &bad).is_err());
    }

    #[test]
    fn syntax_errors() {
        assert!(TietzeScript::parse("FOO 1").is_err());
        assert!(TietzeScript::parse("RMGEN bb 0").is_err());
        assert!(TietzeScript::parse("MULT 1 0 conj=T sign=2").is_err());
        let s = TietzeScript::parse("MULT 1 0 conj=T sign=-1").unwrap();
        assert_eq!(s.to_string().trim(), "MULT 1 0 conj=T sign=-1");
    }

    #[test]
    fn mult_to_trivial_then_drop() {
        let p = parse("gens: a b\nrel: ab\nrel: ab\n").unwrap().presentation;
        let s = TietzeScript::parse("MULT 1 0 sign=-1\nRMTRIV\n").unwrap();
        let states = replay_tietze(&p, &s).unwrap();
        assert!(states[1].relators()[1].is_empty());
        assert_eq!(states[2].relators().len(), 1);
    }
}
