mod common;

use common::*;
use fbcyclic::morse::{corner_kind, heights, CornerKind};
use fbcyclic::presentations::{
    abelianization, apply_tietze, direct_limit, smith_normal_form, theta, theta_inverse, FreeAuto, IntegerMatrix,
    Presentation, SemidirectElement, TietzeMove, TietzeScript,
};
use fbcyclic::smallcancel::{check_metric, max_piece, max_piece_brute_force, symmetrize};
use fbcyclic::stallings::SubgroupGraph;
use fbcyclic::words::reduce;
use fbcyclic::{Alphabet, Letter, WeightMap, Word};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn abt() -> Alphabet {
    Alphabet::parse("a b t").unwrap()
}

fn letters_over(alpha: &'static str, max: usize) -> impl Strategy<Value = Vec<Letter>> {
    let gens: Vec<char> = alpha.chars().filter(|c| !c.is_whitespace()).collect();
    prop::collection::vec((0..gens.len(), any::<bool>()), 0..=max).prop_map(move |v| {
        v.into_iter()
            .map(|(i, inv)| {
                let g = gen(gens[i]);
                if inv { g.inv() } else { g.pos() }
            })
            .collect()
    })
}

fn word_over(alpha: &'static str, max: usize) -> impl Strategy<Value = Word> {
    letters_over(alpha, max).prop_map(Word::from_letters)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn reduction_matches_naive(raw in letters_over("a b t", 40)) {
        let fast = reduce(raw.iter().copied());
        prop_assert_eq!(fast.letters(), &naive_reduce(&raw)[..]);
    }

    #[test]
    fn reduction_is_confluent(raw in letters_over("a b", 40), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(random_order_reduce(&raw, &mut rng), naive_reduce(&raw));
    }

    #[test]
    fn group_laws(u in word_over("a b t", 20), v in word_over("a b t", 20), w in word_over("a b t", 20)) {
        prop_assert!(u.multiply(&u.inverse()).is_empty());
        prop_assert_eq!(u.multiply(&v).multiply(&w), u.multiply(&v.multiply(&w)));
        prop_assert_eq!(u.multiply(&v).inverse(), v.inverse().multiply(&u.inverse()));
    }

    #[test]
    fn exponent_sum_is_a_homomorphism(u in word_over("a b t", 30), v in word_over("a b t", 30),
                                      wa in -3i64..=3, wb in -3i64..=3, wt in -3i64..=3) {
        let a = abt();
        let phi = WeightMap::new(&a, [(gen('a'), wa), (gen('b'), wb), (gen('t'), wt)]).unwrap();
        let uv = phi.exponent_sum(&u.multiply(&v)).unwrap();
        prop_assert_eq!(uv, phi.exponent_sum(&u).unwrap() + phi.exponent_sum(&v).unwrap());
        prop_assert_eq!(phi.exponent_sum(&u.inverse()).unwrap(), -phi.exponent_sum(&u).unwrap());
    }

    #[test]
    fn cyclic_reduction_conjugates_back(u in word_over("a b t", 30)) {
        let a = abt();
        let (core, c) = a.cyclic_reduce(&u);
        prop_assert!(core.to_word().is_cyclically_reduced());
        prop_assert_eq!(core.to_word().conjugate(&c), u);
    }

    #[test]
    fn canonical_rotation_decides_conjugacy(u in word_over("a b", 12), v in word_over("a b", 12), c in word_over("a b t", 6)) {
        let a = abt();
        prop_assert_eq!(a.cyclic(&u.conjugate(&c)), a.cyclic(&u));
        prop_assert_eq!(a.cyclic(&u) == a.cyclic(&v), cyclically_equal(&u, &v));
    }

    #[test]
    fn folding_is_confluent(gens in prop::collection::vec(word_over("a b", 8), 1..4), seed in any::<u64>()) {
        let a = Alphabet::parse("a b").unwrap();
        let reference = SubgroupGraph::from_generators(&gens, &a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = SubgroupGraph::wedge(&gens, &a).unwrap();
        g.fold_with(|n| rng.gen_range(0..n));
        prop_assert_eq!(&g, &reference);
        prop_assert!(reference.rank().unwrap() <= gens.len());
    }

    #[test]
    fn subgroup_contains_products_of_generators(gens in prop::collection::vec(word_over("a b", 6), 1..4),
                                                 picks in prop::collection::vec((0usize..4, any::<bool>()), 0..8)) {
        let a = Alphabet::parse("a b").unwrap();
        let g = SubgroupGraph::from_generators(&gens, &a).unwrap();
        let mut w = Word::identity();
        for (i, inv) in picks {
            let h = &gens[i % gens.len()];
            w = w.multiply(&if inv { h.inverse() } else { h.clone() });
        }
        prop_assert!(g.contains(&w).unwrap());
    }

    #[test]
    fn piece_search_matches_oracles(rels in prop::collection::vec(word_over("a b", 14), 1..3)) {
        let a = Alphabet::parse("a b").unwrap();
        let cyc: Vec<_> = rels.iter().map(|r| a.cyclic(r)).filter(|c| !c.is_empty()).collect();
        prop_assume!(!cyc.is_empty());
        let sym = symmetrize(&a, &cyc).unwrap();
        let fast = max_piece(&sym);
        prop_assert_eq!(&fast, &max_piece_brute_force(&sym));
        let words: Vec<Word> = cyc.iter().map(|c| c.to_word()).collect();
        prop_assert_eq!(fast.max_piece_length, piece_oracle(&a, &words));
        if let Some(w) = &fast.witness {
            let e = sym.elements();
            let read = |o: fbcyclic::smallcancel::Occurrence| {
                let u = e[o.element].letters();
                (0..w.piece.len()).map(|k| u[(o.offset + k) % u.len()]).collect::<Vec<_>>()
            };
            prop_assert!(w.first != w.second);
            prop_assert_eq!(read(w.first), w.piece.letters().to_vec());
            prop_assert_eq!(read(w.second), w.piece.letters().to_vec());
        }
    }

    #[test]
    fn symmetrize_is_idempotent(rels in prop::collection::vec(word_over("a b", 10), 1..3)) {
        let a = Alphabet::parse("a b").unwrap();
        let cyc: Vec<_> = rels.iter().map(|r| a.cyclic(r)).filter(|c| !c.is_empty()).collect();
        prop_assume!(!cyc.is_empty());
        let sym = symmetrize(&a, &cyc).unwrap();
        let again: Vec<_> = sym.elements().iter().map(|w| a.cyclic(w)).collect();
        let resym = symmetrize(&a, &again).unwrap();
        prop_assert_eq!(resym.elements(), sym.elements());
        for w in sym.elements() {
            prop_assert!(sym.contains(&w.inverse()));
            prop_assert!(w.is_cyclically_reduced());
        }
    }

    #[test]
    fn metric_condition_is_monotone(rel in word_over("a b", 16), p1 in 1i64..10, p2 in 1i64..10) {
        let a = Alphabet::parse("a b").unwrap();
        let c = a.cyclic(&rel);
        prop_assume!(!c.is_empty());
        let (l1, l2) = (Ratio::new(p1.min(p2), 10), Ratio::new(p1.max(p2), 10));
        let small = check_metric(&a, std::slice::from_ref(&c), l1, false).unwrap();
        let large = check_metric(&a, &[c], l2, false).unwrap();
        prop_assert!(!small.holds || large.holds);
    }

    #[test]
    fn smith_form_reconstructs(rows in 1usize..=5, cols in 1usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(rows, cols, &mut rng);
        let snf = smith_normal_form(&a);
        prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.diagonal.clone());
        prop_assert_eq!(snf.u.determinant().abs(), 1);
        prop_assert_eq!(snf.v.determinant().abs(), 1);
        let f = snf.invariant_factors();
        for w in f.windows(2) {
            prop_assert_eq!(w[1] % w[0], 0);
        }
        let mut prod = 1;
        for (k, d) in f.iter().enumerate() {
            prod *= d;
            prop_assert_eq!(prod.abs(), determinantal_divisor(&a.to_rows(), k + 1));
        }
    }

    #[test]
    fn direct_limit_is_conjugation_invariant(entries in prop::collection::vec(-3i64..=3, 4),
                                             ops in prop::collection::vec((0usize..2, -2i64..=2), 1..5)) {
        let m = IntegerMatrix::from_rows(&[entries[..2].to_vec(), entries[2..].to_vec()]);
        // P a product of elementary matrices, P⁻¹ the reversed product of inverses
        let mut p = IntegerMatrix::identity(2);
        let mut p_inv = IntegerMatrix::identity(2);
        for (which, k) in ops {
            let (i, j) = if which == 0 { (0, 1) } else { (1, 0) };
            let mut e = IntegerMatrix::identity(2);
            e.set(i, j, k);
            let mut e_inv = IntegerMatrix::identity(2);
            e_inv.set(i, j, -k);
            p = p.mul(&e);
            p_inv = e_inv.mul(&p_inv);
        }
        prop_assert_eq!(p.mul(&p_inv), IntegerMatrix::identity(2));
        let d1 = direct_limit(&m).unwrap();
        let d2 = direct_limit(&p.mul(&m).mul(&p_inv)).unwrap();
        prop_assert_eq!((d1.stable_rank, d1.dilation), (d2.stable_rank, d2.dilation));
    }

    #[test]
    fn semidirect_evaluation_is_a_homomorphism(u in word_over("x y z t", 12), v in word_over("x y z t", 12)) {
        let auto = FreeAuto::verify(theta(), theta_inverse()).unwrap();
        let t = gen('t');
        let eu = SemidirectElement::eval(&u, t, &auto).unwrap();
        let ev = SemidirectElement::eval(&v, t, &auto).unwrap();
        let euv = SemidirectElement::eval(&u.multiply(&v), t, &auto).unwrap();
        prop_assert_eq!(euv, eu.multiply(&ev, &auto).unwrap());
    }

    #[test]
    fn tietze_moves_preserve_abelianization(w in word_over("a b t", 10)) {
        let p = fbcyclic::presentations::make_prop1();
        let script = TietzeScript::new(vec![
            TietzeMove::AddGen { gen: gen('x'), word: w },
            TietzeMove::MultRelator { target: 0, source: 1, conj: Word::parse("t").unwrap(), sign: 1 },
        ]);
        let q = apply_tietze(&p, &script).unwrap();
        prop_assert_eq!(abelianization(&q), abelianization(&p));
        let back = apply_tietze(&q, &TietzeScript::new(vec![TietzeMove::RemoveGen { gen: gen('x'), relator: 2 }])).unwrap();
        prop_assert_eq!(abelianization(&back), abelianization(&p));
    }
}

#[test]
fn heights_are_rotation_invariant() {
    let a = abt();
    let psi = WeightMap::uniform(&a, 1);
    for p in [fbcyclic::presentations::make_prop1(), fbcyclic::presentations::make_gs(4).unwrap()] {
        for r in p.relators() {
            let base = heights(r, &psi).unwrap();
            let area = fbcyclic::morse::cell_area(&base).unwrap();
            let w = r.to_word();
            for k in 0..w.len() {
                let rot = w.rotate(k);
                // heights of the rotation, computed directly
                let mut h = 0;
                let mut hs = Vec::new();
                for l in rot.letters() {
                    hs.push(h);
                    h += l.sign();
                }
                let shift = hs[0] - base.heights[k];
                for (i, h) in hs.iter().enumerate() {
                    assert_eq!(h - base.heights[(i + k) % w.len()], shift);
                }
                assert_eq!(hs.iter().max().unwrap() - hs.iter().min().unwrap(), base.max - base.min);
                assert_eq!(area, fbcyclic::morse::cell_area(&base).unwrap());
            }
            let kinds: Vec<CornerKind> =
                (0..w.len()).map(|i| corner_kind(w.letters()[i], w.letters()[(i + 1) % w.len()])).collect();
            let count = |k: CornerKind| kinds.iter().filter(|&&x| x == k).count();
            assert_eq!(count(CornerKind::Ascending) + count(CornerKind::Descending) + count(CornerKind::Mixed), w.len());
            assert_eq!(w.letters().iter().map(|l| l.sign()).sum::<i64>(), 0);
        }
    }
}

#[test]
fn euler_characteristic_of_stock_presentations() {
    for p in [fbcyclic::presentations::make_prop1(), fbcyclic::presentations::make_gs(9).unwrap()] {
        assert_eq!(p.euler_characteristic(), 0);
    }
    let target: Presentation = fbcyclic::presentations::make_prop2_target();
    assert_eq!(target.euler_characteristic(), 0);
}
