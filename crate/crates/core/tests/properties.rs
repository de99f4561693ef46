use braidkernel::atlas::{
    b_generator, forget_strands_hom, pure_braid_rp2, quaternion_presentation, rho_generator, tau_component, tau_n,
    tau_n_with, SurfaceKind, TauForm,
};
use braidkernel::coset::todd_coxeter;
use braidkernel::covering::{can_cover, euler_char, kernel_description, quotient_candidates, torus_action_forms};
use braidkernel::presentation::{hom_check, Decision, GroupHom, HomCheck, Presentation, WordOracle};
use braidkernel::rewrite::{knuth_bendix, search_equality};
use braidkernel::word::{parse_word, Word};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn order(p: &Presentation) -> usize {
    todd_coxeter(p, &[], 100_000).unwrap().group_order().unwrap()
}

fn shuffled(p: &Presentation, seed: u64) -> Presentation {
    let mut rels = p.relators().to_vec();
    rels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Presentation::new(p.name(), p.alphabet().clone(), rels).unwrap()
}

#[test]
fn relator_order_does_not_change_results() {
    let groups = [pure_braid_rp2(2).unwrap(), quaternion_presentation()];
    for p in &groups {
        let n = order(p);
        for seed in 0..5 {
            let q = shuffled(p, seed);
            assert_eq!(order(&q), n);
            let rs = knuth_bendix(&q, 500, 30);
            assert!(rs.is_confluent());
            assert_eq!(rs.count_normal_forms(1000), Some(n));
        }
    }
}

#[test]
fn oracles_agree_on_p2() {
    let p = pure_braid_rp2(2).unwrap();
    let table = todd_coxeter(&p, &[], 1000).unwrap();
    let rs = knuth_bendix(&p, 500, 30);
    let reps = table.coset_representatives().unwrap();
    for u in &reps {
        for v in &reps {
            assert_eq!(table.equal(u, v), rs.equal(u, v), "{} vs {}", p.format(u), p.format(v));
        }
    }
}

#[test]
fn lagrange_for_the_rp2_kernel() {
    let p = pure_braid_rp2(2).unwrap();
    let table = todd_coxeter(&p, &[], 1000).unwrap();
    let center = table.center_order_finite(100).unwrap();
    let k = kernel_description(SurfaceKind::PROJECTIVE_PLANE, 2, true, None).unwrap();
    let kernel_order = order(k.presentation.as_ref().unwrap());
    assert_eq!(kernel_order * center, table.group_order().unwrap());
    assert_eq!((kernel_order, center), (4, 2));
}

#[test]
fn tau_forms_agree() {
    let p2 = pure_braid_rp2(2).unwrap();
    let t2 = todd_coxeter(&p2, &[], 1000).unwrap();
    assert_eq!(t2.word_equal_finite(&tau_n_with(2, TauForm::Rho).unwrap(), &tau_n(2).unwrap()), Ok(true));

    let p3 = pure_braid_rp2(3).unwrap();
    let extra: Vec<Word> = (1..=3).map(|k| rho_generator(3, k).unwrap().pow(4)).collect();
    let t3 = todd_coxeter(&p3.quotient(&extra).unwrap(), &[], 100_000).unwrap();
    assert!(t3.is_complete());
    for i in 1..=3 {
        let b = tau_component(3, i, TauForm::B).unwrap();
        let r = tau_component(3, i, TauForm::Rho).unwrap();
        assert_eq!(t3.word_equal_finite(&b, &r), Ok(true), "component {i}");
    }
    assert_eq!(t3.is_central_finite(&tau_n(3).unwrap()), Ok(true));
}

#[test]
fn forgetting_maps_compose() {
    let h32 = forget_strands_hom(3, 2).unwrap();
    let h21 = forget_strands_hom(2, 1).unwrap();
    let h31 = forget_strands_hom(3, 1).unwrap();
    let composed = h32.then(&h21).unwrap();
    let target = todd_coxeter(h31.target(), &[], 100).unwrap();
    for g in 0..h31.source().generator_count() {
        let w = Word::generator(g);
        let a = composed.map_word(&w).unwrap();
        let b = h31.map_word(&w).unwrap();
        assert_eq!(target.word_equal_finite(&a, &b), Ok(true));
    }
    assert!(matches!(hom_check(&h31, &target), HomCheck::Verified(_)));
}

#[test]
fn hom_check_rejects_a_non_homomorphism() {
    let p2 = pure_braid_rp2(2).unwrap();
    let q8 = quaternion_presentation();
    let table = todd_coxeter(&q8, &[], 100).unwrap();
    // sending B12 to 1 would force rho1^2 = 1, false in Q8
    let images = vec![Word::identity(), Word::generator(0), Word::generator(1)];
    let h = GroupHom::new(p2.clone(), q8.clone(), images).unwrap();
    assert!(matches!(hom_check(&h, &table), HomCheck::Failed { .. }));
    // identity on P2 viewed through Q8 names
    let images = vec![Word::generator(0).pow(2), Word::generator(0), Word::generator(1)];
    let h = GroupHom::new(p2, q8, images).unwrap();
    assert!(matches!(hom_check(&h, &table), HomCheck::Verified(_)));
}

#[test]
fn search_certificates_match_table() {
    let p = pure_braid_rp2(2).unwrap();
    let table = todd_coxeter(&p, &[], 1000).unwrap();
    let words = ["rho1^2", "rho2^2", "B12", "rho1*rho2", "rho2*rho1^-1", "rho1^4"];
    let mut found = 0;
    for a in words {
        for b in words {
            let (u, v) = (parse_word(a, p.alphabet()).unwrap(), parse_word(b, p.alphabet()).unwrap());
            if let Some(c) = search_equality(&p, &u, &v, 8, 2_000) {
                found += 1;
                assert_eq!(table.equal(&u, &v), Decision::Yes, "{a} vs {b}");
                assert_eq!(c.first(), Some(&u));
                assert_eq!(c.last(), Some(&v));
            }
        }
    }
    // rho1^2, rho2^2 and B12 are all the central element
    assert!(found >= 9, "only {found} certificates");
}

#[test]
fn b_generators_are_central_squares_at_two_strands() {
    let p = pure_braid_rp2(2).unwrap();
    let table = todd_coxeter(&p, &[], 1000).unwrap();
    let b = b_generator(2, 1, 2).unwrap();
    assert_eq!(table.is_central_finite(&b), Ok(true));
    assert_eq!(table.word_equal_finite(&b, &rho_generator(2, 2).unwrap().pow(2)), Ok(true));
}

#[test]
fn known_coverings_are_not_excluded() {
    let s = SurfaceKind::orientable;
    for l in 1..=12u64 {
        // the torus covers itself with any number of sheets
        assert!(!can_cover(SurfaceKind::TORUS, SurfaceKind::TORUS, l).unwrap().is_impossible());
        for g in 2..=5u32 {
            let cover = s(l as u32 * (g - 1) + 1);
            assert!(!can_cover(cover, s(g), l).unwrap().is_impossible(), "S{} over S{g}", cover.genus());
        }
        for (q, r) in torus_action_forms(l).unwrap() {
            assert_eq!(q * r, l);
            assert_eq!(r % q, 0);
        }
    }
    // orientation double covers
    for k in 1..=6u32 {
        let n = SurfaceKind::nonorientable(k).unwrap();
        assert!(!can_cover(s(k - 1), n, 2).unwrap().is_impossible());
    }
}

proptest! {
    #[test]
    fn candidates_satisfy_the_euler_relation(orientable in any::<bool>(), genus in 0u32..40, l in 1u64..30, strict in any::<bool>()) {
        prop_assume!(orientable || genus > 0);
        let m = SurfaceKind::new(orientable, genus).unwrap();
        for c in quotient_candidates(m, l, strict).unwrap() {
            prop_assert_eq!(l as i64 * euler_char(c), euler_char(m));
            if strict && !orientable {
                prop_assert!(!c.is_orientable());
            }
        }
    }

    #[test]
    fn word_round_trips_through_text(sylls in prop::collection::vec((0usize..3, -4i64..5), 0..10)) {
        let p = pure_braid_rp2(2).unwrap();
        let w = Word::from_syllables(sylls);
        let text = p.format(&w);
        prop_assert_eq!(parse_word(&text, p.alphabet()).unwrap(), w);
    }

    #[test]
    fn cyclic_reduction_is_a_conjugation(sylls in prop::collection::vec((0usize..2, -3i64..4), 0..10)) {
        let w = Word::from_syllables(sylls);
        let (core, conj) = w.cyclic_reduce();
        prop_assert!(core.is_cyclically_reduced());
        prop_assert_eq!(conj.multiply(&core).multiply(&conj.invert()), w);
    }
}
