use aztec::dynamics::*;
use aztec::numerics::{int, Rational};
use aztec::transitions::WindowedOperator;
use aztec::weights::{check_assumption, faces_from_weights, FaceField, WeightField};
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn assert_sides_equal(left: &WindowedOperator, right: &WindowedOperator) -> usize {
    let (lo, hi) = left.window();
    let mut checked = 0;
    for j in lo..=hi {
        for k in lo..=hi {
            if left.is_exact(j, k) && right.is_exact(j, k) {
                assert_eq!(left.entry(j, k).unwrap(), right.entry(j, k).unwrap(), "({j},{k})");
                checked += 1;
            }
        }
    }
    checked
}

#[test]
fn square_move_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let e: Vec<Rational> = (0..4).map(|_| aztec::weights::random_rational(&mut rng)).collect();
        let (once, _) = square_move_edges(&e[0], &e[1], &e[2], &e[3]);
        let (twice, _) = square_move_edges(&once[0], &once[1], &once[2], &once[3]);
        assert_eq!(twice.to_vec(), e);
        let f = aztec::weights::random_rational(&mut rng);
        let nb = [e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone()];
        let (c1, n1) = square_move_local(&f, &nb);
        let (c2, n2) = square_move_local(&c1, &quarter_turn(&n1));
        assert_eq!(c2, f);
        assert_eq!(n2, quarter_turn(&nb));
    }
}

#[test]
fn uniform_faces_are_fixed() {
    let f = FaceField::periodic_from_fn(1, 1, |_, _| int(1));
    let s = shuffle_step(&ShuffleState::new(f.clone())).unwrap();
    assert_eq!(s.faces, f);
    assert_eq!(s.generation, 1);
}

#[test]
fn single_face_perturbation_is_local() {
    let base: BTreeMap<_, _> = (-6..=6).flat_map(|k| (-6..=6).map(move |j| ((k, j), int(1)))).collect();
    let mut bumped = base.clone();
    bumped.insert((0, 0), int(3));
    let a = shuffle_step(&ShuffleState::new(FaceField::from_map(base))).unwrap().faces;
    let b = shuffle_step(&ShuffleState::new(FaceField::from_map(bumped))).unwrap().faces;
    for (c, v) in a.values() {
        if b.get(c.0, c.1) != Some(v) {
            assert!(c.0.abs() <= 2 && c.1.abs() <= 1, "change at {c:?}");
        }
    }
}

#[test]
fn periodic_orbit_of_a_two_periodic_field() {
    let f = FaceField::periodic_from_fn(1, 2, |_, j| if j == 0 { int(2) } else { aztec::numerics::rat(1, 2) });
    assert_eq!(orbit_period(&f, 8).unwrap(), Some(2));
    let w = WeightField::periodic(vec![vec![int(1)], vec![int(2)]], vec![vec![int(1)], vec![int(1)]]).unwrap();
    assert_eq!(orbit_period(&faces_from_weights(&w), 8).unwrap(), Some(1));
}

#[test]
fn shuffle_matches_hat_on_windows_and_periodic_fields() {
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = WeightField::random_window(&mut rng, 0, 9, 0, 9);
        let r = equivalence_report(&w, 5).unwrap();
        assert!(r.all_equal(), "window seed {seed}: {r:?}");
        let w = WeightField::random_periodic(&mut rng, 2, 2);
        let r = equivalence_report(&w, 5).unwrap();
        assert!(r.all_equal(), "periodic seed {seed}: {r:?}");
    }
}

#[test]
fn reverse_shuffle_matches_check() {
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 50);
        let w = WeightField::random_window(&mut rng, 0, 6, 0, 6);
        let checked = check_weights(&w).unwrap();
        let rev = reverse_shuffle_step(&ShuffleState::new(faces_from_weights(&w))).unwrap();
        let (n, witness) = faces_from_weights(&checked).compare(&rev.faces);
        assert!(n > 0 && witness.is_none());
        // odd faces become reciprocals of their left neighbours
        for i in 1..=5 {
            for j in 0..5 {
                assert_eq!(faces_from_weights(&checked).get(2 * i, j).unwrap(), &faces_from_weights(&w).get(2 * i - 1, j).unwrap().recip());
            }
        }
    }
}

#[test]
fn hat_then_check_restores_faces() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let w = WeightField::random_window(&mut rng, 0, 6, 0, 6);
    let back = check_weights(&hat_weights(&w).unwrap()).unwrap();
    let (n, witness) = faces_from_weights(&back).compare(&faces_from_weights(&w));
    assert!(n > 20 && witness.is_none());
}

#[test]
fn operator_identities() {
    for seed in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 90);
        let w = WeightField::random_window(&mut rng, -1, 2, -10, 10);
        let (l, r) = hat_identity_sides(&w, 0, -6, 6).unwrap();
        assert!(assert_sides_equal(&l, &r) > 50);
        let (l, r) = check_identity_sides(&w, 1, -6, 6).unwrap();
        assert!(assert_sides_equal(&l, &r) > 50);
    }
}

#[test]
fn positivity_and_window_shrinking() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut s = ParamState::new(WeightField::random_window(&mut rng, 0, 3, 0, 3));
    for _ in 0..3 {
        s = hat_step(&s).unwrap();
        assert!(s.w.keys().all(|(i, j)| s.w.a(i, j).is_positive() && s.w.b(i, j).is_positive()));
    }
    assert!(matches!(hat_step(&s), Err(aztec::Error::Extent(_))));
}

#[test]
fn decay_rate_survives_the_hat_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let w = WeightField::random_periodic(&mut rng, 2, 3);
    let before = check_assumption(&w, 0..2);
    let after = check_assumption(&hat_weights(&w).unwrap(), 0..2);
    match (before.report(), after.report()) {
        (Ok(a), Ok(b)) => assert!((a.rho - b.rho).abs() < 1e-12),
        (Err(_), Err(_)) => {}
        _ => panic!("assumption status changed"),
    }
}

#[test]
fn orbit_dump() {
    let f = FaceField::periodic_from_fn(1, 1, |_, _| int(2));
    let s = ShuffleState::new(f);
    let orbit = vec![s.clone(), shuffle_step(&s).unwrap()];
    let j = orbit_json(&orbit, Some((0, 0)));
    assert_eq!(j[0]["faces"], "2");
}
