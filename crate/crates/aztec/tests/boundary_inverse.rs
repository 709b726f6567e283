use aztec::boundary_inverse::*;
use aztec::graphs::{build_aztec, build_aztec_labeled, enumerate_tilings};
use aztec::kasteleyn::{kasteleyn_aztec, schur_blocks};
use aztec::numerics::{int, ExactMatrix, GaussianRational, Rational};
use aztec::weights::WeightField;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `W_n(i,j) = i^{-(i+j-1)} W̃(i,j)` read off the Schur complement.
fn direct_w(w: &WeightField, n: usize) -> ExactMatrix {
    let s = schur_blocks(&kasteleyn_aztec(&build_aztec(n, w).unwrap()).unwrap()).unwrap();
    ExactMatrix::from_fn(n, n, |i, j| &GaussianRational::i_pow(-((i + j + 1) as i64)) * s.tilde_w.get(i, j))
}

fn random(seed: u64, n: usize) -> WeightField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    WeightField::random_window(&mut rng, 0, n as i64 - 1, 0, n as i64 - 1)
}

#[test]
fn size_one_is_reciprocal_of_a_plus_b() {
    let w = WeightField::constant(Rational::new(3.into(), 7.into()), int(5)).unwrap();
    let m = w_inverse_recurrence(&w, 1).unwrap();
    assert_eq!(m.get(0, 0), &GaussianRational::real(Rational::new(7.into(), 38.into())));
}

#[test]
fn uniform_size_two_matches_direct_inverse() {
    let w = WeightField::uniform();
    assert_eq!(w_inverse_recurrence(&w, 2).unwrap(), direct_w(&w, 2).inverse().unwrap());
}

#[test]
fn recurrence_matches_direct_inverse() {
    for n in 1..=4 {
        for seed in 0..3 {
            let w = random(100 * n as u64 + seed, n);
            let direct = direct_w(&w, n);
            // the signed matrix is real
            assert!((0..n).all(|i| (0..n).all(|j| direct.get(i, j).im.is_zero())));
            assert_eq!(w_inverse_recurrence(&w, n).unwrap(), direct.inverse().unwrap(), "n = {n}, seed {seed}");
        }
    }
}

#[test]
fn every_frame_inverts_its_own_level() {
    let n = 4;
    let frames = recurrence_frames(&random(7, n), n).unwrap();
    assert_eq!(frames.iter().map(|f| f.size).collect::<Vec<_>>(), vec![4, 3, 2, 1]);
    for f in &frames {
        assert!(f.labels.values().all(|r| delta(r) > Rational::zero()));
        let g = build_aztec_labeled(f.size, &f.labels).unwrap();
        // shuffled labels make |det D| ≠ 1, so compare with K⁻¹ directly
        let kinv = kasteleyn_aztec(&g).unwrap().inverse().unwrap();
        assert_eq!(kinv.block(0, f.size, 0, f.size), boundary_block(&f.w_inverse), "size {}", f.size);
    }
}

#[test]
fn partition_chain_matches_enumeration() {
    for n in 1..=3 {
        let w = random(40 + n as u64, n);
        let chain = partition_chain(&w, n).unwrap();
        let mut labels = vec![initial_labels(&w, n).unwrap()];
        for k in (2..=n).rev() {
            let next = shuffle_labels(labels.last().unwrap(), k).unwrap();
            labels.push(next);
        }
        for (k, r) in (1..=n).zip(labels.iter().rev()) {
            let g = build_aztec_labeled(k, r).unwrap();
            let z: Rational = enumerate_tilings(&g, 10_000).unwrap().into_iter().map(|(_, wt)| wt).sum();
            assert_eq!(chain[k - 1], z, "n = {n}, level {k}");
        }
        let g = build_aztec(n, &w).unwrap();
        let z: Rational = enumerate_tilings(&g, 10_000).unwrap().into_iter().map(|(_, wt)| wt).sum();
        assert_eq!(chain[n - 1], z);
    }
}

#[test]
fn full_inverse_matches_direct() {
    for n in 1..=3 {
        let w = random(300 + n as u64, n);
        let full = propagate_full_inverse(&w, n, &w_inverse_recurrence(&w, n).unwrap()).unwrap();
        let k = kasteleyn_aztec(&build_aztec(n, &w).unwrap()).unwrap();
        assert_eq!(full, k.inverse().unwrap(), "n = {n}");
        assert_eq!(full.rows(), n * (n + 1));
    }
}

#[test]
fn entrywise_product_is_identity() {
    let n = 3;
    let w = random(5, n);
    let full = propagate_full_inverse(&w, n, &w_inverse_recurrence(&w, n).unwrap()).unwrap();
    let k = kasteleyn_aztec(&build_aztec(n, &w).unwrap()).unwrap();
    assert!(k.matrix.mul(&full).unwrap().is_identity());
    assert!(full.mul(&k.matrix).unwrap().is_identity());
}

#[test]
fn zero_inverse_leaves_only_the_corner_block() {
    let n = 2;
    let w = random(9, n);
    let s = schur_blocks(&kasteleyn_aztec(&build_aztec(n, &w).unwrap()).unwrap()).unwrap();
    let out = assemble_inverse(&s, &ExactMatrix::zeros(n, n)).unwrap();
    let total = n * (n + 1);
    let mut expect = ExactMatrix::zeros(total, total);
    expect.set_block(n, n, &s.d_inv);
    assert_eq!(out, expect);
}

#[test]
fn inconsistent_inverse_is_rejected() {
    let n = 2;
    let w = random(13, n);
    let other = w_inverse_recurrence(&random(14, n), n).unwrap();
    assert!(matches!(propagate_full_inverse(&w, n, &other), Err(aztec::Error::Consistency(_))));
    assert!(matches!(propagate_full_inverse(&w, n, &ExactMatrix::zeros(3, 3)), Err(aztec::Error::Dimension(_))));
}
