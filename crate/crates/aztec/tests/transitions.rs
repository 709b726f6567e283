use aztec::graphs::*;
use aztec::numerics::{int, Rational};
use aztec::transitions::*;
use aztec::weights::WeightField;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn family(n: usize, p: usize, seed: u64) -> TransitionFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = WeightField::random_window(&mut rng, 0, n as i64 - 1, -((n + p) as i64) - 8, n as i64 + 4);
    TransitionFamily::new(n, w).unwrap()
}

#[test]
fn v_of_size_one_uniform() {
    let f = TransitionFamily::new(1, WeightField::uniform()).unwrap();
    let v = product_v(&f, -3, 2).unwrap();
    assert_eq!(v.entry(0, -1).unwrap(), int(2));
    assert_eq!(v.entry(0, 1).unwrap(), Rational::zero());
    assert_eq!(extract_w(&v, 1, 0).unwrap().to_rows(), vec![vec![int(2)]]);
}

#[test]
fn v_counts_paths_on_the_refined_graph() {
    for n in 1..=3 {
        let f = family(n, 1, n as u64);
        let (lo, hi) = (-5, 3);
        let v = product_v(&f, lo, hi).unwrap();
        let g = g_graph(&f, lo, hi).unwrap();
        for j in lo..=hi {
            for k in lo..=hi {
                if v.is_exact(j, k) {
                    assert_eq!(v.entry(j, k).unwrap(), count_paths_dr(&g, (0, j), (2 * n as i64, k)), "({j},{k})");
                }
            }
        }
    }
}

#[test]
fn v_is_lower_triangular() {
    let f = family(2, 1, 3);
    let v = product_v(&f, -4, 2).unwrap();
    for j in -4..=2 {
        for k in j + 1..=2 {
            assert_eq!(v.entry(j, k).unwrap(), Rational::zero());
        }
    }
}

#[test]
fn widening_keeps_certified_entries() {
    let f = family(2, 2, 4);
    let small = product_v(&f, -5, 2).unwrap();
    let big = product_v(&f, -10, 4).unwrap();
    for j in -5..=2 {
        for k in -5..=2 {
            if small.is_exact(j, k) {
                assert_eq!(small.entry(j, k).unwrap(), big.entry(j, k).unwrap());
            }
        }
    }
}

#[test]
fn default_window_certifies_w() {
    let f = family(2, 2, 5);
    let (lo, hi) = default_window(2, 2);
    assert!(extract_w(&product_v(&f, lo, hi).unwrap(), 2, 2).is_ok());
    assert!(matches!(extract_w(&product_v(&f, lo + 2, hi).unwrap(), 2, 2), Err(aztec::Error::Extent(_))));
}

fn tower_setup(n: usize, p: usize, seed: u64) -> (TransitionFamily, DimerGraph) {
    let f = family(n, p, seed);
    let g = build_tower(n, p, &f.weights).unwrap();
    (f, g)
}

#[test]
fn det_w_is_tower_partition_function() {
    for (n, p) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
        let (f, g) = tower_setup(n, p, 10 + n as u64 + p as u64);
        let (lo, hi) = default_window(n, p);
        let w = extract_w(&product_v(&f, lo, hi).unwrap(), n, p).unwrap();
        let z: Rational = enumerate_tilings(&g, DEFAULT_TILING_GUARD).unwrap().into_iter().map(|x| x.1).sum();
        assert_eq!(w.det().unwrap(), z);
    }
}

#[test]
fn w_columns_relate_to_tower_schur_complement() {
    use aztec::kasteleyn::{kasteleyn_matrix, schur_blocks};
    for (n, p) in [(2, 1), (2, 2), (3, 1)] {
        let (f, g) = tower_setup(n, p, 20 + n as u64 + p as u64);
        let (lo, hi) = default_window(n, p);
        let w = extract_w(&product_v(&f, lo, hi).unwrap(), n, p).unwrap();
        let s = schur_blocks(&kasteleyn_matrix(&g)).unwrap();
        for r in 0..n + p {
            for c in 0..n + p {
                let expect = if c == 0 { w.get(r, 0).clone() } else { w.get(r, c) - w.get(r, c - 1) };
                assert_eq!(s.tilde_w.get(r, c).norm_sqr(), &expect * &expect);
            }
        }
    }
}

#[test]
fn particle_count_per_column() {
    let (n, p) = (2, 1);
    let f = family(n, p, 30);
    let k = finite_kernel(&f, p, None).unwrap();
    for m in 0..=2 * n {
        let total: Rational = (-((n + p) as i64)..n as i64).map(|x| k.kernel(m, x, m, x).unwrap()).sum();
        assert_eq!(total, int((n + p) as i64), "column {m}");
    }
}

#[test]
fn kernel_reproduces_path_probabilities() {
    let (n, p) = (2, 1);
    let (f, g) = tower_setup(n, p, 31);
    let k = finite_kernel(&f, p, None).unwrap();
    let tilings = enumerate_tilings(&g, DEFAULT_TILING_GUARD).unwrap();
    let z: Rational = tilings.iter().map(|x| x.1.clone()).sum();
    assert_eq!(k.w().det().unwrap(), z);
    for (t, w) in &tilings {
        let sys = tiling_to_paths(&g, t).unwrap();
        let points: Vec<(usize, i64)> = (0..=2 * n).flat_map(|m| sys.points(m as i64).into_iter().map(move |x| (m, x))).collect();
        assert_eq!(points.len(), (2 * n + 1) * (n + p));
        assert_eq!(k.correlation(&points).unwrap(), w / &z);
    }
}

#[test]
fn indicator_vanishes_for_later_first_time() {
    let f = family(2, 1, 32);
    let k = finite_kernel(&f, 1, None).unwrap();
    let direct = em_kernel_finite(&f, 1, (3, 0, 1, -1)).unwrap();
    assert_eq!(k.kernel(3, 0, 1, -1).unwrap(), direct);
}

#[test]
fn phi_psi_commutation() {
    // Φ(a,b)Ψ = D(a+b) Ψ Φ(a, σb) D(a+b)⁻¹ with (σb)_j = b_{j-1}
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let w = WeightField::random_window(&mut rng, 0, 0, -12, 12);
    let (lo, hi) = (-8, 8);
    let a = |j: i64| w.get_a(0, j).cloned();
    let b = |j: i64| w.get_b(0, j).cloned();
    let s = |j: i64| Some(w.a(0, j) + w.b(0, j));
    let left = phi_operator(a, b, lo, hi).unwrap().mul(&psi_operator(lo, hi).unwrap()).unwrap();
    let right = diag_operator(s, lo, hi)
        .unwrap()
        .mul(&psi_operator(lo, hi).unwrap())
        .unwrap()
        .mul(&phi_operator(a, |j| w.get_b(0, j - 1).cloned(), lo, hi).unwrap())
        .unwrap()
        .mul(&diag_operator(|j| Some(int(1) / (w.a(0, j) + w.b(0, j))), lo, hi).unwrap())
        .unwrap();
    let mut checked = 0;
    for j in lo..=hi {
        for k in lo..=hi {
            if left.is_exact(j, k) && right.is_exact(j, k) {
                assert_eq!(left.entry(j, k).unwrap(), right.entry(j, k).unwrap(), "({j},{k})");
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn shifted_columns() {
    let f = family(2, 0, 41);
    let v = product_v(&f, -6, 3).unwrap();
    let g = v.shift_columns(2);
    assert_eq!(g.entry(1, 0).unwrap(), v.entry(1, -2).unwrap());
    assert_eq!(g.entry(0, 3).unwrap(), Rational::zero());
}
