use aztec::factorization::*;
use aztec::numerics::{int, to_f64, Rational};
use aztec::transitions::TransitionFamily;
use aztec::weights::WeightField;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn two_periodic() -> TransitionFamily {
    let a = vec![vec![int(1), int(2)], vec![int(2), int(1)]];
    let b = vec![vec![int(5), int(9)], vec![int(7), int(8)]];
    TransitionFamily::new(2, WeightField::periodic(a, b).unwrap()).unwrap()
}

fn assert_agrees(lhs: &aztec::transitions::WindowedOperator, rhs: &aztec::transitions::WindowedOperator) -> usize {
    let (lo, hi) = lhs.window();
    let mut checked = 0;
    for j in lo..=hi {
        for k in lo..=hi {
            if lhs.is_exact(j, k) && rhs.is_exact(j, k) {
                assert_eq!(lhs.entry(j, k).unwrap(), rhs.entry(j, k).unwrap(), "entry ({j}, {k})");
                checked += 1;
            }
        }
    }
    checked
}

#[test]
fn lu_and_ul_reproduce_g() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=3usize {
        let (lo, hi) = (-8, 4);
        let w = WeightField::random_window(&mut rng, 0, n as i64 - 1, lo - n as i64 - 2, hi + n as i64 + 2);
        let f = TransitionFamily::new(n, w).unwrap();
        let g = g_operator(&f, lo, hi).unwrap();
        let lu = lu_decompose(&f, lo, hi).unwrap();
        let ul = ul_decompose(&f, lo, hi).unwrap();
        assert!(assert_agrees(&lu.product(true).unwrap(), &g) > 40, "n = {n}");
        assert!(assert_agrees(&ul.product(false).unwrap(), &g) > 40, "n = {n}");
    }
}

#[test]
fn factor_shapes() {
    let f = two_periodic();
    let lu = lu_decompose(&f, -10, 3).unwrap();
    let ul = ul_decompose(&f, -10, 3).unwrap();
    for op in [&lu.l, &ul.l] {
        assert!(op.bands().1.is_some_and(|u| u <= 0));
    }
    for op in [&lu.u, &ul.u] {
        assert!(op.bands().0.is_some_and(|l| l <= 0));
    }
    assert_eq!(lu.stages.len(), 3);
    assert_eq!(ul.stages.len(), 2);
}

#[test]
fn factor_inverses() {
    let f = two_periodic();
    let (lo, hi) = (-12, 3);
    let lu = lu_decompose(&f, lo, hi).unwrap();
    let inv = invert_lu(&lu).unwrap();
    assert!(bandwidth(&inv.lambda) <= 3);
    let id = aztec::transitions::WindowedOperator::identity(lo, hi).unwrap();
    assert!(assert_agrees(&inv.lambda.mul(&lu.l).unwrap(), &id) > 100);
    assert!(assert_agrees(&lu.u.mul(&inv.upsilon).unwrap(), &id) > 100);
    // entries of Υ decay away from the diagonal
    let far = to_f64(&inv.upsilon.entry(-8, 2).unwrap()).abs();
    let near = to_f64(&inv.upsilon.entry(1, 2).unwrap()).abs();
    assert!(far < near * 0.2, "{far} vs {near}");
}

#[test]
fn residual_decays_with_p() {
    let f = two_periodic();
    let residuals: Vec<(f64, f64)> = (2..=8).map(|p| (p as f64, approximate_w_inverse(&f, p).unwrap().residual)).collect();
    for w in residuals.windows(2) {
        assert!(w[1].1 < w[0].1, "{residuals:?}");
    }
    let approx = approximate_w_inverse(&f, 8).unwrap();
    let (rate, r2) = fit_rate(&residuals);
    assert!(rate < 1.0 && r2 > 0.9, "rate {rate}, r2 {r2}, rho {}", approx.rho);
}

#[test]
fn limit_kernel_matches_long_corridor() {
    let f = two_periodic();
    let lk = LimitKernel::new(&f, 1e-13).unwrap();
    for &(m1, x1, m2, x2) in &[(0, 0, 0, 0), (1, 1, 2, 0), (2, -1, 1, 1), (3, 0, 3, -1), (4, 1, 0, 1)] {
        let finite: Rational = aztec::transitions::em_kernel_finite(&f, 20, (m1, x1, m2, x2)).unwrap();
        let limit = lk.kernel(m1, x1, m2, x2).unwrap();
        assert!((to_f64(&finite) - limit).abs() < 1e-10, "{m1} {x1} {m2} {x2}: {} vs {limit}", to_f64(&finite));
    }
}

#[test]
fn limit_kernel_rejects_low_heights() {
    let lk = LimitKernel::new(&two_periodic(), 1e-8).unwrap();
    assert!(matches!(lk.kernel(0, -2, 1, 0), Err(aztec::Error::Domain(_))));
}

#[test]
fn limit_kernel_needs_the_assumption() {
    let f = TransitionFamily::new(1, WeightField::constant(int(2), int(1)).unwrap()).unwrap();
    assert!(matches!(LimitKernel::new(&f, 1e-8), Err(aztec::Error::Assumption(_))));
}

#[test]
fn stage_dump_is_json() {
    let lu = lu_decompose(&two_periodic(), -6, 2).unwrap();
    let v = lu.to_json();
    assert_eq!(v["n"], 2);
    assert_eq!(v["diagonals"].as_array().unwrap().len(), 2);
}

#[test]
fn slow_decay_is_a_capacity_error() {
    let w = WeightField::periodic(vec![vec![int(99), int(99)]], vec![vec![int(100), int(100)]]).unwrap();
    let f = TransitionFamily::new(1, w).unwrap();
    assert!(matches!(LimitKernel::new(&f, 1e-13), Err(aztec::Error::Capacity(_))));
}
