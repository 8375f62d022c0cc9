use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solid_angle::linalg::cholesky;
use solid_angle::series::{tridiagonal_abs_det, truncation_decay_probe};
use solid_angle::{
    make_simplicial, measure_dim3, t_alpha, t_beta, SimplicialCone, SymTridiag, TruncationSpec,
};

fn tridiagonal_cone(beta: &[f64]) -> SimplicialCone<f64> {
    let g = SymTridiag::unit(beta).unwrap().to_dense();
    let l = cholesky(&g, 1e-14).unwrap().unwrap();
    make_simplicial(&l.to_rows()).unwrap()
}

/// Couplings of moderate size, so that the dense series stays cheap.
fn random_beta(rng: &mut ChaCha8Rng, m: usize, bound: f64) -> Vec<f64> {
    loop {
        let beta: Vec<f64> = (0..m).map(|_| rng.random_range(-bound..bound)).collect();
        if SymTridiag::unit(&beta).unwrap().sturm_count(0.05) == 0 {
            return beta;
        }
    }
}

#[test]
fn half_couplings_in_three_dimensions() {
    let beta = [0.5, 0.5];
    let k = tridiagonal_cone(&beta);
    let det = tridiagonal_abs_det(&beta).unwrap();
    assert!((det - k.abs_det()).abs() < 1e-14);
    let tb = t_beta(&beta, Some(det), &TruncationSpec::with_tol(1e-13)).unwrap();
    let ta = t_alpha(&k, &TruncationSpec::with_tol(1e-13)).unwrap();
    assert!(
        (tb.value - ta.value).abs() < 1e-9,
        "{} {}",
        tb.value,
        ta.value
    );
    assert!((tb.value - measure_dim3(&k).unwrap()).abs() < 1e-6);
}

#[test]
fn dense_and_tridiagonal_series_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let spec = TruncationSpec::with_tol(1e-10);
    for n in 3..=5 {
        for _ in 0..50 {
            let beta = random_beta(&mut rng, n - 1, 0.6);
            let k = tridiagonal_cone(&beta);
            let tb = t_beta(&beta, None, &spec).unwrap();
            let ta = t_alpha(&k, &spec).unwrap();
            let allowed = 1e-8 + tb.error.tail_estimate + ta.error.tail_estimate;
            assert!(
                (tb.value - ta.value).abs() <= allowed,
                "n={n} beta={beta:?}: {} vs {}",
                tb.value,
                ta.value
            );
        }
    }
}

#[test]
fn tail_estimate_is_honest() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut honest = 0;
    for i in 0..100 {
        let beta = random_beta(&mut rng, 1 + i % 3, 0.9);
        let exact = t_beta(&beta, None, &TruncationSpec::with_tol(1e-14)).unwrap();
        let caps = vec![4 + i % 12; beta.len()];
        let cut = t_beta(&beta, None, &TruncationSpec::fixed(caps)).unwrap();
        if (exact.value - cut.value).abs() <= 5.0 * cut.error.tail_estimate + 1e-14 {
            honest += 1;
        }
    }
    assert!(honest >= 95, "{honest}/100");
}

#[test]
fn decay_probe_examples() {
    let p = truncation_decay_probe(&[0.5, 0.5], &[20, 20], 10).unwrap();
    assert!((p.lambda_min - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
    assert_eq!(p.ratios[0], 1.0);
    assert!(p.ratios.windows(2).all(|w| w[1] <= w[0]));
    let rate = 1.0 - p.lambda_min + 0.1;
    assert!((1..=10).all(|l| p.ratios[l] <= rate.powi(l as i32)));

    let z = truncation_decay_probe(&[0.0, 0.0], &[1, 1], 5).unwrap();
    assert!(z.ln_errors.iter().all(|e| *e == f64::NEG_INFINITY));
}

fn near_orthonormal(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(-0.25f64..0.25, n), n).prop_map(
        move |noise| {
            noise
                .into_iter()
                .enumerate()
                .map(|(i, mut row)| {
                    row[i] += 1.0;
                    row
                })
                .collect()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dense_series_ignores_generator_order(
        gens in (3usize..5).prop_flat_map(near_orthonormal),
        rot in 0usize..4,
    ) {
        let k = make_simplicial(&gens).unwrap();
        prop_assume!(k.is_pd());
        let mut permuted = gens.clone();
        permuted.rotate_left(rot % gens.len());
        permuted.swap(0, gens.len() - 1);
        let p = make_simplicial(&permuted).unwrap();
        // uniform caps keep the truncated term set symmetric
        let n = gens.len();
        let spec = TruncationSpec::fixed(vec![6; n * (n - 1) / 2]);
        let a = t_alpha(&k, &spec).unwrap().value;
        let b = t_alpha(&p, &spec).unwrap().value;
        prop_assert!((a - b).abs() < 1e-10, "{} {}", a, b);
    }

    #[test]
    fn tridiagonal_series_is_a_probability(beta in proptest::collection::vec(-0.7f64..0.7, 1..5)) {
        prop_assume!(SymTridiag::unit(&beta).unwrap().sturm_count(0.05) == 0);
        let r = t_beta(&beta, None, &TruncationSpec::with_tol(1e-10)).unwrap();
        let n = beta.len() + 1;
        prop_assert!(r.value > 0.0 && r.value < 1.0);
        prop_assert!(r.error.lambda_min > 0.0 && r.error.lambda_min < 1.0);
        prop_assert!(r.error.rho > 1.0 - r.error.lambda_min && r.error.rho < 1.0);
        // reversing the chain is the same cone
        let rev: Vec<f64> = beta.iter().rev().copied().collect();
        let s = t_beta(&rev, None, &TruncationSpec::with_tol(1e-10)).unwrap();
        prop_assert!((r.value - s.value).abs() < 1e-9);
        // flipping a generator's sign gives the complementary cone in that axis
        let mut flipped = beta.clone();
        flipped[0] = -flipped[0];
        let f = t_beta(&flipped, None, &TruncationSpec::with_tol(1e-10)).unwrap();
        if n == 2 {
            prop_assert!((r.value + f.value - 0.5).abs() < 1e-9);
        }
    }
}
