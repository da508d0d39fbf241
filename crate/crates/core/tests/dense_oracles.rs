use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinmzi::{apply_bs, BeamSplitterF64, FockStateF64, TwoModeStateF64};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `b̂₀†b̂₁ + b̂₁†b̂₀` on the `N`-photon sector, basis `|k, N−k⟩`.
fn sector_generator(n: usize) -> DMatrix<Complex64> {
    let mut g = DMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        let v = (((k + 1) * (n - k)) as f64).sqrt();
        g[(k + 1, k)] = c(v);
        g[(k, k + 1)] = c(v);
    }
    g
}

#[test]
fn splitter_sector_matches_matrix_exponential() {
    for n in 0..=8 {
        for tau_sq in [0.0, 0.13, 0.5, 0.77, 1.0] {
            let bs = BeamSplitterF64::from_transmissivity(tau_sq).unwrap();
            let theta = bs.r_mag().atan2(bs.tau());
            let expected = (sector_generator(n) * Complex64::new(0.0, theta)).exp();
            let got = bs.sector_matrix(n);
            for m in 0..=n {
                for k in 0..=n {
                    let diff = (got[m * (n + 1) + k] - expected[(m, k)]).norm();
                    assert!(diff < 1e-12, "N={n} τ²={tau_sq} [{m},{k}] off by {diff}");
                }
            }
        }
    }
}

fn lowering(dim: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = c((n as f64).sqrt());
    }
    a
}

fn random_state(rng: &mut ChaCha8Rng, cutoffs: (usize, usize)) -> TwoModeStateF64 {
    let len = (cutoffs.0 + 1) * (cutoffs.1 + 1);
    let amps = (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    TwoModeStateF64::new(cutoffs, amps).unwrap()
}

fn expect(psi: &DVector<Complex64>, op: &DMatrix<Complex64>) -> Complex64 {
    psi.dotc(&(op * psi))
}

#[test]
fn expectations_match_dense_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let cutoffs = (rng.gen_range(0..5), rng.gen_range(0..5));
        let state = random_state(&mut rng, cutoffs);
        let (d0, d1) = (cutoffs.0 + 1, cutoffs.1 + 1);
        let psi = DVector::from_column_slice(state.amplitudes());
        let modes = [
            lowering(d0).kronecker(&DMatrix::identity(d1, d1)),
            DMatrix::identity(d0, d0).kronecker(&lowering(d1)),
        ];
        for (mode, a) in modes.iter().enumerate() {
            let n = a.adjoint() * a;
            let checks = [
                (c(state.expect_number(mode).unwrap()), expect(&psi, &n)),
                (
                    c(state.expect_number_sq(mode).unwrap()),
                    expect(&psi, &(&n * &n)),
                ),
                (state.expect_lowering(mode).unwrap(), expect(&psi, a)),
                (
                    state.expect_lowering_sq(mode).unwrap(),
                    expect(&psi, &(a * a)),
                ),
                (
                    state.expect_number_lowering(mode).unwrap(),
                    expect(&psi, &(&n * a)),
                ),
            ];
            for (i, (got, want)) in checks.iter().enumerate() {
                assert!(
                    (got - want).norm() < 1e-12,
                    "mode {mode} check {i}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn splitter_preserves_norm_and_total_number() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let cut = rng.gen_range(0..6);
        let state = random_state(&mut rng, (cut, cut));
        let bs = BeamSplitterF64::from_transmissivity(rng.gen_range(0.0..1.0)).unwrap();
        let out = apply_bs(&state, &bs).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        let before = state.total_number_distribution();
        let after = out.total_number_distribution();
        for (n, p) in before.iter().enumerate() {
            assert!((p - after[n]).abs() < 1e-12);
        }
        assert!(after[before.len()..].iter().all(|p| p.abs() < 1e-12));
    }
}

#[test]
fn binomial_law_of_spin_coherent_states() {
    for two_j in 1..=6 {
        for mag in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let p =
                spinmzi::Su2CoherentParamsF64::from_two_j(two_j, Complex64::new(mag, 0.0)).unwrap();
            let dist = spinmzi::su2_coherent(&p).distribution();
            let q = mag * mag / (1.0 + mag * mag);
            let mut binom = 1.0;
            for (k, pk) in dist.iter().enumerate() {
                if k > 0 {
                    binom *= (two_j + 1 - k) as f64 / k as f64;
                }
                let want = binom * q.powi(k as i32) * (1.0 - q).powi((two_j - k) as i32);
                assert!((pk - want).abs() < 1e-12, "2j={two_j} |λ|={mag} k={k}");
            }
        }
    }
    let vac = FockStateF64::vacuum(3);
    assert_eq!(vac.distribution(), vec![1.0, 0.0, 0.0, 0.0]);
}
