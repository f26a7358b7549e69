use bifidelity::problems::QuadraticTestProblem;
use bifidelity::sgd::{
    bfsag_run, bfsvrg_run, realization_pool, sag_run, sgd_run, svrg_run, AlphaMode, AnchorMode, BfSagConfig,
    BfSvrgConfig, BiFidelityOracle, DesignVector, Fidelity, RandomRealization, RunContext, SagConfig, SgdConfig,
    SvrgConfig,
};
use bifidelity::Result;
use proptest::prelude::*;
use rand::RngCore;

fn noisy(n: usize) -> QuadraticTestProblem<f64> {
    QuadraticTestProblem::new(n, 1.0, 2.0).unwrap().with_noise(0.5).unwrap()
}

fn start(n: usize) -> DesignVector<f64> {
    DesignVector::new(vec![4.0; n])
}

#[test]
fn runs_are_deterministic_per_seed() {
    let p = noisy(3);
    let cfg = BfSagConfig {
        eta: 0.2,
        iters: 30,
        n: 40,
        n_l: 10,
        n_h: 4,
    };
    let a = bfsag_run(&p, &start(3), &cfg, &mut RunContext::new(9)).unwrap();
    let b = bfsag_run(&p, &start(3), &cfg, &mut RunContext::new(9)).unwrap();
    let c = bfsag_run(&p, &start(3), &cfg, &mut RunContext::new(10)).unwrap();
    assert_eq!(a.theta, b.theta);
    assert_eq!(a.records, b.records);
    assert_ne!(a.theta, c.theta);
}

#[test]
fn identical_fidelities_collapse_bfsag_to_sag() {
    let p = noisy(2);
    let bf = BfSagConfig {
        eta: 0.2,
        iters: 25,
        n: 30,
        n_l: 6,
        n_h: 3,
    };
    let sag = SagConfig {
        eta: 0.2,
        iters: 25,
        n: 30,
        n_h: 9,
    };
    let a = bfsag_run(&p, &start(2), &bf, &mut RunContext::new(4)).unwrap();
    let b = sag_run(&p, &start(2), &sag, &mut RunContext::new(4)).unwrap();
    assert_eq!(a.theta, b.theta);
    assert_eq!(a.last().low_calls, 150);
    assert_eq!(b.last().high_calls, 225);
}

#[test]
fn full_refresh_sag_is_gradient_descent_after_first_step() {
    let p = QuadraticTestProblem::new(2, 1.0, 3.0).unwrap();
    let cfg = SagConfig {
        eta: 0.1,
        iters: 10,
        n: 4,
        n_h: 4,
    };
    let t = sag_run(&p, &start(2), &cfg, &mut RunContext::new(1)).unwrap();
    let mut th = vec![4.0, 4.0];
    for _ in 0..10 {
        let g = p.core_grad(&th);
        th = th.iter().zip(&g).map(|(a, b)| a - 0.1 * b).collect();
    }
    for (a, b) in t.theta.iter().zip(&th) {
        assert!((a - b).abs() < 1e-12);
    }
}

/// Zero gradient everywhere, at either fidelity.
struct Flat;

impl BiFidelityOracle<f64> for Flat {
    fn n_theta(&self) -> usize {
        3
    }
    fn n_xi(&self) -> usize {
        1
    }
    fn gamma(&self) -> f64 {
        0.1
    }
    fn sample(&self, rng: &mut dyn RngCore) -> RandomRealization<f64> {
        RandomRealization::new(vec![(rng.next_u32() as f64) / 4e9])
    }
    fn grad(&self, _: &[f64], _: &RandomRealization<f64>, _: Fidelity) -> Result<Vec<f64>> {
        Ok(vec![0.0; 3])
    }
    fn objective(&self, _: &[f64], _: &RandomRealization<f64>, _: Fidelity) -> Result<f64> {
        Ok(0.0)
    }
}

#[test]
fn zero_gradient_is_a_fixed_point_for_every_optimizer() {
    let t0 = DesignVector::new(vec![0.3, -1.0, 2.0]);
    let ctx = || RunContext::new(3);
    let runs = [
        sgd_run(&Flat, &t0, &SgdConfig { eta: 1.0, iters: 5, batch: 2 }, &mut ctx()).unwrap(),
        sag_run(&Flat, &t0, &SagConfig { eta: 1.0, iters: 5, n: 6, n_h: 2 }, &mut ctx()).unwrap(),
        svrg_run(
            &Flat,
            &t0,
            &SvrgConfig {
                eta: 1.0,
                outer: 2,
                inner: 3,
                n_h: 4,
                batch: 1,
            },
            &mut ctx(),
        )
        .unwrap(),
        bfsvrg_run(
            &Flat,
            &t0,
            &BfSvrgConfig {
                eta: 1.0,
                outer: 2,
                inner: 3,
                n_l: 5,
                n_h: 3,
                alpha_mode: AlphaMode::Diagonal,
                anchor: AnchorMode::Sampled,
            },
            &mut ctx(),
        )
        .unwrap(),
    ];
    for r in &runs {
        assert_eq!(r.theta, t0.values);
    }
    assert!(runs[3].records.iter().all(|r| r.alpha_fallback));
}

#[test]
fn noise_free_svrg_steps_along_the_true_gradient() {
    let p = QuadraticTestProblem::new(2, 1.0, 2.0).unwrap();
    let cfg = SvrgConfig {
        eta: 0.3,
        outer: 3,
        inner: 4,
        n_h: 5,
        batch: 2,
    };
    let t = svrg_run(&p, &start(2), &cfg, &mut RunContext::new(2)).unwrap();
    let mut th = vec![4.0, 4.0];
    for _ in 0..12 {
        let g = p.core_grad(&th);
        th = th.iter().zip(&g).map(|(a, b)| a - 0.3 * b).collect();
    }
    for (a, b) in t.theta.iter().zip(&th) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(t.last().high_calls, 3 * 5 + 12 * 4);
}

#[test]
fn exact_anchor_cancels_shared_noise() {
    let p = noisy(3);
    let cfg = BfSvrgConfig {
        eta: 0.125,
        outer: 4,
        inner: 5,
        n_l: 10,
        n_h: 3,
        alpha_mode: AlphaMode::Identity,
        anchor: AnchorMode::Exact,
    };
    let t = bfsvrg_run(&p, &start(3), &cfg, &mut RunContext::new(8)).unwrap();
    let mut th = vec![4.0; 3];
    for _ in 0..20 {
        let g = p.core_grad(&th);
        th = th.iter().zip(&g).map(|(a, b)| a - 0.125 * b).collect();
    }
    for (a, b) in t.theta.iter().zip(&th) {
        assert!((a - b).abs() < 1e-12);
    }
    let last = t.last();
    assert_eq!((last.high_calls, last.low_calls), (60, 100));
}

#[test]
fn sag_converges_to_pool_minimizer() {
    let p = noisy(2);
    let pool = realization_pool(&p, 20, 6).unwrap();
    let eig = p.eigenvalues();
    let target: Vec<f64> = (0..2)
        .map(|i| 1.0 - 0.5 * pool.iter().map(|r| r.xi[i]).sum::<f64>() / 20.0 / eig[i])
        .collect();
    let cfg = SagConfig {
        eta: 0.25,
        iters: 300,
        n: 20,
        n_h: 5,
    };
    let t = sag_run(&p, &start(2), &cfg, &mut RunContext::new(6)).unwrap();
    for (a, b) in t.theta.iter().zip(&target) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn iterates_respect_box_bounds(seed in 0u64..1000, lo in -1.0f64..0.5, eta in 0.05f64..2.0) {
        let p = noisy(3);
        let t0 = DesignVector::with_uniform_bounds(vec![0.6; 3], lo, 0.7).unwrap();
        let bf = BfSagConfig { eta, iters: 15, n: 12, n_l: 4, n_h: 2 };
        let a = bfsag_run(&p, &t0, &bf, &mut RunContext::new(seed)).unwrap();
        let sv = BfSvrgConfig {
            eta,
            outer: 3,
            inner: 4,
            n_l: 6,
            n_h: 3,
            alpha_mode: AlphaMode::DiagonalCorrected,
            anchor: AnchorMode::Sampled,
        };
        let b = bfsvrg_run(&p, &t0, &sv, &mut RunContext::new(seed)).unwrap();
        for tr in [&a, &b] {
            for r in tr.all_records() {
                let th = r.theta.as_ref().unwrap();
                prop_assert!(th.iter().all(|&v| v >= lo && v <= 0.7));
            }
        }
    }

    #[test]
    fn ledger_counts_match_closed_forms(iters in 1usize..20, n_l in 0usize..6, n_h in 1usize..6) {
        let p = noisy(2).with_gamma(0.096);
        let cfg = BfSagConfig { eta: 0.1, iters, n: 12, n_l, n_h };
        let t = bfsag_run(&p, &start(2), &cfg, &mut RunContext::new(1)).unwrap();
        prop_assert_eq!(t.last().cum_cost, bifidelity::cost::cost_bfsag(iters, n_h, n_l, 0.096));
    }
}
