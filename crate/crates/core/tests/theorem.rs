//! Monte-Carlo theorem checks against closed-form normal-CDF oracles.

use std::time::Instant;

use genmix::theoremlab::{
    direct_positive_count, exact_case_decomposition, verify_theorem1, Gaussian1d, Independence, LinearFd, TheoremSetup,
    PERFECT_SEPARATION,
};
use genmix::Error;
use rand::Rng as _;
use statrs::distribution::{ContinuousCDF, Normal};

/// `d_H` of the symmetric mixed pair under the threshold at 0, which is the
/// optimal linear classifier for two equal-variance Gaussians at `±m`.
fn oracle_dh_mix(lambda: f64) -> f64 {
    let mean = 2.0 * (1.0 - lambda);
    let sd = (lambda * lambda * 1.0 + (1.0 - lambda) * (1.0 - lambda) * 0.25 * 0.25).sqrt();
    let phi = Normal::new(0.0, 1.0).unwrap().cdf(mean / sd);
    2.0 * phi - 1.0
}

#[test]
fn oracle_reproduces_the_reference_value() {
    assert!((oracle_dh_mix(0.5) - 0.9476).abs() < 5e-4, "{}", oracle_dh_mix(0.5));
}

#[test]
fn reference_setup_passes_and_matches_the_oracle() {
    let t = Instant::now();
    let report = verify_theorem1(&TheoremSetup::default()).unwrap();
    let elapsed = t.elapsed().as_secs_f64();
    assert!(report.passed(), "{}", report.summary());
    assert_eq!(report.rows.len(), 9);
    for r in &report.rows {
        assert!(
            (r.dh_mix - oracle_dh_mix(r.lambda)).abs() < 0.01,
            "lambda {} mc {} oracle {}",
            r.lambda,
            r.dh_mix,
            oracle_dh_mix(r.lambda)
        );
        assert!(r.dh_mix <= report.dh_orig + 3.0 * (r.stderr.powi(2) + report.dh_orig_stderr.powi(2)).sqrt());
    }
    let half = report.rows.iter().find(|r| r.lambda == 0.5).unwrap();
    assert!((half.dh_mix - 0.9476).abs() < 0.01);
    assert!(elapsed < 10.0, "took {elapsed:.2} s");
}

#[test]
fn overlapping_domains_violate_perfect_separation() {
    let setup = TheoremSetup {
        source: Gaussian1d::new(-2.0, 2.0),
        target: Gaussian1d::new(2.0, 2.0),
        samples: 20_000,
        ..TheoremSetup::default()
    };
    match verify_theorem1(&setup) {
        Err(Error::Assumption { assumption, .. }) => assert_eq!(assumption, PERFECT_SEPARATION),
        other => panic!("expected an assumption error, got {other:?}"),
    }
}

#[test]
fn lambda_zero_grid_is_a_trivial_pass() {
    let setup = TheoremSetup {
        lambdas: vec![0.0],
        samples: 20_000,
        ..TheoremSetup::default()
    };
    let report = verify_theorem1(&setup).unwrap();
    assert!(report.passed());
    assert_eq!(report.rows[0].dh_mix, report.dh_orig);
}

fn random_setup(seed: u64) -> TheoremSetup {
    let mut rng = genmix::numerics::seeded_rng(seed);
    let gap = rng.random_range(2.0..5.0);
    let sd = rng.random_range(0.1..0.4);
    let g_sd = rng.random_range(0.5..2.0);
    TheoremSetup {
        source: Gaussian1d::new(-gap, sd),
        target: Gaussian1d::new(gap + rng.random_range(-0.5..0.5), sd * rng.random_range(0.8..1.2)),
        source_generic: Gaussian1d::new(0.0, g_sd),
        target_generic: Gaussian1d::new(0.0, g_sd),
        independence: if seed % 2 == 0 {
            Independence::Independent
        } else {
            Independence::Paired
        },
        samples: 20_000,
        seed,
        ..TheoremSetup::default()
    }
}

#[test]
fn case_table_matches_direct_count_on_randomized_setups() {
    let t = Instant::now();
    for seed in 0..10 {
        let setup = random_setup(seed);
        let mut rng = genmix::numerics::seeded_rng(seed + 100);
        let f_d = LinearFd {
            weight: rng.random_range(0.5..2.0),
            bias: rng.random_range(-0.5..0.5),
        };
        let z = setup.source.sample(setup.samples, seed, "z").unwrap();
        let z_g = setup.source_generic.sample(setup.samples, seed, "z_g").unwrap();
        for &lambda in &setup.lambdas {
            let cases = exact_case_decomposition(&z_g, &z, lambda, &f_d).unwrap();
            let direct = direct_positive_count(&z_g, &z, lambda, &f_d).unwrap();
            assert_eq!(cases.positive(), direct, "seed {seed} lambda {lambda}");
            assert_eq!(cases.total(), setup.samples as u64);
        }
    }
    assert!(t.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn monotone_interpretation_holds_on_the_regression_suite() {
    let mut checked = 0;
    for seed in 0..8 {
        let setup = random_setup(seed);
        let report = match verify_theorem1(&setup) {
            Ok(r) => r,
            Err(Error::Assumption { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        checked += 1;
        for a in report.assertions.iter().filter(|a| a.name != "dH_mix_le_dH_orig") {
            assert!(a.pass, "seed {seed}: {} at {}: {}", a.name, a.lambda, a.detail);
        }
    }
    assert!(checked >= 4, "only {checked} setups met the assumptions");
}
