//! Property tests for operator invariants.

mod common;

use genmix::genericdomain::{build_mixup_dataset, edge_mixup, sobel_edges, EdgeParams, MixupConfig, MixupProduct};
use genmix::metrics::{estimate_dh, fit_domain_classifier, DomainClassifierConfig};
use genmix::numerics::mix::convex_mix_slice;
use genmix::numerics::{optimizer_step, seeded_rng, value_and_grad, LossSpec, OptimizerConfig, OptimizerState, Tensor};
use genmix::sfda::{ModelConfig, SfdaModel};
use genmix::synthdata::PayloadKind;
use genmix::theoremlab::{verify_theorem1, Gaussian1d, TheoremSetup};
use proptest::prelude::*;

use common::{bits, small_shapes};

const KIND: PayloadKind = PayloadKind::Image {
    height: 16,
    width: 16,
    channels: 3,
};

fn image() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, KIND.len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mixup_stays_between_its_endpoints(
        x in prop::collection::vec(-10.0f64..10.0, 1..64),
        shift in prop::collection::vec(-10.0f64..10.0, 64),
        lambda in 0.0f64..=1.0,
    ) {
        let g: Vec<f64> = x.iter().zip(&shift).map(|(a, s)| a + s).collect();
        let m = convex_mix_slice(&x, &g, lambda);
        for ((a, b), v) in x.iter().zip(&g).zip(&m) {
            prop_assert!(a.min(*b) <= *v && *v <= a.max(*b));
        }
    }

    #[test]
    fn edge_mixup_is_convex_with_exact_endpoints(x in image(), lambda in 0.0f64..=1.0) {
        let params = EdgeParams::default();
        let e = sobel_edges(&x, KIND, &params).unwrap();
        let m = edge_mixup(&x, KIND, lambda, &params).unwrap();
        for ((a, b), v) in x.iter().zip(&e).zip(&m) {
            prop_assert!(a.min(*b) <= *v && *v <= a.max(*b));
        }
        prop_assert_eq!(bits(&edge_mixup(&x, KIND, 0.0, &params).unwrap()), bits(&x));
        prop_assert_eq!(bits(&edge_mixup(&x, KIND, 1.0, &params).unwrap()), bits(&e));
    }

    #[test]
    fn gradients_and_steps_are_pure(seed in 0u64..500, lr in 1e-4f64..1e-1) {
        let (source, _, _) = small_shapes(seed % 3);
        let model = SfdaModel::init(&ModelConfig::default(), source.payload_kind, 4, &mut seeded_rng(seed)).unwrap();
        let x = model.inputs(&source).unwrap();
        let labels = source.labels().unwrap();
        let loss = LossSpec::CrossEntropy { labels: &labels, smoothing: 0.1 };
        let a = value_and_grad(&model.net, &x, None, &loss).unwrap();
        let b = value_and_grad(&model.net, &x, None, &loss).unwrap();
        prop_assert_eq!(&a, &b);
        let cfg = OptimizerConfig::adam(lr);
        let step = |grads: &[Tensor]| {
            let mut m = model.net.clone();
            let mut state = OptimizerState::new();
            let mut params = m.params_mut(genmix::numerics::ParamGroup::All);
            optimizer_step(&mut params, grads, &mut state, &cfg).unwrap();
            m
        };
        prop_assert_eq!(step(&a.grads), step(&b.grads));
    }

    #[test]
    fn divergence_is_symmetric_under_role_swap(shift in 0.0f64..3.0, seed in 0u64..100) {
        let mut rng = seeded_rng(seed);
        let mut draw = |m: f64| {
            use rand::Rng as _;
            let data = (0..400 * 2).map(|_| m + rng.random_range(-1.0..1.0)).collect();
            Tensor::new(vec![400, 2], data).unwrap()
        };
        let (a, b, ea, eb) = (draw(0.0), draw(shift), draw(0.0), draw(shift));
        let cfg = DomainClassifierConfig { seed, ..DomainClassifierConfig::default() };
        let ab = estimate_dh(&fit_domain_classifier(&a, &b, &cfg).unwrap(), &ea, &eb).unwrap();
        let ba = estimate_dh(&fit_domain_classifier(&b, &a, &cfg).unwrap(), &eb, &ea).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - ba).abs() <= 0.05, "{} vs {}", ab, ba);
    }
}

#[test]
fn mixup_preserves_labels() {
    let (source, _, _) = small_shapes(1);
    for lambda in [0.0, 0.3, 1.0] {
        let MixupProduct::Materialized(m) = build_mixup_dataset(&source, &MixupConfig::edge(lambda), 0, false).unwrap()
        else {
            panic!("edge mode materializes");
        };
        assert_eq!(m.labels().unwrap(), source.labels().unwrap());
        assert_eq!(m.role, source.role.mixup());
    }
}

#[test]
fn theorem_endpoints_match_the_original_and_generic_divergences() {
    let report = verify_theorem1(&TheoremSetup {
        lambdas: vec![0.0, 1.0],
        samples: 50_000,
        ..TheoremSetup::default()
    })
    .unwrap();
    assert_eq!(report.rows[0].dh_mix, report.dh_orig);
    assert!(report.rows[1].dh_mix < 0.02, "{}", report.rows[1].dh_mix);
}

#[test]
fn inequality_holds_on_randomized_gaussian_setups() {
    let mut checked = 0;
    for seed in 0..12u64 {
        let sd = 0.1 + 0.02 * seed as f64;
        let setup = TheoremSetup {
            source: Gaussian1d::new(-2.0 - 0.2 * seed as f64, sd),
            target: Gaussian1d::new(2.0 + 0.1 * seed as f64, sd),
            source_generic: Gaussian1d::new(0.0, 0.5 + 0.1 * seed as f64),
            target_generic: Gaussian1d::new(0.0, 0.5 + 0.1 * seed as f64),
            samples: 20_000,
            seed,
            ..TheoremSetup::default()
        };
        let Ok(report) = verify_theorem1(&setup) else { continue };
        checked += 1;
        assert!(report.passed(), "seed {seed}: {}", report.summary());
    }
    assert!(checked >= 10, "{checked}");
}
