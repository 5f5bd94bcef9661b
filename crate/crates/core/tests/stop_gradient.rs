//! Feature mixup with stop-gradient must behave as if `z_g` were a constant.

mod common;

use genmix::genericdomain::{build_mixup_dataset, MixupConfig, MixupProduct};
use genmix::numerics::{seeded_rng, value_and_grad, FeatureMixing, GenericBranch, LossSpec, Tensor};
use genmix::sfda::{MixedInputs, ModelConfig, SfdaModel};

use common::{bits, small_shapes};

fn setup(stop_gradient: bool) -> (SfdaModel, MixedInputs, Vec<usize>) {
    let (source, _, _) = small_shapes(3);
    let cfg = ModelConfig::default();
    let model = SfdaModel::init(&cfg, source.payload_kind, 4, &mut seeded_rng(9)).unwrap();
    let mix = MixupConfig {
        stop_gradient,
        ..MixupConfig::feature(0.3)
    };
    let inputs = MixedInputs::build(&source, &mix, cfg.conv_stem, 21).unwrap();
    (model, inputs, source.labels().unwrap())
}

#[test]
fn detached_gradients_equal_constant_substitution_bitwise() {
    let (model, inputs, labels) = setup(true);
    let idx: Vec<usize> = (0..16).collect();
    let y: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
    let loss = LossSpec::CrossEntropy {
        labels: &y,
        smoothing: 0.1,
    };
    let trained = inputs.grad(&model.net, &idx, &loss).unwrap();

    let producer = inputs.producer.as_ref().unwrap();
    let batch = producer.batch(&model.net, &idx).unwrap();
    // A fresh tensor built from raw values: nothing links it to the model.
    let constant = Tensor::new(batch.z_g.shape().to_vec(), batch.z_g.data().to_vec()).unwrap();
    let substituted = value_and_grad(
        &model.net,
        &producer.view_batch(0, &idx).unwrap(),
        Some(FeatureMixing {
            generic: GenericBranch::Detached(&constant),
            lambda: 0.3,
        }),
        &loss,
    )
    .unwrap();

    assert_eq!(trained.loss.to_bits(), substituted.loss.to_bits());
    assert_eq!(trained.grads.len(), substituted.grads.len());
    for (a, b) in trained.grads.iter().zip(&substituted.grads) {
        assert_eq!(bits(a.data()), bits(b.data()));
    }
}

#[test]
fn live_branch_changes_backbone_gradients() {
    let (model, detached, labels) = setup(true);
    let (_, live, _) = setup(false);
    let idx: Vec<usize> = (0..16).collect();
    let y: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
    let loss = LossSpec::CrossEntropy {
        labels: &y,
        smoothing: 0.0,
    };
    let a = detached.grad(&model.net, &idx, &loss).unwrap();
    let b = live.grad(&model.net, &idx, &loss).unwrap();
    assert_eq!(a.loss.to_bits(), b.loss.to_bits(), "forward values agree");
    let nb = model.net.num_backbone_params();
    assert!(a.grads[..nb].iter().zip(&b.grads[..nb]).any(|(x, y)| x != y));
    for (x, y) in a.grads[nb..].iter().zip(&b.grads[nb..]) {
        assert_eq!(
            bits(x.data()),
            bits(y.data()),
            "classifier gradients do not depend on the branch"
        );
    }
}

#[test]
fn producer_views_start_with_the_original_inputs() {
    let (source, _, _) = small_shapes(4);
    let MixupProduct::Features(p) = build_mixup_dataset(&source, &MixupConfig::feature(0.5), 1, true).unwrap() else {
        panic!("feature mode yields a producer");
    };
    let x = genmix::sfda::dataset_inputs(&source, true).unwrap();
    let all: Vec<usize> = (0..source.len()).collect();
    assert_eq!(bits(p.view_batch(0, &all).unwrap().data()), bits(x.data()));
    assert_eq!(p.k(), 5);
}
