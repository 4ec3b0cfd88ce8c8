mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use spectral_transfer::coarsen::{collapse, scale_collapsed_block, CollapsePair};
use spectral_transfer::experiments::{collapse_base_graph, collapse_partition};
use spectral_transfer::filters::Filter;
use spectral_transfer::network::{
    aggregate, aggregate_distance, aggregation_constant, layer_constant_b, BoundMode, ConnectingOp, FeatureBundle,
    Layer, Network, Nonlinearity,
};
use spectral_transfer::sampling::{complex_gaussian, unit_bundle};
use spectral_transfer::stability::{
    aggregated_discrepancy, aggregation_k, graph_level_report, measure_commutation_defects,
    output_aggregation_constant, output_channels, signal_bound, transfer_bound, transfer_discrepancy,
    DefectSampling, FormulaTag, PerturbationSetting,
};
use spectral_transfer::{OperatorKind, SignalSpace};

fn bundle(seed: u64, index: u64, space: &SignalSpace<f64>, k: usize) -> FeatureBundle<f64> {
    unit_bundle(&mut rng(seed, index), space, k)
}

fn collapsed(delta: f64) -> CollapsePair<f64> {
    let p = collapse_partition();
    let fine = scale_collapsed_block(&collapse_base_graph(), &p, delta).unwrap();
    collapse(&fine, &p).unwrap()
}

/// One-layer networks on the coarse and fine Laplacians sharing a Laurent bank.
fn collapsed_pair(pair: &CollapsePair<f64>, rho: Nonlinearity, seed: u64) -> (Network<f64>, Network<f64>) {
    let (t, t2) = pair.operators(OperatorKind::Laplacian).unwrap();
    let mut r = rng(seed, 5);
    let filters: Vec<Vec<Filter<f64>>> =
        (0..2).map(|_| vec![Filter::Hol(random_hol(&mut r, c(-1.0, 0.0), 3))]).collect();
    let net = Network::new(vec![Layer::new(t, filters.clone(), rho, ConnectingOp::Identity).unwrap()]).unwrap();
    let net2 = Network::new(vec![Layer::new(t2, filters, rho, ConnectingOp::Identity).unwrap()]).unwrap();
    (net, net2)
}

#[test]
fn modulus_commutes_with_nonnegative_maps_on_nonnegative_signals() {
    let pair = collapsed(1e-2);
    let (net, net2) = collapsed_pair(&pair, Nonlinearity::Modulus, 1);
    let maps = vec![pair.j.clone(); 2];
    let sampling = DefectSampling { nonnegative: true, ..Default::default() };
    let ids = measure_commutation_defects(&net, &net2, maps.clone(), &sampling).unwrap();
    assert!(ids.delta1[0] < 1e-12, "{}", ids.delta1[0]);
    assert_eq!(ids.delta2[0], 0.0);
    let complex = measure_commutation_defects(&net, &net2, maps, &DefectSampling::default()).unwrap();
    assert!(complex.delta1[0] > 1e-3);
}

#[test]
fn defect_harness_rejects_wrong_map_count() {
    let pair = collapsed(1e-2);
    let (net, net2) = collapsed_pair(&pair, Nonlinearity::Identity, 2);
    assert!(measure_commutation_defects(&net, &net2, vec![pair.j.clone()], &DefectSampling::default()).is_err());
    assert!(measure_commutation_defects(&net, &net2, vec![pair.jt.clone(); 2], &DefectSampling::default()).is_err());
}

#[test]
fn reports_recompute_to_their_bound() {
    for seed in 0..20 {
        let net = random_network(seed);
        let report = signal_bound(&net, BoundMode::Auto).unwrap();
        assert_eq!(report.tag, FormulaTag::Signal);
        assert!((report.bound - report.recompute()).abs() <= 1e-12 * report.bound.max(1.0));
    }
    let pair = collapsed(1e-2);
    let (net, net2) = collapsed_pair(&pair, Nonlinearity::Relu, 3);
    let ids = measure_commutation_defects(&net, &net2, vec![pair.j.clone(); 2], &DefectSampling::default()).unwrap();
    let omega = c(-1.0, 0.0);
    let report =
        transfer_bound(&net, &net2, &ids, PerturbationSetting::Structural { omega }, BoundMode::Auto, 1.0).unwrap();
    assert_eq!(report.bound, report.recompute());
    let json = serde_json::to_string(&report).unwrap();
    assert_eq!(serde_json::from_str::<spectral_transfer::stability::BoundReport>(&json).unwrap(), report);
}

#[test]
fn graph_level_bound_covers_aggregated_discrepancy() {
    for (i, delta) in [1e-3, 3e-3, 1e-2, 3e-2, 1e-1].into_iter().enumerate() {
        let pair = collapsed(delta);
        let (net, net2) = collapsed_pair(&pair, Nonlinearity::Identity, i as u64);
        let maps = vec![pair.j.clone(); 2];
        let ids = measure_commutation_defects(&net, &net2, maps.clone(), &DefectSampling::default()).unwrap();
        let setting = PerturbationSetting::Structural { omega: c(-1.0, 0.0) };
        let transfer = transfer_bound(&net, &net2, &ids, setting, BoundMode::Auto, 1.0).unwrap();
        for p in [2.0, 3.0, 4.0] {
            for s in 0..10 {
                let f = bundle(i as u64, s, net.input_space(), net.k_in());
                let outputs = output_channels(&net, &f).unwrap();
                let k = aggregation_k(&pair.j, &outputs, p, transfer.perturbation);
                let report = graph_level_report(&transfer, k, output_aggregation_constant(&net2, p));
                let measured = aggregated_discrepancy(&net, &net2, &maps, &f, p).unwrap();
                assert!(measured <= report.bound * (1.0 + 1e-9), "delta {delta} p {p}: {measured} > {}", report.bound);
                assert!(transfer_discrepancy(&net, &net2, &maps, &f).unwrap() <= transfer.bound * (1.0 + 1e-9));
            }
        }
    }
}

#[test]
fn connecting_map_lipschitz_is_its_operator_norm() {
    let mut r = rng(7, 0);
    let (a, b) = (random_graph(&mut r, 5), random_graph(&mut r, 8));
    let p = random_map(&mut r, &a, &b);
    let op = ConnectingOp::Linear(p.clone());
    assert_eq!(op.lipschitz(), p.op_norm());
    for i in 0..50 {
        let v = complex_gaussian(&mut rng(7, i + 1), 5);
        assert!(b.space().norm(&op.apply_vec(&v)) <= op.lipschitz() * a.space().norm(&v) * (1.0 + 1e-12));
    }
    assert_eq!(ConnectingOp::<f64>::Identity.lipschitz(), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn networks_map_zero_to_zero(seed in 0u64..10_000) {
        let net = random_network(seed);
        let out = net.forward(&FeatureBundle::zeros(net.input_space(), net.k_in())).unwrap();
        prop_assert_eq!(out.norm(), 0.0);
        prop_assert_eq!(out.len(), net.k_out());
    }

    #[test]
    fn nonlinearities_fix_zero_and_respect_their_constant(re in -5.0..5.0f64, im in -5.0..5.0f64, re2 in -5.0..5.0f64, im2 in -5.0..5.0f64) {
        for rho in NONLINEARITIES {
            prop_assert_eq!(rho.apply(c(0.0, 0.0)), c(0.0, 0.0));
            let (z, w) = (c(re, im), c(re2, im2));
            let l: f64 = rho.lipschitz();
            prop_assert!((rho.apply(z) - rho.apply(w)).norm() <= l * (z - w).norm() * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn linear_part_is_bounded_by_bank_constant(seed in 0u64..10_000) {
        let net = random_network(seed);
        let mut input = bundle(seed, 100, net.input_space(), net.k_in());
        let mut other = bundle(seed, 101, net.input_space(), net.k_in());
        for layer in net.layers() {
            let b = layer_constant_b(layer, BoundMode::Auto).unwrap().value;
            let r: f64 = layer.connecting().lipschitz();
            let diff = layer.linear_part(&input).unwrap().minus(&layer.linear_part(&other).unwrap()).unwrap().norm();
            prop_assert!(diff <= b * r * input.minus(&other).unwrap().norm() * (1.0 + 1e-9) + 1e-14);
            input = layer.forward(&input).unwrap();
            other = layer.forward(&other).unwrap();
        }
    }

    #[test]
    fn network_is_lipschitz_with_the_signal_bound(seed in 0u64..10_000) {
        let net = random_network(seed);
        let bound = signal_bound(&net, BoundMode::Auto).unwrap().bound;
        let f = bundle(seed, 200, net.input_space(), net.k_in());
        let h = bundle(seed, 201, net.input_space(), net.k_in()).scaled(0.3);
        let out = net.forward(&f).unwrap().minus(&net.forward(&h).unwrap()).unwrap().norm();
        prop_assert!(out <= bound * f.minus(&h).unwrap().norm() * (1.0 + 1e-9) + 1e-14);
    }

    #[test]
    fn aggregation_is_contractive_up_to_its_constant(seed in 0u64..10_000, p in 2.0..6.0f64) {
        let net = random_network(seed);
        let space = net.output_space();
        let k = net.k_out();
        let a = bundle(seed, 300, space, k);
        let b = bundle(seed, 301, space, k).scaled(rng(seed, 302).random_range(0.0..2.0));
        let dist = aggregate_distance(&aggregate(&a, p).unwrap(), &aggregate(&b, p).unwrap());
        let c = aggregation_constant(space, p);
        prop_assert!(dist <= c * a.minus(&b).unwrap().norm() * (1.0 + 1e-12));
        if space.min_weight() >= 1.0 {
            prop_assert_eq!(c, 1.0);
        }
    }
}

#[test]
fn aggregation_rejects_small_exponents() {
    let net = random_network(1);
    let f = bundle(1, 0, net.output_space(), 1);
    assert!(aggregate(&f, 1.5).is_err());
}
