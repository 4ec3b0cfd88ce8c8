mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use spectral_transfer::filters::{
    apply_contour, apply_entire, apply_generic, apply_holomorphic, cross_spectral_lipschitz, filter_norm_bound,
    ContourSpec, EntireFilter, Filter, FilterFile, GenericFilter, GenericRule, HolFilter, NormContext,
};
use spectral_transfer::scalar::{CMatrix, C};
use spectral_transfer::{characteristic_operator, DenseOperator, OperatorKind, WeightedGraph};

fn operator(seed: u64, n: usize, kind: OperatorKind) -> (WeightedGraph<f64>, DenseOperator<f64>) {
    let g = random_graph(&mut rng(seed, 0), n);
    let t = characteristic_operator(&g, kind).unwrap();
    (g, t)
}

#[test]
fn table_filter_reads_listed_points_only() {
    let g = GenericFilter {
        rule: GenericRule::Table(vec![(c(0.0, 0.0), c(1.0, 0.0)), (c(2.0, 0.0), c(-1.0, 0.5))]),
        lipschitz_hint: None,
    };
    assert_eq!(g.eval(c(2.0, 0.0)).unwrap(), c(-1.0, 0.5));
    assert!(g.eval(c(1.0, 0.0)).is_err());
}

#[test]
fn filter_files_round_trip() {
    let mut r = rng(9, 0);
    let filters = [
        Filter::Entire(random_entire(&mut r, 4)),
        Filter::Hol(random_hol(&mut r, c(-1.0, 0.0), 4)),
        Filter::Cont(random_cont(&mut r, c(0.0, 1.0))),
    ];
    for f in &filters {
        let file = FilterFile::from_filter(f).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        let back: Filter<f64> = serde_json::from_str::<FilterFile>(&text).unwrap().build().unwrap();
        for z in [c(0.3, 0.1), c(2.0, -1.0), c(-0.2, 0.7)] {
            assert!((f.eval(z).unwrap() - back.eval(z).unwrap()).norm() < 1e-14);
        }
    }
    assert!(FilterFile::from_filter(&Filter::Generic(random_generic(&mut r))).is_err());
}

#[test]
fn filter_file_accepts_bare_reals_and_pairs() {
    let text = r#"{"kind": "hol", "omega": -1, "coeffs": [0.5, [0, 1]]}"#;
    let f: Filter<f64> = serde_json::from_str::<FilterFile>(text).unwrap().build().unwrap();
    // 0.5 + i/(z + 1) at z = 1
    assert!((f.eval(c(1.0, 0.0)).unwrap() - c(0.5, 0.5)).norm() < 1e-15);
}

#[test]
fn contour_reproduces_constant_and_identity_maps() {
    let (_, t) = operator(4, 7, OperatorKind::Laplacian);
    let contour = ContourSpec::around(&t.spectrum().unwrap()).unwrap();
    let one = apply_contour(&|_: C<f64>| c(1.0, 0.0), &t, &contour).unwrap();
    assert!(rel_diff(&one, &DenseOperator::identity(t.domain())) < 1e-10);
    let id = apply_contour(&|z: C<f64>| z, &t, &contour).unwrap();
    assert!(rel_diff(&id, &t) < 1e-10);
}

#[test]
fn contour_rejects_a_circle_missing_eigenvalues() {
    let (_, t) = operator(5, 6, OperatorKind::Laplacian);
    let small = ContourSpec::circle(c(0.0, 0.0), 1e-3).unwrap();
    assert!(apply_contour(&|z: C<f64>| z, &t, &small).is_err());
    assert!(ContourSpec::<f64>::new(c(0.0, 0.0), 1.0, 8).is_err());
}

#[test]
fn single_precision_agrees_with_double() {
    let g = random_graph(&mut rng(3, 0), 6);
    let g32 = WeightedGraph::<f32>::undirected(g.adjacency().map(|x| x as f32), g.mu().map(|x| x as f32)).unwrap();
    let t = characteristic_operator(&g, OperatorKind::NormalizedLaplacian).unwrap();
    let t32 = characteristic_operator(&g32, OperatorKind::NormalizedLaplacian).unwrap();
    let coeffs = [0.5, -0.25, 0.125];
    let a = apply_entire(&EntireFilter::new(coeffs.iter().map(|&x| c(x, 0.0)).collect()), &t).unwrap();
    let b = apply_entire(&EntireFilter::new(coeffs.iter().map(|&x| C::<f32>::new(x as f32, 0.0)).collect()), &t32)
        .unwrap();
    let diff = (a.matrix() - b.matrix().map(|z| C::new(z.re as f64, z.im as f64))).norm();
    assert!(diff < 1e-5, "{diff}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laurent_terms_are_powers_of_the_shifted_inverse(seed in any::<u64>(), n in 2usize..9, k in 1usize..5) {
        let mut r = rng(seed, 1);
        let directed = seed % 2 == 0;
        let g = if directed { random_digraph(&mut r, n) } else { random_graph(&mut r, n) };
        let t = characteristic_operator(&g, OperatorKind::Laplacian).unwrap();
        let omega = c(-r.random_range(0.5..2.0), r.random_range(-1.0..1.0));
        let mut coeffs = vec![c(0.0, 0.0); k + 1];
        coeffs[k] = c(1.0, 0.0);
        let got = apply_holomorphic(&HolFilter::new(omega, coeffs), &t).unwrap();

        // k successive solves against T − ω
        let shifted = t.matrix() - CMatrix::<f64>::identity(n, n) * omega;
        let lu = shifted.lu();
        let mut expect = CMatrix::<f64>::identity(n, n);
        for _ in 0..k {
            expect = lu.solve(&expect).unwrap();
        }
        let err = (got.matrix() - &expect).norm() / expect.norm();
        prop_assert!(err <= 1e-10, "err {err}");
    }

    #[test]
    fn generic_norm_is_the_spectral_maximum(seed in any::<u64>(), n in 2usize..10, k in 0usize..3) {
        let kind = [OperatorKind::Adjacency, OperatorKind::Laplacian, OperatorKind::NormalizedLaplacian][k];
        let (_, t) = operator(seed, n, kind);
        let g = random_generic(&mut rng(seed, 2));
        let s = t.spectrum().unwrap();
        let max = s.eigenvalues.iter().map(|&l| g.eval(l).unwrap().norm()).fold(0.0, f64::max);
        let norm = apply_generic(&g, &t, Some(&s)).unwrap().op_norm();
        prop_assert!((norm - max).abs() <= 1e-9 * (1.0 + max));
        let bound = filter_norm_bound(&Filter::Generic(g), NormContext::Spectrum(&s)).unwrap();
        prop_assert!((bound - max).abs() <= 1e-12 * (1.0 + max));
    }

    #[test]
    fn frobenius_perturbation_is_controlled_by_cross_lipschitz(seed in any::<u64>(), n in 2usize..9, family in 0usize..3) {
        let mut r = rng(seed, 3);
        let g = random_graph(&mut r, n);
        let g2 = perturb_weights(&mut r, &g, 0.3);
        let x = characteristic_operator(&g, OperatorKind::Laplacian).unwrap();
        let y = characteristic_operator(&g2, OperatorKind::Laplacian).unwrap();
        let j = random_map(&mut r, &g2, &g);
        let f = filter_of_family(&mut r, [0, 2, 3][family], c(-1.0, 0.0));
        let (sx, sy) = (x.spectrum().unwrap(), y.spectrum().unwrap());
        let d = cross_spectral_lipschitz(&f, &sx.eigenvalues, &sy.eigenvalues).unwrap();
        let gx = f.apply(&x, Some(&sx)).unwrap();
        let gy = f.apply(&y, Some(&sy)).unwrap();
        let lhs = gx.compose(&j).unwrap().minus(&j.compose(&gy).unwrap()).unwrap().frobenius_norm();
        let rhs = x.compose(&j).unwrap().minus(&j.compose(&y).unwrap()).unwrap().frobenius_norm();
        prop_assert!(lhs <= d * rhs * (1.0 + 1e-9) + 1e-12, "{lhs} > {d} * {rhs}");
    }

    #[test]
    fn entire_bound_dominates_norm_on_digraphs(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed, 4);
        let g = random_digraph(&mut r, n);
        let t = characteristic_operator(&g, OperatorKind::Laplacian).unwrap();
        let f = Filter::Entire(random_entire(&mut r, 4));
        let norm = f.apply(&t, None).unwrap().op_norm();
        let bound = filter_norm_bound(&f, NormContext::Operator(&t)).unwrap();
        prop_assert!(norm <= bound * (1.0 + 1e-10));
    }
}
