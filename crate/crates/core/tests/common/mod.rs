#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use spectral_transfer::filters::{ContFilter, EntireFilter, Filter, GenericFilter, HolFilter};
use spectral_transfer::sampling::derived_rng;
use spectral_transfer::scalar::{cplx, cre, CMatrix, C};
use spectral_transfer::{DenseOperator, WeightedGraph};

pub fn rng(seed: u64, index: u64) -> ChaCha8Rng {
    derived_rng(seed, index)
}

fn connected_weights(rng: &mut impl Rng, n: usize, directed: bool) -> DMatrix<f64> {
    let mut w = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if !directed && j < i {
                w[(i, j)] = w[(j, i)];
                continue;
            }
            // a path through 0..n keeps everything connected
            let on_path = j == i + 1 || (directed && i == j + 1);
            if on_path || rng.random_bool(0.35) {
                w[(i, j)] = rng.random_range(0.2..2.0);
            }
        }
    }
    w
}

/// Connected undirected graph with random edge and node weights.
pub fn random_graph(rng: &mut impl Rng, n: usize) -> WeightedGraph<f64> {
    let w = connected_weights(rng, n, false);
    let mu = DVector::from_fn(n, |_, _| rng.random_range(0.5..2.0));
    WeightedGraph::undirected(w, mu).unwrap()
}

pub fn random_digraph(rng: &mut impl Rng, n: usize) -> WeightedGraph<f64> {
    let w = connected_weights(rng, n, true);
    let mu = DVector::from_fn(n, |_, _| rng.random_range(0.5..2.0));
    WeightedGraph::new(w, mu, true).unwrap()
}

/// Same graph with every existing edge weight scaled by a factor in `[1 − s, 1 + s]`.
pub fn perturb_weights(rng: &mut impl Rng, g: &WeightedGraph<f64>, s: f64) -> WeightedGraph<f64> {
    let n = g.n();
    let mut w = g.adjacency().clone();
    for i in 0..n {
        for j in 0..n {
            if g.is_directed() || j > i {
                if w[(i, j)] > 0.0 {
                    w[(i, j)] *= 1.0 + rng.random_range(-s..=s);
                }
                if !g.is_directed() {
                    w[(j, i)] = w[(i, j)];
                }
            }
        }
    }
    WeightedGraph::new(w, g.mu().clone(), g.is_directed()).unwrap()
}

pub fn c(re: f64, im: f64) -> C<f64> {
    cplx(re, im)
}

fn coeff(rng: &mut impl Rng, scale: f64) -> C<f64> {
    c(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

pub fn random_entire(rng: &mut impl Rng, max_order: usize) -> EntireFilter<f64> {
    let order = rng.random_range(1..=max_order);
    EntireFilter::new((0..=order).map(|_| coeff(rng, 1.0)).collect())
}

pub fn random_hol(rng: &mut impl Rng, omega: C<f64>, max_order: usize) -> HolFilter<f64> {
    let order = rng.random_range(1..=max_order);
    HolFilter::new(omega, (0..=order).map(|_| coeff(rng, 1.0)).collect())
}

pub fn random_cont(rng: &mut impl Rng, omega: C<f64>) -> ContFilter<f64> {
    let terms = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)];
    ContFilter::new(omega, terms.iter().map(|&k| (k, coeff(rng, 1.0))).collect())
}

/// Smooth bounded spectral map with a known Lipschitz constant on the real line.
pub fn random_generic(rng: &mut impl Rng) -> GenericFilter<f64> {
    let a: f64 = rng.random_range(-1.0..1.0);
    let s: f64 = rng.random_range(0.2..1.5);
    GenericFilter::from_fn(move |z: C<f64>| cre(a * (s * z.re).tanh()) + c(0.0, a * (s * z.im).sin()))
}

/// One filter from family `k % 4`: entire, Laurent, continuous, generic.
pub fn filter_of_family(rng: &mut impl Rng, k: usize, omega: C<f64>) -> Filter<f64> {
    match k % 4 {
        0 => Filter::Entire(random_entire(rng, 3)),
        1 => Filter::Hol(random_hol(rng, omega, 4)),
        2 => Filter::Cont(random_cont(rng, omega)),
        _ => Filter::Generic(random_generic(rng)),
    }
}

/// Random complex matrix between two weighted spaces with operator norm about one.
pub fn random_map(rng: &mut impl Rng, from: &WeightedGraph<f64>, to: &WeightedGraph<f64>) -> DenseOperator<f64> {
    let (n, m) = (to.n(), from.n());
    let scale = 1.0 / ((n + m) as f64).sqrt();
    let a = CMatrix::<f64>::from_fn(n, m, |_, _| coeff(rng, scale));
    DenseOperator::new(a, from.space(), to.space()).unwrap()
}

pub fn rel_diff(a: &DenseOperator<f64>, b: &DenseOperator<f64>) -> f64 {
    (a.matrix() - b.matrix()).norm() / b.matrix().norm().max(1.0)
}

/// Ranks with ties averaged.
pub fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx).powi(2);
        syy += (ry[i] - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

use spectral_transfer::network::{ConnectingOp, Layer, Network, Nonlinearity};
use spectral_transfer::OperatorKind;

pub const NONLINEARITIES: [Nonlinearity; 4] = [
    Nonlinearity::Identity,
    Nonlinearity::Modulus,
    Nonlinearity::Relu,
    Nonlinearity::ShiftedSigmoid,
];

const KINDS: [OperatorKind; 3] = [
    OperatorKind::Adjacency,
    OperatorKind::Laplacian,
    OperatorKind::NormalizedLaplacian,
];

/// Random network with at most 3 layers, 4 channels and 12 nodes.
///
/// Three in four networks live on undirected graphs and mix all filter
/// families; the rest use a directed Laplacian with entire-only or
/// Laurent-only banks so the non-normal bounds get exercised.
pub fn random_network(seed: u64) -> Network<f64> {
    let mut rng = rng(seed, 0);
    let depth = rng.random_range(1..=3);
    let directed = rng.random_bool(0.25);
    let mut k_in = rng.random_range(1..=4);
    let first_n = rng.random_range(3..=12);
    let mut graph = if directed {
        random_digraph(&mut rng, first_n)
    } else {
        random_graph(&mut rng, first_n)
    };
    let entire_only = rng.random_bool(0.5);
    let mut family = rng.random_range(0..4usize);
    let mut layers = Vec::with_capacity(depth);
    for n in 0..depth {
        let mut connecting = ConnectingOp::Identity;
        if n > 0 && !directed && rng.random_bool(0.5) {
            let size = rng.random_range(3..=12);
            let next = random_graph(&mut rng, size);
            connecting = ConnectingOp::Linear(random_map(&mut rng, &graph, &next));
            graph = next;
        }
        let kind = if directed { OperatorKind::Laplacian } else { KINDS[rng.random_range(0..3)] };
        let omega = if kind == OperatorKind::Adjacency { c(0.0, 1.0) } else { c(-1.0, 0.0) };
        let k_out = rng.random_range(1..=4);
        let filters = (0..k_out)
            .map(|_| {
                (0..k_in)
                    .map(|_| {
                        family += 1;
                        if directed {
                            if entire_only {
                                Filter::Entire(random_entire(&mut rng, 3))
                            } else {
                                Filter::Hol(random_hol(&mut rng, omega, 4))
                            }
                        } else {
                            filter_of_family(&mut rng, family, omega)
                        }
                    })
                    .collect()
            })
            .collect();
        let rho = NONLINEARITIES[rng.random_range(0..4)];
        layers.push(Layer::bind(&graph, kind, filters, rho, connecting).unwrap());
        k_in = k_out;
    }
    Network::new(layers).unwrap()
}
