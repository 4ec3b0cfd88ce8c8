//! Weighted graphs, the weighted signal space ℓ²(G) and characteristic operators.
//!
//! The energy of a signal is defined through the operator, `E(u) = ⟨u, Δu⟩`.
//! Summing `W_gh |u(g) − u(h)|²` over *ordered* pairs gives twice that value;
//! the operator form is the one used everywhere in this crate.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::DenseOperator;
use crate::scalar::{cre, lit, to_f64, CMatrix, CVector, Real, C};

/// Node weights `μ` shared between a graph, its signals and its operators.
///
/// Two spaces compare equal when they share storage or hold identical weights.
#[derive(Clone, Debug)]
pub struct SignalSpace<R: Real> {
    mu: Arc<DVector<R>>,
}

impl<R: Real> PartialEq for SignalSpace<R> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.mu, &other.mu) || *self.mu == *other.mu
    }
}

impl<R: Real> SignalSpace<R> {
    pub fn new(mu: DVector<R>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidGraph("empty node-weight vector".into()));
        }
        if let Some(i) = mu.iter().position(|m| !(*m > R::zero()) || !m.is_finite()) {
            return Err(Error::InvalidGraph(format!(
                "node weight mu[{i}] = {} is not strictly positive",
                to_f64(mu[i])
            )));
        }
        Ok(Self { mu: Arc::new(mu) })
    }

    /// Unit weights on `n` nodes.
    pub fn uniform(n: usize) -> Self {
        Self {
            mu: Arc::new(DVector::from_element(n.max(1), R::one())),
        }
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn weights(&self) -> &DVector<R> {
        &self.mu
    }

    /// `⟨a, b⟩ = Σ conj(a_i) b_i μ_i` on raw coefficient vectors.
    pub fn inner(&self, a: &CVector<R>, b: &CVector<R>) -> C<R> {
        let mut acc = C::new(R::zero(), R::zero());
        for i in 0..self.dim() {
            acc += a[i].conj() * b[i] * cre(self.mu[i]);
        }
        acc
    }

    pub fn norm(&self, a: &CVector<R>) -> R {
        let mut acc = R::zero();
        for i in 0..self.dim() {
            acc += (a[i].re * a[i].re + a[i].im * a[i].im) * self.mu[i];
        }
        acc.sqrt()
    }

    /// Weighted `p`-norm `(Σ |a_i|^p μ_i)^{1/p}`.
    pub fn p_norm(&self, a: &CVector<R>, p: R) -> R {
        let mut acc = R::zero();
        for i in 0..self.dim() {
            let m = (a[i].re * a[i].re + a[i].im * a[i].im).sqrt();
            if m > R::zero() {
                acc += (m.ln() * p).exp() * self.mu[i];
            }
        }
        if acc > R::zero() {
            (acc.ln() / p).exp()
        } else {
            R::zero()
        }
    }

    pub fn min_weight(&self) -> R {
        self.mu.iter().copied().fold(self.mu[0], |a, b| if b < a { b } else { a })
    }

    pub(crate) fn sqrt_weights(&self) -> DVector<R> {
        self.mu.map(|m| m.sqrt())
    }
}

/// A signal on a graph, i.e. an element of ℓ²(G).
#[derive(Clone, Debug)]
pub struct Signal<R: Real> {
    values: CVector<R>,
    space: SignalSpace<R>,
}

impl<R: Real> Signal<R> {
    pub fn new(space: &SignalSpace<R>, values: CVector<R>) -> Result<Self> {
        if values.len() != space.dim() {
            return Err(Error::dim("signal", space.dim(), values.len()));
        }
        Ok(Self {
            values,
            space: space.clone(),
        })
    }

    /// Promotes a real vector.
    pub fn from_real(space: &SignalSpace<R>, values: &[R]) -> Result<Self> {
        Self::new(space, CVector::from_iterator(values.len(), values.iter().map(|&x| cre(x))))
    }

    pub fn zeros(space: &SignalSpace<R>) -> Self {
        Self {
            values: CVector::zeros(space.dim()),
            space: space.clone(),
        }
    }

    pub fn values(&self) -> &CVector<R> {
        &self.values
    }

    pub fn into_values(self) -> CVector<R> {
        self.values
    }

    pub fn space(&self) -> &SignalSpace<R> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> R {
        self.space.norm(&self.values)
    }
}

/// `⟨f, g⟩ = Σ conj(f_i) g_i μ_i`.
pub fn inner_product<R: Real>(f: &Signal<R>, g: &Signal<R>) -> Result<C<R>> {
    if f.space != g.space {
        return Err(Error::SpaceMismatch("inner product".into()));
    }
    Ok(f.space.inner(&f.values, &g.values))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Adjacency,
    Laplacian,
    #[serde(alias = "normalized_laplacian")]
    NormalizedLaplacian,
}

/// Node- and edge-weighted graph. `W[i][j]` is the weight of the edge `i → j`.
#[derive(Clone, Debug)]
pub struct WeightedGraph<R: Real> {
    adjacency: DMatrix<R>,
    space: SignalSpace<R>,
    directed: bool,
}

impl<R: Real> WeightedGraph<R> {
    pub fn new(adjacency: DMatrix<R>, mu: DVector<R>, directed: bool) -> Result<Self> {
        let n = adjacency.nrows();
        if adjacency.ncols() != n {
            return Err(Error::InvalidGraph(format!(
                "adjacency must be square, got {}x{}",
                n,
                adjacency.ncols()
            )));
        }
        if mu.len() != n {
            return Err(Error::dim("node weights", n, mu.len()));
        }
        for i in 0..n {
            for j in 0..n {
                let w = adjacency[(i, j)];
                if !(w >= R::zero()) || !w.is_finite() {
                    return Err(Error::InvalidGraph(format!(
                        "edge weight W[{i}][{j}] = {} must be finite and nonnegative",
                        to_f64(w)
                    )));
                }
                if i == j && w != R::zero() {
                    return Err(Error::InvalidGraph(format!("self-loop at node {i}")));
                }
                if !directed && w != adjacency[(j, i)] {
                    return Err(Error::InvalidGraph(format!(
                        "undirected graph has W[{i}][{j}] != W[{j}][{i}]"
                    )));
                }
            }
        }
        Ok(Self {
            adjacency,
            space: SignalSpace::new(mu)?,
            directed,
        })
    }

    pub fn undirected(adjacency: DMatrix<R>, mu: DVector<R>) -> Result<Self> {
        Self::new(adjacency, mu, false)
    }

    /// Undirected graph with unit node weights.
    pub fn unweighted_nodes(adjacency: DMatrix<R>) -> Result<Self> {
        let n = adjacency.nrows();
        Self::new(adjacency, DVector::from_element(n, R::one()), false)
    }

    pub fn n(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn adjacency(&self) -> &DMatrix<R> {
        &self.adjacency
    }

    pub fn mu(&self) -> &DVector<R> {
        self.space.weights()
    }

    pub fn space(&self) -> &SignalSpace<R> {
        &self.space
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Row sums of `W` (out-degrees).
    pub fn degrees(&self) -> DVector<R> {
        DVector::from_iterator(self.n(), self.adjacency.row_iter().map(|r| r.sum()))
    }

    /// Same edges, new node weights.
    pub fn with_mu(&self, mu: DVector<R>) -> Result<Self> {
        if mu.len() != self.n() {
            return Err(Error::dim("node weights", self.n(), mu.len()));
        }
        Ok(Self {
            adjacency: self.adjacency.clone(),
            space: SignalSpace::new(mu)?,
            directed: self.directed,
        })
    }

    /// Multiplies every edge weight by `s > 0`.
    pub fn scaled(&self, s: R) -> Result<Self> {
        Self::new(self.adjacency.scale(s), self.mu().clone(), self.directed)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        file.build()
    }

    pub fn to_file(&self) -> GraphFile {
        let n = self.n();
        let mut edges = Vec::new();
        for i in 0..n {
            let start = if self.directed { 0 } else { i + 1 };
            for j in start..n {
                let w = self.adjacency[(i, j)];
                if w != R::zero() {
                    edges.push((i, j, to_f64(w)));
                }
            }
        }
        GraphFile {
            n,
            mu: self.mu().iter().map(|&m| to_f64(m)).collect(),
            edges,
            directed: self.directed,
        }
    }
}

/// On-disk graph description. Undirected files list each edge once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub mu: Vec<f64>,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pub directed: bool,
}

impl GraphFile {
    pub fn build<R: Real>(&self) -> Result<WeightedGraph<R>> {
        let n = self.n;
        if self.mu.len() != n {
            return Err(Error::dim("graph file mu", n, self.mu.len()));
        }
        let mut w = DMatrix::<R>::zeros(n, n);
        for (k, &(i, j, weight)) in self.edges.iter().enumerate() {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {k} ({i}, {j}) references a node outside 0..{n}"
                )));
            }
            let value: R = lit(weight);
            let pairs: &[(usize, usize)] = if self.directed { &[(i, j)] } else { &[(i, j), (j, i)] };
            for &(a, b) in pairs {
                if w[(a, b)] != R::zero() && w[(a, b)] != value {
                    return Err(Error::InvalidGraph(format!(
                        "edge ({a}, {b}) listed twice with different weights"
                    )));
                }
                w[(a, b)] = value;
            }
        }
        let mu = DVector::from_iterator(n, self.mu.iter().map(|&m| lit(m)));
        WeightedGraph::new(w, mu, self.directed)
    }
}

/// Builds the adjacency `M⁻¹W`, Laplacian `M⁻¹(D − W)` or normalized Laplacian
/// `M⁻¹D^{-1/2}(D − W)D^{-1/2}` of a graph.
pub fn characteristic_operator<R: Real>(
    graph: &WeightedGraph<R>,
    kind: OperatorKind,
) -> Result<DenseOperator<R>> {
    let n = graph.n();
    let w = graph.adjacency();
    let mu = graph.mu();
    let d = graph.degrees();
    let mut m = CMatrix::<R>::zeros(n, n);
    match kind {
        OperatorKind::Adjacency => {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = cre(w[(i, j)] / mu[i]);
                }
            }
        }
        OperatorKind::Laplacian => {
            for i in 0..n {
                for j in 0..n {
                    let lap = if i == j { d[i] - w[(i, j)] } else { -w[(i, j)] };
                    m[(i, j)] = cre(lap / mu[i]);
                }
            }
        }
        OperatorKind::NormalizedLaplacian => {
            if let Some(node) = d.iter().position(|x| !(*x > R::zero())) {
                return Err(Error::IsolatedNode { node });
            }
            let s = d.map(|x| R::one() / x.sqrt());
            for i in 0..n {
                for j in 0..n {
                    let lap = if i == j { d[i] - w[(i, j)] } else { -w[(i, j)] };
                    m[(i, j)] = cre(s[i] * lap * s[j] / mu[i]);
                }
            }
        }
    }
    DenseOperator::on(graph.space(), m)
}

/// Dirichlet energy `⟨u, Δu⟩` of an undirected graph.
pub fn energy_form<R: Real>(graph: &WeightedGraph<R>, u: &Signal<R>) -> Result<R> {
    if graph.is_directed() {
        return Err(Error::DirectedGraph("energy form"));
    }
    if u.space() != graph.space() {
        return Err(Error::SpaceMismatch("energy form".into()));
    }
    let lap = characteristic_operator(graph, OperatorKind::Laplacian)?;
    let du = lap.matrix() * u.values();
    Ok(graph.space().inner(u.values(), &du).re)
}
