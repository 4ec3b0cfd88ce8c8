//! Graph convolutional networks built from functional-calculus filter banks.
//!
//! Layer `n` maps a bundle `(f_j)` to `f'_i = ρ(Σ_j g_ij(T_n) P_n f_j)`.
//! The filter matrices `g_ij(T_n)` are materialized once at construction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{check_contour_for, contour_mean, ContourSpec, Filter};
use crate::graph::{characteristic_operator, OperatorKind, SignalSpace, WeightedGraph};
use crate::operator::{DenseOperator, ProfileMode, ResolventProfile, SpectrumResult};
use crate::scalar::{cplx, lit, modulus, rmax, to_f64, CMatrix, CVector, Real, C};

/// Pointwise nonlinearity `ρ: ℂ → ℂ` with `ρ(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nonlinearity {
    Identity,
    Modulus,
    /// `max(Re z, 0) + i·max(Im z, 0)`.
    Relu,
    /// `σ(x) − 1/2` on real and imaginary parts separately.
    ShiftedSigmoid,
}

impl Nonlinearity {
    pub fn apply<R: Real>(self, z: C<R>) -> C<R> {
        match self {
            Nonlinearity::Identity => z,
            Nonlinearity::Modulus => cplx(modulus(z), R::zero()),
            Nonlinearity::Relu => cplx(rmax(z.re, R::zero()), rmax(z.im, R::zero())),
            Nonlinearity::ShiftedSigmoid => {
                let s = |x: R| R::one() / (R::one() + (-x).exp()) - lit(0.5);
                cplx(s(z.re), s(z.im))
            }
        }
    }

    pub fn lipschitz<R: Real>(self) -> R {
        match self {
            Nonlinearity::ShiftedSigmoid => lit(0.25),
            _ => R::one(),
        }
    }

    pub fn apply_vec<R: Real>(self, v: &CVector<R>) -> CVector<R> {
        v.map(|z| self.apply(z))
    }
}

/// Map between consecutive layer spaces.
#[derive(Clone, Debug)]
pub enum ConnectingOp<R: Real> {
    Identity,
    Linear(DenseOperator<R>),
}

impl<R: Real> ConnectingOp<R> {
    /// Lipschitz constant: 1 for the identity, the operator norm otherwise.
    pub fn lipschitz(&self) -> R {
        match self {
            ConnectingOp::Identity => R::one(),
            ConnectingOp::Linear(p) => p.op_norm(),
        }
    }

    pub fn apply_vec(&self, v: &CVector<R>) -> CVector<R> {
        match self {
            ConnectingOp::Identity => v.clone(),
            ConnectingOp::Linear(p) => p.apply_vec(v),
        }
    }
}

/// `K` signals on one graph.
#[derive(Clone, Debug)]
pub struct FeatureBundle<R: Real> {
    space: SignalSpace<R>,
    channels: Vec<CVector<R>>,
}

impl<R: Real> FeatureBundle<R> {
    pub fn new(space: &SignalSpace<R>, channels: Vec<CVector<R>>) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidArgument("a feature bundle needs at least one channel".into()));
        }
        for c in &channels {
            if c.len() != space.dim() {
                return Err(Error::dim("bundle channel", space.dim(), c.len()));
            }
        }
        Ok(Self {
            space: space.clone(),
            channels,
        })
    }

    pub fn single(space: &SignalSpace<R>, values: CVector<R>) -> Result<Self> {
        Self::new(space, vec![values])
    }

    pub fn zeros(space: &SignalSpace<R>, k: usize) -> Self {
        Self {
            space: space.clone(),
            channels: vec![CVector::zeros(space.dim()); k.max(1)],
        }
    }

    pub fn space(&self) -> &SignalSpace<R> {
        &self.space
    }

    pub fn channels(&self) -> &[CVector<R>] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// `sqrt(Σ_i ‖f_i‖²)`.
    pub fn norm(&self) -> R {
        self.channels
            .iter()
            .map(|c| {
                let n = self.space.norm(c);
                n * n
            })
            .fold(R::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n == R::zero() {
            return self;
        }
        let inv = cplx(R::one() / n, R::zero());
        self.map(|v| v.map(|z| z * inv))
    }

    pub fn map(&self, f: impl Fn(&CVector<R>) -> CVector<R>) -> Self {
        Self {
            space: self.space.clone(),
            channels: self.channels.iter().map(f).collect(),
        }
    }

    pub fn scaled(&self, s: R) -> Self {
        let c = cplx(s, R::zero());
        self.map(|v| v.map(|z| z * c))
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        if self.space != other.space || self.len() != other.len() {
            return Err(Error::SpaceMismatch("bundle difference".into()));
        }
        Ok(Self {
            space: self.space.clone(),
            channels: self.channels.iter().zip(&other.channels).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.space != other.space || self.len() != other.len() {
            return Err(Error::SpaceMismatch("bundle sum".into()));
        }
        Ok(Self {
            space: self.space.clone(),
            channels: self.channels.iter().zip(&other.channels).map(|(a, b)| a + b).collect(),
        })
    }

    /// Applies a map channel by channel, moving the bundle to the map's codomain.
    pub fn transform(&self, j: &DenseOperator<R>) -> Result<Self> {
        if j.domain() != &self.space {
            return Err(Error::SpaceMismatch("bundle transform".into()));
        }
        Ok(Self {
            space: j.codomain().clone(),
            channels: self.channels.iter().map(|c| j.apply_vec(c)).collect(),
        })
    }
}

/// One GCN layer: filter bank bound to an operator, nonlinearity and connecting map.
#[derive(Clone, Debug)]
pub struct Layer<R: Real> {
    operator: DenseOperator<R>,
    filters: Vec<Vec<Filter<R>>>,
    rho: Nonlinearity,
    connecting: ConnectingOp<R>,
    spectrum: Option<SpectrumResult<R>>,
    materialized: Vec<Vec<CMatrix<R>>>,
}

impl<R: Real> Layer<R> {
    /// `filters[i][j]` maps input channel `j` to output channel `i`.
    pub fn new(
        operator: DenseOperator<R>,
        filters: Vec<Vec<Filter<R>>>,
        rho: Nonlinearity,
        connecting: ConnectingOp<R>,
    ) -> Result<Self> {
        if !operator.is_square() {
            return Err(Error::SpaceMismatch("layer operator must be square".into()));
        }
        let k_out = filters.len();
        let k_in = filters.first().map_or(0, |r| r.len());
        if k_out == 0 || k_in == 0 || filters.iter().any(|r| r.len() != k_in) {
            return Err(Error::InvalidArgument(
                "filter grid must be a nonempty rectangle (K_out rows of K_in filters)".into(),
            ));
        }
        if let ConnectingOp::Linear(p) = &connecting {
            if p.codomain() != operator.domain() {
                return Err(Error::SpaceMismatch("connecting operator must map into the layer's space".into()));
            }
        }
        let spectrum = if filters.iter().flatten().any(|g| g.needs_normal()) {
            Some(operator.spectrum()?)
        } else {
            None
        };
        let materialized = filters
            .par_iter()
            .map(|row| {
                row.iter()
                    .map(|g| g.apply(&operator, spectrum.as_ref()).map(|m| m.into_matrix()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            operator,
            filters,
            rho,
            connecting,
            spectrum,
            materialized,
        })
    }

    /// Layer whose operator is the characteristic operator of `graph`.
    pub fn bind(
        graph: &WeightedGraph<R>,
        kind: OperatorKind,
        filters: Vec<Vec<Filter<R>>>,
        rho: Nonlinearity,
        connecting: ConnectingOp<R>,
    ) -> Result<Self> {
        Self::new(characteristic_operator(graph, kind)?, filters, rho, connecting)
    }

    pub fn operator(&self) -> &DenseOperator<R> {
        &self.operator
    }

    pub fn filters(&self) -> &[Vec<Filter<R>>] {
        &self.filters
    }

    pub fn rho(&self) -> Nonlinearity {
        self.rho
    }

    pub fn connecting(&self) -> &ConnectingOp<R> {
        &self.connecting
    }

    pub fn k_in(&self) -> usize {
        self.filters[0].len()
    }

    pub fn k_out(&self) -> usize {
        self.filters.len()
    }

    /// Space of the incoming bundle.
    pub fn input_space(&self) -> &SignalSpace<R> {
        match &self.connecting {
            ConnectingOp::Identity => self.operator.domain(),
            ConnectingOp::Linear(p) => p.domain(),
        }
    }

    pub fn output_space(&self) -> &SignalSpace<R> {
        self.operator.domain()
    }

    /// `g_ij(T)` as materialized at construction.
    pub fn filter_matrix(&self, i: usize, j: usize) -> &CMatrix<R> {
        &self.materialized[i][j]
    }

    /// Same filters and nonlinearity on a new operator and connecting map.
    pub fn rebind(&self, operator: DenseOperator<R>, connecting: ConnectingOp<R>) -> Result<Self> {
        Self::new(operator, self.filters.clone(), self.rho, connecting)
    }

    fn check_input(&self, input: &FeatureBundle<R>, layer: usize) -> Result<()> {
        if input.len() != self.k_in() {
            return Err(Error::Layer {
                layer,
                detail: format!("expected {} input channels, got {}", self.k_in(), input.len()),
            });
        }
        if input.space() != self.input_space() {
            return Err(Error::Layer {
                layer,
                detail: "input bundle lives on a different graph".into(),
            });
        }
        Ok(())
    }

    /// `Σ_j g_ij(T) P f_j`, without the nonlinearity.
    pub fn linear_part(&self, input: &FeatureBundle<R>) -> Result<FeatureBundle<R>> {
        self.check_input(input, 0)?;
        Ok(self.linear_unchecked(input))
    }

    fn linear_unchecked(&self, input: &FeatureBundle<R>) -> FeatureBundle<R> {
        let lifted: Vec<CVector<R>> = input.channels().iter().map(|f| self.connecting.apply_vec(f)).collect();
        let n = self.output_space().dim();
        let channels = self
            .materialized
            .par_iter()
            .map(|row| {
                let mut acc = CVector::<R>::zeros(n);
                for (g, h) in row.iter().zip(&lifted) {
                    acc += g * h;
                }
                acc
            })
            .collect();
        FeatureBundle {
            space: self.output_space().clone(),
            channels,
        }
    }

    fn forward_at(&self, input: &FeatureBundle<R>, layer: usize) -> Result<FeatureBundle<R>> {
        self.check_input(input, layer)?;
        let rho = self.rho;
        Ok(self.linear_unchecked(input).map(|v| rho.apply_vec(v)))
    }

    pub fn forward(&self, input: &FeatureBundle<R>) -> Result<FeatureBundle<R>> {
        self.forward_at(input, 0)
    }

    pub(crate) fn spectrum(&self) -> Result<SpectrumResult<R>> {
        match &self.spectrum {
            Some(s) => Ok(s.clone()),
            None => self.operator.spectrum(),
        }
    }
}

/// Layered GCN.
#[derive(Clone, Debug)]
pub struct Network<R: Real> {
    layers: Vec<Layer<R>>,
}

impl<R: Real> Network<R> {
    pub fn new(layers: Vec<Layer<R>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArgument("a network needs at least one layer".into()));
        }
        for (n, pair) in layers.windows(2).enumerate() {
            if pair[0].k_out() != pair[1].k_in() {
                return Err(Error::Layer {
                    layer: n + 1,
                    detail: format!(
                        "expects {} input channels but the previous layer emits {}",
                        pair[1].k_in(),
                        pair[0].k_out()
                    ),
                });
            }
            if pair[0].output_space() != pair[1].input_space() {
                return Err(Error::Layer {
                    layer: n + 1,
                    detail: "input space differs from the previous layer's output space".into(),
                });
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer<R>] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_space(&self) -> &SignalSpace<R> {
        self.layers[0].input_space()
    }

    pub fn output_space(&self) -> &SignalSpace<R> {
        self.layers[self.layers.len() - 1].output_space()
    }

    pub fn k_in(&self) -> usize {
        self.layers[0].k_in()
    }

    pub fn k_out(&self) -> usize {
        self.layers[self.layers.len() - 1].k_out()
    }

    pub fn forward(&self, input: &FeatureBundle<R>) -> Result<FeatureBundle<R>> {
        let mut x = input.clone();
        for (n, layer) in self.layers.iter().enumerate() {
            x = layer.forward_at(&x, n)?;
        }
        Ok(x)
    }

    /// Same filters and nonlinearities bound to new operators and connecting maps.
    pub fn rebind(&self, operators: Vec<DenseOperator<R>>, connecting: Vec<ConnectingOp<R>>) -> Result<Self> {
        if operators.len() != self.depth() || connecting.len() != self.depth() {
            return Err(Error::dim("rebind", self.depth(), operators.len().min(connecting.len())));
        }
        let layers = self
            .layers
            .iter()
            .zip(operators.into_iter().zip(connecting))
            .map(|(l, (t, p))| l.rebind(t, p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layers)
    }
}

/// `forward` as a free function.
pub fn forward<R: Real>(net: &Network<R>, input: &FeatureBundle<R>) -> Result<FeatureBundle<R>> {
    net.forward(input)
}

/// How the filter-bank constant `B_n` is certified.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundMode<R: Real> {
    /// Spectral if the operator is normal, else entire, else Laurent.
    Auto,
    /// `max_λ sqrt(Σ |g_ij(λ)|²)`; normal operators only.
    Spectral,
    /// `Σ_k sqrt(Σ |a_ij,k|²) ‖T‖^k`; entire filters only.
    Entire,
    /// Laurent filters sharing `ω`, with `‖(T − ω)⁻¹‖ ≤ C`. `None` measures `C`.
    Laurent { c: Option<R> },
    /// Contour integral of `γ_T(z) sqrt(Σ |g_ij(z)|²)` plus the values at infinity.
    Contour { contour: ContourSpec<R>, profile: Option<ProfileMode> },
}

/// `B_n` together with the rule that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerBound {
    pub value: f64,
    pub method: BoundMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    Spectral,
    Entire,
    Laurent,
    Contour,
}

fn common_omega<R: Real>(filters: &[Vec<Filter<R>>]) -> Option<C<R>> {
    let mut omega = None;
    for g in filters.iter().flatten() {
        match g {
            Filter::Hol(h) => match omega {
                None => omega = Some(h.omega),
                Some(w) if w == h.omega => {}
                Some(_) => return None,
            },
            _ => return None,
        }
    }
    omega
}

/// Certified constant `B_n` with `‖Σ_j g_ij(T) x_j‖ ≤ B_n ‖x‖` for every bundle `x`.
pub fn layer_constant_b<R: Real>(layer: &Layer<R>, mode: BoundMode<R>) -> Result<LayerBound> {
    let filters = layer.filters();
    let wrap = |value: R, method| LayerBound {
        value: to_f64(value),
        method,
    };
    match mode {
        BoundMode::Auto => {
            let spectrum = layer.spectrum()?;
            if spectrum.is_normal() {
                return spectral_b(filters, &spectrum).map(|v| wrap(v, BoundMethod::Spectral));
            }
            if filters.iter().flatten().all(|g| matches!(g, Filter::Entire(_))) {
                return layer_constant_b(layer, BoundMode::Entire);
            }
            if common_omega(filters).is_some() {
                return layer_constant_b(layer, BoundMode::Laurent { c: None });
            }
            Err(Error::InvalidArgument(
                "no certified bound for this filter mix on a non-normal operator".into(),
            ))
        }
        BoundMode::Spectral => {
            let spectrum = layer.spectrum()?;
            spectral_b(filters, &spectrum).map(|v| wrap(v, BoundMethod::Spectral))
        }
        BoundMode::Entire => {
            let norm = layer.operator().op_norm();
            let order = filters
                .iter()
                .flatten()
                .map(|g| match g {
                    Filter::Entire(e) => Ok(e.coeffs.len()),
                    _ => Err(Error::InvalidArgument("entire bound needs entire filters only".into())),
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or(0);
            let mut total = R::zero();
            let mut pow = R::one();
            for k in 0..order {
                let mut sq = R::zero();
                for g in filters.iter().flatten() {
                    if let Filter::Entire(e) = g {
                        if let Some(&a) = e.coeffs.get(k) {
                            sq += modulus(a) * modulus(a);
                        }
                    }
                }
                total += sq.sqrt() * pow;
                pow *= norm;
            }
            Ok(wrap(total, BoundMethod::Entire))
        }
        BoundMode::Laurent { c } => {
            let omega = common_omega(filters).ok_or_else(|| {
                Error::InvalidArgument("Laurent bound needs Laurent filters sharing one pole".into())
            })?;
            let c = match c {
                Some(c) => c,
                None => layer.operator().resolvent(omega)?.op_norm(),
            };
            let mut sq = R::zero();
            for g in filters.iter().flatten() {
                if let Filter::Hol(h) = g {
                    let v = crate::filters::hol_norm_bound(h, c);
                    sq += v * v;
                }
            }
            Ok(wrap(sq.sqrt(), BoundMethod::Laurent))
        }
        BoundMode::Contour { contour, profile } => {
            let spectrum = layer.spectrum()?;
            for g in filters.iter().flatten() {
                if !matches!(g, Filter::Entire(_) | Filter::Hol(_)) {
                    return Err(Error::InvalidArgument("contour bound needs entire or Laurent filters".into()));
                }
                check_contour_for(g, &contour, &spectrum)?;
            }
            let gamma = match profile {
                Some(m) => ResolventProfile::new(layer.operator(), m)?,
                None => ResolventProfile::auto(layer.operator())?,
            };
            let mut at_inf = R::zero();
            for g in filters.iter().flatten() {
                if let Filter::Hol(h) = g {
                    at_inf += modulus(h.at_infinity()) * modulus(h.at_infinity());
                }
            }
            let mean = contour_mean(&contour, |z| {
                let mut sq = R::zero();
                for g in filters.iter().flatten() {
                    let v = modulus(g.eval(z)?);
                    sq += v * v;
                }
                Ok(gamma.eval(z)? * sq.sqrt())
            })?;
            Ok(wrap(at_inf.sqrt() + contour.radius * mean, BoundMethod::Contour))
        }
    }
}

fn spectral_b<R: Real>(filters: &[Vec<Filter<R>>], spectrum: &SpectrumResult<R>) -> Result<R> {
    if !spectrum.is_normal() {
        return Err(Error::NonNormal);
    }
    let mut best = R::zero();
    for &l in &spectrum.eigenvalues {
        let mut sq = R::zero();
        for g in filters.iter().flatten() {
            let v = modulus(g.eval(l)?);
            sq += v * v;
        }
        best = rmax(best, sq.sqrt());
    }
    Ok(best)
}

/// Channel-wise weighted `p`-norms `(Σ_g |f_i(g)|^p μ_g)^{1/p}`.
pub fn aggregate<R: Real>(out: &FeatureBundle<R>, p: R) -> Result<Vec<R>> {
    if !(p >= lit(2.0)) {
        return Err(Error::InvalidArgument(format!("aggregation needs p >= 2, got {}", to_f64(p))));
    }
    Ok(out.channels().iter().map(|c| out.space().p_norm(c, p)).collect())
}

/// Smallest `c` with `‖f‖_p ≤ c ‖f‖_2` on this space: 1 when every node weight
/// is at least 1, `μ_min^{1/p − 1/2}` otherwise.
pub fn aggregation_constant<R: Real>(space: &SignalSpace<R>, p: R) -> R {
    let m = space.min_weight();
    if m >= R::one() {
        R::one()
    } else {
        (m.ln() * (R::one() / p - lit(0.5))).exp()
    }
}

/// Euclidean distance between two aggregated feature vectors.
pub fn aggregate_distance<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y) * (*x - *y))
        .fold(R::zero(), |s, v| s + v)
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{EntireFilter, GenericFilter, HolFilter};
    use crate::scalar::{complexify, cre};
    use approx::assert_relative_eq;
    use nalgebra::dmatrix;

    fn swap_graph() -> WeightedGraph<f64> {
        WeightedGraph::unweighted_nodes(dmatrix![0.0, 1.0; 1.0, 0.0]).unwrap()
    }

    fn entire(coeffs: &[f64]) -> Filter<f64> {
        Filter::Entire(EntireFilter::new(coeffs.iter().map(|&x| cre(x)).collect()))
    }

    fn bundle(g: &WeightedGraph<f64>, v: &[C<f64>]) -> FeatureBundle<f64> {
        FeatureBundle::single(g.space(), CVector::from_column_slice(v)).unwrap()
    }

    #[test]
    fn identity_layer_is_identity() {
        let g = swap_graph();
        let layer = Layer::bind(&g, OperatorKind::Adjacency, vec![vec![entire(&[1.0])]], Nonlinearity::Identity, ConnectingOp::Identity).unwrap();
        let net = Network::new(vec![layer]).unwrap();
        let x = bundle(&g, &[C::new(1.0, 2.0), C::new(-3.0, 0.5)]);
        let y = net.forward(&x).unwrap();
        assert_eq!(y.channels()[0], x.channels()[0]);
    }

    #[test]
    fn linear_filter_on_adjacency_swaps() {
        let g = swap_graph();
        let layer = Layer::bind(&g, OperatorKind::Adjacency, vec![vec![entire(&[0.0, 1.0])]], Nonlinearity::Identity, ConnectingOp::Identity).unwrap();
        let y = layer.forward(&bundle(&g, &[cre(1.0), cre(0.0)])).unwrap();
        assert_eq!(y.channels()[0], CVector::from_column_slice(&[cre(0.0), cre(1.0)]));
    }

    #[test]
    fn modulus_nonlinearity() {
        let y = Nonlinearity::Modulus.apply_vec(&CVector::from_column_slice(&[cre(-3.0), C::new(0.0, 4.0)]));
        assert_eq!(y, CVector::from_column_slice(&[cre(3.0), cre(4.0)]));
        for rho in [Nonlinearity::Identity, Nonlinearity::Modulus, Nonlinearity::Relu, Nonlinearity::ShiftedSigmoid] {
            assert_eq!(rho.apply(cre(0.0_f64)), cre(0.0));
        }
    }

    #[test]
    fn channel_mismatch_names_layer() {
        let g = swap_graph();
        let l0 = Layer::bind(&g, OperatorKind::Adjacency, vec![vec![entire(&[1.0])], vec![entire(&[1.0])]], Nonlinearity::Identity, ConnectingOp::Identity).unwrap();
        let l1 = Layer::bind(&g, OperatorKind::Adjacency, vec![vec![entire(&[1.0]), entire(&[1.0])]], Nonlinearity::Identity, ConnectingOp::Identity).unwrap();
        let net = Network::new(vec![l0.clone(), l1]).unwrap();
        let two = FeatureBundle::zeros(g.space(), 2);
        assert!(matches!(net.forward(&two), Err(Error::Layer { layer: 0, .. })));
        assert!(Network::new(vec![l0.clone(), l0]).is_err());
    }

    #[test]
    fn b_constant_examples() {
        let g = swap_graph();
        let one = Filter::Generic(GenericFilter::from_fn(|_| cre(1.0)));
        let layer = Layer::bind(&g, OperatorKind::Laplacian, vec![vec![one.clone()]], Nonlinearity::Identity, ConnectingOp::Identity).unwrap();
        assert_relative_eq!(layer_constant_b(&layer, BoundMode::Auto).unwrap().value, 1.0);
        let layer = Layer::bind(&g, OperatorKind::Laplacian, vec![vec![one.clone()], vec![one]], Nonlinearity::Identity, ConnectingOp::Identity).unwrap();
        assert_relative_eq!(layer_constant_b(&layer, BoundMode::Auto).unwrap().value, 2f64.sqrt());

        let t = DenseOperator::on(&SignalSpace::uniform(2), complexify(&dmatrix![3.0, 0.0; 0.0, 1.0])).unwrap();
        let layer = Layer::new(t, vec![vec![entire(&[0.0, 1.0])]], Nonlinearity::Identity, ConnectingOp::Identity).unwrap();
        let b = layer_constant_b(&layer, BoundMode::Entire).unwrap();
        assert_relative_eq!(b.value, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn laurent_bound_on_nonnormal_operator() {
        let t = DenseOperator::on(&SignalSpace::uniform(2), complexify(&dmatrix![0.0, 1.0; 0.0, 0.5])).unwrap();
        let h = Filter::Hol(HolFilter::new(cre(-1.0), vec![cre(1.0), cre(-2.0), cre(0.5)]));
        let layer = Layer::new(t, vec![vec![h]], Nonlinearity::Relu, ConnectingOp::Identity).unwrap();
        let b = layer_constant_b(&layer, BoundMode::Auto).unwrap();
        assert_eq!(b.method, BoundMethod::Laurent);
        assert!(layer.filter_matrix(0, 0).norm() > 0.0);
        let actual = DenseOperator::on(&SignalSpace::uniform(2), layer.filter_matrix(0, 0).clone()).unwrap().op_norm();
        assert!(actual <= b.value * (1.0 + 1e-12));
    }

    #[test]
    fn aggregate_examples() {
        let g = swap_graph();
        let f = bundle(&g, &[cre(3.0), cre(4.0)]);
        assert_relative_eq!(aggregate(&f, 2.0).unwrap()[0], 5.0, epsilon = 1e-14);
        assert_eq!(aggregate(&FeatureBundle::zeros(g.space(), 3), 3.0).unwrap(), vec![0.0; 3]);
        assert!(aggregate(&f, 1.5).is_err());
        let light = SignalSpace::new(nalgebra::dvector![0.25, 1.0]).unwrap();
        assert_relative_eq!(aggregation_constant(&light, 4.0), 0.25f64.powf(-0.25), epsilon = 1e-14);
        assert_eq!(aggregation_constant(g.space(), 4.0), 1.0);
    }
}
