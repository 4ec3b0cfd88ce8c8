//! Certified stability and transferability bounds for networks, and the
//! sampling harnesses that check them.
//!
//! Notation: `Φ` is a network on graphs `G_n`, `Φ̃` the same filters on
//! graphs `G̃_n`, and `J_n: ℓ²(G_n) → ℓ²(G̃_n)` identify the layer spaces.
//! `B, L, R, D` are maxima of the per-layer constants over both networks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{cross_spectral_lipschitz, kg_constant, ContourSpec, Filter, KgContext};
use crate::network::{
    aggregate, aggregation_constant, layer_constant_b, BoundMethod, BoundMode, ConnectingOp, FeatureBundle, Layer,
    Network,
};
use crate::operator::{DenseOperator, ResolventProfile};
use crate::graph::SignalSpace;
use crate::sampling::{complex_gaussian, derived_rng, real_gaussian, unit_bundle};
use crate::scalar::{cre, lit, modulus, rmax, to_f64, CVector, Real, C};

pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    Frobenius,
    Operator,
}

fn norm_of<R: Real>(a: &DenseOperator<R>, kind: NormKind) -> R {
    match kind {
        NormKind::Frobenius => a.frobenius_norm(),
        NormKind::Operator => a.op_norm(),
    }
}

/// `‖J T − T₂ J‖` for `J: dom(T) → dom(T₂)`.
pub fn commutator_norm<R: Real>(
    j: &DenseOperator<R>,
    t: &DenseOperator<R>,
    t2: &DenseOperator<R>,
    kind: NormKind,
) -> Result<R> {
    let a = j.compose(t)?;
    let b = t2.compose(j)?;
    Ok(norm_of(&a.minus(&b)?, kind))
}

/// `‖R_ω(T₂) J − J R_ω(T)‖`, maxed with the adjoint-resolvent version when `doubly`.
pub fn resolvent_closeness<R: Real>(
    j: &DenseOperator<R>,
    t: &DenseOperator<R>,
    t2: &DenseOperator<R>,
    omega: C<R>,
    doubly: bool,
) -> Result<R> {
    let r = t.resolvent(omega)?;
    let r2 = t2.resolvent(omega)?;
    let eps = r2.compose(j)?.minus(&j.compose(&r)?)?.op_norm();
    if !doubly {
        return Ok(eps);
    }
    let (ra, r2a) = (r.adjoint(), r2.adjoint());
    let eps2 = r2a.compose(j)?.minus(&j.compose(&ra)?)?.op_norm();
    Ok(rmax(eps, eps2))
}

/// Which theorem-shaped formula a report evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaTag {
    /// `Π L_n R_n B_n · ‖f − h‖`.
    Signal,
    /// `N·DRL·(BRL)^{N−1}·‖f‖·δ`.
    Edge,
    /// Same shape with the resolvent distance `ε`.
    Structural,
    /// `(N·DRL·c + K·BRL)·(BRL)^{N−1}·‖f‖·δ` for aggregated outputs.
    GraphLevel,
    /// `N·[RLDδ + δ₁BR + δ₂BL]·(BRL)^{N−1}·‖f‖` when `J` only almost commutes.
    Generalized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerConstants {
    pub b: f64,
    pub b_method: BoundMethod,
    pub l: f64,
    pub r: f64,
    pub d: Option<f64>,
    pub perturbation: Option<f64>,
}

/// All constants behind a bound, plus the evaluated value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub tag: FormulaTag,
    pub depth: usize,
    pub layers: Vec<LayerConstants>,
    pub b: f64,
    pub l: f64,
    pub r: f64,
    pub d: f64,
    pub k: f64,
    pub aggregation_constant: f64,
    pub input_norm: f64,
    /// `δ` or `ε`.
    pub perturbation: f64,
    pub perturbation_norm: Option<NormKind>,
    pub delta1: f64,
    pub delta2: f64,
    pub bound: f64,
    /// `Π_n (per-layer factor)`: tighter than `bound` but not certified by the theorems.
    pub per_layer_product: f64,
    pub lipschitz_estimated: bool,
    pub empirical: Option<f64>,
    pub seeds: Vec<u64>,
}

impl BoundReport {
    fn inputs(&self) -> BoundInputs {
        BoundInputs {
            depth: self.depth,
            d: self.d,
            r: self.r,
            l: self.l,
            b: self.b,
            k: self.k,
            input_norm: self.input_norm,
            perturbation: self.perturbation,
        }
    }

    /// Re-evaluates the tagged formula from the stored constants.
    pub fn recompute(&self) -> f64 {
        match self.tag {
            FormulaTag::Signal => self.layers.iter().map(|c| c.l * c.r * c.b).product::<f64>() * self.input_norm,
            FormulaTag::Edge => edge_bound(&self.inputs()),
            FormulaTag::Structural => structural_bound(&self.inputs()),
            FormulaTag::GraphLevel => {
                let i = self.inputs();
                let brl = i.b * i.r * i.l;
                (i.depth as f64 * i.d * i.r * i.l * self.aggregation_constant + i.k * brl)
                    * brl.powi(i.depth as i32 - 1)
                    * i.input_norm
                    * i.perturbation
            }
            FormulaTag::Generalized => generalized_bound(&self.inputs(), self.delta1, self.delta2),
        }
    }
}

/// Scalar inputs of the perturbation formulas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub depth: usize,
    pub d: f64,
    pub r: f64,
    pub l: f64,
    pub b: f64,
    pub k: f64,
    pub input_norm: f64,
    pub perturbation: f64,
}

impl BoundInputs {
    fn brl_power(&self) -> f64 {
        (self.b * self.r * self.l).powi(self.depth as i32 - 1)
    }
}

/// `N·DRL·(BRL)^{N−1}·‖f‖·δ`.
pub fn edge_bound(i: &BoundInputs) -> f64 {
    if i.perturbation == 0.0 {
        return 0.0;
    }
    i.depth as f64 * i.d * i.r * i.l * i.brl_power() * i.input_norm * i.perturbation
}

/// Identical in shape to [`edge_bound`], with `ε` in place of `δ`.
pub fn structural_bound(i: &BoundInputs) -> f64 {
    edge_bound(i)
}

/// `(N·DRL + K·BRL)·(BRL)^{N−1}·‖f‖·δ`.
pub fn graph_level_bound(i: &BoundInputs) -> f64 {
    if i.perturbation == 0.0 {
        return 0.0;
    }
    let brl = i.b * i.r * i.l;
    (i.depth as f64 * i.d * i.r * i.l + i.k * brl) * i.brl_power() * i.input_norm * i.perturbation
}

/// `N·[RLDδ + δ₁BR + δ₂BL]·(BRL)^{N−1}·‖f‖`.
pub fn generalized_bound(i: &BoundInputs, delta1: f64, delta2: f64) -> f64 {
    let inner = i.r * i.l * i.d * i.perturbation + delta1 * i.b * i.r + delta2 * i.b * i.l;
    i.depth as f64 * inner * i.brl_power() * i.input_norm
}

fn layer_basics<R: Real>(layer: &Layer<R>, mode: BoundMode<R>) -> Result<LayerConstants> {
    let b = layer_constant_b(layer, mode)?;
    Ok(LayerConstants {
        b: b.value,
        b_method: b.method,
        l: to_f64(layer.rho().lipschitz::<R>()),
        r: to_f64(layer.connecting().lipschitz()),
        d: None,
        perturbation: None,
    })
}

/// Lipschitz bound `Π L_n R_n B_n` of the network map.
pub fn signal_bound<R: Real>(net: &Network<R>, mode: BoundMode<R>) -> Result<BoundReport> {
    let layers = net
        .layers()
        .iter()
        .map(|l| layer_basics(l, mode))
        .collect::<Result<Vec<_>>>()?;
    let product: f64 = layers.iter().map(|c| c.l * c.r * c.b).product();
    let max = |f: fn(&LayerConstants) -> f64| layers.iter().map(f).fold(0.0, f64::max);
    Ok(BoundReport {
        tag: FormulaTag::Signal,
        depth: net.depth(),
        b: max(|c| c.b),
        l: max(|c| c.l),
        r: max(|c| c.r),
        d: 0.0,
        k: 0.0,
        aggregation_constant: 1.0,
        input_norm: 1.0,
        perturbation: 0.0,
        perturbation_norm: None,
        delta1: 0.0,
        delta2: 0.0,
        bound: product,
        per_layer_product: product,
        lipschitz_estimated: false,
        empirical: None,
        seeds: Vec::new(),
        layers,
    })
}

/// Unit-ball sample: a random direction scaled by a uniform radius.
fn ball_sample<R: Real>(seed: u64, index: u64, net: &Network<R>) -> FeatureBundle<R> {
    use rand::Rng;
    let mut rng = derived_rng(seed, index);
    let radius: f64 = rng.random_range(0.05..=1.0);
    unit_bundle(&mut rng, net.input_space(), net.k_in()).scaled(lit(radius))
}

/// `max ‖Φ(f) − Φ(h)‖ / ‖f − h‖` over seeded pairs from the unit ball.
pub fn empirical_lipschitz<R: Real>(net: &Network<R>, samples: usize, seed: u64) -> Result<R> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let ratios = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let f = ball_sample(seed, 2 * i, net);
            let h = ball_sample(seed, 2 * i + 1, net);
            let num = net.forward(&f)?.minus(&net.forward(&h)?)?.norm();
            let den = f.minus(&h)?.norm();
            Ok(if den > R::zero() { num / den } else { R::zero() })
        })
        .collect::<Result<Vec<R>>>()?;
    Ok(ratios.into_iter().fold(R::zero(), rmax))
}

/// Identification maps `J_0 … J_N` with measured defects against `ρ` and `P`.
#[derive(Clone, Debug)]
pub struct IdentificationSet<R: Real> {
    pub maps: Vec<DenseOperator<R>>,
    /// `δ₁` per layer: `max ‖ρ(Jf) − Jρ(f)‖ / ‖f‖`.
    pub delta1: Vec<R>,
    /// `δ₂` per layer: `max ‖P̃ J_{n−1} f − J_n P f‖ / ‖f‖`.
    pub delta2: Vec<R>,
}

fn check_maps<R: Real>(net: &Network<R>, net2: &Network<R>, maps: &[DenseOperator<R>]) -> Result<()> {
    if net.depth() != net2.depth() {
        return Err(Error::dim("paired network depth", net.depth(), net2.depth()));
    }
    if maps.len() != net.depth() + 1 {
        return Err(Error::dim("identification maps", net.depth() + 1, maps.len()));
    }
    for (n, j) in maps.iter().enumerate() {
        let (src, dst) = if n == 0 {
            (net.input_space(), net2.input_space())
        } else {
            (net.layers()[n - 1].output_space(), net2.layers()[n - 1].output_space())
        };
        if j.domain() != src || j.codomain() != dst {
            return Err(Error::Layer {
                layer: n,
                detail: "identification map does not connect the paired layer spaces".into(),
            });
        }
    }
    Ok(())
}

fn apply_connecting<R: Real>(p: &ConnectingOp<R>, v: &CVector<R>) -> CVector<R> {
    p.apply_vec(v)
}

/// How defect harnesses draw their unit-norm test signals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectSampling {
    pub samples: usize,
    pub seed: u64,
    /// Draw entrywise nonnegative real signals instead of complex Gaussians.
    pub nonnegative: bool,
}

impl Default for DefectSampling {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            nonnegative: false,
        }
    }
}

impl DefectSampling {
    fn draw<R: Real>(&self, stream: u64, index: u64, space: &SignalSpace<R>) -> CVector<R> {
        let mut rng = derived_rng(self.seed.wrapping_add(stream << 32), index);
        let v = if self.nonnegative {
            real_gaussian::<R>(&mut rng, space.dim()).map(|z| cre(z.re.abs()))
        } else {
            complex_gaussian(&mut rng, space.dim())
        };
        let n = space.norm(&v);
        if n > R::zero() {
            v.map(|z| z / n)
        } else {
            v
        }
    }
}

/// Samples the commutation defects of `J_n` with the nonlinearities and connecting maps.
pub fn measure_commutation_defects<R: Real>(
    net: &Network<R>,
    net2: &Network<R>,
    maps: Vec<DenseOperator<R>>,
    sampling: &DefectSampling,
) -> Result<IdentificationSet<R>> {
    check_maps(net, net2, &maps)?;
    let samples = sampling.samples;
    let mut delta1 = Vec::with_capacity(net.depth());
    let mut delta2 = Vec::with_capacity(net.depth());
    for (n, (layer, layer2)) in net.layers().iter().zip(net2.layers()).enumerate() {
        let j_in = &maps[n];
        let j_out = &maps[n + 1];
        let rho = layer.rho();
        let d1 = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let f = sampling.draw(0, i, layer.output_space());
                let lhs = rho.apply_vec(&j_out.apply_vec(&f));
                let rhs = j_out.apply_vec(&rho.apply_vec(&f));
                j_out.codomain().norm(&(lhs - rhs)) / layer.output_space().norm(&f)
            })
            .collect::<Vec<R>>()
            .into_iter()
            .fold(R::zero(), rmax);
        let trivially_commuting = matches!((layer.connecting(), layer2.connecting()), (ConnectingOp::Identity, ConnectingOp::Identity))
            && j_in.matrix() == j_out.matrix();
        let d2 = if trivially_commuting {
            R::zero()
        } else {
            (0..samples as u64)
                .into_par_iter()
                .map(|i| {
                    let f = sampling.draw(1, i, layer.input_space());
                    let lhs = apply_connecting(layer2.connecting(), &j_in.apply_vec(&f));
                    let rhs = j_out.apply_vec(&apply_connecting(layer.connecting(), &f));
                    j_out.codomain().norm(&(lhs - rhs)) / layer.input_space().norm(&f)
                })
                .collect::<Vec<R>>()
                .into_iter()
                .fold(R::zero(), rmax)
        };
        delta1.push(d1);
        delta2.push(d2);
    }
    Ok(IdentificationSet { maps, delta1, delta2 })
}

/// `‖Φ̃(J_0 f) − J_N Φ(f)‖`.
pub fn transfer_discrepancy<R: Real>(
    net: &Network<R>,
    net2: &Network<R>,
    maps: &[DenseOperator<R>],
    f: &FeatureBundle<R>,
) -> Result<R> {
    check_maps(net, net2, maps)?;
    let out = net.forward(f)?.transform(&maps[maps.len() - 1])?;
    let out2 = net2.forward(&f.transform(&maps[0])?)?;
    Ok(out2.minus(&out)?.norm())
}

/// `‖Ψ(f) − Ψ̃(J_0 f)‖` for `p`-norm aggregation.
pub fn aggregated_discrepancy<R: Real>(
    net: &Network<R>,
    net2: &Network<R>,
    maps: &[DenseOperator<R>],
    f: &FeatureBundle<R>,
    p: R,
) -> Result<R> {
    check_maps(net, net2, maps)?;
    let a = aggregate(&net.forward(f)?, p)?;
    let b = aggregate(&net2.forward(&f.transform(&maps[0])?)?, p)?;
    Ok(crate::network::aggregate_distance(&a, &b))
}

/// Which perturbation notion the paired bound uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PerturbationSetting<R: Real> {
    /// Commutator `‖T̃J − JT‖`: Frobenius for normal pairs, operator norm otherwise.
    /// Laurent filters on non-normal pairs need a contour around both spectra.
    Edge { contour: Option<ContourSpec<R>> },
    /// Resolvent distance `‖R̃_ω J − J R_ω‖` (doubled for continuous filters).
    Structural { omega: C<R> },
}

fn filter_d<R: Real>(
    g: &Filter<R>,
    layer: &Layer<R>,
    layer2: &Layer<R>,
    setting: PerturbationSetting<R>,
    normal_pair: bool,
) -> Result<R> {
    let t = layer.operator();
    let t2 = layer2.operator();
    match setting {
        PerturbationSetting::Edge { contour } => {
            if normal_pair {
                let s1 = t.spectrum()?;
                let s2 = t2.spectrum()?;
                return cross_spectral_lipschitz(g, &s1.eigenvalues, &s2.eigenvalues);
            }
            match g {
                Filter::Entire(_) => kg_constant(g, KgContext::EntireRadius(rmax(t.op_norm(), t2.op_norm()))),
                Filter::Hol(_) => {
                    let contour = contour.ok_or_else(|| {
                        Error::InvalidArgument("Laurent filters on non-normal pairs need a contour".into())
                    })?;
                    let p1 = ResolventProfile::auto(t)?;
                    let p2 = ResolventProfile::auto(t2)?;
                    kg_constant(
                        g,
                        KgContext::ContourPair {
                            first: &p1,
                            second: &p2,
                            contour,
                        },
                    )
                }
                _ => Err(Error::NonNormal),
            }
        }
        PerturbationSetting::Structural { omega } => match g {
            Filter::Hol(h) if h.omega == omega => {
                let c = rmax(t.resolvent(omega)?.op_norm(), t2.resolvent(omega)?.op_norm());
                kg_constant(g, KgContext::HolSeminorm(c))
            }
            Filter::Cont(h) if h.omega == omega => {
                if !normal_pair {
                    return Err(Error::NonNormal);
                }
                let c = rmax(t.resolvent(omega)?.op_norm(), t2.resolvent(omega)?.op_norm());
                kg_constant(g, KgContext::ContSeminorm(c))
            }
            Filter::Entire(_) => {
                let p1 = ResolventProfile::auto(t)?;
                let p2 = ResolventProfile::auto(t2)?;
                let radius = rmax(p1.spectrum().radius(), p2.spectrum().radius()) * lit(1.5) + R::one();
                let contour = ContourSpec::circle(cre(R::zero()), radius)?;
                kg_constant(
                    g,
                    KgContext::Closeness {
                        first: &p1,
                        second: &p2,
                        contour,
                        omega,
                    },
                )
            }
            _ => Err(Error::InvalidArgument(
                "structural bounds need Laurent or continuous filters at the closeness point, or entire filters".into(),
            )),
        },
    }
}

/// Certified bound on `‖Φ̃(J_0 f) − J_N Φ(f)‖` for inputs of norm `input_norm`.
///
/// Uses the edge or structural formula when every `J_n` commutes with `ρ` and
/// `P` (measured defects zero), and the generalized formula otherwise.
pub fn transfer_bound<R: Real>(
    net: &Network<R>,
    net2: &Network<R>,
    ids: &IdentificationSet<R>,
    setting: PerturbationSetting<R>,
    mode: BoundMode<R>,
    input_norm: R,
) -> Result<BoundReport> {
    check_maps(net, net2, &ids.maps)?;
    let mut layers = Vec::with_capacity(net.depth());
    let mut b = 0.0f64;
    let mut l = 0.0f64;
    let mut r = 0.0f64;
    let mut d = 0.0f64;
    let mut pert = 0.0f64;
    let mut norm_kind = NormKind::Operator;
    let doubly = net
        .layers()
        .iter()
        .flat_map(|x| x.filters().iter().flatten())
        .any(|g| matches!(g, Filter::Cont(_)));
    let mut per_layer_product = 1.0;
    for (n, (layer, layer2)) in net.layers().iter().zip(net2.layers()).enumerate() {
        let c1 = layer_basics(layer, mode)?;
        let c2 = layer_basics(layer2, mode)?;
        let j = &ids.maps[n + 1];
        let normal_pair = layer.spectrum()?.is_normal() && layer2.spectrum()?.is_normal();
        let (p, kind) = match setting {
            PerturbationSetting::Edge { .. } => {
                let kind = if normal_pair { NormKind::Frobenius } else { NormKind::Operator };
                (commutator_norm(j, layer.operator(), layer2.operator(), kind)?, kind)
            }
            PerturbationSetting::Structural { omega } => (
                resolvent_closeness(j, layer.operator(), layer2.operator(), omega, doubly)?,
                NormKind::Operator,
            ),
        };
        if kind == NormKind::Frobenius {
            norm_kind = NormKind::Frobenius;
        }
        let mut dsq = R::zero();
        for g in layer.filters().iter().flatten() {
            let k = filter_d(g, layer, layer2, setting, normal_pair)?;
            dsq += k * k;
        }
        let dn = to_f64(dsq.sqrt());
        let lc = LayerConstants {
            b: c1.b.max(c2.b),
            b_method: c1.b_method,
            l: c1.l.max(c2.l),
            r: c1.r.max(c2.r),
            d: Some(dn),
            perturbation: Some(to_f64(p)),
        };
        per_layer_product *= lc.b * lc.r * lc.l;
        b = b.max(lc.b);
        l = l.max(lc.l);
        r = r.max(lc.r);
        d = d.max(dn);
        pert = pert.max(to_f64(p));
        layers.push(lc);
    }
    let delta1 = ids.delta1.iter().map(|&x| to_f64(x)).fold(0.0, f64::max);
    let delta2 = ids.delta2.iter().map(|&x| to_f64(x)).fold(0.0, f64::max);
    let tag = if delta1 > 0.0 || delta2 > 0.0 {
        FormulaTag::Generalized
    } else {
        match setting {
            PerturbationSetting::Edge { .. } => FormulaTag::Edge,
            PerturbationSetting::Structural { .. } => FormulaTag::Structural,
        }
    };
    let mut report = BoundReport {
        tag,
        depth: net.depth(),
        layers,
        b,
        l,
        r,
        d,
        k: 0.0,
        aggregation_constant: 1.0,
        input_norm: to_f64(input_norm),
        perturbation: pert,
        perturbation_norm: Some(match setting {
            PerturbationSetting::Edge { .. } => norm_kind,
            PerturbationSetting::Structural { .. } => NormKind::Operator,
        }),
        delta1,
        delta2,
        bound: 0.0,
        per_layer_product,
        lipschitz_estimated: false,
        empirical: None,
        seeds: Vec::new(),
    };
    report.bound = report.recompute();
    Ok(report)
}

/// Smallest `K` with `|‖J f‖_p − ‖f‖_p| ≤ δ·K·‖f‖₂` over the given signals.
pub fn aggregation_k<R: Real>(j: &DenseOperator<R>, signals: &[CVector<R>], p: R, perturbation: R) -> R {
    if perturbation == R::zero() {
        return R::zero();
    }
    signals
        .iter()
        .map(|f| {
            let n2 = j.domain().norm(f);
            if n2 == R::zero() {
                return R::zero();
            }
            let a = j.codomain().p_norm(&j.apply_vec(f), p);
            let b = j.domain().p_norm(f, p);
            (a - b).abs() / (perturbation * n2)
        })
        .fold(R::zero(), rmax)
}

/// Converts a transfer report into the aggregated-output bound.
///
/// `k` must satisfy the `J_N` hypothesis for every output channel involved;
/// `c` is the `ℓ^p ≤ c·ℓ²` constant of the target output space.
pub fn graph_level_report(transfer: &BoundReport, k: f64, c: f64) -> BoundReport {
    let mut r = transfer.clone();
    r.tag = FormulaTag::GraphLevel;
    r.k = k;
    r.aggregation_constant = c;
    r.bound = r.recompute();
    r
}

/// Output channels of `net` on `f`, used to instantiate the `K` hypothesis.
pub fn output_channels<R: Real>(net: &Network<R>, f: &FeatureBundle<R>) -> Result<Vec<CVector<R>>> {
    Ok(net.forward(f)?.channels().to_vec())
}

/// `aggregation_constant` re-exported for report assembly.
pub fn output_aggregation_constant<R: Real>(net: &Network<R>, p: R) -> f64 {
    to_f64(aggregation_constant(net.output_space(), p))
}

/// Largest `|g(λ)|` deviation helper used by diagnostics: `max_λ |g(λ)|`.
pub fn max_filter_modulus<R: Real>(g: &Filter<R>, eigenvalues: &[C<R>]) -> Result<R> {
    eigenvalues
        .iter()
        .try_fold(R::zero(), |acc, &l| Ok(rmax(acc, modulus(g.eval(l)?))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::EntireFilter;
    use crate::graph::{OperatorKind, SignalSpace, WeightedGraph};
    use crate::network::Nonlinearity;
    use crate::scalar::complexify;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, DMatrix};

    fn inputs(depth: usize, d: f64, r: f64, l: f64, b: f64, k: f64, f: f64, p: f64) -> BoundInputs {
        BoundInputs {
            depth,
            d,
            r,
            l,
            b,
            k,
            input_norm: f,
            perturbation: p,
        }
    }

    #[test]
    fn formula_examples() {
        assert_relative_eq!(edge_bound(&inputs(1, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.1)), 0.1);
        assert_eq!(edge_bound(&inputs(3, 5.0, 1.0, 1.0, 2.0, 0.0, 1.0, 0.0)), 0.0);
        assert_relative_eq!(edge_bound(&inputs(2, 2.0, 1.0, 1.0, 3.0, 0.0, 1.0, 0.5)), 6.0);
        assert_eq!(structural_bound(&inputs(1, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0)), 0.0);
        assert_relative_eq!(structural_bound(&inputs(1, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.2)), 0.2);
        assert_relative_eq!(structural_bound(&inputs(3, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0)), 3.0);
        assert_eq!(graph_level_bound(&inputs(1, 1.0, 1.0, 1.0, 1.0, 5.0, 1.0, 0.0)), 0.0);
        assert_relative_eq!(graph_level_bound(&inputs(1, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0)), 1.0);
        assert_relative_eq!(graph_level_bound(&inputs(1, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0)), 3.0);
    }

    fn op(m: DMatrix<f64>) -> DenseOperator<f64> {
        DenseOperator::on(&SignalSpace::uniform(m.nrows()), complexify(&m)).unwrap()
    }

    #[test]
    fn commutator_examples() {
        let space = SignalSpace::uniform(2);
        let t = op(dmatrix![1.0, 2.0; 2.0, 0.0]);
        let zero = DenseOperator::zero(&space, &space);
        let id = DenseOperator::identity(&space);
        assert_eq!(commutator_norm(&zero, &t, &t, NormKind::Operator).unwrap(), 0.0);
        assert_eq!(commutator_norm(&id, &t, &t, NormKind::Frobenius).unwrap(), 0.0);
        let z = op(DMatrix::zeros(2, 2));
        assert_relative_eq!(commutator_norm(&id, &z, &id, NormKind::Operator).unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(resolvent_closeness(&id, &t, &t, cre(-10.0), true).unwrap(), 0.0);
    }

    fn entire(c: &[f64]) -> Filter<f64> {
        Filter::Entire(EntireFilter::new(c.iter().map(|&x| cre(x)).collect()))
    }

    #[test]
    fn signal_bound_examples() {
        let g = WeightedGraph::unweighted_nodes(dmatrix![0.0, 1.0; 1.0, 0.0]).unwrap();
        let id = Layer::bind(&g, OperatorKind::Adjacency, vec![vec![entire(&[1.0])]], Nonlinearity::Identity, ConnectingOp::Identity).unwrap();
        let net = Network::new(vec![id]).unwrap();
        let report = signal_bound(&net, BoundMode::Auto).unwrap();
        assert_relative_eq!(report.bound, 1.0, epsilon = 1e-12);
        assert_relative_eq!(report.recompute(), report.bound);
        assert_relative_eq!(empirical_lipschitz(&net, 20, 3).unwrap(), 1.0, epsilon = 1e-12);

        let twice = Layer::bind(&g, OperatorKind::Adjacency, vec![vec![entire(&[2.0])]], Nonlinearity::Identity, ConnectingOp::Identity).unwrap();
        let net = Network::new(vec![twice.clone(), twice]).unwrap();
        assert_relative_eq!(signal_bound(&net, BoundMode::Auto).unwrap().bound, 4.0, epsilon = 1e-12);

        let zero = Layer::bind(&g, OperatorKind::Adjacency, vec![vec![entire(&[])]], Nonlinearity::Relu, ConnectingOp::Identity).unwrap();
        let net = Network::new(vec![zero]).unwrap();
        assert_eq!(empirical_lipschitz(&net, 10, 0).unwrap(), 0.0);
    }

    #[test]
    fn defects_vanish_for_commuting_maps() {
        let g = WeightedGraph::unweighted_nodes(dmatrix![0.0, 1.0; 1.0, 0.0]).unwrap();
        let layer = Layer::bind(&g, OperatorKind::Laplacian, vec![vec![entire(&[0.0, 1.0])]], Nonlinearity::Identity, ConnectingOp::Identity).unwrap();
        let net = Network::new(vec![layer]).unwrap();
        let id = DenseOperator::identity(g.space());
        let ids = measure_commutation_defects(&net, &net, vec![id.clone(), id], &DefectSampling { samples: 16, seed: 1, nonnegative: false }).unwrap();
        assert_eq!(ids.delta1, vec![0.0]);
        assert_eq!(ids.delta2, vec![0.0]);
    }
}
