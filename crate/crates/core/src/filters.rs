//! Functional-calculus filters and their constants.
//!
//! Four families are supported: power series (`Entire`), Laurent series in
//! `(z − ω)⁻¹` (`Hol`), bivariate series in `(ω − z)⁻¹` and its conjugate
//! (`Cont`), and arbitrary spectral maps (`Generic`). All series are finite.
//!
//! Constants are the ones needed by the stability bounds: the norm bound
//! `‖g(T)‖ ≤ …` and the perturbation constant `K_g` with
//! `‖g(T)J − Jg(T̃)‖ ≤ K_g · (commutator or resolvent difference)`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{DenseOperator, ResolventProfile, SpectrumResult};
use crate::scalar::{cis, cplx, cpowi, cre, lit, modulus, rmax, to_f64, CMatrix, Real, C};

/// Power series `Σ a_k z^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct EntireFilter<R: Real> {
    pub coeffs: Vec<C<R>>,
}

/// Laurent series `Σ b_k (z − ω)^{-k}`; `b_0` is the value at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct HolFilter<R: Real> {
    pub omega: C<R>,
    pub coeffs: Vec<C<R>>,
}

/// Bivariate series `Σ a_{μν} (ω − z)^{-μ} (ω̄ − z̄)^{-ν}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContFilter<R: Real> {
    pub omega: C<R>,
    pub coeffs: Vec<((u32, u32), C<R>)>,
}

/// Evaluation rule of a generic spectral filter.
#[derive(Clone)]
pub enum GenericRule<R: Real> {
    Function(Arc<dyn Fn(C<R>) -> C<R> + Send + Sync>),
    /// Values at listed points; lookups must hit a point to within `1e-8·(1+|z|)`.
    Table(Vec<(C<R>, C<R>)>),
}

impl<R: Real> fmt::Debug for GenericRule<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenericRule::Function(_) => f.write_str("Function(..)"),
            GenericRule::Table(t) => write!(f, "Table({} points)", t.len()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenericFilter<R: Real> {
    pub rule: GenericRule<R>,
    pub lipschitz_hint: Option<R>,
}

impl<R: Real> GenericFilter<R> {
    pub fn from_fn(f: impl Fn(C<R>) -> C<R> + Send + Sync + 'static) -> Self {
        Self {
            rule: GenericRule::Function(Arc::new(f)),
            lipschitz_hint: None,
        }
    }

    pub fn with_lipschitz(mut self, d: R) -> Self {
        self.lipschitz_hint = Some(d);
        self
    }

    pub fn eval(&self, z: C<R>) -> Result<C<R>> {
        match &self.rule {
            GenericRule::Function(f) => Ok(f(z)),
            GenericRule::Table(points) => {
                let tol = lit::<R>(1e-8) * (R::one() + modulus(z));
                points
                    .iter()
                    .map(|(x, v)| (modulus(*x - z), *v))
                    .filter(|(d, _)| *d <= tol)
                    .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
                    .map(|(_, v)| v)
                    .ok_or_else(|| {
                        Error::InvalidFilter(format!(
                            "tabulated filter has no value at {}{:+}i",
                            to_f64(z.re),
                            to_f64(z.im)
                        ))
                    })
            }
        }
    }
}

impl<R: Real> EntireFilter<R> {
    pub fn new(coeffs: Vec<C<R>>) -> Self {
        Self { coeffs }
    }

    pub fn eval(&self, z: C<R>) -> C<R> {
        self.coeffs.iter().rev().fold(cre(R::zero()), |acc, &a| acc * z + a)
    }
}

impl<R: Real> HolFilter<R> {
    pub fn new(omega: C<R>, coeffs: Vec<C<R>>) -> Self {
        Self { omega, coeffs }
    }

    /// `b_0`, the value at infinity.
    pub fn at_infinity(&self) -> C<R> {
        self.coeffs.first().copied().unwrap_or_else(|| cre(R::zero()))
    }

    pub fn eval(&self, z: C<R>) -> C<R> {
        let s = crate::scalar::recip(z - self.omega);
        self.coeffs.iter().rev().fold(cre(R::zero()), |acc, &b| acc * s + b)
    }

    /// Coefficients drawn uniformly from `range`, orders `0..=max_order`.
    pub fn random(rng: &mut impl Rng, omega: C<R>, max_order: usize, range: (f64, f64)) -> Self {
        let coeffs = (0..=max_order)
            .map(|_| cre(lit(rng.random_range(range.0..=range.1))))
            .collect();
        Self { omega, coeffs }
    }
}

impl<R: Real> ContFilter<R> {
    pub fn new(omega: C<R>, coeffs: Vec<((u32, u32), C<R>)>) -> Self {
        Self { omega, coeffs }
    }

    pub fn eval(&self, z: C<R>) -> C<R> {
        let u = self.omega - z;
        let v = u.conj();
        self.coeffs.iter().fold(cre(R::zero()), |acc, &((m, n), a)| {
            acc + a * cpowi(u, -(m as i32)) * cpowi(v, -(n as i32))
        })
    }
}

/// Any of the four filter families.
#[derive(Clone, Debug)]
pub enum Filter<R: Real> {
    Entire(EntireFilter<R>),
    Hol(HolFilter<R>),
    Cont(ContFilter<R>),
    Generic(GenericFilter<R>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterFamily {
    Entire,
    Hol,
    Cont,
    Generic,
}

impl<R: Real> Filter<R> {
    pub fn family(&self) -> FilterFamily {
        match self {
            Filter::Entire(_) => FilterFamily::Entire,
            Filter::Hol(_) => FilterFamily::Hol,
            Filter::Cont(_) => FilterFamily::Cont,
            Filter::Generic(_) => FilterFamily::Generic,
        }
    }

    pub fn eval(&self, z: C<R>) -> Result<C<R>> {
        match self {
            Filter::Entire(g) => Ok(g.eval(z)),
            Filter::Hol(g) => Ok(g.eval(z)),
            Filter::Cont(g) => Ok(g.eval(z)),
            Filter::Generic(g) => g.eval(z),
        }
    }

    /// Pole location for the resolvent-based families.
    pub fn omega(&self) -> Option<C<R>> {
        match self {
            Filter::Hol(g) => Some(g.omega),
            Filter::Cont(g) => Some(g.omega),
            _ => None,
        }
    }

    pub fn needs_normal(&self) -> bool {
        matches!(self, Filter::Cont(_) | Filter::Generic(_))
    }

    /// `g(T)`. Generic and continuous filters use the spectral decomposition,
    /// which is computed unless `spectrum` supplies it.
    pub fn apply(&self, t: &DenseOperator<R>, spectrum: Option<&SpectrumResult<R>>) -> Result<DenseOperator<R>> {
        match self {
            Filter::Entire(g) => apply_entire(g, t),
            Filter::Hol(g) => apply_holomorphic(g, t),
            Filter::Cont(g) => apply_cont(g, t, spectrum),
            Filter::Generic(g) => apply_generic(g, t, spectrum),
        }
    }
}

fn with_spectrum<R: Real, T>(
    t: &DenseOperator<R>,
    spectrum: Option<&SpectrumResult<R>>,
    f: impl FnOnce(&SpectrumResult<R>) -> Result<T>,
) -> Result<T> {
    match spectrum {
        Some(s) => f(s),
        None => f(&t.spectrum()?),
    }
}

/// `Φ diag(g(λ)) Φ*`; the operator must be normal.
pub fn apply_generic<R: Real>(
    g: &GenericFilter<R>,
    t: &DenseOperator<R>,
    spectrum: Option<&SpectrumResult<R>>,
) -> Result<DenseOperator<R>> {
    with_spectrum(t, spectrum, |s| {
        if !s.is_normal() {
            return Err(Error::NonNormal);
        }
        let values: Vec<C<R>> = s.eigenvalues.iter().map(|&l| g.eval(l)).collect::<Result<_>>()?;
        Ok(t.with_matrix(s.apply_values(&values)?))
    })
}

/// Horner evaluation of `Σ a_k T^k`.
pub fn apply_entire<R: Real>(g: &EntireFilter<R>, t: &DenseOperator<R>) -> Result<DenseOperator<R>> {
    if !t.is_square() {
        return Err(Error::SpaceMismatch("filters act on square operators".into()));
    }
    let n = t.dim();
    let mut acc = CMatrix::<R>::zeros(n, n);
    for &a in g.coeffs.iter().rev() {
        acc = &acc * t.matrix();
        for i in 0..n {
            acc[(i, i)] += a;
        }
    }
    Ok(t.with_matrix(acc))
}

/// `b_0 Id + Σ_{k≥1} b_k S^k` with `S = (T − ωId)⁻¹`.
pub fn apply_holomorphic<R: Real>(g: &HolFilter<R>, t: &DenseOperator<R>) -> Result<DenseOperator<R>> {
    let n = t.dim();
    if g.coeffs.len() <= 1 {
        return Ok(t.with_matrix(CMatrix::<R>::identity(n, n).map(|x: C<R>| x * g.at_infinity())));
    }
    let s = -t.resolvent(g.omega)?.into_matrix();
    let mut acc = CMatrix::<R>::zeros(n, n);
    for &b in g.coeffs.iter().rev() {
        acc = &acc * &s;
        for i in 0..n {
            acc[(i, i)] += b;
        }
    }
    Ok(t.with_matrix(acc))
}

/// Continuous filters are applied spectrally; the operator must be normal.
pub fn apply_cont<R: Real>(
    g: &ContFilter<R>,
    t: &DenseOperator<R>,
    spectrum: Option<&SpectrumResult<R>>,
) -> Result<DenseOperator<R>> {
    with_spectrum(t, spectrum, |s| {
        if !s.is_normal() {
            return Err(Error::NonNormal);
        }
        if s.distance(g.omega) <= R::zero() {
            return Err(Error::singular((to_f64(g.omega.re), to_f64(g.omega.im)), "pole on the spectrum"));
        }
        Ok(t.with_matrix(s.apply_fn(|z| g.eval(z))?))
    })
}

/// Circle `center + radius·e^{iθ}` sampled at `nodes` equispaced points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec<R: Real> {
    pub center: C<R>,
    pub radius: R,
    pub nodes: usize,
}

pub const DEFAULT_CONTOUR_NODES: usize = 512;
const MAX_CONTOUR_NODES: usize = 8192;
const MAX_SCALAR_NODES: usize = 1 << 16;
const CHUNK: usize = 64;

impl<R: Real> ContourSpec<R> {
    pub fn new(center: C<R>, radius: R, nodes: usize) -> Result<Self> {
        if !(radius > R::zero()) {
            return Err(Error::Contour("radius must be positive".into()));
        }
        if nodes < 16 {
            return Err(Error::Contour(format!("at least 16 nodes required, got {nodes}")));
        }
        Ok(Self { center, radius, nodes })
    }

    pub fn circle(center: C<R>, radius: R) -> Result<Self> {
        Self::new(center, radius, DEFAULT_CONTOUR_NODES)
    }

    /// Node `j` of `n` equispaced nodes, rotated by `offset` half-steps.
    fn node(&self, j: usize, n: usize, offset: bool) -> C<R> {
        let two_pi = R::two_pi();
        let shift = if offset { lit::<R>(0.5) } else { R::zero() };
        let theta = two_pi * (lit::<R>(j as f64) + shift) / lit::<R>(n as f64);
        self.center + cis(theta) * cre(self.radius)
    }

    fn margin(&self) -> R {
        self.radius * lit(1e-6)
    }

    /// True if `z` lies strictly inside, with the safety margin.
    pub fn encloses(&self, z: C<R>) -> bool {
        modulus(z - self.center) < self.radius - self.margin()
    }

    /// True if `z` lies strictly outside, with the safety margin.
    pub fn excludes(&self, z: C<R>) -> bool {
        modulus(z - self.center) > self.radius + self.margin()
    }

    /// Errors unless every eigenvalue lies inside, away from the circle.
    pub fn check_encloses(&self, spectrum: &SpectrumResult<R>) -> Result<()> {
        for &l in &spectrum.eigenvalues {
            if !self.encloses(l) {
                if self.excludes(l) {
                    return Err(Error::Contour(format!(
                        "eigenvalue {}{:+}i lies outside the contour",
                        to_f64(l.re),
                        to_f64(l.im)
                    )));
                }
                return Err(Error::Contour(format!(
                    "contour intersects the spectrum near {}{:+}i",
                    to_f64(l.re),
                    to_f64(l.im)
                )));
            }
        }
        Ok(())
    }

    /// A circle around the origin enclosing every eigenvalue comfortably.
    pub fn around(spectrum: &SpectrumResult<R>) -> Result<Self> {
        Self::circle(cre(R::zero()), spectrum.radius() * lit(1.5) + R::one())
    }
}

/// Trapezoid mean `(1/n) Σ f(z_j)` of a scalar, refined by doubling until
/// the relative change drops below `1e-12`.
pub(crate) fn contour_mean<R: Real>(contour: &ContourSpec<R>, f: impl Fn(C<R>) -> Result<R> + Sync) -> Result<R> {
    let pass = |n: usize, offset: bool| -> Result<R> {
        let mut acc = R::zero();
        for j in 0..n {
            acc += f(contour.node(j, n, offset))?;
        }
        Ok(acc)
    };
    let mut n = contour.nodes;
    let mut sum = pass(n, false)?;
    let mut mean = sum / lit(n as f64);
    while n < MAX_SCALAR_NODES {
        sum += pass(n, true)?;
        n *= 2;
        let refined = sum / lit(n as f64);
        let change = (refined - mean).abs();
        mean = refined;
        if change <= lit::<R>(1e-12) * mean.abs() {
            break;
        }
    }
    Ok(mean)
}

/// Riesz-Dunford integral `(1/2πi)∮ g(z)(zId − T)⁻¹ dz` by trapezoid quadrature.
///
/// The contour must enclose the whole spectrum and `g` must be holomorphic
/// inside it. Node count doubles until the relative change is below `1e-8`.
pub fn apply_contour<R: Real>(
    g: &(dyn Fn(C<R>) -> C<R> + Sync),
    t: &DenseOperator<R>,
    contour: &ContourSpec<R>,
) -> Result<DenseOperator<R>> {
    let spectrum = t.spectrum()?;
    contour.check_encloses(&spectrum)?;
    let n_dim = t.dim();
    let pass = |n: usize, offset: bool| -> Result<CMatrix<R>> {
        let chunks: Vec<Result<CMatrix<R>>> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut acc = CMatrix::<R>::zeros(n_dim, n_dim);
                for j in c * CHUNK..((c + 1) * CHUNK).min(n) {
                    let z = contour.node(j, n, offset);
                    let r = t.resolvent(z)?;
                    let w = g(z) * (z - contour.center);
                    acc += r.matrix().map(|x| x * w);
                }
                Ok(acc)
            })
            .collect();
        let mut total = CMatrix::<R>::zeros(n_dim, n_dim);
        for c in chunks {
            total += c?;
        }
        Ok(total)
    };
    let mut n = contour.nodes;
    let mut sum = pass(n, false)?;
    let mut mean = sum.map(|x| x / cre(lit(n as f64)));
    while n < MAX_CONTOUR_NODES {
        sum += pass(n, true)?;
        n *= 2;
        let refined = sum.map(|x| x / cre(lit(n as f64)));
        let change = (&refined - &mean).norm();
        mean = refined;
        if change <= lit::<R>(1e-8) * mean.norm() {
            break;
        }
    }
    Ok(t.with_matrix(mean))
}

/// `Σ_{k≥1} |b_k| k C^{k−1}`.
pub fn seminorm_hol<R: Real>(g: &HolFilter<R>, c: R) -> R {
    let mut acc = R::zero();
    let mut pow = R::one();
    for (k, &b) in g.coeffs.iter().enumerate().skip(1) {
        acc += modulus(b) * lit::<R>(k as f64) * pow;
        pow *= c;
    }
    acc
}

/// `Σ_{μ+ν≥1} (μ+ν) C^{μ+ν−1} |a_{μν}|`.
pub fn seminorm_cont<R: Real>(g: &ContFilter<R>, c: R) -> R {
    g.coeffs
        .iter()
        .filter(|((m, n), _)| m + n >= 1)
        .fold(R::zero(), |acc, &((m, n), a)| {
            let k = (m + n) as i32;
            acc + lit::<R>(k as f64) * c.powi(k - 1) * modulus(a)
        })
}

/// `Σ_k |b_k| C^k`: bound on `‖g(T)‖` whenever `‖(T − ωId)⁻¹‖ ≤ C`.
pub fn hol_norm_bound<R: Real>(g: &HolFilter<R>, c: R) -> R {
    let mut acc = R::zero();
    let mut pow = R::one();
    for &b in &g.coeffs {
        acc += modulus(b) * pow;
        pow *= c;
    }
    acc
}

/// Context for [`filter_norm_bound`].
#[derive(Clone, Copy, Debug)]
pub enum NormContext<'a, R: Real> {
    /// `γ_T(ω) ≤ C`, for holomorphic and continuous filters.
    ResolventBound(R),
    /// `‖T‖ ≤ C`, for entire filters.
    OperatorNormBound(R),
    /// An explicit operator, for entire filters.
    Operator(&'a DenseOperator<R>),
    /// Contour integral of `|g| γ_T` around the spectrum.
    Contour {
        profile: &'a ResolventProfile<R>,
        contour: ContourSpec<R>,
    },
    /// Exact `max |g(λ)|` for a normal operator.
    Spectrum(&'a SpectrumResult<R>),
}

fn polynomial_norm<R: Real>(g: &EntireFilter<R>, c: R) -> R {
    let mut acc = R::zero();
    let mut pow = R::one();
    for &a in &g.coeffs {
        acc += modulus(a) * pow;
        pow *= c;
    }
    acc
}

/// Checks that `g` may be integrated over the contour for the operator whose
/// spectrum is given: the spectrum must lie inside. A Laurent pole must lie
/// outside, or inside with the whole spectrum outside.
pub(crate) fn check_contour_for<R: Real>(g: &Filter<R>, contour: &ContourSpec<R>, spectrum: &SpectrumResult<R>) -> Result<()> {
    let omega = g.omega();
    let inside = spectrum.eigenvalues.iter().all(|&l| contour.encloses(l));
    let outside = spectrum.eigenvalues.iter().all(|&l| contour.excludes(l));
    match omega {
        None => contour.check_encloses(spectrum),
        Some(w) if inside && contour.excludes(w) => Ok(()),
        Some(w) if outside && contour.encloses(w) => Ok(()),
        Some(_) => Err(Error::Contour(
            "contour must separate the pole from the whole spectrum".into(),
        )),
    }
}

fn value_at_infinity<R: Real>(g: &Filter<R>) -> R {
    match g {
        Filter::Hol(h) => modulus(h.at_infinity()),
        _ => R::zero(),
    }
}

/// Upper bound on `‖g(T)‖` in the given context.
pub fn filter_norm_bound<R: Real>(g: &Filter<R>, ctx: NormContext<'_, R>) -> Result<R> {
    match (g, ctx) {
        (Filter::Hol(h), NormContext::ResolventBound(c)) => Ok(hol_norm_bound(h, c)),
        (Filter::Cont(h), NormContext::ResolventBound(c)) => Ok(h
            .coeffs
            .iter()
            .fold(R::zero(), |acc, &((m, n), a)| acc + modulus(a) * c.powi((m + n) as i32))),
        (Filter::Entire(e), NormContext::OperatorNormBound(c)) => Ok(polynomial_norm(e, c)),
        (Filter::Entire(e), NormContext::Operator(t)) => Ok(polynomial_norm(e, t.op_norm())),
        (Filter::Entire(_) | Filter::Hol(_), NormContext::Contour { profile, contour }) => {
            check_contour_for(g, &contour, profile.spectrum())?;
            let mean = contour_mean(&contour, |z| Ok(modulus(g.eval(z)?) * profile.eval(z)?))?;
            Ok(value_at_infinity(g) + contour.radius * mean)
        }
        (_, NormContext::Spectrum(s)) => {
            if !s.is_normal() {
                return Err(Error::NonNormal);
            }
            s.eigenvalues
                .iter()
                .try_fold(R::zero(), |acc, &l| Ok(rmax(acc, modulus(g.eval(l)?))))
        }
        _ => Err(Error::InvalidArgument(format!(
            "no norm bound for a {:?} filter in this context",
            g.family()
        ))),
    }
}

/// Context for [`kg_constant`].
#[derive(Clone, Copy, Debug)]
pub enum KgContext<'a, R: Real> {
    /// Entire filter, `‖T‖, ‖T̃‖ ≤ C`: bounds against `‖TJ − JT̃‖`.
    EntireRadius(R),
    /// Contour around both spectra: `(1/2π)∮ γ_T γ_T̃ |g| d|z|`, against `‖TJ − JT̃‖`.
    ContourPair {
        first: &'a ResolventProfile<R>,
        second: &'a ResolventProfile<R>,
        contour: ContourSpec<R>,
    },
    /// `(1/2π)∮ (1 + |z−ω|γ_T)(1 + |z−ω|γ_T̃)|g| d|z|`, against `‖R_ω J − J R̃_ω‖`.
    Closeness {
        first: &'a ResolventProfile<R>,
        second: &'a ResolventProfile<R>,
        contour: ContourSpec<R>,
        omega: C<R>,
    },
    /// Laurent filter with `‖R_ω‖, ‖R̃_ω‖ ≤ C`, against `‖R_ω J − J R̃_ω‖`.
    HolSeminorm(R),
    /// Continuous filter on normal operators, doubly `ω`-close.
    ContSeminorm(R),
}

/// Perturbation constant of a filter in the given context.
pub fn kg_constant<R: Real>(g: &Filter<R>, ctx: KgContext<'_, R>) -> Result<R> {
    match (g, ctx) {
        (Filter::Entire(e), KgContext::EntireRadius(c)) => {
            let mut acc = R::zero();
            let mut pow = R::one();
            for (k, &a) in e.coeffs.iter().enumerate().skip(1) {
                acc += modulus(a) * lit::<R>(k as f64) * pow;
                pow *= c;
            }
            Ok(acc)
        }
        (Filter::Hol(h), KgContext::HolSeminorm(c)) => Ok(seminorm_hol(h, c)),
        (Filter::Cont(h), KgContext::ContSeminorm(c)) => Ok(seminorm_cont(h, c)),
        (Filter::Entire(_) | Filter::Hol(_), KgContext::ContourPair { first, second, contour }) => {
            check_contour_pair(g, &contour, first, second)?;
            let mean = contour_mean(&contour, |z| {
                Ok(first.eval(z)? * second.eval(z)? * modulus(g.eval(z)?))
            })?;
            Ok(contour.radius * mean)
        }
        (
            Filter::Entire(_) | Filter::Hol(_),
            KgContext::Closeness {
                first,
                second,
                contour,
                omega,
            },
        ) => {
            check_contour_pair(g, &contour, first, second)?;
            let mean = contour_mean(&contour, |z| {
                let d = modulus(z - omega);
                Ok((R::one() + d * first.eval(z)?) * (R::one() + d * second.eval(z)?) * modulus(g.eval(z)?))
            })?;
            Ok(contour.radius * mean)
        }
        _ => Err(Error::InvalidArgument(format!(
            "no perturbation constant for a {:?} filter in this context",
            g.family()
        ))),
    }
}

fn check_contour_pair<R: Real>(
    g: &Filter<R>,
    contour: &ContourSpec<R>,
    first: &ResolventProfile<R>,
    second: &ResolventProfile<R>,
) -> Result<()> {
    contour.check_encloses(first.spectrum())?;
    contour.check_encloses(second.spectrum())?;
    if let Some(w) = g.omega() {
        if !contour.excludes(w) {
            return Err(Error::Contour("the pole must lie outside the contour".into()));
        }
    }
    Ok(())
}

/// Lipschitz constant of a filter for the spectral perturbation bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzConstant {
    pub value: f64,
    /// True when the value came from sampling rather than exact cross pairs or a hint.
    pub estimated: bool,
}

/// `max |g(λ) − g(μ)| / |λ − μ|` over `λ ∈ σ(X)`, `μ ∈ σ(Y)`, `λ ≠ μ`.
///
/// This is exactly the constant the Frobenius bound
/// `‖g(X)J − Jg(Y)‖_F ≤ D ‖XJ − JY‖_F` needs for normal `X`, `Y`.
pub fn cross_spectral_lipschitz<R: Real>(g: &Filter<R>, first: &[C<R>], second: &[C<R>]) -> Result<R> {
    let ga: Vec<C<R>> = first.iter().map(|&l| g.eval(l)).collect::<Result<_>>()?;
    let gb: Vec<C<R>> = second.iter().map(|&l| g.eval(l)).collect::<Result<_>>()?;
    let mut best = R::zero();
    for (i, &a) in first.iter().enumerate() {
        for (j, &b) in second.iter().enumerate() {
            let d = modulus(a - b);
            if d > R::zero() {
                best = rmax(best, modulus(ga[i] - gb[j]) / d);
            }
        }
    }
    Ok(best)
}

/// Lipschitz constant used for generic filters: the hint if present, otherwise
/// the larger of the exact cross-pair value and a sampled slope over the convex
/// hull of the spectra (flagged as an estimate).
pub fn lipschitz_constant<R: Real>(
    g: &Filter<R>,
    first: &[C<R>],
    second: &[C<R>],
    rng: &mut impl Rng,
) -> Result<LipschitzConstant> {
    if let Filter::Generic(GenericFilter {
        lipschitz_hint: Some(d),
        ..
    }) = g
    {
        return Ok(LipschitzConstant {
            value: to_f64(*d),
            estimated: false,
        });
    }
    let exact = cross_spectral_lipschitz(g, first, second)?;
    if matches!(g, Filter::Generic(GenericFilter { rule: GenericRule::Table(_), .. })) {
        return Ok(LipschitzConstant {
            value: to_f64(exact),
            estimated: false,
        });
    }
    let pts: Vec<C<R>> = first.iter().chain(second.iter()).copied().collect();
    let sample = |rng: &mut dyn rand::RngCore| -> C<R> {
        let a = pts[rng.random_range(0..pts.len())];
        let b = pts[rng.random_range(0..pts.len())];
        let c = pts[rng.random_range(0..pts.len())];
        let mut w = [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()];
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        a * cre(lit(w[0])) + b * cre(lit(w[1])) + c * cre(lit(w[2]))
    };
    let mut best = exact;
    for _ in 0..10_000 {
        let x = sample(rng);
        let y = sample(rng);
        let d = modulus(x - y);
        if d > R::zero() {
            best = rmax(best, modulus(g.eval(x)? - g.eval(y)?) / d);
        }
    }
    Ok(LipschitzConstant {
        value: to_f64(best),
        estimated: true,
    })
}

/// A complex number on disk: a bare real or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexRepr {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexRepr {
    pub fn to_c<R: Real>(self) -> C<R> {
        match self {
            ComplexRepr::Real(x) => cre(lit(x)),
            ComplexRepr::Pair([a, b]) => cplx(lit(a), lit(b)),
        }
    }

    pub fn from_c<R: Real>(z: C<R>) -> Self {
        if z.im == R::zero() {
            ComplexRepr::Real(to_f64(z.re))
        } else {
            ComplexRepr::Pair([to_f64(z.re), to_f64(z.im)])
        }
    }
}

/// On-disk filter description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FilterFile {
    Entire {
        coeffs: Vec<ComplexRepr>,
    },
    Hol {
        omega: ComplexRepr,
        coeffs: Vec<ComplexRepr>,
    },
    Cont {
        omega: ComplexRepr,
        /// `[μ, ν, a_{μν}]` triples.
        coeffs: Vec<(u32, u32, ComplexRepr)>,
    },
    GenericTable {
        /// `[z, g(z)]` pairs.
        coeffs: Vec<(ComplexRepr, ComplexRepr)>,
        #[serde(default)]
        lipschitz: Option<f64>,
    },
}

impl FilterFile {
    pub fn build<R: Real>(&self) -> Result<Filter<R>> {
        let conv = |v: &[ComplexRepr]| v.iter().map(|c| c.to_c()).collect::<Vec<C<R>>>();
        Ok(match self {
            FilterFile::Entire { coeffs } => Filter::Entire(EntireFilter::new(conv(coeffs))),
            FilterFile::Hol { omega, coeffs } => Filter::Hol(HolFilter::new(omega.to_c(), conv(coeffs))),
            FilterFile::Cont { omega, coeffs } => Filter::Cont(ContFilter::new(
                omega.to_c(),
                coeffs.iter().map(|&(m, n, a)| ((m, n), a.to_c())).collect(),
            )),
            FilterFile::GenericTable { coeffs, lipschitz } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidFilter("empty table".into()));
                }
                Filter::Generic(GenericFilter {
                    rule: GenericRule::Table(coeffs.iter().map(|&(z, v)| (z.to_c(), v.to_c())).collect()),
                    lipschitz_hint: lipschitz.map(lit),
                })
            }
        })
    }

    /// Serializable form of a filter; closure-based generic filters have none.
    pub fn from_filter<R: Real>(g: &Filter<R>) -> Result<Self> {
        let conv = |v: &[C<R>]| v.iter().map(|&c| ComplexRepr::from_c(c)).collect::<Vec<_>>();
        Ok(match g {
            Filter::Entire(e) => FilterFile::Entire { coeffs: conv(&e.coeffs) },
            Filter::Hol(h) => FilterFile::Hol {
                omega: ComplexRepr::from_c(h.omega),
                coeffs: conv(&h.coeffs),
            },
            Filter::Cont(h) => FilterFile::Cont {
                omega: ComplexRepr::from_c(h.omega),
                coeffs: h.coeffs.iter().map(|&((m, n), a)| (m, n, ComplexRepr::from_c(a))).collect(),
            },
            Filter::Generic(GenericFilter {
                rule: GenericRule::Table(t),
                lipschitz_hint,
            }) => FilterFile::GenericTable {
                coeffs: t.iter().map(|&(z, v)| (ComplexRepr::from_c(z), ComplexRepr::from_c(v))).collect(),
                lipschitz: lipschitz_hint.map(to_f64),
            },
            Filter::Generic(_) => {
                return Err(Error::InvalidFilter("closure-based generic filters cannot be serialized".into()))
            }
        })
    }
}
