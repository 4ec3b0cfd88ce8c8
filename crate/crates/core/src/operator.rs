//! Dense operators between weighted signal spaces: adjoints, norms, spectra,
//! resolvents and resolvent profiles.
//!
//! Norms are always the ones induced by the weighted inner products. A map
//! `A: ℓ²(μ) → ℓ²(ν)` has the same singular values as the matrix
//! `N^{1/2} A M^{-1/2}`, which is what every norm routine works with.

use nalgebra::{Schur, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Signal, SignalSpace};
use crate::scalar::{cre, lit, modulus, rmax, to_f64, CMatrix, CVector, Real, C};

/// Default relative tolerance of the normality test for the scalar type.
pub fn default_normal_tol<R: Real>() -> R {
    rmax(lit(1e-10), R::default_epsilon() * lit(1e3))
}

/// Largest acceptable condition number of `zI − T`.
pub fn condition_limit<R: Real>() -> R {
    lit::<R>(0.0222) / R::default_epsilon()
}

/// A linear map `ℓ²(domain) → ℓ²(codomain)` stored as a dense complex matrix.
#[derive(Clone, Debug)]
pub struct DenseOperator<R: Real> {
    matrix: CMatrix<R>,
    domain: SignalSpace<R>,
    codomain: SignalSpace<R>,
}

impl<R: Real> DenseOperator<R> {
    pub fn new(matrix: CMatrix<R>, domain: &SignalSpace<R>, codomain: &SignalSpace<R>) -> Result<Self> {
        if matrix.ncols() != domain.dim() {
            return Err(Error::dim("operator columns vs domain", domain.dim(), matrix.ncols()));
        }
        if matrix.nrows() != codomain.dim() {
            return Err(Error::dim("operator rows vs codomain", codomain.dim(), matrix.nrows()));
        }
        Ok(Self {
            matrix,
            domain: domain.clone(),
            codomain: codomain.clone(),
        })
    }

    /// Square operator on a single space.
    pub fn on(space: &SignalSpace<R>, matrix: CMatrix<R>) -> Result<Self> {
        Self::new(matrix, space, space)
    }

    pub fn identity(space: &SignalSpace<R>) -> Self {
        let n = space.dim();
        Self {
            matrix: CMatrix::identity(n, n),
            domain: space.clone(),
            codomain: space.clone(),
        }
    }

    pub fn zero(domain: &SignalSpace<R>, codomain: &SignalSpace<R>) -> Self {
        Self {
            matrix: CMatrix::zeros(codomain.dim(), domain.dim()),
            domain: domain.clone(),
            codomain: codomain.clone(),
        }
    }

    pub fn matrix(&self) -> &CMatrix<R> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<R> {
        self.matrix
    }

    pub fn domain(&self) -> &SignalSpace<R> {
        &self.domain
    }

    pub fn codomain(&self) -> &SignalSpace<R> {
        &self.codomain
    }

    pub fn is_square(&self) -> bool {
        self.domain == self.codomain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!("{what} needs an operator on a single space")))
        }
    }

    pub fn apply(&self, f: &Signal<R>) -> Result<Signal<R>> {
        if f.space() != &self.domain {
            return Err(Error::SpaceMismatch("operator application".into()));
        }
        Signal::new(&self.codomain, &self.matrix * f.values())
    }

    pub fn apply_vec(&self, v: &CVector<R>) -> CVector<R> {
        &self.matrix * v
    }

    /// Weighted adjoint `A* = M_dom⁻¹ Aᴴ M_cod`.
    pub fn adjoint(&self) -> Self {
        let mut m = self.matrix.adjoint();
        let dom = self.domain.weights();
        let cod = self.codomain.weights();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[(i, j)] *= cre(cod[j] / dom[i]);
            }
        }
        Self {
            matrix: m,
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
        }
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if rhs.codomain != self.domain {
            return Err(Error::SpaceMismatch("composition".into()));
        }
        Ok(Self {
            matrix: &self.matrix * &rhs.matrix,
            domain: rhs.domain.clone(),
            codomain: self.codomain.clone(),
        })
    }

    fn same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::SpaceMismatch(what.into()));
        }
        Ok(())
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "operator sum")?;
        Ok(self.with_matrix(&self.matrix + &other.matrix))
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "operator difference")?;
        Ok(self.with_matrix(&self.matrix - &other.matrix))
    }

    pub fn scaled(&self, c: C<R>) -> Self {
        self.with_matrix(self.matrix.map(|x| x * c))
    }

    /// `self + c·Id`.
    pub fn shifted(&self, c: C<R>) -> Result<Self> {
        self.require_square("shift")?;
        let mut m = self.matrix.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += c;
        }
        Ok(self.with_matrix(m))
    }

    pub(crate) fn with_matrix(&self, matrix: CMatrix<R>) -> Self {
        Self {
            matrix,
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
        }
    }

    /// `M_cod^{1/2} A M_dom^{-1/2}`: the unweighted matrix with the same norms.
    pub fn sym_form(&self) -> CMatrix<R> {
        let l = self.codomain.sqrt_weights();
        let r = self.domain.sqrt_weights();
        let mut m = self.matrix.clone();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[(i, j)] *= cre(l[i] / r[j]);
            }
        }
        m
    }

    pub fn singular_values(&self) -> Vec<R> {
        let s = self.sym_form();
        if s.is_empty() {
            return Vec::new();
        }
        s.svd(false, false).singular_values.iter().copied().collect()
    }

    /// Weighted operator norm (largest singular value).
    pub fn op_norm(&self) -> R {
        self.singular_values().into_iter().fold(R::zero(), rmax)
    }

    pub fn frobenius_norm(&self) -> R {
        self.sym_form().norm()
    }

    /// Trace norm (sum of singular values).
    pub fn nuclear_norm(&self) -> R {
        self.singular_values().into_iter().fold(R::zero(), |a, b| a + b)
    }

    /// `‖T*T − TT*‖ / ‖T‖²`, zero for the zero operator.
    pub fn normality_defect(&self) -> Result<R> {
        self.require_square("normality test")?;
        let s = self.sym_form();
        let sh = s.adjoint();
        let comm = &sh * &s - &s * &sh;
        let norm = spectral_norm(&s);
        if norm == R::zero() {
            return Ok(R::zero());
        }
        Ok(spectral_norm(&comm) / (norm * norm))
    }

    pub fn is_normal(&self, tol: R) -> bool {
        matches!(self.normality_defect(), Ok(d) if d <= tol)
    }

    /// Self-adjointness in the weighted inner product, relative tolerance.
    pub fn is_self_adjoint(&self, tol: R) -> bool {
        if !self.is_square() {
            return false;
        }
        let s = self.sym_form();
        let scale = s.norm();
        (&s - s.adjoint()).norm() <= tol * rmax(scale, R::default_epsilon())
    }

    /// Eigenvalues, plus a weighted-orthonormal eigenbasis when the operator is normal.
    pub fn spectrum(&self) -> Result<SpectrumResult<R>> {
        self.spectrum_with_tol(default_normal_tol())
    }

    pub fn spectrum_with_tol(&self, normal_tol: R) -> Result<SpectrumResult<R>> {
        self.require_square("spectrum")?;
        let n = self.dim();
        let s = self.sym_form();
        let scale = rmax(s.norm(), R::one());
        let normal = self.normality_defect()? <= normal_tol;
        let herm_tol = rmax(lit(1e-12), R::default_epsilon() * lit(100.0));
        let hermitian = (&s - s.adjoint()).norm() <= herm_tol * scale;

        let (eigenvalues, q, residual) = if hermitian {
            let h = (&s + s.adjoint()).map(|z| z * cre(lit(0.5)));
            let eig = SymmetricEigen::try_new(h, R::default_epsilon(), 0)
                .ok_or(Error::EigenSolver { residual: f64::NAN })?;
            let vals: Vec<C<R>> = eig.eigenvalues.iter().map(|&x| cre(x)).collect();
            let q = eig.eigenvectors;
            let lam = CMatrix::from_diagonal(&CVector::from_vec(vals.clone()));
            let res = (&q * lam * q.adjoint() - &s).norm() / scale;
            (vals, q, res)
        } else {
            let schur = Schur::try_new(s.clone(), R::default_epsilon(), 0)
                .ok_or(Error::EigenSolver { residual: f64::NAN })?;
            let (q, t) = schur.unpack();
            let vals: Vec<C<R>> = (0..n).map(|i| t[(i, i)]).collect();
            let res = (&q * &t * q.adjoint() - &s).norm() / scale;
            (vals, q, res)
        };
        if !(residual <= rmax(lit(1e-8), R::default_epsilon() * lit(1e4))) {
            return Err(Error::EigenSolver {
                residual: to_f64(residual),
            });
        }
        let eigenvectors = if normal {
            let r = self.domain.sqrt_weights();
            let mut phi = q;
            for i in 0..n {
                for j in 0..n {
                    phi[(i, j)] /= cre(r[i]);
                }
            }
            Some(phi)
        } else {
            None
        };
        Ok(SpectrumResult {
            eigenvalues,
            eigenvectors,
            weights: self.domain.clone(),
            scale: spectral_norm(&s),
        })
    }

    /// `(zI − T)⁻¹`, rejecting ill-conditioned shifts.
    pub fn resolvent(&self, z: C<R>) -> Result<Self> {
        self.require_square("resolvent")?;
        let n = self.dim();
        let mut a = -self.matrix.clone();
        for i in 0..n {
            a[(i, i)] += z;
        }
        let zz = (to_f64(z.re), to_f64(z.im));
        let norm_a = one_norm(&a);
        let inv = a
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::singular(zz, "zI - T is not invertible"))?;
        let cond = norm_a * one_norm(&inv);
        if !(cond <= condition_limit::<R>()) {
            return Err(Error::singular(zz, format!("condition number {:e}", to_f64(cond))));
        }
        Ok(self.with_matrix(inv))
    }

    /// Resolvent with a distance check against a known spectrum.
    pub fn resolvent_checked(&self, z: C<R>, spectrum: &SpectrumResult<R>) -> Result<Self> {
        let d = spectrum.distance(z);
        if d < lit::<R>(1e-12) * (R::one() + spectrum.scale) {
            return Err(Error::singular(
                (to_f64(z.re), to_f64(z.im)),
                format!("distance {:e} to the spectrum", to_f64(d)),
            ));
        }
        self.resolvent(z)
    }
}

fn one_norm<R: Real>(m: &CMatrix<R>) -> R {
    m.column_iter()
        .map(|c| c.iter().fold(R::zero(), |a, z| a + modulus(*z)))
        .fold(R::zero(), rmax)
}

/// Largest singular value of an unweighted matrix.
pub(crate) fn spectral_norm<R: Real>(m: &CMatrix<R>) -> R {
    if m.is_empty() {
        return R::zero();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(R::zero(), rmax)
}

/// Eigenvalues of an operator, with an eigenbasis when it is normal.
#[derive(Clone, Debug)]
pub struct SpectrumResult<R: Real> {
    pub eigenvalues: Vec<C<R>>,
    /// Columns are eigenvectors, orthonormal in the weighted inner product.
    pub eigenvectors: Option<CMatrix<R>>,
    pub(crate) weights: SignalSpace<R>,
    pub(crate) scale: R,
}

impl<R: Real> SpectrumResult<R> {
    /// Builds a result from known eigenpairs (columns of `vectors`).
    pub fn from_parts(eigenvalues: Vec<C<R>>, eigenvectors: Option<CMatrix<R>>, space: &SignalSpace<R>) -> Self {
        let scale = eigenvalues.iter().map(|&z| modulus(z)).fold(R::zero(), rmax);
        Self {
            eigenvalues,
            eigenvectors,
            weights: space.clone(),
            scale,
        }
    }

    pub fn is_normal(&self) -> bool {
        self.eigenvectors.is_some()
    }

    /// `dist(z, σ(T))`.
    pub fn distance(&self, z: C<R>) -> R {
        self.eigenvalues
            .iter()
            .map(|&l| modulus(z - l))
            .fold(lit::<R>(f64::INFINITY), crate::scalar::rmin)
    }

    /// Largest eigenvalue modulus.
    pub fn radius(&self) -> R {
        self.scale_of_eigenvalues()
    }

    fn scale_of_eigenvalues(&self) -> R {
        self.eigenvalues.iter().map(|&z| modulus(z)).fold(R::zero(), rmax)
    }

    /// `Φ · diag(g(λ)) · Φ*` in the weighted sense. Requires a normal operator.
    pub fn apply_fn(&self, g: impl Fn(C<R>) -> C<R>) -> Result<CMatrix<R>> {
        let values: Vec<C<R>> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        self.apply_values(&values)
    }

    /// `Φ · diag(values) · Φ*`, one value per eigenvalue.
    pub fn apply_values(&self, values: &[C<R>]) -> Result<CMatrix<R>> {
        let phi = self.eigenvectors.as_ref().ok_or(Error::NonNormal)?;
        if values.len() != self.eigenvalues.len() {
            return Err(Error::dim("spectral values", self.eigenvalues.len(), values.len()));
        }
        let mu = self.weights.weights();
        let n = phi.nrows();
        let mut left = phi.clone();
        for (j, &gl) in values.iter().enumerate() {
            for i in 0..n {
                left[(i, j)] *= gl;
            }
        }
        let mut right = phi.adjoint();
        for i in 0..right.nrows() {
            for j in 0..n {
                right[(i, j)] *= cre(mu[j]);
            }
        }
        Ok(left * right)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMode {
    /// `1/dist(z, σ(T))`; exact for normal operators.
    NormalExact,
    /// `exp(2‖T‖₁/d)/d`, valid for every operator.
    GeneralBound,
}

/// Pointwise upper bound `γ_T(z) ≥ ‖R_z(T)‖` with the spectral data cached.
#[derive(Clone, Debug)]
pub struct ResolventProfile<R: Real> {
    spectrum: SpectrumResult<R>,
    nuclear: R,
    mode: ProfileMode,
}

impl<R: Real> ResolventProfile<R> {
    pub fn new(t: &DenseOperator<R>, mode: ProfileMode) -> Result<Self> {
        let spectrum = t.spectrum()?;
        let nuclear = match mode {
            ProfileMode::NormalExact => R::zero(),
            ProfileMode::GeneralBound => t.nuclear_norm(),
        };
        Ok(Self { spectrum, nuclear, mode })
    }

    /// Chooses the exact profile for normal operators and the general bound otherwise.
    pub fn auto(t: &DenseOperator<R>) -> Result<Self> {
        let spectrum = t.spectrum()?;
        if spectrum.is_normal() {
            Ok(Self {
                spectrum,
                nuclear: R::zero(),
                mode: ProfileMode::NormalExact,
            })
        } else {
            let nuclear = t.nuclear_norm();
            Ok(Self {
                spectrum,
                nuclear,
                mode: ProfileMode::GeneralBound,
            })
        }
    }

    pub fn mode(&self) -> ProfileMode {
        self.mode
    }

    pub fn spectrum(&self) -> &SpectrumResult<R> {
        &self.spectrum
    }

    pub fn eval(&self, z: C<R>) -> Result<R> {
        let d = self.spectrum.distance(z);
        if d < lit::<R>(1e-12) * (R::one() + self.spectrum.scale) {
            return Err(Error::singular(
                (to_f64(z.re), to_f64(z.im)),
                "resolvent profile evaluated on the spectrum",
            ));
        }
        Ok(match self.mode {
            ProfileMode::NormalExact => R::one() / d,
            ProfileMode::GeneralBound => (lit::<R>(2.0) * self.nuclear / d).exp() / d,
        })
    }
}

pub fn operator_norm<R: Real>(a: &DenseOperator<R>) -> R {
    a.op_norm()
}

pub fn is_normal<R: Real>(t: &DenseOperator<R>, tol: R) -> bool {
    t.is_normal(tol)
}

pub fn spectrum<R: Real>(t: &DenseOperator<R>) -> Result<SpectrumResult<R>> {
    t.spectrum()
}

pub fn resolvent<R: Real>(t: &DenseOperator<R>, z: C<R>) -> Result<DenseOperator<R>> {
    t.resolvent(z)
}

pub fn resolvent_profile<R: Real>(t: &DenseOperator<R>, z: C<R>, mode: ProfileMode) -> Result<R> {
    ResolventProfile::new(t, mode)?.eval(z)
}
