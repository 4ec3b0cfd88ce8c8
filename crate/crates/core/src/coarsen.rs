//! Edge-collapse coarse-graining.
//!
//! A fine graph `G̃` is split into latin nodes, one star node `⋆` and a
//! strongly connected greek block. The coarse graph keeps latin ∪ {⋆}; the
//! greek block is absorbed into `⋆`. Coarse nodes `g` carry harmonic
//! extensions `ψ_g` on `G̃` which define the identification maps
//! `J f = Σ f(g) ψ_g` and `J̃ u (g) = ⟨u, ψ_g⟩ / μ_g`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{characteristic_operator, OperatorKind, Signal, SignalSpace, WeightedGraph};
use crate::operator::DenseOperator;
use crate::scalar::{complexify, cplx, cre, lit, rmax, rmin, to_f64, CMatrix, Real, C};
use crate::stability::resolvent_closeness;

/// Tolerance for ψ entries leaving `[0, 1]`.
const PSI_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub latin: Vec<usize>,
    pub star: usize,
    pub greek: Vec<usize>,
}

impl Partition {
    pub fn new(latin: Vec<usize>, star: usize, greek: Vec<usize>) -> Self {
        Self { latin, star, greek }
    }

    /// Coarse node order: latin in the given order, then the star.
    pub fn coarse_nodes(&self) -> Vec<usize> {
        let mut v = self.latin.clone();
        v.push(self.star);
        v
    }

    pub fn coarse_len(&self) -> usize {
        self.latin.len() + 1
    }

    pub fn star_coarse_index(&self) -> usize {
        self.latin.len()
    }

    /// Checks disjointness, coverage and connectivity of greek ∪ {⋆}.
    pub fn validate<R: Real>(&self, fine: &WeightedGraph<R>) -> Result<()> {
        let n = fine.n();
        let mut seen = vec![false; n];
        for &i in self.latin.iter().chain(std::iter::once(&self.star)).chain(&self.greek) {
            if i >= n {
                return Err(Error::InvalidPartition(format!("node {i} out of range for {n} nodes")));
            }
            if seen[i] {
                return Err(Error::InvalidPartition(format!("node {i} listed twice")));
            }
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("node {i} not assigned")));
        }
        if fine.is_directed() {
            return Err(Error::DirectedGraph("edge collapse"));
        }
        let block: Vec<usize> = std::iter::once(self.star).chain(self.greek.iter().copied()).collect();
        let w = fine.adjacency();
        let mut reached = vec![false; block.len()];
        reached[0] = true;
        let mut stack = vec![0usize];
        while let Some(a) = stack.pop() {
            for (b, r) in reached.iter_mut().enumerate() {
                if !*r && w[(block[a], block[b])] > R::zero() {
                    *r = true;
                    stack.push(b);
                }
            }
        }
        if let Some(b) = reached.iter().position(|r| !r) {
            return Err(Error::InvalidPartition(format!(
                "greek node {} is not connected to the star within the collapsed block",
                block[b]
            )));
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Coarse graph on latin ∪ {⋆} with the collapsed edge weights
/// `W_{⋆a} = W̃_{a⋆} + Σ_β W̃_{aβ}` and latin-latin weights copied.
///
/// Node weights are the strong-coupling limit `μ̃_a` for latin nodes and
/// `μ̃_⋆ + Σ μ̃_β` for the star; [`collapse`] replaces them by [`mu_from_psi`].
pub fn collapse_weights<R: Real>(fine: &WeightedGraph<R>, p: &Partition) -> Result<WeightedGraph<R>> {
    p.validate(fine)?;
    let w = fine.adjacency();
    let m = p.coarse_len();
    let s = p.star_coarse_index();
    let mut cw = DMatrix::<R>::zeros(m, m);
    for (i, &a) in p.latin.iter().enumerate() {
        for (j, &b) in p.latin.iter().enumerate() {
            cw[(i, j)] = w[(a, b)];
        }
        let to_star = p.greek.iter().fold(w[(a, p.star)], |acc, &beta| acc + w[(a, beta)]);
        cw[(i, s)] = to_star;
        cw[(s, i)] = to_star;
    }
    let mu = fine.mu();
    let mut cmu = DVector::<R>::zeros(m);
    for (i, &a) in p.latin.iter().enumerate() {
        cmu[i] = mu[a];
    }
    cmu[s] = p.greek.iter().fold(mu[p.star], |acc, &beta| acc + mu[beta]);
    WeightedGraph::undirected(cw, cmu)
}

/// Harmonic extensions as columns: `ψ[(h, g)] = ψ_g(h)` for fine `h`, coarse `g`.
pub fn psi_matrix<R: Real>(fine: &WeightedGraph<R>, p: &Partition) -> Result<DMatrix<R>> {
    p.validate(fine)?;
    let w = fine.adjacency();
    let d = fine.degrees();
    let coarse = p.coarse_nodes();
    let k = p.greek.len();
    let mut psi = DMatrix::<R>::zeros(fine.n(), coarse.len());
    for (g, &node) in coarse.iter().enumerate() {
        psi[(node, g)] = R::one();
    }
    if k == 0 {
        return Ok(psi);
    }
    let mut a = DMatrix::<R>::zeros(k, k);
    for (i, &alpha) in p.greek.iter().enumerate() {
        for (j, &beta) in p.greek.iter().enumerate() {
            a[(i, j)] = if i == j { d[alpha] } else { -w[(alpha, beta)] };
        }
    }
    let rhs = DMatrix::<R>::from_fn(k, coarse.len(), |i, g| w[(p.greek[i], coarse[g])]);
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::singular((0.0, 0.0), "greek block system is singular; is the block connected to the rest of the graph?"))?;
    let tol: R = lit(PSI_TOL);
    for (i, &alpha) in p.greek.iter().enumerate() {
        for g in 0..coarse.len() {
            let v = sol[(i, g)];
            if !v.is_finite() || v < -tol || v > R::one() + tol {
                return Err(Error::singular(
                    (0.0, 0.0),
                    format!("harmonic extension entry {} at node {alpha} outside [0, 1]", to_f64(v)),
                ));
            }
            psi[(alpha, g)] = rmin(rmax(v, R::zero()), R::one());
        }
    }
    Ok(psi)
}

/// The signals `ψ_g` on the fine graph, in coarse node order.
pub fn solve_psi<R: Real>(fine: &WeightedGraph<R>, p: &Partition) -> Result<Vec<Signal<R>>> {
    let psi = psi_matrix(fine, p)?;
    (0..psi.ncols())
        .map(|g| Signal::new(fine.space(), psi.column(g).map(cre)))
        .collect()
}

fn psi_from_signals<R: Real>(fine: &WeightedGraph<R>, psi: &[Signal<R>]) -> Result<DMatrix<R>> {
    let mut m = DMatrix::<R>::zeros(fine.n(), psi.len());
    for (g, s) in psi.iter().enumerate() {
        if s.len() != fine.n() {
            return Err(Error::dim("harmonic extension length", fine.n(), s.len()));
        }
        for h in 0..fine.n() {
            m[(h, g)] = s.values()[h].re;
        }
    }
    Ok(m)
}

/// `μ_g = Σ_h ψ_g(h) μ̃_h`.
pub fn mu_from_psi<R: Real>(fine: &WeightedGraph<R>, psi: &[Signal<R>]) -> Result<DVector<R>> {
    let m = psi_from_signals(fine, psi)?;
    Ok(m.tr_mul(fine.mu()))
}

/// `‖Σ_g ψ_g − 1‖_∞`.
pub fn partition_of_unity_residual<R: Real>(psi: &DMatrix<R>) -> R {
    psi.row_iter()
        .map(|row| (row.sum() - R::one()).abs())
        .fold(R::zero(), rmax)
}

/// `J: ℓ²(G) → ℓ²(G̃)` with columns `ψ_g`, and `J̃ u (g) = ⟨u, ψ_g⟩ / μ_g`.
///
/// `J̃` is the weighted adjoint of `J` when `mu_delta` matches the coarse node weights.
pub fn identification_ops<R: Real>(
    fine: &WeightedGraph<R>,
    coarse: &WeightedGraph<R>,
    psi: &[Signal<R>],
    mu_delta: &DVector<R>,
) -> Result<(DenseOperator<R>, DenseOperator<R>)> {
    let m = psi_from_signals(fine, psi)?;
    if m.ncols() != coarse.n() || mu_delta.len() != coarse.n() {
        return Err(Error::dim("coarse node count", coarse.n(), m.ncols()));
    }
    let j = DenseOperator::new(complexify(&m), coarse.space(), fine.space())?;
    let mu = fine.mu();
    let jt = DMatrix::<R>::from_fn(coarse.n(), fine.n(), |g, h| m[(h, g)] * mu[h] / mu_delta[g]);
    let jt = DenseOperator::new(complexify(&jt), fine.space(), coarse.space())?;
    Ok((j, jt))
}

/// Fine graph, coarse graph and the maps between them.
#[derive(Clone, Debug)]
pub struct CollapsePair<R: Real> {
    pub fine: WeightedGraph<R>,
    pub coarse: WeightedGraph<R>,
    pub partition: Partition,
    pub psi: Vec<Signal<R>>,
    pub mu_delta: DVector<R>,
    pub j: DenseOperator<R>,
    pub jt: DenseOperator<R>,
}

/// Full collapse with coarse node weights `μ^δ` from the harmonic extensions.
pub fn collapse<R: Real>(fine: &WeightedGraph<R>, p: &Partition) -> Result<CollapsePair<R>> {
    let limit = collapse_weights(fine, p)?;
    let psi = solve_psi(fine, p)?;
    let mu_delta = mu_from_psi(fine, &psi)?;
    CollapsePair::assemble(fine, p, &limit, psi, mu_delta)
}

impl<R: Real> CollapsePair<R> {
    fn assemble(
        fine: &WeightedGraph<R>,
        p: &Partition,
        limit: &WeightedGraph<R>,
        psi: Vec<Signal<R>>,
        mu_delta: DVector<R>,
    ) -> Result<Self> {
        let coarse = limit.with_mu(mu_delta.clone())?;
        let (j, jt) = identification_ops(fine, &coarse, &psi, &mu_delta)?;
        Ok(Self {
            fine: fine.clone(),
            coarse,
            partition: p.clone(),
            psi,
            mu_delta,
            j,
            jt,
        })
    }

    /// Same collapse with explicitly chosen coarse node weights.
    pub fn with_coarse_mu(&self, mu: DVector<R>) -> Result<Self> {
        let limit = self.coarse.clone();
        Self::assemble(&self.fine, &self.partition, &limit, self.psi.clone(), mu)
    }

    pub fn psi_matrix(&self) -> DMatrix<R> {
        psi_from_signals(&self.fine, &self.psi).expect("validated at construction")
    }

    pub fn partition_of_unity_residual(&self) -> R {
        partition_of_unity_residual(&self.psi_matrix())
    }

    /// Coarse and fine operators of the given kind.
    pub fn operators(&self, kind: OperatorKind) -> Result<(DenseOperator<R>, DenseOperator<R>)> {
        Ok((
            coarse_operator(&self.coarse, kind)?,
            characteristic_operator(&self.fine, kind)?,
        ))
    }
}

/// Characteristic operator, with edgeless nodes mapped to zero rows for the
/// normalized Laplacian (its formula divides by the degree).
pub fn coarse_operator<R: Real>(graph: &WeightedGraph<R>, kind: OperatorKind) -> Result<DenseOperator<R>> {
    match characteristic_operator(graph, kind) {
        Err(Error::IsolatedNode { .. }) if kind == OperatorKind::NormalizedLaplacian => {
            let d = graph.degrees();
            let w = graph.adjacency();
            let mu = graph.mu();
            let n = graph.n();
            let s = d.map(|x| if x > R::zero() { R::one() / x.sqrt() } else { R::zero() });
            let m = CMatrix::<R>::from_fn(n, n, |i, j| {
                let lap = if i == j { d[i] - w[(i, j)] } else { -w[(i, j)] };
                cre(s[i] * lap * s[j] / mu[i])
            });
            DenseOperator::on(graph.space(), m)
        }
        other => other,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiUnitarity {
    pub eps: f64,
    /// `‖J − J̃*‖`.
    pub adjoint_defect: f64,
    /// `‖(Id − J̃J) R_ω‖` on the coarse side.
    pub coarse_defect: f64,
    /// `‖(Id − JJ̃) R̃_ω‖` on the fine side.
    pub fine_defect: f64,
    pub j_norm: f64,
    pub j_norm_ok: bool,
}

/// Quasi-unitarity of `J: ℓ²(G) → ℓ²(G̃)`, `J̃` with respect to `T` on `G` and `T2` on `G̃`.
pub fn quasi_unitarity_epsilon<R: Real>(
    j: &DenseOperator<R>,
    jt: &DenseOperator<R>,
    t: &DenseOperator<R>,
    t2: &DenseOperator<R>,
    omega: C<R>,
) -> Result<QuasiUnitarity> {
    let adjoint_defect = to_f64(j.minus(&jt.adjoint())?.op_norm());
    let r = t.resolvent(omega)?;
    let r2 = t2.resolvent(omega)?;
    let id = DenseOperator::identity(t.domain());
    let id2 = DenseOperator::identity(t2.domain());
    let coarse_defect = to_f64(id.minus(&jt.compose(j)?)?.compose(&r)?.op_norm());
    let fine_defect = to_f64(id2.minus(&j.compose(jt)?)?.compose(&r2)?.op_norm());
    let j_norm = to_f64(j.op_norm());
    Ok(QuasiUnitarity {
        eps: adjoint_defect.max(coarse_defect).max(fine_defect),
        adjoint_defect,
        coarse_defect,
        fine_defect,
        j_norm,
        j_norm_ok: j_norm <= 2.0,
    })
}

/// The four energy-norm conditions sufficient for Laplacian closeness,
/// with `J¹ = J` and `J̃¹` the restriction to latin ∪ {⋆}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyConditions {
    /// `max(‖J‖ − 1, 0)` and `‖J − J̃*‖`.
    pub norm_and_adjoint: f64,
    /// `‖Id − J̃J‖` and `‖Id − JJ̃‖` from the energy norm into `ℓ²`.
    pub approximate_inverse: f64,
    /// `‖J̃ − J̃¹‖` from the fine energy norm.
    pub restriction: f64,
    /// Energy-form intertwining defect.
    pub energy_form: f64,
    /// Largest of the four.
    pub eps: f64,
    /// Closeness implied at `ω = −1`: `12·eps`.
    pub implied_closeness: f64,
}

/// `(Id + Δ)^{-1/2}` for a self-adjoint nonnegative Laplacian.
fn energy_smoother<R: Real>(lap: &DenseOperator<R>) -> Result<DenseOperator<R>> {
    let s = lap.spectrum()?;
    let m = s.apply_fn(|z| cre(R::one() / (R::one() + rmax(z.re, R::zero())).sqrt()))?;
    DenseOperator::on(lap.domain(), m)
}

pub fn energy_conditions_report<R: Real>(pair: &CollapsePair<R>) -> Result<EnergyConditions> {
    let (lap, lap2) = pair.operators(OperatorKind::Laplacian)?;
    let (j, jt) = (&pair.j, &pair.jt);
    let h = energy_smoother(&lap)?;
    let h2 = energy_smoother(&lap2)?;

    let c11 = rmax(j.op_norm() - R::one(), R::zero());
    let c11 = rmax(c11, j.minus(&jt.adjoint())?.op_norm());

    let id = DenseOperator::identity(lap.domain());
    let id2 = DenseOperator::identity(lap2.domain());
    let c22 = rmax(
        id.minus(&jt.compose(j)?)?.compose(&h)?.op_norm(),
        id2.minus(&j.compose(jt)?)?.compose(&h2)?.op_norm(),
    );

    let coarse = pair.partition.coarse_nodes();
    let restrict = CMatrix::<R>::from_fn(coarse.len(), pair.fine.n(), |g, x| {
        if coarse[g] == x {
            cre(R::one())
        } else {
            cre(R::zero())
        }
    });
    let j1t = DenseOperator::new(restrict, lap2.domain(), lap.domain())?;
    let c33 = jt.minus(&j1t)?.compose(&h2)?.op_norm();

    // E_G̃(Jf, u) − E_G(f, J̃¹u) = ⟨f, (J*Δ̃ − ΔJ̃¹) u⟩
    let form = j.adjoint().compose(&lap2)?.minus(&lap.compose(&j1t)?)?;
    let c44 = h.compose(&form)?.compose(&h2)?.op_norm();

    let eps = rmax(rmax(c11, c22), rmax(c33, c44));
    Ok(EnergyConditions {
        norm_and_adjoint: to_f64(c11),
        approximate_inverse: to_f64(c22),
        restriction: to_f64(c33),
        energy_form: to_f64(c44),
        eps: to_f64(eps),
        implied_closeness: 12.0 * to_f64(eps),
    })
}

/// Divides every edge weight inside greek ∪ {⋆} by `delta`.
pub fn scale_collapsed_block<R: Real>(base: &WeightedGraph<R>, p: &Partition, delta: R) -> Result<WeightedGraph<R>> {
    if !(delta > R::zero()) {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let mut inside = vec![false; base.n()];
    inside[p.star] = true;
    for &b in &p.greek {
        inside[b] = true;
    }
    let w = DMatrix::from_fn(base.n(), base.n(), |i, j| {
        let x = base.adjacency()[(i, j)];
        if inside[i] && inside[j] {
            x / delta
        } else {
            x
        }
    });
    WeightedGraph::new(w, base.mu().clone(), base.is_directed())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub eps_quasi: f64,
    pub eps_close: f64,
    pub j_norm: f64,
    pub partition_residual: f64,
}

fn sweep_point<R: Real>(fine: &WeightedGraph<R>, p: &Partition, kind: OperatorKind, omega: C<R>, delta: f64) -> Result<SweepRow> {
    let pair = collapse(fine, p)?;
    let (t, t2) = pair.operators(kind)?;
    let q = quasi_unitarity_epsilon(&pair.j, &pair.jt, &t, &t2, omega)?;
    let close = resolvent_closeness(&pair.j, &t, &t2, omega, false)?;
    Ok(SweepRow {
        delta,
        eps_quasi: q.eps,
        eps_close: to_f64(close),
        j_norm: q.j_norm,
        partition_residual: to_f64(pair.partition_of_unity_residual()),
    })
}

/// Collapse measurements along a δ grid; the block weights of `base` are divided by each δ.
pub fn delta_sweep<R: Real>(
    base: &WeightedGraph<R>,
    p: &Partition,
    kind: OperatorKind,
    omega: C<R>,
    grid: &[f64],
) -> Result<Vec<SweepRow>> {
    grid.par_iter()
        .map(|&delta| {
            let fine = scale_collapsed_block(base, p, lit(delta))?;
            sweep_point(&fine, p, kind, omega, delta)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub delta: f64,
    pub eps_quasi: f64,
    pub eps_close: f64,
}

impl ProbeRow {
    pub fn eps(&self) -> f64 {
        self.eps_quasi.max(self.eps_close)
    }
}

/// Default `ω` for a probe operator kind: `−1` for Laplacians, `i` otherwise.
pub fn probe_omega<R: Real>(kind: OperatorKind) -> C<R> {
    match kind {
        OperatorKind::Adjacency => cplx(R::zero(), R::one()),
        _ => cre(-R::one()),
    }
}

/// Collapse of the two-node graph with edge weight `1/δ` onto a single node.
///
/// For adjacency and normalized Laplacians the measured `ε` stays bounded
/// away from zero; the Laplacian is the decaying control.
pub fn negative_result_probe<R: Real>(kind: OperatorKind, delta_grid: &[f64]) -> Result<Vec<ProbeRow>> {
    let p = Partition::new(vec![], 0, vec![1]);
    let omega = probe_omega::<R>(kind);
    delta_grid
        .par_iter()
        .map(|&delta| {
            if !(delta > 0.0) {
                return Err(Error::InvalidArgument("delta must be positive".into()));
            }
            let w: R = lit(1.0 / delta);
            let fine = WeightedGraph::unweighted_nodes(DMatrix::from_row_slice(2, 2, &[R::zero(), w, w, R::zero()]))?;
            let row = sweep_point(&fine, &p, kind, omega, delta)?;
            Ok(ProbeRow {
                delta,
                eps_quasi: row.eps_quasi,
                eps_close: row.eps_close,
            })
        })
        .collect()
}

/// Restricts a fine signal to the coarse nodes; used for diagnostics.
pub fn restrict<R: Real>(u: &Signal<R>, p: &Partition, coarse: &SignalSpace<R>) -> Result<Signal<R>> {
    let v = p.coarse_nodes().iter().map(|&i| u.values()[i]).collect::<Vec<_>>();
    Signal::new(coarse, DVector::from_vec(v))
}
