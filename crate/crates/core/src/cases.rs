//! Concrete transfer settings: cycle graphs discretizing the circle and
//! Coulomb-type molecular graphs.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::coarsen::Partition;
use crate::error::{Error, Result};
use crate::graph::{SignalSpace, WeightedGraph};
use crate::operator::{DenseOperator, SpectrumResult};
use crate::scalar::{cis, cre, lit, CMatrix, Real};

/// Closed path on `n` nodes (odd, at least 3) with edge weights `(n / 2π)²` and unit node weights.
pub fn cycle_graph<R: Real>(n: usize) -> Result<WeightedGraph<R>> {
    check_cycle(n)?;
    ring_graph(n)
}

/// Same weights as [`cycle_graph`] for any `n ≥ 3`; the even partner of an odd cycle.
pub fn ring_graph<R: Real>(n: usize) -> Result<WeightedGraph<R>> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("ring needs at least 3 nodes, got {n}")));
    }
    let h = lit::<R>(n as f64 / (2.0 * std::f64::consts::PI));
    let w = h * h;
    let mut a = DMatrix::<R>::zeros(n, n);
    for i in 0..n {
        let j = (i + 1) % n;
        a[(i, j)] = w;
        a[(j, i)] = w;
    }
    WeightedGraph::unweighted_nodes(a)
}

fn check_cycle(n: usize) -> Result<()> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "cycle size must be odd and at least 3 so the Laplacian eigenspaces pair up, got {n}"
        )));
    }
    Ok(())
}

/// `λ_k = (n²/π²) sin²(πk/n)`.
pub fn cycle_eigenvalue(n: usize, k: usize) -> f64 {
    let s = (std::f64::consts::PI * k as f64 / n as f64).sin();
    (n * n) as f64 / (std::f64::consts::PI * std::f64::consts::PI) * s * s
}

/// Fourier modes `φ_k(x) = e^{2πikx/n} / √n` as columns, `k = 0..n`.
fn fourier_basis<R: Real>(n: usize) -> CMatrix<R> {
    let norm = lit::<R>(1.0 / (n as f64).sqrt());
    CMatrix::from_fn(n, n, |x, k| {
        // reduce before converting so large n keeps full phase accuracy
        let phase = ((k * x) % n) as f64 / n as f64 * 2.0 * std::f64::consts::PI;
        cis(lit::<R>(phase)) * norm
    })
}

/// Analytic eigenpairs of the cycle Laplacian.
pub fn cycle_eigenpairs<R: Real>(n: usize) -> Result<SpectrumResult<R>> {
    check_cycle(n)?;
    let values = (0..n).map(|k| cre(lit(cycle_eigenvalue(n, k)))).collect();
    Ok(SpectrumResult::from_parts(values, Some(fourier_basis(n)), &SignalSpace::uniform(n)))
}

/// Mode index of `φ^n_k` inside the `n + 1` cycle.
fn shifted_mode(n: usize, k: usize) -> usize {
    if 2 * k < n {
        k
    } else {
        k + 1
    }
}

/// `J` sending `φ^n_k` to the matching mode of the `n + 1` cycle, and its adjoint.
///
/// The mode `(n + 1) / 2` of the larger cycle is not in the range of `J`.
pub fn circle_identification<R: Real>(n: usize) -> Result<(DenseOperator<R>, DenseOperator<R>)> {
    check_cycle(n)?;
    let small = fourier_basis::<R>(n);
    let large = fourier_basis::<R>(n + 1);
    let mut selected = CMatrix::<R>::zeros(n + 1, n);
    for k in 0..n {
        selected.set_column(k, &large.column(shifted_mode(n, k)));
    }
    let j = selected * small.adjoint();
    let j = DenseOperator::new(j, &SignalSpace::uniform(n), &SignalSpace::uniform(n + 1))?;
    let jt = j.adjoint();
    Ok((j, jt))
}

/// Atoms with charges `Z`, positions `X` and optional labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Molecule {
    #[serde(rename = "Z")]
    pub charges: Vec<f64>,
    #[serde(rename = "X")]
    pub positions: Vec<[f64; 3]>,
    #[serde(default)]
    pub names: Vec<String>,
}

const METHANE: &str = include_str!("../data/methane.json");

impl Molecule {
    pub fn new(charges: Vec<f64>, positions: Vec<[f64; 3]>) -> Result<Self> {
        let m = Self {
            charges,
            positions,
            names: Vec::new(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    /// Carbon at the origin, four hydrogens on a regular tetrahedron at distance 1.09.
    pub fn methane() -> Self {
        Self::from_json_str(METHANE).expect("bundled methane geometry is valid")
    }

    pub fn len(&self) -> usize {
        self.charges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charges.is_empty()
    }

    fn validate(&self) -> Result<()> {
        if self.positions.len() != self.charges.len() {
            return Err(Error::dim("atom positions", self.charges.len(), self.positions.len()));
        }
        if !self.names.is_empty() && self.names.len() != self.charges.len() {
            return Err(Error::dim("atom names", self.charges.len(), self.names.len()));
        }
        if let Some(i) = self.charges.iter().position(|&z| !(z > 0.0) || !z.is_finite()) {
            return Err(Error::InvalidArgument(format!("atom {i} has nonpositive charge")));
        }
        for i in 0..self.len() {
            for j in 0..i {
                if !(self.distance(i, j) > 0.0) {
                    return Err(Error::InvalidArgument(format!("atoms {j} and {i} coincide")));
                }
            }
        }
        Ok(())
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.positions[i], self.positions[j]);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }
}

/// `W_ij = Z_i Z_j / |x_i − x_j|`, `μ_i = Z_i`.
pub fn molecular_graph<R: Real>(m: &Molecule) -> Result<WeightedGraph<R>> {
    m.validate()?;
    let n = m.len();
    let w = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            R::zero()
        } else {
            lit(m.charges[i] * m.charges[j] / m.distance(i, j))
        }
    });
    let mu = DVector::from_iterator(n, m.charges.iter().map(|&z| lit(z)));
    WeightedGraph::undirected(w, mu)
}

/// Moves `atom` a fraction `t` of the way towards `target`.
pub fn deflect(m: &Molecule, atom: usize, target: usize, t: f64) -> Result<Molecule> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("deflection must lie in [0, 1), got {t}")));
    }
    if atom >= m.len() || target >= m.len() {
        return Err(Error::InvalidArgument("atom index out of range".into()));
    }
    let mut out = m.clone();
    let (a, b) = (m.positions[atom], m.positions[target]);
    for c in 0..3 {
        out.positions[atom][c] = (1.0 - t) * a[c] + t * b[c];
    }
    out.validate()?;
    Ok(out)
}

/// Merges the atoms in `merge` into one atom placed at `star`'s position with
/// the summed charge. The merged atom comes last, after the remaining atoms
/// in their original order; the returned partition describes the collapse on
/// the original molecule's graph with the same node order.
pub fn effective_molecule(m: &Molecule, merge: &[usize], star: usize) -> Result<(Molecule, Partition)> {
    if merge.is_empty() || !merge.contains(&star) {
        return Err(Error::InvalidArgument("merge set must be nonempty and contain the star atom".into()));
    }
    if merge.iter().any(|&i| i >= m.len()) {
        return Err(Error::InvalidArgument("merge index out of range".into()));
    }
    let latin: Vec<usize> = (0..m.len()).filter(|i| !merge.contains(i)).collect();
    let mut greek: Vec<usize> = merge.iter().copied().filter(|&i| i != star).collect();
    greek.sort_unstable();
    greek.dedup();
    let mut out = Molecule {
        charges: latin.iter().map(|&i| m.charges[i]).collect(),
        positions: latin.iter().map(|&i| m.positions[i]).collect(),
        names: Vec::new(),
    };
    out.charges.push(m.charges[star] + greek.iter().map(|&i| m.charges[i]).sum::<f64>());
    out.positions.push(m.positions[star]);
    if !m.names.is_empty() {
        out.names = latin.iter().map(|&i| m.names[i].clone()).collect();
        let mut merged: Vec<&str> = vec![&m.names[star]];
        merged.extend(greek.iter().map(|&i| m.names[i].as_str()));
        out.names.push(merged.join("+"));
    }
    out.validate()?;
    Ok((out, Partition::new(latin, star, greek)))
}
