//! Sweep experiments producing plot-ready tables, and the network-file
//! driven stability report.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cases::{circle_identification, cycle_graph, deflect, effective_molecule, molecular_graph, ring_graph, Molecule};
use crate::coarsen::{collapse, collapse_weights, negative_result_probe, quasi_unitarity_epsilon, psi_matrix, scale_collapsed_block, CollapsePair, Partition};
use crate::error::{Error, Result};
use crate::filters::{ComplexRepr, EntireFilter, Filter, FilterFile, HolFilter};
use crate::graph::{characteristic_operator, GraphFile, OperatorKind, SignalSpace, WeightedGraph};
use crate::network::{aggregate, aggregate_distance, BoundMode, ConnectingOp, FeatureBundle, Layer, Network, Nonlinearity};
use crate::operator::DenseOperator;
use crate::sampling::{derived_rng, real_unit_bundle};
use crate::scalar::{complexify, cplx, cre, C};
use crate::stability::{empirical_lipschitz, resolvent_closeness, signal_bound, BoundReport, DEFAULT_SAMPLES};

/// Five-node test graph for the scaling experiment.
pub const SCALING_ADJACENCY: [[f64; 5]; 5] = [
    [0.0, 16.0, 7.0, 18.0, 19.0],
    [16.0, 0.0, 6.0, 22.0, 3.0],
    [7.0, 6.0, 0.0, 1.0, 90.0],
    [18.0, 22.0, 1.0, 0.0, 23.0],
    [19.0, 3.0, 90.0, 23.0, 0.0],
];

/// Eight-node collapse graph before the block `{3..8}` is divided by `δ`.
pub const COLLAPSE_BASE: [[f64; 8]; 8] = [
    [0.0, 4.0, 2.0, 10.0, 4.0, 5.0, 6.0, 7.0],
    [4.0, 0.0, 17.0, 9.0, 8.0, 9.0, 10.0, 11.0],
    [2.0, 17.0, 0.0, 42.0, 12.0, 13.0, 14.0, 15.0],
    [10.0, 9.0, 42.0, 0.0, 16.0, 7.0, 18.0, 19.0],
    [4.0, 8.0, 12.0, 16.0, 0.0, 6.0, 22.0, 3.0],
    [5.0, 9.0, 13.0, 7.0, 6.0, 0.0, 1.0, 90.0],
    [6.0, 10.0, 14.0, 18.0, 22.0, 1.0, 0.0, 23.0],
    [7.0, 11.0, 15.0, 19.0, 3.0, 90.0, 23.0, 0.0],
];

pub fn scaling_graph() -> WeightedGraph<f64> {
    let w = DMatrix::from_fn(5, 5, |i, j| SCALING_ADJACENCY[i][j]);
    WeightedGraph::unweighted_nodes(w).expect("constant graph is valid")
}

pub fn collapse_base_graph() -> WeightedGraph<f64> {
    let w = DMatrix::from_fn(8, 8, |i, j| COLLAPSE_BASE[i][j]);
    WeightedGraph::unweighted_nodes(w).expect("constant graph is valid")
}

pub fn collapse_partition() -> Partition {
    Partition::new(vec![0, 1, 2], 3, vec![4, 5, 6, 7])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ExpScaling,
    ExpCollapse,
    ExpCircle,
    ExpMolecule,
    ExpNegative,
    StabilityReport,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::ExpScaling,
        Experiment::ExpCollapse,
        Experiment::ExpCircle,
        Experiment::ExpMolecule,
        Experiment::ExpNegative,
        Experiment::StabilityReport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ExpScaling => "exp-scaling",
            Experiment::ExpCollapse => "exp-collapse",
            Experiment::ExpCircle => "exp-circle",
            Experiment::ExpMolecule => "exp-molecule",
            Experiment::ExpNegative => "exp-negative",
            Experiment::StabilityReport => "stability-report",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Experiment::ExpScaling => &["inv_delta_a", "laplacian_diff_op", "resolvent_diff_op"],
            Experiment::ExpCollapse => &[
                "delta",
                "eps_quasi",
                "eps_close",
                "monomial_k1",
                "monomial_k2",
                "monomial_k3",
                "partition_residual",
            ],
            Experiment::ExpCircle => &["N", "resolvent_closeness", "operator_commutator"],
            Experiment::ExpMolecule => &[
                "t",
                "inv_distance",
                "mean_transfer_error",
                "std_transfer_error",
                "mean_transfer_error_physical",
                "std_transfer_error_physical",
            ],
            Experiment::ExpNegative => &["delta", "eps_adjacency", "eps_normalized", "eps_laplacian"],
            Experiment::StabilityReport => &["layer", "b", "l", "r"],
        }
    }

    /// Bumped whenever the column set changes.
    pub fn schema(self) -> String {
        format!("{}/v1", self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment {s:?}")))
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoleculeSettings {
    /// Molecule file; the methane preset when absent.
    pub molecule: Option<PathBuf>,
    /// Atom moved towards `target`, which becomes the merged node.
    pub atom: usize,
    pub target: usize,
    pub hidden_channels: usize,
    pub layers: usize,
    pub max_order: usize,
    pub coefficient_range: f64,
    pub inputs: usize,
    pub p: f64,
    pub omega: ComplexRepr,
    pub nonlinearity: Nonlinearity,
}

impl Default for MoleculeSettings {
    fn default() -> Self {
        Self {
            molecule: None,
            atom: 1,
            target: 0,
            hidden_channels: 16,
            layers: 2,
            max_order: 11,
            coefficient_range: 100.0,
            inputs: 100,
            p: 2.0,
            omega: ComplexRepr::Real(-1.0),
            nonlinearity: Nonlinearity::Relu,
        }
    }
}

/// Experiment parameters; every grid has a default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub seed: Option<u64>,
    /// `1/δ_a` grid of the scaling experiment.
    pub inv_delta_a: Option<Vec<f64>>,
    /// `δ` grid of the collapse and negative experiments.
    pub deltas: Option<Vec<f64>>,
    /// Cycle sizes of the circle experiment.
    pub sizes: Option<Vec<usize>>,
    /// Deflection grid of the molecule experiment.
    pub t: Option<Vec<f64>>,
    pub omega: Option<ComplexRepr>,
    pub molecule: MoleculeSettings,
    /// Network description for the stability report.
    pub network: Option<PathBuf>,
    pub empirical: bool,
    pub samples: Option<usize>,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut c = Self::from_json_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        c.base_dir = path.parent().map(Path::to_path_buf);
        Ok(c)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn inv_delta_grid(&self) -> Vec<f64> {
        self.inv_delta_a
            .clone()
            .unwrap_or_else(|| (0..=6).map(|i| 10f64.powf(1.0 + 0.5 * i as f64)).collect())
    }

    pub fn delta_grid(&self) -> Vec<f64> {
        self.deltas
            .clone()
            .unwrap_or_else(|| (0..8).map(|i| 10f64.powf(-1.0 - 3.0 * i as f64 / 7.0)).collect())
    }

    pub fn size_grid(&self) -> Vec<usize> {
        self.sizes.clone().unwrap_or_else(|| vec![11, 21, 51, 101, 201, 401])
    }

    pub fn t_grid(&self) -> Vec<f64> {
        self.t
            .clone()
            .unwrap_or_else(|| (0..10).map(|i| i as f64 / 10.0).collect())
    }

    fn check_grid<T>(name: &str, g: &[T]) -> Result<()> {
        if g.is_empty() {
            return Err(Error::InvalidArgument(format!("{name} grid is empty")));
        }
        Ok(())
    }
}

/// Output table: one row per grid point, sorted by the first column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub experiment: String,
    pub schema: String,
    pub seed: u64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(e: Experiment, seed: u64, mut rows: Vec<Vec<f64>>) -> Self {
        rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
        Self {
            experiment: e.name().to_string(),
            schema: e.schema(),
            seed,
            columns: e.columns().iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn laplacian(g: &WeightedGraph<f64>) -> Result<DenseOperator<f64>> {
    characteristic_operator(g, OperatorKind::Laplacian)
}

/// `‖Δ_a − Δ_b‖` and `‖R_{−1}(Δ_a) − R_{−1}(Δ_b)‖` for the graph scaled by `1/δ_a` and `1/δ_b = 1/δ_a − 1`.
pub fn exp_scaling(config: &ExperimentConfig) -> Result<Table> {
    let grid = config.inv_delta_grid();
    ExperimentConfig::check_grid("inv_delta_a", &grid)?;
    if grid.iter().any(|&x| !(x > 1.0)) {
        return Err(Error::InvalidArgument("every 1/delta_a must exceed 1".into()));
    }
    let base = scaling_graph();
    let omega = config.omega.map_or(cre(-1.0), ComplexRepr::to_c);
    let rows = grid
        .par_iter()
        .map(|&inv_a| {
            let inv_b = inv_a - 1.0;
            let lap_a = laplacian(&base.scaled(inv_a)?)?;
            let lap_b = laplacian(&base.scaled(inv_b)?)?;
            // the difference is formed from the weight difference to avoid cancellation
            let diff = laplacian(&base.scaled(inv_a - inv_b)?)?;
            let r_a = lap_a.resolvent(omega)?;
            let r_b = lap_b.resolvent(omega)?;
            let res_diff = r_a.compose(&diff)?.compose(&r_b)?;
            Ok(vec![inv_a, diff.op_norm(), res_diff.op_norm()])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::new(Experiment::ExpScaling, config.seed(), rows))
}

/// `‖J R^k − R̃^k J‖` for `k = 1, 2, 3`.
fn resolvent_monomials(pair: &CollapsePair<f64>, omega: C<f64>) -> Result<[f64; 3]> {
    let (t, t2) = pair.operators(OperatorKind::Laplacian)?;
    let r = t.resolvent(omega)?;
    let r2 = t2.resolvent(omega)?;
    let mut out = [0.0; 3];
    let (mut rk, mut r2k) = (r.clone(), r2.clone());
    for (k, slot) in out.iter_mut().enumerate() {
        if k > 0 {
            rk = rk.compose(&r)?;
            r2k = r2k.compose(&r2)?;
        }
        *slot = pair.j.compose(&rk)?.minus(&r2k.compose(&pair.j)?)?.op_norm();
    }
    Ok(out)
}

/// Collapse of the eight-node graph along the `δ` grid, Laplacians at `ω = −1`.
pub fn exp_collapse(config: &ExperimentConfig) -> Result<Table> {
    let grid = config.delta_grid();
    ExperimentConfig::check_grid("deltas", &grid)?;
    let base = collapse_base_graph();
    let p = collapse_partition();
    let omega = config.omega.map_or(cre(-1.0), ComplexRepr::to_c);
    let rows = grid
        .par_iter()
        .map(|&delta| {
            let fine = scale_collapsed_block(&base, &p, delta)?;
            let pair = collapse(&fine, &p)?;
            let (t, t2) = pair.operators(OperatorKind::Laplacian)?;
            let q = quasi_unitarity_epsilon(&pair.j, &pair.jt, &t, &t2, omega)?;
            let close = resolvent_closeness(&pair.j, &t, &t2, omega, false)?;
            let m = resolvent_monomials(&pair, omega)?;
            Ok(vec![delta, q.eps, close, m[0], m[1], m[2], pair.partition_of_unity_residual()])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::new(Experiment::ExpCollapse, config.seed(), rows))
}

/// Cycle `N` against cycle `N + 1` with the Fourier-mode identification.
pub fn exp_circle(config: &ExperimentConfig) -> Result<Table> {
    let grid = config.size_grid();
    ExperimentConfig::check_grid("sizes", &grid)?;
    let omega = config.omega.map_or(cre(-1.0), ComplexRepr::to_c);
    let rows = grid
        .par_iter()
        .map(|&n| {
            let small = laplacian(&cycle_graph(n)?)?;
            let large = laplacian(&ring_graph(n + 1)?)?;
            let (j, _) = circle_identification(n)?;
            let close = resolvent_closeness(&j, &small, &large, omega, false)?;
            let raw = j.compose(&small)?.minus(&large.compose(&j)?)?.op_norm();
            Ok(vec![n as f64, close, raw])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::new(Experiment::ExpCircle, config.seed(), rows))
}

/// `max(ε_quasi, ε_close)` of the two-node collapse for each operator kind.
pub fn exp_negative(config: &ExperimentConfig) -> Result<Table> {
    let grid = config.delta_grid();
    ExperimentConfig::check_grid("deltas", &grid)?;
    let adj = negative_result_probe::<f64>(OperatorKind::Adjacency, &grid)?;
    let norm = negative_result_probe::<f64>(OperatorKind::NormalizedLaplacian, &grid)?;
    let lap = negative_result_probe::<f64>(OperatorKind::Laplacian, &grid)?;
    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, &d)| vec![d, adj[i].eps(), norm[i].eps(), lap[i].eps()])
        .collect();
    Ok(Table::new(Experiment::ExpNegative, config.seed(), rows))
}

/// Seed offset separating the random streams of different experiment seeds.
const SEED_STRIDE: u64 = 1_000_003;

/// Random Laurent filter banks `[layer][out][in]` for the molecule network.
pub fn molecule_filters(settings: &MoleculeSettings, seed: u64) -> Vec<Vec<Vec<Filter<f64>>>> {
    let mut rng = derived_rng(seed.wrapping_mul(SEED_STRIDE), 0);
    let omega = settings.omega.to_c();
    let r = settings.coefficient_range;
    (0..settings.layers)
        .map(|l| {
            let k_in = if l == 0 { 1 } else { settings.hidden_channels };
            (0..settings.hidden_channels)
                .map(|_| {
                    (0..k_in)
                        .map(|_| Filter::Hol(HolFilter::random(&mut rng, omega, settings.max_order, (-r, r))))
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn bind_network(g: &WeightedGraph<f64>, banks: &[Vec<Vec<Filter<f64>>>], rho: Nonlinearity) -> Result<Network<f64>> {
    let op = laplacian(g)?;
    let layers = banks
        .iter()
        .map(|b| Layer::new(op.clone(), b.clone(), rho, ConnectingOp::Identity))
        .collect::<Result<Vec<_>>>()?;
    Network::new(layers)
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn aggregated_errors(
    coarse: &Network<f64>,
    fine: &Network<f64>,
    j: &DenseOperator<f64>,
    inputs: &[FeatureBundle<f64>],
    p: f64,
) -> Result<Vec<f64>> {
    inputs
        .iter()
        .map(|f| {
            let a = aggregate(&coarse.forward(f)?, p)?;
            let b = aggregate(&fine.forward(&f.transform(j)?)?, p)?;
            Ok(aggregate_distance(&a, &b))
        })
        .collect()
}

/// Aggregated transfer error between the deflected molecule and its collapsed counterpart.
///
/// The primary columns use the collapsed weights with the merged node carrying
/// the summed charge; the `_physical` columns use the effective molecule's own
/// Coulomb graph. Both use the harmonic-extension `J`.
pub fn exp_molecule(config: &ExperimentConfig) -> Result<Table> {
    let grid = config.t_grid();
    ExperimentConfig::check_grid("t", &grid)?;
    let s = &config.molecule;
    if s.layers == 0 || s.hidden_channels == 0 || s.inputs == 0 {
        return Err(Error::InvalidArgument("molecule network needs layers, channels and inputs".into()));
    }
    let base = match &s.molecule {
        Some(path) => Molecule::from_json_str(&std::fs::read_to_string(config.resolve(path))?)?,
        None => Molecule::methane(),
    };
    let seed = config.seed();
    let banks = molecule_filters(s, seed);
    let rows = grid
        .par_iter()
        .map(|&t| {
            let m = deflect(&base, s.atom, s.target, t)?;
            let fine = molecular_graph::<f64>(&m)?;
            let (eff, p) = effective_molecule(&m, &[s.target, s.atom], s.target)?;
            let collapsed = collapse_weights(&fine, &p)?;
            let physical = molecular_graph::<f64>(&eff)?;
            let psi = complexify(&psi_matrix(&fine, &p)?);
            let j = DenseOperator::new(psi.clone(), collapsed.space(), fine.space())?;
            let j_phys = DenseOperator::new(psi, physical.space(), fine.space())?;

            let fine_net = bind_network(&fine, &banks, s.nonlinearity)?;
            let coarse_net = bind_network(&collapsed, &banks, s.nonlinearity)?;
            let phys_net = bind_network(&physical, &banks, s.nonlinearity)?;
            let inputs: Vec<_> = (0..s.inputs as u64)
                .map(|i| {
                    let mut rng = derived_rng(seed.wrapping_mul(SEED_STRIDE), 1 + i);
                    real_unit_bundle(&mut rng, collapsed.space(), 1)
                })
                .collect();
            let phys_inputs = inputs
                .iter()
                .map(|f| FeatureBundle::new(physical.space(), f.channels().to_vec()))
                .collect::<Result<Vec<_>>>()?;
            let (mean, std) = mean_std(&aggregated_errors(&coarse_net, &fine_net, &j, &inputs, s.p)?);
            let (mean_p, std_p) = mean_std(&aggregated_errors(&phys_net, &fine_net, &j_phys, &phys_inputs, s.p)?);
            Ok(vec![t, 1.0 / m.distance(s.atom, s.target), mean, std, mean_p, std_p])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::new(Experiment::ExpMolecule, seed, rows))
}

/// Runs a sweep experiment by name.
pub fn run_table(e: Experiment, config: &ExperimentConfig) -> Result<Table> {
    match e {
        Experiment::ExpScaling => exp_scaling(config),
        Experiment::ExpCollapse => exp_collapse(config),
        Experiment::ExpCircle => exp_circle(config),
        Experiment::ExpMolecule => exp_molecule(config),
        Experiment::ExpNegative => exp_negative(config),
        Experiment::StabilityReport => {
            let report = stability_report(config)?;
            let rows = report
                .layers
                .iter()
                .enumerate()
                .map(|(i, c)| vec![i as f64, c.b, c.l, c.r])
                .collect();
            Ok(Table::new(Experiment::StabilityReport, config.seed(), rows))
        }
    }
}

// ---- network files ----

/// Graph given inline or by path (relative to the network file).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    Path { path: PathBuf },
    Inline(GraphFile),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomFamily {
    Entire,
    Hol,
}

/// Seeded random filter bank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomFilters {
    pub family: RandomFamily,
    pub k_in: usize,
    pub k_out: usize,
    pub max_order: usize,
    #[serde(default = "unit_range")]
    pub coeff_range: (f64, f64),
    #[serde(default)]
    pub omega: Option<ComplexRepr>,
}

fn unit_range() -> (f64, f64) {
    (-1.0, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterSource {
    /// `grid[i][j]` maps input channel `j` to output channel `i`.
    Grid(Vec<Vec<FilterFile>>),
    Random(RandomFilters),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConnectingSource {
    Named(String),
    Matrix { matrix: Vec<Vec<f64>> },
}

impl Default for ConnectingSource {
    fn default() -> Self {
        ConnectingSource::Named("identity".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerFile {
    pub graph: GraphSource,
    pub operator: OperatorKind,
    pub filters: FilterSource,
    #[serde(default = "default_rho")]
    pub nonlinearity: Nonlinearity,
    #[serde(default)]
    pub connecting: ConnectingSource,
}

fn default_rho() -> Nonlinearity {
    Nonlinearity::Identity
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundModeName {
    #[default]
    Auto,
    Spectral,
    Entire,
    Laurent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub bound_mode: BoundModeName,
    pub layers: Vec<LayerFile>,
}

impl NetworkFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("network file: {e}")))
    }

    pub fn bound_mode(&self) -> BoundMode<f64> {
        match self.bound_mode {
            BoundModeName::Auto => BoundMode::Auto,
            BoundModeName::Spectral => BoundMode::Spectral,
            BoundModeName::Entire => BoundMode::Entire,
            BoundModeName::Laurent => BoundMode::Laurent { c: None },
        }
    }

    /// Builds the network; relative graph paths resolve against `base_dir`.
    pub fn build(&self, base_dir: Option<&Path>) -> Result<Network<f64>> {
        let mut rng = derived_rng(self.seed, 0);
        let mut layers: Vec<Layer<f64>> = Vec::with_capacity(self.layers.len());
        for (n, l) in self.layers.iter().enumerate() {
            let layer_err = |e: Error| Error::Layer {
                layer: n,
                detail: e.to_string(),
            };
            let graph: WeightedGraph<f64> = match &l.graph {
                GraphSource::Inline(g) => g.build().map_err(layer_err)?,
                GraphSource::Path { path } => {
                    let full = match base_dir {
                        Some(b) if path.is_relative() => b.join(path),
                        _ => path.clone(),
                    };
                    let text = std::fs::read_to_string(&full)
                        .map_err(|e| layer_err(Error::Parse(format!("{}: {e}", full.display()))))?;
                    WeightedGraph::from_json_str(&text)
                        .map_err(|e| layer_err(Error::Parse(format!("{}: {e}", full.display()))))?
                }
            };
            let filters = match &l.filters {
                FilterSource::Grid(g) => g
                    .iter()
                    .map(|row| row.iter().map(FilterFile::build).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
                    .map_err(layer_err)?,
                FilterSource::Random(r) => {
                    use rand::Rng;
                    let omega = r.omega.map_or(cre(-1.0), ComplexRepr::to_c);
                    (0..r.k_out)
                        .map(|_| {
                            (0..r.k_in)
                                .map(|_| match r.family {
                                    RandomFamily::Hol => Filter::Hol(HolFilter::random(&mut rng, omega, r.max_order, r.coeff_range)),
                                    RandomFamily::Entire => Filter::Entire(EntireFilter::new(
                                        (0..=r.max_order)
                                            .map(|_| cplx(rng.random_range(r.coeff_range.0..=r.coeff_range.1), 0.0))
                                            .collect(),
                                    )),
                                })
                                .collect()
                        })
                        .collect()
                }
            };
            let connecting = match &l.connecting {
                ConnectingSource::Named(s) if s == "identity" => ConnectingOp::Identity,
                ConnectingSource::Named(s) => {
                    return Err(layer_err(Error::Parse(format!("unknown connecting operator {s:?}"))))
                }
                ConnectingSource::Matrix { matrix } => {
                    let rows = matrix.len();
                    let cols = matrix.first().map_or(0, Vec::len);
                    if matrix.iter().any(|r| r.len() != cols) {
                        return Err(layer_err(Error::Parse("connecting matrix rows differ in length".into())));
                    }
                    let m = DMatrix::from_fn(rows, cols, |i, j| matrix[i][j]);
                    // the first layer's input space is the graph's unless the shapes disagree
                    let domain = match layers.last() {
                        Some(prev) => prev.output_space().clone(),
                        None if cols == graph.n() => graph.space().clone(),
                        None => SignalSpace::uniform(cols),
                    };
                    ConnectingOp::Linear(DenseOperator::new(complexify(&m), &domain, graph.space()).map_err(layer_err)?)
                }
            };
            layers.push(Layer::bind(&graph, l.operator, filters, l.nonlinearity, connecting).map_err(layer_err)?);
        }
        Network::new(layers)
    }
}

/// Certified signal bound of the configured network, with an optional empirical check.
pub fn stability_report(config: &ExperimentConfig) -> Result<BoundReport> {
    let path = config
        .network
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("stability-report needs a network file".into()))?;
    let full = config.resolve(path);
    let text = std::fs::read_to_string(&full)?;
    let file = NetworkFile::from_json_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", full.display())))?;
    let net = file.build(full.parent())?;
    let mut report = signal_bound(&net, file.bound_mode())?;
    let seed = config.seed.unwrap_or(file.seed);
    report.seeds = vec![seed];
    if config.empirical {
        let samples = config.samples.unwrap_or(DEFAULT_SAMPLES);
        report.empirical = Some(empirical_lipschitz(&net, samples, seed)?);
    }
    Ok(report)
}
