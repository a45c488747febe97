//! Scenario generation, Monte Carlo estimation, and parameter sweeps.
//!
//! A [`Scenario`] is an immutable experiment description: user positions,
//! area, radio parameters, coding block shape and fairness requirement.
//! [`monte_carlo`] estimates a scheme's throughput at a position;
//! [`sweep`] produces the rows behind the L- and T-sweep figures, optionally
//! re-optimizing the hover position per value.
//!
//! Determinism contract: every random stream derives from labeled substreams
//! of one master seed, episodes are mapped in index order, and all folds run
//! sequentially after collection, so identical configuration plus master
//! seed yields byte-identical tables at any worker count.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::analytics::{feasible, FairnessSpec};
use crate::baselines::SchemeKind;
use crate::channel::{per_for_user, Point2D, RadioParams, UavPose};
use crate::error::{Error, Result};
use crate::exec;
use crate::placement::{self, PsoParams};
use crate::scheduler::{
    simulate_episode, EpisodeParams, ErasureSource, PolicyState, ReceptionModel,
};
use crate::seed::SeedTree;

/// Axis-aligned service area in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn center(&self) -> Point2D {
        Point2D::new((self.xmin + self.xmax) / 2.0, (self.ymin + self.ymax) / 2.0)
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    /// Nearest point of the rectangle.
    pub fn clamp(&self, p: &Point2D) -> Point2D {
        Point2D::new(p.x.clamp(self.xmin, self.xmax), p.y.clamp(self.ymin, self.ymax))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xmin < self.xmax && self.ymin < self.ymax)
            || !(self.xmin.is_finite() && self.xmax.is_finite())
            || !(self.ymin.is_finite() && self.ymax.is_finite())
        {
            return Err(Error::InvalidParameter(format!("degenerate area {self:?}")));
        }
        Ok(())
    }
}

/// Immutable experiment description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub users: Vec<Point2D>,
    pub area: Rect,
    /// Hover altitude in meters.
    pub altitude: f64,
    pub radio: RadioParams,
    /// Number of prioritized packets per block (L).
    pub layers: u8,
    /// Transmission deadline in slots (T >= L).
    pub slots: usize,
    pub fairness: FairnessSpec,
    pub reception: ReceptionModel,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.area.validate()?;
        self.radio.validate()?;
        if self.users.is_empty() {
            return Err(Error::InvalidParameter("scenario needs at least one user".into()));
        }
        for (i, u) in self.users.iter().enumerate() {
            if !u.is_finite() || !self.area.contains(u) {
                return Err(Error::InvalidParameter(format!(
                    "user {i} at ({}, {}) outside the area",
                    u.x, u.y
                )));
            }
        }
        if !(self.altitude > 0.0 && self.altitude.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "altitude must be positive, got {}",
                self.altitude
            )));
        }
        if self.layers < 1 {
            return Err(Error::InvalidParameter("layers must be at least 1".into()));
        }
        if self.slots < self.layers as usize {
            return Err(Error::InvalidParameter(format!(
                "deadline T (T >= L) violated: T={} < L={}",
                self.slots, self.layers
            )));
        }
        self.fairness.validate(self.layers)?;
        Ok(())
    }

    /// Per-user packet error rates with the transmitter at `q`.
    pub fn user_pers(&self, q: &Point2D) -> Result<Vec<f64>> {
        let pose = UavPose::new(*q, self.altitude);
        self.users.iter().map(|u| per_for_user(&pose, u, &self.radio)).collect()
    }

    pub fn k(&self) -> usize {
        self.users.len()
    }
}

/// A Gaussian user hotspot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: Point2D,
    pub sigma: f64,
    pub count: usize,
}

/// How user positions are produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Layout {
    /// Fixed list, passed through unchanged.
    Explicit { users: Vec<Point2D> },
    /// `count` positions i.i.d. uniform over the area.
    Uniform { count: usize },
    /// Gaussian hotspots, truncated to the area by re-sampling.
    Clusters { clusters: Vec<Cluster> },
}

impl Layout {
    pub fn user_count(&self) -> usize {
        match self {
            Layout::Explicit { users } => users.len(),
            Layout::Uniform { count } => *count,
            Layout::Clusters { clusters } => clusters.iter().map(|c| c.count).sum(),
        }
    }
}

/// Layout plus the seed that realizes it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub layout: Layout,
    pub seed: u64,
}

/// Instantiate user positions into a scenario template (all fields but
/// `users` are taken from `base`). Deterministic given the spec seed.
pub fn generate_scenario(spec: &ScenarioSpec, base: &Scenario) -> Result<Scenario> {
    let mut scenario = base.clone();
    scenario.users = generate_users(spec, &base.area)?;
    scenario.validate()?;
    Ok(scenario)
}

fn generate_users(spec: &ScenarioSpec, area: &Rect) -> Result<Vec<Point2D>> {
    area.validate()?;
    let mut rng = SeedTree::from_master(spec.seed).child("scenario-users", 0).rng();
    match &spec.layout {
        Layout::Explicit { users } => Ok(users.clone()),
        Layout::Uniform { count } => Ok((0..*count)
            .map(|_| {
                Point2D::new(
                    rng.random_range(area.xmin..=area.xmax),
                    rng.random_range(area.ymin..=area.ymax),
                )
            })
            .collect()),
        Layout::Clusters { clusters } => {
            let mut users = Vec::new();
            for cluster in clusters {
                if !(cluster.sigma > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "cluster sigma must be positive, got {}",
                        cluster.sigma
                    )));
                }
                if !area.contains(&cluster.center) {
                    return Err(Error::InvalidParameter(
                        "cluster center outside the area".into(),
                    ));
                }
                let nx = Normal::new(cluster.center.x, cluster.sigma)
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?;
                let ny = Normal::new(cluster.center.y, cluster.sigma)
                    .map_err(|e| Error::InvalidParameter(e.to_string()))?;
                for _ in 0..cluster.count {
                    let user = loop {
                        let candidate = Point2D::new(nx.sample(&mut rng), ny.sample(&mut rng));
                        if area.contains(&candidate) {
                            break candidate;
                        }
                    };
                    users.push(user);
                }
            }
            Ok(users)
        }
    }
}

/// Replication budget and master seed of a Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloParams {
    pub runs: usize,
    pub master_seed: u64,
}

/// One row of an experiment results table.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub scheme: SchemeKind,
    pub layers: u8,
    pub slots: usize,
    pub k: usize,
    pub q: Point2D,
    pub mean_throughput: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub runs: usize,
    pub seed: u64,
    pub feasible: bool,
}

/// Tabular experiment output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultsTable {
    pub rows: Vec<ResultRow>,
}

/// Episode throughput samples for a scheme at position `q`; run `r` draws
/// from `node.child("episode", r)`.
pub fn throughput_samples(
    scenario: &Scenario,
    q: Point2D,
    scheme: SchemeKind,
    runs: usize,
    node: &SeedTree,
) -> Result<Vec<f64>> {
    let pers = scenario.user_pers(&q)?;
    let params = EpisodeParams {
        pers: &pers,
        layers: scenario.layers,
        slots: scenario.slots,
        model: scenario.reception,
    };
    Ok(exec::map_indexed(runs, |r| {
        let episode = node.child("episode", r as u64);
        let mut policy = PolicyState::for_scheme(scheme);
        let mut erasure_rng = episode.child("erasure", 0).rng();
        let mut coeff_rng = episode.child("coeffs", 0).rng();
        simulate_episode(
            &params,
            &mut policy,
            ErasureSource::Bernoulli(&mut erasure_rng),
            &mut coeff_rng,
        )
        .throughput
    }))
}

fn mean_and_ci(samples: &[f64]) -> (f64, f64, f64) {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, mean, mean);
    }
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let half = 1.96 * (var / n as f64).sqrt();
    (mean, mean - half, mean + half)
}

/// Monte Carlo estimate with seeds scoped under `node`; `seed` is echoed
/// into the row for reproduction.
pub fn monte_carlo_with(
    scenario: &Scenario,
    q: Point2D,
    scheme: SchemeKind,
    runs: usize,
    node: &SeedTree,
    seed: u64,
) -> Result<ResultRow> {
    if runs < 1 {
        return Err(Error::InvalidParameter("monte carlo needs at least one run".into()));
    }
    let samples = throughput_samples(scenario, q, scheme, runs, node)?;
    let (mean, lo, hi) = mean_and_ci(&samples);
    Ok(ResultRow {
        scheme,
        layers: scenario.layers,
        slots: scenario.slots,
        k: scenario.k(),
        q,
        mean_throughput: mean,
        ci95_lo: lo,
        ci95_hi: hi,
        runs,
        seed,
        feasible: feasible(&q, scenario, &scenario.fairness)?,
    })
}

/// Monte Carlo estimate of a scheme's throughput at `q`: mean and normal
/// 95% confidence interval over `mc.runs` seeded episodes. Infeasible
/// positions are reported with the feasibility flag cleared, not rejected.
pub fn monte_carlo(
    scenario: &Scenario,
    q: Point2D,
    scheme: SchemeKind,
    mc: &MonteCarloParams,
) -> Result<ResultRow> {
    let node = SeedTree::from_master(mc.master_seed).child("monte-carlo", 0);
    monte_carlo_with(scenario, q, scheme, mc.runs, &node, mc.master_seed)
}

/// Which scenario dimension a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SweepParam {
    L,
    T,
}

/// How the adaptive scheme's hover position is chosen per sweep value. The
/// non-adaptive schemes always transmit from the area center, standing in
/// for the fixed terrestrial station.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepPlacement {
    Fixed(Point2D),
    Pso(PsoParams),
    Grid { step: f64 },
}

/// Sweep L or T over `values`, producing one row per (value, scheme). With
/// PSO or grid placement the position is re-optimized per value for the
/// `uarnc` scheme; `uarnc-fixed` and the baselines stay at the area center.
pub fn sweep(
    base: &Scenario,
    param: SweepParam,
    values: &[u32],
    schemes: &[SchemeKind],
    mc: &MonteCarloParams,
    placement: &SweepPlacement,
) -> Result<ResultsTable> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    // validate the whole sweep domain before any work
    for &v in values {
        let (layers, slots) = match param {
            SweepParam::L => (v as u8, base.slots),
            SweepParam::T => (base.layers, v as usize),
        };
        if v < 1 {
            return Err(Error::InvalidParameter("sweep values must be positive".into()));
        }
        if param == SweepParam::L && v > 255 {
            return Err(Error::InvalidParameter("layer count exceeds 255".into()));
        }
        if (slots as u64) < layers as u64 {
            return Err(Error::InvalidParameter(format!(
                "deadline T (T >= L) violated in sweep: T={slots} < L={layers}"
            )));
        }
    }
    let root = SeedTree::from_master(mc.master_seed);
    let center = base.area.center();
    let mut table = ResultsTable::default();
    for (vi, &v) in values.iter().enumerate() {
        let mut scenario = base.clone();
        match param {
            SweepParam::L => {
                scenario.layers = v as u8;
                scenario.fairness.l_min = scenario.fairness.l_min.min(v as u8);
            }
            SweepParam::T => scenario.slots = v as usize,
        }
        scenario.validate()?;
        let value_node = root.child("sweep-value", vi as u64);
        let adaptive_q = if schemes.contains(&SchemeKind::Uarnc) {
            match placement {
                SweepPlacement::Fixed(q) => *q,
                SweepPlacement::Pso(params) => {
                    placement::optimize(
                        &scenario,
                        params,
                        mc.runs,
                        &value_node.child("placement", 0),
                    )?
                    .q_star
                }
                SweepPlacement::Grid { step } => {
                    placement::exhaustive_search(
                        &scenario,
                        *step,
                        mc.runs,
                        &value_node.child("placement", 0),
                    )?
                    .q_star
                }
            }
        } else {
            center
        };
        for (si, &scheme) in schemes.iter().enumerate() {
            let q = match scheme {
                SchemeKind::Uarnc => adaptive_q,
                _ => center,
            };
            let row = monte_carlo_with(
                &scenario,
                q,
                scheme,
                mc.runs,
                &value_node.child("cell", si as u64),
                mc.master_seed,
            )?;
            table.rows.push(row);
        }
    }
    Ok(table)
}
