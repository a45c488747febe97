//! Constrained particle swarm optimization of the hover position, with an
//! exhaustive grid-search oracle.
//!
//! Fitness is the Monte Carlo mean of greedy-scheduled episode throughput.
//! One replication seed set — derived from the caller's seed node — is shared
//! by every position a run evaluates (common random numbers), so comparisons
//! between particles are not corrupted by sampling noise and the whole
//! optimization is a deterministic function of the master seed. Particles
//! move only onto positions satisfying the fairness constraint; infeasible
//! candidates are rejected, keeping position and velocity.

use rand::Rng;

use crate::analytics::feasible;
use crate::baselines::SchemeKind;
use crate::channel::Point2D;
use crate::error::{Error, Result};
use crate::exec;
use crate::scenario::{throughput_samples, Rect, Scenario};
use crate::seed::SeedTree;

/// Swarm shape and dynamics coefficients.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PsoParams {
    /// Inertia coefficient.
    pub w: f64,
    /// Attraction toward a particle's personal best.
    pub c1: f64,
    /// Attraction toward the global best.
    pub c2: f64,
    /// Particle count.
    pub sizepop: usize,
    /// Iteration count.
    pub maxg: u32,
    /// Per-component velocity clamp in meters per iteration.
    pub vmax: f64,
    /// Stop after this many iterations without gbest improving by more than
    /// 1e-6; disabled by default.
    pub stall_iters: Option<u32>,
}

impl PsoParams {
    /// Coefficients with the velocity clamp scaled to an area (20% of the
    /// larger side per iteration).
    pub fn for_area(area: &Rect) -> Self {
        PsoParams {
            w: 0.729,
            c1: 1.4955,
            c2: 1.4955,
            sizepop: 100,
            maxg: 400,
            vmax: 0.2 * area.width().max(area.height()),
            stall_iters: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizepop < 1 || self.maxg < 1 {
            return Err(Error::InvalidParameter(
                "swarm needs at least one particle and one iteration".into(),
            ));
        }
        if !(self.vmax > 0.0) {
            return Err(Error::InvalidParameter("vmax must be positive".into()));
        }
        if self.c1 < 0.0 || self.c2 < 0.0 {
            return Err(Error::InvalidParameter("attraction intensities must be non-negative".into()));
        }
        Ok(())
    }
}

/// Global-best snapshot after one iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub iter: u32,
    pub gbest_fit: f64,
    pub q: Point2D,
}

/// Outcome of a placement search.
#[derive(Clone, Debug, PartialEq)]
pub struct SwarmResult {
    pub q_star: Point2D,
    pub fitness: f64,
    /// Per-iteration global best; non-decreasing in fitness.
    pub trace: Vec<TracePoint>,
    /// Number of fitness evaluations performed.
    pub evaluations: u64,
}

/// One swarm member.
#[derive(Clone, Debug)]
struct Particle {
    pos: Point2D,
    vel: [f64; 2],
    fit: f64,
    pbest: Point2D,
    pbest_fit: f64,
}

/// Velocity update: inertia plus stochastic attraction toward the personal
/// and global bests, clamped per component to `vmax`. `phi1`/`phi2` are the
/// per-coordinate uniform draws, passed in so the rule itself stays pure.
pub fn update_velocity(
    vel: [f64; 2],
    pos: Point2D,
    pbest: Point2D,
    gbest: Point2D,
    params: &PsoParams,
    phi1: [f64; 2],
    phi2: [f64; 2],
) -> [f64; 2] {
    let raw = [
        params.w * vel[0]
            + params.c1 * phi1[0] * (pbest.x - pos.x)
            + params.c2 * phi2[0] * (gbest.x - pos.x),
        params.w * vel[1]
            + params.c1 * phi1[1] * (pbest.y - pos.y)
            + params.c2 * phi2[1] * (gbest.y - pos.y),
    ];
    [raw[0].clamp(-params.vmax, params.vmax), raw[1].clamp(-params.vmax, params.vmax)]
}

/// Position update: step by the velocity, clamp to the area, then accept the
/// candidate only if it satisfies the fairness constraint; otherwise the
/// particle stays put.
pub fn update_position(
    pos: Point2D,
    vel: [f64; 2],
    area: &Rect,
    is_feasible: impl FnOnce(&Point2D) -> Result<bool>,
) -> Result<Point2D> {
    let candidate = area.clamp(&Point2D::new(pos.x + vel[0], pos.y + vel[1]));
    Ok(if is_feasible(&candidate)? { candidate } else { pos })
}

/// Monte Carlo fitness of hovering at `q`: mean greedy-scheduled episode
/// throughput over `runs` replications seeded from `fit_node` (common random
/// numbers: the same node must be used for every position compared).
pub fn fitness(scenario: &Scenario, q: Point2D, runs: usize, fit_node: &SeedTree) -> Result<f64> {
    let samples = throughput_samples(scenario, q, SchemeKind::Uarnc, runs, fit_node)?;
    Ok(samples.iter().sum::<f64>() / runs as f64)
}

fn fold_gbest(particles: &[Particle]) -> (Point2D, f64) {
    let mut best = particles[0].pbest;
    let mut best_fit = particles[0].pbest_fit;
    for p in &particles[1..] {
        if p.pbest_fit > best_fit {
            best = p.pbest;
            best_fit = p.pbest_fit;
        }
    }
    (best, best_fit)
}

/// Swarm search for the hover position maximizing fitness subject to the
/// fairness constraint. Velocities start at zero; initial positions come
/// from rejection sampling, failing with [`Error::Infeasible`] when
/// `10 * sizepop` draws find no feasible position.
pub fn optimize(
    scenario: &Scenario,
    params: &PsoParams,
    runs: usize,
    node: &SeedTree,
) -> Result<SwarmResult> {
    scenario.validate()?;
    params.validate()?;
    let fit_node = node.child("fitness", 0);
    let area = scenario.area;

    let mut init_rng = node.child("pso-init", 0).rng();
    let mut seeds_pos: Vec<Point2D> = Vec::with_capacity(params.sizepop);
    let mut attempts = 0usize;
    while seeds_pos.len() < params.sizepop && attempts < 10 * params.sizepop {
        attempts += 1;
        let candidate = Point2D::new(
            init_rng.random_range(area.xmin..=area.xmax),
            init_rng.random_range(area.ymin..=area.ymax),
        );
        if feasible(&candidate, scenario, &scenario.fairness)? {
            seeds_pos.push(candidate);
        }
    }
    if seeds_pos.is_empty() {
        return Err(Error::Infeasible(format!(
            "no feasible position in {attempts} rejection samples; fairness threshold {} \
             appears too strict for this scenario",
            scenario.fairness.p_th
        )));
    }
    // short fill: reuse accepted positions cyclically
    let accepted = seeds_pos.len();
    let mut next = 0usize;
    while seeds_pos.len() < params.sizepop {
        seeds_pos.push(seeds_pos[next % accepted]);
        next += 1;
    }

    let init_fits: Vec<Result<f64>> = exec::map_indexed(params.sizepop, |i| {
        fitness(scenario, seeds_pos[i], runs, &fit_node)
    });
    let mut evaluations = params.sizepop as u64;
    let mut particles: Vec<Particle> = Vec::with_capacity(params.sizepop);
    for (pos, fit) in seeds_pos.into_iter().zip(init_fits) {
        let fit = fit?;
        particles.push(Particle { pos, vel: [0.0, 0.0], fit, pbest: pos, pbest_fit: fit });
    }

    let (mut gbest, mut gbest_fit) = fold_gbest(&particles);
    let mut trace = vec![TracePoint { iter: 0, gbest_fit, q: gbest }];
    let mut stall = 0u32;

    for iter in 1..=params.maxg {
        let iter_node = node.child("pso-vel", iter as u64);
        let mut moved: Vec<Option<Point2D>> = vec![None; particles.len()];
        for (pi, particle) in particles.iter_mut().enumerate() {
            let mut rng = iter_node.child("particle", pi as u64).rng();
            let phi1 = [rng.random::<f64>(), rng.random::<f64>()];
            let phi2 = [rng.random::<f64>(), rng.random::<f64>()];
            let vel = update_velocity(
                particle.vel,
                particle.pos,
                particle.pbest,
                gbest,
                params,
                phi1,
                phi2,
            );
            particle.vel = vel;
            let next = update_position(particle.pos, vel, &area, |q| {
                feasible(q, scenario, &scenario.fairness)
            })?;
            if next != particle.pos {
                moved[pi] = Some(next);
                particle.pos = next;
            }
        }
        let new_fits: Vec<Option<Result<f64>>> = exec::map_indexed(particles.len(), |i| {
            moved[i].map(|q| fitness(scenario, q, runs, &fit_node))
        });
        for (particle, fit) in particles.iter_mut().zip(new_fits) {
            if let Some(fit) = fit {
                particle.fit = fit?;
                evaluations += 1;
                if particle.fit > particle.pbest_fit {
                    particle.pbest_fit = particle.fit;
                    particle.pbest = particle.pos;
                }
            }
        }
        let (cand, cand_fit) = fold_gbest(&particles);
        let improved = cand_fit > gbest_fit + 1e-6;
        if cand_fit > gbest_fit {
            gbest = cand;
            gbest_fit = cand_fit;
        }
        trace.push(TracePoint { iter, gbest_fit, q: gbest });
        if let Some(limit) = params.stall_iters {
            stall = if improved { 0 } else { stall + 1 };
            if stall >= limit {
                break;
            }
        }
    }

    Ok(SwarmResult { q_star: gbest, fitness: gbest_fit, trace, evaluations })
}

/// Evaluate fitness at every feasible point of a square grid over the area
/// and return the best; the oracle the swarm is judged against. Uses the
/// same common-random-number streams as [`optimize`] when given the same
/// seed node.
pub fn exhaustive_search(
    scenario: &Scenario,
    grid_step: f64,
    runs: usize,
    node: &SeedTree,
) -> Result<SwarmResult> {
    scenario.validate()?;
    if !(grid_step > 0.0) {
        return Err(Error::InvalidParameter("grid step must be positive".into()));
    }
    let fit_node = node.child("fitness", 0);
    let area = scenario.area;
    let mut points = Vec::new();
    let nx = (area.width() / grid_step).round() as usize;
    let ny = (area.height() / grid_step).round() as usize;
    for ix in 0..=nx {
        let x = (area.xmin + ix as f64 * grid_step).min(area.xmax);
        for iy in 0..=ny {
            let y = (area.ymin + iy as f64 * grid_step).min(area.ymax);
            points.push(Point2D::new(x, y));
        }
    }
    let evals: Vec<Option<Result<f64>>> = exec::map_indexed(points.len(), |i| {
        match feasible(&points[i], scenario, &scenario.fairness) {
            Err(e) => Some(Err(e)),
            Ok(false) => None,
            Ok(true) => Some(fitness(scenario, points[i], runs, &fit_node)),
        }
    });
    let mut best: Option<(Point2D, f64)> = None;
    let mut trace = Vec::new();
    let mut evaluations = 0u64;
    for (point, eval) in points.into_iter().zip(evals) {
        let Some(fit) = eval.transpose()? else { continue };
        evaluations += 1;
        let better = best.map_or(true, |(_, bf)| fit > bf);
        if better {
            best = Some((point, fit));
        }
        let (bq, bf) = best.unwrap();
        trace.push(TracePoint { iter: evaluations as u32 - 1, gbest_fit: bf, q: bq });
    }
    let Some((q_star, fit)) = best else {
        return Err(Error::Infeasible(
            "no feasible grid point; fairness threshold too strict for this scenario".into(),
        ));
    };
    Ok(SwarmResult { q_star, fitness: fit, trace, evaluations })
}
