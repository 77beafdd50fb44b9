//! Grey Wolf Optimizer, standard and four-leader variants.
//!
//! The swarm minimizes an arbitrary objective over a box in `R^d`. The best
//! solutions found so far (alpha, beta, delta and, for the modified variant,
//! gamma) are kept in a [`LeaderSet`] and steer every agent:
//!
//! * standard: each leader `k` pulls the agent to
//!   `X_k = L_k - A_k * |C_k * L_k - X|` and the new position is the mean of
//!   the three pulls;
//! * modified: the four leader distances are averaged first into `D_avg`,
//!   every pull uses `X_k = L_k - A_k * D_avg`, and the new position is the
//!   mean of the four pulls.
//!
//! All products are element-wise. `A = 2a*r1 - a` and `C = 2*r2` with
//! `r1, r2` uniform in `[0, 1)`, redrawn per coordinate, per leader, per
//! agent and per iteration. `a` decays linearly from 2 to 0.
//!
//! Random draws happen in a fixed order: agents by index, leaders in
//! alpha, beta, delta, gamma order, and for each leader the `r1` vector
//! (coordinates in index order) followed by the `r2` vector. Objective
//! evaluation may run on several threads, but never draws.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::{self, Write as _};
use std::str::FromStr;
use thiserror::Error;

use crate::seed;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("iteration {iteration} is outside 0..={max_iterations}")]
    Domain {
        iteration: usize,
        max_iterations: usize,
    },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("the modified update needs a gamma leader")]
    MissingGamma,
    #[error("objective returned {value} for agent {agent} at position {position:?}")]
    NonFinite {
        agent: usize,
        value: f64,
        position: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, OptimizerError>;

/// Which update rule drives the swarm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Three leaders, one distance per leader.
    Standard,
    /// Four leaders sharing an averaged distance.
    Modified,
}

impl Variant {
    pub fn leader_count(self) -> usize {
        match self {
            Variant::Standard => 3,
            Variant::Modified => 4,
        }
    }

    /// Smallest population that can fill every leader slot.
    pub fn min_agents(self) -> usize {
        self.leader_count()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Standard => "standard",
            Variant::Modified => "modified",
        })
    }
}

impl FromStr for Variant {
    type Err = OptimizerError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" | "gwo" => Ok(Variant::Standard),
            "modified" | "mgwo" => Ok(Variant::Modified),
            other => Err(OptimizerError::Config(format!("unknown variant `{other}`"))),
        }
    }
}

/// Axis-aligned search box shared by every coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lower: f64,
    pub upper: f64,
}

impl SearchBox {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower > upper {
            return Err(OptimizerError::Config(format!(
                "invalid search box [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lower, self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GwoConfig {
    /// Population size.
    pub agents: usize,
    pub max_iterations: usize,
    /// Problem dimension `d`.
    pub dimension: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub variant: Variant,
    pub seed: u64,
}

impl GwoConfig {
    /// 50 agents, 75 iterations, box `[-10, 10]`, seed 0.
    pub fn new(dimension: usize, variant: Variant) -> Self {
        Self {
            agents: 50,
            max_iterations: 75,
            dimension,
            lower_bound: -10.0,
            upper_bound: 10.0,
            variant,
            seed: 0,
        }
    }

    pub fn search_box(&self) -> Result<SearchBox> {
        SearchBox::new(self.lower_bound, self.upper_bound)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(OptimizerError::Config("dimension must be positive".into()));
        }
        if self.agents < self.variant.min_agents() {
            return Err(OptimizerError::Config(format!(
                "the {} variant needs at least {} agents, got {}",
                self.variant,
                self.variant.min_agents(),
                self.agents
            )));
        }
        self.search_box().map(|_| ())
    }
}

/// A candidate solution. `fitness` is `None` until evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchAgent {
    pub position: Vec<f64>,
    pub fitness: Option<f64>,
}

/// One leader slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Leader {
    pub position: Vec<f64>,
    pub fitness: f64,
}

/// Best solutions seen so far, sorted by fitness (best first).
///
/// Slots start empty at `+inf` fitness. A slot is only taken over by a
/// strictly better fitness, so ties keep the earlier discovery.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderSet {
    slots: Vec<Leader>,
}

impl LeaderSet {
    /// `count` empty slots with zero positions of length `dimension`.
    pub fn empty(count: usize, dimension: usize) -> Self {
        let slot = Leader {
            position: vec![0.0; dimension],
            fitness: f64::INFINITY,
        };
        Self {
            slots: vec![slot; count],
        }
    }

    /// Build from explicit leaders, best first. Fails if not sorted or if
    /// positions disagree in length.
    pub fn from_leaders(leaders: Vec<Leader>) -> Result<Self> {
        let d = leaders.first().map_or(0, |l| l.position.len());
        for l in &leaders {
            if l.position.len() != d {
                return Err(OptimizerError::Dimension {
                    expected: d,
                    actual: l.position.len(),
                });
            }
        }
        if leaders.windows(2).any(|w| w[0].fitness > w[1].fitness) {
            return Err(OptimizerError::Config(
                "leaders must be sorted by fitness".into(),
            ));
        }
        Ok(Self { slots: leaders })
    }

    /// Leaders at the given positions with placeholder fitness `0, 1, 2, ..`.
    pub fn from_positions(positions: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_leaders(
            positions
                .into_iter()
                .enumerate()
                .map(|(i, position)| Leader {
                    position,
                    fitness: i as f64,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn leaders(&self) -> &[Leader] {
        &self.slots
    }

    pub fn alpha(&self) -> &Leader {
        &self.slots[0]
    }

    pub fn beta(&self) -> &Leader {
        &self.slots[1]
    }

    pub fn delta(&self) -> &Leader {
        &self.slots[2]
    }

    pub fn gamma(&self) -> Option<&Leader> {
        self.slots.get(3)
    }

    pub fn dimension(&self) -> usize {
        self.slots.first().map_or(0, |l| l.position.len())
    }

    /// Offer one candidate. Returns the slot it landed in, if any.
    pub fn offer(&mut self, position: &[f64], fitness: f64) -> Option<usize> {
        let slot = self.slots.iter().position(|l| fitness < l.fitness)?;
        self.slots.pop();
        self.slots.insert(
            slot,
            Leader {
                position: position.to_vec(),
                fitness,
            },
        );
        Some(slot)
    }
}

/// Offer every evaluated agent, in index order, to the leader set.
pub fn update_leaders(leaders: &mut LeaderSet, population: &[SearchAgent]) {
    for agent in population {
        if let Some(fitness) = agent.fitness {
            leaders.offer(&agent.position, fitness);
        }
    }
}

/// Per-coordinate coefficient vectors for one leader.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub a: f64,
    /// `A`, each component in `[-a, a]`.
    pub step: Vec<f64>,
    /// `C`, each component in `[0, 2]`.
    pub emphasis: Vec<f64>,
}

impl Coefficients {
    /// Coefficients from explicit uniform draws `r1` (for `A`) and `r2` (for `C`).
    pub fn from_uniforms(a: f64, r1: &[f64], r2: &[f64]) -> Result<Self> {
        if r1.len() != r2.len() {
            return Err(OptimizerError::Dimension {
                expected: r1.len(),
                actual: r2.len(),
            });
        }
        Ok(Self {
            a,
            step: r1.iter().map(|r| 2.0 * a * r - a).collect(),
            emphasis: r2.iter().map(|r| 2.0 * r).collect(),
        })
    }

    /// Fixed `A` and `C` values, repeated over `d` coordinates.
    pub fn constant(a: f64, step: f64, emphasis: f64, d: usize) -> Self {
        Self {
            a,
            step: vec![step; d],
            emphasis: vec![emphasis; d],
        }
    }
}

/// `a = 2 (1 - t / T)`.
pub fn decay_a(iteration: usize, max_iterations: usize) -> Result<f64> {
    if max_iterations == 0 || iteration > max_iterations {
        return Err(OptimizerError::Domain {
            iteration,
            max_iterations,
        });
    }
    Ok(2.0 * (1.0 - iteration as f64 / max_iterations as f64))
}

/// Draw `r1` for every coordinate, then `r2` for every coordinate.
pub fn draw_coefficients<R: Rng + ?Sized>(a: f64, d: usize, rng: &mut R) -> Coefficients {
    let r1: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    let r2: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    Coefficients {
        a,
        step: r1.iter().map(|r| 2.0 * a * r - a).collect(),
        emphasis: r2.iter().map(|r| 2.0 * r).collect(),
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        Err(OptimizerError::Dimension { expected, actual })
    } else {
        Ok(())
    }
}

/// `D_i = |C_i * leader_i - current_i|`.
pub fn leader_distance(leader: &[f64], emphasis: &[f64], current: &[f64]) -> Result<Vec<f64>> {
    check_len(leader.len(), emphasis.len())?;
    check_len(leader.len(), current.len())?;
    Ok(leader
        .iter()
        .zip(emphasis)
        .zip(current)
        .map(|((l, c), x)| (c * l - x).abs())
        .collect())
}

fn check_coefficients(coeffs: &[Coefficients], needed: usize, d: usize) -> Result<()> {
    if coeffs.len() < needed {
        return Err(OptimizerError::Dimension {
            expected: needed,
            actual: coeffs.len(),
        });
    }
    for c in &coeffs[..needed] {
        check_len(d, c.step.len())?;
        check_len(d, c.emphasis.len())?;
    }
    Ok(())
}

/// Standard position update with the coefficients already drawn.
///
/// `coeffs[k]` belongs to leader `k` (alpha, beta, delta).
pub fn standard_step(
    leaders: &LeaderSet,
    current: &[f64],
    coeffs: &[Coefficients],
    bounds: &SearchBox,
) -> Result<Vec<f64>> {
    if leaders.len() < 3 {
        return Err(OptimizerError::Config(
            "the standard update needs three leaders".into(),
        ));
    }
    let d = current.len();
    check_len(leaders.dimension(), d)?;
    check_coefficients(coeffs, 3, d)?;

    let mut next = vec![0.0; d];
    for (leader, coeff) in leaders.leaders()[..3].iter().zip(coeffs) {
        let distance = leader_distance(&leader.position, &coeff.emphasis, current)?;
        for i in 0..d {
            next[i] += leader.position[i] - distance[i] * coeff.step[i];
        }
    }
    Ok(next.into_iter().map(|x| bounds.clamp(x / 3.0)).collect())
}

/// Modified position update with the coefficients already drawn.
///
/// `coeffs[k]` belongs to leader `k` (alpha, beta, delta, gamma).
pub fn modified_step(
    leaders: &LeaderSet,
    current: &[f64],
    coeffs: &[Coefficients],
    bounds: &SearchBox,
) -> Result<Vec<f64>> {
    if leaders.gamma().is_none() {
        return Err(OptimizerError::MissingGamma);
    }
    let d = current.len();
    check_len(leaders.dimension(), d)?;
    check_coefficients(coeffs, 4, d)?;

    let four = &leaders.leaders()[..4];
    let mut mean_distance = vec![0.0; d];
    for (leader, coeff) in four.iter().zip(coeffs) {
        let distance = leader_distance(&leader.position, &coeff.emphasis, current)?;
        for (m, v) in mean_distance.iter_mut().zip(distance) {
            *m += v;
        }
    }
    for m in &mut mean_distance {
        *m /= 4.0;
    }

    let mut next = vec![0.0; d];
    for (leader, coeff) in four.iter().zip(coeffs) {
        for i in 0..d {
            next[i] += leader.position[i] - mean_distance[i] * coeff.step[i];
        }
    }
    Ok(next.into_iter().map(|x| bounds.clamp(x / 4.0)).collect())
}

/// Draw alpha/beta/delta coefficients and apply [`standard_step`].
pub fn standard_update<R: Rng + ?Sized>(
    leaders: &LeaderSet,
    current: &[f64],
    a: f64,
    bounds: &SearchBox,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let coeffs: Vec<Coefficients> = (0..3)
        .map(|_| draw_coefficients(a, current.len(), rng))
        .collect();
    standard_step(leaders, current, &coeffs, bounds)
}

/// Draw alpha/beta/delta/gamma coefficients and apply [`modified_step`].
pub fn modified_update<R: Rng + ?Sized>(
    leaders: &LeaderSet,
    current: &[f64],
    a: f64,
    bounds: &SearchBox,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if leaders.gamma().is_none() {
        return Err(OptimizerError::MissingGamma);
    }
    let coeffs: Vec<Coefficients> = (0..4)
        .map(|_| draw_coefficients(a, current.len(), rng))
        .collect();
    modified_step(leaders, current, &coeffs, bounds)
}

/// Uniform initial population inside the configured box.
pub fn init_population<R: Rng + ?Sized>(
    config: &GwoConfig,
    rng: &mut R,
) -> Result<Vec<SearchAgent>> {
    config.validate()?;
    let bounds = config.search_box()?;
    let width = bounds.upper - bounds.lower;
    Ok((0..config.agents)
        .map(|_| SearchAgent {
            position: (0..config.dimension)
                .map(|_| bounds.lower + rng.random::<f64>() * width)
                .collect(),
            fitness: None,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub a: f64,
}

/// Per-iteration progress. Row 0 describes the initial population.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub const CSV_HEADER: &'static str = "iteration,best_fitness,mean_fitness,a";

    pub fn best_fitness(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.best_fitness)
    }

    pub fn is_monotone(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].best_fitness <= w[0].best_fitness)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:.12e},{:.12e},{:.12e}",
                r.iteration, r.best_fitness, r.mean_fitness, r.a
            );
        }
        out
    }
}

/// Result of a full run: the final alpha and the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub position: Vec<f64>,
    pub fitness: f64,
    pub trace: ConvergenceTrace,
}

fn evaluate<F>(population: &mut [SearchAgent], objective: &F) -> Result<()>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let values: Vec<f64> = population
        .par_iter()
        .map(|agent| objective(&agent.position))
        .collect();
    for (index, (agent, value)) in population.iter_mut().zip(values).enumerate() {
        if !value.is_finite() {
            return Err(OptimizerError::NonFinite {
                agent: index,
                value,
                position: agent.position.clone(),
            });
        }
        agent.fitness = Some(value);
    }
    Ok(())
}

fn mean_fitness(population: &[SearchAgent]) -> f64 {
    let sum: f64 = population.iter().filter_map(|a| a.fitness).sum();
    sum / population.len() as f64
}

/// Minimize `objective` over the configured box.
///
/// Objective calls within an iteration run on the current rayon pool; the
/// result is identical to a sequential run.
pub fn optimize<F>(config: &GwoConfig, objective: F) -> Result<Optimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let bounds = config.search_box()?;
    let mut rng = seed::stream(config.seed);

    let mut population = init_population(config, &mut rng)?;
    evaluate(&mut population, &objective)?;
    let mut leaders = LeaderSet::empty(config.variant.leader_count(), config.dimension);
    update_leaders(&mut leaders, &population);

    let mut trace = ConvergenceTrace::default();
    trace.records.push(TraceRecord {
        iteration: 0,
        best_fitness: leaders.alpha().fitness,
        mean_fitness: mean_fitness(&population),
        a: 2.0,
    });

    for t in 0..config.max_iterations {
        let a = decay_a(t, config.max_iterations)?;
        for agent in &mut population {
            agent.position = match config.variant {
                Variant::Standard => {
                    standard_update(&leaders, &agent.position, a, &bounds, &mut rng)?
                }
                Variant::Modified => {
                    modified_update(&leaders, &agent.position, a, &bounds, &mut rng)?
                }
            };
            agent.fitness = None;
        }
        evaluate(&mut population, &objective)?;
        update_leaders(&mut leaders, &population);
        trace.records.push(TraceRecord {
            iteration: t + 1,
            best_fitness: leaders.alpha().fitness,
            mean_fitness: mean_fitness(&population),
            a,
        });
    }

    let alpha = leaders.alpha();
    Ok(Optimum {
        position: alpha.position.clone(),
        fitness: alpha.fitness,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream;
    use proptest::prelude::*;
    use rand::Rng;

    fn unbounded() -> SearchBox {
        SearchBox::new(-1e300, 1e300).unwrap()
    }

    fn leaders_1d(values: &[f64]) -> LeaderSet {
        LeaderSet::from_positions(values.iter().map(|&v| vec![v]).collect()).unwrap()
    }

    #[test]
    fn decay_endpoints_and_midpoint() {
        assert_eq!(decay_a(0, 75).unwrap(), 2.0);
        assert_eq!(decay_a(75, 75).unwrap(), 0.0);
        assert_eq!(decay_a(50, 100).unwrap(), 1.0);
        assert!(matches!(
            decay_a(76, 75),
            Err(OptimizerError::Domain { .. })
        ));
    }

    #[test]
    fn coefficient_boundaries() {
        let c = Coefficients::from_uniforms(1.5, &[0.0, 0.0], &[0.5, 0.5]).unwrap();
        assert_eq!(c.step, vec![-1.5, -1.5]);
        assert_eq!(c.emphasis, vec![1.0, 1.0]);
        let c = Coefficients::from_uniforms(1.5, &[1.0], &[0.0]).unwrap();
        assert_eq!(c.step, vec![1.5]);
        assert_eq!(c.emphasis, vec![0.0]);
    }

    #[test]
    fn distance_examples() {
        assert_eq!(leader_distance(&[3.0], &[1.0], &[3.0]).unwrap(), vec![0.0]);
        assert_eq!(leader_distance(&[2.0], &[1.0], &[0.0]).unwrap(), vec![2.0]);
        assert_eq!(
            leader_distance(&[4.0, 1.0], &[0.5, 2.0], &[1.0, 3.0]).unwrap(),
            vec![1.0, 1.0]
        );
        assert!(leader_distance(&[1.0], &[1.0, 1.0], &[1.0]).is_err());
    }

    #[test]
    fn standard_hand_case() {
        // D = (3, 1, 1), X_k = (1, 1, -1), mean 1/3
        let leaders = leaders_1d(&[4.0, 2.0, 0.0]);
        let coeffs = vec![Coefficients::constant(1.0, 1.0, 1.0, 1); 3];
        let next = standard_step(&leaders, &[1.0], &coeffs, &unbounded()).unwrap();
        assert!((next[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn modified_hand_case() {
        // D = (3, 1, 1, 1), D_avg = 1.5, X_k = (2.5, 0.5, -1.5, 0.5), mean 0.5
        let leaders = leaders_1d(&[4.0, 2.0, 0.0, 2.0]);
        let leaders = LeaderSet::from_leaders(
            leaders
                .leaders()
                .iter()
                .enumerate()
                .map(|(i, l)| Leader {
                    position: l.position.clone(),
                    fitness: i as f64,
                })
                .collect(),
        )
        .unwrap();
        let coeffs = vec![Coefficients::constant(1.0, 1.0, 1.0, 1); 4];
        let next = modified_step(&leaders, &[1.0], &coeffs, &unbounded()).unwrap();
        assert_eq!(next, vec![0.5]);
    }

    #[test]
    fn modified_requires_gamma() {
        let leaders = leaders_1d(&[4.0, 2.0, 0.0]);
        let mut rng = stream(1);
        assert_eq!(
            modified_update(&leaders, &[1.0], 1.0, &unbounded(), &mut rng),
            Err(OptimizerError::MissingGamma)
        );
    }

    #[test]
    fn fixed_point_at_shared_leader() {
        let l = vec![0.3, -1.2, 4.0];
        let three = LeaderSet::from_positions(vec![l.clone(); 3]).unwrap();
        let four = LeaderSet::from_positions(vec![l.clone(); 4]).unwrap();
        for step in [-2.0, -0.4, 0.0, 1.7] {
            let c = Coefficients::constant(2.0, step, 1.0, 3);
            let s = standard_step(&three, &l, &vec![c.clone(); 3], &unbounded()).unwrap();
            let m = modified_step(&four, &l, &vec![c; 4], &unbounded()).unwrap();
            assert_eq!(s, l);
            assert_eq!(m, l);
        }
    }

    #[test]
    fn leaders_from_fresh_slots() {
        let mut leaders = LeaderSet::empty(4, 1);
        let pop: Vec<SearchAgent> = [5.0, 1.0, 3.0, 2.0]
            .iter()
            .map(|&f| SearchAgent {
                position: vec![f],
                fitness: Some(f),
            })
            .collect();
        update_leaders(&mut leaders, &pop);
        let got: Vec<f64> = leaders.leaders().iter().map(|l| l.fitness).collect();
        assert_eq!(got, vec![1.0, 2.0, 3.0, 5.0]);
    }

    #[test]
    fn leaders_cascade_and_persist() {
        let mut leaders = LeaderSet::from_leaders(
            [1.0, 2.0, 3.0]
                .iter()
                .map(|&f| Leader {
                    position: vec![f],
                    fitness: f,
                })
                .collect(),
        )
        .unwrap();
        let before = leaders.clone();
        let worse = [SearchAgent {
            position: vec![9.0],
            fitness: Some(9.0),
        }];
        update_leaders(&mut leaders, &worse);
        assert_eq!(leaders, before);

        assert_eq!(leaders.offer(&[0.5], 0.5), Some(0));
        let got: Vec<f64> = leaders.leaders().iter().map(|l| l.fitness).collect();
        assert_eq!(got, vec![0.5, 1.0, 2.0]);

        // ties keep the earlier discovery
        assert_eq!(leaders.offer(&[42.0], 1.0), Some(2));
        assert_eq!(leaders.beta().position, vec![1.0]);
        assert_eq!(leaders.delta().position, vec![42.0]);
    }

    #[test]
    fn init_population_examples() {
        let mut cfg = GwoConfig::new(1, Variant::Modified);
        cfg.agents = 4;
        cfg.lower_bound = 0.0;
        cfg.upper_bound = 0.0;
        let pop = init_population(&cfg, &mut stream(3)).unwrap();
        assert_eq!(pop.len(), 4);
        assert!(pop
            .iter()
            .all(|a| a.position == vec![0.0] && a.fitness.is_none()));

        let mut cfg = GwoConfig::new(3, Variant::Standard);
        cfg.agents = 10;
        cfg.lower_bound = -1.0;
        cfg.upper_bound = 1.0;
        let pop = init_population(&cfg, &mut stream(9)).unwrap();
        let coords: Vec<f64> = pop.iter().flat_map(|a| a.position.clone()).collect();
        assert_eq!(coords.len(), 30);
        assert!(coords.iter().all(|x| (-1.0..=1.0).contains(x)));

        let cfg = GwoConfig::new(511, Variant::Modified);
        let a = init_population(&cfg, &mut stream(11)).unwrap();
        let b = init_population(&cfg, &mut stream(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn agent_minimum_per_variant() {
        let mut cfg = GwoConfig::new(2, Variant::Modified);
        cfg.agents = 3;
        assert!(matches!(cfg.validate(), Err(OptimizerError::Config(_))));
        cfg.variant = Variant::Standard;
        assert!(cfg.validate().is_ok());
        cfg.agents = 2;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn constant_objective_reaches_zero_immediately() {
        let mut cfg = GwoConfig::new(4, Variant::Modified);
        cfg.agents = 6;
        cfg.max_iterations = 3;
        let run = optimize(&cfg, |_| 0.0).unwrap();
        assert_eq!(run.fitness, 0.0);
        assert_eq!(run.trace.records[1].best_fitness, 0.0);
        assert_eq!(run.trace.records.len(), 4);
    }

    #[test]
    fn non_finite_objective_names_the_agent() {
        let mut cfg = GwoConfig::new(2, Variant::Standard);
        cfg.agents = 5;
        let err = optimize(&cfg, |x| if x[0] > 0.0 { f64::NAN } else { 1.0 }).unwrap_err();
        match err {
            OptimizerError::NonFinite { position, .. } => assert!(position[0] > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_iterations_returns_best_initial_agent() {
        let mut cfg = GwoConfig::new(3, Variant::Standard);
        cfg.agents = 8;
        cfg.max_iterations = 0;
        cfg.seed = 5;
        let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let run = optimize(&cfg, sphere).unwrap();
        let pop = init_population(&cfg, &mut stream(5)).unwrap();
        let best = pop
            .iter()
            .map(|a| sphere(&a.position))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(run.fitness, best);
        assert_eq!(run.trace.records.len(), 1);
    }

    #[test]
    fn trace_csv_layout() {
        let mut cfg = GwoConfig::new(2, Variant::Standard);
        cfg.agents = 4;
        cfg.max_iterations = 2;
        let csv = optimize(&cfg, |x| x[0].abs()).unwrap().trace.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], ConvergenceTrace::CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,"));
        // 13 significant digits in scientific notation
        let field = lines[2].split(',').nth(3).unwrap();
        assert_eq!(field, "2.000000000000e0");
    }

    proptest! {
        #[test]
        fn decay_is_symmetric(total in 1usize..500, frac in 0.0f64..=1.0) {
            let t = ((total as f64) * frac).floor() as usize;
            let sum = decay_a(t, total).unwrap() + decay_a(total - t, total).unwrap();
            prop_assert!((sum - 2.0).abs() < 1e-12);
        }

        #[test]
        fn drawn_coefficients_stay_in_range(a in 0.0f64..=2.0, d in 1usize..20, s in any::<u64>()) {
            let c = draw_coefficients(a, d, &mut stream(s));
            prop_assert!(c.step.iter().all(|x| x.abs() <= a));
            prop_assert!(c.emphasis.iter().all(|x| (0.0..=2.0).contains(x)));
        }

        #[test]
        fn updates_stay_in_box(s in any::<u64>(), d in 1usize..6, a in 0.0f64..=2.0) {
            let mut rng = stream(s);
            let bounds = SearchBox::new(-1.0, 1.0).unwrap();
            let positions: Vec<Vec<f64>> = (0..5)
                .map(|_| (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect())
                .collect();
            let four = LeaderSet::from_positions(positions[..4].to_vec()).unwrap();
            let three = LeaderSet::from_positions(positions[..3].to_vec()).unwrap();
            let current = &positions[4];
            let s = standard_update(&three, current, a, &bounds, &mut rng).unwrap();
            let m = modified_update(&four, current, a, &bounds, &mut rng).unwrap();
            prop_assert!(s.iter().chain(&m).all(|&x| bounds.contains(x)));
        }
    }
}
