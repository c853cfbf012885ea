//! Particle swarm minimizer over box-bounded continuous positions.
//!
//! Synchronous variant: every particle moves using the global best of the
//! previous iteration, then the whole swarm is evaluated (in parallel, merged
//! in particle order) and the bests are updated. All randomness comes from a
//! single seeded ChaCha stream, so a run is fully determined by its config.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Inertia weight policy across iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InertiaSchedule {
    /// `θ(i) = θ_max − (θ_max − θ_min)·i/iterations`.
    LinearDecay,
    /// Fixed weight, independent of the iteration.
    Constant(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    pub particle_count: usize,
    pub dimensions: usize,
    pub iterations: usize,
    /// Cognitive weight.
    pub c1: f64,
    /// Social weight.
    pub c2: f64,
    pub inertia_max: f64,
    pub inertia_min: f64,
    pub inertia: InertiaSchedule,
    pub position_bounds: Vec<(f64, f64)>,
    /// Initial velocities are drawn in these bounds; updates are clamped to
    /// `±|high|`.
    pub velocity_bounds: Vec<(f64, f64)>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid swarm configuration: {0}")]
pub struct ConfigError(String);

impl SwarmConfig {
    /// Defaults: 30 particles, 100 iterations, `c1 = c2 = 2`, inertia 0.9 → 0.4
    /// linear, velocities within a fifth of each position range.
    pub fn new(position_bounds: Vec<(f64, f64)>) -> Self {
        let velocity_bounds = position_bounds
            .iter()
            .map(|&(lo, hi)| {
                let v = 0.2 * (hi - lo);
                (-v, v)
            })
            .collect();
        Self {
            particle_count: 30,
            dimensions: position_bounds.len(),
            iterations: 100,
            c1: 2.0,
            c2: 2.0,
            inertia_max: 0.9,
            inertia_min: 0.4,
            inertia: InertiaSchedule::LinearDecay,
            position_bounds,
            velocity_bounds,
            seed: 0,
        }
    }

    /// Same box `[low, high]` in every one of `dimensions`.
    pub fn uniform(dimensions: usize, low: f64, high: f64) -> Self {
        Self::new(vec![(low, high); dimensions])
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: String| Err(ConfigError(m));
        if self.particle_count == 0 || self.dimensions == 0 || self.iterations == 0 {
            return fail("particle_count, dimensions and iterations must be positive".into());
        }
        if self.position_bounds.len() != self.dimensions
            || self.velocity_bounds.len() != self.dimensions
        {
            return fail(format!(
                "expected {} position and velocity bounds, got {} and {}",
                self.dimensions,
                self.position_bounds.len(),
                self.velocity_bounds.len()
            ));
        }
        if !(self.inertia_max >= self.inertia_min && self.inertia_min > 0.0) {
            return fail(format!(
                "inertia bounds must satisfy max >= min > 0 (got {} and {})",
                self.inertia_max, self.inertia_min
            ));
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0) {
            return fail("c1 and c2 must be non-negative".into());
        }
        for (d, (p, v)) in self
            .position_bounds
            .iter()
            .zip(&self.velocity_bounds)
            .enumerate()
        {
            if !(p.0 <= p.1 && p.0.is_finite() && p.1.is_finite()) {
                return fail(format!("position bounds of dimension {d} are not ordered"));
            }
            if !(v.0 <= v.1 && v.0.is_finite() && v.1.is_finite()) {
                return fail(format!("velocity bounds of dimension {d} are not ordered"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub personal_best_position: Vec<f64>,
    pub personal_best_fitness: f64,
}

/// Particles plus the best position seen by any of them.
#[derive(Debug, Clone)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub global_best_position: Vec<f64>,
    pub global_best_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Best-so-far fitness after each iteration.
    pub fitness_history: Vec<f64>,
}

/// Objective failure together with the position it was evaluated at.
#[derive(Debug, Error)]
pub enum OptimizeError<E: std::error::Error + 'static> {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("objective failed at {position:?}: {source}")]
    Objective {
        position: Vec<f64>,
        #[source]
        source: E,
    },
}

/// The random source a run draws from.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draw(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Uniform random positions and velocities inside the configured boxes.
/// Fitness is not evaluated yet: personal bests hold the initial positions
/// with infinite fitness.
pub fn init_swarm(config: &SwarmConfig, rng: &mut impl Rng) -> Swarm {
    let particles = (0..config.particle_count)
        .map(|_| {
            let position: Vec<f64> = config
                .position_bounds
                .iter()
                .map(|&b| draw(rng, b))
                .collect();
            let velocity = config
                .velocity_bounds
                .iter()
                .map(|&b| draw(rng, b))
                .collect();
            Particle {
                personal_best_position: position.clone(),
                position,
                velocity,
                personal_best_fitness: f64::INFINITY,
            }
        })
        .collect::<Vec<_>>();
    Swarm {
        global_best_position: particles[0].position.clone(),
        global_best_fitness: f64::INFINITY,
        particles,
    }
}

/// Inertia weight at `iteration` (0 = start, `config.iterations` = end).
pub fn inertia_weight(config: &SwarmConfig, iteration: usize) -> f64 {
    let w = match config.inertia {
        InertiaSchedule::LinearDecay => {
            let progress = iteration.min(config.iterations) as f64 / config.iterations as f64;
            config.inertia_max - (config.inertia_max - config.inertia_min) * progress
        }
        InertiaSchedule::Constant(w) => w,
    };
    w.clamp(config.inertia_min, config.inertia_max)
}

/// One velocity component before clamping:
/// `θ·v + c1·r1·(p_best − x) + c2·r2·(g_best − x)`.
#[allow(clippy::too_many_arguments)]
pub fn velocity_component(
    velocity: f64,
    position: f64,
    personal_best: f64,
    global_best: f64,
    theta: f64,
    c1: f64,
    c2: f64,
    r1: f64,
    r2: f64,
) -> f64 {
    theta * velocity + c1 * r1 * (personal_best - position) + c2 * r2 * (global_best - position)
}

/// Moves the particle's velocity toward its own and the swarm's best, with
/// fresh uniform draws per dimension and term, clamped to `±|v_high|`.
pub fn update_velocity(
    particle: &mut Particle,
    global_best: &[f64],
    theta: f64,
    config: &SwarmConfig,
    rng: &mut impl Rng,
) {
    #[allow(clippy::needless_range_loop)]
    for d in 0..particle.velocity.len() {
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        let v = velocity_component(
            particle.velocity[d],
            particle.position[d],
            particle.personal_best_position[d],
            global_best[d],
            theta,
            config.c1,
            config.c2,
            r1,
            r2,
        );
        let limit = config.velocity_bounds[d].1.abs();
        particle.velocity[d] = v.clamp(-limit, limit);
    }
}

/// `x ← x + v`, clamped into the position box; a clamped component loses its
/// velocity.
pub fn update_position(particle: &mut Particle, config: &SwarmConfig) {
    for d in 0..particle.position.len() {
        let (lo, hi) = config.position_bounds[d];
        let x = particle.position[d] + particle.velocity[d];
        if x < lo {
            particle.position[d] = lo;
            particle.velocity[d] = 0.0;
        } else if x > hi {
            particle.position[d] = hi;
            particle.velocity[d] = 0.0;
        } else {
            particle.position[d] = x;
        }
    }
}

impl Swarm {
    /// Evaluates every particle and folds the results into the personal and
    /// global bests in particle order.
    fn evaluate<F, E>(&mut self, objective: &F) -> Result<(), OptimizeError<E>>
    where
        F: Fn(&[f64]) -> Result<f64, E> + Sync,
        E: std::error::Error + Send + 'static,
    {
        let fitness: Vec<Result<f64, E>> = self
            .particles
            .par_iter()
            .map(|p| objective(&p.position))
            .collect();
        for (p, f) in self.particles.iter_mut().zip(fitness) {
            let f = f.map_err(|source| OptimizeError::Objective {
                position: p.position.clone(),
                source,
            })?;
            if f < p.personal_best_fitness {
                p.personal_best_fitness = f;
                p.personal_best_position.clone_from(&p.position);
            }
            if f < self.global_best_fitness {
                self.global_best_fitness = f;
                self.global_best_position.clone_from(&p.position);
            }
        }
        Ok(())
    }
}

/// Minimizes `objective` over the configured box.
pub fn optimize<F, E>(objective: F, config: &SwarmConfig) -> Result<OptimizationTrace, OptimizeError<E>>
where
    F: Fn(&[f64]) -> Result<f64, E> + Sync,
    E: std::error::Error + Send + 'static,
{
    config.validate()?;
    let mut rng = seeded_rng(config.seed);
    let mut swarm = init_swarm(config, &mut rng);
    swarm.evaluate(&objective)?;

    let mut history = Vec::with_capacity(config.iterations);
    for iteration in 1..=config.iterations {
        let theta = inertia_weight(config, iteration);
        let gbest = swarm.global_best_position.clone();
        for p in &mut swarm.particles {
            update_velocity(p, &gbest, theta, config, &mut rng);
            update_position(p, config);
        }
        swarm.evaluate(&objective)?;
        history.push(swarm.global_best_fitness);
    }

    Ok(OptimizationTrace {
        best_position: swarm.global_best_position,
        best_fitness: swarm.global_best_fitness,
        fitness_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;
    use std::sync::atomic::{AtomicBool, Ordering};

    fn sphere(x: &[f64]) -> Result<f64, Infallible> {
        Ok(x.iter().map(|v| v * v).sum())
    }

    fn particle(x: Vec<f64>, v: Vec<f64>) -> Particle {
        Particle {
            personal_best_position: x.clone(),
            position: x,
            velocity: v,
            personal_best_fitness: f64::INFINITY,
        }
    }

    #[test]
    fn init_respects_bounds() {
        let mut cfg = SwarmConfig::uniform(11, 0.0, 31.0);
        cfg.velocity_bounds = vec![(0.0, 1.0); 11];
        let swarm = init_swarm(&cfg, &mut seeded_rng(3));
        assert_eq!(swarm.particles.len(), 30);
        for p in &swarm.particles {
            assert!(p.position.iter().all(|x| (0.0..=31.0).contains(x)));
            assert!(p.velocity.iter().all(|v| (0.0..=1.0).contains(v)));
            assert_eq!(p.position, p.personal_best_position);
        }
    }

    #[test]
    fn collapsed_box() {
        let cfg = SwarmConfig::uniform(3, 2.5, 2.5);
        let swarm = init_swarm(&cfg, &mut seeded_rng(9));
        for p in &swarm.particles {
            assert_eq!(p.position, vec![2.5; 3]);
        }
    }

    #[test]
    fn same_seed_same_swarm() {
        let cfg = SwarmConfig::uniform(4, -1.0, 1.0);
        let a = init_swarm(&cfg, &mut seeded_rng(7));
        let b = init_swarm(&cfg, &mut seeded_rng(7));
        assert_eq!(a.particles, b.particles);
    }

    #[test]
    fn linear_inertia() {
        let cfg = SwarmConfig::uniform(1, 0.0, 1.0);
        assert_eq!(inertia_weight(&cfg, 0), 0.9);
        assert!((inertia_weight(&cfg, 100) - 0.4).abs() < 1e-15);
        assert!((inertia_weight(&cfg, 50) - 0.65).abs() < 1e-15);
        for i in 0..=100 {
            let w = inertia_weight(&cfg, i);
            assert!((0.4..=0.9).contains(&w));
        }
    }

    #[test]
    fn no_attraction_keeps_velocity() {
        let mut cfg = SwarmConfig::uniform(2, -10.0, 10.0);
        cfg.c1 = 0.0;
        cfg.c2 = 0.0;
        let mut p = particle(vec![1.0, -2.0], vec![0.3, -0.7]);
        p.personal_best_position = vec![5.0, 5.0];
        update_velocity(&mut p, &[-3.0, 4.0], 1.0, &cfg, &mut seeded_rng(1));
        assert_eq!(p.velocity, vec![0.3, -0.7]);
    }

    #[test]
    fn zero_displacement_scales_by_theta() {
        let cfg = SwarmConfig::uniform(2, -10.0, 10.0);
        let mut p = particle(vec![1.0, 1.0], vec![2.0, -1.0]);
        update_velocity(&mut p, &[1.0, 1.0], 0.5, &cfg, &mut seeded_rng(1));
        assert_eq!(p.velocity, vec![1.0, -0.5]);
    }

    #[test]
    fn velocity_hand_arithmetic() {
        assert_eq!(velocity_component(2.0, 0.0, 1.0, 3.0, 0.5, 2.0, 2.0, 1.0, 1.0), 9.0);
    }

    #[test]
    fn velocity_is_clamped_symmetrically() {
        let mut cfg = SwarmConfig::uniform(1, 0.0, 31.0);
        cfg.velocity_bounds = vec![(0.0, 1.0)];
        let mut p = particle(vec![0.0], vec![0.0]);
        p.personal_best_position = vec![31.0];
        update_velocity(&mut p, &[31.0], 1.0, &cfg, &mut seeded_rng(2));
        assert_eq!(p.velocity, vec![1.0]);
        let mut p = particle(vec![31.0], vec![0.0]);
        p.personal_best_position = vec![0.0];
        update_velocity(&mut p, &[0.0], 1.0, &cfg, &mut seeded_rng(2));
        assert_eq!(p.velocity, vec![-1.0]);
    }

    #[test]
    fn position_updates() {
        let cfg = SwarmConfig::uniform(2, 0.0, 31.0);
        let mut p = particle(vec![1.0, 2.0], vec![0.0, 0.0]);
        update_position(&mut p, &cfg);
        assert_eq!(p.position, vec![1.0, 2.0]);

        let mut p = particle(vec![1.0, 2.0], vec![0.5, -1.0]);
        update_position(&mut p, &cfg);
        assert_eq!(p.position, vec![1.5, 1.0]);
        assert_eq!(p.velocity, vec![0.5, -1.0]);

        let mut p = particle(vec![30.0, 0.5], vec![5.0, -2.0]);
        update_position(&mut p, &cfg);
        assert_eq!(p.position, vec![31.0, 0.0]);
        assert_eq!(p.velocity, vec![0.0, 0.0]);
    }

    #[test]
    fn flat_landscape() {
        let cfg = SwarmConfig {
            iterations: 20,
            ..SwarmConfig::uniform(3, -1.0, 1.0)
        };
        let trace = optimize(|_: &[f64]| Ok::<_, Infallible>(4.25), &cfg).unwrap();
        assert_eq!(trace.best_fitness, 4.25);
        assert_eq!(trace.fitness_history, vec![4.25; 20]);
    }

    #[test]
    fn stationary_swarm_keeps_best_initial_sample() {
        let mut cfg = SwarmConfig::uniform(3, -5.0, 5.0);
        cfg.c1 = 0.0;
        cfg.c2 = 0.0;
        cfg.inertia_max = 1.0;
        cfg.inertia_min = 1.0;
        cfg.velocity_bounds = vec![(0.0, 0.0); 3];
        cfg.iterations = 15;
        cfg.seed = 11;
        let initial = init_swarm(&cfg, &mut seeded_rng(11));
        let best = initial
            .particles
            .iter()
            .map(|p| sphere(&p.position).unwrap())
            .fold(f64::INFINITY, f64::min);
        let trace = optimize(sphere, &cfg).unwrap();
        assert_eq!(trace.best_fitness, best);
        assert!(trace.fitness_history.iter().all(|&f| f == best));
    }

    #[test]
    fn never_evaluates_out_of_bounds() {
        let cfg = SwarmConfig {
            seed: 5,
            ..SwarmConfig::uniform(4, -1.0, 2.0)
        };
        let escaped = AtomicBool::new(false);
        let trace = optimize(
            |x: &[f64]| {
                if x.iter().any(|v| !(-1.0..=2.0).contains(v)) {
                    escaped.store(true, Ordering::Relaxed);
                }
                Ok::<_, Infallible>(x.iter().map(|v| (v - 1.7).powi(2)).sum())
            },
            &cfg,
        )
        .unwrap();
        assert!(!escaped.load(Ordering::Relaxed));
        assert!(trace.best_fitness < 1e-3);
    }

    #[test]
    fn history_monotone_and_reproducible() {
        let cfg = SwarmConfig {
            seed: 77,
            ..SwarmConfig::uniform(5, -10.0, 10.0)
        };
        let a = optimize(sphere, &cfg).unwrap();
        let b = optimize(sphere, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fitness_history.len(), 100);
        assert!(a.fitness_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*a.fitness_history.last().unwrap(), a.best_fitness);
    }

    #[derive(Debug, thiserror::Error)]
    #[error("boom")]
    struct Boom;

    #[test]
    fn objective_error_carries_position() {
        let cfg = SwarmConfig::uniform(2, 0.0, 1.0);
        let err = optimize(|_: &[f64]| Err::<f64, _>(Boom), &cfg).unwrap_err();
        match err {
            OptimizeError::Objective { position, .. } => assert_eq!(position.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = SwarmConfig::uniform(2, 0.0, 1.0);
        cfg.inertia_min = 0.95;
        assert!(cfg.validate().is_err());
        let mut cfg = SwarmConfig::uniform(2, 0.0, 1.0);
        cfg.position_bounds[1] = (3.0, 1.0);
        assert!(cfg.validate().is_err());
        let mut cfg = SwarmConfig::uniform(2, 0.0, 1.0);
        cfg.dimensions = 3;
        assert!(cfg.validate().is_err());
    }
}
