//! Scalar-objective minimizers for local training and server fine-tuning.
//!
//! Two methods behind one entry point: an adaptive Nelder–Mead simplex
//! (derivative-free) and plain gradient descent on central-difference
//! gradients. Both are deterministic given the same inputs and record every
//! objective evaluation in an [`ObjectiveTrace`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GradientFree,
    GradientDescent,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub method: Method,
    pub maxiter: usize,
    /// Reserved for stochastic method variants; the two built-in methods are
    /// fully deterministic and do not consume it.
    #[serde(default)]
    pub seed: u64,
    /// Gradient-descent step size.
    #[serde(default = "default_step_size")]
    pub step_size: f64,
    /// Edge length of the initial Nelder–Mead simplex.
    #[serde(default = "default_simplex_scale")]
    pub initial_simplex_scale: f64,
    /// Central-difference half-step.
    #[serde(default = "default_fd_epsilon")]
    pub fd_epsilon: f64,
}

fn default_step_size() -> f64 {
    0.1
}
fn default_simplex_scale() -> f64 {
    0.5
}
fn default_fd_epsilon() -> f64 {
    1e-5
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: Method::GradientFree,
            maxiter: 100,
            seed: 0,
            step_size: default_step_size(),
            initial_simplex_scale: default_simplex_scale(),
            fd_epsilon: default_fd_epsilon(),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.step_size <= 0.0 {
            return Err(Error::invalid_config("step_size", "must be > 0"));
        }
        if self.initial_simplex_scale <= 0.0 {
            return Err(Error::invalid_config("initial_simplex_scale", "must be > 0"));
        }
        if self.fd_epsilon <= 0.0 {
            return Err(Error::invalid_config("fd_epsilon", "must be > 0"));
        }
        Ok(())
    }
}

/// Everything the minimizer saw: one `(params, value)` entry per objective
/// call, plus the best point found.
#[derive(Debug, Clone)]
pub struct ObjectiveTrace {
    pub evaluations: Vec<(Vec<f64>, f64)>,
    pub best_params: Vec<f64>,
    pub best_value: f64,
}

impl ObjectiveTrace {
    /// Running minimum over the evaluation sequence.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.evaluations
            .iter()
            .map(|(_, v)| {
                if *v < best {
                    best = *v;
                }
                best
            })
            .collect()
    }
}

struct Recorder<F> {
    objective: F,
    evaluations: Vec<(Vec<f64>, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Recorder<F> {
    fn new(objective: F) -> Self {
        Recorder {
            objective,
            evaluations: Vec::new(),
        }
    }

    fn eval(&mut self, point: &[f64]) -> f64 {
        let value = (self.objective)(point);
        self.evaluations.push((point.to_vec(), value));
        value
    }

    fn finish(self) -> ObjectiveTrace {
        let (best_params, best_value) = self
            .evaluations
            .iter()
            .filter(|(_, v)| !v.is_nan())
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(p, v)| (p.clone(), *v))
            .expect("trace holds at least the initial evaluation");
        ObjectiveTrace {
            evaluations: self.evaluations,
            best_params,
            best_value,
        }
    }
}

/// Minimize `objective` from `init`. Returns the best parameters seen and
/// the full trace; never returns a point worse than `init`.
///
/// Errors when the objective is non-finite at `init`.
pub fn minimize<F>(
    objective: F,
    init: &[f64],
    cfg: &OptimizerConfig,
) -> Result<(Vec<f64>, ObjectiveTrace)>
where
    F: FnMut(&[f64]) -> f64,
{
    cfg.validate()?;
    let mut recorder = Recorder::new(objective);
    let initial_value = recorder.eval(init);
    if !initial_value.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    if cfg.maxiter > 0 {
        match cfg.method {
            Method::GradientFree => nelder_mead(&mut recorder, init, initial_value, cfg),
            Method::GradientDescent => gradient_descent(&mut recorder, init, cfg)?,
        }
    }
    let trace = recorder.finish();
    Ok((trace.best_params.clone(), trace))
}

/// Central-difference gradient of `objective` at `point`.
pub fn finite_diff_gradient<F>(mut objective: F, point: &[f64], fd_epsilon: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
{
    if fd_epsilon <= 0.0 {
        return Err(Error::invalid_config("fd_epsilon", "must be > 0"));
    }
    let mut gradient = Vec::with_capacity(point.len());
    let mut probe = point.to_vec();
    for i in 0..point.len() {
        probe[i] = point[i] + fd_epsilon;
        let plus = objective(&probe);
        probe[i] = point[i] - fd_epsilon;
        let minus = objective(&probe);
        probe[i] = point[i];
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFiniteObjective);
        }
        gradient.push((plus - minus) / (2.0 * fd_epsilon));
    }
    Ok(gradient)
}

/// One gradient-descent iteration costs `2*dim` gradient probes plus one
/// evaluation of the current point, so `maxiter` iterations stay within
/// `maxiter * (2*dim + 1)` calls (the init evaluation is iteration one's
/// current-point evaluation).
fn gradient_descent<F>(
    recorder: &mut Recorder<F>,
    init: &[f64],
    cfg: &OptimizerConfig,
) -> Result<()>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut current = init.to_vec();
    for iteration in 0..cfg.maxiter {
        if iteration > 0 {
            let value = recorder.eval(&current);
            if !value.is_finite() {
                return Err(Error::NonFiniteObjective);
            }
        }
        let mut gradient = Vec::with_capacity(current.len());
        let mut probe = current.clone();
        for i in 0..current.len() {
            probe[i] = current[i] + cfg.fd_epsilon;
            let plus = recorder.eval(&probe);
            probe[i] = current[i] - cfg.fd_epsilon;
            let minus = recorder.eval(&probe);
            probe[i] = current[i];
            if !plus.is_finite() || !minus.is_finite() {
                return Err(Error::NonFiniteObjective);
            }
            gradient.push((plus - minus) / (2.0 * cfg.fd_epsilon));
        }
        for (x, g) in current.iter_mut().zip(&gradient) {
            *x -= cfg.step_size * g;
        }
    }
    Ok(())
}

/// Adaptive Nelder–Mead (coefficients scaled by dimension for n >= 2, the
/// classic 1/2/0.5/0.5 set for n = 1). Stops when the simplex value spread
/// drops below 1e-8 or the iteration budget is spent. Building the initial
/// simplex counts as the first iteration, and every subsequent pass
/// evaluates at most `dim + 2` points, keeping total calls within
/// `maxiter * (dim + 2)`.
fn nelder_mead<F>(
    recorder: &mut Recorder<F>,
    init: &[f64],
    initial_value: f64,
    cfg: &OptimizerConfig,
) where
    F: FnMut(&[f64]) -> f64,
{
    const SPREAD_TOL: f64 = 1e-8;
    let dim = init.len();
    if dim == 0 {
        return;
    }
    let n = dim as f64;
    let (alpha, beta, gamma, sigma) = if dim >= 2 {
        (1.0, 1.0 + 2.0 / n, 0.75 - 1.0 / (2.0 * n), 1.0 - 1.0 / n)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    // Vertices kept sorted ascending by value; ties keep insertion order so a
    // constant objective returns the init point unchanged.
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(init.to_vec(), initial_value)];
    for i in 0..dim {
        let mut vertex = init.to_vec();
        vertex[i] += cfg.initial_simplex_scale;
        let value = recorder.eval(&vertex);
        simplex.push((vertex, value));
    }
    sort_simplex(&mut simplex);

    for _ in 1..cfg.maxiter {
        let spread = simplex[dim].1 - simplex[0].1;
        if !spread.is_nan() && spread < SPREAD_TOL {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(v, _)| v[j]).sum::<f64>() / n)
            .collect();
        let worst = simplex[dim].clone();

        let reflected = combine(&centroid, &worst.0, alpha);
        let f_reflected = recorder.eval(&reflected);

        if f_reflected < simplex[0].1 {
            // Try expanding past the reflection; keep whichever is better.
            let expanded = combine(&centroid, &worst.0, alpha * beta);
            let f_expanded = recorder.eval(&expanded);
            if f_expanded < f_reflected {
                replace_worst(&mut simplex, expanded, f_expanded);
            } else {
                replace_worst(&mut simplex, reflected, f_reflected);
            }
        } else if f_reflected < simplex[dim - 1].1 {
            replace_worst(&mut simplex, reflected, f_reflected);
        } else if f_reflected < worst.1 {
            let contracted = combine(&centroid, &worst.0, alpha * gamma);
            let f_contracted = recorder.eval(&contracted);
            if f_contracted <= f_reflected {
                replace_worst(&mut simplex, contracted, f_contracted);
            } else {
                shrink(recorder, &mut simplex, sigma);
            }
        } else {
            let contracted = combine(&centroid, &worst.0, -gamma);
            let f_contracted = recorder.eval(&contracted);
            if cmp(f_contracted, worst.1) == std::cmp::Ordering::Less {
                replace_worst(&mut simplex, contracted, f_contracted);
            } else {
                shrink(recorder, &mut simplex, sigma);
            }
        }
    }
}

/// centroid + t * (centroid - worst)
fn combine(centroid: &[f64], worst: &[f64], t: f64) -> Vec<f64> {
    centroid
        .iter()
        .zip(worst)
        .map(|(c, w)| c + t * (c - w))
        .collect()
}

/// NaN sorts last so a poisoned vertex is always the first to be replaced.
fn cmp(a: f64, b: f64) -> std::cmp::Ordering {
    match (a.is_nan(), b.is_nan()) {
        (true, true) => std::cmp::Ordering::Equal,
        (true, false) => std::cmp::Ordering::Greater,
        (false, true) => std::cmp::Ordering::Less,
        (false, false) => a.partial_cmp(&b).unwrap(),
    }
}

fn sort_simplex(simplex: &mut [(Vec<f64>, f64)]) {
    simplex.sort_by(|a, b| cmp(a.1, b.1));
}

fn replace_worst(simplex: &mut Vec<(Vec<f64>, f64)>, vertex: Vec<f64>, value: f64) {
    let last = simplex.len() - 1;
    simplex[last] = (vertex, value);
    sort_simplex(simplex);
}

fn shrink<F>(recorder: &mut Recorder<F>, simplex: &mut [(Vec<f64>, f64)], sigma: f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let best = simplex[0].0.clone();
    for entry in simplex.iter_mut().skip(1) {
        let vertex: Vec<f64> = best
            .iter()
            .zip(&entry.0)
            .map(|(b, v)| b + sigma * (v - b))
            .collect();
        let value = recorder.eval(&vertex);
        *entry = (vertex, value);
    }
    sort_simplex(simplex);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(maxiter: usize) -> OptimizerConfig {
        OptimizerConfig {
            method: Method::GradientFree,
            maxiter,
            ..OptimizerConfig::default()
        }
    }

    fn gd(maxiter: usize, step_size: f64) -> OptimizerConfig {
        OptimizerConfig {
            method: Method::GradientDescent,
            maxiter,
            step_size,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn quadratic_1d_converges() {
        let (best, _) = minimize(|p| (p[0] - 3.0).powi(2), &[0.0], &gf(200)).unwrap();
        assert!((best[0] - 3.0).abs() <= 1e-3, "best = {}", best[0]);

        let (best, _) = minimize(|p| (p[0] - 3.0).powi(2), &[0.0], &gd(200, 0.1)).unwrap();
        assert!((best[0] - 3.0).abs() <= 1e-3, "best = {}", best[0]);
    }

    #[test]
    fn constant_objective_returns_init() {
        let (best, trace) = minimize(|_| 7.5, &[1.0, -2.0], &gf(50)).unwrap();
        assert_eq!(best, vec![1.0, -2.0]);
        assert_eq!(trace.best_value, 7.5);
    }

    #[test]
    fn sphere_5d_converges() {
        let init = vec![1.0; 5];
        let (_, trace) = minimize(|p| p.iter().map(|x| x * x).sum(), &init, &gf(500)).unwrap();
        assert!(trace.best_value <= 1e-4, "best = {}", trace.best_value);
    }

    #[test]
    fn maxiter_zero_single_evaluation() {
        let (best, trace) = minimize(|p| p[0].powi(2), &[2.0], &gf(0)).unwrap();
        assert_eq!(best, vec![2.0]);
        assert_eq!(trace.evaluations.len(), 1);
        assert_eq!(trace.best_value, 4.0);
    }

    #[test]
    fn non_finite_init_rejected() {
        let err = minimize(|_| f64::NAN, &[0.0], &gf(10));
        assert!(matches!(err, Err(Error::NonFiniteObjective)));
    }

    #[test]
    fn finite_diff_matches_analytic() {
        let g = finite_diff_gradient(|p| p[0] * p[0], &[2.0], 1e-5).unwrap();
        assert!((g[0] - 4.0).abs() < 1e-6);

        let g = finite_diff_gradient(|_| 3.0, &[1.0, 2.0, 3.0], 1e-5).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-12));

        let g = finite_diff_gradient(|p| p[0] * p[1], &[2.0, 3.0], 1e-5).unwrap();
        assert!((g[0] - 3.0).abs() < 1e-6 && (g[1] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn finite_diff_quadratic_relative_error() {
        // grad of 0.5*x'Ax with A = diag(1..=6) is A x.
        let diag: Vec<f64> = (1..=6).map(f64::from).collect();
        let point: Vec<f64> = (0..6).map(|i| 0.3 * (i as f64) - 0.7).collect();
        let d = diag.clone();
        let g = finite_diff_gradient(
            move |p| 0.5 * p.iter().zip(&d).map(|(x, a)| a * x * x).sum::<f64>(),
            &point,
            1e-6,
        )
        .unwrap();
        for ((gi, ai), xi) in g.iter().zip(&diag).zip(&point) {
            let exact = ai * xi;
            assert!((gi - exact).abs() <= 1e-5 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn deterministic_trace() {
        let run = || minimize(|p| (p[0] + 1.0).powi(2) + p[1].powi(2), &[4.0, -3.0], &gf(80));
        let (a, ta) = run().unwrap();
        let (b, tb) = run().unwrap();
        assert_eq!(a, b);
        assert_eq!(ta.evaluations, tb.evaluations);
    }

    #[test]
    fn evaluation_budget_respected() {
        for dim in [1usize, 3, 6] {
            for maxiter in [1usize, 5, 40] {
                let init = vec![0.7; dim];
                let count = std::cell::Cell::new(0usize);
                let rosenbrock = |p: &[f64]| {
                    count.set(count.get() + 1);
                    p.windows(2)
                        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                        .sum::<f64>()
                        + p[0].powi(2)
                };
                minimize(rosenbrock, &init, &gf(maxiter)).unwrap();
                assert!(
                    count.get() <= maxiter * (dim + 2),
                    "gradient-free: {} calls for dim={dim} maxiter={maxiter}",
                    count.get()
                );

                count.set(0);
                minimize(rosenbrock, &init, &gd(maxiter, 1e-3)).unwrap();
                assert!(
                    count.get() <= maxiter * (2 * dim + 1),
                    "gradient-descent: {} calls for dim={dim} maxiter={maxiter}",
                    count.get()
                );
            }
        }
    }

    #[test]
    fn best_so_far_non_increasing() {
        let (_, trace) = minimize(
            |p| (p[0] - 0.5).powi(2) * (p[0].sin() + 2.0),
            &[3.0],
            &gf(60),
        )
        .unwrap();
        let series = trace.best_so_far();
        assert!(series.windows(2).all(|w| w[1] <= w[0]));
        let min = trace
            .evaluations
            .iter()
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, trace.best_value);
    }

    #[test]
    fn never_worse_than_init() {
        // A nasty objective: minimize should still return something at least
        // as good as the starting point.
        let f = |p: &[f64]| if p[0] > 0.0 { p[0].ln().abs() } else { 50.0 };
        let (_, trace) = minimize(f, &[0.9], &gf(30)).unwrap();
        assert!(trace.best_value <= f(&[0.9]));
    }
}
