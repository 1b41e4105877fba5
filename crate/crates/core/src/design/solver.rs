//! Away-step Frank–Wolfe on the probability simplex.
//!
//! The linear maximization oracle over the simplex is the vertex with the
//! largest gradient entry. Away steps move mass off the active vertex with
//! the smallest gradient entry, which lets the iterate reach faces of the
//! simplex exactly and gives linear convergence on these log-det and trace
//! objectives. The step length maximizes the objective along the chosen
//! direction by bisection on the directional derivative.

use nalgebra::DVector;

use super::DesignProblem;
use crate::estimation::Design;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            max_iters: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub design: Design,
    pub objective_value: f64,
    /// Frank–Wolfe gap at the returned design.
    pub duality_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective at the starting point, then one entry per iteration obtained
    /// by adding the exact per-step increment, so it is nondecreasing even
    /// when the increments fall below the resolution of the objective.
    pub trace: Vec<f64>,
}

const BISECTION_STEPS: usize = 80;

/// Maximizes the problem's utility over the simplex, starting from uniform.
pub fn solve_relaxation(problem: &DesignProblem<'_>, options: SolverOptions) -> SolverReport {
    assert!(options.tol > 0.0, "tolerance must be positive");
    let n = problem.basis().n();
    let mut eta = DVector::from_element(n, 1.0 / n as f64);
    let mut eval = problem.evaluate(&eta);
    let mut trace = vec![eval.value];
    let mut iterations = 0;
    let mut gap = f64::INFINITY;

    while let Some(grad) = eval.gradient.as_ref() {
        let current = grad.dot(&eta);
        let toward = argmax(grad.iter().copied().enumerate());
        gap = grad[toward] - current;
        if gap <= options.tol || iterations >= options.max_iters {
            break;
        }
        let away = argmax(
            eta.iter()
                .enumerate()
                .filter(|(_, &x)| x > 0.0)
                .map(|(i, _)| (i, -grad[i])),
        );
        let away_gap = current - grad[away];

        let (direction, max_step, drop) = if gap >= away_gap || eta[away] >= 1.0 {
            let mut d = -&eta;
            d[toward] += 1.0;
            (d, 1.0, None)
        } else {
            let mut d = eta.clone();
            d[away] -= 1.0;
            (d, eta[away] / (1.0 - eta[away]), Some(away))
        };

        let slope_start = if drop.is_some() { away_gap } else { gap };
        let (step, slope_end) = line_search(problem, &eta, &direction, max_step);
        if step <= 0.0 {
            break;
        }
        let mut next = &eta + &direction * step;
        next.iter_mut().for_each(|x| *x = x.max(0.0));
        if let (Some(a), true) = (drop, step >= max_step) {
            next[a] = 0.0;
        }
        // By concavity the exact gain along the segment lies in
        // [step·slope_end, step·slope_start]; the closed-form increment at the
        // rounded iterate is clamped to that interval.
        let gain = problem
            .increment(&eta, &(&next - &eta))
            .clamp(step * slope_end, step * slope_start);
        if !gain.is_finite() {
            break;
        }
        eta = next;
        eval = problem.evaluate(&eta);
        trace.push(trace.last().copied().unwrap_or(f64::NEG_INFINITY) + gain);
        iterations += 1;
    }

    let sum = eta.sum();
    eta /= sum;
    let design = Design::new(eta, problem.budget()).expect("iterate stays on the simplex");
    SolverReport {
        objective_value: eval.value,
        duality_gap: gap,
        converged: gap <= options.tol,
        iterations,
        design,
        trace,
    }
}

/// First index of the largest value.
fn argmax(values: impl Iterator<Item = (usize, f64)>) -> usize {
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for (i, v) in values {
        if best.0 == usize::MAX || v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Largest step in `[0, max_step]` at which the directional derivative is
/// still nonnegative, so the objective never decreases along the step.
/// Returns the step and the directional derivative there.
fn line_search(
    problem: &DesignProblem<'_>,
    eta: &DVector<f64>,
    direction: &DVector<f64>,
    max_step: f64,
) -> (f64, f64) {
    let slope = |step: f64| -> f64 {
        match problem.gradient(&(eta + direction * step)) {
            Some(g) => g.dot(direction),
            None => f64::NEG_INFINITY,
        }
    };
    let at_max = slope(max_step);
    if at_max >= 0.0 {
        return (max_step, at_max);
    }
    let (mut lo, mut hi) = (0.0, max_step);
    let mut slope_lo = slope(0.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = slope(mid);
        if s >= 0.0 {
            lo = mid;
            slope_lo = s;
        } else {
            hi = mid;
        }
    }
    (lo, slope_lo)
}
