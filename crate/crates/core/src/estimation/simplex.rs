//! Downhill simplex search, Lagarias parameterization.
//!
//! Standard coefficients: reflection 1, expansion 2, contraction 0.5,
//! shrink 0.5. Each iteration applies the classic decision tree (reflect,
//! expand greedily, contract outside/inside, shrink) and re-sorts; the sort
//! is stable so equal objective values keep their insertion order and runs
//! reproduce exactly.

use super::EstimationConfig;
use std::time::Instant;

const RHO: f64 = 1.0; // reflection
const CHI: f64 = 2.0; // expansion
const PSI: f64 = 0.5; // contraction
const SIGMA: f64 = 0.5; // shrink

/// Working simplex: n+1 vertices over an n-dimensional search space with
/// their objective values. After a sort, `fvals` is non-decreasing and
/// `vertices` is permuted consistently.
#[derive(Debug, Clone)]
pub struct SimplexState {
    pub vertices: Vec<Vec<f64>>,
    pub fvals: Vec<f64>,
    pub n: usize,
}

impl SimplexState {
    fn sort(&mut self) {
        let mut order: Vec<usize> = (0..self.fvals.len()).collect();
        // Stable: ties keep insertion order.
        order.sort_by(|&a, &b| self.fvals[a].partial_cmp(&self.fvals[b]).unwrap());
        self.vertices = order.iter().map(|&i| self.vertices[i].clone()).collect();
        self.fvals = order.iter().map(|&i| self.fvals[i]).collect();
    }

    /// Dual convergence test: every non-best vertex within `tol_x` of the
    /// best in every coordinate, and every objective value within `tol_f`
    /// of the best. Written so non-finite values never pass.
    fn converged(&self, tol_x: f64, tol_f: f64) -> bool {
        let best = &self.vertices[0];
        let f_best = self.fvals[0];
        let x_ok = self.vertices[1..].iter().all(|v| {
            v.iter()
                .zip(best)
                .all(|(a, b)| (a - b).abs() <= tol_x)
        });
        let f_ok = self.fvals[1..]
            .iter()
            .all(|&f| (f - f_best).abs() <= tol_f);
        x_ok && f_ok
    }
}

/// Build the start simplex around `x0`: vertex 0 is `x0` itself, vertex i
/// perturbs coordinate i-1 by the relative `scale` (or by an absolute
/// `scale * 0.00025` when that coordinate is zero, where a relative bump
/// would be a no-op). Objective values are left unevaluated.
pub fn initial_simplex(x0: &[f64], scale: f64) -> SimplexState {
    let n = x0.len();
    let mut vertices = Vec::with_capacity(n + 1);
    vertices.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] = if v[i] == 0.0 {
            scale * 0.00025
        } else {
            v[i] * (1.0 + scale)
        };
        vertices.push(v);
    }
    SimplexState {
        vertices,
        fvals: vec![f64::NAN; n + 1],
        n,
    }
}

/// Why the search stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExitReason {
    /// Both tolerance tests passed.
    Converged,
    /// Iteration cap reached first.
    MaxIterations,
    /// Per-search wall-clock budget reached first.
    TimeBudget,
    /// The search could not run; the payload says why.
    Failed(String),
}

impl std::fmt::Display for ExitReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExitReason::Converged => write!(f, "converged"),
            ExitReason::MaxIterations => write!(f, "max_iterations"),
            ExitReason::TimeBudget => write!(f, "time_budget"),
            ExitReason::Failed(msg) => write!(f, "failed: {msg}"),
        }
    }
}

/// Outcome of one simplex search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub x_best: Vec<f64>,
    pub f_best: f64,
    pub iterations: usize,
    pub exit_reason: ExitReason,
}

/// Minimize `f` from `x0`. An objective returning NaN is treated as worst
/// possible, so infeasible evaluations lose every comparison instead of
/// poisoning them. The tolerance test runs at the top of each iteration;
/// the iteration cap defaults to `200 * n` when the config leaves it unset.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    config: &EstimationConfig,
) -> SearchOutcome {
    let n = x0.len();
    let max_iters = config.max_iterations.unwrap_or(200 * n.max(1));
    let started = Instant::now();

    let mut eval = |x: &[f64]| -> f64 {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    if n == 0 {
        return SearchOutcome {
            x_best: Vec::new(),
            f_best: eval(&[]),
            iterations: 0,
            exit_reason: ExitReason::Converged,
        };
    }

    let mut s = initial_simplex(x0, config.simplex_init_scale);
    for i in 0..=n {
        s.fvals[i] = eval(&s.vertices[i]);
    }
    s.sort();

    let mut iterations = 0;
    let exit_reason = loop {
        if s.converged(config.tol_x, config.tol_f) {
            break ExitReason::Converged;
        }
        if iterations >= max_iters {
            break ExitReason::MaxIterations;
        }
        if started.elapsed() >= config.time_budget {
            break ExitReason::TimeBudget;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for v in &s.vertices[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }
        let worst = s.vertices[n].clone();
        let f_worst = s.fvals[n];
        let f_second_worst = s.fvals[n - 1];

        let point = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = point(RHO);
        let fr = eval(&xr);

        let mut shrink = false;
        if fr < s.fvals[0] {
            // Try expanding past the reflection, keep whichever is better.
            let xe = point(RHO * CHI);
            let fe = eval(&xe);
            if fe < fr {
                s.vertices[n] = xe;
                s.fvals[n] = fe;
            } else {
                s.vertices[n] = xr;
                s.fvals[n] = fr;
            }
        } else if fr < f_second_worst {
            s.vertices[n] = xr;
            s.fvals[n] = fr;
        } else if fr < f_worst {
            // Outside contraction, between reflection and centroid.
            let xc = point(PSI * RHO);
            let fc = eval(&xc);
            if fc <= fr {
                s.vertices[n] = xc;
                s.fvals[n] = fc;
            } else {
                shrink = true;
            }
        } else {
            // Inside contraction, between centroid and worst.
            let xcc = point(-PSI);
            let fcc = eval(&xcc);
            if fcc < f_worst {
                s.vertices[n] = xcc;
                s.fvals[n] = fcc;
            } else {
                shrink = true;
            }
        }

        if shrink {
            let best = s.vertices[0].clone();
            for i in 1..=n {
                for (x, b) in s.vertices[i].iter_mut().zip(&best) {
                    *x = b + SIGMA * (*x - b);
                }
                s.fvals[i] = eval(&s.vertices[i]);
            }
        }

        s.sort();
        iterations += 1;
    };

    SearchOutcome {
        x_best: s.vertices[0].clone(),
        f_best: s.fvals[0],
        iterations,
        exit_reason,
    }
}
