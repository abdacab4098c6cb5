//! Bounded derivative-free simplex search (Nelder-Mead with box
//! projection), three-dimensional, used by the maximum-likelihood fit.

use alloc::vec::Vec;

pub const DIM: usize = 3;

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Convergence tolerance on the objective spread across the simplex.
    pub tol: f64,
    pub max_iters: u32,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexResult {
    pub x: [f64; DIM],
    pub value: f64,
    pub converged: bool,
    pub iterations: u32,
}

fn clamp(x: [f64; DIM], lower: [f64; DIM], upper: [f64; DIM]) -> [f64; DIM] {
    let mut out = x;
    for i in 0..DIM {
        out[i] = out[i].max(lower[i]).min(upper[i]);
    }
    out
}

/// Minimize `f` over the box `[lower, upper]` starting from `start`.
/// Candidate points are projected onto the box, so the search never
/// evaluates outside it.
pub fn nelder_mead_bounded<F: FnMut(&[f64; DIM]) -> f64>(
    mut f: F,
    start: [f64; DIM],
    lower: [f64; DIM],
    upper: [f64; DIM],
    opts: SimplexOptions,
) -> SimplexResult {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let start = clamp(start, lower, upper);
    let mut simplex: Vec<([f64; DIM], f64)> = Vec::with_capacity(DIM + 1);
    simplex.push((start, f(&start)));
    for i in 0..DIM {
        let mut v = start;
        let step = 0.10 * (upper[i] - lower[i]);
        // step away from the nearer bound
        v[i] = if v[i] + step <= upper[i] {
            v[i] + step
        } else {
            v[i] - step
        };
        let v = clamp(v, lower, upper);
        simplex.push((v, f(&v)));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[DIM].1;
        if (worst - best).abs() <= opts.tol {
            converged = true;
            break;
        }

        // centroid of all but the worst vertex
        let mut centroid = [0.0; DIM];
        for (v, _) in simplex.iter().take(DIM) {
            for i in 0..DIM {
                centroid[i] += v[i] / DIM as f64;
            }
        }

        let worst_x = simplex[DIM].0;
        let mut reflected = [0.0; DIM];
        for i in 0..DIM {
            reflected[i] = centroid[i] + ALPHA * (centroid[i] - worst_x[i]);
        }
        let reflected = clamp(reflected, lower, upper);
        let fr = f(&reflected);

        if fr < simplex[0].1 {
            let mut expanded = [0.0; DIM];
            for i in 0..DIM {
                expanded[i] = centroid[i] + GAMMA * (reflected[i] - centroid[i]);
            }
            let expanded = clamp(expanded, lower, upper);
            let fe = f(&expanded);
            simplex[DIM] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[DIM - 1].1 {
            simplex[DIM] = (reflected, fr);
            continue;
        }

        let mut contracted = [0.0; DIM];
        for i in 0..DIM {
            contracted[i] = centroid[i] + RHO * (worst_x[i] - centroid[i]);
        }
        let contracted = clamp(contracted, lower, upper);
        let fc = f(&contracted);
        if fc < simplex[DIM].1 {
            simplex[DIM] = (contracted, fc);
            continue;
        }

        // shrink toward the best vertex
        let best_x = simplex[0].0;
        for entry in simplex.iter_mut().skip(1) {
            let mut v = [0.0; DIM];
            for i in 0..DIM {
                v[i] = best_x[i] + SIGMA * (entry.0[i] - best_x[i]);
            }
            let v = clamp(v, lower, upper);
            *entry = (v, f(&v));
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    SimplexResult {
        x: simplex[0].0,
        value: simplex[0].1,
        converged,
        iterations,
    }
}
