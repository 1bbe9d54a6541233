//! Derivative-free one-dimensional minimisation.

use rayon::prelude::*;

/// 1/φ
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search on [lo, hi] until the bracket is narrower than
/// `tol`. The returned point is the best one evaluated, bracket ends
/// included.
pub fn golden_section<F>(f: F, lo: f64, hi: f64, tol: f64) -> Minimum
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa = f(a);
    let fb = f(b);
    let mut best = if fa <= fb { (a, fa) } else { (b, fb) };
    let mut evaluations = 2;

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    evaluations += 2;

    while (b - a) > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
        for (x, v) in [(c, fc), (d, fd)] {
            if v < best.1 {
                best = (x, v);
            }
        }
    }
    Minimum {
        x: best.0,
        value: best.1,
        evaluations,
    }
}

/// Result of a grid scan followed by golden-section refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanMinimum {
    pub minimum: Minimum,
    /// Interval handed to the golden-section stage.
    pub bracket: (f64, f64),
    /// Objective at the bracket ends.
    pub bracket_values: (f64, f64),
    pub grid: Vec<(f64, f64)>,
}

/// Evaluate `f` on lo, lo+step, … (hi always included), then refine around
/// the best grid point with golden-section search to `tol`.
///
/// Grid points are evaluated in parallel; the result does not depend on
/// evaluation order.
pub fn scan_then_golden<F>(f: F, lo: f64, hi: f64, step: f64, tol: f64) -> ScanMinimum
where
    F: Fn(f64) -> f64 + Sync,
{
    let mut xs: Vec<f64> = Vec::new();
    let mut i = 0usize;
    loop {
        let x = lo + i as f64 * step;
        if x >= hi - 1e-9 * step {
            break;
        }
        xs.push(x);
        i += 1;
    }
    xs.push(hi);

    let grid: Vec<(f64, f64)> = xs.par_iter().map(|&x| (x, f(x))).collect();
    let best = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap_or(0);

    let left = best.saturating_sub(1);
    let right = (best + 1).min(grid.len() - 1);
    let bracket = (grid[left].0, grid[right].0);
    let bracket_values = (grid[left].1, grid[right].1);

    let mut minimum = if right > left {
        golden_section(&f, bracket.0, bracket.1, tol)
    } else {
        Minimum {
            x: grid[best].0,
            value: grid[best].1,
            evaluations: 0,
        }
    };
    if grid[best].1 < minimum.value {
        minimum.x = grid[best].0;
        minimum.value = grid[best].1;
    }
    minimum.evaluations += grid.len();
    ScanMinimum {
        minimum,
        bracket,
        bracket_values,
        grid,
    }
}
