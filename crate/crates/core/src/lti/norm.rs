use nalgebra::{DMatrix, SVD};

use super::system::C64;
use super::{Frequency, FrequencyGrid, LtiError, StateSpaceSystem};

const GOLDEN_ITERS: usize = 80;

fn singular_values(g: &DMatrix<C64>) -> Option<Vec<f64>> {
    SVD::try_new(g.clone(), false, false, f64::EPSILON, 10_000)
        .map(|svd| svd.singular_values.iter().copied().collect())
}

/// Largest singular value; 0 for empty matrices.
pub fn sigma_max(g: &DMatrix<C64>) -> f64 {
    if g.is_empty() {
        return 0.0;
    }
    if g.nrows() == 1 || g.ncols() == 1 {
        return g.norm();
    }
    match singular_values(g) {
        Some(s) => s.into_iter().fold(0.0, f64::max),
        // Frobenius norm bounds sigma_max from above.
        None => g.norm(),
    }
}

/// Smallest singular value of a square matrix; `+inf` for the empty matrix.
pub fn sigma_min(g: &DMatrix<C64>) -> f64 {
    if g.is_empty() {
        return f64::INFINITY;
    }
    if g.nrows() == 1 && g.ncols() == 1 {
        return g[(0, 0)].norm();
    }
    match singular_values(g) {
        Some(s) => s.into_iter().fold(f64::INFINITY, f64::min),
        None => 0.0,
    }
}

/// `max sigma_max(G(jw))` over the grid, refined by golden-section search in
/// log-frequency between the neighbours of the best grid point.
pub fn hinf_norm(sys: &StateSpaceSystem, grid: &FrequencyGrid) -> Result<f64, LtiError> {
    if !sys.is_stable() {
        return Err(LtiError::UnstableSystem);
    }
    let sigma = |w: Frequency| sys.response(w).map(|g| sigma_max(&g));
    let pts = grid.points();
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for (k, &w) in pts.iter().enumerate() {
        let s = sigma(w)?;
        if s > best {
            best = s;
            arg = k;
        }
    }
    if sys.states() == 0 {
        return Ok(best);
    }
    let w0 = match pts[arg] {
        Frequency::Finite(w) => w,
        Frequency::Infinity => return Ok(best),
    };
    let lo = match arg.checked_sub(1).map(|k| pts[k]) {
        Some(Frequency::Finite(w)) if w > 0.0 => w,
        _ => (w0 * 1e-3).max(1e-8),
    };
    let hi = match pts.get(arg + 1) {
        Some(Frequency::Finite(w)) => *w,
        _ => (w0 * 10.0).max(1e-2),
    };
    let f = |u: f64| sigma(Frequency::Finite(u.exp()));
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..GOLDEN_ITERS {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        }
        best = best.max(f1).max(f2);
        if b - a < 1e-12 {
            break;
        }
    }
    Ok(best)
}

/// [`hinf_norm`] on [`FrequencyGrid::default_norm_sweep`].
pub fn hinf_norm_default(sys: &StateSpaceSystem) -> Result<f64, LtiError> {
    hinf_norm(sys, &FrequencyGrid::default_norm_sweep())
}
