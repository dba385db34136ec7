use nalgebra::{Cholesky, DMatrix, DVector};

use super::newton::HessianPlan;
use super::{
    FillStats, IterationLog, SdpError, SolveResult, SolveStatus, SolverOptions, SolverPath,
};
use crate::lmi::SdpFeasibilityProblem;
use crate::sparse::{
    cholesky_on_pattern, min_degree_order, symbolic_factor, CholeskyFactor, SparsityPattern,
    SymSparse, SymbolicFactor,
};

/// Factorization of the slack matrix given by its values on the aggregate
/// pattern.
trait SlackFactorizer {
    type Factor;
    fn factor(&self, values: &[f64]) -> Option<Self::Factor>;
    fn log_det(&self, f: &Self::Factor) -> f64;
    fn inverse(&self, f: &Self::Factor) -> DMatrix<f64>;
}

struct DenseSlack<'a> {
    pattern: &'a SparsityPattern,
}

impl SlackFactorizer for DenseSlack<'_> {
    type Factor = Cholesky<f64, nalgebra::Dyn>;

    fn factor(&self, values: &[f64]) -> Option<Self::Factor> {
        let n = self.pattern.order();
        let mut s = DMatrix::zeros(n, n);
        for ((r, c), &v) in self.pattern.entries().zip(values) {
            s[(r, c)] = v;
            s[(c, r)] = v;
        }
        Cholesky::new(s)
    }

    fn log_det(&self, f: &Self::Factor) -> f64 {
        2.0 * f.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    fn inverse(&self, f: &Self::Factor) -> DMatrix<f64> {
        f.inverse()
    }
}

struct SparseSlack<'a> {
    symbolic: &'a SymbolicFactor,
}

impl<'a> SlackFactorizer for SparseSlack<'a> {
    type Factor = CholeskyFactor<'a>;

    fn factor(&self, values: &[f64]) -> Option<Self::Factor> {
        cholesky_on_pattern(values, self.symbolic).ok()
    }

    fn log_det(&self, f: &Self::Factor) -> f64 {
        f.log_det()
    }

    fn inverse(&self, f: &Self::Factor) -> DMatrix<f64> {
        f.inverse()
    }
}

/// Largest margin `t` with `W - sum y_i Q_i - t I` positive semidefinite over
/// the variable box, by a primal barrier method.
///
/// Statuses other than `MarginFound` still report the last strictly feasible
/// iterate, whose `t` is a valid lower bound on the optimum.
pub fn solve_margin(
    problem: &SdpFeasibilityProblem,
    opts: &SolverOptions,
) -> Result<SolveResult, SdpError> {
    opts.validate()?;
    let n = problem.order();
    if n == 0 {
        return Err(SdpError::DimensionMismatch("problem of order 0".into()));
    }
    let pattern = problem.pattern();
    let path = match opts.path {
        SolverPath::Auto if pattern.density() < opts.auto_density_threshold => SolverPath::Sparse,
        SolverPath::Auto => SolverPath::Dense,
        p => p,
    };
    match path {
        SolverPath::Sparse => {
            let perm = min_degree_order(pattern);
            let symbolic = symbolic_factor(pattern, &perm)?;
            let fill = FillStats {
                order: n,
                input_nnz: pattern.nnz(),
                filled_nnz: symbolic.filled().nnz(),
                fill_count: symbolic.fill_count(),
                fill_ratio: symbolic.fill_ratio(),
            };
            let mut res = run(
                problem,
                opts,
                &SparseSlack {
                    symbolic: &symbolic,
                },
            )?;
            res.path = SolverPath::Sparse;
            res.fill = Some(fill);
            Ok(res)
        }
        _ => {
            let mut res = run(problem, opts, &DenseSlack { pattern })?;
            res.path = SolverPath::Dense;
            Ok(res)
        }
    }
}

/// Values of `mat` on `pattern`, as `(position, value)` pairs.
fn positions(pattern: &SparsityPattern, mat: &SymSparse) -> Vec<(usize, f64)> {
    mat.entries()
        .iter()
        .map(|&(r, c, v)| {
            (
                pattern
                    .position(r, c)
                    .expect("matrix lies on the aggregate pattern"),
                v,
            )
        })
        .collect()
}

struct Layout {
    w: Vec<f64>,
    q: Vec<Vec<(usize, f64)>>,
    diag: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Layout {
    fn slack(&self, y: &[f64], t: f64) -> Vec<f64> {
        let mut s = self.w.clone();
        for (yi, qi) in y.iter().zip(&self.q) {
            for &(p, v) in qi {
                s[p] -= yi * v;
            }
        }
        for &p in &self.diag {
            s[p] -= t;
        }
        s
    }

    /// `sum log(y - l) + log(u - y)` over finite bounds.
    fn bound_logs(&self, y: &[f64]) -> f64 {
        y.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| {
                let a = if l.is_finite() { (v - l).ln() } else { 0.0 };
                let b = if u.is_finite() { (u - v).ln() } else { 0.0 };
                a + b
            })
            .sum()
    }

    fn bound_count(&self) -> usize {
        self.lower.iter().filter(|l| l.is_finite()).count()
            + self.upper.iter().filter(|u| u.is_finite()).count()
    }

    /// Largest `a` keeping `y + a dy` strictly inside the box.
    fn max_step(&self, y: &[f64], dy: &[f64]) -> f64 {
        let mut a = f64::INFINITY;
        for i in 0..y.len() {
            if dy[i] < 0.0 && self.lower[i].is_finite() {
                a = a.min((self.lower[i] - y[i]) / dy[i]);
            }
            if dy[i] > 0.0 && self.upper[i].is_finite() {
                a = a.min((self.upper[i] - y[i]) / dy[i]);
            }
        }
        a
    }
}

const CENTERED: f64 = 1e-8;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 50;

fn solve_spd(h: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(c) = Cholesky::new(h.clone()) {
        return Some(c.solve(rhs));
    }
    let scale = h.diagonal().amax().max(f64::MIN_POSITIVE);
    let mut jitter = 1e-14 * scale;
    while jitter <= 1e-6 * scale {
        let mut hj = h.clone();
        for i in 0..hj.nrows() {
            hj[(i, i)] += jitter;
        }
        if let Some(c) = Cholesky::new(hj) {
            return Some(c.solve(rhs));
        }
        jitter *= 100.0;
    }
    h.clone().lu().solve(rhs)
}

/// Whether `-sum d_i Q_i - d_t I` is positive semidefinite, so that the
/// slack stays definite along the whole ray.
fn is_recession(pattern: &SparsityPattern, layout: &Layout, dir: &DVector<f64>) -> bool {
    let n = pattern.order();
    let m = layout.q.len();
    let mut vals = vec![0.0; pattern.nnz()];
    for (di, qi) in dir.iter().zip(&layout.q) {
        for &(p, v) in qi {
            vals[p] -= di * v;
        }
    }
    for &p in &layout.diag {
        vals[p] -= dir[m];
    }
    let mut d = DMatrix::zeros(n, n);
    for ((r, c), &v) in pattern.entries().zip(&vals) {
        d[(r, c)] = v;
        d[(c, r)] = v;
    }
    let scale = d.amax().max(f64::MIN_POSITIVE);
    d.symmetric_eigenvalues().min() >= -1e-12 * scale
}

fn run<F: SlackFactorizer>(
    problem: &SdpFeasibilityProblem,
    opts: &SolverOptions,
    fz: &F,
) -> Result<SolveResult, SdpError> {
    let n = problem.order();
    let m = problem.m();
    let pattern = problem.pattern();
    let layout = Layout {
        w: {
            let mut w = vec![0.0; pattern.nnz()];
            for (p, v) in positions(pattern, problem.w()) {
                w[p] = v;
            }
            w
        },
        q: problem.q().iter().map(|q| positions(pattern, q)).collect(),
        diag: (0..n)
            .map(|i| pattern.position(i, i).expect("diagonal is on the pattern"))
            .collect(),
        lower: problem
            .bounds()
            .iter()
            .map(|b| b.map_or(f64::NEG_INFINITY, |b| b.lower))
            .collect(),
        upper: problem
            .bounds()
            .iter()
            .map(|b| b.map_or(f64::INFINITY, |b| b.upper))
            .collect(),
    };
    let mut mats: Vec<SymSparse> = problem.q().to_vec();
    mats.push(SymSparse::identity(n));
    let plan = HessianPlan::new(n, &mats)?;

    let nu = (n + layout.bound_count()) as f64;
    let mut y: Vec<f64> = (0..m)
        .map(
            |i| match (layout.lower[i].is_finite(), layout.upper[i].is_finite()) {
                (true, true) => 0.5 * (layout.lower[i] + layout.upper[i]),
                (true, false) => layout.lower[i] + 1.0,
                (false, true) => layout.upper[i] - 1.0,
                (false, false) => 0.0,
            },
        )
        .collect();
    let s0 = layout.slack(&y, 0.0);
    let s0_max = s0.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let mut t = -(1.0 + s0_max) * n as f64 * opts.initial_scale;
    let w_scale = 1.0 + problem.w().max_abs();

    let mut s = layout.slack(&y, t);
    let mut factor = fz.factor(&s).ok_or_else(|| {
        SdpError::DimensionMismatch("initial slack is not positive definite".into())
    })?;
    let mut log_det = fz.log_det(&factor);
    let mut bound_logs = layout.bound_logs(&y);
    let mut kappa = nu / t.abs();

    let mut log = Vec::new();
    let mut iterations = 0;
    let mut decrement = 0.0;
    let status = 'outer: loop {
        // Center for the current kappa.
        loop {
            if iterations >= opts.max_iterations {
                break 'outer SolveStatus::IterationLimit;
            }
            let z = fz.inverse(&factor);
            let ns = plan.assemble(&z);
            let mut h = ns.h;
            let mut g = ns.r;
            g[m] -= kappa;
            for i in 0..m {
                if layout.lower[i].is_finite() {
                    let d = y[i] - layout.lower[i];
                    g[i] -= 1.0 / d;
                    h[(i, i)] += 1.0 / (d * d);
                }
                if layout.upper[i].is_finite() {
                    let d = layout.upper[i] - y[i];
                    g[i] += 1.0 / d;
                    h[(i, i)] += 1.0 / (d * d);
                }
            }
            let Some(dir) = solve_spd(&h, &(-&g)) else {
                break 'outer SolveStatus::NumericalFailure;
            };
            let lambda2 = -g.dot(&dir);
            if !lambda2.is_finite() {
                break 'outer SolveStatus::NumericalFailure;
            }
            decrement = lambda2.max(0.0).sqrt();
            if lambda2 <= CENTERED {
                break;
            }
            iterations += 1;

            let box_step = layout.max_step(&y, &dir.as_slice()[..m]);
            if box_step.is_infinite() && dir[m] > 0.0 && is_recession(pattern, &layout, &dir) {
                break 'outer SolveStatus::Unbounded;
            }
            let mut alpha = 1.0_f64.min(0.98 * box_step);
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let y_new: Vec<f64> = (0..m).map(|i| y[i] + alpha * dir[i]).collect();
                let t_new = t + alpha * dir[m];
                let s_new = layout.slack(&y_new, t_new);
                if let Some(f_new) = fz.factor(&s_new) {
                    let ld_new = fz.log_det(&f_new);
                    let bl_new = layout.bound_logs(&y_new);
                    // Barrier change as a sum of differences; the absolute
                    // values are dominated by kappa t at large kappa.
                    let dphi = -kappa * alpha * dir[m] - (ld_new - log_det) - (bl_new - bound_logs);
                    if decrement < 0.2 || dphi <= -ARMIJO * alpha * lambda2 {
                        accepted = Some((y_new, t_new, s_new, f_new, ld_new, bl_new, dphi));
                        break;
                    }
                }
                alpha *= 0.5;
            }
            let Some((y_new, t_new, s_new, f_new, ld_new, bl_new, dphi)) = accepted else {
                if lambda2 < 1e-10 * nu.max(1.0) {
                    break;
                }
                break 'outer SolveStatus::NumericalFailure;
            };
            y = y_new;
            t = t_new;
            s = s_new;
            factor = f_new;
            log_det = ld_new;
            bound_logs = bl_new;
            log.push(IterationLog {
                kappa,
                barrier: dphi,
                decrement,
                step: alpha,
                t,
            });
            if t > 1e12 * w_scale {
                break 'outer SolveStatus::Unbounded;
            }
        }
        if nu / kappa <= opts.gap_tolerance * t.abs().max(1.0) {
            break SolveStatus::MarginFound;
        }
        kappa *= opts.barrier_growth;
    };
    debug_assert_eq!(s.len(), pattern.nnz());
    Ok(SolveResult {
        status,
        t,
        y,
        iterations,
        gap: nu / kappa,
        kkt_residual: decrement / kappa,
        path: SolverPath::Auto,
        fill: None,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lmi::VariableBounds;

    fn solve(p: &SdpFeasibilityProblem, path: SolverPath) -> SolveResult {
        solve_margin(p, &SolverOptions::default().with_path(path)).unwrap()
    }

    #[test]
    fn constant_problem() {
        let p = SdpFeasibilityProblem::new(SymSparse::identity(2).scaled(-1.0), vec![]).unwrap();
        for path in [SolverPath::Dense, SolverPath::Sparse] {
            let r = solve(&p, path);
            assert_eq!(r.status, SolveStatus::MarginFound);
            assert!((r.t + 1.0).abs() < 1e-7, "{}", r.t);
        }
    }

    #[test]
    fn indefinite_coefficient_gives_zero_margin() {
        let q = SymSparse::from_triplets(2, [(0, 0, 1.0), (1, 1, -1.0)]).unwrap();
        let p = SdpFeasibilityProblem::new(SymSparse::zeros(2), vec![q])
            .unwrap()
            .with_bounds(vec![Some(VariableBounds {
                lower: -1.0,
                upper: 1.0,
            })])
            .unwrap();
        let r = solve(&p, SolverPath::Dense);
        assert_eq!(r.status, SolveStatus::MarginFound);
        assert!(r.t.abs() < 1e-7 && r.y[0].abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn box_limits_the_margin() {
        // W - y Q - t I with Q = -I, y in [0, 1]: t* = 1 + W.
        let p = SdpFeasibilityProblem::new(
            SymSparse::identity(3).scaled(0.5),
            vec![SymSparse::identity(3).scaled(-1.0)],
        )
        .unwrap()
        .with_bounds(vec![Some(VariableBounds::UNIT)])
        .unwrap();
        let r = solve(&p, SolverPath::Sparse);
        assert_eq!(r.status, SolveStatus::MarginFound);
        assert!((r.t - 1.5).abs() < 1e-7, "{}", r.t);
        assert!(r.fill.is_some());
    }

    #[test]
    fn unbounded_without_box() {
        let p = SdpFeasibilityProblem::new(
            SymSparse::zeros(2),
            vec![SymSparse::identity(2).scaled(-1.0)],
        )
        .unwrap();
        let r = solve(&p, SolverPath::Dense);
        assert_eq!(r.status, SolveStatus::Unbounded);
    }

    #[test]
    fn rejects_bad_options() {
        let p = SdpFeasibilityProblem::new(SymSparse::identity(1), vec![]).unwrap();
        let opts = SolverOptions {
            barrier_growth: 1.0,
            ..SolverOptions::default()
        };
        assert!(matches!(
            solve_margin(&p, &opts),
            Err(SdpError::InvalidOptions(_))
        ));
    }

    #[test]
    fn iteration_limit_keeps_a_feasible_iterate() {
        let q = SymSparse::from_triplets(2, [(0, 0, 1.0), (1, 1, -1.0)]).unwrap();
        let p = SdpFeasibilityProblem::new(SymSparse::zeros(2), vec![q]).unwrap();
        let opts = SolverOptions {
            max_iterations: 2,
            ..SolverOptions::default()
        };
        let r = solve_margin(&p, &opts).unwrap();
        assert_eq!(r.status, SolveStatus::IterationLimit);
        assert_eq!(r.iterations, 2);
        assert!(p.slack(&r.y).symmetric_eigenvalues().min() - r.t > 0.0);
    }
}
