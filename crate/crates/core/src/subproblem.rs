//! Trust-region subproblems over `{w ∈ [0,1]ⁿ : ‖w − w̄‖²_D ≤ Δ}` where
//! `‖·‖_D` is the lumped-mass weighted L² norm.
//!
//! The convex model linearizes the double-well term at `w̄`:
//!
//! ```text
//! q_c(w) = (g + (γ/ε)(1 − 2w̄), w − w̄)_D + (γε/2)(wᵀK₁w − w̄ᵀK₁w̄)
//! ```
//!
//! while the nonconvex model keeps the full Ginzburg–Landau energy,
//! `q_n(w) = (g, w − w̄)_D + γ(E_ε(w) − E_ε(w̄))`. Since the double well is
//! concave, `q_n ≤ q_c` everywhere. `w̄` is feasible with value zero, so both
//! minimal values are non-positive.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::field::ControlField;
use crate::math;
use crate::objective::GLParams;
use crate::sparse::SparseMatrix;

/// Lumped weights and unit stiffness of the control space, plus an upper
/// estimate of the largest eigenvalue of `D⁻¹K₁`.
#[derive(Debug, Clone)]
pub struct TrustRegionMetric<'a> {
    pub lumped: &'a [f64],
    pub laplacian: &'a SparseMatrix,
    pub lambda_max: f64,
}

impl<'a> TrustRegionMetric<'a> {
    pub fn new(lumped: &'a [f64], laplacian: &'a SparseMatrix) -> Result<Self> {
        check_len(laplacian.n_rows, lumped.len())?;
        if lumped.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::InvalidParameter("lumped weights must be positive"));
        }
        Ok(TrustRegionMetric {
            lumped,
            laplacian,
            lambda_max: spectral_bound(lumped, laplacian),
        })
    }

    pub fn n(&self) -> usize {
        self.lumped.len()
    }

    fn norm_sq(&self, a: &[f64], b: &[f64]) -> f64 {
        self.lumped
            .iter()
            .zip(a)
            .zip(b)
            .map(|((d, x), y)| d * (x - y) * (x - y))
            .sum()
    }
}

/// Power iteration on `D^{-1/2} K D^{-1/2}` with a 10% margin, capped by the
/// Gershgorin bound of `D⁻¹K`.
fn spectral_bound(lumped: &[f64], k: &SparseMatrix) -> f64 {
    let n = lumped.len();
    let gershgorin = (0..n)
        .map(|r| k.row(r).map(|(_, v)| v.abs()).sum::<f64>() / lumped[r])
        .fold(0.0, f64::max);
    if n == 0 || gershgorin == 0.0 {
        return 0.0;
    }
    let inv_sqrt: Vec<f64> = lumped.iter().map(|d| 1.0 / math::sqrt(*d)).collect();
    let mut v: Vec<f64> = (0..n)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } * (1.0 + (i % 7) as f64 * 0.1))
        .collect();
    let mut scratch = vec![0.0; n];
    let mut rayleigh = 0.0;
    for _ in 0..200 {
        let nv = math::norm2(&v);
        if nv == 0.0 {
            break;
        }
        for x in v.iter_mut() {
            *x /= nv;
        }
        for i in 0..n {
            scratch[i] = v[i] * inv_sqrt[i];
        }
        let mut kv = k.mul_vec(&scratch);
        for i in 0..n {
            kv[i] *= inv_sqrt[i];
        }
        rayleigh = math::dot(&v, &kv);
        v = kv;
    }
    (1.1 * rayleigh).min(gershgorin).max(rayleigh)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Convex,
    Nonconvex,
}

#[derive(Debug, Clone)]
pub struct SubproblemSpec<'a> {
    pub metric: &'a TrustRegionMetric<'a>,
    /// Linearization point (feasible).
    pub w_bar: &'a [f64],
    /// Lumped Riesz representative of the reduced gradient at `w_bar`.
    pub g: &'a [f64],
    /// Bound on `‖w − w̄‖²_D`.
    pub delta: f64,
    pub gl: GLParams,
}

impl SubproblemSpec<'_> {
    pub fn validate(&self) -> Result<()> {
        let n = self.metric.n();
        check_len(n, self.w_bar.len())?;
        check_len(n, self.g.len())?;
        if !(self.delta > 0.0) {
            return Err(Error::InvalidParameter("trust-region radius must be positive"));
        }
        self.gl.validate()?;
        if let Some(index) = self.w_bar.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Infeasible {
                index,
                value: self.w_bar[index],
            });
        }
        if self.g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("subproblem gradient"));
        }
        Ok(())
    }

    /// Linear coefficient of the convex model, `g + (γ/ε)(1 − 2w̄)`.
    fn convex_linear_term(&self) -> Vec<f64> {
        let c = self.gl.gamma / self.gl.epsilon;
        self.g
            .iter()
            .zip(self.w_bar)
            .map(|(gi, wi)| gi + c * (1.0 - 2.0 * wi))
            .collect()
    }

    pub fn convex_objective(&self, w: &[f64]) -> f64 {
        let lin = self.convex_linear_term();
        let k = self.metric.laplacian;
        let linear: f64 = self
            .metric
            .lumped
            .iter()
            .zip(&lin)
            .zip(w.iter().zip(self.w_bar))
            .map(|((d, l), (x, xb))| d * l * (x - xb))
            .sum();
        linear + 0.5 * self.gl.gamma * self.gl.epsilon * (k.bilinear(w, w) - k.bilinear(self.w_bar, self.w_bar))
    }

    pub fn nonconvex_objective(&self, w: &[f64]) -> f64 {
        let (gamma, eps) = (self.gl.gamma, self.gl.epsilon);
        let k = self.metric.laplacian;
        let mut linear = 0.0;
        let mut well = 0.0;
        for (((d, gi), x), xb) in self.metric.lumped.iter().zip(self.g).zip(w).zip(self.w_bar) {
            linear += d * gi * (x - xb);
            well += d * (x * (1.0 - x) - xb * (1.0 - xb));
        }
        linear + gamma * (0.5 * eps * (k.bilinear(w, w) - k.bilinear(self.w_bar, self.w_bar)) + well / eps)
    }

    pub fn objective(&self, variant: Variant, w: &[f64]) -> f64 {
        match variant {
            Variant::Convex => self.convex_objective(w),
            Variant::Nonconvex => self.nonconvex_objective(w),
        }
    }

    pub fn project(&self, candidate: &[f64]) -> Result<ControlField> {
        project_box_ball(candidate, self.w_bar, self.delta, self.metric.lumped)
    }

    /// Relative feasibility violation of `w`, zero when feasible.
    pub fn infeasibility(&self, w: &[f64]) -> f64 {
        let ball = (self.metric.norm_sq(w, self.w_bar) / self.delta - 1.0).max(0.0);
        let bx = w.iter().map(|&v| (-v).max(v - 1.0).max(0.0)).fold(0.0, f64::max);
        ball.max(bx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemResult {
    pub w_star: ControlField,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SubproblemResult {
    fn at_center(spec: &SubproblemSpec<'_>, iterations: usize, converged: bool) -> Self {
        SubproblemResult {
            w_star: ControlField::new(spec.w_bar.to_vec()),
            objective_value: 0.0,
            iterations,
            converged,
        }
    }
}

const MAX_BISECTION: usize = 200;

/// Weighted-L² projection onto `{w ∈ [0,1]ⁿ : Σ d_i (w_i − w̄_i)² ≤ Δ}`.
///
/// For a ball multiplier `λ ≥ 0` the minimizer of
/// `Σ d_i (w_i − c_i)² + λ Σ d_i (w_i − w̄_i)²` over the box is the clip of
/// `(c_i + λ w̄_i) / (1 + λ)`; `λ` is found by bisection on the ball
/// constraint. The returned point is always on the feasible side.
pub fn project_box_ball(candidate: &[f64], w_bar: &[f64], delta: f64, weights: &[f64]) -> Result<ControlField> {
    let n = weights.len();
    check_len(n, candidate.len())?;
    check_len(n, w_bar.len())?;
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter("trust-region radius must be non-negative"));
    }
    if candidate.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("projection candidate"));
    }
    let at = |lambda: f64, out: &mut [f64]| -> f64 {
        let mut dist = 0.0;
        for i in 0..n {
            let v = ((candidate[i] + lambda * w_bar[i]) / (1.0 + lambda)).clamp(0.0, 1.0);
            out[i] = v;
            dist += weights[i] * (v - w_bar[i]) * (v - w_bar[i]);
        }
        dist
    };

    let mut out = vec![0.0; n];
    if at(0.0, &mut out) <= delta {
        return Ok(ControlField::new(out));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut steps = 0;
    while at(hi, &mut out) > delta {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > MAX_BISECTION {
            return Err(Error::ProjectionFailed);
        }
    }
    for _ in 0..MAX_BISECTION {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(mid, &mut out) > delta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let dist = at(hi, &mut out);
    if dist > delta {
        return Err(Error::ProjectionFailed);
    }
    Ok(ControlField::new(out))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexOptions {
    /// Stop when the gradient mapping falls below `tol` relative to the
    /// model gradient at `w̄`, or when the relative objective change falls
    /// below `tol²`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ConvexOptions {
    fn default() -> Self {
        ConvexOptions {
            tol: 1e-8,
            max_iter: 20_000,
        }
    }
}

/// Accelerated projected gradient (FISTA with objective restarts) on the
/// convex model.
pub fn solve_convex(spec: &SubproblemSpec<'_>, opts: &ConvexOptions) -> Result<SubproblemResult> {
    solve_convex_monitored(spec, opts, |_, _, _| {})
}

/// [`solve_convex`] calling `monitor(iteration, objective, gradient_mapping)`
/// once per iteration.
pub fn solve_convex_monitored(
    spec: &SubproblemSpec<'_>,
    opts: &ConvexOptions,
    mut monitor: impl FnMut(usize, f64, f64),
) -> Result<SubproblemResult> {
    spec.validate()?;
    let metric = spec.metric;
    let d = metric.lumped;
    let n = metric.n();
    let k = metric.laplacian;
    let lin = spec.convex_linear_term();
    let quad = spec.gl.gamma * spec.gl.epsilon;
    let wbar_energy = k.bilinear(spec.w_bar, spec.w_bar);

    // q(w) and its D-gradient share K w.
    let mut kw = vec![0.0; n];
    let mut eval = |w: &[f64], grad: Option<&mut [f64]>| -> f64 {
        k.mul_vec_into(w, &mut kw);
        let mut q = 0.0;
        let mut e = 0.0;
        for i in 0..n {
            q += d[i] * lin[i] * (w[i] - spec.w_bar[i]);
            e += w[i] * kw[i];
        }
        if let Some(grad) = grad {
            for i in 0..n {
                grad[i] = lin[i] + quad * kw[i] / d[i];
            }
        }
        q + 0.5 * quad * (e - wbar_energy)
    };

    let mut grad = vec![0.0; n];
    let mut fx = eval(spec.w_bar, Some(&mut grad));
    let scale = math::sqrt(math::weighted_dot(d, &grad, &grad));
    if scale == 0.0 {
        return Ok(SubproblemResult::at_center(spec, 0, true));
    }
    let mut lipschitz = quad * metric.lambda_max + 1e-12 * scale / math::sqrt(spec.delta);

    let mut x: Vec<f64> = spec.w_bar.to_vec();
    let mut x_prev = x.clone();
    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut trial = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=opts.max_iter {
        iterations = it;
        eval(&y, Some(&mut grad));
        for i in 0..n {
            trial[i] = y[i] - grad[i] / lipschitz;
        }
        let mut z = project_box_ball(&trial, spec.w_bar, spec.delta, d)?.into_inner();
        let mut fz = eval(&z, None);
        let mut gap = lipschitz * math::sqrt(metric.norm_sq(&z, &y));
        let mut restarted = false;
        if fz > fx {
            // Restart from x with a plain projected-gradient step; enlarge the
            // Lipschitz estimate until it decreases.
            restarted = true;
            t = 1.0;
            y.copy_from_slice(&x);
            eval(&x, Some(&mut grad));
            loop {
                for i in 0..n {
                    trial[i] = x[i] - grad[i] / lipschitz;
                }
                z = project_box_ball(&trial, spec.w_bar, spec.delta, d)?.into_inner();
                fz = eval(&z, None);
                let moved = metric.norm_sq(&z, &x);
                let model = fx
                    + math::weighted_dot(d, &grad, &z.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>())
                    + 0.5 * lipschitz * moved;
                if fz <= model + 1e-15 * fx.abs().max(1e-300) || moved == 0.0 {
                    break;
                }
                lipschitz *= 2.0;
            }
            gap = lipschitz * math::sqrt(metric.norm_sq(&z, &x));
            if fz >= fx {
                // A projected-gradient step from x no longer descends.
                monitor(it, fx, gap / scale);
                converged = true;
                break;
            }
        }
        let change = (fx - fz).abs();
        monitor(it, fz.min(fx), gap / scale);
        x_prev.copy_from_slice(&x);
        if fz <= fx {
            x.copy_from_slice(&z);
            fx = fz;
        }
        if gap <= opts.tol * scale || (!restarted && change <= opts.tol * opts.tol * fx.abs()) {
            converged = true;
            break;
        }
        let t_next = 0.5 * (1.0 + math::sqrt(1.0 + 4.0 * t * t));
        let beta = (t - 1.0) / t_next;
        for i in 0..n {
            y[i] = x[i] + beta * (x[i] - x_prev[i]);
        }
        t = t_next;
    }

    if !(fx <= 0.0) {
        return Ok(SubproblemResult::at_center(spec, iterations, converged));
    }
    Ok(SubproblemResult {
        w_star: ControlField::new(x),
        objective_value: fx,
        iterations,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonconvexOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Number of descents; at least two (`w̄` and the convex solution) are
    /// always run, then the binarized `w̄`, then the binary point with
    /// `w_i = 1` where `g_i < 0`, then random feasible points.
    pub n_starts: usize,
    pub seed: u64,
    pub convex: ConvexOptions,
}

impl Default for NonconvexOptions {
    fn default() -> Self {
        NonconvexOptions {
            tol: 1e-8,
            max_iter: 5_000,
            n_starts: 4,
            seed: 0,
            convex: ConvexOptions::default(),
        }
    }
}

/// Multi-start projected gradient with step halving on the nonconvex model.
/// A heuristic: the result is a local minimizer no worse than `w̄` or the
/// convex model's solution, not a certified global one.
pub fn solve_nonconvex(spec: &SubproblemSpec<'_>, opts: &NonconvexOptions) -> Result<SubproblemResult> {
    spec.validate()?;
    let n = spec.metric.n();
    let convex = solve_convex(spec, &opts.convex)?;

    let mut starts: Vec<Vec<f64>> = vec![spec.w_bar.to_vec(), convex.w_star.into_inner()];
    if opts.n_starts > 2 {
        let binary: Vec<f64> = spec.w_bar.iter().map(|&v| if v > 0.5 { 1.0 } else { 0.0 }).collect();
        starts.push(spec.project(&binary)?.into_inner());
    }
    if opts.n_starts > 3 {
        // Binary minimizer of the model without the gradient-energy coupling.
        let descent: Vec<f64> = spec.g.iter().map(|&g| if g < 0.0 { 1.0 } else { 0.0 }).collect();
        starts.push(spec.project(&descent)?.into_inner());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < opts.n_starts {
        let draw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        starts.push(spec.project(&draw)?.into_inner());
    }

    let mut best: Option<SubproblemResult> = None;
    let mut iterations = convex.iterations;
    for start in starts {
        let r = descend_nonconvex(spec, start, opts)?;
        iterations += r.iterations;
        let better = match &best {
            None => true,
            Some(b) => r.objective_value < b.objective_value,
        };
        if better {
            best = Some(r);
        }
    }
    let mut best = best.expect("at least two starts");
    best.iterations = iterations;
    if !(best.objective_value <= 0.0) {
        return Ok(SubproblemResult::at_center(spec, iterations, best.converged));
    }
    Ok(best)
}

fn descend_nonconvex(spec: &SubproblemSpec<'_>, mut x: Vec<f64>, opts: &NonconvexOptions) -> Result<SubproblemResult> {
    let metric = spec.metric;
    let d = metric.lumped;
    let n = metric.n();
    let (gamma, eps) = (spec.gl.gamma, spec.gl.epsilon);
    let lipschitz = gamma * (eps * metric.lambda_max + 2.0 / eps);
    let max_step = 1e6 / lipschitz;
    let mut step = 1.0 / lipschitz;

    let gradient = |w: &[f64], out: &mut [f64]| {
        let kw = metric.laplacian.mul_vec(w);
        for i in 0..n {
            out[i] = spec.g[i] + gamma * (eps * kw[i] / d[i] + (1.0 - 2.0 * w[i]) / eps);
        }
    };

    let mut fx = spec.nonconvex_objective(&x);
    let mut grad = vec![0.0; n];
    gradient(&x, &mut grad);
    let scale = math::sqrt(math::weighted_dot(d, &grad, &grad)).max(f64::MIN_POSITIVE);
    let mut trial = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;

    'outer: for it in 1..=opts.max_iter {
        iterations = it;
        gradient(&x, &mut grad);
        loop {
            for i in 0..n {
                trial[i] = x[i] - step * grad[i];
            }
            let z = spec.project(&trial)?.into_inner();
            let fz = spec.nonconvex_objective(&z);
            let mut lin = 0.0;
            let mut moved = 0.0;
            for i in 0..n {
                let s = z[i] - x[i];
                lin += d[i] * grad[i] * s;
                moved += d[i] * s * s;
            }
            if moved == 0.0 {
                converged = true;
                break 'outer;
            }
            if fz <= fx + lin + 0.5 * moved / step {
                if fz > fx {
                    // Roundoff floor.
                    converged = true;
                    break 'outer;
                }
                let measure = math::sqrt(moved) / step;
                x = z;
                fx = fz;
                if measure <= opts.tol * scale {
                    converged = true;
                    break 'outer;
                }
                step = (2.0 * step).min(max_step);
                break;
            }
            step *= 0.5;
            if step < 1e-30 {
                break 'outer;
            }
        }
    }
    Ok(SubproblemResult {
        w_star: ControlField::new(x),
        objective_value: fx,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasible_candidate_is_unchanged() {
        let c = [0.2, 0.5, 0.9];
        let p = project_box_ball(&c, &[0.25, 0.5, 0.8], 1.0, &[1.0, 2.0, 0.5]).unwrap();
        assert_eq!(&p[..], &c[..]);
    }

    #[test]
    fn one_node_projections() {
        let p = project_box_ball(&[2.0], &[0.5], 0.09, &[1.0]).unwrap();
        assert!((p[0] - 0.8).abs() < 1e-12, "{}", p[0]);
        let p = project_box_ball(&[2.0], &[0.5], 10.0, &[1.0]).unwrap();
        assert_eq!(p[0], 1.0);
    }

    #[test]
    fn one_node_matches_grid_search() {
        // Brute force over a fine grid of [0, 1].
        let (c, wb, delta, d) = (2.0, 0.5, 0.09, 1.0);
        let best = (0..=100_000)
            .map(|k| k as f64 / 100_000.0)
            .filter(|v| d * (v - wb) * (v - wb) <= delta)
            .min_by(|a, b| ((a - c) * (a - c)).partial_cmp(&((b - c) * (b - c))).unwrap())
            .unwrap();
        let p = project_box_ball(&[c], &[wb], delta, &[d]).unwrap();
        assert!((p[0] - best).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(project_box_ball(&[1.0], &[0.5, 0.5], 1.0, &[1.0]).is_err());
        assert!(project_box_ball(&[f64::NAN], &[0.5], 1.0, &[1.0]).is_err());
        assert!(project_box_ball(&[1.0], &[0.5], -1.0, &[1.0]).is_err());
    }

    fn two_node() -> (Vec<f64>, SparseMatrix) {
        let k = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 1.0)]);
        (vec![0.5, 0.5], k)
    }

    #[test]
    fn stationary_center() {
        let (d, k) = two_node();
        let metric = TrustRegionMetric::new(&d, &k).unwrap();
        let spec = SubproblemSpec {
            metric: &metric,
            w_bar: &[0.5, 0.5],
            g: &[0.0, 0.0],
            delta: 0.1,
            gl: GLParams {
                epsilon: 0.5,
                gamma: 1.0,
            },
        };
        let r = solve_convex(&spec, &ConvexOptions::default()).unwrap();
        assert_eq!(r.objective_value, 0.0);
        assert_eq!(&r.w_star[..], &[0.5, 0.5]);
    }

    #[test]
    fn constant_descent_to_zero() {
        let (d, k) = two_node();
        let metric = TrustRegionMetric::new(&d, &k).unwrap();
        let gl = GLParams {
            epsilon: 1.0,
            gamma: 0.1,
        };
        let g = [2.0, 2.0];
        let spec = SubproblemSpec {
            metric: &metric,
            w_bar: &[1.0, 1.0],
            g: &g,
            delta: 5.0,
            gl,
        };
        let r = solve_convex(
            &spec,
            &ConvexOptions {
                tol: 1e-12,
                max_iter: 10_000,
            },
        )
        .unwrap();
        let expected: f64 = -d.iter().map(|di| di * (2.0 - 0.1)).sum::<f64>();
        assert!(r.w_star.iter().all(|v| v.abs() < 1e-12));
        assert!((r.objective_value - expected).abs() < 1e-12);
    }

    #[test]
    fn nonconvex_is_no_worse_than_convex() {
        let (d, k) = two_node();
        let metric = TrustRegionMetric::new(&d, &k).unwrap();
        let spec = SubproblemSpec {
            metric: &metric,
            w_bar: &[0.3, 0.6],
            g: &[0.2, -0.1],
            delta: 0.05,
            gl: GLParams {
                epsilon: 0.2,
                gamma: 0.5,
            },
        };
        let c = solve_convex(&spec, &ConvexOptions::default()).unwrap();
        let nc = solve_nonconvex(&spec, &NonconvexOptions::default()).unwrap();
        assert!(nc.objective_value <= spec.nonconvex_objective(&c.w_star) + 1e-15);
        assert!(nc.objective_value <= c.objective_value);
        assert!(spec.infeasibility(&nc.w_star) <= 1e-10);
    }

    #[test]
    fn binary_center_with_zero_gradient() {
        let (d, k) = two_node();
        let metric = TrustRegionMetric::new(&d, &k).unwrap();
        for delta in [1e-3, 0.1, 2.0] {
            let spec = SubproblemSpec {
                metric: &metric,
                w_bar: &[1.0, 0.0],
                g: &[0.0, 0.0],
                delta,
                gl: GLParams {
                    epsilon: 0.3,
                    gamma: 1.0,
                },
            };
            let r = solve_nonconvex(&spec, &NonconvexOptions::default()).unwrap();
            assert!(r.objective_value <= 0.0);
        }
    }

    #[test]
    fn spectral_bound_of_two_node_laplacian() {
        let (d, k) = two_node();
        // D⁻¹K has eigenvalues 0 and 4.
        let b = spectral_bound(&d, &k);
        assert!((4.0..=4.4 + 1e-12).contains(&b), "{b}");
    }
}
