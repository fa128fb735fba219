//! Damped Gauss-Newton with a Levenberg-Marquardt damping schedule.

use nalgebra::{DMatrix, DVector};

pub(crate) const INITIAL_DAMPING: f64 = 1e-3;
const DAMPING_UP: f64 = 10.0;
const DAMPING_DOWN: f64 = 10.0;
const MAX_DAMPING: f64 = 1e14;

pub(crate) trait LeastSquares {
    /// Residuals and Jacobian (rows = residuals) at `p`.
    fn evaluate(&self, p: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>);

    fn residuals(&self, p: &DVector<f64>) -> DVector<f64> {
        self.evaluate(p).0
    }

    /// Size of a step relative to the parameter, used for termination.
    fn relative_step(&self, p: &DVector<f64>, step: &DVector<f64>) -> f64;
}

pub(crate) struct Outcome {
    pub params: DVector<f64>,
    pub cost: f64,
    pub iterations: usize,
    pub step_converged: bool,
    /// Column-scaled normal matrix at the final point.
    pub scaled_normal: DMatrix<f64>,
    /// Column scales used for `scaled_normal`.
    pub scales: DVector<f64>,
}

fn scaled_system(jac: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let n = jac.ncols();
    let scales = DVector::from_iterator(
        n,
        (0..n).map(|j| {
            let s = jac.column(j).norm();
            if s > 0.0 && s.is_finite() {
                s
            } else {
                1.0
            }
        }),
    );
    let mut scaled = jac.clone();
    for j in 0..n {
        let s = scales[j];
        scaled.column_mut(j).unscale_mut(s);
    }
    (scaled, scales)
}

pub(crate) fn minimize<P: LeastSquares>(
    problem: &P,
    start: DVector<f64>,
    tolerance: f64,
    max_iterations: usize,
) -> Outcome {
    let mut p = start;
    let (mut r, mut jac) = problem.evaluate(&p);
    let mut cost = r.norm_squared();
    let mut damping = INITIAL_DAMPING;
    let mut iterations = 0;
    let mut step_converged = false;

    while iterations < max_iterations {
        iterations += 1;
        let (scaled, scales) = scaled_system(&jac);
        let normal = scaled.transpose() * &scaled;
        let gradient = scaled.transpose() * &r;

        let mut accepted = None;
        while damping <= MAX_DAMPING {
            let mut lhs = normal.clone();
            for i in 0..lhs.nrows() {
                lhs[(i, i)] += damping;
            }
            let Some(chol) = lhs.cholesky() else {
                damping *= DAMPING_UP;
                continue;
            };
            let scaled_step = -chol.solve(&gradient);
            let step = scaled_step.component_div(&scales);
            let candidate = &p + &step;
            let r_new = problem.residuals(&candidate);
            let cost_new = r_new.norm_squared();
            if cost_new.is_finite() && cost_new <= cost {
                damping = (damping / DAMPING_DOWN).max(1e-12);
                accepted = Some((candidate, step, cost_new));
                break;
            }
            damping *= DAMPING_UP;
        }

        let Some((candidate, step, cost_new)) = accepted else {
            // no descent direction left: the current point is a minimum to
            // working precision
            step_converged = true;
            break;
        };
        let rel = problem.relative_step(&p, &step);
        p = candidate;
        cost = cost_new;
        (r, jac) = problem.evaluate(&p);
        if rel < tolerance {
            step_converged = true;
            break;
        }
    }

    let (scaled, scales) = scaled_system(&jac);
    Outcome {
        params: p,
        cost,
        iterations,
        step_converged,
        scaled_normal: scaled.transpose() * scaled,
        scales,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exponential decay y = a·exp(−b t).
    struct Decay {
        t: Vec<f64>,
        y: Vec<f64>,
    }

    impl LeastSquares for Decay {
        fn evaluate(&self, p: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
            let m = self.t.len();
            let mut r = DVector::zeros(m);
            let mut j = DMatrix::zeros(m, 2);
            for (i, (&t, &y)) in self.t.iter().zip(&self.y).enumerate() {
                let e = (-p[1] * t).exp();
                r[i] = p[0] * e - y;
                j[(i, 0)] = e;
                j[(i, 1)] = -p[0] * t * e;
            }
            (r, j)
        }

        fn relative_step(&self, p: &DVector<f64>, step: &DVector<f64>) -> f64 {
            step.iter().zip(p.iter()).map(|(s, v)| (s / v).abs()).fold(0.0, f64::max)
        }
    }

    #[test]
    fn recovers_exponential() {
        let t: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let y = t.iter().map(|t| 2.5 * (-1.3 * t).exp()).collect();
        let out = minimize(&Decay { t, y }, DVector::from_vec(vec![1.0, 0.2]), 1e-10, 200);
        assert!(out.step_converged);
        assert!((out.params[0] - 2.5).abs() < 1e-8);
        assert!((out.params[1] - 1.3).abs() < 1e-8);
    }
}
