//! Derivative-free and finite-difference minimizers for small problems.

/// Outcome of one local minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead simplex search with dimension-adaptive coefficients
/// (reflection 1, expansion 1 + 2/n, contraction 3/4 − 1/2n, shrink 1 − 1/n).
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    pub max_iterations: usize,
    /// Stop once (f_worst − f_best) ≤ tol · (1 + |f_best|).
    pub tol: f64,
}

impl NelderMead {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let nf = n as f64;
        let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

        let mut eval = |x: &[f64], count: &mut usize| {
            *count += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut evaluations = 0;

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += if v[i].abs() > 1e-12 {
                self.initial_step * v[i].abs().max(1.0) * v[i].signum()
            } else {
                self.initial_step
            };
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evaluations)).collect();

        let mut centroid = vec![0.0; n];
        let mut trial = vec![0.0; n];
        let mut trial2 = vec![0.0; n];
        let mut iterations = 0;
        let mut converged = false;

        while iterations < self.max_iterations {
            let mut lo = 0;
            let mut hi = 0;
            for k in 1..=n {
                if values[k] < values[lo] {
                    lo = k;
                }
                if values[k] >= values[hi] {
                    hi = k;
                }
            }
            if lo == hi {
                hi = if lo == 0 { 1 } else { 0 };
            }
            let mut next = lo;
            for k in 0..=n {
                if k != hi && values[k] >= values[next] {
                    next = k;
                }
            }

            let best = values[lo];
            let worst = values[hi];
            if worst.is_finite() && (worst - best) <= self.tol * (1.0 + best.abs()) {
                converged = true;
                break;
            }
            iterations += 1;

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for (k, v) in simplex.iter().enumerate() {
                if k == hi {
                    continue;
                }
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / nf;
                }
            }

            let along = |coef: f64, out: &mut [f64], worst: &[f64], centroid: &[f64]| {
                for i in 0..n {
                    out[i] = centroid[i] + coef * (worst[i] - centroid[i]);
                }
            };

            along(-alpha, &mut trial, &simplex[hi], &centroid);
            let fr = eval(&trial, &mut evaluations);

            if fr < values[lo] {
                along(-alpha * beta, &mut trial2, &simplex[hi], &centroid);
                let fe = eval(&trial2, &mut evaluations);
                if fe < fr {
                    simplex[hi].copy_from_slice(&trial2);
                    values[hi] = fe;
                } else {
                    simplex[hi].copy_from_slice(&trial);
                    values[hi] = fr;
                }
                continue;
            }
            if fr < values[next] {
                simplex[hi].copy_from_slice(&trial);
                values[hi] = fr;
                continue;
            }

            let (coef, reference) = if fr < values[hi] {
                (-alpha * gamma, fr)
            } else {
                (gamma, values[hi])
            };
            along(coef, &mut trial2, &simplex[hi], &centroid);
            let fc = eval(&trial2, &mut evaluations);
            if fc <= reference {
                simplex[hi].copy_from_slice(&trial2);
                values[hi] = fc;
                continue;
            }

            // shrink towards the best vertex
            let head = simplex[lo].clone();
            for k in 0..=n {
                if k == lo {
                    continue;
                }
                for i in 0..n {
                    simplex[k][i] = head[i] + delta * (simplex[k][i] - head[i]);
                }
                values[k] = eval(&simplex[k], &mut evaluations);
            }
        }

        let best = (0..=n)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .unwrap_or(0);
        Minimum {
            x: simplex[best].clone(),
            value: values[best],
            iterations,
            evaluations,
            converged,
        }
    }
}

/// Steepest descent on central finite-difference gradients with a
/// backtracking (Armijo) line search.
#[derive(Debug, Clone, Copy)]
pub struct GradientDescent {
    pub max_iterations: usize,
    /// Stop once the per-step decrease falls below tol · (1 + |f|).
    pub tol: f64,
    pub fd_step: f64,
    pub initial_rate: f64,
}

impl GradientDescent {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut x = x0.to_vec();
        let mut fx = f(&x);
        let mut evaluations = 1;
        let mut grad = vec![0.0; n];
        let mut probe = x.clone();
        let mut rate = self.initial_rate;
        let mut iterations = 0;
        let mut converged = false;

        while iterations < self.max_iterations {
            iterations += 1;
            for i in 0..n {
                probe.copy_from_slice(&x);
                probe[i] = x[i] + self.fd_step;
                let up = f(&probe);
                probe[i] = x[i] - self.fd_step;
                let down = f(&probe);
                evaluations += 2;
                grad[i] = (up - down) / (2.0 * self.fd_step);
            }
            let g2: f64 = grad.iter().map(|g| g * g).sum();
            if !g2.is_finite() || g2 == 0.0 {
                converged = g2 == 0.0;
                break;
            }

            let mut accepted = false;
            rate *= 2.0;
            for _ in 0..60 {
                for i in 0..n {
                    probe[i] = x[i] - rate * grad[i];
                }
                let fp = f(&probe);
                evaluations += 1;
                if fp.is_finite() && fp <= fx - 1e-4 * rate * g2 {
                    let decrease = fx - fp;
                    x.copy_from_slice(&probe);
                    fx = fp;
                    accepted = true;
                    if decrease <= self.tol * (1.0 + fx.abs()) {
                        converged = true;
                    }
                    break;
                }
                rate *= 0.5;
            }
            if !accepted {
                // no descent possible at finite-difference resolution
                converged = true;
            }
            if converged {
                break;
            }
        }
        Minimum {
            x,
            value: fx,
            iterations,
            evaluations,
            converged,
        }
    }
}
