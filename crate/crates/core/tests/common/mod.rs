//! Reference computations that share no code with the library.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Low-dimensional cones with closed-form eigenvalues.
#[derive(Clone, Copy, Debug)]
pub enum SmallCone {
    Orthant3,
    Spin4,
    Sym2,
}

impl SmallCone {
    /// Raw coordinates of `center + sum_j c_j B_j`, where the `B_j` span the
    /// trace-zero directions.
    /// Orthant: (x1, x2, x3). Spin: (s, v1, v2, v3). Sym2: (a, b, c) for
    /// [[a, b], [b, c]].
    pub fn point(self, c: &[f64]) -> Vec<f64> {
        match self {
            SmallCone::Orthant3 => vec![1.0 / 3.0 + c[0], 1.0 / 3.0 - c[0] + c[1], 1.0 / 3.0 - c[1]],
            SmallCone::Spin4 => vec![0.5, c[0], c[1], c[2]],
            SmallCone::Sym2 => vec![0.5 + c[0], c[1], 0.5 - c[0]],
        }
    }

    pub fn chart_dim(self) -> usize {
        match self {
            SmallCone::Orthant3 | SmallCone::Sym2 => 2,
            SmallCone::Spin4 => 3,
        }
    }

    pub fn eigenvalues(self, raw: &[f64]) -> Vec<f64> {
        match self {
            SmallCone::Orthant3 => raw.to_vec(),
            SmallCone::Spin4 => {
                let n = (raw[1] * raw[1] + raw[2] * raw[2] + raw[3] * raw[3]).sqrt();
                vec![raw[0] + n, raw[0] - n]
            }
            SmallCone::Sym2 => {
                let (a, b, c) = (raw[0], raw[1], raw[2]);
                let mid = 0.5 * (a + c);
                let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
                vec![mid + rad, mid - rad]
            }
        }
    }

    /// Canonical inner product of two raw coordinate vectors.
    pub fn pairing(self, g: &[f64], x: &[f64]) -> f64 {
        match self {
            SmallCone::Orthant3 => g.iter().zip(x).map(|(a, b)| a * b).sum(),
            SmallCone::Spin4 => 2.0 * g.iter().zip(x).map(|(a, b)| a * b).sum::<f64>(),
            SmallCone::Sym2 => g[0] * x[0] + 2.0 * g[1] * x[1] + g[2] * x[2],
        }
    }
}

/// `argmax_{x in simplex} eta <g, x> - sum lambda_i ln lambda_i` by damped
/// Newton on the chart with finite-difference derivatives.
pub fn entropic_argmax(cone: SmallCone, g: &[f64], eta: f64) -> Vec<f64> {
    let objective = |c: &[f64]| -> f64 {
        let x = cone.point(c);
        let eig = cone.eigenvalues(&x);
        if eig.iter().any(|l| *l <= 0.0) {
            return f64::NEG_INFINITY;
        }
        eta * cone.pairing(g, &x) - eig.iter().map(|l| l * l.ln()).sum::<f64>()
    };
    let k = cone.chart_dim();
    let mut c = vec![0.0; k];
    for _ in 0..200 {
        let lmin = cone
            .eigenvalues(&cone.point(&c))
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let h = 1e-4 * lmin.min(1.0);
        let f0 = objective(&c);
        let shifted = |i: usize, di: f64, j: usize, dj: f64| {
            let mut p = c.clone();
            p[i] += di;
            p[j] += dj;
            objective(&p)
        };
        let grad = DVector::from_fn(k, |i, _| (shifted(i, h, i, 0.0) - shifted(i, -h, i, 0.0)) / (2.0 * h));
        let hess = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                (shifted(i, h, i, 0.0) - 2.0 * f0 + shifted(i, -h, i, 0.0)) / (h * h)
            } else {
                (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) + shifted(i, -h, j, -h))
                    / (4.0 * h * h)
            }
        });
        let step = match hess.clone().lu().solve(&(-&grad)) {
            Some(s) => s,
            None => grad.clone(),
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = c.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect();
            if objective(&trial) >= f0 - 1e-15 {
                c = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || t * step.norm() < 1e-13 {
            break;
        }
    }
    cone.point(&c)
}

/// Fixed-point iteration for `argmin_x sum_i |x - b_i|`, skipping targets
/// closer than `1e-12`; stops after `10^4` steps or a displacement below
/// `1e-12`.
pub fn weiszfeld(targets: &[DVector<f64>]) -> DVector<f64> {
    let n = targets.len() as f64;
    let mut x = targets.iter().fold(DVector::zeros(targets[0].len()), |a, b| a + b) / n;
    for _ in 0..10_000 {
        let mut num = DVector::zeros(x.len());
        let mut den = 0.0;
        for b in targets {
            let r = (&x - b).norm();
            if r < 1e-12 {
                continue;
            }
            num += b / r;
            den += 1.0 / r;
        }
        if den == 0.0 {
            break;
        }
        let next = num / den;
        let moved = (&next - &x).norm();
        x = next;
        if moved < 1e-12 {
            break;
        }
    }
    x
}

pub fn sum_of_distances(targets: &[DVector<f64>], x: &DVector<f64>) -> f64 {
    targets.iter().map(|b| (x - b).norm()).sum()
}

/// `sum x_i ln(x_i / y_i)`.
pub fn scalar_kl(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * (a / b).ln()).sum()
}
