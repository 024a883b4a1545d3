//! Dormand–Prince 5(4) stepping for three-component systems, with cubic
//! Hermite dense output between accepted steps.

pub type Vec3 = [f64; 3];

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Result of one trial step.
#[derive(Debug, Clone, Copy)]
pub struct Trial {
    pub y: Vec3,
    /// Derivative at the new point (first stage of the next step).
    pub dy: Vec3,
    /// Componentwise local error estimate.
    pub err: Vec3,
}

/// One Dormand–Prince step of size `h` from `(t, y)` where `dy = f(t, y)`.
pub fn dopri5_step<F, E2>(f: &mut F, t: f64, y: &Vec3, dy: &Vec3, h: f64) -> Result<Trial, E2>
where
    F: FnMut(f64, &Vec3) -> Result<Vec3, E2>,
{
    let mut k = [[0.0; 3]; 7];
    k[0] = *dy;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..3 {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(t + C[s] * h, &ys)?;
    }
    // stage 7 is evaluated at the fifth-order solution (FSAL)
    let mut y_new = *y;
    for i in 0..3 {
        for j in 0..6 {
            y_new[i] += h * A[6][j] * k[j][i];
        }
    }
    let mut err = [0.0; 3];
    for (i, e) in err.iter_mut().enumerate() {
        *e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
    }
    Ok(Trial { y: y_new, dy: k[6], err })
}

/// Weighted RMS norm of the error with per-component absolute tolerances.
pub fn error_norm(err: &Vec3, y0: &Vec3, y1: &Vec3, atol: &Vec3, rtol: f64) -> f64 {
    let s: f64 = (0..3)
        .map(|i| {
            let sc = atol[i] + rtol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).powi(2)
        })
        .sum();
    (s / 3.0).sqrt()
}

/// Step-size factor from a normalized error, clamped to `[0.2, 5]`.
pub fn step_factor(err: f64) -> f64 {
    if err == 0.0 {
        return 5.0;
    }
    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
}

/// Cubic Hermite interpolant on one step.
#[derive(Debug, Clone, Copy)]
pub struct Hermite {
    pub t0: f64,
    pub h: f64,
    pub y0: Vec3,
    pub y1: Vec3,
    pub d0: Vec3,
    pub d1: Vec3,
}

impl Hermite {
    pub fn eval(&self, t: f64) -> Vec3 {
        let u = (t - self.t0) / self.h;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        std::array::from_fn(|i| {
            h00 * self.y0[i] + h10 * self.h * self.d0[i] + h01 * self.y1[i] + h11 * self.h * self.d1[i]
        })
    }

    pub fn derivative(&self, t: f64) -> Vec3 {
        let u = (t - self.t0) / self.h;
        let g00 = 6.0 * u * (u - 1.0);
        let g10 = (1.0 - u) * (1.0 - 3.0 * u);
        let g01 = -g00;
        let g11 = u * (3.0 * u - 2.0);
        std::array::from_fn(|i| (g00 * self.y0[i] + g01 * self.y1[i]) / self.h + g10 * self.d0[i] + g11 * self.d1[i])
    }

    /// Time in `[t0, t0 + h]` where component `i` crosses `level`, assuming a
    /// sign change between the endpoints. Bisection on the interpolant.
    pub fn crossing(&self, i: usize, level: f64) -> f64 {
        let (mut lo, mut hi) = (self.t0, self.t0 + self.h);
        let below = self.y0[i] < level;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (self.eval(mid)[i] < level) == below {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
