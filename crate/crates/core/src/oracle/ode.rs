//! Adaptive Dormand–Prince 5(4) integration with section-event location.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Event times are located to this absolute accuracy.
    pub event_tol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, max_steps: 2_000_000, event_tol: 1e-12 }
    }
}

/// One accepted step, kept for dense output.
#[derive(Clone, Copy, Debug)]
pub struct StepData<const N: usize> {
    pub t0: f64,
    pub y0: [f64; N],
    pub f0: [f64; N],
    pub t1: f64,
    pub y1: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> StepData<N> {
    /// Cubic Hermite interpolation inside the step.
    pub fn interpolate(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let (h00, h10) = (2.0 * s.powi(3) - 3.0 * s * s + 1.0, s.powi(3) - 2.0 * s * s + s);
        let (h01, h11) = (-2.0 * s.powi(3) + 3.0 * s * s, s.powi(3) - s * s);
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i];
        }
        out
    }
}

/// A single Dormand–Prince step of size `h`; returns the fifth-order
/// solution, the embedded error estimate and the derivative at the end.
pub fn dopri_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], f0: &[f64; N], h: f64) -> ([f64; N], [f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    k[0] = *f0;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    // The last stage is evaluated at the fifth-order solution (FSAL).
    let mut y1 = *y;
    for j in 0..6 {
        for i in 0..N {
            y1[i] += h * A[6][j] * k[j][i];
        }
    }
    let mut err = [0.0; N];
    for (j, kj) in k.iter().enumerate() {
        for i in 0..N {
            err[i] += h * E[j] * kj[i];
        }
    }
    (y1, err, k[6])
}

fn err_norm<const N: usize>(y0: &[f64; N], y1: &[f64; N], err: &[f64; N], o: &OdeOptions) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        let sc = o.atol + o.rtol * y0[i].abs().max(y1[i].abs());
        s += (err[i] / sc).powi(2);
    }
    (s / N as f64).sqrt()
}

/// Adaptive stepper driving a callback after every accepted step; the
/// callback returns `Some` to stop.
pub fn integrate<const N: usize, F, V, T>(
    f: &F,
    t0: f64,
    y0: [f64; N],
    t_end: Option<f64>,
    opts: &OdeOptions,
    mut visit: V,
) -> Result<T>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    V: FnMut(&StepData<N>) -> Result<Option<T>>,
{
    let mut t = t0;
    let mut y = y0;
    let mut fy = f(t, &y);
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(opts.atol);
    let speed = fy.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut h = 0.01 * scale / speed;
    if let Some(te) = t_end {
        h = h.min(te - t0);
    }
    for _ in 0..opts.max_steps {
        if let Some(te) = t_end {
            if te - t <= 0.0 {
                return Err(Error::Integrator("reached the end time without a result".into()));
            }
            h = h.min(te - t);
        }
        let (y1, err, f1) = dopri_step(f, t, &y, &fy, h);
        let en = err_norm(&y, &y1, &err, opts);
        if !en.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            h *= 0.25;
            if h.abs() < 1e-14 * t.abs().max(1.0) {
                return Err(Error::Integrator(format!("non-finite state at t = {t}")));
            }
            continue;
        }
        if en <= 1.0 {
            let step = StepData { t0: t, y0: y, f0: fy, t1: t + h, y1, f1 };
            t += h;
            y = y1;
            fy = f1;
            if let Some(out) = visit(&step)? {
                return Ok(out);
            }
        }
        let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        h *= if en <= 1.0 { fac } else { fac.min(1.0) };
        if h.abs() < 1e-15 * t.abs().max(1.0) {
            return Err(Error::Integrator(format!("step size underflow at t = {t}")));
        }
    }
    Err(Error::Integrator(format!("step budget of {} exhausted", opts.max_steps)))
}

/// Locates the zero of the scalar `g` inside an accepted step and returns
/// the time and the state obtained by an exact re-step from the step start.
pub fn locate_event<const N: usize, F, G>(
    f: &F,
    step: &StepData<N>,
    g: &G,
    opts: &OdeOptions,
) -> (f64, [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    G: Fn(&[f64; N]) -> f64,
{
    let (mut a, mut b) = (step.t0, step.t1);
    let ga = g(&step.y0);
    for _ in 0..200 {
        if (b - a).abs() <= opts.event_tol {
            break;
        }
        let m = 0.5 * (a + b);
        let gm = g(&step.interpolate(m));
        if (gm > 0.0) == (ga > 0.0) && gm != 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let mut te = 0.5 * (a + b);
    let mut ye = dopri_step(f, step.t0, &step.y0, &step.f0, te - step.t0).0;
    // Newton polish on the exact re-stepped state.
    for _ in 0..3 {
        let fe = f(te, &ye);
        let eps = 1e-7 * (1.0 + te.abs());
        let mut yp = ye;
        for i in 0..N {
            yp[i] += eps * fe[i];
        }
        let dg = (g(&yp) - g(&ye)) / eps;
        if dg == 0.0 || !dg.is_finite() {
            break;
        }
        let dt = -g(&ye) / dg;
        if dt.abs() > (step.t1 - step.t0).abs() {
            break;
        }
        te += dt;
        ye = dopri_step(f, step.t0, &step.y0, &step.f0, te - step.t0).0;
        if dt.abs() <= opts.event_tol * 1e-3 {
            break;
        }
    }
    (te, ye)
}
