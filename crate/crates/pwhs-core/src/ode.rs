//! Embedded Dormand–Prince 5(4) stepper with adaptive step control.

/// One adaptive integration attempt: returns the accepted state, the time
/// actually advanced to, and a suggestion for the next step size.
pub struct StepResult<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub h_next: f64,
    /// Set when the step was accepted at the minimum size with the error
    /// estimate still above target (controller breakdown, e.g. near a pole).
    pub forced: bool,
}

pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 { rtol: 1e-10, atol: 1e-10, h_init: 1e-3, h_min: 1e-12, h_max: 0.05 }
    }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl Dopri5 {
    /// Single trial step of size at most `h_try` (clamped to the controller
    /// limits); shrinks until the embedded error estimate passes.
    pub fn step<const N: usize, F>(&self, f: &F, t: f64, y: &[f64; N], h_try: f64) -> StepResult<N>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut h = h_try.clamp(self.h_min, self.h_max);
        loop {
            let mut k = [[0.0; N]; 7];
            k[0] = f(t, y);
            for stage in 0..6 {
                let mut ys = *y;
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    let a = A[stage][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += h * a * kj[i];
                        }
                    }
                }
                k[stage + 1] = f(t + h * stage_c(stage), &ys);
            }
            let mut y5 = *y;
            let mut y4 = *y;
            for (j, kj) in k.iter().enumerate() {
                for i in 0..N {
                    y5[i] += h * B5[j] * kj[i];
                    y4[i] += h * B4[j] * kj[i];
                }
            }
            let mut err: f64 = 0.0;
            for i in 0..N {
                let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                let e = (y5[i] - y4[i]) / sc;
                err += e * e;
            }
            err = (err / N as f64).sqrt();
            if err <= 1.0 || h <= self.h_min * 1.0001 {
                let factor = if err > 0.0 {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                } else {
                    5.0
                };
                return StepResult {
                    t: t + h,
                    y: y5,
                    h_next: (h * factor).clamp(self.h_min, self.h_max),
                    forced: err > 1.0,
                };
            }
            h = (h * (0.9 * err.powf(-0.2)).max(0.1)).max(self.h_min);
        }
    }

    /// Integrate from `(t0, y0)` to exactly `t1`.
    pub fn integrate_to<const N: usize, F>(
        &self,
        f: &F,
        t0: f64,
        y0: &[f64; N],
        t1: f64,
    ) -> [f64; N]
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut t = t0;
        let mut y = *y0;
        let mut h = self.h_init.min((t1 - t0).abs().max(self.h_min));
        if t1 == t0 {
            return y;
        }
        let dir = (t1 - t0).signum();
        // integrate in the forward variable s = dir * (t - t0)
        let g = |s: f64, ys: &[f64; N]| -> [f64; N] {
            let mut v = f(t0 + dir * s, ys);
            for x in v.iter_mut() {
                *x *= dir;
            }
            v
        };
        let s_end = (t1 - t0).abs();
        let mut s = 0.0;
        while s < s_end {
            let h_cap = (s_end - s).min(h);
            let res = self.step(&g, s, &y, h_cap);
            s = res.t;
            y = res.y;
            h = res.h_next;
        }
        let _ = t;
        t = t1;
        let _ = t;
        y
    }
}

fn stage_c(stage: usize) -> f64 {
    [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0][stage]
}
