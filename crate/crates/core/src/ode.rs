//! Adaptive Dormand-Prince 5(4) integration of complex-valued systems.
//!
//! The local error of each complex component is measured by its modulus, so
//! the step sequence does not depend on the global phase of the state.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; chosen from the initial derivative when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tolerance(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Dormand-Prince stepper with first-same-as-last reuse.
pub struct Dopri5<F> {
    rhs: F,
    opts: OdeOptions,
    t: f64,
    y: Vec<Complex64>,
    f: Vec<Complex64>,
    h: f64,
    k: [Vec<Complex64>; 6],
    y_stage: Vec<Complex64>,
    y_new: Vec<Complex64>,
    stats: OdeStats,
}

impl<F> Dopri5<F>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    pub fn new(mut rhs: F, t0: f64, y0: &[Complex64], opts: OdeOptions) -> Result<Self> {
        if !(opts.rtol > 0.0 && opts.atol >= 0.0 && opts.h_max > 0.0) {
            return Err(Error::InvalidParams {
                name: "tolerance",
                reason: "rtol must be positive and atol non-negative",
            });
        }
        let n = y0.len();
        let mut f = vec![Complex64::new(0.0, 0.0); n];
        rhs(t0, y0, &mut f);
        let h = match opts.h_init {
            Some(h) => h,
            None => {
                let scale = |v: &Complex64, y: &Complex64| v.norm() / (opts.atol + opts.rtol * y.norm());
                let d0 = rms(y0.iter().zip(y0).map(|(a, b)| scale(a, b)));
                let d1 = rms(f.iter().zip(y0).map(|(a, b)| scale(a, b)));
                if d0 < 1e-5 || d1 < 1e-5 {
                    1e-6
                } else {
                    0.01 * d0 / d1
                }
            }
        };
        let zero = vec![Complex64::new(0.0, 0.0); n];
        Ok(Self {
            rhs,
            opts,
            t: t0,
            y: y0.to_vec(),
            f,
            h: h.min(opts.h_max),
            k: [
                zero.clone(),
                zero.clone(),
                zero.clone(),
                zero.clone(),
                zero.clone(),
                zero.clone(),
            ],
            y_stage: zero.clone(),
            y_new: zero,
            stats: OdeStats {
                evaluations: 1,
                ..OdeStats::default()
            },
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[Complex64] {
        &self.y
    }

    pub fn stats(&self) -> OdeStats {
        self.stats
    }

    /// Advances exactly to `t_end`, landing on it with a shortened last step.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        while self.t < t_end {
            self.step(t_end)?;
        }
        Ok(())
    }

    /// Takes one accepted step, never passing `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<()> {
        loop {
            if self.stats.accepted + self.stats.rejected >= self.opts.max_steps {
                return Err(Error::StepFailure {
                    t: self.t,
                    h: self.h,
                });
            }
            let remaining = t_end - self.t;
            if remaining <= 0.0 {
                return Ok(());
            }
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            let err = self.try_step(h);
            let accepted = err <= 1.0;
            if accepted {
                self.stats.accepted += 1;
                self.t = if last { t_end } else { self.t + h };
                core::mem::swap(&mut self.y, &mut self.y_new);
                core::mem::swap(&mut self.f, &mut self.k[5]);
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                let proposal = (h * fac).min(self.opts.h_max);
                // a clipped final step must not shrink the next interval's first step
                self.h = if last { proposal.max(self.h) } else { proposal };
            } else {
                self.stats.rejected += 1;
                let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.2, 1.0) } else { 0.2 };
                self.h = h * fac;
            }
            if self.h <= 16.0 * f64::EPSILON * self.t.abs().max(1.0) {
                return Err(Error::StepFailure {
                    t: self.t,
                    h: self.h,
                });
            }
            if accepted {
                return Ok(());
            }
        }
    }

    /// One trial step of size `h`; returns the scaled error norm. The
    /// candidate state lands in `y_new` and its derivative in `k[5]`.
    fn try_step(&mut self, h: f64) -> f64 {
        let t = self.t;
        let n = self.y.len();
        let (y, f) = (&self.y, &self.f);
        let [k2, k3, k4, k5, k6, k7] = &mut self.k;
        let ys = &mut self.y_stage;

        for i in 0..n {
            ys[i] = y[i] + h * A21 * f[i];
        }
        (self.rhs)(t + C2 * h, ys, k2);
        for i in 0..n {
            ys[i] = y[i] + h * (A31 * f[i] + A32 * k2[i]);
        }
        (self.rhs)(t + C3 * h, ys, k3);
        for i in 0..n {
            ys[i] = y[i] + h * (A41 * f[i] + A42 * k2[i] + A43 * k3[i]);
        }
        (self.rhs)(t + C4 * h, ys, k4);
        for i in 0..n {
            ys[i] = y[i] + h * (A51 * f[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        (self.rhs)(t + C5 * h, ys, k5);
        for i in 0..n {
            ys[i] = y[i] + h * (A61 * f[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        (self.rhs)(t + h, ys, k6);
        let yn = &mut self.y_new;
        for i in 0..n {
            yn[i] = y[i] + h * (B1 * f[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        (self.rhs)(t + h, yn, k7);
        self.stats.evaluations += 6;

        let (rtol, atol) = (self.opts.rtol, self.opts.atol);
        let err = (0..n).map(|i| {
            let e = h * (E1 * f[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            e.norm() / (atol + rtol * y[i].norm().max(yn[i].norm()))
        });
        rms(err)
    }
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for v in values {
        sum += v * v;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        (sum / count as f64).sqrt()
    }
}

/// Integrates from `t0` and returns the state at each of the nondecreasing
/// output `times` (all `>= t0`).
pub fn integrate_to_times<F>(
    rhs: F,
    t0: f64,
    y0: &[Complex64],
    times: &[f64],
    opts: OdeOptions,
) -> Result<(Vec<Vec<Complex64>>, OdeStats)>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let mut stepper = Dopri5::new(rhs, t0, y0, opts)?;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= stepper.t()) {
            return Err(Error::InvalidParams {
                name: "times",
                reason: "output times must be finite, nondecreasing and not before the start",
            });
        }
        stepper.advance_to(t)?;
        out.push(stepper.state().to_vec());
    }
    Ok((out, stepper.stats()))
}
