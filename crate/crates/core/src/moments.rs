//! Closed equations for the photon numbers and the pair correlation, and the
//! observables built on them.

use alloc::vec::Vec;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::coeffs::{MasterCoefficients, RateConstants};
use crate::error::{Error, Result};
use crate::ode::{Dopri5, OdeOptions};

/// Mean photon numbers and `w = <a1 a2>` at time `t`. The conjugate
/// correlation `<a1+ a2+>` is always `conj(w)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentState {
    pub t: f64,
    pub n1: f64,
    pub n2: f64,
    pub w: Complex64,
}

impl MomentState {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn new(n1: f64, n2: f64, w: Complex64) -> Self {
        Self { t: 0.0, n1, n2, w }
    }

    /// Rotates the pair correlation by `e^{i delta}`.
    pub fn rotated(mut self, delta: f64) -> Self {
        self.w *= Complex64::from_polar(1.0, delta);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentDerivative {
    pub dn1: f64,
    pub dn2: f64,
    pub dw: Complex64,
}

pub fn moment_drift(state: &MomentState, mc: &MasterCoefficients, rc: &RateConstants) -> MomentDerivative {
    let e = Complex64::from_polar(1.0, mc.phi);
    let w = state.w;
    MomentDerivative {
        dn1: rc.k1 * state.n1 + 2.0 * (e.conj() * rc.c12 * w).re + 2.0 * mc.c_gain1.re,
        dn2: rc.k2 * state.n2 + 2.0 * (e.conj() * rc.c32 * w).re + 2.0 * mc.c_gain2.re,
        dw: rc.k12 * w + e * (state.n1 * rc.c32.conj() + state.n2 * rc.c12.conj() - mc.c2.conj()),
    }
}

/// The moment equations as `dx/dt = A x + b` over `x = (n1, n2, Re w, Im w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix {
    pub a: Matrix4<f64>,
    pub b: Vector4<f64>,
}

impl DriftMatrix {
    pub fn new(mc: &MasterCoefficients, rc: &RateConstants) -> Self {
        let e = Complex64::from_polar(1.0, mc.phi);
        let q1 = e.conj() * rc.c12;
        let q2 = e.conj() * rc.c32;
        let s1 = e * rc.c32.conj();
        let s2 = e * rc.c12.conj();
        let s0 = -e * mc.c2.conj();
        let k = rc.k12;
        #[rustfmt::skip]
        let a = Matrix4::new(
            rc.k1, 0.0,   2.0 * q1.re, -2.0 * q1.im,
            0.0,   rc.k2, 2.0 * q2.re, -2.0 * q2.im,
            s1.re, s2.re, k.re,        -k.im,
            s1.im, s2.im, k.im,        k.re,
        );
        let b = Vector4::new(2.0 * mc.c_gain1.re, 2.0 * mc.c_gain2.re, s0.re, s0.im);
        Self { a, b }
    }

    pub fn apply(&self, state: &MomentState) -> Vector4<f64> {
        self.a * to_vector(state) + self.b
    }
}

pub(crate) fn to_vector(s: &MomentState) -> Vector4<f64> {
    Vector4::new(s.n1, s.n2, s.w.re, s.w.im)
}

fn check_tolerance(tol: f64) -> Result<()> {
    if (1e-12..=1e-4).contains(&tol) {
        Ok(())
    } else {
        Err(Error::InvalidParams {
            name: "tol",
            reason: "must lie in [1e-12, 1e-4]",
        })
    }
}

fn moment_stepper<'a>(
    initial: &MomentState,
    mc: &'a MasterCoefficients,
    rc: &'a RateConstants,
    tol: f64,
) -> Result<Dopri5<impl FnMut(f64, &[Complex64], &mut [Complex64]) + 'a>> {
    check_tolerance(tol)?;
    let rhs = move |_t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let s = MomentState {
            t: 0.0,
            n1: y[0].re,
            n2: y[1].re,
            w: y[2],
        };
        let d = moment_drift(&s, mc, rc);
        dy[0] = Complex64::new(d.dn1, 0.0);
        dy[1] = Complex64::new(d.dn2, 0.0);
        dy[2] = d.dw;
    };
    let y0 = [
        Complex64::new(initial.n1, 0.0),
        Complex64::new(initial.n2, 0.0),
        initial.w,
    ];
    Dopri5::new(rhs, initial.t, &y0, OdeOptions::with_tolerance(tol, tol))
}

fn state_of(t: f64, y: &[Complex64]) -> MomentState {
    MomentState {
        t,
        n1: y[0].re,
        n2: y[1].re,
        w: y[2],
    }
}

/// Adaptive integration up to `t_end`, returning the initial state followed
/// by the state after every accepted step.
pub fn evolve_moments(
    initial: &MomentState,
    mc: &MasterCoefficients,
    rc: &RateConstants,
    t_end: f64,
    tol: f64,
) -> Result<Vec<MomentState>> {
    if !(t_end > initial.t) || !t_end.is_finite() {
        return Err(Error::InvalidParams {
            name: "t_end",
            reason: "must be finite and after the initial time",
        });
    }
    let mut stepper = moment_stepper(initial, mc, rc, tol)?;
    let mut out = Vec::new();
    out.push(*initial);
    while stepper.t() < t_end {
        stepper.step(t_end)?;
        out.push(state_of(stepper.t(), stepper.state()));
    }
    Ok(out)
}

/// Same integration sampled at the nondecreasing `times`.
pub fn evolve_moments_at(
    initial: &MomentState,
    mc: &MasterCoefficients,
    rc: &RateConstants,
    times: &[f64],
    tol: f64,
) -> Result<Vec<MomentState>> {
    let mut stepper = moment_stepper(initial, mc, rc, tol)?;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= stepper.t()) || !t.is_finite() {
            return Err(Error::InvalidParams {
                name: "times",
                reason: "sample times must be finite, nondecreasing and not before the start",
            });
        }
        stepper.advance_to(t)?;
        out.push(state_of(t, stepper.state()));
    }
    Ok(out)
}

/// Equal-time cross correlation `|w|^2 / (n1 n2) + 1`.
pub fn g2_of_state(state: &MomentState) -> Result<f64> {
    let nn = state.n1 * state.n2;
    if !(nn > 0.0) {
        return Err(Error::UndefinedG2);
    }
    Ok(state.w.norm_sqr() / nn + 1.0)
}

/// Entangling band of `cos(phi21)`: `D < 2` strictly inside `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseWindow {
    pub lo: f64,
    pub hi: f64,
    /// `lo` clipped to the attainable range `[-1, 1]`.
    pub clipped_lo: f64,
    pub clipped_hi: f64,
}

impl PhaseWindow {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

pub fn phase_window(n1: f64, n2: f64, g2: f64) -> Result<PhaseWindow> {
    if !(n1 > 0.0 && n2 > 0.0) {
        return Err(Error::InvalidParams {
            name: "n",
            reason: "photon numbers must be positive",
        });
    }
    if !(g2 > 1.0) {
        return Err(Error::InvalidParams {
            name: "g2",
            reason: "must exceed 1",
        });
    }
    let amp = 2.0 * (n1 * n2 * (g2 - 1.0)).sqrt();
    let lo = -(n1 + n2 + 1.0) / amp;
    let hi = -(n1 + n2) / amp;
    if hi <= -1.0 {
        return Err(Error::EmptyWindow { hi });
    }
    Ok(PhaseWindow {
        lo,
        hi,
        clipped_lo: lo.max(-1.0),
        clipped_hi: hi.min(1.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntanglementReport {
    pub duan_d: f64,
    /// `None` when either mode is empty.
    pub g2: Option<f64>,
    /// `arg(w)`, zero when `w = 0`.
    pub phi21: f64,
    /// `None` when `g2` is undefined, `g2 <= 1`, or no phase entangles.
    pub window: Option<PhaseWindow>,
    pub entangled: bool,
    /// `None` for transient states; set by the steady-state verdict.
    pub stable: Option<bool>,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
}

/// Duan sum of variances for the given moments and coherent amplitudes.
pub fn duan_parameter(state: &MomentState, alpha1: Complex64, alpha2: Complex64) -> EntanglementReport {
    let (n1, n2, w) = (state.n1, state.n2, state.w);
    let phi21 = if w == Complex64::new(0.0, 0.0) { 0.0 } else { w.arg() };
    let g2 = g2_of_state(state).ok();
    // sqrt(n1 n2 (g2 - 1)) is |w| wherever g2 is defined
    let pair = 2.0 * w.norm() * phi21.cos();
    let coherent = alpha1.norm_sqr() + alpha2.norm_sqr() + 2.0 * (alpha1 * alpha2).re;
    let duan_d = 2.0 * (1.0 + n1 + n2 + pair - coherent);
    let window = g2.and_then(|g| phase_window(n1, n2, g).ok());
    EntanglementReport {
        duan_d,
        g2,
        phi21,
        window,
        entangled: duan_d > 0.0 && duan_d < 2.0,
        stable: None,
        alpha1,
        alpha2,
    }
}

/// Vacuum-input Duan parameter `2 (1 + n1 + n2 + 2 Re w)`.
pub fn duan_vacuum(state: &MomentState) -> f64 {
    2.0 * (1.0 + state.n1 + state.n2 + 2.0 * state.w.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn zero() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn reit(xi: f64, kappa: f64, phi: f64) -> (MasterCoefficients, RateConstants) {
        let mc = MasterCoefficients::reit_limit(xi, kappa, kappa, phi);
        (mc, crate::coeffs::rate_constants(&mc))
    }

    #[test]
    fn vacuum_is_fixed_under_pure_loss() {
        let mc = MasterCoefficients::pure_loss(1.0, 1.0, 0.3);
        let rc = crate::coeffs::rate_constants(&mc);
        let d = moment_drift(&MomentState::vacuum(), &mc, &rc);
        assert_eq!((d.dn1, d.dn2, d.dw), (0.0, 0.0, zero()));
    }

    #[test]
    fn vacuum_seeds_pairs_first() {
        let phi = 0.7;
        let (mc, rc) = reit(0.01, 1.0, phi);
        let d = moment_drift(&MomentState::vacuum(), &mc, &rc);
        assert_eq!(d.dn1, 0.0);
        assert_eq!(d.dn2, 0.0);
        let expected = -Complex64::from_polar(1.0, phi) * Complex64::new(0.0, -0.01);
        assert_abs_diff_eq!(d.dw, expected, epsilon = 1e-16);
    }

    #[test]
    fn drift_is_phase_covariant() {
        let mc = MasterCoefficients {
            c_gain1: Complex64::new(0.1, 0.05),
            c1: Complex64::new(0.2, -0.1),
            c3: Complex64::new(-0.05, 0.3),
            ..MasterCoefficients::reit_limit(0.4, 1.0, 0.8, 0.2)
        };
        let rc = crate::coeffs::rate_constants(&mc);
        let s = MomentState::new(0.7, 1.3, Complex64::new(0.2, -0.4));
        let delta = 1.1;
        let a = moment_drift(&s, &mc, &rc);
        let b = moment_drift(&s.rotated(delta), &mc.with_phi(mc.phi + delta), &rc);
        assert_abs_diff_eq!(a.dn1, b.dn1, epsilon = 1e-14);
        assert_abs_diff_eq!(a.dn2, b.dn2, epsilon = 1e-14);
        assert_abs_diff_eq!(a.dw * Complex64::from_polar(1.0, delta), b.dw, epsilon = 1e-14);
    }

    #[test]
    fn drift_matrix_matches_drift() {
        let mc = MasterCoefficients {
            c_gain1: Complex64::new(0.1, 0.05),
            c_gain2: Complex64::new(0.03, -0.2),
            c1: Complex64::new(0.2, -0.1),
            c3: Complex64::new(-0.05, 0.3),
            ..MasterCoefficients::reit_limit(0.4, 1.0, 0.8, 2.2)
        };
        let rc = crate::coeffs::rate_constants(&mc);
        let s = MomentState::new(0.7, 1.3, Complex64::new(0.2, -0.4));
        let d = moment_drift(&s, &mc, &rc);
        let v = DriftMatrix::new(&mc, &rc).apply(&s);
        assert_abs_diff_eq!(v[0], d.dn1, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1], d.dn2, epsilon = 1e-14);
        assert_abs_diff_eq!(v[2], d.dw.re, epsilon = 1e-14);
        assert_abs_diff_eq!(v[3], d.dw.im, epsilon = 1e-14);
    }

    #[test]
    fn pure_loss_trajectory_stays_vacuum() {
        let mc = MasterCoefficients::pure_loss(1.0, 2.0, 0.0);
        let rc = crate::coeffs::rate_constants(&mc);
        let traj = evolve_moments(&MomentState::vacuum(), &mc, &rc, 10.0, 1e-9).unwrap();
        assert!(traj.len() > 1);
        assert_eq!(traj.last().unwrap().t, 10.0);
        for s in traj {
            assert_eq!((s.n1, s.n2, s.w), (0.0, 0.0, zero()));
            assert_eq!(duan_vacuum(&s), 2.0);
        }
    }

    #[test]
    fn tolerance_bounds_are_enforced() {
        let (mc, rc) = reit(0.1, 1.0, 0.0);
        for tol in [1e-13, 1e-3] {
            assert!(evolve_moments(&MomentState::vacuum(), &mc, &rc, 1.0, tol).is_err());
        }
        assert!(evolve_moments(&MomentState::vacuum(), &mc, &rc, 0.0, 1e-8).is_err());
    }

    #[test]
    fn reit_trajectory_approaches_closed_form() {
        let (xi, kappa) = (0.5, 1.0);
        let (mc, rc) = reit(xi, kappa, core::f64::consts::FRAC_PI_2);
        let s = evolve_moments_at(&MomentState::vacuum(), &mc, &rc, &[60.0], 1e-10).unwrap()[0];
        let n = xi * xi / (2.0 * (kappa * kappa - xi * xi));
        assert!((s.n1 - n).abs() < 1e-8);
        assert!((s.n2 - n).abs() < 1e-8);
        assert!((s.w.norm() - xi * kappa / (2.0 * (kappa * kappa - xi * xi))).abs() < 1e-8);
    }

    #[test]
    fn g2_examples() {
        let s = MomentState::new(0.3, 0.3, zero());
        assert_eq!(g2_of_state(&s).unwrap(), 1.0);
        let s = MomentState::new(1.0, 1.0, Complex64::new(0.0, 1.0));
        assert_eq!(g2_of_state(&s).unwrap(), 2.0);
        assert!(matches!(g2_of_state(&MomentState::vacuum()), Err(Error::UndefinedG2)));
    }

    #[test]
    fn vacuum_duan_is_boundary() {
        let r = duan_parameter(&MomentState::vacuum(), zero(), zero());
        assert_eq!(r.duan_d, 2.0);
        assert!(!r.entangled);
        assert_eq!(r.phi21, 0.0);
        assert_eq!(r.g2, None);
    }

    #[test]
    fn coherent_duan_ignores_phase() {
        let a = Complex64::new(0.3, 0.0);
        let s = MomentState::new(0.09, 0.09, zero());
        let r = duan_parameter(&s, a, a);
        assert_eq!(r.g2, Some(1.0));
        assert_abs_diff_eq!(r.duan_d, 2.0 * (1.0 - 2.0 * 0.09), epsilon = 1e-15);
    }

    #[test]
    fn duan_forms_agree() {
        let s = MomentState::new(3.0, 3.0, Complex64::from_polar(3.2, 2.9));
        let r = duan_parameter(&s, zero(), zero());
        assert_abs_diff_eq!(r.duan_d, duan_vacuum(&s), epsilon = 1e-12);
        assert!(r.entangled);
    }

    #[test]
    fn window_examples() {
        let w = phase_window(1.0, 1.0, 5.0).unwrap();
        assert_abs_diff_eq!(w.lo, -0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(w.hi, -0.5, epsilon = 1e-15);
        let s = MomentState::new(1.0, 1.0, Complex64::new(2.0 * w.midpoint(), 0.0));
        assert_abs_diff_eq!(duan_vacuum(&s), 1.0, epsilon = 1e-12);
        assert!(matches!(phase_window(1.0, 1.0, 2.0), Err(Error::EmptyWindow { .. })));
    }

    #[test]
    fn window_collapses_for_large_occupation() {
        let g2 = 5.0;
        let w = phase_window(1e6, 1e6, g2).unwrap();
        let limit = -1.0 / (g2 - 1.0f64).sqrt();
        assert!((w.lo - limit).abs() < 1e-6 && (w.hi - limit).abs() < 1e-6);
        assert!(w.hi - w.lo < 1e-6);
    }

    #[test]
    fn clipped_window() {
        let w = phase_window(1.0, 1.0, 2.5).unwrap();
        assert!(w.lo < -1.0);
        assert_eq!(w.clipped_lo, -1.0);
        assert_eq!(w.clipped_hi, w.hi);
    }
}
