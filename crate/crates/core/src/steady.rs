//! Stationary moments: closed-form evaluation, an independent linear solve
//! of the drift system, and spectral stability.

use nalgebra::{Matrix4, Schur, Vector4};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::coeffs::{MasterCoefficients, RateConstants};
use crate::error::{Error, Result};
use crate::moments::{duan_parameter, DriftMatrix, EntanglementReport, MomentState};

/// Relative size of `M` below which the point is rejected as non-steady.
pub const SINGULAR_M: f64 = 1e-12;
/// Relative size of `M` below which a solution is flagged as marginal.
pub const BOUNDARY_M: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SteadyMoments {
    pub n1: f64,
    pub n2: f64,
    pub e_amplitude: Complex64,
    pub m_denominator: Complex64,
    /// `E e^{i phi}`
    pub w: Complex64,
    pub stable: bool,
    /// `|M|` is within `BOUNDARY_M` of zero relative to the coefficient scale.
    pub boundary: bool,
    pub drift_eigenvalues: [Complex64; 4],
}

impl SteadyMoments {
    pub fn state(&self) -> MomentState {
        MomentState::new(self.n1, self.n2, self.w)
    }

    pub fn duan_d(&self) -> f64 {
        2.0 * (1.0 + self.n1 + self.n2 + 2.0 * self.w.re)
    }

    /// `E e^{i phi} + c.c. < -(n1 + n2)`.
    pub fn necessary_condition(&self) -> bool {
        2.0 * self.w.re < -(self.n1 + self.n2)
    }
}

fn coefficient_scale(mc: &MasterCoefficients, rc: &RateConstants) -> f64 {
    [
        rc.k1.abs(),
        rc.k2.abs(),
        rc.k12.norm(),
        rc.c12.norm(),
        rc.c32.norm(),
        mc.c2.norm(),
        mc.c_gain1.norm(),
        mc.c_gain2.norm(),
    ]
    .iter()
    .fold(0.0, |m, x| m.max(*x))
}

fn classify_m(m: Complex64, scale: f64) -> Result<bool> {
    let s4 = scale.powi(4);
    if !(m.norm() > SINGULAR_M * s4) {
        return Err(Error::SingularM { magnitude: m.norm() });
    }
    Ok(m.norm() <= BOUNDARY_M * s4)
}

/// Stationary moments from the explicit rational formulas in `E`, `M` and
/// the coefficients.
pub fn steady_closed_form(mc: &MasterCoefficients, rc: &RateConstants) -> Result<SteadyMoments> {
    let (k1, k2, k12) = (rc.k1, rc.k2, rc.k12);
    let (c12, c32, c2) = (rc.c12, rc.c32, mc.c2);
    let (k12c, c12c, c32c, c2c) = (k12.conj(), c12.conj(), c32.conj(), c2.conj());
    let g1 = 2.0 * mc.c_gain1.re;
    let g2 = 2.0 * mc.c_gain2.re;

    let x = (k1 * k12c + k2 * k12) * (c12c * c32);
    let asym = c12 * c32c - c12c * c32;
    let m = x + x.conj() - asym * asym - k1 * k2 * k12 * k12c;
    let boundary = classify_m(m, coefficient_scale(mc, rc))?;

    let e = (-c32c * (k2 * k12c + c12c * c32 - c12 * c32c) * g1
        - c12c * (k1 * k12c + c12 * c32c - c12c * c32) * g2
        + c2c * (k1 * c12 * c32c + k2 * c32 * c12c)
        - c2c * k1 * k2 * k12c
        - c2 * c32c * c12c * (k1 + k2))
        / m;

    let k12_sq = (k12 * k12c).re;
    let k12_sum = 2.0 * k12.re;
    let y1 = c12c * c32 * k12c;
    let y2 = c32c * c12 * k12c;
    let a12 = c12c * c32;
    let a21 = c12 * c32c;

    let n1 = g1 * (k2 * k12_sq - (y1 + y1.conj())) / m
        + g2 * c12.norm_sqr() * k12_sum / m
        + c2c * c12 * (k2 * k12c + (a12 - a12.conj())) / m
        + c2 * c12c * (k2 * k12 + (a21 - a21.conj())) / m;
    let n2 = g2 * (k1 * k12_sq - (y2 + y2.conj())) / m
        + g1 * c32.norm_sqr() * k12_sum / m
        + c2c * c32 * (k1 * k12c + (a21 - a21.conj())) / m
        + c2 * c32c * (k1 * k12 + (a12 - a12.conj())) / m;

    let (stable, drift_eigenvalues) = classify_stability(mc, rc);
    Ok(SteadyMoments {
        n1: n1.re,
        n2: n2.re,
        e_amplitude: e,
        m_denominator: m,
        w: e * Complex64::from_polar(1.0, mc.phi),
        stable,
        boundary,
        drift_eigenvalues,
    })
}

/// Stationary point of the real 4x4 drift system by LU. `M` is reported as
/// minus the drift determinant.
pub fn steady_linear_solve(mc: &MasterCoefficients, rc: &RateConstants) -> Result<SteadyMoments> {
    let drift = DriftMatrix::new(mc, rc);
    let lu = drift.a.lu();
    let x: Vector4<f64> = lu.solve(&(-drift.b)).ok_or(Error::SingularDrift)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularDrift);
    }
    let residual = (drift.a * x + drift.b).amax();
    let scale = drift.a.amax() * x.amax() + drift.b.amax();
    if residual > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::SolverFailure { residual });
    }
    let m = Complex64::new(-lu.determinant(), 0.0);
    let boundary = classify_m(m, coefficient_scale(mc, rc)).unwrap_or(true);
    let w = Complex64::new(x[2], x[3]);
    let (stable, drift_eigenvalues) = classify_stability(mc, rc);
    Ok(SteadyMoments {
        n1: x[0],
        n2: x[1],
        e_amplitude: w * Complex64::from_polar(1.0, -mc.phi),
        m_denominator: m,
        w,
        stable,
        boundary,
        drift_eigenvalues,
    })
}

/// Eigenvalues of the drift matrix, sorted by decreasing real part; the
/// point is stable iff every real part is negative.
pub fn classify_stability(mc: &MasterCoefficients, rc: &RateConstants) -> (bool, [Complex64; 4]) {
    let mut out = eigenvalues4(&DriftMatrix::new(mc, rc).a);
    out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let stable = out.iter().all(|e| e.re < 0.0);
    (stable, out)
}

/// Eigenvalues of a real 4x4 matrix. The shifted QR iteration is capped;
/// where it stalls on tight clusters the characteristic polynomial is
/// solved by simultaneous Newton (Aberth) iteration instead.
pub fn eigenvalues4(a: &Matrix4<f64>) -> [Complex64; 4] {
    let shift = a.trace() / 4.0;
    let b = a - Matrix4::identity() * shift;
    let scale = b.amax();
    if scale == 0.0 || !scale.is_finite() {
        return [Complex64::new(shift + scale * 0.0, 0.0); 4];
    }
    let b = b / scale;
    let ev = match Schur::try_new(b, f64::EPSILON, 400) {
        Some(schur) => {
            let e = schur.complex_eigenvalues();
            [e[0], e[1], e[2], e[3]]
        }
        None => characteristic_roots(&b),
    };
    ev.map(|e| e * scale + shift)
}

fn characteristic_roots(a: &Matrix4<f64>) -> [Complex64; 4] {
    // Faddeev-LeVerrier: p(x) = x^4 + c[3] x^3 + c[2] x^2 + c[1] x + c[0].
    let mut c = [0.0; 4];
    let mut m = Matrix4::<f64>::zeros();
    let mut lead = 1.0;
    for k in 1..=4 {
        m = a * m + Matrix4::identity() * lead;
        lead = -(a * m).trace() / k as f64;
        c[4 - k] = lead;
    }
    let eval = |z: Complex64| {
        let (mut p, mut dp) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        for &ck in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + ck;
        }
        (p, dp)
    };
    let radius = 1.0 + c.iter().fold(0.0f64, |r, x| r.max(x.abs()));
    let mut z: [Complex64; 4] =
        core::array::from_fn(|k| Complex64::from_polar(radius, 0.4 + k as f64 * core::f64::consts::FRAC_PI_2));
    for _ in 0..500 {
        let mut largest = 0.0f64;
        for i in 0..4 {
            let (p, dp) = eval(z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..4).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                largest = largest.max(step.norm());
            }
        }
        if largest <= 4.0 * f64::EPSILON * radius {
            break;
        }
    }
    z
}

/// Slowest relaxation rate `-max Re(lambda)`; positive for stable points.
pub fn relaxation_rate(sm: &SteadyMoments) -> f64 {
    -sm.drift_eigenvalues[0].re
}

pub fn entanglement_verdict(sm: &SteadyMoments) -> Result<EntanglementReport> {
    if !sm.stable {
        return Err(Error::DisregardedUnstable);
    }
    let mut report = duan_parameter(&sm.state(), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    report.stable = Some(true);
    Ok(report)
}
