//! Limiting schemes: Raman-EIT (strong resonant control, weak far-detuned
//! pump) and the symmetric double-resonant Raman configuration.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::atom::{solve_atom_steady_state, AtomSteadyState};
use crate::coeffs::{rate_constants, MasterCoefficients, Pipeline};
use crate::error::{Error, Result};
use crate::params::AtomParams;
use crate::steady::classify_stability;

/// Soft ratio used to flag parameters outside the Raman-EIT regime.
pub const REIT_RATIO: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiEstimate {
    pub xi: f64,
    /// `false` when `omega_c < 5 omega_p` or `|delta| < 5 omega_c`.
    pub in_regime: bool,
}

/// Effective squeezing rate `g_a g_s Wp Wc / (delta (gamma gamma_bc + Wc^2))`
/// with `delta` the pump detuning.
pub fn reit_xi(params: &AtomParams) -> Result<XiEstimate> {
    params.validate()?;
    let delta = params.delta_p;
    if delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    let (wp, wc) = (params.omega_p, params.omega_c);
    let den = delta * (params.gamma * params.gamma_bc + wc * wc);
    let xi = if wp == 0.0 {
        0.0
    } else if den == 0.0 {
        return Err(Error::InvalidParams {
            name: "omega_c",
            reason: "control field and ground dephasing both vanish",
        });
    } else {
        params.g_a * params.g_s * wp * wc / den
    };
    Ok(XiEstimate {
        xi,
        in_regime: wc >= REIT_RATIO * wp && delta.abs() >= REIT_RATIO * wc,
    })
}

/// Sign case of the Raman-EIT entanglement condition. "Overdamped" means
/// `kappa_a kappa_s > xi^2`; a zero `xi` counts as positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ReitCase {
    /// Entangled where `q sin(theta) > xi`.
    NegativeUnderdamped,
    /// Entangled where `q sin(theta) < xi`.
    NegativeOverdamped,
    /// Entangled where `xi > q sin(theta)`.
    PositiveUnderdamped,
    /// Entangled where `xi < q sin(theta)`.
    PositiveOverdamped,
}

impl ReitCase {
    pub fn classify(xi: f64, gap: f64) -> Self {
        match (xi < 0.0, gap > 0.0) {
            (true, false) => Self::NegativeUnderdamped,
            (true, true) => Self::NegativeOverdamped,
            (false, false) => Self::PositiveUnderdamped,
            (false, true) => Self::PositiveOverdamped,
        }
    }

    /// Whether `q sin(theta)` (with `q = 2 ka ks / (ks + ka)`) satisfies the
    /// case's entangling inequality.
    pub fn admits(self, xi: f64, q_sin: f64) -> bool {
        match self {
            Self::NegativeUnderdamped | Self::PositiveOverdamped => q_sin > xi,
            Self::NegativeOverdamped | Self::PositiveUnderdamped => q_sin < xi,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::NegativeUnderdamped => "negative-underdamped",
            Self::NegativeOverdamped => "negative-overdamped",
            Self::PositiveUnderdamped => "positive-underdamped",
            Self::PositiveOverdamped => "positive-overdamped",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReitAnalysis {
    pub xi: f64,
    /// `kappa_a kappa_s - xi^2`
    pub kappa_product_gap: f64,
    pub n1: f64,
    pub n2: f64,
    pub w: Complex64,
    pub w_magnitude: f64,
    pub condition_lhs: f64,
    pub duan_d: f64,
    pub entangled: bool,
    pub stable: bool,
    pub case: ReitCase,
}

/// Closed-form Raman-EIT steady state for an explicit `xi`.
pub fn reit_analyze_xi(xi: f64, kappa_s: f64, kappa_a: f64, theta_t: f64) -> Result<ReitAnalysis> {
    if !(kappa_s > 0.0 && kappa_a > 0.0) || !xi.is_finite() || !theta_t.is_finite() {
        return Err(Error::InvalidParams {
            name: "reit",
            reason: "dampings must be positive and all inputs finite",
        });
    }
    let kk = kappa_a * kappa_s;
    let gap = kk - xi * xi;
    if gap.abs() <= 1e-12 * kk.max(xi * xi) {
        return Err(Error::PoleAtXiSquared);
    }
    let ksum = kappa_s + kappa_a;
    let den = ksum * gap;
    let n1 = xi * xi * kappa_a / den;
    let n2 = xi * xi * kappa_s / den;
    let w = Complex64::from_polar(1.0, theta_t) * Complex64::new(0.0, xi) * (kk / den);
    let q_sin = 2.0 * kk / ksum * theta_t.sin();
    let condition_lhs = xi * (xi - q_sin) / gap;
    let case = ReitCase::classify(xi, gap);
    Ok(ReitAnalysis {
        xi,
        kappa_product_gap: gap,
        n1,
        n2,
        w,
        w_magnitude: xi.abs() * kk / den.abs(),
        condition_lhs,
        duan_d: 2.0 * (1.0 + n1 + n2 + 2.0 * w.re),
        entangled: condition_lhs < 0.0,
        stable: gap > 0.0,
        case,
    })
}

/// Raman-EIT analysis with `xi` estimated from the laser parameters.
pub fn reit_analyze(params: &AtomParams, theta_t: f64) -> Result<ReitAnalysis> {
    let xi = reit_xi(params)?.xi;
    reit_analyze_xi(xi, params.kappa_s, params.kappa_a, theta_t)
}

/// Equal dampings `sqrt(safety |C2|^2)`, with `C2` from the full
/// coefficient chain.
pub fn reit_tune_kappa(params: &AtomParams, safety: f64) -> Result<(f64, f64)> {
    let c2 = Pipeline::evaluate(params)?.coefficients.c2;
    tune_for_rate(c2.norm(), safety)
}

/// Equal dampings `sqrt(safety) |xi|`.
pub fn tune_for_rate(rate: f64, safety: f64) -> Result<(f64, f64)> {
    if !(safety > 1.0) || !safety.is_finite() {
        return Err(Error::InvalidParams {
            name: "safety",
            reason: "must be finite and exceed 1",
        });
    }
    let kappa = (safety * rate * rate).sqrt();
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParams {
            name: "safety",
            reason: "pair-emission rate vanishes",
        });
    }
    Ok((kappa, kappa))
}

/// Resonant symmetric coefficients expressed through the dressed rates and
/// populations only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrrCoefficients {
    pub c1: f64,
    pub c2: f64,
    /// `C1 - C2 = C3 - C2`
    pub c12: f64,
    pub c_loss: f64,
    pub c_gain: f64,
    pub z: f64,
}

impl DrrCoefficients {
    pub fn new(params: &AtomParams, atom: &AtomSteadyState) -> Result<Self> {
        require_symmetric(params)?;
        let gamma = params.gamma;
        let t_bc = params.gamma_bc;
        let t_ad = 2.0 * gamma;
        let i = params.omega_p * params.omega_p;
        let z = gamma * (t_ad * t_bc * gamma + 2.0 * i * (t_ad + t_bc));
        if !(z.abs() > 0.0) {
            return Err(Error::SingularZ { magnitude: z.abs() });
        }
        let (p_aa, p_bb, p_cc, p_dd) = (atom.p_aa, atom.p_bb, atom.p_cc, atom.p_dd);
        let ga_gs = params.g_a * params.g_s;
        let gs2 = params.g_s * params.g_s;
        Ok(Self {
            c1: ga_gs * i / z * 2.0 * (t_bc * p_cc + t_ad * p_aa),
            c2: ga_gs * i / z * 2.0 * (t_bc * p_aa + t_ad * (2.0 * p_aa - p_cc)),
            c12: ga_gs * i * (t_bc + t_ad) / z * 2.0 * (p_cc - p_aa),
            c_loss: gs2 * (i * t_bc / z * p_aa + t_ad * (gamma * t_bc + i) / z * p_bb) + params.kappa_s,
            c_gain: gs2 * (t_bc * (gamma * t_ad + i) / z * p_dd + i * t_ad / z * p_cc),
            z,
        })
    }

    pub fn master(&self, phi: f64, kappa: f64) -> MasterCoefficients {
        let c = |x: f64| Complex64::new(x, 0.0);
        MasterCoefficients {
            c_loss1: c(self.c_loss),
            c_gain1: c(self.c_gain),
            c_loss2: c(self.c_loss),
            c_gain2: c(self.c_gain),
            c1: c(self.c1),
            c2: c(self.c2),
            c3: c(self.c1),
            c4: c(2.0 * self.c1 - self.c2),
            kappa_s: kappa,
            kappa_a: kappa,
            phi,
        }
    }
}

fn require_symmetric(params: &AtomParams) -> Result<()> {
    params.validate()?;
    if !params.is_symmetric_drr() {
        return Err(Error::InvalidParams {
            name: "drr",
            reason: "requires equal Rabi frequencies, zero detunings and equal dampings",
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DrrAnalysis {
    pub n_mean: f64,
    pub w: Complex64,
    /// `xi` with `<a1 a2> = -e^{i theta} xi`.
    pub xi_bracket: f64,
    pub duan_d: f64,
    /// `n1 + n2 < 2 xi cos(theta)`
    pub condition: bool,
    pub steady_exists: bool,
}

/// Steady state of a symmetric resonant configuration at phase `theta_t`.
pub fn drr_analyze(params: &AtomParams, theta_t: f64) -> Result<DrrAnalysis> {
    require_symmetric(params)?;
    let atom = solve_atom_steady_state(params, None)?;
    let coeffs = DrrCoefficients::new(params, &atom)?;
    drr_evaluate(&coeffs, params.kappa_s, theta_t)
}

/// Same as [`drr_analyze`] for precomputed coefficients.
pub fn drr_evaluate(coeffs: &DrrCoefficients, kappa: f64, theta_t: f64) -> Result<DrrAnalysis> {
    let mc = coeffs.master(theta_t, kappa);
    let (stable, _) = classify_stability(&mc, &rate_constants(&mc));
    if !stable {
        return Err(Error::NonSteady);
    }
    let d = coeffs.c_gain - coeffs.c_loss;
    let den = coeffs.c12 * coeffs.c12 - d * d;
    let n_mean = (coeffs.c_gain * d + 0.5 * coeffs.c2 * coeffs.c12) / den;
    let xi_bracket =
        (coeffs.c1 * coeffs.c_gain - 0.5 * coeffs.c2 * (coeffs.c_gain + coeffs.c_loss)) / den;
    let w = -Complex64::from_polar(xi_bracket, theta_t);
    Ok(DrrAnalysis {
        n_mean,
        w,
        xi_bracket,
        duan_d: 2.0 * (1.0 + 2.0 * n_mean + 2.0 * w.re),
        condition: 2.0 * n_mean < 2.0 * xi_bracket * theta_t.cos(),
        steady_exists: true,
    })
}

/// Strong-drive limit (`p_aa = p_cc = 1/4`, no ground dephasing):
/// `(n, D)` with `n = g^2 / (8 gamma kappa)`.
pub fn drr_strong_field_limit(g: f64, gamma: f64, kappa: f64, theta_t: f64) -> (f64, f64) {
    let r = g * g / (2.0 * gamma * kappa);
    let s = (0.5 * theta_t).sin();
    (r / 4.0, 2.0 * (1.0 + r * s * s))
}

/// Weak-drive limit (`p_cc = 1/2`, `p_aa = 0`, no ground dephasing):
/// `(n, D)` with `n = (g^2 / 4 gamma) / (kappa - g^2 / 2 gamma)`. Here the
/// pair correlation is `+n e^{i theta}`, so `D = 2 (1 + 4 n cos^2(theta/2))`.
pub fn drr_weak_field_limit(g: f64, gamma: f64, kappa: f64, theta_t: f64) -> Result<(f64, f64)> {
    let g2 = g * g;
    if !(kappa > g2 / (2.0 * gamma)) {
        return Err(Error::NonSteady);
    }
    let n = g2 / (4.0 * gamma) / (kappa - g2 / (2.0 * gamma));
    let c = (0.5 * theta_t).cos();
    Ok((n, 2.0 * (1.0 + 4.0 * n * c * c)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrrGrid {
    pub omegas: Vec<f64>,
    pub kappas: Vec<f64>,
    pub thetas: Vec<f64>,
    pub gamma_bcs: Vec<f64>,
    pub gamma: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrrScanPoint {
    pub omega: f64,
    pub kappa: f64,
    pub theta: f64,
    pub gamma_bc: f64,
    pub analysis: Option<DrrAnalysis>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrrScanReport {
    pub points: Vec<DrrScanPoint>,
    pub stable_points: usize,
    /// Stable point with the smallest Duan parameter.
    pub min_duan: Option<DrrScanPoint>,
    /// Stable points with `D < 2 - 1e-9`.
    pub violations: usize,
}

/// Evaluates every grid point in (gamma_bc, omega, kappa, theta) order.
pub fn drr_no_entanglement_scan(grid: &DrrGrid) -> Result<DrrScanReport> {
    let mut points = Vec::new();
    for &gamma_bc in &grid.gamma_bcs {
        for &omega in &grid.omegas {
            let base = AtomParams {
                omega_p: omega,
                omega_c: omega,
                gamma: grid.gamma,
                gamma_bc,
                g_s: grid.g,
                g_a: grid.g,
                ..AtomParams::default()
            };
            let atom = solve_atom_steady_state(&base, None)?;
            for &kappa in &grid.kappas {
                let coeffs = DrrCoefficients::new(&base.with_kappa(kappa, kappa), &atom)?;
                for &theta in &grid.thetas {
                    let analysis = match drr_evaluate(&coeffs, kappa, theta) {
                        Ok(a) => Some(a),
                        Err(Error::NonSteady) => None,
                        Err(e) => return Err(e),
                    };
                    points.push(DrrScanPoint {
                        omega,
                        kappa,
                        theta,
                        gamma_bc,
                        analysis,
                    });
                }
            }
        }
    }
    let stable: Vec<&DrrScanPoint> = points.iter().filter(|p| p.analysis.is_some()).collect();
    let duan = |p: &DrrScanPoint| p.analysis.map_or(f64::INFINITY, |a| a.duan_d);
    let min_duan = stable.iter().copied().min_by(|a, b| duan(a).total_cmp(&duan(b))).copied();
    let violations = stable.iter().filter(|p| duan(p) < 2.0 - 1e-9).count();
    Ok(DrrScanReport {
        stable_points: stable.len(),
        points,
        min_duan,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn xi_examples() {
        let x = reit_xi(&AtomParams::reit(1.0, 25.0, 40.0)).unwrap();
        assert_relative_eq!(x.xi, 0.001, max_relative = 1e-14);
        assert!(!x.in_regime);
        assert!(reit_xi(&AtomParams::reit(1.0, 25.0, 200.0)).unwrap().in_regime);
        let x = reit_xi(&AtomParams::reit(1.0, 25.0, -40.0)).unwrap();
        assert_relative_eq!(x.xi, -0.001, max_relative = 1e-14);
        assert_eq!(reit_xi(&AtomParams::reit(0.0, 25.0, 40.0)).unwrap().xi, 0.0);
        assert!(matches!(reit_xi(&AtomParams::reit(1.0, 25.0, 0.0)), Err(Error::ZeroDetuning)));
    }

    #[test]
    fn xi_regime_warning() {
        assert!(!reit_xi(&AtomParams::reit(1.0, 3.0, 40.0)).unwrap().in_regime);
        assert!(!reit_xi(&AtomParams::reit(1.0, 25.0, 60.0)).unwrap().in_regime);
    }

    #[test]
    fn macroscopic_point() {
        let k = 1.01f64.sqrt();
        let a = reit_analyze_xi(1.0, k, k, FRAC_PI_2).unwrap();
        assert_relative_eq!(a.n1, 50.0, max_relative = 1e-12);
        assert_relative_eq!(a.n2, 50.0, max_relative = 1e-12);
        assert!(a.condition_lhs < 0.0 && a.entangled);
        assert_relative_eq!(a.duan_d, 2.0 * k / (k + 1.0), max_relative = 1e-12);
        assert_eq!(a.case, ReitCase::PositiveOverdamped);
    }

    #[test]
    fn condition_zero_is_duan_boundary() {
        let k = 1.01f64.sqrt();
        let theta = (1.0 * 2.0 * k / (2.0 * k * k)).asin();
        let a = reit_analyze_xi(1.0, k, k, theta).unwrap();
        assert!(a.condition_lhs.abs() < 1e-12);
        assert!((a.duan_d - 2.0).abs() < 1e-10);
    }

    #[test]
    fn photon_ratio_follows_dampings() {
        let a = reit_analyze_xi(0.3, 0.5, 0.9, 1.0).unwrap();
        assert_relative_eq!(a.n1 / a.n2, 0.9 / 0.5, max_relative = 1e-14);
    }

    #[test]
    fn four_cases() {
        // (xi, kappa, theta) chosen so each case's inequality holds
        let cases = [
            (-1.0, 0.5, FRAC_PI_2, ReitCase::NegativeUnderdamped),
            (-0.5, 1.0, -FRAC_PI_2, ReitCase::NegativeOverdamped),
            (1.0, 0.5, -FRAC_PI_2, ReitCase::PositiveUnderdamped),
            (0.5, 1.0, FRAC_PI_2, ReitCase::PositiveOverdamped),
        ];
        for (xi, k, theta, case) in cases {
            let a = reit_analyze_xi(xi, k, k, theta).unwrap();
            assert_eq!(a.case, case);
            assert!(case.admits(xi, k * theta.sin()));
            assert!(a.entangled, "{}", case.label());
            assert_eq!(a.duan_d < 2.0, a.entangled);
        }
    }

    #[test]
    fn pole_is_rejected() {
        assert!(matches!(reit_analyze_xi(1.0, 1.0, 1.0, 0.0), Err(Error::PoleAtXiSquared)));
    }

    #[test]
    fn tuning() {
        let (ks, ka) = tune_for_rate(1.0, 1.01).unwrap();
        assert_eq!(ks, ka);
        assert_relative_eq!(ks, 1.01f64.sqrt(), max_relative = 1e-15);
        assert!(tune_for_rate(1.0, 1.0).is_err());
        let n = |s: f64| {
            let (k, _) = tune_for_rate(1.0, s).unwrap();
            reit_analyze_xi(1.0, k, k, FRAC_PI_2).unwrap().n1
        };
        assert_relative_eq!(n(1.001), 500.0, max_relative = 1e-9);
        assert!(n(1e8) < 1e-7);
    }

    #[test]
    fn pipeline_tuning_uses_pair_rate() {
        let p = AtomParams::reit(1.0, 40.0, 40.0);
        let (k, _) = reit_tune_kappa(&p, 1.01).unwrap();
        let c2 = Pipeline::evaluate(&p).unwrap().coefficients.c2.norm();
        assert_relative_eq!(k * k, 1.01 * c2 * c2, max_relative = 1e-14);
    }

    #[test]
    fn strong_field_drr() {
        let p = AtomParams::drr(100.0, 0.5);
        let a = drr_analyze(&p, PI).unwrap();
        let (n, d) = drr_strong_field_limit(1.0, 1.0, 0.5, PI);
        assert_eq!((n, d), (0.25, 4.0));
        assert!((a.n_mean - n).abs() < 0.02 * n);
        assert!((a.duan_d - d).abs() < 0.02 * d);
        let a0 = drr_analyze(&p, 0.0).unwrap();
        assert!((a0.duan_d - 2.0).abs() < 0.02 * 2.0);
        assert!(!a.condition && !a0.condition);
    }

    #[test]
    fn weak_field_drr() {
        let p = AtomParams::drr(0.1, 1.0);
        let a = drr_analyze(&p, 0.0).unwrap();
        let (n, d0) = drr_weak_field_limit(1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(n, 0.5);
        assert_eq!(d0, 6.0);
        assert!((a.n_mean - n).abs() < 0.05 * n);
        assert!((a.duan_d - d0).abs() < 0.05 * d0);
        assert!(matches!(drr_analyze(&AtomParams::drr(0.1, 0.4), 0.0), Err(Error::NonSteady)));
        assert!(drr_weak_field_limit(1.0, 1.0, 0.4, 0.0).is_err());
    }

    #[test]
    fn drr_requires_symmetry() {
        let p = AtomParams { delta_p: 1.0, ..AtomParams::drr(1.0, 1.0) };
        assert!(drr_analyze(&p, 0.0).is_err());
    }

    #[test]
    fn closed_resonant_coefficients_match_pipeline() {
        for gamma_bc in [0.0, 0.4] {
            for omega in [0.1, 2.0, 30.0] {
                let p = AtomParams::drr(omega, 0.7).with_gamma_bc(gamma_bc);
                let pipe = Pipeline::evaluate(&p).unwrap();
                let d = DrrCoefficients::new(&p, &pipe.atom).unwrap();
                let mc = pipe.coefficients;
                for (a, b) in [
                    (mc.c1, d.c1),
                    (mc.c2, d.c2),
                    (mc.c1 - mc.c2, d.c12),
                    (mc.c3 - mc.c2, d.c12),
                    (mc.c_loss1, d.c_loss),
                    (mc.c_loss2, d.c_loss),
                    (mc.c_gain1, d.c_gain),
                    (mc.c_gain2, d.c_gain),
                ] {
                    assert!((a - b).norm() < 1e-10, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn small_scan_has_no_violation() {
        let grid = DrrGrid {
            omegas: alloc::vec![0.1, 1.0, 10.0],
            kappas: alloc::vec![0.3, 1.0, 5.0],
            thetas: (0..8).map(|k| k as f64 * PI / 4.0).collect(),
            gamma_bcs: alloc::vec![0.0, 0.5],
            gamma: 1.0,
            g: 1.0,
        };
        let r = drr_no_entanglement_scan(&grid).unwrap();
        assert_eq!(r.points.len(), 3 * 3 * 8 * 2);
        assert!(r.stable_points > 0);
        assert_eq!(r.violations, 0);
        assert!(r.min_duan.unwrap().analysis.unwrap().duan_d >= 2.0 - 1e-9);
    }
}
