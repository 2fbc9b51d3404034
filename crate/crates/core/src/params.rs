//! Physical parameters of the driven atom and the two-mode cavity.
//!
//! All rates, detunings and Rabi frequencies are expressed in units of the
//! radiative coherence-decay scale `gamma` (normally set to 1).

use crate::error::{Error, Result};

/// Lasers, detunings, decoherence, couplings, cavity dampings and the
/// controllable phase `phi = phi_p + phi_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AtomParams {
    /// Pump Rabi frequency (c <-> d).
    pub omega_p: f64,
    /// Control Rabi frequency (b <-> a).
    pub omega_c: f64,
    pub delta_p: f64,
    pub delta_c: f64,
    pub gamma: f64,
    /// Pure dephasing of the ground-state b-c coherence.
    pub gamma_bc: f64,
    /// Stokes mode coupling (d <-> b).
    pub g_s: f64,
    /// Anti-Stokes mode coupling (a <-> c).
    pub g_a: f64,
    pub kappa_s: f64,
    pub kappa_a: f64,
    /// Effective laser phase in radians.
    pub phi: f64,
}

impl Default for AtomParams {
    fn default() -> Self {
        Self {
            omega_p: 1.0,
            omega_c: 1.0,
            delta_p: 0.0,
            delta_c: 0.0,
            gamma: 1.0,
            gamma_bc: 0.0,
            g_s: 1.0,
            g_a: 1.0,
            kappa_s: 1.0,
            kappa_a: 1.0,
            phi: 0.0,
        }
    }
}

impl AtomParams {
    /// Raman-EIT operating point: weak far-detuned pump, strong resonant control.
    pub fn reit(omega_p: f64, omega_c: f64, delta_p: f64) -> Self {
        Self {
            omega_p,
            omega_c,
            delta_p,
            delta_c: 0.0,
            ..Self::default()
        }
    }

    /// Symmetric double-resonant Raman point (`omega_p = omega_c`, zero detunings,
    /// equal cavity dampings).
    pub fn drr(omega: f64, kappa: f64) -> Self {
        Self {
            omega_p: omega,
            omega_c: omega,
            kappa_s: kappa,
            kappa_a: kappa,
            ..Self::default()
        }
    }

    pub fn with_kappa(mut self, kappa_s: f64, kappa_a: f64) -> Self {
        self.kappa_s = kappa_s;
        self.kappa_a = kappa_a;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_gamma_bc(mut self, gamma_bc: f64) -> Self {
        self.gamma_bc = gamma_bc;
        self
    }

    pub fn with_couplings(mut self, g_s: f64, g_a: f64) -> Self {
        self.g_s = g_s;
        self.g_a = g_a;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_p", self.omega_p),
            ("omega_c", self.omega_c),
            ("delta_p", self.delta_p),
            ("delta_c", self.delta_c),
            ("gamma", self.gamma),
            ("gamma_bc", self.gamma_bc),
            ("g_s", self.g_s),
            ("g_a", self.g_a),
            ("kappa_s", self.kappa_s),
            ("kappa_a", self.kappa_a),
            ("phi", self.phi),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParams {
                    name,
                    reason: "must be finite",
                });
            }
        }
        let rates = [
            ("omega_p", self.omega_p),
            ("omega_c", self.omega_c),
            ("gamma_bc", self.gamma_bc),
            ("g_s", self.g_s),
            ("g_a", self.g_a),
        ];
        for (name, value) in rates {
            if value < 0.0 {
                return Err(Error::InvalidParams {
                    name,
                    reason: "must be non-negative",
                });
            }
        }
        let positive = [
            ("gamma", self.gamma),
            ("kappa_s", self.kappa_s),
            ("kappa_a", self.kappa_a),
        ];
        for (name, value) in positive {
            if value <= 0.0 {
                return Err(Error::InvalidParams {
                    name,
                    reason: "must be strictly positive",
                });
            }
        }
        Ok(())
    }

    /// True for the symmetric resonant configuration handled by the
    /// double-resonant Raman closed forms.
    pub fn is_symmetric_drr(&self) -> bool {
        let scale = self.omega_p.abs().max(self.omega_c.abs()).max(1e-300);
        (self.omega_p - self.omega_c).abs() <= 1e-12 * scale
            && self.delta_p == 0.0
            && self.delta_c == 0.0
            && (self.kappa_s - self.kappa_a).abs() <= 1e-12 * self.kappa_s.max(self.kappa_a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        AtomParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_rates() {
        let p = AtomParams {
            kappa_s: 0.0,
            ..AtomParams::default()
        };
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParams { name: "kappa_s", .. })
        ));
        let p = AtomParams {
            gamma_bc: -0.1,
            ..AtomParams::default()
        };
        assert!(p.validate().is_err());
        let p = AtomParams {
            delta_p: f64::NAN,
            ..AtomParams::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn negative_detuning_is_allowed() {
        AtomParams::reit(1.0, 25.0, -40.0).validate().unwrap();
    }

    #[test]
    fn drr_preset_is_symmetric() {
        assert!(AtomParams::drr(3.0, 0.5).is_symmetric_drr());
        assert!(!AtomParams::reit(1.0, 25.0, 40.0).is_symmetric_drr());
    }
}
