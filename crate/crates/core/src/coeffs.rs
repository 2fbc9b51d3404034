//! Gain, loss and pair-emission coefficients of the two-mode master equation.
//!
//! The dressed complex rates `T` use the cavity-frame convention: the
//! cavity-coupled coherences `a-c` and `d-b` carry no offset at double
//! resonance, and the Raman coherences inherit the control detuning along the
//! control leg (`T_bc = gamma_bc + i delta_c`, `T_ad = 2 gamma - i delta_c`).
//! The pump detuning enters only through the atomic steady state.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::atom::{solve_atom_steady_state, AtomSteadyState};
use crate::error::{Error, Result};
use crate::params::AtomParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedDenominators {
    pub t_ac: Complex64,
    pub t_ad: Complex64,
    pub t_bc: Complex64,
    pub t_db: Complex64,
    pub i_p: f64,
    pub i_c: f64,
    pub z: Complex64,
}

/// The eight atomic response elements `C_{alpha beta, gamma delta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrixElements {
    pub c_ac_ac: Complex64,
    pub c_ac_ad: Complex64,
    pub c_ac_bc: Complex64,
    pub c_ac_bd: Complex64,
    pub c_bd_ac: Complex64,
    pub c_bd_ad: Complex64,
    pub c_bd_bc: Complex64,
    pub c_bd_bd: Complex64,
}

/// Full parameterization of the two-mode master equation. The loss
/// coefficients already contain the cavity dampings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterCoefficients {
    pub c_loss1: Complex64,
    pub c_gain1: Complex64,
    pub c_loss2: Complex64,
    pub c_gain2: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
    pub c4: Complex64,
    pub kappa_s: f64,
    pub kappa_a: f64,
    pub phi: f64,
}

impl MasterCoefficients {
    /// Empty cavity: only damping.
    pub fn pure_loss(kappa_s: f64, kappa_a: f64, phi: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            c_loss1: Complex64::new(kappa_s, 0.0),
            c_gain1: zero,
            c_loss2: Complex64::new(kappa_a, 0.0),
            c_gain2: zero,
            c1: zero,
            c2: zero,
            c3: zero,
            c4: zero,
            kappa_s,
            kappa_a,
            phi,
        }
    }

    /// Asymptotic Raman-EIT coefficients: `C2 = -C4 = i xi` on top of damping.
    pub fn reit_limit(xi: f64, kappa_s: f64, kappa_a: f64, phi: f64) -> Self {
        let mut mc = Self::pure_loss(kappa_s, kappa_a, phi);
        mc.c2 = Complex64::new(0.0, xi);
        mc.c4 = Complex64::new(0.0, -xi);
        mc
    }

    /// `C1 + C3 - C2 - C4`; vanishes for any coefficient set built from an atom.
    pub fn c_relation_defect(&self) -> Complex64 {
        self.c1 + self.c3 - self.c2 - self.c4
    }

    /// Largest coefficient magnitude, used as the scale for relative checks.
    pub fn magnitude(&self) -> f64 {
        [
            self.c_loss1,
            self.c_gain1,
            self.c_loss2,
            self.c_gain2,
            self.c1,
            self.c2,
            self.c3,
            self.c4,
        ]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    /// Replaces the cavity dampings, keeping the atomic parts of the losses.
    pub fn with_kappa(mut self, kappa_s: f64, kappa_a: f64) -> Self {
        self.c_loss1 += kappa_s - self.kappa_s;
        self.c_loss2 += kappa_a - self.kappa_a;
        self.kappa_s = kappa_s;
        self.kappa_a = kappa_a;
        self
    }
}

/// Rate constants of the closed moment equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateConstants {
    pub k1: f64,
    pub k2: f64,
    pub k12: Complex64,
    /// `C1 - C2`
    pub c12: Complex64,
    /// `C3 - C2`
    pub c32: Complex64,
}

pub fn dressed_denominators(params: &AtomParams) -> DressedDenominators {
    let gamma = params.gamma;
    let t_ac = Complex64::new(gamma, 0.0);
    let t_db = Complex64::new(gamma, 0.0);
    let t_ad = Complex64::new(2.0 * gamma, -params.delta_c);
    let t_bc = Complex64::new(params.gamma_bc, params.delta_c);
    let i_p = params.omega_p * params.omega_p;
    let i_c = params.omega_c * params.omega_c;
    let (ac, ad, bc) = (t_ac.conj(), t_ad.conj(), t_bc.conj());
    let z = ac * ad * bc * t_db
        + i_p * ac * ad
        + i_p * bc * t_db
        + i_c * ac * bc
        + i_c * ad * t_db
        + (i_p - i_c) * (i_p - i_c);
    DressedDenominators {
        t_ac,
        t_ad,
        t_bc,
        t_db,
        i_p,
        i_c,
        z,
    }
}

pub fn c_matrix_elements(d: &DressedDenominators, params: &AtomParams) -> Result<CMatrixElements> {
    let scale = [d.t_ac.norm(), d.t_ad.norm(), d.t_bc.norm(), d.t_db.norm(), d.i_p, d.i_c]
        .iter()
        .fold(1.0f64, |m, x| m.max(*x));
    if d.z.norm() < 1e-300 * scale.powi(4) || !d.z.norm().is_finite() {
        return Err(Error::SingularZ {
            magnitude: d.z.norm(),
        });
    }
    let i = Complex64::i();
    let (om_p, om_c) = (params.omega_p, params.omega_c);
    let (ac, ad, bc, db) = (d.t_ac.conj(), d.t_ad.conj(), d.t_bc.conj(), d.t_db);
    let dip = d.i_p - d.i_c;
    let z = d.z;
    let cross = om_p * om_c * (bc + ad) / z;
    Ok(CMatrixElements {
        c_ac_ac: (ad * bc * db + d.i_p * ad + d.i_c * bc) / z,
        c_ac_ad: -i * om_p * (bc * db + dip) / z,
        c_ac_bc: -i * om_c * (-ad * db + dip) / z,
        c_ac_bd: cross,
        c_bd_ac: cross,
        c_bd_ad: -i * om_c * (-ac * bc + dip) / z,
        c_bd_bc: -i * om_p * (ac * ad + dip) / z,
        c_bd_bd: (ac * ad * bc + d.i_p * bc + d.i_c * ad) / z,
    })
}

pub fn master_coefficients(
    elems: &CMatrixElements,
    atom: &AtomSteadyState,
    params: &AtomParams,
) -> MasterCoefficients {
    let e = elems;
    let (p_aa, p_bb, p_cc, p_dd) = (atom.p_aa, atom.p_bb, atom.p_cc, atom.p_dd);
    let (p_ab, p_ba, p_cd, p_dc) = (atom.p_ab, atom.p_ba(), atom.p_cd, atom.p_dc());
    let gs2 = params.g_s * params.g_s;
    let ga2 = params.g_a * params.g_a;

    let c_loss1 = gs2 * (e.c_bd_ad * p_ab + e.c_bd_bd * p_bb) + params.kappa_s;
    let c_gain1 = gs2 * (e.c_bd_bd * p_dd + e.c_bd_bc * p_dc);
    let c_loss2 = ga2 * (e.c_ac_ac * p_cc + e.c_ac_ad * p_cd) + params.kappa_a;
    let c_gain2 = ga2 * (e.c_ac_ac * p_aa + e.c_ac_bc * p_ba);

    let j1 = e.c_bd_ac * p_cc + e.c_ac_bd.conj() * p_dd + (e.c_bd_ad + e.c_ac_bc.conj()) * p_cd;
    let j2 = e.c_bd_ac * p_aa + e.c_ac_bd.conj() * p_dd + e.c_bd_bc * p_ba + e.c_ac_bc.conj() * p_cd;
    let j3 = e.c_bd_ac * p_aa + e.c_ac_bd.conj() * p_bb + (e.c_bd_bc + e.c_ac_ad.conj()) * p_ba;
    let j4 = e.c_bd_ac * p_cc + e.c_ac_bd.conj() * p_bb + e.c_bd_ad * p_cd + e.c_ac_ad.conj() * p_ba;
    let g = params.g_a * params.g_s;

    MasterCoefficients {
        c_loss1,
        c_gain1,
        c_loss2,
        c_gain2,
        c1: g * j1,
        c2: g * j2,
        c3: g * j3,
        c4: g * j4,
        kappa_s: params.kappa_s,
        kappa_a: params.kappa_a,
        phi: params.phi,
    }
}

pub fn rate_constants(mc: &MasterCoefficients) -> RateConstants {
    RateConstants {
        k1: 2.0 * (mc.c_gain1 - mc.c_loss1).re,
        k2: 2.0 * (mc.c_gain2 - mc.c_loss2).re,
        k12: mc.c_gain2 + mc.c_gain1.conj() - (mc.c_loss2 + mc.c_loss1.conj()),
        c12: mc.c1 - mc.c2,
        c32: mc.c3 - mc.c2,
    }
}

/// Every intermediate of the atom-to-coefficients chain for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pipeline {
    pub params: AtomParams,
    pub atom: AtomSteadyState,
    pub denominators: DressedDenominators,
    pub elements: CMatrixElements,
    pub coefficients: MasterCoefficients,
    pub rates: RateConstants,
}

impl Pipeline {
    pub fn evaluate(params: &AtomParams) -> Result<Self> {
        let atom = solve_atom_steady_state(params, None)?;
        Self::with_atom(params, atom)
    }

    /// Runs the chain on an externally supplied atomic state.
    pub fn with_atom(params: &AtomParams, atom: AtomSteadyState) -> Result<Self> {
        params.validate()?;
        let denominators = dressed_denominators(params);
        let elements = c_matrix_elements(&denominators, params)?;
        let coefficients = master_coefficients(&elements, &atom, params);
        let rates = rate_constants(&coefficients);
        Ok(Self {
            params: *params,
            atom,
            denominators,
            elements,
            coefficients,
            rates,
        })
    }
}
