//! Laser-driven four-level double-Lambda atom.
//!
//! Level topology: ground `c`, pump `c <-> d`, Stokes mode `d <-> b`,
//! control `b <-> a`, anti-Stokes mode `a <-> c`. Each upper level (`a`, `d`)
//! decays with population rate `gamma` into each of `b` and `c`; the `b-c`
//! coherence additionally dephases at `gamma_bc`. Cavity backaction is not
//! part of this solve.
//!
//! The rotating frame puts `c` and `b` at zero energy, `d` at `-delta_p` and
//! `a` at `-delta_c`, so that `rho_cd` relaxes at `gamma + i delta_p` and
//! `rho_ba` at `gamma + i delta_c`.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::AtomParams;

pub const LEVEL_A: usize = 0;
pub const LEVEL_B: usize = 1;
pub const LEVEL_C: usize = 2;
pub const LEVEL_D: usize = 3;

/// 4x4 density matrix indexed by `LEVEL_*`.
pub type DensityMatrix4 = [[Complex64; 4]; 4];

/// Liouvillian over the row-major vectorized density matrix,
/// `vec(rho)[4 i + j] = rho[i][j]`.
pub type BlochGenerator = SMatrix<Complex64, 16, 16>;

const RESIDUAL_TOL: f64 = 1e-10;

#[inline]
pub fn vec_index(i: usize, j: usize) -> usize {
    4 * i + j
}

/// Steady populations and the laser-driven coherences of the atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSteadyState {
    pub p_aa: f64,
    pub p_bb: f64,
    pub p_cc: f64,
    pub p_dd: f64,
    pub p_ab: Complex64,
    pub p_cd: Complex64,
}

impl AtomSteadyState {
    pub fn p_ba(&self) -> Complex64 {
        self.p_ab.conj()
    }

    pub fn p_dc(&self) -> Complex64 {
        self.p_cd.conj()
    }

    pub fn trace(&self) -> f64 {
        self.p_aa + self.p_bb + self.p_cc + self.p_dd
    }

    fn from_density(rho: &DensityMatrix4) -> Self {
        Self {
            p_aa: rho[LEVEL_A][LEVEL_A].re,
            p_bb: rho[LEVEL_B][LEVEL_B].re,
            p_cc: rho[LEVEL_C][LEVEL_C].re,
            p_dd: rho[LEVEL_D][LEVEL_D].re,
            p_ab: rho[LEVEL_A][LEVEL_B],
            p_cd: rho[LEVEL_C][LEVEL_D],
        }
    }
}

fn hamiltonian(params: &AtomParams) -> DensityMatrix4 {
    let mut h = [[Complex64::new(0.0, 0.0); 4]; 4];
    h[LEVEL_C][LEVEL_D] = Complex64::new(-params.omega_p, 0.0);
    h[LEVEL_D][LEVEL_C] = Complex64::new(-params.omega_p, 0.0);
    h[LEVEL_B][LEVEL_A] = Complex64::new(-params.omega_c, 0.0);
    h[LEVEL_A][LEVEL_B] = Complex64::new(-params.omega_c, 0.0);
    h[LEVEL_D][LEVEL_D] = Complex64::new(-params.delta_p, 0.0);
    h[LEVEL_A][LEVEL_A] = Complex64::new(-params.delta_c, 0.0);
    h
}

/// Right-hand side of the optical Bloch equations applied to `rho`.
pub fn bloch_rhs(params: &AtomParams, rho: &DensityMatrix4) -> DensityMatrix4 {
    let zero = Complex64::new(0.0, 0.0);
    let h = hamiltonian(params);
    let mut out = [[zero; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut commutator = zero;
            for k in 0..4 {
                commutator += h[i][k] * rho[k][j] - rho[i][k] * h[k][j];
            }
            out[i][j] = -Complex64::i() * commutator;
        }
    }
    // Spontaneous emission: each upper level feeds both ground levels at `gamma`.
    let gamma = params.gamma;
    for upper in [LEVEL_A, LEVEL_D] {
        for lower in [LEVEL_B, LEVEL_C] {
            out[lower][lower] += gamma * rho[upper][upper];
            for j in 0..4 {
                out[upper][j] -= 0.5 * gamma * rho[upper][j];
                out[j][upper] -= 0.5 * gamma * rho[j][upper];
            }
        }
    }
    out[LEVEL_B][LEVEL_C] -= params.gamma_bc * rho[LEVEL_B][LEVEL_C];
    out[LEVEL_C][LEVEL_B] -= params.gamma_bc * rho[LEVEL_C][LEVEL_B];
    out
}

/// Builds the 16x16 generator column by column from the action on basis
/// matrices `|i><j|`.
pub fn build_bloch_generator(params: &AtomParams) -> BlochGenerator {
    let zero = Complex64::new(0.0, 0.0);
    let mut generator = BlochGenerator::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let mut basis = [[zero; 4]; 4];
            basis[i][j] = Complex64::new(1.0, 0.0);
            let image = bloch_rhs(params, &basis);
            let col = vec_index(i, j);
            for k in 0..4 {
                for l in 0..4 {
                    generator[(vec_index(k, l), col)] = image[k][l];
                }
            }
        }
    }
    generator
}

/// Number of (numerically) zero singular values of the generator.
pub fn kernel_dimension(generator: &BlochGenerator) -> usize {
    let sv = generator.singular_values();
    let max = sv.max();
    sv.iter().filter(|&&s| s <= 1e-10 * max.max(1.0)).count()
}

/// Steady state of the laser-driven atom.
///
/// With no laser drive the steady state depends on where the atom started;
/// `initial` then selects it. With any drive present `initial` is ignored.
pub fn solve_atom_steady_state(
    params: &AtomParams,
    initial: Option<&DensityMatrix4>,
) -> Result<AtomSteadyState> {
    params.validate()?;
    let generator = build_bloch_generator(params);
    let dim = kernel_dimension(&generator);
    if dim > 1 {
        return match initial {
            Some(rho0) if params.omega_p == 0.0 && params.omega_c == 0.0 => {
                Ok(undriven_limit(rho0))
            }
            _ => Err(Error::DegenerateKernel { dim }),
        };
    }

    // Bordered system [[L, t], [t^T, 0]] [x; mu] = [0; 1] with t = vec(identity).
    // Trace preservation puts t in the left kernel of L, so the border is
    // nonsingular exactly when the kernel is one-dimensional.
    let mut bordered = SMatrix::<Complex64, 17, 17>::zeros();
    bordered
        .fixed_view_mut::<16, 16>(0, 0)
        .copy_from(&generator);
    for d in 0..4 {
        bordered[(vec_index(d, d), 16)] = Complex64::new(1.0, 0.0);
        bordered[(16, vec_index(d, d))] = Complex64::new(1.0, 0.0);
    }
    let mut rhs = SVector::<Complex64, 17>::zeros();
    rhs[16] = Complex64::new(1.0, 0.0);
    let solution = bordered
        .lu()
        .solve(&rhs)
        .ok_or(Error::DegenerateKernel { dim: 2 })?;

    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            rho[i][j] = solution[vec_index(i, j)];
        }
    }
    // Symmetrize away rounding-level anti-Hermitian parts.
    for i in 0..4 {
        for j in i..4 {
            let avg = 0.5 * (rho[i][j] + rho[j][i].conj());
            rho[i][j] = avg;
            rho[j][i] = avg.conj();
        }
    }

    let vec_rho = SVector::<Complex64, 16>::from_fn(|k, _| rho[k / 4][k % 4]);
    let residual = (generator * vec_rho).norm();
    if residual > RESIDUAL_TOL || !residual.is_finite() {
        return Err(Error::SolverFailure { residual });
    }
    Ok(AtomSteadyState::from_density(&rho))
}

/// Long-time limit without lasers: upper levels empty equally into `b` and
/// `c`, optical coherences decay.
fn undriven_limit(rho0: &DensityMatrix4) -> AtomSteadyState {
    let upper = rho0[LEVEL_A][LEVEL_A].re + rho0[LEVEL_D][LEVEL_D].re;
    let trace: f64 = (0..4).map(|d| rho0[d][d].re).sum();
    AtomSteadyState {
        p_aa: 0.0,
        p_bb: (rho0[LEVEL_B][LEVEL_B].re + 0.5 * upper) / trace,
        p_cc: (rho0[LEVEL_C][LEVEL_C].re + 0.5 * upper) / trace,
        p_dd: 0.0,
        p_ab: Complex64::new(0.0, 0.0),
        p_cd: Complex64::new(0.0, 0.0),
    }
}

/// Pure state `|level><level|`.
pub fn pure_level(level: usize) -> DensityMatrix4 {
    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    rho[level][level] = Complex64::new(1.0, 0.0);
    rho
}
