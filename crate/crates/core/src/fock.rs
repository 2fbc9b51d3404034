//! Reference integration of the full two-mode density matrix in a truncated
//! photon-number basis.
//!
//! Ladder-operator products are formed as products of the truncated
//! matrices (so `a a+` vanishes on the top level), which keeps every term of
//! the generator exactly traceless.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::coeffs::MasterCoefficients;
use crate::error::{Error, Result};
use crate::moments::MomentState;
use crate::ode::{Dopri5, OdeOptions};

pub const DEFAULT_N_MAX: usize = 12;
pub const DEFAULT_LEAK_BUDGET: f64 = 1e-6;
/// Eigenvalues below this are reported as positivity failures.
pub const POSITIVITY_FLOOR: f64 = -1e-8;

/// Density matrix over `|n1, n2><m1, m2|` with `0 <= n_j, m_j <= n_max`,
/// stored row-major with basis index `n1 (n_max + 1) + n2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    pub n_max: usize,
    pub rho: Vec<Complex64>,
    pub t: f64,
}

impl TruncatedState {
    pub fn dim(&self) -> usize {
        (self.n_max + 1) * (self.n_max + 1)
    }

    pub fn index(&self, n1: usize, n2: usize) -> usize {
        n1 * (self.n_max + 1) + n2
    }

    pub fn vacuum(n_max: usize) -> Self {
        Self::fock(n_max, 0, 0)
    }

    pub fn fock(n_max: usize, n1: usize, n2: usize) -> Self {
        Self::pure(n_max, &[(n1, n2, Complex64::new(1.0, 0.0))])
    }

    /// Normalized pure state from `(n1, n2, amplitude)` components.
    pub fn pure(n_max: usize, components: &[(usize, usize, Complex64)]) -> Self {
        let d = (n_max + 1) * (n_max + 1);
        let mut psi = vec![Complex64::new(0.0, 0.0); d];
        for &(n1, n2, a) in components {
            assert!(n1 <= n_max && n2 <= n_max, "component beyond truncation");
            psi[n1 * (n_max + 1) + n2] += a;
        }
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let mut rho = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                rho[i * d + j] = psi[i] * psi[j].conj() / (norm * norm);
            }
        }
        Self { n_max, rho, t: 0.0 }
    }

    /// Copies the state into a larger basis.
    pub fn embed(&self, n_max: usize) -> Self {
        assert!(n_max >= self.n_max);
        let (d_old, n_old) = (self.dim(), self.n_max + 1);
        let n_new = n_max + 1;
        let d_new = n_new * n_new;
        let mut rho = vec![Complex64::new(0.0, 0.0); d_new * d_new];
        let map = |k: usize| (k / n_old) * n_new + k % n_old;
        for i in 0..d_old {
            for j in 0..d_old {
                rho[map(i) * d_new + map(j)] = self.rho[i * d_old + j];
            }
        }
        Self { n_max, rho, t: self.t }
    }

    pub fn trace(&self) -> Complex64 {
        let d = self.dim();
        (0..d).map(|k| self.rho[k * d + k]).sum()
    }

    /// Largest `|rho - rho^dagger|` entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for i in 0..d {
            for j in i..d {
                m = m.max((self.rho[i * d + j] - self.rho[j * d + i].conj()).norm());
            }
        }
        m
    }

    /// Population on states with either mode at the truncation level.
    pub fn leak(&self) -> f64 {
        let (d, n) = (self.dim(), self.n_max);
        let mut s = 0.0;
        for n1 in 0..=n {
            for n2 in 0..=n {
                if n1 == n || n2 == n {
                    let k = self.index(n1, n2);
                    s += self.rho[k * d + k].re;
                }
            }
        }
        s
    }

    /// Diagonal of `rho` as `(n1, n2, probability)`.
    pub fn distribution(&self) -> Vec<(usize, usize, f64)> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d);
        for n1 in 0..=self.n_max {
            for n2 in 0..=self.n_max {
                let k = self.index(n1, n2);
                out.push((n1, n2, self.rho[k * d + k].re));
            }
        }
        out
    }

    /// Smallest eigenvalue of the Hermitian part of `rho`.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| 0.5 * (self.rho[i * d + j] + self.rho[j * d + i].conj()));
        m.symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }
}

/// Operator with at most one nonzero per column and per row:
/// `op |k> = amp |target>`.
struct Shift {
    cols: Vec<Option<(usize, f64)>>,
    /// For each row, the column feeding it.
    rows: Vec<Option<(usize, f64)>>,
}

impl Shift {
    fn build(n_max: usize, f: impl Fn(usize, usize) -> Option<(usize, usize, f64)>) -> Self {
        let n = n_max + 1;
        let cols: Vec<Option<(usize, f64)>> = (0..n * n)
            .map(|k| {
                f(k / n, k % n)
                    .filter(|&(_, _, a)| a != 0.0)
                    .map(|(t1, t2, a)| (t1 * n + t2, a))
            })
            .collect();
        let mut rows = vec![None; n * n];
        for (k, c) in cols.iter().enumerate() {
            if let Some((i, a)) = *c {
                rows[i] = Some((k, a));
            }
        }
        Self { cols, rows }
    }
}

/// One term `c L rho R` of the generator's non-adjoint half.
struct Term {
    c: Complex64,
    left: usize,
    right: usize,
}

const IDENTITY: usize = 0;
const A1: usize = 1;
const A1_DAG: usize = 2;
const A2: usize = 3;
const A2_DAG: usize = 4;
const N1: usize = 5;
const N2: usize = 6;
const M1: usize = 7;
const M2: usize = 8;
const A1A2: usize = 9;

fn ladder(n_max: usize) -> Vec<Shift> {
    let sq = |x: usize| (x as f64).sqrt();
    vec![
        Shift::build(n_max, |i, j| Some((i, j, 1.0))),
        Shift::build(n_max, |i, j| (i > 0).then(|| (i - 1, j, sq(i)))),
        Shift::build(n_max, |i, j| (i < n_max).then(|| (i + 1, j, sq(i + 1)))),
        Shift::build(n_max, |i, j| (j > 0).then(|| (i, j - 1, sq(j)))),
        Shift::build(n_max, |i, j| (j < n_max).then(|| (i, j + 1, sq(j + 1)))),
        Shift::build(n_max, |i, j| Some((i, j, i as f64))),
        Shift::build(n_max, |i, j| Some((i, j, j as f64))),
        // a a+ on the truncated space vanishes on the top level
        Shift::build(n_max, |i, j| (i < n_max).then(|| (i, j, (i + 1) as f64))),
        Shift::build(n_max, |i, j| (j < n_max).then(|| (i, j, (j + 1) as f64))),
        Shift::build(n_max, |i, j| (i > 0 && j > 0).then(|| (i - 1, j - 1, sq(i * j)))),
    ]
}

/// `(n1 - n2) - (m1 - m2)` of the element `|n1, n2><m1, m2|`, offset to be
/// nonnegative. Every term of the generator conserves it.
fn sector(n_max: usize, i: usize, j: usize) -> usize {
    let n = n_max + 1;
    let diff = |k: usize| (k / n) as i64 - (k % n) as i64;
    (diff(i) - diff(j) + 2 * n_max as i64) as usize
}

/// Generator of the two-mode master equation as a reusable right-hand side.
///
/// Only the elements in the conserved sectors occupied by the state it was
/// built for are evaluated; the rest of the output is zero.
pub struct MasterGenerator {
    n_max: usize,
    ops: Vec<Shift>,
    terms: Vec<Term>,
    active: Vec<(usize, usize)>,
    scratch: Vec<Complex64>,
}

impl MasterGenerator {
    /// Generator over the full matrix space.
    pub fn new(n_max: usize, mc: &MasterCoefficients) -> Self {
        Self::with_sectors(n_max, mc, &vec![true; 4 * n_max + 1])
    }

    /// Generator restricted to the sectors occupied by `state` (and their
    /// mirrors, so Hermiticity is kept).
    pub fn for_state(state: &TruncatedState, mc: &MasterCoefficients) -> Self {
        let (n_max, d) = (state.n_max, state.dim());
        let mut used = vec![false; 4 * n_max + 1];
        for i in 0..d {
            for j in 0..d {
                if state.rho[i * d + j] != Complex64::new(0.0, 0.0) {
                    let s = sector(n_max, i, j);
                    used[s] = true;
                    used[4 * n_max - s] = true;
                }
            }
        }
        Self::with_sectors(n_max, mc, &used)
    }

    fn with_sectors(n_max: usize, mc: &MasterCoefficients, used: &[bool]) -> Self {
        let d = (n_max + 1) * (n_max + 1);
        let e = Complex64::from_polar(1.0, -mc.phi);
        let terms: Vec<Term> = [
            (mc.c_loss1, A1, A1_DAG),
            (-mc.c_loss1, IDENTITY, N1),
            (mc.c_gain1, A1_DAG, A1),
            (-mc.c_gain1, M1, IDENTITY),
            (mc.c_loss2, A2, A2_DAG),
            (-mc.c_loss2, N2, IDENTITY),
            (mc.c_gain2, A2_DAG, A2),
            (-mc.c_gain2, IDENTITY, M2),
            (e * mc.c1, A2, A1),
            (-e * mc.c2, IDENTITY, A1A2),
            (e * mc.c3, A1, A2),
            (-e * mc.c4, A1A2, IDENTITY),
        ]
        .into_iter()
        .filter(|(c, _, _)| *c != Complex64::new(0.0, 0.0))
        .map(|(c, left, right)| Term { c, left, right })
        .collect();
        let mut active = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if used[sector(n_max, i, j)] {
                    active.push((i, j));
                }
            }
        }
        Self {
            n_max,
            ops: ladder(n_max),
            terms,
            active,
            scratch: vec![Complex64::new(0.0, 0.0); d * d],
        }
    }

    /// `drho = X + X^dagger` where `X` collects the loss, gain and pair terms.
    pub fn apply(&mut self, rho: &[Complex64], drho: &mut [Complex64]) {
        let d = (self.n_max + 1) * (self.n_max + 1);
        let x = &mut self.scratch;
        for &(i, j) in &self.active {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in &self.terms {
                if let (Some((k, a)), Some((l, b))) = (self.ops[t.left].rows[i], self.ops[t.right].cols[j]) {
                    acc += t.c * (a * b) * rho[k * d + l];
                }
            }
            x[i * d + j] = acc;
        }
        drho.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for &(i, j) in &self.active {
            drho[i * d + j] = x[i * d + j] + x[j * d + i].conj();
        }
    }
}

/// One-shot evaluation of the generator on `state`.
pub fn apply_master_rhs(state: &TruncatedState, mc: &MasterCoefficients) -> Vec<Complex64> {
    let mut g = MasterGenerator::for_state(state, mc);
    let mut out = vec![Complex64::new(0.0, 0.0); state.rho.len()];
    g.apply(&state.rho, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockOptions {
    pub tol: f64,
    pub leak_budget: f64,
    /// Diagonalize `rho` at every sample to detect negative eigenvalues.
    pub check_positivity: bool,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            leak_budget: DEFAULT_LEAK_BUDGET,
            check_positivity: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FockDiagnostics {
    pub max_leak: f64,
    pub max_trace_error: f64,
    pub max_hermiticity_defect: f64,
    /// `(t, min eigenvalue)` at samples where positivity failed.
    pub positivity_failures: Vec<(f64, f64)>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockRun {
    pub samples: Vec<TruncatedState>,
    pub diagnostics: FockDiagnostics,
}

impl FockRun {
    pub fn last(&self) -> &TruncatedState {
        self.samples.last().expect("a run holds at least one sample")
    }
}

/// Integrates `initial` and records the state at each nondecreasing time.
/// The leak budget is enforced after every accepted step.
pub fn evolve_fock_at(
    initial: &TruncatedState,
    mc: &MasterCoefficients,
    times: &[f64],
    opts: &FockOptions,
) -> Result<FockRun> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParams {
            name: "tol",
            reason: "must be positive",
        });
    }
    let n_max = initial.n_max;
    let mut gen = MasterGenerator::for_state(initial, mc);
    let rhs = move |_t: f64, y: &[Complex64], dy: &mut [Complex64]| gen.apply(y, dy);
    let mut stepper = Dopri5::new(rhs, initial.t, &initial.rho, OdeOptions::with_tolerance(opts.tol, opts.tol))?;
    let mut diag = FockDiagnostics::default();
    let mut samples = Vec::with_capacity(times.len());
    let mut probe = initial.clone();
    let observe = |state: &TruncatedState, diag: &mut FockDiagnostics| -> Result<()> {
        let leak = state.leak();
        diag.max_leak = diag.max_leak.max(leak);
        if leak > opts.leak_budget {
            return Err(Error::TruncationOverflow { leak, n_max });
        }
        diag.max_trace_error = diag.max_trace_error.max((state.trace() - 1.0).norm());
        Ok(())
    };
    for &t in times {
        if !(t >= stepper.t()) || !t.is_finite() {
            return Err(Error::InvalidParams {
                name: "times",
                reason: "sample times must be finite, nondecreasing and not before the start",
            });
        }
        while stepper.t() < t {
            stepper.step(t)?;
            probe.rho.copy_from_slice(stepper.state());
            probe.t = stepper.t();
            observe(&probe, &mut diag)?;
        }
        let mut s = probe.clone();
        s.rho.copy_from_slice(stepper.state());
        s.t = t;
        diag.max_hermiticity_defect = diag.max_hermiticity_defect.max(s.hermiticity_defect());
        if opts.check_positivity {
            let ev = s.min_eigenvalue();
            if ev < POSITIVITY_FLOOR {
                diag.positivity_failures.push((t, ev));
            }
        }
        samples.push(s);
    }
    diag.steps = stepper.stats().accepted;
    Ok(FockRun {
        samples,
        diagnostics: diag,
    })
}

pub fn evolve_fock(initial: &TruncatedState, mc: &MasterCoefficients, t_end: f64, tol: f64) -> Result<TruncatedState> {
    let opts = FockOptions {
        tol,
        ..FockOptions::default()
    };
    let run = evolve_fock_at(initial, mc, &[t_end], &opts)?;
    Ok(run.last().clone())
}

/// Retries with `n_max` raised by 4 (at most twice) when the leak budget is
/// exceeded. `initial` is embedded into each enlarged basis.
pub fn evolve_fock_escalating(
    initial: &TruncatedState,
    mc: &MasterCoefficients,
    times: &[f64],
    opts: &FockOptions,
) -> Result<FockRun> {
    let mut n_max = initial.n_max;
    for attempt in 0..=2 {
        let start = initial.embed(n_max);
        match evolve_fock_at(&start, mc, times, opts) {
            Err(Error::TruncationOverflow { .. }) if attempt < 2 => n_max += 4,
            other => return other,
        }
    }
    unreachable!("the final attempt returns")
}

/// Photon numbers and `<a1 a2>` from the density matrix.
pub fn moments_from_fock(state: &TruncatedState) -> MomentState {
    let d = state.dim();
    let (mut n1, mut n2) = (0.0, 0.0);
    let mut w = Complex64::new(0.0, 0.0);
    for i in 0..=state.n_max {
        for j in 0..=state.n_max {
            let k = state.index(i, j);
            let p = state.rho[k * d + k].re;
            n1 += i as f64 * p;
            n2 += j as f64 * p;
            if i > 0 && j > 0 {
                let l = state.index(i - 1, j - 1);
                w += ((i * j) as f64).sqrt() * state.rho[k * d + l];
            }
        }
    }
    MomentState { t: state.t, n1, n2, w }
}
