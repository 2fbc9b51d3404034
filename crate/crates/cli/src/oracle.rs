//! Truncated Fock-space evolution compared against the moment equations.

use serde::Serialize;
use serde_json::json;
use twophoton_core::coeffs::rate_constants;
use twophoton_core::fock::{evolve_fock_escalating, moments_from_fock, FockOptions, TruncatedState};
use twophoton_core::moments::evolve_moments_at;
use twophoton_core::{MasterCoefficients, MomentState, Pipeline};

use crate::config::{ExperimentConfig, Mode, Mutation, OracleCase, OracleConfig};
use crate::error::Result;
use crate::evolve::sample_times;
use crate::output::{num, Table};
use crate::RunOutput;

/// Largest divergences between the two descriptions over the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Divergence {
    pub n1: f64,
    pub n2: f64,
    pub w: f64,
}

impl Divergence {
    pub fn max(&self) -> f64 {
        self.n1.max(self.n2).max(self.w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub times: Vec<f64>,
    pub fock: Vec<MomentState>,
    pub moments: Vec<MomentState>,
    pub leaks: Vec<f64>,
    pub trace_errors: Vec<f64>,
    pub divergence: Divergence,
    pub tolerance: f64,
    pub passed: bool,
    /// Truncation actually used after any escalation.
    pub n_max: usize,
    pub max_leak: f64,
    pub max_trace_error: f64,
    pub positivity_failures: usize,
}

/// Coefficients for the oracle run: the pipeline's, or pure cavity loss.
pub fn oracle_coefficients(cfg: &ExperimentConfig, oracle: &OracleConfig) -> twophoton_core::Result<MasterCoefficients> {
    let p = cfg.params();
    match oracle.case {
        OracleCase::Pipeline => Ok(Pipeline::evaluate(&p)?.coefficients),
        OracleCase::PureLoss => Ok(MasterCoefficients::pure_loss(p.kappa_s, p.kappa_a, p.phi)),
    }
}

/// Evolves both descriptions from the vacuum and compares them at the
/// sample times. A mutation corrupts only the coefficients seen by the
/// Fock evolution.
pub fn compare_oracle(mc: &MasterCoefficients, oracle: &OracleConfig) -> twophoton_core::Result<OracleReport> {
    let t_end = oracle
        .t_end
        .unwrap_or_else(|| 10.0 / mc.kappa_s.min(mc.kappa_a));
    let times = sample_times(t_end, oracle.samples);
    let moments = evolve_moments_at(&MomentState::vacuum(), mc, &rate_constants(mc), &times, oracle.tol.max(1e-12))?;
    let mut fock_mc = *mc;
    if oracle.mutation == Some(Mutation::FlipC2Sign) {
        fock_mc.c2 = -fock_mc.c2;
    }
    let opts = FockOptions {
        tol: oracle.tol,
        leak_budget: oracle.leak_budget,
        check_positivity: true,
    };
    let run = evolve_fock_escalating(&TruncatedState::vacuum(oracle.n_max), &fock_mc, &times, &opts)?;
    let fock: Vec<MomentState> = run.samples.iter().map(moments_from_fock).collect();
    let mut divergence = Divergence {
        n1: 0.0,
        n2: 0.0,
        w: 0.0,
    };
    for (f, m) in fock.iter().zip(&moments) {
        divergence.n1 = divergence.n1.max((f.n1 - m.n1).abs());
        divergence.n2 = divergence.n2.max((f.n2 - m.n2).abs());
        divergence.w = divergence.w.max((f.w - m.w).norm());
    }
    Ok(OracleReport {
        leaks: run.samples.iter().map(TruncatedState::leak).collect(),
        trace_errors: run.samples.iter().map(|s| (s.trace() - 1.0).norm()).collect(),
        n_max: run.last().n_max,
        max_leak: run.diagnostics.max_leak,
        max_trace_error: run.diagnostics.max_trace_error,
        positivity_failures: run.diagnostics.positivity_failures.len(),
        passed: divergence.max() <= oracle.tolerance,
        tolerance: oracle.tolerance,
        divergence,
        times,
        fock,
        moments,
    })
}

pub(crate) fn run_oracle(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let oracle = cfg.oracle.expect("validated");
    let mc = oracle_coefficients(cfg, &oracle)?;
    let r = compare_oracle(&mc, &oracle)?;
    let mut t = Table::new(
        cfg.stem(Mode::OracleCompare),
        &[
            ("t", "time [1/gamma]"),
            ("n1_fock", "Stokes photon number, Fock evolution"),
            ("n2_fock", "anti-Stokes photon number, Fock evolution"),
            ("re_w_fock", "Re <a1 a2>, Fock evolution"),
            ("im_w_fock", "Im <a1 a2>, Fock evolution"),
            ("n1_moment", "Stokes photon number, moment equations"),
            ("n2_moment", "anti-Stokes photon number, moment equations"),
            ("re_w_moment", "Re <a1 a2>, moment equations"),
            ("im_w_moment", "Im <a1 a2>, moment equations"),
            ("leak", "weight on the highest retained level"),
            ("trace_error", "|Tr rho - 1|"),
        ],
    );
    for k in 0..r.times.len() {
        let (f, m) = (&r.fock[k], &r.moments[k]);
        t.push(vec![
            num(r.times[k]),
            num(f.n1),
            num(f.n2),
            num(f.w.re),
            num(f.w.im),
            num(m.n1),
            num(m.n2),
            num(m.w.re),
            num(m.w.im),
            num(r.leaks[k]),
            num(r.trace_errors[k]),
        ]);
    }
    let mut findings = Vec::new();
    if !r.passed {
        findings.push(format!(
            "oracle diverges from the moment equations by {} (tolerance {})",
            r.divergence.max(),
            r.tolerance
        ));
    }
    Ok(RunOutput {
        tables: vec![t],
        resolved: json!({ "oracle": oracle, "coefficients": {
            "c_loss1": [mc.c_loss1.re, mc.c_loss1.im],
            "c_gain1": [mc.c_gain1.re, mc.c_gain1.im],
            "c_loss2": [mc.c_loss2.re, mc.c_loss2.im],
            "c_gain2": [mc.c_gain2.re, mc.c_gain2.im],
            "c1": [mc.c1.re, mc.c1.im],
            "c2": [mc.c2.re, mc.c2.im],
            "c3": [mc.c3.re, mc.c3.im],
            "c4": [mc.c4.re, mc.c4.im],
            "phi": mc.phi,
        }}),
        summary: json!({
            "divergence": r.divergence,
            "tolerance": r.tolerance,
            "passed": r.passed,
            "n_max": r.n_max,
            "max_leak": r.max_leak,
            "max_trace_error": r.max_trace_error,
            "positivity_failures": r.positivity_failures,
        }),
        findings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(case: OracleCase, mutation: Option<Mutation>) -> (ExperimentConfig, OracleConfig) {
        let mut c = ExperimentConfig::new(Mode::OracleCompare);
        c.atom.omega_p = 1.0;
        c.atom.omega_c = 25.0;
        c.atom.delta_p = 40.0;
        c.atom.phi = std::f64::consts::FRAC_PI_2;
        let o = OracleConfig {
            n_max: 6,
            t_end: Some(2.0),
            samples: 5,
            case,
            mutation,
            ..OracleConfig::default()
        };
        c.oracle = Some(o);
        (c, o)
    }

    #[test]
    fn pure_loss_has_zero_divergence() {
        let (c, o) = short(OracleCase::PureLoss, None);
        let r = compare_oracle(&oracle_coefficients(&c, &o).unwrap(), &o).unwrap();
        assert_eq!(r.divergence.max(), 0.0);
        assert!(r.passed);
    }

    #[test]
    fn flipped_c2_is_caught() {
        let (c, _) = short(OracleCase::Pipeline, Some(Mutation::FlipC2Sign));
        let out = run_oracle(&c).unwrap();
        assert_eq!(out.summary["passed"], false);
        assert_eq!(out.findings.len(), 1);
        let (c, _) = short(OracleCase::Pipeline, None);
        assert!(run_oracle(&c).unwrap().findings.is_empty());
    }
}
