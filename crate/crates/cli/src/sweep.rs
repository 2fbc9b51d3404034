//! Steady-state grids: general steady states, Raman-EIT phase maps and the
//! symmetric resonant scan.

use rayon::prelude::*;
use serde_json::json;
use twophoton_core::regimes::{drr_analyze, reit_analyze_xi, reit_tune_kappa, reit_xi, tune_for_rate};
use twophoton_core::steady::{entanglement_verdict, relaxation_rate};
use twophoton_core::{steady_closed_form, AtomParams, Error, Pipeline};

use crate::config::{ExperimentConfig, KappaConfig, Method, Mode, TuneRate};
use crate::error::Result;
use crate::output::{flag, num, opt_num, Table};
use crate::RunOutput;

/// Threshold below which a symmetric resonant point counts as entangled.
pub const DRR_VIOLATION: f64 = 2.0 - 1e-9;

/// Equal dampings tuned against the pair-emission rate at `params` (or at
/// the configured reference control frequency).
pub fn tuned_kappa(params: &AtomParams, k: &KappaConfig) -> twophoton_core::Result<f64> {
    let at = match k.reference_omega_c {
        Some(omega_c) => AtomParams { omega_c, ..*params },
        None => *params,
    };
    let (kappa, _) = match k.rate {
        TuneRate::C2 => reit_tune_kappa(&at, k.safety)?,
        TuneRate::Xi => tune_for_rate(reit_xi(&at)?.xi.abs(), k.safety)?,
    };
    Ok(kappa)
}

/// Steady-state record of one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyPoint {
    pub n1: f64,
    pub n2: f64,
    pub w: num_complex::Complex64,
    pub duan_d: f64,
    pub g2: Option<f64>,
    pub stable: bool,
    pub boundary: bool,
    pub entangled: bool,
    pub relaxation_rate: f64,
}

pub fn steady_point(params: &AtomParams) -> twophoton_core::Result<SteadyPoint> {
    let p = Pipeline::evaluate(params)?;
    let sm = steady_closed_form(&p.coefficients, &p.rates)?;
    let (entangled, g2) = match entanglement_verdict(&sm) {
        Ok(r) => (r.entangled, r.g2),
        Err(Error::DisregardedUnstable) => (false, None),
        Err(e) => return Err(e),
    };
    Ok(SteadyPoint {
        n1: sm.n1,
        n2: sm.n2,
        w: sm.w,
        duan_d: sm.duan_d(),
        g2,
        stable: sm.stable,
        boundary: sm.boundary,
        entangled,
        relaxation_rate: relaxation_rate(&sm),
    })
}

fn reit_point(params: &AtomParams) -> twophoton_core::Result<SteadyPoint> {
    let xi = reit_xi(params)?.xi;
    let a = reit_analyze_xi(xi, params.kappa_s, params.kappa_a, params.phi)?;
    Ok(SteadyPoint {
        n1: a.n1,
        n2: a.n2,
        w: a.w,
        duan_d: a.duan_d,
        g2: None,
        stable: a.stable,
        boundary: false,
        entangled: a.entangled && a.stable,
        relaxation_rate: f64::NAN,
    })
}

/// Grid point of the steady and Raman-EIT scans, in output order
/// (`gamma_bc` outermost, then `omega_c`, then `phi`).
#[derive(Debug, Clone)]
pub(crate) struct GridPoint {
    pub(crate) params: AtomParams,
    pub(crate) kappa_error: Option<Error>,
}

pub(crate) fn build_grid(cfg: &ExperimentConfig) -> Vec<GridPoint> {
    let base = cfg.params();
    let gamma_bcs = cfg.axis("gamma_bc").unwrap_or_else(|| vec![base.gamma_bc]);
    let omega_cs = cfg.axis("omega_c").unwrap_or_else(|| vec![base.omega_c]);
    let phis = cfg.axis("phi").unwrap_or_else(|| vec![base.phi]);
    let reference = cfg
        .kappa
        .filter(|k| k.reference_omega_c.is_some())
        .map(|k| tuned_kappa(&base, &k));
    let mut out = Vec::with_capacity(gamma_bcs.len() * omega_cs.len() * phis.len());
    for &gamma_bc in &gamma_bcs {
        for &omega_c in &omega_cs {
            let mut p = AtomParams {
                omega_c,
                gamma_bc,
                ..base
            };
            let kappa = match (&cfg.kappa, &reference) {
                (_, Some(r)) => Some(r.clone()),
                (Some(k), None) => Some(tuned_kappa(&p, k)),
                (None, None) => None,
            };
            let mut kappa_error = None;
            match kappa {
                Some(Ok(k)) => p = p.with_kappa(k, k),
                Some(Err(e)) => kappa_error = Some(e),
                None => {}
            }
            for &phi in &phis {
                out.push(GridPoint {
                    params: p.with_phi(phi),
                    kappa_error: kappa_error.clone(),
                });
            }
        }
    }
    out
}

fn evaluate(grid: &[GridPoint], method: Method) -> Vec<twophoton_core::Result<SteadyPoint>> {
    grid.par_iter()
        .map(|g| match &g.kappa_error {
            Some(e) => Err(e.clone()),
            None => match method {
                Method::Pipeline => steady_point(&g.params),
                Method::Reit => reit_point(&g.params),
            },
        })
        .collect()
}

fn error_text<T>(r: &twophoton_core::Result<T>) -> String {
    r.as_ref().err().map(|e| e.to_string()).unwrap_or_default()
}

pub(crate) fn run_steady(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let grid = build_grid(cfg);
    let results = evaluate(&grid, Method::Pipeline);
    let mut t = Table::new(
        cfg.stem(Mode::Steady),
        &[
            ("phi_deg", "laser phase [deg]"),
            ("omega_c", "control Rabi frequency"),
            ("gamma_bc", "ground-state dephasing"),
            ("kappa_s", "Stokes cavity damping"),
            ("kappa_a", "anti-Stokes cavity damping"),
            ("n1", "Stokes mean photon number"),
            ("n2", "anti-Stokes mean photon number"),
            ("re_w", "Re <a1 a2>"),
            ("im_w", "Im <a1 a2>"),
            ("g2", "cross correlation (empty when undefined or unstable)"),
            ("duan_d", "Duan parameter"),
            ("stable", "all drift eigenvalues in the left half plane"),
            ("boundary", "within tolerance of the stability boundary"),
            ("entangled", "stable and D < 2"),
            ("relaxation_rate", "minus the largest drift eigenvalue real part"),
            ("error", "evaluation error"),
        ],
    );
    for (g, r) in grid.iter().zip(&results) {
        let p = &g.params;
        let mut row = vec![
            num(p.phi.to_degrees()),
            num(p.omega_c),
            num(p.gamma_bc),
            num(p.kappa_s),
            num(p.kappa_a),
        ];
        match r {
            Ok(s) => row.extend([
                num(s.n1),
                num(s.n2),
                num(s.w.re),
                num(s.w.im),
                opt_num(s.g2),
                num(s.duan_d),
                flag(s.stable),
                flag(s.boundary),
                flag(s.entangled),
                num(s.relaxation_rate),
            ]),
            Err(_) => row.extend(std::iter::repeat_n(String::new(), 10)),
        }
        row.push(error_text(r));
        t.push(row);
    }
    let ok: Vec<&SteadyPoint> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let summary = json!({
        "points": grid.len(),
        "errors": grid.len() - ok.len(),
        "stable": ok.iter().filter(|s| s.stable).count(),
        "entangled": ok.iter().filter(|s| s.entangled).count(),
    });
    Ok(RunOutput {
        tables: vec![t],
        resolved: json!({ "points": grid.iter().map(|g| g.params).collect::<Vec<_>>() }),
        summary,
        findings: Vec::new(),
    })
}

/// Phase map over `(omega_c, phi)` with the scan's summary statistics.
pub(crate) fn run_scan_reit(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let grid = build_grid(cfg);
    let results = evaluate(&grid, cfg.method);
    let mut t = Table::new(
        cfg.stem(Mode::ScanReit),
        &[
            ("phi_deg", "laser phase [deg]"),
            ("omega_c", "control Rabi frequency"),
            ("duan_d", "Duan parameter"),
            ("n1", "Stokes mean photon number"),
            ("n2", "anti-Stokes mean photon number"),
            ("stable", "steady state is dynamically stable"),
            ("entangled", "stable and D < 2"),
            ("error", "evaluation error"),
        ],
    );
    for (g, r) in grid.iter().zip(&results) {
        let mut row = vec![num(g.params.phi.to_degrees()), num(g.params.omega_c)];
        match r {
            Ok(s) => row.extend([num(s.duan_d), num(s.n1), num(s.n2), flag(s.stable), flag(s.entangled)]),
            Err(_) => row.extend(std::iter::repeat_n(String::new(), 5)),
        }
        row.push(error_text(r));
        t.push(row);
    }

    let pairs: Vec<(&GridPoint, &SteadyPoint)> = grid
        .iter()
        .zip(&results)
        .filter_map(|(g, r)| r.as_ref().ok().map(|s| (g, s)))
        .collect();
    let min = pairs
        .iter()
        .filter(|(_, s)| s.stable)
        .min_by(|a, b| a.1.duan_d.total_cmp(&b.1.duan_d));
    let max_n_entangled = pairs
        .iter()
        .filter(|(_, s)| s.entangled)
        .map(|(_, s)| s.n1.max(s.n2))
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let mut bands = Vec::new();
    let mut omegas: Vec<f64> = grid.iter().map(|g| g.params.omega_c).collect();
    omegas.dedup();
    for omega_c in omegas {
        let row: Vec<&(&GridPoint, &SteadyPoint)> =
            pairs.iter().filter(|(g, s)| g.params.omega_c == omega_c && s.stable).collect();
        let best = row.iter().min_by(|a, b| a.1.duan_d.total_cmp(&b.1.duan_d));
        bands.push(json!({
            "omega_c": omega_c,
            "kappa": grid.iter().find(|g| g.params.omega_c == omega_c).map(|g| g.params.kappa_s),
            "stable_points": row.len(),
            "n1": best.map(|b| b.1.n1),
            "min_duan_d": best.map(|b| b.1.duan_d),
            "min_duan_phi_deg": best.map(|b| b.0.params.phi.to_degrees()),
        }));
    }
    let summary = json!({
        "points": grid.len(),
        "errors": grid.len() - pairs.len(),
        "stable": pairs.iter().filter(|(_, s)| s.stable).count(),
        "entangled": pairs.iter().filter(|(_, s)| s.entangled).count(),
        "min_duan_d": min.map(|m| m.1.duan_d),
        "min_duan_phi_deg": min.map(|m| m.0.params.phi.to_degrees()),
        "min_duan_omega_c": min.map(|m| m.0.params.omega_c),
        "max_n_entangled": max_n_entangled,
        "by_omega_c": bands,
    });
    Ok(RunOutput {
        tables: vec![t],
        resolved: json!({ "method": cfg.method, "base": cfg.params(), "kappa": cfg.kappa }),
        summary,
        findings: Vec::new(),
    })
}

/// Symmetric resonant scan over `(gamma_bc, omega, kappa, theta)`. A stable
/// point with `D < 2` is reported as a finding.
pub(crate) fn run_scan_drr(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let base = cfg.params();
    let gamma_bcs = cfg.axis("gamma_bc").unwrap_or_else(|| vec![base.gamma_bc]);
    let omegas = cfg.axis("omega").unwrap_or_default();
    let kappas = cfg.axis("kappa").unwrap_or_default();
    let thetas = cfg.axis("phi").unwrap_or_default();
    let mut grid = Vec::new();
    for &gamma_bc in &gamma_bcs {
        for &omega in &omegas {
            for &kappa in &kappas {
                for &theta in &thetas {
                    let p = AtomParams {
                        gamma_bc,
                        ..AtomParams::drr(omega, kappa)
                    };
                    grid.push(AtomParams {
                        gamma: base.gamma,
                        g_s: base.g_s,
                        g_a: base.g_a,
                        ..p
                    }
                    .with_phi(theta));
                }
            }
        }
    }
    let results: Vec<_> = grid.par_iter().map(|p| drr_analyze(p, p.phi)).collect();
    let mut t = Table::new(
        cfg.stem(Mode::ScanDrr),
        &[
            ("omega", "common Rabi frequency"),
            ("kappa", "common cavity damping"),
            ("theta_deg", "laser phase [deg]"),
            ("gamma_bc", "ground-state dephasing"),
            ("n_mean", "mean photon number per mode"),
            ("re_w", "Re <a1 a2>"),
            ("im_w", "Im <a1 a2>"),
            ("duan_d", "Duan parameter"),
            ("stable", "a steady state exists"),
            ("entangled", "stable and D < 2 - 1e-9"),
            ("error", "evaluation error"),
        ],
    );
    let mut findings = Vec::new();
    let mut min: Option<(usize, f64)> = None;
    let mut stable = 0;
    for (k, (p, r)) in grid.iter().zip(&results).enumerate() {
        let mut row = vec![num(p.omega_p), num(p.kappa_s), num(p.phi.to_degrees()), num(p.gamma_bc)];
        match r {
            Ok(a) => {
                stable += 1;
                let entangled = a.duan_d < DRR_VIOLATION;
                if entangled {
                    findings.push(format!(
                        "resonant point omega={} kappa={} theta={} deg gamma_bc={} has D={}",
                        p.omega_p,
                        p.kappa_s,
                        p.phi.to_degrees(),
                        p.gamma_bc,
                        a.duan_d
                    ));
                }
                if min.is_none_or(|(_, d)| a.duan_d < d) {
                    min = Some((k, a.duan_d));
                }
                row.extend([
                    num(a.n_mean),
                    num(a.w.re),
                    num(a.w.im),
                    num(a.duan_d),
                    flag(true),
                    flag(entangled),
                    String::new(),
                ]);
            }
            Err(Error::NonSteady) => {
                row.extend(std::iter::repeat_n(String::new(), 4));
                row.extend([flag(false), flag(false), String::new()]);
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.push(e.to_string());
            }
        }
        t.push(row);
    }
    let summary = json!({
        "points": grid.len(),
        "stable": stable,
        "violations": findings.len(),
        "min_duan_d": min.map(|m| m.1),
        "min_duan_point": min.map(|(k, _)| grid[k]),
    });
    Ok(RunOutput {
        tables: vec![t],
        resolved: json!({ "gamma": base.gamma, "g_s": base.g_s, "g_a": base.g_a }),
        summary,
        findings,
    })
}
