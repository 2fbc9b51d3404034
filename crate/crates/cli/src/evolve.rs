//! Transient moments from the vacuum.

use rayon::prelude::*;
use serde_json::{json, Value};
use twophoton_core::moments::{duan_vacuum, evolve_moments_at, g2_of_state};
use twophoton_core::{AtomParams, MomentState, Pipeline};

use crate::config::{ExperimentConfig, Mode};
use crate::error::Result;
use crate::output::{num, opt_num, Table};
use crate::sweep::build_grid;
use crate::RunOutput;

/// `samples` evenly spaced times on `[0, t_end]`.
pub fn sample_times(t_end: f64, samples: usize) -> Vec<f64> {
    let h = t_end / (samples - 1) as f64;
    (0..samples)
        .map(|k| if k + 1 == samples { t_end } else { h * k as f64 })
        .collect()
}

/// Moment trajectory from the vacuum under the coefficients of `params`.
pub fn evolve_from_vacuum(params: &AtomParams, times: &[f64], tol: f64) -> twophoton_core::Result<Vec<MomentState>> {
    let p = Pipeline::evaluate(params)?;
    evolve_moments_at(&MomentState::vacuum(), &p.coefficients, &p.rates, times, tol)
}

fn series_summary(file: &str, params: &AtomParams, states: &[MomentState]) -> Value {
    let d: Vec<f64> = states.iter().map(duan_vacuum).collect();
    let (k_min, d_min) = d
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least two samples");
    let g2: Vec<Option<f64>> = states.iter().map(|s| g2_of_state(s).ok()).collect();
    let peak = g2
        .iter()
        .enumerate()
        .filter_map(|(k, g)| g.map(|g| (k, g)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    let last = states.last().expect("at least two samples");
    json!({
        "file": file,
        "params": params,
        "min_duan_d": d_min,
        "t_min_duan_d": states[k_min].t,
        "first_below_2": states.iter().zip(&d).find(|(_, d)| **d < 2.0).map(|(s, _)| s.t),
        "max_g2": peak.map(|p| p.1),
        "t_max_g2": peak.map(|p| states[p.0].t),
        "final": {
            "t": last.t,
            "n1": last.n1,
            "n2": last.n2,
            "abs_w": last.w.norm(),
            "g2": g2.last().copied().flatten(),
            "duan_d": d.last(),
        },
    })
}

pub(crate) fn run_evolve(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let times_cfg = cfg.times.expect("validated");
    let times = sample_times(times_cfg.t_end, times_cfg.samples);
    let grid = build_grid(cfg);
    let runs: Vec<twophoton_core::Result<Vec<MomentState>>> = grid
        .par_iter()
        .map(|g| match &g.kappa_error {
            Some(e) => Err(e.clone()),
            None => evolve_from_vacuum(&g.params, &times, times_cfg.tol),
        })
        .collect();
    let stem = cfg.stem(Mode::Evolve);
    let mut tables = Vec::new();
    let mut series = Vec::new();
    for (k, (g, run)) in grid.iter().zip(runs).enumerate() {
        let states = run?;
        let name = if grid.len() == 1 { stem.clone() } else { format!("{stem}_{k:03}") };
        let mut t = Table::new(
            name.clone(),
            &[
                ("t", "time [1/gamma]"),
                ("n1", "Stokes mean photon number"),
                ("n2", "anti-Stokes mean photon number"),
                ("re_w", "Re <a1 a2>"),
                ("im_w", "Im <a1 a2>"),
                ("g2", "cross correlation (empty while a mode is empty)"),
                ("duan_d", "Duan parameter"),
            ],
        );
        for s in &states {
            t.push(vec![
                num(s.t),
                num(s.n1),
                num(s.n2),
                num(s.w.re),
                num(s.w.im),
                opt_num(g2_of_state(s).ok()),
                num(duan_vacuum(s)),
            ]);
        }
        series.push(series_summary(&t.file_name(), &g.params, &states));
        tables.push(t);
    }
    Ok(RunOutput {
        tables,
        resolved: json!({ "times": times_cfg }),
        summary: json!({ "series": series }),
        findings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Axis, TimesConfig};

    #[test]
    fn sample_grid_ends_exactly() {
        let t = sample_times(0.3, 4);
        assert_eq!(t.len(), 4);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[3], 0.3);
    }

    #[test]
    fn one_file_per_grid_point() {
        let mut c = ExperimentConfig::new(Mode::Evolve);
        c.atom.kappa_s = 2.0;
        c.atom.kappa_a = 2.0;
        c.times = Some(TimesConfig {
            t_end: 1.0,
            samples: 5,
            tol: 1e-9,
        });
        let single = run_evolve(&c).unwrap();
        assert_eq!(single.tables.len(), 1);
        assert_eq!(single.tables[0].name, "evolve");
        assert_eq!(single.tables[0].rows[0][5], "");
        c.grid.gamma_bc = Some(Axis::List(vec![0.0, 0.6]));
        let two = run_evolve(&c).unwrap();
        assert_eq!(two.tables[1].file_name(), "evolve_001.csv");
        assert_eq!(two.summary["series"][1]["params"]["gamma_bc"], 0.6);
    }
}
