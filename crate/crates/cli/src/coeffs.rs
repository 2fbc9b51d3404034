//! Coefficient dump for one operating point and the randomized pair-term
//! identity check.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use twophoton_core::regimes::reit_xi;
use twophoton_core::{AtomParams, Pipeline};

use crate::config::{ExperimentConfig, Mode};
use crate::error::Result;
use crate::output::{num, Table};
use crate::RunOutput;

/// Relative defect allowed in `C1 + C3 - C2 - C4`.
pub const RELATION_TOLERANCE: f64 = 1e-12;

/// Parameters drawn uniformly from a box that spans weak and strong drive,
/// both detuning signs and up to strong ground dephasing.
pub fn random_params(rng: &mut impl Rng) -> AtomParams {
    AtomParams {
        omega_p: rng.gen_range(0.01..50.0),
        omega_c: rng.gen_range(0.01..50.0),
        delta_p: rng.gen_range(-100.0..100.0),
        delta_c: rng.gen_range(-20.0..20.0),
        gamma: rng.gen_range(0.2..3.0),
        gamma_bc: rng.gen_range(0.0..2.0),
        g_s: rng.gen_range(0.05..3.0),
        g_a: rng.gen_range(0.05..3.0),
        kappa_s: rng.gen_range(0.01..5.0),
        kappa_a: rng.gen_range(0.01..5.0),
        phi: rng.gen_range(0.0..std::f64::consts::TAU),
    }
}

pub(crate) fn run_coeffs(cfg: &ExperimentConfig, seed: Option<u64>) -> Result<RunOutput> {
    let params = cfg.params();
    let p = Pipeline::evaluate(&params)?;
    let (a, mc, rc) = (&p.atom, &p.coefficients, &p.rates);
    let real = |x: f64| Complex64::new(x, 0.0);
    let entries: [(&str, Complex64); 22] = [
        ("p_aa", real(a.p_aa)),
        ("p_bb", real(a.p_bb)),
        ("p_cc", real(a.p_cc)),
        ("p_dd", real(a.p_dd)),
        ("p_ab", a.p_ab),
        ("p_cd", a.p_cd),
        ("z", p.denominators.z),
        ("c_loss1", mc.c_loss1),
        ("c_gain1", mc.c_gain1),
        ("c_loss2", mc.c_loss2),
        ("c_gain2", mc.c_gain2),
        ("c1", mc.c1),
        ("c2", mc.c2),
        ("c3", mc.c3),
        ("c4", mc.c4),
        ("k1", real(rc.k1)),
        ("k2", real(rc.k2)),
        ("k12", rc.k12),
        ("c12", rc.c12),
        ("c32", rc.c32),
        ("relation_defect", mc.c_relation_defect()),
        ("xi", real(reit_xi(&params).map_or(f64::NAN, |x| x.xi))),
    ];
    let stem = cfg.stem(Mode::Coeffs);
    let mut t = Table::new(
        stem.clone(),
        &[
            ("quantity", "atomic population/coherence, master coefficient or rate"),
            ("re", "real part"),
            ("im", "imaginary part"),
        ],
    );
    for (name, v) in entries {
        t.push(vec![name.to_string(), num(v.re), num(v.im)]);
    }
    let mut tables = vec![t];
    let mut findings = Vec::new();
    let mut summary = json!({
        "relation_defect": mc.c_relation_defect().norm(),
        "magnitude": mc.magnitude(),
    });

    if let Some(d) = cfg.draws {
        let seed = seed.unwrap_or(d.seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draws = Table::new(
            format!("{stem}_draws"),
            &[
                ("draw", "draw index"),
                ("omega_p", "pump Rabi frequency"),
                ("omega_c", "control Rabi frequency"),
                ("delta_p", "pump detuning"),
                ("delta_c", "control detuning"),
                ("gamma", "radiative coherence decay"),
                ("gamma_bc", "ground-state dephasing"),
                ("magnitude", "largest master coefficient modulus"),
                ("relative_defect", "|C1 + C3 - C2 - C4| / magnitude"),
                ("error", "evaluation error"),
            ],
        );
        let (mut worst, mut failed) = (0.0f64, 0usize);
        for k in 0..d.count {
            let q = random_params(&mut rng);
            let mut row = vec![
                k.to_string(),
                num(q.omega_p),
                num(q.omega_c),
                num(q.delta_p),
                num(q.delta_c),
                num(q.gamma),
                num(q.gamma_bc),
            ];
            match Pipeline::evaluate(&q) {
                Ok(p) => {
                    let m = p.coefficients.magnitude();
                    let rel = p.coefficients.c_relation_defect().norm() / m;
                    worst = worst.max(rel);
                    if !(rel <= RELATION_TOLERANCE) {
                        failed += 1;
                    }
                    row.extend([num(m), num(rel), String::new()]);
                }
                Err(e) => row.extend([String::new(), String::new(), e.to_string()]),
            }
            draws.push(row);
        }
        if failed > 0 {
            findings.push(format!(
                "{failed} of {} draws violate the pair-term identity (worst {worst:e})",
                d.count
            ));
        }
        summary["draws"] = json!({ "count": d.count, "seed": seed, "worst_relative_defect": worst, "failed": failed });
        tables.push(draws);
    }
    Ok(RunOutput {
        tables,
        resolved: json!({ "params": params }),
        summary,
        findings,
    })
}
