//! The four subcommands. Each returns a table plus command-specific
//! metadata; grid points are evaluated in parallel and collected in grid
//! order, so the output equals a serial run.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{Map, Value};
use spinmzi::detection::{coeffs_di, coeffs_smi, matching_qcrb, optimize_phase};
use spinmzi::qfi::{
    qcrb, qfi_oracle, qfi_report_from_moments, qfim_general, qfim_oracle, ModeMoments,
};
use spinmzi::{
    input_moments, propagate, sensitivity, sensitivity_oracle, su2_coherent, BeamSplitterF64,
    FockStateF64, Observable, PhaseOptimum, Scenario, Scheme, Sensitivity, Su2CoherentParamsF64,
    TwoModeStateF64,
};

use crate::config::{linspace, Command, RunConfig};
use crate::error::CliError;
use crate::output::{format_float, Cell, Table};

pub struct Outcome {
    pub table: Table,
    pub metadata: Map<String, Value>,
    /// Failed verification checks; always 0 for the other commands.
    pub failed: usize,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (table, extra, failed) = match cfg.command {
        Command::QfiSweep => (qfi_sweep(cfg)?, Map::new(), 0),
        Command::SensitivitySweep => {
            let (t, m) = sensitivity_sweep(cfg)?;
            (t, m, 0)
        }
        Command::Verify => verify(cfg),
        Command::StateInfo => {
            let (t, m) = state_info(cfg);
            (t, m, 0)
        }
    };
    let mut metadata = Map::new();
    metadata.insert("tool".into(), env!("CARGO_PKG_NAME").into());
    metadata.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    metadata.insert("command".into(), cfg.command.name().into());
    metadata.insert(
        "config".into(),
        serde_json::to_value(cfg).expect("serializable config"),
    );
    metadata.extend(extra);
    Ok(Outcome {
        table,
        metadata,
        failed,
    })
}

fn float_value(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(format_float(x).parse().expect("valid number"))
    } else {
        Value::String(format_float(x))
    }
}

fn su2_input(p: &Su2CoherentParamsF64) -> TwoModeStateF64 {
    TwoModeStateF64::tensor(&FockStateF64::vacuum(p.two_j()), &su2_coherent(p))
}

pub fn qfi_sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let p = cfg.params();
    let m = input_moments(&p);
    let mut columns = vec![
        "tau_sq",
        "f_a",
        "f_b",
        "f_b_exact",
        "f_c",
        "f_sql",
        "qcrb_a",
        "qcrb_b",
        "qcrb_b_exact",
        "qcrb_c",
        "sql",
        "degenerate",
    ];
    if cfg.oracle {
        columns.extend(["f_a_oracle", "f_b_oracle", "f_c_oracle"]);
    }
    let psi = cfg.oracle.then(|| su2_input(&p));
    let grid = linspace(cfg.tau_sq_start, cfg.tau_sq_stop, cfg.tau_sq_count);
    let rows: Result<Vec<_>, CliError> = grid
        .par_iter()
        .map(|&t2| {
            let bs1 = BeamSplitterF64::from_transmissivity(t2)?;
            let r = qfi_report_from_moments(&m, &bs1);
            let mut row = vec![
                Cell::num(t2),
                Cell::num(r.f_a),
                Cell::num(r.f_b),
                Cell::num(r.f_b_exact),
                Cell::num(r.f_c),
                Cell::num(r.f_sql),
                Cell::num(r.qcrb_a),
                Cell::num(r.qcrb_b),
                Cell::num(qcrb(r.f_b_exact)),
                Cell::num(r.qcrb_c),
                Cell::num(r.sql),
                Cell::Bool(r.degenerate),
            ];
            if let Some(psi) = &psi {
                for scenario in Scenario::ALL {
                    row.push(Cell::num(qfi_oracle(
                        psi,
                        &bs1,
                        scenario,
                        cfg.phi_start,
                        cfg.step,
                    )?));
                }
            }
            Ok(row)
        })
        .collect();
    let mut table = Table::new(columns);
    rows?.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

pub fn sensitivity_sweep(cfg: &RunConfig) -> Result<(Table, Map<String, Value>), CliError> {
    let p = cfg.params();
    let m = input_moments(&p);
    let (bs1, bs2) = (cfg.bs1(), cfg.bs2());
    let scenario: Scenario = cfg.scenario.into();
    let schemes = cfg.schemes();
    let report = qfi_report_from_moments(&m, &bs1);

    let mut columns = vec!["phi".to_string()];
    columns.extend(schemes.iter().map(|s| format!("delta_phi_{}", s.label())));
    if cfg.oracle {
        columns.extend(
            schemes
                .iter()
                .map(|s| format!("delta_phi_{}_oracle", s.label())),
        );
    }
    columns.extend(["qcrb_a", "qcrb_b", "qcrb_b_exact", "qcrb_c", "sql"].map(String::from));

    let psi = cfg.oracle.then(|| su2_input(&p));
    let grid = linspace(cfg.phi_start, cfg.phi_stop, cfg.phi_count);
    let rows: Result<Vec<_>, CliError> = grid
        .par_iter()
        .map(|&phi| {
            let mut row = vec![Cell::num(phi)];
            for &scheme in &schemes {
                row.push(Cell::sensitivity(sensitivity(
                    scheme, scenario, &m, &bs1, &bs2, phi, cfg.phi_l,
                )));
            }
            if let Some(psi) = &psi {
                for &scheme in &schemes {
                    let obs = Observable::for_scheme(scheme, cfg.phi_l.unwrap_or(phi));
                    row.push(Cell::sensitivity(sensitivity_oracle(
                        psi, &bs1, &bs2, scenario, obs, phi, cfg.step,
                    )?));
                }
            }
            for v in [
                report.qcrb_a,
                report.qcrb_b,
                qcrb(report.f_b_exact),
                report.qcrb_c,
                report.sql,
            ] {
                row.push(Cell::num(v));
            }
            Ok(row)
        })
        .collect();
    let mut table = Table::new(columns);
    rows?.into_iter().for_each(|r| table.push(r));

    let mut optimum = Map::new();
    for &scheme in &schemes {
        let entry = match optimize_phase(scheme, scenario, &p, &bs1, &bs2, cfg.phi_l) {
            PhaseOptimum::Found { phi, delta_phi } => {
                let mut e = Map::new();
                e.insert("phi".into(), float_value(phi));
                e.insert("delta_phi".into(), float_value(delta_phi));
                e.insert(
                    "qcrb".into(),
                    float_value(matching_qcrb(&report, scheme, scenario)),
                );
                Value::Object(e)
            }
            PhaseOptimum::NoSignal => Value::String("no-signal".into()),
        };
        optimum.insert(scheme.label().into(), entry);
    }
    let mut extra = Map::new();
    extra.insert("optimum".into(), Value::Object(optimum));
    Ok((table, extra))
}

pub fn state_info(cfg: &RunConfig) -> (Table, Map<String, Value>) {
    let p = cfg.params();
    let state = su2_coherent(&p);
    let q = p.binomial_p();
    let n_max = p.two_j();
    let mut table = Table::new([
        "n",
        "amplitude_re",
        "amplitude_im",
        "probability",
        "binomial",
    ]);
    for (n, a) in state.amplitudes().iter().enumerate() {
        table.push(vec![
            Cell::Int(n as u64),
            Cell::num(a.re),
            Cell::num(a.im),
            Cell::num(a.norm_sqr()),
            Cell::num(binomial_pmf(n_max, n, q)),
        ]);
    }
    let m = input_moments(&p);
    let mut moments = Map::new();
    for (k, v) in [
        ("mean_n", m.mean_n),
        ("var_n", m.var_n),
        ("nu_re", m.nu.re),
        ("nu_im", m.nu.im),
        ("mu_re", m.mu.re),
        ("mu_im", m.mu.im),
        ("binomial_p", q),
    ] {
        moments.insert(k.into(), float_value(v));
    }
    let mut extra = Map::new();
    extra.insert("moments".into(), Value::Object(moments));
    (table, extra)
}

/// `C(n, k) qᵏ (1−q)ⁿ⁻ᵏ`, evaluated in log space.
pub fn binomial_pmf(n: usize, k: usize, q: f64) -> f64 {
    if q <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if q >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln_choose: f64 = (1..=k).map(|i| ((n + 1 - i) as f64 / i as f64).ln()).sum();
    (ln_choose + k as f64 * q.ln() + (n - k) as f64 * (1.0 - q).ln()).exp()
}

/// One verification check: the largest deviation observed over its samples.
struct Check {
    name: &'static str,
    samples: usize,
    max_deviation: f64,
    tolerance: f64,
}

fn max_dev(devs: impl IntoIterator<Item = f64>) -> (usize, f64) {
    devs.into_iter().fold((0, 0.0), |(n, worst), d| {
        // NaN counts as an unbounded deviation.
        let d = if d.is_nan() { f64::INFINITY } else { d };
        (n + 1, worst.max(d))
    })
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

#[derive(Clone, Copy)]
struct Draw {
    params: (usize, f64, f64),
    tau_sq: f64,
    tau_p_sq: f64,
    phi: f64,
    phi_l: f64,
}

impl Draw {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        Draw {
            params: (
                rng.gen_range(1..=6),
                rng.gen_range(0.1..3.0),
                rng.gen_range(0.0..TAU),
            ),
            tau_sq: rng.gen_range(0.05..0.95),
            tau_p_sq: rng.gen_range(0.05..0.95),
            phi: rng.gen_range(0.0..TAU),
            phi_l: rng.gen_range(0.0..TAU),
        }
    }

    fn p(&self) -> Su2CoherentParamsF64 {
        let (two_j, mag, arg) = self.params;
        Su2CoherentParamsF64::from_two_j(two_j, Complex64::from_polar(mag, arg))
            .expect("valid draw")
    }

    fn bs1(&self) -> BeamSplitterF64 {
        BeamSplitterF64::from_transmissivity(self.tau_sq).expect("valid draw")
    }

    fn bs2(&self) -> BeamSplitterF64 {
        BeamSplitterF64::from_transmissivity(self.tau_p_sq).expect("valid draw")
    }
}

fn draws(rng: &mut ChaCha8Rng, n: usize) -> Vec<Draw> {
    (0..n).map(|_| Draw::new(rng)).collect()
}

fn random_fock(rng: &mut ChaCha8Rng, cutoff: usize) -> FockStateF64 {
    let amps = (0..=cutoff)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    FockStateF64::new(amps).expect("random amplitudes are non-zero")
}

fn verify(cfg: &RunConfig) -> (Table, Map<String, Value>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let h = cfg.step;
    let mut checks = Vec::new();
    let mut add = |name, tolerance, (samples, max_deviation): (usize, f64)| {
        checks.push(Check {
            name,
            samples,
            max_deviation,
            tolerance: cfg.tolerance.unwrap_or(tolerance),
        })
    };

    let mut binom = Vec::new();
    for two_j in 1..=6 {
        for mag in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let p = Su2CoherentParamsF64::from_two_j(two_j, Complex64::new(mag, 0.0))
                .expect("valid grid");
            let dist = su2_coherent(&p).distribution();
            binom.extend(
                dist.iter()
                    .enumerate()
                    .map(|(k, pk)| (pk - binomial_pmf(two_j, k, p.binomial_p())).abs()),
            );
        }
    }
    add("binomial_law", 1e-12, max_dev(binom));

    let qfi_draws = draws(&mut rng, 100);
    let qfi_devs: Vec<[f64; 3]> = qfi_draws
        .par_iter()
        .map(|d| {
            let p = d.p();
            let r = qfi_report_from_moments(&input_moments(&p), &d.bs1());
            let psi = su2_input(&p);
            let dev = |scenario, closed: f64| {
                qfi_oracle(&psi, &d.bs1(), scenario, d.phi, h)
                    .map_or(f64::INFINITY, |o| relative(closed, o))
            };
            [
                dev(Scenario::SingleArm, r.f_a),
                dev(Scenario::Symmetric, r.f_b_exact),
                dev(Scenario::TwoParam, r.f_c),
            ]
        })
        .collect();
    add(
        "qfi_single_arm_oracle",
        1e-6,
        max_dev(qfi_devs.iter().map(|d| d[0])),
    );
    add(
        "qfi_symmetric_oracle",
        1e-6,
        max_dev(qfi_devs.iter().map(|d| d[1])),
    );
    add(
        "qfi_two_parameter_oracle",
        1e-6,
        max_dev(qfi_devs.iter().map(|d| d[2])),
    );

    let products: Vec<_> = (0..50)
        .map(|_| {
            let c0 = rng.gen_range(0..4);
            let c1 = rng.gen_range(0..4);
            let c = c0.max(c1);
            let a = random_fock(&mut rng, c0).with_cutoff(c);
            let b = random_fock(&mut rng, c1).with_cutoff(c);
            (a, b, rng.gen_range(0.05..0.95), rng.gen_range(0.0..TAU))
        })
        .collect();
    let general: Vec<f64> = products
        .par_iter()
        .map(|(a, b, t2, base)| {
            let bs1 = BeamSplitterF64::from_transmissivity(*t2).expect("valid draw");
            let g = qfim_general(&ModeMoments::of_state(a), &ModeMoments::of_state(b), &bs1);
            match qfim_oracle(&TwoModeStateF64::tensor(a, b), &bs1, (*base, 0.5 * base), h) {
                Ok(o) => [(g.f_ss, o.f_ss), (g.f_dd, o.f_dd), (g.f_sd, o.f_sd)]
                    .iter()
                    .map(|(x, y)| (x - y).abs() / (1.0 + y.abs()))
                    .fold(0.0, f64::max),
                Err(_) => f64::INFINITY,
            }
        })
        .collect();
    add("qfim_general_oracle", 1e-6, max_dev(general));

    let coeff_draws = draws(&mut rng, 1000);
    add(
        "smi_coefficient_identities",
        1e-12,
        max_dev(coeff_draws.iter().map(|d| {
            let k = coeffs_smi(&d.bs1(), &d.bs2(), d.phi);
            (k.a0 + k.a1 - 1.0)
                .abs()
                .max((k.a01.norm_sqr() - k.a0 * k.a1).abs())
        })),
    );
    add(
        "di_coefficient_identity",
        1e-12,
        max_dev(coeff_draws.iter().map(|d| {
            let k = coeffs_di(&d.bs1(), &d.bs2(), d.phi);
            (k.ad * k.ad + k.cd.norm_sqr() - 1.0).abs()
        })),
    );

    let cons_draws = draws(&mut rng, 100);
    let cons: Vec<f64> = cons_draws
        .par_iter()
        .map(|d| {
            let psi = su2_input(&d.p());
            let scenario = if d.phi_l < TAU / 2.0 {
                Scenario::SingleArm
            } else {
                Scenario::Symmetric
            };
            match propagate(&psi, &d.bs1(), &scenario.config(d.phi), Some(&d.bs2())) {
                Ok(out) => {
                    let total = |s: &TwoModeStateF64| {
                        s.expect_number(0).unwrap_or(f64::NAN)
                            + s.expect_number(1).unwrap_or(f64::NAN)
                    };
                    relative(total(&out), total(&psi))
                }
                Err(_) => f64::INFINITY,
            }
        })
        .collect();
    add("photon_number_conservation", 1e-12, max_dev(cons));

    for (name, scheme, scenario) in [
        ("smi_closed_form_oracle", Scheme::Smi, Scenario::SingleArm),
        ("di_closed_form_oracle", Scheme::Di, Scenario::SingleArm),
        (
            "bh_single_arm_closed_form_oracle",
            Scheme::Bh,
            Scenario::SingleArm,
        ),
        (
            "bh_symmetric_closed_form_oracle",
            Scheme::Bh,
            Scenario::Symmetric,
        ),
    ] {
        let mut points = Vec::with_capacity(200);
        while points.len() < 200 {
            let d = Draw::new(&mut rng);
            let s = sensitivity(
                scheme,
                scenario,
                &input_moments(&d.p()),
                &d.bs1(),
                &d.bs2(),
                d.phi,
                Some(d.phi_l),
            );
            if let Sensitivity::Finite(v) = s {
                points.push((d, v));
            }
        }
        let devs: Vec<f64> = points
            .par_iter()
            .map(|(d, closed)| {
                let obs = Observable::for_scheme(scheme, d.phi_l);
                match sensitivity_oracle(
                    &su2_input(&d.p()),
                    &d.bs1(),
                    &d.bs2(),
                    scenario,
                    obs,
                    d.phi,
                    h,
                ) {
                    Ok(Sensitivity::Finite(o)) => relative(*closed, o),
                    _ => f64::INFINITY,
                }
            })
            .collect();
        add(name, 1e-5, max_dev(devs));
    }

    let placement_draws = draws(&mut rng, 100);
    let placement: Vec<f64> = placement_draws
        .par_iter()
        .map(|d| {
            let psi = su2_input(&d.p());
            let at = |scenario| {
                sensitivity_oracle(&psi, &d.bs1(), &d.bs2(), scenario, Observable::Nd, d.phi, h)
            };
            match (at(Scenario::SingleArm), at(Scenario::Symmetric)) {
                (Ok(Sensitivity::Finite(a)), Ok(Sensitivity::Finite(b))) => relative(a, b),
                (Ok(Sensitivity::Divergent), Ok(Sensitivity::Divergent)) => 0.0,
                _ => f64::INFINITY,
            }
        })
        .collect();
    add("di_placement_independence", 1e-6, max_dev(placement));

    let crb_draws = draws(&mut rng, 5000);
    let crb: Vec<f64> = crb_draws
        .par_iter()
        .enumerate()
        .map(|(i, d)| {
            let scheme = Scheme::ALL[i % 3];
            let scenario = if (i / 3) % 2 == 0 {
                Scenario::SingleArm
            } else {
                Scenario::Symmetric
            };
            let m = input_moments(&d.p());
            let r = qfi_report_from_moments(&m, &d.bs1());
            let bound = match (scheme, scenario) {
                (Scheme::Bh, Scenario::Symmetric) => qcrb(r.f_b_exact),
                _ => matching_qcrb(&r, scheme, scenario),
            };
            match sensitivity(
                scheme,
                scenario,
                &m,
                &d.bs1(),
                &d.bs2(),
                d.phi,
                Some(d.phi_l),
            ) {
                Sensitivity::Finite(v) => (bound - v).max(0.0),
                Sensitivity::Divergent => 0.0,
            }
        })
        .collect();
    add("cramer_rao_dominance", 1e-9, max_dev(crb));

    let mut table = Table::new(["check", "samples", "max_deviation", "tolerance", "passed"]);
    let mut failed = 0;
    for c in &checks {
        let passed = c.max_deviation <= c.tolerance;
        failed += usize::from(!passed);
        table.push(vec![
            Cell::Text(c.name.into()),
            Cell::Int(c.samples as u64),
            Cell::num(c.max_deviation),
            Cell::num(c.tolerance),
            Cell::Bool(passed),
        ]);
    }
    let mut extra = Map::new();
    extra.insert("checks".into(), Value::from(checks.len()));
    extra.insert("failed".into(), Value::from(failed));
    (table, extra, failed)
}
