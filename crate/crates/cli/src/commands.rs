//! Subcommand bodies. Each writes its tables and a `config.json` echo into
//! the output directory.

use std::f64::consts::PI;
use std::path::Path;

use levsqueeze::angular::{make_gaussian_beam_with, BeamSpec};
use levsqueeze::detect::{
    bare_mode_covariance, input_spectra_relative, interacting_covariance, s_min, s_min_opt_u, s_min_opt_u_phase,
    s_min_quadrature_branch, wigner_grid, Susceptibility, WignerSource,
};
use levsqueeze::optimize::{optimize as run_optimize, scan_1d, OptimizationProblem};
use levsqueeze::output::{write_atomic, Table};
use levsqueeze::physics::{derive_alpha0, derive_libration_mode, derive_motion_modes, DerivedReport, MechanicalMode, ModeKind};
use levsqueeze::scatter::{irp_grid, ScatterConfig};
use levsqueeze::squeeze::{mode_distribution, recoil_ratio, reheating_trajectory, OverlapResult, SqueezeParams};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;
use crate::CliError;

struct Out<'a> {
    dir: &'a Path,
}

impl<'a> Out<'a> {
    fn new(dir: &'a Path, cfg: &Config) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::config("out", format!("cannot create {}: {e}", dir.display())))?;
        let out = Out { dir };
        out.text("config.json", &cfg.echo())?;
        Ok(out)
    }

    fn text(&self, name: &str, s: &str) -> Result<(), CliError> {
        write_atomic(&self.dir.join(name), s.as_bytes())?;
        Ok(())
    }

    fn csv(&self, name: &str, t: &Table) -> Result<(), CliError> {
        self.text(name, &t.to_csv())
    }

    fn json<T: Serialize>(&self, name: &str, v: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(v).expect("output serializes");
        s.push('\n');
        self.text(name, &s)
    }
}

fn derived(cfg: &Config) -> Result<(DerivedReport, MechanicalMode), CliError> {
    match cfg.mode {
        ModeKind::Motion(axis) => {
            let p = cfg.particle.expect("resolved");
            let report = DerivedReport::for_particle(&p, &cfg.laser)?;
            let mode = derive_motion_modes(&p, &cfg.laser)?[axis.index()];
            Ok((report, mode))
        }
        ModeKind::Libration(axis) => {
            let r = cfg.rotor.expect("resolved");
            let report = DerivedReport::for_rotor(&r, &cfg.laser)?;
            Ok((report, derive_libration_mode(&r, &cfg.laser, axis)?))
        }
    }
}

fn beam_overlaps(cfg: &Config) -> Result<Vec<(BeamSpec, OverlapResult)>, CliError> {
    let target = mode_distribution(cfg.mode, cfg.laser.arg_alpha0)?;
    cfg.beams
        .iter()
        .map(|b| Ok((*b, OverlapResult::compute(&b.build(cfg.quad)?, &target, cfg.quad)?)))
        .collect()
}

fn overlap_json(beams: &[(BeamSpec, OverlapResult)]) -> Value {
    Value::Array(
        beams
            .iter()
            .map(|(b, xi)| {
                json!({
                    "label": b.label(),
                    "beam": b,
                    "xi": [xi.xi.re, xi.xi.im],
                    "xi_modulus": xi.modulus(),
                    "xi_phase": xi.phase(),
                })
            })
            .collect(),
    )
}

fn squeeze_at(cfg: &Config, r: f64, phase: f64, xi: &OverlapResult) -> Result<SqueezeParams, CliError> {
    Ok(SqueezeParams::new(r, cfg.squeezer.reference.resolve(phase, xi))?)
}

pub fn recoil(cfg: &Config, dir: &Path) -> Result<(), CliError> {
    let out = Out::new(dir, cfg)?;
    let (report, mode) = derived(cfg)?;
    let beams = if cfg.recoil.perfect_overlap { Vec::new() } else { beam_overlaps(cfg)? };
    let mut columns = vec!["r_db".to_string(), "r".to_string(), "phase".to_string(), "ratio_perfect".to_string()];
    columns.extend(beams.iter().map(|(b, _)| format!("ratio_{}", b.label())));
    let mut table = Table::new(columns);
    let perfect = OverlapResult::perfect();
    for (db, r) in cfg.squeezer.levels()? {
        for &phase in &cfg.squeezer.phase {
            let mut row = vec![db, r, phase];
            for xi in std::iter::once(&perfect).chain(beams.iter().map(|(_, x)| x)) {
                row.push(recoil_ratio(xi, &squeeze_at(cfg, r, phase, xi)?));
            }
            table.push(row);
        }
    }
    out.csv("recoil.csv", &table)?;
    out.json(
        "derived.json",
        &json!({ "derived": report, "mode": mode, "overlaps": overlap_json(&beams) }),
    )?;
    if !cfg.recoil.reheating_times.is_empty() {
        let (_, r) = cfg.squeezer.levels()?[0];
        let xi = beams.first().map(|(_, x)| *x).unwrap_or(perfect);
        let ratio = recoil_ratio(&xi, &squeeze_at(cfg, r, cfg.squeezer.phase[0], &xi)?);
        let t = reheating_trajectory(&mode, ratio, cfg.recoil.n0, &cfg.recoil.reheating_times)?;
        out.csv("reheating.csv", &t)?;
    }
    Ok(())
}

fn first_beam(cfg: &Config) -> BeamSpec {
    cfg.beams.first().cloned().unwrap_or(BeamSpec {
        na: 0.9,
        axis: [0.0, 0.0, -1.0],
        polarization_angle: 0.0,
    })
}

pub fn irp(cfg: &Config, dir: &Path) -> Result<(), CliError> {
    let out = Out::new(dir, cfg)?;
    let (report, mode) = derived(cfg)?;
    let (db, r, phase) = cfg.squeezer.single("irp")?;
    let spec = first_beam(cfg);
    let beam = spec.build(cfg.quad)?;
    let target = mode_distribution(cfg.mode, cfg.laser.arg_alpha0)?;
    let xi = OverlapResult::compute(&beam, &target, cfg.quad)?;
    let sq = squeeze_at(cfg, r, phase, &xi)?;
    let alpha0 = derive_alpha0(&cfg.laser).value;
    let sc = ScatterConfig::new(mode, target, beam, sq, alpha0, cfg.irp.units, cfg.quad)?;
    let grid = irp_grid(&sc, cfg.irp.grid)?;
    out.csv("irp.csv", &grid.table)?;
    out.json(
        "irp.json",
        &json!({
            "beam": spec,
            "db": db,
            "r": r,
            "phase": phase,
            "absolute_phase": sq.phi,
            "grid": cfg.irp.grid,
            "summary": grid.metadata,
        }),
    )?;
    out.json("derived.json", &json!({ "derived": report, "mode": mode }))?;
    Ok(())
}

fn susceptibility(cfg: &Config) -> Result<Susceptibility, CliError> {
    let s = &cfg.sensitivity;
    Ok(match s.omega_ratio {
        Some(w) => Susceptibility::new(w, 1.0, s.damping_ratio)?,
        None => Susceptibility::new(1e-3, 1.0, s.damping_ratio)?,
    })
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(CliError::config("sensitivity.u_min", "need 0 < u_min < u_max and u_points >= 2"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect())
}

pub fn sensitivity(cfg: &Config, dir: &Path) -> Result<(), CliError> {
    let out = Out::new(dir, cfg)?;
    let s = &cfg.sensitivity;
    let chi = susceptibility(cfg)?;
    let (xi_mod, xi_source) = match s.xi {
        Some(x) => {
            if !(0.0..=1.0).contains(&x) {
                return Err(CliError::config("sensitivity.xi", "must lie in [0, 1]"));
            }
            (x, "config".to_string())
        }
        None => match beam_overlaps(cfg)?.first() {
            Some((b, xi)) => (xi.modulus(), b.label()),
            None => (1.0, "perfect".to_string()),
        },
    };
    let xi_sq = xi_mod * xi_mod;
    let us = log_grid(s.u_min, s.u_max, s.u_points)?;
    let levels = cfg.squeezer.levels()?;
    let mut columns = vec!["u".to_string(), "vacuum".to_string()];
    let mut curves = Vec::new();
    for &(db, r) in &levels {
        for &phase in &cfg.squeezer.phase {
            columns.push(format!("db{db}_phase{phase}"));
            curves.push((db, r, phase, input_spectra_relative(xi_sq, r, phase)));
        }
    }
    let vacuum = input_spectra_relative(xi_sq, 0.0, 0.0);
    let mut table = Table::new(columns);
    for &u in &us {
        let mut row = vec![u, s_min(&vacuum, &chi, u)?];
        for (_, _, _, sp) in &curves {
            row.push(s_min(sp, &chi, u)?);
        }
        table.push(row);
    }
    out.csv("sensitivity_u.csv", &table)?;

    let mut summary = Vec::new();
    for (db, r, phase, sp) in &curves {
        let (u_opt, value) = s_min_opt_u(sp, &chi)?;
        let (phi_best, best) = s_min_opt_u_phase(xi_sq, *r, &chi);
        let (phi_q, quad) = s_min_quadrature_branch(xi_sq, *r, &chi);
        summary.push(json!({
            "db": db, "r": r, "phase": phase,
            "u_opt": u_opt, "s_min_opt": value,
            "best_phase": phi_best, "s_min_opt_phase": best,
            "quadrature_phase": phi_q, "s_min_quadrature": quad,
        }));
    }
    let (vac_u, vac_value) = s_min_opt_u(&vacuum, &chi)?;

    let mut heat = Table::new(["e2r", "xi", "xi_sq", "s_min_opt"]);
    for &e2r in &s.heatmap_e2r {
        if !(e2r >= 1.0) {
            return Err(CliError::config("sensitivity.heatmap_e2r", "values must be at least 1"));
        }
        let r = 0.5 * e2r.ln();
        for &x in &s.heatmap_xi {
            if !(0.0..=1.0).contains(&x) {
                return Err(CliError::config("sensitivity.heatmap_xi", "values must lie in [0, 1]"));
            }
            let sp = input_spectra_relative(x * x, r, 1.5 * PI);
            heat.push(vec![e2r, x, x * x, s_min_opt_u(&sp, &chi)?.1]);
        }
    }
    out.csv("heatmap.csv", &heat)?;

    let target = mode_distribution(cfg.mode, cfg.laser.arg_alpha0)?;
    let mut ticks = Table::new(["na", "xi_modulus", "xi_sq"]);
    for &na in &s.na_ticks {
        let beam = make_gaussian_beam_with(na, [0.0, 0.0, -1.0], 0.0, cfg.quad)?;
        let xi = OverlapResult::compute(&beam, &target, cfg.quad)?;
        ticks.push(vec![na, xi.modulus(), xi.modulus_sq()]);
    }
    out.csv("na_ticks.csv", &ticks)?;
    out.json(
        "sensitivity.json",
        &json!({
            "xi_modulus": xi_mod,
            "xi_source": xi_source,
            "susceptibility": chi,
            "vacuum": { "u_opt": vac_u, "s_min_opt": vac_value },
            "curves": summary,
        }),
    )?;
    Ok(())
}

pub fn optimize(cfg: &Config, dir: &Path) -> Result<(), CliError> {
    let out = Out::new(dir, cfg)?;
    let o = &cfg.optimize;
    let (db, _, phase) = cfg.squeezer.single("optimize")?;
    let mut base = o.base;
    base.db = db;
    base.phase = phase;
    let problem = OptimizationProblem {
        objective: o.objective,
        target: cfg.mode,
        family: o.family,
        free: o.free.clone(),
        base,
        phase_reference: cfg.squeezer.reference,
        start: o.start,
        quad: cfg.quad,
        arg_alpha0: cfg.laser.arg_alpha0,
        chi: Some(susceptibility(cfg)?),
    };
    problem.validate().map_err(prefix_optimize)?;
    let result = run_optimize(&problem, o.budget, cfg.seed)?;
    out.csv("trace.csv", &result.trace_table(&problem))?;
    out.json(
        "optimize.json",
        &json!({
            "objective": problem.objective,
            "family": problem.family,
            "free": problem.free,
            "budget": o.budget,
            "seed": cfg.seed,
            "best": result.best,
            "evaluations": result.evaluations,
            "scan_evaluations": result.scan_evaluations,
            "distinct_geometries": result.distinct_geometries,
        }),
    )?;
    if let Some(sc) = &o.scan {
        let scan = scan_1d(&problem, sc.parameter, sc.lo, sc.hi, sc.n)?;
        out.csv("scan.csv", &scan.table)?;
        out.json("scan.json", &scan)?;
    }
    Ok(())
}

fn prefix_optimize(e: levsqueeze::Error) -> CliError {
    match e {
        levsqueeze::Error::InvalidInput { field, reason } if !field.starts_with("optimize") => {
            CliError::config(format!("optimize.{field}"), reason)
        }
        other => other.into(),
    }
}

pub fn wigner(cfg: &Config, dir: &Path) -> Result<(), CliError> {
    let out = Out::new(dir, cfg)?;
    let w = &cfg.wigner;
    let (db, r, phase) = cfg.squeezer.single("wigner")?;
    if !(0.0..=1.0).contains(&w.xi) {
        return Err(CliError::config("wigner.xi", "must lie in [0, 1]"));
    }
    let cov = match w.source {
        WignerSource::InteractingInput => interacting_covariance(&input_spectra_relative(w.xi * w.xi, r, phase))?,
        WignerSource::BareMode => bare_mode_covariance(r, phase)?,
    };
    let (table, integral) = wigner_grid(&cov, w.points, w.points, w.width)?;
    out.csv("wigner.csv", &table)?;
    out.json(
        "wigner.json",
        &json!({
            "source": w.source,
            "db": db,
            "r": r,
            "phase": phase,
            "xi": w.xi,
            "covariance": cov,
            "determinant": cov.determinant(),
            "grid_integral": integral,
        }),
    )?;
    Ok(())
}
