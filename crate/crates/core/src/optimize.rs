//! Derivative-free search over beam parameters: a seeded Latin-hypercube
//! scan followed by a bounded Nelder–Mead refinement.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{make_gaussian_beam_with, AngularDistribution, QuadSpec};
use crate::detect::{input_spectra_relative, s_min_opt_u, Susceptibility};
use crate::output::Table;
use crate::physics::ModeKind;
use crate::squeeze::{db_to_r, mode_distribution, recoil_ratio_relative, OverlapResult, PhaseReference};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    RecoilRatio,
    /// `min_u S_min/S_SQL` at the problem's susceptibility.
    SMinOpt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Na,
    /// Polar angle of the propagation axis.
    AxisTheta,
    /// Azimuth of the propagation axis.
    AxisPhi,
    Polarization,
    /// Squeezing phase, read through the problem's phase reference.
    Phase,
    /// Mixing angle `w` of `cos w·B(+a) + sin w·B(−a)`.
    PairWeight,
    Db,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::Na => "na",
            Parameter::AxisTheta => "axis_theta",
            Parameter::AxisPhi => "axis_phi",
            Parameter::Polarization => "polarization",
            Parameter::Phase => "phase",
            Parameter::PairWeight => "pair_weight",
            Parameter::Db => "db",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamFamily {
    Gaussian,
    /// Superposition of a beam along the axis and one against it.
    Pair,
    /// `A_s = A_μ*`, so `ξ = 1`.
    Perfect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bound {
    pub parameter: Parameter,
    #[serde(deserialize_with = "crate::phase::deserialize_angle")]
    pub lo: f64,
    #[serde(deserialize_with = "crate::phase::deserialize_angle")]
    pub hi: f64,
}

/// Values of every parameter; free ones are overwritten during the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Point {
    pub na: f64,
    #[serde(deserialize_with = "crate::phase::deserialize_angle")]
    pub axis_theta: f64,
    #[serde(deserialize_with = "crate::phase::deserialize_angle")]
    pub axis_phi: f64,
    #[serde(deserialize_with = "crate::phase::deserialize_angle")]
    pub polarization: f64,
    #[serde(deserialize_with = "crate::phase::deserialize_angle")]
    pub phase: f64,
    #[serde(deserialize_with = "crate::phase::deserialize_angle")]
    pub pair_weight: f64,
    pub db: f64,
}

impl Default for Point {
    fn default() -> Self {
        Point {
            na: 0.9,
            axis_theta: PI,
            axis_phi: 0.0,
            polarization: 0.0,
            phase: 0.0,
            pair_weight: 0.0,
            db: 15.0,
        }
    }
}

impl Point {
    pub fn get(&self, p: Parameter) -> f64 {
        match p {
            Parameter::Na => self.na,
            Parameter::AxisTheta => self.axis_theta,
            Parameter::AxisPhi => self.axis_phi,
            Parameter::Polarization => self.polarization,
            Parameter::Phase => self.phase,
            Parameter::PairWeight => self.pair_weight,
            Parameter::Db => self.db,
        }
    }

    pub fn set(&mut self, p: Parameter, v: f64) {
        match p {
            Parameter::Na => self.na = v,
            Parameter::AxisTheta => self.axis_theta = v,
            Parameter::AxisPhi => self.axis_phi = v,
            Parameter::Polarization => self.polarization = v,
            Parameter::Phase => self.phase = v,
            Parameter::PairWeight => self.pair_weight = v,
            Parameter::Db => self.db = v,
        }
    }

    fn axis(&self) -> [f64; 3] {
        let (st, ct) = self.axis_theta.sin_cos();
        let (sp, cp) = self.axis_phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationProblem {
    pub objective: Objective,
    pub target: ModeKind,
    pub family: BeamFamily,
    pub free: Vec<Bound>,
    pub base: Point,
    pub phase_reference: PhaseReference,
    /// Evaluated before the scan when present.
    pub start: Option<Point>,
    pub quad: QuadSpec,
    pub arg_alpha0: f64,
    /// Susceptibility for [`Objective::SMinOpt`]; the low-frequency limit when absent.
    pub chi: Option<Susceptibility>,
}

impl OptimizationProblem {
    pub fn validate(&self) -> Result<()> {
        if self.free.is_empty() {
            return Err(Error::invalid("optimize.free", "at least one free parameter is required"));
        }
        for b in &self.free {
            if !(b.lo.is_finite() && b.hi.is_finite() && b.lo <= b.hi) {
                return Err(Error::invalid(
                    format!("optimize.free.{}", b.parameter.name()),
                    format!("bounds [{}, {}] must be finite and ordered", b.lo, b.hi),
                ));
            }
            let (lo, hi) = match b.parameter {
                Parameter::Na => (1e-6, 1.0),
                Parameter::PairWeight => (-PI / 2.0, PI / 2.0),
                Parameter::Db => (0.0, 200.0),
                Parameter::AxisTheta => (0.0, PI),
                _ => (f64::NEG_INFINITY, f64::INFINITY),
            };
            if b.lo < lo || b.hi > hi {
                return Err(Error::invalid(
                    format!("optimize.free.{}", b.parameter.name()),
                    format!("bounds must lie within [{lo}, {hi}]"),
                ));
            }
        }
        let mut seen: Vec<Parameter> = self.free.iter().map(|b| b.parameter).collect();
        seen.sort_by_key(|p| *p as u8);
        seen.dedup();
        if seen.len() != self.free.len() {
            return Err(Error::invalid("optimize.free", "a parameter is listed twice"));
        }
        Ok(())
    }

    fn point_from(&self, x: &[f64]) -> Point {
        let mut p = self.base;
        for (b, &v) in self.free.iter().zip(x) {
            p.set(b.parameter, v.clamp(b.lo, b.hi));
        }
        p
    }

    fn coords(&self, p: &Point) -> Vec<f64> {
        self.free.iter().map(|b| p.get(b.parameter).clamp(b.lo, b.hi)).collect()
    }
}

type GeometryKey = [i64; 5];

fn quantize(x: f64) -> i64 {
    (x / 1e-12).round() as i64
}

/// Evaluates objectives, caching `ξ` by beam geometry.
pub struct Evaluator<'a> {
    problem: &'a OptimizationProblem,
    target: AngularDistribution,
    chi: Susceptibility,
    cache: RwLock<HashMap<GeometryKey, Complex64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub point: Point,
    pub value: f64,
    pub xi: [f64; 2],
    pub xi_modulus: f64,
    /// `φ_s − 2ψ` at this point.
    pub relative_phase: f64,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a OptimizationProblem) -> Result<Self> {
        problem.validate()?;
        let chi = match problem.chi {
            Some(c) => c,
            None => Susceptibility::low_frequency(1.0)?,
        };
        Ok(Evaluator {
            problem,
            target: mode_distribution(problem.target, problem.arg_alpha0)?,
            chi,
            cache: RwLock::new(HashMap::new()),
        })
    }

    fn beam(&self, p: &Point) -> Result<AngularDistribution> {
        let spec = self.problem.quad;
        let axis = p.axis();
        match self.problem.family {
            BeamFamily::Gaussian | BeamFamily::Perfect => make_gaussian_beam_with(p.na, axis, p.polarization, spec),
            BeamFamily::Pair => {
                let fwd = make_gaussian_beam_with(p.na, axis, p.polarization, spec)?;
                let back = make_gaussian_beam_with(p.na, [-axis[0], -axis[1], -axis[2]], p.polarization, spec)?;
                let (s, c) = p.pair_weight.sin_cos();
                AngularDistribution::superpose(
                    "pair",
                    vec![(Complex64::new(c, 0.0), fwd), (Complex64::new(s, 0.0), back)],
                    spec,
                )
            }
        }
    }

    pub fn overlap(&self, p: &Point) -> Result<OverlapResult> {
        if self.problem.family == BeamFamily::Perfect {
            return Ok(OverlapResult::perfect());
        }
        let weight = if self.problem.family == BeamFamily::Pair { p.pair_weight } else { 0.0 };
        let key = [
            quantize(p.na),
            quantize(p.axis_theta),
            quantize(p.axis_phi),
            quantize(p.polarization),
            quantize(weight),
        ];
        if let Some(xi) = self.cache.read().expect("cache lock").get(&key) {
            return OverlapResult::new(*xi);
        }
        let xi = OverlapResult::compute(&self.beam(p)?, &self.target, self.problem.quad)?;
        self.cache.write().expect("cache lock").insert(key, xi.xi);
        Ok(xi)
    }

    pub fn evaluate(&self, p: &Point) -> Result<Evaluation> {
        let located = |e: Error| {
            let at = serde_json::to_string(p).unwrap_or_default();
            match e {
                Error::Numerical(m) => Error::Numerical(format!("{m} at {at}")),
                Error::InvalidInput { field, reason } => Error::InvalidInput {
                    field,
                    reason: format!("{reason} at {at}"),
                },
                other => other,
            }
        };
        let xi = self.overlap(p).map_err(located)?;
        let r = db_to_r(p.db).map_err(located)?;
        let phi_s = self.problem.phase_reference.resolve(p.phase, &xi);
        let rel = (phi_s - 2.0 * xi.phase()).rem_euclid(2.0 * PI);
        let value = match self.problem.objective {
            Objective::RecoilRatio => recoil_ratio_relative(xi.modulus_sq(), r, rel),
            Objective::SMinOpt => {
                let s = input_spectra_relative(xi.modulus_sq(), r, rel);
                s_min_opt_u(&s, &self.chi).map_err(located)?.1
            }
        };
        if !value.is_finite() {
            return Err(located(Error::Numerical("objective is not finite".into())));
        }
        Ok(Evaluation {
            point: *p,
            value,
            xi: [xi.xi.re, xi.xi.im],
            xi_modulus: xi.modulus(),
            relative_phase: rel,
        })
    }

    pub fn cached_geometries(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    pub best: Evaluation,
    pub evaluations: usize,
    pub scan_evaluations: usize,
    pub distinct_geometries: usize,
    pub trace: Vec<Evaluation>,
}

impl OptimizationResult {
    /// One row per evaluation: index, free parameters, value, |ξ|.
    pub fn trace_table(&self, problem: &OptimizationProblem) -> Table {
        let mut cols = vec!["eval".to_string()];
        cols.extend(problem.free.iter().map(|b| b.parameter.name().to_string()));
        cols.extend(["value", "xi_modulus", "relative_phase"].map(String::from));
        let mut t = Table::new(cols);
        for (i, e) in self.trace.iter().enumerate() {
            let mut row = vec![i as f64];
            row.extend(problem.free.iter().map(|b| e.point.get(b.parameter)));
            row.extend([e.value, e.xi_modulus, e.relative_phase]);
            t.push(row);
        }
        t
    }
}

fn latin_hypercube(problem: &OptimizationProblem, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let d = problem.free.len();
    let mut pts = vec![vec![0.0; d]; n];
    for (k, b) in problem.free.iter().enumerate() {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        for (i, pt) in pts.iter_mut().enumerate() {
            let u: f64 = rng.gen();
            pt[k] = b.lo + (perm[i] as f64 + u) / n as f64 * (b.hi - b.lo);
        }
    }
    pts
}

/// Minimizes the problem's objective with at most `budget` evaluations.
pub fn optimize(problem: &OptimizationProblem, budget: usize, seed: u64) -> Result<OptimizationResult> {
    let eval = Evaluator::new(problem)?;
    let d = problem.free.len();
    if budget < 10 * d {
        return Err(Error::invalid(
            "optimize.budget",
            format!("budget {budget} is below 10 evaluations per free parameter ({})", 10 * d),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace: Vec<Evaluation> = Vec::with_capacity(budget);
    if let Some(start) = &problem.start {
        let p = problem.point_from(&problem.coords(start));
        trace.push(eval.evaluate(&p)?);
    }
    let n_scan = (budget / 2).max(5 * d).min(budget - trace.len());
    let scan_points: Vec<Point> = latin_hypercube(problem, n_scan, &mut rng)
        .iter()
        .map(|x| problem.point_from(x))
        .collect();
    let scanned: Vec<Evaluation> = scan_points
        .par_iter()
        .map(|p| eval.evaluate(p))
        .collect::<Result<_>>()?;
    trace.extend(scanned);
    let scan_evaluations = trace.len();

    let best_index = |t: &[Evaluation]| {
        t.iter()
            .enumerate()
            .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
            .map(|(i, _)| i)
            .expect("non-empty trace")
    };
    let seed_point = problem.coords(&trace[best_index(&trace)].point);
    nelder_mead(problem, &eval, seed_point, budget, &mut trace)?;

    let best = trace[best_index(&trace)];
    Ok(OptimizationResult {
        best,
        evaluations: trace.len(),
        scan_evaluations,
        distinct_geometries: eval.cached_geometries(),
        trace,
    })
}

fn nelder_mead(
    problem: &OptimizationProblem,
    eval: &Evaluator<'_>,
    x0: Vec<f64>,
    budget: usize,
    trace: &mut Vec<Evaluation>,
) -> Result<()> {
    let d = x0.len();
    let clamp = |x: &mut Vec<f64>| {
        for (v, b) in x.iter_mut().zip(&problem.free) {
            *v = v.clamp(b.lo, b.hi);
        }
    };
    let f = |x: &[f64], trace: &mut Vec<Evaluation>| -> Result<Option<f64>> {
        if trace.len() >= budget {
            return Ok(None);
        }
        let e = eval.evaluate(&problem.point_from(x))?;
        trace.push(e);
        Ok(Some(e.value))
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let Some(f0) = f(&x0, trace)? else { return Ok(()) };
    simplex.push((x0.clone(), f0));
    for (k, b) in problem.free.iter().enumerate() {
        let mut x = x0.clone();
        let step = 0.1 * (b.hi - b.lo);
        x[k] = if x[k] + step <= b.hi { x[k] + step } else { x[k] - step };
        let Some(fx) = f(&x, trace)? else { return Ok(()) };
        simplex.push((x, fx));
    }
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[d].1 - simplex[0].1;
        let size = simplex
            .iter()
            .skip(1)
            .flat_map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .zip(&problem.free)
                    .map(|((a, b), bd)| (a - b).abs() / (bd.hi - bd.lo).max(1e-300))
            })
            .fold(0.0, f64::max);
        if spread.abs() <= 1e-15 * simplex[0].1.abs().max(1e-300) && size < 1e-9 {
            return Ok(());
        }
        let centroid: Vec<f64> = (0..d)
            .map(|k| simplex[..d].iter().map(|(x, _)| x[k]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = (0..d).map(|k| centroid[k] + t * (simplex[d].0[k] - centroid[k])).collect();
            clamp(&mut x);
            x
        };
        let xr = along(-1.0);
        let Some(fr) = f(&xr, trace)? else { return Ok(()) };
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let Some(fe) = f(&xe, trace)? else { return Ok(()) };
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, t) = if fr < simplex[d].1 { (along(-0.5), fr) } else { (along(0.5), simplex[d].1) };
        let Some(fc) = f(&xc, trace)? else { return Ok(()) };
        if fc < t {
            simplex[d] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for item in simplex.iter_mut().skip(1) {
            let mut x: Vec<f64> = best.iter().zip(&item.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
            clamp(&mut x);
            let Some(fx) = f(&x, trace)? else { return Ok(()) };
            *item = (x, fx);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct Scan1d {
    pub parameter: Parameter,
    pub argmin: f64,
    pub min: f64,
    pub argmax: f64,
    pub max: f64,
    pub monotonicity: Monotonicity,
    #[serde(skip)]
    pub table: Table,
}

/// Objective on `n` uniformly spaced values of `parameter` in `[lo, hi]`,
/// every other parameter held at the problem's base point.
/// Columns `<parameter>, value, xi_modulus, relative_phase`.
pub fn scan_1d(problem: &OptimizationProblem, parameter: Parameter, lo: f64, hi: f64, n: usize) -> Result<Scan1d> {
    if n < 2 {
        return Err(Error::invalid("scan.n", "need at least 2 points"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid("scan.range", "must be finite and increasing"));
    }
    let mut scan_problem = problem.clone();
    scan_problem.free = vec![Bound { parameter, lo, hi }];
    let eval = Evaluator::new(&scan_problem)?;
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let evals: Vec<Evaluation> = xs
        .par_iter()
        .map(|&x| {
            let mut p = problem.base;
            p.set(parameter, x);
            eval.evaluate(&p)
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new([parameter.name(), "value", "xi_modulus", "relative_phase"]);
    for (x, e) in xs.iter().zip(&evals) {
        table.push(vec![*x, e.value, e.xi_modulus, e.relative_phase]);
    }
    let values: Vec<f64> = evals.iter().map(|e| e.value).collect();
    let (imin, imax) = values.iter().enumerate().fold((0, 0), |(lo_i, hi_i), (i, v)| {
        (if *v < values[lo_i] { i } else { lo_i }, if *v > values[hi_i] { i } else { hi_i })
    });
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let tol = 1e-12 * scale;
    let monotonicity = if diffs.iter().all(|d| d.abs() <= tol) {
        Monotonicity::Constant
    } else if diffs.iter().all(|d| *d >= -tol) {
        Monotonicity::Increasing
    } else if diffs.iter().all(|d| *d <= tol) {
        Monotonicity::Decreasing
    } else {
        Monotonicity::None
    };
    Ok(Scan1d {
        parameter,
        argmin: xs[imin],
        min: values[imin],
        argmax: xs[imax],
        max: values[imax],
        monotonicity,
        table,
    })
}
