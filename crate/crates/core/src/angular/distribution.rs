use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::quadrature::QuadratureRule;
use super::{
    cdot_real, cross, dot, normalize, transverse, Axis, CVec3, Direction, Polarization, QuadSpec,
    Vec3,
};
use crate::physics::geometry_factor;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub label: String,
    pub params: serde_json::Value,
}

/// Shape of a distribution before its complex prefactor is applied.
#[derive(Debug, Clone)]
pub enum DistributionKind {
    /// `[(e_k − e_z)·e_μ] P⊥(e_x)`.
    Motion { axis: Axis },
    /// `P⊥(d)`.
    Dipole { axis: Vec3 },
    /// `exp(−(sin ϑ/NA)²) Θ(e_k·a) P⊥(p)`.
    Gaussian {
        na: f64,
        axis: Vec3,
        polarization: Vec3,
    },
    /// Field samples on the nodes of a laboratory-frame rule.
    Tabulated(Table),
    /// `Σ c_i A_i`.
    Superposition(Vec<(Complex64, AngularDistribution)>),
}

/// Samples of a transverse field on the nodes of a laboratory-frame rule.
/// Off-node directions take the value of the nearest node.
#[derive(Debug, Clone)]
pub struct Table {
    spec: QuadSpec,
    cos_nodes: Vec<f64>,
    values: Vec<CVec3>,
}

impl Table {
    fn lookup(&self, k: &Vec3) -> CVec3 {
        let c = k[2];
        let i = match self.cos_nodes.binary_search_by(|x| x.total_cmp(&c)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i == self.cos_nodes.len() => i - 1,
            Err(i) => {
                if (self.cos_nodes[i] - c).abs() < (c - self.cos_nodes[i - 1]).abs() {
                    i
                } else {
                    i - 1
                }
            }
        };
        let n_phi = self.spec.n_phi;
        let phi = k[1].atan2(k[0]).rem_euclid(2.0 * PI);
        let j = (phi / (2.0 * PI / n_phi as f64)).round() as usize % n_phi;
        self.values[i * n_phi + j]
    }
}

#[derive(Debug, Clone, Copy)]
struct CutFrame {
    pole: Vec3,
    breaks: [f64; 3],
    n_breaks: usize,
}

/// A square-integrable amplitude `A(e_k, ε) = v(e_k)·ε` on the sphere.
#[derive(Debug, Clone)]
pub struct AngularDistribution {
    metadata: Metadata,
    kind: DistributionKind,
    scale: Complex64,
    norm: f64,
    conjugated: bool,
}

impl AngularDistribution {
    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn label(&self) -> &str {
        &self.metadata.label
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    /// `∫ Σ_pol |A|²` as measured when the distribution was built.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Transverse field vector at the unit direction `k`.
    pub fn field(&self, k: &Vec3) -> CVec3 {
        let v = self.raw_field(k);
        if self.conjugated {
            v.map(|c| c.conj())
        } else {
            v
        }
    }

    /// Complex conjugate `A*`, the distribution with unit overlap with `A`.
    pub fn conjugate(&self) -> Self {
        let mut out = self.clone();
        out.conjugated = !out.conjugated;
        out.metadata.label = format!("conj({})", self.metadata.label);
        out
    }

    fn raw_field(&self, k: &Vec3) -> CVec3 {
        let s = self.scale;
        match &self.kind {
            DistributionKind::Motion { axis } => {
                let e = axis.unit();
                let weight = dot(k, &e) - e[2];
                if weight == 0.0 {
                    return [ZERO; 3];
                }
                real_field(&transverse(&[1.0, 0.0, 0.0], k), s * weight)
            }
            DistributionKind::Dipole { axis } => real_field(&transverse(axis, k), s),
            DistributionKind::Gaussian {
                na,
                axis,
                polarization,
            } => {
                let c = dot(k, axis);
                if c <= 0.0 {
                    return [ZERO; 3];
                }
                let sin2 = (1.0 - c * c).max(0.0);
                let envelope = (-sin2 / (na * na)).exp();
                real_field(&transverse(polarization, k), s * envelope)
            }
            DistributionKind::Tabulated(table) => {
                let v = table.lookup(k);
                [v[0] * s, v[1] * s, v[2] * s]
            }
            DistributionKind::Superposition(terms) => {
                let mut out = [ZERO; 3];
                for (c, d) in terms {
                    let v = d.field(k);
                    for (o, vi) in out.iter_mut().zip(v) {
                        *o += c * vi * s;
                    }
                }
                out
            }
        }
    }

    pub fn amplitude(&self, dir: &Direction, pol: Polarization) -> Complex64 {
        let basis = dir.basis();
        cdot_real(&self.field(&dir.unit()), basis.vector(pol))
    }

    /// Copy with every amplitude multiplied by `factor`; the stored norm
    /// follows, so the copy is reported as unnormalized.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        out.scale *= factor;
        out.norm *= factor.norm_sqr();
        out
    }

    /// Recomputes `∫ Σ_pol |A|²` at the given resolution.
    pub fn norm_with(&self, spec: QuadSpec) -> Result<f64> {
        let rule = rule_for(&[self], spec);
        sum_sq(self, &rule)
    }

    fn cut_frame(&self) -> Option<CutFrame> {
        match &self.kind {
            DistributionKind::Gaussian { na, axis, .. } => {
                let mut breaks = [0.0; 3];
                let mut n = 1;
                for s in [*na, 5.0 * na] {
                    if s < 1.0 {
                        breaks[n] = (1.0 - s * s).sqrt();
                        n += 1;
                    }
                }
                Some(CutFrame {
                    pole: *axis,
                    breaks,
                    n_breaks: n,
                })
            }
            _ => None,
        }
    }

    fn all_cut_breaks(&self) -> Vec<(Vec3, Vec<f64>)> {
        match &self.kind {
            DistributionKind::Superposition(terms) => {
                terms.iter().flat_map(|(_, d)| d.all_cut_breaks()).collect()
            }
            _ => self
                .cut_frame()
                .map(|f| vec![(f.pole, f.breaks[..f.n_breaks].to_vec())])
                .unwrap_or_default(),
        }
    }

    fn table_spec(&self) -> Option<QuadSpec> {
        match &self.kind {
            DistributionKind::Tabulated(t) => Some(t.spec),
            DistributionKind::Superposition(terms) => terms.iter().find_map(|(_, d)| d.table_spec()),
            _ => None,
        }
    }

    /// Linear combination `Σ c_i A_i`, renormalized numerically.
    pub fn superpose(
        label: impl Into<String>,
        terms: Vec<(Complex64, AngularDistribution)>,
        spec: QuadSpec,
    ) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("superposition", "no terms"));
        }
        let params = json!(terms
            .iter()
            .map(|(c, d)| json!({"weight": [c.re, c.im], "label": d.label()}))
            .collect::<Vec<_>>());
        let raw = AngularDistribution {
            metadata: Metadata {
                label: label.into(),
                params,
            },
            kind: DistributionKind::Superposition(terms),
            scale: Complex64::new(1.0, 0.0),
            norm: 1.0,
            conjugated: false,
        };
        raw.normalized(spec)
    }

    fn normalized(mut self, spec: QuadSpec) -> Result<Self> {
        let rule = rule_for(&[&self], spec);
        let n = sum_sq(&self, &rule)?;
        if !(n > 0.0) {
            return Err(Error::Numerical(format!(
                "distribution `{}` has zero norm",
                self.metadata.label
            )));
        }
        self.scale /= n.sqrt();
        self.norm = sum_sq(&self, &rule)?;
        Ok(self)
    }

    /// Builds a distribution from samples of `(A_θ, A_φ)` at laboratory
    /// angles, which must cover the nodes of a laboratory-frame rule once
    /// each. Returns the renormalized distribution and the norm it had
    /// before renormalization.
    pub fn from_samples(
        label: impl Into<String>,
        samples: &[(f64, f64, Complex64, Complex64)],
    ) -> Result<(Self, f64)> {
        let table_err = |reason: String| Error::invalid("table", reason);
        let mut thetas: Vec<f64> = samples.iter().map(|s| s.0).collect();
        thetas.sort_by(f64::total_cmp);
        thetas.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let n_theta = thetas.len();
        if n_theta < 2 || !samples.len().is_multiple_of(n_theta) {
            return Err(table_err(format!(
                "{} rows do not form a product grid",
                samples.len()
            )));
        }
        let n_phi = samples.len() / n_theta;
        let spec = QuadSpec::new(n_theta, n_phi)?;
        let rule = QuadratureRule::new(spec);
        let cos_nodes: Vec<f64> = (0..n_theta)
            .map(|i| rule.nodes()[i * n_phi].unit[2])
            .collect();
        let dphi = 2.0 * PI / n_phi as f64;
        let mut values = vec![None; n_theta * n_phi];
        for (row, &(theta, phi, a_t, a_p)) in samples.iter().enumerate() {
            let d = Direction::new(theta, phi).map_err(|e| table_err(format!("row {}: {e}", row + 1)))?;
            let c = theta.cos();
            let i = cos_nodes
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - c).abs().total_cmp(&(b.1 - c).abs()))
                .map(|(i, _)| i)
                .unwrap_or(0);
            let j = (d.phi / dphi).round() as usize % n_phi;
            let node = &rule.nodes()[i * n_phi + j].direction;
            let dphi_err = (node.phi - d.phi).abs().min(2.0 * PI - (node.phi - d.phi).abs());
            if (node.theta - theta).abs() > 1e-8 || dphi_err > 1e-8 {
                return Err(table_err(format!(
                    "row {} ({theta}, {phi}) is not a node of the {spec} laboratory rule",
                    row + 1
                )));
            }
            if values[i * n_phi + j].is_some() {
                return Err(table_err(format!("row {} duplicates a node", row + 1)));
            }
            let b = d.basis();
            let mut v = [ZERO; 3];
            for ax in 0..3 {
                v[ax] = a_t * b.e_theta[ax] + a_p * b.e_phi[ax];
            }
            values[i * n_phi + j] = Some(v);
        }
        let values: Vec<CVec3> = values.into_iter().map(|v| v.expect("all nodes covered")).collect();
        let dist = AngularDistribution {
            metadata: Metadata {
                label: label.into(),
                params: json!({"n_theta": n_theta, "n_phi": n_phi}),
            },
            kind: DistributionKind::Tabulated(Table {
                spec,
                cos_nodes,
                values,
            }),
            scale: Complex64::new(1.0, 0.0),
            norm: 1.0,
            conjugated: false,
        };
        let pre = sum_sq(&dist, &rule)?;
        let dist = dist.normalized(spec)?;
        Ok((dist, pre))
    }

    /// Reads a CSV table with header and columns
    /// `theta, phi, re_a_theta, im_a_theta, re_a_phi, im_a_phi`.
    pub fn load_table(path: &Path) -> Result<(Self, f64)> {
        let table_err = |reason: String| Error::Table {
            path: path.to_path_buf(),
            reason,
        };
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(file);
        let mut samples = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| table_err(e.to_string()))?;
            if record.len() != 6 {
                return Err(table_err(format!("row {} has {} columns, expected 6", i + 1, record.len())));
            }
            let mut x = [0.0; 6];
            for (k, field) in record.iter().enumerate() {
                x[k] = field
                    .parse()
                    .map_err(|_| table_err(format!("row {}: cannot parse `{field}`", i + 1)))?;
            }
            samples.push((x[0], x[1], Complex64::new(x[2], x[3]), Complex64::new(x[4], x[5])));
        }
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "table".into());
        Self::from_samples(label, &samples).map_err(|e| match e {
            Error::InvalidInput { reason, .. } => table_err(reason),
            other => other,
        })
    }

    /// Samples the distribution on the nodes of a laboratory-frame rule in
    /// the format read by [`AngularDistribution::load_table`].
    pub fn to_table_csv(&self, spec: QuadSpec) -> String {
        let rule = QuadratureRule::new(spec);
        let mut out = String::from("theta,phi,re_a_theta,im_a_theta,re_a_phi,im_a_phi\n");
        for node in rule.nodes() {
            let v = self.field(&node.unit);
            let a_t = cdot_real(&v, &node.basis.e_theta);
            let a_p = cdot_real(&v, &node.basis.e_phi);
            let row = [node.direction.theta, node.direction.phi, a_t.re, a_t.im, a_p.re, a_p.im];
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.17e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Parameters of a Gaussian beam as they appear in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSpec {
    pub na: f64,
    /// Propagation direction, not necessarily normalized.
    pub axis: Vec3,
    /// Radians.
    #[serde(default, deserialize_with = "crate::phase::deserialize_angle")]
    pub polarization_angle: f64,
}

impl BeamSpec {
    pub fn build(&self, spec: QuadSpec) -> Result<AngularDistribution> {
        make_gaussian_beam_with(self.na, self.axis, self.polarization_angle, spec)
    }

    pub fn label(&self) -> String {
        format!("na{}", self.na)
    }
}

fn real_field(v: &Vec3, s: Complex64) -> CVec3 {
    [s * v[0], s * v[1], s * v[2]]
}

/// Σ_pol a(ε) b(ε) at a node, without conjugation.
#[inline]
fn pol_sum(a: &CVec3, b: &CVec3, k: &Vec3) -> Complex64 {
    let ab = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    ab - cdot_real(a, k) * cdot_real(b, k)
}

fn sum_sq(d: &AngularDistribution, rule: &QuadratureRule) -> Result<f64> {
    let v = rule.sum_nodes(|node| {
        let a = d.field(&node.unit);
        let conj = [a[0].conj(), a[1].conj(), a[2].conj()];
        pol_sum(&a, &conj, &node.unit)
    })?;
    Ok(v.re)
}

/// Rule resolving every distribution in `ds`: a tabulated grid wins, then
/// the cut frame of a beam, then the laboratory frame.
fn rule_for(ds: &[&AngularDistribution], spec: QuadSpec) -> QuadratureRule {
    if let Some(table) = ds.iter().find_map(|d| d.table_spec()) {
        return QuadratureRule::new(table);
    }
    let cuts: Vec<(Vec3, Vec<f64>)> = ds.iter().flat_map(|d| d.all_cut_breaks()).collect();
    let Some((pole, first)) = cuts.first().cloned() else {
        return QuadratureRule::new(spec);
    };
    let mut breaks = first;
    for (p, b) in &cuts[1..] {
        let c = dot(p, &pole);
        if c > 1.0 - 1e-12 {
            breaks.extend_from_slice(b);
        } else if c < -1.0 + 1e-12 {
            breaks.extend(b.iter().map(|x| -x));
        }
    }
    QuadratureRule::oriented(spec, pole, &breaks)
}

/// The rule [`overlap`] uses for the given distributions.
pub fn quadrature_rule_for(ds: &[&AngularDistribution], spec: QuadSpec) -> QuadratureRule {
    rule_for(ds, spec)
}

fn warn_unnormalized(d: &AngularDistribution) {
    if (d.norm - 1.0).abs() > 1e-6 {
        log::warn!(
            "distribution `{}` is not normalized (norm {:.9}); overlap uses it as-is",
            d.metadata.label,
            d.norm
        );
    }
}

/// `∫ dΩ Σ_pol A_a A_b` without conjugation.
pub fn overlap(a: &AngularDistribution, b: &AngularDistribution) -> Result<Complex64> {
    overlap_with(a, b, QuadSpec::default())
}

pub fn overlap_with(a: &AngularDistribution, b: &AngularDistribution, spec: QuadSpec) -> Result<Complex64> {
    warn_unnormalized(a);
    warn_unnormalized(b);
    let rule = rule_for(&[a, b], spec);
    rule.sum_nodes(|node| pol_sum(&a.field(&node.unit), &b.field(&node.unit), &node.unit))
}

/// `∫ dΩ Σ_pol A_a A_b*`.
pub fn inner_product(a: &AngularDistribution, b: &AngularDistribution) -> Result<Complex64> {
    inner_product_with(a, b, QuadSpec::default())
}

pub fn inner_product_with(
    a: &AngularDistribution,
    b: &AngularDistribution,
    spec: QuadSpec,
) -> Result<Complex64> {
    warn_unnormalized(a);
    warn_unnormalized(b);
    let rule = rule_for(&[a, b], spec);
    rule.sum_nodes(|node| {
        let bv = b.field(&node.unit);
        let conj = [bv[0].conj(), bv[1].conj(), bv[2].conj()];
        pol_sum(&a.field(&node.unit), &conj, &node.unit)
    })
}

fn check_phase(arg_alpha0: f64) -> Result<Complex64> {
    if !arg_alpha0.is_finite() {
        return Err(Error::invalid("arg_alpha0", "not finite"));
    }
    Ok(Complex64::from_polar(1.0, arg_alpha0))
}

fn measured(mut d: AngularDistribution) -> Result<AngularDistribution> {
    let rule = rule_for(&[&d], QuadSpec::default());
    d.norm = sum_sq(&d, &rule)?;
    Ok(d)
}

/// Distribution of photons carrying information about motion along `axis`.
pub fn make_motion_distribution(axis: Axis, arg_alpha0: f64) -> Result<AngularDistribution> {
    let phase = check_phase(arg_alpha0)?;
    let l = geometry_factor(axis);
    let scale = Complex64::i() * phase * (3.0 / (8.0 * PI * l)).sqrt();
    measured(AngularDistribution {
        metadata: Metadata {
            label: format!("motion-{axis}"),
            params: json!({"axis": axis, "arg_alpha0": arg_alpha0, "l": l}),
        },
        kind: DistributionKind::Motion { axis },
        scale,
        norm: 1.0,
        conjugated: false,
    })
}

/// Dipole pattern `−e^{i arg α0} sqrt(3/8π) P⊥(d)` about an arbitrary axis.
pub fn make_dipole_distribution(axis: Vec3, arg_alpha0: f64) -> Result<AngularDistribution> {
    let phase = check_phase(arg_alpha0)?;
    let axis = normalize(&axis).ok_or_else(|| Error::invalid("axis", "zero-length vector"))?;
    measured(AngularDistribution {
        metadata: Metadata {
            label: "dipole".into(),
            params: json!({"axis": axis, "arg_alpha0": arg_alpha0}),
        },
        kind: DistributionKind::Dipole { axis },
        scale: -phase * (3.0 / (8.0 * PI)).sqrt(),
        norm: 1.0,
        conjugated: false,
    })
}

/// Libration about `y` or `z`: a dipole pattern along that axis.
pub fn make_libration_distribution(axis: Axis, arg_alpha0: f64) -> Result<AngularDistribution> {
    if axis == Axis::X {
        return Err(Error::invalid("axis", "libration is defined about y or z"));
    }
    let mut d = make_dipole_distribution(axis.unit(), arg_alpha0)?;
    d.metadata = Metadata {
        label: format!("libration-{axis}"),
        params: json!({"axis": axis, "arg_alpha0": arg_alpha0}),
    };
    Ok(d)
}

/// Gaussian beam of numerical aperture `na` propagating along `axis`,
/// linearly polarized at `polarization_angle` from the projection of `e_x`
/// (or `e_y` for beams along `x`).
pub fn make_gaussian_beam(na: f64, axis: Vec3, polarization_angle: f64) -> Result<AngularDistribution> {
    make_gaussian_beam_with(na, axis, polarization_angle, QuadSpec::default())
}

pub fn make_gaussian_beam_with(
    na: f64,
    axis: Vec3,
    polarization_angle: f64,
    spec: QuadSpec,
) -> Result<AngularDistribution> {
    if !(na > 0.0 && na <= 1.0) {
        return Err(Error::invalid("na", format!("{na} outside (0, 1]")));
    }
    if !polarization_angle.is_finite() {
        return Err(Error::invalid("polarization", "not finite"));
    }
    let axis = normalize(&axis).ok_or_else(|| Error::invalid("axis", "zero-length vector"))?;
    let reference = normalize(&transverse(&[1.0, 0.0, 0.0], &axis))
        .filter(|_| dot(&[1.0, 0.0, 0.0], &axis).abs() < 1.0 - 1e-9)
        .unwrap_or_else(|| normalize(&transverse(&[0.0, 1.0, 0.0], &axis)).expect("axis along x"));
    let other = cross(&axis, &reference);
    let (sa, ca) = polarization_angle.sin_cos();
    let polarization = [
        ca * reference[0] + sa * other[0],
        ca * reference[1] + sa * other[1],
        ca * reference[2] + sa * other[2],
    ];
    let raw = AngularDistribution {
        metadata: Metadata {
            label: format!("gaussian-na{na}"),
            params: json!({
                "na": na,
                "axis": axis,
                "polarization_angle": polarization_angle,
                "polarization": polarization,
            }),
        },
        kind: DistributionKind::Gaussian {
            na,
            axis,
            polarization,
        },
        scale: Complex64::new(-1.0, 0.0),
        norm: 1.0,
        conjugated: false,
    };
    raw.normalized(spec)
}
