//! Balls and boxes containing the origin, and weighted integrals over them.

pub mod quadrature;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::dimension_constants;
use crate::error::{Error, Result};
pub use quadrature::{Estimate, QuadratureOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Ball of the given radius centered at the origin.
    Ball { dim: usize, radius: f64 },
    /// Π [c_i − s_i/2, c_i + s_i/2] with the origin strictly inside.
    Box { sides: Vec<f64>, center: Vec<f64> },
}

/// A validated domain together with |Ω| and D₀ = max_{∂Ω} |x|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Shape", into = "Shape")]
pub struct DomainSpec {
    shape: Shape,
    dim: usize,
    volume: f64,
    d0: f64,
}

impl DomainSpec {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        Self::new(Shape::Ball { dim, radius })
    }

    /// Box with side lengths `sides` centered at `center`.
    pub fn cuboid(sides: Vec<f64>, center: Vec<f64>) -> Result<Self> {
        Self::new(Shape::Box { sides, center })
    }

    pub fn new(shape: Shape) -> Result<Self> {
        match &shape {
            Shape::Ball { dim, radius } => {
                let c = dimension_constants(*dim)?;
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::Domain(format!("ball radius must be positive, got {radius}")));
                }
                let (dim, volume, d0) = (*dim, c.ball_volume * radius.powi(*dim as i32), *radius);
                Ok(Self { shape, dim, volume, d0 })
            }
            Shape::Box { sides, center } => {
                let dim = sides.len();
                dimension_constants(dim)?;
                if center.len() != dim {
                    return Err(Error::Domain(format!(
                        "box center has {} components but the box has {dim} sides",
                        center.len()
                    )));
                }
                for (i, (&s, &c)) in sides.iter().zip(center).enumerate() {
                    if !(s > 0.0 && s.is_finite()) {
                        return Err(Error::Domain(format!("side {i} must be positive, got {s}")));
                    }
                    if !(c.abs() < 0.5 * s) {
                        return Err(Error::Domain(format!(
                            "the origin must be strictly inside the box: |center[{i}]| = {} is not below side/2 = {}",
                            c.abs(),
                            0.5 * s
                        )));
                    }
                }
                let volume = sides.iter().product();
                let d0 = sides
                    .iter()
                    .zip(center)
                    .map(|(&s, &c)| (c.abs() + 0.5 * s).powi(2))
                    .sum::<f64>()
                    .sqrt();
                Ok(Self { shape, dim, volume, d0 })
            }
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// |Ω|.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// D₀ = max over the boundary of |x|.
    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.shape, Shape::Ball { .. })
    }

    /// Lower and upper corners of a box domain.
    pub fn bounds(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.shape {
            Shape::Ball { .. } => None,
            Shape::Box { sides, center } => Some((
                sides.iter().zip(center).map(|(s, c)| c - 0.5 * s).collect(),
                sides.iter().zip(center).map(|(s, c)| c + 0.5 * s).collect(),
            )),
        }
    }

    /// ρ(x) = dist(x, ∂Ω) for x in the closure of Ω.
    pub fn distance_to_boundary(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Domain(format!("point has {} coordinates, domain has dimension {}", x.len(), self.dim)));
        }
        let rho = match &self.shape {
            Shape::Ball { radius, .. } => radius - x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Shape::Box { sides, center } => sides
                .iter()
                .zip(center)
                .zip(x)
                .map(|((s, c), v)| 0.5 * s - (v - c).abs())
                .fold(f64::INFINITY, f64::min),
        };
        if rho < 0.0 {
            return Err(Error::Domain(format!("point {x:?} lies outside the domain")));
        }
        Ok(rho)
    }

    /// Compact form accepted by [`DomainSpec::from_str`].
    pub fn to_grammar(&self) -> String {
        self.to_string()
    }
}

impl TryFrom<Shape> for DomainSpec {
    type Error = Error;
    fn try_from(shape: Shape) -> Result<Self> {
        Self::new(shape)
    }
}

impl From<DomainSpec> for Shape {
    fn from(d: DomainSpec) -> Shape {
        d.shape
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join("x")
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Ball { dim, radius } => write!(f, "ball:N={dim},R={radius}"),
            Shape::Box { sides, center } => {
                write!(f, "box:N={},sides={},center={}", sides.len(), join(sides), join(center))
            }
        }
    }
}

fn parse_field<T: FromStr>(field: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.trim().parse().map_err(|e: T::Err| Error::Parse { field: field.into(), message: format!("`{value}`: {e}") })
}

fn parse_list(field: &str, value: &str, dim: usize) -> Result<Vec<f64>> {
    let items = value
        .split('x')
        .map(|v| parse_field::<f64>(field, v))
        .collect::<Result<Vec<_>>>()?;
    match items.len() {
        1 => Ok(vec![items[0]; dim]),
        n if n == dim => Ok(items),
        n => Err(Error::Parse { field: field.into(), message: format!("expected {dim} components, got {n}") }),
    }
}

/// Parses `ball:N=3,R=1` or `box:N=2,sides=1x1,center=0.1x0`.
///
/// A single side length is used for every axis; `center` defaults to 0.
impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.trim().split_once(':').ok_or_else(|| Error::Parse {
            field: "kind".into(),
            message: format!("expected `ball:...` or `box:...`, got `{s}`"),
        })?;
        let mut fields = Vec::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse {
                field: part.trim().into(),
                message: "expected key=value".into(),
            })?;
            fields.push((k.trim(), v.trim()));
        }
        let get = |name: &str| fields.iter().find(|(k, _)| *k == name).map(|(_, v)| *v);
        let allowed: &[&str] = match kind.trim() {
            "ball" => &["N", "R"],
            "box" => &["N", "sides", "center"],
            other => {
                return Err(Error::Parse { field: "kind".into(), message: format!("unknown domain kind `{other}`") })
            }
        };
        if let Some((k, _)) = fields.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(Error::Parse { field: (*k).into(), message: format!("unknown field for {}", kind.trim()) });
        }
        let dim: usize = parse_field("N", get("N").ok_or_else(|| Error::Parse {
            field: "N".into(),
            message: "missing".into(),
        })?)?;
        if kind.trim() == "ball" {
            let radius = get("R").map(|v| parse_field("R", v)).transpose()?.unwrap_or(1.0);
            return Self::ball(dim, radius);
        }
        let sides = parse_list(
            "sides",
            get("sides").ok_or_else(|| Error::Parse { field: "sides".into(), message: "missing".into() })?,
            dim,
        )?;
        let center = match get("center") {
            Some(v) => parse_list("center", v, dim)?,
            None => vec![0.0; dim],
        };
        Self::cuboid(sides, center)
    }
}

/// Nonnegative weights w(x) integrated against Lebesgue measure on Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// |x|^{−2}.
    InvSquare,
    /// (−log(|x|/D₀))^{N−1}.
    LogPower,
    /// |x|^{2τ−2}.
    Power(f64),
    /// ρ(x)²|x|^{2τ}.
    DistPower(f64),
}

impl WeightKind {
    /// Degree d with w(sx) = s^d w(x), for weights depending on |x| only.
    pub fn homogeneity(&self) -> Option<f64> {
        match *self {
            WeightKind::InvSquare => Some(-2.0),
            WeightKind::Power(tau) => Some(2.0 * tau - 2.0),
            WeightKind::LogPower | WeightKind::DistPower(_) => None,
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        let n = dim as f64;
        let ok = match *self {
            WeightKind::InvSquare => dim >= 3,
            WeightKind::LogPower => true,
            WeightKind::Power(tau) => tau.is_finite() && n + 2.0 * tau - 2.0 > 0.0,
            WeightKind::DistPower(tau) => tau.is_finite() && n + 2.0 * tau > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DivergentWeight { weight: self.to_string(), dim })
        }
    }

    /// w as a function of r = |x|, for the weights that depend on |x| only.
    fn radial(&self, dim: usize, d0: f64) -> Option<impl Fn(f64) -> f64> {
        let kind = *self;
        let m = dim as i32 - 1;
        let f = move |r: f64| match kind {
            WeightKind::InvSquare => 1.0 / (r * r),
            WeightKind::LogPower => (-(r / d0).ln()).max(0.0).powi(m),
            WeightKind::Power(tau) => r.powf(2.0 * tau - 2.0),
            WeightKind::DistPower(_) => unreachable!(),
        };
        (!matches!(kind, WeightKind::DistPower(_))).then_some(f)
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::InvSquare => write!(f, "inv_square"),
            WeightKind::LogPower => write!(f, "log_power"),
            WeightKind::Power(t) => write!(f, "power(τ={t})"),
            WeightKind::DistPower(t) => write!(f, "dist_power(τ={t})"),
        }
    }
}

/// ∫_Ω w(x) dx with default quadrature settings.
pub fn weighted_integral(domain: &DomainSpec, weight: WeightKind) -> Result<f64> {
    weighted_integral_with(domain, weight, &QuadratureOptions::default()).map(|e| e.value)
}

pub fn weighted_integral_with(domain: &DomainSpec, weight: WeightKind, opts: &QuadratureOptions) -> Result<Estimate> {
    let dim = domain.dim();
    weight.check(dim)?;
    match domain.shape() {
        Shape::Ball { radius, .. } => ball_integral(dim, *radius, weight, opts),
        Shape::Box { .. } => {
            let (lo, hi) = domain.bounds().expect("box bounds");
            match weight {
                WeightKind::DistPower(tau) => dist_power_box(&lo, &hi, tau, opts),
                _ => {
                    let w = weight.radial(dim, domain.d0()).expect("radial weight");
                    radial_box_integral(&lo, &hi, w, weight.homogeneity(), opts)
                }
            }
        }
    }
}

/// Panels [R2^{−j−1}, R2^{−j}] for j < levels, plus the innermost [0, R2^{−levels}].
fn dyadic_panels(radius: f64, levels: usize) -> Vec<(f64, f64)> {
    let mut panels: Vec<(f64, f64)> = (0..levels)
        .map(|j| (radius * 0.5f64.powi(j as i32 + 1), radius * 0.5f64.powi(j as i32)))
        .collect();
    panels.push((0.0, radius * 0.5f64.powi(levels as i32)));
    panels
}

fn ball_integral(dim: usize, radius: f64, weight: WeightKind, opts: &QuadratureOptions) -> Result<Estimate> {
    let omega = dimension_constants(dim)?.omega;
    let m = dim as i32 - 1;
    let profile = move |r: f64| {
        let w = match weight {
            WeightKind::InvSquare => 1.0 / (r * r),
            WeightKind::LogPower => (-(r / radius).ln()).max(0.0).powi(m),
            WeightKind::Power(tau) => r.powf(2.0 * tau - 2.0),
            WeightKind::DistPower(tau) => (radius - r).powi(2) * r.powf(2.0 * tau),
        };
        omega * r.powi(m) * w
    };
    match weight.homogeneity() {
        // the panels are scaled copies of [R/2, R], so the sum is geometric
        Some(deg) => {
            let est = quadrature::integrate_intervals(profile, &[(0.5 * radius, radius)], opts)?;
            Ok(scale_geometric(est, dim as f64 + deg))
        }
        None => quadrature::integrate_intervals(profile, &dyadic_panels(radius, opts.dyadic_levels), opts),
    }
}

fn scale_geometric(est: Estimate, exponent: f64) -> Estimate {
    let factor = 1.0 / (1.0 - 0.5f64.powf(exponent));
    Estimate { value: est.value * factor, error: est.error * factor, evaluations: est.evaluations }
}

/// Boxes covering levels `levels` of the dyadic shells of [lo, hi] around the
/// origin, with every orthant reflected into the positive cone. Only valid
/// for integrands depending on |x| alone.
pub fn origin_shell_boxes(lo: &[f64], hi: &[f64], levels: std::ops::Range<usize>) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut out = Vec::new();
    for extents in orthant_extents(lo, hi) {
        for level in levels.clone() {
            out.extend(quadrature::corner_shell(&extents, level));
        }
    }
    out
}

/// Extents of the nondegenerate orthant pieces of [lo, hi], reflected into
/// the positive cone.
fn orthant_extents<'a>(lo: &'a [f64], hi: &'a [f64]) -> impl Iterator<Item = Vec<f64>> + 'a {
    let dim = lo.len();
    (0u32..(1 << dim))
        .map(move |signs| (0..dim).map(|d| if signs & (1 << d) != 0 { hi[d] } else { -lo[d] }).collect::<Vec<f64>>())
        .filter(|e| e.iter().all(|&v| v > 0.0))
}

/// ∫ w(|x|) over the box [lo, hi].
///
/// When the origin lies in the closed box the box is decomposed into dyadic
/// shells around it. With `homogeneity = Some(d)` (w(sr) = s^d w(r), N + d > 0)
/// only the outermost shell is integrated and the rest summed geometrically.
pub fn radial_box_integral<F: Fn(f64) -> f64>(
    lo: &[f64],
    hi: &[f64],
    w: F,
    homogeneity: Option<f64>,
    opts: &QuadratureOptions,
) -> Result<Estimate> {
    let dim = lo.len();
    let contains_origin = lo.iter().zip(hi).all(|(a, b)| *a <= 0.0 && *b >= 0.0);
    let f = |y: &[f64]| w(y.iter().map(|v| v * v).sum::<f64>().sqrt());
    if !contains_origin {
        return quadrature::integrate_boxes(f, vec![(lo.to_vec(), hi.to_vec())], opts);
    }
    match homogeneity {
        Some(deg) => {
            let est = quadrature::integrate_boxes(f, origin_shell_boxes(lo, hi, 0..1), opts)?;
            Ok(scale_geometric(est, dim as f64 + deg))
        }
        None => {
            let levels = opts.dyadic_levels;
            let mut boxes = origin_shell_boxes(lo, hi, 0..levels);
            // innermost core, where the integrand is at worst integrably singular
            let scale = 0.5f64.powi(levels as i32);
            boxes.extend(orthant_extents(lo, hi).map(|e| (vec![0.0; dim], e.iter().map(|v| v * scale).collect())));
            quadrature::integrate_boxes(f, boxes, opts)
        }
    }
}

/// ∫ ρ²|x|^{2τ} over [lo, hi], split into the 2N regions where one face is
/// nearest. On the region of the face x_i = lo_i, with t = x_i − lo_i,
/// ρ = t and x_j ranges over [lo_j + t, hi_j − t]; each region is mapped
/// onto [0, T]×[0,1]^{N−1}.
fn dist_power_box(lo: &[f64], hi: &[f64], tau: f64, opts: &QuadratureOptions) -> Result<Estimate> {
    let dim = lo.len();
    let sides: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| b - a).collect();
    let t_max = 0.5 * sides.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut total = Estimate { value: 0.0, error: 0.0, evaluations: 0 };
    for axis in 0..dim {
        for upper in [false, true] {
            let f = |p: &[f64]| {
                let t = p[0];
                let mut r2 = 0.0;
                let mut jac = 1.0;
                let mut u = 1;
                for j in 0..dim {
                    let x = if j == axis {
                        if upper {
                            hi[j] - t
                        } else {
                            lo[j] + t
                        }
                    } else {
                        let span = sides[j] - 2.0 * t;
                        jac *= span;
                        let x = lo[j] + t + p[u] * span;
                        u += 1;
                        x
                    };
                    r2 += x * x;
                }
                t * t * r2.powf(tau) * jac
            };
            let mut upper_corner = vec![1.0; dim];
            upper_corner[0] = t_max;
            let est = quadrature::integrate_boxes(f, vec![(vec![0.0; dim], upper_corner)], opts)?;
            total.value += est.value;
            total.error += est.error;
            total.evaluations += est.evaluations;
        }
    }
    Ok(total)
}
