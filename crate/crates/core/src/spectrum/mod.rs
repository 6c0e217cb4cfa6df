//! Dirichlet spectra of −Δ + μ/|x|².

mod cartesian;
pub mod eigen;
mod eigenpair;
mod oracle;
mod radial;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;

pub use cartesian::{cartesian_fd_spectrum, CartesianGrid};
pub use eigen::{symmetric_eigenpairs, symmetric_eigensolve, CsrMatrix, EigenMode};
pub use eigenpair::{first_dirichlet_eigenpair_zero, EigenpairZero};
pub use oracle::{ball_channel_eigenvalues, ball_spectrum_oracle, RadialChannel};
pub use radial::{radial_fd_ball_spectrum, radial_fd_spectrum, radial_fd_spectrum_with, RadialFd, RadialScheme};

/// Version tag written into serialized spectra.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Squared Bessel zeros (balls only).
    BallOracle,
    /// Finite differences per angular channel (balls only).
    RadialFd,
    /// Finite differences on a Cartesian grid (boxes only).
    CartesianFd,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::BallOracle => "ball_oracle",
            Method::RadialFd => "radial_fd",
            Method::CartesianFd => "cartesian_fd",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball_oracle" | "oracle" => Ok(Method::BallOracle),
            "radial_fd" | "radial" => Ok(Method::RadialFd),
            "cartesian_fd" | "cartesian" => Ok(Method::CartesianFd),
            other => Err(Error::Parse { field: "method".into(), message: format!("unknown method `{other}`") }),
        }
    }
}

/// The k_max smallest eigenvalues, multiplicity expanded, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub domain: DomainSpec,
    pub mu: f64,
    pub method: Method,
    pub est_rel_error: f64,
    pub values: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
struct SpectrumDoc {
    schema_version: u32,
    domain: DomainSpec,
    mu: f64,
    method: Method,
    k_max: usize,
    est_rel_error: f64,
    #[serde(default)]
    warnings: Vec<String>,
    values: Vec<f64>,
}

/// 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

impl Spectrum {
    pub fn k_max(&self) -> usize {
        self.values.len()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// λ_k for 1-based k.
    pub fn get(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.values.len() {
            return Err(Error::InsufficientSpectrum { needed: k.max(1), available: self.values.len() });
        }
        Ok(self.values[k - 1])
    }

    /// JSON document with a fixed field order and 17-digit floats.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        s.push_str("{\n");
        let _ = writeln!(s, "  \"schema_version\": {SCHEMA_VERSION},");
        let _ = writeln!(s, "  \"domain\": {},", serde_json::to_string(&self.domain).expect("domain serializes"));
        let _ = writeln!(s, "  \"mu\": {},", fmt17(self.mu));
        let _ = writeln!(s, "  \"method\": \"{}\",", self.method);
        let _ = writeln!(s, "  \"k_max\": {},", self.k_max());
        let _ = writeln!(s, "  \"est_rel_error\": {},", fmt17(self.est_rel_error));
        let warnings: Vec<String> =
            self.warnings.iter().map(|w| serde_json::to_string(w).expect("string serializes")).collect();
        let _ = writeln!(s, "  \"warnings\": [{}],", warnings.join(", "));
        s.push_str("  \"values\": [");
        for (i, v) in self.values.iter().enumerate() {
            s.push_str(if i == 0 { "\n    " } else { ",\n    " });
            s.push_str(&fmt17(*v));
        }
        s.push_str(if self.values.is_empty() { "]\n" } else { "\n  ]\n" });
        s.push_str("}\n");
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpectrumDoc = serde_json::from_str(text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Inconsistent(format!("unsupported schema_version {}", doc.schema_version)));
        }
        if doc.k_max != doc.values.len() {
            return Err(Error::Inconsistent(format!("k_max = {} but {} values", doc.k_max, doc.values.len())));
        }
        if doc.values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Inconsistent("spectrum values are not ascending".into()));
        }
        Ok(Self {
            domain: doc.domain,
            mu: doc.mu,
            method: doc.method,
            est_rel_error: doc.est_rel_error,
            values: doc.values,
            warnings: doc.warnings,
        })
    }
}

/// Spectrum of `domain` by the natural method: the Bessel oracle for balls,
/// Cartesian finite differences for boxes.
pub fn compute_spectrum(domain: &DomainSpec, mu: f64, k_max: usize, method: Method, mesh: usize) -> Result<Spectrum> {
    use crate::geometry::Shape;
    match (method, domain.shape()) {
        (Method::BallOracle, Shape::Ball { dim, radius }) => ball_spectrum_oracle(*dim, mu, *radius, k_max),
        (Method::RadialFd, Shape::Ball { dim, radius }) => radial_fd_ball_spectrum(*dim, mu, *radius, mesh, k_max),
        (Method::CartesianFd, Shape::Box { .. }) => cartesian_fd_spectrum(domain, mu, mesh, k_max),
        (m, _) => Err(Error::Restriction(format!(
            "method {m} does not apply to {}; use ball_oracle or radial_fd for balls and cartesian_fd for boxes",
            domain
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_exact() {
        let s = Spectrum {
            domain: "ball:N=3,R=1".parse().unwrap(),
            mu: -0.25,
            method: Method::BallOracle,
            est_rel_error: 1e-12,
            values: vec![5.783185962946784, 20.190728556426627, 0.1 + 0.2],
            warnings: vec!["a \"quoted\" note".into()],
        };
        let mut sorted = s.clone();
        sorted.values.sort_by(f64::total_cmp);
        let back = Spectrum::from_json(&sorted.to_json()).unwrap();
        assert_eq!(back, sorted);
        assert!(Spectrum::from_json(&s.to_json()).is_err());
    }

    #[test]
    fn method_names() {
        for m in [Method::BallOracle, Method::RadialFd, Method::CartesianFd] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("fem".parse::<Method>().is_err());
    }
}
