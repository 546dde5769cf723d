//! JSON file formats: parameter files, verification configs and reports.

use cremona_core::config::Tolerances;
use cremona_core::elliptic::TorusModulus;
use cremona_core::harness::{HarnessOptions, SampleKind, VerificationReport};
use cremona_core::lattice::LatticeSignature;
use cremona_core::torus::{ParamKind, TorusParams};
use cremona_core::CMatrix;
use serde::{Deserialize, Serialize};

use crate::complex::Cx;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingName {
    Weierstrass,
    Kmnoy,
}

impl From<EmbeddingName> for SampleKind {
    fn from(e: EmbeddingName) -> Self {
        match e {
            EmbeddingName::Weierstrass => SampleKind::Weierstrass,
            EmbeddingName::Kmnoy => SampleKind::Kmnoy,
        }
    }
}

/// Torus parameters on disk. `u` and `eps` may be omitted when the caller
/// samples them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub tau: Cx,
    pub n: usize,
    pub m: usize,
    pub embedding: EmbeddingName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Cx>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<Cx>>,
}

impl ParamsFile {
    pub fn signature(&self) -> Result<LatticeSignature, CliError> {
        Ok(LatticeSignature::new(self.n, self.m)?)
    }

    pub fn modulus(&self, tau_floor: f64) -> Result<TorusModulus, CliError> {
        Ok(TorusModulus::with_floor(self.tau.0, tau_floor)?)
    }

    /// The parameters as given; fails if `u` (or `eps` for KMNOY) is missing.
    pub fn to_params(&self, tau_floor: f64) -> Result<TorusParams, CliError> {
        let sig = self.signature()?;
        let modulus = self.modulus(tau_floor)?;
        let u: Vec<_> = self
            .u
            .as_ref()
            .ok_or_else(|| CliError::Domain("parameters need \"u\" (or pass --random)".into()))?
            .iter()
            .map(|z| z.0)
            .collect();
        let params = match self.embedding {
            EmbeddingName::Weierstrass => TorusParams::weierstrass(sig, modulus, u)?,
            EmbeddingName::Kmnoy => {
                let eps = self.eps.ok_or_else(|| CliError::Domain("KMNOY parameters need \"eps\"".into()))?;
                TorusParams::kmnoy(sig, modulus, u, eps.0)?
            }
        };
        Ok(params)
    }

    pub fn from_params(p: &TorusParams) -> Self {
        let sig = p.sig();
        ParamsFile {
            tau: Cx(p.modulus().tau()),
            n: sig.n(),
            m: sig.m(),
            embedding: match p.kind() {
                ParamKind::Weierstrass => EmbeddingName::Weierstrass,
                ParamKind::Kmnoy { .. } => EmbeddingName::Kmnoy,
            },
            eps: p.eps().map(Cx),
            u: Some(p.u().iter().copied().map(Cx).collect()),
        }
    }
}

/// Optional overrides of the library tolerances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TolerancesFile {
    pub residual: Option<f64>,
    pub det: Option<f64>,
    pub projective: Option<f64>,
    pub genericity: Option<f64>,
    pub tau_floor: Option<f64>,
}

impl TolerancesFile {
    pub fn harness_options(&self) -> HarnessOptions {
        let d = HarnessOptions::default();
        let c = Tolerances::default();
        HarnessOptions {
            config: Tolerances { det: self.det.unwrap_or(c.det), projective: self.projective.unwrap_or(c.projective) },
            residual: self.residual.unwrap_or(d.residual),
            min_genericity: self.genericity.unwrap_or(d.min_genericity),
        }
    }
}

/// Input of `cremona verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    #[serde(flatten)]
    pub params: ParamsFile,
    /// Comma-separated generator indices; empty for the identity.
    #[serde(default)]
    pub word: Option<String>,
    /// Number of held-out probe points on the curve.
    #[serde(default)]
    pub probes: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: TolerancesFile,
}

/// Row-major matrix of complex entries.
pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<Cx>> {
    (0..m.rows()).map(|i| m.row(i).into_iter().map(Cx).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReportJson {
    pub mode: &'static str,
    pub word: String,
    pub embedding: EmbeddingName,
    pub n: usize,
    pub m: usize,
    pub tau: Cx,
    pub shifts: Vec<Cx>,
    pub total_shift: Cx,
    /// Row-major, normalized to max-modulus 1.
    pub g: Vec<Vec<Cx>>,
    pub fit_residual: f64,
    pub probe_residual: f64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl VerificationReportJson {
    pub fn new(r: &VerificationReport, params: &ParamsFile, tolerance: f64) -> Self {
        VerificationReportJson {
            mode: "word",
            word: r.word.to_string(),
            embedding: params.embedding,
            n: params.n,
            m: params.m,
            tau: params.tau,
            shifts: r.shifts.iter().copied().map(Cx).collect(),
            total_shift: Cx(r.total_shift),
            g: matrix_rows(&r.g),
            fit_residual: r.fit_residual,
            probe_residual: r.probe_residual,
            max_residual: r.max_residual,
            tolerance,
            pass: r.pass,
            timing_ms: None,
        }
    }
}
