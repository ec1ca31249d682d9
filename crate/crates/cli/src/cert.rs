//! JSON documents for cobordism certificates.
//!
//! Points are written in the data-file line syntax, so a certificate reads
//! like the data it acts on.

use num_bigint::{BigInt, BigUint};
use s1data::bigserde;
use s1data::fpdata::{FixedPoint, FixedPointData};
use s1data::generators::{Family, GeneratorLabel};
use s1data::reducer::{CobordismCertificate, OperationKind, ReductionStep};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::{format_point, parse_point};

pub const CERTIFICATE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CertError {
    #[error("malformed certificate: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported certificate version {0}")]
    Version(u32),
    #[error("{0}")]
    Field(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorDoc {
    family: Family,
    #[serde(with = "bigserde::int_vec")]
    params: Vec<BigInt>,
    reversed: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    kind: String,
    #[serde(with = "bigserde::int_vec")]
    params: Vec<BigInt>,
    removed: Vec<String>,
    added: Vec<String>,
    generator: GeneratorDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDoc {
    version: u32,
    initial: Vec<String>,
    #[serde(with = "bigserde::uint")]
    divisor: BigUint,
    steps: Vec<StepDoc>,
}

fn points_doc<'a>(points: impl Iterator<Item = &'a FixedPoint>) -> Vec<String> {
    points.map(format_point).collect()
}

fn points_from(doc: &[String], what: &str) -> Result<Vec<FixedPoint>, CertError> {
    doc.iter()
        .map(|s| parse_point(s).map_err(|e| CertError::Field(format!("{what}: `{s}`: {e}"))))
        .collect()
}

pub fn certificate_to_json(cert: &CobordismCertificate) -> String {
    let doc = CertificateDoc {
        version: CERTIFICATE_VERSION,
        initial: points_doc(cert.initial.iter()),
        divisor: cert.effectiveness_divisor.clone(),
        steps: cert
            .steps
            .iter()
            .map(|s| StepDoc {
                kind: s.kind.name().to_string(),
                params: s.params.clone(),
                removed: points_doc(s.removed.iter()),
                added: points_doc(s.added.iter()),
                generator: GeneratorDoc {
                    family: s.generator.family,
                    params: s.generator.params.clone(),
                    reversed: s.generator.reversed,
                },
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("certificate serializes");
    out.push('\n');
    out
}

/// Reads a certificate document. Only its shape is checked here; whether
/// the steps are sound is for the verifier to decide.
pub fn certificate_from_json(text: &str) -> Result<CobordismCertificate, CertError> {
    let doc: CertificateDoc = serde_json::from_str(text)?;
    if doc.version != CERTIFICATE_VERSION {
        return Err(CertError::Version(doc.version));
    }
    let initial: FixedPointData = points_from(&doc.initial, "initial")?.into_iter().collect();
    let mut steps = Vec::with_capacity(doc.steps.len());
    for (i, s) in doc.steps.into_iter().enumerate() {
        let n = i + 1;
        let kind: OperationKind = s
            .kind
            .parse()
            .map_err(|e| CertError::Field(format!("step {n}: {e}")))?;
        steps.push(ReductionStep {
            kind,
            params: s.params,
            removed: points_from(&s.removed, &format!("step {n} removed"))?,
            added: points_from(&s.added, &format!("step {n} added"))?,
            generator: GeneratorLabel::new(s.generator.family, s.generator.params, s.generator.reversed),
        });
    }
    Ok(CobordismCertificate {
        initial,
        steps,
        effectiveness_divisor: doc.divisor,
    })
}
