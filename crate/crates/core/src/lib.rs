//! Camunda 7 to Camunda 8 BPMN model conversion.
//!
//! The pipeline is [`parse_bpmn`] → [`transform_with`] → [`validate_c8`] →
//! [`serialize_bpmn`]; [`convert`] runs all four steps for one input.

pub mod canonical;
pub mod engine;
pub mod expression;
pub mod model;
pub mod rules;
pub mod translog;
pub mod validator;

pub use engine::{
    transform_document, transform_with, Counters, TransformOptions, TransformReport,
    TransformStatus, DEFAULT_PLATFORM_VERSION,
};
pub use expression::{is_interpolation, juel_to_feel, unwrap_interpolation, ExpressionRewrite};
pub use model::{
    ns, parse_bpmn, serialize_bpmn, serialize_to_string, BpmnDocument, NamespaceTable, ParseError,
    XmlChild, XmlName, XmlNode,
};
pub use rules::{MappingRule, RuleAction, RuleOutcome, RuleRegistry};
pub use translog::{render_line, render_section, write_report, EntryKind, LogEntry, LogError};
pub use validator::{validate_c8, Severity, ValidationFinding};

use std::path::Path;

/// Result of converting one input.
#[derive(Debug, Clone)]
pub struct Conversion {
    pub report: TransformReport,
    pub findings: Vec<ValidationFinding>,
    /// Serialized output; `None` when the input could not be parsed.
    pub output: Option<Vec<u8>>,
}

/// Parses, transforms, validates and serializes one document. Validation
/// findings are appended to the report's log.
pub fn convert(bytes: &[u8], source_path: &Path, options: &TransformOptions) -> Conversion {
    let doc = match parse_bpmn(bytes, source_path) {
        Ok(doc) => doc,
        Err(e) => {
            return Conversion {
                report: TransformReport::failed(source_path, &e),
                findings: Vec::new(),
                output: None,
            }
        }
    };
    let mut report = transform_with(doc, options);
    let findings = match &report.document {
        Some(doc) => validate_c8(doc, &report.entries),
        None => Vec::new(),
    };
    report.extend_entries(findings.iter().map(ValidationFinding::to_log_entry));
    let output = report.document.as_ref().map(serialize_bpmn);
    Conversion {
        report,
        findings,
        output,
    }
}
