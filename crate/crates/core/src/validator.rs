//! Structural checks on a converted document.
//!
//! 1. No Camunda 7 attribute or element remains unless a TODO in the log
//!    names it and its element.
//! 2. Every `zeebe:taskDefinition` has a non-empty `type`.
//! 3. Every `zeebe:loopCharacteristics` has an `inputCollection` starting
//!    with `=`.
//! 4. Zeebe elements only appear inside `bpmn:extensionElements`.
//! 5. `sourceRef`, `targetRef` and `bpmnElement` references resolve.
//! 6. The root declares the zeebe namespace when zeebe content exists.
//!
//! Warnings flag JUEL (`${`) left in zeebe attributes or FEEL positions.

use std::collections::BTreeSet;
use std::fmt;

use crate::model::{ns, BpmnDocument, XmlName, XmlNode};
use crate::translog::{EntryKind, LogEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationFinding {
    pub severity: Severity,
    pub element_id: Option<String>,
    pub message: String,
}

impl fmt::Display for ValidationFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "validation {label}: {}", self.message)
    }
}

impl ValidationFinding {
    fn error(element_id: Option<&str>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            element_id: element_id.map(str::to_string),
            message: message.into(),
        }
    }

    fn warning(element_id: Option<&str>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            ..Self::error(element_id, message)
        }
    }

    /// Log entry for the finding: TODO for errors, TODO (OPTIONAL) for
    /// warnings.
    pub fn to_log_entry(&self) -> LogEntry {
        let kind = match self.severity {
            Severity::Error => EntryKind::Todo,
            Severity::Warning => EntryKind::TodoOptional,
        };
        LogEntry::about(kind, self.element_id.as_deref(), self.to_string())
    }
}

/// Runs all checks. `log` is the transformation log of the document; a
/// Camunda 7 remnant is acceptable only when a TODO in it names the
/// remnant's element and the `camunda:` name. With an empty log every
/// remnant is an error.
pub fn validate_c8(doc: &BpmnDocument, log: &[LogEntry]) -> Vec<ValidationFinding> {
    let mut findings = Vec::new();
    let todos: Vec<&LogEntry> = log.iter().filter(|e| e.is_todo()).collect();
    walk(&doc.root, None, None, &todos, &mut findings);
    check_references(&doc.root, &mut findings);
    if doc.uses_namespace(ns::ZEEBE) && !doc.namespaces.declares(ns::ZEEBE) {
        findings.push(ValidationFinding::error(
            doc.root.id(),
            "zeebe content present but the root does not declare the zeebe namespace",
        ));
    }
    findings
}

pub fn has_errors(findings: &[ValidationFinding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Error)
}

fn acknowledged(todos: &[&LogEntry], id: Option<&str>, camunda_name: &str) -> bool {
    todos.iter().any(|e| {
        id.map_or(true, |id| e.mentions(id))
            && e.detail.as_deref().is_some_and(|d| d.contains(camunda_name))
    })
}

fn walk(
    node: &XmlNode,
    parent: Option<&XmlNode>,
    owner: Option<&str>,
    todos: &[&LogEntry],
    findings: &mut Vec<ValidationFinding>,
) {
    let id = node.id().or(owner);

    if node.name.is_in(ns::CAMUNDA) {
        let qualified = node.name.qualified();
        if !acknowledged(todos, id, &qualified) {
            findings.push(ValidationFinding::error(
                id,
                format!("{qualified} remains in {} without a TODO", describe(id)),
            ));
        }
        return;
    }
    for (name, value) in &node.attributes {
        if name.is_in(ns::CAMUNDA) {
            let qualified = name.qualified();
            if !acknowledged(todos, id, &qualified) {
                findings.push(ValidationFinding::error(
                    id,
                    format!("{qualified}=\"{value}\" remains on {} without a TODO", describe(id)),
                ));
            }
        }
    }

    if node.name.is_in(ns::ZEEBE) {
        let parent_ok = parent.is_some_and(|p| {
            p.name.is(ns::BPMN, "extensionElements") || p.name.is_in(ns::ZEEBE)
        });
        if !parent_ok {
            findings.push(ValidationFinding::error(
                id,
                format!("{} outside bpmn:extensionElements in {}", node.name.qualified(), describe(id)),
            ));
        }
        check_zeebe_element(node, id, findings);
    }
    let is_condition =
        node.name.is(ns::BPMN, "conditionExpression") || node.name.is(ns::BPMN, "completionCondition");
    if is_condition && node.text.as_deref().is_some_and(has_juel) && node.plain_attr("language").is_none() {
        findings.push(ValidationFinding::warning(
            id,
            format!("{} in {} is still a JUEL expression", node.name.qualified(), describe(id)),
        ));
    }

    for child in node.elements() {
        walk(child, Some(node), id, todos, findings);
    }
}

fn check_zeebe_element(node: &XmlNode, id: Option<&str>, findings: &mut Vec<ValidationFinding>) {
    match node.name.local_name.as_str() {
        "taskDefinition" => {
            if node.plain_attr("type").map_or(true, |t| t.trim().is_empty()) {
                findings.push(ValidationFinding::error(
                    id,
                    format!("zeebe:taskDefinition in {} has an empty type", describe(id)),
                ));
            }
        }
        "loopCharacteristics" if !node.plain_attr("inputCollection").is_some_and(|c| c.starts_with('=')) => {
            findings.push(ValidationFinding::error(
                id,
                format!(
                    "zeebe:loopCharacteristics in {} needs an inputCollection starting with =",
                    describe(id)
                ),
            ));
        }
        _ => {}
    }
    for (name, value) in &node.attributes {
        if has_juel(value) {
            findings.push(ValidationFinding::warning(
                id,
                format!(
                    "{} {}=\"{value}\" in {} is still a JUEL expression",
                    node.name.qualified(),
                    name.local_name,
                    describe(id)
                ),
            ));
        }
    }
}

fn has_juel(text: &str) -> bool {
    text.contains("${") || text.contains("#{")
}

fn describe(id: Option<&str>) -> String {
    match id {
        Some(id) => format!("element id={id}"),
        None => "the document".to_string(),
    }
}

const REFERENCE_ATTRS: [&str; 3] = ["sourceRef", "targetRef", "bpmnElement"];

fn check_references(root: &XmlNode, findings: &mut Vec<ValidationFinding>) {
    let ids: BTreeSet<&str> = root.descendants().filter_map(XmlNode::id).collect();
    let mut check = |holder: &XmlNode, what: &str, target: &str| {
        let target = target.trim();
        let local = target.rsplit(':').next().unwrap_or(target);
        if !ids.contains(target) && !ids.contains(local) {
            findings.push(ValidationFinding::error(
                holder.id(),
                format!(
                    "{what}=\"{target}\" on {} {} does not resolve",
                    holder.name.qualified(),
                    describe(holder.id())
                ),
            ));
        }
    };
    for node in root.descendants() {
        for attr in REFERENCE_ATTRS {
            if let Some(target) = node.plain_attr(attr) {
                check(node, attr, target);
            }
        }
        // Data associations carry references as child elements.
        for attr in ["sourceRef", "targetRef"] {
            for child in node.find_children(&XmlName::bpmn(attr)) {
                if let Some(target) = child.text.as_deref() {
                    check(node, attr, target);
                }
            }
        }
    }
}
