//! Depth-first traversal that dispatches every element to its mapping rule
//! and assembles the [`TransformReport`].

use std::path::PathBuf;
use std::sync::OnceLock;

use crate::model::{is_di, ns, BpmnDocument, ParseError, XmlChild, XmlName, XmlNode};
use crate::rules::{
    is_event_subprocess, strip_async_flags, EventScope, MessageIndex, Owner, RuleAction,
    RuleContext, RuleRegistry,
};
use crate::translog::{EntryKind, LogEntry};

pub const DEFAULT_PLATFORM_VERSION: &str = "8.0.0";
pub const EXECUTION_PLATFORM: &str = "Camunda Cloud";

const PASSTHROUGH_RULE: &str = "passthrough";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformOptions {
    /// Written to `modeler:executionPlatformVersion` on the root.
    pub platform_version: String,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            platform_version: DEFAULT_PLATFORM_VERSION.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub elements_visited: usize,
    pub elements_mapped: usize,
    pub passthrough: usize,
    pub todos: usize,
    pub optional_todos: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformStatus {
    Success,
    SuccessWithTodos,
    Failed,
}

#[derive(Debug, Clone)]
pub struct TransformReport {
    pub source_path: PathBuf,
    /// The transformed document; `None` only when parsing failed.
    pub document: Option<BpmnDocument>,
    pub entries: Vec<LogEntry>,
    pub counters: Counters,
    pub status: TransformStatus,
}

impl TransformReport {
    /// Report for an input that could not be parsed.
    pub fn failed(source_path: impl Into<PathBuf>, error: &ParseError) -> Self {
        let mut report = Self {
            source_path: source_path.into(),
            document: None,
            entries: vec![LogEntry::todo(format!(
                "input could not be parsed, no output written: {error}"
            ))],
            counters: Counters::default(),
            status: TransformStatus::Failed,
        };
        report.recount();
        report
    }

    /// Appends entries and updates the TODO counters and the status.
    pub fn extend_entries(&mut self, entries: impl IntoIterator<Item = LogEntry>) {
        self.entries.extend(entries);
        self.recount();
    }

    fn recount(&mut self) {
        self.counters.todos = self.entries.iter().filter(|e| e.kind == EntryKind::Todo).count();
        self.counters.optional_todos = self
            .entries
            .iter()
            .filter(|e| e.kind == EntryKind::TodoOptional)
            .count();
        if self.status != TransformStatus::Failed {
            self.status = if self.counters.todos > 0 {
                TransformStatus::SuccessWithTodos
            } else {
                TransformStatus::Success
            };
        }
    }
}

fn registry() -> &'static RuleRegistry {
    static REGISTRY: OnceLock<RuleRegistry> = OnceLock::new();
    REGISTRY.get_or_init(RuleRegistry::standard)
}

/// Transforms with default options.
pub fn transform_document(doc: BpmnDocument) -> TransformReport {
    transform_with(doc, &TransformOptions::default())
}

pub fn transform_with(mut doc: BpmnDocument, options: &TransformOptions) -> TransformReport {
    let partially_migrated = doc.uses_namespace(ns::ZEEBE);
    let messages = MessageIndex::build(&doc.root);
    let mut visitor = Visitor {
        registry: registry(),
        messages: &messages,
        entries: Vec::new(),
        counters: Counters::default(),
    };
    if partially_migrated {
        visitor.entries.push(LogEntry::todo_optional(format!(
            "input appears partially migrated: {} already contains zeebe content",
            doc.source_path.display()
        )));
    }

    let root = std::mem::replace(&mut doc.root, XmlNode::new(XmlName::bpmn("definitions")));
    let frame = Frame {
        owner: None,
        event_scope: None,
        in_event_subprocess: false,
    };
    doc.root = visitor.visit(root, 0, &frame, None);

    let mut entries = visitor.entries;
    residual_scan(&doc.root, None, &mut entries);
    entries.extend(set_execution_platform(&mut doc.root, &options.platform_version));
    doc.sync_namespaces();

    let mut report = TransformReport {
        source_path: doc.source_path.clone(),
        document: Some(doc),
        entries,
        counters: visitor.counters,
        status: TransformStatus::Success,
    };
    report.recount();
    report
}

struct Frame<'a> {
    owner: Option<&'a Owner>,
    event_scope: Option<EventScope>,
    in_event_subprocess: bool,
}

struct Visitor<'a> {
    registry: &'a RuleRegistry,
    messages: &'a MessageIndex,
    entries: Vec<LogEntry>,
    counters: Counters,
}

impl Visitor<'_> {
    /// Visits `node` and its subtree. `limit` restricts the traversal to the
    /// first `limit` element children; rules append generated content after
    /// them, and generated content is not visited.
    fn visit(&mut self, node: XmlNode, depth: usize, frame: &Frame<'_>, limit: Option<usize>) -> XmlNode {
        if is_di(&node) {
            return node;
        }
        self.counters.elements_visited += 1;

        let ctx = RuleContext {
            event_scope: frame.event_scope,
            owner: frame.owner,
            messages: self.messages,
        };
        let ext_name = XmlName::bpmn("extensionElements");
        let existing_ext = node.find_child(&ext_name).map(XmlNode::element_count);

        let rule = self.registry.select(&node, &ctx);
        let (mut node, mut outcome) = rule.apply(node, &ctx);
        // Id-less pass-through elements (incoming, outgoing, documentation,
        // expression bodies) are visited without a log line.
        if rule.id == PASSTHROUGH_RULE && node.id().is_none() {
            outcome.log_entries.clear();
            outcome.children_at = 0;
        }
        let flags = strip_async_flags(&mut node, &ctx);
        if !flags.is_empty() {
            let at = outcome.log_entries.len().min(1);
            outcome.children_at += flags.len();
            outcome.log_entries.splice(at..at, flags);
        }

        match outcome.action {
            RuleAction::Rewritten if outcome.replacement_applied => self.counters.elements_mapped += 1,
            RuleAction::PassThrough => self.counters.passthrough += 1,
            _ => {}
        }
        for entry in &mut outcome.log_entries {
            entry.depth = depth;
        }

        if outcome.opaque {
            self.counters.elements_visited += node.descendant_count();
            self.entries.extend(outcome.log_entries);
            return node;
        }

        let mut tail = outcome.log_entries.split_off(outcome.children_at);
        self.entries.append(&mut outcome.log_entries);

        let own_owner = node.id().map(|id| Owner {
            subject: node.name.qualified(),
            id: id.to_string(),
        });
        let child_in_esp = is_event_subprocess(&node);
        let child_scope = EventScope::of(&node, frame.in_event_subprocess);
        let owner = own_owner.as_ref().or(frame.owner);

        let children = std::mem::take(&mut node.children);
        let mut visited_elements = 0;
        let mut seen_ext = false;
        for child in children {
            let element = match child {
                XmlChild::Element(element) => element,
                comment => {
                    node.children.push(comment);
                    continue;
                }
            };
            let within_limit = limit.map_or(true, |l| visited_elements < l);
            visited_elements += 1;
            let is_ext = element.name == ext_name && !seen_ext;
            seen_ext |= is_ext;
            let element = if !within_limit || (is_ext && existing_ext.is_none()) {
                element
            } else {
                let child_frame = Frame {
                    owner,
                    event_scope: child_scope,
                    in_event_subprocess: child_in_esp,
                };
                let child_limit = if is_ext { existing_ext } else { None };
                self.visit(element, depth + 1, &child_frame, child_limit)
            };
            node.children.push(XmlChild::Element(element));
        }

        for entry in &mut tail {
            entry.depth = depth;
        }
        self.entries.append(&mut tail);
        node
    }
}

/// TODO for every Camunda 7 attribute still present after the rules ran.
/// Camunda extension elements are skipped: their TODO covers the subtree.
fn residual_scan(node: &XmlNode, owner: Option<&Owner>, entries: &mut Vec<LogEntry>) {
    if is_di(node) || node.name.is_in(ns::CAMUNDA) {
        return;
    }
    let subject = node.name.qualified();
    let own_owner = node.id().map(|id| Owner {
        subject: subject.clone(),
        id: id.to_string(),
    });
    for (name, value) in node.attributes.iter().filter(|(n, _)| n.is_in(ns::CAMUNDA)) {
        let (id, location) = match (node.id(), owner) {
            (Some(id), _) => (Some(id), format!("{subject} id={id}")),
            (None, Some(o)) => (Some(o.id.as_str()), format!("{subject} in {} id={}", o.subject, o.id)),
            (None, None) => (None, subject.clone()),
        };
        entries.push(LogEntry::about(
            EntryKind::Todo,
            id,
            format!("unhandled camunda:{}=\"{value}\" on {location}", name.local_name),
        ));
    }
    let owner = own_owner.as_ref().or(owner);
    for child in node.elements() {
        residual_scan(child, owner, entries);
    }
}

fn set_execution_platform(root: &mut XmlNode, version: &str) -> Vec<LogEntry> {
    let platform = XmlName::new(ns::MODELER, "executionPlatform");
    let platform_version = XmlName::new(ns::MODELER, "executionPlatformVersion");
    let before = (
        root.attr(&platform).map(str::to_string),
        root.attr(&platform_version).map(str::to_string),
    );
    if before.0.as_deref() == Some(EXECUTION_PLATFORM) && before.1.as_deref() == Some(version) {
        return Vec::new();
    }
    root.set_attr(platform, EXECUTION_PLATFORM);
    root.set_attr(platform_version, version);
    let previous = match before {
        (Some(p), Some(v)) => format!("{p} {v}"),
        (Some(p), None) => p,
        (None, Some(v)) => v,
        (None, None) => "unset".to_string(),
    };
    vec![LogEntry::about(
        EntryKind::Mapping,
        root.id(),
        format!(
            "modeler:executionPlatform {previous} into {EXECUTION_PLATFORM} {version} on {}",
            match root.id() {
                Some(id) => format!("{} id={id}", root.name.qualified()),
                None => root.name.qualified(),
            }
        ),
    )]
}
