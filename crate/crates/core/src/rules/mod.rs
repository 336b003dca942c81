//! Camunda 7 to Camunda 8 mapping rules.
//!
//! Each [`MappingRule`] pairs a predicate with a rewrite. The
//! [`RuleRegistry`] holds them in priority order: the first rule whose
//! predicate matches an element handles it, and `passthrough` matches
//! everything, so selection always succeeds.

mod events;
mod extensions;
mod flow;
mod tasks;

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{ns, XmlName, XmlNode};
use crate::translog::{EntryKind, LogEntry};

pub use events::{
    detect_deprecated, map_message_event_definition, map_message_subscription,
    map_message_throw_event, map_timer_event_definition,
};
pub use extensions::{map_camunda_extension, strip_async_flags};
pub use flow::{map_condition_expression, map_multi_instance};
pub use tasks::{
    detect_unsupported, map_business_rule_task, map_call_activity, map_receive_task,
    map_service_task, map_user_task,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleAction {
    Rewritten,
    PassThrough,
    DeprecatedWarning,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleOutcome {
    pub action: RuleAction,
    pub log_entries: Vec<LogEntry>,
    /// Position in `log_entries` where the entries of the element's
    /// descendants belong.
    pub children_at: usize,
    pub replacement_applied: bool,
    /// The rule accounts for the whole subtree; descendants are not visited
    /// individually.
    pub opaque: bool,
}

impl RuleOutcome {
    /// `before` opens with the MAPPING entry, `after` closes with FINISHED.
    pub fn rewritten(before: Vec<LogEntry>, after: Vec<LogEntry>, applied: bool) -> Self {
        let children_at = before.len();
        let mut log_entries = before;
        log_entries.extend(after);
        Self {
            action: RuleAction::Rewritten,
            log_entries,
            children_at,
            replacement_applied: applied,
            opaque: false,
        }
    }

    pub fn pass_through(log_entries: Vec<LogEntry>) -> Self {
        Self::leading(RuleAction::PassThrough, log_entries)
    }

    /// Outcome whose entries all precede the descendants' entries.
    pub fn leading(action: RuleAction, log_entries: Vec<LogEntry>) -> Self {
        Self {
            action,
            children_at: log_entries.len(),
            log_entries,
            replacement_applied: false,
            opaque: false,
        }
    }
}

/// Whether an event throws, catches, or starts a process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventScope {
    Throw,
    Catch,
    /// Plain process start; event sub-process starts count as catches
    /// because they correlate against a running instance.
    Start,
}

impl EventScope {
    pub fn of(node: &XmlNode, in_event_subprocess: bool) -> Option<Self> {
        if !node.name.is_in(ns::BPMN) {
            return None;
        }
        match node.name.local_name.as_str() {
            "intermediateThrowEvent" | "endEvent" => Some(Self::Throw),
            "intermediateCatchEvent" | "boundaryEvent" => Some(Self::Catch),
            "startEvent" if in_event_subprocess => Some(Self::Catch),
            "startEvent" => Some(Self::Start),
            _ => None,
        }
    }
}

pub fn is_event_subprocess(node: &XmlNode) -> bool {
    node.name.is(ns::BPMN, "subProcess") && node.plain_attr("triggeredByEvent") == Some("true")
}

/// Message names and which messages need a correlation key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MessageIndex {
    names: BTreeMap<String, String>,
    correlated: BTreeSet<String>,
}

static NO_MESSAGES: MessageIndex = MessageIndex {
    names: BTreeMap::new(),
    correlated: BTreeSet::new(),
};

impl MessageIndex {
    pub fn build(root: &XmlNode) -> Self {
        let mut index = Self::default();
        index.collect(root, false);
        index
    }

    fn collect(&mut self, node: &XmlNode, in_event_subprocess: bool) {
        if node.name.is(ns::BPMN, "message") {
            if let Some(id) = node.id() {
                let name = node.plain_attr("name").unwrap_or(id);
                self.names.insert(id.to_string(), name.to_string());
            }
        }
        if node.name.is(ns::BPMN, "receiveTask") {
            if let Some(r) = node.plain_attr("messageRef") {
                self.correlated.insert(r.to_string());
            }
        }
        if EventScope::of(node, in_event_subprocess) == Some(EventScope::Catch) {
            for def in node.find_children(&XmlName::bpmn("messageEventDefinition")) {
                if let Some(r) = def.plain_attr("messageRef") {
                    self.correlated.insert(r.to_string());
                }
            }
        }
        let child_in_esp = is_event_subprocess(node);
        for child in node.elements() {
            self.collect(child, child_in_esp);
        }
    }

    pub fn name(&self, message_id: &str) -> Option<&str> {
        self.names.get(message_id).map(String::as_str)
    }

    pub fn needs_correlation(&self, message_id: &str) -> bool {
        self.correlated.contains(message_id)
    }
}

/// The nearest enclosing element that has an id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Owner {
    pub subject: String,
    pub id: String,
}

#[derive(Debug, Clone, Copy)]
pub struct RuleContext<'a> {
    /// Scope of the directly enclosing event, for event definitions.
    pub event_scope: Option<EventScope>,
    pub owner: Option<&'a Owner>,
    pub messages: &'a MessageIndex,
}

impl<'a> RuleContext<'a> {
    /// Context with no enclosing element and no message information.
    pub fn detached() -> RuleContext<'static> {
        RuleContext {
            event_scope: None,
            owner: None,
            messages: &NO_MESSAGES,
        }
    }

    pub fn with_event_scope(mut self, scope: EventScope) -> Self {
        self.event_scope = Some(scope);
        self
    }

    pub fn with_owner(mut self, owner: &'a Owner) -> Self {
        self.owner = Some(owner);
        self
    }

    pub fn with_messages(mut self, messages: &'a MessageIndex) -> Self {
        self.messages = messages;
        self
    }

    /// `subject id=ID` for the owner, used in TODO texts about elements
    /// that have no id of their own.
    pub(crate) fn owner_clause(&self) -> String {
        match self.owner {
            Some(o) => format!("{} id={}", o.subject, o.id),
            None => "document".to_string(),
        }
    }
}

type MatchFn = fn(&XmlNode, &RuleContext<'_>) -> bool;
type ApplyFn = fn(XmlNode, &RuleContext<'_>) -> (XmlNode, RuleOutcome);

pub struct MappingRule {
    pub id: &'static str,
    /// Element(s) the rule targets, for the rendered mapping table.
    pub element: &'static str,
    pub summary: &'static str,
    matches: MatchFn,
    apply: ApplyFn,
}

impl MappingRule {
    pub fn matches(&self, node: &XmlNode, ctx: &RuleContext<'_>) -> bool {
        (self.matches)(node, ctx)
    }

    pub fn apply(&self, node: XmlNode, ctx: &RuleContext<'_>) -> (XmlNode, RuleOutcome) {
        debug_assert!(self.matches(&node, ctx), "rule {} applied to a non-matching node", self.id);
        (self.apply)(node, ctx)
    }
}

impl std::fmt::Debug for MappingRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MappingRule").field("id", &self.id).finish()
    }
}

pub struct RuleRegistry {
    rules: Vec<MappingRule>,
}

impl Default for RuleRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl RuleRegistry {
    /// The built-in rule set. Order is priority: unsupported and deprecated
    /// detection, then the mappers, then pass-through.
    pub fn standard() -> Self {
        let rules = vec![
            MappingRule {
                id: "script-task.unsupported",
                element: "bpmn:scriptTask",
                summary: "left unchanged; TODO to convert into a job-worker based task",
                matches: |n, _| is_bpmn(n, "scriptTask"),
                apply: |n, _| {
                    let outcome = detect_unsupported(&n);
                    (n, outcome)
                },
            },
            MappingRule {
                id: "event.deprecated-definition",
                element: "event with bpmn:conditionalEventDefinition or bpmn:cancelEventDefinition",
                summary: "left unchanged; TODO to remodel (no Camunda 8 support)",
                matches: |n, _| events::has_deprecated_definition(n),
                apply: |n, _| {
                    let outcome = detect_deprecated(&n);
                    (n, outcome)
                },
            },
            MappingRule {
                id: "business-rule-task.called-decision",
                element: "bpmn:businessRuleTask with camunda:decisionRef",
                summary: "camunda:decisionRef and camunda:resultVariable into zeebe:calledDecision",
                matches: |n, _| {
                    is_bpmn(n, "businessRuleTask") && n.attr(&XmlName::camunda("decisionRef")).is_some()
                },
                apply: |n, _| map_business_rule_task(n),
            },
            MappingRule {
                id: "service-task.task-definition",
                element: "bpmn:serviceTask, bpmn:sendTask, bpmn:businessRuleTask",
                summary: "camunda:delegateExpression / topic / expression / class into zeebe:taskDefinition type",
                matches: |n, _| tasks::is_job_worker_task(n),
                apply: |n, _| map_service_task(n),
            },
            MappingRule {
                id: "user-task.assignment",
                element: "bpmn:userTask with Camunda attributes",
                summary: "assignee / candidate groups and users into zeebe:assignmentDefinition, due and follow-up dates into zeebe:taskSchedule",
                matches: |n, _| is_bpmn(n, "userTask") && extensions::has_mappable_camunda_attrs(n),
                apply: |n, _| map_user_task(n),
            },
            MappingRule {
                id: "sequence-flow.condition-expression",
                element: "bpmn:sequenceFlow with bpmn:conditionExpression",
                summary: "JUEL condition into FEEL",
                matches: |n, _| is_bpmn(n, "sequenceFlow") && n.has_child(&XmlName::bpmn("conditionExpression")),
                apply: |n, _| map_condition_expression(n),
            },
            MappingRule {
                id: "multi-instance.loop-characteristics",
                element: "bpmn:multiInstanceLoopCharacteristics",
                summary: "camunda:collection / camunda:elementVariable into zeebe:loopCharacteristics",
                matches: |n, _| is_bpmn(n, "multiInstanceLoopCharacteristics"),
                apply: |n, ctx| flow::map_multi_instance_in(n, ctx),
            },
            MappingRule {
                id: "message-event.throw-job-worker",
                element: "message intermediate throw or end event",
                summary: "implementation binding into zeebe:taskDefinition on the event",
                matches: |n, _| events::is_message_throw_event(n),
                apply: |n, _| map_message_throw_event(n),
            },
            MappingRule {
                id: "message-event-definition",
                element: "bpmn:messageEventDefinition in a throw or catch event",
                summary: "TODO for the job worker (throw) or the correlation key (catch)",
                matches: |n, ctx| {
                    is_bpmn(n, "messageEventDefinition")
                        && matches!(ctx.event_scope, Some(EventScope::Throw | EventScope::Catch))
                },
                apply: map_message_event_definition,
            },
            MappingRule {
                id: "message.subscription",
                element: "bpmn:message referenced by a catching element",
                summary: "adds zeebe:subscription with an empty correlationKey to fill in",
                matches: |n, ctx| {
                    is_bpmn(n, "message") && n.id().is_some_and(|id| ctx.messages.needs_correlation(id))
                },
                apply: map_message_subscription,
            },
            MappingRule {
                id: "receive-task.message",
                element: "bpmn:receiveTask",
                summary: "TODO for the message correlation key",
                matches: |n, _| is_bpmn(n, "receiveTask"),
                apply: map_receive_task,
            },
            MappingRule {
                id: "timer-event-definition",
                element: "bpmn:timerEventDefinition",
                summary: "left unchanged; TODO (OPTIONAL) to verify the timer value, TODO for JUEL values",
                matches: |n, _| is_bpmn(n, "timerEventDefinition"),
                apply: events::map_timer_in,
            },
            MappingRule {
                id: "call-activity.called-element",
                element: "bpmn:callActivity",
                summary: "calledElement into zeebe:calledElement processId",
                matches: |n, _| is_bpmn(n, "callActivity"),
                apply: |n, _| map_call_activity(n),
            },
            MappingRule {
                id: "camunda.extension-element",
                element: "camunda:* extension elements",
                summary: "left in place; TODO naming the construct (inputOutput, listeners, properties, ...)",
                matches: |n, _| n.name.is_in(ns::CAMUNDA),
                apply: map_camunda_extension,
            },
            MappingRule {
                id: "passthrough",
                element: "any other element",
                summary: "copied unchanged",
                matches: |_, _| true,
                apply: |n, _| {
                    let outcome = passthrough(&n);
                    (n, outcome)
                },
            },
        ];
        Self { rules }
    }

    pub fn rules(&self) -> &[MappingRule] {
        &self.rules
    }

    /// Highest-priority matching rule.
    pub fn select(&self, node: &XmlNode, ctx: &RuleContext<'_>) -> &MappingRule {
        self.rules
            .iter()
            .find(|r| r.matches(node, ctx))
            .expect("passthrough matches every element")
    }

    /// Markdown table of the registry, in priority order.
    pub fn mapping_table(&self) -> String {
        let mut out = String::from("| # | Rule | Element | Mapping |\n|---|---|---|---|\n");
        for (i, rule) in self.rules.iter().enumerate() {
            out.push_str(&format!(
                "| {} | `{}` | {} | {} |\n",
                i + 1,
                rule.id,
                rule.element,
                rule.summary
            ));
        }
        out
    }
}

/// Default rule: one NO MAPPING NEEDED entry, element untouched.
pub fn passthrough(node: &XmlNode) -> RuleOutcome {
    RuleOutcome::pass_through(vec![LogEntry::no_mapping(node.name.qualified(), node.id())])
}

pub(crate) fn is_bpmn(node: &XmlNode, local: &str) -> bool {
    node.name.is(ns::BPMN, local)
}

/// `ServiceTask`, `SendTask`, ... for TODO texts.
pub(crate) fn kind_label(node: &XmlNode) -> String {
    let mut chars = node.name.local_name.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// `subject id=ID` for a node, falling back to the context owner.
pub(crate) fn element_clause(node: &XmlNode, ctx: &RuleContext<'_>) -> String {
    match node.id() {
        Some(id) => format!("{} id={id}", node.name.qualified()),
        None => format!("{} in {}", node.name.qualified(), ctx.owner_clause()),
    }
}

pub(crate) fn todo_about(node: &XmlNode, detail: impl Into<String>) -> LogEntry {
    LogEntry::about(EntryKind::Todo, node.id(), detail)
}

pub(crate) fn optional_about(node: &XmlNode, detail: impl Into<String>) -> LogEntry {
    LogEntry::about(EntryKind::TodoOptional, node.id(), detail)
}
