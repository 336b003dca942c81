use crate::model::{ns, XmlName, XmlNode};
use crate::translog::{EntryKind, LogEntry};

use super::tasks::{binding_entries, take_job_binding, task_definition};
use super::{element_clause, EventScope, RuleAction, RuleContext, RuleOutcome};

const DEPRECATED_DEFINITIONS: [(&str, &str); 2] = [
    ("conditionalEventDefinition", "conditional event"),
    ("cancelEventDefinition", "cancel event"),
];

fn is_event(node: &XmlNode) -> bool {
    node.name.is_in(ns::BPMN) && node.name.local_name.ends_with("Event")
}

pub(crate) fn has_deprecated_definition(node: &XmlNode) -> bool {
    is_event(node)
        && DEPRECATED_DEFINITIONS
            .iter()
            .any(|(local, _)| node.has_child(&XmlName::bpmn(local)))
}

/// Events built on definitions Camunda 8 does not execute. The element is
/// left in place.
pub fn detect_deprecated(node: &XmlNode) -> RuleOutcome {
    let kind = DEPRECATED_DEFINITIONS
        .iter()
        .find(|(local, _)| node.has_child(&XmlName::bpmn(local)))
        .map(|(_, kind)| *kind)
        .unwrap_or("event");
    let entry = LogEntry::about(
        EntryKind::Todo,
        node.id(),
        format!(
            "element {kind} id={} is not supported in Camunda 8; remodel manually",
            node.id().unwrap_or("?")
        ),
    );
    RuleOutcome::leading(RuleAction::DeprecatedWarning, vec![entry])
}

pub(crate) fn is_message_throw_event(node: &XmlNode) -> bool {
    EventScope::of(node, false) == Some(EventScope::Throw)
        && node.has_child(&XmlName::bpmn("messageEventDefinition"))
}

/// Message throw events run as job workers in Camunda 8. The implementation
/// binding, found on the event or on its message definition, becomes a
/// `zeebe:taskDefinition` on the event.
///
/// The log uses two levels for the event (`bpmn:event`, then
/// `bpmn:throwEvent`); the definition's own entries nest inside them.
pub fn map_message_throw_event(mut node: XmlNode) -> (XmlNode, RuleOutcome) {
    let id = node.id().map(str::to_string);
    let id_ref = id.as_deref();
    let owner_label = format!("{} id={}", node.name.qualified(), id_ref.unwrap_or("?"));
    let mut conflicts = Vec::new();

    let mut binding = take_job_binding(&mut node, &owner_label, &mut conflicts);
    if binding.is_none() {
        if let Some(def) = node.find_child_mut(&XmlName::bpmn("messageEventDefinition")) {
            binding = take_job_binding(def, &owner_label, &mut conflicts);
        }
    }

    let mut log_entries = vec![
        LogEntry::mapping("bpmn:event", id_ref),
        LogEntry::mapping("bpmn:throwEvent", id_ref),
    ];
    let children_at = log_entries.len();
    if let Some(binding) = &binding {
        log_entries.extend(binding_entries(binding, id_ref, Some("Event")));
        node.add_extension(task_definition(&binding.job_type));
    }
    log_entries.extend(conflicts);
    log_entries.push(LogEntry::finished("bpmn:throwEvent", id_ref));
    log_entries.push(LogEntry::finished("bpmn:event", id_ref));

    let outcome = RuleOutcome {
        action: RuleAction::Rewritten,
        log_entries,
        children_at,
        replacement_applied: binding.is_some(),
        opaque: false,
    };
    (node, outcome)
}

/// Logs what a message definition still needs: a job worker in throw
/// events, a correlation key in catch events. The subscription itself is
/// added to the referenced `bpmn:message`.
pub fn map_message_event_definition(node: XmlNode, ctx: &RuleContext<'_>) -> (XmlNode, RuleOutcome) {
    let id = node.id().or(ctx.owner.map(|o| o.id.as_str())).map(str::to_string);
    let id_ref = id.as_deref();
    let own_id = node.id().map(str::to_string);
    let mut before = vec![LogEntry::mapping("bpmn:eventDefinition", own_id.as_deref())];

    match ctx.event_scope {
        Some(EventScope::Throw) => before.push(LogEntry::about(
            EntryKind::Todo,
            id_ref,
            format!(
                "manually configure Jobworker for Message Event Definition with id={}",
                id_ref.unwrap_or("?")
            ),
        )),
        _ => match node.plain_attr("messageRef") {
            Some(message_ref) => {
                let name = ctx.messages.name(message_ref).unwrap_or(message_ref);
                before.push(LogEntry::about(
                    EntryKind::Todo,
                    id_ref,
                    format!(
                        "define correlation key for message {name} (zeebe:subscription) used by {}",
                        element_clause(&node, ctx)
                    ),
                ));
            }
            None => before.push(LogEntry::about(
                EntryKind::Todo,
                id_ref,
                format!(
                    "{} has no messageRef; define a message with a correlation key",
                    element_clause(&node, ctx)
                ),
            )),
        },
    }

    let after = vec![LogEntry::finished("bpmn:eventDefinition", own_id.as_deref())];
    (node, RuleOutcome::rewritten(before, after, false))
}

/// Adds `zeebe:subscription` with an empty `correlationKey` to a message
/// that a catching element waits for.
pub fn map_message_subscription(mut node: XmlNode, ctx: &RuleContext<'_>) -> (XmlNode, RuleOutcome) {
    let subject = node.name.qualified();
    let id = node.id().map(str::to_string);
    let id_ref = id.as_deref();
    let has_subscription = node
        .find_child(&XmlName::bpmn("extensionElements"))
        .is_some_and(|ext| ext.has_child(&XmlName::zeebe("subscription")));
    if has_subscription {
        let outcome = super::passthrough(&node);
        return (node, outcome);
    }
    let name = id_ref
        .and_then(|m| ctx.messages.name(m))
        .unwrap_or(id_ref.unwrap_or("?"))
        .to_string();
    let before = vec![
        LogEntry::mapping(&subject, id_ref),
        LogEntry::about(
            EntryKind::Mapping,
            id_ref,
            format!("bpmn:message {name} into zeebe:subscription with empty correlationKey"),
        ),
    ];
    node.add_extension(
        XmlNode::new(XmlName::zeebe("subscription")).with_attr(XmlName::unqualified("correlationKey"), ""),
    );
    let after = vec![LogEntry::finished(subject, id_ref)];
    (node, RuleOutcome::rewritten(before, after, true))
}

const TIMER_VALUES: [&str; 3] = ["timeDate", "timeDuration", "timeCycle"];

/// Context-free form of the timer mapping.
pub fn map_timer_event_definition(node: XmlNode) -> (XmlNode, RuleOutcome) {
    map_timer_in(node, &RuleContext::detached())
}

/// Timer definitions are copied unchanged: ISO 8601 values mean the same in
/// both engines. JUEL values need a manual FEEL rewrite.
pub(crate) fn map_timer_in(node: XmlNode, ctx: &RuleContext<'_>) -> (XmlNode, RuleOutcome) {
    let id = node.id().or(ctx.owner.map(|o| o.id.as_str())).map(str::to_string);
    let id_ref = id.as_deref();
    let clause = element_clause(&node, ctx);
    let mut entries = vec![LogEntry::no_mapping(node.name.qualified(), node.id())];
    for local in TIMER_VALUES {
        let Some(value) = node.find_child(&XmlName::bpmn(local)) else {
            continue;
        };
        let text = value.text.as_deref().unwrap_or("").trim();
        let entry = if text.contains("${") || text.contains("#{") {
            LogEntry::about(
                EntryKind::Todo,
                id_ref,
                format!("translate timer expression {local} {text} to FEEL manually for {clause}"),
            )
        } else {
            LogEntry::about(
                EntryKind::TodoOptional,
                id_ref,
                format!("verify timer expression compatibility for {local} {text} on {clause}"),
            )
        };
        entries.push(entry);
    }
    if entries.len() == 1 {
        entries.push(LogEntry::about(
            EntryKind::TodoOptional,
            id_ref,
            format!("verify timer expression compatibility on {clause}: no time value defined"),
        ));
    }
    (node, RuleOutcome::pass_through(entries))
}
