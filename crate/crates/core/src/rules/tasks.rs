use crate::expression::{juel_to_feel, unwrap_interpolation};
use crate::model::{XmlName, XmlNode};
use crate::translog::{EntryKind, LogEntry};

use super::{is_bpmn, kind_label, optional_about, todo_about, RuleAction, RuleContext, RuleOutcome};

/// How a Camunda 7 element names its implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BindingSource {
    DelegateExpression,
    Topic,
    Expression,
    Class,
}

impl BindingSource {
    fn attr(self) -> &'static str {
        match self {
            BindingSource::DelegateExpression => "delegateExpression",
            BindingSource::Topic => "topic",
            BindingSource::Expression => "expression",
            BindingSource::Class => "class",
        }
    }
}

/// Priority order: first present attribute wins.
const BINDING_PRIORITY: [BindingSource; 4] = [
    BindingSource::DelegateExpression,
    BindingSource::Topic,
    BindingSource::Expression,
    BindingSource::Class,
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct JobBinding {
    pub source: BindingSource,
    pub job_type: String,
}

fn resolve_job_type(source: BindingSource, raw: &str) -> String {
    match source {
        BindingSource::Topic | BindingSource::Class => raw.trim().to_string(),
        BindingSource::DelegateExpression | BindingSource::Expression => unwrap_interpolation(raw),
    }
}

/// Removes the winning implementation attribute from `holder` and returns
/// the resolved job type. Competing binding attributes are removed too, each
/// with a TODO naming it. Attributes that resolve to an empty type are left
/// for the residual scan.
pub(crate) fn take_job_binding(
    holder: &mut XmlNode,
    owner_label: &str,
    entries: &mut Vec<LogEntry>,
) -> Option<JobBinding> {
    let winner = BINDING_PRIORITY.into_iter().find_map(|source| {
        let raw = holder.attr(&XmlName::camunda(source.attr()))?;
        let job_type = resolve_job_type(source, raw);
        (!job_type.is_empty()).then_some(JobBinding { source, job_type })
    })?;
    holder.remove_attr(&XmlName::camunda(winner.source.attr()));
    if winner.source == BindingSource::Topic
        && holder.attr(&XmlName::camunda("type")) == Some("external")
    {
        holder.remove_attr(&XmlName::camunda("type"));
    }
    for source in BINDING_PRIORITY {
        if source == winner.source {
            continue;
        }
        if let Some(raw) = holder.remove_attr(&XmlName::camunda(source.attr())) {
            entries.push(LogEntry::about(
                EntryKind::Todo,
                holder.id(),
                format!(
                    "ignored conflicting camunda:{}=\"{raw}\" on {owner_label}; only camunda:{} was migrated",
                    source.attr(),
                    winner.source.attr()
                ),
            ));
        }
    }
    Some(winner)
}

/// Log lines for a migrated binding, in the order the transformation log
/// documents them: the mapping itself, then the optional follow-ups.
pub(crate) fn binding_entries(
    binding: &JobBinding,
    id: Option<&str>,
    adapt_for: Option<&str>,
) -> Vec<LogEntry> {
    let t = &binding.job_type;
    let mut entries = match binding.source {
        BindingSource::DelegateExpression => vec![
            LogEntry::about(
                EntryKind::Mapping,
                id,
                format!("bpmn:delegateExpression {t} into zeebe:taskDefinition"),
            ),
            LogEntry::about(
                EntryKind::Mapping,
                id,
                format!("camunda:expression {t} into FEEL Expression Language"),
            ),
        ],
        source => vec![LogEntry::about(
            EntryKind::Mapping,
            id,
            format!("camunda:{} {t} into zeebe:taskDefinition", source.attr()),
        )],
    };
    entries.push(LogEntry::about(
        EntryKind::TodoOptional,
        id,
        "set retries=?? in zeebe:taskDefinition Element",
    ));
    let id_text = id.unwrap_or("?");
    if let Some(label) = adapt_for {
        entries.push(LogEntry::about(
            EntryKind::TodoOptional,
            id,
            format!("adapt zeebe:taskDefinition type for {label} with id={id_text} to select correct JobWorker"),
        ));
    }
    entries
}

pub(crate) fn task_definition(job_type: &str) -> XmlNode {
    XmlNode::new(XmlName::zeebe("taskDefinition")).with_attr(XmlName::unqualified("type"), job_type)
}

fn has_task_definition(node: &XmlNode) -> bool {
    node.find_child(&XmlName::bpmn("extensionElements"))
        .is_some_and(|ext| ext.has_child(&XmlName::zeebe("taskDefinition")))
}

pub(crate) fn is_job_worker_task(node: &XmlNode) -> bool {
    is_bpmn(node, "serviceTask")
        || is_bpmn(node, "sendTask")
        || (is_bpmn(node, "businessRuleTask") && node.attr(&XmlName::camunda("decisionRef")).is_none())
}

/// Maps the implementation binding of a service-like task onto a
/// `zeebe:taskDefinition`.
pub fn map_service_task(mut node: XmlNode) -> (XmlNode, RuleOutcome) {
    let subject = node.name.qualified();
    let id = node.id().map(str::to_string);
    let label = kind_label(&node);
    let owner_label = format!("{subject} id={}", id.as_deref().unwrap_or("?"));
    let mut conflicts = Vec::new();

    let Some(binding) = take_job_binding(&mut node, &owner_label, &mut conflicts) else {
        if has_task_definition(&node) {
            let outcome = super::passthrough(&node);
            return (node, outcome);
        }
        let entry = LogEntry::element(EntryKind::Todo, subject, id.as_deref())
            .with_detail("no implementation binding found; configure zeebe:taskDefinition manually");
        return (node, RuleOutcome::pass_through(vec![entry]));
    };

    let mut before = vec![LogEntry::mapping(&subject, id.as_deref())];
    let adapt = match binding.source {
        BindingSource::Expression => Some(label.as_str()),
        _ => None,
    };
    before.extend(binding_entries(&binding, id.as_deref(), adapt));
    if binding.source == BindingSource::Class {
        before.push(LogEntry::about(
            EntryKind::TodoOptional,
            id.as_deref(),
            format!(
                "adapt job type {} for {label} with id={}; a JobWorker must subscribe to it",
                binding.job_type,
                id.as_deref().unwrap_or("?")
            ),
        ));
    }
    before.extend(conflicts);
    node.add_extension(task_definition(&binding.job_type));

    let after = vec![LogEntry::finished(subject, id.as_deref())];
    (node, RuleOutcome::rewritten(before, after, true))
}

pub fn map_business_rule_task(mut node: XmlNode) -> (XmlNode, RuleOutcome) {
    let subject = node.name.qualified();
    let id = node.id().map(str::to_string);
    let id_ref = id.as_deref();
    let mut before = vec![LogEntry::mapping(&subject, id_ref)];

    let decision = node
        .remove_attr(&XmlName::camunda("decisionRef"))
        .unwrap_or_default();
    let mut called = XmlNode::new(XmlName::zeebe("calledDecision"));
    let decision_id = if decision.contains("${") {
        let rw = juel_to_feel(&decision);
        if !rw.confident {
            before.push(todo_about(
                &node,
                format!("translate camunda:decisionRef {decision} to FEEL manually for {subject} id={}", id_ref.unwrap_or("?")),
            ));
        }
        rw.rewritten
    } else {
        decision.clone()
    };
    called.set_attr(XmlName::unqualified("decisionId"), &decision_id);
    before.push(LogEntry::about(
        EntryKind::Mapping,
        id_ref,
        format!("camunda:decisionRef {decision} into zeebe:calledDecision"),
    ));

    match node.remove_attr(&XmlName::camunda("resultVariable")) {
        Some(var) => called.set_attr(XmlName::unqualified("resultVariable"), var),
        None => before.push(todo_about(
            &node,
            format!(
                "define resultVariable for zeebe:calledDecision on {subject} id={}",
                id_ref.unwrap_or("?")
            ),
        )),
    }
    if let Some(mode) = node.remove_attr(&XmlName::camunda("mapDecisionResult")) {
        before.push(optional_about(
            &node,
            format!(
                "verify decision result shape for {subject} id={}: camunda:mapDecisionResult=\"{mode}\" has no Camunda 8 counterpart",
                id_ref.unwrap_or("?")
            ),
        ));
    }
    node.add_extension(called);
    let after = vec![LogEntry::finished(subject, id_ref)];
    (node, RuleOutcome::rewritten(before, after, true))
}

const ASSIGNMENT_ATTRS: [&str; 3] = ["assignee", "candidateGroups", "candidateUsers"];
const SCHEDULE_ATTRS: [&str; 2] = ["dueDate", "followUpDate"];

/// Relocates user task assignment and scheduling attributes.
pub fn map_user_task(mut node: XmlNode) -> (XmlNode, RuleOutcome) {
    let subject = node.name.qualified();
    let id = node.id().map(str::to_string);
    let id_ref = id.as_deref();
    let id_text = id_ref.unwrap_or("?");
    let mut before = vec![LogEntry::mapping(&subject, id_ref)];

    let feel_value = |node: &XmlNode, attr: &str, value: String, before: &mut Vec<LogEntry>| {
        if !value.contains("${") {
            return value;
        }
        let rw = juel_to_feel(&value);
        if !rw.confident {
            before.push(todo_about(
                node,
                format!("translate camunda:{attr} expression {value} to FEEL manually for {subject} id={id_text}"),
            ));
        }
        rw.rewritten
    };

    let mut assignment = XmlNode::new(XmlName::zeebe("assignmentDefinition"));
    for attr in ASSIGNMENT_ATTRS {
        if let Some(value) = node.remove_attr(&XmlName::camunda(attr)) {
            let value = feel_value(&node, attr, value, &mut before);
            before.push(LogEntry::about(
                EntryKind::Mapping,
                id_ref,
                format!("camunda:{attr} {value} into zeebe:assignmentDefinition"),
            ));
            assignment.set_attr(XmlName::unqualified(attr), value);
        }
    }
    let mut schedule = XmlNode::new(XmlName::zeebe("taskSchedule"));
    for attr in SCHEDULE_ATTRS {
        if let Some(value) = node.remove_attr(&XmlName::camunda(attr)) {
            let value = feel_value(&node, attr, value, &mut before);
            before.push(LogEntry::about(
                EntryKind::Mapping,
                id_ref,
                format!("camunda:{attr} {value} into zeebe:taskSchedule"),
            ));
            schedule.set_attr(XmlName::unqualified(attr), value);
        }
    }
    if let Some(key) = node.remove_attr(&XmlName::camunda("formKey")) {
        before.push(todo_about(
            &node,
            format!("migrate form {key} manually for {subject} id={id_text}"),
        ));
    }

    let leftovers: Vec<(XmlName, String)> = node
        .attributes
        .iter()
        .filter(|(n, _)| super::extensions::is_mappable_camunda_attr(n))
        .cloned()
        .collect();
    for (name, value) in leftovers {
        node.remove_attr(&name);
        before.push(todo_about(
            &node,
            format!(
                "dropped camunda:{}=\"{value}\" on {subject} id={id_text}; no Camunda 8 counterpart",
                name.local_name
            ),
        ));
    }

    let applied = !assignment.attributes.is_empty() || !schedule.attributes.is_empty();
    if !assignment.attributes.is_empty() {
        node.add_extension(assignment);
    }
    if !schedule.attributes.is_empty() {
        node.add_extension(schedule);
    }
    let after = vec![LogEntry::finished(subject, id_ref)];
    (node, RuleOutcome::rewritten(before, after, applied))
}

/// Script tasks are reported and left as they are.
pub fn detect_unsupported(node: &XmlNode) -> RuleOutcome {
    let id = node.id().unwrap_or("?");
    let entry = LogEntry::about(
        EntryKind::Todo,
        node.id(),
        format!("scriptTask id={id} is unsupported; convert to a job-worker-based task manually"),
    );
    RuleOutcome::leading(RuleAction::Unsupported, vec![entry])
}

pub fn map_receive_task(node: XmlNode, ctx: &RuleContext<'_>) -> (XmlNode, RuleOutcome) {
    let subject = node.name.qualified();
    let id = node.id().map(str::to_string);
    let mut before = vec![LogEntry::mapping(&subject, id.as_deref())];
    match node.plain_attr("messageRef") {
        Some(message_ref) => {
            let name = ctx.messages.name(message_ref).unwrap_or(message_ref);
            before.push(todo_about(
                &node,
                format!(
                    "define correlation key for message {name} (zeebe:subscription) used by {subject} id={}",
                    id.as_deref().unwrap_or("?")
                ),
            ));
        }
        None => before.push(todo_about(
            &node,
            format!(
                "receiveTask id={} has no messageRef; define a message with a correlation key",
                id.as_deref().unwrap_or("?")
            ),
        )),
    }
    let after = vec![LogEntry::finished(subject, id.as_deref())];
    (node, RuleOutcome::rewritten(before, after, false))
}

pub fn map_call_activity(mut node: XmlNode) -> (XmlNode, RuleOutcome) {
    let subject = node.name.qualified();
    let id = node.id().map(str::to_string);
    let id_ref = id.as_deref();
    let id_text = id_ref.unwrap_or("?");
    let mut before = vec![LogEntry::mapping(&subject, id_ref)];

    let Some(called) = node.remove_attr(&XmlName::unqualified("calledElement")) else {
        before.push(todo_about(
            &node,
            format!("callActivity id={id_text} has no calledElement; set zeebe:calledElement processId manually"),
        ));
        let after = vec![LogEntry::finished(subject, id_ref)];
        return (node, RuleOutcome::rewritten(before, after, false));
    };

    let process_id = if called.contains("${") {
        let rw = juel_to_feel(&called);
        let detail = if rw.confident {
            format!("verify dynamic processId expression {} on {subject} id={id_text}", rw.rewritten)
        } else {
            format!("translate calledElement expression {called} to FEEL manually for {subject} id={id_text}")
        };
        before.push(todo_about(&node, detail));
        rw.rewritten
    } else {
        called.clone()
    };
    before.push(LogEntry::about(
        EntryKind::Mapping,
        id_ref,
        format!("calledElement {called} into zeebe:calledElement processId"),
    ));
    node.add_extension(
        XmlNode::new(XmlName::zeebe("calledElement"))
            .with_attr(XmlName::unqualified("processId"), process_id),
    );
    let after = vec![LogEntry::finished(subject, id_ref)];
    (node, RuleOutcome::rewritten(before, after, true))
}
