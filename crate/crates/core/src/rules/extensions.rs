use crate::model::{ns, XmlName, XmlNode};
use crate::translog::{EntryKind, LogEntry};

use super::{element_clause, RuleAction, RuleContext, RuleOutcome};

/// Job-executor flags without a Camunda 8 counterpart.
const ASYNC_FLAGS: [&str; 3] = ["asyncBefore", "asyncAfter", "exclusive"];

pub(crate) fn is_mappable_camunda_attr(name: &XmlName) -> bool {
    name.is_in(ns::CAMUNDA) && !ASYNC_FLAGS.contains(&name.local_name.as_str())
}

pub(crate) fn has_mappable_camunda_attrs(node: &XmlNode) -> bool {
    node.attributes.iter().any(|(n, _)| is_mappable_camunda_attr(n))
}

/// Drops `camunda:asyncBefore`, `camunda:asyncAfter` and `camunda:exclusive`,
/// returning one NO MAPPING NEEDED note per removed flag.
pub fn strip_async_flags(node: &mut XmlNode, ctx: &RuleContext<'_>) -> Vec<LogEntry> {
    let mut entries = Vec::new();
    for flag in ASYNC_FLAGS {
        if let Some(value) = node.remove_attr(&XmlName::camunda(flag)) {
            entries.push(LogEntry::about(
                EntryKind::NoMappingNeeded,
                node.id(),
                format!(
                    "camunda:{flag}=\"{value}\" on {} dropped (Camunda 8 has no per-element async flags)",
                    element_clause(node, ctx)
                ),
            ));
        }
    }
    entries
}

fn migration_hint(local: &str) -> &'static str {
    match local {
        "inputOutput" => "re-create the mappings as zeebe:ioMapping",
        "in" | "out" => "re-create the variable propagation as zeebe:ioMapping on the call activity",
        "executionListener" => "re-implement the listener as a job worker or zeebe:executionListener",
        "taskListener" => "re-implement the listener as a job worker or zeebe:taskListener",
        "properties" => "re-create the entries as zeebe:properties",
        "failedJobRetryTimeCycle" => "configure retries on zeebe:taskDefinition and backoff in the job worker",
        "formData" => "re-build the form with Camunda Forms",
        "connector" => "replace the connector with a Camunda 8 connector or job worker",
        "field" => "pass the value as a zeebe:taskHeaders entry or variable",
        _ => "no automatic Camunda 8 mapping exists",
    }
}

/// Camunda 7 extension elements are left in place; each top-level construct
/// gets a TODO naming it and its owning element. Nested content belongs to
/// the construct and is not reported separately.
pub fn map_camunda_extension(node: XmlNode, ctx: &RuleContext<'_>) -> (XmlNode, RuleOutcome) {
    let construct = match node.name.local_name.as_str() {
        "executionListener" | "taskListener" => match node.plain_attr("event") {
            Some(event) => format!("{} (event={event})", node.name.qualified()),
            None => node.name.qualified(),
        },
        _ => node.name.qualified(),
    };
    let owner_id = ctx.owner.map(|o| o.id.as_str());
    let entry = LogEntry::about(
        EntryKind::Todo,
        owner_id,
        format!(
            "migrate {construct} on {} manually; {}",
            ctx.owner_clause(),
            migration_hint(&node.name.local_name)
        ),
    );
    let mut outcome = RuleOutcome::leading(RuleAction::Unsupported, vec![entry]);
    outcome.opaque = true;
    (node, outcome)
}
