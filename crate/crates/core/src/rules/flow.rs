use crate::expression::{is_interpolation, juel_to_feel, unwrap_interpolation};
use crate::model::{XmlName, XmlNode};
use crate::translog::{EntryKind, LogEntry};

use super::extensions::strip_async_flags;
use super::{element_clause, RuleContext, RuleOutcome};

/// Rewrites the JUEL condition of a sequence flow into FEEL.
pub fn map_condition_expression(mut node: XmlNode) -> (XmlNode, RuleOutcome) {
    let subject = node.name.qualified();
    let id = node.id().map(str::to_string);
    let id_ref = id.as_deref();
    let id_text = id_ref.unwrap_or("?");
    let mut before = vec![LogEntry::mapping(&subject, id_ref)];
    let mut applied = false;

    let cond_name = XmlName::bpmn("conditionExpression");
    if let Some(cond) = node.find_child_mut(&cond_name) {
        let text = cond.text.clone().unwrap_or_default();
        if let Some(language) = cond.plain_attr("language") {
            before.push(LogEntry::about(
                EntryKind::Todo,
                id_ref,
                format!("translate condition to FEEL manually for {subject} id={id_text}: script condition (language={language})"),
            ));
        } else if text.trim().is_empty() {
            before.push(LogEntry::about(
                EntryKind::Todo,
                id_ref,
                format!("translate condition to FEEL manually for {subject} id={id_text}: condition is empty"),
            ));
        } else {
            let rw = juel_to_feel(&text);
            if rw.confident && rw.changed() {
                before.push(LogEntry::about(
                    EntryKind::Mapping,
                    id_ref,
                    format!("bpmn:conditionExpression {} into FEEL Expression Language", text.trim()),
                ));
                cond.text = Some(rw.rewritten);
                applied = true;
            } else if !rw.confident {
                before.push(LogEntry::about(
                    EntryKind::Todo,
                    id_ref,
                    format!(
                        "translate condition to FEEL manually for {subject} id={id_text}: {}",
                        rw.notes.join("; ")
                    ),
                ));
            } else if !text.trim_start().starts_with('=') {
                before.push(LogEntry::about(
                    EntryKind::Todo,
                    id_ref,
                    format!("translate condition to FEEL manually for {subject} id={id_text}: static text is not a FEEL expression"),
                ));
            }
        }
    }
    let after = vec![LogEntry::finished(subject, id_ref)];
    (node, RuleOutcome::rewritten(before, after, applied))
}

/// Context-free form of the multi-instance mapping.
pub fn map_multi_instance(node: XmlNode) -> (XmlNode, RuleOutcome) {
    map_multi_instance_in(node, &RuleContext::detached())
}

/// Moves `camunda:collection` / `camunda:elementVariable` into
/// `zeebe:loopCharacteristics`. `isSequential` is kept as it is.
pub(crate) fn map_multi_instance_in(mut node: XmlNode, ctx: &RuleContext<'_>) -> (XmlNode, RuleOutcome) {
    let subject = node.name.qualified();
    let id = node.id().map(str::to_string);
    let id_ref = id.as_deref().or(ctx.owner.map(|o| o.id.as_str()));
    let clause = element_clause(&node, ctx);
    let mut before = vec![LogEntry::mapping(&subject, id.as_deref())];
    before.extend(strip_async_flags(&mut node, ctx));

    let collection = node.remove_attr(&XmlName::camunda("collection"));
    let element = node.remove_attr(&XmlName::camunda("elementVariable"));
    let mut applied = false;

    match collection {
        Some(raw) => {
            let plain = unwrap_interpolation(&raw);
            let input_collection = if is_interpolation(&raw) {
                let rw = juel_to_feel(&raw);
                if rw.confident {
                    rw.rewritten
                } else {
                    before.push(LogEntry::about(
                        EntryKind::Todo,
                        id_ref,
                        format!(
                            "translate inputCollection ={plain} to FEEL manually for {clause}: {}",
                            rw.notes.join("; ")
                        ),
                    ));
                    format!("={plain}")
                }
            } else {
                format!("={plain}")
            };
            before.push(LogEntry::about(
                EntryKind::Mapping,
                id_ref,
                format!("camunda:collection {raw} into zeebe:loopCharacteristics inputCollection"),
            ));
            let mut loop_chars = XmlNode::new(XmlName::zeebe("loopCharacteristics"))
                .with_attr(XmlName::unqualified("inputCollection"), input_collection);
            if let Some(raw) = &element {
                before.push(LogEntry::about(
                    EntryKind::Mapping,
                    id_ref,
                    format!("camunda:elementVariable {raw} into zeebe:loopCharacteristics inputElement"),
                ));
                loop_chars.set_attr(XmlName::unqualified("inputElement"), unwrap_interpolation(raw));
            }
            node.add_extension(loop_chars);
            applied = true;
        }
        None => {
            let element_note = element
                .as_deref()
                .map(|e| format!(" (camunda:elementVariable was {e})"))
                .unwrap_or_default();
            before.push(LogEntry::about(
                EntryKind::Todo,
                id_ref,
                format!("define inputCollection for {clause}{element_note}"),
            ));
        }
    }

    if node.has_child(&XmlName::bpmn("loopCardinality")) {
        before.push(LogEntry::about(
            EntryKind::Todo,
            id_ref,
            format!("loopCardinality on {clause} is not supported in Camunda 8; iterate over an inputCollection instead"),
        ));
    }
    if let Some(completion) = node.find_child_mut(&XmlName::bpmn("completionCondition")) {
        if let Some(text) = completion.text.clone() {
            let rw = juel_to_feel(&text);
            if rw.confident && rw.changed() {
                before.push(LogEntry::about(
                    EntryKind::Mapping,
                    id_ref,
                    format!("bpmn:completionCondition {} into FEEL Expression Language", text.trim()),
                ));
                completion.text = Some(rw.rewritten);
                applied = true;
            } else if !rw.confident {
                before.push(LogEntry::about(
                    EntryKind::Todo,
                    id_ref,
                    format!("translate completionCondition to FEEL manually for {clause}: {}", rw.notes.join("; ")),
                ));
            }
        }
    }

    let after = vec![LogEntry::finished(subject, id.as_deref())];
    (node, RuleOutcome::rewritten(before, after, applied))
}
