//! Oracles and acceptance checks shared by the integration tests.
//!
//! The oracles work on rendered log lines and on the canonical XML tree,
//! not on the engine's own data structures.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use c7to8_core::canonical::{canonicalize, canonicalize_fragment, CanonicalElement};
use c7to8_core::rules::{is_event_subprocess, EventScope, MessageIndex, Owner, RuleContext};
use c7to8_core::{
    convert, juel_to_feel, parse_bpmn, render_section, serialize_bpmn, unwrap_interpolation,
    Conversion, RuleRegistry, Severity, TransformOptions, TransformStatus, XmlNode,
};

pub const BPMN: &str = "http://www.omg.org/spec/BPMN/20100524/MODEL";
pub const BPMNDI: &str = "http://www.omg.org/spec/BPMN/20100524/DI";
pub const CAMUNDA: &str = "http://camunda.org/schema/1.0/bpmn";
pub const ZEEBE: &str = "http://camunda.org/schema/zeebe/1.0";

pub const PREFIXES: [&str; 5] = [
    "TODO (OPTIONAL): ",
    "NO MAPPING NEEDED: ",
    "FINISHED MAPPING: ",
    "MAPPING: ",
    "TODO: ",
];

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

/// `(path, bytes)` for every bundled fixture, sorted by name.
pub fn fixtures() -> Vec<(PathBuf, Vec<u8>)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .expect("fixture directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "bpmn"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect()
}

pub fn fixture(name: &str) -> (PathBuf, Vec<u8>) {
    let path = fixtures_dir().join(name);
    let bytes = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    (path, bytes)
}

pub fn run(path: &Path, bytes: &[u8]) -> Conversion {
    convert(bytes, path, &TransformOptions::default())
}

/// Log lines of a conversion, without the section header.
pub fn log_lines(conversion: &Conversion) -> Vec<String> {
    render_section(&conversion.report, None)
        .lines()
        .skip(1)
        .map(str::to_string)
        .collect()
}

pub fn split_prefix(line: &str) -> Option<(&'static str, &str)> {
    PREFIXES
        .iter()
        .find_map(|p| line.strip_prefix(p).map(|body| (*p, body)))
}

/// `subject` or `subject with id=ID` with nothing else: an element line.
fn element_body(body: &str) -> Option<(&str, Option<&str>)> {
    match body.split_once(" with id=") {
        Some((subject, id)) if !subject.contains(' ') && !id.contains(' ') => Some((subject, Some(id))),
        Some(_) => None,
        None if !body.contains(' ') && !body.is_empty() => Some((body, None)),
        None => None,
    }
}

/// MAPPING element lines open a bracket; FINISHED lines close the most
/// recent open bracket for the same element.
pub fn check_bracketing(lines: &[String]) -> Result<(), String> {
    let mut stack: Vec<(String, Option<String>)> = Vec::new();
    for (n, line) in lines.iter().enumerate() {
        let Some((prefix, body)) = split_prefix(line) else {
            return Err(format!("line {n} has no known prefix: {line}"));
        };
        match prefix {
            "MAPPING: " => {
                if let Some((subject, id)) = element_body(body) {
                    stack.push((subject.to_string(), id.map(str::to_string)));
                }
            }
            "FINISHED MAPPING: " => {
                let Some((subject, id)) = element_body(body) else {
                    return Err(format!("line {n}: malformed FINISHED line: {line}"));
                };
                match stack.pop() {
                    Some((s, i)) if s == subject && i.as_deref() == id => {}
                    Some((s, i)) => {
                        return Err(format!("line {n}: {line} closes {s} with id={i:?}"));
                    }
                    None => return Err(format!("line {n}: {line} closes nothing")),
                }
            }
            _ => {}
        }
    }
    match stack.last() {
        None => Ok(()),
        Some((s, i)) => Err(format!("unclosed MAPPING for {s} with id={i:?}")),
    }
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '=')))
}

/// The line names `id` as a whole token or as `id=ID`.
pub fn line_mentions(line: &str, id: &str) -> bool {
    tokens(line).any(|t| t == id || t.strip_prefix("id=") == Some(id))
}

/// Ids of all elements outside the diagram interchange part.
pub fn semantic_ids(xml: &str) -> Vec<String> {
    fn walk(e: &CanonicalElement, out: &mut Vec<String>) {
        if e.name.starts_with(&format!("{{{BPMNDI}}}")) {
            return;
        }
        if let Some(id) = e.id() {
            out.push(id.to_string());
        }
        for c in &e.children {
            walk(c, out);
        }
    }
    let mut out = Vec::new();
    walk(&canonicalize(xml).unwrap(), &mut out);
    out
}

pub fn count_semantic_elements(xml: &str) -> usize {
    fn walk(e: &CanonicalElement) -> usize {
        if e.name.starts_with(&format!("{{{BPMNDI}}}")) {
            return 0;
        }
        1 + e.children.iter().map(walk).sum::<usize>()
    }
    walk(&canonicalize(xml).unwrap())
}

/// Ids with no log line naming them.
pub fn uncovered_ids(input: &str, lines: &[String]) -> Vec<String> {
    semantic_ids(input)
        .into_iter()
        .filter(|id| !lines.iter().any(|l| line_mentions(l, id)))
        .collect()
}

/// Camunda-namespaced attributes and elements left in `output`, each with
/// the id of its nearest identified element.
pub fn camunda_remnants(output: &str) -> Vec<(Option<String>, String)> {
    fn walk(e: &CanonicalElement, owner: Option<&str>, out: &mut Vec<(Option<String>, String)>) {
        let owner = e.id().or(owner);
        let camunda = format!("{{{CAMUNDA}}}");
        if let Some(local) = e.name.strip_prefix(&camunda) {
            out.push((owner.map(str::to_string), format!("camunda:{local}")));
            return;
        }
        for key in e.attributes.keys() {
            if let Some(local) = key.strip_prefix(&camunda) {
                out.push((owner.map(str::to_string), format!("camunda:{local}")));
            }
        }
        for c in &e.children {
            walk(c, owner, out);
        }
    }
    let mut out = Vec::new();
    walk(&canonicalize(output).unwrap(), None, &mut out);
    out
}

/// Remnants without a TODO line naming both the element and the name.
pub fn unacknowledged_remnants(output: &str, lines: &[String]) -> Vec<(Option<String>, String)> {
    camunda_remnants(output)
        .into_iter()
        .filter(|(owner, name)| {
            !lines.iter().any(|l| {
                l.starts_with("TODO")
                    && l.contains(name.as_str())
                    && owner.as_deref().map_or(true, |id| line_mentions(l, id))
            })
        })
        .collect()
}

/// Ids of the registry rules selected for the elements of `bytes`, using
/// the same traversal order and context as a conversion.
pub fn rules_selected(bytes: &[u8]) -> BTreeSet<&'static str> {
    let registry = RuleRegistry::standard();
    let doc = parse_bpmn(bytes, "rules.bpmn").unwrap();
    let messages = MessageIndex::build(&doc.root);
    let mut out = BTreeSet::new();
    fn walk(
        node: &XmlNode,
        scope: Option<EventScope>,
        parent_is_esp: bool,
        owner: Option<&Owner>,
        registry: &RuleRegistry,
        messages: &MessageIndex,
        out: &mut BTreeSet<&'static str>,
    ) {
        if c7to8_core::model::is_di(node) {
            return;
        }
        let ctx = RuleContext {
            event_scope: scope,
            owner,
            messages,
        };
        out.insert(registry.select(node, &ctx).id);
        let own = node.id().map(|id| Owner {
            subject: node.name.qualified(),
            id: id.to_string(),
        });
        let owner = own.as_ref().or(owner);
        let child_scope = EventScope::of(node, parent_is_esp);
        for child in node.elements() {
            walk(child, child_scope, is_event_subprocess(node), owner, registry, messages, out);
        }
    }
    walk(&doc.root, None, false, None, &registry, &messages, &mut out);
    out
}

/// One acceptance criterion: a check and its time budget.
pub struct Criterion {
    pub name: &'static str,
    pub budget: Duration,
    pub check: fn() -> Result<String, String>,
}

pub struct Verdict {
    pub passed: bool,
    pub line: String,
}

pub fn evaluate(c: &Criterion) -> Verdict {
    let start = Instant::now();
    let result = (c.check)();
    let elapsed = start.elapsed();
    let in_time = elapsed < c.budget;
    let (passed, detail) = match result {
        Ok(detail) if in_time => (true, detail),
        Ok(detail) => (false, format!("{detail}; too slow")),
        Err(e) => (false, e),
    };
    let line = format!(
        "{} {}: {} ({:.3}s, budget {:.0}s)",
        if passed { "PASS" } else { "FAIL" },
        c.name,
        detail,
        elapsed.as_secs_f64(),
        c.budget.as_secs_f64()
    );
    Verdict { passed, line }
}

fn wrap(body: &str) -> String {
    format!(
        r#"<?xml version="1.0" encoding="UTF-8"?>
<bpmn:definitions xmlns:bpmn="{BPMN}" xmlns:camunda="{CAMUNDA}" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" id="Definitions_1" targetNamespace="http://bpmn.io/schema/bpmn">
  <bpmn:process id="Process_1" isExecutable="true">
{body}
  </bpmn:process>
</bpmn:definitions>
"#
    )
}

/// The three mapping-table rows: C7 input, id of the element to compare,
/// expected C8 fragment.
pub const MAPPING_TABLE: [(&str, &str, &str, &str); 3] = [
    (
        "service task with delegate expression",
        r#"<bpmn:serviceTask id="Service-Task-2" name="DelegateExpression" camunda:delegateExpression="${SomeDelegateExpression}">
</bpmn:serviceTask>"#,
        "Service-Task-2",
        r#"<bpmn:serviceTask name="DelegateExpression" id="Service-Task-2">
    <bpmn:extensionElements>
        <zeebe:taskDefinition type="SomeDelegateExpression"/>
    </bpmn:extensionElements>
</bpmn:serviceTask>"#,
    ),
    (
        "sequence flow condition expression",
        r#"<bpmn:task id="src"/><bpmn:task id="target"/>
<bpmn:sequenceFlow id="Flow_1" sourceRef="src" targetRef="target">
    <bpmn:conditionExpression xsi:type="bpmn:tFormalExpression">
        ${false}
    </bpmn:conditionExpression>
</bpmn:sequenceFlow>"#,
        "Flow_1",
        r#"<bpmn:sequenceFlow id="Flow_1" sourceRef="src" targetRef="target">
    <bpmn:conditionExpression xsi:type="bpmn:tFormalExpression">
        =false
    </bpmn:conditionExpression>
</bpmn:sequenceFlow>"#,
    ),
    (
        "sequential multi-instance",
        r#"<bpmn:task id="Task_MI"><bpmn:multiInstanceLoopCharacteristics
camunda:asyncBefore="true"
camunda:collection="${collection}"
camunda:elementVariable="${element}"
isSequential="true" /></bpmn:task>"#,
        "Task_MI",
        r#"<bpmn:multiInstanceLoopCharacteristics isSequential="true">
    <bpmn:extensionElements>
        <zeebe:loopCharacteristics inputCollection="=collection" inputElement="element" />
    </bpmn:extensionElements>
</bpmn:multiInstanceLoopCharacteristics>"#,
    ),
];

/// Converts a mapping-table row and returns (actual subtree, expected).
pub fn mapping_table_case(input: &str, id: &str, expected: &str) -> (CanonicalElement, CanonicalElement) {
    let xml = wrap(input);
    let conversion = run(Path::new("table1.bpmn"), xml.as_bytes());
    let out = String::from_utf8(conversion.output.expect("converted")).unwrap();
    let tree = canonicalize(&out).unwrap();
    let expected = canonicalize_fragment(expected).unwrap();
    let holder = tree.find_by_id(id).unwrap_or_else(|| panic!("{id} missing")).clone();
    let actual = if expected.local_name() == holder.local_name() {
        holder
    } else {
        holder
            .children
            .iter()
            .find(|c| c.name == expected.name)
            .unwrap_or_else(|| panic!("no {} under {id}", expected.name))
            .clone()
    };
    (actual, expected)
}

pub fn check_mapping_table() -> Result<String, String> {
    for (label, input, id, expected) in MAPPING_TABLE {
        let (actual, expected) = mapping_table_case(input, id, expected);
        if actual != expected {
            return Err(format!("{label}: expected\n{expected}got\n{actual}"));
        }
    }
    Ok("3/3 rows canonically equal".into())
}

/// Expected log lines of the message throw fixture.
pub const EXPECTED_THROW_LOG: [&str; 11] = [
    "MAPPING: bpmn:event with id=Event_0j8p",
    "MAPPING: bpmn:throwEvent with id=Event_0j8p",
    "MAPPING: bpmn:eventDefinition with id=MessageEventDefinition_1nr2ae9",
    "TODO: manually configure Jobworker for Message Event Definition with id=MessageEventDefinition_1nr2ae9",
    "FINISHED MAPPING: bpmn:eventDefinition with id=MessageEventDefinition_1nr2ae9",
    "MAPPING: bpmn:delegateExpression configureJobType into zeebe:taskDefinition",
    "MAPPING: camunda:expression configureJobType into FEEL Expression Language",
    "TODO (OPTIONAL): set retries=?? in zeebe:taskDefinition Element",
    "TODO (OPTIONAL): adapt zeebe:taskDefinition type for Event with id=Event_0j8p to select correct JobWorker",
    "FINISHED MAPPING: bpmn:throwEvent with id=Event_0j8p",
    "FINISHED MAPPING: bpmn:event with id=Event_0j8p",
];

/// The expected lines as a contiguous run of the fixture's log.
pub fn message_throw_window() -> Result<Vec<String>, String> {
    let (path, bytes) = fixture("04_message_throw_event.bpmn");
    let lines = log_lines(&run(&path, &bytes));
    let start = lines
        .iter()
        .position(|l| l == EXPECTED_THROW_LOG[0])
        .ok_or_else(|| format!("no line {:?} in log", EXPECTED_THROW_LOG[0]))?;
    Ok(lines.into_iter().skip(start).take(EXPECTED_THROW_LOG.len()).collect())
}

pub fn check_message_throw_log() -> Result<String, String> {
    let window = message_throw_window()?;
    for (i, (got, want)) in window.iter().zip(EXPECTED_THROW_LOG).enumerate() {
        if got != want {
            return Err(format!("line {}: got {got:?}, want {want:?}", i + 1));
        }
    }
    if window.len() != EXPECTED_THROW_LOG.len() {
        return Err(format!("log ends after {} expected lines", window.len()));
    }
    Ok("11/11 lines identical".into())
}

/// Every corpus property; returns a summary or the first violation.
pub fn check_corpus() -> Result<String, String> {
    let fixtures = fixtures();
    if fixtures.len() < 12 {
        return Err(format!("{} fixtures, need at least 12", fixtures.len()));
    }
    let mut elements = 0;
    let mut rules = BTreeSet::new();
    let mut todos = 0;
    for (path, bytes) in &fixtures {
        let name = path.file_name().unwrap().to_string_lossy();
        let input = std::str::from_utf8(bytes).unwrap();
        elements += count_semantic_elements(input);
        rules.extend(rules_selected(bytes));
        let conversion = run(path, bytes);
        if conversion.report.status == TransformStatus::Failed {
            return Err(format!("{name}: status Failed"));
        }
        if let Some(e) = conversion.findings.iter().find(|f| f.severity == Severity::Error) {
            return Err(format!("{name}: {e}"));
        }
        let lines = log_lines(&conversion);
        todos += lines.iter().filter(|l| l.starts_with("TODO: ")).count();
        let uncovered = uncovered_ids(input, &lines);
        if !uncovered.is_empty() {
            return Err(format!("{name}: ids missing from the log: {uncovered:?}"));
        }
        check_bracketing(&lines).map_err(|e| format!("{name}: {e}"))?;
        let output = String::from_utf8(conversion.output.unwrap()).unwrap();
        let open = unacknowledged_remnants(&output, &lines);
        if !open.is_empty() {
            return Err(format!("{name}: camunda remnants without TODO: {open:?}"));
        }
    }
    if elements < 150 {
        return Err(format!("corpus has {elements} elements, need at least 150"));
    }
    let all: BTreeSet<&str> = RuleRegistry::standard().rules().iter().map(|r| r.id).collect();
    let missing: Vec<_> = all.difference(&rules).collect();
    if !missing.is_empty() {
        return Err(format!("rules never selected by the corpus: {missing:?}"));
    }
    Ok(format!(
        "{} fixtures, {elements} elements, {} rules exercised, {todos} TODOs, 0 validation errors",
        fixtures.len(),
        rules.len()
    ))
}

pub fn check_round_trip_and_determinism() -> Result<String, String> {
    let fixtures = fixtures();
    for (path, bytes) in &fixtures {
        let name = path.file_name().unwrap().to_string_lossy();
        let doc = parse_bpmn(bytes, path).map_err(|e| format!("{name}: {e}"))?;
        let reserialized = String::from_utf8(serialize_bpmn(&doc)).unwrap();
        let original = canonicalize(std::str::from_utf8(bytes).unwrap()).unwrap();
        if canonicalize(&reserialized).unwrap() != original {
            return Err(format!("{name}: parse/serialize is not canonical identity"));
        }
        let a = run(path, bytes);
        let b = run(path, bytes);
        if a.output != b.output {
            return Err(format!("{name}: outputs differ between runs"));
        }
        if render_section(&a.report, None) != render_section(&b.report, None) {
            return Err(format!("{name}: logs differ between runs"));
        }
    }
    Ok(format!("{} fixtures identical on round trip and rerun", fixtures.len()))
}

const RESERVED: [&str; 16] = [
    "and", "or", "not", "eq", "ne", "lt", "gt", "le", "ge", "true", "false", "null", "empty", "div", "mod",
    "instanceof",
];

pub fn identifier_strategy() -> impl proptest::strategy::Strategy<Value = String> {
    use proptest::strategy::Strategy;
    "[a-zA-Z_][a-zA-Z0-9_]{0,20}".prop_filter("reserved word", |s| !RESERVED.contains(&s.as_str()))
}

pub fn check_expression_properties() -> Result<String, String> {
    use proptest::prelude::*;
    use proptest::test_runner::{Config, TestRunner};

    let config = Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new(config.clone());
    runner
        .run(&identifier_strategy(), |x| {
            let rw = juel_to_feel(&format!("${{{x}}}"));
            prop_assert!(rw.confident);
            prop_assert_eq!(rw.rewritten, format!("={x}"));
            Ok(())
        })
        .map_err(|e| format!("${{x}} -> =x: {e}"))?;

    let mut runner = TestRunner::new(config.clone());
    runner
        .run(&any::<String>(), |s| {
            let once = unwrap_interpolation(&s);
            prop_assert_eq!(unwrap_interpolation(&once), once.clone());
            let wrapped = format!("${{{once}}}");
            let twice = unwrap_interpolation(&wrapped);
            prop_assert_eq!(unwrap_interpolation(&twice), twice.clone());
            Ok(())
        })
        .map_err(|e| format!("unwrap idempotence: {e}"))?;

    let mut runner = TestRunner::new(config);
    let junk = prop_oneof![
        any::<String>().prop_map(|s| format!("${{{s}}}")),
        "[ -~]{0,30}",
        "\\$\\{[a-z.()!&|<>=' ]{0,20}\\}( \\$\\{[a-z]{1,5}\\})?",
    ];
    runner
        .run(&junk, |s| {
            let rw = juel_to_feel(&s);
            if !rw.confident {
                prop_assert_eq!(&rw.rewritten, &s);
            }
            Ok(())
        })
        .map_err(|e| format!("not confident implies unchanged: {e}"))?;
    Ok("3 properties x 1000 cases".into())
}

pub fn is_zeebe_name(name: &str) -> bool {
    name.starts_with(&format!("{{{ZEEBE}}}"))
}

pub fn uses_zeebe(xml: &str) -> bool {
    fn walk(e: &CanonicalElement) -> bool {
        is_zeebe_name(&e.name) || e.attributes.keys().any(|k| is_zeebe_name(k)) || e.children.iter().any(walk)
    }
    walk(&canonicalize(xml).unwrap())
}

pub fn declares(xml: &str, uri: &str) -> bool {
    let root_start = &xml[xml.find("<bpmn:definitions").or_else(|| xml.find("<definitions")).unwrap_or(0)..];
    let end = root_start.find('>').unwrap_or(root_start.len());
    root_start[..end].contains(&format!("=\"{uri}\""))
}

