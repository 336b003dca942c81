//! Transformation log: entries, line rendering, and the per-file sections
//! written to the console and the log file.

use std::fmt;
use std::io::{self, Write};

use crate::engine::TransformReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryKind {
    Mapping,
    FinishedMapping,
    NoMappingNeeded,
    Todo,
    TodoOptional,
}

impl EntryKind {
    pub const ALL: [EntryKind; 5] = [
        EntryKind::Mapping,
        EntryKind::FinishedMapping,
        EntryKind::NoMappingNeeded,
        EntryKind::Todo,
        EntryKind::TodoOptional,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            EntryKind::Mapping => "MAPPING",
            EntryKind::FinishedMapping => "FINISHED MAPPING",
            EntryKind::NoMappingNeeded => "NO MAPPING NEEDED",
            EntryKind::Todo => "TODO",
            EntryKind::TodoOptional => "TODO (OPTIONAL)",
        }
    }
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefix())
    }
}

/// One log line.
///
/// Element entries carry a `subject` (`bpmn:serviceTask`) and render as
/// `PREFIX: subject with id=ID`, followed by `: detail` when a detail is
/// present. Entries without a subject render as `PREFIX: detail`; they may
/// still reference an element through `element_id`, which is then expected
/// to appear inside the detail text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub kind: EntryKind,
    pub subject: Option<String>,
    pub element_id: Option<String>,
    pub detail: Option<String>,
    pub depth: usize,
}

impl LogEntry {
    pub fn element(kind: EntryKind, subject: impl Into<String>, element_id: Option<&str>) -> Self {
        Self {
            kind,
            subject: Some(subject.into()),
            element_id: element_id.map(str::to_string),
            detail: None,
            depth: 0,
        }
    }

    pub fn note(kind: EntryKind, detail: impl Into<String>) -> Self {
        Self {
            kind,
            subject: None,
            element_id: None,
            detail: Some(detail.into()),
            depth: 0,
        }
    }

    /// A detail-only entry that concerns the element `id`.
    pub fn about(kind: EntryKind, id: Option<&str>, detail: impl Into<String>) -> Self {
        Self {
            element_id: id.map(str::to_string),
            ..Self::note(kind, detail)
        }
    }

    pub fn mapping(subject: impl Into<String>, id: Option<&str>) -> Self {
        Self::element(EntryKind::Mapping, subject, id)
    }

    pub fn finished(subject: impl Into<String>, id: Option<&str>) -> Self {
        Self::element(EntryKind::FinishedMapping, subject, id)
    }

    pub fn no_mapping(subject: impl Into<String>, id: Option<&str>) -> Self {
        Self::element(EntryKind::NoMappingNeeded, subject, id)
    }

    pub fn todo(detail: impl Into<String>) -> Self {
        Self::note(EntryKind::Todo, detail)
    }

    pub fn todo_optional(detail: impl Into<String>) -> Self {
        Self::note(EntryKind::TodoOptional, detail)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn with_id(mut self, id: Option<&str>) -> Self {
        self.element_id = id.map(str::to_string);
        self
    }

    pub fn is_todo(&self) -> bool {
        matches!(self.kind, EntryKind::Todo | EntryKind::TodoOptional)
    }

    /// True when the rendered line names `id` (as `with id=` clause or in
    /// free text) or the entry carries it as its element reference.
    pub fn mentions(&self, id: &str) -> bool {
        self.element_id.as_deref() == Some(id)
            || self
                .detail
                .as_deref()
                .is_some_and(|d| d.split(|c: char| !is_id_char(c)).any(|w| w == id || w == format!("id={id}")))
    }
}

fn is_id_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '=')
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_line(self))
    }
}

/// Renders one entry as a single log line, without a line terminator.
pub fn render_line(entry: &LogEntry) -> String {
    let mut line = format!("{}: ", entry.kind.prefix());
    match &entry.subject {
        Some(subject) => {
            line.push_str(subject);
            if let Some(id) = &entry.element_id {
                line.push_str(" with id=");
                line.push_str(id);
            }
            if let Some(detail) = &entry.detail {
                line.push_str(": ");
                line.push_str(detail);
            }
        }
        None => line.push_str(entry.detail.as_deref().unwrap_or_default()),
    }
    let trimmed_len = line.trim_end().len();
    line.truncate(trimmed_len);
    line.replace(['\n', '\r'], " ")
}

/// A log line split back into its parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedLine {
    pub kind: EntryKind,
    /// Everything after `PREFIX: `.
    pub body: String,
}

impl ParsedLine {
    /// `(subject, id, detail)` when the body has the element form
    /// `subject with id=ID[: detail]`.
    pub fn element_parts(&self) -> Option<(&str, &str, Option<&str>)> {
        let (subject, rest) = self.body.split_once(" with id=")?;
        if subject.is_empty() {
            return None;
        }
        match rest.split_once(": ") {
            Some((id, detail)) => Some((subject, id, Some(detail))),
            None => Some((subject, rest, None)),
        }
    }
}

/// Parses a rendered line. Returns `None` for lines that do not start with
/// one of the five prefixes (section headers, for example).
pub fn parse_line(line: &str) -> Option<ParsedLine> {
    // Longest prefix first: "TODO (OPTIONAL)" before "TODO".
    let mut kinds = EntryKind::ALL;
    kinds.sort_by_key(|k| std::cmp::Reverse(k.prefix().len()));
    kinds.iter().find_map(|kind| {
        line.strip_prefix(kind.prefix())
            .and_then(|rest| rest.strip_prefix(": "))
            .map(|body| ParsedLine {
                kind: *kind,
                body: body.to_string(),
            })
    })
}

/// Header line that opens each file's section.
pub fn section_header(source: &std::path::Path) -> String {
    format!("=== {} ===", source.display())
}

/// Renders a report as its log section: header plus one line per entry.
///
/// `stamp` produces an optional prefix per line (timestamps).
pub fn render_section(report: &TransformReport, stamp: Option<&dyn Fn() -> String>) -> String {
    let mut out = String::new();
    let prefix = |out: &mut String| {
        if let Some(stamp) = stamp {
            out.push_str(&stamp());
            out.push(' ');
        }
    };
    prefix(&mut out);
    out.push_str(&section_header(&report.source_path));
    out.push('\n');
    for entry in &report.entries {
        prefix(&mut out);
        out.push_str(&render_line(entry));
        out.push('\n');
    }
    out
}

/// Writes the report to both sinks. The file sink is optional; a failure
/// there does not affect the console output.
pub fn write_report(
    report: &TransformReport,
    console: &mut dyn Write,
    file: Option<&mut dyn Write>,
) -> Result<(), LogError> {
    let section = render_section(report, None);
    console.write_all(section.as_bytes()).map_err(LogError::Console)?;
    if let Some(file) = file {
        file.write_all(section.as_bytes())
            .and_then(|_| file.flush())
            .map_err(LogError::File)?;
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("cannot write to console: {0}")]
    Console(io::Error),
    #[error("cannot write transformation log file: {0}")]
    File(io::Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_element_and_note_lines() {
        assert_eq!(
            render_line(&LogEntry::mapping("bpmn:event", Some("Event_0j8p"))),
            "MAPPING: bpmn:event with id=Event_0j8p"
        );
        assert_eq!(
            render_line(&LogEntry::todo_optional("set retries=?? in zeebe:taskDefinition Element")),
            "TODO (OPTIONAL): set retries=?? in zeebe:taskDefinition Element"
        );
        assert_eq!(
            render_line(&LogEntry::no_mapping("bpmn:startEvent", Some("Start_1"))),
            "NO MAPPING NEEDED: bpmn:startEvent with id=Start_1"
        );
        assert_eq!(
            render_line(&LogEntry::finished("bpmn:throwEvent", Some("E"))),
            "FINISHED MAPPING: bpmn:throwEvent with id=E"
        );
    }

    #[test]
    fn detail_follows_id_clause() {
        let e = LogEntry::element(EntryKind::Todo, "bpmn:serviceTask", Some("S1"))
            .with_detail("configure it");
        assert_eq!(render_line(&e), "TODO: bpmn:serviceTask with id=S1: configure it");
        let parsed = parse_line(&render_line(&e)).unwrap();
        assert_eq!(
            parsed.element_parts(),
            Some(("bpmn:serviceTask", "S1", Some("configure it")))
        );
    }

    #[test]
    fn no_trailing_whitespace_or_newlines() {
        let e = LogEntry::todo("multi\nline  ");
        assert_eq!(render_line(&e), "TODO: multi line");
    }

    #[test]
    fn parse_distinguishes_todo_prefixes() {
        assert_eq!(parse_line("TODO (OPTIONAL): x").unwrap().kind, EntryKind::TodoOptional);
        assert_eq!(parse_line("TODO: x").unwrap().kind, EntryKind::Todo);
        assert_eq!(parse_line("NO MAPPING NEEDED: a with id=b").unwrap().kind, EntryKind::NoMappingNeeded);
        assert!(parse_line("=== file ===").is_none());
        assert!(parse_line("MAPPINGS: x").is_none());
    }

    #[test]
    fn mentions_matches_whole_ids() {
        let e = LogEntry::todo("unhandled camunda:foo on bpmn:task id=Task_1");
        assert!(e.mentions("Task_1"));
        assert!(!e.mentions("Task"));
    }
}
