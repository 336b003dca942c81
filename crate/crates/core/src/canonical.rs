//! Canonical XML form used to compare documents independently of prefixes,
//! attribute order, whitespace and comments.
//!
//! This reader is separate from the model parser so comparisons do not
//! depend on the code under test.

use std::collections::BTreeMap;
use std::fmt;

use quick_xml::events::Event;
use quick_xml::name::{QName, ResolveResult};
use quick_xml::NsReader;

use crate::model::ns;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalElement {
    /// `{uri}local`, or `local` for unqualified names.
    pub name: String,
    pub attributes: BTreeMap<String, String>,
    pub children: Vec<CanonicalElement>,
    /// Trimmed text content; `None` when empty.
    pub text: Option<String>,
}

#[derive(Debug, thiserror::Error)]
#[error("cannot canonicalize XML: {0}")]
pub struct CanonicalError(String);

fn expanded(result: ResolveResult<'_>, local: &str) -> Result<String, CanonicalError> {
    match result {
        ResolveResult::Bound(ns) => Ok(format!("{{{}}}{local}", ns.0)),
        ResolveResult::Unbound => Ok(local.to_string()),
        ResolveResult::Unknown(p) => Err(CanonicalError(format!("unknown prefix {p}"))),
    }
}

/// Parses `xml` into its canonical tree.
pub fn canonicalize(xml: &str) -> Result<CanonicalElement, CanonicalError> {
    let mut reader = NsReader::from_str(xml);
    let mut stack: Vec<(CanonicalElement, String)> = Vec::new();
    let mut root = None;
    let err = |e: &dyn fmt::Display| CanonicalError(e.to_string());
    loop {
        let (resolved, event) = reader.read_resolved_event().map_err(|e| err(&e))?;
        let is_empty = matches!(event, Event::Empty(_));
        let name = match &event {
            Event::Start(s) | Event::Empty(s) => Some(expanded(resolved, s.local_name().as_ref())?),
            _ => None,
        };
        match event {
            Event::Start(start) | Event::Empty(start) => {
                let mut attributes = BTreeMap::new();
                for attr in start.attributes() {
                    let attr = attr.map_err(|e| err(&e))?;
                    let key = attr.key.as_ref();
                    if key == "xmlns" || key.starts_with("xmlns:") {
                        continue;
                    }
                    let value = attr.normalized_value(quick_xml::XmlVersion::Implicit1_0).map_err(|e| err(&e))?.into_owned();
                    let (res, local) = reader.resolver().resolve_attribute(attr.key);
                    let attr_name = expanded(res, local.as_ref())?;
                    let value = if attr_name == format!("{{{}}}type", ns::XSI) {
                        let (res, local) = reader.resolver().resolve_element(QName(&value));
                        expanded(res, local.as_ref())?
                    } else {
                        value
                    };
                    attributes.insert(attr_name, value);
                }
                let element = CanonicalElement {
                    name: name.unwrap_or_default(),
                    attributes,
                    children: Vec::new(),
                    text: None,
                };
                if is_empty {
                    attach(&mut stack, &mut root, element);
                } else {
                    stack.push((element, String::new()));
                }
            }
            Event::End(_) => {
                let (mut element, text) = stack
                    .pop()
                    .ok_or_else(|| CanonicalError("unbalanced end tag".into()))?;
                let trimmed = text.trim();
                element.text = (!trimmed.is_empty()).then(|| trimmed.to_string());
                attach(&mut stack, &mut root, element);
            }
            Event::Text(t) => {
                if let Some((_, text)) = stack.last_mut() {
                    text.push_str(&t.xml10_content());
                }
            }
            Event::CData(t) => {
                if let Some((_, text)) = stack.last_mut() {
                    text.push_str(&t.xml10_content());
                }
            }
            Event::GeneralRef(r) => {
                let c = if r.is_char_ref() {
                    r.resolve_char_ref().ok().flatten()
                } else {
                    match r.xml10_content().as_ref() {
                        "lt" => Some('<'),
                        "gt" => Some('>'),
                        "amp" => Some('&'),
                        "apos" => Some('\''),
                        "quot" => Some('"'),
                        _ => None,
                    }
                };
                let c = c.ok_or_else(|| CanonicalError("unknown entity".into()))?;
                if let Some((_, text)) = stack.last_mut() {
                    text.push(c);
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(CanonicalError("unexpected end of input".into()));
    }
    root.ok_or_else(|| CanonicalError("no root element".into()))
}

fn attach(
    stack: &mut [(CanonicalElement, String)],
    root: &mut Option<CanonicalElement>,
    element: CanonicalElement,
) {
    match stack.last_mut() {
        Some((parent, _)) => parent.children.push(element),
        None => *root = Some(element),
    }
}

/// Canonicalizes a fragment written with the standard prefixes (`bpmn:`,
/// `zeebe:`, `camunda:`, ...) and no declarations of its own.
pub fn canonicalize_fragment(fragment: &str) -> Result<CanonicalElement, CanonicalError> {
    let decls: String = ns::FIXED_PREFIXES
        .iter()
        .map(|(p, u)| format!(" xmlns:{p}=\"{u}\""))
        .collect();
    let wrapped = format!("<fragment{decls}>{fragment}</fragment>");
    let mut root = canonicalize(&wrapped)?;
    match root.children.len() {
        1 => Ok(root.children.remove(0)),
        n => Err(CanonicalError(format!("fragment has {n} top-level elements, expected 1"))),
    }
}

impl CanonicalElement {
    pub fn local_name(&self) -> &str {
        match self.name.rfind('}') {
            Some(i) => &self.name[i + 1..],
            None => &self.name,
        }
    }

    pub fn id(&self) -> Option<&str> {
        self.attributes.get("id").map(String::as_str)
    }

    /// Pre-order search.
    pub fn find(&self, pred: &dyn Fn(&CanonicalElement) -> bool) -> Option<&CanonicalElement> {
        if pred(self) {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(pred))
    }

    pub fn find_by_id(&self, id: &str) -> Option<&CanonicalElement> {
        self.find(&|e| e.id() == Some(id))
    }

    pub fn find_by_name(&self, uri: &str, local: &str) -> Option<&CanonicalElement> {
        let name = format!("{{{uri}}}{local}");
        self.find(&|e| e.name == name)
    }

    fn render(&self, out: &mut String, depth: usize) {
        out.push_str(&"  ".repeat(depth));
        out.push('<');
        out.push_str(&self.name);
        for (k, v) in &self.attributes {
            out.push_str(&format!(" {k}={v:?}"));
        }
        out.push('>');
        if let Some(text) = &self.text {
            out.push_str(&format!(" {text:?}"));
        }
        out.push('\n');
        for child in &self.children {
            child.render(out, depth + 1);
        }
    }
}

impl fmt::Display for CanonicalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.render(&mut out, 0);
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixes_order_and_whitespace_do_not_matter() {
        let a = canonicalize(
            r#"<a:root xmlns:a="urn:a" x="1" y="2"><a:child>  hi  </a:child><!-- c --></a:root>"#,
        )
        .unwrap();
        let b = canonicalize("<root xmlns=\"urn:a\" y=\"2\" x=\"1\">\n  <child>hi</child>\n</root>").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn xsi_type_value_is_resolved() {
        let a = canonicalize_fragment(r#"<bpmn:conditionExpression xsi:type="bpmn:tFormalExpression">=false</bpmn:conditionExpression>"#).unwrap();
        let b = canonicalize(
            r#"<m:conditionExpression xmlns:m="http://www.omg.org/spec/BPMN/20100524/MODEL" xmlns:i="http://www.w3.org/2001/XMLSchema-instance" i:type="m:tFormalExpression">=false</m:conditionExpression>"#,
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.text.as_deref(), Some("=false"));
    }

    #[test]
    fn self_closing_and_explicit_end_are_equal() {
        let a = canonicalize_fragment("<zeebe:taskDefinition type=\"x\"/>").unwrap();
        let b = canonicalize_fragment("<zeebe:taskDefinition type=\"x\"></zeebe:taskDefinition>").unwrap();
        assert_eq!(a, b);
        let tree = canonicalize_fragment("<bpmn:task id=\"T\"><bpmn:incoming/><bpmn:outgoing/></bpmn:task>").unwrap();
        assert_eq!(tree.children.len(), 2);
        assert_eq!(tree.find_by_id("T").unwrap().local_name(), "task");
    }
}
