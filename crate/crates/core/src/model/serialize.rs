use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{ns, BpmnDocument, XmlChild, XmlName, XmlNode};

const INDENT: &str = "  ";

/// Serializes to UTF-8 bytes. Cannot fail for a well-formed tree.
pub fn serialize_bpmn(doc: &BpmnDocument) -> Vec<u8> {
    serialize_to_string(doc).into_bytes()
}

pub fn serialize_to_string(doc: &BpmnDocument) -> String {
    let bindings = output_bindings(doc);
    let prefixes: BTreeMap<&str, &str> = bindings
        .iter()
        .map(|(p, u)| (u.as_str(), p.as_str()))
        .collect();
    let mut out = String::with_capacity(4096);
    out.push_str(&doc.xml_declaration);
    out.push('\n');
    for comment in &doc.prolog_comments {
        let _ = writeln!(out, "<!--{comment}-->");
    }
    let writer = Writer {
        prefixes: &prefixes,
        bindings: &bindings,
    };
    writer.element(&mut out, &doc.root, 0, true);
    out
}

/// `(prefix, uri)` declarations for every namespace the tree uses, in output
/// order: the fixed prefixes first, then others sorted by prefix.
pub(super) fn output_bindings(doc: &BpmnDocument) -> Vec<(String, String)> {
    let mut used = BTreeSet::new();
    for node in doc.root.descendants() {
        used.insert(node.name.namespace_uri.as_str());
        for (name, value) in &node.attributes {
            used.insert(name.namespace_uri.as_str());
            if name.is(ns::XSI, "type") {
                if let Some((prefix, _)) = value.split_once(':') {
                    if let Some(uri) = qname_value_uri(doc, prefix) {
                        used.insert(uri);
                    }
                }
            }
        }
    }
    used.remove("");
    used.remove(ns::XML);

    let mut bindings: Vec<(String, String)> = ns::FIXED_PREFIXES
        .iter()
        .filter(|(_, uri)| used.contains(uri))
        .map(|(p, u)| (p.to_string(), u.to_string()))
        .collect();

    let mut others = Vec::new();
    let mut taken: BTreeSet<String> = BTreeSet::new();
    for uri in used.iter().filter(|u| ns::fixed_prefix(u).is_none()) {
        let preferred = doc
            .namespaces
            .prefix_for(uri)
            .filter(|p| !ns::is_fixed_prefix(p) && !p.starts_with("xml") && !taken.contains(*p))
            .map(str::to_string);
        let prefix = preferred.unwrap_or_else(|| {
            (1..)
                .map(|i| format!("ns{i}"))
                .find(|p| !taken.contains(p) && doc.namespaces.uri(p).is_none())
                .expect("unbounded prefix space")
        });
        taken.insert(prefix.clone());
        others.push((prefix, uri.to_string()));
    }
    others.sort();
    bindings.extend(others);
    bindings
}

fn qname_value_uri<'a>(doc: &'a BpmnDocument, prefix: &str) -> Option<&'a str> {
    ns::FIXED_PREFIXES
        .iter()
        .find(|(p, _)| *p == prefix)
        .map(|(_, u)| *u)
        .or_else(|| doc.namespaces.uri(prefix))
}

struct Writer<'a> {
    prefixes: &'a BTreeMap<&'a str, &'a str>,
    bindings: &'a [(String, String)],
}

impl Writer<'_> {
    fn qname(&self, name: &XmlName) -> String {
        if name.namespace_uri.is_empty() {
            return name.local_name.clone();
        }
        if name.namespace_uri == ns::XML {
            return format!("xml:{}", name.local_name);
        }
        let prefix = self.prefixes[name.namespace_uri.as_str()];
        format!("{prefix}:{}", name.local_name)
    }

    fn element(&self, out: &mut String, node: &XmlNode, depth: usize, is_root: bool) {
        indent(out, depth);
        let tag = self.qname(&node.name);
        out.push('<');
        out.push_str(&tag);
        if is_root {
            for (prefix, uri) in self.bindings {
                let _ = write!(out, " xmlns:{prefix}=\"");
                escape_attr(out, uri);
                out.push('"');
            }
        }
        for (name, value) in &node.attributes {
            out.push(' ');
            out.push_str(&self.qname(name));
            out.push_str("=\"");
            escape_attr(out, value);
            out.push('"');
        }

        if node.children.is_empty() {
            match &node.text {
                None => out.push_str(" />\n"),
                Some(text) => {
                    out.push('>');
                    escape_text(out, text);
                    let _ = writeln!(out, "</{tag}>");
                }
            }
            return;
        }

        out.push_str(">\n");
        if let Some(text) = &node.text {
            indent(out, depth + 1);
            escape_text(out, text);
            out.push('\n');
        }
        for child in &node.children {
            match child {
                XmlChild::Element(e) => self.element(out, e, depth + 1, false),
                XmlChild::Comment(c) => {
                    indent(out, depth + 1);
                    let _ = writeln!(out, "<!--{c}-->");
                }
            }
        }
        indent(out, depth);
        let _ = writeln!(out, "</{tag}>");
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn escape_attr(out: &mut String, value: &str) {
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
}

fn escape_text(out: &mut String, value: &str) {
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
}
