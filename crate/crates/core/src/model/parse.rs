use std::path::PathBuf;

use quick_xml::events::{BytesRef, BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

use super::{ns, BpmnDocument, NamespaceTable, XmlChild, XmlName, XmlNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed XML at byte {position}: {detail}")]
    MalformedXml { position: u64, detail: String },
    #[error("not a BPMN document: {0}")]
    NotBpmn(String),
}

struct Frame {
    node: XmlNode,
    text: String,
    scope_len: usize,
}

struct Parser<'a> {
    reader: Reader<&'a [u8]>,
    /// In-scope prefix bindings, innermost last. The empty prefix is the
    /// default namespace; an empty URI undeclares it.
    scope: Vec<(String, String)>,
    table: NamespaceTable,
    stack: Vec<Frame>,
}

/// Parses a BPMN 2.0 XML document.
///
/// Input must be UTF-8 (a leading byte-order mark is accepted). Document
/// type declarations are rejected so no external entity is ever resolved.
pub fn parse_bpmn(bytes: &[u8], source_path: impl Into<PathBuf>) -> Result<BpmnDocument, ParseError> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    if let Err(e) = std::str::from_utf8(bytes) {
        return Err(ParseError::MalformedXml {
            position: e.valid_up_to() as u64,
            detail: "input is not valid UTF-8".into(),
        });
    }
    let mut parser = Parser {
        reader: Reader::from_reader(bytes),
        scope: Vec::new(),
        table: NamespaceTable::default(),
        stack: Vec::new(),
    };
    parser.run(source_path.into())
}

impl<'a> Parser<'a> {
    fn malformed(&self, detail: impl Into<String>) -> ParseError {
        ParseError::MalformedXml {
            position: self.reader.buffer_position(),
            detail: detail.into(),
        }
    }

    fn run(&mut self, source_path: PathBuf) -> Result<BpmnDocument, ParseError> {
        let mut version = String::from("1.0");
        let mut prolog_comments = Vec::new();
        let mut root: Option<XmlNode> = None;

        loop {
            let event = match self.reader.read_event() {
                Ok(ev) => ev,
                Err(e) => {
                    return Err(ParseError::MalformedXml {
                        position: self.reader.error_position(),
                        detail: e.to_string(),
                    })
                }
            };
            match event {
                Event::Decl(decl) => {
                    if let Ok(v) = decl.version() {
                        version = v.into_owned();
                    }
                }
                Event::DocType(_) => {
                    return Err(self.malformed("document type declarations are not supported"))
                }
                Event::PI(_) => {}
                Event::Start(start) => {
                    if root.is_some() && self.stack.is_empty() {
                        return Err(self.malformed("content after the root element"));
                    }
                    let scope_len = self.scope.len();
                    let node = self.open_element(&start)?;
                    self.stack.push(Frame {
                        node,
                        text: String::new(),
                        scope_len,
                    });
                }
                Event::Empty(start) => {
                    if root.is_some() && self.stack.is_empty() {
                        return Err(self.malformed("content after the root element"));
                    }
                    let scope_len = self.scope.len();
                    let node = self.open_element(&start)?;
                    self.scope.truncate(scope_len);
                    self.attach(node, &mut root);
                }
                Event::End(_) => {
                    let frame = self
                        .stack
                        .pop()
                        .ok_or_else(|| self.malformed("unexpected closing tag"))?;
                    self.scope.truncate(frame.scope_len);
                    let node = finish_text(frame.node, frame.text);
                    self.attach(node, &mut root);
                }
                Event::Text(text) => {
                    let content = text.xml10_content();
                    self.push_text(&content)?;
                }
                Event::CData(data) => {
                    let content = data.xml10_content();
                    if self.stack.is_empty() {
                        return Err(self.malformed("character data outside the root element"));
                    }
                    self.push_text(&content)?;
                }
                Event::GeneralRef(reference) => {
                    let c = self.resolve_reference(&reference)?;
                    let mut buf = [0u8; 4];
                    self.push_text(c.encode_utf8(&mut buf))?;
                }
                Event::Comment(comment) => {
                    let content = comment.xml10_content().into_owned();
                    match self.stack.last_mut() {
                        Some(frame) => frame.node.children.push(XmlChild::Comment(content)),
                        None if root.is_none() => prolog_comments.push(content),
                        None => {}
                    }
                }
                Event::Eof => break,
            }
        }

        if let Some(frame) = self.stack.last() {
            let name = frame.node.name.local_name.clone();
            return Err(self.malformed(format!("unexpected end of input inside <{name}>")));
        }
        let root = root.ok_or_else(|| self.malformed("no root element"))?;
        if !root.name.is(ns::BPMN, "definitions") {
            return Err(ParseError::NotBpmn(format!(
                "root element is {{{}}}{}, expected {{{}}}definitions",
                root.name.namespace_uri,
                root.name.local_name,
                ns::BPMN
            )));
        }

        Ok(BpmnDocument {
            root,
            namespaces: std::mem::take(&mut self.table),
            source_path,
            xml_declaration: format!("<?xml version=\"{version}\" encoding=\"UTF-8\"?>"),
            prolog_comments,
        })
    }

    fn attach(&mut self, node: XmlNode, root: &mut Option<XmlNode>) {
        match self.stack.last_mut() {
            Some(parent) => parent.node.children.push(XmlChild::Element(node)),
            None => *root = Some(node),
        }
    }

    fn push_text(&mut self, content: &str) -> Result<(), ParseError> {
        match self.stack.last_mut() {
            Some(frame) => {
                frame.text.push_str(content);
                Ok(())
            }
            None if content.trim().is_empty() => Ok(()),
            None => Err(self.malformed("text outside the root element")),
        }
    }

    fn resolve_reference(&self, reference: &BytesRef<'_>) -> Result<char, ParseError> {
        if reference.is_char_ref() {
            return match reference.resolve_char_ref() {
                Ok(Some(c)) => Ok(c),
                Ok(None) | Err(_) => Err(self.malformed("invalid character reference")),
            };
        }
        match reference.xml10_content().as_ref() {
            "lt" => Ok('<'),
            "gt" => Ok('>'),
            "amp" => Ok('&'),
            "apos" => Ok('\''),
            "quot" => Ok('"'),
            other => Err(self.malformed(format!("undefined entity &{other};"))),
        }
    }

    fn open_element(&mut self, start: &BytesStart<'_>) -> Result<XmlNode, ParseError> {
        let is_root = self.stack.is_empty();
        let mut raw_attrs = Vec::new();
        for attr in start.attributes() {
            let attr = attr.map_err(|e| self.malformed(e.to_string()))?;
            let value = attr
                .normalized_value(quick_xml::XmlVersion::Implicit1_0)
                .map_err(|e| self.malformed(e.to_string()))?
                .into_owned();
            let key = attr.key.as_ref();
            if key == "xmlns" {
                if is_root && !value.is_empty() {
                    self.table.default_namespace = Some(value.clone());
                }
                self.scope.push((String::new(), value));
            } else if let Some(prefix) = key.strip_prefix("xmlns:") {
                if value.is_empty() {
                    return Err(self.malformed(format!("prefix {prefix} bound to an empty URI")));
                }
                self.table
                    .bindings
                    .entry(prefix.to_string())
                    .or_insert_with(|| value.clone());
                self.scope.push((prefix.to_string(), value));
            } else {
                raw_attrs.push((key.to_string(), value));
            }
        }

        let name = self.resolve(start.name().as_ref(), true)?;
        let mut node = XmlNode::new(name);
        for (key, mut value) in raw_attrs {
            let attr_name = self.resolve(&key, false)?;
            if node.attr(&attr_name).is_some() {
                return Err(self.malformed(format!("duplicate attribute {key}")));
            }
            if attr_name.is(ns::XSI, "type") {
                value = self.canonical_qname_value(&value);
            }
            node.attributes.push((attr_name, value));
        }
        Ok(node)
    }

    fn lookup(&self, prefix: &str) -> Option<&str> {
        if prefix == "xml" {
            return Some(ns::XML);
        }
        self.scope
            .iter()
            .rev()
            .find(|(p, _)| p == prefix)
            .map(|(_, uri)| uri.as_str())
    }

    fn resolve(&self, qname: &str, is_element: bool) -> Result<XmlName, ParseError> {
        match qname.split_once(':') {
            Some((prefix, local)) => {
                if local.is_empty() || local.contains(':') {
                    return Err(self.malformed(format!("invalid name {qname}")));
                }
                let uri = self
                    .lookup(prefix)
                    .ok_or_else(|| self.malformed(format!("unbound prefix {prefix} in {qname}")))?;
                Ok(XmlName::new(uri, local))
            }
            None if is_element => Ok(XmlName::new(self.lookup("").unwrap_or(""), qname)),
            None => Ok(XmlName::unqualified(qname)),
        }
    }

    /// `xsi:type` holds a QName whose prefix must follow the output prefix
    /// set; known namespaces are rewritten to their fixed prefix here.
    fn canonical_qname_value(&self, value: &str) -> String {
        let (prefix, local) = match value.split_once(':') {
            Some((p, l)) => (p, l),
            None => ("", value),
        };
        match self.lookup(prefix).and_then(ns::fixed_prefix) {
            Some(fixed) => format!("{fixed}:{local}"),
            None => value.to_string(),
        }
    }
}

fn finish_text(mut node: XmlNode, text: String) -> XmlNode {
    node.text = if node.children.is_empty() {
        (!text.trim().is_empty()).then_some(text)
    } else {
        let trimmed = text.trim();
        (!trimmed.is_empty()).then(|| trimmed.to_string())
    };
    node
}
