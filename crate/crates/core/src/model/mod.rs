//! Namespace-aware XML tree for BPMN 2.0 documents.
//!
//! Elements and attributes are identified by `(namespace URI, local name)`;
//! prefixes only exist at the parse and serialize boundaries. Output always
//! uses the fixed prefix set in [`ns::FIXED_PREFIXES`].

mod parse;
mod serialize;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

pub use parse::{parse_bpmn, ParseError};
pub use serialize::{serialize_bpmn, serialize_to_string};

/// Well-known namespace URIs.
pub mod ns {
    pub const BPMN: &str = "http://www.omg.org/spec/BPMN/20100524/MODEL";
    pub const BPMNDI: &str = "http://www.omg.org/spec/BPMN/20100524/DI";
    pub const DC: &str = "http://www.omg.org/spec/DD/20100524/DC";
    pub const DI: &str = "http://www.omg.org/spec/DD/20100524/DI";
    pub const CAMUNDA: &str = "http://camunda.org/schema/1.0/bpmn";
    pub const ZEEBE: &str = "http://camunda.org/schema/zeebe/1.0";
    pub const MODELER: &str = "http://camunda.org/schema/modeler/1.0";
    pub const XSI: &str = "http://www.w3.org/2001/XMLSchema-instance";
    pub const XML: &str = "http://www.w3.org/XML/1998/namespace";

    /// Prefixes used on output, in declaration order.
    pub const FIXED_PREFIXES: &[(&str, &str)] = &[
        ("bpmn", BPMN),
        ("bpmndi", BPMNDI),
        ("dc", DC),
        ("di", DI),
        ("zeebe", ZEEBE),
        ("modeler", MODELER),
        ("xsi", XSI),
        ("camunda", CAMUNDA),
    ];

    pub fn fixed_prefix(uri: &str) -> Option<&'static str> {
        FIXED_PREFIXES
            .iter()
            .find(|(_, u)| *u == uri)
            .map(|(p, _)| *p)
    }

    pub fn is_fixed_prefix(prefix: &str) -> bool {
        prefix == "xml" || FIXED_PREFIXES.iter().any(|(p, _)| *p == prefix)
    }
}

/// Qualified name. Equality ignores prefixes entirely.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct XmlName {
    pub namespace_uri: String,
    pub local_name: String,
}

impl XmlName {
    pub fn new(namespace_uri: impl Into<String>, local_name: impl Into<String>) -> Self {
        let name = Self {
            namespace_uri: namespace_uri.into(),
            local_name: local_name.into(),
        };
        debug_assert!(
            !name.local_name.is_empty() && !name.local_name.contains(':'),
            "invalid local name {:?}",
            name.local_name
        );
        name
    }

    pub fn unqualified(local_name: impl Into<String>) -> Self {
        Self::new("", local_name)
    }

    pub fn bpmn(local_name: &str) -> Self {
        Self::new(ns::BPMN, local_name)
    }

    pub fn camunda(local_name: &str) -> Self {
        Self::new(ns::CAMUNDA, local_name)
    }

    pub fn zeebe(local_name: &str) -> Self {
        Self::new(ns::ZEEBE, local_name)
    }

    pub fn is_in(&self, namespace_uri: &str) -> bool {
        self.namespace_uri == namespace_uri
    }

    pub fn is(&self, namespace_uri: &str, local_name: &str) -> bool {
        self.namespace_uri == namespace_uri && self.local_name == local_name
    }

    /// `prefix:local` using the fixed output prefix, or the bare local name
    /// for unqualified and unknown namespaces.
    pub fn qualified(&self) -> String {
        match ns::fixed_prefix(&self.namespace_uri) {
            Some(prefix) => format!("{prefix}:{}", self.local_name),
            None => self.local_name.clone(),
        }
    }
}

impl fmt::Display for XmlName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.qualified())
    }
}

/// Child of an element: a nested element or a comment kept in place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XmlChild {
    Element(XmlNode),
    Comment(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlNode {
    pub name: XmlName,
    pub attributes: Vec<(XmlName, String)>,
    pub children: Vec<XmlChild>,
    /// Character content. Whitespace-only content is dropped; for elements
    /// that also have element children the content is trimmed.
    pub text: Option<String>,
}

static EXTENSION_ELEMENTS: &str = "extensionElements";

impl XmlNode {
    pub fn new(name: XmlName) -> Self {
        Self {
            name,
            attributes: Vec::new(),
            children: Vec::new(),
            text: None,
        }
    }

    pub fn with_attr(mut self, name: XmlName, value: impl Into<String>) -> Self {
        self.set_attr(name, value);
        self
    }

    pub fn with_child(mut self, child: XmlNode) -> Self {
        self.children.push(XmlChild::Element(child));
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn attr(&self, name: &XmlName) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    /// Unqualified attribute lookup (`id`, `name`, `sourceRef`, ...).
    pub fn plain_attr(&self, local_name: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(n, _)| n.namespace_uri.is_empty() && n.local_name == local_name)
            .map(|(_, v)| v.as_str())
    }

    pub fn id(&self) -> Option<&str> {
        self.plain_attr("id")
    }

    /// Replaces the value in place when present, appends otherwise.
    pub fn set_attr(&mut self, name: XmlName, value: impl Into<String>) {
        let value = value.into();
        match self.attributes.iter_mut().find(|(n, _)| *n == name) {
            Some((_, v)) => *v = value,
            None => self.attributes.push((name, value)),
        }
    }

    pub fn remove_attr(&mut self, name: &XmlName) -> Option<String> {
        let pos = self.attributes.iter().position(|(n, _)| n == name)?;
        Some(self.attributes.remove(pos).1)
    }

    pub fn has_attrs_in(&self, namespace_uri: &str) -> bool {
        self.attributes.iter().any(|(n, _)| n.is_in(namespace_uri))
    }

    pub fn elements(&self) -> impl Iterator<Item = &XmlNode> {
        self.children.iter().filter_map(|c| match c {
            XmlChild::Element(e) => Some(e),
            XmlChild::Comment(_) => None,
        })
    }

    pub fn elements_mut(&mut self) -> impl Iterator<Item = &mut XmlNode> {
        self.children.iter_mut().filter_map(|c| match c {
            XmlChild::Element(e) => Some(e),
            XmlChild::Comment(_) => None,
        })
    }

    pub fn element_count(&self) -> usize {
        self.elements().count()
    }

    /// Children matching `name`, in document order.
    pub fn find_children(&self, name: &XmlName) -> Vec<&XmlNode> {
        self.elements().filter(|e| e.name == *name).collect()
    }

    pub fn find_child(&self, name: &XmlName) -> Option<&XmlNode> {
        self.elements().find(|e| e.name == *name)
    }

    pub fn find_child_mut(&mut self, name: &XmlName) -> Option<&mut XmlNode> {
        self.elements_mut().find(|e| e.name == *name)
    }

    pub fn has_child(&self, name: &XmlName) -> bool {
        self.find_child(name).is_some()
    }

    pub fn push_child(&mut self, child: XmlNode) {
        self.children.push(XmlChild::Element(child));
    }

    /// Returns the `bpmn:extensionElements` child, creating it when absent.
    ///
    /// A new container goes after any leading `bpmn:documentation` children
    /// (the position BPMN schema validation requires), which makes it the
    /// first child in every other case.
    pub fn ensure_extension_elements(&mut self) -> &mut XmlNode {
        let ext_name = XmlName::bpmn(EXTENSION_ELEMENTS);
        let pos = match self.children.iter().position(
            |c| matches!(c, XmlChild::Element(e) if e.name == ext_name),
        ) {
            Some(pos) => pos,
            None => {
                let doc_name = XmlName::bpmn("documentation");
                let insert_at = self
                    .children
                    .iter()
                    .position(|c| !matches!(c, XmlChild::Element(e) if e.name == doc_name))
                    .unwrap_or(self.children.len());
                self.children
                    .insert(insert_at, XmlChild::Element(XmlNode::new(ext_name)));
                insert_at
            }
        };
        match &mut self.children[pos] {
            XmlChild::Element(e) => e,
            XmlChild::Comment(_) => unreachable!("position points at an element"),
        }
    }

    /// Appends `extension` to this element's `bpmn:extensionElements`.
    pub fn add_extension(&mut self, extension: XmlNode) {
        self.ensure_extension_elements().push_child(extension);
    }

    /// Pre-order iterator over this node and all descendant elements.
    pub fn descendants(&self) -> Descendants<'_> {
        Descendants { stack: vec![self] }
    }

    /// Number of descendant elements, excluding `self`.
    pub fn descendant_count(&self) -> usize {
        self.descendants().count() - 1
    }
}

pub struct Descendants<'a> {
    stack: Vec<&'a XmlNode>,
}

impl<'a> Iterator for Descendants<'a> {
    type Item = &'a XmlNode;

    fn next(&mut self) -> Option<&'a XmlNode> {
        let node = self.stack.pop()?;
        let before = self.stack.len();
        self.stack.extend(node.elements());
        self.stack[before..].reverse();
        Some(node)
    }
}

/// Free-function form of [`XmlNode::find_children`].
pub fn find_children<'a>(node: &'a XmlNode, name: &XmlName) -> Vec<&'a XmlNode> {
    node.find_children(name)
}

/// Prefix bindings seen in a document, resolved to document scope.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NamespaceTable {
    pub bindings: BTreeMap<String, String>,
    pub default_namespace: Option<String>,
}

impl NamespaceTable {
    pub fn uri(&self, prefix: &str) -> Option<&str> {
        self.bindings.get(prefix).map(String::as_str)
    }

    pub fn prefix_for(&self, uri: &str) -> Option<&str> {
        self.bindings
            .iter()
            .find(|(_, u)| *u == uri)
            .map(|(p, _)| p.as_str())
    }

    pub fn declares(&self, uri: &str) -> bool {
        self.prefix_for(uri).is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpmnDocument {
    /// The `bpmn:definitions` element.
    pub root: XmlNode,
    pub namespaces: NamespaceTable,
    pub source_path: PathBuf,
    pub xml_declaration: String,
    /// Comments appearing before the root element.
    pub prolog_comments: Vec<String>,
}

impl BpmnDocument {
    /// Recomputes the namespace table from what the tree actually uses,
    /// with the output prefixes the serializer will emit.
    pub fn sync_namespaces(&mut self) {
        let bindings = serialize::output_bindings(self);
        self.namespaces = NamespaceTable {
            bindings: bindings.into_iter().collect(),
            default_namespace: None,
        };
    }

    /// Whether any element or attribute in the document lives in `uri`.
    pub fn uses_namespace(&self, uri: &str) -> bool {
        self.root
            .descendants()
            .any(|n| n.name.is_in(uri) || n.has_attrs_in(uri))
    }
}

pub fn is_di(node: &XmlNode) -> bool {
    node.name.is_in(ns::BPMNDI)
}
