//! A tiny JSON document builder that preserves object key order.
//!
//! The fixture BOMs exercise *byte-level* properties — root-element order,
//! the relative position of `cpe` and `purl` inside a component — that
//! ordinary serde maps cannot express. Documents built here render with
//! 2-space indentation and exactly the key order they were constructed with,
//! so fixture bytes are stable across builds.

/// One JSON value with insertion-ordered object keys.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Str(String),
    Int(i64),
    Arr(Vec<Node>),
    Obj(Vec<(String, Node)>),
}

impl Node {
    /// Render the document with 2-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(0, &mut out);
        out.push('\n');
        out
    }

    fn write(&self, indent: usize, out: &mut String) {
        match self {
            Node::Str(v) => out.push_str(&serde_json::to_string(v).expect("string encodes")),
            Node::Int(v) => out.push_str(&v.to_string()),
            Node::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    item.write(indent + 1, out);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            }
            Node::Obj(entries) => {
                if entries.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in entries.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    out.push_str(&serde_json::to_string(key).expect("key encodes"));
                    out.push_str(": ");
                    value.write(indent + 1, out);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
        }
    }
}

pub fn s(value: &str) -> Node {
    Node::Str(value.to_string())
}

pub fn i(value: i64) -> Node {
    Node::Int(value)
}

pub fn arr(items: Vec<Node>) -> Node {
    Node::Arr(items)
}

pub fn obj(entries: Vec<(&str, Node)>) -> Node {
    Node::Obj(
        entries
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    )
}
