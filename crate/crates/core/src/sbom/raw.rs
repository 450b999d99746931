//! Byte-level JSON layout scanner.
//!
//! Object models built on ordinary maps lose the order in which keys appeared
//! in the document, but root-level key order is exactly what the CycloneDX
//! structure checks need. This scanner walks the raw text once and records,
//! without building values, the order of root-level keys, the byte span of
//! each root value, the key order inside every element of the root
//! `components` array, and any duplicate keys it sees. It assumes the input
//! has already been validated as JSON and answers `None` on anything it
//! cannot cleanly walk.

/// One root-level entry: key plus the byte span of its value in the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEntry {
    pub key: String,
    /// Half-open byte range of the raw value text, suitable for slicing.
    pub span: (usize, usize),
}

/// Key-order information recovered from the raw document text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawLayout {
    /// Root-level keys in document order.
    pub root: Vec<RawEntry>,
    /// Key order of each element of the root `components` array.
    pub components: Vec<Vec<String>>,
    /// Root-level keys that appeared more than once (each listed once).
    pub root_duplicates: Vec<String>,
    /// `(component index, key)` pairs for keys repeated within one component.
    pub component_duplicates: Vec<(usize, String)>,
}

struct Cursor<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            text,
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, expected: u8) -> Option<()> {
        if self.peek() == Some(expected) {
            self.pos += 1;
            Some(())
        } else {
            None
        }
    }

    /// Consume a JSON string, returning the span including its quotes.
    fn string_span(&mut self) -> Option<(usize, usize)> {
        let start = self.pos;
        self.eat(b'"')?;
        loop {
            match self.peek()? {
                b'\\' => self.pos += 2,
                b'"' => {
                    self.pos += 1;
                    return Some((start, self.pos));
                }
                _ => self.pos += 1,
            }
        }
    }

    /// Consume any JSON value, returning its span.
    fn value_span(&mut self) -> Option<(usize, usize)> {
        self.skip_ws();
        let start = self.pos;
        match self.peek()? {
            b'"' => self.string_span(),
            b'{' | b'[' => {
                let mut depth = 0usize;
                loop {
                    match self.peek()? {
                        b'"' => {
                            self.string_span()?;
                        }
                        b'{' | b'[' => {
                            depth += 1;
                            self.pos += 1;
                        }
                        b'}' | b']' => {
                            depth = depth.checked_sub(1)?;
                            self.pos += 1;
                            if depth == 0 {
                                return Some((start, self.pos));
                            }
                        }
                        _ => self.pos += 1,
                    }
                }
            }
            _ => {
                while let Some(b) = self.peek() {
                    if matches!(b, b',' | b'}' | b']' | b' ' | b'\t' | b'\n' | b'\r') {
                        break;
                    }
                    self.pos += 1;
                }
                if self.pos == start {
                    None
                } else {
                    Some((start, self.pos))
                }
            }
        }
    }

    /// Walk an object, yielding each key with its value span.
    fn object_entries(&mut self) -> Option<Vec<RawEntry>> {
        self.skip_ws();
        self.eat(b'{')?;
        let mut entries = Vec::new();
        self.skip_ws();
        if self.peek() == Some(b'}') {
            self.pos += 1;
            return Some(entries);
        }
        loop {
            self.skip_ws();
            let key_span = self.string_span()?;
            let key: String = serde_json::from_str(&self.text[key_span.0..key_span.1]).ok()?;
            self.skip_ws();
            self.eat(b':')?;
            let span = self.value_span()?;
            entries.push(RawEntry { key, span });
            self.skip_ws();
            match self.peek()? {
                b',' => self.pos += 1,
                b'}' => {
                    self.pos += 1;
                    return Some(entries);
                }
                _ => return None,
            }
        }
    }
}

fn duplicates(keys: &[RawEntry]) -> Vec<String> {
    let mut seen = std::collections::BTreeSet::new();
    let mut dups = Vec::new();
    for entry in keys {
        if !seen.insert(entry.key.as_str()) && !dups.contains(&entry.key) {
            dups.push(entry.key.clone());
        }
    }
    dups
}

/// Scan a JSON document and recover its root and component key layout.
pub fn raw_layout(text: &str) -> Option<RawLayout> {
    let mut cursor = Cursor::new(text);
    let root = cursor.object_entries()?;
    cursor.skip_ws();
    if cursor.peek().is_some() {
        return None;
    }

    let mut components = Vec::new();
    let mut component_duplicates = Vec::new();
    if let Some(entry) = root.iter().find(|e| e.key == "components") {
        let slice = &text[entry.span.0..entry.span.1];
        if slice.starts_with('[') {
            let mut inner = Cursor::new(slice);
            inner.eat(b'[')?;
            inner.skip_ws();
            if inner.peek() != Some(b']') {
                loop {
                    inner.skip_ws();
                    if inner.peek() == Some(b'{') {
                        let entries = inner.object_entries()?;
                        for dup in duplicates(&entries) {
                            component_duplicates.push((components.len(), dup));
                        }
                        components.push(entries.into_iter().map(|e| e.key).collect());
                    } else {
                        inner.value_span()?;
                        components.push(Vec::new());
                    }
                    inner.skip_ws();
                    match inner.peek()? {
                        b',' => inner.pos += 1,
                        b']' => break,
                        _ => return None,
                    }
                }
            }
        }
    }

    let root_duplicates = duplicates(&root);
    Some(RawLayout {
        root,
        components,
        root_duplicates,
        component_duplicates,
    })
}
