//! Loading protocols from JSON with errors pointing at source lines.

use std::path::Path;

use super::{ProtocolError, ProtocolIR};

/// Line of every value in a JSON document, addressable by path.
#[derive(Debug)]
struct Node {
    line: usize,
    children: Children,
}

#[derive(Debug)]
enum Children {
    Leaf,
    Object(Vec<(String, Node)>),
    Array(Vec<Node>),
}

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
}

impl Scanner<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
        }
        Some(b)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.bump();
        }
    }

    fn string(&mut self) -> String {
        let mut out = Vec::new();
        self.bump(); // opening quote
        while let Some(b) = self.bump() {
            match b {
                b'"' => break,
                b'\\' => {
                    if let Some(e) = self.bump() {
                        out.push(e);
                    }
                }
                _ => out.push(b),
            }
        }
        String::from_utf8_lossy(&out).into_owned()
    }

    /// Assumes well-formed input; only called after a successful parse.
    fn value(&mut self) -> Node {
        self.skip_ws();
        let line = self.line;
        let children = match self.peek() {
            Some(b'{') => {
                self.bump();
                let mut fields = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b'}') | None => {
                            self.bump();
                            break;
                        }
                        Some(b',') => {
                            self.bump();
                        }
                        _ => {
                            let key = self.string();
                            self.skip_ws();
                            self.bump(); // colon
                            fields.push((key, self.value()));
                        }
                    }
                }
                Children::Object(fields)
            }
            Some(b'[') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b']') | None => {
                            self.bump();
                            break;
                        }
                        Some(b',') => {
                            self.bump();
                        }
                        _ => items.push(self.value()),
                    }
                }
                Children::Array(items)
            }
            Some(b'"') => {
                self.string();
                Children::Leaf
            }
            _ => {
                while matches!(self.peek(), Some(b) if !matches!(b, b',' | b']' | b'}') && !b.is_ascii_whitespace()) {
                    self.bump();
                }
                Children::Leaf
            }
        };
        Node { line, children }
    }
}

enum Segment {
    Key(String),
    Index(usize),
}

fn segments(path: &str) -> Vec<Segment> {
    let mut out = Vec::new();
    for part in path.split('.') {
        let mut rest = part;
        if let Some(i) = rest.find('[') {
            if i > 0 {
                out.push(Segment::Key(rest[..i].to_string()));
            }
            rest = &rest[i..];
            while let Some(stripped) = rest.strip_prefix('[') {
                let Some(end) = stripped.find(']') else { break };
                if let Ok(k) = stripped[..end].parse() {
                    out.push(Segment::Index(k));
                }
                rest = &stripped[end + 1..];
            }
        } else if !rest.is_empty() {
            out.push(Segment::Key(rest.to_string()));
        }
    }
    out
}

/// Line of the deepest value along `path` present in the document.
fn line_of(root: &Node, path: &str) -> usize {
    let mut node = root;
    for seg in segments(path) {
        let next = match (&node.children, seg) {
            (Children::Object(fields), Segment::Key(k)) => fields.iter().find(|(f, _)| *f == k).map(|(_, n)| n),
            (Children::Array(items), Segment::Index(i)) => items.get(i),
            _ => None,
        };
        match next {
            Some(n) => node = n,
            None => break,
        }
    }
    node.line
}

/// Parses and validates a protocol description.
pub fn load_protocol(text: &str) -> Result<ProtocolIR, ProtocolError> {
    let ir: ProtocolIR = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        let message = msg.rsplit_once(" at line ").map(|(m, _)| m.to_string()).unwrap_or(msg);
        ProtocolError::Parse { line: e.line(), column: e.column(), message }
    })?;
    ir.validate().map_err(|e| match e {
        ProtocolError::Invalid { path, message, .. } => {
            let root = Scanner { src: text.as_bytes(), pos: 0, line: 1 }.value();
            let line = Some(line_of(&root, &path));
            ProtocolError::Invalid { path, line, message }
        }
        other => other,
    })
}

pub fn load_protocol_file(path: impl AsRef<Path>) -> Result<ProtocolIR, ProtocolError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| ProtocolError::Io { path: path.display().to_string(), message: e.to_string() })?;
    load_protocol(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{
  "name": "demo",
  "ell": 1,
  "resources": {"kind": "none"},
  "registers": [{"name": "q", "dim": 2, "owner": "alice"}],
  "rounds": [
    {"actor": "alice", "gate": "cnot", "on": ["x0", "q"], "send": {"kind": "quantum", "registers": ["q"]}},
    {"actor": "alice", "phase": "open", "send": {"kind": "classical", "registers": ["x0"]}}
  ],
  "reveal": {"transcript": [0]}
}"#;

    #[test]
    fn loads_valid_protocol() {
        let p = load_protocol(GOOD).unwrap();
        assert_eq!(p.rounds.len(), 2);
        assert_eq!(p.n(), 0);
    }

    #[test]
    fn semantic_error_points_at_line() {
        let bad = GOOD.replace(r#"["x0", "q"]"#, r#"["x0", "nope"]"#);
        match load_protocol(&bad) {
            Err(ProtocolError::Invalid { line: Some(7), path, .. }) => assert_eq!(path, "rounds[0].on[1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ownership_error_points_at_line() {
        let bad = GOOD.replace(r#""phase": "open", "send": {"kind": "classical", "registers": ["x0"]}"#, r#""phase": "open", "send": {"kind": "classical", "registers": ["q"]}"#);
        assert!(matches!(load_protocol(&bad), Err(ProtocolError::Invalid { line: Some(8), .. })));
    }

    #[test]
    fn syntax_error_has_position() {
        let bad = GOOD.replace("\"ell\": 1,", "\"ell\": 1");
        assert!(matches!(load_protocol(&bad), Err(ProtocolError::Parse { line: 4, .. })));
    }

    #[test]
    fn unknown_field_rejected() {
        let bad = GOOD.replace("\"ell\": 1,", "\"ell\": 1, \"bogus\": 3,");
        assert!(matches!(load_protocol(&bad), Err(ProtocolError::Parse { line: 3, .. })));
    }

    #[test]
    fn round_trips_through_serde() {
        let p = load_protocol(GOOD).unwrap();
        let text = serde_json::to_string_pretty(&p).unwrap();
        assert_eq!(load_protocol(&text).unwrap(), p);
    }
}
