//! Node-labeled unranked ordered trees and a tag-only XML reader/writer.

use std::fmt;

use crate::error::{Error, Result};
use crate::value::Label;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    pub label: Label,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(label: &str) -> Tree {
        Tree { label: label.into(), children: Vec::new() }
    }

    pub fn node(label: &str, children: Vec<Tree>) -> Tree {
        Tree { label: label.into(), children }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Tree::node_count).sum::<usize>()
    }

    /// Number of tags in the serialization, counting `<a/>` as an open/close pair.
    pub fn tag_length(&self) -> usize {
        2 * self.node_count()
    }

    /// Proper descendants in document order.
    pub fn descendants(&self) -> Vec<&Tree> {
        fn go<'a>(t: &'a Tree, out: &mut Vec<&'a Tree>) {
            for c in &t.children {
                out.push(c);
                go(c, out);
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Tree::depth).max().unwrap_or(0)
    }
}

fn is_tag_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '<' | '>' | '/' | '{' | '}')
}

pub(crate) fn valid_tag(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_tag_char)
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            return write!(f, "<{}/>", self.label);
        }
        write!(f, "<{}>", self.label)?;
        for c in &self.children {
            write!(f, "{c}")?;
        }
        write!(f, "</{}>", self.label)
    }
}

/// Serializes compactly. Fails on labels that cannot be written as tags.
pub fn print_xml(t: &Tree) -> Result<String> {
    fn check(t: &Tree) -> Result<()> {
        if !valid_tag(&t.label) {
            return Err(Error::Structure(format!("`{}` cannot be written as a tag name", t.label)));
        }
        t.children.iter().try_for_each(check)
    }
    check(t)?;
    Ok(t.to_string())
}

enum Tag<'a> {
    Open(&'a str),
    Close(&'a str),
    Empty(&'a str),
}

fn tags(text: &str) -> impl Iterator<Item = Result<(usize, Tag<'_>)>> + '_ {
    let mut pos = 0;
    std::iter::from_fn(move || {
        let rest = &text[pos..];
        let skipped = rest.len() - rest.trim_start().len();
        pos += skipped;
        let rest = &text[pos..];
        if rest.is_empty() {
            return None;
        }
        let start = pos;
        if !rest.starts_with('<') {
            return Some(Err(Error::syntax(start, "text content is not allowed")));
        }
        let Some(end) = rest.find('>') else {
            return Some(Err(Error::syntax(start, "unterminated tag")));
        };
        pos += end + 1;
        let inner = &rest[1..end];
        let tag = if let Some(name) = inner.strip_prefix('/') {
            Tag::Close(name)
        } else if let Some(name) = inner.strip_suffix('/') {
            Tag::Empty(name)
        } else {
            Tag::Open(inner)
        };
        let name = match &tag {
            Tag::Open(n) | Tag::Close(n) | Tag::Empty(n) => n,
        };
        if !valid_tag(name) {
            return Some(Err(Error::syntax(start, format!("bad tag `<{inner}>`: attributes and text are not supported"))));
        }
        Some(Ok((start, tag)))
    })
}

/// Parses a sequence of trees.
pub fn parse_xml_seq(text: &str) -> Result<Vec<Tree>> {
    let mut stack: Vec<Tree> = Vec::new();
    let mut out = Vec::new();
    for t in tags(text) {
        let (pos, tag) = t?;
        let done = match tag {
            Tag::Open(n) => {
                stack.push(Tree::leaf(n));
                None
            }
            Tag::Empty(n) => Some(Tree::leaf(n)),
            Tag::Close(n) => {
                let top = stack.pop().ok_or_else(|| Error::syntax(pos, format!("unmatched `</{n}>`")))?;
                if &*top.label != n {
                    return Err(Error::syntax(pos, format!("`</{n}>` closes `<{}>`", top.label)));
                }
                Some(top)
            }
        };
        if let Some(t) = done {
            match stack.last_mut() {
                Some(parent) => parent.children.push(t),
                None => out.push(t),
            }
        }
    }
    if let Some(t) = stack.last() {
        return Err(Error::syntax(text.len(), format!("`<{}>` is never closed", t.label)));
    }
    Ok(out)
}

/// Parses exactly one tree.
pub fn parse_xml(text: &str) -> Result<Tree> {
    let mut ts = parse_xml_seq(text)?;
    if ts.len() != 1 {
        return Err(Error::syntax(0, format!("expected one root element, found {}", ts.len())));
    }
    Ok(ts.pop().expect("one tree"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_writes() {
        let t = parse_xml("<a><b/><b/></a>").unwrap();
        assert_eq!(t, Tree::node("a", vec![Tree::leaf("b"), Tree::leaf("b")]));
        assert_eq!(print_xml(&t).unwrap(), "<a><b/><b/></a>");
        assert_eq!(t.tag_length(), 6);
        assert_eq!(parse_xml("<a/>").unwrap(), Tree::leaf("a"));
        assert_eq!(parse_xml(" <a>\n <b></b>\n</a> ").unwrap().to_string(), "<a><b/></a>");
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_xml("<a><b></a></b>").is_err());
        assert!(parse_xml("<a>text</a>").is_err());
        assert!(parse_xml("<a x=\"1\"/>").is_err());
        assert!(parse_xml("<a>").is_err());
        assert!(parse_xml("<a/><b/>").is_err());
        assert!(print_xml(&Tree::leaf("a b")).is_err());
    }

    #[test]
    fn descendants_in_preorder() {
        let t = parse_xml("<a><b><c/></b><d/></a>").unwrap();
        let ls: Vec<&str> = t.descendants().iter().map(|n| &*n.label).collect();
        assert_eq!(ls, ["b", "c", "d"]);
    }
}
