//! Penn-style bracketed trees.

use std::fmt;
use std::io::BufRead;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Leaf(String),
    Node { label: String, children: Vec<Tree> },
}

impl Tree {
    pub fn node(label: impl Into<String>, children: Vec<Tree>) -> Self {
        Tree::Node {
            label: label.into(),
            children,
        }
    }

    pub fn leaf(word: impl Into<String>) -> Self {
        Tree::Leaf(word.into())
    }

    pub fn label(&self) -> &str {
        match self {
            Tree::Leaf(w) => w,
            Tree::Node { label, .. } => label,
        }
    }

    /// A node whose only child is a word.
    pub fn is_preterminal(&self) -> bool {
        matches!(self, Tree::Node { children, .. } if children.len() == 1 && matches!(children[0], Tree::Leaf(_)))
    }

    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Tree::Leaf(w) => out.push(w),
            Tree::Node { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Parses one bracketed tree. An unlabeled or `ROOT`/`TOP` wrapper around
    /// a single tree is removed.
    pub fn parse(text: &str) -> std::result::Result<Tree, String> {
        let tokens = lex(text);
        if tokens.is_empty() {
            return Err("empty input".into());
        }
        let mut pos = 0;
        let tree = parse_node(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(format!("trailing input after tree: {:?}", tokens[pos]));
        }
        let tree = match tree {
            Tree::Node {
                label,
                mut children,
            } if (label.is_empty() || label == "ROOT" || label == "TOP")
                && children.len() == 1
                && matches!(children[0], Tree::Node { .. }) =>
            {
                children.pop().expect("one child")
            }
            Tree::Node { label, .. } if label.is_empty() => {
                return Err("unlabeled root with several children".into())
            }
            t => t,
        };
        if let Tree::Leaf(_) = tree {
            return Err("a tree must start with '('".into());
        }
        Ok(tree)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf(w) => f.write_str(w),
            Tree::Node { label, children } => {
                write!(f, "({label}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(text: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok::Atom(&text[s..i]));
            }
            match c {
                '(' => out.push(Tok::Open),
                ')' => out.push(Tok::Close),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok::Atom(&text[s..]));
    }
    out
}

fn parse_node(tokens: &[Tok<'_>], pos: &mut usize) -> std::result::Result<Tree, String> {
    match tokens.get(*pos) {
        Some(Tok::Open) => *pos += 1,
        Some(Tok::Atom(a)) => {
            *pos += 1;
            return Ok(Tree::Leaf((*a).to_owned()));
        }
        Some(Tok::Close) => return Err("unexpected ')'".into()),
        None => return Err("unexpected end of input".into()),
    }
    let label = match tokens.get(*pos) {
        Some(Tok::Atom(a)) => {
            *pos += 1;
            (*a).to_owned()
        }
        _ => String::new(),
    };
    let mut children = Vec::new();
    loop {
        match tokens.get(*pos) {
            Some(Tok::Close) => {
                *pos += 1;
                break;
            }
            None => {
                return Err(format!(
                    "unbalanced brackets: node {label:?} is never closed"
                ))
            }
            _ => children.push(parse_node(tokens, pos)?),
        }
    }
    if children.is_empty() {
        return Err(format!("node {label:?} has no children"));
    }
    let leaves = children
        .iter()
        .filter(|c| matches!(c, Tree::Leaf(_)))
        .count();
    if leaves > 0 && children.len() > 1 {
        return Err(format!("node {label:?} mixes words with other children"));
    }
    if label.is_empty() && leaves > 0 {
        return Err("a word needs a part-of-speech label".into());
    }
    Ok(Tree::Node { label, children })
}

/// Reads one tree per non-blank line.
pub fn read_treebank<R: BufRead>(reader: R) -> Result<Vec<Tree>> {
    let mut trees = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let tree = Tree::parse(&line).map_err(|msg| Error::MalformedTree { line: i + 1, msg })?;
        trees.push(tree);
    }
    Ok(trees)
}

/// Strips function tags and indices (`NP-SBJ-1` becomes `NP`), keeps labels
/// that start with a dash (`-NONE-`, `-LRB-`).
pub fn base_label(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    match label.find(['-', '=']) {
        Some(i) if i > 0 => &label[..i],
        _ => label,
    }
}

/// Prepares a tree for grammar induction: strips function tags, drops empty
/// elements, lowercases words, restores escaped brackets (`-LRB-` becomes
/// `(`) and collapses unary chains into `X+Y` labels. Returns `None` if
/// nothing but empty elements remain.
pub fn normalize(tree: &Tree) -> Option<Tree> {
    match tree {
        Tree::Leaf(w) => Some(Tree::Leaf(
            unescape_bracket(w).map_or_else(|| w.to_lowercase(), str::to_owned),
        )),
        Tree::Node { label, children } => {
            if label == "-NONE-" {
                return None;
            }
            let label = base_label(label).to_owned();
            let mut kids: Vec<Tree> = children.iter().filter_map(normalize).collect();
            if kids.is_empty() {
                return None;
            }
            if kids.len() == 1 {
                if let Tree::Node { .. } = kids[0] {
                    let Tree::Node {
                        label: child_label,
                        children,
                    } = kids.pop().expect("one child")
                    else {
                        unreachable!()
                    };
                    return Some(Tree::Node {
                        label: format!("{label}+{child_label}"),
                        children,
                    });
                }
            }
            Some(Tree::Node {
                label,
                children: kids,
            })
        }
    }
}

fn unescape_bracket(word: &str) -> Option<&'static str> {
    Some(match word {
        "-LRB-" => "(",
        "-RRB-" => ")",
        "-LSB-" => "[",
        "-RSB-" => "]",
        "-LCB-" => "{",
        "-RCB-" => "}",
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        let t = Tree::parse("(S (NP (DT the) (NN cat)) (VP (VBD sat)))").unwrap();
        assert_eq!(t.leaves(), ["the", "cat", "sat"]);
        assert_eq!(t.to_string(), "(S (NP (DT the) (NN cat)) (VP (VBD sat)))");
    }

    #[test]
    fn unwraps_penn_root() {
        let t = Tree::parse("( (S (A a) (B b)) )").unwrap();
        assert_eq!(t.label(), "S");
        let t = Tree::parse("(ROOT (S (A a) (B b)))").unwrap();
        assert_eq!(t.label(), "S");
    }

    #[test]
    fn rejects_malformed() {
        assert!(Tree::parse("(S (A a)").is_err());
        assert!(Tree::parse("(S (A a)))").is_err());
        assert!(Tree::parse("(S a b)").is_err());
        assert!(Tree::parse("(S )").is_err());
        assert!(Tree::parse("word").is_err());
    }

    #[test]
    fn treebank_errors_carry_line_numbers() {
        let text = "(S (A a) (B b))\n\n(S (A a)\n";
        match read_treebank(text.as_bytes()) {
            Err(Error::MalformedTree { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn normalization() {
        let t =
            Tree::parse("(S (NP-SBJ (PRP He)) (VP (VBD left) (NP (-NONE- *T*))) (. .))").unwrap();
        let n = normalize(&t).unwrap();
        assert_eq!(n.to_string(), "(S (NP+PRP he) (VP+VBD left) (. .))");
        assert_eq!(base_label("-LRB-"), "-LRB-");
        assert_eq!(base_label("NP-SBJ-2"), "NP");
        assert_eq!(base_label("PP=3"), "PP");
        let t = Tree::parse("(S (-LRB- -LRB-) (NN X) (-RRB- -RRB-))").unwrap();
        assert_eq!(normalize(&t).unwrap().leaves(), ["(", "x", ")"]);
    }
}
