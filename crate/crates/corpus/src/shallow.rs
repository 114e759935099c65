//! Shallow parsing into Penn-style bracketed trees.
//!
//! Tagged tokens are grouped into flat NP, PP, VP, ADJP and ADVP chunks by
//! patterns over the tag sequence; a preposition chunk absorbs the noun
//! phrase right after it. The chunks (and any tokens left outside a chunk)
//! hang off a right-branching clause spine whose inner nodes are labeled
//! `S_<previous chunk>`, so each spine rule conditions on one chunk of left
//! context.

use std::sync::OnceLock;

use regex::Regex;

use crate::tagger::Tagger;

/// One character per tag class, so chunk patterns can run over a string.
fn class(tag: &str) -> char {
    match tag {
        "NN" | "NNS" | "NNP" | "NNPS" | "PRP" | "PRP$" => 'N',
        "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ" => 'V',
        "JJ" | "JJR" | "JJS" => 'J',
        "RB" | "RBR" | "RBS" => 'R',
        "WRB" => 'W',
        "DT" => 'D',
        "CD" => '0',
        "CC" => '&',
        "MD" => 'M',
        "IN" | "TO" => 'I',
        _ => '.',
    }
}

fn rules() -> &'static [(&'static str, Regex)] {
    static RULES: OnceLock<Vec<(&'static str, Regex)>> = OnceLock::new();
    RULES.get_or_init(|| {
        [
            ("NP", r"N*[D0&]*[RJ]*N+"),
            ("PP", r"I+"),
            ("VP", r"(?:[MR]*V+)+"),
            ("VP", r"M"),
            ("ADJP", r"[&RJ]*J+"),
            ("ADVP", r"[RW]+"),
        ]
        .into_iter()
        .map(|(l, p)| (l, Regex::new(p).expect("valid chunk pattern")))
        .collect()
    })
}

/// A labeled run of tokens `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chunk {
    pub label: &'static str,
    pub start: usize,
    pub end: usize,
}

/// Chunks in token order. Patterns run in a fixed order and a token keeps
/// the first chunk that claims it; a conjunction never opens a chunk.
pub fn chunk(tags: &[String]) -> Vec<Chunk> {
    let classes: String = tags.iter().map(|t| class(t)).collect();
    let mut owner: Vec<Option<&'static str>> = vec![None; tags.len()];
    let mut starts = vec![false; tags.len()];
    for (label, re) in rules() {
        for m in re.find_iter(&classes) {
            // one byte per token
            let mut open = true;
            for k in m.start()..m.end() {
                if owner[k].is_some() {
                    open = true;
                    continue;
                }
                if open && tags[k] == "CC" {
                    continue;
                }
                owner[k] = Some(label);
                starts[k] = open;
                open = false;
            }
        }
    }
    let mut out: Vec<Chunk> = Vec::new();
    for (k, o) in owner.iter().enumerate() {
        match *o {
            Some(label)
                if !starts[k] && out.last().is_some_and(|c| c.end == k && c.label == label) =>
            {
                out.last_mut().expect("checked").end = k + 1;
            }
            Some(label) => out.push(Chunk {
                label,
                start: k,
                end: k + 1,
            }),
            None => {}
        }
    }
    // "perhaps you": an adverb does not open a noun phrase unless an
    // adjective follows it
    let mut fixed = Vec::with_capacity(out.len());
    for c in out {
        if c.label == "NP"
            && class(&tags[c.start]) == 'R'
            && c.end - c.start > 1
            && class(&tags[c.start + 1]) != 'J'
        {
            fixed.push(Chunk {
                label: "ADVP",
                start: c.start,
                end: c.start + 1,
            });
            fixed.push(Chunk {
                label: "NP",
                start: c.start + 1,
                end: c.end,
            });
        } else {
            fixed.push(c);
        }
    }
    fixed
}

fn escape(s: &str) -> &str {
    match s {
        "(" => "-LRB-",
        ")" => "-RRB-",
        _ => s,
    }
}

fn preterminal(tag: &str, word: &str) -> String {
    format!("({} {})", escape(tag), escape(word))
}

fn phrase(label: &str, words: &[&str], tags: &[String], range: std::ops::Range<usize>) -> String {
    let mut s = format!("({label}");
    for k in range {
        s.push(' ');
        s.push_str(&preterminal(&tags[k], words[k]));
    }
    s.push(')');
    s
}

/// A bracketed tree over `words` with the given tags. Parentheses are
/// written as `-LRB-` and `-RRB-`.
pub fn bracket<S: AsRef<str>>(words: &[S], tags: &[String]) -> String {
    assert_eq!(words.len(), tags.len(), "one tag per word");
    assert!(!words.is_empty(), "empty sentence");
    let words: Vec<&str> = words.iter().map(AsRef::as_ref).collect();
    let chunks = chunk(tags);
    // (label, subtree) items along the spine
    let mut items: Vec<(String, String)> = Vec::new();
    let mut next = chunks.iter().peekable();
    let mut k = 0;
    while k < words.len() {
        match next.peek() {
            Some(c) if c.start == k => {
                let c = **c;
                next.next();
                if c.label == "PP" {
                    if let Some(np) = next
                        .peek()
                        .filter(|n| n.label == "NP" && n.start == c.end)
                        .copied()
                    {
                        next.next();
                        let mut s = String::from("(PP");
                        for j in c.start..c.end {
                            s.push(' ');
                            s.push_str(&preterminal(&tags[j], words[j]));
                        }
                        s.push(' ');
                        s.push_str(&phrase("NP", &words, tags, np.start..np.end));
                        s.push(')');
                        items.push(("PP".to_owned(), s));
                        k = np.end;
                        continue;
                    }
                }
                items.push((
                    c.label.to_owned(),
                    phrase(c.label, &words, tags, c.start..c.end),
                ));
                k = c.end;
            }
            _ => {
                items.push((spine_name(&tags[k]), preterminal(&tags[k], words[k])));
                k += 1;
            }
        }
    }
    let last = items.len() - 1;
    if last == 0 {
        return format!("(S {})", items[0].1);
    }
    let mut tree = items[last].1.clone();
    for i in (0..last).rev() {
        let label = if i == 0 {
            "S".to_owned()
        } else {
            format!("S_{}", items[i - 1].0)
        };
        tree = format!("({label} {} {tree})", items[i].1);
    }
    tree
}

/// Spine context name for a token outside any chunk.
fn spine_name(tag: &str) -> String {
    match tag {
        "(" => "LRB".to_owned(),
        ")" => "RRB".to_owned(),
        "," => "COMMA".to_owned(),
        "." => "STOP".to_owned(),
        ":" => "COLON".to_owned(),
        "``" | "''" | "\"" => "QUOTE".to_owned(),
        t if t.chars().all(|c| c.is_ascii_alphanumeric()) => t.to_owned(),
        _ => "SYM".to_owned(),
    }
}

/// Tags `words` with the bundled tagger and brackets them.
pub fn parse<S: AsRef<str>>(words: &[S]) -> String {
    let tags = Tagger::bundled().tag(words);
    bracket(words, &tags)
}
