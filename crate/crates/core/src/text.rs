//! Tokenization and sentence sentinels.

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

/// Lowercases `line`, splits on whitespace and detaches punctuation.
///
/// Apostrophes, hyphens and periods stay inside a word when both neighbours
/// are alphanumeric (`don't`, `well-known`, `u.s`), as do commas between
/// digits (`1,000`); every other non-alphanumeric character becomes a token
/// of its own.
pub fn tokenize(line: &str) -> Vec<String> {
    split_tokens(line)
        .into_iter()
        .map(|t| t.to_lowercase())
        .collect()
}

/// [`tokenize`] without the lowercasing.
pub fn split_tokens(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in line.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut word = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let between =
                |f: fn(&char) -> bool| i > 0 && f(&chars[i - 1]) && chars.get(i + 1).is_some_and(f);
            let joiner = (matches!(c, '\'' | '-' | '.') && between(|c| c.is_alphanumeric()))
                || (c == ',' && between(char::is_ascii_digit));
            if c.is_alphanumeric() || joiner {
                word.push(c);
            } else {
                if !word.is_empty() {
                    out.push(std::mem::take(&mut word));
                }
                out.push(c.to_string());
            }
        }
        if !word.is_empty() {
            out.push(word);
        }
    }
    out
}

/// Joins tokens back into a line with single spaces.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut s = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(t.as_ref());
    }
    s
}
