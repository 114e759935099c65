//! A transformation-based part-of-speech tagger.
//!
//! Known words take their lexicon tag. Unknown words start as `NN` (or `NNP`
//! when capitalized, `CD` when numeric) and are refined by affix rules; then
//! every token is revisited by contextual rules, in rule order, left to right.
//! Tags are Penn Treebank tags.

use std::collections::HashMap;
use std::io::Read;
use std::sync::OnceLock;

use flate2::read::GzDecoder;

const LEXICON: &[u8] = include_bytes!("../data/tagger/lexicon.txt.gz");
const MORPHOLOGY: &str = include_str!("../data/tagger/morphology.txt");
const CONTEXT: &str = include_str!("../data/tagger/context.txt");

const PAD: &str = "STAART";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Affix {
    Char,
    HasPrefix,
    HasSuffix,
    AddPrefix,
    AddSuffix,
    DeletePrefix,
    DeleteSuffix,
    /// The next word is x.
    GoodLeft,
    /// The previous word is x.
    GoodRight,
}

impl Affix {
    fn parse(s: &str) -> Option<Affix> {
        Some(match s {
            "char" => Affix::Char,
            "haspref" => Affix::HasPrefix,
            "hassuf" => Affix::HasSuffix,
            "addpref" => Affix::AddPrefix,
            "addsuf" => Affix::AddSuffix,
            "deletepref" => Affix::DeletePrefix,
            "deletesuf" => Affix::DeleteSuffix,
            "goodleft" => Affix::GoodLeft,
            "goodright" => Affix::GoodRight,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
struct MorphRule {
    /// Only fires on tokens currently tagged this.
    when: Option<String>,
    x: String,
    cmd: Affix,
    tag: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ctx {
    PrevTag,
    NextTag,
    Prev2Tag,
    Next2Tag,
    Prev1Or2Tag,
    Next1Or2Tag,
    Prev1Or2Or3Tag,
    Next1Or2Or3Tag,
    SurroundTag,
    CurWd,
    PrevWd,
    NextWd,
    Prev1Or2Wd,
    Next1Or2Wd,
    PrevWdTag,
    NextWdTag,
    WdPrevTag,
    WdNextTag,
    WdAnd2Aft,
    WdAnd2TagBfr,
    WdAnd2TagAft,
    LBigram,
    RBigram,
    PrevBigram,
    NextBigram,
}

impl Ctx {
    fn parse(s: &str) -> Option<Ctx> {
        Some(match s.to_ascii_lowercase().as_str() {
            "prevtag" => Ctx::PrevTag,
            "nexttag" => Ctx::NextTag,
            "prev2tag" => Ctx::Prev2Tag,
            "next2tag" => Ctx::Next2Tag,
            "prev1or2tag" => Ctx::Prev1Or2Tag,
            "next1or2tag" => Ctx::Next1Or2Tag,
            "prev1or2or3tag" => Ctx::Prev1Or2Or3Tag,
            "next1or2or3tag" => Ctx::Next1Or2Or3Tag,
            "surroundtag" => Ctx::SurroundTag,
            "curwd" => Ctx::CurWd,
            "prevwd" => Ctx::PrevWd,
            "nextwd" => Ctx::NextWd,
            "prev1or2wd" => Ctx::Prev1Or2Wd,
            "next1or2wd" => Ctx::Next1Or2Wd,
            "prevwdtag" => Ctx::PrevWdTag,
            "nextwdtag" => Ctx::NextWdTag,
            "wdprevtag" => Ctx::WdPrevTag,
            "wdnexttag" => Ctx::WdNextTag,
            "wdand2aft" => Ctx::WdAnd2Aft,
            "wdand2tagbfr" => Ctx::WdAnd2TagBfr,
            "wdand2tagaft" => Ctx::WdAnd2TagAft,
            "lbigram" => Ctx::LBigram,
            "rbigram" => Ctx::RBigram,
            "prevbigram" => Ctx::PrevBigram,
            "nextbigram" => Ctx::NextBigram,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
struct ContextRule {
    /// `*` matches any tag.
    from: String,
    to: String,
    cmd: Ctx,
    x: String,
    y: String,
}

#[derive(Debug, Clone)]
pub struct Tagger {
    lexicon: HashMap<String, String>,
    morphology: Vec<MorphRule>,
    context: Vec<ContextRule>,
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with(";;;") && !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split_whitespace().collect()))
}

impl Tagger {
    /// The bundled lexicon and rules, parsed once.
    pub fn bundled() -> &'static Tagger {
        static TAGGER: OnceLock<Tagger> = OnceLock::new();
        TAGGER.get_or_init(|| {
            let mut lexicon = String::new();
            GzDecoder::new(LEXICON)
                .read_to_string(&mut lexicon)
                .expect("bundled lexicon is valid gzip and UTF-8");
            Tagger::parse(&lexicon, MORPHOLOGY, CONTEXT).expect("bundled tagger data parses")
        })
    }

    /// Lexicon lines are `word TAG` (a `|`-separated tag list keeps its first
    /// tag); affix rules are `x cmd [n] TAG x` or `TAG x fcmd [n] TAG x`;
    /// contextual rules are `FROM TO CMD x [y]`. Lines starting `;;;` are
    /// comments.
    pub fn parse(lexicon: &str, morphology: &str, context: &str) -> Result<Self, String> {
        let mut lex = HashMap::new();
        for (n, f) in data_lines(lexicon) {
            let [word, tags] = f[..] else {
                return Err(format!("lexicon line {n}: expected `word TAG`"));
            };
            let tag = tags.split('|').next().unwrap_or(tags);
            lex.insert(word.to_owned(), tag.to_owned());
        }
        let mut morph = Vec::new();
        for (n, f) in data_lines(morphology) {
            // the command is the second field, or the third when prefixed with f
            let rule = match (f.get(1).and_then(|c| Affix::parse(c)), f.get(2)) {
                (Some(cmd), _) if f.len() >= 4 => MorphRule {
                    when: None,
                    x: f[0].to_owned(),
                    cmd,
                    tag: f[f.len() - 2].to_owned(),
                },
                (None, Some(c))
                    if f.len() >= 5 && c.starts_with('f') && Affix::parse(&c[1..]).is_some() =>
                {
                    MorphRule {
                        when: Some(f[0].to_owned()),
                        x: f[1].to_owned(),
                        cmd: Affix::parse(&c[1..]).expect("checked"),
                        tag: f[f.len() - 2].to_owned(),
                    }
                }
                _ => return Err(format!("morphology line {n}: unrecognized rule")),
            };
            morph.push(rule);
        }
        let mut ctx = Vec::new();
        for (n, f) in data_lines(context) {
            let (from, to, cmd, x, y) = match f[..] {
                [a, b, c, x] => (a, b, c, x, ""),
                [a, b, c, x, y] => (a, b, c, x, y),
                _ => return Err(format!("context line {n}: expected 4 or 5 fields")),
            };
            let cmd = Ctx::parse(cmd)
                .ok_or_else(|| format!("context line {n}: unknown command {cmd:?}"))?;
            ctx.push(ContextRule {
                from: from.to_owned(),
                to: to.to_owned(),
                cmd,
                x: x.to_owned(),
                y: y.to_owned(),
            });
        }
        Ok(Self {
            lexicon: lex,
            morphology: morph,
            context: ctx,
        })
    }

    pub fn lexicon_tag(&self, word: &str) -> Option<&str> {
        self.lexicon.get(word).map(String::as_str)
    }

    /// Tags case-preserved tokens.
    pub fn tag<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<String> {
        let words: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        let mut tags: Vec<Option<String>> = words
            .iter()
            .enumerate()
            .map(|(i, w)| {
                self.lexicon
                    .get(*w)
                    .or_else(|| {
                        if i == 0 {
                            self.lexicon.get(&w.to_lowercase())
                        } else {
                            None
                        }
                    })
                    .cloned()
            })
            .collect();
        for i in 0..words.len() {
            if tags[i].is_some() {
                continue;
            }
            let w = words[i];
            let tag = if is_title(w) {
                "NNP".to_owned()
            } else if is_number(w) {
                "CD".to_owned()
            } else {
                let prev = i.checked_sub(1).map(|j| words[j]);
                let next = words.get(i + 1).copied();
                self.morph(w, prev, next)
            };
            tags[i] = Some(tag);
        }
        let mut tags: Vec<String> = tags
            .into_iter()
            .map(|t| t.expect("every token tagged"))
            .collect();
        self.apply_context(&words, &mut tags);
        tags
    }

    fn morph(&self, w: &str, prev: Option<&str>, next: Option<&str>) -> String {
        let mut tag = "NN".to_owned();
        for r in &self.morphology {
            if r.when.as_ref().is_some_and(|t| *t != tag) {
                continue;
            }
            let x = r.x.as_str();
            let hit = match r.cmd {
                Affix::Char => w.contains(x),
                Affix::HasPrefix => w.starts_with(x),
                Affix::HasSuffix => w.ends_with(x),
                Affix::AddPrefix => self.lexicon.contains_key(&format!("{x}{w}")),
                Affix::AddSuffix => self.lexicon.contains_key(&format!("{w}{x}")),
                Affix::DeletePrefix => w
                    .strip_prefix(x)
                    .is_some_and(|s| self.lexicon.contains_key(s)),
                Affix::DeleteSuffix => w
                    .strip_suffix(x)
                    .is_some_and(|s| self.lexicon.contains_key(s)),
                Affix::GoodLeft => next == Some(x),
                Affix::GoodRight => prev == Some(x),
            };
            if hit {
                tag.clone_from(&r.tag);
            }
        }
        tag
    }

    fn apply_context(&self, words: &[&str], tags: &mut [String]) {
        let n = words.len();
        let word = |k: isize| -> &str {
            if k < 0 || k >= n as isize {
                PAD
            } else {
                words[k as usize]
            }
        };
        for i in 0..n {
            for r in &self.context {
                if r.from != "*" && r.from != tags[i] {
                    continue;
                }
                let k = i as isize;
                let tag = |d: isize| -> &str {
                    let j = k + d;
                    if j < 0 || j >= n as isize {
                        PAD
                    } else {
                        tags[j as usize].as_str()
                    }
                };
                let (x, y) = (r.x.as_str(), r.y.as_str());
                let hit = match r.cmd {
                    Ctx::PrevTag => x == tag(-1),
                    Ctx::NextTag => x == tag(1),
                    Ctx::Prev2Tag => x == tag(-2),
                    Ctx::Next2Tag => x == tag(2),
                    Ctx::Prev1Or2Tag => x == tag(-1) || x == tag(-2),
                    Ctx::Next1Or2Tag => x == tag(1) || x == tag(2),
                    Ctx::Prev1Or2Or3Tag => x == tag(-1) || x == tag(-2) || x == tag(-3),
                    Ctx::Next1Or2Or3Tag => x == tag(1) || x == tag(2) || x == tag(3),
                    Ctx::SurroundTag => x == tag(-1) && y == tag(1),
                    Ctx::CurWd => x == word(k),
                    Ctx::PrevWd => x == word(k - 1),
                    Ctx::NextWd => x == word(k + 1),
                    Ctx::Prev1Or2Wd => x == word(k - 1) || x == word(k - 2),
                    Ctx::Next1Or2Wd => x == word(k + 1) || x == word(k + 2),
                    Ctx::PrevWdTag => x == word(k - 1) && y == tag(-1),
                    Ctx::NextWdTag => x == word(k + 1) && y == tag(1),
                    Ctx::WdPrevTag => x == tag(-1) && y == word(k),
                    Ctx::WdNextTag => x == word(k) && y == tag(1),
                    Ctx::WdAnd2Aft => x == word(k) && y == word(k + 2),
                    Ctx::WdAnd2TagBfr => x == tag(-2) && y == word(k),
                    Ctx::WdAnd2TagAft => x == word(k) && y == tag(2),
                    Ctx::LBigram => x == word(k - 1) && y == word(k),
                    Ctx::RBigram => x == word(k) && y == word(k + 1),
                    Ctx::PrevBigram => x == tag(-2) && y == tag(-1),
                    Ctx::NextBigram => x == tag(1) && y == tag(2),
                };
                if hit {
                    tags[i].clone_from(&r.to);
                }
            }
        }
    }
}

/// Capitalized in the title-case sense: every uppercase letter follows an
/// uncased character and every lowercase letter follows a cased one.
fn is_title(w: &str) -> bool {
    let mut cased = false;
    let mut prev_cased = false;
    for c in w.chars() {
        if c.is_uppercase() {
            if prev_cased {
                return false;
            }
            prev_cased = true;
            cased = true;
        } else if c.is_lowercase() {
            if !prev_cased {
                return false;
            }
            prev_cased = true;
            cased = true;
        } else {
            prev_cased = false;
        }
    }
    cased
}

fn is_number(w: &str) -> bool {
    !w.is_empty()
        && w.chars()
            .all(|c| c.is_ascii_digit() || "-,.:/%$".contains(c))
}
