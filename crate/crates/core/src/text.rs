//! Tokenization, normalization and stemming.
//!
//! Text is NFC-normalized and lowercased, split on whitespace, and
//! punctuation is detached into single-character tokens. Apostrophes are
//! handled per language: elision languages (French and the others) keep the
//! apostrophe on the left piece (`qu'il` becomes `qu'` `il`), English keeps
//! it on the clitic (`it's` becomes `it` `'s`).

use std::fmt;
use std::str::FromStr;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    Fr,
    De,
    Ru,
}

impl Language {
    pub const ALL: [Language; 4] = [Language::En, Language::Fr, Language::De, Language::Ru];

    pub fn code(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::Fr => "fr",
            Language::De => "de",
            Language::Ru => "ru",
        }
    }

    fn algorithm(self) -> Algorithm {
        match self {
            Language::En => Algorithm::English,
            Language::Fr => Algorithm::French,
            Language::De => Algorithm::German,
            Language::Ru => Algorithm::Russian,
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "en" => Ok(Language::En),
            "fr" => Ok(Language::Fr),
            "de" => Ok(Language::De),
            "ru" => Ok(Language::Ru),
            other => Err(Error::config(format!(
                "unsupported language {other:?} (expected en, fr, de or ru)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub surface: String,
    pub stem: String,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenSequence {
    pub tokens: Vec<Token>,
    pub language: Language,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }

    /// Surfaces joined by single spaces.
    pub fn joined(&self) -> String {
        self.surfaces().collect::<Vec<_>>().join(" ")
    }
}

/// Lowercase and NFC-normalize a word or phrase without splitting it.
pub fn normalize(text: &str) -> String {
    text.nfc()
        .collect::<String>()
        .to_lowercase()
        .nfc()
        .map(|c| if is_apostrophe(c) { '\'' } else { c })
        .collect()
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{02BC}')
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || unicode_normalization::char::is_combining_mark(c)
}

const ENGLISH_CLITICS: [&str; 7] = ["s", "t", "re", "ve", "ll", "d", "m"];

pub fn tokenize(text: &str, language: Language) -> TokenSequence {
    let normalized = normalize(text);
    let mut surfaces = Vec::new();
    for chunk in normalized.split_whitespace() {
        split_chunk(chunk, language, &mut surfaces);
    }
    let tokens = surfaces
        .into_iter()
        .enumerate()
        .map(|(position, surface)| Token {
            stem: stem(&surface, language),
            surface,
            position,
        })
        .collect();
    TokenSequence { tokens, language }
}

fn split_chunk(chunk: &str, language: Language, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut cur = String::new();
    let flush = |cur: &mut String, out: &mut Vec<String>| {
        if !cur.is_empty() {
            out.push(std::mem::take(cur));
        }
    };

    for (i, &c) in chars.iter().enumerate() {
        let prev = i.checked_sub(1).map(|j| chars[j]);
        let next = chars.get(i + 1).copied();
        if is_word_char(c) {
            cur.push(c);
        } else if c == '\'' {
            match language {
                Language::En => {
                    // The clitic is the rest of the alphanumeric run.
                    let rest: String = chars[i + 1..].iter().take_while(|c| is_word_char(**c)).collect();
                    let is_clitic = ENGLISH_CLITICS.contains(&rest.as_str());
                    flush(&mut cur, out);
                    if is_clitic {
                        cur.push('\'');
                    } else {
                        out.push("'".to_string());
                    }
                }
                _ => {
                    if cur.is_empty() {
                        out.push("'".to_string());
                    } else {
                        cur.push('\'');
                        flush(&mut cur, out);
                    }
                }
            }
        } else if joins_word(c, prev, next, &cur) {
            cur.push(c);
        } else {
            flush(&mut cur, out);
            out.push(c.to_string());
        }
    }
    flush(&mut cur, out);
}

/// Hyphens inside words and decimal separators inside numbers stay attached.
fn joins_word(c: char, prev: Option<char>, next: Option<char>, cur: &str) -> bool {
    if cur.is_empty() {
        return false;
    }
    let (Some(prev), Some(next)) = (prev, next) else {
        return false;
    };
    match c {
        '-' => is_word_char(prev) && is_word_char(next),
        '.' | ',' => prev.is_numeric() && next.is_numeric(),
        _ => false,
    }
}

/// Upper bound on stemmer re-applications; convergence takes at most a
/// handful of passes in practice.
const MAX_STEM_PASSES: usize = 64;

/// Snowball stem, re-applied until it reaches a fixed point so that
/// `stem(stem(w)) == stem(w)`.
pub fn stem(token: &str, language: Language) -> String {
    if !token.chars().any(is_word_char) {
        return token.to_string();
    }
    let stemmer = stemmer_for(language);
    let mut current = token.to_lowercase();
    for _ in 0..MAX_STEM_PASSES {
        let next = stemmer.stem(&current);
        if next.is_empty() || next == current {
            break;
        }
        current = next.into_owned();
    }
    current
}

/// Stem with the language given as a code string.
pub fn stem_code(token: &str, language: &str) -> Result<String, Error> {
    Ok(stem(token, language.parse()?))
}

fn stemmer_for(language: Language) -> &'static Stemmer {
    use std::sync::OnceLock;
    static STEMMERS: [OnceLock<Stemmer>; 4] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let idx = Language::ALL.iter().position(|l| *l == language).unwrap();
    STEMMERS[idx].get_or_init(|| Stemmer::create(language.algorithm()))
}

/// True when the token has no letters or digits.
pub fn is_punctuation(token: &str) -> bool {
    !token.chars().any(is_word_char)
}
