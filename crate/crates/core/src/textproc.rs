//! Text normalization, tokenization and stop-word filtering.
//!
//! A token is a maximal run of "word" characters of length two or more, where
//! a word character is a Unicode letter (general category L*) or a decimal
//! digit (Nd). Everything else, including `_`, separates tokens.

use std::collections::HashSet;
use std::path::Path;

use unicode_properties::{GeneralCategory, GeneralCategoryGroup, UnicodeGeneralCategory};

use crate::error::Result;

/// Lowercase `text` one scalar value at a time using the simple (1:1)
/// lowercase mapping. No locale, no context-sensitive rules.
pub fn normalize(text: &str) -> String {
    text.chars().map(simple_lowercase).collect()
}

fn simple_lowercase(c: char) -> char {
    if c.is_ascii() {
        return c.to_ascii_lowercase();
    }
    // The only multi-char lowercase mapping is U+0130, whose simple mapping
    // is the first char of the full one.
    c.to_lowercase().next().unwrap_or(c)
}

pub fn is_word_char(c: char) -> bool {
    if c.is_ascii() {
        return c.is_ascii_alphanumeric();
    }
    c.general_category_group() == GeneralCategoryGroup::Letter
        || c.general_category() == GeneralCategory::DecimalNumber
}

/// Split normalized text into tokens: maximal runs of word characters,
/// keeping runs of at least two characters. Order and duplicates are kept.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    let mut run_chars = 0usize;
    for (i, c) in text.char_indices() {
        if is_word_char(c) {
            if start.is_none() {
                start = Some(i);
                run_chars = 0;
            }
            run_chars += 1;
        } else if let Some(s) = start.take() {
            if run_chars >= 2 {
                tokens.push(text[s..i].to_string());
            }
        }
    }
    if let Some(s) = start {
        if run_chars >= 2 {
            tokens.push(text[s..].to_string());
        }
    }
    tokens
}

/// A versioned set of lowercase stop words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopList {
    words: HashSet<String>,
    list_id: String,
}

const ENGLISH: &str = include_str!("../data/english_stopwords.txt");
pub const ENGLISH_LIST_ID: &str = "english-318-v1";

impl StopList {
    /// The bundled 318-word English list.
    pub fn english() -> Self {
        StopList::parse(ENGLISH, ENGLISH_LIST_ID)
    }

    /// An empty list; nothing is removed.
    pub fn none() -> Self {
        StopList {
            words: HashSet::new(),
            list_id: "none".to_string(),
        }
    }

    /// Parse one-word-per-line text. `#` lines and blank lines are ignored and
    /// entries are lowercased.
    pub fn parse(contents: &str, list_id: &str) -> Self {
        let words = contents
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(normalize)
            .collect();
        StopList {
            words,
            list_id: list_id.to_string(),
        }
    }

    /// Read a stop-list file. The id is `file:<name>:<word count>`.
    pub fn from_path(path: &Path) -> Result<Self> {
        let contents = std::fs::read_to_string(path)?;
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut list = StopList::parse(&contents, "");
        list.list_id = format!("file:{name}:{}", list.words.len());
        Ok(list)
    }

    pub fn list_id(&self) -> &str {
        &self.list_id
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }
}

/// Drop every token that is in `stoplist`, keeping the survivors' order.
pub fn remove_stopwords(tokens: Vec<String>, stoplist: &StopList) -> Vec<String> {
    let mut tokens = tokens;
    tokens.retain(|t| !stoplist.contains(t));
    tokens
}

/// normalize → tokenize → remove_stopwords.
pub fn analyze(text: &str, stoplist: &StopList) -> Vec<String> {
    remove_stopwords(tokenize(&normalize(text)), stoplist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("The BEST  British Food"), "the best  british food");
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("GR8!!"), "gr8!!");
        assert_eq!(normalize("ÜBER Straße"), "über straße");
        assert_eq!(normalize("İ"), "i");
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            tokenize("the best british food in new york"),
            toks(&["the", "best", "british", "food", "in", "new", "york"])
        );
        assert!(tokenize("a i x").is_empty());
        assert_eq!(
            tokenize("don't stop-words 42 π"),
            toks(&["don", "stop", "words", "42"])
        );
        assert_eq!(tokenize("snake_case"), toks(&["snake", "case"]));
        assert_eq!(tokenize("über straße"), toks(&["über", "straße"]));
        assert_eq!(tokenize("x²y ½"), Vec::<String>::new());
        assert_eq!(tokenize("food food"), toks(&["food", "food"]));
    }

    #[test]
    fn english_list_is_pinned() {
        let sl = StopList::english();
        assert_eq!(sl.word_count(), 318);
        assert_eq!(sl.list_id(), ENGLISH_LIST_ID);
        assert!(sl.contains("the") && sl.contains("in"));
        assert!(!sl.contains("best") && !sl.contains("food"));
    }

    #[test]
    fn stopword_removal() {
        let sl = StopList::english();
        let t = toks(&["the", "best", "british", "food", "in", "new", "york"]);
        assert_eq!(
            remove_stopwords(t, &sl),
            toks(&["best", "british", "food", "new", "york"])
        );
        assert!(remove_stopwords(vec![], &sl).is_empty());
        assert!(remove_stopwords(toks(&["the", "and", "of"]), &sl).is_empty());
    }

    #[test]
    fn stop_list_file_format() {
        let sl = StopList::parse("# comment\nFoo\n\n  bar \n#baz\n", "x");
        assert_eq!(sl.word_count(), 2);
        assert!(sl.contains("foo") && sl.contains("bar") && !sl.contains("baz"));
    }
}
