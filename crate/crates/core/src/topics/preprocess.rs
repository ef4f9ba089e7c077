//! Tokenizer for topic modeling. Reproduces gensim's default
//! `preprocess_string` filter chain.

use std::collections::HashSet;
use std::sync::OnceLock;

use regex::Regex;

use super::porter;

const STOPWORDS_TXT: &str = include_str!("stopwords.txt");

/// Tokens shorter than this are dropped.
pub const MIN_TOKEN_CHARS: usize = 3;

/// The vendored English stopword list, one word per line.
pub fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| STOPWORDS_TXT.lines().map(str::trim).filter(|l| !l.is_empty()).collect())
}

/// Raw text of the vendored stopword file.
pub fn stopwords_source() -> &'static str {
    STOPWORDS_TXT
}

struct Patterns {
    tags: Regex,
    punct: Regex,
    whitespace: Regex,
    numeric: Regex,
}

fn patterns() -> &'static Patterns {
    static P: OnceLock<Patterns> = OnceLock::new();
    P.get_or_init(|| {
        const PUNCTUATION: &str = r##"!"#$%&'()*+,-./:;<=>?@[\]^_`{|}~"##;
        Patterns {
            tags: Regex::new(r"<([^>]+)>").unwrap(),
            punct: Regex::new(&format!("[{}]+", regex::escape(PUNCTUATION))).unwrap(),
            whitespace: Regex::new(r"\s+").unwrap(),
            numeric: Regex::new(r"[0-9]+").unwrap(),
        }
    })
}

/// Every stage except stemming: lowercase, strip tags, punctuation,
/// whitespace runs and digits, then drop stopwords and short tokens.
pub fn normalize(text: &str) -> Vec<String> {
    let p = patterns();
    let s = text.to_lowercase();
    let s = p.tags.replace_all(&s, "");
    let s = p.punct.replace_all(&s, " ");
    let s = p.whitespace.replace_all(&s, " ");
    let s = p.numeric.replace_all(&s, "");
    let stop = stopwords();
    s.split_whitespace()
        .filter(|w| !stop.contains(w))
        .filter(|w| w.chars().count() >= MIN_TOKEN_CHARS)
        .map(str::to_string)
        .collect()
}

/// Normalized, stemmed tokens in their original order.
pub fn preprocess(text: &str) -> Vec<String> {
    normalize(text).iter().map(|w| porter::stem(w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(preprocess("").is_empty());
        assert_eq!(preprocess("<b>The</b> 3 papers!!"), ["paper"]);
        assert_eq!(preprocess("tracking tracked tracks"), ["track", "track", "track"]);
    }

    #[test]
    fn digits_inside_words_are_removed() {
        assert_eq!(normalize("mp3 players, x86-64"), ["players"]);
    }

    #[test]
    fn stopword_list_size() {
        assert_eq!(stopwords().len(), 337);
    }
}
