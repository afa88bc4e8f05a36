//! Suffix-stripping stemmer.
//!
//! A deliberately small rule table: plural `-s`/`-es`, `-ing` and `-ed`, each
//! only when at least three characters of stem remain. Rules are re-applied
//! until none fires, which makes the stemmer idempotent.

const MIN_STEM: usize = 3;

fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// One pass of the rule table. Returns `None` when no rule fires.
fn strip_once(word: &str) -> Option<&str> {
    if word.ends_with("ss") {
        return None;
    }
    if let Some(stem) = word.strip_suffix("ing") {
        if char_len(stem) >= MIN_STEM {
            return Some(stem);
        }
    }
    if let Some(stem) = word.strip_suffix("ed") {
        if char_len(stem) >= MIN_STEM {
            return Some(stem);
        }
    }
    if let Some(stem) = word.strip_suffix("es") {
        let sibilant = ["s", "x", "z", "ch", "sh"].iter().any(|s| stem.ends_with(s));
        if sibilant && char_len(stem) >= MIN_STEM {
            return Some(stem);
        }
    }
    if let Some(stem) = word.strip_suffix('s') {
        if !stem.ends_with('u') && !stem.ends_with('i') && !stem.ends_with('s') && char_len(stem) >= MIN_STEM {
            return Some(stem);
        }
    }
    None
}

pub fn stem_word(word: &str) -> String {
    let mut current = word;
    while let Some(next) = strip_once(current) {
        current = next;
    }
    current.to_string()
}

pub fn stem(tokens: &[String]) -> Vec<String> {
    tokens.iter().map(|t| stem_word(t)).collect()
}
