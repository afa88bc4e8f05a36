use std::collections::HashSet;

use super::stem;

/// Negations merged into the following token, and multiplied by -0.5 in the counting baseline.
pub const DEFAULT_NEGATIONS: [&str; 10] = [
    "not", "no", "never", "cannot", "neither", "nor", "without", "hardly", "barely", "n't",
];

/// Amplifiers doubling the value of the following sentiment word in the counting baseline.
pub const DEFAULT_AMPLIFIERS: [&str; 4] = ["very", "really", "extremely", "absolutely"];

/// Prefix marking a token that was preceded by a negation.
pub const NEGATION_PREFIX: &str = "neg";

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

/// Split a plain-text word list on newlines and commas. Blank entries and
/// `#` comment lines are ignored.
pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.starts_with('#'))
        .flat_map(|l| l.split(','))
        .map(|w| w.trim().to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessConfig {
    pub stopwords: HashSet<String>,
    pub negations: Vec<String>,
    pub amplifiers: Vec<String>,
    /// Never removed as stopwords. Always contains the negations and amplifiers.
    pub protected: HashSet<String>,
    pub stemming: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self::new(
            parse_word_list(DEFAULT_STOPWORDS),
            DEFAULT_NEGATIONS.iter().map(|s| s.to_string()).collect(),
            DEFAULT_AMPLIFIERS.iter().map(|s| s.to_string()).collect(),
            true,
        )
    }
}

impl PreprocessConfig {
    pub fn new(
        stopwords: impl IntoIterator<Item = String>,
        negations: Vec<String>,
        amplifiers: Vec<String>,
        stemming: bool,
    ) -> Self {
        let protected = negations.iter().chain(amplifiers.iter()).cloned().collect();
        PreprocessConfig {
            stopwords: stopwords.into_iter().collect(),
            negations,
            amplifiers,
            protected,
            stemming,
        }
    }

    /// Protect additional words (typically every word of a sentiment lexicon).
    pub fn protect<I, S>(&mut self, words: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.protected.extend(words.into_iter().map(Into::into));
    }

    pub fn is_negation(&self, token: &str) -> bool {
        self.negations.iter().any(|n| n == token)
    }

    pub fn is_amplifier(&self, token: &str) -> bool {
        self.amplifiers.iter().any(|a| a == token)
    }
}

fn strip_html_tags(raw: &str) -> std::borrow::Cow<'_, str> {
    if !raw.contains('<') {
        return raw.into();
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(open) = rest.find('<') {
        out.push_str(&rest[..open]);
        match rest[open..].find('>') {
            Some(close) => {
                out.push(' ');
                rest = &rest[open + close + 1..];
            }
            None => {
                out.push_str(&rest[open..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out.into()
}

fn contraction_head(head: &str) -> &str {
    match head {
        "ca" => "can",
        "wo" => "will",
        "sha" => "shall",
        other => other,
    }
}

fn push_word(word: &str, out: &mut Vec<String>) {
    let word = word.trim_matches('\'');
    if word.is_empty() {
        return;
    }
    let lower = word.to_lowercase();
    if let Some(head) = lower.strip_suffix("n't") {
        let head = contraction_head(head);
        if !head.is_empty() {
            out.extend(head.split('\'').filter(|p| !p.is_empty()).map(str::to_string));
        }
        out.push("n't".to_string());
        return;
    }
    out.extend(lower.split('\'').filter(|p| !p.is_empty()).map(str::to_string));
}

/// Lowercase word tokens. Words are maximal runs of letters (apostrophes
/// allowed inside); everything else, digits included, is a separator.
/// `n't` contractions are split off as their own token.
pub fn tokenize(raw: &str) -> Vec<String> {
    let text = strip_html_tags(raw);
    let mut out = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        if c.is_alphabetic() && !c.is_numeric() {
            word.push(c);
        } else if (c == '\'' || c == '\u{2019}') && !word.is_empty() {
            word.push('\'');
        } else if !word.is_empty() {
            push_word(&word, &mut out);
            word.clear();
        }
    }
    if !word.is_empty() {
        push_word(&word, &mut out);
    }
    out
}

/// Replace every negation and the token after it by the single token
/// `"neg" + next`. Resolves left to right; a trailing negation is dropped.
pub fn merge_negations(tokens: &[String], negations: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut iter = tokens.iter();
    while let Some(token) = iter.next() {
        if negations.iter().any(|n| n == token) {
            if let Some(next) = iter.next() {
                out.push(format!("{NEGATION_PREFIX}{next}"));
            }
        } else {
            out.push(token.clone());
        }
    }
    out
}

pub fn remove_stopwords(tokens: &[String], config: &PreprocessConfig) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| {
            !config.stopwords.contains(t.as_str())
                || config.protected.contains(t.as_str())
                || t.starts_with(NEGATION_PREFIX)
        })
        .cloned()
        .collect()
}

fn finish(tokens: Vec<String>, config: &PreprocessConfig) -> Vec<String> {
    let tokens = remove_stopwords(&tokens, config);
    if config.stemming {
        stem::stem(&tokens)
    } else {
        tokens
    }
}

/// Token view used by the embedding method: negations merged.
pub fn preprocess(raw: &str, config: &PreprocessConfig) -> Vec<String> {
    finish(merge_negations(&tokenize(raw), &config.negations), config)
}

/// Token view used by the counting baseline: negations kept as separate tokens.
pub fn preprocess_baseline(raw: &str, config: &PreprocessConfig) -> Vec<String> {
    finish(tokenize(raw), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    fn negations() -> Vec<String> {
        toks(&DEFAULT_NEGATIONS)
    }

    #[test]
    fn default_lists_have_expected_sizes() {
        let config = PreprocessConfig::default();
        assert_eq!(config.negations.len(), 10);
        assert_eq!(config.amplifiers.len(), 4);
        assert_eq!(config.stopwords.len(), 179);
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Not bad!!"), toks(&["not", "bad"]));
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("I rate it 10"), toks(&["i", "rate", "it"]));
        assert_eq!(tokenize("route66 -- 42!"), toks(&["route"]));
    }

    #[test]
    fn tokenize_contractions_and_tags() {
        assert_eq!(tokenize("I don't like it"), toks(&["i", "do", "n't", "like", "it"]));
        assert_eq!(tokenize("Can't, won't"), toks(&["can", "n't", "will", "n't"]));
        assert_eq!(tokenize("great<br /><br />film"), toks(&["great", "film"]));
        assert_eq!(tokenize("it's 'quoted'"), toks(&["it", "s", "quoted"]));
        assert_eq!(tokenize("Ärger über"), toks(&["ärger", "über"]));
    }

    #[test]
    fn merge_examples() {
        assert_eq!(merge_negations(&toks(&["not", "bad"]), &negations()), toks(&["negbad"]));
        assert_eq!(merge_negations(&toks(&["bad"]), &negations()), toks(&["bad"]));
        assert_eq!(
            merge_negations(&toks(&["never", "happy", "again"]), &negations()),
            toks(&["neghappy", "again"])
        );
        assert_eq!(merge_negations(&toks(&["not", "not", "bad"]), &negations()), toks(&["negnot", "bad"]));
        assert_eq!(merge_negations(&toks(&["good", "not"]), &negations()), toks(&["good"]));
    }

    #[test]
    fn stopword_examples() {
        let config = PreprocessConfig::default();
        assert_eq!(remove_stopwords(&toks(&["it", "is", "negbad"]), &config), toks(&["negbad"]));
        assert_eq!(remove_stopwords(&toks(&["very", "good"]), &config), toks(&["very", "good"]));
        assert!(remove_stopwords(&[], &config).is_empty());
    }

    #[test]
    fn protected_lexicon_words_survive() {
        let mut config = PreprocessConfig::default();
        assert!(remove_stopwords(&toks(&["against"]), &config).is_empty());
        config.protect(["against"]);
        assert_eq!(remove_stopwords(&toks(&["against"]), &config), toks(&["against"]));
    }

    #[test]
    fn preprocess_examples() {
        let config = PreprocessConfig::default();
        assert_eq!(preprocess("This is not bad.", &config), toks(&["negbad"]));
        assert!(preprocess("", &config).is_empty());
        assert_eq!(preprocess("Great great great", &config), toks(&["great", "great", "great"]));
        assert_eq!(preprocess("I don't like the movies", &config), toks(&["neglike", "movie"]));
        assert_eq!(preprocess_baseline("This is not bad.", &config), toks(&["not", "bad"]));
    }

    #[test]
    fn word_list_parsing() {
        assert_eq!(parse_word_list("# c\nnot, no\nnever\n\n"), toks(&["not", "no", "never"]));
    }

    proptest! {
        #[test]
        fn tokens_are_lowercase_and_wordlike(raw in "\\PC{0,80}") {
            for t in tokenize(&raw) {
                prop_assert!(!t.is_empty());
                prop_assert!(t.chars().any(char::is_alphabetic));
                prop_assert!(!t.chars().any(|c| c.is_numeric()));
                prop_assert_eq!(t.to_lowercase(), t.clone());
            }
        }

        #[test]
        fn merge_count_accounting(words in proptest::collection::vec(
            prop_oneof![Just("not"), Just("never"), Just("good"), Just("bad"), Just("film")], 0..30)) {
            let tokens = toks(&words);
            let negs = negations();
            let merged = merge_negations(&tokens, &negs);
            // replay the consumption rule to count merges and dangling negations
            let (mut merges, mut dangling, mut i) = (0, 0, 0);
            while i < tokens.len() {
                if negs.contains(&tokens[i]) {
                    if i + 1 < tokens.len() { merges += 1; i += 2; } else { dangling += 1; i += 1; }
                } else {
                    i += 1;
                }
            }
            prop_assert!(merged.len() <= tokens.len());
            prop_assert_eq!(merged.len(), tokens.len() - merges - dangling);
        }

        #[test]
        fn no_unprotected_stopword_survives(words in proptest::collection::vec("(it|is|the|very|not|good|negbad|film|a)", 0..20)) {
            let config = PreprocessConfig::default();
            for t in remove_stopwords(&words, &config) {
                prop_assert!(!config.stopwords.contains(&t) || config.protected.contains(&t) || t.starts_with("neg"));
            }
        }

        #[test]
        fn preprocess_is_deterministic(raw in "\\PC{0,60}") {
            let config = PreprocessConfig::default();
            prop_assert_eq!(preprocess(&raw, &config), preprocess(&raw, &config));
        }
    }
}
