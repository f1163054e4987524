use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

/// How text is split into units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// One token per Unicode scalar value, whitespace dropped.
    Character,
    /// Maximal runs of non-whitespace.
    Whitespace,
}

/// Target languages that are segmented by character rather than whitespace.
const CHARACTER_LANGUAGES: &[&str] = &["zh", "ja"];

impl Scheme {
    pub fn for_language(lang: &str) -> Scheme {
        if CHARACTER_LANGUAGES.contains(&lang) {
            Scheme::Character
        } else {
            Scheme::Whitespace
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSeq {
    pub tokens: Vec<String>,
    pub scheme: Scheme,
}

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn from_tokens<S: Into<String>>(tokens: impl IntoIterator<Item = S>, scheme: Scheme) -> Self {
        TokenSeq {
            tokens: tokens.into_iter().map(Into::into).collect(),
            scheme,
        }
    }
}

/// Tokenizes `text` after NFC normalization.
pub fn tokenize(text: &str, scheme: Scheme) -> TokenSeq {
    let normalized: String = text.nfc().collect();
    let tokens = match scheme {
        Scheme::Character => normalized
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(String::from)
            .collect(),
        Scheme::Whitespace => normalized.split_whitespace().map(String::from).collect(),
    };
    TokenSeq { tokens, scheme }
}

/// Byte offset in `text` just past the first `count` tokens, so that
/// `&text[..offset]` is a prefix of the original string covering exactly
/// those tokens. Offsets refer to the NFC form of the text.
pub fn prefix_end(text: &str, scheme: Scheme, count: usize) -> usize {
    if count == 0 {
        return 0;
    }
    let mut seen = 0;
    let mut in_token = false;
    for (i, c) in text.char_indices() {
        let ws = c.is_whitespace();
        match scheme {
            Scheme::Character => {
                if !ws {
                    seen += 1;
                    if seen == count {
                        return i + c.len_utf8();
                    }
                }
            }
            Scheme::Whitespace => {
                if ws && in_token {
                    in_token = false;
                    seen += 1;
                    if seen == count {
                        return i;
                    }
                } else if !ws {
                    in_token = true;
                }
            }
        }
    }
    text.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_segmentation() {
        let t = tokenize("明天下雨", Scheme::Character);
        assert_eq!(t.tokens, ["明", "天", "下", "雨"]);
        assert_eq!(tokenize("明 天", Scheme::Character).tokens, ["明", "天"]);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("", Scheme::Character).is_empty());
        assert!(tokenize("", Scheme::Whitespace).is_empty());
        assert!(tokenize("  \t ", Scheme::Whitespace).is_empty());
    }

    #[test]
    fn whitespace_collapse_keeps_punctuation() {
        assert_eq!(tokenize("a  b", Scheme::Whitespace).tokens, ["a", "b"]);
        assert_eq!(tokenize("Hello, world.", Scheme::Whitespace).tokens, ["Hello,", "world."]);
    }

    #[test]
    fn nfc_normalization() {
        // e + combining acute composes to a single scalar
        let t = tokenize("e\u{0301}", Scheme::Character);
        assert_eq!(t.tokens, ["\u{e9}"]);
    }

    #[test]
    fn whitespace_retokenization_is_idempotent() {
        let t = tokenize(" the  cat\tsat \n", Scheme::Whitespace);
        let again = tokenize(&t.tokens.join(" "), Scheme::Whitespace);
        assert_eq!(t, again);
    }

    #[test]
    fn prefix_offsets() {
        let s = "the cat  sat down";
        assert_eq!(&s[..prefix_end(s, Scheme::Whitespace, 2)], "the cat");
        assert_eq!(&s[..prefix_end(s, Scheme::Whitespace, 4)], s);
        assert_eq!(prefix_end(s, Scheme::Whitespace, 0), 0);
        let z = "明天 下雨";
        assert_eq!(&z[..prefix_end(z, Scheme::Character, 3)], "明天 下");
    }

    #[test]
    fn language_schemes() {
        assert_eq!(Scheme::for_language("zh"), Scheme::Character);
        assert_eq!(Scheme::for_language("en"), Scheme::Whitespace);
    }
}
