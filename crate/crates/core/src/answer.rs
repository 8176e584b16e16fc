//! Final-answer extraction from sampled reasoning text.
//!
//! Answers are normalized into a canonical decimal string (numeric tasks) or
//! an uppercase option label (multiple choice), so that downstream clustering
//! and grading can compare answers by exact string equality. No floating
//! point ever enters the comparison path.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::record::TaskType;

/// Cue phrase used to locate the final answer in numeric reasoning text.
pub const DEFAULT_ANSWER_CUE: &str = "answer is";

/// Half-open character range into the sample text.
pub type Span = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerKind {
    Numeric,
    Option,
    Invalid,
}

/// A fully normalized answer, comparable by exact equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalAnswer {
    pub kind: AnswerKind,
    pub value: String,
}

impl CanonicalAnswer {
    pub fn numeric(value: impl Into<String>) -> Self {
        Self {
            kind: AnswerKind::Numeric,
            value: value.into(),
        }
    }

    pub fn option(label: impl Into<String>) -> Self {
        Self {
            kind: AnswerKind::Option,
            value: label.into(),
        }
    }

    pub fn invalid() -> Self {
        Self {
            kind: AnswerKind::Invalid,
            value: String::new(),
        }
    }

    pub fn is_invalid(&self) -> bool {
        self.kind == AnswerKind::Invalid
    }
}

impl std::fmt::Display for CanonicalAnswer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            AnswerKind::Invalid => write!(f, "<invalid>"),
            _ => write!(f, "{}", self.value),
        }
    }
}

const CURRENCY: [char; 4] = ['$', '€', '£', '¥'];

/// Normalize one numeric literal to its canonical decimal string.
///
/// Accepted grammar: optional sign, optional currency symbol, digits with
/// optional comma thousands separators, optional decimal part, optional
/// trailing percent sign. Canonicalization strips symbols and separators,
/// removes leading integer zeros and trailing fractional zeros, and maps
/// "-0" to "0". A trailing "%" is dropped without rescaling. Anything
/// outside the grammar (including scientific notation) is `invalid`.
pub fn canonicalize_numeric(raw: &str) -> CanonicalAnswer {
    let s = raw.trim();
    let chars: Vec<char> = s.chars().collect();
    let mut pos = 0;

    let mut negative = false;
    let mut saw_sign = false;
    if pos < chars.len() && (chars[pos] == '-' || chars[pos] == '+') {
        negative = chars[pos] == '-';
        saw_sign = true;
        pos += 1;
    }
    if pos < chars.len() && CURRENCY.contains(&chars[pos]) {
        pos += 1;
        // Currency-then-sign form, e.g. "$-5".
        if !saw_sign && pos < chars.len() && (chars[pos] == '-' || chars[pos] == '+') {
            negative = chars[pos] == '-';
            pos += 1;
        }
    }

    // Integer digits, possibly in comma groups of three.
    let mut groups: Vec<String> = vec![String::new()];
    while pos < chars.len() {
        let c = chars[pos];
        if c.is_ascii_digit() {
            groups.last_mut().unwrap().push(c);
            pos += 1;
        } else if c == ',' {
            groups.push(String::new());
            pos += 1;
        } else {
            break;
        }
    }
    let grouping_ok = if groups.len() == 1 {
        !groups[0].is_empty()
    } else {
        !groups[0].is_empty()
            && groups[0].len() <= 3
            && groups[1..].iter().all(|g| g.len() == 3)
    };
    if !grouping_ok {
        return CanonicalAnswer::invalid();
    }
    let int_digits: String = groups.concat();

    let mut frac_digits = String::new();
    if pos < chars.len() && chars[pos] == '.' {
        pos += 1;
        while pos < chars.len() && chars[pos].is_ascii_digit() {
            frac_digits.push(chars[pos]);
            pos += 1;
        }
        if frac_digits.is_empty() {
            return CanonicalAnswer::invalid();
        }
    }

    if pos < chars.len() && chars[pos] == '%' {
        pos += 1;
    }
    if pos != chars.len() {
        return CanonicalAnswer::invalid();
    }

    let int_trimmed = int_digits.trim_start_matches('0');
    let int_part = if int_trimmed.is_empty() { "0" } else { int_trimmed };
    let frac_part = frac_digits.trim_end_matches('0');

    let is_zero = int_part == "0" && frac_part.is_empty();
    let mut value = String::new();
    if negative && !is_zero {
        value.push('-');
    }
    value.push_str(int_part);
    if !frac_part.is_empty() {
        value.push('.');
        value.push_str(frac_part);
    }
    CanonicalAnswer::numeric(value)
}

/// Extract the final answer from one sampled reasoning path.
///
/// Numeric tasks return the last numeric literal in the text, except that
/// when the cue phrase occurs, the first literal after its last occurrence
/// wins. Multiple-choice tasks return the last standalone option label, or
/// the option whose text matches the last numeric literal. The span (in
/// characters, half-open) covers the matched literal or label. Unparseable
/// text yields `invalid` with no span, never an error.
pub fn extract_answer(
    text: &str,
    task_type: TaskType,
    choices: Option<&BTreeMap<String, String>>,
    cue: &str,
) -> (CanonicalAnswer, Option<Span>) {
    let chars: Vec<char> = text.chars().collect();
    match task_type {
        TaskType::Numeric => extract_numeric(text, &chars, cue),
        TaskType::MultipleChoice => match choices {
            Some(choices) if !choices.is_empty() => extract_option(text, &chars, choices),
            _ => (CanonicalAnswer::invalid(), None),
        },
    }
}

fn extract_numeric(text: &str, chars: &[char], cue: &str) -> (CanonicalAnswer, Option<Span>) {
    let literals = numeric_literals(text, chars);
    if literals.is_empty() {
        return (CanonicalAnswer::invalid(), None);
    }
    let chosen = match last_cue_end(chars, cue) {
        Some(cue_end) => literals
            .iter()
            .find(|(start, _)| *start >= cue_end)
            .or_else(|| literals.last()),
        None => literals.last(),
    };
    let &(start, end) = chosen.expect("non-empty literal list");
    let literal: String = chars[start..end].iter().collect();
    let canon = canonicalize_numeric(&literal);
    if canon.is_invalid() {
        return (CanonicalAnswer::invalid(), None);
    }
    (canon, Some((start, end)))
}

fn extract_option(
    text: &str,
    chars: &[char],
    choices: &BTreeMap<String, String>,
) -> (CanonicalAnswer, Option<Span>) {
    // Last standalone (word-delimited) occurrence of any option label.
    let folded = fold_chars(chars);
    let mut best: Option<(usize, usize, &str)> = None;
    for label in choices.keys() {
        let label_chars: Vec<char> = label.chars().collect();
        let needle = fold_chars(&label_chars);
        if needle.is_empty() {
            continue;
        }
        for start in find_all(&folded, &needle) {
            let end = start + needle.len();
            let left_ok = start == 0 || !is_word_char(chars[start - 1]);
            let right_ok = end == chars.len() || !is_word_char(chars[end]);
            if left_ok && right_ok && best.map_or(true, |(s, e, _)| (start, end) > (s, e)) {
                best = Some((start, end, label.as_str()));
            }
        }
    }
    if let Some((start, end, label)) = best {
        return (
            CanonicalAnswer::option(label.to_uppercase()),
            Some((start, end)),
        );
    }

    // Fall back to matching the last numeric literal against option texts.
    if let Some(&(start, end)) = numeric_literals(text, chars).last() {
        let literal: String = chars[start..end].iter().collect();
        let canon = canonicalize_numeric(&literal);
        if !canon.is_invalid() {
            for (label, option_text) in choices {
                if canonicalize_numeric(option_text) == canon {
                    return (
                        CanonicalAnswer::option(label.to_uppercase()),
                        Some((start, end)),
                    );
                }
            }
        }
    }
    (CanonicalAnswer::invalid(), None)
}

fn numeric_core_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?%?").expect("static regex")
    })
}

/// All well-delimited numeric literal spans in the text, in char coordinates,
/// sorted by position. Each span includes any attached sign or currency symbol.
fn numeric_literals(text: &str, chars: &[char]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut char_at = 0;
    let mut byte_at = 0;
    let mut to_char_idx = |byte_idx: usize, chars_len: usize| -> usize {
        // Matches arrive in increasing byte order, so a running cursor works.
        while byte_at < byte_idx {
            byte_at += text[byte_at..].chars().next().map_or(1, char::len_utf8);
            char_at += 1;
        }
        char_at.min(chars_len)
    };

    for m in numeric_core_regex().find_iter(text) {
        let start = to_char_idx(m.start(), chars.len());
        let end = to_char_idx(m.end(), chars.len());

        // A literal glued to a word or to another number fragment is noise
        // ("1e3", "v2.5"), not an answer.
        if start > 0 {
            let prev = chars[start - 1];
            if prev.is_alphanumeric() || prev == '.' || prev == ',' {
                continue;
            }
        }
        if end < chars.len() && chars[end].is_alphanumeric() {
            continue;
        }

        let mut adj_start = start;
        if adj_start > 0 && CURRENCY.contains(&chars[adj_start - 1]) {
            adj_start -= 1;
        }
        if adj_start > 0 && (chars[adj_start - 1] == '-' || chars[adj_start - 1] == '+') {
            // Only a unary sign counts; "5-3" keeps the minus as an operator.
            let before_sign_ok = adj_start < 2 || {
                let c = chars[adj_start - 2];
                !(c.is_alphanumeric() || c == '.')
            };
            if before_sign_ok {
                adj_start -= 1;
            }
        }
        spans.push((adj_start, end));
    }
    spans
}

/// Char index just past the last case-insensitive occurrence of `cue`.
fn last_cue_end(chars: &[char], cue: &str) -> Option<usize> {
    let cue_chars: Vec<char> = cue.chars().collect();
    let needle = fold_chars(&cue_chars);
    if needle.is_empty() {
        return None;
    }
    let haystack = fold_chars(chars);
    find_all(&haystack, &needle)
        .last()
        .map(|start| start + needle.len())
}

/// Per-char case fold that preserves indices (takes the first lowercase
/// mapping of each char).
fn fold_chars(chars: &[char]) -> Vec<char> {
    chars
        .iter()
        .map(|c| c.to_lowercase().next().unwrap_or(*c))
        .collect()
}

fn find_all(haystack: &[char], needle: &[char]) -> Vec<usize> {
    if needle.is_empty() || haystack.len() < needle.len() {
        return Vec::new();
    }
    (0..=haystack.len() - needle.len())
        .filter(|&i| &haystack[i..i + needle.len()] == needle)
        .collect()
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}
