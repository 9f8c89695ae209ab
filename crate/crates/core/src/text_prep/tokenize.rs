//! Rule-based tokenization for space-delimited scripts (English, Pashto).
//!
//! Rules, applied to each whitespace-delimited chunk:
//!
//! 1. A chunk that is a known abbreviation, a dotted initialism (`U.S.`), a URL
//!    or an e-mail address is kept whole (URLs and e-mails still lose trailing
//!    sentence punctuation).
//! 2. Leading and trailing punctuation characters are detached one at a time,
//!    re-checking rule 1 on what remains.
//! 3. Inside the remaining core, punctuation is split off unless it joins two
//!    digits (`3.14`, `1,000`, `10:30`) or is a hyphen/apostrophe/underscore
//!    joining two alphanumerics (`well-known`, `don't`).
//!
//! Every produced token re-tokenizes to itself, so tokenization is idempotent
//! on its own output rejoined with single spaces.

const ABBREVIATIONS: &[&str] = &[
    "Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "St.", "Jr.", "Sr.", "Mt.", "vs.", "etc.", "e.g.",
    "i.e.", "a.m.", "p.m.", "No.", "no.", "Inc.", "Ltd.", "Co.", "Corp.", "Gen.", "Gov.",
    "Jan.", "Feb.", "Mar.", "Apr.", "Aug.", "Sep.", "Sept.", "Oct.", "Nov.", "Dec.", "approx.",
    "Fig.", "fig.", "Vol.", "vol.", "pp.",
];

pub(crate) fn is_abbreviation(word: &str) -> bool {
    ABBREVIATIONS.contains(&word)
}

/// Punctuation as far as token boundaries are concerned.
pub fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '«' | '»'
                | '“'
                | '”'
                | '‘'
                | '’'
                | '„'
                | '…'
                | '–'
                | '—'
                | '¡'
                | '¿'
                | '•'
                | '·'
                | '،'
                | '؛'
                | '؟'
                | '۔'
                | '٪'
                | '។'
                | '៕'
                | '៖'
                | '៘'
                | '៙'
                | '៚'
        )
}

/// Whitespace plus the zero-width separators that never belong to a token.
pub fn is_separator(c: char) -> bool {
    c.is_whitespace() || matches!(c, '\u{200B}' | '\u{FEFF}')
}

fn is_initialism(word: &str) -> bool {
    // U.S. / U.S.A. / J. : single alphanumerics each followed by a dot.
    let chars: Vec<char> = word.chars().collect();
    if chars.len() < 2 || !chars.len().is_multiple_of(2) {
        return false;
    }
    chars
        .chunks(2)
        .all(|c| c[0].is_alphabetic() && c[0].is_uppercase() && c[1] == '.')
}

fn is_url_or_email(word: &str) -> bool {
    let word = word.trim_end_matches(['.', ',', ';', ':', '!', '?', ')', '"', '\'']);
    let lower = word.to_lowercase();
    if lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.") {
        return true;
    }
    match word.split_once('@') {
        Some((user, host)) => {
            !user.is_empty()
                && host.contains('.')
                && user.chars().next().is_some_and(char::is_alphanumeric)
                && host.chars().next().is_some_and(char::is_alphanumeric)
                && host.chars().last().is_some_and(char::is_alphanumeric)
        }
        None => false,
    }
}

fn is_protected(word: &str) -> bool {
    is_abbreviation(word) || is_initialism(word)
}

/// Tokenize one whitespace-free chunk, appending to `out`.
pub(crate) fn split_chunk(chunk: &str, out: &mut Vec<String>) {
    if chunk.is_empty() {
        return;
    }
    if is_protected(chunk) {
        out.push(chunk.to_string());
        return;
    }

    let chars: Vec<char> = chunk.chars().collect();
    let mut start = 0;
    let mut end = chars.len();

    // URLs / e-mails: keep whole minus trailing sentence punctuation.
    if is_url_or_email(chunk) {
        let mut trailing = Vec::new();
        while end > start && matches!(chars[end - 1], '.' | ',' | ';' | ':' | '!' | '?' | ')' | '"' | '\'') {
            end -= 1;
            trailing.push(chars[end].to_string());
        }
        if end > start {
            out.push(chars[start..end].iter().collect());
        }
        out.extend(trailing.into_iter().rev());
        return;
    }

    let mut leading = Vec::new();
    let mut trailing = Vec::new();
    loop {
        if start >= end {
            break;
        }
        let rest: String = chars[start..end].iter().collect();
        if is_protected(&rest) {
            break;
        }
        if is_punct(chars[start]) {
            leading.push(chars[start].to_string());
            start += 1;
            continue;
        }
        if is_punct(chars[end - 1]) {
            end -= 1;
            trailing.push(chars[end].to_string());
            continue;
        }
        break;
    }

    out.extend(leading);
    if start < end {
        let core = &chars[start..end];
        let rest: String = core.iter().collect();
        if is_protected(&rest) {
            out.push(rest);
        } else {
            split_core(core, out);
        }
    }
    out.extend(trailing.into_iter().rev());
}

fn split_core(core: &[char], out: &mut Vec<String>) {
    let mut current = String::new();
    for (i, &c) in core.iter().enumerate() {
        if !is_punct(c) {
            current.push(c);
            continue;
        }
        let prev = if i > 0 { Some(core[i - 1]) } else { None };
        let next = core.get(i + 1).copied();
        let joins = match (prev, next) {
            (Some(p), Some(n)) => {
                (matches!(c, '.' | ',' | ':' | '٫' | '٬') && p.is_numeric() && n.is_numeric())
                    || (matches!(c, '-' | '\'' | '’' | '_')
                        && p.is_alphanumeric()
                        && n.is_alphanumeric())
            }
            _ => false,
        };
        if joins {
            current.push(c);
        } else {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            out.push(c.to_string());
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
}

/// Tokenize space-delimited text (English, Pashto).
pub(crate) fn tokenize_spaced(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split(is_separator) {
        split_chunk(chunk, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(s: &str) -> Vec<String> {
        tokenize_spaced(s)
    }

    #[test]
    fn detaches_punctuation() {
        assert_eq!(tok("Hello, world!"), ["Hello", ",", "world", "!"]);
        assert_eq!(tok("(quoted)"), ["(", "quoted", ")"]);
        assert_eq!(tok("wait..."), ["wait", ".", ".", "."]);
    }

    #[test]
    fn protects_numbers_and_abbreviations() {
        assert_eq!(tok("Pi is 3.14, not 3."), ["Pi", "is", "3.14", ",", "not", "3", "."]);
        assert_eq!(tok("1,000 people"), ["1,000", "people"]);
        assert_eq!(tok("Mr. Smith met Dr. Jones."), ["Mr.", "Smith", "met", "Dr.", "Jones", "."]);
        assert_eq!(tok("the U.S., again"), ["the", "U.S.", ",", "again"]);
        assert_eq!(tok("(e.g. this)"), ["(", "e.g.", "this", ")"]);
    }

    #[test]
    fn keeps_word_internal_connectors() {
        assert_eq!(tok("a well-known don't"), ["a", "well-known", "don't"]);
        assert_eq!(tok("a--b"), ["a", "-", "-", "b"]);
        assert_eq!(tok("x/y"), ["x", "/", "y"]);
    }

    #[test]
    fn urls_and_emails() {
        assert_eq!(tok("see https://example.com/a."), ["see", "https://example.com/a", "."]);
        assert_eq!(tok("mail bob@example.org,"), ["mail", "bob@example.org", ","]);
    }

    #[test]
    fn pashto_punctuation() {
        assert_eq!(tok("سلام، نړۍ؟"), ["سلام", "،", "نړۍ", "؟"]);
    }

    #[test]
    fn idempotent_on_samples() {
        for s in [
            "Hello, world!",
            "Mr. Smith paid $3.50 (approx.) on 10:30 a.m.",
            "\"Don't,\" she said -- it's well-known...",
            "the U.S.A. and e.g. x.",
        ] {
            let once = tok(s);
            let twice = tok(&once.join(" "));
            assert_eq!(once, twice, "{s}");
        }
    }
}
