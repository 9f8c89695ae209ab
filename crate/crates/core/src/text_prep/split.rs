use crate::Lang;

use super::tokenize::is_abbreviation;

/// Split a document into initial segments.
///
/// Boundaries are newlines, `.`/`!`/`?` followed by whitespace, and the Khmer
/// and Arabic-script terminators `។`/`؟` wherever they occur. For English a
/// period closing a known abbreviation (`Mr.`) does not end a segment.
/// Segments are trimmed, empty ones dropped, and document order is kept.
pub fn split_sentences(doc_text: &str, lang: Lang) -> Vec<String> {
    let mut out = Vec::new();
    for line in doc_text.split('\n') {
        split_line(line, lang, &mut out);
    }
    out
}

fn split_line(line: &str, lang: Lang, out: &mut Vec<String>) {
    let mut start = 0;
    let mut iter = line.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        let end = i + c.len_utf8();
        let boundary = match c {
            '។' | '؟' => true,
            '.' | '!' | '?' => {
                let next_ws = iter.peek().is_some_and(|&(_, n)| n.is_whitespace());
                next_ws && !(c == '.' && lang == Lang::En && ends_with_abbreviation(&line[start..end]))
            }
            _ => false,
        };
        if boundary {
            push_trimmed(&line[start..end], out);
            start = end;
        }
    }
    push_trimmed(&line[start..], out);
}

fn ends_with_abbreviation(segment: &str) -> bool {
    segment
        .split_whitespace()
        .next_back()
        .is_some_and(|w| is_abbreviation(w.trim_start_matches(|c: char| c.is_ascii_punctuation() && c != '.')))
}

fn push_trimmed(s: &str, out: &mut Vec<String>) {
    let t = s.trim();
    if !t.is_empty() {
        out.push(t.to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_on_terminal_punctuation() {
        assert_eq!(split_sentences("A. B? C", Lang::En), ["A.", "B?", "C"]);
        assert_eq!(split_sentences("Wait!? Yes", Lang::En), ["Wait!?", "Yes"]);
        assert_eq!(split_sentences("Pi is 3.14 today.", Lang::En), ["Pi is 3.14 today."]);
    }

    #[test]
    fn splits_on_newlines_and_drops_empty() {
        assert_eq!(split_sentences("one\n\n two \r\nthree", Lang::En), ["one", "two", "three"]);
        assert!(split_sentences("", Lang::En).is_empty());
        assert!(split_sentences(" \n\t", Lang::Ps).is_empty());
    }

    #[test]
    fn khmer_full_stop() {
        let segs = split_sentences("ខ្ញុំទៅផ្សារ។ គាត់នៅផ្ទះ។", Lang::Km);
        assert_eq!(segs, ["ខ្ញុំទៅផ្សារ។", "គាត់នៅផ្ទះ។"]);
        assert_eq!(split_sentences("ក។ខ។", Lang::Km), ["ក។", "ខ។"]);
    }

    #[test]
    fn english_abbreviations_do_not_split() {
        assert_eq!(split_sentences("Mr. Smith left. Dr. Who came.", Lang::En), ["Mr. Smith left.", "Dr. Who came."]);
    }

    #[test]
    fn pashto_question_mark() {
        assert_eq!(split_sentences("ته څنګه یې؟ زه ښه یم.", Lang::Ps), ["ته څنګه یې؟", "زه ښه یم."]);
    }
}
