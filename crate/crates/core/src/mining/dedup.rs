use rustc_hash::FxHashSet;

/// Dedup key: whitespace-normalized, case-folded source and target.
pub fn dedup_key(src: &str, tgt: &str) -> (String, String) {
    (normalize(src), normalize(tgt))
}

fn normalize(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for (i, w) in s.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.extend(w.chars().flat_map(char::to_lowercase));
    }
    out
}

/// Running set of seen keys; keeps first occurrences.
#[derive(Debug, Default, Clone)]
pub struct Deduper {
    seen: FxHashSet<(String, String)>,
}

impl Deduper {
    pub fn new() -> Self {
        Self::default()
    }

    /// True if the pair was not seen before (and records it).
    pub fn insert(&mut self, src: &str, tgt: &str) -> bool {
        self.seen.insert(dedup_key(src, tgt))
    }

    pub fn contains(&self, src: &str, tgt: &str) -> bool {
        self.seen.contains(&dedup_key(src, tgt))
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

/// Remove later duplicates, keeping order.
pub fn dedup<T, F>(items: Vec<T>, key: F) -> Vec<T>
where
    F: Fn(&T) -> (&str, &str),
{
    let mut seen = Deduper::new();
    items
        .into_iter()
        .filter(|item| {
            let (s, t) = key(item);
            seen.insert(s, t)
        })
        .collect()
}
