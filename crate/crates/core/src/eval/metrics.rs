//! Per-item answer matching.

/// Trim, casefold, then drop one trailing period.
pub fn normalize(s: &str) -> String {
    let folded = s.trim().to_lowercase();
    match folded.strip_suffix('.') {
        Some(rest) => rest.to_owned(),
        None => folded,
    }
}

/// 1 iff the normalized strings are equal.
pub fn exact_match(prediction: &str, gold: &str) -> u8 {
    u8::from(normalize(prediction) == normalize(gold))
}

/// The choice letter of a multiple-choice gold label, if it is one.
pub fn choice_letter(gold: &str) -> Option<char> {
    let mut chars = gold.trim().chars();
    match (chars.next(), chars.next()) {
        (Some(c @ 'A'..='H'), None) => Some(c),
        _ => None,
    }
}

/// Multiple-choice scoring. The trimmed prediction must start with the gold
/// letter followed by end of string or a non-alphanumeric character, e.g.
/// `A`, `A.`, `A) cat`. Anything `exact_match` accepts is accepted too, so
/// a bare lowercase `a` counts while `a cat` does not. Golds that are not
/// a letter A-H fall back to exact match.
pub fn relaxed_match(prediction: &str, gold: &str) -> u8 {
    if exact_match(prediction, gold) == 1 {
        return 1;
    }
    let Some(letter) = choice_letter(gold) else {
        return 0;
    };
    let mut chars = prediction.trim().chars();
    if chars.next() != Some(letter) {
        return 0;
    }
    u8::from(chars.next().is_none_or(|c| !c.is_alphanumeric()))
}
