/// Splits on non-alphanumeric boundaries, case-folds, and drops tokens
/// shorter than two characters. No stemming, no stopwords.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().nth(1).is_some())
        .map(str::to_lowercase)
        .collect()
}

/// [`tokenize`] followed by removal of `stopwords` (already case-folded).
pub fn tokenize_with(text: &str, stopwords: &[String]) -> Vec<String> {
    let mut tokens = tokenize(text);
    if !stopwords.is_empty() {
        tokens.retain(|t| stopwords.binary_search(t).is_err());
    }
    tokens
}
