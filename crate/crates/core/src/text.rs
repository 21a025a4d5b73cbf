/// Canonical answer form used for dedup and scoring: trimmed, lowercased,
/// internal whitespace collapsed to single spaces.
pub fn normalize_answer(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes() {
        assert_eq!(normalize_answer("  Charlie   Chaplin \t"), "charlie chaplin");
        assert_eq!(normalize_answer(""), "");
        assert_eq!(normalize_answer("ÉLAN"), "élan");
    }
}
