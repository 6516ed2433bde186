use crate::corpus::Emotion;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no bracketed emotion found in response")]
pub struct ParseFailure;

fn bracket_word(word: &str) -> Option<Emotion> {
    match word.trim().to_lowercase().as_str() {
        "anger" | "angry" => Some(Emotion::Angry),
        "happiness" | "happy" => Some(Emotion::Happy),
        "sadness" | "sad" => Some(Emotion::Sad),
        "neutral" => Some(Emotion::Neutral),
        _ => None,
    }
}

/// Returns the last `[emotion]` in the response that names a known class
/// (case-insensitive; prompt nouns and the adjectives angry/happy/sad).
pub fn extract_emotion(response: &str) -> Result<Emotion, ParseFailure> {
    let mut found = None;
    let mut rest = response;
    while let Some(open) = rest.find('[') {
        let after = &rest[open + 1..];
        match after.find(']') {
            Some(close) => {
                let inner = &after[..close];
                // A nested '[' restarts the scan from that bracket.
                if let Some(nested) = inner.rfind('[') {
                    rest = &after[nested..];
                    continue;
                }
                if let Some(e) = bracket_word(inner) {
                    found = Some(e);
                }
                rest = &after[close + 1..];
            }
            None => break,
        }
    }
    found.ok_or(ParseFailure)
}
