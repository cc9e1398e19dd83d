/// Reserved padding token used by the n-gram context model. The tokenizer can never emit it:
/// its angle brackets are always detached as punctuation and output is lowercase.
pub const PAD: &str = "<PAD>";

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Lowercase, split on whitespace, and detach leading/trailing punctuation characters
/// as standalone tokens. Interior punctuation (`it's`, `e-mail`) stays attached.
pub fn tokenize(raw: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in raw.split_whitespace() {
        let lower = chunk.to_lowercase();
        let chars: Vec<char> = lower.chars().collect();
        let start = chars.iter().position(|&c| !is_punct(c));
        let Some(start) = start else {
            tokens.extend(chars.iter().map(|c| c.to_string()));
            continue;
        };
        let end = chars.iter().rposition(|&c| !is_punct(c)).unwrap() + 1;
        tokens.extend(chars[..start].iter().map(|c| c.to_string()));
        tokens.push(chars[start..end].iter().collect());
        tokens.extend(chars[end..].iter().map(|c| c.to_string()));
    }
    tokens
}

/// Display form of a token sequence: single-space join.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t.as_ref());
    }
    out
}
