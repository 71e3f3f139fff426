use super::stopwords::is_stopword;

/// Lowercased word tokens of an HTML post body.
///
/// `<pre>` and `<code>` blocks are removed with their content, other markup
/// is stripped, text is split on non-alphanumerics, and tokens shorter than
/// two characters or on the stopword list are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let stripped = strip_markup(&lower);
    let decoded = decode_entities(&stripped);
    decoded
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2 && !is_stopword(t))
        .map(str::to_owned)
        .collect()
}

fn strip_markup(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(open) = rest.find('<') {
        out.push_str(&rest[..open]);
        out.push(' ');
        let tail = &rest[open..];
        let Some(close) = tail.find('>') else {
            // unterminated tag: drop the remainder
            return out;
        };
        let tag = &tail[1..close];
        let name: String = tag
            .trim_start_matches('/')
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric())
            .collect();
        rest = &tail[close + 1..];
        if !tag.starts_with('/') && (name == "code" || name == "pre") && !tag.ends_with('/') {
            let end = format!("</{name}");
            match rest.find(&end) {
                Some(pos) => {
                    let after = &rest[pos..];
                    rest = after.find('>').map_or("", |p| &after[p + 1..]);
                }
                None => return out,
            }
        }
    }
    out.push_str(rest);
    out
}

fn decode_entities(s: &str) -> String {
    s.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&nbsp;", " ")
        .replace("&amp;", "&")
}
