//! Line bookkeeping shared by the text parsers.

/// 1-based line containing `byte_offset`.
pub(crate) fn line_of(text: &str, byte_offset: usize) -> usize {
    text.as_bytes()[..byte_offset.min(text.len())]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

/// Line of a CSV record whose reader position is `byte_offset`. The reader
/// reports the end of the previous record, so blank and `#` comment lines in
/// between are skipped here.
pub(crate) fn record_line(text: &str, byte_offset: usize) -> usize {
    let first = line_of(text, byte_offset);
    let start = byte_offset.min(text.len());
    let skipped = text[start..]
        .lines()
        .take_while(|l| {
            let t = l.trim();
            t.is_empty() || t.starts_with('#')
        })
        .count();
    first + skipped
}
