/// Character-level edit distance, two-row DP.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - lev(a, b) / max(|a|, |b|)` in characters; 1.0 when both are empty.
pub fn norm_lev_sim(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(norm_lev_sim("abc", "abc"), 1.0);
        assert_eq!(norm_lev_sim("", ""), 1.0);
        assert_eq!(norm_lev_sim("", "ab"), 0.0);
        assert!((norm_lev_sim("london", "londres") - 4.0 / 7.0).abs() < 1e-12);
        assert!((norm_lev_sim("germany", "deutschland") - 3.0 / 11.0).abs() < 1e-12);
        assert_eq!(norm_lev_sim("finland", "suomi"), 0.0);
    }

    #[test]
    fn counts_characters_not_bytes() {
        assert_eq!(levenshtein("ü", "u"), 1);
        assert_eq!(norm_lev_sim("äb", "ab"), 0.5);
    }
}
