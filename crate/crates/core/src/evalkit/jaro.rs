/// Jaro similarity over characters.
pub fn jaro(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut b_used = vec![false; b.len()];
    let mut a_matched = Vec::with_capacity(a.len());
    for (i, &c) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_used[j] && b[j] == c {
                b_used[j] = true;
                a_matched.push(c);
                break;
            }
        }
    }
    let m = a_matched.len();
    if m == 0 {
        return 0.0;
    }
    let b_matched = b.iter().zip(&b_used).filter(|(_, &u)| u).map(|(&c, _)| c);
    let half_transpositions = a_matched.iter().zip(b_matched).filter(|(x, y)| **x != *y).count();
    let m = m as f64;
    let t = (half_transpositions / 2) as f64;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

/// Jaro plus a prefix boost of `0.1` per shared leading character (at most
/// four), applied at every Jaro level.
pub fn jaro_winkler(a: &str, b: &str) -> f64 {
    let j = jaro(a, b);
    let prefix = a.chars().zip(b.chars()).take(4).take_while(|(x, y)| x == y).count();
    j + prefix as f64 * 0.1 * (1.0 - j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_case() {
        // martha / marhta: window = 6/2 - 1 = 2, all six letters match,
        // the t/h swap is one transposition.
        // jaro = (6/6 + 6/6 + (6-1)/6) / 3 = 17/18 = 0.944444
        // prefix "mar" = 3: 17/18 + 3 * 0.1 * (1/18) = 0.961111
        assert!((jaro("martha", "marhta") - 17.0 / 18.0).abs() < 1e-12);
        assert!((jaro_winkler("martha", "marhta") - 0.9611).abs() < 1e-4);
    }

    #[test]
    fn extremes() {
        assert_eq!(jaro_winkler("abc", "abc"), 1.0);
        assert_eq!(jaro_winkler("abc", "xyz"), 0.0);
        assert_eq!(jaro_winkler("", ""), 1.0);
        assert_eq!(jaro_winkler("a", ""), 0.0);
    }

    #[test]
    fn more_reference_values() {
        // dixon / dicksonx: m = 4, t = 0, jaro = (4/5 + 4/8 + 1) / 3 = 0.766667,
        // prefix 2: 0.766667 + 0.2 * 0.233333 = 0.813333
        assert!((jaro_winkler("dixon", "dicksonx") - 0.813333).abs() < 1e-6);
        // dwayne / duane: m = 4, t = 0, jaro = (4/6 + 4/5 + 1) / 3 = 0.822222,
        // prefix 1: 0.822222 + 0.1 * 0.177778 = 0.84
        assert!((jaro_winkler("dwayne", "duane") - 0.84).abs() < 1e-6);
    }

    #[test]
    fn core_is_symmetric_and_boost_never_lowers() {
        let words = ["london", "londres", "londra", "moskva", "moscow", "a", "ab", "ba", "aaab"];
        for a in words {
            for b in words {
                assert!((jaro(a, b) - jaro(b, a)).abs() < 1e-12, "{a} {b}");
                assert!(jaro_winkler(a, b) >= jaro(a, b));
                assert!((0.0..=1.0).contains(&jaro_winkler(a, b)));
            }
        }
    }
}
