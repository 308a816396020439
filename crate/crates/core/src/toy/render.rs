//! Spelling of a phoneme string in each toy language.
//!
//! Phonemes are single chars: vowels `a e i o u`; consonants `p b t d k g
//! f v s z m n l r h x j`, plus `S` (ʃ), `Z` (ʒ), `c` (ts) and `C` (tʃ).

use crate::script_kit::hangul;

pub const LANGS: [&str; 11] = ["en", "de", "fr", "es", "it", "ru", "uk", "el", "he", "ka", "ko"];

pub fn is_vowel(p: char) -> bool {
    matches!(p, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn front(p: Option<&char>) -> bool {
    matches!(p, Some('e' | 'i'))
}

fn capitalise(s: String) -> String {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => s,
    }
}

pub fn render(lang: &str, w: &[char]) -> String {
    match lang {
        "en" => capitalise(latin(w, en)),
        "de" => capitalise(latin(w, de)),
        "fr" => capitalise(latin(w, fr)),
        "es" => capitalise(latin(w, es)),
        "it" => capitalise(latin(w, it)),
        "ru" => capitalise(cyrillic(w, false)),
        "uk" => capitalise(cyrillic(w, true)),
        "el" => greek(w),
        "he" => hebrew(w),
        "ka" => georgian(w),
        "ko" => hangul_word(w),
        other => panic!("no toy orthography for {other}"),
    }
}

type Speller = fn(&[char], usize) -> &'static str;

fn latin(w: &[char], f: Speller) -> String {
    (0..w.len()).map(|i| f(w, i)).collect()
}

fn common(p: char) -> &'static str {
    match p {
        'a' => "a",
        'e' => "e",
        'i' => "i",
        'o' => "o",
        'u' => "u",
        'p' => "p",
        'b' => "b",
        't' => "t",
        'd' => "d",
        'k' => "k",
        'g' => "g",
        'f' => "f",
        'v' => "v",
        's' => "s",
        'z' => "z",
        'm' => "m",
        'n' => "n",
        'l' => "l",
        'r' => "r",
        'h' => "h",
        'x' => "kh",
        'j' => "y",
        'S' => "sh",
        'Z' => "zh",
        'c' => "ts",
        'C' => "ch",
        _ => "",
    }
}

fn en(w: &[char], i: usize) -> &'static str {
    let next = w.get(i + 1);
    match w[i] {
        'k' if matches!(next, Some('a' | 'o' | 'u')) => "c",
        p => common(p),
    }
}

fn between_vowels(w: &[char], i: usize) -> bool {
    i > 0 && is_vowel(w[i - 1]) && w.get(i + 1).is_some_and(|&p| is_vowel(p))
}

fn de(w: &[char], i: usize) -> &'static str {
    match w[i] {
        'v' => "w",
        'z' => "s",
        's' if between_vowels(w, i) => "ss",
        'S' | 'Z' => "sch",
        'x' => "ch",
        'j' => "j",
        'c' => "z",
        'C' => "tsch",
        p => common(p),
    }
}

fn fr(w: &[char], i: usize) -> &'static str {
    let next = w.get(i + 1);
    match w[i] {
        'k' if front(next) => "qu",
        'k' => "c",
        'g' if front(next) => "gu",
        's' if between_vowels(w, i) => "ss",
        'S' => "ch",
        'Z' => "j",
        'C' => "tch",
        'u' => "ou",
        'e' if next.map_or(true, |&n| is_vowel(n) || w.get(i + 2).is_some_and(|&m| is_vowel(m))) => "é",
        p => common(p),
    }
}

fn es(w: &[char], i: usize) -> &'static str {
    let next = w.get(i + 1);
    match w[i] {
        'k' if front(next) => "qu",
        'k' => "c",
        'g' if front(next) => "gu",
        'z' => "s",
        'Z' => "y",
        'x' | 'h' => "j",
        p => common(p),
    }
}

fn it(w: &[char], i: usize) -> &'static str {
    let next = w.get(i + 1);
    let vowel_next = next.is_some_and(|&n| is_vowel(n));
    match w[i] {
        'k' | 'x' if front(next) => "ch",
        'k' | 'x' => "c",
        'g' if front(next) => "gh",
        'S' if front(next) || !vowel_next => "sc",
        'S' => "sci",
        'Z' if front(next) || !vowel_next => "g",
        'Z' => "gi",
        'C' if front(next) || !vowel_next => "c",
        'C' => "ci",
        'c' => "z",
        'z' => "s",
        'h' => "",
        'j' => "i",
        p => common(p),
    }
}

fn cyrillic(w: &[char], uk: bool) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < w.len() {
        let p = w[i];
        let prev_vowel_or_start = i == 0 || is_vowel(w[i - 1]);
        if p == 'j' {
            let iotated = match w.get(i + 1) {
                Some('a') => Some("я"),
                Some('u') => Some("ю"),
                Some('e') => Some(if uk { "є" } else { "е" }),
                Some('i') if uk => Some("ї"),
                _ => None,
            };
            if let Some(s) = iotated {
                out.push_str(s);
                i += 2;
                continue;
            }
            out.push('й');
            i += 1;
            continue;
        }
        out.push_str(match p {
            'a' => "а",
            'e' if prev_vowel_or_start && !uk => "э",
            'e' => "е",
            'i' if uk => "і",
            'i' => "и",
            'o' => "о",
            'u' => "у",
            'p' => "п",
            'b' => "б",
            't' => "т",
            'd' => "д",
            'k' => "к",
            'g' if uk => "ґ",
            'g' | 'h' => "г",
            'f' => "ф",
            'v' => "в",
            's' => "с",
            'z' => "з",
            'm' => "м",
            'n' => "н",
            'l' => "л",
            'r' => "р",
            'x' => "х",
            'S' => "ш",
            'Z' => "ж",
            'c' => "ц",
            'C' => "ч",
            _ => "",
        });
        i += 1;
    }
    out
}

fn greek(w: &[char]) -> String {
    let vowels: Vec<usize> = (0..w.len()).filter(|&i| is_vowel(w[i])).collect();
    let stressed = match vowels.len() {
        0 => None,
        1 => Some(vowels[0]),
        n => Some(vowels[n - 2]),
    };
    let mut out = String::new();
    for (i, &p) in w.iter().enumerate() {
        let tonos = Some(i) == stressed;
        let last = i + 1 == w.len();
        out.push_str(match (p, tonos) {
            ('a', false) => "α",
            ('a', true) => "ά",
            ('e', false) => "ε",
            ('e', true) => "έ",
            ('i', false) => "ι",
            ('i', true) => "ί",
            ('o', false) => "ο",
            ('o', true) => "ό",
            ('u', false) => "ου",
            ('u', true) => "ού",
            ('p', _) => "π",
            ('b', _) => "μπ",
            ('t', _) => "τ",
            ('d', _) => "ντ",
            ('k', _) => "κ",
            ('g', _) => "γκ",
            ('f', _) => "φ",
            ('v', _) => "β",
            ('s' | 'S', _) if last => "ς",
            ('s' | 'S', _) => "σ",
            ('z' | 'Z', _) => "ζ",
            ('m', _) => "μ",
            ('n', _) => "ν",
            ('l', _) => "λ",
            ('r', _) => "ρ",
            ('x' | 'h', _) => "χ",
            ('j', _) => "ι",
            ('c' | 'C', _) => "τσ",
            _ => "",
        });
    }
    capitalise(out)
}

fn hebrew(w: &[char]) -> String {
    let mut out: Vec<char> = Vec::new();
    for (i, &p) in w.iter().enumerate() {
        let first = i == 0;
        let last = i + 1 == w.len();
        let s: &str = match p {
            'a' | 'e' if first => "א",
            'a' | 'e' if last => "ה",
            'a' | 'e' => "",
            'i' if first => "אי",
            'o' | 'u' if first => "או",
            'i' => "י",
            'o' | 'u' => "ו",
            'p' | 'f' => "פ",
            'b' | 'v' => "ב",
            't' => "ט",
            'd' => "ד",
            'k' => "ק",
            'g' => "ג",
            's' => "ס",
            'z' | 'Z' => "ז",
            'S' => "ש",
            'm' => "מ",
            'n' => "נ",
            'l' => "ל",
            'r' => "ר",
            'x' => "ח",
            'h' => "ה",
            'j' => "י",
            'c' | 'C' => "צ",
            _ => "",
        };
        out.extend(s.chars());
    }
    if let Some(last) = out.last_mut() {
        *last = match *last {
            'כ' => 'ך',
            'מ' => 'ם',
            'נ' => 'ן',
            'פ' => 'ף',
            'צ' => 'ץ',
            c => c,
        };
    }
    out.into_iter().collect()
}

fn georgian(w: &[char]) -> String {
    let mut out: String = w
        .iter()
        .map(|&p| match p {
            'a' => 'ა',
            'e' => 'ე',
            'i' | 'j' => 'ი',
            'o' => 'ო',
            'u' => 'უ',
            'p' => 'პ',
            'b' => 'ბ',
            't' => 'ტ',
            'd' => 'დ',
            'k' => 'კ',
            'g' => 'გ',
            'f' => 'ფ',
            'v' => 'ვ',
            's' => 'ს',
            'z' => 'ზ',
            'S' => 'შ',
            'Z' => 'ჟ',
            'm' => 'მ',
            'n' => 'ნ',
            'l' => 'ლ',
            'r' => 'რ',
            'x' => 'ხ',
            'h' => 'ჰ',
            'c' => 'ც',
            'C' => 'ჩ',
            _ => 'ი',
        })
        .collect();
    if w.last().is_some_and(|&p| !is_vowel(p)) {
        out.push('ი');
    }
    out
}

fn ko_lead(p: char) -> char {
    match p {
        'p' | 'f' => 'ㅍ',
        'b' | 'v' => 'ㅂ',
        't' => 'ㅌ',
        'd' => 'ㄷ',
        'k' => 'ㅋ',
        'g' => 'ㄱ',
        's' | 'S' => 'ㅅ',
        'z' | 'Z' => 'ㅈ',
        'x' | 'h' => 'ㅎ',
        'm' => 'ㅁ',
        'n' => 'ㄴ',
        'l' | 'r' => 'ㄹ',
        'c' | 'C' => 'ㅊ',
        _ => 'ㅇ',
    }
}

fn ko_vowel(v: char, glide: bool) -> char {
    match (v, glide) {
        ('a', false) => 'ㅏ',
        ('a', true) => 'ㅑ',
        ('e', false) => 'ㅔ',
        ('e', true) => 'ㅖ',
        ('o', false) => 'ㅗ',
        ('o', true) => 'ㅛ',
        ('u', false) => 'ㅜ',
        ('u', true) => 'ㅠ',
        _ => 'ㅣ',
    }
}

fn ko_tail(p: char) -> Option<char> {
    match p {
        'n' => Some('ㄴ'),
        'm' => Some('ㅁ'),
        'l' | 'r' => Some('ㄹ'),
        _ => None,
    }
}

/// Loanword-style syllabification: consonants without a following vowel
/// become a coda if they are sonorants, otherwise a syllable with ㅡ.
fn hangul_word(w: &[char]) -> String {
    let mut blocks: Vec<(char, char, Option<char>)> = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let p = w[i];
        if is_vowel(p) {
            blocks.push(('ㅇ', ko_vowel(p, false), None));
            i += 1;
            continue;
        }
        let glide = p == 'S' || p == 'j';
        let (v_at, glide) = if p != 'j' && w.get(i + 1) == Some(&'j') {
            (i + 2, true)
        } else {
            (i + 1, glide)
        };
        if let Some(&v) = w.get(v_at).filter(|&&v| is_vowel(v)) {
            blocks.push((ko_lead(p), ko_vowel(v, glide), None));
            i = v_at + 1;
            continue;
        }
        if p == 'j' {
            i += 1;
            continue;
        }
        let followed_by_vowel = w.get(i + 1).is_some_and(|&n| is_vowel(n));
        match (blocks.last_mut(), ko_tail(p)) {
            (Some(last), Some(t)) if last.2.is_none() && !followed_by_vowel => last.2 = Some(t),
            _ => blocks.push((ko_lead(p), 'ㅡ', None)),
        }
        i += 1;
    }
    blocks
        .into_iter()
        .filter_map(|(l, v, t)| hangul::compose(l, v, t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn spellings_of_one_form() {
        let word = w("moskva");
        let got: Vec<String> = LANGS.iter().map(|l| render(l, &word)).collect();
        assert_eq!(
            got,
            ["Moskva", "Moskwa", "Moscva", "Moscva", "Moscva", "Москва", "Москва", "Μόσκβα", "מוסקבה", "მოსკვა", "모스크바"]
        );
    }

    #[test]
    fn context_rules() {
        assert_eq!(render("it", &w("Cekino")), "Cechino");
        assert_eq!(render("de", &w("Sukin")), "Schukin");
        assert_eq!(render("fr", &w("Sukine")), "Chouquiné");
        assert_eq!(render("ru", &w("jalta")), "Ялта");
        assert_eq!(render("uk", &w("kijiv")), "Кіїв");
        assert_eq!(render("he", &w("tamin")), "טמין");
        assert_eq!(render("ka", &w("batum")), "ბატუმი");
        assert_eq!(render("ko", &w("seul")), "세울");
        assert_eq!(render("el", &w("patras")), "Πάτρας");
    }
}
