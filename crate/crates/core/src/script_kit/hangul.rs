//! Hangul syllable arithmetic and the compatibility Jamo used as tokens.

pub const SYLLABLE_BASE: u32 = 0xAC00;
pub const LEAD_COUNT: u32 = 19;
pub const VOWEL_COUNT: u32 = 21;
pub const TAIL_COUNT: u32 = 28;
pub const SYLLABLES_PER_LEAD: u32 = VOWEL_COUNT * TAIL_COUNT; // 588
pub const SYLLABLE_COUNT: u32 = LEAD_COUNT * SYLLABLES_PER_LEAD; // 11,172

pub const LEADS: [char; 19] = [
    'ㄱ', 'ㄲ', 'ㄴ', 'ㄷ', 'ㄸ', 'ㄹ', 'ㅁ', 'ㅂ', 'ㅃ', 'ㅅ', 'ㅆ', 'ㅇ', 'ㅈ', 'ㅉ', 'ㅊ', 'ㅋ', 'ㅌ', 'ㅍ', 'ㅎ',
];

pub const VOWELS: [char; 21] = [
    'ㅏ', 'ㅐ', 'ㅑ', 'ㅒ', 'ㅓ', 'ㅔ', 'ㅕ', 'ㅖ', 'ㅗ', 'ㅘ', 'ㅙ', 'ㅚ', 'ㅛ', 'ㅜ', 'ㅝ', 'ㅞ', 'ㅟ', 'ㅠ', 'ㅡ', 'ㅢ', 'ㅣ',
];

/// Index 0 is "no tail".
pub const TAILS: [Option<char>; 28] = [
    None,
    Some('ㄱ'),
    Some('ㄲ'),
    Some('ㄳ'),
    Some('ㄴ'),
    Some('ㄵ'),
    Some('ㄶ'),
    Some('ㄷ'),
    Some('ㄹ'),
    Some('ㄺ'),
    Some('ㄻ'),
    Some('ㄼ'),
    Some('ㄽ'),
    Some('ㄾ'),
    Some('ㄿ'),
    Some('ㅀ'),
    Some('ㅁ'),
    Some('ㅂ'),
    Some('ㅄ'),
    Some('ㅅ'),
    Some('ㅆ'),
    Some('ㅇ'),
    Some('ㅈ'),
    Some('ㅊ'),
    Some('ㅋ'),
    Some('ㅌ'),
    Some('ㅍ'),
    Some('ㅎ'),
];

/// Compatibility Jamo block letters U+3131..=U+3163: 30 consonants and 21
/// vowels, the union of every lead, vowel and tail above.
pub fn compatibility_jamo() -> impl Iterator<Item = char> {
    (0x3131u32..=0x3163).filter_map(char::from_u32)
}

pub fn is_syllable(c: char) -> bool {
    (SYLLABLE_BASE..SYLLABLE_BASE + SYLLABLE_COUNT).contains(&(c as u32))
}

/// `(lead, vowel, tail)` indices of a precomposed syllable.
pub fn decompose_indices(c: char) -> Option<(u32, u32, u32)> {
    if !is_syllable(c) {
        return None;
    }
    let index = c as u32 - SYLLABLE_BASE;
    Some((
        index / SYLLABLES_PER_LEAD,
        (index % SYLLABLES_PER_LEAD) / TAIL_COUNT,
        index % TAIL_COUNT,
    ))
}

pub fn compose_indices(lead: u32, vowel: u32, tail: u32) -> Option<char> {
    if lead >= LEAD_COUNT || vowel >= VOWEL_COUNT || tail >= TAIL_COUNT {
        return None;
    }
    char::from_u32(SYLLABLE_BASE + lead * SYLLABLES_PER_LEAD + vowel * TAIL_COUNT + tail)
}

/// Two or three compatibility Jamo for a syllable.
pub fn decompose(c: char) -> Option<Vec<char>> {
    let (l, v, t) = decompose_indices(c)?;
    let mut out = vec![LEADS[l as usize], VOWELS[v as usize]];
    if let Some(tail) = TAILS[t as usize] {
        out.push(tail);
    }
    Some(out)
}

/// Inverse of [`decompose`].
pub fn compose(lead: char, vowel: char, tail: Option<char>) -> Option<char> {
    let l = LEADS.iter().position(|&x| x == lead)? as u32;
    let v = VOWELS.iter().position(|&x| x == vowel)? as u32;
    let t = TAILS.iter().position(|&x| x == tail)? as u32;
    compose_indices(l, v, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seoul_decomposes_to_five_jamo() {
        let jamo: Vec<char> = "서울".chars().flat_map(|c| decompose(c).unwrap()).collect();
        assert_eq!(jamo, vec!['ㅅ', 'ㅓ', 'ㅇ', 'ㅜ', 'ㄹ']);
    }

    #[test]
    fn first_syllable_has_no_tail() {
        assert_eq!(decompose('가').unwrap(), vec!['ㄱ', 'ㅏ']);
        assert_eq!(decompose_indices('가'), Some((0, 0, 0)));
    }

    #[test]
    fn round_trip_over_every_syllable() {
        for cp in SYLLABLE_BASE..SYLLABLE_BASE + SYLLABLE_COUNT {
            let c = char::from_u32(cp).unwrap();
            let j = decompose(c).unwrap();
            let back = compose(j[0], j[1], j.get(2).copied()).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn compatibility_block_is_the_union_of_all_jamo_sets() {
        let mut union: Vec<char> = LEADS.iter().chain(VOWELS.iter()).copied().collect();
        union.extend(TAILS.iter().flatten());
        union.sort();
        union.dedup();
        let block: Vec<char> = compatibility_jamo().collect();
        assert_eq!(block.len(), 51);
        assert_eq!(union, block);
    }
}
