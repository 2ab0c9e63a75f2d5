//! Reduced words in two generators and their inverses.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CocycleError, Mat2, Scalar};

/// Longest word length the enumerator accepts.
pub const MAX_ENUMERATION_LENGTH: usize = 14;

/// Letters ordered A < A⁻¹ < B < B⁻¹; enumeration is lexicographic in this order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Self {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    fn symbol(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::AInv => 'a',
            Letter::B => 'B',
            Letter::BInv => 'b',
        }
    }

    fn from_symbol(c: char) -> Option<Self> {
        Some(match c {
            'A' => Letter::A,
            'a' => Letter::AInv,
            'B' => Letter::B,
            'b' => Letter::BInv,
            _ => return None,
        })
    }

    /// The three letters that may follow `self` in a reduced word.
    pub fn successors(self) -> impl Iterator<Item = Letter> {
        Letter::ALL.into_iter().filter(move |&l| l != self.inverse())
    }
}

/// A reduced word; lowercase letters denote inverses in the string form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self, CocycleError> {
        if letters.windows(2).any(|w| w[1] == w[0].inverse()) {
            return Err(CocycleError::NotReduced);
        }
        Ok(Self(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Order used to pick "first" witnesses: shorter first, then lexicographic.
    pub fn shortlex_key(&self) -> (usize, &[Letter]) {
        (self.0.len(), &self.0)
    }

    /// Product of the letters, evaluated left to right.
    pub fn evaluate<T: Scalar>(&self, gens: &Generators<T>) -> Mat2<T> {
        let mut acc = Mat2::identity_like(&gens.a.a);
        for &l in &self.0 {
            acc = acc.mul(gens.get(l));
        }
        acc
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Word {
    type Err = CocycleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .chars()
            .map(Letter::from_symbol)
            .collect::<Option<Vec<_>>>()
            .ok_or(CocycleError::NotReduced)?;
        Word::new(letters)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The two generators and their inverses.
#[derive(Clone, Debug)]
pub struct Generators<T> {
    pub a: Mat2<T>,
    pub a_inv: Mat2<T>,
    pub b: Mat2<T>,
    pub b_inv: Mat2<T>,
}

impl<T: Scalar> Generators<T> {
    pub fn new(a: Mat2<T>, b: Mat2<T>) -> Self {
        Self {
            a_inv: a.inverse_unimodular(),
            b_inv: b.inverse_unimodular(),
            a,
            b,
        }
    }

    pub fn get(&self, l: Letter) -> &Mat2<T> {
        match l {
            Letter::A => &self.a,
            Letter::AInv => &self.a_inv,
            Letter::B => &self.b,
            Letter::BInv => &self.b_inv,
        }
    }
}

/// Number of reduced words of length exactly k: 4·3^{k−1}.
pub fn count_reduced(k: usize) -> u64 {
    if k == 0 {
        1
    } else {
        4 * 3u64.pow(k as u32 - 1)
    }
}

/// All reduced words of length 1..=`max_len` in shortlex order.
pub fn reduced_words(max_len: usize) -> Result<ReducedWords, CocycleError> {
    if max_len > MAX_ENUMERATION_LENGTH {
        return Err(CocycleError::LengthCapExceeded(max_len));
    }
    Ok(ReducedWords {
        max_len,
        len: 1,
        index: 0,
    })
}

pub struct ReducedWords {
    max_len: usize,
    len: usize,
    index: u64,
}

impl ReducedWords {
    /// Decode the `index`-th reduced word of length `len` (mixed radix 4, 3, 3, …).
    fn decode(len: usize, mut index: u64) -> Word {
        let mut digits = vec![0u64; len];
        for k in (1..len).rev() {
            digits[k] = index % 3;
            index /= 3;
        }
        digits[0] = index;
        let mut letters = Vec::with_capacity(len);
        let mut prev: Option<Letter> = None;
        for d in digits {
            let l = match prev {
                None => Letter::ALL[d as usize],
                Some(p) => p.successors().nth(d as usize).unwrap(),
            };
            letters.push(l);
            prev = Some(l);
        }
        Word(letters)
    }
}

impl Iterator for ReducedWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.len > self.max_len {
            return None;
        }
        let w = Self::decode(self.len, self.index);
        self.index += 1;
        if self.index == count_reduced(self.len) {
            self.len += 1;
            self.index = 0;
        }
        Some(w)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest: u64 = (self.len..=self.max_len).map(count_reduced).sum::<u64>() - self.index;
        (rest as usize, Some(rest as usize))
    }
}

/// Depth-first traversal of all reduced words of length 1..=`max_len`
/// beginning with `first`, passing each word with its memoized product.
pub fn visit_words_from<T: Scalar>(
    gens: &Generators<T>,
    first: Letter,
    max_len: usize,
    visit: &mut impl FnMut(&[Letter], &Mat2<T>),
) {
    fn go<T: Scalar>(
        gens: &Generators<T>,
        prefix: &mut Vec<Letter>,
        product: &Mat2<T>,
        max_len: usize,
        visit: &mut impl FnMut(&[Letter], &Mat2<T>),
    ) {
        visit(prefix, product);
        if prefix.len() == max_len {
            return;
        }
        let last = *prefix.last().unwrap();
        for l in last.successors() {
            let next = product.mul(gens.get(l));
            prefix.push(l);
            go(gens, prefix, &next, max_len, visit);
            prefix.pop();
        }
    }
    if max_len == 0 {
        return;
    }
    let mut prefix = vec![first];
    go(gens, &mut prefix, &gens.get(first).clone(), max_len, visit);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        assert_eq!(reduced_words(1).unwrap().count(), 4);
        assert_eq!(reduced_words(2).unwrap().count(), 16);
        assert_eq!(reduced_words(6).unwrap().count(), 1456);
        assert!(matches!(reduced_words(15), Err(CocycleError::LengthCapExceeded(15))));
    }

    #[test]
    fn enumeration_is_shortlex_and_reduced() {
        let words: Vec<Word> = reduced_words(5).unwrap().collect();
        for w in &words {
            assert!(Word::new(w.letters().to_vec()).is_ok());
        }
        for pair in words.windows(2) {
            assert!(pair[0].shortlex_key() < pair[1].shortlex_key());
        }
        assert_eq!(reduced_words(5).unwrap().size_hint().0, words.len());
    }

    #[test]
    fn dfs_matches_enumeration() {
        let gens = Generators::new(Mat2::new(1.0, 2.0, 0.0, 1.0), Mat2::new(1.0, 0.0, 2.0, 1.0));
        let mut seen = Vec::new();
        for l in Letter::ALL {
            visit_words_from(&gens, l, 4, &mut |w, m| {
                let word = Word(w.to_vec());
                assert!(word.evaluate(&gens).approx_eq(m, 1e-9));
                seen.push(word);
            });
        }
        seen.sort();
        let mut all: Vec<Word> = reduced_words(4).unwrap().collect();
        all.sort();
        assert_eq!(seen, all);
    }

    #[test]
    fn word_string_round_trip() {
        let w: Word = "AbAAbA".parse().unwrap();
        assert_eq!(w.to_string(), "AbAAbA");
        assert!("Aa".parse::<Word>().is_err());
    }
}
