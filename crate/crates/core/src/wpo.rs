//! Words over a finite alphabet with the lexicographic order and the
//! first-occurrence-preserving embedding order, witness search, the
//! backward index map along a witness, and upward closed sets with
//! minimal antichain bases.
//!
//! Word positions are 1-based throughout; a first-occurrence index of 0
//! encodes absence.

use crate::error::{Error, Result};

/// A nonempty word over the alphabet {0,…,t-1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    alphabet: usize,
    letters: Vec<u8>,
}

impl Word {
    pub fn new(alphabet: usize, letters: Vec<u8>) -> Result<Word> {
        if letters.is_empty() {
            return Err(Error::EmptyWord);
        }
        for &l in &letters {
            if l as usize >= alphabet {
                return Err(Error::LetterOutOfRange {
                    letter: l as usize,
                    alphabet,
                });
            }
        }
        Ok(Word { alphabet, letters })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Strict lexicographic comparison of equal-length words.
pub fn lex_lt(a: &Word, b: &Word) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.letters < b.letters)
}

/// 1-based index of the first occurrence of `letter` in `a`, 0 if absent.
pub fn fo(a: &Word, letter: u8) -> usize {
    a.letters
        .iter()
        .position(|&l| l == letter)
        .map_or(0, |p| p + 1)
}

/// A strictly increasing injection witnessing an embedding: `map[i-1]` is
/// the 1-based target position of source position i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    map: Vec<usize>,
}

impl Witness {
    /// Wraps explicit 1-based positions. Validity against a concrete pair
    /// of words is checked by the operations that consume the witness.
    pub fn from_positions(map: Vec<usize>) -> Witness {
        Witness { map }
    }

    pub fn positions(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i - 1]
    }
}

fn letter_set(w: &Word) -> u64 {
    w.letters.iter().fold(0u64, |acc, &l| acc | 1 << l)
}

/// Searches for a witness of the embedding order: `a` embeds into `b` when
/// both use the same letters, `a` is a subword of `b`, and the embedding
/// maps every first occurrence in `a` to the first occurrence of the same
/// letter in `b`.
///
/// First occurrences anchor the map; the remaining positions are filled
/// greedily leftmost. A non-anchor position carries a letter that has
/// already first-occurred, so its matches in `b` are never first
/// occurrences, and leftmost filling is pointwise minimal: if it fails, no
/// witness exists.
pub fn lea_witness(a: &Word, b: &Word) -> Result<Option<Witness>> {
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch(a.alphabet, b.alphabet));
    }
    if letter_set(a) != letter_set(b) {
        return Ok(None);
    }
    let m = a.len();
    let mut map = Vec::with_capacity(m);
    let mut prev = 0usize;
    for i in 1..=m {
        let letter = a.letters[i - 1];
        let j = if fo(a, letter) == i {
            let anchor = fo(b, letter);
            if anchor <= prev {
                return Ok(None);
            }
            anchor
        } else {
            match (prev..b.len()).find(|&p| b.letters[p] == letter) {
                Some(p) => p + 1,
                None => return Ok(None),
            }
        };
        debug_assert_eq!(b.letters[j - 1], letter);
        map.push(j);
        prev = j;
    }
    Ok(Some(Witness { map }))
}

/// Convenience wrapper: does `a` embed into `b`?
pub fn lea(a: &Word, b: &Word) -> Result<bool> {
    Ok(lea_witness(a, b)?.is_some())
}

fn check_witness(a: &Word, b: &Word, h: &Witness) -> Result<()> {
    let m = a.len();
    if h.map.len() != m {
        return Err(Error::InvalidWitness);
    }
    let mut prev = 0;
    for i in 1..=m {
        let j = h.apply(i);
        if j <= prev || j > b.len() || b.letters[j - 1] != a.letters[i - 1] {
            return Err(Error::InvalidWitness);
        }
        prev = j;
    }
    if letter_set(a) != letter_set(b) {
        return Err(Error::InvalidWitness);
    }
    for &c in &a.letters {
        if h.apply(fo(a, c)) != fo(b, c) {
            return Err(Error::InvalidWitness);
        }
    }
    Ok(())
}

/// The backward index map along a witness h of `a` embedding into `b`:
/// positions in the range of h map back through h, every other position j
/// maps to the least source position carrying the letter b_j.
pub fn tab(a: &Word, b: &Word, h: &Witness) -> Result<Vec<usize>> {
    check_witness(a, b, h)?;
    let n = b.len();
    let mut inverse = vec![0usize; n + 1];
    for (i, &j) in h.map.iter().enumerate() {
        inverse[j] = i + 1;
    }
    let mut out = Vec::with_capacity(n);
    for j in 1..=n {
        if inverse[j] != 0 {
            out.push(inverse[j]);
        } else {
            out.push(fo(a, b.letters[j - 1]));
        }
    }
    Ok(out)
}

/// Pulls a sequence of length m through a backward index map of length n.
pub fn tab_apply(x: &[u8], tab: &[usize]) -> Result<Vec<u8>> {
    for &i in tab {
        if i == 0 || i > x.len() {
            return Err(Error::LengthMismatch(x.len(), tab.len()));
        }
    }
    Ok(tab.iter().map(|&i| x[i - 1]).collect())
}

/// True iff no word in the list strictly embeds into another.
pub fn is_antichain(words: &[Word]) -> Result<bool> {
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            if i != j && a != b && lea(a, b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An upward closed set of words, represented by its minimal antichain
/// basis. Insertion minimalizes eagerly; values are persistent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpSet {
    alphabet: usize,
    basis: Vec<Word>,
}

impl UpSet {
    pub fn new(alphabet: usize) -> UpSet {
        UpSet {
            alphabet,
            basis: Vec::new(),
        }
    }

    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    pub fn contains(&self, w: &Word) -> Result<bool> {
        if w.alphabet() != self.alphabet {
            return Err(Error::AlphabetMismatch(w.alphabet(), self.alphabet));
        }
        for g in &self.basis {
            if lea(g, w)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Returns the up-set generated by the old basis and `w`.
    pub fn insert(&self, w: &Word) -> Result<UpSet> {
        if self.contains(w)? {
            return Ok(self.clone());
        }
        let mut basis: Vec<Word> = Vec::with_capacity(self.basis.len() + 1);
        for g in &self.basis {
            if !lea(w, g)? {
                basis.push(g.clone());
            }
        }
        basis.push(w.clone());
        basis.sort_by(|x, y| (x.len(), x.letters()).cmp(&(y.len(), y.letters())));
        Ok(UpSet {
            alphabet: self.alphabet,
            basis,
        })
    }
}

/// All words over {0,…,t-1} of length 1..=max_len, shortest first, lex
/// within a length.
pub fn all_words(t: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        let mut letters = vec![0u8; len];
        loop {
            out.push(Word::new(t, letters.clone()).unwrap());
            let mut p = len;
            let mut done = false;
            loop {
                if p == 0 {
                    done = true;
                    break;
                }
                p -= 1;
                letters[p] += 1;
                if (letters[p] as usize) < t {
                    break;
                }
                letters[p] = 0;
            }
            if done {
                break;
            }
        }
    }
    out
}
