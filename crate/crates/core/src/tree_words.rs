//! Finite words, eventually periodic rays and cylinder sets over a `d`-letter alphabet.
//!
//! Vertices of the `d`-ary rooted tree are finite words over `{0, …, d-1}`; boundary
//! points are infinite words. Only eventually periodic boundary points are
//! representable, which is all the algorithms here ever need: every ray fixed by a
//! finite-state automorphism that we search for has this form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest degree accepted anywhere in the crate.
pub const MAX_DEGREE: usize = 36;

/// The alphabet `{0, …, d-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet(u8);

impl Alphabet {
    pub fn new(degree: usize) -> Result<Self> {
        if !(2..=MAX_DEGREE).contains(&degree) {
            return Err(Error::InvalidDegree(degree));
        }
        Ok(Alphabet(degree as u8))
    }

    #[inline]
    pub fn degree(self) -> usize {
        self.0 as usize
    }

    pub fn letters(self) -> impl Iterator<Item = u8> + Clone {
        0..self.0
    }

    /// Rejects any word containing a letter outside the alphabet.
    pub fn check(self, word: &[u8]) -> Result<()> {
        match word.iter().find(|&&a| a >= self.0) {
            Some(&a) => Err(Error::AlphabetMismatch {
                letter: a as usize,
                degree: self.degree(),
            }),
            None => Ok(()),
        }
    }

    /// Number of vertices at `level`, or `None` on overflow.
    pub fn level_size(self, level: usize) -> Option<usize> {
        self.degree().checked_pow(level as u32)
    }

    /// All words of length `level` in lexicographic order.
    pub fn words_of_length(self, level: usize) -> impl Iterator<Item = Word> {
        let size = self.level_size(level).expect("level too large to enumerate");
        (0..size).map(move |i| Word::from_index(self, level, i))
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = Error;

    fn try_from(value: usize) -> Result<Self> {
        Alphabet::new(value)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.degree()
    }
}

/// A finite word, i.e. a vertex of the tree. The empty word is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: impl IntoIterator<Item = u8>) -> Self {
        Word(letters.into_iter().collect())
    }

    /// `letter` repeated `n` times.
    pub fn repeat(letter: u8, n: usize) -> Self {
        Word(vec![letter; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Index of the word among all words of its length, most significant letter first.
    pub fn index(&self, alphabet: Alphabet) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &a| acc * alphabet.degree() + a as usize)
    }

    pub fn from_index(alphabet: Alphabet, level: usize, mut index: usize) -> Word {
        let d = alphabet.degree();
        let mut v = vec![0u8; level];
        for slot in v.iter_mut().rev() {
            *slot = (index % d) as u8;
            index /= d;
        }
        Word(v)
    }

    /// Parses the textual form: single digits for `d <= 10`, comma-separated
    /// integers otherwise. The empty string is the root.
    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Word::empty());
        }
        let letters: Vec<u8> = if alphabet.degree() <= 10 && !text.contains(',') {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|v| v as u8)
                        .ok_or_else(|| Error::Parse(format!("bad letter {c:?} in word {text:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            text.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u8>()
                        .map_err(|_| Error::Parse(format!("bad letter {t:?} in word {text:?}")))
                })
                .collect::<Result<_>>()?
        };
        alphabet.check(&letters)?;
        Ok(Word(letters))
    }

    /// Renders the word in the same syntax [`Word::parse`] accepts.
    pub fn render(&self, alphabet: Alphabet) -> String {
        render_letters(&self.0, alphabet)
    }
}

fn render_letters(letters: &[u8], alphabet: Alphabet) -> String {
    if alphabet.degree() <= 10 {
        letters.iter().map(|&a| char::from(b'0' + a)).collect()
    } else {
        letters
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        if self.0.iter().all(|&a| a < 10) {
            for &a in &self.0 {
                write!(f, "{a}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl From<&[u8]> for Word {
    fn from(v: &[u8]) -> Self {
        Word(v.to_vec())
    }
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Self {
        Word(v)
    }
}

/// An eventually periodic infinite word `preperiod · period^∞`, kept in canonical
/// form so that equality of rays is equality of fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ray {
    alphabet: Alphabet,
    preperiod: Vec<u8>,
    period: Vec<u8>,
}

impl Ray {
    pub fn new(alphabet: Alphabet, preperiod: Vec<u8>, period: Vec<u8>) -> Result<Ray> {
        if period.is_empty() {
            return Err(Error::Parse("ray period must be nonempty".into()));
        }
        alphabet.check(&preperiod)?;
        alphabet.check(&period)?;
        let mut ray = Ray {
            alphabet,
            preperiod,
            period,
        };
        ray.canonicalize();
        Ok(ray)
    }

    /// The constant ray `letter^∞`.
    pub fn constant(alphabet: Alphabet, letter: u8) -> Result<Ray> {
        Ray::new(alphabet, Vec::new(), vec![letter])
    }

    fn canonicalize(&mut self) {
        let p = primitive_root_len(&self.period);
        self.period.truncate(p);
        // Absorb trailing preperiod letters into a rotated period.
        while let Some(&last) = self.preperiod.last() {
            if last != *self.period.last().unwrap() {
                break;
            }
            self.preperiod.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    /// Letter at position `i` (0-based).
    pub fn letter(&self, i: usize) -> u8 {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// The first `n` letters.
    pub fn prefix(&self, n: usize) -> Word {
        Word((0..n).map(|i| self.letter(i)).collect())
    }

    /// Parses `"pre(period)"`, e.g. `"01(10)"` or `"(1)"`.
    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Ray> {
        let text = text.trim();
        let open = text
            .find('(')
            .ok_or_else(|| Error::Parse(format!("ray {text:?} lacks '(period)'")))?;
        if !text.ends_with(')') {
            return Err(Error::Parse(format!("ray {text:?} must end with ')'")));
        }
        let pre = Word::parse(&text[..open], alphabet)?;
        let per = Word::parse(&text[open + 1..text.len() - 1], alphabet)?;
        Ray::new(alphabet, pre.0, per.0)
    }

    pub fn render(&self) -> String {
        format!(
            "{}({})",
            render_letters(&self.preperiod, self.alphabet),
            render_letters(&self.period, self.alphabet)
        )
    }
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Length of the primitive root of `w` (smallest `p` dividing `|w|` with `w` `p`-periodic).
fn primitive_root_len(w: &[u8]) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&p| n % p == 0 && (p..n).all(|i| w[i] == w[i - p]))
        .unwrap_or(n)
}

/// The distance `2^(-m)` between two boundary points, `m` the length of their
/// longest common prefix; `Zero` for equal points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryDistance {
    Zero,
    /// `2^(-m)`; ordered so that larger `m` compares as a *smaller* distance.
    NegPow2(std::cmp::Reverse<u32>),
}

impl BoundaryDistance {
    pub fn neg_pow2(m: u32) -> Self {
        BoundaryDistance::NegPow2(std::cmp::Reverse(m))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            BoundaryDistance::Zero => 0.0,
            BoundaryDistance::NegPow2(std::cmp::Reverse(m)) => (-(m as f64)).exp2(),
        }
    }
}

/// Ultrametric on canonical rays.
pub fn boundary_metric(a: &Ray, b: &Ray) -> Result<BoundaryDistance> {
    if a.alphabet != b.alphabet {
        return Err(Error::DegreeMismatch {
            left: a.alphabet.degree(),
            right: b.alphabet.degree(),
        });
    }
    if a == b {
        return Ok(BoundaryDistance::Zero);
    }
    // Distinct eventually periodic words differ within this many letters.
    let horizon = a.preperiod.len().max(b.preperiod.len()) + a.period.len() * b.period.len();
    let m = (0..=horizon)
        .find(|&i| a.letter(i) != b.letter(i))
        .expect("distinct canonical rays must differ before the horizon");
    Ok(BoundaryDistance::neg_pow2(m as u32))
}

/// The clopen set of all rays extending `base`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cylinder {
    pub base: Word,
}

impl Cylinder {
    pub fn new(base: Word) -> Self {
        Cylinder { base }
    }

    pub fn contains(&self, z: &Ray) -> bool {
        z.prefix(self.base.len()) == self.base
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        self.base.is_prefix_of(w)
    }
}
