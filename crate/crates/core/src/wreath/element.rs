use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tree_words::{Alphabet, Ray, Word};

use super::automaton::{check_permutation, Automaton, RawMachine};

/// Words longer than this are not tracked alongside an element's machine.
pub const MAX_TRACKED_WORD: usize = 1 << 14;

/// One factor of a group word: a generator index, possibly inverted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenLetter {
    pub gen: u16,
    pub inverse: bool,
}

impl GenLetter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        GenLetter {
            gen: gen as u16,
            inverse,
        }
    }

    pub fn inv(self) -> Self {
        GenLetter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }
}

/// A formal product of generators; the rightmost factor acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupWord(pub Vec<GenLetter>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn generator(gen: usize) -> Self {
        GroupWord(vec![GenLetter::new(gen, false)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// `self · other` (so `other` acts first), freely reduced at the seam.
    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord(out)
    }

    pub fn free_reduce(&self) -> GroupWord {
        GroupWord::identity().mul(self)
    }

    pub fn pow(&self, k: i64) -> GroupWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = GroupWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Short-lex order: length first, then factor by factor with `g < g⁻¹ < h` for `g < h`.
    pub fn shortlex_cmp(&self, other: &GroupWord) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }

    /// Renders with whitespace-separated tokens `name` / `name^-1`; `""` for the identity.
    pub fn render(&self, names: &[String]) -> String {
        self.0
            .iter()
            .map(|l| {
                let name = &names[l.gen as usize];
                if l.inverse {
                    format!("{name}^-1")
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A group element: its canonical machine, together with a group word
/// producing it when one is known. Equality and hashing use the machine only.
#[derive(Clone)]
pub struct Element {
    machine: Arc<Automaton>,
    word: Option<GroupWord>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.machine, &other.machine) || self.machine == other.machine
    }
}

impl Eq for Element {}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.machine.hash(state);
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.machine.cmp(&other.machine)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Element")
            .field("word", &self.word)
            .field("machine", &self.machine)
            .finish()
    }
}

/// Outcome of the word problem for one element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub is_identity: bool,
    /// Shortest moved word (lexicographically least), present iff not the identity.
    pub witness: Option<Word>,
}

/// The permutation an element induces on level `n` together with all its sections there.
#[derive(Clone, Debug)]
pub struct LevelNormalForm {
    pub level: usize,
    /// `perm[i]` is the index of the image of the `i`-th word of length `level`.
    pub perm: Vec<usize>,
    /// `sections[i]` is the section at the `i`-th word of length `level`.
    pub sections: Vec<Element>,
}

impl LevelNormalForm {
    pub fn is_trivial_perm(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn section_at(&self, alphabet: Alphabet, w: &Word) -> &Element {
        &self.sections[w.index(alphabet)]
    }
}

impl Element {
    pub fn identity(alphabet: Alphabet) -> Self {
        Element {
            machine: Arc::new(Automaton::identity(alphabet)),
            word: Some(GroupWord::identity()),
        }
    }

    pub fn from_machine(machine: Automaton) -> Self {
        Element {
            machine: Arc::new(machine),
            word: None,
        }
    }

    pub fn from_shared(machine: Arc<Automaton>, word: Option<GroupWord>) -> Self {
        Element { machine, word }
    }

    pub fn with_word(mut self, word: GroupWord) -> Self {
        self.word = (word.len() <= MAX_TRACKED_WORD).then_some(word);
        self
    }

    pub fn without_word(mut self) -> Self {
        self.word = None;
        self
    }

    /// Builds `g` from its root permutation and sections in slot form:
    /// `sections[x]` is `g|_x`.
    pub fn from_recursion(perm: &[u8], sections: &[Element]) -> Result<Self> {
        let alphabet = Alphabet::new(perm.len())?;
        if sections.len() != perm.len() {
            return Err(Error::InvalidSpec(format!(
                "expected {} sections, got {}",
                perm.len(),
                sections.len()
            )));
        }
        check_permutation(perm)?;
        let d = alphabet.degree();
        let mut perms = perm.to_vec();
        let mut succ = vec![0u32; d];
        for (x, e) in sections.iter().enumerate() {
            if e.alphabet() != alphabet {
                return Err(Error::DegreeMismatch {
                    left: d,
                    right: e.degree(),
                });
            }
            let offset = (perms.len() / d) as u32;
            succ[x] = offset;
            let m = e.machine();
            for s in 0..m.num_states() {
                let st = m.state(s);
                perms.extend_from_slice(st.root_perm);
                succ.extend(st.successors.iter().map(|&t| t + offset));
            }
        }
        Ok(Element::from_machine(Automaton::from_raw(&RawMachine {
            alphabet,
            perms,
            succ,
            initial: 0,
        })?))
    }

    /// Builds `g = (t_0, …, t_{d-1})·σ` where the tuple is indexed by image
    /// position: `t_j = g|_{σ⁻¹(j)}`, i.e. the permutation is applied first.
    pub fn from_image_indexed(perm: &[u8], tuple: &[Element]) -> Result<Self> {
        check_permutation(perm)?;
        if tuple.len() != perm.len() {
            return Err(Error::InvalidSpec("tuple length differs from degree".into()));
        }
        let sections: Vec<Element> = perm.iter().map(|&y| tuple[y as usize].clone()).collect();
        Element::from_recursion(perm, &sections)
    }

    pub fn machine(&self) -> &Automaton {
        &self.machine
    }

    pub fn shared_machine(&self) -> &Arc<Automaton> {
        &self.machine
    }

    pub fn word(&self) -> Option<&GroupWord> {
        self.word.as_ref()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.machine.alphabet()
    }

    pub fn degree(&self) -> usize {
        self.machine.degree()
    }

    pub fn num_states(&self) -> usize {
        self.machine.num_states()
    }

    pub fn root_perm(&self) -> &[u8] {
        self.machine.root_perm()
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.alphabet().check(&w.0)?;
        Ok(Word(self.machine.apply(&w.0)))
    }

    /// The section `g|_w`. The returned element carries no word; see
    /// `Group::section` for the word-tracking variant.
    pub fn section(&self, w: &Word) -> Result<Element> {
        self.alphabet().check(&w.0)?;
        if w.is_empty() {
            return Ok(self.clone());
        }
        Ok(Element::from_machine(self.machine.section(&w.0)))
    }

    /// `self · h`: acts by `h` first.
    pub fn compose(&self, h: &Element) -> Result<Element> {
        if self.alphabet() != h.alphabet() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: h.degree(),
            });
        }
        let machine = if h.machine.is_identity() {
            Arc::clone(&self.machine)
        } else if self.machine.is_identity() {
            Arc::clone(&h.machine)
        } else {
            Arc::new(self.machine.compose(&h.machine))
        };
        let word = match (&self.word, &h.word) {
            (Some(a), Some(b)) if a.len() + b.len() <= MAX_TRACKED_WORD => Some(a.mul(b)),
            _ => None,
        };
        Ok(Element { machine, word })
    }

    pub fn inverse(&self) -> Element {
        Element {
            machine: Arc::new(self.machine.inverse()),
            word: self.word.as_ref().map(GroupWord::inverse),
        }
    }

    /// `self^k` by binary exponentiation over canonical machines.
    pub fn power(&self, k: i64) -> Element {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc_machine = Arc::new(Automaton::identity(self.alphabet()));
        let mut sq = Arc::clone(&base.machine);
        while e > 0 {
            if e & 1 == 1 {
                acc_machine = Arc::new(acc_machine.compose(&sq));
            }
            e >>= 1;
            if e > 0 {
                sq = Arc::new(sq.compose(&sq));
            }
        }
        let word = base.word.as_ref().and_then(|w| {
            let len = w.len() as u128 * k.unsigned_abs() as u128;
            (len <= MAX_TRACKED_WORD as u128).then(|| w.pow(k.unsigned_abs() as i64))
        });
        Element {
            machine: acc_machine,
            word,
        }
    }

    /// `[g, h] = g⁻¹ h⁻¹ g h`.
    pub fn commutator(&self, h: &Element) -> Result<Element> {
        self.inverse()
            .compose(&h.inverse())?
            .compose(self)?
            .compose(h)
    }

    pub fn is_identity(&self) -> IdentityCheck {
        let witness = self.machine.moved_word();
        IdentityCheck {
            is_identity: witness.is_none(),
            witness,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.machine.is_identity()
    }

    pub fn equals(&self, other: &Element) -> bool {
        self == other
    }

    /// `g` fixes the vertex `u` and `g|_u = 1`, i.e. `g` is the identity on the cylinder at `u`.
    pub fn is_trivial_on_cylinder(&self, u: &Word) -> bool {
        let m = &self.machine;
        let Some(id) = m.identity_state() else {
            return false;
        };
        m.apply(&u.0) == u.0 && m.walk(&u.0) == id
    }

    pub fn level_permutation(&self, level: usize) -> Result<Vec<usize>> {
        let a = self.alphabet();
        let size = a
            .level_size(level)
            .ok_or_else(|| Error::CapExceeded(format!("level {level} overflows")))?;
        Ok(level_images(&self.machine, level, size)
            .into_iter()
            .map(|(img, _)| img)
            .collect())
    }

    pub fn level_normal_form(&self, level: usize) -> Result<LevelNormalForm> {
        let a = self.alphabet();
        let size = a
            .level_size(level)
            .ok_or_else(|| Error::CapExceeded(format!("level {level} overflows")))?;
        let images = level_images(&self.machine, level, size);
        let mut cache: HashMap<usize, Element> = HashMap::new();
        let mut perm = Vec::with_capacity(size);
        let mut sections = Vec::with_capacity(size);
        for (img, state) in images {
            perm.push(img);
            let e = cache
                .entry(state)
                .or_insert_with(|| Element::from_machine(self.machine.sub_automaton(state)));
            sections.push(e.clone());
        }
        Ok(LevelNormalForm {
            level,
            perm,
            sections,
        })
    }

    /// Whether the automorphism fixes the infinite word `z`.
    pub fn fixes_ray(&self, z: &Ray) -> bool {
        fixes_ray_from(&self.machine, 0, z)
    }

    /// All eventually periodic rays fixed by `g` whose canonical preperiod has
    /// length at most `max_pre` and whose period has length at most `max_period`.
    pub fn fixed_rays(&self, max_pre: usize, max_period: usize) -> BTreeSet<Ray> {
        let m = &self.machine;
        let a = self.alphabet();
        let mut out = BTreeSet::new();
        if max_period == 0 {
            return out;
        }
        let mut prefixes: Vec<(Vec<u8>, usize)> = Vec::new();
        fixed_paths(m, 0, max_pre, &mut Vec::new(), &mut prefixes, true);
        for (pre, s) in prefixes {
            let mut periods = Vec::new();
            fixed_paths(m, s, max_period, &mut Vec::new(), &mut periods, false);
            for (per, _) in periods {
                if period_stays_fixed(m, s, &per) {
                    let ray = Ray::new(a, pre.clone(), per).expect("letters come from the alphabet");
                    if ray.preperiod().len() <= max_pre && ray.period().len() <= max_period {
                        out.insert(ray);
                    }
                }
            }
        }
        out
    }

}

/// Images and sections at every vertex of `level`, by word index.
fn level_images(m: &Automaton, level: usize, size: usize) -> Vec<(usize, usize)> {
    let d = m.degree();
    // Breadth-first expansion: (image index, state) for each vertex at the current level.
    let mut layer: Vec<(usize, usize)> = vec![(0, 0)];
    for _ in 0..level {
        let mut next = Vec::with_capacity(layer.len() * d);
        for &(img, s) in &layer {
            for x in 0..d as u8 {
                next.push((img * d + m.perm_at(s, x) as usize, m.succ_at(s, x)));
            }
        }
        layer = next;
    }
    debug_assert_eq!(layer.len(), size);
    layer
}

/// Depth-first enumeration of words along letters fixed by the current state.
fn fixed_paths(
    m: &Automaton,
    s: usize,
    budget: usize,
    path: &mut Vec<u8>,
    out: &mut Vec<(Vec<u8>, usize)>,
    include_empty: bool,
) {
    if include_empty || !path.is_empty() {
        out.push((path.clone(), s));
    }
    if budget == 0 {
        return;
    }
    for x in 0..m.degree() as u8 {
        if m.perm_at(s, x) == x {
            path.push(x);
            fixed_paths(m, m.succ_at(s, x), budget - 1, path, out, include_empty);
            path.pop();
        }
    }
}

/// Whether repeating `period` forever from state `s` only reads fixed letters.
fn period_stays_fixed(m: &Automaton, s: usize, period: &[u8]) -> bool {
    let mut seen = HashSet::new();
    let mut t = s;
    while seen.insert(t) {
        for &x in period {
            if m.perm_at(t, x) != x {
                return false;
            }
            t = m.succ_at(t, x);
        }
    }
    true
}

fn fixes_ray_from(m: &Automaton, start: usize, z: &Ray) -> bool {
    let mut s = start;
    for &x in z.preperiod() {
        if m.perm_at(s, x) != x {
            return false;
        }
        s = m.succ_at(s, x);
    }
    period_stays_fixed(m, s, z.period())
}

/// States at positions `0, 1, 2, …` along `z` (state at position `j` is the
/// section at the first `j` letters). Returns the sequence up to the first repeat
/// of `(state, phase)` and the index where the periodic part starts.
pub(crate) fn walk_along_ray(m: &Automaton, z: &Ray) -> (Vec<usize>, usize) {
    let pre = z.preperiod().len();
    let per = z.period().len();
    let mut states = Vec::new();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut s = 0;
    let mut j = 0;
    loop {
        if j >= pre {
            let key = (s, (j - pre) % per);
            if let Some(&first) = seen.get(&key) {
                return (states, first);
            }
            seen.insert(key, j);
        }
        states.push(s);
        s = m.succ_at(s, z.letter(j));
        j += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn sigma() -> Element {
        let one = Element::identity(bin());
        Element::from_recursion(&[1, 0], &[one.clone(), one]).unwrap()
    }

    #[test]
    fn sigma_basics() {
        let s = sigma();
        assert_eq!(s.apply(&Word(vec![0, 1])).unwrap(), Word(vec![1, 1]));
        assert_eq!(s.inverse(), s);
        assert!(s.compose(&s).unwrap().is_identity().is_identity);
        assert!(s.fixed_rays(3, 3).is_empty());
        assert_eq!(s.power(0), Element::identity(bin()));
    }

    #[test]
    fn image_indexed_matches_slot_form() {
        let s = sigma();
        let one = Element::identity(bin());
        let g = Element::from_image_indexed(&[1, 0], &[s.clone(), one.clone()]).unwrap();
        let h = Element::from_recursion(&[1, 0], &[one, s]).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn word_algebra() {
        let w = GroupWord(vec![GenLetter::new(0, false), GenLetter::new(1, false)]);
        assert_eq!(w.mul(&w.inverse()), GroupWord::identity());
        assert_eq!(w.pow(-2).len(), 4);
        assert_eq!(w.pow(-2), w.inverse().pow(2));
        let names = vec!["a1".to_string(), "a2".to_string()];
        assert_eq!(w.inverse().render(&names), "a2^-1 a1^-1");
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        let s = sigma();
        assert!(s.apply(&Word(vec![2])).is_err());
        assert!(s.section(&Word(vec![5])).is_err());
    }

    #[test]
    fn walk_along_constant_ray() {
        let s = sigma();
        let z = Ray::constant(bin(), 1).unwrap();
        let (states, start) = walk_along_ray(s.machine(), &z);
        // σ then identity forever
        assert_eq!(states.len(), 2);
        assert_eq!(start, 1);
    }
}
