//! Finite-state tree automorphisms in canonical (minimal, BFS-labelled) form.
//!
//! A state carries a root permutation `σ` of the alphabet and one successor per
//! letter: the successor at `x` is the section at `x`. A state acts on a word by
//! `a·t ↦ σ(a) · (successor at a)(t)`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::tree_words::{Alphabet, Word};

/// Borrowed view of one state.
#[derive(Clone, Copy, Debug)]
pub struct MachineState<'a> {
    pub root_perm: &'a [u8],
    pub successors: &'a [u32],
}

impl MachineState<'_> {
    pub fn is_trivial_perm(&self) -> bool {
        self.root_perm.iter().enumerate().all(|(i, &p)| p as usize == i)
    }
}

/// A pointed finite-state automorphism. Always minimal and canonically labelled
/// (initial state 0, remaining states in breadth-first order with letters
/// ascending), so two automata act identically iff they are equal as values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Automaton {
    alphabet: Alphabet,
    /// `perms[s * d + x]` is the image of `x` under state `s`'s root permutation.
    perms: Vec<u8>,
    /// `succ[s * d + x]` is the state reached from `s` by reading `x`.
    succ: Vec<u32>,
}

/// A not-necessarily-minimal machine; the input to [`Automaton::from_raw`].
#[derive(Clone, Debug)]
pub struct RawMachine {
    pub alphabet: Alphabet,
    pub perms: Vec<u8>,
    pub succ: Vec<u32>,
    pub initial: u32,
}

impl RawMachine {
    pub fn num_states(&self) -> usize {
        self.perms.len() / self.alphabet.degree()
    }

    fn validate(&self) -> Result<()> {
        let d = self.alphabet.degree();
        if self.perms.len() != self.succ.len() || self.perms.len() % d != 0 || self.perms.is_empty()
        {
            return Err(Error::InvalidSpec("machine tables have inconsistent sizes".into()));
        }
        let n = self.num_states();
        if self.initial as usize >= n {
            return Err(Error::InvalidSpec("initial state out of range".into()));
        }
        for p in self.perms.chunks(d) {
            check_permutation(p)?;
        }
        if let Some(&s) = self.succ.iter().find(|&&s| s as usize >= n) {
            return Err(Error::InvalidSpec(format!("successor {s} does not resolve")));
        }
        Ok(())
    }
}

/// Verifies that `p` is a bijection of `0..p.len()`.
pub fn check_permutation(p: &[u8]) -> Result<()> {
    let mut seen = vec![false; p.len()];
    for &x in p {
        let x = x as usize;
        if x >= p.len() || std::mem::replace(&mut seen[x], true) {
            return Err(Error::NotABijection(p.iter().map(|&v| v as usize).collect()));
        }
    }
    Ok(())
}

impl Automaton {
    pub fn identity(alphabet: Alphabet) -> Self {
        let d = alphabet.degree();
        Automaton {
            alphabet,
            perms: (0..d as u8).collect(),
            succ: vec![0; d],
        }
    }

    /// Minimizes (bisimulation quotient) and canonically relabels a raw machine.
    pub fn from_raw(raw: &RawMachine) -> Result<Self> {
        raw.validate()?;
        Ok(Self::from_raw_unchecked(raw))
    }

    pub(crate) fn from_raw_unchecked(raw: &RawMachine) -> Self {
        let d = raw.alphabet.degree();
        let n = raw.num_states();
        let class = coarsest_bisimulation(d, n, &raw.perms, &raw.succ);
        let num_classes = class.iter().copied().max().map_or(0, |m| m as usize + 1);

        // Quotient tables indexed by class, using any representative.
        let mut q_perms = vec![0u8; num_classes * d];
        let mut q_succ = vec![0u32; num_classes * d];
        let mut filled = vec![false; num_classes];
        for s in 0..n {
            let c = class[s] as usize;
            if filled[c] {
                continue;
            }
            filled[c] = true;
            q_perms[c * d..(c + 1) * d].copy_from_slice(&raw.perms[s * d..(s + 1) * d]);
            for x in 0..d {
                q_succ[c * d + x] = class[raw.succ[s * d + x] as usize];
            }
        }
        relabel_bfs(raw.alphabet, &q_perms, &q_succ, class[raw.initial as usize])
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.alphabet.degree()
    }

    pub fn num_states(&self) -> usize {
        self.perms.len() / self.degree()
    }

    pub fn state(&self, s: usize) -> MachineState<'_> {
        let d = self.degree();
        MachineState {
            root_perm: &self.perms[s * d..(s + 1) * d],
            successors: &self.succ[s * d..(s + 1) * d],
        }
    }

    #[inline]
    pub(crate) fn perm_at(&self, s: usize, x: u8) -> u8 {
        self.perms[s * self.degree() + x as usize]
    }

    #[inline]
    pub(crate) fn succ_at(&self, s: usize, x: u8) -> usize {
        self.succ[s * self.degree() + x as usize] as usize
    }

    pub fn root_perm(&self) -> &[u8] {
        self.state(0).root_perm
    }

    pub fn is_identity(&self) -> bool {
        self.num_states() == 1 && self.state(0).is_trivial_perm()
    }

    /// The state that acts as the identity, if the machine has one. In a minimal
    /// machine this state is unique and is its own successor at every letter.
    pub fn identity_state(&self) -> Option<usize> {
        (0..self.num_states()).find(|&s| {
            let st = self.state(s);
            st.is_trivial_perm() && st.successors.iter().all(|&t| t as usize == s)
        })
    }

    /// Image of `word` under the automorphism rooted at state `start`.
    pub fn apply_from(&self, start: usize, word: &[u8]) -> Vec<u8> {
        let mut s = start;
        word.iter()
            .map(|&a| {
                let b = self.perm_at(s, a);
                s = self.succ_at(s, a);
                b
            })
            .collect()
    }

    pub fn apply(&self, word: &[u8]) -> Vec<u8> {
        self.apply_from(0, word)
    }

    /// State reached after reading `word`.
    pub fn walk(&self, word: &[u8]) -> usize {
        word.iter().fold(0, |s, &a| self.succ_at(s, a))
    }

    /// The automorphism rooted at state `s`, canonically relabelled.
    pub fn sub_automaton(&self, s: usize) -> Automaton {
        if s == 0 {
            return self.clone();
        }
        relabel_bfs(self.alphabet, &self.perms, &self.succ, s as u32)
    }

    pub fn section(&self, word: &[u8]) -> Automaton {
        self.sub_automaton(self.walk(word))
    }

    /// Product acting by `h` first, then `self`.
    pub fn compose(&self, h: &Automaton) -> Automaton {
        assert_eq!(self.alphabet, h.alphabet, "compose across alphabets");
        if h.is_identity() {
            return self.clone();
        }
        if self.is_identity() {
            return h.clone();
        }
        let d = self.degree();
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs: Vec<(u32, u32)> = vec![(0, 0)];
        index.insert((0, 0), 0);
        let mut perms = Vec::new();
        let mut succ = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (gs, hs) = pairs[i];
            for x in 0..d as u8 {
                let y = h.perm_at(hs as usize, x);
                perms.push(self.perm_at(gs as usize, y));
                let next = (
                    self.succ_at(gs as usize, y) as u32,
                    h.succ_at(hs as usize, x) as u32,
                );
                let id = *index.entry(next).or_insert_with(|| {
                    pairs.push(next);
                    (pairs.len() - 1) as u32
                });
                succ.push(id);
            }
            i += 1;
        }
        debug_assert!(pairs.len() <= self.num_states() * h.num_states());
        Automaton::from_raw_unchecked(&RawMachine {
            alphabet: self.alphabet,
            perms,
            succ,
            initial: 0,
        })
    }

    pub fn inverse(&self) -> Automaton {
        let d = self.degree();
        let n = self.num_states();
        let mut perms = vec![0u8; n * d];
        let mut succ = vec![0u32; n * d];
        for s in 0..n {
            for x in 0..d {
                let y = self.perms[s * d + x] as usize;
                // (g⁻¹)|_y = (g|_x)⁻¹ where g(x) = y
                perms[s * d + y] = x as u8;
                succ[s * d + y] = self.succ[s * d + x];
            }
        }
        relabel_bfs(self.alphabet, &perms, &succ, 0)
    }

    /// Shortest moved word (lexicographically least among the shortest), or `None`
    /// when the automorphism is the identity.
    pub fn moved_word(&self) -> Option<Word> {
        if self.is_identity() {
            return None;
        }
        let d = self.degree();
        let n = self.num_states();
        // best[s]: lexicographically least word of the current length reaching s.
        let mut best: Vec<Option<Vec<u8>>> = vec![None; n];
        best[0] = Some(Vec::new());
        for _ in 0..=n {
            let mut candidate: Option<Vec<u8>> = None;
            for (s, w) in best.iter().enumerate() {
                let Some(w) = w else { continue };
                if let Some(x) = (0..d as u8).find(|&x| self.perm_at(s, x) != x) {
                    let mut full = w.clone();
                    full.push(x);
                    if candidate.as_ref().is_none_or(|c| full < *c) {
                        candidate = Some(full);
                    }
                }
            }
            if let Some(c) = candidate {
                return Some(Word(c));
            }
            let mut next: Vec<Option<Vec<u8>>> = vec![None; n];
            for (s, w) in best.iter().enumerate() {
                let Some(w) = w else { continue };
                for x in 0..d as u8 {
                    let t = self.succ_at(s, x);
                    let mut ext = w.clone();
                    ext.push(x);
                    if next[t].as_ref().is_none_or(|c| ext < *c) {
                        next[t] = Some(ext);
                    }
                }
            }
            best = next;
        }
        unreachable!("non-identity minimal machine has a state with a nontrivial permutation")
    }

    /// States whose sub-automaton is not the identity.
    pub fn nontrivial_states(&self) -> Vec<bool> {
        let id = self.identity_state();
        (0..self.num_states()).map(|s| Some(s) != id).collect()
    }
}

impl fmt::Debug for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for s in 0..self.num_states() {
            let st = self.state(s);
            l.entry(&(st.root_perm, st.successors));
        }
        l.finish()
    }
}

/// Moore-style refinement: states start grouped by root permutation and are split
/// by the classes of their successors until stable. The fixpoint identifies states
/// exactly when they act identically on the tree.
fn coarsest_bisimulation(d: usize, n: usize, perms: &[u8], succ: &[u32]) -> Vec<u32> {
    let mut class = vec![0u32; n];
    let mut ids: HashMap<&[u8], u32> = HashMap::new();
    for s in 0..n {
        let next = ids.len() as u32;
        class[s] = *ids.entry(&perms[s * d..(s + 1) * d]).or_insert(next);
    }
    let mut count = ids.len();
    let mut sig = Vec::with_capacity(d + 1);
    loop {
        let mut table: HashMap<Vec<u32>, u32> = HashMap::with_capacity(count * 2);
        let mut refined = vec![0u32; n];
        for s in 0..n {
            sig.clear();
            sig.push(class[s]);
            sig.extend(succ[s * d..(s + 1) * d].iter().map(|&t| class[t as usize]));
            let next = table.len() as u32;
            refined[s] = *table.entry(sig.clone()).or_insert(next);
        }
        let new_count = table.len();
        class = refined;
        if new_count == count {
            return class;
        }
        count = new_count;
    }
}

/// Relabels the states reachable from `start` in breadth-first order (letters ascending).
fn relabel_bfs(alphabet: Alphabet, perms: &[u8], succ: &[u32], start: u32) -> Automaton {
    let d = alphabet.degree();
    let n = perms.len() / d;
    let mut label = vec![u32::MAX; n];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    label[start as usize] = 0;
    queue.push_back(start as usize);
    while let Some(s) = queue.pop_front() {
        order.push(s);
        for x in 0..d {
            let t = succ[s * d + x] as usize;
            if label[t] == u32::MAX {
                label[t] = (order.len() + queue.len()) as u32;
                queue.push_back(t);
            }
        }
    }
    let mut new_perms = Vec::with_capacity(order.len() * d);
    let mut new_succ = Vec::with_capacity(order.len() * d);
    for &s in &order {
        new_perms.extend_from_slice(&perms[s * d..(s + 1) * d]);
        new_succ.extend(succ[s * d..(s + 1) * d].iter().map(|&t| label[t as usize]));
    }
    Automaton {
        alphabet,
        perms: new_perms,
        succ: new_succ,
    }
}
