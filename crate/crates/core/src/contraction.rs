//! Contraction: the nucleus, the self-replicating sets `N₀ ⊇ N₁`, torsion
//! orders, and the contracting-group Hausdorff criterion.
//!
//! The nucleus is computed as a set of recurrent states. A state of a product
//! machine is recurrent when it is reachable from a cycle; such states are
//! sections of themselves at arbitrarily deep vertices, so every one of them
//! belongs to the nucleus. Starting from the recurrent states of the
//! generators, the set is closed under "recurrent states of pairwise
//! products" until nothing new appears.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use num_integer::Integer;
use rayon::prelude::*;

use crate::ball::name_elements;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::hausdorff::{search_element, Certificate, SearchBounds};
use crate::tree_words::Word;
use crate::wreath::{Automaton, Element};

pub const DEFAULT_SIZE_CAP: usize = 500;
pub const DEFAULT_DEPTH_CAP: usize = 16;

/// Radius of the ball used to give nucleus elements short names.
const NAMING_RADIUS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NucleusStatus {
    Certified,
    BudgetExceeded,
}

impl NucleusStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            NucleusStatus::Certified => "certified",
            NucleusStatus::BudgetExceeded => "budget_exceeded",
        }
    }
}

#[derive(Clone, Debug)]
pub struct NucleusResult {
    pub status: NucleusStatus,
    /// The nucleus when certified, otherwise the partial set reached.
    pub elements: Vec<Element>,
    /// Depth from which all sections of generators and of pairwise products
    /// lie in the set.
    pub depth_bound: usize,
    pub caps_hit: Vec<String>,
}

impl NucleusResult {
    pub fn is_certified(&self) -> bool {
        self.status == NucleusStatus::Certified
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.elements.contains(g)
    }
}

/// States reachable from some cycle of the machine.
fn recurrent_states(m: &Automaton) -> Vec<usize> {
    let n = m.num_states();
    let d = m.degree() as u8;
    let reach = |from: usize| {
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = (0..d).map(|x| m.succ_at(from, x)).collect();
        while let Some(s) = stack.pop() {
            if !seen[s] {
                seen[s] = true;
                stack.extend((0..d).map(|x| m.succ_at(s, x)));
            }
        }
        seen
    };
    let mut out = vec![false; n];
    for s in 0..n {
        let r = reach(s);
        if r[s] {
            out[s] = true;
            for (t, &hit) in r.iter().enumerate() {
                out[t] |= hit;
            }
        }
    }
    (0..n).filter(|&s| out[s]).collect()
}

/// First depth at which every section of `m` lies in `set`, if within `cap`.
fn settle_depth(m: &Automaton, set: &HashSet<Arc<Automaton>>, cap: usize) -> Option<usize> {
    let mut layer: Vec<usize> = vec![0];
    let mut memo: HashMap<usize, bool> = HashMap::new();
    for depth in 0..=cap.max(m.num_states()) {
        let inside = layer.iter().all(|&s| {
            *memo
                .entry(s)
                .or_insert_with(|| set.contains(&m.sub_automaton(s)))
        });
        if inside {
            return (depth <= cap).then_some(depth);
        }
        let mut next: Vec<usize> = layer
            .iter()
            .flat_map(|&s| (0..m.degree() as u8).map(move |x| m.succ_at(s, x)))
            .collect();
        next.sort_unstable();
        next.dedup();
        layer = next;
    }
    None
}

/// Computes the nucleus, giving up once it exceeds `size_cap` elements or some
/// product needs more than `depth_cap` levels to settle.
pub fn nucleus(group: &Group, size_cap: usize, depth_cap: usize) -> NucleusResult {
    let mut order: Vec<Arc<Automaton>> = Vec::new();
    let mut set: HashSet<Arc<Automaton>> = HashSet::new();
    let mut add = |m: Automaton, order: &mut Vec<Arc<Automaton>>| {
        let m = Arc::new(m);
        if set.insert(Arc::clone(&m)) {
            order.push(m);
        }
    };
    add(Automaton::identity(group.alphabet()), &mut order);
    let gens: Vec<Element> = group
        .generators()
        .iter()
        .flat_map(|g| [g.clone(), g.inverse()])
        .collect();
    for g in &gens {
        for s in recurrent_states(g.machine()) {
            add(g.machine().sub_automaton(s), &mut order);
        }
    }
    let mut caps_hit = Vec::new();
    let mut done = 0;
    while done < order.len() && caps_hit.is_empty() {
        let frontier = order.len();
        // Pairs with at least one factor first seen in the previous round.
        let pairs: Vec<(usize, usize)> = (0..frontier)
            .flat_map(|i| (0..frontier).map(move |j| (i, j)))
            .filter(|&(i, j)| i >= done || j >= done)
            .collect();
        let found: Vec<Vec<Automaton>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let p = order[i].compose(&order[j]);
                recurrent_states(&p)
                    .into_iter()
                    .map(|s| p.sub_automaton(s))
                    .collect()
            })
            .collect();
        done = frontier;
        for m in found.into_iter().flatten() {
            add(m, &mut order);
            if order.len() > size_cap {
                caps_hit.push(format!("size_cap {size_cap}"));
                break;
            }
        }
    }
    let mut depth_bound = 0;
    if caps_hit.is_empty() {
        let set: HashSet<Arc<Automaton>> = order.iter().cloned().collect();
        let mut machines: Vec<Automaton> = gens.iter().map(|g| g.machine().clone()).collect();
        machines.extend(
            order
                .iter()
                .flat_map(|a| order.iter().map(move |b| a.compose(b))),
        );
        let depths: Vec<Option<usize>> = machines
            .par_iter()
            .map(|m| settle_depth(m, &set, depth_cap))
            .collect();
        match depths.into_iter().collect::<Option<Vec<_>>>() {
            Some(ds) => depth_bound = ds.into_iter().max().unwrap_or(0),
            None => caps_hit.push(format!("depth_cap {depth_cap}")),
        }
    }
    let status = if caps_hit.is_empty() {
        NucleusStatus::Certified
    } else {
        NucleusStatus::BudgetExceeded
    };
    let mut elements: Vec<Element> = order
        .into_iter()
        .map(|m| Element::from_shared(m, None))
        .collect();
    if status == NucleusStatus::Certified {
        name_elements(group, &mut elements, NAMING_RADIUS);
        sort_by_name(&mut elements);
    }
    NucleusResult {
        status,
        elements,
        depth_bound,
        caps_hit,
    }
}

/// Named elements in shortlex order of their words, unnamed ones after.
fn sort_by_name(elements: &mut [Element]) {
    elements.sort_by(|a, b| match (a.word(), b.word()) {
        (Some(x), Some(y)) => x.shortlex_cmp(y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.cmp(b),
    });
}

/// An element together with a nonempty word witnessing membership.
#[derive(Clone, Debug)]
pub struct SelfSection {
    pub element: Element,
    pub word: Word,
}

#[derive(Clone, Debug)]
pub struct SpecialSets {
    /// Elements with `g|_u = g` for some nonempty `u`.
    pub n0: Vec<SelfSection>,
    /// Elements with `g|_u = g` and `g(u) = u` for some nonempty `u`.
    pub n1: Vec<SelfSection>,
}

/// Shortest, then lexicographically least, nonempty `u` leading from the
/// initial state back to itself; with `fixed_only`, every letter read must be
/// fixed by the state reading it.
fn return_word(m: &Automaton, fixed_only: bool) -> Option<Word> {
    let d = m.degree() as u8;
    let mut path: Vec<Option<Vec<u8>>> = vec![None; m.num_states()];
    let mut queue = VecDeque::new();
    queue.push_back((0usize, Vec::new()));
    while let Some((s, w)) = queue.pop_front() {
        for x in 0..d {
            if fixed_only && m.perm_at(s, x) != x {
                continue;
            }
            let t = m.succ_at(s, x);
            let mut next = w.clone();
            next.push(x);
            if t == 0 {
                return Some(Word(next));
            }
            if path[t].is_none() {
                path[t] = Some(next.clone());
                queue.push_back((t, next));
            }
        }
    }
    None
}

/// `N₀` and `N₁` inside a certified nucleus. Membership is decided exactly on
/// the minimal machine: `g|_u = g` iff `u` leads from the initial state back to it.
pub fn special_sets(nucleus: &NucleusResult) -> Result<SpecialSets> {
    if !nucleus.is_certified() {
        return Err(Error::Precondition(
            "N0 and N1 need a certified nucleus".into(),
        ));
    }
    let mut n0 = Vec::new();
    let mut n1 = Vec::new();
    for g in &nucleus.elements {
        if let Some(u) = return_word(g.machine(), false) {
            n0.push(SelfSection {
                element: g.clone(),
                word: u,
            });
        }
        if let Some(u) = return_word(g.machine(), true) {
            n1.push(SelfSection {
                element: g.clone(),
                word: u,
            });
        }
    }
    Ok(SpecialSets { n0, n1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderResult {
    Finite(u64),
    /// The level orders grew past the cap, or levels ran out, at `level`;
    /// `lower_bound` is the largest level order seen.
    ExceedsCap { level: usize, lower_bound: u64 },
}

pub const DEFAULT_ORDER_CAP: u64 = 1 << 20;
pub const DEFAULT_LEVEL_CAP: usize = 64;

fn perm_order(p: &[u8]) -> u64 {
    let mut seen = vec![false; p.len()];
    let mut order = 1u64;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut len = 0u64;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = p[j] as usize;
            len += 1;
        }
        order = order.lcm(&len);
    }
    order
}

type OrderMemo = HashMap<(Arc<Automaton>, usize), Option<u64>>;

/// Order of the action on level `n`, or `None` once it exceeds `cap`.
fn level_order(g: &Arc<Automaton>, n: usize, cap: u64, memo: &mut OrderMemo) -> Option<u64> {
    if n == 0 || g.is_identity() {
        return Some(1);
    }
    if let Some(&r) = memo.get(&(Arc::clone(g), n)) {
        return r;
    }
    let k = perm_order(g.root_perm());
    let h = Element::from_shared(Arc::clone(g), None).power(k as i64);
    let mut l = 1u64;
    let mut result = Some(0);
    for x in 0..g.degree() as u8 {
        let sub = Arc::new(h.machine().section(&[x]));
        match level_order(&sub, n - 1, cap, memo) {
            Some(o) => {
                l = l.lcm(&o);
                if k.checked_mul(l).is_none_or(|t| t > cap) {
                    result = None;
                    break;
                }
            }
            None => {
                result = None;
                break;
            }
        }
    }
    let result = result.map(|_| k * l);
    memo.insert((Arc::clone(g), n), result);
    result
}

/// Order of `g` from the orders of its level actions: the first level order
/// `o` with `g^o = 1` is the order.
pub fn torsion_order(g: &Element, order_cap: u64, level_cap: usize) -> OrderResult {
    let mut memo = OrderMemo::new();
    let m = Arc::clone(g.shared_machine());
    let mut last = 1;
    for n in 1..=level_cap {
        match level_order(&m, n, order_cap, &mut memo) {
            None => {
                return OrderResult::ExceedsCap {
                    level: n,
                    lower_bound: last,
                }
            }
            Some(o) => {
                last = o;
                if g.power(o as i64).is_trivial() {
                    return OrderResult::Finite(o);
                }
            }
        }
    }
    if g.is_trivial() {
        return OrderResult::Finite(1);
    }
    OrderResult::ExceedsCap {
        level: level_cap,
        lower_bound: last,
    }
}

/// Caps for [`criterion_report`].
#[derive(Clone, Copy, Debug)]
pub struct CriterionCaps {
    pub size_cap: usize,
    pub depth_cap: usize,
    pub search: SearchBounds,
}

impl Default for CriterionCaps {
    fn default() -> Self {
        CriterionCaps {
            size_cap: DEFAULT_SIZE_CAP,
            depth_cap: DEFAULT_DEPTH_CAP,
            search: SearchBounds {
                word_bound: 0,
                preperiod_bound: 4,
                period_bound: 6,
                depth: 30,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    HausdorffCertified,
    NonHausdorffCertified,
    Inconclusive(String),
}

impl Verdict {
    pub fn render(&self) -> String {
        match self {
            Verdict::HausdorffCertified => {
                "Hausdorff certified (no torsion non-Hausdorff candidates exist)".into()
            }
            Verdict::NonHausdorffCertified => "non-Hausdorff certified".into(),
            Verdict::Inconclusive(why) => format!("inconclusive ({why})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub nucleus: NucleusResult,
    pub n1: Vec<SelfSection>,
    pub verdict: Verdict,
    pub witnesses: Vec<Certificate>,
}

/// For a contracting group the germinal groupoid is non-Hausdorff exactly when
/// some element of `N₁` is a non-Hausdorff element. When `N₁` is trivial the
/// groupoid is Hausdorff; otherwise each nontrivial `N₁` element is searched.
pub fn criterion_report(group: &Group, caps: CriterionCaps) -> CriterionReport {
    let nucleus = nucleus(group, caps.size_cap, caps.depth_cap);
    let Ok(sets) = special_sets(&nucleus) else {
        return CriterionReport {
            nucleus,
            n1: Vec::new(),
            verdict: Verdict::Inconclusive(
                "contraction not certified within caps; the criterion does not apply".into(),
            ),
            witnesses: Vec::new(),
        };
    };
    let candidates: Vec<&SelfSection> = sets.n1.iter().filter(|s| !s.element.is_trivial()).collect();
    if candidates.is_empty() {
        return CriterionReport {
            nucleus,
            n1: sets.n1,
            verdict: Verdict::HausdorffCertified,
            witnesses: Vec::new(),
        };
    }
    let witnesses: Vec<Certificate> = candidates
        .par_iter()
        .map(|s| search_element(&s.element, caps.search))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let verdict = if witnesses.is_empty() {
        Verdict::Inconclusive("no certificate found for the torsion candidates within bounds".into())
    } else {
        Verdict::NonHausdorffCertified
    };
    CriterionReport {
        nucleus,
        n1: sets.n1,
        verdict,
        witnesses,
    }
}
