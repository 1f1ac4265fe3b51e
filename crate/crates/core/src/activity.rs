//! Activity growth: `θ(n)` counts the level-`n` vertices with a nontrivial
//! section, and its growth class is read off the cycle structure of the
//! nontrivial states of the minimal machine.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::wreath::{Automaton, Element};

/// `θ(1), …, θ(levels)` by counting paths that avoid the identity state.
pub fn activity_counts(g: &Element, levels: usize) -> Vec<BigUint> {
    let m = g.machine();
    let live = m.nontrivial_states();
    let n = m.num_states();
    let mut paths: Vec<BigUint> = vec![BigUint::zero(); n];
    paths[0] = BigUint::from(1u32);
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        let mut next = vec![BigUint::zero(); n];
        for s in (0..n).filter(|&s| live[s] && !paths[s].is_zero()) {
            for &t in m.state(s).successors {
                if live[t as usize] {
                    next[t as usize] += &paths[s];
                }
            }
        }
        out.push(next.iter().fold(BigUint::zero(), |acc, c| acc + c));
        paths = next;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActivityClass {
    Bounded,
    Polynomial(usize),
    Exponential,
}

impl ActivityClass {
    pub fn name(self) -> &'static str {
        match self {
            ActivityClass::Bounded => "bounded",
            ActivityClass::Polynomial(_) => "polynomial",
            ActivityClass::Exponential => "exponential",
        }
    }

    /// Polynomial degree, with bounded as degree 0.
    pub fn degree(self) -> Option<usize> {
        match self {
            ActivityClass::Bounded => Some(0),
            ActivityClass::Polynomial(k) => Some(k),
            ActivityClass::Exponential => None,
        }
    }
}

/// One strongly connected component of the nontrivial-state digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub states: Vec<usize>,
    /// Edges inside the component, counted once per letter.
    pub internal_edges: usize,
}

#[derive(Clone, Debug)]
pub struct ActivityProfile {
    pub counts: Vec<BigUint>,
    pub class: ActivityClass,
    pub nontrivial_states: usize,
    pub components: Vec<Component>,
    /// Largest number of cyclic components met along one path.
    pub longest_cycle_chain: usize,
}

pub fn classify_activity(g: &Element) -> ActivityProfile {
    profile(g, 0)
}

pub fn profile(g: &Element, levels: usize) -> ActivityProfile {
    let m = g.machine();
    let live = m.nontrivial_states();
    let comps = components(m, &live);
    let mut comp_of = vec![usize::MAX; m.num_states()];
    for (c, comp) in comps.iter().enumerate() {
        for &s in &comp.states {
            comp_of[s] = c;
        }
    }
    let cyclic: Vec<bool> = comps.iter().map(|c| c.internal_edges > 0).collect();
    let exponential = comps.iter().any(|c| c.internal_edges > c.states.len());
    // Components come out in reverse topological order, so successors are done first.
    let mut chain = vec![0usize; comps.len()];
    for (c, comp) in comps.iter().enumerate() {
        let mut best = 0;
        for &s in &comp.states {
            for &t in m.state(s).successors {
                let t = t as usize;
                if live[t] && comp_of[t] != c {
                    best = best.max(chain[comp_of[t]]);
                }
            }
        }
        chain[c] = best + usize::from(cyclic[c]);
    }
    let longest = chain.iter().copied().max().unwrap_or(0);
    let class = if exponential {
        ActivityClass::Exponential
    } else if longest <= 1 {
        ActivityClass::Bounded
    } else {
        ActivityClass::Polynomial(longest - 1)
    };
    ActivityProfile {
        counts: activity_counts(g, levels),
        class,
        nontrivial_states: live.iter().filter(|&&x| x).count(),
        components: comps,
        longest_cycle_chain: longest,
    }
}

/// Tarjan's algorithm on the states marked `live`; components are emitted in
/// reverse topological order.
fn components(m: &Automaton, live: &[bool]) -> Vec<Component> {
    struct Tarjan<'a> {
        m: &'a Automaton,
        live: &'a [bool],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    impl Tarjan<'_> {
        fn visit(&mut self, s: usize) {
            self.index[s] = Some(self.next);
            self.low[s] = self.next;
            self.next += 1;
            self.stack.push(s);
            self.on_stack[s] = true;
            for &t in self.m.state(s).successors {
                let t = t as usize;
                if !self.live[t] {
                    continue;
                }
                match self.index[t] {
                    None => {
                        self.visit(t);
                        self.low[s] = self.low[s].min(self.low[t]);
                    }
                    Some(i) if self.on_stack[t] => self.low[s] = self.low[s].min(i),
                    _ => {}
                }
            }
            if Some(self.low[s]) == self.index[s] {
                let mut comp = Vec::new();
                loop {
                    let t = self.stack.pop().unwrap();
                    self.on_stack[t] = false;
                    comp.push(t);
                    if t == s {
                        break;
                    }
                }
                comp.sort_unstable();
                self.out.push(comp);
            }
        }
    }
    let n = m.num_states();
    let mut t = Tarjan {
        m,
        live,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for s in 0..n {
        if live[s] && t.index[s].is_none() {
            t.visit(s);
        }
    }
    t.out
        .into_iter()
        .map(|states| {
            let internal_edges = states
                .iter()
                .map(|&s| {
                    m.state(s)
                        .successors
                        .iter()
                        .filter(|&&x| states.binary_search(&(x as usize)).is_ok())
                        .count()
                })
                .sum();
            Component {
                states,
                internal_edges,
            }
        })
        .collect()
}

/// Least-squares slope of `log θ(n)` against `log n` over the second half of
/// the counts; a rough empirical degree used only as a consistency check.
pub fn fitted_degree(counts: &[BigUint]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .skip(counts.len() / 2)
        .filter_map(|(i, c)| {
            let c = c.to_f64()?;
            (c > 0.0).then(|| (((i + 1) as f64).ln(), c.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (den > 0.0).then(|| num / den)
}
