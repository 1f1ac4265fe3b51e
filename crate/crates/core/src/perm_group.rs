//! Permutation groups through a base and strong generating set (deterministic
//! Schreier–Sims).
//!
//! Permutations are image arrays: `p[x]` is the image of `x`. Products follow
//! the group convention used everywhere else, `(p·q)(x) = p(q(x))`.

use std::collections::HashSet;

use num_bigint::BigUint;

pub type Perm = Vec<u32>;

pub fn identity(n: usize) -> Perm {
    (0..n as u32).collect()
}

pub fn is_identity(p: &[u32]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

/// `p·q`: apply `q`, then `p`.
pub fn mul(p: &[u32], q: &[u32]) -> Perm {
    q.iter().map(|&x| p[x as usize]).collect()
}

pub fn inverse(p: &[u32]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x as usize] = i as u32;
    }
    inv
}

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    /// Strong generators first added at this level.
    gens: Vec<Perm>,
    /// `transversal[x]` maps the base point to `x`, for `x` in the orbit.
    transversal: Vec<Option<Perm>>,
    orbit: Vec<u32>,
}

/// A permutation group on `{0, …, degree-1}` with a stabilizer chain.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Self {
        let mut g = PermGroup {
            degree,
            generators: generators.clone(),
            levels: Vec::new(),
        };
        for p in generators {
            debug_assert_eq!(p.len(), degree);
            if let Some((h, j)) = g.sift_from(&p, 0) {
                g.add_strong(h, j);
            }
        }
        g.complete();
        g
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, p: &[u32]) -> bool {
        p.len() == self.degree && self.sift_from(p, 0).is_none()
    }

    /// Sifts `p` through levels `from..`; returns the nontrivial residue and the
    /// level where it got stuck, or `None` when `p` sifts to the identity.
    fn sift_from(&self, p: &[u32], from: usize) -> Option<(Perm, usize)> {
        let mut h = p.to_vec();
        for (i, l) in self.levels.iter().enumerate().skip(from) {
            let x = h[l.base as usize];
            match &l.transversal[x as usize] {
                Some(u) => h = mul(&inverse(u), &h),
                None => return Some((h, i)),
            }
        }
        (!is_identity(&h)).then(|| (h, self.levels.len()))
    }

    fn strong_gens_from(&self, i: usize) -> Vec<&Perm> {
        self.levels[i..].iter().flat_map(|l| l.gens.iter()).collect()
    }

    fn add_strong(&mut self, h: Perm, level: usize) {
        if level == self.levels.len() {
            let base = h
                .iter()
                .enumerate()
                .find(|&(i, &x)| i as u32 != x)
                .map(|(i, _)| i as u32)
                .expect("residue is nontrivial");
            self.levels.push(Level {
                base,
                gens: Vec::new(),
                transversal: Vec::new(),
                orbit: Vec::new(),
            });
        }
        self.levels[level].gens.push(h);
        for i in 0..=level {
            self.rebuild_orbit(i);
        }
    }

    fn rebuild_orbit(&mut self, i: usize) {
        let gens: Vec<Perm> = self.strong_gens_from(i).into_iter().cloned().collect();
        let l = &mut self.levels[i];
        let mut transversal: Vec<Option<Perm>> = vec![None; self.degree];
        transversal[l.base as usize] = Some(identity(self.degree));
        let mut orbit = vec![l.base];
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            let ux = transversal[x as usize].clone().unwrap();
            for s in &gens {
                let y = s[x as usize];
                if transversal[y as usize].is_none() {
                    transversal[y as usize] = Some(mul(s, &ux));
                    orbit.push(y);
                }
            }
            k += 1;
        }
        l.transversal = transversal;
        l.orbit = orbit;
    }

    /// Sifts every Schreier generator, deepest level first, restarting from the
    /// level that receives a new strong generator.
    fn complete(&mut self) {
        let mut checked: HashSet<(usize, u32, Perm)> = HashSet::new();
        let mut i = self.levels.len();
        while i > 0 {
            let level = i - 1;
            let mut added = None;
            'scan: for x in self.levels[level].orbit.clone() {
                let ux = self.levels[level].transversal[x as usize].clone().unwrap();
                for s in self.strong_gens_from(level).into_iter().cloned().collect::<Vec<_>>() {
                    if !checked.insert((level, x, s.clone())) {
                        continue;
                    }
                    let y = s[x as usize];
                    let uy = self.levels[level].transversal[y as usize].clone().unwrap();
                    let schreier = mul(&inverse(&uy), &mul(&s, &ux));
                    if let Some((h, j)) = self.sift_from(&schreier, level + 1) {
                        added = Some((h, j));
                        break 'scan;
                    }
                }
            }
            match added {
                Some((h, j)) => {
                    self.add_strong(h, j);
                    // Transversals at levels up to `j` were rebuilt.
                    checked.retain(|(l, _, _)| *l > j);
                    i = j + 1;
                }
                None => i -= 1,
            }
        }
    }

    /// The orbit of `x` under the generators, in discovery order.
    pub fn orbit(&self, x: u32) -> Vec<u32> {
        orbit(&self.generators, self.degree, x)
    }
}

pub fn orbit(generators: &[Perm], degree: usize, x: u32) -> Vec<u32> {
    let mut seen = vec![false; degree];
    seen[x as usize] = true;
    let mut out = vec![x];
    let mut k = 0;
    while k < out.len() {
        let y = out[k];
        for g in generators {
            let z = g[y as usize];
            if !seen[z as usize] {
                seen[z as usize] = true;
                out.push(z);
            }
        }
        k += 1;
    }
    out
}

/// Size of the group generated by `generators`, by listing all its elements.
/// Returns `None` once more than `cap` elements have been produced.
pub fn closure_order(generators: &[Perm], degree: usize, cap: usize) -> Option<usize> {
    let id = identity(degree);
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut queue = vec![id];
    while let Some(p) = queue.pop() {
        for g in generators {
            let q = mul(g, &p);
            if seen.insert(q.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push(q);
            }
        }
    }
    Some(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn symmetric_group_order() {
        let g = PermGroup::new(5, vec![vec![1, 2, 3, 4, 0], vec![1, 0, 2, 3, 4]]);
        assert_eq!(g.order(), BigUint::from(120u32));
        assert!(g.contains(&[0, 2, 1, 3, 4]));
    }

    #[test]
    fn dihedral_and_trivial() {
        let g = PermGroup::new(4, vec![vec![1, 2, 3, 0], vec![3, 2, 1, 0]]);
        assert_eq!(g.order(), BigUint::from(8u32));
        assert!(!g.contains(&[1, 0, 2, 3]));
        assert_eq!(PermGroup::new(3, vec![]).order(), BigUint::from(1u32));
    }

    #[test]
    fn mul_acts_right_to_left() {
        let p = vec![1, 2, 0];
        let q = vec![1, 0, 2];
        // q sends 0 to 1, then p sends 1 to 2
        assert_eq!(mul(&p, &q)[0], 2);
        assert!(is_identity(&mul(&p, &inverse(&p))));
    }

    fn perm(n: usize) -> impl Strategy<Value = Perm> {
        Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle()
    }

    proptest! {
        #[test]
        fn order_matches_closure(gens in prop::collection::vec(perm(6), 1..4)) {
            let g = PermGroup::new(6, gens.clone());
            let brute = closure_order(&gens, 6, 1000).unwrap();
            prop_assert_eq!(g.order(), BigUint::from(brute));
        }
    }
}
