//! Balls in the Cayley graph, one canonical element per automorphism.
//!
//! Layer `r` holds the elements first reached by words of length `r`. Each
//! element keeps the shortlex-least word that produces it: parents are scanned
//! in shortlex order and letters in ascending order, so the first hit wins.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::wreath::{Automaton, Element, InternTable};

/// Default cap on the number of distinct elements in a ball.
pub const DEFAULT_BALL_CAP: usize = 200_000;

#[derive(Clone, Debug)]
pub struct Ball {
    elements: Vec<Element>,
    /// `layer_start[r]` is the index of the first element of word length `r`.
    layer_start: Vec<usize>,
}

impl Ball {
    /// Enumerates all elements of word length at most `radius` over the
    /// generators and their inverses.
    pub fn new(group: &Group, radius: usize, cap: usize) -> Result<Ball> {
        let table = InternTable::new();
        let id = group.identity();
        table.intern(Arc::clone(id.shared_machine()));
        let mut elements = vec![id];
        let mut layer_start = vec![0];
        let letters: Vec<Element> = group
            .symmetric_letters()
            .into_iter()
            .map(|l| group.letter(l))
            .collect();
        for _ in 0..radius {
            let from = *layer_start.last().unwrap();
            let parents = &elements[from..];
            if parents.is_empty() {
                break;
            }
            let products: Vec<Element> = parents
                .par_iter()
                .flat_map_iter(|p| {
                    letters
                        .iter()
                        .map(move |l| p.compose(l).expect("same alphabet"))
                })
                .collect();
            let next = elements.len();
            for e in products {
                if table.intern(Arc::clone(e.shared_machine())).1 {
                    if elements.len() >= cap {
                        return Err(Error::CapExceeded(format!(
                            "ball of radius {radius} has more than {cap} elements"
                        )));
                    }
                    elements.push(e);
                }
            }
            layer_start.push(next);
        }
        Ok(Ball {
            elements,
            layer_start,
        })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements other than the identity, in shortlex order of their words.
    pub fn nontrivial(&self) -> &[Element] {
        &self.elements[1..]
    }

    /// Elements of word length exactly `r`.
    pub fn sphere(&self, r: usize) -> &[Element] {
        let Some(&start) = self.layer_start.get(r) else {
            return &[];
        };
        let end = self
            .layer_start
            .get(r + 1)
            .copied()
            .unwrap_or(self.elements.len());
        &self.elements[start..end]
    }

    /// The ball element equal to `m`, if there is one.
    pub fn find(&self, m: &Automaton) -> Option<&Element> {
        self.elements.iter().find(|e| e.machine() == m)
    }
}

/// Attaches a short word to each element that occurs in the ball of the given
/// radius. Elements outside the ball keep whatever word they had.
pub fn name_elements(group: &Group, elements: &mut [Element], radius: usize) {
    let Ok(ball) = Ball::new(group, radius, DEFAULT_BALL_CAP) else {
        return;
    };
    let index: std::collections::HashMap<&Automaton, &Element> =
        ball.elements().iter().map(|e| (e.machine(), e)).collect();
    for e in elements.iter_mut() {
        if let Some(found) = index.get(e.machine()) {
            *e = (*found).clone();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::tree_words::Word;

    #[test]
    fn odometer_ball_is_an_interval() {
        let g = Group::new(GroupSpec::build_kv(&Word::empty()).unwrap()).unwrap();
        let b = Ball::new(&g, 4, 1000).unwrap();
        assert_eq!(b.len(), 9);
        assert_eq!(b.sphere(4).len(), 2);
        assert_eq!(g.render(&b.sphere(1)[1]), "a1^-1");
    }

    #[test]
    fn cap_is_reported() {
        let g = Group::new(GroupSpec::build_kv(&Word(vec![1])).unwrap()).unwrap();
        assert!(matches!(Ball::new(&g, 6, 10), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn words_are_shortlex_minimal() {
        let g = Group::new(GroupSpec::build_kv(&Word(vec![1])).unwrap()).unwrap();
        let b = Ball::new(&g, 3, 10_000).unwrap();
        for (r, e) in (0..=3).flat_map(|r| b.sphere(r).iter().map(move |e| (r, e))) {
            assert_eq!(e.word().unwrap().len(), r);
            assert_eq!(&g.element(e.word().unwrap()), e);
        }
    }
}
