use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::automaton::Automaton;

/// Dense identifier of an interned canonical machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId(pub u32);

/// Insert-if-absent table of canonical machines. Safe to share between threads;
/// identifiers are assigned in insertion order.
#[derive(Default)]
pub struct InternTable {
    inner: RwLock<Inner>,
}

#[derive(Default)]
struct Inner {
    ids: HashMap<Arc<Automaton>, ElementId>,
    machines: Vec<Arc<Automaton>>,
}

impl InternTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `m` and whether it was newly inserted.
    pub fn intern(&self, m: Arc<Automaton>) -> (ElementId, bool) {
        if let Some(&id) = self.inner.read().unwrap().ids.get(&m) {
            return (id, false);
        }
        let mut inner = self.inner.write().unwrap();
        if let Some(&id) = inner.ids.get(&m) {
            return (id, false);
        }
        let id = ElementId(inner.machines.len() as u32);
        inner.machines.push(Arc::clone(&m));
        inner.ids.insert(m, id);
        (id, true)
    }

    pub fn get(&self, m: &Automaton) -> Option<ElementId> {
        self.inner.read().unwrap().ids.get(m).copied()
    }

    pub fn machine(&self, id: ElementId) -> Arc<Automaton> {
        Arc::clone(&self.inner.read().unwrap().machines[id.0 as usize])
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().machines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_words::Alphabet;

    #[test]
    fn insert_if_absent() {
        let t = InternTable::new();
        let id = Arc::new(Automaton::identity(Alphabet::new(2).unwrap()));
        let (a, new_a) = t.intern(Arc::clone(&id));
        let (b, new_b) = t.intern(Arc::new(Automaton::identity(Alphabet::new(2).unwrap())));
        assert_eq!(a, b);
        assert!(new_a && !new_b);
        assert_eq!(t.len(), 1);
        assert_eq!(*t.machine(a), *id);
    }
}
