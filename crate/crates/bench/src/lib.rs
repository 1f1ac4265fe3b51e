//! Shared fixtures for the criterion benches.

use germlab::{Group, GroupSpec, Word};

pub fn k1() -> Group {
    Group::new(GroupSpec::build_kv(&Word(vec![1])).unwrap()).unwrap()
}

pub fn k00_1() -> Group {
    Group::new(GroupSpec::build_kwv(&Word(vec![0, 0]), &Word(vec![1])).unwrap()).unwrap()
}

pub fn md(d: usize) -> Group {
    Group::new(GroupSpec::build_md(d).unwrap()).unwrap()
}
