//! Names for built-in groups and certificates, as accepted after `builtin:`.
//!
//! Groups: `K()` (odometer), `K(v)`, `K(w,v)`, `M(d)`, `grigorchuk`.
//! Certificates: `lemma5.3`, `lemma5.5:a<i>`, `thm1.4`.

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::hausdorff::BuiltinCertificate;
use crate::tree_words::{Alphabet, Word};

pub const PREFIX: &str = "builtin:";

/// Group names used in the documentation and tests; all of them resolve.
pub const GROUP_EXAMPLES: &[&str] = &[
    "K()", "K(1)", "K(0)", "K(01)", "K(00,1)", "K(000,1)", "K(11,0)", "K(1,0)", "K(0,01)",
    "K(0,011)", "M(2)", "M(3)", "M(4)", "M(5)", "grigorchuk",
];

pub const CERTIFICATE_EXAMPLES: &[&str] = &["lemma5.3", "lemma5.5:a1", "lemma5.5:a2", "thm1.4"];

fn strip(name: &str) -> &str {
    name.trim().strip_prefix(PREFIX).unwrap_or(name.trim())
}

pub fn is_builtin(name: &str) -> bool {
    name.trim().starts_with(PREFIX)
}

/// Resolves a group name, with or without the `builtin:` prefix.
pub fn group(name: &str) -> Result<GroupSpec> {
    let name = strip(name);
    if name == "grigorchuk" {
        return Ok(GroupSpec::grigorchuk());
    }
    let unknown = || Error::Parse(format!("unknown built-in group {name:?}"));
    let inner = |p: &str| {
        name.strip_prefix(p)
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(unknown)
    };
    if name.starts_with("M(") {
        let d: usize = inner("M(")?.trim().parse().map_err(|_| unknown())?;
        return GroupSpec::build_md(d);
    }
    if name.starts_with("K(") {
        let bin = Alphabet::new(2)?;
        let args = inner("K(")?;
        return match args.split_once(',') {
            None => GroupSpec::build_kv(&Word::parse(args.trim(), bin)?),
            Some((w, v)) => {
                GroupSpec::build_kwv(&Word::parse(w.trim(), bin)?, &Word::parse(v.trim(), bin)?)
            }
        };
    }
    Err(unknown())
}

pub fn certificate(name: &str) -> Result<BuiltinCertificate> {
    BuiltinCertificate::parse(strip(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Family;

    #[test]
    fn every_listed_name_resolves() {
        for n in GROUP_EXAMPLES {
            group(&format!("{PREFIX}{n}")).unwrap_or_else(|e| panic!("{n}: {e}"));
        }
        for n in CERTIFICATE_EXAMPLES {
            certificate(n).unwrap();
        }
    }

    #[test]
    fn names_round_trip_through_family_display() {
        for n in GROUP_EXAMPLES.iter().filter(|n| n.starts_with(['K', 'M'])) {
            assert_eq!(group(n).unwrap().family().to_string(), *n);
        }
    }

    #[test]
    fn rejects_bad_names() {
        assert!(group("K(2)").is_err());
        assert!(group("M(x)").is_err());
        assert!(group("Q(1)").is_err());
        assert!(group("K(0,0)").is_err());
        assert_eq!(*group("K()").unwrap().family(), Family::Odometer);
    }
}
