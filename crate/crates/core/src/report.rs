//! JSON documents for every analysis, and the composite group report.
//!
//! Every top-level document carries `"schema": "germlab/1"`. Documents are
//! built from deterministic data only, so identical inputs give identical bytes.

use serde_json::{json, Map, Value};

use crate::activity::{self, ActivityProfile};
use crate::contraction::{self, CriterionCaps, CriterionReport, NucleusResult, OrderResult, SpecialSets, Verdict};
use crate::error::Result;
use crate::group::{Family, Group};
use crate::hausdorff::{
    self, builtin_certificate, verify_certificate, BuiltinCertificate, Certificate, SearchBounds,
    VerificationReport,
};
use crate::level_quotients::{self, PropernessWitness};
use crate::tree_words::Ray;
use crate::SCHEMA;

/// Adds the schema tag in front of an object's fields.
pub fn tagged(body: Value) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), json!(SCHEMA));
    if let Value::Object(m) = body {
        out.extend(m);
    }
    Value::Object(out)
}

pub fn nucleus_json(group: &Group, n: &NucleusResult) -> Value {
    json!({
        "status": n.status.as_str(),
        "size": n.elements.len(),
        "depth_bound": n.depth_bound,
        "caps_hit": n.caps_hit,
        "elements": if n.is_certified() {
            n.elements.iter().map(|e| group.render(e)).collect::<Vec<_>>()
        } else {
            Vec::new()
        },
    })
}

pub fn special_sets_json(group: &Group, s: &SpecialSets) -> Value {
    let rows = |v: &[contraction::SelfSection]| {
        v.iter()
            .map(|x| json!({"element": group.render(&x.element), "word": x.word.render(group.alphabet())}))
            .collect::<Vec<_>>()
    };
    json!({"n0": rows(&s.n0), "n1": rows(&s.n1)})
}

pub fn order_json(r: OrderResult) -> Value {
    match r {
        OrderResult::Finite(o) => json!({"status": "finite", "order": o}),
        OrderResult::ExceedsCap { level, lower_bound } => {
            json!({"status": "exceeds_cap", "level": level, "lower_bound": lower_bound})
        }
    }
}

pub fn certificate_json(group: &Group, c: &Certificate) -> Value {
    serde_json::to_value(c.to_document(group)).expect("plain data")
}

pub fn verification_json(r: &VerificationReport) -> Value {
    json!({
        "verdict": if r.pass { "pass" } else { "fail" },
        "first_failure": r.first_failure().map(|c| c.level),
        "levels": r.levels,
    })
}

/// Integers that fit in `u64` as numbers, larger ones as decimal strings.
fn big_json(c: &num_bigint::BigUint) -> Value {
    u64::try_from(c).map_or_else(|_| json!(c.to_string()), |x| json!(x))
}

pub fn activity_json(p: &ActivityProfile) -> Value {
    json!({
        "counts": p.counts.iter().map(big_json).collect::<Vec<_>>(),
        "class": p.class.name(),
        "degree": p.class.degree(),
        "nontrivial_states": p.nontrivial_states,
        "longest_cycle_chain": p.longest_cycle_chain,
    })
}

pub fn witness_json(group: &Group, w: &PropernessWitness) -> Value {
    json!({
        "level": w.level,
        "accepted": true,
        "clauses": {"a": true, "b": true, "c": true},
        "g": group.render(&w.g),
        "h": group.render(&w.h),
        "moved_word": w.moved_word.render(group.alphabet()),
        "sections": w.sections.iter().map(|s| json!({
            "vertex": s.vertex.render(group.alphabet()),
            "differ": s.differ(),
            "g_section_states": s.g_section.num_states(),
            "conjugate_section_states": s.conjugate_section.num_states(),
        })).collect::<Vec<_>>(),
    })
}

fn criterion_json(group: &Group, r: &CriterionReport) -> Value {
    json!({
        "contracting": r.nucleus.status.as_str(),
        "nucleus_size": r.nucleus.elements.len(),
        "n1": r.n1.iter().map(|s| group.render(&s.element)).collect::<Vec<_>>(),
        "verdict": r.verdict.render(),
        "witnesses": r.witnesses.iter().map(|c| certificate_json(group, c)).collect::<Vec<_>>(),
    })
}

/// Document for the contracting-group criterion alone.
pub fn criterion_document(group: &Group, r: &CriterionReport) -> Value {
    tagged(criterion_json(group, r))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Quick,
    Full,
}

struct ProfileCaps {
    criterion: CriterionCaps,
    search: SearchBounds,
    activity_levels: usize,
    quotient_levels: usize,
    witness_levels: Vec<usize>,
}

fn caps(profile: Profile) -> ProfileCaps {
    match profile {
        Profile::Quick => ProfileCaps {
            criterion: CriterionCaps {
                size_cap: 200,
                depth_cap: 12,
                ..CriterionCaps::default()
            },
            search: SearchBounds {
                word_bound: 1,
                preperiod_bound: 2,
                period_bound: 4,
                depth: 12,
            },
            activity_levels: 6,
            quotient_levels: 3,
            witness_levels: vec![5],
        },
        Profile::Full => ProfileCaps {
            criterion: CriterionCaps::default(),
            search: SearchBounds {
                word_bound: 2,
                preperiod_bound: 3,
                period_bound: 4,
                depth: 30,
            },
            activity_levels: 10,
            quotient_levels: 5,
            witness_levels: vec![5, 6, 7, 8],
        },
    }
}

/// Summary of everything the library can say about a group at the given profile.
pub fn group_report(group: &Group, profile: Profile) -> Result<Value> {
    let caps = caps(profile);
    let criterion = contraction::criterion_report(group, caps.criterion);
    let mut certificates: Vec<Certificate> = criterion.witnesses.clone();
    let mut verdict = criterion.verdict.clone();
    if !criterion.nucleus.is_certified() {
        // The contracting criterion does not apply; try direct constructions.
        if let Some(b) = BuiltinCertificate::default_for(group.spec().family()) {
            let c = builtin_certificate(group, b, caps.search.depth)?;
            if verify_certificate(&c)?.pass {
                certificates.push(c);
            }
        }
        certificates.extend(hausdorff::search_nonhausdorff(
            group,
            caps.search,
            crate::ball::DEFAULT_BALL_CAP,
        )?);
        verdict = if !certificates.is_empty() {
            Verdict::NonHausdorffCertified
        } else if matches!(group.spec().family(), Family::Md { d: 2 }) {
            Verdict::Inconclusive("open: no certificate found within bounds".into())
        } else {
            Verdict::Inconclusive("not certified contracting; no certificate found within bounds".into())
        };
    }
    let activity: Vec<Value> = group
        .generators()
        .iter()
        .zip(group.names())
        .map(|(g, name)| {
            let p = activity::profile(g, caps.activity_levels);
            let mut v = activity_json(&p);
            v.as_object_mut()
                .unwrap()
                .insert("generator".into(), json!(name));
            v
        })
        .collect();
    let mut quotients = Vec::new();
    for n in 1..=caps.quotient_levels {
        let q = level_quotients::quotient_group(group, n, false)?;
        quotients.push(json!({
            "level": n,
            "order": q.order().to_string(),
            "transitive": level_quotients::is_level_transitive(group, n, false)?,
        }));
    }
    let mut witnesses = Vec::new();
    if matches!(group.spec().family(), Family::Kv { v } if v.0 == [1]) {
        let z = Ray::constant(group.alphabet(), 1)?;
        for &l in &caps.witness_levels {
            let (g, h) = level_quotients::k1_witness_pair(group, l)?;
            if let Ok(w) = level_quotients::properness_witness_check(&z, l, &g, &h)? {
                witnesses.push(witness_json(group, &w));
            }
        }
    }
    Ok(tagged(json!({
        "group": group.spec().family().to_string(),
        "degree": group.degree(),
        "generators": group.names(),
        "profile": match profile { Profile::Quick => "quick", Profile::Full => "full" },
        "contracting": criterion.nucleus.status.as_str(),
        "nucleus": nucleus_json(group, &criterion.nucleus),
        "n1": criterion.n1.iter().map(|s| group.render(&s.element)).collect::<Vec<_>>(),
        "verdict": verdict.render(),
        "certificates": certificates.iter().map(|c| certificate_json(group, c)).collect::<Vec<_>>(),
        "activity": activity,
        "quotients": quotients,
        "properness_witnesses": witnesses,
    })))
}
