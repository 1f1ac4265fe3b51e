//! Non-Hausdorff elements of the germinal groupoid: certificates, their exact
//! verification, and bounded searches.
//!
//! An element `g` is non-Hausdorff at a ray `z` when it fixes `z`, is not the
//! identity on any neighbourhood of `z`, and yet is the identity on open sets
//! accumulating at `z`. A certificate names those sets through a
//! [`PatchSchema`]: at scale `ℓ` the neighbourhood is the cylinder `W_ℓ` over
//! the first `n_ℓ = a·ℓ + b` letters of `z`, and the patch `O_ℓ ⊂ W_ℓ` is the
//! cylinder over that prefix followed by a fixed tail that leaves `z`.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::group::{Family, Group};
use crate::tree_words::{Alphabet, Ray, Word};
use crate::wreath::{walk_along_ray, Automaton, Element};

/// Affine prefix length `n_ℓ = a·ℓ + b` plus the tail naming the patch.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatchSchema {
    pub a: usize,
    pub b: i64,
    pub tail: Word,
}

impl PatchSchema {
    pub fn new(a: usize, b: i64, tail: Word) -> Result<Self> {
        if a == 0 {
            return Err(Error::InvalidSpec(
                "patch schema needs a >= 1 so that the patches shrink".into(),
            ));
        }
        if a as i64 + b < 0 {
            return Err(Error::InvalidSpec(format!(
                "prefix length a·ℓ + b is negative at ℓ = 1 (a = {a}, b = {b})"
            )));
        }
        if tail.is_empty() {
            return Err(Error::InvalidSpec("patch tail must be nonempty".into()));
        }
        Ok(PatchSchema { a, b, tail })
    }

    /// `n_ℓ`, for `ℓ >= 1`.
    pub fn prefix_len(&self, level: usize) -> usize {
        (self.a as i64 * level as i64 + self.b) as usize
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub element: Element,
    pub ray: Ray,
    pub schema: PatchSchema,
    /// Number of scales `ℓ = 1..=depth` to verify.
    pub depth: usize,
}

impl Certificate {
    pub fn new(element: Element, ray: Ray, schema: PatchSchema, depth: usize) -> Result<Self> {
        if element.alphabet() != ray.alphabet() {
            return Err(Error::DegreeMismatch {
                left: element.degree(),
                right: ray.alphabet().degree(),
            });
        }
        element.alphabet().check(&schema.tail.0)?;
        Ok(Certificate {
            element,
            ray,
            schema,
            depth,
        })
    }

    /// Base word of `W_ℓ`.
    pub fn neighbourhood(&self, level: usize) -> Word {
        self.ray.prefix(self.schema.prefix_len(level))
    }

    /// Base word of `O_ℓ`.
    pub fn patch(&self, level: usize) -> Word {
        self.neighbourhood(level).concat(&self.schema.tail)
    }

    /// Whether the patch family of `other` is a subfamily of this one: same
    /// element, ray, tail and step, with `other` starting at a later scale.
    pub fn covers(&self, other: &Certificate) -> bool {
        let (s, o) = (&self.schema, &other.schema);
        self.element == other.element
            && self.ray == other.ray
            && s.tail == o.tail
            && s.a == o.a
            && o.b >= s.b
            && (o.b - s.b) % s.a as i64 == 0
    }

    pub fn to_document(&self, group: &Group) -> CertificateDocument {
        CertificateDocument {
            group: Some(group.spec().family().to_string()),
            element: group.render(&self.element),
            ray: self.ray.render(),
            tail: self.schema.tail.render(self.ray.alphabet()),
            prefix: PrefixDocument {
                a: self.schema.a,
                b: self.schema.b,
            },
            depth: self.depth,
        }
    }

    pub fn from_document(group: &Group, doc: &CertificateDocument) -> Result<Self> {
        let a = group.alphabet();
        let tail = Word::parse(&doc.tail, a)?;
        Certificate::new(
            group.parse(&doc.element)?,
            Ray::parse(&doc.ray, a)?,
            PatchSchema::new(doc.prefix.a, doc.prefix.b, tail)?,
            doc.depth,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixDocument {
    pub a: usize,
    pub b: i64,
}

/// JSON form of a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub element: String,
    pub ray: String,
    pub tail: String,
    pub prefix: PrefixDocument,
    pub depth: usize,
}

/// Outcome of the three checks at one scale.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCheck {
    pub level: usize,
    pub prefix_len: usize,
    pub fixed_prefix: bool,
    pub germ_nontrivial: bool,
    pub patch_trivial: bool,
}

impl LevelCheck {
    pub fn passed(&self) -> bool {
        self.fixed_prefix && self.germ_nontrivial && self.patch_trivial
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub levels: Vec<LevelCheck>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn first_failure(&self) -> Option<&LevelCheck> {
        self.levels.iter().find(|c| !c.passed())
    }
}

/// Checks every scale `ℓ = 1..=depth` exactly.
pub fn verify_certificate(cert: &Certificate) -> Result<VerificationReport> {
    let m = cert.element.machine();
    let id = m.identity_state();
    let mut levels = Vec::with_capacity(cert.depth);
    for level in 1..=cert.depth {
        let n = cert.schema.prefix_len(level);
        let prefix = cert.ray.prefix(n);
        let patch = cert.patch(level);
        if cert.ray.prefix(patch.len()) == patch {
            return Err(Error::InvalidSpec(format!(
                "patch at scale {level} contains the ray itself"
            )));
        }
        let fixed_prefix = m.apply(&prefix.0) == prefix.0;
        let germ_nontrivial = Some(m.walk(&prefix.0)) != id;
        let patch_trivial = cert.element.is_trivial_on_cylinder(&patch);
        levels.push(LevelCheck {
            level,
            prefix_len: n,
            fixed_prefix,
            germ_nontrivial,
            patch_trivial,
        });
    }
    let pass = levels.iter().all(LevelCheck::passed);
    Ok(VerificationReport { levels, pass })
}

/// The constructions shipped with the library.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinCertificate {
    /// `K(w,v)` with `|v| = 1`, `|w| >= 2`: the element `a1`.
    KwvA1,
    /// `K(w,v)` with `|v| >= 2`: the element `a_i`.
    KwvAi { i: usize },
    /// `M(d)`, `d >= 3`: the element `m_d`.
    MdTop,
}

impl BuiltinCertificate {
    pub fn name(&self) -> String {
        match self {
            BuiltinCertificate::KwvA1 => "lemma5.3".into(),
            BuiltinCertificate::KwvAi { i } => format!("lemma5.5:a{i}"),
            BuiltinCertificate::MdTop => "thm1.4".into(),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "lemma5.3" => Ok(BuiltinCertificate::KwvA1),
            "thm1.4" => Ok(BuiltinCertificate::MdTop),
            _ => name
                .strip_prefix("lemma5.5:a")
                .and_then(|i| i.parse().ok())
                .filter(|&i| i >= 1)
                .map(|i| BuiltinCertificate::KwvAi { i })
                .ok_or_else(|| Error::Parse(format!("unknown built-in certificate {name:?}"))),
        }
    }

    /// The default built-in certificate for a family, if there is one.
    pub fn default_for(family: &Family) -> Option<Self> {
        match family {
            Family::Kwv { w, v } if v.len() == 1 && w.len() >= 2 => Some(Self::KwvA1),
            Family::Kwv { v, .. } if v.len() >= 2 => Some(Self::KwvAi { i: v.len() }),
            Family::Md { d } if *d >= 3 => Some(Self::MdTop),
            _ => None,
        }
    }
}

fn flip(x: u8) -> u8 {
    1 - x
}

/// Instantiates a built-in construction for the group's family.
pub fn builtin_certificate(
    group: &Group,
    which: BuiltinCertificate,
    depth: usize,
) -> Result<Certificate> {
    let family = group.spec().family();
    let bin = Alphabet::new(2)?;
    let out_of_scope = || {
        Error::Precondition(format!(
            "certificate {} does not apply to {family}",
            which.name()
        ))
    };
    match (which, family) {
        (BuiltinCertificate::KwvA1, Family::Kwv { w, v }) if v.len() == 1 && w.len() >= 2 => {
            let xn = v.0[0];
            let y = w.0[w.len() - 2];
            let g = group.generator("a1")?.clone();
            let z = Ray::constant(bin, xn)?;
            let schema = PatchSchema::new(1, -1, Word(vec![flip(xn), flip(y)]))?;
            Certificate::new(g, z, schema, depth)
        }
        (BuiltinCertificate::KwvAi { i }, Family::Kwv { v, .. }) if v.len() >= 2 && i <= v.len() => {
            let n = v.len();
            let x = |j: usize| v.0[j - 1];
            // x_{n-1} … x_1 x_n
            let period: Vec<u8> = (1..n).rev().map(x).chain([x(n)]).collect();
            let g = group.generator(&format!("a{i}"))?.clone();
            let tail = Word(vec![flip(x(n - 1))]);
            let (z, b) = if i == n {
                (Ray::new(bin, Vec::new(), period)?, -(n as i64))
            } else {
                let pre: Vec<u8> = (1..i).rev().map(x).chain([x(n)]).collect();
                (Ray::new(bin, pre, period)?, i as i64 - n as i64)
            };
            Certificate::new(g, z, PatchSchema::new(n, b, tail)?, depth)
        }
        (BuiltinCertificate::MdTop, Family::Md { d }) if *d >= 3 => {
            let a = group.alphabet();
            let top = (*d - 1) as u8;
            let g = group.generator(&format!("m{d}"))?.clone();
            let z = Ray::constant(a, top)?;
            Certificate::new(g, z, PatchSchema::new(1, -1, Word(vec![1, top]))?, depth)
        }
        _ => Err(out_of_scope()),
    }
}

/// Bounds for [`search_nonhausdorff`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub word_bound: usize,
    pub preperiod_bound: usize,
    pub period_bound: usize,
    pub depth: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            word_bound: 1,
            preperiod_bound: 2,
            period_bound: 4,
            depth: 12,
        }
    }
}

/// Searches the ball of radius `word_bound` for non-Hausdorff certificates.
/// Results are sorted by element word, ray, then schema.
pub fn search_nonhausdorff(
    group: &Group,
    bounds: SearchBounds,
    ball_cap: usize,
) -> Result<Vec<Certificate>> {
    let ball = Ball::new(group, bounds.word_bound, ball_cap)?;
    let found: Vec<Vec<Certificate>> = ball
        .nontrivial()
        .par_iter()
        .map(|g| search_element(g, bounds))
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// Certificates for a single element: one per fixed ray (within the bounds)
/// and per residue class of scales that admits a patch.
pub fn search_element(g: &Element, bounds: SearchBounds) -> Vec<Certificate> {
    let m = g.machine();
    let Some(id) = m.identity_state() else {
        return Vec::new();
    };
    if m.is_identity() {
        return Vec::new();
    }
    let max_tail = 2 * m.num_states() + 2;
    let mut out = Vec::new();
    for z in g.fixed_rays(bounds.preperiod_bound, bounds.period_bound) {
        let (states, cycle) = walk_along_ray(m, &z);
        if states.contains(&id) {
            continue;
        }
        let step = states.len() - cycle;
        let tails: Vec<Option<Word>> = states
            .iter()
            .enumerate()
            .map(|(j, &s)| patch_tail(m, s, id, z.letter(j), max_tail))
            .collect();
        let mut taken = vec![false; step];
        for (j, tail) in tails.iter().enumerate() {
            let Some(tail) = tail else { continue };
            let class = j % step;
            if taken[class] {
                continue;
            }
            // Before the walk turns periodic, every later scale must reuse the tail.
            let consistent = (j..cycle.max(j + 1))
                .step_by(step)
                .all(|p| tail_works(m, &z, p, tail));
            if !consistent {
                continue;
            }
            taken[class] = true;
            let schema = PatchSchema::new(step, j as i64 - step as i64, tail.clone())
                .expect("step >= 1 and n_1 = j >= 0");
            let cert = Certificate::new(g.clone(), z.clone(), schema, bounds.depth)
                .expect("tail letters come from the alphabet");
            if verify_certificate(&cert).is_ok_and(|r| r.pass) {
                out.push(cert);
            }
        }
    }
    out.sort_by(|x, y| {
        x.ray
            .cmp(&y.ray)
            .then_with(|| x.schema.prefix_len(1).cmp(&y.schema.prefix_len(1)))
            .then_with(|| x.schema.cmp(&y.schema))
    });
    out
}

/// Shortest, then lexicographically least, word `t` with `t[0] != avoid`
/// along which `m` fixes every letter from state `s` and ends in the identity.
fn patch_tail(m: &Automaton, s: usize, id: usize, avoid: u8, max_len: usize) -> Option<Word> {
    let d = m.degree() as u8;
    let mut seen = vec![false; m.num_states()];
    let mut queue = VecDeque::new();
    for x in 0..d {
        if x != avoid && m.perm_at(s, x) == x {
            let t = m.succ_at(s, x);
            if !seen[t] {
                seen[t] = true;
                queue.push_back((t, 1usize, vec![x]));
            }
        }
    }
    // Paths are short; carrying them keeps the first-found word shortlex-least.
    while let Some((t, len, path)) = queue.pop_front() {
        if t == id {
            return Some(Word(path));
        }
        if len >= max_len {
            continue;
        }
        for x in 0..d {
            if m.perm_at(t, x) == x {
                let u = m.succ_at(t, x);
                if !seen[u] {
                    seen[u] = true;
                    let mut p = path.clone();
                    p.push(x);
                    queue.push_back((u, len + 1, p));
                }
            }
        }
    }
    None
}

fn tail_works(m: &Automaton, z: &Ray, pos: usize, tail: &Word) -> bool {
    let u = z.prefix(pos).concat(tail);
    let Some(id) = m.identity_state() else {
        return false;
    };
    tail.0[0] != z.letter(pos) && m.apply(&u.0) == u.0 && m.walk(&u.0) == id
}

/// A vertex `inner` on whose cylinder `element` is the identity, with a proper
/// prefix `outer` on whose cylinder it is not.
#[derive(Clone, Debug)]
pub struct LqaWitness {
    pub element: Element,
    pub inner: Word,
    pub outer: Word,
}

/// For each nontrivial ball element, every minimal vertex of length at most
/// `depth` on whose cylinder it acts trivially, paired with each proper prefix.
pub fn lqa_violation_search(
    group: &Group,
    word_bound: usize,
    depth: usize,
    ball_cap: usize,
) -> Result<Vec<LqaWitness>> {
    let ball = Ball::new(group, word_bound, ball_cap)?;
    let found: Vec<Vec<LqaWitness>> = ball
        .nontrivial()
        .par_iter()
        .map(|g| {
            let mut out = Vec::new();
            for u in minimal_trivial_vertices(g.machine(), depth) {
                for k in 0..u.len() {
                    out.push(LqaWitness {
                        element: g.clone(),
                        inner: u.clone(),
                        outer: Word(u.0[..k].to_vec()),
                    });
                }
            }
            out
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// Vertices `u` (lexicographic order) with `g(u) = u` and `g|_u = 1` such that no
/// proper prefix has the same property.
fn minimal_trivial_vertices(m: &Automaton, depth: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let Some(id) = m.identity_state() else {
        return out;
    };
    if m.is_identity() {
        return out;
    }
    fn go(m: &Automaton, s: usize, id: usize, depth: usize, path: &mut Vec<u8>, out: &mut Vec<Word>) {
        if s == id {
            out.push(Word(path.clone()));
            return;
        }
        if path.len() == depth {
            return;
        }
        for x in 0..m.degree() as u8 {
            if m.perm_at(s, x) == x {
                path.push(x);
                go(m, m.succ_at(s, x), id, depth, path, out);
                path.pop();
            }
        }
    }
    go(m, 0, id, depth, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct FixedVertexRow {
    pub element: Element,
    pub fixed: usize,
}

/// How many level-`n` vertices each nontrivial ball element fixes.
#[derive(Clone, Debug)]
pub struct FixedVertexReport {
    pub level: usize,
    pub rows: Vec<FixedVertexRow>,
    pub fixed_pairs: usize,
    pub total_pairs: usize,
}

impl FixedVertexReport {
    pub fn fraction(&self) -> f64 {
        if self.total_pairs == 0 {
            0.0
        } else {
            self.fixed_pairs as f64 / self.total_pairs as f64
        }
    }
}

pub fn fixed_vertex_report(
    group: &Group,
    word_bound: usize,
    level: usize,
    ball_cap: usize,
) -> Result<FixedVertexReport> {
    let ball = Ball::new(group, word_bound, ball_cap)?;
    let size = group
        .alphabet()
        .level_size(level)
        .ok_or_else(|| Error::CapExceeded(format!("level {level} overflows")))?;
    let rows = ball
        .nontrivial()
        .par_iter()
        .map(|g| {
            let perm = g.level_permutation(level)?;
            let fixed = perm.iter().enumerate().filter(|&(i, &p)| i == p).count();
            Ok(FixedVertexRow {
                element: g.clone(),
                fixed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fixed_pairs = rows.iter().map(|r| r.fixed).sum();
    Ok(FixedVertexReport {
        level,
        total_pairs: rows.len() * size,
        rows,
        fixed_pairs,
    })
}
