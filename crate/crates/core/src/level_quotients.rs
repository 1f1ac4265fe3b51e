//! Finite level truncations: the action on level `n`, vertex stabilizers,
//! elements acting trivially on a cylinder, and properness witnesses showing
//! that an element trivial on a cylinder fails to commute with its stabilizer.

use num_bigint::BigUint;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::group::{Family, Group};
use crate::perm_group::{self, Perm, PermGroup};
use crate::tree_words::{Ray, Word};
use crate::wreath::Element;

/// Largest level size handled without `force`.
pub const MAX_LEVEL_POINTS: usize = 1 << 20;

fn level_points(group: &Group, n: usize, force: bool) -> Result<usize> {
    let size = group
        .alphabet()
        .level_size(n)
        .ok_or_else(|| Error::CapExceeded(format!("level {n} overflows")))?;
    if size > MAX_LEVEL_POINTS && !force {
        return Err(Error::CapExceeded(format!(
            "level {n} has {size} vertices (limit {MAX_LEVEL_POINTS}; use force)"
        )));
    }
    Ok(size)
}

/// The permutation `g` induces on level `n`, indexed by word index.
pub fn level_permutation(g: &Element, n: usize, force: bool) -> Result<Perm> {
    let size = g
        .alphabet()
        .level_size(n)
        .ok_or_else(|| Error::CapExceeded(format!("level {n} overflows")))?;
    if size > MAX_LEVEL_POINTS && !force {
        return Err(Error::CapExceeded(format!(
            "level {n} has {size} vertices (limit {MAX_LEVEL_POINTS}; use force)"
        )));
    }
    Ok(g.level_permutation(n)?.into_iter().map(|x| x as u32).collect())
}

/// The image of the group in the symmetric group on level `n`.
#[derive(Clone, Debug)]
pub struct LevelPermGroup {
    pub level: usize,
    pub names: Vec<String>,
    pub group: PermGroup,
}

impl LevelPermGroup {
    pub fn order(&self) -> BigUint {
        self.group.order()
    }

    pub fn contains(&self, p: &[u32]) -> bool {
        self.group.contains(p)
    }

    pub fn generator(&self, name: &str) -> Option<&Perm> {
        let i = self.names.iter().position(|n| n == name)?;
        self.group.generators().get(i)
    }
}

pub fn quotient_group(group: &Group, n: usize, force: bool) -> Result<LevelPermGroup> {
    let size = level_points(group, n, force)?;
    let gens = group
        .generators()
        .iter()
        .map(|g| level_permutation(g, n, true))
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelPermGroup {
        level: n,
        names: group.names().to_vec(),
        group: PermGroup::new(size, gens),
    })
}

pub fn is_level_transitive(group: &Group, n: usize, force: bool) -> Result<bool> {
    let size = level_points(group, n, force)?;
    let gens = group
        .generators()
        .iter()
        .map(|g| level_permutation(g, n, true))
        .collect::<Result<Vec<_>>>()?;
    Ok(perm_group::orbit(&gens, size, 0).len() == size)
}

/// Schreier generators of the stabilizer of a vertex, as group elements.
#[derive(Clone, Debug)]
pub struct StabilizerData {
    pub vertex: Word,
    /// Size of the orbit of the vertex (the index of the stabilizer).
    pub orbit_size: usize,
    pub generators: Vec<Element>,
}

/// Walks the orbit of `vertex` with coset representatives `r_p` (`r_p(vertex) = p`)
/// and returns the distinct nontrivial `r_{s(p)}⁻¹ · s · r_p`.
pub fn vertex_stabilizer_gens(group: &Group, vertex: &Word, force: bool) -> Result<StabilizerData> {
    let a = group.alphabet();
    a.check(&vertex.0)?;
    let n = vertex.len();
    let size = level_points(group, n, force)?;
    let gens = group.generators();
    let perms = gens
        .iter()
        .map(|g| level_permutation(g, n, true))
        .collect::<Result<Vec<_>>>()?;
    let start = vertex.index(a);
    let mut reps: Vec<Option<Element>> = vec![None; size];
    reps[start] = Some(group.identity());
    let mut orbit = vec![start];
    let mut k = 0;
    while k < orbit.len() {
        let p = orbit[k];
        for (s, perm) in gens.iter().zip(&perms) {
            let q = perm[p] as usize;
            if reps[q].is_none() {
                reps[q] = Some(s.compose(reps[p].as_ref().unwrap())?);
                orbit.push(q);
            }
        }
        k += 1;
    }
    let mut out: Vec<Element> = Vec::new();
    for &p in &orbit {
        let rp = reps[p].as_ref().unwrap();
        for (s, perm) in gens.iter().zip(&perms) {
            let rq = reps[perm[p] as usize].as_ref().unwrap();
            let sg = rq.inverse().compose(&s.compose(rp)?)?;
            if !sg.is_trivial() && !out.contains(&sg) {
                out.push(sg);
            }
        }
    }
    Ok(StabilizerData {
        vertex: vertex.clone(),
        orbit_size: orbit.len(),
        generators: out,
    })
}

/// Ball elements acting as the identity on the cylinder over the first `level`
/// letters of `z`.
pub fn kernel_ball(
    group: &Group,
    z: &Ray,
    level: usize,
    word_bound: usize,
    ball_cap: usize,
) -> Result<Vec<Element>> {
    if z.alphabet() != group.alphabet() {
        return Err(Error::DegreeMismatch {
            left: group.degree(),
            right: z.alphabet().degree(),
        });
    }
    let u = z.prefix(level);
    let ball = Ball::new(group, word_bound, ball_cap)?;
    Ok(ball
        .elements()
        .iter()
        .filter(|g| g.is_trivial_on_cylinder(&u))
        .cloned()
        .collect())
}

/// Sections of `g` and of `h⁻¹gh` at one vertex along the ray.
#[derive(Clone, Debug)]
pub struct SectionComparison {
    pub vertex: Word,
    pub g_section: Element,
    pub conjugate_section: Element,
}

impl SectionComparison {
    pub fn differ(&self) -> bool {
        self.g_section != self.conjugate_section
    }
}

#[derive(Clone, Debug)]
pub struct PropernessWitness {
    pub level: usize,
    pub g: Element,
    pub h: Element,
    /// Shortest moved word of `h⁻¹gh·g⁻¹`.
    pub moved_word: Word,
    /// Comparisons at depths `level − 2` and `level − 1` along the ray.
    pub sections: Vec<SectionComparison>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    /// `g` is the identity on the cylinder `U_ℓ`.
    KernelMembership,
    /// `h` fixes the vertex of `U_ℓ`.
    Stabilizes,
    /// `h⁻¹gh·g⁻¹` is not the identity.
    Commutator,
}

impl Clause {
    pub fn as_str(self) -> &'static str {
        match self {
            Clause::KernelMembership => "a: g acts trivially on U_l",
            Clause::Stabilizes => "b: h fixes the vertex of U_l",
            Clause::Commutator => "c: h^-1 g h g^-1 is nontrivial",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub clause: Clause,
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "witness rejected at clause {}", self.clause.as_str())
    }
}

/// Checks that `g` is trivial on `U_ℓ`, that `h` fixes its vertex, and that
/// `h` does not commute with `g`, so that `g` lies outside the centralizer part.
pub fn properness_witness_check(
    z: &Ray,
    level: usize,
    g: &Element,
    h: &Element,
) -> Result<std::result::Result<PropernessWitness, Rejection>> {
    let u = z.prefix(level);
    g.alphabet().check(&u.0)?;
    if !g.is_trivial_on_cylinder(&u) {
        return Ok(Err(Rejection {
            clause: Clause::KernelMembership,
        }));
    }
    if h.apply(&u)? != u {
        return Ok(Err(Rejection {
            clause: Clause::Stabilizes,
        }));
    }
    let conj = h.inverse().compose(g)?.compose(h)?;
    let comm = conj.compose(&g.inverse())?;
    let Some(moved_word) = comm.is_identity().witness else {
        return Ok(Err(Rejection {
            clause: Clause::Commutator,
        }));
    };
    let sections = [level.checked_sub(2), level.checked_sub(1)]
        .into_iter()
        .flatten()
        .map(|k| {
            let v = z.prefix(k);
            Ok(SectionComparison {
                g_section: g.section(&v)?,
                conjugate_section: conj.section(&v)?,
                vertex: v,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ok(PropernessWitness {
        level,
        g: g.clone(),
        h: h.clone(),
        moved_word,
        sections,
    }))
}

fn require_k1(group: &Group) -> Result<()> {
    match group.spec().family() {
        Family::Kv { v } if v.0 == [1] => Ok(()),
        f => Err(Error::Precondition(format!("this check is specific to K(1), got {f}"))),
    }
}

/// The standard witness pair in `K(1)` at level `ℓ >= 3`: with `e = ℓ − 1`
/// (ℓ odd) or `ℓ − 2` (ℓ even) and `m = e/2`,
/// `g = (a1a2)^(−2^e) · a2^(2^m) · (a1a2)^(2^e)` and `h = (a1a2)^(−2^ℓ)`.
pub fn k1_witness_pair(group: &Group, level: usize) -> Result<(Element, Element)> {
    require_k1(group)?;
    if !(3..=62).contains(&level) {
        return Err(Error::Precondition(format!("level must be in 3..=62, got {level}")));
    }
    let e = if level % 2 == 1 { level - 1 } else { level - 2 };
    let x = group.parse("a1 a2")?;
    let conj_by = x.power(1 << e);
    let core = group.parse("a2")?.power(1 << (e / 2));
    let g = conj_by.inverse().compose(&core)?.compose(&conj_by)?;
    let h = x.power(-(1i64 << level));
    Ok((g, h))
}

/// One identity from the `K(1)` computation chain.
#[derive(Clone, Debug)]
pub struct FormulaRow {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct FormulaReport {
    pub rows: Vec<FormulaRow>,
}

impl FormulaReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Checks the `K(1)` power and section identities for `ℓ <= max_level`.
/// Level forms are written with the tuple indexed by image position.
pub fn section_formula_check(group: &Group, max_level: usize) -> Result<FormulaReport> {
    require_k1(group)?;
    let p = |s: &str| group.parse(s);
    let one = group.identity();
    let sigma = [1u8, 0];
    let triv = [0u8, 1];
    let form = |perm: &[u8], t: [&Element; 2]| Element::from_image_indexed(perm, &[t[0].clone(), t[1].clone()]);
    let (a1, a2, a1a2, a2a1) = (p("a1")?, p("a2")?, p("a1 a2")?, p("a2 a1")?);
    let mut rows = Vec::new();
    let mut row = |name: String, holds: bool| rows.push(FormulaRow { name, holds });

    row("a1a2 = (a2a1, 1)σ".into(), a1a2 == form(&sigma, [&a2a1, &one])?);
    row("a2a1 = (a2, a1)σ".into(), a2a1 == form(&sigma, [&a2, &a1])?);
    row(
        "(a1a2)^-1 = (1, (a2a1)^-1)σ".into(),
        a1a2.inverse() == form(&sigma, [&one, &a2a1.inverse()])?,
    );
    row(
        "(a2a1)^-1 = (a1^-1, a2^-1)σ".into(),
        a2a1.inverse() == form(&sigma, [&a1.inverse(), &a2.inverse()])?,
    );
    row("(a1a2)^2 = (a2a1, a2a1)".into(), a1a2.power(2) == form(&triv, [&a2a1, &a2a1])?);
    row("(a2a1)^2 = (a2a1, a1a2)".into(), a2a1.power(2) == form(&triv, [&a2a1, &a1a2])?);
    row("a1^2 = (a2, a2)".into(), a1.power(2) == form(&triv, [&a2, &a2])?);
    let sq = a2a1.power(2);
    row("(a1a2)^4 = ((a2a1)^2, (a2a1)^2)".into(), a1a2.power(4) == form(&triv, [&sq, &sq])?);
    let lnf = a1a2.power(4).level_normal_form(2)?;
    row(
        "(a1a2)^4 = (a2a1, a1a2, a2a1, a1a2) at level 2".into(),
        lnf.is_trivial_perm() && lnf.sections == [a2a1.clone(), a1a2.clone(), a2a1.clone(), a1a2.clone()],
    );
    row("a2|_1 = a1".into(), a2.section(&Word(vec![1]))? == a1);
    row("a2^2|_11 = a2".into(), a2.power(2).section(&Word(vec![1, 1]))? == a2);
    for l in 1..=max_level {
        let g = a1a2.power(1 << l);
        let u = Word::repeat(1, l);
        let expected = if l % 2 == 1 { &a2a1 } else { &a1a2 };
        let fixes = is_trivial_on_level(&g, l)?;
        row(
            format!(
                "(a1a2)^(2^{l}) is trivial on level {l} with section {} at 1^{l}",
                if l % 2 == 1 { "a2a1" } else { "a1a2" }
            ),
            fixes && g.section(&u)? == *expected,
        );
    }
    for l in 1..=max_level {
        let g = a2.power(1 << l);
        let u = Word::repeat(1, 2 * l);
        row(
            format!("a2^(2^{l}) fixes 1^{} with section a2 there", 2 * l),
            g.apply(&u)? == u && g.section(&u)? == a2,
        );
    }
    let conj = a1a2.inverse().compose(&a2)?.compose(&a1a2)?;
    row("(a1a2)^-1 a2 (a1a2) = (a1, 1)".into(), conj == form(&triv, [&a1, &one])?);
    let conj2 = a1a2.compose(&a2)?.compose(&a1a2.inverse())?;
    let target = p("a2 a1 a2^-1")?;
    row("(a1a2) a2 (a1a2)^-1 = (a2a1a2^-1, 1)".into(), conj2 == form(&triv, [&target, &one])?);
    Ok(FormulaReport { rows })
}

/// Whether `g` acts trivially on level `n`, decided without listing the level:
/// every state reachable in fewer than `n` steps must have a trivial permutation.
fn is_trivial_on_level(g: &Element, n: usize) -> Result<bool> {
    let m = g.machine();
    let mut layer = vec![0usize];
    for _ in 0..n {
        if layer.iter().any(|&s| !m.state(s).is_trivial_perm()) {
            return Ok(false);
        }
        let mut next: Vec<usize> = layer
            .iter()
            .flat_map(|&s| m.state(s).successors.iter().map(|&t| t as usize).collect::<Vec<_>>())
            .collect();
        next.sort_unstable();
        next.dedup();
        layer = next;
    }
    Ok(true)
}
