//! Self-similar groups given by wreath recursions: the built-in families, the
//! JSON document format, and the compiled [`Group`] used by every analysis.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree_words::{Alphabet, Word};
use crate::wreath::{check_permutation, Automaton, Element, GenLetter, GroupWord, RawMachine};

/// Largest number of word-states a single generator may unfold into.
const MAX_GENERATOR_STATES: usize = 4096;

/// Which construction a spec came from. Descriptive only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// The binary adding machine `a1 = (a1, 1)σ`.
    Odometer,
    Kv { v: Word },
    Kwv { w: Word, v: Word },
    Md { d: usize },
    Custom(Option<String>),
}

pub type FamilyParams = Family;

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bin = |w: &Word| w.render(Alphabet::new(2).unwrap());
        match self {
            Family::Odometer => f.write_str("K()"),
            Family::Kv { v } => write!(f, "K({})", bin(v)),
            Family::Kwv { w, v } => write!(f, "K({},{})", bin(w), bin(v)),
            Family::Md { d } => write!(f, "M({d})"),
            Family::Custom(Some(name)) => f.write_str(name),
            Family::Custom(None) => f.write_str("custom"),
        }
    }
}

/// One generator: its root permutation and, for each letter `x`, the word for `g|_x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorDef {
    pub name: String,
    pub perm: Vec<u8>,
    pub sections: Vec<GroupWord>,
}

/// Degree plus named generator recursions.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    alphabet: Alphabet,
    generators: Vec<GeneratorDef>,
    family: Family,
}

// Family metadata is descriptive and does not take part in equality.
impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.generators == other.generators
    }
}

impl Eq for GroupSpec {}

fn binary_letters(w: &Word, what: &str) -> Result<()> {
    if let Some(&x) = w.0.iter().find(|&&x| x > 1) {
        return Err(Error::InvalidFamily(format!(
            "{what} must be a word over {{0,1}}, found letter {x}"
        )));
    }
    Ok(())
}

/// Slot-form sections from a tuple listed by image position (`t_j = g|_{σ⁻¹(j)}`).
fn slots_from_image_indexed(perm: &[u8], tuple: Vec<GroupWord>) -> Vec<GroupWord> {
    perm.iter().map(|&y| tuple[y as usize].clone()).collect()
}

impl GroupSpec {
    pub fn new(degree: usize, generators: Vec<GeneratorDef>, family: Family) -> Result<Self> {
        let alphabet = Alphabet::new(degree)?;
        let spec = GroupSpec {
            alphabet,
            generators,
            family,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let d = self.alphabet.degree();
        if self.generators.is_empty() {
            return Err(Error::InvalidSpec("no generators".into()));
        }
        let mut names = BTreeSet::new();
        for g in &self.generators {
            if g.name.is_empty() || g.name.contains(|c: char| c.is_whitespace() || c == '^') {
                return Err(Error::InvalidSpec(format!("bad generator name {:?}", g.name)));
            }
            if !names.insert(g.name.as_str()) {
                return Err(Error::InvalidSpec(format!("duplicate generator {:?}", g.name)));
            }
            if g.perm.len() != d {
                return Err(Error::DegreeMismatch {
                    left: d,
                    right: g.perm.len(),
                });
            }
            check_permutation(&g.perm)?;
            if g.sections.len() != d {
                return Err(Error::DegreeMismatch {
                    left: d,
                    right: g.sections.len(),
                });
            }
            for w in &g.sections {
                if let Some(l) = w.0.iter().find(|l| l.gen as usize >= self.generators.len()) {
                    return Err(Error::InvalidSpec(format!(
                        "section references generator index {}",
                        l.gen
                    )));
                }
            }
        }
        Ok(())
    }

    /// `K(v)`: `a1 = (a_n, 1)σ` and `a_{i+1} = (a_i, 1)` or `(1, a_i)` as `x_i` is 0 or 1.
    pub fn build_kv(v: &Word) -> Result<Self> {
        binary_letters(v, "v")?;
        let n = v.len() + 1;
        let sigma = vec![1u8, 0];
        let mut gens = Vec::with_capacity(n);
        gens.push(GeneratorDef {
            name: "a1".into(),
            sections: slots_from_image_indexed(
                &sigma,
                vec![GroupWord::generator(n - 1), GroupWord::identity()],
            ),
            perm: sigma,
        });
        for (i, &x) in v.0.iter().enumerate() {
            gens.push(GeneratorDef {
                name: format!("a{}", i + 2),
                perm: vec![0, 1],
                sections: side_section(x, GroupWord::generator(i)),
            });
        }
        let family = if v.is_empty() {
            Family::Odometer
        } else {
            Family::Kv { v: v.clone() }
        };
        GroupSpec::new(2, gens, family)
    }

    /// `K(w, v)` with generators `b_1…b_k, a_1…a_n` (in that order).
    pub fn build_kwv(w: &Word, v: &Word) -> Result<Self> {
        binary_letters(w, "w")?;
        binary_letters(v, "v")?;
        if w.is_empty() || v.is_empty() {
            return Err(Error::InvalidFamily("K(w,v) needs nonempty w and v".into()));
        }
        let (k, n) = (w.len(), v.len());
        let (yk, xn) = (w.0[k - 1], v.0[n - 1]);
        if yk == xn {
            return Err(Error::InvalidFamily(format!(
                "K(w,v) requires the last letters of w and v to differ (last(w) != last(v)); \
                 both are {yk}"
            )));
        }
        let b = GroupWord::generator;
        let a = |i: usize| GroupWord::generator(k + i);
        let mut gens = Vec::with_capacity(k + n);
        gens.push(GeneratorDef {
            name: "b1".into(),
            perm: vec![1, 0],
            sections: vec![GroupWord::identity(), GroupWord::identity()],
        });
        for (j, &y) in w.0[..k - 1].iter().enumerate() {
            gens.push(GeneratorDef {
                name: format!("b{}", j + 2),
                perm: vec![0, 1],
                sections: side_section(y, b(j)),
            });
        }
        let a1_sections = if yk == 0 {
            vec![b(k - 1), a(n - 1)]
        } else {
            vec![a(n - 1), b(k - 1)]
        };
        gens.push(GeneratorDef {
            name: "a1".into(),
            perm: vec![0, 1],
            sections: a1_sections,
        });
        for (i, &x) in v.0[..n - 1].iter().enumerate() {
            gens.push(GeneratorDef {
                name: format!("a{}", i + 2),
                perm: vec![0, 1],
                sections: side_section(x, a(i)),
            });
        }
        GroupSpec::new(
            2,
            gens,
            Family::Kwv {
                w: w.clone(),
                v: v.clone(),
            },
        )
    }

    /// `M(d)`: for `i < d`, `m_i` is the cycle `(0 1 … d-i)` with `m_i` in tuple
    /// position `d-i`; `m_d = (m_1, …, m_d)`.
    pub fn build_md(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidFamily(format!("M(d) needs d >= 2, got {d}")));
        }
        Alphabet::new(d)?;
        let mut gens = Vec::with_capacity(d);
        for i in 1..d {
            let top = d - i;
            let perm: Vec<u8> = (0..d)
                .map(|j| match j {
                    j if j < top => (j + 1) as u8,
                    j if j == top => 0,
                    j => j as u8,
                })
                .collect();
            let mut tuple = vec![GroupWord::identity(); d];
            tuple[top] = GroupWord::generator(i - 1);
            gens.push(GeneratorDef {
                name: format!("m{i}"),
                sections: slots_from_image_indexed(&perm, tuple),
                perm,
            });
        }
        gens.push(GeneratorDef {
            name: format!("m{d}"),
            perm: (0..d as u8).collect(),
            sections: (0..d).map(GroupWord::generator).collect(),
        });
        GroupSpec::new(d, gens, Family::Md { d })
    }

    /// The first Grigorchuk group `a = σ, b = (a, c), c = (a, d), d = (1, b)`.
    pub fn grigorchuk() -> Self {
        let g = GroupWord::generator;
        let gens = vec![
            GeneratorDef {
                name: "a".into(),
                perm: vec![1, 0],
                sections: vec![GroupWord::identity(), GroupWord::identity()],
            },
            GeneratorDef {
                name: "b".into(),
                perm: vec![0, 1],
                sections: vec![g(0), g(2)],
            },
            GeneratorDef {
                name: "c".into(),
                perm: vec![0, 1],
                sections: vec![g(0), g(3)],
            },
            GeneratorDef {
                name: "d".into(),
                perm: vec![0, 1],
                sections: vec![GroupWord::identity(), g(1)],
            },
        ];
        GroupSpec::new(2, gens, Family::Custom(Some("grigorchuk".into())))
            .expect("grigorchuk spec is valid")
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn degree(&self) -> usize {
        self.alphabet.degree()
    }

    pub fn generators(&self) -> &[GeneratorDef] {
        &self.generators
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Parses `"a1 a2 a1^-1"`; tokens may also carry integer exponents (`a2^4`).
    /// The empty string is the identity.
    pub fn parse_word(&self, text: &str) -> Result<GroupWord> {
        let mut out = GroupWord::identity();
        let mut unknown = Vec::new();
        for token in text.split_whitespace() {
            let (name, exp) = match token.split_once('^') {
                Some((name, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in {token:?}")))?;
                    (name, e)
                }
                None => (token, 1),
            };
            if name == "1" || name == "e" {
                continue;
            }
            match self.generator_index(name) {
                Some(i) => out = out.mul(&GroupWord::generator(i).pow(exp)),
                None => unknown.push(name.to_string()),
            }
        }
        if !unknown.is_empty() {
            return Err(Error::UnknownGenerator(unknown));
        }
        Ok(out)
    }

    pub fn render_word(&self, w: &GroupWord) -> String {
        w.render(&self.names())
    }

    /// Loads the JSON document format.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        GroupSpec::from_document(&doc)
    }

    pub fn from_document(doc: &SpecDocument) -> Result<Self> {
        let alphabet = Alphabet::new(doc.degree)?;
        let d = alphabet.degree();
        let names: Vec<String> = doc.generators.keys().cloned().collect();
        let index: HashMap<&str, usize> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut unknown = BTreeSet::new();
        let mut gens = Vec::with_capacity(names.len());
        for (name, g) in &doc.generators {
            if g.perm.len() != d || g.sections.len() != d {
                return Err(Error::DegreeMismatch {
                    left: d,
                    right: if g.perm.len() != d { g.perm.len() } else { g.sections.len() },
                });
            }
            if g.perm.iter().any(|&p| p >= d) {
                return Err(Error::NotABijection(g.perm.clone()));
            }
            let perm: Vec<u8> = g.perm.iter().map(|&p| p as u8).collect();
            check_permutation(&perm)?;
            let mut sections = Vec::with_capacity(d);
            for text in &g.sections {
                let mut w = GroupWord::identity();
                for token in text.split_whitespace() {
                    let (n, inverse) = match token.strip_suffix("^-1") {
                        Some(n) => (n, true),
                        None => (token, false),
                    };
                    match index.get(n) {
                        Some(&i) => w = w.mul(&GroupWord(vec![GenLetter::new(i, inverse)])),
                        None => {
                            unknown.insert(n.to_string());
                        }
                    }
                }
                sections.push(w);
            }
            if doc.sections_order == SectionsOrder::Image {
                sections = slots_from_image_indexed(&perm, sections);
            }
            gens.push(GeneratorDef {
                name: name.clone(),
                perm,
                sections,
            });
        }
        if !unknown.is_empty() {
            return Err(Error::UnknownGenerator(unknown.into_iter().collect()));
        }
        let family = Family::Custom(doc.name.clone());
        GroupSpec::new(d, gens, family)
    }

    pub fn to_document(&self) -> SpecDocument {
        let names = self.names();
        SpecDocument {
            degree: self.degree(),
            generators: self
                .generators
                .iter()
                .map(|g| {
                    (
                        g.name.clone(),
                        GeneratorDocument {
                            perm: g.perm.iter().map(|&p| p as usize).collect(),
                            sections: g.sections.iter().map(|w| w.render(&names)).collect(),
                        },
                    )
                })
                .collect(),
            sections_order: SectionsOrder::Slot,
            name: Some(self.family.to_string()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("spec serializes")
    }

    /// Root permutation of a word: `σ_{f_1 ⋯ f_m} = σ_{f_1} ∘ ⋯ ∘ σ_{f_m}`.
    fn letter_image(&self, l: GenLetter, x: u8) -> u8 {
        let p = &self.generators[l.gen as usize].perm;
        if l.inverse {
            p.iter().position(|&y| y == x).unwrap() as u8
        } else {
            p[x as usize]
        }
    }

    fn letter_section(&self, l: GenLetter, x: u8) -> GroupWord {
        let g = &self.generators[l.gen as usize];
        if l.inverse {
            let pre = g.perm.iter().position(|&y| y == x).unwrap();
            g.sections[pre].inverse()
        } else {
            g.sections[x as usize].clone()
        }
    }

    /// Syntactic section of a word at one letter, and the image of that letter.
    pub fn word_section_letter(&self, w: &GroupWord, x: u8) -> (u8, GroupWord) {
        let mut cur = x;
        let mut parts: Vec<GroupWord> = Vec::with_capacity(w.len());
        for &l in w.0.iter().rev() {
            parts.push(self.letter_section(l, cur));
            cur = self.letter_image(l, cur);
        }
        let mut out = GroupWord::identity();
        for p in parts.iter().rev() {
            out = out.mul(p);
        }
        (cur, out)
    }

    /// Syntactic section of a word at a finite word.
    pub fn word_section(&self, w: &GroupWord, u: &Word) -> GroupWord {
        u.0.iter()
            .fold(w.clone(), |acc, &x| self.word_section_letter(&acc, x).1)
    }
}

fn side_section(letter: u8, w: GroupWord) -> Vec<GroupWord> {
    if letter == 0 {
        vec![w, GroupWord::identity()]
    } else {
        vec![GroupWord::identity(), w]
    }
}

/// Order in which a document lists sections.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionsOrder {
    /// `sections[i]` is the section at letter `i`.
    #[default]
    Slot,
    /// `sections[j]` is the section at the letter that the permutation sends to `j`.
    Image,
}

fn is_default_order(o: &SectionsOrder) -> bool {
    *o == SectionsOrder::Slot
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorDocument {
    pub perm: Vec<usize>,
    pub sections: Vec<String>,
}

/// The JSON group document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecDocument {
    pub degree: usize,
    pub generators: IndexMap<String, GeneratorDocument>,
    #[serde(default, skip_serializing_if = "is_default_order")]
    pub sections_order: SectionsOrder,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// A spec compiled to canonical generator machines.
#[derive(Clone, Debug)]
pub struct Group {
    spec: GroupSpec,
    names: Vec<String>,
    generators: Vec<Element>,
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Self> {
        let names = spec.names();
        let generators = (0..spec.generators.len())
            .map(|i| {
                let m = unfold_word(&spec, &GroupWord::generator(i))?;
                Ok(Element::from_machine(m).with_word(GroupWord::generator(i)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Group {
            spec,
            names,
            generators,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn alphabet(&self) -> Alphabet {
        self.spec.alphabet
    }

    pub fn degree(&self) -> usize {
        self.spec.degree()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Result<&Element> {
        self.spec
            .generator_index(name)
            .map(|i| &self.generators[i])
            .ok_or_else(|| Error::UnknownGenerator(vec![name.to_string()]))
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.alphabet())
    }

    pub fn letter(&self, l: GenLetter) -> Element {
        let g = &self.generators[l.gen as usize];
        if l.inverse {
            g.inverse()
        } else {
            g.clone()
        }
    }

    /// Evaluates a group word.
    pub fn element(&self, w: &GroupWord) -> Element {
        let mut acc = self.identity();
        for &l in &w.0 {
            acc = acc.compose(&self.letter(l)).expect("same alphabet");
        }
        acc.with_word(w.clone())
    }

    /// Parses and evaluates a word such as `"a1 a2^-1"`.
    pub fn parse(&self, text: &str) -> Result<Element> {
        Ok(self.element(&self.spec.parse_word(text)?))
    }

    /// Section with the word tracked syntactically when the element has one.
    pub fn section(&self, g: &Element, u: &Word) -> Result<Element> {
        let s = g.section(u)?;
        Ok(match g.word() {
            Some(w) => s.with_word(self.spec.word_section(w, u)),
            None => s,
        })
    }

    pub fn render(&self, g: &Element) -> String {
        match g.word() {
            Some(w) if w.is_empty() => "1".into(),
            Some(w) => w.render(&self.names),
            None => format!("<{}-state machine>", g.num_states()),
        }
    }

    /// Generators followed by their inverses, skipping inverses equal to a
    /// generator already listed (involutions).
    pub fn symmetric_letters(&self) -> Vec<GenLetter> {
        let mut letters: Vec<GenLetter> =
            (0..self.generators.len()).map(|i| GenLetter::new(i, false)).collect();
        for (i, g) in self.generators.iter().enumerate() {
            let inv = g.inverse();
            if !self.generators.contains(&inv) {
                letters.push(GenLetter::new(i, true));
            }
        }
        letters.sort();
        letters
    }
}

/// Unfolds a word into a machine whose states are the reduced words reached by
/// taking sections; fails if the unfolding is not finite within the cap.
const MAX_UNFOLD_WORD: usize = 512;

fn unfold_word(spec: &GroupSpec, start: &GroupWord) -> Result<Automaton> {
    let d = spec.degree();
    let start = start.free_reduce();
    let mut index: HashMap<GroupWord, u32> = HashMap::new();
    let mut order: Vec<GroupWord> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(start.clone(), 0);
    order.push(start.clone());
    queue.push_back(0usize);
    let mut perms = Vec::new();
    let mut succ = Vec::new();
    while let Some(i) = queue.pop_front() {
        let w = order[i].clone();
        for x in 0..d as u8 {
            let (img, sec) = spec.word_section_letter(&w, x);
            perms.push(img);
            let id = match index.get(&sec) {
                Some(&id) => id,
                None => {
                    if order.len() >= MAX_GENERATOR_STATES || sec.len() > MAX_UNFOLD_WORD {
                        return Err(Error::InvalidSpec(format!(
                            "word {:?} does not unfold to a finite-state automorphism within \
                             {MAX_GENERATOR_STATES} states",
                            spec.render_word(&start)
                        )));
                    }
                    let id = order.len() as u32;
                    index.insert(sec.clone(), id);
                    order.push(sec);
                    queue.push_back(id as usize);
                    id
                }
            };
            succ.push(id);
        }
    }
    Automaton::from_raw(&RawMachine {
        alphabet: spec.alphabet,
        perms,
        succ,
        initial: 0,
    })
}
