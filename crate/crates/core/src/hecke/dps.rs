//! Degenerate principal series: exponent templates, equivalence classes of exponents
//! and the search for reducibility points.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::affine::{coroot, dot, fmt_q, reflect, weyl_apply, Exponent, Vect};
use super::catalog::{Catalog, CaseSpec, FixtureSpec, Relation};
use super::qz::{int, Q};
use super::Presentation;
use crate::error::HeckeError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    I,
    J,
    A,
    B,
    C,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::I, Family::J, Family::A, Family::B, Family::C];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::I => "I",
            Family::J => "J",
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = HeckeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" => Ok(Family::I),
            "J" => Ok(Family::J),
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            _ => Err(HeckeError::Unknown { kind: "family", name: s.to_string() }),
        }
    }
}

/// s = re + (2πi/ln q)·tor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SParam {
    pub re: Q,
    pub tor: Q,
}

impl SParam {
    pub fn real(re: Q) -> Self {
        SParam { re, tor: Q::zero() }
    }

    pub fn new(re: Q, tor: Q) -> Self {
        SParam { re, tor }
    }
}

impl fmt::Display for SParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tor.is_zero() {
            write!(f, "{}", fmt_q(&self.re))
        } else {
            write!(f, "{} + {}·2πi/ln q", fmt_q(&self.re), fmt_q(&self.tor))
        }
    }
}

/// A degenerate principal series of one case: its exponents are c + s·d.
#[derive(Clone, Debug)]
pub struct Series {
    pub presentation: Arc<Presentation>,
    pub family: Family,
    pub template: Vec<(Vect, Vect)>,
    /// Smallest p > 0 with s and s + p·2πi/ln q giving the same exponents.
    pub period: Q,
}

fn rat_gcd(a: &Q, b: &Q) -> Q {
    use num_integer::Integer;
    let n = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    Q::new(n, a.denom() * b.denom())
}

impl Series {
    pub fn new(spec: &CaseSpec, family: Family) -> Result<Series, HeckeError> {
        let unavailable = || HeckeError::FamilyUnavailable { family: family.to_string(), case: spec.id.clone() };
        let fam = spec.family(&family.to_string()).ok_or_else(unavailable)?;
        let presentation = spec.presentation()?;
        let template = fam
            .template
            .iter()
            .enumerate()
            .map(|(i, t)| t.parse(spec.ambient_dim, &format!("template/{i}")))
            .collect::<Result<Vec<_>, _>>()?;
        let mut g = Q::zero();
        for (_, d) in &template {
            for v in presentation.lattice.pairings(d) {
                if !v.is_zero() {
                    g = if g.is_zero() { v.abs() } else { rat_gcd(&g, &v.abs()) };
                }
            }
        }
        let period = if g.is_zero() { Q::one() } else { g.recip() };
        Ok(Series { presentation, family, template, period })
    }

    /// Representative with 0 ≤ tor < period, and tor ≤ period/2 when re = 0
    /// (s and −s give the same exponent multiset).
    pub fn canonical(&self, s: &SParam) -> SParam {
        let p = &self.period;
        let mut re = s.re.clone();
        let mut tor = s.tor.clone();
        if re.is_negative() {
            re = -re;
            tor = -tor;
        }
        tor = &tor - (&tor / p).floor() * p;
        if re.is_zero() && tor > p / int(2) {
            tor = p - &tor;
        }
        SParam { re, tor }
    }

    /// The exponents at s, in template order.
    pub fn exponents(&self, s: &SParam) -> Vec<Exponent> {
        self.template
            .iter()
            .map(|(c, d)| {
                let re: Vect = c.iter().zip(d).map(|(ci, di)| ci + &s.re * di).collect();
                let tor: Vect = d.iter().map(|di| &s.tor * di).collect();
                Exponent::new(re, tor, &self.presentation.lattice)
            })
            .collect()
    }

    /// Real parts s ≥ 0 where some exponent meets a root hyperplane or a
    /// bullet boundary μ(α^∨) = ±c.
    pub fn candidate_re(&self) -> Vec<Q> {
        let p = &self.presentation;
        let mut roots: BTreeSet<Vect> = BTreeSet::new();
        for w in p.weyl() {
            for a in p.simple_roots() {
                roots.insert(weyl_apply(w, a));
            }
        }
        let mut out = BTreeSet::new();
        for (c, d) in &self.template {
            for (b, vs) in p.bullet_coroots.iter().zip(&p.bullet_blocks) {
                let dv = dot(d, b);
                if !dv.is_zero() {
                    for (k, _) in vs {
                        for sign in [1, -1] {
                            out.insert((k * int(sign) - dot(c, b)) / &dv);
                        }
                    }
                }
            }
            for a in &roots {
                let av = coroot(a);
                let dv = dot(d, &av);
                if !dv.is_zero() {
                    out.insert(-dot(c, &av) / dv);
                }
            }
        }
        out.into_iter().filter(|x| !x.is_negative()).collect()
    }

    /// Candidate points: candidate real parts crossed with a torsion grid of step period/12.
    pub fn candidates(&self) -> Vec<SParam> {
        let step = &self.period / int(12);
        let mut out = vec![];
        for re in self.candidate_re() {
            for k in 0..12 {
                let s = SParam { re: re.clone(), tor: &step * int(k) };
                if self.canonical(&s) == s {
                    out.push(s);
                }
            }
        }
        out
    }
}

/// Partition of an exponent multiset under admissible simple reflections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classes {
    /// Each class with multiplicity, in order of first appearance.
    pub classes: Vec<Vec<Exponent>>,
    /// Every exponent has trivial stabilizer in W (modulo X*).
    pub regular: bool,
    /// No exponent occurs twice.
    pub multiplicity_free: bool,
    /// Admissible reflections leading outside the multiset.
    pub escapes: usize,
}

impl Classes {
    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

fn reflect_exp(p: &Presentation, e: &Exponent, i: usize) -> Exponent {
    let a = &p.simple_roots()[i];
    let av = coroot(a);
    Exponent::new(reflect(&e.re, a, &av), reflect(&e.tor, a, &av), &p.lattice)
}

/// s_i(μ) is equivalent to μ unless μ(α_i^∨) ≡ ±v modulo 2πi/ln q·Z for a blocking value v.
fn admissible(p: &Presentation, e: &Exponent, i: usize) -> bool {
    let b = &p.bullet_coroots[i];
    let r = dot(&e.re, b);
    let t = dot(&e.tor, b);
    !p.bullet_blocks[i].iter().any(|(m, t0)| {
        (r == *m && (&t - t0).is_integer()) || (r == -m && (&t + t0).is_integer())
    })
}

fn stabilizer_size(p: &Presentation, e: &Exponent) -> usize {
    p.weyl()
        .iter()
        .filter(|w| {
            weyl_apply(w, &e.re) == e.re && p.lattice.in_dual(&{
                let t = weyl_apply(w, &e.tor);
                t.iter().zip(&e.tor).map(|(a, b)| a - b).collect::<Vect>()
            })
        })
        .count()
}

pub fn is_regular(p: &Presentation, e: &Exponent) -> bool {
    stabilizer_size(p, e) == 1
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

pub fn equivalence_classes(p: &Presentation, exps: &[Exponent]) -> Classes {
    let mut distinct: Vec<&Exponent> = vec![];
    let mut index: HashMap<&Exponent, usize> = HashMap::new();
    for e in exps {
        index.entry(e).or_insert_with(|| {
            distinct.push(e);
            distinct.len() - 1
        });
    }
    let mut parent: Vec<usize> = (0..distinct.len()).collect();
    let mut escapes = 0;
    for (k, e) in distinct.iter().enumerate() {
        for i in 0..p.simple_roots().len() {
            if !admissible(p, e, i) {
                continue;
            }
            match index.get(&reflect_exp(p, e, i)) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, k), find(&mut parent, j));
                    parent[a] = b;
                }
                None => escapes += 1,
            }
        }
    }
    let mut order: Vec<usize> = vec![];
    let mut groups: HashMap<usize, Vec<Exponent>> = HashMap::new();
    for e in exps {
        let r = find(&mut parent, index[e]);
        if !groups.contains_key(&r) {
            order.push(r);
        }
        groups.entry(r).or_default().push(e.clone());
    }
    let classes = order.into_iter().map(|r| groups.remove(&r).expect("group")).collect();
    let regular = distinct.iter().all(|e| is_regular(p, e));
    let multiplicity_free = distinct.len() == exps.len();
    Classes { classes, regular, multiplicity_free, escapes }
}

/// The exponents of the degenerate principal series of `family` at s.
pub fn dps_exponent_list(cat: &Catalog, family: Family, case: &str, s: &SParam) -> Result<Vec<Exponent>, HeckeError> {
    let series = Series::new(cat.case(case)?, family)?;
    Ok(series.exponents(s))
}

/// What the exponents alone say about a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// One equivalence class and no repeated exponent.
    Irreducible,
    /// Regular with several classes.
    Reducible,
    /// Anything else: the exponents alone do not decide.
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Irreducible => "irreducible",
            Verdict::Reducible => "reducible",
            Verdict::Undetermined => "undetermined",
        })
    }
}

#[derive(Clone, Debug)]
pub struct PointReport {
    pub s: SParam,
    pub regular: bool,
    pub class_sizes: Vec<usize>,
    pub verdict: Verdict,
    pub fixture: Option<FixtureSpec>,
    /// Engine verdict completed by the fixture; None when neither decides.
    pub reducible: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct DpsReport {
    pub case: String,
    pub family: Family,
    pub period: Q,
    /// Every non-generic candidate and every fixture point, sorted by s.
    pub points: Vec<PointReport>,
    pub reducibility_points: Vec<SParam>,
    pub theorem_points: Vec<SParam>,
    pub undetermined: Vec<SParam>,
    /// Exponent accounting identities checked (partition or containment).
    pub accounting_checked: usize,
    pub conflicts: Vec<String>,
}

impl DpsReport {
    pub fn consistent(&self) -> bool {
        self.conflicts.is_empty()
    }
}

fn multiset(v: &[Exponent]) -> BTreeMap<&Exponent, usize> {
    let mut m = BTreeMap::new();
    for e in v {
        *m.entry(e).or_insert(0) += 1;
    }
    m
}

/// Scans candidate points, classifies each by its exponents, and cross-checks
/// against the cataloged theorem points and composition fixtures.
pub fn dps_reducibility(cat: &Catalog, family: Family, case: &str) -> Result<DpsReport, HeckeError> {
    let spec = cat.case(case)?;
    let series = Series::new(spec, family)?;
    let fam = spec.family(&family.to_string()).expect("checked by Series::new");
    let p = series.presentation.clone();
    let mut conflicts = vec![];

    let mut fixtures: BTreeMap<SParam, FixtureSpec> = BTreeMap::new();
    for (k, f) in fam.fixtures.iter().enumerate() {
        let (re, tor) = f.s.parse(&format!("fixtures/{k}/s"))?;
        let s = series.canonical(&SParam { re, tor });
        if fixtures.insert(s.clone(), f.clone()).is_some() {
            conflicts.push(format!("duplicate fixture at s = {s}"));
        }
    }
    let theorem: BTreeSet<SParam> = fam
        .theorem_points
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let (re, tor) = t.parse(&format!("theorem_points/{k}"))?;
            Ok(series.canonical(&SParam { re, tor }))
        })
        .collect::<Result<_, HeckeError>>()?;

    let mut pts: BTreeSet<SParam> = fixtures.keys().cloned().collect();
    pts.extend(series.candidates());

    let mut points = vec![];
    let mut accounting_checked = 0;
    for s in pts {
        let exps = series.exponents(&s);
        let cl = equivalence_classes(&p, &exps);
        if cl.escapes > 0 {
            conflicts.push(format!("s = {s}: {} admissible reflections leave the exponent set", cl.escapes));
        }
        let verdict = match (cl.classes.len(), cl.regular, cl.multiplicity_free) {
            (1, _, true) => Verdict::Irreducible,
            (n, true, _) if n > 1 => Verdict::Reducible,
            _ => Verdict::Undetermined,
        };
        let fixture = fixtures.get(&s).cloned();
        if fixture.is_none() && cl.classes.len() == 1 && cl.regular {
            continue;
        }
        let reducible = match (verdict, fixture.as_ref().and_then(|f| f.reducible)) {
            (Verdict::Irreducible, Some(true)) => {
                conflicts.push(format!("s = {s}: fixture says reducible but the exponents form one class"));
                Some(false)
            }
            (Verdict::Reducible, Some(false)) => {
                conflicts.push(format!("s = {s}: fixture says irreducible but the point is regular with several classes"));
                Some(true)
            }
            (Verdict::Irreducible, _) => Some(false),
            (Verdict::Reducible, _) => Some(true),
            (Verdict::Undetermined, r) => {
                if fixture.is_none() {
                    conflicts.push(format!("s = {s}: exponents do not decide and there is no fixture"));
                }
                r
            }
        };
        if let Some(f) = &fixture {
            if let Some(rel) = f.relation {
                let mut parts = vec![];
                for name in &f.constituents {
                    parts.extend(spec.expected_exponents_in(&p, name)?);
                }
                let have = multiset(&exps);
                let want = multiset(&parts);
                let ok = match rel {
                    Relation::Partition => have == want,
                    Relation::Contains => want.iter().all(|(e, n)| have.get(e).is_some_and(|m| m >= n)),
                };
                accounting_checked += 1;
                if !ok {
                    conflicts.push(format!(
                        "s = {s}: exponents of {} do not {} the series",
                        f.constituents.join(", "),
                        if rel == Relation::Partition { "partition" } else { "embed in" }
                    ));
                }
                if rel == Relation::Partition && f.length.is_some_and(|l| l as usize != f.constituents.len()) {
                    conflicts.push(format!("s = {s}: length disagrees with the listed constituents"));
                }
            }
            if f.length.is_some_and(|l| l > 1) && reducible == Some(false) {
                conflicts.push(format!("s = {s}: composition length > 1 at an irreducible point"));
            }
        }
        points.push(PointReport { s, regular: cl.regular, class_sizes: cl.sizes(), verdict, fixture, reducible });
    }

    let reducibility_points: Vec<SParam> =
        points.iter().filter(|pt| pt.reducible == Some(true)).map(|pt| pt.s.clone()).collect();
    let undetermined: Vec<SParam> = points.iter().filter(|pt| pt.reducible.is_none()).map(|pt| pt.s.clone()).collect();
    let found: BTreeSet<SParam> = reducibility_points.iter().cloned().collect();
    for s in theorem.difference(&found) {
        conflicts.push(format!("theorem point s = {s} is not a computed reducibility point"));
    }
    for s in found.difference(&theorem) {
        conflicts.push(format!("computed reducibility point s = {s} is not a theorem point"));
    }
    Ok(DpsReport {
        case: case.to_string(),
        family,
        period: series.period.clone(),
        points,
        reducibility_points,
        theorem_points: theorem.into_iter().collect(),
        undetermined,
        accounting_checked,
        conflicts,
    })
}
