//! Component groups, Arthur multiplicities and Brauer-group counts.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::ArthurError;

/// a + bζ with ζ a primitive cube root of unity (ζ² = -1 - ζ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Cyc3 {
    pub a: i64,
    pub b: i64,
}

impl Cyc3 {
    pub const ZERO: Cyc3 = Cyc3 { a: 0, b: 0 };
    pub const ONE: Cyc3 = Cyc3 { a: 1, b: 0 };
    pub const ZETA: Cyc3 = Cyc3 { a: 0, b: 1 };

    pub fn int(a: i64) -> Self {
        Cyc3 { a, b: 0 }
    }

    pub fn conj(self) -> Self {
        // ζ ↦ ζ² = -1 - ζ
        Cyc3 {
            a: self.a - self.b,
            b: -self.b,
        }
    }

    pub fn pow(self, mut e: u32) -> Self {
        let mut r = Cyc3::ONE;
        let mut x = self;
        while e > 0 {
            if e & 1 == 1 {
                r = r * x;
            }
            x = x * x;
            e >>= 1;
        }
        r
    }
}

impl Add for Cyc3 {
    type Output = Cyc3;
    fn add(self, o: Cyc3) -> Cyc3 {
        Cyc3 {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
}

impl Mul for Cyc3 {
    type Output = Cyc3;
    fn mul(self, o: Cyc3) -> Cyc3 {
        // (a + bζ)(c + dζ) = ac - bd + (ad + bc - bd)ζ
        Cyc3 {
            a: self.a * o.a - self.b * o.b,
            b: self.a * o.b + self.b * o.a - self.b * o.b,
        }
    }
}

impl fmt::Display for Cyc3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{b}ζ"),
            (a, b) => write!(f, "{a}{b:+}ζ"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupId {
    #[serde(rename = "1")]
    Trivial,
    #[serde(rename = "mu2")]
    Mu2,
    #[serde(rename = "mu3")]
    Mu3,
    #[serde(rename = "S2")]
    S2,
    #[serde(rename = "S3")]
    S3,
    #[serde(rename = "mu2xS2")]
    Mu2S2,
    #[serde(rename = "mu2^2")]
    Mu2Sq,
    #[serde(rename = "mu2^2xS2")]
    Mu2SqS2,
}

impl GroupId {
    pub fn name(self) -> &'static str {
        match self {
            GroupId::Trivial => "1",
            GroupId::Mu2 => "mu2",
            GroupId::Mu3 => "mu3",
            GroupId::S2 => "S2",
            GroupId::S3 => "S3",
            GroupId::Mu2S2 => "mu2xS2",
            GroupId::Mu2Sq => "mu2^2",
            GroupId::Mu2SqS2 => "mu2^2xS2",
        }
    }
}

/// A finite group given by its multiplication table and irreducible characters.
#[derive(Clone, Debug)]
pub struct ComponentGroup {
    pub id: GroupId,
    /// mul[i][j] = index of g_i g_j; element 0 is the identity.
    pub mul: Vec<Vec<usize>>,
    pub labels: Vec<String>,
    /// (name, values on elements).
    pub characters: Vec<(String, Vec<Cyc3>)>,
}

fn cyclic(n: usize, gen: &str) -> ComponentGroup {
    let mul = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
    let labels = (0..n)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => gen.to_string(),
            k => format!("{gen}^{k}"),
        })
        .collect();
    let characters = (0..n)
        .map(|k| {
            let vals = (0..n)
                .map(|i| match n {
                    1 => Cyc3::ONE,
                    2 => Cyc3::int(if (i * k) % 2 == 0 { 1 } else { -1 }),
                    3 => Cyc3::ZETA.pow(((i * k) % 3) as u32),
                    _ => unreachable!("catalog uses orders 1-3"),
                })
                .collect();
            let name = match (n, k) {
                (_, 0) => "1".to_string(),
                (2, _) => "sgn".to_string(),
                (3, k) => format!("chi{k}"),
                _ => unreachable!(),
            };
            (name, vals)
        })
        .collect();
    ComponentGroup {
        id: GroupId::Trivial,
        mul,
        labels,
        characters,
    }
}

fn symmetric3() -> ComponentGroup {
    let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]];
    let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("closed");
    let mul = perms
        .iter()
        .map(|p| perms.iter().map(|q| idx([p[q[0]], p[q[1]], p[q[2]]])).collect())
        .collect();
    let labels = ["1", "c", "c^2", "(01)", "(12)", "(02)"].map(String::from).to_vec();
    let sgn = |i: usize| if i < 3 { 1 } else { -1 };
    let r = |i: usize| match i {
        0 => 2,
        1 | 2 => -1,
        _ => 0,
    };
    let characters = vec![
        ("1".to_string(), vec![Cyc3::ONE; 6]),
        ("eps".to_string(), (0..6).map(|i| Cyc3::int(sgn(i))).collect()),
        ("r".to_string(), (0..6).map(|i| Cyc3::int(r(i))).collect()),
    ];
    ComponentGroup {
        id: GroupId::S3,
        mul,
        labels,
        characters,
    }
}

fn product(g: &ComponentGroup, h: &ComponentGroup) -> ComponentGroup {
    let (n, m) = (g.order(), h.order());
    let mul = (0..n * m)
        .map(|x| {
            (0..n * m)
                .map(|y| g.mul[x / m][y / m] * m + h.mul[x % m][y % m])
                .collect()
        })
        .collect();
    let labels = (0..n * m)
        .map(|x| format!("({},{})", g.labels[x / m], h.labels[x % m]))
        .collect();
    let mut characters = vec![];
    for (a, va) in &g.characters {
        for (b, vb) in &h.characters {
            let vals = (0..n * m).map(|x| va[x / m] * vb[x % m]).collect();
            characters.push((format!("{a}⊗{b}"), vals));
        }
    }
    ComponentGroup {
        id: GroupId::Trivial,
        mul,
        labels,
        characters,
    }
}

impl ComponentGroup {
    pub fn catalog(id: GroupId) -> ComponentGroup {
        let mut g = match id {
            GroupId::Trivial => cyclic(1, "e"),
            GroupId::Mu2 => cyclic(2, "-1"),
            GroupId::Mu3 => cyclic(3, "z"),
            GroupId::S2 => cyclic(2, "s"),
            GroupId::S3 => symmetric3(),
            GroupId::Mu2S2 => product(&cyclic(2, "-1"), &cyclic(2, "s")),
            GroupId::Mu2Sq => product(&cyclic(2, "a"), &cyclic(2, "b")),
            GroupId::Mu2SqS2 => product(&product(&cyclic(2, "a"), &cyclic(2, "b")), &cyclic(2, "s")),
        };
        g.id = id;
        g
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn inverse(&self, i: usize) -> usize {
        (0..self.order()).find(|&j| self.mul[i][j] == 0).expect("group")
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut out = vec![];
        for x in 0..n {
            if seen[x] {
                continue;
            }
            let mut cls: Vec<usize> = (0..n).map(|g| self.mul[self.mul[g][x]][self.inverse(g)]).collect();
            cls.sort_unstable();
            cls.dedup();
            for &y in &cls {
                seen[y] = true;
            }
            out.push(cls);
        }
        out
    }

    pub fn character(&self, name: &str) -> Option<&[Cyc3]> {
        self.characters.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// |G|·⟨χ, ψ⟩ = Σ_g χ(g) ψ(g)̄.
    pub fn inner(&self, chi: &[Cyc3], psi: &[Cyc3]) -> Cyc3 {
        chi.iter().zip(psi).fold(Cyc3::ZERO, |acc, (x, y)| acc + *x * y.conj())
    }

    pub fn is_class_function(&self, f: &[Cyc3]) -> bool {
        f.len() == self.order()
            && self
                .conjugacy_classes()
                .iter()
                .all(|c| c.iter().all(|&x| f[x] == f[c[0]]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EType {
    Field,
    #[serde(rename = "F_x_KE")]
    FTimesKE,
    Split,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KType {
    Field,
    Split,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiOrder {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    Large,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceDatum {
    pub e_type: EType,
    pub k_type: KType,
    #[serde(default)]
    pub k_equals_ke: bool,
    pub chi_order: ChiOrder,
}

impl PlaceDatum {
    pub fn new(e_type: EType, k_type: KType, k_equals_ke: bool, chi_order: ChiOrder) -> Result<Self, ArthurError> {
        let d = PlaceDatum {
            e_type,
            k_type,
            k_equals_ke,
            chi_order,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), ArthurError> {
        if self.k_equals_ke && (self.e_type != EType::FTimesKE || self.k_type != KType::Field) {
            return Err(ArthurError::CaseMismatch(
                "K = K_E only makes sense for E = F × K_E with K a field".into(),
            ));
        }
        Ok(())
    }
}

/// π₀(S^{W_{F_v}}), depending only on (E_v, K_v).
pub fn identity_component_group(p: &PlaceDatum) -> GroupId {
    match (p.e_type, p.k_type) {
        (EType::Field, KType::Field) => GroupId::Trivial,
        (EType::Field, KType::Split) => GroupId::Mu3,
        (EType::FTimesKE, KType::Split) => GroupId::Trivial,
        (EType::FTimesKE, KType::Field) if p.k_equals_ke => GroupId::Trivial,
        (EType::FTimesKE, KType::Field) => GroupId::Mu2,
        (EType::Split, KType::Field) => GroupId::Mu2Sq,
        (EType::Split, KType::Split) => GroupId::Trivial,
    }
}

/// S_{ψ_v}: the extension of π₀(S^{W_{F_v}}) by S₂ when χ_v² = 1, else π₀ alone.
pub fn local_component_group(p: &PlaceDatum) -> Result<ComponentGroup, ArthurError> {
    p.validate()?;
    let s0 = identity_component_group(p);
    let id = match p.chi_order {
        ChiOrder::Large => s0,
        ChiOrder::One | ChiOrder::Two => match s0 {
            GroupId::Trivial => GroupId::S2,
            GroupId::Mu3 => GroupId::S3,
            GroupId::Mu2 => GroupId::Mu2S2,
            GroupId::Mu2Sq => GroupId::Mu2SqS2,
            other => other,
        },
    };
    Ok(ComponentGroup::catalog(id))
}

/// dim Hom_G(⊗ χ_i, 1) by a character sum.
pub fn multiplicity_bruteforce(group: &ComponentGroup, local_chars: &[Vec<Cyc3>]) -> Result<u64, ArthurError> {
    for (i, c) in local_chars.iter().enumerate() {
        if !group.is_class_function(c) {
            return Err(ArthurError::NotAClassFunction(format!(
                "local character {i} on {}",
                group.id.name()
            )));
        }
    }
    let n = group.order();
    let mut sum = Cyc3::ZERO;
    for g in 0..n {
        sum = sum + local_chars.iter().fold(Cyc3::ONE, |acc, c| acc * c[g]);
    }
    if sum.b != 0 || sum.a < 0 || sum.a % n as i64 != 0 {
        return Err(ArthurError::NotAClassFunction(format!(
            "character sum {sum} is not a nonnegative multiple of {n}"
        )));
    }
    Ok((sum.a / n as i64) as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultCase {
    /// K a field, χ² ≠ 1: S_ψ = 1.
    KFieldChiGeneric,
    /// K a field, χ² = 1: S_ψ = S₂.
    KFieldChiQuadratic,
    /// K split, χ² ≠ 1: S_ψ = μ₃.
    KSplitChiGeneric,
    /// K split, χ² = 1: S_ψ = S₃.
    KSplitChiQuadratic,
}

impl MultCase {
    pub const ALL: [MultCase; 4] = [
        MultCase::KFieldChiGeneric,
        MultCase::KFieldChiQuadratic,
        MultCase::KSplitChiGeneric,
        MultCase::KSplitChiQuadratic,
    ];

    pub fn global_group(self) -> GroupId {
        match self {
            MultCase::KFieldChiGeneric => GroupId::Trivial,
            MultCase::KFieldChiQuadratic => GroupId::S2,
            MultCase::KSplitChiGeneric => GroupId::Mu3,
            MultCase::KSplitChiQuadratic => GroupId::S3,
        }
    }
}

/// Sizes of the place sets attached to η. `a` = #S'_η, `b1`/`b2` = #S''_{η,1}/#S''_{η,2},
/// `s` = #S_η, `b` = number of places where η_v is nontrivial on S_ψ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalMultiplicityInput {
    pub case: Option<MultCase>,
    #[serde(default)]
    pub a: u32,
    #[serde(default)]
    pub b1: u32,
    #[serde(default)]
    pub b2: u32,
    #[serde(default)]
    pub s: u32,
    #[serde(default)]
    pub b: u32,
}

impl GlobalMultiplicityInput {
    pub fn new(case: MultCase) -> Self {
        GlobalMultiplicityInput {
            case: Some(case),
            ..Default::default()
        }
    }

    fn checked(&self) -> Result<MultCase, ArthurError> {
        let case = self
            .case
            .ok_or_else(|| ArthurError::CaseMismatch("no case given".into()))?;
        let bad = match case {
            MultCase::KFieldChiGeneric | MultCase::KSplitChiGeneric => self.s != 0 || self.b != 0,
            MultCase::KFieldChiQuadratic | MultCase::KSplitChiQuadratic => {
                self.a != 0 || self.b1 != 0 || self.b2 != 0
            }
        };
        if bad {
            return Err(ArthurError::CaseMismatch(format!(
                "{case:?} uses {}",
                match case {
                    MultCase::KFieldChiGeneric | MultCase::KSplitChiGeneric => "a, b1, b2",
                    _ => "s, b",
                }
            )));
        }
        Ok(case)
    }

    /// The global group S_ψ and the restrictions η_v|_{S_ψ} of the nontrivial local factors.
    pub fn restricted_characters(&self) -> Result<(ComponentGroup, Vec<Vec<Cyc3>>), ArthurError> {
        let case = self.checked()?;
        let g = ComponentGroup::catalog(case.global_group());
        let mut chars = vec![];
        let rep = |c: Vec<Cyc3>, k: u32, out: &mut Vec<Vec<Cyc3>>| out.extend(std::iter::repeat(c).take(k as usize));
        match case {
            MultCase::KFieldChiGeneric => {
                rep(vec![Cyc3::int(2)], self.a, &mut chars);
                rep(vec![Cyc3::ONE], self.b1 + self.b2, &mut chars);
            }
            MultCase::KFieldChiQuadratic => {
                // r restricted to S₂ is 1 + sgn
                rep(vec![Cyc3::int(2), Cyc3::ZERO], self.s, &mut chars);
                rep(g.character("sgn").expect("S2").to_vec(), self.b, &mut chars);
            }
            MultCase::KSplitChiGeneric => {
                let c1 = g.character("chi1").expect("mu3").to_vec();
                let c2 = g.character("chi2").expect("mu3").to_vec();
                let sum: Vec<Cyc3> = c1.iter().zip(&c2).map(|(x, y)| *x + *y).collect();
                rep(sum, self.a, &mut chars);
                rep(c1, self.b1, &mut chars);
                rep(c2, self.b2, &mut chars);
            }
            MultCase::KSplitChiQuadratic => {
                rep(g.character("r").expect("S3").to_vec(), self.s, &mut chars);
                rep(g.character("eps").expect("S3").to_vec(), self.b, &mut chars);
            }
        }
        Ok((g, chars))
    }
}

fn pow2(n: u32) -> i64 {
    1i64 << n
}

fn sign(n: u32) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn multiplicity_closed_form(input: &GlobalMultiplicityInput) -> Result<u64, ArthurError> {
    let case = input.checked()?;
    let m = match case {
        MultCase::KFieldChiGeneric => pow2(input.a),
        MultCase::KFieldChiQuadratic => {
            if input.s > 0 {
                pow2(input.s - 1)
            } else {
                (1 + sign(input.b)) / 2
            }
        }
        MultCase::KSplitChiGeneric => {
            let a = input.a;
            if (input.b1 as i64 - input.b2 as i64).rem_euclid(3) == 0 {
                (pow2(a) + 2 * sign(a)) / 3
            } else {
                (pow2(a) - sign(a)) / 3
            }
        }
        MultCase::KSplitChiQuadratic => {
            if input.s > 0 {
                (pow2(input.s) + 2 * sign(input.s)) / 6
            } else {
                (1 + sign(input.b)) / 2
            }
        }
    };
    Ok(m as u64)
}

pub fn multiplicity_from_input(input: &GlobalMultiplicityInput) -> Result<u64, ArthurError> {
    let (g, chars) = input.restricted_characters()?;
    multiplicity_bruteforce(&g, &chars)
}

/// Degree-3 central simple algebras ramified exactly at n places:
/// (2ⁿ + 2(-1)ⁿ)/3.
pub fn count_csa(n: u32) -> u64 {
    ((pow2(n) + 2 * sign(n)) / 3) as u64
}

/// #{v ∈ {1,2}ⁿ : Σ vᵢ ≡ 0 (mod 3)}: local invariants 1/3 or 2/3 summing to 0.
pub fn count_csa_bruteforce(n: u32) -> u64 {
    (0u64..1 << n)
        .filter(|mask| {
            let s: u32 = (0..n).map(|i| if mask >> i & 1 == 1 { 2 } else { 1 }).sum();
            s % 3 == 0
        })
        .count() as u64
}

/// Size of a fiber of the localisation map on isomorphism classes.
pub fn loc_fiber_size(k_split: bool, n: u32) -> u64 {
    if n == 0 {
        return 1;
    }
    if k_split {
        ((pow2(n) + 2 * sign(n)) / 6) as u64
    } else {
        pow2(n - 1) as u64
    }
}

/// Invariant vectors in {1,2}ⁿ (subject to Σ ≡ 0 mod 3 when K is split),
/// counted up to v ↦ -v.
pub fn loc_fiber_bruteforce(k_split: bool, n: u32) -> u64 {
    let mut seen = std::collections::HashSet::new();
    let mut orbits = 0;
    for mask in 0u64..1 << n {
        let s: u32 = (0..n).map(|i| if mask >> i & 1 == 1 { 2 } else { 1 }).sum();
        if k_split && s % 3 != 0 {
            continue;
        }
        if seen.contains(&mask) {
            continue;
        }
        let neg = !mask & ((1u64 << n) - 1);
        seen.insert(mask);
        seen.insert(neg);
        orbits += 1;
    }
    orbits
}

/// Multiplicity of the trivial character of S₃ in r^{⊗nr} ⊗ ε^{⊗ne}.
pub fn example_packet_multiplicity(nr: u32, ne: u32) -> u64 {
    let g = ComponentGroup::catalog(GroupId::S3);
    let mut chars = vec![g.character("r").expect("S3").to_vec(); nr as usize];
    chars.extend(std::iter::repeat(g.character("eps").expect("S3").to_vec()).take(ne as usize));
    multiplicity_bruteforce(&g, &chars).expect("characters of S3")
}
