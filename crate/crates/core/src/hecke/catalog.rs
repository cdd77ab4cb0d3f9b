//! The JSON module catalog: presentations, generator matrices, expected exponents
//! and reducibility fixtures.
//!
//! Scalars are strings ("3", "-1/3"). Matrix entries are expressions in `q`, `sq`
//! and `z` (see [`super::expr`]) resolved when q is specialized.

use std::collections::HashSet;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::affine::{AffineWeyl, Exponent, Lattice, Vect};
use super::expr;
use super::qz::{int, Mat, Q};
use super::{im_involute, HeckeModule, Presentation, Translation};
use crate::error::{HeckeError, SchemaError};

const BUILTIN: &str = include_str!("../../data/hecke_catalog.json");

/// Environment variable naming a catalog file to use instead of the built-in one.
pub const CATALOG_ENV: &str = "TCALG_HECKE_CATALOG";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Catalog {
    pub version: u32,
    pub cases: Vec<CaseSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub id: String,
    pub description: String,
    pub generators: Vec<String>,
    pub ell: Vec<u32>,
    pub braid: Vec<Vec<u32>>,
    pub braid_inferred: bool,
    pub ambient_dim: usize,
    pub plane_normals: Vec<Vec<String>>,
    pub simple_roots: Vec<Vec<String>>,
    pub affine_root: Vec<String>,
    pub affine_level: String,
    pub lattice: Vec<Vec<String>>,
    pub fundamental: Vec<Vec<String>>,
    pub translations: Vec<TranslationSpec>,
    pub bullet_coroots: Vec<Vec<String>>,
    /// Per simple root, the values v with s_i(μ) not equivalent to μ when μ(α_i^∨) ≡ ±v.
    pub bullet_blocks: Vec<Vec<SParamSpec>>,
    pub modules: Vec<ModuleSpec>,
    pub families: Vec<FamilySpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslationSpec {
    pub omega: Vec<String>,
    /// Generator indices separated by spaces.
    pub word: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub name: String,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im_of: Option<String>,
    pub exponents: Vec<ExponentSpec>,
    pub discrete_series: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentSpec {
    pub re: Vec<String>,
    pub tor: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub id: String,
    pub description: String,
    pub template: Vec<TemplateSpec>,
    pub theorem_points: Vec<SParamSpec>,
    pub fixtures: Vec<FixtureSpec>,
}

/// One exponent c + s·d of a degenerate principal series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateSpec {
    pub c: Vec<String>,
    pub d: Vec<String>,
}

/// s = re + (2πi/ln q)·tor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SParamSpec {
    pub re: String,
    pub tor: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// The constituents' exponents exactly partition the series.
    Partition,
    /// The constituents' exponents form a sub-multiset of the series.
    Contains,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSpec {
    pub s: SParamSpec,
    /// Absent when the reducibility is not known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reducible: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<Relation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constituents: Vec<String>,
}

/// Canonical module name: primes become `p`.
pub fn normalize_name(name: &str) -> String {
    name.replace("''", "pp")
        .replace('″', "pp")
        .replace(['\'', '′'], "p")
}

fn parse_q(s: &str, loc: &str) -> Result<Q, SchemaError> {
    Q::from_str(s.trim()).map_err(|_| SchemaError::new(loc, format!("not a rational number: {s:?}")))
}

fn parse_vec(v: &[String], dim: usize, loc: &str) -> Result<Vect, SchemaError> {
    if v.len() != dim {
        return Err(SchemaError::new(loc, format!("expected {dim} coordinates, found {}", v.len())));
    }
    v.iter()
        .enumerate()
        .map(|(i, s)| parse_q(s, &format!("{loc}/{i}")))
        .collect()
}

fn parse_vecs(vs: &[Vec<String>], dim: usize, loc: &str) -> Result<Vec<Vect>, SchemaError> {
    vs.iter()
        .enumerate()
        .map(|(i, v)| parse_vec(v, dim, &format!("{loc}/{i}")))
        .collect()
}

fn parse_word(w: &str, gens: usize, loc: &str) -> Result<Vec<usize>, SchemaError> {
    w.split_whitespace()
        .map(|t| match t.parse::<usize>() {
            Ok(i) if i < gens => Ok(i),
            _ => Err(SchemaError::new(loc, format!("bad generator index {t:?}"))),
        })
        .collect()
}

impl SParamSpec {
    pub fn parse(&self, loc: &str) -> Result<(Q, Q), SchemaError> {
        Ok((parse_q(&self.re, &format!("{loc}/re"))?, parse_q(&self.tor, &format!("{loc}/tor"))?))
    }
}

impl TemplateSpec {
    pub fn parse(&self, dim: usize, loc: &str) -> Result<(Vect, Vect), SchemaError> {
        Ok((parse_vec(&self.c, dim, &format!("{loc}/c"))?, parse_vec(&self.d, dim, &format!("{loc}/d"))?))
    }
}

impl Catalog {
    /// The catalog shipped with the library.
    pub fn builtin() -> Catalog {
        Catalog::from_json(BUILTIN).expect("built-in catalog is valid")
    }

    /// The catalog named by `TCALG_HECKE_CATALOG`, or the built-in one.
    pub fn from_env() -> Result<Catalog, SchemaError> {
        match std::env::var_os(CATALOG_ENV) {
            Some(p) => Catalog::load(Path::new(&p)),
            None => Ok(Catalog::builtin()),
        }
    }

    pub fn builtin_json() -> &'static str {
        BUILTIN
    }

    pub fn load(path: &Path) -> Result<Catalog, SchemaError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SchemaError::new(path.display().to_string(), e.to_string()))?;
        Catalog::from_json(&text)
    }

    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<Catalog, SchemaError> {
        let cat: Catalog = serde_json::from_str(text)
            .map_err(|e| SchemaError::new(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        cat.validate()?;
        Ok(cat)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes")
    }

    pub fn case(&self, id: &str) -> Result<&CaseSpec, HeckeError> {
        self.cases
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| HeckeError::Unknown { kind: "case", name: id.to_string() })
    }

    pub fn case_ids(&self) -> Vec<&str> {
        self.cases.iter().map(|c| c.id.as_str()).collect()
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        if self.version != 1 {
            return Err(SchemaError::new("/version", format!("unsupported version {}", self.version)));
        }
        let mut ids = HashSet::new();
        for (i, c) in self.cases.iter().enumerate() {
            let loc = format!("/cases/{i}");
            if !ids.insert(&c.id) {
                return Err(SchemaError::new(format!("{loc}/id"), format!("duplicate case {:?}", c.id)));
            }
            c.validate(&loc)?;
        }
        Ok(())
    }
}

impl CaseSpec {
    pub fn module_spec(&self, name: &str) -> Result<&ModuleSpec, HeckeError> {
        let n = normalize_name(name);
        self.modules
            .iter()
            .find(|m| m.name == n)
            .or_else(|| self.modules.iter().find(|m| m.name.eq_ignore_ascii_case(&n)))
            .ok_or_else(|| HeckeError::Unknown { kind: "module", name: name.to_string() })
    }

    pub fn family(&self, id: &str) -> Option<&FamilySpec> {
        self.families.iter().find(|f| f.id == id)
    }

    fn presentation_at(&self, loc: &str) -> Result<Presentation, SchemaError> {
        let r = self.generators.len();
        let dim = self.ambient_dim;
        if r < 2 {
            return Err(SchemaError::new(format!("{loc}/generators"), "need at least two generators"));
        }
        if self.ell.len() != r {
            return Err(SchemaError::new(format!("{loc}/ell"), format!("expected {r} entries")));
        }
        if let Some(i) = self.ell.iter().position(|&l| l == 0) {
            return Err(SchemaError::new(format!("{loc}/ell/{i}"), "parameter exponent must be positive"));
        }
        if self.braid.len() != r || self.braid.iter().any(|row| row.len() != r) {
            return Err(SchemaError::new(format!("{loc}/braid"), format!("expected a {r}×{r} matrix")));
        }
        for i in 0..r {
            for j in 0..r {
                let m = self.braid[i][j];
                let ok = if i == j { m == 1 } else { matches!(m, 2 | 3 | 4 | 6) && m == self.braid[j][i] };
                if !ok {
                    return Err(SchemaError::new(
                        format!("{loc}/braid/{i}/{j}"),
                        "braid orders must be symmetric, 1 on the diagonal and in {2, 3, 4, 6} elsewhere",
                    ));
                }
            }
        }
        let simple = parse_vecs(&self.simple_roots, dim, &format!("{loc}/simple_roots"))?;
        if simple.len() != r - 1 {
            return Err(SchemaError::new(format!("{loc}/simple_roots"), format!("expected {} roots", r - 1)));
        }
        let normals = parse_vecs(&self.plane_normals, dim, &format!("{loc}/plane_normals"))?;
        if simple.len() + normals.len() != dim {
            return Err(SchemaError::new(
                format!("{loc}/plane_normals"),
                "simple roots and plane normals must span the ambient space",
            ));
        }
        let a0 = parse_vec(&self.affine_root, dim, &format!("{loc}/affine_root"))?;
        let level = parse_q(&self.affine_level, &format!("{loc}/affine_level"))?;
        if level <= int(0) {
            return Err(SchemaError::new(format!("{loc}/affine_level"), "level must be positive"));
        }
        let mut rows = simple.clone();
        rows.extend(normals.iter().cloned());
        if super::affine::solve(rows, vec![int(0); dim]).is_none() {
            return Err(SchemaError::new(format!("{loc}/simple_roots"), "roots are linearly dependent"));
        }
        let mut roots = vec![a0];
        roots.extend(simple);
        let affine = AffineWeyl { roots, level, plane_normals: normals };
        let basis = parse_vecs(&self.lattice, dim, &format!("{loc}/lattice"))?;
        if basis.len() != r - 1 {
            return Err(SchemaError::new(format!("{loc}/lattice"), format!("expected {} basis vectors", r - 1)));
        }
        let lattice =
            Lattice::new(basis).ok_or_else(|| SchemaError::new(format!("{loc}/lattice"), "basis is degenerate"))?;
        let fundamental = parse_vecs(&self.fundamental, dim, &format!("{loc}/fundamental"))?;
        if fundamental.is_empty() {
            return Err(SchemaError::new(format!("{loc}/fundamental"), "no fundamental coweights"));
        }
        let mut translations = vec![];
        for (k, t) in self.translations.iter().enumerate() {
            let tl = format!("{loc}/translations/{k}");
            let omega = parse_vec(&t.omega, dim, &format!("{tl}/omega"))?;
            let word = parse_word(&t.word, r, &format!("{tl}/word"))?;
            if !affine.is_translation(&word, &omega) {
                return Err(SchemaError::new(format!("{tl}/word"), "word does not act as translation by omega"));
            }
            translations.push(Translation { omega, word });
        }
        for (k, b) in lattice.basis.iter().enumerate() {
            if !translations.iter().any(|t| &t.omega == b) {
                return Err(SchemaError::new(
                    format!("{loc}/lattice/{k}"),
                    "no translation word for this basis vector",
                ));
            }
        }
        let bullets = parse_vecs(&self.bullet_coroots, dim, &format!("{loc}/bullet_coroots"))?;
        if bullets.len() != r - 1 || self.bullet_blocks.len() != r - 1 {
            return Err(SchemaError::new(
                format!("{loc}/bullet_coroots"),
                "need one bullet coroot and one list of blocking values per simple root",
            ));
        }
        let blocks = self
            .bullet_blocks
            .iter()
            .enumerate()
            .map(|(k, vs)| {
                vs.iter()
                    .enumerate()
                    .map(|(j, v)| v.parse(&format!("{loc}/bullet_blocks/{k}/{j}")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Presentation::new(
            self.id.clone(),
            self.generators.clone(),
            self.ell.clone(),
            self.braid.clone(),
            self.braid_inferred,
            affine,
            lattice,
            fundamental,
            translations,
            bullets,
            blocks,
        ))
    }

    pub fn presentation(&self) -> Result<Arc<Presentation>, HeckeError> {
        Ok(Arc::new(self.presentation_at(&format!("case {}", self.id))?))
    }

    fn validate(&self, loc: &str) -> Result<(), SchemaError> {
        self.presentation_at(loc)?;
        let r = self.generators.len();
        let dim = self.ambient_dim;
        let sq = int(2);
        let mut names = HashSet::new();
        for (k, m) in self.modules.iter().enumerate() {
            let ml = format!("{loc}/modules/{k}");
            if !names.insert(m.name.as_str()) {
                return Err(SchemaError::new(format!("{ml}/name"), format!("duplicate module {:?}", m.name)));
            }
            let mdim = match (&m.matrices, &m.im_of) {
                (Some(ms), None) => {
                    if ms.len() != r {
                        return Err(SchemaError::new(format!("{ml}/matrices"), format!("expected {r} matrices")));
                    }
                    let d = ms[0].len();
                    for (g, mat) in ms.iter().enumerate() {
                        let gl = format!("{ml}/matrices/{g}");
                        if mat.len() != d || d == 0 {
                            return Err(SchemaError::new(gl, format!("expected {d} rows")));
                        }
                        for (i, row) in mat.iter().enumerate() {
                            if row.len() != d {
                                return Err(SchemaError::new(
                                    format!("{gl}/{i}"),
                                    format!("matrix is not square: row has {} entries, expected {d}", row.len()),
                                ));
                            }
                            for (j, e) in row.iter().enumerate() {
                                expr::eval(e, &sq).map_err(|msg| SchemaError::new(format!("{gl}/{i}/{j}"), msg))?;
                            }
                        }
                    }
                    d
                }
                (None, Some(src)) => {
                    let Some(s) = self.modules.iter().find(|o| &o.name == src) else {
                        return Err(SchemaError::new(format!("{ml}/im_of"), format!("unknown module {src:?}")));
                    };
                    match &s.matrices {
                        Some(ms) => ms[0].len(),
                        None => {
                            return Err(SchemaError::new(format!("{ml}/im_of"), "source must list its matrices"));
                        }
                    }
                }
                _ => {
                    return Err(SchemaError::new(ml, "exactly one of matrices and im_of is required"));
                }
            };
            if m.exponents.len() != mdim {
                return Err(SchemaError::new(
                    format!("{ml}/exponents"),
                    format!("expected {mdim} exponents, found {}", m.exponents.len()),
                ));
            }
            for (e, x) in m.exponents.iter().enumerate() {
                parse_vec(&x.re, dim, &format!("{ml}/exponents/{e}/re"))?;
                parse_vec(&x.tor, dim, &format!("{ml}/exponents/{e}/tor"))?;
            }
        }
        let mut fams = HashSet::new();
        for (k, f) in self.families.iter().enumerate() {
            let fl = format!("{loc}/families/{k}");
            if !fams.insert(f.id.as_str()) {
                return Err(SchemaError::new(format!("{fl}/id"), format!("duplicate family {:?}", f.id)));
            }
            if f.template.is_empty() {
                return Err(SchemaError::new(format!("{fl}/template"), "empty template"));
            }
            for (t, tp) in f.template.iter().enumerate() {
                tp.parse(dim, &format!("{fl}/template/{t}"))?;
            }
            for (t, s) in f.theorem_points.iter().enumerate() {
                s.parse(&format!("{fl}/theorem_points/{t}"))?;
            }
            for (t, x) in f.fixtures.iter().enumerate() {
                let xl = format!("{fl}/fixtures/{t}");
                x.s.parse(&format!("{xl}/s"))?;
                if x.relation.is_some() == x.constituents.is_empty() {
                    return Err(SchemaError::new(xl, "relation and constituents go together"));
                }
                for (c, name) in x.constituents.iter().enumerate() {
                    if !names.contains(name.as_str()) {
                        return Err(SchemaError::new(
                            format!("{xl}/constituents/{c}"),
                            format!("unknown module {name:?}"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Expected exponents of a module, reduced.
    pub fn expected_exponents(&self, name: &str) -> Result<Vec<Exponent>, HeckeError> {
        let pres = self.presentation()?;
        self.expected_exponents_in(&pres, name)
    }

    pub fn expected_exponents_in(&self, pres: &Presentation, name: &str) -> Result<Vec<Exponent>, HeckeError> {
        let m = self.module_spec(name)?;
        let dim = self.ambient_dim;
        let mut out = m
            .exponents
            .iter()
            .map(|x| {
                Ok(Exponent::new(
                    parse_vec(&x.re, dim, "exponent")?,
                    parse_vec(&x.tor, dim, "exponent")?,
                    &pres.lattice,
                ))
            })
            .collect::<Result<Vec<_>, SchemaError>>()?;
        out.sort();
        Ok(out)
    }

    /// The module at q = sq², with shared presentation.
    pub fn module_in(&self, pres: &Arc<Presentation>, name: &str, sq: &Q) -> Result<HeckeModule, HeckeError> {
        let spec = self.module_spec(name)?;
        if let Some(src) = &spec.im_of {
            let mut m = im_involute(&self.module_in(pres, src, sq)?);
            m.name = spec.name.clone();
            return Ok(m);
        }
        let ms = spec.matrices.as_ref().expect("validated");
        let matrices = ms
            .iter()
            .enumerate()
            .map(|(g, rows)| {
                let rows = rows
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(j, e)| {
                                expr::eval(e, sq).map_err(|msg| {
                                    SchemaError::new(format!("module {}/matrices/{g}/{i}/{j}", spec.name), msg)
                                })
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Mat::from_rows(rows))
            })
            .collect::<Result<Vec<_>, HeckeError>>()?;
        Ok(HeckeModule { presentation: pres.clone(), name: spec.name.clone(), sq: sq.clone(), matrices })
    }

    pub fn module(&self, name: &str, sq: &Q) -> Result<HeckeModule, HeckeError> {
        self.module_in(&self.presentation()?, name, sq)
    }

    /// All modules of the case at one specialization.
    pub fn modules_at(&self, sq: &Q) -> Result<Vec<HeckeModule>, HeckeError> {
        let pres = self.presentation()?;
        self.modules.iter().map(|m| self.module_in(&pres, &m.name, sq)).collect()
    }
}
