//! JSON descriptions of base fields, étale algebras, composition algebras and their elements.

use serde_json::{json, Value};
use tcalg::fields::{quadratic_field, quadratic_split, CubicKind};
use tcalg::tca::{make_rank1, make_rank2, make_rank4, Rank4Model, Tca, TcaElem};
use tcalg::{BaseField, Elem, EtaleAlgebra, Scalar};

use crate::CliError;

pub fn base_field(q: Option<&str>) -> Result<BaseField, CliError> {
    match q {
        None => BaseField::finite(5).map_err(CliError::compute),
        Some("Q") | Some("q") | Some("0") => Ok(BaseField::Rationals),
        Some(s) => {
            let n: u32 = s.parse().map_err(|_| CliError::Usage(format!("bad field order {s:?}")))?;
            BaseField::finite(n).map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

fn field_str<'a>(params: &'a Value, key: &str, default: &'a str) -> Result<&'a str, CliError> {
    match params.get(key) {
        None => Ok(default),
        Some(Value::String(s)) => Ok(s),
        Some(v) => Err(CliError::Usage(format!("{key} must be a string, got {v}"))),
    }
}

/// E from `"split" | "f_times_k" | "field"`.
pub fn cubic(b: BaseField, kind: &str) -> Result<EtaleAlgebra, CliError> {
    let kind = match kind {
        "split" => CubicKind::Split,
        "f_times_k" | "FxK" => CubicKind::FTimesK,
        "field" => CubicKind::Field,
        other => return Err(CliError::Usage(format!("unknown cubic shape {other:?}"))),
    };
    if b.is_finite() {
        return EtaleAlgebra::finite_cubic(b, kind).map_err(CliError::compute);
    }
    // over Q: Q × Q(√-1) and Q(∛2)
    match kind {
        CubicKind::Split => Ok(EtaleAlgebra::split(b, 3)),
        CubicKind::FTimesK => EtaleAlgebra::f_times_k(b, b.int(-1)).map_err(CliError::compute),
        CubicKind::Field => {
            EtaleAlgebra::cubic_field(b, vec![b.int(-2), b.zero(), b.zero(), b.one()]).map_err(CliError::compute)
        }
    }
}

/// K from `"split" | "field"`.
pub fn quadratic(b: BaseField, kind: &str) -> Result<EtaleAlgebra, CliError> {
    match kind {
        "split" => Ok(quadratic_split(b)),
        "field" => {
            let d = b.nonsquare().unwrap_or_else(|| b.int(-1));
            quadratic_field(b, &d).map_err(CliError::compute)
        }
        other => Err(CliError::Usage(format!("unknown quadratic shape {other:?}"))),
    }
}

pub fn scalar(b: BaseField, v: &Value) -> Result<Scalar, CliError> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(CliError::Usage(format!("expected a scalar, got {other}"))),
    };
    b.parse(&s).map_err(|e| CliError::Usage(e.to_string()))
}

/// An element from a flat coordinate array.
pub fn elem(alg: &EtaleAlgebra, v: &Value) -> Result<Elem, CliError> {
    let items = v.as_array().ok_or_else(|| CliError::Usage(format!("expected an array, got {v}")))?;
    let b = alg.base();
    let c = items.iter().map(|x| scalar(b, x)).collect::<Result<Vec<_>, _>>()?;
    alg.from_flat(c).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn elem_json(x: &Elem) -> Value {
    json!(x.coords().iter().map(|s| x.parent().base().format(s)).collect::<Vec<_>>())
}

pub fn parse_json(s: &str) -> Result<Value, CliError> {
    serde_json::from_str(s).map_err(|e| CliError::Usage(format!("bad JSON: {e}")))
}

/// A composition algebra of the given rank from `{E, K, a, e, nu, lambda, model}`.
pub struct Built {
    pub tca: Tca,
    pub e: EtaleAlgebra,
}

pub fn build(b: BaseField, rank: u8, params: &Value) -> Result<Built, CliError> {
    let e = cubic(b, field_str(params, "E", "split")?)?;
    let get = |key: &str, alg: &EtaleAlgebra| -> Result<Elem, CliError> {
        match params.get(key) {
            Some(v) => elem(alg, v),
            None => Ok(alg.one()),
        }
    };
    match rank {
        1 => {
            let a = get("a", &e)?;
            Ok(Built { tca: make_rank1(&a).map_err(CliError::compute)?, e })
        }
        2 => {
            let k = quadratic(b, field_str(params, "K", "split")?)?;
            let ee = get("e", &e)?;
            let nu = get("nu", &k)?;
            let tca = make_rank2(&k, &ee, &nu).map_err(CliError::compute)?;
            Ok(Built { tca, e })
        }
        4 => {
            let model = match (field_str(params, "model", "split")?, params.get("lambda")) {
                (_, Some(l)) => Rank4Model::Cyclic(scalar(b, l)?),
                ("split", None) => Rank4Model::Split,
                ("twisted", None) => Rank4Model::Twisted,
                (m, None) => return Err(CliError::Usage(format!("unknown rank-4 model {m:?}"))),
            };
            Ok(Built { tca: make_rank4(&e, &model).map_err(CliError::compute)?, e })
        }
        r => Err(CliError::Usage(format!("rank must be 1, 2 or 4, not {r}"))),
    }
}

/// Flat coordinates, matching the input format of `tca_elem`.
pub fn tca_elem_json(x: &TcaElem) -> Value {
    match x {
        TcaElem::R1(a) => elem_json(a),
        TcaElem::R2(l) => json!([elem_json(&l.u), elem_json(&l.v)]),
        TcaElem::R4(m) => json!(m.iter().map(elem_json).collect::<Vec<_>>()),
    }
}

/// A C-element: a flat array for rank 1, `[u, v]` for rank 2.
pub fn tca_elem(c: &Tca, v: &Value) -> Result<TcaElem, CliError> {
    match c.rank() {
        1 => Ok(TcaElem::R1(elem(c.e(), v)?)),
        2 => {
            let parts = v
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| CliError::Usage("a rank-2 element is [u, v] with u, v in E".into()))?;
            let l = c.composite().expect("rank 2");
            Ok(TcaElem::R2(l.make(elem(c.e(), &parts[0])?, elem(c.e(), &parts[1])?)))
        }
        _ => Err(CliError::Usage("elements are accepted for ranks 1 and 2".into())),
    }
}
