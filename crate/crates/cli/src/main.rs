mod algebra;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use tcalg::arthur::{
    count_csa, count_csa_bruteforce, local_component_group, loc_fiber_bruteforce, loc_fiber_size,
    multiplicity_closed_form, multiplicity_from_input, GlobalMultiplicityInput, MultCase, PlaceDatum,
};
use tcalg::cubes::{algebra_of_reduced, degenerate_rank, omega_set, reduce, Cube};
use tcalg::fields::discriminant_class;
use tcalg::hecke::catalog::CATALOG_ENV;
use tcalg::hecke::dps::Family;
use tcalg::hecke::qz::{rat, Q};
use tcalg::hecke::{
    dps_exponent_list, dps_reducibility, exponents, im_involute, is_discrete_series, sqrt_q, verify_relations,
    Catalog, Exponent, HeckeModule, SParam,
};
use tcalg::jordan::{springer_fixture_check, JElem, Springer};
use tcalg::selftest::{self, CRITERIA};
use tcalg::tca::{aut_group, iso_test, torus, x_set, IsoMode};
use tcalg::BaseField;

use algebra::{base_field, build, elem, elem_json, parse_json, scalar, tca_elem, tca_elem_json};

const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn compute(e: impl std::fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "tcalg", version, about = "Exact twisted composition, Jordan, cube, multiplicity and Hecke computations")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Search bound for witness searches over Q.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    bound: u32,
    /// Field order (algebra commands) or list of q values (hecke), comma separated; `Q` for the rationals.
    #[arg(long, global = true, value_delimiter = ',')]
    q: Vec<String>,
    /// Hecke catalog file.
    #[arg(long, global = true, env = CATALOG_ENV)]
    catalog: Option<std::path::PathBuf>,
    /// Print a JSON run report instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Étale cubic algebras and their elements.
    #[command(subcommand)]
    Fields(FieldsCmd),
    /// Twisted composition algebras.
    #[command(subcommand)]
    Tca(TcaCmd),
    /// The Springer algebra J = E ⊕ C.
    #[command(subcommand)]
    Jordan(JordanCmd),
    /// Twisted Bhargava cubes.
    #[command(subcommand)]
    Cube(CubeCmd),
    /// Component groups, multiplicities and counts.
    #[command(subcommand)]
    Arthur(ArthurCmd),
    /// Affine Hecke modules from the catalog.
    #[command(subcommand)]
    Hecke(HeckeCmd),
    /// Degenerate principal series.
    #[command(subcommand)]
    Dps(DpsCmd),
    /// Runs the acceptance suites.
    Selftest {
        /// Only these criteria (1-10).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Subcommand, Debug)]
enum FieldsCmd {
    /// Describes E and its discriminant algebra K_E.
    Describe {
        #[arg(long, default_value = "split")]
        e: String,
    },
    /// Trace, norm and adjoint of an element.
    Elem {
        #[arg(long, default_value = "split")]
        e: String,
        /// Coordinates as a JSON array.
        #[arg(long)]
        x: String,
    },
}

#[derive(Args, Debug)]
struct AlgebraArgs {
    #[arg(long, default_value_t = 2)]
    rank: u8,
    /// JSON object with keys E, K, a, e, nu, lambda, model.
    #[arg(long, default_value = "{}")]
    params: String,
}

#[derive(Subcommand, Debug)]
enum TcaCmd {
    /// Builds an algebra and evaluates Q, β and N_C at its base point.
    Make(AlgebraArgs),
    /// Checks the composition axioms on random algebras of every shape.
    Check {
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Decides whether two rank-2 algebras are isomorphic.
    Iso {
        #[command(flatten)]
        first: AlgebraArgs,
        #[arg(long)]
        other: String,
    },
    /// The set X_{a,C} and the torus T_{E,K_C}.
    Xset {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long)]
        a: String,
    },
    /// The automorphism group over a finite field.
    Aut(AlgebraArgs),
}

#[derive(Args, Debug)]
struct JordanArgs {
    #[command(flatten)]
    alg: AlgebraArgs,
    /// {"a": [...], "x": ...}
    #[arg(long)]
    elem: String,
}

#[derive(Subcommand, Debug)]
enum JordanCmd {
    Sharp(JordanArgs),
    Norm(JordanArgs),
    Rank(JordanArgs),
    /// The M₃ fixture with E = F³.
    Fixture {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Args, Debug)]
struct CubeArgs {
    #[arg(long, default_value = "split")]
    e: String,
    /// (a, e1, e2, e3, f1, f2, f3, b) as a JSON array.
    #[arg(long)]
    cube: String,
}

#[derive(Subcommand, Debug)]
enum CubeCmd {
    /// Reduces a rank-2 algebra to a cube (1, 0, -Q(v), -N_C(v)).
    Reduce(AlgebraArgs),
    /// The algebra of a nondegenerate reduced cube.
    Algebra(CubeArgs),
    /// Rank and normal form of a cube.
    Rank(CubeArgs),
    /// The set Ω_{C,f,b}.
    Omega {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long)]
        f: String,
        #[arg(long)]
        b: String,
    },
    /// Applies [[p, q], [r, s]] ∈ GL₂(E)^det.
    Act {
        #[command(flatten)]
        cube: CubeArgs,
        /// {"p": [...], "q": [...], "r": [...], "s": [...]}
        #[arg(long)]
        g: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KArg {
    Field,
    Split,
}

#[derive(Subcommand, Debug)]
enum ArthurCmd {
    /// Local component group of a place datum.
    Local {
        /// {"e_type", "k_type", "k_equals_ke", "chi_order"}
        #[arg(long)]
        place: String,
    },
    /// Global multiplicity by closed form and by character sum.
    Mult {
        #[arg(long)]
        case: String,
        /// a,b1,b2 for generic χ or s,b for quadratic χ.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<u32>,
    },
    /// Degree-3 central simple algebras with n ramified places.
    CountCsa { n: u32 },
    /// Fiber size of the localisation map.
    Fiber {
        #[arg(long, value_enum)]
        k: KArg,
        n: u32,
    },
}

#[derive(Args, Debug)]
struct HeckeArgs {
    #[arg(long, default_value = "G2-unram")]
    case: String,
    /// A module name; all modules of the case when omitted.
    #[arg(long)]
    module: Option<String>,
}

#[derive(Subcommand, Debug)]
enum HeckeCmd {
    Verify(HeckeArgs),
    Exponents(HeckeArgs),
    Im(HeckeArgs),
    Ds(HeckeArgs),
}

#[derive(Args, Debug)]
struct DpsArgs {
    #[arg(long, default_value = "I")]
    family: String,
    #[arg(long, default_value = "G2-unram")]
    case: String,
}

#[derive(Subcommand, Debug)]
enum DpsCmd {
    /// Exponents of the series at s = re + tor·2πi/ln q.
    List {
        #[command(flatten)]
        which: DpsArgs,
        #[arg(long, default_value = "1/2")]
        s: String,
        #[arg(long, default_value = "0")]
        tor: String,
    },
    /// Reducibility points compared with the stored theorem lists.
    Analyze(DpsArgs),
}

struct Outcome {
    result: Value,
    text: Vec<String>,
    pass: u64,
    fail: u64,
}

impl Outcome {
    fn ok(result: Value, text: Vec<String>) -> Self {
        Outcome { result, text, pass: 1, fail: 0 }
    }
}

fn first_q(cli: &Cli) -> Option<&str> {
    cli.q.first().map(|s| s.as_str())
}

fn catalog(cli: &Cli) -> Result<Catalog, CliError> {
    match &cli.catalog {
        Some(p) => Catalog::load(p).map_err(CliError::compute),
        None => Ok(Catalog::builtin()),
    }
}

fn parse_q(s: &str) -> Result<Q, CliError> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: i64 = n.trim().parse().map_err(|_| CliError::Usage(format!("bad rational {s:?}")))?;
    let d: i64 = d.trim().parse().map_err(|_| CliError::Usage(format!("bad rational {s:?}")))?;
    if d == 0 {
        return Err(CliError::Usage(format!("bad rational {s:?}")));
    }
    Ok(rat(n, d))
}

fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn exps_json(e: &[Exponent]) -> Value {
    json!(e
        .iter()
        .map(|x| json!({"re": x.re.iter().map(fmt_q).collect::<Vec<_>>(), "tor": x.tor.iter().map(fmt_q).collect::<Vec<_>>()}))
        .collect::<Vec<_>>())
}

fn exps_text(e: &[Exponent]) -> String {
    format!("[{}]", e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

fn hecke_sqs(cli: &Cli) -> Result<Vec<Q>, CliError> {
    let qs = if cli.q.is_empty() { vec!["4".to_string(), "9".to_string()] } else { cli.q.clone() };
    qs.iter()
        .map(|s| {
            let q = parse_q(s)?;
            sqrt_q(&q).ok_or_else(|| CliError::Usage(format!("q = {s} must be a rational square above 1")))
        })
        .collect()
}

fn modules(cli: &Cli, cat: &Catalog, args: &HeckeArgs, sq: &Q) -> Result<Vec<HeckeModule>, CliError> {
    let case = cat.case(&args.case).map_err(|e| CliError::Usage(e.to_string()))?;
    match &args.module {
        Some(m) => Ok(vec![case.module(m, sq).map_err(|e| CliError::Usage(e.to_string()))?]),
        None => {
            let _ = cli;
            case.modules_at(sq).map_err(CliError::compute)
        }
    }
}

fn run_fields(cli: &Cli, cmd: &FieldsCmd) -> Result<Outcome, CliError> {
    let b = base_field(first_q(cli))?;
    match cmd {
        FieldsCmd::Describe { e } => {
            let alg = algebra::cubic(b, e)?;
            let ke = discriminant_class(&alg).map_err(CliError::compute)?;
            let desc = serde_json::to_value(alg.desc()).map_err(CliError::compute)?;
            let kd = serde_json::to_value(ke.desc()).map_err(CliError::compute)?;
            let text = vec![format!("E = {desc}"), format!("K_E = {kd}")];
            Ok(Outcome::ok(json!({"E": desc, "K_E": kd, "is_field": alg.is_field()}), text))
        }
        FieldsCmd::Elem { e, x } => {
            let alg = algebra::cubic(b, e)?;
            let x = elem(&alg, &parse_json(x)?)?;
            let sharp = x.sharp().map_err(CliError::compute)?;
            let (t, n) = (b.format(&x.trace()), b.format(&x.norm()));
            let text = vec![format!("trace {t}"), format!("norm {n}"), format!("sharp {}", elem_json(&sharp))];
            Ok(Outcome::ok(json!({"trace": t, "norm": n, "s2": b.format(&x.s2()), "sharp": elem_json(&sharp)}), text))
        }
    }
}

fn run_tca(cli: &Cli, cmd: &TcaCmd) -> Result<Outcome, CliError> {
    let b = base_field(first_q(cli))?;
    let mk = |a: &AlgebraArgs| build(b, a.rank, &parse_json(&a.params)?);
    match cmd {
        TcaCmd::Make(a) => {
            let c = mk(a)?.tca;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let x = c.base_point().unwrap_or_else(|| c.random(&mut rng));
            let beta = c.beta(&x);
            let q = c.q(&x);
            let n = c.nc(&x).map_err(CliError::compute)?;
            let result = json!({
                "result": {"rank": c.rank(), "x": tca_elem_json(&x), "Q": elem_json(&q), "beta": tca_elem_json(&beta), "N_C": b.format(&n)}
            });
            let text = vec![format!("rank {} algebra", c.rank()), format!("x = {}", tca_elem_json(&x)), format!("Q(x) = {}", elem_json(&q)), format!("N_C(x) = {}", b.format(&n))];
            Ok(Outcome::ok(result, text))
        }
        TcaCmd::Check { samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let (mut pass, mut fail) = (0, 0);
            let mut failures = vec![];
            for (e, k) in selftest::rank2_shapes(b) {
                for _ in 0..*samples {
                    let c = selftest::random_rank2(&e, &k, &mut rng);
                    let x = c.random(&mut rng);
                    let y = e.random(&mut rng);
                    match c.check_axioms(&y, &x) {
                        Ok(()) => pass += 1,
                        Err(err) => {
                            fail += 1;
                            failures.push(err.to_string());
                        }
                    }
                }
            }
            let text = vec![format!("{pass} passed, {fail} failed")];
            Ok(Outcome { result: json!({"result": fail == 0, "failures": failures}), text, pass, fail })
        }
        TcaCmd::Iso { first, other } => {
            let c1 = mk(first)?.tca;
            let c2 = build(b, first.rank, &parse_json(other)?)?.tca;
            let v = iso_test(&c1, &c2, IsoMode::LLinear, cli.bound).map_err(CliError::compute)?;
            let witness = match &v {
                tcalg::fields::Verdict::Yes(Some(w)) => json!(format!("{w:?}")),
                tcalg::fields::Verdict::No(why) => json!(why),
                _ => Value::Null,
            };
            Ok(Outcome::ok(json!({"result": v.label(), "witness": witness}), vec![v.label().to_string()]))
        }
        TcaCmd::Xset { alg, a } => {
            let built = mk(alg)?;
            let a = elem(&built.e, &parse_json(a)?)?;
            let xs = x_set(&a, &built.tca, cli.bound).map_err(CliError::compute)?;
            let t = if b.is_finite() { Some(torus(&built.tca).map_err(CliError::compute)?.len()) } else { None };
            let text = vec![format!("|X| = {}, |T| = {}", xs.len(), t.map_or("-".into(), |n| n.to_string()))];
            let sample: Vec<Value> = xs.iter().take(8).map(|x| json!([elem_json(&x.u), elem_json(&x.v)])).collect();
            Ok(Outcome::ok(json!({"result": xs.len(), "torus": t, "witness": sample}), text))
        }
        TcaCmd::Aut(a) => {
            let g = aut_group(&mk(a)?.tca).map_err(CliError::compute)?;
            let text = vec![format!("order {}, identity component {}", g.order, g.identity_order)];
            Ok(Outcome::ok(json!({"result": {"order": g.order, "identity_order": g.identity_order}}), text))
        }
    }
}

fn run_jordan(cli: &Cli, cmd: &JordanCmd) -> Result<Outcome, CliError> {
    let b = base_field(first_q(cli))?;
    let parse = |a: &JordanArgs| -> Result<(Springer, JElem), CliError> {
        let built = build(b, a.alg.rank, &parse_json(&a.alg.params)?)?;
        let v = parse_json(&a.elem)?;
        let ea = elem(&built.e, v.get("a").ok_or_else(|| CliError::Usage("elem needs \"a\"".into()))?)?;
        let x = tca_elem(&built.tca, v.get("x").ok_or_else(|| CliError::Usage("elem needs \"x\"".into()))?)?;
        Ok((Springer::new(built.tca), JElem { a: ea, x }))
    };
    match cmd {
        JordanCmd::Sharp(a) => {
            let (j, z) = parse(a)?;
            let s = j.sharp(&z);
            let r = json!({"a": elem_json(&s.a), "x": tca_elem_json(&s.x)});
            Ok(Outcome::ok(json!({"result": r}), vec![r.to_string()]))
        }
        JordanCmd::Norm(a) => {
            let (j, z) = parse(a)?;
            let n = b.format(&j.norm(&z).map_err(CliError::compute)?);
            Ok(Outcome::ok(json!({"result": n}), vec![n]))
        }
        JordanCmd::Rank(a) => {
            let (j, z) = parse(a)?;
            let r = j.rank(&z).map_err(CliError::compute)?;
            Ok(Outcome::ok(json!({"result": r}), vec![r.to_string()]))
        }
        JordanCmd::Fixture { samples } => {
            let q = match b {
                BaseField::Finite(ctx) => ctx.q(),
                BaseField::Rationals => return Err(CliError::Usage("the fixture runs over F_q".into())),
            };
            let r = springer_fixture_check(q, *samples, cli.seed).map_err(CliError::compute)?;
            let v = serde_json::to_value(&r).map_err(CliError::compute)?;
            let (pass, fail) = if r.pass { (1, 0) } else { (0, 1) };
            Ok(Outcome { result: json!({"result": v}), text: vec![format!("fixture at q={q}: {}", if r.pass { "pass" } else { "FAIL" })], pass, fail })
        }
    }
}

fn cube_of(b: BaseField, args: &CubeArgs) -> Result<Cube, CliError> {
    let e = algebra::cubic(b, &args.e)?;
    let v = parse_json(&args.cube)?;
    let items: Vec<String> = v
        .as_array()
        .ok_or_else(|| CliError::Usage("a cube is a JSON array of 8 scalars".into()))?
        .iter()
        .map(|x| match x {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
        .collect();
    Cube::parse(&e, &items).map_err(|e| CliError::Usage(e.to_string()))
}

fn run_cube(cli: &Cli, cmd: &CubeCmd) -> Result<Outcome, CliError> {
    let b = base_field(first_q(cli))?;
    match cmd {
        CubeCmd::Reduce(a) => {
            let c = build(b, a.rank, &parse_json(&a.params)?)?.tca;
            let red = reduce(&c, cli.bound, cli.seed).map_err(CliError::compute)?;
            let cube = red.cube.to_strings();
            Ok(Outcome::ok(json!({"result": cube, "v": tca_elem_json(&red.v)}), vec![format!("{cube:?}")]))
        }
        CubeCmd::Algebra(a) => {
            let cube = cube_of(b, a)?;
            let alg = algebra_of_reduced(&cube).map_err(CliError::compute)?;
            let (f, bb) = (elem_json(alg.f()), b.format(alg.b()));
            let text = vec![format!("Q(x, y) = -f x^2 - b xy + f# y^2 with f = {f}, b = {bb}")];
            Ok(Outcome::ok(json!({"result": {"f": f, "b": bb, "f_sharp": elem_json(&alg.f().sharp().map_err(CliError::compute)?)}}), text))
        }
        CubeCmd::Rank(a) => {
            let r = degenerate_rank(&cube_of(b, a)?).map_err(CliError::compute)?;
            let nf = r.normal_form.to_strings();
            Ok(Outcome::ok(json!({"result": r.rank, "normal_form": nf}), vec![format!("rank {}", r.rank)]))
        }
        CubeCmd::Omega { alg, f, b: bs } => {
            let built = build(b, alg.rank, &parse_json(&alg.params)?)?;
            let f = elem(&built.e, &parse_json(f)?)?;
            let bb = scalar(b, &Value::String(bs.clone()))?;
            let om = omega_set(&built.tca, &f, &bb).map_err(CliError::compute)?;
            let aut = aut_group(&built.tca).map_err(CliError::compute)?.order;
            let text = vec![format!("|Omega| = {}, |Aut| = {aut}", om.len())];
            Ok(Outcome::ok(json!({"result": om.len(), "aut_order": aut}), text))
        }
        CubeCmd::Act { cube, g } => {
            let c = cube_of(b, cube)?;
            let v = parse_json(g)?;
            let e = c.algebra().clone();
            let part = |k: &str| elem(&e, v.get(k).ok_or_else(|| CliError::Usage(format!("g needs {k:?}")))?);
            let g = tcalg::cubes::GroupElem { p: part("p")?, q: part("q")?, r: part("r")?, s: part("s")? };
            let out = tcalg::cubes::act(&g, &c).map_err(CliError::compute)?.to_strings();
            Ok(Outcome::ok(json!({"result": out}), vec![format!("{out:?}")]))
        }
    }
}

fn run_arthur(cmd: &ArthurCmd) -> Result<Outcome, CliError> {
    match cmd {
        ArthurCmd::Local { place } => {
            let mut v = parse_json(place)?;
            if let Some(n) = v.get("chi_order").and_then(Value::as_u64) {
                v["chi_order"] = json!(if n > 2 { "large".to_string() } else { n.to_string() });
            }
            let p: PlaceDatum = serde_json::from_value(v).map_err(|e| CliError::Usage(format!("bad place: {e}")))?;
            let g = local_component_group(&p).map_err(|e| CliError::Usage(e.to_string()))?;
            let chars: Vec<Value> = g
                .characters
                .iter()
                .map(|(n, v)| json!({"name": n, "values": v.iter().map(|c| c.to_string()).collect::<Vec<_>>()}))
                .collect();
            let text = vec![format!("S_psi = {} (order {})", g.id.name(), g.order())];
            Ok(Outcome::ok(json!({"group": g.id.name(), "order": g.order(), "elements": g.labels, "characters": chars}), text))
        }
        ArthurCmd::Mult { case, sizes } => {
            let case: MultCase = serde_json::from_value(json!(case)).map_err(|_| {
                CliError::Usage(format!("case must be one of k_field_chi_generic, k_field_chi_quadratic, k_split_chi_generic, k_split_chi_quadratic, not {case:?}"))
            })?;
            let mut i = GlobalMultiplicityInput::new(case);
            let generic = matches!(case, MultCase::KFieldChiGeneric | MultCase::KSplitChiGeneric);
            let get = |k: usize| sizes.get(k).copied().unwrap_or(0);
            if generic {
                (i.a, i.b1, i.b2) = (get(0), get(1), get(2));
            } else {
                (i.s, i.b) = (get(0), get(1));
            }
            let closed = multiplicity_closed_form(&i).map_err(|e| CliError::Usage(e.to_string()))?;
            let brute = multiplicity_from_input(&i).map_err(CliError::compute)?;
            let agree = closed == brute;
            let text = vec![format!("closed {closed}, brute {brute}")];
            Ok(Outcome { result: json!({"closed": closed, "brute": brute}), text, pass: agree as u64, fail: !agree as u64 })
        }
        ArthurCmd::CountCsa { n } => {
            if *n > 30 {
                return Err(CliError::Usage("n must be at most 30".into()));
            }
            let (closed, brute) = (count_csa(*n), count_csa_bruteforce(*n));
            let agree = closed == brute;
            Ok(Outcome { result: json!({"closed": closed, "brute": brute}), text: vec![format!("closed {closed}, brute {brute}")], pass: agree as u64, fail: !agree as u64 })
        }
        ArthurCmd::Fiber { k, n } => {
            if *n > 30 {
                return Err(CliError::Usage("n must be at most 30".into()));
            }
            let split = matches!(k, KArg::Split);
            let (closed, brute) = (loc_fiber_size(split, *n), loc_fiber_bruteforce(split, *n));
            let agree = closed == brute;
            Ok(Outcome { result: json!({"closed": closed, "brute": brute}), text: vec![format!("closed {closed}, brute {brute}")], pass: agree as u64, fail: !agree as u64 })
        }
    }
}

fn run_hecke(cli: &Cli, cmd: &HeckeCmd) -> Result<Outcome, CliError> {
    let cat = catalog(cli)?;
    let sqs = hecke_sqs(cli)?;
    let args = match cmd {
        HeckeCmd::Verify(a) | HeckeCmd::Exponents(a) | HeckeCmd::Im(a) | HeckeCmd::Ds(a) => a,
    };
    let (mut pass, mut fail) = (0, 0);
    let mut rows = vec![];
    let mut text = vec![];
    let multi_q = sqs.len() > 1 && matches!(cmd, HeckeCmd::Verify(_));
    for sq in if matches!(cmd, HeckeCmd::Verify(_)) { &sqs[..] } else { &sqs[..1] } {
        for m in modules(cli, &cat, args, sq)? {
            let q = fmt_q(&m.q());
            let label = if multi_q { format!("{} (q={q})", m.name) } else { m.name.clone() };
            match cmd {
                HeckeCmd::Verify(_) => {
                    let r = verify_relations(&m);
                    let failure = r.failure.as_ref().map(|f| f.to_string());
                    if r.passed() { pass += 1 } else { fail += 1 }
                    text.push(format!("{label}: {}", failure.clone().unwrap_or_else(|| "relations hold".into())));
                    rows.push(json!({"module": m.name, "q": q, "passed": r.passed(), "quadratic_checked": r.quadratic_checked, "braid_checked": r.braid_checked, "failure": failure}));
                }
                HeckeCmd::Exponents(_) => {
                    let e = exponents(&m).map_err(CliError::compute)?;
                    pass += 1;
                    text.push(if args.module.is_some() { exps_text(&e) } else { format!("{label}: {}", exps_text(&e)) });
                    rows.push(json!({"module": m.name, "q": q, "exponents": exps_json(&e)}));
                }
                HeckeCmd::Im(_) => {
                    let im = im_involute(&m);
                    let e = exponents(&im).map_err(CliError::compute)?;
                    pass += 1;
                    text.push(format!("{}: {}", im.name, exps_text(&e)));
                    rows.push(json!({"module": im.name, "q": q, "exponents": exps_json(&e)}));
                }
                HeckeCmd::Ds(_) => {
                    let ds = is_discrete_series(&m).map_err(CliError::compute)?;
                    pass += 1;
                    text.push(format!("{label}: {}", if ds { "discrete series" } else { "not discrete series" }));
                    rows.push(json!({"module": m.name, "q": q, "discrete_series": ds}));
                }
            }
        }
    }
    Ok(Outcome { result: json!({"case": args.case, "modules": rows}), text, pass, fail })
}

fn family(s: &str) -> Result<Family, CliError> {
    s.parse().map_err(|e: tcalg::HeckeError| CliError::Usage(e.to_string()))
}

fn sp_json(s: &SParam) -> Value {
    json!({"re": fmt_q(&s.re), "tor": fmt_q(&s.tor)})
}

fn run_dps(cli: &Cli, cmd: &DpsCmd) -> Result<Outcome, CliError> {
    let cat = catalog(cli)?;
    match cmd {
        DpsCmd::List { which, s, tor } => {
            let sp = SParam::new(parse_q(s)?, parse_q(tor)?);
            let e = dps_exponent_list(&cat, family(&which.family)?, &which.case, &sp).map_err(|e| CliError::Usage(e.to_string()))?;
            let text = e.iter().map(|x| x.to_string()).collect();
            Ok(Outcome::ok(json!({"case": which.case, "family": which.family, "s": sp_json(&sp), "exponents": exps_json(&e)}), text))
        }
        DpsCmd::Analyze(which) => {
            let r = dps_reducibility(&cat, family(&which.family)?, &which.case).map_err(|e| CliError::Usage(e.to_string()))?;
            let points: Vec<Value> = r
                .points
                .iter()
                .map(|p| {
                    json!({"s": sp_json(&p.s), "regular": p.regular, "class_sizes": p.class_sizes, "verdict": format!("{:?}", p.verdict), "reducible": p.reducible})
                })
                .collect();
            let mut text: Vec<String> = r
                .points
                .iter()
                .map(|p| format!("{:<28} classes {:?} {:?}{}", p.s.to_string(), p.class_sizes, p.verdict, if p.regular { " regular" } else { "" }))
                .collect();
            text.push(format!("reducibility points: {}", r.reducibility_points.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("; ")));
            for c in &r.conflicts {
                text.push(format!("conflict: {c}"));
            }
            let ok = r.consistent();
            Ok(Outcome {
                result: json!({
                    "case": r.case, "family": r.family.to_string(), "period": fmt_q(&r.period), "points": points,
                    "reducibility_points": r.reducibility_points.iter().map(sp_json).collect::<Vec<_>>(),
                    "theorem_points": r.theorem_points.iter().map(sp_json).collect::<Vec<_>>(),
                    "undetermined": r.undetermined.iter().map(sp_json).collect::<Vec<_>>(),
                    "conflicts": r.conflicts, "consistent": ok
                }),
                text,
                pass: ok as u64,
                fail: !ok as u64,
            })
        }
    }
}

fn run_selftest(cli: &Cli, only: &[u8]) -> Result<Outcome, CliError> {
    let cat = catalog(cli)?;
    let ids: Vec<u8> = if only.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { only.to_vec() };
    let mut reports = vec![];
    for id in ids {
        let r = selftest::run(id, cli.seed, &cat).ok_or_else(|| CliError::Usage(format!("no criterion {id}")))?;
        reports.push(r);
    }
    let pass = reports.iter().filter(|r| r.passed()).count() as u64;
    let fail = reports.len() as u64 - pass;
    let text = reports.iter().map(|r| r.summary()).collect();
    let result = serde_json::to_value(&reports).map_err(CliError::compute)?;
    Ok(Outcome { result: json!({"suites": result}), text, pass, fail })
}

fn command_name(c: &Command) -> String {
    let sub = match c {
        Command::Fields(FieldsCmd::Describe { .. }) => "fields describe",
        Command::Fields(FieldsCmd::Elem { .. }) => "fields elem",
        Command::Tca(TcaCmd::Make(_)) => "tca make",
        Command::Tca(TcaCmd::Check { .. }) => "tca check",
        Command::Tca(TcaCmd::Iso { .. }) => "tca iso",
        Command::Tca(TcaCmd::Xset { .. }) => "tca xset",
        Command::Tca(TcaCmd::Aut(_)) => "tca aut",
        Command::Jordan(JordanCmd::Sharp(_)) => "jordan sharp",
        Command::Jordan(JordanCmd::Norm(_)) => "jordan norm",
        Command::Jordan(JordanCmd::Rank(_)) => "jordan rank",
        Command::Jordan(JordanCmd::Fixture { .. }) => "jordan fixture",
        Command::Cube(CubeCmd::Reduce(_)) => "cube reduce",
        Command::Cube(CubeCmd::Algebra(_)) => "cube algebra",
        Command::Cube(CubeCmd::Rank(_)) => "cube rank",
        Command::Cube(CubeCmd::Omega { .. }) => "cube omega",
        Command::Cube(CubeCmd::Act { .. }) => "cube act",
        Command::Arthur(ArthurCmd::Local { .. }) => "arthur local",
        Command::Arthur(ArthurCmd::Mult { .. }) => "arthur mult",
        Command::Arthur(ArthurCmd::CountCsa { .. }) => "arthur count-csa",
        Command::Arthur(ArthurCmd::Fiber { .. }) => "arthur fiber",
        Command::Hecke(HeckeCmd::Verify(_)) => "hecke verify",
        Command::Hecke(HeckeCmd::Exponents(_)) => "hecke exponents",
        Command::Hecke(HeckeCmd::Im(_)) => "hecke im",
        Command::Hecke(HeckeCmd::Ds(_)) => "hecke ds",
        Command::Dps(DpsCmd::List { .. }) => "dps list",
        Command::Dps(DpsCmd::Analyze(_)) => "dps analyze",
        Command::Selftest { .. } => "selftest",
    };
    sub.to_string()
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Fields(c) => run_fields(cli, c),
        Command::Tca(c) => run_tca(cli, c),
        Command::Jordan(c) => run_jordan(cli, c),
        Command::Cube(c) => run_cube(cli, c),
        Command::Arthur(c) => run_arthur(c),
        Command::Hecke(c) => run_hecke(cli, c),
        Command::Dps(c) => run_dps(cli, c),
        Command::Selftest { only } => run_selftest(cli, only),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let start = Instant::now();
    let out = dispatch(&cli);
    let millis = start.elapsed().as_millis() as u64;
    match out {
        Ok(o) => {
            if cli.json {
                let report = json!({
                    "schema": SCHEMA_VERSION,
                    "command": command_name(&cli.command),
                    "inputs": {"argv": argv, "seed": cli.seed, "bound": cli.bound, "q": cli.q},
                    "results": o.result,
                    "timing_ms": millis,
                    "pass": o.pass,
                    "fail": o.fail,
                });
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                for line in &o.text {
                    println!("{line}");
                }
            }
            if o.fail > 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            if cli.json {
                let kind = if matches!(e, CliError::Usage(_)) { "usage" } else { "computation" };
                println!("{}", json!({"schema": SCHEMA_VERSION, "command": command_name(&cli.command), "error": {"kind": kind, "message": e.to_string()}}));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Compute(_) => 1,
            })
        }
    }
}
