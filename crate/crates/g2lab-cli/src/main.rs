//! `g2lab`: JSON front end to the g2lab library.
//!
//! Exit codes: 0 success (cases A to D), 1 internal error or failed suite,
//! 2 bad input, 3 group not element-wise of type G2, 4 classification
//! contradiction, 5 group order cap exceeded.

#[allow(dead_code)]
#[path = "../../g2lab/tests/common/suite.rs"]
mod suite;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use g2lab::decide::{classify, poly_is_type_g2, spin_preimage, split_tower_group, ClassificationReport};
use g2lab::gallery::{
    build_alpha, build_beta, build_g2_finite_sample, build_gamma, build_torus_subgroup, default_tower, gamma_preset,
    torus_tower, BetaVariant,
};
use g2lab::grouprep::{
    isotypic_split, order2_linear_characters, repring_identity_check, witt_index, witt_witness, MatrixGroup,
    Representation,
};
use g2lab::json::{self, SCHEMA};
use g2lab::quadspace::QuadSpace;
use g2lab::scalars::{FieldTower, Poly};
use g2lab::Error;
use num_rational::BigRational;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "g2lab", version, about = "G2-containment of finite subgroups of SO(7), with exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a monic degree-7 polynomial is of type G2.
    PolyG2 {
        /// Eight rational coefficients, highest degree first.
        #[arg(allow_negative_numbers = true, required = true)]
        coeffs: Vec<String>,
    },
    /// Classify a finite subgroup of SO(E7) given as MatrixGroup JSON.
    Classify {
        /// Input file, or - for stdin.
        #[arg(long, default_value = "-")]
        input: PathBuf,
        /// Where to write the ClassificationReport; stdout if omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Add witness matrices, character polynomials and order-2 characters.
        #[arg(long)]
        witnesses: bool,
    },
    /// Build a named group as MatrixGroup JSON.
    Build {
        #[arg(long, value_enum)]
        family: Family,
        /// Torus orders.
        #[arg(long, default_value_t = 2)]
        n1: u64,
        #[arg(long, default_value_t = 2)]
        n2: u64,
        /// Named O2 subgroup for the gamma family.
        #[arg(long)]
        preset: Option<String>,
        /// O2pmSubgroupSpec JSON for the gamma family.
        #[arg(long, conflicts_with = "preset")]
        spec: Option<PathBuf>,
        /// Which D8 morphism: μ trivial or μ nontrivial on the rotation.
        #[arg(long, value_enum, default_value_t = D8Variant::Plain)]
        variant: D8Variant,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout if omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Witt index of E under a group, with an explicit stable isotropic subspace.
    WittIndex {
        #[arg(long, default_value = "-")]
        input: PathBuf,
    },
    /// The identity [Λ³E] = [E] + [Sym²E] on every element.
    RepringCheck {
        #[arg(long, default_value = "-")]
        input: PathBuf,
    },
    /// Run the seeded verification batteries.
    VerifySuite {
        #[arg(long, value_enum, default_value_t = SuiteLevel::Fast)]
        level: SuiteLevel,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print a JSON summary instead of PASS/FAIL lines.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Torus,
    Alpha,
    BetaGl,
    BetaSl,
    Gamma,
    D8,
    G2sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum D8Variant {
    Plain,
    Twisted,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteLevel {
    Fast,
    Full,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::OrderCapExceeded(_) => 5,
            Error::TheoremViolation(_) | Error::EquivalenceViolation(_) => 4,
            Error::Parse(_)
            | Error::Scalar(_)
            | Error::DimensionMismatch { .. }
            | Error::TowerMismatch
            | Error::NotMonicDegree7
            | Error::SimilitudeFactorNotPlusMinusOne
            | Error::NotProperIsometry
            | Error::ConstructionVerificationFailed(_)
            | Error::ExponentNotDividingConductor { .. } => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

type Outcome = Result<u8, Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
    }
}

fn read_group(path: &Path) -> Result<MatrixGroup, Failure> {
    let v = json::parse_document(&read_input(path)?)?;
    Ok(json::group_from_json(&v)?)
}

fn emit(v: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n";
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure { code: 1, message: format!("{}: {e}", p.display()) }),
        None => {
            let mut s = io::stdout().lock();
            s.write_all(text.as_bytes()).and_then(|_| s.flush()).map_err(|e| Failure { code: 1, message: e.to_string() })
        }
    }
}

fn poly_g2(coeffs: &[String]) -> Outcome {
    if coeffs.len() != 8 {
        return Err(usage(format!("expected 8 coefficients (degree 7, highest first), got {}", coeffs.len())));
    }
    let q = FieldTower::rationals();
    let mut c = Vec::with_capacity(8);
    for s in coeffs.iter().rev() {
        let r = BigRational::from_str(s.trim()).map_err(|_| usage(format!("bad rational coefficient \"{s}\"")))?;
        c.push(q.from_rational(&r));
    }
    let p = Poly::new(&q, c);
    let p = p.monic().map_err(|_| usage("leading coefficient is zero"))?;
    let v = poly_is_type_g2(&p)?;
    emit(&json::verdict_to_json(&v, &q), None)?;
    Ok(0)
}

fn witnesses(g: &MatrixGroup, r: &ClassificationReport) -> Result<Value, Failure> {
    let table = g.table()?;
    let mut w = serde_json::Map::new();
    if let Some(i) = r.failing_element {
        let m = table.element(i);
        let cp = m.charpoly().map_err(Error::from)?;
        w.insert("failing_matrix".into(), json::matrix_to_json(m));
        w.insert("failing_charpoly".into(), json::vector_to_json(cp.coeffs()));
    }
    if r.elementwise_g2 {
        let g = split_tower_group(g, &mut Vec::new())?;
        let pre = spin_preimage(&g)?;
        let pt = pre.group.table()?;
        w.insert("spin_preimage_order".into(), json!(pt.len()));
        w.insert("order2_characters".into(), json!(order2_linear_characters(pt)));
    }
    Ok(Value::Object(w))
}

fn classify_cmd(input: &Path, report: Option<&Path>, with_witnesses: bool) -> Outcome {
    let g = read_group(input)?;
    if g.dim() != 7 {
        return Err(usage(format!("expected 7x7 generators, got {0}x{0}", g.dim())));
    }
    let q = QuadSpace::e7(g.tower());
    for m in g.generators() {
        if !q.is_special_isometry(m) {
            return Err(usage("generator is not in SO(E7)"));
        }
    }
    let r = classify(&g)?;
    let mut v = json::report_to_json(&r)?;
    if with_witnesses {
        v["witnesses"] = witnesses(&g, &r)?;
    }
    emit(&v, report)?;
    match r.case {
        Some(c) => {
            eprintln!("case {c} (order {}, Witt index {})", r.order, r.witt_index.map_or("-".into(), |w| w.to_string()));
            Ok(0)
        }
        None => {
            eprintln!("not element-wise of type G2: element {} fails", r.failing_element.unwrap_or(0));
            Ok(3)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn build_cmd(
    family: Family,
    n1: u64,
    n2: u64,
    preset: Option<&str>,
    spec: Option<&Path>,
    variant: D8Variant,
    seed: u64,
    output: Option<&Path>,
) -> Outcome {
    let t = default_tower();
    let g = match family {
        Family::Torus => {
            if n1 == 0 || n2 == 0 {
                return Err(usage("torus orders must be positive"));
            }
            build_torus_subgroup(&torus_tower(&t, n1, n2), n1, n2)?
        }
        Family::Alpha => build_alpha(&t)?,
        Family::BetaGl => build_beta(&t, BetaVariant::Gl)?,
        Family::BetaSl => build_beta(&t, BetaVariant::Sl)?,
        Family::Gamma | Family::D8 => {
            let s = match (family, spec) {
                (Family::D8, _) => gamma_preset(&t, if matches!(variant, D8Variant::Plain) { "d8" } else { "d8-twisted" })?,
                (_, Some(p)) => json::o2pm_spec_from_json(&json::parse_document(&read_input(p)?)?)?,
                _ => gamma_preset(&t, preset.unwrap_or("d8"))?,
            };
            let b = build_gamma(&s)?;
            eprintln!("O2 subgroup of order {} ({}), predicted {}, μ on generators {:?}", b.source.order()?, b.shape, b.predicted, b.mu);
            b.group
        }
        Family::G2sample => build_g2_finite_sample(&t, seed)?,
    };
    emit(&json::group_to_json(&g), output)?;
    Ok(0)
}

fn witt_cmd(input: &Path) -> Outcome {
    let g = read_group(input)?;
    let mut log = Vec::new();
    let g = split_tower_group(&g, &mut log)?;
    let table = g.table()?;
    let rep = Representation::natural(table);
    let split = isotypic_split(table, &rep)?;
    let w = witt_witness(table, &rep, &QuadSpace::e7(g.tower()), &split)?;
    let basis: Vec<Value> = w.subspace.basis.iter().map(|v| json::vector_to_json(v)).collect();
    let t = w.subspace.basis.first().map_or_else(|| g.tower().clone(), |v| v[0].tower().clone());
    let comps: Vec<Value> = split
        .iter()
        .map(|c| json!({"dim": c.dim, "multiplicity": c.multiplicity, "selfdual": c.selfdual}))
        .collect();
    let v = json!({
        "schema": SCHEMA,
        "field": json::tower_to_json(&t),
        "witt_index": witt_index(&split),
        "components": comps,
        "isotropic_basis": basis,
        "tower_extensions": log,
    });
    emit(&v, None)?;
    Ok(0)
}

fn repring_cmd(input: &Path) -> Outcome {
    let g = read_group(input)?;
    let table = g.table()?;
    let (ok, fail) = repring_identity_check(table, &Representation::natural(table));
    emit(&json!({"schema": SCHEMA, "identity_holds": ok, "failing_element": fail, "order": table.len()}), None)?;
    Ok(0)
}

fn suite_cmd(level: SuiteLevel, seed: u64, as_json: bool) -> Outcome {
    let level = match level {
        SuiteLevel::Fast => suite::Level::Fast,
        SuiteLevel::Full => suite::Level::Full,
    };
    let mut checks = suite::acceptance(level, seed);
    checks.extend(suite::invariants(level, seed));
    let failed = checks.iter().filter(|c| !c.pass).count();
    if as_json {
        let items: Vec<Value> =
            checks.iter().map(|c| json!({"id": c.id, "name": c.name, "pass": c.pass, "detail": c.detail})).collect();
        emit(&json!({"schema": SCHEMA, "seed": seed, "checks": items, "failed": failed}), None)?;
    } else {
        for c in &checks {
            println!("{}", c.line());
        }
        println!("{} checks, {failed} failed", checks.len());
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::PolyG2 { coeffs } => poly_g2(coeffs),
        Command::Classify { input, report, witnesses } => classify_cmd(input, report.as_deref(), *witnesses),
        Command::Build { family, n1, n2, preset, spec, variant, seed, output } => {
            build_cmd(*family, *n1, *n2, preset.as_deref(), spec.as_deref(), *variant, *seed, output.as_deref())
        }
        Command::WittIndex { input } => witt_cmd(input),
        Command::RepringCheck { input } => repring_cmd(input),
        Command::VerifySuite { level, seed, json } => suite_cmd(*level, *seed, *json),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
