//! Command-line front end: expression parsing, dispatch, and stable JSON
//! output for every computation.
//!
//! Exit codes: 0 on success, 2 when a result is reported without its
//! stabilization certificate (legitimate for non-isolated critical loci),
//! 1 on errors. `MFKIT_FIELD` and `MFKIT_DMAX` override the defaults;
//! explicit flags override both.

use crate::clifford::{
    compare_clifford, hyperbolic_triviality, mf_end_algebra, CliffOptions, QuadraticForm,
};
use crate::error::{Error, Result};
use crate::hochschild::{
    global_jacobian_dim, hc_tate, hh_beta, hh_cochain_tate, hh_tate, hkr_intertwine_check,
    milnor_number, socle_pairing, HochOptions,
};
use crate::hom::{ext_beta, ext_tate, ExtOptions};
use crate::mf::{
    knorrer_double, koszul_mf, stabilized_residue_field, ts_tensor, LGPair, MatrixFactorization,
};
use crate::parse::{parse_poly, parse_poly_in};
use crate::poly::{MultiPoly, PolyRing};
use crate::scalar::Field;
use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};
use std::sync::Arc;

#[derive(Parser, Debug)]
#[command(name = "mfkit", version, about = "exact computations with matrix factorizations")]
pub struct Cli {
    /// Coefficient field: `Q` or `fp:<prime>`.
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Polynomial degree budget for truncation sweeps.
    #[arg(long, global = true)]
    pub dmax: Option<i64>,
    /// Beta-adic truncation levels.
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    /// Support exponent (conceptual cutoff) for supported invariants.
    #[arg(short = 'S', long, global = true)]
    pub support: Option<u32>,
    /// u-adic truncation for the cyclic complex.
    #[arg(short = 'K', long, global = true)]
    pub cyclic: Option<usize>,
    /// Comma-separated positive integer weights, e.g. `--weights 3,2`.
    #[arg(long, global = true)]
    pub weights: Option<String>,
    /// Fixed variable order, e.g. `--vars x,y`; unknown names then error.
    #[arg(long, global = true)]
    pub vars: Option<String>,
    /// Random seed echoed into provenance (reserved for batch drivers).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Render an aligned text table instead of JSON.
    #[arg(long, global = true)]
    pub table: bool,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Validate a matrix-factorization JSON file.
    Validate { file: String },
    /// Milnor number: dim k[x]/(df).
    Milnor { poly: String },
    /// Total Milnor number over all critical points.
    GlobalMilnor { poly: String },
    /// Tate-level Ext between two factorizations.
    Ext {
        /// Use one spec for both arguments.
        #[arg(long = "self")]
        self_pair: bool,
        /// One or two factorization specs: `stab <f>`, `trivial <f>`,
        /// `koszul <a1,..> <b1,..>`, or `file <path>`.
        #[arg(num_args = 1..)]
        spec: Vec<String>,
    },
    /// Ext over k[[b]]/b^N fitted to a beta-module.
    ExtBeta {
        #[arg(long = "self")]
        self_pair: bool,
        #[arg(num_args = 1..)]
        spec: Vec<String>,
    },
    /// Hochschild homology dims of the twisted de Rham complex.
    Hh { poly: String },
    /// Cochain-side dims (polyvectors with i_df).
    HhCochain { poly: String },
    /// Supported beta-level Hochschild homology.
    HhBeta { poly: String },
    /// u-truncated cyclic deformation.
    Hc { poly: String },
    /// Exhaustive HKR intertwining check.
    HkrCheck {
        poly: String,
        #[arg(long, default_value_t = 3)]
        mmax: usize,
        #[arg(long, default_value_t = 3)]
        degmax: u64,
    },
    /// Socle pairing on the Jacobian ring.
    Socle { poly: String },
    /// Thom-Sebastiani tensor of two factorizations (emits MF JSON).
    Ts {
        #[arg(num_args = 2..)]
        spec: Vec<String>,
    },
    /// Dual factorization (emits MF JSON).
    Dual {
        #[arg(num_args = 1..)]
        spec: Vec<String>,
    },
    /// Knorrer double (emits MF JSON).
    Knorrer {
        #[arg(num_args = 1..)]
        spec: Vec<String>,
    },
    /// Endomorphism algebra of a quadratic potential.
    Clifford {
        #[arg(long)]
        quadric: Option<String>,
        /// Semicolon-separated Gram rows, e.g. `--gram "2,0;0,4"`.
        #[arg(long)]
        gram: Option<String>,
    },
    /// Compare the endomorphism pipeline with the Clifford algebra.
    CliffordCompare {
        #[arg(long)]
        quadric: Option<String>,
        #[arg(long)]
        gram: Option<String>,
    },
    /// Triviality of the split hyperbolic form of the given rank.
    Hyperbolic { rank: usize },
}

/// Resolved configuration after flags, environment, defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub field: Field,
    pub d_max: i64,
    pub n_max: usize,
    pub s_exp: u32,
    pub k_u: usize,
    pub window: usize,
    pub weights: Option<Vec<u64>>,
    pub vars: Option<Vec<String>>,
    pub seed: Option<u64>,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Result<Self> {
        let field_src = cli
            .field
            .clone()
            .or_else(|| std::env::var("MFKIT_FIELD").ok())
            .unwrap_or_else(|| "Q".to_string());
        let field = parse_field(&field_src)?;
        let d_max = match cli.dmax {
            Some(d) => d,
            None => match std::env::var("MFKIT_DMAX") {
                Ok(s) => s
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad MFKIT_DMAX: {s}")))?,
                Err(_) => 16,
            },
        };
        if d_max < 1 {
            return Err(Error::Invalid("dmax must be at least 1".into()));
        }
        let n_max = cli.nmax.unwrap_or(6);
        if n_max < 1 {
            return Err(Error::Invalid("nmax must be at least 1".into()));
        }
        let weights = match &cli.weights {
            None => None,
            Some(s) => Some(
                s.split(',')
                    .map(|w| {
                        w.trim()
                            .parse::<u64>()
                            .ok()
                            .filter(|&w| w > 0)
                            .ok_or_else(|| Error::Invalid(format!("bad weight '{w}'")))
                    })
                    .collect::<Result<Vec<u64>>>()?,
            ),
        };
        let vars = cli
            .vars
            .as_ref()
            .map(|s| s.split(',').map(|v| v.trim().to_string()).collect());
        Ok(RunConfig {
            field,
            d_max,
            n_max,
            s_exp: cli.support.unwrap_or(8),
            k_u: cli.cyclic.unwrap_or(2),
            window: 3,
            weights,
            vars,
            seed: cli.seed,
        })
    }

    fn ext_options(&self) -> ExtOptions {
        ExtOptions {
            d_max: self.d_max,
            beta_d_max: (self.d_max / 2).max(4),
            n_max: self.n_max.max(2),
            window: self.window,
        }
    }

    fn hoch_options(&self) -> HochOptions {
        HochOptions {
            d_max: self.d_max,
            window: self.window,
            k_u: self.k_u,
            n_max: self.n_max.max(2),
            s_exp: self.s_exp,
            weights: self.weights.clone(),
        }
    }

    fn cliff_options(&self) -> CliffOptions {
        CliffOptions {
            n_levels: self.n_max.max(3).min(8),
            d_max: self.d_max.min(8),
            window: self.window,
        }
    }

    fn as_json(&self) -> Value {
        json!({
            "field": self.field.to_string(),
            "d_max": self.d_max,
            "n_max": self.n_max,
            "s_exp": self.s_exp,
            "k_u": self.k_u,
            "window": self.window,
            "weights": self.weights,
            "vars": self.vars,
            "seed": self.seed,
        })
    }
}

fn parse_field(src: &str) -> Result<Field> {
    let s = src.trim();
    if s.eq_ignore_ascii_case("q") {
        return Ok(Field::Char0);
    }
    if let Some(p) = s
        .strip_prefix("fp:")
        .or_else(|| s.strip_prefix("Fp:"))
        .or_else(|| s.strip_prefix("FP:"))
    {
        let p: u64 = p
            .parse()
            .map_err(|_| Error::Invalid(format!("bad prime '{p}'")))?;
        if p < 2 || (2..p).take(1000).any(|d| d * d <= p && p % d == 0) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        return Ok(Field::Prime(p));
    }
    Err(Error::Invalid(format!(
        "unknown field '{src}': use Q or fp:<prime>"
    )))
}

fn ring_of(cfg: &RunConfig) -> Option<Arc<PolyRing>> {
    cfg.vars.as_ref().map(|vars| {
        let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        PolyRing::new(&refs)
    })
}

fn parse_cfg_poly(src: &str, cfg: &RunConfig) -> Result<MultiPoly> {
    match ring_of(cfg) {
        Some(ring) => parse_poly_in(src, cfg.field, &ring),
        None => parse_poly(src, cfg.field),
    }
}

/// Parses one factorization spec, consuming tokens from the front.
fn parse_mf_spec(tokens: &[String], cfg: &RunConfig) -> Result<(MatrixFactorization, usize)> {
    let Some(kind) = tokens.first() else {
        return Err(Error::Invalid("missing factorization spec".into()));
    };
    match kind.as_str() {
        "stab" | "trivial" => {
            let Some(poly) = tokens.get(1) else {
                return Err(Error::Invalid(format!("{kind} needs a polynomial")));
            };
            let f = parse_cfg_poly(poly, cfg)?;
            let mf = if kind == "stab" {
                stabilized_residue_field(&LGPair::new(f))?
            } else {
                MatrixFactorization::trivial(f)
            };
            Ok((mf, 2))
        }
        "koszul" => {
            let (Some(alist), Some(blist)) = (tokens.get(1), tokens.get(2)) else {
                return Err(Error::Invalid(
                    "koszul needs two comma-separated polynomial lists".into(),
                ));
            };
            // Parse in a shared ring: first pass collects variables.
            let ring = match ring_of(cfg) {
                Some(r) => r,
                None => {
                    let mut vars: Vec<String> = Vec::new();
                    for src in alist.split(',').chain(blist.split(',')) {
                        let probe = parse_poly(src, cfg.field)?;
                        for v in &probe.ring.vars {
                            if !vars.contains(v) {
                                vars.push(v.clone());
                            }
                        }
                    }
                    let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
                    PolyRing::new(&refs)
                }
            };
            let a: Vec<MultiPoly> = alist
                .split(',')
                .map(|s| parse_poly_in(s, cfg.field, &ring))
                .collect::<Result<_>>()?;
            let b: Vec<MultiPoly> = blist
                .split(',')
                .map(|s| parse_poly_in(s, cfg.field, &ring))
                .collect::<Result<_>>()?;
            Ok((koszul_mf(&a, &b)?, 3))
        }
        "file" => {
            let Some(path) = tokens.get(1) else {
                return Err(Error::Invalid("file needs a path".into()));
            };
            let src = std::fs::read_to_string(path)?;
            Ok((MatrixFactorization::from_json(&src, cfg.field)?, 2))
        }
        other => Err(Error::Invalid(format!(
            "unknown factorization spec '{other}' (use stab/trivial/koszul/file)"
        ))),
    }
}

fn parse_mf_pair(
    tokens: &[String],
    self_pair: bool,
    cfg: &RunConfig,
) -> Result<(MatrixFactorization, MatrixFactorization)> {
    let (m, used) = parse_mf_spec(tokens, cfg)?;
    if self_pair {
        if tokens.len() != used {
            return Err(Error::Invalid("extra arguments after --self spec".into()));
        }
        return Ok((m.clone(), m));
    }
    let (n, used2) = parse_mf_spec(&tokens[used..], cfg)?;
    if tokens.len() != used + used2 {
        return Err(Error::Invalid("trailing arguments after specs".into()));
    }
    Ok((m, n))
}

fn quadratic_form(
    quadric: &Option<String>,
    gram: &Option<String>,
    cfg: &RunConfig,
) -> Result<QuadraticForm> {
    match (quadric, gram) {
        (Some(q), None) => {
            let poly = parse_cfg_poly(q, cfg)?;
            QuadraticForm::from_potential(&poly)
        }
        (None, Some(g)) => {
            let rows: Vec<Vec<crate::scalar::Scalar>> = g
                .split(';')
                .map(|row| {
                    row.split(',')
                        .map(|e|

                            parse_scalar(e.trim(), cfg.field))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            QuadraticForm::new(rows)
        }
        _ => Err(Error::Invalid(
            "provide exactly one of --quadric or --gram".into(),
        )),
    }
}

fn parse_scalar(src: &str, field: Field) -> Result<crate::scalar::Scalar> {
    // Reuse the polynomial parser on a variable-free ring.
    let ring = PolyRing::new(&[]);
    let p = parse_poly_in(src, field, &ring)?;
    Ok(p.constant_term())
}

/// Provenance block: the echoed command and resolved configuration.
fn provenance(cli_echo: &str, cfg: &RunConfig) -> Value {
    json!({ "command": cli_echo, "config": cfg.as_json() })
}

/// Runs a parsed command; returns the JSON document and the exit code.
pub fn run(cli: &Cli, echo: &str) -> Result<(Value, i32)> {
    let cfg = RunConfig::from_cli(cli)?;
    let mut doc = Map::new();
    let mut exit = 0i32;
    let mut stabilized_flag: Option<bool> = None;

    match &cli.verb {
        Verb::Validate { file } => {
            let src = std::fs::read_to_string(file)?;
            let mf = MatrixFactorization::from_json(&src, cfg.field)?;
            doc.insert("valid".into(), json!(true));
            doc.insert("rank".into(), json!(mf.rank()));
            doc.insert("f".into(), json!(mf.f.to_string()));
        }
        Verb::Milnor { poly } => {
            let f = parse_cfg_poly(poly, &cfg)?;
            let q = milnor_number(&f, &cfg.hoch_options())?;
            doc.insert("milnor".into(), json!(q.dim));
            doc.insert("stabilized".into(), json!(q.stabilized));
            doc.insert("D_used".into(), json!(q.d_used));
            stabilized_flag = Some(q.stabilized);
        }
        Verb::GlobalMilnor { poly } => {
            let f = parse_cfg_poly(poly, &cfg)?;
            let q = global_jacobian_dim(&f, &cfg.hoch_options())?;
            doc.insert("milnor".into(), json!(q.dim));
            doc.insert("stabilized".into(), json!(q.stabilized));
            doc.insert("D_used".into(), json!(q.d_used));
            stabilized_flag = Some(q.stabilized);
        }
        Verb::Ext { self_pair, spec } => {
            let (m, n) = parse_mf_pair(spec, *self_pair, &cfg)?;
            let e = ext_tate(&m, &n, &cfg.ext_options())?;
            doc.insert("even".into(), json!(e.even));
            doc.insert("odd".into(), json!(e.odd));
            doc.insert("stabilized".into(), json!(e.stabilized));
            doc.insert("D_used".into(), json!(e.d_used));
            stabilized_flag = Some(e.stabilized);
        }
        Verb::ExtBeta { self_pair, spec } => {
            let (m, n) = parse_mf_pair(spec, *self_pair, &cfg)?;
            let e = ext_beta(&m, &n, &cfg.ext_options())?;
            doc.insert("even".into(), json!(e.dims[0].0));
            doc.insert("odd".into(), json!(e.dims[0].1));
            doc.insert(
                "free_rank".into(),
                json!([e.module.free_rank.0, e.module.free_rank.1]),
            );
            let torsion: Vec<Value> = e
                .module
                .torsion
                .iter()
                .map(|(a, p)| json!([a, format!("{p:?}").to_lowercase()]))
                .collect();
            doc.insert("torsion".into(), json!(torsion));
            doc.insert("dims".into(), json!(e.dims));
            doc.insert("stabilized".into(), json!(e.stabilized));
            doc.insert("D_used".into(), json!(e.d_used));
            doc.insert("N_used".into(), json!(e.n_used));
            stabilized_flag = Some(e.stabilized);
        }
        Verb::Hh { poly } => {
            let f = parse_cfg_poly(poly, &cfg)?;
            let h = hh_tate(&f, &cfg.hoch_options());
            doc.insert("even".into(), json!(h.even));
            doc.insert("odd".into(), json!(h.odd));
            doc.insert("stabilized".into(), json!(h.stabilized));
            doc.insert("D_used".into(), json!(h.d_used));
            stabilized_flag = Some(h.stabilized);
        }
        Verb::HhCochain { poly } => {
            let f = parse_cfg_poly(poly, &cfg)?;
            let h = hh_cochain_tate(&f, &cfg.hoch_options());
            doc.insert("even".into(), json!(h.even));
            doc.insert("odd".into(), json!(h.odd));
            doc.insert("stabilized".into(), json!(h.stabilized));
            doc.insert("D_used".into(), json!(h.d_used));
            stabilized_flag = Some(h.stabilized);
        }
        Verb::HhBeta { poly } => {
            let f = parse_cfg_poly(poly, &cfg)?;
            let (module, dims, stabilized) = hh_beta(&f, &cfg.hoch_options())?;
            doc.insert(
                "free_rank".into(),
                json!([module.free_rank.0, module.free_rank.1]),
            );
            let torsion: Vec<Value> = module
                .torsion
                .iter()
                .map(|(a, p)| json!([a, format!("{p:?}").to_lowercase()]))
                .collect();
            doc.insert("torsion".into(), json!(torsion));
            doc.insert("dims".into(), json!(dims));
            doc.insert("stabilized".into(), json!(stabilized));
            doc.insert("N_used".into(), json!(cfg.n_max));
            stabilized_flag = Some(stabilized);
        }
        Verb::Hc { poly } => {
            let f = parse_cfg_poly(poly, &cfg)?;
            let h = hc_tate(&f, cfg.k_u, &cfg.hoch_options())?;
            doc.insert("even".into(), json!(h.even));
            doc.insert("odd".into(), json!(h.odd));
            doc.insert("K_used".into(), json!(cfg.k_u));
            doc.insert("stabilized".into(), json!(h.stabilized));
            doc.insert("D_used".into(), json!(h.d_used));
            stabilized_flag = Some(h.stabilized);
        }
        Verb::HkrCheck { poly, mmax, degmax } => {
            let f = parse_cfg_poly(poly, &cfg)?;
            if cfg.field != Field::Char0 {
                return Err(Error::Invalid(
                    "HKR normalization requires characteristic zero".into(),
                ));
            }
            let ok = hkr_intertwine_check(&f, *mmax, *degmax);
            doc.insert("ok".into(), json!(ok));
            doc.insert("m_max".into(), json!(mmax));
            doc.insert("deg_max".into(), json!(degmax));
            if !ok {
                exit = 1;
            }
        }
        Verb::Socle { poly } => {
            let f = parse_cfg_poly(poly, &cfg)?;
            let (matrix, nondeg) = socle_pairing(&f, &cfg.hoch_options())?;
            let rows: Vec<Vec<String>> = matrix
                .iter()
                .map(|r| r.iter().map(|c| c.to_string()).collect())
                .collect();
            doc.insert("mu".into(), json!(matrix.len()));
            doc.insert("nondegenerate".into(), json!(nondeg));
            doc.insert("matrix".into(), json!(rows));
        }
        Verb::Ts { spec } => {
            let (m, used) = parse_mf_spec(spec, &cfg)?;
            let (n, _) = parse_mf_spec(&spec[used..], &cfg)?;
            let t = ts_tensor(&m, &n)?;
            return Ok((serde_json::to_value(t.to_file())?, 0));
        }
        Verb::Dual { spec } => {
            let (m, _) = parse_mf_spec(spec, &cfg)?;
            return Ok((serde_json::to_value(m.dual().to_file())?, 0));
        }
        Verb::Knorrer { spec } => {
            let (m, _) = parse_mf_spec(spec, &cfg)?;
            return Ok((serde_json::to_value(knorrer_double(&m)?.to_file())?, 0));
        }
        Verb::Clifford { quadric, gram } => {
            let form = quadratic_form(quadric, gram, &cfg)?;
            let end = mf_end_algebra(&form, &cfg.cliff_options())?;
            doc.insert("dims".into(), json!(end.dims));
            doc.insert(
                "free_rank".into(),
                json!([end.free_rank.0, end.free_rank.1]),
            );
            doc.insert("relations_ok".into(), json!(end.relations_ok));
        }
        Verb::CliffordCompare { quadric, gram } => {
            let form = quadratic_form(quadric, gram, &cfg)?;
            let equal = compare_clifford(&form, &cfg.cliff_options())?;
            doc.insert("equal".into(), json!(equal));
            if !equal {
                exit = 1;
            }
        }
        Verb::Hyperbolic { rank } => {
            let (tate, trivial) = hyperbolic_triviality(*rank, &cfg.cliff_options())?;
            doc.insert("even".into(), json!(tate.0));
            doc.insert("odd".into(), json!(tate.1));
            doc.insert("trivial".into(), json!(trivial));
        }
    }

    doc.insert("provenance".into(), provenance(echo, &cfg));
    if exit == 0 {
        if let Some(false) = stabilized_flag {
            exit = 2;
        }
    }
    Ok((Value::Object(doc), exit))
}

/// Renders a JSON object as an aligned two-column table.
pub fn render_table(v: &Value) -> String {
    let mut rows: Vec<(String, String)> = Vec::new();
    if let Value::Object(map) = v {
        for (k, val) in map {
            if k == "provenance" {
                continue;
            }
            rows.push((k.clone(), compact(val)));
        }
    } else {
        rows.push(("value".into(), compact(v)));
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:width$}  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).unwrap_or_else(|_| v.to_string())
}

/// Entry point shared by the binary and the tests: parses args, runs, prints.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone + std::fmt::Debug,
{
    let argv: Vec<std::ffi::OsString> = args.into_iter().map(|a| a.into()).collect();
    // Echo with the bare program name so output does not depend on the
    // binary's path.
    let echo = std::iter::once("mfkit".to_string())
        .chain(argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()))
        .collect::<Vec<_>>()
        .join(" ");
    let cli = match Cli::try_parse_from(argv.clone()) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version with its own formatting
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli, &echo) {
        Ok((doc, code)) => {
            if cli.table {
                println!("{}", render_table(&doc));
            } else {
                println!("{}", serde_json::to_string_pretty(&doc).expect("valid json"));
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_argv(args: &[&str]) -> (Value, i32) {
        let echo = args.join(" ");
        let cli = Cli::try_parse_from(args).expect("parse");
        run(&cli, &echo).expect("run")
    }

    #[test]
    fn milnor_verb() {
        let (doc, code) = run_argv(&["mfkit", "milnor", "x^3+y^3"]);
        assert_eq!(code, 0);
        assert_eq!(doc["milnor"], json!(4));
        assert_eq!(doc["stabilized"], json!(true));
    }

    #[test]
    fn ext_self_stab() {
        let (doc, code) = run_argv(&["mfkit", "ext", "--self", "stab", "x^2"]);
        assert_eq!(code, 0);
        assert_eq!(doc["even"], json!(1));
        assert_eq!(doc["odd"], json!(1));
    }

    #[test]
    fn non_isolated_exits_two() {
        let (_, code) = run_argv(&["mfkit", "milnor", "x^2*y"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn validate_roundtrip_and_reject() {
        let dir = std::env::temp_dir().join(format!("mfkit-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("k.mf.json");
        // Write the Knorrer double of stab(x^2), then re-validate it.
        let (doc, code) = run_argv(&["mfkit", "knorrer", "stab", "x^2"]);
        assert_eq!(code, 0);
        std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        let (doc2, code2) = run_argv(&["mfkit", "validate", path.to_str().unwrap()]);
        assert_eq!(code2, 0, "{doc2:?}");
        assert_eq!(doc2["valid"], json!(true));
        // Corrupt an entry: must fail with the factorization-identity error.
        let bad = std::fs::read_to_string(&path).unwrap().replace("x^2", "x^3");
        std::fs::write(&path, bad).unwrap();
        let cli = Cli::try_parse_from(["mfkit", "validate", path.to_str().unwrap()]).unwrap();
        let err = run(&cli, "validate").unwrap_err();
        assert!(err.to_string().contains("factorization identity fails at"));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn json_keys_are_sorted() {
        let (doc, _) = run_argv(&["mfkit", "milnor", "x^2"]);
        let text = serde_json::to_string(&doc).unwrap();
        let d = text.find("\"D_used\"").unwrap();
        let m = text.find("\"milnor\"").unwrap();
        let s = text.find("\"stabilized\"").unwrap();
        assert!(d < m && m < s);
    }

    #[test]
    fn table_mode_renders() {
        let (doc, _) = run_argv(&["mfkit", "milnor", "x^4"]);
        let table = render_table(&doc);
        assert!(table.contains("milnor"));
        assert!(table.contains('3'));
    }

    #[test]
    fn clifford_compare_verb() {
        let (doc, code) = run_argv(&["mfkit", "clifford-compare", "--quadric", "x*y"]);
        assert_eq!(code, 0);
        assert_eq!(doc["equal"], json!(true));
        let (doc, _) = run_argv(&["mfkit", "hyperbolic", "1"]);
        assert_eq!(doc["trivial"], json!(true));
    }

    #[test]
    fn field_and_env_parsing() {
        assert!(parse_field("Q").is_ok());
        assert!(parse_field("fp:7").is_ok());
        assert!(parse_field("fp:6").is_err());
        assert!(parse_field("r").is_err());
    }
}
