//! `dpt`: JSON/CSV front end to `dptorsion` and the acceptance runner.

pub mod accept;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use dptorsion::borcherds::{
    self, compare_quasi_pullback, default_y_norm, heegner_exponent_scan, norm_from_eval, phi_eval, phi_eval_to_bound,
    sample_tube_points, EvalResult, TubePoint,
};
use dptorsion::delpezzo::{blow_down, minus_one_classes_by_squares, model, DelPezzoModel, Variant};
use dptorsion::ehgeometry::{
    chern2_radial_integral, eh_metric, eh_potential, exceptional_restriction_check, positivity_probe,
    quasi_isometry_bounds, annulus_grid, ConePoint, Cutoff,
};
use dptorsion::invariants::{
    bcov_comparison_ratio, c2_integrals, chi_orb, chi_orb_from_fixed_locus, log_tau_k, tau_bcov_from_tau_k,
    tau_k_from_tau_m, tau_m_assemble, InvariantInputs, TauMInputs,
};
use dptorsion::lattice::{embedding_search, lambda_k, Lattice, SearchOptions};
use dptorsion::qseries::{CoefficientTable, QExponent};
use dptorsion::spectral::{
    bcov_surface_identity, bost_scaling_exponent, cone_divergence_fit, cone_zeta_derivative, p1_torsion_zeta,
    ConeZetaParams, HodgeSpectrum,
};

use accept::fl;
use config::{parse_list, FlatConfig};

pub const SCHEMA: &str = "dpt-report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dpt", version, about = "Borcherds products, Eguchi-Hanson numerics and torsion identities")]
pub struct RunConfig {
    /// Random seed for every sampled quantity.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Borcherds exponent series c_k^(0), c_k^(1).
    Coeffs(CoeffsArgs),
    /// Lattices Λ_k(2) and their K3 embeddings.
    #[command(subcommand)]
    Lat(LatCmd),
    /// Del Pezzo Picard models.
    #[command(subcommand)]
    Dp(DpCmd),
    /// The Borcherds product Φ.
    #[command(subcommand)]
    Phi(PhiCmd),
    /// Eguchi-Hanson metric checks.
    #[command(subcommand)]
    Eh(EhCmd),
    /// Zeta functions and torsion identities.
    #[command(subcommand)]
    Spec(SpecCmd),
    /// Invariant assembly.
    #[command(subcommand)]
    Inv(InvCmd),
    /// Run the acceptance suite.
    Accept(AcceptArgs),
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub k: u32,
    /// Exclusive upper bound on the exponent.
    #[arg(long, default_value_t = 10)]
    pub order: i64,
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct LatArgs {
    #[arg(long)]
    pub k: u32,
    /// Use the even Lorentzian factor U (degree-8 slot only).
    #[arg(long)]
    pub even: bool,
}

#[derive(Debug, Subcommand)]
pub enum LatCmd {
    /// Gram matrix, rank, signature and discriminant of Λ_k.
    Info(LatArgs),
    /// Embed Λ_k(2) into the K3 lattice and describe the complement.
    Embed(LatArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub degree: u32,
    #[arg(long, default_value = "generic")]
    pub variant: Variant,
}

#[derive(Debug, Subcommand)]
pub enum DpCmd {
    /// Picard lattice, c1, (−1)-classes and effective generators.
    Info(ModelArgs),
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated rationals in the Picard basis.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    /// Fixed truncation cap on ⟨α, y⟩.
    #[arg(long, conflicts_with = "bound")]
    pub cap: Option<String>,
    /// Smallest cap reaching this truncation bound.
    #[arg(long)]
    pub bound: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 5)]
    pub points: usize,
    #[arg(long, default_value_t = accept::PHI_BOUND)]
    pub bound: f64,
}

#[derive(Debug, Args)]
pub struct HeegnerArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 6)]
    pub height: i64,
    /// Include every wall in the output, not only the summary.
    #[arg(long)]
    pub rows: bool,
}

#[derive(Debug, Subcommand)]
pub enum PhiCmd {
    /// log Φ(x + iy) with its truncation bound.
    Eval(PointArgs),
    /// Petersson norm ⟨y,y⟩^{4+k}|Φ|².
    Norm(PointArgs),
    /// Translation and Weyl/Cremona symmetry at sampled points.
    Check(SampleArgs),
    /// Φ_small / QP(Φ_big) for the blow-up pair with this small end.
    Qpb(SampleArgs),
    /// Total exponent along each norm −1 wall up to a height.
    Heegner(HeegnerArgs),
}

#[derive(Debug, Args)]
pub struct EhArgs {
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 40.0)]
    pub rmax: f64,
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    #[arg(long, default_value = "smoothstep7")]
    pub cutoff: String,
}

#[derive(Debug, Subcommand)]
pub enum EhCmd {
    /// Monge-Ampère, scaling and exceptional-curve checks.
    Check(EhArgs),
    /// ∫c₂ over C²/±1 by radial quadrature.
    Chern2(EhArgs),
    /// Empirical positivity threshold ε(ρ) on a geometric ε grid.
    Probe(EhArgs),
}

#[derive(Debug, Subcommand)]
pub enum SpecCmd {
    /// ζ(0), ζ′(0) and τ of the P¹ spectrum c·k(k+1).
    P1 {
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// ζ′_δ(0) of the flat cone and the ln δ divergence fit.
    Cone {
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value = "0.1,0.01,0.001,0.0001")]
        delta: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Coefficient of log λ in log τ(λg)/τ(g).
    Bost {
        #[arg(long)]
        d: i64,
        /// h^{0,q}, q = 0..=d.
        #[arg(long)]
        h0: String,
        /// ∫ Td′(TX) as a rational.
        #[arg(long, allow_hyphen_values = true)]
        td: String,
    },
    /// BCOV identity T = τ^{−2} on random synthetic Hodge spectra.
    BcovSurface {
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum InvCmd {
    /// Assemble τ_k from a flat config file.
    TauK {
        #[arg(long)]
        config: std::path::PathBuf,
    },
    /// Assemble τ_M from a flat config file.
    TauM {
        #[arg(long)]
        config: std::path::PathBuf,
        #[arg(long)]
        k: Option<i64>,
    },
    /// τ_BCOV = τ_k^{−2}.
    TauBcov {
        #[arg(long)]
        tau_k: f64,
    },
    /// Lattice factor of the BCOV comparison, up to C(k)^8.
    Compare {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        disc_x: i64,
        #[arg(long)]
        disc_xt: Option<i64>,
        #[arg(long, default_value_t = 1)]
        coker_q: i64,
        #[arg(long, default_value_t = 1)]
        coker_qt: i64,
    },
    /// Orbifold Euler number, directly and from the fixed locus.
    ChiOrb {
        #[arg(long)]
        k: i64,
    },
    /// Exact ∫c₂ on Y and X.
    C2 {
        #[arg(long)]
        k: i64,
    },
}

#[derive(Debug, Args)]
pub struct AcceptArgs {
    /// Run only these criteria (comma-separated ids).
    #[arg(long)]
    pub only: Option<String>,
}

/// What a command produced.
pub enum Output {
    Json(Value),
    Text(String),
}

pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(m: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: m.into() }
    }
}

fn u<E: std::fmt::Display>(e: E) -> Failure {
    Failure::usage(e.to_string())
}

/// Parses `argv` (program name first), runs the command and writes its
/// report.  Returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let (out, code) = match execute(&cfg) {
        Ok(r) => r,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            return f.code;
        }
    };
    let text = match out {
        Output::Json(v) => {
            let mut s = serde_json::to_string_pretty(&v).expect("serializable report");
            s.push('\n');
            s
        }
        Output::Text(s) => s,
    };
    let written = match &cfg.output {
        Some(p) => std::fs::write(p, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write report: {e}");
        return EXIT_USAGE;
    }
    code
}

fn envelope(command: &str, seed: u64, result: Value) -> Value {
    json!({ "schema": SCHEMA, "command": command, "seed": seed, "result": result })
}

fn ok(command: &str, cfg: &RunConfig, v: Value) -> Result<(Output, i32), Failure> {
    Ok((Output::Json(envelope(command, cfg.seed, v)), EXIT_OK))
}

pub fn execute(cfg: &RunConfig) -> Result<(Output, i32), Failure> {
    match &cfg.command {
        Command::Coeffs(a) => coeffs(cfg, a),
        Command::Lat(c) => lat(cfg, c),
        Command::Dp(DpCmd::Info(a)) => ok("dp info", cfg, dp_info(&load_model(a)?)),
        Command::Phi(c) => phi(cfg, c),
        Command::Eh(c) => eh(cfg, c),
        Command::Spec(c) => spec(cfg, c),
        Command::Inv(c) => inv(cfg, c),
        Command::Accept(a) => run_accept(cfg, a),
    }
}

// ---------------------------------------------------------------- coeffs, lat, dp

fn coeffs(cfg: &RunConfig, a: &CoeffsArgs) -> Result<(Output, i32), Failure> {
    let t = CoefficientTable::new(a.k, QExponent::integer(a.order)).map_err(u)?;
    if a.csv {
        return Ok((Output::Text(t.to_csv()), EXIT_OK));
    }
    let terms = |s: &dptorsion::qseries::QSeries| -> Vec<Value> {
        s.iter().map(|(e, c)| json!([e.to_string(), c.to_string()])).collect()
    };
    ok(
        "coeffs",
        cfg,
        json!({ "k": a.k, "order": a.order.to_string(), "c0": terms(t.c0()), "c1": terms(t.c1()) }),
    )
}

fn lat(cfg: &RunConfig, c: &LatCmd) -> Result<(Output, i32), Failure> {
    let (a, embed) = match c {
        LatCmd::Info(a) => (a, false),
        LatCmd::Embed(a) => (a, true),
    };
    if !(1..=9).contains(&a.k) || (a.even && a.k != 8) {
        return Err(Failure::usage("k must lie in 1..=9; --even requires k = 8"));
    }
    let l = lambda_k(a.k, a.even);
    let sig = l.signature();
    let mut v = json!({
        "lattice": l.name,
        "rank": l.rank().to_string(),
        "signature": [sig.positive.to_string(), sig.negative.to_string()],
        "discriminant": l.discriminant().to_string(),
        "gram": gram_json(l.gram()),
    });
    if embed {
        let src = l.rescale(2).map_err(u)?;
        let emb = embedding_search(&src, &Lattice::k3(), SearchOptions::default()).map_err(u)?;
        let (comp, _) = emb.orthogonal_complement().map_err(u)?;
        v["embedding"] = json!({
            "images": emb.images().iter().map(|x| x.0.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "verified": emb.verify(),
            "primitive": emb.is_primitive().map_err(u)?,
            "complement_rank": comp.rank().to_string(),
            "complement_disc": comp.discriminant().abs().to_string(),
        });
    }
    ok(if embed { "lat embed" } else { "lat info" }, cfg, v)
}

fn gram_json(g: &[Vec<i64>]) -> Value {
    json!(g.iter().map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn vec_json(v: &[i64]) -> Value {
    json!(v.iter().map(|c| c.to_string()).collect::<Vec<_>>())
}

fn load_model(a: &ModelArgs) -> Result<DelPezzoModel, Failure> {
    model(a.degree, a.variant).map_err(u)
}

fn dp_info(m: &DelPezzoModel) -> Value {
    json!({
        "degree": m.degree,
        "variant": m.variant.to_string(),
        "picard": m.picard.name,
        "gram": gram_json(m.picard.gram()),
        "c1": vec_json(&m.c1.0),
        "minus_one_classes": m.minus_one_classes.len().to_string(),
        "minus_one_classes_by_squares": minus_one_classes_by_squares(m).len().to_string(),
        "eff_generators": m.eff_generators.iter().map(|g| vec_json(&g.0)).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------- phi

fn parse_rationals(s: &str) -> Result<Vec<BigRational>, Failure> {
    parse_list::<BigRational>(s).map_err(Failure::usage)
}

/// JSON has no infinities; non-finite floats become strings.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn eval_json(m: &DelPezzoModel, z: &TubePoint, r: &EvalResult) -> Value {
    let n = norm_from_eval(m, z, r);
    json!({
        "log_value": { "re": r.log_value.re, "im": r.log_value.im, "tol": num(r.total_bound()) },
        "value": { "re": r.value.re, "im": r.value.im },
        "truncation_bound": num(r.truncation_bound),
        "rounding_bound": r.rounding_bound,
        "bound": num(r.total_bound()),
        "cap": r.cap_used.to_string(),
        "terms": r.terms_used.to_string(),
        "flags": r.flags,
        "log_norm_sq": { "value": n.log_norm_sq, "tol": num(n.bound) },
    })
}

fn phi(cfg: &RunConfig, c: &PhiCmd) -> Result<(Output, i32), Failure> {
    match c {
        PhiCmd::Eval(a) | PhiCmd::Norm(a) => {
            let m = load_model(&a.model)?;
            let z = TubePoint::new(&m, parse_rationals(&a.x)?, parse_rationals(&a.y)?).map_err(u)?;
            let r = match (&a.cap, a.bound) {
                (Some(cap), _) => phi_eval(&m, &z, &BigRational::from_str(cap).map_err(|_| Failure::usage("bad --cap"))?),
                (None, Some(b)) => phi_eval_to_bound(&m, &z, b),
                (None, None) => phi_eval_to_bound(&m, &z, accept::PHI_BOUND),
            }
            .map_err(u)?;
            let name = if matches!(c, PhiCmd::Eval(_)) { "phi eval" } else { "phi norm" };
            ok(name, cfg, eval_json(&m, &z, &r))
        }
        PhiCmd::Check(a) => {
            let m = load_model(&a.model)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let pts = sample_tube_points(&m, a.points, rng.gen(), &default_y_norm(&m));
            let mut rows = Vec::new();
            let mut all = true;
            for z in &pts {
                let cap = phi_eval_to_bound(&m, z, a.bound).map_err(u)?.cap_used;
                let lambda = accept::even_translation(&m, &mut rng);
                let t = borcherds::translation_check(&m, z, &lambda, &cap).map_err(u)?;
                all &= t.passed;
                let mut row = json!({ "y": rat_list(&z.y), "x": rat_list(&z.x), "cap": cap.to_string(), "translation": t });
                if let Some(s) = default_symmetry(&m) {
                    let w = borcherds::weyl_symmetry_check(&m, z, &s, &cap).map_err(u)?;
                    all &= w.passed;
                    row["symmetry"] = json!(w);
                }
                rows.push(row);
            }
            ok("phi check", cfg, json!({ "degree": m.degree, "variant": m.variant.to_string(), "passed": all, "points": rows }))
        }
        PhiCmd::Qpb(a) => {
            let bd = blow_down(a.model.degree, a.model.variant).map_err(u)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let pts = sample_tube_points(&bd.small, a.points, rng.gen(), &default_y_norm(&bd.small));
            let r = compare_quasi_pullback(&bd, &pts, a.bound).map_err(u)?;
            ok(
                "phi qpb",
                cfg,
                json!({
                    "small": format!("{}({})", bd.small.degree, bd.small.variant),
                    "big": format!("{}({})", bd.big.degree, bd.big.variant),
                    "ratios": r.ratios.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
                    "mean_ratio": [r.mean_ratio.re, r.mean_ratio.im],
                    "spread": r.spread,
                    "max_bound": r.max_bound,
                }),
            )
        }
        PhiCmd::Heegner(a) => {
            let m = load_model(&a.model)?;
            let scan = heegner_exponent_scan(&m, a.height).map_err(u)?;
            let mut hist = std::collections::BTreeMap::<String, usize>::new();
            for r in &scan {
                *hist.entry(r.exponent.clone()).or_default() += 1;
            }
            let mut v = json!({
                "degree": m.degree, "variant": m.variant.to_string(), "height": a.height.to_string(),
                "walls": scan.len().to_string(),
                "exponent_histogram": hist.into_iter().map(|(e, n)| json!([e, n.to_string()])).collect::<Vec<_>>(),
            });
            if a.rows {
                v["rows"] = json!(scan);
            }
            ok("phi heegner", cfg, v)
        }
    }
}

fn rat_list(v: &[BigRational]) -> Value {
    json!(v.iter().map(|c| c.to_string()).collect::<Vec<_>>())
}

fn default_symmetry(m: &DelPezzoModel) -> Option<Vec<Vec<i64>>> {
    match m.variant {
        Variant::Sigma0 => Some(vec![vec![0, 1], vec![1, 0]]),
        Variant::Generic if m.rank() >= 4 => Some(dptorsion::delpezzo::cremona_isometry(m, 1, 2, 3)),
        Variant::Generic => {
            let n = m.rank() - 1;
            let perm: Vec<usize> = (1..=n).rev().collect();
            Some(dptorsion::delpezzo::permutation_isometry(m, &perm))
        }
        _ => None,
    }
}

// ---------------------------------------------------------------- eh

fn cutoff(s: &str) -> Result<Cutoff, Failure> {
    match s.to_ascii_lowercase().as_str() {
        "smoothstep7" | "poly" => Ok(Cutoff::Smoothstep7),
        "smooth" | "exp" => Ok(Cutoff::Smooth),
        _ => Err(Failure::usage(format!("unknown cutoff '{s}'"))),
    }
}

fn eh(cfg: &RunConfig, c: &EhCmd) -> Result<(Output, i32), Failure> {
    match c {
        EhCmd::Check(a) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut det: f64 = 0.0;
            let mut pot: f64 = 0.0;
            for _ in 0..200 {
                let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let z = ConePoint::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])).map_err(u)?;
                det = det.max((eh_metric(&z, a.eps).map_err(u)?.det() - 1.0).abs());
                let d: f64 = rng.gen_range(0.2..2.0);
                let l = eh_potential(&z.scale(d), a.eps);
                let r = d * d * eh_potential(&z, a.eps / (d * d));
                pot = pot.max((l - r).abs() / l.abs().max(r.abs()));
            }
            let ts: Vec<Complex64> = [0.0, 0.5, 1.0, 2.0].iter().map(|&t| Complex64::new(t, 0.0)).collect();
            let exc = exceptional_restriction_check(a.eps, &ts).map_err(u)?;
            let radii = annulus_grid(a.delta, 81);
            let (lo, hi) = quasi_isometry_bounds(a.eps.min(a.delta * a.delta * 0.01), a.delta, cutoff(&a.cutoff)?, &radii)
                .map_err(u)?;
            ok(
                "eh check",
                cfg,
                json!({
                    "eps": a.eps,
                    "det_max_deviation": fl(det, 1e-8),
                    "potential_scaling": fl(pot, 1e-10),
                    "exceptional": exc,
                    "quasi_isometry": { "lower": lo, "upper": hi },
                }),
            )
        }
        EhCmd::Chern2(a) => {
            let r = chern2_radial_integral(a.eps, a.rmax, a.grid).map_err(u)?;
            ok("eh chern2", cfg, json!({ "report": r, "value": fl(r.value, r.richardson_diff.abs().max(1e-6)) }))
        }
        EhCmd::Probe(a) => {
            let grid: Vec<f64> = (0..a.grid.min(40)).map(|i| 1e-3 * 2f64.powi(i as i32)).collect();
            let r = positivity_probe(cutoff(&a.cutoff)?, a.delta, &grid).map_err(u)?;
            ok("eh probe", cfg, json!({ "report": r, "note": "threshold depends on the sampled grid" }))
        }
    }
}

// ---------------------------------------------------------------- spec

fn spec(cfg: &RunConfig, c: &SpecCmd) -> Result<(Output, i32), Failure> {
    match c {
        SpecCmd::P1 { c } => {
            let t = p1_torsion_zeta(*c, 60).map_err(u)?;
            ok("spec p1", cfg, json!({ "c": c, "zeta0": fl(t.zeta0, 1e-12), "zeta_prime0": fl(t.zeta_prime0, 1e-12), "tau": t.tau }))
        }
        SpecCmd::Cone { n, delta, tol } => {
            let ds: Vec<f64> = parse_list(delta).map_err(Failure::usage)?;
            let rows = ds
                .iter()
                .map(|&d| cone_zeta_derivative(&ConeZetaParams { n: *n, delta: d, tol: *tol }))
                .collect::<Result<Vec<_>, _>>()
                .map_err(u)?;
            let mut v = json!({ "n": n, "points": rows });
            if ds.len() >= 2 {
                let fit = cone_divergence_fit(*n, &ds, *tol).map_err(u)?;
                v["fit"] = json!(fit);
            }
            ok("spec cone", cfg, v)
        }
        SpecCmd::Bost { d, h0, td } => {
            let h: Vec<i64> = parse_list(h0).map_err(Failure::usage)?;
            let td = BigRational::from_str(td).map_err(|_| Failure::usage("bad --td"))?;
            let e = bost_scaling_exponent(*d, &h, &td).map_err(u)?;
            ok("spec bost", cfg, json!({ "d": d, "exponent": e.to_string(), "approx": e.to_f64() }))
        }
        SpecCmd::BcovSurface { count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut rows = Vec::new();
            let mut equal = 0usize;
            for _ in 0..*count {
                let s = HodgeSpectrum::random(&mut rng);
                let r = bcov_surface_identity(&s).map_err(u)?;
                equal += r.equal as usize;
                rows.push(json!({ "lhs": r.lhs.to_string(), "rhs": r.rhs.to_string() }));
            }
            ok("spec bcov-surface", cfg, json!({ "count": count.to_string(), "equal": equal.to_string(), "samples": rows }))
        }
    }
}

// ---------------------------------------------------------------- inv

fn read_config(p: &std::path::Path) -> Result<FlatConfig, Failure> {
    let text = std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
    FlatConfig::parse(&text).map_err(Failure::usage)
}

fn inputs_from(c: &FlatConfig) -> Result<InvariantInputs, String> {
    Ok(InvariantInputs {
        k: c.get("k")?,
        tau_y_gamma: c.get("tau_y_gamma")?,
        vol_y_gamma: c.get("vol_y_gamma")?,
        xi_l1_norm: c.get("xi_l1_norm")?,
        singular_ratios: c.get_list("singular_ratios")?,
        bott_chern_integral: c.get_or("bott_chern_integral", 0.0)?,
    })
}

fn inv(cfg: &RunConfig, c: &InvCmd) -> Result<(Output, i32), Failure> {
    match c {
        InvCmd::TauK { config } => {
            let inp = inputs_from(&read_config(config)?).map_err(Failure::usage)?;
            let l = log_tau_k(&inp).map_err(u)?;
            let tol = 1e-12 * (1.0 + l.abs());
            ok("inv tau-k", cfg, json!({ "inputs": inp, "log_tau_k": fl(l, tol), "tau_k": l.exp() }))
        }
        InvCmd::TauM { config, k } => {
            let c = read_config(config)?;
            let inp = (|| -> Result<TauMInputs, String> {
                Ok(TauMInputs {
                    volume: c.get("volume")?,
                    equivariant_torsion: c.get("equivariant_torsion")?,
                    torsion: c.get("torsion")?,
                    fixed_curve_volume: c.get("fixed_curve_volume")?,
                    a_m: c.get_or("a_m", 1.0)?,
                    r_m: c.get("r_m")?,
                })
            })()
            .map_err(Failure::usage)?;
            let t = tau_m_assemble(&inp).map_err(u)?;
            let mut v = json!({ "inputs": inp, "tau_m": t });
            if let Some(k) = k {
                v["tau_k"] = json!(tau_k_from_tau_m(*k, t).map_err(u)?);
            }
            ok("inv tau-m", cfg, v)
        }
        InvCmd::TauBcov { tau_k } => {
            let t = tau_bcov_from_tau_k(*tau_k).map_err(u)?;
            ok("inv tau-bcov", cfg, json!({ "tau_k": tau_k, "tau_bcov": t }))
        }
        InvCmd::Compare { k, disc_x, disc_xt, coker_q, coker_qt } => {
            let r = bcov_comparison_ratio(*k, *disc_x, *disc_xt, *coker_q, *coker_qt).map_err(u)?;
            ok(
                "inv compare",
                cfg,
                json!({
                    "k": k, "numeric": r.numeric.to_string(), "symbol": r.symbol,
                    "disc_plus_xtilde": r.disc_plus_xtilde.to_string(),
                    "r": r.r.to_string(), "r_tilde": r.r_tilde.to_string(),
                }),
            )
        }
        InvCmd::ChiOrb { k } => {
            let a = chi_orb(*k).map_err(u)?;
            let b = chi_orb_from_fixed_locus(*k).map_err(u)?;
            ok("inv chi-orb", cfg, json!({ "k": k, "chi_orb": a.to_string(), "from_fixed_locus": b.to_string() }))
        }
        InvCmd::C2 { k } => {
            let c = c2_integrals(*k).map_err(u)?;
            ok(
                "inv c2",
                cfg,
                json!({
                    "k": k,
                    "int_c2_y_over_24": c.int_c2_y_over_24.to_string(),
                    "int_c2_y": c.int_c2_y.to_string(),
                    "int_c2_x": c.int_c2_x.to_string(),
                }),
            )
        }
    }
}

// ---------------------------------------------------------------- accept

fn run_accept(cfg: &RunConfig, a: &AcceptArgs) -> Result<(Output, i32), Failure> {
    let ids: Vec<u32> = match &a.only {
        Some(s) => parse_list(s).map_err(Failure::usage)?,
        None => (1..=accept::CRITERIA).collect(),
    };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > accept::CRITERIA) {
        return Err(Failure::usage(format!("no criterion {bad}")));
    }
    let outcomes: Vec<_> = ids.iter().map(|&i| accept::run_criterion(i, cfg.seed)).collect();
    for o in &outcomes {
        eprintln!("{}", o.line());
    }
    let code = if outcomes.iter().all(|o| o.passed) { EXIT_OK } else { EXIT_FAILED };
    Ok((Output::Json(envelope("accept", cfg.seed, accept::report(cfg.seed, &outcomes))), code))
}
