//! Batch command-line frontend. Every subcommand is a thin adapter
//! over the library: outputs equal direct library calls at the same
//! configuration. One JSON object (or a flattened CSV table) goes to
//! standard output; exit codes are 2 for precision failures, 3 for
//! invalid input, 4 for domain errors.

mod report;
mod seriesio;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use report::{to_csv, Report};
use serde_json::{json, Value};
use siegel_core::brjuno::{
    brjuno_minimize, brjuno_partial, height_bound, siegel_radius_bound, BrjunoVariant,
    HeightRegime,
};
use siegel_core::dioph::{
    dc_check, dc_estimate, dual_form_check, prop53_envelope_check, select_word_appendix,
    transference_forward, transference_inverse, SelectorMode,
};
use siegel_core::error::{Error, Result};
use siegel_core::gauss::{gauss_orbit, RotationVector};
use siegel_core::germs::{
    commutator_residual, linearize, radius_estimate_vs_bound, simultaneous_check,
    synth_commuting_family, PowerSeriesGerm, RadiusEstimate,
};
use siegel_core::parse::{parse_exact_real, parse_exact_real_list, parse_rational};
use siegel_core::scalar::{ConstantsConfig, RealScalar};
use siegel_core::series::Series;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "siegel", version, about = "Gauss maps, Brjuno sums, Diophantine scans and germ linearization with certified numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Working precision for enclosures, in bits
    #[arg(long, global = true, default_value_t = 128)]
    precision_bits: u32,

    /// Cap for precision escalation
    #[arg(long, global = true, default_value_t = 4096)]
    max_precision_bits: u32,

    /// Emit JSON (the default)
    #[arg(long, global = true)]
    json: bool,

    /// Emit a flattened CSV table instead of JSON
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,

    /// Worker threads for scans (0 = library default)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Tolerance for series residual checks
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Height-function additive constant
    #[arg(long, global = true, default_value = "0")]
    c_univ: String,

    /// Height-bound additive constant; defaults to 4*(c_univ + 1)
    #[arg(long, global = true)]
    c_prime: Option<String>,

    /// Radius-bound prefactor
    #[arg(long, global = true, default_value = "1")]
    c_radius: String,

    /// Write the report to a file instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    B,
    Bprime,
}

impl From<VariantArg> for BrjunoVariant {
    fn from(v: VariantArg) -> BrjunoVariant {
        match v {
            VariantArg::B => BrjunoVariant::B,
            VariantArg::Bprime => BrjunoVariant::BPrime,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegimeArg {
    Log,
    Loglog,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Proof,
    Greedy,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the Gauss map along an explicit word
    GaussOrbit {
        /// Comma-separated exact reals, e.g. "(0+1*sqrt(2))/1-1,golden"
        #[arg(long)]
        alphas: String,
        /// Comma-separated pivot indices, 1-based
        #[arg(long)]
        word: String,
    },
    /// Partial sum of a Brjuno-type function along a word
    Brjuno {
        #[arg(long)]
        alphas: String,
        /// Explicit word (overrides --word-policy)
        #[arg(long)]
        word: Option<String>,
        /// constant:<j> | greedy | appendix:<C>,<tau>
        #[arg(long)]
        word_policy: Option<String>,
        /// Word length for policies
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = VariantArg::B)]
        variant: VariantArg,
        /// Starting pivot for policy-generated words
        #[arg(long, default_value_t = 1)]
        start_w: usize,
    },
    /// Exact finite-depth minimization of the partial sum over words
    BrjunoMin {
        #[arg(long)]
        alphas: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::B)]
        variant: VariantArg,
    },
    /// Arithmetic height bound along a word
    HeightBound {
        #[arg(long)]
        alphas: String,
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        word_policy: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = RegimeArg::Log)]
        regime: RegimeArg,
        #[arg(long, default_value_t = 1)]
        start_w: usize,
    },
    /// Radius bound C_radius * exp(-2 pi b)
    RadiusBound {
        /// The sum value b (rational or decimal)
        #[arg(long)]
        b: String,
    },
    /// Class membership scan up to Q_max
    DcCheck {
        #[arg(long)]
        alphas: String,
        /// Class constant C
        #[arg(long)]
        c: String,
        #[arg(long)]
        tau: String,
        #[arg(long, default_value_t = 100_000)]
        q_max: u64,
    },
    /// Empirical best class constant up to Q_max
    DcEstimate {
        #[arg(long)]
        alphas: String,
        #[arg(long)]
        tau: String,
        #[arg(long, default_value_t = 100_000)]
        q_max: u64,
    },
    /// Dual linear-form scan over integer vectors of sup norm <= K_max
    DualCheck {
        #[arg(long)]
        alphas: String,
        /// Dual class constant C'
        #[arg(long)]
        c: String,
        #[arg(long)]
        tau_prime: String,
        #[arg(long, default_value_t = 100)]
        k_max: u64,
    },
    /// Transference between the simultaneous and dual exponents
    Transference {
        #[arg(long)]
        n: u32,
        /// Forward: returns tau' = N tau + N - 1
        #[arg(long)]
        tau: Option<String>,
        /// Inverse: returns tau = (tau' + 1 - N)/N
        #[arg(long, conflicts_with = "tau")]
        tau_prime: Option<String>,
    },
    /// Constructive word selection with the fitted constant ledger
    WordAppendix {
        #[arg(long)]
        alphas: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        tau: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Proof)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        start_w: usize,
    },
    /// Solve the linearization recursion for one germ
    Linearize {
        /// Rotation number (exact real syntax)
        #[arg(long)]
        alpha: String,
        /// Tail coefficients as index-annotated [re, im] pairs
        /// (inline JSON or @file); empty means a rigid rotation
        #[arg(long)]
        coeffs: Option<String>,
        #[arg(long, default_value_t = 64)]
        order: usize,
    },
    /// Synthesize a commuting family h0 o R_alpha o h0^{-1}
    Synth {
        /// Conjugacy tail coefficients (n >= 2); default z + 0.1 z^2
        #[arg(long)]
        h0: Option<String>,
        #[arg(long)]
        alphas: String,
        #[arg(long, default_value_t = 64)]
        order: usize,
    },
    /// Check whether one conjugacy linearizes a whole family
    SimulCheck {
        /// JSON array of {"alpha": ..., "coeffs": [...]} (inline or @file)
        #[arg(long)]
        germs: String,
        #[arg(long, default_value_t = 64)]
        order: usize,
    },
    /// Empirical Siegel radius against the arithmetic bound
    RadiusCompare {
        #[arg(long)]
        alphas: String,
        /// Conjugacy tail coefficients; default z + 0.1 z^2
        #[arg(long)]
        h0: Option<String>,
        #[arg(long, default_value_t = 64)]
        order: usize,
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        word_policy: Option<String>,
        #[arg(long, default_value_t = 60)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::B)]
        variant: VariantArg,
        #[arg(long, default_value_t = 1)]
        start_w: usize,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    let t0 = Instant::now();
    match run(&cli) {
        Ok(report) => {
            let value = report.finish(t0.elapsed().as_secs_f64() * 1e3);
            let text = if cli.csv {
                to_csv(&value)
            } else {
                let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
                s.push('\n');
                s
            };
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        std::process::exit(4);
                    }
                }
                None => print!("{text}"),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PrecisionExhausted { .. } | Error::UndecidableAtPrecision { .. } => 2,
        Error::Parse(_) => 3,
        Error::Orbit { source, .. } => exit_code(source),
        _ => 4,
    }
}

fn constants(cli: &Cli) -> Result<ConstantsConfig> {
    let c_univ = parse_rational(&cli.c_univ)?;
    let c_prime = cli.c_prime.as_deref().map(parse_rational).transpose()?;
    let c_radius = parse_rational(&cli.c_radius)?;
    ConstantsConfig::new(c_univ, c_prime, c_radius)
}

/// Parses the alpha list, recording contract warnings for rational
/// coordinates (decimal literals are exact rationals).
fn rotation_vector(alphas: &str, bits: u32, rep: &mut Report) -> Result<RotationVector> {
    let parsed = parse_exact_real_list(alphas)?;
    for (i, x) in parsed.iter().enumerate() {
        if x.is_rational() {
            rep.warn(format!(
                "coordinate {} is rational; the irrational-independence contract is violated and exact ties may surface downstream",
                i + 1
            ));
        }
    }
    RotationVector::new(
        parsed
            .into_iter()
            .map(|x| RealScalar::from_exact_bits(x, bits))
            .collect(),
    )
}

fn parse_word(word: &str) -> Result<Vec<usize>> {
    word.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad word entry {t:?}")))
        })
        .collect()
}

/// Resolves a word from either an explicit list or a policy.
fn resolve_word(
    v: &RotationVector,
    word: Option<&str>,
    policy: Option<&str>,
    depth: Option<usize>,
    start_w: usize,
    bits: u32,
    max_bits: u32,
) -> Result<Vec<usize>> {
    if let Some(w) = word {
        return parse_word(w);
    }
    let policy = policy.ok_or_else(|| {
        Error::Parse("either --word or --word-policy is required".into())
    })?;
    let depth =
        depth.ok_or_else(|| Error::Parse("--depth is required with --word-policy".into()))?;
    if let Some(j) = policy.strip_prefix("constant:") {
        let j: usize = j
            .parse()
            .map_err(|_| Error::Parse(format!("bad constant policy {policy:?}")))?;
        return Ok(vec![j; depth]);
    }
    if policy == "greedy" {
        let one = num_rational::BigRational::from_integer(1.into());
        let trace = select_word_appendix(
            v,
            &one,
            &one,
            depth,
            SelectorMode::Greedy,
            start_w,
            bits,
            max_bits,
        )?;
        return Ok(trace.word);
    }
    if let Some(rest) = policy.strip_prefix("appendix:") {
        let (c_s, tau_s) = rest
            .split_once(',')
            .ok_or_else(|| Error::Parse("appendix policy needs C,tau".into()))?;
        let c = parse_rational(c_s)?;
        let tau = parse_rational(tau_s)?;
        let trace = select_word_appendix(
            v,
            &c,
            &tau,
            depth,
            SelectorMode::Proof,
            start_w,
            bits,
            max_bits,
        )?;
        return Ok(trace.word);
    }
    Err(Error::Parse(format!("unknown word policy {policy:?}")))
}

fn rational_json(r: &num_rational::BigRational) -> Value {
    use num_traits::ToPrimitive;
    if r.is_integer() {
        if let Some(i) = r.numer().to_i64() {
            return json!(i);
        }
    }
    json!({ "fraction": r.to_string(), "value": r.to_f64().unwrap_or(f64::NAN) })
}

fn radius_estimate_json(r: &RadiusEstimate) -> Value {
    match r {
        RadiusEstimate::Finite(x) => json!(x),
        RadiusEstimate::Infinite => json!("inf"),
    }
}

fn default_h0(m: usize) -> Series {
    let mut h = Series::identity(m);
    h.set_coeff(2, Complex64::new(0.1, 0.0));
    h
}

fn run(cli: &Cli) -> Result<Report> {
    let bits = cli.precision_bits;
    let max_bits = cli.max_precision_bits;
    if bits == 0 || bits > max_bits {
        return Err(Error::Parse(
            "--precision-bits must be positive and at most --max-precision-bits".into(),
        ));
    }
    match &cli.command {
        Command::GaussOrbit { alphas, word } => {
            let mut rep = Report::new("gauss-orbit");
            rep.input("alphas", alphas.clone());
            rep.input("word", word.clone());
            let v = rotation_vector(alphas, bits, &mut rep)?;
            let word = parse_word(word)?;
            let steps = gauss_orbit(&v, &word)?;
            let mut out = Vec::new();
            for step in &steps {
                out.push(json!({
                    "w": step.w,
                    "a": step.a.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "eps": step.eps,
                    "alpha_tilde": step.image.alphas().iter().map(|s| s.to_f64()).collect::<Vec<_>>(),
                    "hatted": step.hatted.iter().map(|s| s.to_f64()).collect::<Vec<_>>(),
                }));
            }
            if let Some(last) = steps.last() {
                for (i, c) in last.image.alphas().iter().enumerate() {
                    rep.enclosure(&format!("final_alpha_{}", i + 1), c);
                }
            }
            rep.set_result(json!({ "steps": out }));
            Ok(rep)
        }
        Command::Brjuno {
            alphas,
            word,
            word_policy,
            depth,
            variant,
            start_w,
        } => {
            let mut rep = Report::new("brjuno");
            rep.input("alphas", alphas.clone());
            rep.input("variant", format!("{variant:?}"));
            let v = rotation_vector(alphas, bits, &mut rep)?;
            let word = resolve_word(
                &v,
                word.as_deref(),
                word_policy.as_deref(),
                *depth,
                *start_w,
                bits,
                max_bits,
            )?;
            rep.input("word", json!(word));
            let sum = brjuno_partial(&v, &word, (*variant).into(), bits)?;
            rep.enclosure("value", &sum.value);
            rep.set_result(json!({
                "variant": format!("{variant:?}"),
                "depth": sum.depth,
                "value": sum.value.to_f64(),
                "terms": sum.terms.iter().map(|t| json!({
                    "depth": t.depth,
                    "pi": t.pi.to_f64(),
                    "term": t.term.to_f64(),
                })).collect::<Vec<_>>(),
            }));
            Ok(rep)
        }
        Command::BrjunoMin {
            alphas,
            depth,
            variant,
        } => {
            let mut rep = Report::new("brjuno-min");
            rep.input("alphas", alphas.clone());
            rep.input("depth", *depth);
            rep.input("variant", format!("{variant:?}"));
            let v = rotation_vector(alphas, bits, &mut rep)?;
            let res = brjuno_minimize(&v, *depth, (*variant).into(), bits, max_bits)?;
            rep.enclosure("best_value", &res.best_value);
            for (w, reason) in &res.excluded {
                rep.warn(format!("word {w:?} excluded: {reason}"));
            }
            rep.set_result(json!({
                "best_word": res.best_word,
                "best_value": res.best_value.to_f64(),
                "lower_bound_only": true,
                "nodes_expanded": res.nodes_expanded,
                "proof": res.proof,
            }));
            Ok(rep)
        }
        Command::HeightBound {
            alphas,
            word,
            word_policy,
            depth,
            regime,
            start_w,
        } => {
            let mut rep = Report::new("height-bound");
            rep.input("alphas", alphas.clone());
            rep.input("regime", format!("{regime:?}"));
            let consts = constants(cli)?;
            let v = rotation_vector(alphas, bits, &mut rep)?;
            let word = resolve_word(
                &v,
                word.as_deref(),
                word_policy.as_deref(),
                *depth,
                *start_w,
                bits,
                max_bits,
            )?;
            rep.input("word", json!(word));
            let regime = match regime {
                RegimeArg::Log => HeightRegime::Log,
                RegimeArg::Loglog => HeightRegime::LogLog,
            };
            let h = height_bound(&v, &word, regime, &consts, bits)?;
            rep.enclosure("height", &h);
            rep.set_result(json!({ "height": h.to_f64(), "depth": word.len() }));
            Ok(rep)
        }
        Command::RadiusBound { b } => {
            let mut rep = Report::new("radius-bound");
            rep.input("b", b.clone());
            let consts = constants(cli)?;
            let b_val = RealScalar::from_rational(parse_rational(b)?);
            let r = siegel_radius_bound(&b_val, &consts, bits);
            rep.enclosure("radius_bound", &r);
            rep.set_result(json!({ "radius_bound": r.to_f64() }));
            Ok(rep)
        }
        Command::DcCheck {
            alphas,
            c,
            tau,
            q_max,
        } => {
            let mut rep = Report::new("dc-check");
            rep.input("alphas", alphas.clone());
            rep.input("c", c.clone());
            rep.input("tau", tau.clone());
            rep.input("q_max", *q_max);
            let v = rotation_vector(alphas, bits, &mut rep)?;
            let c = parse_rational(c)?;
            let tau = parse_rational(tau)?;
            let res = dc_check(&v, &c, &tau, *q_max, bits, max_bits)?;
            rep.enclosure("witness_margin", &res.witness.margin);
            rep.set_result(json!({
                "holds": res.holds,
                "witness": {
                    "q": res.witness.q,
                    "p": res.witness.p.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "margin": res.witness.margin.to_f64(),
                },
            }));
            Ok(rep)
        }
        Command::DcEstimate {
            alphas,
            tau,
            q_max,
        } => {
            let mut rep = Report::new("dc-estimate");
            rep.input("alphas", alphas.clone());
            rep.input("tau", tau.clone());
            rep.input("q_max", *q_max);
            let v = rotation_vector(alphas, bits, &mut rep)?;
            let tau = parse_rational(tau)?;
            let res = dc_estimate(&v, &tau, *q_max, bits, max_bits)?;
            rep.enclosure("value", &res.value);
            rep.set_result(json!({
                "value": res.value.to_f64(),
                "witness": {
                    "q": res.witness.q,
                    "p": res.witness.p.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                },
            }));
            Ok(rep)
        }
        Command::DualCheck {
            alphas,
            c,
            tau_prime,
            k_max,
        } => {
            let mut rep = Report::new("dual-check");
            rep.input("alphas", alphas.clone());
            rep.input("c", c.clone());
            rep.input("tau_prime", tau_prime.clone());
            rep.input("k_max", *k_max);
            let v = rotation_vector(alphas, bits, &mut rep)?;
            let c = parse_rational(c)?;
            let tp = parse_rational(tau_prime)?;
            let res = dual_form_check(&v, &c, &tp, *k_max, bits, max_bits)?;
            rep.enclosure("witness_dot_abs", &res.witness.dot_abs);
            rep.enclosure("witness_margin", &res.witness.margin);
            rep.set_result(json!({
                "holds": res.holds,
                "witness": {
                    "vector": res.witness.vector.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "dot_abs": res.witness.dot_abs.to_f64(),
                    "margin": res.witness.margin.to_f64(),
                },
            }));
            Ok(rep)
        }
        Command::Transference { n, tau, tau_prime } => {
            let mut rep = Report::new("transference");
            rep.input("n", *n);
            match (tau, tau_prime) {
                (Some(t), None) => {
                    rep.input("tau", t.clone());
                    let t = parse_rational(t)?;
                    let tp = transference_forward(*n, &t)?;
                    rep.set_result(json!({ "tau_prime": rational_json(&tp) }));
                }
                (None, Some(tp)) => {
                    rep.input("tau_prime", tp.clone());
                    let tp = parse_rational(tp)?;
                    let t = transference_inverse(*n, &tp)?;
                    rep.set_result(json!({ "tau": rational_json(&t) }));
                }
                _ => {
                    return Err(Error::Parse(
                        "exactly one of --tau (forward) or --tau-prime (inverse) is required"
                            .into(),
                    ))
                }
            }
            Ok(rep)
        }
        Command::WordAppendix {
            alphas,
            c,
            tau,
            depth,
            mode,
            start_w,
        } => {
            let mut rep = Report::new("word-appendix");
            rep.input("alphas", alphas.clone());
            rep.input("c", c.clone());
            rep.input("tau", tau.clone());
            rep.input("depth", *depth);
            rep.input("mode", format!("{mode:?}"));
            let v = rotation_vector(alphas, bits, &mut rep)?;
            let c = parse_rational(c)?;
            let tau = parse_rational(tau)?;
            let mode = match mode {
                ModeArg::Proof => SelectorMode::Proof,
                ModeArg::Greedy => SelectorMode::Greedy,
            };
            let trace = select_word_appendix(&v, &c, &tau, *depth, mode, *start_w, bits, max_bits)?;
            if let Some(k) = &trace.kappa {
                rep.enclosure("kappa", k);
            }
            let envelope = if mode == SelectorMode::Proof && trace.kappa.is_some() {
                let e = prop53_envelope_check(&v, &trace, bits)?;
                json!({
                    "all_within": e.all_within,
                    "kappa": e.kappa,
                    "terms": e.terms.iter().map(|t| json!({
                        "depth": t.depth, "term": t.term, "bound": t.bound, "within": t.within,
                    })).collect::<Vec<_>>(),
                })
            } else {
                Value::Null
            };
            rep.set_result(json!({
                "word": trace.word,
                "tau_prime": rational_json(&trace.tau_prime),
                "kappa": trace.kappa.as_ref().map(|k| k.to_f64()),
                "steps": trace.steps.iter().map(|s| json!({
                    "w": s.w,
                    "q": s.q.to_string(),
                    "beta": s.beta.to_f64(),
                    "alpha_w": s.alpha_w.to_f64(),
                    "chosen_j": s.chosen_j,
                    "c_n": s.c_n.to_f64(),
                })).collect::<Vec<_>>(),
                "envelope": envelope,
            }));
            Ok(rep)
        }
        Command::Linearize {
            alpha,
            coeffs,
            order,
        } => {
            let mut rep = Report::new("linearize");
            rep.input("alpha", alpha.clone());
            rep.input("order", *order);
            rep.input("tol", cli.tol);
            let a = parse_exact_real(alpha)?;
            if a.is_rational() {
                rep.warn("rotation number is rational; small divisors will underflow");
            }
            let germ = match coeffs {
                Some(cs) => {
                    let s = seriesio::parse_conjugacy(cs, *order)?;
                    let tail: Vec<Complex64> = (2..=*order).map(|k| s.coeff(k)).collect();
                    PowerSeriesGerm::new(RealScalar::from_exact_bits(a, bits), tail)?
                }
                None => PowerSeriesGerm::rotation(RealScalar::from_exact_bits(a, bits)),
            };
            let lin = linearize(&germ, *order, cli.tol)?;
            rep.set_result(json!({
                "order": order,
                "min_divisor": lin.min_divisor,
                "residual": lin.residual,
                "radius_estimate": radius_estimate_json(&lin.radius_estimate),
                "h_coeffs": seriesio::series_json(&lin.h, 2),
            }));
            Ok(rep)
        }
        Command::Synth { h0, alphas, order } => {
            let mut rep = Report::new("synth");
            rep.input("alphas", alphas.clone());
            rep.input("order", *order);
            let v = rotation_vector(alphas, bits, &mut rep)?;
            let h0 = match h0 {
                Some(s) => seriesio::parse_conjugacy(s, *order)?,
                None => default_h0(*order),
            };
            let fam = synth_commuting_family(&h0, &v, *order)?;
            let series: Vec<Series> = fam.iter().map(|g| g.series(*order)).collect();
            let mut commutators = Vec::new();
            for i in 0..series.len() {
                for j in i + 1..series.len() {
                    commutators.push(json!({
                        "i": i + 1,
                        "j": j + 1,
                        "residual": commutator_residual(&series[i], &series[j], *order),
                    }));
                }
            }
            rep.set_result(json!({
                "germs": fam.iter().map(seriesio::germ_json).collect::<Vec<_>>(),
                "pairwise_commutators": commutators,
            }));
            Ok(rep)
        }
        Command::SimulCheck { germs, order } => {
            let mut rep = Report::new("simul-check");
            rep.input("order", *order);
            rep.input("tol", cli.tol);
            let fam = seriesio::parse_germ_list(germs)?;
            let res = simultaneous_check(&fam, *order, cli.tol)?;
            rep.set_result(json!({
                "linearizable": res.linearizable,
                "residuals": res.residuals,
                "h_coeffs": seriesio::series_json(&res.h, 2),
            }));
            Ok(rep)
        }
        Command::RadiusCompare {
            alphas,
            h0,
            order,
            word,
            word_policy,
            depth,
            variant,
            start_w,
        } => {
            let mut rep = Report::new("radius-compare");
            rep.input("alphas", alphas.clone());
            rep.input("order", *order);
            rep.input("variant", format!("{variant:?}"));
            let consts = constants(cli)?;
            let v = rotation_vector(alphas, bits, &mut rep)?;
            let h0 = match h0 {
                Some(s) => seriesio::parse_conjugacy(s, *order)?,
                None => default_h0(*order),
            };
            let fam = synth_commuting_family(&h0, &v, *order)?;
            let lin = linearize(&fam[0], *order, cli.tol)?;
            let policy = word_policy.clone().unwrap_or_else(|| "constant:1".into());
            let word = resolve_word(
                &v,
                word.as_deref(),
                Some(&policy),
                Some(*depth),
                *start_w,
                bits,
                max_bits,
            )?;
            rep.input("word", json!(word));
            let b = brjuno_partial(&v, &word, (*variant).into(), bits)?;
            let report = radius_estimate_vs_bound(&lin, &b.value, &consts, bits);
            rep.enclosure("b", &b.value);
            rep.enclosure("r_bound", &report.r_bound);
            rep.set_result(json!({
                "b": b.value.to_f64(),
                "r_est": radius_estimate_json(&report.r_est),
                "r_bound": report.r_bound.to_f64(),
                "ratio": report.ratio,
                "min_divisor": lin.min_divisor,
                "residual": lin.residual,
            }));
            Ok(rep)
        }
    }
}
