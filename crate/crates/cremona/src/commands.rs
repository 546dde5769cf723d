//! Command implementations. Each returns JSON values; printing and exit
//! codes live in [`crate::cli`].

use std::time::Instant;

use cremona_core::config::apply_word;
use cremona_core::elliptic::EllipticEmbedding;
use cremona_core::harness::{
    build_config, random_points, sample_params, verify_embedding_translation, verify_g_decomposition, verify_word, DecompositionCase,
    HarnessOptions, SampleKind,
};
use cremona_core::lattice::{
    dynkin_adjacency, orbit, root, translation_word, word_pullback, word_pushforward, DivisorClass, LatticeSignature, WeylWord,
};
use cremona_core::torus::{kmnoy_word, word_trajectory, ParamKind, TorusParams};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::complex::Cx;
use crate::error::CliError;
use crate::schema::{matrix_rows, ParamsFile, VerificationReportJson, VerifyConfig};

pub fn parse_word(s: &str) -> Result<WeylWord, CliError> {
    Ok(s.parse::<WeylWord>()?)
}

fn signature(n: usize, m: usize) -> Result<LatticeSignature, CliError> {
    Ok(LatticeSignature::new(n, m)?)
}

/// `w_*(class)`.
pub fn lattice_act(n: usize, m: usize, word: &str, class: &str) -> Result<Value, CliError> {
    let sig = signature(n, m)?;
    let w = parse_word(word)?;
    w.validate(sig)?;
    let d = DivisorClass::parse(sig, class)?;
    let image = word_pushforward(sig, &w)?.apply(&d)?;
    Ok(json!({
        "n": n, "m": m, "word": w.to_string(),
        "input": d.to_string(),
        "class": image.to_string(),
        "coeffs": image.coeffs(),
    }))
}

/// Push-forward (or pull-back) matrix of a word, row-major.
pub fn lattice_matrix(n: usize, m: usize, word: &str, pullback: bool) -> Result<Value, CliError> {
    let sig = signature(n, m)?;
    let w = parse_word(word)?;
    let mat = if pullback { word_pullback(sig, &w)? } else { word_pushforward(sig, &w)? };
    Ok(json!({
        "n": n, "m": m, "word": w.to_string(),
        "kind": if pullback { "pullback" } else { "pushforward" },
        "determinant": mat.determinant()?,
        "rows": mat.rows(),
    }))
}

/// Adjacency matrix of the simple roots and its edge list.
pub fn lattice_dynkin(n: usize, m: usize) -> Result<Value, CliError> {
    let sig = signature(n, m)?;
    let adj = dynkin_adjacency(sig)?;
    let edges: Vec<[usize; 2]> =
        (0..adj.len()).flat_map(|i| (i + 1..adj.len()).filter(|&j| adj[i][j] != 0).map(move |j| [i, j]).collect::<Vec<_>>()).collect();
    Ok(json!({ "n": n, "m": m, "nodes": adj.len(), "adjacency": adj, "edges": edges }))
}

/// Classes `w_*(alpha_0)` for words of length at most `depth`.
pub fn lattice_orbit(n: usize, m: usize, depth: usize) -> Result<Value, CliError> {
    let sig = signature(n, m)?;
    let entries = orbit(&root(sig, 0)?, depth)?;
    let classes: Vec<Value> = entries.iter().map(|e| json!({ "class": e.class.to_string(), "word": e.word.to_string() })).collect();
    Ok(json!({ "n": n, "m": m, "depth": depth, "size": classes.len(), "classes": classes }))
}

/// Word for `cremona orbit`: explicit, or the translation attached to a
/// simple root.
pub enum OrbitWord {
    Explicit(String),
    Translation { root: usize, depth: usize },
}

fn state_json(step: usize, p: &TorusParams, shift: Option<cremona_core::Complex64>) -> Value {
    let mut v = json!({
        "step": step,
        "eps": p.eps().map(Cx),
        "u": p.u().iter().copied().map(Cx).collect::<Vec<_>>(),
    });
    if let Some(s) = shift {
        v["shift"] = json!(Cx(s));
    }
    v
}

/// Iterates a word on torus parameters; one JSON value per step. A
/// degenerate state ends the stream with an error carrying the step index.
pub fn orbit_stream(params: &ParamsFile, word: &OrbitWord, steps: usize, tau_floor: f64) -> (Vec<Value>, Option<CliError>) {
    let mut lines = Vec::new();
    let setup = || -> Result<(TorusParams, WeylWord), CliError> {
        let p = params.to_params(tau_floor)?;
        let w = match word {
            OrbitWord::Explicit(s) => parse_word(s)?,
            OrbitWord::Translation { root, depth } => translation_word(p.sig(), *root, *depth)?,
        };
        w.validate(p.sig())?;
        Ok((p, w))
    };
    let (mut cur, w) = match setup() {
        Ok(x) => x,
        Err(e) => return (lines, Some(e)),
    };
    if steps == 0 {
        return (lines, Some(CliError::Domain("steps must be at least 1".into())));
    }
    for step in 1..=steps {
        let next = match cur.kind() {
            ParamKind::Kmnoy { .. } => kmnoy_word(&w, &cur).map(|p| (p, None)),
            ParamKind::Weierstrass => word_trajectory(&w, &cur).map(|t| {
                let s = t.total_shift();
                (t.end().clone(), Some(s))
            }),
        };
        let (next, shift) = match next {
            Ok(x) => x,
            Err(e) => return (lines, Some(CliError::Domain(format!("step {step}: {e}")))),
        };
        // re-validate: coinciding points or a lattice eps make the state degenerate
        let check = ParamsFile::from_params(&next).to_params(tau_floor);
        if let Err(e) = check {
            return (lines, Some(CliError::Domain(format!("step {step}: degenerate state: {e}"))));
        }
        lines.push(state_json(step, &next, shift));
        cur = next;
    }
    (lines, None)
}

/// Which check `cremona verify` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Word,
    GDecomposition,
    Translation,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyFlags {
    pub word: Option<String>,
    pub compare: Option<String>,
    pub random: bool,
    pub seed: Option<u64>,
    pub probes: Option<usize>,
    pub residual: Option<f64>,
    pub tau_floor: Option<f64>,
    pub timing: bool,
}

/// Runs a verification. Returns the report and whether it passed.
pub fn verify(cfg: &VerifyConfig, mode: VerifyMode, flags: &VerifyFlags) -> Result<(Value, bool), CliError> {
    let started = Instant::now();
    let mut opts: HarnessOptions = cfg.tolerances.harness_options();
    if let Some(r) = flags.residual {
        opts.residual = r;
    }
    let tau_floor = flags.tau_floor.or(cfg.tolerances.tau_floor).unwrap_or(0.0);
    let seed = flags.seed.or(cfg.seed).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = if flags.random {
        let sig = cfg.params.signature()?;
        let modulus = cfg.params.modulus(tau_floor)?;
        sample_params(sig, modulus, SampleKind::from(cfg.params.embedding), &opts, &mut rng)?
    } else {
        cfg.params.to_params(tau_floor)?
    };
    let file = ParamsFile::from_params(&params);
    let probe_count = flags.probes.or(cfg.probes).unwrap_or(10);
    let probes = random_points(params.modulus(), probe_count, &mut rng);
    let word_src = flags.word.clone().or_else(|| cfg.word.clone()).unwrap_or_default();
    let word = parse_word(&word_src)?;

    let (mut out, pass) = match mode {
        VerifyMode::Word => match &flags.compare {
            None => {
                let r = verify_word(&word, &params, &probes, &opts)?;
                let json = serde_json::to_value(VerificationReportJson::new(&r, &file, opts.residual))?;
                (json, r.pass)
            }
            Some(other) => compare_words(&word, &parse_word(other)?, &params, &probes, &opts)?,
        },
        VerifyMode::GDecomposition => {
            let case = match params.kind() {
                ParamKind::Weierstrass => DecompositionCase::WeierstrassCremona,
                ParamKind::Kmnoy { .. } => DecompositionCase::KmnoyLastSwap,
            };
            let tol = 1e-7;
            let r = verify_g_decomposition(case, &params, &opts, tol)?;
            let json = json!({
                "mode": "g-decomposition",
                "case": match case {
                    DecompositionCase::WeierstrassCremona => "weierstrass_cremona",
                    DecompositionCase::KmnoyLastSwap => "kmnoy_r_n1_n2",
                },
                "g1": matrix_rows(&r.g1),
                "g2": matrix_rows(&r.g2),
                "solved": matrix_rows(&r.solved),
                "distance": r.distance,
                "tolerance": tol,
                "pass": r.pass,
            });
            (json, r.pass)
        }
        VerifyMode::Translation => {
            let emb_a = params.embedding()?;
            let other = sample_params(params.sig(), *params.modulus(), SampleKind::Kmnoy, &opts, &mut rng)?;
            let n = params.sig().n();
            let emb_b = EllipticEmbedding::kmnoy(*params.modulus(), other.u()[..=n].to_vec(), other.eps().unwrap_or_default())?;
            let tol = 1e-7;
            let r = verify_embedding_translation(&emb_a, &emb_b, 20, &opts, tol, &mut rng)?;
            let json = json!({
                "mode": "translation",
                "a": Cx(r.a.value()),
                "g": matrix_rows(&r.g),
                "residual": r.residual,
                "tolerance": tol,
                "pass": r.pass,
            });
            (json, r.pass)
        }
    };
    out["seed"] = json!(seed);
    out["params"] = serde_json::to_value(&file)?;
    if flags.timing {
        out["timing_ms"] = json!(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok((out, pass))
}

fn compare_words(
    a: &WeylWord,
    b: &WeylWord,
    params: &TorusParams,
    probes: &[cremona_core::Complex64],
    opts: &HarnessOptions,
) -> Result<(Value, bool), CliError> {
    let ta = word_trajectory(a, params)?;
    let tb = word_trajectory(b, params)?;
    let m = params.modulus();
    let state_distance = ta.end().torus_distance(tb.end()).max(m.lattice_distance(ta.total_shift() - tb.total_shift()));
    let cfg = build_config(params, probes)?;
    let ca = apply_word(a, &cfg, &opts.config)?;
    let cb = apply_word(b, &cfg, &opts.config)?;
    let config_distance = ca.distance(&cb);
    let tol = 1e-8;
    let pass = state_distance < tol && config_distance < tol;
    let end = |p: &TorusParams| serde_json::to_value(ParamsFile::from_params(p));
    Ok((
        json!({
            "mode": "compare",
            "word": a.to_string(),
            "compare": b.to_string(),
            "end_state": end(ta.end())?,
            "compare_end_state": end(tb.end())?,
            "state_distance": state_distance,
            "config_distance": config_distance,
            "tolerance": tol,
            "pass": pass,
        }),
        pass,
    ))
}
