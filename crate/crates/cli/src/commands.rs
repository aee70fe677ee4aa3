use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use lpcrit::counterexamples::{
    make_constant_counterexample, make_trivial_pair_counterexample, verify_lattice_nd, verify_one_d,
    verify_singleton_nd, verify_trivial_pair, CounterexampleKind, TrivialPair, VerificationReport,
};
use lpcrit::criterion::{
    certify_bound_fn_sym, certify_bound_nd, certify_bound_sym, check_quantization_nd,
    check_quantization_sym, parse_vector, CriterionOptions, InputNorms, QuantizationReport,
    DEFAULT_EPS_Q, SCHEMA_VERSION,
};
use lpcrit::function_model::{FunctionModel, SimplexND};
use lpcrit::lattice::{count_layer_full, count_layer_nonneg, simplex_moment, simplex_volume};
use lpcrit::numerics::monte_carlo::integrate;
use lpcrit::numerics::SampleBox;
use lpcrit::trig::decompose;
use lpcrit::{Enclosure, Provenance, SymReal};
use serde::Serialize;

use crate::args::{
    CounterexampleArgs, CriterionArgs, Format, LatticeArgs, SimplexArgs, Token, TrigArgs,
};
use crate::error::{CliError, Outcome};
use crate::svg::{line_chart, Level, Series};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("missing required flag --{flag}")))
}

fn reject_unused(kind: &str, flags: &[(&str, bool)]) -> Result<(), CliError> {
    match flags.iter().find(|(_, set)| *set) {
        Some((name, _)) => Err(usage(format!("--{name} does not apply to {kind}"))),
        None => Ok(()),
    }
}

fn check_p(p: f64) -> Result<f64, CliError> {
    if p >= 1.0 && p.is_finite() {
        Ok(p)
    } else {
        Err(usage(format!("--p must satisfy 1 <= p < inf, got {p}")))
    }
}

fn sym(tok: &Token, flag: &str) -> Result<SymReal, CliError> {
    tok.as_text()
        .parse()
        .map_err(|e| usage(format!("--{flag}: {e}")))
}

fn vector(tok: &Token, flag: &str) -> Result<Vec<SymReal>, CliError> {
    parse_vector(&tok.as_text()).map_err(|e| usage(format!("--{flag}: {e}")))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&PathBuf>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

#[derive(Serialize)]
struct ViolatedVerdict<'a> {
    schema_version: u32,
    verdict: &'static str,
    quantization: &'a QuantizationReport,
}

fn violated(report: &QuantizationReport, out: Option<&PathBuf>) -> Result<Outcome, CliError> {
    let v = ViolatedVerdict {
        schema_version: SCHEMA_VERSION,
        verdict: "violated",
        quantization: report,
    };
    emit(out, &to_json(&v)?)?;
    if out.is_some() {
        println!(
            "quantization violated: t*s = {} is within {:e} of pi*Z",
            report.product, report.eps
        );
    }
    Ok(Outcome::Violated)
}

fn given_norms(args: &CriterionArgs) -> Result<Option<InputNorms>, CliError> {
    match (args.shift_norm, args.sine_norm) {
        (None, None) => Ok(None),
        (Some(shift), Some(sine)) => {
            let e = |v: f64, name: &str| {
                Enclosure::new(0.0, v, Provenance::ClosedForm)
                    .map_err(|_| usage(format!("--{name} must be a finite nonnegative number")))
            };
            Ok(Some(InputNorms {
                shift: e(shift, "shift-norm")?,
                sine: e(sine, "sine-norm")?,
            }))
        }
        _ => Err(usage("--shift-norm and --sine-norm must be given together")),
    }
}

pub fn criterion(args: CriterionArgs) -> Result<Outcome, CliError> {
    let p = check_p(args.p.unwrap_or(2.0))?;
    let eps_q = args.eps_q.unwrap_or(DEFAULT_EPS_Q);
    if !(eps_q > 0.0 && eps_q.is_finite()) {
        return Err(usage("--eps-q must be positive"));
    }
    let opts = CriterionOptions {
        eps_q,
        delta: args.delta,
    };
    let norms = given_norms(&args)?;
    let out = args.out.as_ref();

    let cert = if args.a.is_some() || args.b.is_some() {
        reject_unused(
            "the n-dimensional criterion",
            &[("t", args.t.is_some()), ("s", args.s.is_some()), ("fn", args.function.is_some())],
        )?;
        let a = vector(&require(args.a, "a")?, "a")?;
        let b = vector(&require(args.b, "b")?, "b")?;
        let report = check_quantization_nd(&a, &b, eps_q)?;
        if !report.is_assertive() {
            return violated(&report, out);
        }
        let norms = norms.ok_or_else(|| usage("the n-dimensional criterion needs --shift-norm and --sine-norm"))?;
        certify_bound_nd(norms, &a, &b, p, &opts)?
    } else {
        let t = sym(&require(args.t, "t")?, "t")?;
        let s = sym(&require(args.s, "s")?, "s")?;
        let report = check_quantization_sym(&t, &s, eps_q);
        if !report.is_assertive() {
            return violated(&report, out);
        }
        match (args.function, norms) {
            (Some(spec), None) => certify_bound_fn_sym(&spec.build()?, &t, &s, p, &opts)?,
            (None, Some(norms)) => certify_bound_sym(norms, &t, &s, p, &opts)?,
            (Some(_), Some(_)) => return Err(usage("give either --fn or the two norms, not both")),
            (None, None) => return Err(usage("missing --fn (or --shift-norm with --sine-norm)")),
        }
    };
    emit(out, &to_json(&cert)?)?;
    if out.is_some() {
        println!("bound = {}", cert.bound);
    }
    Ok(Outcome::Bounded)
}

#[derive(Serialize)]
struct CounterexampleOutput<'a> {
    #[serde(flatten)]
    report: &'a VerificationReport,
    trichotomy: bool,
}

pub fn counterexample(args: CounterexampleArgs) -> Result<Outcome, CliError> {
    let tag = require(args.kind.clone(), "kind")?;
    let kind = CounterexampleKind::from_tag(&tag).map_err(|e| usage(e.to_string()))?;
    let p = check_p(args.p.unwrap_or(2.0))?;
    let thresholds = args.thresholds.clone().unwrap_or_else(|| vec![1.0]);
    if thresholds.is_empty() || thresholds.iter().any(|m| !m.is_finite()) {
        return Err(usage("--M needs finite thresholds"));
    }
    let formats = args.format.clone().unwrap_or_else(|| match args.out_dir {
        Some(_) => vec![Format::Json, Format::Csv, Format::Svg],
        None => vec![Format::Json],
    });
    if args.out_dir.is_none() && formats.iter().any(|f| *f != Format::Json) {
        return Err(usage("csv and svg output need --out-dir"));
    }
    let lattice_flags = [("n", args.n.is_some()), ("gamma", args.gamma.is_some())];
    let vector_flags = [("a", args.a.is_some()), ("b", args.b.is_some())];
    let trivial_flags = [
        ("exponent", args.exponent.is_some()),
        ("constant", args.constant.is_some()),
        ("t", args.t.is_some()),
        ("s", args.s.is_some()),
    ];

    let report = match kind {
        CounterexampleKind::OneDPi => {
            reject_unused(&tag, &[lattice_flags.as_slice(), &vector_flags, &trivial_flags].concat())?;
            verify_one_d(p, &thresholds)?
        }
        CounterexampleKind::TZero => {
            reject_unused(
                &tag,
                &[lattice_flags.as_slice(), &vector_flags, &trivial_flags[..3]].concat(),
            )?;
            let f = make_trivial_pair_counterexample(TrivialPair::TZero, p, None)?;
            verify_trivial_pair(&f, TrivialPair::TZero, p, 0.0, args.s.unwrap_or(1.0), &thresholds)?
        }
        CounterexampleKind::SZero => {
            reject_unused(
                &tag,
                &[lattice_flags.as_slice(), &vector_flags, &[trivial_flags[3]]].concat(),
            )?;
            let f = match (args.constant, args.exponent) {
                (Some(_), Some(_)) => return Err(usage("give either --constant or --exponent")),
                (Some(c), None) => make_constant_counterexample(c)?,
                (None, a) => make_trivial_pair_counterexample(TrivialPair::SZero, p, a)?,
            };
            verify_trivial_pair(&f, TrivialPair::SZero, p, args.t.unwrap_or(1.0), 0.0, &thresholds)?
        }
        CounterexampleKind::LatticeNd => {
            reject_unused(&tag, &[vector_flags.as_slice(), &trivial_flags].concat())?;
            let n = require(args.n, "n")?;
            let gamma = require(args.gamma, "gamma")?;
            verify_lattice_nd(n, gamma, p, &thresholds)?
        }
        CounterexampleKind::SingletonDependent | CounterexampleKind::SingletonIndependent => {
            reject_unused(&tag, &[lattice_flags.as_slice(), &trivial_flags].concat())?;
            let a = vector(&require(args.a.clone(), "a")?, "a")?;
            let b = vector(&require(args.b.clone(), "b")?, "b")?;
            let report = verify_singleton_nd(&a, &b, p, &thresholds)?;
            if tag != "singleton" && report.kind != kind {
                return Err(usage(format!(
                    "(a, b) gives the {} construction, not {tag}",
                    report.kind.tag()
                )));
            }
            report
        }
    };

    let trichotomy = report.trichotomy();
    let json = to_json(&CounterexampleOutput {
        report: &report,
        trichotomy,
    })?;
    match &args.out_dir {
        None => emit(None, &json)?,
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.clone(),
                source,
            })?;
            for f in &formats {
                match f {
                    Format::Json => write_file(&dir.join("report.json"), &json)?,
                    Format::Csv => write_csv(&dir.join("layers.csv"), &report)?,
                    Format::Svg => {
                        let (mass, norms) = charts(&report);
                        write_file(&dir.join("mass.svg"), &mass)?;
                        write_file(&dir.join("norms.svg"), &norms)?;
                    }
                }
            }
            println!(
                "{}: trichotomy {}",
                report.kind.tag(),
                if trichotomy { "confirmed" } else { "NOT confirmed" }
            );
        }
    }
    Ok(if trichotomy {
        Outcome::Trichotomy
    } else {
        Outcome::NotConfirmed
    })
}

fn write_csv(path: &Path, report: &VerificationReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    for row in &report.layers {
        w.serialize(row).map_err(|e| CliError::Output(e.to_string()))?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn charts(report: &VerificationReport) -> (String, String) {
    let col = |f: fn(&lpcrit::counterexamples::LayerRow) -> f64| -> Vec<(f64, f64)> {
        report.layers.iter().map(|r| (r.layer as f64, f(r))).collect()
    };
    let levels: Vec<Level> = report
        .mass
        .iter()
        .map(|c| Level {
            label: format!("M = {}", c.threshold),
            y: c.threshold,
        })
        .collect();
    let mass = line_chart(
        &format!("{}: cumulative p-mass (certified lower bound)", report.kind.tag()),
        "layer",
        "lower bound on partial mass",
        &[Series {
            label: "partial mass, lower bound",
            points: col(|r| r.partial_mass_lower),
        }],
        &levels,
    );
    let norms = line_chart(
        &format!("{}: cumulative sine and shift sums (upper bounds)", report.kind.tag()),
        "layer",
        "upper bound on partial sum",
        &[
            Series {
                label: "sine, upper bound",
                points: col(|r| r.partial_sine_upper),
            },
            Series {
                label: "shift, upper bound",
                points: col(|r| r.partial_shift_upper),
            },
        ],
        &[],
    );
    (mass, norms)
}

pub fn lattice_count(args: LatticeArgs) -> Result<Outcome, CliError> {
    let n = require(args.n, "n")?;
    let k = require(args.k, "k")?;
    let count = if args.orthant {
        count_layer_nonneg(n, k)?
    } else {
        count_layer_full(n, k)?
    };
    println!("{count}");
    Ok(Outcome::Done)
}

pub fn trig_decomp(args: TrigArgs) -> Result<Outcome, CliError> {
    let text = require(args.b, "b")?;
    let b: Vec<i64> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| usage(format!("--b: `{t}` is not an integer")))
        })
        .collect::<Result<_, _>>()?;
    let dec = decompose(&b)?;
    println!("{dec}");
    let sups: Vec<String> = dec
        .sup_norms()
        .iter()
        .enumerate()
        .map(|(j, e)| format!("sup|Q{}| <= {}", j + 1, e.upper))
        .collect();
    println!("{}", sups.join("; "));
    Ok(Outcome::Done)
}

pub fn simplex(args: SimplexArgs) -> Result<Outcome, CliError> {
    let n = require(args.n, "n")?;
    let a = require(args.a, "a")?;
    let show_volume = args.volume || args.moment.is_none();
    if show_volume {
        println!("volume = {}", simplex_volume(n, a)?);
    }
    if let Some(p) = args.moment {
        println!("moment[p={p}] = {}", simplex_moment(n, a, p)?);
    }
    if let Some(samples) = args.samples {
        let seed = args.seed.unwrap_or(0);
        let shape = SimplexND::new(n, a)?;
        let region = SampleBox::cube(n, 0.0, a)?;
        if show_volume {
            let f = FunctionModel::Simplex(shape);
            let est = integrate(|x| f.evaluate(x), &region, samples, seed)?;
            println!("monte carlo volume = {} +/- {}", est.mean, 3.0 * est.std_error);
        }
        if let Some(p) = args.moment {
            let est = integrate(
                |x| if shape.contains(x) { x[0].powf(p) } else { 0.0 },
                &region,
                samples,
                seed,
            )?;
            println!("monte carlo moment[p={p}] = {} +/- {}", est.mean, 3.0 * est.std_error);
        }
    } else if args.seed.is_some() {
        return Err(usage("--seed needs --samples"));
    }
    Ok(Outcome::Done)
}
