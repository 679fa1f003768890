mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use toric_zeta::algebra::rat::{int, parse_rat, to_f64, Rat};
use toric_zeta::algebra::{LambdaPoly, TLaurent};
use toric_zeta::global_series::{
    euler_d, load_hecke_csv, onedim_factor_product, primes_up_to, xi_skeleton, HeckeData, QuadraticField, XiInput,
};
use toric_zeta::local_field::{is_prime, EtaleKind};
use toric_zeta::local_zeta::{central_identity, closed_local_zeta, strata_sum_check};
use toric_zeta::oracles::{orbit_census, orbit_sizes, padic_oracle_ze_with, sym_volume_census, sym_volume_closed};
use toric_zeta::oracles::{OracleConfig, OracleMode, OrbitClass};
use toric_zeta::report::Mutation;
use toric_zeta::waldspurger::{verify_aux_lemmas, verify_generating_functions, BetaContext};
use toric_zeta::{Error, Result};

use report::{Item, Report};

#[derive(Parser)]
#[command(name = "toric-zeta", version, about = "Verification suites for toric local zeta functions")]
struct Cli {
    /// Also write the report as JSON to this path
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Ratfunc,
    Series,
    Eval,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    PerturbF2,
    PerturbT0,
}

#[derive(Subcommand)]
enum Command {
    /// Every symbolic identity, for each q and class
    VerifyIdentities {
        #[arg(long, value_delimiter = ',', default_values_t = [3u64, 5, 7, 9, 11, 13])]
        q: Vec<u64>,
        /// Series order for the univariate generating functions
        #[arg(long, default_value_t = 20)]
        order: i32,
        /// Total order for the bivariate and trivariate expansions
        #[arg(long)]
        joint_order: Option<i32>,
        /// Corrupt one identity to show the suite can fail
        #[arg(long, hide = true)]
        inject_mutation: Option<MutationArg>,
    },
    /// Closed form of Z_E(π,s)
    LocalZeta {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        class: EtaleKind,
        /// Rational value, `q+1`, `-(q+1)`, or omitted for symbolic λ
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, value_enum, default_value_t = Emit::Ratfunc)]
        emit: Emit,
        #[arg(long)]
        s: Option<i64>,
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Orbit counts on V(F_q) against the closed formulas
    OrbitCensus {
        #[arg(long)]
        q: u64,
    },
    /// Interval for Z_E(π,s) from the p-adic integral, against the closed form
    Oracle {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        class: EtaleKind,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 2)]
        s: i64,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        /// Refine all eight coordinates instead of using normal forms
        #[arg(long)]
        flat: bool,
    },
    /// Coset-count volumes of the symmetric strata against the closed formula
    SymVolume {
        #[arg(long)]
        p: u64,
        #[arg(long = "N", default_value_t = 4)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        max_l: u32,
    },
    /// Truncated Euler products and the ξ skeleton
    Euler {
        /// CSV of `p,lambda` rows
        #[arg(long)]
        hecke: Option<PathBuf>,
        /// One fundamental discriminant per line, optionally `D0,weight`
        #[arg(long)]
        fields: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 1000)]
        cutoff: u64,
        #[arg(long = "S", value_delimiter = ',')]
        s_set: Vec<u64>,
        /// Use λ_p = η_p(p+1) and check the per-prime factorization
        #[arg(long)]
        onedim: bool,
    },
}

fn class_name(k: EtaleKind) -> String {
    k.to_string()
}

fn parse_lambda(text: &str, q: u64) -> Result<Rat> {
    match text.replace(' ', "").as_str() {
        "q+1" => Ok(int(q as i64 + 1)),
        "-(q+1)" | "-q-1" => Ok(int(-(q as i64) - 1)),
        other => parse_rat(other),
    }
}

fn laurent_json(l: &TLaurent) -> serde_json::Value {
    let terms: Vec<_> = l
        .terms()
        .map(|(e, c)| json!({"t": e[0], "lambda_coeffs": c.coeffs().iter().map(|r| r.to_string()).collect::<Vec<_>>()}))
        .collect();
    json!(terms)
}

fn verify_identities(qs: &[u64], order: i32, joint: i32, mutation: Option<Mutation>) -> Vec<Item> {
    let mut items = Vec::new();
    for &q in qs {
        for kind in EtaleKind::ALL {
            let class = kind.class();
            let ctx = BetaContext::new(q, class);
            items.push(central_identity(&class, q).into());
            let closed = closed_local_zeta(&class, q);
            items.push(Item::new(format!("closed form invariants [{kind} q={q}]"), closed.invariants_hold(), ""));
            items.extend(verify_generating_functions(&ctx, order, joint).into_iter().map(Item::from));
            items.extend(verify_aux_lemmas(&ctx, joint, mutation).into_iter().map(Item::from));
            items.extend(strata_sum_check(&class, q, mutation).into_iter().map(Item::from));
        }
    }
    items
}

fn local_zeta(q: u64, kind: EtaleKind, lambda: Option<&str>, emit: Emit, s: Option<i64>, order: usize) -> Result<Vec<Item>> {
    let class = kind.class();
    let mut closed = closed_local_zeta(&class, q);
    let lambda = lambda.map(|l| parse_lambda(l, q)).transpose()?;
    if let Some(l) = &lambda {
        closed = closed.compose_lambda(&LambdaPoly::constant(l.clone()));
    }
    let mut items = vec![Item::new("closed form invariants", closed.invariants_hold(), "")];
    match emit {
        Emit::Ratfunc => {
            let data = json!({
                "numerator": laurent_json(closed.assembled.num()),
                "denominator": laurent_json(&closed.assembled.den()),
            });
            items.push(Item::new("Z_E(pi,s) as a function of t = q^-s", true, closed.assembled.to_string()).with_data(data));
        }
        Emit::Series => {
            let series = closed.assembled.series_expand(order)?;
            items.push(
                Item::new(format!("Z_E(pi,s) through t^{}", series.lowest + order as i32), true, series.to_laurent().to_string())
                    .with_data(laurent_json(&series.to_laurent())),
            );
        }
        Emit::Eval => {
            let s = s.filter(|s| *s >= 2).ok_or(Error::BadExponent(s.unwrap_or(0)))?;
            let l = lambda.clone().ok_or_else(|| Error::Parse("--emit eval needs --lambda".into()))?;
            let v = closed.eval(s as i32, &l)?;
            items.push(Item::new(format!("Z_E(pi,{s})"), true, format!("{v} ~ {:.12e}", to_f64(&v))).with_data(v.to_string()));
        }
    }
    if let Some(l) = &lambda {
        let eta = class.eta_at_uniformizer;
        if eta != 0 && *l == int(i64::from(eta) * (q as i64 + 1)) {
            // 1 + ℛqt² = (1 − qt²)(1 − t²)
            let expected = &(&TLaurent::one() - &TLaurent::t(2, int(q as i64))) * &(&TLaurent::one() - &TLaurent::t(2, int(1)));
            let lhs = &TLaurent::one() + &(&closed.r_factor * &TLaurent::t(2, int(q as i64)));
            let pass = lhs == expected;
            items.push(Item::new("1 + R q t^2 = (1 - q t^2)(1 - t^2)", pass, lhs.to_string()));
        }
    }
    Ok(items)
}

fn census(q: u64) -> Result<Vec<Item>> {
    let result = orbit_census(q)?;
    let sizes = orbit_sizes(q);
    let mut items: Vec<Item> = OrbitClass::ALL
        .iter()
        .map(|c| {
            let got = result.counts[c.index()];
            let expected = &sizes[c.index()];
            Item::new(format!("{c}"), int(got as i64) == *expected, format!("count {got}, formula {expected}"))
        })
        .collect();
    let total = result.total();
    items.push(Item::new("partition of V(F_q)", total == q.pow(8), format!("{total} = q^8")));
    Ok(items)
}

fn oracle(p: u64, kind: EtaleKind, lambda: &str, s: i64, depth: u32, flat: bool) -> Result<Vec<Item>> {
    let class = kind.class();
    let lambda = parse_lambda(lambda, p)?;
    let mut config = OracleConfig::new(depth);
    if flat {
        config.mode = OracleMode::Flat;
    }
    let est = padic_oracle_ze_with(p, &class, &lambda, s, &config)?;
    let closed = closed_local_zeta(&class, p).eval(s as i32, &lambda)?;
    let width = 2.0 * to_f64(&est.tail_bound) / to_f64(&closed).abs();
    Ok(vec![
        Item::new(
            "interval contains closed form",
            est.contains(&closed),
            format!("{:.12e} +- {:.3e}, closed {:.12e}", to_f64(&est.value), to_f64(&est.tail_bound), to_f64(&closed)),
        )
        .with_data(json!({"estimate": est, "closed_form": closed.to_string(), "relative_width": width})),
    ])
}

fn sym_volume(p: u64, n: u32, max_l: u32) -> Result<Vec<Item>> {
    let mut items = Vec::new();
    for kind in EtaleKind::ALL {
        let class = kind.class();
        for l1 in 0..=max_l {
            for l2 in 0..=max_l {
                let name = format!("{kind} l1={l1} l2={l2}");
                match sym_volume_census(p, n, &class, l1, l2) {
                    Ok(v) => {
                        let closed = sym_volume_closed(p, &class, l1, l2);
                        items.push(Item::new(name, v == closed, format!("count {v}, formula {closed}")));
                    }
                    Err(e @ Error::LevelTooSmall { .. }) => items.push(Item::new(name, false, e.to_string())),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(items)
}

fn read_fields(path: &Path) -> Result<(Vec<QuadraticField>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut fields = Vec::new();
    let mut weights = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let malformed = |msg: &str| Error::MalformedRow { line: i + 1, msg: msg.to_string() };
        let mut parts = line.split(',').map(str::trim);
        let d0 = match parts.next().unwrap_or("").parse::<i64>() {
            Ok(d) => d,
            Err(_) if i == 0 => continue,
            Err(_) => return Err(malformed("discriminant is not an integer")),
        };
        let weight = match parts.next() {
            Some(w) => w.parse::<f64>().map_err(|_| malformed("weight is not a number"))?,
            None => 1.0,
        };
        fields.push(QuadraticField::new(d0)?);
        weights.push(weight);
    }
    Ok((fields, weights))
}

fn euler(hecke: Option<&Path>, fields: &Path, s: f64, cutoff: u64, s_set: &[u64], onedim: bool) -> Result<Vec<Item>> {
    if let Some(&p) = s_set.iter().find(|p| !is_prime(**p)) {
        return Err(Error::NotPrime(p));
    }
    let s_set: BTreeSet<u64> = s_set.iter().copied().collect();
    let (fields, weights) = read_fields(fields)?;
    let mut items = Vec::new();
    if onedim {
        let exact_s = (s.fract() == 0.0 && s >= 2.0).then_some(s as i32);
        for field in &fields {
            let eta_data = HeckeData::from_fn(format!("eta_{}", field.d0), cutoff, |p| int(i64::from(field.eta(p)) * (p as i64 + 1)));
            let d = euler_d(s, &eta_data, field, &s_set, cutoff)?;
            let mut zeta_product = 1.0;
            let mut checked = 0;
            let mut exact_ok = true;
            for p in primes_up_to(cutoff).into_iter().filter(|p| !s_set.contains(p)) {
                let pf = p as f64;
                if field.eta(p) == 0 {
                    zeta_product *= 1.0 + pf.powf(1.0 - 2.0 * s);
                    continue;
                }
                zeta_product *= (1.0 - pf.powf(1.0 - 2.0 * s)) * (1.0 - pf.powf(-2.0 * s));
                if let Some(si) = exact_s {
                    exact_ok &= onedim_factor_product(p, field.eta(p), si) == int(1);
                    checked += 1;
                }
            }
            let rel = (d.value / zeta_product - 1.0).abs();
            let pass = exact_ok && rel < 1e-12;
            let detail = match exact_s {
                Some(_) => format!("{checked} unramified primes exact, product relative error {rel:.2e}"),
                None => format!("product relative error {rel:.2e}"),
            };
            items.push(Item::new(format!("one-dimensional factorization [D0={}]", field.d0), pass, detail));
        }
        return Ok(items);
    }
    let hecke_path = hecke.ok_or_else(|| Error::Parse("--hecke is required unless --onedim".into()))?;
    let hecke = load_hecke_csv(hecke_path)?;
    let conditions = BTreeMap::new();
    let input = XiInput {
        hecke: &hecke,
        fields: &fields,
        s_set: &s_set,
        x: cutoff,
        weights: &weights,
        local_conditions: &conditions,
        global_constant: int(1),
    };
    let xi = xi_skeleton(s, &input)?;
    for t in &xi.per_e_terms {
        items.push(
            Item::new(
                format!("E = Q(sqrt({}))", t.d0),
                t.contribution.is_finite(),
                format!("D = {:.12e}, L(1,eta) = {:.12e}, N(f) = {}", t.d_es_truncated, t.l1_eta, t.conductor_norm),
            )
            .with_data(t),
        );
    }
    items.push(
        Item::new("xi skeleton", xi.value.is_finite(), format!("{:.12e} (prefactor {:.12e})", xi.value, xi.prefactor_value))
            .with_data(&xi),
    );
    Ok(items)
}

fn run(cli: &Cli) -> Result<Report> {
    let started = Instant::now();
    let (name, params, items) = match &cli.command {
        Command::VerifyIdentities { q, order, joint_order, inject_mutation } => {
            let joint = joint_order.unwrap_or((*order).min(10));
            let mutation = inject_mutation.map(|m| match m {
                MutationArg::PerturbF2 => Mutation::PerturbF2,
                MutationArg::PerturbT0 => Mutation::PerturbT0,
            });
            let params = json!({"q": q, "order": order, "joint_order": joint, "mutation": mutation});
            ("verify-identities", params, verify_identities(q, *order, joint, mutation))
        }
        Command::LocalZeta { p, class, lambda, emit, s, order } => {
            let emit_name = match emit {
                Emit::Ratfunc => "ratfunc",
                Emit::Series => "series",
                Emit::Eval => "eval",
            };
            let params = json!({"p": p, "class": class_name(*class), "lambda": lambda, "emit": emit_name, "s": s, "order": order});
            ("local-zeta", params, local_zeta(*p, *class, lambda.as_deref(), *emit, *s, *order)?)
        }
        Command::OrbitCensus { q } => ("orbit-census", json!({"q": q}), census(*q)?),
        Command::Oracle { p, class, lambda, s, depth, flat } => {
            let params = json!({"p": p, "class": class_name(*class), "lambda": lambda, "s": s, "depth": depth, "flat": flat});
            ("oracle", params, oracle(*p, *class, lambda, *s, *depth, *flat)?)
        }
        Command::SymVolume { p, n, max_l } => ("sym-volume", json!({"p": p, "N": n, "max_l": max_l}), sym_volume(*p, *n, *max_l)?),
        Command::Euler { hecke, fields, s, cutoff, s_set, onedim } => {
            let params = json!({"hecke": hecke, "fields": fields, "s": s, "cutoff": cutoff, "S": s_set, "onedim": onedim});
            ("euler", params, euler(hecke.as_deref(), fields, *s, *cutoff, s_set, *onedim)?)
        }
    };
    Ok(Report::finish(name, params, items, started))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            report.print_table(&mut std::io::stdout().lock()).expect("stdout");
            if let Some(path) = &cli.json {
                if let Err(e) = report.write_json(path) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
