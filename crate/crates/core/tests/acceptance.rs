//! Acceptance suite: one line per criterion, all tolerances fixed below.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use toric_zeta::algebra::rat::{int, to_f64};
use toric_zeta::global_series::{onedim_factor_product, primes_up_to};
use toric_zeta::local_field::EtaleKind;
use toric_zeta::local_zeta::{central_identity, closed_local_zeta, strata_sum_check, z1_recursive_eval};
use toric_zeta::oracles::{orbit_census, orbit_sizes, padic_oracle_ze, sym_volume_census, sym_volume_closed};
use toric_zeta::report::all_pass;
use toric_zeta::waldspurger::{verify_aux_lemmas, verify_generating_functions, BetaContext};

const UNIVARIATE_ORDER: i32 = 20;
const JOINT_ORDER: i32 = 10;
const Z1_TRUNCATION: usize = 40;
const Z1_MAX_TAIL: f64 = 1e-6;
const ORACLE_DEPTH: u32 = 3;
const ORACLE_MAX_RELATIVE_WIDTH: f64 = 1e-3;
const SYM_LEVEL: u32 = 4;
const ONEDIM_PRIMES: usize = 50;

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion(number: u32, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    // Wall-clock limits are reported, not enforced: shared CI machines vary too much.
    let timing = if elapsed <= limit { "within" } else { "OVER" };
    println!(
        "[{}] criterion {number}: {title}: {} ({:.2} s, {timing} the {:.0} s limit)",
        if out.pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    out.pass
}

fn central_identity_all() -> Outcome {
    let mut n = 0;
    let mut failures = Vec::new();
    for q in [3, 5, 7, 9, 11, 13] {
        for kind in EtaleKind::ALL {
            let item = central_identity(&kind.class(), q);
            n += 1;
            if !item.pass {
                failures.push(item.name);
            }
        }
    }
    Outcome { pass: failures.is_empty(), detail: format!("{}/{n} exact identities; failing {failures:?}", n - failures.len()) }
}

fn generating_functions() -> Outcome {
    let mut items = Vec::new();
    for q in [3, 5, 7] {
        for kind in EtaleKind::ALL {
            let ctx = BetaContext::new(q, kind.class());
            items.extend(verify_generating_functions(&ctx, UNIVARIATE_ORDER, JOINT_ORDER));
            items.extend(verify_aux_lemmas(&ctx, JOINT_ORDER, None));
        }
    }
    let bad: Vec<_> = items.iter().filter(|i| !i.pass).map(|i| i.name.clone()).collect();
    Outcome {
        pass: bad.is_empty() && !items.is_empty(),
        detail: format!("{}/{} checks exact through order {UNIVARIATE_ORDER} (joint {JOINT_ORDER}); failing {bad:?}", items.len() - bad.len(), items.len()),
    }
}

fn strata_sum() -> Outcome {
    let mut items = Vec::new();
    for q in [3, 5, 7] {
        for kind in EtaleKind::ALL {
            items.extend(strata_sum_check(&kind.class(), q, None));
        }
    }
    Outcome { pass: all_pass(&items), detail: format!("{} checks", items.len()) }
}

fn z1_grid() -> Outcome {
    let mut worst_tail: f64 = 0.0;
    let mut failures = Vec::new();
    let mut n = 0;
    for kind in EtaleKind::ALL {
        for q in [3, 5] {
            for lam in [-2, 0, 2] {
                for s in [2, 3] {
                    let class = kind.class();
                    let lam = int(lam);
                    let est = z1_recursive_eval(&class, q, &lam, s, Z1_TRUNCATION).expect("z1 evaluation");
                    let closed = closed_local_zeta(&class, q).z1_value(s as i32, &lam).expect("closed value");
                    let tail = to_f64(&est.tail_bound);
                    worst_tail = worst_tail.max(tail);
                    n += 1;
                    if !est.contains(&closed) || tail > Z1_MAX_TAIL {
                        failures.push(format!("{kind} q={q} lambda={lam} s={s}"));
                    }
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("{}/{n} contain the closed value, largest tail {worst_tail:.2e} (max {Z1_MAX_TAIL:.0e}); failing {failures:?}", n - failures.len()),
    }
}

fn census() -> Outcome {
    // Orbit sizes at q = 3 as printed: X0..X7.
    let printed_q3: [u64; 8] = [1, 128, 192, 192, 192, 1536, 3456, 864];
    let mut ok = true;
    let mut detail = String::new();
    for q in [3, 5, 7] {
        let result = orbit_census(q).expect("census");
        let formulas = orbit_sizes(q);
        let matches = result.counts.iter().zip(&formulas).all(|(c, f)| int(*c as i64) == *f);
        let partition = result.total() == q.pow(8);
        ok &= matches && partition;
        detail.push_str(&format!("q={q}: {:?} ", result.counts));
        if q == 3 {
            ok &= result.counts == printed_q3;
        }
    }
    Outcome { pass: ok, detail: detail.trim_end().to_string() }
}

fn oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for kind in EtaleKind::ALL {
        for lam in [0, 2] {
            let class = kind.class();
            let lam = int(lam);
            let est = padic_oracle_ze(3, &class, &lam, 2, ORACLE_DEPTH).expect("oracle");
            let closed = closed_local_zeta(&class, 3).eval(2, &lam).expect("closed form");
            let width = 2.0 * to_f64(&est.tail_bound) / to_f64(&closed).abs();
            worst = worst.max(width);
            if !est.contains(&closed) || width > ORACLE_MAX_RELATIVE_WIDTH {
                failures.push(format!("{kind} lambda={lam}"));
            }
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("6 instances at depth {ORACLE_DEPTH}, largest relative width {worst:.2e} (max {ORACLE_MAX_RELATIVE_WIDTH:.0e}); failing {failures:?}"),
    }
}

fn sym_volumes() -> Outcome {
    let mut n = 0;
    let mut failures = Vec::new();
    for p in [3, 5] {
        for kind in EtaleKind::ALL {
            for l1 in 0..=1 {
                for l2 in 0..=1 {
                    let class = kind.class();
                    let counted = sym_volume_census(p, SYM_LEVEL, &class, l1, l2);
                    n += 1;
                    if counted.as_ref().ok() != Some(&sym_volume_closed(p, &class, l1, l2)) {
                        failures.push(format!("p={p} {kind} l1={l1} l2={l2}: {counted:?}"));
                    }
                }
            }
        }
    }
    Outcome { pass: failures.is_empty(), detail: format!("{}/{n} exact at N={SYM_LEVEL}; failing {failures:?}", n - failures.len()) }
}

fn onedim() -> Outcome {
    let primes = primes_up_to(300);
    let primes = &primes[..ONEDIM_PRIMES];
    let ok = primes.iter().all(|&p| [1, -1].iter().all(|&eta| onedim_factor_product(p, eta, 2) == int(1)));
    Outcome { pass: ok, detail: format!("{} primes up to {}, eta = +1 and -1, s = 2, exact", primes.len(), primes[primes.len() - 1]) }
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let results = [
        criterion(1, "central identity", secs(1), central_identity_all),
        criterion(2, "generating functions and sum lemmas", secs(30), generating_functions),
        criterion(3, "strata sum", secs(10), strata_sum),
        criterion(4, "Z_1 recursion intervals", secs(60), z1_grid),
        criterion(5, "finite-field orbit census", secs(60), census),
        criterion(6, "p-adic oracle", secs(300), oracle),
        criterion(7, "symmetric volumes", secs(30), sym_volumes),
        criterion(8, "one-dimensional factorization", secs(1), onedim),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    assert!(results.iter().all(|p| *p));
}
