//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padic_sde::antider::{antider_w, by_parts_residual, covariation};
use padic_sde::char_expect::verify_char_expectation;
use padic_sde::charfun::{character, charfun_modulus, shell_distribution, shell_range, GaussianSpec};
use padic_sde::evolution::{
    exp_operator, generating_operator, perturbation_check, solve_evolution, GeneratorSpec, Matrix,
};
use padic_sde::grid::{chain_indices, GridFunction};
use padic_sde::measure::{
    derive_seed, ensemble, GaussianSampler, MahlerWiener, TreeWiener, WienerSampler, ZetaLaw,
};
use padic_sde::padic::{BallSpec, PAdic};
use padic_sde::runner::{run, Command};
use padic_sde::sde::{
    moment_diagnostic, solve_ensemble, solve_from, solve_general, solve_picard, stability_diagnostic, Builtin,
    SdeProblem, SeriesTerm,
};

type Outcome = Result<(bool, String), padic_sde::Error>;

const PRIMES: [u32; 3] = [2, 3, 5];
const BETAS: [f64; 3] = [0.1, 1.0, 10.0];
const QS: [f64; 2] = [1.0, 2.0];

fn zero_or_norm(x: &PAdic) -> f64 {
    if x.is_zero() {
        0.0
    } else {
        x.norm()
    }
}

fn random_poly(d: &BallSpec, t: u64, r: &mut ChaCha8Rng) -> GridFunction<PAdic> {
    let (p, n) = (d.prime(), d.precision());
    let m = (p as i128).pow(n);
    let cs: Vec<PAdic> = (0..4).map(|_| PAdic::from_int(p, n, r.gen_range(0..m)).shift(r.gen_range(-1..2))).collect();
    GridFunction::from_fn_on(d.clone(), chain_indices(d, t), |_, x| {
        cs.iter().rev().fold(PAdic::zero(p, n), |acc, c| &(&acc * x) + c)
    })
}

fn identities() -> Outcome {
    let n = 6;
    let (mut worst_bp, mut worst_sq, mut worst_tw) = (0.0f64, 0.0f64, 0.0f64);
    let mut pairs = 0;
    for p in PRIMES {
        let d = BallSpec::unit_ball(p, n, 4);
        let samplers = [
            WienerSampler::Tree(TreeWiener::standard(1.0, 1.0, d.clone())?),
            WienerSampler::Mahler(MahlerWiener::new(&ZetaLaw::Geometric { rate: 1.0 }, 6, 1.0, d.clone())?),
        ];
        let mut r = ChaCha8Rng::seed_from_u64(p as u64);
        for i in 0..1000u64 {
            let t = r.gen_range(0..d.len());
            let x = random_poly(&d, t, &mut r);
            let ws = &samplers[(i % 2) as usize];
            let wp = ws.sample_on(derive_seed(11, i), &[t]);
            let w = &wp.values;
            let y = if i % 3 == 0 { random_poly(&d, t, &mut r) } else { w.clone() };
            worst_bp = worst_bp.max(zero_or_norm(&by_parts_residual(&x, &y, t)?));
            // w_t^2 - w_0^2 = 2 P_w w + [w, w]_t
            let lhs = &(w.get(t)? * w.get(t)?) - &(w.get(0)? * w.get(0)?);
            let rhs = &(&PAdic::from_int(p, n, 2) * &antider_w(w, &wp, t)?) + &covariation(w, w, t)?;
            worst_sq = worst_sq.max(zero_or_norm(&(&lhs - &rhs)));
            pairs += 1;
        }
        let t1 = d.index_of(&PAdic::one(p, n)).expect("1 lies on the grid");
        for i in 0..100u64 {
            for ws in &samplers {
                let w = ws.sample_on(derive_seed(5, i), &[t1]).values;
                let time = GridFunction::from_fn_on(d.clone(), chain_indices(&d, t1), |_, u| u.clone());
                let c = covariation(&time, &w, t1)?;
                if c != *w.get(t1)? {
                    worst_tw = worst_tw.max(zero_or_norm(&(&c - w.get(t1)?)).max(f64::MIN_POSITIVE));
                }
            }
        }
    }
    let pass = worst_bp == 0.0 && worst_sq == 0.0 && worst_tw == 0.0;
    Ok((pass, format!("{pairs} pairs; by-parts {worst_bp}, d(w^2) {worst_sq}, P_(t,w)1 - w_1 {worst_tw}")))
}

fn characteristic_functional() -> Outcome {
    let s = 100_000u64;
    let tol = 4.0 / (s as f64).sqrt();
    let (mut worst, mut fails) = (0.0f64, 0);
    let mut seed = 0;
    for p in PRIMES {
        let n = 16;
        let gamma = PAdic::from_rational(p, n, 1, p as i128)?;
        for beta in BETAS {
            for q in QS {
                let spec = GaussianSpec::one_dim(beta, q, gamma.clone())?;
                let sampler = GaussianSampler::new(&spec, n)?;
                seed += 1;
                let xs = ensemble(seed, s, |_, r| sampler.sample(r));
                for k in -2..=2 {
                    let h = PAdic::p_power(p, n, k);
                    let emp = xs.iter().map(|x| character(&h, x).to_complex()).sum::<Complex64>() / s as f64;
                    let exact = (-beta * h.norm().powf(q)).exp() * character(&gamma, &h).to_complex();
                    let dev = (emp.re - exact.re).abs().max((emp.im - exact.im).abs());
                    worst = worst.max(dev);
                    if dev > tol {
                        fails += 1;
                    }
                }
            }
        }
    }
    Ok((fails == 0, format!("90 checks, {fails} outside {tol:.4}, largest deviation {worst:.4}")))
}

fn ultrametric_inequality() -> Outcome {
    let (p, n) = (3, 8);
    let zeta = (1..=3).map(|j| PAdic::p_power(p, n, j)).collect();
    let spec = GaussianSpec::product(zeta, 1.0, vec![PAdic::zero(p, n); 3])?;
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let m = (p as i128).pow(n);
    let rand = |r: &mut ChaCha8Rng| PAdic::from_int(p, n, r.gen_range(0..m)).shift(r.gen_range(-3..4));
    let (mut violations, mut equality_breaks) = (0, 0);
    for _ in 0..10_000 {
        let g: Vec<PAdic> = (0..3).map(|_| rand(&mut r)).collect();
        let (h1, h2) = (rand(&mut r), rand(&mut r));
        let f = |h: &PAdic| charfun_modulus(&spec, &g, h);
        let sum = &h1 + &h2;
        // Exact side: the modulus is a decreasing function of |h|, so the
        // inequality reduces to the valuation law for h1 + h2.
        let v = |h: &PAdic| h.valuation().unwrap_or(i64::MAX);
        if v(&sum) < v(&h1).min(v(&h2)) || f(&sum) < f(&h1).min(f(&h2)) {
            violations += 1;
        }
        if v(&h1) < v(&h2) && f(&sum) != f(&h1) {
            equality_breaks += 1;
        }
    }
    Ok((violations == 0 && equality_breaks == 0, format!("10000 triples, {violations} violations, {equality_breaks} equality-case breaks")))
}

fn shell_distribution_check() -> Outcome {
    let s = 100_000u64;
    let mut worst_mass = 0.0f64;
    let mut negative = 0;
    let (mut shells, mut fails) = (0, 0);
    let mut seed = 100;
    for p in PRIMES {
        for beta in BETAS {
            for q in QS {
                let spec = GaussianSpec::one_dim(beta, q, PAdic::zero(p, 16))?;
                let (lo, hi) = shell_range(&spec, 1e-15, 1e-14)?;
                let table = shell_distribution(&spec, lo, hi, 1e-12)?;
                worst_mass = worst_mass.max((table.total_mass() - 1.0).abs());
                negative += table.entries.iter().filter(|e| e.1 < 0.0).count();
                let sampler = GaussianSampler::new(&spec, 16)?;
                seed += 1;
                let ms = ensemble(seed, s, |_, r| {
                    let x = sampler.sample(r);
                    -x.valuation().unwrap_or(i64::MIN / 2)
                });
                for &(m, w) in &table.entries {
                    if w * s as f64 >= 5.0 {
                        let obs = ms.iter().filter(|&&x| x == m).count() as f64 / s as f64;
                        let se = (w * (1.0 - w) / s as f64).sqrt();
                        shells += 1;
                        if (obs - w).abs() > 3.0 * se {
                            fails += 1;
                        }
                    }
                }
            }
        }
    }
    let pass = negative == 0 && worst_mass <= 1e-9 && fails == 0;
    Ok((pass, format!("18 parameter sets; |mass - 1| <= {worst_mass:.1e}; {negative} negative weights; {fails}/{shells} shells outside 3 SE")))
}

fn builtin_problems(d: &BallSpec) -> Vec<(&'static str, SdeProblem)> {
    let (p, n) = (d.prime(), d.precision());
    let c = |k: i128| PAdic::from_int(p, n, k);
    let zero = Builtin::Constant(c(0));
    let one = Builtin::Constant(c(1));
    let by_ball = Builtin::ByBall {
        center: d.center.clone(),
        radius_exp: d.radius_exp,
        depth: 1,
        values: (0..p as i128).map(|k| c(k + 1)).collect(),
    };
    vec![
        ("drift-only", SdeProblem::new(d.clone(), c(1), one.clone(), zero.clone())),
        ("diffusion-only", SdeProblem::new(d.clone(), c(1), zero.clone(), one.clone())),
        ("linear", SdeProblem::new(d.clone(), c(1), Builtin::Linear { slope: c(5), offset: c(0) }, one.clone())),
        ("polynomial", SdeProblem::new(d.clone(), c(2), Builtin::Polynomial(vec![c(1), c(0), c(5)]), Builtin::Linear { slope: c(25), offset: c(1) })),
        ("by-ball", SdeProblem::new(d.clone(), c(0), Builtin::Linear { slope: c(5), offset: c(0) }, by_ball)),
        (
            "large-slope",
            SdeProblem::new(d.clone(), c(1), Builtin::Linear { slope: PAdic::from_rational(p, n, 1, 25).unwrap(), offset: c(0) }, one),
        ),
    ]
}

fn picard() -> Outcome {
    let d = BallSpec::unit_ball(5, 6, 6);
    let w = TreeWiener::standard(1.0, 1.0, d.clone())?.sample(2024);
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, pr) in builtin_problems(&d) {
        let sol = solve_picard(&pr, &w)?;
        let contraction = sol.balls.iter().map(|b| b.contraction).fold(0.0, f64::max);
        let shift = PAdic::from_int(5, 6, 5);
        let start = GridFunction::from_fn(d.clone(), |_, _| &pr.xi0 + &shift);
        let again = solve_from(&pr, &w, Some(&start))?;
        let unique = (0..d.len()).all(|i| again.xi.get(i).unwrap() == sol.xi.get(i).unwrap());
        let ok = sol.residual == 0.0 && contraction < 1.0 && unique;
        pass &= ok;
        notes.push(format!("{name}: {} balls c={contraction:.3}{}", sol.balls.len(), if ok { "" } else { " FAIL" }));
    }
    Ok((pass, format!("p=5 N=6, 15625 points; {}", notes.join("; "))))
}

fn generalized() -> Outcome {
    let (p, n) = (5, 6);
    let d = BallSpec::unit_ball(p, n, 4);
    let w = TreeWiener::standard(1.0, 1.0, d.clone())?.sample(77);
    let c = |k: i128| PAdic::from_int(p, n, k);
    let a = Builtin::Linear { slope: c(5), offset: c(1) };
    let e = Builtin::Linear { slope: c(25), offset: c(1) };
    let term = |b, m, l, coef: Builtin| SeriesTerm { b, m, l, coef: std::sync::Arc::new(coef) };
    let same = |x: &GridFunction<PAdic>, y: &GridFunction<PAdic>| (0..d.len()).all(|i| x.get(i).unwrap() == y.get(i).unwrap());

    let drift = SdeProblem::new(d.clone(), c(1), a.clone(), Builtin::Constant(c(0)));
    let drift_series = drift.clone().with_series(vec![term(1, 0, 0, a.clone())]);
    let r1 = same(&solve_picard(&drift, &w)?.xi, &solve_general(&drift_series, &w)?.xi);

    let diff = SdeProblem::new(d.clone(), c(1), Builtin::Constant(c(0)), e.clone());
    let diff_series = diff.clone().with_series(vec![term(0, 1, 1, Builtin::Constant(c(1)))]);
    let one_term = solve_general(&diff_series, &w)?;
    let r2 = same(&solve_picard(&diff, &w)?.xi, &one_term.xi);

    let two = diff.with_series(vec![term(0, 1, 1, Builtin::Constant(c(1))), term(0, 2, 2, Builtin::Constant(c(5)))]);
    let sol = solve_general(&two, &w)?;
    let gap = (0..d.len()).map(|i| zero_or_norm(&(sol.xi.get(i).unwrap() - one_term.xi.get(i).unwrap()))).fold(0.0, f64::max);
    let pass = r1 && r2 && sol.residual == 0.0;
    Ok((pass, format!("drift reduction {r1}, diffusion reduction {r2}, two-term residual {}, gap to one-term {gap}", sol.residual)))
}

fn diagnostics() -> Outcome {
    let (p, n) = (5, 6);
    let d = BallSpec::unit_ball(p, n, 4);
    let sampler = WienerSampler::Tree(TreeWiener::standard(1.0, 1.0, d.clone())?);
    let problem = |x0: i128| {
        SdeProblem::new(
            d.clone(),
            PAdic::from_int(p, n, x0),
            Builtin::Linear { slope: PAdic::from_int(p, n, 5), offset: PAdic::zero(p, n) },
            Builtin::Constant(PAdic::one(p, n)),
        )
    };
    let first = solve_ensemble(&problem(1), &sampler, 9, 1000)?;
    let second = solve_ensemble(&problem(6), &sampler, 9, 1000)?;
    let twin = solve_ensemble(&problem(1), &sampler, 9, 1000)?;
    let m1 = moment_diagnostic(&first, 1, 1.0, 1.0, 3.0);
    let m2 = moment_diagnostic(&first, 2, 1.0, 1.0, 3.0);
    let st = stability_diagnostic(&first, &second, 1, 1.0, 1.0, 3.0)?;
    let zero = stability_diagnostic(&first, &twin, 1, 1.0, 1.0, 3.0)?;
    let zero_exact = zero.identically_zero && zero.levels.iter().all(|l| l.value == 0.0);
    let pass = m1.pass() && m2.pass() && st.pass() && zero_exact;
    Ok((pass, format!("S=1000; moment s=1 {}, s=2 {}, stability {}, zero gap y=0 {}", m1.pass(), m2.pass(), st.pass(), zero_exact)))
}

fn evolution() -> Outcome {
    let (p, n) = (3, 8);
    let d = BallSpec::unit_ball(p, n, 5);
    let mat = |v: [i128; 9]| Matrix::new(3, v.iter().map(|&x| PAdic::from_int(p, n, x)).collect()).unwrap();
    let a = mat([3, 9, 0, 6, 3, 3, 0, 27, 6]);
    let b = mat([9, 0, 0, 0, 9, 27, 0, 0, 0]);
    let spec = GeneratorSpec::Constant(a.clone());
    let poly = GeneratorSpec::Polynomial(vec![a.clone(), b.clone()]);
    let u = solve_evolution(&spec, &d)?;
    let up = solve_evolution(&poly, &d)?;
    let x = exp_operator(&a, &d)?;
    let id = Matrix::identity(p, n, 3);
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let (mut semigroup, mut exp_ok) = (true, true);
    let mut pairs = Vec::new();
    for _ in 0..100 {
        let (t, s, v) = (r.gen_range(0..d.len()), r.gen_range(0..d.len()), r.gen_range(0..d.len()));
        for op in [&u, &up] {
            semigroup &= op.at(t, t)?.agrees_with(&id);
            semigroup &= op.at(t, s)?.mul(&op.at(s, v)?).agrees_with(&op.at(t, v)?);
        }
        exp_ok &= u.at(t, s)?.agrees_mod(&x.at(t, s)?, n as i64 - 1);
        pairs.push((t, s));
    }
    let pert = perturbation_check(&spec, &GeneratorSpec::Constant(b), &d, &pairs[..20])?;
    let mut gen_ok = true;
    for t in [0, 7, 100] {
        let g = generating_operator(&u, t)?;
        gen_ok &= g.matrix.agrees_mod(&a, g.accuracy_exp);
    }
    let pass = semigroup && exp_ok && pert.identity_residual == 0.0 && pert.bound_holds && gen_ok;
    Ok((
        pass,
        format!(
            "d=3; identity+semigroup {semigroup}, EXP to N-1 {exp_ok}, perturbation residual {} diff {:.3e} <= {:.3e}, generator {gen_ok}",
            pert.identity_residual, pert.difference, pert.bound
        ),
    ))
}

fn expected_character() -> Outcome {
    let (p, n) = (3, 8);
    let d = BallSpec::unit_ball(p, n, 3);
    let sampler = WienerSampler::Tree(TreeWiener::standard(0.5, 1.0, d.clone())?);
    let psi = GridFunction::from_fn(d.clone(), |_, u| &PAdic::one(p, n) + u);
    let gamma = PAdic::from_rational(p, n, 1, 3)?;
    let mut pass = true;
    let mut worst = 0.0f64;
    for t in [1, 5, 13, 22, 26] {
        let r = verify_char_expectation(&psi, &sampler, &gamma, &PAdic::one(p, n), t, 100_000, 31)?;
        worst = worst.max((r.empirical.re - r.analytic.re).abs().max((r.empirical.im - r.analytic.im).abs()));
        pass &= r.pass;
    }
    Ok((pass, format!("5 points, S=100000, largest deviation {worst:.4} (tolerance {:.4})", 4.0 / 100_000f64.sqrt())))
}

fn determinism() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let tmp = tempfile::tempdir().expect("tempdir");
    let mut pass = true;
    let mut notes = Vec::new();
    for cmd in [Command::Charfun, Command::Sample, Command::Solve, Command::Evolve, Command::Verify] {
        let cfg = dir.join(format!("{}.toml", cmd.name()));
        let a = tmp.path().join(format!("{}-a", cmd.name()));
        let b = tmp.path().join(format!("{}-b", cmd.name()));
        let ra = run(cmd, &cfg, None, &a);
        let rb = run(cmd, &cfg, None, &b);
        let mut same = ra.is_ok() && rb.is_ok();
        for entry in std::fs::read_dir(&a).expect("outputs") {
            let name = entry.expect("entry").file_name();
            same &= std::fs::read(a.join(&name)).ok() == std::fs::read(b.join(&name)).ok();
        }
        pass &= same;
        notes.push(format!("{} {}", cmd.name(), if same { "identical" } else { "DIFFERS" }));
    }
    Ok((pass, notes.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("exact identities", identities, Duration::from_secs(10)),
        ("characteristic functional", characteristic_functional, Duration::from_secs(60)),
        ("ultrametric inequality", ultrametric_inequality, Duration::from_secs(5)),
        ("shell distribution", shell_distribution_check, Duration::MAX),
        ("Picard solver", picard, Duration::from_secs(30)),
        ("generalized solver", generalized, Duration::MAX),
        ("moment and stability diagnostics", diagnostics, Duration::MAX),
        ("evolution suite", evolution, Duration::from_secs(30)),
        ("expected character", expected_character, Duration::from_secs(60)),
        ("determinism", determinism, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let ok = ok && in_time;
        if !ok {
            failed += 1;
        }
        let budget = if *limit == Duration::MAX { String::new() } else { format!(" / {}s", limit.as_secs()) };
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.2}s{budget}]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
