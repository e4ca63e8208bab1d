//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the lines always show.

use std::collections::{BTreeSet, HashSet};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shiftlab_core::basex::{delta_exact, LevelColoring};
use shiftlab_core::builtin;
use shiftlab_core::counting::{
    count_rect, periodic_tile_lower_bound, spectral_entropy_1d, strip_entropy, upper_term, Limits,
};
use shiftlab_core::exact::{pow2_neg, ratio, to_f64, Enclosure};
use shiftlab_core::geometry::{board, i_set, residue_levels, residue_positions};
use shiftlab_core::irreducible::{entropy_to_precision, IrreducibleLimits};
use shiftlab_core::machine::{
    board_superimpose, corrupt_one_cell, prune_run_with, run_bounded, samples, verify_superimposed,
    PruneTable, PruneVerdict, RSeq, RunOutcome, Superimposition,
};
use shiftlab_core::realization::{entropy_bracket, TargetSpec};
use shiftlab_core::substitution::{expand, zero_entropy_bound, SubstitutionRule};
use shiftlab_core::{enumerate_locally_admissible, Alphabet, Mode, Shape, Symbol, Syntax};

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

fn lo(e: &Enclosure) -> BigRational {
    e.lo().cloned().expect("finite enclosure")
}

fn hi(e: &Enclosure) -> BigRational {
    e.hi().cloned().expect("finite enclosure")
}

/// Rational within `1e-15` below a float, for interval membership.
fn near(x: f64) -> (BigRational, BigRational) {
    let r = BigRational::from_float(x).unwrap();
    let eps = BigRational::new(1.into(), 1_000_000_000_000_000u64.into());
    (&r - &eps, r + eps)
}

fn c1_full_shift() -> Check {
    let limits = Limits::default();
    for k in 0..=3u32 {
        let full = ok(builtin::full_shift(1 << k, 2))?;
        for n in 1..=6 {
            let t = ok(upper_term(&full, n, &limits))?;
            ensure!(
                t.bound.is_exact() && t.bound.contains(&BigRational::from_integer(k.into())),
                "k={k}, n={n}: {:?}",
                t.bound
            );
        }
    }
    Ok("2^k symbols, k<=3, n<=6: every term is exactly k".into())
}

fn c2_golden_mean() -> Check {
    let g = builtin::golden_mean();
    let tol = BigRational::new(1.into(), 1_000_000_000u64.into());
    let e = ok(spectral_entropy_1d(&g, &tol))?;
    ensure!(e.width().unwrap() <= tol, "width {:?}", e.width());
    // closed form, independently in floating point
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let (a, b) = near(phi.log2());
    ensure!(lo(&e) <= b && a <= hi(&e), "{e:?} misses log2(phi)");

    let limits = Limits::default();
    let mut fib = vec![BigUint::zero(), BigUint::one()];
    while fib.len() < 30 {
        let n = fib.len();
        let next = &fib[n - 1] + &fib[n - 2];
        fib.push(next);
    }
    let mut prev: Option<(usize, BigUint)> = None;
    for n in 1..=24usize {
        let t = ok(upper_term(&g, n, &limits))?;
        ensure!(t.count == fib[n + 2], "n={n}: count {} vs F_{}", t.count, n + 2);
        ensure!(lo(&t.bound) > hi(&e), "n={n}: term not above the entropy");
        if let Some((m, c)) = &prev {
            // u_n < u_m  <=>  c_n^m < c_m^n
            ensure!(
                Pow::pow(&t.count, *m as u32) < Pow::pow(c, n as u32),
                "u_{n} >= u_{m}"
            );
        }
        prev = Some((n, t.count));
    }
    Ok(format!("enclosure [{:.12}, {:.12}], 24 decreasing terms", e.lo_f64(), e.hi_f64()))
}

/// Colorings whose every fully contained 2x2 window has no two adjacent 1s.
fn brute_hard_squares(n: usize, m: usize) -> u64 {
    (0u64..1 << (n * m))
        .filter(|&mask| {
            let on = |x: usize, y: usize| mask >> (y * n + x) & 1 == 1;
            (0..m.saturating_sub(1)).all(|y| {
                (0..n.saturating_sub(1)).all(|x| {
                    let [a, b, c, d] = [on(x, y), on(x + 1, y), on(x, y + 1), on(x + 1, y + 1)];
                    !(a && b || a && c || b && d || c && d)
                })
            })
        })
        .count() as u64
}

fn c3_hard_squares() -> Check {
    let hs = builtin::hard_squares();
    for n in 1..=16usize {
        for m in 1..=16 / n {
            let c = ok(count_rect(&hs, n, m))?;
            let want = brute_hard_squares(n, m);
            ensure!(c.count == BigUint::from(want), "{n}x{m}: {} vs {want}", c.count);
        }
    }
    for (n, want) in [(2, 7u32), (3, 63), (4, 1234)] {
        ensure!(ok(count_rect(&hs, n, n))?.count == BigUint::from(want), "{n}x{n} != {want}");
    }
    let limits = Limits::default();
    let tol = BigRational::new(1.into(), 1u64.checked_shl(30).unwrap().into());
    let strip = ok(strip_entropy(&hs, 10, &tol, &limits))?;
    // the strip value is per row of 10 sites
    let floor = ratio(587, 1000);
    let strip_hi = hi(&strip) / BigRational::from_integer(10.into());
    ensure!(lo(&strip) / BigRational::from_integer(10.into()) >= floor, "strip oracle below 0.587");
    let mut terms = Vec::new();
    for n in 1..=10 {
        let t = ok(upper_term(&hs, n, &limits))?;
        ensure!(lo(&t.bound) >= floor, "u_{n} = {:?} < 0.587", t.bound);
        terms.push(t);
    }
    for w in terms.windows(2).skip(3) {
        let (a, b) = (&w[0], &w[1]);
        let (n, m) = (a.n as u32, b.n as u32);
        ensure!(
            Pow::pow(&b.count, n * n) < Pow::pow(&a.count, m * m),
            "u_{m} >= u_{n}"
        );
    }
    Ok(format!(
        "brute force agrees for n*m<=16; u_10 = {:.6}; strip(10) = {:.6}",
        terms[9].bound.lo_f64(),
        to_f64(&strip_hi)
    ))
}

fn random_one_step(rng: &mut ChaCha8Rng) -> Syntax {
    let alpha = Arc::new(Alphabet::numeric(2));
    let shape = Shape::boxed(&[0, 0], &[1, 1]).unwrap();
    let forbidden: Vec<_> = (0u32..16)
        .filter(|_| rng.gen_bool(0.3))
        .map(|c| (0..4).map(|i| Symbol((c >> i) & 1)).collect::<Vec<_>>())
        .collect();
    Syntax::new(alpha, shape, Mode::Forbidden, forbidden).unwrap()
}

fn c4_one_sided() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let limits = Limits::default();
    let mut with_lower = 0;
    let cases = 120;
    for case in 0..cases {
        let s = random_one_step(&mut rng);
        let mut lower: Option<BigRational> = None;
        for (p, q) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 4)] {
            if let Some(t) = ok(periodic_tile_lower_bound(&s, p, q, &limits))? {
                let l = lo(&t.bound);
                if lower.as_ref().is_none_or(|b| l > *b) {
                    lower = Some(l);
                }
            }
        }
        for n in 1..=6 {
            let u = ok(upper_term(&s, n, &limits))?;
            if let Some(l) = &lower {
                ensure!(!u.bound.is_neg_infinity(), "case {case}: empty box but periodic points");
                ensure!(hi(&u.bound) >= *l, "case {case}: u_{n} below tile bound");
            }
        }
        with_lower += lower.is_some() as usize;
        for n in 1..=2usize {
            let small: HashSet<_> =
                ok(enumerate_locally_admissible(&s, &ok(Shape::rect(&[n, n]))?, 1 << 22))?
                    .into_iter()
                    .collect();
            let f = ok(Shape::rect(&[n, n]))?;
            for big in ok(enumerate_locally_admissible(&s, &ok(Shape::rect(&[n + 1, n + 1]))?, 1 << 22))? {
                let r = big.restrict(&f).expect("nonempty");
                ensure!(small.contains(&r), "case {case}: restriction to F_{n} not enumerated");
            }
        }
    }
    Ok(format!("{cases} random syntaxes, {with_lower} with periodic lower evidence"))
}

fn c5_squeeze() -> Check {
    let limits = IrreducibleLimits::default();
    let hs = builtin::hard_squares();
    let tol = BigRational::new(1.into(), 1u64.checked_shl(30).unwrap().into());
    let strip = ok(strip_entropy(&hs, 10, &tol, &limits.count))?;
    let hs_ref = (strip.lo_f64() + strip.hi_f64()) / 20.0;
    let mut notes = Vec::new();
    for (name, s, reference) in [
        ("full", ok(builtin::full_shift(2, 2))?, 1.0),
        ("hard-squares", hs, hs_ref),
    ] {
        let r = ok(entropy_to_precision(&s, 2, &limits))?;
        ensure!(r.reached && r.width < ratio(1, 2), "{name}: width {}", to_f64(&r.width));
        let mid = (to_f64(&r.lower) + to_f64(&r.upper)) / 2.0;
        ensure!((mid - reference).abs() <= 0.25, "{name}: midpoint {mid} vs {reference}");
        for a in &r.steps {
            for b in &r.steps {
                if let (Some(l), Some(u)) = (&a.lower, &b.upper) {
                    ensure!(lo(&l.bound) <= hi(&u.bound), "{name}: s({}) > u({})", a.k, b.k);
                }
            }
        }
        notes.push(format!("{name} [{:.4}, {:.4}]", to_f64(&r.lower), to_f64(&r.upper)));
    }
    Ok(notes.join("; "))
}

fn c6_two_net() -> Check {
    let rule = SubstitutionRule::two_net();
    let bullet = ok(rule.alphabet().symbol("•"))?;
    for n in 0..=6u32 {
        let b = ok(expand(&rule, bullet, n))?.block;
        let got: BTreeSet<(usize, usize)> = (1..=b.side)
            .flat_map(|y| (1..=b.side).map(move |x| (x, y)))
            .filter(|&(x, y)| b.at(x, y) == bullet.0)
            .collect();
        let want: BTreeSet<(usize, usize)> = (1..=b.side)
            .flat_map(|y| (1..=b.side).map(move |x| (x, y)))
            .filter(|&(x, y)| x.trailing_zeros() == y.trailing_zeros())
            .collect();
        ensure!(got == want, "n={n}: bullet set differs");
    }
    Ok("bullets match equal 2-adic valuation for n<=6".into())
}

fn c7_boards() -> Check {
    for n in 1..=6u32 {
        let s = ok(i_set(n))?;
        ensure!(s.len() == 4usize.pow(n), "|I_{n}| = {}", s.len());
        ensure!(s.iter().max() == Some(&5u64.pow(n)), "max I_{n}");
    }
    for n in 1..=3u32 {
        let b = ok(board(n))?;
        let want = 2 * 4u64.pow(n) * 5u64.pow(n) - 16u64.pow(n);
        let got = b.cells().count() as u64;
        ensure!(got == want && b.cell_count() == want, "board {n}: {got} vs {want}");
    }
    for big_n in 1..=4u32 {
        let m = 1u64 << big_n;
        let rs = ok(residue_positions(big_n))?;
        let mut seen = vec![0u32; m as usize];
        for r in &rs {
            let res = (&r.position % BigUint::from(m)).to_u64().unwrap();
            ensure!(res == r.residue, "stored residue differs");
            seen[res as usize] += 1;
        }
        ensure!(seen.iter().all(|&c| c == 1), "N={big_n}: residues {seen:?}");
    }
    Ok("index sets, board sizes and residue systems agree".into())
}

fn c8_prune_identity() -> Check {
    // independent recomputation of the share from the residue system
    let mut checked = 0u64;
    for big_n in 1..=6u32 {
        let levels = ok(residue_levels(big_n))?;
        for rho in LevelColoring::all_up_to(8) {
            let ones = levels.iter().filter(|(l, _)| rho.bit(*l)).count();
            let delta_n = BigRational::new(ones.into(), (1u64 << big_n).into());
            let zero_level = levels.iter().find(|(_, r)| *r == 0).unwrap().0;
            let mut rhs = BigRational::zero();
            for n in 1..=big_n {
                if rho.bit(n) {
                    rhs += pow2_neg(n);
                }
            }
            if rho.bit(zero_level) {
                rhs += pow2_neg(big_n);
            }
            ensure!(delta_n == rhs, "identity fails for {rho} at N={big_n}");
            let gap = (&delta_n - delta_exact(&rho)).abs();
            ensure!(gap <= pow2_neg(big_n) + pow2_neg(rho.len() as u32), "gap too large");
            checked += 1;
        }
    }
    let table = ok(PruneTable::new(12))?;
    for k in 0..=16i64 {
        let h = ratio(k, 16);
        let r = RSeq::Const(h.clone());
        for rho in LevelColoring::all_up_to(8) {
            let o = ok(prune_run_with(&table, &rho, &r))?;
            let halts_early = matches!(o.verdict, PruneVerdict::Halted { at } if at as usize <= rho.len() + 4);
            ensure!(
                o.halted() == halts_early && halts_early == (delta_exact(&rho) > h),
                "h={k}/16, rho={rho}: {:?}",
                o.verdict
            );
        }
    }
    Ok(format!("{checked} identity checks; dichotomy for 17 targets x 511 colorings"))
}

fn c9_boards_and_machines() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let corpus = samples::corpus();
    ensure!(corpus.len() >= 5, "corpus too small");
    let mut patterns = 0;
    for n in 1..=2u32 {
        let b = ok(board(n))?;
        let width = b.index.len();
        for (name, m) in &corpus {
            let mut inputs: Vec<Vec<bool>> = (0..4).map(|_| (0..width).map(|_| rng.gen()).collect()).collect();
            inputs.push(vec![false; width]);
            inputs.push(vec![true; width]);
            let mut corrupted = false;
            for bits in &inputs {
                let run = run_bounded(m, &|i| bits.get(i).copied().unwrap_or(false), width as u64, false);
                let sup = ok(board_superimpose(m, &b, bits))?;
                match (&run.outcome, &sup) {
                    (RunOutcome::Running, Superimposition::Pattern(p)) => {
                        ensure!(verify_superimposed(p, m, &b), "{name}: valid pattern rejected");
                        patterns += 1;
                        if !corrupted {
                            for _ in 0..100 {
                                let (bad, at) = corrupt_one_cell(p, m, &mut rng);
                                ensure!(!verify_superimposed(&bad, m, &b), "{name}: corruption at {at:?} accepted");
                            }
                            corrupted = true;
                        }
                    }
                    (RunOutcome::Halted(t), Superimposition::Infeasible { halt_step }) => {
                        ensure!(t == halt_step, "{name}: halt step {t} vs {halt_step}");
                    }
                    _ => return Err(format!("{name}, n={n}: feasibility disagrees with the run")),
                }
            }
        }
    }
    Ok(format!("{} machines, levels 1-2, {patterns} patterns verified", corpus.len()))
}

fn c10_realization() -> Check {
    let (l, big_n) = (5usize, 8u32);
    for h in [ratio(0, 1), ratio(1, 2), ratio(3, 4), ratio(1, 1)] {
        let t = TargetSpec::constant(h.clone());
        for n in [4u64, 8, 16, 32] {
            let b = ok(entropy_bracket(&t, n, l, big_n))?;
            ensure!(b.lower <= h && h <= b.upper, "h={h}, n={n}: [{}, {}]", b.lower, b.upper);
            let slack = pow2_neg(n as u32 - 1) + BigRational::new(((l + 2) as u64).into(), n.into());
            ensure!(&b.upper - &b.lower <= slack, "h={h}, n={n}: bracket too wide");
        }
    }
    Ok("h in {0, 1/2, 3/4, 1}, n in {4, 8, 16, 32}".into())
}

fn c11_zero_bound() -> Check {
    let rule = SubstitutionRule::two_net();
    for (n, m) in [(8u64, 1u32), (64, 2), (1024, 3), (1000, 3)] {
        let km = 2u64.pow(m);
        let inner = (n / km).saturating_sub(2);
        let want = BigRational::new((inner * inner).into(), (n * n).into())
            + BigRational::new((4 * km).into(), n.into());
        let got = ok(zero_entropy_bound(&rule, n, m))?;
        ensure!(got.is_exact() && got.contains(&want), "n={n}, m={m}: {got:?} vs {want}");
    }
    let v = ok(zero_entropy_bound(&rule, 1024, 3))?;
    ensure!(hi(&v) < ratio(2, 100) + ratio(1, 8), "m=3, n=1024: {}", v.hi_f64());
    Ok(format!("m=3, n=1024: {:.6}", v.hi_f64()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Duration); 11] = [
        ("full shift terms", c1_full_shift, Duration::from_secs(1)),
        ("1D golden mean", c2_golden_mean, Duration::from_secs(1)),
        ("2D hard squares", c3_hard_squares, Duration::from_secs(30)),
        ("one-sided upper terms", c4_one_sided, Duration::from_secs(60)),
        ("irreducible squeeze", c5_squeeze, Duration::from_secs(60)),
        ("2-net expansion", c6_two_net, Duration::from_secs(1)),
        ("board combinatorics", c7_boards, Duration::from_secs(5)),
        ("pruning identity", c8_prune_identity, Duration::from_secs(30)),
        ("machines on boards", c9_boards_and_machines, Duration::from_secs(60)),
        ("realization bracket", c10_realization, Duration::from_secs(120)),
        ("zero-entropy bound", c11_zero_bound, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > *budget => Err(format!("over the {budget:?} budget")),
            other => other,
        };
        match outcome {
            Ok(note) => println!("PASS {:>2} {name}: {note} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
