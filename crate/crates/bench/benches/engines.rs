use criterion::{black_box, criterion_group, criterion_main, Criterion};
use shiftlab_bench::{ratio, sparse_levels, target_above};
use shiftlab_core::builtin::{golden_mean, hard_squares};
use shiftlab_core::counting::{count_rect, spectral_entropy_1d};
use shiftlab_core::geometry::board;
use shiftlab_core::machine::{board_superimpose, prune_run, samples};
use shiftlab_core::substitution::expand;
use shiftlab_core::SubstitutionRule;

fn counting(c: &mut Criterion) {
    let hs = hard_squares();
    c.bench_function("count_rect hard squares 8x8", |b| {
        b.iter(|| count_rect(black_box(&hs), 8, 8).unwrap())
    });
    let g = golden_mean();
    let tol = ratio(1, 1_000_000_000);
    c.bench_function("spectral entropy golden mean", |b| {
        b.iter(|| spectral_entropy_1d(black_box(&g), &tol).unwrap())
    });
}

fn pruning(c: &mut Criterion) {
    let rho = sparse_levels(12);
    let r = target_above(12);
    c.bench_function("prune_run 12 levels N=10", |b| {
        b.iter(|| prune_run(black_box(&rho), &r, 10).unwrap())
    });
}

fn boards(c: &mut Criterion) {
    let spec = board(2).unwrap();
    let m = samples::walker();
    let bits = vec![false; spec.index.len()];
    c.bench_function("board_superimpose walker n=2", |b| {
        b.iter(|| board_superimpose(black_box(&m), &spec, &bits).unwrap())
    });
}

fn substitution(c: &mut Criterion) {
    let rule = SubstitutionRule::two_net();
    let seed = rule.alphabet().symbol("•").unwrap();
    c.bench_function("expand 2net depth 8", |b| {
        b.iter(|| expand(black_box(&rule), seed, 8).unwrap())
    });
}

criterion_group!(benches, counting, pruning, boards, substitution);
criterion_main!(benches);
