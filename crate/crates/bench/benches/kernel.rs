use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use truthkit::eval::holds;
use truthkit::hierarchy::true_k;
use truthkit::proofcheck::prove;
use truthkit::schemes::{scheme_sweep, SchemeTag};
use truthkit::syntax::enumerate::{random_formula, sentences, up_to};
use truthkit::{stage, Var};

fn closed_pool(n: u32, count: usize) -> Vec<truthkit::Formula> {
    let m = stage(n).unwrap();
    let consts: Vec<_> = m.elements().map(|e| m.constant(e)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let vars = [Var::new("x"), Var::new("y")];
    (0..count)
        .map(|_| truthkit::syntax::ecl(&random_formula(&mut rng, &vars, &consts, 5)))
        .collect()
}

fn evaluation(c: &mut Criterion) {
    for n in [3, 4] {
        let m = stage(n).unwrap();
        let pool = closed_pool(n, 64);
        c.bench_function(&format!("holds/stage{n}/64 random sentences"), |b| {
            b.iter(|| pool.iter().filter(|s| holds(&m, s).unwrap()).count())
        });
    }
    let m = stage(3).unwrap();
    let consts: Vec<_> = m.elements().map(|e| m.constant(e)).collect();
    let pool = sentences(&[Var::new("x")], &consts, 3);
    c.bench_function("true_k/stage3/depth 3 sentences", |b| {
        b.iter(|| pool.iter().filter(|s| true_k(&m, 3, s).unwrap()).count())
    });
}

fn sweep(c: &mut Criterion) {
    let m = stage(3).unwrap();
    for tag in [SchemeTag::Sep, SchemeTag::Repl] {
        let templates = up_to(&tag.template_vars(), &[], 2);
        c.bench_function(&format!("scheme_sweep/stage3/{tag}"), |b| {
            b.iter(|| scheme_sweep(&m, tag, black_box(&templates), false).unwrap())
        });
    }
}

fn proving(c: &mut Criterion) {
    let goals = [
        "(or (mem x y) (not (mem x y)))",
        "(imp (all x (mem x y)) (mem y y))",
        "(eq x x)",
    ]
    .map(|s| truthkit::parse(s).unwrap());
    c.bench_function("prove/three goals", |b| {
        b.iter(|| {
            goals
                .iter()
                .filter(|g| prove(&Default::default(), g, 2_000).is_some())
                .count()
        })
    });
}

criterion_group!(benches, evaluation, sweep, proving);
criterion_main!(benches);
