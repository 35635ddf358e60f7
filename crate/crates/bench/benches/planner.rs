use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use pareto_mcts::planner::{search, Objective, RewardSpec, SelectionRule};
use pareto_mcts::{pareto_front, GaussianProcess, GpParams};
use pareto_mcts_bench::{center, fitted_gp, grid_points, random_vectors, search_config};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    let spec = RewardSpec::new(vec![Objective::VarianceReduction, Objective::ValueSum]).unwrap();
    for n in [50, 200] {
        let gp = fitted_gp(n, 1);
        let cfg = search_config(300, SelectionRule::ParetoUcb);
        group.bench_with_input(BenchmarkId::new("pareto_300", n), &gp, |b, gp| {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            b.iter(|| search(center(), gp, &spec, &cfg, &mut rng).unwrap().child)
        });
    }
    group.finish();
}

fn bench_gp(c: &mut Criterion) {
    let mut group = c.benchmark_group("gp");
    for n in [100, 400] {
        let gp = fitted_gp(n, 2);
        let xs = gp.inputs().to_vec();
        let ys = gp.targets().to_vec();
        group.bench_with_input(BenchmarkId::new("fit", n), &n, |b, _| {
            b.iter(|| GaussianProcess::fit(GpParams::default(), black_box(&xs), black_box(&ys)).unwrap())
        });
        let queries = grid_points(30);
        group.bench_with_input(BenchmarkId::new("project_900", n), &gp, |b, gp| {
            b.iter(|| gp.project(black_box(&queries)))
        });
    }
    group.finish();
}

fn bench_front(c: &mut Criterion) {
    let mut group = c.benchmark_group("pareto_front");
    for (n, d) in [(15, 2), (100, 3), (1000, 2)] {
        let vs = random_vectors(n, d, 3);
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), n), &vs, |b, vs| {
            b.iter(|| pareto_front(black_box(vs)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_search, bench_gp, bench_front);
criterion_main!(benches);
