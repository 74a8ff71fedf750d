use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use loopfire::bn::{local_dim_probe, stratified_scan, ProbeConfig, ScanConfig};
use loopfire::rank::RankConfig;
use loopfire::{CactusGraph, Divisor, Exec, RankEngine};

fn star() -> Arc<CactusGraph> {
    Arc::new(
        CactusGraph::parse("loop O 1\nloop R 7/5\nloop W 5/4\nloop S 9/7\nattach R O 0\nattach W O 1/2\nattach S O 3/4\n")
            .unwrap(),
    )
}

fn path6() -> Arc<CactusGraph> {
    Arc::new(
        CactusGraph::parse(
            "loop L1 1\nloop L2 1\nloop L3 1\nloop L4 1\nloop L5 1\nloop L6 1\n\
             attach L2 L1 1/2\nattach L3 L2 13/37\nattach L4 L3 11/29\nattach L5 L4 7/19\nattach L6 L5 5/23\n",
        )
        .unwrap(),
    )
}

// Every iteration gets a fresh engine so the memo does not hide the work.
fn engine(g: &Arc<CactusGraph>, exec: Exec) -> RankEngine {
    RankEngine::with_config(
        g,
        RankConfig {
            exec,
            ..RankConfig::default()
        },
    )
}

fn bench(c: &mut Criterion) {
    let modes = [
        ("sequential", Exec::Sequential),
        ("parallel", Exec::Parallel),
    ];

    let g = star();
    let mut group = c.benchmark_group("scan_star_r1_d3_n16");
    group.sample_size(10);
    for (name, exec) in modes {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let mut cfg = ScanConfig::new(1, 3, 16);
                cfg.exec = exec;
                stratified_scan(&engine(&g, exec), &cfg).unwrap()
            })
        });
    }
    group.finish();

    let g = path6();
    let d = Divisor::parse(&g, "chip L1 1/3 2\nchip L3 1/7 2\nchip L6 2/5 3\n").unwrap();
    let mut group = c.benchmark_group("rank_path6_deg7");
    group.sample_size(10);
    for (name, exec) in modes {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| engine(&g, exec).rank(&d, None).unwrap())
        });
    }
    group.finish();

    let g = star();
    let d = Divisor::parse(&g, "chip O 0 1\nchip O 1/2 1\nchip O 1/8 1\n").unwrap();
    let mut group = c.benchmark_group("probe_star_theta");
    group.sample_size(10);
    for (name, exec) in modes {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                local_dim_probe(
                    &engine(&g, exec),
                    &d,
                    1,
                    &ProbeConfig {
                        subset_limit: 3,
                        exec,
                    },
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
