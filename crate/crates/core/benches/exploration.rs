use chorreal_core::complement::complement_dual;
use chorreal_core::complement::verify_complement;
use chorreal_core::global::{project, GlobalType};
use chorreal_core::models::CommModel;
use chorreal_core::msc::universe;
use chorreal_core::oracle::{enumerate_synch_mscs, explore};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::path::Path;

fn corpus_type(file: &str) -> GlobalType {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(file);
    GlobalType::load(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Runs `f` on the global pool and on a one-thread pool. Without the
/// `parallel` feature both runs are sequential.
fn compare(c: &mut Criterion, group: &str, f: impl Fn() + Sync) {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    let label = if chorreal_core::is_parallel() {
        "parallel"
    } else {
        "sequential-build"
    };
    g.bench_function(BenchmarkId::new(label, rayon::current_num_threads()), |b| b.iter(&f));
    g.bench_function(BenchmarkId::new("one-thread", 1), |b| b.iter(|| single.install(&f)));
    g.finish();
}

fn benches(c: &mut Criterion) {
    let ex = project(&corpus_type("ex_global_type.gt"));
    compare(c, "explore-synch", || {
        explore(&ex, CommModel::Synch, 16, 1);
    });
    let g2 = project(&corpus_type("intro_g2.gt"));
    compare(c, "explore-p2p", || {
        explore(&g2, CommModel::P2p, 10, 2);
    });

    let g = corpus_type("intro_g2.gt");
    let comp = complement_dual(&g).unwrap();
    compare(c, "verify-complement", || {
        assert!(verify_complement(&g, &comp, 3).unwrap().holds());
    });

    let procs = universe(["p", "q", "r"]);
    let msgs = universe(["a", "b"]);
    compare(c, "enumerate-mscs", || {
        enumerate_synch_mscs(&procs, &msgs, 4);
    });
}

criterion_group!(exploration, benches);
criterion_main!(exploration);
