use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qunforge::attacks::{AttackFactory, AttackId};
use qunforge::games::{estimate_win_rate, estimate_win_rate_serial, GameConfig, GameMode};
use qunforge::primitives::{PrimitiveDescriptor, PrimitiveKind};
use qunforge::verifiers::TestConfig;

fn config(kind: PrimitiveKind, trials: usize) -> GameConfig {
    GameConfig {
        mode: GameMode::QSel,
        q: 2,
        mu: 0.5,
        strong: false,
        aua: false,
        primitive: PrimitiveDescriptor {
            kind,
            n: 2,
            m: 2,
            l: 2,
            seed: 1,
        },
        test: TestConfig::default(),
        trials,
        seed: 7,
        dump_states: false,
    }
}

fn trials(c: &mut Criterion) {
    let f = AttackFactory::new(AttackId::Thm5Qea);
    let mut g = c.benchmark_group("thm5-qea");
    g.sample_size(10);
    for kind in [PrimitiveKind::DeterministicMac, PrimitiveKind::RandMac] {
        let cfg = config(kind, 1000);
        let name = format!("{kind:?}");
        g.bench_with_input(BenchmarkId::new("rayon", &name), &cfg, |b, cfg| {
            b.iter(|| estimate_win_rate(black_box(cfg), &f).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("serial", &name), &cfg, |b, cfg| {
            b.iter(|| estimate_win_rate_serial(black_box(cfg), &f).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, trials);
criterion_main!(benches);
