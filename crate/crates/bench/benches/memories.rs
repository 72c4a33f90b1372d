use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twomem::env::WindyGridLayout;
use twomem::{
    ActionId, AgentConfig, AgentMode, EcMemory, Environment, FeatureExtractor, MemoryKind, QTable,
    ReplayBuffer, Schedule, StateId, Transition, TwoMemoryAgent,
};

fn random_walk(env: &mut dyn Environment, rng: &mut ChaCha8Rng, len: usize) -> Vec<Transition> {
    let mut state = env.reset(rng);
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let action = ActionId(rng.random_range(0..env.spec().action_count));
        let step = env.step(action, rng).unwrap();
        out.push(Transition {
            state,
            action,
            reward: step.reward,
            next_state: step.next_state,
            terminal: step.absorbing(),
            source: MemoryKind::Ec,
        });
        state = if step.terminal {
            env.reset(rng)
        } else {
            step.next_state
        };
    }
    out
}

fn episodic(c: &mut Criterion) {
    let mut env = WindyGridLayout::default().build();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let episode = random_walk(&mut env, &mut rng, 200);
    let features = |s: StateId| env.features(s);

    c.bench_function("ec_update_200_steps", |b| {
        b.iter_batched(
            || EcMemory::new(4, 100_000, 3, FeatureExtractor::Identity),
            |mut mem| {
                mem.update_from_episode(black_box(&episode), 1.0, features)
                    .unwrap()
            },
            BatchSize::SmallInput,
        )
    });

    let mut full = EcMemory::new(4, 100_000, 3, FeatureExtractor::Identity);
    for _ in 0..50 {
        full.update_from_episode(&random_walk(&mut env.clone(), &mut rng, 200), 1.0, features)
            .unwrap();
    }
    // A point between cells, so the estimate always goes through the neighbours.
    let probe = [0.55, 0.42];
    c.bench_function("ec_knn_estimate", |b| {
        b.iter(|| full.estimate_q(black_box(&probe), ActionId(2)).unwrap())
    });
    c.bench_function("ec_select_action", |b| {
        b.iter(|| full.select_action(black_box(&probe), &mut rng))
    });
}

fn tabular(c: &mut Criterion) {
    let mut env = WindyGridLayout::default().build();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut buffer = ReplayBuffer::new(100_000);
    for (i, mut t) in random_walk(&mut env, &mut rng, 100_000)
        .into_iter()
        .enumerate()
    {
        t.source = if i % 3 == 0 {
            MemoryKind::Rl
        } else {
            MemoryKind::Ec
        };
        buffer.push(t);
    }
    c.bench_function("replay_sample_32", |b| {
        b.iter(|| buffer.sample_uniform(32, &mut rng, None))
    });
    c.bench_function("replay_sample_32_rl_only", |b| {
        b.iter(|| buffer.sample_uniform(32, &mut rng, Some(MemoryKind::Rl)))
    });
    let batch = buffer.sample_uniform(32, &mut rng, None);
    let mut q = QTable::new(70, 4, 0.1, 1.0);
    c.bench_function("td_update_32", |b| {
        b.iter(|| q.td_update(black_box(&batch)))
    });
}

fn training(c: &mut Criterion) {
    let mut group = c.benchmark_group("windy_two_memory");
    group.sample_size(10);
    group.bench_function("5000_steps", |b| {
        b.iter(|| {
            let mut env = WindyGridLayout::default().build();
            let config = AgentConfig {
                mode: AgentMode::TwoMemory,
                schedule: Schedule::for_budget(0.9, 0.1, 5_000).unwrap(),
                ..AgentConfig::default()
            };
            let mut agent = TwoMemoryAgent::new(config, &env).unwrap();
            while agent.global_step() < 5_000 {
                agent.run_training_episode(&mut env).unwrap();
            }
            agent.global_step()
        })
    });
    group.finish();
}

criterion_group!(benches, episodic, tabular, training);
criterion_main!(benches);
