use twomem::env::{motivating_tree, tree_action, tree_state, TabularMdp, WindyGridLayout};
use twomem::{
    AgentConfig, AgentMode, Environment, MemoryKind, Schedule, Transition, TwoMemoryAgent,
};

fn config(mode: AgentMode, seed: u64) -> AgentConfig {
    AgentConfig {
        mode,
        seed,
        schedule: Schedule::for_budget(0.9, 0.1, 5_000).unwrap(),
        ..AgentConfig::default()
    }
}

fn train(
    agent: &mut TwoMemoryAgent,
    env: &mut dyn Environment,
    steps: u64,
) -> Vec<(f64, MemoryKind)> {
    let mut log = Vec::new();
    while agent.global_step() < steps {
        let o = agent.run_training_episode(env).unwrap();
        log.push((o.episode_return, o.memory));
    }
    log
}

/// Every (s, a) path through the tree once, as EC would see them.
fn tree_paths() -> Vec<Vec<Transition>> {
    let step = |s, a, r, next, terminal| Transition {
        state: tree_state(s),
        action: tree_action(a),
        reward: r,
        next_state: tree_state(next),
        terminal,
        source: MemoryKind::Ec,
    };
    vec![
        vec![step(1, 1, 0.0, 2, false), step(2, 1, 10.0, 4, true)],
        vec![step(1, 1, 0.0, 2, false), step(2, 2, -10.0, 5, true)],
        vec![step(1, 1, 0.0, 2, false), step(2, 2, 20.0, 6, true)],
        vec![step(1, 2, 0.0, 3, false), step(3, 1, -20.0, 7, true)],
        vec![step(1, 2, 0.0, 3, false), step(3, 2, -20.0, 7, true)],
    ]
}

#[test]
fn same_seed_same_everything() {
    let run = || {
        let mut env = WindyGridLayout::default().build();
        let mut agent = TwoMemoryAgent::new(config(AgentMode::TwoMemory, 5), &env).unwrap();
        let log = train(&mut agent, &mut env, 3_000);
        (log, agent.rl().snapshot(), agent.ec().snapshot())
    };
    assert_eq!(run(), run());
}

#[test]
fn different_seeds_diverge() {
    let run = |seed| {
        let mut env = WindyGridLayout::default().build();
        let mut agent = TwoMemoryAgent::new(config(AgentMode::TwoMemory, seed), &env).unwrap();
        train(&mut agent, &mut env, 2_000)
    };
    assert_ne!(run(1), run(2));
}

#[test]
fn without_sharing_rl_trains_only_on_its_own_data() {
    let mut env = WindyGridLayout::default().build();
    let cfg = AgentConfig {
        data_sharing: false,
        ..config(AgentMode::TwoMemory, 3)
    };
    let mut agent = TwoMemoryAgent::new(cfg, &env).unwrap();
    agent.record_batches();
    let log = train(&mut agent, &mut env, 5_000);
    assert!(log.iter().any(|(_, m)| *m == MemoryKind::Ec));
    assert!(agent.buffer().count_from(MemoryKind::Ec) > 0);
    let batches = agent.recorded_batches();
    assert!(!batches.is_empty());
    assert!(batches.iter().all(|t| t.source == MemoryKind::Rl));
}

#[test]
fn without_sharing_rl_episodes_leave_ec_alone() {
    let mut env = WindyGridLayout::default().build();
    let cfg = AgentConfig {
        data_sharing: false,
        ..config(AgentMode::TwoMemory, 8)
    };
    let mut agent = TwoMemoryAgent::new(cfg, &env).unwrap();
    let mut rl_episodes = 0;
    while rl_episodes < 20 {
        let before = agent.ec().snapshot();
        let o = agent.run_training_episode(&mut env).unwrap();
        if o.memory == MemoryKind::Rl {
            rl_episodes += 1;
            assert_eq!(agent.ec().snapshot(), before);
        }
    }
}

#[test]
fn evaluation_does_not_perturb_training() {
    let mut env = WindyGridLayout::default().build();
    let mut agent = TwoMemoryAgent::new(config(AgentMode::TwoMemory, 4), &env).unwrap();
    train(&mut agent, &mut env, 2_000);
    let mut twin = agent.clone();
    let mut eval_env = WindyGridLayout::default().build();
    for _ in 0..5 {
        agent.run_eval_episode(&mut eval_env).unwrap();
    }
    assert_eq!(agent.global_step(), twin.global_step());
    assert_eq!(agent.buffer().len(), twin.buffer().len());
    assert_eq!(agent.ec().snapshot(), twin.ec().snapshot());
    assert_eq!(agent.rl().snapshot(), twin.rl().snapshot());
    let mut env_b = env.clone();
    assert_eq!(
        train(&mut agent, &mut env, 4_000),
        train(&mut twin, &mut env_b, 4_000)
    );
}

#[test]
fn pure_ec_never_runs_td_updates() {
    let mut env = WindyGridLayout::default().build();
    let mut agent = TwoMemoryAgent::new(config(AgentMode::PureEc, 1), &env).unwrap();
    let log = train(&mut agent, &mut env, 3_000);
    assert!(log.iter().all(|(_, m)| *m == MemoryKind::Ec));
    assert_eq!(agent.td_updates(), 0);
    assert_eq!(agent.rl().q_sum(&env), 0.0);
    assert_eq!(agent.buffer().len() as u64, agent.global_step());
    assert!(!agent.ec().is_empty());
}

#[test]
fn pure_rl_never_writes_episodic_memory() {
    let mut env = WindyGridLayout::default().build();
    let mut agent = TwoMemoryAgent::new(config(AgentMode::PureRl, 1), &env).unwrap();
    let log = train(&mut agent, &mut env, 3_000);
    assert!(log.iter().all(|(_, m)| *m == MemoryKind::Rl));
    assert!(agent.ec().is_empty());
    assert_eq!(agent.td_updates(), agent.global_step() / 10);
}

#[test]
fn capped_episodes_do_not_reach_episodic_memory() {
    // Two states that only lead to each other: every episode hits the cap.
    let mdp = TabularMdp::parse(
        "states 2\nactions 1\nstart 0\nmax_steps 5\n0 0 1 1.0 -1 false\n1 0 0 1.0 -1 false\n",
    )
    .unwrap();
    let mut env = mdp;
    let mut agent = TwoMemoryAgent::new(config(AgentMode::PureEc, 1), &env).unwrap();
    let o = agent.run_training_episode(&mut env).unwrap();
    assert_eq!(o.steps, 5);
    assert!(agent.ec().is_empty());
    assert_eq!(agent.tracker().count(MemoryKind::Ec), 1);
}

#[test]
fn greedy_ec_follows_the_optimistic_branch() {
    let mut tree = motivating_tree();
    let cfg = AgentConfig {
        epsilon: 0.0,
        ..config(AgentMode::PureEc, 6)
    };
    let mut agent = TwoMemoryAgent::new(cfg, &tree).unwrap();
    for p in tree_paths() {
        agent
            .ec_mut()
            .update_from_episode(&p, 1.0, |s| tree.features(s))
            .unwrap();
    }
    for _ in 0..50 {
        let mut episode = agent.begin_episode(&mut tree);
        while !agent.advance(&mut episode, &mut tree).unwrap() {}
        let path: Vec<_> = episode
            .trajectory()
            .iter()
            .map(|t| (t.state, t.action))
            .collect();
        assert_eq!(
            path,
            [
                (tree_state(1), tree_action(1)),
                (tree_state(2), tree_action(2))
            ]
        );
        let o = agent.finish_episode(episode, &tree).unwrap();
        assert!(o.episode_return == -10.0 || o.episode_return == 20.0);
    }
}

#[test]
fn converged_rl_evaluates_to_ten() {
    let mut tree = motivating_tree();
    let mut agent = TwoMemoryAgent::new(config(AgentMode::PureRl, 2), &tree).unwrap();
    let optimal = [
        ((1, 1), 10.0),
        ((1, 2), -20.0),
        ((2, 1), 10.0),
        ((2, 2), 5.0),
        ((3, 1), -20.0),
        ((3, 2), -20.0),
    ];
    for ((s, a), v) in optimal {
        agent.rl_mut().set(tree_state(s), tree_action(a), v);
    }
    for _ in 0..20 {
        assert_eq!(
            agent.run_eval_episode(&mut tree).unwrap(),
            (10.0, MemoryKind::Rl)
        );
    }
}

#[test]
fn optimistic_ec_evaluates_to_five_on_average() {
    let mut tree = motivating_tree();
    let mut agent = TwoMemoryAgent::new(config(AgentMode::PureEc, 2), &tree).unwrap();
    for p in tree_paths() {
        agent
            .ec_mut()
            .update_from_episode(&p, 1.0, |s| tree.features(s))
            .unwrap();
    }
    let n = 4_000;
    let mut total = 0.0;
    for _ in 0..n {
        let (ret, memory) = agent.run_eval_episode(&mut tree).unwrap();
        assert_eq!(memory, MemoryKind::Ec);
        total += ret;
    }
    // Returns are -10 or 20 with equal odds: sd 15, so 3 sd of the mean is 45 / sqrt(n).
    let mean = total / n as f64;
    assert!((mean - 5.0).abs() < 45.0 / (n as f64).sqrt(), "mean {mean}");
}

#[test]
fn untrained_two_memory_agent_evaluates_with_ec() {
    let tree = motivating_tree();
    let agent = TwoMemoryAgent::new(config(AgentMode::TwoMemory, 1), &tree).unwrap();
    assert_eq!(agent.select_memory_for_eval(), MemoryKind::Ec);
}
