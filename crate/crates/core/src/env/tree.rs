use super::{ActionId, EnvSpec, Outcome, StateId, TabularMdp};

/// The seven-state, two-action tree from the motivating example.
///
/// `s1` branches to `s2` (a1) or `s3` (a2). In `s2`, a1 ends at `s4` with
/// +10 and a2 ends at `s5` (-10) or `s6` (+20) with equal probability. Both
/// actions in `s3` end at `s7` with -20. Leaves are absorbing and the
/// discount is 1 so values are plain sums.
pub fn motivating_tree() -> TabularMdp {
    const STATES: usize = 7;
    const ACTIONS: usize = 2;
    let edge = |next: usize, probability: f64, reward: f64, terminal: bool| Outcome {
        next_state: tree_state(next),
        probability,
        reward,
        terminal,
    };
    let mut table = vec![Vec::new(); STATES * ACTIONS];
    let mut set = |s: usize, a: usize, outcomes: Vec<Outcome>| {
        table[tree_state(s).0 * ACTIONS + a - 1] = outcomes;
    };
    set(1, 1, vec![edge(2, 1.0, 0.0, false)]);
    set(1, 2, vec![edge(3, 1.0, 0.0, false)]);
    set(2, 1, vec![edge(4, 1.0, 10.0, true)]);
    set(
        2,
        2,
        vec![edge(5, 0.5, -10.0, true), edge(6, 0.5, 20.0, true)],
    );
    set(3, 1, vec![edge(7, 1.0, -20.0, true)]);
    set(3, 2, vec![edge(7, 1.0, -20.0, true)]);

    let features = (0..STATES)
        .map(|s| {
            let mut one_hot = vec![0.0; STATES];
            one_hot[s] = 1.0;
            one_hot
        })
        .collect();
    let spec = EnvSpec {
        name: super::MOTIVATING_TREE.to_string(),
        state_count: STATES,
        action_count: ACTIONS,
        max_episode_steps: 10,
        discount_default: 1.0,
    };
    TabularMdp::new(spec, tree_state(1), table, features).expect("tree table is well formed")
}

/// State `s^n` of the tree, numbered from 1.
pub fn tree_state(n: usize) -> StateId {
    assert!((1..=7).contains(&n), "tree states are s1..s7");
    StateId(n - 1)
}

/// Action `a^n` of the tree, numbered from 1.
pub fn tree_action(n: usize) -> ActionId {
    assert!((1..=2).contains(&n), "tree actions are a1, a2");
    ActionId(n - 1)
}
