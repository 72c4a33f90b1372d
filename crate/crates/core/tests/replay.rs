use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twomem::{ActionId, MemoryKind, ReplayBuffer, StateId, Transition};

// Upper 0.001 quantiles of the chi-square distribution.
const CHI2_999_DF4: f64 = 18.467;
const CHI2_999_DF9: f64 = 27.877;

fn tagged(i: usize, source: MemoryKind) -> Transition {
    Transition {
        state: StateId(i),
        action: ActionId(0),
        reward: 0.0,
        next_state: StateId(i),
        terminal: false,
        source,
    }
}

fn chi_square(counts: &[usize], total: usize) -> f64 {
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum()
}

fn draw_counts(
    buffer: &ReplayBuffer,
    draws: usize,
    filter: Option<MemoryKind>,
    seed: u64,
) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0; 16];
    let mut done = 0;
    while done < draws {
        for t in buffer.sample_uniform(100, &mut rng, filter) {
            counts[t.state.0] += 1;
            done += 1;
        }
    }
    counts
}

#[test]
fn sampling_is_uniform_over_ten_elements() {
    let mut buffer = ReplayBuffer::new(10);
    // Overfill so the stored window has wrapped.
    for i in 0..13 {
        buffer.push(tagged(i, MemoryKind::Rl));
    }
    let counts = draw_counts(&buffer, 100_000, None, 2024);
    assert!(
        counts[..3].iter().all(|&c| c == 0),
        "evicted elements were drawn"
    );
    let stat = chi_square(&counts[3..13], 100_000);
    assert!(stat < CHI2_999_DF9, "chi-square {stat:.2}");
}

#[test]
fn filtered_sampling_is_uniform_over_matching_elements() {
    let mut buffer = ReplayBuffer::new(10);
    for i in 0..10 {
        let source = if i % 2 == 0 {
            MemoryKind::Rl
        } else {
            MemoryKind::Ec
        };
        buffer.push(tagged(i, source));
    }
    let counts = draw_counts(&buffer, 50_000, Some(MemoryKind::Rl), 99);
    let odd: usize = counts.iter().skip(1).step_by(2).sum();
    assert_eq!(odd, 0);
    let even: Vec<usize> = counts.iter().step_by(2).take(5).copied().collect();
    let stat = chi_square(&even, 50_000);
    assert!(stat < CHI2_999_DF4, "chi-square {stat:.2}");
}
