use cotex_core::urns::{
    game_value_bruteforce, optimal_adversary, play, theorem2_bound, GameState, Greedy, RandomAdversary, ValueTable,
};

/// Direct transcription of the recurrence, memoized on (N, u).
fn reference_value(n: usize, u: usize, k: usize, delta: usize, memo: &mut Vec<Vec<Option<u32>>>) -> u32 {
    if delta * u <= n {
        return 0;
    }
    if let Some(v) = memo[n][u] {
        return v;
    }
    let a = reference_value(n - n.div_ceil(u) + 1, u - 1, k, delta, memo);
    let b = reference_value(n - n / u + 1, u - 1, k, delta, memo);
    let mut best = a.max(b);
    if n < k {
        best = best.max(reference_value(n + 1, u, k, delta, memo));
    }
    memo[n][u] = Some(best + 1);
    best + 1
}

#[test]
fn table_matches_plain_recursion() {
    for k in 1..=16 {
        for delta in 1..=16u32 {
            let t = ValueTable::new(k, delta);
            let mut memo = vec![vec![None; k + 1]; k + 2];
            for u in 0..=k {
                for n in u.min(k)..=k {
                    assert_eq!(
                        t.get(n, u),
                        reference_value(n, u, k, delta as usize, &mut memo),
                        "k={k} delta={delta} N={n} u={u}"
                    );
                }
            }
        }
    }
}

#[test]
fn brute_force_agrees_with_recurrence_on_standard_and_generalized_inits() {
    for k in 1..=5 {
        for delta in 1..=5u32 {
            let t = ValueTable::new(k, delta);
            let s = GameState::standard(k, delta);
            assert_eq!(game_value_bruteforce(&s).unwrap(), t.get(k, k), "standard k={k} delta={delta}");
            for u in 1..k {
                let s = GameState::generalized(k, u, delta).unwrap();
                assert_eq!(game_value_bruteforce(&s).unwrap(), t.get(u, u), "generalized k={k} u={u} delta={delta}");
            }
        }
    }
}

#[test]
fn adversaries_respect_theorem_bound() {
    for k in [1usize, 2, 3, 5, 8, 13, 32, 64] {
        for delta in [2u32, 3, 7, 16, 64] {
            let bound = theorem2_bound(k, delta);
            let g = play(&mut Greedy, &GameState::standard(k, delta)).unwrap();
            assert!(g.length as f64 <= bound);
            assert!(g.max_spread <= 1);
            for seed in 0..3 {
                let r = play(&mut RandomAdversary::new(seed), &GameState::standard(k, delta)).unwrap();
                assert!(r.length as f64 <= bound);
            }
        }
    }
    let mut opt = optimal_adversary(5, 5).unwrap();
    let o = play(&mut opt, &GameState::standard(5, 5)).unwrap();
    assert_eq!(o.length as u32, ValueTable::new(5, 5).get(5, 5));
}

#[test]
fn greedy_realizes_the_game_value() {
    for k in 1..=12 {
        for delta in 1..=12u32 {
            let g = play(&mut Greedy, &GameState::standard(k, delta)).unwrap();
            assert_eq!(g.length as u32, ValueTable::new(k, delta).get(k, k), "k={k} delta={delta}");
        }
    }
}

#[test]
fn lemma2_over_full_tables() {
    for k in 1..=16 {
        for delta in 1..=16u32 {
            let t = ValueTable::new(k, delta);
            for u in 0..=k {
                for n in 0..k {
                    assert!(t.get(n + 1, u) <= t.get(n, u), "monotonicity k={k} delta={delta} N={n} u={u}");
                    if (delta as usize) * u > n {
                        assert_eq!(t.get(n, u), 1 + t.get(n + 1, u), "argmax k={k} delta={delta} N={n} u={u}");
                    }
                }
            }
        }
    }
}
