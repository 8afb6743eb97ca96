//! The balls-in-urns game that bounds how often BFDN reanchors at one depth.
//!
//! `k` urns hold balls; `U` is the set of urns the adversary has never
//! picked. Each step the adversary picks a non-empty urn `a` (which leaves
//! `U`) and the player moves one ball from `a` into some urn. The game ends
//! once every urn of `U` holds at least `Δ` balls. Urns are 0-indexed here.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::GameError;

/// Largest urn or ball count accepted by the exhaustive solver. `Δ` only
/// moves the stopping threshold, so it is not limited.
pub const BRUTE_FORCE_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    pub loads: Vec<u32>,
    pub untouched: Vec<bool>,
    pub delta: u32,
    pub t: usize,
}

impl GameState {
    /// One ball per urn, every urn untouched.
    pub fn standard(k: usize, delta: u32) -> Self {
        GameState { loads: vec![1; k], untouched: vec![true; k], delta, t: 0 }
    }

    /// `(k-u, 1, ..., 1)`: one urn holding `k-u` balls and `u` untouched
    /// singleton urns, `k` balls in total.
    pub fn generalized(k: usize, u: usize, delta: u32) -> Result<Self, GameError> {
        if u == 0 || u >= k {
            return Err(GameError::BadInit(format!("need 1 <= u <= k-1, got u={u} for k={k}")));
        }
        let mut loads = vec![1; u + 1];
        loads[0] = (k - u) as u32;
        let mut untouched = vec![true; u + 1];
        untouched[0] = false;
        Ok(GameState { loads, untouched, delta, t: 0 })
    }

    /// Number of urns.
    pub fn k(&self) -> usize {
        self.loads.len()
    }

    pub fn total(&self) -> u32 {
        self.loads.iter().sum()
    }

    /// `N`: balls inside `U`.
    pub fn balls_in_u(&self) -> u32 {
        self.in_u().map(|i| self.loads[i]).sum()
    }

    /// `u = |U|`.
    pub fn u(&self) -> usize {
        self.untouched.iter().filter(|&&b| b).count()
    }

    pub fn in_u(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.k()).filter(|&i| self.untouched[i])
    }

    pub fn is_over(&self) -> bool {
        self.in_u().all(|i| self.loads[i] >= self.delta)
    }

    /// Max minus min load over `U` (0 when `U` is empty).
    pub fn spread(&self) -> u32 {
        let (mut lo, mut hi) = (u32::MAX, 0);
        for i in self.in_u() {
            lo = lo.min(self.loads[i]);
            hi = hi.max(self.loads[i]);
        }
        hi.saturating_sub(lo.min(hi))
    }

    fn check_pick(&self, a: usize) -> Result<(), GameError> {
        if a >= self.k() {
            return Err(GameError::OutOfRange(a));
        }
        if self.loads[a] == 0 {
            return Err(GameError::EmptyUrn(a));
        }
        if self.is_over() {
            return Err(GameError::GameOver);
        }
        Ok(())
    }
}

/// The balancing player: after the adversary picks `a`, put the ball into
/// the least loaded untouched urn (smallest index on ties; back into `a`
/// when nothing is untouched). Applies the move and returns the urn.
pub fn player_balancing(state: &mut GameState, a: usize) -> Result<usize, GameError> {
    state.check_pick(a)?;
    state.untouched[a] = false;
    let b = balancing_target(state).unwrap_or(a);
    state.loads[a] -= 1;
    state.loads[b] += 1;
    state.t += 1;
    Ok(b)
}

fn balancing_target(state: &GameState) -> Option<usize> {
    state.in_u().min_by_key(|&i| (state.loads[i], i))
}

pub trait Adversary {
    fn name(&self) -> String;
    fn pick(&mut self, state: &GameState) -> usize;
}

/// Takes a ball from outside `U` when possible (smallest index), otherwise
/// the most loaded urn of `U` (smallest index on ties).
#[derive(Debug, Default, Clone)]
pub struct Greedy;

impl Adversary for Greedy {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn pick(&mut self, s: &GameState) -> usize {
        if let Some(a) = (0..s.k()).find(|&i| !s.untouched[i] && s.loads[i] > 0) {
            return a;
        }
        s.in_u().max_by_key(|&i| (s.loads[i], std::cmp::Reverse(i))).expect("game not over")
    }
}

/// Uniform over all non-empty urns.
#[derive(Debug, Clone)]
pub struct RandomAdversary {
    rng: ChaCha8Rng,
}

impl RandomAdversary {
    pub fn new(seed: u64) -> Self {
        RandomAdversary { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Adversary for RandomAdversary {
    fn name(&self) -> String {
        "random".into()
    }

    fn pick(&mut self, s: &GameState) -> usize {
        let legal: Vec<usize> = (0..s.k()).filter(|&i| s.loads[i] > 0).collect();
        *legal.choose(&mut self.rng).expect("some urn is non-empty")
    }
}

/// Exhaustive minimax solver against the balancing player.
#[derive(Debug, Default, Clone)]
pub struct BruteForce {
    memo: HashMap<(Vec<u32>, Vec<u32>, u32), u32>,
}

impl BruteForce {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(s: &GameState) -> (Vec<u32>, Vec<u32>, u32) {
        let mut inside: Vec<u32> = s.in_u().map(|i| s.loads[i]).collect();
        let mut outside: Vec<u32> = (0..s.k()).filter(|&i| !s.untouched[i]).map(|i| s.loads[i]).collect();
        inside.sort_unstable();
        outside.sort_unstable();
        (inside, outside, s.delta)
    }

    /// Remaining game length under optimal adversary play.
    pub fn value(&mut self, s: &GameState) -> u32 {
        if s.is_over() {
            return 0;
        }
        let key = Self::key(s);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut best = 0;
        for a in 0..s.k() {
            if s.loads[a] == 0 {
                continue;
            }
            let mut next = s.clone();
            player_balancing(&mut next, a).expect("legal pick");
            best = best.max(1 + self.value(&next));
        }
        self.memo.insert(key, best);
        best
    }

    fn best_pick(&mut self, s: &GameState) -> usize {
        let mut best = (0, usize::MAX);
        for a in 0..s.k() {
            if s.loads[a] == 0 {
                continue;
            }
            let mut next = s.clone();
            player_balancing(&mut next, a).expect("legal pick");
            let v = 1 + self.value(&next);
            if best.1 == usize::MAX || v > best.0 {
                best = (v, a);
            }
        }
        best.1
    }
}

impl Adversary for BruteForce {
    fn name(&self) -> String {
        "optimal".into()
    }

    fn pick(&mut self, s: &GameState) -> usize {
        self.best_pick(s)
    }
}

/// Exact game value by exhaustive search; limited to `k <= 6`.
pub fn game_value_bruteforce(state: &GameState) -> Result<u32, GameError> {
    let k = state.k().max(state.total() as usize);
    if k > BRUTE_FORCE_LIMIT {
        return Err(GameError::TooLarge { k, delta: state.delta as usize });
    }
    Ok(BruteForce::new().value(state))
}

/// An optimal adversary, refusing instances beyond the brute-force limit.
pub fn optimal_adversary(k: usize, delta: u32) -> Result<BruteForce, GameError> {
    if k > BRUTE_FORCE_LIMIT {
        return Err(GameError::TooLarge { k, delta: delta as usize });
    }
    Ok(BruteForce::new())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub t: usize,
    pub adversary: usize,
    pub player: usize,
    pub loads: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameOutcome {
    pub length: usize,
    pub steps: Vec<Step>,
    /// Largest spread over `U` seen after any step.
    pub max_spread: u32,
}

/// Plays the balancing player against `adversary` until the game ends.
pub fn play(adversary: &mut dyn Adversary, init: &GameState) -> Result<GameOutcome, GameError> {
    let mut s = init.clone();
    let mut steps = Vec::new();
    let mut max_spread = s.spread();
    while !s.is_over() {
        let a = adversary.pick(&s);
        let b = player_balancing(&mut s, a)?;
        max_spread = max_spread.max(s.spread());
        steps.push(Step { t: s.t, adversary: a, player: b, loads: s.loads.clone() });
    }
    Ok(GameOutcome { length: steps.len(), steps, max_spread })
}

/// `k · min{ln Δ, ln k} + k`.
pub fn theorem2_bound(k: usize, delta: u32) -> f64 {
    let kf = k as f64;
    kf * (f64::from(delta.max(1)).ln().min(kf.ln())) + kf
}

/// The table `R(N, u)` for `0 <= N <= k`, `0 <= u <= k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueTable {
    pub k: usize,
    pub delta: u32,
    r: Vec<Vec<u32>>,
}

impl ValueTable {
    pub fn new(k: usize, delta: u32) -> Self {
        let mut r = vec![vec![0u32; k + 2]; k + 1];
        for u in 1..=k {
            for n in (0..=k).rev() {
                if (delta as usize) * u <= n {
                    continue;
                }
                let down = |m: usize| r[u - 1][m];
                let ceil = n - n.div_ceil(u) + 1;
                let floor = n - n / u + 1;
                let mut best = down(ceil).max(down(floor));
                if n < k {
                    best = best.max(r[u][n + 1]);
                }
                r[u][n] = 1 + best;
            }
        }
        ValueTable { k, delta, r }
    }

    /// `R(N, u)`.
    pub fn get(&self, n: usize, u: usize) -> u32 {
        self.r[u][n]
    }
}

/// `R(N, u)` from the recurrence.
pub fn game_value(n: usize, u: usize, k: usize, delta: u32) -> u32 {
    ValueTable::new(k, delta).get(n, u)
}
