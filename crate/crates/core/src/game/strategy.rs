use std::collections::HashMap;

use super::{Game, GameError, SolveResult};
use crate::dd::{Bdd, Var};

/// System strategy: one function per controllable input over
/// (state, uncontrollable inputs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub functions: Vec<Bdd>,
}

/// Environment strategy: one function per uncontrollable input over the
/// state only, so it commits before seeing the controllable inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterStrategy {
    pub functions: Vec<Bdd>,
}

impl Game {
    /// Resolves the choice relation `rel` one variable at a time. Each
    /// variable's function is computed with the earlier choices substituted
    /// and the later variables existentially quantified. With `prefer_one`
    /// a variable is 1 wherever 1 is allowed; otherwise it is 1 only where
    /// 0 is not allowed.
    fn resolve_choices(&mut self, rel: Bdd, vars: &[Var], prefer_one: bool) -> Vec<Bdd> {
        let m = &mut self.manager;
        let mut fixed: HashMap<Var, Bdd> = HashMap::new();
        let mut functions = Vec::with_capacity(vars.len());
        for (i, &v) in vars.iter().enumerate() {
            let r = m.compose_vector(rel, &fixed).expect("registered");
            let r = m.exists(&vars[i + 1..], r).expect("registered");
            let one = m.restrict(r, v, true).expect("registered");
            let f = if prefer_one {
                one
            } else {
                let zero = m.restrict(r, v, false).expect("registered");
                m.diff(one, zero)
            };
            fixed.insert(v, f);
            functions.push(f);
        }
        functions
    }

    /// Winning strategy for a realizable game. Controllable inputs are
    /// resolved in declaration order, preferring 0; states outside the
    /// winning region map to 0.
    pub fn extract_strategy(&mut self, result: &SolveResult) -> Result<Strategy, GameError> {
        if !result.realizable {
            return Err(GameError::NotRealizable);
        }
        let moves = self.permissible_moves(result.winning_region);
        let vars = self.controllable.clone();
        Ok(Strategy {
            functions: self.resolve_choices(moves, &vars, false),
        })
    }

    /// For each `k >= 1`: the uncontrollable inputs that, from a state first
    /// entering ring `k`, force the error or ring `k - 1` for every
    /// controllable choice. Returns the union over `k` as a relation over
    /// (state, uncontrollable inputs).
    fn rank_decreasing_moves(&mut self, result: &SolveResult) -> Bdd {
        let mut moves = self.manager.ff();
        for k in 1..result.rings.len() {
            let fresh = self.manager.diff(result.rings[k], result.rings[k - 1]);
            if fresh.is_false() {
                continue;
            }
            let forced = self.forced_into(result.rings[k - 1]);
            let here = self.manager.and(fresh, forced);
            moves = self.manager.or(moves, here);
        }
        moves
    }

    /// `∀c. err ∨ set(next)` over (state, uncontrollable inputs).
    fn forced_into(&mut self, set: Bdd) -> Bdd {
        let succ = self.successor_in(set);
        let bad = self.manager.or(self.err_fn, succ);
        self.manager
            .forall(&self.controllable, bad)
            .expect("registered")
    }

    /// Moore counter-strategy for an unrealizable game. Every losing state
    /// picks inputs that lower its ring index; uncontrollable inputs are
    /// resolved in declaration order, preferring 1.
    pub fn extract_counter_strategy(&mut self, result: &SolveResult) -> Result<CounterStrategy, GameError> {
        if result.realizable {
            return Err(GameError::IsRealizable);
        }
        let moves = self.rank_decreasing_moves(result);
        let vars = self.uncontrollable.clone();
        Ok(CounterStrategy {
            functions: self.resolve_choices(moves, &vars, true),
        })
    }

    /// Symbolic rank-decrease check of a counter-strategy.
    pub fn counter_strategy_is_sound(&mut self, result: &SolveResult, cs: &CounterStrategy) -> bool {
        let subst: HashMap<Var, Bdd> = self
            .uncontrollable
            .iter()
            .copied()
            .zip(cs.functions.iter().copied())
            .collect();
        for k in 1..result.rings.len() {
            let fresh = self.manager.diff(result.rings[k], result.rings[k - 1]);
            let forced = self.forced_into(result.rings[k - 1]);
            let played = self.manager.compose_vector(forced, &subst).expect("registered");
            if !self.manager.leq(fresh, played) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::copy_game;
    use super::*;
    use crate::aiger::parse_ascii;

    #[test]
    fn copy_game_strategy_outputs_zero() {
        let mut g = Game::from_spec(&copy_game(true)).unwrap();
        let r = g.solve();
        let s = g.extract_strategy(&r).unwrap();
        assert_eq!(s.functions, vec![g.manager.ff()]);
        assert!(g.strategy_is_sound(r.winning_region, &s));
    }

    #[test]
    fn xor_pair_strategy() {
        // err = !(c0 xor c1)
        let aig = parse_ascii(
            b"aag 5 2 0 1 3\n2\n4\n11\n6 2 4\n8 3 5\n10 7 9\ni0 controllable_c0\ni1 controllable_c1\n",
        )
        .unwrap();
        let mut g = Game::from_spec(&aig).unwrap();
        let r = g.solve();
        assert!(r.realizable);
        let s = g.extract_strategy(&r).unwrap();
        assert_eq!(s.functions, vec![g.manager.ff(), g.manager.tt()]);
        assert!(g.strategy_is_sound(r.winning_region, &s));
    }

    #[test]
    fn vacuous_safety_prefers_zero() {
        let aig = parse_ascii(b"aag 2 2 0 1 0\n2\n4\n0\ni0 controllable_a\ni1 controllable_b\n").unwrap();
        let mut g = Game::from_spec(&aig).unwrap();
        let r = g.solve();
        let s = g.extract_strategy(&r).unwrap();
        assert!(s.functions.iter().all(|f| f.is_false()));
    }

    #[test]
    fn environment_drives_input_high() {
        let mut g = Game::from_spec(&copy_game(false)).unwrap();
        let r = g.solve();
        assert!(matches!(g.extract_strategy(&r), Err(GameError::NotRealizable)));
        let cs = g.extract_counter_strategy(&r).unwrap();
        assert_eq!(cs.functions, vec![g.manager.tt()]);
        assert!(g.counter_strategy_is_sound(&r, &cs));
    }

    #[test]
    fn realizable_has_no_counter_strategy() {
        let mut g = Game::from_spec(&copy_game(true)).unwrap();
        let r = g.solve();
        assert!(matches!(g.extract_counter_strategy(&r), Err(GameError::IsRealizable)));
    }
}
