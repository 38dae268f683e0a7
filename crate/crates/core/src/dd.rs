//! Reduced ordered binary decision diagrams.
//!
//! A [`BddManager`] owns the node store and the operation cache; a [`Bdd`] is
//! a copyable handle into one manager. Nodes are hash-consed, so two handles
//! denote the same function iff they are equal. The variable order is the
//! registration order and never changes.
//!
//! Handles carry the id of their manager. The checked entry points
//! ([`BddManager::apply`], [`BddManager::var`], the quantifiers) report a
//! mismatch as an error; the shorthand operators (`and`, `or`, `not`, ...)
//! panic on one, like slice indexing.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU32, Ordering};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DdError {
    #[error("variable {0} is not registered in this manager")]
    UnknownVariable(u32),
    #[error("BDD belongs to a different manager")]
    ManagerMismatch,
}

/// A variable; its index is also its level in the order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bdd {
    manager: u32,
    node: u32,
}

impl Bdd {
    pub fn is_false(self) -> bool {
        self.node == FALSE
    }

    pub fn is_true(self) -> bool {
        self.node == TRUE
    }

    pub fn is_constant(self) -> bool {
        self.node <= TRUE
    }

    /// Index of the root node inside its manager.
    pub fn node_id(self) -> u32 {
        self.node
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    And,
    Or,
    Xor,
    Implies,
    Iff,
}

const FALSE: u32 = 0;
const TRUE: u32 = 1;
const TERMINAL_LEVEL: u32 = u32::MAX;
const DEFAULT_CACHE_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, Copy)]
struct Node {
    var: u32,
    lo: u32,
    hi: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum CacheOp {
    And,
    Or,
    Xor,
    Not,
    Ite,
    Exists,
    Forall,
    AndExists,
}

static NEXT_MANAGER_ID: AtomicU32 = AtomicU32::new(1);

#[derive(Debug)]
pub struct BddManager {
    id: u32,
    names: Vec<String>,
    nodes: Vec<Node>,
    unique: HashMap<(u32, u32, u32), u32>,
    cache: HashMap<(CacheOp, u32, u32, u32), u32>,
    cache_limit: usize,
}

impl Default for BddManager {
    fn default() -> Self {
        Self::new()
    }
}

impl BddManager {
    pub fn new() -> Self {
        let terminal = |v| Node {
            var: TERMINAL_LEVEL,
            lo: v,
            hi: v,
        };
        BddManager {
            id: NEXT_MANAGER_ID.fetch_add(1, Ordering::Relaxed),
            names: Vec::new(),
            nodes: vec![terminal(FALSE), terminal(TRUE)],
            unique: HashMap::new(),
            cache: HashMap::new(),
            cache_limit: DEFAULT_CACHE_LIMIT,
        }
    }

    /// Registers a new variable at the bottom of the order.
    pub fn new_var(&mut self, name: impl Into<String>) -> Var {
        self.names.push(name.into());
        Var(self.names.len() as u32 - 1)
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    pub fn var_name(&self, v: Var) -> Option<&str> {
        self.names.get(v.0 as usize).map(String::as_str)
    }

    pub fn var_by_name(&self, name: &str) -> Option<Var> {
        self.names.iter().position(|n| n == name).map(|i| Var(i as u32))
    }

    /// Total number of nodes allocated so far, terminals included.
    pub fn allocated_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn handle(&self, node: u32) -> Bdd {
        Bdd {
            manager: self.id,
            node,
        }
    }

    fn owns(&self, f: Bdd) -> Result<u32, DdError> {
        if f.manager == self.id {
            Ok(f.node)
        } else {
            Err(DdError::ManagerMismatch)
        }
    }

    #[track_caller]
    fn id_of(&self, f: Bdd) -> u32 {
        match self.owns(f) {
            Ok(n) => n,
            Err(_) => panic!("BDD belongs to a different manager"),
        }
    }

    fn check_var(&self, v: Var) -> Result<(), DdError> {
        if (v.0 as usize) < self.names.len() {
            Ok(())
        } else {
            Err(DdError::UnknownVariable(v.0))
        }
    }

    pub fn constant(&self, value: bool) -> Bdd {
        self.handle(if value { TRUE } else { FALSE })
    }

    pub fn tt(&self) -> Bdd {
        self.constant(true)
    }

    pub fn ff(&self) -> Bdd {
        self.constant(false)
    }

    /// The projection function of `v`.
    pub fn var(&mut self, v: Var) -> Result<Bdd, DdError> {
        self.check_var(v)?;
        let n = self.mk(v.0, FALSE, TRUE);
        Ok(self.handle(n))
    }

    /// Like [`BddManager::var`], negated.
    pub fn nvar(&mut self, v: Var) -> Result<Bdd, DdError> {
        self.check_var(v)?;
        let n = self.mk(v.0, TRUE, FALSE);
        Ok(self.handle(n))
    }

    fn level(&self, n: u32) -> u32 {
        self.nodes[n as usize].var
    }

    fn mk(&mut self, var: u32, lo: u32, hi: u32) -> u32 {
        if lo == hi {
            return lo;
        }
        if let Some(&n) = self.unique.get(&(var, lo, hi)) {
            return n;
        }
        let n = self.nodes.len() as u32;
        self.nodes.push(Node { var, lo, hi });
        self.unique.insert((var, lo, hi), n);
        n
    }

    fn cache_get(&self, key: (CacheOp, u32, u32, u32)) -> Option<u32> {
        self.cache.get(&key).copied()
    }

    fn cache_put(&mut self, key: (CacheOp, u32, u32, u32), value: u32) {
        if self.cache.len() >= self.cache_limit {
            self.cache.clear();
        }
        self.cache.insert(key, value);
    }

    /// Cofactors of `n` with respect to the variable at `level`.
    fn branches(&self, n: u32, level: u32) -> (u32, u32) {
        let node = self.nodes[n as usize];
        if node.var == level {
            (node.lo, node.hi)
        } else {
            (n, n)
        }
    }

    fn not_rec(&mut self, f: u32) -> u32 {
        match f {
            FALSE => return TRUE,
            TRUE => return FALSE,
            _ => {}
        }
        let key = (CacheOp::Not, f, 0, 0);
        if let Some(r) = self.cache_get(key) {
            return r;
        }
        let Node { var, lo, hi } = self.nodes[f as usize];
        let lo = self.not_rec(lo);
        let hi = self.not_rec(hi);
        let r = self.mk(var, lo, hi);
        self.cache_put(key, r);
        r
    }

    fn and_rec(&mut self, f: u32, g: u32) -> u32 {
        if f == FALSE || g == FALSE {
            return FALSE;
        }
        if f == TRUE || f == g {
            return g;
        }
        if g == TRUE {
            return f;
        }
        let (f, g) = (f.min(g), f.max(g));
        let key = (CacheOp::And, f, g, 0);
        if let Some(r) = self.cache_get(key) {
            return r;
        }
        let level = self.level(f).min(self.level(g));
        let (f0, f1) = self.branches(f, level);
        let (g0, g1) = self.branches(g, level);
        let lo = self.and_rec(f0, g0);
        let hi = self.and_rec(f1, g1);
        let r = self.mk(level, lo, hi);
        self.cache_put(key, r);
        r
    }

    fn or_rec(&mut self, f: u32, g: u32) -> u32 {
        if f == TRUE || g == TRUE {
            return TRUE;
        }
        if f == FALSE || f == g {
            return g;
        }
        if g == FALSE {
            return f;
        }
        let (f, g) = (f.min(g), f.max(g));
        let key = (CacheOp::Or, f, g, 0);
        if let Some(r) = self.cache_get(key) {
            return r;
        }
        let level = self.level(f).min(self.level(g));
        let (f0, f1) = self.branches(f, level);
        let (g0, g1) = self.branches(g, level);
        let lo = self.or_rec(f0, g0);
        let hi = self.or_rec(f1, g1);
        let r = self.mk(level, lo, hi);
        self.cache_put(key, r);
        r
    }

    fn xor_rec(&mut self, f: u32, g: u32) -> u32 {
        if f == g {
            return FALSE;
        }
        if f == FALSE {
            return g;
        }
        if g == FALSE {
            return f;
        }
        if f == TRUE {
            return self.not_rec(g);
        }
        if g == TRUE {
            return self.not_rec(f);
        }
        let (f, g) = (f.min(g), f.max(g));
        let key = (CacheOp::Xor, f, g, 0);
        if let Some(r) = self.cache_get(key) {
            return r;
        }
        let level = self.level(f).min(self.level(g));
        let (f0, f1) = self.branches(f, level);
        let (g0, g1) = self.branches(g, level);
        let lo = self.xor_rec(f0, g0);
        let hi = self.xor_rec(f1, g1);
        let r = self.mk(level, lo, hi);
        self.cache_put(key, r);
        r
    }

    fn ite_rec(&mut self, f: u32, g: u32, h: u32) -> u32 {
        match (f, g, h) {
            (TRUE, _, _) => return g,
            (FALSE, _, _) => return h,
            (_, TRUE, FALSE) => return f,
            (_, FALSE, TRUE) => return self.not_rec(f),
            _ if g == h => return g,
            (_, TRUE, _) => return self.or_rec(f, h),
            (_, _, FALSE) => return self.and_rec(f, g),
            _ => {}
        }
        let key = (CacheOp::Ite, f, g, h);
        if let Some(r) = self.cache_get(key) {
            return r;
        }
        let level = self.level(f).min(self.level(g)).min(self.level(h));
        let (f0, f1) = self.branches(f, level);
        let (g0, g1) = self.branches(g, level);
        let (h0, h1) = self.branches(h, level);
        let lo = self.ite_rec(f0, g0, h0);
        let hi = self.ite_rec(f1, g1, h1);
        let r = self.mk(level, lo, hi);
        self.cache_put(key, r);
        r
    }

    /// Quantifies the variables of the positive cube `cube` out of `f`.
    fn quant_rec(&mut self, f: u32, cube: u32, universal: bool) -> u32 {
        if f <= TRUE || cube == TRUE {
            return f;
        }
        let f_level = self.level(f);
        let mut cube = cube;
        while cube != TRUE && self.level(cube) < f_level {
            cube = self.nodes[cube as usize].hi;
        }
        if cube == TRUE {
            return f;
        }
        let op = if universal { CacheOp::Forall } else { CacheOp::Exists };
        let key = (op, f, cube, 0);
        if let Some(r) = self.cache_get(key) {
            return r;
        }
        let Node { var, lo, hi } = self.nodes[f as usize];
        let r = if self.level(cube) == var {
            let rest = self.nodes[cube as usize].hi;
            let lo = self.quant_rec(lo, rest, universal);
            if universal && lo == FALSE {
                FALSE
            } else if !universal && lo == TRUE {
                TRUE
            } else {
                let hi = self.quant_rec(hi, rest, universal);
                if universal {
                    self.and_rec(lo, hi)
                } else {
                    self.or_rec(lo, hi)
                }
            }
        } else {
            let lo = self.quant_rec(lo, cube, universal);
            let hi = self.quant_rec(hi, cube, universal);
            self.mk(var, lo, hi)
        };
        self.cache_put(key, r);
        r
    }

    fn and_exists_rec(&mut self, f: u32, g: u32, cube: u32) -> u32 {
        if f == FALSE || g == FALSE {
            return FALSE;
        }
        if f == TRUE && g == TRUE {
            return TRUE;
        }
        if f == TRUE || f == g {
            return self.quant_rec(g, cube, false);
        }
        if g == TRUE {
            return self.quant_rec(f, cube, false);
        }
        let level = self.level(f).min(self.level(g));
        let mut cube = cube;
        while cube != TRUE && self.level(cube) < level {
            cube = self.nodes[cube as usize].hi;
        }
        if cube == TRUE {
            return self.and_rec(f, g);
        }
        let (f, g) = (f.min(g), f.max(g));
        let key = (CacheOp::AndExists, f, g, cube);
        if let Some(r) = self.cache_get(key) {
            return r;
        }
        let (f0, f1) = self.branches(f, level);
        let (g0, g1) = self.branches(g, level);
        let r = if self.level(cube) == level {
            let rest = self.nodes[cube as usize].hi;
            let lo = self.and_exists_rec(f0, g0, rest);
            if lo == TRUE {
                TRUE
            } else {
                let hi = self.and_exists_rec(f1, g1, rest);
                self.or_rec(lo, hi)
            }
        } else {
            let lo = self.and_exists_rec(f0, g0, cube);
            let hi = self.and_exists_rec(f1, g1, cube);
            self.mk(level, lo, hi)
        };
        self.cache_put(key, r);
        r
    }

    fn cube_of(&mut self, vars: &[Var]) -> Result<u32, DdError> {
        let mut sorted = vars.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut cube = TRUE;
        for v in sorted.into_iter().rev() {
            self.check_var(v)?;
            cube = self.mk(v.0, FALSE, cube);
        }
        Ok(cube)
    }

    pub fn apply(&mut self, op: BinOp, f: Bdd, g: Bdd) -> Result<Bdd, DdError> {
        let (f, g) = (self.owns(f)?, self.owns(g)?);
        let r = match op {
            BinOp::And => self.and_rec(f, g),
            BinOp::Or => self.or_rec(f, g),
            BinOp::Xor => self.xor_rec(f, g),
            BinOp::Implies => {
                let nf = self.not_rec(f);
                self.or_rec(nf, g)
            }
            BinOp::Iff => {
                let x = self.xor_rec(f, g);
                self.not_rec(x)
            }
        };
        Ok(self.handle(r))
    }

    pub fn try_ite(&mut self, f: Bdd, g: Bdd, h: Bdd) -> Result<Bdd, DdError> {
        let (f, g, h) = (self.owns(f)?, self.owns(g)?, self.owns(h)?);
        let r = self.ite_rec(f, g, h);
        Ok(self.handle(r))
    }

    #[track_caller]
    fn binop(&mut self, op: BinOp, f: Bdd, g: Bdd) -> Bdd {
        self.apply(op, f, g).expect("BDD belongs to a different manager")
    }

    #[track_caller]
    pub fn not(&mut self, f: Bdd) -> Bdd {
        let f = self.id_of(f);
        let r = self.not_rec(f);
        self.handle(r)
    }

    #[track_caller]
    pub fn and(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.binop(BinOp::And, f, g)
    }

    #[track_caller]
    pub fn or(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.binop(BinOp::Or, f, g)
    }

    #[track_caller]
    pub fn xor(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.binop(BinOp::Xor, f, g)
    }

    #[track_caller]
    pub fn implies(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.binop(BinOp::Implies, f, g)
    }

    #[track_caller]
    pub fn iff(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.binop(BinOp::Iff, f, g)
    }

    #[track_caller]
    pub fn ite(&mut self, f: Bdd, g: Bdd, h: Bdd) -> Bdd {
        self.try_ite(f, g, h).expect("BDD belongs to a different manager")
    }

    /// `f ∧ ¬g`
    #[track_caller]
    pub fn diff(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let ng = self.not(g);
        self.and(f, ng)
    }

    /// True iff `f` implies `g` everywhere.
    #[track_caller]
    pub fn leq(&mut self, f: Bdd, g: Bdd) -> bool {
        self.diff(f, g).is_false()
    }

    pub fn and_all(&mut self, fs: impl IntoIterator<Item = Bdd>) -> Bdd {
        let mut acc = self.tt();
        for f in fs {
            acc = self.and(acc, f);
        }
        acc
    }

    pub fn or_all(&mut self, fs: impl IntoIterator<Item = Bdd>) -> Bdd {
        let mut acc = self.ff();
        for f in fs {
            acc = self.or(acc, f);
        }
        acc
    }

    pub fn exists(&mut self, vars: &[Var], f: Bdd) -> Result<Bdd, DdError> {
        let f = self.owns(f)?;
        let cube = self.cube_of(vars)?;
        let r = self.quant_rec(f, cube, false);
        Ok(self.handle(r))
    }

    pub fn forall(&mut self, vars: &[Var], f: Bdd) -> Result<Bdd, DdError> {
        let f = self.owns(f)?;
        let cube = self.cube_of(vars)?;
        let r = self.quant_rec(f, cube, true);
        Ok(self.handle(r))
    }

    /// `∃ vars. f ∧ g` without building the conjunction first.
    pub fn and_exists(&mut self, vars: &[Var], f: Bdd, g: Bdd) -> Result<Bdd, DdError> {
        let (f, g) = (self.owns(f)?, self.owns(g)?);
        let cube = self.cube_of(vars)?;
        let r = self.and_exists_rec(f, g, cube);
        Ok(self.handle(r))
    }

    /// Fixes `v` to `value` in `f`.
    pub fn restrict(&mut self, f: Bdd, v: Var, value: bool) -> Result<Bdd, DdError> {
        let f = self.owns(f)?;
        self.check_var(v)?;
        let mut memo = HashMap::new();
        let r = self.restrict_rec(f, v.0, value, &mut memo);
        Ok(self.handle(r))
    }

    fn restrict_rec(&mut self, f: u32, var: u32, value: bool, memo: &mut HashMap<u32, u32>) -> u32 {
        let node = self.nodes[f as usize];
        if node.var == TERMINAL_LEVEL || node.var > var {
            return f;
        }
        if node.var == var {
            return if value { node.hi } else { node.lo };
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let lo = self.restrict_rec(node.lo, var, value, memo);
        let hi = self.restrict_rec(node.hi, var, value, memo);
        let r = self.mk(node.var, lo, hi);
        memo.insert(f, r);
        r
    }

    /// Simultaneously substitutes each mapped variable by its function.
    pub fn compose_vector(&mut self, f: Bdd, substitution: &HashMap<Var, Bdd>) -> Result<Bdd, DdError> {
        let f = self.owns(f)?;
        let mut subst: HashMap<u32, u32> = HashMap::with_capacity(substitution.len());
        for (&v, &g) in substitution {
            self.check_var(v)?;
            subst.insert(v.0, self.owns(g)?);
        }
        let mut memo = HashMap::new();
        let r = self.compose_rec(f, &subst, &mut memo);
        Ok(self.handle(r))
    }

    fn compose_rec(&mut self, f: u32, subst: &HashMap<u32, u32>, memo: &mut HashMap<u32, u32>) -> u32 {
        if f <= TRUE {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let Node { var, lo, hi } = self.nodes[f as usize];
        let lo = self.compose_rec(lo, subst, memo);
        let hi = self.compose_rec(hi, subst, memo);
        let r = match subst.get(&var) {
            Some(&g) => self.ite_rec(g, hi, lo),
            None => {
                let v = self.mk(var, FALSE, TRUE);
                self.ite_rec(v, hi, lo)
            }
        };
        memo.insert(f, r);
        r
    }

    /// Renames variables; a convenience over [`BddManager::compose_vector`].
    pub fn rename(&mut self, f: Bdd, pairs: &[(Var, Var)]) -> Result<Bdd, DdError> {
        let mut subst = HashMap::with_capacity(pairs.len());
        for &(from, to) in pairs {
            let t = self.var(to)?;
            subst.insert(from, t);
        }
        self.compose_vector(f, &subst)
    }

    /// Evaluates `f` under an assignment indexed by variable.
    #[track_caller]
    pub fn eval(&self, f: Bdd, assignment: &[bool]) -> bool {
        self.eval_with(f, |v| assignment[v.0 as usize])
    }

    #[track_caller]
    pub fn eval_with(&self, f: Bdd, mut value: impl FnMut(Var) -> bool) -> bool {
        let mut n = self.id_of(f);
        while n > TRUE {
            let node = self.nodes[n as usize];
            n = if value(Var(node.var)) { node.hi } else { node.lo };
        }
        n == TRUE
    }

    /// A satisfying assignment of `vars`, or `None` iff `f` is FALSE. The
    /// low branch is preferred wherever it is satisfiable, and variables not
    /// on the chosen path are 0.
    #[track_caller]
    pub fn pick_cube(&self, f: Bdd, vars: &[Var]) -> Option<Vec<bool>> {
        let mut n = self.id_of(f);
        if n == FALSE {
            return None;
        }
        let mut chosen: HashMap<u32, bool> = HashMap::new();
        while n > TRUE {
            let node = self.nodes[n as usize];
            if node.lo != FALSE {
                chosen.insert(node.var, false);
                n = node.lo;
            } else {
                chosen.insert(node.var, true);
                n = node.hi;
            }
        }
        Some(
            vars.iter()
                .map(|v| chosen.get(&v.0).copied().unwrap_or(false))
                .collect(),
        )
    }

    /// Variables `f` depends on, in order.
    #[track_caller]
    pub fn support(&self, f: Bdd) -> Vec<Var> {
        let mut seen = std::collections::HashSet::new();
        let mut vars = std::collections::BTreeSet::new();
        let mut stack = vec![self.id_of(f)];
        while let Some(n) = stack.pop() {
            if n <= TRUE || !seen.insert(n) {
                continue;
            }
            let node = self.nodes[n as usize];
            vars.insert(node.var);
            stack.push(node.lo);
            stack.push(node.hi);
        }
        vars.into_iter().map(Var).collect()
    }

    /// Number of nodes reachable from `f`, terminals included.
    #[track_caller]
    pub fn node_count(&self, f: Bdd) -> usize {
        self.reachable(f).len()
    }

    fn reachable(&self, f: Bdd) -> Vec<u32> {
        let mut seen = std::collections::HashSet::new();
        let mut order = Vec::new();
        let mut stack = vec![self.id_of(f)];
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            order.push(n);
            if n > TRUE {
                let node = self.nodes[n as usize];
                stack.push(node.hi);
                stack.push(node.lo);
            }
        }
        order
    }

    /// Top variable and cofactors of a non-constant BDD.
    #[track_caller]
    pub fn decompose(&self, f: Bdd) -> Option<(Var, Bdd, Bdd)> {
        let n = self.id_of(f);
        if n <= TRUE {
            return None;
        }
        let node = self.nodes[n as usize];
        Some((Var(node.var), self.handle(node.lo), self.handle(node.hi)))
    }

    /// Graphviz rendering with nodes labeled by variable name; dashed edges
    /// are low branches.
    #[track_caller]
    pub fn to_dot(&self, f: Bdd) -> String {
        let mut out = String::from("digraph bdd {\n");
        for n in self.reachable(f) {
            match n {
                FALSE => out.push_str("  n0 [shape=box,label=\"0\"];\n"),
                TRUE => out.push_str("  n1 [shape=box,label=\"1\"];\n"),
                _ => {
                    let node = self.nodes[n as usize];
                    let _ = writeln!(out, "  n{n} [label=\"{}\"];", self.names[node.var as usize]);
                    let _ = writeln!(out, "  n{n} -> n{} [style=dashed];", node.lo);
                    let _ = writeln!(out, "  n{n} -> n{};", node.hi);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
