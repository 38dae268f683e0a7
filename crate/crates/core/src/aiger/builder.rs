use super::{normalize, AndGate, Aig, AigerError, Latch, Literal, SymbolKind};

/// Incremental circuit construction with fresh variable allocation.
///
/// [`AigBuilder::and`] folds constants and trivial operand pairs;
/// [`AigBuilder::and_gate`] always emits a gate.
#[derive(Debug, Clone, Default)]
pub struct AigBuilder {
    aig: Aig,
}

impl AigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Continues an existing circuit; new variables start after its maximum index.
    pub fn from_aig(aig: Aig) -> Self {
        AigBuilder { aig }
    }

    fn fresh(&mut self) -> Literal {
        self.aig.max_var += 1;
        Literal::from_var(self.aig.max_var, false)
    }

    pub fn input(&mut self, name: Option<&str>) -> Literal {
        let lit = self.fresh();
        if let Some(name) = name {
            self.aig
                .symbols
                .insert((SymbolKind::Input, self.aig.inputs.len()), name.to_string());
        }
        self.aig.inputs.push(lit);
        lit
    }

    /// Adds a latch whose next-state literal is filled in later with
    /// [`AigBuilder::set_next`]; returns its position and current-state literal.
    pub fn latch(&mut self, name: Option<&str>) -> (usize, Literal) {
        let lit = self.fresh();
        let pos = self.aig.latches.len();
        if let Some(name) = name {
            self.aig.symbols.insert((SymbolKind::Latch, pos), name.to_string());
        }
        self.aig.latches.push(Latch {
            lit,
            next: Literal::FALSE,
        });
        (pos, lit)
    }

    pub fn set_next(&mut self, latch: usize, next: Literal) {
        self.aig.latches[latch].next = next;
    }

    pub fn output(&mut self, lit: Literal, name: Option<&str>) {
        if let Some(name) = name {
            self.aig
                .symbols
                .insert((SymbolKind::Output, self.aig.outputs.len()), name.to_string());
        }
        self.aig.outputs.push(lit);
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.aig.comments.push(line.into());
    }

    /// Emits `lhs = a & b` unconditionally.
    pub fn and_gate(&mut self, a: Literal, b: Literal) -> Literal {
        let lhs = self.fresh();
        self.aig.ands.push(AndGate {
            lhs,
            rhs0: a.max(b),
            rhs1: a.min(b),
        });
        lhs
    }

    /// Defines an existing, not yet defined variable as `a & b`.
    pub fn define_and(&mut self, lhs: Literal, a: Literal, b: Literal) {
        self.aig.ands.push(AndGate {
            lhs,
            rhs0: a.max(b),
            rhs1: a.min(b),
        });
    }

    pub fn and(&mut self, a: Literal, b: Literal) -> Literal {
        if a == Literal::FALSE || b == Literal::FALSE || a == !b {
            Literal::FALSE
        } else if a == Literal::TRUE || a == b {
            b
        } else if b == Literal::TRUE {
            a
        } else {
            self.and_gate(a, b)
        }
    }

    pub fn or(&mut self, a: Literal, b: Literal) -> Literal {
        !self.and(!a, !b)
    }

    pub fn xor(&mut self, a: Literal, b: Literal) -> Literal {
        let both = self.and(a, b);
        let neither = self.and(!a, !b);
        self.and(!both, !neither)
    }

    /// `if sel { hi } else { lo }`
    pub fn mux(&mut self, sel: Literal, hi: Literal, lo: Literal) -> Literal {
        let t = self.and(sel, hi);
        let e = self.and(!sel, lo);
        self.or(t, e)
    }

    pub fn and_all(&mut self, lits: impl IntoIterator<Item = Literal>) -> Literal {
        lits.into_iter().fold(Literal::TRUE, |acc, l| self.and(acc, l))
    }

    pub fn or_all(&mut self, lits: impl IntoIterator<Item = Literal>) -> Literal {
        lits.into_iter().fold(Literal::FALSE, |acc, l| self.or(acc, l))
    }

    pub fn aig(&self) -> &Aig {
        &self.aig
    }

    pub fn build(self) -> Aig {
        self.aig
    }

    /// Builds and re-indexes into the canonical binary layout.
    pub fn build_normalized(self) -> Result<Aig, AigerError> {
        normalize(&self.aig)
    }
}
