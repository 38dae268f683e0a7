use super::{Aig, AigerError, Literal};

/// Gate-level evaluator for one clock cycle of a circuit.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    aig: &'a Aig,
    order: Vec<usize>,
}

/// Variable valuation produced by [`Simulator::eval`].
#[derive(Debug, Clone)]
pub struct Valuation(Vec<bool>);

impl Valuation {
    pub fn lit(&self, lit: Literal) -> bool {
        self.0[lit.var() as usize] ^ lit.is_negated()
    }
}

impl<'a> Simulator<'a> {
    pub fn new(aig: &'a Aig) -> Result<Self, AigerError> {
        Ok(Simulator {
            aig,
            order: aig.topological_order()?,
        })
    }

    /// Evaluates every variable for the given input and latch values.
    pub fn eval(&self, inputs: &[bool], latches: &[bool]) -> Valuation {
        assert_eq!(inputs.len(), self.aig.inputs.len(), "input arity");
        assert_eq!(latches.len(), self.aig.latches.len(), "latch arity");
        let mut values = vec![false; self.aig.max_var as usize + 1];
        for (lit, &v) in self.aig.inputs.iter().zip(inputs) {
            values[lit.var() as usize] = v;
        }
        for (latch, &v) in self.aig.latches.iter().zip(latches) {
            values[latch.lit.var() as usize] = v;
        }
        let mut val = Valuation(values);
        for &i in &self.order {
            let g = self.aig.ands[i];
            let v = val.lit(g.rhs0) && val.lit(g.rhs1);
            val.0[g.lhs.var() as usize] = v;
        }
        val
    }

    /// Returns `(outputs, next latch values)`.
    pub fn step(&self, inputs: &[bool], latches: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let val = self.eval(inputs, latches);
        let outputs = self.aig.outputs.iter().map(|&l| val.lit(l)).collect();
        let next = self.aig.latches.iter().map(|l| val.lit(l.next)).collect();
        (outputs, next)
    }
}
