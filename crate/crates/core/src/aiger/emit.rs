use std::collections::HashMap;
use std::fmt::Write as _;

use super::{AndGate, Aig, AigerError, Latch, Literal};

pub fn emit_ascii(aig: &Aig) -> Vec<u8> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "aag {} {} {} {} {}",
        aig.max_var,
        aig.inputs.len(),
        aig.latches.len(),
        aig.outputs.len(),
        aig.ands.len()
    );
    for input in &aig.inputs {
        let _ = writeln!(out, "{input}");
    }
    for latch in &aig.latches {
        let _ = writeln!(out, "{} {}", latch.lit, latch.next);
    }
    for output in &aig.outputs {
        let _ = writeln!(out, "{output}");
    }
    for gate in &aig.ands {
        let _ = writeln!(out, "{} {} {}", gate.lhs, gate.rhs0, gate.rhs1);
    }
    write_trailer(&mut out, aig);
    out.into_bytes()
}

/// Emits the binary format, re-indexing first (see [`normalize`]).
pub fn emit_binary(aig: &Aig) -> Result<Vec<u8>, AigerError> {
    let aig = normalize(aig)?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "aig {} {} {} {} {}",
        aig.max_var,
        aig.inputs.len(),
        aig.latches.len(),
        aig.outputs.len(),
        aig.ands.len()
    );
    for latch in &aig.latches {
        let _ = writeln!(text, "{}", latch.next);
    }
    for output in &aig.outputs {
        let _ = writeln!(text, "{output}");
    }
    let mut out = text.into_bytes();
    for gate in &aig.ands {
        encode_delta(&mut out, gate.lhs.0 - gate.rhs0.0);
        encode_delta(&mut out, gate.rhs0.0 - gate.rhs1.0);
    }
    let mut trailer = String::new();
    write_trailer(&mut trailer, &aig);
    out.extend_from_slice(trailer.as_bytes());
    Ok(out)
}

fn write_trailer(out: &mut String, aig: &Aig) {
    for ((kind, pos), name) in &aig.symbols {
        let _ = writeln!(out, "{}{pos} {name}", kind.prefix());
    }
    if !aig.comments.is_empty() {
        out.push_str("c\n");
        for line in &aig.comments {
            let _ = writeln!(out, "{line}");
        }
    }
}

fn encode_delta(out: &mut Vec<u8>, mut value: u32) {
    while value >= 0x80 {
        out.push((value & 0x7f) as u8 | 0x80);
        value >>= 7;
    }
    out.push(value as u8);
}

/// Re-indexes a circuit into the canonical binary layout: inputs take
/// variables `1..=I`, latches `I+1..=I+L`, and gates follow in
/// deterministic topological order with `lhs > rhs0 >= rhs1`. Unused
/// variable indices are dropped, so `M = I + L + A` afterwards.
pub fn normalize(aig: &Aig) -> Result<Aig, AigerError> {
    aig.validate()?;
    let order = aig.topological_order()?;
    let mut map: HashMap<u32, u32> = HashMap::with_capacity(aig.max_var as usize + 1);
    map.insert(0, 0);
    let mut next = 1u32;
    for lit in aig.inputs.iter().chain(aig.latches.iter().map(|l| &l.lit)) {
        map.insert(lit.var(), next);
        next += 1;
    }
    for &i in &order {
        map.insert(aig.ands[i].lhs.var(), next);
        next += 1;
    }
    let tr = |lit: Literal| Literal::from_var(map[&lit.var()], lit.is_negated());

    let ands = order
        .iter()
        .map(|&i| {
            let g = aig.ands[i];
            let (a, b) = (tr(g.rhs0), tr(g.rhs1));
            AndGate {
                lhs: tr(g.lhs),
                rhs0: a.max(b),
                rhs1: a.min(b),
            }
        })
        .collect();
    Ok(Aig {
        max_var: next - 1,
        inputs: aig.inputs.iter().map(|&l| tr(l)).collect(),
        latches: aig
            .latches
            .iter()
            .map(|l| Latch {
                lit: tr(l.lit),
                next: tr(l.next),
            })
            .collect(),
        ands,
        outputs: aig.outputs.iter().map(|&l| tr(l)).collect(),
        symbols: aig.symbols.clone(),
        comments: aig.comments.clone(),
    })
}
