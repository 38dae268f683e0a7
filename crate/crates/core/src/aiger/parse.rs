use super::{AndGate, Aig, AigerError, Latch, Literal, SymbolKind};

struct Header {
    binary: bool,
    max_var: u32,
    inputs: usize,
    latches: usize,
    outputs: usize,
    ands: usize,
}

/// Parses either format, dispatching on the `aag`/`aig` magic.
pub fn parse(bytes: &[u8]) -> Result<Aig, AigerError> {
    if bytes.starts_with(b"aig ") {
        parse_binary(bytes)
    } else {
        parse_ascii(bytes)
    }
}

pub fn parse_ascii(bytes: &[u8]) -> Result<Aig, AigerError> {
    let mut cursor = Cursor::new(bytes);
    let header = parse_header(cursor.line().ok_or_else(|| header_err("empty input"))?)?;
    if header.binary {
        return Err(header_err("expected `aag`, found binary `aig` magic"));
    }
    let mut aig = Aig {
        max_var: header.max_var,
        ..Aig::default()
    };

    for found in 0..header.inputs {
        let line = cursor.section_line("inputs", header.inputs, found)?;
        let fields = cursor.numbers(line, 1, 1)?;
        aig.inputs.push(cursor.literal(fields[0], header.max_var)?);
    }
    for found in 0..header.latches {
        let line = cursor.section_line("latches", header.latches, found)?;
        let fields = cursor.numbers(line, 2, 3)?;
        let lit = cursor.literal(fields[0], header.max_var)?;
        let next = cursor.literal(fields[1], header.max_var)?;
        check_reset(fields.get(2).copied(), lit)?;
        aig.latches.push(Latch { lit, next });
    }
    for found in 0..header.outputs {
        let line = cursor.section_line("outputs", header.outputs, found)?;
        let fields = cursor.numbers(line, 1, 1)?;
        aig.outputs.push(cursor.literal(fields[0], header.max_var)?);
    }
    for found in 0..header.ands {
        let line = cursor.section_line("and gates", header.ands, found)?;
        let fields = cursor.numbers(line, 3, 3)?;
        aig.ands.push(AndGate {
            lhs: cursor.literal(fields[0], header.max_var)?,
            rhs0: cursor.literal(fields[1], header.max_var)?,
            rhs1: cursor.literal(fields[2], header.max_var)?,
        });
    }
    parse_trailer(&mut cursor, &mut aig, header.ands)?;
    aig.validate()?;
    Ok(aig)
}

pub fn parse_binary(bytes: &[u8]) -> Result<Aig, AigerError> {
    let mut cursor = Cursor::new(bytes);
    let header = parse_header(cursor.line().ok_or_else(|| header_err("empty input"))?)?;
    if !header.binary {
        return Err(header_err("expected binary `aig` magic"));
    }
    let defined = header.inputs as u64 + header.latches as u64 + header.ands as u64;
    if defined != u64::from(header.max_var) {
        return Err(header_err("binary format requires M = I + L + A"));
    }
    let mut aig = Aig {
        max_var: header.max_var,
        ..Aig::default()
    };
    aig.inputs = (1..=header.inputs as u32)
        .map(|v| Literal::from_var(v, false))
        .collect();

    for found in 0..header.latches {
        let line = cursor.section_line("latches", header.latches, found)?;
        let fields = cursor.numbers(line, 1, 2)?;
        let lit = Literal::from_var((header.inputs + found + 1) as u32, false);
        let next = cursor.literal(fields[0], header.max_var)?;
        check_reset(fields.get(1).copied(), lit)?;
        aig.latches.push(Latch { lit, next });
    }
    for found in 0..header.outputs {
        let line = cursor.section_line("outputs", header.outputs, found)?;
        let fields = cursor.numbers(line, 1, 1)?;
        aig.outputs.push(cursor.literal(fields[0], header.max_var)?);
    }
    let first_and = (header.inputs + header.latches + 1) as u32;
    for i in 0..header.ands as u32 {
        let lhs = 2 * (first_and + i);
        let delta0 = cursor.delta()?;
        let delta1 = cursor.delta()?;
        let rhs0 = lhs.checked_sub(delta0).filter(|_| delta0 > 0);
        let rhs0 = rhs0.ok_or_else(|| cursor.malformed(format!("gate {lhs}: invalid first delta {delta0}")))?;
        let rhs1 = rhs0
            .checked_sub(delta1)
            .ok_or_else(|| cursor.malformed(format!("gate {lhs}: invalid second delta {delta1}")))?;
        aig.ands.push(AndGate {
            lhs: Literal(lhs),
            rhs0: Literal(rhs0),
            rhs1: Literal(rhs1),
        });
    }
    parse_trailer(&mut cursor, &mut aig, header.ands)?;
    aig.validate()?;
    Ok(aig)
}

fn header_err(reason: &str) -> AigerError {
    AigerError::MalformedHeader(reason.to_string())
}

fn parse_header(line: &[u8]) -> Result<Header, AigerError> {
    let text = std::str::from_utf8(line).map_err(|_| header_err("not UTF-8"))?;
    let mut fields = text.split(' ');
    let binary = match fields.next() {
        Some("aag") => false,
        Some("aig") => true,
        _ => return Err(header_err("missing `aag`/`aig` magic")),
    };
    let numbers: Vec<u64> = fields
        .map(|f| f.parse::<u64>().map_err(|_| header_err(&format!("bad field `{f}`"))))
        .collect::<Result<_, _>>()?;
    if numbers.len() < 5 || numbers.len() > 9 {
        return Err(header_err("expected `M I L O A` with optional `B C J F`"));
    }
    for (name, &n) in ["bad", "constraint", "justice", "fairness"]
        .iter()
        .zip(&numbers[5..])
    {
        if n != 0 {
            return Err(AigerError::UnsupportedFeature(format!("{n} {name} properties")));
        }
    }
    // Literals must fit in u32.
    if numbers[0] >= (1 << 31) - 1 {
        return Err(header_err("maximum variable index too large"));
    }
    let count = |n: u64| usize::try_from(n).map_err(|_| header_err("count too large"));
    Ok(Header {
        binary,
        max_var: numbers[0] as u32,
        inputs: count(numbers[1])?,
        latches: count(numbers[2])?,
        outputs: count(numbers[3])?,
        ands: count(numbers[4])?,
    })
}

fn check_reset(reset: Option<u64>, lit: Literal) -> Result<(), AigerError> {
    match reset {
        None | Some(0) => Ok(()),
        Some(r) if r == u64::from(lit.0) => Err(AigerError::UnsupportedFeature(format!(
            "uninitialized latch {lit}"
        ))),
        Some(r) => Err(AigerError::UnsupportedFeature(format!(
            "latch {lit} with reset value {r}"
        ))),
    }
}

/// Symbol table and comment section shared by both formats.
fn parse_trailer(cursor: &mut Cursor<'_>, aig: &mut Aig, declared_ands: usize) -> Result<(), AigerError> {
    let mut extra_gates = 0;
    while let Some(line) = cursor.line() {
        if line == b"c" {
            while let Some(comment) = cursor.line() {
                let text = std::str::from_utf8(comment)
                    .map_err(|_| cursor.malformed("comment is not UTF-8".into()))?;
                aig.comments.push(text.to_string());
            }
            break;
        }
        let text = std::str::from_utf8(line).map_err(|_| cursor.malformed("symbol is not UTF-8".into()))?;
        if text.starts_with(|c: char| c.is_ascii_digit()) {
            extra_gates += 1;
            continue;
        }
        if extra_gates > 0 {
            break;
        }
        let kind = match text.chars().next() {
            Some('i') => SymbolKind::Input,
            Some('l') => SymbolKind::Latch,
            Some('o') => SymbolKind::Output,
            Some('b' | 'c' | 'j' | 'f') => {
                return Err(AigerError::UnsupportedFeature(format!("symbol `{text}`")))
            }
            _ => return Err(cursor.malformed(format!("unexpected line `{text}`"))),
        };
        let (pos, name) = text[1..]
            .split_once(' ')
            .ok_or_else(|| cursor.malformed(format!("symbol `{text}` has no name")))?;
        let pos: usize = pos
            .parse()
            .map_err(|_| cursor.malformed(format!("bad symbol position in `{text}`")))?;
        aig.symbols.insert((kind, pos), name.to_string());
    }
    if extra_gates > 0 {
        return Err(AigerError::CountMismatch {
            section: "and gates",
            declared: declared_ands,
            found: declared_ands + extra_gates,
        });
    }
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line_no: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Cursor {
            bytes,
            pos: 0,
            line_no: 0,
        }
    }

    fn line(&mut self) -> Option<&'a [u8]> {
        if self.pos >= self.bytes.len() {
            return None;
        }
        let rest = &self.bytes[self.pos..];
        let end = rest.iter().position(|&b| b == b'\n').unwrap_or(rest.len());
        self.pos += (end + 1).min(rest.len());
        self.line_no += 1;
        Some(&rest[..end])
    }

    fn section_line(
        &mut self,
        section: &'static str,
        declared: usize,
        found: usize,
    ) -> Result<&'a [u8], AigerError> {
        self.line().ok_or(AigerError::CountMismatch {
            section,
            declared,
            found,
        })
    }

    fn malformed(&self, reason: String) -> AigerError {
        AigerError::Malformed {
            line: self.line_no,
            reason,
        }
    }

    fn numbers(&self, line: &[u8], min: usize, max: usize) -> Result<Vec<u64>, AigerError> {
        let text = std::str::from_utf8(line).map_err(|_| self.malformed("not UTF-8".into()))?;
        let fields: Vec<u64> = text
            .split(' ')
            .map(|f| {
                f.parse::<u64>()
                    .map_err(|_| self.malformed(format!("expected number, found `{f}`")))
            })
            .collect::<Result<_, _>>()?;
        if fields.len() < min || fields.len() > max {
            return Err(self.malformed(format!(
                "expected {min}..={max} numbers, found {}",
                fields.len()
            )));
        }
        Ok(fields)
    }

    fn literal(&self, value: u64, max_var: u32) -> Result<Literal, AigerError> {
        if value > 2 * u64::from(max_var) + 1 {
            return Err(AigerError::UndefinedLiteral(value.min(u64::from(u32::MAX)) as u32));
        }
        Ok(Literal(value as u32))
    }

    /// One LEB128-style unsigned delta.
    fn delta(&mut self) -> Result<u32, AigerError> {
        let mut value: u64 = 0;
        for shift in (0..).step_by(7) {
            let &byte = self.bytes.get(self.pos).ok_or(AigerError::TruncatedDeltaEncoding)?;
            self.pos += 1;
            if shift > 28 {
                return Err(self.malformed("delta does not fit in 32 bits".into()));
            }
            value |= u64::from(byte & 0x7f) << shift;
            if byte & 0x80 == 0 {
                break;
            }
        }
        u32::try_from(value).map_err(|_| self.malformed("delta does not fit in 32 bits".into()))
    }
}
