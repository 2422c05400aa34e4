//! Finite algebras as operation tables, terms and their evaluation, and the
//! mixed-radix tuple ranking that fixes iteration order everywhere else.
//!
//! Universes are 0-based: an algebra of size `n` lives on `{0, …, n-1}`.
//! Variable indices in terms are 1-based (`x1, x2, …`).

use crate::error::{Error, Result};
use serde_json::Value;
use std::fmt;

/// An operation symbol together with its arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OpSymbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered sequence of operation symbols. The order is significant: it
/// fixes the iteration order of every closure built on top of the algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<OpSymbol>,
}

impl Signature {
    pub fn new(symbols: Vec<(String, usize)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (name, _) in &symbols {
            if name.is_empty() {
                return Err(Error::EmptySymbolName);
            }
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateSymbol(name.clone()));
            }
        }
        Ok(Signature {
            symbols: symbols
                .into_iter()
                .map(|(name, arity)| OpSymbol { name, arity })
                .collect(),
        })
    }

    pub fn symbols(&self) -> &[OpSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn arity(&self, index: usize) -> Result<usize> {
        self.symbols
            .get(index)
            .map(|s| s.arity)
            .ok_or(Error::UnknownSymbol(index))
    }

    pub fn name(&self, index: usize) -> Result<&str> {
        self.symbols
            .get(index)
            .map(|s| s.name.as_str())
            .ok_or(Error::UnknownSymbol(index))
    }

    /// True if some symbol has arity 0.
    pub fn has_constants(&self) -> bool {
        self.symbols.iter().any(|s| s.arity == 0)
    }
}

/// A finite algebra: a universe `{0, …, size-1}` and one total operation
/// table per signature symbol, stored flat in rank order of the arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    pub name: Option<String>,
    signature: Signature,
    size: usize,
    tables: Vec<Vec<usize>>,
}

impl FiniteAlgebra {
    pub fn new(
        name: Option<String>,
        signature: Signature,
        size: usize,
        tables: Vec<Vec<usize>>,
    ) -> Result<Self> {
        assert!(size >= 1, "universe must be nonempty");
        if tables.len() != signature.len() {
            return Err(Error::Parse(format!(
                "{} tables for {} symbols",
                tables.len(),
                signature.len()
            )));
        }
        for (sym, table) in signature.symbols().iter().zip(&tables) {
            let expected = size.checked_pow(sym.arity as u32).ok_or(Error::RankOverflow {
                base: size,
                width: sym.arity,
            })?;
            if table.len() != expected {
                return Err(Error::TableLength {
                    symbol: sym.name.clone(),
                    expected,
                    got: table.len(),
                });
            }
            for (position, &value) in table.iter().enumerate() {
                if value >= size {
                    return Err(Error::EntryOutOfRange {
                        symbol: sym.name.clone(),
                        position,
                        value,
                        size,
                    });
                }
            }
        }
        Ok(FiniteAlgebra {
            name,
            signature,
            size,
            tables,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self, symbol: usize) -> Result<&[usize]> {
        self.tables
            .get(symbol)
            .map(|t| t.as_slice())
            .ok_or(Error::UnknownSymbol(symbol))
    }

    /// Applies the basic operation `symbol` to `args` by table lookup.
    pub fn apply(&self, symbol: usize, args: &[usize]) -> Result<usize> {
        let sym = self
            .signature
            .symbols
            .get(symbol)
            .ok_or(Error::UnknownSymbol(symbol))?;
        if args.len() != sym.arity {
            return Err(Error::ArityMismatch {
                symbol: sym.name.clone(),
                expected: sym.arity,
                got: args.len(),
            });
        }
        let mut index = 0usize;
        for &a in args {
            debug_assert!(a < self.size);
            index = index * self.size + a;
        }
        Ok(self.tables[symbol][index])
    }

    /// The one-element algebra over the given signature.
    pub fn trivial(signature: Signature) -> Self {
        let tables = signature.symbols().iter().map(|_| vec![0]).collect();
        FiniteAlgebra {
            name: Some("trivial".to_string()),
            signature,
            size: 1,
            tables,
        }
    }

    /// The direct product of algebras over a common signature. The universe
    /// of the product is ranked with the first factor most significant.
    pub fn product(factors: &[&FiniteAlgebra]) -> Result<FiniteAlgebra> {
        assert!(!factors.is_empty());
        let signature = factors[0].signature.clone();
        for f in factors {
            if f.signature != signature {
                return Err(Error::SignatureMismatch);
            }
        }
        let size: usize = factors.iter().map(|f| f.size).product();
        let sizes: Vec<usize> = factors.iter().map(|f| f.size).collect();
        let unrank = |mut r: usize| -> Vec<usize> {
            let mut tuple = vec![0; sizes.len()];
            for i in (0..sizes.len()).rev() {
                tuple[i] = r % sizes[i];
                r /= sizes[i];
            }
            tuple
        };
        let rank = |tuple: &[usize]| -> usize {
            tuple
                .iter()
                .zip(&sizes)
                .fold(0, |acc, (&t, &s)| acc * s + t)
        };
        let mut tables = Vec::with_capacity(signature.len());
        for (sym_idx, sym) in signature.symbols().iter().enumerate() {
            let table_len = size.pow(sym.arity as u32);
            let mut table = Vec::with_capacity(table_len);
            let mut args = vec![0usize; sym.arity];
            for arg_rank in 0..table_len {
                let mut r = arg_rank;
                for i in (0..sym.arity).rev() {
                    args[i] = r % size;
                    r /= size;
                }
                let arg_tuples: Vec<Vec<usize>> = args.iter().map(|&a| unrank(a)).collect();
                let mut result = vec![0usize; factors.len()];
                for (coord, factor) in factors.iter().enumerate() {
                    let coord_args: Vec<usize> =
                        arg_tuples.iter().map(|t| t[coord]).collect();
                    result[coord] = factor.apply(sym_idx, &coord_args)?;
                }
                table.push(rank(&result));
            }
            tables.push(table);
        }
        Ok(FiniteAlgebra {
            name: None,
            signature,
            size,
            tables,
        })
    }
}

/// A term over a signature: a 1-based variable or an operation applied to
/// subterms. Operation symbols are referenced by index into the signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    App(usize, Vec<Term>),
}

impl Term {
    pub fn var(index: usize) -> Term {
        assert!(index >= 1, "variable indices are 1-based");
        Term::Var(index)
    }

    /// Largest variable index occurring in the term, 0 if none.
    pub fn max_var(&self) -> usize {
        match self {
            Term::Var(i) => *i,
            Term::App(_, children) => children.iter().map(Term::max_var).max().unwrap_or(0),
        }
    }

    /// Replaces each variable `xi` by `vars[i-1]`.
    pub fn substitute(&self, vars: &[Term]) -> Term {
        match self {
            Term::Var(i) => vars[*i - 1].clone(),
            Term::App(sym, children) => Term::App(
                *sym,
                children.iter().map(|c| c.substitute(vars)).collect(),
            ),
        }
    }

    /// Prefix notation against a signature, e.g. `mul(x1, inv(x2))`.
    pub fn display<'a>(&'a self, signature: &'a Signature) -> TermDisplay<'a> {
        TermDisplay {
            term: self,
            signature,
        }
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    signature: &'a Signature,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(sym, children) => {
                let name = self.signature.name(*sym).unwrap_or("?");
                write!(f, "{name}")?;
                if !children.is_empty() {
                    write!(f, "(")?;
                    for (i, c) in children.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{}", c.display(self.signature))?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// Evaluates `t` in `alg` under the given assignment (`assignment[i-1]`
/// is the value of `xi`).
pub fn eval_term(alg: &FiniteAlgebra, t: &Term, assignment: &[usize]) -> Result<usize> {
    match t {
        Term::Var(i) => assignment
            .get(*i - 1)
            .copied()
            .ok_or(Error::UnboundVariable(*i)),
        Term::App(sym, children) => {
            let args: Vec<usize> = children
                .iter()
                .map(|c| eval_term(alg, c, assignment))
                .collect::<Result<_>>()?;
            alg.apply(*sym, &args)
        }
    }
}

/// The full value table of the `m`-ary term function induced by `t`,
/// indexed by argument rank.
pub fn term_table(alg: &FiniteAlgebra, t: &Term, m: usize) -> Result<Vec<usize>> {
    let v = t.max_var();
    if v > m {
        return Err(Error::UnboundVariable(v));
    }
    let rank = TupleRank::new(alg.size(), m)?;
    let mut table = Vec::with_capacity(rank.count() as usize);
    for r in 0..rank.count() {
        let tuple = rank.unrank(r)?;
        table.push(eval_term(alg, t, &tuple)?);
    }
    Ok(table)
}

/// A bijection between `{0,…,base-1}^width` and `{0,…,base^width-1}` with
/// coordinate 1 most significant, so that rank order coincides with the
/// lexicographic order on tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TupleRank {
    base: usize,
    width: usize,
    count: u128,
}

impl TupleRank {
    pub fn new(base: usize, width: usize) -> Result<Self> {
        let mut count: u128 = 1;
        for _ in 0..width {
            count = count
                .checked_mul(base as u128)
                .ok_or(Error::RankOverflow { base, width })?;
        }
        Ok(TupleRank { base, width, count })
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `base^width`, the number of tuples.
    pub fn count(&self) -> u128 {
        self.count
    }

    pub fn rank(&self, tuple: &[usize]) -> Result<u128> {
        if tuple.len() != self.width {
            return Err(Error::WidthMismatch(tuple.len(), self.width));
        }
        let mut r: u128 = 0;
        for &t in tuple {
            if t >= self.base {
                return Err(Error::TupleEntryOutOfRange {
                    value: t,
                    base: self.base,
                });
            }
            r = r * self.base as u128 + t as u128;
        }
        Ok(r)
    }

    pub fn unrank(&self, mut rank: u128) -> Result<Vec<usize>> {
        if rank >= self.count {
            return Err(Error::RankOutOfRange {
                rank,
                bound: self.count,
            });
        }
        let mut tuple = vec![0usize; self.width];
        for i in (0..self.width).rev() {
            tuple[i] = (rank % self.base as u128) as usize;
            rank /= self.base as u128;
        }
        Ok(tuple)
    }
}

fn table_from_value(
    symbol: &str,
    value: &Value,
    arity: usize,
    size: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<usize>,
) -> Result<()> {
    if arity == 0 {
        match value {
            Value::Number(n) => {
                let v = n
                    .as_u64()
                    .ok_or_else(|| Error::Parse(format!("`{symbol}`: non-integer table entry")))?
                    as usize;
                out.push(v);
                Ok(())
            }
            _ => Err(Error::Parse(format!(
                "`{symbol}`: expected integer at {path:?}, found {value}"
            ))),
        }
    } else {
        match value {
            Value::Array(items) => {
                if items.len() != size {
                    return Err(Error::TableLength {
                        symbol: symbol.to_string(),
                        expected: size,
                        got: items.len(),
                    });
                }
                for (i, item) in items.iter().enumerate() {
                    path.push(i);
                    table_from_value(symbol, item, arity - 1, size, path, out)?;
                    path.pop();
                }
                Ok(())
            }
            _ => Err(Error::Parse(format!(
                "`{symbol}`: expected list of depth {arity} at {path:?}"
            ))),
        }
    }
}

/// Parses an algebra file: a JSON object with optional "name", "size" and
/// a list of "operations", each giving "symbol", "arity" and a "table"
/// nested with argument 1 outermost (a bare integer for arity 0).
pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("top level must be an object".into()))?;
    let name = match obj.get("name") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(v) => return Err(Error::Parse(format!("\"name\" must be a string, found {v}"))),
    };
    let size = obj
        .get("size")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing or non-integer \"size\"".into()))? as usize;
    if size == 0 {
        return Err(Error::Parse("\"size\" must be at least 1".into()));
    }
    let ops = obj
        .get("operations")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"operations\" list".into()))?;
    let mut symbols = Vec::new();
    let mut tables = Vec::new();
    for (i, op) in ops.iter().enumerate() {
        let op = op
            .as_object()
            .ok_or_else(|| Error::Parse(format!("operation {i} must be an object")))?;
        let symbol = op
            .get("symbol")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse(format!("operation {i}: missing \"symbol\"")))?
            .to_string();
        let arity = op
            .get("arity")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse(format!("`{symbol}`: missing \"arity\"")))?
            as usize;
        let table_value = op
            .get("table")
            .ok_or_else(|| Error::Parse(format!("`{symbol}`: missing \"table\"")))?;
        let mut table = Vec::new();
        table_from_value(&symbol, table_value, arity, size, &mut Vec::new(), &mut table)?;
        symbols.push((symbol, arity));
        tables.push(table);
    }
    let signature = Signature::new(symbols)?;
    FiniteAlgebra::new(name, signature, size, tables)
}

fn table_to_value(table: &[usize], arity: usize, size: usize) -> Value {
    if arity == 0 {
        Value::from(table[0])
    } else {
        let chunk = table.len() / size;
        Value::Array(
            (0..size)
                .map(|i| table_to_value(&table[i * chunk..(i + 1) * chunk], arity - 1, size))
                .collect(),
        )
    }
}

/// Canonical serialization: keys in the order name, size, operations;
/// single line, LF terminated.
pub fn serialize_algebra(alg: &FiniteAlgebra) -> String {
    let mut out = String::from("{");
    if let Some(name) = &alg.name {
        out.push_str(&format!("\"name\":{},", Value::from(name.as_str())));
    }
    out.push_str(&format!("\"size\":{},\"operations\":[", alg.size));
    for (i, sym) in alg.signature.symbols().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let table = table_to_value(&alg.tables[i], sym.arity, alg.size);
        out.push_str(&format!(
            "{{\"symbol\":{},\"arity\":{},\"table\":{}}}",
            Value::from(sym.name.as_str()),
            sym.arity,
            table
        ));
    }
    out.push_str("]}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn rank_unrank_examples() {
        let r2 = TupleRank::new(2, 2).unwrap();
        assert_eq!(r2.rank(&[0, 1]).unwrap(), 1);
        assert_eq!(r2.rank(&[1, 0]).unwrap(), 2);
        let r3 = TupleRank::new(3, 2).unwrap();
        assert_eq!(r3.unrank(5).unwrap(), vec![1, 2]);
    }

    #[test]
    fn rank_monotone_matches_lex() {
        let r = TupleRank::new(3, 3).unwrap();
        let tuples: Vec<Vec<usize>> = (0..r.count()).map(|i| r.unrank(i).unwrap()).collect();
        for w in tuples.windows(2) {
            assert!(w[0] < w[1], "rank order must be lex order");
        }
        for (i, t) in tuples.iter().enumerate() {
            assert_eq!(r.rank(t).unwrap(), i as u128);
        }
    }

    #[test]
    fn rank_errors() {
        let r = TupleRank::new(2, 2).unwrap();
        assert!(matches!(
            r.rank(&[0, 2]),
            Err(Error::TupleEntryOutOfRange { .. })
        ));
        assert!(matches!(r.unrank(4), Err(Error::RankOutOfRange { .. })));
    }

    #[test]
    fn eval_term_group_identity() {
        let z2 = samples::z2_group();
        // mul(x1, inv(x1)) at x1 = 1 gives the unit 0
        let t = Term::App(0, vec![Term::var(1), Term::App(1, vec![Term::var(1)])]);
        assert_eq!(eval_term(&z2, &t, &[1]).unwrap(), 0);

        let z4 = samples::zn_group(4);
        let sq = Term::App(0, vec![Term::var(1), Term::var(1)]);
        assert_eq!(eval_term(&z4, &sq, &[3]).unwrap(), 2);

        assert_eq!(eval_term(&z2, &Term::var(2), &[0, 1]).unwrap(), 1);
    }

    #[test]
    fn eval_term_unbound_variable() {
        let z2 = samples::z2_group();
        assert!(matches!(
            eval_term(&z2, &Term::var(2), &[0]),
            Err(Error::UnboundVariable(2))
        ));
    }

    #[test]
    fn term_table_examples() {
        let z2 = samples::z2_group();
        assert_eq!(term_table(&z2, &Term::var(1), 1).unwrap(), vec![0, 1]);
        let xor = Term::App(0, vec![Term::var(1), Term::var(2)]);
        assert_eq!(term_table(&z2, &xor, 2).unwrap(), vec![0, 1, 1, 0]);
        let unit = Term::App(2, vec![]);
        assert_eq!(term_table(&z2, &unit, 1).unwrap(), vec![0, 0]);
        // variable index above the requested arity
        assert!(term_table(&z2, &Term::var(2), 1).is_err());
    }

    #[test]
    fn eval_term_compositional() {
        // Apply(f, t1..tr) equals the f-table applied to child values,
        // exhaustively over assignments.
        let z4 = samples::zn_group(4);
        let t1 = Term::App(1, vec![Term::var(1)]);
        let t2 = Term::App(0, vec![Term::var(2), Term::var(1)]);
        let composed = Term::App(0, vec![t1.clone(), t2.clone()]);
        for a in 0..4 {
            for b in 0..4 {
                let v1 = eval_term(&z4, &t1, &[a, b]).unwrap();
                let v2 = eval_term(&z4, &t2, &[a, b]).unwrap();
                assert_eq!(
                    eval_term(&z4, &composed, &[a, b]).unwrap(),
                    z4.apply(0, &[v1, v2]).unwrap()
                );
            }
        }
    }

    #[test]
    fn parse_round_trip() {
        let text = serialize_algebra(&samples::z2_group());
        let parsed = parse_algebra(&text).unwrap();
        assert_eq!(parsed, samples::z2_group());
        assert_eq!(serialize_algebra(&parsed), text);
        assert_eq!(parsed.signature().len(), 3);
    }

    #[test]
    fn parse_rejects_out_of_range_entry() {
        let text = r#"{"size":2,"operations":[{"symbol":"f","arity":1,"table":[0,5]}]}"#;
        assert!(matches!(
            parse_algebra(text),
            Err(Error::EntryOutOfRange { value: 5, .. })
        ));
    }

    #[test]
    fn parse_rejects_length_mismatch() {
        let text = r#"{"size":2,"operations":[{"symbol":"mul","arity":1,"table":[0,1,0]}]}"#;
        assert!(matches!(
            parse_algebra(text),
            Err(Error::TableLength { .. })
        ));
    }

    #[test]
    fn parse_rejects_duplicate_symbols() {
        let text = r#"{"size":2,"operations":[
            {"symbol":"f","arity":0,"table":0},
            {"symbol":"f","arity":0,"table":1}]}"#;
        assert!(matches!(parse_algebra(text), Err(Error::DuplicateSymbol(_))));
    }

    #[test]
    fn product_of_groups() {
        let z2 = samples::z2_group();
        let p = FiniteAlgebra::product(&[&z2, &z2]).unwrap();
        assert_eq!(p.size(), 4);
        // (0,1) + (1,1) = (1,0): ranks 1 + 3 = 2
        assert_eq!(p.apply(0, &[1, 3]).unwrap(), 2);
    }
}
