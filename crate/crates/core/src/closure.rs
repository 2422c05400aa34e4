//! Worklist closure of tuple sets under coordinatewise basic operations.
//!
//! The engine is shared by subpower generation, edge-term search, free
//! algebras and the clonoid layers. Coordinates may live in different
//! algebras as long as all of them share one signature, which is what the
//! mixed products used by the variety module need.

use crate::algebra::{FiniteAlgebra, Term};
use crate::error::{Error, Result};
use std::cell::Cell;
use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

/// Deterministic work counter with an optional cooperative cancel flag.
/// One step is charged per operation application.
#[derive(Debug, Clone)]
pub struct Budget {
    max_steps: u64,
    used: Cell<u64>,
    cancel: Option<Arc<AtomicBool>>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_MAX_STEPS)
    }
}

impl Budget {
    pub fn new(max_steps: u64) -> Self {
        Budget {
            max_steps,
            used: Cell::new(0),
            cancel: None,
        }
    }

    pub fn with_cancel(mut self, cancel: Arc<AtomicBool>) -> Self {
        self.cancel = Some(cancel);
        self
    }

    pub fn used(&self) -> u64 {
        self.used.get()
    }

    pub fn charge(&self, steps: u64) -> Result<()> {
        if let Some(cancel) = &self.cancel {
            if cancel.load(Ordering::Relaxed) {
                return Err(Error::Cancelled);
            }
        }
        let used = self.used.get() + steps;
        self.used.set(used);
        if used > self.max_steps {
            Err(Error::BudgetExceeded(self.max_steps))
        } else {
            Ok(())
        }
    }
}

/// Result of a closure run: tuples in rank (lexicographic) order, with a
/// witness term per tuple when provenance was requested.
pub struct Closed {
    pub tuples: Vec<Vec<u8>>,
    pub terms: Option<Vec<Term>>,
}

/// Closes `gens` under the coordinatewise operations of `coords`
/// (`coords[j]` acts on coordinate `j`; all must share a signature).
///
/// FIFO worklist: each round applies every basic operation to all argument
/// combinations over the tuples found so far that use at least one tuple
/// from the previous round. Provenance records the first-discovered term,
/// over variables `x1..x{gens.len()}`.
pub fn close(
    coords: &[&FiniteAlgebra],
    gens: &[Vec<u8>],
    with_provenance: bool,
    budget: &Budget,
) -> Result<Closed> {
    assert!(!coords.is_empty(), "closure needs at least one coordinate");
    let signature = coords[0].signature();
    for c in coords {
        if c.signature() != signature {
            return Err(Error::SignatureMismatch);
        }
    }
    let width = coords.len();

    let mut found: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut tuples: Vec<Vec<u8>> = Vec::new();
    let mut terms: Vec<Term> = Vec::new();

    for (i, g) in gens.iter().enumerate() {
        if g.len() != width {
            return Err(Error::WidthMismatch(g.len(), width));
        }
        for (j, &v) in g.iter().enumerate() {
            if v as usize >= coords[j].size() {
                return Err(Error::TupleEntryOutOfRange {
                    value: v as usize,
                    base: coords[j].size(),
                });
            }
        }
        if !found.contains_key(g) {
            found.insert(g.clone(), tuples.len());
            tuples.push(g.clone());
            if with_provenance {
                terms.push(Term::var(i + 1));
            }
        }
    }

    // Nullary operations fire once, before the main loop.
    for (sym, op) in signature.symbols().iter().enumerate() {
        if op.arity == 0 {
            budget.charge(1)?;
            let tuple: Vec<u8> = coords
                .iter()
                .map(|c| c.apply(sym, &[]).map(|v| v as u8))
                .collect::<Result<_>>()?;
            if !found.contains_key(&tuple) {
                found.insert(tuple.clone(), tuples.len());
                tuples.push(tuple);
                if with_provenance {
                    terms.push(Term::App(sym, Vec::new()));
                }
            }
        }
    }

    let mut old_len = 0;
    loop {
        let len = tuples.len();
        if old_len == len {
            break;
        }
        let round_start = len;
        for (sym, op) in signature.symbols().iter().enumerate() {
            let arity = op.arity;
            if arity == 0 {
                continue;
            }
            // All index combinations over tuples known at the start of the
            // round with at least one index >= old_len, in lexicographic
            // order of the index vector.
            let mut idx = vec![0usize; arity];
            let mut args = vec![0u8; arity];
            'combos: loop {
                if idx.iter().any(|&i| i >= old_len) {
                    budget.charge(1)?;
                    let mut tuple = vec![0u8; width];
                    for (j, coord) in coords.iter().enumerate() {
                        for (p, &i) in idx.iter().enumerate() {
                            args[p] = tuples[i][j];
                        }
                        let int_args: Vec<usize> = args.iter().map(|&a| a as usize).collect();
                        tuple[j] = coord.apply(sym, &int_args)? as u8;
                    }
                    if !found.contains_key(&tuple) {
                        found.insert(tuple.clone(), tuples.len());
                        tuples.push(tuple);
                        if with_provenance {
                            let children: Vec<Term> =
                                idx.iter().map(|&i| terms[i].clone()).collect();
                            terms.push(Term::App(sym, children));
                        }
                    }
                }
                // advance the index counter over 0..round_start
                let mut p = arity;
                loop {
                    if p == 0 {
                        break 'combos;
                    }
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < round_start {
                        break;
                    }
                    idx[p] = 0;
                }
            }
        }
        old_len = round_start;
    }

    // Final order is rank order (lex order on equal-width tuples).
    let mut perm: Vec<usize> = (0..tuples.len()).collect();
    perm.sort_by(|&a, &b| tuples[a].cmp(&tuples[b]));
    let sorted_tuples: Vec<Vec<u8>> = perm.iter().map(|&i| tuples[i].clone()).collect();
    let sorted_terms = if with_provenance {
        Some(perm.iter().map(|&i| terms[i].clone()).collect())
    } else {
        None
    };
    Ok(Closed {
        tuples: sorted_tuples,
        terms: sorted_terms,
    })
}
