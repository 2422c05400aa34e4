//! Detection of k-edge, Mal'cev, and near-unanimity terms.
//!
//! The search reduces to a membership question in a generated subpower:
//! a (k+1)-ary term t satisfies the k-edge identities exactly when the
//! target vector (x in every column) lies in the subalgebra of
//! A^(|A|^2 * k) generated by the k+1 variable columns of the constraint
//! patterns. Provenance of the closure produces the witness term, which is
//! then re-verified by direct identity evaluation.

use crate::algebra::{FiniteAlgebra, Term, TupleRank};
use crate::closure::Budget;
use crate::error::{Error, Result};
use crate::subpower::sg;

/// The constraint system for a k-edge term over an algebra: one column per
/// pair (x, y) in A^2 and pattern row, pairs in rank order, rows inner.
#[derive(Debug, Clone)]
pub struct EdgeInstance {
    pub k: usize,
    /// One generator per variable of the candidate term.
    pub generators: Vec<Vec<u8>>,
    pub target: Vec<u8>,
}

/// The k patterns of the k-edge identities, instantiated at (x, y).
/// Each pattern is a (k+1)-tuple of arguments.
fn edge_patterns(k: usize, x: u8, y: u8) -> Vec<Vec<u8>> {
    let mut rows = Vec::with_capacity(k);
    let mut row1 = vec![x; k + 1];
    row1[0] = y;
    row1[1] = y;
    rows.push(row1);
    let mut row2 = vec![x; k + 1];
    row2[0] = y;
    row2[2] = y;
    rows.push(row2);
    for pos in 3..=k {
        // y in position pos+1 (1-based), x elsewhere
        let mut row = vec![x; k + 1];
        row[pos] = y;
        rows.push(row);
    }
    rows
}

/// Near-unanimity patterns at (x, y): y in each of the k positions once.
fn nu_patterns(k: usize, x: u8, y: u8) -> Vec<Vec<u8>> {
    (0..k)
        .map(|p| {
            let mut row = vec![x; k];
            row[p] = y;
            row
        })
        .collect()
}

fn build_instance(
    alg: &FiniteAlgebra,
    variables: usize,
    patterns: impl Fn(u8, u8) -> Vec<Vec<u8>>,
) -> EdgeInstance {
    let n = alg.size();
    let pair_rank = TupleRank::new(n, 2).unwrap();
    let mut generators: Vec<Vec<u8>> = vec![Vec::new(); variables];
    let mut target = Vec::new();
    let mut rows_per_pair = 0;
    for r in 0..pair_rank.count() {
        let xy = pair_rank.unrank(r).unwrap();
        let (x, y) = (xy[0] as u8, xy[1] as u8);
        let rows = patterns(x, y);
        rows_per_pair = rows.len();
        for row in rows {
            debug_assert_eq!(row.len(), variables);
            for (g, &value) in generators.iter_mut().zip(&row) {
                g.push(value);
            }
            target.push(x);
        }
    }
    EdgeInstance {
        k: rows_per_pair,
        generators,
        target,
    }
}

/// Builds the constraint system of the k-edge identities for `alg`.
pub fn edge_instance(alg: &FiniteAlgebra, k: usize) -> Result<EdgeInstance> {
    if k < 2 {
        return Err(Error::ArityTooSmall { min: 2, got: k });
    }
    Ok(build_instance(alg, k + 1, |x, y| edge_patterns(k, x, y)))
}

/// Checks the k-edge identities for a (k+1)-variable term by evaluation
/// over all (x, y) in A^2.
pub fn verify_edge_term(alg: &FiniteAlgebra, t: &Term, k: usize) -> Result<bool> {
    for x in 0..alg.size() {
        for y in 0..alg.size() {
            for row in edge_patterns(k, x as u8, y as u8) {
                let assignment: Vec<usize> = row.iter().map(|&v| v as usize).collect();
                if crate::algebra::eval_term(alg, t, &assignment)? != x {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Checks d(x,x,y) = d(y,x,x) = y over all pairs.
pub fn verify_malcev_term(alg: &FiniteAlgebra, d: &Term) -> Result<bool> {
    for x in 0..alg.size() {
        for y in 0..alg.size() {
            if crate::algebra::eval_term(alg, d, &[x, x, y])? != y
                || crate::algebra::eval_term(alg, d, &[y, x, x])? != y
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks the k-ary near-unanimity identities by evaluation.
pub fn verify_nu_term(alg: &FiniteAlgebra, m: &Term, k: usize) -> Result<bool> {
    for x in 0..alg.size() {
        for y in 0..alg.size() {
            for row in nu_patterns(k, x as u8, y as u8) {
                let assignment: Vec<usize> = row.iter().map(|&v| v as usize).collect();
                if crate::algebra::eval_term(alg, m, &assignment)? != x {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn search_witness(
    alg: &FiniteAlgebra,
    instance: &EdgeInstance,
    budget: &Budget,
) -> Result<Option<Term>> {
    let width = instance.target.len();
    let f = sg(alg, width, &instance.generators, true, budget)?;
    Ok(f.index_of(&instance.target)
        .map(|i| f.provenance().unwrap()[i].clone()))
}

/// Returns a (k+1)-variable witness term for the k-edge identities, if one
/// exists in the term clone of `alg`. The witness is re-verified by
/// evaluation before it is returned.
pub fn has_edge_term(alg: &FiniteAlgebra, k: usize, budget: &Budget) -> Result<Option<Term>> {
    let instance = edge_instance(alg, k)?;
    match search_witness(alg, &instance, budget)? {
        None => Ok(None),
        Some(t) => {
            assert!(
                verify_edge_term(alg, &t, k)?,
                "closure produced a witness that fails the edge identities"
            );
            Ok(Some(t))
        }
    }
}

/// Returns a Mal'cev term d with d(x,x,y) = d(y,x,x) = y, if one exists.
/// d is obtained from a 2-edge witness t by d(x,y,z) := t(y,x,z).
pub fn has_malcev_term(alg: &FiniteAlgebra, budget: &Budget) -> Result<Option<Term>> {
    match has_edge_term(alg, 2, budget)? {
        None => Ok(None),
        Some(t) => {
            let d = t.substitute(&[Term::var(2), Term::var(1), Term::var(3)]);
            assert!(
                verify_malcev_term(alg, &d)?,
                "swapped 2-edge witness must be a Mal'cev term"
            );
            Ok(Some(d))
        }
    }
}

/// Returns a k-ary near-unanimity witness term, if one exists (k >= 3).
pub fn has_nu_term(alg: &FiniteAlgebra, k: usize, budget: &Budget) -> Result<Option<Term>> {
    if k < 3 {
        return Err(Error::ArityTooSmall { min: 3, got: k });
    }
    let instance = build_instance(alg, k, |x, y| nu_patterns(k, x, y));
    match search_witness(alg, &instance, budget)? {
        None => Ok(None),
        Some(t) => {
            assert!(
                verify_nu_term(alg, &t, k)?,
                "closure produced a witness that fails the near-unanimity identities"
            );
            Ok(Some(t))
        }
    }
}

/// Least k <= k_max for which `alg` has a k-edge term.
pub fn min_edge_arity(
    alg: &FiniteAlgebra,
    k_max: usize,
    budget: &Budget,
) -> Result<Option<(usize, Term)>> {
    if k_max < 2 {
        return Err(Error::ArityTooSmall { min: 2, got: k_max });
    }
    for k in 2..=k_max {
        if let Some(t) = has_edge_term(alg, k, budget)? {
            return Ok(Some((k, t)));
        }
    }
    Ok(None)
}
