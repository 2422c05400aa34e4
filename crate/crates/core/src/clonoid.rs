//! Clonoids: arity-indexed sets of functions from a finite source set into
//! a target algebra, closed under pointwise target operations and argument
//! reindexing. Fork sets at a word, the word sets they induce, the bounded
//! comparison criterion for comparable clonoids, and the equational-theory
//! encoding of a subvariety as a clonoid of term-function pairs.
//!
//! Layers are materialized only up to an arity bound; every verdict that
//! truncates an unbounded quantifier says so.

use crate::algebra::{FiniteAlgebra, TupleRank};
use crate::closure::{close, Budget};
use crate::error::{Error, Result};
use crate::variety::{var_member, projection_vectors};
use crate::wpo::{all_words, Word};
use std::collections::{BTreeMap, BTreeSet};

/// A function table A^n -> B, rank-indexed, length t^n.
pub type FnTable = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clonoid {
    source_size: usize,
    target: FiniteAlgebra,
    arity_bound: usize,
    /// layers[n-1] holds the n-ary member tables in rank order.
    layers: Vec<Vec<FnTable>>,
}

/// The forks of a clonoid layer at a word: value pairs at the word's rank
/// over functions agreeing on all lexicographically smaller arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForkSet {
    pub word: Word,
    pub pairs: BTreeSet<(u8, u8)>,
}

/// Outcome of the bounded comparison criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CriterionVerdict {
    /// Criterion passes and layerwise inclusion was confirmed at every
    /// materialized arity.
    Holds,
    /// Criterion passes at the word-length bound; the unbounded quantifier
    /// was truncated there.
    HoldsUpToBound,
    /// A low-arity member of C is missing from D.
    FailsLowArity(FnTable),
    /// Fork inclusion fails at this word.
    FailsAtWord(Word),
}

impl Clonoid {
    pub fn source_size(&self) -> usize {
        self.source_size
    }

    pub fn target(&self) -> &FiniteAlgebra {
        &self.target
    }

    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    /// The n-ary layer, 1-based, in rank order.
    pub fn layer(&self, n: usize) -> Result<&[FnTable]> {
        if n == 0 || n > self.arity_bound {
            return Err(Error::ArityOverBound {
                arity: n,
                bound: self.arity_bound,
            });
        }
        Ok(&self.layers[n - 1])
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    /// True when some layer is empty (possible without target constants).
    pub fn has_empty_layer(&self) -> bool {
        self.layers.iter().any(Vec::is_empty)
    }
}

/// The minor of a k-ary table under an argument map sigma (1-based entries
/// into {1,…,n}): (f . sigma)(a_1,…,a_n) = f(a_{sigma(1)},…,a_{sigma(k)}).
pub fn minor(f: &[u8], t: usize, sigma: &[usize], n: usize) -> Result<FnTable> {
    let k = sigma.len();
    let from = TupleRank::new(t, k)?;
    let to = TupleRank::new(t, n)?;
    if f.len() != from.count() as usize {
        return Err(Error::WidthMismatch(f.len(), from.count() as usize));
    }
    for &s in sigma {
        if s == 0 || s > n {
            return Err(Error::PlaceOutOfRange { place: s, width: n });
        }
    }
    let mut out = Vec::with_capacity(to.count() as usize);
    for r in 0..to.count() {
        let args = to.unrank(r)?;
        let pulled: Vec<usize> = sigma.iter().map(|&s| args[s - 1]).collect();
        out.push(f[from.rank(&pulled)? as usize]);
    }
    Ok(out)
}

/// All argument maps {1..k} -> {1..n}, in lexicographic order.
fn argument_maps(k: usize, n: usize) -> Vec<Vec<usize>> {
    crate::subpower::all_combos(n, k)
        .into_iter()
        .map(|c| c.into_iter().map(|i| i + 1).collect())
        .collect()
}

/// Generates the smallest clonoid containing the seed tables, with layers
/// materialized up to `arity_bound`. Each layer is the closure, under the
/// pointwise target operations, of all reindexings of all seeds into that
/// arity; minors commute with pointwise operations, so this is the full
/// closure.
pub fn generate_clonoid(
    target: &FiniteAlgebra,
    source_size: usize,
    seeds: &[(usize, FnTable)],
    arity_bound: usize,
    budget: &Budget,
) -> Result<Clonoid> {
    assert!(arity_bound >= 1);
    for (arity, table) in seeds {
        if *arity == 0 || *arity > arity_bound {
            return Err(Error::ArityOverBound {
                arity: *arity,
                bound: arity_bound,
            });
        }
        let expected = source_size.pow(*arity as u32);
        if table.len() != expected {
            return Err(Error::WidthMismatch(table.len(), expected));
        }
        for &v in table {
            if v as usize >= target.size() {
                return Err(Error::TupleEntryOutOfRange {
                    value: v as usize,
                    base: target.size(),
                });
            }
        }
    }
    let mut layers = Vec::with_capacity(arity_bound);
    for n in 1..=arity_bound {
        let width = source_size.pow(n as u32);
        let mut gens: Vec<FnTable> = Vec::new();
        for (k, table) in seeds {
            for sigma in argument_maps(*k, n) {
                let g = minor(table, source_size, &sigma, n)?;
                if !gens.contains(&g) {
                    gens.push(g);
                }
            }
        }
        let coords: Vec<&FiniteAlgebra> = vec![target; width];
        let closed = close(&coords, &gens, false, budget)?;
        layers.push(closed.tuples);
    }
    Ok(Clonoid {
        source_size,
        target: target.clone(),
        arity_bound,
        layers,
    })
}

/// Verifies both clonoid closure conditions exhaustively up to the arity
/// bound. Empty layers pass vacuously.
pub fn is_clonoid(c: &Clonoid, budget: &Budget) -> Result<bool> {
    for n in 1..=c.arity_bound {
        let layer = c.layer(n)?;
        if layer.is_empty() {
            continue;
        }
        // closure under pointwise target operations
        let width = c.source_size.pow(n as u32);
        let coords: Vec<&FiniteAlgebra> = vec![&c.target; width];
        let closed = close(&coords, layer, false, budget)?;
        if closed.tuples.len() != layer.len() {
            return Ok(false);
        }
        // closure under argument reindexing
        for m in 1..=c.arity_bound {
            let target_layer = c.layer(m)?;
            for f in layer {
                for sigma in argument_maps(n, m) {
                    let g = minor(f, c.source_size, &sigma, m)?;
                    if target_layer.binary_search(&g).is_err() {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// The fork set of the |a|-ary layer at the word a: functions are grouped
/// by their values on all ranks below rank(a); forks are the value pairs
/// at rank(a) within a group.
pub fn phi_forks(c: &Clonoid, a: &Word) -> Result<ForkSet> {
    let n = a.len();
    let layer = c.layer(n)?;
    if a.alphabet() != c.source_size {
        return Err(Error::AlphabetMismatch(a.alphabet(), c.source_size));
    }
    let rank = TupleRank::new(c.source_size, n)?;
    let r = rank.rank(
        &a.letters().iter().map(|&l| l as usize).collect::<Vec<_>>(),
    )? as usize;
    let mut groups: BTreeMap<&[u8], Vec<u8>> = BTreeMap::new();
    for f in layer {
        groups.entry(&f[..r]).or_default().push(f[r]);
    }
    let mut pairs = BTreeSet::new();
    for values in groups.values() {
        for &x in values {
            for &y in values {
                pairs.insert((x, y));
            }
        }
    }
    Ok(ForkSet {
        word: a.clone(),
        pairs,
    })
}

/// All words of length <= max_len whose fork set is contained in `alpha`.
pub fn psi(
    c: &Clonoid,
    alpha: &BTreeSet<(u8, u8)>,
    max_len: usize,
) -> Result<Vec<Word>> {
    if max_len > c.arity_bound {
        return Err(Error::ArityOverBound {
            arity: max_len,
            bound: c.arity_bound,
        });
    }
    let mut out = Vec::new();
    for w in all_words(c.source_size, max_len) {
        if phi_forks(c, &w)?.pairs.is_subset(alpha) {
            out.push(w);
        }
    }
    Ok(out)
}

/// The bounded comparison criterion for clonoids over a target with a
/// k-edge term: C is below D when the t^(k-1)-ary layers are included and
/// the forks of C at every word are included in the forks of D at that
/// word. The per-word form is equivalent to quantifying the induced word
/// sets over all binary relations on B, and avoids iterating the 2^(|B|^2)
/// relations.
pub fn clonoid_leq_criterion(
    c: &Clonoid,
    d: &Clonoid,
    k: usize,
    max_len: usize,
) -> Result<CriterionVerdict> {
    if k < 2 {
        return Err(Error::ArityTooSmall { min: 2, got: k });
    }
    if c.source_size != d.source_size {
        return Err(Error::AlphabetMismatch(c.source_size, d.source_size));
    }
    if c.target != d.target {
        return Err(Error::SignatureMismatch);
    }
    let low = c.source_size.pow((k - 1) as u32);
    let c_low = c.layer(low)?;
    let d_low = d.layer(low)?;
    for f in c_low {
        if d_low.binary_search(f).is_err() {
            return Ok(CriterionVerdict::FailsLowArity(f.clone()));
        }
    }
    for w in all_words(c.source_size, max_len.min(c.arity_bound).min(d.arity_bound)) {
        let fc = phi_forks(c, &w)?;
        let fd = phi_forks(d, &w)?;
        if !fc.pairs.is_subset(&fd.pairs) {
            return Ok(CriterionVerdict::FailsAtWord(w));
        }
    }
    // when full layerwise inclusion is visible inside the bound, the
    // verdict needs no truncation marker
    let bound = c.arity_bound.min(d.arity_bound);
    let layerwise = (1..=bound).all(|n| {
        let (lc, ld) = (c.layer(n).unwrap(), d.layer(n).unwrap());
        lc.iter().all(|f| ld.binary_search(f).is_ok())
    });
    if layerwise {
        Ok(CriterionVerdict::Holds)
    } else {
        Ok(CriterionVerdict::HoldsUpToBound)
    }
}

/// The n-ary layer of the equational theory of Var(b), encoded over a:
/// all pairs (s^a, t^a) of n-ary term-function tables of a for identities
/// s ~ t holding in b. Computed as the subalgebra of
/// a^(|a|^n) x b^(|b|^n) generated by paired projections, fibered over the
/// b-component.
pub fn th_clonoid(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    n: usize,
    budget: &Budget,
) -> Result<BTreeSet<(FnTable, FnTable)>> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch);
    }
    let proj_a = projection_vectors(a.size(), n)?;
    let proj_b = projection_vectors(b.size(), n)?;
    let width_a = a.size().pow(n as u32);
    let width_b = b.size().pow(n as u32);
    budget.charge((width_a + width_b) as u64)?;
    let mut coords: Vec<&FiniteAlgebra> = vec![a; width_a];
    coords.extend(std::iter::repeat(b).take(width_b));
    let gens: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let mut g = proj_a[i].clone();
            g.extend_from_slice(&proj_b[i]);
            g
        })
        .collect();
    let closed = close(&coords, &gens, false, budget)?;
    let mut fibers: BTreeMap<Vec<u8>, Vec<FnTable>> = BTreeMap::new();
    for tuple in &closed.tuples {
        let (a_part, b_part) = tuple.split_at(width_a);
        fibers
            .entry(b_part.to_vec())
            .or_default()
            .push(a_part.to_vec());
    }
    let mut out = BTreeSet::new();
    for fiber in fibers.values() {
        for u in fiber {
            for v in fiber {
                out.insert((u.clone(), v.clone()));
            }
        }
    }
    Ok(out)
}

/// Agreement report between variety membership and the bounded
/// equational-theory inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaloisVerdict {
    /// Both sides gave the same answer within the bound.
    Agreement,
    /// Membership is false but every bounded inclusion holds; a separating
    /// arity lies beyond the bound.
    ConsistentUpToBound,
    /// Membership is true yet the inclusion fails at this arity: a bug.
    Discrepancy(usize),
}

#[derive(Debug, Clone)]
pub struct GaloisReport {
    /// Var(b1) is contained in Var(b2).
    pub member: bool,
    /// For n = 1..=n_max: th(a, b2, n) is contained in th(a, b1, n).
    pub inclusions: Vec<bool>,
    pub verdict: GaloisVerdict,
}

/// Compares Var(b1) ⊆ Var(b2) with the reverse inclusion of their
/// theories encoded over a, at arities up to n_max. Both algebras must lie
/// in Var(a).
pub fn galois_check(
    a: &FiniteAlgebra,
    b1: &FiniteAlgebra,
    b2: &FiniteAlgebra,
    n_max: usize,
    budget: &Budget,
) -> Result<GaloisReport> {
    if !var_member(b1, a, budget)?.member || !var_member(b2, a, budget)?.member {
        return Err(Error::Precondition(
            "both algebras must lie in the variety of the encoding algebra".into(),
        ));
    }
    let member = var_member(b1, b2, budget)?.member;
    let mut inclusions = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let th1 = th_clonoid(a, b1, n, budget)?;
        let th2 = th_clonoid(a, b2, n, budget)?;
        inclusions.push(th2.is_subset(&th1));
    }
    let verdict = if member {
        match inclusions.iter().position(|&ok| !ok) {
            Some(i) => GaloisVerdict::Discrepancy(i + 1),
            None => GaloisVerdict::Agreement,
        }
    } else if inclusions.iter().any(|&ok| !ok) {
        GaloisVerdict::Agreement
    } else {
        GaloisVerdict::ConsistentUpToBound
    };
    Ok(GaloisReport {
        member,
        inclusions,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn linear_clonoid(bound: usize) -> Clonoid {
        // seeded by the identity map {0,1} -> Z2; closes to the linear maps
        let z2 = samples::z2_group();
        generate_clonoid(&z2, 2, &[(1, vec![0, 1])], bound, &Budget::default()).unwrap()
    }

    #[test]
    fn generate_linear_layers() {
        let c = linear_clonoid(2);
        // sums of distinct variables plus zero: 0, x1 at arity 1;
        // 0, x1, x2, x1+x2 at arity 2
        assert_eq!(c.layer(1).unwrap().len(), 2);
        assert_eq!(c.layer(2).unwrap().len(), 4);
        assert!(is_clonoid(&c, &Budget::default()).unwrap());
    }

    #[test]
    fn constant_seed_gives_constants() {
        let z2 = samples::z2_group();
        let c = generate_clonoid(&z2, 2, &[(1, vec![0, 0])], 2, &Budget::default()).unwrap();
        // target-constant closure of Z2 is {0} alone
        assert_eq!(c.layer(1).unwrap(), &[vec![0, 0]]);
        assert_eq!(c.layer(2).unwrap(), &[vec![0, 0, 0, 0]]);
    }

    #[test]
    fn clone_is_a_clonoid() {
        // projections seeded over B = A with B's operations give the clone
        let z2 = samples::z2_group();
        let seeds = vec![(2usize, vec![0u8, 0, 1, 1]), (2, vec![0, 1, 0, 1])];
        let c = generate_clonoid(&z2, 2, &seeds, 2, &Budget::default()).unwrap();
        assert!(is_clonoid(&c, &Budget::default()).unwrap());
        // the binary layer is the free algebra of Var(Z2) on 2 generators
        let free2 = crate::variety::free_algebra(&z2, 2, &Budget::default()).unwrap();
        assert_eq!(c.layer(2).unwrap().len(), free2.carrier.len());
    }

    #[test]
    fn is_clonoid_rejects_broken_layer() {
        let mut c = linear_clonoid(2);
        c.layers[1].pop();
        assert!(!is_clonoid(&c, &Budget::default()).unwrap());
    }

    #[test]
    fn fork_examples_affine() {
        let c = linear_clonoid(2);
        let w01 = Word::new(2, vec![0, 1]).unwrap();
        let f = phi_forks(&c, &w01).unwrap();
        assert_eq!(f.pairs.len(), 4, "full relation at (0,1)");
        let w11 = Word::new(2, vec![1, 1]).unwrap();
        let f = phi_forks(&c, &w11).unwrap();
        assert_eq!(
            f.pairs,
            [(0, 0), (1, 1)].into_iter().collect(),
            "diagonal at the lex maximum"
        );
    }

    #[test]
    fn fork_of_singleton_layer_is_diagonal() {
        let z2 = samples::z2_group();
        let bare = samples::empty_signature(2);
        let _ = z2;
        // a clonoid over a constant-free target seeded with one constant map
        let c = generate_clonoid(&bare, 2, &[(1, vec![0, 0])], 2, &Budget::default()).unwrap();
        let f = phi_forks(&c, &Word::new(2, vec![0, 1]).unwrap()).unwrap();
        assert!(f.pairs.iter().all(|&(a, b)| a == b));
    }

    #[test]
    fn psi_examples() {
        let c = linear_clonoid(2);
        let full: BTreeSet<(u8, u8)> =
            [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().collect();
        assert_eq!(psi(&c, &full, 2).unwrap().len(), 6, "all words qualify");
        let diag: BTreeSet<(u8, u8)> = [(0, 0), (1, 1)].into_iter().collect();
        let words = psi(&c, &diag, 2).unwrap();
        assert!(words.contains(&Word::new(2, vec![1, 1]).unwrap()));
        assert!(!words.contains(&Word::new(2, vec![0, 1]).unwrap()));
        let empty = BTreeSet::new();
        assert!(psi(&c, &empty, 2).unwrap().is_empty());
    }

    #[test]
    fn minor_examples() {
        // xor collapsed onto one variable is the constant 0
        assert_eq!(minor(&[0, 1, 1, 0], 2, &[1, 1], 1).unwrap(), vec![0, 0]);
        assert_eq!(
            minor(&[0, 1, 1, 0], 2, &[1, 2], 2).unwrap(),
            vec![0, 1, 1, 0]
        );
        // unary f precomposed with the second projection
        assert_eq!(minor(&[1, 0], 2, &[2], 2).unwrap(), vec![1, 0, 1, 0]);
    }

    #[test]
    fn criterion_examples() {
        let b = Budget::default();
        let z2 = samples::z2_group();
        let big = linear_clonoid(2);
        let small = generate_clonoid(&z2, 2, &[(1, vec![0, 0])], 2, &b).unwrap();
        assert_eq!(
            clonoid_leq_criterion(&small, &big, 2, 2).unwrap(),
            CriterionVerdict::Holds
        );
        assert!(matches!(
            clonoid_leq_criterion(&big, &small, 2, 2).unwrap(),
            CriterionVerdict::FailsLowArity(_)
        ));
        assert_eq!(
            clonoid_leq_criterion(&big, &big, 2, 2).unwrap(),
            CriterionVerdict::Holds
        );
    }

    #[test]
    fn th_clonoid_examples() {
        let b = Budget::default();
        let z2 = samples::z2_group();
        let z4 = samples::zn_group(4);
        let trivial = crate::algebra::FiniteAlgebra::trivial(z2.signature().clone());

        // everything collapses in the trivial target: all pairs of the two
        // unary term functions of Z2
        let th = th_clonoid(&z2, &trivial, 1, &b).unwrap();
        assert_eq!(th.len(), 4);

        // same source and target: diagonal only
        let th = th_clonoid(&z2, &z2, 1, &b).unwrap();
        assert!(th.iter().all(|(u, v)| u == v));

        // Z4 onto Z2: x is identified with 3x, and 2x with 0
        let th = th_clonoid(&z4, &z2, 1, &b).unwrap();
        let x: Vec<u8> = vec![0, 1, 2, 3];
        let x3: Vec<u8> = vec![0, 3, 2, 1];
        assert!(th.contains(&(x.clone(), x3.clone())));
        let x2: Vec<u8> = vec![0, 2, 0, 2];
        let zero: Vec<u8> = vec![0, 0, 0, 0];
        assert!(th.contains(&(x2, zero)));
        assert!(!th.contains(&(x, vec![0, 0, 0, 0])));
    }

    #[test]
    fn galois_examples() {
        let b = Budget::default();
        let z2 = samples::z2_group();
        let z4 = samples::zn_group(4);
        let r = galois_check(&z4, &z2, &z4, 2, &b).unwrap();
        assert!(r.member);
        assert_eq!(r.verdict, GaloisVerdict::Agreement);

        let r = galois_check(&z4, &z4, &z2, 2, &b).unwrap();
        assert!(!r.member);
        assert_eq!(r.verdict, GaloisVerdict::Agreement);

        let r = galois_check(&z4, &z2, &z2, 2, &b).unwrap();
        assert!(r.member);
        assert_eq!(r.verdict, GaloisVerdict::Agreement);
    }
}
