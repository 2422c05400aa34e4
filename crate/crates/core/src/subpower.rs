//! Generated subuniverses of finite powers A^m, fork relations, projections,
//! and the fork-based equality criterion for algebras with an edge term.

use crate::algebra::{FiniteAlgebra, Term};
use crate::closure::{close, Budget};
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// A subuniverse of A^m, stored as tuples in rank (lexicographic) order.
#[derive(Debug, Clone)]
pub struct Subpower {
    base: FiniteAlgebra,
    width: usize,
    tuples: Vec<Vec<u8>>,
    generators: Vec<Vec<u8>>,
    provenance: Option<Vec<Term>>,
    /// Set when the generator set was empty and the signature has no
    /// constants, so the result is the empty subuniverse.
    pub empty_flagged: bool,
}

/// The fork relation of a subpower at one place: all pairs of i-th
/// coordinates of tuples sharing their first i-1 coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForkRelation {
    pub place: usize,
    pub pairs: BTreeSet<(u8, u8)>,
}

impl Subpower {
    pub fn base(&self) -> &FiniteAlgebra {
        &self.base
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Tuples in rank order.
    pub fn tuples(&self) -> &[Vec<u8>] {
        &self.tuples
    }

    pub fn generators(&self) -> &[Vec<u8>] {
        &self.generators
    }

    /// Witness terms parallel to `tuples()`, if generation recorded them.
    pub fn provenance(&self) -> Option<&[Term]> {
        self.provenance.as_deref()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[u8]) -> bool {
        self.tuples.binary_search_by(|t| t.as_slice().cmp(tuple)).is_ok()
    }

    pub fn index_of(&self, tuple: &[u8]) -> Option<usize> {
        self.tuples.binary_search_by(|t| t.as_slice().cmp(tuple)).ok()
    }

    pub fn is_subset_of(&self, other: &Subpower) -> bool {
        self.tuples.iter().all(|t| other.contains(t))
    }

    /// The abstract algebra induced on the tuple set: element `i` is
    /// `tuples()[i]`, operations act coordinatewise.
    pub fn induced_algebra(&self) -> Result<FiniteAlgebra> {
        let sig = self.base.signature().clone();
        let n = self.tuples.len();
        assert!(n > 0, "empty subuniverse has no induced algebra");
        let mut tables = Vec::with_capacity(sig.len());
        for (sym, op) in sig.symbols().iter().enumerate() {
            let len = n.pow(op.arity as u32);
            let mut table = Vec::with_capacity(len);
            let mut idx = vec![0usize; op.arity];
            for r in 0..len {
                let mut rr = r;
                for p in (0..op.arity).rev() {
                    idx[p] = rr % n;
                    rr /= n;
                }
                let mut result = vec![0u8; self.width];
                for (j, slot) in result.iter_mut().enumerate() {
                    let args: Vec<usize> =
                        idx.iter().map(|&i| self.tuples[i][j] as usize).collect();
                    *slot = self.base.apply(sym, &args)? as u8;
                }
                let pos = self
                    .index_of(&result)
                    .expect("closed tuple set must contain operation results");
                table.push(pos);
            }
            tables.push(table);
        }
        FiniteAlgebra::new(None, sig, n, tables)
    }
}

/// Generates the smallest subuniverse of `alg`^`m` containing `gens`.
pub fn sg(
    alg: &FiniteAlgebra,
    m: usize,
    gens: &[Vec<u8>],
    with_provenance: bool,
    budget: &Budget,
) -> Result<Subpower> {
    if m == 0 {
        return Err(Error::ZeroWidth);
    }
    let coords: Vec<&FiniteAlgebra> = vec![alg; m];
    let closed = close(&coords, gens, with_provenance, budget)?;
    let empty_flagged = closed.tuples.is_empty();
    Ok(Subpower {
        base: alg.clone(),
        width: m,
        tuples: closed.tuples,
        generators: gens.to_vec(),
        provenance: closed.terms,
        empty_flagged,
    })
}

/// The fork relation phi_i(F): pairs (a_i, b_i) over tuples a, b in F that
/// agree on their first i-1 coordinates. Places are 1-based.
pub fn fork(f: &Subpower, place: usize) -> Result<ForkRelation> {
    if place == 0 || place > f.width {
        return Err(Error::PlaceOutOfRange {
            place,
            width: f.width,
        });
    }
    let mut pairs = BTreeSet::new();
    // Tuples are sorted, so equal (i-1)-prefixes are contiguous.
    let prefix = place - 1;
    let mut start = 0;
    while start < f.tuples.len() {
        let mut end = start + 1;
        while end < f.tuples.len() && f.tuples[end][..prefix] == f.tuples[start][..prefix] {
            end += 1;
        }
        for a in &f.tuples[start..end] {
            for b in &f.tuples[start..end] {
                pairs.insert((a[prefix], b[prefix]));
            }
        }
        start = end;
    }
    Ok(ForkRelation { place, pairs })
}

/// Projection of F to the (1-based, strictly increasing) index set `t`.
pub fn proj(f: &Subpower, t: &[usize]) -> Result<BTreeSet<Vec<u8>>> {
    if t.is_empty() {
        return Err(Error::ZeroWidth);
    }
    for w in t.windows(2) {
        assert!(w[0] < w[1], "index set must be strictly increasing");
    }
    if *t.last().unwrap() > f.width || t[0] == 0 {
        return Err(Error::PlaceOutOfRange {
            place: *t.last().unwrap().max(&t[0]),
            width: f.width,
        });
    }
    Ok(f
        .tuples
        .iter()
        .map(|tuple| t.iter().map(|&i| tuple[i - 1]).collect())
        .collect())
}

/// The fork/projection equality criterion: for F a subuniverse of G over an
/// algebra with a k-edge term, equality of all forks and of all projections
/// to fewer than k coordinates forces F = G.
pub fn fg_equal(f: &Subpower, g: &Subpower, k: usize) -> Result<bool> {
    if f.width != g.width {
        return Err(Error::WidthMismatch(f.width, g.width));
    }
    if !f.is_subset_of(g) {
        return Err(Error::NotSubset);
    }
    for i in 1..=f.width {
        if fork(f, i)? != fork(g, i)? {
            return Ok(false);
        }
    }
    for t in index_subsets_below(f.width, k) {
        if proj(f, &t)? != proj(g, &t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Nonempty subsets of {1,…,m} with fewer than k elements, in a fixed order.
fn index_subsets_below(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(next: usize, m: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        if current.len() + 1 >= k {
            return;
        }
        for i in next..=m {
            current.push(i);
            rec(i + 1, m, k, current, out);
            current.pop();
        }
    }
    rec(1, m, k, &mut current, &mut out);
    out
}

/// Brute-force enumeration of all nonempty subuniverses of `alg`^`m`.
/// Testing oracle; the subset space must stay below `limit`.
pub fn enumerate_subpowers(
    alg: &FiniteAlgebra,
    m: usize,
    limit: u64,
) -> Result<Vec<Vec<Vec<u8>>>> {
    if m == 0 {
        return Err(Error::ZeroWidth);
    }
    let total = (alg.size() as u128).pow(m as u32);
    if total > 63 {
        return Err(Error::LimitExceeded(limit));
    }
    let total = total as u32;
    let subsets: u64 = 1u64 << total;
    if subsets > limit {
        return Err(Error::LimitExceeded(limit));
    }
    let rank = crate::algebra::TupleRank::new(alg.size(), m)?;
    let all: Vec<Vec<u8>> = (0..total as u128)
        .map(|r| rank.unrank(r).unwrap().iter().map(|&v| v as u8).collect())
        .collect();
    let sig = alg.signature();
    let mut out = Vec::new();
    'subset: for mask in 1u64..subsets {
        let members: Vec<usize> = (0..total as usize).filter(|&i| mask >> i & 1 == 1).collect();
        for (sym, op) in sig.symbols().iter().enumerate() {
            for idx in all_combos(members.len(), op.arity) {
                let mut result = vec![0u8; m];
                for (j, slot) in result.iter_mut().enumerate() {
                    let args: Vec<usize> = idx
                        .iter()
                        .map(|&i| all[members[i]][j] as usize)
                        .collect();
                    *slot = alg.apply(sym, &args)? as u8;
                }
                let r = rank
                    .rank(&result.iter().map(|&v| v as usize).collect::<Vec<_>>())
                    .unwrap() as u32;
                if mask >> r & 1 == 0 {
                    continue 'subset;
                }
            }
        }
        out.push(members.iter().map(|&i| all[i].clone()).collect());
    }
    Ok(out)
}

/// All argument index vectors of the given arity over `0..count`, in
/// lexicographic order. Empty when `count == 0` and `arity > 0`.
pub(crate) fn all_combos(count: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if arity == 0 {
        out.push(Vec::new());
        return out;
    }
    if count == 0 {
        return out;
    }
    let mut idx = vec![0usize; arity];
    loop {
        out.push(idx.clone());
        let mut p = arity;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < count {
                break;
            }
            idx[p] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn tup(v: &[u8]) -> Vec<u8> {
        v.to_vec()
    }

    #[test]
    fn sg_z2_single_generator() {
        let z2 = samples::z2_group();
        let f = sg(&z2, 2, &[tup(&[0, 1])], false, &Budget::default()).unwrap();
        assert_eq!(f.tuples(), &[tup(&[0, 0]), tup(&[0, 1])]);
    }

    #[test]
    fn sg_z2_two_generators_full() {
        let z2 = samples::z2_group();
        let f = sg(
            &z2,
            2,
            &[tup(&[0, 1]), tup(&[1, 0])],
            false,
            &Budget::default(),
        )
        .unwrap();
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn sg_of_everything_is_identity() {
        let z2 = samples::z2_group();
        let all: Vec<Vec<u8>> = vec![tup(&[0, 0]), tup(&[0, 1]), tup(&[1, 0]), tup(&[1, 1])];
        let f = sg(&z2, 2, &all, false, &Budget::default()).unwrap();
        assert_eq!(f.tuples(), all.as_slice());
    }

    #[test]
    fn sg_idempotent_and_monotone() {
        let z4 = samples::zn_group(4);
        let x = sg(&z4, 2, &[tup(&[1, 2])], false, &Budget::default()).unwrap();
        let xx = sg(&z4, 2, x.tuples(), false, &Budget::default()).unwrap();
        assert_eq!(x.tuples(), xx.tuples());
        let y = sg(
            &z4,
            2,
            &[tup(&[1, 2]), tup(&[0, 1])],
            false,
            &Budget::default(),
        )
        .unwrap();
        assert!(x.is_subset_of(&y));
    }

    #[test]
    fn sg_empty_generators() {
        let z2 = samples::z2_group();
        let f = sg(&z2, 2, &[], false, &Budget::default()).unwrap();
        // constants generate the unit tuple
        assert_eq!(f.tuples(), &[tup(&[0, 0])]);
        assert!(!f.empty_flagged);

        let bare = samples::empty_signature(2);
        let g = sg(&bare, 2, &[], false, &Budget::default()).unwrap();
        assert!(g.is_empty());
        assert!(g.empty_flagged);
    }

    #[test]
    fn sg_rejects_width_zero() {
        let z2 = samples::z2_group();
        assert!(matches!(
            sg(&z2, 0, &[], false, &Budget::default()),
            Err(Error::ZeroWidth)
        ));
    }

    #[test]
    fn provenance_reproduces_tuples() {
        let z4 = samples::zn_group(4);
        let gens = vec![tup(&[1, 2]), tup(&[0, 3])];
        let f = sg(&z4, 2, &gens, true, &Budget::default()).unwrap();
        let terms = f.provenance().unwrap();
        for (tuple, term) in f.tuples().iter().zip(terms) {
            for j in 0..2 {
                let assignment: Vec<usize> =
                    gens.iter().map(|g| g[j] as usize).collect();
                let v = crate::algebra::eval_term(&z4, term, &assignment).unwrap();
                assert_eq!(v as u8, tuple[j]);
            }
        }
    }

    #[test]
    fn fork_examples() {
        let z2 = samples::z2_group();
        let diag = sg(&z2, 2, &[tup(&[1, 1])], false, &Budget::default()).unwrap();
        assert_eq!(diag.tuples(), &[tup(&[0, 0]), tup(&[1, 1])]);
        let f1 = fork(&diag, 1).unwrap();
        assert_eq!(f1.pairs.len(), 4);
        let f2 = fork(&diag, 2).unwrap();
        assert_eq!(
            f2.pairs,
            [(0, 0), (1, 1)].into_iter().collect::<BTreeSet<_>>()
        );
        assert!(matches!(fork(&diag, 3), Err(Error::PlaceOutOfRange { .. })));
    }

    #[test]
    fn fork_of_singleton_is_diagonal() {
        let z2 = samples::z2_group();
        let f = sg(&z2, 3, &[], false, &Budget::default()).unwrap();
        assert_eq!(f.len(), 1);
        for i in 1..=3 {
            let fk = fork(&f, i).unwrap();
            assert!(fk.pairs.iter().all(|&(a, b)| a == b));
        }
    }

    #[test]
    fn fork_monotone_under_inclusion() {
        let z4 = samples::zn_group(4);
        let f = sg(&z4, 3, &[tup(&[1, 2, 3])], false, &Budget::default()).unwrap();
        let g = sg(
            &z4,
            3,
            &[tup(&[1, 2, 3]), tup(&[0, 1, 1])],
            false,
            &Budget::default(),
        )
        .unwrap();
        for i in 1..=3 {
            let ff = fork(&f, i).unwrap();
            let fg = fork(&g, i).unwrap();
            assert!(ff.pairs.is_subset(&fg.pairs));
        }
    }

    #[test]
    fn proj_examples() {
        let z2 = samples::z2_group();
        let diag = sg(&z2, 2, &[tup(&[1, 1])], false, &Budget::default()).unwrap();
        let p = proj(&diag, &[1]).unwrap();
        assert_eq!(p, [tup(&[0]), tup(&[1])].into_iter().collect());
        let f = sg(&z2, 2, &[tup(&[0, 1])], false, &Budget::default()).unwrap();
        assert_eq!(proj(&f, &[1]).unwrap(), [tup(&[0])].into_iter().collect());
        let full = sg(
            &z2,
            2,
            &[tup(&[0, 1]), tup(&[1, 0])],
            false,
            &Budget::default(),
        )
        .unwrap();
        assert_eq!(proj(&full, &[1, 2]).unwrap().len(), 4);
        assert!(proj(&full, &[3]).is_err());
    }

    #[test]
    fn fg_equal_detects_difference() {
        let z2 = samples::z2_group();
        let f = sg(&z2, 2, &[tup(&[1, 1])], false, &Budget::default()).unwrap();
        let g = sg(
            &z2,
            2,
            &[tup(&[0, 1]), tup(&[1, 0])],
            false,
            &Budget::default(),
        )
        .unwrap();
        assert!(!fg_equal(&f, &g, 2).unwrap());
        assert!(fg_equal(&g, &g, 2).unwrap());
        assert!(matches!(fg_equal(&g, &f, 2), Err(Error::NotSubset)));
    }

    #[test]
    fn enumerate_subpowers_z2() {
        let z2 = samples::z2_group();
        let subs = enumerate_subpowers(&z2, 1, 1 << 20).unwrap();
        assert_eq!(
            subs,
            vec![vec![tup(&[0])], vec![tup(&[0]), tup(&[1])]]
        );
        // the five subgroups of Z2 x Z2; every enumerated set is closed
        let subs2 = enumerate_subpowers(&z2, 2, 1 << 20).unwrap();
        assert_eq!(subs2.len(), 5);
        for s in &subs2 {
            assert!(s.contains(&tup(&[0, 0])));
            let re = sg(&z2, 2, s, false, &Budget::default()).unwrap();
            assert_eq!(re.tuples(), s.as_slice());
        }
        // and every generated subpower appears in the enumeration
        let f = sg(&z2, 2, &[tup(&[0, 1])], false, &Budget::default()).unwrap();
        assert!(subs2.iter().any(|s| s.as_slice() == f.tuples()));
    }

    #[test]
    fn enumerate_subpowers_trivial_algebra() {
        let t = FiniteAlgebra::trivial(samples::z2_group().signature().clone());
        let subs = enumerate_subpowers(&t, 3, 1 << 20).unwrap();
        assert_eq!(subs.len(), 1);
    }

    #[test]
    fn enumerate_subpowers_limit() {
        let z2 = samples::z2_group();
        assert!(matches!(
            enumerate_subpowers(&z2, 2, 4),
            Err(Error::LimitExceeded(_))
        ));
    }

    use crate::algebra::FiniteAlgebra;
}
