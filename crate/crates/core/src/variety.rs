//! Identities, free algebras, variety membership, congruence generation,
//! relatively free quotients, subcover candidates, and cardinality-critical
//! algebras.

use crate::algebra::{eval_term, FiniteAlgebra, Term, TupleRank};
use crate::closure::{close, Budget};
use crate::error::{Error, Result};
use crate::subpower::{sg, Subpower};
use std::collections::{HashMap, HashSet};

/// A formal equation between two terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
    /// Number of variables quantified over; at least every index used.
    pub vars: usize,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Identity {
        let vars = lhs.max_var().max(rhs.max_var());
        Identity { lhs, rhs, vars }
    }

    pub fn display(&self, signature: &crate::algebra::Signature) -> String {
        format!(
            "{} ~ {}",
            self.lhs.display(signature),
            self.rhs.display(signature)
        )
    }
}

/// True iff both sides evaluate equally under every assignment.
pub fn satisfies(alg: &FiniteAlgebra, id: &Identity) -> Result<bool> {
    let rank = TupleRank::new(alg.size(), id.vars)?;
    for r in 0..rank.count() {
        let assignment = rank.unrank(r)?;
        if eval_term(alg, &id.lhs, &assignment)? != eval_term(alg, &id.rhs, &assignment)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The free algebra of Var(A) on k generators, realized as the subpower of
/// A^(|A|^k) generated by the k projection vectors. Elements are in
/// bijection with the k-ary term functions of A and each carries a witness
/// term from the closure provenance.
#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    pub base: FiniteAlgebra,
    pub generator_count: usize,
    pub carrier: Subpower,
}

/// The k projection vectors of A^(|A|^k), as closure generators.
pub fn projection_vectors(size: usize, k: usize) -> Result<Vec<Vec<u8>>> {
    let rank = TupleRank::new(size, k)?;
    let width = rank.count();
    if width > (1 << 20) {
        return Err(Error::BudgetExceeded(width as u64));
    }
    Ok((0..k)
        .map(|j| {
            (0..width)
                .map(|r| rank.unrank(r).unwrap()[j] as u8)
                .collect()
        })
        .collect())
}

pub fn free_algebra(alg: &FiniteAlgebra, k: usize, budget: &Budget) -> Result<FreeAlgebra> {
    let gens = projection_vectors(alg.size(), k)?;
    let width = alg.size().pow(k as u32).max(1);
    budget.charge(width as u64)?;
    let carrier = sg(alg, width, &gens, true, budget)?;
    Ok(FreeAlgebra {
        base: alg.clone(),
        generator_count: k,
        carrier,
    })
}

/// Verdict of a variety membership test, with a separating identity when
/// membership fails.
#[derive(Debug, Clone)]
pub struct MembershipVerdict {
    pub member: bool,
    /// An identity holding in Var(a) but failing in b, when `member` is
    /// false and provenance produced one.
    pub witness: Option<Identity>,
}

/// Decides b in Var(a) for algebras of a common signature.
///
/// With k the number of generators of b, the subalgebra of
/// A^(|A|^k) x B generated by the pairs (projection_i, b_i) is functional
/// exactly when the assignment "i-th projection goes to the i-th generator"
/// extends to a homomorphism from the k-generated free algebra of Var(a)
/// onto b.
pub fn var_member(b: &FiniteAlgebra, a: &FiniteAlgebra, budget: &Budget) -> Result<MembershipVerdict> {
    if b.signature() != a.signature() {
        return Err(Error::SignatureMismatch);
    }
    let (k, gens_b) = min_generators(b, budget)?;
    let proj = projection_vectors(a.size(), k)?;
    let width = a.size().pow(k as u32).max(1);
    budget.charge(width as u64)?;
    let mut coords: Vec<&FiniteAlgebra> = vec![a; width];
    coords.push(b);
    let gens: Vec<Vec<u8>> = (0..k)
        .map(|i| {
            let mut g = proj[i].clone();
            g.push(gens_b[i] as u8);
            g
        })
        .collect();
    let closed = close(&coords, &gens, true, budget)?;
    let terms = closed.terms.as_ref().unwrap();
    let mut by_a_part: HashMap<&[u8], usize> = HashMap::new();
    for (i, tuple) in closed.tuples.iter().enumerate() {
        let (a_part, b_part) = tuple.split_at(width);
        match by_a_part.get(a_part) {
            None => {
                by_a_part.insert(a_part, i);
            }
            Some(&j) => {
                if closed.tuples[j][width] != b_part[0] {
                    // terms[i] and terms[j] induce the same term function on
                    // a but differ on b at the chosen generators
                    return Ok(MembershipVerdict {
                        member: false,
                        witness: Some(Identity::new(terms[j].clone(), terms[i].clone())),
                    });
                }
            }
        }
    }
    Ok(MembershipVerdict {
        member: true,
        witness: None,
    })
}

/// A partition of `{0,…,n-1}` compatible with the operations of the algebra
/// it was built over. Blocks are numbered in order of their least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CongruencePartition {
    block_of: Vec<usize>,
    block_count: usize,
}

impl CongruencePartition {
    /// Canonicalizes a block-index map and verifies compatibility with the
    /// operations of `alg`.
    pub fn new(alg: &FiniteAlgebra, block_of: Vec<usize>) -> Result<Self> {
        assert_eq!(block_of.len(), alg.size());
        let part = Self::canonicalize(block_of);
        for (sym, op) in alg.signature().symbols().iter().enumerate() {
            for idx in crate::subpower::all_combos(alg.size(), op.arity) {
                for jdx in crate::subpower::all_combos(alg.size(), op.arity) {
                    if idx
                        .iter()
                        .zip(&jdx)
                        .all(|(&i, &j)| part.block_of[i] == part.block_of[j])
                    {
                        let r1 = alg.apply(sym, &idx)?;
                        let r2 = alg.apply(sym, &jdx)?;
                        if part.block_of[r1] != part.block_of[r2] {
                            return Err(Error::Precondition(format!(
                                "partition not compatible with `{}`",
                                op.name
                            )));
                        }
                    }
                }
            }
        }
        Ok(part)
    }

    fn canonicalize(block_of: Vec<usize>) -> Self {
        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let mut canonical = Vec::with_capacity(block_of.len());
        for b in block_of {
            let next = renumber.len();
            canonical.push(*renumber.entry(b).or_insert(next));
        }
        let block_count = renumber.len();
        CongruencePartition {
            block_of: canonical,
            block_count,
        }
    }

    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    pub fn is_discrete(&self) -> bool {
        self.block_count == self.block_of.len()
    }

    /// True if every block of `finer` lies inside a block of `self`.
    pub fn refines(finer: &CongruencePartition, coarser: &CongruencePartition) -> bool {
        assert_eq!(finer.block_of.len(), coarser.block_of.len());
        let mut image: HashMap<usize, usize> = HashMap::new();
        for i in 0..finer.block_of.len() {
            match image.get(&finer.block_of[i]) {
                None => {
                    image.insert(finer.block_of[i], coarser.block_of[i]);
                }
                Some(&c) => {
                    if c != coarser.block_of[i] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            false
        } else {
            // root at the smaller element to keep numbering stable
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
            true
        }
    }
}

/// Smallest congruence of `alg` containing `pairs`: union-find merging
/// alternated with one-coordinate operation propagation until fixpoint.
pub fn congruence_generate(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> CongruencePartition {
    let n = alg.size();
    let mut uf = UnionFind::new(n);
    let mut worklist: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in pairs {
        if uf.union(a, b) {
            worklist.push((a, b));
        }
    }
    while let Some((a, b)) = worklist.pop() {
        for (sym, op) in alg.signature().symbols().iter().enumerate() {
            if op.arity == 0 {
                continue;
            }
            // replace one argument position by a ~ b, all other positions
            // ranging over the carrier
            for pos in 0..op.arity {
                for rest in crate::subpower::all_combos(n, op.arity - 1) {
                    let mut args_a = Vec::with_capacity(op.arity);
                    let mut args_b = Vec::with_capacity(op.arity);
                    let mut it = rest.iter();
                    for p in 0..op.arity {
                        if p == pos {
                            args_a.push(a);
                            args_b.push(b);
                        } else {
                            let &v = it.next().unwrap();
                            args_a.push(v);
                            args_b.push(v);
                        }
                    }
                    let ra = alg.apply(sym, &args_a).unwrap();
                    let rb = alg.apply(sym, &args_b).unwrap();
                    if uf.union(ra, rb) {
                        worklist.push((ra, rb));
                    }
                }
            }
        }
    }
    let block_of: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    CongruencePartition::canonicalize(block_of)
}

/// The quotient algebra modulo a congruence partition.
pub fn quotient(alg: &FiniteAlgebra, theta: &CongruencePartition) -> Result<FiniteAlgebra> {
    let n = alg.size();
    let q = theta.block_count();
    // one representative per block (least element)
    let mut rep = vec![usize::MAX; q];
    for i in (0..n).rev() {
        rep[theta.block_of()[i]] = i;
    }
    let sig = alg.signature().clone();
    let mut tables = Vec::with_capacity(sig.len());
    for (sym, op) in sig.symbols().iter().enumerate() {
        let len = q.pow(op.arity as u32);
        let mut table = Vec::with_capacity(len);
        let mut idx = vec![0usize; op.arity];
        for r in 0..len {
            let mut rr = r;
            for p in (0..op.arity).rev() {
                idx[p] = rr % q;
                rr /= q;
            }
            let args: Vec<usize> = idx.iter().map(|&b| rep[b]).collect();
            table.push(theta.block_of()[alg.apply(sym, &args)?]);
        }
        tables.push(table);
    }
    FiniteAlgebra::new(None, sig, q, tables)
}

/// The congruence on the m-generated free algebra of Var(a) generated by
/// all substitution instances of the given identities.
pub fn rel_free_congruence(
    free: &FreeAlgebra,
    identities: &[Identity],
) -> Result<(FiniteAlgebra, CongruencePartition)> {
    let falg = free.carrier.induced_algebra()?;
    let mut pairs = Vec::new();
    for id in identities {
        for assignment in crate::subpower::all_combos(falg.size(), id.vars) {
            let l = eval_term(&falg, &id.lhs, &assignment)?;
            let r = eval_term(&falg, &id.rhs, &assignment)?;
            if l != r {
                pairs.push((l, r));
            }
        }
    }
    let theta = congruence_generate(&falg, &pairs);
    Ok((falg, theta))
}

/// The m-generated relatively free algebra of Var(a) ∩ Mod(identities).
pub fn rel_free_quotient(
    a: &FiniteAlgebra,
    m: usize,
    identities: &[Identity],
    budget: &Budget,
) -> Result<FiniteAlgebra> {
    let free = free_algebra(a, m, budget)?;
    let (falg, theta) = rel_free_congruence(&free, identities)?;
    quotient(&falg, &theta)
}

/// Least k such that some k-subset generates the algebra, together with a
/// witnessing generating set. One-element algebras without constants are
/// 1-generated by convention.
pub fn min_generators(alg: &FiniteAlgebra, budget: &Budget) -> Result<(usize, Vec<usize>)> {
    let n = alg.size();
    if alg.signature().has_constants() {
        let from_constants = sg(alg, 1, &[], false, budget)?;
        if from_constants.len() == n {
            return Ok((0, Vec::new()));
        }
    }
    for k in 1..=n {
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            let gens: Vec<Vec<u8>> = subset.iter().map(|&s| vec![s as u8]).collect();
            let generated = sg(alg, 1, &gens, false, budget)?;
            if generated.len() == n {
                return Ok((k, subset));
            }
            // next k-subset of {0..n-1} in lexicographic order
            let mut advanced = false;
            for i in (0..k).rev() {
                if subset[i] < n - (k - i) {
                    subset[i] += 1;
                    for j in i + 1..k {
                        subset[j] = subset[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    unreachable!("the full universe always generates the algebra");
}

/// One candidate subcover class of Var(a): identities that induce the same
/// bounded family of relatively free congruences.
#[derive(Debug, Clone)]
pub struct SubcoverClass {
    /// All defining identities grouped into this class.
    pub identities: Vec<Identity>,
    /// For m = 1..=m_bound, the congruence the class induces on the
    /// m-generated free algebra of Var(a).
    pub congruences: Vec<CongruencePartition>,
    /// Element counts of the m-generated relatively free quotients.
    pub quotient_sizes: Vec<usize>,
}

/// Candidate maximal proper subvarieties of Var(a), decided up to the free
/// generator bound `m_bound`.
///
/// Builds one witness term per element of the k-generated free algebra
/// (k = minimal generating size of a), forms a candidate variety
/// Var(a) ∩ Mod(s ~ t) for every pair of distinct elements, groups the
/// candidates by their congruence fingerprints at all m <= m_bound, and
/// keeps the classes maximal under reverse congruence inclusion.
pub fn subcovers(
    a: &FiniteAlgebra,
    m_bound: usize,
    budget: &Budget,
) -> Result<Vec<SubcoverClass>> {
    assert!(m_bound >= 1);
    let (k, _) = min_generators(a, budget)?;
    let free_k = free_algebra(a, k, budget)?;
    let terms = free_k
        .carrier
        .provenance()
        .expect("free algebra carries provenance")
        .to_vec();
    let frees: Vec<FreeAlgebra> = (1..=m_bound)
        .map(|m| free_algebra(a, m, budget))
        .collect::<Result<_>>()?;

    let mut classes: Vec<SubcoverClass> = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let id = Identity::new(terms[i].clone(), terms[j].clone());
            let mut congruences = Vec::with_capacity(m_bound);
            let mut quotient_sizes = Vec::with_capacity(m_bound);
            for free in &frees {
                let (_, theta) = rel_free_congruence(free, std::slice::from_ref(&id))?;
                quotient_sizes.push(theta.block_count());
                congruences.push(theta);
            }
            match classes
                .iter_mut()
                .find(|c| c.congruences == congruences)
            {
                Some(class) => class.identities.push(id),
                None => classes.push(SubcoverClass {
                    identities: vec![id],
                    congruences,
                    quotient_sizes,
                }),
            }
        }
    }

    // class x defines a variety below class y when x collapses at least as
    // much as y at every tested m; keep the maximal classes
    let strictly_below = |x: &SubcoverClass, y: &SubcoverClass| {
        x.congruences != y.congruences
            && x.congruences
                .iter()
                .zip(&y.congruences)
                .all(|(tx, ty)| CongruencePartition::refines(ty, tx))
    };
    let maximal: Vec<SubcoverClass> = classes
        .iter()
        .filter(|c| !classes.iter().any(|d| strictly_below(c, d)))
        .cloned()
        .collect();
    Ok(maximal)
}

/// Canonical form of an algebra under universe permutations: the relabeling
/// with the lexicographically least concatenated table vector.
pub fn canonical_form(alg: &FiniteAlgebra) -> FiniteAlgebra {
    let n = alg.size();
    let sig = alg.signature();
    let mut best: Option<Vec<Vec<usize>>> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        // relabeled tables under `perm` (element i becomes perm[i])
        let mut inv = vec![0usize; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
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
                let args: Vec<usize> = idx.iter().map(|&v| inv[v]).collect();
                table.push(perm[alg.apply(sym, &args).unwrap()]);
            }
            tables.push(table);
        }
        if best.as_ref().map_or(true, |b| &tables < b) {
            best = Some(tables);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    FiniteAlgebra::new(None, sig.clone(), n, best.unwrap()).unwrap()
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Probe identities: pairs of small terms (depth <= 2, at most
/// min(3, vars) variables) that induce the same term function on `a`.
/// Cheap necessary conditions for membership in Var(a).
fn probe_identities(a: &FiniteAlgebra, vars: usize) -> Result<Vec<Identity>> {
    let sig = a.signature();
    let mut depth0: Vec<Term> = (1..=vars).map(Term::var).collect();
    for (sym, op) in sig.symbols().iter().enumerate() {
        if op.arity == 0 {
            depth0.push(Term::App(sym, Vec::new()));
        }
    }
    let grow = |base: &[Term]| -> Vec<Term> {
        let mut out = Vec::new();
        for (sym, op) in sig.symbols().iter().enumerate() {
            if op.arity == 0 {
                continue;
            }
            for idx in crate::subpower::all_combos(base.len(), op.arity) {
                out.push(Term::App(sym, idx.iter().map(|&i| base[i].clone()).collect()));
            }
        }
        out
    };
    let depth1 = grow(&depth0);
    let mut all = depth0.clone();
    all.extend(depth1.clone());
    let mut pool = depth0;
    pool.extend(depth1);
    all.extend(grow(&pool));

    let mut by_table: HashMap<Vec<usize>, Term> = HashMap::new();
    let mut probes = Vec::new();
    for t in all {
        let table = crate::algebra::term_table(a, &t, vars)?;
        match by_table.get(&table) {
            None => {
                by_table.insert(table, t);
            }
            Some(rep) => probes.push(Identity::new(rep.clone(), t)),
        }
    }
    // shortest probes first: they reject random tables fastest
    probes.sort_by_key(|id| (id.vars, term_size(&id.lhs) + term_size(&id.rhs)));
    Ok(probes)
}

fn term_size(t: &Term) -> usize {
    match t {
        Term::Var(_) => 1,
        Term::App(_, children) => 1 + children.iter().map(term_size).sum::<usize>(),
    }
}

fn satisfies_fast(alg: &FiniteAlgebra, id: &Identity) -> bool {
    let n = alg.size();
    for assignment in crate::subpower::all_combos(n, id.vars) {
        let l = eval_term(alg, &id.lhs, &assignment).unwrap();
        let r = eval_term(alg, &id.rhs, &assignment).unwrap();
        if l != r {
            return false;
        }
    }
    true
}

/// All algebras of size `s` in Var(a), up to isomorphism, found by
/// exhaustive enumeration of operation tables. Brute-force oracle; the
/// table space is capped by `budget`.
pub fn enumerate_members(
    a: &FiniteAlgebra,
    s: usize,
    budget: &Budget,
) -> Result<Vec<FiniteAlgebra>> {
    assert!(s >= 1);
    let sig = a.signature().clone();
    let entry_counts: Vec<usize> = sig
        .symbols()
        .iter()
        .map(|op| s.pow(op.arity as u32))
        .collect();
    let total_entries: usize = entry_counts.iter().sum();
    let mut space: u128 = 1;
    for _ in 0..total_entries {
        space = space
            .checked_mul(s as u128)
            .filter(|&v| v <= u64::MAX as u128)
            .ok_or(Error::LimitExceeded(u64::MAX))?;
    }
    let probes = probe_identities(a, s.min(3))?;

    let mut digits = vec![0usize; total_entries];
    let mut seen: HashSet<Vec<Vec<usize>>> = HashSet::new();
    let mut out = Vec::new();
    loop {
        budget.charge(1)?;
        let mut tables = Vec::with_capacity(sig.len());
        let mut offset = 0;
        for &count in &entry_counts {
            tables.push(digits[offset..offset + count].to_vec());
            offset += count;
        }
        let candidate = FiniteAlgebra::new(None, sig.clone(), s, tables)?;
        if probes.iter().all(|p| satisfies_fast(&candidate, p)) {
            let canonical = canonical_form(&candidate);
            let key: Vec<Vec<usize>> = (0..sig.len())
                .map(|i| canonical.table(i).unwrap().to_vec())
                .collect();
            if seen.insert(key) && var_member(&canonical, a, budget)?.member {
                out.push(canonical);
            }
        }
        // advance mixed-radix counter
        let mut p = total_entries;
        loop {
            if p == 0 {
                out.sort_by_key(|alg| {
                    (0..sig.len())
                        .map(|i| alg.table(i).unwrap().to_vec())
                        .collect::<Vec<_>>()
                });
                return Ok(out);
            }
            p -= 1;
            digits[p] += 1;
            if digits[p] < s {
                break;
            }
            digits[p] = 0;
        }
    }
}

/// True iff `b` does not lie in the variety generated by the strictly
/// smaller members of Var(b). The one-element algebra is cardinality
/// critical by convention (no smaller members exist).
pub fn is_cardinality_critical(b: &FiniteAlgebra, budget: &Budget) -> Result<bool> {
    let mut smaller: Vec<FiniteAlgebra> = Vec::new();
    for s in 1..b.size() {
        smaller.extend(enumerate_members(b, s, budget)?);
    }
    if smaller.is_empty() {
        return Ok(true);
    }
    let refs: Vec<&FiniteAlgebra> = smaller.iter().collect();
    let product = FiniteAlgebra::product(&refs)?;
    Ok(!var_member(b, &product, budget)?.member)
}
