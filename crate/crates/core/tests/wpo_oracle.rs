//! Brute-force validation of the word embedding order: the greedy witness
//! search is compared against exhaustive enumeration of all candidate
//! embeddings, and the order axioms and the backward-map lemma are checked
//! on random samples.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use ucaw_core::wpo::{
    all_words, fo, is_antichain, lea, lea_witness, lex_lt, tab, tab_apply, UpSet, Witness, Word,
};

fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    // m-subsets of {1..n} in increasing order
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for j in start..=n {
            cur.push(j);
            rec(j + 1, n, m, cur, out);
            cur.pop();
        }
    }
    rec(1, n, m, &mut cur, &mut out);
    out
}

fn oracle_witnesses(a: &Word, b: &Word) -> Vec<Vec<usize>> {
    let (m, n) = (a.len(), b.len());
    if m > n {
        return Vec::new();
    }
    let letters_a: std::collections::BTreeSet<u8> = a.letters().iter().copied().collect();
    let letters_b: std::collections::BTreeSet<u8> = b.letters().iter().copied().collect();
    if letters_a != letters_b {
        return Vec::new();
    }
    combinations(n, m)
        .into_iter()
        .filter(|h| {
            (1..=m).all(|i| a.letters()[i - 1] == b.letters()[h[i - 1] - 1])
                && letters_a.iter().all(|&c| h[fo(a, c) - 1] == fo(b, c))
        })
        .collect()
}

#[test]
fn greedy_agrees_with_oracle_exhaustively() {
    let words = all_words(2, 7);
    for a in &words {
        for b in &words {
            let oracle = oracle_witnesses(a, b);
            let greedy = lea_witness(a, b).unwrap();
            assert_eq!(
                greedy.is_some(),
                !oracle.is_empty(),
                "verdict mismatch for {:?} vs {:?}",
                a.letters(),
                b.letters()
            );
            if let Some(w) = greedy {
                assert!(oracle.contains(&w.positions().to_vec()));
                // the greedy witness is pointwise minimal
                for o in &oracle {
                    for (g, x) in w.positions().iter().zip(o) {
                        assert!(g <= x);
                    }
                }
            }
        }
    }
}

fn random_word(rng: &mut ChaCha8Rng, t: usize, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    let letters = (0..len).map(|_| rng.gen_range(0..t as u8)).collect();
    Word::new(t, letters).unwrap()
}

#[test]
fn partial_order_axioms_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ea);
    for _ in 0..10_000 {
        let a = random_word(&mut rng, 3, 8);
        let b = random_word(&mut rng, 3, 8);
        let c = random_word(&mut rng, 3, 8);
        assert!(lea(&a, &a).unwrap(), "reflexivity");
        for (x, y) in [(&a, &b), (&b, &c), (&a, &c)] {
            assert_eq!(
                lea(x, y).unwrap(),
                !oracle_witnesses(x, y).is_empty(),
                "oracle disagreement"
            );
        }
        if lea(&a, &b).unwrap() && lea(&b, &a).unwrap() {
            assert_eq!(a, b, "antisymmetry");
        }
        if lea(&a, &b).unwrap() && lea(&b, &c).unwrap() {
            assert!(lea(&a, &c).unwrap(), "transitivity");
        }
    }
}

/// Builds a word above `a` by insertions of letters already present in the
/// prefix; each such insertion preserves the embedding.
fn insert_above(rng: &mut ChaCha8Rng, a: &Word, max_insertions: usize) -> Word {
    let mut letters: Vec<u8> = a.letters().to_vec();
    for _ in 0..rng.gen_range(0..=max_insertions) {
        let p = rng.gen_range(1..=letters.len());
        let l = letters[rng.gen_range(0..p)];
        letters.insert(p, l);
    }
    Word::new(a.alphabet(), letters).unwrap()
}

#[test]
fn backward_map_reproduces_and_preserves_lex() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ab);
    let mut checked_lex = 0u32;
    for _ in 0..10_000 {
        let t = rng.gen_range(2..=3);
        let a = random_word(&mut rng, t, 5);
        let b = insert_above(&mut rng, &a, 3);
        let h = lea_witness(&a, &b).unwrap().expect("insertion preserves embedding");
        let tb = tab(&a, &b, &h).unwrap();
        assert_eq!(
            tab_apply(a.letters(), &tb).unwrap(),
            b.letters(),
            "pulling a through Tab must rebuild b"
        );
        // any strictly lex-smaller c of the same length stays lex-smaller
        let c = Word::new(t, (0..a.len()).map(|_| rng.gen_range(0..t as u8)).collect()).unwrap();
        if lex_lt(&c, &a).unwrap() {
            let image = tab_apply(c.letters(), &tb).unwrap();
            let image = Word::new(t, image).unwrap();
            assert!(lex_lt(&image, &b).unwrap());
            checked_lex += 1;
        }
    }
    assert!(checked_lex > 1_000, "lex case must be exercised");
}

#[test]
fn backward_map_holds_for_every_oracle_witness() {
    // Tab is defined per witness; check all of them on small words
    let words = all_words(2, 5);
    for a in &words {
        for b in &words {
            for h in oracle_witnesses(a, b) {
                let w = Witness::from_positions(h);
                let tb = tab(a, b, &w).unwrap();
                assert_eq!(tab_apply(a.letters(), &tb).unwrap(), b.letters());
            }
        }
    }
}

/// Maximum antichain size via Dilworth: minimum chain cover equals word
/// count minus a maximum matching in the strict-comparability graph.
fn max_antichain_size(words: &[Word]) -> usize {
    let n = words.len();
    let mut below = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && words[i] != words[j] && lea(&words[i], &words[j]).unwrap() {
                below[i].push(j);
            }
        }
    }
    let mut matched = vec![usize::MAX; n];
    fn augment(
        u: usize,
        below: &[Vec<usize>],
        matched: &mut [usize],
        seen: &mut [bool],
    ) -> bool {
        for &v in &below[u] {
            if !seen[v] {
                seen[v] = true;
                if matched[v] == usize::MAX || augment(matched[v], below, matched, seen) {
                    matched[v] = u;
                    return true;
                }
            }
        }
        false
    }
    let mut matching = 0;
    for u in 0..n {
        let mut seen = vec![false; n];
        if augment(u, &below, &mut matched, &mut seen) {
            matching += 1;
        }
    }
    n - matching
}

#[test]
fn sampled_antichains_never_beat_the_exact_maximum() {
    let words = all_words(2, 6);
    let bound = max_antichain_size(&words);
    assert!(bound >= 2, "two incomparable words exist");
    let mut rng = ChaCha8Rng::seed_from_u64(0xac);
    for _ in 0..500 {
        let mut pool = words.clone();
        pool.shuffle(&mut rng);
        let mut chain: Vec<Word> = Vec::new();
        for w in pool {
            if chain
                .iter()
                .all(|x| !lea(x, &w).unwrap() && !lea(&w, x).unwrap())
            {
                chain.push(w);
            }
        }
        assert!(is_antichain(&chain).unwrap());
        assert!(chain.len() <= bound);
    }
}

#[test]
fn upset_membership_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b5);
    let words = all_words(2, 5);
    for _ in 0..50 {
        let mut u = UpSet::new(2);
        let mut inserted: Vec<Word> = Vec::new();
        for _ in 0..6 {
            let w = words.choose(&mut rng).unwrap().clone();
            u = u.insert(&w).unwrap();
            inserted.push(w);
        }
        assert!(is_antichain(u.basis()).unwrap());
        for w in &words {
            let expected = inserted.iter().any(|g| lea(g, w).unwrap());
            assert_eq!(u.contains(w).unwrap(), expected);
        }
    }
}

#[test]
fn upset_chain_stabilizes() {
    // inserting every word in increasing length order must stabilize the
    // basis long before the universe is exhausted
    let mut u = UpSet::new(2);
    let mut last_change = 0;
    for (i, w) in all_words(2, 7).iter().enumerate() {
        let next = u.insert(w).unwrap();
        if next != u {
            last_change = i;
        }
        u = next;
    }
    // one minimal zone per letter set: (0), (1), (0,1), (1,0)
    assert_eq!(u.basis().len(), 4);
    assert!(last_change <= 4);
}
