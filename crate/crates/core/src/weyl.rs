//! Signed permutations: the symmetric group `S_n`, the hyperoctahedral group
//! `WB_n`, canonical words and the cosets `G_m = WB_n / WB_m`.
//!
//! A group element `g` is stored as the arrangement it produces from a
//! momentum vector: slot `j` of `k_g` holds `signs[j] · k[perm[j]]`. The
//! generators act on slots of the current arrangement: `t_j` swaps slots `j`
//! and `j + 1`, `R₁` negates slot 1. In terms of [`SignedPermutation::compose`]
//! applying a generator `w` after `g` gives `compose(w, g)`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::Neg;
use std::sync::{Arc, Mutex, OnceLock};

use crate::{invalid, invalid_dim, Error, Result};

/// Largest rank for which groups are enumerated.
pub const MAX_RANK: usize = 8;

/// Element of `WB_n`. The derived order compares the sign pattern first
/// (`+` before `-`), then the permutation lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    negated: Vec<bool>,
    perm: Vec<usize>,
}

impl fmt::Debug for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for j in 0..self.perm.len() {
            if j > 0 {
                write!(f, " ")?;
            }
            let sign = if self.negated[j] { "-" } else { "" };
            write!(f, "{sign}k{}", self.perm[j] + 1)?;
        }
        write!(f, ")")
    }
}

/// Generators of `WB_n`, ordered `R₁ < t₁ < t₂ < …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    /// `k₁ → -k₁` on the first slot.
    Reflection,
    /// Exchange of slots `j` and `j + 1` (1-based).
    Transposition(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// `S_n`, generated by the transpositions only.
    Symmetric,
    /// `WB_n`, transpositions plus `R₁`.
    Hyperoctahedral,
}

impl GroupKind {
    pub fn generators(self, n: usize) -> Vec<Generator> {
        let mut g = Vec::with_capacity(n);
        if self == GroupKind::Hyperoctahedral && n > 0 {
            g.push(Generator::Reflection);
        }
        g.extend((1..n).map(Generator::Transposition));
        g
    }

    pub fn order(self, n: usize) -> u64 {
        let fact: u64 = (1..=n as u64).product();
        match self {
            GroupKind::Symmetric => fact,
            GroupKind::Hyperoctahedral => fact << n,
        }
    }
}

impl SignedPermutation {
    pub fn identity(n: usize) -> Self {
        Self { negated: vec![false; n], perm: (0..n).collect() }
    }

    /// Build from a 1-based permutation and a sign vector of `±1`.
    pub fn new(perm: &[usize], signs: &[i8]) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n {
            return invalid_dim(n, signs.len());
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p == 0 || p > n || seen[p - 1] {
                return invalid(format!("{perm:?} is not a permutation of 1..={n}"));
            }
            seen[p - 1] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return invalid(format!("signs {signs:?} must be ±1"));
        }
        Ok(Self { negated: signs.iter().map(|&s| s < 0).collect(), perm: perm.iter().map(|p| p - 1).collect() })
    }

    pub fn generator(n: usize, g: Generator) -> Result<Self> {
        let mut e = Self::identity(n);
        match g {
            Generator::Reflection if n >= 1 => e.negated[0] = true,
            Generator::Transposition(j) if j >= 1 && j < n => e.perm.swap(j - 1, j),
            _ => return invalid(format!("{g:?} is not a generator of WB_{n}")),
        }
        Ok(e)
    }

    pub fn rank(&self) -> usize {
        self.perm.len()
    }

    /// 1-based permutation.
    pub fn perm(&self) -> Vec<usize> {
        self.perm.iter().map(|p| p + 1).collect()
    }

    pub fn signs(&self) -> Vec<i8> {
        self.negated.iter().map(|&n| if n { -1 } else { 1 }).collect()
    }

    /// `(momentum index (0-based), negated)` held by slot `j` (0-based).
    pub fn slot(&self, j: usize) -> (usize, bool) {
        (self.perm[j], self.negated[j])
    }

    pub fn is_unsigned(&self) -> bool {
        self.negated.iter().all(|n| !n)
    }

    /// `k_g`: slot `j` of the result is `signs[j] · k[perm[j]]`.
    pub fn apply<T: Copy + Neg<Output = T>>(&self, k: &[T]) -> Result<Vec<T>> {
        if k.len() != self.rank() {
            return invalid_dim(self.rank(), k.len());
        }
        Ok(self
            .perm
            .iter()
            .zip(&self.negated)
            .map(|(&p, &neg)| if neg { -k[p] } else { k[p] })
            .collect())
    }

    /// Group law with `apply(compose(g, h), k) = apply(g, apply(h, k))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.rank() != other.rank() {
            return invalid_dim(self.rank(), other.rank());
        }
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let negated = self.perm.iter().zip(&self.negated).map(|(&p, &n)| n ^ other.negated[p]).collect();
        Ok(Self { negated, perm })
    }

    pub fn inverse(&self) -> Self {
        let n = self.rank();
        let mut perm = vec![0; n];
        let mut negated = vec![false; n];
        for j in 0..n {
            perm[self.perm[j]] = j;
            negated[self.perm[j]] = self.negated[j];
        }
        Self { negated, perm }
    }

    /// Apply the generator `w` to the slots of this arrangement.
    pub fn then(&self, w: Generator) -> Result<Self> {
        Self::generator(self.rank(), w)?.compose(self)
    }

    /// Compose a word of slot operations, applied in order to the identity.
    pub fn from_word(n: usize, word: &[Generator]) -> Result<Self> {
        word.iter().try_fold(Self::identity(n), |acc, &w| acc.then(w))
    }
}

/// Which minimal-length word the breadth-first search keeps for every element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordOrder {
    /// Lexicographically smallest under `R₁ < t₁ < t₂ < …` (the normal form).
    Canonical,
    /// Lexicographically largest; used to cross-check path independence.
    Reversed,
}

/// A fully enumerated group with a breadth-first spanning tree of its Cayley
/// graph. Every element's canonical word is the word of its parent followed
/// by one generator.
#[derive(Debug)]
pub struct WeylGroup {
    kind: GroupKind,
    rank: usize,
    order: WordOrder,
    elements: Vec<SignedPermutation>,
    index: HashMap<SignedPermutation, usize>,
    parent: Vec<Option<(usize, Generator)>>,
}

impl WeylGroup {
    pub fn new(kind: GroupKind, rank: usize) -> Result<Self> {
        Self::with_order(kind, rank, WordOrder::Canonical)
    }

    pub fn with_order(kind: GroupKind, rank: usize, order: WordOrder) -> Result<Self> {
        if rank > MAX_RANK {
            return Err(Error::TooLarge(format!("Weyl group of rank {rank} (max {MAX_RANK})")));
        }
        let mut gens = kind.generators(rank);
        if order == WordOrder::Reversed {
            gens.reverse();
        }
        let gen_elems: Vec<SignedPermutation> =
            gens.iter().map(|&g| SignedPermutation::generator(rank, g)).collect::<Result<_>>()?;
        let id = SignedPermutation::identity(rank);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut parent = vec![None];
        let mut queue = VecDeque::from([0usize]);
        while let Some(cur) = queue.pop_front() {
            for (g, ge) in gens.iter().zip(&gen_elems) {
                let next = ge.compose(&elements[cur])?;
                if !index.contains_key(&next) {
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                    parent.push(Some((cur, *g)));
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        debug_assert_eq!(elements.len() as u64, kind.order(rank));
        Ok(Self { kind, rank, order, elements, index, parent })
    }

    /// Shared, lazily built canonical-order group.
    pub fn cached(kind: GroupKind, rank: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<(GroupKind, usize), Arc<WeylGroup>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(g) = cache.lock().expect("weyl cache poisoned").get(&(kind, rank)) {
            return Ok(Arc::clone(g));
        }
        let built = Arc::new(Self::new(kind, rank)?);
        let mut guard = cache.lock().expect("weyl cache poisoned");
        Ok(Arc::clone(guard.entry((kind, rank)).or_insert(built)))
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn word_order(&self) -> WordOrder {
        self.order
    }

    /// Elements in breadth-first order (parents precede children).
    pub fn elements(&self) -> &[SignedPermutation] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, g: &SignedPermutation) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// `(parent index, generator)` of the element at `i`; `None` for the
    /// identity.
    pub fn parent(&self, i: usize) -> Option<(usize, Generator)> {
        self.parent[i]
    }

    /// Minimal-length word of `g` under this group's word order.
    pub fn word(&self, g: &SignedPermutation) -> Result<Vec<Generator>> {
        let mut i = self
            .index_of(g)
            .ok_or_else(|| Error::InvalidArgument(format!("{g:?} is not an element of this group")))?;
        let mut word = Vec::new();
        while let Some((p, w)) = self.parent[i] {
            word.push(w);
            i = p;
        }
        word.reverse();
        Ok(word)
    }
}

/// All `2^n n!` elements of `WB_n`.
pub fn enumerate_group(n: usize) -> Result<Vec<SignedPermutation>> {
    Ok(WeylGroup::cached(GroupKind::Hyperoctahedral, n)?.elements().to_vec())
}

/// Canonical normal-form word of `g` in `WB_n`: among the minimal-length
/// words, the lexicographically smallest under `R₁ < t₁ < t₂ < …`. The word
/// lists slot operations in the order they are applied to the identity.
pub fn word_decomposition(g: &SignedPermutation) -> Result<Vec<Generator>> {
    WeylGroup::cached(GroupKind::Hyperoctahedral, g.rank())?.word(g)
}

/// Canonical representative of a coset in `G_m = WB_n / WB_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetRepresentative {
    pub n: usize,
    pub m: usize,
    pub element: SignedPermutation,
}

/// Reduce `g` to the representative of its coset in `WB_n / WB_m`, where
/// `WB_m` acts on slots `1..=m`. Two elements share a coset iff they agree
/// on slots `m+1..=n`; the representative puts the remaining momenta in
/// slots `1..=m` in ascending order with `+` signs, the minimum of the coset
/// in the canonical order.
pub fn coset_representative(g: &SignedPermutation, m: usize) -> Result<SignedPermutation> {
    let n = g.rank();
    if m > n {
        return invalid(format!("coset size m = {m} exceeds rank {n}"));
    }
    let mut used = vec![false; n];
    for &p in &g.perm[m..] {
        used[p] = true;
    }
    let mut perm: Vec<usize> = (0..n).filter(|&p| !used[p]).collect();
    perm.extend_from_slice(&g.perm[m..]);
    let mut negated = vec![false; m];
    negated.extend_from_slice(&g.negated[m..]);
    Ok(SignedPermutation { negated, perm })
}

/// All `2^{n-m} n!/m!` coset representatives of `WB_n / WB_m`, sorted.
pub fn coset_representatives(n: usize, m: usize) -> Result<Vec<CosetRepresentative>> {
    if m > n {
        return invalid(format!("coset size m = {m} exceeds rank n = {n}"));
    }
    if n > MAX_RANK {
        return Err(Error::TooLarge(format!("cosets of WB_{n} (max rank {MAX_RANK})")));
    }
    let tail = n - m;
    let mut reps = Vec::new();
    let mut chosen = Vec::with_capacity(tail);
    let mut used = vec![false; n];
    fn rec(n: usize, tail: usize, chosen: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if chosen.len() == tail {
            out.push(chosen.clone());
            return;
        }
        for p in 0..n {
            if !used[p] {
                used[p] = true;
                chosen.push(p);
                rec(n, tail, chosen, used, out);
                chosen.pop();
                used[p] = false;
            }
        }
    }
    let mut tails = Vec::new();
    rec(n, tail, &mut chosen, &mut used, &mut tails);
    for t in tails {
        let mut perm: Vec<usize> = (0..n).filter(|p| !t.contains(p)).collect();
        perm.extend_from_slice(&t);
        for mask in 0..1usize << tail {
            let mut negated = vec![false; m];
            negated.extend((0..tail).map(|j| mask >> j & 1 == 1));
            reps.push(CosetRepresentative { n, m, element: SignedPermutation { negated, perm: perm.clone() } });
        }
    }
    reps.sort();
    Ok(reps)
}
