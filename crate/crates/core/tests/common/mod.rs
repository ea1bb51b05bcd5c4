//! Independent oracles shared by the integration tests. Nothing here calls the library
//! routine it is meant to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use gsp4::roots::{Root, WeylElement};
use gsp4::symplectic::root_nilpotent;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Wt = (i64, i64);

/// Positive roots of `C2` in `(m1, m2)` coordinates, written out by hand.
pub const POS: [Wt; 4] = [(1, -1), (0, 2), (1, 1), (2, 0)];
pub const RHO: Wt = (2, 1);

fn dot(x: Wt, y: Wt) -> i64 {
    x.0 * y.0 + x.1 * y.1
}

fn add(x: Wt, y: Wt) -> Wt {
    (x.0 + y.0, x.1 + y.1)
}

fn sub(x: Wt, y: Wt) -> Wt {
    (x.0 - y.0, x.1 - y.1)
}

/// Weight multiplicities of the irreducible `Sp4`-module of highest weight `(a, b)` by
/// Freudenthal's recursion `((λ+ρ,λ+ρ) − (μ+ρ,μ+ρ)) m(μ) = 2 Σ_{α>0} Σ_{k≥1} (μ+kα, α) m(μ+kα)`.
pub fn freudenthal(lambda: Wt) -> BTreeMap<Wt, u64> {
    let (a, b) = lambda;
    assert!(a >= b && b >= 0);
    let bound = 2 * a + 2 * b + 2;
    // μ = λ − n1·α1 − n2·α2, processed by increasing n1 + n2.
    let mut order: Vec<(i64, i64)> = Vec::new();
    for n1 in 0..=bound {
        for n2 in 0..=bound {
            order.push((n1, n2));
        }
    }
    order.sort_by_key(|&(n1, n2)| n1 + n2);
    let lr = dot(add(lambda, RHO), add(lambda, RHO));
    let mut m: BTreeMap<Wt, i64> = BTreeMap::new();
    for (n1, n2) in order {
        let mu = (a - n1, b + n1 - 2 * n2);
        if mu.0.abs() > a || mu.1.abs() > a {
            continue;
        }
        if mu == lambda {
            m.insert(mu, 1);
            continue;
        }
        let mut rhs = 0i64;
        for alpha in POS {
            let mut k = 1;
            loop {
                let nu = (mu.0 + k * alpha.0, mu.1 + k * alpha.1);
                if nu.0.abs() > a || nu.1.abs() > a {
                    break;
                }
                if let Some(&c) = m.get(&nu) {
                    rhs += dot(nu, alpha) * c;
                }
                k += 1;
            }
        }
        rhs *= 2;
        let lhs = lr - dot(add(mu, RHO), add(mu, RHO));
        if lhs == 0 {
            assert_eq!(rhs, 0, "Freudenthal denominator vanished at {mu:?}");
            continue;
        }
        assert_eq!(rhs % lhs, 0, "non-integral multiplicity at {mu:?}");
        let c = rhs / lhs;
        if c > 0 {
            m.insert(mu, c);
        }
    }
    m.into_iter().map(|(k, v)| (k, v as u64)).collect()
}

pub fn freudenthal_dimension(lambda: Wt) -> u64 {
    freudenthal(lambda).values().sum()
}

/// `T`-weights of the irreducible `GL2`-Levi module of highest weight `mu` whose simple
/// root is `gamma`.
pub fn levi_string(mu: Wt, gamma: Wt) -> Vec<Wt> {
    let n = 2 * dot(mu, gamma) / dot(gamma, gamma);
    assert!(n >= 0, "{mu:?} is not dominant for {gamma:?}");
    (0..=n).map(|j| (mu.0 - j * gamma.0, mu.1 - j * gamma.1)).collect()
}

type Vector<K> = BTreeMap<K, BigRational>;

fn axpy<K: Ord + Clone>(v: &mut Vector<K>, c: &BigRational, w: &Vector<K>) {
    for (k, x) in w {
        let e = v.entry(k.clone()).or_insert_with(BigRational::zero);
        *e += c * x;
        if e.is_zero() {
            v.remove(k);
        }
    }
}

/// Incremental row echelon form over `Q`; each stored row has its pivot at its smallest key.
pub struct Echelon<K: Ord + Clone> {
    rows: BTreeMap<K, Vector<K>>,
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Echelon { rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v` if it is independent of the stored rows; reports whether it was.
    pub fn insert(&mut self, mut v: Vector<K>) -> bool {
        while let Some(k) = v.keys().next().cloned() {
            match self.rows.get(&k) {
                Some(row) => {
                    let c = -v[&k].clone();
                    axpy(&mut v, &c, row);
                }
                None => {
                    let inv = BigRational::one() / &v[&k];
                    for x in v.values_mut() {
                        *x *= &inv;
                    }
                    self.rows.insert(k, v);
                    return true;
                }
            }
        }
        false
    }
}

/// One tensor factor of the model: the standard module or `Λ²` of it.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Factor {
    Std,
    Wedge,
}

const STD_WEIGHTS: [Wt; 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl Factor {
    fn dim(self) -> usize {
        match self {
            Factor::Std => 4,
            Factor::Wedge => 6,
        }
    }

    fn weight(self, i: usize) -> Wt {
        match self {
            Factor::Std => STD_WEIGHTS[i],
            Factor::Wedge => add(STD_WEIGHTS[PAIRS[i].0], STD_WEIGHTS[PAIRS[i].1]),
        }
    }

    fn act(self, x: &[[i64; 4]; 4], i: usize) -> Vec<(usize, i64)> {
        match self {
            Factor::Std => (0..4).filter(|&k| x[k][i] != 0).map(|k| (k, x[k][i])).collect(),
            Factor::Wedge => {
                let (p, q) = PAIRS[i];
                let mut out: BTreeMap<usize, i64> = BTreeMap::new();
                let mut push = |s: usize, t: usize, c: i64| {
                    if s == t || c == 0 {
                        return;
                    }
                    let (lo, hi, sign) = if s < t { (s, t, 1) } else { (t, s, -1) };
                    let idx = PAIRS.iter().position(|&z| z == (lo, hi)).unwrap();
                    *out.entry(idx).or_insert(0) += sign * c;
                };
                for k in 0..4 {
                    push(k, q, x[k][p]);
                    push(p, k, x[k][q]);
                }
                out.into_iter().filter(|&(_, c)| c != 0).collect()
            }
        }
    }
}

/// `V_λ` realized as the cyclic submodule generated by `e1^{⊗(a−b)} ⊗ (e1∧e2)^{⊗b}`
/// under the lowering operators, inside `std^{⊗(a−b)} ⊗ (Λ² std)^{⊗b}`.
pub struct Model {
    factors: Vec<Factor>,
    /// Weight-space bases (vectors in the ambient tensor basis).
    pub spaces: BTreeMap<Wt, Vec<Vector<Vec<usize>>>>,
}

impl Model {
    pub fn new(lambda: Wt) -> Self {
        let (a, b) = lambda;
        let mut factors = vec![Factor::Std; (a - b) as usize];
        factors.extend(std::iter::repeat_n(Factor::Wedge, b as usize));
        let top = vec![0usize; factors.len()];
        let mut model = Model { factors, spaces: BTreeMap::new() };
        let mut ech: BTreeMap<Wt, Echelon<Vec<usize>>> = BTreeMap::new();
        let v0: Vector<Vec<usize>> = [(top, BigRational::one())].into_iter().collect();
        ech.entry(lambda).or_insert_with(Echelon::new).insert(v0.clone());
        model.spaces.entry(lambda).or_default().push(v0.clone());
        let mut queue = VecDeque::from([(lambda, v0)]);
        while let Some((mu, v)) = queue.pop_front() {
            for beta in POS {
                let x = root_nilpotent(Root::new(-beta.0, -beta.1));
                let w = model.apply(&x, &v);
                if w.is_empty() {
                    continue;
                }
                let nu = sub(mu, beta);
                if ech.entry(nu).or_insert_with(Echelon::new).insert(w.clone()) {
                    model.spaces.entry(nu).or_default().push(w.clone());
                    queue.push_back((nu, w));
                }
            }
        }
        model
    }

    pub fn dimension(&self) -> usize {
        self.spaces.values().map(|v| v.len()).sum()
    }

    pub fn weight_of(&self, idx: &[usize]) -> Wt {
        idx.iter().zip(&self.factors).fold((0, 0), |acc, (&i, f)| add(acc, f.weight(i)))
    }

    /// The Lie algebra element `x` acting on a tensor by the Leibniz rule.
    pub fn apply(&self, x: &[[i64; 4]; 4], v: &Vector<Vec<usize>>) -> Vector<Vec<usize>> {
        let mut out: Vector<Vec<usize>> = BTreeMap::new();
        for (idx, c) in v {
            for (pos, f) in self.factors.iter().enumerate() {
                for (j, k) in f.act(x, idx[pos]) {
                    let mut new = idx.clone();
                    new[pos] = j;
                    axpy(&mut out, &(c * BigRational::from_integer(k.into())), &[(new, BigRational::one())].into_iter().collect());
                }
            }
        }
        out
    }
}

fn mat_mul(x: &[[i64; 4]; 4], y: &[[i64; 4]; 4]) -> [[i64; 4]; 4] {
    let mut z = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            z[i][j] = (0..4).map(|k| x[i][k] * y[k][j]).sum();
        }
    }
    z
}

/// Structure constants of the nilpotent algebra spanned by `E_β`, `β ∈ roots`:
/// `[E_i, E_j] = c·E_k` recorded as `(i, j) ↦ (k, c)`.
fn brackets(roots: &[Wt]) -> BTreeMap<(usize, usize), (usize, i64)> {
    let mats: Vec<[[i64; 4]; 4]> = roots.iter().map(|r| root_nilpotent(Root::new(r.0, r.1))).collect();
    let mut out = BTreeMap::new();
    for i in 0..roots.len() {
        for j in 0..roots.len() {
            let xy = mat_mul(&mats[i], &mats[j]);
            let yx = mat_mul(&mats[j], &mats[i]);
            let mut c = [[0i64; 4]; 4];
            for r in 0..4 {
                for s in 0..4 {
                    c[r][s] = xy[r][s] - yx[r][s];
                }
            }
            if c.iter().all(|row| row.iter().all(|&e| e == 0)) {
                continue;
            }
            let k = roots.iter().position(|&r| r == add(roots[i], roots[j])).expect("subalgebra is closed");
            let e = &mats[k];
            let (r, s) = (0..16).map(|t| (t / 4, t % 4)).find(|&(r, s)| e[r][s] != 0).unwrap();
            let scale = c[r][s] / e[r][s];
            for r in 0..4 {
                for s in 0..4 {
                    assert_eq!(c[r][s], scale * e[r][s], "bracket is not a root vector multiple");
                }
            }
            out.insert((i, j), (k, scale));
        }
    }
    out
}

/// Sign and mask of `ε^i ∧ ε^S`, or `None` if `i ∈ S`.
fn wedge_front(i: usize, mask: u32) -> Option<(i64, u32)> {
    if mask & (1 << i) != 0 {
        return None;
    }
    let before = (mask & ((1 << i) - 1)).count_ones();
    Some((if before.is_multiple_of(2) { 1 } else { -1 }, mask | (1 << i)))
}

type CochainKey = (u32, Vec<usize>);

/// Chevalley–Eilenberg cohomology `H^k(n, V_λ)` of the algebra spanned by root vectors for
/// `roots`, returned as a multiset of `T`-weights per degree. The differential is
/// `d = Σ_i ε^i ∧ E_i + d_0 ⊗ 1` with `d_0 ε^k = −Σ_{i<j} c^k_{ij} ε^i ∧ ε^j`; `d² = 0`
/// is checked on every basis cochain.
pub fn ce_cohomology(roots: &[Wt], lambda: Wt) -> Vec<BTreeMap<Wt, usize>> {
    let model = Model::new(lambda);
    let n = roots.len();
    let mats: Vec<[[i64; 4]; 4]> = roots.iter().map(|r| root_nilpotent(Root::new(r.0, r.1))).collect();
    let br = brackets(roots);
    // d_0 ε^k as a list of (sign·coefficient, mask of {i, j}).
    let d0_single: Vec<Vec<(i64, u32)>> = (0..n)
        .map(|k| {
            br.iter()
                .filter(|(&(i, j), &(kk, _))| kk == k && i < j)
                .map(|(&(i, j), &(_, c))| (-c, (1u32 << i) | (1u32 << j)))
                .collect()
        })
        .collect();
    let d = |mask: u32, v: &Vector<Vec<usize>>| -> Vector<CochainKey> {
        let mut out: Vector<CochainKey> = BTreeMap::new();
        for i in 0..n {
            if let Some((sign, m2)) = wedge_front(i, mask) {
                let xv = model.apply(&mats[i], v);
                for (idx, c) in xv {
                    let e = out.entry((m2, idx.clone())).or_insert_with(BigRational::zero);
                    *e += c * BigRational::from_integer(sign.into());
                    if e.is_zero() {
                        out.remove(&(m2, idx));
                    }
                }
            }
        }
        // d_0 on ε^{s_1} ∧ … ∧ ε^{s_k} as a graded derivation.
        let elems: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        for (pos, &s) in elems.iter().enumerate() {
            let pos_sign = if pos % 2 == 0 { 1 } else { -1 };
            let rest = mask & !(1 << s);
            for &(c, pair) in &d0_single[s] {
                if pair & rest != 0 {
                    continue;
                }
                // Build the ordered wedge: elems before s, then the pair (i<j), then elems after.
                let mut word: Vec<usize> = elems[..pos].to_vec();
                let (i, j) = (pair.trailing_zeros() as usize, 31 - pair.leading_zeros() as usize);
                word.push(i);
                word.push(j);
                word.extend_from_slice(&elems[pos + 1..]);
                let mut sign = pos_sign * c;
                for x in 0..word.len() {
                    for y in x + 1..word.len() {
                        if word[x] > word[y] {
                            sign = -sign;
                        }
                    }
                }
                let m2 = rest | pair;
                for (idx, coeff) in v {
                    let e = out.entry((m2, idx.clone())).or_insert_with(BigRational::zero);
                    *e += coeff * BigRational::from_integer(sign.into());
                    if e.is_zero() {
                        out.remove(&(m2, idx.clone()));
                    }
                }
            }
        }
        out
    };
    let apply_d = |w: &Vector<CochainKey>| -> Vector<CochainKey> {
        let mut by_mask: BTreeMap<u32, Vector<Vec<usize>>> = BTreeMap::new();
        for ((m, idx), c) in w {
            by_mask.entry(*m).or_default().insert(idx.clone(), c.clone());
        }
        let mut out = BTreeMap::new();
        for (m, v) in by_mask {
            axpy(&mut out, &BigRational::one(), &d(m, &v));
        }
        out
    };
    let root_sum = |mask: u32| -> Wt {
        (0..n).filter(|&i| mask & (1 << i) != 0).fold((0, 0), |acc, i| add(acc, roots[i]))
    };
    // Cochain weight of ε^S ⊗ v is wt(v) − Σ_S β.
    let mut targets: BTreeSet<Wt> = BTreeSet::new();
    for mu in model.spaces.keys() {
        for mask in 0..(1u32 << n) {
            targets.insert(sub(*mu, root_sum(mask)));
        }
    }
    let mut result = vec![BTreeMap::new(); n + 1];
    for nu in targets {
        let mut dims = vec![0usize; n + 1];
        let mut ranks = vec![0usize; n + 2];
        for k in 0..=n {
            let mut ech: Echelon<CochainKey> = Echelon::new();
            for mask in (0..(1u32 << n)).filter(|m| m.count_ones() as usize == k) {
                let mu = add(nu, root_sum(mask));
                let Some(basis) = model.spaces.get(&mu) else { continue };
                for v in basis {
                    dims[k] += 1;
                    let image = d(mask, v);
                    assert!(apply_d(&image).is_empty(), "d² ≠ 0");
                    ech.insert(image);
                }
            }
            ranks[k + 1] = ech.rank();
        }
        for k in 0..=n {
            let h = dims[k] - ranks[k + 1] - ranks[k];
            if h > 0 {
                result[k].insert(nu, h);
            }
        }
    }
    result
}

/// Number of Lagrangian planes in `F_p^4` for `⟨e_i, f_i⟩ = 1`, by enumerating all pairs
/// of vectors and deduplicating their spans.
pub fn brute_force_lagrangians(p: u64) -> usize {
    let vectors: Vec<[u64; 4]> = (0..p.pow(4))
        .map(|n| [n % p, (n / p) % p, (n / p / p) % p, (n / p / p / p) % p])
        .filter(|v| v.iter().any(|&x| x != 0))
        .collect();
    let form = |v: &[u64; 4], w: &[u64; 4]| (v[0] * w[2] + v[1] * w[3] + p * p * 2 - v[2] * w[0] - v[3] * w[1]) % p;
    let mut planes: HashSet<Vec<[u64; 4]>> = HashSet::new();
    for (i, v) in vectors.iter().enumerate() {
        for w in &vectors[i + 1..] {
            if form(v, w) != 0 {
                continue;
            }
            let mut span: Vec<[u64; 4]> = Vec::new();
            for s in 0..p {
                for t in 0..p {
                    let z: [u64; 4] = std::array::from_fn(|k| (s * v[k] + t * w[k]) % p);
                    span.push(z);
                }
            }
            span.sort_unstable();
            span.dedup();
            if span.len() as u64 == p * p {
                planes.insert(span);
            }
        }
    }
    planes.len()
}

/// Lengths of all Weyl elements by breadth-first search from the identity over the
/// simple reflections.
pub fn bfs_lengths() -> BTreeMap<WeylElement, usize> {
    let gens = [WeylElement::S1, WeylElement::S2];
    let mut dist = BTreeMap::from([(WeylElement::ID, 0usize)]);
    let mut queue = VecDeque::from([WeylElement::ID]);
    while let Some(w) = queue.pop_front() {
        for g in gens {
            let x = w.compose(g);
            if !dist.contains_key(&x) {
                dist.insert(x, dist[&w] + 1);
                queue.push_back(x);
            }
        }
    }
    dist
}

/// Bruhat order by the subword property over one reduced word of `w`.
pub fn subword_leq(w_prime: WeylElement, w: WeylElement) -> bool {
    let lengths = bfs_lengths();
    // A reduced word: walk down by right multiplication with descents.
    let mut word = Vec::new();
    let mut cur = w;
    while cur != WeylElement::ID {
        let g = [WeylElement::S1, WeylElement::S2]
            .into_iter()
            .find(|&g| lengths[&cur.compose(g)] < lengths[&cur])
            .unwrap();
        word.push(g);
        cur = cur.compose(g);
    }
    word.reverse();
    (0u32..(1 << word.len())).any(|mask| {
        let prod = (0..word.len())
            .filter(|i| mask & (1 << i) != 0)
            .fold(WeylElement::ID, |acc, i| acc.compose(word[i]));
        prod == w_prime
    })
}
