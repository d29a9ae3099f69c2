//! Independent reference implementations used by the integration tests.
//!
//! Each one is written from the definition and shares no code path with the
//! library beyond the data types: no memo tables, no compiled slots, no
//! prefix sums.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use aml::rational::Rational;
use aml::regularity::{Graph, Hypergraph};
use aml::structures::FiniteStructure;
use aml::syntax::{Cmp, Formula, Term};
use rand::Rng;

pub type Env = BTreeMap<String, usize>;

fn term(m: &FiniteStructure, t: &Term, env: &Env) -> usize {
    match t {
        Term::Var(v) => *env.get(v).unwrap_or_else(|| panic!("unbound {v}")),
        Term::Const(c) => m.constant(c).expect("constant"),
        Term::App(f, args) => {
            let vals: Vec<usize> = args.iter().map(|a| term(m, a, env)).collect();
            m.apply(f, &vals).expect("function")
        }
    }
}

/// Tarski semantics by plain recursion. A measure node re-evaluates its body
/// on every tuple each time it is reached.
pub fn naive_eval(m: &FiniteStructure, f: &Formula, env: &Env) -> bool {
    let n = m.size();
    match f {
        Formula::Eq(a, b) => term(m, a, env) == term(m, b, env),
        Formula::Atom(r, args) => {
            let vals: Vec<usize> = args.iter().map(|a| term(m, a, env)).collect();
            m.holds(r, &vals).expect("relation")
        }
        Formula::Not(a) => !naive_eval(m, a, env),
        Formula::And(a, b) => naive_eval(m, a, env) && naive_eval(m, b, env),
        Formula::Or(a, b) => naive_eval(m, a, env) || naive_eval(m, b, env),
        Formula::Implies(a, b) => !naive_eval(m, a, env) || naive_eval(m, b, env),
        Formula::Forall(v, a) => (0..n).all(|e| {
            let mut env = env.clone();
            env.insert(v.clone(), e);
            naive_eval(m, a, &env)
        }),
        Formula::Exists(v, a) => (0..n).any(|e| {
            let mut env = env.clone();
            env.insert(v.clone(), e);
            naive_eval(m, a, &env)
        }),
        Formula::Meas(ms) => {
            let mu = naive_measure(m, ms.body(), ms.vars(), env);
            match ms.cmp() {
                Cmp::Lt => &mu < ms.threshold(),
                Cmp::Le => &mu <= ms.threshold(),
            }
        }
    }
}

/// `Σ Π w(a_i)` over tuples `ā` satisfying `body`, built by nested recursion
/// over the variables.
pub fn naive_measure(m: &FiniteStructure, body: &Formula, vars: &[String], env: &Env) -> Rational {
    match vars.split_first() {
        None => {
            if naive_eval(m, body, env) {
                Rational::one()
            } else {
                Rational::zero()
            }
        }
        Some((v, rest)) => {
            let mut total = Rational::zero();
            for e in 0..m.size() {
                let w = &m.weights()[e];
                if w.is_zero() {
                    continue;
                }
                let mut env = env.clone();
                env.insert(v.clone(), e);
                total += w * naive_measure(m, body, rest, &env);
            }
            total
        }
    }
}

/// `‖g‖^{2^k}` over `Z_n` (given as an addition closure) through iterated
/// multiplicative derivatives `Δ_h g(x) = g(x+h) g(x)`, averaged over `x`
/// and `h_1..h_k`.
pub fn naive_gowers(n: usize, add: &dyn Fn(usize, usize) -> usize, g: &[Rational], k: usize) -> Rational {
    fn derive(n: usize, add: &dyn Fn(usize, usize) -> usize, g: &[Rational], k: usize) -> Rational {
        if k == 0 {
            return g.iter().sum::<Rational>() / Rational::from(n);
        }
        let mut total = Rational::zero();
        for h in 0..n {
            let d: Vec<Rational> = (0..n).map(|x| &g[add(x, h)] * &g[x]).collect();
            total += derive(n, add, &d, k - 1);
        }
        total / Rational::from(n)
    }
    derive(n, add, g, k)
}

/// Box norm power of `f` on `M^k` by peeling off the last coordinate:
/// `Σ_{t,t'} w(t) w(t') ‖f(·,t) f(·,t')‖^{2^{k−1}}`. Tuples are lex-encoded,
/// so the last coordinate varies fastest.
pub fn naive_box(n: usize, k: usize, values: &[Rational], weights: &[Rational]) -> Rational {
    if k == 0 {
        return values[0].clone();
    }
    let rows = values.len() / n;
    let mut total = Rational::zero();
    for t in 0..n {
        for t2 in 0..n {
            let w = &weights[t] * &weights[t2];
            if w.is_zero() {
                continue;
            }
            let prod: Vec<Rational> = (0..rows).map(|r| &values[r * n + t] * &values[r * n + t2]).collect();
            total += w * naive_box(n, k - 1, &prod, weights);
        }
    }
    total
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0u32..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x)
                .collect()
        })
        .collect()
}

fn edges_between(g: &Graph, a: &[usize], b: &[usize]) -> usize {
    let mut e = 0;
    for &x in a {
        for &y in b {
            if g.adjacent(x, y) {
                e += 1;
            }
        }
    }
    e
}

/// Whether some `V ⊆ U`, `V' ⊆ U'` with `|V| ≥ ε|U|`, `|V'| ≥ ε|U'|` has
/// `|d(V,V') − d(U,U')| ≥ ε`, trying every pair of subsets.
pub fn naive_irregular(g: &Graph, u: &[usize], u2: &[usize], eps: &Rational) -> bool {
    let d = Rational::ratio(edges_between(g, u, u2), u.len() * u2.len());
    let big = |s: &[usize], of: usize| !s.is_empty() && Rational::from(s.len()) >= eps * Rational::from(of);
    let vs: Vec<Vec<usize>> = subsets(u).into_iter().filter(|s| big(s, u.len())).collect();
    let v2s: Vec<Vec<usize>> = subsets(u2).into_iter().filter(|s| big(s, u2.len())).collect();
    vs.iter().any(|v| {
        v2s.iter().any(|v2| {
            let dv = Rational::ratio(edges_between(g, v, v2), v.len() * v2.len());
            (&dv - &d).abs() >= *eps
        })
    })
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Whether the edge set, viewed as a simple graph, contains a triangle.
pub fn has_triangle(n: usize, edges: &BTreeSet<(usize, usize)>) -> bool {
    let adj = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
    (0..n).any(|a| (a + 1..n).any(|b| adj(a, b) && (b + 1..n).any(|c| adj(a, c) && adj(b, c))))
}

/// Fewest edges whose deletion leaves the graph triangle-free, by trying
/// deletion sets in order of size. `None` if more than `limit` would be needed.
pub fn min_triangle_removal(h: &Hypergraph, limit: usize) -> Option<usize> {
    let n = h.vertex_count();
    let edges: Vec<(usize, usize)> = h.edges().map(|e| (e[0].min(e[1]), e[0].max(e[1]))).collect();
    fn choose(
        n: usize,
        edges: &[(usize, usize)],
        start: usize,
        left: usize,
        removed: &mut Vec<usize>,
    ) -> bool {
        if left == 0 {
            let kept: BTreeSet<(usize, usize)> = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| !removed.contains(i))
                .map(|(_, &e)| e)
                .collect();
            return !has_triangle(n, &kept);
        }
        for i in start..edges.len() {
            removed.push(i);
            if choose(n, edges, i + 1, left - 1, removed) {
                return true;
            }
            removed.pop();
        }
        false
    }
    (0..=limit.min(edges.len())).find(|&s| choose(n, &edges, 0, s, &mut Vec::new()))
}

/// Triples `(x1, x2, x3) ∈ [1,n]² × [1,4n]` with `a = x1 + 2x2`,
/// `d = x3 − x1 − x2 ≠ 0` and `a, a+d, a+2d ∈ A`.
pub fn naive_ap_triples(a: &BTreeSet<usize>, n: usize) -> u64 {
    let inside = |v: i64| v >= 1 && a.contains(&(v as usize));
    let mut count = 0;
    for x1 in 1..=n as i64 {
        for x2 in 1..=n as i64 {
            for x3 in 1..=4 * n as i64 {
                let start = x1 + 2 * x2;
                let d = x3 - x1 - x2;
                if d != 0 && inside(start) && inside(start + d) && inside(start + 2 * d) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Best `count/L` over every window of length at least `l_min`, counted
/// element by element.
pub fn naive_banach(set: &BTreeSet<usize>, n: usize, l_min: usize) -> Rational {
    let mut best = Rational::zero();
    for start in 1..=n {
        for end in start..=n {
            let len = end - start + 1;
            if len < l_min {
                continue;
            }
            let c = (start..=end).filter(|x| set.contains(x)).count();
            let d = Rational::ratio(c, len);
            if d > best {
                best = d;
            }
        }
    }
    best
}

/// `|{x ∈ [1,N] : x + i mod N ∈ E for all i ∈ U}| / N`, stepping the
/// successor map one application at a time.
pub fn naive_cyclic_density(set: &BTreeSet<usize>, n: usize, shifts: &BTreeSet<usize>) -> Rational {
    let succ = |x: usize| if x == n { 1 } else { x + 1 };
    let hits = (1..=n)
        .filter(|&x| {
            shifts.iter().all(|&i| {
                let mut y = x;
                for _ in 0..i {
                    y = succ(y);
                }
                set.contains(&y)
            })
        })
        .count();
    Rational::ratio(hits, n)
}
