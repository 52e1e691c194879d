//! Nearest-neighbour path space of an `n`-step walk and operator-valued sums
//! over it.
//!
//! A path `w = (w(0) = 0, w(1), ..., w(n))` is labelled by
//! `k = sum_j u(j) 2^(j-1)` where `u(j) = 1` iff step `j` goes right. Bit 0 of
//! `k` is the *first* step. Its operator is the ordered product
//! `P_{v(n)} ... P_{v(2)} P_{v(1)}` with the first step rightmost.

use std::fmt;
use std::path::Path as FsPath;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::coin::Coin;
use crate::error::{Error, Result};
use crate::mat2::{Mat2, Spinor, StepOperator};
use crate::scalar::{expi, re, Cx, Real};

/// Default largest `n` for which the `2^n` paths are enumerated.
pub const DEFAULT_MAX_N: u32 = 24;

/// Supplies the left and right step operators of a walk.
pub trait Walk<T: Real>: Sync {
    type Op: StepOperator<T>;
    fn step_left(&self) -> Self::Op;
    fn step_right(&self) -> Self::Op;

    fn step(&self, dir: i64) -> Self::Op {
        if dir > 0 {
            self.step_right()
        } else {
            self.step_left()
        }
    }
}

impl<T: Real> Walk<T> for Coin<T> {
    type Op = Mat2<T>;
    fn step_left(&self) -> Mat2<T> {
        *self.p_minus()
    }
    fn step_right(&self) -> Mat2<T> {
        *self.p_plus()
    }
}

/// One trajectory of the walk.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    w: Vec<i64>,
    k: u64,
}

impl Path {
    /// Decodes path `k` of the `n`-step walk.
    pub fn from_index(n: u32, k: u64) -> Result<Self> {
        if n == 0 || n > 63 || k >> n != 0 {
            return Err(Error::IndexOutOfRange { n, k });
        }
        let mut w = Vec::with_capacity(n as usize + 1);
        w.push(0);
        let mut x = 0i64;
        for j in 0..n {
            x += if (k >> j) & 1 == 1 { 1 } else { -1 };
            w.push(x);
        }
        Ok(Self { w, k })
    }

    /// Validates a position sequence and computes its index.
    pub fn from_positions(w: Vec<i64>) -> Result<Self> {
        let k = index_of_positions(&w)?;
        Ok(Self { w, k })
    }

    pub fn n(&self) -> u32 {
        (self.w.len() - 1) as u32
    }

    pub fn index(&self) -> u64 {
        self.k
    }

    /// `w(0..=n)`
    pub fn positions(&self) -> &[i64] {
        &self.w
    }

    /// `v(1..=n)`, each `-1` or `+1`.
    pub fn increments(&self) -> Vec<i64> {
        self.w.windows(2).map(|p| p[1] - p[0]).collect()
    }

    /// `u(1..=n)`, `1` for a right step.
    pub fn bits(&self) -> Vec<u8> {
        self.w.windows(2).map(|p| u8::from(p[1] > p[0])).collect()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} w={:?}", self.k, self.w)
    }
}

/// `path_from_index`
pub fn path_from_index(n: u32, k: u64) -> Result<Path> {
    Path::from_index(n, k)
}

/// `index_from_path`
pub fn index_from_path(p: &Path) -> u64 {
    p.k
}

/// Index of a raw position sequence, rejecting anything that is not a
/// nearest-neighbour walk from the origin.
pub fn index_of_positions(w: &[i64]) -> Result<u64> {
    if w.len() < 2 {
        return Err(Error::MalformedPath("need at least one step".into()));
    }
    if w.len() > 64 {
        return Err(Error::MalformedPath(format!(
            "{} steps exceed 63",
            w.len() - 1
        )));
    }
    if w[0] != 0 {
        return Err(Error::MalformedPath(format!(
            "w(0) = {} is not the origin",
            w[0]
        )));
    }
    let mut k = 0u64;
    for (j, p) in w.windows(2).enumerate() {
        match p[1] - p[0] {
            1 => k |= 1 << j,
            -1 => {}
            d => {
                return Err(Error::MalformedPath(format!(
                    "increment v({}) = {d} is not +-1",
                    j + 1
                )))
            }
        }
    }
    Ok(k)
}

/// Writes the positions of path `k` of the `n`-step walk into `buf`.
pub fn positions_into(n: u32, k: u64, buf: &mut Vec<i64>) {
    buf.clear();
    buf.push(0);
    let mut x = 0i64;
    for j in 0..n {
        x += if (k >> j) & 1 == 1 { 1 } else { -1 };
        buf.push(x);
    }
}

/// `P_{w^(k)} v` for every `k`, indexed by `k`, built breadth-first: the
/// images after `t + 1` steps are `P_{v(t+1)}` applied to those after `t`.
pub fn path_images<T: Real>(coin: &Coin<T>, v: &Spinor<T>, n: u32) -> Vec<Spinor<T>> {
    let (pm, pp) = (*coin.p_minus(), *coin.p_plus());
    let mut out = Vec::with_capacity(1usize << n);
    out.push(*v);
    for _ in 0..n {
        let len = out.len();
        for k in 0..len {
            let r = pp.apply(&out[k]);
            out.push(r);
            out[k] = pm.apply(&out[k]);
        }
    }
    out
}

/// Ordered product `P_{v(n)} ... P_{v(1)}` of a path.
pub fn path_operator<T: Real, W: Walk<T>>(walk: &W, p: &Path) -> W::Op {
    let mut acc = W::Op::identity_op();
    for dw in p.increments() {
        acc = walk.step(dw).compose(&acc);
    }
    acc
}

/// How [`PathSum`] enumerates paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Depth-first traversal sharing prefix products; one multiply per edge.
    #[default]
    SharedPrefix,
    /// Decode every index and rebuild its product from scratch. `O(n 2^n)`;
    /// kept as a reference evaluator.
    Naive,
}

/// Evaluator for path sums `sigma_n(f) = sum_k f(w^(k)) P_{w^(k)}`.
///
/// With `split_depth = d > 0` the first `d` steps are fixed per block, the
/// `2^d` blocks run on the rayon pool and are reduced pairwise in block
/// order. Since the sequential traversal reduces the same tree, the result is
/// bit-identical for every `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathSum {
    pub max_n: u32,
    pub split_depth: u32,
    pub strategy: Strategy,
}

impl Default for PathSum {
    fn default() -> Self {
        Self {
            max_n: DEFAULT_MAX_N,
            split_depth: 0,
            strategy: Strategy::SharedPrefix,
        }
    }
}

impl PathSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_max_n(mut self, max_n: u32) -> Self {
        self.max_n = max_n;
        self
    }

    pub fn with_split_depth(mut self, d: u32) -> Self {
        self.split_depth = d;
        self
    }

    pub fn with_strategy(mut self, s: Strategy) -> Self {
        self.strategy = s;
        self
    }

    pub fn check_n(&self, n: u32) -> Result<()> {
        if n > self.max_n || n > 62 {
            return Err(Error::EnumerationCap {
                n,
                cap: self.max_n.min(62),
            });
        }
        Ok(())
    }

    /// `sum_k f(w^(k)) P_{w^(k)}` for a scalar path functional.
    pub fn sigma<T, W, F>(&self, walk: &W, n: u32, f: &F) -> Result<W::Op>
    where
        T: Real,
        W: Walk<T>,
        F: PathFn<T> + ?Sized,
    {
        let [s] = self.sigma_multi(walk, n, |w: &[i64]| [f.eval(w)])?;
        Ok(s)
    }

    /// Evaluates `K` path sums in a single traversal.
    pub fn sigma_multi<T, W, F, const K: usize>(&self, walk: &W, n: u32, f: F) -> Result<[W::Op; K]>
    where
        T: Real,
        W: Walk<T>,
        F: Fn(&[i64]) -> [Cx<T>; K] + Sync,
    {
        self.check_n(n)?;
        Ok(match self.strategy {
            Strategy::Naive => naive_sum(walk, n, &f),
            Strategy::SharedPrefix => {
                let d = self.split_depth.min(n);
                if d == 0 {
                    Dfs::new(walk, n as usize, &f, &[0], W::Op::identity_op()).descend(0)
                } else {
                    let blocks: Vec<[W::Op; K]> = (0..1u64 << d)
                        .into_par_iter()
                        .map(|b| {
                            // block order takes the first step as the most
                            // significant bit, matching the traversal tree
                            let prefix = b.reverse_bits() >> (64 - d);
                            let (w, op) = prefix_state(walk, d, prefix);
                            Dfs::new(walk, n as usize, &f, &w, op).descend(d as usize)
                        })
                        .collect();
                    tree_sum(&blocks)
                }
            }
        })
    }
}

/// Convenience wrapper over [`PathSum::default`].
pub fn sigma<T: Real, W: Walk<T>, F: PathFn<T> + ?Sized>(walk: &W, n: u32, f: &F) -> Result<W::Op> {
    PathSum::default().sigma(walk, n, f)
}

fn prefix_state<T: Real, W: Walk<T>>(walk: &W, d: u32, prefix: u64) -> (Vec<i64>, W::Op) {
    let mut w = vec![0i64];
    let mut op = W::Op::identity_op();
    for j in 0..d {
        let step = if (prefix >> j) & 1 == 1 { 1 } else { -1 };
        w.push(w[j as usize] + step);
        op = walk.step(step).compose(&op);
    }
    (w, op)
}

fn naive_sum<T, W, F, const K: usize>(walk: &W, n: u32, f: &F) -> [W::Op; K]
where
    T: Real,
    W: Walk<T>,
    F: Fn(&[i64]) -> [Cx<T>; K],
{
    let mut acc = [W::Op::zero_op(); K];
    for k in 0..1u64 << n {
        let p = Path::from_index(n, k).expect("k < 2^n");
        let op = path_operator(walk, &p);
        let vals = f(p.positions());
        for i in 0..K {
            acc[i] = acc[i].plus(&op.scaled(vals[i]));
        }
    }
    acc
}

struct Dfs<'a, T: Real, W: Walk<T>, F, const K: usize> {
    left: W::Op,
    right: W::Op,
    n: usize,
    w: Vec<i64>,
    prods: Vec<W::Op>,
    f: &'a F,
}

impl<'a, T, W, F, const K: usize> Dfs<'a, T, W, F, K>
where
    T: Real,
    W: Walk<T>,
    F: Fn(&[i64]) -> [Cx<T>; K],
{
    fn new(walk: &W, n: usize, f: &'a F, prefix: &[i64], prefix_op: W::Op) -> Self {
        let d = prefix.len() - 1;
        let mut w = vec![0i64; n + 1];
        w[..=d].copy_from_slice(prefix);
        let mut prods = vec![W::Op::identity_op(); n + 1];
        prods[d] = prefix_op;
        Self {
            left: walk.step_left(),
            right: walk.step_right(),
            n,
            w,
            prods,
            f,
        }
    }

    /// Sum over the subtree below `depth`. Each node adds its two children,
    /// so the reduction is pairwise and rounding grows with `n`, not `2^n`.
    fn descend(&mut self, depth: usize) -> [W::Op; K] {
        if depth == self.n {
            let vals = (self.f)(&self.w);
            let p = self.prods[depth];
            return vals.map(|v| {
                if v.is_zero() {
                    W::Op::zero_op()
                } else {
                    p.scaled(v)
                }
            });
        }
        let here = self.w[depth];
        let prod = self.prods[depth];
        self.w[depth + 1] = here - 1;
        self.prods[depth + 1] = self.left.compose(&prod);
        let l = self.descend(depth + 1);
        self.w[depth + 1] = here + 1;
        self.prods[depth + 1] = self.right.compose(&prod);
        let r = self.descend(depth + 1);
        add_all(&l, &r)
    }
}

fn add_all<T: Real, O: StepOperator<T>, const K: usize>(a: &[O; K], b: &[O; K]) -> [O; K] {
    std::array::from_fn(|i| a[i].plus(&b[i]))
}

/// Pairwise reduction of block results in block order.
fn tree_sum<T: Real, O: StepOperator<T>, const K: usize>(blocks: &[[O; K]]) -> [O; K] {
    match blocks {
        [] => [O::zero_op(); K],
        [one] => *one,
        _ => {
            let (a, b) = blocks.split_at(blocks.len() / 2);
            add_all(&tree_sum(a), &tree_sum(b))
        }
    }
}

/// `Xi_n(n - m, m)` for `m = 0..=n`: the sum of the ordered products of every
/// path with `m` right steps, built by the lattice recursion
/// `Xi_{t+1}(l, m) = P_minus Xi_t(l - 1, m) + P_plus Xi_t(l, m - 1)`.
pub fn xi_level<T: Real, W: Walk<T>>(walk: &W, n: u32) -> Vec<W::Op> {
    let left = walk.step_left();
    let right = walk.step_right();
    let mut level = vec![W::Op::identity_op()];
    for t in 0..n as usize {
        let mut next = vec![W::Op::zero_op(); t + 2];
        for (m, slot) in next.iter_mut().enumerate() {
            let mut s = W::Op::zero_op();
            if m <= t {
                s = s.plus(&left.compose(&level[m]));
            }
            if m >= 1 {
                s = s.plus(&right.compose(&level[m - 1]));
            }
            *slot = s;
        }
        level = next;
    }
    level
}

/// `Xi_n(l, m)`, the path sum over trajectories with `l` left and `m` right
/// steps.
pub fn xi_matrix<T: Real, W: Walk<T>>(walk: &W, n: u32, l: u32, m: u32) -> Result<W::Op> {
    if l.checked_add(m) != Some(n) {
        return Err(Error::LevelMismatch { n, l, m });
    }
    Ok(xi_level(walk, n)[m as usize])
}

/// A function of a whole path, `f(w(0), ..., w(n))`.
pub trait PathFn<T>: Sync {
    fn eval(&self, w: &[i64]) -> Cx<T>;
}

impl<T, F: Fn(&[i64]) -> Cx<T> + Sync> PathFn<T> for F {
    fn eval(&self, w: &[i64]) -> Cx<T> {
        self(w)
    }
}

type SharedFn<T> = Arc<dyn Fn(&[i64]) -> Cx<T> + Send + Sync>;

/// A named path functional, as selected on the command line.
#[derive(Clone)]
pub struct PathFunctional<T> {
    name: String,
    f: SharedFn<T>,
}

impl<T> fmt::Debug for PathFunctional<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PathFunctional")
            .field("name", &self.name)
            .finish()
    }
}

impl<T: Real> PathFn<T> for PathFunctional<T> {
    fn eval(&self, w: &[i64]) -> Cx<T> {
        (self.f)(w)
    }
}

impl<T: Real> PathFunctional<T> {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(&[i64]) -> Cx<T> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn constant(c: T) -> Self {
        Self::new(format!("const:{c}"), move |_| re(c))
    }

    /// `I{w(n) = x}`
    pub fn endpoint_indicator(x: i64) -> Self {
        Self::new(format!("endpoint_indicator:{x}"), move |w| {
            if *w.last().unwrap() == x {
                Cx::one()
            } else {
                Cx::zero()
            }
        })
    }

    /// Indicator of the cylinder `B_0 x ... x B_{n-1} x {x}`; identical to
    /// [`Self::endpoint_indicator`] on nearest-neighbour paths.
    pub fn cylinder(x: i64) -> Self {
        let mut f = Self::endpoint_indicator(x);
        f.name = format!("cylinder:{x}");
        f
    }

    /// `e^{i xi w(n)}`
    pub fn endpoint_exp(xi: T) -> Self {
        Self::new(format!("endpoint_exp:{xi}"), move |w| {
            expi(xi * T::from_i64(*w.last().unwrap()).unwrap())
        })
    }

    /// `g(w(n))` for a tabulated `g`; endpoints outside the table map to 0.
    pub fn endpoint_table(name: impl Into<String>, table: Vec<(i64, Cx<T>)>) -> Self {
        let map: std::collections::HashMap<i64, Cx<T>> = table.into_iter().collect();
        Self::new(name, move |w| {
            map.get(w.last().unwrap()).copied().unwrap_or_else(Cx::zero)
        })
    }

    /// Parses `const:c | endpoint_indicator:x | endpoint_exp:xi |
    /// endpoint_table:<file> | cylinder:x`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("path functional {spec:?} has no ':'")))?;
        let int = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
        };
        let float = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map(T::lit)
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
        };
        match kind.trim() {
            "const" => Ok(Self::constant(float(arg)?)),
            "endpoint_indicator" => Ok(Self::endpoint_indicator(int(arg)?)),
            "cylinder" => Ok(Self::cylinder(int(arg)?)),
            "endpoint_exp" => Ok(Self::endpoint_exp(float(arg)?)),
            "endpoint_table" => {
                let rows = read_complex_table(arg)?;
                let rows = rows
                    .into_iter()
                    .map(|(x, a, b)| (x, Cx::new(T::lit(a), T::lit(b))))
                    .collect();
                Ok(Self::endpoint_table(spec, rows))
            }
            other => Err(Error::Parse(format!(
                "unknown path functional kind {other:?}"
            ))),
        }
    }
}

/// Reads `x,re,im` rows. A leading header row is skipped; `im` may be
/// omitted.
pub(crate) fn read_complex_table(path: impl AsRef<FsPath>) -> Result<Vec<(i64, f64, f64)>> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let Some(x) = rec.get(0) else { continue };
        let Ok(x) = x.parse::<i64>() else {
            if line == 0 {
                continue;
            }
            return Err(Error::Parse(format!(
                "{}:{}: bad x {x:?}",
                path.display(),
                line + 1
            )));
        };
        let num = |i: usize| -> Result<f64> {
            match rec.get(i) {
                None | Some("") => Ok(0.0),
                Some(s) => s.parse::<f64>().map_err(|e| {
                    Error::Parse(format!("{}:{}: {s:?}: {e}", path.display(), line + 1))
                }),
            }
        };
        rows.push((x, num(1)?, num(2)?));
    }
    Ok(rows)
}
