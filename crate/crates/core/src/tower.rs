//! A chain of (2,2)-isogenies `J_n → … → J_2 → J_1` ending with
//! `Jac(C2) → Jac(C1)`.
//!
//! Every level is held as a quintic model. Level 2 steps down to level 1 by
//! the canonical splitting of `C2`; each higher level `n + 1` is the image
//! of a Richelot step taken at level `n` with a splitting that does not
//! lead straight back, and the edge `J_{n+1} → J_n` is the dual of that
//! step.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactfield::{Field, Poly, Rational, Ring};
use crate::genus2::{richelot_transform, HyperCurve, QuadSplit, RichelotOut};
use crate::igusa::igusa_clebsch;
use crate::kowtop::{check_nondegenerate, curve_c1, curve_c2};
use crate::numverify::checks::{kernel_check_edge, mult2_check_edge, KernelSide};
use crate::numverify::push::{recenter_at_root, Affine, Chart, NumEdge};
use crate::numverify::real::{abs, poly_q, to_c64, DoubleDouble, Real, C};
use crate::numverify::roots::roots;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TowerMode {
    Exact,
    RealNumeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    PairedRealRoots,
    LexicographicExact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// The Richelot step itself, `Jac(C) → Jac(Ĉ)`.
    Forward,
    /// The dual of the step taken at the lower level.
    Dual,
}

impl FromStr for TowerMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(TowerMode::Exact),
            "real-numeric" => Ok(TowerMode::RealNumeric),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paired-real-roots" => Ok(Strategy::PairedRealRoots),
            "lexicographic-exact" => Ok(Strategy::LexicographicExact),
            _ => Err(Error::Parse(format!("unknown strategy {s:?}"))),
        }
    }
}

impl fmt::Display for TowerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TowerMode::Exact => "exact",
            TowerMode::RealNumeric => "real-numeric",
        })
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::PairedRealRoots => "paired-real-roots",
            Strategy::LexicographicExact => "lexicographic-exact",
        })
    }
}

pub const DEFAULT_DEPTH_CAP: usize = 16;

#[derive(Clone, Debug)]
pub struct TowerOptions {
    pub mode: TowerMode,
    pub strategy: Strategy,
    /// Random classes per edge in the doubling check.
    pub mult2_samples: usize,
    pub seed: u64,
    pub depth_cap: usize,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            mode: TowerMode::RealNumeric,
            strategy: Strategy::PairedRealRoots,
            mult2_samples: 5,
            seed: 0,
            depth_cap: DEFAULT_DEPTH_CAP,
        }
    }
}

/// A polynomial as an exact string or as complex float coefficients
/// (constant term first).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyRepr {
    Exact(String),
    Numeric(Vec<[f64; 2]>),
}

fn repr_q(p: &Poly<Rational>) -> PolyRepr {
    PolyRepr::Exact(p.display_in("x"))
}

fn repr_n<T: Real>(p: &Poly<C<T>>) -> PolyRepr {
    PolyRepr::Numeric(p.coeffs().iter().map(|z| [z.re.f64(), z.im.f64()]).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerNode {
    pub level: usize,
    pub curve: PolyRepr,
    /// Exact coefficients, constant term first, when the level is exact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_coeffs: Option<Vec<Rational>>,
    /// Splitting used for the step toward level `n + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<Vec<PolyRepr>>,
    pub provenance: String,
    /// Absolute Igusa invariants as complex pairs.
    pub igusa_absolute: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelDescription {
    /// Level of the curve carrying the generators.
    pub on_level: usize,
    /// Factors whose roots give the three two-torsion generators.
    pub generators: Vec<PolyRepr>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeStatus {
    pub delta_nonzero: bool,
    pub image_squarefree: bool,
    pub mult2_max_error: f64,
    pub mult2_pass: bool,
    pub kernel_residual: f64,
    pub kernel_pass: bool,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerEdge {
    pub source: usize,
    pub target: usize,
    pub direction: Direction,
    pub exact: bool,
    /// Level at which the Richelot step realizing the edge is taken.
    pub step_level: usize,
    pub splitting: Vec<PolyRepr>,
    pub delta: PolyRepr,
    pub l: Vec<PolyRepr>,
    pub kernel: KernelDescription,
    pub chart: String,
    pub status: EdgeStatus,
}

/// A built tower: levels `1..=depth` and the edges between consecutive
/// levels, with the numeric realization of every edge.
#[derive(Clone, Debug)]
pub struct Tower<T> {
    pub h: Rational,
    pub i2: Rational,
    pub options: TowerOptions,
    pub nodes: Vec<TowerNode>,
    pub edges: Vec<TowerEdge>,
    pub numeric: Vec<NumEdge<T>>,
    /// Levels where exact mode gave way to floating point, with the reason.
    pub fallbacks: Vec<String>,
}

/// The six branch points of a quintic or sextic model (`None` is the point
/// at infinity).
pub type Partition<T> = Vec<[Option<C<T>>; 2]>;

fn branch_points<T: Real>(f: &Poly<C<T>>) -> Result<Vec<Option<C<T>>>> {
    let mut pts: Vec<Option<C<T>>> = roots(f)?.into_iter().map(Some).collect();
    if f.deg() == Some(5) {
        pts.push(None);
    }
    Ok(pts)
}

fn real_tol<T: Real>() -> f64 {
    T::unit_roundoff().sqrt()
}

fn is_real<T: Real>(p: &Option<C<T>>) -> bool {
    match p {
        None => true,
        Some(z) => z.im.abs().f64() <= real_tol::<T>() * (1.0 + abs(*z)),
    }
}

/// Complex points first (conjugates adjacent), then real points in
/// increasing order, then infinity.
fn sort_points<T: Real>(mut pts: Vec<Option<C<T>>>) -> Vec<Option<C<T>>> {
    let key = |p: &Option<C<T>>| match p {
        None => (2, 0.0, 0.0),
        Some(z) if is_real(p) => (1, z.re.f64(), 0.0),
        Some(z) => (0, z.re.f64(), z.im.f64()),
    };
    pts.sort_by(|a, b| key(a).partial_cmp(&key(b)).expect("finite"));
    pts
}

/// Perfect matchings of `0..n` in lexicographic order; the first one pairs
/// neighbours.
fn matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(left: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some((&first, rest)) = left.split_first() else {
            out.push(acc.clone());
            return;
        };
        for k in 0..rest.len() {
            let mut remaining = rest.to_vec();
            let partner = remaining.remove(k);
            acc.push((first, partner));
            rec(&remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(&(0..n).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    out
}

fn close<T: Real>(a: &Option<C<T>>, b: &Option<C<T>>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => abs(*x - *y) <= tol * (1.0 + abs(*x)),
        _ => false,
    }
}

fn same_pair<T: Real>(p: &[Option<C<T>>; 2], q: &[Option<C<T>>; 2], tol: f64) -> bool {
    (close(&p[0], &q[0], tol) && close(&p[1], &q[1], tol)) || (close(&p[0], &q[1], tol) && close(&p[1], &q[0], tol))
}

/// Equality of two partitions of the branch points.
pub fn same_partition<T: Real>(a: &Partition<T>, b: &Partition<T>, tol: f64) -> bool {
    a.len() == b.len() && a.iter().all(|p| b.iter().any(|q| same_pair(p, q, tol)))
}

/// Pairs of branch points cut out by the factors of a splitting.
pub fn partition_of<T: Real>(factors: &[Poly<C<T>>]) -> Result<Partition<T>> {
    factors
        .iter()
        .map(|g| {
            let rs = roots(g)?;
            match rs.as_slice() {
                [a] => Ok([Some(*a), None]),
                [a, b] => Ok([Some(*a), Some(*b)]),
                _ => Err(Error::SplittingDegree(g.degree().max(0) as usize)),
            }
        })
        .collect()
}

/// Monic factor vanishing on a pair of branch points.
fn pair_factor<T: Real>(pair: &[Option<C<T>>; 2], real: bool) -> Poly<C<T>> {
    let lin = |z: C<T>| Poly::linear_root(z);
    let p = match pair {
        [Some(a), None] | [None, Some(a)] => lin(*a),
        [Some(a), Some(b)] => &lin(*a) * &lin(*b),
        [None, None] => Poly::one(),
    };
    if real {
        Poly::new(p.coeffs().iter().map(|z| C::new(z.re, T::zero())).collect())
    } else {
        p
    }
}

/// Order the factors with the linear one first and put the leading
/// coefficient of `f` on the last.
fn assemble<F: Field>(mut factors: Vec<Poly<F>>, lc: F) -> Result<QuadSplit<F>> {
    factors.sort_by_key(|g| g.degree());
    let g3 = factors[2].scale(&lc);
    QuadSplit::new(factors[0].clone(), factors[1].clone(), g3)
}

/// Real splittings of a quintic chart, one per admissible pairing of its
/// branch points (real with real, or a conjugate pair), in the order of
/// the sorted pairing, skipping partitions in `avoid` and `Δ = 0`.
fn numeric_candidates<T: Real>(f: &Poly<C<T>>, avoid: &[Partition<T>]) -> Result<Vec<(NumEdge<T>, Partition<T>)>> {
    let pts = sort_points(branch_points(f)?);
    let tol = T::unit_roundoff().powf(0.3);
    let lc = f.lc();
    let mut out = Vec::new();
    for m in matchings(pts.len()) {
        let part: Partition<T> = m.iter().map(|&(i, j)| [pts[i], pts[j]]).collect();
        let admissible = part.iter().all(|p| {
            (is_real(&p[0]) && is_real(&p[1]))
                || matches!(p, [Some(a), Some(b)] if abs(*a - b.conj()) <= real_tol::<T>() * (1.0 + abs(*a)))
        });
        if !admissible || avoid.iter().any(|a| same_partition(a, &part, tol)) {
            continue;
        }
        let factors: Vec<Poly<C<T>>> = part.iter().map(|p| pair_factor(p, true)).collect();
        match NumEdge::new(f.clone(), assemble(factors, lc)?) {
            Ok(e) => out.push((e, part)),
            Err(Error::DeltaZero) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn no_real_splitting() -> Error {
    Error::NoSplitting("every real pairing is excluded or has Δ = 0".into())
}

/// The first admissible real splitting of a quintic chart: for real
/// branch points this pairs neighbours in increasing order.
pub fn choose_splitting_numeric<T: Real>(f: &Poly<C<T>>, avoid: &[Partition<T>]) -> Result<(NumEdge<T>, Partition<T>)> {
    numeric_candidates(f, avoid)?.into_iter().next().ok_or_else(no_real_splitting)
}

/// Number of real roots of the normalized target and the smallest distance
/// between two of its roots (all of which lie in the unit disc).
fn separation<T: Real>(e: &NumEdge<T>) -> (usize, f64) {
    let Ok(rs) = roots(&e.target) else { return (0, 0.0) };
    let reals = rs.iter().filter(|z| is_real(&Some(**z))).count();
    let mut m = f64::INFINITY;
    for i in 0..rs.len() {
        for j in i + 1..rs.len() {
            m = m.min(abs(rs[i] - rs[j]));
        }
    }
    (reals, m)
}

/// Real branch points of the image (at least four keep a choice open at
/// the next level) and the separation of its roots.
fn score<T: Real>(e: &NumEdge<T>) -> (bool, f64) {
    let (reals, sep) = separation(e);
    (reals >= 4, sep)
}

/// Best score reachable one step further from the image of `e`.
fn lookahead<T: Real>(e: &NumEdge<T>) -> Result<(bool, f64)> {
    let avoid = vec![backtrack_partition(e)?];
    let mut best = (false, 0.0);
    for (next, _) in numeric_candidates(&e.target, &avoid)? {
        let sc = score(&next.normalized()?);
        if sc > best {
            best = sc;
        }
    }
    Ok(best)
}

/// The admissible real splitting whose normalized image keeps at least
/// four real branch points and has the best separated roots, looking one
/// level ahead; the first one wins ties. With fewer real branch points
/// only one real pairing is left at the next level, usually the one
/// leading back, and repeating the sorted pairing level after level is a
/// genus-2 AGM, whose curves degenerate quickly.
pub fn choose_splitting_separated<T: Real>(f: &Poly<C<T>>, avoid: &[Partition<T>]) -> Result<(NumEdge<T>, Partition<T>)> {
    let mut best: Option<((bool, f64), NumEdge<T>, Partition<T>)> = None;
    for (e, part) in numeric_candidates(f, avoid)? {
        let e = e.normalized()?;
        let here = score(&e);
        let ahead = if here.0 { lookahead(&e).unwrap_or((false, 0.0)) } else { (false, 0.0) };
        let sc = if ahead.0 { (true, here.1.min(ahead.1)) } else { (false, here.1) };
        if best.as_ref().is_none_or(|b| sc > b.0) {
            best = Some((sc, e, part));
        }
    }
    best.map(|(_, e, p)| (e, p)).ok_or_else(no_real_splitting)
}

/// `x·G·(G − 1)` with `G` monic quadratic: the canonical splitting of `C2`.
fn canonical_pattern(f: &Poly<Rational>) -> Option<QuadSplit<Rational>> {
    if f.deg() != Some(5) || !f.coeff(0).is_zero() || !f.lc().is_one() {
        return None;
    }
    let q = Poly::new(f.coeffs()[1..].to_vec());
    let half = Rational::new(1, 2);
    let b = q.coeff(3) * half.clone();
    let c = (q.coeff(2) - b.clone() * b.clone() + Rational::one()) * half;
    let g = Poly::new(vec![c, b, Rational::one()]);
    let gm = &g - &Poly::one();
    (&(&Poly::x() * &g) * &gm == *f).then(|| QuadSplit::new(Poly::x(), g, gm).ok()).flatten()
}

/// Exact monic factor with the given numeric coefficients, if it is
/// rational and divides `f`.
fn recognize(f: &Poly<Rational>, approx: &Poly<C<DoubleDouble>>) -> Option<Poly<Rational>> {
    let mut c = Vec::new();
    for z in approx.coeffs() {
        if z.im.abs().f64() > 1e-12 * (1.0 + abs(*z)) {
            return None;
        }
        c.push(Rational::approximate(z.re.f64(), 1_000_000_000)?);
    }
    let g = Poly::new(c);
    g.divides(f).then_some(g)
}

/// Splitting of an exact model over the rationals. The canonical splitting
/// of `C2` is returned as is when `f` has that shape; otherwise the
/// rational pairings of the branch points are collected and the first (for
/// `PairedRealRoots`) or the lexicographically smallest (for
/// `LexicographicExact`) is taken.
pub fn choose_splitting(f: &Poly<Rational>, strategy: Strategy) -> Result<QuadSplit<Rational>> {
    choose_splitting_exact::<f64>(f, strategy, &[])
}

/// As [`choose_splitting`], skipping partitions in `avoid`.
pub fn choose_splitting_exact<T: Real>(
    f: &Poly<Rational>,
    strategy: Strategy,
    avoid: &[Partition<T>],
) -> Result<QuadSplit<Rational>> {
    exact_candidates(f, strategy, avoid)?.into_iter().next().ok_or_else(no_rational_splitting)
}

fn no_rational_splitting() -> Error {
    Error::NoSplitting("no factorization into rational factors of degree ≤ 2".into())
}

/// Every exact splitting of `f` outside `avoid`, in the order of the
/// strategy: the canonical one first when `f` has that shape, then by
/// pairing order or by the sorted coefficient vectors of the factors.
fn exact_candidates<T: Real>(
    f: &Poly<Rational>,
    strategy: Strategy,
    avoid: &[Partition<T>],
) -> Result<Vec<QuadSplit<Rational>>> {
    let tol = T::unit_roundoff().powf(0.3);
    let excluded = |s: &QuadSplit<Rational>| -> Result<bool> {
        let part = partition_of(&s.factors().iter().map(poly_q::<T>).collect::<Vec<_>>())?;
        Ok(avoid.iter().any(|a| same_partition(a, &part, tol)))
    };
    let mut out = Vec::new();
    if let Some(s) = canonical_pattern(f) {
        if !excluded(&s)? {
            out.push(s);
        }
    }
    let fd = poly_q::<DoubleDouble>(f);
    let pts = sort_points(branch_points(&fd)?);
    let mut found: Vec<(Vec<Poly<Rational>>, QuadSplit<Rational>)> = Vec::new();
    for m in matchings(pts.len()) {
        let mut factors = Vec::new();
        for &(i, j) in &m {
            match recognize(f, &pair_factor(&[pts[i], pts[j]], false)) {
                Some(g) => factors.push(g),
                None => break,
            }
        }
        if factors.len() != 3 {
            continue;
        }
        let Ok(s) = assemble(factors.clone(), f.lc()) else { continue };
        if s.product() != *f || excluded(&s)? || crate::genus2::split_delta(&s).is_zero() || out.contains(&s) {
            continue;
        }
        let mut key = factors;
        key.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
        found.push((key, s));
    }
    if strategy == Strategy::LexicographicExact {
        found.sort_by(|a, b| {
            let ka: Vec<&[Rational]> = a.0.iter().map(|p| p.coeffs()).collect();
            let kb: Vec<&[Rational]> = b.0.iter().map(|p| p.coeffs()).collect();
            ka.cmp(&kb)
        });
    }
    out.extend(found.into_iter().map(|(_, s)| s));
    Ok(out)
}

/// Branch points of the image of an exact step that are real (infinity
/// counts for a quintic image).
fn real_image_points(s: &QuadSplit<Rational>) -> usize {
    let Ok(out) = RichelotOut::numeric(&s.map(|q| C::<DoubleDouble>::from_rational(q))) else { return 0 };
    branch_points(out.image.f()).map(|pts| pts.iter().filter(|p| is_real(p)).count()).unwrap_or(0)
}

/// The exact splitting to use at a level: among the candidates, those whose
/// image keeps the most real branch points, first in strategy order. An
/// image with fewer than four real branch points has a single real pairing
/// left, usually the one leading back, so such candidates are refused.
fn pick_exact<T: Real>(f: &Poly<Rational>, strategy: Strategy, avoid: &[Partition<T>]) -> Result<QuadSplit<Rational>> {
    let mut best: Option<(usize, QuadSplit<Rational>)> = None;
    for s in exact_candidates(f, strategy, avoid)? {
        let r = real_image_points(&s);
        if best.as_ref().is_none_or(|b| r > b.0) {
            best = Some((r, s));
        }
    }
    match best {
        Some((r, s)) if r >= 4 => Ok(s),
        Some(_) => Err(Error::NoSplitting("every rational splitting leaves fewer than four real branch points".into())),
        None => Err(no_rational_splitting()),
    }
}

/// A rational root of `f`, if the numeric roots reveal one.
fn rational_root(f: &Poly<Rational>) -> Option<Rational> {
    let mut found: Vec<Rational> = roots(&poly_q::<DoubleDouble>(f))
        .ok()?
        .into_iter()
        .filter_map(|z| recognize(f, &Poly::linear_root(z)))
        .map(|g| -g.coeff(0))
        .collect();
    found.sort_by(|a, b| a.abs().cmp(&b.abs()).then(a.cmp(b)));
    found.into_iter().next()
}

fn igusa_numeric<T: Real>(f: &Poly<C<T>>) -> Option<Vec<[f64; 2]>> {
    let abs_inv = igusa_clebsch(f).ok()?.absolute()?;
    Some(abs_inv.into_iter().map(|z| [to_c64(z).re, to_c64(z).im]).collect())
}

fn igusa_exact(f: &Poly<Rational>) -> Option<Vec<[f64; 2]>> {
    let abs_inv = igusa_clebsch(f).ok()?.absolute()?;
    Some(abs_inv.into_iter().map(|z| [z.to_f64(), 0.0]).collect())
}

fn exact_node(level: usize, f: &Poly<Rational>, provenance: String) -> TowerNode {
    TowerNode {
        level,
        curve: repr_q(f),
        exact_coeffs: Some(f.coeffs().to_vec()),
        splitting: None,
        provenance,
        igusa_absolute: igusa_exact(f),
    }
}

fn numeric_squarefree<T: Real>(f: &Poly<C<T>>) -> bool {
    let Ok(rs) = roots(f) else { return false };
    let scale = rs.iter().map(|z| abs(*z)).fold(1.0, f64::max);
    (0..rs.len()).all(|i| (i + 1..rs.len()).all(|j| abs(rs[i] - rs[j]) > 1e3 * real_tol::<T>() * scale))
}

fn status<T: Real>(e: &NumEdge<T>, squarefree: bool, side: KernelSide, opts: &TowerOptions, level: usize) -> Result<EdgeStatus> {
    let m = mult2_check_edge(e, opts.mult2_samples.max(1), opts.seed.wrapping_add(level as u64))?;
    let k = kernel_check_edge(e, side)?;
    Ok(EdgeStatus {
        delta_nonzero: true,
        image_squarefree: squarefree,
        mult2_max_error: m.max_error,
        mult2_pass: m.pass,
        kernel_residual: k.max_error,
        kernel_pass: k.pass,
        verified: squarefree && m.pass && k.pass,
    })
}

fn chart_text<T: Real>(e: &NumEdge<T>) -> String {
    let mut s = match &e.chart {
        Chart::Identity => "identity".to_string(),
        Chart::ShiftInvert(r) => {
            let r = to_c64(*r);
            if r.im.abs() > 1e-12 * (1.0 + r.re.abs()) {
                format!("x' = 1/(X - r), r = {} + {:e}i", r.re, r.im)
            } else {
                format!("x' = 1/(X - r), r = {}", r.re)
            }
        }
    };
    if e.norm != Affine::identity() {
        let (a, b, t) = (to_c64(e.norm.a), to_c64(e.norm.b), to_c64(e.norm.t));
        s.push_str(&format!("; then x' = {}·x'' + {}, y' = {}·y''", a.re, b.re, t.re));
    }
    s
}

/// Pairs of branch points of the target chart cut out by the `L_i`: the
/// partition whose step leads back down.
fn backtrack_partition<T: Real>(e: &NumEdge<T>) -> Result<Partition<T>> {
    e.rich
        .l
        .iter()
        .map(|l| {
            let pts: Vec<Option<C<T>>> =
                roots(l)?.into_iter().map(|x| e.chart_point(x, C::zero()).map(|p| p.x)).collect();
            match pts.as_slice() {
                [a] => Ok([*a, None]),
                [a, b] => Ok([*a, *b]),
                _ => Err(Error::SplittingDegree(l.degree().max(0) as usize)),
            }
        })
        .collect()
}

/// Build the tower down to `(C2, C1)` with `depth` levels.
pub fn build_tower<T: Real>(h: &Rational, i2: &Rational, depth: usize, opts: &TowerOptions) -> Result<Tower<T>> {
    check_nondegenerate(h, i2)?;
    if depth < 2 {
        return Err(Error::TowerDepth(depth));
    }
    if depth > opts.depth_cap {
        return Err(Error::TowerDepthCap(depth, opts.depth_cap));
    }
    let c1 = curve_c1(h, i2)?;
    let (c2, canon) = curve_c2(h, i2)?;
    let down = richelot_transform(&c2, &canon)?;
    let (a, tw) = down
        .image
        .affine_twist_to(&c1)
        .ok_or_else(|| Error::Numeric("image of the canonical step is not an affine twist of C1".into()))?;
    let mut nodes = vec![
        exact_node(1, c1.f(), format!("C1(H, I2) with H = {h:?}, I2 = {i2:?}")),
        exact_node(2, c2.f(), format!("C2(H, I2); the canonical step lands on C1 after x -> x + ({a:?}) and twist {tw:?}")),
    ];
    let e21 = NumEdge::<T>::new(poly_q(c2.f()), canon.map(|q| C::<T>::from_rational(q)))?;
    let mut edges = vec![TowerEdge {
        source: 2,
        target: 1,
        direction: Direction::Forward,
        exact: true,
        step_level: 2,
        splitting: canon.factors().iter().map(repr_q).collect(),
        delta: PolyRepr::Exact(format!("{:?}", down.delta)),
        l: down.l.iter().map(repr_q).collect(),
        kernel: KernelDescription { on_level: 2, generators: canon.factors().iter().map(repr_q).collect() },
        chart: "identity".into(),
        status: status(&e21, true, KernelSide::Source, opts, 1)?,
    }];
    let mut numeric = vec![e21];
    let mut fallbacks = Vec::new();
    let mut avoid: Vec<Partition<T>> = vec![partition_of(&numeric[0].split.factors().to_vec())?];
    let mut cur_exact: Option<Poly<Rational>> = Some(c2.f().clone());
    let mut cur_num: Poly<C<T>> = poly_q(c2.f());
    for n in 2..depth {
        let mut exact_step = None;
        if opts.mode == TowerMode::Exact {
            match &cur_exact {
                Some(fe) => match pick_exact::<T>(fe, opts.strategy, &avoid) {
                    Ok(s) => exact_step = Some((fe.clone(), s)),
                    Err(e) => fallbacks.push(format!("level {}: {e}; continuing in floating point", n + 1)),
                },
                None => {}
            }
        }
        let (edge, next_exact, exact_split, exact_out) = match exact_step {
            Some((fe, s)) => {
                let out = richelot_transform(&HyperCurve::new(fe.clone())?, &s)?;
                let (next, root) = match out.image.degree() {
                    5 => (Some(out.image.f().clone()), None),
                    _ => match rational_root(out.image.f()) {
                        Some(r) => (Some(recenter_at_root(out.image.f(), r.clone())), Some(r)),
                        None => {
                            fallbacks.push(format!("level {}: image sextic has no rational root", n + 1));
                            (None, None)
                        }
                    },
                };
                let e = NumEdge::with_chart_root(
                    poly_q(&fe),
                    s.map(|q| C::<T>::from_rational(q)),
                    root.as_ref().map(|r| C::<T>::from_rational(r)),
                )?;
                (e, next, Some(s), Some(out))
            }
            None => {
                let (e, _) = choose_splitting_separated(&cur_num, &avoid).map_err(|e| match e {
                    Error::NoSplitting(m) => Error::NoSplitting(format!("level {n}: {m}")),
                    e => e,
                })?;
                (e, None, None, None)
            }
        };
        let level = n + 1;
        let squarefree = exact_out.is_some() || numeric_squarefree(&edge.target);
        let st = status(&edge, squarefree, KernelSide::Target, opts, n)?;
        let splitting: Vec<PolyRepr> = match &exact_split {
            Some(s) => s.factors().iter().map(repr_q).collect(),
            None => edge.split.factors().iter().map(repr_n).collect(),
        };
        nodes[n - 1].splitting = Some(splitting.clone());
        let (delta, l) = match &exact_out {
            Some(o) => (PolyRepr::Exact(format!("{:?}", o.delta)), o.l.iter().map(repr_q).collect::<Vec<_>>()),
            None => (repr_n(&Poly::constant(edge.rich.delta)), edge.rich.l.iter().map(repr_n).collect()),
        };
        let node = match &next_exact {
            Some(f) => exact_node(level, f, format!("exact Richelot image of level {n}, {}", chart_text(&edge))),
            None => TowerNode {
                level,
                curve: repr_n(&edge.target),
                exact_coeffs: None,
                splitting: None,
                provenance: format!("floating-point Richelot image of level {n}, {}", chart_text(&edge)),
                igusa_absolute: igusa_numeric(&edge.target),
            },
        };
        nodes.push(node);
        edges.push(TowerEdge {
            source: level,
            target: n,
            direction: Direction::Dual,
            exact: exact_out.is_some(),
            step_level: n,
            splitting,
            delta,
            kernel: KernelDescription { on_level: level, generators: l.clone() },
            l,
            chart: chart_text(&edge),
            status: st,
        });
        avoid = vec![backtrack_partition(&edge)?];
        cur_num = match &next_exact {
            Some(f) => poly_q(f),
            None => edge.target.clone(),
        };
        cur_exact = next_exact;
        numeric.push(edge);
    }
    Ok(Tower { h: h.clone(), i2: i2.clone(), options: opts.clone(), nodes, edges, numeric, fallbacks })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerParams {
    #[serde(rename = "H")]
    pub h: Rational,
    #[serde(rename = "I2")]
    pub i2: Rational,
    pub depth: usize,
    pub mode: TowerMode,
    pub strategy: Strategy,
    pub precision_bits: u32,
    pub mult2_samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerReport {
    pub params: TowerParams,
    pub nodes: Vec<TowerNode>,
    pub edges: Vec<TowerEdge>,
    pub fallbacks: Vec<String>,
    /// No two consecutive levels share their absolute Igusa invariants.
    pub consecutive_distinct: bool,
    pub all_verified: bool,
}

fn invariants_differ(a: &Option<Vec<[f64; 2]>>, b: &Option<Vec<[f64; 2]>>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => a.iter().zip(b).any(|(x, y)| {
            let d = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
            d > 1e-6 * (1.0 + x[0].hypot(x[1]))
        }),
        _ => true,
    }
}

pub fn tower_report<T: Real>(t: &Tower<T>) -> TowerReport {
    TowerReport {
        params: TowerParams {
            h: t.h.clone(),
            i2: t.i2.clone(),
            depth: t.nodes.len(),
            mode: t.options.mode,
            strategy: t.options.strategy,
            precision_bits: T::BITS,
            mult2_samples: t.options.mult2_samples,
            seed: t.options.seed,
        },
        nodes: t.nodes.clone(),
        edges: t.edges.clone(),
        fallbacks: t.fallbacks.clone(),
        consecutive_distinct: t.nodes.windows(2).all(|w| invariants_differ(&w[0].igusa_absolute, &w[1].igusa_absolute)),
        all_verified: t.edges.iter().all(|e| e.status.verified),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genus2::{dual_splitting, richelot_split};
    use crate::igusa::isomorphic_over_closure;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn exact_opts() -> TowerOptions {
        TowerOptions { mode: TowerMode::Exact, strategy: Strategy::LexicographicExact, mult2_samples: 3, ..Default::default() }
    }

    #[test]
    fn matchings_start_with_neighbours() {
        let m = matchings(6);
        assert_eq!(m.len(), 15);
        assert_eq!(m[0], vec![(0, 1), (2, 3), (4, 5)]);
    }

    #[test]
    fn depth_two_is_the_canonical_pair() {
        let t = build_tower::<f64>(&q(1, 1), &q(2, 1), 2, &exact_opts()).unwrap();
        assert_eq!(t.nodes.len(), 2);
        assert_eq!(t.nodes[0].exact_coeffs.as_deref(), Some(curve_c1(&q(1, 1), &q(2, 1)).unwrap().f().coeffs()));
        assert_eq!(t.nodes[1].exact_coeffs.as_deref(), Some(curve_c2(&q(1, 1), &q(2, 1)).unwrap().0.f().coeffs()));
        let e = &t.edges[0];
        assert!(matches!(&e.delta, PolyRepr::Exact(d) if d == "1" || d == "-1"), "{:?}", e.delta);
        assert!(e.status.verified, "{:?}", e.status);
        assert!(t.nodes[1].provenance.contains("twist -1"), "{}", t.nodes[1].provenance);
        let r = tower_report(&t);
        let text = serde_json::to_string(&r).unwrap();
        let back: TowerReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        assert!(r.consecutive_distinct);
    }

    #[test]
    fn depth_one_is_refused() {
        assert_eq!(build_tower::<f64>(&q(1, 1), &q(2, 1), 1, &exact_opts()).unwrap_err(), Error::TowerDepth(1));
        assert!(matches!(build_tower::<f64>(&q(1, 1), &q(2, 1), 17, &exact_opts()), Err(Error::TowerDepthCap(17, 16))));
        assert!(matches!(build_tower::<f64>(&q(1, 2), &q(1, 1), 3, &exact_opts()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn real_numeric_depth_five() {
        let opts = TowerOptions { mult2_samples: 3, ..Default::default() };
        let t = build_tower::<DoubleDouble>(&q(3, 2), &q(5, 1), 5, &opts).unwrap();
        assert_eq!(t.nodes.len(), 5);
        assert_eq!(t.edges.len(), 4);
        for e in &t.edges {
            assert!(e.status.verified, "{e:?}");
        }
        assert!(tower_report(&t).consecutive_distinct);
    }

    #[test]
    fn exact_mode_falls_back_when_no_rational_splitting() {
        let t = build_tower::<DoubleDouble>(&q(1, 1), &q(2, 1), 3, &exact_opts()).unwrap();
        assert_eq!(t.fallbacks.len(), 1, "{:?}", t.fallbacks);
        assert!(!t.edges[1].exact);
        assert!(t.edges[1].status.verified, "{:?}", t.edges[1].status);
    }

    #[test]
    fn canonical_splitting_is_recognized() {
        let (c, s) = curve_c2(&q(3, 2), &q(5, 1)).unwrap();
        assert_eq!(choose_splitting(c.f(), Strategy::LexicographicExact).unwrap(), s);
    }

    #[test]
    fn sorted_pairing_keeps_reality() {
        // roots −2, −1, 0, 1, 2 and infinity
        let f = Poly::from_ints(&[0, 4, 0, -5, 0, 1]);
        let s = choose_splitting(&f, Strategy::PairedRealRoots).unwrap();
        let want = [Poly::from_ints(&[2, 3, 1]), Poly::from_ints(&[0, -1, 1]), Poly::from_ints(&[-2, 1])];
        for w in want {
            assert!(s.factors().iter().any(|g| g.monic() == w), "{s:?}");
        }
        // one conjugate pair: x(x² + 1)(x − 1)(x − 2)
        let f = &(&Poly::from_ints(&[0, 1, 0, 1]) * &Poly::from_ints(&[-1, 1])) * &Poly::from_ints(&[-2, 1]);
        let (e, part) = choose_splitting_numeric(&poly_q::<f64>(&f), &[]).unwrap();
        assert!(e.split.factors().iter().any(|g| abs(g.coeff(0) - C::new(1.0, 0.0)) < 1e-12 && g.deg() == Some(2)));
        assert_eq!(part.len(), 3);
    }

    #[test]
    fn double_step_returns_to_the_start() {
        let f = Poly::from_ints(&[0, 4, 0, -5, 0, 1]);
        let s = choose_splitting(&f, Strategy::LexicographicExact).unwrap();
        let out = richelot_split(&s).unwrap();
        let back = richelot_split(&dual_splitting(&out)).unwrap();
        let start = HyperCurve::new(f).unwrap();
        assert!(isomorphic_over_closure(&start, &back.image).unwrap());
    }
}
