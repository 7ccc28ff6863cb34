//! Red/blue macro-tiles: the density recursion, its explicit expansion on toy
//! schedules, a β scheduler chasing a right-enumerable target, and the entropy
//! of the shift with every red tile doubled.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fixpoint::{skeleton_tiles, ZoomSchedule};
use crate::solver::count_patterns;
use crate::wang::{Tile, TileSet};

pub use crate::solver::{transfer_entropy_bounds, EntropyBounds};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedBlueParams {
    pub schedule: ZoomSchedule,
    /// Red corner side per level, `alpha[k - 1]` for level `k`.
    pub alpha: Vec<u64>,
    /// Blue corner side per level.
    pub beta: Vec<u64>,
    /// Diversification-slot cells per level; half red (rounded up), half blue.
    /// Missing entries mean no slots.
    pub slots: Vec<u64>,
}

impl RedBlueParams {
    pub fn constant(schedule: ZoomSchedule, alpha: u64, beta: u64, levels: u32) -> RedBlueParams {
        RedBlueParams { schedule, alpha: vec![alpha; levels as usize], beta: vec![beta; levels as usize], slots: vec![] }
    }

    fn level(&self, k: u32) -> Result<Level> {
        let i = (k - 1) as usize;
        let (Some(&a), Some(&b)) = (self.alpha.get(i), self.beta.get(i)) else {
            return Err(Error::Validation(format!("no corner sizes for level {k}")));
        };
        let s = self.slots.get(i).copied().unwrap_or(0);
        let n = self.schedule.n_u64(k).ok_or_else(|| Error::Sizing(format!("N_{k} does not fit 64 bits")))?;
        Level::new(k, n, a, b, s)
    }
}

/// Cell counts of one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Level {
    n: u64,
    alpha: u64,
    beta: u64,
    slots: u64,
}

impl Level {
    fn new(k: u32, n: u64, alpha: u64, beta: u64, slots: u64) -> Result<Level> {
        if alpha == 0 || beta == 0 {
            return Err(Error::Validation(format!("level {k}: both corners must be nonempty (α={alpha}, β={beta})")));
        }
        if alpha + beta >= n {
            return Err(Error::Validation(format!("level {k}: corners {alpha}+{beta} do not fit N={n}")));
        }
        let area = n as u128 * n as u128;
        if (alpha as u128).pow(2) + (beta as u128).pow(2) + slots as u128 > area {
            return Err(Error::Validation(format!("level {k}: {slots} slot cells do not fit")));
        }
        Ok(Level { n, alpha, beta, slots })
    }

    fn red_slots(&self) -> u64 {
        self.slots.div_ceil(2)
    }

    /// `(red, blue)` cell counts of a red and of a blue macro-tile.
    fn counts(&self) -> ([BigUint; 2], [BigUint; 2]) {
        let sq = |v: u64| BigUint::from(v) * BigUint::from(v);
        let (rs, bs) = (BigUint::from(self.red_slots()), BigUint::from(self.slots / 2));
        let area = sq(self.n);
        let s = BigUint::from(self.slots);
        let red = [&area - sq(self.beta) - &s + &rs, sq(self.beta) + &bs];
        let blue = [sq(self.alpha) + &rs, &area - sq(self.alpha) - &s + &bs];
        (red, blue)
    }

    fn area(&self) -> BigUint {
        BigUint::from(self.n) * BigUint::from(self.n)
    }
}

/// Fractions of red cells in red and blue macro-tiles of one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityPair {
    pub red: BigRational,
    pub blue: BigRational,
}

impl DensityPair {
    pub fn ground() -> DensityPair {
        DensityPair { red: BigRational::one(), blue: BigRational::zero() }
    }

    pub fn as_f64(&self) -> (f64, f64) {
        (self.red.to_f64().unwrap_or(f64::NAN), self.blue.to_f64().unwrap_or(f64::NAN))
    }

    fn step(&self, l: &Level) -> DensityPair {
        let big = |v: &BigUint| BigRational::from_integer(BigInt::from(v.clone()));
        let area = big(&l.area());
        let (red, blue) = l.counts();
        let mix = |c: &[BigUint; 2]| (big(&c[0]) * &self.red + big(&c[1]) * &self.blue) / &area;
        DensityPair { red: mix(&red), blue: mix(&blue) }
    }
}

/// `ν_R(j), ν_B(j)` for `j = 0 ..= k`, exactly.
pub fn density_recursion(params: &RedBlueParams, k: u32) -> Result<Vec<DensityPair>> {
    let mut out = vec![DensityPair::ground()];
    for j in 1..=k {
        let l = params.level(j)?;
        let next = out[out.len() - 1].step(&l);
        out.push(next);
    }
    Ok(out)
}

/// Fully expanded red/blue map, row-major with `y = 0` at the bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorMap {
    pub side: usize,
    pub red: Vec<bool>,
}

impl ColorMap {
    pub fn is_red(&self, x: usize, y: usize) -> bool {
        self.red[y * self.side + x]
    }

    pub fn red_count(&self) -> usize {
        self.red.iter().filter(|&&r| r).count()
    }

    pub fn density(&self) -> BigRational {
        BigRational::new(BigInt::from(self.red_count()), BigInt::from(self.red.len()))
    }

    /// Colors swapped and the map turned by a half turn.
    pub fn dual(&self) -> ColorMap {
        ColorMap { side: self.side, red: self.red.iter().rev().map(|r| !r).collect() }
    }

    /// `[[a, b], [c, d]]` with `a` bottom-left, all of equal side.
    pub fn quad(parts: [&ColorMap; 4]) -> ColorMap {
        let s = parts[0].side;
        let side = 2 * s;
        let mut red = vec![false; side * side];
        for (i, p) in parts.iter().enumerate() {
            let (ox, oy) = ((i % 2) * s, (i / 2) * s);
            for y in 0..s {
                for x in 0..s {
                    red[(oy + y) * side + ox + x] = p.is_red(x, y);
                }
            }
        }
        ColorMap { side, red }
    }
}

const MAX_EXPANSION: u64 = 1 << 26;

/// Color of cell `(x, y)` of a level macro-tile; `None` for cells that inherit
/// the macro-tile's color. Slot cells are the first non-corner cells in row-major
/// order, alternating red and blue.
fn cell_rule(l: &Level, x: u64, y: u64) -> Option<bool> {
    let n = l.n;
    if x < l.alpha && y < l.alpha {
        return Some(true);
    }
    if x >= n - l.beta && y >= n - l.beta {
        return Some(false);
    }
    if l.slots == 0 {
        return None;
    }
    let idx = y * n + x;
    let corners_before = |limit: u64| -> u64 {
        // corner cells with row-major index below `limit`
        let mut c = 0;
        for yy in 0..n {
            let row0 = yy * n;
            if row0 >= limit {
                break;
            }
            let upto = (limit - row0).min(n);
            if yy < l.alpha {
                c += upto.min(l.alpha);
            }
            if yy >= n - l.beta {
                c += upto.saturating_sub(n - l.beta);
            }
        }
        c
    };
    let rank = idx - corners_before(idx);
    (rank < l.slots).then_some(rank % 2 == 0)
}

/// Explicit map of a level-`k` macro-tile of the given color, side `L_k`.
pub fn expand_colors(params: &RedBlueParams, k: u32, red: bool) -> Result<ColorMap> {
    let side = params
        .schedule
        .l_u64(k)
        .filter(|&s| s.checked_mul(s).map_or(false, |a| a <= MAX_EXPANSION))
        .ok_or_else(|| Error::Sizing(format!("level-{k} map exceeds {MAX_EXPANSION} cells")))?;
    let levels: Vec<Level> = (1..=k).map(|j| params.level(j)).collect::<Result<_>>()?;
    let side = side as usize;
    let mut map = vec![false; side * side];
    for y in 0..side {
        for x in 0..side {
            // walk down from the top level
            let mut color = red;
            let (mut cx, mut cy) = (x as u64, y as u64);
            let mut block = side as u64;
            for l in levels.iter().rev() {
                block /= l.n;
                let (bx, by) = (cx / block, cy / block);
                if let Some(c) = cell_rule(l, bx, by) {
                    color = c;
                }
                cx %= block;
                cy %= block;
            }
            map[y * side + x] = color;
        }
    }
    Ok(ColorMap { side, red: map })
}

/// Right-enumerable real: approximations from above, indexed by budget.
#[derive(Clone)]
pub struct ReEnumerator(Arc<dyn Fn(u64) -> BigRational + Send + Sync>);

impl std::fmt::Debug for ReEnumerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ReEnumerator")
    }
}

impl ReEnumerator {
    pub fn new(f: impl Fn(u64) -> BigRational + Send + Sync + 'static) -> ReEnumerator {
        ReEnumerator(Arc::new(f))
    }

    pub fn constant(h: BigRational) -> ReEnumerator {
        ReEnumerator::new(move |_| h.clone())
    }

    /// The listed values, then the last one forever.
    pub fn from_list(values: Vec<BigRational>) -> Result<ReEnumerator> {
        if values.is_empty() {
            return Err(Error::Input("empty approximation list".into()));
        }
        Ok(ReEnumerator::new(move |i| values[(i as usize).min(values.len() - 1)].clone()))
    }

    /// Least value seen up to `budget`, so the stream is non-increasing.
    pub fn approx(&self, budget: u64) -> BigRational {
        (0..=budget).map(|i| (self.0)(i)).min().expect("nonempty range")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaStep {
    pub level: u32,
    pub approx: BigRational,
    pub beta: u64,
    pub beta_max: u64,
    pub density: DensityPair,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetaTrajectory {
    pub alpha: u64,
    pub steps: Vec<BetaStep>,
    /// First level where the contraction of `ν_R − ν_B` alone guarantees an
    /// error below `tolerance` (when the target sits between the densities).
    pub predicted_level: Option<u32>,
    pub tolerance: f64,
}

impl BetaTrajectory {
    pub fn errors(&self, h: &BigRational) -> Vec<f64> {
        self.steps.iter().map(|s| (&s.density.red - h).to_f64().unwrap_or(f64::NAN).abs()).collect()
    }
}

fn ratio(a: &BigRational) -> f64 {
    a.to_f64().unwrap_or(f64::NAN)
}

/// Chooses `β_k ∈ [1, max(1, ⌊N_k/10⌋)]` level by level. With `a = α²/N²`,
/// `b = β²/N²` held fixed the pair converges to `(aν_R + bν_B)/(a + b)`; the
/// scheduler picks the `β` whose limit is nearest the current approximation
/// of `h`, i.e. `b ≈ a(ν_R − h)/(h − ν_B)`. Targets at or above `ν_R` give the
/// least `β`, targets at or below `ν_B` the largest.
pub fn beta_schedule(h: &ReEnumerator, schedule: ZoomSchedule, alpha: u64, k_max: u32, tolerance: f64) -> Result<BetaTrajectory> {
    let mut cur = DensityPair::ground();
    let mut steps = Vec::new();
    let mut gap_bound = 1.0f64;
    let mut predicted = None;
    for k in 1..=k_max {
        let n = schedule.n_u64(k).ok_or_else(|| Error::Sizing(format!("N_{k} does not fit 64 bits")))?;
        let beta_max = (n / 10).max(1);
        let t = h.approx(k as u64);
        let beta = if t >= cur.red {
            1
        } else if t <= cur.blue {
            beta_max
        } else {
            let a = (alpha as f64 / n as f64).powi(2);
            let b = a * ratio(&(&cur.red - &t)) / ratio(&(&t - &cur.blue));
            ((n as f64 * b.sqrt()).round() as u64).clamp(1, beta_max)
        };
        let l = Level::new(k, n, alpha, beta, 0)?;
        cur = cur.step(&l);
        gap_bound *= 1.0 - ((alpha * alpha + beta * beta) as f64) / (n as f64 * n as f64);
        if predicted.is_none() && gap_bound < tolerance && cur.blue <= t && t <= cur.red {
            predicted = Some(k);
        }
        steps.push(BetaStep { level: k, approx: t, beta, beta_max, density: cur.clone() });
    }
    Ok(BetaTrajectory { alpha, steps, predicted_level: predicted, tolerance })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubledEntropy {
    pub entropy: f64,
    /// `(k, log2(#level-k macro-tiles) / L_k²)` with the count bounded by two
    /// colors times every choice of four borders of `L_k` edge colors.
    pub boundary_bounds: Vec<(u32, f64)>,
}

/// Entropy of the shift with each red tile doubled: the red density `d`, the
/// hierarchy contributing only the boundary term listed alongside.
pub fn doubled_entropy(d: &BigRational, schedule: ZoomSchedule, colors: u32, k_max: u32) -> Result<DoubledEntropy> {
    if d < &BigRational::zero() || d > &BigRational::one() {
        return Err(Error::Validation(format!("density {d} outside [0, 1]")));
    }
    let bits = (colors.max(2) as f64).log2();
    let mut bounds = Vec::new();
    for k in 1..=k_max {
        let l = schedule.l(k).to_f64().unwrap_or(f64::INFINITY);
        bounds.push((k, (1.0 + 4.0 * l * bits) / (l * l)));
    }
    Ok(DoubledEntropy { entropy: ratio(d), boundary_bounds: bounds })
}

/// Coordinate tiles of a torus of the map's side, with every red cell's tile
/// duplicated.
pub fn doubled_tileset(map: &ColorMap) -> Result<TileSet> {
    let n = map.side as u32;
    let base = skeleton_tiles(n)?;
    let extra: Vec<(Tile, Option<&str>)> = (0..n * n)
        .filter(|&t| map.is_red((t % n) as usize, (t / n) as usize))
        .map(|t| (*base.tile(t), Some("red-copy")))
        .collect();
    base.with_extra_tiles("doubled", &extra)
}

/// `log2(#side×side patterns) / side²` of [`doubled_tileset`].
pub fn doubled_pattern_density(map: &ColorMap, budget: u64) -> Result<f64> {
    let ts = doubled_tileset(map)?;
    let count = count_patterns(&ts, map.side, budget)?;
    let log = count.bits() as f64 - 1.0 + {
        // fractional part from the leading 53 bits
        let shift = count.bits().saturating_sub(53);
        let top = (&count >> shift).to_f64().unwrap_or(1.0);
        top.log2() - (top.log2().floor())
    };
    Ok(log / (map.side * map.side) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn toy(n: u64, levels: u32) -> RedBlueParams {
        RedBlueParams::constant(ZoomSchedule::Constant { n }, 1, 1, levels)
    }

    #[test]
    fn toy_recursion_values() {
        let d = density_recursion(&toy(3, 3), 3).unwrap();
        assert_eq!(d[1], DensityPair { red: q(8, 9), blue: q(1, 9) });
        assert_eq!(d[2].red, q(65, 81));
        for (k, p) in d.iter().enumerate() {
            let closed = q(1, 2) + q(7i64.pow(k as u32), 9i64.pow(k as u32)) / q(2, 1);
            assert_eq!(p.red, closed);
            assert_eq!(&p.red + &p.blue, BigRational::one());
        }
    }

    #[test]
    fn empty_corners_rejected() {
        let bad = RedBlueParams::constant(ZoomSchedule::Constant { n: 3 }, 0, 0, 1);
        assert!(matches!(density_recursion(&bad, 1), Err(Error::Validation(_))));
        let wide = RedBlueParams::constant(ZoomSchedule::Constant { n: 3 }, 2, 1, 1);
        assert!(matches!(density_recursion(&wide, 1), Err(Error::Validation(_))));
        assert!(density_recursion(&toy(3, 1), 2).is_err());
    }

    #[test]
    fn expansion_matches_recursion() {
        for n in [3u64, 5] {
            let p = toy(n, 3);
            let d = density_recursion(&p, 3).unwrap();
            for k in 1..=3 {
                let r = expand_colors(&p, k, true).unwrap();
                let b = expand_colors(&p, k, false).unwrap();
                assert_eq!(r.density(), d[k as usize].red, "n={n} k={k}");
                assert_eq!(b.density(), d[k as usize].blue);
                assert_eq!(b, r.dual());
            }
        }
        let r1 = expand_colors(&toy(3, 1), 1, true).unwrap();
        assert_eq!(r1.red_count(), 8);
        assert!(!r1.is_red(2, 2));
        assert_eq!(expand_colors(&toy(3, 2), 2, true).unwrap().red_count(), 65);
    }

    #[test]
    fn slots_enter_both_sides() {
        let mut p = RedBlueParams::constant(ZoomSchedule::Constant { n: 7 }, 1, 2, 2);
        p.slots = vec![5, 3];
        let d = density_recursion(&p, 2).unwrap();
        for k in 1..=2 {
            assert_eq!(expand_colors(&p, k, true).unwrap().density(), d[k as usize].red);
            assert_eq!(expand_colors(&p, k, false).unwrap().density(), d[k as usize].blue);
        }
        p.slots = vec![60, 0];
        assert!(density_recursion(&p, 1).is_err());
    }

    #[test]
    fn oversized_expansion() {
        let p = RedBlueParams::constant(ZoomSchedule::Doubly { c: 2 }, 1, 1, 3);
        assert!(matches!(expand_colors(&p, 3, true), Err(Error::Sizing(_))));
        assert!(density_recursion(&p, 3).is_ok());
    }

    #[test]
    fn scheduler_half() {
        let h = q(1, 2);
        let t = beta_schedule(&ReEnumerator::constant(h.clone()), ZoomSchedule::Constant { n: 3 }, 1, 24, 0.01).unwrap();
        let e = t.errors(&h);
        assert!(e.windows(2).all(|w| w[1] <= w[0]));
        let k = t.predicted_level.unwrap() as usize;
        assert!(e[k - 1] < 0.01, "level {k}: {}", e[k - 1]);
        let wide = beta_schedule(&ReEnumerator::constant(q(3, 10)), ZoomSchedule::Constant { n: 60 }, 2, 40, 0.01).unwrap();
        assert!(wide.steps.iter().any(|s| s.beta > 1));
        assert!(wide.steps.iter().all(|s| (1..=6).contains(&s.beta)));
    }

    #[test]
    fn scheduler_chases_a_stream() {
        // 1, 3/4, 5/8, ... down to 1/2 + 2^-i
        let h = ReEnumerator::new(|i| q(1, 2) + q(1, 2i64.pow(i.min(30) as u32 + 1)));
        let t = beta_schedule(&h, ZoomSchedule::Constant { n: 40 }, 1, 60, 0.01).unwrap();
        assert!(t.steps.windows(2).all(|w| w[1].density.red <= w[0].density.red));
        let zero = beta_schedule(&ReEnumerator::constant(q(0, 1)), ZoomSchedule::Doubly { c: 2 }, 1, 4, 0.01).unwrap();
        assert!(zero.steps.iter().all(|s| s.beta == s.beta_max));
        assert_eq!(zero.steps.iter().map(|s| s.beta_max).collect::<Vec<_>>(), vec![1, 8, 656, 4304672]);
    }

    #[test]
    fn doubled_entropy_values() {
        let z = ZoomSchedule::Constant { n: 3 };
        assert_eq!(doubled_entropy(&q(0, 1), z, 4, 3).unwrap().entropy, 0.0);
        assert_eq!(doubled_entropy(&q(1, 1), z, 4, 3).unwrap().entropy, 1.0);
        assert!(doubled_entropy(&q(3, 2), z, 4, 3).is_err());
        for s in [z, ZoomSchedule::Constant { n: 5 }, ZoomSchedule::Doubly { c: 2 }] {
            let b = doubled_entropy(&q(1, 2), s, 4, 4).unwrap().boundary_bounds;
            assert!(b.windows(2).all(|w| w[1].1 < w[0].1));
        }
    }

    #[test]
    fn doubled_pattern_count_near_half() {
        let p = toy(3, 2);
        let (r, b) = (expand_colors(&p, 2, true).unwrap(), expand_colors(&p, 2, false).unwrap());
        let map = ColorMap::quad([&r, &b, &b, &r]);
        assert_eq!(map.density(), q(1, 2));
        let d = doubled_pattern_density(&map, 50_000_000).unwrap();
        // 324 placements times 2^162 choices
        let exact = (162.0 + 324f64.log2()) / 324.0;
        assert!((d - exact).abs() < 1e-9, "{d} vs {exact}");
        assert!((d - 0.5).abs() < 0.05);
    }

    proptest! {
        #[test]
        fn symmetric_corners_conserve(n in 3u64..9, a in 1u64..3, k in 1u32..4) {
            prop_assume!(2 * a < n);
            let d = density_recursion(&RedBlueParams::constant(ZoomSchedule::Constant { n }, a, a, k), k).unwrap();
            for p in &d {
                prop_assert_eq!(&p.red + &p.blue, BigRational::one());
                prop_assert!(p.red >= BigRational::zero() && p.red <= BigRational::one());
            }
        }
    }
}
