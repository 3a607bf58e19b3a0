//! Composite Gauss-Legendre quadrature aligned with the `eps`-cells of an
//! oscillating coefficient.
//!
//! Integrands of the form `g(x) a(x/eps)^{-1}` are analytic inside each cell
//! `[k eps, (k+1) eps]` (and inside each piece of a piecewise profile), so a
//! fixed-order Gauss rule applied per cell converges to machine precision.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Default number of nodes per cell.
pub const DEFAULT_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights on the reference interval `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Builds the `order`-point rule by Newton iteration on `P_order`.
    ///
    /// # Panics
    /// Panics if `order == 0`.
    pub fn new(order: usize) -> Self {
        assert!(order > 0, "quadrature order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        QuadratureRule { nodes, weights }
    }

    /// Shared order-16 rule.
    pub fn standard() -> &'static QuadratureRule {
        static RULE: OnceLock<QuadratureRule> = OnceLock::new();
        RULE.get_or_init(|| QuadratureRule::new(DEFAULT_ORDER))
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule once on `[lo, hi]`.
    #[inline]
    pub fn apply<G: Fn(f64) -> f64 + ?Sized>(&self, g: &G, lo: f64, hi: f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(mid + half * x);
        }
        acc * half
    }

    /// Maps the nodes onto `[lo, hi]` and returns `(points, scaled weights)`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss rule with `cells` equal sub-intervals.
pub fn integrate<G: Fn(f64) -> f64 + ?Sized>(
    g: &G,
    lo: f64,
    hi: f64,
    cells: usize,
    rule: &QuadratureRule,
) -> f64 {
    assert!(cells >= 1, "need at least one cell");
    let width = (hi - lo) / cells as f64;
    (0..cells)
        .map(|i| {
            let a = lo + i as f64 * width;
            let b = if i + 1 == cells { hi } else { lo + (i + 1) as f64 * width };
            rule.apply(g, a, b)
        })
        .sum()
}

/// Partition of the real line into `eps`-cells, optionally refined at fixed
/// offsets inside each cell (the kinks of a piecewise profile).
#[derive(Debug, Clone, PartialEq)]
pub struct CellGrid {
    eps: f64,
    offsets: Vec<f64>,
    extra: Vec<f64>,
}

impl CellGrid {
    pub fn new(eps: f64) -> Self {
        Self::with_offsets(eps, &[])
    }

    /// `offsets` are positions in `(0, 1)` relative to each cell.
    pub fn with_offsets(eps: f64, offsets: &[f64]) -> Self {
        assert!(eps > 0.0 && eps.is_finite(), "cell width must be positive");
        let mut all = vec![0.0];
        all.extend(offsets.iter().copied().filter(|o| *o > 0.0 && *o < 1.0));
        all.sort_by(f64::total_cmp);
        all.dedup();
        CellGrid {
            eps,
            offsets: all,
            extra: Vec::new(),
        }
    }

    /// Adds fixed absolute break points (e.g. jumps of the right-hand side).
    pub fn with_extra_points(mut self, points: &[f64]) -> Self {
        self.extra.extend_from_slice(points);
        self.extra.sort_by(f64::total_cmp);
        self.extra.dedup();
        self
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `lo`, every grid point strictly inside `(lo, hi)`, then `hi`.
    pub fn breaks(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = vec![lo];
        if hi > lo {
            let first = (lo / self.eps).floor() as i64 - 1;
            let last = (hi / self.eps).ceil() as i64 + 1;
            for k in first..=last {
                for o in &self.offsets {
                    let p = (k as f64 + o) * self.eps;
                    if p > lo && p < hi {
                        out.push(p);
                    }
                }
            }
            if !self.extra.is_empty() {
                out.extend(self.extra.iter().copied().filter(|p| *p > lo && *p < hi));
                out.sort_by(f64::total_cmp);
                out.dedup();
            }
        }
        out.push(hi);
        out
    }

    /// Gauss rule applied on every sub-interval of `[lo, hi]`.
    pub fn integrate<G: Fn(f64) -> f64 + ?Sized>(
        &self,
        g: &G,
        lo: f64,
        hi: f64,
        rule: &QuadratureRule,
    ) -> f64 {
        if hi == lo {
            return 0.0;
        }
        let (a, b, sign) = if hi > lo { (lo, hi, 1.0) } else { (hi, lo, -1.0) };
        let breaks = self.breaks(a, b);
        sign * breaks.windows(2).map(|w| rule.apply(g, w[0], w[1])).sum::<f64>()
    }
}

/// Integrates over `[lo, hi]` split at every multiple of `eps`.
pub fn integrate_eps_aligned<G: Fn(f64) -> f64 + ?Sized>(
    g: &G,
    eps: f64,
    lo: f64,
    hi: f64,
    order: usize,
) -> f64 {
    if order == DEFAULT_ORDER {
        CellGrid::new(eps).integrate(g, lo, hi, QuadratureRule::standard())
    } else {
        CellGrid::new(eps).integrate(g, lo, hi, &QuadratureRule::new(order))
    }
}

/// Table of `int_lo^x h` at every break of a [`CellGrid`] over `[lo, hi]`,
/// answering `int_lo^x h` with one partial-cell Gauss evaluation per query.
#[derive(Debug, Clone)]
pub struct PrefixIntegral<H> {
    integrand: H,
    breaks: Vec<f64>,
    cumulative: Vec<f64>,
    rule: &'static QuadratureRule,
}

impl<H: Fn(f64) -> f64> PrefixIntegral<H> {
    pub fn new(integrand: H, grid: &CellGrid, lo: f64, hi: f64) -> Self {
        let rule = QuadratureRule::standard();
        let breaks = grid.breaks(lo, hi);
        let mut cumulative = Vec::with_capacity(breaks.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in breaks.windows(2) {
            acc += rule.apply(&integrand, w[0], w[1]);
            cumulative.push(acc);
        }
        PrefixIntegral {
            integrand,
            breaks,
            cumulative,
            rule,
        }
    }

    /// Total integral over the table's domain.
    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// `int_lo^x h`; queries outside the domain extend the nearest cell.
    pub fn at(&self, x: f64) -> f64 {
        let j = self
            .breaks
            .partition_point(|b| *b <= x)
            .saturating_sub(1)
            .min(self.breaks.len() - 2);
        let left = self.breaks[j];
        if x == left {
            return self.cumulative[j];
        }
        self.cumulative[j] + self.rule.apply(&self.integrand, left, x)
    }

    pub fn integrand(&self) -> &H {
        &self.integrand
    }
}
