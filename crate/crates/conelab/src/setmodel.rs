//! Finite-sample models of subsets F ⊂ Rⁿ with exact nearest-distance queries.
//!
//! A [`SampledSet`] is a point cloud together with a resolution δ: within the
//! region of interest, every point of the intended set lies within δ of some
//! sample. Distance queries are exact minima over the samples (a k-d tree is
//! used above 5,000 points, exhaustive scan below), so the only modelling
//! error downstream estimators see is the δ gap between the samples and the
//! intended set.
//!
//! The module also houses the generator catalog: sequence sets, curves,
//! graphs of functions and the surface examples used by the classifier
//! acceptance corpus. Sequence sets are sampled exactly (all terms above a
//! cutoff, plus the limit point); curves and surfaces are sampled with
//! quasi-uniform spacing so the declared δ is certified by construction.

use serde::{Deserialize, Serialize};

use crate::error::{ConelabError, Result};

/// Point count below which queries scan all samples instead of the k-d tree.
const EXHAUSTIVE_LIMIT: usize = 5000;

/// Maximum number of points in a k-d tree leaf.
const LEAF_SIZE: usize = 32;

/// Region of interest: estimates are certified only for base points and
/// query scales inside this ball.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Region {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Region {
    pub fn centered_at_origin(dim: usize, radius: f64) -> Self {
        Self {
            center: vec![0.0; dim],
            radius,
        }
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        s += d * d;
    }
    s
}

#[derive(Debug, Clone)]
enum KdNode {
    Leaf {
        start: u32,
        end: u32,
    },
    Split {
        axis: u32,
        value: f64,
        left: u32,
        right: u32,
    },
}

/// Static k-d tree over sample indices; exact nearest and range queries.
#[derive(Debug, Clone)]
struct KdTree {
    ids: Vec<u32>,
    nodes: Vec<KdNode>,
    root: u32,
}

impl KdTree {
    fn build(coords: &[f64], dim: usize) -> Self {
        let count = coords.len() / dim;
        let mut ids: Vec<u32> = (0..count as u32).collect();
        let mut nodes = Vec::new();
        let root = Self::build_range(coords, dim, &mut ids, 0, count, &mut nodes);
        Self { ids, nodes, root }
    }

    fn build_range(
        coords: &[f64],
        dim: usize,
        ids: &mut [u32],
        start: usize,
        end: usize,
        nodes: &mut Vec<KdNode>,
    ) -> u32 {
        let len = end - start;
        if len <= LEAF_SIZE {
            nodes.push(KdNode::Leaf {
                start: start as u32,
                end: end as u32,
            });
            return (nodes.len() - 1) as u32;
        }
        // Split on the axis with the widest spread over this segment.
        let mut axis = 0;
        let mut best_spread = -1.0;
        for a in 0..dim {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &id in &ids[start..end] {
                let c = coords[id as usize * dim + a];
                lo = lo.min(c);
                hi = hi.max(c);
            }
            if hi - lo > best_spread {
                best_spread = hi - lo;
                axis = a;
            }
        }
        let mid = start + len / 2;
        ids[start..end].select_nth_unstable_by(len / 2, |&p, &q| {
            let cp = coords[p as usize * dim + axis];
            let cq = coords[q as usize * dim + axis];
            cp.partial_cmp(&cq).expect("finite coordinates")
        });
        let value = coords[ids[mid] as usize * dim + axis];
        let left = Self::build_range(coords, dim, ids, start, mid, nodes);
        let right = Self::build_range(coords, dim, ids, mid, end, nodes);
        nodes.push(KdNode::Split {
            axis: axis as u32,
            value,
            left,
            right,
        });
        (nodes.len() - 1) as u32
    }

    fn nearest(&self, coords: &[f64], dim: usize, x: &[f64]) -> (u32, f64) {
        let mut best_id = self.ids[0];
        let mut best_d2 = f64::INFINITY;
        self.nearest_rec(self.root, coords, dim, x, &mut best_id, &mut best_d2);
        (best_id, best_d2.sqrt())
    }

    fn nearest_rec(
        &self,
        node: u32,
        coords: &[f64],
        dim: usize,
        x: &[f64],
        best_id: &mut u32,
        best_d2: &mut f64,
    ) {
        match self.nodes[node as usize] {
            KdNode::Leaf { start, end } => {
                for &id in &self.ids[start as usize..end as usize] {
                    let p = &coords[id as usize * dim..(id as usize + 1) * dim];
                    let d2 = dist2(p, x);
                    if d2 < *best_d2 {
                        *best_d2 = d2;
                        *best_id = id;
                    }
                }
            }
            KdNode::Split {
                axis,
                value,
                left,
                right,
            } => {
                let dx = x[axis as usize] - value;
                let (near, far) = if dx < 0.0 { (left, right) } else { (right, left) };
                self.nearest_rec(near, coords, dim, x, best_id, best_d2);
                if dx * dx < *best_d2 {
                    self.nearest_rec(far, coords, dim, x, best_id, best_d2);
                }
            }
        }
    }

    fn within(&self, coords: &[f64], dim: usize, x: &[f64], rho: f64, out: &mut Vec<u32>) {
        self.within_rec(self.root, coords, dim, x, rho, rho * rho, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn within_rec(
        &self,
        node: u32,
        coords: &[f64],
        dim: usize,
        x: &[f64],
        rho: f64,
        rho2: f64,
        out: &mut Vec<u32>,
    ) {
        match self.nodes[node as usize] {
            KdNode::Leaf { start, end } => {
                for &id in &self.ids[start as usize..end as usize] {
                    let p = &coords[id as usize * dim..(id as usize + 1) * dim];
                    if dist2(p, x) <= rho2 {
                        out.push(id);
                    }
                }
            }
            KdNode::Split {
                axis,
                value,
                left,
                right,
            } => {
                let dx = x[axis as usize] - value;
                if dx - rho <= 0.0 {
                    self.within_rec(left, coords, dim, x, rho, rho2, out);
                }
                if dx + rho >= 0.0 {
                    self.within_rec(right, coords, dim, x, rho, rho2, out);
                }
            }
        }
    }
}

/// A finite sample of a subset of Rⁿ with resolution metadata and a spatial
/// index for exact nearest-distance queries.
#[derive(Debug, Clone)]
pub struct SampledSet {
    dim: usize,
    coords: Vec<f64>,
    delta: f64,
    region: Region,
    generator_id: Option<String>,
    /// Domain dimension for graph-of-function sets: the first `graph_split`
    /// coordinates are the domain, the rest the codomain.
    graph_split: Option<usize>,
    /// Declared (not inferred) local-compactness flag for classifier theorems.
    locally_compact: bool,
    /// Matrix side length when points are flattened n×n matrices.
    matrix_shape: Option<usize>,
    index: Option<KdTree>,
}

impl SampledSet {
    /// Build a set from flat coordinates (`coords.len() == dim * count`).
    pub fn new(dim: usize, coords: Vec<f64>, delta: f64, region: Region) -> Result<Self> {
        if dim == 0 || coords.is_empty() {
            return Err(ConelabError::EmptySet);
        }
        if coords.len() % dim != 0 {
            return Err(ConelabError::DimensionMismatch(dim, coords.len()));
        }
        if !(delta > 0.0) {
            return Err(ConelabError::Config(format!("delta must be > 0, got {delta}")));
        }
        if region.center.len() != dim {
            return Err(ConelabError::DimensionMismatch(dim, region.center.len()));
        }
        let index = if coords.len() / dim > EXHAUSTIVE_LIMIT {
            Some(KdTree::build(&coords, dim))
        } else {
            None
        };
        Ok(Self {
            dim,
            coords,
            delta,
            region,
            generator_id: None,
            graph_split: None,
            locally_compact: true,
            matrix_shape: None,
            index,
        })
    }

    /// Build from a list of point rows.
    pub fn from_points(points: &[Vec<f64>], delta: f64, region: Region) -> Result<Self> {
        if points.is_empty() {
            return Err(ConelabError::EmptySet);
        }
        let dim = points[0].len();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(ConelabError::DimensionMismatch(dim, p.len()));
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords, delta, region)
    }

    pub fn with_generator_id(mut self, id: impl Into<String>) -> Self {
        self.generator_id = Some(id.into());
        self
    }

    pub fn with_graph_split(mut self, domain_dim: usize) -> Self {
        self.graph_split = Some(domain_dim);
        self
    }

    pub fn with_locally_compact(mut self, flag: bool) -> Self {
        self.locally_compact = flag;
        self
    }

    pub fn with_matrix_shape(mut self, n: usize) -> Self {
        self.matrix_shape = Some(n);
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn generator_id(&self) -> Option<&str> {
        self.generator_id.as_deref()
    }

    pub fn graph_split(&self) -> Option<usize> {
        self.graph_split
    }

    pub fn locally_compact(&self) -> bool {
        self.locally_compact
    }

    pub fn matrix_shape(&self) -> Option<usize> {
        self.matrix_shape
    }

    /// Coordinates of sample `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Exact minimum distance from x to the sample set.
    pub fn dist_query(&self, x: &[f64]) -> f64 {
        self.nearest(x).1
    }

    /// Index and distance of the nearest sample to x.
    pub fn nearest(&self, x: &[f64]) -> (usize, f64) {
        assert_eq!(x.len(), self.dim, "query dimension mismatch");
        match &self.index {
            Some(tree) => {
                let (id, d) = tree.nearest(&self.coords, self.dim, x);
                (id as usize, d)
            }
            None => {
                let mut best = (0, f64::INFINITY);
                for i in 0..self.len() {
                    let d2 = dist2(self.point(i), x);
                    if d2 < best.1 {
                        best = (i, d2);
                    }
                }
                (best.0, best.1.sqrt())
            }
        }
    }

    /// Indices of all samples within distance ρ of x, ascending.
    pub fn neighbors_within(&self, x: &[f64], rho: f64) -> Vec<usize> {
        assert_eq!(x.len(), self.dim, "query dimension mismatch");
        assert!(rho >= 0.0, "radius must be non-negative");
        let mut out: Vec<u32> = Vec::new();
        match &self.index {
            Some(tree) => tree.within(&self.coords, self.dim, x, rho, &mut out),
            None => {
                let rho2 = rho * rho;
                for i in 0..self.len() {
                    if dist2(self.point(i), x) <= rho2 {
                        out.push(i as u32);
                    }
                }
            }
        }
        // k-d tree traversal order depends on the split layout; sort for a
        // deterministic, layout-independent result.
        out.sort_unstable();
        out.into_iter().map(|i| i as usize).collect()
    }
}

/// JSON point-cloud exchange format: {"dim": n, "delta": δ, "points": [[...]]}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointCloud {
    pub dim: usize,
    pub delta: f64,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_split: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_shape: Option<usize>,
}

impl PointCloud {
    pub fn into_sampled_set(self) -> Result<SampledSet> {
        let region = self.region.clone().unwrap_or_else(|| {
            // Default region: centroid plus covering radius of the samples.
            let dim = self.points.first().map(|p| p.len()).unwrap_or(0);
            let mut center = vec![0.0; dim];
            for p in &self.points {
                for (c, v) in center.iter_mut().zip(p) {
                    *c += v;
                }
            }
            for c in &mut center {
                *c /= self.points.len().max(1) as f64;
            }
            let radius = self
                .points
                .iter()
                .map(|p| dist2(p, &center).sqrt())
                .fold(0.0, f64::max)
                .max(1.0);
            Region { center, radius }
        });
        let mut set = SampledSet::from_points(&self.points, self.delta, region)?;
        if let Some(split) = self.graph_split {
            set = set.with_graph_split(split);
        }
        if let Some(shape) = self.matrix_shape {
            set = set.with_matrix_shape(shape);
        }
        Ok(set)
    }

    pub fn from_sampled_set(set: &SampledSet) -> Self {
        Self {
            dim: set.ambient_dim(),
            delta: set.delta(),
            points: (0..set.len()).map(|i| set.point(i).to_vec()).collect(),
            region: Some(set.region().clone()),
            graph_split: set.graph_split(),
            matrix_shape: set.matrix_shape(),
        }
    }
}

/// Closed-form 1-D sequence rules for sequence sets and the ratio-test corpus.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum SequenceRule {
    /// c / m
    Harmonic { c: f64 },
    /// 1 / (m + a)
    HarmonicShift { a: f64 },
    /// 1 / m!
    FactorialReciprocal,
    /// r^m with 0 < r < 1
    Geometric { r: f64 },
    /// 1 / (m · ln(m+1)^p)
    HarmonicLog { p: f64 },
    /// 1 / (m + sqrt(m))
    HarmonicSqrt,
    /// (m + 1) / m²
    HarmonicPlus,
    /// 1 / m^p
    Power { p: f64 },
    /// 1 / fib(m)
    FibonacciReciprocal,
    /// m / 2^m (decreasing from m = 2)
    MOver2M,
}

impl SequenceRule {
    /// Term x_m for m ≥ 1.
    pub fn term(&self, m: usize) -> f64 {
        let mf = m as f64;
        match self {
            SequenceRule::Harmonic { c } => c / mf,
            SequenceRule::HarmonicShift { a } => 1.0 / (mf + a),
            SequenceRule::FactorialReciprocal => {
                let mut f = 1.0;
                for k in 2..=m {
                    f *= k as f64;
                }
                1.0 / f
            }
            SequenceRule::Geometric { r } => r.powi(m as i32),
            SequenceRule::HarmonicLog { p } => 1.0 / (mf * (mf + 1.0).ln().powf(*p)),
            SequenceRule::HarmonicSqrt => 1.0 / (mf + mf.sqrt()),
            SequenceRule::HarmonicPlus => (mf + 1.0) / (mf * mf),
            SequenceRule::Power { p } => mf.powf(-p),
            SequenceRule::FibonacciReciprocal => {
                let (mut a, mut b) = (1.0_f64, 1.0_f64);
                for _ in 2..m {
                    let c = a + b;
                    a = b;
                    b = c;
                }
                1.0 / b
            }
            SequenceRule::MOver2M => mf / 2.0_f64.powi(m as i32),
        }
    }

    /// Terms m = m_start ..= m_max, positive and strictly decreasing.
    pub fn terms(&self, m_start: usize, m_max: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(m_max.saturating_sub(m_start) + 1);
        let mut prev = f64::INFINITY;
        for m in m_start..=m_max {
            let t = self.term(m);
            if t <= 0.0 || t >= prev {
                break;
            }
            out.push(t);
            prev = t;
        }
        out
    }
}

/// Declarative set generator, serializable as JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// Points given verbatim.
    ExplicitPoints {
        delta: f64,
        points: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        region: Option<Region>,
    },
    /// {0} ∪ {x_m : m ≤ m_max} on the line (terms from a closed-form rule).
    Sequence1d {
        rule: SequenceRule,
        m_max: usize,
        /// Mirror the terms to the negative half-line as well.
        #[serde(default)]
        symmetric: bool,
    },
    /// A named parametric curve sampled at arc spacing 2δ.
    ParametricCurve {
        name: String,
        delta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        extent: Option<f64>,
    },
    /// Graph {(x, f(x))} of a named 1-D function sampled at arc spacing 2δ.
    GraphOfFunction {
        function: String,
        delta: f64,
        xmin: f64,
        xmax: f64,
    },
    /// A named implicit surface with a dedicated sampler.
    ImplicitSampler {
        name: String,
        delta: f64,
    },
    /// Cartesian product of two generated sets.
    Product {
        first: Box<GeneratorSpec>,
        second: Box<GeneratorSpec>,
        /// Upper bound on the number of product points.
        #[serde(default = "default_budget")]
        sample_budget: usize,
    },
    /// Union of generated sets in a common ambient dimension.
    Union { parts: Vec<GeneratorSpec> },
    /// A catalog entry by name.
    Catalog {
        name: String,
        #[serde(default)]
        params: ExampleParams,
    },
}

fn default_budget() -> usize {
    1_000_000
}

/// Optional overrides for catalog generators.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExampleParams {
    /// Sampling resolution override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Sequence cutoff override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    /// Extent override (half-line length, curve parameter range, graph span).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,
    /// Ambient dimension override where meaningful.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<SampledSet> {
        match self {
            GeneratorSpec::ExplicitPoints {
                delta,
                points,
                region,
            } => {
                let cloud = PointCloud {
                    dim: points.first().map(|p| p.len()).unwrap_or(0),
                    delta: *delta,
                    points: points.clone(),
                    region: region.clone(),
                    graph_split: None,
                    matrix_shape: None,
                };
                cloud.into_sampled_set()
            }
            GeneratorSpec::Sequence1d {
                rule,
                m_max,
                symmetric,
            } => build_sequence_set(rule, *m_max, *symmetric),
            GeneratorSpec::ParametricCurve {
                name,
                delta,
                extent,
            } => build_curve(name, *delta, *extent),
            GeneratorSpec::GraphOfFunction {
                function,
                delta,
                xmin,
                xmax,
            } => build_graph(function, *delta, *xmin, *xmax),
            GeneratorSpec::ImplicitSampler { name, delta } => build_implicit(name, *delta),
            GeneratorSpec::Product {
                first,
                second,
                sample_budget,
            } => build_product(&first.build()?, &second.build()?, *sample_budget),
            GeneratorSpec::Union { parts } => {
                let sets: Result<Vec<SampledSet>> = parts.iter().map(|p| p.build()).collect();
                build_union(&sets?)
            }
            GeneratorSpec::Catalog { name, params } => build_example(name, params),
        }
    }
}

fn build_sequence_set(rule: &SequenceRule, m_max: usize, symmetric: bool) -> Result<SampledSet> {
    let terms = rule.terms(1, m_max);
    if terms.is_empty() {
        return Err(ConelabError::EmptySet);
    }
    let mut coords = vec![0.0];
    for &t in &terms {
        coords.push(t);
        if symmetric {
            coords.push(-t);
        }
    }
    // The unsampled tail x_m for m > m_max lies within the last kept term of
    // the limit-point sample at 0.
    let tail = *terms.last().expect("non-empty");
    let delta = tail.max(f64::MIN_POSITIVE);
    SampledSet::new(1, coords, delta, Region::centered_at_origin(1, 1.0))
}

/// Sample a parametric curve t ↦ γ(t) over [t0, t1] with consecutive sample
/// spacing at most 2δ (so coverage radius ≤ δ), adapting the parameter step
/// to the local speed.
fn sample_curve(
    gamma: impl Fn(f64) -> Vec<f64>,
    t0: f64,
    t1: f64,
    delta: f64,
    coords: &mut Vec<f64>,
) {
    debug_assert!(t1 > t0);
    let step_target = 2.0 * delta;
    let mut t = t0;
    let mut p = gamma(t);
    coords.extend_from_slice(&p);
    let h0 = (t1 - t0) * 1e-9;
    while t < t1 {
        // Estimate local speed with a forward difference and step so the
        // chord stays under 2δ; halve on overshoot.
        let probe = gamma(t + h0);
        let speed = (dist2(&probe, &p).sqrt() / h0).max(1e-12);
        let mut dt = (step_target / speed).min(t1 - t);
        let mut q = gamma(t + dt);
        while dist2(&q, &p).sqrt() > step_target && dt > 1e-15 * (t1 - t0) {
            dt *= 0.5;
            q = gamma(t + dt);
        }
        t += dt;
        p = q;
        coords.extend_from_slice(&p);
    }
}

fn build_curve(name: &str, delta: f64, extent: Option<f64>) -> Result<SampledSet> {
    let mut coords: Vec<f64> = Vec::new();
    let (region, generator): (Region, String) = match name {
        "circle" => {
            let n = ((std::f64::consts::PI / delta).ceil() as usize).max(8);
            for k in 0..n {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                coords.push(a.cos());
                coords.push(a.sin());
            }
            (Region::centered_at_origin(2, 1.1), "circle".into())
        }
        "cusp-y3x2" => {
            // y³ = x², parametrized (t³, t²); both branches through the origin.
            let tmax = extent.unwrap_or(0.7);
            sample_curve(|t| vec![t * t * t, t * t], -tmax, tmax, delta, &mut coords);
            (Region::centered_at_origin(2, 0.3), "cusp-y3x2".into())
        }
        "t-sin-1-over-t" => {
            // {(t, t·sin(1/t)) : t ≠ 0} ∪ {(0,0)}, both signs of t. Points with
            // |t| ≤ δ/√2 are within δ of the origin sample and are skipped.
            let tmax = extent.unwrap_or(0.13);
            let tmin = delta / std::f64::consts::SQRT_2;
            coords.push(0.0);
            coords.push(0.0);
            let f = |t: f64| vec![t, t * (1.0 / t).sin()];
            sample_curve(f, tmin, tmax, delta, &mut coords);
            sample_curve(f, -tmax, -tmin, delta, &mut coords);
            (Region::centered_at_origin(2, 0.1), "t-sin-1-over-t".into())
        }
        "half-line" => {
            let len = extent.unwrap_or(1.2);
            let n = (len / (2.0 * delta)).ceil() as usize;
            for k in 0..=n {
                coords.push(len * k as f64 / n as f64);
            }
            let region = Region::centered_at_origin(1, 1.0);
            let set = SampledSet::new(1, coords, delta, region)?.with_generator_id("half-line");
            return Ok(set);
        }
        "two-parabolas" => {
            // (y − x²)(y − 2x²) = 0 over |x| ≤ extent.
            let xmax = extent.unwrap_or(0.6);
            sample_curve(|x| vec![x, x * x], -xmax, xmax, delta, &mut coords);
            sample_curve(|x| vec![x, 2.0 * x * x], -xmax, xmax, delta, &mut coords);
            (Region::centered_at_origin(2, 0.3), "two-parabolas".into())
        }
        other => return Err(ConelabError::UnknownCatalog(other.to_string())),
    };
    Ok(SampledSet::new(2, coords, delta, region)?.with_generator_id(generator))
}

/// Named 1-D test functions for graph sets.
pub fn named_function(name: &str) -> Result<fn(f64) -> f64> {
    Ok(match name {
        "x2" => |x: f64| x * x,
        "sin" => f64::sin,
        "abs" => f64::abs,
        "x23" => |x: f64| x.abs().powf(2.0 / 3.0),
        other => return Err(ConelabError::UnknownCatalog(format!("function {other}"))),
    })
}

/// Analytic derivative of a named function where it exists.
pub fn named_function_derivative(name: &str, x: f64) -> Result<f64> {
    Ok(match name {
        "x2" => 2.0 * x,
        "sin" => x.cos(),
        "abs" => {
            if x == 0.0 {
                f64::NAN
            } else {
                x.signum()
            }
        }
        "x23" => {
            if x == 0.0 {
                f64::NAN
            } else {
                2.0 / 3.0 * x.signum() * x.abs().powf(-1.0 / 3.0)
            }
        }
        other => return Err(ConelabError::UnknownCatalog(format!("function {other}"))),
    })
}

fn build_graph(function: &str, delta: f64, xmin: f64, xmax: f64) -> Result<SampledSet> {
    let f = named_function(function)?;
    let mut coords = Vec::new();
    sample_curve(|x| vec![x, f(x)], xmin, xmax, delta, &mut coords);
    let radius = xmax.abs().max(xmin.abs()) * 2.0;
    let set = SampledSet::new(2, coords, delta, Region::centered_at_origin(2, radius))?
        .with_generator_id(format!("graph-{function}"))
        .with_graph_split(1);
    Ok(set)
}

/// Spherical Fibonacci lattice of n points on the radius-r sphere.
fn fibonacci_sphere(n: usize, r: f64, coords: &mut Vec<f64>) {
    let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
    for k in 0..n {
        let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
        let phi = 2.0 * std::f64::consts::PI * (k as f64 / golden).fract();
        let s = (1.0 - z * z).max(0.0).sqrt();
        coords.push(r * s * phi.cos());
        coords.push(r * s * phi.sin());
        coords.push(r * z);
    }
}

fn build_implicit(name: &str, delta: f64) -> Result<SampledSet> {
    let mut coords: Vec<f64> = Vec::new();
    match name {
        "sphere" => {
            // Mean lattice spacing sqrt(4π/n) = δ; lattice coverage radius is
            // below 0.76·spacing, so the declared δ is certified.
            let n = ((4.0 * std::f64::consts::PI / (delta * delta)).ceil() as usize).max(64);
            fibonacci_sphere(n, 1.0, &mut coords);
            let set = SampledSet::new(3, coords, delta, Region::centered_at_origin(3, 1.1))?
                .with_generator_id("sphere");
            Ok(set)
        }
        "pinched-torus" => {
            // (x²+y²+z²)² = 4(x²+y²): the circle of radius 1 centered at
            // distance 1 from the z-axis, swept around the z-axis; it pinches
            // to a point at the origin. Chart: ρ = 1−cos u, z = sin u.
            let h = delta * std::f64::consts::SQRT_2;
            let nu = (2.0 * std::f64::consts::PI / h).ceil() as usize;
            for iu in 0..nu {
                let u = 2.0 * std::f64::consts::PI * iu as f64 / nu as f64;
                let rho = 1.0 - u.cos();
                let z = u.sin();
                let ring = 2.0 * std::f64::consts::PI * rho;
                let nv = ((ring / h).ceil() as usize).max(1);
                for iv in 0..nv {
                    let v = 2.0 * std::f64::consts::PI * iv as f64 / nv as f64;
                    coords.push(rho * v.cos());
                    coords.push(rho * v.sin());
                    coords.push(z);
                }
            }
            let set = SampledSet::new(3, coords, delta, Region::centered_at_origin(3, 2.2))?
                .with_generator_id("pinched-torus");
            Ok(set)
        }
        "concentric-spheres" => {
            // {x : ‖x‖ = 0 or 1/‖x‖ ∈ N}. Spheres of radius 1/j are sampled
            // individually while consecutive radii differ by more than δ;
            // below that the union is δ-dense in a ball, which is sampled as
            // a solid grid.
            let mut j = 1usize;
            loop {
                let r = 1.0 / j as f64;
                let gap = r - 1.0 / (j as f64 + 1.0);
                if gap <= delta || r <= 4.0 * delta {
                    break;
                }
                let n = ((4.0 * std::f64::consts::PI * r * r / (delta * delta)).ceil() as usize)
                    .max(32);
                fibonacci_sphere(n, r, &mut coords);
                j += 1;
            }
            let ball_r = 1.0 / j as f64;
            let h = 2.0 * delta / 3.0_f64.sqrt();
            let m = (ball_r / h).ceil() as i64;
            for ix in -m..=m {
                for iy in -m..=m {
                    for iz in -m..=m {
                        let p = [ix as f64 * h, iy as f64 * h, iz as f64 * h];
                        if p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= ball_r * ball_r {
                            coords.extend_from_slice(&p);
                        }
                    }
                }
            }
            let set = SampledSet::new(3, coords, delta, Region::centered_at_origin(3, 1.1))?
                .with_generator_id("concentric-spheres");
            Ok(set)
        }
        "box-2d" => {
            // Filled unit square [−0.5, 0.5]², interior-point control case.
            let h = delta * std::f64::consts::SQRT_2;
            let m = (0.5 / h).ceil() as i64;
            for ix in -m..=m {
                for iy in -m..=m {
                    coords.push(ix as f64 * h);
                    coords.push(iy as f64 * h);
                }
            }
            let set = SampledSet::new(2, coords, delta, Region::centered_at_origin(2, 0.7))?
                .with_generator_id("box-2d");
            Ok(set)
        }
        other => Err(ConelabError::UnknownCatalog(other.to_string())),
    }
}

fn build_product(a: &SampledSet, b: &SampledSet, budget: usize) -> Result<SampledSet> {
    let total = a.len().saturating_mul(b.len());
    if total > budget {
        return Err(ConelabError::Config(format!(
            "product would generate {total} points, budget {budget}"
        )));
    }
    let dim = a.ambient_dim() + b.ambient_dim();
    let mut coords = Vec::with_capacity(total * dim);
    for i in 0..a.len() {
        for j in 0..b.len() {
            coords.extend_from_slice(a.point(i));
            coords.extend_from_slice(b.point(j));
        }
    }
    let mut center = a.region().center.clone();
    center.extend_from_slice(&b.region().center);
    let radius = (a.region().radius.powi(2) + b.region().radius.powi(2)).sqrt();
    // Product coverage: offsets in the two factors combine orthogonally.
    let delta = (a.delta().powi(2) + b.delta().powi(2)).sqrt();
    SampledSet::new(dim, coords, delta, Region { center, radius })
}

fn build_union(parts: &[SampledSet]) -> Result<SampledSet> {
    let first = parts.first().ok_or(ConelabError::EmptySet)?;
    let dim = first.ambient_dim();
    let mut coords = Vec::new();
    let mut delta: f64 = 0.0;
    let mut radius: f64 = 0.0;
    for set in parts {
        if set.ambient_dim() != dim {
            return Err(ConelabError::DimensionMismatch(dim, set.ambient_dim()));
        }
        for i in 0..set.len() {
            coords.extend_from_slice(set.point(i));
        }
        delta = delta.max(set.delta());
        let shift = dist2(&set.region().center, &first.region().center).sqrt();
        radius = radius.max(shift + set.region().radius);
    }
    SampledSet::new(
        dim,
        coords,
        delta,
        Region {
            center: first.region().center.clone(),
            radius,
        },
    )
}

/// Names of the built-in example catalog.
pub const CATALOG: &[&str] = &[
    "singleton",
    "factorial-sequence",
    "harmonic-sequence",
    "half-line",
    "symmetric-harmonic",
    "factorial-plus-harmonic",
    "t-sin-1-over-t",
    "ray-plus-diagonal-sequence",
    "cusp-y3x2",
    "two-parabolas",
    "circle",
    "sphere",
    "pinched-torus",
    "concentric-spheres",
    "graph-of-custom-function",
    "box-2d",
];

/// Default sequence cutoff for harmonic-type sets: the tail bound 1/(m+1)
/// stays below the resolution needed by a 10-step default scale ladder.
const DEFAULT_HARMONIC_M_MAX: usize = 45_000;

/// Build a catalog set by name.
pub fn build_example(name: &str, params: &ExampleParams) -> Result<SampledSet> {
    match name {
        "singleton" => {
            let n = params.n.unwrap_or(1);
            let set = SampledSet::new(
                n,
                vec![0.0; n],
                params.delta.unwrap_or(1e-9),
                Region::centered_at_origin(n, 1.0),
            )?;
            Ok(set.with_generator_id("singleton"))
        }
        "factorial-sequence" => {
            let set = build_sequence_set(
                &SequenceRule::FactorialReciprocal,
                params.m_max.unwrap_or(12),
                false,
            )?;
            Ok(set.with_generator_id("factorial-sequence"))
        }
        "harmonic-sequence" => {
            let set = build_sequence_set(
                &SequenceRule::Harmonic { c: 1.0 },
                params.m_max.unwrap_or(DEFAULT_HARMONIC_M_MAX),
                false,
            )?;
            Ok(set.with_generator_id("harmonic-sequence"))
        }
        "half-line" => build_curve("half-line", params.delta.unwrap_or(1e-5), params.extent),
        "symmetric-harmonic" => {
            let set = build_sequence_set(
                &SequenceRule::Harmonic { c: 1.0 },
                params.m_max.unwrap_or(DEFAULT_HARMONIC_M_MAX),
                true,
            )?;
            Ok(set.with_generator_id("symmetric-harmonic"))
        }
        "factorial-plus-harmonic" => {
            // {0} ∪ {1/m!} ∪ {−1/m}.
            let fact = SequenceRule::FactorialReciprocal.terms(1, params.m_max.unwrap_or(12));
            let harm = SequenceRule::Harmonic { c: 1.0 }
                .terms(1, params.m_max.unwrap_or(DEFAULT_HARMONIC_M_MAX).max(1000));
            let mut coords = vec![0.0];
            coords.extend(fact.iter().copied());
            coords.extend(harm.iter().map(|t| -t));
            let delta = harm.last().copied().unwrap_or(1e-9);
            let set = SampledSet::new(1, coords, delta, Region::centered_at_origin(1, 1.0))?;
            Ok(set.with_generator_id("factorial-plus-harmonic"))
        }
        "t-sin-1-over-t" => build_curve(
            "t-sin-1-over-t",
            params.delta.unwrap_or(1e-5),
            params.extent,
        ),
        "ray-plus-diagonal-sequence" => {
            // {(t, −t) : t < 0} ∪ {(1/m, 1/m) : m ∈ N} ∪ {0}.
            let ray_delta = 2e-6;
            let m_max = params.m_max.unwrap_or(20_000);
            let mut coords = vec![0.0, 0.0];
            let tmax = 0.12;
            let n = (tmax * std::f64::consts::SQRT_2 / (2.0 * ray_delta)).ceil() as usize;
            for k in 1..=n {
                let t = -tmax * k as f64 / n as f64;
                coords.push(t);
                coords.push(-t);
            }
            for m in 1..=m_max {
                let t = 1.0 / m as f64;
                coords.push(t);
                coords.push(t);
            }
            // Diagonal tail bound √2/(m_max+1) dominates the declared δ.
            let delta = std::f64::consts::SQRT_2 / (m_max as f64 + 1.0);
            let set = SampledSet::new(2, coords, delta, Region::centered_at_origin(2, 0.08))?;
            Ok(set.with_generator_id("ray-plus-diagonal-sequence"))
        }
        "cusp-y3x2" => build_curve("cusp-y3x2", params.delta.unwrap_or(1e-5), params.extent),
        "two-parabolas" => build_curve("two-parabolas", params.delta.unwrap_or(1e-5), params.extent),
        "circle" => build_curve("circle", params.delta.unwrap_or(1e-5), None),
        "sphere" => build_implicit("sphere", params.delta.unwrap_or(2.5e-3)),
        "pinched-torus" => build_implicit("pinched-torus", params.delta.unwrap_or(3.6e-3)),
        "concentric-spheres" => build_implicit("concentric-spheres", params.delta.unwrap_or(4e-3)),
        "graph-of-custom-function" => {
            let extent = params.extent.unwrap_or(0.5);
            build_graph("x2", params.delta.unwrap_or(1e-4), -extent, extent)
        }
        "box-2d" => build_implicit("box-2d", params.delta.unwrap_or(2e-3)),
        other => Err(ConelabError::UnknownCatalog(other.to_string())),
    }
}

/// Build a named graph set (used by the strict-differentiability tests).
pub fn build_graph_example(function: &str, delta: f64, xmin: f64, xmax: f64) -> Result<SampledSet> {
    build_graph(function, delta, xmin, xmax)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dist_query_singleton() {
        let set = build_example("singleton", &ExampleParams::default()).unwrap();
        assert!((set.dist_query(&[3.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn dist_query_factorial_sequence_hits_half() {
        // 1/2! = 0.5 is a sample, so the distance from 0.5 is 0.
        let set = build_example("factorial-sequence", &ExampleParams::default()).unwrap();
        assert!(set.dist_query(&[0.5]) < 1e-15);
    }

    #[test]
    fn dist_query_circle_matches_analytic() {
        let set = build_example(
            "circle",
            &ExampleParams {
                delta: Some(1e-3),
                ..Default::default()
            },
        )
        .unwrap();
        // dist((2,0), circle) = 1 up to the sampling resolution.
        assert!((set.dist_query(&[2.0, 0.0]) - 1.0).abs() < 1e-3);
        assert!((set.dist_query(&[0.0, 0.25]) - 0.75).abs() < 1e-3);
    }

    #[test]
    fn dist_query_zero_on_samples() {
        let set = build_example("two-parabolas", &ExampleParams::default()).unwrap();
        for i in (0..set.len()).step_by(9173) {
            let p = set.point(i).to_vec();
            assert_eq!(set.dist_query(&p), 0.0);
        }
    }

    #[test]
    fn dist_query_triangle_inequality() {
        let set = build_example(
            "circle",
            &ExampleParams {
                delta: Some(1e-3),
                ..Default::default()
            },
        )
        .unwrap();
        let pairs = [
            ([0.3, 0.1], [0.9, -0.4]),
            ([1.5, 1.5], [-0.2, 0.7]),
            ([0.0, 0.0], [2.0, 0.0]),
        ];
        for (x, y) in pairs {
            let lhs = (set.dist_query(&x) - set.dist_query(&y)).abs();
            assert!(lhs <= dist2(&x, &y).sqrt() + 1e-12);
        }
    }

    #[test]
    fn neighbors_within_factorial() {
        let set = build_example("factorial-sequence", &ExampleParams::default()).unwrap();
        let ids = set.neighbors_within(&[0.0], 0.6);
        // {0, 1/2, 1/6, ..., 1/12!}: everything except the sample at 1.
        assert_eq!(ids.len(), set.len() - 1);
        for &i in &ids {
            assert!(set.point(i)[0] <= 0.6);
        }
    }

    #[test]
    fn neighbors_within_kd_tree_matches_exhaustive() {
        let set = build_example(
            "circle",
            &ExampleParams {
                delta: Some(1e-4),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(set.len() > EXHAUSTIVE_LIMIT);
        let x = [1.0, 0.0];
        let rho = 0.1;
        let got = set.neighbors_within(&x, rho);
        let mut expect = Vec::new();
        for i in 0..set.len() {
            if dist2(set.point(i), &x).sqrt() <= rho {
                expect.push(i);
            }
        }
        assert_eq!(got, expect);
    }

    #[test]
    fn nearest_kd_tree_matches_exhaustive() {
        let set = build_example(
            "two-parabolas",
            &ExampleParams {
                delta: Some(2e-5),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(set.len() > EXHAUSTIVE_LIMIT);
        for q in [
            [0.1, 0.3],
            [-0.2, 0.05],
            [0.0, 1.0],
            [0.5, 0.5],
            [-0.61, 0.7],
        ] {
            let got = set.dist_query(&q);
            let mut best = f64::INFINITY;
            for i in 0..set.len() {
                best = best.min(dist2(set.point(i), &q).sqrt());
            }
            assert!((got - best).abs() < 1e-14);
        }
    }

    #[test]
    fn half_line_resolution_certified() {
        let set = build_example(
            "half-line",
            &ExampleParams {
                delta: Some(1e-4),
                ..Default::default()
            },
        )
        .unwrap();
        for k in 0..200 {
            let x = [1.2 * (k as f64 + 0.37) / 200.0];
            assert!(set.dist_query(&x) <= set.delta() + 1e-12);
        }
    }

    #[test]
    fn catalog_covers_required_names() {
        for name in CATALOG {
            let params = ExampleParams {
                // Keep surface sets small in this smoke test.
                delta: Some(match *name {
                    "sphere" | "pinched-torus" | "concentric-spheres" => 2e-2,
                    "box-2d" => 1e-2,
                    _ => 1e-3,
                }),
                ..Default::default()
            };
            let set = build_example(name, &params).unwrap();
            assert!(!set.is_empty(), "{name} is empty");
        }
    }

    #[test]
    fn unknown_catalog_name_errors() {
        assert!(matches!(
            build_example("not-a-set", &ExampleParams::default()),
            Err(ConelabError::UnknownCatalog(_))
        ));
    }

    #[test]
    fn generator_spec_roundtrip_json() {
        let spec = GeneratorSpec::Sequence1d {
            rule: SequenceRule::Harmonic { c: 1.0 },
            m_max: 100,
            symmetric: true,
        };
        let json = serde_json::to_string(&spec).unwrap();
        let back: GeneratorSpec = serde_json::from_str(&json).unwrap();
        let a = spec.build().unwrap();
        let b = back.build().unwrap();
        assert_eq!(a.len(), b.len());
    }

    #[test]
    fn union_and_product_compose() {
        let a = GeneratorSpec::ExplicitPoints {
            delta: 0.1,
            points: vec![vec![0.0], vec![1.0]],
            region: Some(Region::centered_at_origin(1, 2.0)),
        };
        let b = GeneratorSpec::ExplicitPoints {
            delta: 0.1,
            points: vec![vec![5.0]],
            region: Some(Region {
                center: vec![5.0],
                radius: 1.0,
            }),
        };
        let union = GeneratorSpec::Union {
            parts: vec![a.clone(), b.clone()],
        }
        .build()
        .unwrap();
        assert_eq!(union.len(), 3);
        let product = GeneratorSpec::Product {
            first: Box::new(a),
            second: Box::new(b),
            sample_budget: 100,
        }
        .build()
        .unwrap();
        assert_eq!(product.len(), 2);
        assert_eq!(product.ambient_dim(), 2);
    }

    #[test]
    fn sphere_sampling_certifies_delta() {
        let set = build_example(
            "sphere",
            &ExampleParams {
                delta: Some(0.05),
                ..Default::default()
            },
        )
        .unwrap();
        // Probe random-ish surface points; all must be within δ of a sample.
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        for k in 0..500 {
            let z = 1.0 - 2.0 * ((k as f64 * golden).fract());
            let phi = 6.0 * k as f64;
            let s = (1.0_f64 - z * z).max(0.0).sqrt();
            let p = [s * phi.cos(), s * phi.sin(), z];
            assert!(set.dist_query(&p) <= set.delta());
        }
    }

    #[test]
    fn point_cloud_roundtrip() {
        let set = build_example("factorial-sequence", &ExampleParams::default()).unwrap();
        let cloud = PointCloud::from_sampled_set(&set);
        let json = serde_json::to_string(&cloud).unwrap();
        let back: PointCloud = serde_json::from_str(&json).unwrap();
        let set2 = back.into_sampled_set().unwrap();
        assert_eq!(set.len(), set2.len());
        assert_eq!(set.delta(), set2.delta());
    }
}
