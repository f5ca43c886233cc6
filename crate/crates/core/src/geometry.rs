//! Vector primitives, projections and epsilon-nets on spheres and spherical
//! caps.
//!
//! Nets are built by randomized greedy packing: candidates are sampled from
//! the domain and kept iff they are more than `eps` away from every point
//! kept so far. A packing at separation `eps` covers the sampled region at
//! radius `eps`; the declared radius is `2 * eps` to absorb the slack of the
//! randomized stop rule.

use crate::error::{Error, Result};
use crate::rng::RandomSource;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Hard cap on net cardinality. Exceeding it is a configuration error: the
/// covering construction is intentionally exponential in dimension, and the
/// artifact must fail loudly rather than hang.
pub const NET_MAX_POINTS: usize = 1 << 20;

/// Greedy stop rule: terminate after this multiple of the current net size
/// in consecutive rejected candidates.
pub const NET_STOP_MULTIPLIER: usize = 200;

/// Cap sampling switches from rejection to tangent-space construction when
/// the cap probability falls below this threshold.
const CAP_REJECTION_MIN_PROB: f64 = 1e-3;

pub fn check_finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("non-finite vector entry".into()))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn scale(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| x * s).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// First standard basis vector in dimension `d`.
pub fn basis_vector(d: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

/// Euclidean projection onto the centered ball of the given radius.
///
/// Returns `v` unchanged when `||v|| <= radius`, else `v * radius / ||v||`.
pub fn project_to_ball(v: &[f64], radius: f64) -> Result<Vec<f64>> {
    check_finite(v)?;
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("ball radius must be positive, got {radius}")));
    }
    let n = norm(v);
    if n <= radius {
        Ok(v.to_vec())
    } else {
        Ok(scale(v, radius / n))
    }
}

/// Euclidean projection onto the unit sphere.
///
/// The zero vector (norm below 1e-12) projects to the first standard basis
/// vector: the minimizer is non-unique there and a deterministic tie-break
/// is required.
pub fn project_to_sphere(v: &[f64]) -> Result<Vec<f64>> {
    check_finite(v)?;
    let n = norm(v);
    if n <= 1e-12 {
        Ok(basis_vector(v.len(), 0))
    } else {
        Ok(scale(v, 1.0 / n))
    }
}

/// Uniform sample from the unit sphere `S^{d-1}`.
pub fn sample_uniform_sphere(rng: &mut RandomSource, d: usize) -> Vec<f64> {
    assert!(d >= 1, "sphere dimension must be >= 1");
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return scale(&v, 1.0 / n);
        }
    }
}

/// Uniform sample from the unit ball in dimension `d`.
pub fn sample_uniform_ball(rng: &mut RandomSource, d: usize) -> Vec<f64> {
    let u = sample_uniform_sphere(rng, d);
    let r: f64 = rng.gen::<f64>().powf(1.0 / d as f64);
    scale(&u, r)
}

/// Domain a net was built on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum NetDomain {
    /// Unit sphere `S^{d-1}`.
    Sphere,
    /// Spherical cap `{u in S^{d-1} : u . center >= zeta}`.
    Cap { center: Vec<f64>, zeta: f64 },
}

/// A finite point set covering its domain at the declared radius.
#[derive(Debug, Clone)]
pub struct Net {
    pub points: Vec<Vec<f64>>,
    /// Upper bound on the distance from any domain point to its nearest net
    /// point.
    pub radius: f64,
    pub domain: NetDomain,
}

impl Net {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from `v` to the nearest net point.
    pub fn nearest_distance(&self, v: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|p| dist(p, v))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Fraction of the sphere `S^{d-1}` lying in the cap `{u : u . c >= zeta}`,
/// computed by Simpson quadrature of `sin^{d-2}` over the polar angle.
pub fn cap_probability(d: usize, zeta: f64) -> f64 {
    assert!(d >= 2);
    let alpha = zeta.clamp(-1.0, 1.0).acos();
    let f = |phi: f64| phi.sin().powi(d as i32 - 2);
    let simpson = |a: f64, b: f64| {
        let n = 2000;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    simpson(0.0, alpha) / simpson(0.0, std::f64::consts::PI)
}

struct GreedyPacker {
    dim: usize,
    eps_sq: f64,
    keep_threshold: f64, // for unit vectors: reject iff dot > 1 - eps^2/2
    flat: Vec<f64>,
    count: usize,
}

impl GreedyPacker {
    fn new(dim: usize, eps: f64) -> Self {
        GreedyPacker {
            dim,
            eps_sq: eps * eps,
            keep_threshold: 1.0 - eps * eps / 2.0,
            flat: Vec::new(),
            count: 0,
        }
    }

    /// True iff the unit-vector candidate is > eps from all kept points.
    /// Uses `||u - v||^2 = 2 - 2 u.v` for unit vectors.
    fn accepts(&self, v: &[f64]) -> bool {
        let _ = self.eps_sq;
        for p in self.flat.chunks_exact(self.dim) {
            if dot(p, v) >= self.keep_threshold {
                return false;
            }
        }
        true
    }

    fn push(&mut self, v: &[f64]) {
        self.flat.extend_from_slice(v);
        self.count += 1;
    }

    fn into_points(self) -> Vec<Vec<f64>> {
        self.flat.chunks_exact(self.dim).map(|c| c.to_vec()).collect()
    }
}

fn build_net<F>(dim: usize, eps: f64, domain: NetDomain, mut sample: F) -> Result<Net>
where
    F: FnMut() -> Vec<f64>,
{
    if !(eps > 0.0) {
        return Err(Error::Config(format!("net eps must be positive, got {eps}")));
    }
    let mut packer = GreedyPacker::new(dim, eps);
    packer.push(&sample());
    let mut failures = 0usize;
    loop {
        let v = sample();
        if packer.accepts(&v) {
            if packer.count >= NET_MAX_POINTS {
                return Err(Error::Config(format!(
                    "net size cap of {NET_MAX_POINTS} points exceeded (eps = {eps}, dim = {dim})"
                )));
            }
            packer.push(&v);
            failures = 0;
        } else {
            failures += 1;
            if failures >= NET_STOP_MULTIPLIER * packer.count {
                break;
            }
        }
    }
    Ok(Net {
        points: packer.into_points(),
        radius: 2.0 * eps,
        domain,
    })
}

/// Greedy-packing net on the unit sphere `S^{d-1}`.
///
/// Requires `d >= 2`; `eps >= 2` degenerates to a single point, which is
/// allowed (the sphere diameter is 2).
pub fn build_net_sphere(d: usize, eps: f64, rng: &mut RandomSource) -> Result<Net> {
    if d < 2 {
        return Err(Error::Config(format!("sphere net needs d >= 2, got {d}")));
    }
    build_net(d, eps, NetDomain::Sphere, || sample_uniform_sphere(rng, d))
}

/// Samples a point of the cap `{u in S^{d-1} : u . center >= zeta}`.
///
/// Rejection sampling from the sphere when the cap probability exceeds 1e-3;
/// otherwise `cos(phi) * center + sin(phi) * tangent` with `phi` uniform in
/// the admissible range, which keeps the expected cost bounded for small
/// caps.
pub fn sample_cap(center: &[f64], zeta: f64, rng: &mut RandomSource) -> Vec<f64> {
    let d = center.len();
    let p = cap_probability(d, zeta);
    if p > CAP_REJECTION_MIN_PROB {
        loop {
            let u = sample_uniform_sphere(rng, d);
            if dot(&u, center) >= zeta {
                return u;
            }
        }
    } else {
        sample_cap_biased(center, zeta, rng)
    }
}

/// Samples from the cap with full support but a non-uniform (angle-uniform)
/// density: `cos(phi) center + sin(phi) tangent` with `phi` uniform in
/// `[0, acos zeta]`. O(1) per draw regardless of the cap size; used for net
/// construction, where coverage of the support is all that matters.
fn sample_cap_biased(center: &[f64], zeta: f64, rng: &mut RandomSource) -> Vec<f64> {
    let d = center.len();
    let alpha = zeta.clamp(-1.0, 1.0).acos();
    loop {
        let phi: f64 = rng.gen::<f64>() * alpha;
        let w = sample_uniform_sphere(rng, d);
        let proj = dot(&w, center);
        let tangent: Vec<f64> = w
            .iter()
            .zip(center)
            .map(|(wi, ci)| wi - proj * ci)
            .collect();
        let tn = norm(&tangent);
        if tn <= 1e-12 {
            continue;
        }
        return center
            .iter()
            .zip(&tangent)
            .map(|(ci, ti)| phi.cos() * ci + phi.sin() * ti / tn)
            .collect();
    }
}

/// Greedy-packing net on a spherical cap.
pub fn build_net_cap(
    center: &[f64],
    zeta: f64,
    eps: f64,
    rng: &mut RandomSource,
) -> Result<Net> {
    check_finite(center)?;
    let d = center.len();
    if d < 2 {
        return Err(Error::Config(format!("cap net needs d >= 2, got {d}")));
    }
    if (norm(center) - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("cap center must be a unit vector".into()));
    }
    if !(0.0 < zeta && zeta < 1.0) {
        return Err(Error::Domain(format!("cap zeta must be in (0,1), got {zeta}")));
    }
    let domain = NetDomain::Cap {
        center: center.to_vec(),
        zeta,
    };
    let center_owned = center.to_vec();
    build_net(d, eps, domain, || sample_cap_biased(&center_owned, zeta, rng))
}
