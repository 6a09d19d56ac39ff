//! Seeded generators of test functions, points and boxes.
//!
//! All randomness flows through [`ChaCha8Rng`], so a seed fixes every
//! generated expression across platforms.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::expr::{Expr, Point};
use crate::identities::PiconePair;
use crate::quadrature::BoxDomain;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest perturbation amplitude used by [`bump`].
pub const MAX_EPS: f64 = 0.3;

/// `Π_k (x_k−a_k)(b_k−x_k)`.
pub fn box_bubble(omega: &BoxDomain) -> Expr {
    Expr::product((1..=omega.dim()).map(|k| {
        Expr::mul(
            Expr::sub(Expr::var(k), Expr::Const(omega.lo(k))),
            Expr::sub(Expr::Const(omega.hi(k)), Expr::var(k)),
        )
    }))
}

/// `s(x) = Σ_j w_j sin(f_j x_{k_j} + φ_j)` with `Σ|w_j| = 1`, so `|s| ≤ 1`.
fn trig_perturbation<R: Rng>(n: usize, rng: &mut R) -> Expr {
    let terms = rng.gen_range(1..=3);
    let raw: Vec<f64> = (0..terms).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm: f64 = raw.iter().map(|w| w.abs()).sum::<f64>().max(1e-12);
    Expr::sum(raw.into_iter().map(|w| {
        let k = rng.gen_range(1..=n);
        let f = rng.gen_range(0.5..4.0);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        Expr::mul(
            Expr::Const(w / norm),
            Expr::sin(Expr::add(Expr::mul(Expr::Const(f), Expr::var(k)), Expr::Const(phi))),
        )
    }))
}

/// `Π_k (x_k−a_k)(b_k−x_k)·(1 + ε s(x))` with `ε ∈ [0, 0.3]`: nonnegative on
/// the box and zero on its boundary.
pub fn bump<R: Rng>(omega: &BoxDomain, rng: &mut R) -> Expr {
    let eps = rng.gen_range(0.0..=MAX_EPS);
    let s = trig_perturbation(omega.dim(), rng);
    Expr::mul(
        box_bubble(omega),
        Expr::add(Expr::Const(1.0), Expr::mul(Expr::Const(eps), s)),
    )
}

pub fn bump_suite(omega: &BoxDomain, count: usize, seed: u64) -> Vec<Expr> {
    let mut r = rng(seed);
    (0..count).map(|_| bump(omega, &mut r)).collect()
}

/// `c_0 + bump`, positive on the closed box.
pub fn shifted_bump<R: Rng>(omega: &BoxDomain, rng: &mut R) -> Expr {
    let peak: f64 = (1..=omega.dim())
        .map(|k| ((omega.hi(k) - omega.lo(k)) / 2.0).powi(2))
        .product();
    let c0 = rng.gen_range(0.2..1.0) * peak;
    Expr::add(Expr::Const(c0), bump(omega, rng))
}

pub fn shifted_bump_suite(omega: &BoxDomain, count: usize, seed: u64) -> Vec<Expr> {
    let mut r = rng(seed);
    (0..count).map(|_| shifted_bump(omega, &mut r)).collect()
}

fn atom<R: Rng>(n: usize, rng: &mut R) -> Expr {
    let k = rng.gen_range(1..=n);
    let x = Expr::var(k);
    let c = rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let body = match rng.gen_range(0..5) {
        0 => Expr::pow(x, rng.gen_range(-1.0..3.0)),
        1 => Expr::exp(Expr::mul(Expr::Const(rng.gen_range(-1.0..1.0)), x)),
        2 => Expr::sin(Expr::add(
            Expr::mul(Expr::Const(rng.gen_range(0.5..3.0)), x),
            Expr::Const(rng.gen_range(0.0..3.0)),
        )),
        3 => Expr::cos(Expr::mul(Expr::Const(rng.gen_range(0.5..3.0)), x)),
        _ => Expr::log(Expr::add(x, Expr::Const(rng.gen_range(0.1..1.0)))),
    };
    Expr::mul(Expr::Const(c), body)
}

/// Sum of two to four terms built from powers, exponentials, sines,
/// cosines and shifted logarithms of single coordinates; smooth on the
/// positive orthant.
pub fn random_smooth<R: Rng>(n: usize, rng: &mut R) -> Expr {
    let terms = rng.gen_range(2..=4);
    Expr::sum((0..terms).map(|_| match rng.gen_range(0..3) {
        0 => atom(n, rng),
        1 => Expr::mul(atom(n, rng), atom(n, rng)),
        _ => Expr::sin(atom(n, rng)),
    }))
}

/// `Σ_k c_k x_k^{b_k} + c_0 exp(Σ_k γ_k x_k)` with `c > 0`, `b_k ≠ 0` and
/// `sign γ_k = sign b_k`: positive with every partial derivative nonzero.
pub fn random_monotone_positive<R: Rng>(n: usize, rng: &mut R) -> Expr {
    let signs: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
    let powers = Expr::sum((1..=n).map(|k| {
        let b = signs[k - 1] * rng.gen_range(0.3..2.0);
        Expr::mul(Expr::Const(rng.gen_range(0.5..2.0)), Expr::pow(Expr::var(k), b))
    }));
    let lin = Expr::sum((1..=n).map(|k| {
        Expr::mul(Expr::Const(signs[k - 1] * rng.gen_range(0.1..0.8)), Expr::var(k))
    }));
    Expr::add(
        powers,
        Expr::mul(Expr::Const(rng.gen_range(0.2..1.5)), Expr::exp(lin)),
    )
}

/// Nonnegative smooth function: `Σ_k c_k x_k^{d_k}(1.2 + sin(f x_j + φ))`.
pub fn random_nonnegative<R: Rng>(n: usize, rng: &mut R) -> Expr {
    Expr::sum((1..=n).map(|k| {
        let j = rng.gen_range(1..=n);
        Expr::mul(
            Expr::mul(
                Expr::Const(rng.gen_range(0.3..2.0)),
                Expr::pow(Expr::var(k), rng.gen_range(-1.0..2.5)),
            ),
            Expr::add(
                Expr::Const(1.2),
                Expr::sin(Expr::add(
                    Expr::mul(Expr::Const(rng.gen_range(0.5..3.0)), Expr::var(j)),
                    Expr::Const(rng.gen_range(0.0..3.0)),
                )),
            ),
        )
    }))
}

pub fn random_picone_pair<R: Rng>(n: usize, rng: &mut R) -> PiconePair {
    PiconePair::new(random_nonnegative(n, rng), random_monotone_positive(n, rng))
}

pub fn random_point<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Point {
    Point::new((0..n).map(|_| rng.gen_range(lo..hi)).collect()).expect("bounds are positive")
}

/// Box inside `[lo, hi]^n` with every side at least `(hi − lo)/5`.
pub fn random_box<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> BoxDomain {
    let min_side = (hi - lo) / 5.0;
    let (a, b): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|_| {
            let a = rng.gen_range(lo..hi - min_side);
            let b = rng.gen_range(a + min_side..=hi);
            (a, b)
        })
        .unzip();
    BoxDomain::new(a, b).expect("sides are positive")
}
