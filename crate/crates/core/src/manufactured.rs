//! Smooth analytic fields with exact partial derivatives, used as oracles for
//! convergence studies and for the manufactured-solution solver runs.
//!
//! Every field is a finite sum `Σ P(r−δ) s(r)^{−p} trig(mθ)` with `P` a
//! polynomial and `p ∈ {0, 1}`, so partial derivatives of any order follow from
//! truncated Taylor arithmetic in `r` and closed forms in `θ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{AnnulusGrid, ScalarField, VelocityField};
use crate::geometry::Manifold;
use crate::scalar::{lit, Real};

/// Highest partial derivative order tracked in each variable.
pub const MAX_ORDER: usize = 4;
const N: usize = MAX_ORDER + 1;

/// Truncated Taylor series `Σ c_n (r − r₀)^n`, `n ≤ MAX_ORDER`.
#[derive(Debug, Clone, Copy)]
struct Taylor<T> {
    c: [T; N],
}

impl<T: Real> Taylor<T> {
    fn mul(&self, o: &Self) -> Self {
        let mut c = [T::zero(); N];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate().take(N - i) {
                c[i + j] = c[i + j] + a * b;
            }
        }
        Self { c }
    }

    fn recip(&self) -> Self {
        let mut c = [T::zero(); N];
        c[0] = T::one() / self.c[0];
        for n in 1..N {
            let acc = (1..=n).fold(T::zero(), |acc, k| acc + self.c[k] * c[n - k]);
            c[n] = -acc / self.c[0];
        }
        Self { c }
    }

    /// `n`-th derivative at the expansion point.
    fn deriv(&self, n: usize) -> T {
        let fact = (1..=n).fold(T::one(), |f, k| f * T::from_usize_lossy(k));
        self.c[n] * fact
    }

    /// Expansion of `s(r)` about `r`: `s⁽²ᵐ⁾ = (−κ)ᵐ s`, `s⁽²ᵐ⁺¹⁾ = (−κ)ᵐ c`.
    fn metric_s(m: &Manifold<T>, r: T) -> Self {
        let neg_k = -m.gaussian_curvature();
        let (s, c) = (m.s(r), m.c(r));
        let mut out = [T::zero(); N];
        let mut pow = T::one();
        let mut fact = T::one();
        for (n, slot) in out.iter_mut().enumerate() {
            if n > 0 {
                fact = fact * T::from_usize_lossy(n);
            }
            if n > 0 && n % 2 == 0 {
                pow = pow * neg_k;
            }
            let base = if n % 2 == 0 { s } else { c };
            *slot = pow * base / fact;
        }
        Self { c: out }
    }

    /// Re-expansion of the polynomial `Σ p_n x^n` about `x₀`.
    fn poly(p: &[T], x0: T) -> Self {
        let mut c = [T::zero(); N];
        // Taylor coefficient k = Σ_n p_n C(n, k) x0^{n−k}
        for (n, &pn) in p.iter().enumerate() {
            let mut binom = T::one();
            for (k, slot) in c.iter_mut().enumerate().take(n.min(MAX_ORDER) + 1) {
                if k > 0 {
                    binom = binom * T::from_usize_lossy(n + 1 - k) / T::from_usize_lossy(k);
                }
                *slot = *slot + pn * binom * x0.powi((n - k) as i32);
            }
        }
        Self { c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// `poly(r − origin) · s(r)^{−inv_s} · trig(mθ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term<T> {
    pub poly: Vec<T>,
    pub inv_s: bool,
    pub m: usize,
    pub trig: Trig,
}

/// All partials `d[i][j] = ∂ⁱ_r ∂ʲ_θ f`, `i, j ≤ MAX_ORDER`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials<T> {
    pub d: [[T; N]; N],
}

impl<T: Real> Partials<T> {
    pub fn zero() -> Self {
        Self {
            d: [[T::zero(); N]; N],
        }
    }

    pub fn v(&self) -> T {
        self.d[0][0]
    }

    pub fn r(&self) -> T {
        self.d[1][0]
    }

    pub fn t(&self) -> T {
        self.d[0][1]
    }

    pub fn rr(&self) -> T {
        self.d[2][0]
    }

    pub fn tt(&self) -> T {
        self.d[0][2]
    }

    pub fn rt(&self) -> T {
        self.d[1][1]
    }

    pub fn scaled(&self, w: T) -> Self {
        let mut out = *self;
        out.d.iter_mut().flatten().for_each(|v| *v = *v * w);
        out
    }
}

/// Sum of separable terms in `(r, θ)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Separable<T> {
    pub origin: T,
    pub terms: Vec<Term<T>>,
}

fn poly_deriv<T: Real>(p: &[T]) -> Vec<T> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(n, &c)| c * T::from_usize_lossy(n))
        .collect()
}

fn poly_mul<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

impl<T: Real> Separable<T> {
    pub fn new(origin: T) -> Self {
        Self {
            origin,
            terms: Vec::new(),
        }
    }

    pub fn with(mut self, poly: Vec<T>, inv_s: bool, m: usize, trig: Trig) -> Self {
        self.terms.push(Term { poly, inv_s, m, trig });
        self
    }

    pub fn partials(&self, man: &Manifold<T>, r: T, theta: T) -> Partials<T> {
        let mut out = Partials::zero();
        let x = r - self.origin;
        let inv_s = Taylor::metric_s(man, r).recip();
        for term in &self.terms {
            let mut radial = Taylor::poly(&term.poly, x);
            if term.inv_s {
                radial = radial.mul(&inv_s);
            }
            let m = T::from_usize_lossy(term.m);
            let phase0 = match term.trig {
                Trig::Cos => T::zero(),
                Trig::Sin => -T::FRAC_PI_2(),
            };
            for j in 0..N {
                // dʲ/dθʲ cos(mθ + φ) = mʲ cos(mθ + φ + jπ/2)
                let ang = m * theta + phase0 + T::FRAC_PI_2() * T::from_usize_lossy(j);
                let tj = m.powi(j as i32) * ang.cos();
                let tj = if term.m == 0 && j > 0 { T::zero() } else { tj };
                for i in 0..N {
                    out.d[i][j] = out.d[i][j] + radial.deriv(i) * tj;
                }
            }
        }
        out
    }

    pub fn value(&self, man: &Manifold<T>, r: T, theta: T) -> T {
        self.partials(man, r, theta).v()
    }

    /// Multiplies every radial polynomial by `q`.
    pub fn times_poly(&self, q: &[T]) -> Self {
        Self {
            origin: self.origin,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    poly: poly_mul(&t.poly, q),
                    ..t.clone()
                })
                .collect(),
        }
    }

    pub fn sample(&self, g: &AnnulusGrid<T>) -> ScalarField<T> {
        ScalarField::from_fn(g, |r, th| self.value(&g.manifold, r, th))
    }
}

/// Analytic velocity field `(u_r, u_θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Manufactured<T> {
    pub manifold: Manifold<T>,
    pub ur: Separable<T>,
    pub utheta: Separable<T>,
}

/// Random smooth coefficients for [`Manufactured::random_stream`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomStream<T> {
    pub delta: T,
    /// Also vanish to second order at this radius.
    pub outer: Option<T>,
    /// Highest angular wavenumber.
    pub max_mode: usize,
    /// Extra polynomial degree on top of the `(r−δ)²` factor.
    pub degree: usize,
    pub amplitude: T,
    pub seed: u64,
}

impl<T: Real> Manufactured<T> {
    /// `u_r = (1/s)∂_θψ`, `u_θ = −∂_rψ`; divergence-free by construction.
    pub fn from_stream_function(manifold: Manifold<T>, psi: &Separable<T>) -> Self {
        let mut ur = Separable::new(psi.origin);
        let mut ut = Separable::new(psi.origin);
        for t in &psi.terms {
            assert!(!t.inv_s, "stream functions must be polynomial in r");
            let m = T::from_usize_lossy(t.m);
            if t.m > 0 {
                // ∂_θ cos = −m sin, ∂_θ sin = m cos
                let (sign, trig) = match t.trig {
                    Trig::Cos => (-m, Trig::Sin),
                    Trig::Sin => (m, Trig::Cos),
                };
                ur.terms.push(Term {
                    poly: t.poly.iter().map(|&c| sign * c).collect(),
                    inv_s: true,
                    m: t.m,
                    trig,
                });
            }
            ut.terms.push(Term {
                poly: poly_deriv(&t.poly).into_iter().map(|c| -c).collect(),
                inv_s: false,
                m: t.m,
                trig: t.trig,
            });
        }
        Self {
            manifold,
            ur,
            utheta: ut,
        }
    }

    /// Stream-function field `ψ = (r−δ)² [(R−r)²] Σ_m P_m(r−δ) cos/sin(mθ)` with
    /// seeded uniform coefficients; no-slip at `δ` (and at `R` when given).
    pub fn random_stream(manifold: Manifold<T>, spec: &RandomStream<T>) -> Self {
        Self::from_stream_function(manifold, &random_psi(spec))
    }

    /// Adds the constant `λ₀` to `u_r` (inflow wall value).
    pub fn with_inflow(mut self, lambda0: T) -> Self {
        self.ur.terms.push(Term {
            poly: vec![lambda0],
            inv_s: false,
            m: 0,
            trig: Trig::Cos,
        });
        self
    }

    pub fn partials(&self, r: T, theta: T) -> (Partials<T>, Partials<T>) {
        (
            self.ur.partials(&self.manifold, r, theta),
            self.utheta.partials(&self.manifold, r, theta),
        )
    }

    pub fn sample(&self, g: &AnnulusGrid<T>) -> VelocityField<T> {
        VelocityField::from_fn(g, |r, th| {
            (
                self.ur.value(&self.manifold, r, th),
                self.utheta.value(&self.manifold, r, th),
            )
        })
    }

    /// Samples `op(ctx, ∂u_r, ∂u_θ)` at every node.
    pub fn sample_exact(
        &self,
        g: &AnnulusGrid<T>,
        op: impl Fn(&Metric<T>, &Partials<T>, &Partials<T>) -> T,
    ) -> ScalarField<T> {
        ScalarField::from_fn(g, |r, th| {
            let (a, b) = self.partials(r, th);
            op(&Metric::at(&self.manifold, r), &a, &b)
        })
    }

    /// The same field scaled by `w` (for time modulation).
    pub fn scaled(&self, w: T) -> Self {
        let sc = |f: &Separable<T>| f.times_poly(&[w]);
        Self {
            manifold: self.manifold,
            ur: sc(&self.ur),
            utheta: sc(&self.utheta),
        }
    }
}

pub fn random_psi<T: Real>(spec: &RandomStream<T>) -> Separable<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut base: Vec<T> = vec![T::zero(), T::zero(), T::one()];
    if let Some(outer) = spec.outer {
        let l = outer - spec.delta;
        // (L − x)² = L² − 2Lx + x²
        base = poly_mul(&base, &[l * l, lit::<T>(-2.0) * l, T::one()]);
    }
    let mut psi = Separable::new(spec.delta);
    for m in 0..=spec.max_mode {
        for trig in [Trig::Cos, Trig::Sin] {
            if m == 0 && trig == Trig::Sin {
                continue;
            }
            let p: Vec<T> = (0..=spec.degree)
                .map(|_| spec.amplitude * lit::<T>(rng.gen_range(-1.0..1.0)))
                .collect();
            psi.terms.push(Term {
                poly: poly_mul(&base, &p),
                inv_s: false,
                m,
                trig,
            });
        }
    }
    psi
}

/// Metric values at one radius.
#[derive(Debug, Clone, Copy)]
pub struct Metric<T> {
    pub s: T,
    pub c: T,
    pub kappa: T,
}

impl<T: Real> Metric<T> {
    pub fn at(m: &Manifold<T>, r: T) -> Self {
        Self {
            s: m.s(r),
            c: m.c(r),
            kappa: m.gaussian_curvature(),
        }
    }
}

/// Closed-form operator values from exact partials.
pub mod exact {
    use super::*;

    pub fn divergence<T: Real>(m: &Metric<T>, ur: &Partials<T>, ut: &Partials<T>) -> T {
        (m.c * ur.v() + m.s * ur.r() + ut.t()) / m.s
    }

    pub fn vorticity<T: Real>(m: &Metric<T>, ur: &Partials<T>, ut: &Partials<T>) -> T {
        (m.c * ut.v() + m.s * ut.r() - ur.t()) / m.s
    }

    pub fn laplacian_normal<T: Real>(m: &Metric<T>, ur: &Partials<T>, ut: &Partials<T>) -> T {
        (ur.tt() - m.c * ut.t() - m.s * ut.rt()) / (m.s * m.s)
    }

    pub fn laplacian_tangential<T: Real>(m: &Metric<T>, ur: &Partials<T>, ut: &Partials<T>) -> T {
        let (s, c) = (m.s, m.c);
        -ut.v() / (s * s) + c / s * ut.r() + ut.rr() + c / (s * s) * ur.t() - ur.rt() / s
    }

    pub fn hodge_laplacian<T: Real>(m: &Metric<T>, ur: &Partials<T>, ut: &Partials<T>) -> (T, T) {
        let (s, c) = (m.s, m.c);
        let k = c / s;
        let dk = -m.kappa - k * k;
        let two = lit::<T>(2.0);
        (
            ur.tt() / (s * s) - two * c / (s * s) * ut.t() + dk * ur.v() + k * ur.r() + ur.rr(),
            dk * ut.v() + k * ut.r() + ut.rr() + two * c / (s * s) * ur.t() + ut.tt() / (s * s),
        )
    }

    pub fn convection<T: Real>(m: &Metric<T>, ur: &Partials<T>, ut: &Partials<T>) -> (T, T) {
        let (s, c) = (m.s, m.c);
        let (a, b) = (ur.v(), ut.v());
        (
            a * ur.r() + b * ur.t() / s - c / s * b * b,
            a * ut.r() + b * a * c / s + b * ut.t() / s,
        )
    }

    pub fn gradient<T: Real>(m: &Metric<T>, p: &Partials<T>) -> (T, T) {
        (p.r(), p.t() / m.s)
    }
}

/// Time modulation `1 + ε sin(ωt)` and its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeFactor<T> {
    pub epsilon: T,
    pub omega: T,
}

impl<T: Real> TimeFactor<T> {
    pub fn steady() -> Self {
        Self {
            epsilon: T::zero(),
            omega: T::zero(),
        }
    }

    pub fn value(&self, t: T) -> T {
        T::one() + self.epsilon * (self.omega * t).sin()
    }

    pub fn rate(&self, t: T) -> T {
        self.epsilon * self.omega * (self.omega * t).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_reciprocal_of_s_matches_closed_form() {
        // (1/s)' = −c/s², (1/s)'' = (2c² + κs²)/s³ on every surface
        for m in [Manifold::<f64>::sphere(1.3).unwrap(), Manifold::hyperbolic(0.8).unwrap(), Manifold::euclidean()] {
            let r = 0.9;
            let inv = Taylor::metric_s(&m, r).recip();
            let (s, c, k) = (m.s(r), m.c(r), m.gaussian_curvature());
            assert!((inv.deriv(0) - 1.0 / s).abs() < 1e-14);
            assert!((inv.deriv(1) + c / (s * s)).abs() < 1e-13);
            assert!((inv.deriv(2) - (2.0 * c * c + k * s * s) / (s * s * s)).abs() < 1e-12);
        }
    }

    #[test]
    fn polynomial_reexpansion() {
        // p(x) = 1 + 2x + 3x² about x0 = 0.5: p = 2.75, p' = 5, p'' = 6
        let t = Taylor::<f64>::poly(&[1.0, 2.0, 3.0], 0.5);
        assert!((t.deriv(0) - 2.75).abs() < 1e-15);
        assert!((t.deriv(1) - 5.0).abs() < 1e-15);
        assert!((t.deriv(2) - 6.0).abs() < 1e-15);
        assert_eq!(t.deriv(3), 0.0);
    }

    #[test]
    fn partials_against_finite_differences() {
        let m = Manifold::<f64>::sphere(1.0).unwrap();
        let f = Separable::new(0.5)
            .with(vec![0.3, -1.0, 0.7], true, 2, Trig::Sin)
            .with(vec![1.0, 0.5], false, 1, Trig::Cos);
        let (r, th) = (0.8, 0.4);
        let p = f.partials(&m, r, th);
        let h = 1e-4;
        let fd_r = (f.value(&m, r + h, th) - f.value(&m, r - h, th)) / (2.0 * h);
        let fd_t = (f.value(&m, r, th + h) - f.value(&m, r, th - h)) / (2.0 * h);
        let fd_rt = (f.value(&m, r + h, th + h) - f.value(&m, r + h, th - h) - f.value(&m, r - h, th + h)
            + f.value(&m, r - h, th - h))
            / (4.0 * h * h);
        assert!((p.r() - fd_r).abs() < 1e-7);
        assert!((p.t() - fd_t).abs() < 1e-7);
        assert!((p.rt() - fd_rt).abs() < 1e-6);
    }

    #[test]
    fn stream_fields_are_divergence_free_and_no_slip() {
        let m = Manifold::<f64>::hyperbolic(1.0).unwrap();
        let spec = RandomStream {
            delta: 1.0,
            outer: Some(2.0),
            max_mode: 3,
            degree: 2,
            amplitude: 1.0,
            seed: 11,
        };
        let u = Manufactured::random_stream(m, &spec);
        for &(r, th) in &[(1.0, 0.3), (1.4, 2.0), (2.0, 5.0), (1.7, 1.1)] {
            let (a, b) = u.partials(r, th);
            assert!(exact::divergence(&Metric::at(&m, r), &a, &b).abs() < 1e-12);
        }
        for th in [0.0, 1.0, 4.0] {
            let (a, b) = u.partials(1.0, th);
            assert!(a.v().abs() < 1e-15 && b.v().abs() < 1e-15 && a.r().abs() < 1e-14);
            let (a, b) = u.partials(2.0, th);
            assert!(a.v().abs() < 1e-13 && b.v().abs() < 1e-13);
        }
    }
}
