use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::fields::{read_field_csv, AnnulusGrid, FieldDescriptor, GridSpec, VelocityField, WallCondition};
use crate::geometry::ManifoldKind;
use crate::manufactured::{Manufactured, Separable, Term, Trig};
use crate::scalar::{lit, Real};

/// Tangential velocity `U(θ) = mean + Σ_m cos[m−1]·cos mθ + sin[m−1]·sin mθ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"), deny_unknown_fields)]
pub struct TangentialProfile<T> {
    #[serde(default)]
    pub mean: T,
    #[serde(default)]
    pub cos: Vec<T>,
    #[serde(default)]
    pub sin: Vec<T>,
}

impl<T: Real> TangentialProfile<T> {
    pub fn zero() -> Self {
        Self {
            mean: T::zero(),
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn eval(&self, theta: T) -> T {
        let mut v = self.mean;
        for (m, &a) in self.cos.iter().enumerate() {
            v = v + a * (T::from_usize_lossy(m + 1) * theta).cos();
        }
        for (m, &b) in self.sin.iter().enumerate() {
            v = v + b * (T::from_usize_lossy(m + 1) * theta).sin();
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.mean == T::zero() && self.cos.iter().chain(&self.sin).all(|&c| c == T::zero())
    }
}

/// Condition on the outer circle `r = R`. The normal velocity there is always
/// the value that balances the wall flux (zero for no-slip).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
pub enum OuterCondition<T> {
    /// `u_θ(R, θ) = U(θ)`.
    PrescribedTangential { profile: TangentialProfile<T> },
    /// `∂_r u_θ − (c/s) u_θ = 0`.
    StressFree,
}

impl<T: Real> Default for OuterCondition<T> {
    fn default() -> Self {
        OuterCondition::PrescribedTangential {
            profile: TangentialProfile::zero(),
        }
    }
}

/// Where the initial velocity comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialField {
    /// `u ≡ 0` away from the walls.
    #[default]
    Rest,
    /// Divergence-free polynomial stream-function profile that already meets
    /// the wall condition and the prescribed outer data.
    Matched,
    /// A field CSV described by a JSON [`FieldDescriptor`]; relative paths are
    /// resolved against the config file's directory.
    File { descriptor: PathBuf },
}

fn default_div_tol<T: Real>() -> T {
    lit(1e-10)
}

/// Full description of one solver run. Viscosity is 1 throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default + Real"), deny_unknown_fields)]
pub struct SolverConfig<T> {
    pub grid: GridSpec<T>,
    /// Time step; `None` picks 90 % of the stability limits of the initial state.
    #[serde(default)]
    pub dt: Option<T>,
    pub t_end: T,
    #[serde(default = "no_slip")]
    pub wall: WallCondition<T>,
    /// Coriolis parameter; nonzero only on the sphere.
    #[serde(default)]
    pub beta: T,
    #[serde(default)]
    pub outer: OuterCondition<T>,
    #[serde(default)]
    pub initial: InitialField,
    /// θ index of the monitored wall point `p₀`.
    #[serde(default)]
    pub p0_theta_index: usize,
    /// Keep a field snapshot every this many steps.
    #[serde(default)]
    pub snapshot_every: Option<usize>,
    /// Interior divergence every projection must reach.
    #[serde(default = "default_div_tol")]
    pub div_tol: T,
}

fn no_slip<T>() -> WallCondition<T> {
    WallCondition::NoSlip
}

impl<T: Real> SolverConfig<T> {
    /// Minimal no-slip config at rest on `grid`.
    pub fn new(grid: GridSpec<T>, t_end: T) -> Self {
        Self {
            grid,
            dt: None,
            t_end,
            wall: WallCondition::NoSlip,
            beta: T::zero(),
            outer: OuterCondition::default(),
            initial: InitialField::Rest,
            p0_theta_index: 0,
            snapshot_every: None,
            div_tol: default_div_tol(),
        }
    }

    /// Checks everything that does not need the grid built.
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: String| Err(SolverError::Config(msg));
        if self.beta != T::zero() && self.grid.manifold.kind != ManifoldKind::Sphere {
            return bad(format!(
                "beta = {} requires a sphere, the grid is {}",
                self.beta, self.grid.manifold.kind
            ));
        }
        if !(self.t_end >= T::zero()) || !self.t_end.is_finite() {
            return bad(format!("t_end must be finite and nonnegative, got {}", self.t_end));
        }
        if let Some(dt) = self.dt {
            if !(dt > T::zero()) || !dt.is_finite() {
                return bad(format!("dt must be positive and finite, got {dt}"));
            }
        }
        if !self.beta.is_finite() || !self.wall.lambda0().is_finite() {
            return bad("beta and lambda0 must be finite".into());
        }
        if !(self.div_tol > T::zero()) {
            return bad(format!("div_tol must be positive, got {}", self.div_tol));
        }
        if self.p0_theta_index >= self.grid.ntheta {
            return bad(format!(
                "p0_theta_index {} out of range for ntheta = {}",
                self.p0_theta_index, self.grid.ntheta
            ));
        }
        if self.snapshot_every == Some(0) {
            return bad("snapshot_every must be at least 1".into());
        }
        if let OuterCondition::PrescribedTangential { profile } = &self.outer {
            if !profile.cos.iter().chain(&profile.sin).chain([&profile.mean]).all(|v| v.is_finite()) {
                return bad("outer profile coefficients must be finite".into());
            }
        }
        Ok(())
    }

    /// `true` without inflow and without outer driving.
    pub fn homogeneous(&self) -> bool {
        let quiet_outer = match &self.outer {
            OuterCondition::PrescribedTangential { profile } => profile.is_zero(),
            OuterCondition::StressFree => true,
        };
        self.wall.lambda0() == T::zero() && quiet_outer
    }

    /// Builds the initial state on `g`; `base` resolves relative descriptor paths.
    pub fn initial_field(&self, g: &AnnulusGrid<T>, base: &Path) -> Result<VelocityField<T>, SolverError>
    where
        T: serde::de::DeserializeOwned,
    {
        let lambda0 = self.wall.lambda0();
        let mut u = match &self.initial {
            InitialField::Rest => VelocityField::zeros(g),
            InitialField::Matched => matched_profile(g, &self.outer, lambda0).sample(g),
            InitialField::File { descriptor } => {
                let path = base.join(descriptor);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| SolverError::Config(format!("{}: {e}", path.display())))?;
                let desc: FieldDescriptor<T> = serde_json::from_str(&text)
                    .map_err(|e| SolverError::Config(format!("{}: {e}", path.display())))?;
                if desc.grid != g.spec() {
                    return Err(SolverError::Config(format!(
                        "{}: field grid does not match the solver grid",
                        path.display()
                    )));
                }
                let data = path.parent().unwrap_or(base).join(&desc.data);
                let file = std::fs::File::open(&data)
                    .map_err(|e| SolverError::Config(format!("{}: {e}", data.display())))?;
                read_field_csv(std::io::BufReader::new(file), g)?
            }
        };
        if let Some(k) = u.first_non_finite() {
            return Err(SolverError::Config(format!("initial field is not finite at node {k}")));
        }
        u.impose_wall(&self.wall);
        Ok(u)
    }
}

/// `ψ = −U₀x²/(2L) + Σ_m x²(L−x)/L² (a_m cos mθ + b_m sin mθ)`, `x = r−δ`,
/// `L = R−δ`: no-slip at `δ`, `u_θ(R) = U(θ)`, `u_r(R) = 0`; plus the
/// radial source flow `λ₀ s(δ)/s(r)` for inflow walls.
pub(crate) fn matched_profile<T: Real>(g: &AnnulusGrid<T>, outer: &OuterCondition<T>, lambda0: T) -> Manufactured<T> {
    let delta = g.delta();
    let l = g.outer_radius - delta;
    let mut psi = Separable::new(delta);
    if let OuterCondition::PrescribedTangential { profile } = outer {
        let cubic = |a: T| vec![T::zero(), T::zero(), a / l, -a / (l * l)];
        psi = psi.with(vec![T::zero(), T::zero(), -profile.mean / (lit::<T>(2.0) * l)], false, 0, Trig::Cos);
        for (m, &a) in profile.cos.iter().enumerate() {
            psi = psi.with(cubic(a), false, m + 1, Trig::Cos);
        }
        for (m, &b) in profile.sin.iter().enumerate() {
            psi = psi.with(cubic(b), false, m + 1, Trig::Sin);
        }
    }
    let mut u = Manufactured::from_stream_function(g.manifold, &psi);
    if lambda0 != T::zero() {
        u.ur.terms.push(Term {
            poly: vec![lambda0 * g.s[0]],
            inv_s: true,
            m: 0,
            trig: Trig::Cos,
        });
    }
    u
}
