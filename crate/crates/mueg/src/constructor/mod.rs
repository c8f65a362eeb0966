//! Explicit density matrix with prescribed density and current, and its kinetic-energy ledger.
//!
//! The kernel is
//! `gamma(x,y) = e^{i(g(x)-g(y))} int int psi_{t,u}(x) f_t^u(x-y) psi_{t,u}(y) dt/t du`
//! with `psi_{t,u}(x)^2 = theta_x(u - w(x)) eta(t/rho(x))`. The u-integral factorizes
//! into a Gaussian integral evaluated per axis, the t-integral is done in the
//! geometric-mean variable `t = sqrt(rho(x) rho(y)) s`.

mod kernel;
mod ledger;

pub use kernel::{ConstructedRdm, TRule};
pub use ledger::{
    convergence_study, kinetic_bound_ledger, kinetic_upper_functional, kinetic_upper_functional_at, verify_marginals, ConvergenceRow,
    KineticBoundLedger, MarginalErrors, UpperFunctional, EPSILON_GRID, LEDGER_ROUNDING, LHS_AGREEMENT,
};

use std::sync::Arc;

use crate::kernels::EtaProfile;
use crate::linalg::{frobenius, Mat3};
use crate::rdm::{ScalarFunction, VectorFunction};
use crate::{Error, Point, Result};

/// Width of the Gaussian momentum profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WidthPolicy {
    Constant(f64),
    /// `delta(x) = max(|Dw(x)|, floor)`.
    Pointwise { floor: f64 },
}

impl WidthPolicy {
    pub fn delta(&self, dw: &Mat3) -> f64 {
        match *self {
            WidthPolicy::Constant(d) => d,
            WidthPolicy::Pointwise { floor } => frobenius(dw).max(floor),
        }
    }

    pub fn floor(&self) -> f64 {
        match *self {
            WidthPolicy::Constant(d) => d,
            WidthPolicy::Pointwise { floor } => floor,
        }
    }
}

/// How the Gaussian u-integral is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UQuadrature {
    /// Tensor Gauss-Hermite rule of the given order per axis.
    GaussHermite(usize),
    /// Closed-form Gaussian integral.
    Exact,
}

#[derive(Clone, Copy, Debug)]
pub struct ConstructorSpec {
    pub width: WidthPolicy,
    pub eta: EtaProfile,
    pub u_rule: UQuadrature,
    pub t_order: usize,
    /// Largest accepted discrepancy between the quadrature and its order-doubled version.
    pub tolerance: f64,
}

pub const DEFAULT_DELTA_FLOOR: f64 = 1e-3;
pub const DEFAULT_T_ORDER: usize = 64;
pub const DEFAULT_U_ORDER: usize = 32;

impl Default for ConstructorSpec {
    fn default() -> Self {
        ConstructorSpec {
            width: WidthPolicy::Pointwise { floor: DEFAULT_DELTA_FLOOR },
            eta: EtaProfile::standard(),
            u_rule: UQuadrature::GaussHermite(DEFAULT_U_ORDER),
            t_order: DEFAULT_T_ORDER,
            tolerance: 1e-6,
        }
    }
}

impl ConstructorSpec {
    /// Set the t-order and (for Gauss-Hermite) the u-order to `order`.
    pub fn with_orders(mut self, order: usize) -> Self {
        self.t_order = order;
        if let UQuadrature::GaussHermite(_) = self.u_rule {
            self.u_rule = UQuadrature::GaussHermite(order);
        }
        self
    }

    /// Profile supported on `[1, 1 + eps]`.
    pub fn with_epsilon(mut self, eps: f64) -> Result<Self> {
        self.eta = EtaProfile::new(1.0, 1.0 + eps)?;
        Ok(self)
    }

    pub fn epsilon(&self) -> f64 {
        self.eta.b / self.eta.a - 1.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.floor() > 0.0) {
            return Err(Error::invalid("theta width floor must be positive"));
        }
        if self.t_order < 8 {
            return Err(Error::invalid("t-quadrature order must be at least 8"));
        }
        if let UQuadrature::GaussHermite(n) = self.u_rule {
            if n < 8 {
                return Err(Error::invalid("u-quadrature order must be at least 8"));
            }
        }
        Ok(())
    }
}

/// `v = grad g + w`.
#[derive(Clone)]
pub struct CurrentDecomposition {
    pub g: Option<Arc<dyn ScalarFunction>>,
    pub w: Arc<dyn VectorFunction>,
}

impl CurrentDecomposition {
    pub fn new(g: Option<Arc<dyn ScalarFunction>>, w: Arc<dyn VectorFunction>) -> Self {
        CurrentDecomposition { g, w }
    }

    pub fn velocity(&self, x: Point) -> Point {
        let w = self.w.value(x);
        match &self.g {
            Some(g) => {
                let d = g.gradient(x);
                [w[0] + d[0], w[1] + d[1], w[2] + d[2]]
            }
            None => w,
        }
    }

    pub fn gauge(&self, x: Point) -> f64 {
        self.g.as_ref().map(|g| g.value(x)).unwrap_or(0.0)
    }
}
