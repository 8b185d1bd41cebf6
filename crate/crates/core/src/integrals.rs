//! Conserved quantities of the three-particle center-of-mass system in the
//! polar chart, and the algebra they satisfy.
//!
//! With `A = p_r² - 6I/r²` and `B = 3p_r² - 2I/r²`:
//!
//! * `F = A p_r sin 3φ + B p_φ cos 3φ / r`
//! * `K = A p_r p_φ cos 3φ - 2 B I sin 3φ / r`
//!
//! They obey `K² + 2IF² = 8H̃³(2I - 9g)` at every phase point, and
//! `{I,F} = 3K`, `{I,K} = -6IF`, `{K,F} = 3(8H̃³ - F²)` under `{p, q} = 1`.

use serde::Serialize;

use crate::charts::{polar_from_reduced, PolarState};
use crate::error::{Error, Result};
use crate::hamiltonians::{potential_n3, potential_n3_derivative};
use crate::numerics::{bracket_with_scale, BracketConfig, PhaseFunction};
use crate::state::ReducedPhaseState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableSet {
    pub h_reduced: f64,
    pub i_angular: f64,
    pub f_integral: f64,
    pub k_integral: f64,
}

/// Everything needed to evaluate `H̃, I, F, K` and their gradients at one point.
struct PolarTerms {
    r: f64,
    p_r: f64,
    p_phi: f64,
    s3: f64,
    c3: f64,
    v: f64,
    dv: f64,
    i: f64,
    a: f64,
    b: f64,
}

impl PolarTerms {
    fn new(st: &PolarState, g: f64) -> Result<Self> {
        if st.r.is_nan() || st.r <= 0.0 {
            return Err(Error::InvalidInput(format!("r must be > 0, got {}", st.r)));
        }
        let v = potential_n3(st.phi, g)?;
        let dv = potential_n3_derivative(st.phi, g)?;
        let i = 0.5 * st.p_phi * st.p_phi + v;
        let r2 = st.r * st.r;
        let (s3, c3) = (3.0 * st.phi).sin_cos();
        Ok(Self {
            r: st.r,
            p_r: st.p_r,
            p_phi: st.p_phi,
            s3,
            c3,
            v,
            dv,
            i,
            a: st.p_r * st.p_r - 6.0 * i / r2,
            b: 3.0 * st.p_r * st.p_r - 2.0 * i / r2,
        })
    }

    fn h(&self) -> f64 {
        0.5 * self.p_r * self.p_r + self.i / (self.r * self.r)
    }

    fn f(&self) -> f64 {
        self.a * self.p_r * self.s3 + self.b * self.p_phi * self.c3 / self.r
    }

    fn k(&self) -> f64 {
        self.a * self.p_r * self.p_phi * self.c3 - 2.0 * self.b * self.i * self.s3 / self.r
    }

    // Gradients are ordered [∂r, ∂φ, ∂p_r, ∂p_φ].

    fn grad_i(&self) -> [f64; 4] {
        [0.0, self.dv, 0.0, self.p_phi]
    }

    fn grad_h(&self) -> [f64; 4] {
        let r = self.r;
        let r2 = r * r;
        [
            -2.0 * self.i / (r2 * r),
            self.dv / r2,
            self.p_r,
            self.p_phi / r2,
        ]
    }

    fn grad_a(&self) -> [f64; 4] {
        let r2 = self.r * self.r;
        [
            12.0 * self.i / (r2 * self.r),
            -6.0 * self.dv / r2,
            2.0 * self.p_r,
            -6.0 * self.p_phi / r2,
        ]
    }

    fn grad_b(&self) -> [f64; 4] {
        let r2 = self.r * self.r;
        [
            4.0 * self.i / (r2 * self.r),
            -2.0 * self.dv / r2,
            6.0 * self.p_r,
            -2.0 * self.p_phi / r2,
        ]
    }

    fn grad_f(&self) -> [f64; 4] {
        let (r, pr, pf, s3, c3) = (self.r, self.p_r, self.p_phi, self.s3, self.c3);
        let (a, b) = (self.a, self.b);
        let (da, db) = (self.grad_a(), self.grad_b());
        [
            da[0] * pr * s3 + db[0] * pf * c3 / r - b * pf * c3 / (r * r),
            da[1] * pr * s3 + 3.0 * a * pr * c3 + db[1] * pf * c3 / r - 3.0 * b * pf * s3 / r,
            da[2] * pr * s3 + a * s3 + db[2] * pf * c3 / r,
            da[3] * pr * s3 + db[3] * pf * c3 / r + b * c3 / r,
        ]
    }

    fn grad_k(&self) -> [f64; 4] {
        let (r, pr, pf, s3, c3) = (self.r, self.p_r, self.p_phi, self.s3, self.c3);
        let (a, b, i) = (self.a, self.b, self.i);
        let (da, db) = (self.grad_a(), self.grad_b());
        [
            da[0] * pr * pf * c3 - 2.0 * db[0] * i * s3 / r + 2.0 * b * i * s3 / (r * r),
            da[1] * pr * pf * c3
                - 3.0 * a * pr * pf * s3
                - 2.0 * (db[1] * i * s3 + b * self.dv * s3 + 3.0 * b * i * c3) / r,
            da[2] * pr * pf * c3 + a * pf * c3 - 2.0 * db[2] * i * s3 / r,
            da[3] * pr * pf * c3 + a * pr * c3 - 2.0 * (db[3] * i * s3 + b * pf * s3) / r,
        ]
    }
}

pub fn integral_f(state: &PolarState, g: f64) -> Result<f64> {
    Ok(PolarTerms::new(state, g)?.f())
}

pub fn integral_k(state: &PolarState, g: f64) -> Result<f64> {
    Ok(PolarTerms::new(state, g)?.k())
}

pub fn observables(state: &PolarState, g: f64) -> Result<ObservableSet> {
    let t = PolarTerms::new(state, g)?;
    debug_assert!(t.v.is_finite());
    Ok(ObservableSet {
        h_reduced: t.h(),
        i_angular: t.i,
        f_integral: t.f(),
        k_integral: t.k(),
    })
}

/// `H̃, I, F, K` of a three-particle reduced Cartesian state.
pub fn observables_from_reduced(state: &ReducedPhaseState, g: f64) -> Result<ObservableSet> {
    observables(&polar_from_reduced(state)?, g)
}

/// `(K² + 2IF² - 8H̃³(2I - 9g))` over the largest of the three term magnitudes.
pub fn check_ksq(state: &PolarState, g: f64) -> Result<f64> {
    let o = observables(state, g)?;
    Ok(ksq_residual(&o, g))
}

pub fn ksq_residual(o: &ObservableSet, g: f64) -> f64 {
    let lhs = o.k_integral * o.k_integral + 2.0 * o.i_angular * o.f_integral * o.f_integral;
    let rhs = 8.0 * o.h_reduced.powi(3) * (2.0 * o.i_angular - 9.0 * g);
    let k2 = o.k_integral * o.k_integral;
    let scale = k2.max((lhs - k2).abs()).max(rhs.abs());
    if scale > 0.0 {
        (lhs - rhs) / scale
    } else {
        lhs - rhs
    }
}

/// Recovers `I = (K² + 72gH̃³) / (16H̃³ - 2F²)`.
pub fn solve_i(h: f64, f: f64, k: f64, g: f64) -> Result<f64> {
    let den = 16.0 * h.powi(3) - 2.0 * f * f;
    if den.abs() < 1e-10 * (k * k).max(1.0) {
        return Err(Error::DegenerateDenominator(format!(
            "16H̃³ - 2F² = {den:e}"
        )));
    }
    Ok((k * k + 72.0 * g * h.powi(3)) / den)
}

/// `H̃`, `I`, `F` or `K` as a function on the polar phase point
/// `[r, φ, p_r, p_φ]`, with hand-derived gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarObservable {
    H,
    I,
    F,
    K,
}

pub struct PolarField {
    pub which: PolarObservable,
    pub g: f64,
}

impl PolarField {
    pub fn new(which: PolarObservable, g: f64) -> Self {
        Self { which, g }
    }

    fn terms(&self, z: &[f64]) -> Result<PolarTerms> {
        if z.len() != 4 {
            return Err(Error::InvalidInput(format!(
                "polar phase point has length {}",
                z.len()
            )));
        }
        PolarTerms::new(&PolarState::from_phase_point(z), self.g)
    }
}

impl PhaseFunction for PolarField {
    fn eval(&self, z: &[f64]) -> Result<f64> {
        let t = self.terms(z)?;
        Ok(match self.which {
            PolarObservable::H => t.h(),
            PolarObservable::I => t.i,
            PolarObservable::F => t.f(),
            PolarObservable::K => t.k(),
        })
    }

    fn analytic_gradient(&self, z: &[f64]) -> Option<Result<Vec<f64>>> {
        Some(self.terms(z).map(|t| {
            match self.which {
                PolarObservable::H => t.grad_h(),
                PolarObservable::I => t.grad_i(),
                PolarObservable::F => t.grad_f(),
                PolarObservable::K => t.grad_k(),
            }
            .to_vec()
        }))
    }
}

/// Scale-free residuals of the bracket relations at one phase point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketRelations {
    /// `{I,F} - 3K`
    pub r1: f64,
    /// `{I,K} + 6IF`
    pub r2: f64,
    /// `{K,F} - 3(8H̃³ - F²)`
    pub r3: f64,
    /// `{H̃, I}`
    pub h_i: f64,
    /// `{H̃, F}`
    pub h_f: f64,
    /// `{H̃, K}`
    pub h_k: f64,
}

impl BracketRelations {
    pub fn max_abs(&self) -> f64 {
        [self.r1, self.r2, self.r3, self.h_i, self.h_f, self.h_k]
            .iter()
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Each residual is divided by the largest magnitude among the terms that
/// enter it: the bracket's own products and the right-hand side terms.
pub fn bracket_relations_report(
    state: &PolarState,
    g: f64,
    cfg: &BracketConfig,
) -> Result<BracketRelations> {
    let z = state.to_phase_point();
    let field = |w| PolarField::new(w, g);
    let (h, i, f, k) = (
        field(PolarObservable::H),
        field(PolarObservable::I),
        field(PolarObservable::F),
        field(PolarObservable::K),
    );
    let o = observables(state, g)?;
    let rel = |lhs: crate::numerics::Bracket, rhs: f64| {
        let scale = lhs.scale.max(rhs.abs());
        if scale > 0.0 {
            (lhs.value - rhs) / scale
        } else {
            lhs.value - rhs
        }
    };
    let if_ = bracket_with_scale(&i, &f, &z, cfg)?;
    let ik = bracket_with_scale(&i, &k, &z, cfg)?;
    let kf = bracket_with_scale(&k, &f, &z, cfg)?;
    let (fv, kv, iv, hv) = (o.f_integral, o.k_integral, o.i_angular, o.h_reduced);
    let r3_rhs_scale = (24.0 * hv.abs().powi(3)).max(3.0 * fv * fv);
    let kf_rel = {
        let scale = kf.scale.max(r3_rhs_scale);
        (kf.value - 3.0 * (8.0 * hv.powi(3) - fv * fv)) / scale
    };
    Ok(BracketRelations {
        r1: rel(if_, 3.0 * kv),
        r2: rel(ik, -6.0 * iv * fv),
        r3: kf_rel,
        h_i: rel(bracket_with_scale(&h, &i, &z, cfg)?, 0.0),
        h_f: rel(bracket_with_scale(&h, &f, &z, cfg)?, 0.0),
        h_k: rel(bracket_with_scale(&h, &k, &z, cfg)?, 0.0),
    })
}

/// Relative gap between the two stated right-hand sides of `{K, F}`:
/// `3(8H̃³ - F²)` and `3(K² + 9gF²)/(2I - 9g)`.
pub fn kf_forms_gap(state: &PolarState, g: f64) -> Result<f64> {
    let o = observables(state, g)?;
    let den = 2.0 * o.i_angular - 9.0 * g;
    if den.abs() < 1e-12 * o.i_angular.abs().max(1.0) {
        return Err(Error::DegenerateDenominator("2I - 9g = 0".into()));
    }
    let a = 3.0 * (8.0 * o.h_reduced.powi(3) - o.f_integral.powi(2));
    let b = 3.0 * (o.k_integral.powi(2) + 9.0 * g * o.f_integral.powi(2)) / den;
    Ok((a - b).abs() / a.abs().max(b.abs()).max(1.0))
}
