//! Exact Heisenberg group and coadjoint-orbit arithmetic.
//!
//! An element `[a, b, c]` stands for `exp(Σ a_k X_k + Σ b_k Y_k + c Z)` with
//! `[X_k, Y_k] = Z`; the product is
//! `[a, b, c]·[a', b', c'] = [a + a', b + b', c + c' + ½(a·b' − a'·b)]`.
//! Nothing here depends on truncation or grid parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergElement {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

/// A functional `Σ α_k X_k* + Σ β_k Y_k* + γ Z*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: f64,
}

/// A point `(a, b)` of `g_e ≅ R^{2n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(p, q)| p * q).sum()
}

fn check_n(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

impl HeisenbergElement {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: f64) -> Result<Self> {
        check_n(a.len(), b.len())?;
        if a.iter().chain(&b).chain([&c]).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("HeisenbergElement".into()));
        }
        Ok(HeisenbergElement { a, b, c })
    }

    pub fn identity(n: usize) -> Self {
        HeisenbergElement {
            a: vec![0.0; n],
            b: vec![0.0; n],
            c: 0.0,
        }
    }

    pub fn central(n: usize, c: f64) -> Self {
        HeisenbergElement { c, ..Self::identity(n) }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn multiply(&self, other: &HeisenbergElement) -> Result<Self> {
        multiply(self, other)
    }

    pub fn inverse(&self) -> Self {
        inverse(self)
    }

    /// `max_k max(|a_k|, |b_k|)`.
    pub fn displacement_norm(&self) -> f64 {
        self.a.iter().chain(&self.b).fold(0.0, |m, x| m.max(x.abs()))
    }

    /// The `[a, b, c]` JSON array form used in manifests (n = 1 flattens).
    pub fn to_json_array(&self) -> serde_json::Value {
        if self.n() == 1 {
            serde_json::json!([self.a[0], self.b[0], self.c])
        } else {
            serde_json::json!([self.a, self.b, self.c])
        }
    }
}

pub fn multiply(g: &HeisenbergElement, h: &HeisenbergElement) -> Result<HeisenbergElement> {
    check_n(g.n(), h.n())?;
    let a = g.a.iter().zip(&h.a).map(|(x, y)| x + y).collect();
    let b = g.b.iter().zip(&h.b).map(|(x, y)| x + y).collect();
    let c = g.c + h.c + 0.5 * (dot(&g.a, &h.b) - dot(&h.a, &g.b));
    Ok(HeisenbergElement { a, b, c })
}

pub fn inverse(g: &HeisenbergElement) -> HeisenbergElement {
    HeisenbergElement {
        a: g.a.iter().map(|x| -x).collect(),
        b: g.b.iter().map(|x| -x).collect(),
        c: -g.c,
    }
}

impl OrbitPoint {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: f64) -> Result<Self> {
        check_n(alpha.len(), beta.len())?;
        Ok(OrbitPoint { alpha, beta, gamma })
    }

    /// `λZ*`, the base point of the orbit.
    pub fn base(n: usize, lambda: f64) -> Self {
        OrbitPoint {
            alpha: vec![0.0; n],
            beta: vec![0.0; n],
            gamma: lambda,
        }
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }
}

/// `Ad*(g) ξ`: `α' = α + γb`, `β' = β − γa`, `γ' = γ`.
pub fn coadjoint(g: &HeisenbergElement, xi: &OrbitPoint) -> Result<OrbitPoint> {
    check_n(g.n(), xi.n())?;
    let gamma = xi.gamma;
    Ok(OrbitPoint {
        alpha: xi.alpha.iter().zip(&g.b).map(|(al, b)| al + gamma * b).collect(),
        beta: xi.beta.iter().zip(&g.a).map(|(be, a)| be - gamma * a).collect(),
        gamma,
    })
}

/// The group element `[a, b, 0]` carrying `λZ*` to `ξ`, for `ξ.gamma = λ ≠ 0`.
pub fn orbit_preimage(xi: &OrbitPoint) -> Result<HeisenbergElement> {
    if xi.gamma == 0.0 {
        return Err(Error::InvalidConfig("the orbit through gamma = 0 is a point".into()));
    }
    HeisenbergElement::new(
        xi.beta.iter().map(|b| -b / xi.gamma).collect(),
        xi.alpha.iter().map(|a| a / xi.gamma).collect(),
        0.0,
    )
}

impl PhasePoint {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Self {
        PhasePoint { a, b }
    }

    pub fn origin(n: usize) -> Self {
        PhasePoint {
            a: vec![0.0; n],
            b: vec![0.0; n],
        }
    }

    /// From grid coordinates `(a_1..a_n, b_1..b_n)`.
    pub fn from_coords(coords: &[f64]) -> Self {
        let n = coords.len() / 2;
        PhasePoint {
            a: coords[..n].to_vec(),
            b: coords[n..].to_vec(),
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// The group element `[a, b, 0]`.
    pub fn to_element(&self) -> HeisenbergElement {
        HeisenbergElement {
            a: self.a.clone(),
            b: self.b.clone(),
            c: 0.0,
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.a.iter().chain(&self.b).fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|x| x * x).sum()
    }
}

/// Drops the central coordinate: `[a, b, c] ↦ (a, b)`.
pub fn project_to_phase(g: &HeisenbergElement) -> PhasePoint {
    PhasePoint {
        a: g.a.clone(),
        b: g.b.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn el(a: f64, b: f64, c: f64) -> HeisenbergElement {
        HeisenbergElement::new(vec![a], vec![b], c).unwrap()
    }

    #[test]
    fn group_law_examples() {
        let g = el(0.3, -1.2, 2.5);
        assert_eq!(multiply(&HeisenbergElement::identity(1), &g).unwrap(), g);
        assert_eq!(multiply(&el(1., 0., 0.), &el(0., 1., 0.)).unwrap(), el(1., 1., 0.5));
        assert_eq!(multiply(&el(0., 1., 0.), &el(1., 0., 0.)).unwrap(), el(1., 1., -0.5));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse(&el(2., -3., 4.)), el(-2., 3., -4.));
        let g = el(1., 1., 0.);
        assert_eq!(inverse(&g), el(-1., -1., 0.));
        assert_eq!(multiply(&g, &inverse(&g)).unwrap(), HeisenbergElement::identity(1));
    }

    #[test]
    fn mismatched_dimensions() {
        let g = HeisenbergElement::identity(1);
        let h = HeisenbergElement::identity(2);
        assert!(matches!(multiply(&g, &h), Err(Error::DimensionMismatch { .. })));
        assert!(coadjoint(&g, &OrbitPoint::base(2, 1.0)).is_err());
        assert!(HeisenbergElement::new(vec![0.0], vec![], 0.0).is_err());
    }

    #[test]
    fn coadjoint_examples() {
        let xi = OrbitPoint::new(vec![0.4], vec![-0.2], 0.0).unwrap();
        assert_eq!(coadjoint(&el(3., 5., 7.), &xi).unwrap(), xi);
        let lambda = 1.7;
        let moved = coadjoint(&el(1., 0., 0.), &OrbitPoint::base(1, lambda)).unwrap();
        assert_eq!(moved, OrbitPoint::new(vec![0.0], vec![-lambda], lambda).unwrap());
    }

    #[test]
    fn orbit_is_the_flat_plane() {
        let lambda = 0.5;
        let base = OrbitPoint::base(1, lambda);
        for a in [-2.0, -0.5, 0.0, 1.25] {
            for b in [-1.0, 0.0, 3.0] {
                let xi = coadjoint(&el(a, b, 0.0), &base).unwrap();
                assert_eq!(xi.gamma, lambda);
                assert_eq!(xi.alpha, vec![lambda * b]);
                assert_eq!(xi.beta, vec![-lambda * a]);
            }
        }
        let target = OrbitPoint::new(vec![0.7], vec![-2.3], lambda).unwrap();
        let g = orbit_preimage(&target).unwrap();
        let hit = coadjoint(&g, &base).unwrap();
        assert!((hit.alpha[0] - 0.7).abs() < 1e-15 && (hit.beta[0] + 2.3).abs() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        assert_eq!(
            project_to_phase(&el(1.5, -2.0, 0.0)),
            PhasePoint::new(vec![1.5], vec![-2.0])
        );
        assert_eq!(project_to_phase(&el(0., 0., 5.)), PhasePoint::origin(1));
        let p = project_to_phase(&multiply(&el(0.5, 1.0, 0.0), &el(2.0, -3.0, 0.0)).unwrap());
        assert_eq!(p, PhasePoint::new(vec![2.5], vec![-2.0]));
    }

    #[test]
    fn associativity_is_exact_on_dyadic_rationals() {
        let g = el(0.5, -1.25, 3.0);
        let h = el(-2.0, 0.75, -1.0);
        let k = el(1.5, 4.0, 0.25);
        let lhs = multiply(&multiply(&g, &h).unwrap(), &k).unwrap();
        let rhs = multiply(&g, &multiply(&h, &k).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    fn arb_element(n: usize) -> impl Strategy<Value = HeisenbergElement> {
        (
            proptest::collection::vec(-5.0f64..5.0, n),
            proptest::collection::vec(-5.0f64..5.0, n),
            -5.0f64..5.0,
        )
            .prop_map(|(a, b, c)| HeisenbergElement { a, b, c })
    }

    fn close(g: &HeisenbergElement, h: &HeisenbergElement, tol: f64) -> bool {
        g.a.iter()
            .chain(&g.b)
            .chain([&g.c])
            .zip(h.a.iter().chain(&h.b).chain([&h.c]))
            .all(|(x, y)| (x - y).abs() <= tol)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn associativity(g in arb_element(2), h in arb_element(2), k in arb_element(2)) {
            let lhs = multiply(&multiply(&g, &h).unwrap(), &k).unwrap();
            let rhs = multiply(&g, &multiply(&h, &k).unwrap()).unwrap();
            prop_assert!(close(&lhs, &rhs, 1e-13));
        }

        #[test]
        fn inverse_cancels(g in arb_element(2)) {
            let e = multiply(&g, &inverse(&g)).unwrap();
            prop_assert!(close(&e, &HeisenbergElement::identity(2), 1e-14));
        }

        #[test]
        fn coadjoint_is_an_action(
            g in arb_element(2),
            h in arb_element(2),
            alpha in proptest::collection::vec(-3.0f64..3.0, 2),
            beta in proptest::collection::vec(-3.0f64..3.0, 2),
            gamma in -3.0f64..3.0,
        ) {
            let xi = OrbitPoint { alpha, beta, gamma };
            let lhs = coadjoint(&multiply(&g, &h).unwrap(), &xi).unwrap();
            let rhs = coadjoint(&g, &coadjoint(&h, &xi).unwrap()).unwrap();
            for (x, y) in lhs.alpha.iter().chain(&lhs.beta).zip(rhs.alpha.iter().chain(&rhs.beta)) {
                prop_assert!((x - y).abs() <= 1e-13);
            }
            prop_assert_eq!(lhs.gamma, rhs.gamma);
        }

        #[test]
        fn central_elements_act_trivially(
            c in -10.0f64..10.0,
            alpha in proptest::collection::vec(-3.0f64..3.0, 2),
            beta in proptest::collection::vec(-3.0f64..3.0, 2),
            gamma in -3.0f64..3.0,
        ) {
            let xi = OrbitPoint { alpha, beta, gamma };
            prop_assert_eq!(coadjoint(&HeisenbergElement::central(2, c), &xi).unwrap(), xi);
        }

        #[test]
        fn orbit_is_surjective(
            alpha in proptest::collection::vec(-3.0f64..3.0, 2),
            beta in proptest::collection::vec(-3.0f64..3.0, 2),
            lambda in 0.1f64..5.0,
        ) {
            let target = OrbitPoint { alpha, beta, gamma: lambda };
            let hit = coadjoint(&orbit_preimage(&target).unwrap(), &OrbitPoint::base(2, lambda)).unwrap();
            for (x, y) in hit.alpha.iter().chain(&hit.beta).zip(target.alpha.iter().chain(&target.beta)) {
                prop_assert!((x - y).abs() <= 1e-13);
            }
            prop_assert_eq!(hit.gamma, lambda);
        }
    }
}
