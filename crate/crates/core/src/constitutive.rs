//! Model constants and the pointwise constitutive laws: pressure, growth
//! factor, growth/death rates, consumption terms, and the analytic suprema
//! the step-size restrictions are built from.
//!
//! The growth/death rates are threshold-linear:
//!
//! ```text
//! g1(c, q) = k1 (c - c_crit)+
//! g2(c, q) = k2 (c_crit - c)+ + k3 (q - q_crit)+
//! G(p)     = alpha - beta p^theta
//! Phi      = g1 G(p) - g2
//! Psi_c    = -lambda_c n c,   Psi_q = -lambda_q n q
//! ```

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub gamma: f64,
    pub mu: f64,
    pub nu_c: f64,
    pub nu_q: f64,
    pub r_c: f64,
    pub r_q: f64,
    pub c_supp: f64,
    pub q_supp: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub c_crit: f64,
    pub q_crit: f64,
    pub lambda_c: f64,
    pub lambda_q: f64,
    pub c_inf: f64,
    pub q_inf: f64,
}

/// Points in the coarse scan of `p^{1/gamma} Phi` before golden-section refinement.
const GROWTH_SCAN_POINTS: usize = 4096;

impl ModelParams {
    /// Names and values in configuration order (`model.<name>` keys).
    pub fn entries(&self) -> [(&'static str, f64); 20] {
        [
            ("gamma", self.gamma),
            ("mu", self.mu),
            ("nu_c", self.nu_c),
            ("nu_q", self.nu_q),
            ("r_c", self.r_c),
            ("r_q", self.r_q),
            ("c_supp", self.c_supp),
            ("q_supp", self.q_supp),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("theta", self.theta),
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("c_crit", self.c_crit),
            ("q_crit", self.q_crit),
            ("lambda_c", self.lambda_c),
            ("lambda_q", self.lambda_q),
            ("c_inf", self.c_inf),
            ("q_inf", self.q_inf),
        ]
    }

    pub fn field_mut(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "gamma" => &mut self.gamma,
            "mu" => &mut self.mu,
            "nu_c" => &mut self.nu_c,
            "nu_q" => &mut self.nu_q,
            "r_c" => &mut self.r_c,
            "r_q" => &mut self.r_q,
            "c_supp" => &mut self.c_supp,
            "q_supp" => &mut self.q_supp,
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "theta" => &mut self.theta,
            "k1" => &mut self.k1,
            "k2" => &mut self.k2,
            "k3" => &mut self.k3,
            "c_crit" => &mut self.c_crit,
            "q_crit" => &mut self.q_crit,
            "lambda_c" => &mut self.lambda_c,
            "lambda_q" => &mut self.lambda_q,
            "c_inf" => &mut self.c_inf,
            "q_inf" => &mut self.q_inf,
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.entries() {
            if !v.is_finite() {
                return Err(Error::config(format!("model.{name} must be finite, got {v}")));
            }
        }
        let check = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::config(msg.to_string())) };
        check(self.gamma >= 2.0, "model.gamma must be >= 2")?;
        check(self.mu > 0.0, "model.mu must be > 0")?;
        check(self.nu_c >= 0.0 && self.nu_q >= 0.0, "diffusion coefficients must be >= 0")?;
        check(self.r_c >= 0.0 && self.r_q >= 0.0, "supply rates must be >= 0")?;
        check(self.c_supp >= 0.0 && self.q_supp >= 0.0, "supply concentrations must be >= 0")?;
        check(self.alpha > 0.0 && self.beta > 0.0, "model.alpha and model.beta must be > 0")?;
        check(self.theta > 0.0, "model.theta must be > 0")?;
        check(self.k1 >= 0.0 && self.k2 >= 0.0 && self.k3 >= 0.0, "slopes k1, k2, k3 must be >= 0")?;
        check(self.lambda_c >= 0.0 && self.lambda_q >= 0.0, "consumption rates must be >= 0")?;
        check(self.c_crit >= 0.0 && self.q_crit >= 0.0, "critical thresholds must be >= 0")?;
        check(self.c_supp <= self.c_inf, "model.c_supp must not exceed model.c_inf")?;
        check(self.q_supp <= self.q_inf, "model.q_supp must not exceed model.q_inf")?;
        Ok(())
    }

    /// `p = |n|^gamma`.
    #[inline]
    pub fn pressure(&self, n: f64) -> f64 {
        n.abs().powf(self.gamma)
    }

    /// `G(p) = alpha - beta p^theta`.
    #[inline]
    pub fn growth_factor(&self, p: f64) -> f64 {
        self.alpha - self.beta * p.powf(self.theta)
    }

    /// Homeostatic pressure `P_M = (alpha / beta)^{1/theta}`, the root of `G`.
    pub fn homeostatic_pressure(&self) -> f64 {
        (self.alpha / self.beta).powf(1.0 / self.theta)
    }

    /// `n_inf = P_M^{1/gamma}`.
    pub fn n_inf(&self) -> f64 {
        self.homeostatic_pressure().powf(1.0 / self.gamma)
    }

    #[inline]
    pub fn g1(&self, c: f64, _q: f64) -> f64 {
        if c > self.c_crit {
            self.k1 * (c - self.c_crit)
        } else {
            0.0
        }
    }

    #[inline]
    pub fn g2(&self, c: f64, q: f64) -> f64 {
        let starve = if c < self.c_crit { self.k2 * (self.c_crit - c) } else { 0.0 };
        let drug = if q > self.q_crit { self.k3 * (q - self.q_crit) } else { 0.0 };
        starve + drug
    }

    /// Net growth rate `Phi(p, c, q) = g1(c, q) G(p) - g2(c, q)`.
    #[inline]
    pub fn phi(&self, p: f64, c: f64, q: f64) -> f64 {
        self.g1(c, q) * self.growth_factor(p) - self.g2(c, q)
    }

    #[inline]
    pub fn psi_c(&self, n: f64, c: f64) -> f64 {
        -self.lambda_c * n * c
    }

    #[inline]
    pub fn psi_q(&self, n: f64, q: f64) -> f64 {
        -self.lambda_q * n * q
    }

    /// `Phi_inf`: supremum of `Phi` over `p >= 0, 0 <= c <= c_inf, 0 <= q <= q_inf`.
    ///
    /// `Phi` is nonincreasing in `p`, nondecreasing in `c` and nonincreasing in
    /// `q`, so the supremum sits at the corner `(0, c_inf, 0)`.
    pub fn phi_sup(&self) -> f64 {
        self.phi(0.0, self.c_inf, 0.0)
    }

    /// `S = sup p^{1/gamma} Phi(p, c, q)` over the admissible box.
    ///
    /// Beyond `P_M` the integrand is nonpositive, and below it the maximum is
    /// taken at `c = c_inf, q = 0`; the remaining 1-D problem in `p` is solved by
    /// a dense scan on `[0, P_M]` refined with golden-section search.
    pub fn growth_sup(&self) -> f64 {
        let pm = self.homeostatic_pressure();
        let f = |p: f64| p.powf(1.0 / self.gamma) * self.phi(p, self.c_inf, 0.0);
        let step = pm / GROWTH_SCAN_POINTS as f64;
        let mut best_k = 0;
        let mut best = f(0.0);
        for k in 1..=GROWTH_SCAN_POINTS {
            let v = f(k as f64 * step);
            if v > best {
                best = v;
                best_k = k;
            }
        }
        let mut lo = best_k.saturating_sub(1) as f64 * step;
        let mut hi = ((best_k + 1).min(GROWTH_SCAN_POINTS)) as f64 * step;
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            if hi - lo <= f64::EPSILON * pm {
                break;
            }
            let a = hi - inv_phi * (hi - lo);
            let b = lo + inv_phi * (hi - lo);
            if f(a) < f(b) {
                lo = a;
            } else {
                hi = b;
            }
        }
        best.max(f(0.5 * (lo + hi))).max(0.0)
    }

    /// `n̄_inf(dt) = n_inf + 4 dt S`.
    pub fn n_bar_inf(&self, dt: f64) -> f64 {
        self.n_inf() + 4.0 * dt * self.growth_sup()
    }

    /// `Psi_c_inf = max |Psi_c|` over `[0, n_bar] x [0, c_inf]`.
    pub fn psi_c_sup(&self, n_bar: f64) -> f64 {
        self.lambda_c * n_bar * self.c_inf
    }

    /// `Psi_q_inf = max |Psi_q|` over `[0, n_bar] x [0, q_inf]`.
    pub fn psi_q_sup(&self, n_bar: f64) -> f64 {
        self.lambda_q * n_bar * self.q_inf
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Necrotic-core constants (nutrient transport values do not matter here).
    pub(crate) fn necrotic() -> ModelParams {
        ModelParams {
            gamma: 10.0,
            mu: 1.0,
            nu_c: 1.0,
            nu_q: 1.0,
            r_c: 1.0,
            r_q: 1.0,
            c_supp: 1.0,
            q_supp: 1.0,
            alpha: 1.0,
            beta: 1.0,
            theta: 1.0,
            k1: 8.0,
            k2: 8.0,
            k3: 0.0,
            c_crit: 0.25,
            q_crit: 0.0,
            lambda_c: 20.0,
            lambda_q: 0.0,
            c_inf: 1.0,
            q_inf: 1.0,
        }
    }

    fn drug() -> ModelParams {
        ModelParams { k3: 4.0, lambda_q: 15.0, ..necrotic() }
    }

    #[test]
    fn pressure_law() {
        let m = necrotic();
        assert_eq!(m.pressure(0.0), 0.0);
        assert_eq!(m.pressure(1.0), 1.0);
        let m2 = ModelParams { gamma: 2.0, ..m };
        assert_eq!(m2.pressure(0.5), 0.25);
        assert_eq!(m2.pressure(-0.5), 0.25);
    }

    #[test]
    fn growth_factor_values() {
        let m = necrotic();
        assert_eq!(m.growth_factor(0.0), 1.0);
        assert_eq!(m.growth_factor(1.0), 0.0);
        let m2 = ModelParams { alpha: 2.0, beta: 1.0, theta: 2.0, ..m };
        assert_eq!(m2.growth_factor(1.0), 1.0);
        assert_eq!(m2.homeostatic_pressure(), 2f64.sqrt());
    }

    #[test]
    fn rates_at_thresholds() {
        let m = necrotic();
        assert_eq!(m.g1(1.0, 0.0), 6.0);
        assert_eq!(m.g1(0.25, 0.0), 0.0);
        assert_eq!(m.g2(0.25, 0.0), 0.0);
        let m = ModelParams { k2: 8.0, k3: 4.0, c_crit: 0.25, q_crit: 0.0, ..m };
        assert!((m.g2(0.1, 0.5) - 3.2).abs() < 1e-15);
    }

    #[test]
    fn phi_values() {
        assert_eq!(necrotic().phi(0.0, 1.0, 0.0), 6.0);
        assert_eq!(necrotic().phi(1.0, 0.6, 0.0), 0.0);
        assert_eq!(drug().phi(1.0, 1.0, 1.0), -4.0);
    }

    #[test]
    fn consumption_terms() {
        let m = drug();
        assert_eq!(m.psi_c(0.0, 0.7), 0.0);
        assert_eq!(m.psi_c(1.0, 1.0), -20.0);
        assert_eq!(m.psi_q(0.5, 1.0), -7.5);
    }

    #[test]
    fn phi_sup_matches_grid_scan() {
        for m in [necrotic(), drug()] {
            let closed = m.phi_sup();
            assert_eq!(closed, 8.0 * 0.75 * 1.0);
            // 2-D scan oracle over (p, c) at q = 0 and a q-scan at p = 0
            let mut scan = f64::NEG_INFINITY;
            for i in 0..=400 {
                let p = 3.0 * i as f64 / 400.0;
                for j in 0..=400 {
                    let c = m.c_inf * j as f64 / 400.0;
                    scan = scan.max(m.phi(p, c, 0.0));
                }
            }
            for j in 0..=400 {
                scan = scan.max(m.phi(0.0, m.c_inf, m.q_inf * j as f64 / 400.0));
            }
            assert!((scan - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_sup_at_stationary_point() {
        let m = necrotic();
        // stationarity of 6 p^{0.1} (1 - p): 0.1 (1 - p) = p
        let p_star: f64 = 1.0 / 11.0;
        let closed = p_star.powf(0.1) * 6.0 * (1.0 - p_star);
        // independent brute scan at resolution 1e-6
        let mut scan = 0f64;
        for k in 0..=1_000_000 {
            let p = k as f64 * 1e-6;
            scan = scan.max(p.powf(0.1) * 6.0 * (1.0 - p));
        }
        let s = m.growth_sup();
        assert!((s - closed).abs() < 1e-12, "{s} vs {closed}");
        assert!(s >= scan - 1e-13);
    }

    #[test]
    fn n_bar_collapses_at_zero_dt() {
        let m = necrotic();
        assert_eq!(m.n_bar_inf(0.0), m.n_inf());
        assert_eq!(m.n_inf(), 1.0);
        assert!(m.n_bar_inf(0.01) > m.n_bar_inf(0.001));
    }

    #[test]
    fn homeostatic_density_is_a_root() {
        for (a, b, t, g) in [(1.0, 1.0, 1.0, 10.0), (2.0, 0.5, 0.7, 3.0), (0.3, 2.0, 2.0, 30.0)] {
            let m = ModelParams { alpha: a, beta: b, theta: t, gamma: g, ..necrotic() };
            assert!(m.growth_factor(m.pressure(m.n_inf())).abs() < 1e-14);
        }
    }

    #[test]
    fn validation_rejects_bad_constants() {
        assert!(necrotic().validate().is_ok());
        assert!(ModelParams { gamma: -1.0, ..necrotic() }.validate().is_err());
        assert!(ModelParams { gamma: 1.5, ..necrotic() }.validate().is_err());
        assert!(ModelParams { mu: 0.0, ..necrotic() }.validate().is_err());
        assert!(ModelParams { c_supp: 2.0, ..necrotic() }.validate().is_err());
        assert!(ModelParams { k1: -1.0, ..necrotic() }.validate().is_err());
        assert!(ModelParams { theta: f64::NAN, ..necrotic() }.validate().is_err());
    }

    fn random_params(rng: &mut impl Rng) -> ModelParams {
        ModelParams {
            gamma: rng.gen_range(2.0..30.0),
            alpha: rng.gen_range(0.1..3.0),
            beta: rng.gen_range(0.1..3.0),
            theta: rng.gen_range(0.2..3.0),
            k1: rng.gen_range(0.0..50.0),
            k2: rng.gen_range(0.0..50.0),
            k3: rng.gen_range(0.0..50.0),
            c_crit: rng.gen_range(0.0..1.0),
            q_crit: rng.gen_range(0.0..1.0),
            c_inf: rng.gen_range(0.5..2.0),
            q_inf: rng.gen_range(0.5..2.0),
            ..necrotic()
        }
    }

    #[test]
    fn monotonicity_and_sign_probes() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..20_000 {
            let m = random_params(&mut rng);
            let c = rng.gen_range(0.0..m.c_inf);
            let q = rng.gen_range(0.0..m.q_inf);
            let dc = rng.gen_range(0.0..0.1);
            let dq = rng.gen_range(0.0..0.1);
            assert!(m.g1(c, q) >= 0.0 && m.g2(c, q) >= 0.0);
            assert!(m.g1(c + dc, q) >= m.g1(c, q));
            assert!(m.g2(c + dc, q) <= m.g2(c, q));
            assert!(m.g2(c, q + dq) >= m.g2(c, q));
            let p = rng.gen_range(0.0..5.0);
            let dp = rng.gen_range(0.0..1.0);
            assert!(m.phi(p + dp, c, q) <= m.phi(p, c, q));
            let pm = m.homeostatic_pressure();
            assert!(m.phi(pm + p, c, q) <= 0.0);
        }
    }

    #[test]
    fn suprema_dominate_random_triples() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let sets: Vec<ModelParams> =
            std::iter::once(necrotic()).chain(std::iter::once(drug())).chain((0..8).map(|_| random_params(&mut rng))).collect();
        let per_set = 1_000_000 / sets.len();
        for m in sets {
            let phi_sup = m.phi_sup();
            let s = m.growth_sup();
            let pm = m.homeostatic_pressure();
            for _ in 0..per_set {
                let p = rng.gen_range(0.0..3.0 * pm);
                let c = rng.gen_range(0.0..=m.c_inf);
                let q = rng.gen_range(0.0..=m.q_inf);
                let v = m.phi(p, c, q);
                assert!(v <= phi_sup);
                assert!(p.powf(1.0 / m.gamma) * v <= s + 1e-12 * s.max(1.0));
            }
        }
    }
}
