use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::forms::DifferentialForm;
use crate::geometry::{FoliationGerm, HypersurfaceGerm, MapGerm};
use crate::poly::{rat, Monomial, Polynomial};

use super::HarnessError;

/// Retries per generated object before giving up.
pub const MAX_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub max_degree: u32,
    /// Expected number of random monomials per component.
    pub density: u32,
    pub seed: u64,
    pub count: usize,
}

impl GeneratorConfig {
    pub fn new(n: usize, max_degree: u32, seed: u64, count: usize) -> Self {
        GeneratorConfig { n, max_degree, density: 2, seed, count }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n < 2 {
            return Err(HarnessError::InvalidConfig(format!("dimension {} < 2", self.n)));
        }
        if self.max_degree < 2 {
            return Err(HarnessError::InvalidConfig(format!("max degree {} < 2", self.max_degree)));
        }
        if self.count < 1 {
            return Err(HarnessError::InvalidConfig("count must be at least 1".into()));
        }
        Ok(())
    }
}

/// ChaCha8 seeded from `seed`, on the stream numbered `index`, so that
/// instance `index` is reproducible on its own.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_monomial(rng: &mut impl Rng, n: usize, degree: u32) -> Monomial {
    let mut e = vec![0u32; n];
    for _ in 0..degree {
        e[rng.random_range(0..n)] += 1;
    }
    Monomial::from_exponents(e)
}

fn random_coefficient(rng: &mut impl Rng) -> i64 {
    let c = rng.random_range(1..=3);
    if rng.random_bool(0.5) {
        -c
    } else {
        c
    }
}

/// Sum of about `density` random terms with degrees in `lo..=hi`.
fn random_polynomial(rng: &mut impl Rng, n: usize, lo: u32, hi: u32, density: u32) -> Polynomial {
    let count = rng.random_range(0..=2 * density.max(1));
    let mut p = Polynomial::zero(n);
    for _ in 0..count {
        let d = rng.random_range(lo..=hi);
        p = &p + &Polynomial::monomial(random_monomial(rng, n, d), rat(random_coefficient(rng)));
    }
    p
}

/// `g_i = x_i^{d_i} + (random terms of degree >= 1)`, regenerated until
/// finiteness is certified modulo a prime. Maps whose origin is isolated
/// only in characteristic zero are rejected along with the infinite ones.
pub fn random_finite_map(cfg: &GeneratorConfig, rng: &mut impl Rng) -> Result<MapGerm, HarnessError> {
    cfg.validate()?;
    let n = cfg.n;
    for _ in 0..MAX_ATTEMPTS {
        let components = (0..n)
            .map(|i| {
                let d = rng.random_range(1..=cfg.max_degree);
                let lead = Polynomial::monomial(Monomial::var_power(n, i, d), rat(1));
                &lead + &random_polynomial(rng, n, 1, cfg.max_degree, cfg.density)
            })
            .collect::<Vec<_>>();
        if components.iter().any(Polynomial::is_zero) {
            continue;
        }
        let g = MapGerm::new(components)?;
        if g.certainly_finite()? {
            return Ok(g);
        }
    }
    Err(HarnessError::GenerationExhausted { attempts: MAX_ATTEMPTS })
}

/// Squarefree part of a random polynomial without constant or linear terms,
/// regenerated when the reduction exposes a linear term.
pub fn random_singular_hypersurface(cfg: &GeneratorConfig, rng: &mut impl Rng) -> Result<HypersurfaceGerm, HarnessError> {
    cfg.validate()?;
    for _ in 0..MAX_ATTEMPTS {
        let psi = random_polynomial(rng, cfg.n, 2, cfg.max_degree, cfg.density + 1);
        if psi.is_zero() {
            continue;
        }
        let x = HypersurfaceGerm::reduced(&psi)?;
        if x.singular_at_origin().is_singular_at_origin {
            return Ok(x);
        }
    }
    Err(HarnessError::GenerationExhausted { attempts: MAX_ATTEMPTS })
}

/// Either `dψ` for a random singular `ψ`, or `f dh - h df` for random `f`,
/// `h` vanishing at the origin, made primitive. Both are integrable.
pub fn random_singular_foliation(cfg: &GeneratorConfig, rng: &mut impl Rng) -> Result<FoliationGerm, HarnessError> {
    cfg.validate()?;
    let n = cfg.n;
    for _ in 0..MAX_ATTEMPTS {
        let form = if rng.random_bool(0.5) {
            let psi = random_polynomial(rng, n, 2, cfg.max_degree, cfg.density + 1);
            DifferentialForm::function(psi).exterior_derivative()
        } else {
            let top = (cfg.max_degree / 2).max(1);
            let f = random_polynomial(rng, n, 1, top, cfg.density);
            let h = random_polynomial(rng, n, 1, top, cfg.density);
            let df = DifferentialForm::function(f.clone()).exterior_derivative();
            let dh = DifferentialForm::function(h.clone()).exterior_derivative();
            dh.scale(&f).sub(&df.scale(&h))?
        };
        if form.is_zero() {
            continue;
        }
        let (primitive, _) = form.primitive_part()?;
        let Ok(foliation) = FoliationGerm::new(primitive) else {
            continue;
        };
        if foliation.singular_at_origin().is_singular_at_origin {
            return Ok(foliation);
        }
    }
    Err(HarnessError::GenerationExhausted { attempts: MAX_ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::text::parse_polynomial_in;

    fn cfg(n: usize, seed: u64) -> GeneratorConfig {
        GeneratorConfig::new(n, 3, seed, 1)
    }

    #[test]
    fn finite_maps_are_finite_and_reproducible() {
        for seed in 0..10 {
            let g = random_finite_map(&cfg(2, seed), &mut instance_rng(seed, 0)).unwrap();
            assert!(g.is_finite().unwrap());
            assert_eq!(g, random_finite_map(&cfg(2, seed), &mut instance_rng(seed, 0)).unwrap());
        }
    }

    #[test]
    fn pure_power_skeleton_is_finite() {
        let n = 3;
        let g = MapGerm::new((0..n).map(|i| Polynomial::monomial(Monomial::var_power(n, i, 3), rat(1))).collect())
            .unwrap();
        assert!(g.is_finite().unwrap());
    }

    #[test]
    fn hypersurfaces_are_singular() {
        for seed in 0..10 {
            let x = random_singular_hypersurface(&cfg(3, seed), &mut instance_rng(seed, 1)).unwrap();
            assert!(x.singular_at_origin().is_singular_at_origin);
            assert_eq!(x.defining().squarefree_part().unwrap(), *x.defining());
        }
        let cusp = parse_polynomial_in("y1^2 - y2^3", 2, 'y').unwrap();
        assert!(HypersurfaceGerm::new(cusp).unwrap().singular_at_origin().is_singular_at_origin);
    }

    #[test]
    fn foliations_are_singular() {
        for seed in 0..10 {
            let f = random_singular_foliation(&cfg(3, seed), &mut instance_rng(seed, 2)).unwrap();
            assert!(f.singular_at_origin().is_singular_at_origin);
            assert!(f.form().is_integrable().unwrap());
        }
    }

    #[test]
    fn streams_differ() {
        let a = random_finite_map(&cfg(2, 5), &mut instance_rng(5, 0)).unwrap();
        let b = random_finite_map(&cfg(2, 5), &mut instance_rng(5, 1)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn config_validation() {
        assert!(GeneratorConfig::new(1, 3, 0, 1).validate().is_err());
        assert!(GeneratorConfig::new(2, 1, 0, 1).validate().is_err());
        assert!(GeneratorConfig::new(2, 2, 0, 0).validate().is_err());
        assert!(GeneratorConfig::new(2, 2, 0, 1).validate().is_ok());
    }

    #[test]
    fn coefficient_is_nonzero() {
        let mut rng = instance_rng(0, 0);
        assert!((0..100).all(|_| !rat(random_coefficient(&mut rng)).is_zero()));
    }
}
