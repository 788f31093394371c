#![allow(dead_code)]

use germtools::poly::{rat, Monomial};
use germtools::text::{parse_form_in, parse_polynomial_in};
use germtools::{DifferentialForm, FoliationGerm, HypersurfaceGerm, MapGerm, Polynomial};
use rand::Rng;

pub fn x(s: &str, n: usize) -> Polynomial {
    parse_polynomial_in(s, n, 'x').unwrap()
}

pub fn y(s: &str, n: usize) -> Polynomial {
    parse_polynomial_in(s, n, 'y').unwrap()
}

pub fn xform(s: &str, n: usize) -> DifferentialForm {
    parse_form_in(s, n, 'x').unwrap()
}

pub fn yform(s: &str, n: usize) -> DifferentialForm {
    parse_form_in(s, n, 'y').unwrap()
}

pub fn map(parts: &[&str]) -> MapGerm {
    MapGerm::new(parts.iter().map(|p| x(p, parts.len())).collect()).unwrap()
}

pub fn hypersurface(s: &str, n: usize) -> HypersurfaceGerm {
    HypersurfaceGerm::new(y(s, n)).unwrap()
}

pub fn foliation(s: &str, n: usize) -> FoliationGerm {
    FoliationGerm::new(yform(s, n)).unwrap()
}

/// `terms` random monomials of degree `lo..=hi` with coefficients in -3..=3.
pub fn random_poly(rng: &mut impl Rng, n: usize, lo: u32, hi: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(n);
    for _ in 0..terms {
        let mut e = vec![0u32; n];
        for _ in 0..rng.random_range(lo..=hi) {
            e[rng.random_range(0..n)] += 1;
        }
        let c = rng.random_range(-3i64..=3);
        p = &p + &Polynomial::monomial(Monomial::from_exponents(e), rat(c));
    }
    p
}

pub fn random_one_form(rng: &mut impl Rng, n: usize, hi: u32) -> DifferentialForm {
    DifferentialForm::one_form((0..n).map(|_| random_poly(rng, n, 0, hi, 2)).collect())
}
