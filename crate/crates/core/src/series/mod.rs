//! Shape polynomials and generating functions, all in exact integers.
//!
//! * `S_g(z)` counts one-backbone shapes of genus `g` by arc count
//!   (rainbow included): `sum_t kappa_t^(g) z^(2g+t) (1+z)^(2g+t-1)`.
//! * `Q'_g(z) = S_(g+1)(z) / (1+z)` counts two-backbone shapes of formal
//!   genus `g`, disconnected ones included; removing the pairs of
//!   one-backbone shapes leaves `Q_g(z)`.
//! * The fiber series of a two-backbone shape with `l` non-rainbow arcs is
//!   `C(z)^(2l+2) z^(l+2) / (1 - z C(z)^2)^(l+2)`, with `z` marking arcs
//!   plus two. `W_g` sums it over the shapes of genus `g`.

mod poly;
mod power;

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub use poly::IntPolynomial;
pub use power::PowerSeries;

/// Rows of `kappa_t^(g)`, `1 <= t <= g`, filled by the two-term recursion.
#[derive(Clone, Debug, Default)]
pub struct KappaTable {
    rows: Vec<Vec<BigInt>>,
}

impl KappaTable {
    pub fn up_to(genus: usize) -> Result<Self> {
        let mut table = KappaTable::default();
        table.extend_to(genus)?;
        Ok(table)
    }

    fn extend_to(&mut self, genus: usize) -> Result<()> {
        if self.rows.is_empty() && genus >= 1 {
            self.rows.push(vec![BigInt::one()]);
        }
        while self.rows.len() < genus {
            let g = self.rows.len() + 1;
            let prev = &self.rows[g - 2];
            let at = |t: usize| -> BigInt {
                if t >= 1 && t < g {
                    prev[t - 1].clone()
                } else {
                    BigInt::zero()
                }
            };
            let mut row = Vec::with_capacity(g);
            for t in 1..=g {
                let m = (2 * g + t) as i64;
                let rhs = BigInt::from((2 * m - 3) * (2 * m - 5))
                    * (BigInt::from(m - 2) * at(t) + BigInt::from(2 * (2 * m - 7)) * at(t - 1));
                let (q, r) = rhs.div_rem(&BigInt::from(m));
                if !r.is_zero() {
                    return Err(Error::Internal(format!("kappa recursion not integral at g={g}, t={t}")));
                }
                row.push(q);
            }
            self.rows.push(row);
        }
        Ok(())
    }

    /// `kappa_t^(g)`; zero outside `1 <= t <= g`.
    pub fn get(&self, g: usize, t: usize) -> Option<BigInt> {
        let row = self.rows.get(g.checked_sub(1)?)?;
        Some(if t >= 1 && t <= g { row[t - 1].clone() } else { BigInt::zero() })
    }

    pub fn row(&self, g: usize) -> Option<&[BigInt]> {
        self.rows.get(g.checked_sub(1)?).map(Vec::as_slice)
    }
}

fn kappa_cache() -> &'static Mutex<KappaTable> {
    static CACHE: OnceLock<Mutex<KappaTable>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(KappaTable::default()))
}

fn require_genus(g: usize) -> Result<()> {
    if g < 1 {
        return Err(Error::Precondition("genus must be at least 1".into()));
    }
    Ok(())
}

/// `kappa_t^(g)`, memoized across calls.
pub fn kappa(g: usize, t: usize) -> Result<BigInt> {
    require_genus(g)?;
    let mut cache = kappa_cache().lock().unwrap_or_else(|e| e.into_inner());
    cache.extend_to(g)?;
    Ok(cache.get(g, t).expect("row was just computed"))
}

/// `S_g(z)`, one-backbone shapes of genus `g >= 1`.
pub fn shape_poly_1bb(g: usize) -> Result<IntPolynomial> {
    require_genus(g)?;
    let mut total = IntPolynomial::zero();
    for t in 1..=g {
        let term = IntPolynomial::one_plus_z_pow(2 * g + t - 1).shift(2 * g + t);
        total = &total + &(&term * &kappa(g, t)?);
    }
    Ok(total)
}

fn exact_div_one_plus_z(p: &IntPolynomial, what: &str) -> Result<IntPolynomial> {
    let (q, r) = p.div_rem_one_plus_z();
    if !r.is_zero() {
        return Err(Error::Internal(format!("{what} is not divisible by 1+z (remainder {r})")));
    }
    Ok(q)
}

/// `A_g(z) = S_g(z) z / (1+z)`, one-backbone A-shapes.
pub fn a_shape_poly(g: usize) -> Result<IntPolynomial> {
    let s = shape_poly_1bb(g)?;
    Ok(exact_div_one_plus_z(&s, &format!("S_{g}"))?.shift(1))
}

/// `B_g(z) = S_g(z) - A_g(z)`.
pub fn b_shape_poly(g: usize) -> Result<IntPolynomial> {
    Ok(&shape_poly_1bb(g)? - &a_shape_poly(g)?)
}

/// `Q'_g(z) = S_(g+1)(z) / (1+z)`: two-backbone shapes of formal genus
/// `g`, connected or not.
pub fn generalized_shape_poly_2bb(g: usize) -> Result<IntPolynomial> {
    exact_div_one_plus_z(&shape_poly_1bb(g + 1)?, &format!("S_{}", g + 1))
}

/// `sum_(i=1..g) S_i S_(g+1-i)`: pairs of one-backbone shapes laid on two
/// backbones with formal genus `g`.
pub fn disconnected_pairs_poly(g: usize) -> Result<IntPolynomial> {
    let mut total = IntPolynomial::zero();
    for i in 1..=g {
        total = &total + &(&shape_poly_1bb(i)? * &shape_poly_1bb(g + 1 - i)?);
    }
    Ok(total)
}

/// `Q_g(z)`, connected two-backbone shapes of genus `g >= 0`.
pub fn shape_poly_2bb(g: usize) -> Result<IntPolynomial> {
    Ok(&generalized_shape_poly_2bb(g)? - &disconnected_pairs_poly(g)?)
}

/// Catalan series `C = 1 + z C^2` to order `order`.
pub fn catalan_series(order: usize) -> PowerSeries {
    let mut c: Vec<BigInt> = Vec::with_capacity(order + 1);
    c.push(BigInt::one());
    for n in 1..=order {
        let next = (0..n).map(|i| &c[i] * &c[n - 1 - i]).sum();
        c.push(next);
    }
    PowerSeries::from_coeffs(c, order)
}

/// Generating function of the matchings projecting onto one fixed
/// two-backbone shape with `l` non-rainbow arcs.
pub fn fiber_gf(l: usize, order: usize) -> Result<PowerSeries> {
    if l < 1 {
        return Err(Error::Precondition("a two-backbone shape has at least one non-rainbow arc".into()));
    }
    let c = catalan_series(order);
    let c2 = &c * &c;
    let denominator = &PowerSeries::one(order) - &c2.shift(1);
    let inflation = denominator.inverse()?.pow((l + 2) as u32);
    let sigma = c.pow((2 * l + 2) as u32);
    Ok((&sigma * &inflation).shift(l + 2))
}

/// `W_g(z)`: two-backbone matchings of genus `g` by arc count plus two.
pub fn w_gf(g: usize, order: usize) -> Result<PowerSeries> {
    let shapes = shape_poly_2bb(g)?;
    let mut total = PowerSeries::zero(order);
    for (m, q) in shapes.terms() {
        if m > order {
            break;
        }
        total = &total + &fiber_gf(m - 2, order)?.scale(q);
    }
    Ok(total)
}

/// `a_(n+1) / a_n` as an exact rational.
pub fn growth_ratio(series: &PowerSeries, n: usize) -> Result<BigRational> {
    if n + 1 > series.order() {
        return Err(Error::Precondition(format!(
            "coefficient {} is beyond the series order {}",
            n + 1,
            series.order()
        )));
    }
    let a = series.coeff(n);
    if a.is_zero() {
        return Err(Error::Precondition(format!("coefficient {n} is zero")));
    }
    Ok(BigRational::new(series.coeff(n + 1).clone(), a.clone()))
}
