//! Cohomology tables of split bundles.
//!
//! Line bundles on `P^n` follow Bott's formula. Hirzebruch surfaces are
//! treated as `P(O + O(r)) -> P^1`, and every projective bundle pushes its
//! classes `B + kH` down to the base:
//!
//! * `k >= 0`: `pi_* O(kH) = Sym^k E`, no higher direct images;
//! * `-rank < k < 0`: all direct images vanish;
//! * `k <= -rank`: only `R^n pi_*` survives and equals
//!   `Sym^{-k-rank}(E)^v (x) O(-c1(E))`, contributing in degrees shifted by the
//!   fibre dimension `n`.

pub mod oracle;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bigjson;
use crate::error::{Error, Result};
use crate::picard::{DivisorClass, ProjBundle, SplitBundle, Variety};

/// `h^0 .. h^dim` together with the Euler characteristic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyTable {
    #[serde(serialize_with = "bigjson::uint_seq")]
    h: Vec<BigUint>,
    #[serde(serialize_with = "bigjson::int")]
    chi: BigInt,
    generic: bool,
}

impl CohomologyTable {
    pub fn new(h: Vec<BigUint>, generic: bool) -> Self {
        let chi = h.iter().enumerate().fold(BigInt::zero(), |acc, (i, x)| {
            let x = BigInt::from(x.clone());
            if i % 2 == 0 {
                acc + x
            } else {
                acc - x
            }
        });
        CohomologyTable { h, chi, generic }
    }

    pub fn from_u64(h: &[u64]) -> Self {
        CohomologyTable::new(h.iter().map(|&x| BigUint::from(x)).collect(), false)
    }

    pub fn zero(dim: usize, generic: bool) -> Self {
        CohomologyTable::new(vec![BigUint::zero(); dim + 1], generic)
    }

    pub fn h(&self) -> &[BigUint] {
        &self.h
    }

    pub fn chi(&self) -> &BigInt {
        &self.chi
    }

    pub fn is_generic(&self) -> bool {
        self.generic
    }

    pub fn dim(&self) -> usize {
        self.h.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().all(Zero::is_zero)
    }

    /// Entries as `u64`, for tests and display. Panics on overflow.
    pub fn to_u64(&self) -> Vec<u64> {
        self.h
            .iter()
            .map(|x| u64::try_from(x).expect("cohomology dimension exceeds u64"))
            .collect()
    }

    pub fn with_generic(mut self, generic: bool) -> Self {
        self.generic |= generic;
        self
    }

    /// Entrywise sum; both tables must have the same length.
    pub fn add(&self, other: &CohomologyTable) -> CohomologyTable {
        assert_eq!(self.h.len(), other.h.len(), "adding tables of different dimension");
        CohomologyTable {
            h: self.h.iter().zip(&other.h).map(|(a, b)| a + b).collect(),
            chi: &self.chi + &other.chi,
            generic: self.generic || other.generic,
        }
    }

    /// Places this table in degrees `shift..` of a table of dimension `dim`.
    pub fn shifted(&self, shift: usize, dim: usize) -> CohomologyTable {
        let mut h = vec![BigUint::zero(); dim + 1];
        for (i, x) in self.h.iter().enumerate() {
            h[i + shift] = x.clone();
        }
        CohomologyTable::new(h, self.generic)
    }
}

/// Binomial coefficient over arbitrary-precision integers; zero for `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// A sheaf on a base variety whose twists by line bundles have computable
/// cohomology. Projective-bundle cohomology of `pi^* S (x) O(B + kH)` only
/// needs this.
pub trait BaseSheaf {
    fn rank(&self) -> usize;

    /// Cohomology of `self (x) O(twist)` on `v`.
    fn twisted_cohomology(&self, v: &Variety, twist: &DivisorClass) -> Result<CohomologyTable>;
}

impl BaseSheaf for SplitBundle {
    fn rank(&self) -> usize {
        SplitBundle::rank(self)
    }

    fn twisted_cohomology(&self, v: &Variety, twist: &DivisorClass) -> Result<CohomologyTable> {
        v.check_divisor(twist)?;
        v.check_bundle(self)?;
        self.summands()
            .iter()
            .map(|d| line_cohomology(v, &(d + twist)))
            .try_fold(CohomologyTable::zero(v.dim(), !v.is_exact()), |acc, t| {
                t.map(|t| acc.add(&t))
            })
    }
}

fn bott(n: u32, d: i64) -> CohomologyTable {
    let n = n as usize;
    let mut h = vec![BigUint::zero(); n + 1];
    if d >= 0 {
        h[0] = binomial(n as u64 + d as u64, n as u64);
    } else if d <= -(n as i64) - 1 {
        h[n] = binomial((-d - 1) as u64, n as u64);
    }
    CohomologyTable::new(h, false)
}

/// Table of a general line bundle of degree `d` on a curve of genus `g`.
fn generic_curve(g: u32, d: i64) -> CohomologyTable {
    let rr = d - g as i64 + 1;
    let h0 = rr.max(0);
    let h1 = h0 - rr;
    CohomologyTable::new(vec![BigUint::from(h0 as u64), BigUint::from(h1 as u64)], true)
}

/// Cohomology of the line bundle `O(d)`.
pub fn line_cohomology(v: &Variety, d: &DivisorClass) -> Result<CohomologyTable> {
    v.check_divisor(d)?;
    match v {
        Variety::ProjSpace(n) => Ok(bott(*n, d.coords()[0])),
        Variety::GenericCurve(g) => Ok(generic_curve(*g, d.coords()[0])),
        Variety::Hirzebruch(_) | Variety::QuadricSurface => {
            let ruling = v.ruling().expect("surface is ruled");
            pushforward(&ruling, &SplitBundle::trivial(1), d)
        }
        Variety::ProjBundle(pb) => {
            pushforward(pb, &SplitBundle::trivial(pb.base().picard_rank()), d)
        }
    }
}

/// Cohomology of `pi^* sheaf (x) O(B + kH)` on `P(E)`, where `d = (B, k)`.
pub fn pushforward<S: BaseSheaf + ?Sized>(
    pb: &ProjBundle,
    sheaf: &S,
    d: &DivisorClass,
) -> Result<CohomologyTable> {
    let base = pb.base();
    let e = pb.bundle();
    let rho = e.rank() as i64;
    let fibre = e.rank() - 1;
    let dim = base.dim() + fibre;
    let generic = !base.is_exact();
    let (b, k) = d.split_last();
    if k >= 0 {
        let mut table = CohomologyTable::zero(base.dim(), generic);
        for s in e.sym_power(k as usize).summands() {
            table = table.add(&sheaf.twisted_cohomology(base, &(&b + s))?);
        }
        Ok(table.shifted(0, dim))
    } else if k > -rho {
        Ok(CohomologyTable::zero(dim, generic))
    } else {
        let m = (-k - rho) as usize;
        let shift = &b - &e.c1();
        let mut table = CohomologyTable::zero(base.dim(), generic);
        for s in e.sym_power(m).summands() {
            table = table.add(&sheaf.twisted_cohomology(base, &(&shift - s))?);
        }
        Ok(table.shifted(fibre, dim))
    }
}

/// Cohomology of `pi^* sheaf (x) O(d)` on `v`, or of `sheaf (x) O(d)` when
/// `v` is not a projective bundle.
pub fn sheaf_cohomology<S: BaseSheaf + ?Sized>(
    v: &Variety,
    sheaf: &S,
    d: &DivisorClass,
) -> Result<CohomologyTable> {
    match v {
        Variety::ProjBundle(pb) => {
            v.check_divisor(d)?;
            pushforward(pb, sheaf, d)
        }
        _ => sheaf.twisted_cohomology(v, d),
    }
}

/// Cohomology table of a split bundle.
pub fn cohomology(v: &Variety, e: &SplitBundle) -> Result<CohomologyTable> {
    e.twisted_cohomology(v, &DivisorClass::zero(v.picard_rank()))
}

/// Dimensions of `Ext^i(e1, e2)`, i.e. the cohomology of `e1^v (x) e2`.
pub fn hom_complex_dims(v: &Variety, e1: &SplitBundle, e2: &SplitBundle) -> Result<CohomologyTable> {
    cohomology(v, &e1.dual().tensor(e2))
}

fn binomial_polynomial(n: u32, d: i64) -> BigInt {
    // C(n + d, n) as a polynomial in d: (d+1)(d+2)...(d+n) / n!
    let num = (1..=n as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(d + i));
    let den = (1..=n as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    num / den
}

fn hirzebruch_chi(r: i64, a: i64, b: i64) -> BigInt {
    let a = BigInt::from(a);
    let b = BigInt::from(b);
    (&a + 1) * (&b + 1) + BigInt::from(r) * &b * (&b + 1) / 2
}

/// Euler characteristic of a line bundle from closed Riemann-Roch polynomials.
///
/// On `P(E)` the value is interpolated in the `H`-coefficient from the
/// non-negative range, where only `pi_* = Sym^k E` is involved.
fn line_chi(v: &Variety, d: &DivisorClass) -> Result<BigInt> {
    let c = d.coords();
    match v {
        Variety::ProjSpace(n) => Ok(binomial_polynomial(*n, c[0])),
        Variety::Hirzebruch(r) => Ok(hirzebruch_chi(*r as i64, c[0], c[1])),
        Variety::QuadricSurface => Ok(hirzebruch_chi(0, c[0], c[1])),
        Variety::GenericCurve(_) => Err(Error::GenericModeUnsupported),
        Variety::ProjBundle(pb) => {
            let (b, k) = d.split_last();
            let chi_at = |k: i64| -> Result<BigInt> {
                pb.bundle()
                    .sym_power(k as usize)
                    .summands()
                    .iter()
                    .map(|s| line_chi(pb.base(), &(&b + s)))
                    .sum()
            };
            if k >= 0 {
                return chi_at(k);
            }
            // Lagrange interpolation through k = 0..=dim.
            let nodes: Vec<i64> = (0..=v.dim() as i64).collect();
            let values = nodes.iter().map(|&x| chi_at(x)).collect::<Result<Vec<_>>>()?;
            let target = BigRational::from_integer(BigInt::from(k));
            let mut acc = BigRational::zero();
            for (i, (&xi, yi)) in nodes.iter().zip(&values).enumerate() {
                let mut term = BigRational::from_integer(yi.clone());
                for (j, &xj) in nodes.iter().enumerate() {
                    if i != j {
                        term *= (&target - BigRational::from_integer(BigInt::from(xj)))
                            / BigRational::from_integer(BigInt::from(xi - xj));
                    }
                }
                acc += term;
            }
            if !acc.is_integer() {
                return Err(Error::InternalInconsistency(format!(
                    "interpolated Euler characteristic {acc} is not an integer"
                )));
            }
            Ok(acc.to_integer())
        }
    }
}

/// Euler characteristic of a split bundle, computed independently of the
/// cohomology tables.
pub fn euler_characteristic(v: &Variety, e: &SplitBundle) -> Result<BigInt> {
    if !v.is_exact() {
        return Err(Error::GenericModeUnsupported);
    }
    v.check_bundle(e)?;
    e.summands().iter().map(|d| line_chi(v, d)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_bundle, parse_variety};
    use crate::picard::canonical_class;

    fn coh(v: &str, e: &str) -> CohomologyTable {
        let v = parse_variety(v).unwrap();
        let e = parse_bundle(&v, e).unwrap();
        cohomology(&v, &e).unwrap()
    }

    fn hom(v: &str, a: &str, b: &str) -> Vec<u64> {
        let v = parse_variety(v).unwrap();
        let a = parse_bundle(&v, a).unwrap();
        let b = parse_bundle(&v, b).unwrap();
        hom_complex_dims(&v, &a, &b).unwrap().to_u64()
    }

    fn chi(v: &str, e: &str) -> i64 {
        let v = parse_variety(v).unwrap();
        let e = parse_bundle(&v, e).unwrap();
        i64::try_from(euler_characteristic(&v, &e).unwrap()).unwrap()
    }

    #[test]
    fn cohomology_examples() {
        assert_eq!(coh("P2", "[-3]").to_u64(), [0, 0, 1]);
        assert_eq!(coh("F2", "[1,-1]").to_u64(), [0, 0, 0]);
        assert_eq!(coh("F1", "[0,1]").to_u64(), [3, 0, 0]);
        assert_eq!(coh("F2", "[1,-2]").to_u64(), [0, 0, 0]);
        assert_eq!(coh("F2", "[0,-2]").to_u64(), [0, 0, 1]);
        let c = coh("C3", "[2]");
        assert_eq!(c.to_u64(), [0, 0]);
        assert!(c.is_generic());
        assert_eq!(coh("PB(P2;[1],[0])", "[-2,-2]").to_u64(), [0, 0, 0, 1]);
        assert!(!coh("PB(P2;[1],[0])", "[-2,-2]").is_generic());
    }

    #[test]
    fn bott_values() {
        assert_eq!(coh("P3", "[2]").to_u64(), [10, 0, 0, 0]);
        assert_eq!(coh("P3", "[-6]").to_u64(), [0, 0, 0, 10]);
        assert_eq!(coh("P3", "[-2]").to_u64(), [0, 0, 0, 0]);
        assert_eq!(coh("P1", "[-1]").to_u64(), [0, 0]);
        assert_eq!(coh("P2", "{[1],[0],[-4]}").to_u64(), [4, 0, 3]);
    }

    #[test]
    fn table_chi_matches_alternating_sum() {
        let t = coh("P2", "{[1],[0],[-4]}");
        assert_eq!(t.chi(), &BigInt::from(7));
    }

    #[test]
    fn generic_curve_rules() {
        assert_eq!(coh("C0", "[-1]").to_u64(), [0, 0]);
        assert_eq!(coh("C2", "[0]").to_u64(), [0, 1]);
        assert_eq!(coh("C2", "[5]").to_u64(), [4, 0]);
        assert_eq!(coh("C2", "[-3]").to_u64(), [0, 4]);
        assert!(coh("PB(C1;[0],[1])", "[0,0]").is_generic());
    }

    #[test]
    fn hom_examples() {
        assert_eq!(hom("P2", "{[1],[0]}", "[1]"), [4, 0, 0]);
        assert_eq!(hom("P2", "[0]", "[-4]"), [0, 0, 3]);
        assert_eq!(hom("P1", "{[0],[2]}", "[-1]"), [0, 2]);
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi("F2", "[1,1]"), 6);
        assert_eq!(chi("P3", "[-4]"), -1);
        assert_eq!(chi("F1", "[0,0]"), 1);
        let v = parse_variety("C2").unwrap();
        assert_eq!(
            euler_characteristic(&v, &SplitBundle::trivial(1)),
            Err(Error::GenericModeUnsupported)
        );
    }

    #[test]
    fn chi_agrees_with_tables_on_bundles() {
        for v in ["PB(P2;[1],[0])", "PB(P1;[0],[1],[3])", "PB(F1;[0,0],[1,-1])", "PB(P1xP1;[0,0],[0,1])"] {
            let var = parse_variety(v).unwrap();
            for k in -6..4 {
                for b in -3..3 {
                    let mut coords = vec![b; var.picard_rank() - 1];
                    coords.push(k);
                    let e = SplitBundle::line(DivisorClass::new(coords));
                    let t = cohomology(&var, &e).unwrap();
                    assert_eq!(t.chi(), &euler_characteristic(&var, &e).unwrap(), "{v} {e}");
                }
            }
        }
    }

    #[test]
    fn serre_duality_on_exact_varieties() {
        for v in ["P1", "P2", "P3", "F0", "F1", "F3", "P1xP1", "PB(P2;[1],[0])", "PB(P1;[0],[2])"] {
            let var = parse_variety(v).unwrap();
            let k = canonical_class(&var);
            let n = var.dim();
            let rank = var.picard_rank();
            let range: Vec<i64> = (-4..=4).collect();
            for coords in itertools::Itertools::multi_cartesian_product(
                std::iter::repeat(range.iter().copied()).take(rank),
            ) {
                let d = DivisorClass::new(coords);
                let a = line_cohomology(&var, &d).unwrap();
                let b = line_cohomology(&var, &(&k - &d)).unwrap();
                for i in 0..=n {
                    assert_eq!(a.h()[i], b.h()[n - i], "{v} {d} degree {i}");
                }
            }
        }
    }

    #[test]
    fn json_field_order() {
        let t = coh("P2", "[-3]");
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"h":[0,0,1],"chi":1,"generic":false}"#
        );
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(2, 5), BigUint::zero());
        assert_eq!(binomial(60, 30).to_string(), "118264581564861424");
    }
}
