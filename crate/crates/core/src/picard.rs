//! Varieties, Picard-lattice arithmetic and split bundles.
//!
//! Every supported variety carries a fixed integral basis of its Picard group:
//!
//! | variety            | basis                                   |
//! |--------------------|-----------------------------------------|
//! | `P^n`              | `(h)`                                   |
//! | generic curve      | `(point)`                               |
//! | `F_r`, `P^1 x P^1` | `(f, C+)`, `C+` the section of square r |
//! | `P(E) -> X`        | basis of `X` followed by `H`            |
//!
//! On `P^1 x P^1` the second basis element `C+` is the fibre `f'` of the
//! second ruling.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};

/// Integer coordinates of a divisor class in the variety's Picard basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct DivisorClass(Vec<i64>);

impl DivisorClass {
    pub fn new(coords: Vec<i64>) -> Self {
        DivisorClass(coords)
    }

    pub fn zero(picard_rank: usize) -> Self {
        DivisorClass(vec![0; picard_rank])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Splits a class on `P(E)` into its base part and its `H`-coefficient.
    pub fn split_last(&self) -> (DivisorClass, i64) {
        let (&k, base) = self.0.split_last().expect("divisor class has no coordinates");
        (DivisorClass(base.to_vec()), k)
    }

    /// `pi^* base + k H`.
    pub fn with_last(base: &DivisorClass, k: i64) -> Self {
        let mut coords = base.0.clone();
        coords.push(k);
        DivisorClass(coords)
    }

    fn zip_with(&self, other: &DivisorClass, f: impl Fn(i64, i64) -> i64) -> DivisorClass {
        assert_eq!(self.len(), other.len(), "divisor classes over different lattices");
        DivisorClass(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul<&DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: &DivisorClass) -> DivisorClass {
        DivisorClass(rhs.0.iter().map(|c| self * c).collect())
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.iter().join(","))
    }
}

/// A direct sum of line bundles, kept as an ordered multiset of classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct SplitBundle {
    summands: Vec<DivisorClass>,
}

impl SplitBundle {
    pub fn new(summands: Vec<DivisorClass>) -> Result<Self> {
        let first = summands
            .first()
            .ok_or_else(|| Error::Parse("a split bundle needs at least one summand".into()))?;
        if summands.iter().any(|d| d.len() != first.len()) {
            return Err(Error::Mismatch(
                "summands live on lattices of different rank".into(),
            ));
        }
        Ok(SplitBundle { summands })
    }

    pub fn line(d: DivisorClass) -> Self {
        SplitBundle { summands: vec![d] }
    }

    pub fn trivial(picard_rank: usize) -> Self {
        SplitBundle::line(DivisorClass::zero(picard_rank))
    }

    pub fn summands(&self) -> &[DivisorClass] {
        &self.summands
    }

    pub fn rank(&self) -> usize {
        self.summands.len()
    }

    pub fn picard_rank(&self) -> usize {
        self.summands[0].len()
    }

    /// First Chern class, i.e. the class of the determinant.
    pub fn c1(&self) -> DivisorClass {
        self.summands
            .iter()
            .fold(DivisorClass::zero(self.picard_rank()), |acc, d| &acc + d)
    }

    pub fn dual(&self) -> SplitBundle {
        SplitBundle {
            summands: self.summands.iter().map(|d| -d).collect(),
        }
    }

    /// `E (x) O(d)`.
    pub fn twist(&self, d: &DivisorClass) -> SplitBundle {
        SplitBundle {
            summands: self.summands.iter().map(|s| s + d).collect(),
        }
    }

    pub fn tensor(&self, other: &SplitBundle) -> SplitBundle {
        SplitBundle {
            summands: self
                .summands
                .iter()
                .cartesian_product(&other.summands)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn direct_sum(&self, other: &SplitBundle) -> SplitBundle {
        SplitBundle {
            summands: self.summands.iter().chain(&other.summands).cloned().collect(),
        }
    }

    /// `Sym^k E`: one summand `sum_j D_{i_j}` per multi-index
    /// `i_1 <= ... <= i_k`, so `C(rank + k - 1, k)` summands in total.
    pub fn sym_power(&self, k: usize) -> SplitBundle {
        let zero = DivisorClass::zero(self.picard_rank());
        let summands = (0..self.rank())
            .combinations_with_replacement(k)
            .map(|idx| idx.iter().fold(zero.clone(), |acc, &i| &acc + &self.summands[i]))
            .collect();
        SplitBundle { summands }
    }

    pub fn sorted(&self) -> SplitBundle {
        let mut summands = self.summands.clone();
        summands.sort();
        SplitBundle { summands }
    }

    /// Equality as multisets, ignoring summand order.
    pub fn same_multiset(&self, other: &SplitBundle) -> bool {
        self.sorted() == other.sorted()
    }
}

impl fmt::Display for SplitBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.len() == 1 {
            write!(f, "{}", self.summands[0])
        } else {
            write!(f, "{{{}}}", self.summands.iter().join(","))
        }
    }
}

/// `P(E) -> X` for a split `E` of rank at least two over a non-bundle base.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjBundle {
    base: Box<Variety>,
    bundle: SplitBundle,
}

impl ProjBundle {
    pub fn base(&self) -> &Variety {
        &self.base
    }

    pub fn bundle(&self) -> &SplitBundle {
        &self.bundle
    }

    /// Rank of `E`, which is one more than the fibre dimension.
    pub fn rank(&self) -> usize {
        self.bundle.rank()
    }
}

/// A supported smooth projective variety.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Variety {
    ProjSpace(u32),
    Hirzebruch(u32),
    /// `P^1 x P^1`, computed as `F_0` with basis `(f, f')`.
    QuadricSurface,
    /// A curve of the given genus with Brill-Noether general line bundles.
    GenericCurve(u32),
    ProjBundle(ProjBundle),
}

impl Variety {
    pub fn proj_space(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedVariety("P0 is a point".into()));
        }
        Ok(Variety::ProjSpace(n))
    }

    pub fn hirzebruch(r: i64) -> Result<Self> {
        if r < 0 {
            return Err(Error::UnsupportedVariety(format!(
                "F{r}: use F{} instead",
                -r
            )));
        }
        Ok(Variety::Hirzebruch(r as u32))
    }

    pub fn proj_bundle(base: Variety, bundle: SplitBundle) -> Result<Self> {
        if matches!(base, Variety::ProjBundle(_)) {
            return Err(Error::UnsupportedVariety(
                "nested projective bundles are not supported".into(),
            ));
        }
        if bundle.rank() < 2 {
            return Err(Error::UnsupportedVariety(
                "a projective bundle needs a bundle of rank at least 2".into(),
            ));
        }
        base.check_bundle(&bundle)?;
        Ok(Variety::ProjBundle(ProjBundle {
            base: Box::new(base),
            bundle,
        }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Variety::ProjSpace(n) => *n as usize,
            Variety::Hirzebruch(_) | Variety::QuadricSurface => 2,
            Variety::GenericCurve(_) => 1,
            Variety::ProjBundle(pb) => pb.base.dim() + pb.rank() - 1,
        }
    }

    pub fn picard_rank(&self) -> usize {
        match self {
            Variety::ProjSpace(_) | Variety::GenericCurve(_) => 1,
            Variety::Hirzebruch(_) | Variety::QuadricSurface => 2,
            Variety::ProjBundle(pb) => pb.base.picard_rank() + 1,
        }
    }

    /// False when any cohomology on this variety relies on generic-curve rules.
    pub fn is_exact(&self) -> bool {
        match self {
            Variety::GenericCurve(_) => false,
            Variety::ProjBundle(pb) => pb.base.is_exact(),
            _ => true,
        }
    }

    pub fn as_proj_bundle(&self) -> Option<&ProjBundle> {
        match self {
            Variety::ProjBundle(pb) => Some(pb),
            _ => None,
        }
    }

    /// Hirzebruch surfaces as `P(O + O(r)) -> P^1` with `H = C+`.
    pub fn ruling(&self) -> Option<ProjBundle> {
        let r = match self {
            Variety::Hirzebruch(r) => *r as i64,
            Variety::QuadricSurface => 0,
            _ => return None,
        };
        Some(ProjBundle {
            base: Box::new(Variety::ProjSpace(1)),
            bundle: SplitBundle {
                summands: vec![DivisorClass::new(vec![0]), DivisorClass::new(vec![r])],
            },
        })
    }

    pub fn check_divisor(&self, d: &DivisorClass) -> Result<()> {
        if d.len() != self.picard_rank() {
            return Err(Error::Mismatch(format!(
                "{d} has {} coordinates but Pic({self}) has rank {}",
                d.len(),
                self.picard_rank()
            )));
        }
        Ok(())
    }

    pub fn check_bundle(&self, e: &SplitBundle) -> Result<()> {
        e.summands().iter().try_for_each(|d| self.check_divisor(d))
    }

    /// The class with every basis coordinate equal to one.
    pub fn unit_class(&self) -> DivisorClass {
        DivisorClass::new(vec![1; self.picard_rank()])
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variety::ProjSpace(n) => write!(f, "P{n}"),
            Variety::Hirzebruch(r) => write!(f, "F{r}"),
            Variety::QuadricSurface => write!(f, "P1xP1"),
            Variety::GenericCurve(g) => write!(f, "C{g}"),
            Variety::ProjBundle(pb) => write!(
                f,
                "PB({};{})",
                pb.base,
                pb.bundle.summands().iter().join(",")
            ),
        }
    }
}

impl Serialize for Variety {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Canonical class in the variety's Picard basis.
///
/// On `P(E)` this is `pi^*(K_X + c1(E)) - rank(E) H`.
pub fn canonical_class(v: &Variety) -> DivisorClass {
    match v {
        Variety::ProjSpace(n) => DivisorClass::new(vec![-(*n as i64) - 1]),
        Variety::Hirzebruch(r) => DivisorClass::new(vec![*r as i64 - 2, -2]),
        Variety::QuadricSurface => DivisorClass::new(vec![-2, -2]),
        Variety::GenericCurve(g) => DivisorClass::new(vec![2 * *g as i64 - 2]),
        Variety::ProjBundle(pb) => {
            let base = &canonical_class(&pb.base) + &pb.bundle.c1();
            DivisorClass::with_last(&base, -(pb.rank() as i64))
        }
    }
}

/// Outcome of an ampleness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ampleness {
    pub very_ample: bool,
    /// Set when only a sufficient criterion was applied, so a negative
    /// answer is not conclusive.
    pub sufficient_only: bool,
}

impl Ampleness {
    fn exact(very_ample: bool) -> Self {
        Ampleness {
            very_ample,
            sufficient_only: false,
        }
    }

    fn and(self, other: Ampleness) -> Self {
        Ampleness {
            very_ample: self.very_ample && other.very_ample,
            sufficient_only: self.sufficient_only || other.sufficient_only,
        }
    }
}

/// Very ampleness of `O(d)`.
///
/// On the toric targets ample and very ample coincide. On a generic curve of
/// genus `g >= 2` only the bound `deg >= 2g + 1` is used. On `P(E)` only
/// classes `pi^* A + H` are supported; these are decided summand-wise via
/// `E (x) O(A)` being ample.
pub fn is_very_ample(v: &Variety, d: &DivisorClass) -> Result<Ampleness> {
    v.check_divisor(d)?;
    let c = d.coords();
    Ok(match v {
        Variety::ProjSpace(_) => Ampleness::exact(c[0] >= 1),
        Variety::Hirzebruch(_) | Variety::QuadricSurface => {
            Ampleness::exact(c[0] >= 1 && c[1] >= 1)
        }
        Variety::GenericCurve(g) => Ampleness {
            very_ample: c[0] >= 2 * *g as i64 + 1,
            sufficient_only: *g >= 2,
        },
        Variety::ProjBundle(pb) => {
            let (a, k) = d.split_last();
            if k != 1 {
                return Err(Error::UnsupportedPolarisation(format!(
                    "{d}: only classes pi^*A + H are supported on {v}"
                )));
            }
            pb.bundle
                .summands()
                .iter()
                .map(|di| is_very_ample(&pb.base, &(di + &a)))
                .try_fold(Ampleness::exact(true), |acc, r| r.map(|x| acc.and(x)))?
        }
    })
}

/// Ampleness of a class on a non-bundle variety.
pub fn is_ample(v: &Variety, d: &DivisorClass) -> Result<bool> {
    match v {
        Variety::GenericCurve(_) => {
            v.check_divisor(d)?;
            Ok(d.coords()[0] >= 1)
        }
        _ => is_very_ample(v, d).map(|a| a.very_ample),
    }
}

/// Least `t >= 1` such that `pi^*(t * direction) + H` is very ample on `P(E)`.
pub fn very_ample_threshold(v: &Variety, direction: &DivisorClass) -> Result<i64> {
    let pb = v.as_proj_bundle().ok_or_else(|| {
        Error::UnsupportedVariety(format!("{v} is not a projective bundle"))
    })?;
    if !is_ample(pb.base(), direction)? {
        return Err(Error::NotAmple(direction.to_string()));
    }
    // Each summand needs at most this many steps once the direction is ample.
    let bound = pb
        .bundle
        .summands()
        .iter()
        .flat_map(|s| s.coords().iter())
        .map(|c| c.unsigned_abs() as i64)
        .max()
        .unwrap_or(0)
        + 4 * (1 + pb.base.dim() as i64)
        + match pb.base() {
            Variety::GenericCurve(g) => 2 * *g as i64 + 1,
            _ => 0,
        };
    for t in 1..=bound {
        let d = DivisorClass::with_last(&(t * direction), 1);
        if is_very_ample(v, &d)?.very_ample {
            return Ok(t);
        }
    }
    Err(Error::InternalInconsistency(format!(
        "no very ample twist along {direction} up to {bound}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dc(c: &[i64]) -> DivisorClass {
        DivisorClass::new(c.to_vec())
    }

    fn sb(cs: &[&[i64]]) -> SplitBundle {
        SplitBundle::new(cs.iter().map(|c| dc(c)).collect()).unwrap()
    }

    fn pb(base: Variety, cs: &[&[i64]]) -> Variety {
        Variety::proj_bundle(base, sb(cs)).unwrap()
    }

    #[test]
    fn canonical_classes() {
        assert_eq!(canonical_class(&Variety::ProjSpace(2)), dc(&[-3]));
        assert_eq!(canonical_class(&Variety::Hirzebruch(2)), dc(&[0, -2]));
        assert_eq!(canonical_class(&Variety::Hirzebruch(0)), dc(&[-2, -2]));
        assert_eq!(canonical_class(&Variety::QuadricSurface), dc(&[-2, -2]));
        assert_eq!(canonical_class(&Variety::GenericCurve(3)), dc(&[4]));
        let x = pb(Variety::ProjSpace(2), &[&[1], &[0]]);
        assert_eq!(canonical_class(&x), dc(&[-2, -2]));
    }

    #[test]
    fn hirzebruch_canonical_matches_bundle_formula() {
        for r in 0..6 {
            let f = Variety::Hirzebruch(r);
            let ruled = Variety::ProjBundle(f.ruling().unwrap());
            assert_eq!(canonical_class(&f), canonical_class(&ruled));
        }
    }

    #[test]
    fn sym_power_examples() {
        let e = sb(&[&[0], &[5]]);
        assert_eq!(e.sym_power(2), sb(&[&[0], &[5], &[10]]));
        assert_eq!(e.sym_power(0), sb(&[&[0]]));
        let e = sb(&[&[1], &[0], &[0]]);
        assert_eq!(e.sym_power(2), sb(&[&[2], &[1], &[1], &[0], &[0], &[0]]));
        assert_eq!(e.sym_power(1), e);
    }

    #[test]
    fn dual_and_tensor() {
        let e = sb(&[&[1, 2], &[-3, 0]]);
        assert_eq!(e.dual().dual(), e);
        assert_eq!(e.c1(), dc(&[-2, 2]));
        let t = e.tensor(&sb(&[&[1, 1], &[0, 0]]));
        assert!(t.same_multiset(&sb(&[&[2, 3], &[-2, 1], &[1, 2], &[-3, 0]])));
    }

    #[test]
    fn very_ample_examples() {
        assert!(is_very_ample(&Variety::Hirzebruch(3), &dc(&[2, 1])).unwrap().very_ample);
        assert!(!is_very_ample(&Variety::Hirzebruch(3), &dc(&[0, 1])).unwrap().very_ample);
        let x = pb(Variety::ProjSpace(2), &[&[1], &[0]]);
        assert!(!is_very_ample(&x, &dc(&[0, 1])).unwrap().very_ample);
        assert!(is_very_ample(&x, &dc(&[1, 1])).unwrap().very_ample);
        assert!(matches!(
            is_very_ample(&x, &dc(&[1, 2])),
            Err(Error::UnsupportedPolarisation(_))
        ));
        let c = is_very_ample(&Variety::GenericCurve(3), &dc(&[7])).unwrap();
        assert!(c.very_ample && c.sufficient_only);
        assert!(!is_very_ample(&Variety::GenericCurve(3), &dc(&[6])).unwrap().very_ample);
    }

    #[test]
    fn thresholds() {
        let x = pb(Variety::ProjSpace(2), &[&[1], &[0]]);
        assert_eq!(very_ample_threshold(&x, &dc(&[1])).unwrap(), 1);
        let y = pb(Variety::ProjSpace(1), &[&[0], &[3]]);
        assert_eq!(very_ample_threshold(&y, &dc(&[1])).unwrap(), 1);
        let z = pb(Variety::Hirzebruch(2), &[&[0, 0], &[-1, 0]]);
        assert_eq!(very_ample_threshold(&z, &dc(&[1, 1])).unwrap(), 2);
        assert!(matches!(
            very_ample_threshold(&z, &dc(&[1, 0])),
            Err(Error::NotAmple(_))
        ));
        let w = pb(Variety::ProjSpace(2), &[&[-3], &[2]]);
        assert_eq!(very_ample_threshold(&w, &dc(&[2])).unwrap(), 2);
    }

    #[test]
    fn bundle_validation() {
        assert!(Variety::proj_bundle(Variety::ProjSpace(2), sb(&[&[1]])).is_err());
        let x = pb(Variety::ProjSpace(2), &[&[1], &[0]]);
        assert!(Variety::proj_bundle(x.clone(), sb(&[&[1, 0], &[0, 0]])).is_err());
        assert!(Variety::proj_bundle(Variety::ProjSpace(2), sb(&[&[1, 0], &[0, 0]])).is_err());
        assert!(Variety::hirzebruch(-1).is_err());
        assert_eq!(x.dim(), 3);
        assert_eq!(x.picard_rank(), 2);
    }
}
