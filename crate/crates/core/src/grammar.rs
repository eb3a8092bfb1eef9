//! Text syntax for varieties, divisors and split bundles.
//!
//! ```text
//! variety := "P" INT | "F" INT | "P1xP1" | "C" INT
//!          | "PB(" variety ";" divisor ("," divisor)* ")"
//! divisor := "[" INT ("," INT)* (";" basis)? "]"
//! basis   := "C+" | "C-"
//! bundle  := divisor | "{" divisor ("," divisor)* "}"
//! ```
//!
//! Whitespace is ignored. On Hirzebruch surfaces a divisor may be given in the
//! basis `(f, C-)`; it is converted to `(f, C+)` using `C+ = C- + r f`.

use crate::error::{Error, Result};
use crate::picard::{DivisorClass, SplitBundle, Variety};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn fail<T>(&self, what: &str) -> Result<T> {
        Err(Error::Parse(format!(
            "expected {what} at offset {} in `{}`",
            self.pos, self.src
        )))
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.fail(&format!("`{token}`"))
        }
    }

    fn int(&mut self) -> Result<i64> {
        let rest = self.rest();
        let sign = usize::from(rest.starts_with('-') || rest.starts_with('+'));
        let digits = rest[sign..].bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return self.fail("an integer");
        }
        let text = &rest[..sign + digits];
        let value = text
            .parse()
            .map_err(|_| Error::Parse(format!("integer `{text}` out of range")))?;
        self.pos += sign + digits;
        Ok(value)
    }

    fn finish(&self) -> Result<()> {
        if self.rest().is_empty() {
            Ok(())
        } else {
            self.fail("end of input")
        }
    }

    fn variety(&mut self) -> Result<Variety> {
        if self.eat("PB(") {
            let base = self.variety()?;
            self.expect(";")?;
            let mut summands = vec![self.divisor(&base)?];
            while self.eat(",") {
                summands.push(self.divisor(&base)?);
            }
            self.expect(")")?;
            return Variety::proj_bundle(base, SplitBundle::new(summands)?);
        }
        if self.eat("P1xP1") {
            return Ok(Variety::QuadricSurface);
        }
        if self.eat("P") {
            let n = self.int()?;
            return u32::try_from(n)
                .map_err(|_| Error::UnsupportedVariety(format!("P{n}")))
                .and_then(Variety::proj_space);
        }
        if self.eat("F") {
            let r = self.int()?;
            return Variety::hirzebruch(r);
        }
        if self.eat("C") {
            let g = self.int()?;
            let g = u32::try_from(g)
                .map_err(|_| Error::UnsupportedVariety(format!("curve of genus {g}")))?;
            return Ok(Variety::GenericCurve(g));
        }
        self.fail("a variety")
    }

    fn divisor(&mut self, v: &Variety) -> Result<DivisorClass> {
        self.expect("[")?;
        let mut coords = vec![self.int()?];
        while self.eat(",") {
            coords.push(self.int()?);
        }
        let minus_basis = if self.eat(";") {
            if self.eat("C-") {
                true
            } else if self.eat("C+") {
                false
            } else {
                return self.fail("`C+` or `C-`");
            }
        } else {
            false
        };
        self.expect("]")?;
        if minus_basis {
            let r = match v {
                Variety::Hirzebruch(r) => *r as i64,
                Variety::QuadricSurface => 0,
                Variety::ProjBundle(pb) => match pb.base() {
                    Variety::Hirzebruch(r) => *r as i64,
                    Variety::QuadricSurface => 0,
                    _ => return Err(Error::Parse(format!("basis C- is meaningless on {v}"))),
                },
                _ => return Err(Error::Parse(format!("basis C- is meaningless on {v}"))),
            };
            if coords.len() < 2 {
                return Err(Error::Parse("basis C- needs (f, C-) coordinates".into()));
            }
            // a f + b C- = (a - r b) f + b C+
            coords[0] -= r * coords[1];
        }
        let d = DivisorClass::new(coords);
        v.check_divisor(&d)?;
        Ok(d)
    }

    fn bundle(&mut self, v: &Variety) -> Result<SplitBundle> {
        if self.eat("{") {
            let mut summands = vec![self.divisor(v)?];
            while self.eat(",") {
                summands.push(self.divisor(v)?);
            }
            self.expect("}")?;
            SplitBundle::new(summands)
        } else {
            Ok(SplitBundle::line(self.divisor(v)?))
        }
    }
}

fn strip(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

pub fn parse_variety(s: &str) -> Result<Variety> {
    let s = strip(s);
    let mut c = Cursor::new(&s);
    let v = c.variety()?;
    c.finish()?;
    Ok(v)
}

/// Parses a divisor class on `v`.
pub fn parse_divisor(v: &Variety, s: &str) -> Result<DivisorClass> {
    let s = strip(s);
    let mut c = Cursor::new(&s);
    let d = c.divisor(v)?;
    c.finish()?;
    Ok(d)
}

/// Parses a split bundle on `v`.
pub fn parse_bundle(v: &Variety, s: &str) -> Result<SplitBundle> {
    let s = strip(s);
    let mut c = Cursor::new(&s);
    let e = c.bundle(v)?;
    c.finish()?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_varieties() {
        assert_eq!(parse_variety("P2").unwrap(), Variety::ProjSpace(2));
        assert_eq!(parse_variety("F3").unwrap(), Variety::Hirzebruch(3));
        assert_eq!(parse_variety("P1xP1").unwrap(), Variety::QuadricSurface);
        assert_eq!(parse_variety("C4").unwrap(), Variety::GenericCurve(4));
        let pb = parse_variety("PB( P2 ; [1], [0] )").unwrap();
        assert_eq!(pb.to_string(), "PB(P2;[1],[0])");
        assert_eq!(pb.dim(), 3);
        let pb = parse_variety("PB(P1xP1;[0,0],[0,1])").unwrap();
        assert_eq!(pb.picard_rank(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        for s in ["F-2", "P0", "PB(P2;[1])", "PB(PB(P1;[0],[1]);[0,0],[0,0])", "P2x", "Q", "PB(P2;[1,0],[0])"] {
            assert!(parse_variety(s).is_err(), "{s}");
        }
        let p2 = Variety::ProjSpace(2);
        assert!(parse_divisor(&p2, "[1,2]").is_err());
        assert!(parse_divisor(&p2, "[1;C-]").is_err());
        assert!(parse_bundle(&p2, "{}").is_err());
    }

    #[test]
    fn minus_basis_converts() {
        let f2 = Variety::Hirzebruch(2);
        // C- = C+ - 2f
        assert_eq!(parse_divisor(&f2, "[0,1;C-]").unwrap().coords(), &[-2, 1]);
        assert_eq!(parse_divisor(&f2, "[1,1;C+]").unwrap().coords(), &[1, 1]);
        let pb = parse_variety("PB(F1;[0,0],[0,-1;C-])").unwrap();
        assert_eq!(pb.to_string(), "PB(F1;[0,0],[1,-1])");
    }

    #[test]
    fn parses_bundles() {
        let p2 = Variety::ProjSpace(2);
        assert_eq!(parse_bundle(&p2, "{[1],[0],[-2]}").unwrap().rank(), 3);
        assert_eq!(parse_bundle(&p2, "[-3]").unwrap().rank(), 1);
    }

    fn arb_base() -> impl Strategy<Value = Variety> {
        prop_oneof![
            (1u32..5).prop_map(Variety::ProjSpace),
            (0u32..6).prop_map(Variety::Hirzebruch),
            Just(Variety::QuadricSurface),
            (0u32..5).prop_map(Variety::GenericCurve),
        ]
    }

    fn arb_variety() -> impl Strategy<Value = Variety> {
        arb_base().prop_flat_map(|base| {
            let rho = base.picard_rank();
            let b = base.clone();
            prop_oneof![
                Just(base),
                prop::collection::vec(prop::collection::vec(-9i64..9, rho), 2..5).prop_map(
                    move |cs| {
                        let e = SplitBundle::new(cs.into_iter().map(DivisorClass::new).collect())
                            .unwrap();
                        Variety::proj_bundle(b.clone(), e).unwrap()
                    }
                )
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(v in arb_variety(), coords in prop::collection::vec(-20i64..20, 4)) {
            prop_assert_eq!(parse_variety(&v.to_string()).unwrap(), v.clone());
            let d = DivisorClass::new(coords[..v.picard_rank()].to_vec());
            prop_assert_eq!(parse_divisor(&v, &d.to_string()).unwrap(), d.clone());
            let e = SplitBundle::new(vec![d.clone(), &d + &d]).unwrap();
            prop_assert_eq!(parse_bundle(&v, &e.to_string()).unwrap(), e);
        }
    }
}
