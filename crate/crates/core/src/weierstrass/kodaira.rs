//! Kodaira types from vanishing orders of `A`, `B` and `4A^3 + 27B^2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KodairaType {
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaType {
    /// Topological Euler number of the fiber.
    pub fn euler_number(self) -> u32 {
        match self {
            KodairaType::I(n) => n,
            KodairaType::II => 2,
            KodairaType::III => 3,
            KodairaType::IV => 4,
            KodairaType::IStar(n) => n + 6,
            KodairaType::IVStar => 8,
            KodairaType::IIIStar => 9,
            KodairaType::IIStar => 10,
        }
    }
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaType::I(n) => write!(f, "I{n}"),
            KodairaType::II => f.write_str("II"),
            KodairaType::III => f.write_str("III"),
            KodairaType::IV => f.write_str("IV"),
            KodairaType::IStar(n) => write!(f, "I{n}*"),
            KodairaType::IVStar => f.write_str("IV*"),
            KodairaType::IIIStar => f.write_str("III*"),
            KodairaType::IIStar => f.write_str("II*"),
        }
    }
}

impl FromStr for KodairaType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "II" => KodairaType::II,
            "III" => KodairaType::III,
            "IV" => KodairaType::IV,
            "IV*" => KodairaType::IVStar,
            "III*" => KodairaType::IIIStar,
            "II*" => KodairaType::IIStar,
            _ => {
                let bad = || format!("unknown Kodaira type {s:?}");
                let rest = s.strip_prefix('I').ok_or_else(bad)?;
                match rest.strip_suffix('*') {
                    Some(n) => KodairaType::IStar(n.parse().map_err(|_| bad())?),
                    None => KodairaType::I(rest.parse().map_err(|_| bad())?),
                }
            }
        })
    }
}

impl Serialize for KodairaType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for KodairaType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Smooth,
    Singular(KodairaType),
    NonMinimal,
    /// Orders that no Weierstrass equation can produce.
    Inconsistent,
}

/// Table lookup. `None` stands for an identically vanishing coefficient.
pub fn classify(ord_a: Option<u32>, ord_b: Option<u32>, ord_delta: u32) -> Classification {
    let a = ord_a.unwrap_or(u32::MAX);
    let b = ord_b.unwrap_or(u32::MAX);
    if a >= 4 && b >= 6 {
        return Classification::NonMinimal;
    }
    if ord_delta == 0 {
        return Classification::Smooth;
    }
    let t = if a == 0 && b == 0 {
        KodairaType::I(ord_delta)
    } else if a == 0 || b == 0 {
        return Classification::Inconsistent;
    } else if b == 1 {
        KodairaType::II
    } else if a == 1 {
        KodairaType::III
    } else if b == 2 {
        KodairaType::IV
    } else if b == 3 {
        if a == 2 {
            match ord_delta.checked_sub(6) {
                Some(n) => KodairaType::IStar(n),
                None => return Classification::Inconsistent,
            }
        } else {
            KodairaType::IStar(0)
        }
    } else if a == 2 {
        KodairaType::IStar(0)
    } else if b == 4 {
        KodairaType::IVStar
    } else if a == 3 {
        KodairaType::IIIStar
    } else {
        KodairaType::IIStar
    };
    if t.euler_number() == ord_delta {
        Classification::Singular(t)
    } else {
        Classification::Inconsistent
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Order at 0 of `4A^3 + 27B^2` for `A = z^a`, `B = z^b`; the lowest terms
    /// never cancel since `4 + 27 != 0`.
    fn monomial_orders(a: Option<u32>, b: Option<u32>) -> u32 {
        match (a, b) {
            (Some(a), Some(b)) => (3 * a).min(2 * b),
            (Some(a), None) => 3 * a,
            (None, Some(b)) => 2 * b,
            (None, None) => unreachable!(),
        }
    }

    #[test]
    fn table_rows() {
        let cases = [
            (Some(0), Some(0), 1, KodairaType::I(1)),
            (Some(0), Some(0), 7, KodairaType::I(7)),
            (None, Some(1), 2, KodairaType::II),
            (Some(1), None, 3, KodairaType::III),
            (Some(3), Some(2), 4, KodairaType::IV),
            (Some(2), Some(3), 6, KodairaType::IStar(0)),
            (Some(2), Some(3), 9, KodairaType::IStar(3)),
            (None, Some(4), 8, KodairaType::IVStar),
            (Some(3), None, 9, KodairaType::IIIStar),
            (Some(4), Some(5), 10, KodairaType::IIStar),
        ];
        for (a, b, d, t) in cases {
            assert_eq!(
                classify(a, b, d),
                Classification::Singular(t),
                "{a:?} {b:?} {d}"
            );
        }
    }

    #[test]
    fn monomial_families_have_matching_euler_numbers() {
        for a in (0..4).map(Some).chain([None]) {
            for b in (0..6).map(Some).chain([None]) {
                if a.is_none() && b.is_none() {
                    continue;
                }
                let d = monomial_orders(a, b);
                match classify(a, b, d) {
                    Classification::Singular(t) => assert_eq!(t.euler_number(), d),
                    Classification::Smooth => assert_eq!(d, 0),
                    other => panic!("{a:?} {b:?} {d}: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn non_minimal_and_inconsistent() {
        assert_eq!(classify(Some(4), Some(6), 12), Classification::NonMinimal);
        assert_eq!(classify(None, None, 0), Classification::NonMinimal);
        assert_eq!(classify(Some(0), Some(1), 1), Classification::Inconsistent);
        assert_eq!(classify(Some(0), Some(0), 0), Classification::Smooth);
    }

    #[test]
    fn names_roundtrip() {
        for t in [
            KodairaType::I(1),
            KodairaType::I(12),
            KodairaType::II,
            KodairaType::IStar(0),
            KodairaType::IStar(4),
            KodairaType::IIStar,
            KodairaType::IIIStar,
            KodairaType::IVStar,
        ] {
            assert_eq!(t.to_string().parse::<KodairaType>().unwrap(), t);
        }
        assert!("I-1".parse::<KodairaType>().is_err());
    }
}
