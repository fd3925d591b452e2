use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::measure::MeasureValue;
use crate::norm::{NormExp, NormProfile};
use crate::prime::OddPrime;
use crate::rational::PadicRational;
use crate::regions::{Regime, RegionLabel, RegionName};
use crate::truncated::TruncatedPadic;

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: String,
    den: String,
    p: u64,
}

impl Serialize for PadicRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (n, d) = self.lowest_terms();
        RationalRepr { num: n.to_string(), den: d.to_string(), p: self.prime().get() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PadicRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = RationalRepr::deserialize(d)?;
        let p = OddPrime::new(r.p).map_err(D::Error::custom)?;
        PadicRational::parse(&alloc::format!("{}/{}", r.num, r.den), p).map_err(D::Error::custom)
    }
}

#[derive(Serialize)]
struct TruncatedRepr {
    p: u64,
    /// `null` for an exact zero.
    val: Option<i64>,
    digits: Vec<u64>,
    /// Absolute precision `N`: the value is known modulo `p^N`.
    abs_precision: Option<i64>,
}

impl Serialize for TruncatedPadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let val = match self {
            TruncatedPadic::Unit { valuation, .. } => Some(*valuation),
            TruncatedPadic::Indeterminate { abs_precision, .. } => Some(*abs_precision),
            TruncatedPadic::Zero { .. } => None,
        };
        TruncatedRepr { p: self.prime().get(), val, digits: self.digits(), abs_precision: self.abs_precision() }
            .serialize(s)
    }
}

impl Serialize for Regime {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Regime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct LabelRepr {
    regime: Regime,
    name: String,
    index: Option<u64>,
}

impl Serialize for RegionLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LabelRepr { regime: self.regime, name: self.name.as_str().into(), index: self.index }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RegionLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = LabelRepr::deserialize(d)?;
        let name: RegionName = r.name.parse().map_err(D::Error::custom)?;
        RegionLabel::new(r.regime, name, r.index).map_err(D::Error::custom)
    }
}

impl Serialize for NormExp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            NormExp::Finite(e) => s.serialize_i64(*e),
            NormExp::Zero => s.serialize_str("zero"),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ExpRepr {
    Finite(i64),
    Marker(String),
}

impl<'de> Deserialize<'de> for NormExp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ExpRepr::deserialize(d)? {
            ExpRepr::Finite(e) => Ok(NormExp::Finite(e)),
            ExpRepr::Marker(m) if m == "zero" => Ok(NormExp::Zero),
            ExpRepr::Marker(m) => Err(D::Error::custom(alloc::format!("unknown norm exponent {m:?}"))),
        }
    }
}

impl Serialize for NormProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.a, self.b].serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [a, b] = <[NormExp; 2]>::deserialize(d)?;
        Ok(NormProfile::from_exps(a, b))
    }
}

impl Serialize for MeasureValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MeasureValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}
