//! Serde adapters: complex numbers are stored as `[re, im]` arrays so the
//! JSON artifacts are self-describing and easy to load from other tools.

/// For `Complex64` fields: `#[serde(with = "crate::ser::c64")]`.
pub mod c64 {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// For `Vec<Complex64>` fields: `#[serde(with = "crate::ser::c64_vec")]`.
pub mod c64_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|c| [c.re, c.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

/// For `Option<Complex64>` fields: `#[serde(with = "crate::ser::c64_opt")]`.
pub mod c64_opt {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|c| [c.re, c.im]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
        let raw = Option::<[f64; 2]>::deserialize(d)?;
        Ok(raw.map(|[re, im]| Complex64::new(re, im)))
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Probe {
        #[serde(with = "super::c64")]
        a: Complex64,
        #[serde(with = "super::c64_vec")]
        v: Vec<Complex64>,
        #[serde(with = "super::c64_opt")]
        o: Option<Complex64>,
    }

    #[test]
    fn round_trip_and_layout() {
        let p = Probe {
            a: Complex64::new(1.5, -2.0),
            v: vec![Complex64::new(0.0, 1.0)],
            o: None,
        };
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"a":[1.5,-2.0],"v":[[0.0,1.0]],"o":null}"#);
        let back: Probe = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
