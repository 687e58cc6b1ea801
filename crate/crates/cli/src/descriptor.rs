//! TOML descriptor of an endomorphism and the points to study.

use serde::{Deserialize, Serialize};
use zfree_core::{EndoKind, Endomorphism, FreeEndo, IntMatrix, Point, Word};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageEntry {
    /// Omitted means the zero vector.
    #[serde(default)]
    pub abelian: Vec<i64>,
    #[serde(default)]
    pub free: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Descriptor {
    pub m: usize,
    pub n: usize,
    /// `"I"`, `"II"` or `"images"`.
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<i64>>>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abelian_images: Option<Vec<ImageEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_images: Option<Vec<ImageEntry>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<String>,
}

fn word(s: &str) -> Result<Word, CliError> {
    s.parse().map_err(|e| CliError::Parse(format!("bad word {s:?}: {e}")))
}

pub fn parse_point(s: &str) -> Result<Point, CliError> {
    s.parse().map_err(|e| CliError::Parse(format!("bad point {s:?}: {e}")))
}

fn missing(field: &str, kind: &str) -> CliError {
    CliError::Parse(format!("type {kind} descriptor needs field {field}"))
}

fn matrix(rows: &[Vec<i64>], r: usize, c: usize, name: &str) -> Result<IntMatrix, CliError> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(CliError::Domain(format!("{name} must be {r}x{c}")));
    }
    if r == 0 {
        return Ok(IntMatrix::zeros(0, c));
    }
    IntMatrix::from_rows(rows).map_err(|e| CliError::Domain(format!("{name}: {e}")))
}

impl Descriptor {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("descriptor serializes")
    }

    fn q_and_p(&self) -> Result<(IntMatrix, IntMatrix), CliError> {
        let q = self.q.as_ref().ok_or_else(|| missing("Q", &self.kind))?;
        let q = matrix(q, self.m, self.m, "Q")?;
        let p = match &self.p {
            Some(p) => matrix(p, self.n, self.m, "P")?,
            None => IntMatrix::zeros(self.n, self.m),
        };
        Ok((q, p))
    }

    pub fn build(&self) -> Result<Endomorphism, CliError> {
        if self.n < 2 {
            return Err(CliError::Domain(format!("free rank must be at least 2 (got {})", self.n)));
        }
        match self.kind.as_str() {
            "I" => {
                let (q, p) = self.q_and_p()?;
                let images = self.phi.as_ref().ok_or_else(|| missing("phi", "I"))?;
                let images = images.iter().map(|s| word(s)).collect::<Result<Vec<_>, _>>()?;
                let phi = FreeEndo::new(self.n, images).map_err(|e| CliError::Domain(e.to_string()))?;
                Ok(Endomorphism::type_i(q, p, phi)?)
            }
            "II" => {
                let (q, p) = self.q_and_p()?;
                let z = word(self.z.as_deref().ok_or_else(|| missing("z", "II"))?)?;
                let ell = self.ell.clone().ok_or_else(|| missing("ell", "II"))?;
                let h = self.h.clone().unwrap_or_else(|| vec![0; self.n]);
                if h.len() != self.n {
                    return Err(CliError::Domain(format!("h must have length {}", self.n)));
                }
                Ok(Endomorphism::type_ii(q, p, z, ell, h)?)
            }
            "images" => {
                let conv = |list: &Option<Vec<ImageEntry>>, name: &str| -> Result<Vec<(Vec<i64>, Word)>, CliError> {
                    list.as_ref()
                        .ok_or_else(|| missing(name, "images"))?
                        .iter()
                        .map(|e| {
                            let a = if e.abelian.is_empty() { vec![0; self.m] } else { e.abelian.clone() };
                            Ok((a, word(&e.free)?))
                        })
                        .collect()
                };
                let ab = conv(&self.abelian_images, "abelian_images")?;
                let fr = conv(&self.free_images, "free_images")?;
                Ok(Endomorphism::from_images(self.m, self.n, &ab, &fr)?)
            }
            other => Err(CliError::Parse(format!("unknown type {other:?}, expected \"I\", \"II\" or \"images\""))),
        }
    }

    pub fn points(&self) -> Result<Vec<Point>, CliError> {
        self.points.iter().map(|s| parse_point(s)).collect()
    }

    /// Direct-form descriptor of a recognized endomorphism.
    pub fn of(e: &Endomorphism) -> Self {
        let blank = Descriptor {
            m: e.m(),
            n: e.n(),
            kind: String::new(),
            q: Some(e.q().to_rows()),
            p: Some(e.p().to_rows()),
            phi: None,
            z: None,
            ell: None,
            h: None,
            abelian_images: None,
            free_images: None,
            points: Vec::new(),
        };
        match e.kind() {
            EndoKind::TypeI(t) => Descriptor {
                kind: "I".into(),
                phi: Some(t.phi.images().iter().map(|w| w.to_string()).collect()),
                ..blank
            },
            EndoKind::TypeII(t) => Descriptor {
                kind: "II".into(),
                z: Some(t.z.to_string()),
                ell: Some(t.ell.clone()),
                h: Some(t.h.clone()),
                ..blank
            },
        }
    }
}
