use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{parse_geometry, BasisClass, CurveClass, Geometry, GeometryError};
use crate::exact_algebra::format_rational;

/// Serialized form of a [`Geometry`], used by `--geometry` and cache headers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryDocument {
    pub name: String,
    pub dim: usize,
    pub blow_up_count: usize,
    pub basis: Vec<BasisClass>,
    /// Rows of `"num/den"` strings.
    pub pairing: Vec<Vec<String>>,
    pub cone_generators: Vec<CurveClass>,
}

impl GeometryDocument {
    pub fn from_geometry(g: &Geometry) -> Self {
        GeometryDocument {
            name: g.id().to_string(),
            dim: g.dim(),
            blow_up_count: g.blow_up_count(),
            basis: g.basis().to_vec(),
            pairing: g
                .pairing()
                .to_rows()
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect(),
            cone_generators: g.cone_generators().to_vec(),
        }
    }

    /// Rebuilds the geometry from its name and checks the recorded data agrees.
    pub fn to_geometry(&self) -> Result<Arc<Geometry>, GeometryError> {
        let g = parse_geometry(&self.name)?;
        if &GeometryDocument::from_geometry(&g) != self {
            return Err(GeometryError::DocumentMismatch(self.name.clone()));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let g = Geometry::blown_up_projective_space(3, 1).unwrap();
        let doc = GeometryDocument::from_geometry(&g);
        let text = serde_json::to_string(&doc).unwrap();
        let back: GeometryDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_geometry().unwrap().id(), "Bl1(P3)");
    }

    #[test]
    fn tampered_document_is_rejected() {
        let g = Geometry::blown_up_projective_space(2, 1).unwrap();
        let mut doc = GeometryDocument::from_geometry(&g);
        doc.pairing[3][3] = "1/1".into();
        assert!(matches!(
            doc.to_geometry(),
            Err(GeometryError::DocumentMismatch(_))
        ));
    }
}
