use std::sync::Arc;

use super::{Geometry, GeometryError};

/// Parses `P<n>` and nested `Bl<r>(<spec>)`; `Bl2(Bl1(P2))` is `Bl3(P2)`.
pub fn parse_geometry(text: &str) -> Result<Arc<Geometry>, GeometryError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (n, r) = parse_inner(&s).ok_or_else(|| GeometryError::Parse(text.to_string()))?;
    Geometry::blown_up_projective_space(n, r)
}

fn parse_inner(s: &str) -> Option<(usize, usize)> {
    if let Some(rest) = s.strip_prefix('P') {
        return Some((parse_count(rest)?, 0));
    }
    let rest = s.strip_prefix("Bl")?;
    let open = rest.find('(')?;
    let inner = rest[open + 1..].strip_suffix(')')?;
    let r = parse_count(&rest[..open])?;
    let (n, r0) = parse_inner(inner)?;
    Some((n, r0 + r))
}

fn parse_count(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_nested_specs() {
        assert_eq!(parse_geometry("P3").unwrap().id(), "P3");
        assert_eq!(parse_geometry("Bl1(P2)").unwrap().id(), "Bl1(P2)");
        assert_eq!(parse_geometry("Bl2(Bl1(P2))").unwrap().id(), "Bl3(P2)");
        assert_eq!(parse_geometry(" Bl0( P4 )").unwrap().id(), "P4");
    }

    #[test]
    fn rejects_garbage() {
        for bad in [
            "", "P", "Q2", "Bl(P2)", "Bl1P2", "Bl1(P2", "P-1", "Bl1(P2))",
        ] {
            assert!(
                matches!(parse_geometry(bad), Err(GeometryError::Parse(_))),
                "{bad}"
            );
        }
        assert!(matches!(
            parse_geometry("P9"),
            Err(GeometryError::DimensionOutOfRange(9))
        ));
        assert!(matches!(
            parse_geometry("Bl1(P1)"),
            Err(GeometryError::BlowUpDimension(1))
        ));
    }
}
