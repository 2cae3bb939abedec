//! GeoJSON (WGS84) readers for building footprints and road centerlines.

use std::collections::HashMap;
use std::path::Path;

use serde_json::Value;

use super::RoadClass;
use crate::error::{Error, Result};

/// Meters per storey, used both ways between heights and storey counts.
pub const STOREY_HEIGHT: f64 = 3.0;

/// A building footprint still in lon/lat.
#[derive(Debug, Clone, PartialEq)]
pub struct LonLatBuilding {
    pub id: String,
    /// Outer ring first, then holes; each ring a list of `[lon, lat]`.
    pub rings: Vec<Vec<[f64; 2]>>,
    pub height: Option<f64>,
    pub storeys: Option<u32>,
}

/// A road centerline still in lon/lat.
#[derive(Debug, Clone, PartialEq)]
pub struct LonLatRoad {
    pub points: Vec<[f64; 2]>,
    pub class: RoadClass,
}

/// Parsed contents of the two input files.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GeoData {
    pub buildings: Vec<LonLatBuilding>,
    pub roads: Vec<LonLatRoad>,
}

impl GeoData {
    pub fn coordinates(&self) -> impl Iterator<Item = &[f64; 2]> {
        self.buildings
            .iter()
            .flat_map(|b| b.rings.iter().flatten())
            .chain(self.roads.iter().flat_map(|r| r.points.iter()))
    }
}

/// Reads the buildings and roads FeatureCollections.
pub fn load_geodata(buildings_path: &Path, roads_path: &Path) -> Result<GeoData> {
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
    let buildings = parse_buildings(&read(buildings_path)?, &buildings_path.display().to_string())?;
    let roads = parse_roads(&read(roads_path)?, &roads_path.display().to_string())?;
    Ok(GeoData { buildings, roads })
}

fn features<'a>(doc: &'a Value, source: &str) -> Result<&'a Vec<Value>> {
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(Error::parse(source, "expected a GeoJSON FeatureCollection"));
    }
    doc.get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(source, "FeatureCollection without a features array"))
}

fn parse_doc(text: &str, source: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::parse(source, e.to_string()))
}

fn position(v: &Value, source: &str) -> Result<[f64; 2]> {
    let arr = v
        .as_array()
        .filter(|a| a.len() >= 2)
        .ok_or_else(|| Error::parse(source, "position must be an array of at least 2 numbers"))?;
    let lon = arr[0].as_f64();
    let lat = arr[1].as_f64();
    match (lon, lat) {
        (Some(lon), Some(lat)) if (-180.0..=180.0).contains(&lon) && (-90.0..=90.0).contains(&lat) => {
            Ok([lon, lat])
        }
        (Some(_), Some(_)) => Err(Error::parse(source, "position outside lon/lat range")),
        _ => Err(Error::parse(source, "position must contain numbers")),
    }
}

fn line(v: &Value, source: &str) -> Result<Vec<[f64; 2]>> {
    v.as_array()
        .ok_or_else(|| Error::parse(source, "expected an array of positions"))?
        .iter()
        .map(|p| position(p, source))
        .collect()
}

fn polygon_rings(v: &Value, source: &str) -> Result<Vec<Vec<[f64; 2]>>> {
    v.as_array()
        .ok_or_else(|| Error::parse(source, "expected an array of rings"))?
        .iter()
        .map(|r| line(r, source))
        .collect()
}

fn feature_id(feature: &Value, index: usize) -> String {
    let props = feature.get("properties");
    let candidates = [
        feature.get("id"),
        props.and_then(|p| p.get("@id")),
        props.and_then(|p| p.get("id")),
    ];
    for c in candidates.into_iter().flatten() {
        match c {
            Value::String(s) if !s.is_empty() => return s.clone(),
            Value::Number(n) => return n.to_string(),
            _ => {}
        }
    }
    format!("feature-{index}")
}

fn property<'a>(feature: &'a Value, key: &str) -> Option<&'a Value> {
    feature.get("properties").and_then(|p| p.get(key)).filter(|v| !v.is_null())
}

/// Reads a height value: a number of meters or a string like `"27.4"`,
/// `"12 m"` or `"40 ft"`. Non-positive or unreadable values yield `None`.
pub fn parse_height(v: &Value) -> Option<f64> {
    let h = match v {
        Value::Number(n) => n.as_f64()?,
        Value::String(s) => {
            let s = s.trim();
            let (num, rest) = leading_number(s)?;
            let unit = rest.trim().to_ascii_lowercase();
            match unit.as_str() {
                "" | "m" | "meter" | "meters" | "metre" | "metres" => num,
                "ft" | "feet" | "'" => num * 0.3048,
                _ => return None,
            }
        }
        _ => return None,
    };
    (h.is_finite() && h > 0.0).then_some(h)
}

/// Reads a storey count; fractional values round to the nearest integer.
pub fn parse_levels(v: &Value) -> Option<u32> {
    let n = match v {
        Value::Number(n) => n.as_f64()?,
        Value::String(s) => leading_number(s.trim())?.0,
        _ => return None,
    };
    let n = n.round();
    (n.is_finite() && n >= 1.0 && n < u32::MAX as f64).then_some(n as u32)
}

fn leading_number(s: &str) -> Option<(f64, &str)> {
    let end = s
        .char_indices()
        .find(|&(i, c)| !(c.is_ascii_digit() || c == '.' || (i == 0 && (c == '-' || c == '+'))))
        .map_or(s.len(), |(i, _)| i);
    let num = s[..end].parse::<f64>().ok()?;
    Some((num, &s[end..]))
}

pub fn parse_buildings(text: &str, source: &str) -> Result<Vec<LonLatBuilding>> {
    let doc = parse_doc(text, source)?;
    let mut out = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (index, feature) in features(&doc, source)?.iter().enumerate() {
        let Some(geometry) = feature.get("geometry").filter(|g| !g.is_null()) else {
            continue;
        };
        let coords = geometry.get("coordinates");
        let parts: Vec<Vec<Vec<[f64; 2]>>> = match geometry.get("type").and_then(Value::as_str) {
            Some("Polygon") => vec![polygon_rings(coords.unwrap_or(&Value::Null), source)?],
            Some("MultiPolygon") => coords
                .and_then(Value::as_array)
                .ok_or_else(|| Error::parse(source, "MultiPolygon without coordinates"))?
                .iter()
                .map(|p| polygon_rings(p, source))
                .collect::<Result<_>>()?,
            _ => continue,
        };

        let levels = property(feature, "building:levels").and_then(parse_levels);
        let height = property(feature, "height")
            .and_then(parse_height)
            .or_else(|| levels.map(|l| STOREY_HEIGHT * l as f64));

        let base = feature_id(feature, index);
        let multi = parts.len() > 1;
        for (k, rings) in parts.into_iter().enumerate() {
            if rings.is_empty() {
                continue;
            }
            let mut id = if multi { format!("{base}/{k}") } else { base.clone() };
            let count = seen.entry(id.clone()).or_insert(0);
            *count += 1;
            if *count > 1 {
                id = format!("{id}#{count}");
            }
            out.push(LonLatBuilding {
                id,
                rings,
                height,
                storeys: levels,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

pub fn parse_roads(text: &str, source: &str) -> Result<Vec<LonLatRoad>> {
    let doc = parse_doc(text, source)?;
    let mut out = Vec::new();
    for feature in features(&doc, source)? {
        let Some(geometry) = feature.get("geometry").filter(|g| !g.is_null()) else {
            continue;
        };
        let class = property(feature, "highway")
            .and_then(Value::as_str)
            .map(RoadClass::from_highway)
            .unwrap_or(RoadClass::Other);
        let coords = geometry.get("coordinates").unwrap_or(&Value::Null);
        let lines = match geometry.get("type").and_then(Value::as_str) {
            Some("LineString") => vec![line(coords, source)?],
            Some("MultiLineString") => coords
                .as_array()
                .ok_or_else(|| Error::parse(source, "MultiLineString without coordinates"))?
                .iter()
                .map(|l| line(l, source))
                .collect::<Result<_>>()?,
            _ => continue,
        };
        out.extend(
            lines
                .into_iter()
                .filter(|l| l.len() >= 2)
                .map(|points| LonLatRoad { points, class }),
        );
    }
    Ok(out)
}
