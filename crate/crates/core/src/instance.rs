//! Orchard instances: geometry, grid generation and the heat-influence model.
//!
//! A heater at `source` delivers the fraction `exp(-k_tun * |target - source|)`
//! of its maximum power to `target`. Actual output is further scaled by an
//! uncertain factor `k_u` known only to lie in `[ku_lo, ku_hi]` per site.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::Point2D;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infeasible instance: {0}")]
    Infeasible(String),
    #[error("unsupported instance schema_version {0} (expected {SCHEMA_VERSION})")]
    UnsupportedSchema(u32),
    #[error("instance file I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("instance file JSON: {0}")]
    Json(#[from] serde_json::Error),
}

type Result<T> = std::result::Result<T, InstanceError>;

/// Power fraction reaching `target` from a heater at `source`.
pub fn influence(source: Point2D, target: Point2D, k_tun: f64) -> Result<f64> {
    if !source.is_finite() || !target.is_finite() {
        return Err(InstanceError::InvalidArgument(format!(
            "non-finite coordinates {source} -> {target}"
        )));
    }
    if !(k_tun.is_finite() && k_tun > 0.0) {
        return Err(InstanceError::InvalidArgument(format!(
            "k_tun must be finite and positive, got {k_tun}"
        )));
    }
    Ok((-k_tun * source.distance(&target)).exp())
}

/// Absolute heating power model. Optimisation works in power fractions, so
/// `p0_watts` only matters for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatModel {
    pub p0_watts: f64,
    pub k_tun: f64,
}

impl HeatModel {
    pub fn new(p0_watts: f64, k_tun: f64) -> Result<Self> {
        if !(p0_watts.is_finite() && p0_watts > 0.0) {
            return Err(InstanceError::InvalidArgument(format!(
                "p0_watts must be positive, got {p0_watts}"
            )));
        }
        if !(k_tun.is_finite() && k_tun > 0.0) {
            return Err(InstanceError::InvalidArgument(format!(
                "k_tun must be positive, got {k_tun}"
            )));
        }
        Ok(Self { p0_watts, k_tun })
    }

    /// Power in watts delivered at `target` by a heater at `heater` with
    /// uncertainty factor `ku`.
    pub fn power_at(&self, heater: Point2D, target: Point2D, ku: f64) -> Result<f64> {
        Ok(self.p0_watts * ku * influence(heater, target, self.k_tun)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrchardInstance {
    pub length_m: f64,
    pub width_m: f64,
    pub trees: Vec<Point2D>,
    pub candidate_sites: Vec<Point2D>,
    pub check_points: Vec<Point2D>,
    pub k: usize,
    pub d_ht_m: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    pub k_tun: f64,
    pub ku_lo: Vec<f64>,
    pub ku_hi: Vec<f64>,
    pub alpha: f64,
    pub beta1_nor: f64,
    pub beta2_nor: f64,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    schema_version: u32,
    #[serde(flatten)]
    instance: OrchardInstance,
}

#[derive(Serialize)]
struct InstanceFileRef<'a> {
    schema_version: u32,
    #[serde(flatten)]
    instance: &'a OrchardInstance,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(InstanceError::InvalidArgument(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(InstanceError::InvalidArgument(format!("{name} must be finite and >= 0, got {v}")))
    }
}

impl OrchardInstance {
    /// Checks every structural invariant of an instance.
    pub fn validate(&self) -> Result<()> {
        positive("length_m", self.length_m)?;
        positive("width_m", self.width_m)?;
        non_negative("d_ht_m", self.d_ht_m)?;
        positive("k_tun", self.k_tun)?;
        non_negative("alpha", self.alpha)?;
        positive("beta1_nor", self.beta1_nor)?;
        positive("beta2_nor", self.beta2_nor)?;
        non_negative("f_lo", self.f_lo)?;
        if !(self.f_hi.is_finite() && self.f_lo <= self.f_hi) {
            return Err(InstanceError::InvalidArgument(format!(
                "need 0 <= f_lo <= f_hi, got [{}, {}]",
                self.f_lo, self.f_hi
            )));
        }
        if self.k == 0 {
            return Err(InstanceError::InvalidArgument("k must be >= 1".into()));
        }
        if self.candidate_sites.is_empty() {
            return Err(InstanceError::Infeasible("no candidate heater sites".into()));
        }
        if self.k > self.candidate_sites.len() {
            return Err(InstanceError::InvalidArgument(format!(
                "k = {} exceeds the {} candidate sites",
                self.k,
                self.candidate_sites.len()
            )));
        }
        let n = self.candidate_sites.len();
        if self.ku_lo.len() != n || self.ku_hi.len() != n {
            return Err(InstanceError::InvalidArgument(format!(
                "uncertainty bounds must have one entry per site ({n}), got {} and {}",
                self.ku_lo.len(),
                self.ku_hi.len()
            )));
        }
        for (i, (&lo, &hi)) in self.ku_lo.iter().zip(&self.ku_hi).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
                return Err(InstanceError::InvalidArgument(format!(
                    "site {i}: need 0 < ku_lo <= ku_hi, got [{lo}, {hi}]"
                )));
            }
        }
        let inside = |p: &Point2D| {
            p.is_finite()
                && (0.0..=self.length_m).contains(&p.x)
                && (0.0..=self.width_m).contains(&p.y)
        };
        for (label, pts) in [
            ("tree", &self.trees),
            ("candidate site", &self.candidate_sites),
            ("check point", &self.check_points),
        ] {
            if let Some((i, p)) = pts.iter().enumerate().find(|(_, p)| !inside(p)) {
                return Err(InstanceError::InvalidArgument(format!(
                    "{label} {i} at {p} lies outside the orchard"
                )));
            }
        }
        for (i, site) in self.candidate_sites.iter().enumerate() {
            if let Some(t) = self.trees.iter().find(|t| site.distance(t) < self.d_ht_m) {
                return Err(InstanceError::InvalidArgument(format!(
                    "candidate site {i} at {site} is closer than {} m to tree {t}",
                    self.d_ht_m
                )));
            }
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.candidate_sites.len()
    }

    pub fn n_check_points(&self) -> usize {
        self.check_points.len()
    }

    /// Interval envelope of all per-site uncertainty bounds; used for heaters
    /// that do not sit on a candidate site.
    pub fn scalar_ku_bounds(&self) -> (f64, f64) {
        let lo = self.ku_lo.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.ku_hi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn with_alpha(&self, alpha: f64) -> OrchardInstance {
        OrchardInstance { alpha, ..self.clone() }
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        p.is_finite()
            && (0.0..=self.length_m).contains(&p.x)
            && (0.0..=self.width_m).contains(&p.y)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = InstanceFileRef { schema_version: SCHEMA_VERSION, instance: self };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        match raw.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => return Err(InstanceError::UnsupportedSchema(v as u32)),
            None => {
                return Err(InstanceError::InvalidArgument(
                    "instance file lacks schema_version".into(),
                ))
            }
        }
        let file: InstanceFile = serde_json::from_value(raw)?;
        file.instance.validate()?;
        Ok(file.instance)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// SHA-256 of the canonical JSON encoding, hex encoded.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("instance serializes");
        let hash = Sha256::digest(&bytes);
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Dense `h[i][s]`: influence of candidate site `i` on check point `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl InfluenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, site: usize, cp: usize) -> f64 {
        self.data[site * self.cols + cp]
    }

    pub fn row(&self, site: usize) -> &[f64] {
        &self.data[site * self.cols..(site + 1) * self.cols]
    }
}

pub fn build_influence_matrix(inst: &OrchardInstance) -> Result<InfluenceMatrix> {
    influence_matrix_for(&inst.candidate_sites, &inst.check_points, inst.k_tun)
}

pub fn influence_matrix_for(
    sources: &[Point2D],
    targets: &[Point2D],
    k_tun: f64,
) -> Result<InfluenceMatrix> {
    let mut data = Vec::with_capacity(sources.len() * targets.len());
    for s in sources {
        for t in targets {
            data.push(influence(*s, *t, k_tun)?);
        }
    }
    Ok(InfluenceMatrix { rows: sources.len(), cols: targets.len(), data })
}

/// Inputs to [`generate_instance`]. Defaults reproduce the 180 m x 120 m
/// reference orchard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    pub length_m: f64,
    pub width_m: f64,
    pub tree_spacing_m: f64,
    pub site_spacing_m: f64,
    pub cp_spacing_m: f64,
    pub k: usize,
    pub d_ht_m: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    pub ku_lo: f64,
    pub ku_hi: f64,
    pub k_tun: f64,
    pub alpha: f64,
    pub beta1_nor: f64,
    pub beta2_nor: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            length_m: 180.0,
            width_m: 120.0,
            tree_spacing_m: 10.0,
            site_spacing_m: 10.0,
            cp_spacing_m: 10.0,
            k: 21,
            d_ht_m: 3.0,
            f_lo: 0.5,
            f_hi: 1.0,
            ku_lo: 0.8,
            ku_hi: 1.0,
            k_tun: 0.01,
            alpha: 5.0,
            beta1_nor: 600.0,
            beta2_nor: 240.0,
        }
    }
}

/// Equally spaced coordinates `start, start + step, ...` not exceeding `end`.
fn axis(start: f64, end: f64, step: f64) -> Vec<f64> {
    if end < start - 1e-9 {
        return Vec::new();
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| start + i as f64 * step).collect()
}

fn cross(xs: &[f64], ys: &[f64]) -> Vec<Point2D> {
    ys.iter()
        .flat_map(|&y| xs.iter().map(move |&x| Point2D::new(x, y)))
        .collect()
}

/// Lays out trees, candidate sites and check points on regular grids.
///
/// Trees sit on a grid inset by half a spacing from the boundary. Candidate
/// sites are offset by half a site spacing from the tree grid (cell centres
/// when both spacings agree) and then filtered by tree clearance. Check points
/// use the tree-grid rule with their own spacing, so they coincide with tree
/// roots when the spacings match.
pub fn generate_instance(params: &GridParams) -> Result<OrchardInstance> {
    positive("length", params.length_m)?;
    positive("width", params.width_m)?;
    positive("tree spacing", params.tree_spacing_m)?;
    positive("site spacing", params.site_spacing_m)?;
    positive("check point spacing", params.cp_spacing_m)?;
    non_negative("d_ht", params.d_ht_m)?;

    let (l, w) = (params.length_m, params.width_m);
    let dt = params.tree_spacing_m;
    let tree_x = axis(dt / 2.0, l - dt / 2.0, dt);
    let tree_y = axis(dt / 2.0, w - dt / 2.0, dt);
    let trees = cross(&tree_x, &tree_y);

    let ds = params.site_spacing_m;
    let span = |axis_pts: &[f64], extent: f64| match (axis_pts.first(), axis_pts.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (0.0, extent),
    };
    let (x0, x1) = span(&tree_x, l);
    let (y0, y1) = span(&tree_y, w);
    let site_x = axis(x0 + ds / 2.0, x1 - ds / 2.0, ds);
    let site_y = axis(y0 + ds / 2.0, y1 - ds / 2.0, ds);
    let candidate_sites: Vec<Point2D> = cross(&site_x, &site_y)
        .into_iter()
        .filter(|s| trees.iter().all(|t| s.distance(t) >= params.d_ht_m))
        .collect();
    if candidate_sites.is_empty() {
        return Err(InstanceError::Infeasible(format!(
            "no candidate site keeps {} m clearance from the trees",
            params.d_ht_m
        )));
    }

    let dc = params.cp_spacing_m;
    let check_points = cross(&axis(dc / 2.0, l - dc / 2.0, dc), &axis(dc / 2.0, w - dc / 2.0, dc));

    let n = candidate_sites.len();
    let inst = OrchardInstance {
        length_m: l,
        width_m: w,
        trees,
        candidate_sites,
        check_points,
        k: params.k,
        d_ht_m: params.d_ht_m,
        f_lo: params.f_lo,
        f_hi: params.f_hi,
        k_tun: params.k_tun,
        ku_lo: vec![params.ku_lo; n],
        ku_hi: vec![params.ku_hi; n],
        alpha: params.alpha,
        beta1_nor: params.beta1_nor,
        beta2_nor: params.beta2_nor,
    };
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn influence_reference_values() {
        let o = Point2D::new(0.0, 0.0);
        assert_eq!(influence(o, o, 0.01).unwrap(), 1.0);
        // exp(-1) and exp(-0.5) to 16 significant digits
        let v = influence(o, Point2D::new(100.0, 0.0), 0.01).unwrap();
        assert!((v - 0.367_879_441_171_442_3).abs() < 1e-15);
        let v = influence(o, Point2D::new(30.0, 40.0), 0.01).unwrap();
        assert!((v - 0.606_530_659_712_633_4).abs() < 1e-15);
    }

    #[test]
    fn influence_rejects_bad_input() {
        let o = Point2D::new(0.0, 0.0);
        assert!(influence(Point2D::new(f64::NAN, 0.0), o, 0.01).is_err());
        assert!(influence(o, Point2D::new(0.0, f64::INFINITY), 0.01).is_err());
        assert!(influence(o, o, 0.0).is_err());
    }

    #[test]
    fn reference_grid_counts() {
        let inst = generate_instance(&GridParams::default()).unwrap();
        assert_eq!(inst.trees.len(), 216);
        assert_eq!(inst.candidate_sites.len(), 187);
        assert_eq!(inst.check_points.len(), 216);
        assert_eq!(inst.trees, inst.check_points);
        for s in &inst.candidate_sites {
            let nearest = inst.trees.iter().map(|t| s.distance(t)).fold(f64::INFINITY, f64::min);
            assert!((nearest - 50f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn smallest_grid() {
        let params = GridParams { length_m: 20.0, width_m: 20.0, k: 1, ..Default::default() };
        let inst = generate_instance(&params).unwrap();
        assert_eq!(
            inst.trees,
            vec![
                Point2D::new(5.0, 5.0),
                Point2D::new(15.0, 5.0),
                Point2D::new(5.0, 15.0),
                Point2D::new(15.0, 15.0)
            ]
        );
        assert_eq!(inst.candidate_sites, vec![Point2D::new(10.0, 10.0)]);
    }

    #[test]
    fn clearance_filter_can_empty_the_grid() {
        let params = GridParams { d_ht_m: 8.0, ..Default::default() };
        assert!(matches!(generate_instance(&params), Err(InstanceError::Infeasible(_))));
    }

    #[test]
    fn influence_matrix_row() {
        let inst = OrchardInstance {
            length_m: 200.0,
            width_m: 10.0,
            trees: vec![],
            candidate_sites: vec![Point2D::new(0.0, 0.0)],
            check_points: vec![Point2D::new(0.0, 0.0), Point2D::new(100.0, 0.0)],
            k: 1,
            d_ht_m: 0.0,
            f_lo: 0.5,
            f_hi: 1.0,
            k_tun: 0.01,
            ku_lo: vec![0.8],
            ku_hi: vec![1.0],
            alpha: 1.0,
            beta1_nor: 1.0,
            beta2_nor: 1.0,
        };
        let h = build_influence_matrix(&inst).unwrap();
        assert_eq!((h.rows(), h.cols()), (1, 2));
        assert_eq!(h.get(0, 0), 1.0);
        assert!((h.get(0, 1) - 0.367_879_441_171_442_3).abs() < 1e-15);
    }

    #[test]
    fn reference_influence_matrix_shape() {
        let inst = generate_instance(&GridParams::default()).unwrap();
        let h = build_influence_matrix(&inst).unwrap();
        assert_eq!((h.rows(), h.cols()), (187, 216));
        for i in 0..h.rows() {
            assert!(h.row(i).iter().all(|&v| v > 0.0 && v < 1.0));
        }
    }

    #[test]
    fn json_round_trip_and_schema_check() {
        let inst = generate_instance(&GridParams { length_m: 40.0, width_m: 30.0, k: 2, ..Default::default() })
            .unwrap();
        let text = inst.to_json().unwrap();
        assert!(text.contains("\"schema_version\": 1"));
        assert_eq!(OrchardInstance::from_json(&text).unwrap(), inst);
        let bumped = text.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(
            OrchardInstance::from_json(&bumped),
            Err(InstanceError::UnsupportedSchema(2))
        ));
        let missing = text.replace("\"schema_version\": 1,", "");
        assert!(OrchardInstance::from_json(&missing).is_err());
    }

    #[test]
    fn validate_catches_clearance_and_bounds() {
        let mut inst = generate_instance(&GridParams { length_m: 40.0, width_m: 30.0, k: 2, ..Default::default() })
            .unwrap();
        inst.candidate_sites[0] = inst.trees[0];
        assert!(inst.validate().is_err());
        let mut inst = generate_instance(&GridParams { length_m: 40.0, width_m: 30.0, k: 2, ..Default::default() })
            .unwrap();
        inst.ku_lo[0] = 1.5;
        assert!(inst.validate().is_err());
        inst.ku_lo[0] = 0.8;
        inst.k = inst.n_sites() + 1;
        assert!(inst.validate().is_err());
    }

    #[test]
    fn heat_model_scales_fraction() {
        let hm = HeatModel::new(2000.0, 0.01).unwrap();
        let p = hm.power_at(Point2D::new(0.0, 0.0), Point2D::new(0.0, 0.0), 0.9).unwrap();
        assert!((p - 1800.0).abs() < 1e-9);
        assert!(HeatModel::new(0.0, 0.01).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn influence_is_symmetric_and_radial(
                ax in -500.0..500.0f64, ay in -500.0..500.0f64,
                bx in -500.0..500.0f64, by in -500.0..500.0f64,
                k in 0.001..0.1f64,
            ) {
                let a = Point2D::new(ax, ay);
                let b = Point2D::new(bx, by);
                let ab = influence(a, b, k).unwrap();
                prop_assert_eq!(ab, influence(b, a, k).unwrap());
                let d = a.distance(&b);
                let on_axis = influence(Point2D::new(0.0, 0.0), Point2D::new(d, 0.0), k).unwrap();
                prop_assert!((ab - on_axis).abs() <= 1e-15);
                prop_assert!(ab > 0.0 && ab <= 1.0);
            }

            #[test]
            fn influence_strictly_decreasing(d1 in 0.0..1000.0f64, gap in 0.01..100.0f64, k in 0.001..0.1f64) {
                let o = Point2D::new(0.0, 0.0);
                let near = influence(o, Point2D::new(d1, 0.0), k).unwrap();
                let far = influence(o, Point2D::new(d1 + gap, 0.0), k).unwrap();
                prop_assert!(far < near);
            }
        }
    }
}
