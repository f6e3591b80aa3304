//! Hierarchical semantic scene schema: validation, canonical serialization,
//! and the fixed-width conditioning code.
//!
//! A scene document is JSON with four nested levels: components (rotating
//! parts with rates), objects (targets with class and kinematics), scene
//! elements (background boxes with materials), and intent (relations and
//! timed events). [`validate_scene`] walks the raw document so that errors
//! carry the exact JSON path of the first violation; [`encode_scene`] maps a
//! validated scene to the conditioning vector used by the generator.

use crate::math::{fnv1a_bytes, Vec3};
use crate::target::TargetClass;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

/// Width of the semantic conditioning code.
pub const CODE_DIM: usize = 64;
/// Token-hash bucket count inside the code.
pub const HASH_BUCKETS: usize = 16;
/// Speed normalizer for the aggregate features, m/s.
pub const SPEED_SCALE: f64 = 60.0;
/// Rotation-rate normalizer for the aggregate features, Hz.
pub const RATE_SCALE: f64 = 120.0;
/// Velocity-component normalizer for the aggregate features, m/s. Tighter
/// than [`SPEED_SCALE`] so direction differences weigh into code distance
/// about as much as speed differences.
pub const VELOCITY_SCALE: f64 = 30.0;

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("dangling reference at {path}: unknown id `{id}`")]
    DanglingReference { path: String, id: String },
    #[error("code dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("document is not valid JSON: {0}")]
    Json(String),
}

fn schema_err(path: impl Into<String>, message: impl Into<String>) -> SemanticsError {
    SemanticsError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Scenario classes with known clutter statistics; unknown tokens fold to
/// `Other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioClass {
    UrbanStreet,
    Highway,
    Indoor,
    OpenField,
    Other,
}

impl ScenarioClass {
    pub const ALL: [ScenarioClass; 5] = [
        ScenarioClass::UrbanStreet,
        ScenarioClass::Highway,
        ScenarioClass::Indoor,
        ScenarioClass::OpenField,
        ScenarioClass::Other,
    ];

    fn from_token(s: &str) -> (Self, bool) {
        match s {
            "urban_street" => (ScenarioClass::UrbanStreet, true),
            "highway" => (ScenarioClass::Highway, true),
            "indoor" => (ScenarioClass::Indoor, true),
            "open_field" => (ScenarioClass::OpenField, true),
            "other" => (ScenarioClass::Other, true),
            _ => (ScenarioClass::Other, false),
        }
    }

    pub fn index(&self) -> usize {
        Self::ALL.iter().position(|c| c == self).expect("listed")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackgroundKind {
    Building,
    Vegetation,
    Roadside,
    Other,
}

impl BackgroundKind {
    fn from_token(s: &str) -> (Self, bool) {
        match s {
            "building" => (BackgroundKind::Building, true),
            "vegetation" => (BackgroundKind::Vegetation, true),
            "roadside" => (BackgroundKind::Roadside, true),
            "other" => (BackgroundKind::Other, true),
            _ => (BackgroundKind::Other, false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialClass {
    Concrete,
    Glass,
    Metal,
    Foliage,
    Other,
}

impl MaterialClass {
    fn from_token(s: &str) -> (Self, bool) {
        match s {
            "concrete" => (MaterialClass::Concrete, true),
            "glass" => (MaterialClass::Glass, true),
            "metal" => (MaterialClass::Metal, true),
            "foliage" => (MaterialClass::Foliage, true),
            "other" => (MaterialClass::Other, true),
            _ => (MaterialClass::Other, false),
        }
    }

    pub fn token(&self) -> &'static str {
        match self {
            MaterialClass::Concrete => "concrete",
            MaterialClass::Glass => "glass",
            MaterialClass::Metal => "metal",
            MaterialClass::Foliage => "foliage",
            MaterialClass::Other => "other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationPredicate {
    Blocks,
    AdjacentTo,
    Approaches,
    Other,
}

impl RelationPredicate {
    fn from_token(s: &str) -> (Self, bool) {
        match s {
            "blocks" => (RelationPredicate::Blocks, true),
            "adjacent_to" => (RelationPredicate::AdjacentTo, true),
            "approaches" => (RelationPredicate::Approaches, true),
            "other" => (RelationPredicate::Other, true),
            _ => (RelationPredicate::Other, false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventType {
    Crossing,
    Converging,
    Loitering,
    Other,
}

impl EventType {
    fn from_token(s: &str) -> (Self, bool) {
        match s {
            "crossing" => (EventType::Crossing, true),
            "converging" => (EventType::Converging, true),
            "loitering" => (EventType::Loitering, true),
            "other" => (EventType::Other, true),
            _ => (EventType::Other, false),
        }
    }
}

/// Component level: one kind of rotating part on a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub part: String,
    pub count: u32,
    pub rate_hz: f64,
}

impl ComponentSpec {
    /// Whether this component contributes rotating-part micro-motion.
    pub fn is_rotating(&self) -> bool {
        if self.rate_hz > 0.0 {
            return true;
        }
        matches!(
            self.part.to_ascii_lowercase().as_str(),
            "wheel" | "rotor" | "propeller" | "blade"
        )
    }
}

/// Object level: one target with class, components, and kinematics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub id: String,
    pub class: TargetClass,
    pub components: Vec<ComponentSpec>,
    pub position: Vec3,
    pub velocity: Vec3,
    pub heading_rad: f64,
}

impl TargetSpec {
    /// Rotation rates for the synthesizer's part slots, expanded by count
    /// and capped at the per-target part budget.
    pub fn part_rates(&self) -> Vec<f64> {
        let mut rates = Vec::new();
        for comp in self.components.iter().filter(|c| c.is_rotating()) {
            for _ in 0..comp.count {
                if rates.len() >= crate::target::MAX_PARTS {
                    return rates;
                }
                rates.push(comp.rate_hz.max(0.0));
            }
        }
        rates
    }
}

/// Scene level: one background element as an axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackgroundSpec {
    pub id: String,
    pub kind: BackgroundKind,
    pub box_min: Vec3,
    pub box_max: Vec3,
    pub material: MaterialClass,
    pub occluder: bool,
}

/// Intent level: a symbolic relation between two scene entities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub subject: String,
    pub predicate: RelationPredicate,
    pub object: String,
}

/// Intent level: a timed event over participants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    #[serde(rename = "type")]
    pub event_type: EventType,
    pub participants: Vec<String>,
    pub start_s: f64,
    pub end_s: f64,
}

/// A validated hierarchical scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticScene {
    pub scene_id: String,
    pub scenario_class: ScenarioClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon_s: Option<f64>,
    pub targets: Vec<TargetSpec>,
    pub background: Vec<BackgroundSpec>,
    pub relations: Vec<RelationSpec>,
    pub events: Vec<EventSpec>,
}

impl SemanticScene {
    /// Canonical pretty-printed JSON; feeding it back through
    /// [`validate_scene`] reproduces the same scene.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serialization cannot fail")
    }
}

/// Strictness of [`validate_scene_with`]: `Strict` rejects unknown fields,
/// `Lenient` downgrades them to warnings. Unknown enum tokens fold to the
/// `other` variant with a warning in both modes; unsupported target classes
/// are always errors because no library prior exists for them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    Strict,
    Lenient,
}

struct Walker {
    strict: bool,
    warnings: Vec<String>,
}

impl Walker {
    fn unknown_field(&mut self, path: &str, key: &str) -> Result<(), SemanticsError> {
        if self.strict {
            Err(schema_err(path, format!("unknown field `{key}`")))
        } else {
            self.warnings.push(format!("{path}: ignoring unknown field `{key}`"));
            Ok(())
        }
    }

    fn check_fields(
        &mut self,
        map: &Map<String, Value>,
        allowed: &[&str],
        path: &str,
    ) -> Result<(), SemanticsError> {
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                self.unknown_field(path, key)?;
            }
        }
        Ok(())
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, SemanticsError> {
    v.as_object()
        .ok_or_else(|| schema_err(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, SemanticsError> {
    v.as_array()
        .ok_or_else(|| schema_err(path, "expected an array"))
}

fn get_string(map: &Map<String, Value>, key: &str, path: &str) -> Result<String, SemanticsError> {
    let v = map
        .get(key)
        .ok_or_else(|| schema_err(path, format!("missing field `{key}`")))?;
    let s = v
        .as_str()
        .ok_or_else(|| schema_err(format!("{path}.{key}"), "expected a string"))?;
    if s.is_empty() {
        return Err(schema_err(format!("{path}.{key}"), "must not be empty"));
    }
    Ok(s.to_string())
}

fn get_f64(map: &Map<String, Value>, key: &str, path: &str) -> Result<f64, SemanticsError> {
    let v = map
        .get(key)
        .ok_or_else(|| schema_err(path, format!("missing field `{key}`")))?;
    v.as_f64()
        .ok_or_else(|| schema_err(format!("{path}.{key}"), "expected a number"))
}

fn opt_f64(map: &Map<String, Value>, key: &str, path: &str) -> Result<Option<f64>, SemanticsError> {
    match map.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => Ok(Some(v.as_f64().ok_or_else(|| {
            schema_err(format!("{path}.{key}"), "expected a number")
        })?)),
    }
}

fn get_vec3(map: &Map<String, Value>, key: &str, path: &str) -> Result<Vec3, SemanticsError> {
    let v = map
        .get(key)
        .ok_or_else(|| schema_err(path, format!("missing field `{key}`")))?;
    parse_vec3(v, &format!("{path}.{key}"))
}

fn parse_vec3(v: &Value, path: &str) -> Result<Vec3, SemanticsError> {
    let arr = as_array(v, path)?;
    if arr.len() != 3 {
        return Err(schema_err(path, "expected exactly three numbers"));
    }
    let mut out = [0.0; 3];
    for (i, x) in arr.iter().enumerate() {
        out[i] = x
            .as_f64()
            .ok_or_else(|| schema_err(format!("{path}[{i}]"), "expected a number"))?;
    }
    Ok(Vec3(out))
}

/// Validates a scene document strictly, discarding any warnings.
pub fn validate_scene(document: &str) -> Result<SemanticScene, SemanticsError> {
    validate_scene_with(document, ValidationMode::Strict).map(|(scene, _)| scene)
}

/// Validates a scene document, returning the scene plus warnings (unknown
/// tokens that were folded, and in lenient mode any ignored fields).
pub fn validate_scene_with(
    document: &str,
    mode: ValidationMode,
) -> Result<(SemanticScene, Vec<String>), SemanticsError> {
    let root: Value =
        serde_json::from_str(document).map_err(|e| SemanticsError::Json(e.to_string()))?;
    let mut w = Walker {
        strict: mode == ValidationMode::Strict,
        warnings: Vec::new(),
    };
    let map = as_object(&root, "$")?;
    w.check_fields(
        map,
        &[
            "scene_id",
            "scenario_class",
            "horizon_s",
            "targets",
            "background",
            "relations",
            "events",
        ],
        "$",
    )?;

    let scene_id = get_string(map, "scene_id", "$")?;
    let class_token = get_string(map, "scenario_class", "$")?;
    let (scenario_class, known) = ScenarioClass::from_token(&class_token);
    if !known {
        w.warnings.push(format!(
            "$.scenario_class: unknown token `{class_token}` folded to `other`"
        ));
    }
    let horizon_s = opt_f64(map, "horizon_s", "$")?;
    if let Some(h) = horizon_s {
        if !(h.is_finite() && h > 0.0) {
            return Err(schema_err("$.horizon_s", "must be a positive duration"));
        }
    }

    let mut targets = Vec::new();
    if let Some(v) = map.get("targets") {
        for (i, tv) in as_array(v, "$.targets")?.iter().enumerate() {
            targets.push(parse_target(tv, &format!("$.targets[{i}]"), &mut w)?);
        }
    }

    let mut background = Vec::new();
    if let Some(v) = map.get("background") {
        for (i, bv) in as_array(v, "$.background")?.iter().enumerate() {
            background.push(parse_background(bv, &format!("$.background[{i}]"), &mut w)?);
        }
    }

    if targets.is_empty() && background.is_empty() {
        return Err(schema_err("$", "scene must contain at least one target or background element"));
    }

    let mut ids = std::collections::HashSet::new();
    for (i, t) in targets.iter().enumerate() {
        if !ids.insert(t.id.clone()) {
            return Err(schema_err(
                format!("$.targets[{i}].id"),
                format!("duplicate id `{}`", t.id),
            ));
        }
    }
    for (i, b) in background.iter().enumerate() {
        if !ids.insert(b.id.clone()) {
            return Err(schema_err(
                format!("$.background[{i}].id"),
                format!("duplicate id `{}`", b.id),
            ));
        }
    }

    let mut relations = Vec::new();
    if let Some(v) = map.get("relations") {
        for (i, rv) in as_array(v, "$.relations")?.iter().enumerate() {
            let path = format!("$.relations[{i}]");
            let rmap = as_object(rv, &path)?;
            w.check_fields(rmap, &["subject", "predicate", "object"], &path)?;
            let subject = get_string(rmap, "subject", &path)?;
            let object = get_string(rmap, "object", &path)?;
            let pred_token = get_string(rmap, "predicate", &path)?;
            let (predicate, known) = RelationPredicate::from_token(&pred_token);
            if !known {
                w.warnings.push(format!(
                    "{path}.predicate: unknown token `{pred_token}` folded to `other`"
                ));
            }
            for (field, id) in [("subject", &subject), ("object", &object)] {
                if !ids.contains(id.as_str()) {
                    return Err(SemanticsError::DanglingReference {
                        path: format!("{path}.{field}"),
                        id: id.clone(),
                    });
                }
            }
            relations.push(RelationSpec {
                subject,
                predicate,
                object,
            });
        }
    }

    let mut events = Vec::new();
    if let Some(v) = map.get("events") {
        for (i, ev) in as_array(v, "$.events")?.iter().enumerate() {
            let path = format!("$.events[{i}]");
            let emap = as_object(ev, &path)?;
            w.check_fields(emap, &["type", "participants", "start_s", "end_s"], &path)?;
            let type_token = get_string(emap, "type", &path)?;
            let (event_type, known) = EventType::from_token(&type_token);
            if !known {
                w.warnings.push(format!(
                    "{path}.type: unknown token `{type_token}` folded to `other`"
                ));
            }
            let mut participants = Vec::new();
            let pv = emap
                .get("participants")
                .ok_or_else(|| schema_err(&path, "missing field `participants`"))?;
            for (j, p) in as_array(pv, &format!("{path}.participants"))?.iter().enumerate() {
                let ppath = format!("{path}.participants[{j}]");
                let id = p
                    .as_str()
                    .ok_or_else(|| schema_err(&ppath, "expected a string id"))?;
                if !ids.contains(id) {
                    return Err(SemanticsError::DanglingReference {
                        path: ppath,
                        id: id.to_string(),
                    });
                }
                participants.push(id.to_string());
            }
            let start_s = get_f64(emap, "start_s", &path)?;
            let end_s = get_f64(emap, "end_s", &path)?;
            if !(start_s.is_finite() && start_s >= 0.0) {
                return Err(schema_err(format!("{path}.start_s"), "must be non-negative"));
            }
            if !(end_s.is_finite() && end_s >= start_s) {
                return Err(schema_err(
                    format!("{path}.end_s"),
                    "must be at least start_s",
                ));
            }
            if let Some(h) = horizon_s {
                if end_s > h {
                    return Err(schema_err(
                        format!("{path}.end_s"),
                        format!("event ends at {end_s} s, beyond the {h} s horizon"),
                    ));
                }
            }
            events.push(EventSpec {
                event_type,
                participants,
                start_s,
                end_s,
            });
        }
    }

    Ok((
        SemanticScene {
            scene_id,
            scenario_class,
            horizon_s,
            targets,
            background,
            relations,
            events,
        },
        w.warnings,
    ))
}

fn parse_target(v: &Value, path: &str, w: &mut Walker) -> Result<TargetSpec, SemanticsError> {
    let map = as_object(v, path)?;
    w.check_fields(
        map,
        &["id", "class", "components", "position", "velocity", "heading_rad"],
        path,
    )?;
    let id = get_string(map, "id", path)?;
    let class_token = get_string(map, "class", path)?;
    let class: TargetClass = class_token.parse().map_err(|_| {
        schema_err(
            format!("{path}.class"),
            format!("`{class_token}` is not a supported target class (vehicle, uav)"),
        )
    })?;

    let mut components = Vec::new();
    if let Some(cv) = map.get("components") {
        for (i, c) in as_array(cv, &format!("{path}.components"))?.iter().enumerate() {
            let cpath = format!("{path}.components[{i}]");
            let cmap = as_object(c, &cpath)?;
            w.check_fields(cmap, &["part", "count", "rate_hz"], &cpath)?;
            let part = get_string(cmap, "part", &cpath)?;
            let count_v = cmap
                .get("count")
                .ok_or_else(|| schema_err(&cpath, "missing field `count`"))?;
            let count = count_v
                .as_u64()
                .ok_or_else(|| schema_err(format!("{cpath}.count"), "expected a non-negative integer"))?;
            if count == 0 || count > u32::MAX as u64 {
                return Err(schema_err(format!("{cpath}.count"), "must be between 1 and 2^32-1"));
            }
            let rate_hz = opt_f64(cmap, "rate_hz", &cpath)?.unwrap_or(0.0);
            if !(rate_hz.is_finite() && rate_hz >= 0.0) {
                return Err(schema_err(
                    format!("{cpath}.rate_hz"),
                    "rotation rate must be non-negative",
                ));
            }
            components.push(ComponentSpec {
                part,
                count: count as u32,
                rate_hz,
            });
        }
    }

    let position = get_vec3(map, "position", path)?;
    if !position.is_finite() {
        return Err(schema_err(format!("{path}.position"), "must be finite"));
    }
    let velocity = match map.get("velocity") {
        None | Some(Value::Null) => Vec3::ZERO,
        Some(v) => parse_vec3(v, &format!("{path}.velocity"))?,
    };
    let heading_rad = opt_f64(map, "heading_rad", path)?.unwrap_or(0.0);
    if !heading_rad.is_finite() {
        return Err(schema_err(format!("{path}.heading_rad"), "must be finite"));
    }

    Ok(TargetSpec {
        id,
        class,
        components,
        position,
        velocity,
        heading_rad,
    })
}

fn parse_background(v: &Value, path: &str, w: &mut Walker) -> Result<BackgroundSpec, SemanticsError> {
    let map = as_object(v, path)?;
    w.check_fields(
        map,
        &["id", "kind", "box_min", "box_max", "material", "occluder"],
        path,
    )?;
    let id = get_string(map, "id", path)?;
    let kind_token = get_string(map, "kind", path)?;
    let (kind, known) = BackgroundKind::from_token(&kind_token);
    if !known {
        w.warnings.push(format!(
            "{path}.kind: unknown token `{kind_token}` folded to `other`"
        ));
    }
    let box_min = get_vec3(map, "box_min", path)?;
    let box_max = get_vec3(map, "box_max", path)?;
    for axis in 0..3 {
        if !(box_min.0[axis].is_finite() && box_max.0[axis].is_finite())
            || box_min.0[axis] >= box_max.0[axis]
        {
            return Err(schema_err(
                format!("{path}.box_max"),
                "box extents must be finite with min < max on every axis",
            ));
        }
    }
    let material_token = get_string(map, "material", path)?;
    let (material, known) = MaterialClass::from_token(&material_token);
    if !known {
        w.warnings.push(format!(
            "{path}.material: unknown token `{material_token}` folded to `other`"
        ));
    }
    let occluder = match map.get("occluder") {
        None | Some(Value::Null) => kind == BackgroundKind::Building,
        Some(Value::Bool(b)) => *b,
        Some(_) => {
            return Err(schema_err(format!("{path}.occluder"), "expected a boolean"));
        }
    };
    Ok(BackgroundSpec {
        id,
        kind,
        box_min,
        box_max,
        material,
        occluder,
    })
}

/// Fixed-width conditioning code for a scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticCode {
    values: Vec<f64>,
}

impl SemanticCode {
    pub fn new(values: Vec<f64>) -> Result<Self, SemanticsError> {
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(schema_err(
                format!("code[{bad}]"),
                "code entries must be finite",
            ));
        }
        Ok(SemanticCode { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Encodes a validated scene into the conditioning code.
///
/// Layout (total [`CODE_DIM`]): one-hot scenario class (5), per-class target
/// counts (2), FNV-hashed component/material token buckets (16), then
/// normalized aggregates (mean speed, count-weighted mean rotation rate,
/// occluder volume fraction, mean horizontal velocity), zero padded to the
/// full width.
pub fn encode_scene(scene: &SemanticScene) -> SemanticCode {
    let mut code = vec![0.0; CODE_DIM];
    code[scene.scenario_class.index()] = 1.0;

    for t in &scene.targets {
        match t.class {
            TargetClass::Vehicle => code[5] += 1.0,
            TargetClass::Uav => code[6] += 1.0,
        }
    }

    let bucket_base = 7;
    for t in &scene.targets {
        for c in &t.components {
            let token = c.part.to_ascii_lowercase();
            let b = (fnv1a_bytes(token.as_bytes()) as usize) % HASH_BUCKETS;
            code[bucket_base + b] += c.count as f64;
        }
    }
    for b in &scene.background {
        let idx = (fnv1a_bytes(b.material.token().as_bytes()) as usize) % HASH_BUCKETS;
        code[bucket_base + idx] += 1.0;
    }

    let agg_base = bucket_base + HASH_BUCKETS;
    if !scene.targets.is_empty() {
        let mean_speed = scene.targets.iter().map(|t| t.velocity.norm()).sum::<f64>()
            / scene.targets.len() as f64;
        code[agg_base] = (mean_speed / SPEED_SCALE).clamp(0.0, 1.0);

        let mut rate_sum = 0.0;
        let mut count_sum = 0.0;
        for t in &scene.targets {
            for c in &t.components {
                rate_sum += c.rate_hz * c.count as f64;
                count_sum += c.count as f64;
            }
        }
        if count_sum > 0.0 {
            code[agg_base + 1] = (rate_sum / count_sum / RATE_SCALE).clamp(0.0, 1.0);
        }

        // Direction matters as much as magnitude for how a moving target
        // sweeps through delay, so condition on the velocity itself, not
        // just its norm. Affine-mapped into [0, 1]; the shift cancels in
        // code distances.
        let mean_v = scene
            .targets
            .iter()
            .fold(Vec3::ZERO, |acc, t| acc + t.velocity)
            * (1.0 / scene.targets.len() as f64);
        code[agg_base + 3] = (0.5 + mean_v.x() / (2.0 * VELOCITY_SCALE)).clamp(0.0, 1.0);
        code[agg_base + 4] = (0.5 + mean_v.y() / (2.0 * VELOCITY_SCALE)).clamp(0.0, 1.0);
    }
    code[agg_base + 2] = occluder_volume_fraction(scene);

    SemanticCode::new(code).expect("encoder output is finite")
}

fn occluder_volume_fraction(scene: &SemanticScene) -> f64 {
    if scene.background.is_empty() {
        return 0.0;
    }
    let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut extend = |v: Vec3| {
        for a in 0..3 {
            lo.0[a] = lo.0[a].min(v.0[a]);
            hi.0[a] = hi.0[a].max(v.0[a]);
        }
    };
    for b in &scene.background {
        extend(b.box_min);
        extend(b.box_max);
    }
    for t in &scene.targets {
        extend(t.position);
    }
    let pad = 1.0;
    let mut total = 1.0;
    for a in 0..3 {
        total *= hi.0[a] - lo.0[a] + 2.0 * pad;
    }
    let occ: f64 = scene
        .background
        .iter()
        .filter(|b| b.occluder)
        .map(|b| {
            (b.box_max.x() - b.box_min.x())
                * (b.box_max.y() - b.box_min.y())
                * (b.box_max.z() - b.box_min.z())
        })
        .sum();
    (occ / total).clamp(0.0, 1.0)
}

/// Euclidean distance between two conditioning codes.
pub fn scene_distance(a: &SemanticCode, b: &SemanticCode) -> Result<f64, SemanticsError> {
    if a.dim() != b.dim() {
        return Err(SemanticsError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(a.values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}
