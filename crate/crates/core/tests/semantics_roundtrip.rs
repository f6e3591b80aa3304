//! Round-trip property: any valid scene survives canonical serialization and
//! strict re-validation unchanged, with no warnings.

use proptest::prelude::*;
use stcm_core::math::Vec3;
use stcm_core::semantics::{
    validate_scene_with, BackgroundKind, BackgroundSpec, ComponentSpec, EventSpec, EventType,
    MaterialClass, RelationPredicate, RelationSpec, ScenarioClass, SemanticScene, TargetSpec,
    ValidationMode,
};
use stcm_core::target::TargetClass;

fn vec3(lim: f64) -> impl Strategy<Value = Vec3> {
    (-lim..lim, -lim..lim, -lim..lim).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn component() -> impl Strategy<Value = ComponentSpec> {
    ("[a-z]{1,8}", 1u32..5, prop_oneof![Just(0.0), 0.0..120.0])
        .prop_map(|(part, count, rate_hz)| ComponentSpec {
            part,
            count,
            rate_hz,
        })
}

fn target(index: usize) -> impl Strategy<Value = TargetSpec> {
    (
        prop_oneof![Just(TargetClass::Vehicle), Just(TargetClass::Uav)],
        prop::collection::vec(component(), 0..3),
        vec3(50.0),
        vec3(20.0),
        -6.0..6.0,
    )
        .prop_map(move |(class, components, position, velocity, heading_rad)| TargetSpec {
            id: format!("t{index}"),
            class,
            components,
            position,
            velocity,
            heading_rad,
        })
}

fn background(index: usize) -> impl Strategy<Value = BackgroundSpec> {
    (
        vec3(60.0),
        (0.1..30.0, 0.1..30.0, 0.1..30.0),
        prop_oneof![
            Just(BackgroundKind::Building),
            Just(BackgroundKind::Vegetation),
            Just(BackgroundKind::Roadside),
            Just(BackgroundKind::Other),
        ],
        prop_oneof![
            Just(MaterialClass::Concrete),
            Just(MaterialClass::Glass),
            Just(MaterialClass::Metal),
            Just(MaterialClass::Foliage),
            Just(MaterialClass::Other),
        ],
        any::<bool>(),
    )
        .prop_map(move |(lo, (dx, dy, dz), kind, material, occluder)| BackgroundSpec {
            id: format!("b{index}"),
            kind,
            box_min: lo,
            box_max: Vec3::new(lo.0[0] + dx, lo.0[1] + dy, lo.0[2] + dz),
            material,
            occluder,
        })
}

fn relation(ids: Vec<String>) -> impl Strategy<Value = RelationSpec> {
    (
        prop::sample::select(ids.clone()),
        prop_oneof![
            Just(RelationPredicate::Blocks),
            Just(RelationPredicate::AdjacentTo),
            Just(RelationPredicate::Approaches),
            Just(RelationPredicate::Other),
        ],
        prop::sample::select(ids),
    )
        .prop_map(|(subject, predicate, object)| RelationSpec {
            subject,
            predicate,
            object,
        })
}

// Event times stay under the smallest horizon the scene strategy can draw.
fn event(ids: Vec<String>) -> impl Strategy<Value = EventSpec> {
    (
        prop_oneof![
            Just(EventType::Crossing),
            Just(EventType::Converging),
            Just(EventType::Loitering),
            Just(EventType::Other),
        ],
        prop::collection::vec(prop::sample::select(ids), 0..3),
        0.0..2.0,
        0.0..2.0,
    )
        .prop_map(|(event_type, participants, start_s, duration_s)| EventSpec {
            event_type,
            participants,
            start_s,
            end_s: start_s + duration_s,
        })
}

fn scene() -> impl Strategy<Value = SemanticScene> {
    ((0usize..3), (0usize..3))
        .prop_filter("scene needs at least one entity", |(nt, nb)| nt + nb > 0)
        .prop_flat_map(|(nt, nb)| {
            let ids: Vec<String> = (0..nt)
                .map(|i| format!("t{i}"))
                .chain((0..nb).map(|j| format!("b{j}")))
                .collect();
            let targets: Vec<_> = (0..nt).map(target).collect();
            let background: Vec<_> = (0..nb).map(background).collect();
            (
                "[a-z][a-z0-9/_.-]{0,19}",
                prop::sample::select(ScenarioClass::ALL.to_vec()),
                prop::option::of(5.0..60.0),
                targets,
                background,
                prop::collection::vec(relation(ids.clone()), 0..3),
                prop::collection::vec(event(ids), 0..3),
            )
                .prop_map(
                    |(scene_id, scenario_class, horizon_s, targets, background, relations, events)| {
                        SemanticScene {
                            scene_id,
                            scenario_class,
                            horizon_s,
                            targets,
                            background,
                            relations,
                            events,
                        }
                    },
                )
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn canonical_json_round_trips(scene in scene()) {
        let doc = scene.to_canonical_json();
        let (parsed, warnings) = validate_scene_with(&doc, ValidationMode::Strict)
            .expect("canonical document must validate strictly");
        prop_assert!(warnings.is_empty(), "unexpected warnings: {warnings:?}");
        prop_assert_eq!(parsed, scene);
    }
}
