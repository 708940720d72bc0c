use diffwitness::bench::{generate_tasks, optimize_task, BenchScene, Method, OptimizerConfig};
use diffwitness::shapes;

#[test]
#[ignore]
fn acc_by_target_type() {
    let scene = BenchScene::new(
        shapes::bundled("icosahedron", 0.1).unwrap(),
        shapes::bundled("sphere162", 0.1).unwrap(),
        "icosahedron",
        "sphere162",
        512,
        7,
    );
    let tasks = generate_tasks(&scene, 64, 7);
    let cfg = OptimizerConfig::for_method(Method::Ours);
    let is_vertex = |shape: &diffwitness_core::geom::CompositeShape,
                     p: diffwitness_core::math::Vec3| {
        shape
            .source_mesh
            .vertices
            .iter()
            .any(|v| (*v - p).norm() < 1e-12)
    };
    let mut buckets = std::collections::BTreeMap::new();
    for task in &tasks {
        let r = optimize_task(&scene, task, &cfg);
        let k = (
            is_vertex(&scene.shape1, task.target1_local),
            is_vertex(&scene.shape2, task.target2_local),
        );
        let e = buckets.entry(k).or_insert((0usize, 0usize, Vec::new()));
        e.1 += 1;
        if r.final_loss < 1e-6 {
            e.0 += 1;
        } else {
            e.2.push((task.id, r.final_loss));
        }
    }
    for (k, (hits, total, fails)) in buckets {
        println!(
            "targets vertex?=({},{}) acc {}/{} fails: {:?}",
            k.0,
            k.1,
            hits,
            total,
            &fails[..fails.len().min(6)]
        );
    }
}
