//! Deterministic SVG figures: decision regions colored by class, component
//! structure, and a path certificate overlay. Files land in a temp
//! directory; identical inputs always produce identical bytes.

use decision_regions::connectivity::{find_path, region_pieces, Engine, PathOutcome};
use decision_regions::defaults;
use decision_regions::net::builtin;
use decision_regions::svg::SvgScene;
use std::fs;

fn main() {
    let out_dir = std::env::temp_dir().join("decision-regions-figures");
    fs::create_dir_all(&out_dir).unwrap();
    let half = defaults::ANALYSIS_BOX_HALF;
    let eps = defaults::EPS_FEAS;

    // all classes of each builtin, colored by class
    for name in ["eq4-nonpyramidal", "eq5-relu", "lowrank-strips(0.1)"] {
        let net = builtin(name).unwrap();
        let mut scene = SvgScene::new(half);
        for class in 0..net.n_classes() {
            let pieces = region_pieces(&net, class, half, eps, Engine::Forward).unwrap();
            scene.add_region_layer(
                pieces.into_iter().map(|p| p.polyhedron).collect(),
                class,
                format!("class {}", class + 1),
            );
        }
        let file = out_dir.join(format!("{}.svg", name.replace(['(', ')'], "-")));
        fs::write(&file, scene.render().unwrap()).unwrap();
        println!("wrote {}", file.display());
    }

    // a certified path through eq5's triangle, endpoints marked
    let net = builtin("eq5-relu").unwrap();
    let mut scene = SvgScene::new(half);
    let pieces = region_pieces(&net, 0, half, eps, Engine::Forward).unwrap();
    scene.add_region_layer(
        pieces.into_iter().map(|p| p.polyhedron).collect(),
        0,
        "class 1",
    );
    let from = [0.25, 0.25];
    let to = [-5.0, -5.0];
    if let PathOutcome::Connected(cert) =
        find_path(&net, 0, &from, &to, half, eps, Engine::Forward).unwrap()
    {
        scene.add_polyline(cert.polyline.clone(), 2);
    }
    scene.add_point(from.to_vec(), 2);
    scene.add_point(to.to_vec(), 2);
    let file = out_dir.join("eq5-relu-path.svg");
    fs::write(&file, scene.render().unwrap()).unwrap();
    println!("wrote {}", file.display());
}
