//! Connectivity with receipts: a path query either returns a polyline that
//! stays strictly inside the class (validated by dense sampling), or a
//! witness that the endpoints live in different components.

use decision_regions::connectivity::{find_path, Engine, PathOutcome};
use decision_regions::defaults;
use decision_regions::net::builtin;

fn query(name: &str, class: usize, from: [f64; 2], to: [f64; 2]) {
    let net = builtin(name).unwrap();
    let outcome = find_path(
        &net,
        class,
        &from,
        &to,
        defaults::ANALYSIS_BOX_HALF,
        defaults::EPS_FEAS,
        Engine::Forward,
    )
    .unwrap();
    println!(
        "{name}, class {}, ({:.2}, {:.2}) -> ({:.2}, {:.2}):",
        class + 1,
        from[0],
        from[1],
        to[0],
        to[1]
    );
    match outcome {
        PathOutcome::Connected(cert) => {
            println!(
                "  connected by {} segment(s), min sampled margin {:.4}",
                cert.polyline.len() - 1,
                cert.min_margin
            );
            for p in &cert.polyline {
                println!("    ({:+.4}, {:+.4})", p[0], p[1]);
            }
        }
        PathOutcome::Disconnected(w) => {
            println!(
                "  disconnected: endpoints in components {} and {} (of {})",
                w.from_component + 1,
                w.to_component + 1,
                w.n_components
            );
        }
    }
    println!();
}

fn main() {
    // both endpoints in eq5's triangle: the polyline may route through
    // several pieces, crossing at interior facet points
    query("eq5-relu", 0, [0.25, 0.25], [-5.0, -5.0]);

    // triangle to wedge: same class, different components
    query("eq5-relu", 0, [0.25, 0.25], [0.0, 5.0]);

    // eq4's class-2 band is one component even though the forward engine
    // cuts it into two pieces at the hidden hyperplane
    query("eq4-nonpyramidal", 1, [-3.0, 1.0], [1.0, 0.5]);
}
