//! Train two classifiers on the same two-islands data and inspect the
//! resulting geometry. A width-2 bottleneck keeps every decision region
//! connected (the certificate below proves it), so to hit both islands it
//! must route class 1 around the separating band, far outside the data.
//! A wide layer is free to cut class 1 into two honest islands instead.
//!
//! Component counts are relative to an analysis window. The width-2 net's
//! wrap-around happens hundreds of units out, so a fixed window of 8 sees
//! two pieces of what is globally one region; `analyze` grows the window
//! until the count stops being an artifact of the box.

use decision_regions::connectivity::{analyze, Engine};
use decision_regions::certify::certify;
use decision_regions::defaults;
use decision_regions::net::Network;
use decision_regions::train::{count_errors, gen_two_islands, gradient_check, train, TrainConfig};

/// Component count that is not an artifact of the window: restart `analyze`
/// from a doubled window while it reports the count unsettled.
fn settled_components(net: &Network, class: usize) -> (usize, f64, bool) {
    let mut a = analyze(
        net,
        class,
        defaults::ANALYSIS_BOX_HALF,
        defaults::EPS_FEAS,
        Engine::Forward,
    )
    .unwrap();
    for _ in 0..3 {
        if !a.unsettled {
            break;
        }
        let wider = a.final_box_half * 2.0;
        a = analyze(net, class, wider, defaults::EPS_FEAS, Engine::Forward).unwrap();
    }
    (a.report.components.len(), a.final_box_half, a.unsettled)
}

fn main() {
    let data = gen_two_islands(100, 0);
    println!(
        "two-islands: {} points, class 1 = two squares, class 2 = the band between",
        data.len()
    );

    for widths in [vec![2], vec![16]] {
        let cfg = TrainConfig {
            widths: widths.clone(),
            epochs: 400,
            seed: 3,
            ..TrainConfig::default()
        };
        let result = train(&data, &cfg).unwrap();
        let net = result.network;
        let errors = count_errors(&net, &data);
        let last = result.history.last().unwrap();
        println!("\nhidden widths {widths:?}:");
        println!(
            "  final loss {:.4}, training errors {errors} of {}",
            last.loss,
            data.len()
        );

        let cert = certify(&net, defaults::RANK_REL_TOL);
        println!(
            "  certify: {}",
            if cert.guaranteed() {
                "guaranteed connected regions"
            } else {
                "no connectedness guarantee"
            }
        );

        for class in 0..net.n_classes() {
            let (n, half, unsettled) = settled_components(&net, class);
            println!(
                "  class {}: {} component(s) within half-width {:.0}{}",
                class + 1,
                n,
                half,
                if unsettled { " (count may still merge further out)" } else { "" }
            );
        }

        // analytic gradients against central differences, skipping points
        // that sit on an activation breakpoint
        let gc = gradient_check(&net, &data, 1e-7, 1e-6, 20, 42).unwrap();
        println!(
            "  gradient check: max rel err {:.2e} over {} parameters ({} points excluded)",
            gc.max_rel_err, gc.checked, gc.excluded_points
        );
    }
}
