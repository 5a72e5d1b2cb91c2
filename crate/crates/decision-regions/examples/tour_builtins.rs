//! Start here. The four builtin networks are tiny analytic classifiers
//! whose decision regions are known exactly; this tour evaluates each one,
//! certifies (or refuses to certify) connectedness from its architecture,
//! and counts the components of every class.

use decision_regions::certify::{certify, Verdict};
use decision_regions::connectivity::{components_report, Engine};
use decision_regions::defaults;
use decision_regions::net::{builtin, Label};

fn main() {
    let names = [
        "eq4-nonpyramidal",
        "eq5-relu",
        "lowrank-strips(0.1)",
        "tight-2-3-2(0.1)",
    ];
    for name in names {
        let net = builtin(name).unwrap();
        println!("== {name}");
        println!(
            "   widths {:?}, {} hidden layer(s)",
            net.widths(),
            net.hidden_layers().len()
        );

        let cert = certify(&net, defaults::RANK_REL_TOL);
        match &cert.verdict {
            Verdict::GuaranteedConnected { basis } => {
                println!("   certify: guaranteed connected ({basis:?})")
            }
            Verdict::NoGuarantee { obstructions } => {
                println!("   certify: no guarantee");
                for o in obstructions {
                    println!("     obstruction: {o:?}");
                }
            }
        }

        for class in 0..net.n_classes() {
            let (_, _, rep) = components_report(
                &net,
                class,
                defaults::ANALYSIS_BOX_HALF,
                defaults::EPS_FEAS,
                Engine::Forward,
            )
            .unwrap();
            println!(
                "   class {}: {} component(s) from {} polyhedral piece(s)",
                class + 1,
                rep.components.len(),
                rep.n_pieces
            );
        }

        for x in [[0.0, 0.0], [3.0, 3.0], [-3.0, -3.0]] {
            let d = net.classify(&x, defaults::CLASSIFY_EPS);
            let label = match d.label {
                Label::Class(j) => format!("class {}", j + 1),
                Label::Tie => "tie".to_string(),
            };
            println!(
                "   f({:>4}, {:>4}) -> {label} (margin {:.3})",
                x[0], x[1], d.margin
            );
        }
        println!();
    }
    println!("none of the four satisfies the width+rank+activation conditions,");
    println!("and each one indeed has a class whose region falls apart.");
}
