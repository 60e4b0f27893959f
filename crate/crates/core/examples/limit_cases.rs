//! Centers, pairings and uniform directions for the exceptional types.

use resonance_lab::resonance::{self, LimitCaseVerdict};
use resonance_lab::rootsys::RootSystemType;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for ty in RootSystemType::exceptional_types() {
        let rep = resonance::limit_case_report(ty)?;
        println!("{ty}: r(g) = {}, verdict {}", rep.r_g, rep.verdict.as_str());
        for case in &rep.j0_cases {
            let centers: Vec<String> = case.centers.iter().map(ToString::to_string).collect();
            print!("  j0 = {}: centers [{}]", case.j0, centers.join(", "));
            match &case.uniform_direction {
                Some(x) => println!(", X = {}", x.x),
                None => println!(),
            }
        }
        if rep.verdict == LimitCaseVerdict::Infeasible {
            println!("  bound raised to {}", rep.k_bound);
        }
    }

    // the F4 configuration for j0 = 4, step by step
    let rays = resonance::complement_rays("F4".parse()?, 4)?;
    let centers = resonance::find_centers(&rays)?;
    let conf = resonance::build_configuration(&rays, centers[0])?;
    assert!(conf.relations_hold());
    for (i, f) in conf.functionals.iter().enumerate() {
        println!("chi_{:<2} = {f}", i + 1);
    }
    println!("span dimension {}", resonance::span_dimension(&conf));
    Ok(())
}
