//! Lower bounds on the optimal index for exceptional and classical types.

use resonance_lab::resonance;
use resonance_lab::rootsys::{Family, RootSystemType};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut types = RootSystemType::exceptional_types();
    for family in [Family::A, Family::B, Family::C, Family::D] {
        types.extend((2..=6).filter_map(|l| RootSystemType::new(family, l).ok()));
    }
    println!("type  r(g)  l-1  resonance  k");
    for ty in types {
        let b = resonance::optimal_index_bound(ty)?;
        println!(
            "{:<5} {:>4} {:>4} {:>10} {:>2}  {}",
            ty.to_string(),
            b.r_g,
            b.rank_bound,
            b.resonance_bound,
            b.k_bound,
            b.limit_case
        );
    }
    Ok(())
}
