//! Builds every exceptional root system and round-trips one through JSON.

use resonance_lab::rootsys::{self, RootSystem, RootSystemType};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for ty in RootSystemType::exceptional_types() {
        let rs = rootsys::build(ty)?;
        println!(
            "{ty}: {} roots, {} positive, ambient dimension {}",
            rs.roots().len(),
            rootsys::positive_roots(&rs).len(),
            rs.ambient_dim()
        );
    }

    let g2 = rootsys::build("G2".parse()?)?;
    for (i, a) in g2.simple().iter().enumerate() {
        println!("G2 alpha_{} = {a}", i + 1);
    }
    let back = RootSystem::from_json(&g2.to_json()?)?;
    assert_eq!(back, g2);
    println!("G2 JSON round trip ok");
    Ok(())
}
