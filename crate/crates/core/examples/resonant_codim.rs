//! Parabolic codimensions and the minimal resonant codimension r(g).

use resonance_lab::rootsys::{self, RootSystemType};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["A5", "B4", "C3", "BC3", "D6", "E6", "E7", "E8", "F4", "G2"] {
        let ty: RootSystemType = name.parse()?;
        println!(
            "{name:>4}: codims {:?}  r(g) = {}  at j0 {:?}",
            rootsys::codims(ty)?,
            rootsys::minimal_resonant_codim(ty)?,
            rootsys::minimizing_j0(ty)?
        );
    }

    let f4 = rootsys::build("F4".parse()?)?;
    let pc = rootsys::parabolic_complement(&f4, 4)?;
    println!("F4, j0 = 4: {} roots", pc.codim);
    for r in &pc.complement {
        println!("  {r}");
    }
    Ok(())
}
