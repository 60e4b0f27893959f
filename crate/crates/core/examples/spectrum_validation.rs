//! Imports limit-case configurations as spectra and breaks the rules on
//! purpose.

use resonance_lab::confstruct::{self, Block, BlockSignature, ConformalSpectrum};
use resonance_lab::exactlin::RationalVector;
use resonance_lab::resonance;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (name, j0) in [("F4", 1), ("F4", 4), ("E8", 1)] {
        let rays = resonance::complement_rays(name.parse()?, j0)?;
        let center = resonance::find_centers(&rays)?[0];
        let conf = resonance::build_configuration(&rays, center)?;
        let p = (conf.r - 1) / 2;
        let s = confstruct::spectrum_from_configuration(&conf, p, p + 2)?;
        println!(
            "{name} j0 = {j0}: CO({},{}), r = {}, violations {}, orthogonality obligations {}",
            s.p(),
            s.q(),
            s.r(),
            confstruct::validate(&s).len(),
            confstruct::orthogonality_obligations(&s).len()
        );
    }

    // r = 4 is even, so p must equal q
    let blocks = (0..4)
        .map(|i| Block::isotropic(RationalVector::from_ints(&[i]), 1))
        .collect();
    let bad = ConformalSpectrum::with_derived_chi(1, 3, blocks)?;
    for v in confstruct::validate(&bad) {
        println!("  {v}");
    }

    // a non-degenerate middle block in CO(1, 2)
    let ok = ConformalSpectrum::with_derived_chi(
        1,
        2,
        vec![
            Block::isotropic(RationalVector::from_ints(&[-3]), 1),
            Block {
                functional: RationalVector::from_ints(&[-2]),
                multiplicity: 1,
                signature: BlockSignature::Signature { p: 0, q: 1 },
            },
            Block::isotropic(RationalVector::from_ints(&[-1]), 1),
        ],
    )?;
    println!("CO(1,2) example: chi = {}, violations {}", ok.chi(), confstruct::validate(&ok).len());
    println!("{}", ok.to_json()?);
    Ok(())
}
