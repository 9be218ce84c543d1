//! The hyperoctahedral group on three letters: elements, words and cosets.

use coordinate_bethe::weyl::{coset_representatives, GroupKind, WeylGroup};

fn main() -> coordinate_bethe::Result<()> {
    let group = WeylGroup::new(GroupKind::Hyperoctahedral, 3)?;
    println!("|W(B3)| = {}", group.len());
    for g in group.elements().iter().take(8) {
        println!("{g:?} = {:?}", group.word(g)?);
    }
    for m in 0..=3 {
        println!("cosets for tail length {m}: {}", coset_representatives(3, m)?.len());
    }
    Ok(())
}
