//! Models and homomorphisms from their config descriptions.

use std::path::Path;

use dcx_core::group::{
    center, presets, quotient, quotient_by_normal, GroupModel, Homomorphism, PermutationGroup, RewritingModel,
    RewritingSystemSpec, Semidirect,
};

use crate::config::{GroupSpec, HomSpec};

pub fn group(spec: &GroupSpec, base_dir: &Path) -> Result<GroupModel, String> {
    let err = |e: dcx_core::Error| e.to_string();
    Ok(match spec {
        GroupSpec::Integers => presets::integers(),
        GroupSpec::Free { rank } => {
            if *rank == 0 {
                return Err("free group needs rank >= 1".into());
            }
            presets::free(*rank)
        }
        GroupSpec::FreeAbelian { rank } => {
            if *rank == 0 {
                return Err("free abelian group needs rank >= 1".into());
            }
            presets::free_abelian(*rank)
        }
        GroupSpec::Heisenberg => presets::heisenberg(),
        GroupSpec::InfiniteDihedral => presets::infinite_dihedral(),
        GroupSpec::FreeProduct { orders } => presets::free_product(orders).map_err(err)?,
        GroupSpec::Cyclic { n } => presets::cyclic(*n).map_err(err)?,
        GroupSpec::ElementaryAbelian { rank, modulus } => presets::elementary_abelian(*rank, *modulus).map_err(err)?,
        GroupSpec::Symmetric { n } => presets::symmetric(*n).map_err(err)?,
        GroupSpec::Alternating { n } => presets::alternating(*n).map_err(err)?,
        GroupSpec::Dihedral { n } => presets::dihedral(*n).map_err(err)?,
        GroupSpec::Quaternion => presets::quaternion(),
        GroupSpec::Permutation { degree, generators } => {
            let gens: Vec<(&str, &str)> = generators.iter().map(|g| (g.name.as_str(), g.word.as_str())).collect();
            GroupModel::new(PermutationGroup::from_cycles("permutation", *degree, &gens).map_err(err)?)
        }
        GroupSpec::Semidirect { dim, matrices } => GroupModel::new(Semidirect::new(*dim, matrices.clone()).map_err(err)?),
        GroupSpec::Quotient { base, modulus } => quotient(&group(base, base_dir)?, *modulus).map_err(err)?.0,
        GroupSpec::Rewriting { file, system } => {
            let text = match (file, system) {
                (Some(f), None) => {
                    let path = base_dir.join(f);
                    std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?
                }
                (None, Some(s)) => s.clone(),
                _ => return Err("rewriting group needs exactly one of `file` or `system`".into()),
            };
            let model = RewritingModel::new(RewritingSystemSpec::parse(&text).map_err(err)?).map_err(err)?;
            let unjoinable = model.confluence().unjoinable().count();
            if unjoinable > 0 {
                return Err(dcx_core::Error::NonConfluent(unjoinable).to_string());
            }
            GroupModel::new(model)
        }
    })
}

pub fn homomorphism(model: &GroupModel, spec: &HomSpec, base_dir: &Path) -> Result<Homomorphism, String> {
    let err = |e: dcx_core::Error| e.to_string();
    match spec {
        HomSpec::Modulus(m) => Ok(quotient(model, *m).map_err(err)?.1),
        HomSpec::Parity(true) => Homomorphism::length_parity(model.clone()).map_err(err),
        HomSpec::Center(true) => {
            let z = center(model).map_err(err)?;
            Ok(quotient_by_normal(model, &z).map_err(err)?.1)
        }
        HomSpec::Parity(false) | HomSpec::Center(false) => Err("set to true or remove the entry".into()),
        HomSpec::Images { target, images } => {
            let target = group(target, base_dir)?;
            let words: Vec<&str> = images.iter().map(String::as_str).collect();
            Homomorphism::from_target_words(model.clone(), target, &words).map_err(err)
        }
    }
}
