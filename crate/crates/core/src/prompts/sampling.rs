//! Uniform sampling without replacement over admissible (subject, place,
//! action) combinations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::library::{Action, MetadataLibrary, Place, Subject};
use super::PromptError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetadataSet {
    pub subject: Subject,
    pub place: Place,
    pub action: Action,
}

fn admissible_pairs(library: &MetadataLibrary) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (si, s) in library.subjects.iter().enumerate() {
        for (ai, a) in library.actions.iter().enumerate() {
            if a.applies_to(s) {
                pairs.push((si, ai));
            }
        }
    }
    pairs
}

/// Number of (subject, place, action) combinations whose action applies to the subject.
pub fn admissible_count(library: &MetadataLibrary) -> usize {
    admissible_pairs(library).len() * library.places.len()
}

/// `n` distinct admissible sets in a seed-determined order.
pub fn sample_metadata_sets(library: &MetadataLibrary, n: usize, seed: u64) -> Result<Vec<MetadataSet>, PromptError> {
    library.validate()?;
    let pairs = admissible_pairs(library);
    let places = library.places.len();
    let available = pairs.len() * places;
    if n > available {
        return Err(PromptError::ExhaustedSpace {
            requested: n,
            available,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(rand::seq::index::sample(&mut rng, available, n)
        .into_iter()
        .map(|k| {
            let (si, ai) = pairs[k / places];
            MetadataSet {
                subject: library.subjects[si].clone(),
                place: library.places[k % places].clone(),
                action: library.actions[ai].clone(),
            }
        })
        .collect())
}
