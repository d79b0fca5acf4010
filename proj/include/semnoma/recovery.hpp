#pragma once

#include <vector>

#include "semnoma/semantics.hpp"

namespace semnoma {

// Deterministic stand-in for perceptual recovery scoring. Lower is better.
// Coverage of the informative (pruned) feature mass drives the score down;
// dependency and cross-modal overlap among the selected features drive it
// back up.
struct SurrogateParams {
  double base_score = 0.8;        // b0, score of an empty selection
  double coverage_gain = 0.6;     // a
  double redundancy_penalty = 0.3;  // c
  double floor = 0.05;            // epsilon

  void validate() const;
};

/// Score of one SU's selection. The selection is indexed over the full
/// candidate list; candidates outside the pruned set may be selected by the
/// unpruned schemes and contribute their (typically negligible) importance
/// plus redundancy.
double surrogate_lpips(const SelectionMask& selection,
                       const FeatureCatalog& catalog,
                       const CatalogScores& scores,
                       const std::vector<Candidate>& candidates,
                       const SurrogateParams& params);

double lpips_sum(const std::vector<SelectionMask>& selections,
                 const std::vector<const FeatureCatalog*>& catalogs,
                 const std::vector<const CatalogScores*>& scores,
                 const std::vector<const std::vector<Candidate>*>& candidates,
                 const SurrogateParams& params);

}  // namespace semnoma
