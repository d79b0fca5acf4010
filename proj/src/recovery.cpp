#include "semnoma/recovery.hpp"

#include <algorithm>

#include "semnoma/errors.hpp"

namespace semnoma {

void SurrogateParams::validate() const {
  if (!(base_score > 0.0 && base_score <= 1.0))
    throw ConfigError("surrogate: base_score must be in (0,1]");
  if (!(coverage_gain > 0.0)) throw ConfigError("surrogate: coverage_gain must be > 0");
  if (redundancy_penalty < 0.0)
    throw ConfigError("surrogate: redundancy_penalty must be >= 0");
  if (floor < 0.0) throw ConfigError("surrogate: floor must be >= 0");
  if (floor > base_score)
    throw ConfigError("surrogate: floor must not exceed base_score");
}

double surrogate_lpips(const SelectionMask& selection,
                       const FeatureCatalog& catalog,
                       const CatalogScores& scores,
                       const std::vector<Candidate>& candidates,
                       const SurrogateParams& params) {
  if (selection.bits.size() != candidates.size())
    throw ShapeError("surrogate_lpips: selection length mismatch");

  // Coverage: selected importance relative to the pruned-set mass.
  double pruned_mass = 0.0;
  for (int i : scores.retained_textual) pruned_mass += scores.textual_importance(i);
  for (int n : scores.retained_visual) pruned_mass += scores.visual_importance(n);
  const int pruned_count = static_cast<int>(scores.retained_textual.size() +
                                            scores.retained_visual.size());

  double selected_mass = 0.0;
  std::vector<int> sel_textual, sel_visual;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (!selection.bits[c]) continue;
    selected_mass += candidates[c].importance;
    if (candidates[c].visual)
      sel_visual.push_back(candidates[c].index);
    else
      sel_textual.push_back(candidates[c].index);
  }
  const double coverage = pruned_mass > 0.0 ? selected_mass / pruned_mass : 0.0;

  // Redundancy: pairwise textual dependency over both ordered pairs, plus the
  // cross-modal overlap of selected masks with selected heatmaps normalized
  // by the pruned-set size.
  double redundancy = 0.0;
  for (int i : sel_textual)
    for (int j : sel_textual)
      if (i != j) redundancy += scores.contribution(i) * scores.dependency(i, j);
  if (pruned_count > 0) {
    double cross = 0.0;
    for (int n : sel_visual)
      for (int i : sel_textual) cross += scores.cross_overlap(n, i);
    redundancy += cross / pruned_count;
  }

  const double raw = params.base_score - params.coverage_gain * coverage +
                     params.redundancy_penalty * redundancy;
  return std::clamp(raw, params.floor, 1.0);
}

double lpips_sum(const std::vector<SelectionMask>& selections,
                 const std::vector<const FeatureCatalog*>& catalogs,
                 const std::vector<const CatalogScores*>& scores,
                 const std::vector<const std::vector<Candidate>*>& candidates,
                 const SurrogateParams& params) {
  if (selections.size() != catalogs.size() || catalogs.size() != scores.size() ||
      scores.size() != candidates.size())
    throw ShapeError("lpips_sum: per-SU argument counts differ");
  double total = 0.0;
  for (std::size_t k = 0; k < selections.size(); ++k)
    total += surrogate_lpips(selections[k], *catalogs[k], *scores[k],
                             *candidates[k], params);
  return total;
}

}  // namespace semnoma
