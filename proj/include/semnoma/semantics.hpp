#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "semnoma/rng.hpp"

namespace semnoma {

// Spatial attribution map of one textual feature; nonnegative activations.
struct Heatmap {
  int width = 0;
  int height = 0;
  std::vector<float> values;  // row-major, width * height

  int cells() const { return width * height; }
};

struct SegmentationMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;  // 0/1

  int cells() const { return width * height; }
};

struct TextualFeature {
  std::string id;
  Heatmap heatmap;
  std::int64_t encoded_bits = 0;
};

struct VisualFeature {
  std::string id;
  SegmentationMask mask;
  std::int64_t encoded_bits = 0;
};

// One SU's extracted cross-modal features plus the scoring knobs.
struct FeatureCatalog {
  std::vector<TextualFeature> textual;
  std::vector<VisualFeature> visual;
  double binarize_level = 0.25;     // tau, relative to the heatmap maximum
  double threshold_textual = 0.5;   // xi_t
  double threshold_visual = 0.1;    // xi_v
  double header_bits = 0.0;

  void validate() const;
};

// Binarized support of a grid: per-cell membership plus the cell count.
struct Support {
  std::vector<std::uint8_t> cells;
  int count = 0;
};

Support binarize(const Heatmap& heatmap, double tau);
Support mask_support(const SegmentationMask& mask);

/// H_i = ReLU(sum_m alpha_m A_m) with region features given as full grids.
Heatmap heatmap_from_attribution(const std::vector<double>& alpha,
                                 const std::vector<Heatmap>& region_features);

/// Jaccard overlap of supports. Unit diagonal for nonempty supports; any pair
/// with an empty side scores 0.
Eigen::MatrixXd dependency_matrix(const std::vector<Support>& supports);

/// Support-size shares, summing to one; uniform when every support is empty.
Eigen::VectorXd contribution_vector(const std::vector<Support>& supports);

Eigen::VectorXd textual_importance(const Eigen::VectorXd& contribution,
                                   const Eigen::MatrixXd& dependency,
                                   bool include_diagonal = true);

/// overlap(n, i) = |S_n intersect H_i| / |S_n|.
Eigen::MatrixXd cross_overlap_matrix(const std::vector<Support>& mask_supports,
                                     const std::vector<Support>& heatmap_supports);

Eigen::VectorXd visual_importance(const Eigen::MatrixXd& cross_overlap,
                                  const std::vector<int>& retained_textual);

/// Indices with score >= threshold, original order kept. An all-pruned result
/// degrades to the argmax so no SU ends up with an empty candidate set.
std::vector<int> prune_by_threshold(const Eigen::VectorXd& scores,
                                    double threshold);

// Everything derived from one catalog: supports, dependency/contribution,
// importance scores and the retained index sets.
struct CatalogScores {
  std::vector<Support> textual_supports;
  std::vector<Support> visual_supports;
  Eigen::MatrixXd dependency;
  Eigen::VectorXd contribution;
  Eigen::VectorXd textual_importance;
  std::vector<int> retained_textual;
  Eigen::MatrixXd cross_overlap;  // visual x textual
  Eigen::VectorXd visual_importance;
  std::vector<int> retained_visual;
};

CatalogScores score_catalog(const FeatureCatalog& catalog,
                            bool include_diagonal = true);

// A selectable feature as the policy sees it.
struct Candidate {
  bool visual = false;
  int index = 0;  // into catalog.textual or catalog.visual
  double importance = 0.0;
  std::int64_t encoded_bits = 0;
};

/// All features in catalog order (textual first), annotated with importance.
std::vector<Candidate> all_candidates(const FeatureCatalog& catalog,
                                      const CatalogScores& scores);

/// Membership of each candidate in the pruned (retained) sets.
std::vector<std::uint8_t> pruned_mask(const FeatureCatalog& catalog,
                                      const CatalogScores& scores);

// Binary selection over a candidate list; bits align with the list.
struct SelectionMask {
  std::vector<std::uint8_t> bits;
};

/// Q_k in bits: header plus the encoded sizes of the selected candidates,
/// textual and visual parts accumulated separately then summed.
double traffic_demand(const SelectionMask& selection,
                      const std::vector<Candidate>& candidates,
                      double header_bits);

// Synthetic catalog generation: blob heatmaps and tiled masks with
// controllable overlap, plus deliberately weak and near-duplicate features so
// that pruning and redundancy have something to act on.
struct CatalogLayout {
  int grid_width = 32;
  int grid_height = 32;
  int num_textual = 6;
  int num_visual = 4;
  double overlap = 0.35;          // 0 gives pairwise-disjoint supports
  int num_low_importance = 2;     // small offside blobs appended to textual
  int num_duplicates = 1;         // near-copies of the first textual blobs
  std::int64_t textual_bits_min = 600000;
  std::int64_t textual_bits_max = 1400000;
  std::int64_t visual_bits_min = 600000;
  std::int64_t visual_bits_max = 1400000;
  double binarize_level = 0.25;
  double threshold_textual = 0.5;
  double threshold_visual = 0.1;
  double header_bits = 0.0;
};

FeatureCatalog synthesize_catalog(std::uint64_t seed, const CatalogLayout& layout);

// Catalogs of all SUs in one experiment; shared means one physical catalog.
struct CatalogSet {
  bool shared = false;
  std::vector<FeatureCatalog> per_su;

  int num_sus() const { return static_cast<int>(per_su.size()); }
  const FeatureCatalog& at(int k) const { return per_su[k]; }
};

CatalogSet synthesize_catalog_set(std::uint64_t seed, const CatalogLayout& layout,
                                  int num_sus, bool shared);

/// Manifest (JSON) plus flat binary grids (float32 heatmaps, byte masks).
void save_catalog_set(const CatalogSet& set, const std::string& manifest_path);
CatalogSet load_catalog_set(const std::string& manifest_path);

}  // namespace semnoma
