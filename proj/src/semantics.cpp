#include "semnoma/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "semnoma/errors.hpp"

namespace semnoma {

using nlohmann::json;

void FeatureCatalog::validate() const {
  if (textual.empty()) throw ConfigError("catalog: needs at least one textual feature");
  if (visual.empty()) throw ConfigError("catalog: needs at least one visual feature");
  int w = -1, h = -1;
  const auto check_grid = [&](int gw, int gh, const char* what) {
    if (gw <= 0 || gh <= 0) throw ConfigError(std::string("catalog: empty grid in ") + what);
    if (w < 0) {
      w = gw;
      h = gh;
    } else if (gw != w || gh != h) {
      throw ShapeError(std::string("catalog: mismatched grid size in ") + what);
    }
  };
  for (const auto& t : textual) {
    check_grid(t.heatmap.width, t.heatmap.height, "heatmap");
    if (static_cast<int>(t.heatmap.values.size()) != t.heatmap.cells())
      throw ShapeError("catalog: heatmap value count mismatch");
    for (float v : t.heatmap.values)
      if (!(v >= 0.0f)) throw ConfigError("catalog: negative heatmap activation");
    if (t.encoded_bits <= 0) throw ConfigError("catalog: encoded_bits must be > 0");
  }
  for (const auto& v : visual) {
    check_grid(v.mask.width, v.mask.height, "mask");
    if (static_cast<int>(v.mask.values.size()) != v.mask.cells())
      throw ShapeError("catalog: mask value count mismatch");
    if (mask_support(v.mask).count == 0)
      throw ConfigError("catalog: segmentation mask with empty support");
    if (v.encoded_bits <= 0) throw ConfigError("catalog: encoded_bits must be > 0");
  }
  if (!(binarize_level > 0.0 && binarize_level < 1.0))
    throw ConfigError("catalog: binarize_level must be in (0,1)");
}

Support binarize(const Heatmap& heatmap, double tau) {
  Support s;
  s.cells.assign(heatmap.values.size(), 0);
  float peak = 0.0f;
  for (float v : heatmap.values) peak = std::max(peak, v);
  if (peak <= 0.0f) return s;  // empty heatmap -> empty support
  const float level = static_cast<float>(tau) * peak;
  for (std::size_t i = 0; i < heatmap.values.size(); ++i) {
    if (heatmap.values[i] >= level) {
      s.cells[i] = 1;
      ++s.count;
    }
  }
  return s;
}

Support mask_support(const SegmentationMask& mask) {
  Support s;
  s.cells.assign(mask.values.size(), 0);
  for (std::size_t i = 0; i < mask.values.size(); ++i) {
    if (mask.values[i] != 0) {
      s.cells[i] = 1;
      ++s.count;
    }
  }
  return s;
}

Heatmap heatmap_from_attribution(const std::vector<double>& alpha,
                                 const std::vector<Heatmap>& region_features) {
  if (alpha.size() != region_features.size())
    throw ShapeError("heatmap_from_attribution: one weight per region required");
  if (region_features.empty())
    throw ShapeError("heatmap_from_attribution: empty region set");
  const int w = region_features.front().width;
  const int h = region_features.front().height;
  Heatmap out;
  out.width = w;
  out.height = h;
  out.values.assign(static_cast<std::size_t>(w) * h, 0.0f);
  std::vector<double> acc(out.values.size(), 0.0);
  for (std::size_t m = 0; m < region_features.size(); ++m) {
    const Heatmap& a = region_features[m];
    if (a.width != w || a.height != h)
      throw ShapeError("heatmap_from_attribution: region grids must align");
    for (std::size_t i = 0; i < acc.size(); ++i)
      acc[i] += alpha[m] * a.values[i];
  }
  for (std::size_t i = 0; i < acc.size(); ++i)
    out.values[i] = static_cast<float>(std::max(acc[i], 0.0));
  return out;
}

namespace {

int intersection_count(const Support& a, const Support& b) {
  int n = 0;
  for (std::size_t i = 0; i < a.cells.size(); ++i)
    n += (a.cells[i] & b.cells[i]);
  return n;
}

}  // namespace

Eigen::MatrixXd dependency_matrix(const std::vector<Support>& supports) {
  const int n = static_cast<int>(supports.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (supports[i].count == 0) continue;
    d(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      if (supports[j].count == 0) continue;
      const int inter = intersection_count(supports[i], supports[j]);
      const int uni = supports[i].count + supports[j].count - inter;
      const double value = uni > 0 ? static_cast<double>(inter) / uni : 0.0;
      d(i, j) = value;
      d(j, i) = value;
    }
  }
  return d;
}

Eigen::VectorXd contribution_vector(const std::vector<Support>& supports) {
  const int n = static_cast<int>(supports.size());
  Eigen::VectorXd c(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    c(i) = supports[i].count;
    total += supports[i].count;
  }
  if (total <= 0.0) return Eigen::VectorXd::Constant(n, 1.0 / n);
  return c / total;
}

Eigen::VectorXd textual_importance(const Eigen::VectorXd& contribution,
                                   const Eigen::MatrixXd& dependency,
                                   bool include_diagonal) {
  const int n = static_cast<int>(contribution.size());
  Eigen::VectorXd importance(n);
  for (int i = 0; i < n; ++i) {
    double row = dependency.row(i).sum();
    if (!include_diagonal) row -= dependency(i, i);
    importance(i) = contribution(i) * row;
  }
  return importance;
}

Eigen::MatrixXd cross_overlap_matrix(const std::vector<Support>& mask_supports,
                                     const std::vector<Support>& heatmap_supports) {
  const int nv = static_cast<int>(mask_supports.size());
  const int nt = static_cast<int>(heatmap_supports.size());
  Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(nv, nt);
  for (int n = 0; n < nv; ++n) {
    if (mask_supports[n].count == 0) continue;
    for (int i = 0; i < nt; ++i)
      overlap(n, i) =
          static_cast<double>(intersection_count(mask_supports[n], heatmap_supports[i])) /
          mask_supports[n].count;
  }
  return overlap;
}

Eigen::VectorXd visual_importance(const Eigen::MatrixXd& cross_overlap,
                                  const std::vector<int>& retained_textual) {
  Eigen::VectorXd importance = Eigen::VectorXd::Zero(cross_overlap.rows());
  for (int n = 0; n < cross_overlap.rows(); ++n)
    for (int i : retained_textual) importance(n) += cross_overlap(n, i);
  return importance;
}

std::vector<int> prune_by_threshold(const Eigen::VectorXd& scores,
                                    double threshold) {
  std::vector<int> retained;
  for (int i = 0; i < scores.size(); ++i)
    if (scores(i) >= threshold) retained.push_back(i);
  if (retained.empty() && scores.size() > 0) {
    int arg_max = 0;
    for (int i = 1; i < scores.size(); ++i)
      if (scores(i) > scores(arg_max)) arg_max = i;
    retained.push_back(arg_max);
  }
  return retained;
}

CatalogScores score_catalog(const FeatureCatalog& catalog, bool include_diagonal) {
  catalog.validate();
  CatalogScores s;
  s.textual_supports.reserve(catalog.textual.size());
  for (const auto& t : catalog.textual)
    s.textual_supports.push_back(binarize(t.heatmap, catalog.binarize_level));
  s.visual_supports.reserve(catalog.visual.size());
  for (const auto& v : catalog.visual)
    s.visual_supports.push_back(mask_support(v.mask));
  s.dependency = dependency_matrix(s.textual_supports);
  s.contribution = contribution_vector(s.textual_supports);
  s.textual_importance =
      textual_importance(s.contribution, s.dependency, include_diagonal);
  s.retained_textual =
      prune_by_threshold(s.textual_importance, catalog.threshold_textual);
  s.cross_overlap = cross_overlap_matrix(s.visual_supports, s.textual_supports);
  s.visual_importance = visual_importance(s.cross_overlap, s.retained_textual);
  s.retained_visual =
      prune_by_threshold(s.visual_importance, catalog.threshold_visual);
  return s;
}

std::vector<Candidate> all_candidates(const FeatureCatalog& catalog,
                                      const CatalogScores& scores) {
  std::vector<Candidate> out;
  out.reserve(catalog.textual.size() + catalog.visual.size());
  for (std::size_t i = 0; i < catalog.textual.size(); ++i)
    out.push_back({false, static_cast<int>(i), scores.textual_importance(i),
                   catalog.textual[i].encoded_bits});
  for (std::size_t n = 0; n < catalog.visual.size(); ++n)
    out.push_back({true, static_cast<int>(n), scores.visual_importance(n),
                   catalog.visual[n].encoded_bits});
  return out;
}

std::vector<std::uint8_t> pruned_mask(const FeatureCatalog& catalog,
                                      const CatalogScores& scores) {
  std::vector<std::uint8_t> mask(catalog.textual.size() + catalog.visual.size(), 0);
  for (int i : scores.retained_textual) mask[i] = 1;
  for (int n : scores.retained_visual) mask[catalog.textual.size() + n] = 1;
  return mask;
}

double traffic_demand(const SelectionMask& selection,
                      const std::vector<Candidate>& candidates,
                      double header_bits) {
  if (selection.bits.size() != candidates.size())
    throw ShapeError("traffic_demand: selection length mismatch");
  double textual_bits = 0.0;
  double visual_bits = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!selection.bits[i]) continue;
    if (candidates[i].visual)
      visual_bits += static_cast<double>(candidates[i].encoded_bits);
    else
      textual_bits += static_cast<double>(candidates[i].encoded_bits);
  }
  return header_bits + textual_bits + visual_bits;
}

namespace {

// Gaussian blob centered at (cx, cy), cut off below ~5% so overlap stays local.
void add_blob(Heatmap& h, double cx, double cy, double radius, double gain) {
  for (int yy = 0; yy < h.height; ++yy) {
    for (int xx = 0; xx < h.width; ++xx) {
      const double dx = (xx - cx) / radius;
      const double dy = (yy - cy) / radius;
      const double v = gain * std::exp(-0.5 * (dx * dx + dy * dy));
      if (v > 0.05 * gain)
        h.values[yy * h.width + xx] += static_cast<float>(v);
    }
  }
}

}  // namespace

FeatureCatalog synthesize_catalog(std::uint64_t seed, const CatalogLayout& layout) {
  if (layout.num_textual < 1 || layout.num_visual < 1)
    throw ConfigError("catalog layout: need at least one feature per modality");
  if (layout.grid_width < 4 || layout.grid_height < 4)
    throw ConfigError("catalog layout: grid too small");
  Rng rng(seed);
  FeatureCatalog catalog;
  catalog.binarize_level = layout.binarize_level;
  catalog.threshold_textual = layout.threshold_textual;
  catalog.threshold_visual = layout.threshold_visual;
  catalog.header_bits = layout.header_bits;

  const int w = layout.grid_width;
  const int h = layout.grid_height;
  const int n_main = layout.num_textual;

  // Main textual blobs. overlap = 0 places small blobs on disjoint tiles;
  // otherwise blobs cluster around the grid center with radii large enough
  // that their supports overlap, which is what pushes Eq.-style importance
  // scores of informative features above a 0.5 threshold.
  const int tiles_x = static_cast<int>(std::ceil(std::sqrt(double(n_main))));
  const int tiles_y = (n_main + tiles_x - 1) / tiles_x;
  const double tile_w = static_cast<double>(w) / tiles_x;
  const double tile_h = static_cast<double>(h) / tiles_y;
  for (int i = 0; i < n_main; ++i) {
    Heatmap hm;
    hm.width = w;
    hm.height = h;
    hm.values.assign(static_cast<std::size_t>(w) * h, 0.0f);
    double cx, cy, radius;
    if (layout.overlap <= 0.0) {
      const int tx = i % tiles_x;
      const int ty = i / tiles_x;
      cx = (tx + 0.5) * tile_w + rng.uniform(-0.05, 0.05) * tile_w;
      cy = (ty + 0.5) * tile_h + rng.uniform(-0.05, 0.05) * tile_h;
      radius = 0.16 * std::min(tile_w, tile_h);
    } else {
      const double jitter = 0.05 + 0.15 * (1.0 - std::min(layout.overlap, 1.0));
      cx = 0.5 * w + rng.uniform(-jitter, jitter) * w;
      cy = 0.5 * h + rng.uniform(-jitter, jitter) * h;
      radius = (0.10 + 0.45 * layout.overlap) * std::min(w, h) *
               (0.9 + 0.2 * rng.uniform());
    }
    add_blob(hm, cx, cy, radius, 1.0 + rng.uniform());
    TextualFeature feature;
    feature.id = "t" + std::to_string(i);
    feature.heatmap = std::move(hm);
    feature.encoded_bits = rng.uniform_int(
        static_cast<int>(layout.textual_bits_min),
        static_cast<int>(layout.textual_bits_max));
    catalog.textual.push_back(std::move(feature));
  }

  // Near-duplicates of the leading blobs: same support, jittered amplitude.
  for (int d = 0; d < layout.num_duplicates && d < n_main; ++d) {
    TextualFeature dup = catalog.textual[d];
    dup.id = "t" + std::to_string(n_main + d) + "_dup";
    const float gain = static_cast<float>(0.8 + 0.4 * rng.uniform());
    for (float& v : dup.heatmap.values) v *= gain;
    dup.encoded_bits = rng.uniform_int(
        static_cast<int>(layout.textual_bits_min),
        static_cast<int>(layout.textual_bits_max));
    catalog.textual.push_back(std::move(dup));
  }

  // Deliberately low-importance textual features: tiny blobs squeezed into
  // the grid border, far from the tile interiors.
  for (int i = 0; i < layout.num_low_importance; ++i) {
    Heatmap hm;
    hm.width = w;
    hm.height = h;
    hm.values.assign(static_cast<std::size_t>(w) * h, 0.0f);
    const double cx = (i % 2 == 0) ? 1.0 : w - 2.0;
    const double cy = rng.uniform(1.0, 3.0);
    add_blob(hm, cx, cy, 1.2, 0.8 + 0.2 * rng.uniform());
    TextualFeature feature;
    feature.id = "t_low" + std::to_string(i);
    feature.heatmap = std::move(hm);
    feature.encoded_bits = rng.uniform_int(
        static_cast<int>(layout.textual_bits_min),
        static_cast<int>(layout.textual_bits_max));
    catalog.textual.push_back(std::move(feature));
  }

  // Visual masks tile the grid in horizontal bands. With more than one band
  // the last one is a thin strip on the bottom edge, away from the blob
  // cluster, so the catalog always carries a low-importance visual category.
  const int bands = layout.num_visual;
  const int strip = std::max(2, h / 16);
  const int usable = bands > 1 ? h - strip : h;
  const int main_bands = bands > 1 ? bands - 1 : 1;
  for (int n = 0; n < bands; ++n) {
    SegmentationMask mask;
    mask.width = w;
    mask.height = h;
    mask.values.assign(static_cast<std::size_t>(w) * h, 0);
    int y0, y1;
    if (bands > 1 && n == bands - 1) {
      y0 = h - strip;
      y1 = h;
    } else {
      y0 = n * usable / main_bands;
      y1 = (n + 1) * usable / main_bands;
      if (y1 <= y0) y1 = y0 + 1;
    }
    for (int yy = y0; yy < y1; ++yy)
      for (int xx = 0; xx < w; ++xx) mask.values[yy * w + xx] = 1;
    VisualFeature feature;
    feature.id = "v" + std::to_string(n);
    feature.mask = std::move(mask);
    feature.encoded_bits = rng.uniform_int(
        static_cast<int>(layout.visual_bits_min),
        static_cast<int>(layout.visual_bits_max));
    catalog.visual.push_back(std::move(feature));
  }

  catalog.validate();
  return catalog;
}

CatalogSet synthesize_catalog_set(std::uint64_t seed, const CatalogLayout& layout,
                                  int num_sus, bool shared) {
  if (num_sus < 1) throw ConfigError("catalog set: num_sus must be >= 1");
  CatalogSet set;
  set.shared = shared;
  set.per_su.reserve(num_sus);
  for (int k = 0; k < num_sus; ++k)
    set.per_su.push_back(synthesize_catalog(shared ? seed : seed + 1000003ULL * k,
                                            layout));
  return set;
}

namespace {

json catalog_manifest(const FeatureCatalog& catalog) {
  json su;
  su["binarize_level"] = catalog.binarize_level;
  su["threshold_textual"] = catalog.threshold_textual;
  su["threshold_visual"] = catalog.threshold_visual;
  su["header_bits"] = catalog.header_bits;
  su["textual"] = json::array();
  for (const auto& t : catalog.textual)
    su["textual"].push_back({{"id", t.id}, {"bits", t.encoded_bits}});
  su["visual"] = json::array();
  for (const auto& v : catalog.visual)
    su["visual"].push_back({{"id", v.id}, {"bits", v.encoded_bits}});
  return su;
}

}  // namespace

void save_catalog_set(const CatalogSet& set, const std::string& manifest_path) {
  if (set.per_su.empty()) throw ConfigError("save_catalog_set: empty set");
  const int w = set.per_su.front().textual.front().heatmap.width;
  const int h = set.per_su.front().textual.front().heatmap.height;
  const std::filesystem::path manifest(manifest_path);
  std::filesystem::path grids = manifest;
  grids.replace_extension(".grids");

  json root;
  root["format"] = "semnoma-catalog";
  root["version"] = 1;
  root["grid_width"] = w;
  root["grid_height"] = h;
  root["shared"] = set.shared;
  root["grids_file"] = grids.filename().string();
  root["sus"] = json::array();
  for (const auto& catalog : set.per_su) root["sus"].push_back(catalog_manifest(catalog));

  std::ofstream grid_stream(grids, std::ios::binary);
  if (!grid_stream) throw IoError("save_catalog_set: cannot write " + grids.string());
  for (const auto& catalog : set.per_su) {
    for (const auto& t : catalog.textual)
      grid_stream.write(reinterpret_cast<const char*>(t.heatmap.values.data()),
                        static_cast<std::streamsize>(t.heatmap.values.size() * sizeof(float)));
    for (const auto& v : catalog.visual)
      grid_stream.write(reinterpret_cast<const char*>(v.mask.values.data()),
                        static_cast<std::streamsize>(v.mask.values.size()));
  }
  grid_stream.close();

  std::ofstream manifest_stream(manifest);
  if (!manifest_stream)
    throw IoError("save_catalog_set: cannot write " + manifest.string());
  manifest_stream << root.dump(2) << "\n";
}

CatalogSet load_catalog_set(const std::string& manifest_path) {
  std::ifstream manifest_stream(manifest_path);
  if (!manifest_stream)
    throw IoError("load_catalog_set: cannot open " + manifest_path);
  json root;
  try {
    manifest_stream >> root;
  } catch (const json::exception& e) {
    throw IoError(std::string("load_catalog_set: bad manifest: ") + e.what());
  }
  if (root.value("format", "") != "semnoma-catalog")
    throw IoError("load_catalog_set: not a catalog manifest");
  if (root.value("version", 0) != 1)
    throw VersionError("load_catalog_set: unsupported manifest version");

  const int w = root.at("grid_width").get<int>();
  const int h = root.at("grid_height").get<int>();
  const std::filesystem::path grids =
      std::filesystem::path(manifest_path).parent_path() /
      root.at("grids_file").get<std::string>();
  std::ifstream grid_stream(grids, std::ios::binary);
  if (!grid_stream) throw IoError("load_catalog_set: cannot open " + grids.string());

  CatalogSet set;
  set.shared = root.value("shared", false);
  for (const auto& su : root.at("sus")) {
    FeatureCatalog catalog;
    catalog.binarize_level = su.at("binarize_level").get<double>();
    catalog.threshold_textual = su.at("threshold_textual").get<double>();
    catalog.threshold_visual = su.at("threshold_visual").get<double>();
    catalog.header_bits = su.at("header_bits").get<double>();
    for (const auto& t : su.at("textual")) {
      TextualFeature feature;
      feature.id = t.at("id").get<std::string>();
      feature.encoded_bits = t.at("bits").get<std::int64_t>();
      feature.heatmap.width = w;
      feature.heatmap.height = h;
      feature.heatmap.values.resize(static_cast<std::size_t>(w) * h);
      grid_stream.read(reinterpret_cast<char*>(feature.heatmap.values.data()),
                       static_cast<std::streamsize>(feature.heatmap.values.size() * sizeof(float)));
      catalog.textual.push_back(std::move(feature));
    }
    for (const auto& v : su.at("visual")) {
      VisualFeature feature;
      feature.id = v.at("id").get<std::string>();
      feature.encoded_bits = v.at("bits").get<std::int64_t>();
      feature.mask.width = w;
      feature.mask.height = h;
      feature.mask.values.resize(static_cast<std::size_t>(w) * h);
      grid_stream.read(reinterpret_cast<char*>(feature.mask.values.data()),
                       static_cast<std::streamsize>(feature.mask.values.size()));
      catalog.visual.push_back(std::move(feature));
    }
    if (!grid_stream)
      throw IoError("load_catalog_set: grid file truncated");
    catalog.validate();
    set.per_su.push_back(std::move(catalog));
  }
  return set;
}

}  // namespace semnoma
