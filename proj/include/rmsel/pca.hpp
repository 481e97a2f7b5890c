#pragma once

#include <string>
#include <vector>

#include "rmsel/ingest.hpp"

namespace rmsel::pca {

struct PCAResult {
  std::vector<std::string> feature_names;
  std::size_t components = 0;     // = feature count
  std::vector<double> loadings;   // components x features, row-major
  std::vector<double> ratios;     // descending, sums to 1
  std::vector<double> mean;       // per feature
  std::vector<double> scale;      // per feature (1.0 when not standardized)
  bool standardized = true;

  double loading(std::size_t component, std::size_t feature) const {
    return loadings[component * feature_names.size() + feature];
  }
};

// Center (and optionally scale to unit sample stddev), then one-sided
// Jacobi SVD. Ratios are normalized squared singular values; each
// component row is sign-normalized so its largest-magnitude weight is
// positive.
PCAResult pca_fit(const std::vector<std::vector<double>>& rows,
                  const std::vector<std::string>& feature_names,
                  bool standardize = true);

PCAResult pca_fit(const ingest::ScoreMatrix& matrix, bool standardize = true);

// Sum of the first k explained-variance ratios.
double explained_topk(const PCAResult& result, std::size_t k);

struct ComponentLoadings {
  std::string component;  // "PC1", ...
  double ratio = 0.0;
  std::vector<std::pair<std::string, double>> weights;
};

std::vector<ComponentLoadings> loadings_report(const PCAResult& result);

std::string ratios_to_csv(const PCAResult& result,
                          const std::vector<std::string>& meta_lines = {});
std::string loadings_to_csv(const PCAResult& result,
                            const std::vector<std::string>& meta_lines = {});
std::string scree_to_json(const PCAResult& result);

}  // namespace rmsel::pca
