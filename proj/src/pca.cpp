#include "rmsel/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "rmsel/csv.hpp"
#include "rmsel/errors.hpp"
#include "rmsel/kernels.hpp"

namespace rmsel::pca {

namespace {

// One-sided Jacobi: orthogonalize column pairs of A until every pair is
// numerically orthogonal; right rotations accumulate into V.
void jacobi_svd(std::vector<std::vector<double>>& a_cols,
                std::vector<std::vector<double>>& v_cols, std::size_t n) {
  const std::size_t p = a_cols.size();
  constexpr double tol = 1e-12;
  constexpr int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        const double aa = kernels::dot(a_cols[i].data(), a_cols[i].data(), n);
        const double bb = kernels::dot(a_cols[j].data(), a_cols[j].data(), n);
        const double ab = kernels::dot(a_cols[i].data(), a_cols[j].data(), n);
        if (ab == 0.0 || std::abs(ab) <= tol * std::sqrt(aa * bb)) continue;
        rotated = true;
        const double zeta = (bb - aa) / (2.0 * ab);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        kernels::rotate_pair(a_cols[i].data(), a_cols[j].data(), c, s, n);
        kernels::rotate_pair(v_cols[i].data(), v_cols[j].data(), c, s, p);
      }
    }
    if (!rotated) return;
  }
  throw NumericalError("Jacobi SVD did not converge");
}

}  // namespace

PCAResult pca_fit(const std::vector<std::vector<double>>& rows,
                  const std::vector<std::string>& feature_names,
                  bool standardize) {
  const std::size_t n = rows.size();
  const std::size_t p = feature_names.size();
  if (n < 2 || p < 1) {
    throw ValidationError(errc::out_of_range,
                          "need at least 2 rows and 1 column");
  }
  std::vector<std::vector<double>> cols(p, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != p) {
      throw ValidationError(errc::ragged_row, "row " + std::to_string(r));
    }
    for (std::size_t c = 0; c < p; ++c) cols[c][r] = rows[r][c];
  }

  PCAResult result;
  result.feature_names = feature_names;
  result.standardized = standardize;
  result.mean.resize(p);
  result.scale.assign(p, 1.0);
  for (std::size_t c = 0; c < p; ++c) {
    result.mean[c] =
        kernels::sum(cols[c].data(), n) / static_cast<double>(n);
    for (auto& v : cols[c]) v -= result.mean[c];
    if (standardize) {
      const double ss = kernels::dot(cols[c].data(), cols[c].data(), n);
      if (ss == 0.0) {
        throw ValidationError(errc::constant_input,
                              "column '" + feature_names[c] +
                                  "' is constant; disable standardization or "
                                  "drop it");
      }
      result.scale[c] = std::sqrt(ss / static_cast<double>(n - 1));
      for (auto& v : cols[c]) v /= result.scale[c];
    }
  }

  std::vector<std::vector<double>> v_cols(p, std::vector<double>(p, 0.0));
  for (std::size_t c = 0; c < p; ++c) v_cols[c][c] = 1.0;
  jacobi_svd(cols, v_cols, n);

  std::vector<double> variances(p);
  double total = 0.0;
  for (std::size_t c = 0; c < p; ++c) {
    variances[c] = kernels::dot(cols[c].data(), cols[c].data(), n);
    total += variances[c];
  }
  if (total == 0.0) {
    throw ValidationError(errc::degenerate_input,
                          "matrix has no variance after centering");
  }

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return variances[a] > variances[b];
  });

  result.components = p;
  result.ratios.resize(p);
  result.loadings.assign(p * p, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t src = order[k];
    result.ratios[k] = variances[src] / total;
    // Largest-magnitude weight positive.
    std::size_t arg_max = 0;
    for (std::size_t f = 1; f < p; ++f) {
      if (std::abs(v_cols[src][f]) > std::abs(v_cols[src][arg_max])) {
        arg_max = f;
      }
    }
    const double sign = v_cols[src][arg_max] < 0.0 ? -1.0 : 1.0;
    for (std::size_t f = 0; f < p; ++f) {
      result.loadings[k * p + f] = sign * v_cols[src][f];
    }
  }
  return result;
}

PCAResult pca_fit(const ingest::ScoreMatrix& matrix, bool standardize) {
  std::vector<std::vector<double>> rows(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    rows[r].resize(matrix.cols());
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      rows[r][c] = matrix.at(r, c);
    }
  }
  return pca_fit(rows, matrix.column_ids, standardize);
}

double explained_topk(const PCAResult& result, std::size_t k) {
  if (k < 1 || k > result.components) {
    throw ValidationError(errc::out_of_range,
                          "k = " + std::to_string(k) + " outside [1, " +
                              std::to_string(result.components) + "]");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += result.ratios[i];
  return total;
}

std::vector<ComponentLoadings> loadings_report(const PCAResult& result) {
  std::vector<ComponentLoadings> report;
  const std::size_t p = result.feature_names.size();
  for (std::size_t k = 0; k < result.components; ++k) {
    ComponentLoadings row;
    row.component = "PC" + std::to_string(k + 1);
    row.ratio = result.ratios[k];
    for (std::size_t f = 0; f < p; ++f) {
      row.weights.emplace_back(result.feature_names[f], result.loading(k, f));
    }
    report.push_back(std::move(row));
  }
  return report;
}

std::string ratios_to_csv(const PCAResult& result,
                          const std::vector<std::string>& meta_lines) {
  std::string out;
  for (const auto& line : meta_lines) out += "# " + line + "\n";
  out += "component,ratio,cumulative\n";
  double cumulative = 0.0;
  for (std::size_t k = 0; k < result.components; ++k) {
    cumulative += result.ratios[k];
    out += csv::to_line({"PC" + std::to_string(k + 1),
                         csv::format_double(result.ratios[k]),
                         csv::format_double(cumulative)}) +
           "\n";
  }
  return out;
}

std::string loadings_to_csv(const PCAResult& result,
                            const std::vector<std::string>& meta_lines) {
  std::string out;
  for (const auto& line : meta_lines) out += "# " + line + "\n";
  out += "component,feature,weight\n";
  for (std::size_t k = 0; k < result.components; ++k) {
    for (std::size_t f = 0; f < result.feature_names.size(); ++f) {
      out += csv::to_line({"PC" + std::to_string(k + 1),
                           result.feature_names[f],
                           csv::format_double(result.loading(k, f))}) +
             "\n";
    }
  }
  return out;
}

std::string scree_to_json(const PCAResult& result) {
  nlohmann::json doc;
  doc["schema"] = "rmsel.pca_scree.v1";
  doc["ratios"] = result.ratios;
  std::vector<double> cumulative(result.ratios.size());
  std::partial_sum(result.ratios.begin(), result.ratios.end(),
                   cumulative.begin());
  doc["cumulative"] = cumulative;
  return doc.dump(2);
}

}  // namespace rmsel::pca
