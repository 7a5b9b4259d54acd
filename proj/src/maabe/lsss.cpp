#include "martsia/maabe/lsss.hpp"

#include <algorithm>

namespace martsia::maabe {

using group::Fr;

std::optional<std::map<std::size_t, Fr>> lsss_reconstruct(
    const policy::AccessStructure& structure, const std::vector<std::size_t>& owned_rows) {
  std::vector<std::size_t> rows = owned_rows;
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  const std::size_t width = structure.width();
  if (rows.empty() || width == 0) return std::nullopt;
  for (std::size_t r : rows) {
    if (r >= structure.rows()) return std::nullopt;
  }

  // Solve M_S^T c = e1: one equation per column, one unknown per owned row.
  const std::size_t n = rows.size();
  std::vector<std::vector<Fr>> a(width, std::vector<Fr>(n + 1, Fr::zero()));
  for (std::size_t col = 0; col < width; ++col) {
    for (std::size_t k = 0; k < n; ++k) a[col][k] = structure.matrix[rows[k]][col];
    a[col][n] = col == 0 ? Fr::one() : Fr::zero();
  }

  std::vector<std::size_t> pivot_col_of_row;
  std::size_t rank = 0;
  for (std::size_t var = 0; var < n && rank < width; ++var) {
    std::size_t pivot = rank;
    while (pivot < width && a[pivot][var].is_zero()) ++pivot;
    if (pivot == width) continue;
    std::swap(a[pivot], a[rank]);
    const Fr inv = a[rank][var].inverse();
    for (std::size_t j = var; j <= n; ++j) a[rank][j] *= inv;
    for (std::size_t i = 0; i < width; ++i) {
      if (i == rank || a[i][var].is_zero()) continue;
      const Fr f = a[i][var];
      for (std::size_t j = var; j <= n; ++j) a[i][j] -= f * a[rank][j];
    }
    pivot_col_of_row.push_back(var);
    ++rank;
  }
  for (std::size_t i = rank; i < width; ++i) {
    if (!a[i][n].is_zero()) return std::nullopt;
  }

  // Free variables are zero; rows with a zero coefficient are dropped.
  std::map<std::size_t, Fr> out;
  for (std::size_t i = 0; i < rank; ++i) {
    if (!a[i][n].is_zero()) out.emplace(rows[pivot_col_of_row[i]], a[i][n]);
  }
  return out;
}

}  // namespace martsia::maabe
