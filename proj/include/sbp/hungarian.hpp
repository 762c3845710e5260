#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace sbp {

// Maximum-weight assignment on a rectangular weight matrix (rows x cols),
// solved as a minimum-cost problem on the zero-padded square matrix with the
// O(n^3) potentials form of the Hungarian method. Returns, for each row, the
// matched column or -1 when the row was matched to padding.
template <class T>
std::vector<long> max_weight_assignment(const std::vector<std::vector<T>>& weight) {
  const std::size_t rows = weight.size();
  const std::size_t cols = rows == 0 ? 0 : weight[0].size();
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return {};
  T top{};
  for (const auto& row : weight) {
    for (const T& w : row) top = std::max(top, w);
  }
  auto cost = [&](std::size_t i, std::size_t j) -> T {
    const T w = (i < rows && j < cols) ? weight[i][j] : T{};
    return top - w;
  };

  const T inf = std::numeric_limits<T>::max() / 4;
  // 1-based arrays; index 0 is the virtual column used by the augmentation
  std::vector<T> u(n + 1, T{}), v(n + 1, T{});
  std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match_col[0] = i;
    std::size_t j0 = 0;
    std::vector<T> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = match_col[j0];
      T delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const T cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<long> row_to_col(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = match_col[j];
    if (i >= 1 && i - 1 < rows && j - 1 < cols) row_to_col[i - 1] = static_cast<long>(j - 1);
  }
  return row_to_col;
}

}  // namespace sbp
