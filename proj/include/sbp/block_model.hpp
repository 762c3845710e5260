#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <concepts>
#include <cstddef>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sbp/errors.hpp"
#include "sbp/graph.hpp"
#include "sbp/partition.hpp"

namespace sbp {

// B x B matrix of nonnegative edge counts. Dense row-major storage for
// small B, otherwise sorted sparse rows plus a mirrored set of sparse
// columns so that both row r and column r iterate in O(nnz). Iteration is
// always in ascending index order in either mode.
class BlockMatrix {
 public:
  static constexpr std::size_t kDenseLimit = 64;

  struct Triplet {
    Block row;
    Block col;
    Count count;
  };

  explicit BlockMatrix(std::size_t num_blocks = 0)
      : num_blocks_(num_blocks), dense_mode_(num_blocks <= kDenseLimit) {
    if (dense_mode_) {
      dense_.assign(num_blocks * num_blocks, 0);
    } else {
      rows_.resize(num_blocks);
      cols_.resize(num_blocks);
    }
  }

  // Duplicate (row, col) triplets are summed.
  static BlockMatrix from_triplets(std::size_t num_blocks, std::vector<Triplet> triplets);

  std::size_t num_blocks() const noexcept { return num_blocks_; }
  bool is_dense() const noexcept { return dense_mode_; }

  Count at(Block r, Block c) const {
    if (dense_mode_) return dense_[r * num_blocks_ + c];
    const auto& line = rows_[r];
    auto it = std::lower_bound(line.begin(), line.end(), c,
                               [](const Entry& e, Block key) { return e.first < key; });
    return (it != line.end() && it->first == c) ? it->second : 0;
  }

  void add(Block r, Block c, Count delta) {
    if (delta == 0) return;
    if (dense_mode_) {
      Count& cell = dense_[r * num_blocks_ + c];
      cell += delta;
      assert(cell >= 0);
      return;
    }
    add_to_line(rows_[r], c, delta);
    add_to_line(cols_[c], r, delta);
  }

  // f(col, count) for every nonzero entry of row r, ascending col.
  template <class F>
  void for_each_in_row(Block r, F&& f) const {
    if (dense_mode_) {
      const Count* row = dense_.data() + r * num_blocks_;
      for (std::size_t c = 0; c < num_blocks_; ++c) {
        if (row[c] != 0) f(c, row[c]);
      }
      return;
    }
    for (const auto& [c, v] : rows_[r]) f(c, v);
  }

  // f(row, count) for every nonzero entry of column c, ascending row.
  template <class F>
  void for_each_in_col(Block c, F&& f) const {
    if (dense_mode_) {
      for (std::size_t r = 0; r < num_blocks_; ++r) {
        const Count v = dense_[r * num_blocks_ + c];
        if (v != 0) f(r, v);
      }
      return;
    }
    for (const auto& [r, v] : cols_[c]) f(r, v);
  }

  // f(row, col, count) for every nonzero entry, row-major.
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t r = 0; r < num_blocks_; ++r) {
      for_each_in_row(r, [&](Block c, Count v) { f(r, c, v); });
    }
  }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for_each([&](Block, Block, Count) { ++n; });
    return n;
  }

  Count total() const {
    Count sum = 0;
    for_each([&](Block, Block, Count v) { sum += v; });
    return sum;
  }

  friend bool operator==(const BlockMatrix& a, const BlockMatrix& b) {
    if (a.num_blocks_ != b.num_blocks_) return false;
    std::vector<Triplet> ta, tb;
    a.for_each([&](Block r, Block c, Count v) { ta.push_back({r, c, v}); });
    b.for_each([&](Block r, Block c, Count v) { tb.push_back({r, c, v}); });
    return std::equal(ta.begin(), ta.end(), tb.begin(), tb.end(), [](const Triplet& x, const Triplet& y) {
      return x.row == y.row && x.col == y.col && x.count == y.count;
    });
  }

 private:
  using Entry = std::pair<Block, Count>;
  using Line = std::vector<Entry>;

  static void add_to_line(Line& line, Block key, Count delta) {
    auto it = std::lower_bound(line.begin(), line.end(), key,
                               [](const Entry& e, Block k) { return e.first < k; });
    if (it != line.end() && it->first == key) {
      it->second += delta;
      assert(it->second >= 0);
      if (it->second == 0) line.erase(it);
    } else {
      assert(delta > 0);
      line.insert(it, {key, delta});
    }
  }

  std::size_t num_blocks_ = 0;
  bool dense_mode_ = true;
  std::vector<Count> dense_;
  std::vector<Line> rows_;
  std::vector<Line> cols_;
};

inline BlockMatrix BlockMatrix::from_triplets(std::size_t num_blocks, std::vector<Triplet> triplets) {
  BlockMatrix m(num_blocks);
  if (m.dense_mode_) {
    for (const auto& t : triplets) m.dense_[t.row * num_blocks + t.col] += t.count;
    return m;
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  for (std::size_t k = 0; k < triplets.size();) {
    const Block r = triplets[k].row;
    const Block c = triplets[k].col;
    Count sum = 0;
    while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) sum += triplets[k++].count;
    if (sum == 0) continue;
    m.rows_[r].push_back({c, sum});
    m.cols_[c].push_back({r, sum});  // rows visited in ascending order, so columns stay sorted
  }
  return m;
}

// Per-node edge weight towards each block, under the node's current
// partition. `out[t]` is the weight of edges i -> (block t), `in[t]` the
// weight of edges (block t) -> i, `combined` their sum. A self-loop of
// weight w is attributed to the node's own block in both directions.
struct NodeBlockEdgeCounts {
  using BlockWeights = std::vector<std::pair<Block, Count>>;  // ascending block

  Block own_block = 0;
  BlockWeights out;
  BlockWeights in;
  BlockWeights combined;
  Count self_loop = 0;
  Count out_total = 0;
  Count in_total = 0;

  Count total() const noexcept { return out_total + in_total; }

  static Count lookup(const BlockWeights& w, Block t) {
    auto it = std::lower_bound(w.begin(), w.end(), t,
                               [](const auto& e, Block k) { return e.first < k; });
    return (it != w.end() && it->first == t) ? it->second : 0;
  }
};

namespace detail {

inline void sort_and_merge(NodeBlockEdgeCounts::BlockWeights& w) {
  std::sort(w.begin(), w.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (out > 0 && w[out - 1].first == w[k].first) {
      w[out - 1].second += w[k].second;
    } else {
      w[out++] = w[k];
    }
  }
  w.resize(out);
}

inline NodeBlockEdgeCounts::BlockWeights merge_weights(const NodeBlockEdgeCounts::BlockWeights& a,
                                                       const NodeBlockEdgeCounts::BlockWeights& b) {
  NodeBlockEdgeCounts::BlockWeights result;
  result.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      result.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      result.push_back(b[j++]);
    } else {
      result.push_back({a[i].first, a[i].second + b[j].second});
      ++i;
      ++j;
    }
  }
  return result;
}

}  // namespace detail

inline NodeBlockEdgeCounts node_block_edge_counts(const Graph& graph, std::span<const Block> assignment,
                                                  std::size_t i) {
  if (i >= graph.num_nodes()) detail::fail("node id " + std::to_string(i) + " out of range");
  NodeBlockEdgeCounts counts;
  counts.own_block = assignment[i];
  counts.self_loop = graph.self_loop_weight(i);
  const auto out_list = graph.out_neighbors(i);
  const auto in_list = graph.in_neighbors(i);
  counts.out.reserve(out_list.size());
  counts.in.reserve(in_list.size());
  for (const auto& nb : out_list) counts.out.push_back({assignment[nb.node], nb.weight});
  for (const auto& nb : in_list) counts.in.push_back({assignment[nb.node], nb.weight});
  detail::sort_and_merge(counts.out);
  detail::sort_and_merge(counts.in);
  counts.combined = detail::merge_weights(counts.out, counts.in);
  counts.out_total = graph.out_degree(i);
  counts.in_total = graph.in_degree(i);
  return counts;
}

inline NodeBlockEdgeCounts node_block_edge_counts(const Graph& graph, const Partition& partition,
                                                  std::size_t i) {
  return node_block_edge_counts(graph, std::span<const Block>(partition.assignment), i);
}

// Change of M and of the block degrees caused by moving a unit (a node, or a
// whole block for merges) from block `from` to block `to`.
struct MoveDelta {
  struct Cell {
    Block row;
    Block col;
    Count delta;
  };

  Block from = 0;
  Block to = 0;
  std::vector<Cell> cells;  // sorted by (row, col), nonzero deltas only
  Count out_weight = 0;     // moved from d_out[from] to d_out[to]
  Count in_weight = 0;      // moved from d_in[from] to d_in[to]

  Count cell_delta(Block r, Block c) const {
    auto it = std::lower_bound(cells.begin(), cells.end(), std::pair{r, c}, [](const Cell& x, const auto& key) {
      return std::tie(x.row, x.col) < std::tie(key.first, key.second);
    });
    return (it != cells.end() && it->row == r && it->col == c) ? it->delta : 0;
  }
};

inline MoveDelta compute_move_delta(const NodeBlockEdgeCounts& counts, Block from, Block to) {
  MoveDelta d;
  d.from = from;
  d.to = to;
  d.out_weight = counts.out_total;
  d.in_weight = counts.in_total;
  if (from == to) return d;
  using Cell = MoveDelta::Cell;
  auto less = [](const Cell& a, const Cell& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); };
  const Block lo = std::min(from, to);
  const Block hi = std::max(from, to);
  const auto sign = [&](Block b, Count moved) { return b == from ? -moved : moved; };

  // Rows lo and hi (out-edges), columns lo and hi (in-edges) and the
  // self-loop cells are each produced in (row, col) order and merged.
  std::vector<Cell> rows, cols;
  rows.reserve(2 * counts.out.size());
  cols.reserve(2 * counts.in.size() + 2);
  for (Block b : {lo, hi}) {
    for (const auto& [t, w] : counts.out) {
      const Count moved = w - (t == from ? counts.self_loop : 0);
      if (moved != 0) rows.push_back({b, t, sign(b, moved)});
    }
  }
  for (const auto& [t, w] : counts.in) {
    const Count moved = w - (t == from ? counts.self_loop : 0);
    if (moved == 0) continue;
    cols.push_back({t, lo, sign(lo, moved)});
    cols.push_back({t, hi, sign(hi, moved)});
  }
  if (counts.self_loop != 0) {
    const std::array<Cell, 2> self{Cell{lo, lo, sign(lo, counts.self_loop)}, Cell{hi, hi, sign(hi, counts.self_loop)}};
    const auto at = std::upper_bound(cols.begin(), cols.end(), self[0], less);
    const auto offset = at - cols.begin();
    cols.insert(at, self[0]);
    cols.insert(std::upper_bound(cols.begin() + offset + 1, cols.end(), self[1], less), self[1]);
  }
  auto& cells = d.cells;
  cells.resize(rows.size() + cols.size());
  std::merge(rows.begin(), rows.end(), cols.begin(), cols.end(), cells.begin(), less);
  std::size_t out = 0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (out > 0 && cells[out - 1].row == cells[k].row && cells[out - 1].col == cells[k].col) {
      cells[out - 1].delta += cells[k].delta;
    } else {
      cells[out++] = cells[k];
    }
  }
  cells.resize(out);
  std::erase_if(cells, [](const MoveDelta::Cell& c) { return c.delta == 0; });
  return d;
}

// Sufficient statistics of a partition: M plus block out/in degrees.
class BlockModelState {
 public:
  BlockModelState() = default;
  BlockModelState(BlockMatrix m, std::vector<Count> d_out, std::vector<Count> d_in)
      : matrix_(std::move(m)), d_out_(std::move(d_out)), d_in_(std::move(d_in)) {}

  std::size_t num_blocks() const noexcept { return matrix_.num_blocks(); }
  const BlockMatrix& interblock_counts() const noexcept { return matrix_; }
  Count count(Block r, Block c) const { return matrix_.at(r, c); }
  Count out_degree(Block t) const { return d_out_[t]; }
  Count in_degree(Block t) const { return d_in_[t]; }
  Count degree(Block t) const { return d_out_[t] + d_in_[t]; }
  const std::vector<Count>& out_degrees() const noexcept { return d_out_; }
  const std::vector<Count>& in_degrees() const noexcept { return d_in_; }

  void apply(const MoveDelta& delta) {
    for (const auto& c : delta.cells) matrix_.add(c.row, c.col, c.delta);
    d_out_[delta.from] -= delta.out_weight;
    d_out_[delta.to] += delta.out_weight;
    d_in_[delta.from] -= delta.in_weight;
    d_in_[delta.to] += delta.in_weight;
  }

  friend bool operator==(const BlockModelState&, const BlockModelState&) = default;

 private:
  BlockMatrix matrix_;
  std::vector<Count> d_out_;
  std::vector<Count> d_in_;
};

// Read-only view of counts and degrees; BlockModelState and ProposedState
// both model it, so proposal and acceptance formulas can be written once.
template <class V>
concept BlockCountView = requires(const V& v, Block a, Block b) {
  { v.count(a, b) } -> std::convertible_to<Count>;
  { v.out_degree(a) } -> std::convertible_to<Count>;
  { v.in_degree(a) } -> std::convertible_to<Count>;
  { v.degree(a) } -> std::convertible_to<Count>;
  { v.num_blocks() } -> std::convertible_to<std::size_t>;
};

// The state a pending move would produce, without materializing it.
class ProposedState {
 public:
  ProposedState(const BlockModelState& base, const MoveDelta& delta) : base_(base), delta_(delta) {}

  std::size_t num_blocks() const { return base_.num_blocks(); }
  Count count(Block r, Block c) const { return base_.count(r, c) + delta_.cell_delta(r, c); }
  Count out_degree(Block t) const {
    return base_.out_degree(t) + (t == delta_.to ? delta_.out_weight : 0) -
           (t == delta_.from ? delta_.out_weight : 0);
  }
  Count in_degree(Block t) const {
    return base_.in_degree(t) + (t == delta_.to ? delta_.in_weight : 0) -
           (t == delta_.from ? delta_.in_weight : 0);
  }
  Count degree(Block t) const { return out_degree(t) + in_degree(t); }

 private:
  const BlockModelState& base_;
  const MoveDelta& delta_;
};

// M = Gamma^T A Gamma plus degree vectors, from scratch.
inline BlockModelState recompute_block_matrix(const Graph& graph, const Partition& partition) {
  validate_partition(partition, graph.num_nodes());
  const std::size_t B = partition.num_blocks;
  std::vector<BlockMatrix::Triplet> triplets;
  triplets.reserve(graph.num_edge_records());
  std::vector<Count> d_out(B, 0), d_in(B, 0);
  for (std::size_t i = 0; i < graph.num_nodes(); ++i) {
    const Block r = partition[i];
    for (const auto& nb : graph.out_neighbors(i)) {
      const Block s = partition[nb.node];
      triplets.push_back({r, s, nb.weight});
      d_out[r] += nb.weight;
      d_in[s] += nb.weight;
    }
  }
  return {BlockMatrix::from_triplets(B, std::move(triplets)), std::move(d_out), std::move(d_in)};
}

// Value-returning move of node i from r to s; equals recompute_block_matrix
// on the post-move partition.
inline BlockModelState apply_move(const BlockModelState& state, std::size_t i, Block r, Block s,
                                  const NodeBlockEdgeCounts& counts) {
  if (r == s) {
    detail::fail("apply_move: source and target block are both " + std::to_string(r) + " for node " +
                 std::to_string(i));
  }
  detail::require(counts.own_block == r, "apply_move: counts were not computed for block r");
  detail::require(r < state.num_blocks() && s < state.num_blocks(), "apply_move: block out of range");
  BlockModelState next = state;
  next.apply(compute_move_delta(counts, r, s));
  return next;
}

}  // namespace sbp
