#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "swarmsgd/rng.hpp"
#include "swarmsgd/types.hpp"

namespace swarmsgd {

using Edge = std::pair<int, int>;

/// Undirected, unweighted interaction graph over N threads.
///
/// Immutable after construction. The factories below only ever produce
/// connected graphs; `Graph::from_edges` can build disconnected ones so they
/// can be inspected, unless `require_connected` is set.
class Graph {
 public:
  static Graph from_edges(int n, std::span<const Edge> edges, bool require_connected = true);

  int size() const noexcept { return n_; }
  bool adjacent(int i, int j) const { return adjacency_[static_cast<std::size_t>(i) * n_ + j] != 0; }
  int degree(int i) const { return static_cast<int>(neighbors_[i].size()); }
  const std::vector<int>& degrees() const noexcept { return degrees_; }
  std::span<const int> neighbors(int i) const { return neighbors_[i]; }

  /// Edges with i < j, lexicographically ordered.
  std::vector<Edge> edges() const;
  std::size_t edge_count() const noexcept { return edge_count_; }

  /// Dense 0/1 adjacency matrix.
  Matrix adjacency() const;

 private:
  Graph() = default;

  int n_ = 0;
  std::vector<std::uint8_t> adjacency_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<int> degrees_;
  std::size_t edge_count_ = 0;
};

Graph complete_graph(int n);
Graph path_graph(int n);
Graph star_graph(int n);

struct ErdosRenyiDraw {
  Graph graph;
  int attempts;
};

inline constexpr int kDefaultErdosRenyiAttempts = 10000;

/// G(n, p) conditioned on connectivity: whole-graph resampling until connected.
/// Throws ConnectivityError after `max_attempts` disconnected draws.
ErdosRenyiDraw erdos_renyi_connected(int n, double p, Rng& rng,
                                     int max_attempts = kDefaultErdosRenyiAttempts);

Matrix laplacian(const Graph& g);

/// All Laplacian eigenvalues in ascending order.
Vector laplacian_spectrum(const Graph& g);

inline constexpr double kLambda2Tolerance = 1e-10;

/// Second-smallest Laplacian eigenvalue. Throws DisconnectedGraph (carrying
/// the computed value) when it does not exceed kLambda2Tolerance.
double algebraic_connectivity(const Graph& g);

int max_degree(const Graph& g);

bool is_connected(const Graph& g);

}  // namespace swarmsgd
