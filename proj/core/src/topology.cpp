#include "swarmsgd/topology.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <queue>
#include <string>

#include "swarmsgd/error.hpp"

namespace swarmsgd {

namespace {

void require_size(int n) {
  if (n < 2) throw InvalidArgument("graph needs at least 2 vertices, got " + std::to_string(n));
}

}  // namespace

Graph Graph::from_edges(int n, std::span<const Edge> edges, bool require_connected) {
  require_size(n);
  Graph g;
  g.n_ = n;
  g.adjacency_.assign(static_cast<std::size_t>(n) * n, 0);
  g.neighbors_.resize(n);
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw InvalidArgument("edge (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
    if (i == j) throw InvalidArgument("self-loop at vertex " + std::to_string(i));
    auto& a = g.adjacency_[static_cast<std::size_t>(i) * n + j];
    if (a) continue;
    a = 1;
    g.adjacency_[static_cast<std::size_t>(j) * n + i] = 1;
    ++g.edge_count_;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (g.adjacent(i, j)) g.neighbors_[i].push_back(j);
  g.degrees_.resize(n);
  for (int i = 0; i < n; ++i) g.degrees_[i] = static_cast<int>(g.neighbors_[i].size());
  if (require_connected && !is_connected(g)) throw DisconnectedGraph("graph is not connected", 0.0);
  return g;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (int i = 0; i < n_; ++i)
    for (int j : neighbors_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

Matrix Graph::adjacency() const {
  Matrix a = Matrix::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j : neighbors_[i]) a(i, j) = 1.0;
  return a;
}

Graph complete_graph(int n) {
  require_size(n);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph::from_edges(n, edges);
}

Graph path_graph(int n) {
  require_size(n);
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph::from_edges(n, edges);
}

Graph star_graph(int n) {
  require_size(n);
  std::vector<Edge> edges;
  for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
  return Graph::from_edges(n, edges);
}

ErdosRenyiDraw erdos_renyi_connected(int n, double p, Rng& rng, int max_attempts) {
  require_size(n);
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("edge probability must lie in (0, 1]");
  std::vector<Edge> edges;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    edges.clear();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform01() < p) edges.emplace_back(i, j);
    Graph g = Graph::from_edges(n, edges, false);
    if (is_connected(g)) return {std::move(g), attempt};
  }
  throw ConnectivityError("no connected G(" + std::to_string(n) + ", " + std::to_string(p) +
                          ") draw in " + std::to_string(max_attempts) + " attempts");
}

Matrix laplacian(const Graph& g) {
  Matrix l = -g.adjacency();
  for (int i = 0; i < g.size(); ++i) l(i, i) = g.degree(i);
  return l;
}

Vector laplacian_spectrum(const Graph& g) {
  // Householder tridiagonalization followed by implicit symmetric QR.
  Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian(g), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("Laplacian eigensolver did not converge");
  return solver.eigenvalues();
}

double algebraic_connectivity(const Graph& g) {
  const double lambda2 = laplacian_spectrum(g)(1);
  if (lambda2 <= kLambda2Tolerance) throw DisconnectedGraph("algebraic connectivity is zero", lambda2);
  return lambda2;
}

int max_degree(const Graph& g) {
  const auto& d = g.degrees();
  return *std::max_element(d.begin(), d.end());
}

bool is_connected(const Graph& g) {
  const int n = g.size();
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  seen[0] = 1;
  frontier.push(0);
  int reached = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : g.neighbors(v)) {
      if (seen[w]) continue;
      seen[w] = 1;
      ++reached;
      frontier.push(w);
    }
  }
  return reached == n;
}

}  // namespace swarmsgd
