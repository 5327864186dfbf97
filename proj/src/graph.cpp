#include "sentinet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include "sentinet/errors.hpp"
#include "sentinet/rng.hpp"

namespace sentinet {

std::vector<std::vector<int>> Graph::adjacency() const {
  std::vector<std::vector<int>> adj(node_count);
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(node_count, 0);
  for (auto [i, j] : edges) {
    deg[i]++;
    deg[j]++;
  }
  return deg;
}

Graph make_graph(int node_count, std::vector<std::pair<int, int>> edges) {
  if (node_count < 0) throw ConfigError("graph: negative node count");
  for (auto& [i, j] : edges) {
    if (i == j) throw ConfigError("graph: self-loop at node " + std::to_string(i));
    if (i < 0 || j < 0 || i >= node_count || j >= node_count)
      throw ConfigError("graph: edge endpoint out of range");
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  Graph g;
  g.node_count = node_count;
  g.edges = std::move(edges);
  return g;
}

std::vector<std::pair<int, int>> geometric_edges(
    const std::vector<std::array<double, 2>>& positions, double radius) {
  std::vector<std::pair<int, int>> edges;
  const int n = static_cast<int>(positions.size());
  const double r2 = radius * radius;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dx = positions[i][0] - positions[j][0];
      double dy = positions[i][1] - positions[j][1];
      if (dx * dx + dy * dy <= r2) edges.emplace_back(i, j);
    }
  }
  return edges;
}

Graph random_geometric_graph(int n, double side, double radius, uint64_t seed) {
  if (n < 1) throw ConfigError("graph: need at least one node");
  if (side <= 0 || radius < 0) throw ConfigError("graph: side/radius must be positive");
  Graph g;
  g.node_count = n;
  g.positions.resize(n);
  for (int i = 0; i < n; ++i) {
    // One counter cell per node: placement is independent of draw order.
    rng::CounterRng r(seed, rng::Stream::positions, static_cast<uint32_t>(i));
    g.positions[i] = {side * r.uniform(), side * r.uniform()};
  }
  g.edges = geometric_edges(g.positions, radius);
  return g;
}

bool is_connected(const Graph& g) {
  std::vector<char> keep(g.node_count, 1);
  return is_connected_subset(g, keep);
}

bool is_connected_subset(const Graph& g, const std::vector<char>& keep) {
  if (static_cast<int>(keep.size()) != g.node_count)
    throw std::invalid_argument("is_connected_subset: mask size mismatch");
  int start = -1, total = 0;
  for (int i = 0; i < g.node_count; ++i) {
    if (keep[i]) {
      if (start < 0) start = i;
      total++;
    }
  }
  if (total <= 1) return true;
  auto adj = g.adjacency();
  std::vector<char> seen(g.node_count, 0);
  std::queue<int> q;
  q.push(start);
  seen[start] = 1;
  int reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (keep[v] && !seen[v]) {
        seen[v] = 1;
        reached++;
        q.push(v);
      }
    }
  }
  return reached == total;
}

Eigen::MatrixXd laplacian(const Graph& g) {
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(g.node_count, g.node_count);
  for (auto [i, j] : g.edges) {
    lap(i, i) += 1;
    lap(j, j) += 1;
    lap(i, j) -= 1;
    lap(j, i) -= 1;
  }
  return lap;
}

bool is_globally_observable(const std::vector<Eigen::MatrixXd>& h_list,
                            const std::vector<int>& subset) {
  if (h_list.empty()) throw std::invalid_argument("is_globally_observable: no matrices");
  const auto m = h_list[0].cols();
  for (const auto& h : h_list)
    if (h.cols() != m)
      throw std::invalid_argument("is_globally_observable: column count mismatch");
  if (subset.empty()) return false;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  for (int n : subset) {
    if (n < 0 || n >= static_cast<int>(h_list.size()))
      throw std::invalid_argument("is_globally_observable: node index out of range");
    gram += h_list[n].transpose() * h_list[n];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  double top = ev(ev.size() - 1);
  if (top <= 0) return false;
  return ev(0) > 1e-9 * top;
}

void write_edges_csv(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RunError("cannot write " + path.string());
  out << "i,j\n";
  for (auto [i, j] : g.edges) out << i << "," << j << "\n";
}

void write_positions_csv(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RunError("cannot write " + path.string());
  out << "node,x,y\n";
  char buf[96];
  for (int i = 0; i < g.node_count; ++i) {
    double x = g.has_positions() ? g.positions[i][0] : 0.0;
    double y = g.has_positions() ? g.positions[i][1] : 0.0;
    snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", i, x, y);
    out << buf;
  }
}

namespace {
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}
}  // namespace

Graph read_graph_csv(const std::filesystem::path& edges_path,
                     const std::optional<std::filesystem::path>& positions_path) {
  std::ifstream in(edges_path);
  if (!in) throw ConfigError("cannot read " + edges_path.string());
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"i", "j"})
    throw ConfigError(edges_path.string() + ": expected header \"i,j\"");
  std::vector<std::pair<int, int>> edges;
  int max_node = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 2) throw ConfigError(edges_path.string() + ": bad row: " + line);
    try {
      int i = std::stoi(cells[0]), j = std::stoi(cells[1]);
      edges.emplace_back(i, j);
      max_node = std::max({max_node, i, j});
    } catch (const std::exception&) {
      throw ConfigError(edges_path.string() + ": bad row: " + line);
    }
  }

  std::vector<std::array<double, 2>> positions;
  if (positions_path) {
    std::ifstream pin(*positions_path);
    if (!pin) throw ConfigError("cannot read " + positions_path->string());
    if (!std::getline(pin, line) ||
        split_csv_line(line) != std::vector<std::string>{"node", "x", "y"})
      throw ConfigError(positions_path->string() + ": expected header \"node,x,y\"");
    while (std::getline(pin, line)) {
      if (line.empty()) continue;
      auto cells = split_csv_line(line);
      if (cells.size() != 3)
        throw ConfigError(positions_path->string() + ": bad row: " + line);
      try {
        size_t node = std::stoul(cells[0]);
        if (node != positions.size())
          throw ConfigError(positions_path->string() + ": rows must list nodes 0,1,2,...");
        positions.push_back({std::stod(cells[1]), std::stod(cells[2])});
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception&) {
        throw ConfigError(positions_path->string() + ": bad row: " + line);
      }
    }
  }

  int n = positions.empty() ? max_node + 1 : static_cast<int>(positions.size());
  Graph g = make_graph(std::max(n, 0), std::move(edges));
  g.positions = std::move(positions);
  return g;
}

}  // namespace sentinet
