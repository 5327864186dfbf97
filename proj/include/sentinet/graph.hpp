#pragma once
// Undirected communication topologies: random geometric placement, adjacency
// queries, Laplacians, connectivity, and the rank test telling whether a set
// of sensors jointly sees the whole parameter vector.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace sentinet {

struct Graph {
  int node_count = 0;
  // Unordered pairs stored once as (i, j) with i < j, sorted lexicographically.
  std::vector<std::pair<int, int>> edges;
  // Planar coordinates; empty unless the graph came from a geometric model.
  std::vector<std::array<double, 2>> positions;

  std::vector<std::vector<int>> adjacency() const;  // sorted neighbor lists
  std::vector<int> degrees() const;
  bool has_positions() const { return !positions.empty(); }
};

// Validates and normalizes an edge set (rejects self-loops and out-of-range
// indices, dedups, orients i < j, sorts).
Graph make_graph(int node_count, std::vector<std::pair<int, int>> edges);

// Edges between every pair at Euclidean distance <= radius (inclusive).
std::vector<std::pair<int, int>> geometric_edges(
    const std::vector<std::array<double, 2>>& positions, double radius);

// n nodes placed uniformly on [0, side]^2; connectivity is NOT guaranteed,
// callers that need it retry with fresh seeds. Deterministic in (n, seed).
Graph random_geometric_graph(int n, double side, double radius, uint64_t seed);

bool is_connected(const Graph& g);
// Connectivity of the subgraph induced by {n : keep[n]}. Empty and singleton
// subsets count as connected.
bool is_connected_subset(const Graph& g, const std::vector<char>& keep);

// Dense combinatorial Laplacian L = D - A.
Eigen::MatrixXd laplacian(const Graph& g);

// True when sum over the subset of H_n^T H_n has full rank, i.e. the chosen
// sensors jointly determine the whole parameter vector.
bool is_globally_observable(const std::vector<Eigen::MatrixXd>& h_list,
                            const std::vector<int>& subset);

// Plain-CSV persistence. Edges: header "i,j". Positions: header "node,x,y".
void write_edges_csv(const Graph& g, const std::filesystem::path& path);
void write_positions_csv(const Graph& g, const std::filesystem::path& path);
// Node count comes from the positions file when given, else max index + 1.
Graph read_graph_csv(const std::filesystem::path& edges_path,
                     const std::optional<std::filesystem::path>& positions_path);

}  // namespace sentinet
