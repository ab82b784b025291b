#pragma once

#include "igatc/spaces.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace igatc {

enum class Region : std::uint8_t { dirichlet, interface, neumann, interior };
std::string region_name(Region r);

/// Which region wins for entities on several boundary parts, and the order in which trees grow.
enum class TreeRule {
  dirichlet_first,  // Dirichlet, interface, Neumann, interior (spanning_tree)
  interface_first,  // interface, Dirichlet, Neumann, interior (dependent_tree)
};

/// Vertices and edges of one subdomain of the identified control mesh.
struct ControlGraph {
  int subdomain = 0;
  TreeRule rule = TreeRule::dirichlet_first;
  std::vector<int> vertices;             // global vertex ids, ascending
  std::vector<int> local_vertex;         // global vertex -> graph vertex or -1
  std::vector<int> edges;                // global edge ids, ascending
  std::vector<std::array<int, 2>> ends;  // graph vertices (tail, head)
  std::vector<Region> edge_region;
  std::vector<Region> vertex_region;
  std::vector<int> dof;                  // free dof per edge, -1 when constrained
  /// (neighbor, edge) pairs per vertex, sorted by neighbor then edge
  std::vector<std::vector<std::array<int, 2>>> adjacency;
  bool descending = false;  // tree growth visits vertices and edges from the highest index

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
};

/// `free_edges` numbers the unconstrained edges of the subdomain.
ControlGraph build_graph(const ControlMesh& mesh, const DofMap& free_edges, int subdomain, TreeRule rule);

enum class Phase : std::int8_t { none = 0, dirichlet, interface, neumann, interior, connect, enrichment };
std::string phase_name(Phase p);

struct GaugePartition {
  std::vector<int> tree;        // free dofs set to zero
  std::vector<int> cotree;      // remaining free dofs
  std::vector<int> enrichment;  // dofs moved to the tree by the cohomology check
  std::vector<char> in_tree;    // per graph edge
  std::vector<Phase> phase;     // per graph edge: phase that added it to the tree
  std::array<int, 7> phase_count{};
  int removed_interface = 0;    // interface tree edges returned to the cotree
  int components = 0;           // trees before connecting
  int tree_edges() const;
};

/// Dirichlet-first spanning tree (interface edges of an independent subdomain count as Neumann).
GaugePartition spanning_tree(const ControlGraph& graph);
/// Tree of the dependent subdomain: interface first, then all interface edges returned to the cotree.
GaugePartition dependent_tree(const ControlGraph& graph);

/// Moves cotree edges to the tree until the curl restricted to the cotree (without interface edges for the
/// dependent rule) has full column rank. `curl` maps free dofs of the subdomain to faces.
GaugePartition enrich_cohomology(const ControlGraph& graph, GaugePartition partition, const SparseMatrix& curl);

/// Cotree block of a system indexed by free dofs, and the map from cotree values to free dof values.
struct ReducedSystem {
  SparseMatrix K;
  Eigen::VectorXd rhs;
  SparseMatrix expander;
};
ReducedSystem gauge_reduce(const SparseMatrix& K, const Eigen::VectorXd& rhs, const GaugePartition& partition);
SparseMatrix cotree_expander(int ndofs, const GaugePartition& partition);

/// Visits vertices, edges and neighbors in descending order, which grows a different valid tree.
void reverse_visit_order(ControlGraph& graph);

/// Tree, cotree and enrichment for one subdomain, with the rule picked from the subdomain's role.
GaugePartition gauge_subdomain(const ControlMesh& mesh, const DofMap& free_edges, int subdomain, bool dependent,
                               bool reversed = false, ControlGraph* graph_out = nullptr);

/// True when the tree edges contain no cycle.
bool tree_is_acyclic(const ControlGraph& graph, const GaugePartition& partition);

/// CSV rows: subdomain, patch, direction, i, j, k, region, phase, set. `header` writes the column names first.
void write_tree_csv(std::ostream& os, const ControlMesh& mesh, const ControlGraph& graph, const GaugePartition& partition,
                    bool header = true);

}  // namespace igatc
