#include "igatc/gauge.hpp"

#include "igatc/linalg.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <ostream>

namespace igatc {

std::string region_name(Region r) {
  switch (r) {
    case Region::dirichlet: return "dirichlet";
    case Region::interface: return "interface";
    case Region::neumann: return "neumann";
    default: return "interior";
  }
}

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::dirichlet: return "dirichlet";
    case Phase::interface: return "interface";
    case Phase::neumann: return "neumann";
    case Phase::interior: return "interior";
    case Phase::connect: return "connect";
    case Phase::enrichment: return "enrichment";
    default: return "none";
  }
}

namespace {

Region classify(std::uint8_t f, TreeRule rule) {
  const bool d = f & on_dirichlet;
  const bool i = f & on_interface_dependent;
  const bool n = f & (on_neumann | on_interface_independent);
  if (rule == TreeRule::interface_first) {
    if (i) return Region::interface;
    if (d) return Region::dirichlet;
  } else {
    if (d) return Region::dirichlet;
    if (i) return Region::interface;
  }
  if (n) return Region::neumann;
  return Region::interior;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

/// Breadth-first growth restricted to edges of one region.
class TreeGrower {
 public:
  TreeGrower(const ControlGraph& g, GaugePartition& part) : g_(g), part_(part), visited_(g.num_vertices(), 0) {
    part_.in_tree.assign(g.num_edges(), 0);
    part_.phase.assign(g.num_edges(), Phase::none);
  }

  bool any_visited() const { return std::find(visited_.begin(), visited_.end(), 1) != visited_.end(); }

  /// Grows from every visited vertex through `region` edges; new roots are started in untouched parts of the
  /// region when `roots` is set.
  void grow(Region region, Phase phase, bool roots) {
    std::deque<int> q;
    for (int v : order(g_.num_vertices()))
      if (visited_[v]) q.push_back(v);
    bfs(q, region, phase);
    if (!roots) return;
    for (int v : order(g_.num_vertices())) {
      if (visited_[v] || !touches(v, region)) continue;
      visited_[v] = 1;
      ++part_.components;
      q.push_back(v);
      bfs(q, region, phase);
    }
  }

  /// Remaining unvisited vertices start their own trees over all edges.
  void cover_rest() {
    for (int v : order(g_.num_vertices())) {
      if (visited_[v]) continue;
      visited_[v] = 1;
      ++part_.components;
      std::deque<int> q{v};
      while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (const auto& [w, e] : g_.adjacency[u])
          if (!visited_[w]) {
            visited_[w] = 1;
            add(e, Phase::interior);
            q.push_back(w);
          }
      }
    }
  }

  /// Joins separate trees through edges outside `excluded`.
  void connect(Region excluded) {
    UnionFind uf(g_.num_vertices());
    for (int e = 0; e < g_.num_edges(); ++e)
      if (part_.in_tree[e]) uf.unite(g_.ends[e][0], g_.ends[e][1]);
    for (int e : order(g_.num_edges())) {
      if (part_.in_tree[e] || g_.edge_region[e] == excluded) continue;
      if (uf.unite(g_.ends[e][0], g_.ends[e][1])) add(e, Phase::connect);
    }
  }

 private:
  std::vector<int> order(int n) const {
    std::vector<int> r(n);
    std::iota(r.begin(), r.end(), 0);
    if (g_.descending) std::reverse(r.begin(), r.end());
    return r;
  }

  bool touches(int v, Region region) const {
    for (const auto& [w, e] : g_.adjacency[v])
      if (g_.edge_region[e] == region) return true;
    return false;
  }

  void add(int e, Phase phase) {
    part_.in_tree[e] = 1;
    part_.phase[e] = phase;
    ++part_.phase_count[static_cast<int>(phase)];
  }

  void bfs(std::deque<int>& q, Region region, Phase phase) {
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (const auto& [w, e] : g_.adjacency[u]) {
        if (visited_[w] || g_.edge_region[e] != region) continue;
        visited_[w] = 1;
        add(e, phase);
        q.push_back(w);
      }
    }
  }

  const ControlGraph& g_;
  GaugePartition& part_;
  std::vector<char> visited_;
};

void finish_sets(const ControlGraph& g, GaugePartition& part) {
  part.tree.clear();
  part.cotree.clear();
  for (int e = 0; e < g.num_edges(); ++e) {
    if (g.dof[e] < 0) continue;
    (part.in_tree[e] ? part.tree : part.cotree).push_back(g.dof[e]);
  }
  std::sort(part.tree.begin(), part.tree.end());
  std::sort(part.cotree.begin(), part.cotree.end());
}

}  // namespace

int GaugePartition::tree_edges() const { return static_cast<int>(std::count(in_tree.begin(), in_tree.end(), 1)); }

ControlGraph build_graph(const ControlMesh& mesh, const DofMap& free_edges, int subdomain, TreeRule rule) {
  ControlGraph g;
  g.subdomain = subdomain;
  g.rule = rule;
  g.local_vertex.assign(mesh.count[0], -1);
  for (int v = 0; v < mesh.count[0]; ++v)
    if (mesh.subdomain[0][v] == subdomain) {
      g.local_vertex[v] = g.num_vertices();
      g.vertices.push_back(v);
      g.vertex_region.push_back(classify(mesh.flags[0][v], rule));
    }
  g.adjacency.resize(g.vertices.size());
  for (int e = 0; e < mesh.count[1]; ++e) {
    if (mesh.subdomain[1][e] != subdomain) continue;
    const int a = g.local_vertex[mesh.edge_vertices[e][0]], b = g.local_vertex[mesh.edge_vertices[e][1]];
    const int id = g.num_edges();
    g.edges.push_back(e);
    g.ends.push_back({a, b});
    g.edge_region.push_back(classify(mesh.flags[1][e], rule));
    g.dof.push_back(free_edges.index[e]);
    g.adjacency[a].push_back({b, id});
    g.adjacency[b].push_back({a, id});
  }
  for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
  return g;
}

GaugePartition spanning_tree(const ControlGraph& g) {
  GaugePartition part;
  TreeGrower grow(g, part);
  grow.grow(Region::dirichlet, Phase::dirichlet, true);
  // interface edges reach this rule only for multiplier-only interfaces; grown with the Neumann part
  grow.grow(Region::interface, Phase::neumann, !grow.any_visited());
  grow.grow(Region::neumann, Phase::neumann, !grow.any_visited());
  grow.grow(Region::interior, Phase::interior, !grow.any_visited());
  grow.cover_rest();
  grow.connect(Region::dirichlet);
  finish_sets(g, part);
  return part;
}

GaugePartition dependent_tree(const ControlGraph& g) {
  GaugePartition part;
  TreeGrower grow(g, part);
  grow.grow(Region::interface, Phase::interface, true);
  grow.grow(Region::dirichlet, Phase::dirichlet, true);
  grow.grow(Region::neumann, Phase::neumann, !grow.any_visited());
  grow.grow(Region::interior, Phase::interior, !grow.any_visited());
  grow.cover_rest();
  grow.connect(Region::dirichlet);
  for (int e = 0; e < g.num_edges(); ++e)
    if (part.in_tree[e] && g.edge_region[e] == Region::interface) {
      part.in_tree[e] = 0;
      ++part.removed_interface;
    }
  finish_sets(g, part);
  return part;
}

GaugePartition enrich_cohomology(const ControlGraph& g, GaugePartition part, const SparseMatrix& curl) {
  // candidate columns: cotree dofs, minus interface dofs under the dependent rule
  std::vector<int> dof_edge(curl.cols(), -1);
  for (int e = 0; e < g.num_edges(); ++e)
    if (g.dof[e] >= 0) dof_edge[g.dof[e]] = e;
  std::vector<int> cand;
  for (int d : part.cotree) {
    const int e = dof_edge[d];
    if (g.rule == TreeRule::interface_first && g.edge_region[e] == Region::interface) continue;
    cand.push_back(d);
  }
  if (cand.empty()) return part;
  SparseMatrix sel(curl.cols(), static_cast<int>(cand.size()));
  std::vector<Eigen::Triplet<double>> t;
  for (size_t j = 0; j < cand.size(); ++j) t.emplace_back(cand[j], static_cast<int>(j), 1.0);
  sel.setFromTriplets(t.begin(), t.end());
  SparseMatrix A = curl * sel;
  A.prune(0.0);
  SparseRank rank;
  if (A.cols() <= 1200) {
    rank = dense_rank(Eigen::MatrixXd(A), 1e-10);
  } else {
    rank = sparse_rank(A);
  }
  for (int j : rank.dependent_columns) {
    const int d = cand[j], e = dof_edge[d];
    part.in_tree[e] = 1;
    part.phase[e] = Phase::enrichment;
    ++part.phase_count[static_cast<int>(Phase::enrichment)];
    part.enrichment.push_back(d);
  }
  finish_sets(g, part);
  return part;
}

SparseMatrix cotree_expander(int ndofs, const GaugePartition& part) {
  SparseMatrix E(ndofs, static_cast<int>(part.cotree.size()));
  std::vector<Eigen::Triplet<double>> t;
  for (size_t j = 0; j < part.cotree.size(); ++j) t.emplace_back(part.cotree[j], static_cast<int>(j), 1.0);
  E.setFromTriplets(t.begin(), t.end());
  return E;
}

ReducedSystem gauge_reduce(const SparseMatrix& K, const Eigen::VectorXd& rhs, const GaugePartition& part) {
  ReducedSystem r;
  r.expander = cotree_expander(static_cast<int>(K.rows()), part);
  r.K = r.expander.transpose() * K * r.expander;
  r.rhs = r.expander.transpose() * rhs;
  return r;
}

void reverse_visit_order(ControlGraph& g) {
  for (auto& adj : g.adjacency) std::reverse(adj.begin(), adj.end());
  g.descending = !g.descending;
}

GaugePartition gauge_subdomain(const ControlMesh& mesh, const DofMap& free_edges, int subdomain, bool dependent,
                               bool reversed, ControlGraph* graph_out) {
  ControlGraph g =
      build_graph(mesh, free_edges, subdomain, dependent ? TreeRule::interface_first : TreeRule::dirichlet_first);
  if (reversed) reverse_visit_order(g);
  GaugePartition part = dependent ? dependent_tree(g) : spanning_tree(g);
  // curl onto all faces of the subdomain, Dirichlet ones included
  const DofMap faces = all_dofs(mesh, 2, subdomain);
  const SparseMatrix full = curl_incidence(mesh);
  std::vector<Eigen::Triplet<double>> t;
  for (int c = 0; c < full.outerSize(); ++c) {
    const int d = free_edges.index[c];
    if (d < 0) continue;
    for (SparseMatrix::InnerIterator it(full, c); it; ++it)
      if (faces.index[it.row()] >= 0) t.emplace_back(faces.index[it.row()], d, it.value());
  }
  SparseMatrix C(faces.size(), free_edges.size());
  C.setFromTriplets(t.begin(), t.end());
  part = enrich_cohomology(g, std::move(part), C);
  if (graph_out) *graph_out = g;
  return part;
}

bool tree_is_acyclic(const ControlGraph& g, const GaugePartition& part) {
  UnionFind uf(g.num_vertices());
  for (int e = 0; e < g.num_edges(); ++e)
    if (part.in_tree[e] && !uf.unite(g.ends[e][0], g.ends[e][1])) return false;
  return true;
}

void write_tree_csv(std::ostream& os, const ControlMesh& mesh, const ControlGraph& g, const GaugePartition& part,
                    bool header) {
  if (header) os << "subdomain,patch,direction,i,j,k,region,phase,set\n";
  for (int e = 0; e < g.num_edges(); ++e) {
    const EntityRef& o = mesh.owner[1][g.edges[e]];
    const char* set = g.dof[e] < 0 ? "constrained" : (part.in_tree[e] ? "tree" : "cotree");
    os << g.subdomain << "," << o.patch << "," << o.comp << "," << o.idx[0] << "," << o.idx[1] << "," << o.idx[2] << ","
       << region_name(g.edge_region[e]) << "," << phase_name(part.phase[e]) << "," << set << "\n";
  }
}

}  // namespace igatc
