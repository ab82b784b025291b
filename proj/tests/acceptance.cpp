#include "igatc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace igatc;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void run_criterion(int id, const std::string& title, const std::function<void(Verdict&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  failures += !v.pass;
  std::printf("%s %d %s:%s (%.0f s)\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), v.detail.str().c_str(), dt);
  std::fflush(stdout);
}

struct TableEntry {
  int patches, degree, elements, x0, k_standard, k_enriched;
};

// dim X0, dim K with M_h, dim K with the enriched space
const TableEntry kTable[] = {
    {2, 2, 2, 20, 20, 20},         {4, 2, 2, 50, 51, 50},         {5, 2, 2, 80, 84, 80},
    {2, 2, 3, 63, 63, 63},         {4, 2, 3, 147, 148, 147},      {5, 2, 3, 219, 223, 219},
    {2, 3, 2, 144, 144, 144},      {4, 3, 2, 324, 325, 324},      {5, 3, 2, 464, 468, 464},
    {2, 3, 3, 468, 468, 468},      {4, 3, 3, 1014, 1015, 1014},   {5, 3, 3, 1392, 1396, 1392},
};

void kernel_table(Verdict& v) {
  int matched = 0;
  for (const auto& t : kTable) {
    const auto r = kernel_row("cube-" + std::to_string(t.patches), t.degree, t.elements);
    const bool ok = r.dim_x0 == t.x0 && r.dim_k_standard == t.k_standard && r.dim_k_enriched == t.k_enriched;
    matched += (r.dim_x0 == t.x0) + (r.dim_k_standard == t.k_standard) + (r.dim_k_enriched == t.k_enriched);
    if (!ok) {
      std::ostringstream os;
      os << t.patches << " patches p=" << t.degree << " h=1/" << t.elements << " got " << r.dim_x0 << "/"
         << r.dim_k_standard << "/" << r.dim_k_enriched;
      v.require(false, os.str());
    }
  }
  v.detail << " " << matched << "/36 values match";
}

void spurious_modes(Verdict& v) {
  const auto m = make_mesh("cube-mortar-conforming:4", 3, 4);
  EigenOptions opt;
  opt.enriched = false;
  const auto a = eigen_run(m, opt, std::numbers::pi, 0.05);
  opt.enriched = true;
  const auto b = eigen_run(m, opt, std::numbers::pi, 0.05);
  const int internal = static_cast<int>(interface_internal_vertices(m).size());
  v.detail << " standard " << a.spurious_count << " unmatched, enriched " << b.spurious_count << " (internal vertices "
           << internal << ")";
  v.require(internal == 1, "one interface-internal vertex");
  v.require(a.spurious_count == internal, "standard space shows one unmatched mode");
  v.require(b.spurious_count == 0, "enriched space shows none");
}

void cube_eigenvalues(Verdict& v) {
  const auto m = make_mesh("cube", 3, 4);
  const auto r = solve_eigen(m, {});
  const auto ref = cube_spectrum(std::numbers::pi, 6.5);
  std::vector<double> nonzero;
  for (int i = 0; i < r.eigenvalues.size(); ++i)
    if (i >= r.cluster.zeros) nonzero.push_back(r.eigenvalues(i));
  v.require(nonzero.size() >= 10, "ten nonzero eigenvalues");
  double worst = 0.0;
  for (size_t i = 0; i < 10 && i < nonzero.size(); ++i) worst = std::max(worst, std::abs(nonzero[i] - ref[i]) / ref[i]);
  v.detail << " zeros " << r.cluster.zeros << ", max relative error " << worst;
  v.require(r.cluster.zeros == 0, "no zero eigenvalues after gauging");
  v.require(worst < 1e-3, "relative error below 1e-3");
}

void convergence(Verdict& v) {
  const std::vector<int> levels{4, 6, 8};
  for (const std::string g : {"source-box-shifted:0", "source-box-shifted:1"})
    for (int p : {2, 3}) {
      std::vector<double> err;
      for (int e : levels) err.push_back(convergence_row(g, p, e).error);
      const double s = fitted_slope(levels, err);
      v.detail << " " << g << " p=" << p << " slope " << s << ";";
      v.require(s >= p - 0.2 && s <= p + 0.3, g + " slope in [p-0.2, p+0.3]");
    }
}

void infsup(Verdict& v) {
  const std::vector<int> levels{2, 4, 8};
  for (int patches : {4, 5})
    for (int p : {2, 3})
      for (bool enriched : {false, true}) {
        std::vector<double> beta;
        for (int e : levels)
          beta.push_back(infsup_row("cube-mortar-conforming:" + std::to_string(patches), p, e, enriched).beta);
        const double lo = *std::min_element(beta.begin(), beta.end()), hi = *std::max_element(beta.begin(), beta.end());
        std::ostringstream tag;
        tag << patches << "p" << p << (enriched ? "e" : "s");
        v.detail << " " << tag.str() << " min " << lo << " ratio " << hi / lo << ";";
        v.require(lo > 0.01, tag.str() + " beta > 0.01");
        v.require(hi / lo < 2.0, tag.str() + " ratio < 2");
      }
}

void gauge_properties(Verdict& v) {
  // (a) gauged stiffness on the constrained cotree space
  int spd = 0;
  const std::vector<std::string> dirichlet{"cube",
                                           "cube-2",
                                           "cube-4",
                                           "cube-5",
                                           "cube-mortar-conforming:4",
                                           "cube-mortar-conforming:5",
                                           "cube-mortar-shifted:1",
                                           "cube-glued:4",
                                           "cube-glued:5",
                                           "source-box-shifted:1",
                                           "source-box-conforming:4",
                                           "source-box-glued:4",
                                           "periodic-cube",
                                           "quarter-ring"};
  for (const auto& g : dirichlet) {
    const Eigen::VectorXd ev = symmetric_eigenvalues(constrained_gauged_stiffness(make_mesh(g, 2, 2), true));
    const bool ok = ev.minCoeff() > 1e-10 * ev.maxCoeff();
    spd += ok;
    v.require(ok, "SPD on " + g);
  }
  v.detail << " (a) SPD " << spd << "/" << dirichlet.size() << ";";

  // (b) the periodic loop needs one enrichment edge when nothing bounds it
  const auto pc = make_mesh("periodic-cube-neumann", 2, 2);
  const int enr = static_cast<int>(gauge_subdomain(pc, free_dofs(pc, 1, 0), 0, false).enrichment.size());
  v.detail << " (b) enrichment edges " << enr << ";";
  v.require(enr == 1, "one enrichment edge");

  // (c) flux from two trees at random points
  const auto box = make_mesh("source-box-shifted:1", 3, 4);
  SourceProblem src;
  src.current = manufactured_current;
  const auto a = solve_magnetostatic(build_saddle(box, src, true, GaugeMode::tree));
  const auto b = solve_magnetostatic(build_saddle(box, src, true, GaugeMode::tree_reversed));
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<int> P(0, box.patches() - 1);
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const int patch = P(rng);
    const Eigen::Vector3d xi(U(rng), U(rng), U(rng));
    worst = std::max(worst, (a.flux(patch, xi) - b.flux(patch, xi)).norm());
  }
  v.detail << " (c) max flux difference " << worst << ";";
  v.require(worst < 1e-8, "flux independent of the tree");

  // (d) mortar on a matching single-face interface against strong gluing
  const auto c = convergence_row("source-box-conforming:1", 3, 4);
  const auto d = convergence_row("source-box-glued:1", 3, 4);
  v.detail << " (d) error difference " << std::abs(c.error - d.error);
  v.require(std::abs(c.error - d.error) < 1e-8, "mortar equals glue");
  const auto c4 = convergence_row("source-box-conforming:4", 3, 4);
  const auto d4 = convergence_row("source-box-glued:4", 3, 4);
  v.detail << " (four-face interface, weakly coupled: " << std::abs(c4.error - d4.error) << ")";
}

void structure(Verdict& v) {
  double complex = 0.0;
  for (const std::string g : {"cube", "cube-5", "cube-mortar-conforming:5", "cube-mortar-shifted:0.37",
                              "source-box-shifted:1", "periodic-cube", "quarter-ring", "ring"})
    for (int p : {2, 3}) complex = std::max(complex, complex_defect(make_mesh(g, p, 3)));
  const std::vector<KnotVector> knots{KnotVector(1, {0, 0, 1, 1}),
                                      KnotVector(2, {0, 0, 0, 0.5, 1, 1, 1}),
                                      KnotVector(3, {0, 0, 0, 0, 0.25, 0.25, 0.5, 0.75, 0.75, 0.75, 1, 1, 1, 1}),
                                      KnotVector::uniform(4, 5),
                                      KnotVector::uniform(3, 3, 1),
                                      KnotVector::uniform(2, 7, 0)};
  double deriv = 0.0, unity = 0.0;
  unsigned seed = 1;
  for (const auto& kv : knots) {
    deriv = std::max(deriv, derivative_defect(kv, 50, seed));
    unity = std::max(unity, unity_defect(kv, 200, seed++));
  }
  double trace = 0.0;
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (const std::string g : {"cube-5", "quarter-ring", "cube-mortar-shifted:1"}) {
    const auto m = make_mesh(g, 3, 3);
    Eigen::VectorXd u(m.count[0]);
    for (int i = 0; i < u.size(); ++i) u(i) = U(rng);
    trace = std::max(trace, trace_gradient_defect(m, u));
  }
  v.detail << " curl grad " << complex << ", derivative " << deriv << "/h, unity " << unity << ", trace " << trace;
  v.require(complex == 0.0, "curl grad = 0 exactly");
  v.require(deriv < 1e-6, "derivative identity");
  v.require(unity < 1e-12, "partition of unity");
  v.require(trace < 1e-10, "trace commutes with gradient");
}

}  // namespace

int main(int argc, char** argv) {
  // optional list of criterion numbers to run
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  auto criterion = [&only](int id, const std::string& title, const std::function<void(Verdict&)>& body) {
    if (only.empty() || std::find(only.begin(), only.end(), id) != only.end()) run_criterion(id, title, body);
  };
  criterion(1, "kernel dimension table", kernel_table);
  criterion(2, "spurious mode without enrichment", spurious_modes);
  criterion(3, "cube eigenvalues", cube_eigenvalues);
  criterion(4, "convergence order", convergence);
  criterion(5, "inf-sup stability", infsup);
  criterion(6, "gauge properties", gauge_properties);
  criterion(7, "structure preservation", structure);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
