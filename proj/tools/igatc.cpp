#include "igatc/experiments.hpp"
#include "igatc/export.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

using namespace igatc;

namespace {

struct Config {
  std::vector<std::string> geometries;
  std::vector<int> degrees;
  std::vector<int> refine;
  std::vector<int> elements;
  std::string multiplier = "both";
  std::string gauge = "tree";
  std::string out;
  std::string fields;
  std::string tree_dump;
  int regularity = -2;
  int count = 20;
  int jobs = 0;
};

/// Runs the cells on a worker pool; results come back in cell order.
template <class T>
std::vector<T> run_cells(const std::vector<std::function<T()>>& cells, int jobs) {
  std::vector<std::optional<T>> res(cells.size());
  std::vector<std::exception_ptr> err(cells.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < cells.size();) {
      try {
        res[i] = cells[i]();
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<T> out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (err[i]) std::rethrow_exception(err[i]);
    out.push_back(std::move(*res[i]));
  }
  return out;
}

std::vector<int> levels(const Config& c, std::vector<int> def) {
  if (!c.elements.empty()) return c.elements;
  if (!c.refine.empty()) {
    std::vector<int> e;
    for (int r : c.refine) e.push_back(1 << r);
    return e;
  }
  return def;
}

std::vector<bool> multiplier_flags(const Config& c) {
  if (c.multiplier == "standard") return {false};
  if (c.multiplier == "enriched") return {true};
  return {false, true};
}

GaugeMode gauge_mode(const Config& c) { return c.gauge == "none" ? GaugeMode::none : GaugeMode::tree; }

const char* multiplier_name(bool enriched) { return enriched ? "enriched" : "standard"; }

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

/// `path` itself for a single run, otherwise the tag inserted before the extension.
std::string tagged(const std::string& path, const std::string& tag, bool single) {
  if (single) return path;
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "_" + tag;
  return path.substr(0, dot) + "_" + tag + path.substr(dot);
}

std::string safe(std::string s) {
  for (char& c : s)
    if (c == ':' || c == '/' || c == '.') c = '-';
  return s;
}

void dump_trees(const std::string& path, const ControlMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  for (int sd = 0; sd < mesh.domain.num_subdomains(); ++sd) {
    bool dependent = false;
    for (const auto& r : mesh.domain.interfaces) dependent = dependent || mesh.domain.subdomain[r.dependent.patch] == sd;
    ControlGraph g;
    const GaugePartition part = gauge_subdomain(mesh, free_dofs(mesh, 1, sd), sd, dependent, false, &g);
    write_tree_csv(os, mesh, g, part, sd == 0);
  }
}

/// Largest extent of the control net, the cube side for the analytic spectrum.
double domain_side(const MultiPatchDomain& d) {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e300), hi = -lo;
  for (const auto& p : d.patches)
    for (int i = 0; i < p.points().rows(); ++i) {
      const Eigen::Vector3d x = p.points().row(i).head<3>().transpose() / p.points()(i, 3);
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
  return (hi - lo).maxCoeff();
}

int cmd_kernel_table(const Config& c) {
  const auto geoms = c.geometries.empty() ? std::vector<std::string>{"cube-2", "cube-4", "cube-5"} : c.geometries;
  const auto degs = c.degrees.empty() ? std::vector<int>{2, 3} : c.degrees;
  const auto els = levels(c, {2, 3});
  const int reg = c.regularity == -2 ? 1 : c.regularity;
  std::vector<std::function<KernelRow()>> cells;
  for (const auto& g : geoms)
    for (int p : degs)
      for (int e : els) cells.push_back([=] { return kernel_row(g, p, e, reg); });
  const auto rows = run_cells(cells, c.jobs);
  Output out(c.out);
  out.os() << "geometry,patches,p,h,dim_x0,dim_k_standard,dim_k_enriched,internal_vertices\n";
  int bad = 0;
  for (const auto& r : rows) {
    out.os() << r.geometry << "," << r.patches << "," << r.degree << "," << csv_number(1.0 / r.elements) << ","
             << r.dim_x0 << "," << r.dim_k_standard << "," << r.dim_k_enriched << "," << r.internal_vertices << "\n";
    const bool ok = r.dim_k_enriched == r.dim_x0 && r.dim_x0 <= r.dim_k_standard &&
                    r.dim_k_standard <= r.dim_x0 + r.internal_vertices;
    if (!ok) {
      std::cerr << "invariant failed: " << r.geometry << " p=" << r.degree << " elements=" << r.elements << "\n";
      ++bad;
    }
  }
  return bad ? 1 : 0;
}

int cmd_eigen(const Config& c) {
  const auto geoms = c.geometries.empty() ? std::vector<std::string>{"cube-mortar-conforming:4"} : c.geometries;
  const auto degs = c.degrees.empty() ? std::vector<int>{3} : c.degrees;
  const auto els = levels(c, {4});
  const auto flags = multiplier_flags(c);
  const bool single = geoms.size() * degs.size() * els.size() * flags.size() == 1;
  struct Cell {
    std::string geometry;
    int p, e;
    bool enriched;
    EigenRun run;
  };
  std::vector<std::function<Cell()>> cells;
  for (const auto& g : geoms)
    for (int p : degs)
      for (int e : els)
        for (bool enr : flags)
          cells.push_back([=, &c] {
            const ControlMesh mesh = make_mesh(g, p, e, c.regularity == -2 ? -1 : c.regularity);
            EigenOptions opt;
            opt.enriched = enr;
            opt.gauge = gauge_mode(c);
            opt.count = c.count;
            opt.modes = c.fields.empty() ? 0 : std::min(c.count, 6);
            Cell cell{g, p, e, enr, eigen_run(mesh, opt, domain_side(mesh.domain))};
            const std::string tag = safe(g) + "_p" + std::to_string(p) + "_e" + std::to_string(e) + "_" + multiplier_name(enr);
            if (!c.fields.empty()) {
              std::vector<FaceField> f;
              const SparseMatrix C = curl_incidence(mesh);
              for (int m = 0; m < cell.run.report.modes.cols(); ++m)
                f.push_back({"B_mode" + std::to_string(m), C * cell.run.report.modes.col(m)});
              write_vtk_fields(tagged(c.fields, tag, single), mesh, f);
            }
            if (!c.tree_dump.empty()) dump_trees(tagged(c.tree_dump, tag, single), mesh);
            return cell;
          });
  const auto rows = run_cells(cells, c.jobs);
  Output out(c.out);
  out.os() << "geometry,p,h,multiplier,gauge,index,eigenvalue,reference,relative_error,spurious\n";
  int bad = 0;
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.run.values.size(); ++i) {
      const double ref = r.run.reference[i];
      out.os() << r.geometry << "," << r.p << "," << csv_number(1.0 / r.e) << "," << multiplier_name(r.enriched) << ","
               << c.gauge << "," << i << "," << csv_number(r.run.values[i]) << "," << csv_number(ref) << ","
               << csv_number(std::isnan(ref) ? ref : std::abs(r.run.values[i] - ref) / ref) << ","
               << int(r.run.spurious[i]) << "\n";
    }
    std::cerr << r.geometry << " p=" << r.p << " elements=" << r.e << " " << multiplier_name(r.enriched)
              << ": zeros=" << r.run.report.cluster.zeros << " spurious=" << r.run.spurious_count << "\n";
    if (r.enriched && gauge_mode(c) == GaugeMode::tree && r.run.report.cluster.zeros != 0) {
      std::cerr << "invariant failed: gauged enriched run has zero eigenvalues\n";
      ++bad;
    }
  }
  return bad ? 1 : 0;
}

int cmd_convergence(const Config& c) {
  const auto geoms = c.geometries.empty()
                         ? std::vector<std::string>{"source-box-shifted:0", "source-box-shifted:1"}
                         : c.geometries;
  const auto degs = c.degrees.empty() ? std::vector<int>{2, 3} : c.degrees;
  const auto els = levels(c, {4, 6, 8});
  const bool enriched = c.multiplier != "standard";
  const bool single = geoms.size() * degs.size() * els.size() == 1;
  std::vector<std::function<ConvergenceRow()>> cells;
  for (const auto& g : geoms)
    for (int p : degs)
      for (int e : els)
        cells.push_back([=, &c] {
          const ConvergenceRow row = convergence_row(g, p, e, gauge_mode(c), enriched);
          const std::string tag = safe(g) + "_p" + std::to_string(p) + "_e" + std::to_string(e);
          if (!c.fields.empty() || !c.tree_dump.empty()) {
            const ControlMesh mesh = make_mesh(g, p, e);
            if (!c.tree_dump.empty()) dump_trees(tagged(c.tree_dump, tag, single), mesh);
            if (!c.fields.empty()) {
              SourceProblem src;
              src.current = manufactured_current;
              const FieldSolution sol = solve_magnetostatic(build_saddle(mesh, src, enriched, gauge_mode(c)));
              write_vtk_fields(tagged(c.fields, tag, single), mesh, {{"B", sol.face_coefficients()}});
            }
          }
          return row;
        });
  const auto rows = run_cells(cells, c.jobs);
  Output out(c.out);
  out.os() << "geometry,p,h,elements,unknowns,multipliers,error,residual\n";
  std::map<std::pair<std::string, int>, std::pair<std::vector<int>, std::vector<double>>> series;
  for (const auto& r : rows) {
    out.os() << r.geometry << "," << r.degree << "," << csv_number(1.0 / r.elements) << "," << r.elements << ","
             << r.unknowns << "," << r.multipliers << "," << csv_number(r.error) << "," << csv_number(r.residual) << "\n";
    auto& s = series[{r.geometry, r.degree}];
    s.first.push_back(r.elements);
    s.second.push_back(r.error);
  }
  int bad = 0;
  for (const auto& [key, s] : series) {
    if (s.first.size() >= 2)
      std::cerr << key.first << " p=" << key.second << ": slope " << fitted_slope(s.first, s.second) << "\n";
    for (size_t i = 1; i < s.second.size(); ++i)
      if (s.first[i] > s.first[i - 1] && !(s.second[i] < s.second[i - 1])) {
        std::cerr << "invariant failed: error not decreasing for " << key.first << " p=" << key.second << "\n";
        ++bad;
        break;
      }
  }
  return bad ? 1 : 0;
}

int cmd_infsup(const Config& c) {
  const auto geoms = c.geometries.empty()
                         ? std::vector<std::string>{"cube-mortar-conforming:4", "cube-mortar-conforming:5"}
                         : c.geometries;
  const auto degs = c.degrees.empty() ? std::vector<int>{2, 3} : c.degrees;
  const auto els = levels(c, {2, 4, 8});
  const auto flags = multiplier_flags(c);
  std::vector<std::function<InfSupRow()>> cells;
  for (const auto& g : geoms)
    for (int p : degs)
      for (int e : els)
        for (bool enr : flags) cells.push_back([=] { return infsup_row(g, p, e, enr); });
  const auto rows = run_cells(cells, c.jobs);
  Output out(c.out);
  out.os() << "geometry,patches,p,h,multiplier,multipliers,beta,beta_over_sqrt_h\n";
  int bad = 0;
  for (const auto& r : rows) {
    const double h = 1.0 / r.elements;
    out.os() << r.geometry << "," << r.patches << "," << r.degree << "," << csv_number(h) << ","
             << multiplier_name(r.enriched) << "," << r.multipliers << "," << csv_number(r.beta) << ","
             << csv_number(r.beta / std::sqrt(h)) << "\n";
    if (!(r.beta > 0.0)) {
      std::cerr << "invariant failed: zero inf-sup constant for " << r.geometry << " p=" << r.degree << "\n";
      ++bad;
    }
  }
  return bad ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spline de Rham discretisations with tree-cotree gauging and mortar coupling"};
  app.require_subcommand(1);
  Config c;
  auto add_common = [&c](CLI::App* s) {
    s->add_option("--geometry", c.geometries, "builtin name or geometry JSON path (repeat or comma separate)")
        ->delimiter(',');
    s->add_option("--degree", c.degrees, "spline degrees")->delimiter(',')->check(CLI::Range(2, 8));
    s->add_option("--refine", c.refine, "refinement levels r, 2^r elements per patch direction")
        ->delimiter(',')
        ->check(CLI::Range(0, 6));
    s->add_option("--elements", c.elements, "elements per patch direction (overrides --refine)")
        ->delimiter(',')
        ->check(CLI::Range(1, 64));
    s->add_option("--multiplier", c.multiplier, "multiplier space")
        ->check(CLI::IsMember({"standard", "enriched", "both"}));
    s->add_option("--gauge", c.gauge, "gauging")->check(CLI::IsMember({"tree", "none"}));
    s->add_option("--out", c.out, "CSV output (default stdout)");
    s->add_option("--fields", c.fields, "VTK field output");
    s->add_option("--tree-dump", c.tree_dump, "CSV of the gauge trees");
    s->add_option("--regularity", c.regularity, "inter-element continuity (default p-1; kernel-table 1)");
    s->add_option("--count", c.count, "eigenvalues to report")->check(CLI::PositiveNumber);
    s->add_option("--jobs", c.jobs, "worker threads (default: hardware threads)");
  };
  auto* kt = app.add_subcommand("kernel-table", "kernel dimensions with both multiplier spaces");
  auto* eg = app.add_subcommand("eigen", "Maxwell eigenvalues with spurious-mode flags");
  auto* cv = app.add_subcommand("convergence", "manufactured-solution errors");
  auto* is = app.add_subcommand("infsup", "numerical inf-sup constants");
  for (auto* s : {kt, eg, cv, is}) add_common(s);
  CLI11_PARSE(app, argc, argv);
  if (c.jobs <= 0) c.jobs = std::max(1u, std::thread::hardware_concurrency());
  try {
    if (kt->parsed()) return cmd_kernel_table(c);
    if (eg->parsed()) return cmd_eigen(c);
    if (cv->parsed()) return cmd_convergence(c);
    if (is->parsed()) return cmd_infsup(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
