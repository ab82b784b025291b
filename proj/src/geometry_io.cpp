#include "igatc/geometry.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace igatc {

using nlohmann::json;

namespace {

FaceRef face_from_json(const json& j) {
  if (j.is_null()) return {-1, Side::xmin};
  return {j.at(0).get<int>(), parse_side(j.at(1).get<std::string>())};
}

json face_to_json(const FaceRef& f) {
  if (f.patch < 0) return nullptr;
  return json::array({f.patch, side_name(f.side)});
}

FaceTag parse_tag(const FaceRef& f, const std::string& tag) {
  auto with_id = [&](const std::string& prefix) {
    return tag.size() > prefix.size() && tag.compare(0, prefix.size(), prefix) == 0 ? std::stoi(tag.substr(prefix.size()))
                                                                                     : 0;
  };
  if (tag == "dirichlet") return {f, FaceKind::dirichlet, 0};
  if (tag == "neumann") return {f, FaceKind::neumann, 0};
  if (tag.rfind("interface", 0) == 0) return {f, FaceKind::interface, with_id("interface:")};
  if (tag.rfind("periodic", 0) == 0) return {f, FaceKind::periodic, with_id("periodic:")};
  throw GeometryError("unknown face tag '" + tag + "'");
}

std::string tag_string(const FaceTag& t) {
  switch (t.kind) {
    case FaceKind::dirichlet: return "dirichlet";
    case FaceKind::neumann: return "neumann";
    case FaceKind::interface: return "interface:" + std::to_string(t.id);
    case FaceKind::periodic: return "periodic:" + std::to_string(t.id);
  }
  return "";
}

}  // namespace

MultiPatchDomain parse_geometry_json(const std::string& text) {
  MultiPatchDomain d;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw GeometryError(std::string("geometry JSON: ") + e.what());
  }
  try {
    for (const auto& jp : doc.at("patches")) {
      const auto deg = jp.at("degree").get<std::vector<int>>();
      const auto kn = jp.at("knots").get<std::vector<std::vector<double>>>();
      if (deg.size() != 3 || kn.size() != 3) throw GeometryError("patches must be trivariate");
      std::array<KnotVector, 3> k{KnotVector(deg[0], kn[0]), KnotVector(deg[1], kn[1]), KnotVector(deg[2], kn[2])};
      const auto pts = jp.at("points").get<std::vector<std::vector<double>>>();
      Eigen::MatrixX4d P(pts.size(), 4);
      for (size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].size() != 4) throw GeometryError("control points need [x,y,z,w]");
        for (int c = 0; c < 4; ++c) P(i, c) = pts[i][c];
      }
      d.patches.emplace_back(k, P);
      d.subdomain.push_back(jp.value("subdomain", 0));
    }
    if (doc.contains("faces"))
      for (const auto& jf : doc.at("faces"))
        d.faces.push_back(parse_tag({jf.at("patch").get<int>(), parse_side(jf.at("side").get<std::string>())},
                                    jf.at("tag").get<std::string>()));
    if (doc.contains("interfaces"))
      for (const auto& ji : doc.at("interfaces")) {
        InterfaceRecord r;
        r.id = ji.value("id", 0);
        r.dependent = face_from_json(ji.at("dependent"));
        r.independent = ji.contains("independent") ? face_from_json(ji.at("independent")) : FaceRef{-1, Side::xmin};
        if (ji.contains("map")) {
          const auto& m = ji.at("map");
          if (m.contains("offset")) r.map.offset = m.at("offset").get<std::array<double, 2>>();
          if (m.contains("flip")) r.map.flip = m.at("flip").get<std::array<bool, 2>>();
          if (m.contains("wrap")) r.map.wrap = m.at("wrap").get<std::array<double, 2>>();
        }
        d.interfaces.push_back(r);
      }
    if (doc.contains("glue"))
      for (const auto& jg : doc.at("glue")) d.glue.push_back({face_from_json(jg.at(0)), face_from_json(jg.at(1))});
    if (doc.contains("periodic"))
      for (const auto& jq : doc.at("periodic"))
        d.periodic.push_back({jq.value("id", 0), face_from_json(jq.at("a")), face_from_json(jq.at("b"))});
  } catch (const json::exception& e) {
    throw GeometryError(std::string("geometry JSON: ") + e.what());
  }
  for (const auto& t : d.faces)
    if (t.face.patch < 0 || t.face.patch >= d.num_patches()) throw GeometryError("face tag references a missing patch");
  return d;
}

MultiPatchDomain load_geometry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GeometryError("cannot open geometry file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_geometry_json(ss.str());
}

std::string geometry_to_json(const MultiPatchDomain& d) {
  json doc;
  doc["patches"] = json::array();
  for (int i = 0; i < d.num_patches(); ++i) {
    const Patch& p = d.patches[i];
    json jp;
    jp["degree"] = {p.knots(0).degree(), p.knots(1).degree(), p.knots(2).degree()};
    jp["knots"] = {p.knots(0).knots(), p.knots(1).knots(), p.knots(2).knots()};
    json pts = json::array();
    for (int r = 0; r < p.points().rows(); ++r)
      pts.push_back({p.points()(r, 0), p.points()(r, 1), p.points()(r, 2), p.points()(r, 3)});
    jp["points"] = pts;
    jp["subdomain"] = d.subdomain[i];
    doc["patches"].push_back(jp);
  }
  doc["faces"] = json::array();
  for (const auto& t : d.faces)
    doc["faces"].push_back({{"patch", t.face.patch}, {"side", side_name(t.face.side)}, {"tag", tag_string(t)}});
  doc["interfaces"] = json::array();
  for (const auto& r : d.interfaces)
    doc["interfaces"].push_back({{"id", r.id},
                                 {"dependent", face_to_json(r.dependent)},
                                 {"independent", face_to_json(r.independent)},
                                 {"map", {{"offset", r.map.offset}, {"flip", r.map.flip}, {"wrap", r.map.wrap}}}});
  doc["glue"] = json::array();
  for (const auto& g : d.glue) doc["glue"].push_back({face_to_json(g.a), face_to_json(g.b)});
  doc["periodic"] = json::array();
  for (const auto& q : d.periodic) doc["periodic"].push_back({{"id", q.id}, {"a", face_to_json(q.a)}, {"b", face_to_json(q.b)}});
  return doc.dump(1);
}

}  // namespace igatc
