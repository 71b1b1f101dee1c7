#include "lpstab/body_io.hpp"

#include <charconv>
#include <fstream>

namespace lpstab {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

nlohmann::json spec_to_json(const BodySpec& spec) {
  nlohmann::json j;
  j["family"] = spec.family;
  j["dimension"] = spec.dimension;
  if (!spec.resolution.empty()) j["resolution"] = spec.resolution;
  if (spec.family == "ball") {
    j["radius"] = spec.radius;
  } else if (spec.family == "ellipsoid") {
    std::vector<double> rows;
    for (int i = 0; i < spec.dimension; ++i)
      for (int k = 0; k < spec.dimension; ++k) rows.push_back(spec.axes(i, k));
    j["axes"] = rows;
  } else if (spec.family == "harmonic") {
    j["eps"] = spec.eps;
    j["degree"] = spec.degree;
    j["order"] = spec.order;
  } else if (spec.family == "cap_cut") {
    j["eps"] = spec.eps;
    j["smoothing"] = spec.smoothing;
  } else if (spec.family == "random") {
    j["seed"] = spec.seed;
    j["decay"] = spec.decay;
  }
  return j;
}

BodySpec spec_from_json(const nlohmann::json& j) {
  BodySpec spec;
  spec.family = j.at("family").get<std::string>();
  spec.dimension = j.at("dimension").get<int>();
  if (j.contains("resolution")) spec.resolution = j["resolution"].get<std::vector<int>>();
  if (j.contains("radius")) spec.radius = j["radius"].get<double>();
  if (j.contains("axes")) {
    auto rows = j["axes"].get<std::vector<double>>();
    int n = spec.dimension;
    if (static_cast<int>(rows.size()) != n * n) throw BodyError("bad ellipsoid axes size");
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) spec.axes(i, k) = rows[i * n + k];
  }
  if (j.contains("eps")) spec.eps = j["eps"].get<double>();
  if (j.contains("degree")) spec.degree = j["degree"].get<int>();
  if (j.contains("order")) spec.order = j["order"].get<int>();
  if (j.contains("smoothing")) spec.smoothing = j["smoothing"].get<double>();
  if (j.contains("seed")) spec.seed = j["seed"].get<unsigned>();
  if (j.contains("decay")) spec.decay = j["decay"].get<double>();
  return spec;
}

nlohmann::json body_to_json(const ConvexBody& K, const BodySpec* spec) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["dimension"] = K.dim();
  j["representation"] = K.dim() == 2 ? "fourier" : "real_spherical_harmonics";
  j["coefficients"] = K.support().c;
  nlohmann::json meta;
  meta["degree"] = K.support().degree;
  meta["resolution"] = K.grid()->resolution();
  if (spec) meta["spec"] = spec_to_json(*spec);
  j["metadata"] = meta;
  return j;
}

LoadedBody body_from_json(const nlohmann::json& j, const std::vector<int>& resolution_override) {
  int version = j.at("format_version").get<int>();
  if (version != 1) throw BodyError("unsupported body file version");
  int dim = j.at("dimension").get<int>();
  std::string rep = j.at("representation").get<std::string>();
  if ((dim == 2 && rep != "fourier") || (dim == 3 && rep != "real_spherical_harmonics"))
    throw BodyError("representation does not match dimension");

  Spectrum s;
  s.dim = dim;
  s.c = j.at("coefficients").get<std::vector<double>>();
  if (dim == 2) {
    if (s.c.size() % 2 == 0) throw BodyError("fourier coefficient array must have odd length");
    s.degree = static_cast<int>(s.c.size() / 2);
  } else {
    int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(s.c.size())))) - 1;
    if (Spectrum::coeff_count(3, d) != static_cast<int>(s.c.size()))
      throw BodyError("spherical harmonic coefficient array must have square length");
    s.degree = d;
  }

  std::vector<int> res = resolution_override;
  if (res.empty() && j.contains("metadata") && j["metadata"].contains("resolution"))
    res = j["metadata"]["resolution"].get<std::vector<int>>();
  auto grid = default_grid(dim, res);
  if (s.degree > grid->max_degree()) s = s.truncated(grid->max_degree());

  LoadedBody out{ConvexBody::from_coefficients(grid, std::move(s)), std::nullopt};
  if (j.contains("metadata") && j["metadata"].contains("spec"))
    out.spec = spec_from_json(j["metadata"]["spec"]);
  return out;
}

void write_body_file(const std::string& path, const ConvexBody& K, const BodySpec* spec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << body_to_json(K, spec).dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

LoadedBody read_body_file(const std::string& path, const std::vector<int>& resolution_override) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return body_from_json(j, resolution_override);
}

}  // namespace lpstab
