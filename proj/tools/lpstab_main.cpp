// lpstab: generate convex bodies, evaluate their functionals, run the
// verification suite, and sweep generator parameters.
//
// exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpstab/body_io.hpp"
#include "lpstab/constants.hpp"
#include "lpstab/distances.hpp"
#include "lpstab/generators.hpp"
#include "lpstab/lp_functionals.hpp"
#include "lpstab/stability.hpp"

using nlohmann::json;
using namespace lpstab;

namespace {

constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// LPSTAB_RES_SCALE multiplies the default grid resolution (integer 1..4)
std::vector<int> resolved_resolution(int dim, const std::vector<int>& explicit_res) {
  if (!explicit_res.empty()) return explicit_res;
  int scale = 1;
  if (const char* env = std::getenv("LPSTAB_RES_SCALE")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 4)
      throw UsageError("LPSTAB_RES_SCALE must be an integer in 1..4");
    scale = static_cast<int>(v);
  }
  if (scale == 1) return {};
  if (dim == 2) return {kDefaultCircleNodes * scale};
  return {kDefaultGaussOrder * scale, kDefaultLongitudes * scale};
}

BodySpec spec_from_flags(const std::string& family, int dim, double radius,
                         const std::vector<double>& axes, double eps, int degree, int order,
                         double smoothing, unsigned seed, double decay,
                         const std::vector<int>& res) {
  BodySpec spec;
  spec.family = family;
  spec.dimension = dim;
  spec.resolution = resolved_resolution(dim, res);
  spec.radius = radius;
  if (!axes.empty()) {
    if (static_cast<int>(axes.size()) != dim * dim)
      throw UsageError("--axes needs " + std::to_string(dim * dim) + " row-major entries");
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) spec.axes(i, j) = axes[i * dim + j];
  }
  spec.eps = eps;
  spec.degree = degree;
  spec.order = order;
  spec.smoothing = smoothing;
  spec.seed = seed;
  spec.decay = decay;
  return spec;
}

json point_json(const Vec& x, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(x[i]);
  return a;
}

double best_ball_l2(const ConvexBody& K) {
  const auto& g = *K.grid();
  double mean = 0;
  for (int k = 0; k < g.node_count(); ++k) mean += g.weights()[k] * K.support_values()[k];
  mean /= sphere_surface(K.dim());
  return l2_distance_to_ball(K, mean);
}

bool per_p_quantity(const std::string& q) { return q == "Rp" || q == "Ep" || q == "ep"; }

// one evaluated quantity; p-dependent quantities are emitted as {p: value}
json eval_quantity(const ConvexBody& K, const std::string& q, const std::vector<double>& ps) {
  auto per_p = [&](auto&& fn) {
    if (ps.empty()) throw UsageError("quantity '" + q + "' needs --p");
    json out = json::object();
    for (double p : ps) out[format_double(p)] = fn(p);
    return out;
  };
  if (q == "volume") return volume(K);
  if (q == "diameter") return diameter(K);
  if (q == "Rp") return per_p([&](double p) { return json(lp_curvature(K, p).summary.ratio); });
  if (q == "Ep") return per_p([&](double p) { return json(width_E_p(K, p).value); });
  if (q == "ep")
    return per_p([&](double p) { return point_json(width_E_p(K, p).point, K.dim()); });
  if (q == "santalo") return point_json(santalo_point(K).point, K.dim());
  if (q == "Hmin") return centro_affine_curvature(K).min;
  if (q == "Hmax") return centro_affine_curvature(K).max;
  if (q == "delta2_ball") return best_ball_l2(K);
  if (q == "asym_ball") return relative_asymmetry_to_ball(K).value;
  if (q == "dbm_ball") return banach_mazur_to_ball(K).value;
  throw UsageError("unknown quantity: " + q);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string aux_string(const StabilityReport& r) {
  std::string s;
  for (const auto& [k, v] : r.aux) {
    if (!s.empty()) s += ";";
    s += k + "=" + format_double(v);
  }
  if (!r.error.empty()) {
    if (!s.empty()) s += ";";
    s += "error=" + r.error;
  }
  return s;
}

void write_report_csv(std::ostream& out, const std::vector<StabilityReport>& rows) {
  out << "check,body,n,p,lhs,rhs,margin,pass,aux\n";
  for (const auto& r : rows) {
    out << r.check << "," << r.body << "," << r.n << ","
        << (std::isnan(r.p) ? "" : format_double(r.p)) << "," << format_double(r.lhs) << ","
        << format_double(r.rhs) << "," << format_double(r.margin) << ","
        << (r.pass ? "true" : "false") << "," << csv_escape(aux_string(r)) << "\n";
  }
}

json report_json(const std::vector<StabilityReport>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json o;
    o["check"] = r.check;
    o["body"] = r.body;
    o["n"] = r.n;
    if (!std::isnan(r.p)) o["p"] = r.p;
    o["lhs"] = r.lhs;
    o["rhs"] = r.rhs;
    o["margin"] = r.margin;
    o["pass"] = r.pass;
    if (!r.error.empty()) o["error"] = r.error;
    json aux = json::object();
    for (const auto& [k, v] : r.aux) aux[k] = v;
    if (!aux.empty()) o["aux"] = aux;
    arr.push_back(o);
  }
  return arr;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

int cmd_gen(const BodySpec& spec, const std::string& out_path) {
  ConvexBody K = make_body(spec);
  try {
    write_body_file(out_path, K, &spec);
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
  return 0;
}

int cmd_eval(const std::string& in_path, const std::vector<std::string>& quantities,
             const std::vector<double>& ps, const std::vector<int>& res,
             const std::string& out_path) {
  LoadedBody loaded = [&] {
    try {
      return read_body_file(in_path, res);
    } catch (const BodyError&) {
      throw;
    } catch (const std::exception& e) {
      throw IoError(e.what());
    }
  }();
  const ConvexBody& K = loaded.body;
  for (double p : ps)
    if (p < -double(K.dim())) throw UsageError("p below -n");

  json out;
  out["body"] = in_path;
  out["dimension"] = K.dim();
  out["resolution"] = K.grid()->resolution();
  for (const std::string& q : quantities) out[q] = eval_quantity(K, q, ps);

  if (out_path.empty()) {
    std::cout << out.dump(2) << "\n";
  } else {
    open_output(out_path) << out.dump(2) << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& dims, double tol, int threads, const std::string& out_csv,
               const std::string& out_json, bool empty_suite) {
  std::vector<StabilityReport> rows;
  for (int dim : {2, 3}) {
    if (dims != "both" && dims != std::to_string(dim)) continue;
    SuiteConfig cfg = SuiteConfig::defaults(dim);
    cfg.tol = tol;
    cfg.threads = threads;
    auto specs = empty_suite ? std::vector<BodySpec>{} : default_suite(dim);
    for (auto& r : run_suite(specs, cfg)) rows.push_back(std::move(r));
  }
  bool generator_failure = false;
  for (const auto& r : rows)
    if (!r.error.empty() && r.error.rfind("skipped:", 0) != 0) generator_failure = true;

  if (!out_csv.empty()) {
    auto f = open_output(out_csv);
    write_report_csv(f, rows);
  } else {
    write_report_csv(std::cout, rows);
  }
  if (!out_json.empty()) open_output(out_json) << report_json(rows).dump(2) << "\n";

  int mandatory = 0, failed = 0, trend = 0;
  for (const auto& r : rows) {
    if (r.trend() || !r.error.empty()) {
      trend += r.trend();
      continue;
    }
    ++mandatory;
    failed += !r.pass;
  }
  std::cerr << "verify: " << mandatory << " mandatory rows, " << failed << " failed, " << trend
            << " trend rows\n";
  return (failed == 0 && !generator_failure) ? 0 : kExitCheckFailure;
}

int cmd_sweep(const BodySpec& base, const std::string& param, const std::vector<double>& values,
              const std::vector<std::string>& quantities, const std::vector<double>& ps,
              const std::string& out_path) {
  for (const auto& q : quantities)
    if (per_p_quantity(q) && ps.empty()) throw UsageError("quantity '" + q + "' needs --p");

  std::ostringstream csv;
  csv << "family,param,value";
  for (const auto& q : quantities) {
    if (per_p_quantity(q)) {
      for (double p : ps) csv << "," << q << "_p=" << format_double(p);
    } else {
      csv << "," << q;
    }
  }
  csv << ",error\n";

  auto column_count = [&] {
    size_t cols = 0;
    for (const auto& q : quantities) cols += per_p_quantity(q) ? ps.size() : 1;
    return cols;
  }();

  for (double v : values) {
    BodySpec spec = base;
    if (param == "eps") spec.eps = v;
    else if (param == "radius") spec.radius = v;
    else if (param == "degree") spec.degree = static_cast<int>(v);
    else if (param == "seed") spec.seed = static_cast<unsigned>(v);
    else if (param == "decay") spec.decay = v;
    else if (param == "smoothing") spec.smoothing = v;
    else throw UsageError("unknown sweep parameter: " + param);

    csv << spec.family << "," << param << "," << format_double(v);
    std::string error;
    try {
      ConvexBody K = make_body(spec);
      for (const auto& q : quantities) {
        json val = eval_quantity(K, q, ps);
        if (per_p_quantity(q)) {
          for (double p : ps) {
            const json& pv = val.at(format_double(p));
            csv << ","
                << (pv.is_number() ? format_double(pv.get<double>()) : csv_escape(pv.dump()));
          }
        } else if (val.is_number()) {
          csv << "," << format_double(val.get<double>());
        } else {
          csv << "," << csv_escape(val.dump());
        }
      }
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& e) {
      error = e.what();
      for (size_t i = 0; i < column_count; ++i) csv << ",";
    }
    csv << "," << csv_escape(error) << "\n";
  }

  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    open_output(out_path) << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical convex-body functionals and stability checks"};
  app.require_subcommand(1);

  // shared generator flags
  std::string family = "ball";
  int dim = 2;
  double radius = 1.0;
  std::vector<double> axes;
  double eps = 0.1;
  int degree = 3;
  int order = 0;
  double smoothing = 0.0;
  unsigned seed = 1;
  double decay = 3.0;
  std::vector<int> res;

  auto add_gen_flags = [&](CLI::App* c) {
    c->add_option("--family", family, "ball | ellipsoid | harmonic | cap_cut | random");
    c->add_option("--n", dim, "dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
    c->add_option("--r", radius, "ball radius");
    c->add_option("--axes", axes, "ellipsoid matrix, row-major")->delimiter(',');
    c->add_option("--eps", eps, "harmonic amplitude / cap height");
    c->add_option("--degree", degree, "harmonic degree");
    c->add_option("--order", order, "harmonic order (n = 3)");
    c->add_option("--smoothing", smoothing, "cap smoothing (<= 0 -> auto ladder)");
    c->add_option("--seed", seed, "random body seed");
    c->add_option("--decay", decay, "random body spectral decay");
    c->add_option("--res", res, "grid resolution: N (n=2) or L,M (n=3)")->delimiter(',');
  };

  auto* gen = app.add_subcommand("gen", "generate a body file");
  add_gen_flags(gen);
  std::string gen_out;
  gen->add_option("--out", gen_out, "output body file")->required();

  auto* eval = app.add_subcommand("eval", "evaluate functionals of a body file");
  std::string eval_in, eval_out;
  std::vector<std::string> quantities{"volume"};
  std::vector<double> ps;
  std::vector<int> eval_res;
  eval->add_option("--in", eval_in, "input body file")->required();
  eval->add_option("--q", quantities, "quantities to evaluate")->delimiter(',');
  eval->add_option("--p", ps, "exponent list for Rp/Ep/ep")->delimiter(',');
  eval->add_option("--res", eval_res, "resolution override")->delimiter(',');
  eval->add_option("--out", eval_out, "output JSON path (default stdout)");

  auto* verify = app.add_subcommand("verify", "run the stability suite");
  std::string dims = "both", out_csv, out_json;
  double tol = 1e-6;
  int threads = 0;
  bool empty_suite = false;
  verify->add_option("--dims", dims, "2, 3, or both")->check(CLI::IsMember({"2", "3", "both"}));
  verify->add_option("--tol", tol, "relative slack for inequality rows");
  verify->add_option("--threads", threads, "worker threads (0 = auto)");
  verify->add_option("--out-csv", out_csv, "CSV report path (default stdout)");
  verify->add_option("--out-json", out_json, "JSON report path");
  verify->add_flag("--empty-suite", empty_suite, "run with no bodies (header-only report)");

  auto* sweep = app.add_subcommand("sweep", "evaluate quantities along a parameter range");
  add_gen_flags(sweep);
  std::string sweep_param = "eps", sweep_out;
  std::vector<double> sweep_values;
  std::vector<std::string> sweep_q{"volume"};
  std::vector<double> sweep_ps;
  sweep->add_option("--param", sweep_param, "parameter to vary");
  sweep->add_option("--values", sweep_values, "parameter values")->delimiter(',');
  sweep->add_option("--q", sweep_q, "quantities per row")->delimiter(',');
  sweep->add_option("--p", sweep_ps, "exponents for Rp/Ep")->delimiter(',');
  sweep->add_option("--out", sweep_out, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_gen(spec_from_flags(family, dim, radius, axes, eps, degree, order, smoothing,
                                     seed, decay, res),
                     gen_out);
    if (eval->parsed()) return cmd_eval(eval_in, quantities, ps, eval_res, eval_out);
    if (verify->parsed()) return cmd_verify(dims, tol, threads, out_csv, out_json, empty_suite);
    if (sweep->parsed())
      return cmd_sweep(spec_from_flags(family, dim, radius, axes, eps, degree, order, smoothing,
                                       seed, decay, res),
                       sweep_param, sweep_values, sweep_q, sweep_ps, sweep_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const BodyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GridError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
