#include "orthant/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "orthant/geodesic.hpp"
#include "orthant/lcmle.hpp"
#include "orthant/simlab.hpp"

namespace orthant {

namespace {

constexpr const char* kVersion = "orthant 1.0.0 (format 1)";

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpacePtr load_space(const std::string& spec) {
  if (spec.rfind("spider:", 0) == 0 || spec == "t4" || spec == "qp3")
    return OrthantComplex::named(spec);
  if (!spec.empty() && spec.front() == '{')
    return OrthantComplex::from_json_text(spec);
  return OrthantComplex::from_json_text(read_file(spec));
}

// Inline JSON object or the first JSON line of a point file.
Point load_point(const SpacePtr& space, const std::string& spec) {
  if (!spec.empty() && spec.front() == '{')
    return Point::from_json_text(space, spec);
  std::istringstream in(read_file(spec));
  std::string line;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      return Point::from_json_text(space, line);
  throw Error("io-error", "no point found in " + spec);
}

// Sample file: CSV "leg,coord" (spiders) or JSON-lines of points.
std::vector<Point> load_sample(const SpacePtr& space, const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<Point> out;
  std::string line;
  bool first = true;
  bool csv = false;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      csv = line.front() != '{';
      if (csv) {
        if (line != "leg,coord")
          throw Error("bad-parameter",
                      "sample CSV must start with a 'leg,coord' header");
        continue;
      }
    }
    if (!csv) {
      out.push_back(Point::from_json_text(space, line));
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error("bad-parameter", "malformed sample row: " + line);
    int leg = std::stoi(line.substr(0, comma));
    double coord = std::stod(line.substr(comma + 1));
    out.push_back(coord == 0.0
                      ? Point::origin(space)
                      : Point::make_indexed(space, {{leg, coord}}));
  }
  if (out.empty()) throw Error("empty-sample", "sample file has no rows");
  return out;
}

json number_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const json& j, const std::string& out_path) {
  std::string text = j.dump();
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error("io-error", "cannot write " + out_path);
    out << text << "\n";
  }
}

json psi_to_json(const SpiderConcaveFn& psi) {
  json legs = json::array();
  for (const auto& leg : psi.legs) {
    json knots = json::array();
    for (const auto& [u, v] : leg.knots) knots.push_back({u, v});
    json l;
    l["knots"] = knots;
    l["final_slope"] = number_or_null(leg.final_slope);
    if (leg.domain_end) l["domain_end"] = *leg.domain_end;
    if (leg.domain_start > 0.0) l["domain_start"] = leg.domain_start;
    legs.push_back(std::move(l));
  }
  json j;
  j["origin_value"] = number_or_null(psi.origin_value);
  j["legs"] = std::move(legs);
  return j;
}

DensitySpec parse_truth(const SpacePtr& space, const json& j) {
  if (j.is_string()) {
    std::string name = j.get<std::string>();
    if (name == "f1") return f1_density(space);
    if (name == "f2") return f2_density(space);
    throw Error("bad-parameter", "unknown truth density: " + name);
  }
  if (j.contains("gaussian")) {
    const json& g = j.at("gaussian");
    std::map<std::string, double> coords;
    for (auto it = g.at("center").begin(); it != g.at("center").end(); ++it)
      coords[it.key()] = it.value().get<double>();
    return DensitySpec::gaussian(Point::make(space, coords),
                                 g.at("sigma").get<double>());
  }
  if (j.contains("mixture")) {
    std::vector<std::pair<double, DensitySpec>> parts;
    for (const auto& item : j.at("mixture"))
      parts.emplace_back(item.at(0).get<double>(),
                         parse_truth(space, item.at(1)));
    return DensitySpec::mixture(std::move(parts));
  }
  throw Error("bad-parameter", "unrecognized truth density spec");
}

Point parse_point(const SpacePtr& space, const json& j) {
  std::map<std::string, double> coords;
  const json& m = j.contains("coords") ? j.at("coords") : j;
  for (auto it = m.begin(); it != m.end(); ++it)
    coords[it.key()] = it.value().get<double>();
  return Point::make(space, coords);
}

int run_experiment(const std::string& config_path, int jobs, double tol) {
  json j = json::parse(read_file(config_path));
  ExperimentConfig cfg;
  cfg.space = load_space(j.at("space").get<std::string>());
  cfg.truth = parse_truth(cfg.space, j.at("truth"));
  cfg.jobs = jobs;
  cfg.tol = j.value("tol", tol);
  cfg.n = j.value("n", 1L);
  cfg.replicates = j.value("replicates", 1);
  cfg.h = j.value("h", 0.1);
  cfg.seed = j.value("seed", 0ULL);
  cfg.grid_points = j.value("grid_points", 200);
  cfg.grid_max = j.value("grid_max", 2.5);
  if (j.contains("kernels")) {
    cfg.kernels.clear();
    for (const auto& k : j.at("kernels"))
      cfg.kernels.push_back(kernel_from_string(k.get<std::string>()));
  }
  if (j.contains("eval_points")) {
    for (const auto& p : j.at("eval_points"))
      cfg.eval_points.push_back(parse_point(cfg.space, p));
  }
  if (j.contains("n_schedule"))
    cfg.n_schedule = j.at("n_schedule").get<std::vector<long>>();
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    cfg.bias_csv = o.value("bias", "");
    cfg.overlay_csv = o.value("overlay", "");
    cfg.tv_csv = o.value("tv", "");
  }

  std::string kind = j.value("kind", "bias");
  json summary;
  summary["kind"] = kind;
  summary["tol"] = cfg.tol;
  summary["seed"] = cfg.seed;
  if (kind == "bias") {
    BiasReport report = run_bias_experiment(cfg);
    json cells = json::array();
    for (const auto& c : report.cells) {
      json cell;
      cell["kernel"] = to_string(c.kernel);
      cell["eval_point"] = point_label(c.eval_point);
      cell["truth"] = c.truth;
      cell["mean_bias"] = c.mean_bias;
      cell["std_error"] = c.std_error;
      cells.push_back(std::move(cell));
    }
    summary["h"] = cfg.h;
    summary["cells"] = std::move(cells);
  } else if (kind == "lcmle") {
    LcmleReport report = run_lcmle_experiment(cfg);
    json tv = json::array();
    for (const auto& row : report.tv)
      tv.push_back({{"n", row.n}, {"seed", row.seed}, {"tv", row.tv}});
    summary["tv"] = std::move(tv);
  } else {
    throw Error("bad-parameter", "experiment kind must be bias or lcmle");
  }
  std::cout << summary.dump() << "\n";
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"density estimation on CAT(0) orthant spaces"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  double tol = 1e-8;
  app.add_option("--tol", tol, "quadrature/optimizer tolerance")
      ->capture_default_str();

  std::string space_spec, from_spec, to_spec, sample_path, out_path;
  std::string kernel_name = "k1", grid_spec = "200:2.5", config_path;
  double h = 0.1;
  int jobs = 1;

  auto* check = app.add_subcommand("check-space",
                                   "validate a complex and report CAT(0) status");
  check->add_option("--space", space_spec, "builtin name, JSON, or file")
      ->required();

  auto* dist = app.add_subcommand("distance", "geodesic distance between points");
  dist->add_option("--space", space_spec)->required();
  dist->add_option("--from", from_spec, "point JSON or file")->required();
  dist->add_option("--to", to_spec, "point JSON or file")->required();

  auto* kde = app.add_subcommand("kde", "kernel density estimate on a grid");
  kde->set_help_flag("--help", "print help");  // frees -h for the bandwidth
  kde->add_option("--space", space_spec)->required();
  kde->add_option("--sample", sample_path, "CSV (leg,coord) or JSON-lines")
      ->required();
  kde->add_option("--kernel", kernel_name, "k1 or k2");
  kde->add_option("--h", h, "bandwidth")->required();
  kde->add_option("--grid", grid_spec, "points:max, per-leg grid");
  kde->add_option("--out", out_path, "output CSV (default stdout)");
  bool renormalize = false;
  kde->add_flag("--renormalize", renormalize,
                "rescale so the estimate integrates to one (K2 does not "
                "integrate to one by construction)");

  auto* lc = app.add_subcommand("lcmle", "log-concave MLE on a spider");
  lc->add_option("--space", space_spec)->required();
  lc->add_option("--sample", sample_path)->required();
  lc->add_option("--out", out_path, "output JSON (default stdout)");

  auto* exp = app.add_subcommand("experiment", "replicated simulation study");
  exp->add_option("--config", config_path, "JSON config")->required();
  exp->add_option("--jobs", jobs, "parallel replicates")
      ->capture_default_str();

  // Lets --tol appear after the subcommand name.
  for (CLI::App* sub : {check, dist, kde, lc, exp}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    if (check->parsed()) {
      SpacePtr space = load_space(space_spec);
      json j;
      j["flag"] = space->is_flag();
      j["dimension"] = space->dimension();
      j["axes"] = space->axis_count();
      j["tol"] = tol;
      std::cout << j.dump() << "\n";
      return 0;
    }
    if (dist->parsed()) {
      SpacePtr space = load_space(space_spec);
      Point a = load_point(space, from_spec);
      Point b = load_point(space, to_spec);
      GeodesicResult r = distance(a, b);
      json j;
      j["distance"] = r.distance;
      j["kind"] = to_string(r.kind);
      j["tol"] = tol;
      if (r.witness) {
        auto names = [&](const Face& f) {
          std::vector<std::string> out;
          for (int i : f) out.push_back(space->axis_name(i));
          return out;
        };
        json w;
        w["common"] = names(r.witness->common);
        json ap = json::array(), bp = json::array();
        for (const auto& part : r.witness->a_parts) ap.push_back(names(part));
        for (const auto& part : r.witness->b_parts) bp.push_back(names(part));
        w["a_parts"] = std::move(ap);
        w["b_parts"] = std::move(bp);
        j["witness"] = std::move(w);
      }
      std::cout << j.dump() << "\n";
      return 0;
    }
    if (kde->parsed()) {
      SpacePtr space = load_space(space_spec);
      if (!space->is_spider())
        throw Error("bad-parameter", "grid evaluation is implemented on spiders");
      std::vector<Point> sample = load_sample(space, sample_path);
      KernelKind kind = kernel_from_string(kernel_name);
      auto colon = grid_spec.find(':');
      if (colon == std::string::npos)
        throw Error("bad-parameter", "grid spec must be points:max");
      int npts = std::stoi(grid_spec.substr(0, colon));
      double gmax = std::stod(grid_spec.substr(colon + 1));
      if (npts < 2 || !(gmax > 0.0))
        throw Error("bad-parameter", "grid needs >= 2 points and max > 0");

      KdeEstimator est(sample, h, kind, tol);
      double scale = 1.0;
      if (renormalize) {
        DensitySpec spec = DensitySpec::kde(sample, h, kind);
        double mass = integrate(
            space, [&](const Point& p) { return est(p); },
            BorelBoxSet::cube(*space, spec.extent()), tol);
        scale = 1.0 / mass;
      }
      std::ostringstream out;
      out << "orthant,coord,density\n";
      for (int leg = 0; leg < space->axis_count(); ++leg) {
        for (int i = 0; i < npts; ++i) {
          double u = gmax * i / (npts - 1);
          Point x = u == 0.0 ? Point::origin(space)
                             : Point::make_indexed(space, {{leg, u}});
          out << leg << ',' << fmt(u) << ',' << fmt(scale * est(x)) << '\n';
        }
      }
      if (out_path.empty()) {
        std::cout << out.str();
      } else {
        std::ofstream f(out_path);
        if (!f) throw Error("io-error", "cannot write " + out_path);
        f << out.str();
      }
      return 0;
    }
    if (lc->parsed()) {
      SpacePtr space = load_space(space_spec);
      if (!space->is_spider())
        throw Error("bad-parameter", "log-concave MLE requires a spider space");
      std::vector<Point> sample = load_sample(space, sample_path);
      FitOptions opts;
      opts.tol = std::min(opts.tol, tol);
      FitResult res = fit(sample, opts);
      json j = psi_to_json(res.psi);
      j["objective"] = res.objective;
      j["integral"] = res.integral;
      j["iterations"] = res.iterations;
      j["converged"] = res.converged;
      j["tol"] = tol;
      emit(j, out_path);
      return 0;
    }
    if (exp->parsed()) return run_experiment(config_path, jobs, tol);
  } catch (const Error& e) {
    std::cerr << json{{"error", e.code()}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump()
              << "\n";
    return 1;
  }
  return 2;
}

}  // namespace orthant
