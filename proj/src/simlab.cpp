#include "orthant/simlab.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

namespace orthant {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error("bad-parameter", what);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("io-error", "cannot write " + path);
  return out;
}

// Runs tasks 0..count-1 with at most `jobs` in flight; results land in a
// caller-indexed vector, so execution order does not matter.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> wave;
  for (int base = 0; base < count; base += jobs) {
    int top = std::min(count, base + jobs);
    for (int i = base; i < top; ++i)
      wave.push_back(std::async(std::launch::async, fn, i));
    for (auto& f : wave) f.get();
    wave.clear();
  }
}

}  // namespace

DensitySpec f1_density(SpacePtr spider) {
  Point x0 = Point::make_indexed(spider, {{0, 0.5}});
  return DensitySpec::gaussian(x0, 0.5);
}

DensitySpec f2_density(SpacePtr spider) {
  Point a = Point::make_indexed(spider, {{0, 0.6}});
  Point b = Point::make_indexed(spider, {{1, 0.6}});
  return DensitySpec::mixture({{0.5, DensitySpec::gaussian(a, 0.4)},
                               {0.5, DensitySpec::gaussian(b, 0.4)}});
}

std::string point_label(const Point& x) {
  if (x.is_origin()) return "origin";
  if (x.space()->is_spider()) {
    const auto& [leg, u] = x.coords()[0];
    return std::to_string(leg) + ":" + fmt(u);
  }
  std::string s;
  for (const auto& [idx, v] : x.coords()) {
    if (!s.empty()) s += ';';
    s += x.space()->axis_name(idx) + "=" + fmt(v);
  }
  return s;
}

BiasReport run_bias_experiment(const ExperimentConfig& cfg) {
  require(cfg.n >= 1, "sample size must be >= 1");
  require(cfg.replicates >= 1, "replicates must be >= 1");
  require(cfg.h > 0.0, "bandwidth must be > 0");
  require(!cfg.kernels.empty(), "at least one kernel required");
  require(!cfg.eval_points.empty(), "at least one eval point required");

  const std::size_t cells_per_rep = cfg.kernels.size() * cfg.eval_points.size();
  std::vector<std::vector<double>> values(
      cfg.replicates, std::vector<double>(cells_per_rep, 0.0));

  parallel_for(cfg.replicates, cfg.jobs, [&](int r) {
    uint64_t rep_seed = cfg.seed ^ static_cast<uint64_t>(r);
    std::vector<Point> sample = cfg.truth.sample(cfg.n, rep_seed);
    std::size_t cell = 0;
    for (KernelKind kind : cfg.kernels) {
      KdeEstimator est(sample, cfg.h, kind, cfg.tol);
      for (const auto& x : cfg.eval_points) values[r][cell++] = est(x);
    }
  });

  BiasReport report;
  std::size_t cell = 0;
  for (KernelKind kind : cfg.kernels) {
    for (const auto& x : cfg.eval_points) {
      BiasReport::Cell c{kind, x, cfg.truth(x)};
      double sum = 0.0;
      for (int r = 0; r < cfg.replicates; ++r) {
        c.estimates.push_back(values[r][cell]);
        sum += values[r][cell] - c.truth;
      }
      c.mean_bias = sum / cfg.replicates;
      if (cfg.replicates > 1) {
        double ss = 0.0;
        for (double e : c.estimates) {
          double d = (e - c.truth) - c.mean_bias;
          ss += d * d;
        }
        c.std_error = std::sqrt(ss / (cfg.replicates - 1)) /
                      std::sqrt(static_cast<double>(cfg.replicates));
      }
      report.cells.push_back(std::move(c));
      ++cell;
    }
  }
  if (!cfg.bias_csv.empty()) write_bias_csv(report, cfg.bias_csv);
  return report;
}

std::vector<SweepRow> exact_bias_sweep(const DensitySpec& truth,
                                       const Point& x,
                                       const std::vector<double>& hs,
                                       const std::vector<KernelKind>& kernels,
                                       double tol) {
  std::vector<SweepRow> rows;
  double fx = truth(x);
  for (KernelKind kind : kernels) {
    for (double h : hs) {
      SweepRow row;
      row.kernel = kind;
      row.h = h;
      row.smoothed = smoothed_density(truth, x, h, kind, tol);
      row.truth = fx;
      row.bias = row.smoothed - fx;
      rows.push_back(row);
    }
  }
  return rows;
}

LcmleReport run_lcmle_experiment(const ExperimentConfig& cfg) {
  require(cfg.replicates >= 1, "replicates must be >= 1");
  require(cfg.space->is_spider(), "LCMLE experiments run on spiders");
  require(cfg.grid_points >= 2, "overlay grid needs >= 2 points");
  std::vector<long> schedule = cfg.n_schedule;
  if (schedule.empty()) schedule = {cfg.n};
  for (long n : schedule) require(n >= 2, "schedule sizes must be >= 2");

  struct Task {
    long n;
    uint64_t seed;
  };
  std::vector<Task> tasks;
  for (long n : schedule)
    for (int s = 0; s < cfg.replicates; ++s)
      tasks.push_back({n, cfg.seed + static_cast<uint64_t>(s)});

  std::vector<double> tvs(tasks.size(), 0.0);
  std::vector<SpiderConcaveFn> firsts(schedule.size());

  parallel_for(static_cast<int>(tasks.size()), cfg.jobs, [&](int i) {
    const Task& t = tasks[i];
    std::vector<Point> sample = cfg.truth.sample(t.n, t.seed);
    FitOptions opts;
    FitResult res = fit(sample, opts);
    DensitySpec fitted = DensitySpec::fitted(cfg.space, res.psi);
    tvs[i] = tv_distance(fitted, cfg.truth, cfg.tol);
    if (t.seed == cfg.seed) {
      std::size_t which = static_cast<std::size_t>(i) / cfg.replicates;
      firsts[which] = res.psi;
    }
  });

  LcmleReport report;
  for (std::size_t i = 0; i < tasks.size(); ++i)
    report.tv.push_back({tasks[i].n, tasks[i].seed, tvs[i]});

  for (std::size_t w = 0; w < schedule.size(); ++w) {
    DensitySpec fitted = DensitySpec::fitted(cfg.space, firsts[w]);
    std::string method = "lcmle-n" + std::to_string(schedule[w]);
    for (int leg = 0; leg < cfg.space->axis_count(); ++leg) {
      for (int i = 0; i < cfg.grid_points; ++i) {
        double u = cfg.grid_max * i / (cfg.grid_points - 1);
        Point x = u == 0.0 ? Point::origin(cfg.space)
                           : Point::make_indexed(cfg.space, {{leg, u}});
        report.overlay.push_back(
            {leg, u, cfg.truth(x), fitted(x), method});
      }
    }
  }

  if (!cfg.tv_csv.empty()) write_tv_csv(report, cfg.tv_csv);
  if (!cfg.overlay_csv.empty()) write_overlay_csv(report, cfg.overlay_csv);
  return report;
}

void write_bias_csv(const BiasReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "kernel,eval_point,replicate,estimate,truth,bias\n";
  for (const auto& c : report.cells) {
    for (std::size_t r = 0; r < c.estimates.size(); ++r) {
      out << to_string(c.kernel) << ',' << point_label(c.eval_point) << ','
          << r << ',' << fmt(c.estimates[r]) << ',' << fmt(c.truth) << ','
          << fmt(c.estimates[r] - c.truth) << '\n';
    }
  }
}

void write_overlay_csv(const LcmleReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "orthant,coord,truth,estimate,method\n";
  for (const auto& row : report.overlay) {
    out << row.orthant << ',' << fmt(row.coord) << ',' << fmt(row.truth) << ','
        << fmt(row.estimate) << ',' << row.method << '\n';
  }
}

void write_tv_csv(const LcmleReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "N,seed,tv\n";
  for (const auto& row : report.tv)
    out << row.n << ',' << row.seed << ',' << fmt(row.tv) << '\n';
}

}  // namespace orthant
