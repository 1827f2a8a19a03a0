#include "amwu/harness/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "amwu/errors.hpp"
#include "amwu/harness/report.hpp"

namespace amwu::harness {

using nlohmann::json;

Trace run_algorithm(const ExperimentConfig& cfg, const std::string& algorithm, bool keep_points) {
  const auto obj = corpus_objective(cfg.objective);
  RunConfig rc;
  rc.max_iters = cfg.max_iters;
  rc.grad_tol = cfg.grad_tol;
  rc.trace_every = cfg.trace_every;
  rc.keep_points = keep_points;
  return run(parse_algorithm(algorithm, cfg), obj, starting_point(cfg), starting_aux(cfg), rc);
}

std::string file_stem(const ExperimentConfig& cfg, const std::string& algorithm) {
  std::string a = algorithm;
  if (const auto pos = a.find(':'); pos != std::string::npos) a = a.substr(0, pos) + "_r" + a.substr(pos + 1);
  return cfg.objective + "_" + a;
}

json sidecar(const ExperimentConfig& cfg, const std::string& algorithm, const Trace& trace) {
  const json embedded = to_json(cfg, true);
  json j;
  j["config"] = embedded;
  j["algorithm"] = algorithm;
  j["label"] = trace.label;
  j["content_hash"] = git_blob_hash(embedded.dump() + "\n" + algorithm);
  j["records"] = trace.records.size();
  j["stopped_by_tolerance"] = trace.stopped_by_tolerance;
  j["warnings"] = trace.warnings;
  j["schedule_trace"] = schedule_trace_json(trace);
  return j;
}

RunResult cli_run(const ExperimentConfig& cfg) {
  RunResult res;
  res.warnings = validate(cfg);
  const auto shape = corpus_objective(cfg.objective).shape();
  std::vector<Series> series;
  for (const auto& a : cfg.algorithms) {
    RunOutput out{a, run_algorithm(cfg, a), {}, {}};
    const std::string stem = cfg.out_dir + "/" + file_stem(cfg, a);
    out.csv_path = stem + ".csv";
    out.sidecar_path = stem + ".json";
    write_file(out.csv_path, trace_csv(out.trace, shape));
    write_file(out.sidecar_path, sidecar(cfg, a, out.trace).dump(2) + "\n");
    for (const auto& w : out.trace.warnings) res.warnings.push_back(a + ": " + w);

    Series s;
    s.label = a;
    for (const auto& r : out.trace.records) {
      s.t.push_back(static_cast<double>(r.t));
      s.f.push_back(r.f_value);
      if (r.x) s.points.push_back(r.x->flatten());
    }
    series.push_back(std::move(s));
    res.runs.push_back(std::move(out));
  }
  if (cfg.svg) {
    res.svg_path = cfg.out_dir + "/" + cfg.objective + ".svg";
    write_file(res.svg_path, svg_chart(cfg.objective, series, to_json(cfg, true).dump()));
  }
  return res;
}

double smoothness(const Trace& trace) {
  const auto& r = trace.records;
  if (r.size() < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double d = r[i].f_value - r[i - 1].f_value;
    acc += d * d;
  }
  return acc / static_cast<double>(r.size() - 1);
}

CompareTable cli_compare(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<Trace> traces;
  for (const auto& a : cfg.algorithms) traces.push_back(run_algorithm(cfg, a, false));

  CompareTable table;
  if (cfg.threshold) {
    table.threshold = *cfg.threshold;
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : traces) best = std::min(best, t.records.back().f_value);
    table.threshold = best + 1e-6 * std::max(1.0, std::abs(best));
  }
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto& t = traces[k];
    CompareRow row;
    row.algorithm = cfg.algorithms[k];
    row.final_f = t.records.back().f_value;
    row.final_grad_norm = t.records.back().grad_norm;
    row.smoothness = smoothness(t);
    for (const auto& r : t.records) {
      if (r.f_value <= table.threshold) {
        row.first_below = r.t;
        break;
      }
    }
    table.rows.push_back(row);
  }
  return table;
}

std::string format_table(const CompareTable& table) {
  std::string out = fmt::format("threshold {:.10g}\n", table.threshold);
  out += fmt::format("{:<14} {:>22} {:>14} {:>12} {:>14}\n", "algorithm", "final_f", "grad_norm", "first_below",
                     "smoothness");
  for (const auto& r : table.rows) {
    out += fmt::format("{:<14} {:>22.15g} {:>14.6g} {:>12} {:>14.6g}\n", r.algorithm, r.final_f, r.final_grad_norm,
                       r.first_below ? std::to_string(*r.first_below) : std::string("never"), r.smoothness);
  }
  return out;
}

std::string compare_csv(const CompareTable& table) {
  std::string out = "algorithm,final_f,final_grad_norm,first_below,smoothness,threshold\n";
  for (const auto& r : table.rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.algorithm, num(r.final_f), num(r.final_grad_norm),
                       r.first_below ? std::to_string(*r.first_below) : std::string(), num(r.smoothness),
                       num(table.threshold));
  }
  return out;
}

std::vector<CriticalPointEntry> catalog(const Objective& obj, int grid) {
  return find_critical_points(obj, simplex_grid(obj.shape(), grid)).entries;
}

long nearest_entry(const std::vector<CriticalPointEntry>& entries, const ProductPoint& p, double* distance) {
  long best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double d = max_abs_difference(entries[i].point, p);
    if (d < bd) {
      bd = d;
      best = static_cast<long>(i);
    }
  }
  if (distance) *distance = bd;
  return best;
}

namespace {

std::mt19937_64 trial_rng(unsigned long long seed, long trial) {
  const auto t = static_cast<unsigned long long>(trial);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
  return std::mt19937_64(seq);
}

Vector sample_start(std::mt19937_64& rng, const ProductPoint& center, double radius) {
  const Matrix b = metric_orthonormal_basis(center);
  const Vector c = center.flatten();
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01;
  const double m = static_cast<double>(b.cols());
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Vector xi(b.cols());
    for (Index i = 0; i < xi.size(); ++i) xi[i] = n01(rng);
    xi *= radius * std::pow(u01(rng), 1.0 / m) / xi.norm();
    const Vector p = c + b * xi;
    if (p.minCoeff() > 0.0) return p;
  }
  throw NonConvergence("avoidance: could not sample an interior start");
}

}  // namespace

AvoidanceReport cli_avoidance(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto obj = corpus_objective(cfg.objective);
  AvoidanceReport rep;
  rep.catalog = catalog(obj, cfg.avoidance.grid);
  std::vector<std::size_t> saddles;
  for (std::size_t i = 0; i < rep.catalog.size(); ++i) {
    if (rep.catalog[i].classification == Classification::strict_saddle) saddles.push_back(i);
  }
  if (saddles.empty()) throw NoSaddleFound("no strict saddle found for " + cfg.objective);

  const AlgorithmSpec algo = parse_algorithm("amwu", cfg);
  RunConfig rc;
  rc.max_iters = cfg.max_iters;
  rc.grad_tol = cfg.grad_tol;
  rc.trace_every = std::max<long>(1, cfg.max_iters);
  rc.keep_points = false;

  rep.trials = cfg.avoidance.trials;
  rep.per_trial.resize(static_cast<std::size_t>(rep.trials));
  std::atomic<long> next{0};
  auto worker = [&] {
    for (long k = next++; k < rep.trials; k = next++) {
      AvoidanceTrial tr;
      tr.trial = k;
      tr.saddle = saddles[static_cast<std::size_t>(k) % saddles.size()];
      auto rng = trial_rng(cfg.seed, k);
      const auto& center = rep.catalog[tr.saddle].point;
      tr.start = sample_start(rng, center, cfg.avoidance.radius);
      try {
        const auto trace = run(algo, obj, ProductPoint::from_flat(tr.start, obj.shape()), std::nullopt, rc);
        tr.final_point = trace.final_x.flatten();
        tr.final_grad_norm = riemannian_gradient_norm(obj, trace.final_x);
        tr.nearest = nearest_entry(rep.catalog, trace.final_x, &tr.nearest_distance);
        tr.nearest_lambda_min = rep.catalog[static_cast<std::size_t>(tr.nearest)].lambda_min();
        if (tr.nearest_distance <= cfg.avoidance.classify_radius) {
          switch (rep.catalog[static_cast<std::size_t>(tr.nearest)].classification) {
            case Classification::strict_saddle: tr.outcome = "saddle"; break;
            case Classification::min: tr.outcome = "min"; break;
            default: tr.outcome = "other";
          }
        } else {
          tr.outcome = "nonconverged";
        }
      } catch (const std::exception& e) {
        tr.outcome = "nonconverged";
        tr.error = e.what();
      }
      rep.per_trial[static_cast<std::size_t>(k)] = std::move(tr);
    }
  };
  const int nt = std::max(1, std::min<int>(cfg.avoidance.threads, static_cast<int>(std::max<long>(1, rep.trials))));
  std::vector<std::thread> pool;
  for (int i = 1; i < nt; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& t : rep.per_trial) {
    if (t.outcome == "saddle") ++rep.converged_to_saddle;
    else if (t.outcome == "min") ++rep.converged_to_min;
    else if (t.outcome == "other") ++rep.converged_to_other;
    else ++rep.nonconverged;
  }
  return rep;
}

namespace {

json vec_json(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

json to_json(const AvoidanceReport& rep, const ExperimentConfig& cfg) {
  json j;
  j["config"] = to_json(cfg, true);
  j["algorithm"] = parse_algorithm("amwu", cfg).label();
  j["trials"] = rep.trials;
  j["converged_to_saddle"] = rep.converged_to_saddle;
  j["converged_to_min"] = rep.converged_to_min;
  j["converged_to_other"] = rep.converged_to_other;
  j["nonconverged"] = rep.nonconverged;
  json cat = json::array();
  for (const auto& e : rep.catalog) {
    cat.push_back({{"point", vec_json(e.point.flatten())},
                   {"classification", to_string(e.classification)},
                   {"hessian_eigs", e.hessian_eigs}});
  }
  j["catalog"] = cat;
  json trials = json::array();
  for (const auto& t : rep.per_trial) {
    json r{{"trial", t.trial},
           {"saddle", t.saddle},
           {"start", vec_json(t.start)},
           {"final_point", vec_json(t.final_point)},
           {"final_grad_norm", t.final_grad_norm},
           {"nearest", t.nearest},
           {"nearest_distance", t.nearest_distance},
           {"nearest_lambda_min", t.nearest_lambda_min},
           {"outcome", t.outcome}};
    if (!t.error.empty()) r["error"] = t.error;
    trials.push_back(r);
  }
  j["per_trial"] = trials;
  return j;
}

SpectraReport cli_spectra(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto obj = corpus_objective(cfg.objective);
  SpectraReport rep;
  rep.shape = obj.shape();
  const auto entries = catalog(obj, cfg.avoidance.grid);
  const ScheduleParams p = schedule_params(cfg).front();
  const auto coeffs = stationary_coefficients(p);
  const bool admissible = p.alpha < admissible_step_bound(p.beta, p.mu, p.lipschitz).bound;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.classification != Classification::strict_saddle) continue;
    SpectraRow row;
    row.index = i;
    row.point = e.point.flatten();
    const auto cert = certify_unstable(e, coeffs);
    row.lambda_min = cert.lambda_min;
    row.chart_lambda_min = step_chart_eigs(obj, e.point).front();
    row.factor = cert.factor;
    row.max_eig = cert.max_eig;
    row.unstable = cert.unstable;
    row.sufficient_inequality = cert.sufficient_inequality;
    row.c_positive = cert.c_positive;
    row.admissible = admissible;
    row.jacobian_deviation = numerical_jacobian_check(obj, e.point, coeffs).deviation;
    rep.rows.push_back(std::move(row));
  }
  if (rep.rows.empty()) rep.warnings.push_back("no strict saddle found for " + cfg.objective);
  if (!admissible) rep.warnings.push_back("alpha is not below the step bound");
  return rep;
}

std::string spectra_csv(const SpectraReport& rep) {
  std::string out = "saddle";
  for (std::size_t b = 0; b < rep.shape.size(); ++b) {
    for (Index i = 0; i < rep.shape[b]; ++i) out += fmt::format(",x{}_{}", b, i);
  }
  out += ",lambda_min,chart_lambda_min,b_d,c_d,discriminant,max_eig,unstable,sufficient_inequality,c_positive,"
         "admissible,jacobian_deviation\n";
  for (const auto& r : rep.rows) {
    out += std::to_string(r.index);
    for (Index i = 0; i < r.point.size(); ++i) out += "," + num(r.point[i]);
    out += fmt::format(",{},{},{},{},{},{},{},{},{},{},{}\n", num(r.lambda_min), num(r.chart_lambda_min),
                       num(r.factor.b), num(r.factor.c), num(r.factor.discriminant), num(r.max_eig), r.unstable,
                       r.sufficient_inequality, r.c_positive, r.admissible, num(r.jacobian_deviation));
  }
  return out;
}

EscapeResult escape_iteration(const Trace& trace, const std::vector<CriticalPointEntry>& entries, double radius,
                              double factor) {
  EscapeResult res;
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].classification != Classification::strict_saddle) continue;
    for (const auto& r : trace.records) {
      if (!r.x) throw InvalidArgument("escape_iteration: trace has no points");
      const double d = max_abs_difference(entries[i].point, *r.x);
      if (d < closest) {
        closest = d;
        res.saddle = i;
      }
    }
  }
  res.closest = closest;
  if (!res.saddle || closest > radius) {
    res.saddle.reset();
    return res;
  }
  const auto& s = entries[*res.saddle].point;
  double running = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) {
    if (max_abs_difference(s, *r.x) <= radius) {
      if (!res.entered) res.entered = r.t;
      running = std::min(running, r.grad_norm);
    } else if (res.entered && r.grad_norm > factor * running) {
      res.escaped = r.t;
      break;
    }
  }
  res.min_grad = running;
  return res;
}

}  // namespace amwu::harness
