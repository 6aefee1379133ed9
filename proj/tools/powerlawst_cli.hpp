#pragma once

// Command-line front end. dispatch() is separate from main() so tests can drive it.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "powerlawst/config.hpp"
#include "powerlawst/core_model.hpp"
#include "powerlawst/crosstalk.hpp"
#include "powerlawst/echo.hpp"
#include "powerlawst/eldredge.hpp"
#include "powerlawst/qsim.hpp"
#include "powerlawst/tran_hybrid.hpp"

namespace powerlawst::cli {

using nlohmann::json;

/// Doubles are emitted with 12 significant digits.
inline double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline std::string fmt12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// JSON number, or null for non-finite values.
inline json num(double v) { return std::isfinite(v) ? json(round12(v)) : json(nullptr); }

struct RunConfig {
  double alpha = 3.0;
  int d = 2;
  long r = 10;
  long rmax = 5000;
  double r0 = 2.0;
  long n = 4;
  double eps = 1.0;
  std::string convention = "published";
  std::string emit = "json";
  std::string emit_events;
  std::string out;
  double T = 1.0;
  std::vector<long> extents;
  double prefactor = 1.0;
  long source = 0;
  double a = 1.0 / std::numbers::sqrt2;
  double b = 1.0 / std::numbers::sqrt2;
  long r1 = 2;
  long m = 2;
  long L = 1;
  std::string norm = "sum";
  std::string base = "transfer";
  long fit_lo = 60;
  long fit_hi = 110;
  unsigned threads = 0;

  [[nodiscard]] CouplingModel model() const {
    CouplingModel c{alpha, prefactor};
    c.validate();
    return c;
  }
};

/// Applies a JSON config document; unknown keys are rejected.
inline void apply_config(RunConfig& c, const json& j) {
  reject_unknown_keys(j, {"alpha", "d",     "r",       "rmax",      "r0",     "n",      "eps",    "convention",
                          "emit",  "out",   "T",       "extents",   "prefactor", "source", "a",   "b",
                          "r1",    "m",     "L",       "norm",      "base",   "fit_lo", "fit_hi", "threads"});
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("alpha", c.alpha);
    get("d", c.d);
    get("r", c.r);
    get("rmax", c.rmax);
    get("r0", c.r0);
    get("n", c.n);
    get("eps", c.eps);
    get("convention", c.convention);
    get("emit", c.emit);
    get("out", c.out);
    get("T", c.T);
    get("extents", c.extents);
    get("prefactor", c.prefactor);
    get("source", c.source);
    get("a", c.a);
    get("b", c.b);
    get("r1", c.r1);
    get("m", c.m);
    get("L", c.L);
    get("norm", c.norm);
    get("base", c.base);
    get("fit_lo", c.fit_lo);
    get("fit_hi", c.fit_hi);
    get("threads", c.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad configuration value: ") + e.what());
  }
}

inline Convention parse_convention(const std::string& s) {
  if (s == "published") return Convention::kPublished;
  if (s == "draft") return Convention::kDraft;
  throw ConfigError("convention must be 'published' or 'draft'");
}

inline NormModel parse_norm(const std::string& s) {
  if (s == "sum") return NormModel::kLatticeSum;
  if (s == "bound") return NormModel::kClosedFormBound;
  throw ConfigError("norm must be 'sum' or 'bound'");
}

inline BaseConvention parse_base(const std::string& s) {
  if (s == "transfer") return BaseConvention::kStateTransfer;
  if (s == "ghz") return BaseConvention::kGhzCreation;
  throw ConfigError("base must be 'transfer' or 'ghz'");
}

/// Exact Eldredge runs, cached on disk under $POWERLAWST_CACHE when set.
inline std::map<long, double> cached_exact_series(long r_lo, long r_hi, int d, const CouplingModel& model,
                                                  unsigned threads) {
  const char* dir = std::getenv("POWERLAWST_CACHE");
  std::filesystem::path file;
  std::map<long, double> have;
  if (dir != nullptr && *dir != '\0') {
    char name[128];
    std::snprintf(name, sizeof name, "eldredge_d%d_alpha%.12g_pref%.12g.json", d, model.alpha, model.prefactor);
    file = std::filesystem::path(dir) / name;
    std::ifstream in(file);
    if (in) {
      try {
        const json j = json::parse(in);
        for (const auto& [k, v] : j.at("times").items()) have[std::stol(k)] = v.get<double>();
      } catch (const std::exception&) {
        have.clear();  // unreadable cache is recomputed
      }
    }
  }
  long missing_lo = 0, missing_hi = -1;
  for (long r = r_lo; r <= r_hi; ++r) {
    if (!have.count(r)) {
      if (missing_hi < missing_lo) missing_lo = r;
      missing_hi = r;
    }
  }
  if (missing_hi >= missing_lo) {
    for (const auto& [r, t] : exact_series(missing_lo, missing_hi, d, model, threads)) have[r] = t;
    if (!file.empty()) {
      std::filesystem::create_directories(file.parent_path());
      json j;
      j["d"] = d;
      j["alpha"] = model.alpha;
      j["prefactor"] = model.prefactor;
      for (const auto& [r, t] : have) j["times"][std::to_string(r)] = t;
      std::ofstream(file) << j.dump() << '\n';
    }
  }
  std::map<long, double> out;
  for (long r = r_lo; r <= r_hi; ++r) out[r] = have.at(r);
  return out;
}

inline EldredgeFit build_fit(const RunConfig& c) {
  if (c.fit_lo < 2 || c.fit_hi <= c.fit_lo) throw DomainError("fit window needs 2 <= fit_lo < fit_hi");
  return fit_eldredge(cached_exact_series(2, c.fit_hi, c.d, c.model(), c.threads), c.fit_lo, c.fit_hi);
}

inline json fit_json(const EldredgeFit& fit) {
  return {{"r_lo", fit.r_lo},
          {"r_hi", fit.r_hi},
          {"slope", num(fit.fit_slope)},
          {"intercept", num(fit.fit_intercept)},
          {"max_relative_residual", num(fit.max_relative_residual)},
          {"loglog_exponent", num(fitted_exponent(fit))}};
}

inline json scaling_json(const ScalingClass& s) {
  json j{{"kind", s.name()}, {"describe", s.describe()}};
  if (s.kind == ScalingKind::kPower || s.kind == ScalingKind::kPolylog) j["exponent"] = num(s.exponent);
  if (s.kind == ScalingKind::kStretchedExponential) j["gamma"] = num(s.gamma);
  return j;
}

inline int run_eldredge(const RunConfig& c, std::ostream& out) {
  const auto lattice = c.extents.empty() ? Lattice::hypercube(c.d, c.r) : Lattice(c.d, c.extents);
  if (c.source < 0) throw DomainError("source must be a valid site index");
  const auto result = run_schedule(lattice, c.model(), static_cast<Site>(c.source));
  if (c.emit_events == "csv") {
    out << "event_index,time,site\n";
    for (std::size_t k = 0; k < result.events.size(); ++k) {
      out << k << ',' << fmt12(result.events[k].time) << ',' << result.events[k].site << '\n';
    }
    return 0;
  }
  if (!c.emit_events.empty()) throw ConfigError("--emit-events accepts only 'csv'");
  json j{{"d", c.d},
         {"extents", lattice.extents()},
         {"alpha", num(c.alpha)},
         {"prefactor", num(c.prefactor)},
         {"source", c.source},
         {"sites", lattice.size()},
         {"total_time", num(result.total_time)},
         {"state_transfer_time", num(2.0 * result.total_time)},
         {"asymptotics", scaling_json(classify_eldredge_asymptotics(c.alpha, c.d))}};
  out << j.dump(2) << '\n';
  return 0;
}

inline int run_hybrid(const RunConfig& c, std::ostream& out) {
  HybridOptions opt;
  opt.base = parse_base(c.base);
  opt.merge_time_scale = 1.0 / c.prefactor;
  const auto fit = build_fit(c);
  const auto plan = optimize(fit, c.rmax, c.alpha, c.d, opt);
  if (c.emit == "csv") {
    out << "r,best_time,eldredge_time,best_split,depth\n";
    for (long r = 2; r <= plan.r_max; ++r) {
      out << r << ',' << fmt12(plan.best_time[r]) << ',' << fmt12(plan.base_time[r]) << ',' << plan.best_split[r]
          << ',' << plan.depth[r] << '\n';
    }
    return 0;
  }
  if (c.emit != "json") throw ConfigError("--emit must be 'json' or 'csv'");
  json rows = json::array();
  for (long r = 2; r <= plan.r_max; ++r) {
    rows.push_back({{"r", r},
                    {"best_time", num(plan.best_time[r])},
                    {"eldredge_time", num(plan.base_time[r])},
                    {"best_split", plan.best_split[r]},
                    {"depth", plan.depth[r]}});
  }
  out << json{{"alpha", num(c.alpha)}, {"d", c.d}, {"base", c.base}, {"fit", fit_json(fit)}, {"rows", rows}}.dump(2)
      << '\n';
  return 0;
}

inline json budget_json(const CrosstalkBudget& b, const RunConfig& c) {
  json levels = json::array();
  for (const auto& [L, e] : b.per_level) levels.push_back({{"L", num(L)}, {"eps", num(e)}});
  return {{"convention", to_string(b.convention)},
          {"schedule", to_string(b.schedule)},
          {"norm", c.norm},
          {"r", c.r},
          {"r0", num(c.r0)},
          {"n", c.n},
          {"alpha", num(c.alpha)},
          {"d", c.d},
          {"per_level", levels},
          {"i_max", b.i_max},
          {"total", num(b.total)},
          {"analytic_bound", num(b.analytic_bound)}};
}

inline int run_crosstalk(const RunConfig& c, std::ostream& out) {
  if (c.emit != "json") throw ConfigError("crosstalk emits json only");
  CrosstalkOptions opt;
  opt.norm = parse_norm(c.norm);
  const auto b = total_crosstalk(static_cast<double>(c.r), c.r0, static_cast<double>(c.n), c.alpha, c.d,
                                 parse_convention(c.convention), opt);
  out << budget_json(b, c).dump(2) << '\n';
  return 0;
}

inline int run_colors(const RunConfig& c, std::ostream& out) {
  CrosstalkOptions opt;
  opt.norm = parse_norm(c.norm);
  const auto req =
      colors_required(static_cast<double>(c.r), c.r0, c.eps, c.alpha, c.d, parse_convention(c.convention), opt);
  json j{{"r", c.r},
         {"r0", num(c.r0)},
         {"eps", num(c.eps)},
         {"alpha", num(c.alpha)},
         {"d", c.d},
         {"convention", c.convention},
         {"norm", c.norm},
         {"n", req.n},
         {"total_at_n", num(req.total_at_n)},
         {"saturated", req.saturated},
         {"analytic", scaling_json(req.analytic)}};
  out << j.dump(2) << '\n';
  return 0;
}

inline int run_pulses(const RunConfig& c, std::ostream& out) {
  if (c.n < 1 || c.n > 63) throw DomainError("pulse counts need 1 <= n <= 63");
  const auto p = pulse_count(static_cast<int>(c.n));
  out << json{{"n", c.n}, {"per_color", p.per_color}, {"total", p.total}, {"sum_over_colors", p.sum_over_colors}}
             .dump(2)
      << '\n';
  return 0;
}

inline int run_echo(const RunConfig& c, std::ostream& out) {
  if (c.n < 1 || c.n > kMaxWalshColors) throw DomainError("echo sequences need 1 <= n <= 20");
  const auto seq = walsh_sequence(static_cast<int>(c.n), c.T);
  if (c.emit == "csv") {
    out << "segment,duration";
    for (int k = 1; k <= seq.num_colors(); ++k) out << ",color" << k;
    out << '\n';
    for (std::size_t s = 0; s < seq.num_segments(); ++s) {
      out << s << ',' << fmt12(seq.durations[s]);
      for (const auto& row : seq.signs) out << ',' << row[s];
      out << '\n';
    }
    return 0;
  }
  if (c.emit != "json") throw ConfigError("--emit must be 'json' or 'csv'");
  std::vector<double> durations;
  for (double v : seq.durations) durations.push_back(round12(v));
  out << json{{"n", c.n},
              {"T", num(c.T)},
              {"durations", durations},
              {"signs", seq.signs},
              {"pulses_of_color", seq.pulses_of_color},
              {"total_pulse_instants", seq.total_pulse_instants}}
             .dump(2)
      << '\n';
  return 0;
}

inline int run_echo_verify(const RunConfig& c, std::ostream& out) {
  if (c.extents.empty()) throw DomainError("echo-verify needs lattice extents");
  if (c.n < 1 || c.n > kMaxWalshColors) throw DomainError("echo-verify needs 1 <= n <= 20");
  const Lattice lattice(c.d, c.extents);
  const auto tiling = tile_and_color(lattice, c.L, static_cast<int>(c.n));
  const auto seq = walsh_sequence(static_cast<int>(c.n), c.T);
  const auto rep = verify_cancellation(seq, tiling, lattice, c.model());
  out << json{{"d", c.d},
              {"extents", c.extents},
              {"L", c.L},
              {"n", c.n},
              {"T", num(c.T)},
              {"blocks", tiling.block_count()},
              {"min_same_color_distance", num(tiling.min_same_color_distance)},
              {"cross_color_pairs", rep.cross_color_pairs},
              {"max_cross_color_residual", num(rep.max_cross_color_residual)},
              {"max_cross_color_relative", num(rep.max_cross_color_relative)},
              {"same_color_pairs", rep.same_color_pairs.size()},
              {"same_color_total", num(rep.same_color_total)}}
             .dump(2)
      << '\n';
  return 0;
}

inline int run_verify(const std::string& protocol, const RunConfig& c, std::ostream& out) {
  const Amplitude a{c.a}, b{c.b};
  if (protocol == "eldredge") {
    const auto lattice = c.extents.empty() ? Lattice::hypercube(c.d, c.r) : Lattice(c.d, c.extents);
    if (c.source < 0) throw DomainError("source must be a valid site index");
    const auto run = run_eldredge_protocol(lattice, c.model(), static_cast<Site>(c.source), a, b);
    const auto sched = run_schedule(lattice, c.model(), static_cast<Site>(c.source));
    out << json{{"protocol", protocol},
                {"qubits", lattice.size()},
                {"fidelity", num(run.fidelity)},
                {"rest_zero_weight", num(run.rest_zero_weight)},
                {"total_time", num(sched.total_time)}}
               .dump(2)
        << '\n';
    return 0;
  }
  const auto run = run_tran_step(c.d, c.r1, c.m, c.model(), a, b);
  out << json{{"protocol", protocol},
              {"qubits", run.state.num_qubits()},
              {"fidelity", num(run.fidelity)},
              {"rest_zero_weight", num(run.rest_zero_weight)},
              {"t1", num(run.t1)},
              {"t2", num(run.t2)},
              {"total_time", num(3.0 * run.t1 + run.t2)}}
             .dump(2)
      << '\n';
  return 0;
}

inline int run_reproduce(const RunConfig& c, std::ostream& out) {
  HybridOptions opt;
  opt.base = parse_base(c.base);
  opt.merge_time_scale = 1.0 / c.prefactor;
  const auto fit = build_fit(c);
  const auto plan = optimize(fit, c.rmax, c.alpha, c.d, opt);
  const long cross = plan.crossover();
  const long onset = plan.first_depth(2);
  json j{{"alpha", num(c.alpha)}, {"d", c.d}, {"rmax", c.rmax}, {"base", c.base}, {"fit", fit_json(fit)}};
  j["crossover"] = cross == 0 ? json(nullptr) : json(cross);
  j["depth2_onset"] = onset == 0 ? json(nullptr) : json(onset);
  if (cross != 0) {
    const long stop = onset == 0 ? plan.r_max + 1 : onset;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (long r = cross; r < stop; ++r) {
      if (plan.depth[r] != 1) continue;
      lo = std::min(lo, plan.m(r));
      hi = std::max(hi, plan.m(r));
    }
    j["m_min"] = num(lo);
    j["m_max"] = num(hi);
  } else {
    j["m_min"] = nullptr;
    j["m_max"] = nullptr;
  }
  out << j.dump(2) << '\n';
  return 0;
}

/// Runs one command line (without the program name). Exit codes: 0 ok, 1 domain error, 2 bad usage.
inline int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  // --config is applied first so explicit flags override it.
  for (std::size_t k = 0; k < args.size(); ++k) {
    std::string path;
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
    if (path.empty()) continue;
    try {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open config file '" + path + "'");
      apply_config(cfg, json::parse(in));
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
  }

  CLI::App app{"Transfer-protocol toolkit for power-law spin lattices", "powerlawst"};
  app.require_subcommand(1);
  std::string config_path, protocol;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", config_path, "JSON config file; flags override its values");
    s->add_option("--out", cfg.out, "write output to this path instead of stdout");
  };
  auto geometry = [&](CLI::App* s) {
    s->add_option("--alpha", cfg.alpha, "power-law exponent");
    s->add_option("--d", cfg.d, "lattice dimension");
    s->add_option("--prefactor", cfg.prefactor, "coupling prefactor");
  };

  auto* eld = app.add_subcommand("eldredge", "greedy Eldredge schedule on an r^d hypercube");
  common(eld);
  geometry(eld);
  eld->add_option("--r", cfg.r, "hypercube edge");
  eld->add_option("--extents", cfg.extents, "per-axis extents (overrides --r)");
  eld->add_option("--source", cfg.source, "source site index");
  eld->add_option("--emit-events", cfg.emit_events, "emit the event list (csv)");

  auto* hyb = app.add_subcommand("hybrid", "dynamic-programming hybrid table");
  common(hyb);
  geometry(hyb);
  hyb->add_option("--rmax", cfg.rmax, "largest edge in the table");
  hyb->add_option("--emit", cfg.emit, "json or csv");
  hyb->add_option("--base", cfg.base, "Eldredge base time: transfer or ghz");
  hyb->add_option("--fit-lo", cfg.fit_lo, "fit window start");
  hyb->add_option("--fit-hi", cfg.fit_hi, "fit window end (largest exact run)");
  hyb->add_option("--threads", cfg.threads, "threads for exact runs (0 = all cores)");

  auto* rep = app.add_subcommand("reproduce", "exact runs, fit and DP with crossover summary");
  common(rep);
  geometry(rep);
  rep->add_option("--rmax", cfg.rmax, "largest edge in the table");
  rep->add_option("--base", cfg.base, "Eldredge base time: transfer or ghz");
  rep->add_option("--fit-lo", cfg.fit_lo, "fit window start");
  rep->add_option("--fit-hi", cfg.fit_hi, "fit window end (largest exact run)");
  rep->add_option("--threads", cfg.threads, "threads for exact runs (0 = all cores)");

  auto* xt = app.add_subcommand("crosstalk", "per-level crosstalk budget");
  common(xt);
  xt->add_option("--alpha", cfg.alpha, "power-law exponent");
  xt->add_option("--d", cfg.d, "lattice dimension");
  xt->add_option("--r", cfg.r, "region edge");
  xt->add_option("--r0", cfg.r0, "smallest level edge");
  xt->add_option("--n", cfg.n, "number of colors");
  xt->add_option("--convention", cfg.convention, "published or draft");
  xt->add_option("--norm", cfg.norm, "sum or bound");
  xt->add_option("--emit", cfg.emit, "json");

  auto* col = app.add_subcommand("colors", "smallest color count meeting an error target");
  common(col);
  col->add_option("--alpha", cfg.alpha, "power-law exponent");
  col->add_option("--d", cfg.d, "lattice dimension");
  col->add_option("--r", cfg.r, "region edge");
  col->add_option("--r0", cfg.r0, "smallest level edge");
  col->add_option("--eps", cfg.eps, "target total error");
  col->add_option("--convention", cfg.convention, "published or draft");
  col->add_option("--norm", cfg.norm, "sum or bound");

  auto* pul = app.add_subcommand("pulses", "echo pulse counts for n colors");
  common(pul);
  pul->add_option("--n", cfg.n, "number of colors");

  auto* ech = app.add_subcommand("echo", "square-wave sign sequence for n colors");
  common(ech);
  ech->add_option("--n", cfg.n, "number of colors");
  ech->add_option("--T", cfg.T, "total evolution time");
  ech->add_option("--emit", cfg.emit, "json or csv");

  auto* ev = app.add_subcommand("echo-verify", "cross-color cancellation report on a colored tiling");
  common(ev);
  geometry(ev);
  ev->add_option("--extents", cfg.extents, "per-axis extents");
  ev->add_option("--L", cfg.L, "block edge");
  ev->add_option("--n", cfg.n, "number of colors");
  ev->add_option("--T", cfg.T, "total evolution time");

  auto* ver = app.add_subcommand("verify", "state-vector check of a protocol");
  common(ver);
  geometry(ver);
  ver->add_option("protocol", protocol, "eldredge or tran")->required()->check(CLI::IsMember({"eldredge", "tran"}));
  ver->add_option("--r", cfg.r, "hypercube edge (eldredge)");
  ver->add_option("--extents", cfg.extents, "per-axis extents (eldredge)");
  ver->add_option("--source", cfg.source, "source site (eldredge)");
  ver->add_option("--r1", cfg.r1, "block edge (tran)");
  ver->add_option("--m", cfg.m, "blocks per axis (tran)");
  ver->add_option("--a", cfg.a, "amplitude of |0>");
  ver->add_option("--b", cfg.b, "amplitude of |1>");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  std::ostringstream buffer;
  int status = 0;
  try {
    if (*eld) status = run_eldredge(cfg, buffer);
    else if (*hyb) status = run_hybrid(cfg, buffer);
    else if (*rep) status = run_reproduce(cfg, buffer);
    else if (*xt) status = run_crosstalk(cfg, buffer);
    else if (*col) status = run_colors(cfg, buffer);
    else if (*pul) status = run_pulses(cfg, buffer);
    else if (*ech) status = run_echo(cfg, buffer);
    else if (*ev) status = run_echo_verify(cfg, buffer);
    else if (*ver) status = run_verify(protocol, cfg, buffer);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  if (cfg.out.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(cfg.out);
    if (!file) {
      err << "error: cannot write '" << cfg.out << "'\n";
      return 1;
    }
    file << buffer.str();
  }
  return status;
}

}  // namespace powerlawst::cli
