#pragma once

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "delaynet/dde.hpp"
#include "delaynet/quasipoly.hpp"
#include "delaynet/stability.hpp"

namespace delaynet {

using json = nlohmann::json;

struct GridAxis {
  double min = 0.0;
  double max = 0.0;
  int steps = 1;  // number of grid points
};

struct Tolerances {
  double boundary = kBoundaryTol;
  double convergence_eps = 1e-6;
  double convergence_window = 1.0;
  double divergence_threshold = 1e6;
};

// Everything a CLI run needs, parsed from a single JSON document.
struct RunConfig {
  Graph graph;
  InteractionPattern pattern;
  std::optional<DelayPair> delays;
  std::optional<GridAxis> grid_tau1, grid_tau2;
  double horizon = 30.0;
  double step = 1e-3;
  HistoryKind history = HistoryKind::Constant;
  std::optional<std::uint32_t> seed;
  std::optional<std::vector<double>> x0;
  int record_stride = 1;
  std::optional<std::string> output;
  Tolerances tol;
};

namespace detail {

inline const json& need(const json& j, const char* key, const char* ctx) {
  if (!j.contains(key))
    throw ConfigError(std::string(ctx) + ": missing field '" + key + "'");
  return j.at(key);
}

inline double num(const json& j, const std::string& ctx) {
  if (!j.is_number())
    throw ConfigError(ctx + ": expected a number, got " + j.dump());
  return j.get<double>();
}

inline int integer(const json& j, const std::string& ctx) {
  if (!j.is_number_integer())
    throw ConfigError(ctx + ": expected an integer, got " + j.dump());
  return j.get<int>();
}

inline GridAxis parse_axis(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  GridAxis a;
  a.min = num(need(j, "min", ctx.c_str()), ctx + ".min");
  a.max = num(need(j, "max", ctx.c_str()), ctx + ".max");
  a.steps = integer(need(j, "steps", ctx.c_str()), ctx + ".steps");
  if (a.steps < 1) throw ConfigError(ctx + ".steps: must be >= 1");
  if (!(a.min <= a.max)) throw ConfigError(ctx + ": min must not exceed max");
  if (a.min < 0.0) throw ConfigError(ctx + ".min: delays are non-negative");
  return a;
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  RunConfig cfg;

  {
    const json& jg = detail::need(j, "graph", "config");
    if (!jg.is_object()) throw ConfigError("graph: expected an object");
    const int n = detail::integer(detail::need(jg, "n", "graph"), "graph.n");
    const bool has_family = jg.contains("family");
    const bool has_edges = jg.contains("edges");
    if (has_family == has_edges)
      throw ConfigError("graph: exactly one of 'family' or 'edges' is required");
    if (has_family) {
      cfg.graph = graph_family(jg.at("family").get<std::string>(), n);
    } else {
      const json& je = jg.at("edges");
      if (!je.is_array()) throw ConfigError("graph.edges: expected an array");
      std::vector<std::pair<int, int>> edges;
      for (const auto& e : je) {
        if (!e.is_array() || e.size() != 2)
          throw ConfigError(
              "graph.edges: each edge must be a pair [i, j]; weighted edges "
              "are not supported");
        // 1-based in I/O, 0-based internally.
        edges.emplace_back(detail::integer(e[0], "graph.edges[i]") - 1,
                           detail::integer(e[1], "graph.edges[j]") - 1);
      }
      cfg.graph = build_graph(n, edges);
    }
  }

  {
    const json& jp = detail::need(j, "pattern", "config");
    if (!jp.is_array() || jp.empty())
      throw ConfigError("pattern: expected a non-empty 2-D array (row-major)");
    const int d = static_cast<int>(jp.size());
    Eigen::MatrixXd a(d, d);
    for (int r = 0; r < d; ++r) {
      if (!jp[r].is_array() || static_cast<int>(jp[r].size()) != d)
        throw ConfigError("pattern: row " + std::to_string(r + 1) +
                          " must have " + std::to_string(d) + " entries");
      for (int c = 0; c < d; ++c)
        a(r, c) = detail::num(jp[r][c], "pattern entry");
    }
    cfg.pattern = build_pattern(a);
  }

  if (j.contains("delays")) {
    const json& jd = j.at("delays");
    DelayPair dp;
    dp.tau1 = detail::num(detail::need(jd, "tau1", "delays"), "delays.tau1");
    dp.tau2 = detail::num(detail::need(jd, "tau2", "delays"), "delays.tau2");
    validate(dp);
    cfg.delays = dp;
  }

  if (j.contains("grid")) {
    const json& jg = j.at("grid");
    cfg.grid_tau1 = detail::parse_axis(detail::need(jg, "tau1", "grid"), "grid.tau1");
    cfg.grid_tau2 = detail::parse_axis(detail::need(jg, "tau2", "grid"), "grid.tau2");
  }

  if (j.contains("simulation")) {
    const json& js = j.at("simulation");
    if (js.contains("horizon")) cfg.horizon = detail::num(js.at("horizon"), "simulation.horizon");
    if (js.contains("step")) cfg.step = detail::num(js.at("step"), "simulation.step");
    if (cfg.horizon <= 0.0 || cfg.step <= 0.0)
      throw ConfigError("simulation: horizon and step must be positive");
    if (js.contains("record_stride")) {
      cfg.record_stride = detail::integer(js.at("record_stride"), "simulation.record_stride");
      if (cfg.record_stride < 1)
        throw ConfigError("simulation.record_stride: must be >= 1");
    }
    if (js.contains("history")) {
      const std::string h = js.at("history").get<std::string>();
      if (h == "constant")
        cfg.history = HistoryKind::Constant;
      else if (h == "linear-to-zero")
        cfg.history = HistoryKind::LinearToZero;
      else
        throw ConfigError("simulation.history: 'constant' or 'linear-to-zero'");
    }
    const bool has_x0 = js.contains("x0");
    const bool has_seed = js.contains("seed");
    if (has_x0 && has_seed)
      throw ConfigError("simulation: give either 'x0' or 'seed', not both");
    if (has_x0) {
      const json& jx = js.at("x0");
      if (!jx.is_array()) throw ConfigError("simulation.x0: expected an array");
      std::vector<double> v;
      for (const auto& e : jx) v.push_back(detail::num(e, "simulation.x0 entry"));
      const std::size_t nd =
          static_cast<std::size_t>(cfg.graph.n) * cfg.pattern.dims();
      if (v.size() != nd)
        throw ConfigError("simulation.x0: expected n*d = " + std::to_string(nd) +
                          " entries, got " + std::to_string(v.size()));
      cfg.x0 = std::move(v);
    }
    if (has_seed)
      cfg.seed = static_cast<std::uint32_t>(
          detail::integer(js.at("seed"), "simulation.seed"));
  }

  if (j.contains("output")) cfg.output = j.at("output").get<std::string>();

  if (j.contains("tolerances")) {
    const json& jt = j.at("tolerances");
    if (jt.contains("boundary"))
      cfg.tol.boundary = detail::num(jt.at("boundary"), "tolerances.boundary");
    if (jt.contains("convergence_eps"))
      cfg.tol.convergence_eps =
          detail::num(jt.at("convergence_eps"), "tolerances.convergence_eps");
    if (jt.contains("convergence_window"))
      cfg.tol.convergence_window = detail::num(jt.at("convergence_window"),
                                               "tolerances.convergence_window");
    if (jt.contains("divergence_threshold"))
      cfg.tol.divergence_threshold = detail::num(
          jt.at("divergence_threshold"), "tolerances.divergence_threshold");
  }
  return cfg;
}

inline SimConfig make_sim_config(const RunConfig& cfg, const DelayPair& delays) {
  SimConfig sc;
  sc.graph = cfg.graph;
  sc.pattern = cfg.pattern;
  sc.delays = delays;
  sc.horizon = cfg.horizon;
  sc.step = cfg.step;
  sc.history = cfg.history;
  sc.seed = cfg.seed.value_or(0);
  sc.record_stride = cfg.record_stride;
  sc.divergence_threshold = cfg.tol.divergence_threshold;
  if (cfg.x0)
    sc.x0 = Eigen::Map<const Eigen::VectorXd>(cfg.x0->data(),
                                              static_cast<Eigen::Index>(cfg.x0->size()));
  return sc;
}

// Reports print floating-point values with 6 significant digits where a matrix
// is echoed back; spectra and margins keep full precision.
inline double round_sig6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::atof(buf);
}

inline json to_json(const LaplacianSpectrum& s) {
  return json{{"values", s.values},
              {"lambda2", s.lambda2},
              {"lambda_max", s.lambda_max}};
}

inline json to_json(const PatternSpectrum& s) {
  json mu = json::array(), zeta = json::array();
  for (const auto& m : s.mu) mu.push_back({m.real(), m.imag()});
  for (const auto& z : s.zeta) zeta.push_back({z.real(), z.imag()});
  return json{{"mu", mu},
              {"zeta", zeta},
              {"alpha", s.alpha},
              {"c", s.c},
              {"zeta_max", s.zeta_max},
              {"zeta_prime_max", s.zeta_prime_max},
              {"b_max", s.b_max},
              {"mu_max_abs", s.mu_max_abs}};
}

inline json to_json(const MarginReport& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  return json{{"tau_max", opt(r.tau_max)},
              {"tau_max_over_sqrt2", opt(r.tau_max_over_sqrt2)},
              {"tau_prime_max", opt(r.tau_prime_max)},
              {"tau_intra_only", opt(r.tau_intra_only)},
              {"tau_two_layer", opt(r.tau_two_layer)},
              {"two_layer_pair_rule", r.two_layer_pair_rule},
              {"tau1_zero_always", r.tau1_zero_always},
              {"hurwitz_delay_free", r.hurwitz_delay_free},
              {"mu_max_abs", r.mu_max_abs},
              {"verdict", r.verdict ? json(to_string(*r.verdict)) : json(nullptr)},
              {"justification", r.justification}};
}

inline json to_json(const NetworkOracle& o) {
  json inst = json::array();
  for (const auto& i : o.instances)
    inst.push_back({{"lambda", i.lambda},
                    {"mu", {i.mu.real(), i.mu.imag()}},
                    {"rightmost", i.rightmost}});
  return json{{"stable", o.stable},
              {"rightmost_abscissa", o.rightmost},
              {"converged", o.converged},
              {"instances", inst}};
}

// Long format: one row per (time, agent, layer); 1-based agent/layer indices,
// 9 significant digits.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,agent,layer,value\n";
  char buf[96];
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    for (int i = 0; i < tr.n; ++i)
      for (int q = 0; q < tr.d; ++q) {
        std::snprintf(buf, sizeof buf, "%.9g,%d,%d,%.9g\n", tr.times[k], i + 1,
                      q + 1,
                      tr.states[k][static_cast<Eigen::Index>(i) * tr.d + q]);
        os << buf;
      }
}

inline void write_disagreement_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,disagreement\n";
  char buf[64];
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", tr.times[k],
                  tr.disagreement[k]);
    os << buf;
  }
}

}  // namespace delaynet
