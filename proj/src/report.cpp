// SPDX-License-Identifier: Apache-2.0
#include "bigjump/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

#include "bigjump/quadrature.hpp"

namespace bigjump {

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), compact single-shot implementation.

namespace {

constexpr std::uint32_t kSha256K[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  std::string msg = bytes;
  const std::uint64_t bitlen = static_cast<std::uint64_t>(bytes.size()) * 8;
  msg.push_back(static_cast<char>(0x80));
  while (msg.size() % 64 != 56) msg.push_back('\0');
  for (int i = 7; i >= 0; --i) msg.push_back(static_cast<char>((bitlen >> (8 * i)) & 0xff));

  for (std::size_t off = 0; off < msg.size(); off += 64) {
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[off + 4 * i])) << 24) |
             (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[off + 4 * i + 1])) << 16) |
             (static_cast<std::uint32_t>(static_cast<unsigned char>(msg[off + 4 * i + 2])) << 8) |
             static_cast<std::uint32_t>(static_cast<unsigned char>(msg[off + 4 * i + 3]));
    for (int i = 16; i < 64; ++i) {
      const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const std::uint32_t ch = (e & f) ^ (~e & g);
      const std::uint32_t t1 = hh + s1 + ch + kSha256K[i] + w[i];
      const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      const std::uint32_t t2 = s0 + maj;
      hh = g; g = f; f = e; e = d + t1; d = c; c = b; b = a; a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d; h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }
  char out[65];
  for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
  return std::string(out, 64);
}

// ---------------------------------------------------------------------------
// CSV / JSON emission. All floats formatted with %.17g so identical runs
// produce identical bytes.

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string csv_header() { return "x,n_or_tau,estimator,estimate,se,lo,hi,target,ratio\n"; }

void append_table_csv(std::string& csv, const McTable& t) {
  for (const auto& r : t.rows) {
    csv += fmt(r.x);
    csv += ',';
    csv += fmt(t.n_or_tau);
    csv += ',';
    csv += t.estimator.empty() ? t.label : t.estimator;
    csv += ',';
    csv += fmt(r.estimate);
    csv += ',';
    csv += fmt(r.se);
    csv += ',';
    csv += fmt(r.lo);
    csv += ',';
    csv += fmt(r.hi);
    csv += ',';
    csv += fmt(r.target);
    csv += ',';
    csv += fmt(r.ratio);
    csv += '\n';
  }
}

nlohmann::ordered_json table_json(const McTable& t) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"x", r.x},
                    {"estimate", r.estimate},
                    {"se", r.se},
                    {"lo", r.lo},
                    {"hi", r.hi},
                    {"target", r.target},
                    {"ratio", r.ratio},
                    {"hits", r.hits},
                    {"ess", r.ess},
                    {"reliable", r.reliable}});
  }
  return nlohmann::ordered_json{
      {"label", t.label}, {"estimator", t.estimator}, {"n_or_tau", t.n_or_tau}, {"rows", rows}};
}

nlohmann::ordered_json verdict_json(const std::string& name, const LimitVerdict& v) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : v.table.rows)
    rows.push_back({{"x", r.x}, {"value", r.estimate}, {"ci", r.ci}});
  return nlohmann::ordered_json{{"name", name},
                                {"verdict", verdict_name(v.verdict)},
                                {"target", v.target},
                                {"final_value", v.final_value},
                                {"rows", rows}};
}

nlohmann::ordered_json condition_report_json(const ConditionReport& r) {
  // Flat row schema: {condition, multiple, x, ratio, ci, verdict}.
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  auto emit = [&rows](const char* cond, double mult, const LimitVerdict& v) {
    for (const auto& row : v.table.rows)
      rows.push_back({{"condition", cond},
                      {"multiple", mult},
                      {"x", row.x},
                      {"ratio", row.estimate},
                      {"ci", row.ci},
                      {"verdict", verdict_name(v.verdict)}});
  };
  for (const auto& [mult, v] : r.per_multiple) {
    emit("d3i", mult, v.d3i);
    emit("d3ii", mult, v.d3ii);
    emit("d3iii", mult, v.d3iii);
  }
  nlohmann::ordered_json per_multiple = nlohmann::ordered_json::array();
  for (const auto& [mult, v] : r.per_multiple)
    per_multiple.push_back({{"multiple", mult},
                            {"d3i", verdict_name(v.d3i.verdict)},
                            {"d3ii", verdict_name(v.d3ii.verdict)},
                            {"d3iii", verdict_name(v.d3iii.verdict)},
                            {"pass", v.all_pass()}});
  return nlohmann::ordered_json{{"overall", r.overall},
                                {"qualifier", r.qualifier},
                                {"notes", r.notes},
                                {"per_multiple", per_multiple},
                                {"rows", rows}};
}

// ---------------------------------------------------------------------------
// h-expression parser: [c*] factor [* factor ...] with factors x, x^p,
// log, log(x), log^q, log(x)^q, sqrt(x); plus the form x/c.

LittleH parse_h_expr(const std::string& expr) {
  std::string s;
  for (char ch : expr)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw ConfigError("empty h expression");

  double coeff = 1.0, xpow = 0.0, logpow = 0.0;

  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (num != "x") throw ConfigError("h expression: only x/<number> division supported");
    try {
      coeff = 1.0 / std::stod(den);
    } catch (...) {
      throw ConfigError("h expression: bad divisor in " + expr);
    }
    xpow = 1.0;
  } else {
    std::size_t pos = 0;
    while (pos < s.size()) {
      std::size_t next = s.find('*', pos);
      if (next == std::string::npos) next = s.size();
      std::string f = s.substr(pos, next - pos);
      pos = next + 1;
      if (f.empty()) throw ConfigError("h expression: empty factor in " + expr);
      if (f == "x") {
        xpow += 1.0;
      } else if (f.rfind("x^", 0) == 0) {
        xpow += std::stod(f.substr(2));
      } else if (f == "sqrt(x)") {
        xpow += 0.5;
      } else if (f == "log" || f == "log(x)") {
        logpow += 1.0;
      } else if (f.rfind("log(x)^", 0) == 0) {
        logpow += std::stod(f.substr(7));
      } else if (f.rfind("log^", 0) == 0) {
        logpow += std::stod(f.substr(4));
      } else {
        try {
          coeff *= std::stod(f);
        } catch (...) {
          throw ConfigError("h expression: cannot parse factor '" + f + "'");
        }
      }
    }
  }
  LittleH h;
  h.label = expr;
  h.fn = [coeff, xpow, logpow](double x) {
    double v = coeff;
    if (xpow != 0.0) v *= std::pow(x, xpow);
    if (logpow != 0.0) v *= std::pow(std::log(x), logpow);
    return v;
  };
  return h;
}

// ---------------------------------------------------------------------------
// Worked-example pipelines.

namespace {

std::map<std::string, double> to_param_map(const nlohmann::json& j) {
  std::map<std::string, double> m;
  if (j.is_object())
    for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = it.value().get<double>();
  return m;
}

double variant_or(const std::map<std::string, double>& v, const std::string& key, double dflt) {
  auto it = v.find(key);
  return it == v.end() ? dflt : it->second;
}

struct ExampleSetup {
  CondIndepModel model;
  std::vector<double> check_grid;
  std::vector<double> mc_grid;
  std::uint64_t reps_multiplier = 1;
  bool run_hazard_route = false;
  std::string expected;
};

ExampleSetup example_setup(int id, const std::map<std::string, double>& variant) {
  ExampleSetup s;
  switch (id) {
    case 1: {
      const double alpha = variant_or(variant, "alpha", 1.0);
      const double beta = variant_or(variant, "beta", 2.0);
      s.model = make_additive_shock(alpha, beta, 2);
      s.check_grid = geometric_grid(1e2, 1e8, 31);
      s.mc_grid = geometric_grid(1e2, 1e4, 9);
      s.expected = alpha < beta ? "single_big_jump_holds" : "fails";
      break;
    }
    case 2: {
      s.model = make_pareto_mixture(2);
      s.check_grid = geometric_grid(1e2, 1e8, 31);
      s.mc_grid = geometric_grid(1e2, 1e4, 9);
      s.expected = "single_big_jump_holds";
      break;
    }
    case 3: {
      const double a = variant_or(variant, "a", 0.2);
      const double b = variant_or(variant, "b", 1.0);
      const double gamma = variant_or(variant, "gamma", 1.0);
      s.model = make_weibull_mixture(a, b, gamma, 2);
      if (a > 0.0) {
        s.check_grid = geometric_grid(1e2, 1e16, 43);
        s.mc_grid = geometric_grid(1e2, 1e4, 9);
        s.run_hazard_route = true;
        s.expected = "single_big_jump_holds";
      } else {
        s.mc_grid = geometric_grid(1e2, 1e8, 13);
        s.expected = "big_jump_only";
      }
      break;
    }
    case 4: {
      const double xi_alpha = variant_or(variant, "xi_alpha", 2.0);
      const double eta_gamma = variant_or(variant, "eta_gamma", 1.0);
      const double eta_beta = variant_or(variant, "eta_beta", 0.5);
      const int n = static_cast<int>(variant_or(variant, "n", 2.0));
      s.model = make_discount_product(xi_alpha, laws::weibull(eta_gamma, eta_beta), n);
      s.check_grid = geometric_grid(1e2, 1e14, 37);
      // The intermediate mass carries the factor moments (~600x the reference
      // tail), so the vanishing verdict needs the extra half-decade.
      s.mc_grid = geometric_grid(1e2, 3e4, 11);
      s.reps_multiplier = 2;
      s.expected = "single_big_jump_holds";
      break;
    }
    case 5: {
      const int n = static_cast<int>(variant_or(variant, "n", 2.0));
      const double sv = variant_or(variant, "s", 1.0);
      const double muv = variant_or(variant, "mu", 0.0);
      const double sgv = variant_or(variant, "sigma", 1.0);
      const auto k = static_cast<std::size_t>(n);
      s.model = make_lognormal_copula(std::vector<double>(k, sv), std::vector<double>(k, muv),
                                      std::vector<double>(k, sgv));
      s.check_grid = geometric_grid(1e2, 1e8, 31);
      // Lognormal intermediate mass decays only beyond desk-scale x; the grid
      // stops where the latent-tail effective sample size is still healthy and
      // the verdict is expected to come back unresolved.
      s.mc_grid = geometric_grid(2.0, 632.0, 11);
      s.reps_multiplier = 4;
      s.run_hazard_route = true;
      s.expected = "single_big_jump_holds";
      break;
    }
    case 6: {
      const double alpha = variant_or(variant, "alpha", 2.0);
      const double beta = variant_or(variant, "beta", 1.5);
      s.model = make_moving_average(alpha, beta, 2);
      s.check_grid = geometric_grid(1e2, 1e14, 37);
      s.mc_grid = geometric_grid(1e2, 1e3, 5);
      s.expected = "fails";
      break;
    }
    default:
      throw ConfigError("example id must be 1..6");
  }
  return s;
}

}  // namespace

ExampleVerdict run_example(int id, const std::map<std::string, double>& variant,
                           std::uint64_t seed, std::uint64_t budget, int threads) {
  if (budget < 1000000)
    throw ConfigError("run_example: budget must be >= 1e6 replications");
  ExampleSetup setup = example_setup(id, variant);
  ExampleVerdict out;
  out.id = id;
  for (const auto& [k, v] : variant) out.variant[k] = v;
  out.expected = setup.expected;

  nlohmann::ordered_json conditions;
  const CondIndepModel& model = setup.model;

  // Dependence conditions.
  bool have_boundary = false;
  BoundaryGenerator H;
  try {
    H = boundary_generator(model.reference());
    have_boundary = true;
    conditions["boundary_generator"] = H.label;
  } catch (const NoBoundaryClassError& e) {
    conditions["boundary_generator"] = nullptr;
    conditions["no_boundary_class"] = e.what();
    out.failing_conditions.push_back("no_boundary_class");
  }
  if (have_boundary && model.bounding()) {
    const ConditionReport cr = check_d3(*model.bounding(), model.reference(), H, setup.check_grid);
    conditions["d3"] = condition_report_json(cr);
    if (!cr.overall) {
      for (const auto& [mult, v] : cr.per_multiple) {
        (void)mult;
        if (!v.d3i.vanishes()) out.failing_conditions.push_back("d3i");
        if (!v.d3ii.vanishes()) out.failing_conditions.push_back("d3ii");
        if (!v.d3iii.vanishes()) out.failing_conditions.push_back("d3iii");
        break;  // report the hardest multiple once
      }
    }
    if (setup.run_hazard_route) {
      const HazardSufficiency hs =
          hazard_concavity_sufficient(model.reference(), model.bounding()->r, H, setup.check_grid);
      conditions["hazard_concavity_sufficient"] =
          hs == HazardSufficiency::holds ? "holds"
                                         : (hs == HazardSufficiency::fails ? "fails" : "indeterminate");
      conditions["hazard_note"] =
          "sufficiency requires an eventually concave hazard plus x r(x) tail(cH(x)) -> 0";
    }
  } else if (!model.bounding()) {
    conditions["d3"] = nullptr;
    conditions["d3_note"] = "no valid bounding preset exists for this construction";
    out.failing_conditions.push_back("d3");
  }
  if (model.real_valued()) {
    LittleH h{[](double x) { return std::sqrt(x); }, "x^0.5"};
    const LimitVerdict d4 =
        check_d4(model, h, 0, 1, geometric_grid(1e2, 1e3, 5), budget, seed + 17);
    conditions["d4"] = verdict_json("d4", d4);
    if (!d4.vanishes()) out.failing_conditions.push_back("d4");
  }

  // Measured asymptotics.
  SumQuery q;
  q.model = model;
  q.n = 2;
  q.x_grid = setup.mc_grid;
  q.replications = budget * setup.reps_multiplier;
  q.seed = seed;
  q.estimator = Estimator::cond_last_step;
  q.threads = threads;
  const DecompositionReport d = big_jump_decomposition(q);

  out.details["conditions"] = std::move(conditions);
  out.details["asymptotics"] = {{"p_sum", table_json(d.p_sum)},
                                {"p1", table_json(d.p1)},
                                {"p2", table_json(d.p2)},
                                {"p_cancel", table_json(d.p_cancel)},
                                {"per_term_1", table_json(d.per_term[0])},
                                {"per_term_2", table_json(d.per_term[1])},
                                {"identity_residual", table_json(d.residual)},
                                {"p1_vanishes", verdict_json("p1/marginal_sum", d.p1_vanishes)},
                                {"p2_vanishes", verdict_json("p2/marginal_sum", d.p2_vanishes)},
                                {"sum_ratio_ok", d.sum_ratio_ok},
                                {"sum_ratio_reliable", d.sum_ratio_reliable}};

  // Conclude only from decisive verdicts; a run whose budget cannot resolve
  // the limits reports "unresolved" and exits through the unreliable channel
  // rather than forcing a claim the numbers do not support.
  const bool p1_vanish = d.p1_vanishes.vanishes();
  const bool p1_refuses = d.p1_vanishes.verdict == Verdict::diverges;
  const bool p2_vanish = d.p2_vanishes.vanishes();
  const bool p2_refuses = d.p2_vanishes.verdict == Verdict::diverges;
  if (p1_vanish && p2_vanish && d.sum_ratio_reliable && d.sum_ratio_ok) {
    out.conclusion = "single_big_jump_holds";
  } else if (p1_vanish && p2_refuses) {
    out.conclusion = "big_jump_only";
  } else if (p1_refuses) {
    out.conclusion = "fails";
  } else if (p1_vanish && p2_vanish && d.sum_ratio_reliable && !d.sum_ratio_ok) {
    out.conclusion = "fails";
  } else {
    out.conclusion = "unresolved";
    out.unreliable = true;
  }
  out.match = !out.unreliable && out.conclusion == out.expected;
  return out;
}

// ---------------------------------------------------------------------------
// Config dispatcher.

namespace {

std::vector<double> grid_from_config(const nlohmann::json& cfg, double d_start, double d_stop,
                                     int d_points) {
  double start = d_start, stop = d_stop;
  int points = d_points;
  if (cfg.contains("x_grid")) {
    const auto& g = cfg["x_grid"];
    start = g.value("start", start);
    stop = g.value("stop", stop);
    points = g.value("points", points);
  }
  return geometric_grid(start, stop, points);
}

TailDistribution law_from_config(const nlohmann::json& cfg) {
  if (!cfg.contains("law")) throw ConfigError("config needs a 'law' object");
  const auto& l = cfg["law"];
  return laws::from_name(l.value("name", ""), to_param_map(l.value("params", nlohmann::json::object())));
}

CondIndepModel model_from_config(const nlohmann::json& cfg) {
  if (!cfg.contains("model")) throw ConfigError("config needs a 'model' object");
  const auto& m = cfg["model"];
  return model_from_name(m.value("name", ""),
                         to_param_map(m.value("params", nlohmann::json::object())));
}

Estimator estimator_from_config(const nlohmann::json& cfg) {
  const std::string e = cfg.value("estimator", "cond_last_step");
  if (e == "plain") return Estimator::plain;
  if (e == "cond_last_step") return Estimator::cond_last_step;
  throw ConfigError("unknown estimator: " + e);
}

struct RunOutput {
  std::vector<McTable> tables;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  int exit_code = kExitOk;
};

RunOutput cmd_dist(const nlohmann::json& cfg) {
  RunOutput out;
  TailDistribution law = law_from_config(cfg);
  const auto grid = grid_from_config(cfg, 1e2, 1e8, 25);
  auto make = [&](const char* what, auto&& fn) {
    McTable t;
    t.label = law.label();
    t.estimator = what;
    for (double x : grid) {
      McRow r;
      r.x = x;
      r.estimate = fn(x);
      r.lo = r.hi = r.estimate;
      t.rows.push_back(r);
    }
    out.tables.push_back(std::move(t));
  };
  make("tail", [&](double x) { return law.tail(x); });
  make("log_tail", [&](double x) { return law.log_tail(x); });
  make("hazard", [&](double x) { return law.hazard(x); });
  make("hazard_rate", [&](double x) {
    return x > law.support_lower() ? law.hazard_rate(x) : std::numeric_limits<double>::quiet_NaN();
  });
  out.extra["law"] = law.label();
  out.extra["support_lower"] = law.support_lower();
  return out;
}

RunOutput cmd_boundary(const nlohmann::json& cfg) {
  RunOutput out;
  TailDistribution law = law_from_config(cfg);
  const auto grid = grid_from_config(cfg, 1e2, 1e8, 61);
  out.extra["law"] = law.label();
  out.extra["slowly_varying"] = is_slowly_varying(law, grid);
  try {
    BoundaryGenerator H = boundary_generator(law);
    McTable t;
    t.label = H.label;
    t.estimator = "boundary_generator";
    for (double x : grid) {
      McRow r;
      r.x = x;
      r.estimate = H.base(x);
      r.lo = r.hi = r.estimate;
      t.rows.push_back(r);
    }
    out.tables.push_back(std::move(t));
    out.extra["generator"] = H.label;
    out.extra["multiples"] = H.multiples;
    if (cfg.contains("h_expr")) {
      const LittleH h = parse_h_expr(cfg["h_expr"].get<std::string>());
      const LimitVerdict lv = is_little_h(law, h, grid);
      out.extra["h_expr"] = h.label;
      out.extra["is_little_h"] = verdict_json("tail(x-h)/tail(x)", lv);
      out.extra["little_h_passes"] = little_h_passes(lv);
      out.extra["membership_via_boundary"] = membership_via_boundary(law, h, grid);
      out.extra["weak_equiv_h_vs_generator"] = weak_equiv(h.fn, H.base, grid);
    }
  } catch (const NoBoundaryClassError& e) {
    out.extra["generator"] = nullptr;
    out.extra["no_boundary_class"] = e.what();
    if (cfg.contains("h_expr")) {
      const LittleH h = parse_h_expr(cfg["h_expr"].get<std::string>());
      const LimitVerdict lv = is_little_h(law, h, grid);
      out.extra["h_expr"] = h.label;
      out.extra["is_little_h"] = verdict_json("tail(x-h)/tail(x)", lv);
      out.extra["little_h_passes"] = little_h_passes(lv);
    }
  }
  return out;
}

RunOutput cmd_check(const nlohmann::json& cfg) {
  RunOutput out;
  CondIndepModel model = model_from_config(cfg);
  const auto grid = grid_from_config(cfg, 1e2, 1e8, 31);
  double vanish_tol = 1e-2;
  if (cfg.contains("tolerances")) vanish_tol = cfg["tolerances"].value("vanish", vanish_tol);
  out.extra["model"] = model.label();
  out.extra["vanish_tol"] = vanish_tol;
  try {
    BoundaryGenerator H = boundary_generator(model.reference());
    if (model.bounding()) {
      const ConditionReport cr =
          check_d3(*model.bounding(), model.reference(), H, grid, vanish_tol);
      out.extra["d3"] = condition_report_json(cr);
      const HazardSufficiency hs =
          hazard_concavity_sufficient(model.reference(), model.bounding()->r, H, grid);
      out.extra["hazard_concavity_sufficient"] =
          hs == HazardSufficiency::holds ? "holds"
                                         : (hs == HazardSufficiency::fails ? "fails" : "indeterminate");
    } else {
      out.extra["d3"] = nullptr;
      out.extra["d3_note"] = "no valid bounding preset exists for this construction";
    }
  } catch (const NoBoundaryClassError& e) {
    out.extra["no_boundary_class"] = e.what();
  }
  if (model.real_valued()) {
    LittleH h{[](double x) { return std::sqrt(x); }, "x^0.5"};
    const LimitVerdict d4 = check_d4(model, h, 0, 1, geometric_grid(1e2, 1e3, 5),
                                     cfg.value("replications", std::uint64_t{200000}),
                                     cfg.value("seed", std::uint64_t{1}));
    out.extra["d4"] = verdict_json("d4", d4);
  }
  return out;
}

RunOutput cmd_simulate(const nlohmann::json& cfg) {
  RunOutput out;
  SumQuery q;
  q.model = model_from_config(cfg);
  q.n = cfg.value("n", 2);
  q.x_grid = grid_from_config(cfg, 1e2, 1e4, 9);
  q.replications = cfg.value("replications", std::uint64_t{1000000});
  q.seed = cfg.value("seed", std::uint64_t{1});
  q.estimator = estimator_from_config(cfg);
  q.threads = cfg.value("threads", 0);
  if (cfg.contains("tau") && !cfg["tau"].is_null()) {
    const auto& tj = cfg["tau"];
    const std::string kind = tj.value("kind", "fixed");
    TauLaw tau = kind == "geometric"  ? TauLaw::geometric(tj.value("param", 0.5))
                 : kind == "poisson" ? TauLaw::poisson(tj.value("param", 1.0))
                                     : TauLaw::fixed(tj.value("n", q.n));
    out.tables.push_back(
        random_sum_tail(q.model, tau, q.x_grid, q.replications, q.seed, q.estimator, q.threads));
    out.extra["tau"] = tau.describe();
    out.extra["tau_mean_capped"] = tau.mean_capped();
    out.extra["tau_cap_bias_bound"] = tau.tail_mass();
  } else {
    out.tables.push_back(mc_sum_tail(q));
  }
  return out;
}

RunOutput cmd_decompose(const nlohmann::json& cfg) {
  RunOutput out;
  SumQuery q;
  q.model = model_from_config(cfg);
  q.n = 2;
  q.x_grid = grid_from_config(cfg, 1e2, 1e4, 9);
  q.replications = cfg.value("replications", std::uint64_t{1000000});
  q.seed = cfg.value("seed", std::uint64_t{1});
  q.threads = cfg.value("threads", 0);
  const DecompositionReport d = big_jump_decomposition(q);
  out.tables = {d.p_sum, d.p1, d.p2, d.p_cancel, d.per_term[0], d.per_term[1], d.residual};
  out.extra["p1_vanishes"] = verdict_json("p1/marginal_sum", d.p1_vanishes);
  out.extra["p2_vanishes"] = verdict_json("p2/marginal_sum", d.p2_vanishes);
  out.extra["sum_ratio_ok"] = d.sum_ratio_ok;
  out.extra["single_big_jump"] = d.single_big_jump;
  out.extra["big_jump"] = d.big_jump;
  return out;
}

RunOutput cmd_kesten(const nlohmann::json& cfg) {
  RunOutput out;
  CondIndepModel model = model_from_config(cfg);
  const double eps = cfg.value("eps", 0.5);
  const int n_max = cfg.value("n_max", 10);
  const double x0 = cfg.value("x0", 1e2);
  const auto grid = grid_from_config(cfg, 1e2, 1e4, 9);
  const KestenReport k =
      kesten_probe(model, eps, n_max, x0, grid, cfg.value("replications", std::uint64_t{200000}),
                   cfg.value("seed", std::uint64_t{1}), cfg.value("threads", 0));
  for (const auto& r : k.per_n) {
    McTable t;  // one single-row table per n so the CSV keeps n_or_tau exact
    t.label = "kesten_probe[" + model.label() + "]";
    t.estimator = "sup_ratio";
    t.n_or_tau = r.n;
    McRow row;
    row.x = r.x_at_sup;
    row.estimate = r.sup_ratio;
    row.se = r.se_at_sup;
    row.lo = row.hi = r.sup_ratio;
    row.target = k.v_fitted * std::pow(1.0 + eps, r.n);
    row.ratio = row.target > 0 ? r.sup_ratio / row.target : 0.0;
    t.rows.push_back(row);
    out.tables.push_back(std::move(t));
  }
  out.extra["eps"] = k.eps;
  out.extra["v_fitted"] = k.v_fitted;
  out.extra["bound_ok"] = k.bound_ok;
  out.extra["slope"] = k.slope;
  out.extra["slope_limit"] = k.slope_limit;
  out.extra["notes"] = k.notes;
  out.extra["limitation"] = k.limitation;
  nlohmann::ordered_json per_n = nlohmann::ordered_json::array();
  for (const auto& r : k.per_n)
    per_n.push_back({{"n", r.n}, {"sup_ratio", r.sup_ratio}, {"x_at_sup", r.x_at_sup}});
  out.extra["per_n"] = per_n;
  return out;
}

RunOutput cmd_examples(const nlohmann::json& cfg) {
  RunOutput out;
  std::vector<int> ids;
  if (cfg.contains("example_id"))
    ids.push_back(cfg["example_id"].get<int>());
  else
    ids = {1, 2, 3, 4, 5, 6};
  const std::uint64_t budget = cfg.value("budget", cfg.value("replications", std::uint64_t{1000000}));
  const std::uint64_t seed = cfg.value("seed", std::uint64_t{1});
  const int threads = cfg.value("threads", 0);
  const auto variant = to_param_map(cfg.value("variant", nlohmann::json::object()));

  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  bool all_match = true, any_unreliable = false;
  for (int id : ids) {
    const ExampleVerdict v = run_example(id, variant, seed, budget, threads);
    nlohmann::ordered_json block{{"example_id", v.id},
                                 {"variant", v.variant},
                                 {"conclusion", v.conclusion},
                                 {"expected", v.expected},
                                 {"match", v.match},
                                 {"unreliable", v.unreliable},
                                 {"failing_conditions", v.failing_conditions},
                                 {"details", v.details}};
    blocks.push_back(std::move(block));
    all_match = all_match && (v.match || v.unreliable);
    any_unreliable = any_unreliable || v.unreliable;
  }
  out.extra["examples"] = std::move(blocks);
  // Hard mismatches dominate; otherwise unresolved runs exit through the
  // unreliable-numerics code.
  out.exit_code = !all_match ? kExitMismatch : (any_unreliable ? kExitUnreliable : kExitOk);
  return out;
}

}  // namespace

nlohmann::ordered_json run_config(const nlohmann::json& config) {
  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::ordered_json report;
  report["schema"] = "bigjump-report-v1";
  const std::string command = config.value("command", "");
  report["command"] = command;
  report["config"] = config;
  report["content_hash"] = "sha256:" + sha256_hex(nlohmann::json(config).dump());

  RunOutput out;
  try {
    if (command == "dist") out = cmd_dist(config);
    else if (command == "boundary") out = cmd_boundary(config);
    else if (command == "check") out = cmd_check(config);
    else if (command == "simulate") out = cmd_simulate(config);
    else if (command == "decompose") out = cmd_decompose(config);
    else if (command == "kesten") out = cmd_kesten(config);
    else if (command == "examples") out = cmd_examples(config);
    else throw ConfigError("unknown command: '" + command + "'");
  } catch (const ConfigError& e) {
    out = RunOutput{};
    out.exit_code = kExitUsage;
    out.extra["error"] = e.what();
  } catch (const std::invalid_argument& e) {
    out = RunOutput{};
    out.exit_code = kExitUsage;
    out.extra["error"] = e.what();
  }

  nlohmann::ordered_json tables = nlohmann::ordered_json::array();
  std::string csv = csv_header();
  for (const auto& t : out.tables) {
    tables.push_back(table_json(t));
    append_table_csv(csv, t);
  }
  report["tables"] = std::move(tables);
  for (auto it = out.extra.begin(); it != out.extra.end(); ++it) report[it.key()] = it.value();
  report["csv"] = csv;
  report["exit_code"] = out.exit_code;
  const auto t1 = std::chrono::steady_clock::now();
  report["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  return report;
}

}  // namespace bigjump
