#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lelong/analysis.hpp"
#include "lelong/errors.hpp"
#include "lelong/identity_suite.hpp"
#include "lelong/mc_engine.hpp"
#include "lelong/serialize.hpp"

namespace lelong::cli {

namespace {

using nlohmann::json;

struct RunConfig {
  std::string command;
  std::string current_path;
  std::optional<double> eps;
  std::vector<std::string> params;
  std::string weight = "pow:k=1";
  double r_min = 1e-6;
  double r_max = 1e-1;
  int points = 32;
  std::string engine = "auto";
  long samples = 200000;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format;
  std::optional<double> tol;
  std::optional<double> tol_limit;
  std::optional<double> sigmas;
  bool classical = false;
  std::string id = "all";
  bool with_mc = false;
};

// Shortest representation that reads back to the same double.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SpecParameters spec_parameters(const RunConfig& cfg) {
  SpecParameters params;
  for (const auto& item : cfg.params) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--param expects NAME=VALUE, got '" + item + "'");
    double v = 0.0;
    const auto value = std::string_view(item).substr(eq + 1);
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
      throw InputError("--param " + item + ": value is not a number");
    }
    params[item.substr(0, eq)] = v;
  }
  if (cfg.eps) params["eps"] = *cfg.eps;
  return params;
}

ModelCurrent load_current(const RunConfig& cfg, const SpecParameters& params) {
  if (cfg.current_path.empty()) throw InputError("--current is required");
  return parse_current(read_file(cfg.current_path), params);
}

// Micro-syntax, inline JSON, or a path to a JSON file.
Weight load_weight(const RunConfig& cfg, const Domain& domain, const SpecParameters& params) {
  const std::string& text = cfg.weight;
  if (!text.empty() && text.front() != '{' && text.find(':') == std::string::npos) {
    return parse_weight(read_file(text), domain, params);
  }
  return parse_weight(text, domain, params);
}

EvalOptions eval_options(const RunConfig& cfg) {
  EvalOptions opts;
  opts.engine = parse_engine(cfg.engine);
  if (cfg.samples < kMinSamples) {
    throw InputError("--samples must be at least " + std::to_string(kMinSamples));
  }
  opts.mc.samples = cfg.samples;
  opts.mc.seed = cfg.seed;
  opts.mc.threads = cfg.threads;
  return opts;
}

VerifyOptions verify_options(const RunConfig& cfg) {
  VerifyOptions opts;
  opts.eval = eval_options(cfg);
  if (cfg.tol) opts.tol_exact = *cfg.tol;
  if (cfg.tol_limit) opts.tol_limit = *cfg.tol_limit;
  if (cfg.sigmas) opts.mc_sigmas = *cfg.sigmas;
  opts.profile_r_min = cfg.r_min;
  opts.profile_r_max = cfg.r_max;
  opts.profile_points = cfg.points;
  return opts;
}

std::string format_or(const RunConfig& cfg, const std::string& fallback,
                      std::initializer_list<const char*> allowed) {
  const std::string f = cfg.format.empty() ? fallback : cfg.format;
  for (const char* a : allowed) {
    if (f == a) return f;
  }
  throw InputError("format '" + f + "' is not available for " + cfg.command);
}

// Display divisor: 1 in the native normalization, 2^p for classical values.
double display_divisor(const RunConfig& cfg, const ModelCurrent& current) {
  return cfg.classical ? std::pow(2.0, current.bidim()) : 1.0;
}

json header(const RunConfig& cfg, const ModelCurrent& current, const Weight& weight) {
  return {{"current", describe(current)},
          {"weight", describe(weight)},
          {"normalization", cfg.classical ? "classical" : "native"}};
}

void write_series(std::ostream& out, const std::string& name, const std::string& y_label,
                  const std::vector<double>& xs, const std::vector<double>& ys) {
  out << "# series: " << name << "\n# x: r, scale=log\n# y: " << y_label << ", scale=linear\n";
  for (std::size_t i = 0; i < xs.size(); ++i) out << num(xs[i]) << ' ' << num(ys[i]) << '\n';
}

struct Context {
  const RunConfig& cfg;
  std::ostream& out;
};

int profile(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto params = spec_parameters(cfg);
  const auto current = load_current(cfg, params);
  const auto weight = load_weight(cfg, current.domain(), params);
  const auto fmt = format_or(cfg, "csv", {"csv", "json", "svg-data"});
  const auto prof = nu_profile(current, weight, cfg.r_min, cfg.r_max, cfg.points, eval_options(cfg));
  const double div = display_divisor(cfg, current);

  if (fmt == "csv") {
    ctx.out << "r,nu,engine,err_bound\n";
    for (std::size_t i = 0; i < prof.size(); ++i) {
      ctx.out << num(prof.radii[i]) << ',' << num(prof.values[i] / div) << ','
              << to_string(prof.methods[i]) << ',' << num(prof.errors[i] / div) << '\n';
    }
  } else if (fmt == "json") {
    json doc = header(cfg, current, weight);
    json rows = json::array();
    for (std::size_t i = 0; i < prof.size(); ++i) {
      rows.push_back({{"r", json_number(prof.radii[i])},
                      {"nu", json_number(prof.values[i] / div)},
                      {"engine", to_string(prof.methods[i])},
                      {"err_bound", json_number(prof.errors[i] / div)}});
    }
    doc["profile"] = std::move(rows);
    ctx.out << doc.dump(2) << '\n';
  } else {
    std::vector<double> ys;
    for (double v : prof.values) ys.push_back(v / div);
    write_series(ctx.out, "nu", "nu", prof.radii, ys);
  }
  return kSuccess;
}

double model_value(const LimitEstimate& est, double r) {
  switch (est.model) {
    case LimitModel::Power:
      return est.B + est.A * std::pow(r, est.rate) + est.A2 * std::pow(r, est.rate2);
    case LimitModel::Log: return est.A * std::log(r) + est.B;
    case LimitModel::LogPower: return -est.A * std::pow(-std::log(r), est.rate) + est.B;
    case LimitModel::None: break;
  }
  return std::nan("");
}

json fit_json(const ModelFit& f, double div) {
  return {{"model", to_string(f.model)},     {"limit", json_number(f.limit / div)},
          {"A", json_number(f.A / div)},     {"B", json_number(f.B / div)},
          {"rate", json_number(f.rate)},     {"A2", json_number(f.A2 / div)},
          {"rate2", json_number(f.rate2)},   {"residual", json_number(f.residual)}};
}

json limit_json(const LimitEstimate& est, double div) {
  json doc = {{"value", json_number(est.value / div)},
              {"model", to_string(est.model)},
              {"A", json_number(est.A / div)},
              {"B", json_number(est.B / div)},
              {"rate", json_number(est.rate)},
              {"A2", json_number(est.A2 / div)},
              {"rate2", json_number(est.rate2)},
              {"fit_residual", json_number(est.fit_residual)},
              {"diverged", est.diverged},
              {"inconclusive", est.inconclusive},
              {"stability", json_number(est.stability / div)},
              {"window_points", est.window_points}};
  if (est.model == LimitModel::Power) doc["alpha"] = json_number(est.rate);
  if (est.model == LimitModel::LogPower) doc["delta"] = json_number(est.rate);
  json cands = json::array();
  for (const auto& c : est.candidates) cands.push_back(fit_json(c, div));
  doc["candidates"] = std::move(cands);
  return doc;
}

int limit(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto params = spec_parameters(cfg);
  const auto current = load_current(cfg, params);
  const auto weight = load_weight(cfg, current.domain(), params);
  const auto fmt = format_or(cfg, "json", {"json", "csv", "svg-data"});
  const auto prof = nu_profile(current, weight, cfg.r_min, cfg.r_max, cfg.points, eval_options(cfg));
  const auto est = estimate_limit(prof, cfg.tol_limit.value_or(kLimitTolerance));
  const double div = display_divisor(cfg, current);

  if (fmt == "json") {
    json doc = header(cfg, current, weight);
    doc["limit"] = limit_json(est, div);
    ctx.out << doc.dump(2) << '\n';
  } else if (fmt == "csv") {
    const json lj = limit_json(est, div);
    ctx.out << "key,value\n";
    for (const char* key : {"value", "model", "A", "B", "rate", "A2", "rate2", "fit_residual",
                            "diverged", "inconclusive", "stability", "window_points"}) {
      const auto& v = lj.at(key);
      ctx.out << key << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
  } else {
    std::vector<double> ys;
    std::vector<double> fit;
    for (std::size_t i = 0; i < prof.size(); ++i) {
      ys.push_back(prof.values[i] / div);
      fit.push_back(model_value(est, prof.radii[i]) / div);
    }
    write_series(ctx.out, "nu", "nu", prof.radii, ys);
    ctx.out << '\n';
    write_series(ctx.out, "fit:" + to_string(est.model), "nu", prof.radii, fit);
  }
  return kSuccess;
}

int check_c(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto params = spec_parameters(cfg);
  const auto current = load_current(cfg, params);
  const auto weight = load_weight(cfg, current.domain(), params);
  const auto fmt = format_or(cfg, "json", {"json", "csv"});
  const auto rep = check_condition_C(current, weight, eval_options(cfg));
  json body = {{"verdict", to_string(rep.verdict)},
               {"exponent_estimate", json_number(rep.exponent_estimate)},
               {"method", to_string(rep.method)},
               {"window_lo", json_number(rep.window_lo)},
               {"window_hi", json_number(rep.window_hi)},
               {"detail", rep.detail}};
  if (fmt == "json") {
    json doc = header(cfg, current, weight);
    doc["condition_c"] = std::move(body);
    ctx.out << doc.dump(2) << '\n';
  } else {
    ctx.out << "key,value\n";
    for (const char* key : {"verdict", "exponent_estimate", "method", "window_lo", "window_hi"}) {
      const auto& v = body.at(key);
      ctx.out << key << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
  }
  return kSuccess;
}

int write_reports(const Context& ctx, const std::vector<IdentityReport>& reports) {
  const auto fmt = format_or(ctx.cfg, "json", {"json", "csv"});
  if (fmt == "json") {
    ctx.out << to_json(reports).dump(2) << '\n';
  } else {
    ctx.out << "identity_id,verdict,lhs,rhs,residual,tolerance,inequality,engines,input_hash\n";
    for (const auto& r : reports) {
      std::string engines;
      for (const auto& e : r.engines) engines += (engines.empty() ? "" : ";") + e;
      ctx.out << r.identity_id << ',' << to_string(r.verdict) << ',' << num(r.lhs) << ','
              << num(r.rhs) << ',' << num(r.residual) << ',' << num(r.tolerance) << ','
              << (r.inequality ? "true" : "false") << ',' << engines << ','
              << input_hash(r.inputs) << '\n';
    }
  }
  for (const auto& r : reports) {
    if (r.verdict == ReportVerdict::Fail) return kVerificationFailure;
  }
  return kSuccess;
}

int verify(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto params = spec_parameters(cfg);
  const auto current = load_current(cfg, params);
  const auto weight = load_weight(cfg, current.domain(), params);
  const auto opts = verify_options(cfg);
  std::vector<IdentityReport> reports;
  if (cfg.id == "all") {
    for (const auto& id : identity_ids()) reports.push_back(verify_by_id(id, current, weight, opts));
  } else {
    reports.push_back(verify_by_id(cfg.id, current, weight, opts));
  }
  sort_reports(reports);
  return write_reports(ctx, reports);
}

int panel(const Context& ctx) {
  const auto opts = verify_options(ctx.cfg);
  VerifyOptions det = opts;
  if (det.eval.engine == Engine::MonteCarlo) det.eval.engine = Engine::Auto;
  auto reports = run_panel(default_panel(), det);
  if (ctx.cfg.with_mc) {
    auto mc = run_monte_carlo_panel(monte_carlo_panel(), opts);
    reports.insert(reports.end(), mc.begin(), mc.end());
    sort_reports(reports);
  }
  return write_reports(ctx, reports);
}

void add_common(CLI::App* sub, RunConfig& cfg, bool needs_current) {
  if (needs_current) {
    sub->add_option("--current", cfg.current_path, "Current spec (JSON file)")->required();
    sub->add_option("--weight", cfg.weight,
                    "Weight: pow:k=K | aniso:b=B1,B2,... | shifted:k=K,c=RE:IM;... , inline "
                    "JSON or a JSON file")
        ->capture_default_str();
    sub->add_option("--eps", cfg.eps, "Value bound to \"$eps\" in the spec");
    sub->add_option("--param", cfg.params, "NAME=VALUE bound to \"$NAME\" in the spec");
  }
  sub->add_option("--r-min", cfg.r_min, "Smallest profile radius")->capture_default_str();
  sub->add_option("--r-max", cfg.r_max, "Largest profile radius")->capture_default_str();
  sub->add_option("--points", cfg.points, "Profile points")->capture_default_str();
  sub->add_option("--engine", cfg.engine, "auto | closed | quad | mc")
      ->check(CLI::IsMember({"auto", "closed", "quad", "mc"}))
      ->capture_default_str();
  sub->add_option("--samples", cfg.samples, "Monte Carlo samples")->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
  sub->add_option("--threads", cfg.threads, "Monte Carlo worker threads (0: all cores)")
      ->capture_default_str();
  sub->add_option("--format", cfg.format, "csv | json | svg-data")
      ->check(CLI::IsMember({"csv", "json", "svg-data"}));
  sub->add_option("--tol", cfg.tol, "Tolerance for exact identities");
  sub->add_option("--tol-limit", cfg.tol_limit, "Tolerance for extrapolated limits");
  sub->add_option("--sigmas", cfg.sigmas, "Monte Carlo tolerance in standard errors");
  sub->add_flag("--classical", cfg.classical, "Divide displayed values by 2^p");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Generalized Lelong numbers of model currents"};
  app.name("lelong");
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Context&);
    bool needs_current;
  };
  const Command commands[] = {
      {"profile", "Tabulate nu(T, phi, r) on a geometric grid", profile, true},
      {"limit", "Extrapolate nu(T, phi) from the profile", limit, true},
      {"check-c", "Decide integrability of nu(dd^c T, phi, t)/t at 0", check_c, true},
      {"verify", "Run identity verifiers on one current", verify, true},
      {"panel", "Run every verifier on the built-in catalog", panel, false},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, cfg, c.needs_current);
    if (std::string_view(c.name) == "verify") {
      sub->add_option("--id", cfg.id, "Identity id, or all")->capture_default_str();
    }
    if (std::string_view(c.name) == "panel") {
      sub->add_flag("--mc", cfg.with_mc, "Also run the Monte Carlo panel");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "lelong: " << e.what() << '\n';
    return kInvalidInput;
  }

  for (const auto& c : commands) {
    if (!app.got_subcommand(c.name)) continue;
    cfg.command = c.name;
    try {
      return c.fn(Context{cfg, out});
    } catch (const InputError& e) {
      err << "lelong: invalid input: " << e.what() << '\n';
      return kInvalidInput;
    } catch (const NumericalError& e) {
      err << "lelong: numerical failure: " << e.what() << '\n';
      return kNumericalFailure;
    } catch (const std::exception& e) {
      err << "lelong: numerical failure: " << e.what() << '\n';
      return kNumericalFailure;
    }
  }
  return kInvalidInput;
}

}  // namespace lelong::cli
