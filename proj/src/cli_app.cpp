#include "rismux/cli_app.hpp"

#include <CLI11.hpp>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "rismux/channel.hpp"
#include "rismux/experiment.hpp"
#include "rismux/io.hpp"
#include "rismux/spectral.hpp"

namespace rismux {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    parts.push_back(item);
  }
  return parts;
}

double to_double(const std::string& text) {
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) {
    throw CLI::ValidationError("not a number: '" + text + "'");
  }
  return v;
}

// "a:b:c" inclusive range with step, or a comma list of explicit values.
std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
      throw CLI::ValidationError("range must be start:step:stop, got '" + text + "'");
    }
    const double start = to_double(parts[0]);
    const double step = to_double(parts[1]);
    const double stop = to_double(parts[2]);
    if (!(step > 0.0) || stop < start) {
      throw CLI::ValidationError("range requires step > 0 and stop >= start");
    }
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) {
      values.push_back(start + i * step);
    }
  } else {
    for (const auto& part : split(text, ',')) {
      values.push_back(to_double(part));
    }
  }
  if (values.empty()) {
    throw CLI::ValidationError("empty value list");
  }
  return values;
}

Criterion parse_criterion(const std::string& name) {
  if (name == "er") return Criterion::effective_rank;
  if (name == "msv") return Criterion::min_singular;
  if (name == "random") return Criterion::random_phase;
  if (name == "none") return Criterion::no_ris;
  throw CLI::ValidationError("unknown criterion '" + name + "' (er, msv, random, none)");
}

Receiver parse_receiver(const std::string& name) {
  if (name == "mmse") return Receiver::mmse;
  if (name == "mf") return Receiver::mf;
  if (name == "joint") return Receiver::joint;
  throw CLI::ValidationError("unknown receiver '" + name + "' (mmse, mf, joint)");
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "snr" || name == "snr_db") return SweepAxis::snr_db;
  if (name == "L" || name == "l") return SweepAxis::ris_elements;
  if (name == "alpha") return SweepAxis::alpha;
  throw CLI::ValidationError("unknown axis '" + name + "' (snr, L, alpha)");
}

std::string utc_now_iso8601() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// All flag-equivalent settings in one place: this is what the manifest
// records and what --config files feed back in.
struct ResolvedConfig {
  int antennas = 4;
  int users = 4;
  int elements = 100;
  double alpha = 0.5;
  double snr_db = 10.0;
  std::uint64_t seed = 0;
  int threads = 1;
  int trials = 200;
  std::string axis = "snr";
  std::string values = "-10:2.5:20";
  std::string criteria = "er,msv,random,none";
  std::string receivers = "mmse,mf,joint";
  std::string criterion = "er";  // optimize subcommand
  OptimizerOptions optimizer;

  json to_json() const {
    return json{{"M", antennas},
                {"K", users},
                {"L", elements},
                {"alpha", alpha},
                {"snr", snr_db},
                {"seed", seed},
                {"threads", threads},
                {"trials", trials},
                {"axis", axis},
                {"values", values},
                {"criteria", criteria},
                {"receivers", receivers},
                {"criterion", criterion},
                {"max_iterations", optimizer.max_iterations},
                {"grad_tolerance", optimizer.grad_tolerance},
                {"wolfe_c1", optimizer.wolfe_c1},
                {"wolfe_c2", optimizer.wolfe_c2},
                {"max_line_search_steps", optimizer.max_line_search_steps},
                {"restarts", optimizer.restarts}};
  }

  SystemConfig system_config() const {
    SystemConfig cfg;
    cfg.num_antennas = antennas;
    cfg.num_users = users;
    cfg.num_elements = elements;
    cfg.alpha = alpha;
    cfg.noise_var = snr_db_to_noise_var(snr_db);
    cfg.seed = seed;
    return cfg;
  }
};

// Accepts a previous manifest.json, a flat JSON object, or key=value lines.
json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw CLI::ValidationError("cannot read config file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << f.rdbuf();
  const std::string text = buffer.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json parsed = json::parse(text);
    if (parsed.contains("config") && parsed["config"].is_object()) {
      return parsed["config"];
    }
    return parsed;
  }

  json flat = json::object();
  std::stringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      continue;
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) {
      flat[key] = value;
    }
  }
  return flat;
}

// json values may arrive as native numbers or as strings from key=value files.
template <typename T>
void fetch(const json& j, const char* key, T& out) {
  if (!j.contains(key)) {
    return;
  }
  const auto& v = j.at(key);
  if constexpr (std::is_same_v<T, std::string>) {
    out = v.is_string() ? v.get<std::string>() : v.dump();
  } else {
    if (v.is_string()) {
      std::stringstream ss(v.get<std::string>());
      ss >> out;
      if (ss.fail()) {
        throw CLI::ValidationError(std::string("bad value for '") + key + "'");
      }
    } else {
      out = v.get<T>();
    }
  }
}

void apply_config_file(const json& j, ResolvedConfig& cfg) {
  fetch(j, "M", cfg.antennas);
  fetch(j, "K", cfg.users);
  fetch(j, "L", cfg.elements);
  fetch(j, "alpha", cfg.alpha);
  fetch(j, "snr", cfg.snr_db);
  fetch(j, "seed", cfg.seed);
  fetch(j, "threads", cfg.threads);
  fetch(j, "trials", cfg.trials);
  fetch(j, "axis", cfg.axis);
  fetch(j, "values", cfg.values);
  fetch(j, "criteria", cfg.criteria);
  fetch(j, "receivers", cfg.receivers);
  fetch(j, "criterion", cfg.criterion);
  fetch(j, "max_iterations", cfg.optimizer.max_iterations);
  fetch(j, "grad_tolerance", cfg.optimizer.grad_tolerance);
  fetch(j, "wolfe_c1", cfg.optimizer.wolfe_c1);
  fetch(j, "wolfe_c2", cfg.optimizer.wolfe_c2);
  fetch(j, "max_line_search_steps", cfg.optimizer.max_line_search_steps);
  fetch(j, "restarts", cfg.optimizer.restarts);
}

json tool_stanza() {
  return json{{"name", kToolName}, {"version", kToolVersion}};
}

int cmd_sweep(const ResolvedConfig& cfg, const std::string& out_dir, bool quiet,
              std::ostream& err) {
  SweepSpec spec;
  try {
    spec.base = cfg.system_config();
    spec.axis = parse_axis(cfg.axis);
    spec.axis_values = parse_values(cfg.values);
    for (const auto& name : split(cfg.criteria, ',')) {
      spec.criteria.push_back(parse_criterion(name));
    }
    for (const auto& name : split(cfg.receivers, ',')) {
      spec.receivers.push_back(parse_receiver(name));
    }
    spec.trials_per_point = cfg.trials;
    spec.seed = cfg.seed;
    spec.base.seed = cfg.seed;
    spec.optimizer = cfg.optimizer;
    spec.validate();
  } catch (const std::invalid_argument& e) {
    // Bad flag values are usage errors, not runtime failures.
    throw CLI::ValidationError(e.what());
  }

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  ProgressFn progress;
  if (!quiet) {
    progress = [&](const SweepProgress& p) {
      if (p.kind == SweepProgress::Kind::point_done) {
        err << "[" << kToolName << "] " << axis_name(spec.axis) << "="
            << format_g17(spec.axis_values[p.axis_index]) << " " << criterion_name(p.criterion)
            << " done\n";
      }
    };
  }

  SweepResult result;
  bool partial = false;
  std::string failure;
  try {
    result = run_sweep_detailed(spec, cfg.threads, progress);
  } catch (const SweepAborted& e) {
    result = e.partial;
    partial = true;
    failure = e.what();
    err << "[" << kToolName << "] " << e.what() << "\n";
  }

  json manifest{{"schema_version", kSchemaVersion},
                {"tool", tool_stanza()},
                {"created_utc", utc_now_iso8601()},
                {"command", "sweep"},
                {"config", cfg.to_json()},
                {"outputs", json{{"results_csv", "results.csv"}, {"partial", partial}}}};
  json points = json::array();
  for (std::size_t p = 0; p < spec.axis_values.size(); ++p) {
    for (const Criterion c : spec.criteria) {
      points.push_back(json{{"axis_value", spec.axis_values[p]},
                            {"criterion", criterion_name(c)},
                            {"trials", spec.trials_per_point}});
    }
  }
  manifest["points"] = points;
  if (partial) {
    manifest["outputs"]["error"] = failure;
  }

  write_file(dir / "results.csv", sweep_csv(result.table, spec.axis));
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return partial ? 1 : 0;
}

int cmd_optimize(const ResolvedConfig& cfg, std::ostream& out) {
  const SystemConfig sys = cfg.system_config();
  Criterion criterion = Criterion::effective_rank;
  try {
    sys.validate();
    cfg.optimizer.validate();
    criterion = parse_criterion(cfg.criterion);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(e.what());
  }
  if (criterion != Criterion::effective_rank && criterion != Criterion::min_singular) {
    throw CLI::ValidationError("optimize expects --criterion er or msv");
  }

  const ChannelRealization real = sample_channels(sys, 0);
  const OptimizationReport report = optimize_phases(criterion, real, sys, cfg.optimizer);
  const ComplexMatrix h = assemble_effective(real, report.theta_star, sys.alpha);
  const SvdResult svd = svd_thin(h);

  json doc{{"schema_version", kSchemaVersion},
           {"tool", tool_stanza()},
           {"command", "optimize"},
           {"config", cfg.to_json()}};
  json result;
  result["objective_trace"] = report.objective_trace;
  result["iterations"] = report.iterations;
  result["termination"] = termination_name(report.termination == Termination::converged
                                               ? TrialTermination::converged
                                           : report.termination == Termination::max_iterations
                                               ? TrialTermination::max_iterations
                                               : TrialTermination::line_search_failure);
  result["final_gradient_norm"] = report.final_gradient_norm;
  result["wall_time_s"] = report.wall_time_s;
  result["effective_rank"] = effective_rank(svd.values);
  result["lambda"] = std::vector<double>(svd.values.data(), svd.values.data() + svd.values.size());
  result["lambda_min"] = svd.values(svd.values.size() - 1);
  result["gram_offdiag_ratio"] = gram_offdiag_ratio(h);
  json rates;
  for (const Receiver r : {Receiver::mmse, Receiver::mf, Receiver::joint}) {
    rates[receiver_name(r)] = receiver_sum_rate(r, h, sys.noise_var);
  }
  result["rates"] = rates;
  result["theta"] =
      std::vector<double>(report.theta_star.data(), report.theta_star.data() + report.theta_star.size());
  doc["result"] = result;

  out << doc.dump(2) << "\n";
  return 0;
}

int cmd_selftest(const ResolvedConfig& cfg, int instances, bool corrupt_gradient,
                 std::ostream& out) {
  bool all_pass = true;
  auto report = [&](const std::string& name, bool pass, const std::string& detail) {
    all_pass = all_pass && pass;
    out << (pass ? "PASS " : "FAIL ") << std::left << std::setw(33) << name << detail << "\n";
  };

  const SystemConfig sys = cfg.system_config();
  const GradientSelftest g = gradient_selftest(sys, instances, cfg.seed, corrupt_gradient);
  {
    std::ostringstream detail;
    detail << "worst |analytic - fd| = " << g.worst_effective_rank_err << " over " << g.instances
           << " instances (tol " << g.tolerance << ")";
    report("gradients.effective-rank-fd", g.worst_effective_rank_err < g.tolerance,
           detail.str());
  }
  {
    std::ostringstream detail;
    detail << "worst |analytic - fd| = " << g.worst_min_singular_err << ", " << g.tie_skipped
           << " near-tie instances excluded";
    report("gradients.min-singular-fd", g.worst_min_singular_err < g.tolerance, detail.str());
  }

  for (const auto& check : run_invariant_checks(cfg.seed)) {
    report(check.name, check.pass, check.detail);
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back(kToolName);
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_storage.size());
  for (const auto& s : argv_storage) {
    argv.push_back(s.c_str());
  }
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

int run_cli(int argc, const char* const* argv) {
  return run_cli(argc, argv, std::cout, std::cerr);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ResolvedConfig cfg;

  // The config file seeds the defaults; explicit flags override below.
  for (int i = 1; i < argc; ++i) {
    const std::string_view arg(argv[i]);
    std::string path;
    if (arg == "--config" && i + 1 < argc) {
      path = argv[i + 1];
    } else if (arg.starts_with("--config=")) {
      path = std::string(arg.substr(9));
    } else {
      continue;
    }
    try {
      apply_config_file(load_config_file(path), cfg);
    } catch (const CLI::ValidationError& e) {
      err << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      err << "config file error: " << e.what() << "\n";
      return 2;
    }
  }

  CLI::App app{"RIS phase-shift optimization and linear-receiver rate sweeps"};
  app.require_subcommand(1);
  std::string config_path;  // consumed above; registered so parsing accepts it

  std::string out_dir = ".";
  int instances = 100;
  bool corrupt_gradient = false;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-M,--antennas", cfg.antennas, "Base-station antenna count");
    sub->add_option("-K,--users", cfg.users, "User count");
    sub->add_option("-L,--elements", cfg.elements, "RIS element count");
    sub->add_option("--alpha", cfg.alpha, "Fraction of received power through the RIS");
    sub->add_option("--snr", cfg.snr_db, "SNR in dB; noise_var = 10^(-snr/10)");
    sub->add_option("--seed", cfg.seed, "Master seed");
    sub->add_option("--threads", cfg.threads, "Worker thread cap");
    sub->add_option("--config", config_path, "Config file (key=value or manifest.json)");
    sub->add_option("--max-iterations", cfg.optimizer.max_iterations, "Optimizer iteration cap");
    sub->add_option("--grad-tolerance", cfg.optimizer.grad_tolerance,
                    "Gradient max-norm stopping tolerance");
    sub->add_option("--wolfe-c1", cfg.optimizer.wolfe_c1, "Sufficient-decrease constant");
    sub->add_option("--wolfe-c2", cfg.optimizer.wolfe_c2, "Curvature constant");
    sub->add_option("--max-line-search-steps", cfg.optimizer.max_line_search_steps,
                    "Line search evaluation cap");
    sub->add_option("--restarts", cfg.optimizer.restarts, "Extra seeded restarts");
  };

  CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over snr, L or alpha");
  add_common(sweep);
  sweep->add_option("--axis", cfg.axis, "Sweep axis: snr, L or alpha");
  sweep->add_option("--values", cfg.values, "Axis values: start:step:stop or v1,v2,...");
  sweep->add_option("--criteria", cfg.criteria, "Comma list of er,msv,random,none");
  sweep->add_option("--receivers", cfg.receivers, "Comma list of mmse,mf,joint");
  sweep->add_option("--trials", cfg.trials, "Trials per sweep point");
  sweep->add_option("--out", out_dir, "Output directory for results.csv and manifest.json");
  sweep->add_flag("--quiet", quiet, "Suppress progress output");

  CLI::App* optimize = app.add_subcommand("optimize", "Optimize one seeded realization");
  add_common(optimize);
  optimize->add_option("--criterion", cfg.criterion, "er or msv");

  CLI::App* selftest = app.add_subcommand("selftest", "Gradient and invariant self-checks");
  add_common(selftest);
  selftest->add_option("--instances", instances, "Gradient check instance count");
  selftest->add_flag("--corrupt-gradient", corrupt_gradient,
                     "Debug hook: flip gradient signs (must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (sweep->parsed()) {
      return cmd_sweep(cfg, out_dir, quiet, err);
    }
    if (optimize->parsed()) {
      return cmd_optimize(cfg, out);
    }
    if (selftest->parsed()) {
      return cmd_selftest(cfg, instances, corrupt_gradient, out);
    }
  } catch (const CLI::ValidationError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace rismux
