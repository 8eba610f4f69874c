#include "raman/cli.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "raman/dataset_io.hpp"
#include "raman/errors.hpp"
#include "raman/fit.hpp"
#include "raman/gaussian.hpp"
#include "raman/model.hpp"

namespace raman::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) { return fmt::format("{:.15g}", v); }

struct CommonOptions {
  std::string out = "-";
  std::string config;
  std::uint64_t seed = 1;
};

struct ScenarioOptions {
  double mu = 1.0;
  double pump_power = 0.0;
  double pump_scale = 1.0;
  double G = 1.0;
  double gq = 1.0;
  double gq_db = 15.0;
  double L1 = 0.0;
  double L2 = 0.0;
  double output_loss = 0.0;
  double lo_phase = 0.0;
};

// "# key = value" lines echoing the resolved configuration.
class Echo {
 public:
  explicit Echo(std::string command) : command_(std::move(command)) {}
  void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, num(value)); }
  void write(std::ostream& os) const {
    os << "# raman " << command_ << "\n";
    for (const auto& [k, v] : lines_) os << "# " << k << " = " << v << "\n";
  }

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> lines_;
};

void add_common(CLI::App* sub, CommonOptions& c) {
  sub->add_option("--out", c.out, "Output file, '-' for standard output");
  sub->add_option("--config", c.config, "Flat key = value file; command-line flags take precedence");
  sub->add_option("--seed", c.seed, "Random seed");
}

void add_scenario(CLI::App* sub, ScenarioOptions& o) {
  sub->add_option("--mu", o.mu, "First-stage amplitude gain mu (>= 1)");
  sub->add_option("--pump-power", o.pump_power, "First-stage pump power; sets mu = cosh(scale sqrt(P))");
  sub->add_option("--pump-scale", o.pump_scale, "Scale c in mu = cosh(c sqrt(P))");
  sub->add_option("--G", o.G, "Second-stage amplitude gain G (>= 1)");
  sub->add_option("--gq", o.gq, "Second-stage quantum noise gain, linear");
  sub->add_option("--gq-db", o.gq_db, "Second-stage quantum noise gain in dB (default 15)");
  sub->add_option("--L1", o.L1, "Stokes loss between the stages, in [0, 1]");
  sub->add_option("--L2", o.L2, "Spin-wave loss between the stages, in [0, 1]");
  sub->add_option("--output-loss", o.output_loss, "Stokes loss after the second stage, in [0, 1]");
}

bool given(const CLI::App* sub, const std::string& flag) { return sub->get_option(flag)->count() > 0; }

// Fills options absent from the command line with values from `path`.
void apply_config_file(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = raw.substr(0, hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "config line must read 'key = value'");
    auto strip = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r\"");
      if (first == std::string::npos) return std::string{};
      const auto last = s.find_last_not_of(" \t\r\"");
      return s.substr(first, last - first + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key == "config") throw ParseError(line_no, "config files cannot include other config files");
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw ParseError(line_no, "unknown config key '" + key + "' for " + sub->get_name());
    if (opt->count() == 0) {
      opt->add_result(value);
      opt->run_callback();
    }
  }
}

void require_field(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw UsageError("invalid --" + field + ": " + what);
}

double resolve_mu(const CLI::App* sub, const ScenarioOptions& o) {
  if (given(sub, "--pump-power")) {
    require_field(!given(sub, "--mu"), "pump-power", "give either --mu or --pump-power, not both");
    require_field(o.pump_power >= 0.0, "pump-power", "must be >= 0");
    return model::mu_from_pump_power(o.pump_power, o.pump_scale);
  }
  require_field(o.mu >= 1.0, "mu", "must be >= 1");
  return o.mu;
}

model::AmplifierParams resolve_ra2(const CLI::App* sub, const ScenarioOptions& o) {
  const int n = static_cast<int>(given(sub, "--G")) + static_cast<int>(given(sub, "--gq")) +
                static_cast<int>(given(sub, "--gq-db"));
  require_field(n <= 1, "G", "give only one of --G, --gq, --gq-db");
  if (given(sub, "--G")) {
    require_field(o.G >= 1.0, "G", "must be >= 1");
    return model::AmplifierParams::from_gain(o.G);
  }
  if (given(sub, "--gq")) {
    require_field(o.gq >= 1.0, "gq", "must be >= 1");
    return model::AmplifierParams::from_quantum_gain(o.gq);
  }
  require_field(o.gq_db >= 0.0, "gq-db", "must be >= 0");
  return model::AmplifierParams::from_quantum_gain(gaussian::from_db(o.gq_db));
}

model::ChannelParams resolve_channel(const ScenarioOptions& o) {
  require_field(o.L1 >= 0.0 && o.L1 <= 1.0, "L1", "must lie in [0, 1]");
  require_field(o.L2 >= 0.0 && o.L2 <= 1.0, "L2", "must lie in [0, 1]");
  require_field(o.output_loss >= 0.0 && o.output_loss <= 1.0, "output-loss", "must lie in [0, 1]");
  return {o.L1, o.L2, 0.0, o.output_loss};
}

void echo_scenario(Echo& echo, const model::CascadeScenario& s) {
  echo.add("mu", s.ra1.gain_G);
  echo.add("nu", s.ra1.gain_g);
  echo.add("G", s.ra2.gain_G);
  echo.add("g", s.ra2.gain_g);
  echo.add("gq_linear", s.ra2.quantum_noise_gain());
  echo.add("L1", s.channel.loss_stokes);
  echo.add("L2", s.channel.loss_spinwave);
  echo.add("output_loss", s.channel.output_loss);
}

void require_points(std::size_t points, std::size_t minimum) {
  require_field(points >= minimum, "points", "must be >= " + std::to_string(minimum));
}

std::vector<double> spaced(double from, double to, std::size_t n, const std::string& spacing) {
  std::vector<double> v;
  if (n == 1) return {from};
  for (std::size_t k = 0; k < n; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n - 1);
    v.push_back(spacing == "log" ? from * std::pow(to / from, f) : from + f * (to - from));
  }
  return v;
}

// Noise scan ---------------------------------------------------------------

struct NoiseScanCommand {
  CommonOptions common;
  ScenarioOptions scenario;
  std::size_t points = 128;

  void attach(CLI::App* sub) {
    add_common(sub, common);
    add_scenario(sub, scenario);
    sub->add_option("--points", points, "Phase samples over [0, 2 pi)");
    sub->add_option("--lo-phase", scenario.lo_phase, "Local-oscillator phase, radians");
  }

  void run(const CLI::App* sub, std::ostream& os) const {
    require_points(points, 2);
    model::CascadeScenario s{model::AmplifierParams::from_gain(resolve_mu(sub, scenario)), resolve_ra2(sub, scenario),
                             resolve_channel(scenario), {}};
    const double reference = model::uncorrelated_reference(s, scenario.lo_phase);
    Echo echo("noise-scan");
    echo_scenario(echo, s);
    echo.add("lo_phase", scenario.lo_phase);
    echo.add("points", std::to_string(points));
    echo.add("seed", std::to_string(common.seed));
    echo.add("uncorrelated_reference", reference);
    echo.add("uncorrelated_reference_db", gaussian::to_db(reference));
    echo.write(os);
    os << "phi_rad,variance_linear,variance_db\n";
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < points; ++k) {
      model::CascadeScenario at = s;
      at.channel.scan_phase = two_pi * static_cast<double>(k) / static_cast<double>(points);
      const double v = model::simulate_cascade_noise(at, scenario.lo_phase);
      os << num(at.channel.scan_phase) << ',' << num(v) << ',' << num(gaussian::to_db(v)) << '\n';
    }
  }
};

// Gain sweep ---------------------------------------------------------------

struct GainSweepCommand {
  CommonOptions common;
  ScenarioOptions scenario;
  std::string sweep = "mu";
  std::string spacing = "linear";
  double from = 1.0;
  double to = 2.0;
  std::size_t points = 16;

  void attach(CLI::App* sub) {
    add_common(sub, common);
    add_scenario(sub, scenario);
    sub->add_option("--sweep", sweep, "Swept variable: mu, pump-power or gq")
        ->check(CLI::IsMember({"mu", "pump-power", "gq"}));
    sub->add_option("--from", from, "First sweep value");
    sub->add_option("--to", to, "Last sweep value");
    sub->add_option("--points", points, "Number of sweep values");
    sub->add_option("--spacing", spacing, "linear or log")->check(CLI::IsMember({"linear", "log"}));
  }

  void run(const CLI::App* sub, std::ostream& os) const {
    require_points(points, 1);
    if (spacing == "log") require_field(from > 0.0 && to > 0.0, "from", "log spacing needs positive bounds");
    const std::vector<double> values = spaced(from, to, points, spacing);
    const model::ChannelParams channel = resolve_channel(scenario);

    Echo echo("gain-sweep");
    echo.add("sweep", sweep);
    echo.add("from", from);
    echo.add("to", to);
    echo.add("points", std::to_string(points));
    echo.add("spacing", spacing);
    echo.add("L1", channel.loss_stokes);
    echo.add("L2", channel.loss_spinwave);
    echo.add("output_loss", channel.output_loss);
    echo.add("seed", std::to_string(common.seed));

    std::vector<std::pair<double, model::CascadeScenario>> rows;
    if (sweep == "gq") {
      const double mu = resolve_mu(sub, scenario);
      echo.add("mu", mu);
      for (double gq : values) {
        require_field(gq >= 1.0, "from", "gq sweep values must be >= 1");
        rows.push_back({gq, {model::AmplifierParams::from_gain(mu), model::AmplifierParams::from_quantum_gain(gq),
                             channel, {}}});
      }
    } else {
      const model::AmplifierParams ra2 = resolve_ra2(sub, scenario);
      echo.add("gq_linear", ra2.quantum_noise_gain());
      if (sweep == "pump-power") echo.add("pump_scale", scenario.pump_scale);
      for (double v : values) {
        double mu = v;
        if (sweep == "pump-power") {
          require_field(v >= 0.0, "from", "pump power must be >= 0");
          mu = model::mu_from_pump_power(v, scenario.pump_scale);
        }
        require_field(mu >= 1.0, "from", "mu sweep values must be >= 1");
        rows.push_back({v, {model::AmplifierParams::from_gain(mu), ra2, channel, {}}});
      }
    }
    echo.write(os);
    os << "sweep_value,gq_linear,R_linear,R_db\n";
    for (const auto& [x, s] : rows) {
      const double r = model::noise_reduction_ratio(s);
      os << num(x) << ',' << num(s.ra2.quantum_noise_gain()) << ',' << num(r) << ',' << num(gaussian::to_db(r)) << '\n';
    }
  }
};

// Fit ----------------------------------------------------------------------

struct FitCommand {
  CommonOptions common;
  std::string input;
  double mu_max = 10.0;
  int starts = 16;
  int bootstrap = 0;
  bool shared_losses = false;
  std::string format = "text";

  void attach(CLI::App* sub) {
    add_common(sub, common);
    sub->add_option("input,--in", input, "CSV with gq_linear and R_linear columns ('-' for stdin)");
    sub->add_option("--mu-max", mu_max, "Upper bound on mu");
    sub->add_option("--starts", starts, "Number of multi-start points (>= 16)");
    sub->add_option("--bootstrap", bootstrap, "Residual bootstrap resamples (0 = off, else >= 100)");
    sub->add_flag("--shared-losses", shared_losses, "Fit all labels jointly with common L1, L2");
    sub->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  }

  void run(const CLI::App*, std::ostream& os, std::istream& stdin_stream) const {
    require_field(!input.empty(), "in", "an input CSV is required");
    require_field(starts >= 16, "starts", "must be >= 16");
    require_field(mu_max > 1.0, "mu-max", "must be > 1");
    require_field(bootstrap == 0 || bootstrap >= 100, "bootstrap", "must be 0 or >= 100");

    std::vector<fit::NoiseDataset> datasets;
    if (input == "-") {
      datasets = io::read_datasets(stdin_stream);
    } else {
      std::ifstream in(input);
      if (!in) throw UsageError("cannot open input file '" + input + "'");
      datasets = io::read_datasets(in);
    }
    const fit::FitConfig config{mu_max, starts, common.seed};

    std::vector<fit::FitResult> results;
    std::vector<std::optional<fit::BootstrapResult>> boots;
    if (shared_losses) {
      results = fit::fit_shared_losses(datasets, config).per_dataset;
      boots.resize(results.size());
    } else {
      for (const fit::NoiseDataset& d : datasets) {
        results.push_back(fit::fit_dataset(d, config));
        if (bootstrap > 0) {
          boots.emplace_back(fit::bootstrap_uncertainty(d, results.back(), bootstrap, config));
        } else {
          boots.emplace_back();
        }
      }
    }

    Echo echo("fit");
    echo.add("input", input);
    echo.add("mu_max", mu_max);
    echo.add("starts", std::to_string(starts));
    echo.add("bootstrap", std::to_string(bootstrap));
    echo.add("shared_losses", shared_losses ? "true" : "false");
    echo.add("seed", std::to_string(common.seed));
    echo.write(os);

    if (format == "csv") {
      os << "label,points,mu_hat,nu_hat,L1_hat,L2_hat,residual_rms,correlation_x_plus,correlation_db,"
            "db_ci_lower,db_ci_upper\n";
      for (std::size_t i = 0; i < results.size(); ++i) {
        const fit::FitResult& r = results[i];
        os << r.label << ',' << datasets[i].size() << ',' << num(r.mu_hat) << ',' << num(r.nu_hat) << ','
           << num(r.L1_hat) << ',' << num(r.L2_hat) << ',' << num(r.residual_rms) << ','
           << num(r.correlation_x_plus) << ',' << num(r.correlation_db) << ','
           << (boots[i] ? num(boots[i]->db_lower) : "") << ',' << (boots[i] ? num(boots[i]->db_upper) : "") << '\n';
      }
      return;
    }
    for (std::size_t i = 0; i < results.size(); ++i) {
      const fit::FitResult& r = results[i];
      os << "dataset: " << r.label << "\n"
         << "points: " << datasets[i].size() << "\n"
         << "mu_hat: " << num(r.mu_hat) << "\n"
         << "nu_hat: " << num(r.nu_hat) << "\n"
         << "L1_hat: " << num(r.L1_hat) << "\n"
         << "L2_hat: " << num(r.L2_hat) << "\n"
         << "objective: " << num(r.objective) << "\n"
         << "residual_rms: " << num(r.residual_rms) << "\n"
         << "restarts: " << r.n_restarts_used << "\n";
      if (!shared_losses) {
        os << "projected_gradient_norm: " << num(r.projected_gradient_norm) << "\n"
           << "swap_objective: " << num(r.swap_objective) << "\n"
           << "swap_degenerate: " << (r.swap_degenerate ? "yes" : "no") << "\n";
        const Eigen::Matrix3d& c = r.covariance_estimate;
        for (int row = 0; row < 3; ++row) {
          os << "covariance_row_" << row << ": " << num(c(row, 0)) << ' ' << num(c(row, 1)) << ' '
             << num(c(row, 2)) << "\n";
        }
      }
      os << "correlation_x_plus: " << num(r.correlation_x_plus) << "\n"
         << "correlation_db: " << num(r.correlation_db) << "\n";
      if (boots[i]) {
        os << "bootstrap_resamples: " << boots[i]->n_resamples << "\n"
           << "bootstrap_failed: " << boots[i]->n_failed << "\n"
           << "correlation_db_ci95: " << num(boots[i]->db_lower) << ' ' << num(boots[i]->db_upper) << "\n";
      }
      if (i + 1 < results.size()) os << "\n";
    }
  }
};

// Correlation --------------------------------------------------------------

struct CorrelationCommand {
  CommonOptions common;
  ScenarioOptions scenario;
  double R = 1.0;

  void attach(CLI::App* sub) {
    add_common(sub, common);
    add_scenario(sub, scenario);
    sub->add_option("--R", R, "Measured noise reduction ratio for a single-point estimate");
  }

  void run(const CLI::App* sub, std::ostream& os) const {
    Echo echo("correlation");
    const bool single_point = given(sub, "--R");
    const bool from_params = !single_point || given(sub, "--mu") || given(sub, "--pump-power");
    std::vector<std::pair<std::string, double>> rows;
    if (from_params) {
      const double mu = resolve_mu(sub, scenario);
      const model::ChannelParams ch = resolve_channel(scenario);
      echo.add("mu", mu);
      echo.add("L1", ch.loss_stokes);
      echo.add("L2", ch.loss_spinwave);
      rows.emplace_back("extrapolated", model::correlation_from_params(mu, ch.loss_stokes, ch.loss_spinwave));
    }
    if (single_point) {
      require_field(R > 0.0, "R", "must be > 0");
      const model::AmplifierParams ra2 = resolve_ra2(sub, scenario);
      echo.add("R", R);
      echo.add("gq_linear", ra2.quantum_noise_gain());
      rows.emplace_back("finite_lambda", fit::finite_lambda_correlation(R, ra2.quantum_noise_gain()));
    }
    echo.write(os);
    os << "method,x_plus,db\n";
    for (const auto& [method, x] : rows) {
      os << method << ',' << num(x) << ',' << num(gaussian::to_db(x / 2.0)) << '\n';
    }
  }
};

// Fringes ------------------------------------------------------------------

struct FringesCommand {
  CommonOptions common;
  ScenarioOptions scenario;
  double seed_amplitude = 0.0;
  double seed_phase = 0.0;
  std::size_t points = 128;

  void attach(CLI::App* sub) {
    add_common(sub, common);
    add_scenario(sub, scenario);
    sub->add_option("--seed-amplitude", seed_amplitude, "Coherent seed |alpha| at the first-stage Stokes input");
    sub->add_option("--seed-phase", seed_phase, "Phase of the seed, radians");
    sub->add_option("--points", points, "Phase samples over [0, 2 pi)");
  }

  void run(const CLI::App* sub, std::ostream& os) const {
    if (seed_amplitude == 0.0) {
      throw UsageError("fringes needs a nonzero --seed-amplitude; use noise-scan for unseeded phase scans");
    }
    require_points(points, 3);
    model::CascadeScenario s{model::AmplifierParams::from_gain(resolve_mu(sub, scenario)), resolve_ra2(sub, scenario),
                             resolve_channel(scenario), std::polar(seed_amplitude, seed_phase)};
    const model::FringeTrace trace = model::fringe_scan(s, points);
    Echo echo("fringes");
    echo_scenario(echo, s);
    echo.add("seed_amplitude", seed_amplitude);
    echo.add("seed_phase", seed_phase);
    echo.add("points", std::to_string(points));
    echo.add("seed", std::to_string(common.seed));
    echo.add("visibility", trace.visibility());
    echo.add("visibility_formula", model::fringe_visibility_formula(s));
    echo.write(os);
    os << "phi_rad,intensity,background\n";
    for (const model::FringePoint& p : trace.points) {
      os << num(p.phi) << ',' << num(p.intensity) << ',' << num(p.background) << '\n';
    }
  }
};

// Oracle check -------------------------------------------------------------

struct OracleCheckCommand {
  CommonOptions common;
  std::string battery = "standard";
  int n_max_start = 40;
  int n_max_cap = 160;
  double tolerance = 1e-6;

  void attach(CLI::App* sub) {
    add_common(sub, common);
    sub->add_option("--battery", battery, "standard or vacuum")->check(CLI::IsMember({"standard", "vacuum"}));
    sub->add_option("--n-max-start", n_max_start, "Initial Fock truncation");
    sub->add_option("--n-max-cap", n_max_cap, "Largest Fock truncation tried");
    sub->add_option("--tolerance", tolerance, "Pass threshold on max |Gaussian - Fock|");
  }

  bool run(std::ostream& os, const Hooks& hooks) const {
    require_field(n_max_start >= 1, "n-max-start", "must be >= 1");
    require_field(n_max_cap >= n_max_start, "n-max-cap", "must be >= --n-max-start");
    const auto cases = battery == "standard" ? oracle::standard_battery() : oracle::vacuum_battery();
    const oracle::OracleReport report = oracle::run_battery(cases, hooks.engine, {n_max_start, n_max_cap});
    Echo echo("oracle-check");
    echo.add("battery", battery);
    echo.add("n_max_start", std::to_string(n_max_start));
    echo.add("n_max_cap", std::to_string(n_max_cap));
    echo.add("tolerance", tolerance);
    echo.write(os);
    std::map<int, int> truncations;
    for (const auto& o : report.outcomes) ++truncations[o.n_max];
    os << "cases: " << report.outcomes.size() << "\n";
    for (const auto& [n, count] : truncations) os << "cases_at_n_max_" << n << ": " << count << "\n";
    os << "max_deviation: " << fmt::format("{:.3e}", report.max_deviation) << "\n";
    if (!report.outcomes.empty()) {
      const auto& w = report.outcomes[report.worst_index];
      os << "worst_case: " << w.test_case.label() << "\n"
         << "worst_gaussian: " << num(w.gaussian) << "\n"
         << "worst_fock: " << num(w.fock) << "\n";
    }
    const bool ok = report.passed(tolerance);
    os << "result: " << (ok ? "PASS" : "FAIL") << "\n";
    return ok;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks) {
  CLI::App app{"Two-stage Raman amplifier noise simulator"};
  app.require_subcommand(1);

  NoiseScanCommand noise_scan;
  GainSweepCommand gain_sweep;
  FitCommand fit_cmd;
  CorrelationCommand correlation;
  FringesCommand fringes;
  OracleCheckCommand oracle_check;

  CLI::App* s_noise = app.add_subcommand("noise-scan", "Output noise versus inter-stage phase");
  CLI::App* s_sweep = app.add_subcommand("gain-sweep", "Noise reduction versus mu, pump power or gq");
  CLI::App* s_fit = app.add_subcommand("fit", "Fit (gq, R) data for mu, L1, L2 and the atom-light correlation");
  CLI::App* s_corr = app.add_subcommand("correlation", "Joint quadrature variance from parameters or one point");
  CLI::App* s_fringe = app.add_subcommand("fringes", "Seeded interference fringes versus phase");
  CLI::App* s_oracle = app.add_subcommand("oracle-check", "Gaussian engine versus Fock oracle");
  noise_scan.attach(s_noise);
  gain_sweep.attach(s_sweep);
  fit_cmd.attach(s_fit);
  correlation.attach(s_corr);
  fringes.attach(s_fringe);
  oracle_check.attach(s_oracle);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const CommonOptions& common = sub == s_noise    ? noise_scan.common
                                : sub == s_sweep  ? gain_sweep.common
                                : sub == s_fit    ? fit_cmd.common
                                : sub == s_corr   ? correlation.common
                                : sub == s_fringe ? fringes.common
                                                  : oracle_check.common;
  try {
    if (!common.config.empty()) apply_config_file(sub, common.config);

    std::ostringstream body;
    bool ok = true;
    if (sub == s_noise) {
      noise_scan.run(sub, body);
    } else if (sub == s_sweep) {
      gain_sweep.run(sub, body);
    } else if (sub == s_fit) {
      fit_cmd.run(sub, body, std::cin);
    } else if (sub == s_corr) {
      correlation.run(sub, body);
    } else if (sub == s_fringe) {
      fringes.run(sub, body);
    } else {
      ok = oracle_check.run(body, hooks);
    }

    if (common.out == "-") {
      out << body.str();
    } else {
      std::ofstream file(common.out, std::ios::binary);
      if (!file) throw UsageError("cannot write output file '" + common.out + "'");
      file << body.str();
    }
    return ok ? kExitOk : kExitNumerical;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TruncationError& e) {
    err << "error: Fock truncation: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const UnstableFit& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace raman::cli
