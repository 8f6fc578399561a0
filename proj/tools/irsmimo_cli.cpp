// SPDX-License-Identifier: Apache-2.0
//
// Command line front end. Subcommands sweep the closed-form quantities and,
// where requested, cross-check them against the Monte-Carlo sampler. Output
// is deterministic CSV: identical config and seed give byte-identical files.

#include <irsmimo/monte_carlo.hpp>
#include <irsmimo/outage_dmt.hpp>
#include <irsmimo/phase_optimizer.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace {

using irsmimo::CMat;
using irsmimo::Vec;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNonConvergence = 4;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

std::string fmt(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> units;
  int threads = 1;
};

struct Units {
  bool bits = true;
  double from_nats(double nats) const { return bits ? nats / irsmimo::kNatsPerBit : nats; }
  const char* suffix() const { return bits ? "_bits" : "_nats"; }
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return cfg;
}

const json& require_block(const json& cfg, const char* name) {
  auto it = cfg.find(name);
  if (it == cfg.end()) throw ConfigError(std::string("missing config block: ") + name);
  return *it;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field has wrong type: ") + key);
  }
}

template <typename T>
T require_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("missing config field: ") + key);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field has wrong type: ") + key);
  }
}

// Whitespace-separated complex pairs "re im", row-major.
CMat read_matrix_file(const std::string& path, int rows, int cols) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file: " + path);
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double re, im;
      if (!(in >> re >> im)) {
        throw ConfigError("matrix file too short: " + path);
      }
      m(i, j) = std::complex<double>(re, im);
    }
  }
  return m;
}

irsmimo::SystemDims parse_dims(const json& scenario) {
  const json& d = require_block(scenario, "dims");
  return irsmimo::SystemDims(require_field<int>(d, "m"), require_field<int>(d, "n"),
                             require_field<int>(d, "l"));
}

irsmimo::CorrelationSet parse_correlation(const json& scenario, const irsmimo::SystemDims& dims) {
  auto it = scenario.find("correlation");
  if (it == scenario.end()) return irsmimo::CorrelationSet::identity(dims);
  const json& c = *it;
  auto one = [&](const char* mu_key, const char* file_key, int n) -> CMat {
    if (c.contains(file_key)) {
      return read_matrix_file(c[file_key].get<std::string>(), n, n);
    }
    return irsmimo::exponential_correlation(n, get_or<double>(c, mu_key, 0.0))
        .cast<std::complex<double>>();
  };
  return irsmimo::CorrelationSet(one("mu_rx_ue", "rx_ue_file", dims.n_rx),
                                 one("mu_tx_irs", "tx_irs_file", dims.n_irs),
                                 one("mu_rx_irs", "rx_irs_file", dims.n_irs),
                                 one("mu_tx_bs", "tx_bs_file", dims.n_tx));
}

irsmimo::PhaseShifts parse_theta(const json& scenario, int l) {
  auto it = scenario.find("theta");
  if (it == scenario.end()) return irsmimo::PhaseShifts::zeros(l);
  const std::string policy = get_or<std::string>(*it, "policy", "zeros");
  if (policy == "zeros") return irsmimo::PhaseShifts::zeros(l);
  if (policy == "ramp") return irsmimo::PhaseShifts::uniform_ramp(l);
  if (policy == "file") {
    const std::string path = require_field<std::string>(*it, "file");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open theta file: " + path);
    Vec theta(l);
    for (int i = 0; i < l; ++i) {
      if (!(in >> theta[i])) throw ConfigError("theta file too short: " + path);
    }
    return irsmimo::PhaseShifts(theta);
  }
  throw ConfigError("unknown theta policy: " + policy);
}

// Effective SNR from either an explicit value or a link budget; an optional
// transmit-power override supports power sweeps.
double parse_rho_eff(const json& scenario, const irsmimo::SystemDims& dims,
                     std::optional<double> p_dbm_override = std::nullopt) {
  if (scenario.contains("rho_eff") && !p_dbm_override) {
    return require_field<double>(scenario, "rho_eff");
  }
  if (scenario.contains("snr_db") && !p_dbm_override) {
    return irsmimo::db_to_linear(require_field<double>(scenario, "snr_db"));
  }
  const json& b = require_block(scenario, "link_budget");
  irsmimo::LinkBudget budget;
  budget.p_dbm = p_dbm_override ? *p_dbm_override : require_field<double>(b, "p_dbm");
  budget.sigma2_dbm = require_field<double>(b, "sigma2_dbm");
  budget.d_bs_irs = require_field<double>(b, "d_bs_irs");
  budget.d_irs_ue = require_field<double>(b, "d_irs_ue");
  budget.alpha_bs_irs = require_field<double>(b, "alpha_bs_irs");
  budget.alpha_irs_ue = require_field<double>(b, "alpha_irs_ue");
  budget.c0_db = get_or<double>(b, "c0_db", -30.0);
  return irsmimo::effective_snr(budget, dims);
}

irsmimo::Scenario parse_scenario(const json& cfg,
                                 std::optional<double> p_dbm_override = std::nullopt) {
  const json& sc = require_block(cfg, "scenario");
  const irsmimo::SystemDims dims = parse_dims(sc);
  return irsmimo::Scenario(dims, parse_correlation(sc, dims), parse_theta(sc, dims.n_irs),
                           parse_rho_eff(sc, dims, p_dbm_override));
}

// SNR points of a sweep, expressed as effective linear SNRs.
std::vector<double> sweep_snrs(const json& cfg) {
  const json& sc = require_block(cfg, "scenario");
  std::vector<double> rhos;
  if (cfg.contains("sweep")) {
    const json& sw = cfg["sweep"];
    if (sw.contains("snr_db")) {
      for (double v : sw["snr_db"].get<std::vector<double>>()) {
        rhos.push_back(irsmimo::db_to_linear(v));
      }
      return rhos;
    }
    if (sw.contains("p_dbm")) {
      const irsmimo::SystemDims dims = parse_dims(sc);
      for (double p : sw["p_dbm"].get<std::vector<double>>()) {
        rhos.push_back(parse_rho_eff(sc, dims, p));
      }
      return rhos;
    }
  }
  rhos.push_back(parse_rho_eff(sc, parse_dims(sc)));
  return rhos;
}

std::vector<double> rate_thresholds_nats(const json& cfg) {
  std::vector<double> rates;
  if (cfg.contains("sweep") && cfg["sweep"].contains("rate_bits")) {
    for (double b : cfg["sweep"]["rate_bits"].get<std::vector<double>>()) {
      rates.push_back(b * irsmimo::kNatsPerBit);
    }
  }
  return rates;
}

Units parse_units(const json& cfg, const GlobalOptions& opt) {
  std::string u = "bits";
  if (cfg.contains("output")) u = get_or<std::string>(cfg["output"], "units", u);
  if (opt.units) u = *opt.units;
  if (u != "bits" && u != "nats") throw ConfigError("units must be nats or bits");
  return Units{u == "bits"};
}

std::uint64_t parse_seed(const json& cfg, const GlobalOptions& opt) {
  if (opt.seed) return *opt.seed;
  if (cfg.contains("mc")) return get_or<std::uint64_t>(cfg["mc"], "seed", 1);
  return 1;
}

std::int64_t parse_samples(const json& cfg) {
  if (cfg.contains("mc")) return get_or<std::int64_t>(cfg["mc"], "samples", 100000);
  return 100000;
}

std::ofstream open_output(const GlobalOptions& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  const auto path = std::filesystem::path(opt.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  return out;
}

irsmimo::OptimizerConfig parse_optimizer(const json& cfg) {
  irsmimo::OptimizerConfig oc;
  if (cfg.contains("optimizer")) {
    const json& o = cfg["optimizer"];
    oc.alpha0 = get_or<double>(o, "alpha0", oc.alpha0);
    oc.shrink = get_or<double>(o, "shrink", oc.shrink);
    oc.control = get_or<double>(o, "control", oc.control);
    oc.max_outer = get_or<int>(o, "max_outer", oc.max_outer);
    oc.max_backtrack = get_or<int>(o, "max_backtrack", oc.max_backtrack);
    oc.grad_tol = get_or<double>(o, "grad_tol", oc.grad_tol);
  }
  return oc;
}

// ---------------------------------------------------------------------------

void cmd_emi(const json& cfg, const GlobalOptions& opt) {
  const Units units = parse_units(cfg, opt);
  const json& sc = require_block(cfg, "scenario");
  const irsmimo::SystemDims base_dims = parse_dims(sc);

  std::vector<int> l_grid;
  if (cfg.contains("sweep") && cfg["sweep"].contains("l_grid")) {
    l_grid = cfg["sweep"]["l_grid"].get<std::vector<int>>();
  } else {
    l_grid.push_back(base_dims.n_irs);
  }
  const std::vector<double> rhos = sweep_snrs(cfg);

  auto out = open_output(opt, "emi.csv");
  out << "l,snr_db,emi" << units.suffix() << ",emi_nats,emi_inf" << units.suffix() << ",eta\n";
  for (int l : l_grid) {
    const irsmimo::SystemDims dims(base_dims.n_tx, base_dims.n_rx, l);
    const irsmimo::CorrelationSet corr = parse_correlation(sc, dims);
    const irsmimo::PhaseShifts theta = parse_theta(sc, l);
    for (double rho : rhos) {
      const auto spectra = irsmimo::effective_spectra(dims, corr, theta, rho);
      const auto gm = irsmimo::gaussian_mi(spectra, dims, rho);
      const double mean_inf = irsmimo::asymptotic_limit(dims.n_rx, rho).mean_inf;
      out << l << ',' << fmt(10.0 * std::log10(rho)) << ',' << fmt(units.from_nats(gm.mean_nats))
          << ',' << fmt(gm.mean_nats) << ',' << fmt(units.from_nats(mean_inf)) << ','
          << fmt(irsmimo::irs_efficiency(gm.mean_nats, mean_inf)) << '\n';
    }
  }
}

void cmd_outage(const json& cfg, const GlobalOptions& opt) {
  const Units units = parse_units(cfg, opt);
  const irsmimo::Scenario scenario = parse_scenario(cfg);
  const std::vector<double> rates = rate_thresholds_nats(cfg);
  const std::uint64_t seed = parse_seed(cfg, opt);

  const auto spectra = scenario.spectra();
  const auto fp = irsmimo::solve_canonical(spectra, scenario.dims, scenario.rho_eff);
  const auto tq = irsmimo::table_quantities(spectra, scenario.dims, fp, scenario.rho_eff);
  const double mean = irsmimo::emi(spectra, scenario.dims, fp, scenario.rho_eff);
  const double var_large = irsmimo::variance(tq, irsmimo::VarianceVariant::large_irs);
  const double var_small = irsmimo::variance(tq, irsmimo::VarianceVariant::small_irs);

  irsmimo::MiSampler sampler(scenario);
  irsmimo::SamplerSpec spec;
  spec.seed = seed;
  spec.n_samples = parse_samples(cfg);
  spec.n_streams = opt.threads;
  const auto stats = sampler.estimate(spec, rates);

  auto out = open_output(opt, "outage.csv");
  out << "rate_threshold" << units.suffix()
      << ",p_out_theory,p_out_theory_small_irs,p_out_mc,mc_ci_low,mc_ci_high\n";
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double r = rates[i];
    out << fmt(units.from_nats(r)) << ','
        << fmt(irsmimo::outage_probability(mean, var_large, r).p_out) << ','
        << fmt(irsmimo::outage_probability(mean, var_small, r).p_out) << ','
        << fmt(stats.outage[i].p_hat) << ',' << fmt(stats.outage[i].ci_low) << ','
        << fmt(stats.outage[i].ci_high) << '\n';
  }
}

void cmd_optimize(const json& cfg, const GlobalOptions& opt) {
  const Units units = parse_units(cfg, opt);
  const irsmimo::Scenario scenario = parse_scenario(cfg);
  const irsmimo::OptimizerConfig oc = parse_optimizer(cfg);

  std::optional<double> rate;
  if (cfg.contains("optimizer") && cfg["optimizer"].contains("rate_bits")) {
    rate = cfg["optimizer"]["rate_bits"].get<double>() * irsmimo::kNatsPerBit;
  } else {
    const auto rates = rate_thresholds_nats(cfg);
    if (!rates.empty()) rate = rates.front();
  }
  if (!rate) throw ConfigError("optimize needs a rate threshold (optimizer.rate_bits)");

  const auto result = irsmimo::optimize(scenario, scenario.phases, *rate, oc);

  auto out = open_output(opt, "optimize.csv");
  out << "iteration,objective\n";
  for (std::size_t i = 0; i < result.trajectory.size(); ++i) {
    out << i << ',' << fmt(result.trajectory[i]) << '\n';
  }

  auto theta_out = open_output(opt, "theta_final.txt");
  for (Eigen::Index i = 0; i < result.theta_star.theta().size(); ++i) {
    theta_out << fmt(result.theta_star.theta()[i], 17) << '\n';
  }
  (void)units;
  if (result.backtracking_exhausted && result.iterations == 0) {
    throw irsmimo::NonConvergence("line search made no progress from the initial point");
  }
}

void cmd_dmt(const json& cfg, const GlobalOptions& opt) {
  const irsmimo::Scenario scenario = parse_scenario(cfg);
  const auto spectra = scenario.spectra();
  const int k = std::min({scenario.dims.n_irs, scenario.dims.n_tx, scenario.dims.n_rx});
  const double rho = scenario.rho_eff;

  std::vector<double> m_grid;
  if (cfg.contains("sweep") && cfg["sweep"].contains("m_grid")) {
    m_grid = cfg["sweep"]["m_grid"].get<std::vector<double>>();
  } else {
    for (int i = 0; i <= 8; ++i) m_grid.push_back(k * i / 8.0);
  }

  // Numeric reference slope: central difference of log outage over +-0.1 dB,
  // with the rate re-anchored to the local mean at each perturbed SNR.
  auto log_pout_at = [&](double rho_pt, double m) {
    const auto gm = irsmimo::gaussian_mi(spectra, scenario.dims, rho_pt);
    const double r = m * gm.mean_nats / k;
    return irsmimo::log_norm_cdf((r - gm.mean_nats) / std::sqrt(gm.var_nats2));
  };
  const double dlog = 0.1 / 10.0 * std::log(10.0);

  auto out = open_output(opt, "dmt.csv");
  out << "m,d_closed_form,d_quick_approx,d_numeric_slope\n";
  for (double m : m_grid) {
    const auto pt = irsmimo::finite_snr_dmt(m, rho, spectra, scenario.dims);
    const double quick = irsmimo::dmt_quick_approx(m, rho, spectra, scenario.dims);
    double slope = 0.0;
    if (m < k) {
      slope = -(log_pout_at(rho * std::exp(dlog), m) - log_pout_at(rho * std::exp(-dlog), m)) /
              (2.0 * dlog);
    }
    out << fmt(m) << ',' << fmt(pt.d) << ',' << fmt(quick) << ',' << fmt(slope) << '\n';
  }
}

void cmd_size(const json& cfg, const GlobalOptions& opt) {
  const json& sc = require_block(cfg, "scenario");
  const irsmimo::SystemDims dims = parse_dims(sc);
  const std::vector<double> rhos = sweep_snrs(cfg);

  std::vector<double> etas;
  if (cfg.contains("sweep") && cfg["sweep"].contains("eta_targets")) {
    etas = cfg["sweep"]["eta_targets"].get<std::vector<double>>();
  } else {
    etas = {0.9, 0.95};
  }
  std::set<double> dedup(etas.begin(), etas.end());

  auto out = open_output(opt, "size.csv");
  out << "snr_db,eta,l_min\n";
  for (double rho : rhos) {
    for (double eta : dedup) {
      const auto ans = irsmimo::min_irs_size(eta, dims.n_rx, rho);
      if (!ans.reachable) {
        throw irsmimo::NumericalError("eta target unreachable within the sizing search cap");
      }
      out << fmt(10.0 * std::log10(rho)) << ',' << fmt(eta) << ',' << ans.l_min << '\n';
    }
  }
}

void cmd_mc_validate(const json& cfg, const GlobalOptions& opt) {
  const irsmimo::Scenario scenario = parse_scenario(cfg);
  const std::vector<double> rates = rate_thresholds_nats(cfg);
  const std::uint64_t seed = parse_seed(cfg, opt);

  double tol_mean = 0.02, tol_var = 0.10, ks_max = 0.02;
  if (cfg.contains("mc")) {
    tol_mean = get_or<double>(cfg["mc"], "tol_mean_rel", tol_mean);
    tol_var = get_or<double>(cfg["mc"], "tol_var_rel", tol_var);
    ks_max = get_or<double>(cfg["mc"], "ks_max", ks_max);
  }

  const auto spectra = scenario.spectra();
  const auto gm = irsmimo::gaussian_mi(spectra, scenario.dims, scenario.rho_eff);

  irsmimo::MiSampler sampler(scenario);
  irsmimo::SamplerSpec spec;
  spec.seed = seed;
  spec.n_samples = parse_samples(cfg);
  spec.n_streams = opt.threads;
  const auto stats = sampler.estimate(spec, rates);

  auto out = open_output(opt, "mc_validate.csv");
  out << "quantity,theory,empirical,tolerance,pass\n";
  auto row = [&](const char* name, double theory, double emp, double tol, bool pass) {
    out << name << ',' << fmt(theory) << ',' << fmt(emp) << ',' << fmt(tol) << ','
        << (pass ? "true" : "false") << '\n';
  };
  row("mean_nats", gm.mean_nats, stats.mean, tol_mean,
      std::abs(stats.mean - gm.mean_nats) <= tol_mean * std::abs(gm.mean_nats));
  row("var_nats2", gm.var_nats2, stats.variance, tol_var,
      stats.variance_defined &&
          std::abs(stats.variance - gm.var_nats2) <= tol_var * gm.var_nats2);
  row("ks_distance", 0.0, stats.ks_distance, ks_max, stats.ks_distance <= ks_max);
  for (const auto& oe : stats.outage) {
    const double p_theory =
        irsmimo::outage_probability(gm.mean_nats, gm.var_nats2, oe.rate_threshold_nats).p_out;
    const bool pass = p_theory >= oe.ci_low && p_theory <= oe.ci_high;
    const std::string name = "p_out@" + fmt(oe.rate_threshold_nats, 6) + "_nats";
    row(name.c_str(), p_theory, oe.p_hat, 0.0, pass);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form outage, mutual information and DMT analysis for IRS-aided MIMO"};
  app.require_subcommand(1);

  GlobalOptions opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON configuration file")->required();
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { opt.seed = v; }, "RNG seed override");
    sub->add_option_function<std::string>(
        "--units", [&](const std::string& v) { opt.units = v; }, "Output units: nats|bits");
    sub->add_option("--threads", opt.threads, "Worker thread count");
  };

  auto* emi_cmd = app.add_subcommand("emi", "Mean mutual information sweep");
  auto* outage_cmd = app.add_subcommand("outage", "Outage probability, theory vs Monte Carlo");
  auto* optimize_cmd = app.add_subcommand("optimize", "Phase shift optimization");
  auto* dmt_cmd = app.add_subcommand("dmt", "Finite-SNR diversity-multiplexing tradeoff");
  auto* size_cmd = app.add_subcommand("size", "Minimum IRS size for an efficiency target");
  auto* mc_cmd = app.add_subcommand("mc-validate", "Monte-Carlo validation table");
  for (auto* sub : {emi_cmd, outage_cmd, optimize_cmd, dmt_cmd, size_cmd, mc_cmd}) {
    add_common(sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const json cfg = load_config(opt.config_path);
    if (emi_cmd->parsed()) cmd_emi(cfg, opt);
    if (outage_cmd->parsed()) cmd_outage(cfg, opt);
    if (optimize_cmd->parsed()) cmd_optimize(cfg, opt);
    if (dmt_cmd->parsed()) cmd_dmt(cfg, opt);
    if (size_cmd->parsed()) cmd_size(cfg, opt);
    if (mc_cmd->parsed()) cmd_mc_validate(cfg, opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const irsmimo::NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const irsmimo::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
