#include "starnet/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "starnet/chain.hpp"
#include "starnet/entangle.hpp"
#include "starnet/experiments.hpp"
#include "starnet/lindblad.hpp"
#include "starnet/seed.hpp"
#include "starnet/star.hpp"

namespace starnet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class IoFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class Csv {
public:
  explicit Csv(std::vector<std::string> header) : width_(header.size()) { add(std::move(header)); }

  void add(std::vector<std::string> row) {
    if (row.size() != width_) throw std::logic_error("csv row width mismatch");
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += ',';
      line += row[i];
    }
    text_ += line + '\n';
  }

  const std::string& text() const { return text_; }

private:
  std::size_t width_;
  std::string text_;
};

std::string num(double v) { return format_number(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string num(std::uint64_t v, bool) { return std::to_string(v); }

std::string join_sites(const std::vector<int>& sites) {
  std::string s;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(sites[i]);
  }
  return s;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Session {
public:
  explicit Session(const config::RunConfig& cfg) : cfg_(cfg), out_(cfg.get("out")) {}

  void write(const std::string& name, const std::string& text) {
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec) throw IoFailure("cannot create output directory '" + out_.string() + "': " + ec.message());
    std::ofstream f(out_ / name, std::ios::binary | std::ios::trunc);
    if (!f) throw IoFailure("cannot open '" + (out_ / name).string() + "' for writing");
    f << text;
    f.close();
    if (!f) throw IoFailure("write failed for '" + (out_ / name).string() + "'");
    written_.push_back(name);
  }

  void write(const std::string& name, const Csv& csv) { write(name, csv.text()); }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  void note(const std::string& text) { notes_.push_back(text); }

  void finish(double wall_time_s) {
    json manifest;
    manifest["command"] = cfg_.command;
    manifest["config"] = cfg_.echo();
    manifest["config_hash"] = cfg_.hash();
    manifest["seed"] = cfg_.get_u64("seed");
    manifest["version"] = STARNET_VERSION;
    manifest["wall_time_s"] = wall_time_s;
    std::vector<std::string> outputs = written_;
    outputs.push_back("manifest.json");
    std::sort(outputs.begin(), outputs.end());
    manifest["outputs"] = outputs;
    manifest["notes"] = notes_;
    write_json("manifest.json", manifest);
  }

private:
  const config::RunConfig& cfg_;
  fs::path out_;
  std::vector<std::string> written_;
  std::vector<std::string> notes_;
};

// Config -> module specs

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<int> chain_lengths(const config::RunConfig& cfg) {
  auto ms = sorted_unique(cfg.get_int_list("m"));
  if (ms.empty()) throw InvalidArgument("config: 'm' must list at least one chain length");
  for (int m : ms) {
    if (m < 1) throw InvalidArgument("config: chain lengths must be >= 1");
  }
  return ms;
}

int single_m(const config::RunConfig& cfg) {
  const auto ms = cfg.get_int_list("m");
  if (ms.size() != 1) throw InvalidArgument("config: '" + cfg.command + "' takes exactly one chain length");
  if (ms[0] < 1) throw InvalidArgument("config: chain length must be >= 1");
  return ms[0];
}

std::vector<double> t2_list_s(const config::RunConfig& cfg) {
  auto t2 = sorted_unique(cfg.get_double_list("t2_ms"));
  if (t2.empty()) throw InvalidArgument("config: 't2_ms' must list at least one value");
  for (double& v : t2) {
    if (!(v > 0.0)) throw InvalidArgument("config: T2 must be positive");
    v *= 1e-3;
  }
  return t2;
}

lindblad::NoiseSpec single_noise(const config::RunConfig& cfg) {
  const auto t2 = t2_list_s(cfg);
  if (t2.size() != 1) throw InvalidArgument("config: '" + cfg.command + "' takes exactly one T2 value");
  return lindblad::NoiseSpec{t2[0]};
}

chain::ChainSpec base_chain(const config::RunConfig& cfg) {
  chain::ChainSpec spec;
  spec.spacing_nm = cfg.get_double("r_nm");
  spec.delta_ratio = cfg.get_double("delta_ratio");
  spec.kappa_hz = cfg.get_double("kappa_hz");
  spec.include_nnn = cfg.get_bool("nnn");
  const std::string rule = cfg.get("neighbor_rule");
  if (rule == "survivor") {
    spec.neighbor_rule = chain::NeighborRule::SurvivorOrder;
  } else if (rule == "lattice") {
    spec.neighbor_rule = chain::NeighborRule::LatticeIndex;
  } else {
    throw InvalidArgument("config: neighbor_rule must be 'survivor' or 'lattice'");
  }
  return spec;
}

entangle::ScanOptions scan_options(const config::RunConfig& cfg, const chain::ChainSpec& base) {
  entangle::ScanOptions opts;
  opts.n_samples = cfg.get_int("samples");
  if (opts.n_samples < 3) throw InvalidArgument("config: 'samples' must be >= 3");
  const double t_end = cfg.get_double("t_end");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidArgument("config: 't_end' must be finite and >= 0");
  opts.window_s = t_end > 0.0 ? t_end / base.kappa_angular() : 0.0;
  return opts;
}

experiments::CampaignOptions campaign(const config::RunConfig& cfg) {
  experiments::CampaignOptions opts;
  opts.base = base_chain(cfg);
  opts.base.validate();
  opts.n_outer = cfg.get_int("n");
  opts.jobs = cfg.get_int("jobs");
  if (opts.jobs < 0) throw InvalidArgument("config: 'jobs' must be >= 0");
  opts.scan = scan_options(cfg, opts.base);
  return opts;
}

void check_star_geometry(int n, const std::vector<int>& ms) {
  if (n < 1) throw InvalidArgument("config: 'n' must be >= 1");
  for (int m : ms) {
    if (!chain::validate_star_geometry(n, m)) {
      throw PhysicsRejection("star geometry violated for N=" + std::to_string(n) + ", M=" + std::to_string(m) +
                             ": sin(pi/2N) must exceed 1/(M + 20 sqrt(10)/3)");
    }
  }
}

json em_json(const entangle::EmResult& r) {
  return {{"e_m", r.e_m},
          {"coarse_e_m", r.coarse_e_m},
          {"tau_star_kappa", r.tau_star_dimensionless},
          {"tau_star_s", r.tau_star_s},
          {"interior", r.interior},
          {"window_extended", r.window_extended}};
}

json summary_header(const config::RunConfig& cfg) {
  return {{"command", cfg.command}, {"config_hash", cfg.hash()}, {"seed", cfg.get_u64("seed")}};
}

// Commands

void cmd_spectrum(const config::RunConfig& cfg, Session& s) {
  star::StarSpec spec{cfg.get_int("n"), cfg.get_double("lambda")};
  spec.validate();
  auto entries = star::star_spectrum_analytic(spec);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.j != b.j) return a.j < b.j;
    if (a.m != b.m) return a.m < b.m;
    return a.energy < b.energy;
  });
  Csv csv({"j", "m", "energy", "multiplicity"});
  for (const auto& e : entries) csv.add({num(e.j), num(e.m), num(e.energy), num(e.multiplicity)});
  s.write("spectrum.csv", csv);

  json summary = summary_header(cfg);
  summary["n_outer"] = spec.n_outer;
  summary["lambda"] = spec.coupling;
  summary["levels"] = static_cast<int>(entries.size());
  constexpr int kNumericLimit = 9;
  if (spec.n_outer <= kNumericLimit) {
    auto analytic = star::expand_spectrum(entries);
    const auto numeric = eig_hermitian(star::build_star_hamiltonian(spec)).values;
    double err = 0.0;
    for (Eigen::Index i = 0; i < numeric.size(); ++i) {
      err = std::max(err, std::abs(numeric[i] - analytic[static_cast<std::size_t>(i)]));
    }
    summary["numeric_max_abs_error"] = err;
  } else {
    summary["numeric_max_abs_error"] = nullptr;
    s.note("numeric spectrum check skipped for N > " + std::to_string(kNumericLimit));
  }
  s.write_json("summary.json", summary);
}

void cmd_wstate(const config::RunConfig& cfg, Session& s) {
  star::StarSpec spec{cfg.get_int("n"), cfg.get_double("lambda")};
  spec.validate();
  Csv csv({"outcome", "probability", "excitations", "dicke_fidelity"});
  json summary = summary_header(cfg);
  summary["n_outer"] = spec.n_outer;
  for (int outcome : {0, 1}) {
    const auto res = star::w_state_protocol(spec, outcome);
    const Vector& v = res.outer_state.amplitudes();
    double exc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      exc += std::norm(v[i]) * popcount(static_cast<std::uint64_t>(i));
    }
    const int k = static_cast<int>(std::lround(exc));
    const double fid = res.outer_state.fidelity(star::dicke_state(spec.n_outer, k));
    csv.add({num(outcome), num(res.probability), num(exc), num(fid)});
    summary["outcomes"].push_back({{"outcome", outcome}, {"probability", res.probability}, {"excitations", k},
                                   {"dicke_fidelity", fid}});
  }
  s.write("wstate.csv", csv);
  s.write_json("summary.json", summary);
}

chain::ChainSpec single_chain(const config::RunConfig& cfg) {
  chain::ChainSpec spec = base_chain(cfg);
  spec.m_chain = single_m(cfg);
  spec.lost_sites = cfg.get_int_list("lost");
  spec.validate();
  return spec;
}

void cmd_evolve(const config::RunConfig& cfg, Session& s) {
  const chain::ChainSpec spec = single_chain(cfg);
  check_star_geometry(cfg.get_int("n"), {spec.m_chain});
  const auto noise = single_noise(cfg);
  const auto scan = scan_options(cfg, spec);
  const double t_end = scan.window_s > 0.0 ? scan.window_s : lindblad::default_window_s(spec);
  const auto graph = chain::build_coupling_graph(spec);
  lindblad::EvolveOptions eo;
  eo.time_unit = spec.kappa_angular();

  std::vector<double> times_s, times_k;
  std::vector<std::vector<double>> pops(graph.site_map.size());
  std::vector<QDensity> pairs;
  const std::string path = cfg.get("path");
  if (path == "sector") {
    const auto traj =
        lindblad::evolve_sector(lindblad::initial_transfer_sector(spec), graph, noise, t_end, scan.n_samples, eo);
    times_s = traj.times_s;
    times_k = traj.times_dimensionless;
    for (std::size_t q = 0; q < pops.size(); ++q) {
      pops[q] = lindblad::observable_expectation(
          traj, lindblad::SiteObservable{lindblad::SiteObservable::Kind::Excitation, static_cast<int>(q)});
    }
    pairs = entangle::register_pair_state(traj);
  } else if (path == "full") {
    const auto h = chain::build_chain_hamiltonian(graph).h;
    const auto traj = lindblad::evolve(lindblad::initial_transfer_state(spec), h, noise, t_end, scan.n_samples, eo);
    times_s = traj.times_s;
    times_k = traj.times_dimensionless;
    for (std::size_t q = 0; q < pops.size(); ++q) {
      pops[q] = lindblad::observable_expectation(
          traj, lindblad::SiteObservable{lindblad::SiteObservable::Kind::Excitation, static_cast<int>(q)});
    }
    pairs = entangle::register_pair_state(traj);
  } else {
    throw InvalidArgument("config: path must be 'sector' or 'full'");
  }

  std::vector<std::string> header = {"tau_kappa", "t_s"};
  for (int site : graph.site_map) header.push_back("p" + std::to_string(site));
  header.push_back("e_f");
  Csv csv(header);
  for (std::size_t k = 0; k < times_s.size(); ++k) {
    std::vector<std::string> row = {num(times_k[k]), num(times_s[k])};
    for (const auto& p : pops) row.push_back(num(p[k]));
    row.push_back(num(entangle::eof(pairs[k])));
    csv.add(std::move(row));
  }
  s.write("evolve.csv", csv);
  json summary = summary_header(cfg);
  summary["chain"] = chain::to_json(spec);
  summary["path"] = path;
  summary["t2_s"] = number_or_null(noise.t2_s);
  summary["samples"] = static_cast<int>(times_s.size());
  s.write_json("summary.json", summary);
}

void cmd_scan(const config::RunConfig& cfg, Session& s) {
  const chain::ChainSpec spec = single_chain(cfg);
  check_star_geometry(cfg.get_int("n"), {spec.m_chain});
  const auto noise = single_noise(cfg);
  const auto res = entangle::max_entanglement_scan(spec, noise, scan_options(cfg, spec));
  Csv csv({"tau_kappa", "tau_s", "e_f"});
  for (std::size_t k = 0; k < res.tau_s.size(); ++k) {
    csv.add({num(res.tau_dimensionless[k]), num(res.tau_s[k]), num(res.e_f[k])});
  }
  s.write("fig3.csv", csv);
  json summary = summary_header(cfg);
  summary["chain"] = chain::to_json(spec);
  summary["t2_s"] = number_or_null(noise.t2_s);
  summary["result"] = em_json(res);
  s.write_json("summary.json", summary);
}

void cmd_sweep(const config::RunConfig& cfg, Session& s) {
  const auto ms = chain_lengths(cfg);
  check_star_geometry(cfg.get_int("n"), ms);
  const auto t2s = t2_list_s(cfg);
  const auto opts = campaign(cfg);
  auto rows = experiments::sweep_grid(ms, t2s, opts);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.m != b.m ? a.m < b.m : a.t2_s < b.t2_s; });
  Csv curves({"m", "t2_ms", "tau_kappa", "tau_s", "e_f"});
  Csv table({"m", "t2_ms", "tau_star_kappa", "tau_star_s", "e_m", "coarse_e_m"});
  json summary = summary_header(cfg);
  for (const auto& r : rows) {
    const auto& e = r.result;
    for (std::size_t k = 0; k < e.tau_s.size(); ++k) {
      curves.add({num(r.m), num(r.t2_s * 1e3), num(e.tau_dimensionless[k]), num(e.tau_s[k]), num(e.e_f[k])});
    }
    table.add({num(r.m), num(r.t2_s * 1e3), num(e.tau_star_dimensionless), num(e.tau_star_s), num(e.e_m),
               num(e.coarse_e_m)});
    json row = em_json(e);
    row["m"] = r.m;
    row["t2_s"] = number_or_null(r.t2_s);
    summary["rows"].push_back(row);
  }
  s.write("fig4a.csv", curves);
  s.write("fig4b.csv", table);
  s.write_json("summary.json", summary);
}

void cmd_fit(const config::RunConfig& cfg, Session& s) {
  const auto ms = chain_lengths(cfg);
  check_star_geometry(cfg.get_int("n"), ms);
  const auto t2s = t2_list_s(cfg);
  const auto opts = campaign(cfg);
  auto rows = experiments::sweep_grid(ms, t2s, opts);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.m != b.m ? a.m < b.m : a.t2_s < b.t2_s; });
  std::vector<experiments::GridPoint> points;
  Csv table({"m", "t2_ms", "tau_star_kappa", "e_m"});
  for (const auto& r : rows) {
    points.push_back({r.m, r.t2_s, r.result.e_m});
    table.add({num(r.m), num(r.t2_s * 1e3), num(r.result.tau_star_dimensionless), num(r.result.e_m)});
  }
  s.write("fit_grid.csv", table);
  const auto fit = experiments::fit_exponential(points);
  if (fit.n_excluded > 0) s.note(std::to_string(fit.n_excluded) + " grid points excluded from the fit");
  json summary = summary_header(cfg);
  summary["fit"] = {{"prefactor", fit.prefactor}, {"a", fit.a},
                    {"b", fit.b},                 {"rms_log_residual", fit.residual},
                    {"n_used", fit.n_used},       {"n_excluded", fit.n_excluded},
                    {"bounds_widened", fit.bounds_widened}};
  s.write_json("summary.json", summary);
}

void cmd_disorder(const config::RunConfig& cfg, Session& s) {
  const auto ms = chain_lengths(cfg);
  check_star_geometry(cfg.get_int("n"), ms);
  const auto noise = single_noise(cfg);
  const auto opts = campaign(cfg);
  const int runs = cfg.get_int("runs");
  if (runs < 1) throw InvalidArgument("config: 'runs' must be >= 1");
  const double sigma2 = cfg.get_double("sigma2");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("config: 'sigma2' must be >= 0");
  const std::uint64_t seed = cfg.get_u64("seed");

  const auto clean = experiments::sweep_length(ms, noise, opts);
  const auto rows = experiments::disorder_monte_carlo(ms, runs, sigma2, noise, seed, opts);
  Csv table({"m", "clean_e_m", "mean_e_m", "std_e_m", "relative_deviation", "runs"});
  Csv per_run({"m", "run", "seed", "e_m"});
  json summary = summary_header(cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double ref = clean[i].result.e_m;
    const double rel = ref > 0.0 ? (r.mean - ref) / ref : 0.0;
    table.add({num(r.m), num(ref), num(r.mean), num(r.stddev), num(rel), num(runs)});
    for (std::size_t k = 0; k < r.values.size(); ++k) {
      const auto run_seed = derive_seed(seed, "disorder", {static_cast<std::uint64_t>(r.m), k});
      per_run.add({num(r.m), num(k), num(run_seed, true), num(r.values[k])});
    }
    summary["rows"].push_back(
        {{"m", r.m}, {"clean_e_m", ref}, {"mean_e_m", r.mean}, {"std_e_m", r.stddev}, {"relative_deviation", rel}});
  }
  s.write("fig6.csv", table);
  s.write("fig6_runs.csv", per_run);
  s.write_json("summary.json", summary);
}

void cmd_loss(const config::RunConfig& cfg, Session& s) {
  const auto ms = chain_lengths(cfg);
  check_star_geometry(cfg.get_int("n"), ms);
  const auto noise = single_noise(cfg);
  const auto opts = campaign(cfg);
  Csv expectation({"m", "n_lost", "configurations", "expectation_e_m"});
  Csv configs({"m", "n_lost", "lost", "tau_star_kappa", "e_m"});
  Csv curves({"m", "n_lost", "lost", "tau_kappa", "e_f"});
  json summary = summary_header(cfg);
  for (int m : ms) {
    const auto study = experiments::loss_study(m, noise, opts);
    for (const auto* rep : {&study.one, &study.two}) {
      const std::string n_lost = num(rep->n_lost);
      if (rep->empty()) {
        s.note("M=" + std::to_string(m) + ", " + n_lost + "-loss: zero configurations");
      } else {
        expectation.add({num(m), n_lost, num(rep->configurations.size()), num(rep->expectation)});
      }
      for (std::size_t c = 0; c < rep->configurations.size(); ++c) {
        const auto& r = rep->results[c];
        const std::string label = join_sites(rep->configurations[c]);
        configs.add({num(m), n_lost, label, num(r.tau_star_dimensionless), num(r.e_m)});
        for (std::size_t k = 0; k < r.tau_s.size(); ++k) {
          curves.add({num(m), n_lost, label, num(r.tau_dimensionless[k]), num(r.e_f[k])});
        }
      }
      summary["rows"].push_back({{"m", m},
                                 {"n_lost", rep->n_lost},
                                 {"configurations", rep->configurations.size()},
                                 {"expectation_e_m", rep->empty() ? json(nullptr) : json(rep->expectation)}});
    }
  }
  s.write("fig7b.csv", expectation);
  s.write("loss_configs.csv", configs);
  s.write("fig7cd.csv", curves);
  s.write_json("summary.json", summary);
}

void cmd_gradient(const config::RunConfig& cfg, Session& s) {
  const auto ms = chain_lengths(cfg);
  check_star_geometry(cfg.get_int("n"), ms);
  const auto noise = single_noise(cfg);
  const auto opts = campaign(cfg);

  experiments::GradientSpec grad;
  grad.b0_tesla = cfg.get_double("b0");
  grad.gx = cfg.get_double("gx");
  grad.gy = cfg.get_double("gy");
  grad.gamma = cfg.get_double("gamma");
  grad.omega0 = cfg.get_double("omega0");
  grad.d_nm = cfg.get_double("d_nm");
  const double span = cfg.get_double("phase_span");
  const int n_samples = cfg.get_int("grad_samples");
  const double g_ref = std::max(std::abs(grad.gx), std::abs(grad.gy));
  if (!(g_ref > 0.0)) throw InvalidArgument("config: at least one of gx, gy must be nonzero");
  if (!(span > 0.0) || !std::isfinite(span)) throw InvalidArgument("config: 'phase_span' must be positive");
  if (n_samples < 2) throw InvalidArgument("config: 'grad_samples' must be >= 2");
  if (!(grad.gamma > 0.0) || !(grad.d_nm > 0.0)) throw InvalidArgument("config: gamma and d_nm must be positive");
  grad.times = lindblad::sample_grid(span / (grad.gamma * g_ref * grad.d_nm * 1e-9), n_samples);
  grad.validate();

  // m = 0 labels the ideal Bell pair.
  std::vector<int> labels = {0};
  labels.insert(labels.end(), ms.begin(), ms.end());
  std::vector<QDensity> pairs(labels.size());
  pairs[0] = experiments::ideal_pair();
  experiments::parallel_for(ms.size(), opts.jobs, [&](std::size_t i) {
    auto inner = opts;
    inner.jobs = 1;
    pairs[i + 1] = experiments::distributed_pair(ms[i], noise, inner);
  });

  Csv series({"m", "t_s", "phase_x", "phase_y", "coherence_x", "coherence_y"});
  Csv estimates({"m", "axis", "status", "gradient_true", "gradient_est", "omega", "amplitude", "rms_residual"});
  json summary = summary_header(cfg);
  const double d = grad.d_nm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto cx = experiments::gradient_coherence(pairs[i], grad, {0.0, 0.0}, {d, 0.0});
    const auto cy = experiments::gradient_coherence(pairs[i], grad, {0.0, 0.0}, {0.0, d});
    for (std::size_t k = 0; k < grad.times.size(); ++k) {
      const double t = grad.times[k];
      const double scale = grad.gamma * d * 1e-9 * t;
      series.add({num(labels[i]), num(t), num(scale * grad.gx), num(scale * grad.gy), num(cx[k]), num(cy[k])});
    }
    json entry = {{"m", labels[i]}};
    for (const auto& [axis, values, truth] : {std::tuple{"x", &cx, grad.gx}, std::tuple{"y", &cy, grad.gy}}) {
      try {
        const auto est = experiments::estimate_gradient(grad.times, *values, grad.gamma, d);
        estimates.add({num(labels[i]), axis, "ok", num(std::abs(truth)), num(est.gradient), num(est.omega),
                       num(est.amplitude), num(est.rms_residual)});
        entry[axis] = {{"gradient", est.gradient}, {"amplitude", est.amplitude}};
      } catch (const experiments::EstimationFailure& e) {
        estimates.add({num(labels[i]), axis, "failed", num(std::abs(truth)), "nan", "nan", "nan", "nan"});
        entry[axis] = {{"error", e.what()}};
        s.note("m=" + std::to_string(labels[i]) + " axis " + axis + ": " + e.what());
      }
    }
    summary["pairs"].push_back(entry);
  }
  s.write("fig8b.csv", series);
  s.write("gradient.csv", estimates);
  s.write_json("summary.json", summary);
}

std::string error_line(const char* kind, const std::string& message, int code) {
  return json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int run(const config::RunConfig& cfg, std::ostream& err) {
  try {
    const auto start = std::chrono::steady_clock::now();
    Session session(cfg);
    const std::string& c = cfg.command;
    if (c == "spectrum") {
      cmd_spectrum(cfg, session);
    } else if (c == "wstate") {
      cmd_wstate(cfg, session);
    } else if (c == "evolve") {
      cmd_evolve(cfg, session);
    } else if (c == "scan") {
      cmd_scan(cfg, session);
    } else if (c == "sweep") {
      cmd_sweep(cfg, session);
    } else if (c == "fit") {
      cmd_fit(cfg, session);
    } else if (c == "disorder") {
      cmd_disorder(cfg, session);
    } else if (c == "loss") {
      cmd_loss(cfg, session);
    } else if (c == "gradient") {
      cmd_gradient(cfg, session);
    } else {
      throw InvalidArgument("unknown command '" + c + "'");
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    session.finish(wall);
    return kOk;
  } catch (const InvalidArgument& e) {
    err << error_line("invalid_config", e.what(), kInvalidConfig) << '\n';
    return kInvalidConfig;
  } catch (const PhysicsRejection& e) {
    err << error_line("physics_rejection", e.what(), kPhysicsRejection) << '\n';
    return kPhysicsRejection;
  } catch (const NumericalFailure& e) {
    err << error_line("numerical_failure", e.what(), kNumericalFailure) << '\n';
    return kNumericalFailure;
  } catch (const IoFailure& e) {
    err << error_line("io_failure", e.what(), kIoFailure) << '\n';
    return kIoFailure;
  } catch (const std::exception& e) {
    err << error_line("internal_error", e.what(), 1) << '\n';
    return 1;
  }
}

}  // namespace starnet::cli
