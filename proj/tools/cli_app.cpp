#include "cli_app.hpp"

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "manifest.hpp"

#include "carnot/analysis.hpp"
#include "carnot/flow.hpp"
#include "carnot/group_io.hpp"

#ifndef CARNOT_VERSION
#define CARNOT_VERSION "0.0.0"
#endif

namespace carnot_cli {

const char* tool_version() { return CARNOT_VERSION; }

namespace {

using namespace carnot;
using steady = std::chrono::steady_clock;

double ms_since(steady::time_point t0) {
  return std::chrono::duration<double, std::milli>(steady::now() - t0).count();
}

/// CARNOT_SEED gives the default seed; 12345 when unset.
std::uint64_t default_seed() {
  const char* env = std::getenv("CARNOT_SEED");
  if (env == nullptr || *env == '\0') return 12345;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw input_error(std::string("CARNOT_SEED is not an unsigned integer: ") + env);
  return v;
}

Eigen::VectorXd parse_reals(const std::string& csv, const char* flag) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = std::min(csv.find(',', pos), csv.size());
    const std::string token = csv.substr(pos, comma - pos);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    while (end != nullptr && *end == ' ') ++end;
    if (token.empty() || end == token.c_str() || *end != '\0')
      throw input_error(std::string(flag) +
                        " expects comma-separated reals, got \"" + csv + "\"");
    vals.push_back(v);
    pos = comma + 1;
  }
  return Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                           static_cast<Eigen::Index>(vals.size()));
}

Covector parse_covector(const StepTwoAlgebra& alg, const std::string& xi,
                        const std::string& mu) {
  Covector cov;
  cov.xi = parse_reals(xi, "--xi");
  cov.mu = parse_reals(mu, "--mu");
  require_covector(alg, cov, "cli");
  return cov;
}

std::vector<StratumMask> load_strata_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot read strata file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw input_error("strata file " + path + ": " + e.what());
  }
  if (!doc.is_array()) throw input_error("strata file must hold a JSON array");
  std::vector<StratumMask> masks;
  for (const auto& item : doc) {
    StratumMask m;
    if (item.contains("zero_xi"))
      m.zero_xi = item.at("zero_xi").get<std::vector<int>>();
    if (item.contains("zero_mu"))
      m.zero_mu = item.at("zero_mu").get<std::vector<int>>();
    masks.push_back(std::move(m));
  }
  return masks;
}

// ---- result serialization ---------------------------------------------------

JsonValue order_json(const JacOrder& o) {
  return o.is_finite() ? JsonValue::integer(o.value()) : JsonValue::text("infinite");
}

JsonValue covector_json(const Covector& cov) {
  JsonValue j = JsonValue::object();
  j.set("xi", JsonValue::reals(cov.xi));
  j.set("mu", JsonValue::reals(cov.mu));
  return j;
}

JsonValue report_json(const ExponentReport& r) {
  JsonValue j = JsonValue::object();
  j.set("n", JsonValue::integer(r.n));
  j.set("q_hom", JsonValue::integer(r.q_hom));
  j.set("min_order", JsonValue::integer(r.min_order));
  j.set("max_finite_order", JsonValue::integer(r.max_finite_order));
  j.set("geodesic_dim", JsonValue::integer(r.geodesic_dim));
  j.set("curvature_exp_lower", JsonValue::integer(r.curvature_exp_lower));
  j.set("curvature_exp_exact", JsonValue::boolean(r.curvature_exp_exact));
  j.set("witness_min", covector_json(r.witness_min));
  j.set("witness_max", covector_json(r.witness_max));
  j.set("sample_count", JsonValue::integer(r.sample_count));
  j.set("seed", JsonValue::unsigned_integer(r.seed));
  j.set("provenance", JsonValue::text(r.provenance));
  return j;
}

void print_document(std::ostream& out, const RunManifest& m, double wall_ms,
                    JsonValue result) {
  out << output_document(m, wall_ms, std::move(result)).dump(2) << "\n";
}

std::string csv_row(const std::vector<double>& vals) {
  std::string row;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) row += ',';
    row += format_real(vals[i]);
  }
  return row;
}

// ---- per-subcommand option bundles ------------------------------------------

struct GridOpts {
  double lambda_max = 1.0;
  double lambda_min = 1e-3;
  int count = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda-max", lambda_max, "largest lambda of the grid");
    cmd->add_option("--lambda-min", lambda_min, "smallest lambda of the grid");
    cmd->add_option("--grid", count,
                    "number of grid points; 0 picks the 10^(-1/4) ratio");
  }
  std::vector<double> resolve() const {
    return geometric_grid(lambda_max, lambda_min, count);
  }
  void record(RunManifest& m) const {
    m.arg_real("--lambda-max", "lambda_max", lambda_max);
    m.arg_real("--lambda-min", "lambda_min", lambda_min);
    m.arg_int("--grid", "grid", count);
  }
};

struct SeedOpt {
  std::uint64_t value = 0;
  CLI::Option* opt = nullptr;

  void attach(CLI::App* cmd) {
    opt = cmd->add_option("--seed", value,
                          "RNG seed; default from CARNOT_SEED, then 12345");
  }
  std::uint64_t resolve() const {
    return opt != nullptr && opt->count() > 0 ? value : default_seed();
  }
};

struct Cli {
  std::string group;
  std::string xi, mu;
  std::string flow_out = "csv";
  std::string volume_out = "json";
  std::string strata = "auto";
  std::string xi_lo, xi_hi, mu_lo, mu_hi;
  long samples = 2000;
  long volume_samples = 100000;
  long budget = 10000;
  unsigned workers = 0;
  double rank_tol = 1e-10;
  double floor = 1e-13;
  double t_end = 1.0;
  double step = 1e-3;
  double n_exponent = 0.0;
  bool fd = false;
  GridOpts order_grid{0.1, 1e-3, 0};
  GridOpts volume_grid{0.1, 1e-3, 0};
  GridOpts ce_grid{1.0, 1e-3, 0};
  GridOpts search_grid{1.0, 1e-3, 0};
  SeedOpt exponents_seed, volume_seed, search_seed;

  CLI::App* info = nullptr;
  CLI::App* sexp_cmd = nullptr;
  CLI::App* jacobian_cmd = nullptr;
  CLI::App* flow_cmd = nullptr;
  CLI::App* filtration_cmd = nullptr;
  CLI::App* exponents_cmd = nullptr;
  CLI::App* order_cmd = nullptr;
  CLI::App* volume_cmd = nullptr;
  CLI::App* ce_check_cmd = nullptr;
  CLI::App* ce_search_cmd = nullptr;
  CLI::App* verify_cmd = nullptr;
};

CLI::Option* add_group(CLI::App* cmd, std::string& slot) {
  return cmd
      ->add_option("--group", slot,
                   "heisenberg | free:<k> | star:<k> | ga:<file> | spec file")
      ->required();
}

void add_covector(CLI::App* cmd, Cli& c) {
  cmd->add_option("--xi", c.xi, "first-layer covector, comma-separated")->required();
  cmd->add_option("--mu", c.mu, "second-layer covector, comma-separated")->required();
}

// ---- handlers ----------------------------------------------------------------

int run_info(const Cli& c, std::ostream& out) {
  const auto t0 = steady::now();
  const GroupHandle handle = parse_group_descriptor(c.group);
  const StepTwoAlgebra& alg = handle.algebra;
  const ValidationReport v = validate(alg);

  RunManifest m;
  m.start("info", c.group);

  JsonValue r = JsonValue::object();
  r.set("name", JsonValue::text(alg.name()));
  r.set("family", JsonValue::text(handle.family));
  r.set("n", JsonValue::integer(alg.dim()));
  r.set("q_hom", JsonValue::integer(alg.homogeneous_dim()));
  r.set("v1_dim", JsonValue::integer(alg.v1_dim()));
  r.set("v2_dim", JsonValue::integer(alg.v2_dim()));
  r.set("bracket_norm", JsonValue::real(alg.bracket_norm()));
  r.set("valid", JsonValue::boolean(v.ok));
  r.set("skew_residual", JsonValue::real(v.skew_residual));
  r.set("bracket_rank", JsonValue::integer(v.bracket_rank));
  print_document(out, m, ms_since(t0), std::move(r));
  return 0;
}

int run_sexp(const Cli& c, std::ostream& out, bool fd_route) {
  const auto t0 = steady::now();
  const GroupHandle handle = parse_group_descriptor(c.group);
  const Covector cov = parse_covector(handle.algebra, c.xi, c.mu);

  RunManifest m;
  m.start(fd_route || c.jacobian_cmd->parsed() ? "jacobian" : "sexp", c.group);
  m.arg_reals("--xi", "xi", cov.xi);
  m.arg_reals("--mu", "mu", cov.mu);
  if (c.jacobian_cmd->parsed()) m.arg_switch("--fd", "fd", fd_route);

  const GroupPoint p = sexp(handle.algebra, cov);
  const double jac = fd_route ? dsexp_fd(handle.algebra, cov).determinant()
                              : jacobian(handle.algebra, cov);

  JsonValue r = JsonValue::object();
  r.set("x", JsonValue::reals(p.x));
  r.set("u", JsonValue::reals(p.u));
  r.set("jacobian", JsonValue::real(jac));
  print_document(out, m, ms_since(t0), std::move(r));
  return 0;
}

int run_flow(const Cli& c, std::ostream& out) {
  const auto t0 = steady::now();
  const GroupHandle handle = parse_group_descriptor(c.group);
  const StepTwoAlgebra& alg = handle.algebra;
  const Covector cov = parse_covector(alg, c.xi, c.mu);
  if (c.flow_out != "json" && c.flow_out != "csv")
    throw input_error("--out must be json or csv");

  RunManifest m;
  m.start("flow", c.group);
  m.arg_reals("--xi", "xi", cov.xi);
  m.arg_reals("--mu", "mu", cov.mu);
  m.arg_real("--t-end", "t_end", c.t_end);
  m.arg_real("--step", "step", c.step);
  m.arg_text("--out", "out", c.flow_out);

  const Trajectory traj = integrate_geodesic(alg, cov, c.t_end, c.step);
  const ConservationReport cons = check_conservation(alg, traj);

  if (c.flow_out == "csv") {
    out << manifest_comment(m, ms_since(t0)) << "\n";
    std::string header = "t";
    for (int i = 1; i <= alg.v1_dim(); ++i) header += ",x" + std::to_string(i);
    for (int a = 1; a <= alg.v2_dim(); ++a) header += ",u" + std::to_string(a);
    for (int i = 1; i <= alg.v1_dim(); ++i) header += ",xi" + std::to_string(i);
    for (int a = 1; a <= alg.v2_dim(); ++a) header += ",mu" + std::to_string(a);
    out << header << "\n";
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
      std::vector<double> row{traj.times[s]};
      const auto& st = traj.states[s];
      for (auto* vec : {&st.x, &st.u, &st.xi, &st.mu})
        for (Eigen::Index i = 0; i < vec->size(); ++i) row.push_back((*vec)[i]);
      out << csv_row(row) << "\n";
    }
    return 0;
  }

  JsonValue states = JsonValue::array();
  for (const auto& st : traj.states) {
    JsonValue s = JsonValue::object();
    s.set("x", JsonValue::reals(st.x));
    s.set("u", JsonValue::reals(st.u));
    s.set("xi", JsonValue::reals(st.xi));
    s.set("mu", JsonValue::reals(st.mu));
    states.push(std::move(s));
  }
  JsonValue times = JsonValue::array();
  for (double t : traj.times) times.push(JsonValue::real(t));
  JsonValue r = JsonValue::object();
  r.set("times", std::move(times));
  r.set("states", std::move(states));
  JsonValue drift = JsonValue::object();
  drift.set("speed", JsonValue::real(cons.speed_drift));
  drift.set("mu", JsonValue::real(cons.mu_drift));
  drift.set("right_invariant", JsonValue::real(cons.right_invariant_drift));
  r.set("conservation", std::move(drift));
  print_document(out, m, ms_since(t0), std::move(r));
  return 0;
}

int run_filtration(const Cli& c, std::ostream& out) {
  const auto t0 = steady::now();
  const GroupHandle handle = parse_group_descriptor(c.group);
  const Covector cov = parse_covector(handle.algebra, c.xi, c.mu);

  RunManifest m;
  m.start("filtration", c.group);
  m.arg_reals("--xi", "xi", cov.xi);
  m.arg_reals("--mu", "mu", cov.mu);
  m.arg_real("--rank-tol", "rank_tol", c.rank_tol);

  const Filtration f = filtration(handle.algebra, cov, c.rank_tol);
  JsonValue r = JsonValue::object();
  r.set("krylov_dims", JsonValue::integers(f.krylov_dims));
  r.set("w_dims", JsonValue::integers(f.w_dims));
  r.set("w_inf_dim", JsonValue::integer(f.w_inf_dim));
  r.set("depth", f.depth ? JsonValue::integer(*f.depth) : JsonValue::null());
  r.set("order", order_json(f.order));
  r.set("rank_margin", JsonValue::real(f.rank_margin));
  r.set("borderline", JsonValue::boolean(f.borderline));
  print_document(out, m, ms_since(t0), std::move(r));
  return 0;
}

int run_exponents(const Cli& c, std::ostream& out) {
  const auto t0 = steady::now();
  const GroupHandle handle = parse_group_descriptor(c.group);
  const StepTwoAlgebra& alg = handle.algebra;
  const std::uint64_t seed = c.exponents_seed.resolve();

  std::vector<StratumMask> strata;
  if (c.strata == "auto")
    strata = default_strata(alg);
  else if (c.strata != "none")
    strata = load_strata_file(c.strata);

  RunManifest m;
  m.start("exponents", c.group);
  m.arg_int("--samples", "samples", c.samples);
  m.arg_seed(seed);
  m.arg_int("--workers", "workers", c.workers);
  m.arg_real("--rank-tol", "rank_tol", c.rank_tol);
  m.arg_text("--strata", "strata", c.strata);

  const ExponentReport r =
      group_exponents(alg, c.samples, strata, seed, c.workers, c.rank_tol);
  print_document(out, m, ms_since(t0), report_json(r));
  return 0;
}

int run_leading_order(const Cli& c, std::ostream& out) {
  const auto t0 = steady::now();
  const GroupHandle handle = parse_group_descriptor(c.group);
  const Covector cov = parse_covector(handle.algebra, c.xi, c.mu);
  const std::vector<double> grid = c.order_grid.resolve();

  RunManifest m;
  m.start("leading-order", c.group);
  m.arg_reals("--xi", "xi", cov.xi);
  m.arg_reals("--mu", "mu", cov.mu);
  c.order_grid.record(m);
  m.arg_real("--floor", "floor", c.floor);

  const LeadingOrder lo = leading_order(handle.algebra, cov, grid, c.floor);
  JsonValue r = JsonValue::object();
  r.set("order", order_json(lo.order));
  r.set("coeff", JsonValue::real(lo.coeff));
  r.set("fit_residual", JsonValue::real(lo.fit_residual));
  JsonValue used = JsonValue::array();
  for (double g : lo.grid) used.push(JsonValue::real(g));
  r.set("grid", std::move(used));
  print_document(out, m, ms_since(t0), std::move(r));
  return 0;
}

CovectorBox resolve_box(const StepTwoAlgebra& alg, const Cli& c) {
  CovectorBox box;
  box.xi_lo = c.xi_lo.empty()
                  ? Eigen::VectorXd::Constant(alg.v1_dim(), 0.9).eval()
                  : parse_reals(c.xi_lo, "--xi-lo");
  box.xi_hi = c.xi_hi.empty()
                  ? Eigen::VectorXd::Constant(alg.v1_dim(), 1.1).eval()
                  : parse_reals(c.xi_hi, "--xi-hi");
  box.mu_lo = c.mu_lo.empty()
                  ? Eigen::VectorXd::Constant(alg.v2_dim(), -0.1).eval()
                  : parse_reals(c.mu_lo, "--mu-lo");
  box.mu_hi = c.mu_hi.empty()
                  ? Eigen::VectorXd::Constant(alg.v2_dim(), 0.1).eval()
                  : parse_reals(c.mu_hi, "--mu-hi");
  require_box(alg, box);
  return box;
}

int run_volume_scan(const Cli& c, std::ostream& out) {
  const auto t0 = steady::now();
  const GroupHandle handle = parse_group_descriptor(c.group);
  const StepTwoAlgebra& alg = handle.algebra;
  const std::uint64_t seed = c.volume_seed.resolve();
  const CovectorBox box = resolve_box(alg, c);
  const std::vector<double> grid = c.volume_grid.resolve();
  if (c.volume_out != "json" && c.volume_out != "csv")
    throw input_error("--out must be json or csv");

  DomainProxyOptions proxy;
  if (handle.pairing) proxy.pairing = &*handle.pairing;

  RunManifest m;
  m.start("volume-scan", c.group);
  m.arg_int("--samples", "samples", c.volume_samples);
  m.arg_seed(seed);
  m.arg_int("--workers", "workers", c.workers);
  c.volume_grid.record(m);
  m.arg_reals("--xi-lo", "xi_lo", box.xi_lo);
  m.arg_reals("--xi-hi", "xi_hi", box.xi_hi);
  m.arg_reals("--mu-lo", "mu_lo", box.mu_lo);
  m.arg_reals("--mu-hi", "mu_hi", box.mu_hi);
  m.arg_text("--out", "out", c.volume_out);

  const VolumeScan scan = volume_scaling_slope(alg, box, grid, c.volume_samples,
                                               seed, c.workers, proxy);

  if (c.volume_out == "csv") {
    out << manifest_comment(m, ms_since(t0)) << "\n";
    out << "lambda,volume,std_error\n";
    for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
      out << csv_row({scan.lambdas[i], scan.volumes[i], scan.std_errors[i]})
          << "\n";
    return 0;
  }

  JsonValue r = JsonValue::object();
  JsonValue lambdas = JsonValue::array(), volumes = JsonValue::array(),
            errors = JsonValue::array();
  for (double v : scan.lambdas) lambdas.push(JsonValue::real(v));
  for (double v : scan.volumes) volumes.push(JsonValue::real(v));
  for (double v : scan.std_errors) errors.push(JsonValue::real(v));
  r.set("lambdas", std::move(lambdas));
  r.set("volumes", std::move(volumes));
  r.set("std_errors", std::move(errors));
  r.set("slope", JsonValue::real(scan.slope));
  r.set("slope_stderr", JsonValue::real(scan.slope_stderr));
  r.set("n_samples", JsonValue::integer(scan.n_samples));
  r.set("seed", JsonValue::unsigned_integer(scan.seed));
  r.set("proxy_failures", JsonValue::integer(scan.proxy_failures));
  print_document(out, m, ms_since(t0), std::move(r));
  return 0;
}

int run_ce_check(const Cli& c, std::ostream& out) {
  const auto t0 = steady::now();
  const GroupHandle handle = parse_group_descriptor(c.group);
  const Covector cov = parse_covector(handle.algebra, c.xi, c.mu);
  const std::vector<double> grid = c.ce_grid.resolve();

  DomainProxyOptions proxy;
  if (handle.pairing) proxy.pairing = &*handle.pairing;

  RunManifest m;
  m.start("ce-check", c.group);
  m.arg_real("--N", "N", c.n_exponent);
  m.arg_reals("--xi", "xi", cov.xi);
  m.arg_reals("--mu", "mu", cov.mu);
  c.ce_grid.record(m);

  const CeCheck check =
      ce_criterion(handle.algebra, c.n_exponent, cov, grid, proxy);
  JsonValue r = JsonValue::object();
  r.set("holds", JsonValue::boolean(check.holds));
  r.set("lambda", JsonValue::real(check.lambda));
  r.set("lhs", JsonValue::real(check.lhs));
  r.set("rhs", JsonValue::real(check.rhs));
  print_document(out, m, ms_since(t0), std::move(r));
  return 0;
}

int run_ce_search(const Cli& c, std::ostream& out) {
  const auto t0 = steady::now();
  const GroupHandle handle = parse_group_descriptor(c.group);
  const std::uint64_t seed = c.search_seed.resolve();

  CeSearchConfig cfg;
  cfg.budget = c.budget;
  cfg.lambda_grid = c.search_grid.resolve();
  if (handle.pairing) cfg.proxy.pairing = &*handle.pairing;

  RunManifest m;
  m.start("ce-search", c.group);
  m.arg_real("--N", "N", c.n_exponent);
  m.arg_int("--samples", "samples", c.budget);
  m.arg_seed(seed);
  c.search_grid.record(m);

  const std::optional<CeViolation> hit =
      ce_search_violation(handle.algebra, c.n_exponent, cfg, seed);
  JsonValue r = JsonValue::object();
  r.set("found", JsonValue::boolean(hit.has_value()));
  r.set("budget", JsonValue::integer(cfg.budget));
  if (hit) {
    JsonValue v = JsonValue::object();
    v.set("xi", JsonValue::reals(hit->cov.xi));
    v.set("mu", JsonValue::reals(hit->cov.mu));
    v.set("lambda", JsonValue::real(hit->lambda));
    v.set("lhs", JsonValue::real(hit->lhs));
    v.set("rhs", JsonValue::real(hit->rhs));
    v.set("sample_index", JsonValue::integer(hit->sample_index));
    r.set("violation", std::move(v));
  } else {
    r.set("violation", JsonValue::null());
  }
  print_document(out, m, ms_since(t0), std::move(r));
  return 0;
}

int run_verify(const Cli& c, std::ostream& out) {
  const auto t0 = steady::now();
  const GroupHandle handle = parse_group_descriptor(c.group);

  RunManifest m;
  m.start("verify", c.group);

  // The suite runs into a buffer so the manifest line still comes first.
  std::ostringstream lines;
  const int failures = verify_group(handle, lines);
  out << manifest_comment(m, ms_since(t0)) << "\n" << lines.str();
  return failures == 0 ? 0 : 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"step-two Carnot group calculator"};
  app.require_subcommand(1);
  Cli c;

  c.info = app.add_subcommand("info", "dimensions and validation summary");
  add_group(c.info, c.group);

  c.sexp_cmd = app.add_subcommand("sexp", "exponential-map endpoint of a covector");
  add_group(c.sexp_cmd, c.group);
  add_covector(c.sexp_cmd, c);

  c.jacobian_cmd =
      app.add_subcommand("jacobian", "Jacobian determinant of the exponential map");
  add_group(c.jacobian_cmd, c.group);
  add_covector(c.jacobian_cmd, c);
  c.jacobian_cmd->add_flag("--fd", c.fd,
                           "finite-difference route instead of the series");

  c.flow_cmd = app.add_subcommand("flow", "integrate the geodesic flow");
  add_group(c.flow_cmd, c.group);
  add_covector(c.flow_cmd, c);
  c.flow_cmd->add_option("--t-end", c.t_end, "integration end time");
  c.flow_cmd->add_option("--step", c.step, "RK4 step");
  c.flow_cmd->add_option("--out", c.flow_out, "json | csv");

  c.filtration_cmd =
      app.add_subcommand("filtration", "momentum filtration and vanishing order");
  add_group(c.filtration_cmd, c.group);
  add_covector(c.filtration_cmd, c);
  c.filtration_cmd->add_option("--rank-tol", c.rank_tol, "relative rank cutoff");

  c.exponents_cmd =
      app.add_subcommand("exponents", "sampled scaling exponents of a group");
  add_group(c.exponents_cmd, c.group);
  c.exponents_cmd->add_option("--samples", c.samples, "Gaussian samples");
  c.exponents_seed.attach(c.exponents_cmd);
  c.exponents_cmd->add_option("--workers", c.workers, "thread count; 0 = hardware");
  c.exponents_cmd->add_option("--rank-tol", c.rank_tol, "relative rank cutoff");
  c.exponents_cmd->add_option("--strata", c.strata, "auto | none | mask file");

  c.order_cmd = app.add_subcommand(
      "leading-order", "fitted leading order of the Jacobian scaling");
  add_group(c.order_cmd, c.group);
  add_covector(c.order_cmd, c);
  c.order_grid.attach(c.order_cmd);
  c.order_cmd->add_option("--floor", c.floor,
                          "values below this count as exact zeros");

  c.volume_cmd = app.add_subcommand(
      "volume-scan", "volume of the scaled image region over a lambda grid");
  add_group(c.volume_cmd, c.group);
  c.volume_cmd->add_option("--samples", c.volume_samples, "Monte Carlo samples");
  c.volume_seed.attach(c.volume_cmd);
  c.volume_cmd->add_option("--workers", c.workers, "thread count; 0 = hardware");
  c.volume_grid.attach(c.volume_cmd);
  c.volume_cmd->add_option("--xi-lo", c.xi_lo, "box lower corner, first layer");
  c.volume_cmd->add_option("--xi-hi", c.xi_hi, "box upper corner, first layer");
  c.volume_cmd->add_option("--mu-lo", c.mu_lo, "box lower corner, second layer");
  c.volume_cmd->add_option("--mu-hi", c.mu_hi, "box upper corner, second layer");
  c.volume_cmd->add_option("--out", c.volume_out, "json | csv");

  c.ce_check_cmd = app.add_subcommand(
      "ce-check", "curvature-exponent inequality at one covector");
  add_group(c.ce_check_cmd, c.group);
  c.ce_check_cmd->add_option("--N", c.n_exponent, "exponent to test")->required();
  add_covector(c.ce_check_cmd, c);
  c.ce_grid.attach(c.ce_check_cmd);

  c.ce_search_cmd = app.add_subcommand(
      "ce-search", "search for a curvature-exponent violation");
  add_group(c.ce_search_cmd, c.group);
  c.ce_search_cmd->add_option("--N", c.n_exponent, "exponent to test")->required();
  c.ce_search_cmd->add_option("--samples", c.budget, "candidate budget");
  c.search_seed.attach(c.ce_search_cmd);
  c.search_grid.attach(c.ce_search_cmd);

  c.verify_cmd = app.add_subcommand("verify", "run the invariant suite on a group");
  add_group(c.verify_cmd, c.group);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c.info->parsed()) return run_info(c, out);
    if (c.sexp_cmd->parsed()) return run_sexp(c, out, false);
    if (c.jacobian_cmd->parsed()) return run_sexp(c, out, c.fd);
    if (c.flow_cmd->parsed()) return run_flow(c, out);
    if (c.filtration_cmd->parsed()) return run_filtration(c, out);
    if (c.exponents_cmd->parsed()) return run_exponents(c, out);
    if (c.order_cmd->parsed()) return run_leading_order(c, out);
    if (c.volume_cmd->parsed()) return run_volume_scan(c, out);
    if (c.ce_check_cmd->parsed()) return run_ce_check(c, out);
    if (c.ce_search_cmd->parsed()) return run_ce_search(c, out);
    if (c.verify_cmd->parsed()) return run_verify(c, out);
    err << "no subcommand\n";
    return 2;
  } catch (const convergence_error& e) {
    err << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const input_error& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace carnot_cli
