// securemode: secure mode distinguishability analysis for switching systems.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "securemode/securemode.hpp"

namespace sm = securemode;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kNegative = 2;

struct Common {
  std::string model;
  std::string output;
  std::string backend;
  std::uint64_t seed = 0;
  std::optional<std::size_t> sigma;
  std::optional<std::size_t> rho;
  bool autonomous = false;
};

std::string default_backend() {
  const char* env = std::getenv("SECUREMODE_BACKEND");
  return env ? env : "exact";
}

sm::ReportContext make_context(const sm::ModelFile& mf, const Common& c) {
  sm::ReportContext ctx;
  ctx.model_path = c.model;
  ctx.backend = c.backend;
  ctx.seed = c.seed;
  ctx.notes = mf.notes;
  ctx.n = mf.system.n();
  ctx.m = mf.system.m();
  ctx.p = mf.system.p();
  for (const auto& md : mf.system.modes) ctx.mode_ids.push_back(md.id);
  return ctx;
}

template <sm::Scalar T>
int run_analyze(const sm::SwitchingSystem<T>& sys, const sm::ModelFile& mf, const Common& c, const sm::AnalysisOptions& opts) {
  const auto rep = sm::pairwise_report(sys, opts);
  auto ctx = make_context(mf, c);
  for (const auto& w : mf.warnings) std::cerr << "warning: " << w << "\n";
  sm::render_report(std::cout, rep, ctx);
  if (!c.output.empty()) sm::save_report(rep, ctx, c.output);
  return rep.reconstructable ? kOk : kNegative;
}

sm::Matrix<sm::Rational> truncate_rows(const sm::Matrix<sm::Rational>& m, std::size_t rows) {
  if (m.rows() <= rows) return m;
  return m.block(0, 0, rows, m.cols());
}

template <sm::Scalar T>
int run_estimate(const sm::SwitchingSystem<sm::Rational>& sys, const sm::Trace<sm::Rational>& tr, std::size_t sigma,
                 std::size_t rho, bool autonomous, double tol) {
  const std::size_t tau = 2 * sys.n();
  if (tr.samples() < tau)
    throw sm::Error("trace has " + std::to_string(tr.samples()) + " samples, need at least 2n=" + std::to_string(tau));
  auto model = sys;
  sm::Matrix<sm::Rational> U = truncate_rows(tr.u, tau);
  if (autonomous) {
    for (auto& md : model.modes) md.B = sm::Matrix<sm::Rational>(md.n(), 0);
    U = {};
    rho = 0;
  }
  const sm::Matrix<sm::Rational> Y = truncate_rows(tr.y, tau);
  const auto est = sm::estimate_mode(model.template cast<T>(), Y.template cast<T>(), U.template cast<T>(), sigma, rho,
                                     sm::EstimateOptions{tol});
  std::cout << sm::estimate_json(est).dump(2) << "\n";
  return est.unique ? kOk : kNegative;
}

void write_trace_file(const fs::path& path, const sm::Trace<sm::Rational>& tr) {
  std::ofstream out(path);
  if (!out) throw sm::Error(path.string() + ": cannot write");
  sm::write_trace_jsonl(out, tr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure mode distinguishability for linear switching systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sm::kVersion);

  Common c;
  c.backend = default_backend();
  auto add_model = [&](CLI::App* sub) { sub->add_option("--model", c.model, "model JSON file")->required()->check(CLI::ExistingFile); };
  auto add_budgets = [&](CLI::App* sub) {
    sub->add_option("--sigma", c.sigma, "sensor attack budget (default: model)");
    sub->add_option("--rho", c.rho, "actuator attack budget (default: model)");
  };
  auto add_backend = [&](CLI::App* sub) {
    sub->add_option("--backend", c.backend, "exact | float (env SECUREMODE_BACKEND)")
        ->check(CLI::IsMember({"exact", "float"}));
  };

  auto* analyze = app.add_subcommand("analyze", "decide pairwise secure distinguishability");
  add_model(analyze);
  add_budgets(analyze);
  add_backend(analyze);
  bool exhaustive = false;
  std::vector<std::string> pair;
  analyze->add_flag("--autonomous", c.autonomous, "ignore inputs and decide the autonomous problem");
  analyze->add_flag("--exhaustive", exhaustive, "enumerate every attack pattern instead of the maximal ones");
  analyze->add_option("--pair", pair, "restrict to one pair of mode ids")->expected(2);
  analyze->add_option("--output", c.output, "report JSON path");
  analyze->add_option("--seed", c.seed, "seed echoed into the report");

  auto* simulate = app.add_subcommand("simulate", "simulate one mode under a random sparse attack");
  add_model(simulate);
  add_budgets(simulate);
  std::string mode_id;
  std::size_t tau = 0;
  double magnitude = 1e3;
  simulate->add_option("--mode", mode_id, "mode id")->required();
  simulate->add_option("--tau", tau, "samples (default 2n)");
  simulate->add_option("--seed", c.seed, "random seed");
  simulate->add_option("--magnitude", magnitude, "attack magnitude")->check(CLI::PositiveNumber);
  simulate->add_flag("--autonomous", c.autonomous, "zero input and no actuator attack");
  simulate->add_option("--output", c.output, "trace JSONL path (default stdout)");

  auto* estimate = app.add_subcommand("estimate", "find the modes consistent with a trace");
  add_model(estimate);
  add_budgets(estimate);
  add_backend(estimate);
  std::string trace_path;
  double tol = 1e-8;
  estimate->add_option("--trace", trace_path, "trace JSONL file")->required()->check(CLI::ExistingFile);
  estimate->add_option("--tol", tol, "relative residual tolerance (float backend)");
  estimate->add_flag("--autonomous", c.autonomous, "ignore inputs");

  auto* witness = app.add_subcommand("witness", "build and replay an indistinguishability witness");
  add_model(witness);
  witness->add_option("--sigma", c.sigma, "sensor attack budget (default: model)");
  std::string out_dir = ".";
  witness->add_option("--pair", pair, "two mode ids")->expected(2)->required();
  witness->add_option("--output-dir", out_dir, "directory for the two traces");

  auto* discretize = app.add_subcommand("discretize", "print discrete-time matrices of a continuous model");
  discretize->set_help_flag("--help", "print this help and exit");  // frees -h for the step size
  add_model(discretize);
  std::string method;
  std::string h_text;
  discretize->add_option("--method", method, "euler | zoh (default: model)")->check(CLI::IsMember({"euler", "zoh"}));
  discretize->add_option("--h", h_text, "step size, e.g. 0.1 or 1/10 (default: model)");
  discretize->add_option("--output", c.output, "write the discrete model JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kError;
  }

  try {
    if (*discretize) {
      std::ifstream in(c.model);
      sm::Json doc = sm::Json::parse(in);
      if (!doc.value("continuous_time", false)) throw sm::Error(c.model + ": model is not continuous-time");
      if (!method.empty()) doc["discretization"] = method;
      if (!h_text.empty()) doc["h"] = h_text;
      const auto mf = sm::parse_model(doc, c.model);
      std::cout << "method " << sm::to_string(mf.method) << ", h = " << sm::to_string(mf.h) << "\n";
      for (const auto& md : mf.system.modes) {
        std::cout << "mode " << md.id << "\n  Ad = " << md.A << "\n  Bd = " << md.B << "\n";
      }
      if (!c.output.empty()) {
        std::ofstream out(c.output);
        if (!out) throw sm::Error(c.output + ": cannot write");
        out << sm::model_json(mf.system, mf.notes).dump(2) << "\n";
      }
      return kOk;
    }

    const auto mf = sm::load_model(c.model);
    const auto& sys = mf.system;
    const std::size_t sigma = c.sigma.value_or(sys.sigma);
    const std::size_t rho = c.rho.value_or(sys.rho);

    if (*analyze) {
      sm::AnalysisOptions opts{sigma, rho, c.autonomous, exhaustive, std::nullopt};
      if (!pair.empty()) opts.only_pair = std::make_pair(pair[0], pair[1]);
      if (c.backend == "float") return run_analyze(sys.cast<double>(), mf, c, opts);
      return run_analyze(sys, mf, c, opts);
    }

    if (*simulate) {
      const auto& md = sys.mode(mode_id);
      const std::size_t steps = tau == 0 ? 2 * sys.n() : tau;
      const std::size_t r = c.autonomous ? 0 : rho;
      if (sigma > 0) sm::check_sensor_bound(sigma, sys.p());
      std::mt19937_64 rng(c.seed);
      const auto x0 = sm::random_matrix<sm::Rational>(rng, sys.n(), 1, 1.0);
      sm::Matrix<sm::Rational> u(steps, sys.m());
      if (!c.autonomous) u = sm::random_matrix<sm::Rational>(rng, steps, sys.m(), 1.0);
      const auto attack = sm::gen_attack<sm::Rational>(sys.p(), sys.m(), sigma, r, magnitude, rng(), steps);
      const auto tr = sm::simulate(md, x0, steps, u, attack.w, attack.v);
      if (c.output.empty()) {
        sm::write_trace_jsonl(std::cout, tr);
      } else {
        write_trace_file(c.output, tr);
        std::cerr << "wrote " << c.output << " (mode " << md.id << ", " << steps << " samples, sensors attacked "
                  << sm::format_index_set(attack.spec.sensor_support) << ")\n";
      }
      return kOk;
    }

    if (*estimate) {
      std::ifstream in(trace_path);
      const auto tr = sm::read_trace_jsonl(in, trace_path);
      try {
        if (c.backend == "float") return run_estimate<double>(sys, tr, sigma, rho, c.autonomous, tol);
        return run_estimate<sm::Rational>(sys, tr, sigma, rho, c.autonomous, tol);
      } catch (const sm::EstimationError& e) {
        std::cerr << "securemode: " << e.what() << "\n";
        return kError;
      }
    }

    if (*witness) {
      const auto& si = sys.mode(pair[0]);
      const auto& sj = sys.mode(pair[1]);
      const auto v = sm::sigma_secure_autonomous(si, sj, sigma);
      if (v.result) {
        std::cout << "modes " << si.id << " and " << sj.id << " are " << sigma
                  << "-securely distinguishable; no witness exists\n";
        return kNegative;
      }
      const auto& w = *v.witness;
      sm::LinearMode<sm::Rational> ai{si.id, si.A, sm::Matrix<sm::Rational>(si.n(), 0), si.C};
      sm::LinearMode<sm::Rational> aj{sj.id, sj.A, sm::Matrix<sm::Rational>(sj.n(), 0), sj.C};
      const auto [ti, tj] = sm::replay_witness(sm::build_augmented(ai, aj), w);
      if (!(ti.y == tj.y)) throw sm::Error("witness replay produced different outputs");
      fs::create_directories(out_dir);
      const fs::path pi = fs::path(out_dir) / ("witness_" + si.id + "_" + sj.id + "_mode" + si.id + ".jsonl");
      const fs::path pj = fs::path(out_dir) / ("witness_" + si.id + "_" + sj.id + "_mode" + sj.id + ".jsonl");
      write_trace_file(pi, ti);
      write_trace_file(pj, tj);
      std::cout << "failing Gamma " << sm::format_index_set(w.gamma) << ": mode " << si.id << " attacked on "
                << sm::format_index_set(w.gamma_i) << ", mode " << sj.id << " attacked on "
                << sm::format_index_set(w.gamma_j) << "\noutputs identical over " << ti.samples() << " samples\n"
                << pi.string() << "\n"
                << pj.string() << "\n";
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "securemode: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
