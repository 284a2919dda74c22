#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "securemode/disting.hpp"
#include "securemode/estimate.hpp"
#include "securemode/model_io.hpp"

namespace securemode {

inline constexpr const char* kVersion = "1.0.0";

/// Run metadata echoed into every report.
struct ReportContext {
  std::string model_path;
  std::string backend = "exact";
  std::uint64_t seed = 0;
  std::string notes;
  std::size_t n = 0, m = 0, p = 0;
  std::vector<std::string> mode_ids;
};

template <Scalar T>
Json verdict_json(const Verdict<T>& v) {
  Json out;
  out["kind"] = to_string(v.kind);
  out["i"] = v.i;
  out["j"] = v.j;
  out["result"] = v.result;
  out["checked_patterns"] = v.checked_patterns;
  Json ranks = Json::array();
  for (const auto& r : v.ranks) ranks.push_back({{"gamma", index_set_json(r.gamma)}, {"rank", r.rank}});
  out["ranks"] = std::move(ranks);
  if (v.failing_pattern)
    out["failing_pattern"] = {{"gamma", index_set_json(v.failing_pattern->gamma)},
                              {"delta_i", index_set_json(v.failing_pattern->delta_i)},
                              {"delta_j", index_set_json(v.failing_pattern->delta_j)}};
  else
    out["failing_pattern"] = nullptr;
  out["failed_condition"] = v.failed_condition ? Json(*v.failed_condition) : Json(nullptr);
  if (v.witness)
    out["witness"] = {{"x0", vector_json(v.witness->x0)},
                      {"gamma", index_set_json(v.witness->gamma)},
                      {"gamma_i", index_set_json(v.witness->gamma_i)},
                      {"gamma_j", index_set_json(v.witness->gamma_j)},
                      {"Wi", matrix_json(v.witness->Wi)},
                      {"Wj", matrix_json(v.witness->Wj)}};
  else
    out["witness"] = nullptr;
  return out;
}

/// Sensor sets of the σ-secure rank table (taken from the first pair).
template <Scalar T>
std::vector<IndexSet> rank_table_gammas(const Report<T>& rep) {
  std::vector<IndexSet> out;
  if (rep.pairs.empty()) return out;
  for (const auto& r : find_verdict(rep.pairs.front(), VerdictKind::sigma_secure_autonomous).ranks) out.push_back(r.gamma);
  return out;
}

template <Scalar T>
Json report_json(const Report<T>& rep, const ReportContext& ctx) {
  Json out;
  out["tool"] = "securemode";
  out["version"] = kVersion;
  out["backend"] = ctx.backend;
  out["seed"] = ctx.seed;
  out["sigma"] = rep.sigma;
  out["rho"] = rep.rho;
  out["autonomous"] = rep.autonomous;
  out["exhaustive"] = rep.exhaustive;
  out["model"] = {{"path", ctx.model_path}, {"n", ctx.n}, {"m", ctx.m}, {"p", ctx.p}, {"modes", ctx.mode_ids},
                  {"notes", ctx.notes}};
  out["reconstructable"] = rep.reconstructable;
  out["warnings"] = rep.warnings;

  Json gammas = Json::array();
  for (const auto& g : rank_table_gammas(rep)) gammas.push_back(index_set_json(g));
  Json table_pairs = Json::array();
  Json pairs = Json::array();
  for (const auto& pr : rep.pairs) {
    Json ranks = Json::array();
    for (const auto& r : find_verdict(pr, VerdictKind::sigma_secure_autonomous).ranks) ranks.push_back(r.rank);
    table_pairs.push_back({{"i", pr.i}, {"j", pr.j}, {"ranks", std::move(ranks)}});
    Json verdicts = Json::array();
    for (const auto& v : pr.verdicts) verdicts.push_back(verdict_json(v));
    pairs.push_back({{"i", pr.i},
                     {"j", pr.j},
                     {"distinguishable", pr.distinguishable},
                     {"decided_by", to_string(pr.decisive)},
                     {"verdicts", std::move(verdicts)}});
  }
  out["rank_table"] = {{"gammas", std::move(gammas)}, {"pairs", std::move(table_pairs)}};
  out["pairs"] = std::move(pairs);
  return out;
}

template <Scalar T>
void save_report(const Report<T>& rep, const ReportContext& ctx, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot write report");
  out << report_json(rep, ctx).dump(2) << '\n';
}

namespace detail {
inline std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}
inline const char* yes_no(bool b) { return b ? "yes" : "no"; }
}  // namespace detail

/// Human-readable summary: the σ-secure rank table (one row per removed
/// sensor set, one column per pair) followed by the per-pair verdicts.
template <Scalar T>
void render_report(std::ostream& os, const Report<T>& rep, const ReportContext& ctx) {
  using detail::pad;
  os << "model: " << ctx.model_path << "  (n=" << ctx.n << ", m=" << ctx.m << ", p=" << ctx.p << ", backend "
     << ctx.backend << ", seed " << ctx.seed << ")\n";
  if (!ctx.notes.empty()) os << "notes: " << ctx.notes << "\n";
  for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
  os << "budgets: sigma=" << rep.sigma << " rho=" << rep.rho << (rep.autonomous ? "  [autonomous]" : "  [controlled]")
     << (rep.exhaustive ? "  [exhaustive]" : "") << "\n\n";

  os << "rank of the observability stack with the sensors in Gamma removed (full rank = " << 2 * ctx.n << ")\n";
  os << pad("Gamma", 10);
  for (const auto& pr : rep.pairs) os << pad("(" + pr.i + "," + pr.j + ")", 10);
  os << "\n";
  const auto gammas = rank_table_gammas(rep);
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    os << pad(format_index_set(gammas[g]), 10);
    for (const auto& pr : rep.pairs)
      os << pad(std::to_string(find_verdict(pr, VerdictKind::sigma_secure_autonomous).ranks[g].rank), 10);
    os << "\n";
  }
  os << "\n";

  for (const auto& pr : rep.pairs) {
    os << "pair (" << pr.i << "," << pr.j << "): " << (pr.distinguishable ? "DISTINGUISHABLE" : "NOT distinguishable")
       << "  [" << to_string(pr.decisive) << "]\n";
    for (const auto& v : pr.verdicts) {
      os << "  " << pad(to_string(v.kind), 30) << detail::yes_no(v.result);
      if (v.kind == VerdictKind::autonomous && !v.ranks.empty()) os << "  (rank " << v.ranks.front().rank << ")";
      if (v.failing_pattern) {
        os << "  failing Gamma=" << format_index_set(v.failing_pattern->gamma);
        if (v.kind == VerdictKind::sigma_rho_secure_controlled)
          os << " Delta_i=" << format_index_set(v.failing_pattern->delta_i)
             << " Delta_j=" << format_index_set(v.failing_pattern->delta_j) << " (condition " << v.failed_condition.value_or(0)
             << ")";
      }
      os << "  [" << v.checked_patterns << (v.checked_patterns == 1 ? " pattern]\n" : " patterns]\n");
    }
  }
  os << "\nall pairs distinguishable: " << detail::yes_no(rep.reconstructable) << "\n";
}

template <Scalar T>
Json estimate_json(const ModeEstimate<T>& est) {
  Json out;
  out["unique"] = est.unique;
  out["mode"] = est.mode ? Json(*est.mode) : Json(nullptr);
  out["input_genericity_caveat"] = est.input_genericity_caveat;
  Json cands = Json::array();
  for (const auto& c : est.candidates) {
    Json j;
    j["mode"] = c.mode;
    j["consistent"] = c.consistent;
    j["gamma"] = c.gamma ? index_set_json(*c.gamma) : Json(nullptr);
    j["delta"] = c.delta ? index_set_json(*c.delta) : Json(nullptr);
    j["x0_estimate"] = c.x0_estimate ? vector_json(*c.x0_estimate) : Json(nullptr);
    j["residual"] = c.residual;
    j["checked_supports"] = c.checked_supports;
    cands.push_back(std::move(j));
  }
  out["candidates"] = std::move(cands);
  return out;
}

}  // namespace securemode
