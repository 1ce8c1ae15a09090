// reclass: cohort growth and reclassification analysis toolkit.
//
// Subcommands bind the library into file-based pipelines: scalar solutions
// (solve, exact), forward simulation (simulate), snapshot diffing (diff,
// rates, sizes), estimation (fit-beta, estimate-alpha), per-class analytics
// (panel, groups, regress), synthetic data (fixtures ...) and the validation
// suite (validate).
//
// Every written file gets a run manifest: embedded under "manifest" for JSON
// outputs, as a <file>.manifest.json sidecar for CSV. Writes are atomic
// (temp file + rename). Exit codes: 0 ok, 1 validation, 2 numerical, 3 I/O.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "reclass/acceptance.hpp"
#include "reclass/analysis.hpp"
#include "reclass/csv.hpp"
#include "reclass/errors.hpp"
#include "reclass/estimate.hpp"
#include "reclass/fixtures.hpp"
#include "reclass/model.hpp"
#include "reclass/simulate.hpp"
#include "reclass/snapshot.hpp"
#include "reclass/version.hpp"

using json = nlohmann::ordered_json;
using namespace reclass;

namespace {

json make_manifest(const std::string& command, const json& inputs, const json& parameters,
                   const std::vector<std::string>& outputs,
                   std::optional<unsigned> seed = std::nullopt) {
  json manifest;
  manifest["tool"] = "reclass";
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["inputs"] = inputs;
  manifest["parameters"] = parameters;
  if (seed) manifest["seed"] = *seed;
  manifest["outputs"] = outputs;
  return manifest;
}

void emit_json(const std::string& out_path, json payload, const json& manifest) {
  payload["manifest"] = manifest;
  const std::string text = payload.dump(2) + "\n";
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_text_atomic(out_path, text);
  }
}

void emit_csv(const std::string& out_path, const CsvTable& table, const json& manifest) {
  write_text_atomic(out_path, to_csv_text(table));
  write_text_atomic(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

YearRange parse_year_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw std::invalid_argument("expected a year range A:B, got '" + text + "'");
  YearRange range{parse_year(parts[0]), parse_year(parts[1])};
  if (range.last < range.first) throw std::invalid_argument("year range is reversed: " + text);
  return range;
}

std::vector<std::pair<long long, double>> parse_cohort_seeds(const std::string& text) {
  std::vector<std::pair<long long, double>> seeds;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2)
      throw std::invalid_argument("expected tau:count, got '" + item + "'");
    seeds.emplace_back(parse_year(parts[0]), parse_real(parts[1]));
  }
  return seeds;
}

std::string snapshot_csv_text(const EditionSnapshot& snapshot) {
  CsvTable table;
  table.header = {"family_id", "filing_year", "codes"};
  for (const auto& [family, record] : snapshot.records) {
    std::string codes;
    for (const auto& code : record.codes) {
      if (!codes.empty()) codes += ';';
      codes += code;
    }
    table.rows.push_back({family, std::to_string(record.filing_year), codes});
  }
  return to_csv_text(table);
}

ReclassEventStream read_event_stream(const std::string& path) {
  const CsvTable table = read_csv(path);
  int c_tau = -1, c_win = -1, c_rec = -1, c_before = -1;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == "tau") c_tau = static_cast<int>(i);
    if (table.header[i] == "window_start") c_win = static_cast<int>(i);
    if (table.header[i] == "reclassified") c_rec = static_cast<int>(i);
    if (table.header[i] == "classifications_before") c_before = static_cast<int>(i);
  }
  if (c_tau < 0 || c_win < 0 || c_rec < 0 || c_before < 0)
    throw IoError(path + ": need columns tau, window_start, reclassified, classifications_before");
  ReclassEventStream stream;
  for (const auto& row : table.rows) {
    stream.records.push_back({parse_year(row[c_tau]), parse_year(row[c_win]),
                              parse_real(row[c_rec]), parse_real(row[c_before])});
  }
  return stream;
}

CsvTable event_stream_table(const ReclassEventStream& stream) {
  CsvTable table;
  table.header = {"tau", "window_start", "reclassified", "classifications_before"};
  for (const auto& rec : stream.records) {
    table.rows.push_back({std::to_string(rec.filing_year), std::to_string(rec.event_year),
                          format_double(rec.reclassified),
                          format_double(rec.classifications_before)});
  }
  return table;
}

ClassificationCountTable read_count_table(const std::string& path) {
  const CsvTable table = read_csv(path);
  int c_fy = -1, c_oy = -1, c_cls = -1, c_fam = -1;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == "filing_year") c_fy = static_cast<int>(i);
    if (table.header[i] == "observation_year") c_oy = static_cast<int>(i);
    if (table.header[i] == "classifications") c_cls = static_cast<int>(i);
    if (table.header[i] == "unique_families") c_fam = static_cast<int>(i);
  }
  if (c_fy < 0 || c_oy < 0 || c_cls < 0)
    throw IoError(path + ": need columns filing_year, observation_year, classifications");
  ClassificationCountTable counts;
  counts.present_year = 0;
  for (const auto& row : table.rows) {
    const long long fy = parse_year(row[c_fy]);
    const long long oy = parse_year(row[c_oy]);
    const double count = parse_real(row[c_cls]);
    if (count < 0.0)
      throw std::invalid_argument(path + ": negative classification count for filing year " +
                                  std::to_string(fy));
    counts.counts[{fy, oy}] = count;
    counts.present_year = std::max(counts.present_year, oy);
    if (c_fam >= 0 && !row[c_fam].empty()) counts.unique_families[fy] = parse_real(row[c_fam]);
  }
  return counts;
}

DiffResult read_diff(const std::string& path, ClassLevel level) {
  const CsvTable table = read_csv(path);
  int c_id = -1, c_fy = -1, c_pos = -1, c_neg = -1, c_base = -1;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == "class_id") c_id = static_cast<int>(i);
    if (table.header[i] == "filing_year") c_fy = static_cast<int>(i);
    if (table.header[i] == "positive") c_pos = static_cast<int>(i);
    if (table.header[i] == "negative") c_neg = static_cast<int>(i);
    if (table.header[i] == "baseline") c_base = static_cast<int>(i);
  }
  if (c_id < 0 || c_fy < 0 || c_pos < 0 || c_neg < 0 || c_base < 0)
    throw IoError(path + ": need columns class_id, filing_year, positive, negative, baseline");
  DiffResult result;
  result.level = level;
  for (const auto& row : table.rows) {
    result.cells[{row[c_id], parse_year(row[c_fy])}] =
        DiffCell{parse_real(row[c_pos]), parse_real(row[c_neg]), parse_real(row[c_base])};
  }
  return result;
}

std::vector<GroupStats> read_group_stats(const std::string& path) {
  const CsvTable table = read_csv(path);
  std::map<std::string, int> cols;
  for (std::size_t i = 0; i < table.header.size(); ++i) cols[table.header[i]] = static_cast<int>(i);
  for (const char* need : {"class_id", "g_k", "w_k", "w_k_year_avg", "g_k_fractional",
                           "log_group_total", "log_group_total_fractional"}) {
    if (!cols.contains(need)) throw IoError(path + ": missing column " + need);
  }
  std::array<long long, 3> recent_years{};
  std::array<int, 3> recent_cols = {-1, -1, -1};
  int found = 0;
  for (const auto& [name, idx] : cols) {
    if (name.rfind("log_patents_", 0) == 0) {
      if (found == 3) throw IoError(path + ": more than three log_patents_* columns");
      recent_years[found] = parse_year(name.substr(12));
      recent_cols[found] = idx;
      ++found;
    }
  }
  if (found != 3) throw IoError(path + ": expected three log_patents_<year> columns");
  std::vector<GroupStats> stats;
  for (const auto& row : table.rows) {
    GroupStats gs;
    gs.class_id = row[cols["class_id"]];
    gs.g_k = parse_real(row[cols["g_k"]]);
    gs.w_k = parse_real(row[cols["w_k"]]);
    gs.w_k_year_avg = parse_real(row[cols["w_k_year_avg"]]);
    gs.g_k_fractional = parse_real(row[cols["g_k_fractional"]]);
    gs.log_group_total = parse_real(row[cols["log_group_total"]]);
    gs.log_group_total_fractional = parse_real(row[cols["log_group_total_fractional"]]);
    gs.recent_years = recent_years;
    for (int i = 0; i < 3; ++i) gs.log_recent_patents[i] = parse_real(row[recent_cols[i]]);
    stats.push_back(std::move(gs));
  }
  return stats;
}

json regression_to_json(const RegressionResult& reg) {
  json out;
  json coefs = json::array();
  for (const auto& c : reg.coefficients) {
    coefs.push_back({{"name", c.name},
                     {"estimate", c.estimate},
                     {"std_error", c.std_error},
                     {"t", c.t_stat},
                     {"p", c.p_value}});
  }
  out["coefficients"] = coefs;
  out["r_squared"] = reg.r_squared;
  out["adj_r_squared"] = reg.adj_r_squared;
  out["residual_std_error"] = reg.residual_std_error;
  out["residual_df"] = reg.residual_df;
  out["f_statistic"] = reg.f_statistic;
  out["f_df"] = {reg.f_df1, reg.f_df2};
  out["f_p_value"] = reg.f_p_value;
  out["n_obs"] = reg.n_obs;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cohort growth and reclassification analysis toolkit", "reclass"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("reclass ") + kVersion);

  // ---- solve ------------------------------------------------------------
  double alpha = 0.0, beta = 0.0, tol = 1e-12, w0 = 0.0, g_override = 0.0;
  std::string out_path;
  auto* solve = app.add_subcommand("solve", "growth factor and predicted quantities");
  solve->add_option("--alpha", alpha, "triggering rate")->required();
  solve->add_option("--beta", beta, "reclassification rate")->required();
  solve->add_option("--tol", tol, "root bracket tolerance")->capture_default_str();
  solve->add_option("--w0", w0, "classifications per patent at introduction");
  solve->add_option("--g", g_override,
                    "measured growth factor for the predicted quantities (default: the root)");
  solve->add_option("--out", out_path, "output JSON path (stdout if omitted)");
  solve->callback([&] {
    const ModelParams params{alpha, beta};
    const GrowthSolution sol = growth_factor(params, tol);
    const double g_used = solve->count("--g") ? g_override : sol.g;
    json payload;
    payload["alpha"] = alpha;
    payload["beta"] = beta;
    payload["g"] = sol.g;
    payload["residual"] = sol.residual;
    payload["n0"] = estimate_prefactor(params);
    if (solve->count("--g")) payload["g_used"] = g_used;
    payload["decline_time_T"] = decline_time(beta, g_used);
    payload["reclass_proportion_V"] = reclass_proportion(g_used, alpha);
    if (solve->count("--w0")) {
      payload["w0"] = w0;
      payload["class_per_patent_W"] = class_per_patent(w0, g_used, alpha);
    }
    const json manifest = make_manifest(
        "solve", json::object(),
        {{"alpha", alpha}, {"beta", beta}, {"tol", tol},
         {"w0", solve->count("--w0") ? json(w0) : json()},
         {"g", solve->count("--g") ? json(g_override) : json()}},
        out_path.empty() ? std::vector<std::string>{} : std::vector<std::string>{out_path});
    emit_json(out_path, payload, manifest);
  });

  // ---- exact ------------------------------------------------------------
  long long horizon = 0;
  bool with_cohorts = false;
  auto* exact = app.add_subcommand("exact", "closed-form totals (and cohort cells)");
  exact->add_option("--alpha", alpha, "triggering rate")->required();
  exact->add_option("--beta", beta, "reclassification rate")->required();
  exact->add_option("--horizon", horizon, "final year")->required();
  exact->add_flag("--cohorts", with_cohorts, "emit per-cohort cells instead of totals");
  exact->add_option("--out", out_path, "output CSV path")->required();
  exact->callback([&] {
    const ModelParams params{alpha, beta};
    CsvTable table;
    if (with_cohorts) {
      table.header = {"tau", "t", "count"};
      for (long long t = 0; t <= horizon; ++t)
        for (long long tau = 0; tau <= t; ++tau)
          table.rows.push_back({std::to_string(tau), std::to_string(t),
                                format_double(exact_cohort_count(params, tau, t))});
    } else {
      table.header = {"t", "total"};
      for (long long t = 0; t <= horizon; ++t)
        table.rows.push_back({std::to_string(t), format_double(exact_total(params, t))});
    }
    emit_csv(out_path, table,
             make_manifest("exact", json::object(),
                           {{"alpha", alpha}, {"beta", beta}, {"horizon", horizon},
                            {"cohorts", with_cohorts}},
                           {out_path}));
  });

  // ---- simulate ----------------------------------------------------------
  std::string mode_name = "patents";
  std::string init_spec = "0:1";
  std::string events_out;
  std::vector<long long> windows;
  int window_size = 3;
  double sim_w0 = 1.0;
  auto* simulate = app.add_subcommand("simulate", "forward recurrence to a horizon");
  simulate->add_option("--alpha", alpha, "triggering rate")->required();
  simulate->add_option("--beta", beta, "reclassification rate")->required();
  simulate->add_option("--horizon", horizon, "final year")->required();
  simulate->add_option("--mode", mode_name, "patents | classifications")->capture_default_str()
      ->check(CLI::IsMember({"patents", "classifications"}));
  simulate->add_option("--w0", sim_w0, "classifications per new patent")->capture_default_str();
  simulate->add_option("--init", init_spec, "initial cohorts as tau:count[,tau:count...]")->capture_default_str();
  simulate->add_option("--out", out_path, "matrix CSV path")->required();
  simulate->add_option("--events-out", events_out, "also emit reclassification events CSV");
  simulate->add_option("--windows", windows, "window start years for --events-out")
      ->delimiter(',');
  simulate->add_option("--window-size", window_size, "event years per window")->capture_default_str();
  simulate->callback([&] {
    SimulationConfig config;
    config.params = {alpha, beta};
    config.horizon = horizon;
    config.initial_cohorts = parse_cohort_seeds(init_spec);
    config.mode = mode_name == "patents" ? CountMode::patents : CountMode::classifications;
    config.w0 = sim_w0;
    const CohortMatrix matrix = run(config);
    CsvTable table;
    table.header = {"tau", "t", "count"};
    for (long long t = 0; t <= horizon; ++t)
      for (long long tau = 0; tau <= t; ++tau)
        table.rows.push_back(
            {std::to_string(tau), std::to_string(t), format_double(matrix.cell(t, tau))});
    const json params_json = {{"alpha", alpha},       {"beta", beta}, {"horizon", horizon},
                              {"mode", mode_name},    {"w0", sim_w0}, {"init", init_spec},
                              {"window_size", window_size}};
    std::vector<std::string> outputs = {out_path};
    if (!events_out.empty()) outputs.push_back(events_out);
    emit_csv(out_path, table, make_manifest("simulate", json::object(), params_json, outputs));
    if (!events_out.empty()) {
      if (windows.empty())
        throw std::invalid_argument("--events-out needs --windows");
      const ReclassEventStream stream =
          emit_reclass_events(matrix, config.params, windows, window_size);
      emit_csv(events_out, event_stream_table(stream),
               make_manifest("simulate", json::object(), params_json, outputs));
    }
  });

  // ---- diff ---------------------------------------------------------------
  std::string earlier_path, later_path, level_name = "subclass", manifest_path;
  std::string earlier_label, later_label;
  long long min_year = 0, max_year = 0;
  auto* diff_cmd = app.add_subcommand("diff", "reclassification deltas between two editions");
  diff_cmd->add_option("--earlier", earlier_path, "earlier edition CSV");
  diff_cmd->add_option("--later", later_path, "later edition CSV");
  diff_cmd->add_option("--manifest", manifest_path, "edition manifest (label=path lines)");
  diff_cmd->add_option("--earlier-label", earlier_label, "label to resolve via --manifest");
  diff_cmd->add_option("--later-label", later_label, "label to resolve via --manifest");
  diff_cmd->add_option("--level", level_name, "section | subclass | maingroup")->capture_default_str()
      ->check(CLI::IsMember({"section", "subclass", "maingroup"}));
  diff_cmd->add_option("--min-year", min_year, "earliest filing year kept");
  diff_cmd->add_option("--max-year", max_year, "latest filing year kept");
  diff_cmd->add_option("--out", out_path, "diff CSV path")->required();
  diff_cmd->callback([&] {
    if (!manifest_path.empty()) {
      const auto editions = read_edition_manifest(manifest_path);
      if (!earlier_label.empty()) earlier_path = editions.at(earlier_label);
      if (!later_label.empty()) later_path = editions.at(later_label);
    }
    if (earlier_path.empty() || later_path.empty())
      throw std::invalid_argument("diff needs --earlier/--later paths or manifest labels");
    SnapshotFilter filter;
    if (diff_cmd->count("--min-year")) filter.min_filing_year = min_year;
    if (diff_cmd->count("--max-year")) filter.max_filing_year = max_year;
    LoadReport report_a, report_b;
    EditionSnapshot earlier = load_snapshot(earlier_path, filter, &report_a);
    EditionSnapshot later = load_snapshot(later_path, filter, &report_b);
    if (!earlier_label.empty()) earlier.label = earlier_label;
    if (!later_label.empty()) later.label = later_label;
    const DiffResult result = diff(earlier, later, class_level_from_string(level_name));
    CsvTable table;
    table.header = {"class_id", "filing_year", "positive", "negative", "baseline"};
    for (const auto& [key, cell] : result.cells) {
      table.rows.push_back({key.class_id, std::to_string(key.filing_year),
                            format_double(cell.positive), format_double(cell.negative),
                            format_double(cell.baseline)});
    }
    for (const auto& issue : report_a.issues)
      std::fprintf(stderr, "%s: %s\n", earlier_path.c_str(), issue.c_str());
    for (const auto& issue : report_b.issues)
      std::fprintf(stderr, "%s: %s\n", later_path.c_str(), issue.c_str());
    emit_csv(out_path, table,
             make_manifest("diff", {{"earlier", earlier_path}, {"later", later_path}},
                           {{"level", level_name},
                            {"min_year", diff_cmd->count("--min-year") ? json(min_year) : json()},
                            {"max_year", diff_cmd->count("--max-year") ? json(max_year) : json()},
                            {"rows_rejected", report_a.issues.size() + report_b.issues.size()},
                            {"rows_filtered_by_year",
                             report_a.filtered_by_year + report_b.filtered_by_year}},
                           {out_path}));
  });

  // ---- sizes ---------------------------------------------------------------
  auto* sizes = app.add_subcommand("sizes", "per-class reclassifications against class size");
  sizes->add_option("--earlier", earlier_path, "earlier edition CSV")->required();
  sizes->add_option("--later", later_path, "later edition CSV")->required();
  sizes->add_option("--level", level_name, "section | subclass | maingroup")->capture_default_str()
      ->check(CLI::IsMember({"section", "subclass", "maingroup"}));
  sizes->add_option("--out", out_path, "sizes CSV path")->required();
  sizes->callback([&] {
    const ClassLevel level = class_level_from_string(level_name);
    const EditionSnapshot earlier = load_snapshot(earlier_path);
    const EditionSnapshot later = load_snapshot(later_path);
    const auto rows = reclass_vs_size(diff(earlier, later, level), earlier, level);
    CsvTable table;
    table.header = {"class_id", "size", "positive", "negative"};
    for (const auto& row : rows) {
      table.rows.push_back({row.class_id, std::to_string(row.size), format_double(row.positive),
                            format_double(row.negative)});
    }
    emit_csv(out_path, table,
             make_manifest("sizes", {{"earlier", earlier_path}, {"later", later_path}},
                           {{"level", level_name}}, {out_path}));
  });

  // ---- rates ----------------------------------------------------------------
  std::string diff_path;
  long long window_start = 0;
  auto* rates = app.add_subcommand("rates", "net reclassification rates by filing year");
  rates->add_option("--diff", diff_path, "diff CSV from `reclass diff`")->required();
  rates->add_option("--window,--window-start", window_start, "first event year of the window")
      ->required();
  rates->add_option("--window-size", window_size, "event years in the window")->capture_default_str();
  rates->add_option("--out", out_path, "event stream CSV path")->required();
  rates->callback([&] {
    const DiffResult result = read_diff(diff_path, ClassLevel::subclass);
    const NetRates net = net_rates_by_filing_year(result, window_start, window_size);
    for (const long long year : net.skipped_zero_baseline)
      std::fprintf(stderr, "skipped filing year %lld: zero baseline\n", year);
    emit_csv(out_path, event_stream_table(net.stream),
             make_manifest("rates", {{"diff", diff_path}},
                           {{"window_start", window_start},
                            {"window_size", window_size},
                            {"skipped_years", net.skipped_zero_baseline.size()}},
                           {out_path}));
  });

  // ---- fit-beta ---------------------------------------------------------------
  std::string in_path, convention = "paper";
  auto* fit_beta_cmd = app.add_subcommand("fit-beta", "reclassification rate from event samples");
  fit_beta_cmd->add_option("--in", in_path, "event stream CSV")->required();
  fit_beta_cmd->add_option("--window-size", window_size, "event years per window")->capture_default_str();
  fit_beta_cmd->add_option("--convention", convention, "paper | dynamics")->capture_default_str()
      ->check(CLI::IsMember({"paper", "dynamics"}));
  fit_beta_cmd->add_option("--out", out_path, "output JSON path (stdout if omitted)");
  fit_beta_cmd->callback([&] {
    const ReclassEventStream stream = read_event_stream(in_path);
    const BetaFit fit = fit_beta(stream, window_size,
                                 convention == "paper" ? LagConvention::paper
                                                       : LagConvention::dynamics);
    json payload;
    payload["beta_hat"] = fit.beta_hat;
    payload["sum_squared_residual"] = fit.sum_squared_residual;
    payload["n_samples"] = fit.n_samples;
    payload["window_size"] = window_size;
    payload["convention"] = convention;
    emit_json(out_path, payload,
              make_manifest("fit-beta", {{"in", in_path}},
                            {{"window_size", window_size}, {"convention", convention}},
                            out_path.empty() ? std::vector<std::string>{}
                                             : std::vector<std::string>{out_path}));
  });

  // ---- estimate-alpha -----------------------------------------------------------
  std::string counts_path;
  long long filing_year = 0;
  int depth = 10;
  auto* est_alpha = app.add_subcommand("estimate-alpha", "triggering rate from count tables");
  est_alpha->add_option("--counts", counts_path, "classification count CSV")->required();
  est_alpha->add_option("--beta", beta, "reclassification rate used for back-correction")
      ->required();
  est_alpha->add_option("--year", filing_year, "filing year to estimate at")->required();
  est_alpha->add_option("--depth", depth, "back-correction depth in years")->capture_default_str();
  est_alpha->add_option("--out", out_path, "output JSON path (stdout if omitted)");
  est_alpha->callback([&] {
    const ClassificationCountTable table = read_count_table(counts_path);
    const AlphaEstimate est = estimate_alpha(table, beta, filing_year, depth);
    json payload;
    payload["alpha_hat"] = est.alpha_hat;
    payload["w0_hat"] = std::isnan(est.w0_hat) ? json() : json(est.w0_hat);
    payload["year"] = est.year;
    payload["alpha_flagged"] = est.alpha_flagged;
    payload["w0_flagged"] = est.w0_flagged;
    emit_json(out_path, payload,
              make_manifest("estimate-alpha", {{"counts", counts_path}},
                            {{"beta", beta}, {"year", filing_year}, {"depth", depth}},
                            out_path.empty() ? std::vector<std::string>{}
                                             : std::vector<std::string>{out_path}));
  });

  // ---- panel ---------------------------------------------------------------------
  std::string snapshot_path, years_spec;
  auto* panel_cmd = app.add_subcommand("panel", "per-class yearly counts from a snapshot");
  panel_cmd->add_option("--snapshot", snapshot_path, "edition CSV")->required();
  panel_cmd->add_option("--level", level_name, "section | subclass | maingroup")->capture_default_str()
      ->check(CLI::IsMember({"section", "subclass", "maingroup"}));
  panel_cmd->add_option("--years", years_spec, "filing year range A:B")->required();
  panel_cmd->add_option("--out", out_path, "panel CSV path")->required();
  panel_cmd->callback([&] {
    const YearRange years = parse_year_range(years_spec);
    const EditionSnapshot snapshot = load_snapshot(snapshot_path);
    const ClassPanel panel = build_panel(snapshot, class_level_from_string(level_name), years);
    CsvTable table;
    table.header = {"class_id", "year", "members", "fractional", "carried_codes"};
    for (const auto& [class_id, cells] : panel.classes) {
      for (const auto& [year, cell] : cells) {
        table.rows.push_back({class_id, std::to_string(year), format_double(cell.members),
                              format_double(cell.fractional), format_double(cell.carried_codes)});
      }
    }
    emit_csv(out_path, table,
             make_manifest("panel", {{"snapshot", snapshot_path}},
                           {{"level", level_name}, {"years", years_spec}}, {out_path}));
  });

  // ---- groups --------------------------------------------------------------------
  std::vector<long long> recent_years;
  auto* groups = app.add_subcommand("groups", "per-class growth and classification measures");
  groups->add_option("--snapshot", snapshot_path, "edition CSV")->required();
  groups->add_option("--level", level_name, "section | subclass | maingroup")->capture_default_str()
      ->check(CLI::IsMember({"section", "subclass", "maingroup"}));
  groups->add_option("--years", years_spec, "growth year range A:B")->required();
  groups->add_option("--recent", recent_years, "three recent control years")
      ->delimiter(',')
      ->expected(3)
      ->required();
  groups->add_option("--out", out_path, "group stats CSV path")->required();
  groups->callback([&] {
    const YearRange years = parse_year_range(years_spec);
    const EditionSnapshot snapshot = load_snapshot(snapshot_path);
    const ClassPanel panel = build_panel(snapshot, class_level_from_string(level_name), years);
    const auto stats =
        build_group_stats(panel, years, {recent_years[0], recent_years[1], recent_years[2]});
    CsvTable table;
    table.header = {"class_id",
                    "g_k",
                    "w_k",
                    "w_k_year_avg",
                    "g_k_fractional",
                    "log_group_total",
                    "log_group_total_fractional",
                    "log_patents_" + std::to_string(recent_years[0]),
                    "log_patents_" + std::to_string(recent_years[1]),
                    "log_patents_" + std::to_string(recent_years[2])};
    for (const auto& gs : stats) {
      table.rows.push_back({gs.class_id, format_double(gs.g_k), format_double(gs.w_k),
                            format_double(gs.w_k_year_avg), format_double(gs.g_k_fractional),
                            format_double(gs.log_group_total),
                            format_double(gs.log_group_total_fractional),
                            format_double(gs.log_recent_patents[0]),
                            format_double(gs.log_recent_patents[1]),
                            format_double(gs.log_recent_patents[2])});
    }
    emit_csv(out_path, table,
             make_manifest("groups", {{"snapshot", snapshot_path}},
                           {{"level", level_name},
                            {"years", years_spec},
                            {"recent", recent_years},
                            {"classes_in_panel", panel.classes.size()},
                            {"classes_selected", stats.size()}},
                           {out_path}));
  });

  // ---- regress --------------------------------------------------------------------
  std::string groups_path, spec_name = "recent";
  bool exclude_outliers = false;
  double outlier_threshold = 9.0;
  auto* regress = app.add_subcommand("regress", "per-section OLS of growth on classifications");
  regress->add_option("--groups", groups_path, "group stats CSV")->required();
  regress->add_option("--spec", spec_name, "recent | yearavg | fractional")->capture_default_str()
      ->check(CLI::IsMember({"recent", "yearavg", "fractional"}));
  regress->add_flag("--exclude-outliers", exclude_outliers, "drop groups with w_k above threshold");
  regress->add_option("--threshold", outlier_threshold, "w_k outlier threshold")->capture_default_str();
  regress->add_option("--out", out_path, "output JSON path (stdout if omitted)");
  regress->callback([&] {
    std::vector<GroupStats> stats = read_group_stats(groups_path);
    json payload;
    if (exclude_outliers) {
      OutlierFilter filtered = exclude_outlier_subclasses(std::move(stats), outlier_threshold);
      stats = std::move(filtered.kept);
      payload["excluded_groups"] = filtered.removed_groups;
      payload["touched_subclasses"] = filtered.touched_subclasses;
    }
    const RobustnessSpec spec = spec_name == "recent"    ? RobustnessSpec::recent_year_controls
                                : spec_name == "yearavg" ? RobustnessSpec::year_averaged
                                                         : RobustnessSpec::fractional;
    const SectionRegressions out = run_robustness_suite(stats, spec);
    json sections_json = json::object();
    for (const auto& [section, reg] : out.by_section)
      sections_json[std::string(1, section)] = regression_to_json(reg);
    payload["sections"] = sections_json;
    json rejected = json::array();
    for (const auto& [section, reason] : out.rejected)
      rejected.push_back({{"section", std::string(1, section)}, {"reason", reason}});
    payload["rejected"] = rejected;
    emit_json(out_path, payload,
              make_manifest("regress", {{"groups", groups_path}},
                            {{"spec", spec_name},
                             {"exclude_outliers", exclude_outliers},
                             {"threshold", outlier_threshold}},
                            out_path.empty() ? std::vector<std::string>{}
                                             : std::vector<std::string>{out_path}));
  });

  // ---- fixtures ---------------------------------------------------------------------
  auto* fixtures = app.add_subcommand("fixtures", "generate synthetic test data");
  fixtures->require_subcommand(1);
  unsigned seed = 1;
  std::string sizes_spec = "A01B:120,B02C:240,C03D:360";
  double add_rate = 0.05, remove_rate = 0.0, growth = 1.05;
  long long first_year = 1990, last_year = 2009, edition_year = 2019, base_cohort = 400;
  int n_classes = 8;
  std::string out_earlier, out_later, plan_out;

  auto* fx_pair = fixtures->add_subcommand("snapshot-pair", "two editions with a known add/remove plan");
  fx_pair->add_option("--seed", seed, "RNG seed")->capture_default_str();
  fx_pair->add_option("--sizes", sizes_spec, "class sizes as ID:count[,ID:count...]")->capture_default_str();
  fx_pair->add_option("--add-rate", add_rate, "planned additions per class size")->capture_default_str();
  fx_pair->add_option("--remove-rate", remove_rate, "planned removals per class size")->capture_default_str();
  fx_pair->add_option("--first-year", first_year, "earliest filing year")->capture_default_str();
  fx_pair->add_option("--last-year", last_year, "latest filing year")->capture_default_str();
  fx_pair->add_option("--out-earlier", out_earlier, "earlier edition CSV")->required();
  fx_pair->add_option("--out-later", out_later, "later edition CSV")->required();
  fx_pair->add_option("--plan-out", plan_out, "expected diff CSV (the oracle)");
  fx_pair->callback([&] {
    SnapshotPairPlan plan;
    plan.seed = seed;
    plan.first_year = first_year;
    plan.last_year = last_year;
    plan.add_rate = add_rate;
    plan.remove_rate = remove_rate;
    for (const auto& item : split(sizes_spec, ',')) {
      const auto parts = split(item, ':');
      if (parts.size() != 2) throw std::invalid_argument("expected ID:count, got '" + item + "'");
      plan.class_sizes.emplace_back(parts[0], parse_year(parts[1]));
    }
    const SnapshotPairFixture fx = make_snapshot_pair(plan);
    std::vector<std::string> outputs = {out_earlier, out_later};
    if (!plan_out.empty()) outputs.push_back(plan_out);
    const json manifest = make_manifest(
        "fixtures snapshot-pair", json::object(),
        {{"sizes", sizes_spec}, {"add_rate", add_rate}, {"remove_rate", remove_rate},
         {"first_year", first_year}, {"last_year", last_year}},
        outputs, seed);
    write_text_atomic(out_earlier, snapshot_csv_text(fx.earlier));
    write_text_atomic(out_earlier + ".manifest.json", manifest.dump(2) + "\n");
    write_text_atomic(out_later, snapshot_csv_text(fx.later));
    write_text_atomic(out_later + ".manifest.json", manifest.dump(2) + "\n");
    if (!plan_out.empty()) {
      CsvTable table;
      table.header = {"class_id", "filing_year", "positive", "negative", "baseline"};
      for (const auto& [key, cell] : fx.expected) {
        table.rows.push_back({key.class_id, std::to_string(key.filing_year),
                              format_double(cell.positive), format_double(cell.negative),
                              format_double(cell.baseline)});
      }
      emit_csv(plan_out, table, manifest);
    }
  });

  auto* fx_series = fixtures->add_subcommand(
      "reclass-series", "editions whose additions follow the inverse-lag law");
  fx_series->add_option("--seed", seed, "RNG seed")->capture_default_str();
  fx_series->add_option("--beta", beta, "planted reclassification rate")->required();
  fx_series->add_option("--growth", growth, "cohort size growth per year")->capture_default_str();
  fx_series->add_option("--first-year", first_year, "earliest filing year")->capture_default_str();
  fx_series->add_option("--edition-year", edition_year, "earlier edition year")->capture_default_str();
  fx_series->add_option("--window-size", window_size, "event years between editions")->capture_default_str();
  fx_series->add_option("--base", base_cohort, "families in the first year")->capture_default_str();
  fx_series->add_option("--classes", n_classes, "number of subclasses")->capture_default_str();
  fx_series->add_option("--out-earlier", out_earlier, "earlier edition CSV")->required();
  fx_series->add_option("--out-later", out_later, "later edition CSV")->required();
  fx_series->callback([&] {
    ReclassSeriesPlan plan;
    plan.seed = seed;
    plan.beta = beta;
    plan.cohort_growth = growth;
    plan.first_year = first_year;
    plan.earlier_edition_year = edition_year;
    plan.window_size = window_size;
    plan.base_cohort = base_cohort;
    plan.n_classes = n_classes;
    const ReclassSeriesFixture fx = make_reclass_series(plan);
    const json manifest = make_manifest(
        "fixtures reclass-series", json::object(),
        {{"beta", beta}, {"growth", growth}, {"first_year", first_year},
         {"edition_year", edition_year}, {"window_size", window_size}, {"base", base_cohort},
         {"classes", n_classes}, {"first_event_year", fx.first_event_year}},
        {out_earlier, out_later}, seed);
    write_text_atomic(out_earlier, snapshot_csv_text(fx.earlier));
    write_text_atomic(out_earlier + ".manifest.json", manifest.dump(2) + "\n");
    write_text_atomic(out_later, snapshot_csv_text(fx.later));
    write_text_atomic(out_later + ".manifest.json", manifest.dump(2) + "\n");
  });

  auto* fx_counts = fixtures->add_subcommand("count-table",
                                             "classification counts with planted alpha, beta, W0");
  double fx_alpha = 0.025, fx_w0 = 1.25, initial_count = 100.0;
  long long ct_first_year = 0, present_year = 40;
  fx_counts->add_option("--alpha", fx_alpha, "planted triggering rate")->capture_default_str();
  fx_counts->add_option("--beta", beta, "planted reclassification rate")->required();
  fx_counts->add_option("--w0", fx_w0, "planted classifications per family")->capture_default_str();
  fx_counts->add_option("--first-year", ct_first_year, "first filing year")->capture_default_str();
  fx_counts->add_option("--present-year", present_year, "observation (present) year")->capture_default_str();
  fx_counts->add_option("--depth", depth, "growth depth in lag years")->capture_default_str();
  fx_counts->add_option("--initial", initial_count, "count of the first cohort")->capture_default_str();
  fx_counts->add_option("--out", out_path, "counts CSV path")->required();
  fx_counts->callback([&] {
    CountTablePlan plan;
    plan.alpha = fx_alpha;
    plan.beta = beta;
    plan.w0 = fx_w0;
    plan.first_year = ct_first_year;
    plan.present_year = present_year;
    plan.depth = depth;
    plan.initial_count = initial_count;
    const ClassificationCountTable table = make_count_table(plan);
    CsvTable csv;
    csv.header = {"filing_year", "observation_year", "classifications", "unique_families"};
    for (const auto& [key, count] : table.counts) {
      const auto& [fy, oy] = key;
      csv.rows.push_back({std::to_string(fy), std::to_string(oy), format_double(count),
                          format_double(table.unique_families.at(fy))});
    }
    emit_csv(out_path, csv,
             make_manifest("fixtures count-table", json::object(),
                           {{"alpha", fx_alpha}, {"beta", beta}, {"w0", fx_w0},
                            {"first_year", ct_first_year}, {"present_year", present_year},
                            {"depth", depth}, {"initial", initial_count}},
                           {out_path}));
  });

  // ---- validate -------------------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "run the full validation suite");
  validate->callback([&] {
    const auto results = run_acceptance();
    int failures = 0;
    for (const auto& result : results) {
      std::puts(format_criterion(result).c_str());
      if (!result.passed) ++failures;
    }
    std::printf("%zu criteria, %d failed\n", results.size(), failures);
    if (failures > 0) throw std::invalid_argument(std::to_string(failures) + " criteria failed");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 3;
  }
  return 0;
}
