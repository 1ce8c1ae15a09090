#include "reclass/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

namespace reclass {

namespace {

// Hand-rolled draws so fixtures are bit-identical across standard libraries.
double uniform(std::mt19937& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng()) / 4294967296.0);
}

double normal(std::mt19937& rng, double sd) {
  const double u1 = (static_cast<double>(rng()) + 0.5) / 4294967296.0;
  const double u2 = static_cast<double>(rng()) / 4294967296.0;
  return sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename T>
void shuffle(std::vector<T>& items, std::mt19937& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng() % i]);
  }
}

std::string family_name(long long n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "FAM%06lld", n);
  return buf;
}

std::string code_for(const std::string& subclass) { return subclass + "1/00"; }

}  // namespace

SnapshotPairFixture make_snapshot_pair(const SnapshotPairPlan& plan) {
  if (plan.class_sizes.empty())
    throw std::invalid_argument("make_snapshot_pair: no classes in the plan");
  if (plan.last_year < plan.first_year)
    throw std::invalid_argument("make_snapshot_pair: bad year range");
  std::mt19937 rng(plan.seed);
  const long long span = plan.last_year - plan.first_year + 1;

  SnapshotPairFixture fx;
  fx.earlier.label = plan.earlier_label;
  std::map<std::string, std::vector<std::string>> members;  // class -> family ids
  long long counter = 0;
  for (const auto& [class_id, size] : plan.class_sizes) {
    for (long long i = 0; i < size; ++i) {
      const std::string id = family_name(counter++);
      const long long year = plan.first_year + (i % span);
      fx.earlier.records[id] = FamilyRecord{year, {code_for(class_id)}};
      members[class_id].push_back(id);
    }
  }

  fx.later = fx.earlier;
  fx.later.label = plan.later_label;

  // Baselines first: every family persists, so the baseline is just the
  // earlier-edition membership per filing year.
  for (const auto& [class_id, ids] : members) {
    for (const auto& id : ids) {
      fx.expected[{class_id, fx.earlier.records[id].filing_year}].baseline += 1.0;
    }
    fx.per_class[class_id] = {0.0, 0.0};
  }

  // Additions: each class gains round(add_rate * size) families drawn from
  // the other classes.
  std::vector<std::string> all_ids;
  all_ids.reserve(fx.earlier.records.size());
  for (const auto& [id, rec] : fx.earlier.records) all_ids.push_back(id);
  std::map<std::string, std::vector<std::string>> gained;  // class -> donors that got a code
  for (const auto& [class_id, size] : plan.class_sizes) {
    const long long wanted = std::llround(plan.add_rate * static_cast<double>(size));
    std::vector<std::string> pool = all_ids;
    shuffle(pool, rng);
    long long added = 0;
    const std::string code = code_for(class_id);
    for (const auto& id : pool) {
      if (added == wanted) break;
      auto& rec = fx.later.records[id];
      if (rec.codes.contains(code)) continue;
      rec.codes.insert(code);
      fx.expected[{class_id, rec.filing_year}].positive += 1.0;
      fx.per_class[class_id].first += 1.0;
      // the donor's original class can later lose this family safely
      gained[truncate_code(*fx.earlier.records[id].codes.begin(), ClassLevel::subclass)]
          .push_back(id);
      ++added;
    }
    if (added != wanted)
      throw std::invalid_argument("make_snapshot_pair: not enough donor families for " + class_id);
  }

  // Removals: drop the original code of families that gained one, so no
  // family ends up with an empty code set.
  for (const auto& [class_id, size] : plan.class_sizes) {
    const long long wanted = std::llround(plan.remove_rate * static_cast<double>(size));
    auto& candidates = gained[class_id];
    if (static_cast<long long>(candidates.size()) < wanted)
      throw std::invalid_argument("make_snapshot_pair: removal plan infeasible for " + class_id);
    for (long long i = 0; i < wanted; ++i) {
      const std::string& id = candidates[static_cast<std::size_t>(i)];
      auto& rec = fx.later.records[id];
      rec.codes.erase(code_for(class_id));
      fx.expected[{class_id, rec.filing_year}].negative += 1.0;
      fx.per_class[class_id].second += 1.0;
    }
  }
  return fx;
}

ReclassSeriesFixture make_reclass_series(const ReclassSeriesPlan& plan) {
  if (plan.n_classes < 3) throw std::invalid_argument("make_reclass_series: need >= 3 classes");
  if (!(plan.beta >= 0.0)) throw std::invalid_argument("make_reclass_series: beta must be >= 0");
  if (plan.earlier_edition_year <= plan.first_year)
    throw std::invalid_argument("make_reclass_series: empty year range");

  std::vector<std::string> classes;
  for (int i = 0; i < plan.n_classes; ++i) {
    std::string id;
    id += static_cast<char>('A' + i % 8);
    const int num = 1 + i / 8;
    id += static_cast<char>('0' + num / 10);
    id += static_cast<char>('0' + num % 10);
    id += static_cast<char>('A' + i % 26);
    classes.push_back(id);
  }

  ReclassSeriesFixture fx;
  fx.earlier.label = std::to_string(plan.earlier_edition_year);
  fx.first_event_year = plan.earlier_edition_year + 1;

  std::map<long long, std::vector<std::string>> cohorts;
  long long counter = 0;
  for (long long tau = plan.first_year; tau <= plan.earlier_edition_year; ++tau) {
    const long long m = std::llround(
        static_cast<double>(plan.base_cohort) *
        std::pow(plan.cohort_growth, static_cast<double>(tau - plan.first_year)));
    for (long long i = 0; i < m; ++i) {
      const std::string id = family_name(counter);
      fx.earlier.records[id] =
          FamilyRecord{tau, {code_for(classes[static_cast<std::size_t>(counter % plan.n_classes)])}};
      cohorts[tau].push_back(id);
      ++counter;
    }
  }

  fx.later = fx.earlier;
  fx.later.label = std::to_string(plan.earlier_edition_year + plan.window_size);

  for (const auto& [tau, ids] : cohorts) {
    double h = 0.0;
    for (int j = 0; j < plan.window_size; ++j)
      h += 1.0 / static_cast<double>(fx.first_event_year + j - tau);
    const long long additions =
        std::llround(plan.beta * h * static_cast<double>(ids.size()));
    const long long m = static_cast<long long>(ids.size());
    for (long long a = 0; a < additions; ++a) {
      const std::string& id = ids[static_cast<std::size_t>(a % m)];
      auto& rec = fx.later.records[id];
      // Rotate away from the family's base class; pass p ends one class
      // further along, so repeated passes never collide while p < n - 1.
      const int base = static_cast<int>(
          std::find(classes.begin(), classes.end(),
                    truncate_code(*fx.earlier.records[id].codes.begin(), ClassLevel::subclass)) -
          classes.begin());
      const int pass = static_cast<int>(a / m);
      if (pass >= plan.n_classes - 1)
        throw std::invalid_argument("make_reclass_series: beta too large for the class pool");
      rec.codes.insert(
          code_for(classes[static_cast<std::size_t>((base + 1 + pass) % plan.n_classes)]));
    }
  }
  return fx;
}

ClassificationCountTable make_count_table(const CountTablePlan& plan) {
  if (!(plan.beta < 1.0)) throw std::invalid_argument("make_count_table: beta must be < 1");
  if (!(plan.alpha > 0.0)) throw std::invalid_argument("make_count_table: alpha must be > 0");
  if (!(plan.w0 > 0.0)) throw std::invalid_argument("make_count_table: w0 must be > 0");
  if (plan.present_year <= plan.first_year)
    throw std::invalid_argument("make_count_table: need present_year > first_year");

  ClassificationCountTable table;
  table.present_year = plan.present_year;
  std::map<long long, double> current;  // cohort -> count at the running observation year
  for (long long obs = plan.first_year; obs <= plan.present_year; ++obs) {
    double stock = 0.0;
    for (auto& [year, count] : current) {
      const long long lag = obs - year;
      if (lag >= 1 && lag <= plan.depth) count /= 1.0 - plan.beta / static_cast<double>(lag);
      stock += count;
    }
    const double born = obs == plan.first_year ? plan.initial_count : plan.alpha * stock;
    current[obs] = born;
    table.unique_families[obs] = born / plan.w0;
  }
  for (const auto& [year, count] : current) {
    table.counts[{year, plan.present_year}] = count;
  }
  return table;
}

std::vector<GroupStats> make_planted_group_stats(const PlantedGroupPlan& plan) {
  std::mt19937 rng(plan.seed);
  std::vector<GroupStats> stats;
  int serial = 0;
  for (const char section : plan.sections) {
    for (int i = 0; i < plan.groups_per_section; ++i) {
      GroupStats gs;
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%c%02d%c%d", section, 1 + i % 99, 'A' + i % 26,
                    1 + serial % 97);
      gs.class_id = buf;
      ++serial;
      gs.w_k = uniform(rng, 1.0, 8.0);
      gs.w_k_year_avg = gs.w_k * uniform(rng, 0.85, 1.0);
      gs.log_group_total = uniform(rng, std::log(1e3), std::log(1e5));
      gs.log_group_total_fractional = gs.log_group_total - std::log(gs.w_k);
      gs.recent_years = plan.recent_years;
      for (auto& lr : gs.log_recent_patents)
        lr = gs.log_group_total - uniform(rng, 2.5, 3.5);
      gs.g_k = 1.0 + plan.intercept + plan.w_slope * gs.w_k +
               plan.total_slope * gs.log_group_total + normal(rng, plan.noise_sd);
      gs.g_k_fractional = 1.0 + plan.intercept + plan.w_slope * gs.w_k +
                          plan.total_slope * gs.log_group_total_fractional +
                          normal(rng, plan.noise_sd);
      stats.push_back(std::move(gs));
    }
  }
  return stats;
}

}  // namespace reclass
