#include "copularank/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "copularank/copulas.hpp"
#include "copularank/divergence.hpp"
#include "copularank/errors.hpp"
#include "copularank/estimator.hpp"
#include "copularank/gof.hpp"
#include "copularank/indep.hpp"
#include "copularank/parallel.hpp"
#include "copularank/power.hpp"
#include "copularank/threshold_cache.hpp"
#include "json.hpp"

namespace copularank {

using nlohmann::ordered_json;

namespace {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& field) {
  const std::string text = trim(field);
  if (text.empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    const double value = std::stod(text, &used);
    if (used != text.size()) return std::nullopt;
    return value;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string fixed(double value, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << value;
  return out.str();
}

// Reports and artifacts go to --output when given, else to the caller's stream.
void emit(const std::string& text, const std::string& output_path, std::ostream& out) {
  if (output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(output_path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + output_path);
  file << text;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<int> parse_scan(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw std::invalid_argument("--scan expects LO..HI, got '" + text + "'");
  const int lo = std::stoi(text.substr(0, dots));
  const int hi = std::stoi(text.substr(dots + 2));
  if (lo < 2 || hi < lo) throw std::invalid_argument("--scan range must satisfy 2 <= LO <= HI");
  std::vector<int> sizes;
  for (int s = lo; s <= hi; ++s) sizes.push_back(s);
  return sizes;
}

ordered_json outcome_json(const TestOutcome& outcome) {
  ordered_json j;
  j["statistic"] = outcome.statistic;
  j["threshold"] = outcome.threshold;
  j["decision"] = outcome.reject ? "reject" : "accept";
  j["level"] = outcome.level;
  if (!outcome.details.empty()) {
    ordered_json details;
    for (const auto& [k, v] : outcome.details) details[k] = v;
    j["details"] = details;
  }
  return j;
}

ordered_json density_rows(const DiscreteCopulaDensity& density) {
  ordered_json rows = ordered_json::array();
  for (int p = 1; p <= density.n(); ++p) {
    ordered_json row = ordered_json::array();
    for (int q = 1; q <= density.n(); ++q) row.push_back(density.mass(p, q));
    rows.push_back(row);
  }
  return rows;
}

// Options shared by every subcommand.
struct CommonOptions {
  std::uint64_t seed = 1;
  double alpha = 0.05;
  unsigned threads = 0;
  std::string output;
  std::string format = "json";
  int subsample_size = 0;
  std::uint64_t num_subsamples = 0;
  std::string estimator = "subsample";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Test level")->capture_default_str()->check(CLI::Range(1e-9, 1.0 - 1e-9));
  cmd->add_option("--threads", o.threads, "Worker cap (0 = all cores); results do not depend on it");
  cmd->add_option("--output", o.output, "Write the report here instead of standard output");
  cmd->add_option("--format", o.format, "Report format")->capture_default_str()->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--num-subsamples", o.num_subsamples, "Subsamples m (0 = max(1e5, 200 n^2))")->capture_default_str();
  cmd->add_option("--estimator", o.estimator, "Rank density estimator: subsample (m random subsets) or limit (m -> infinity)")
      ->capture_default_str()
      ->check(CLI::IsMember({"subsample", "limit"}));
}

GammaConfig gamma_config(const CommonOptions& o, int size) {
  return GammaConfig{size, o.num_subsamples, parse_gamma_method(o.estimator)};
}

void advise_sizes(std::size_t sample_size, int n, std::ostream& err) {
  if (static_cast<double>(n) * n > static_cast<double>(sample_size)) {
    err << "note: subsample size " << n << " has n^2 > N = " << sample_size
        << "; with- and without-replacement subsampling are no longer close\n";
  }
}

// ----- estimate -----

struct EstimateOptions {
  std::string input;
  std::string plot;
  std::string radius_mode = "area";
};

int run_estimate(const CommonOptions& o, const EstimateOptions& e, std::ostream& out, std::ostream& err) {
  const BivariateSample sample = read_sample_csv(e.input);
  if (o.subsample_size < 2) throw std::invalid_argument("--subsample-size is required (>= 2)");
  advise_sizes(sample.size(), o.subsample_size, err);
  const GammaConfig config = gamma_config(o, o.subsample_size);
  const GammaEstimate estimate = gamma_density(sample, config, o.seed);

  std::string text;
  if (o.format == "json") {
    ordered_json doc;
    doc["command"] = "estimate";
    doc["input"] = e.input;
    doc["sample_size"] = sample.size();
    doc["subsample_size"] = config.subsample_size;
    doc["estimator"] = o.estimator;
    doc["num_subsamples"] = config.method == GammaMethod::Subsample ? config.effective_count() : 0;
    doc["seed"] = o.seed;
    doc["discarded_subsamples"] = estimate.discarded;
    doc["retained_subsamples"] = estimate.retained;
    doc["indep_statistic"] = indep_statistic(estimate.density);
    doc["mass"] = density_rows(estimate.density);
    text = doc.dump(2) + "\n";
  } else {
    std::ostringstream grid;
    grid << "# rank density n=" << config.subsample_size << " N=" << sample.size() << " estimator=" << o.estimator
         << " m=" << (config.method == GammaMethod::Subsample ? config.effective_count() : 0) << " seed=" << o.seed
         << " discarded=" << estimate.discarded << "\n";
    grid << "# rows p=1..n (first coordinate rank), columns q=1..n\n";
    for (int p = 1; p <= estimate.density.n(); ++p) {
      for (int q = 1; q <= estimate.density.n(); ++q) {
        grid << (q > 1 ? " " : "") << fixed(estimate.density.mass(p, q), 10);
      }
      grid << "\n";
    }
    text = grid.str();
  }
  emit(text, o.output, out);

  if (!e.plot.empty()) {
    const RadiusMode mode = e.radius_mode == "radius" ? RadiusMode::Radius : RadiusMode::Area;
    std::ofstream plot(e.plot, std::ios::binary);
    if (!plot) throw std::runtime_error("cannot write " + e.plot);
    plot << density_svg(estimate.density, mode);
  }
  return 0;
}

// ----- gof -----

struct GofOptions {
  std::string input;
  std::size_t reference_multiplier = 1000;
  std::size_t null_replicates = 500;
  bool refit = false;
};

int run_gof(const CommonOptions& o, const GofOptions& g, std::ostream& out, std::ostream& err) {
  const BivariateSample sample = read_sample_csv(g.input);
  if (o.subsample_size < 2) throw std::invalid_argument("--subsample-size is required (>= 2)");
  advise_sizes(sample.size(), o.subsample_size, err);
  GofConfig config;
  config.gamma = gamma_config(o, o.subsample_size);
  config.reference_multiplier = g.reference_multiplier;
  config.null_replicates = g.null_replicates;
  config.alpha = o.alpha;
  config.seed = o.seed;
  config.refit_null = g.refit;
  const TestOutcome outcome = gof_test(sample, config);

  ordered_json doc;
  doc["command"] = "gof";
  doc["input"] = g.input;
  doc["sample_size"] = sample.size();
  doc["subsample_size"] = o.subsample_size;
  doc["estimator"] = o.estimator;
  doc["num_subsamples"] = config.gamma.method == GammaMethod::Subsample ? config.gamma.effective_count() : 0;
  doc["reference_multiplier"] = config.reference_multiplier;
  doc["reference_size"] = config.reference_multiplier * sample.size();
  doc["null_replicates"] = config.null_replicates;
  doc["refit_null"] = config.refit_null;
  doc["alpha"] = o.alpha;
  doc["seed"] = o.seed;
  doc["theta_hat"] = outcome.details.at("theta_hat");
  doc["result"] = outcome_json(outcome);

  std::string text;
  if (o.format == "json") {
    text = doc.dump(2) + "\n";
  } else {
    std::ostringstream t;
    t << "goodness of fit to the likeliest Frank copula\n"
      << "  N=" << sample.size() << " n=" << o.subsample_size << " estimator=" << o.estimator
      << " K=" << config.null_replicates << " reference=" << config.reference_multiplier * sample.size()
      << " alpha=" << o.alpha << " seed=" << o.seed << "\n"
      << "  theta_hat  " << fixed(outcome.details.at("theta_hat"), 6) << "\n"
      << "  statistic  " << fixed(outcome.statistic, 8) << "\n"
      << "  threshold  " << fixed(outcome.threshold, 8) << "\n"
      << "  decision   " << (outcome.reject ? "reject" : "accept") << "\n";
    text = t.str();
  }
  emit(text, o.output, out);
  return 0;
}

// ----- threshold plumbing shared by indep / power / thresholds -----

struct ThresholdOptions {
  std::size_t reps = 3000;
  std::optional<std::uint64_t> seed;
  std::string cache_path;
};

struct ThresholdContext {
  std::unique_ptr<ThresholdCache> cache;
  ThresholdSettings settings;
  std::size_t entries_before = 0;

  void save() const {
    if (cache && cache->size() != entries_before) cache->save();
  }
};

ThresholdContext threshold_context(const CommonOptions& o, const ThresholdOptions& t) {
  ThresholdContext ctx;
  if (!t.cache_path.empty()) {
    ctx.cache = std::make_unique<ThresholdCache>(ThresholdCache::open(t.cache_path));
    ctx.entries_before = ctx.cache->size();
  }
  ctx.settings = ThresholdSettings{o.alpha, t.reps, t.seed.value_or(o.seed), ctx.cache.get()};
  return ctx;
}

ordered_json threshold_echo(const ThresholdContext& ctx, const ThresholdOptions& t) {
  ordered_json j;
  j["reps"] = ctx.settings.reps;
  j["seed"] = ctx.settings.seed;
  j["cache"] = t.cache_path;
  return j;
}

std::vector<TestKind> parse_tests(const std::string& text) {
  std::vector<TestKind> tests;
  for (const auto& item : split_list(text)) tests.push_back(parse_test_kind(item));
  if (tests.empty()) throw std::invalid_argument("--tests must name at least one test");
  return tests;
}

// ----- indep -----

struct IndepOptions {
  std::string input;
  std::string scenario;
  std::optional<double> amplitude;
  std::optional<std::size_t> sample_size;
  std::string tests = "new";
  ThresholdOptions thresholds;
};

int run_indep(const CommonOptions& o, const IndepOptions& i, std::ostream& out, std::ostream& err) {
  const bool from_file = !i.input.empty();
  if (from_file && (i.amplitude || i.sample_size)) {
    throw std::invalid_argument("--input cannot be combined with --a or --sample-size");
  }
  if (!from_file && (i.scenario.empty() || !i.amplitude || !i.sample_size)) {
    throw std::invalid_argument("give either --input, or --scenario with --a and --sample-size");
  }
  const auto tests = parse_tests(i.tests);
  std::optional<DependenceKind> kind;
  if (!i.scenario.empty()) kind = parse_dependence_kind(i.scenario);

  std::optional<BivariateSample> loaded;
  if (from_file) {
    loaded.emplace(read_sample_csv(i.input));
  } else {
    RandomStream stream = derive_stream(o.seed, 0);
    loaded.emplace(scenario_sample({*kind, *i.amplitude}, *i.sample_size, stream));
  }
  const BivariateSample& sample = *loaded;
  const std::size_t size = sample.size();

  ThresholdContext ctx = threshold_context(o, i.thresholds);
  ordered_json results;
  for (const TestKind test : tests) {
    TestOutcome outcome;
    std::string source = "computed";
    switch (test) {
      case TestKind::New: {
        if (o.subsample_size < 2) throw std::invalid_argument("the new test needs --subsample-size (>= 2)");
        advise_sizes(size, o.subsample_size, err);
        const GammaConfig config = gamma_config(o, o.subsample_size);
        if (ctx.cache && ctx.cache->lookup(new_test_key(size, o.subsample_size, config, ctx.settings))) {
          source = "cache";
        }
        const double threshold = threshold_for({TestKind::New, config}, DependenceKind::Linear, size, ctx.settings);
        outcome = indep_test(sample, config, derive_seed(o.seed, 1), o.alpha, threshold);
        break;
      }
      case TestKind::Deheuvels: {
        ThresholdKey key{"deheuvels", size, 0, o.alpha, ctx.settings.reps, ctx.settings.seed, "", 0};
        if (ctx.cache && ctx.cache->lookup(key)) source = "cache";
        const double threshold = threshold_for({TestKind::Deheuvels, {}}, DependenceKind::Linear, size, ctx.settings);
        outcome = deheuvels_test(sample, o.alpha, threshold);
        break;
      }
      case TestKind::Smart: {
        if (!kind) throw std::invalid_argument("the smart test needs --scenario to name the dependence form");
        ThresholdKey key{"smart-donut", size, 0, o.alpha, ctx.settings.reps, ctx.settings.seed, "", 0};
        if (*kind != DependenceKind::Donut) {
          source = "none";
        } else if (ctx.cache && ctx.cache->lookup(key)) {
          source = "cache";
        }
        const double threshold = threshold_for({TestKind::Smart, {}}, *kind, size, ctx.settings);
        outcome = smart_test(*kind, sample, o.alpha, threshold);
        break;
      }
    }
    ordered_json r = outcome_json(outcome);
    r["threshold_source"] = source;
    results[to_string(test)] = r;
  }
  ctx.save();

  ordered_json doc;
  doc["command"] = "indep";
  if (from_file) {
    doc["input"] = i.input;
  } else {
    doc["scenario"] = {{"kind", i.scenario}, {"a", *i.amplitude}};
  }
  doc["sample_size"] = size;
  doc["subsample_size"] = o.subsample_size;
  doc["estimator"] = o.estimator;
  doc["num_subsamples"] =
      o.subsample_size >= 2 && o.estimator == "subsample" ? gamma_config(o, o.subsample_size).effective_count() : 0;
  doc["alpha"] = o.alpha;
  doc["seed"] = o.seed;
  doc["thresholds"] = threshold_echo(ctx, i.thresholds);
  doc["results"] = results;

  std::string text;
  if (o.format == "json") {
    text = doc.dump(2) + "\n";
  } else {
    std::ostringstream t;
    t << "independence tests  N=" << size << " alpha=" << o.alpha << " seed=" << o.seed << "\n";
    for (const auto& [name, r] : results.items()) {
      t << "  " << std::left << std::setw(10) << name << " statistic " << fixed(r["statistic"].get<double>(), 8)
        << "  threshold " << fixed(r["threshold"].get<double>(), 8) << "  " << r["decision"].get<std::string>()
        << "\n";
    }
    text = t.str();
  }
  emit(text, o.output, out);
  return 0;
}

// ----- power -----

struct PowerOptions {
  std::vector<std::string> scenarios;
  std::vector<double> amplitudes;
  std::size_t sample_size = 0;
  std::string scan;
  std::string tests = "new,deheuvels,smart";
  std::size_t reps = 1000;
  ThresholdOptions thresholds;
};

int run_power(const CommonOptions& o, const PowerOptions& p, std::ostream& out, std::ostream& err) {
  if (p.scenarios.empty()) throw std::invalid_argument("--scenario is required");
  if (p.scenarios.size() != p.amplitudes.size()) {
    throw std::invalid_argument("give one --a per --scenario (" + std::to_string(p.scenarios.size()) +
                                " scenarios, " + std::to_string(p.amplitudes.size()) + " amplitudes)");
  }
  if (p.sample_size < 3) throw std::invalid_argument("--sample-size must be >= 3");
  const auto tests = parse_tests(p.tests);
  const bool wants_new = std::find(tests.begin(), tests.end(), TestKind::New) != tests.end();
  if (!p.scan.empty() && o.subsample_size != 0) {
    throw std::invalid_argument("--scan and --subsample-size are mutually exclusive");
  }
  std::vector<int> sizes;
  if (wants_new) {
    if (!p.scan.empty()) {
      sizes = parse_scan(p.scan);
    } else if (o.subsample_size != 0) {
      sizes = {o.subsample_size};
    } else {
      throw std::invalid_argument("the new test needs --subsample-size or --scan");
    }
    if (static_cast<std::size_t>(sizes.back()) > p.sample_size) {
      throw std::invalid_argument("subsample sizes must not exceed --sample-size");
    }
    for (const int s : sizes) advise_sizes(p.sample_size, s, err);
  }

  std::vector<DependenceScenario> scenarios;
  for (std::size_t d = 0; d < p.scenarios.size(); ++d) {
    scenarios.push_back({parse_dependence_kind(p.scenarios[d]), p.amplitudes[d]});
  }

  ThresholdContext ctx = threshold_context(o, p.thresholds);
  const GammaConfig gamma = gamma_config(o, sizes.empty() ? 2 : sizes.front());

  ordered_json rows = ordered_json::array();
  std::optional<PowerReport> report;
  if (wants_new) {
    const auto thresholds = new_test_thresholds(p.sample_size, sizes, gamma, ctx.settings);
    report.emplace(power_report(scenarios, p.sample_size, sizes, gamma, thresholds, o.alpha, p.reps, o.seed));
  }
  for (std::size_t d = 0; d < scenarios.size(); ++d) {
    const std::uint64_t column_seed = derive_seed(o.seed, d);
    ordered_json row;
    row["scenario"] = p.scenarios[d];
    row["a"] = scenarios[d].amplitude;
    for (const TestKind test : tests) {
      if (test == TestKind::New) continue;
      const TestSpec spec{test, gamma};
      const double threshold = threshold_for(spec, scenarios[d].kind, p.sample_size, ctx.settings);
      const double power = estimate_power(spec, scenarios[d], p.sample_size, p.reps, o.alpha, threshold, column_seed);
      row[to_string(test)] = {{"power", power}, {"mc_stderr", std::sqrt(power * (1.0 - power) / p.reps)}};
    }
    if (report) {
      ordered_json by_size = ordered_json::array();
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        by_size.push_back({{"size", sizes[k]}, {"power", report->power(k, d)}, {"mc_stderr", report->mc_stderr(k, d)}});
      }
      const std::size_t best = report->best_size_index(d);
      row["new"] = {{"by_size", by_size}, {"best_size", sizes[best]}, {"best_power", report->power(best, d)}};
    }
    rows.push_back(row);
  }
  ctx.save();

  ordered_json doc;
  doc["command"] = "power";
  doc["sample_size"] = p.sample_size;
  doc["tests"] = split_list(p.tests);
  doc["sizes"] = sizes;
  doc["estimator"] = o.estimator;
  doc["num_subsamples"] = o.num_subsamples;
  doc["alpha"] = o.alpha;
  doc["reps"] = p.reps;
  doc["seed"] = o.seed;
  doc["thresholds"] = threshold_echo(ctx, p.thresholds);
  doc["rows"] = rows;
  std::optional<int> chosen;
  if (report && sizes.size() > 1) {
    chosen = minimax_regret_size(*report);
    const auto at = static_cast<std::size_t>(std::find(sizes.begin(), sizes.end(), *chosen) - sizes.begin());
    ordered_json powers = ordered_json::array();
    for (std::size_t d = 0; d < scenarios.size(); ++d) powers.push_back(report->power(at, d));
    doc["minimax_regret"] = {{"size", *chosen}, {"power", powers}};
  }

  std::string text;
  if (o.format == "json") {
    text = doc.dump(2) + "\n";
  } else {
    std::ostringstream t;
    t << "power study  N=" << p.sample_size << " alpha=" << o.alpha << " reps=" << p.reps << " seed=" << o.seed
      << " estimator=" << o.estimator << "\n";
    t << std::left << std::setw(11) << "scenario" << std::right << std::setw(8) << "a" << std::setw(8) << "smart"
      << std::setw(11) << "deheuvels" << std::setw(8) << "new" << std::setw(7) << "size";
    if (chosen) t << std::setw(9) << "minimax";
    t << "\n";
    for (std::size_t d = 0; d < rows.size(); ++d) {
      const auto& row = rows[d];
      auto cell = [&](const char* name) {
        return row.contains(name) && row[name].contains("power") ? fixed(row[name]["power"].get<double>(), 3)
                                                                 : std::string("-");
      };
      t << std::left << std::setw(11) << row["scenario"].get<std::string>() << std::right << std::setw(8)
        << fixed(row["a"].get<double>(), 2) << std::setw(8) << cell("smart") << std::setw(11) << cell("deheuvels");
      if (row.contains("new")) {
        t << std::setw(8) << fixed(row["new"]["best_power"].get<double>(), 3) << std::setw(7)
          << row["new"]["best_size"].get<int>();
      } else {
        t << std::setw(8) << "-" << std::setw(7) << "-";
      }
      if (chosen) t << std::setw(9) << fixed(doc["minimax_regret"]["power"][d].get<double>(), 3);
      t << "\n";
    }
    if (chosen) t << "minimax-regret subsample size: " << *chosen << "\n";
    text = t.str();
  }
  emit(text, o.output, out);
  return 0;
}

// ----- thresholds -----

struct ThresholdsCommandOptions {
  std::size_t sample_size = 0;
  std::string scan;
  std::string tests = "new";
  ThresholdOptions thresholds;
};

int run_thresholds(const CommonOptions& o, const ThresholdsCommandOptions& t, std::ostream& out, std::ostream& err) {
  if (t.thresholds.cache_path.empty()) throw std::invalid_argument("--threshold-cache is required");
  if (t.sample_size < 3) throw std::invalid_argument("--sample-size must be >= 3");
  if (!t.scan.empty() && o.subsample_size != 0) {
    throw std::invalid_argument("--scan and --subsample-size are mutually exclusive");
  }
  const auto tests = parse_tests(t.tests);
  ThresholdContext ctx = threshold_context(o, t.thresholds);

  ordered_json computed = ordered_json::array();
  for (const TestKind test : tests) {
    if (test == TestKind::New) {
      std::vector<int> sizes = !t.scan.empty() ? parse_scan(t.scan) : std::vector<int>{o.subsample_size};
      if (sizes.front() < 2) throw std::invalid_argument("the new test needs --subsample-size or --scan");
      if (static_cast<std::size_t>(sizes.back()) > t.sample_size) {
        throw std::invalid_argument("subsample sizes must not exceed --sample-size");
      }
      for (const int s : sizes) advise_sizes(t.sample_size, s, err);
      const GammaConfig gamma = gamma_config(o, sizes.front());
      const auto values = new_test_thresholds(t.sample_size, sizes, gamma, ctx.settings);
      for (std::size_t k = 0; k < sizes.size(); ++k) {
        computed.push_back({{"test", "new"}, {"subsample_size", sizes[k]}, {"threshold", values[k]}});
      }
    } else if (test == TestKind::Deheuvels) {
      const double v = threshold_for({test, {}}, DependenceKind::Linear, t.sample_size, ctx.settings);
      computed.push_back({{"test", "deheuvels"}, {"threshold", v}});
    } else {
      const double v = threshold_for({test, {}}, DependenceKind::Donut, t.sample_size, ctx.settings);
      computed.push_back({{"test", "smart-donut"}, {"threshold", v}});
    }
  }
  ctx.save();

  ordered_json doc;
  doc["command"] = "thresholds";
  doc["sample_size"] = t.sample_size;
  doc["alpha"] = o.alpha;
  doc["estimator"] = o.estimator;
  doc["num_subsamples"] = o.num_subsamples;
  doc["thresholds"] = threshold_echo(ctx, t.thresholds);
  doc["entries"] = computed;
  emit(doc.dump(2) + "\n", o.output, out);
  return 0;
}

}  // namespace

BivariateSample parse_sample_csv(std::istream& in, const std::string& source_name) {
  std::vector<double> xs, ys;
  std::string line;
  std::size_t line_number = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const auto fields = [&] {
      std::vector<std::string> f;
      std::stringstream s(line);
      std::string item;
      while (std::getline(s, item, ',')) f.push_back(item);
      return f;
    }();
    const auto x = fields.size() == 2 ? parse_number(fields[0]) : std::nullopt;
    const auto y = fields.size() == 2 ? parse_number(fields[1]) : std::nullopt;
    if (!x || !y) {
      if (first_content) {
        first_content = false;  // header
        continue;
      }
      throw std::runtime_error(source_name + ":" + std::to_string(line_number) +
                               ": expected two comma-separated numbers");
    }
    first_content = false;
    xs.push_back(*x);
    ys.push_back(*y);
  }
  if (xs.size() < 2) throw std::runtime_error(source_name + ": need at least 2 data rows");
  return BivariateSample(std::move(xs), std::move(ys));
}

BivariateSample read_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file " + path.string());
  return parse_sample_csv(in, path.string());
}

std::string density_svg(const DiscreteCopulaDensity& density, RadiusMode mode) {
  constexpr double kSide = 480.0;
  constexpr double kMargin = 40.0;
  const int n = density.n();
  const double step = (kSide - 2 * kMargin) / n;
  const double max_radius = 0.48 * step;
  double peak = 0.0;
  for (const double m : density.masses()) peak = std::max(peak, m);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSide << "\" height=\"" << kSide
      << "\" viewBox=\"0 0 " << kSide << " " << kSide << "\">\n";
  svg << "  <rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kSide - 2 * kMargin
      << "\" height=\"" << kSide - 2 * kMargin << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int p = 1; p <= n; ++p) {
    for (int q = 1; q <= n; ++q) {
      const double m = density.mass(p, q);
      if (m <= 0.0 || peak <= 0.0) continue;
      const double share = m / peak;
      const double radius = max_radius * (mode == RadiusMode::Area ? std::sqrt(share) : share);
      // Atom (p/n, q/n) sits at the upper-right corner of its cell; draw at the cell centre.
      const double cx = kMargin + (p - 0.5) * step;
      const double cy = kSide - kMargin - (q - 0.5) * step;
      svg << "  <circle cx=\"" << fixed(cx, 3) << "\" cy=\"" << fixed(cy, 3) << "\" r=\"" << fixed(radius, 3)
          << "\" fill=\"#1f77b4\" fill-opacity=\"0.7\"><title>p=" << p << " q=" << q << " mass=" << fixed(m, 6)
          << "</title></circle>\n";
    }
  }
  svg << "  <text x=\"" << kSide / 2 << "\" y=\"" << kSide - 12 << "\" text-anchor=\"middle\" font-size=\"14\">rank of x / n</text>\n";
  svg << "  <text x=\"14\" y=\"" << kSide / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 14 "
      << kSide / 2 << ")\">rank of y / n</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Copula density estimation by rank subsampling, with goodness-of-fit and independence tests", "copularank"};
  app.require_subcommand(1);

  CommonOptions common;
  EstimateOptions est;
  GofOptions gof;
  IndepOptions ind;
  PowerOptions pow;
  ThresholdsCommandOptions thr;

  auto* estimate = app.add_subcommand("estimate", "Estimate the rank density of a two-column data file");
  add_common(estimate, common);
  estimate->add_option("--input", est.input, "Two-column comma-separated data")->required();
  estimate->add_option("--subsample-size", common.subsample_size, "Subsample size n")->required();
  estimate->add_option("--plot", est.plot, "Also write an SVG circle plot here");
  estimate->add_option("--radius-mode", est.radius_mode, "Circle scaling: area (area ~ mass) or radius (radius ~ mass)")
      ->capture_default_str()
      ->check(CLI::IsMember({"area", "radius"}));

  auto* gof_cmd = app.add_subcommand("gof", "Goodness-of-fit test to the likeliest Frank copula");
  add_common(gof_cmd, common);
  gof_cmd->add_option("--input", gof.input, "Two-column comma-separated data")->required();
  gof_cmd->add_option("--subsample-size", common.subsample_size, "Subsample size n")->required();
  gof_cmd->add_option("--reference-multiplier", gof.reference_multiplier, "Reference sample size / N")->capture_default_str();
  gof_cmd->add_option("--null-replicates", gof.null_replicates, "Null replicates K")->capture_default_str();
  gof_cmd->add_flag("--refit", gof.refit, "Re-estimate theta on every null sample");

  auto add_threshold_options = [](CLI::App* cmd, ThresholdOptions& t, const char* reps_flag) {
    cmd->add_option(reps_flag, t.reps, "Null simulations per threshold")->capture_default_str();
    cmd->add_option("--threshold-seed", t.seed, "Seed of the threshold simulations (default: --seed)");
    cmd->add_option("--threshold-cache", t.cache_path, "JSON threshold cache to read and extend");
  };

  auto* indep = app.add_subcommand("indep", "Independence tests on a data file or a simulated scenario");
  add_common(indep, common);
  indep->add_option("--input", ind.input, "Two-column comma-separated data");
  indep->add_option("--scenario", ind.scenario, "linear | quadratic | donut | butterfly");
  indep->add_option("--a", ind.amplitude, "Scenario amplitude");
  indep->add_option("--sample-size", ind.sample_size, "Simulated sample size N");
  indep->add_option("--subsample-size", common.subsample_size, "Subsample size n");
  indep->add_option("--tests", ind.tests, "Comma list of new, deheuvels, smart")->capture_default_str();
  add_threshold_options(indep, ind.thresholds, "--reps");

  auto* power = app.add_subcommand("power", "Monte Carlo power study over scenarios and subsample sizes");
  add_common(power, common);
  power->add_option("--scenario", pow.scenarios, "Dependence form (repeatable)")->required();
  power->add_option("--a", pow.amplitudes, "Amplitude for each --scenario (repeatable)")->required();
  power->add_option("--sample-size", pow.sample_size, "Sample size N")->required();
  power->add_option("--subsample-size", common.subsample_size, "Single subsample size n");
  power->add_option("--scan", pow.scan, "Subsample size range LO..HI");
  power->add_option("--tests", pow.tests, "Comma list of new, deheuvels, smart")->capture_default_str();
  power->add_option("--reps", pow.reps, "Simulated samples per power estimate")->capture_default_str();
  add_threshold_options(power, pow.thresholds, "--threshold-reps");

  auto* thresholds = app.add_subcommand("thresholds", "Simulate null thresholds into a cache file");
  add_common(thresholds, common);
  thresholds->add_option("--sample-size", thr.sample_size, "Sample size N")->required();
  thresholds->add_option("--subsample-size", common.subsample_size, "Subsample size n");
  thresholds->add_option("--scan", thr.scan, "Subsample size range LO..HI");
  thresholds->add_option("--tests", thr.tests, "Comma list of new, deheuvels, smart")->capture_default_str();
  add_threshold_options(thresholds, thr.thresholds, "--reps");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    set_thread_limit(common.threads);
    if (*estimate) return run_estimate(common, est, out, err);
    if (*gof_cmd) return run_gof(common, gof, out, err);
    if (*indep) return run_indep(common, ind, out, err);
    if (*power) return run_power(common, pow, out, err);
    if (*thresholds) return run_thresholds(common, thr, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace copularank
