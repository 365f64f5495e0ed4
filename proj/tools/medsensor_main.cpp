// Command-line front end: synth, prepare, exp, plot, report.
// Exit codes: 0 success, 2 usage error, 1 runtime failure.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "medsensor/errors.hpp"
#include "medsensor/experiments.hpp"
#include "medsensor/ingest.hpp"
#include "medsensor/pipeline.hpp"
#include "medsensor/svgplot.hpp"
#include "medsensor/synthgen.hpp"
#include "medsensor/zipio.hpp"

using namespace medsensor;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure(path.string());
  f << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure(path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// "10..100" (step 10), "10..100:5", or a comma-separated list
std::vector<std::size_t> parse_hidden(const std::string& text) {
  std::vector<std::size_t> sizes;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    std::size_t step = 10;
    std::string hi_part = text.substr(dots + 2);
    const auto colon = hi_part.find(':');
    if (colon != std::string::npos) {
      step = std::stoul(hi_part.substr(colon + 1));
      hi_part = hi_part.substr(0, colon);
    }
    const std::size_t lo = std::stoul(text.substr(0, dots));
    const std::size_t hi = std::stoul(hi_part);
    if (step == 0 || hi < lo) throw CLI::ValidationError("--hidden", "bad range");
    for (std::size_t h = lo; h <= hi; h += step) sizes.push_back(h);
    return sizes;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    sizes.push_back(std::stoul(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  if (sizes.empty()) throw CLI::ValidationError("--hidden", "empty grid");
  return sizes;
}

struct CommonOpts {
  std::string store;
  std::uint64_t seed = 0;
};

std::string resolve_store(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MEDSENSOR_STORE")) return env;
  throw CLI::ValidationError("--store", "no store given (flag or MEDSENSOR_STORE)");
}

ExperimentReport parse_detail_csv(const std::string& csv) {
  ExperimentReport report;
  std::size_t pos = csv.find('\n');
  if (pos == std::string::npos) throw Error("detail csv: missing header");
  ++pos;
  while (pos < csv.size()) {
    auto nl = csv.find('\n', pos);
    if (nl == std::string::npos) nl = csv.size();
    const std::string line = csv.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 10) throw Error("detail csv: malformed row");
    report.experiment_id = fields[0];
    FoldResult r;
    r.fold_index = std::stoul(fields[1]);
    r.held_out_participant = fields[2];
    r.hidden_size = std::stoul(fields[3]);
    r.repeat = std::stoul(fields[4]);
    r.train_accuracy = std::stod(fields[5]);
    r.test_accuracy = std::stod(fields[6]);
    r.train_size = std::stoul(fields[7]);
    r.test_size = std::stoul(fields[8]);
    r.failed = fields[9] == "1";
    report.rows.push_back(std::move(r));
  }
  return report;
}

int cmd_exp(int which, const std::string& cache_path, const std::string& out_dir,
            const SweepSpec& sweep, const TrainConfig& train_cfg, double ratio,
            std::size_t jobs) {
  auto [spec, vectors] = load_dataset(cache_path);
  (void)spec;

  ExperimentReport report;
  if (which == 1) {
    std::vector<FeatureVector> protocol_only;
    for (const auto& v : vectors)
      if (v.style == GestureStyle::Protocol) protocol_only.push_back(v);
    report = run_exp1(protocol_only, sweep, train_cfg, ratio, jobs);
  } else if (which == 2) {
    report = run_exp2(vectors, sweep, train_cfg, jobs);
  } else {
    report = run_exp3(vectors, sweep, train_cfg, jobs);
  }

  const std::string base = "exp" + std::to_string(which);
  write_text(fs::path(out_dir) / (base + "_detail.csv"), detail_csv(report));
  write_text(fs::path(out_dir) / (base + "_summary.csv"), summary_csv(report));
  write_text(fs::path(out_dir) / (base + "_table.txt"), table_text(report));

  // archive the effective configuration next to the reports
  std::string cfg = "experiment=" + std::to_string(which) + "\n";
  cfg += "cache=" + cache_path + "\nseed=" + std::to_string(train_cfg.seed) + "\n";
  cfg += "epochs=" + std::to_string(train_cfg.epochs) + "\n";
  cfg += "batch_size=" + std::to_string(train_cfg.batch_size) + "\n";
  char lr[32];
  std::snprintf(lr, sizeof lr, "%.9g", train_cfg.learning_rate);
  cfg += std::string("learning_rate=") + lr + "\n";
  cfg += std::string("optimizer=") +
         (train_cfg.optimizer == Optimizer::Adam ? "adam" : "sgd") + "\n";
  cfg += "repeats=" + std::to_string(sweep.repeats) + "\nhidden=";
  for (std::size_t i = 0; i < sweep.hidden_sizes.size(); ++i)
    cfg += (i ? "," : "") + std::to_string(sweep.hidden_sizes[i]);
  cfg += "\n";
  if (which == 1) cfg += "ratio=" + std::to_string(ratio) + "\n";
  write_text(fs::path(out_dir) / (base + "_config.txt"), cfg);

  std::size_t failed = 0;
  for (const auto& r : report.rows) failed += r.failed ? 1 : 0;
  std::printf("%s: %zu cells, %zu failed; reports in %s\n", base.c_str(),
              report.rows.size(), failed, out_dir.c_str());
  return report.any_failed() ? 1 : 0;
}

int cmd_plot(const std::string& store, const std::string& participant,
             const std::string& session, const std::string& style_name,
             std::vector<std::size_t> gesture_indices, const RefineParams& refine,
             const std::string& out_prefix) {
  const GestureStyle style =
      style_name == "natural" ? GestureStyle::Natural : GestureStyle::Protocol;
  const fs::path archive =
      fs::path(store) / participant / to_string(style) / (session + ".zip");
  if (!fs::exists(archive))
    throw UnknownGesture("no session " + participant + "/" + to_string(style) + "/" +
                         session);

  const auto loaded =
      load_session(zipio::read_file(archive.string()), participant, session);
  const auto extracted = extract_positives(loaded.series, loaded.marks, style, refine);
  if (extracted.spans.empty()) throw UnknownGesture("session has no refined gestures");

  if (gesture_indices.empty())
    for (std::size_t i = 0; i < extracted.spans.size(); ++i)
      gesture_indices.push_back(i);

  const double rate = loaded.series.rate_hz;
  const auto context = static_cast<std::size_t>(2.0 * rate);  // 2 s of margin
  std::vector<PlotTrace> traces;
  for (const std::size_t g : gesture_indices) {
    if (g >= extracted.spans.size())
      throw UnknownGesture("gesture index " + std::to_string(g) + " out of range (" +
                           std::to_string(extracted.spans.size()) + " gestures)");
    const Span span = extracted.spans[g];
    const std::size_t begin = span.start_idx > context ? span.start_idx - context : 0;
    const std::size_t end =
        std::min(loaded.series.samples.size(), span.end_idx + context);

    PlotTrace trace;
    trace.boundaries = Span{span.start_idx - begin, span.end_idx - begin};
    for (std::size_t i = begin; i < end; ++i) {
      AccelSample s = loaded.series.samples[i];
      s.t_ms -= loaded.series.samples[begin].t_ms;  // shared time axis
      trace.samples.push_back(s);
    }
    write_text(out_prefix + "_g" + std::to_string(g) + ".csv",
               render_plot_csv(trace.samples));
    traces.push_back(std::move(trace));
  }

  write_text(out_prefix + ".svg", render_svg(traces));
  std::printf("plot: %zu gesture(s) -> %s.svg\n", traces.size(), out_prefix.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"medication-gesture pipeline: synthesize, ingest, train, report"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value run configuration; flags win");

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a synthetic session store");
  std::string synth_store;
  synthgen::StoreConfig store_cfg;
  bool seed_given = false;
  synth->add_option("--store", synth_store, "store root directory");
  synth->add_option("--seed", store_cfg.master_seed, "master seed")
      ->required()
      ->each([&](const std::string&) { seed_given = true; });
  synth->add_option("--participants", store_cfg.participants, "participant count");
  synth->add_option("--sessions", store_cfg.sessions_per_style,
                    "sessions per participant per style");
  synth->add_option("--gestures", store_cfg.gestures_per_session,
                    "gestures per session");
  synth->add_option("--sigma", store_cfg.noise_sigma, "sensor noise sigma");

  // ---- prepare ----
  auto* prepare = app.add_subcommand("prepare", "vectorize a store into a cache file");
  std::string prep_store, prep_out = "dataset.bin";
  PrepareOptions prep_opts;
  std::size_t prep_window = 0;
  prepare->add_option("--store", prep_store, "store root directory");
  prepare->add_option("--out", prep_out, "cache file path");
  prepare->add_option("--window", prep_window,
                      "window timesteps (0 = fit to the longest gesture)");
  prepare->add_option("--negative-ratio", prep_opts.negative_ratio,
                      "negatives per positive");
  prepare->add_option("--seed", prep_opts.seed, "negative sampling seed");
  prepare->add_option("--variance-window", prep_opts.refine.variance_window_s,
                      "refinement moving-variance window (s)");
  prepare->add_option("--threshold-factor", prep_opts.refine.threshold_factor,
                      "refinement threshold factor");
  prepare->add_option("--search-back", prep_opts.refine.search_back_s,
                      "refinement backward search (s)");
  prepare->add_option("--search-fwd", prep_opts.refine.search_fwd_s,
                      "refinement forward search (s)");
  prepare->add_option("--guard-trim", prep_opts.refine.guard_trim_s,
                      "guard excluded around raw marks (s)");

  // ---- exp ----
  auto* exp = app.add_subcommand("exp", "run experiment 1, 2 or 3");
  int exp_which = 1;
  std::string exp_cache = "dataset.bin", exp_out = ".", exp_hidden, exp_optimizer;
  SweepSpec exp_sweep;
  TrainConfig exp_train;
  double exp_ratio = 0.8;
  std::size_t exp_jobs = 0;
  bool exp_seed_given = false;
  exp->add_option("which", exp_which, "experiment number")
      ->required()
      ->check(CLI::Range(1, 3));
  exp->add_option("--cache", exp_cache, "vectorized dataset cache");
  exp->add_option("--out", exp_out, "report output directory");
  exp->add_option("--hidden", exp_hidden, "hidden sizes: lo..hi[:step] or list");
  exp->add_option("--repeats", exp_sweep.repeats, "repeats per cell");
  exp->add_option("--epochs", exp_train.epochs, "training epochs");
  exp->add_option("--batch", exp_train.batch_size, "minibatch size");
  exp->add_option("--lr", exp_train.learning_rate, "learning rate");
  exp->add_option("--optimizer", exp_optimizer, "adam or sgd");
  exp->add_option("--seed", exp_train.seed, "master seed")
      ->required()
      ->each([&](const std::string&) { exp_seed_given = true; });
  exp->add_option("--ratio", exp_ratio, "train fraction (experiment 1)");
  exp->add_option("--jobs", exp_jobs, "worker pool size (0 = logical cores)");

  // ---- plot ----
  auto* plot = app.add_subcommand("plot", "emit gesture CSV + SVG");
  std::string plot_store, plot_participant, plot_session, plot_style = "protocol";
  std::string plot_out = "gesture";
  std::vector<std::size_t> plot_gestures;
  RefineParams plot_refine;
  plot->add_option("--store", plot_store, "store root directory");
  plot->add_option("--participant", plot_participant, "participant id")->required();
  plot->add_option("--session", plot_session, "session id")->required();
  plot->add_option("--style", plot_style, "protocol or natural")
      ->check(CLI::IsMember({"protocol", "natural"}));
  plot->add_option("--gesture", plot_gestures,
                   "gesture indices (default: all, superimposed)");
  plot->add_option("--out", plot_out, "output path prefix");

  // ---- report ----
  auto* rep = app.add_subcommand("report", "re-render summary/table from a detail csv");
  std::string rep_detail, rep_out = ".";
  rep->add_option("--detail", rep_detail, "detail csv produced by exp")->required();
  rep->add_option("--out", rep_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) {
      (void)seed_given;
      const auto store = resolve_store(synth_store);
      synthgen::gen_store(store, store_cfg);
      std::printf("synth: %zu participants, %zu sessions per style -> %s\n",
                  store_cfg.participants, store_cfg.sessions_per_style, store.c_str());
      return 0;
    }

    if (prepare->parsed()) {
      const auto store = resolve_store(prep_store);
      if (prep_window > 0) prep_opts.timesteps = prep_window;
      const auto result = prepare_store(store, prep_opts);
      save_dataset(prep_out, result.spec, result.vectors);

      for (const auto& w : result.warnings)
        std::fprintf(stderr, "warning: %s\n", w.c_str());
      std::map<std::string, std::map<std::string, std::size_t>> counts;
      for (const auto& v : result.vectors)
        ++counts[v.participant_id][std::string(to_string(v.style)) + "/" +
                                   to_string(v.label)];
      for (const auto& [pid, by_kind] : counts) {
        std::printf("%s:", pid.c_str());
        for (const auto& [kind, n] : by_kind)
          std::printf(" %s=%zu", kind.c_str(), n);
        std::printf("\n");
      }
      std::printf(
          "prepare: %zu positives, %zu negatives, %zu flagged, window=%zu -> %s\n",
          result.positives, result.negatives, result.flagged, result.spec.timesteps,
          prep_out.c_str());
      return 0;
    }

    if (exp->parsed()) {
      (void)exp_seed_given;
      if (!exp_hidden.empty()) exp_sweep.hidden_sizes = parse_hidden(exp_hidden);
      if (!exp_optimizer.empty())
        exp_train.optimizer =
            exp_optimizer == "sgd" ? Optimizer::Sgd : Optimizer::Adam;
      return cmd_exp(exp_which, exp_cache, exp_out, exp_sweep, exp_train, exp_ratio,
                     exp_jobs);
    }

    if (plot->parsed()) {
      const auto store = resolve_store(plot_store);
      return cmd_plot(store, plot_participant, plot_session, plot_style,
                      plot_gestures, plot_refine, plot_out);
    }

    if (rep->parsed()) {
      const auto report = parse_detail_csv(read_text(rep_detail));
      const std::string base = report.experiment_id;
      std::string lower;
      for (char c : base) lower += static_cast<char>(std::tolower(c));
      write_text(fs::path(rep_out) / (lower + "_summary.csv"), summary_csv(report));
      write_text(fs::path(rep_out) / (lower + "_table.txt"), table_text(report));
      std::printf("report: %zu rows -> %s\n", report.rows.size(), rep_out.c_str());
      return report.any_failed() ? 1 : 0;
    }
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
