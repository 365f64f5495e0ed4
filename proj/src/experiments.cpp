#include "medsensor/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "medsensor/errors.hpp"
#include "medsensor/metrics.hpp"
#include "medsensor/rng.hpp"

namespace medsensor {

namespace {

std::vector<std::string> sorted_participants(const std::vector<FeatureVector>& vectors) {
  std::set<std::string> ids;
  for (const auto& v : vectors) ids.insert(v.participant_id);
  return {ids.begin(), ids.end()};
}

double evaluate(const MlpModel& model, const VectorRefs& data) {
  std::vector<int> preds, labels;
  preds.reserve(data.size());
  labels.reserve(data.size());
  for (const auto* v : data) {
    preds.push_back(predict(model, v->values));
    labels.push_back(v->label == Label::Medication ? 1 : 0);
  }
  return accuracy(confusion(preds, labels));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
  return buf;
}

}  // namespace

std::pair<VectorRefs, VectorRefs> split_random(const std::vector<FeatureVector>& vectors,
                                               double ratio, std::uint64_t seed) {
  if (vectors.size() < 2) throw TooFewSamples("split_random: need at least 2 vectors");
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("split_random: ratio must be in (0,1)");

  std::vector<std::size_t> order(vectors.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  const auto n_train = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(vectors.size())));
  VectorRefs train, test;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_train ? train : test).push_back(&vectors[order[i]]);
  return {std::move(train), std::move(test)};
}

std::vector<Fold> lopo_folds(const std::vector<FeatureVector>& vectors,
                             std::optional<GestureStyle> style_filter) {
  VectorRefs pool;
  for (const auto& v : vectors)
    if (!style_filter || v.style == *style_filter) pool.push_back(&v);

  std::set<std::string> ids;
  for (const auto* v : pool) ids.insert(v->participant_id);
  if (ids.size() < 2) throw SingleParticipant();

  std::vector<Fold> folds;
  for (const auto& id : ids) {
    Fold f;
    f.held_out_participant = id;
    for (const auto* v : pool)
      (v->participant_id == id ? f.test : f.train).push_back(v);
    folds.push_back(std::move(f));
  }
  return folds;
}

std::vector<Fold> exp3_folds(const std::vector<FeatureVector>& vectors) {
  const auto ids = sorted_participants(vectors);
  if (ids.size() < 2) throw SingleParticipant();
  for (const auto& id : ids) {
    bool has_protocol = false, has_natural = false;
    for (const auto& v : vectors) {
      if (v.participant_id != id) continue;
      (v.style == GestureStyle::Protocol ? has_protocol : has_natural) = true;
    }
    if (!has_protocol) throw MissingStyle(id, "protocol");
    if (!has_natural) throw MissingStyle(id, "natural");
  }

  std::vector<Fold> folds;
  for (const auto& id : ids) {
    Fold f;
    f.held_out_participant = id;
    for (const auto& v : vectors) {
      if (v.style == GestureStyle::Protocol) {
        f.train.push_back(&v);  // protocol data of all participants, k included
      } else if (v.participant_id == id) {
        f.test.push_back(&v);
      } else {
        f.train.push_back(&v);
      }
    }
    folds.push_back(std::move(f));
  }
  return folds;
}

std::vector<SweepCell> sweep_plan(std::size_t fold_count, const SweepSpec& sweep) {
  if (sweep.hidden_sizes.empty()) throw Error("sweep: empty hidden size grid");
  std::vector<SweepCell> plan;
  plan.reserve(fold_count * sweep.hidden_sizes.size() * sweep.repeats);
  for (std::size_t f = 0; f < fold_count; ++f)
    for (std::size_t h : sweep.hidden_sizes)
      for (std::size_t r = 0; r < sweep.repeats; ++r) plan.push_back({f, h, r});
  return plan;
}

ExperimentReport run_sweep(const std::string& experiment_id,
                           const std::vector<Fold>& folds, const SweepSpec& sweep,
                           const TrainConfig& config, std::size_t jobs) {
  const auto plan = sweep_plan(folds.size(), sweep);
  ExperimentReport report;
  report.experiment_id = experiment_id;
  report.rows.resize(plan.size());

  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, plan.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.size()) return;
      const auto& cell = plan[i];
      const auto& fold = folds[cell.fold_index];

      FoldResult row;
      row.fold_index = cell.fold_index;
      row.held_out_participant = fold.held_out_participant;
      row.hidden_size = cell.hidden_size;
      row.repeat = cell.repeat;
      row.train_size = fold.train.size();
      row.test_size = fold.test.size();
      try {
        TrainConfig cell_cfg = config;
        cell_cfg.seed =
            derive_seed(config.seed, cell.fold_index, cell.hidden_size, cell.repeat);
        MlpArchitecture arch;
        arch.input_size = fold.train.front()->values.size();
        arch.hidden_size = cell.hidden_size;
        auto trained = train(init(arch, cell_cfg.seed), fold.train, cell_cfg);
        if (trained.aborted) throw Error("training aborted on non-finite loss");
        row.train_accuracy = evaluate(trained.model, fold.train);
        row.test_accuracy = evaluate(trained.model, fold.test);
      } catch (const std::exception&) {
        row.failed = true;
      }
      report.rows[i] = std::move(row);
    }
  };

  std::vector<std::thread> pool;
  for (std::size_t j = 0; j + 1 < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return report;
}

ExperimentReport run_exp1(const std::vector<FeatureVector>& dataset,
                          const SweepSpec& sweep, const TrainConfig& config,
                          double ratio, std::size_t jobs) {
  for (const auto& v : dataset)
    if (v.style != GestureStyle::Protocol)
      throw Error("exp1 expects a protocol-only dataset");

  // one random split per repeat; each split is a fold of the sweep
  std::vector<Fold> folds;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, sweep.repeats); ++r) {
    auto [train, test] = split_random(dataset, ratio, derive_seed(config.seed, r, 101));
    Fold f;
    f.train = std::move(train);
    f.test = std::move(test);
    folds.push_back(std::move(f));
  }
  SweepSpec per_split = sweep;
  per_split.repeats = 1;
  return run_sweep("EXP1", folds, per_split, config, jobs);
}

ExperimentReport run_exp2(const std::vector<FeatureVector>& dataset,
                          const SweepSpec& sweep, const TrainConfig& config,
                          std::size_t jobs) {
  const auto folds = lopo_folds(dataset, GestureStyle::Protocol);
  return run_sweep("EXP2", folds, sweep, config, jobs);
}

ExperimentReport run_exp3(const std::vector<FeatureVector>& dataset,
                          const SweepSpec& sweep, const TrainConfig& config,
                          std::size_t jobs) {
  const auto folds = exp3_folds(dataset);
  return run_sweep("EXP3", folds, sweep, config, jobs);
}

std::string detail_csv(const ExperimentReport& report) {
  std::string out =
      "experiment,fold,held_out_participant,hidden_size,repeat,"
      "train_accuracy,test_accuracy,train_size,test_size,failed\n";
  for (const auto& r : report.rows) {
    out += report.experiment_id + ',' + std::to_string(r.fold_index) + ',' +
           r.held_out_participant + ',' + std::to_string(r.hidden_size) + ',' +
           std::to_string(r.repeat) + ',' + fmt(r.train_accuracy) + ',' +
           fmt(r.test_accuracy) + ',' + std::to_string(r.train_size) + ',' +
           std::to_string(r.test_size) + ',' + (r.failed ? "1" : "0") + '\n';
  }
  return out;
}

namespace {

struct ArchAverage {
  std::size_t hidden;
  double train, test;
};

std::vector<ArchAverage> per_architecture_averages(const ExperimentReport& report) {
  std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_h;
  for (const auto& r : report.rows) {
    if (r.failed) continue;
    by_h[r.hidden_size].first.push_back(r.train_accuracy);
    by_h[r.hidden_size].second.push_back(r.test_accuracy);
  }
  std::vector<ArchAverage> out;
  for (const auto& [h, accs] : by_h) {
    const auto mean = [](const std::vector<double>& v) {
      return v.empty() ? 0.0
                       : std::accumulate(v.begin(), v.end(), 0.0) /
                             static_cast<double>(v.size());
    };
    out.push_back({h, mean(accs.first), mean(accs.second)});
  }
  return out;
}

struct ParticipantExtremes {
  std::string id;
  double highest_train, lowest_train, highest_test, lowest_test;
  std::size_t h_highest_train, h_lowest_train, h_highest_test, h_lowest_test;
  double avg_train, avg_test;
  std::size_t train_size, test_size;
};

std::vector<ParticipantExtremes> per_participant_extremes(
    const ExperimentReport& report) {
  std::map<std::string, std::vector<const FoldResult*>> by_p;
  for (const auto& r : report.rows)
    if (!r.failed) by_p[r.held_out_participant].push_back(&r);

  std::vector<ParticipantExtremes> out;
  for (const auto& [id, rows] : by_p) {
    ParticipantExtremes e{};
    e.id = id;
    e.highest_train = e.highest_test = -1.0;
    e.lowest_train = e.lowest_test = 2.0;
    double st = 0.0, se = 0.0;
    for (const auto* r : rows) {
      if (r->train_accuracy > e.highest_train) {
        e.highest_train = r->train_accuracy;
        e.h_highest_train = r->hidden_size;
      }
      if (r->train_accuracy < e.lowest_train) {
        e.lowest_train = r->train_accuracy;
        e.h_lowest_train = r->hidden_size;
      }
      if (r->test_accuracy > e.highest_test) {
        e.highest_test = r->test_accuracy;
        e.h_highest_test = r->hidden_size;
      }
      if (r->test_accuracy < e.lowest_test) {
        e.lowest_test = r->test_accuracy;
        e.h_lowest_test = r->hidden_size;
      }
      st += r->train_accuracy;
      se += r->test_accuracy;
      e.train_size = r->train_size;
      e.test_size = r->test_size;
    }
    e.avg_train = st / static_cast<double>(rows.size());
    e.avg_test = se / static_cast<double>(rows.size());
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

std::string summary_csv(const ExperimentReport& report) {
  std::string out;
  if (report.experiment_id == "EXP1") {
    out = "hidden_size,avg_train_accuracy,avg_test_accuracy,min_test_accuracy,"
          "max_test_accuracy\n";
    const auto arch = per_architecture_averages(report);
    for (const auto& a : arch) {
      double lo = 2.0, hi = -1.0;
      for (const auto& r : report.rows) {
        if (r.failed || r.hidden_size != a.hidden) continue;
        lo = std::min(lo, r.test_accuracy);
        hi = std::max(hi, r.test_accuracy);
      }
      out += std::to_string(a.hidden) + ',' + fmt(a.train) + ',' + fmt(a.test) + ',' +
             fmt(lo) + ',' + fmt(hi) + '\n';
    }
    double max_tr = -1, min_tr = 2, max_te = -1, min_te = 2, sum_tr = 0, sum_te = 0;
    for (const auto& a : arch) {
      max_tr = std::max(max_tr, a.train);
      min_tr = std::min(min_tr, a.train);
      max_te = std::max(max_te, a.test);
      min_te = std::min(min_te, a.test);
      sum_tr += a.train;
      sum_te += a.test;
    }
    const auto n = static_cast<double>(arch.size());
    out += "max," + fmt(max_tr) + ',' + fmt(max_te) + ",,\n";
    out += "min," + fmt(min_tr) + ',' + fmt(min_te) + ",,\n";
    out += "average," + fmt(sum_tr / n) + ',' + fmt(sum_te / n) + ",,\n";
    return out;
  }

  // EXP2 / EXP3: participant extremes plus per-architecture averages
  out = "section,participant,highest_train,lowest_train,hidden_highest_train,"
        "hidden_lowest_train,highest_test,lowest_test,hidden_highest_test,"
        "hidden_lowest_test,avg_train,avg_test,train_size,test_size\n";
  const auto parts = per_participant_extremes(report);
  double avg_ht = 0, avg_lt = 0, avg_he = 0, avg_le = 0, avg_at = 0, avg_ae = 0;
  for (const auto& e : parts) {
    out += "participant," + e.id + ',' + fmt(e.highest_train) + ',' +
           fmt(e.lowest_train) + ',' + std::to_string(e.h_highest_train) + ',' +
           std::to_string(e.h_lowest_train) + ',' + fmt(e.highest_test) + ',' +
           fmt(e.lowest_test) + ',' + std::to_string(e.h_highest_test) + ',' +
           std::to_string(e.h_lowest_test) + ',' + fmt(e.avg_train) + ',' +
           fmt(e.avg_test) + ',' + std::to_string(e.train_size) + ',' +
           std::to_string(e.test_size) + '\n';
    avg_ht += e.highest_train;
    avg_lt += e.lowest_train;
    avg_he += e.highest_test;
    avg_le += e.lowest_test;
    avg_at += e.avg_train;
    avg_ae += e.avg_test;
  }
  const auto np = static_cast<double>(parts.size());
  out += "participant_avg,AVG," + fmt(avg_ht / np) + ',' + fmt(avg_lt / np) + ",,," +
         fmt(avg_he / np) + ',' + fmt(avg_le / np) + ",,," + fmt(avg_at / np) + ',' +
         fmt(avg_ae / np) + ",,\n";
  for (const auto& a : per_architecture_averages(report)) {
    out += "architecture," + std::to_string(a.hidden) + ",,,,,,,,," + fmt(a.train) +
           ',' + fmt(a.test) + ",,\n";
  }
  return out;
}

namespace {

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string table_text(const ExperimentReport& report) {
  std::string out;
  if (report.experiment_id == "EXP1") {
    out += "Hidden Neurons  Accuracy Training  Accuracy Testing\n";
    const auto arch = per_architecture_averages(report);
    double max_tr = -1, min_tr = 2, max_te = -1, min_te = 2, sum_tr = 0, sum_te = 0;
    for (auto it = arch.rbegin(); it != arch.rend(); ++it) {
      out += pad(std::to_string(it->hidden), 16) + pad(pct(it->train), 19) +
             pct(it->test) + '\n';
      max_tr = std::max(max_tr, it->train);
      min_tr = std::min(min_tr, it->train);
      max_te = std::max(max_te, it->test);
      min_te = std::min(min_te, it->test);
      sum_tr += it->train;
      sum_te += it->test;
    }
    const auto n = static_cast<double>(arch.size());
    out += pad("Max", 16) + pad(pct(max_tr), 19) + pct(max_te) + '\n';
    out += pad("Min", 16) + pad(pct(min_tr), 19) + pct(min_te) + '\n';
    out += pad("Average", 16) + pad(pct(sum_tr / n), 19) + pct(sum_te / n) + '\n';
    return out;
  }

  const auto parts = per_participant_extremes(report);
  const bool exp3 = report.experiment_id == "EXP3";
  if (exp3) {
    out += "Participant  Highest Train  Highest Test  Lowest Train  Lowest Test  "
           "Avg Train  Avg Test  Train Size  Test Size\n";
  } else {
    out += "Participant  Highest Train  Lowest Train  H(high)  H(low)  "
           "Highest Test  Lowest Test  H(high)  H(low)\n";
  }
  double avg[6] = {0, 0, 0, 0, 0, 0};
  for (const auto& e : parts) {
    if (exp3) {
      out += pad(e.id, 13) + pad(pct(e.highest_train), 15) + pad(pct(e.highest_test), 14) +
             pad(pct(e.lowest_train), 14) + pad(pct(e.lowest_test), 13) +
             pad(pct(e.avg_train), 11) + pad(pct(e.avg_test), 10) +
             pad(std::to_string(e.train_size), 12) + std::to_string(e.test_size) + '\n';
    } else {
      out += pad(e.id, 13) + pad(pct(e.highest_train), 15) + pad(pct(e.lowest_train), 14) +
             pad(std::to_string(e.h_highest_train), 9) +
             pad(std::to_string(e.h_lowest_train), 8) + pad(pct(e.highest_test), 14) +
             pad(pct(e.lowest_test), 13) + pad(std::to_string(e.h_highest_test), 9) +
             std::to_string(e.h_lowest_test) + '\n';
    }
    avg[0] += e.highest_train;
    avg[1] += e.lowest_train;
    avg[2] += e.highest_test;
    avg[3] += e.lowest_test;
    avg[4] += e.avg_train;
    avg[5] += e.avg_test;
  }
  const auto np = static_cast<double>(parts.size());
  if (exp3) {
    out += pad("AVG", 13) + pad(pct(avg[0] / np), 15) + pad(pct(avg[2] / np), 14) +
           pad(pct(avg[1] / np), 14) + pad(pct(avg[3] / np), 13) +
           pad(pct(avg[4] / np), 11) + pct(avg[5] / np) + '\n';
  } else {
    out += pad("AVG", 13) + pad(pct(avg[0] / np), 15) + pad(pct(avg[1] / np), 14) +
           pad("", 9) + pad("", 8) + pad(pct(avg[2] / np), 14) + pct(avg[3] / np) + '\n';
    out += "\nPer-architecture averages\nHidden Neurons  Avg Train  Avg Test\n";
    for (const auto& a : per_architecture_averages(report))
      out += pad(std::to_string(a.hidden), 16) + pad(pct(a.train), 11) + pct(a.test) + '\n';
  }
  return out;
}

}  // namespace medsensor
