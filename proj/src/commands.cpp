#include "bsel/commands.hpp"

#include "bsel/persistence.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace bsel {

using nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

ExperimentConfig resolve_config(const CommandOptions& opts) {
  ExperimentConfig cfg = load_config(opts.config);
  if (opts.seed) cfg.run.seed = *opts.seed;
  if (opts.out) cfg.output_dir = *opts.out;
  cfg.validate();
  return cfg;
}

json manifest(std::string_view command, const ExperimentConfig& cfg, const std::string& started,
              const std::vector<double>& rewards) {
  json m;
  m["command"] = std::string(command);
  m["version"] = std::string(kVersion);
  m["seed"] = cfg.run.seed;
  m["config"] = to_json(cfg);
  m["started_at"] = started;
  m["finished_at"] = utc_now();
  m["episode_rewards"] = rewards;
  return m;
}

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}, {"n", s.n}}; }

std::vector<double> totals(const std::vector<EpisodeLog>& logs) {
  std::vector<double> out;
  out.reserve(logs.size());
  for (const auto& log : logs) out.push_back(log.total_reward);
  return out;
}

QTable trained_table(const CommandOptions& opts, const Mission& mission) {
  if (!opts.qtable) throw std::invalid_argument("--qtable is required for the trained policy");
  StoredQTable stored = load_qtable(*opts.qtable);
  check_compatible(stored, mission);
  return stored.q;
}

template <typename Body>
int guarded(std::string_view command, std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "bsel " << command << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

namespace files {
std::string eval_rewards(std::string_view mode) { return "eval_" + std::string(mode) + ".csv"; }
std::string eval_summary(std::string_view mode) { return "eval_" + std::string(mode) + "_summary.json"; }
std::string eval_manifest(std::string_view mode) { return "eval_" + std::string(mode) + "_manifest.json"; }
}  // namespace files

int cmd_train(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded("train", err, [&] {
    const std::string started = utc_now();
    const ExperimentConfig cfg = resolve_config(opts);
    const Mission mission = cfg.to_mission();
    const TrainResult result = train(mission);

    std::vector<std::vector<double>> rows;
    rows.reserve(result.episode_rewards.size());
    for (std::size_t ep = 0; ep < result.episode_rewards.size(); ++ep)
      rows.push_back({static_cast<double>(ep), result.episode_rewards[ep]});

    OutputStage stage(cfg.output_dir);
    stage.add(files::kConfig, to_json(cfg).dump(2) + "\n");
    stage.add(files::kQTable, qtable_to_string(result.q, header_for(mission)));
    stage.add(files::kTrainRewards, csv_table({"episode", "total_reward"}, rows));
    stage.add(files::kTrainManifest,
              manifest("train", cfg, started, result.episode_rewards).dump(2) + "\n");
    stage.commit();

    const Summary s = summarize(result.episode_rewards);
    out << "trained " << s.n << " episodes on " << to_string(cfg.mission) << "; mean reward "
        << format_double(s.mean) << "; output in " << cfg.output_dir << "\n";
    return 0;
  });
}

int cmd_eval(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded("eval", err, [&] {
    const std::string started = utc_now();
    const EvalMode mode = eval_mode_from_string(opts.mode);
    const ExperimentConfig cfg = resolve_config(opts);
    const Mission mission = cfg.to_mission();
    if (mode == EvalMode::Adhoc && cfg.mission != MissionKind::Convoy)
      throw std::invalid_argument("adhoc mode is only supported for the convoy mission");
    std::optional<QTable> q;
    if (mode == EvalMode::Trained) q = trained_table(opts, mission);

    const std::vector<double> rewards = totals(evaluate(mission, mode, q ? &*q : nullptr));
    std::vector<std::vector<double>> rows;
    for (std::size_t ep = 0; ep < rewards.size(); ++ep) rows.push_back({static_cast<double>(ep), rewards[ep]});
    const Summary s = summarize(rewards);
    const std::string name(to_string(mode));

    OutputStage stage(cfg.output_dir);
    stage.add(files::kConfig, to_json(cfg).dump(2) + "\n");
    stage.add(files::eval_rewards(name), csv_table({"episode", "total_reward"}, rows));
    stage.add(files::eval_summary(name), summary_json(s).dump(2) + "\n");
    stage.add(files::eval_manifest(name), manifest("eval " + name, cfg, started, rewards).dump(2) + "\n");
    stage.commit();

    out << name << ": " << s.n << " episodes, mean " << format_double(s.mean) << ", std "
        << format_double(s.std) << "\n";
    return 0;
  });
}

int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded("compare", err, [&] {
    const std::string started = utc_now();
    const ExperimentConfig cfg = resolve_config(opts);
    const Mission mission = cfg.to_mission();
    const QTable q = trained_table(opts, mission);

    std::vector<EvalMode> modes = {EvalMode::Trained, EvalMode::Random};
    if (cfg.mission == MissionKind::Convoy) modes.push_back(EvalMode::Adhoc);

    std::vector<std::string> header = {"episode"};
    std::vector<std::vector<double>> columns;
    json summary;
    for (EvalMode mode : modes) {
      header.emplace_back(to_string(mode));
      columns.push_back(totals(evaluate(mission, mode, &q)));
      summary[std::string(to_string(mode))] = summary_json(summarize(columns.back()));
    }
    std::vector<std::vector<double>> rows;
    for (int ep = 0; ep < cfg.run.eval_episodes; ++ep) {
      std::vector<double> row = {static_cast<double>(ep)};
      for (const auto& col : columns) row.push_back(col[static_cast<std::size_t>(ep)]);
      rows.push_back(std::move(row));
    }

    OutputStage stage(cfg.output_dir);
    stage.add(files::kConfig, to_json(cfg).dump(2) + "\n");
    stage.add(files::kCompare, csv_table(header, rows));
    stage.add(files::kCompareSummary, summary.dump(2) + "\n");
    stage.add(files::kCompareManifest, manifest("compare", cfg, started, columns.front()).dump(2) + "\n");
    stage.commit();

    for (std::size_t k = 0; k < modes.size(); ++k) {
      const Summary s = summarize(columns[k]);
      out << std::left << std::setw(8) << to_string(modes[k]) << " mean " << format_double(s.mean)
          << "  std " << format_double(s.std) << "\n";
    }
    return 0;
  });
}

}  // namespace bsel
