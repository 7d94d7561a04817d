#include "bsel/commands.hpp"
#include "bsel/config.hpp"
#include "bsel/persistence.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace bsel;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fresh directory under the system temp dir, removed on scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("bsel-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path write_config(const fs::path& dir, const json& doc, const std::string& name = "cfg.json") {
  const fs::path p = dir / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

json small_config(const std::string& mission, const fs::path& out) {
  return {{"mission", mission},
          {"output_dir", out.string()},
          {"seed", 5},
          {"run", {{"t_f", 10.0}, {"dwell_max", 5.0}, {"episodes", 2}, {"eval_episodes", 4}}}};
}

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF records.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(field);
      field.clear();
    } else if (c == '\r') {
      REQUIRE(i + 1 < text.size());
      REQUIRE(text[i + 1] == '\n');
      row.push_back(field);
      rows.push_back(row);
      row.clear();
      field.clear();
      ++i;
    } else {
      REQUIRE(c != '\n');  // bare LF is not a record separator
      field += c;
    }
  }
  REQUIRE(field.empty());
  REQUIRE(row.empty());
  return rows;
}

std::vector<double> column(const std::vector<std::vector<std::string>>& rows, std::size_t c) {
  std::vector<double> out;
  for (std::size_t r = 1; r < rows.size(); ++r) out.push_back(std::stod(rows[r][c]));
  return out;
}

int run_train(const fs::path& cfg, std::string* err_text = nullptr) {
  CommandOptions o;
  o.config = cfg;
  std::ostringstream out, err;
  const int rc = cmd_train(o, out, err);
  if (err_text) *err_text = err.str();
  return rc;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig d = config_from_json(json::object());
  CHECK(d.mission == MissionKind::Convoy);
  CHECK_NOTHROW(d.validate());

  ExperimentConfig box = config_from_json(json{{"mission", "box"}, {"box", {{"coupling", "displacement"}}}});
  CHECK(box.box.coupling == BoxCoupling::Displacement);
  const ExperimentConfig again = config_from_json(to_json(box));
  CHECK(to_json(again) == to_json(box));

  auto message = [](const json& doc) -> std::string {
    try {
      config_from_json(doc).validate();
    } catch (const std::invalid_argument& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message({{"run", {{"dt", 0.5}, {"dwell_max", 0.5}}}}).find("dt") != std::string::npos);
  CHECK(message({{"run", {{"bogus", 1}}}}).find("run.bogus") != std::string::npos);
  CHECK(message({{"learning", {{"alpha", "fast"}}}}).find("learning.alpha") != std::string::npos);
  CHECK(message({{"mission", "escort"}}).find("mission") != std::string::npos);
  CHECK(message({{"box", {{"coupling", "glue"}}}}).find("box.coupling") != std::string::npos);
  CHECK(message({{"convoy", {{"sigma", -1}}}}).find("sigma") != std::string::npos);
}

TEST_CASE("train writes one reward row per episode and a loadable table") {
  TempDir tmp;
  json doc = small_config("convoy", tmp.path / "run");
  doc["run"]["episodes"] = 1;
  REQUIRE(run_train(write_config(tmp.path, doc)) == 0);
  const auto rows = parse_csv(read_file(tmp.path / "run" / files::kTrainRewards));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"episode", "total_reward"});
  const StoredQTable t = load_qtable(tmp.path / "run" / files::kQTable);
  CHECK(t.q.states() == 10);
  CHECK(t.q.actions() == 5);
  CHECK(fs::exists(tmp.path / "run" / files::kTrainManifest));
  CHECK(fs::exists(tmp.path / "run" / files::kConfig));
  const json manifest = json::parse(read_file(tmp.path / "run" / files::kTrainManifest));
  CHECK(manifest["episode_rewards"].size() == 1);
  CHECK(manifest["episode_rewards"][0].get<double>() == std::stod(rows[1][1]));
}

TEST_CASE("train is byte-for-byte reproducible") {
  TempDir tmp;
  const fs::path a = write_config(tmp.path, small_config("box", tmp.path / "a"), "a.json");
  const fs::path b = write_config(tmp.path, small_config("box", tmp.path / "b"), "b.json");
  REQUIRE(run_train(a) == 0);
  REQUIRE(run_train(b) == 0);
  CHECK(read_file(tmp.path / "a" / files::kTrainRewards) == read_file(tmp.path / "b" / files::kTrainRewards));
  CHECK(read_file(tmp.path / "a" / files::kQTable) == read_file(tmp.path / "b" / files::kQTable));
}

TEST_CASE("invalid configs fail before anything is written") {
  TempDir tmp;
  json doc = small_config("convoy", tmp.path / "run");
  doc["run"]["dt"] = 5.0;
  std::string err;
  CHECK(run_train(write_config(tmp.path, doc), &err) != 0);
  CHECK(err.find("dt") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp.path / "run"));
}

TEST_CASE("eval modes, summaries and mismatch handling") {
  TempDir tmp;
  json doc = small_config("convoy", tmp.path / "run");
  doc["run"]["eval_episodes"] = 50;
  const fs::path cfg = write_config(tmp.path, doc);

  CommandOptions o;
  o.config = cfg;
  o.mode = "random";
  std::ostringstream out, err;
  REQUIRE(cmd_eval(o, out, err) == 0);
  const auto rows = parse_csv(read_file(tmp.path / "run" / files::eval_rewards("random")));
  CHECK(rows.size() == 51);
  const std::vector<double> totals = column(rows, 1);
  double mean = 0;
  for (double v : totals) mean += v;
  mean /= double(totals.size());
  const json summary = json::parse(read_file(tmp.path / "run" / files::eval_summary("random")));
  CHECK(std::abs(summary["mean"].get<double>() - mean) <= 1e-12);

  // a table built for the box discretization cannot drive a convoy run
  const Mission box = make_mission(MissionKind::Box);
  const QTable wrong(box.states(), box.behaviors());
  save_qtable(tmp.path / "box_table.json", wrong, header_for(box));
  o.mode = "trained";
  o.qtable = tmp.path / "box_table.json";
  o.out = (tmp.path / "mismatch").string();
  std::ostringstream err2;
  CHECK(cmd_eval(o, out, err2) != 0);
  CHECK_FALSE(err2.str().empty());
  CHECK_FALSE(fs::exists(tmp.path / "mismatch"));

  // same dimensions, different discretization id
  Mission other = make_mission(MissionKind::Convoy);
  std::get<ConvoyEnv>(other.environment).bin_width = 0.25;
  save_qtable(tmp.path / "other.json", QTable(10, 5), header_for(other));
  o.qtable = tmp.path / "other.json";
  std::ostringstream err3;
  CHECK(cmd_eval(o, out, err3) != 0);
  CHECK(err3.str().find("discretization") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp.path / "mismatch"));

  json box_doc = small_config("box", tmp.path / "boxrun");
  CommandOptions adhoc;
  adhoc.config = write_config(tmp.path, box_doc, "box.json");
  adhoc.mode = "adhoc";
  std::ostringstream err4;
  CHECK(cmd_eval(adhoc, out, err4) != 0);
  CHECK(err4.str().find("adhoc") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp.path / "boxrun"));
}

TEST_CASE("compare emits paired columns") {
  TempDir tmp;
  for (const std::string mission : {"convoy", "box"}) {
    const fs::path run = tmp.path / mission;
    const fs::path cfg = write_config(tmp.path, small_config(mission, run), mission + ".json");
    REQUIRE(run_train(cfg) == 0);
    CommandOptions o;
    o.config = cfg;
    o.qtable = run / files::kQTable;
    std::ostringstream out, err;
    REQUIRE(cmd_compare(o, out, err) == 0);
    const auto rows = parse_csv(read_file(run / files::kCompare));
    const std::size_t cols = mission == "convoy" ? 4 : 3;
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) CHECK(r.size() == cols);
    CHECK(rows[0][1] == "trained");
    CHECK(rows[0][2] == "random");

    // the random column matches a standalone random evaluation episode for episode
    o.mode = "random";
    o.out = (tmp.path / (mission + "-random")).string();
    REQUIRE(cmd_eval(o, out, err) == 0);
    const auto solo = parse_csv(read_file(tmp.path / (mission + "-random") / files::eval_rewards("random")));
    CHECK(column(solo, 1) == column(rows, 2));
  }
}

TEST_CASE("Q-table persistence") {
  Rng rng(10);
  const QTable q = QTable::uniform(10, 5, 3.0, rng);
  QTableHeader h;
  h.behaviors = {"a", "b", "c", "d", "e"};
  h.discretization = "test/grid";
  TempDir tmp;
  save_qtable(tmp.path / "q.json", q, h);
  const StoredQTable back = load_qtable(tmp.path / "q.json");
  CHECK(back.q == q);
  CHECK(back.header == h);

  const std::string text = read_file(tmp.path / "q.json");
  CHECK_THROWS(qtable_from_string(text.substr(0, text.size() / 2)));

  json doc = json::parse(text);
  doc["behaviors"] = 4;
  CHECK_THROWS_WITH_AS(qtable_from_string(doc.dump()), doctest::Contains("mismatch"), std::invalid_argument);

  doc = json::parse(text);
  doc["values"].erase(doc["values"].begin());
  CHECK_THROWS(qtable_from_string(doc.dump()));

  CHECK_THROWS(load_qtable(tmp.path / "missing.json"));
}

TEST_CASE("number formatting and CSV layout") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456789.125, -0.0})
    CHECK(std::stod(format_double(v)) == v);
  const std::string csv = csv_table({"episode", "x"}, {{0, 0.5}, {1, -2}});
  CHECK(csv == "episode,x\r\n0,0.5\r\n1,-2\r\n");
  CHECK_THROWS(csv_table({"a", "b"}, {{1}}));
  const Summary s = summarize({1, 2, 3, 4});
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(summarize({7}).std == 0.0);
}

TEST_CASE("uncommitted output stages leave nothing behind") {
  TempDir tmp;
  {
    OutputStage stage(tmp.path / "out");
    stage.add("a.txt", "x");
  }
  CHECK_FALSE(fs::exists(tmp.path / "out" / "a.txt"));
  {
    OutputStage stage(tmp.path / "out");
    stage.add("a.txt", "x");
    stage.commit();
  }
  CHECK(read_file(tmp.path / "out" / "a.txt") == "x");
}
