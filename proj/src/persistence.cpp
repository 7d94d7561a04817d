#include "bsel/persistence.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace bsel {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kFormat = "bsel-qtable";
constexpr int kVersion = 1;

[[noreturn]] void malformed(const std::string& why) {
  throw std::runtime_error("malformed Q-table file: " + why);
}

}  // namespace

QTableHeader header_for(const Mission& mission) {
  QTableHeader h;
  for (const auto& spec : mission.library) h.behaviors.emplace_back(to_string(spec.id));
  h.discretization = discretization_id(mission.environment);
  return h;
}

std::string qtable_to_string(const QTable& q, const QTableHeader& header) {
  if (static_cast<int>(header.behaviors.size()) != q.actions())
    throw std::invalid_argument("Q-table header lists a different number of behaviors than the table");
  json values = json::array();
  for (int s = 0; s < q.states(); ++s)
    for (int m = 0; m < q.actions(); ++m) values.push_back(q.values()(s, m));
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["states"] = q.states();
  doc["behaviors"] = q.actions();
  doc["behavior_ids"] = header.behaviors;
  doc["discretization"] = header.discretization;
  doc["values"] = std::move(values);
  return doc.dump(2) + "\n";
}

StoredQTable qtable_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  if (!doc.is_object()) malformed("top level is not an object");
  if (doc.value("format", std::string()) != kFormat) malformed("missing or wrong \"format\"");
  if (!doc.contains("version") || doc["version"] != kVersion) malformed("unsupported version");
  for (const char* key : {"states", "behaviors"})
    if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<long long>() < 1)
      malformed(std::string("\"") + key + "\" must be a positive integer");
  if (!doc.contains("behavior_ids") || !doc["behavior_ids"].is_array()) malformed("missing behavior_ids");
  if (!doc.contains("discretization") || !doc["discretization"].is_string())
    malformed("missing discretization");
  if (!doc.contains("values") || !doc["values"].is_array()) malformed("missing values");

  const int states = doc["states"].get<int>();
  const int behaviors = doc["behaviors"].get<int>();
  StoredQTable out;
  for (const auto& id : doc["behavior_ids"]) {
    if (!id.is_string()) malformed("behavior_ids must be strings");
    out.header.behaviors.push_back(id.get<std::string>());
  }
  if (static_cast<int>(out.header.behaviors.size()) != behaviors)
    throw std::invalid_argument("Q-table header mismatch: behaviors = " + std::to_string(behaviors) +
                                " but " + std::to_string(out.header.behaviors.size()) +
                                " behavior ids are listed");
  const auto& values = doc["values"];
  if (values.size() != static_cast<std::size_t>(states) * static_cast<std::size_t>(behaviors))
    throw std::invalid_argument("Q-table dimension mismatch: header says " + std::to_string(states) +
                                "x" + std::to_string(behaviors) + " but " +
                                std::to_string(values.size()) + " values are stored");
  out.header.discretization = doc["discretization"].get<std::string>();
  out.q = QTable(states, behaviors);
  std::size_t k = 0;
  for (int s = 0; s < states; ++s) {
    for (int m = 0; m < behaviors; ++m, ++k) {
      if (!values[k].is_number()) malformed("non-numeric value at index " + std::to_string(k));
      const double v = values[k].get<double>();
      if (!std::isfinite(v)) malformed("non-finite value at index " + std::to_string(k));
      out.q.values()(s, m) = v;
    }
  }
  return out;
}

void save_qtable(const fs::path& path, const QTable& q, const QTableHeader& header) {
  write_file_atomic(path, qtable_to_string(q, header));
}

StoredQTable load_qtable(const fs::path& path) { return qtable_from_string(read_file(path)); }

void check_compatible(const StoredQTable& stored, const Mission& mission) {
  const QTableHeader expected = header_for(mission);
  if (stored.q.states() != mission.states())
    throw std::invalid_argument("Q-table has " + std::to_string(stored.q.states()) +
                                " states, the configured mission has " + std::to_string(mission.states()));
  if (stored.q.actions() != mission.behaviors() || stored.header.behaviors != expected.behaviors)
    throw std::invalid_argument("Q-table behavior library does not match the configured library");
  if (stored.header.discretization != expected.discretization)
    throw std::invalid_argument("Q-table discretization '" + stored.header.discretization +
                                "' does not match the configured '" + expected.discretization + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += "\r\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::invalid_argument("csv_table: ragged row");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += "\r\n";
  }
  return out;
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OutputStage::OutputStage(fs::path target) : target_(std::move(target)) {
  fs::path abs = fs::absolute(target_);
  const fs::path parent = abs.parent_path();
  fs::create_directories(parent);
  staging_ = parent / ("." + abs.filename().string() + ".staging-" + std::to_string(::getpid()));
  fs::remove_all(staging_);
  fs::create_directories(staging_);
}

OutputStage::~OutputStage() {
  std::error_code ec;
  if (!committed_) fs::remove_all(staging_, ec);
}

void OutputStage::add(const std::string& name, const std::string& contents) {
  std::ofstream out(staging_ / name, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + (staging_ / name).string());
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + (staging_ / name).string());
  names_.push_back(name);
}

void OutputStage::commit() {
  if (!fs::exists(target_)) {
    fs::rename(staging_, target_);
  } else {
    for (const auto& name : names_) fs::rename(staging_ / name, target_ / name);
    fs::remove_all(staging_);
  }
  committed_ = true;
}

}  // namespace bsel
