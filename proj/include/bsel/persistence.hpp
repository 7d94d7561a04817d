#ifndef BSEL_PERSISTENCE_HPP
#define BSEL_PERSISTENCE_HPP

#include "bsel/learning.hpp"
#include "bsel/mission.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bsel {

/// Metadata stored next to the table values so a table is never reused with
/// a different library or discretization.
struct QTableHeader {
  std::vector<std::string> behaviors;
  std::string discretization;

  bool operator==(const QTableHeader&) const = default;
};

struct StoredQTable {
  QTable q;
  QTableHeader header;
};

QTableHeader header_for(const Mission& mission);

/// Serialized form:
///   {"format": "bsel-qtable", "version": 1, "states": S, "behaviors": M,
///    "behavior_ids": [...M names], "discretization": "...",
///    "values": [...S*M numbers, row-major]}
std::string qtable_to_string(const QTable& q, const QTableHeader& header);
StoredQTable qtable_from_string(const std::string& text);

void save_qtable(const std::filesystem::path& path, const QTable& q, const QTableHeader& header);
StoredQTable load_qtable(const std::filesystem::path& path);

/// Throws std::invalid_argument when the stored table was built for another
/// state space, library, or discretization.
void check_compatible(const StoredQTable& stored, const Mission& mission);

/// Shortest decimal that round-trips the double exactly.
std::string format_double(double v);

/// RFC 4180 CSV: header row, CRLF line endings, numeric cells unquoted.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

/// Writes via a temporary sibling file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// Collects output files in a private staging directory and publishes them
/// into the target directory only on commit(). Destroying an uncommitted
/// stage removes everything it wrote.
class OutputStage {
 public:
  explicit OutputStage(std::filesystem::path target);
  ~OutputStage();
  OutputStage(const OutputStage&) = delete;
  OutputStage& operator=(const OutputStage&) = delete;

  void add(const std::string& name, const std::string& contents);
  /// Files are moved in insertion order; add the manifest last.
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  std::vector<std::string> names_;
  bool committed_ = false;
};

}  // namespace bsel

#endif  // BSEL_PERSISTENCE_HPP
