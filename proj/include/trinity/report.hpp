#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

// Report emission for the benchmark harness: CSV tables (one row per record)
// and an indentation-structured summary document. Every float that enters a
// report is formatted to six significant digits at insertion time, so files
// produced from the same inputs are byte-identical.
namespace trinity::report {

// %.6g rendering used for all floating-point report values.
std::string format_g6(double v);

struct CsvTable {
  std::vector<std::string> comments;  // emitted first, one "# ..." line each
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each sized like header

  // RFC-style quoting (only when a cell needs it), LF line endings. An empty
  // table renders as comments plus the header line alone.
  std::string to_text() const;
};

// Ordered tree: scalar fields, named children, and anonymous list items. A
// node acts as a map (fields/children) or as a list (items), not both.
struct SummaryNode {
  std::vector<std::pair<std::string, std::string>> fields;
  std::vector<std::pair<std::string, SummaryNode>> children;
  std::vector<SummaryNode> items;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value);
  void set(const std::string& key, uint64_t value);
  void set(const std::string& key, int value);
  void set_f(const std::string& key, double value);  // 6 significant digits
  void set_hex(const std::string& key, uint64_t value);

  SummaryNode& child(const std::string& key);
  SummaryNode& item();

  bool operator==(const SummaryNode& other) const;
};

// Text form:
//   key: value
//   section:
//     nested: value
//   rows:
//     -
//       col: value
// Two-space indentation; a line ending in ':' opens a child, a bare '-'
// opens a list item. parse_summary inverts emit_summary exactly.
std::string emit_summary(const SummaryNode& root);
SummaryNode parse_summary(const std::string& text);  // InvalidArgument if malformed

// Writes text to path, raising IoError when the file cannot be created.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace trinity::report
