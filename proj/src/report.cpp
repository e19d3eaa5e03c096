#include "trinity/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "trinity/common.hpp"

namespace trinity::report {

std::string format_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace {

bool cell_needs_quoting(const std::string& cell) {
  return cell.find_first_of(",\"\n") != std::string::npos;
}

void append_cell(std::string& out, const std::string& cell) {
  if (!cell_needs_quoting(cell)) {
    out += cell;
    return;
  }
  out += '"';
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

}  // namespace

std::string CsvTable::to_text() const {
  std::string out;
  for (const auto& c : comments) {
    out += "# ";
    out += c;
    out += '\n';
  }
  auto append_row = [&out](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      append_cell(out, cells[i]);
    }
    out += '\n';
  };
  append_row(header);
  for (const auto& row : rows) {
    if (row.size() != header.size())
      raise(Errc::InvalidArgument, "csv row width does not match the header");
    append_row(row);
  }
  return out;
}

void SummaryNode::set(const std::string& key, const std::string& value) {
  fields.emplace_back(key, value);
}

void SummaryNode::set(const std::string& key, const char* value) {
  fields.emplace_back(key, std::string(value));
}

void SummaryNode::set(const std::string& key, uint64_t value) {
  fields.emplace_back(key, std::to_string(value));
}

void SummaryNode::set(const std::string& key, int value) {
  fields.emplace_back(key, std::to_string(value));
}

void SummaryNode::set_f(const std::string& key, double value) {
  fields.emplace_back(key, format_g6(value));
}

void SummaryNode::set_hex(const std::string& key, uint64_t value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(value));
  fields.emplace_back(key, std::string(buf));
}

SummaryNode& SummaryNode::child(const std::string& key) {
  children.emplace_back(key, SummaryNode{});
  return children.back().second;
}

SummaryNode& SummaryNode::item() {
  items.emplace_back();
  return items.back();
}

bool SummaryNode::operator==(const SummaryNode& other) const {
  return fields == other.fields && children == other.children && items == other.items;
}

namespace {

void emit_node(const SummaryNode& node, int indent, std::string& out) {
  const std::string pad(static_cast<size_t>(indent), ' ');
  for (const auto& [key, value] : node.fields) {
    out += pad;
    out += key;
    out += ": ";
    out += value;
    out += '\n';
  }
  for (const auto& [key, sub] : node.children) {
    out += pad;
    out += key;
    out += ":\n";
    emit_node(sub, indent + 2, out);
  }
  for (const auto& item : node.items) {
    out += pad;
    out += "-\n";
    emit_node(item, indent + 2, out);
  }
}

struct Line {
  int indent = 0;
  std::string body;
};

std::vector<Line> split_lines(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    size_t first = raw.find_first_not_of(' ');
    if (first == std::string::npos) continue;  // blank lines carry nothing
    lines.push_back({static_cast<int>(first), raw.substr(first)});
  }
  return lines;
}

// Parses the run of lines indented at exactly `indent` into node, consuming
// deeper runs recursively. `pos` advances past everything parsed.
void parse_level(const std::vector<Line>& lines, size_t& pos, int indent, SummaryNode& node) {
  while (pos < lines.size() && lines[pos].indent == indent) {
    const std::string& body = lines[pos].body;
    size_t sep = body.find(": ");
    if (body == "-") {
      ++pos;
      SummaryNode& item = node.item();
      if (pos < lines.size() && lines[pos].indent == indent + 2)
        parse_level(lines, pos, indent + 2, item);
    } else if (sep != std::string::npos) {
      node.set(body.substr(0, sep), body.substr(sep + 2));
      ++pos;
    } else if (body.back() == ':') {
      std::string key = body.substr(0, body.size() - 1);
      ++pos;
      SummaryNode& sub = node.child(key);
      if (pos < lines.size() && lines[pos].indent == indent + 2)
        parse_level(lines, pos, indent + 2, sub);
    } else {
      raise(Errc::InvalidArgument, "summary line is neither field, section, nor item: " + body);
    }
    if (pos < lines.size() && lines[pos].indent > indent)
      raise(Errc::InvalidArgument, "summary indentation jumps past its parent");
  }
}

}  // namespace

std::string emit_summary(const SummaryNode& root) {
  std::string out;
  emit_node(root, 0, out);
  return out;
}

SummaryNode parse_summary(const std::string& text) {
  std::vector<Line> lines = split_lines(text);
  SummaryNode root;
  size_t pos = 0;
  parse_level(lines, pos, 0, root);
  if (pos != lines.size()) raise(Errc::InvalidArgument, "summary has lines below top-level indent");
  return root;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot create " + path);
  out << text;
  if (!out) raise(Errc::IoError, "write failed for " + path);
}

}  // namespace trinity::report
