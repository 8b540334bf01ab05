#include "taylorlaw/io.hpp"

#include <charconv>
#include <system_error>

#include "taylorlaw/error.hpp"

namespace taylorlaw {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  const char delimiter = line.find(',') != std::string_view::npos ? ',' : '\0';
  std::vector<std::string_view> fields;
  if (delimiter) {
    std::size_t start = 0;
    for (;;) {
      const auto pos = line.find(delimiter, start);
      auto field = trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
      if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
        field = field.substr(1, field.size() - 2);
      }
      fields.push_back(field);
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return fields;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

std::optional<double> parse_number(std::string_view field) {
  double value = 0.0;
  const char* first = field.data();
  if (!field.empty() && field.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw Error("failed to format a double");
  return std::string(buffer, ptr);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_samples(std::ostream& out, std::span<const double> values, const Metadata& metadata) {
  for (const auto& [key, value] : metadata) out << "# " << key << ": " << value << '\n';
  out << "value\n";
  std::string buffer;
  for (const double v : values) {
    buffer += format_double(v);
    buffer += '\n';
    if (buffer.size() > (1u << 16)) {
      out << buffer;
      buffer.clear();
    }
  }
  out << buffer;
}

std::vector<double> read_samples(const std::string& path, const std::optional<std::string>& column) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open sample file '" + path + "'");
  std::vector<double> values;
  std::string line;
  std::size_t line_number = 0;
  std::optional<std::size_t> index;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_number;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split(text);
    if (!header_seen) {
      header_seen = true;
      const bool numeric = !fields.empty() && parse_number(fields.front()).has_value();
      if (!numeric) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (fields[i] == column.value_or("value")) index = i;
        }
        if (!index) {
          if (column) throw ParseError("column '" + *column + "' not found in header", line_number);
          index = 0;
        }
        continue;
      }
      if (column) throw ParseError("column '" + *column + "' requested but the file has no header", line_number);
      index = 0;
    }
    if (*index >= fields.size()) throw ParseError("row has too few fields", line_number);
    const auto value = parse_number(fields[*index]);
    if (!value) throw ParseError("malformed number '" + std::string(fields[*index]) + "'", line_number);
    values.push_back(*value);
  }
  return values;
}

AtomicOutput::AtomicOutput(std::filesystem::path path) : path_(std::move(path)) {
  temp_ = path_;
  temp_ += ".partial";
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error("cannot open output file '" + temp_.string() + "'");
}

AtomicOutput::~AtomicOutput() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(temp_, ec);
  }
}

void AtomicOutput::commit() {
  out_.flush();
  if (!out_) throw Error("write to '" + temp_.string() + "' failed");
  out_.close();
  std::error_code ec;
  std::filesystem::rename(temp_, path_, ec);
  if (ec) throw Error("cannot move output into place at '" + path_.string() + "': " + ec.message());
  committed_ = true;
}

}  // namespace taylorlaw
