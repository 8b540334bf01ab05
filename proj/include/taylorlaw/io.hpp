#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace taylorlaw {

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(std::string_view text);

using Metadata = std::vector<std::pair<std::string, std::string>>;

// Sample file: "# key: value" comment lines, a "value" header, one number
// per line.
void write_samples(std::ostream& out, std::span<const double> values, const Metadata& metadata = {});

// Reads a sample file or any CSV/whitespace table of numbers. Lines starting
// with '#' are skipped; a non-numeric first row is a header, and column
// selects a field by header name (default: "value" if present, else the
// first field). ParseError carries the offending line number.
std::vector<double> read_samples(const std::string& path, const std::optional<std::string>& column = {});

// Output that appears at `path` only on commit(): data goes to a temporary
// sibling that is renamed into place, and removed if never committed.
class AtomicOutput {
 public:
  explicit AtomicOutput(std::filesystem::path path);
  AtomicOutput(const AtomicOutput&) = delete;
  AtomicOutput& operator=(const AtomicOutput&) = delete;
  ~AtomicOutput();

  std::ostream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

}  // namespace taylorlaw
