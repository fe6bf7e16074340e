#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hqsim::io {

// Fixed 9-significant-digit representation used in every CSV.
std::string format_number(double value);

class CsvWriter {
 public:
  CsvWriter(std::filesystem::path path, std::vector<std::string> columns,
            std::vector<std::pair<std::string, std::string>> metadata = {});

  void row(const std::vector<double>& values);
  // Mixed rows; numbers should already be formatted with format_number.
  void row_text(const std::vector<std::string>& fields);
  void write() const;

  const std::filesystem::path& path() const { return path_; }
  const std::vector<std::string>& columns() const { return columns_; }
  std::string str() const;

 private:
  std::filesystem::path path_;
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> metadata_;
  std::vector<std::string> lines_;
};

struct OutputRecord {
  std::string path;
  std::vector<std::string> columns;
};

struct RunManifest {
  std::string tool = "hqsim";
  std::string version;
  std::string subcommand;
  std::string input_digest;  // sha256 hex
  std::string timestamp;     // ISO-8601 UTC
  unsigned long long seed = 0;
  unsigned threads = 1;
  std::vector<OutputRecord> outputs;

  std::string to_json() const;
  static RunManifest from_json(std::string_view text);
  void write(const std::filesystem::path& path) const;
};

std::string sha256_hex(std::string_view data);
std::string utc_timestamp();
std::string read_file(const std::filesystem::path& path);

}  // namespace hqsim::io
