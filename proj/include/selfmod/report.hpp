#pragma once

#include <string>
#include <vector>

namespace selfmod {

// Shortest round-trip decimal form; the same bits always print the same
// bytes, which is what makes rerun outputs byte-identical.
std::string format_double(double v);

// RFC 4180 quoting: fields containing commas, quotes or newlines are
// wrapped in double quotes with inner quotes doubled. Lines end with \n.
std::string csv_escape(const std::string& field);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& fields);
  const std::string& str() const { return out_; }

 private:
  size_t columns_;
  std::string out_;
};

}  // namespace selfmod
