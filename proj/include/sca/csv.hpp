#pragma once

#include "sca/data.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace sca {

enum class SampleLayout { Rows, Cols };

struct CsvLayout {
  SampleLayout samples = SampleLayout::Rows;
  bool header = false;
};

SampleLayout parse_sample_layout(const std::string& text);

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Comma-separated decimal floats. Lines without a comma are split on
/// whitespace, so whitespace-delimited .dat exports load unchanged. With
/// header = true the first line supplies variable names (samples-as-rows)
/// and is skipped otherwise.
DataMatrix load_csv(const std::filesystem::path& path, const CsvLayout& layout);
DataMatrix parse_csv(const std::string& text, const CsvLayout& layout);

/// Writes samples as rows, with a header line when names are present.
void save_csv(const std::filesystem::path& path, const DataMatrix& data);

}  // namespace sca
