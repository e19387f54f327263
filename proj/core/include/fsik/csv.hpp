#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

namespace fsik {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest-free 17 significant digit rendering, '.' decimal separator.
std::string format_double(double value);

// Opens `path` for writing, throwing IoError naming the path on failure.
std::ofstream open_output(const std::string& path);

}  // namespace fsik
