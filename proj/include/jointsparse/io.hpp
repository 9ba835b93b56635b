// Copyright 2026 The jointsparse Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File formats: MAT1 text matrices, PGM images, key = value configuration
// files and CSV tables with a metadata comment line.

#ifndef JOINTSPARSE_IO_HPP
#define JOINTSPARSE_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "jointsparse/core_model.hpp"

namespace jointsparse {

/// "MAT1 <rows> <cols>" followed by row-major values at 17 significant digits.
void write_matrix(std::ostream& out, const Matrix& m);
void write_matrix(const std::string& path, const Matrix& m);
Matrix read_matrix(std::istream& in, const std::string& source = "<stream>");
Matrix read_matrix(const std::string& path);

/// Grayscale PGM. Pixel values are returned unscaled, in [0, maxval].
struct PgmImage {
  Matrix pixels;
  int maxval = 255;
};

PgmImage read_pgm(const std::string& path);
/// Values are rounded and clamped to [0, maxval]. P5 uses two big-endian
/// bytes per sample when maxval > 255.
void write_pgm(const std::string& path, const Matrix& pixels, int maxval = 255,
               bool binary = true);

/// A PGM whose samples are all 0 or 1.
MaskMatrix read_mask(const std::string& path);
void write_mask(const std::string& path, const MaskMatrix& mask);

/// `key = value` lines; `#` starts a comment. Duplicate keys are an error.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::string& path);

  /// Throws ParseError naming the first unknown key (with its line) or the
  /// first missing required key.
  void check_keys(const std::set<std::string>& allowed,
                  const std::vector<std::string>& required) const;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma- or whitespace-separated list of reals.
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const;

  /// FNV-1a over the sorted "key=value" lines; stable across runs.
  std::uint64_t hash() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const std::string& raw(const std::string& key) const;
  [[noreturn]] void bad_value(const std::string& key, const std::string& what) const;

  std::string source_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  int line_count_ = 0;
};

/// CSV table: one "# key=value ..." metadata line, a header row, then rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  std::string str() const;
  void write(const std::string& path) const;
};

/// Shortest decimal form that reads back to the same double.
std::string format_real(double v);

}  // namespace jointsparse

#endif  // JOINTSPARSE_IO_HPP
