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

#include "jointsparse/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace jointsparse {

namespace {

[[noreturn]] void parse_error(const std::string& source, int line, const std::string& what) {
  std::ostringstream msg;
  msg << source;
  if (line > 0) msg << ":" << line;
  msg << ": " << what;
  throw Error(ErrorCode::ParseError, msg.str());
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  require(in.good(), ErrorCode::ParseError, path + ": cannot open for reading");
  return in;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  require(out.good(), ErrorCode::InvalidArgument, path + ": cannot open for writing");
  return out;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << "MAT1 " << m.rows() << " " << m.cols() << "\n";
  char buf[40];
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      out << (c ? " " : "") << buf;
    }
    out << "\n";
  }
}

void write_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  write_matrix(out, m);
  require(out.good(), ErrorCode::InvalidArgument, path + ": write failed");
}

Matrix read_matrix(std::istream& in, const std::string& source) {
  std::string magic;
  long long rows = -1, cols = -1;
  if (!(in >> magic >> rows >> cols) || magic != "MAT1" || rows < 0 || cols < 0)
    parse_error(source, 1, "expected header 'MAT1 <rows> <cols>'");
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      std::string token;
      if (!(in >> token)) parse_error(source, 0, "fewer values than rows*cols");
      double v = 0.0;
      const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
      if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        parse_error(source, 0, "not a number: '" + token + "'");
      m(r, c) = v;
    }
  }
  std::string extra;
  if (in >> extra) parse_error(source, 0, "more values than rows*cols");
  return m;
}

Matrix read_matrix(const std::string& path) {
  std::ifstream in = open_in(path);
  return read_matrix(in, path);
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in, const std::string& path) {
  std::string tok;
  for (;;) {
    const int ch = in.get();
    if (ch == EOF) break;
    if (ch == '#') {
      std::string rest;
      std::getline(in, rest);
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) parse_error(path, 0, "truncated PGM header");
  return tok;
}

int pgm_int(std::istream& in, const std::string& path, const char* what) {
  const std::string tok = pgm_token(in, path);
  int v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v < 0)
    parse_error(path, 0, std::string("bad PGM ") + what + ": '" + tok + "'");
  return v;
}

}  // namespace

PgmImage read_pgm(const std::string& path) {
  std::ifstream in = open_in(path, true);
  const std::string magic = pgm_token(in, path);
  if (magic != "P2" && magic != "P5") parse_error(path, 1, "PGM magic must be P2 or P5");
  const int width = pgm_int(in, path, "width");
  const int height = pgm_int(in, path, "height");
  PgmImage img;
  img.maxval = pgm_int(in, path, "maxval");
  if (img.maxval < 1 || img.maxval > 65535) parse_error(path, 0, "maxval outside [1, 65535]");
  img.pixels.resize(height, width);
  if (magic == "P2") {
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) {
        const int v = pgm_int(in, path, "sample");
        if (v > img.maxval) parse_error(path, 0, "sample exceeds maxval");
        img.pixels(r, c) = v;
      }
  } else {
    // The single whitespace after maxval was consumed by the tokenizer.
    const int bytes = img.maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(static_cast<std::size_t>(width) * height * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      parse_error(path, 0, "truncated P5 raster");
    std::size_t k = 0;
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) {
        int v = buf[k++];
        if (bytes == 2) v = (v << 8) | buf[k++];
        if (v > img.maxval) parse_error(path, 0, "sample exceeds maxval");
        img.pixels(r, c) = v;
      }
  }
  return img;
}

void write_pgm(const std::string& path, const Matrix& pixels, int maxval, bool binary) {
  require(maxval >= 1 && maxval <= 65535, ErrorCode::InvalidArgument,
          "write_pgm: maxval outside [1, 65535]");
  std::ofstream out = open_out(path, true);
  out << (binary ? "P5" : "P2") << "\n" << pixels.cols() << " " << pixels.rows() << "\n"
      << maxval << "\n";
  auto sample = [&](Index r, Index c) {
    const double v = std::round(pixels(r, c));
    return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(maxval)));
  };
  for (Index r = 0; r < pixels.rows(); ++r) {
    for (Index c = 0; c < pixels.cols(); ++c) {
      const int v = sample(r, c);
      if (!binary) {
        out << v << (c + 1 < pixels.cols() ? " " : "\n");
      } else if (maxval > 255) {
        out.put(static_cast<char>(v >> 8));
        out.put(static_cast<char>(v & 0xff));
      } else {
        out.put(static_cast<char>(v));
      }
    }
  }
  require(out.good(), ErrorCode::InvalidArgument, path + ": write failed");
}

MaskMatrix read_mask(const std::string& path) {
  const PgmImage img = read_pgm(path);
  require((img.pixels.array() == 0.0 || img.pixels.array() == 1.0).all(),
          ErrorCode::ParseError, path + ": mask samples must be 0 or 1");
  return img.pixels.array() == 1.0;
}

void write_mask(const std::string& path, const MaskMatrix& mask) {
  write_pgm(path, mask.cast<double>().matrix(), 1, true);
}

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_error(source, number, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) parse_error(source, number, "empty key");
    if (cfg.values_.count(key)) parse_error(source, number, "duplicate key '" + key + "'");
    cfg.values_[key] = value;
    cfg.lines_[key] = number;
  }
  cfg.line_count_ = number;
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in = open_in(path);
  return parse(in, path);
}

void Config::check_keys(const std::set<std::string>& allowed,
                        const std::vector<std::string>& required) const {
  // Report in file order so the message points at the first offender.
  std::vector<std::pair<int, std::string>> unknown;
  for (const auto& [key, value] : values_)
    if (!allowed.count(key)) unknown.emplace_back(lines_.count(key) ? lines_.at(key) : 0, key);
  if (!unknown.empty()) {
    std::sort(unknown.begin(), unknown.end());
    parse_error(source_, unknown.front().first, "unknown key '" + unknown.front().second + "'");
  }
  for (const std::string& key : required)
    if (!has(key)) parse_error(source_, line_count_, "missing required key '" + key + "'");
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

const std::string& Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) parse_error(source_, line_count_, "missing required key '" + key + "'");
  return it->second;
}

void Config::bad_value(const std::string& key, const std::string& what) const {
  const auto it = lines_.find(key);
  parse_error(source_, it == lines_.end() ? 0 : it->second,
              "key '" + key + "': " + what + " (got '" + values_.at(key) + "')");
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const std::string& s = raw(key);
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad_value(key, "expected a real");
  return v;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string& s = raw(key);
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad_value(key, "expected an integer");
  return v;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = raw(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad_value(key, "expected true or false");
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::string s = raw(key);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    if (tok == "inf") {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      bad_value(key, "expected a list of reals");
    out.push_back(v);
  }
  if (out.empty()) bad_value(key, "empty list");
  return out;
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& fallback) const {
  return has(key) ? get_list(key) : fallback;
}

std::uint64_t Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [key, value] : values_) {
    for (const char ch : key + "=" + value + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string CsvTable::str() const {
  std::ostringstream out;
  out << "#";
  for (const auto& [key, value] : metadata) out << " " << key << "=" << value;
  out << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_real(row[i]);
    out << "\n";
  }
  return out.str();
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out = open_out(path);
  out << str();
  require(out.good(), ErrorCode::InvalidArgument, path + ": write failed");
}

}  // namespace jointsparse
