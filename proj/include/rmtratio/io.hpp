/*
   Copyright 2026 The rmtratio Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "rmtratio/analysis.hpp"
#include "rmtratio/ensembles.hpp"
#include "rmtratio/error.hpp"
#include "rmtratio/ratios.hpp"

namespace rmtratio {

/// Decimal with 17 significant digits (round-trips every double).
/// Shortest decimal string that parses back to exactly `x`.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// Writes `content` to `path` through a temporary file and a rename, so
/// readers never observe a partially written artifact.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  if (path.has_parent_path()) {
    std::error_code dir_ec;
    std::filesystem::create_directories(path.parent_path(), dir_ec);
  }
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(ErrorCode::IoError, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(ErrorCode::IoError, "cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

// CSV ---------------------------------------------------------------------

/// Lines prefixed with "# " ahead of the header row (provenance).
inline void write_preamble(std::ostream& out, const std::vector<std::string>& lines) {
  for (const auto& l : lines) out << "# " << l << '\n';
}

/// trial_index,E_1,...,E_n
inline void write_spectra_csv(std::ostream& out, const std::vector<Spectrum>& spectra) {
  std::size_t width = 0;
  for (const auto& s : spectra) width = std::max(width, s.size());
  out << "trial_index";
  for (std::size_t i = 1; i <= width; ++i) out << ",E_" << i;
  out << '\n';
  for (const auto& s : spectra) {
    out << s.seed_tag;
    for (double e : s.eigenvalues) out << ',' << format_double(e);
    out << '\n';
  }
}

inline void write_ratios_csv(std::ostream& out, const RatioSeries& series) {
  out << "k,value\n";
  for (double v : series.values) out << series.k << ',' << format_double(v) << '\n';
}

/// bin_lo,bin_hi,count,density with density = count / (total * width).
inline void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_lo,bin_hi,count,density\n";
  for (std::size_t i = 0; i < h.bins(); ++i) {
    out << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ',' << h.counts[i] << ','
        << format_double(h.density(i)) << '\n';
  }
}

struct CurvePoint {
  double r;
  double pdf;
};

inline void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "r,pdf\n";
  for (const auto& p : curve) out << format_double(p.r) << ',' << format_double(p.pdf) << '\n';
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    cells.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
  }
  return cells;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::IoError, "line " + std::to_string(line_no) + ": not a number: '" + s + "'");
  }
}

// Next non-comment, non-empty line.
inline bool next_data_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace detail

/// Reads spectra written by write_spectra_csv. The levels of each row are
/// sorted on input; `spec` is attached to every spectrum.
inline std::vector<Spectrum> read_spectra_csv(std::istream& in, const EnsembleSpec& spec = {}) {
  std::string line;
  std::size_t line_no = 0;
  if (!detail::next_data_line(in, line, line_no)) fail(ErrorCode::IoError, "spectra CSV is empty");
  const auto header = detail::split_csv_line(line);
  if (header.empty() || header[0] != "trial_index") fail(ErrorCode::IoError, "spectra CSV header must start with trial_index");
  std::vector<Spectrum> out;
  while (detail::next_data_line(in, line, line_no)) {
    const auto cells = detail::split_csv_line(line);
    if (cells.size() < 3) fail(ErrorCode::IoError, "line " + std::to_string(line_no) + ": need trial_index and >= 2 levels");
    Spectrum s;
    s.spec = spec;
    s.seed_tag = static_cast<std::uint64_t>(detail::parse_double(cells[0], line_no));
    for (std::size_t i = 1; i < cells.size(); ++i) s.eigenvalues.push_back(detail::parse_double(cells[i], line_no));
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
    s.spec.n = s.eigenvalues.size();
    out.push_back(std::move(s));
  }
  return out;
}

inline RatioSeries read_ratios_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!detail::next_data_line(in, line, line_no)) fail(ErrorCode::IoError, "ratio CSV is empty");
  const auto header = detail::split_csv_line(line);
  if (header.size() != 2 || header[0] != "k" || header[1] != "value") {
    fail(ErrorCode::IoError, "ratio CSV header must be 'k,value'");
  }
  RatioSeries series;
  bool first = true;
  while (detail::next_data_line(in, line, line_no)) {
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 2) fail(ErrorCode::IoError, "line " + std::to_string(line_no) + ": expected 2 columns");
    const auto k = static_cast<std::size_t>(detail::parse_double(cells[0], line_no));
    if (first) {
      series.k = k;
      first = false;
    } else if (k != series.k) {
      fail(ErrorCode::IoError, "line " + std::to_string(line_no) + ": mixed ratio orders");
    }
    const double v = detail::parse_double(cells[1], line_no);
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorCode::IoError, "line " + std::to_string(line_no) + ": ratio must be positive");
    series.values.push_back(v);
  }
  return series;
}

// JSON --------------------------------------------------------------------

/// Streaming JSON emitter with stable key order; doubles use 17
/// significant digits and non-finite values become null.
class JsonWriter {
 public:
  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(std::string_view k) {
    separator();
    quote(k);
    out_ << ": ";
    after_key_ = true;
    return *this;
  }

  JsonWriter& value(double v) {
    separator();
    if (std::isfinite(v)) {
      out_ << format_double(v);
    } else {
      out_ << "null";
    }
    return *this;
  }
  JsonWriter& value(std::uint64_t v) {
    separator();
    out_ << v;
    return *this;
  }
  JsonWriter& value(std::int64_t v) {
    separator();
    out_ << v;
    return *this;
  }
  JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
  JsonWriter& value(bool v) {
    separator();
    out_ << (v ? "true" : "false");
    return *this;
  }
  JsonWriter& value(std::string_view v) {
    separator();
    quote(v);
    return *this;
  }
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& null() {
    separator();
    out_ << "null";
    return *this;
  }

  template <typename T>
  JsonWriter& field(std::string_view k, const T& v) {
    key(k);
    return value(v);
  }

  std::string str() const { return out_.str() + "\n"; }

 private:
  JsonWriter& open(char c) {
    separator();
    out_ << c;
    first_.push_back(true);
    return *this;
  }
  JsonWriter& close(char c) {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) newline();
    out_ << c;
    return *this;
  }
  void separator() {
    if (after_key_) {
      after_key_ = false;
      return;
    }
    if (first_.empty()) return;
    if (!first_.back()) out_ << ',';
    first_.back() = false;
    newline();
  }
  void newline() {
    out_ << '\n';
    for (std::size_t i = 0; i < first_.size(); ++i) out_ << "  ";
  }
  void quote(std::string_view s) {
    out_ << '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ << "\\\""; break;
        case '\\': out_ << "\\\\"; break;
        case '\n': out_ << "\\n"; break;
        case '\t': out_ << "\\t"; break;
        case '\r': out_ << "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out_ << buf;
          } else {
            out_ << c;
          }
      }
    }
    out_ << '"';
  }

  std::ostringstream out_;
  std::vector<bool> first_;
  bool after_key_ = false;
};

namespace detail {

inline void write_window(JsonWriter& j, const TailWindow& w) {
  j.begin_object().field("lo", w.lo).field("hi", w.hi).field("min_count", static_cast<std::uint64_t>(w.min_count)).end_object();
}

inline void write_slope(JsonWriter& j, const SlopeEstimate& s) {
  j.begin_object();
  if (s.fit) {
    j.field("value", s.fit->slope).field("stderr", s.fit->stderr_slope);
    j.field("samples", static_cast<std::uint64_t>(s.fit->samples));
  } else {
    j.key("value").null().key("stderr").null().key("samples").null();
  }
  if (s.power_law) {
    j.field("power_law_value", s.power_law->slope).field("power_law_stderr", s.power_law->stderr_slope);
  } else {
    j.key("power_law_value").null().key("power_law_stderr").null();
  }
  if (s.error.empty()) {
    j.key("error").null();
  } else {
    j.field("error", s.error);
  }
  j.end_object();
}

}  // namespace detail

/// Writes the FitReport fields into the currently open JSON object.
inline void write_fit_report_fields(JsonWriter& j, const FitReport& r) {
  using u64 = std::uint64_t;
  j.field("k", static_cast<u64>(r.k));
  j.field("beta_input", r.beta_input);
  j.field("model", to_string(r.model));
  j.field("mode", to_string(r.mode));
  j.field("n_levels", static_cast<u64>(r.n_levels));
  j.field("trials", static_cast<u64>(r.trials));
  j.field("scale_a", r.scale_a);
  j.field("seed", static_cast<u64>(r.seed));
  j.field("bulk_fraction", r.bulk_fraction);
  j.key("windows").begin_object();
  j.key("small_r");
  detail::write_window(j, r.small_window);
  j.key("large_r");
  detail::write_window(j, r.large_window);
  j.end_object();
  j.field("tail_model", to_string(r.tail_model));
  j.field("ratio_count", static_cast<u64>(r.ratio_count));
  j.field("discarded_realizations", static_cast<u64>(r.discarded_realizations));
  j.field("predicted_beta_prime", r.predicted_beta_prime);
  j.field("beta_prime_hat", r.beta_prime_hat);
  j.field("beta_prime_ci_halfwidth", r.beta_prime_ci_halfwidth);
  j.key("beta_prime_ci").begin_array().value(r.mle.ci_lower).value(r.mle.ci_upper).end_array();
  j.field("mle_converged", r.mle.converged);
  j.field("mle_at_lower_bound", r.mle.at_lower_bound);
  if (r.bootstrap_ci_halfwidth) {
    j.field("bootstrap_ci_halfwidth", *r.bootstrap_ci_halfwidth);
  } else {
    j.key("bootstrap_ci_halfwidth").null();
  }
  j.key("predicted_exponents").begin_object();
  j.field("small_r", r.predicted_exponents.small_r).field("large_r", r.predicted_exponents.large_r);
  j.end_object();
  j.key("slope_small_r");
  detail::write_slope(j, r.slope_small_r);
  j.key("slope_large_r");
  detail::write_slope(j, r.slope_large_r);
  j.field("ks_distance", r.ks_distance);
  j.field("ks_reference", r.ks_reference);
  j.field("duality_ks", r.duality.ks_statistic);
  j.field("duality_p_value_nominal", r.duality.p_value);
  j.key("thresholds").begin_object();
  j.field("beta_tol", r.thresholds.beta_tol).field("slope_tol", r.thresholds.slope_tol);
  j.field("ks_max", r.thresholds.ks_max).field("duality_max", r.thresholds.duality_max);
  j.end_object();
  j.key("checks").begin_array();
  for (const auto& c : r.checks) {
    j.begin_object();
    j.field("name", c.name).field("value", c.value).field("lower", c.lower).field("upper", c.upper);
    j.field("status", to_string(c.status)).field("note", c.note);
    j.end_object();
  }
  j.end_array();
  j.field("partial", r.partial());
  j.field("passed", r.passed());
}

/// Standalone FitReport document (schema 1).
inline std::string to_json(const FitReport& r) {
  JsonWriter j;
  j.begin_object();
  j.field("schema", 1);
  j.field("toolkit", "rmtratio");
  j.field("version", kVersion);
  write_fit_report_fields(j, r);
  j.end_object();
  return j.str();
}

}  // namespace rmtratio
