#pragma once

// Plain CSV readers/writers for spectra, couplings, fidelity traces,
// eigenvectors and protocol reports. Reals are written with 17 significant
// digits, which round-trips IEEE doubles exactly.

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pst/dynamics.hpp"
#include "pst/errors.hpp"
#include "pst/phase_protocol.hpp"
#include "pst/spectra.hpp"

namespace pst::csv {

inline std::string format_real(double x) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

inline double parse_real(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '+')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw invalid_argument("cannot parse number '" + std::string(s) + "'", "E_IO");
  return x;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

namespace detail {

inline void expect_header(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line)) throw invalid_argument("empty CSV input", "E_IO");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header)
    throw invalid_argument("unexpected CSV header '" + line + "', expected '" + std::string(header) + "'", "E_IO");
}

// Rows of a fixed column count; blank lines skipped.
inline std::vector<std::vector<std::string>> read_rows(std::istream& in, std::size_t columns) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != columns)
      throw invalid_argument("CSV row has " + std::to_string(cells.size()) + " columns, expected " +
                                 std::to_string(columns),
                             "E_IO");
    rows.emplace_back(cells.begin(), cells.end());
  }
  return rows;
}

// Exact decimal for numerator/denominator with denominator 1 or 2.
inline std::string format_level(long long num, long long den) {
  if (den == 1) return std::to_string(num);
  return format_real(double(num) / double(den));
}

}  // namespace detail

// ---- spectrum: nu,epsilon -------------------------------------------------

inline void write_spectrum(std::ostream& out, const PstSpectrum& spec) {
  out << "nu,epsilon\n";
  const long long n = static_cast<long long>(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    // nu = k - (n-1)/2 = (2k - (n-1)) / 2
    out << detail::format_level(2 * static_cast<long long>(k) - (n - 1), 2) << ','
        << detail::format_level(spec.numerators()[k], spec.denominator()) << '\n';
  }
}

inline PstSpectrum read_spectrum(std::istream& in) {
  detail::expect_header(in, "nu,epsilon");
  std::vector<long long> twice;
  for (const auto& row : detail::read_rows(in, 2)) {
    const double e2 = 2.0 * parse_real(row[1]);
    if (e2 != std::round(e2)) throw invalid_argument("spectrum levels must be integers or half-integers", "E_IO");
    twice.push_back(static_cast<long long>(std::llround(e2)));
  }
  return PstSpectrum(std::move(twice), 2);
}

// ---- couplings: i,J -------------------------------------------------------

inline void write_couplings(std::ostream& out, const CouplingProfile& profile) {
  out << "i,J\n";
  for (std::size_t i = 0; i < profile.couplings().size(); ++i)
    out << (i + 1) << ',' << format_real(profile[i]) << '\n';
}

inline CouplingProfile read_couplings(std::istream& in) {
  detail::expect_header(in, "i,J");
  std::vector<double> J;
  for (const auto& row : detail::read_rows(in, 2)) {
    if (static_cast<std::size_t>(parse_real(row[0])) != J.size() + 1)
      throw invalid_argument("coupling rows must be numbered 1..n-1 in order", "E_IO");
    J.push_back(parse_real(row[1]));
  }
  return CouplingProfile(std::move(J));
}

// ---- fidelity trace: t,abs_f,re_f,im_f ------------------------------------

inline void write_trace(std::ostream& out, const FidelityTrace& tr) {
  out << "t,abs_f,re_f,im_f\n";
  for (std::size_t k = 0; k < tr.size(); ++k)
    out << format_real(tr.times[k]) << ',' << format_real(tr.modulus(k)) << ','
        << format_real(tr.amplitudes[k].real()) << ',' << format_real(tr.amplitudes[k].imag()) << '\n';
}

inline FidelityTrace read_trace(std::istream& in) {
  detail::expect_header(in, "t,abs_f,re_f,im_f");
  FidelityTrace tr;
  for (const auto& row : detail::read_rows(in, 4)) {
    tr.times.push_back(parse_real(row[0]));
    tr.amplitudes.emplace_back(parse_real(row[2]), parse_real(row[3]));
  }
  return tr;
}

// ---- eigenvectors: site,c1,...,cN -----------------------------------------

inline void write_eigenvectors(std::ostream& out, const Eigensystem& es) {
  out << "site";
  for (std::size_t k = 1; k <= es.n; ++k) out << ",c" << k;
  out << '\n';
  for (std::size_t i = 0; i < es.n; ++i) {
    out << (i + 1);
    for (std::size_t k = 0; k < es.n; ++k) out << ',' << format_real(es.vectors(Eigen::Index(i), Eigen::Index(k)));
    out << '\n';
  }
}

// Returns the n x n matrix with column k = eigenvector k.
inline Eigen::MatrixXd read_eigenvectors(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw invalid_argument("empty CSV input", "E_IO");
  const std::size_t n = split(header).size() - 1;
  const auto rows = detail::read_rows(in, n + 1);
  if (rows.size() != n) throw invalid_argument("eigenvector CSV must have one row per site", "E_IO");
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd V(N, N);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) V(Eigen::Index(i), Eigen::Index(k)) = parse_real(rows[i][k + 1]);
  return V;
}

// ---- protocol report: component,re,im + fidelity,<value> ------------------

inline constexpr std::array<const char*, 4> component_labels{"dd", "du", "ud", "uu"};

inline void write_protocol_report(std::ostream& out, const TransferResult& r) {
  out << "component,re,im\n";
  for (std::size_t k = 0; k < 4; ++k)
    out << component_labels[k] << ',' << format_real(r.decoded[k].real()) << ','
        << format_real(r.decoded[k].imag()) << '\n';
  out << "fidelity," << format_real(r.fidelity) << '\n';
}

struct ProtocolReport {
  TwoQubitAmplitudes decoded{};
  double fidelity = 0.0;
};

inline ProtocolReport read_protocol_report(std::istream& in) {
  detail::expect_header(in, "component,re,im");
  ProtocolReport rep;
  std::string line;
  std::size_t k = 0;
  bool have_fidelity = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() == 2 && cells[0] == "fidelity") {
      rep.fidelity = parse_real(cells[1]);
      have_fidelity = true;
    } else if (cells.size() == 3 && k < 4 && cells[0] == component_labels[k]) {
      rep.decoded[k++] = cplx(parse_real(cells[1]), parse_real(cells[2]));
    } else {
      throw invalid_argument("malformed protocol report line '" + line + "'", "E_IO");
    }
  }
  if (k != 4 || !have_fidelity) throw invalid_argument("incomplete protocol report", "E_IO");
  return rep;
}

}  // namespace pst::csv
