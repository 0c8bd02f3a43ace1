#include "rpi/format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ostream>

#include "rpi/errors.hpp"

namespace rpi {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8e", x);
  // exponent after rounding to 9 significant digits
  const char* e = std::strchr(buf, 'e');
  const int exponent = std::atoi(e + 1);
  const double mag = std::abs(std::strtod(buf, nullptr));
  const bool fixed = x == 0.0 || (exponent >= -3 && (exponent < 4 || mag == 1e4));
  if (fixed) std::snprintf(buf, sizeof buf, "%.*f", x == 0.0 ? 8 : 8 - exponent, x);
  return buf;
}

std::string format_value(const Field& f) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>)
          return format_number(v);
        else if constexpr (std::is_same_v<T, std::string>)
          return v;
        else
          return std::to_string(v);
      },
      f.value);
}

void write_text(std::ostream& os, const Record& record, std::string_view line_prefix) {
  for (const auto& f : record) os << line_prefix << f.key << '=' << format_value(f) << '\n';
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_csv_header(std::ostream& os, std::span<const std::string> columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << csv_escape(columns[i]);
  os << '\n';
}

void write_csv_row(std::ostream& os, const Record& record) {
  for (std::size_t i = 0; i < record.size(); ++i) os << (i ? "," : "") << csv_escape(format_value(record[i]));
  os << '\n';
}

void emit(std::ostream& os, std::span<const std::string> header, std::span<const Record> rows, OutputFormat format) {
  if (format == OutputFormat::CSV) {
    write_csv_header(os, header);
    for (const auto& r : rows) {
      if (r.size() != header.size()) throw UsageError("CSV row width does not match its header");
      write_csv_row(os, r);
    }
    return;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) os << '\n';
    write_text(os, rows[i]);
  }
}

}  // namespace rpi
