#ifndef RPI_FORMAT_HPP
#define RPI_FORMAT_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rpi {

enum class OutputFormat { Text, CSV };

/// 9 significant digits; fixed notation for |x| in [1e-3, 1e4], scientific
/// outside it.
std::string format_number(double x);

struct Field {
  std::string key;
  std::variant<double, std::int64_t, std::uint64_t, std::string> value;
};

using Record = std::vector<Field>;

std::string format_value(const Field& f);

/// `key=value` per line, in record order.
void write_text(std::ostream& os, const Record& record, std::string_view line_prefix = {});

void write_csv_header(std::ostream& os, std::span<const std::string> columns);
void write_csv_row(std::ostream& os, const Record& record);

/// Text: one block per record separated by blank lines. CSV: header, then
/// one row per record (header only when `rows` is empty).
void emit(std::ostream& os, std::span<const std::string> header, std::span<const Record> rows, OutputFormat format);

}  // namespace rpi

#endif  // RPI_FORMAT_HPP
