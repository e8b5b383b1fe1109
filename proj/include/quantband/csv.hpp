#ifndef QUANTBAND_CSV_HPP
#define QUANTBAND_CSV_HPP

#include <string>
#include <vector>

namespace quantband {

// RFC-style CSV: comma-separated, double quotes around fields containing
// commas/quotes/newlines, embedded quotes doubled, CRLF tolerated.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Reads a CSV file, skipping leading '#' metadata lines.  Throws DataError
// when the file cannot be read.
std::vector<std::vector<std::string>> read_csv_file(const std::string& path);

// Field encoder: quotes when the value needs it.
std::string csv_field(const std::string& raw);

// Joins pre-encoded fields with commas and a trailing newline.
std::string csv_row(const std::vector<std::string>& fields);

// Decimal formatting with 17 significant digits: reparsing gives back the
// identical double.
std::string format_double(double v);

// Strict full-string parse; `what` names the value in error messages.
double parse_double(const std::string& s, const std::string& what);

// Missing-data markers: empty, "NA", "NaN" (case-insensitive).
bool is_missing(const std::string& field);

// Writes content to a temporary file in the same directory, then renames
// over the target so readers never observe a partial file.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace quantband

#endif  // QUANTBAND_CSV_HPP
