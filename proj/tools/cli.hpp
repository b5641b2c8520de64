#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ballistic::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kMalformedInput = 2,
    kValidationFailure = 3,
    kArgumentConflict = 4,
    kSampleSizeMismatch = 5,
};

/// Failure that maps to a specific exit code.
class Failure : public std::runtime_error {
  public:
    Failure(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
    int code() const noexcept { return code_; }

  private:
    int code_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Picks the most frequent of comma, tab and semicolon in `line` (comma when none).
char detect_delimiter(std::string_view line);

/// Reads delimited text. Blank lines are skipped; ragged rows are malformed.
CsvTable parse_csv(std::istream& in, std::optional<char> delimiter, bool header);
CsvTable read_csv(const std::string& path, std::optional<char> delimiter, bool header);

/// Converts every cell to a number, reporting the first bad cell by its
/// one-based row and column.
std::vector<std::vector<double>> numeric_rows(const CsvTable& table, const std::vector<std::size_t>& skip_columns = {});

/// Formats a statistic for the text report ("2.0", "0.092215").
std::string format_number(double value);

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ballistic::cli
