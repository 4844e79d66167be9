#include "hsicwb/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "hsicwb/error.hpp"

namespace hsicwb {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<double> parse_line(std::string_view line, std::size_t line_no) {
  std::vector<double> out;
  std::size_t col = 1;
  while (true) {
    const auto comma = line.find(',');
    const auto field = trim(line.substr(0, comma));
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && *first == '+') {
      ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc() || ptr != last ||
        !std::isfinite(value)) {
      throw Error(ErrorKind::Data, "row " + std::to_string(line_no) +
                                       ", column " + std::to_string(col) +
                                       ": cannot parse '" +
                                       std::string(field) + "' as a number");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) {
      break;
    }
    line.remove_prefix(comma + 1);
    ++col;
  }
  return out;
}

bool looks_like_grid(const std::vector<double>& row) {
  if (row.size() < 2 || row.front() != 0.0 || row.back() != 1.0) {
    return false;
  }
  for (std::size_t k = 1; k < row.size(); ++k) {
    if (!(row[k] > row[k - 1])) {
      return false;
    }
  }
  return true;
}

}  // namespace

FunctionalSample parse_sample_csv(std::string_view text,
                                  const CsvOptions& options) {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) {
      line.remove_prefix(3);
    }
    if (!line.empty()) {
      rows.push_back(parse_line(line, line_no));
      line_numbers.push_back(line_no);
      if (rows.back().size() != rows.front().size()) {
        throw Error(ErrorKind::Data,
                    "row " + std::to_string(line_no) + " has " +
                        std::to_string(rows.back().size()) +
                        " columns, expected " +
                        std::to_string(rows.front().size()));
      }
    }
    if (nl == std::string_view::npos) {
      break;
    }
    text.remove_prefix(nl + 1);
  }
  if (rows.empty()) {
    throw Error(ErrorKind::Data, "no observations found");
  }

  const bool grid_row =
      options.grid_row == GridRow::Present ||
      (options.grid_row == GridRow::Auto && rows.size() > 1 &&
       looks_like_grid(rows.front()));

  const std::size_t m = rows.front().size();
  std::optional<Grid> grid;
  std::size_t first = 0;
  if (grid_row) {
    try {
      grid = make_grid(rows.front());
    } catch (const Error& e) {
      throw Error(ErrorKind::Data, "row " + std::to_string(line_numbers[0]) +
                                       ": invalid grid row: " + e.what());
    }
    first = 1;
  } else if (options.vector || m == 1) {
    grid = make_vector_grid(m);
  } else {
    grid = make_uniform_grid(m);
  }
  if (rows.size() == first) {
    throw Error(ErrorKind::Data, "no observations after the grid row");
  }

  RowMatrix values(static_cast<Eigen::Index>(rows.size() - first),
                   static_cast<Eigen::Index>(m));
  for (std::size_t i = first; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      values(static_cast<Eigen::Index>(i - first),
             static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return {std::move(values), std::move(*grid)};
}

FunctionalSample read_sample_csv(const std::string& path,
                                 const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_sample_csv(buffer.str(), options);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_sample_csv(std::ostream& out, const FunctionalSample& sample,
                      bool include_grid_row) {
  const auto old_precision = out.precision();
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  auto write_row = [&](std::span<const double> row) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k != 0) {
        out << ',';
      }
      out << row[k];
    }
    out << '\n';
  };
  if (include_grid_row) {
    write_row(sample.grid().points());
  }
  for (std::size_t i = 0; i < sample.rows(); ++i) {
    write_row(sample.row(i));
  }
  out.precision(old_precision);
}

void write_sample_csv(const std::string& path, const FunctionalSample& sample,
                      bool include_grid_row) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  }
  write_sample_csv(out, sample, include_grid_row);
}

}  // namespace hsicwb
