#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "hsicwb/grid.hpp"

namespace hsicwb {

// How the first line of a sample CSV is interpreted.
//   Auto:    treated as grid points when it starts at exactly 0, ends at
//            exactly 1 and is strictly increasing
//   Present: always grid points
//   Absent:  always an observation
enum class GridRow { Auto, Present, Absent };

struct CsvOptions {
  GridRow grid_row = GridRow::Auto;
  // Without a grid row: use uniform 1/d weights (vectors in R^d) instead of a
  // uniform trapezoid grid. Single-column files are always vectors.
  bool vector = false;
};

/// One observation per row, comma separated, '.' decimal separator. Blank
/// lines are skipped. Errors carry 1-based row/column locations.
[[nodiscard]] FunctionalSample parse_sample_csv(std::string_view text,
                                                const CsvOptions& options = {});

[[nodiscard]] FunctionalSample read_sample_csv(const std::string& path,
                                               const CsvOptions& options = {});

void write_sample_csv(std::ostream& out, const FunctionalSample& sample,
                      bool include_grid_row = false);

void write_sample_csv(const std::string& path, const FunctionalSample& sample,
                      bool include_grid_row = false);

}  // namespace hsicwb
