#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace ibfifo {

// feasibility of a linear system over nonnegative rationals
struct LinearSystem {
  enum class Rel { eq, ge, le };
  struct Row {
    std::vector<std::pair<std::uint32_t, long>> coef;
    Rel rel = Rel::eq;
    long rhs = 0;
  };
  std::uint32_t num_vars = 0;
  std::vector<Row> rows;
};

// nullopt when the tableau would exceed max_cells
std::optional<bool> feasible(const LinearSystem &sys, std::size_t max_cells = 6'000'000);

} // namespace ibfifo
