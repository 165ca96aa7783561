#include "ibfifo/simplex.hpp"

#include <gmpxx.h>

namespace ibfifo {

std::optional<bool> feasible(const LinearSystem &sys, std::size_t max_cells) {
  const std::size_t m = sys.rows.size();
  std::size_t slacks = 0;
  for (const auto &r : sys.rows) slacks += r.rel != LinearSystem::Rel::eq;
  const std::size_t n = sys.num_vars + slacks + m; // originals, slacks, artificials
  if ((m + 1) * (n + 1) > max_cells) return std::nullopt;

  std::vector<std::vector<mpq_class>> T(m + 1, std::vector<mpq_class>(n + 1));
  std::vector<std::size_t> basis(m);
  std::size_t s = sys.num_vars;
  for (std::size_t i = 0; i < m; ++i) {
    const auto &r = sys.rows[i];
    auto &row = T[i];
    for (auto [j, c] : r.coef) row[j] += c;
    if (r.rel == LinearSystem::Rel::ge) row[s++] = -1;
    else if (r.rel == LinearSystem::Rel::le) row[s++] = 1;
    row[n] = r.rhs;
    if (r.rhs < 0)
      for (auto &x : row) x = -x;
    const std::size_t art = sys.num_vars + slacks + i;
    row[art] = 1;
    basis[i] = art;
  }
  // phase one objective: minimize the artificials; row m holds reduced costs
  auto &obj = T[m];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= n; ++j) obj[j] -= T[i][j];
  for (std::size_t i = 0; i < m; ++i) obj[sys.num_vars + slacks + i] = 0;

  for (;;) {
    std::size_t enter = n;
    for (std::size_t j = 0; j < n; ++j)
      if (sgn(obj[j]) < 0) {
        enter = j;
        break;
      }
    if (enter == n) break;
    std::size_t leave = m;
    mpq_class best;
    for (std::size_t i = 0; i < m; ++i) {
      if (sgn(T[i][enter]) <= 0) continue;
      mpq_class ratio = T[i][n] / T[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break; // unbounded objective cannot happen in phase one
    mpq_class piv = T[leave][enter];
    for (auto &x : T[leave]) x /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || sgn(T[i][enter]) == 0) continue;
      mpq_class f = T[i][enter];
      for (std::size_t j = 0; j <= n; ++j)
        if (sgn(T[leave][j]) != 0) T[i][j] -= f * T[leave][j];
    }
    basis[leave] = enter;
  }
  return sgn(obj[n]) == 0;
}

} // namespace ibfifo
