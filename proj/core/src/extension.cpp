#include "fracbayes/extension.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/SparseCholesky>

#include "fracbayes/error.hpp"

namespace fracbayes {

namespace {

using Local = std::array<std::array<double, 4>, 4>;

// Bilinear element matrix on cell (i, j): ax * w (Kx (x) My) + w (Mx (x) Ky),
// local node l = ix + 2 iy.
Local element_matrix(double hx, double hy, double ax, double w) {
  const double kx[2][2] = {{1.0 / hx, -1.0 / hx}, {-1.0 / hx, 1.0 / hx}};
  const double mx[2][2] = {{hx / 3.0, hx / 6.0}, {hx / 6.0, hx / 3.0}};
  const double ky[2][2] = {{1.0 / hy, -1.0 / hy}, {-1.0 / hy, 1.0 / hy}};
  const double my[2][2] = {{hy / 3.0, hy / 6.0}, {hy / 6.0, hy / 3.0}};
  Local e{};
  for (int l = 0; l < 4; ++l) {
    for (int m = 0; m < 4; ++m) {
      const int lx = l % 2, ly = l / 2, mxi = m % 2, myi = m / 2;
      e[l][m] = w * (ax * kx[lx][mxi] * my[ly][myi] + mx[lx][mxi] * ky[ly][myi]);
    }
  }
  return e;
}

std::array<Eigen::Index, 4> element_nodes(int nx, int i, int j) {
  const auto base = static_cast<Eigen::Index>(j) * nx + i;
  return {base, base + 1, base + nx, base + nx + 1};
}

// sum over elements of u^T E u for the given per-cell x-coefficient.
template <typename CoefAt>
double quadratic_form(const ExtensionField& p, const ExtensionGrid& grid, CoefAt coef_at) {
  double total = 0.0;
  const double hx = grid.base.h();
  for (int j = 0; j + 1 < grid.ny(); ++j) {
    const double hy = grid.y_nodes[j + 1] - grid.y_nodes[j];
    const double w = grid.weight(j);
    for (int i = 0; i + 1 < grid.nx(); ++i) {
      const Local e = element_matrix(hx, hy, coef_at(i), w);
      const auto nodes = element_nodes(grid.nx(), i, j);
      // Element matrices annihilate constants; shifting avoids cancellation.
      const double shift = p.values()[nodes[0]];
      for (int l = 0; l < 4; ++l) {
        for (int m = 0; m < 4; ++m) {
          total += (p.values()[nodes[l]] - shift) * e[l][m] * (p.values()[nodes[m]] - shift);
        }
      }
    }
  }
  return total;
}

}  // namespace

double ExtensionGrid::weight(int j) const {
  return std::pow(0.5 * (y_nodes.at(j) + y_nodes.at(j + 1)), a_exponent);
}

ExtensionGrid make_extension_grid(const Mesh1D& base, double s, int n_levels, double y_max,
                                  double grading) {
  detail::require(s > 0.0 && s < 1.0, "extension solver requires s in (0, 1)");
  detail::require(n_levels >= 2, "extension grid needs at least 2 y-cells");
  detail::require(y_max > 0.0 && std::isfinite(y_max), "y_max must be positive");
  detail::require(grading >= 1.0, "y grading exponent must be >= 1");
  std::vector<double> y(static_cast<std::size_t>(n_levels) + 1);
  for (int j = 0; j <= n_levels; ++j) {
    y[j] = y_max * std::pow(static_cast<double>(j) / n_levels, grading);
  }
  return ExtensionGrid{base, std::move(y), 1.0 - 2.0 * s, s};
}

ExtensionField::ExtensionField(int nx, int ny, Eigen::VectorXd values)
    : nx_(nx), ny_(ny), values_(std::move(values)) {
  detail::require(values_.size() == static_cast<Eigen::Index>(nx) * ny,
                  "extension field size mismatch");
}

Eigen::VectorXd ExtensionField::level(int j) const {
  detail::require(j >= 0 && j < ny_, "extension level out of range");
  return values_.segment(static_cast<Eigen::Index>(j) * nx_, nx_);
}

double extension_constant(double s) {
  detail::require(s > 0.0 && s < 1.0, "extension constant requires s in (0, 1)");
  return std::pow(2.0, 1.0 - 2.0 * s) * std::tgamma(1.0 - s) / std::tgamma(s);
}

ExtensionField solve_extension(const Coefficient& a, double s, const Field& f,
                               const ExtensionGrid& grid) {
  detail::require(s > 0.0 && s < 1.0, "extension solver requires s in (0, 1)");
  detail::require(std::abs(grid.a_exponent - (1.0 - 2.0 * s)) < 1e-14,
                  "extension grid was built for a different order");
  detail::require(static_cast<int>(a.size()) == grid.base.n_cells(),
                  "coefficient does not match the extension base mesh");
  detail::require(f.size() == grid.nx(), "source does not match the extension base mesh");

  const int nx = grid.nx();
  const int ny = grid.ny();
  const Eigen::Index total = static_cast<Eigen::Index>(nx) * ny;
  // Constants span the kernel; pin the top-right node and remove the
  // resulting offset by per-level mean subtraction afterwards.
  const Eigen::Index pinned = total - 1;
  auto reduced = [pinned](Eigen::Index g) { return g < pinned ? g : g - 1; };

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(16) * (nx - 1) * (ny - 1));
  const double hx = grid.base.h();
  for (int j = 0; j + 1 < ny; ++j) {
    const double hy = grid.y_nodes[j + 1] - grid.y_nodes[j];
    const double w = grid.weight(j);
    for (int i = 0; i + 1 < nx; ++i) {
      const Local e = element_matrix(hx, hy, a[i], w);
      const auto nodes = element_nodes(nx, i, j);
      for (int l = 0; l < 4; ++l) {
        if (nodes[l] == pinned) continue;
        for (int m = 0; m < 4; ++m) {
          if (nodes[m] == pinned) continue;
          triplets.emplace_back(reduced(nodes[l]), reduced(nodes[m]), e[l][m]);
        }
      }
    }
  }
  SparseMatrix system(total - 1, total - 1);
  system.setFromTriplets(triplets.begin(), triplets.end());

  const SparseMatrix mass_x = assemble_mass(grid.base);
  const Eigen::VectorXd boundary_load = extension_constant(s) * (mass_x * f.values());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(total - 1);
  for (int i = 0; i < nx; ++i) rhs[reduced(i)] += boundary_load[i];

  Eigen::SimplicialLDLT<SparseMatrix> ldlt(system);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError("extension system factorization failed (" + std::to_string(total - 1) +
                         " unknowns)");
  }
  Eigen::VectorXd reduced_solution = ldlt.solve(rhs);
  // The graded weight makes the system badly scaled near y = 0; two refinement
  // sweeps bring the Galerkin residual back to round-off.
  for (int sweep = 0; sweep < 2; ++sweep) {
    const Eigen::VectorXd residual = rhs - system * reduced_solution;
    reduced_solution += ldlt.solve(residual);
  }
  if (ldlt.info() != Eigen::Success || !reduced_solution.allFinite()) {
    throw NumericalError("extension system solve failed");
  }

  Eigen::VectorXd values(total);
  values.head(pinned) = reduced_solution.head(pinned);
  values[pinned] = 0.0;
  for (int j = 0; j < ny; ++j) {
    auto row = values.segment(static_cast<Eigen::Index>(j) * nx, nx);
    row.array() -= mean_value(mass_x, row);
  }
  return ExtensionField(nx, ny, std::move(values));
}

double weighted_h1_seminorm(const ExtensionField& p, const ExtensionGrid& grid) {
  detail::require(p.nx() == grid.nx() && p.ny() == grid.ny(), "field does not match the grid");
  return std::sqrt(std::max(0.0, quadratic_form(p, grid, [](int) { return 1.0; })));
}

double extension_energy(const ExtensionField& p, const ExtensionGrid& grid, const Coefficient& a) {
  detail::require(p.nx() == grid.nx() && p.ny() == grid.ny(), "field does not match the grid");
  detail::require(static_cast<int>(a.size()) == grid.base.n_cells(), "coefficient does not match");
  return quadratic_form(p, grid, [&a](int i) { return a[i]; });
}

double extension_boundary_work(const ExtensionField& p, const ExtensionGrid& grid, double s,
                               const Field& f) {
  const SparseMatrix mass_x = assemble_mass(grid.base);
  return extension_constant(s) * f.values().dot(mass_x * p.trace());
}

double max_level_mean(const ExtensionField& p, const ExtensionGrid& grid) {
  const SparseMatrix mass_x = assemble_mass(grid.base);
  double worst = 0.0;
  for (int j = 0; j < p.ny(); ++j) {
    const Eigen::VectorXd row = p.level(j);
    const double scale = std::max(1e-300, l2_norm(mass_x, row));
    worst = std::max(worst, std::abs((mass_x * row).sum()) / scale);
  }
  return worst;
}

void write_extension_csv(std::ostream& out, const ExtensionField& p, const ExtensionGrid& grid) {
  const auto old_precision = out.precision(17);
  out << "x,y,P\n";
  for (int j = 0; j < p.ny(); ++j) {
    for (int i = 0; i < p.nx(); ++i) {
      out << grid.base.node(i) << ',' << grid.y_nodes[j] << ',' << p.at(i, j) << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace fracbayes
