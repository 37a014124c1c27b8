#pragma once

#include <array>
#include <numbers>

#include "rdlab/common.hpp"

namespace rdlab {

enum class Bc { Dirichlet, Neumann };

inline const char* to_string(Bc bc) {
    return bc == Bc::Dirichlet ? "dirichlet" : "neumann";
}

// Uniform rectangular grid on (0,L1)[x(0,L2)].
//
// Dirichlet grids store interior nodes x_i = i*h with h = L/(n+1); the
// boundary value 0 is implicit. Neumann grids store cell centers
// x_i = (i+1/2)*h with h = L/n and a zero-flux mirror closure. Both
// closures make the implicit diffusion step an M-matrix.
struct SpatialGrid {
    int dim = 1;
    std::array<double, 2> lengths{1.0, 0.0};
    std::array<int, 2> n_cells{0, 0};
    std::array<double, 2> spacing{0.0, 0.0};
    Bc bc = Bc::Dirichlet;
    std::vector<double> quad_weights;  // per node, sums to |Omega|

    int node_count() const { return dim == 1 ? n_cells[0] : n_cells[0] * n_cells[1]; }

    double coord(int axis, int idx) const {
        if (bc == Bc::Dirichlet) return (idx + 1) * spacing[axis];
        return (idx + 0.5) * spacing[axis];
    }

    // Flat index -> per-axis indices (ix fastest).
    std::array<int, 2> unflatten(int flat) const {
        if (dim == 1) return {flat, 0};
        return {flat % n_cells[0], flat / n_cells[0]};
    }

    std::array<double, 2> node_pos(int flat) const {
        auto ij = unflatten(flat);
        std::array<double, 2> x{coord(0, ij[0]), 0.0};
        if (dim == 2) x[1] = coord(1, ij[1]);
        return x;
    }

    double measure() const {
        return dim == 1 ? lengths[0] : lengths[0] * lengths[1];
    }

    // Volume element of the uniform stencil, h1[*h2]. Used by the
    // operator-consistent pairings below.
    double cell_measure() const {
        return dim == 1 ? spacing[0] : spacing[0] * spacing[1];
    }
};

inline SpatialGrid build_grid(const std::vector<double>& lengths,
                              const std::vector<int>& n_cells, Bc bc) {
    require(lengths.size() == n_cells.size(), "build_grid: lengths/n_cells size mismatch");
    require(lengths.size() == 1 || lengths.size() == 2, "build_grid: dim must be 1 or 2");
    SpatialGrid g;
    g.dim = static_cast<int>(lengths.size());
    g.bc = bc;
    for (int a = 0; a < g.dim; ++a) {
        require(lengths[a] > 0.0, "build_grid: lengths must be positive");
        require(n_cells[a] >= 3, "build_grid: need at least 3 nodes per axis");
        g.lengths[a] = lengths[a];
        g.n_cells[a] = n_cells[a];
        g.spacing[a] = bc == Bc::Dirichlet ? lengths[a] / (n_cells[a] + 1)
                                           : lengths[a] / n_cells[a];
    }

    // Per-axis weights. Neumann cell centers carry the midpoint rule. For
    // Dirichlet interior nodes the end nodes absorb the boundary half-cells
    // (3h/2) so the weights cover (0,L) exactly.
    auto axis_weights = [&](int a) {
        std::vector<double> w(g.n_cells[a], g.spacing[a]);
        if (bc == Bc::Dirichlet) {
            w.front() = 1.5 * g.spacing[a];
            w.back() = 1.5 * g.spacing[a];
        }
        return w;
    };
    auto wx = axis_weights(0);
    if (g.dim == 1) {
        g.quad_weights = wx;
    } else {
        auto wy = axis_weights(1);
        g.quad_weights.resize(static_cast<std::size_t>(g.n_cells[0]) * g.n_cells[1]);
        for (int iy = 0; iy < g.n_cells[1]; ++iy)
            for (int ix = 0; ix < g.n_cells[0]; ++ix)
                g.quad_weights[ix + static_cast<std::size_t>(g.n_cells[0]) * iy] = wx[ix] * wy[iy];
    }
    return g;
}

// D * discrete Laplacian, standard 3-point (5-point in 2D) stencil with the
// grid's boundary closure: zero Dirichlet values, zero-flux mirror ghosts.
inline void apply_diffusion(const SpatialGrid& g, std::span<const double> u, double D,
                            std::span<double> out) {
    require(D > 0.0, "apply_diffusion: D must be positive");
    require(static_cast<int>(u.size()) == g.node_count(), "apply_diffusion: length mismatch");
    require(u.size() == out.size(), "apply_diffusion: output length mismatch");

    const int nx = g.n_cells[0];
    const int ny = g.dim == 2 ? g.n_cells[1] : 1;
    const double cx = D / sq(g.spacing[0]);
    const double cy = g.dim == 2 ? D / sq(g.spacing[1]) : 0.0;
    const bool dir = g.bc == Bc::Dirichlet;

    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const int idx = ix + nx * iy;
            const double c = u[idx];
            double left = ix > 0 ? u[idx - 1] : (dir ? 0.0 : c);
            double right = ix < nx - 1 ? u[idx + 1] : (dir ? 0.0 : c);
            double acc = cx * (left - 2.0 * c + right);
            if (g.dim == 2) {
                double down = iy > 0 ? u[idx - nx] : (dir ? 0.0 : c);
                double up = iy < ny - 1 ? u[idx + nx] : (dir ? 0.0 : c);
                acc += cy * (down - 2.0 * c + up);
            }
            out[idx] = acc;
        }
    }
}

inline std::vector<double> apply_diffusion(const SpatialGrid& g,
                                           const std::vector<double>& u, double D) {
    std::vector<double> out(u.size());
    apply_diffusion(g, u, D, out);
    return out;
}

// Smallest eigenvalue of -Laplace on Omega with the grid's boundary
// condition, in closed form for the box domain.
inline double principal_eigenvalue(const SpatialGrid& g) {
    if (g.bc == Bc::Neumann) return 0.0;
    double lam = 0.0;
    for (int a = 0; a < g.dim; ++a) lam += sq(std::numbers::pi / g.lengths[a]);
    return lam;
}

// Quadrature inner product over the node set.
inline double inner_product(const SpatialGrid& g, std::span<const double> a,
                            std::span<const double> b) {
    require(a.size() == b.size() && static_cast<int>(a.size()) == g.node_count(),
            "inner_product: length mismatch");
    double s = 0.0;
    for (int i = 0; i < g.node_count(); ++i) s += g.quad_weights[i] * a[i] * b[i];
    return s;
}

// Pairing <-Laplace_h u, v> with the uniform stencil measure h1[*h2]. This is
// the bilinear form the discrete operator is symmetric under; it matches
// gradient_pairing exactly.
inline double laplace_pairing(const SpatialGrid& g, std::span<const double> u,
                              std::span<const double> v) {
    std::vector<double> lap(u.size());
    apply_diffusion(g, u, 1.0, lap);
    double s = 0.0;
    const double w = g.cell_measure();
    for (std::size_t i = 0; i < u.size(); ++i) s -= w * lap[i] * v[i];
    return s;
}

// Edge-based gradient pairing: sum over faces of (du/h)(dv/h) * h1[*h2].
// Dirichlet includes boundary faces via the one-sided difference against the
// zero boundary value; Neumann has zero-flux boundary faces.
inline double gradient_pairing(const SpatialGrid& g, std::span<const double> u,
                               std::span<const double> v) {
    const int nx = g.n_cells[0];
    const int ny = g.dim == 2 ? g.n_cells[1] : 1;
    const bool dir = g.bc == Bc::Dirichlet;
    const double w = g.cell_measure();
    double s = 0.0;

    // x-direction faces
    {
        const double inv_h2 = 1.0 / sq(g.spacing[0]);
        for (int iy = 0; iy < ny; ++iy) {
            const int row = nx * iy;
            for (int ix = 0; ix + 1 < nx; ++ix) {
                const double du = u[row + ix + 1] - u[row + ix];
                const double dv = v[row + ix + 1] - v[row + ix];
                s += w * inv_h2 * du * dv;
            }
            if (dir) {
                s += w * inv_h2 * (u[row] * v[row] +
                                   u[row + nx - 1] * v[row + nx - 1]);
            }
        }
    }
    if (g.dim == 2) {
        const double inv_h2 = 1.0 / sq(g.spacing[1]);
        for (int ix = 0; ix < nx; ++ix) {
            for (int iy = 0; iy + 1 < ny; ++iy) {
                const double du = u[ix + nx * (iy + 1)] - u[ix + nx * iy];
                const double dv = v[ix + nx * (iy + 1)] - v[ix + nx * iy];
                s += w * inv_h2 * du * dv;
            }
            if (dir) {
                s += w * inv_h2 * (u[ix] * v[ix] +
                                   u[ix + nx * (ny - 1)] * v[ix + nx * (ny - 1)]);
            }
        }
    }
    return s;
}

// d-component state sampled on a grid at one time instant.
struct Field {
    int d = 1;
    std::vector<std::vector<double>> values;  // [component][node]

    static Field constant(const SpatialGrid& g, const std::vector<double>& c) {
        Field f;
        f.d = static_cast<int>(c.size());
        f.values.assign(f.d, {});
        for (int i = 0; i < f.d; ++i) f.values[i].assign(g.node_count(), c[i]);
        return f;
    }

    bool finite() const {
        for (const auto& comp : values)
            if (!all_finite(comp)) return false;
        return true;
    }
};

inline void check_field(const SpatialGrid& g, const Field& f, const char* where) {
    require(f.d == static_cast<int>(f.values.size()), std::string(where) + ": bad component count");
    for (const auto& comp : f.values)
        require(static_cast<int>(comp.size()) == g.node_count(),
                std::string(where) + ": field/grid size mismatch");
}

inline double field_norm_l2(const SpatialGrid& g, const Field& f) {
    double s = 0.0;
    for (const auto& comp : f.values) s += inner_product(g, comp, comp);
    return std::sqrt(s);
}

inline double field_norm_linf(const Field& f) {
    double m = 0.0;
    for (const auto& comp : f.values)
        for (double x : comp) m = std::max(m, std::abs(x));
    return m;
}

inline double field_h1_seminorm(const SpatialGrid& g, const Field& f) {
    double s = 0.0;
    for (const auto& comp : f.values) s += gradient_pairing(g, comp, comp);
    return std::sqrt(s);
}

// Per-component integrals of |u^i|^{p_i} (the p-th powers, not the roots).
inline std::vector<double> field_lp_powers(const SpatialGrid& g, const Field& f,
                                           const std::vector<double>& exponents) {
    require(exponents.size() == static_cast<std::size_t>(f.d), "field_lp_powers: exponent count");
    std::vector<double> out(f.d, 0.0);
    for (int i = 0; i < f.d; ++i) {
        require(exponents[i] >= 1.0, "field_lp_powers: p must be >= 1");
        double s = 0.0;
        for (int k = 0; k < g.node_count(); ++k)
            s += g.quad_weights[k] * std::pow(std::abs(f.values[i][k]), exponents[i]);
        out[i] = s;
    }
    return out;
}

}  // namespace rdlab
