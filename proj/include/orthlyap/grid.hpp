#pragma once

// Rectangular evaluation grids. A GridSpec is a box [lo, hi] with a point
// count per axis; the total point count is capped so nD sweeps stay sane.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "orthlyap/error.hpp"

namespace orthlyap {

inline constexpr std::int64_t default_grid_cap = 1'000'000;

struct GridSpec {
    Eigen::VectorXd lo, hi;
    std::vector<int> res;  // points per axis, >= 2

    static GridSpec box(Eigen::VectorXd lo, Eigen::VectorXd hi, std::vector<int> res,
                        std::int64_t cap = default_grid_cap) {
        if (lo.size() != hi.size() || static_cast<std::size_t>(lo.size()) != res.size())
            throw DimensionMismatch("grid bounds and resolution must have equal dimension");
        std::int64_t total = 1;
        for (std::size_t i = 0; i < res.size(); ++i) {
            if (!(lo[static_cast<int>(i)] < hi[static_cast<int>(i)]))
                throw Error("grid requires lo < hi on every axis");
            if (res[i] < 2) throw Error("grid needs at least 2 points per axis");
            total *= res[i];
            if (total > cap)
                throw TooLarge("grid of more than " + std::to_string(cap) + " points");
        }
        return GridSpec{std::move(lo), std::move(hi), std::move(res)};
    }

    // Uniform box [l, u]^n; the per-axis count shrinks with n to respect the cap.
    static GridSpec cube(int n, double l, double u, int per_axis = 50,
                         std::int64_t cap = default_grid_cap) {
        int r = per_axis;
        while (r > 2 && std::pow(static_cast<double>(r), n) > static_cast<double>(cap))
            --r;
        return box(Eigen::VectorXd::Constant(n, l), Eigen::VectorXd::Constant(n, u),
                   std::vector<int>(static_cast<std::size_t>(n), r), cap);
    }

    int dim() const { return static_cast<int>(res.size()); }

    std::int64_t total_points() const {
        std::int64_t t = 1;
        for (int r : res) t *= r;
        return t;
    }

    double spacing(int axis) const {
        return (hi[axis] - lo[axis]) / (res[static_cast<std::size_t>(axis)] - 1);
    }

    double max_spacing() const {
        double m = 0;
        for (int a = 0; a < dim(); ++a) m = std::max(m, spacing(a));
        return m;
    }

    Eigen::VectorXd point(std::int64_t flat) const {
        Eigen::VectorXd p(dim());
        for (int a = 0; a < dim(); ++a) {
            const int r = res[static_cast<std::size_t>(a)];
            const std::int64_t k = flat % r;
            flat /= r;
            p[a] = lo[a] + spacing(a) * static_cast<double>(k);
        }
        return p;
    }

    std::vector<std::int64_t> multi_index(std::int64_t flat) const {
        std::vector<std::int64_t> idx(static_cast<std::size_t>(dim()));
        for (int a = 0; a < dim(); ++a) {
            idx[static_cast<std::size_t>(a)] = flat % res[static_cast<std::size_t>(a)];
            flat /= res[static_cast<std::size_t>(a)];
        }
        return idx;
    }

    std::int64_t flat_index(const std::vector<std::int64_t>& idx) const {
        std::int64_t flat = 0, stride = 1;
        for (int a = 0; a < dim(); ++a) {
            flat += idx[static_cast<std::size_t>(a)] * stride;
            stride *= res[static_cast<std::size_t>(a)];
        }
        return flat;
    }

    // Flat index of the grid point nearest to x (clamped into the box).
    std::int64_t nearest_index(const Eigen::VectorXd& x) const {
        std::vector<std::int64_t> idx(static_cast<std::size_t>(dim()));
        for (int a = 0; a < dim(); ++a) {
            const double k = std::round((x[a] - lo[a]) / spacing(a));
            const auto r = static_cast<std::int64_t>(res[static_cast<std::size_t>(a)]);
            idx[static_cast<std::size_t>(a)] =
                std::min(r - 1, std::max<std::int64_t>(0, static_cast<std::int64_t>(k)));
        }
        return flat_index(idx);
    }

    bool contains(const Eigen::VectorXd& x) const {
        for (int a = 0; a < dim(); ++a)
            if (x[a] < lo[a] || x[a] > hi[a]) return false;
        return true;
    }

    void for_each(const std::function<void(std::int64_t, const Eigen::VectorXd&)>& fn) const {
        const std::int64_t total = total_points();
        for (std::int64_t i = 0; i < total; ++i) fn(i, point(i));
    }
};

}  // namespace orthlyap
