#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "rqv/bipp.hpp"
#include "rqv/error.hpp"

// Deliberately shares no code with the optimizers in bipp.cpp.

namespace rqv {

namespace {

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
};

// Exhaustive search of `f` on a regular grid over `box`, then repeated
// searches on finer grids spanning two cells either side of the best point.
// `better(a, b)` is true when a improves on b.
std::vector<double> zoom_search(const std::function<double(const std::vector<double>&)>& f, Box box,
                                std::size_t resolution, const std::function<bool(double, double)>& better,
                                double& best_value) {
    const std::size_t m = box.lo.size();
    std::vector<double> full(m);
    for (std::size_t i = 0; i < m; ++i) full[i] = box.hi[i] - box.lo[i];
    std::vector<double> best(m);
    bool have = false;
    for (int level = 0; level < 64; ++level) {
        std::vector<std::vector<double>> axes(m);
        for (std::size_t i = 0; i < m; ++i) {
            axes[i].resize(resolution);
            for (std::size_t k = 0; k < resolution; ++k) {
                axes[i][k] = box.lo[i] + (box.hi[i] - box.lo[i]) * static_cast<double>(k) / (resolution - 1);
            }
            axes[i].back() = box.hi[i];
        }
        std::vector<std::size_t> idx(m, 0);
        std::vector<double> point(m);
        while (true) {
            for (std::size_t i = 0; i < m; ++i) point[i] = axes[i][idx[i]];
            const double v = f(point);
            if (!have || better(v, best_value)) {
                best_value = v;
                best = point;
                have = true;
            }
            std::size_t d = 0;
            while (d < m && ++idx[d] == resolution) idx[d++] = 0;
            if (d == m) break;
        }
        bool collapsed = true;
        for (std::size_t i = 0; i < m; ++i) {
            const double cell = (box.hi[i] - box.lo[i]) / (resolution - 1);
            if (cell > 1e-13 * full[i]) collapsed = false;
            const double lo = std::max(box.lo[i], best[i] - 2 * cell);
            const double hi = std::min(box.hi[i], best[i] + 2 * cell);
            box.lo[i] = lo;
            box.hi[i] = hi;
        }
        if (collapsed) break;
    }
    return best;
}

}  // namespace

BippBounds bipp_grid_oracle(const PartialPrior& prior, double t, std::size_t resolution) {
    if (resolution < 10) throw InvalidArgument("grid oracle resolution must be at least 10");
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("exposure time must be finite and non-negative");
    const std::size_t m = prior.m();
    const auto& eps = prior.epsilons();
    const auto& th = prior.thetas();
    constexpr double inf = std::numeric_limits<double>::infinity();

    BippBounds out;
    out.method = BippMethod::grid;

    if (t == 0.0) {
        double lo = 0.0;
        double hi = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            lo += eps[i] * th[i];
            hi += eps[i + 1] * th[i];
        }
        out.lower = lo;
        out.upper = hi;
        return out;
    }

    // Upper: one support point per band.
    Box ubox;
    for (std::size_t i = 0; i < m; ++i) {
        double top = eps[i + 1];
        if (!std::isfinite(top)) top = eps[i] + 2.0 * (2.0 + th[m - 1] / th[m - 2]) / t;
        ubox.lo.push_back(eps[i] + 1e-12 * (top - eps[i]));
        ubox.hi.push_back(top);
    }
    auto mean_at = [&](const std::vector<double>& lam) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double w = th[i] * std::exp(-(lam[i] - lam[0]) * t);
            num += w * lam[i];
            den += w;
        }
        return num / den;
    };
    zoom_search(mean_at, ubox, resolution, std::greater<>{}, out.upper);

    // Lower: band i splits its mass between its two edges.
    Box lbox{std::vector<double>(m, 0.0), std::vector<double>(m, 1.0)};
    auto split_mean = [&](const std::vector<double>& x) {
        std::vector<double> pts;
        std::vector<double> ws;
        for (std::size_t i = 0; i < m; ++i) {
            if (x[i] > 0.0) {
                pts.push_back(eps[i]);
                ws.push_back(x[i] * th[i]);
            }
            if (x[i] < 1.0 && eps[i + 1] < inf) {
                pts.push_back(eps[i + 1]);
                ws.push_back((1.0 - x[i]) * th[i]);
            }
        }
        if (pts.empty()) return inf;
        const double base = *std::min_element(pts.begin(), pts.end());
        double num = 0.0;
        double den = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double w = ws[k] * std::exp(-(pts[k] - base) * t);
            num += w * pts[k];
            den += w;
        }
        return num / den;
    };
    zoom_search(split_mean, lbox, resolution, std::less<>{}, out.lower);
    return out;
}

}  // namespace rqv
