#include "rqv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "rqv/error.hpp"

namespace rqv {

std::vector<double> solve_dense(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) {
        throw InvalidArgument("solve_dense: dimension mismatch");
    }
    double scale = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (double v : a.row(r)) scale = std::max(scale, std::abs(v));
    }
    const double tiny = scale * 1e-300 + 1e-300;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(a(r, k)) > std::abs(a(piv, k))) piv = r;
        }
        if (std::abs(a(piv, k)) <= tiny) {
            throw SingularSystem("singular linear system at column " + std::to_string(k));
        }
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(piv, c));
            std::swap(b[k], b[piv]);
        }
        const double inv = 1.0 / a(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = a(r, k) * inv;
            if (f == 0.0) continue;
            a(r, k) = 0.0;
            for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= f * a(k, c);
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= a(k, c) * x[c];
        x[k] = s / a(k, k);
    }
    return x;
}

double residual_norm(const Matrix& a, std::span<const double> x, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double s = -b[r];
        for (std::size_t c = 0; c < a.cols(); ++c) s += a(r, c) * x[c];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

}  // namespace rqv
