#include "qbound/neldermead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace qbound {

namespace {
constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;
}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& objective,
                             const Vector& start, const Vector& initial_step,
                             const NelderMeadOptions& options) {
    const int n = static_cast<int>(start.size());
    if (n < 1 || initial_step.size() != n) {
        throw DomainError("nelder_mead: bad start/step sizes");
    }

    NelderMeadResult result;
    auto eval = [&](const Vector& x) {
        ++result.evaluations;
        const double f = objective(x);
        return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
    };

    std::vector<Vector> pts(n + 1, start);
    std::vector<double> vals(n + 1);
    for (int i = 1; i <= n; ++i) pts[i][i - 1] += initial_step[i - 1];
    for (int i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<int> order(n + 1);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        ++result.iterations;
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return vals[a] < vals[b]; });
        const int best = order[0], second_worst = order[n - 1], worst = order[n];

        double diameter = 0.0;
        for (int i = 1; i <= n; ++i) {
            diameter = std::max(diameter, (pts[order[i]] - pts[best]).norm());
        }
        const double spread =
            std::isfinite(vals[worst]) ? vals[worst] - vals[best] : vals[worst];
        if (diameter <= options.x_tolerance && spread <= options.f_tolerance) {
            result.converged = true;
            break;
        }

        Vector centroid = Vector::Zero(n);
        for (int i = 0; i <= n; ++i) {
            if (i != worst) centroid += pts[i];
        }
        centroid /= n;

        const Vector reflected = centroid + kReflect * (centroid - pts[worst]);
        const double f_reflected = eval(reflected);

        if (f_reflected < vals[best]) {
            const Vector expanded = centroid + kExpand * (reflected - centroid);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                pts[worst] = expanded;
                vals[worst] = f_expanded;
            } else {
                pts[worst] = reflected;
                vals[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < vals[second_worst]) {
            pts[worst] = reflected;
            vals[worst] = f_reflected;
            continue;
        }

        const bool outside = f_reflected < vals[worst];
        const Vector contracted =
            outside ? Vector(centroid + kContract * (reflected - centroid))
                    : Vector(centroid - kContract * (centroid - pts[worst]));
        const double f_contracted = eval(contracted);
        if (f_contracted < std::min(f_reflected, vals[worst])) {
            pts[worst] = contracted;
            vals[worst] = f_contracted;
            continue;
        }

        for (int i = 0; i <= n; ++i) {  // shrink toward the best vertex
            if (i == best) continue;
            pts[i] = pts[best] + kShrink * (pts[i] - pts[best]);
            vals[i] = eval(pts[i]);
        }
    }

    int best = 0;
    for (int i = 1; i <= n; ++i) {
        if (vals[i] < vals[best]) best = i;
    }
    result.x = pts[best];
    result.value = vals[best];
    return result;
}

}  // namespace qbound
