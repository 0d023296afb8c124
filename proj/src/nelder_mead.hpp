#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace isodamp::detail {

struct Minimum2 {
    std::array<double, 2> x{};
    double f = 0.0;
};

// Nelder-Mead on two parameters with the standard reflection/expansion/
// contraction/shrink coefficients (1, 2, 1/2, 1/2).
template <class F>
Minimum2 nelder_mead(F&& f, std::array<double, 2> x0, double step, int max_iter = 400, double f_tol = 1e-12) {
    using P = std::array<double, 2>;
    std::array<P, 3> s{x0, P{x0[0] + step, x0[1]}, P{x0[0], x0[1] + step}};
    std::array<double, 3> v{f(s[0]), f(s[1]), f(s[2])};
    auto lerp = [](const P& a, const P& b, double t) { return P{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])}; };

    for (int it = 0; it < max_iter; ++it) {
        std::array<int, 3> idx{0, 1, 2};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
        const int best = idx[0], mid = idx[1], worst = idx[2];
        const double size = std::max(std::abs(s[worst][0] - s[best][0]), std::abs(s[worst][1] - s[best][1]));
        if (std::abs(v[worst] - v[best]) <= f_tol * (1.0 + std::abs(v[best])) && size < 1e-9) break;

        const P centroid{(s[best][0] + s[mid][0]) / 2.0, (s[best][1] + s[mid][1]) / 2.0};
        const P xr = lerp(centroid, s[worst], -1.0);
        const double fr = f(xr);
        if (fr < v[best]) {
            const P xe = lerp(centroid, s[worst], -2.0);
            const double fe = f(xe);
            if (fe < fr) {
                s[worst] = xe;
                v[worst] = fe;
            } else {
                s[worst] = xr;
                v[worst] = fr;
            }
        } else if (fr < v[mid]) {
            s[worst] = xr;
            v[worst] = fr;
        } else {
            const bool outside = fr < v[worst];
            const P xc = outside ? lerp(centroid, xr, 0.5) : lerp(centroid, s[worst], 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, v[worst])) {
                s[worst] = xc;
                v[worst] = fc;
            } else {
                for (int i : {mid, worst}) {
                    s[i] = lerp(s[best], s[i], 0.5);
                    v[i] = f(s[i]);
                }
            }
        }
    }
    const int b = static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
    return {s[b], v[b]};
}

} // namespace isodamp::detail
