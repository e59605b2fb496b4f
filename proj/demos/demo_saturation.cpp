// Why L must stay in its valid band: past it, A(p) rounds to exactly 1 and
// the gradient through the approximation vanishes.

#include <cstdio>

#include "anyloss/anyloss.hpp"

int main() {
    using namespace anyloss;
    for (double t : {0.1, 0.01, 0.001, 1e-14, 1e-15, 1e-16}) {
        const LRange r = valid_L_range(AccuracyLevel(t));
        std::printf("t=%-6g  %6.2f <= L <= %6.2f%s\n", t, r.min_L, r.max_L, r.empty() ? "  (empty)" : "");
    }
    for (double L : {73.0, 100.0}) {
        const AmplifyingScale s(L);
        const double yh = approximate(0.9, s);
        std::printf("L=%-4g A(0.9) = %.17g  dA/dp = %g\n", L, yh, approximate_derivative(yh, s));
    }
}
