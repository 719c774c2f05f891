#include "crystal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crystal::oracle {

TautString variational_field(const HorizontalEdge& e, const ForcingField& F, int M) {
    if (M < 100) throw std::invalid_argument("oracle needs at least 100 nodes per period");
    if (std::abs(e.n_p) != 1 || std::abs(e.n_q) != 1) throw std::invalid_argument("endpoint values must be +-1");
    if (!(e.q > e.p)) throw std::invalid_argument("empty edge");
    M = (M + 3) / 4 * 4;
    double h = F.epsilon / M;

    TautString s;
    s.x.push_back(e.p);
    double k = std::floor(e.p / h) + 1.0;
    while (true) {
        double x = k * h;
        if (x >= e.q - 1e-12 * std::max(1.0, std::abs(e.q))) break;
        if (x > e.p + 1e-12 * std::max(1.0, std::abs(e.p))) s.x.push_back(x);
        k += 1.0;
    }
    s.x.push_back(e.q);
    std::size_t K = s.x.size() - 1;

    std::vector<double> G(K + 1, 0.0), lo(K + 1), hi(K + 1), m(K + 1);
    for (std::size_t i = 1; i <= K; ++i) G[i] = G[i - 1] + forcing::integral_g(F, s.x[i - 1], s.x[i]);
    for (std::size_t i = 0; i <= K; ++i) {
        lo[i] = G[i] - 1.0;
        hi[i] = G[i] + 1.0;
    }
    lo[0] = hi[0] = e.n_p;
    lo[K] = hi[K] = e.n_q + G[K];

    std::size_t a = 0;
    double ya = lo[0];
    m[0] = ya;
    while (a < K) {
        double smin = -std::numeric_limits<double>::infinity();
        double smax = std::numeric_limits<double>::infinity();
        std::size_t ilo = a + 1, ihi = a + 1, next = K;
        double ynext = lo[K];
        for (std::size_t j = a + 1; j <= K; ++j) {
            double dx = s.x[j] - s.x[a];
            double su = (hi[j] - ya) / dx, sl = (lo[j] - ya) / dx;
            if (sl > smax) {
                next = ihi;
                ynext = hi[ihi];
                break;
            }
            if (su < smin) {
                next = ilo;
                ynext = lo[ilo];
                break;
            }
            if (su < smax) {
                smax = su;
                ihi = j;
            }
            if (sl > smin) {
                smin = sl;
                ilo = j;
            }
        }
        double slope = (ynext - ya) / (s.x[next] - s.x[a]);
        for (std::size_t j = a + 1; j <= next; ++j) m[j] = ya + slope * (s.x[j] - s.x[a]);
        m[next] = ynext;
        if (next < K) ++s.contacts;
        a = next;
        ya = ynext;
    }

    s.n.resize(K + 1);
    for (std::size_t i = 0; i <= K; ++i) s.n[i] = m[i] - G[i];
    s.velocity.resize(K);
    for (std::size_t i = 0; i < K; ++i) s.velocity[i] = (m[i + 1] - m[i]) / (s.x[i + 1] - s.x[i]);
    return s;
}

double velocity_spread(const TautString& s) {
    auto [lo, hi] = std::minmax_element(s.velocity.begin(), s.velocity.end());
    return *hi - *lo;
}

bool is_calibrable_oracle(const HorizontalEdge& e, const ForcingField& F, int M) {
    auto s = variational_field(e, F, M);
    return velocity_spread(s) < grid_constant / M + 1e-6;
}

double constant_forcing_U(double gamma, double l1, double l2) {
    return 4.0 * (std::log(l2) - std::log(l1)) + 2.0 * gamma * (l2 - l1);
}

ConstantForcingRun constant_forcing_rectangle(double gamma, double l10, double l20, double T, double dt_max,
                                              int every) {
    if (!(l10 > 0 && l20 > 0)) throw std::invalid_argument("lengths must be positive");
    auto rhs = [gamma](double a, double b, double& da, double& db) {
        da = -4.0 / b - 2.0 * gamma;
        db = -4.0 / a - 2.0 * gamma;
    };
    ConstantForcingRun run;
    double t = 0.0, a = l10, b = l20;
    run.samples.push_back({t, a, b, constant_forcing_U(gamma, a, b)});
    long step = 0;
    while (t < T) {
        double lmin = std::min(a, b);
        if (lmin < 1e-6) {
            run.extinct = true;
            break;
        }
        double dt = std::min({dt_max, 0.01 * lmin * lmin, T - t});
        double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        rhs(a, b, k1a, k1b);
        rhs(a + 0.5 * dt * k1a, b + 0.5 * dt * k1b, k2a, k2b);
        rhs(a + 0.5 * dt * k2a, b + 0.5 * dt * k2b, k3a, k3b);
        double a3 = a + dt * k3a, b3 = b + dt * k3b;
        if (a3 <= 0 || b3 <= 0) {
            run.extinct = true;
            break;
        }
        rhs(a3, b3, k4a, k4b);
        double na = a + dt / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
        double nb = b + dt / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
        if (na <= 0 || nb <= 0) {
            run.extinct = true;
            break;
        }
        a = na;
        b = nb;
        t += dt;
        if (++step % every == 0 || t >= T) run.samples.push_back({t, a, b, constant_forcing_U(gamma, a, b)});
    }
    run.t_end = t;
    if (run.samples.back().t != t) run.samples.push_back({t, a, b, constant_forcing_U(gamma, a, b)});
    return run;
}

}  // namespace crystal::oracle
