// One uplink round with K unsynchronized devices: prints the true and
// estimated mean of a single transmitted value, and the delays read back
// from the solution next to the true ones.
//
//   blind_sum [K] [L] [snr_db] [seed]

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "boac/channel/oac.hpp"
#include "boac/solver/recovery.hpp"

int main(int argc, char** argv)
{
    using namespace boac;
    const int k = argc > 1 ? std::atoi(argv[1]) : 5;
    const Index l = argc > 2 ? std::atol(argv[2]) : 65;
    const double snr = argc > 3 ? std::stod(argv[3]) : 15.0;
    const std::uint64_t seed = argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 7;

    try {
        const auto grid = SampleGrid::with_length(l);
        const auto ch = draw_channel(k, derive_seed(seed, {0}));
        Rng rng(derive_seed(seed, {1}));
        RMatrix x(1, k);
        for (int i = 0; i < k; ++i) {
            x(0, i) = rng.uniform(-1.0, 1.0);
        }
        const double gamma = std::max(0.0, -x.minCoeff()) + 0.1;
        const auto rm = transmit_round(precode(x, gamma, ch), ch, grid, snr, derive_seed(seed, {2}));
        const auto sol = atomic_denoise(make_denoise_problem(rm, 0));
        const auto rec = recover_mean(sol, k, gamma);

        std::printf("K = %d, L = %ld, SNR = %.1f dB, sigma = %.4f, ADMM iterations = %d\n", k,
                    static_cast<long>(l), snr, rm.sigma(), sol.iterations);
        std::printf("true mean      %+.6f\n", x.mean());
        std::printf("blind estimate %+.6f\n", rec.mean_estimate);

        auto taus = ch.tau;
        std::sort(taus.begin(), taus.end());
        auto support = rec.support;
        std::sort(support.begin(), support.end(), [](auto& a, auto& b) { return a.tau < b.tau; });
        std::printf("\ntrue delays:     ");
        for (double t : taus) {
            std::printf(" %.4f", t);
        }
        std::printf("\nrecovered atoms: ");
        for (const auto& c : support) {
            std::printf(" %.4f (%.3f)", c.tau, c.amplitude);
        }
        std::printf("\n");
        if (!rec.diagnostics.warning.empty()) {
            std::printf("warning: %s\n", rec.diagnostics.warning.c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
