// Compares the N*eps rule of thumb with the exact loss for a few typical fee levels.

#include <feedrag/error_analysis.hpp>
#include <feedrag/loss.hpp>

#include <cstdio>

int main()
{
    using namespace feedrag;

    const Rate r{0.07};
    for (double fee : {0.001, 0.0025, 0.005, 0.01, 0.02}) {
        for (int years : {10, 30, 50}) {
            const Rate eps{fee};
            const Horizon n{years};
            std::printf("fee %.2f%%  %2d years  exact %6.2f%%  N*eps %6.2f%%  rel. error %5.1f%%\n", 100 * fee, years,
                        100 * true_loss_constant(r, eps, n), 100 * approx_loss_l1(eps, n),
                        100 * relative_error(r, eps, n));
        }
    }
}
