#include "zecap/corpus.hpp"
#include "zecap/grid_oracle.hpp"
#include "zecap/inner.hpp"
#include "zecap/value_iteration.hpp"
#include "random_channels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace zecap;

namespace {

using Vec = std::vector<double>;

void expect_valid_pmf(const InputPmf& f) {
    double total = 0.0;
    for (double w : f.weights) {
        EXPECT_GE(w, 0.0);
        total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_TRUE(f.valid());
}

} // namespace

TEST(SolveInner, Example1NoiselessState) {
    const auto ch = validate(corpus::example1());
    const auto sol = solve_inner(ch, 1, Vec{0.0, 0.0});
    EXPECT_NEAR(sol.value, 1.0, 1e-12);
    EXPECT_NEAR(sol.pmf[0], 0.5, 1e-12);
    EXPECT_NEAR(sol.pmf[1], 0.5, 1e-12);
}

TEST(SolveInner, Example2NoiselessState) {
    const auto ch = validate(corpus::example2());
    const auto sol = solve_inner(ch, 1, Vec{0.0, 1.0});
    EXPECT_NEAR(sol.value, std::log2(3.0), 1e-12);
    EXPECT_NEAR(sol.pmf[0], 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(sol.pmf[1], 2.0 / 3.0, 1e-12);
}

TEST(SolveInner, Example1NoisyStateCopiesNextValue) {
    const auto ch = validate(corpus::example1());
    for (Vec j : {Vec{0.0, 0.0}, Vec{3.0, -1.5}, Vec{-2.0, 7.25}}) {
        EXPECT_NEAR(solve_inner(ch, 0, j).value, j[1], 1e-12);
    }
}

TEST(SolveInner, Example2LpOptimum) {
    const auto ch = validate(corpus::example2());
    const auto sol = solve_lp(build_inner_lp(ch, 1, Vec{0.0, 1.0}));
    EXPECT_NEAR(sol.optimum, 1.0 / 3.0, 1e-12);
}

TEST(SolveInner, RejectsBadValueFunction) {
    const auto ch = validate(corpus::example1());
    EXPECT_THROW(solve_inner(ch, 0, Vec{0.0}), Error);
    EXPECT_THROW(solve_inner(ch, 0, Vec{0.0, std::nan("")}), Error);
}

TEST(SolveInner, ColumnsAreReversedInputs) {
    EXPECT_EQ(inner_lp_column(3, 0), 3u);
    EXPECT_EQ(inner_lp_column(3, 2), 1u);
}

TEST(SolveInner, MaxPropertyOnRandomChannels) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ch = testkit::random_channel(rng, {3, 4, 3, 0.35});
        const auto j = testkit::random_values(rng, ch.num_states());
        for (std::size_t s = 0; s < ch.num_states(); ++s) {
            const auto sol = solve_inner(ch, s, j);
            expect_valid_pmf(sol.pmf);
            EXPECT_NEAR(sol.value, inner_objective(ch, s, j, sol.pmf), 1e-9);
            EXPECT_GE(sol.value + 1e-9, inner_objective(ch, s, j, InputPmf::uniform(ch.num_inputs())));
            for (std::size_t x = 0; x < ch.num_inputs(); ++x)
                EXPECT_GE(sol.value + 1e-9, inner_objective(ch, s, j, InputPmf::point(ch.num_inputs(), x)));
            EXPECT_GT(solve_lp(build_inner_lp(ch, s, j)).optimum, 0.0);
        }
    }
}

TEST(SolveInner, ShiftCovariance) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> shift(-50.0, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ch = testkit::random_channel(rng);
        const auto j = testkit::random_values(rng, ch.num_states());
        const double c = shift(rng);
        Vec shifted = j;
        for (double& v : shifted) v += c;
        for (std::size_t s = 0; s < ch.num_states(); ++s)
            EXPECT_NEAR(solve_inner(ch, s, shifted).value, solve_inner(ch, s, j).value + c, 1e-9);
    }
}

TEST(GridOracle, Example2) {
    const auto ch = validate(corpus::example2());
    const auto g = grid_oracle(ch, 1, Vec{0.0, 1.0}, 1000);
    EXPECT_NEAR(g.value, std::log2(3.0), 1e-3);
    expect_valid_pmf(g.pmf);
}

TEST(GridOracle, ResolutionOneIsCorners) {
    const auto ch = validate(corpus::example2());
    const Vec j{0.0, 1.0};
    const auto g = grid_oracle(ch, 1, j, 1);
    double best = -INFINITY;
    for (std::size_t x = 0; x < 2; ++x) best = std::max(best, inner_objective(ch, 1, j, InputPmf::point(2, x)));
    EXPECT_DOUBLE_EQ(g.value, best);
    EXPECT_TRUE(g.pmf[0] == 1.0 || g.pmf[1] == 1.0);
}

TEST(GridOracle, RejectsLargeAlphabets) {
    const auto ch = validate(corpus::identity_dmc(6));
    EXPECT_THROW(grid_oracle(ch, 0, Vec{0.0}, 10), AlphabetTooLargeError);
}

TEST(GridOracle, Example3PolicyAtIteration49) {
    const auto ch = validate(corpus::example3_reconstructed());
    ValueIterationOptions opt;
    opt.max_iters = 49;
    opt.stop_when_converged = false;
    const auto run = run_value_iteration(ch, opt);
    const auto g = grid_oracle(ch, 0, run.values[49].values, 2000);
    const Vec expected{0.4656, 0.3177, 0.2167};
    for (std::size_t x = 0; x < 3; ++x) EXPECT_NEAR(g.pmf[x], expected[x], 2e-4 + 1.0 / 2000);
}

TEST(GridOracle, AgreesWithLpOnCorpus) {
    for (const auto& e : load_corpus()) {
        const auto ch = validate(e.channel);
        ValueIterationOptions opt;
        opt.max_iters = 20;
        opt.stop_when_converged = false;
        const auto run = run_value_iteration(ch, opt);
        const auto& j = run.values.back().values;
        for (std::size_t s = 0; s < ch.num_states(); ++s) {
            const auto lp = solve_inner(ch, s, j);
            const auto grid = grid_oracle(ch, s, j, 2000);
            EXPECT_LE(grid.value, lp.value + 1e-9) << e.name;
            EXPECT_NEAR(grid.value, lp.value, 2e-3) << e.name << " s=" << s;
        }
    }
}

TEST(GridOracle, AgreesWithLpOnRandomChannels) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ch = testkit::random_channel(rng);
        const auto j = testkit::random_values(rng, ch.num_states(), 0.0, 3.0);
        for (std::size_t s = 0; s < ch.num_states(); ++s) {
            const auto lp = solve_inner(ch, s, j);
            const auto grid = grid_oracle(ch, s, j, 2000);
            EXPECT_LE(grid.value, lp.value + 1e-9);
            EXPECT_NEAR(grid.value, lp.value, 2e-3);
        }
    }
}
